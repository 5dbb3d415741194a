//! XOR-universal Toeplitz hashing over GF(2).
//!
//! A [`HashSpec`] with `n` input bits and `l` output bits is described by a
//! seed of `n + l - 1` bits. Row `i` of the `l x n` matrix reads the seed
//! window `[i, i + n)` back to front, so `T[i][j] = seed[i + n - 1 - j]` and
//! every diagonal is constant. For any fixed `x != x'`, a uniform seed makes
//! `h(x) = h(x')` with probability exactly `2^-l`.
//!
//! The same family serves as Bob's challenge hash and Alice's extractor.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "HashRecord", try_from = "HashRecord")]
pub struct HashSpec {
    input_bits: usize,
    output_bits: usize,
    seed: BitVector,
}

/// Wire form `{n, l, seed}` with the seed hex-encoded.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HashRecord {
    pub n: usize,
    pub l: usize,
    pub seed: String,
}

impl From<HashSpec> for HashRecord {
    fn from(h: HashSpec) -> Self {
        Self {
            n: h.input_bits,
            l: h.output_bits,
            seed: h.seed.to_hex(),
        }
    }
}

impl TryFrom<HashRecord> for HashSpec {
    type Error = Error;

    fn try_from(r: HashRecord) -> Result<Self> {
        check_dims(r.n, r.l)?;
        let seed = BitVector::from_hex(&r.seed, r.n + r.l - 1)?;
        HashSpec::from_seed(r.n, r.l, seed)
    }
}

fn check_dims(n: usize, l: usize) -> Result<()> {
    if n == 0 || l == 0 || l > n {
        return Err(Error::Dimension(format!(
            "hash dimensions n = {n}, l = {l} violate 1 <= l <= n"
        )));
    }
    Ok(())
}

/// Draws a uniformly random member of the `n -> l` Toeplitz family.
pub fn sample_hash<R: Rng + ?Sized>(rng: &mut R, n: usize, l: usize) -> Result<HashSpec> {
    check_dims(n, l)?;
    HashSpec::from_seed(n, l, BitVector::random(n + l - 1, rng))
}

/// Leftover-hash-lemma distance bound `½ · sqrt(2^-k · 2^l)`, capped at one.
pub fn lhl_bound(min_entropy_k: f64, l: usize) -> f64 {
    (0.5 * ((l as f64 - min_entropy_k) / 2.0).exp2()).min(1.0)
}

impl HashSpec {
    pub fn from_seed(n: usize, l: usize, seed: BitVector) -> Result<Self> {
        check_dims(n, l)?;
        if seed.len() != n + l - 1 {
            return Err(Error::LengthMismatch {
                expected: n + l - 1,
                actual: seed.len(),
            });
        }
        Ok(Self {
            input_bits: n,
            output_bits: l,
            seed,
        })
    }

    /// The member whose seed is the integer `index` (MSB first). Used to
    /// enumerate whole families.
    pub fn from_index(n: usize, l: usize, index: u64) -> Result<Self> {
        check_dims(n, l)?;
        if n + l - 1 > 64 {
            return Err(Error::Scale("seed too long to index".into()));
        }
        Self::from_seed(n, l, BitVector::from_u64(index, n + l - 1))
    }

    pub fn input_bits(&self) -> usize {
        self.input_bits
    }

    pub fn output_bits(&self) -> usize {
        self.output_bits
    }

    pub fn seed(&self) -> &BitVector {
        &self.seed
    }

    pub fn seed_len(&self) -> usize {
        self.input_bits + self.output_bits - 1
    }

    /// Matrix row `i` as an `n`-bit word.
    pub fn row(&self, i: usize) -> BitVector {
        assert!(i < self.output_bits);
        self.seed.window(i, self.input_bits).reversed()
    }

    /// Matrix rows as integers (vector bit `j` at integer bit `n - 1 - j`).
    /// Requires `n <= 64`.
    pub fn row_words(&self) -> Vec<u64> {
        assert!(self.input_bits <= 64, "row_words needs n <= 64");
        (0..self.output_bits)
            .map(|i| self.row(i).to_u64().unwrap())
            .collect()
    }

    /// Matrix columns as `l`-bit integers (output bit `i` at integer bit
    /// `l - 1 - i`). Requires `l <= 64`.
    pub fn column_words(&self) -> Vec<u64> {
        assert!(self.output_bits <= 64, "column_words needs l <= 64");
        let l = self.output_bits;
        let n = self.input_bits;
        (0..n)
            .map(|j| {
                (0..l).fold(0u64, |acc, i| {
                    (acc << 1) | self.seed.get(i + n - 1 - j) as u64
                })
            })
            .collect()
    }

    /// `T · x` over GF(2).
    pub fn evaluate(&self, x: &BitVector) -> Result<BitVector> {
        if x.len() != self.input_bits {
            return Err(Error::LengthMismatch {
                expected: self.input_bits,
                actual: x.len(),
            });
        }
        let rev = self.seed.reversed();
        let l = self.output_bits;
        Ok(BitVector::from_bits((0..l).map(|i| {
            let row = rev.window(l - 1 - i, self.input_bits);
            row.dot(x).expect("row length equals input length")
        })))
    }
}

/// Word-level evaluation for inputs of at most 64 bits, given
/// [`HashSpec::row_words`]. Output bit `i` lands at integer bit `l - 1 - i`.
#[inline]
pub fn evaluate_rows(rows: &[u64], x: u64) -> u64 {
    rows.iter()
        .fold(0u64, |acc, r| (acc << 1) | ((r & x).count_ones() & 1) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Role, Streams};
    use proptest::prelude::*;

    /// Naive reference: build the matrix entry by entry from its definition.
    fn naive_eval(h: &HashSpec, x: &BitVector) -> BitVector {
        let (n, l) = (h.input_bits(), h.output_bits());
        BitVector::from_bits((0..l).map(|i| {
            let mut acc = false;
            for j in 0..n {
                acc ^= h.seed().get(i + n - 1 - j) & x.get(j);
            }
            acc
        }))
    }

    #[test]
    fn dimensions_are_validated() {
        let mut rng = Streams::new(1, 0).stream(Role::Bob);
        assert!(matches!(sample_hash(&mut rng, 4, 5), Err(Error::Dimension(_))));
        assert!(sample_hash(&mut rng, 4, 0).is_err());
        assert_eq!(sample_hash(&mut rng, 4, 2).unwrap().seed().len(), 5);
    }

    #[test]
    fn one_bit_family_is_zero_or_identity() {
        let zero = HashSpec::from_index(1, 1, 0).unwrap();
        let id = HashSpec::from_index(1, 1, 1).unwrap();
        for b in [false, true] {
            let x = BitVector::from_bits([b]);
            assert_eq!(zero.evaluate(&x).unwrap(), BitVector::zeros(1));
            assert_eq!(id.evaluate(&x).unwrap(), x);
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let mut rng = Streams::new(2, 0).stream(Role::Bob);
        let h = sample_hash(&mut rng, 37, 11).unwrap();
        assert_eq!(h.evaluate(&BitVector::zeros(37)).unwrap(), BitVector::zeros(11));
    }

    #[test]
    fn identity_seed() {
        let n = 70;
        let mut seed = BitVector::zeros(2 * n - 1);
        seed.set(n - 1, true);
        let h = HashSpec::from_seed(n, n, seed).unwrap();
        let mut rng = Streams::new(3, 0).stream(Role::Alice);
        let x = BitVector::random(n, &mut rng);
        assert_eq!(h.evaluate(&x).unwrap(), x);
    }

    #[test]
    fn matches_naive_product() {
        let mut rng = Streams::new(4, 0).stream(Role::Bob);
        for _ in 0..200 {
            let h = sample_hash(&mut rng, 8, 3).unwrap();
            let x = BitVector::random(8, &mut rng);
            assert_eq!(h.evaluate(&x).unwrap(), naive_eval(&h, &x));
            let fast = evaluate_rows(&h.row_words(), x.to_u64().unwrap());
            assert_eq!(BitVector::from_u64(fast, 3), naive_eval(&h, &x));
        }
        // Multi-word inputs.
        for _ in 0..20 {
            let h = sample_hash(&mut rng, 150, 70).unwrap();
            let x = BitVector::random(150, &mut rng);
            assert_eq!(h.evaluate(&x).unwrap(), naive_eval(&h, &x));
        }
    }

    #[test]
    fn length_mismatch() {
        let h = HashSpec::from_index(4, 2, 9).unwrap();
        assert!(matches!(
            h.evaluate(&BitVector::zeros(5)),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn columns_agree_with_rows() {
        let h = HashSpec::from_index(6, 3, 0b10110101).unwrap();
        let cols = h.column_words();
        let rows = h.row_words();
        for x in 0u64..64 {
            let via_cols = (0..6)
                .filter(|j| x >> (5 - j) & 1 == 1)
                .fold(0, |acc, j| acc ^ cols[j]);
            assert_eq!(via_cols, evaluate_rows(&rows, x));
        }
    }

    #[test]
    fn exact_xor_universality_small() {
        for n in 1..=6usize {
            for l in 1..=n.min(3) {
                let seeds = 1u64 << (n + l - 1);
                let family: Vec<Vec<u64>> = (0..seeds)
                    .map(|s| HashSpec::from_index(n, l, s).unwrap().row_words())
                    .collect();
                for x in 0..(1u64 << n) {
                    for y in (x + 1)..(1u64 << n) {
                        let hits = family
                            .iter()
                            .filter(|r| evaluate_rows(r, x) == evaluate_rows(r, y))
                            .count() as u64;
                        assert_eq!(hits << l, seeds, "n={n} l={l} x={x} y={y}");
                    }
                }
            }
        }
    }

    #[test]
    fn lhl_bound_examples() {
        assert_eq!(lhl_bound(4.0, 4), 0.5);
        assert_eq!(lhl_bound(5.0, 3), 0.25);
        assert_eq!(lhl_bound(10.0, 2), 0.03125);
        assert_eq!(lhl_bound(0.0, 8), 1.0);
    }

    #[test]
    fn serde_record() {
        let h = HashSpec::from_index(5, 3, 0b1011001).unwrap();
        let json = serde_json::to_string(&h).unwrap();
        assert_eq!(json, r#"{"n":5,"l":3,"seed":"b2"}"#);
        let back: HashSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, h);
        assert!(serde_json::from_str::<HashSpec>(r#"{"n":2,"l":3,"seed":"00"}"#).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn linear(seed in any::<u64>(), a in any::<u64>(), b in any::<u64>()) {
            let mut rng = Streams::new(seed, 0).stream(Role::Bob);
            let h = sample_hash(&mut rng, 40, 13).unwrap();
            let x = BitVector::from_u64(a >> 24, 40);
            let y = BitVector::from_u64(b >> 24, 40);
            let lhs = h.evaluate(&x.xor(&y).unwrap()).unwrap();
            let rhs = h.evaluate(&x).unwrap().xor(&h.evaluate(&y).unwrap()).unwrap();
            prop_assert_eq!(&lhs, &rhs);
            prop_assert_eq!(h.evaluate(&x).unwrap(), h.evaluate(&x).unwrap());
        }
    }
}
