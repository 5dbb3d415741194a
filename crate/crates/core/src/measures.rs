//! Exact information measures over explicit finite distributions, the
//! commitment capacity formulas for BS-BC(p, q) and the converse rate bounds.
//!
//! Logarithms are base 2 throughout and `0 log 0 = 0`.

use std::collections::BTreeMap;

use crate::channel::WiretapChannel;
use crate::{Error, Result};

/// Tolerance used when validating that probabilities sum to one.
pub const PROB_TOLERANCE: f64 = 1e-12;

/// An outcome label: one small integer per coordinate.
pub type Outcome = Vec<u32>;

/// A probability mass function over tuples of small integers.
///
/// Outcomes are kept sorted and merged; zero-probability outcomes are
/// dropped, so the stored list is exactly the support.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    arity: usize,
    outcomes: Vec<(Outcome, f64)>,
}

/// Compensated (Neumaier) summation.
pub(crate) fn accurate_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

impl Pmf {
    /// Builds a pmf, merging repeated labels. Rejects negative or non-finite
    /// masses and totals further than [`PROB_TOLERANCE`] from one; totals
    /// within tolerance are renormalized.
    pub fn new<I>(arity: usize, outcomes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Outcome, f64)>,
    {
        let mut merged: BTreeMap<Outcome, Vec<f64>> = BTreeMap::new();
        for (label, p) in outcomes {
            if label.len() != arity {
                return Err(Error::Coordinate(format!(
                    "outcome {label:?} has {} coordinates, expected {arity}",
                    label.len()
                )));
            }
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "probability {p} for outcome {label:?}"
                )));
            }
            merged.entry(label).or_default().push(p);
        }
        let masses: Vec<(Outcome, f64)> = merged
            .into_iter()
            .map(|(label, ps)| (label, accurate_sum(ps)))
            .collect();
        let total = accurate_sum(masses.iter().map(|(_, p)| *p));
        if (total - 1.0).abs() > PROB_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        let outcomes = masses
            .into_iter()
            .filter(|(_, p)| *p > 0.0)
            .map(|(label, p)| (label, p / total))
            .collect();
        Ok(Self { arity, outcomes })
    }

    /// A single-coordinate pmf with labels `0..probs.len()`.
    pub fn from_probs(probs: &[f64]) -> Result<Self> {
        Self::new(
            1,
            probs
                .iter()
                .enumerate()
                .map(|(i, &p)| (vec![i as u32], p)),
        )
    }

    pub fn uniform(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        Self::from_probs(&vec![1.0 / size as f64; size])
    }

    pub fn point_mass(label: Outcome) -> Self {
        Self {
            arity: label.len(),
            outcomes: vec![(label, 1.0)],
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Support of the distribution in label order.
    pub fn outcomes(&self) -> &[(Outcome, f64)] {
        &self.outcomes
    }

    pub fn prob(&self, label: &[u32]) -> f64 {
        self.outcomes
            .binary_search_by(|(l, _)| l.as_slice().cmp(label))
            .map(|i| self.outcomes[i].1)
            .unwrap_or(0.0)
    }

    /// Probability of the event selected by `pred`.
    pub fn prob_where<F: Fn(&[u32]) -> bool>(&self, pred: F) -> f64 {
        accurate_sum(
            self.outcomes
                .iter()
                .filter(|(l, _)| pred(l))
                .map(|(_, p)| *p),
        )
    }

    fn check_coords(&self, coords: &[usize]) -> Result<()> {
        for (i, &c) in coords.iter().enumerate() {
            if c >= self.arity {
                return Err(Error::Coordinate(format!(
                    "coordinate {c} out of range for arity {}",
                    self.arity
                )));
            }
            if coords[..i].contains(&c) {
                return Err(Error::Coordinate(format!("coordinate {c} repeated")));
            }
        }
        Ok(())
    }

    /// Marginal on `coords`, in the given order.
    pub fn marginal(&self, coords: &[usize]) -> Result<Pmf> {
        self.check_coords(coords)?;
        let mut acc: BTreeMap<Outcome, Vec<f64>> = BTreeMap::new();
        for (label, p) in &self.outcomes {
            let key = coords.iter().map(|&c| label[c]).collect();
            acc.entry(key).or_default().push(*p);
        }
        Ok(Self {
            arity: coords.len(),
            outcomes: acc
                .into_iter()
                .map(|(l, ps)| (l, accurate_sum(ps)))
                .collect(),
        })
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        accurate_sum(self.outcomes.iter().map(|(_, p)| -p * p.log2()))
    }
}

/// BSC crossover pair `(p, q)` for Bob's and Eve's marginal channels, both
/// strictly inside `(0, 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CrossoverPair {
    p: f64,
    q: f64,
}

impl CrossoverPair {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        for (name, v) in [("p", p), ("q", q)] {
            if !(v > 0.0 && v < 0.5) {
                return Err(Error::Domain(format!(
                    "crossover {name} = {v} must lie strictly inside (0, 1/2)"
                )));
            }
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {v} outside [0, 1]")))
    }
}

fn h(p: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// `H(p) = -p log p - (1-p) log(1-p)`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    check_unit("p", p)?;
    Ok(h(p))
}

/// Crossover of two cascaded BSCs: `p(1-q) + q(1-p)`.
pub fn binary_convolution(p: f64, q: f64) -> Result<f64> {
    check_unit("p", p)?;
    check_unit("q", q)?;
    Ok(p * (1.0 - q) + q * (1.0 - p))
}

/// Commitment capacity under 1-privacy: `min{H(p), H(q)}`.
pub fn capacity_one_private(pq: CrossoverPair) -> f64 {
    h(pq.p).min(h(pq.q))
}

/// Commitment capacity of I-BS-BC(p, q) under 2-privacy:
/// `H(p) + H(q) - H(p ⊛ q)`.
pub fn capacity_two_private(pq: CrossoverPair) -> f64 {
    let conv = pq.p * (1.0 - pq.q) + pq.q * (1.0 - pq.p);
    h(pq.p) + h(pq.q) - h(conv)
}

/// Converse bound under 1-privacy.
///
/// When Bob's channel is a degraded version of Eve's (`q <= p`) the bound is
/// `min{max H(X|Y), max H(X|Z)}`; otherwise `max H(X|Y)`. For BSCs the
/// maxima are attained at uniform input and both branches equal
/// `min{H(p), H(q)}`.
pub fn rate_bound_one_private(pq: CrossoverPair) -> f64 {
    match crate::channel::degradation_check(pq) {
        Some(_) => h(pq.p).min(h(pq.q)),
        None => h(pq.p),
    }
}

/// Result of maximising `H(X|Y,Z)` over the input bias.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBound {
    pub value: f64,
    /// Maximising `P_X(1)`.
    pub input_bias: f64,
}

const GRID_POINTS: usize = 1001;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Converse bound under 2-privacy: `max_{P_X} H(X|Y,Z)` evaluated on the
/// exact single-letter joint pmf.
///
/// The maximum is located on a uniform grid of 1001 biases and refined by
/// golden-section search within one grid cell of the best point.
pub fn rate_bound_two_private(channel: &WiretapChannel) -> RateBound {
    let objective = |px1: f64| -> f64 {
        let joint = channel.one_shot_joint(px1);
        conditional_entropy(&joint, &[0], &[1, 2]).expect("fixed coordinates are valid")
    };
    let step = 1.0 / (GRID_POINTS - 1) as f64;
    let (best_i, best_v) = (0..GRID_POINTS)
        .map(|i| (i, objective(i as f64 * step)))
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let best_x = best_i as f64 * step;

    let mut lo = (best_x - step).max(0.0);
    let mut hi = (best_x + step).min(1.0);
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let (mut fa, mut fb) = (objective(a), objective(b));
    for _ in 0..100 {
        if hi - lo < 1e-12 {
            break;
        }
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = objective(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = objective(a);
        }
    }
    let (gx, gv) = if fa >= fb { (a, fa) } else { (b, fb) };
    if gv > best_v {
        RateBound {
            value: gv,
            input_bias: gx,
        }
    } else {
        RateBound {
            value: best_v,
            input_bias: best_x,
        }
    }
}

fn check_disjoint(a: &[usize], b: &[usize]) -> Result<()> {
    if let Some(c) = a.iter().find(|c| b.contains(c)) {
        return Err(Error::Coordinate(format!(
            "coordinate {c} appears in more than one set"
        )));
    }
    Ok(())
}

fn joint_entropy(joint: &Pmf, coords: &[usize]) -> Result<f64> {
    if coords.is_empty() {
        return Ok(0.0);
    }
    Ok(joint.marginal(coords)?.entropy())
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().chain(b).copied().collect()
}

/// `H(target | given)`.
pub fn conditional_entropy(joint: &Pmf, target: &[usize], given: &[usize]) -> Result<f64> {
    check_disjoint(target, given)?;
    let both = union(target, given);
    let h = joint_entropy(joint, &both)? - joint_entropy(joint, given)?;
    Ok(h.max(0.0))
}

/// `H∞(X) = -log max_x P(x)`.
pub fn min_entropy(pmf: &Pmf) -> f64 {
    let max = pmf
        .outcomes
        .iter()
        .map(|(_, p)| *p)
        .fold(0.0f64, f64::max);
    -max.log2()
}

/// Worst-case conditional min-entropy `H∞(X|Y) = min_y H∞(X | Y = y)`,
/// taken over conditioning values with positive probability.
pub fn conditional_min_entropy(joint: &Pmf, target: &[usize], given: &[usize]) -> Result<f64> {
    check_disjoint(target, given)?;
    if given.is_empty() {
        return Ok(min_entropy(&joint.marginal(target)?));
    }
    let both = union(target, given);
    let pair = joint.marginal(&both)?;
    let split = target.len();
    let mut per_given: BTreeMap<&[u32], (f64, Vec<f64>)> = BTreeMap::new();
    for (label, p) in pair.outcomes() {
        let e = per_given.entry(&label[split..]).or_insert((0.0, Vec::new()));
        e.0 = e.0.max(*p);
        e.1.push(*p);
    }
    Ok(per_given
        .into_values()
        .map(|(max, ps)| -(max / accurate_sum(ps)).log2())
        .fold(f64::INFINITY, f64::min))
}

/// Total variation distance `½ Σ |a - b|`. Both pmfs must have the same
/// arity; labels missing from one side carry probability zero.
pub fn statistical_distance(a: &Pmf, b: &Pmf) -> Result<f64> {
    if a.arity != b.arity {
        return Err(Error::MismatchedSpace(format!(
            "arity {} vs {}",
            a.arity, b.arity
        )));
    }
    let mut diff: BTreeMap<&[u32], f64> = BTreeMap::new();
    for (l, p) in &a.outcomes {
        *diff.entry(l).or_default() += p;
    }
    for (l, p) in &b.outcomes {
        *diff.entry(l).or_default() -= p;
    }
    Ok((0.5 * accurate_sum(diff.into_values().map(f64::abs))).min(1.0))
}

/// `I(A; B)`.
pub fn mutual_information(joint: &Pmf, a: &[usize], b: &[usize]) -> Result<f64> {
    conditional_mutual_information(joint, a, b, &[])
}

/// `I(A; B | C) = H(A,C) + H(B,C) - H(A,B,C) - H(C)`.
pub fn conditional_mutual_information(
    joint: &Pmf,
    a: &[usize],
    b: &[usize],
    given: &[usize],
) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Coordinate("empty coordinate set".into()));
    }
    check_disjoint(a, b)?;
    check_disjoint(a, given)?;
    check_disjoint(b, given)?;
    let ac = union(a, given);
    let bc = union(b, given);
    let abc = union(&ac, b);
    let i = joint_entropy(joint, &ac)? + joint_entropy(joint, &bc)?
        - joint_entropy(joint, &abc)?
        - joint_entropy(joint, given)?;
    Ok(i.max(0.0))
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::channel::{make_channel, CouplingSpec};
    use proptest::prelude::*;

    // Reference values computed with mpmath at 50 digits (tests/data/gen_oracles.py).
    const H_0_1: f64 = 0.468_995_593_589_281_24;
    const H_0_11: f64 = 0.499_915_958_164_527_997;
    const H_0_2: f64 = 0.721_928_094_887_362_37;
    const C2_QUARTER: f64 = 0.668_122_245_993_300_76;
    const C2_0_1_0_2: f64 = 0.364_177_315_984_025_70;

    fn pair(p: f64, q: f64) -> CrossoverPair {
        CrossoverPair::new(p, q).unwrap()
    }

    #[test]
    fn binary_entropy_examples() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.11).unwrap() - H_0_11).abs() < 1e-15);
        assert!((binary_entropy(0.2).unwrap() - H_0_2).abs() < 1e-15);
        assert!(matches!(binary_entropy(1.5), Err(Error::Domain(_))));
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn binary_convolution_examples() {
        assert_eq!(binary_convolution(0.5, 0.3).unwrap(), 0.5);
        assert_eq!(binary_convolution(0.0, 0.37).unwrap(), 0.37);
        assert!((binary_convolution(0.1, 0.2).unwrap() - 0.26).abs() < 1e-15);
        assert!(binary_convolution(0.1, 1.2).is_err());
    }

    #[test]
    fn crossover_pair_rejects_boundary() {
        assert!(CrossoverPair::new(0.0, 0.2).is_err());
        assert!(CrossoverPair::new(0.1, 0.5).is_err());
        assert!(CrossoverPair::new(0.1, 0.49).is_ok());
    }

    #[test]
    fn capacity_examples() {
        assert!((capacity_one_private(pair(0.1, 0.2)) - H_0_1).abs() < 1e-15);
        assert!((capacity_one_private(pair(0.3, 0.1)) - H_0_1).abs() < 1e-15);
        assert_eq!(capacity_one_private(pair(0.2, 0.2)), h(0.2));
        assert!((capacity_two_private(pair(0.25, 0.25)) - C2_QUARTER).abs() < 1e-14);
        assert!((capacity_two_private(pair(0.1, 0.2)) - C2_0_1_0_2).abs() < 1e-14);
        let near_zero = capacity_two_private(pair(1e-6, 0.2));
        assert!(near_zero > 0.0 && near_zero < 1e-4);
    }

    #[test]
    fn rate_bound_one_private_branches() {
        assert!((rate_bound_one_private(pair(0.3, 0.1)) - H_0_1).abs() < 1e-15);
        assert!((rate_bound_one_private(pair(0.1, 0.3)) - H_0_1).abs() < 1e-15);
        assert_eq!(rate_bound_one_private(pair(0.2, 0.2)), h(0.2));
    }

    #[test]
    fn rate_bound_two_private_independent_matches_formula() {
        let ch = make_channel(0.1, 0.2, CouplingSpec::Independent).unwrap();
        let rb = rate_bound_two_private(&ch);
        assert!((rb.value - C2_0_1_0_2).abs() < 1e-10, "{rb:?}");
        assert!((rb.input_bias - 0.5).abs() < 1e-6);
    }

    #[test]
    fn rate_bound_two_private_degraded_is_h_p() {
        let q = binary_convolution(0.1, 0.25).unwrap();
        let ch = make_channel(0.1, q, CouplingSpec::Degraded).unwrap();
        let rb = rate_bound_two_private(&ch);
        assert!((rb.value - H_0_1).abs() < 1e-10, "{rb:?}");
    }

    #[test]
    fn degenerate_input_has_zero_equivocation() {
        let ch = make_channel(0.1, 0.2, CouplingSpec::Independent).unwrap();
        for px1 in [0.0, 1.0] {
            let joint = ch.one_shot_joint(px1);
            assert_eq!(conditional_entropy(&joint, &[0], &[1, 2]).unwrap(), 0.0);
        }
    }

    fn bsc_joint(p: f64) -> Pmf {
        Pmf::new(
            2,
            [
                (vec![0, 0], 0.5 * (1.0 - p)),
                (vec![0, 1], 0.5 * p),
                (vec![1, 0], 0.5 * p),
                (vec![1, 1], 0.5 * (1.0 - p)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn conditional_entropy_examples() {
        let indep = Pmf::new(
            2,
            [
                (vec![0, 0], 0.3 * 0.6),
                (vec![0, 1], 0.3 * 0.4),
                (vec![1, 0], 0.7 * 0.6),
                (vec![1, 1], 0.7 * 0.4),
            ],
        )
        .unwrap();
        let hx = indep.marginal(&[0]).unwrap().entropy();
        assert!((conditional_entropy(&indep, &[0], &[1]).unwrap() - hx).abs() < 1e-12);

        let copy = Pmf::new(2, [(vec![0, 0], 0.5), (vec![1, 1], 0.5)]).unwrap();
        assert_eq!(conditional_entropy(&copy, &[0], &[1]).unwrap(), 0.0);

        assert!((conditional_entropy(&bsc_joint(0.1), &[0], &[1]).unwrap() - H_0_1).abs() < 1e-12);

        assert!(matches!(
            conditional_entropy(&copy, &[0], &[0]),
            Err(Error::Coordinate(_))
        ));
        assert!(conditional_entropy(&copy, &[2], &[1]).is_err());
    }

    #[test]
    fn min_entropy_examples() {
        assert_eq!(min_entropy(&Pmf::uniform(8).unwrap()), 3.0);
        assert_eq!(min_entropy(&Pmf::point_mass(vec![3])), 0.0);
        assert_eq!(min_entropy(&Pmf::from_probs(&[0.5, 0.25, 0.25]).unwrap()), 1.0);
    }

    #[test]
    fn conditional_min_entropy_is_worst_case() {
        // X uniform; given Y=0, X is a point mass; given Y=1, X is uniform.
        let joint = Pmf::new(
            2,
            [
                (vec![0, 0], 0.5),
                (vec![0, 1], 0.25),
                (vec![1, 1], 0.25),
            ],
        )
        .unwrap();
        assert_eq!(conditional_min_entropy(&joint, &[0], &[1]).unwrap(), 0.0);
        assert_eq!(conditional_min_entropy(&joint, &[0], &[]).unwrap(), -(0.75f64).log2());
    }

    #[test]
    fn statistical_distance_examples() {
        let p = Pmf::from_probs(&[0.6, 0.4]).unwrap();
        let u = Pmf::from_probs(&[0.5, 0.5]).unwrap();
        assert_eq!(statistical_distance(&p, &p).unwrap(), 0.0);
        assert!((statistical_distance(&p, &u).unwrap() - 0.1).abs() < 1e-15);
        let a = Pmf::point_mass(vec![0]);
        let b = Pmf::point_mass(vec![1]);
        assert_eq!(statistical_distance(&a, &b).unwrap(), 1.0);
        assert!(matches!(
            statistical_distance(&a, &Pmf::point_mass(vec![0, 0])),
            Err(Error::MismatchedSpace(_))
        ));
    }

    #[test]
    fn mutual_information_examples() {
        let prod = Pmf::new(
            2,
            [
                (vec![0, 0], 0.2 * 0.5),
                (vec![0, 1], 0.2 * 0.5),
                (vec![1, 0], 0.8 * 0.5),
                (vec![1, 1], 0.8 * 0.5),
            ],
        )
        .unwrap();
        assert!(mutual_information(&prod, &[0], &[1]).unwrap() < 1e-12);
        let copy = Pmf::new(2, [(vec![0, 0], 0.5), (vec![1, 1], 0.5)]).unwrap();
        assert!((mutual_information(&copy, &[0], &[1]).unwrap() - 1.0).abs() < 1e-15);
        let mi = mutual_information(&bsc_joint(0.1), &[0], &[1]).unwrap();
        assert!((mi - (1.0 - H_0_1)).abs() < 1e-12);
    }

    #[test]
    fn pmf_validation() {
        assert!(Pmf::from_probs(&[0.5, 0.4]).is_err());
        assert!(Pmf::from_probs(&[1.2, -0.2]).is_err());
        // Within tolerance: renormalized.
        let p = Pmf::from_probs(&[0.5, 0.5 + 5e-13]).unwrap();
        assert!((p.prob(&[0]) + p.prob(&[1]) - 1.0).abs() < 1e-15);
        // Repeated labels merge.
        let m = Pmf::new(1, [(vec![0], 0.25), (vec![0], 0.25), (vec![1], 0.5)]).unwrap();
        assert_eq!(m.outcomes().len(), 2);
        assert_eq!(m.prob(&[0]), 0.5);
    }

    fn h_ref(p: f64) -> f64 {
        // Independent evaluation route through natural logs.
        if p == 0.0 || p == 1.0 {
            return 0.0;
        }
        -(p * p.ln() + (1.0 - p) * (-p).ln_1p()) / std::f64::consts::LN_2
    }

    fn random_joint(weights: &[f64], nx: u32) -> Pmf {
        let total: f64 = weights.iter().sum();
        Pmf::new(
            2,
            weights
                .iter()
                .enumerate()
                .map(|(i, w)| (vec![i as u32 % nx, i as u32 / nx], w / total)),
        )
        .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn entropy_symmetry_and_concavity(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            prop_assert!((h(a) - h(1.0 - a)).abs() < 1e-12);
            prop_assert!(h(0.5 * (a + b)) >= 0.5 * (h(a) + h(b)) - 1e-12);
            prop_assert!((h(a) - h_ref(a)).abs() < 1e-12);
        }

        #[test]
        fn convolution_algebra(a in 0.0f64..=1.0, b in 0.0f64..=1.0, c in 0.0f64..=1.0) {
            let conv = |x, y| binary_convolution(x, y).unwrap();
            prop_assert!((conv(a, b) - conv(b, a)).abs() < 1e-12);
            prop_assert!((conv(conv(a, b), c) - conv(a, conv(b, c))).abs() < 1e-12);
            prop_assert!((conv(a, 0.0) - a).abs() < 1e-12);
            prop_assert!((conv(a, 0.5) - 0.5).abs() < 1e-12);
        }

        #[test]
        fn two_private_below_one_private(p in 1e-4f64..0.4999, q in 1e-4f64..0.4999) {
            let pq = pair(p, q);
            let (c1, c2) = (capacity_one_private(pq), capacity_two_private(pq));
            prop_assert!(c2 <= c1 + 1e-15);
            if (p - q).abs() > 1e-3 {
                prop_assert!(c2 < c1);
            }
            prop_assert!(c2 > 0.0);
        }

        #[test]
        fn mutual_information_chain(w in proptest::collection::vec(0.01f64..1.0, 12)) {
            let joint = random_joint(&w, 3);
            let hx = joint.marginal(&[0]).unwrap().entropy();
            let mi = mutual_information(&joint, &[0], &[1]).unwrap();
            let ce = conditional_entropy(&joint, &[0], &[1]).unwrap();
            prop_assert!((mi - (hx - ce)).abs() < 1e-10);
        }

        #[test]
        fn conditioning_never_raises_min_entropy(w in proptest::collection::vec(0.0f64..1.0, 12)) {
            prop_assume!(w.iter().sum::<f64>() > 1e-3);
            let joint = random_joint(&w, 4);
            let cond = conditional_min_entropy(&joint, &[0], &[1]).unwrap();
            let marg = min_entropy(&joint.marginal(&[0]).unwrap());
            prop_assert!(cond <= marg + 1e-12);
        }
    }

    #[test]
    fn rate_bound_two_private_grid() {
        for i in 0..20 {
            for j in 0..20 {
                let p = 0.05 + i as f64 * 0.4 / 19.0;
                let q = 0.05 + j as f64 * 0.4 / 19.0;
                let ch = make_channel(p, q, CouplingSpec::Independent).unwrap();
                let rb = rate_bound_two_private(&ch);
                let c2 = capacity_two_private(pair(p, q));
                assert!((rb.value - c2).abs() < 1e-10, "p={p} q={q} {rb:?} vs {c2}");
            }
        }
    }
}
