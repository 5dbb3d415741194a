//! Dispatch from validated plans to the core estimators.

use wiretap_commit::adversary::{
    binding_attack, concealment_monte_carlo, estimate_soundness, view_leakage_exact, SecurityReport,
};
use wiretap_commit::channel::{degradation_check, make_channel, CouplingSpec};
use wiretap_commit::measures::{
    binary_entropy, capacity_one_private, capacity_two_private, rate_bound_one_private,
    rate_bound_two_private, CrossoverPair,
};

use crate::config::{ExperimentConfig, GridSpec, Job, Method, Plan, SweepVariable, CONFIG_VERSION};
use crate::error::Result;
use crate::table::{Cell, ColumnType, ResultTable};

use ColumnType::{Bool, Float, Int, Text};

const REPORT_COLUMNS: [(&str, ColumnType); 12] = [
    ("metric", Text),
    ("estimate", Float),
    ("ci_lo", Float),
    ("ci_hi", Float),
    ("exact", Bool),
    ("trials", Int),
    ("reference_bound", Float),
    ("n", Int),
    ("p", Float),
    ("q", Float),
    ("coupling", Text),
    ("seed", Int),
];

fn axis(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    (0..steps)
        .map(|i| lo + i as f64 * ((hi - lo) / (steps - 1) as f64))
        .collect()
}

/// Capacities and converse bounds on a `steps × steps` grid, rows ordered
/// by `p` then `q`. The 2-privacy bound is evaluated on independent noise.
pub fn run_capacity_grid(grid: &GridSpec) -> Result<ResultTable> {
    let mut t = ResultTable::new(&[
        ("p", Float),
        ("q", Float),
        ("h_p", Float),
        ("h_q", Float),
        ("c1", Float),
        ("c2", Float),
        ("rate_bound_1", Float),
        ("rate_bound_2", Float),
        ("rate_bound_2_bias", Float),
        ("degraded", Bool),
        ("theta", Float),
    ]);
    for p in axis(grid.p_min, grid.p_max, grid.steps) {
        for q in axis(grid.q_min, grid.q_max, grid.steps) {
            let pq = CrossoverPair::new(p, q)?;
            let bound2 = rate_bound_two_private(&make_channel(p, q, CouplingSpec::Independent)?);
            let theta = degradation_check(pq);
            t.push(vec![
                Cell::float(p),
                Cell::float(q),
                Cell::float(binary_entropy(p)?),
                Cell::float(binary_entropy(q)?),
                Cell::float(capacity_one_private(pq)),
                Cell::float(capacity_two_private(pq)),
                Cell::float(rate_bound_one_private(pq)),
                Cell::float(bound2.value),
                Cell::float(bound2.input_bias),
                Cell::Bool(theta.is_some()),
                Cell::opt_float(theta),
            ]);
        }
    }
    Ok(t)
}

fn sweep_column(var: SweepVariable) -> &'static str {
    match var {
        SweepVariable::N => "sweep_n",
        SweepVariable::Alpha1 => "sweep_alpha1",
        SweepVariable::Beta1 => "sweep_beta1",
        SweepVariable::Beta2 => "sweep_beta2",
        SweepVariable::P => "sweep_p",
        SweepVariable::Q => "sweep_q",
        SweepVariable::R => "sweep_r",
        SweepVariable::CommitBits => "sweep_commit_bits",
        SweepVariable::ChallengeBits => "sweep_challenge_bits",
    }
}

fn report_row(r: &SecurityReport) -> Vec<Cell> {
    vec![
        Cell::text(&r.metric),
        Cell::float(r.estimate),
        Cell::opt_float(r.ci_lo),
        Cell::opt_float(r.ci_hi),
        Cell::Bool(r.exact),
        Cell::Int(r.trials),
        Cell::float(r.reference_bound),
        Cell::Int(r.n as u64),
        Cell::float(r.p),
        Cell::float(r.q),
        Cell::text(&r.coupling),
        Cell::Int(r.seed),
    ]
}

/// Derived row sharing a report's context.
fn aux(base: &SecurityReport, metric: &str, estimate: f64, reference: f64) -> SecurityReport {
    SecurityReport {
        metric: metric.to_string(),
        estimate,
        ci_lo: None,
        ci_hi: None,
        reference_bound: reference,
        ..base.clone()
    }
}

fn run_job(job: &Job, seed: u64) -> Result<Vec<SecurityReport>> {
    Ok(match job {
        Job::CapacityGrid(_) => unreachable!("capacity grids have their own table"),
        Job::Soundness { params, trials } => {
            vec![estimate_soundness(params, &params.channel(), *trials, seed)?]
        }
        Job::Binding {
            params,
            mode,
            trials,
        } => {
            let run = binding_attack(params, &params.channel(), *mode, *trials, seed)?;
            let n = params.n() as f64;
            let threshold = params.challenge_bits() as f64 / (2.0 * n);
            vec![
                aux(&run.report, "eta_hat", run.eta_hat, threshold),
                aux(&run.report, "binding_ceiling", run.mean_ceiling, f64::NAN),
                run.report,
            ]
        }
        Job::Leakage {
            params,
            view,
            method: Method::Exact,
            ..
        } => {
            let l = view_leakage_exact(params, &params.channel(), *view)?;
            let mut sd = l.sd_report(params);
            sd.seed = seed;
            let mut mi = l.mi_report(params);
            mi.seed = seed;
            let k = aux(&sd, &format!("k_hat_{}", view.name()), l.k_hat, f64::NAN);
            vec![sd, mi, k]
        }
        Job::Leakage {
            params,
            view,
            method: Method::MonteCarlo,
            trials,
            ideal_pad,
        } => {
            let mc = concealment_monte_carlo(params, &params.channel(), *view, *trials, seed, *ideal_pad)?;
            let metric = format!("mi_estimate_{}", view.name());
            let mi = aux(&mc.report, &metric, mc.mi_estimate, f64::NAN);
            vec![mc.report, mi]
        }
    })
}

/// Runs a validated plan. Output depends only on the plan, never on the
/// worker count.
pub fn run_plan(plan: &Plan) -> Result<ResultTable> {
    let mut table = match (&plan.jobs[..], plan.sweep) {
        ([(_, Job::CapacityGrid(grid))], _) => run_capacity_grid(grid)?,
        (jobs, sweep) => {
            let mut columns = Vec::new();
            if let Some(var) = sweep {
                columns.push((sweep_column(var), if var.is_integer() { Int } else { Float }));
            }
            columns.extend(REPORT_COLUMNS);
            let mut t = ResultTable::new(&columns);
            for (value, job) in jobs {
                for r in run_job(job, plan.seed)? {
                    let mut row = Vec::new();
                    if let (Some(var), Some(v)) = (sweep, value) {
                        row.push(if var.is_integer() {
                            Cell::Int(*v as u64)
                        } else {
                            Cell::float(*v)
                        });
                    }
                    row.extend(report_row(&r));
                    t.push(row);
                }
            }
            if let Some(var) = sweep {
                t.sort_by_column(sweep_column(var));
            }
            t
        }
    };
    table.metadata.insert("version".into(), CONFIG_VERSION.to_string());
    table.metadata.insert("kind".into(), plan.kind.name().into());
    table.metadata.insert("seed".into(), plan.seed.to_string());
    table
        .metadata
        .insert("generator".into(), format!("wtc {}", env!("CARGO_PKG_VERSION")));
    Ok(table)
}

/// Validates `config` completely, then runs it.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultTable> {
    run_plan(&config.plan()?)
}
