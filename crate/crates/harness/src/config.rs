//! Versioned JSON experiment configuration.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use wiretap_commit::adversary::{exact_preconditions, BindingMode, View, MAX_EXHAUSTIVE_N};
use wiretap_commit::channel::ChannelConfig;
use wiretap_commit::protocol::{ParamsSpec, Privacy, ProtocolParams};

use crate::error::{HarnessError, Result};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    CapacityGrid,
    Soundness,
    Binding,
    Concealment,
    Secrecy,
    Sweep,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::CapacityGrid => "capacity-grid",
            ExperimentKind::Soundness => "soundness",
            ExperimentKind::Binding => "binding",
            ExperimentKind::Concealment => "concealment",
            ExperimentKind::Secrecy => "secrecy",
            ExperimentKind::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    Exact,
    MonteCarlo,
}

/// `steps` evenly spaced points per axis, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub p_min: f64,
    pub p_max: f64,
    pub q_min: f64,
    pub q_max: f64,
    pub steps: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            p_min: 0.05,
            p_max: 0.45,
            q_min: 0.05,
            q_max: 0.45,
            steps: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    N,
    Alpha1,
    Beta1,
    Beta2,
    P,
    Q,
    R,
    CommitBits,
    ChallengeBits,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::N => "n",
            SweepVariable::Alpha1 => "alpha1",
            SweepVariable::Beta1 => "beta1",
            SweepVariable::Beta2 => "beta2",
            SweepVariable::P => "p",
            SweepVariable::Q => "q",
            SweepVariable::R => "r",
            SweepVariable::CommitBits => "commit_bits",
            SweepVariable::ChallengeBits => "challenge_bits",
        }
    }

    pub fn is_integer(self) -> bool {
        matches!(self, SweepVariable::N | SweepVariable::CommitBits | SweepVariable::ChallengeBits)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Experiment run at every point: soundness, binding, concealment or secrecy.
    pub experiment: ExperimentKind,
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub kind: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
    /// Binding: `alone` (default) or `with_eve`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<BindingMode>,
    /// Concealment and secrecy: `exact` (default) or `monte-carlo`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    /// Concealment view; defaults to `bob` under 1-privacy and `bob_eve` under 2-privacy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub view: Option<View>,
    /// Monte Carlo only: replace the extracted pad by a fresh uniform bit.
    #[serde(default)]
    pub ideal_pad: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

/// One fully validated unit of work.
#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    CapacityGrid(GridSpec),
    Soundness {
        params: ProtocolParams,
        trials: u64,
    },
    Binding {
        params: ProtocolParams,
        mode: BindingMode,
        trials: u64,
    },
    Leakage {
        params: ProtocolParams,
        view: View,
        method: Method,
        trials: u64,
        ideal_pad: bool,
    },
}

/// A validated experiment: jobs paired with the sweep value they belong to.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub sweep: Option<SweepVariable>,
    pub jobs: Vec<(Option<f64>, Job)>,
}

fn invalid(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

impl ExperimentConfig {
    /// Parses JSON; syntax and schema errors carry the line and column.
    pub fn from_json(text: &str, source_name: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| HarnessError::parse(source_name, &e))
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text, &path.display().to_string())
    }

    fn spec_and_channel(&self) -> Result<(ParamsSpec, ChannelConfig)> {
        let spec = self
            .params
            .ok_or_else(|| invalid(format!("{} needs a params block", self.kind.name())))?;
        let channel = self
            .channel
            .ok_or_else(|| invalid(format!("{} needs a channel block", self.kind.name())))?;
        Ok((spec, channel))
    }

    fn trials(&self) -> Result<u64> {
        match self.trials {
            Some(0) => Err(invalid("trials must be at least 1")),
            Some(t) => Ok(t),
            None => Err(invalid(format!("{} needs trials", self.kind.name()))),
        }
    }

    fn reject_unused(&self, kind: ExperimentKind) -> Result<()> {
        let unused = |name: &str, present: bool| -> Result<()> {
            if present {
                Err(invalid(format!("field '{name}' is not used by {}", kind.name())))
            } else {
                Ok(())
            }
        };
        unused("mode", self.mode.is_some() && kind != ExperimentKind::Binding)?;
        let leakage = matches!(kind, ExperimentKind::Concealment | ExperimentKind::Secrecy);
        unused("method", self.method.is_some() && !leakage)?;
        unused("view", self.view.is_some() && kind != ExperimentKind::Concealment)?;
        unused("ideal_pad", self.ideal_pad && !leakage)?;
        unused("grid", self.grid.is_some() && kind != ExperimentKind::CapacityGrid)?;
        if self.kind != ExperimentKind::Sweep {
            unused("sweep", self.sweep.is_some())?;
        }
        Ok(())
    }

    fn job(&self, kind: ExperimentKind, spec: ParamsSpec, channel: ChannelConfig) -> Result<Job> {
        let params = spec.derive(&channel)?;
        match kind {
            ExperimentKind::Soundness => Ok(Job::Soundness {
                params,
                trials: self.trials()?,
            }),
            ExperimentKind::Binding => {
                if params.n() > MAX_EXHAUSTIVE_N {
                    return Err(wiretap_commit::Error::Scale(format!(
                        "binding needs n <= {MAX_EXHAUSTIVE_N}, got {}",
                        params.n()
                    ))
                    .into());
                }
                Ok(Job::Binding {
                    params,
                    mode: self.mode.unwrap_or(BindingMode::Alone),
                    trials: self.trials()?,
                })
            }
            ExperimentKind::Concealment | ExperimentKind::Secrecy => {
                let view = if kind == ExperimentKind::Secrecy {
                    View::Eve
                } else {
                    self.view.unwrap_or(match params.privacy() {
                        Privacy::One => View::Bob,
                        Privacy::Two => View::BobEve,
                    })
                };
                let method = self.method.unwrap_or_default();
                let trials = match method {
                    Method::Exact => {
                        if self.ideal_pad {
                            return Err(invalid("ideal_pad applies to the monte-carlo method only"));
                        }
                        if self.trials.is_some() {
                            return Err(invalid("trials is not used by the exact method"));
                        }
                        exact_preconditions(&params, view)?;
                        0
                    }
                    Method::MonteCarlo => {
                        if params.commit_bits() != 1 {
                            return Err(wiretap_commit::Error::Unsupported(format!(
                                "the distinguisher needs commit_bits = 1, got {}",
                                params.commit_bits()
                            ))
                            .into());
                        }
                        self.trials()?
                    }
                };
                Ok(Job::Leakage {
                    params,
                    view,
                    method,
                    trials,
                    ideal_pad: self.ideal_pad,
                })
            }
            ExperimentKind::CapacityGrid | ExperimentKind::Sweep => {
                Err(invalid(format!("{} cannot be a sweep experiment", kind.name())))
            }
        }
    }

    /// Checks everything the run will need and returns the job list. No
    /// simulation work happens here.
    pub fn plan(&self) -> Result<Plan> {
        if self.version != CONFIG_VERSION {
            return Err(invalid(format!(
                "unsupported version {}, expected {CONFIG_VERSION}",
                self.version
            )));
        }
        let mut plan = Plan {
            kind: self.kind,
            seed: self.seed,
            sweep: None,
            jobs: Vec::new(),
        };
        match self.kind {
            ExperimentKind::CapacityGrid => {
                self.reject_unused(self.kind)?;
                if self.params.is_some() || self.channel.is_some() || self.trials.is_some() {
                    return Err(invalid("capacity-grid takes only a grid block"));
                }
                let grid = self.grid.unwrap_or_default();
                validate_grid(&grid)?;
                plan.jobs.push((None, Job::CapacityGrid(grid)));
            }
            ExperimentKind::Sweep => {
                let sweep = self.sweep.as_ref().ok_or_else(|| invalid("sweep needs a sweep block"))?;
                self.reject_unused(sweep.experiment)?;
                if sweep.values.is_empty() {
                    return Err(invalid("sweep values are empty"));
                }
                let (spec, channel) = self.spec_and_channel()?;
                plan.sweep = Some(sweep.variable);
                for &v in &sweep.values {
                    let (spec, channel) = apply(sweep.variable, v, spec, channel)?;
                    let job = self
                        .job(sweep.experiment, spec, channel)
                        .map_err(|e| invalid(format!("{} = {v}: {e}", sweep.variable.name())))?;
                    plan.jobs.push((Some(v), job));
                }
            }
            kind => {
                self.reject_unused(kind)?;
                let (spec, channel) = self.spec_and_channel()?;
                plan.jobs.push((None, self.job(kind, spec, channel)?));
            }
        }
        Ok(plan)
    }
}

fn validate_grid(g: &GridSpec) -> Result<()> {
    for (name, lo, hi) in [("p", g.p_min, g.p_max), ("q", g.q_min, g.q_max)] {
        if !(lo > 0.0 && hi < 0.5 && lo <= hi) {
            return Err(invalid(format!(
                "{name} range [{lo}, {hi}] must satisfy 0 < min <= max < 1/2"
            )));
        }
    }
    if g.steps == 0 {
        return Err(invalid("grid steps must be at least 1"));
    }
    Ok(())
}

fn apply(
    var: SweepVariable,
    v: f64,
    mut spec: ParamsSpec,
    mut channel: ChannelConfig,
) -> Result<(ParamsSpec, ChannelConfig)> {
    let int = || -> Result<usize> {
        if v.is_finite() && v >= 1.0 && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            Err(invalid(format!("{} must be a positive integer, got {v}", var.name())))
        }
    };
    match var {
        SweepVariable::N => spec.n = int()?,
        SweepVariable::CommitBits => spec.commit_bits = Some(int()?),
        SweepVariable::ChallengeBits => spec.challenge_bits = Some(int()?),
        SweepVariable::Alpha1 => spec.alpha1 = v,
        SweepVariable::Beta1 => spec.beta1 = v,
        SweepVariable::Beta2 => spec.beta2 = v,
        SweepVariable::P => channel.p = v,
        SweepVariable::Q => channel.q = v,
        SweepVariable::R => channel.r = Some(v),
    }
    Ok((spec, channel))
}
