use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Serialize, Serializer};
use wignerlab::DEFAULT_TOLERANCE;

#[derive(Parser, Debug)]
#[command(name = "wignerlab", version, about = "Time-dependent Bell inequalities in Wigner form")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Averaged violation K(delta) versus time resolution, plus its first root.
    SpinCurve(SpinCurveArgs),
    /// Maximize the spin-in-field violation over a parameter family.
    SpinMax(SpinMaxArgs),
    /// Static meson inequality in both flavour orientations.
    MesonStatic(MesonStaticArgs),
    /// Time-dependent meson inequality at one time or over a time range.
    MesonDynamic(MesonDynamicArgs),
    /// Finite-time decay-rate bracket and rate versus M*tau.
    QftCurve(QftCurveArgs),
    /// Ratio inequality: violated share of the angle cube, or single points.
    QftRegion(QftRegionArgs),
    /// Randomized and exhaustive local-hidden-variable soundness check.
    LhvFuzz(LhvFuzzArgs),
    /// Grid scan or maximization of any scenario target.
    Scan(ScanArgs),
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::SpinCurve(a) => &a.common,
            Command::SpinMax(a) => &a.common,
            Command::MesonStatic(a) => &a.common,
            Command::MesonDynamic(a) => &a.common,
            Command::QftCurve(a) => &a.common,
            Command::QftRegion(a) => &a.common,
            Command::LhvFuzz(a) => &a.common,
            Command::Scan(a) => &a.common,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Violation tolerance on lhs - rhs.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    /// Flat JSON file of option values; explicit flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Read angle and phase inputs in degrees.
    #[arg(long)]
    pub degrees: bool,
}

impl Common {
    pub fn angle(&self, value: f64) -> f64 {
        if self.degrees {
            value.to_radians()
        } else {
            value
        }
    }
}

/// `lo:hi:steps` with `lo < hi` and at least two steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Span {
    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.steps - 1) as f64
        }
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.steps).map(|i| self.value(i))
    }

    pub fn scaled(self, f: impl Fn(f64) -> f64) -> Span {
        Span {
            lo: f(self.lo),
            hi: f(self.hi),
            ..self
        }
    }
}

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, steps] = parts.as_slice() else {
            return Err(format!("expected lo:hi:steps, got {s:?}"));
        };
        let lo: f64 = lo.trim().parse().map_err(|e| format!("bad lower bound {lo:?}: {e}"))?;
        let hi: f64 = hi.trim().parse().map_err(|e| format!("bad upper bound {hi:?}: {e}"))?;
        let steps: usize = steps.trim().parse().map_err(|e| format!("bad step count {steps:?}: {e}"))?;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(format!("range needs finite lo < hi, got {lo}:{hi}"));
        }
        if steps < 2 {
            return Err(format!("range needs at least 2 steps, got {steps}"));
        }
        Ok(Span { lo, hi, steps })
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.steps)
    }
}

impl Serialize for Span {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `re,im`
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexArg {
    pub re: f64,
    pub im: f64,
}

impl FromStr for ComplexArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (re, im) = s.split_once(',').ok_or_else(|| format!("expected re,im, got {s:?}"))?;
        Ok(ComplexArg {
            re: re.trim().parse().map_err(|e| format!("bad real part {re:?}: {e}"))?,
            im: im.trim().parse().map_err(|e| format!("bad imaginary part {im:?}: {e}"))?,
        })
    }
}

/// `name=lo:hi:steps`
#[derive(Debug, Clone, PartialEq)]
pub struct AxisSpec {
    pub name: String,
    pub span: Span,
}

impl FromStr for AxisSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (name, span) = s.split_once('=').ok_or_else(|| format!("expected name=lo:hi:steps, got {s:?}"))?;
        Ok(AxisSpec {
            name: name.trim().to_string(),
            span: span.parse()?,
        })
    }
}

impl Serialize for AxisSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&format_args!("{}={}", self.name, self.span))
    }
}

/// `name=value`
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub name: String,
    pub value: f64,
}

impl FromStr for Assignment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (name, value) = s.split_once('=').ok_or_else(|| format!("expected name=value, got {s:?}"))?;
        Ok(Assignment {
            name: name.trim().to_string(),
            value: value.trim().parse().map_err(|e| format!("bad value {value:?}: {e}"))?,
        })
    }
}

impl Serialize for Assignment {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&format_args!("{}={}", self.name, self.value))
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SpinCurveArgs {
    /// Resolution parameter delta as lo:hi:steps.
    #[arg(long, default_value = "0:2:401")]
    pub range: Span,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinFamily {
    /// theta_ca = theta_bc = theta, theta_ba = 2 theta, omega_t = theta/2
    Constrained,
    /// theta_ca = theta_bc = theta, theta_ba = 2 theta, omega_t = 0
    Static,
    /// all four parameters free
    Unconstrained,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SpinMaxArgs {
    #[arg(long, value_enum, default_value_t = SpinFamily::Constrained)]
    pub family: SpinFamily,
    /// Coarse grid points per axis.
    #[arg(long, default_value_t = 40)]
    pub steps: usize,
    /// Maximum coordinate-descent sweeps.
    #[arg(long, default_value_t = 50)]
    pub refine: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MesonStaticArgs {
    /// Mixing coefficient p as re,im.
    #[arg(long, default_value = "0.7071067811865476,0", allow_hyphen_values = true)]
    pub p: ComplexArg,
    /// Mixing coefficient q as re,im.
    #[arg(long, default_value = "0.7071067811865476,0", allow_hyphen_values = true)]
    pub q: ComplexArg,
    /// Unphysical CP phase.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MesonDynamicArgs {
    /// Mean width.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Width difference Gamma_H - Gamma_L.
    #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
    pub dgamma: f64,
    /// Mass difference m_H - m_L.
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub dm: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Single evaluation time.
    #[arg(long, conflicts_with = "t_range")]
    pub t: Option<f64>,
    /// Times as lo:hi:steps.
    #[arg(long)]
    pub t_range: Option<Span>,
    /// Accepted |q/p - e^(i alpha)|.
    #[arg(long, default_value_t = wignerlab::meson::DEFAULT_Q_OVER_P_TOLERANCE)]
    pub qp_tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct QftCurveArgs {
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub width: f64,
    /// Analyzer angle theta_ab.
    #[arg(long, default_value_t = std::f64::consts::PI, allow_hyphen_values = true)]
    pub theta: f64,
    /// M*tau as lo:hi:steps.
    #[arg(long, default_value = "0.1:100:1000")]
    pub range: Span,
    /// Space the M*tau points logarithmically.
    #[arg(long)]
    pub log: bool,
    /// Perturbativity bound on rate/M.
    #[arg(long, default_value_t = wignerlab::qft::DEFAULT_PERTURBATIVE_BOUND)]
    pub bound: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct QftRegionArgs {
    /// Ratios t/t0, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
    pub ratio: Vec<f64>,
    /// Monte Carlo samples per ratio.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    /// Evaluate the inequality at theta_ba,theta_ca,theta_bc instead of sampling.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub angles: Option<Vec<f64>>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct LhvFuzzArgs {
    /// Random trials.
    #[arg(long, default_value_t = 100_000)]
    pub n: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanTarget {
    /// theta_ba, theta_ca, theta_bc, omega_t
    Spin,
    /// theta_ba, theta_ca, theta_bc, common_time, delta
    SpinAveraged,
    /// t, gamma, dgamma, dm, alpha
    Meson,
    /// ratio, theta_ba, theta_ca, theta_bc
    QftRatio,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    pub target: ScanTarget,
    /// Scanned parameter as name=lo:hi:steps (repeatable, up to 4).
    #[arg(long, allow_hyphen_values = true)]
    pub axis: Vec<AxisSpec>,
    /// Fixed parameter as name=value (repeatable).
    #[arg(long, allow_hyphen_values = true)]
    pub set: Vec<Assignment>,
    /// Report the refined maximum instead of every lattice point.
    #[arg(long)]
    pub maximize: bool,
    #[arg(long, default_value_t = 20)]
    pub refine: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}
