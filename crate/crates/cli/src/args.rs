use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::sweep::{Point, Range};

const CONFIG_HELP: &str = "JSON file supplying any flag of this subcommand; keys are flag names with '_' for '-'; flags on the command line override it";

#[derive(Parser, Debug)]
#[command(
    name = "gravwit",
    version,
    about = "Witness of graviton-oscillator entanglement: evaluation, sweeps, state dumps and falsification",
    args_override_self = true,
    after_help = "Exit codes: 0 ok, 2 usage, 3 numerical (cutoff or leakage), 4 falsification failure."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate the witness at one parameter point and print one CSV row.
    #[command(after_long_help = WITNESS_COLUMNS)]
    Witness(WitnessArgs),
    /// Evaluate the witness over a parameter grid.
    #[command(after_long_help = SWEEP_COLUMNS)]
    Sweep(SweepArgs),
    /// Dump the evolved state amplitudes.
    #[command(after_long_help = EVOLVE_COLUMNS)]
    Evolve(EvolveArgs),
    /// Check the witness bounds on random biseparable states.
    #[command(after_long_help = FALSIFY_COLUMNS)]
    Falsify(FalsifyArgs),
    /// Run the built-in consistency checks.
    Selftest(SelftestArgs),
}

pub const WITNESS_COLUMNS: &str = "\
CSV columns (header row always printed):
  mode       evaluation mode
  omega_k    graviton mode angular frequency, rad/s (empty on the dimensionless path)
  omega_m    oscillator angular frequency, rad/s (empty on the dimensionless path)
  t          evolution time, s (empty on the dimensionless path)
  mu         oscillator mass, kg (empty on the dimensionless path)
  delta_zpf  zero-point length sqrt(hbar/(2 mu omega_m)), m (empty on the dimensionless path)
  e1, e2     polarization components (empty on the dimensionless path)
  eps1, eps2 dimensionless couplings C'_i t/hbar
  lhs_abs    |<(1+g1)(1+g2)b^2>|
  o1, o2, o3 product bounds for the g1|g2m, g2|g1m and m|g1g2 splits
  g1, g2     G1 = lhs_abs - (o1+o2+o3) and G2 = lhs_abs - max(o1,o2,o3)
  insep_g1, insep_g2, insep_m
             lhs_abs - o_i for the three splits
  witness    G2; equals Omega*t in analytic mode";

pub const SWEEP_COLUMNS: &str = "\
CSV columns (header row always printed, rows in grid order):
  fig1 and custom plans: omega_k,omega_m,t,e1,e2,witness
  fig2 plan:             mu,delta_zpf,omega_m,omega_k,t,witness
  omega_k, omega_m  angular frequencies, rad/s
  t                 evolution time, s
  e1, e2            polarization components
  mu                oscillator mass, kg
  delta_zpf         zero-point length, m; omega_m = hbar/(2 mu delta_zpf^2)
  witness           G2 in the chosen mode
fig1 rows run over omega_k (outer) then omega_m (inner) on linear grids.
fig2 rows run over mu (outer) then delta_zpf (inner) on a logarithmic grid.
custom rows follow the order of --points.";

pub const EVOLVE_COLUMNS: &str = "\
CSV columns (header row always printed):
  index             row-major basis index n_g1*c2*c3 + n_g2*c3 + n_m
  n_g1, n_g2, n_m   occupations
  re, im            amplitude
Only nonzero amplitudes are listed unless --include-zeros is given.
Top-level populations of each mode are written to standard error.";

pub const FALSIFY_COLUMNS: &str = "\
The report goes to standard output. With --out, a CSV summary is also written:
  seed, n_products, n_ensembles          run inputs
  max_insep_g1, max_insep_g2, max_insep_m
                                         largest I on product states of each split
  max_g2_pure_g1, max_g2_pure_g2, max_g2_pure_m
                                         largest G2 on those pure states
  max_g1_ensemble                        largest G1 on biseparable mixtures
  max_g2_ensemble                        largest G2 on mixtures (recorded, not checked)
  violations                             number of values above 1e-10";

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessMode {
    Analytic,
    FirstOrder,
    Exact,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvolveMode {
    Exact,
    FirstOrder,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    /// angular frequency, rad/s
    Rad,
    /// ordinary frequency, converted with 2*pi
    Hz,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanKind {
    Fig1,
    Fig2,
    Custom,
}

pub fn parse_cutoffs(s: &str) -> Result<[usize; 3], String> {
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    v.try_into()
        .map_err(|_| format!("expected three cutoffs A,B,C, got {s:?}"))
}

pub fn parse_vector(s: &str) -> Result<[f64; 3], String> {
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    v.try_into()
        .map_err(|_| format!("expected three components X,Y,Z, got {s:?}"))
}

#[derive(Args, Debug, Clone)]
pub struct Polarization {
    /// Polarization component e1 (default 1/sqrt 2)
    #[arg(long, allow_hyphen_values = true)]
    pub e1: Option<f64>,
    /// Polarization component e2 (default 1/sqrt 2)
    #[arg(long, allow_hyphen_values = true)]
    pub e2: Option<f64>,
}

impl Polarization {
    pub fn values(&self) -> (f64, f64) {
        let d = std::f64::consts::FRAC_1_SQRT_2;
        (self.e1.unwrap_or(d), self.e2.unwrap_or(d))
    }
}

#[derive(Args, Debug, Clone)]
pub struct WitnessArgs {
    #[arg(long, help = CONFIG_HELP)]
    pub config: Option<PathBuf>,
    /// Graviton mode frequency
    #[arg(long, default_value_t = 10.0)]
    pub omega_k: f64,
    /// Oscillator frequency (default 2*pi rad/s)
    #[arg(long, conflicts_with = "delta_zpf")]
    pub omega_m: Option<f64>,
    /// Unit of --omega-k and --omega-m
    #[arg(long, value_enum, default_value_t = Units::Rad)]
    pub units: Units,
    /// Evolution time, s
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Oscillator mass, kg
    #[arg(long, default_value_t = 1e-16)]
    pub mu: f64,
    /// Zero-point length, m; sets the oscillator frequency from --mu
    #[arg(long)]
    pub delta_zpf: Option<f64>,
    #[command(flatten)]
    pub polarization: Polarization,
    /// Propagation direction X,Y,Z (unit vector)
    #[arg(long, value_parser = parse_vector, default_value = "0,0,1", allow_hyphen_values = true)]
    pub direction: [f64; 3],
    #[arg(long, value_enum, default_value_t = WitnessMode::Analytic)]
    pub mode: WitnessMode,
    /// Dimensionless coupling for g1; replaces the physical parameters
    #[arg(long, requires = "eps2", allow_hyphen_values = true)]
    pub eps1: Option<f64>,
    /// Dimensionless coupling for g2; replaces the physical parameters
    #[arg(long, requires = "eps1", allow_hyphen_values = true)]
    pub eps2: Option<f64>,
    /// Fock cutoffs for g1, g2, m (exact and first-order modes)
    #[arg(long, value_parser = parse_cutoffs, default_value = "4,4,8")]
    pub cutoffs: [usize; 3],
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[arg(long, help = CONFIG_HELP)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = PlanKind::Fig1)]
    pub plan: PlanKind,
    /// Output file (standard output when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (all cores when absent)
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
    #[arg(long, value_enum, default_value_t = WitnessMode::Analytic)]
    pub mode: WitnessMode,
    /// fig1: omega_k grid MIN,MAX,N in rad/s
    #[arg(long, default_value = "1,10,50")]
    pub omega_k_range: Range,
    /// fig1: omega_m grid MIN,MAX,N in rad/s
    #[arg(long, default_value = "1,10,50")]
    pub omega_m_range: Range,
    /// fig2: fixed graviton mode frequency, rad/s
    #[arg(long, default_value_t = 10.0)]
    pub omega_k: f64,
    /// fig2: masses in kg (placeholder defaults)
    #[arg(long, value_delimiter = ',', default_value = "1e-17,1e-16,1e-15")]
    pub mus: Vec<f64>,
    /// fig2: zero-point length grid MIN,MAX,N in m
    #[arg(long, default_value = "1e-11,1e-10,11")]
    pub delta_zpf_range: Range,
    /// fig1, custom: oscillator mass in kg
    #[arg(long, default_value_t = 1e-16)]
    pub mu: f64,
    /// fig1, fig2: evolution time, s
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[command(flatten)]
    pub polarization: Polarization,
    /// custom: points OMEGA_K:OMEGA_M:T separated by commas
    #[arg(long, value_delimiter = ',')]
    pub points: Vec<Point>,
    /// Fock cutoffs for exact mode
    #[arg(long, value_parser = parse_cutoffs, default_value = "4,4,8")]
    pub cutoffs: [usize; 3],
}

#[derive(Args, Debug, Clone)]
pub struct EvolveArgs {
    #[arg(long, help = CONFIG_HELP)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub eps1: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub eps2: f64,
    #[arg(long, value_enum, default_value_t = EvolveMode::Exact)]
    pub mode: EvolveMode,
    /// Fock cutoffs for g1, g2, m
    #[arg(long, value_parser = parse_cutoffs, default_value = "4,4,8")]
    pub cutoffs: [usize; 3],
    /// Largest tolerated top-level population in exact mode
    #[arg(long, default_value_t = gravwit_core::dynamics::LEAKAGE_THRESHOLD)]
    pub leakage_threshold: f64,
    /// List zero amplitudes too
    #[arg(long)]
    pub include_zeros: bool,
}

#[derive(Args, Debug, Clone)]
pub struct FalsifyArgs {
    #[arg(long, help = CONFIG_HELP)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Random product states per bipartition
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub n_products: u64,
    /// Random biseparable mixtures
    #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
    pub n_ensembles: u64,
    #[arg(long, value_parser = parse_cutoffs, default_value = "4,4,8")]
    pub cutoffs: [usize; 3],
    /// Worker threads (all cores when absent)
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
    /// Also write the CSV summary here
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SelftestArgs {
    #[arg(long, help = CONFIG_HELP)]
    pub config: Option<PathBuf>,
}
