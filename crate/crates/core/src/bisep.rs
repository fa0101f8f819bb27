//! Random biseparable states, used to check that the witnesses never fire on
//! inputs they are supposed to reject.
//!
//! Every sample draws from its own ChaCha20 stream keyed by `(seed, stream)`,
//! so results do not depend on how the work is scheduled.

use ndarray::Array1;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::fock::{Ensemble, FockSpace, Normalization, StateVector};
use crate::witness::{Bipartition, WitnessOperators};

/// Upper bound accepted for `I`, `G1` and `G2` on biseparable inputs.
pub const FALSIFICATION_TOLERANCE: f64 = 1e-10;
/// Product states per class inside each random ensemble.
pub const ENSEMBLE_PER_CLASS: usize = 2;

const ENSEMBLE_STREAM_TAG: u64 = 3;

fn stream_id(tag: u64, index: usize) -> u64 {
    (tag << 48) | index as u64
}

pub fn sample_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian_unit_vector<R: Rng>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}

/// Tensor `single ⊗ rest` back into mode order (g1, g2, m).
fn assemble(
    space: FockSpace,
    b: Bipartition,
    single: &[Complex64],
    rest: &[Complex64],
) -> StateVector {
    let [r0, r1] = b.rest();
    let c_r1 = space.cutoff(r1);
    let amp: Array1<Complex64> = (0..space.dim())
        .map(|i| {
            let occ = space.occupations(i);
            let j = occ[r0.position()] * c_r1 + occ[r1.position()];
            single[occ[b.singleton().position()]] * rest[j]
        })
        .collect();
    StateVector::from_amplitudes(space, amp, Normalization::Normalized).expect("length is dim")
}

fn product_from_rng<R: Rng>(space: FockSpace, b: Bipartition, rng: &mut R) -> StateVector {
    let d1 = space.cutoff(b.singleton());
    let d2 = space.dim() / d1;
    let single = gaussian_unit_vector(rng, d1);
    let rest = gaussian_unit_vector(rng, d2);
    assemble(space, b, &single, &rest)
}

/// Haar-random pure state that is a product across `b`.
pub fn random_pure_product(space: FockSpace, b: Bipartition, seed: u64) -> StateVector {
    random_pure_product_stream(space, b, seed, 0)
}

pub fn random_pure_product_stream(
    space: FockSpace,
    b: Bipartition,
    seed: u64,
    stream: u64,
) -> StateVector {
    product_from_rng(space, b, &mut sample_rng(seed, stream))
}

/// `3·per_class` product states, `per_class` from each bipartition class,
/// with random positive weights summing to one.
pub fn random_biseparable_ensemble(
    space: FockSpace,
    per_class: usize,
    seed: u64,
) -> Result<Ensemble> {
    random_biseparable_ensemble_stream(space, per_class, seed, 0)
}

pub fn random_biseparable_ensemble_stream(
    space: FockSpace,
    per_class: usize,
    seed: u64,
    stream: u64,
) -> Result<Ensemble> {
    if per_class == 0 {
        return Err(invalid("per_class must be at least 1"));
    }
    let mut rng = sample_rng(seed, stream);
    let mut states = Vec::with_capacity(3 * per_class);
    for b in Bipartition::ALL {
        for _ in 0..per_class {
            states.push(product_from_rng(space, b, &mut rng));
        }
    }
    // open interval (0, 1]: every weight strictly positive
    let raw: Vec<f64> = states.iter().map(|_| 1.0 - rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    Ensemble::new(raw.into_iter().map(|w| w / total).zip(states).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    /// `I ≤ tol` on a product state of the matching bipartition.
    ProductInseparability,
    /// `G2 ≤ tol` on a pure biseparable state.
    PureG2,
    /// `G1 ≤ tol` on a biseparable mixture.
    EnsembleG1,
}

impl Check {
    pub fn label(self) -> &'static str {
        match self {
            Check::ProductInseparability => "product-inseparability",
            Check::PureG2 => "pure-biseparable-g2",
            Check::EnsembleG1 => "ensemble-g1",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub check: Check,
    pub bipartition: Option<Bipartition>,
    pub seed: u64,
    pub stream: u64,
    pub value: f64,
    /// Offending pure state; ensembles are reproduced from `(seed, stream)`.
    pub state: Option<StateVector>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FalsificationSummary {
    pub seed: u64,
    pub n_products: usize,
    pub n_ensembles: usize,
    /// Largest `I` on product states of each bipartition.
    pub max_insep: [f64; 3],
    /// Largest `G2` on the pure product states of each class.
    pub max_g2_pure: [f64; 3],
    pub max_g1_ensemble: f64,
    /// Measured for the record only; no bound is asserted for mixtures.
    pub max_g2_ensemble: f64,
    pub violations: Vec<Violation>,
}

impl FalsificationSummary {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn csv_header() -> &'static str {
        "seed,n_products,n_ensembles,max_insep_g1,max_insep_g2,max_insep_m,max_g2_pure_g1,max_g2_pure_g2,max_g2_pure_m,max_g1_ensemble,max_g2_ensemble,violations"
    }

    pub fn csv_row(&self) -> String {
        let f = |x: f64| format!("{x:e}");
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.seed,
            self.n_products,
            self.n_ensembles,
            f(self.max_insep[0]),
            f(self.max_insep[1]),
            f(self.max_insep[2]),
            f(self.max_g2_pure[0]),
            f(self.max_g2_pure[1]),
            f(self.max_g2_pure[2]),
            f(self.max_g1_ensemble),
            f(self.max_g2_ensemble),
            self.violations.len()
        )
    }
}

impl std::fmt::Display for FalsificationSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "falsification run: seed {}, {} product states per bipartition, {} ensembles",
            self.seed, self.n_products, self.n_ensembles
        )?;
        for b in Bipartition::ALL {
            writeln!(
                f,
                "  {:<8} max I = {:+.3e}   max G2 (pure) = {:+.3e}",
                b.label(),
                self.max_insep[b.position()],
                self.max_g2_pure[b.position()]
            )?;
        }
        writeln!(f, "  ensembles max G1 = {:+.3e}", self.max_g1_ensemble)?;
        writeln!(
            f,
            "  ensembles max G2 = {:+.3e} (logged, not asserted)",
            self.max_g2_ensemble
        )?;
        write!(
            f,
            "  {} violations (tolerance {:e}): {}",
            self.violations.len(),
            FALSIFICATION_TOLERANCE,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

/// Sample and evaluate; always returns the full summary.
pub fn falsification_scan(
    space: FockSpace,
    n_products: usize,
    n_ensembles: usize,
    seed: u64,
) -> Result<FalsificationSummary> {
    if n_products == 0 || n_ensembles == 0 {
        return Err(invalid(
            "falsification needs at least one product state and one ensemble",
        ));
    }
    let ops = WitnessOperators::new(space)?;

    let jobs: Vec<(Bipartition, usize)> = Bipartition::ALL
        .into_iter()
        .flat_map(|b| (0..n_products).map(move |i| (b, i)))
        .collect();
    let product_reports = jobs
        .par_iter()
        .map(|&(b, i)| {
            let stream = stream_id(b.position() as u64, i);
            let psi = random_pure_product_stream(space, b, seed, stream);
            ops.report_on_state(&psi).map(|r| (b, stream, psi, r))
        })
        .collect::<Result<Vec<_>>>()?;

    let ensemble_reports = (0..n_ensembles)
        .into_par_iter()
        .map(|k| {
            let stream = stream_id(ENSEMBLE_STREAM_TAG, k);
            let rho = random_biseparable_ensemble_stream(space, ENSEMBLE_PER_CLASS, seed, stream)?;
            ops.report_on_ensemble(&rho).map(|r| (stream, r))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut summary = FalsificationSummary {
        seed,
        n_products,
        n_ensembles,
        max_insep: [f64::NEG_INFINITY; 3],
        max_g2_pure: [f64::NEG_INFINITY; 3],
        max_g1_ensemble: f64::NEG_INFINITY,
        max_g2_ensemble: f64::NEG_INFINITY,
        violations: Vec::new(),
    };
    let bad = |v: f64| !(v <= FALSIFICATION_TOLERANCE);

    for (b, stream, psi, r) in product_reports {
        let k = b.position();
        let insep = r.insep(b);
        summary.max_insep[k] = summary.max_insep[k].max(insep);
        summary.max_g2_pure[k] = summary.max_g2_pure[k].max(r.g2_value);
        for (check, value) in [
            (Check::ProductInseparability, insep),
            (Check::PureG2, r.g2_value),
        ] {
            if bad(value) {
                summary.violations.push(Violation {
                    check,
                    bipartition: Some(b),
                    seed,
                    stream,
                    value,
                    state: Some(psi.clone()),
                });
            }
        }
    }
    for (stream, r) in ensemble_reports {
        summary.max_g1_ensemble = summary.max_g1_ensemble.max(r.g1_value);
        summary.max_g2_ensemble = summary.max_g2_ensemble.max(r.g2_value);
        if bad(r.g1_value) {
            summary.violations.push(Violation {
                check: Check::EnsembleG1,
                bipartition: None,
                seed,
                stream,
                value: r.g1_value,
                state: None,
            });
        }
    }
    Ok(summary)
}

/// As [`falsification_scan`], but any violation is an error.
pub fn falsification_run(
    space: FockSpace,
    n_products: usize,
    n_ensembles: usize,
    seed: u64,
) -> Result<FalsificationSummary> {
    let summary = falsification_scan(space, n_products, n_ensembles, seed)?;
    if summary.passed() {
        Ok(summary)
    } else {
        Err(Error::Falsified(Box::new(summary)))
    }
}
