//! Inseparability values and genuine-tripartite witnesses built on
//! `A = (1 + g1)(1 + g2) b²`.
//!
//! For each bipartition, `A` factors as `A⁽¹⁾A⁽²⁾` with `A⁽¹⁾` on the singleton
//! side. The Cauchy–Schwarz bound for states that are product across the split
//! gives
//!
//! ```text
//! I_i = |⟨A⟩| − O_i,     O_i = sqrt(⟨A⁽¹⁾†A⁽¹⁾⟩ ⟨A⁽²⁾†A⁽²⁾⟩)
//! G1  = |⟨A⟩| − (O_1 + O_2 + O_3)
//! G2  = |⟨A⟩| − max(O_1, O_2, O_3)
//! ```
//!
//! with index 1, 2, 3 for the singletons g1, g2, m. Expectations of `M†M`
//! forms are evaluated as `‖Mψ‖²`.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;

use crate::dynamics::{evolve_exact, expect_first_order, generator};
use crate::error::{invalid, Result};
use crate::fock::{Ensemble, FockSpace, Mode, Operator, StateVector};
use crate::model::{couplings, rate_omega, PhysicalConstants, SystemParams};
use crate::opdsl;

pub const A_TEXT: &str = "(1 + g1)*(1 + g2)*b^2";
/// Norm deviation tolerated on a state handed to [`WitnessOperators::report_on_state`].
pub const NORM_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bipartition {
    /// g1 | (g2, m)
    G1Rest,
    /// g2 | (g1, m)
    G2Rest,
    /// m | (g1, g2)
    MRest,
}

impl Bipartition {
    pub const ALL: [Bipartition; 3] =
        [Bipartition::G1Rest, Bipartition::G2Rest, Bipartition::MRest];

    pub fn singleton(self) -> Mode {
        match self {
            Bipartition::G1Rest => Mode::G1,
            Bipartition::G2Rest => Mode::G2,
            Bipartition::MRest => Mode::M,
        }
    }

    pub fn rest(self) -> [Mode; 2] {
        match self {
            Bipartition::G1Rest => [Mode::G2, Mode::M],
            Bipartition::G2Rest => [Mode::G1, Mode::M],
            Bipartition::MRest => [Mode::G1, Mode::G2],
        }
    }

    pub fn position(self) -> usize {
        self.singleton().position()
    }

    pub fn label(self) -> &'static str {
        match self {
            Bipartition::G1Rest => "g1|g2m",
            Bipartition::G2Rest => "g2|g1m",
            Bipartition::MRest => "m|g1g2",
        }
    }

    /// DSL texts of `(A⁽¹⁾, A⁽²⁾)`.
    pub fn split_texts(self) -> (&'static str, &'static str) {
        match self {
            Bipartition::G1Rest => ("1 + g1", "(1 + g2)*b^2"),
            Bipartition::G2Rest => ("1 + g2", "(1 + g1)*b^2"),
            Bipartition::MRest => ("b^2", "(1 + g1)*(1 + g2)"),
        }
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Anything with expectation values: pure states and ensembles.
pub trait Expectations {
    fn space(&self) -> FockSpace;
    fn expect(&self, op: &Operator) -> Result<Complex64>;
    /// `⟨M†M⟩`
    fn expect_gram(&self, op: &Operator) -> Result<f64>;
}

impl Expectations for StateVector {
    fn space(&self) -> FockSpace {
        StateVector::space(self)
    }
    fn expect(&self, op: &Operator) -> Result<Complex64> {
        op.expect(self)
    }
    fn expect_gram(&self, op: &Operator) -> Result<f64> {
        op.expect_gram(self)
    }
}

impl Expectations for Ensemble {
    fn space(&self) -> FockSpace {
        Ensemble::space(self)
    }
    fn expect(&self, op: &Operator) -> Result<Complex64> {
        Ensemble::expect(self, op)
    }
    fn expect_gram(&self, op: &Operator) -> Result<f64> {
        Ensemble::expect_gram(self, op)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessReport {
    /// `|⟨(1 + g1)(1 + g2) b²⟩|`
    pub lhs_abs: f64,
    pub o1: f64,
    pub o2: f64,
    pub o3: f64,
    /// G1
    pub g1_value: f64,
    /// G2
    pub g2_value: f64,
    /// `I` per bipartition, indexed by [`Bipartition::position`].
    pub insep: [f64; 3],
}

impl WitnessReport {
    pub fn from_parts(lhs_abs: f64, o: [f64; 3]) -> Self {
        let [o1, o2, o3] = o;
        Self {
            lhs_abs,
            o1,
            o2,
            o3,
            g1_value: lhs_abs - (o1 + o2 + o3),
            g2_value: lhs_abs - o1.max(o2).max(o3),
            insep: o.map(|oi| lhs_abs - oi),
        }
    }

    pub fn o(&self) -> [f64; 3] {
        [self.o1, self.o2, self.o3]
    }

    pub fn insep(&self, b: Bipartition) -> f64 {
        self.insep[b.position()]
    }

    /// Values at or below this are treated as rounding noise.
    pub fn detection_threshold(&self) -> f64 {
        let scale = self.o().into_iter().fold(self.lhs_abs, f64::max);
        10.0 * f64::EPSILON * scale
    }

    pub fn certifies_full_inseparability(&self) -> bool {
        let thr = self.detection_threshold();
        self.insep.iter().all(|&i| i > thr)
    }

    pub fn certifies_genuine(&self) -> bool {
        self.g2_value > self.detection_threshold()
    }

    /// Divide every field by `k`; used to read off coefficients of ε.
    pub fn scaled(&self, k: f64) -> Self {
        Self::from_parts(self.lhs_abs / k, self.o().map(|o| o / k))
    }
}

/// Witness operators for one space.
#[derive(Debug, Clone)]
pub struct WitnessOperators {
    space: FockSpace,
    a: Operator,
    splits: [(Operator, Operator); 3],
}

impl WitnessOperators {
    pub fn new(space: FockSpace) -> Result<Self> {
        let a = witness_operator_a(space)?;
        let mut splits = Vec::with_capacity(3);
        for b in Bipartition::ALL {
            let (t1, t2) = b.split_texts();
            let (e1, e2) = (opdsl::parse(t1)?, opdsl::parse(t2)?);
            if e1.support() != BTreeSet::from([b.singleton()]) {
                return Err(invalid(format!(
                    "A(1) for {b} must act on {} only",
                    b.singleton()
                )));
            }
            if !e2.support().is_subset(&BTreeSet::from(b.rest())) {
                return Err(invalid(format!(
                    "A(2) for {b} leaks onto {}",
                    b.singleton()
                )));
            }
            splits.push((opdsl::evaluate(&e1, space)?, opdsl::evaluate(&e2, space)?));
        }
        let splits: [(Operator, Operator); 3] = splits.try_into().expect("three bipartitions");
        Ok(Self { space, a, splits })
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn a(&self) -> &Operator {
        &self.a
    }

    /// `(A⁽¹⁾, A⁽²⁾)` for a bipartition.
    pub fn split(&self, b: Bipartition) -> &(Operator, Operator) {
        &self.splits[b.position()]
    }

    /// Report on any state or ensemble. No normalization check.
    pub fn report<E: Expectations + ?Sized>(&self, rho: &E) -> Result<WitnessReport> {
        let lhs_abs = rho.expect(&self.a)?.norm();
        let mut o = [0.0; 3];
        for b in Bipartition::ALL {
            let (a1, a2) = self.split(b);
            o[b.position()] = (rho.expect_gram(a1)? * rho.expect_gram(a2)?).sqrt();
        }
        Ok(WitnessReport::from_parts(lhs_abs, o))
    }

    pub fn report_on_state(&self, psi: &StateVector) -> Result<WitnessReport> {
        let dev = (psi.norm() - 1.0).abs();
        if !(dev <= NORM_TOLERANCE) {
            return Err(invalid(format!(
                "witness needs a normalized state, norm deviates by {dev:e}"
            )));
        }
        self.report(psi)
    }

    pub fn report_on_ensemble(&self, rho: &Ensemble) -> Result<WitnessReport> {
        self.report(rho)
    }

    /// Same quantities at first order from the vacuum, every expectation
    /// going through [`expect_first_order`] with generator `h` and `scale`.
    pub fn first_order(&self, h: &Operator, scale: f64) -> Result<WitnessReport> {
        let lhs_abs = expect_first_order(&self.a, h, scale)?.norm();
        let gram = |m: &Operator| -> Result<f64> {
            let mm = m.adjoint().dot(m)?;
            Ok(expect_first_order(&mm, h, scale)?.re.max(0.0))
        };
        let mut o = [0.0; 3];
        for b in Bipartition::ALL {
            let (a1, a2) = self.split(b);
            o[b.position()] = (gram(a1)? * gram(a2)?).sqrt();
        }
        Ok(WitnessReport::from_parts(lhs_abs, o))
    }
}

pub fn witness_operator_a(space: FockSpace) -> Result<Operator> {
    opdsl::operator(A_TEXT, space)
}

pub fn report_on_state(psi: &StateVector) -> Result<WitnessReport> {
    WitnessOperators::new(psi.space())?.report_on_state(psi)
}

/// First-order report for dimensionless couplings on the default space.
pub fn first_order_report(eps1: f64, eps2: f64) -> Result<WitnessReport> {
    first_order_report_in(FockSpace::default(), eps1, eps2)
}

pub fn first_order_report_in(space: FockSpace, eps1: f64, eps2: f64) -> Result<WitnessReport> {
    WitnessOperators::new(space)?.first_order(&generator(eps1, eps2, space), 1.0)
}

/// First-order report from physical parameters, `ε_i = C'_i t/ħ`.
pub fn first_order_report_physical(
    k: &PhysicalConstants,
    p: &SystemParams,
) -> Result<WitnessReport> {
    let c = couplings(k, p)?;
    first_order_report(c.eps1, c.eps2)
}

/// Closed-form value of `|⟨A⟩|` at first order: `2|ε1 + ε2|`.
pub fn closed_form_first_order(eps1: f64, eps2: f64) -> f64 {
    2.0 * (eps1 + eps2).abs()
}

/// `G = Ω·t`
pub fn analytic_witness(k: &PhysicalConstants, p: &SystemParams) -> Result<f64> {
    Ok(rate_omega(k, p)? * p.t)
}

/// Report on the exactly evolved state.
pub fn exact_report(eps1: f64, eps2: f64, space: FockSpace) -> Result<WitnessReport> {
    let ev = evolve_exact(eps1, eps2, space)?;
    WitnessOperators::new(space)?.report_on_state(&ev.state)
}

/// Value at ε = 0 of the interpolating polynomial through `samples` (Neville).
pub fn extrapolate_to_zero(samples: &[(f64, f64)]) -> f64 {
    let n = samples.len();
    let mut p: Vec<f64> = samples.iter().map(|s| s.1).collect();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (samples[i].0, samples[i + level].0);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p.first().copied().unwrap_or(f64::NAN)
}

/// Coefficients of ε in the exact-evolution report for `ε1 = ε2 = ε → 0`.
pub fn linear_coefficients(space: FockSpace, eps_grid: &[f64]) -> Result<WitnessReport> {
    let ops = WitnessOperators::new(space)?;
    let scaled = eps_grid
        .iter()
        .map(|&e| {
            let ev = evolve_exact(e, e, space)?;
            Ok((e, ops.report_on_state(&ev.state)?.scaled(e)))
        })
        .collect::<Result<Vec<_>>>()?;
    let limit = |f: &dyn Fn(&WitnessReport) -> f64| {
        extrapolate_to_zero(&scaled.iter().map(|(e, r)| (*e, f(r))).collect::<Vec<_>>())
    };
    Ok(WitnessReport::from_parts(
        limit(&|r| r.lhs_abs),
        [limit(&|r| r.o1), limit(&|r| r.o2), limit(&|r| r.o3)],
    ))
}
