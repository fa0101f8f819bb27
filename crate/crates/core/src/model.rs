//! Physical parameters and the graviton–oscillator interaction Hamiltonian
//!
//! ```text
//! H_int = C'_1 (g1 + g1†) X² + C'_2 (g2 + g2†) X²,   X = b + b†
//! C'_λ  = sqrt(G ħ³ ω_k⁶ / (64 π² c⁵ ω_m²)) · e^λ_11
//! Ω     = 2|C'_1 + C'_2| / ħ = sqrt(G ħ ω_k⁶ / (16 π² c⁵ ω_m²)) · |e¹_11 + e²_11|
//! ```
//!
//! All angular frequencies are in rad/s.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::fock::{FockSpace, Operator};
use crate::opdsl;

/// DSL text of the dimensionless factor multiplying `C'_1`.
pub const H1_TEXT: &str = "(g1 + g1')*(b + b')^2";
/// DSL text of the dimensionless factor multiplying `C'_2`.
pub const H2_TEXT: &str = "(g2 + g2')*(b + b')^2";

/// Tolerance on `e1² + e2² = P₁₁(n)²`.
pub const POLARIZATION_TOLERANCE: f64 = 1e-9;
const UNIT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Gravitational constant, m³ kg⁻¹ s⁻².
    pub g: f64,
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Speed of light, m/s.
    pub c: f64,
}

impl PhysicalConstants {
    /// CODATA 2018.
    pub const CODATA_2018: Self = Self {
        g: 6.67430e-11,
        hbar: 1.054571817e-34,
        c: 2.99792458e8,
    };

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("G", self.g), ("hbar", self.hbar), ("c", self.c)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!(
                    "constant {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA_2018
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Oscillator mass, kg.
    pub mu: f64,
    /// Oscillator angular frequency, rad/s.
    pub omega_m: f64,
    /// Graviton-mode angular frequency, rad/s.
    pub omega_k: f64,
    /// Polarization component e¹₁₁.
    pub e1: f64,
    /// Polarization component e²₁₁.
    pub e2: f64,
    /// Propagation direction of the graviton mode.
    pub n: [f64; 3],
    /// Evolution time, s.
    pub t: f64,
}

impl SystemParams {
    /// Parameters with the default geometry: `n = u₃` and `e1 = e2 = 1/√2`.
    pub fn new(mu: f64, omega_m: f64, omega_k: f64, t: f64) -> Result<Self> {
        let (e1, e2) = default_polarization();
        let p = Self {
            mu,
            omega_m,
            omega_k,
            e1,
            e2,
            n: [0.0, 0.0, 1.0],
            t,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_polarization(mut self, e1: f64, e2: f64) -> Result<Self> {
        self.e1 = e1;
        self.e2 = e2;
        self.validate()?;
        Ok(self)
    }

    pub fn with_direction(mut self, n: [f64; 3]) -> Result<Self> {
        self.n = n;
        self.validate()?;
        Ok(self)
    }

    /// Replace direction and polarization together.
    pub fn with_geometry(mut self, n: [f64; 3], e1: f64, e2: f64) -> Result<Self> {
        self.n = n;
        self.e1 = e1;
        self.e2 = e2;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mu", self.mu),
            ("omega_m", self.omega_m),
            ("omega_k", self.omega_k),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(invalid(format!("t must be nonnegative, got {}", self.t)));
        }
        let required = polarization_constraint(self.n)?;
        let actual = self.e1 * self.e1 + self.e2 * self.e2;
        if !((actual - required).abs() <= POLARIZATION_TOLERANCE) {
            return Err(invalid(format!(
                "polarization e1²+e2² = {actual} but the direction requires P11² = {required}"
            )));
        }
        Ok(())
    }
}

/// Derived couplings for one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessCouplings {
    /// `C'_1`, J.
    pub c1p: f64,
    /// `C'_2`, J.
    pub c2p: f64,
    pub eps1: f64,
    pub eps2: f64,
    /// Witness rate Ω, s⁻¹.
    pub omega: f64,
    /// Zero-point length, m.
    pub delta_zpf: f64,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive, got {v}")))
    }
}

/// `(C'_1, C'_2)` in joules.
pub fn coupling(k: &PhysicalConstants, p: &SystemParams) -> Result<(f64, f64)> {
    k.validate()?;
    p.validate()?;
    let prefactor = (k.g * k.hbar.powi(3) * p.omega_k.powi(6)
        / (64.0 * PI * PI * k.c.powi(5) * p.omega_m.powi(2)))
    .sqrt();
    Ok((prefactor * p.e1, prefactor * p.e2))
}

/// Ω from its closed form; agrees with `2|C'_1 + C'_2|/ħ`.
pub fn rate_omega(k: &PhysicalConstants, p: &SystemParams) -> Result<f64> {
    k.validate()?;
    p.validate()?;
    let prefactor = (k.g * k.hbar * p.omega_k.powi(6)
        / (16.0 * PI * PI * k.c.powi(5) * p.omega_m.powi(2)))
    .sqrt();
    Ok(prefactor * (p.e1 + p.e2).abs())
}

/// `δ_zpf = sqrt(ħ / (2 μ ω_m))`
pub fn zpf(k: &PhysicalConstants, mu: f64, omega_m: f64) -> Result<f64> {
    check_positive("mu", mu)?;
    check_positive("omega_m", omega_m)?;
    Ok((k.hbar / (2.0 * mu * omega_m)).sqrt())
}

/// Inverse of [`zpf`]: `ω_m = ħ / (2 μ δ_zpf²)`.
pub fn omega_m_from_zpf(k: &PhysicalConstants, mu: f64, delta_zpf: f64) -> Result<f64> {
    check_positive("mu", mu)?;
    check_positive("delta_zpf", delta_zpf)?;
    Ok(k.hbar / (2.0 * mu * delta_zpf * delta_zpf))
}

/// Required value of `(e¹₁₁)² + (e²₁₁)²` for propagation along `n`: `P₁₁(n)²`
/// with the transverse projector `P_ij = δ_ij − n_i n_j`.
pub fn polarization_constraint(n: [f64; 3]) -> Result<f64> {
    let norm = n.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !((norm - 1.0).abs() <= UNIT_TOLERANCE) {
        return Err(invalid(format!(
            "direction {n:?} is not a unit vector (|n| = {norm})"
        )));
    }
    let p11 = 1.0 - n[0] * n[0];
    Ok(p11 * p11)
}

/// Equal split `(1/√2, 1/√2)` for propagation along `u₃`.
pub fn default_polarization() -> (f64, f64) {
    (
        std::f64::consts::FRAC_1_SQRT_2,
        std::f64::consts::FRAC_1_SQRT_2,
    )
}

pub fn couplings(k: &PhysicalConstants, p: &SystemParams) -> Result<DimensionlessCouplings> {
    let (c1p, c2p) = coupling(k, p)?;
    Ok(DimensionlessCouplings {
        c1p,
        c2p,
        eps1: c1p * p.t / k.hbar,
        eps2: c2p * p.t / k.hbar,
        omega: rate_omega(k, p)?,
        delta_zpf: zpf(k, p.mu, p.omega_m)?,
    })
}

/// `H1 = (g1 + g1†) X²` and `H2 = (g2 + g2†) X²`, built from ladder matrices.
pub fn build_h1_h2(space: FockSpace) -> (Operator, Operator) {
    use crate::fock::Mode;
    let b = Operator::annihilator(space, Mode::M);
    let x = b.add(&b.adjoint()).expect("same space");
    let x2 = x.dot(&x).expect("same space");
    let h = |mode| {
        let g = Operator::annihilator(space, mode);
        g.add(&g.adjoint())
            .and_then(|q| q.dot(&x2))
            .expect("same space")
    };
    (h(Mode::G1), h(Mode::G2))
}

/// `H_int = C'_1 H1 + C'_2 H2`. Works equally with `(ε1, ε2)` in place of the
/// couplings to get the dimensionless generator `ε1 H1 + ε2 H2`.
pub fn build_hamiltonian(space: FockSpace, c1p: f64, c2p: f64) -> Operator {
    let (h1, h2) = build_h1_h2(space);
    h1.scale(Complex64::new(c1p, 0.0))
        .add(&h2.scale(Complex64::new(c2p, 0.0)))
        .expect("same space")
}

/// DSL route to `(H1, H2)`; independent of [`build_h1_h2`].
pub fn parse_h1_h2(space: FockSpace) -> Result<(Operator, Operator)> {
    Ok((
        opdsl::operator(H1_TEXT, space)?,
        opdsl::operator(H2_TEXT, space)?,
    ))
}
