//! Truncated three-mode Fock space.
//!
//! The composite space is `H_g1 ⊗ H_g2 ⊗ H_m`: two graviton polarization modes
//! and the oscillator mode. A cutoff `c` keeps occupations `0..c`, so each mode
//! contributes a factor of dimension `c`. Basis states are indexed row-major in
//! mode order (g1, g2, m):
//!
//! ```text
//! index(n1, n2, n3) = n1 * (c2 * c3) + n2 * c3 + n3
//! ```
//!
//! Truncation is never hidden: nothing here renormalizes a state. Callers that
//! care about population leaking into the top level use
//! [`StateVector::top_level_population`].

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    /// First graviton polarization.
    G1,
    /// Second graviton polarization.
    G2,
    /// Oscillator.
    M,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::G1, Mode::G2, Mode::M];

    pub fn position(self) -> usize {
        match self {
            Mode::G1 => 0,
            Mode::G2 => 1,
            Mode::M => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Mode::G1 => "g1",
            Mode::G2 => "g2",
            Mode::M => "m",
        }
    }

    /// Symbol of the mode's annihilator in operator expressions.
    pub fn symbol(self) -> &'static str {
        match self {
            Mode::G1 => "g1",
            Mode::G2 => "g2",
            Mode::M => "b",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g1" => Ok(Mode::G1),
            "g2" => Ok(Mode::G2),
            "m" | "b" => Ok(Mode::M),
            other => Err(invalid(format!("unknown mode {other}"))),
        }
    }
}

/// Truncated occupation basis of the three modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockSpace {
    cutoffs: [usize; 3],
}

impl FockSpace {
    /// Production default, `(g1, g2, m) = (4, 4, 8)`, dimension 128.
    pub const DEFAULT_CUTOFFS: [usize; 3] = [4, 4, 8];

    pub fn new(cutoffs: [usize; 3]) -> Result<Self> {
        for mode in Mode::ALL {
            if cutoffs[mode.position()] == 0 {
                return Err(invalid(format!(
                    "cutoff for mode {mode} must be at least 1"
                )));
            }
        }
        Ok(Self { cutoffs })
    }

    pub fn cutoffs(&self) -> [usize; 3] {
        self.cutoffs
    }

    pub fn cutoff(&self, mode: Mode) -> usize {
        self.cutoffs[mode.position()]
    }

    pub fn dim(&self) -> usize {
        self.cutoffs.iter().product()
    }

    /// Distance in the flat index between neighbouring occupations of `mode`.
    pub fn stride(&self, mode: Mode) -> usize {
        self.cutoffs[mode.position() + 1..].iter().product()
    }

    /// Flat index of an occupation triple, `None` if any occupation is out of range.
    pub fn index(&self, occupations: [usize; 3]) -> Option<usize> {
        let [c1, c2, c3] = self.cutoffs;
        let [n1, n2, n3] = occupations;
        if n1 >= c1 || n2 >= c2 || n3 >= c3 {
            return None;
        }
        Some(n1 * (c2 * c3) + n2 * c3 + n3)
    }

    pub fn occupations(&self, index: usize) -> [usize; 3] {
        debug_assert!(index < self.dim());
        let [_, c2, c3] = self.cutoffs;
        [index / (c2 * c3), (index / c3) % c2, index % c3]
    }

    pub fn occupation(&self, index: usize, mode: Mode) -> usize {
        self.occupations(index)[mode.position()]
    }

    fn check_same(&self, other: &FockSpace) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl Default for FockSpace {
    fn default() -> Self {
        Self {
            cutoffs: Self::DEFAULT_CUTOFFS,
        }
    }
}

impl fmt::Display for FockSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.cutoffs;
        write!(f, "F({a},{b},{c})")
    }
}

/// Whether a state came out of a norm-preserving procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Normalized,
    /// Truncated perturbative expansions: the norm deviates from 1 at second order.
    Unnormalized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: FockSpace,
    amp: Array1<Complex64>,
    normalization: Normalization,
}

impl StateVector {
    pub fn vacuum(space: FockSpace) -> Self {
        Self::basis(space, [0, 0, 0]).expect("vacuum is always in range")
    }

    pub fn basis(space: FockSpace, occupations: [usize; 3]) -> Result<Self> {
        let idx = space
            .index(occupations)
            .ok_or_else(|| invalid(format!("occupations {occupations:?} outside {space}")))?;
        let mut amp = Array1::zeros(space.dim());
        amp[idx] = ONE;
        Ok(Self {
            space,
            amp,
            normalization: Normalization::Normalized,
        })
    }

    pub fn from_amplitudes(
        space: FockSpace,
        amp: Array1<Complex64>,
        normalization: Normalization,
    ) -> Result<Self> {
        if amp.len() != space.dim() {
            return Err(invalid(format!(
                "amplitude vector has length {}, space {space} has dimension {}",
                amp.len(),
                space.dim()
            )));
        }
        Ok(Self {
            space,
            amp,
            normalization,
        })
    }

    /// Rescale to unit norm. Fails on the zero vector.
    pub fn normalized(mut self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(invalid("cannot normalize a zero or non-finite vector"));
        }
        self.amp.mapv_inplace(|z| z / norm);
        self.normalization = Normalization::Normalized;
        Ok(self)
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &Array1<Complex64> {
        &self.amp
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn amplitude(&self, occupations: [usize; 3]) -> Option<Complex64> {
        self.space.index(occupations).map(|i| self.amp[i])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.space.check_same(&other.space)?;
        Ok(self
            .amp
            .iter()
            .zip(other.amp.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.space.check_same(&other.space)?;
        Ok(self
            .amp
            .iter()
            .zip(other.amp.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// Probability weight sitting on the highest kept occupation of `mode`.
    pub fn top_level_population(&self, mode: Mode) -> f64 {
        let top = self.space.cutoff(mode) - 1;
        self.amp
            .iter()
            .enumerate()
            .filter(|(i, _)| self.space.occupation(*i, mode) == top)
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }

    /// Nonzero amplitudes as `(index, occupations, amplitude)`.
    pub fn support(&self) -> impl Iterator<Item = (usize, [usize; 3], Complex64)> + '_ {
        self.amp
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != ZERO)
            .map(|(i, z)| (i, self.space.occupations(i), *z))
    }
}

/// Dense operator on a [`FockSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: FockSpace,
    mat: Array2<Complex64>,
}

impl Operator {
    pub fn zeros(space: FockSpace) -> Self {
        let d = space.dim();
        Self {
            space,
            mat: Array2::zeros((d, d)),
        }
    }

    pub fn identity(space: FockSpace) -> Self {
        Self {
            space,
            mat: Array2::eye(space.dim()),
        }
    }

    pub fn from_matrix(space: FockSpace, mat: Array2<Complex64>) -> Result<Self> {
        let d = space.dim();
        if mat.dim() != (d, d) {
            return Err(invalid(format!(
                "matrix shape {:?} does not match dimension {d} of {space}",
                mat.dim()
            )));
        }
        Ok(Self { space, mat })
    }

    /// Annihilator of `mode`, `a|n⟩ = √n |n−1⟩`, identity on the other modes.
    pub fn annihilator(space: FockSpace, mode: Mode) -> Self {
        let mut op = Self::zeros(space);
        let stride = space.stride(mode);
        for col in 0..space.dim() {
            let n = space.occupation(col, mode);
            if n > 0 {
                op.mat[[col - stride, col]] = Complex64::new((n as f64).sqrt(), 0.0);
            }
        }
        op
    }

    pub fn creator(space: FockSpace, mode: Mode) -> Self {
        Self::annihilator(space, mode).adjoint()
    }

    /// `a†a` for `mode`, built directly as a diagonal.
    pub fn number(space: FockSpace, mode: Mode) -> Self {
        let mut op = Self::zeros(space);
        for i in 0..space.dim() {
            op.mat[[i, i]] = Complex64::new(space.occupation(i, mode) as f64, 0.0);
        }
        op
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.mat
    }

    pub fn into_matrix(self) -> Array2<Complex64> {
        self.mat
    }

    pub fn add(&self, rhs: &Operator) -> Result<Operator> {
        self.space.check_same(&rhs.space)?;
        Ok(Self {
            space: self.space,
            mat: &self.mat + &rhs.mat,
        })
    }

    pub fn sub(&self, rhs: &Operator) -> Result<Operator> {
        self.space.check_same(&rhs.space)?;
        Ok(Self {
            space: self.space,
            mat: &self.mat - &rhs.mat,
        })
    }

    pub fn scale(&self, factor: Complex64) -> Operator {
        Self {
            space: self.space,
            mat: self.mat.mapv(|z| z * factor),
        }
    }

    /// Matrix product `self · rhs`.
    pub fn dot(&self, rhs: &Operator) -> Result<Operator> {
        self.space.check_same(&rhs.space)?;
        Ok(Self {
            space: self.space,
            mat: self.mat.dot(&rhs.mat),
        })
    }

    /// `[self, rhs] = self·rhs − rhs·self`
    pub fn commutator(&self, rhs: &Operator) -> Result<Operator> {
        self.dot(rhs)?.sub(&rhs.dot(self)?)
    }

    pub fn adjoint(&self) -> Operator {
        Self {
            space: self.space,
            mat: self.mat.t().mapv(|z| z.conj()),
        }
    }

    /// Integer power by repeated squaring; `powi(0)` is the identity.
    pub fn powi(&self, exponent: u32) -> Operator {
        let mut result = Self::identity(self.space);
        let mut base = self.mat.clone();
        let mut e = exponent;
        while e > 0 {
            if e & 1 == 1 {
                result.mat = result.mat.dot(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.dot(&base);
            }
        }
        result
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        self.space.check_same(&state.space)?;
        Ok(StateVector {
            space: self.space,
            amp: self.mat.dot(&state.amp),
            normalization: Normalization::Unnormalized,
        })
    }

    /// `⟨ψ|self|ψ⟩`
    pub fn expect(&self, state: &StateVector) -> Result<Complex64> {
        let image = self.apply(state)?;
        state.inner(&image)
    }

    /// `⟨ψ|M†M|ψ⟩` evaluated as `‖Mψ‖²`, nonnegative by construction.
    pub fn expect_gram(&self, state: &StateVector) -> Result<f64> {
        Ok(self.apply(state)?.norm_sqr())
    }

    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        self.space.check_same(&other.space)?;
        Ok(self
            .mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry of `|A − A†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
            .expect("adjoint shares the space")
    }

    /// 1-norm (maximum absolute column sum).
    pub fn one_norm(&self) -> f64 {
        self.mat
            .columns()
            .into_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Convex mixture of pure states, `ρ = Σ w_k |ψ_k⟩⟨ψ_k|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    space: FockSpace,
    components: Vec<(f64, StateVector)>,
}

impl Ensemble {
    pub const WEIGHT_TOLERANCE: f64 = 1e-12;
    pub const NORM_TOLERANCE: f64 = 1e-10;

    pub fn new(components: Vec<(f64, StateVector)>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| invalid("ensemble needs at least one component"))?;
        let space = first.1.space;
        let mut total = 0.0;
        for (w, psi) in &components {
            space.check_same(&psi.space)?;
            if !(*w >= 0.0 && w.is_finite()) {
                return Err(invalid(format!(
                    "ensemble weight {w} is not a nonnegative real"
                )));
            }
            if (psi.norm() - 1.0).abs() > Self::NORM_TOLERANCE {
                return Err(invalid(format!(
                    "ensemble component has norm {}, expected 1",
                    psi.norm()
                )));
            }
            total += w;
        }
        if (total - 1.0).abs() > Self::WEIGHT_TOLERANCE {
            return Err(invalid(format!(
                "ensemble weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { space, components })
    }

    pub fn pure(state: StateVector) -> Result<Self> {
        Self::new(vec![(1.0, state)])
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn components(&self) -> &[(f64, StateVector)] {
        &self.components
    }

    pub fn expect(&self, op: &Operator) -> Result<Complex64> {
        self.components
            .iter()
            .map(|(w, psi)| op.expect(psi).map(|v| v * *w))
            .sum()
    }

    pub fn expect_gram(&self, op: &Operator) -> Result<f64> {
        self.components
            .iter()
            .map(|(w, psi)| op.expect_gram(psi).map(|v| v * *w))
            .sum()
    }
}
