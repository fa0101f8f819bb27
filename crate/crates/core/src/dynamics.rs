//! Evolution from the vacuum under `exp(−i(ε1 H1 + ε2 H2))`, exactly (dense
//! matrix exponential) and to first order in ε.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::expm::expm;
use crate::fock::{FockSpace, Mode, Normalization, Operator, StateVector};
use crate::model::build_hamiltonian;

/// Largest probability tolerated on any top occupation level.
pub const LEAKAGE_THRESHOLD: f64 = 1e-8;
/// Norm tolerance for unitary output.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub state: StateVector,
    /// Population on the highest kept level of each mode, in mode order.
    pub leakage: [f64; 3],
}

impl Evolution {
    pub fn max_leakage(&self) -> (Mode, f64) {
        Mode::ALL
            .into_iter()
            .map(|m| (m, self.leakage[m.position()]))
            .fold((Mode::G1, f64::NEG_INFINITY), |acc, x| {
                if x.1 > acc.1 {
                    x
                } else {
                    acc
                }
            })
    }
}

/// Generator `ε1 H1 + ε2 H2`.
pub fn generator(eps1: f64, eps2: f64, space: FockSpace) -> Operator {
    build_hamiltonian(space, eps1, eps2)
}

/// Exact evolution with the default leakage threshold.
pub fn evolve_exact(eps1: f64, eps2: f64, space: FockSpace) -> Result<Evolution> {
    evolve_exact_with_threshold(eps1, eps2, space, LEAKAGE_THRESHOLD)
}

pub fn evolve_exact_with_threshold(
    eps1: f64,
    eps2: f64,
    space: FockSpace,
    threshold: f64,
) -> Result<Evolution> {
    if !(eps1.is_finite() && eps2.is_finite()) {
        return Err(invalid("eps values must be finite"));
    }
    let minus_i = Complex64::new(0.0, -1.0);
    let u = expm(&generator(eps1, eps2, space).scale(minus_i));
    let image = u.apply(&StateVector::vacuum(space))?;
    let state =
        StateVector::from_amplitudes(space, image.amplitudes().clone(), Normalization::Normalized)?;
    let leakage = Mode::ALL.map(|m| state.top_level_population(m));
    let out = Evolution { state, leakage };
    let (mode, worst) = out.max_leakage();
    if worst > threshold {
        return Err(Error::CutoffTooSmall {
            mode,
            leakage: worst,
            threshold,
        });
    }
    Ok(out)
}

/// `|000⟩ − i[ε1(|100⟩ + √2|102⟩) + ε2(|010⟩ + √2|012⟩)]`, unnormalized.
pub fn evolve_first_order(eps1: f64, eps2: f64, space: FockSpace) -> Result<StateVector> {
    let [c1, c2, c3] = space.cutoffs();
    if c1 < 2 || c2 < 2 || c3 < 3 {
        return Err(invalid(format!(
            "first-order state needs cutoffs of at least (2,2,3), got {space}"
        )));
    }
    let mut amp = ndarray::Array1::zeros(space.dim());
    let mut put = |occ: [usize; 3], z: Complex64| {
        amp[space.index(occ).expect("checked cutoffs")] = z;
    };
    put([0, 0, 0], Complex64::new(1.0, 0.0));
    put([1, 0, 0], Complex64::new(0.0, -eps1));
    put([1, 0, 2], Complex64::new(0.0, -(SQRT_2 * eps1)));
    put([0, 1, 0], Complex64::new(0.0, -eps2));
    put([0, 1, 2], Complex64::new(0.0, -(SQRT_2 * eps2)));
    StateVector::from_amplitudes(space, amp, Normalization::Unnormalized)
}

/// First-order expectation from the vacuum,
/// `⟨0|O|0⟩ + i·scale·⟨0|[H, O]|0⟩`.
///
/// Pass `H_int` with `scale = t/ħ`, or the dimensionless generator
/// `ε1 H1 + ε2 H2` with `scale = 1`.
pub fn expect_first_order(o: &Operator, h: &Operator, scale: f64) -> Result<Complex64> {
    let vac = StateVector::vacuum(o.space());
    let zeroth = o.expect(&vac)?;
    let comm = h.commutator(o)?.expect(&vac)?;
    Ok(zeroth + Complex64::new(0.0, scale) * comm)
}

/// Power-law fit `value ≈ K·ε^exponent` by least squares in log–log space.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderFit {
    pub exponent: f64,
    pub r2: f64,
    pub samples: Vec<(f64, f64)>,
}

pub fn fit_power_law(samples: Vec<(f64, f64)>) -> Result<OrderFit> {
    if samples.len() < 3 {
        return Err(Error::CannotFit(format!(
            "need at least 3 samples, got {}",
            samples.len()
        )));
    }
    if let Some(&(e, v)) = samples
        .iter()
        .find(|(e, v)| !(*e > 0.0 && *v > 0.0 && e.is_finite() && v.is_finite()))
    {
        return Err(Error::CannotFit(format!(
            "sample ({e}, {v}) is not strictly positive"
        )));
    }
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::CannotFit("all ε values coincide".into()));
    }
    let exponent = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok(OrderFit {
        exponent,
        r2,
        samples,
    })
}

/// Evaluate `value` on the grid and fit its leading power of ε.
pub fn fit_leading_order<F>(mut value: F, eps_grid: &[f64]) -> Result<OrderFit>
where
    F: FnMut(f64) -> Result<f64>,
{
    let samples = eps_grid
        .iter()
        .map(|&e| value(e).map(|v| (e, v)))
        .collect::<Result<Vec<_>>>()?;
    fit_power_law(samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> FockSpace {
        FockSpace::default()
    }

    #[test]
    fn zero_eps_is_vacuum() {
        let ev = evolve_exact(0.0, 0.0, space()).unwrap();
        assert_eq!(ev.state, StateVector::vacuum(space()));
        let fo = evolve_first_order(0.0, 0.0, space()).unwrap();
        assert_eq!(fo.amplitudes(), StateVector::vacuum(space()).amplitudes());
    }

    #[test]
    fn exact_matches_first_order_amplitudes() {
        let e = 1e-3;
        let psi = evolve_exact(e, 0.0, space()).unwrap().state;
        let a100 = psi.amplitude([1, 0, 0]).unwrap();
        let a102 = psi.amplitude([1, 0, 2]).unwrap();
        assert!((a100 - Complex64::new(0.0, -e)).norm() < 10.0 * e * e);
        assert!((a102 - Complex64::new(0.0, -SQRT_2 * e)).norm() < 10.0 * e * e);
    }

    #[test]
    fn first_order_amplitudes() {
        let psi = evolve_first_order(0.01, 0.0, space()).unwrap();
        assert_eq!(psi.normalization(), Normalization::Unnormalized);
        assert_eq!(
            psi.amplitude([1, 0, 2]).unwrap(),
            Complex64::new(0.0, -(0.01 * SQRT_2))
        );
        assert_eq!(psi.support().count(), 3);
    }

    #[test]
    fn first_order_norm() {
        let (e1, e2) = (0.02, -0.03);
        let psi = evolve_first_order(e1, e2, space()).unwrap();
        let expected = 1.0 + 3.0 * e1 * e1 + 3.0 * e2 * e2;
        assert!((psi.norm_sqr() - expected).abs() < 1e-15);
    }

    #[test]
    fn first_order_needs_room() {
        let small = FockSpace::new([2, 2, 2]).unwrap();
        assert!(matches!(
            evolve_first_order(0.1, 0.1, small),
            Err(Error::InvalidArgument(_))
        ));
        assert!(evolve_first_order(0.1, 0.1, FockSpace::new([2, 2, 3]).unwrap()).is_ok());
    }

    #[test]
    fn unitarity() {
        for e in [1e-4, 1e-3, 1e-2] {
            let psi = evolve_exact(e, -0.5 * e, space()).unwrap().state;
            assert!((psi.norm() - 1.0).abs() < UNITARITY_TOLERANCE, "ε = {e}");
        }
        // larger ε leaks into the top levels but stays unitary
        for e in [0.05, 0.1] {
            let psi = evolve_exact_with_threshold(e, e, space(), 1.0)
                .unwrap()
                .state;
            assert!((psi.norm() - 1.0).abs() < UNITARITY_TOLERANCE, "ε = {e}");
        }
    }

    #[test]
    fn leakage_guard_names_mode() {
        let tiny = FockSpace::new([2, 2, 3]).unwrap();
        match evolve_exact(0.05, 0.0, tiny) {
            Err(Error::CutoffTooSmall { mode, leakage, .. }) => {
                assert!(leakage > LEAKAGE_THRESHOLD);
                assert!(matches!(mode, Mode::G1 | Mode::M));
            }
            other => panic!("expected cutoff error, got {other:?}"),
        }
    }

    #[test]
    fn first_order_expectation_identity() {
        let s = space();
        let h = generator(1e-3, 2e-3, s);
        let v = expect_first_order(&Operator::identity(s), &h, 1.0).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn first_order_expectation_linear_in_time() {
        // Hermitian O: the correction is i·t·⟨[H,O]⟩, real and linear in t
        let s = space();
        let (h1, _) = crate::model::build_h1_h2(s);
        let b = Operator::annihilator(s, Mode::M);
        let g = Operator::annihilator(s, Mode::G1);
        // i(A − A†) with A = g1 b²: Hermitian, purely imaginary
        let a = g.dot(&b).unwrap().dot(&b).unwrap();
        let o = a.sub(&a.adjoint()).unwrap().scale(Complex64::new(0.0, 1.0));
        assert!(o.hermiticity_defect() == 0.0);
        let base = expect_first_order(&o, &h1, 0.0).unwrap();
        let vals: Vec<Complex64> = [1.0, 2.0, 3.0]
            .iter()
            .map(|&t| expect_first_order(&o, &h1, t).unwrap() - base)
            .collect();
        for (k, v) in vals.iter().enumerate() {
            assert!(v.im.abs() < 1e-12);
            assert!((v.re - (k as f64 + 1.0) * vals[0].re).abs() < 1e-12);
        }
        assert!(vals[0].re.abs() > 0.1);
    }

    #[test]
    fn synthetic_fits() {
        let grid = [1e-2, 1e-3, 1e-4];
        let sq = fit_leading_order(|e| Ok(e * e), &grid).unwrap();
        assert!((sq.exponent - 2.0).abs() < 1e-6);
        let lin = fit_leading_order(|e| Ok(3.0 * e), &grid).unwrap();
        assert!((lin.exponent - 1.0).abs() < 1e-6);
        assert!((lin.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_rejects_bad_samples() {
        assert!(matches!(
            fit_leading_order(|_| Ok(0.0), &[1e-2, 1e-3, 1e-4]),
            Err(Error::CannotFit(_))
        ));
        assert!(fit_leading_order(|e| Ok(e), &[1e-2, 1e-3]).is_err());
    }

    #[test]
    fn exact_vs_first_order_is_second_order() {
        let fit = fit_leading_order(
            |e| {
                let exact = evolve_exact(e, e, space())?.state;
                let pert = evolve_first_order(e, e, space())?;
                exact.distance(&pert)
            },
            &[1e-2, 1e-3, 1e-4],
        )
        .unwrap();
        assert!((fit.exponent - 2.0).abs() < 0.1, "{fit:?}");
    }
}
