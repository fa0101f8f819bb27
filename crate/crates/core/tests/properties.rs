//! Randomized invariants over operators, the DSL and the physical model.

use gravwit_core::model::{
    coupling, omega_m_from_zpf, rate_omega, zpf, PhysicalConstants, SystemParams,
};
use gravwit_core::opdsl;
use gravwit_core::{FockSpace, Mode, Normalization, Operator, StateVector};
use ndarray::Array1;
use num_complex::Complex64;
use proptest::prelude::*;

fn small_space() -> FockSpace {
    FockSpace::new([3, 3, 4]).unwrap()
}

fn state_from(space: FockSpace, parts: &[(f64, f64)]) -> StateVector {
    let amp: Array1<Complex64> = parts
        .iter()
        .map(|&(re, im)| Complex64::new(re, im))
        .collect();
    StateVector::from_amplitudes(space, amp, Normalization::Unnormalized).unwrap()
}

fn mode_strategy() -> impl Strategy<Value = Mode> {
    prop_oneof![Just(Mode::G1), Just(Mode::G2), Just(Mode::M)]
}

/// Short random expressions drawn from the grammar.
fn expr_text() -> impl Strategy<Value = String> {
    let atom = prop_oneof![
        Just("g1".to_string()),
        Just("g1'".to_string()),
        Just("g2".to_string()),
        Just("g2'".to_string()),
        Just("b".to_string()),
        Just("b'".to_string()),
        (-3i32..4).prop_map(|k| format!("({k})")),
        Just("0.5i".to_string()),
    ];
    atom.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} + {b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}*{b}")),
            (inner.clone(), 0u32..3).prop_map(|(a, k)| format!("({a})^{k}")),
            inner.prop_map(|a| format!("-({a})")),
        ]
    })
}

proptest! {
    #[test]
    fn index_round_trip(c in prop::array::uniform3(1usize..6), raw in 0usize..10_000) {
        let s = FockSpace::new(c).unwrap();
        let idx = raw % s.dim();
        let occ = s.occupations(idx);
        prop_assert_eq!(s.index(occ), Some(idx));
        for m in Mode::ALL {
            prop_assert!(occ[m.position()] < s.cutoff(m));
        }
    }

    #[test]
    fn adjoint_reverses_products(m1 in mode_strategy(), m2 in mode_strategy(), d1: bool, d2: bool) {
        let s = small_space();
        let pick = |m, d| if d { Operator::creator(s, m) } else { Operator::annihilator(s, m) };
        let (a, b) = (pick(m1, d1), pick(m2, d2));
        let lhs = a.dot(&b).unwrap().adjoint();
        let rhs = b.adjoint().dot(&a.adjoint()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-14);
    }

    #[test]
    fn gram_expectations_nonnegative(
        parts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 36),
        text in expr_text(),
    ) {
        let s = small_space();
        let psi = state_from(s, &parts);
        let m = opdsl::operator(&text, s).unwrap();
        let mm = m.adjoint().dot(&m).unwrap();
        let v = mm.expect(&psi).unwrap();
        prop_assert!(v.re >= -1e-12 * (1.0 + m.max_abs().powi(2)));
        prop_assert!((v.re - m.expect_gram(&psi).unwrap()).abs() <= 1e-9 * (1.0 + v.re.abs()));
    }

    #[test]
    fn display_reparses_to_same_operator(text in expr_text()) {
        let s = small_space();
        let expr = opdsl::parse(&text).unwrap();
        let again = opdsl::parse(&expr.to_string()).unwrap();
        let a = opdsl::evaluate(&expr, s).unwrap();
        let b = opdsl::evaluate(&again, s).unwrap();
        prop_assert!(a.max_abs_diff(&b).unwrap() <= 1e-12 * (1.0 + a.max_abs()));
    }

    #[test]
    fn textual_adjoint_matches_matrix_adjoint(text in expr_text()) {
        let s = small_space();
        let expr = opdsl::parse(&text).unwrap();
        let direct = opdsl::evaluate(&expr, s).unwrap().adjoint();
        let via_text = opdsl::evaluate(&expr.adjoint(), s).unwrap();
        prop_assert!(direct.max_abs_diff(&via_text).unwrap() <= 1e-12 * (1.0 + direct.max_abs()));
    }

    #[test]
    fn parser_never_panics(text in "[gb12'†*^+()\\-−i0-9. e]{0,24}") {
        let _ = opdsl::parse(&text);
    }

    #[test]
    fn omega_is_twice_coupling_sum(
        lw_k in -1.0f64..2.0,
        lw_m in -1.0f64..2.0,
        theta in 0.0f64..std::f64::consts::TAU,
    ) {
        let k = PhysicalConstants::CODATA_2018;
        let p = SystemParams::new(1e-16, 10f64.powf(lw_m), 10f64.powf(lw_k), 1.0)
            .unwrap()
            .with_polarization(theta.cos(), theta.sin())
            .unwrap();
        let (c1, c2) = coupling(&k, &p).unwrap();
        let omega = rate_omega(&k, &p).unwrap();
        let expected = 2.0 * (c1 + c2).abs() / k.hbar;
        prop_assert!((omega - expected).abs() <= 1e-12 * expected.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn zpf_round_trip(lmu in -20.0f64..-10.0, lw in -2.0f64..3.0) {
        let k = PhysicalConstants::CODATA_2018;
        let (mu, w) = (10f64.powf(lmu), 10f64.powf(lw));
        let d = zpf(&k, mu, w).unwrap();
        let back = omega_m_from_zpf(&k, mu, d).unwrap();
        prop_assert!((back - w).abs() <= 1e-12 * w);
    }
}
