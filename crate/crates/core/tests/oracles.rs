use gravwit_core::bisep::random_pure_product_stream;
use gravwit_core::dynamics::{evolve_exact, fit_leading_order};
use gravwit_core::model::{couplings, PhysicalConstants, SystemParams};
use gravwit_core::witness::{
    analytic_witness, exact_report, first_order_report_physical, linear_coefficients, Bipartition,
    WitnessOperators,
};
use gravwit_core::FockSpace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRID: [f64; 3] = [1e-2, 1e-3, 1e-4];

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn largest_relative_change(e: f64) -> f64 {
    let coarse = FockSpace::new([4, 4, 8]).unwrap();
    let fine = FockSpace::new([4, 4, 16]).unwrap();
    let a = exact_report(e, 0.7 * e, coarse).unwrap();
    let b = exact_report(e, 0.7 * e, fine).unwrap();
    std::iter::once((a.lhs_abs, b.lhs_abs))
        .chain(a.o().into_iter().zip(b.o()))
        .map(|(x, y)| rel(x, y))
        .fold(0.0, f64::max)
}

#[test]
fn oscillator_cutoff_converged() {
    for e in [1e-4, 1e-3] {
        let d = largest_relative_change(e);
        assert!(d < 1e-10, "ε = {e}: {d:e}");
    }
    // truncation error grows like ε⁶: 7.1e-14 at 1e-3, 7.1e-8 here
    let d = largest_relative_change(1e-2);
    assert!(d < 2e-7, "ε = 1e-2: {d:e}");
}

#[test]
fn cauchy_schwarz_on_product_states() {
    let space = FockSpace::default();
    let ops = WitnessOperators::new(space).unwrap();
    for b in Bipartition::ALL {
        for i in 0..1000u64 {
            let psi = random_pure_product_stream(space, b, 42, i);
            let r = ops.report_on_state(&psi).unwrap();
            assert!(r.insep(b) <= 1e-10, "{b} sample {i}: I = {:e}", r.insep(b));
        }
    }
}

#[test]
fn g2_dominates_g1() {
    let space = FockSpace::default();
    for e in [1e-4, 1e-3, 1e-2] {
        let r = exact_report(e, 0.5 * e, space).unwrap();
        assert!(r.g2_value >= r.g1_value);
    }
}

#[test]
fn analytic_equals_first_order_on_random_draws() {
    let k = PhysicalConstants::CODATA_2018;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let wk = 10f64.powf(rng.random_range(0.0..1.0));
        let wm = 10f64.powf(rng.random_range(0.0..1.0));
        let t = rng.random_range(0.1..10.0);
        let theta: f64 = rng.random_range(0.0..std::f64::consts::FRAC_PI_2);
        let p = SystemParams::new(1e-16, wm, wk, t)
            .unwrap()
            .with_polarization(theta.cos(), theta.sin())
            .unwrap();
        let g = analytic_witness(&k, &p).unwrap();
        let fo = first_order_report_physical(&k, &p).unwrap();
        assert!(rel(fo.lhs_abs, g) < 1e-12, "{p:?}");
        assert!(rel(couplings(&k, &p).unwrap().omega * t, g) < 1e-15);
    }
}

#[test]
fn product_bounds_grow_linearly() {
    let space = FockSpace::default();
    for k in 0..3 {
        let fit = fit_leading_order(|e| Ok(exact_report(e, e, space)?.o()[k]), &GRID).unwrap();
        assert!(
            (fit.exponent - 1.0).abs() < 0.1,
            "O{} exponent {}",
            k + 1,
            fit.exponent
        );
    }
}

#[test]
fn modulus_residual_is_third_order() {
    // the ε² part of ⟨A⟩ is real while the leading part is imaginary,
    // so it reaches |⟨A⟩| only at third order
    let space = FockSpace::default();
    let fit = fit_leading_order(
        |e| Ok((exact_report(e, e, space)?.lhs_abs - 4.0 * e).abs()),
        &GRID,
    )
    .unwrap();
    assert!(
        (fit.exponent - 3.0).abs() < 0.1,
        "exponent {}",
        fit.exponent
    );
}

#[test]
fn second_order_coefficients() {
    let r = linear_coefficients(FockSpace::default(), &GRID).unwrap();
    let (s2, s3) = (2f64.sqrt(), 3f64.sqrt());
    assert!(rel(r.g2_value, 4.0 - 2.0 * s3) < 1e-4);
    assert!(rel(r.insep(Bipartition::MRest), 4.0 - 2.0 * s2) < 1e-4);
    assert!(rel(r.insep(Bipartition::G1Rest), 4.0 - 2.0 * s3) < 1e-4);
    assert!(rel(r.insep(Bipartition::G2Rest), 4.0 - 2.0 * s3) < 1e-4);
    assert!(rel(r.g1_value, 4.0 - 4.0 * s3 - 2.0 * s2) < 1e-4);
    assert!(r.certifies_full_inseparability() && r.certifies_genuine());
    assert!(r.g1_value < 0.0);
}

#[test]
fn leakage_reported_for_large_coupling() {
    let space = FockSpace::default();
    let err = evolve_exact(0.3, 0.3, space).unwrap_err();
    assert!(err.to_string().contains("cutoff too small"));
}
