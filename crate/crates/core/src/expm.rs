//! Matrix exponential by scaling and squaring with a truncated Taylor series.
//!
//! The argument is scaled by `2^-s` until its 1-norm is at most 0.5, the
//! series is summed until a term's 1-norm drops below 1e-16, and the result
//! is squared `s` times.

use ndarray::Array2;
use num_complex::Complex64;

use crate::fock::Operator;

pub const SCALED_NORM_TARGET: f64 = 0.5;
pub const TERM_CUTOFF: f64 = 1e-16;
const MAX_TERMS: usize = 64;

fn one_norm(m: &Array2<Complex64>) -> f64 {
    m.columns()
        .into_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn expm_matrix(a: &Array2<Complex64>) -> Array2<Complex64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    let norm = one_norm(a);
    let squarings = if norm > SCALED_NORM_TARGET {
        (norm / SCALED_NORM_TARGET).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.mapv(|z| z / 2f64.powi(squarings));

    let mut result = Array2::<Complex64>::eye(n);
    let mut term = Array2::<Complex64>::eye(n);
    for k in 1..=MAX_TERMS {
        term = term.dot(&scaled).mapv(|z| z / k as f64);
        result += &term;
        if one_norm(&term) < TERM_CUTOFF {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}

pub fn expm(op: &Operator) -> Operator {
    Operator::from_matrix(op.space(), expm_matrix(op.matrix())).expect("shape preserved")
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_gives_identity() {
        let z = Array2::<Complex64>::zeros((3, 3));
        assert_eq!(expm_matrix(&z), Array2::eye(3));
    }

    #[test]
    fn diagonal_phases() {
        let a = array![[c(0.0, 2.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.5, 0.0)]];
        let e = expm_matrix(&a);
        assert!((e[[0, 0]] - c(0.0, 2.0).exp()).norm() < 1e-14);
        assert!((e[[1, 1]] - c(-1.5, 0.0).exp()).norm() < 1e-14);
        assert!(e[[0, 1]].norm() < 1e-15);
    }

    #[test]
    fn rotation_generator() {
        // exp(θ [[0, -1], [1, 0]]) is a rotation by θ; large θ exercises squaring
        let theta = 7.3;
        let a = array![[c(0.0, 0.0), c(-theta, 0.0)], [c(theta, 0.0), c(0.0, 0.0)]];
        let e = expm_matrix(&a);
        assert!((e[[0, 0]].re - theta.cos()).abs() < 1e-12);
        assert!((e[[1, 0]].re - theta.sin()).abs() < 1e-12);
    }

    #[test]
    fn nilpotent_series_is_exact() {
        let a = array![[c(0.0, 0.0), c(3.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
        let e = expm_matrix(&a);
        assert_eq!(
            e,
            array![[c(1.0, 0.0), c(3.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]
        );
    }
}
