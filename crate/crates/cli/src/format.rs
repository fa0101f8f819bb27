//! Number formatting for CSV output.

/// Shortest decimal that parses back to the same `f64`.
///
/// Positional notation between 1e-4 and 1e15, scientific outside it.
pub fn float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for x in [
            0.0,
            -0.0,
            1.0,
            0.1,
            1.0 / 3.0,
            9.656382278761265e-43,
            6.283185307179586,
            1e-4,
            9.999999999999999e-5,
            1e15,
            -2.5e300,
            f64::MIN_POSITIVE,
        ] {
            let s = float(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn notation() {
        assert_eq!(float(0.004), "0.004");
        assert_eq!(float(9.656382278761265e-43), "9.656382278761265e-43");
        assert_eq!(float(1.5e20), "1.5e20");
        assert_eq!(float(0.0), "0");
        assert_eq!(float(10.0), "10");
    }
}
