use crate::error::{Error, Result};

/// Iterated logarithm L_i(x): L_1 = log x, L_i = log L_{i-1}. Errors when
/// the value is not defined and positive.
pub fn iterated_log(x: f64, i: u32) -> Result<f64> {
    if i == 0 {
        return Err(Error::usage("iterated_log requires i >= 1"));
    }
    let mut v = x;
    for _ in 0..i {
        if v <= 0.0 || !v.is_finite() {
            return Err(Error::usage(format!("L_{i}({x}) is undefined")));
        }
        v = v.ln();
    }
    if v <= 0.0 || !v.is_finite() {
        return Err(Error::usage(format!("L_{i}({x}) = {v} is not positive")));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::iterated_log;

    #[test]
    fn examples() {
        let e_to_e = std::f64::consts::E.exp();
        assert!((iterated_log(e_to_e, 2).unwrap() - 1.0).abs() < 1e-12);
        // frozen from direct evaluation: ln ln ln 1e5
        assert!((iterated_log(1e5, 3).unwrap() - 0.893_419_3).abs() < 1e-6);
        assert!(iterated_log(10.0, 3).is_err());
        assert!(iterated_log(1.0, 1).is_err()); // L_1(1) = 0 not positive
    }
}
