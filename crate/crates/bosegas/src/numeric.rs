//! Small numerically-stable helpers shared across modules.

/// ln(1 - e^(-x)) for x > 0, accurate for both tiny and large x.
pub(crate) fn ln_one_minus_exp_neg(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x > std::f64::consts::LN_2 {
        (-(-x).exp()).ln_1p()
    } else {
        (-(-x).exp_m1()).ln()
    }
}

/// Bose occupation 1/(e^x - 1) for x > 0.
pub(crate) fn bose_occupation(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    1.0 / x.exp_m1()
}

/// e^x / (e^x - 1)^2 for x > 0 (the mu-derivative of the Bose occupation, up to beta).
pub(crate) fn bose_variance_factor(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let q = x.exp_m1();
    (q + 1.0) / (q * q)
}

/// Least-squares slope of y against x.
pub fn linear_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2);
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln1mexp_matches_naive_midrange() {
        for &x in &[0.3, 0.7, 1.5, 5.0, 20.0] {
            let naive = (1.0 - (-x as f64).exp()).ln();
            assert!((ln_one_minus_exp_neg(x) - naive).abs() < 1e-12);
        }
    }

    #[test]
    fn ln1mexp_small_argument() {
        // ln(1 - e^(-x)) ~ ln(x) - x/2 for small x
        let x: f64 = 1e-9;
        let expect = x.ln() - x / 2.0;
        assert!((ln_one_minus_exp_neg(x) - expect).abs() < 1e-12);
    }

    #[test]
    fn slope_of_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [0.5, 2.5, 4.5, 6.5];
        assert!((linear_slope(&xs, &ys) - 2.0).abs() < 1e-12);
    }
}
