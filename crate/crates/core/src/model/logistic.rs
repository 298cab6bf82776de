//! Standard logistic distribution, evaluated without overflow.

use rand::Rng;

/// CDF `F(x) = 1 / (1 + e^{-x})`.
#[inline]
pub fn cdf(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Survival `1 - F(x)`, accurate in the upper tail.
#[inline]
pub fn sf(x: f64) -> f64 {
    cdf(-x)
}

/// Density `f(x) = F(x)(1 - F(x))`.
#[inline]
pub fn pdf(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    e / ((1.0 + e) * (1.0 + e))
}

/// `log(1 + e^x)`.
#[inline]
pub fn log1p_exp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `log F(x)`.
#[inline]
pub fn log_cdf(x: f64) -> f64 {
    -log1p_exp(-x)
}

/// Inverse CDF.
#[inline]
pub fn quantile(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// One standard logistic draw by inversion.
pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let p: f64 = rng.random();
        if p > 0.0 {
            return quantile(p);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn cdf_values() {
        assert_eq!(cdf(0.0), 0.5);
        assert!((cdf(2.2) - 0.9002495108803148).abs() < 1e-15);
        assert_eq!(cdf(-800.0), 0.0);
        assert_eq!(cdf(800.0), 1.0);
        assert!(sf(40.0) > 0.0);
    }

    #[test]
    fn density_identity() {
        for &x in &[-30.0, -3.1, -0.2, 0.0, 0.7, 5.5, 33.0] {
            let f = cdf(x);
            assert!((pdf(x) - f * (1.0 - f)).abs() < 1e-16);
        }
    }

    #[test]
    fn log1p_exp_is_stable() {
        assert_eq!(log1p_exp(1000.0), 1000.0);
        assert_eq!(log1p_exp(-1000.0), 0.0);
        assert!((log1p_exp(0.0) - 2f64.ln()).abs() < 1e-15);
        assert!((log_cdf(2.2) - cdf(2.2).ln()).abs() < 1e-15);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for &p in &[1e-9, 0.1, 0.5, 0.77, 1.0 - 1e-9] {
            assert!((cdf(quantile(p)) - p).abs() < 1e-12);
        }
    }

    #[test]
    fn sample_mean_and_variance() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| sample(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        let pi2_3 = std::f64::consts::PI.powi(2) / 3.0;
        assert!(mean.abs() < 0.03);
        assert!((var - pi2_3).abs() < 0.05);
    }
}
