/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials` at the 95% level.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = Z95 * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).clamp(0.0, phat), (center + half).clamp(phat, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brackets_the_point_estimate() {
        for (k, n) in [(0, 10), (10, 10), (3, 10), (1, 100_000), (50_000, 100_000)] {
            let (lo, hi) = wilson_interval(k, n);
            let phat = k as f64 / n as f64;
            assert!(0.0 <= lo && lo <= phat && phat <= hi && hi <= 1.0);
        }
    }

    #[test]
    fn known_value() {
        // 5 of 10: 0.5 +- 0.2634...
        let (lo, hi) = wilson_interval(5, 10);
        assert!((lo - 0.236_593_090).abs() < 1e-8);
        assert!((hi - 0.763_406_910).abs() < 1e-8);
        let (lo0, hi0) = wilson_interval(0, 20);
        assert_eq!(lo0, 0.0);
        assert!((hi0 - 0.161_125_1).abs() < 1e-6);
    }
}
