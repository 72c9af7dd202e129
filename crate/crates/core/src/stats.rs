//! Summary statistics for Monte Carlo comparisons.

use serde::Serialize;

/// Two-sided standard normal quantile for a 99% interval.
pub const Z99: f64 = 2.575_829_303_548_901;

/// Sample mean with its standard error and a symmetric confidence interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanCi {
    pub mean: f64,
    pub std_err: f64,
    /// Half width of the interval, `z * std_err`.
    pub half_width: f64,
    pub n: usize,
}

impl MeanCi {
    pub fn from_samples(samples: &[f64], z: f64) -> Self {
        let n = samples.len();
        if n == 0 {
            return Self { mean: f64::NAN, std_err: f64::NAN, half_width: f64::NAN, n };
        }
        // Fixed left-to-right order keeps results bit-reproducible.
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = if n > 1 { samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
        let std_err = (var / n as f64).sqrt();
        Self { mean, std_err, half_width: z * std_err, n }
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower() <= x && x <= self.upper()
    }

    /// Sign of the mean when the interval excludes zero.
    pub fn resolved_sign(&self) -> Option<f64> {
        if self.lower() > 0.0 {
            Some(1.0)
        } else if self.upper() < 0.0 {
            Some(-1.0)
        } else {
            None
        }
    }

    /// |mean - x| in units of standard error.
    pub fn z_score(&self, x: f64) -> f64 {
        if self.std_err == 0.0 {
            if self.mean == x {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - x).abs() / self.std_err
        }
    }
}

/// Ordinary least squares fit `y = intercept + slope * x`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

/// Element-wise mean of equally long series.
pub fn mean_series(series: &[Vec<f64>]) -> Vec<f64> {
    let Some(first) = series.first() else {
        return Vec::new();
    };
    let mut out = vec![0.0; first.len()];
    for s in series {
        for (o, v) in out.iter_mut().zip(s) {
            *o += v;
        }
    }
    let n = series.len() as f64;
    out.iter_mut().for_each(|o| *o /= n);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_ci_of_constant_samples() {
        let ci = MeanCi::from_samples(&[2.0; 10], Z99);
        assert_eq!(ci.mean, 2.0);
        assert_eq!(ci.half_width, 0.0);
        assert!(ci.contains(2.0));
        assert_eq!(ci.resolved_sign(), Some(1.0));
    }

    #[test]
    fn linear_fit_recovers_line() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 0.5 * x).collect();
        let (a, b) = linear_fit(&xs, &ys);
        assert!((a - 3.0).abs() < 1e-12 && (b + 0.5).abs() < 1e-12);
    }
}
