//! Convergence-order fits and Richardson extrapolation.

use serde::Serialize;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct OrderFit {
    /// Fitted exponent `p` in `y ≈ C x^p`.
    pub order: f64,
    /// Fitted `log C`.
    pub log_c: f64,
    /// Root-mean-square residual of the log-log fit.
    pub rms_residual: f64,
    pub points: usize,
}

/// Least-squares fit of `log |y| = log C + p log x`.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> OrderFit {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2);
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().max(1e-300).ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let order = sxy / sxx;
    let log_c = my - order * mx;
    let rms = (lx
        .iter()
        .zip(&ly)
        .map(|(a, b)| (b - log_c - order * a).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    OrderFit { order, log_c, rms_residual: rms, points: x.len() }
}

/// Extrapolates `f(h) = f₀ + c h^p + …` from values at `h` and `h/2`.
pub fn richardson(f_h: f64, f_h2: f64, p: f64) -> f64 {
    let r = 2f64.powf(p);
    (r * f_h2 - f_h) / (r - 1.0)
}

/// Fits `y = a + b x^p` by least squares and returns `a`.
pub fn extrapolate_power(x: &[f64], y: &[f64], p: f64) -> f64 {
    let t: Vec<f64> = x.iter().map(|v| v.powf(p)).collect();
    let n = t.len() as f64;
    let mt = t.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let stt: f64 = t.iter().map(|a| (a - mt).powi(2)).sum();
    let sty: f64 = t.iter().zip(y).map(|(a, b)| (a - mt) * (b - my)).sum();
    my - sty / stt * mt
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_power_law() {
        let x = [0.1, 0.05, 0.025];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(2.5)).collect();
        let f = loglog_fit(&x, &y);
        assert!((f.order - 2.5).abs() < 1e-12);
        assert!(f.rms_residual < 1e-12);
    }

    #[test]
    fn richardson_cancels_leading_term() {
        let f = |h: f64| 1.0 + 2.0 * h * h + h.powi(4);
        let e = richardson(f(0.1), f(0.05), 2.0);
        assert!((e - 1.0).abs() < 1e-4);
        let a = extrapolate_power(&[0.2, 0.1, 0.05], &[f(0.2), f(0.1), f(0.05)], 2.0);
        assert!((a - 1.0).abs() < 2e-3);
    }
}
