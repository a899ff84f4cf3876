//! Power-law fits `y ≈ C (T - t)^{-p}` with a shared blowup time `T`.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupSample {
    pub t: f64,
    /// `max |∇₊η̇|`
    pub angular: f64,
    /// `max |∇₊²η|`
    pub curvature: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupFit {
    pub t_est: f64,
    pub p_curvature: f64,
    pub p_angular: f64,
    /// RMS residual of `log y` for the curvature and angular fits.
    pub residual_curvature: f64,
    pub residual_angular: f64,
    /// Number of trailing samples used.
    pub window: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[serde(rename_all = "snake_case")]
pub enum FitRejection {
    #[error("fewer than 8 samples")]
    TooFewSamples,
    #[error("trailing samples are not strictly increasing")]
    NonMonotone,
    #[error("best blowup time sits at the search boundary (no finite-time growth)")]
    NoFiniteTime,
    #[error("fitted exponent is not positive")]
    NonPositiveExponent,
}

pub const MIN_WINDOW: usize = 8;

/// Least-squares line `y = slope x + c`; returns `(slope, sum of squared residuals)`.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let ssr = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - my - slope * (a - mx);
            r * r
        })
        .sum();
    (slope, ssr)
}

struct Window {
    t: Vec<f64>,
    log_curv: Vec<f64>,
    log_ang: Vec<f64>,
    var_curv: f64,
    var_ang: f64,
}

impl Window {
    fn fits(&self, t_blow: f64) -> ((f64, f64), (f64, f64)) {
        let x: Vec<f64> = self.t.iter().map(|t| (t_blow - t).ln()).collect();
        (line_fit(&x, &self.log_curv), line_fit(&x, &self.log_ang))
    }

    /// Joint objective: each residual sum scaled by its own spread.
    fn objective(&self, t_blow: f64) -> f64 {
        let ((_, a), (_, b)) = self.fits(t_blow);
        a / self.var_curv + b / self.var_ang
    }
}

fn spread(y: &[f64]) -> f64 {
    let m = y.len() as f64;
    let mean = y.iter().sum::<f64>() / m;
    y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>().max(f64::MIN_POSITIVE)
}

/// Fit both quantities over the trailing quarter of the series (at least 8 samples),
/// jointly in `T`, with per-quantity exponents.
pub fn detect_blowup(series: &[BlowupSample]) -> Result<BlowupFit, FitRejection> {
    if series.len() < MIN_WINDOW {
        return Err(FitRejection::TooFewSamples);
    }
    let window = series.len().div_ceil(4).max(MIN_WINDOW);
    let tail = &series[series.len() - window..];
    let increasing = tail.windows(2).all(|w| {
        w[1].t > w[0].t && w[1].curvature > w[0].curvature && w[1].angular > w[0].angular
    });
    if !increasing || tail.iter().any(|s| !(s.curvature > 0.0 && s.angular > 0.0)) {
        return Err(FitRejection::NonMonotone);
    }
    let log_curv: Vec<f64> = tail.iter().map(|s| s.curvature.ln()).collect();
    let log_ang: Vec<f64> = tail.iter().map(|s| s.angular.ln()).collect();
    let w = Window {
        t: tail.iter().map(|s| s.t).collect(),
        var_curv: spread(&log_curv),
        var_ang: spread(&log_ang),
        log_curv,
        log_ang,
    };
    let t_last = w.t[window - 1];
    let span = t_last - w.t[0];
    // search over u = ln(T - t_last)
    let lo = (1e-9 * span).ln();
    let hi = (1e3 * span).ln();
    let f = |u: f64| w.objective(t_last + u.exp());
    let grid = 400;
    let us: Vec<f64> = (0..=grid).map(|i| lo + (hi - lo) * i as f64 / grid as f64).collect();
    let vals: Vec<f64> = us.iter().map(|&u| f(u)).collect();
    let best = vals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    if best == grid {
        return Err(FitRejection::NoFiniteTime);
    }
    let (mut a, mut b) = (us[best.saturating_sub(1)], us[(best + 1).min(grid)]);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let u = 0.5 * (a + b);
    if (hi - u) < 1e-3 * (hi - lo) {
        return Err(FitRejection::NoFiniteTime);
    }
    let t_est = t_last + u.exp();
    let ((sc, rc), (sa, ra)) = w.fits(t_est);
    let (p_curvature, p_angular) = (-sc, -sa);
    if !(p_curvature > 0.0 && p_angular > 0.0) {
        return Err(FitRejection::NonPositiveExponent);
    }
    Ok(BlowupFit {
        t_est,
        p_curvature,
        p_angular,
        residual_curvature: (rc / window as f64).sqrt(),
        residual_angular: (ra / window as f64).sqrt(),
        window,
    })
}

/// The series up to and including the first maximum of curvature, where
/// a finite chain stops growing because curvature is capped at `2n`.
pub fn growth_phase(series: &[BlowupSample]) -> &[BlowupSample] {
    let peak = series
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.curvature.total_cmp(&b.1.curvature))
        .map(|(i, _)| i)
        .unwrap_or(0);
    &series[..(peak + 1).min(series.len())]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(pc: f64, pa: f64) -> Vec<BlowupSample> {
        (0..=90)
            .map(|i| {
                let t = 0.5 + 0.005 * i as f64;
                BlowupSample {
                    t,
                    angular: (1.0 - t).powf(-pa),
                    curvature: 2.0 * (1.0 - t).powf(-pc),
                }
            })
            .collect()
    }

    #[test]
    fn recovers_power_laws() {
        let fit = detect_blowup(&synthetic(1.5, 1.0)).unwrap();
        assert!((fit.t_est - 1.0).abs() < 1e-6, "{fit:?}");
        assert!((fit.p_curvature - 1.5).abs() < 1e-6);
        assert!((fit.p_angular - 1.0).abs() < 1e-6);
    }

    #[test]
    fn bounded_series_rejected() {
        let s: Vec<BlowupSample> = (0..40)
            .map(|i| {
                let t = i as f64 * 0.1;
                BlowupSample {
                    t,
                    angular: 2.0 - (-t).exp(),
                    curvature: 3.0 - (-t).exp(),
                }
            })
            .collect();
        assert!(detect_blowup(&s).is_err());
    }

    #[test]
    fn non_monotone_rejected() {
        let mut s = synthetic(1.0, 1.0);
        let k = s.len() - 3;
        s[k].curvature = 1e9;
        assert_eq!(detect_blowup(&s), Err(FitRejection::NonMonotone));
        assert_eq!(detect_blowup(&s[..5]), Err(FitRejection::TooFewSamples));
    }
}
