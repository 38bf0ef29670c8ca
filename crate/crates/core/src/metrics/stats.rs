use serde::{Deserialize, Serialize};

use super::MetricsError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorSummary {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n − 1); 0 for a single value.
    pub std: f64,
    pub rmse: f64,
}

pub fn summarize(values: &[f64]) -> Result<ErrorSummary, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let rmse = (values.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
    Ok(ErrorSummary { n: values.len(), mean, std, rmse })
}

const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(x) for x > 0 (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + 7.5;
    let a = LANCZOS[1..].iter().enumerate().fold(LANCZOS[0], |acc, (i, c)| acc + c / (x + i as f64 + 1.0));
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

fn t_log_norm(nu: f64) -> f64 {
    ln_gamma((nu + 1.0) / 2.0) - ln_gamma(nu / 2.0) - 0.5 * (nu * std::f64::consts::PI).ln()
}

pub fn student_t_pdf(s: f64, nu: f64) -> f64 {
    (t_log_norm(nu) - (nu + 1.0) / 2.0 * (s * s / nu).ln_1p()).exp()
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

#[allow(clippy::too_many_arguments)]
fn adapt(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64, m: f64, fm: f64, whole: f64, eps: f64, depth: u32) -> f64 {
    let (lm, flm, left) = simpson(f, a, fa, m, fm);
    let (rm, frm, right) = simpson(f, m, fm, b, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    adapt(f, a, fa, m, fm, lm, flm, left, eps / 2.0, depth - 1) + adapt(f, m, fm, b, fb, rm, frm, right, eps / 2.0, depth - 1)
}

/// Adaptive Simpson to relative tolerance `rel` of the integral.
fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel: f64) -> f64 {
    const PANELS: usize = 32;
    let h = (b - a) / PANELS as f64;
    let panels: Vec<(f64, f64, f64, f64, f64, f64, f64)> = (0..PANELS)
        .map(|i| {
            let (x0, x1) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (f0, f1) = (f(x0), f(x1));
            let (m, fm, s) = simpson(&f, x0, f0, x1, f1);
            (x0, f0, x1, f1, m, fm, s)
        })
        .collect();
    let coarse: f64 = panels.iter().map(|p| p.6).sum();
    let eps = rel * coarse.abs().max(f64::MIN_POSITIVE) / PANELS as f64;
    panels.iter().map(|&(x0, f0, x1, f1, m, fm, s)| adapt(&f, x0, f0, x1, f1, m, fm, s, eps, 50)).sum()
}

/// Two-sided tail probability P(|T| ≥ |t|) for Student's t with `nu`
/// degrees of freedom, by numeric integration of the density.
pub fn student_t_two_sided_p(t: f64, nu: f64) -> f64 {
    let a = t.abs();
    if a < 2.0 {
        let body = integrate(|s| student_t_pdf(s, nu), 0.0, a, 1e-10);
        return (1.0 - 2.0 * body).clamp(0.0, 1.0);
    }
    // Tail with s = a/u, u in (0, 1].
    let c = t_log_norm(nu).exp();
    let g = |u: f64| {
        if u == 0.0 {
            // Density ~ c·ν^((ν+1)/2)·s^-(ν+1); the transformed integrand
            // vanishes for ν > 1 and tends to c·ν/a at ν = 1.
            return if nu > 1.0 { 0.0 } else { c * nu.powf((nu + 1.0) / 2.0) / a };
        }
        let s = a / u;
        student_t_pdf(s, nu) * a / (u * u)
    };
    (2.0 * integrate(g, 0.0, 1.0, 1e-8)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    /// Welch–Satterthwaite degrees of freedom.
    pub dof: f64,
    /// Two-sided.
    pub p: f64,
}

/// Welch's unequal-variance two-sample t-test.
pub fn two_sample_t_test(x: &[f64], y: &[f64]) -> Result<TTest, MetricsError> {
    if x.len() < 2 || y.len() < 2 {
        return Err(MetricsError::DegenerateSamples);
    }
    let (sx, sy) = (summarize(x)?, summarize(y)?);
    let (vx, vy) = (sx.std * sx.std / x.len() as f64, sy.std * sy.std / y.len() as f64);
    if vx == 0.0 || vy == 0.0 {
        return Err(MetricsError::DegenerateSamples);
    }
    let se2 = vx + vy;
    let t = (sx.mean - sy.mean) / se2.sqrt();
    let dof = se2 * se2 / (vx * vx / (x.len() - 1) as f64 + vy * vy / (y.len() - 1) as f64);
    Ok(TTest { t, dof, p: student_t_two_sided_p(t, dof) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_examples() {
        let s = summarize(&[3.0, 4.0]).unwrap();
        assert_eq!(s.mean, 3.5);
        assert!((s.std - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((s.rmse - 12.5f64.sqrt()).abs() < 1e-15);
        let c = summarize(&[-2.5; 7]).unwrap();
        assert_eq!((c.mean, c.std, c.rmse), (-2.5, 0.0, 2.5));
        assert_eq!(summarize(&[]).unwrap_err(), MetricsError::EmptyInput);
    }

    #[test]
    fn gamma_values() {
        assert!(ln_gamma(1.0).abs() < 1e-14);
        assert!(ln_gamma(2.0).abs() < 1e-14);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-13);
        assert!((ln_gamma(10.0) - 362_880f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn cauchy_tail_closed_form() {
        // ν = 1 is Cauchy: P(|T| ≥ t) = 1 − 2·atan(t)/π.
        for t in [0.3f64, 1.0, 2.5, 40.0] {
            let want = 1.0 - 2.0 * f64::atan(t) / std::f64::consts::PI;
            assert!((student_t_two_sided_p(t, 1.0) - want).abs() < 1e-9 * want.max(1e-3), "{t}");
        }
        // ν = 2: P(|T| ≥ t) = 1 − t/sqrt(t² + 2).
        for t in [0.5f64, 3.0, 100.0] {
            let want = 1.0 - t / (t * t + 2.0).sqrt();
            assert!(((student_t_two_sided_p(t, 2.0) - want) / want).abs() < 1e-7, "{t}");
        }
    }

    #[test]
    fn welch_examples() {
        let x = [1.0, 2.0, 4.0, 7.0, 3.5];
        let r = two_sample_t_test(&x, &x).unwrap();
        assert_eq!((r.t, r.p), (0.0, 1.0));
        assert_eq!(two_sample_t_test(&[1.0, 1.0], &x).unwrap_err(), MetricsError::DegenerateSamples);
        assert_eq!(two_sample_t_test(&[1.0], &x).unwrap_err(), MetricsError::DegenerateSamples);
    }
}
