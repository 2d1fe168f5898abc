//! Least-squares fit of the compressed-exponential PDR curve
//! `pdr = exp(−(1/(γ·a_c))^b_c)` to measured `(γ, pdr)` samples.
//!
//! The curve is linear in log-log space, `ln(−ln pdr) = −b_c·ln γ − b_c·ln a_c`,
//! which gives the starting point. Levenberg–Marquardt then minimizes the sum
//! of squared residuals in PDR space.

use std::io::BufRead;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdrFit {
    pub a_c: f64,
    pub b_c: f64,
    /// Sum of squared PDR residuals at the optimum.
    pub sse: f64,
    pub iterations: usize,
}

fn model(gamma: f64, a_c: f64, b_c: f64) -> f64 {
    (-(1.0 / (gamma * a_c)).powf(b_c)).exp()
}

fn sse(samples: &[(f64, f64)], a_c: f64, b_c: f64) -> f64 {
    samples
        .iter()
        .map(|&(g, y)| (y - model(g, a_c, b_c)).powi(2))
        .sum()
}

fn validate(samples: &[(f64, f64)]) -> Result<()> {
    if samples.len() < 2 {
        return Err(Error::Fit(format!("need at least 2 samples, got {}", samples.len())));
    }
    for &(g, p) in samples {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::Fit(format!("SINR must be positive and finite, got {g}")));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Fit(format!("PDR must lie in (0, 1), got {p}")));
        }
    }
    let first = samples[0].0;
    if samples.iter().all(|&(g, _)| g == first) {
        return Err(Error::Fit("all samples share the same SINR".into()));
    }
    Ok(())
}

/// Ordinary least squares on the log-log linearization.
fn linearized_start(samples: &[(f64, f64)]) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|&(g, p)| (g.ln(), (-p.ln()).ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let b_c = -slope;
    if !(b_c > 0.0 && b_c.is_finite()) {
        return Err(Error::Fit(format!(
            "samples do not describe an increasing PDR curve (slope {slope})"
        )));
    }
    Ok(((-intercept / b_c).exp(), b_c))
}

pub fn fit_pdr_params(samples: &[(f64, f64)]) -> Result<PdrFit> {
    validate(samples)?;
    let (mut a_c, mut b_c) = linearized_start(samples)?;
    let mut cost = sse(samples, a_c, b_c);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    while iterations < 500 {
        iterations += 1;
        // Normal equations of the 2-parameter problem.
        let (mut jtj, mut jtr) = ([[0.0; 2]; 2], [0.0; 2]);
        for &(g, y) in samples {
            let ln_ga = g.ln() + a_c.ln();
            let eu = (-b_c * ln_ga).exp();
            let f = (-eu).exp();
            let j = [eu * f * b_c / a_c, eu * f * ln_ga];
            let r = y - f;
            for a in 0..2 {
                jtr[a] += j[a] * r;
                for b in 0..2 {
                    jtj[a][b] += j[a] * j[b];
                }
            }
        }
        let mut improved = false;
        while lambda < 1e30 {
            let m00 = jtj[0][0] * (1.0 + lambda);
            let m11 = jtj[1][1] * (1.0 + lambda);
            let det = m00 * m11 - jtj[0][1] * jtj[1][0];
            if det == 0.0 || !det.is_finite() {
                lambda *= 10.0;
                continue;
            }
            let da = (m11 * jtr[0] - jtj[0][1] * jtr[1]) / det;
            let db = (m00 * jtr[1] - jtj[1][0] * jtr[0]) / det;
            let (na, nb) = (a_c + da, b_c + db);
            if na > 0.0 && nb > 0.0 {
                let new_cost = sse(samples, na, nb);
                if new_cost <= cost {
                    let small = da.abs() <= 1e-15 * a_c && db.abs() <= 1e-15 * b_c;
                    a_c = na;
                    b_c = nb;
                    cost = new_cost;
                    lambda = (lambda / 10.0).max(1e-12);
                    improved = !small;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    Ok(PdrFit {
        a_c,
        b_c,
        sse: cost,
        iterations,
    })
}

/// Reads `sinr,pdr` rows (header optional, `#` comments allowed).
pub fn read_samples_csv<R: BufRead>(reader: R) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Fit(format!("read failed: {e}")))?;
        let text = line.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let mut cols = text.split(',').map(str::trim);
        let (Some(a), Some(b), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(Error::Parse {
                line: idx + 1,
                detail: "expected two columns `sinr,pdr`".into(),
            });
        };
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(g), Ok(p)) => out.push((g, p)),
            _ if idx == 0 => continue,
            _ => {
                return Err(Error::Parse {
                    line: idx + 1,
                    detail: format!("`{text}` is not a pair of numbers"),
                })
            }
        }
    }
    Ok(out)
}
