//! Reference evaluations used to cross-check the loss and its gradient.
//!
//! Nothing here shares code with [`super::loss`]: the loss is summed term by
//! term with plain `exp`/`ln` and no max subtraction, and the numeric
//! gradient differentiates that direct evaluation.

use crate::error::Result;
use crate::ocl::loss::{check_inputs, OclConfig, OclGradient};

/// Gradient components smaller than this are compared absolutely.
pub const GRAD_ABS_FLOOR: f64 = 1e-6;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// Direct evaluation of the symmetric loss.
pub fn brute_force_loss(
    f_a: &[Vec<f64>],
    f_b: &[Vec<f64>],
    extras: &[Vec<f64>],
    cfg: &OclConfig,
) -> Result<f64> {
    let (n, _) = check_inputs(f_a, f_b, extras, cfg)?;
    let t = cfg.temperature;
    let mut batch: Vec<(&[f64], usize)> = Vec::new();
    for (i, v) in f_a.iter().enumerate() {
        batch.push((v, i));
    }
    for (i, v) in f_b.iter().enumerate() {
        batch.push((v, n + i));
    }
    for (i, v) in extras.iter().enumerate() {
        batch.push((v, 2 * n + i));
    }

    let term = |anchor: &[f64], anchor_id: usize, positive: &[f64]| -> f64 {
        let num = (dot(anchor, positive) / t).exp();
        let mut den = 0.0;
        for &(f, id) in &batch {
            if cfg.exclude_self && id == anchor_id {
                continue;
            }
            den += (dot(anchor, f) / t).exp();
        }
        -(num / den).ln()
    };

    let mut first = 0.0;
    for i in 0..n {
        first += term(&f_a[i], i, &f_b[i]);
    }
    let mut second = 0.0;
    for i in 0..n {
        second += term(&f_b[i], n + i, &f_a[i]);
    }
    Ok(first / n as f64 + second / n as f64)
}

/// Central finite differences of [`brute_force_loss`] with step `h`.
pub fn numeric_grad(
    f_a: &[Vec<f64>],
    f_b: &[Vec<f64>],
    extras: &[Vec<f64>],
    cfg: &OclConfig,
    h: f64,
) -> Result<OclGradient> {
    let loss = brute_force_loss(f_a, f_b, extras, cfg)?;
    let mut sets = [f_a.to_vec(), f_b.to_vec(), extras.to_vec()];
    let mut grads: [Vec<Vec<f64>>; 3] = Default::default();
    for s in 0..3 {
        for i in 0..sets[s].len() {
            let mut g = vec![0.0; sets[s][i].len()];
            for (d, gd) in g.iter_mut().enumerate() {
                let orig = sets[s][i][d];
                sets[s][i][d] = orig + h;
                let plus = brute_force_loss(&sets[0], &sets[1], &sets[2], cfg)?;
                sets[s][i][d] = orig - h;
                let minus = brute_force_loss(&sets[0], &sets[1], &sets[2], cfg)?;
                sets[s][i][d] = orig;
                *gd = (plus - minus) / (2.0 * h);
            }
            grads[s].push(g);
        }
    }
    let [ga, gb, ge] = grads;
    Ok(OclGradient {
        loss,
        f_a: ga,
        f_b: gb,
        extras: ge,
    })
}

/// Largest `|x - y| / max(|x|, |y|, GRAD_ABS_FLOOR)` over all components.
pub fn max_relative_error(analytic: &OclGradient, numeric: &OclGradient) -> f64 {
    let pairs = [
        (&analytic.f_a, &numeric.f_a),
        (&analytic.f_b, &numeric.f_b),
        (&analytic.extras, &numeric.extras),
    ];
    let mut worst = 0.0f64;
    for (a, b) in pairs {
        for (va, vb) in a.iter().zip(b) {
            for (x, y) in va.iter().zip(vb) {
                let denom = x.abs().max(y.abs()).max(GRAD_ABS_FLOOR);
                worst = worst.max((x - y).abs() / denom);
            }
        }
    }
    worst
}

/// Lower bound on the loss from similarity range alone: every logit gap
/// `(f·g − f·f⁺)/τ` is at least `−2/τ` for unit vectors, so each of the two
/// averaged terms is at least `log(1 + (m − 1)·e^{−2/τ})` where `m` is the
/// denominator size.
pub fn unit_sphere_lower_bound(total_features: usize, cfg: &OclConfig) -> f64 {
    let m = if cfg.exclude_self {
        total_features - 1
    } else {
        total_features
    };
    2.0 * (1.0 + (m as f64 - 1.0) * (-2.0 / cfg.temperature).exp()).ln()
}
