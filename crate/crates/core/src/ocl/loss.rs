//! Symmetric object-level InfoNCE.
//!
//! For matched instance features `a_i`, `b_i` (same object, two rooms) and
//! the set `F` of every projected feature in the batch:
//!
//! ```text
//! L = -(1/n) Σ_i log( exp(a_i·b_i/τ) / Σ_{f∈F'} exp(a_i·f/τ) )
//!     -(1/n) Σ_i log( exp(b_i·a_i/τ) / Σ_{f∈F'} exp(b_i·f/τ) )
//! ```
//!
//! where `F'` is `F` without the anchor itself when `exclude_self` is set,
//! and all of `F` otherwise.

use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OclConfig {
    pub temperature: f64,
    /// Drop the anchor's own feature from its denominator.
    pub exclude_self: bool,
}

impl Default for OclConfig {
    fn default() -> Self {
        Self {
            temperature: 0.1,
            exclude_self: true,
        }
    }
}

/// Loss plus its gradient with respect to every input vector.
#[derive(Debug, Clone, PartialEq)]
pub struct OclGradient {
    pub loss: f64,
    pub f_a: Vec<Vec<f64>>,
    pub f_b: Vec<Vec<f64>>,
    pub extras: Vec<Vec<f64>>,
}

/// Validates shapes and returns `(n, dim)`.
pub(crate) fn check_inputs(
    f_a: &[Vec<f64>],
    f_b: &[Vec<f64>],
    extras: &[Vec<f64>],
    cfg: &OclConfig,
) -> Result<(usize, usize)> {
    if !(cfg.temperature > 0.0 && cfg.temperature.is_finite()) {
        return Err(Error::invalid(format!(
            "temperature {} must be positive",
            cfg.temperature
        )));
    }
    if f_a.len() != f_b.len() {
        return Err(Error::invalid(format!(
            "{} features in room A but {} in room B",
            f_a.len(),
            f_b.len()
        )));
    }
    let n = f_a.len();
    if n == 0 {
        return Err(Error::invalid("no matched instances"));
    }
    if n < 2 && extras.is_empty() {
        return Err(Error::invalid(
            "one matched instance and no batch extras leaves no negatives",
        ));
    }
    let dim = f_a[0].len();
    if dim == 0 {
        return Err(Error::invalid("features have zero dimensions"));
    }
    for v in f_a.iter().chain(f_b).chain(extras) {
        if v.len() != dim {
            return Err(Error::invalid(format!(
                "feature of length {} among length-{dim} features",
                v.len()
            )));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("non-finite feature value"));
        }
    }
    Ok((n, dim))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Per-anchor softmax over its denominator set.
struct AnchorTerm {
    /// `LSE(logits) - logit(positive)`.
    loss: f64,
    /// Softmax weight for every feature index (0 where excluded).
    weights: Vec<f64>,
}

/// Feature indices in the order an anchor sums its denominator: for each
/// instance `j`, the anchor's own room then the other room, then extras.
/// Both rooms see the same order relative to themselves, which makes the
/// loss exactly symmetric under swapping rooms.
fn denominator_order(n: usize, total: usize, anchor_in_a: bool) -> Vec<usize> {
    let mut order = Vec::with_capacity(total);
    for j in 0..n {
        if anchor_in_a {
            order.extend([j, j + n]);
        } else {
            order.extend([j + n, j]);
        }
    }
    order.extend(2 * n..total);
    order
}

fn anchor_term(
    all: &[&[f64]],
    order: &[usize],
    anchor: usize,
    positive: usize,
    cfg: &OclConfig,
) -> AnchorTerm {
    let inv_t = 1.0 / cfg.temperature;
    let a = all[anchor];
    let mut logits = vec![f64::NEG_INFINITY; all.len()];
    for &k in order {
        if !(cfg.exclude_self && k == anchor) {
            logits[k] = dot(a, all[k]) * inv_t;
        }
    }
    let m = order
        .iter()
        .map(|&k| logits[k])
        .fold(f64::NEG_INFINITY, f64::max);
    let mut weights = vec![0.0; all.len()];
    let mut z = 0.0;
    for &k in order {
        let w = (logits[k] - m).exp();
        weights[k] = w;
        z += w;
    }
    for w in &mut weights {
        *w /= z;
    }
    let lse = m + z.ln();
    AnchorTerm {
        loss: lse - logits[positive],
        weights,
    }
}

fn terms(
    f_a: &[Vec<f64>],
    f_b: &[Vec<f64>],
    extras: &[Vec<f64>],
    cfg: &OclConfig,
) -> Result<(usize, Vec<AnchorTerm>, Vec<Vec<f64>>)> {
    let (n, _) = check_inputs(f_a, f_b, extras, cfg)?;
    let all: Vec<Vec<f64>> = f_a.iter().chain(f_b).chain(extras).cloned().collect();
    let refs: Vec<&[f64]> = all.iter().map(Vec::as_slice).collect();
    let order_a = denominator_order(n, all.len(), true);
    let order_b = denominator_order(n, all.len(), false);
    let anchors: Vec<AnchorTerm> = (0..2 * n)
        .into_par_iter()
        .map(|u| {
            if u < n {
                anchor_term(&refs, &order_a, u, u + n, cfg)
            } else {
                anchor_term(&refs, &order_b, u, u - n, cfg)
            }
        })
        .collect();
    Ok((n, anchors, all))
}

/// Object-level contrastive loss.
///
/// `f_a[i]` and `f_b[i]` must describe the same instance. `extras` are
/// features of other pairs in the batch and act as negatives only.
pub fn ocl_loss(
    f_a: &[Vec<f64>],
    f_b: &[Vec<f64>],
    extras: &[Vec<f64>],
    cfg: &OclConfig,
) -> Result<f64> {
    let (n, anchors, _) = terms(f_a, f_b, extras, cfg)?;
    // fixed order: room A anchors then room B anchors
    let a: f64 = anchors[..n].iter().map(|t| t.loss).sum();
    let b: f64 = anchors[n..].iter().map(|t| t.loss).sum();
    Ok(a / n as f64 + b / n as f64)
}

/// Analytic gradient of [`ocl_loss`] with respect to every input vector.
pub fn ocl_grad(
    f_a: &[Vec<f64>],
    f_b: &[Vec<f64>],
    extras: &[Vec<f64>],
    cfg: &OclConfig,
) -> Result<OclGradient> {
    let (n, anchors, all) = terms(f_a, f_b, extras, cfg)?;
    let dim = all[0].len();
    let scale = 1.0 / (n as f64 * cfg.temperature);
    let mut grad = vec![vec![0.0; dim]; all.len()];

    // term_u = LSE_k(f_u·f_k/τ) - f_u·f_pos/τ
    // d/df_u   = (Σ_k p_k f_k - f_pos)/τ
    // d/df_k  += p_k f_u/τ
    // d/df_pos -= f_u/τ
    for (u, t) in anchors.iter().enumerate() {
        let pos = if u < n { u + n } else { u - n };
        let fu = &all[u];
        for (k, &p) in t.weights.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for d in 0..dim {
                grad[u][d] += scale * p * all[k][d];
                grad[k][d] += scale * p * fu[d];
            }
        }
        for d in 0..dim {
            grad[u][d] -= scale * all[pos][d];
            grad[pos][d] -= scale * fu[d];
        }
    }

    let a: f64 = anchors[..n].iter().map(|t| t.loss).sum();
    let b: f64 = anchors[n..].iter().map(|t| t.loss).sum();
    let extras_grad = grad.split_off(2 * n);
    let fb_grad = grad.split_off(n);
    Ok(OclGradient {
        loss: a / n as f64 + b / n as f64,
        f_a: grad,
        f_b: fb_grad,
        extras: extras_grad,
    })
}

/// Matched features of one pair, `(room A, room B)`.
pub type PairFeatures = (Vec<Vec<f64>>, Vec<Vec<f64>>);

/// Mean loss over a batch of pairs; each pair sees every other pair's
/// features as extra negatives.
pub fn ocl_batch_loss(groups: &[PairFeatures], cfg: &OclConfig) -> Result<f64> {
    if groups.is_empty() {
        return Err(Error::invalid("empty batch"));
    }
    let mut total = 0.0;
    for (g, (fa, fb)) in groups.iter().enumerate() {
        let extras: Vec<Vec<f64>> = groups
            .iter()
            .enumerate()
            .filter(|&(h, _)| h != g)
            .flat_map(|(_, (xa, xb))| xa.iter().chain(xb).cloned())
            .collect();
        total += ocl_loss(fa, fb, &extras, cfg)?;
    }
    Ok(total / groups.len() as f64)
}
