//! Self-check of the loss on concrete features against the reference
//! evaluations in [`super::oracle`].

use std::fmt::Write as _;

use crate::error::Result;
use crate::ocl::loss::{ocl_grad, ocl_loss, OclConfig};
use crate::ocl::oracle::{
    brute_force_loss, max_relative_error, numeric_grad, unit_sphere_lower_bound,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossCheckTolerances {
    /// Allowed `|fast − direct| / max(1, |direct|)`.
    pub brute_force: f64,
    pub grad_rel: f64,
    pub fd_step: f64,
    pub permutation: f64,
}

impl Default for LossCheckTolerances {
    fn default() -> Self {
        Self {
            brute_force: 1e-12,
            grad_rel: 1e-4,
            fd_step: 1e-4,
            permutation: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossCheckReport {
    pub instances: usize,
    pub cfg: OclConfig,
    pub loss: f64,
    pub brute_force_loss: f64,
    pub brute_force_err: f64,
    pub grad_check_rel_err: f64,
    pub swap_err: f64,
    pub permutation_err: f64,
    pub lower_bound: f64,
    pub failures: Vec<String>,
}

impl LossCheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("instances", self.instances.to_string());
        kv("tau", self.cfg.temperature.to_string());
        kv("exclude_self", self.cfg.exclude_self.to_string());
        kv("loss", format!("{:.15e}", self.loss));
        kv(
            "brute_force_loss",
            format!("{:.15e}", self.brute_force_loss),
        );
        kv("brute_force_err", format!("{:.3e}", self.brute_force_err));
        kv(
            "grad_check_rel_err",
            format!("{:.3e}", self.grad_check_rel_err),
        );
        kv("swap_err", format!("{:.3e}", self.swap_err));
        kv("permutation_err", format!("{:.3e}", self.permutation_err));
        kv("lower_bound", format!("{:.15e}", self.lower_bound));
        for f in &self.failures {
            kv("failure", f.clone());
        }
        kv("status", if self.passed() { "ok" } else { "fail" }.into());
        s
    }
}

/// Evaluates the loss on `(f_a, f_b)` and compares it against the direct
/// evaluation, central differences, room swap, reversed instance order and
/// the unit-sphere lower bound.
pub fn loss_check(
    f_a: &[Vec<f64>],
    f_b: &[Vec<f64>],
    cfg: &OclConfig,
    tol: &LossCheckTolerances,
) -> Result<LossCheckReport> {
    let loss = ocl_loss(f_a, f_b, &[], cfg)?;
    let direct = brute_force_loss(f_a, f_b, &[], cfg)?;
    let brute_force_err = (loss - direct).abs() / direct.abs().max(1.0);

    let analytic = ocl_grad(f_a, f_b, &[], cfg)?;
    let numeric = numeric_grad(f_a, f_b, &[], cfg, tol.fd_step)?;
    let grad_check_rel_err = max_relative_error(&analytic, &numeric);

    let swap_err = (ocl_loss(f_b, f_a, &[], cfg)? - loss).abs();
    let rev_a: Vec<Vec<f64>> = f_a.iter().rev().cloned().collect();
    let rev_b: Vec<Vec<f64>> = f_b.iter().rev().cloned().collect();
    let permutation_err = (ocl_loss(&rev_a, &rev_b, &[], cfg)? - loss).abs();
    let lower_bound = unit_sphere_lower_bound(2 * f_a.len(), cfg);

    let mut failures = Vec::new();
    if !(brute_force_err <= tol.brute_force) {
        failures.push(format!(
            "brute_force_err {brute_force_err:e} > {:e}",
            tol.brute_force
        ));
    }
    if !(grad_check_rel_err < tol.grad_rel) {
        failures.push(format!(
            "grad_check_rel_err {grad_check_rel_err:e} >= {:e}",
            tol.grad_rel
        ));
    }
    if swap_err != 0.0 {
        failures.push(format!("swap_err {swap_err:e} != 0"));
    }
    if !(permutation_err < tol.permutation) {
        failures.push(format!(
            "permutation_err {permutation_err:e} >= {:e}",
            tol.permutation
        ));
    }
    if !(loss >= lower_bound) {
        failures.push(format!("loss {loss} below lower bound {lower_bound}"));
    }
    Ok(LossCheckReport {
        instances: f_a.len(),
        cfg: *cfg,
        loss,
        brute_force_loss: direct,
        brute_force_err,
        grad_check_rel_err,
        swap_err,
        permutation_err,
        lower_bound,
        failures,
    })
}
