//! Discrete gradient, total variation and the Kullback-Leibler data term.
//!
//! The gradient operator A: ℝⁿ → ℝ²ⁿ stacks forward differences with
//! periodic wrap, one 2-block per pixel:
//!
//! ```text
//! (Ax)_{2l}   = x(r, c+1) - x(r, c)
//! (Ax)_{2l+1} = x(r+1, c) - x(r, c)        l = r*N + c
//! ```
//!
//! `div_op` applies the adjoint Aᵀ (note: Aᵀ, not the negative divergence).
//! The isotropic TV is the sum of Euclidean block norms of Ax.

use crate::error::{Error, Result};
use crate::imaging::blur::BlurOperator;

/// Forward-difference gradient, blocks interleaved: output length 2n.
pub fn grad_op(x: &[f64], side: usize) -> Vec<f64> {
    debug_assert_eq!(x.len(), side * side);
    let n = side * side;
    let mut out = vec![0.0; 2 * n];
    for r in 0..side {
        let rn = r * side;
        let rdown = if r + 1 == side { 0 } else { (r + 1) * side };
        for c in 0..side {
            let l = rn + c;
            let cright = if c + 1 == side { rn } else { l + 1 };
            out[2 * l] = x[cright] - x[l];
            out[2 * l + 1] = x[rdown + c] - x[l];
        }
    }
    out
}

/// Adjoint of the gradient: Aᵀy for y ∈ ℝ²ⁿ in the interleaved layout.
pub fn div_op(y: &[f64], side: usize) -> Vec<f64> {
    let n = side * side;
    debug_assert_eq!(y.len(), 2 * n);
    let mut out = vec![0.0; n];
    for r in 0..side {
        let rn = r * side;
        let rup = if r == 0 { (side - 1) * side } else { rn - side };
        for c in 0..side {
            let l = rn + c;
            let cleft = if c == 0 { rn + side - 1 } else { l - 1 };
            out[l] = y[2 * cleft] - y[2 * l] + y[2 * (rup + c) + 1] - y[2 * l + 1];
        }
    }
    out
}

/// Isotropic total variation: sum of Euclidean norms of the gradient blocks.
pub fn tv_value(x: &[f64], side: usize) -> f64 {
    let g = grad_op(x, side);
    block_norm_sum(&g)
}

fn block_norm_sum(g: &[f64]) -> f64 {
    g.chunks_exact(2)
        .map(|b| (b[0] * b[0] + b[1] * b[1]).sqrt())
        .sum()
}

/// Generalized Kullback-Leibler divergence between the model Hx + b and
/// the observed counts g:
///
/// ```text
/// f0(x) = Σ_i  g_i log(g_i / (Hx + b)_i) + (Hx)_i + b - g_i
/// ```
///
/// with the 0·log 0 = 0 convention for zero-count pixels. A zero model
/// value under a positive count is a domain violation.
pub fn kl_value(x: &[f64], g: &[f64], op: &BlurOperator) -> Result<f64> {
    let hx = op.apply(x)?;
    kl_value_given_hx(&hx, g, op.background())
}

/// KL value when Hx has already been computed (the solver loops reuse it).
pub fn kl_value_given_hx(hx: &[f64], g: &[f64], b: f64) -> Result<f64> {
    if hx.len() != g.len() {
        return Err(Error::DimensionMismatch {
            expected: g.len(),
            got: hx.len(),
        });
    }
    let mut acc = 0.0;
    for (i, (&hxi, &gi)) in hx.iter().zip(g).enumerate() {
        let model = hxi + b;
        if gi > 0.0 {
            if model <= 0.0 {
                return Err(Error::Domain(format!(
                    "model value (Hx+b)_{i} = {model} is not positive while g_{i} = {gi} > 0"
                )));
            }
            acc += gi * (gi / model).ln() + hxi + b - gi;
        } else {
            acc += hxi + b;
        }
    }
    Ok(acc)
}

/// Gradient of the KL term split into its natural positive decomposition
/// ∇f0(x) = Hᵀe − Hᵀv(x) with v_i = g_i / (Hx + b)_i. Returns
/// (Hᵀe, Hᵀv); both parts are nonnegative for x ≥ 0.
pub fn kl_grad_parts(x: &[f64], g: &[f64], op: &BlurOperator) -> Result<(Vec<f64>, Vec<f64>)> {
    let hx = op.apply(x)?;
    kl_grad_parts_given_hx(&hx, g, op)
}

/// Split gradient when Hx is already available.
pub fn kl_grad_parts_given_hx(
    hx: &[f64],
    g: &[f64],
    op: &BlurOperator,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if hx.len() != g.len() {
        return Err(Error::DimensionMismatch {
            expected: g.len(),
            got: hx.len(),
        });
    }
    let b = op.background();
    let mut v = vec![0.0; g.len()];
    for i in 0..g.len() {
        let model = hx[i] + b;
        if g[i] > 0.0 {
            if model <= 0.0 {
                return Err(Error::Domain(format!(
                    "model value (Hx+b)_{i} = {model} is not positive while g_{i} = {} > 0",
                    g[i]
                )));
            }
            v[i] = g[i] / model;
        }
    }
    let ht_v = op.apply_adjoint(&v)?;
    Ok((op.ht_e().to_vec(), ht_v))
}

/// Full KL gradient Hᵀe − Hᵀv(x).
pub fn kl_grad(x: &[f64], g: &[f64], op: &BlurOperator) -> Result<Vec<f64>> {
    let (pos, neg) = kl_grad_parts(x, g, op)?;
    Ok(pos.iter().zip(&neg).map(|(p, n)| p - n).collect())
}
