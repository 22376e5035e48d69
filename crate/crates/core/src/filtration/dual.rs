//! Exact dual norm of the adapted space `L1(l2)`:
//! `sup { <F, Φ> : F adapted, E (sum_k ||F_k||^2)^{1/2} <= 1 }`.
//!
//! Equivalently `1 / min { N(F) : <F, Φ> = 1 }` with `N(F) = E ||v(x)||`,
//! where `v(x)` stacks `F_0(x), ..., F_m(x)`. The minimization is a sum of
//! Euclidean norms, solved by iteratively reweighted least squares: with
//! weights `w = 1 / sqrt(||v||^2 + eps^2)` the weighted problem is diagonal in
//! the atom values and has the closed form `F_k = Φ_k / E_k w`.
//!
//! Every iterate yields a feasible `F` (lower bound `<F,Φ>/N(F)`), and the
//! field `Ψ = w_prev * v_next` satisfies `E_k Ψ_k = Φ_k`, which by
//! `<F, Φ> = <F, Ψ> <= N(F) sup ||Ψ||` gives an upper bound. The gap between
//! the two is the convergence certificate.

use num_complex::Complex64;
use serde::Serialize;

use super::{atom_means_real, AdaptedSequence};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DualStatus {
    Converged,
    BudgetExhausted,
}

#[derive(Clone, Debug)]
pub struct DualNormEstimate {
    /// Best lower bound found; nondecreasing in the budget.
    pub value: f64,
    /// Best certified upper bound.
    pub upper_bound: f64,
    pub iterations: usize,
    pub status: DualStatus,
    /// An adapted `F` with `adapted_l1_norm(F) = 1` attaining `value`.
    pub maximizer: AdaptedSequence,
}

/// Relative gap at which the maximizer reports convergence.
pub const DUAL_GAP_TOL: f64 = 1e-7;

pub fn dual_norm_maximize(phi: &AdaptedSequence, budget: usize) -> Result<DualNormEstimate> {
    if budget == 0 {
        return Err(Error::InvalidArgument("budget must be >= 1".into()));
    }
    let g = phi.group().clone();
    let c = phi.channels();
    let m = g.depth();
    let size = g.size();
    let mut phi_atoms = phi.atoms();
    phi_atoms.resize_with(m + 1, Vec::new);
    for (k, a) in phi_atoms.iter_mut().enumerate() {
        a.resize(g.prefix_size(k) * c, Complex64::new(0.0, 0.0));
    }

    let phi_scale = phi_atoms
        .iter()
        .flatten()
        .fold(0.0f64, |acc, z| acc.max(z.norm()));
    if phi_scale == 0.0 {
        return Ok(DualNormEstimate {
            value: 0.0,
            upper_bound: 0.0,
            iterations: 0,
            status: DualStatus::Converged,
            maximizer: AdaptedSequence::zeros(g, c),
        });
    }

    // Pointwise ||v(x)||^2 for atoms `a`.
    let pointwise = |a: &[Vec<Complex64>]| -> Vec<f64> {
        let mut sq = vec![0.0; size];
        for (k, ak) in a.iter().enumerate() {
            let block = g.suffix_size(k);
            for (atom, chunk) in ak.chunks(c).enumerate() {
                let n: f64 = chunk.iter().map(|z| z.norm_sqr()).sum();
                for s in &mut sq[atom * block..(atom + 1) * block] {
                    *s += n;
                }
            }
        }
        sq
    };
    let pair = |a: &[Vec<Complex64>]| -> f64 {
        a.iter()
            .zip(&phi_atoms)
            .enumerate()
            .map(|(k, (ak, pk))| {
                let s: f64 = ak.iter().zip(pk).map(|(x, y)| (x * y.conj()).re).sum();
                s / g.prefix_size(k) as f64
            })
            .sum()
    };

    let mut atoms = phi_atoms.clone();
    let mut best_atoms = atoms.clone();
    let mut best = 0.0f64;
    let mut upper = f64::INFINITY;
    let mut eps = 1e-2;
    let mut iterations = 0;
    let mut status = DualStatus::BudgetExhausted;

    while iterations < budget {
        iterations += 1;
        let sq = pointwise(&atoms);
        let norm = sq.iter().map(|s| s.sqrt()).sum::<f64>() / size as f64;
        let value = pair(&atoms) / norm;
        if value > best {
            best = value;
            best_atoms = atoms.clone();
        }
        // Reweight with v normalized to N(F) = 1.
        let weights: Vec<f64> = sq.iter().map(|s| 1.0 / (s / (norm * norm) + eps * eps).sqrt()).collect();
        let next: Vec<Vec<Complex64>> = (0..=m)
            .map(|k| {
                let w_mean = atom_means_real(&weights, g.suffix_size(k));
                phi_atoms[k]
                    .chunks(c)
                    .zip(&w_mean)
                    .flat_map(|(chunk, &w)| chunk.iter().map(move |z| z / w))
                    .collect()
            })
            .collect();
        // Dual certificate Ψ = w * v_next.
        let sq_next = pointwise(&next);
        let sup = sq_next
            .iter()
            .zip(&weights)
            .fold(0.0f64, |acc, (s, w)| acc.max(w * s.sqrt()));
        upper = upper.min(sup);
        atoms = next;
        eps = (eps * 0.7).max(1e-14);
        if upper - best <= DUAL_GAP_TOL * best {
            status = DualStatus::Converged;
            break;
        }
    }
    // Evaluate the final iterate too.
    let sq = pointwise(&atoms);
    let norm = sq.iter().map(|s| s.sqrt()).sum::<f64>() / size as f64;
    let value = pair(&atoms) / norm;
    if value > best {
        best = value;
        best_atoms = atoms;
    }

    let sq = pointwise(&best_atoms);
    let norm = sq.iter().map(|s| s.sqrt()).sum::<f64>() / size as f64;
    let normalized = best_atoms
        .into_iter()
        .map(|a| a.into_iter().map(|z| z / norm).collect())
        .collect();
    let maximizer = AdaptedSequence::from_atoms(g, c, normalized)?;
    Ok(DualNormEstimate { value: best, upper_bound: upper.max(best), iterations, status, maximizer })
}
