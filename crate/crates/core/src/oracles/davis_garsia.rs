//! Davis–Garsia splitting `f = g + h` minimizing
//! `J(g, h) = sum_{k>=0} E|Δ_k g| + E (sum_{k>=0} E_{k-1}|Δ_k h|^2)^{1/2}`
//! (with `Δ_0 = E`, `E_{-1} = E`).
//!
//! Majorize-minimize on the smoothed objective: with
//! `α = 1/sqrt(|Δ_k g|^2 + ε^2)` and `β = 1/sqrt(Q + ε^2)`, where `Q` is the
//! conditional square sum of `h`, the surrogate
//! `E α|u|^2 + E β̄_k |d - u|^2` (`β̄_k = E_{k-1} β`) splits over levels and
//! over the atoms of `F_{k-1}`. Each fiber is a weighted least-squares
//! problem with the mean-zero constraint (or, under the Hardy constraint,
//! restricted to the analytic frequencies `1..N_k/2`).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtration::martingale_differences;
use crate::hardy::{is_hardy_last, require_torus};
use crate::harmonics::{GroupFunction, GroupSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    BudgetExhausted,
}

#[derive(Clone, Debug)]
pub struct DavisGarsiaOptions {
    pub constrain_hardy: bool,
    /// Relative stall threshold on the exact objective.
    pub tolerance: f64,
    /// Maximum number of MM iterations.
    pub budget: usize,
    /// Starting `g`; the returned objective never exceeds its value.
    pub warm_start: Option<GroupFunction>,
}

impl DavisGarsiaOptions {
    pub fn new(constrain_hardy: bool, tolerance: f64, budget: usize) -> Self {
        DavisGarsiaOptions { constrain_hardy, tolerance, budget, warm_start: None }
    }
}

#[derive(Clone, Debug)]
pub struct DecompositionPair {
    pub g: GroupFunction,
    pub h: GroupFunction,
    pub objective: f64,
    /// `sum_k E|Δ_k g|`.
    pub variation_term: f64,
    /// `E s(h)`.
    pub conditional_square_term: f64,
    pub iterations: usize,
    pub status: SolveStatus,
}

/// Smallest smoothing parameter, relative to the scale of `f`.
pub const DG_EPS_FLOOR: f64 = 1e-8;

/// Martingale differences of a scalar function stored by atoms:
/// `levels[k][a]` is `Δ_k` on the `a`-th atom of `F_k`.
#[derive(Clone)]
struct Levels {
    group: GroupSpec,
    levels: Vec<Vec<Complex64>>,
}

impl Levels {
    fn of(f: &GroupFunction) -> Self {
        let g = f.group().clone();
        let md = martingale_differences(f);
        let mut levels = vec![md.mean.clone()];
        for k in 1..=g.depth() {
            let block = g.suffix_size(k);
            levels.push(md.diff(k).values().iter().step_by(block).copied().collect());
        }
        Levels { group: g, levels }
    }

    fn to_function(&self) -> GroupFunction {
        let g = &self.group;
        let mut values = vec![Complex64::new(0.0, 0.0); g.size()];
        for (k, lv) in self.levels.iter().enumerate() {
            let block = g.suffix_size(k);
            for (p, v) in values.iter_mut().enumerate() {
                *v += lv[p / block];
            }
        }
        GroupFunction::scalar(g.clone(), values).expect("shape")
    }

    /// `Q` per point at the finest level that matters (atoms of `F_{m-1}`),
    /// stored per leaf for simplicity.
    fn conditional_square(&self) -> Vec<f64> {
        let g = &self.group;
        let size = g.size();
        let mut q = vec![self.levels[0][0].norm_sqr(); size];
        for k in 1..=g.depth() {
            let n_k = g.order(k);
            let parent_block = g.suffix_size(k - 1);
            for (parent, fiber) in self.levels[k].chunks(n_k).enumerate() {
                let cond = fiber.iter().map(|z| z.norm_sqr()).sum::<f64>() / n_k as f64;
                for v in &mut q[parent * parent_block..(parent + 1) * parent_block] {
                    *v += cond;
                }
            }
        }
        q
    }

    fn variation(&self) -> f64 {
        self.levels
            .iter()
            .map(|lv| lv.iter().map(|z| z.norm()).sum::<f64>() / lv.len() as f64)
            .sum()
    }
}

fn objective_parts(u: &Levels, r: &Levels) -> (f64, f64) {
    let q = r.conditional_square();
    (u.variation(), q.iter().map(|v| v.sqrt()).sum::<f64>() / q.len() as f64)
}

/// Exact `J(g, h)` as `(variation_term, conditional_square_term)`.
pub fn davis_garsia_objective(g: &GroupFunction, h: &GroupFunction) -> Result<(f64, f64)> {
    if !g.same_shape(h) || g.channels() != 1 {
        return Err(Error::ShapeMismatch);
    }
    Ok(objective_parts(&Levels::of(g), &Levels::of(h)))
}

fn sub_levels(d: &Levels, u: &Levels) -> Levels {
    Levels {
        group: d.group.clone(),
        levels: d.levels.iter().zip(&u.levels).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect()).collect(),
    }
}

/// Analytic basis `e_n(t) = e^{2πi n t / N}`, `n = 1..N/2`, as columns.
fn analytic_basis(n: usize) -> Vec<Vec<Complex64>> {
    (1..=n / 2)
        .map(|freq| {
            (0..n)
                .map(|t| Complex64::from_polar(1.0, std::f64::consts::TAU * ((freq * t) % n) as f64 / n as f64))
                .collect()
        })
        .collect()
}

pub fn davis_garsia_solve(f: &GroupFunction, options: &DavisGarsiaOptions) -> Result<DecompositionPair> {
    if f.channels() != 1 {
        return Err(Error::InvalidArgument("Davis–Garsia splitting takes scalar functions".into()));
    }
    if options.budget == 0 {
        return Err(Error::InvalidArgument("budget must be >= 1".into()));
    }
    if options.tolerance.is_nan() || options.tolerance <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let group = f.group().clone();
    if options.constrain_hardy {
        require_torus(&group)?;
        if !is_hardy_last(f)? {
            return Err(Error::InvalidArgument("Hardy constraint requested for a non-Hardy function".into()));
        }
    }
    let d = Levels::of(f);
    let m = group.depth();
    let zero = Levels { group: group.clone(), levels: d.levels.iter().map(|lv| vec![Complex64::new(0.0, 0.0); lv.len()]).collect() };

    let exact = |u: &Levels| objective_parts(u, &sub_levels(&d, u));
    let total = |p: (f64, f64)| p.0 + p.1;

    // Candidates that bound the optimum from above.
    let mut best_u = zero.clone();
    let mut best = total(exact(&best_u));
    let pure_g = total(exact(&d));
    if pure_g < best {
        best = pure_g;
        best_u = d.clone();
    }
    let mut u = match &options.warm_start {
        Some(g0) => {
            if !g0.same_shape(f) {
                return Err(Error::ShapeMismatch);
            }
            if options.constrain_hardy && !is_hardy_last(g0)? {
                return Err(Error::InvalidArgument("warm start is not Hardy".into()));
            }
            let w = Levels::of(g0);
            let v = total(exact(&w));
            if v < best {
                best = v;
                best_u = w.clone();
            }
            w
        }
        None => Levels {
            group: group.clone(),
            levels: d.levels.iter().map(|lv| lv.iter().map(|z| z * 0.5).collect()).collect(),
        },
    };
    if best == 0.0 {
        return finish(f, &d, best_u, 0, SolveStatus::Converged);
    }

    let bases: Vec<Vec<Vec<Complex64>>> =
        (1..=m).map(|k| if options.constrain_hardy { analytic_basis(group.order(k)) } else { Vec::new() }).collect();
    let scale = best;
    let floor = DG_EPS_FLOOR * scale;
    let mut eps = 0.1 * scale;
    let mut history: Vec<f64> = Vec::new();
    let window = 25;
    let mut status = SolveStatus::BudgetExhausted;
    let mut iterations = 0;
    let size = group.size();

    while iterations < options.budget {
        iterations += 1;
        let r = sub_levels(&d, &u);
        let q = r.conditional_square();
        let beta: Vec<f64> = q.iter().map(|v| 1.0 / (v + eps * eps).sqrt()).collect();
        let mut next = u.clone();

        // Level 0: the mean.
        if !options.constrain_hardy {
            let alpha = 1.0 / (u.levels[0][0].norm_sqr() + eps * eps).sqrt();
            let b0 = beta.iter().sum::<f64>() / size as f64;
            next.levels[0][0] = d.levels[0][0] * (b0 / (alpha + b0));
        }
        for k in 1..=m {
            let n_k = group.order(k);
            let parent_block = group.suffix_size(k - 1);
            for parent in 0..group.prefix_size(k - 1) {
                let bbar = beta[parent * parent_block..(parent + 1) * parent_block].iter().sum::<f64>()
                    / parent_block as f64;
                let range = parent * n_k..(parent + 1) * n_k;
                let alpha: Vec<f64> =
                    u.levels[k][range.clone()].iter().map(|z| 1.0 / (z.norm_sqr() + eps * eps).sqrt()).collect();
                let dk = &d.levels[k][range.clone()];
                let out = &mut next.levels[k][range];
                if options.constrain_hardy {
                    solve_analytic_fiber(&bases[k - 1], &alpha, bbar, dk, out);
                } else {
                    let denom: f64 = alpha.iter().map(|a| 1.0 / (a + bbar)).sum();
                    let num: Complex64 = dk.iter().zip(&alpha).map(|(dt, a)| dt * (bbar / (a + bbar))).sum();
                    let mu = -num / denom;
                    for ((o, dt), a) in out.iter_mut().zip(dk).zip(&alpha) {
                        *o = (dt * bbar + mu) / (a + bbar);
                    }
                }
            }
        }
        u = next;
        let value = total(exact(&u));
        if value < best {
            best = value;
            best_u = u.clone();
        }
        history.push(best);
        if eps > floor {
            eps = (eps * 0.8).max(floor);
        } else if history.len() > window {
            let old = history[history.len() - 1 - window];
            if old - best <= options.tolerance * 1e-2 * best {
                status = SolveStatus::Converged;
                break;
            }
        }
    }
    finish(f, &d, best_u, iterations, status)
}

fn finish(f: &GroupFunction, d: &Levels, u: Levels, iterations: usize, status: SolveStatus) -> Result<DecompositionPair> {
    let (variation_term, conditional_square_term) = objective_parts(&u, &sub_levels(d, &u));
    let g = u.to_function();
    let h = f.sub(&g)?;
    Ok(DecompositionPair {
        g,
        h,
        objective: variation_term + conditional_square_term,
        variation_term,
        conditional_square_term,
        iterations,
        status,
    })
}

/// Minimize `sum_t α_t |u_t|^2 + β̄ |d_t - u_t|^2` over `u = sum_n c_n e_n`.
fn solve_analytic_fiber(basis: &[Vec<Complex64>], alpha: &[f64], bbar: f64, d: &[Complex64], out: &mut [Complex64]) {
    let n = basis.len();
    let h = DMatrix::from_fn(n, n, |i, j| {
        basis[i].iter().zip(&basis[j]).zip(alpha).map(|((ei, ej), a)| ei.conj() * ej * (a + bbar)).sum::<Complex64>()
    });
    let b = DVector::from_fn(n, |i, _| basis[i].iter().zip(d).map(|(ei, dt)| ei.conj() * dt * bbar).sum::<Complex64>());
    let c = match h.clone().cholesky() {
        Some(ch) => ch.solve(&b),
        None => h.lu().solve(&b).unwrap_or_else(|| DVector::zeros(n)),
    };
    for (t, o) in out.iter_mut().enumerate() {
        *o = (0..n).map(|i| c[i] * basis[i][t]).sum();
    }
}
