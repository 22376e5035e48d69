//! Brute-force oracles shared by the integration tests. They use only
//! elementary summation and derivative-free search, never the solvers
//! they check.
#![allow(dead_code, clippy::needless_range_loop)]

use martingale_multipliers::harmonics::GroupSpec;
use martingale_multipliers::rng::seeded;
use rand::Rng;
use rand_distr::StandardNormal;

/// Derivative-free maximization of `f(x, 0)` over `R^dim`, where `f(x, δ)` is
/// a smoothing of `f(x, 0)` that tends to it as `δ -> 0`. A random scan picks
/// starting points; each is refined by (1+1)-ES along a decreasing `δ`
/// schedule, which keeps the search from stalling on kinks.
pub fn maximize(dim: usize, scan: usize, seed: u64, f: impl Fn(&[f64], f64) -> f64) -> f64 {
    let mut rng = seeded(seed);
    let mut pool: Vec<(f64, Vec<f64>)> = (0..scan)
        .map(|_| {
            let x: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            (f(&x, 0.0), x)
        })
        .collect();
    pool.sort_by(|a, b| b.0.total_cmp(&a.0));
    pool.truncate(4);
    let schedule = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 1e-4, 1e-5, 1e-6, 1e-8, 0.0];
    let mut best = f64::NEG_INFINITY;
    for (_, mut x) in pool {
        for &delta in &schedule {
            let mut fx = f(&x, delta);
            let mut sigma = 0.1 * x.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-3);
            let mut steps = 0;
            while sigma > 1e-12 * (1.0 + x.iter().map(|v| v.abs()).fold(0.0, f64::max)) && steps < 60_000 {
                steps += 1;
                let y: Vec<f64> = x.iter().map(|v| v + sigma * rng.sample::<f64, _>(StandardNormal)).collect();
                let fy = f(&y, delta);
                if fy > fx {
                    x = y;
                    fx = fy;
                    sigma *= 1.5;
                } else {
                    sigma *= 0.95;
                }
            }
            best = best.max(f(&x, 0.0));
        }
    }
    best
}

/// Real adapted field stored by atoms: `atoms[k][a * channels + s]`.
pub struct RealField {
    pub group: GroupSpec,
    pub channels: usize,
    pub atoms: Vec<Vec<f64>>,
}

impl RealField {
    pub fn dim(&self) -> usize {
        self.atoms.iter().map(|a| a.len()).sum()
    }

    fn unpack(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut off = 0;
        self.atoms
            .iter()
            .map(|a| {
                let v = x[off..off + a.len()].to_vec();
                off += a.len();
                v
            })
            .collect()
    }

    /// `<F, Φ> / E (sum_k ||F_k(x)||^2 + δ^2 |x|^2)^{1/2}` by summation over
    /// all points; `δ = 0` is the exact ratio.
    pub fn ratio(&self, x: &[f64], delta: f64) -> f64 {
        let reg = delta * delta * x.iter().map(|v| v * v).sum::<f64>();
        let f = self.unpack(x);
        let g = &self.group;
        let c = self.channels;
        let mut pair = 0.0;
        let mut norm = 0.0;
        for p in 0..g.size() {
            let mut sq = reg;
            for k in 0..=g.depth() {
                let atom = p / g.suffix_size(k);
                for s in 0..c {
                    let v = f[k][atom * c + s];
                    sq += v * v;
                    pair += v * self.atoms[k][atom * c + s];
                }
            }
            norm += sq.sqrt();
        }
        if norm == 0.0 {
            0.0
        } else {
            pair / norm
        }
    }
}

/// Davis–Garsia objective by direct summation for a scalar `f` and any `g`,
/// both given by their values; `|·|` and `sqrt` are smoothed by `δ^2`.
pub fn dg_objective_direct(group: &GroupSpec, f: &[(f64, f64)], g: &[(f64, f64)], delta: f64) -> f64 {
    let d2 = delta * delta;
    let n = group.size();
    let mean_at = |v: &[(f64, f64)], k: usize, p: usize| -> (f64, f64) {
        let b = group.suffix_size(k);
        let a = p / b;
        let (mut re, mut im) = (0.0, 0.0);
        for q in a * b..(a + 1) * b {
            re += v[q].0;
            im += v[q].1;
        }
        (re / b as f64, im / b as f64)
    };
    let diff = |v: &[(f64, f64)], k: usize, p: usize| -> (f64, f64) {
        if k == 0 {
            return mean_at(v, 0, p);
        }
        let (a, b) = (mean_at(v, k, p), mean_at(v, k - 1, p));
        (a.0 - b.0, a.1 - b.1)
    };
    let h: Vec<(f64, f64)> = f.iter().zip(g).map(|(a, b)| (a.0 - b.0, a.1 - b.1)).collect();
    let mut total = 0.0;
    for p in 0..n {
        let mut q = 0.0;
        for k in 0..=group.depth() {
            let d = diff(g, k, p);
            total += (d.0 * d.0 + d.1 * d.1 + d2).sqrt() / n as f64;
            // E_{k-1}|Δ_k h|^2 at p
            let b = if k == 0 { n } else { group.suffix_size(k - 1) };
            let a = p / b;
            let mut cond = 0.0;
            for r in a * b..(a + 1) * b {
                let e = diff(&h, k, r);
                cond += e.0 * e.0 + e.1 * e.1;
            }
            q += cond / b as f64;
        }
        total += (q + d2).sqrt() / n as f64;
    }
    total
}
