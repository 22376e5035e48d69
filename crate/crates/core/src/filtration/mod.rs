//! The canonical coordinate filtration `F_0 ⊂ F_1 ⊂ ... ⊂ F_m` on a finite
//! product group, where `F_k` is generated by the first `k` coordinates.
//!
//! In storage order an `F_k` atom is a contiguous block of
//! `N_{k+1} * ... * N_m` elements, so `E_k` is a block mean. Every sequence
//! space here carries a `k = 0` slot holding `F_0`-measurable (constant) terms.

mod dual;

pub use dual::{dual_norm_maximize, DualNormEstimate, DualStatus};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::harmonics::{GroupFunction, GroupSpec};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Channel-wise means over the `F_k` atoms, one channel vector per atom.
pub(crate) fn atom_means(f: &GroupFunction, k: usize) -> Vec<Complex64> {
    let g = f.group();
    let c = f.channels();
    let block = g.suffix_size(k);
    let mut out = vec![ZERO; g.prefix_size(k) * c];
    for (atom, chunk) in f.values().chunks(block * c).enumerate() {
        let acc = &mut out[atom * c..(atom + 1) * c];
        for point in chunk.chunks(c) {
            for (a, v) in acc.iter_mut().zip(point) {
                *a += v;
            }
        }
        for a in acc.iter_mut() {
            *a /= block as f64;
        }
    }
    out
}

/// Means of a real pointwise quantity over the `F_k` atoms.
pub(crate) fn atom_means_real(values: &[f64], block: usize) -> Vec<f64> {
    values
        .chunks(block)
        .map(|c| c.iter().sum::<f64>() / block as f64)
        .collect()
}

/// Expands per-atom values back to the full group.
pub(crate) fn expand_atoms(group: &GroupSpec, k: usize, channels: usize, atoms: &[Complex64]) -> GroupFunction {
    let block = group.suffix_size(k);
    let mut values = Vec::with_capacity(group.size() * channels);
    for chunk in atoms.chunks(channels) {
        for _ in 0..block {
            values.extend_from_slice(chunk);
        }
    }
    GroupFunction::new(group.clone(), channels, values).expect("atom expansion preserves shape")
}

/// `E_k f`: the mean of `f` over coordinates `k+1..m`.
pub fn conditional_expectation(f: &GroupFunction, k: usize) -> Result<GroupFunction> {
    let depth = f.group().depth();
    if k > depth {
        return Err(Error::LevelOutOfRange { k, depth });
    }
    Ok(expand_atoms(f.group(), k, f.channels(), &atom_means(f, k)))
}

/// `E f = Δ_0 f` together with the differences `Δ_k f = E_k f - E_{k-1} f`.
#[derive(Clone, Debug)]
pub struct MartingaleDifferences {
    pub group: GroupSpec,
    pub mean: Vec<Complex64>,
    /// `diffs[k - 1]` is `Δ_k f` for `k = 1..=m`.
    pub diffs: Vec<GroupFunction>,
}

impl MartingaleDifferences {
    /// `Δ_k f` for `k >= 1`.
    pub fn diff(&self, k: usize) -> &GroupFunction {
        &self.diffs[k - 1]
    }

    pub fn reconstruct(&self) -> GroupFunction {
        let c = self.mean.len();
        let mut values: Vec<Complex64> = self.mean.iter().copied().cycle().take(self.group.size() * c).collect();
        for d in &self.diffs {
            for (v, x) in values.iter_mut().zip(d.values()) {
                *v += x;
            }
        }
        GroupFunction::new(self.group.clone(), c, values).expect("shape preserved")
    }
}

pub fn martingale_differences(f: &GroupFunction) -> MartingaleDifferences {
    let g = f.group();
    let c = f.channels();
    let mean = f.mean();
    let mut prev = expand_atoms(g, 0, c, &mean);
    let mut diffs = Vec::with_capacity(g.depth());
    for k in 1..=g.depth() {
        let cur = expand_atoms(g, k, c, &atom_means(f, k));
        diffs.push(cur.sub(&prev).expect("same shape"));
        prev = cur;
    }
    MartingaleDifferences { group: g.clone(), mean, diffs }
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// `E (sum_{k>=0} |Δ_k f|^2)^{1/2}` with `Δ_0 f = E f`.
pub fn square_function_norm(f: &GroupFunction) -> f64 {
    let md = martingale_differences(f);
    let mut sq = vec![norm_sqr(&md.mean); f.group().size()];
    for d in &md.diffs {
        for (s, n) in sq.iter_mut().zip(d.pointwise_norm_sqr()) {
            *s += n;
        }
    }
    sq.iter().map(|s| s.sqrt()).sum::<f64>() / f.group().size() as f64
}

/// `E (sum_{k>=0} E_{k-1} |Δ_k f|^2)^{1/2}`, the `k = 0` term being `|E f|^2`.
pub fn conditional_square_norm(f: &GroupFunction) -> f64 {
    let g = f.group();
    let md = martingale_differences(f);
    let mut sq = vec![norm_sqr(&md.mean); g.size()];
    for (k, d) in (1..).zip(&md.diffs) {
        let block = g.suffix_size(k - 1);
        let cond = atom_means_real(&d.pointwise_norm_sqr(), block);
        for (p, s) in sq.iter_mut().enumerate() {
            *s += cond[p / block];
        }
    }
    sq.iter().map(|s| s.sqrt()).sum::<f64>() / g.size() as f64
}

/// An adapted sequence `(F_k)_{k=0..}` with `F_k` measurable with respect to `F_k`.
/// Terms are stored as full functions on the group.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptedSequence {
    group: GroupSpec,
    channels: usize,
    terms: Vec<GroupFunction>,
}

/// Absolute deviation tolerated when checking measurability, scaled by `max(1, sup|F_k|)`.
pub const MEASURABILITY_TOL: f64 = 1e-12;

impl AdaptedSequence {
    /// Validates measurability of every term; non-adapted input is rejected.
    pub fn new(group: GroupSpec, channels: usize, terms: Vec<GroupFunction>) -> Result<Self> {
        if channels == 0 {
            return Err(Error::ZeroChannels);
        }
        if terms.len() > group.depth() + 1 {
            return Err(Error::TooManyTerms { terms: terms.len(), max: group.depth() + 1 });
        }
        for (k, t) in terms.iter().enumerate() {
            if t.group() != &group || t.channels() != channels {
                return Err(Error::ShapeMismatch);
            }
            let deviation = conditional_expectation(t, k)?.max_abs_diff(t);
            if deviation > MEASURABILITY_TOL * t.sup_norm().max(1.0) {
                return Err(Error::NotAdapted { k, deviation });
            }
        }
        Ok(AdaptedSequence { group, channels, terms })
    }

    /// Builds the sequence from per-atom values: `atoms[k]` has one channel
    /// vector per element of the `k`-prefix group.
    pub fn from_atoms(group: GroupSpec, channels: usize, atoms: Vec<Vec<Complex64>>) -> Result<Self> {
        if atoms.len() > group.depth() + 1 {
            return Err(Error::TooManyTerms { terms: atoms.len(), max: group.depth() + 1 });
        }
        let mut terms = Vec::with_capacity(atoms.len());
        for (k, a) in atoms.iter().enumerate() {
            let expected = group.prefix_size(k) * channels;
            if a.len() != expected {
                return Err(Error::MalformedValues { got: a.len(), expected });
            }
            terms.push(expand_atoms(&group, k, channels, a));
        }
        Ok(AdaptedSequence { group, channels, terms })
    }

    pub fn zeros(group: GroupSpec, channels: usize) -> Self {
        let terms = (0..=group.depth()).map(|_| GroupFunction::zeros(group.clone(), channels)).collect();
        AdaptedSequence { group, channels, terms }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn terms(&self) -> &[GroupFunction] {
        &self.terms
    }

    pub fn term(&self, k: usize) -> Option<&GroupFunction> {
        self.terms.get(k)
    }

    /// Per-atom values of every term.
    pub fn atoms(&self) -> Vec<Vec<Complex64>> {
        self.terms.iter().enumerate().map(|(k, t)| atom_means(t, k)).collect()
    }

    /// Pointwise `sum_k ||F_k(x)||^2`.
    fn pointwise_total(&self) -> Vec<f64> {
        let mut sq = vec![0.0; self.group.size()];
        for t in &self.terms {
            for (s, n) in sq.iter_mut().zip(t.pointwise_norm_sqr()) {
                *s += n;
            }
        }
        sq
    }

    pub fn scale(&self, t: f64) -> Self {
        AdaptedSequence {
            group: self.group.clone(),
            channels: self.channels,
            terms: self.terms.iter().map(|f| f.scale(Complex64::new(t, 0.0))).collect(),
        }
    }
}

/// `E (sum_k ||F_k||^2_{l2(S)})^{1/2}`.
pub fn adapted_l1_norm(seq: &AdaptedSequence) -> f64 {
    let sq = seq.pointwise_total();
    sq.iter().map(|s| s.sqrt()).sum::<f64>() / seq.group.size() as f64
}

/// `max_k max_x (E_k sum_{j>=k} ||Φ_j||^2)(x)`, square-rooted.
pub fn weisz_dual_norm(phi: &AdaptedSequence) -> f64 {
    let g = &phi.group;
    let mut tail = vec![0.0; g.size()];
    let mut best = 0.0f64;
    for k in (0..=g.depth()).rev() {
        if let Some(t) = phi.terms.get(k) {
            for (s, n) in tail.iter_mut().zip(t.pointwise_norm_sqr()) {
                *s += n;
            }
        }
        let cond = atom_means_real(&tail, g.suffix_size(k));
        best = cond.iter().fold(best, |m, &v| m.max(v));
    }
    best.sqrt()
}

/// `<F, Φ> = E sum_k Re sum_s F_{k,s} conj(Φ_{k,s})`.
pub fn pairing(f: &AdaptedSequence, phi: &AdaptedSequence) -> Result<f64> {
    if f.group != phi.group || f.channels != phi.channels {
        return Err(Error::ShapeMismatch);
    }
    let total: f64 = f
        .terms
        .iter()
        .zip(&phi.terms)
        .map(|(a, b)| a.values().iter().zip(b.values()).map(|(x, y)| (x * y.conj()).re).sum::<f64>())
        .sum();
    Ok(total / f.group.size() as f64)
}

/// `k -> F_k - E_{k-1} F_k` for `k >= 1`; the `F_0` term passes through.
pub fn lepingle_project(seq: &AdaptedSequence) -> AdaptedSequence {
    let terms = seq
        .terms
        .iter()
        .enumerate()
        .map(|(k, t)| {
            if k == 0 {
                t.clone()
            } else {
                let cond = conditional_expectation(t, k - 1).expect("k-1 within depth");
                t.sub(&cond).expect("same shape")
            }
        })
        .collect();
    AdaptedSequence { group: seq.group.clone(), channels: seq.channels, terms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::MultiIndex;
    use crate::rng::{complex_gaussian, seeded};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_fn(g: &GroupSpec, channels: usize, seed: u64) -> GroupFunction {
        let mut rng = seeded(seed);
        let values = (0..g.size() * channels).map(|_| complex_gaussian(&mut rng)).collect();
        GroupFunction::new(g.clone(), channels, values).unwrap()
    }

    fn random_adapted(g: &GroupSpec, channels: usize, seed: u64) -> AdaptedSequence {
        let mut rng = seeded(seed);
        let atoms = (0..=g.depth())
            .map(|k| (0..g.prefix_size(k) * channels).map(|_| complex_gaussian(&mut rng)).collect())
            .collect();
        AdaptedSequence::from_atoms(g.clone(), channels, atoms).unwrap()
    }

    #[test]
    fn conditional_expectation_edges() {
        let g = GroupSpec::cyclic(3, 2).unwrap();
        let f = random_fn(&g, 1, 1);
        let e0 = conditional_expectation(&f, 0).unwrap();
        let mean = f.mean()[0];
        assert!(e0.values().iter().all(|v| (v - mean).norm() < 1e-14));
        assert!(conditional_expectation(&f, 2).unwrap().max_abs_diff(&f) < 1e-15);
        assert!(matches!(conditional_expectation(&f, 3), Err(Error::LevelOutOfRange { .. })));
    }

    #[test]
    fn character_in_second_coordinate_has_zero_e1() {
        let g = GroupSpec::torus(4, 2).unwrap();
        let chi = g.character(&MultiIndex::new(vec![0, 1])).unwrap();
        assert!(conditional_expectation(&chi, 1).unwrap().sup_norm() < 1e-15);
    }

    #[test]
    fn tower_property() {
        let g = build(&[2, 3, 2]);
        let f = random_fn(&g, 2, 5);
        for j in 0..=3 {
            for k in 0..=3 {
                let lhs = conditional_expectation(&conditional_expectation(&f, k).unwrap(), j).unwrap();
                let rhs = conditional_expectation(&f, j.min(k)).unwrap();
                assert!(lhs.max_abs_diff(&rhs) < 1e-12);
            }
        }
    }

    fn build(orders: &[i64]) -> GroupSpec {
        crate::harmonics::build_group(orders, &vec![false; orders.len()]).unwrap()
    }

    #[test]
    fn differences_of_constant_and_character() {
        let g = GroupSpec::cyclic(2, 3).unwrap();
        let f = GroupFunction::scalar(g.clone(), vec![c(2.5); 8]).unwrap();
        let md = martingale_differences(&f);
        assert!((md.mean[0] - c(2.5)).norm() < 1e-15);
        assert!(md.diffs.iter().all(|d| d.sup_norm() < 1e-15));

        let chi = g.character(&MultiIndex::new(vec![1, 1])).unwrap();
        let md = martingale_differences(&chi);
        assert!(md.mean[0].norm() < 1e-15);
        assert!(md.diff(1).sup_norm() < 1e-15);
        assert!(md.diff(2).max_abs_diff(&chi) < 1e-15);
        assert!(md.diff(3).sup_norm() < 1e-15);
    }

    #[test]
    fn reconstruction_and_mds_property() {
        let g = GroupSpec::cyclic(2, 3).unwrap();
        let f = random_fn(&g, 1, 7);
        let md = martingale_differences(&f);
        assert!(md.reconstruct().max_abs_diff(&f) < 1e-12);
        for k in 1..=3 {
            assert!(conditional_expectation(md.diff(k), k - 1).unwrap().sup_norm() < 1e-12);
        }
    }

    #[test]
    fn square_function_examples() {
        let g = GroupSpec::torus(4, 2).unwrap();
        assert_eq!(square_function_norm(&GroupFunction::zeros(g.clone(), 1)), 0.0);
        let chi = g.character(&MultiIndex::new(vec![1])).unwrap();
        assert!((square_function_norm(&chi) - 1.0).abs() < 1e-14);
        assert!((conditional_square_norm(&chi) - 1.0).abs() < 1e-14);
        let two = chi.add(&g.character(&MultiIndex::new(vec![-1, 2])).unwrap()).unwrap();
        assert!((square_function_norm(&two) - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn conditional_square_norm_matches_nested_sums() {
        let g = GroupSpec::cyclic(3, 2).unwrap();
        let f = random_fn(&g, 1, 13);
        let v = |x1: usize, x2: usize| f.values()[3 * x1 + x2];
        // brute force: E_0 f, E_1 f at x1, f
        let e0: Complex64 = (0..9).map(|p| f.values()[p]).sum::<Complex64>() / 9.0;
        let e1 = |x1: usize| (0..3).map(|x2| v(x1, x2)).sum::<Complex64>() / 3.0;
        let term1: f64 = (0..3).map(|x1| (e1(x1) - e0).norm_sqr()).sum::<f64>() / 3.0;
        let mut total = 0.0;
        for x1 in 0..3 {
            let term2: f64 = (0..3).map(|x2| (v(x1, x2) - e1(x1)).norm_sqr()).sum::<f64>() / 3.0;
            let s = (e0.norm_sqr() + term1 + term2).sqrt();
            total += 3.0 * s;
        }
        let expected = total / 9.0;
        assert!((conditional_square_norm(&f) - expected).abs() < 1e-13);
    }

    #[test]
    fn adapted_rejects_non_measurable_terms() {
        let g = GroupSpec::cyclic(2, 2).unwrap();
        let chi = g.character(&MultiIndex::new(vec![0, 1])).unwrap();
        let terms = vec![GroupFunction::zeros(g.clone(), 1), chi];
        assert!(matches!(AdaptedSequence::new(g, 1, terms), Err(Error::NotAdapted { k: 1, .. })));
    }

    #[test]
    fn adapted_norm_examples() {
        let g = GroupSpec::cyclic(3, 2).unwrap();
        let cst = GroupFunction::scalar(g.clone(), vec![Complex64::new(0.0, -3.0); 9]).unwrap();
        let single = AdaptedSequence::new(g.clone(), 1, vec![cst]).unwrap();
        assert!((adapted_l1_norm(&single) - 3.0).abs() < 1e-14);
        assert!((weisz_dual_norm(&single) - 3.0).abs() < 1e-14);

        // unimodular characters at k = 0, 1 (m = 2 terms)
        let terms = vec![
            g.character(&MultiIndex::zero()).unwrap(),
            g.character(&MultiIndex::new(vec![1])).unwrap(),
        ];
        let seq = AdaptedSequence::new(g, 1, terms).unwrap();
        assert!((adapted_l1_norm(&seq) - 2f64.sqrt()).abs() < 1e-14);
        assert!((weisz_dual_norm(&seq) - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn adapted_norm_matches_direct_summation() {
        let g = GroupSpec::cyclic(2, 2).unwrap();
        let seq = random_adapted(&g, 2, 3);
        let mut total = 0.0;
        for p in 0..4 {
            let s: f64 = seq.terms().iter().map(|t| t.at(p).iter().map(|z| z.norm_sqr()).sum::<f64>()).sum();
            total += s.sqrt();
        }
        assert!((adapted_l1_norm(&seq) - total / 4.0).abs() < 1e-14);
    }

    #[test]
    fn weisz_matches_brute_force_on_z2_squared() {
        let g = GroupSpec::cyclic(2, 2).unwrap();
        let phi = random_adapted(&g, 1, 21);
        let a = phi.atoms();
        let n = |z: Complex64| z.norm_sqr();
        let mut best = 0.0f64;
        // k = 0: E sum_j |Φ_j|^2
        let mut k0 = n(a[0][0]);
        k0 += (n(a[1][0]) + n(a[1][1])) / 2.0;
        k0 += a[2].iter().map(|&z| n(z)).sum::<f64>() / 4.0;
        best = best.max(k0);
        for x1 in 0..2 {
            let k1 = n(a[1][x1]) + (n(a[2][2 * x1]) + n(a[2][2 * x1 + 1])) / 2.0;
            best = best.max(k1);
        }
        for &z in &a[2] {
            best = best.max(n(z));
        }
        assert!((weisz_dual_norm(&phi) - best.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn lepingle_projection_examples() {
        let g = GroupSpec::cyclic(2, 3).unwrap();
        let cst = GroupFunction::scalar(g.clone(), vec![c(1.5); 8]).unwrap();
        let seq = AdaptedSequence::new(g.clone(), 1, vec![cst.clone(); 4]).unwrap();
        let out = lepingle_project(&seq);
        assert!(out.terms()[0].max_abs_diff(&cst) < 1e-15);
        assert!(out.terms()[1..].iter().all(|t| t.sup_norm() < 1e-15));

        let f = random_fn(&g, 1, 2);
        let md = martingale_differences(&f);
        let mut terms = vec![GroupFunction::scalar(g.clone(), vec![md.mean[0]; 8]).unwrap()];
        terms.extend(md.diffs.iter().cloned());
        let mds = AdaptedSequence::new(g.clone(), 1, terms).unwrap();
        let out = lepingle_project(&mds);
        for (a, b) in out.terms().iter().zip(mds.terms()) {
            assert!(a.max_abs_diff(b) < 1e-12);
        }

        let rnd = random_adapted(&g, 1, 4);
        let out = lepingle_project(&rnd);
        for k in 1..=3 {
            assert!(conditional_expectation(&out.terms()[k], k - 1).unwrap().sup_norm() < 1e-12);
        }
        assert!(AdaptedSequence::new(g, 1, out.terms().to_vec()).is_ok());
    }

    #[test]
    fn pairing_is_bounded_by_norm_times_sup() {
        let g = GroupSpec::cyclic(3, 2).unwrap();
        for seed in 0..20 {
            let f = random_adapted(&g, 2, seed);
            let phi = random_adapted(&g, 2, seed + 100);
            let sup = phi.pointwise_total().iter().fold(0.0f64, |m, &v| m.max(v)).sqrt();
            assert!(pairing(&f, &phi).unwrap() <= adapted_l1_norm(&f) * sup + 1e-12);
        }
    }
}
