//! Characterization norms for Fourier multipliers into `l1`.
//!
//! * [`fefferman_norm`]: the block-sum F-norm of a one-dimensional sequence.
//! * [`adapted_multiplier_norm`]: graded multipliers on adapted sequences.
//! * [`martingale_hardy_multiplier_norm`]: multipliers on the martingale
//!   Hardy space of a finite product group.
//! * [`hardy_last_multiplier_norm`]: multipliers on Hardy martingales.
//!
//! Everything is a finite, exact computation. Sums run over `BTreeMap`s so
//! the accumulation order is fixed.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harmonics::{GroupSpec, MultiIndex};

/// A finitely supported nonnegative multiplier `λ_{γ,s}`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MultiplierTable {
    channels: usize,
    entries: BTreeMap<(MultiIndex, usize), f64>,
}

fn check_value(index: &MultiIndex, value: f64) -> Result<()> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::NegativeMultiplier { index: index.entries().to_vec(), value });
    }
    Ok(())
}

impl MultiplierTable {
    pub fn new(channels: usize) -> Result<Self> {
        if channels == 0 {
            return Err(Error::ZeroChannels);
        }
        Ok(MultiplierTable { channels, entries: BTreeMap::new() })
    }

    /// Scalar table from `(index, value)` pairs.
    pub fn scalar(entries: impl IntoIterator<Item = (Vec<i64>, f64)>) -> Result<Self> {
        let mut t = Self::new(1)?;
        for (idx, v) in entries {
            t.insert(MultiIndex::new(idx), 0, v)?;
        }
        Ok(t)
    }

    /// Inserts a new entry; an existing `(index, s)` key is an error.
    pub fn insert(&mut self, index: MultiIndex, s: usize, value: f64) -> Result<()> {
        check_value(&index, value)?;
        if s >= self.channels {
            return Err(Error::ChannelOutOfRange { channel: s, channels: self.channels });
        }
        if self.entries.contains_key(&(index.clone(), s)) {
            return Err(Error::DuplicateKey { index: index.entries().to_vec(), channel: s });
        }
        self.entries.insert((index, s), value);
        Ok(())
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: &MultiIndex, s: usize) -> f64 {
        self.entries.get(&(index.clone(), s)).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, usize, f64)> {
        self.entries.iter().map(|((i, s), v)| (i, *s, *v))
    }

    pub fn scale(&self, t: f64) -> Result<Self> {
        let mut out = Self::new(self.channels)?;
        for (i, s, v) in self.iter() {
            out.insert(i.clone(), s, v * t)?;
        }
        Ok(out)
    }

    /// Entrywise sum.
    pub fn sum(&self, other: &MultiplierTable) -> Result<Self> {
        if self.channels != other.channels {
            return Err(Error::ShapeMismatch);
        }
        let mut entries = self.entries.clone();
        for (k, v) in &other.entries {
            *entries.entry(k.clone()).or_insert(0.0) += v;
        }
        Ok(MultiplierTable { channels: self.channels, entries })
    }

    /// Checks every index against the frequency ranges of `group`.
    pub fn validate_for(&self, group: &GroupSpec) -> Result<()> {
        for (i, _, _) in self.iter() {
            group.index_position(i)?;
        }
        Ok(())
    }

    pub fn validate_cone(&self) -> Result<()> {
        match self.iter().find(|(i, _, _)| !i.is_last_positive()) {
            Some((i, _, _)) => Err(Error::OutsideCone { index: i.entries().to_vec() }),
            None => Ok(()),
        }
    }

    /// Largest coordinate carrying a nonzero entry among all indices.
    pub fn max_support(&self) -> usize {
        self.iter().map(|(i, _, _)| i.max_support()).max().unwrap_or(0)
    }

    /// `sum λ`, an exact upper bound for the norm of any multiplier
    /// whose test functions satisfy `|f^(γ)| <= ||f||`.
    pub fn l1_mass(&self) -> f64 {
        self.entries.values().sum()
    }
}

/// The family `λ^{(j)}`, `j = 0, 1, ...`, acting on adapted sequences: the grade
/// `j` table is indexed by `Γ^j x S`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GradedMultiplierFamily {
    channels: usize,
    grades: Vec<MultiplierTable>,
}

impl GradedMultiplierFamily {
    pub fn new(channels: usize) -> Result<Self> {
        if channels == 0 {
            return Err(Error::ZeroChannels);
        }
        Ok(GradedMultiplierFamily { channels, grades: Vec::new() })
    }

    pub fn insert(&mut self, grade: usize, index: MultiIndex, s: usize, value: f64) -> Result<()> {
        if index.max_support() > grade {
            return Err(Error::SupportBeyondGrade { index: index.entries().to_vec(), grade });
        }
        while self.grades.len() <= grade {
            self.grades.push(MultiplierTable::new(self.channels)?);
        }
        self.grades[grade].insert(index, s, value)
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Highest grade with a table (possibly empty); `None` for an empty family.
    pub fn max_grade(&self) -> Option<usize> {
        self.grades.len().checked_sub(1)
    }

    pub fn grade(&self, j: usize) -> Option<&MultiplierTable> {
        self.grades.get(j)
    }

    /// `(grade, index, channel, value)` in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &MultiIndex, usize, f64)> {
        self.grades
            .iter()
            .enumerate()
            .flat_map(|(j, t)| t.iter().map(move |(i, s, v)| (j, i, s, v)))
    }

    pub fn support_size(&self) -> usize {
        self.grades.iter().map(|t| t.len()).sum()
    }

    pub fn scale(&self, t: f64) -> Result<Self> {
        let mut out = Self::new(self.channels)?;
        for (j, i, s, v) in self.iter() {
            out.insert(j, i.clone(), s, v * t)?;
        }
        Ok(out)
    }

    /// Validates grades against the group depth and indices against its ranges.
    pub fn validate_for(&self, group: &GroupSpec) -> Result<()> {
        for (j, t) in self.grades.iter().enumerate() {
            if j > group.depth() && !t.is_empty() {
                return Err(Error::GradeTooLarge { grade: j, depth: group.depth() });
            }
            t.validate_for(group)?;
        }
        Ok(())
    }

    /// The Hardy-space family: `λ^{(j)}_γ = λ_γ` for `j = max_support(γ)`.
    pub fn from_table_by_support(table: &MultiplierTable) -> Result<Self> {
        let mut out = Self::new(table.channels())?;
        for (i, s, v) in table.iter() {
            out.insert(i.max_support(), i.clone(), s, v)?;
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeffermanNorm {
    pub value: f64,
    /// Smallest block length attaining the maximal block-square sum.
    pub maximizing_a: Option<usize>,
    /// `max_a sum_k (block sums)^2`, before the square root.
    pub block_energy: f64,
}

/// `λ_0 + sqrt(max_{1<=a<=M} sum_{k>=1} (sum_{j=ak}^{a(k+1)-1} λ_j)^2)` for
/// `λ` indexed by `0..=M`. Larger `a` only produce empty blocks.
pub fn fefferman_norm(lambda: &[f64]) -> Result<FeffermanNorm> {
    for (j, &v) in lambda.iter().enumerate() {
        check_value(&MultiIndex::new(vec![j as i64]), v)?;
    }
    let Some(&lambda0) = lambda.first() else {
        return Ok(FeffermanNorm { value: 0.0, maximizing_a: None, block_energy: 0.0 });
    };
    let m = lambda.len() - 1;
    let mut prefix = Vec::with_capacity(lambda.len() + 1);
    prefix.push(0.0);
    for &v in lambda {
        prefix.push(prefix.last().unwrap() + v);
    }
    let mut best = 0.0f64;
    let mut best_a = None;
    for a in 1..=m {
        let mut energy = 0.0;
        let mut k = 1;
        while a * k <= m {
            let lo = a * k;
            let hi = (a * (k + 1)).min(m + 1);
            let block = prefix[hi] - prefix[lo];
            energy += block * block;
            k += 1;
        }
        if best_a.is_none() || energy > best {
            best = energy;
            best_a = Some(a);
        }
    }
    Ok(FeffermanNorm { value: lambda0 + best.sqrt(), maximizing_a: best_a, block_energy: best })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdaptedMultiplierNorm {
    pub value: f64,
    pub maximizing_k: usize,
    /// The square-rooted level-`k` sum for `k = 0..=depth`.
    pub per_level: Vec<f64>,
}

/// `sup_k (sum_{j>=k} sum_s sum_{γ'∈Γ^{[k+1,j]}} (sum_{γ∈Γ^k} λ^{(j)}_{γ⊗γ',s})^2)^{1/2}`.
pub fn adapted_multiplier_norm(family: &GradedMultiplierFamily, group: &GroupSpec) -> Result<AdaptedMultiplierNorm> {
    family.validate_for(group)?;
    let depth = group.depth();
    let mut per_level = Vec::with_capacity(depth + 1);
    for k in 0..=depth {
        let mut columns: BTreeMap<(usize, usize, MultiIndex), f64> = BTreeMap::new();
        for (j, index, s, v) in family.iter() {
            if j >= k {
                *columns.entry((j, s, index.tail(k))).or_insert(0.0) += v;
            }
        }
        per_level.push(columns.values().map(|c| c * c).sum::<f64>().sqrt());
    }
    let (maximizing_k, value) = argmax(&per_level);
    Ok(AdaptedMultiplierNorm { value, maximizing_k, per_level })
}

fn argmax(values: &[f64]) -> (usize, f64) {
    values
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |(bk, bv), (k, &v)| if v > bv { (k, v) } else { (bk, bv) })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoTermNorm {
    pub value: f64,
    pub t1: f64,
    pub t2: f64,
    pub t1_level: usize,
    pub t2_level: usize,
    /// Block length attaining the F-norm at `t1_level` (Hardy-last norm only).
    pub t1_block: Option<usize>,
    pub t1_per_level: Vec<f64>,
    pub t2_per_level: Vec<f64>,
}

impl TwoTermNorm {
    fn from_levels(t1_per_level: Vec<f64>, t2_per_level: Vec<f64>, t1_block: Option<usize>) -> Self {
        let (t1_level, t1) = argmax(&t1_per_level);
        let (t2_level, t2) = argmax(&t2_per_level);
        TwoTermNorm { value: t1 + t2, t1, t2, t1_level, t2_level, t1_block, t1_per_level, t2_per_level }
    }
}

/// `T1(k) = (sum_{γ' ≠ 0 beyond k} sum_s (sum_{γ∈Γ^k} λ_{γ⊗γ',s})^2)^{1/2}`, `k >= 0`.
fn nonzero_tail_levels(table: &MultiplierTable, levels: usize) -> Vec<f64> {
    (0..=levels)
        .map(|k| {
            let mut columns: BTreeMap<(MultiIndex, usize), f64> = BTreeMap::new();
            for (index, s, v) in table.iter() {
                let tail = index.tail(k);
                if !tail.is_zero() {
                    *columns.entry((tail, s)).or_insert(0.0) += v;
                }
            }
            columns.values().map(|c| c * c).sum::<f64>().sqrt()
        })
        .collect()
}

/// Norm on the martingale Hardy space of `G^m`: `T1 + T2` with
/// `T1 = max_{k>=0} T1(k)` and `T2 = max_k (sum_s (sum_{max_support(γ)=k} λ_{γ,s})^2)^{1/2}`.
/// The `k = 0` level of `T2` carries the zero frequency.
pub fn martingale_hardy_multiplier_norm(table: &MultiplierTable, group: &GroupSpec) -> Result<TwoTermNorm> {
    table.validate_for(group)?;
    let depth = group.depth();
    let t1 = nonzero_tail_levels(table, depth);
    let mut sums = vec![vec![0.0; table.channels()]; depth + 1];
    for (index, s, v) in table.iter() {
        sums[index.max_support()][s] += v;
    }
    let t2 = sums.iter().map(|ch| ch.iter().map(|c| c * c).sum::<f64>().sqrt()).collect();
    Ok(TwoTermNorm::from_levels(t1, t2, None))
}

/// Norm on Hardy martingales: `T1 + T2` where `T1 = max_{k>=1}` of the F-norm
/// of `n_k -> sum_{n_{<k}} λ_{(n_{<k}, n_k)}` over indices with
/// `max_support = k`, and `T2 = max_{k>=0} T1(k)` as in the adapted case.
pub fn hardy_last_multiplier_norm(table: &MultiplierTable) -> Result<TwoTermNorm> {
    if table.channels() != 1 {
        return Err(Error::InvalidArgument("Hardy-martingale multipliers are scalar (one channel)".into()));
    }
    table.validate_cone()?;
    let levels = table.max_support();
    let mut marginals: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); levels + 1];
    for (index, _, v) in table.iter() {
        let k = index.max_support();
        *marginals[k].entry(index.get(k) as usize).or_insert(0.0) += v;
    }
    let mut t1 = vec![0.0; levels + 1];
    let mut blocks = vec![None; levels + 1];
    for k in 1..=levels {
        let top = marginals[k].keys().next_back().copied().unwrap_or(0);
        let mut seq = vec![0.0; top + 1];
        for (&n, &v) in &marginals[k] {
            seq[n] = v;
        }
        let f = fefferman_norm(&seq)?;
        t1[k] = f.value;
        blocks[k] = f.maximizing_a;
    }
    let t2 = nonzero_tail_levels(table, levels);
    let (t1_level, _) = argmax(&t1);
    Ok(TwoTermNorm::from_levels(t1, t2, blocks[t1_level]))
}
