//! Exact Fourier analysis on finite products of cyclic groups.
//!
//! A [`GroupSpec`] describes `Z_{N_1} x ... x Z_{N_m}`. Elements are stored
//! lexicographically with coordinate 1 varying slowest, so averaging over the
//! coordinates `k+1..m` is a mean over contiguous blocks of length
//! `N_{k+1} * ... * N_m`. Every function and spectrum in the crate uses this
//! order.
//!
//! Coordinates flagged as torus coordinates carry signed frequency labels in
//! `(-N/2, N/2]`; plain cyclic coordinates use `0..N`. Both label a character
//! `x -> exp(2 pi i n x / N)`, so the flag only changes how frequencies are
//! named, never the transform itself.
//!
//! The forward transform is normalized by the uniform probability measure:
//! `f^(gamma) = E[f * conj(gamma)]`, hence a character has coefficient 1.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite truncation `G_1 x ... x G_m` of the product group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GroupSpecRepr", into = "GroupSpecRepr")]
pub struct GroupSpec {
    orders: Vec<usize>,
    torus: Vec<bool>,
    size: usize,
}

#[derive(Serialize, Deserialize)]
struct GroupSpecRepr {
    factor_orders: Vec<i64>,
    torus_flags: Vec<bool>,
}

impl TryFrom<GroupSpecRepr> for GroupSpec {
    type Error = Error;

    fn try_from(repr: GroupSpecRepr) -> Result<Self> {
        build_group(&repr.factor_orders, &repr.torus_flags)
    }
}

impl From<GroupSpec> for GroupSpecRepr {
    fn from(g: GroupSpec) -> Self {
        GroupSpecRepr {
            factor_orders: g.orders.iter().map(|&n| n as i64).collect(),
            torus_flags: g.torus,
        }
    }
}

/// Validates factor orders and torus flags into a [`GroupSpec`].
pub fn build_group(factor_orders: &[i64], torus_flags: &[bool]) -> Result<GroupSpec> {
    if factor_orders.len() != torus_flags.len() {
        return Err(Error::FlagLengthMismatch {
            flags: torus_flags.len(),
            depth: factor_orders.len(),
        });
    }
    let mut orders = Vec::with_capacity(factor_orders.len());
    let mut size: usize = 1;
    for (coordinate, &order) in factor_orders.iter().enumerate() {
        if order < 1 {
            return Err(Error::InvalidOrder { coordinate: coordinate + 1, order });
        }
        let n = usize::try_from(order).map_err(|_| Error::SizeOverflow)?;
        size = size.checked_mul(n).ok_or(Error::SizeOverflow)?;
        orders.push(n);
    }
    // Keep sizes exactly representable as f64 counts.
    if size > (1usize << 53) {
        return Err(Error::SizeOverflow);
    }
    Ok(GroupSpec { orders, torus: torus_flags.to_vec(), size })
}

impl GroupSpec {
    /// `Z_n^depth`.
    pub fn cyclic(n: usize, depth: usize) -> Result<Self> {
        build_group(&vec![n as i64; depth], &vec![false; depth])
    }

    /// The discretized torus `T_n^depth`.
    pub fn torus(n: usize, depth: usize) -> Result<Self> {
        build_group(&vec![n as i64; depth], &vec![true; depth])
    }

    pub fn depth(&self) -> usize {
        self.orders.len()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn torus_flags(&self) -> &[bool] {
        &self.torus
    }

    /// Order of coordinate `i` (1-based).
    pub fn order(&self, i: usize) -> usize {
        self.orders[i - 1]
    }

    pub fn is_torus(&self, i: usize) -> bool {
        self.torus[i - 1]
    }

    pub fn all_torus(&self) -> bool {
        self.torus.iter().all(|&t| t)
    }

    /// Inclusive label range of coordinate `i` (1-based).
    pub fn freq_range(&self, i: usize) -> (i64, i64) {
        let n = self.order(i) as i64;
        if self.is_torus(i) {
            let hi = n / 2;
            (hi - n + 1, hi)
        } else {
            (0, n - 1)
        }
    }

    /// Frequency label of residue `r` at coordinate `i`.
    pub fn label(&self, i: usize, r: usize) -> i64 {
        let n = self.order(i) as i64;
        let (_, hi) = self.freq_range(i);
        let r = r as i64;
        if r > hi {
            r - n
        } else {
            r
        }
    }

    /// Residue of a label at coordinate `i`, rejecting labels outside the range.
    pub fn residue(&self, i: usize, label: i64) -> Result<usize> {
        let (lo, hi) = self.freq_range(i);
        if label < lo || label > hi {
            return Err(Error::FrequencyOutOfRange { coordinate: i, value: label, lo, hi });
        }
        Ok(label.rem_euclid(self.order(i) as i64) as usize)
    }

    /// `N_1 * ... * N_k`.
    pub fn prefix_size(&self, k: usize) -> usize {
        self.orders[..k].iter().product()
    }

    /// `N_{k+1} * ... * N_m`: the length of an `F_k` atom in storage order.
    pub fn suffix_size(&self, k: usize) -> usize {
        self.orders[k..].iter().product()
    }

    /// The group made of the first `k` coordinates.
    pub fn truncate(&self, k: usize) -> GroupSpec {
        GroupSpec {
            orders: self.orders[..k].to_vec(),
            torus: self.torus[..k].to_vec(),
            size: self.prefix_size(k),
        }
    }

    /// Coordinates of the element at storage position `idx`.
    pub fn coords(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.depth()];
        for i in (0..self.depth()).rev() {
            out[i] = idx % self.orders[i];
            idx /= self.orders[i];
        }
        out
    }

    /// Storage position of an element given by coordinates (reduced mod `N_i`).
    pub fn position(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.orders)
            .fold(0, |acc, (&x, &n)| acc * n + x % n)
    }

    /// The index whose residues are the coordinates of storage position `idx`.
    pub fn index_at(&self, idx: usize) -> MultiIndex {
        let residues = self.coords(idx);
        MultiIndex::new(
            residues
                .iter()
                .enumerate()
                .map(|(i, &r)| self.label(i + 1, r))
                .collect(),
        )
    }

    /// Storage position of a frequency index, validating every label.
    pub fn index_position(&self, index: &MultiIndex) -> Result<usize> {
        let entries = index.entries();
        if entries.len() > self.depth() {
            return Err(Error::IndexTooLong {
                index: entries.to_vec(),
                len: entries.len(),
                depth: self.depth(),
            });
        }
        let mut pos = 0;
        for i in 1..=self.depth() {
            let r = self.residue(i, index.get(i))?;
            pos = pos * self.order(i) + r;
        }
        Ok(pos)
    }

    /// Evaluates the character `gamma` at the element with the given coordinates.
    pub fn character_value(&self, index: &MultiIndex, coords: &[usize]) -> Complex64 {
        let phase: f64 = (1..=self.depth().min(index.len()))
            .map(|i| {
                let n = self.order(i) as i64;
                let t = (index.get(i).rem_euclid(n) * coords[i - 1] as i64).rem_euclid(n);
                t as f64 / n as f64
            })
            .sum();
        Complex64::from_polar(1.0, 2.0 * PI * phase)
    }

    /// The character `gamma` as a scalar function on the group.
    pub fn character(&self, index: &MultiIndex) -> Result<GroupFunction> {
        self.index_position(index)?;
        let values = (0..self.size)
            .map(|p| self.character_value(index, &self.coords(p)))
            .collect();
        GroupFunction::new(self.clone(), 1, values)
    }

    /// Iterates over every frequency index in storage order.
    pub fn indices(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        (0..self.size).map(move |p| self.index_at(p))
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.depth() == 0 {
            return write!(f, "{{0}}");
        }
        let parts: Vec<String> = self
            .orders
            .iter()
            .zip(&self.torus)
            .map(|(n, &t)| if t { format!("T{n}") } else { format!("Z{n}") })
            .collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// A finitely supported frequency tuple. Trailing zeros are stripped, so two
/// indices naming the same character compare equal regardless of padding.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<i64>", into = "Vec<i64>")]
pub struct MultiIndex(Vec<i64>);

impl From<Vec<i64>> for MultiIndex {
    fn from(v: Vec<i64>) -> Self {
        MultiIndex::new(v)
    }
}

impl From<MultiIndex> for Vec<i64> {
    fn from(m: MultiIndex) -> Self {
        m.0
    }
}

impl MultiIndex {
    pub fn new(mut entries: Vec<i64>) -> Self {
        while entries.last() == Some(&0) {
            entries.pop();
        }
        MultiIndex(entries)
    }

    pub fn zero() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    /// Number of stored (non-trailing-zero) coordinates; equals `max_support`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Entry at coordinate `i` (1-based), zero beyond the stored support.
    pub fn get(&self, i: usize) -> i64 {
        self.0.get(i - 1).copied().unwrap_or(0)
    }

    /// Largest `j` with a nonzero entry; 0 for the zero index.
    pub fn max_support(&self) -> usize {
        self.0.len()
    }

    /// Membership in the cone `n >_last 0`.
    pub fn is_last_positive(&self) -> bool {
        self.0.last().is_some_and(|&v| v > 0)
    }

    /// The first `k` coordinates.
    pub fn head(&self, k: usize) -> MultiIndex {
        MultiIndex::new(self.0.iter().take(k).copied().collect())
    }

    /// Coordinates `k+1..` as a tuple of its own (re-indexed from 1).
    pub fn tail(&self, k: usize) -> MultiIndex {
        MultiIndex::new(self.0.iter().skip(k).copied().collect())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// A complex (optionally `C^channels`-valued) function on a finite product group.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupFunction {
    group: GroupSpec,
    channels: usize,
    values: Vec<Complex64>,
}

impl GroupFunction {
    /// `values[p * channels + s]` is channel `s` at storage position `p`.
    pub fn new(group: GroupSpec, channels: usize, values: Vec<Complex64>) -> Result<Self> {
        if channels == 0 {
            return Err(Error::ZeroChannels);
        }
        let expected = group.size() * channels;
        if values.len() != expected {
            return Err(Error::MalformedValues { got: values.len(), expected });
        }
        Ok(GroupFunction { group, channels, values })
    }

    pub fn scalar(group: GroupSpec, values: Vec<Complex64>) -> Result<Self> {
        Self::new(group, 1, values)
    }

    pub fn zeros(group: GroupSpec, channels: usize) -> Self {
        let n = group.size() * channels.max(1);
        GroupFunction { group, channels: channels.max(1), values: vec![Complex64::new(0.0, 0.0); n] }
    }

    /// Builds a scalar function from a closure of the element coordinates.
    pub fn from_fn(group: GroupSpec, mut f: impl FnMut(&[usize]) -> Complex64) -> Self {
        let values = (0..group.size()).map(|p| f(&group.coords(p))).collect();
        GroupFunction { group, channels: 1, values }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// The channel vector at storage position `p`.
    pub fn at(&self, p: usize) -> &[Complex64] {
        &self.values[p * self.channels..(p + 1) * self.channels]
    }

    pub fn same_shape(&self, other: &GroupFunction) -> bool {
        self.group == other.group && self.channels == other.channels
    }

    fn zip_with(&self, other: &GroupFunction, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if !self.same_shape(other) {
            return Err(Error::ShapeMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| op(a, b)).collect();
        Ok(GroupFunction { group: self.group.clone(), channels: self.channels, values })
    }

    pub fn add(&self, other: &GroupFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GroupFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product of a scalar function with `self`.
    pub fn mul_scalar_fn(&self, scalar: &GroupFunction) -> Result<Self> {
        if self.group != scalar.group || scalar.channels != 1 {
            return Err(Error::ShapeMismatch);
        }
        let c = self.channels;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| v * scalar.values[i / c])
            .collect();
        Ok(GroupFunction { group: self.group.clone(), channels: c, values })
    }

    pub fn scale(&self, t: Complex64) -> Self {
        GroupFunction {
            group: self.group.clone(),
            channels: self.channels,
            values: self.values.iter().map(|&v| v * t).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        GroupFunction {
            group: self.group.clone(),
            channels: self.channels,
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    /// Pointwise `||f(x)||_{l2(S)}^2`.
    pub fn pointwise_norm_sqr(&self) -> Vec<f64> {
        self.values
            .chunks(self.channels)
            .map(|c| c.iter().map(|v| v.norm_sqr()).sum())
            .collect()
    }

    /// `E ||f||`, the L1 norm with respect to the uniform probability.
    pub fn l1_norm(&self) -> f64 {
        let total: f64 = self.pointwise_norm_sqr().iter().map(|v| v.sqrt()).sum();
        total / self.group.size() as f64
    }

    /// `E ||f||^2`.
    pub fn mean_sqr(&self) -> f64 {
        let total: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        total / self.group.size() as f64
    }

    pub fn sup_norm(&self) -> f64 {
        self.pointwise_norm_sqr().iter().fold(0.0f64, |m, v| m.max(v.sqrt()))
    }

    /// The channel-wise mean `E f`.
    pub fn mean(&self) -> Vec<Complex64> {
        let mut acc = vec![Complex64::new(0.0, 0.0); self.channels];
        for chunk in self.values.chunks(self.channels) {
            for (a, v) in acc.iter_mut().zip(chunk) {
                *a += v;
            }
        }
        let n = self.group.size() as f64;
        acc.iter().map(|a| a / n).collect()
    }

    pub fn max_abs_diff(&self, other: &GroupFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()))
    }

    /// `x -> f(x + y)`.
    pub fn translate(&self, y: &[usize]) -> Self {
        let g = &self.group;
        let c = self.channels;
        let mut values = vec![Complex64::new(0.0, 0.0); self.values.len()];
        for p in 0..g.size() {
            let x = g.coords(p);
            let shifted: Vec<usize> = x.iter().zip(y).map(|(a, b)| a + b).collect();
            let q = g.position(&shifted);
            values[p * c..(p + 1) * c].copy_from_slice(&self.values[q * c..(q + 1) * c]);
        }
        GroupFunction { group: g.clone(), channels: c, values }
    }

    /// Re-embeds a function of the first `k` coordinates into `target`
    /// (constant in the remaining coordinates). `self.group()` must be the
    /// `k`-prefix of `target`.
    pub fn extend_to(&self, target: &GroupSpec) -> Result<Self> {
        let k = self.group.depth();
        if k > target.depth() || target.truncate(k) != self.group {
            return Err(Error::ShapeMismatch);
        }
        let block = target.suffix_size(k);
        let c = self.channels;
        let mut values = Vec::with_capacity(target.size() * c);
        for chunk in self.values.chunks(c) {
            for _ in 0..block {
                values.extend_from_slice(chunk);
            }
        }
        Ok(GroupFunction { group: target.clone(), channels: c, values })
    }
}

/// Fourier coefficients of a [`GroupFunction`], stored densely in the same
/// lexicographic order as group elements (a frequency's position is given by
/// the residues of its labels).
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumTable {
    group: GroupSpec,
    channels: usize,
    coeffs: Vec<Complex64>,
}

impl SpectrumTable {
    pub fn zeros(group: GroupSpec, channels: usize) -> Self {
        let n = group.size() * channels.max(1);
        SpectrumTable { group, channels: channels.max(1), coeffs: vec![Complex64::new(0.0, 0.0); n] }
    }

    /// Builds a spectrum from sparse `(index, channel, coefficient)` entries.
    /// Repeated keys accumulate.
    pub fn from_entries(
        group: GroupSpec,
        channels: usize,
        entries: impl IntoIterator<Item = (MultiIndex, usize, Complex64)>,
    ) -> Result<Self> {
        if channels == 0 {
            return Err(Error::ZeroChannels);
        }
        let mut table = Self::zeros(group, channels);
        for (index, s, c) in entries {
            if s >= channels {
                return Err(Error::ChannelOutOfRange { channel: s, channels });
            }
            let pos = table.group.index_position(&index)?;
            table.coeffs[pos * channels + s] += c;
        }
        Ok(table)
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn raw(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn raw_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn coefficient(&self, index: &MultiIndex, s: usize) -> Result<Complex64> {
        if s >= self.channels {
            return Err(Error::ChannelOutOfRange { channel: s, channels: self.channels });
        }
        let pos = self.group.index_position(index)?;
        Ok(self.coeffs[pos * self.channels + s])
    }

    /// `(index, coefficients per channel)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (MultiIndex, &[Complex64])> + '_ {
        self.coeffs
            .chunks(self.channels)
            .enumerate()
            .map(move |(p, c)| (self.group.index_at(p), c))
    }

    /// `sum_gamma ||f^(gamma)||^2`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

fn twiddles(n: usize, sign: f64) -> Vec<Complex64> {
    (0..n)
        .map(|j| Complex64::from_polar(1.0, sign * 2.0 * PI * j as f64 / n as f64))
        .collect()
}

/// Applies a length-`N_i` DFT along every coordinate in turn.
fn separable_transform(group: &GroupSpec, channels: usize, data: &mut [Complex64], sign: f64, normalize: bool) {
    let mut line = Vec::new();
    let mut out = Vec::new();
    for i in 1..=group.depth() {
        let n = group.order(i);
        if n == 1 {
            continue;
        }
        let w = twiddles(n, sign);
        let stride = group.suffix_size(i) * channels;
        let outer = group.prefix_size(i - 1);
        let scale = if normalize { 1.0 / n as f64 } else { 1.0 };
        for o in 0..outer {
            let base = o * n * stride;
            for r in 0..stride {
                line.clear();
                line.extend((0..n).map(|t| data[base + r + t * stride]));
                out.clear();
                out.extend((0..n).map(|freq| {
                    let acc: Complex64 = line.iter().enumerate().map(|(t, &v)| v * w[(freq * t) % n]).sum();
                    acc * scale
                }));
                for (t, &v) in out.iter().enumerate() {
                    data[base + r + t * stride] = v;
                }
            }
        }
    }
}

/// `f^(gamma) = E[f conj(gamma)]` for every character `gamma`.
pub fn dft_forward(f: &GroupFunction) -> SpectrumTable {
    let mut coeffs = f.values.clone();
    separable_transform(&f.group, f.channels, &mut coeffs, -1.0, true);
    SpectrumTable { group: f.group.clone(), channels: f.channels, coeffs }
}

/// `f(x) = sum_gamma F(gamma) gamma(x)`.
pub fn dft_inverse(spectrum: &SpectrumTable) -> GroupFunction {
    let mut values = spectrum.coeffs.clone();
    separable_transform(&spectrum.group, spectrum.channels, &mut values, 1.0, false);
    GroupFunction { group: spectrum.group.clone(), channels: spectrum.channels, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pseudo_random(group: &GroupSpec, channels: usize, seed: u64) -> GroupFunction {
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let values = (0..group.size() * channels).map(|_| c(next(), next())).collect();
        GroupFunction::new(group.clone(), channels, values).unwrap()
    }

    #[test]
    fn build_group_examples() {
        let g = build_group(&[2, 2], &[false, false]).unwrap();
        assert_eq!(g.size(), 4);
        let t = build_group(&[8], &[true]).unwrap();
        assert_eq!(t.freq_range(1), (-3, 4));
        let t3 = build_group(&[4, 4, 4], &[true, true, true]).unwrap();
        assert_eq!(t3.size(), 64);
        assert_eq!(t3.to_string(), "T4xT4xT4");
    }

    #[test]
    fn build_group_errors() {
        assert!(matches!(build_group(&[0], &[false]), Err(Error::InvalidOrder { .. })));
        assert!(matches!(build_group(&[-3], &[false]), Err(Error::InvalidOrder { .. })));
        assert!(matches!(build_group(&[2], &[]), Err(Error::FlagLengthMismatch { .. })));
        assert!(matches!(
            build_group(&[1 << 40, 1 << 40], &[false, false]),
            Err(Error::SizeOverflow)
        ));
    }

    #[test]
    fn odd_torus_labels_are_symmetric() {
        let g = GroupSpec::torus(3, 1).unwrap();
        assert_eq!(g.freq_range(1), (-1, 1));
        assert_eq!(g.label(1, 2), -1);
        assert_eq!(g.residue(1, -1).unwrap(), 2);
        assert!(g.residue(1, 2).is_err());
    }

    #[test]
    fn multi_index_support_and_cone() {
        assert_eq!(MultiIndex::zero().max_support(), 0);
        assert!(!MultiIndex::zero().is_last_positive());
        let n = MultiIndex::new(vec![-2, 3, 0, 0]);
        assert_eq!(n.entries(), &[-2, 3]);
        assert_eq!(n.max_support(), 2);
        assert!(n.is_last_positive());
        assert!(!MultiIndex::new(vec![1, -1]).is_last_positive());
        assert_eq!(n.tail(1), MultiIndex::new(vec![3]));
        assert_eq!(n.head(1), MultiIndex::new(vec![-2]));
    }

    #[test]
    fn storage_order_has_first_coordinate_slowest() {
        let g = GroupSpec::cyclic(3, 2).unwrap();
        assert_eq!(g.coords(1), vec![0, 1]);
        assert_eq!(g.coords(3), vec![1, 0]);
        assert_eq!(g.position(&[2, 1]), 7);
    }

    #[test]
    fn constant_has_single_coefficient() {
        let g = GroupSpec::cyclic(4, 1).unwrap();
        let f = GroupFunction::scalar(g, vec![c(1.0, 0.0); 4]).unwrap();
        let s = dft_forward(&f);
        assert!((s.coefficient(&MultiIndex::zero(), 0).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        for n in 1..4 {
            assert!(s.coefficient(&MultiIndex::new(vec![n]), 0).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn character_one_on_z4() {
        let g = GroupSpec::cyclic(4, 1).unwrap();
        let f = GroupFunction::scalar(g.clone(), vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)]).unwrap();
        let s = dft_forward(&f);
        assert!((s.coefficient(&MultiIndex::new(vec![1]), 0).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        assert!(s.energy() - 1.0 < 1e-14);

        let back = dft_inverse(&SpectrumTable::from_entries(g, 1, [(MultiIndex::new(vec![1]), 0, c(1.0, 0.0))]).unwrap());
        assert!(back.max_abs_diff(&f) < 1e-14);
    }

    #[test]
    fn delta_spectrum_inverts_to_constant() {
        let g = GroupSpec::cyclic(3, 2).unwrap();
        let val = c(0.5, -2.0);
        let s = SpectrumTable::from_entries(g.clone(), 1, [(MultiIndex::zero(), 0, val)]).unwrap();
        let f = dft_inverse(&s);
        assert!(f.values().iter().all(|v| (v - val).norm() < 1e-14));
    }

    #[test]
    fn out_of_range_index_is_rejected() {
        let g = GroupSpec::torus(8, 1).unwrap();
        let err = SpectrumTable::from_entries(g.clone(), 1, [(MultiIndex::new(vec![5]), 0, c(1.0, 0.0))]);
        assert!(matches!(err, Err(Error::FrequencyOutOfRange { .. })));
        let err = SpectrumTable::from_entries(g, 1, [(MultiIndex::new(vec![1, 1]), 0, c(1.0, 0.0))]);
        assert!(matches!(err, Err(Error::IndexTooLong { .. })));
    }

    #[test]
    fn parseval_on_z2_squared_by_direct_summation() {
        let g = GroupSpec::cyclic(2, 2).unwrap();
        let f = pseudo_random(&g, 1, 3);
        // direct: f^(n) = 1/4 sum_x f(x) (-1)^{n.x}
        let mut energy = 0.0;
        for n in 0..4 {
            let nc = g.coords(n);
            let mut acc = c(0.0, 0.0);
            for p in 0..4 {
                let x = g.coords(p);
                let sign = if (nc[0] * x[0] + nc[1] * x[1]).is_multiple_of(2) { 1.0 } else { -1.0 };
                acc += f.values()[p] * sign;
            }
            energy += (acc / 4.0).norm_sqr();
        }
        let spec = dft_forward(&f);
        assert!((spec.energy() - energy).abs() < 1e-14);
        assert!((spec.energy() - f.mean_sqr()).abs() < 1e-12 * f.mean_sqr());
    }

    #[test]
    fn round_trip_on_z3_squared_from_random_spectrum() {
        let g = GroupSpec::cyclic(3, 2).unwrap();
        let raw = pseudo_random(&g, 1, 9).into_values();
        let mut s = SpectrumTable::zeros(g, 1);
        s.raw_mut().copy_from_slice(&raw);
        let back = dft_forward(&dft_inverse(&s));
        let err = back.raw().iter().zip(s.raw()).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        assert!(err < 1e-12);
    }

    #[test]
    fn matches_naive_transform_with_torus_labels() {
        let g = build_group(&[4, 3], &[true, false]).unwrap();
        let f = pseudo_random(&g, 2, 11);
        let spec = dft_forward(&f);
        for idx in g.indices() {
            let chi = g.character(&idx).unwrap();
            for s in 0..2 {
                let naive: Complex64 = (0..g.size())
                    .map(|p| f.at(p)[s] * chi.values()[p].conj())
                    .sum::<Complex64>()
                    / g.size() as f64;
                assert!((naive - spec.coefficient(&idx, s).unwrap()).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn characters_are_orthonormal() {
        let g = build_group(&[3, 4], &[false, true]).unwrap();
        let chars: Vec<_> = g.indices().map(|i| g.character(&i).unwrap()).collect();
        for (a, ca) in chars.iter().enumerate() {
            for (b, cb) in chars.iter().enumerate() {
                let ip: Complex64 = ca.values().iter().zip(cb.values()).map(|(x, y)| x * y.conj()).sum::<Complex64>()
                    / g.size() as f64;
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((ip - c(expected, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn extend_to_repeats_blocks() {
        let g = GroupSpec::cyclic(2, 2).unwrap();
        let h = GroupFunction::scalar(g.truncate(1), vec![c(1.0, 0.0), c(2.0, 0.0)]).unwrap();
        let e = h.extend_to(&g).unwrap();
        let re: Vec<f64> = e.values().iter().map(|v| v.re).collect();
        assert_eq!(re, vec![1.0, 1.0, 2.0, 2.0]);
    }

    proptest! {
        #[test]
        fn round_trip_and_parseval(orders in proptest::collection::vec(1usize..6, 0..4),
                                   torus in proptest::collection::vec(any::<bool>(), 4),
                                   channels in 1usize..3, seed in any::<u64>()) {
            let flags = torus[..orders.len()].to_vec();
            let g = build_group(&orders.iter().map(|&n| n as i64).collect::<Vec<_>>(), &flags).unwrap();
            let f = pseudo_random(&g, channels, seed);
            let spec = dft_forward(&f);
            prop_assert!((spec.energy() - f.mean_sqr()).abs() <= 1e-12 * f.mean_sqr().max(1e-300));
            prop_assert!(dft_inverse(&spec).max_abs_diff(&f) < 1e-12);
        }

        #[test]
        fn shift_multiplies_by_character(n1 in 1usize..5, n2 in 1usize..5, y1 in 0usize..5, y2 in 0usize..5, seed in any::<u64>()) {
            let g = build_group(&[n1 as i64, n2 as i64], &[true, false]).unwrap();
            let f = pseudo_random(&g, 1, seed);
            let y = [y1 % n1, y2 % n2];
            let shifted = dft_forward(&f.translate(&y));
            let spec = dft_forward(&f);
            for idx in g.indices() {
                let expected = spec.coefficient(&idx, 0).unwrap() * g.character_value(&idx, &y);
                prop_assert!((shifted.coefficient(&idx, 0).unwrap() - expected).norm() < 1e-12);
            }
        }
    }
}
