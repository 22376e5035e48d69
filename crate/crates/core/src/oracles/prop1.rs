//! Multiplier norm through duality: the best constant in
//! `sum λ |<F^_j(γ), e_s>| <= C ||F||` equals
//! `sup_{|c|=1} || sum c λ γ ⊗ e_j ⊗ e_s ||_{dual}`.
//!
//! For adapted sequences the dual norm is evaluated with the Weisz formula.
//! Choosing `c = conj(γ_head(x))` for a level `k` and a point `x ∈ G^k`
//! aligns every column sum at `(k, x)`, so the candidates built that way
//! reach the closed-form [`adapted_multiplier_norm`](crate::multiplier::adapted_multiplier_norm)
//! exactly.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtration::{weisz_dual_norm, AdaptedSequence};
use crate::harmonics::{GroupSpec, MultiIndex};
use crate::multiplier::GradedMultiplierFamily;
use crate::rng::seeded;

/// Largest real-sign enumeration attempted (`2^20` candidates).
pub const MAX_EXHAUSTIVE_SUPPORT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceTag {
    /// Adapted sequences `L1(G^m, [F_k], l2(N, l2(S)))`.
    AdaptedL1,
    /// Analytic functions on a single discretized torus, normed by `L1`.
    HardyTorus,
    /// Hardy martingales on a torus product, normed by the square function.
    HardyLast,
}

impl std::str::FromStr for SpaceTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adapted-l1" => Ok(SpaceTag::AdaptedL1),
            "hardy-torus" => Ok(SpaceTag::HardyTorus),
            "hardy-last" => Ok(SpaceTag::HardyLast),
            other => Err(Error::InvalidArgument(format!("unknown space tag `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignStrategy {
    /// Every `c ∈ {±1}^support`; falls back to optimal-character plus random
    /// restarts beyond `2^20` candidates.
    ExhaustiveRealSigns,
    /// `c = conj(γ_head(x))` for every level `k` and point `x ∈ G^k`.
    OptimalCharacter,
    /// Uniformly random unimodular `c`.
    RandomRestarts { restarts: usize, seed: u64 },
}

/// Unimodular signs, one per support entry of a family in its canonical order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignAssignment {
    pub signs: Vec<Complex64>,
}

impl SignAssignment {
    pub fn new(signs: Vec<Complex64>) -> Result<Self> {
        if let Some(c) = signs.iter().find(|c| (c.norm() - 1.0).abs() > 1e-12) {
            return Err(Error::InvalidArgument(format!("sign {c} is not unimodular")));
        }
        Ok(SignAssignment { signs })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop1Value {
    pub value: f64,
    pub candidates: usize,
    /// Strategy actually run (differs from the request on fallback).
    pub strategy: SignStrategy,
    pub best_signs: SignAssignment,
}

/// Precomputed characters for every support entry of a family.
pub struct DualFieldBuilder<'a> {
    group: &'a GroupSpec,
    channels: usize,
    entries: Vec<(usize, MultiIndex, usize, f64)>,
    characters: Vec<Vec<Complex64>>,
}

impl<'a> DualFieldBuilder<'a> {
    pub fn new(family: &GradedMultiplierFamily, group: &'a GroupSpec) -> Result<Self> {
        family.validate_for(group)?;
        let entries: Vec<_> = family.iter().map(|(j, i, s, v)| (j, i.clone(), s, v)).collect();
        let characters = entries
            .iter()
            .map(|(_, idx, _, _)| group.character(idx).map(|f| f.into_values()))
            .collect::<Result<_>>()?;
        Ok(DualFieldBuilder { group, channels: family.channels(), entries, characters })
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    /// `Φ_j = sum_{γ,s} c λ^{(j)}_{γ,s} γ e_s` as an adapted sequence.
    pub fn assemble(&self, signs: &SignAssignment) -> AdaptedSequence {
        let g = self.group;
        let c = self.channels;
        let mut atoms: Vec<Vec<Complex64>> =
            (0..=g.depth()).map(|k| vec![Complex64::new(0.0, 0.0); g.prefix_size(k) * c]).collect();
        for ((j, _, s, v), (chi, sign)) in self.entries.iter().zip(self.characters.iter().zip(&signs.signs)) {
            let block = g.suffix_size(*j);
            let w = sign * *v;
            for (atom, slot) in atoms[*j].chunks_mut(c).enumerate() {
                slot[*s] += w * chi[atom * block];
            }
        }
        AdaptedSequence::from_atoms(g.clone(), c, atoms).expect("atoms sized by construction")
    }

    pub fn evaluate(&self, signs: &SignAssignment) -> f64 {
        weisz_dual_norm(&self.assemble(signs))
    }

    /// `c = conj(γ_head(x))` for level `k` and prefix point `x`.
    pub fn optimal_character_signs(&self, k: usize, x: &[usize]) -> SignAssignment {
        let signs = self
            .entries
            .iter()
            .map(|(_, idx, _, _)| self.group.character_value(&idx.head(k), x).conj())
            .collect();
        SignAssignment { signs }
    }

    fn optimal_character_candidates(&self) -> Vec<SignAssignment> {
        let g = self.group;
        (0..=g.depth())
            .flat_map(|k| {
                let prefix = g.truncate(k);
                (0..prefix.size()).map(move |p| (k, prefix.coords(p)))
            })
            .map(|(k, x)| self.optimal_character_signs(k, &x))
            .collect()
    }

    fn random_candidates(&self, restarts: usize, seed: u64) -> Vec<SignAssignment> {
        let mut rng = seeded(seed);
        (0..restarts)
            .map(|_| SignAssignment {
                signs: (0..self.entries.len())
                    .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
                    .collect(),
            })
            .collect()
    }

    fn best_of(&self, candidates: Vec<SignAssignment>) -> (f64, SignAssignment, usize) {
        let n = candidates.len();
        let values: Vec<f64> = candidates.par_iter().map(|c| self.evaluate(c)).collect();
        let (best, value) = values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
        let signs = candidates.into_iter().nth(best).unwrap_or(SignAssignment { signs: vec![] });
        (value.max(0.0), signs, n)
    }

    /// Max of the Weisz dual norm over the candidates of `strategy`.
    pub fn search(&self, strategy: SignStrategy) -> Prop1Value {
        let n = self.entries.len();
        let (candidates, used) = match strategy {
            SignStrategy::ExhaustiveRealSigns if n <= MAX_EXHAUSTIVE_SUPPORT => {
                let all = (0u64..1 << n)
                    .map(|mask| SignAssignment {
                        signs: (0..n)
                            .map(|i| Complex64::new(if mask >> i & 1 == 1 { -1.0 } else { 1.0 }, 0.0))
                            .collect(),
                    })
                    .collect();
                (all, strategy)
            }
            SignStrategy::ExhaustiveRealSigns => {
                let fallback = SignStrategy::RandomRestarts { restarts: 1024, seed: 0 };
                let mut c = self.optimal_character_candidates();
                c.extend(self.random_candidates(1024, 0));
                (c, fallback)
            }
            SignStrategy::OptimalCharacter => (self.optimal_character_candidates(), strategy),
            SignStrategy::RandomRestarts { restarts, seed } => (self.random_candidates(restarts.max(1), seed), strategy),
        };
        let (value, best_signs, count) = self.best_of(candidates);
        Prop1Value { value, candidates: count, strategy: used, best_signs }
    }
}

/// Sign-search value of the multiplier norm on the given space.
pub fn prop1_dual_value(
    family: &GradedMultiplierFamily,
    group: &GroupSpec,
    space: SpaceTag,
    strategy: SignStrategy,
) -> Result<Prop1Value> {
    if space != SpaceTag::AdaptedL1 {
        return Err(Error::InvalidArgument(format!("sign search supports adapted-l1 only, got {space:?}")));
    }
    Ok(DualFieldBuilder::new(family, group)?.search(strategy))
}
