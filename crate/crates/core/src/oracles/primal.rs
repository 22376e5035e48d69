//! Primal side: `sum λ |f^(γ)|` against test functions, and seeded searches
//! for the largest ratio to the space norm.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::prop1::SpaceTag;
use crate::error::{Error, Result};
use crate::filtration::{adapted_l1_norm, AdaptedSequence};
use crate::hardy::{h1_last_norm, hardy_martingale_from_rng, phi_psi_test_function, require_torus, AnalyticPolynomial, PrefixKernel};
use crate::harmonics::{dft_forward, GroupFunction, GroupSpec, MultiIndex};
use crate::multiplier::{
    adapted_multiplier_norm, fefferman_norm, hardy_last_multiplier_norm, GradedMultiplierFamily, MultiplierTable,
};
use crate::rng::{complex_gaussian, derive_seed, seeded, ExperimentRng};

/// Tolerance for a sampled ratio above a proven bound.
pub const BOUND_SLACK: f64 = 1e-9;

/// `sum_{γ,s} λ_{γ,s} |<f^(γ), e_s>|`.
pub fn primal_pairing(table: &MultiplierTable, f: &GroupFunction) -> Result<f64> {
    if table.channels() != f.channels() {
        return Err(Error::ShapeMismatch);
    }
    table.validate_for(f.group())?;
    let spec = dft_forward(f);
    table
        .iter()
        .map(|(idx, s, v)| Ok(v * spec.coefficient(idx, s)?.norm()))
        .sum()
}

/// `sum_j sum_{γ,s} λ^{(j)}_{γ,s} |<F_j^(γ), e_s>|`.
pub fn adapted_primal_pairing(family: &GradedMultiplierFamily, seq: &AdaptedSequence) -> Result<f64> {
    if family.channels() != seq.channels() {
        return Err(Error::ShapeMismatch);
    }
    family.validate_for(seq.group())?;
    let mut total = 0.0;
    for j in 0..=family.max_grade().unwrap_or(0) {
        let (Some(table), Some(term)) = (family.grade(j), seq.term(j)) else { continue };
        total += primal_pairing(table, term)?;
    }
    Ok(total)
}

/// Multiplier and test-function space for a ratio search.
#[derive(Clone, Copy, Debug)]
pub enum RatioProblem<'a> {
    /// `λ_0..λ_M` on a single discretized torus; analytic samples, `L1` norm.
    HardyTorus { lambda: &'a [f64], group: &'a GroupSpec },
    /// Cone-supported scalar table; Hardy martingale samples, square-function norm.
    HardyLast { table: &'a MultiplierTable, group: &'a GroupSpec },
    /// Graded family; Gaussian adapted samples, `L1(l2)` norm.
    Adapted { family: &'a GradedMultiplierFamily, group: &'a GroupSpec },
}

impl RatioProblem<'_> {
    pub fn space(&self) -> SpaceTag {
        match self {
            RatioProblem::HardyTorus { .. } => SpaceTag::HardyTorus,
            RatioProblem::HardyLast { .. } => SpaceTag::HardyLast,
            RatioProblem::Adapted { .. } => SpaceTag::AdaptedL1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SamplerConfig {
    /// Highest analytic frequency per coordinate in Hardy samples.
    pub degree: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioSearchStats {
    pub space: SpaceTag,
    pub trials: usize,
    pub probes: usize,
    pub max_ratio: f64,
    /// `probe:<description>` or `trial:<i>:seed:<s>`.
    pub argmax: String,
    pub max_trial_ratio: f64,
    pub formula: &'static str,
    pub formula_value: f64,
    /// `max_ratio / formula_value` (0 when the formula vanishes).
    pub ratio_to_formula: f64,
    /// An elementary bound every ratio must respect.
    pub proven_upper_bound: f64,
    pub bound_respected: bool,
}

struct Prepared<'a> {
    problem: RatioProblem<'a>,
    formula: &'static str,
    formula_value: f64,
    bound: f64,
}

fn prepare<'a>(problem: RatioProblem<'a>, sampler: &SamplerConfig) -> Result<Prepared<'a>> {
    let check_degree = |group: &GroupSpec| -> Result<()> {
        if sampler.degree == 0 {
            return Err(Error::InvalidArgument("sampler degree must be >= 1".into()));
        }
        for i in 1..=group.depth() {
            let max = group.order(i) / 2;
            if sampler.degree > max {
                return Err(Error::DegreeTooLarge { degree: sampler.degree, max });
            }
        }
        Ok(())
    };
    match problem {
        RatioProblem::HardyTorus { lambda, group } => {
            require_torus(group)?;
            if group.depth() != 1 {
                return Err(Error::InvalidArgument("hardy-torus sampler needs a depth-1 torus".into()));
            }
            let (_, hi) = group.freq_range(1);
            if lambda.len() as i64 - 1 > hi {
                return Err(Error::FrequencyOutOfRange { coordinate: 1, value: lambda.len() as i64 - 1, lo: 0, hi });
            }
            check_degree(group)?;
            let f = fefferman_norm(lambda)?;
            // |f^(n)| <= ||f||_1 for every n.
            let bound = lambda.iter().skip(1).sum();
            Ok(Prepared { problem, formula: "fefferman_norm", formula_value: f.value, bound })
        }
        RatioProblem::HardyLast { table, group } => {
            require_torus(group)?;
            table.validate_for(group)?;
            check_degree(group)?;
            let f = hardy_last_multiplier_norm(table)?;
            // |f^(γ)| <= E|Δ_j f| <= E S(f) with j = max_support(γ).
            Ok(Prepared { problem, formula: "hardy_last_multiplier_norm", formula_value: f.value, bound: table.l1_mass() })
        }
        RatioProblem::Adapted { family, group } => {
            family.validate_for(group)?;
            let f = adapted_multiplier_norm(family, group)?;
            Ok(Prepared { problem, formula: "adapted_multiplier_norm", formula_value: f.value, bound: adapted_mass_bound(family) })
        }
    }
}

/// `(sum_j sum_s (sum_γ λ^{(j)}_{γ,s})^2)^{1/2}`: the sup norm of every
/// signed dual field, hence a bound on the adapted multiplier norm.
pub fn adapted_mass_bound(family: &GradedMultiplierFamily) -> f64 {
    let mut sums = std::collections::BTreeMap::<(usize, usize), f64>::new();
    for (j, _, s, v) in family.iter() {
        *sums.entry((j, s)).or_insert(0.0) += v;
    }
    sums.values().map(|v| v * v).sum::<f64>().sqrt()
}

impl Prepared<'_> {
    /// `(pairing, norm)` of a test object.
    fn ratio_of_function(&self, f: &GroupFunction) -> Result<Option<f64>> {
        let (pair, norm) = match self.problem {
            RatioProblem::HardyTorus { lambda, .. } => {
                let spec = dft_forward(f);
                let pair = lambda
                    .iter()
                    .enumerate()
                    .map(|(n, &v)| Ok(v * spec.coefficient(&MultiIndex::new(vec![n as i64]), 0)?.norm()))
                    .sum::<Result<f64>>()?;
                (pair, f.l1_norm())
            }
            RatioProblem::HardyLast { table, .. } => (primal_pairing(table, f)?, h1_last_norm(f)?.square_function),
            RatioProblem::Adapted { .. } => unreachable!("adapted problems use sequences"),
        };
        Ok((norm > 0.0).then(|| pair / norm))
    }

    fn ratio_of_sequence(&self, seq: &AdaptedSequence) -> Result<Option<f64>> {
        let RatioProblem::Adapted { family, .. } = self.problem else { unreachable!() };
        let norm = adapted_l1_norm(seq);
        (norm > 0.0).then(|| adapted_primal_pairing(family, seq).map(|p| p / norm)).transpose()
    }

    /// Deterministic probes: a character at every support point.
    fn probes(&self) -> Result<Vec<(String, f64)>> {
        let mut out = Vec::new();
        match self.problem {
            RatioProblem::HardyTorus { lambda, group } => {
                for n in 1..lambda.len() {
                    let chi = group.character(&MultiIndex::new(vec![n as i64]))?;
                    if let Some(r) = self.ratio_of_function(&chi)? {
                        out.push((format!("character:[{n}]"), r));
                    }
                }
            }
            RatioProblem::HardyLast { table, group } => {
                for (idx, _, _) in table.iter() {
                    if idx.is_zero() {
                        continue;
                    }
                    let chi = group.character(idx)?;
                    if let Some(r) = self.ratio_of_function(&chi)? {
                        out.push((format!("character:{:?}", idx.entries()), r));
                    }
                }
            }
            RatioProblem::Adapted { family, group } => {
                let c = family.channels();
                for (j, idx, s, _) in family.iter() {
                    let chi = group.character(idx)?;
                    let mut values = vec![Complex64::new(0.0, 0.0); group.size() * c];
                    for (p, z) in chi.values().iter().enumerate() {
                        values[p * c + s] = *z;
                    }
                    let mut terms = vec![GroupFunction::zeros(group.clone(), c); j + 1];
                    terms[j] = GroupFunction::new(group.clone(), c, values)?;
                    let seq = AdaptedSequence::new(group.clone(), c, terms)?;
                    if let Some(r) = self.ratio_of_sequence(&seq)? {
                        out.push((format!("character:grade{j}:{:?}:s{s}", idx.entries()), r));
                    }
                }
            }
        }
        Ok(out)
    }

    fn sample_ratio(&self, rng: &mut ExperimentRng, degree: usize) -> Result<Option<f64>> {
        match self.problem {
            RatioProblem::HardyTorus { group, .. } | RatioProblem::HardyLast { group, .. } => {
                self.ratio_of_function(&hardy_martingale_from_rng(group, degree, rng))
            }
            RatioProblem::Adapted { family, group } => {
                let c = family.channels();
                let atoms = (0..=group.depth())
                    .map(|k| (0..group.prefix_size(k) * c).map(|_| complex_gaussian(rng)).collect())
                    .collect();
                self.ratio_of_sequence(&AdaptedSequence::from_atoms(group.clone(), c, atoms)?)
            }
        }
    }
}

/// Attempts per trial before a sampler is declared degenerate.
const RESAMPLE_LIMIT: u64 = 64;

pub fn primal_ratio_search(
    problem: RatioProblem<'_>,
    sampler: &SamplerConfig,
    trials: usize,
    seed: u64,
) -> Result<RatioSearchStats> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let prepared = prepare(problem, sampler)?;
    let probes = prepared.probes()?;
    let sampled: Vec<(u64, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let trial_seed = derive_seed(seed, i);
            for attempt in 0..RESAMPLE_LIMIT {
                let s = if attempt == 0 { trial_seed } else { derive_seed(trial_seed, attempt) };
                if let Some(r) = prepared.sample_ratio(&mut seeded(s), sampler.degree)? {
                    return Ok((s, r));
                }
            }
            Err(Error::InvalidArgument("sampler produced only zero functions".into()))
        })
        .collect::<Result<_>>()?;

    let mut max_ratio = 0.0;
    let mut argmax = String::from("none");
    for (name, r) in &probes {
        if *r > max_ratio {
            max_ratio = *r;
            argmax = format!("probe:{name}");
        }
    }
    let mut max_trial_ratio = 0.0f64;
    for (i, (s, r)) in sampled.iter().enumerate() {
        max_trial_ratio = max_trial_ratio.max(*r);
        if *r > max_ratio {
            max_ratio = *r;
            argmax = format!("trial:{i}:seed:{s}");
        }
    }
    let ratio_to_formula = if prepared.formula_value > 0.0 { max_ratio / prepared.formula_value } else { 0.0 };
    Ok(RatioSearchStats {
        space: problem.space(),
        trials,
        probes: probes.len(),
        max_ratio,
        argmax,
        max_trial_ratio,
        formula: prepared.formula,
        formula_value: prepared.formula_value,
        ratio_to_formula,
        proven_upper_bound: prepared.bound,
        bound_respected: max_ratio <= prepared.bound + BOUND_SLACK * prepared.bound.max(1.0),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NecessityProbe {
    pub sup_ratio: f64,
    pub witness: String,
    pub probes: usize,
}

/// Largest `primal_pairing / square-function norm` over `φ ⊗ ψ` probes with
/// `φ` a point mass or constant and `ψ` a monomial, a modulated Fejér kernel,
/// or an indicator-like analytic block.
pub fn necessity_probe(table: &MultiplierTable, group: &GroupSpec) -> Result<NecessityProbe> {
    require_torus(group)?;
    table.validate_for(group)?;
    let mut best = NecessityProbe { sup_ratio: 0.0, witness: "none".into(), probes: 0 };
    for k in 1..=group.depth() {
        let (_, hi) = group.freq_range(k);
        let mut psis: Vec<(String, AnalyticPolynomial)> = Vec::new();
        for n in 1..=hi {
            psis.push((format!("monomial{n}"), AnalyticPolynomial::monomial(n)?));
        }
        for r in 0..=((hi - 1) / 2) {
            let base = AnalyticPolynomial::shifted_fejer(r as usize);
            for shift in 0..=(hi - 1 - 2 * r) {
                let coeffs = base.coeffs().iter().map(|&(n, c)| (n + shift, c)).collect();
                psis.push((format!("fejer{r}+{shift}"), AnalyticPolynomial::new(coeffs)?));
            }
        }
        for lo in 1..=hi {
            for top in lo..=hi {
                let coeffs = (lo..=top).map(|n| (n, Complex64::new(1.0, 0.0))).collect();
                psis.push((format!("block{lo}..{top}"), AnalyticPolynomial::new(coeffs)?));
            }
        }
        for (phi_name, phi) in [("point-mass", PrefixKernel::PointMass), ("one", PrefixKernel::One)] {
            for (psi_name, psi) in &psis {
                let f = phi_psi_test_function(group, k, &phi, psi)?;
                let norm = h1_last_norm(&f)?.square_function;
                best.probes += 1;
                if norm > 0.0 {
                    let r = primal_pairing(table, &f)? / norm;
                    if r > best.sup_ratio {
                        best.sup_ratio = r;
                        best.witness = format!("k{k}:{phi_name}:{psi_name}");
                    }
                }
            }
        }
    }
    Ok(best)
}
