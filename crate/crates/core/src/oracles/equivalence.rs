//! Measured two-sided brackets for norm equivalences whose constants are not
//! known in closed form.

use rayon::prelude::*;
use serde::Serialize;

use super::davis_garsia::{davis_garsia_solve, DavisGarsiaOptions};
use super::samplers::{gaussian_adapted, random_table};
use crate::error::{Error, Result};
use crate::filtration::{
    adapted_l1_norm, dual_norm_maximize, lepingle_project, square_function_norm, weisz_dual_norm,
};
use crate::hardy::{hardy_martingale_from_rng, require_torus};
use crate::harmonics::GroupSpec;
use crate::multiplier::martingale_hardy_multiplier_norm;
use crate::rng::{derive_seed, seeded, ExperimentRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Equivalence {
    /// `||f||_1 / E S(f)` on Hardy samples.
    SquareFunctionVsL1,
    /// Unconstrained Davis–Garsia objective over `E S(f)` on Hardy samples.
    DavisGarsiaVsSquareFunction,
    /// Hardy-constrained over unconstrained Davis–Garsia objective.
    MullerConstrainedVsUnconstrained,
    /// Exact dual norm over the Weisz formula on Gaussian adapted fields.
    WeiszVsExactDual,
    /// `(T1 + T2) / T1` for random scalar tables.
    CorollarySecondSummand,
    /// `||(F_k - E_{k-1}F_k)|| / ||F||` on Gaussian adapted sequences.
    LepingleProjection,
}

impl Equivalence {
    pub const ALL: [Equivalence; 6] = [
        Equivalence::SquareFunctionVsL1,
        Equivalence::DavisGarsiaVsSquareFunction,
        Equivalence::MullerConstrainedVsUnconstrained,
        Equivalence::WeiszVsExactDual,
        Equivalence::CorollarySecondSummand,
        Equivalence::LepingleProjection,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Equivalence::SquareFunctionVsL1 => "square-function-vs-l1",
            Equivalence::DavisGarsiaVsSquareFunction => "dg-vs-square-function",
            Equivalence::MullerConstrainedVsUnconstrained => "muller-constrained-vs-unconstrained",
            Equivalence::WeiszVsExactDual => "weisz-vs-exact-dual",
            Equivalence::CorollarySecondSummand => "corollary-second-summand",
            Equivalence::LepingleProjection => "lepingle-projection",
        }
    }

    fn needs_torus(self) -> bool {
        matches!(
            self,
            Equivalence::SquareFunctionVsL1
                | Equivalence::DavisGarsiaVsSquareFunction
                | Equivalence::MullerConstrainedVsUnconstrained
        )
    }
}

impl std::str::FromStr for Equivalence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Equivalence::ALL
            .into_iter()
            .find(|e| e.tag() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown equivalence tag `{s}`")))
    }
}

/// Sampler parameters; trial `i` runs on `groups[i % groups.len()]`.
#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceConfig {
    pub groups: Vec<GroupSpec>,
    /// Analytic degree of Hardy samples.
    pub degree: usize,
    /// Channels of adapted samples.
    pub channels: usize,
    /// Support size of random multiplier tables.
    pub support: usize,
    pub dg_tolerance: f64,
    pub dg_budget: usize,
    pub dual_budget: usize,
}

impl EquivalenceConfig {
    pub fn new(groups: Vec<GroupSpec>) -> Self {
        EquivalenceConfig { groups, degree: 2, channels: 1, support: 4, dg_tolerance: 1e-6, dg_budget: 2000, dual_budget: 20_000 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceRow {
    pub trial: usize,
    pub seed: u64,
    pub group: String,
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub equivalence: Equivalence,
    pub trials: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Trial numbers of the extremal samples.
    pub argmin: usize,
    pub argmax: usize,
    pub rows: Vec<EquivalenceRow>,
}

const RESAMPLE_LIMIT: u64 = 64;

/// `(numerator, denominator)` for one sample; a zero denominator asks for a resample.
fn measure(which: Equivalence, cfg: &EquivalenceConfig, group: &GroupSpec, rng: &mut ExperimentRng) -> Result<(f64, f64)> {
    match which {
        Equivalence::SquareFunctionVsL1 => {
            let f = hardy_martingale_from_rng(group, cfg.degree, rng);
            Ok((f.l1_norm(), square_function_norm(&f)))
        }
        Equivalence::DavisGarsiaVsSquareFunction => {
            let f = hardy_martingale_from_rng(group, cfg.degree, rng);
            let s = square_function_norm(&f);
            if s == 0.0 {
                return Ok((0.0, 0.0));
            }
            let dg = davis_garsia_solve(&f, &DavisGarsiaOptions::new(false, cfg.dg_tolerance, cfg.dg_budget))?;
            Ok((dg.objective, s))
        }
        Equivalence::MullerConstrainedVsUnconstrained => {
            let f = hardy_martingale_from_rng(group, cfg.degree, rng);
            if square_function_norm(&f) == 0.0 {
                return Ok((0.0, 0.0));
            }
            let (con, unc) = muller_pair(&f, cfg.dg_tolerance, cfg.dg_budget)?;
            Ok((con, unc))
        }
        Equivalence::WeiszVsExactDual => {
            let phi = gaussian_adapted(group, cfg.channels, rng)?;
            let w = weisz_dual_norm(&phi);
            if w == 0.0 {
                return Ok((0.0, 0.0));
            }
            Ok((dual_norm_maximize(&phi, cfg.dual_budget)?.value, w))
        }
        Equivalence::CorollarySecondSummand => {
            let t = random_table(group, cfg.support, rng)?;
            let n = martingale_hardy_multiplier_norm(&t, group)?;
            Ok((n.value, n.t1))
        }
        Equivalence::LepingleProjection => {
            let f = gaussian_adapted(group, cfg.channels, rng)?;
            Ok((adapted_l1_norm(&lepingle_project(&f)), adapted_l1_norm(&f)))
        }
    }
}

/// Constrained and unconstrained Davis–Garsia objectives, the latter
/// warm-started from the constrained optimum.
pub fn muller_pair(f: &crate::harmonics::GroupFunction, tolerance: f64, budget: usize) -> Result<(f64, f64)> {
    let con = davis_garsia_solve(f, &DavisGarsiaOptions::new(true, tolerance, budget))?;
    let mut opts = DavisGarsiaOptions::new(false, tolerance, budget);
    opts.warm_start = Some(con.g);
    let unc = davis_garsia_solve(f, &opts)?;
    Ok((con.objective, unc.objective))
}

pub fn equivalence_report(which: Equivalence, cfg: &EquivalenceConfig, trials: usize, seed: u64) -> Result<EquivalenceReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    if cfg.groups.is_empty() {
        return Err(Error::InvalidArgument("no sampler groups given".into()));
    }
    if which.needs_torus() {
        for g in &cfg.groups {
            require_torus(g)?;
            for i in 1..=g.depth() {
                let max = g.order(i) / 2;
                if cfg.degree == 0 || cfg.degree > max {
                    return Err(Error::DegreeTooLarge { degree: cfg.degree, max });
                }
            }
        }
    }
    let rows: Vec<EquivalenceRow> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let group = &cfg.groups[trial % cfg.groups.len()];
            let trial_seed = derive_seed(seed, trial as u64);
            for attempt in 0..RESAMPLE_LIMIT {
                let s = if attempt == 0 { trial_seed } else { derive_seed(trial_seed, attempt) };
                let (numerator, denominator) = measure(which, cfg, group, &mut seeded(s))?;
                if denominator > 0.0 {
                    return Ok(EquivalenceRow {
                        trial,
                        seed: s,
                        group: group.to_string(),
                        numerator,
                        denominator,
                        ratio: numerator / denominator,
                    });
                }
            }
            Err(Error::InvalidArgument(format!("trial {trial}: sampler produced only degenerate samples")))
        })
        .collect::<Result<_>>()?;
    let (mut argmin, mut argmax) = (0, 0);
    for (i, r) in rows.iter().enumerate() {
        if r.ratio < rows[argmin].ratio {
            argmin = i;
        }
        if r.ratio > rows[argmax].ratio {
            argmax = i;
        }
    }
    Ok(EquivalenceReport {
        equivalence: which,
        trials,
        min_ratio: rows[argmin].ratio,
        max_ratio: rows[argmax].ratio,
        argmin,
        argmax,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_tag_is_rejected() {
        assert!("bogus".parse::<Equivalence>().is_err());
        for e in Equivalence::ALL {
            assert_eq!(e.tag().parse::<Equivalence>().unwrap(), e);
        }
    }

    #[test]
    fn single_trial_gives_one_row() {
        let cfg = EquivalenceConfig::new(vec![GroupSpec::torus(8, 2).unwrap()]);
        let r = equivalence_report(Equivalence::SquareFunctionVsL1, &cfg, 1, 0).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert!(r.min_ratio > 0.0 && r.min_ratio == r.max_ratio);
    }

    #[test]
    fn reproducible_bit_for_bit() {
        let cfg = EquivalenceConfig::new(vec![GroupSpec::torus(8, 3).unwrap()]);
        let a = equivalence_report(Equivalence::SquareFunctionVsL1, &cfg, 20, 7).unwrap();
        let b = equivalence_report(Equivalence::SquareFunctionVsL1, &cfg, 20, 7).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.min_ratio >= 1.0 / 20.0 && a.max_ratio <= 20.0);
    }

    #[test]
    fn lepingle_and_corollary_ratios_are_sane() {
        let cfg = EquivalenceConfig::new(vec![GroupSpec::cyclic(2, 3).unwrap(), GroupSpec::cyclic(3, 2).unwrap()]);
        let l = equivalence_report(Equivalence::LepingleProjection, &cfg, 10, 1).unwrap();
        assert!(l.max_ratio <= 10.0);
        let c = equivalence_report(Equivalence::CorollarySecondSummand, &cfg, 10, 1).unwrap();
        assert!(c.min_ratio >= 1.0);
    }

    #[test]
    fn hardy_equivalences_need_a_torus() {
        let cfg = EquivalenceConfig::new(vec![GroupSpec::cyclic(8, 2).unwrap()]);
        assert!(equivalence_report(Equivalence::SquareFunctionVsL1, &cfg, 1, 0).is_err());
    }
}
