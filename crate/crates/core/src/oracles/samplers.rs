//! Seeded random inputs for the oracles and the experiment harness.

use rand::seq::index::sample;
use rand::Rng;

use crate::error::Result;
use crate::filtration::AdaptedSequence;
use crate::harmonics::GroupSpec;
use crate::multiplier::{GradedMultiplierFamily, MultiplierTable};
use crate::rng::{complex_gaussian, seeded, ExperimentRng};

/// Adapted sequence with independent standard complex Gaussian atoms.
pub fn gaussian_adapted(group: &GroupSpec, channels: usize, rng: &mut ExperimentRng) -> Result<AdaptedSequence> {
    let atoms = (0..=group.depth())
        .map(|k| (0..group.prefix_size(k) * channels).map(|_| complex_gaussian(rng)).collect())
        .collect();
    AdaptedSequence::from_atoms(group.clone(), channels, atoms)
}

/// `support` distinct scalar entries, values uniform in `(0, 1]`.
pub fn random_table(group: &GroupSpec, support: usize, rng: &mut ExperimentRng) -> Result<MultiplierTable> {
    let all: Vec<_> = group.indices().collect();
    let mut t = MultiplierTable::new(1)?;
    for i in sample(rng, all.len(), support.min(all.len())) {
        t.insert(all[i].clone(), 0, 1.0 - rng.random_range(0.0..1.0))?;
    }
    Ok(t)
}

/// Like [`random_table`] but supported on indices whose last nonzero entry is positive.
pub fn random_cone_table(group: &GroupSpec, support: usize, seed: u64) -> Result<MultiplierTable> {
    let mut rng = seeded(seed);
    let cone: Vec<_> = group.indices().filter(|i| i.is_last_positive()).collect();
    let mut t = MultiplierTable::new(1)?;
    for i in sample(&mut rng, cone.len(), support.min(cone.len())) {
        t.insert(cone[i].clone(), 0, 1.0 - rng.random_range(0.0..1.0))?;
    }
    Ok(t)
}

/// `support` distinct `(grade, index, channel)` entries with
/// `max_support(index) <= grade`, values uniform in `(0, 1]`.
pub fn random_graded_family(group: &GroupSpec, channels: usize, support: usize, seed: u64) -> Result<GradedMultiplierFamily> {
    let mut rng = seeded(seed);
    let mut slots = Vec::new();
    for j in 0..=group.depth() {
        let prefix = group.truncate(j);
        for p in 0..prefix.size() {
            for s in 0..channels {
                slots.push((j, prefix.index_at(p), s));
            }
        }
    }
    let mut f = GradedMultiplierFamily::new(channels)?;
    for i in sample(&mut rng, slots.len(), support.min(slots.len())) {
        let (j, idx, s) = slots[i].clone();
        f.insert(j, idx, s, 1.0 - rng.random_range(0.0..1.0))?;
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samplers_respect_their_contracts() {
        let g = GroupSpec::torus(4, 2).unwrap();
        let t = random_cone_table(&g, 5, 3).unwrap();
        assert_eq!(t.len(), 5);
        assert!(t.validate_cone().is_ok());
        let f = random_graded_family(&GroupSpec::cyclic(3, 3).unwrap(), 2, 9, 4).unwrap();
        assert_eq!(f.support_size(), 9);
        assert!(f.iter().all(|(j, i, _, v)| i.max_support() <= j && v > 0.0 && v <= 1.0));
        assert_eq!(random_graded_family(&GroupSpec::cyclic(3, 3).unwrap(), 2, 9, 4).unwrap(), f);
    }
}
