//! Sign-search value of the adapted multiplier norm against its closed form.

use martingale_multipliers::harmonics::GroupSpec;
use martingale_multipliers::multiplier::adapted_multiplier_norm;
use martingale_multipliers::oracles::prop1::{DualFieldBuilder, SignStrategy};
use martingale_multipliers::oracles::samplers::random_graded_family;

fn main() -> martingale_multipliers::Result<()> {
    let g = GroupSpec::cyclic(3, 2)?;
    for seed in 0..5 {
        let family = random_graded_family(&g, 2, 10, seed)?;
        let formula = adapted_multiplier_norm(&family, &g)?.value;
        let b = DualFieldBuilder::new(&family, &g)?;
        let opt = b.search(SignStrategy::OptimalCharacter);
        let real = b.search(SignStrategy::ExhaustiveRealSigns);
        let rand = b.search(SignStrategy::RandomRestarts { restarts: 32, seed });
        println!(
            "seed {seed}: formula {formula:.9}  optimal-character {:.9} ({} candidates)  real signs {:.9} ({})  random {:.9}",
            opt.value, opt.candidates, real.value, real.candidates, rand.value
        );
    }
    Ok(())
}
