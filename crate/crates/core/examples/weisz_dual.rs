//! Exact dual norm of L1(l2) against the Weisz formula.

use martingale_multipliers::filtration::{dual_norm_maximize, weisz_dual_norm};
use martingale_multipliers::harmonics::GroupSpec;
use martingale_multipliers::oracles::samplers::gaussian_adapted;
use martingale_multipliers::rng::seeded;

fn main() -> martingale_multipliers::Result<()> {
    for (n, depth) in [(2, 3), (3, 2), (4, 3)] {
        let g = GroupSpec::cyclic(n, depth)?;
        let phi = gaussian_adapted(&g, 2, &mut seeded(n as u64))?;
        let est = dual_norm_maximize(&phi, 50_000)?;
        let w = weisz_dual_norm(&phi);
        println!(
            "{g}: exact in [{:.8}, {:.8}] after {} iterations ({:?}), Weisz {:.8}, ratio {:.4}",
            est.value,
            est.upper_bound,
            est.iterations,
            est.status,
            w,
            est.value / w
        );
    }
    Ok(())
}
