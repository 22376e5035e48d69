//! Sampled ratios for `λ_j = 1/j` on a discretized circle, plus the
//! necessity probes for a two-variable table.

use martingale_multipliers::harmonics::GroupSpec;
use martingale_multipliers::multiplier::{fefferman_norm, hardy_last_multiplier_norm, MultiplierTable};
use martingale_multipliers::oracles::primal::{necessity_probe, primal_ratio_search, RatioProblem, SamplerConfig};

fn main() -> martingale_multipliers::Result<()> {
    let circle = GroupSpec::torus(256, 1)?;
    let lambda: Vec<f64> = (0..=64).map(|j| if j == 0 { 0.0 } else { 1.0 / j as f64 }).collect();
    let f = fefferman_norm(&lambda)?;
    let stats = primal_ratio_search(
        RatioProblem::HardyTorus { lambda: &lambda, group: &circle },
        &SamplerConfig { degree: 128 },
        200,
        3,
    )?;
    println!("F-norm {:.6}; max ratio {:.6} at {}; elementary bound {:.6}", f.value, stats.max_ratio, stats.argmax, stats.proven_upper_bound);

    let g = GroupSpec::torus(8, 2)?;
    let table = MultiplierTable::scalar((1..=4).flat_map(|a| [(vec![a], 1.0), (vec![a - 2, 2], 0.5)]))?;
    let norm = hardy_last_multiplier_norm(&table)?;
    let probe = necessity_probe(&table, &g)?;
    println!("table norm {:.6} (T1 {:.6}); best probe {:.6} via {}", norm.value, norm.t1, probe.sup_ratio, probe.witness);
    Ok(())
}
