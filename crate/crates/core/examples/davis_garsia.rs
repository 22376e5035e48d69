//! Davis–Garsia splitting with and without the Hardy constraint.

use martingale_multipliers::filtration::square_function_norm;
use martingale_multipliers::hardy::sample_hardy_martingale;
use martingale_multipliers::harmonics::GroupSpec;
use martingale_multipliers::oracles::davis_garsia::{davis_garsia_solve, DavisGarsiaOptions};

fn main() -> martingale_multipliers::Result<()> {
    let g = GroupSpec::torus(8, 3)?;
    for seed in 0..4 {
        let f = sample_hardy_martingale(&g, 2, seed)?;
        let con = davis_garsia_solve(&f, &DavisGarsiaOptions::new(true, 1e-6, 2000))?;
        let mut opts = DavisGarsiaOptions::new(false, 1e-6, 2000);
        opts.warm_start = Some(con.g.clone());
        let unc = davis_garsia_solve(&f, &opts)?;
        println!(
            "seed {seed}: E S(f) {:.6}  constrained {:.6} ({} its)  unconstrained {:.6} ({} its)  ratio {:.5}",
            square_function_norm(&f),
            con.objective,
            con.iterations,
            unc.objective,
            unc.iterations,
            con.objective / unc.objective
        );
    }
    Ok(())
}
