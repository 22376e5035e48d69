//! Measured brackets for every equivalence the harness knows about.

use martingale_multipliers::harmonics::GroupSpec;
use martingale_multipliers::oracles::equivalence::{equivalence_report, Equivalence, EquivalenceConfig};

fn main() -> martingale_multipliers::Result<()> {
    let tori: Vec<_> = (1..=3).map(|m| GroupSpec::torus(8, m)).collect::<Result<_, _>>()?;
    let cyclic = vec![GroupSpec::cyclic(2, 3)?, GroupSpec::cyclic(3, 2)?, GroupSpec::cyclic(4, 3)?];
    for which in Equivalence::ALL {
        let groups = if matches!(
            which,
            Equivalence::SquareFunctionVsL1
                | Equivalence::DavisGarsiaVsSquareFunction
                | Equivalence::MullerConstrainedVsUnconstrained
        ) {
            tori.clone()
        } else {
            cyclic.clone()
        };
        let trials = if which == Equivalence::SquareFunctionVsL1 { 100 } else { 12 };
        let r = equivalence_report(which, &EquivalenceConfig::new(groups), trials, 7)?;
        println!(
            "{:<38} [{:.5}, {:.5}]  extremes at trials {} and {}",
            which.tag(),
            r.min_ratio,
            r.max_ratio,
            r.argmin,
            r.argmax
        );
    }
    Ok(())
}
