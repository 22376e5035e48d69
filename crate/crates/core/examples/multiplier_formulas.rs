//! The adapted, martingale-Hardy and Hardy-martingale multiplier norms side by side.

use martingale_multipliers::harmonics::{GroupSpec, MultiIndex};
use martingale_multipliers::multiplier::{
    adapted_multiplier_norm, hardy_last_multiplier_norm, martingale_hardy_multiplier_norm, GradedMultiplierFamily,
    MultiplierTable,
};

fn main() -> martingale_multipliers::Result<()> {
    let g = GroupSpec::torus(8, 2)?;
    let table = MultiplierTable::scalar([(vec![1], 1.0), (vec![2], 1.0), (vec![-1, 1], 0.5), (vec![3, 2], 0.25)])?;

    let cor = martingale_hardy_multiplier_norm(&table, &g)?;
    println!("martingale Hardy space: {:.6} = T1 {:.6} + T2 {:.6}", cor.value, cor.t1, cor.t2);
    let last = hardy_last_multiplier_norm(&table)?;
    println!("Hardy martingales:      {:.6} = T1 {:.6} + T2 {:.6}", last.value, last.t1, last.t2);

    let family = GradedMultiplierFamily::from_table_by_support(&table)?;
    let adapted = adapted_multiplier_norm(&family, &g)?;
    println!("adapted (graded by support): {:.6}, per level {:?}", adapted.value, adapted.per_level);

    let mut single = GradedMultiplierFamily::new(1)?;
    single.insert(2, MultiIndex::new(vec![0, 3]), 0, 0.7)?;
    println!("single entry 0.7: {:.6}", adapted_multiplier_norm(&single, &g)?.value);
    Ok(())
}
