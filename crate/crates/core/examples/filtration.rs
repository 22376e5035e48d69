//! Conditional expectations, martingale differences and square functions.

use martingale_multipliers::filtration::{
    conditional_expectation, conditional_square_norm, martingale_differences, square_function_norm,
};
use martingale_multipliers::harmonics::{GroupFunction, GroupSpec};
use martingale_multipliers::rng::{complex_gaussian, seeded};

fn main() -> martingale_multipliers::Result<()> {
    let g = GroupSpec::cyclic(3, 3)?;
    let mut rng = seeded(4);
    let f = GroupFunction::scalar(g.clone(), (0..g.size()).map(|_| complex_gaussian(&mut rng)).collect())?;
    for k in 0..=g.depth() {
        let e = conditional_expectation(&f, k)?;
        println!("E_{k} f at x = 0: {:.4}", e.values()[0]);
    }
    let md = martingale_differences(&f);
    println!("reconstruction error {:.2e}", md.reconstruct().max_abs_diff(&f));
    println!("E|f|      = {:.6}", f.l1_norm());
    println!("E S(f)    = {:.6}", square_function_norm(&f));
    println!("E s(f)    = {:.6}", conditional_square_norm(&f));
    Ok(())
}
