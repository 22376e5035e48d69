//! Forward and inverse transform on T_8 x Z_3, with Parseval.

use martingale_multipliers::harmonics::{build_group, dft_forward, dft_inverse, GroupFunction, MultiIndex};
use martingale_multipliers::rng::{complex_gaussian, seeded};

fn main() -> martingale_multipliers::Result<()> {
    let g = build_group(&[8, 3], &[true, false])?;
    let mut rng = seeded(1);
    let f = GroupFunction::scalar(g.clone(), (0..g.size()).map(|_| complex_gaussian(&mut rng)).collect())?;
    let spec = dft_forward(&f);
    println!("group {g}, {} coefficients", spec.raw().len());
    for idx in [MultiIndex::zero(), MultiIndex::new(vec![1]), MultiIndex::new(vec![-3, 2])] {
        println!("  f^({:?}) = {:.6}", idx.entries(), spec.coefficient(&idx, 0)?);
    }
    println!("E|f|^2 = {:.12}, sum |f^|^2 = {:.12}", f.mean_sqr(), spec.energy());
    println!("round-trip error {:.3e}", dft_inverse(&spec).max_abs_diff(&f));
    Ok(())
}
