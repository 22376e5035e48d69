//! Block-square norm of a one-dimensional multiplier sequence.

use martingale_multipliers::multiplier::fefferman_norm;

fn main() -> martingale_multipliers::Result<()> {
    let mut ones = vec![1.0; 9];
    ones[0] = 0.0;
    let f = fefferman_norm(&ones)?;
    println!("all ones on [1, 8]: {:.12} (sqrt 18 = {:.12}), a = {:?}", f.value, 18f64.sqrt(), f.maximizing_a);

    for t in [1usize << 10, 1 << 12, 1 << 13] {
        let harmonic: Vec<f64> = (0..=t).map(|j| if j == 0 { 0.0 } else { 1.0 / j as f64 }).collect();
        let f = fefferman_norm(&harmonic)?;
        println!("1/j up to {t:>5}: {:.9} (a = {:?})", f.value, f.maximizing_a);
    }
    Ok(())
}
