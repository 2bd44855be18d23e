//! The spectral toolbox on J_M^d: cube indicator transforms against their
//! brute-force lattice sums, ball transforms with the Bessel main term and
//! shell remainder, and the small-angle counting lemma.

use discrepancy::spectral::{
    ball_decomposition_check, ball_transform, bessel::bessel_j_half, bessel_main_term,
    cube_transform, cube_transform_brute, cyclic_small_angle_count, sinc_product_g,
};
use discrepancy::Result;
use num_rational::Ratio;

fn main() -> Result<()> {
    let m = 32u64;

    // closed form vs defining lattice sum
    let k = [5i64, -12];
    let fast = cube_transform(&k, 7, m);
    let brute = cube_transform_brute(&k, 7, m);
    println!("cube transform   = {fast:.12}");
    println!("lattice sum      = {brute:.12}");

    // counting lemma: members of the cyclic group within angle 2 pi eps
    let count = cyclic_small_angle_count(3, 64, Ratio::new(1, 16))?;
    println!("small angles     = {count} of 32 (bound 2 eps M = 8)");

    // ball transform pieces at a shifted center
    let q = [0.004f64, -0.006];
    let kb = [3i64, 1];
    let chi = ball_transform(&kb, 0.2, 64, &q)?;
    let g = sinc_product_g(&[kb[0] as f64 / 64.0, kb[1] as f64 / 64.0]);
    let main = bessel_main_term(&kb, 0.2, 64)?;
    let (rem, e) = ball_decomposition_check(&kb, 0.2, 64, &q)?;
    println!("chi_hat          = {chi:.6}");
    println!("G(k/M)           = {g:.6}");
    println!("Bessel main term = {main:.6}");
    println!("|chi G - I|      = {rem:.6} <= |E| = {e:.6}");

    // the Bessel evaluator behind it
    for (two_a, w) in [(2u32, 0.5f64), (2, 25.0), (3, 25.0), (4, 100.0)] {
        println!("J_{}({w}) = {:.12}", two_a as f64 / 2.0, bessel_j_half(two_a, w)?);
    }
    Ok(())
}
