//! The sharper d = 2 l-inf chain: the Haar test function F, the Riesz-type
//! product G = prod_r (1 + kappa f_r) - 1, and the resulting verdict that
//! some grid box carries discrepancy at least
//! kappa (nu+1) [(b-1) b^-7 - kappa b^-5 / (b-1-kappa)] / 2.

use discrepancy::corner::{build_f, build_g, theorem1_linf_verify};
use discrepancy::geometry::{gen_hammersley, GridSpec, Mode};
use discrepancy::{bounds, Result};
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive};

fn main() -> Result<()> {
    let ps = gen_hammersley(2, 48, Mode::Corner)?;
    let b = 2u32;
    let nu = bounds::nu_from_n(b, ps.len())?;
    let grid = GridSpec::corner_badic(2, b, nu, 1)?;
    println!("Hammersley N = {}, M = {}", ps.len(), grid.m());

    // F = sum over resolutions of the empty-box Haar sums
    let f = build_f(&ps, &grid)?;
    println!("card(H_nu^2)  = {}", f.card_h);
    println!("<D_N, F>      = {} (threshold passed: {})", f.pairing_total, f.inequality_verified);
    println!("||F||_2^2     = {}", f.norm_sq);
    for ((r, empty), pairing) in f.per_r.iter().zip(&f.pairings).take(3) {
        println!("  r = {r:?}: {empty} empty boxes, <D_N, f_r> = {pairing}");
    }

    // the product test function at the bracket-maximizing kappa;
    // everything is carried as exact rationals, shown here rounded
    let kappa = BigRational::from_f64(bounds::kappa_opt(b)).unwrap();
    let g = build_g(&ps, &grid, &kappa)?;
    let approx = |v: &BigRational| v.to_f64().unwrap_or(f64::NAN);
    println!("kappa         = {:.9}", bounds::kappa_opt(b));
    println!("||G||_1       = {:.9} (exact rational; always <= 2)", approx(&g.norm_l1));
    println!("<D_N, G>      = {:.9}", approx(&g.pairing));
    println!("implied bound = {:.9}", approx(&g.linf_bound));

    let report = theorem1_linf_verify(&ps, b, 1, None, "hammersley")?;
    println!("\n{}", report.to_json());
    Ok(())
}
