//! Two-radius toroidal ball discrepancy: the rasterized field, the
//! per-point Fourier formula check, the cosine-separation floor behind
//! the d != 1 (mod 4) hypothesis, and the Montgomery-type verdict.

use discrepancy::torus_ball::{
    ball_disc, ball_fourier_identity_check, cosine_floor_scan, theorem3_verify, two_radius_l2,
};
use discrepancy::geometry::{gen_uniform_random, GridSpec, Mode};
use discrepancy::Result;

fn main() -> Result<()> {
    let ps = gen_uniform_random(8, 2, 11, Mode::Toroidal)?;
    let (r, m) = (0.2f64, 64u64);
    let grid = GridSpec::torus(2, m)?;

    println!("D(j = (3,3), r)  = {:.6}", ball_disc(&ps, &grid, &[3, 3], r)?);
    let norm = two_radius_l2(&ps, &grid, r)?;
    println!("two-radius l2    = {:.6} (mean squares {:.4} / {:.4})",
        norm.l2, norm.per_radius[0], norm.per_radius[1]);

    // the transform of the field decomposes point by point into shifted
    // ball lattice sums; verify over the full spectrum
    let err = ball_fourier_identity_check(&ps, &grid, r)?;
    println!("Fourier formula  = max relative error {err:.2e}");

    // cos^2(w1) + cos^2(w2) stays away from zero when d != 1 (mod 4)
    for d in [2usize, 3, 4] {
        let (floor, at) = cosine_floor_scan(d, r, 128, 0.0)?;
        println!("cosine floor d={d} : {floor:.4} (argmin |k| = {at:.2})");
    }
    println!("cosine floor d=5 : {:?}", cosine_floor_scan(5, r, 128, 0.0).err());

    // the verdict picks M = even-ceil(C N^(1+1/(2d)) / r) itself
    let report = theorem3_verify(&ps, r, None, None, "random:seed=11")?;
    println!("\n{}", report.to_json());
    Ok(())
}
