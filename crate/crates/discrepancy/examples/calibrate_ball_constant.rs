//! Pre-registered calibration run for the two-radius ball constant.
//!
//! The two-radius lower bound guarantees `lhs >= c r^(d/2) N^(1/2-1/(2d))`
//! for *some* c > 0 but never names it. This binary runs the d = 2
//! calibration suite (random seeds 0..19 at N in {4, 8, 16, 32}, plus the
//! lattice and Hammersley sets at those sizes), prints every ratio
//! `lhs / (r^(d/2) N^(1/2-1/(2d)))`, and proposes `c = min/2`. The
//! resulting value is frozen as `bounds::THEOREM3_CALIBRATED_C`; rerun
//! this after touching the ball engine and compare.

use discrepancy::bounds::THEOREM3_BIG_C;
use discrepancy::geometry::{gen_hammersley, gen_lattice, gen_uniform_random, GridSpec, Mode};
use discrepancy::torus_ball::two_radius_l2;

fn even_ceil(x: f64) -> u64 {
    let mut m = x.ceil() as u64;
    m += m % 2;
    m
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = 0.2f64;
    let d = 2usize;
    let mut min_ratio = f64::INFINITY;
    let mut worst = String::new();
    println!("set,n,m,lhs,ratio");
    for n in [4usize, 8, 16, 32] {
        let m = even_ceil(THEOREM3_BIG_C * (n as f64).powf(1.25) / r);
        let grid = GridSpec::torus(d, m)?.cell_cap(u128::MAX)?;
        let scale = r.powf(d as f64 / 2.0) * (n as f64).powf(0.5 - 0.5 / d as f64);
        let mut sets: Vec<(String, discrepancy::PointSet)> = Vec::new();
        for seed in 0..20u64 {
            sets.push((
                format!("random-{seed}"),
                gen_uniform_random(n, d, seed, Mode::Toroidal)?,
            ));
        }
        sets.push((
            "hammersley".into(),
            gen_hammersley(2, n, Mode::Toroidal)?,
        ));
        let k = (n as f64).sqrt() as u64;
        if (k * k) as usize == n {
            sets.push((format!("lattice-{k}"), gen_lattice(k, d, Mode::Toroidal)?));
        }
        for (name, ps) in sets {
            let norm = two_radius_l2(&ps, &grid, r)?;
            let ratio = norm.l2 / scale;
            println!("{name},{n},{m},{:.6},{:.6}", norm.l2, ratio);
            if ratio < min_ratio {
                min_ratio = ratio;
                worst = format!("{name} at N={n}");
            }
        }
    }
    println!();
    println!("minimum ratio {min_ratio:.6} ({worst})");
    println!("calibrated c = min/2 = {:.6}", min_ratio / 2.0);
    Ok(())
}
