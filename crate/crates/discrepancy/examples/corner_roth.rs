//! Corner (anchored-box) discrepancy on a grid: exact norms, a Haar
//! coefficient, and the Roth-type lower-bound verdict.

use discrepancy::corner::{haar_coefficient, theorem1_verify, CornerDiscrepancyField};
use discrepancy::geometry::{gen_uniform_random, GridSpec, Mode};
use discrepancy::haar::{BAdicBox, BAdicInterval};
use discrepancy::{bounds, Result};

fn main() -> Result<()> {
    // 50 seeded random points in [0,1)^2
    let ps = gen_uniform_random(50, 2, 7, Mode::Corner)?;

    // the theorem-driven grid: nu from b^(nu-2) <= N < b^(nu-1), M = b^(nu+tau)
    let (b, tau) = (2u32, 1u32);
    let nu = bounds::nu_from_n(b, ps.len())?;
    let grid = GridSpec::corner_badic(2, b, nu, tau)?;
    println!("N = {}, b = {b}, nu = {nu}, M = {}", ps.len(), grid.m());

    // exact field norms via prefix-sum counting
    let field = CornerDiscrepancyField::build(&ps, &grid)?;
    let norms = field.norms();
    println!("grid l2       = {:.6}   (exact square {})", norms.l2, norms.l2_sq);
    println!(
        "grid l-inf    = {:.6}   attained at j = {:?}",
        norms.linf.numer().to_string().parse::<f64>().unwrap()
            / norms.linf.denom().to_string().parse::<f64>().unwrap(),
        norms.linf_at
    );

    // one Haar coefficient: empty boxes carry exactly -N / b^(2d + 2 nu)
    let bx = BAdicBox::new(vec![
        BAdicInterval::new(b, 2, 1)?,
        BAdicInterval::new(b, nu - 2, 0)?,
    ])?;
    println!("<D_N, h_R>    = {}", haar_coefficient(&ps, &bx, &grid)?);

    // the lower-bound verdict as a BoundReport
    let report = theorem1_verify(&ps, b, tau, "random:seed=7")?;
    println!("\n{}", report.to_json());
    Ok(())
}
