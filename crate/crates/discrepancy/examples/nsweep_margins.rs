//! Sweep N for each theorem and print (N, lhs, rhs, margin) CSV rows -
//! the same output the `discrepancy sweep` subcommand writes to a file.

use discrepancy::corner::theorem1_verify;
use discrepancy::geometry::{gen_uniform_random, Mode};
use discrepancy::torus_ball::theorem3_verify;
use discrepancy::torus_cube::theorem2_verify;
use discrepancy::Result;

fn main() -> Result<()> {
    println!("theorem,n,lhs,rhs,margin");
    for n in [8usize, 16, 32, 64] {
        let ps = gen_uniform_random(n, 2, 1, Mode::Corner)?;
        let rep = theorem1_verify(&ps, 2, 1, "sweep")?;
        println!("1,{n},{:.6},{:.6},{:.3}", rep.lhs, rep.rhs, rep.margin);
    }
    for n in [5usize, 10, 20, 40] {
        let ps = gen_uniform_random(n, 2, 1, Mode::Toroidal)?;
        let rep = theorem2_verify(&ps, None, "sweep")?;
        println!("2,{n},{:.6},{:.6},{:.3}", rep.lhs, rep.rhs, rep.margin);
    }
    for n in [4usize, 8, 16] {
        let ps = gen_uniform_random(n, 2, 1, Mode::Toroidal)?;
        let rep = theorem3_verify(&ps, 0.2, None, None, "sweep")?;
        println!("3,{n},{:.6},{:.6},{:.3}", rep.lhs, rep.rhs, rep.margin);
    }
    Ok(())
}
