//! The generator suite and the point-set CSV format (decimal floats or
//! exact rationals `a/b`, with a `# d=<d> mode=<mode>` header).

use discrepancy::geometry::{
    gen_hammersley, gen_lattice, gen_uniform_random, gen_van_der_corput, radical_inverse,
    PointSet,
};
use discrepancy::{Mode, Result};

fn main() -> Result<()> {
    // radical inverses are exact rationals
    for n in 0..6u64 {
        print!("phi_3({n}) = {}  ", radical_inverse(3, n));
    }
    println!();

    let vdc = gen_van_der_corput(2, 8, Mode::Corner)?;
    let ham = gen_hammersley(2, 6, Mode::Corner)?;
    let lat = gen_lattice(3, 2, Mode::Corner)?;
    let rng = gen_uniform_random(4, 2, 42, Mode::Toroidal)?;
    println!(
        "van der Corput: {:?}",
        vdc.iter().map(|p| p[0].to_f64()).collect::<Vec<_>>()
    );
    println!("lattice 3x3 has {} points, Hammersley {}", lat.len(), ham.len());

    // CSV round trip preserves exact rational coordinates
    let mut buf = Vec::new();
    ham.write_csv(&mut buf)?;
    println!("--- CSV ---\n{}", String::from_utf8_lossy(&buf));
    let back = PointSet::read_csv(&buf[..])?;
    assert_eq!(back.len(), ham.len());
    assert_eq!(back.point(3), ham.point(3));

    let mut buf2 = Vec::new();
    rng.write_csv(&mut buf2)?;
    let back2 = PointSet::read_csv(&buf2[..])?;
    assert_eq!(back2.point(0), rng.point(0), "floats round-trip bit-exactly");
    println!("round trips exact for rational and float coordinates");
    Ok(())
}
