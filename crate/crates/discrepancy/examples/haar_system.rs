//! The b-adic Haar system in exact rational arithmetic: interval and box
//! evaluation, grid mean-zero, the weighted-sum identity, orthogonality,
//! and the lazy enumeration of the box families D_r^d.

use discrepancy::geometry::GridSpec;
use discrepancy::haar::{
    enumerate_boxes, haar_1d, haar_mean_zero_check, haar_weighted_sum, inner_product,
    BAdicInterval, GridFunction, HaarIndexSet,
};
use discrepancy::Result;
use num_rational::Ratio;

fn main() -> Result<()> {
    let b = 3u32;
    let grid = GridSpec::corner_badic(1, b, 3, 1)?; // M = 3^4 = 81

    // h_I on the thirds of (0, 1]
    let unit = BAdicInterval::new(b, 0, 0)?;
    for x in [Ratio::new(1, 5), Ratio::new(1, 2), Ratio::new(9, 10)] {
        println!("h_(0,1]({x}) = {}", haar_1d(&unit, x));
    }

    // exact grid identities for every interval with r <= nu
    let iv = BAdicInterval::new(b, 2, 4)?;
    println!("mean over grid      = {}", haar_mean_zero_check(&iv, &grid)?);
    println!("weighted sum        = {} (equals (M/b^2)|I|^2)", haar_weighted_sum(&iv, &grid)?);

    // the index set H_nu^d and its box families
    let h = HaarIndexSet::new(4, 2)?;
    println!("card(H_4^2)         = {}", h.card());
    for r in h.iter().take(2) {
        let boxes = enumerate_boxes(b, &r)?.count();
        println!("resolution {r:?}: {boxes} disjoint boxes of volume b^-4");
    }

    // orthogonality under the discrete inner product
    let grid2 = GridSpec::corner_badic(2, 2, 2, 1)?;
    let fam: Vec<GridFunction> = HaarIndexSet::new(2, 2)?
        .iter()
        .flat_map(|r| {
            enumerate_boxes(2, &r)
                .unwrap()
                .map(|bx| GridFunction::haar(&bx, &grid2).unwrap())
                .collect::<Vec<_>>()
        })
        .collect();
    let off_diag = inner_product(&fam[0], &fam[5])?;
    let diag = inner_product(&fam[0], &fam[0])?;
    println!("<h_R, h_R'> = {off_diag}, <h_R, h_R> = {diag}");
    Ok(())
}
