//! Corner (anchored-box) discrepancy engine.
//!
//! The discrepancy of `P_N` at `x` is
//! `D(x) = #(P_N in [0,x_1) x ... x [0,x_d)) - N x_1 ... x_d`. On the grid
//! `x = j/M`, `j in {1..M}^d`, the counting term is a d-dimensional prefix
//! sum of the cell histogram, so the whole field costs `O(d M^d + N)` and
//! every value is the exact rational `(c M^d - N j_1...j_d) / M^d`.
//!
//! On a b-adic grid `M = b^(nu+tau)` the engine also computes Haar
//! coefficients `<D_N, h_R>` in closed per-axis form, builds the test
//! function `F = sum_r f_r` (`f_r` = minus the sum of `h_R` over the empty
//! boxes of `D_r^d`), and, for d = 2, the Riesz-type product
//! `G = prod_r (1 + kappa f_r) - 1` behind the sharper l-inf bound.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::bounds::{
    self, BoundReport, ConstantRecord, ConstantSource, InputFingerprint,
};
use crate::error::{Error, Result};
use crate::exact::{checked_pow_u128, Coord};
use crate::geometry::{GridSpec, Mode, PointSet};
use crate::haar::{BAdicBox, BAdicInterval, HaarIndexSet};

/// Materialized prefix counts `c(j) = #(P_N in [0, j/M)^d)` for
/// `j in {1..M}^d`, row-major with the last axis fastest.
///
/// Anchored boxes are `[0, x)`, so a point with a coordinate exactly 0 is
/// inside every box along that axis; there is no boundary ambiguity at 0.
/// (The half-open b-adic boxes of the Haar machinery are the opposite:
/// there a zero coordinate lies in no box.)
pub struct CornerDiscrepancyField {
    grid: GridSpec,
    n: usize,
    counts: Vec<u32>,
}

impl CornerDiscrepancyField {
    pub fn build(ps: &PointSet, grid: &GridSpec) -> Result<Self> {
        if ps.d() != grid.d() {
            return Err(Error::DimensionMismatch {
                expected: grid.d(),
                got: ps.d(),
            });
        }
        grid.check_cell_cap()?;
        let d = grid.d();
        let m = grid.m() as usize;
        let cells = grid.cells()? as usize;
        let mut counts = vec![0u32; cells];
        // histogram: cell of p is floor(M p) componentwise
        for p in ps.iter() {
            let mut idx = 0usize;
            for &c in p {
                let z = c.floor_scaled(grid.m()) as usize;
                idx = idx * m + z;
            }
            counts[idx] += 1;
        }
        // prefix-sum along each axis; counts[j-1] then holds
        // #(points with z_u <= j_u - 1 for all u) = c(j)
        let mut stride = 1usize;
        for _axis in (0..d).rev() {
            let block = stride * m;
            for base in 0..cells / block {
                let start = base * block;
                for i in 1..m {
                    for off in 0..stride {
                        counts[start + i * stride + off] +=
                            counts[start + (i - 1) * stride + off];
                    }
                }
            }
            stride = block;
        }
        Ok(Self {
            grid: *grid,
            n: ps.len(),
            counts,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `c(j)` for `j in {1..M}^d`.
    pub fn count(&self, j: &[u64]) -> u32 {
        let m = self.grid.m() as usize;
        let mut idx = 0usize;
        for &ju in j {
            debug_assert!(ju >= 1 && ju <= m as u64);
            idx = idx * m + (ju as usize - 1);
        }
        self.counts[idx]
    }

    /// Numerator of `D(j/M)` over the common denominator `M^d`.
    pub fn disc_numerator(&self, j: &[u64]) -> i128 {
        let c = self.count(j) as i128;
        let m_pow_d: i128 = (0..self.grid.d()).fold(1i128, |a, _| a * self.grid.m() as i128);
        let prod: i128 = j.iter().map(|&v| v as i128).product();
        c * m_pow_d - self.n as i128 * prod
    }

    /// `D(j/M)` as an exact rational.
    pub fn disc(&self, j: &[u64]) -> BigRational {
        let m_pow_d = BigInt::from(self.grid.m()).pow(self.grid.d() as u32);
        BigRational::new(BigInt::from(self.disc_numerator(j)), m_pow_d)
    }

    /// Exact grid norms: the l2 square `M^-d sum |D|^2` as a rational, its
    /// float square root, and the l-inf maximum with its argmax index.
    pub fn norms(&self) -> CornerNorms {
        let d = self.grid.d();
        let m = self.grid.m();
        let m_us = m as usize;
        let n = self.n as i128;
        let m_pow_d: i128 = (0..d).fold(1i128, |a, _| a * m as i128);
        let row = m_us.pow((d - 1) as u32); // cells per leading slab
        let (sum_sq, max_abs, argmax) = (0..m_us)
            .into_par_iter()
            .map(|j0| {
                let mut local_sum: i128 = 0;
                let mut local_max: i128 = -1;
                let mut local_arg = vec![0u64; d];
                let mut j = vec![1u64; d];
                j[0] = j0 as u64 + 1;
                let base = j0 * row;
                let mut prefix: i128 = j[..d - 1].iter().map(|&v| v as i128).product();
                for off in 0..row {
                    let c = self.counts[base + off] as i128;
                    let diff = c * m_pow_d - n * prefix * j[d - 1] as i128;
                    local_sum += diff * diff;
                    let a = diff.abs();
                    if a > local_max {
                        local_max = a;
                        local_arg.copy_from_slice(&j);
                    }
                    // advance j (axes 1..d, axis 0 fixed by the slab)
                    let mut u = d - 1;
                    loop {
                        j[u] += 1;
                        if j[u] <= m {
                            break;
                        }
                        j[u] = 1;
                        if u == 1 || d == 1 {
                            break;
                        }
                        u -= 1;
                    }
                    if off + 1 < row && d > 1 {
                        prefix = j[..d - 1].iter().map(|&v| v as i128).product();
                    }
                }
                (local_sum, local_max, local_arg)
            })
            .reduce(
                || (0i128, -1i128, vec![0u64; d]),
                |a, b| {
                    let sum = a.0 + b.0;
                    // ties broken toward the smaller index for determinism
                    if b.1 > a.1 || (b.1 == a.1 && b.2 < a.2 && a.1 >= 0) {
                        (sum, b.1, b.2)
                    } else {
                        (sum, a.1, a.2)
                    }
                },
            );
        let m_pow_3d = BigInt::from(m).pow(3 * d as u32);
        let l2_sq = BigRational::new(BigInt::from(sum_sq), m_pow_3d);
        let linf = BigRational::new(
            BigInt::from(max_abs),
            BigInt::from(m).pow(d as u32),
        );
        CornerNorms {
            l2_sq: l2_sq.clone(),
            l2: ratio_to_f64(&l2_sq).sqrt(),
            linf,
            linf_at: argmax,
        }
    }

    /// Export `(j_1, ..., j_d, count, discrepancy)` rows as CSV.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        let d = self.grid.d();
        let m = self.grid.m();
        let header: Vec<String> = (1..=d).map(|u| format!("j{u}")).collect();
        writeln!(w, "{},count,discrepancy", header.join(","))?;
        let mut j = vec![1u64; d];
        let cells = self.counts.len();
        for _ in 0..cells {
            let c = self.count(&j);
            let disc = ratio_to_f64(&self.disc(&j));
            let coords: Vec<String> = j.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{},{c},{disc:?}", coords.join(","))?;
            let mut u = d;
            loop {
                if u == 0 {
                    break;
                }
                u -= 1;
                j[u] += 1;
                if j[u] <= m {
                    break;
                }
                j[u] = 1;
            }
        }
        Ok(())
    }
}

/// Exact grid norms of a corner field.
pub struct CornerNorms {
    pub l2_sq: BigRational,
    pub l2: f64,
    pub linf: BigRational,
    pub linf_at: Vec<u64>,
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `D(x)` at an exact rational argument `x in (0,1]^d`.
pub fn corner_disc(ps: &PointSet, x: &[Ratio<i64>]) -> Result<BigRational> {
    if x.len() != ps.d() {
        return Err(Error::DimensionMismatch {
            expected: ps.d(),
            got: x.len(),
        });
    }
    let mut count: i64 = 0;
    for p in ps.iter() {
        let inside = p.iter().zip(x).all(|(c, xu)| {
            c.cmp_ratio(*xu.numer() as i128, *xu.denom() as i128) == std::cmp::Ordering::Less
        });
        if inside {
            count += 1;
        }
    }
    let mut vol = BigRational::one();
    for xu in x {
        vol *= BigRational::new(BigInt::from(*xu.numer()), BigInt::from(*xu.denom()));
    }
    Ok(BigRational::from_integer(count.into()) - BigRational::from_integer(ps.len().into()) * vol)
}

/// Exact `<D_N, h_R>` on a b-adic grid, in `O(N d)`.
///
/// For boxes `R in D_r^d` with `r in H_nu^d` that contain no point of `P_N`
/// this equals `-N / b^(2d + 2 nu)`.
pub fn haar_coefficient(ps: &PointSet, rbox: &BAdicBox, grid: &GridSpec) -> Result<BigRational> {
    let (b, nu, _tau) = grid.badic()?;
    if rbox.b() != b {
        return Err(Error::InvalidParameter("box base differs from grid base".into()));
    }
    if rbox.d() != ps.d() || rbox.d() != grid.d() {
        return Err(Error::DimensionMismatch {
            expected: grid.d(),
            got: rbox.d(),
        });
    }
    if rbox.intervals().iter().any(|i| i.r > nu) {
        return Err(Error::InvalidParameter(
            "haar_coefficient requires every r_u <= nu".into(),
        ));
    }
    let m = grid.m();
    let d = grid.d();

    // counting part: sum over points of prod_u T(q_u, I_u), where
    // T = (1/M) sum_{j > M q_u} h_I(j/M); integer numerators over M
    let mut a_num: i128 = 0;
    for p in ps.iter() {
        let mut prod: i128 = 1;
        for (c, iv) in p.iter().zip(rbox.intervals()) {
            let t = axis_tail_sum(*c, iv, m);
            if t == 0 {
                prod = 0;
                break;
            }
            prod *= t;
        }
        a_num += prod;
    }

    // linear part: N prod_u (1/M) sum_j (j/M) h_I(j/M), via arithmetic series
    let mut lin = BigRational::from_integer(BigInt::from(ps.len()));
    for iv in rbox.intervals() {
        let ws = crate::haar::haar_weighted_sum(iv, grid)?;
        lin *= ws / BigRational::from_integer(BigInt::from(m));
    }

    let m_pow_d = BigInt::from(m).pow(d as u32);
    Ok(BigRational::new(BigInt::from(a_num), m_pow_d) - lin)
}

/// `sum_{j > M q} h_I(j/M)` as an exact integer.
fn axis_tail_sum(q: Coord, iv: &BAdicInterval, m: u64) -> i128 {
    let den = checked_pow_u128(iv.b as u64, iv.r + 1).expect("grid fits u128");
    let lo = iv.a as u128 * iv.b as u128;
    let cutoff = q.floor_scaled(m) as u128; // j > M q  <=>  j > floor(M q)
    let bound = |num: u128| -> u128 { (m as u128 * num) / den };
    let count = |from: u128, to: u128| -> i128 {
        let from = from.max(cutoff);
        if to <= from {
            0
        } else {
            (to - from) as i128
        }
    };
    -count(bound(lo), bound(lo + 1)) + count(bound(lo + 1), bound(lo + 2))
}

/// Per-resolution summary of the test function `F`.
pub struct TestFunctionF {
    pub b: u32,
    pub nu: u32,
    pub d: usize,
    /// `(r, number of empty boxes in D_r^d)` for every `r in H_nu^d`.
    pub per_r: Vec<(Vec<u32>, u64)>,
    /// `<D_N, f_r>` per resolution, exact.
    pub pairings: Vec<BigRational>,
    /// `<D_N, F>`, exact.
    pub pairing_total: BigRational,
    /// `||F||_2^2 = sum_r ||f_r||_2^2`, exact.
    pub norm_sq: BigRational,
    /// `card(H_nu^d)`.
    pub card_h: u128,
    /// Whether `<D_N, F> >= card(H_nu^d) (b-1)/b^(2d+3)` held.
    pub inequality_verified: bool,
}

/// Occupancy of the `b^nu` boxes of `D_r^d`: cell index per point, or None
/// for points with a zero coordinate (they lie in no half-open box).
fn occupied_cells(ps: &PointSet, b: u32, r: &[u32]) -> (Vec<bool>, u64) {
    let radices: Vec<u64> = r.iter().map(|&ru| (b as u64).pow(ru)).collect();
    let total: u64 = radices.iter().product();
    let mut occ = vec![false; total as usize];
    let mut distinct = 0u64;
    for p in ps.iter() {
        let mut idx: u64 = 0;
        let mut outside = false;
        for (c, (&ru, &rad)) in p.iter().zip(r.iter().zip(&radices)) {
            match badic_cell(*c, b, ru) {
                Some(a) => idx = idx * rad + a,
                None => {
                    outside = true;
                    break;
                }
            }
        }
        if !outside && !occ[idx as usize] {
            occ[idx as usize] = true;
            distinct += 1;
        }
    }
    (occ, distinct)
}

/// Index `a` with `x in (a/b^r, (a+1)/b^r]`, or None when `x = 0`.
fn badic_cell(x: Coord, b: u32, r: u32) -> Option<u64> {
    if x.is_zero() {
        return None;
    }
    let scale = (b as u64).pow(r);
    let (f, exact) = x.floor_scaled_exact(scale);
    Some(if exact { f - 1 } else { f })
}

/// Build `F = sum_{r in H_nu^d} f_r` and its exact pairings with `D_N`.
///
/// `f_r(x) = -sum over empty boxes R of h_R(x)`; each `<D_N, f_r>` is
/// computed by summing the generic Haar coefficient over the empty boxes,
/// not by substituting the closed form, so the chain checked downstream is
/// genuinely two-sided.
pub fn build_f(ps: &PointSet, grid: &GridSpec) -> Result<TestFunctionF> {
    let (b, nu, _tau) = grid.badic()?;
    let d = grid.d();
    validate_nu_window(b, nu, ps.len())?;
    let h = HaarIndexSet::new(nu, d)?;
    let b_nu = checked_pow_u128(b as u64, nu)? as u64;
    let mut per_r = Vec::new();
    let mut pairings = Vec::new();
    let mut pairing_total = BigRational::zero();
    let mut norm_sq = BigRational::zero();
    // ||h_R||_2^2 = 2^d / b^(nu + d), shared by every box of every r
    let h_norm_sq = BigRational::new(
        BigInt::from(1u64 << d),
        BigInt::from(b).pow(nu + d as u32),
    );
    for r in h.iter() {
        let (occ, distinct) = occupied_cells(ps, b, &r);
        let empty = b_nu - distinct;
        let mut pairing = BigRational::zero();
        for bx in crate::haar::enumerate_boxes(b, &r)? {
            let idx = box_flat_index(&bx, b);
            if !occ[idx as usize] {
                pairing -= haar_coefficient(ps, &bx, grid)?;
            }
        }
        pairing_total += &pairing;
        norm_sq += BigRational::from_integer(BigInt::from(empty)) * &h_norm_sq;
        per_r.push((r, empty));
        pairings.push(pairing);
    }
    let threshold = BigRational::from_integer(BigInt::from_u128(h.card()).unwrap())
        * bounds::roth_ratio(b, d);
    let inequality_verified = pairing_total >= threshold;
    Ok(TestFunctionF {
        b,
        nu,
        d,
        per_r,
        pairings,
        pairing_total,
        norm_sq,
        card_h: h.card(),
        inequality_verified,
    })
}

fn box_flat_index(bx: &BAdicBox, b: u32) -> u64 {
    let mut idx = 0u64;
    for iv in bx.intervals() {
        idx = idx * (b as u64).pow(iv.r) + iv.a;
    }
    idx
}

fn validate_nu_window(b: u32, nu: u32, n: usize) -> Result<()> {
    let expect = bounds::nu_from_n(b, n)?;
    if expect != nu {
        return Err(Error::InvalidParameter(format!(
            "N={n} lies outside [b^(nu-2), b^(nu-1)) for nu={nu}; recompute nu (b^{}..b^{} wants nu={expect})",
            nu.saturating_sub(2),
            nu.saturating_sub(1),
        )));
    }
    Ok(())
}

/// The d = 2 Riesz-type product `G = prod_{r=0}^{nu} (1 + kappa f_r) - 1`
/// and the exact quantities the l-inf chain needs.
pub struct TestFunctionG {
    pub kappa: BigRational,
    pub nu: u32,
    /// `||G||_1`, exact; at most 2.
    pub norm_l1: BigRational,
    /// `<D_N, G>`, exact.
    pub pairing: BigRational,
    /// The implied l-inf lower bound
    /// `kappa (nu+1) [(b-1) b^-7 - kappa b^-5/(b-1-kappa)] / 2`, exact.
    pub linf_bound: BigRational,
    /// `sum_j (G - kappa F)(j/M)`: the pure `l >= 2` part of the product
    /// expansion summed over the grid; zero by the mean-zero identity.
    pub higher_terms_grid_sum: BigRational,
}

/// Evaluate `G` on the grid (d = 2 only) and return `||G||_1`, `<D_N, G>`
/// and the implied l-inf lower bound.
///
/// `G(j) + 1 = (1+kappa)^a (1-kappa)^e` where `a`/`e` count the levels with
/// `f_r(j) = +1` / `-1`, so the grid pass only tallies integer class
/// histograms; the rational arithmetic happens once per `(a, e)` class.
pub fn build_g(ps: &PointSet, grid: &GridSpec, kappa: &BigRational) -> Result<TestFunctionG> {
    let (b, nu, _tau) = grid.badic()?;
    if grid.d() != 2 {
        return Err(Error::InvalidParameter("the G chain is d = 2 only".into()));
    }
    if kappa <= &BigRational::zero() || kappa >= &BigRational::one() {
        return Err(Error::InvalidParameter("kappa must be in (0, 1)".into()));
    }
    validate_nu_window(b, nu, ps.len())?;
    let m = grid.m();
    let n = ps.len();
    let field = CornerDiscrepancyField::build(ps, grid)?;

    // occupancy of D_(r, nu-r)^2 per level
    let levels: Vec<Vec<bool>> = (0..=nu)
        .map(|r| occupied_cells(ps, b, &[r, nu - r]).0)
        .collect();
    // per-level widths in grid units: axis-1 child width M/b^(r+1),
    // axis-2 cell count b^(nu-r) and child width M/b^(nu-r+1)
    let bu = b as u64;
    let lvl_geom: Vec<(u64, u64, u64)> = (0..=nu)
        .map(|r| (m / bu.pow(r + 1), bu.pow(nu - r), m / bu.pow(nu - r + 1)))
        .collect();

    let m_us = m as usize;
    let nu_us = nu as usize;
    let width = nu_us + 2;
    let classes = width * width;
    let n_i128 = n as i128;
    let m_sq = m as i128 * m as i128;
    let (hist, disc_sums, grid_f_sum) = (0..m_us)
        .into_par_iter()
        .map(|row| {
            let j1 = row as u64 + 1;
            let mut hist = vec![0u64; classes];
            let mut sums = vec![0i128; classes];
            let mut f_sum: i64 = 0;
            // axis-1 data is constant along the row
            let lvl1: Vec<(u64, i8)> = lvl_geom
                .iter()
                .map(|&(w1c, _, _)| {
                    let t = ((j1 - 1) / w1c) % bu;
                    let s = child_sign(t);
                    ((j1 - 1) / (w1c * bu), s)
                })
                .collect();
            for j2 in 1..=m {
                let mut plus = 0usize;
                let mut minus = 0usize;
                for (r, &(w1c, cells2, w2c)) in lvl_geom.iter().enumerate() {
                    let _ = w1c;
                    let (a1, s1) = lvl1[r];
                    if s1 == 0 {
                        continue;
                    }
                    let t2 = ((j2 - 1) / w2c) % bu;
                    let s2 = child_sign(t2);
                    if s2 == 0 {
                        continue;
                    }
                    let a2 = (j2 - 1) / (w2c * bu);
                    if levels[r][(a1 * cells2 + a2) as usize] {
                        continue; // box contains a point: f_r = 0 there
                    }
                    // f_r = -h_R on empty boxes
                    if s1 * s2 < 0 {
                        plus += 1;
                    } else {
                        minus += 1;
                    }
                }
                let cls = plus * width + minus;
                hist[cls] += 1;
                let c = field.count(&[j1, j2]) as i128;
                sums[cls] += c * m_sq - n_i128 * (j1 as i128) * (j2 as i128);
                f_sum += plus as i64 - minus as i64;
            }
            (hist, sums, f_sum)
        })
        .reduce(
            || (vec![0u64; classes], vec![0i128; classes], 0i64),
            |mut a, b| {
                for (x, y) in a.0.iter_mut().zip(b.0) {
                    *x += y;
                }
                for (x, y) in a.1.iter_mut().zip(b.1) {
                    *x += y;
                }
                (a.0, a.1, a.2 + b.2)
            },
        );

    // rational combine over the <= (nu+2)^2 classes
    let one = BigRational::one();
    let up = &one + kappa;
    let down = &one - kappa;
    let mut pow_up = vec![BigRational::one()];
    let mut pow_down = vec![BigRational::one()];
    for i in 1..width {
        pow_up.push(&pow_up[i - 1] * &up);
        pow_down.push(&pow_down[i - 1] * &down);
    }
    let mut norm_l1 = BigRational::zero();
    let mut pairing = BigRational::zero();
    let mut grid_g_sum = BigRational::zero();
    let m_sq_big = BigInt::from(m).pow(2);
    let inv_m4 = BigRational::new(BigInt::one(), m_sq_big.clone() * m_sq_big.clone());
    for a in 0..width {
        for e in 0..width {
            let cls = a * width + e;
            if hist[cls] == 0 && disc_sums[cls] == 0 {
                continue;
            }
            let val = &pow_up[a] * &pow_down[e] - &one;
            norm_l1 += BigRational::from_integer(hist[cls].into()) * val.abs();
            grid_g_sum += BigRational::from_integer(hist[cls].into()) * &val;
            pairing += BigRational::from_integer(disc_sums[cls].into()) * &val;
        }
    }
    norm_l1 /= BigRational::from_integer(m_sq_big);
    pairing *= inv_m4;
    let higher = grid_g_sum - kappa * BigRational::from_integer(grid_f_sum.into());
    Ok(TestFunctionG {
        kappa: kappa.clone(),
        nu,
        norm_l1,
        pairing,
        linf_bound: bounds::linf_2d_bound(b, kappa, nu),
        higher_terms_grid_sum: higher,
    })
}

/// Haar sign of a child index: first child carries -1, second +1.
fn child_sign(t: u64) -> i8 {
    match t {
        0 => -1,
        1 => 1,
        _ => 0,
    }
}

/// Exact continuous corner L2 discrepancy, squared, by the closed pairwise
/// formula
/// `int D^2 = sum_{n,m} prod_u (1 - max(p_nu, p_mu))
///  - 2N sum_n prod_u (1 - p_nu^2)/2 + N^2 3^-d`,
/// in `O(N^2 d)`. Used as the `M -> infinity` oracle for the grid norms.
pub fn continuous_l2_sq_oracle(ps: &PointSet) -> Result<f64> {
    if ps.len() > 100_000 {
        return Err(Error::InvalidParameter(
            "continuous oracle capped at N <= 1e5 (O(N^2) pair sum)".into(),
        ));
    }
    let d = ps.d();
    let n = ps.len();
    let rows = ps.to_f64_rows();
    let pair_sum: f64 = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = crate::kahan::Neumaier::new();
            for j in 0..n {
                let mut prod = 1.0;
                for u in 0..d {
                    prod *= 1.0 - rows[i][u].max(rows[j][u]);
                }
                acc.add(prod);
            }
            acc.total()
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    let single_sum: f64 = rows
        .iter()
        .map(|p| p.iter().map(|&x| (1.0 - x * x) / 2.0).product::<f64>())
        .sum();
    let nf = n as f64;
    Ok(pair_sum - 2.0 * nf * single_sum + nf * nf / 3f64.powi(d as i32))
}

/// Exact-rational continuous L2 square for fully rational point sets
/// (lattices, van der Corput); the independent cross-check of the float
/// oracle.
pub fn continuous_l2_sq_exact(ps: &PointSet) -> BigRational {
    let d = ps.d();
    let n = ps.len();
    let rats: Vec<Vec<BigRational>> = ps
        .iter()
        .map(|p| p.iter().map(|c| c.to_big_rational()).collect())
        .collect();
    let one = BigRational::one();
    let mut pair = BigRational::zero();
    for i in 0..n {
        for j in 0..n {
            let mut prod = BigRational::one();
            for u in 0..d {
                let mx = rats[i][u].clone().max(rats[j][u].clone());
                prod *= &one - mx;
            }
            pair += prod;
        }
    }
    let mut single = BigRational::zero();
    for p in &rats {
        let mut prod = BigRational::one();
        for x in p {
            prod *= (&one - x * x) / BigRational::from_integer(2.into());
        }
        single += prod;
    }
    let nf = BigRational::from_integer(BigInt::from(n));
    let three_d = BigRational::new(BigInt::one(), BigInt::from(3).pow(d as u32));
    pair - BigRational::from_integer(2.into()) * &nf * single + &nf * &nf * three_d
}

/// Theorem-1 verdict: corner grid l2 against the Roth-chain right-hand
/// side `((b-1)/b^(2d+3)) (log_b N)^((d-1)/2) / sqrt((d-1)!)`.
///
/// `nu` is always derived from `N` via `b^(nu-2) <= N < b^(nu-1)`; callers
/// supply only `b` and `tau`.
pub fn theorem1_verify(ps: &PointSet, b: u32, tau: u32, tag: &str) -> Result<BoundReport> {
    if ps.mode() != Mode::Corner {
        return Err(Error::GridStructure("corner engine needs corner mode".into()));
    }
    let n = ps.len();
    if (n as u128) < b as u128 {
        return Err(Error::InvalidParameter(format!(
            "theorem 1 needs N >= b (N={n}, b={b})"
        )));
    }
    let nu = bounds::nu_from_n(b, n)?;
    let grid = GridSpec::corner_badic(ps.d(), b, nu, tau)?;
    let field = CornerDiscrepancyField::build(ps, &grid)?;
    let norms = field.norms();
    let d = ps.d();
    let log_b_n = (n as f64).ln() / (b as f64).ln();
    let c = bounds::roth_constant(b, d);
    let rhs = c * log_b_n.powf((d as f64 - 1.0) / 2.0);
    let rhs_sq = c * c * log_b_n.powi(d as i32 - 1);
    // d = 1 collapses to a fully rational right-hand side
    let rhs_sq_exact = if d == 1 {
        let rr = bounds::roth_ratio(b, 1);
        Some(format!("{}", &rr * &rr))
    } else {
        None
    };
    let verdict = if d == 1 {
        let rr = bounds::roth_ratio(b, 1);
        norms.l2_sq >= &rr * &rr
    } else {
        bounds::verdict_on_squares(&norms.l2_sq, rhs_sq)
    };
    let lhs = norms.l2;
    Ok(BoundReport {
        theorem: "1".into(),
        lhs,
        rhs,
        lhs_sq: ratio_to_f64(&norms.l2_sq),
        rhs_sq,
        rhs_sq_exact,
        margin: lhs / rhs,
        verdict: if verdict { "pass" } else { "fail" }.into(),
        constants: vec![
            ConstantRecord::new(
                "(b-1)/b^(2d+3)",
                ratio_to_f64(&bounds::roth_ratio(b, d)),
                ConstantSource::PaperExplicit,
            ),
            ConstantRecord::new(
                "1/sqrt((d-1)!)",
                1.0 / (bounds::factorial(d - 1) as f64).sqrt(),
                if d == 1 {
                    ConstantSource::Convention
                } else {
                    ConstantSource::PaperExplicit
                },
            ),
        ],
        input: InputFingerprint {
            n,
            d,
            m: grid.m(),
            b: Some(b),
            r: None,
            seed: None,
            tag: tag.into(),
        },
    })
}

/// Theorem-1 l-inf verdict for d = 2: some grid box carries
/// `|D| >= kappa (nu+1) [(b-1) b^-7 - kappa b^-5/(b-1-kappa)] / 2`.
///
/// `kappa` defaults to the bracket argmax [`bounds::kappa_opt`]; both sides
/// of the verdict are exact rationals.
pub fn theorem1_linf_verify(
    ps: &PointSet,
    b: u32,
    tau: u32,
    kappa: Option<BigRational>,
    tag: &str,
) -> Result<BoundReport> {
    if ps.d() != 2 {
        return Err(Error::InvalidParameter("the l-inf chain is d = 2 only".into()));
    }
    let n = ps.len();
    let nu = bounds::nu_from_n(b, n)?;
    let grid = GridSpec::corner_badic(2, b, nu, tau)?;
    let kappa = kappa.unwrap_or_else(|| {
        BigRational::from_f64(bounds::kappa_opt(b)).expect("kappa_opt is finite")
    });
    let field = CornerDiscrepancyField::build(ps, &grid)?;
    let norms = field.norms();
    let bound = bounds::linf_2d_bound(b, &kappa, nu);
    let verdict = norms.linf >= bound;
    let lhs = ratio_to_f64(&norms.linf);
    let rhs = ratio_to_f64(&bound);
    Ok(BoundReport {
        theorem: "1-linf".into(),
        lhs,
        rhs,
        lhs_sq: lhs * lhs,
        rhs_sq: rhs * rhs,
        rhs_sq_exact: Some(format!("{}", &bound * &bound)),
        margin: lhs / rhs,
        verdict: if verdict { "pass" } else { "fail" }.into(),
        constants: vec![
            ConstantRecord::new("kappa", ratio_to_f64(&kappa), ConstantSource::Calibrated),
            ConstantRecord::new(
                "(b-1)/b^7",
                (b as f64 - 1.0) / (b as f64).powi(7),
                ConstantSource::PaperExplicit,
            ),
        ],
        input: InputFingerprint {
            n,
            d: 2,
            m: grid.m(),
            b: Some(b),
            r: None,
            seed: None,
            tag: tag.into(),
        },
    })
}
