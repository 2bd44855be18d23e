//! The b-adic Haar system: intervals, boxes, index sets and discrete inner
//! products, all in exact rational arithmetic.
//!
//! A b-adic interval is `I = (a/b^r, (a+1)/b^r]` with `0 <= a < b^r`. The
//! Haar function `h_I` is `-1` on the first b-adic child of width
//! `b^-(r+1)`, `+1` on the second child and `0` elsewhere; `h_R` on a box
//! is the product of the one-dimensional factors. On a grid with
//! `M = b^(nu+tau)` and `r <= nu` every `h_I` has exact mean zero over the
//! grid points `{1/M, ..., M/M}`, which is what makes the corner engine's
//! closed-form Haar coefficients possible.
//!
//! Denominators stay powers of `b` and `M`, so everything here is exact.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::checked_pow_u128;
use crate::geometry::GridSpec;

/// `I = (a/b^r, (a+1)/b^r]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BAdicInterval {
    pub b: u32,
    pub r: u32,
    pub a: u64,
}

impl BAdicInterval {
    pub fn new(b: u32, r: u32, a: u64) -> Result<Self> {
        if b < 2 {
            return Err(Error::InvalidParameter("base b must be >= 2".into()));
        }
        let cells = checked_pow_u128(b as u64, r)?;
        if (a as u128) >= cells {
            return Err(Error::InvalidParameter(format!(
                "offset a={a} out of range for b^r={cells}"
            )));
        }
        Ok(Self { b, r, a })
    }

    /// `|I| = b^-r`.
    pub fn length(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(self.b).pow(self.r))
    }
}

/// Product of `d` b-adic intervals sharing one base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BAdicBox {
    intervals: Vec<BAdicInterval>,
}

impl BAdicBox {
    pub fn new(intervals: Vec<BAdicInterval>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidParameter("box needs d >= 1 intervals".into()));
        }
        let b = intervals[0].b;
        if intervals.iter().any(|i| i.b != b) {
            return Err(Error::InvalidParameter(
                "all intervals of a b-adic box must share the base".into(),
            ));
        }
        Ok(Self { intervals })
    }

    pub fn d(&self) -> usize {
        self.intervals.len()
    }

    pub fn b(&self) -> u32 {
        self.intervals[0].b
    }

    pub fn intervals(&self) -> &[BAdicInterval] {
        &self.intervals
    }

    /// `sum_u r_u`, the total resolution.
    pub fn total_resolution(&self) -> u32 {
        self.intervals.iter().map(|i| i.r).sum()
    }

    /// Volume `b^-(r_1 + ... + r_d)`.
    pub fn volume(&self) -> BigRational {
        BigRational::new(
            BigInt::one(),
            BigInt::from(self.b()).pow(self.total_resolution()),
        )
    }
}

/// Evaluate `h_I` at an exact rational `x` in `(0, 1]`.
///
/// Returns `-1` on the first child interval, `+1` on the second, `0`
/// elsewhere (including every boundary of the half-open pieces).
pub fn haar_1d(i: &BAdicInterval, x: Ratio<i64>) -> i8 {
    // children: (lo, lo + w] and (lo + w, lo + 2w] with lo = a/b^r,
    // w = b^-(r+1); compare x = p/q against (a*b + t)/b^(r+1) exactly.
    let scale = match checked_pow_u128(i.b as u64, i.r + 1) {
        Ok(s) if s <= i128::MAX as u128 => s as i128,
        _ => return 0, // resolution beyond any sane grid; x cannot resolve it
    };
    let lo = i.a as i128 * i.b as i128;
    let p = *x.numer() as i128;
    let q = *x.denom() as i128;
    // x > lo/scale ?
    let above_lo = p * scale > lo * q;
    if !above_lo {
        return 0;
    }
    if p * scale <= (lo + 1) * q {
        -1
    } else if p * scale <= (lo + 2) * q {
        1
    } else {
        0
    }
}

/// Evaluate `h_I` at the grid point `j/M`; exact for any `M`.
pub fn haar_1d_grid(i: &BAdicInterval, j: u64, m: u64) -> i8 {
    haar_1d(i, Ratio::new(j as i64, m as i64))
}

/// `h_R(x) = h_{I_1}(x_1) ... h_{I_d}(x_d)`.
pub fn haar_box(r: &BAdicBox, x: &[Ratio<i64>]) -> Result<i8> {
    if x.len() != r.d() {
        return Err(Error::DimensionMismatch {
            expected: r.d(),
            got: x.len(),
        });
    }
    let mut v: i8 = 1;
    for (i, &xu) in r.intervals.iter().zip(x) {
        let h = haar_1d(i, xu);
        if h == 0 {
            return Ok(0);
        }
        v *= h;
    }
    Ok(v)
}

/// The index set `H_nu^d` of d-tuples of non-negative integers summing to
/// `nu`.
#[derive(Clone, Copy, Debug)]
pub struct HaarIndexSet {
    pub nu: u32,
    pub d: usize,
}

impl HaarIndexSet {
    pub fn new(nu: u32, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("d must be >= 1".into()));
        }
        Ok(Self { nu, d })
    }

    /// `binom(nu + d - 1, d - 1)`.
    pub fn card(&self) -> u128 {
        binomial(self.nu as u128 + self.d as u128 - 1, self.d as u128 - 1)
    }

    /// All resolution vectors `r` with `r_1 + ... + r_d = nu`, in
    /// lexicographic order.
    pub fn iter(&self) -> CompositionIter {
        CompositionIter {
            nu: self.nu,
            d: self.d,
            next: Some({
                let mut first = vec![0u32; self.d];
                first[self.d - 1] = self.nu;
                first
            }),
        }
    }
}

/// Streaming enumeration of compositions of `nu` into `d` parts.
pub struct CompositionIter {
    nu: u32,
    d: usize,
    next: Option<Vec<u32>>,
}

impl Iterator for CompositionIter {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let cur = self.next.take()?;
        // successor in lexicographic order: move one unit from the tail
        // to the left, then flush the remainder right.
        let mut nxt = cur.clone();
        let mut i = self.d;
        let mut tail: u32 = 0;
        let mut found = false;
        while i > 1 {
            i -= 1;
            tail += nxt[i];
            if nxt[i - 1] < self.nu && tail > 0 {
                nxt[i - 1] += 1;
                for v in nxt[i..].iter_mut() {
                    *v = 0;
                }
                nxt[self.d - 1] = tail - 1;
                found = true;
                break;
            }
        }
        if found {
            // reject compositions whose prefix sums exceed nu
            if nxt.iter().map(|&v| v as u64).sum::<u64>() == self.nu as u64 {
                self.next = Some(nxt);
            }
        }
        Some(cur)
    }
}

pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Lazily enumerate the collection `D_r^d`: the `b^nu` disjoint boxes of
/// volume `b^-nu` with per-axis resolution `r`.
pub fn enumerate_boxes(b: u32, r: &[u32]) -> Result<BoxIter> {
    if r.is_empty() {
        return Err(Error::InvalidParameter("resolution vector is empty".into()));
    }
    let mut radices = Vec::with_capacity(r.len());
    for &ru in r {
        let cells = checked_pow_u128(b as u64, ru)?;
        let cells = u64::try_from(cells)
            .map_err(|_| Error::InvalidParameter(format!("b^{ru} too large")))?;
        radices.push(cells);
    }
    Ok(BoxIter {
        b,
        r: r.to_vec(),
        radices,
        counter: vec![0; r.len()],
        done: false,
    })
}

pub struct BoxIter {
    b: u32,
    r: Vec<u32>,
    radices: Vec<u64>,
    counter: Vec<u64>,
    done: bool,
}

impl Iterator for BoxIter {
    type Item = BAdicBox;

    fn next(&mut self) -> Option<BAdicBox> {
        if self.done {
            return None;
        }
        let intervals: Vec<BAdicInterval> = self
            .counter
            .iter()
            .zip(&self.r)
            .map(|(&a, &r)| BAdicInterval { b: self.b, r, a })
            .collect();
        // mixed-radix increment
        let mut u = self.counter.len();
        loop {
            if u == 0 {
                self.done = true;
                break;
            }
            u -= 1;
            self.counter[u] += 1;
            if self.counter[u] < self.radices[u] {
                break;
            }
            self.counter[u] = 0;
        }
        Some(BAdicBox::new(intervals).expect("same base by construction"))
    }
}

/// A rational-valued function sampled on the corner grid
/// `{1/M, ..., M/M}^d`, with inner products weighted by `M^-d`.
#[derive(Clone, Debug)]
pub struct GridFunction {
    d: usize,
    m: u64,
    values: Vec<BigRational>,
}

impl GridFunction {
    /// Sample `f` at all grid points, `j` running over `{1..M}^d`
    /// row-major.
    pub fn from_fn<F: FnMut(&[u64]) -> BigRational>(
        d: usize,
        m: u64,
        mut f: F,
    ) -> Result<Self> {
        let cells = checked_pow_u128(m, d as u32)?;
        if cells > crate::geometry::DEFAULT_CELL_CAP {
            return Err(Error::CellCapExceeded {
                cells,
                cap: crate::geometry::DEFAULT_CELL_CAP,
            });
        }
        let n = cells as usize;
        let mut values = Vec::with_capacity(n);
        let mut j = vec![1u64; d];
        for _ in 0..n {
            values.push(f(&j));
            for u in (0..d).rev() {
                j[u] += 1;
                if j[u] <= m {
                    break;
                }
                j[u] = 1;
            }
        }
        Ok(Self { d, m, values })
    }

    /// The Haar function of a box, sampled on the grid.
    pub fn haar(rbox: &BAdicBox, grid: &GridSpec) -> Result<Self> {
        if grid.d() != rbox.d() {
            return Err(Error::DimensionMismatch {
                expected: rbox.d(),
                got: grid.d(),
            });
        }
        let m = grid.m();
        Self::from_fn(rbox.d(), m, |j| {
            let mut v: i8 = 1;
            for (i, &ju) in rbox.intervals.iter().zip(j) {
                let h = haar_1d_grid(i, ju, m);
                if h == 0 {
                    v = 0;
                    break;
                }
                v *= h;
            }
            BigRational::from_integer(v.into())
        })
    }

    pub fn constant(d: usize, m: u64, v: BigRational) -> Result<Self> {
        Self::from_fn(d, m, |_| v.clone())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }
}

/// `<f, g> = M^-d sum f g` over the grid, exact.
pub fn inner_product(f: &GridFunction, g: &GridFunction) -> Result<BigRational> {
    if f.d != g.d || f.m != g.m {
        return Err(Error::DimensionMismatch {
            expected: f.d,
            got: g.d,
        });
    }
    let mut acc = BigRational::zero();
    for (a, b) in f.values.iter().zip(&g.values) {
        if !a.is_zero() && !b.is_zero() {
            acc += a * b;
        }
    }
    let weight = BigRational::new(BigInt::one(), BigInt::from(f.m).pow(f.d as u32));
    Ok(acc * weight)
}

/// `(1/M) sum_{j=1}^{M} h_I(j/M)`, exact. Zero whenever `r <= nu` on a
/// b-adic grid `M = b^(nu+tau)`.
pub fn haar_mean_zero_check(i: &BAdicInterval, grid: &GridSpec) -> Result<BigRational> {
    let (b, nu, _tau) = grid.badic()?;
    if b != i.b {
        return Err(Error::InvalidParameter(format!(
            "interval base {} does not match grid base {b}",
            i.b
        )));
    }
    if i.r > nu {
        return Err(Error::InvalidParameter(format!(
            "mean-zero identity requires r <= nu (r={}, nu={nu})",
            i.r
        )));
    }
    let m = grid.m();
    let count = |hi_num: u128, hi_den: u128, lo_num: u128, lo_den: u128| -> i128 {
        // grid points j with lo < j/M <= hi:  floor(M*hi) - floor(M*lo)
        let f_hi = (m as u128 * hi_num) / hi_den;
        let f_lo = (m as u128 * lo_num) / lo_den;
        f_hi as i128 - f_lo as i128
    };
    let den = checked_pow_u128(i.b as u64, i.r + 1)?;
    let lo = i.a as u128 * i.b as u128;
    let c1 = count(lo + 1, den, lo, den);
    let c2 = count(lo + 2, den, lo + 1, den);
    Ok(BigRational::new(BigInt::from(c2 - c1), BigInt::from(m)))
}

/// `sum_{j=1}^{M} (j/M) h_I(j/M)`, exact, via arithmetic series. For
/// `r <= nu` this equals `(M/b^2) |I|^2`.
pub fn haar_weighted_sum(i: &BAdicInterval, grid: &GridSpec) -> Result<BigRational> {
    let (b, _nu, _tau) = grid.badic()?;
    if b != i.b {
        return Err(Error::InvalidParameter(format!(
            "interval base {} does not match grid base {b}",
            i.b
        )));
    }
    let m = grid.m();
    let den = checked_pow_u128(i.b as u64, i.r + 1)?;
    let lo = i.a as u128 * i.b as u128;
    // grid indices in (c_lo, c_hi]: j = floor(M c_lo)+1 ..= floor(M c_hi)
    let bound = |num: u128| (m as u128 * num) / den;
    let series = |from: u128, to: u128| -> i128 {
        // sum of integers in (from, to]
        if to <= from {
            return 0;
        }
        let n = to - from;
        (n * (from + to + 1) / 2) as i128
    };
    let s1 = series(bound(lo), bound(lo + 1));
    let s2 = series(bound(lo + 1), bound(lo + 2));
    Ok(BigRational::new(BigInt::from(s2 - s1), BigInt::from(m)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Ratio<i64> {
        Ratio::new(n, d)
    }

    #[test]
    fn haar_values_on_unit_interval_base2() {
        let i = BAdicInterval::new(2, 0, 0).unwrap(); // (0, 1]
        assert_eq!(haar_1d(&i, rat(1, 4)), -1);
        assert_eq!(haar_1d(&i, rat(3, 4)), 1);
        // for b = 2 the two children cover all of I, so x = 1 is in the
        // second child; the grid mean-zero identity depends on this
        assert_eq!(haar_1d(&i, rat(1, 1)), 1);
    }

    #[test]
    fn haar_values_base3() {
        let i = BAdicInterval::new(3, 0, 0).unwrap(); // thirds of (0, 1]
        assert_eq!(haar_1d(&i, rat(1, 5)), -1); // 0.2 in (0, 1/3]
        assert_eq!(haar_1d(&i, rat(1, 2)), 1); // 0.5 in (1/3, 2/3]
        assert_eq!(haar_1d(&i, rat(9, 10)), 0); // 0.9 beyond second child
        assert_eq!(haar_1d(&i, rat(1, 1)), 0); // x = 1 outside both children
    }

    #[test]
    fn haar_left_endpoint_is_outside() {
        let i = BAdicInterval::new(2, 2, 1).unwrap(); // (1/4, 2/4]
        assert_eq!(haar_1d(&i, rat(1, 4)), 0);
        assert_eq!(haar_1d(&i, rat(5, 16)), -1);
        assert_eq!(haar_1d(&i, rat(3, 8)), -1); // right edge of first child
        assert_eq!(haar_1d(&i, rat(7, 16)), 1);
        assert_eq!(haar_1d(&i, rat(1, 2)), 1); // right edge of interval
    }

    #[test]
    fn haar_box_is_componentwise_product() {
        let i = BAdicInterval::new(2, 0, 0).unwrap();
        let r = BAdicBox::new(vec![i, i]).unwrap();
        assert_eq!(haar_box(&r, &[rat(1, 4), rat(3, 4)]).unwrap(), -1);
        assert_eq!(haar_box(&r, &[rat(1, 4), rat(1, 4)]).unwrap(), 1);
        // one coordinate outside its interval kills the product
        let narrow = BAdicBox::new(vec![BAdicInterval::new(2, 1, 0).unwrap(), i]).unwrap();
        assert_eq!(haar_box(&narrow, &[rat(3, 4), rat(1, 4)]).unwrap(), 0);
    }

    #[test]
    fn mean_zero_on_badic_grids() {
        // b=2, nu=3, tau=1 (M=16): all I with r <= 3
        let grid = GridSpec::corner_badic(1, 2, 3, 1).unwrap();
        for r in 0..=3u32 {
            for a in 0..(1u64 << r) {
                let i = BAdicInterval::new(2, r, a).unwrap();
                assert!(
                    haar_mean_zero_check(&i, &grid).unwrap().is_zero(),
                    "r={r} a={a}"
                );
            }
        }
        // b=3, M=27 (nu=2, tau=1), r=2
        let grid = GridSpec::corner_badic(1, 3, 2, 1).unwrap();
        for a in 0..9 {
            let i = BAdicInterval::new(3, 2, a).unwrap();
            assert!(haar_mean_zero_check(&i, &grid).unwrap().is_zero());
        }
    }

    #[test]
    fn mean_zero_matches_brute_force() {
        let grid = GridSpec::corner_badic(1, 3, 2, 1).unwrap();
        let m = grid.m();
        for r in 0..=2u32 {
            for a in 0..3u64.pow(r) {
                let i = BAdicInterval::new(3, r, a).unwrap();
                let mut brute = 0i64;
                for j in 1..=m {
                    brute += haar_1d_grid(&i, j, m) as i64;
                }
                let fast = haar_mean_zero_check(&i, &grid).unwrap();
                assert_eq!(
                    fast,
                    BigRational::new(brute.into(), (m as i64).into()),
                    "r={r} a={a}"
                );
            }
        }
    }

    #[test]
    fn mean_zero_rejects_r_above_nu() {
        let grid = GridSpec::corner_badic(1, 2, 3, 1).unwrap();
        let i = BAdicInterval::new(2, 4, 0).unwrap();
        assert!(haar_mean_zero_check(&i, &grid).is_err());
    }

    #[test]
    fn weighted_sum_identity() {
        // sum_j (j/M) h_I(j/M) = (M/b^2) |I|^2 for r <= nu
        for (b, nu, tau) in [(2u32, 3u32, 1u32), (3, 3, 1), (3, 2, 2)] {
            let grid = GridSpec::corner_badic(1, b, nu, tau).unwrap();
            let m = grid.m();
            for r in 0..=nu {
                for a in 0..(b as u64).pow(r) {
                    let i = BAdicInterval::new(b, r, a).unwrap();
                    let got = haar_weighted_sum(&i, &grid).unwrap();
                    let len = i.length();
                    let expect = BigRational::from_integer(m.into())
                        / BigRational::from_integer((b * b).into())
                        * &len
                        * &len;
                    assert_eq!(got, expect, "b={b} r={r} a={a}");
                    // brute force the same sum
                    let mut brute = BigRational::zero();
                    for j in 1..=m {
                        let h = haar_1d_grid(&i, j, m);
                        if h != 0 {
                            brute += BigRational::new(
                                (j as i64 * h as i64).into(),
                                (m as i64).into(),
                            );
                        }
                    }
                    assert_eq!(brute, expect, "brute b={b} r={r} a={a}");
                }
            }
        }
    }

    #[test]
    fn index_set_cardinality() {
        for d in 1..=4usize {
            for nu in 0..=12u32 {
                let h = HaarIndexSet::new(nu, d).unwrap();
                let listed = h.iter().count() as u128;
                assert_eq!(listed, h.card(), "d={d} nu={nu}");
                for r in h.iter() {
                    assert_eq!(r.iter().map(|&v| v as u64).sum::<u64>(), nu as u64);
                }
            }
        }
    }

    #[test]
    fn boxes_partition_unit_cube() {
        // b=2, nu=2, d=2, r=(1,1): 4 boxes of volume 1/4 covering (0,1]^2
        let boxes: Vec<_> = enumerate_boxes(2, &[1, 1]).unwrap().collect();
        assert_eq!(boxes.len(), 4);
        for bx in &boxes {
            assert_eq!(bx.volume(), BigRational::new(1.into(), 4.into()));
        }
        // every sample point lies in exactly one box
        for &x in &[rat(1, 8), rat(3, 8), rat(1, 2), rat(7, 8), rat(1, 1)] {
            for &y in &[rat(1, 8), rat(5, 8), rat(1, 1)] {
                let mut hits = 0;
                for bx in &boxes {
                    let inside = bx.intervals().iter().zip([x, y]).all(|(i, c)| {
                        let scale = (i.b as i128).pow(i.r);
                        let p = *c.numer() as i128;
                        let q = *c.denom() as i128;
                        p * scale > i.a as i128 * q && p * scale <= (i.a as i128 + 1) * q
                    });
                    if inside {
                        hits += 1;
                    }
                }
                assert_eq!(hits, 1, "x={x} y={y}");
            }
        }
        // d=1 collapse: r=(nu) gives b^nu intervals
        assert_eq!(enumerate_boxes(3, &[3]).unwrap().count(), 27);
    }

    #[test]
    fn inner_product_orthogonality() {
        let grid = GridSpec::corner_badic(2, 2, 2, 1).unwrap();
        let h = HaarIndexSet::new(2, 2).unwrap();
        let mut fams: Vec<GridFunction> = Vec::new();
        for r in h.iter() {
            for bx in enumerate_boxes(2, &r).unwrap() {
                fams.push(GridFunction::haar(&bx, &grid).unwrap());
            }
        }
        for (i, f) in fams.iter().enumerate() {
            for (j, g) in fams.iter().enumerate() {
                let ip = inner_product(f, g).unwrap();
                if i == j {
                    assert!(ip > BigRational::zero(), "diagonal {i}");
                } else {
                    assert!(ip.is_zero(), "off-diagonal ({i},{j}) = {ip}");
                }
            }
        }
        // <1, 1> = 1
        let one = GridFunction::constant(2, grid.m(), BigRational::one()).unwrap();
        assert_eq!(inner_product(&one, &one).unwrap(), BigRational::one());
    }
}
