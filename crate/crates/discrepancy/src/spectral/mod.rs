//! Shared Fourier machinery on `J_M^d`: exponential sums of snapped point
//! sets, closed-form discrete transforms of cube indicators, the radius
//! weights `sum_s |chi_hat_{-Q(s)}(k)|^2`, lattice-sum transforms of ball
//! indicators, and the Bessel main term of the ball decomposition.
//!
//! DFT convention: `F_hat(k) = sum_{m in J_M^d} F(m/M) exp(-2 pi i k m/M)`,
//! periodic in every component of `k` with period `M`.

pub mod bessel;
pub mod fft;

use num_complex::Complex64;
use num_rational::{BigRational, Ratio};
use num_traits::FromPrimitive;

use crate::error::{Error, Result};
use crate::geometry::{SnappedSet, DEFAULT_CELL_CAP};
use crate::kahan::Neumaier;

/// Per-frequency exponential sums `W(k) = sum_n exp(-2 pi i k z_n / M)`
/// over `k in J_M^d`, built by FFT of the integer cell histogram.
pub struct SpectralTable {
    d: usize,
    m: u64,
    n: usize,
    values: Vec<Complex64>,
}

impl SpectralTable {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `W(k)`; indices are periodic mod `M`, so any integer vector works.
    pub fn w(&self, k: &[i64]) -> Complex64 {
        debug_assert_eq!(k.len(), self.d);
        let m = self.m as i64;
        let mut idx = 0usize;
        for &ku in k {
            idx = idx * self.m as usize + ku.rem_euclid(m) as usize;
        }
        self.values[idx]
    }

    /// Iterate `(k, W(k))` over `J_M^d`.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<i64>, Complex64)> + '_ {
        let m = self.m as i64;
        let d = self.d;
        self.values.iter().enumerate().map(move |(flat, &w)| {
            let mut k = vec![0i64; d];
            let mut rest = flat;
            for u in (0..d).rev() {
                let digit = (rest % m as usize) as i64;
                k[u] = if digit >= m / 2 { digit - m } else { digit };
                rest /= m as usize;
            }
            (k, w)
        })
    }

    /// Dump `(k_1, ..., k_d, Re W, Im W)` rows as CSV.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        let header: Vec<String> = (1..=self.d).map(|u| format!("k{u}")).collect();
        writeln!(w, "{},re_w,im_w", header.join(","))?;
        for (k, v) in self.iter() {
            let ks: Vec<String> = k.iter().map(|x| x.to_string()).collect();
            writeln!(w, "{},{:?},{:?}", ks.join(","), v.re, v.im)?;
        }
        Ok(())
    }
}

/// Build the spectral table of a snapped set in `O(M^d log M)`.
///
/// Ball-mode tables are identical in form: the nearest-snap representatives
/// `p~_n` lie on the grid, so `W~(k) = sum_n exp(-2 pi i k p~_n)` is the
/// same histogram transform.
pub fn exp_sums(s: &SnappedSet) -> Result<SpectralTable> {
    let m = s.m();
    let d = s.d();
    let cells = crate::exact::checked_pow_u128(m, d as u32)?;
    if cells > DEFAULT_CELL_CAP {
        return Err(Error::CellCapExceeded {
            cells,
            cap: DEFAULT_CELL_CAP,
        });
    }
    let mut values = vec![Complex64::default(); cells as usize];
    for z in s.z_rows() {
        let mut idx = 0usize;
        for &zu in z {
            idx = idx * m as usize + zu.rem_euclid(m as i64) as usize;
        }
        values[idx] += Complex64::new(1.0, 0.0);
    }
    let dims = vec![m as usize; d];
    fft::fft_nd(&mut values, &dims);
    Ok(SpectralTable {
        d,
        m,
        n: s.len(),
        values,
    })
}

/// One factor `Phi_r(k) = exp(-pi i k/M) sin(2 pi k r/M) / sin(pi k/M)`,
/// extended by continuity to `Phi_r(0) = 2r`. `k` is reduced mod `M`
/// first, which makes the periodicity exact.
pub fn phi_factor(k: i64, r: u64, m: u64) -> Complex64 {
    let k = k.rem_euclid(m as i64);
    if k == 0 {
        return Complex64::new(2.0 * r as f64, 0.0);
    }
    let pi = std::f64::consts::PI;
    // numerator angle reduced exactly in integers: 2 k r mod 2M halves
    let num_half = (2 * k as i128 * r as i128).rem_euclid(2 * m as i128) as f64;
    let sin_num = (pi * num_half / m as f64).sin();
    let sin_den = (pi * k as f64 / m as f64).sin();
    let phase = Complex64::from_polar(1.0, -pi * k as f64 / m as f64);
    phase * (sin_num / sin_den)
}

/// `chi_hat_{-Q(r/M)}(k) = prod_u Phi_r(k_u)`, the closed-form discrete
/// transform of the periodized cube of half-side `r/M`.
pub fn cube_transform(k: &[i64], r: u64, m: u64) -> Complex64 {
    k.iter().map(|&ku| phi_factor(ku, r, m)).product()
}

/// The defining lattice sum `sum_{m in (-r, r]^d} exp(-2 pi i k m / M)`;
/// the brute-force oracle for [`cube_transform`].
pub fn cube_transform_brute(k: &[i64], r: u64, m: u64) -> Complex64 {
    let m_i = m as i64;
    let roots: Vec<Complex64> = (0..m)
        .map(|j| Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * j as f64 / m as f64))
        .collect();
    let r_i = r as i64;
    let mut acc = Complex64::default();
    let d = k.len();
    let mut idx = vec![-r_i + 1; d];
    loop {
        let mut phase: i64 = 0;
        for (&ku, &mu) in k.iter().zip(&idx) {
            phase = (phase + (ku.rem_euclid(m_i)) * mu.rem_euclid(m_i)) % m_i;
        }
        acc += roots[phase.rem_euclid(m_i) as usize];
        let mut u = d;
        loop {
            if u == 0 {
                return acc;
            }
            u -= 1;
            idx[u] += 1;
            if idx[u] <= r_i {
                break;
            }
            idx[u] = -r_i + 1;
        }
    }
}

/// `sum_{r=1}^{M/2-1} |chi_hat_{-Q(r/M)}(k)|^2` by the closed form
/// `4^d / (2^(3h) prod sin^2(pi k_u/M)) sum_r r^(2d-2h) prod (1 - cos(4 pi k_u r/M))`
/// with `h` the number of nonzero components; compensated summation over
/// `r`. Rejects `k = 0`.
pub fn radius_weight(k: &[i64], m: u64) -> Result<f64> {
    let d = k.len();
    let nz: Vec<i64> = k.iter().copied().filter(|&x| x != 0).collect();
    let h = nz.len();
    if h == 0 {
        return Err(Error::InvalidParameter("radius_weight rejects k = 0".into()));
    }
    let pi = std::f64::consts::PI;
    let pow = 2 * (d - h) as i32;
    let mut acc = Neumaier::new();
    for r in 1..m / 2 {
        let mut term = (r as f64).powi(pow);
        for &ku in &nz {
            // exact integer reduction of 4 pi k r / M modulo 2 pi
            let t = (2 * ku as i128 * r as i128).rem_euclid(m as i128) as f64;
            term *= 1.0 - (2.0 * pi * t / m as f64).cos();
        }
        acc.add(term);
    }
    let mut pref = 4f64.powi(d as i32) / 2f64.powi(3 * h as i32);
    for &ku in &nz {
        let s = (pi * ku as f64 / m as f64).sin();
        pref /= s * s;
    }
    Ok(pref * acc.total())
}

/// Precomputed power-cosine sums that let [`radius_weight`] evaluate in
/// `O(3^d)` per frequency on the large grids of the cube pipeline:
/// `S_p[q] = sum_{r=1}^{M/2-1} r^p cos(4 pi q r / M)`, `q` modulo `M/2`.
pub struct RadiusWeightTable {
    m: u64,
    d: usize,
    /// tables for p = 0, 2, ..., 2(d-1)
    s: Vec<Vec<f64>>,
}

impl RadiusWeightTable {
    pub fn new(m: u64, d: usize) -> Self {
        let pi = std::f64::consts::PI;
        let half = (m / 2) as usize;
        let s = (0..d)
            .map(|i| {
                let p = 2 * i as i32;
                (0..half)
                    .map(|q| {
                        let mut acc = Neumaier::new();
                        for r in 1..half {
                            let t = (2 * q as i128 * r as i128).rem_euclid(m as i128) as f64;
                            acc.add((r as f64).powi(p) * (2.0 * pi * t / m as f64).cos());
                        }
                        acc.total()
                    })
                    .collect()
            })
            .collect();
        Self { m, d, s }
    }

    /// Same value as [`radius_weight`], via the product-to-sum expansion of
    /// `prod_u (1 - cos a_u r)` into at most `3^h` table lookups.
    pub fn eval(&self, k: &[i64]) -> Result<f64> {
        debug_assert_eq!(k.len(), self.d);
        let nz: Vec<i64> = k.iter().copied().filter(|&x| x != 0).collect();
        let h = nz.len();
        if h == 0 {
            return Err(Error::InvalidParameter("radius_weight rejects k = 0".into()));
        }
        let pi = std::f64::consts::PI;
        let table = &self.s[self.d - h];
        let half = self.m as i128 / 2;
        let mut total = 0.0;
        // prod_u (1 - cos a_u r) expands over subsets S of the nonzero
        // components; each cosine product then splits over sign patterns:
        // prod_{u in S} cos(a_u r) = 2^-|S| sum_sigma cos(4 pi q_sigma r/M)
        for mask in 0..(1u32 << h) {
            let size = mask.count_ones() as usize;
            let coef = if size % 2 == 0 { 1.0 } else { -1.0 } / 2f64.powi(size as i32);
            let picks: Vec<i64> = (0..h).filter(|u| mask >> u & 1 == 1).map(|u| nz[u]).collect();
            for signs in 0..(1u32 << size) {
                let mut q: i128 = 0;
                for (i, &ku) in picks.iter().enumerate() {
                    if signs >> i & 1 == 1 {
                        q -= ku as i128;
                    } else {
                        q += ku as i128;
                    }
                }
                let qi = q.rem_euclid(half) as usize;
                total += coef * table[qi];
            }
        }
        let mut pref = 4f64.powi(self.d as i32) / 2f64.powi(3 * h as i32);
        for &ku in &nz {
            let s = (pi * ku as f64 / self.m as f64).sin();
            pref /= s * s;
        }
        Ok(pref * total)
    }
}

/// Exact count of `r in {0, ..., M/2-1}` with
/// `1 - cos(4 pi k r / M) <= 1 - cos(2 pi eps)`, i.e. the cyclic group
/// elements within angle `2 pi eps` of 1. Requires `0 < |k| <= eps M`;
/// the count is then at most `2 eps M`.
pub fn cyclic_small_angle_count(k: i64, m: u64, eps: Ratio<i64>) -> Result<u64> {
    if m % 2 != 0 {
        return Err(Error::InvalidParameter("M must be even".into()));
    }
    let (num, den) = (*eps.numer() as i128, *eps.denom() as i128);
    if num <= 0 || den <= 0 || 2 * num >= den {
        return Err(Error::InvalidParameter("eps must lie in (0, 1/2)".into()));
    }
    let k_abs = k.unsigned_abs() as i128;
    if k == 0 || k_abs * den > num * m as i128 {
        return Err(Error::Hypothesis(format!(
            "need 0 < |k| <= eps M (k={k}, eps={eps}, M={m})"
        )));
    }
    // condition: || 2 k r / M || <= eps, with ||.|| distance to nearest
    // integer; exact in integers: min(t, M - t) * den <= num * M where
    // t = 2 |k| r mod M
    let mut count = 0u64;
    for r in 0..m / 2 {
        let t = (2 * k_abs * r as i128).rem_euclid(m as i128);
        let dist = t.min(m as i128 - t);
        if dist * den <= num * m as i128 {
            count += 1;
        }
    }
    Ok(count)
}

/// `G(xi) = prod_j sin(pi xi_j)/(pi xi_j)` with the continuous extension 1
/// at `xi_j = 0`.
pub fn sinc_product_g(xi: &[f64]) -> f64 {
    xi.iter()
        .map(|&x| {
            if x == 0.0 {
                1.0
            } else {
                (std::f64::consts::PI * x).sin() / (std::f64::consts::PI * x)
            }
        })
        .product()
}

/// Membership `|m/M - q| < r` with an exact-rational recheck when the
/// floating distance lands within 1e-9 of the boundary. The f64 inputs
/// are themselves exact rationals, so the verdict is deterministic.
pub fn ball_membership(m_vec: &[i64], q: &[f64], r: f64, m: u64) -> bool {
    strictly_inside_ball(m_vec, q, r, m)
}

fn strictly_inside_ball(m_vec: &[i64], q: &[f64], r: f64, m: u64) -> bool {
    let mut dist_sq = 0.0;
    for (&mu, &qu) in m_vec.iter().zip(q) {
        let t = mu as f64 / m as f64 - qu;
        dist_sq += t * t;
    }
    let r_sq = r * r;
    if (dist_sq - r_sq).abs() > 1e-9 * r_sq.max(1.0) {
        return dist_sq < r_sq;
    }
    // boundary zone: decide exactly
    let mut exact = BigRational::from_integer(0.into());
    for (&mu, &qu) in m_vec.iter().zip(q) {
        let t = BigRational::new(mu.into(), (m as i64).into())
            - BigRational::from_f64(qu).unwrap();
        exact += &t * &t;
    }
    let r_big = BigRational::from_f64(r).unwrap();
    exact < &r_big * &r_big
}

/// Visit every lattice point `m` with `|m/M - q| < r` (open ball, strict).
/// Accepts any radius for which the shifted ball stays inside one period,
/// i.e. `r + 1/(2M) <= 1/2`; the pipeline uses base radii `r < 1/4` and
/// their doubles.
fn for_each_ball_point<F: FnMut(&[i64])>(r: f64, m: u64, q: &[f64], mut f: F) -> Result<()> {
    if !(0.0 < r && r + 0.5 / m as f64 <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "ball radius {r} does not fit one period at M = {m}"
        )));
    }
    let d = q.len();
    let reach = (m as f64 * r).ceil() as i64 + 1;
    let mut idx = vec![0i64; d];
    let ranges: Vec<(i64, i64)> = q
        .iter()
        .map(|&qu| {
            let center = (qu * m as f64).round() as i64;
            (center - reach, center + reach)
        })
        .collect();
    for (u, &(lo, _)) in ranges.iter().enumerate() {
        idx[u] = lo;
    }
    loop {
        if strictly_inside_ball(&idx, q, r, m) {
            f(&idx);
        }
        let mut u = d;
        loop {
            if u == 0 {
                return Ok(());
            }
            u -= 1;
            idx[u] += 1;
            if idx[u] <= ranges[u].1 {
                break;
            }
            idx[u] = ranges[u].0;
        }
    }
}

/// Lattice count `card(M(-B_r + q) cap Z^d)`, i.e. the transform at
/// `k = 0`.
pub fn ball_lattice_count(r: f64, m: u64, q: &[f64]) -> Result<u64> {
    let mut count = 0u64;
    for_each_ball_point(r, m, q, |_| count += 1)?;
    Ok(count)
}

/// `chi_hat_{-B_r+q}(k) = sum_{m in M(-B_r+q)} exp(-2 pi i k m / M)`:
/// the exact lattice sum over the integer points of the scaled shifted
/// ball (all within one period since `r < 1/4`).
pub fn ball_transform(k: &[i64], r: f64, m: u64, q: &[f64]) -> Result<Complex64> {
    if k.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: q.len(),
            got: k.len(),
        });
    }
    let mut acc = Complex64::default();
    let two_pi = 2.0 * std::f64::consts::PI;
    for_each_ball_point(r, m, q, |mv| {
        let mut phase: i128 = 0;
        for (&ku, &mu) in k.iter().zip(mv) {
            phase += ku as i128 * mu as i128;
        }
        let t = phase.rem_euclid(m as i128) as f64;
        acc += Complex64::from_polar(1.0, -two_pi * t / m as f64);
    })?;
    Ok(acc)
}

/// Bessel main term of the ball transform decomposition:
/// `I_(k,M)(r) = (rM + sqrt(d))^(d/2) J_(d/2)(2 pi (rM + sqrt d)/M |k|) / (|k|/M)^(d/2)`.
pub fn bessel_main_term(k: &[i64], r: f64, m: u64) -> Result<f64> {
    let d = k.len();
    let k_norm = (k.iter().map(|&x| (x * x) as f64).sum::<f64>()).sqrt();
    bessel_main_term_mag(k_norm, r, m, d)
}

/// [`bessel_main_term`] by frequency magnitude.
pub fn bessel_main_term_mag(k_norm: f64, r: f64, m: u64, d: usize) -> Result<f64> {
    if k_norm == 0.0 {
        return Err(Error::InvalidParameter("bessel main term rejects k = 0".into()));
    }
    let rho = r * m as f64 + (d as f64).sqrt();
    let arg = 2.0 * std::f64::consts::PI * rho * k_norm / m as f64;
    let j = bessel::bessel_j_half(d as u32, arg)?;
    Ok(rho.powf(d as f64 / 2.0) * j / (k_norm / m as f64).powf(d as f64 / 2.0))
}

/// Ball decomposition remainder check: returns
/// `(|chi_hat(k) G(k/M) - I_(k,M)(r)|, |E_(r,M,q)|)` where the region
/// measure is `vol{|x| <= rM + sqrt d} - card(M(-B_r+q))`. The remainder
/// is an integral over `E`, so its modulus never exceeds `|E|`.
pub fn ball_decomposition_check(
    k: &[i64],
    r: f64,
    m: u64,
    q: &[f64],
) -> Result<(f64, f64)> {
    let d = k.len();
    let chi = ball_transform(k, r, m, q)?;
    let xi: Vec<f64> = k.iter().map(|&ku| ku as f64 / m as f64).collect();
    let g = sinc_product_g(&xi);
    let i_term = bessel_main_term(k, r, m)?;
    let remainder = (chi * g - Complex64::new(i_term, 0.0)).norm();
    let rho = r * m as f64 + (d as f64).sqrt();
    let volume = crate::bounds::unit_ball_volume(d)? * rho.powi(d as i32);
    let count = ball_lattice_count(r, m, q)? as f64;
    Ok((remainder, volume - count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{gen_uniform_random, snap_corner, snap_nearest, GridSpec, Mode, PointSet};
    use num_complex::Complex64;

    #[test]
    fn exp_sums_hand_cases() {
        // all points in one cell: W(k) = N exp(-2 pi i k z/M) has |W| = N;
        // at z = 0, W(k) = N for all k
        let ps = PointSet::new(
            1,
            Mode::Toroidal,
            vec![vec![crate::exact::Coord::zero()]; 5],
        )
        .unwrap();
        let grid = GridSpec::torus(1, 8).unwrap();
        let snapped = snap_corner(&ps.clone().with_mode(Mode::Corner), &GridSpec::corner(1, 8).unwrap()).unwrap();
        let table = exp_sums(&snapped).unwrap();
        for k in -4..4 {
            assert!((table.w(&[k]) - Complex64::new(5.0, 0.0)).norm() < 1e-12);
        }
        let _ = grid;
        // full cycle d=1, M=4, z={0,1,2,3}: W(0)=4, W(k)=0 otherwise
        let ps = PointSet::new(
            1,
            Mode::Corner,
            (0..4)
                .map(|j| vec![crate::exact::Coord::from_ratio(j, 4).unwrap()])
                .collect(),
        )
        .unwrap();
        let table = exp_sums(&snap_corner(&ps, &GridSpec::corner(1, 4).unwrap()).unwrap()).unwrap();
        assert!((table.w(&[0]) - Complex64::new(4.0, 0.0)).norm() < 1e-12);
        for k in [-2i64, -1, 1] {
            assert!(table.w(&[k]).norm() < 1e-12, "k={k}");
        }
        // single phase: N=1, z=1, M=4, k=1 -> exp(-pi i/2) = -i
        let ps = PointSet::new(
            1,
            Mode::Corner,
            vec![vec![crate::exact::Coord::from_ratio(1, 4).unwrap()]],
        )
        .unwrap();
        let table = exp_sums(&snap_corner(&ps, &GridSpec::corner(1, 4).unwrap()).unwrap()).unwrap();
        assert!((table.w(&[1]) - Complex64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn exp_sums_match_direct_phase_summation() {
        for (d, m, n) in [(1usize, 12u64, 9usize), (2, 10, 7), (3, 6, 5)] {
            let ps = gen_uniform_random(n, d, 42 + d as u64, Mode::Toroidal).unwrap();
            let grid = GridSpec::torus(d, m).unwrap();
            let snapped = snap_nearest(&ps, &grid).unwrap();
            let table = exp_sums(&snapped).unwrap();
            // direct: W(k) = sum_n exp(-2 pi i k z_n / M)
            let mut worst: f64 = 0.0;
            for (k, w) in table.iter() {
                let mut direct = Complex64::default();
                for z in snapped.z_rows() {
                    let mut ph = 0i64;
                    for (&ku, &zu) in k.iter().zip(z) {
                        ph += ku * zu;
                    }
                    direct += Complex64::from_polar(
                        1.0,
                        -2.0 * std::f64::consts::PI * ph as f64 / m as f64,
                    );
                }
                worst = worst.max((w - direct).norm());
                assert!(w.norm() <= n as f64 + 1e-9, "|W| <= N");
            }
            assert!(worst < 1e-10 * n as f64, "d={d}: worst {worst}");
            // W(0) = N and conjugate symmetry
            assert!((table.w(&vec![0; d]) - Complex64::new(n as f64, 0.0)).norm() < 1e-10);
            for (k, w) in table.iter() {
                let neg: Vec<i64> = k.iter().map(|&x| -x).collect();
                assert!((table.w(&neg) - w.conj()).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn cube_transform_at_zero_and_magnitude() {
        for d in 1..=3usize {
            let k0 = vec![0i64; d];
            let v = cube_transform(&k0, 3, 16);
            assert!((v - Complex64::new(6f64.powi(d as i32), 0.0)).norm() < 1e-12);
        }
        // magnitude = prod |sin(2 pi k r/M)/sin(pi k/M)|
        let (m, r) = (16u64, 3u64);
        for k1 in [-8i64, -5, -1, 1, 4, 7] {
            for k2 in [-8i64, 0, 2] {
                let v = cube_transform(&[k1, k2], r, m).norm();
                let pi = std::f64::consts::PI;
                let f = |k: i64| -> f64 {
                    if k == 0 {
                        2.0 * r as f64
                    } else {
                        ((2.0 * pi * k as f64 * r as f64 / m as f64).sin()
                            / (pi * k as f64 / m as f64).sin())
                        .abs()
                    }
                };
                assert!((v - f(k1) * f(k2)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn cube_transform_matches_brute_lattice_sum() {
        for m in [4u64, 8, 10, 16] {
            for d in 1..=2usize {
                for r in 1..m / 2 {
                    let mut k = vec![-(m as i64) / 2; d];
                    loop {
                        let fast = cube_transform(&k, r, m);
                        let brute = cube_transform_brute(&k, r, m);
                        assert!(
                            (fast - brute).norm() <= 1e-12 * brute.norm().max(1.0),
                            "m={m} r={r} k={k:?}: {fast} vs {brute}"
                        );
                        let mut u = d;
                        let mut done = true;
                        while u > 0 {
                            u -= 1;
                            k[u] += 1;
                            if k[u] < (m as i64) / 2 {
                                done = false;
                                break;
                            }
                            k[u] = -(m as i64) / 2;
                        }
                        if done {
                            break;
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cube_transform_periodic_in_k() {
        let (m, r) = (12u64, 4u64);
        for k in [-6i64, -1, 3, 5] {
            let a = phi_factor(k, r, m);
            let b = phi_factor(k + m as i64, r, m);
            let c = phi_factor(k - 3 * m as i64, r, m);
            assert_eq!(a, b);
            assert_eq!(a, c);
        }
    }

    #[test]
    fn radius_weight_closed_form_vs_direct() {
        // direct: sum over r of |cube_transform|^2
        for m in [8u64, 12, 16, 32] {
            for d in 1..=3usize {
                let mut k = vec![0i64; d];
                k[0] = 1;
                if d > 1 {
                    k[1] = -(m as i64) / 4;
                }
                let mut direct = 0.0;
                for r in 1..m / 2 {
                    direct += cube_transform(&k, r, m).norm_sqr();
                }
                let closed = radius_weight(&k, m).unwrap();
                assert!(
                    (closed - direct).abs() <= 1e-10 * direct.max(1.0),
                    "m={m} d={d} k={k:?}: {closed} vs {direct}"
                );
            }
        }
        // the spec's zero case: d=1, M=4, k=2 -> only r=1, sin(pi) = 0
        assert!(radius_weight(&[2], 4).unwrap().abs() < 1e-20);
        assert!(radius_weight(&[0, 0], 8).is_err());
    }

    #[test]
    fn radius_weight_table_matches_literal() {
        for (m, d) in [(16u64, 1usize), (16, 2), (12, 3), (32, 2)] {
            let table = RadiusWeightTable::new(m, d);
            let half = m as i64 / 2;
            let mut k = vec![-half; d];
            loop {
                if k.iter().any(|&x| x != 0) {
                    let lit = radius_weight(&k, m).unwrap();
                    let fast = table.eval(&k).unwrap();
                    assert!(
                        (lit - fast).abs() <= 1e-9 * lit.abs().max(1.0),
                        "m={m} d={d} k={k:?}: {lit} vs {fast}"
                    );
                }
                let mut u = d;
                let mut done = true;
                while u > 0 {
                    u -= 1;
                    k[u] += 1;
                    if k[u] < half {
                        done = false;
                        break;
                    }
                    k[u] = -half;
                }
                if done {
                    break;
                }
            }
        }
    }

    #[test]
    fn cyclic_count_enumeration_and_bound() {
        for m in [8u64, 16, 32, 64] {
            for den in [8i64, 16, 18] {
                let eps = Ratio::new(1, den);
                let kmax = (m as i64) / den;
                for k in 1..=kmax.max(0) {
                    let count = cyclic_small_angle_count(k, m, eps).unwrap();
                    // brute-force the trig condition itself
                    let mut brute = 0u64;
                    for r in 0..m / 2 {
                        let lhs = 1.0
                            - (4.0 * std::f64::consts::PI * k as f64 * r as f64 / m as f64)
                                .cos();
                        let rhs = 1.0
                            - (2.0 * std::f64::consts::PI / den as f64).cos();
                        if lhs <= rhs + 1e-12 {
                            brute += 1;
                        }
                    }
                    assert_eq!(count, brute, "m={m} eps=1/{den} k={k}");
                    assert!(
                        count as i64 * den <= 2 * m as i64,
                        "count {count} exceeds 2 eps M"
                    );
                }
            }
        }
        // eps -> tiny with k = 1: only r = 0 qualifies
        assert_eq!(cyclic_small_angle_count(1, 64, Ratio::new(1, 64)).unwrap(), 1);
        assert!(cyclic_small_angle_count(9, 64, Ratio::new(1, 8)).is_err());
    }

    #[test]
    fn sinc_values() {
        assert_eq!(sinc_product_g(&[0.0, 0.0]), 1.0);
        assert!((sinc_product_g(&[0.5]) - 2.0 / std::f64::consts::PI).abs() < 1e-15);
        assert!(sinc_product_g(&[1.0]).abs() < 1e-15);
        // on k/M arguments the product stays in [(2/pi)^d, 1]
        for k in -8i64..8 {
            let g = sinc_product_g(&[k as f64 / 16.0]).abs();
            if k != 0 {
                assert!((2.0 / std::f64::consts::PI..=1.0).contains(&g));
            }
        }
    }

    #[test]
    fn ball_lattice_hand_count() {
        // q=0, d=2, rM=1.5: the 3x3 block, all inside |m| < 1.5
        let count = ball_lattice_count(1.5 / 64.0, 64, &[0.0, 0.0]).unwrap();
        assert_eq!(count, 9);
        // k=0 transform equals the count
        let t = ball_transform(&[0, 0], 1.5 / 64.0, 64, &[0.0, 0.0]).unwrap();
        assert!((t - Complex64::new(9.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn ball_transform_conjugate_symmetry() {
        let q = [0.003, -0.005];
        let r = 0.2;
        for k in [[1i64, 3], [5, -2], [-7, 11]] {
            let a = ball_transform(&k, r, 64, &q).unwrap();
            let neg = [-k[0], -k[1]];
            let b = ball_transform(&neg, r, 64, &q).unwrap();
            assert!((a.conj() - b).norm() < 1e-12);
        }
    }

    #[test]
    fn ball_boundary_points_excluded_exactly() {
        // r = 3/16 is exact in binary64 and rM = 9 at M = 48: the four
        // lattice points at |m| = 9 sit exactly on the sphere and must not
        // be counted (open ball, strict inequality)
        let m = 48u64;
        let r = 3.0 / 16.0;
        let count = ball_lattice_count(r, m, &[0.0, 0.0]).unwrap();
        let mut strict = 0u64;
        let mut boundary = 0u64;
        for a in -9i64..=9 {
            for b in -9i64..=9 {
                match (a * a + b * b).cmp(&81) {
                    std::cmp::Ordering::Less => strict += 1,
                    std::cmp::Ordering::Equal => boundary += 1,
                    _ => {}
                }
            }
        }
        assert_eq!(boundary, 4, "test geometry: |m| = 9 has 4 lattice points");
        assert_eq!(count, strict);
    }

    #[test]
    fn bessel_main_term_d3_closed_form() {
        // d=3: J_(3/2) has a trig closed form; cross-check the assembled term
        let k = [2i64, -1, 2]; // |k| = 3
        let (r, m) = (0.15, 32u64);
        let got = bessel_main_term(&k, r, m).unwrap();
        let rho = r * m as f64 + 3f64.sqrt();
        let w = 2.0 * std::f64::consts::PI * rho * 3.0 / m as f64;
        let j = (2.0 / (std::f64::consts::PI * w)).sqrt() * (w.sin() / w - w.cos());
        let want = rho.powf(1.5) * j / (3.0 / m as f64).powf(1.5);
        assert!((got - want).abs() < 1e-9 * want.abs().max(1.0));
        assert!(bessel_main_term(&[0, 0, 0], r, m).is_err());
    }

    #[test]
    fn decomposition_remainder_bounded_by_region() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let (m, r) = (64u64, 0.2f64);
        for _ in 0..100 {
            let q = [
                rng.gen_range(-0.5 / m as f64..0.5 / m as f64),
                rng.gen_range(-0.5 / m as f64..0.5 / m as f64),
            ];
            let k = [rng.gen_range(-31i64..32), rng.gen_range(-31i64..32)];
            if k == [0, 0] {
                continue;
            }
            let (rem, e) = ball_decomposition_check(&k, r, m, &q).unwrap();
            assert!(e >= 0.0, "region measure must be nonnegative");
            assert!(rem <= e + 1e-9, "k={k:?} q={q:?}: |R|={rem} > |E|={e}");
        }
    }
}
