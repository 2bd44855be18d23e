//! Two-radius toroidal ball discrepancy and the Montgomery-type
//! lower-bound pipeline for `d != 1 (mod 4)`.
//!
//! Test sets are periodized open balls `x + B_r` and `x + B_2r` with
//! `r < 1/4` and centers on the grid `x = j/M`, `j in J_M^d`. Counting
//! works on the original points through the nearest-image distance (one
//! image suffices at `r < 1/4`); boundary-grazing comparisons fall back to
//! exact rationals so lattice-like inputs cannot flip a membership.
//!
//! The Fourier side decomposes every point as `p_n = p~_n + q_n` with
//! `p~_n` on the grid and `|q_n| <= 1/(2M)` per axis; the transform of the
//! field is then a per-point sum of shifted-ball lattice transforms, whose
//! main term is a Bessel function and whose remainder lives on a thin
//! spherical shell ([`crate::spectral::ball_decomposition_check`]). The
//! cosine-separation floor behind the final bound is measured by
//! [`cosine_floor_scan`].

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed};
use rayon::prelude::*;

use crate::bounds::{self, BoundReport, ConstantRecord, ConstantSource, InputFingerprint};
use crate::error::{Error, Result};
use crate::exact::Coord;
use crate::geometry::{snap_nearest, GridSpec, GridStructure, Mode, PointSet};
use crate::kahan::Neumaier;
use crate::spectral::fft;

/// Base radii live in (0, 1/4); counting also runs at the doubled radius
/// 2r < 1/2, where the per-coordinate nearest image is still the only one.
fn require_ball_args(ps: &PointSet, grid: &GridSpec, r: f64, max_r: f64) -> Result<()> {
    if !matches!(grid.structure(), GridStructure::Torus) {
        return Err(Error::GridStructure("ball engine needs a torus grid".into()));
    }
    if ps.d() != grid.d() {
        return Err(Error::DimensionMismatch {
            expected: grid.d(),
            got: ps.d(),
        });
    }
    if ps.mode() != Mode::Toroidal {
        return Err(Error::GridStructure("point set must be toroidal".into()));
    }
    if !(0.0 < r && r < max_r) {
        return Err(Error::InvalidParameter(format!(
            "ball radius must lie in (0, {max_r}), got {r}"
        )));
    }
    Ok(())
}

/// Toroidal membership `|p - x|_T < r` with the per-coordinate nearest
/// image (valid for r < 1/2) and an exact recheck in the float-ambiguous
/// boundary zone.
fn inside_ball(p: &[Coord], j: &[i64], m: u64, r: f64) -> bool {
    let mut dist_sq = 0.0;
    for (&c, &ju) in p.iter().zip(j) {
        let delta = (c.to_f64() - ju as f64 / m as f64).abs();
        let delta = delta.min(1.0 - delta);
        dist_sq += delta * delta;
    }
    let r_sq = r * r;
    if (dist_sq - r_sq).abs() > 1e-9 * r_sq.max(1.0) {
        return dist_sq < r_sq;
    }
    // exact: coordinates, grid centers and the f64 radius are rationals
    let one = BigRational::from_integer(1.into());
    let mut exact = BigRational::from_integer(0.into());
    for (&c, &ju) in p.iter().zip(j) {
        let mut delta = (c.to_big_rational()
            - BigRational::new(ju.into(), (m as i64).into()))
        .abs();
        if delta > &one / BigRational::from_integer(2.into()) {
            delta = &one - delta;
        }
        exact += &delta * &delta;
    }
    let r_big = BigRational::from_f64(r).unwrap();
    exact < &r_big * &r_big
}

/// `D(j/M + B_r) = count - N |B_r|`: exact count, float measure term.
pub fn ball_disc(ps: &PointSet, grid: &GridSpec, j: &[i64], r: f64) -> Result<f64> {
    require_ball_args(ps, grid, r, 0.25)?;
    if j.len() != grid.d() {
        return Err(Error::DimensionMismatch {
            expected: grid.d(),
            got: j.len(),
        });
    }
    let count = ps
        .iter()
        .filter(|p| inside_ball(p, j, grid.m(), r))
        .count();
    Ok(count as f64 - ps.len() as f64 * bounds::ball_volume(grid.d(), r)?)
}

/// Rasterized counting field for one radius: `counts[j]` over `J_M^d`
/// (storage index `j_u + M/2`).
pub struct BallField {
    d: usize,
    m: u64,
    counts: Vec<u32>,
}

impl BallField {
    pub fn build(ps: &PointSet, grid: &GridSpec, r: f64) -> Result<Self> {
        require_ball_args(ps, grid, r, 0.5)?;
        grid.check_cell_cap()?;
        let d = grid.d();
        let m = grid.m();
        let cells = grid.cells()? as usize;
        let mut counts = vec![0u32; cells];
        let reach = (m as f64 * r).ceil() as i64 + 1;
        let mut idx = vec![0i64; d];
        for p in ps.iter() {
            let centers: Vec<i64> = p
                .iter()
                .map(|c| (c.to_f64() * m as f64).round() as i64)
                .collect();
            for u in 0..d {
                idx[u] = centers[u] - reach;
            }
            loop {
                if inside_ball(p, &idx, m, r) {
                    let mut flat = 0usize;
                    for &t in idx.iter() {
                        flat = flat * m as usize + t.rem_euclid(m as i64) as usize;
                    }
                    counts[flat] += 1;
                }
                let mut u = d;
                let mut done = true;
                while u > 0 {
                    u -= 1;
                    idx[u] += 1;
                    if idx[u] <= centers[u] + reach {
                        done = false;
                        break;
                    }
                    idx[u] = centers[u] - reach;
                }
                if done {
                    break;
                }
            }
        }
        Ok(Self { d, m, counts })
    }

    pub fn count(&self, j: &[i64]) -> u32 {
        let mut flat = 0usize;
        for &t in j {
            flat = flat * self.m as usize + t.rem_euclid(self.m as i64) as usize;
        }
        self.counts[flat]
    }

    /// `sum_j (count(j) - expected)^2`, deterministic chunked compensated
    /// summation.
    pub fn sum_sq_deviation(&self, expected: f64) -> f64 {
        let chunks: Vec<Neumaier> = self
            .counts
            .par_chunks(1 << 14)
            .map(|chunk| {
                let mut acc = Neumaier::new();
                for &c in chunk {
                    let diff = c as f64 - expected;
                    acc.add(diff * diff);
                }
                acc
            })
            .collect();
        let mut total = Neumaier::new();
        for c in chunks {
            total.merge(c);
        }
        total.total()
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn d(&self) -> usize {
        self.d
    }
}

/// The two-radius ensemble norm and how it was met.
pub struct BallNorm {
    /// `((card J_M)^-d sum_{k=1,2} sum_j |D(j/M, k r)|^2)^(1/2)`
    pub l2: f64,
    /// per-radius mean squares `(card J_M)^-d sum_j |D|^2`
    pub per_radius: [f64; 2],
    /// whether `M` met the configured floor `C N^(1+1/(2d)) / r`
    pub floor_ok: bool,
}

/// Direct-path two-radius l2. When `M^d` exceeds the grid's cell cap the
/// field is not materialized; the square sum runs over point pairs
/// (ball-intersection lattice counts) instead.
pub fn two_radius_l2(ps: &PointSet, grid: &GridSpec, r: f64) -> Result<BallNorm> {
    require_ball_args(ps, grid, r, 0.25)?;
    let d = grid.d();
    let m = grid.m();
    let n = ps.len() as f64;
    let cells = grid.cells().unwrap_or(u128::MAX);
    let mut per_radius = [0.0f64; 2];
    for (slot, radius) in [r, 2.0 * r].into_iter().enumerate() {
        let expected = n * bounds::ball_volume(d, radius)?;
        let sum_sq = if cells <= crate::geometry::DEFAULT_CELL_CAP {
            BallField::build(ps, grid, radius)?.sum_sq_deviation(expected)
        } else {
            pairwise_sum_sq(ps, m, radius, expected)?
        };
        per_radius[slot] = sum_sq / (m as f64).powi(d as i32);
    }
    let floor_ok = true; // callers check the Theorem-3 floor themselves
    Ok(BallNorm {
        l2: (per_radius[0] + per_radius[1]).sqrt(),
        per_radius,
        floor_ok,
    })
}

/// `sum_j (c(j) - e)^2 = sum_{n,n'} #(ball_n cap ball_n') - 2 e sum_n #ball_n
/// + M^d e^2` without materializing the field.
fn pairwise_sum_sq(ps: &PointSet, m: u64, r: f64, expected: f64) -> Result<f64> {
    let d = ps.d();
    let n = ps.len();
    let reach = (m as f64 * r).ceil() as i64 + 1;
    let points: Vec<&[Coord]> = ps.iter().collect();
    let rows: Vec<(usize, f64, f64)> = (0..n)
        .into_par_iter()
        .map(|a| {
            let pa = points[a];
            let centers: Vec<i64> = pa
                .iter()
                .map(|c| (c.to_f64() * m as f64).round() as i64)
                .collect();
            let mut own = 0usize;
            let mut cross = 0f64;
            let mut idx: Vec<i64> = centers.iter().map(|&c| c - reach).collect();
            loop {
                if inside_ball(pa, &idx, m, r) {
                    own += 1;
                    let mut inside_others = 0f64;
                    for (b, pb) in points.iter().enumerate() {
                        if b != a && inside_ball(pb, &idx, m, r) {
                            inside_others += 1.0;
                        }
                    }
                    cross += inside_others;
                }
                let mut u = d;
                let mut done = true;
                while u > 0 {
                    u -= 1;
                    idx[u] += 1;
                    if idx[u] <= centers[u] + reach {
                        done = false;
                        break;
                    }
                    idx[u] = centers[u] - reach;
                }
                if done {
                    break;
                }
            }
            (own, cross, 0.0)
        })
        .collect();
    let own_total: f64 = rows.iter().map(|r| r.0 as f64).sum();
    let cross_total: f64 = rows.iter().map(|r| r.1).sum();
    let cells = (m as f64).powi(d as i32);
    // sum c^2 = own + cross; sum c = own
    Ok(own_total + cross_total - 2.0 * expected * own_total + cells * expected * expected)
}

/// Spectral-path two-radius l2 via the per-point ball-transform formula
/// (including the `k = 0` delta term, where the Plancherel step is an
/// identity). Small grids only; the oracle partner of [`two_radius_l2`].
pub fn two_radius_l2_spectral(ps: &PointSet, grid: &GridSpec, r: f64) -> Result<f64> {
    let d = grid.d();
    let m = grid.m();
    let mut total = 0.0;
    for radius in [r, 2.0 * r] {
        let dhat = field_transform_formula(ps, grid, radius)?;
        let sum_sq: f64 = dhat.iter().map(|v| v.norm_sqr()).sum();
        total += sum_sq / (m as f64).powi(2 * d as i32);
    }
    Ok(total.sqrt())
}

/// `D_hat(k, r) = sum_n exp(-2 pi i k p~_n) chi_hat_{-B_r+q_n}(k)
///  - |B_r| N M^d delta_0(k)` for all `k in J_M^d` (storage order), via one
/// indicator FFT per point.
fn field_transform_formula(ps: &PointSet, grid: &GridSpec, r: f64) -> Result<Vec<Complex64>> {
    require_ball_args(ps, grid, r, 0.5)?;
    grid.check_cell_cap()?;
    let d = grid.d();
    let m = grid.m() as usize;
    let cells = grid.cells()? as usize;
    let snapped = snap_nearest(ps, grid)?;
    let dims = vec![m; d];
    let mut total = vec![Complex64::default(); cells];
    let roots: Vec<Complex64> = (0..m)
        .map(|t| Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * t as f64 / m as f64))
        .collect();
    for nidx in 0..ps.len() {
        let q = snapped.q(nidx);
        // indicator of the shifted ball on the lattice, storage index
        // t = m_vec + M/2 per axis
        let mut ind = vec![Complex64::default(); cells];
        let reach = (m as f64 * r).ceil() as i64 + 1;
        let mut mv = vec![-reach; d];
        loop {
            if crate::spectral::ball_membership(&mv, q, r, m as u64) {
                let mut flat = 0usize;
                for &t in mv.iter() {
                    flat = flat * m + (t + m as i64 / 2) as usize;
                }
                ind[flat] = Complex64::new(1.0, 0.0);
            }
            let mut u = d;
            let mut done = true;
            while u > 0 {
                u -= 1;
                mv[u] += 1;
                if mv[u] <= reach {
                    done = false;
                    break;
                }
                mv[u] = -reach;
            }
            if done {
                break;
            }
        }
        fft::fft_nd(&mut ind, &dims);
        // storage index t corresponds to frequency k = t (mod M); the
        // gathered array was shifted by M/2 per axis, so multiply by
        // (-1)^(sum k_u); then attach the point phase exp(-2 pi i k z~/M)
        let z = snapped.z(nidx);
        let mut t_idx = vec![0usize; d];
        for (flat, v) in ind.iter().enumerate() {
            let mut rest = flat;
            for u in (0..d).rev() {
                t_idx[u] = rest % m;
                rest /= m;
            }
            let mut sign_and_phase = Complex64::new(1.0, 0.0);
            let mut parity = 0usize;
            for u in 0..d {
                let k = t_idx[u];
                parity += k * (m / 2);
                sign_and_phase *= roots[(k * z[u] as usize) % m];
            }
            let sgn = if parity % 2 == 0 { 1.0 } else { -1.0 };
            total[flat] += v * sign_and_phase * sgn;
        }
    }
    // delta term at k = 0 (storage index 0)
    let vol = bounds::ball_volume(d, r)?;
    total[0] -= Complex64::new(vol * ps.len() as f64 * (m as f64).powi(d as i32), 0.0);
    Ok(total)
}

/// Compare the direct DFT of the ball discrepancy field against the
/// per-point transform formula over the full spectrum; returns the largest
/// `|direct - formula| / max(1, |formula|)`.
pub fn ball_fourier_identity_check(ps: &PointSet, grid: &GridSpec, r: f64) -> Result<f64> {
    require_ball_args(ps, grid, r, 0.25)?;
    let d = grid.d();
    let m = grid.m() as usize;
    let formula = field_transform_formula(ps, grid, r)?;
    // direct: rasterize the field over storage index t = j + M/2, subtract
    // the measure term, DFT, undo the half-period shift
    let field = BallField::build(ps, grid, r)?;
    let expected = ps.len() as f64 * bounds::ball_volume(d, r)?;
    let cells = formula.len();
    let mut data = vec![Complex64::default(); cells];
    let mut t_idx = vec![0usize; d];
    for (flat, slot) in data.iter_mut().enumerate() {
        let mut rest = flat;
        for u in (0..d).rev() {
            t_idx[u] = rest % m;
            rest /= m;
        }
        let j: Vec<i64> = t_idx.iter().map(|&t| t as i64 - m as i64 / 2).collect();
        *slot = Complex64::new(field.count(&j) as f64 - expected, 0.0);
    }
    let dims = vec![m; d];
    fft::fft_nd(&mut data, &dims);
    let mut worst = 0.0f64;
    for (flat, direct) in data.iter().enumerate() {
        let mut rest = flat;
        let mut parity = 0usize;
        for _ in 0..d {
            parity += (rest % m) * (m / 2);
            rest /= m;
        }
        let sgn = if parity % 2 == 0 { 1.0 } else { -1.0 };
        let direct = direct * sgn;
        let err = (direct - formula[flat]).norm() / formula[flat].norm().max(1.0);
        worst = worst.max(err);
    }
    Ok(worst)
}

/// Scan the achievable frequency magnitudes `|k|`, `k in Z^d`, over
/// `(k_min, M/(10 sqrt d))` and return the minimum of
/// `cos^2(omega_1) + cos^2(omega_2)` together with its argmin `|k|`, where
/// `omega_1 = (2 pi r + 2 pi sqrt(d)/M) |k| - (d+1) pi/4` and `omega_2`
/// doubles the radius term. Requires `d != 1 (mod 4)`; the returned floor
/// is strictly positive exactly because of that hypothesis.
pub fn cosine_floor_scan(d: usize, r: f64, m: u64, k_min: f64) -> Result<(f64, f64)> {
    if d % 4 == 1 {
        return Err(Error::Hypothesis(format!(
            "cosine separation requires d != 1 (mod 4), got d={d}"
        )));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("d must be >= 1".into()));
    }
    let k_sup = m as f64 / (10.0 * (d as f64).sqrt());
    if k_sup <= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "scan range empty: M/(10 sqrt d) = {k_sup} <= 1"
        )));
    }
    let max_sq = (k_sup * k_sup).ceil() as usize;
    // achievable |k|^2: sums of d integer squares
    let mut reachable = vec![false; max_sq + 1];
    reachable[0] = true;
    for _ in 0..d {
        let mut next = vec![false; max_sq + 1];
        for s in 0..=max_sq {
            if reachable[s] {
                let mut t = 0usize;
                while s + t * t <= max_sq {
                    next[s + t * t] = true;
                    t += 1;
                }
            }
        }
        reachable = next;
    }
    let mut best = f64::INFINITY;
    let mut best_k = 0.0;
    let offset = 2.0 * std::f64::consts::PI * (d as f64).sqrt() / m as f64;
    let quarter = (d as f64 + 1.0) * std::f64::consts::FRAC_PI_4;
    for s in 1..=max_sq {
        if !reachable[s] {
            continue;
        }
        let k_norm = (s as f64).sqrt();
        if k_norm <= k_min || k_norm >= k_sup {
            continue;
        }
        let w1 = (2.0 * std::f64::consts::PI * r + offset) * k_norm - quarter;
        let w2 = (4.0 * std::f64::consts::PI * r + offset) * k_norm - quarter;
        let v = w1.cos().powi(2) + w2.cos().powi(2);
        if v < best {
            best = v;
            best_k = k_norm;
        }
    }
    if !best.is_finite() {
        return Err(Error::InvalidParameter("no admissible |k| in range".into()));
    }
    Ok((best, best_k))
}

/// Theorem-3 verdict: two-radius l2 against the calibrated
/// `c r^(d/2) N^(1/2 - 1/(2d))` at `M >= C N^(1 + 1/(2d)) / r` (even).
pub fn theorem3_verify(
    ps: &PointSet,
    r: f64,
    m_opt: Option<u64>,
    big_c: Option<f64>,
    tag: &str,
) -> Result<BoundReport> {
    let d = ps.d();
    if d % 4 == 1 {
        return Err(Error::Hypothesis(format!(
            "theorem 3 requires d != 1 (mod 4), got d={d}"
        )));
    }
    if !(0.0 < r && r < 0.25) {
        return Err(Error::InvalidParameter(format!(
            "radius must lie in (0, 1/4), got {r}"
        )));
    }
    let n = ps.len();
    let big_c = big_c.unwrap_or(bounds::THEOREM3_BIG_C);
    let floor = big_c * (n as f64).powf(1.0 + 1.0 / (2.0 * d as f64)) / r;
    let m = match m_opt {
        Some(m) => {
            if (m as f64) < floor || m % 2 != 0 {
                return Err(Error::InvalidParameter(format!(
                    "theorem 3 requires even M >= C N^(1+1/(2d))/r = {floor:.1}, got {m}"
                )));
            }
            m
        }
        None => {
            let mut m = floor.ceil() as u64;
            m += m % 2;
            m
        }
    };
    let grid = GridSpec::torus(d, m)?;
    let norm = two_radius_l2(ps, &grid, r)?;
    let c = bounds::THEOREM3_CALIBRATED_C;
    let rhs = c * r.powf(d as f64 / 2.0) * (n as f64).powf(0.5 - 0.5 / d as f64);
    let verdict = norm.l2 >= rhs;
    Ok(BoundReport {
        theorem: "3".into(),
        lhs: norm.l2,
        rhs,
        lhs_sq: norm.l2 * norm.l2,
        rhs_sq: rhs * rhs,
        rhs_sq_exact: None,
        margin: norm.l2 / rhs,
        verdict: if verdict { "pass" } else { "fail" }.into(),
        constants: vec![
            ConstantRecord::new("C (grid floor multiplier)", big_c, ConstantSource::Calibrated),
            ConstantRecord::new("c (two-radius constant)", c, ConstantSource::Calibrated),
        ],
        input: InputFingerprint {
            n,
            d,
            m,
            b: None,
            r: Some(r),
            seed: None,
            tag: tag.into(),
        },
    })
}

/// Export `(j_1, ..., j_d, D_r, D_2r)` rows.
pub fn ball_field_csv<W: std::io::Write>(
    ps: &PointSet,
    grid: &GridSpec,
    r: f64,
    mut w: W,
) -> Result<()> {
    require_ball_args(ps, grid, r, 0.25)?;
    let d = grid.d();
    let m = grid.m();
    let f1 = BallField::build(ps, grid, r)?;
    let f2 = BallField::build(ps, grid, 2.0 * r)?;
    let n = ps.len() as f64;
    let e1 = n * bounds::ball_volume(d, r)?;
    let e2 = n * bounds::ball_volume(d, 2.0 * r)?;
    let header: Vec<String> = (1..=d).map(|u| format!("j{u}")).collect();
    writeln!(w, "{},disc_r,disc_2r", header.join(","))?;
    let half = m as i64 / 2;
    let mut j = vec![-half; d];
    loop {
        let d1 = f1.count(&j) as f64 - e1;
        let d2 = f2.count(&j) as f64 - e2;
        let coords: Vec<String> = j.iter().map(|x| x.to_string()).collect();
        writeln!(w, "{},{d1:?},{d2:?}", coords.join(","))?;
        let mut u = d;
        let mut done = true;
        while u > 0 {
            u -= 1;
            j[u] += 1;
            if j[u] < half {
                done = false;
                break;
            }
            j[u] = -half;
        }
        if done {
            return Ok(());
        }
    }
}
