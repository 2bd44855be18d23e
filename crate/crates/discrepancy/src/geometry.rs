//! Point sets, grids, snapping and the generator suite.
//!
//! A [`PointSet`] holds `N` points of `[0,1)^d` with exact-rational or
//! binary64 coordinates. A [`GridSpec`] fixes the evaluation grid: a corner
//! grid `{1/M, ..., M/M}^d` (optionally carrying the b-adic structure
//! `M = b^(nu+tau)` required by the Haar machinery) or a torus grid indexed
//! by `J_M = {-M/2, ..., M/2-1}`. Snapping produces a [`SnappedSet`]: floor
//! snapping for corners and cubes (the discrepancy at grid arguments is
//! unchanged), nearest snapping with residuals `q in [-1/(2M), 1/(2M))^d`
//! for balls.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};

use num_rational::Ratio;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{checked_pow_u128, gcd_u64, Coord};

/// Default cap on materialized cell counts (`M^d`, `K^d`).
pub const DEFAULT_CELL_CAP: u128 = 1 << 26;

/// Whether a point set lives in the anchored unit cube or on the torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Corner,
    Toroidal,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Corner => write!(f, "corner"),
            Mode::Toroidal => write!(f, "toroidal"),
        }
    }
}

/// `N` points in `[0,1)^d`, stored row-major.
#[derive(Clone, Debug)]
pub struct PointSet {
    d: usize,
    mode: Mode,
    coords: Vec<Coord>,
}

impl PointSet {
    pub fn new(d: usize, mode: Mode, points: Vec<Vec<Coord>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("d must be >= 1".into()));
        }
        if points.is_empty() {
            return Err(Error::InvalidParameter("N must be >= 1".into()));
        }
        let mut coords = Vec::with_capacity(points.len() * d);
        for p in &points {
            if p.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Ok(Self { d, mode, coords })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        false // N >= 1 by construction
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn point(&self, n: usize) -> &[Coord] {
        &self.coords[n * self.d..(n + 1) * self.d]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Coord]> {
        self.coords.chunks_exact(self.d)
    }

    /// All coordinates as f64, row-major (lossy for rationals).
    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.iter()
            .map(|p| p.iter().map(|c| c.to_f64()).collect())
            .collect()
    }

    /// Serialize in the point-set CSV format.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# d={} mode={}", self.d, self.mode)?;
        let mut line = String::new();
        for p in self.iter() {
            line.clear();
            for (u, c) in p.iter().enumerate() {
                if u > 0 {
                    line.push(',');
                }
                match c {
                    Coord::Ratio { num, den } => {
                        let _ = write!(line, "{num}/{den}");
                    }
                    Coord::Float(x) => {
                        let _ = write!(line, "{x:?}");
                    }
                }
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    /// Parse the point-set CSV format: a `# d=<d> mode=<mode>` header, then
    /// one point per line with `d` comma-separated fields, each a decimal
    /// float or a rational `a/b`.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let reader = BufReader::new(r);
        let mut d: Option<usize> = None;
        let mut mode = Mode::Corner;
        let mut points: Vec<Vec<Coord>> = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                for tok in rest.split_whitespace() {
                    if let Some(v) = tok.strip_prefix("d=") {
                        d = Some(v.parse().map_err(|_| {
                            Error::PointSetFile(format!("bad d in header: {tok}"))
                        })?);
                    } else if let Some(v) = tok.strip_prefix("mode=") {
                        mode = match v {
                            "corner" => Mode::Corner,
                            "toroidal" => Mode::Toroidal,
                            other => {
                                return Err(Error::PointSetFile(format!(
                                    "unknown mode {other}"
                                )))
                            }
                        };
                    }
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let dim = *d.get_or_insert(fields.len());
            if fields.len() != dim {
                return Err(Error::PointSetFile(format!(
                    "line {}: expected {} fields, got {}",
                    lineno + 1,
                    dim,
                    fields.len()
                )));
            }
            let mut p = Vec::with_capacity(dim);
            for f in fields {
                p.push(parse_coord(f)?);
            }
            points.push(p);
        }
        let d = d.ok_or_else(|| Error::PointSetFile("empty file".into()))?;
        PointSet::new(d, mode, points)
    }
}

fn parse_coord(field: &str) -> Result<Coord> {
    if let Some((a, b)) = field.split_once('/') {
        let num: i64 = a
            .trim()
            .parse()
            .map_err(|_| Error::PointSetFile(format!("bad rational: {field}")))?;
        let den: i64 = b
            .trim()
            .parse()
            .map_err(|_| Error::PointSetFile(format!("bad rational: {field}")))?;
        Coord::from_ratio(num, den)
    } else {
        let x: f64 = field
            .parse()
            .map_err(|_| Error::PointSetFile(format!("bad float: {field}")))?;
        Coord::from_f64(x)
    }
}

/// Structure carried by a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridStructure {
    /// Corner grid with arbitrary resolution.
    Corner,
    /// Corner grid with `M = b^(nu+tau)`, as required by the Haar system.
    CornerBAdic { b: u32, nu: u32, tau: u32 },
    /// Torus grid, `M` even, indexed by `J_M`.
    Torus,
}

/// Dimension, resolution and structure of an evaluation grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpec {
    d: usize,
    m: u64,
    structure: GridStructure,
    cell_cap: u128,
}

impl GridSpec {
    /// Corner grid of arbitrary resolution `m >= 1`.
    pub fn corner(d: usize, m: u64) -> Result<Self> {
        Self::with_cap(d, m, GridStructure::Corner, DEFAULT_CELL_CAP)
    }

    /// Corner grid with `M = b^(nu+tau)`, `tau >= 1`.
    pub fn corner_badic(d: usize, b: u32, nu: u32, tau: u32) -> Result<Self> {
        if b < 2 {
            return Err(Error::InvalidParameter("base b must be >= 2".into()));
        }
        if tau == 0 {
            return Err(Error::GridStructure("b-adic corner grid needs tau >= 1".into()));
        }
        let m = checked_pow_u128(b as u64, nu + tau)?;
        let m = u64::try_from(m)
            .map_err(|_| Error::InvalidParameter(format!("{b}^{} overflows u64", nu + tau)))?;
        Self::with_cap(d, m, GridStructure::CornerBAdic { b, nu, tau }, DEFAULT_CELL_CAP)
    }

    /// Torus grid of even resolution `m >= 4`.
    pub fn torus(d: usize, m: u64) -> Result<Self> {
        if m % 2 != 0 || m < 4 {
            return Err(Error::GridStructure(format!(
                "torus grid needs even M >= 4, got {m}"
            )));
        }
        Self::with_cap(d, m, GridStructure::Torus, DEFAULT_CELL_CAP)
    }

    fn with_cap(d: usize, m: u64, structure: GridStructure, cap: u128) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("d must be >= 1".into()));
        }
        if m == 0 {
            return Err(Error::InvalidParameter("M must be >= 1".into()));
        }
        // the cap is enforced where cells are materialized, not here:
        // closed-form operations (Haar coefficients, pairwise sums) use
        // grids far beyond anything a field build could hold
        Ok(Self {
            d,
            m,
            structure,
            cell_cap: cap,
        })
    }

    /// Replace the materialization cap (`M^d` cells).
    pub fn cell_cap(mut self, cap: u128) -> Result<Self> {
        self.cell_cap = cap;
        Ok(self)
    }

    pub fn check_cell_cap(&self) -> Result<()> {
        let cells = self.cells()?;
        if cells > self.cell_cap {
            return Err(Error::CellCapExceeded {
                cells,
                cap: self.cell_cap,
            });
        }
        Ok(())
    }

    /// `M^d`, the number of grid cells.
    pub fn cells(&self) -> Result<u128> {
        let mut acc: u128 = 1;
        for _ in 0..self.d {
            acc = acc
                .checked_mul(self.m as u128)
                .ok_or(Error::CellCapExceeded {
                    cells: u128::MAX,
                    cap: self.cell_cap,
                })?;
        }
        Ok(acc)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn structure(&self) -> GridStructure {
        self.structure
    }

    /// `(b, nu, tau)` of a b-adic corner grid.
    pub fn badic(&self) -> Result<(u32, u32, u32)> {
        match self.structure {
            GridStructure::CornerBAdic { b, nu, tau } => Ok((b, nu, tau)),
            _ => Err(Error::GridStructure(
                "operation requires a b-adic corner grid (M = b^(nu+tau))".into(),
            )),
        }
    }

    /// `card(J_M) = M` for torus grids.
    pub fn card_j(&self) -> u64 {
        self.m
    }

    /// `card(S_M) = M/2 - 1` for torus grids.
    pub fn card_s(&self) -> u64 {
        self.m / 2 - 1
    }

    fn require_mode(&self, ps: &PointSet) -> Result<()> {
        if ps.d() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: ps.d(),
            });
        }
        let want = match self.structure {
            GridStructure::Torus => Mode::Toroidal,
            _ => Mode::Corner,
        };
        if ps.mode() != want {
            return Err(Error::GridStructure(format!(
                "point set mode {} does not match grid",
                ps.mode()
            )));
        }
        Ok(())
    }
}

/// Points snapped to a grid, with the nearest-snap residuals when present.
#[derive(Clone, Debug)]
pub struct SnappedSet {
    d: usize,
    m: u64,
    /// Lattice representatives, row-major. Corner snap: `z in {0..M-1}^d`.
    /// Nearest snap: `z in {0..M-1}^d` after wrapping.
    z: Vec<i64>,
    /// Nearest-snap residuals `q = p - z/M (mod 1)` as f64, row-major.
    /// Empty for floor snapping.
    q: Vec<f64>,
    /// Origin points (kept so exact residuals can be reconstructed).
    origin: PointSet,
}

impl SnappedSet {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn len(&self) -> usize {
        self.z.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn z(&self, n: usize) -> &[i64] {
        &self.z[n * self.d..(n + 1) * self.d]
    }

    pub fn z_rows(&self) -> impl Iterator<Item = &[i64]> {
        self.z.chunks_exact(self.d)
    }

    /// Residual vector of point `n` (nearest snap only).
    pub fn q(&self, n: usize) -> &[f64] {
        &self.q[n * self.d..(n + 1) * self.d]
    }

    pub fn has_residuals(&self) -> bool {
        !self.q.is_empty()
    }

    /// Exact residual `p_n[u] - z_n[u]/M`, reduced into `[-1/(2M), 1/(2M))`.
    pub fn q_exact(&self, n: usize, u: usize) -> num_rational::BigRational {
        let c = self.origin.point(n)[u];
        let z = self.z[n * self.d + u];
        let mut q = c.sub_grid(z, self.m);
        let half = num_rational::BigRational::new(1.into(), (2 * self.m).into());
        let one = num_rational::BigRational::from_integer(1.into());
        // z was wrapped mod M; undo the wrap in the residual.
        while q >= half {
            q -= &one;
        }
        while q < -half.clone() {
            q += &one;
        }
        q
    }

    pub fn origin(&self) -> &PointSet {
        &self.origin
    }
}

/// Floor snapping: `z_n = floor(M p_n)` componentwise. The corner and cube
/// discrepancy at every grid argument is unchanged by this substitution.
/// On corner grids `z` stays in `{0..M-1}`; on torus grids it is
/// re-centered into `J_M = {-M/2, ..., M/2-1}`.
pub fn snap_corner(ps: &PointSet, grid: &GridSpec) -> Result<SnappedSet> {
    grid.require_mode(ps)?;
    if grid.m < 2 {
        return Err(Error::InvalidParameter("snapping needs M >= 2".into()));
    }
    let m = grid.m;
    let recenter = matches!(grid.structure, GridStructure::Torus);
    let mut z = Vec::with_capacity(ps.len() * ps.d());
    for p in ps.iter() {
        for &c in p {
            let zi = c.floor_scaled(m);
            debug_assert!(zi < m);
            if recenter && zi >= m / 2 {
                z.push(zi as i64 - m as i64);
            } else {
                z.push(zi as i64);
            }
        }
    }
    Ok(SnappedSet {
        d: ps.d(),
        m,
        z,
        q: Vec::new(),
        origin: ps.clone(),
    })
}

/// Nearest snapping with residuals: `p_n = z_n/M + q_n (mod 1)` with
/// `q_n in [-1/(2M), 1/(2M))^d`, exact in the input arithmetic.
pub fn snap_nearest(ps: &PointSet, grid: &GridSpec) -> Result<SnappedSet> {
    if !matches!(grid.structure, GridStructure::Torus) {
        return Err(Error::GridStructure("nearest snapping needs a torus grid".into()));
    }
    if ps.d() != grid.d {
        return Err(Error::DimensionMismatch {
            expected: grid.d,
            got: ps.d(),
        });
    }
    let m = grid.m;
    let mut z = Vec::with_capacity(ps.len() * ps.d());
    let mut q = Vec::with_capacity(ps.len() * ps.d());
    for p in ps.iter() {
        for &c in p {
            let r = c.round_scaled_half_up(m); // in [0, M]
        // residual before wrapping; the wrap moves z by M, not q
            let qi = c.to_f64() - r as f64 / m as f64;
            z.push((r % m) as i64);
            q.push(qi);
        }
    }
    Ok(SnappedSet {
        d: ps.d(),
        m,
        z,
        q,
        origin: ps.clone(),
    })
}

/// The `K^d` lattice `{(j_1/K, ..., j_d/K)}`: zero corner discrepancy on the
/// `K`-grid.
pub fn gen_lattice(k: u64, d: usize, mode: Mode) -> Result<PointSet> {
    if k == 0 {
        return Err(Error::InvalidParameter("K must be >= 1".into()));
    }
    let total = checked_pow_u128(k, d as u32)?;
    if total > DEFAULT_CELL_CAP {
        return Err(Error::CellCapExceeded {
            cells: total,
            cap: DEFAULT_CELL_CAP,
        });
    }
    let n = total as usize;
    let mut points = Vec::with_capacity(n);
    let mut idx = vec![0u64; d];
    for _ in 0..n {
        let p: Vec<Coord> = idx
            .iter()
            .map(|&j| Coord::from_ratio(j as i64, k as i64).unwrap())
            .collect();
        points.push(p);
        for u in (0..d).rev() {
            idx[u] += 1;
            if idx[u] < k {
                break;
            }
            idx[u] = 0;
        }
    }
    PointSet::new(d, mode, points)
}

/// Radical inverse `phi_b(n)` as an exact rational.
pub fn radical_inverse(b: u32, mut n: u64) -> Ratio<i64> {
    let b = b as u64;
    let mut num: u64 = 0;
    let mut den: u64 = 1;
    while n > 0 {
        num = num * b + n % b;
        den *= b;
        n /= b;
    }
    let g = gcd_u64(num, den).max(1);
    Ratio::new_raw((num / g) as i64, (den / g) as i64)
}

/// Van der Corput sequence in base `b`: the first `n` radical inverses.
pub fn gen_van_der_corput(b: u32, n: usize, mode: Mode) -> Result<PointSet> {
    if b < 2 {
        return Err(Error::InvalidParameter("base b must be >= 2".into()));
    }
    let points: Vec<Vec<Coord>> = (0..n as u64)
        .map(|i| {
            let r = radical_inverse(b, i);
            vec![Coord::from_ratio(*r.numer(), *r.denom()).unwrap()]
        })
        .collect();
    PointSet::new(1, mode, points)
}

/// Hammersley set in dimension 2: `(n/N, phi_b(n))`.
pub fn gen_hammersley(b: u32, n: usize, mode: Mode) -> Result<PointSet> {
    if b < 2 {
        return Err(Error::InvalidParameter("base b must be >= 2".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("N must be >= 1".into()));
    }
    let points: Vec<Vec<Coord>> = (0..n as u64)
        .map(|i| {
            let r = radical_inverse(b, i);
            vec![
                Coord::from_ratio(i as i64, n as i64).unwrap(),
                Coord::from_ratio(*r.numer(), *r.denom()).unwrap(),
            ]
        })
        .collect();
    PointSet::new(2, mode, points)
}

/// `N` i.i.d. uniform points, deterministic under a fixed seed.
pub fn gen_uniform_random(n: usize, d: usize, seed: u64, mode: Mode) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<Coord>> = (0..n)
        .map(|_| {
            (0..d)
                .map(|_| Coord::from_f64(rng.gen::<f64>()).unwrap())
                .collect()
        })
        .collect();
    PointSet::new(d, mode, points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snap_corner_hand_values() {
        let ps = PointSet::new(
            2,
            Mode::Corner,
            vec![vec![
                Coord::from_f64(0.37).unwrap(),
                Coord::from_f64(0.91).unwrap(),
            ]],
        )
        .unwrap();
        let grid = GridSpec::corner(2, 8).unwrap();
        let s = snap_corner(&ps, &grid).unwrap();
        assert_eq!(s.z(0), &[2, 7]);
    }

    #[test]
    fn snap_corner_zero_and_on_grid() {
        let ps = PointSet::new(1, Mode::Corner, vec![vec![Coord::zero()]]).unwrap();
        let grid = GridSpec::corner(1, 8).unwrap();
        assert_eq!(snap_corner(&ps, &grid).unwrap().z(0), &[0]);

        let ps = PointSet::new(1, Mode::Corner, vec![vec![Coord::from_ratio(3, 10).unwrap()]])
            .unwrap();
        let grid = GridSpec::corner(1, 10).unwrap();
        assert_eq!(snap_corner(&ps, &grid).unwrap().z(0), &[3]);
    }

    #[test]
    fn snap_nearest_examples() {
        let grid = GridSpec::torus(1, 8).unwrap();
        let ps = PointSet::new(1, Mode::Toroidal, vec![vec![Coord::from_f64(0.37).unwrap()]])
            .unwrap();
        let s = snap_nearest(&ps, &grid).unwrap();
        assert_eq!(s.z(0), &[3]);
        assert!((s.q(0)[0] - (-0.005)).abs() < 1e-15);

        let ps = PointSet::new(1, Mode::Toroidal, vec![vec![Coord::from_f64(0.9999).unwrap()]])
            .unwrap();
        let s = snap_nearest(&ps, &grid).unwrap();
        assert_eq!(s.z(0), &[0]); // wraps past 1
        assert!((s.q(0)[0] - (-0.0001)).abs() < 1e-12);

        let grid4 = GridSpec::torus(1, 4).unwrap();
        let ps = PointSet::new(1, Mode::Toroidal, vec![vec![Coord::from_f64(0.5).unwrap()]])
            .unwrap();
        let s = snap_nearest(&ps, &grid4).unwrap();
        assert_eq!(s.z(0), &[2]);
        assert_eq!(s.q(0)[0], 0.0);
    }

    #[test]
    fn snap_nearest_residual_interval_exact() {
        // boundary case: M*p = z + 1/2 exactly gives q = -1/(2M)
        let grid = GridSpec::torus(1, 8).unwrap();
        let ps = PointSet::new(1, Mode::Toroidal, vec![vec![Coord::from_ratio(3, 16).unwrap()]])
            .unwrap();
        let s = snap_nearest(&ps, &grid).unwrap();
        assert_eq!(s.z(0), &[2]);
        let q = s.q_exact(0, 0);
        assert_eq!(q, num_rational::BigRational::new((-1).into(), 16.into()));
    }

    #[test]
    fn lattice_enumeration() {
        let ps = gen_lattice(2, 2, Mode::Corner).unwrap();
        assert_eq!(ps.len(), 4);
        let rows = ps.to_f64_rows();
        assert!(rows.contains(&vec![0.0, 0.0]));
        assert!(rows.contains(&vec![0.5, 0.5]));
        assert_eq!(gen_lattice(1, 2, Mode::Corner).unwrap().len(), 1);
        assert_eq!(gen_lattice(3, 1, Mode::Corner).unwrap().len(), 3);
    }

    #[test]
    fn van_der_corput_hand_values() {
        let ps = gen_van_der_corput(2, 4, Mode::Corner).unwrap();
        let xs: Vec<f64> = ps.iter().map(|p| p[0].to_f64()).collect();
        assert_eq!(xs, vec![0.0, 0.5, 0.25, 0.75]);
        // phi_3(5): digits of 5 base 3 are (2,1) -> 2/3 + 1/9 = 7/9
        assert_eq!(radical_inverse(3, 5), Ratio::new(7, 9));
        assert_eq!(radical_inverse(2, 0), Ratio::new(0, 1));
    }

    #[test]
    fn random_generator_is_deterministic_and_in_range() {
        let a = gen_uniform_random(100, 2, 42, Mode::Corner).unwrap();
        let b = gen_uniform_random(100, 2, 42, Mode::Corner).unwrap();
        assert_eq!(a.to_f64_rows(), b.to_f64_rows());
        for p in a.iter() {
            for c in p {
                let x = c.to_f64();
                assert!((0.0..1.0).contains(&x));
            }
        }
    }

    #[test]
    fn random_mean_close_to_half() {
        let ps = gen_uniform_random(500_000, 2, 7, Mode::Corner).unwrap();
        let mut sum = 0.0;
        let mut count = 0usize;
        for p in ps.iter() {
            for c in p {
                sum += c.to_f64();
                count += 1;
            }
        }
        let mean = sum / count as f64;
        assert!((mean - 0.5).abs() < 0.002, "mean {mean}");
    }

    #[test]
    fn csv_round_trip() {
        let ps = PointSet::new(
            2,
            Mode::Toroidal,
            vec![
                vec![Coord::from_ratio(1, 3).unwrap(), Coord::from_f64(0.25).unwrap()],
                vec![Coord::from_f64(0.9999).unwrap(), Coord::from_ratio(0, 1).unwrap()],
            ],
        )
        .unwrap();
        let mut buf = Vec::new();
        ps.write_csv(&mut buf).unwrap();
        let back = PointSet::read_csv(&buf[..]).unwrap();
        assert_eq!(back.d(), 2);
        assert_eq!(back.mode(), Mode::Toroidal);
        assert_eq!(back.len(), 2);
        assert_eq!(back.point(0)[0], Coord::from_ratio(1, 3).unwrap());
        assert_eq!(back.point(1)[0], Coord::from_f64(0.9999).unwrap());
    }

    mod properties {
        use super::*;
        use num_rational::BigRational;
        use num_traits::{Signed, ToPrimitive};
        use proptest::prelude::*;

        proptest! {
            // nearest snapping is a bijection: p~ + q reconstructs p
            // exactly and every residual lands in [-1/(2M), 1/(2M))
            #[test]
            fn nearest_snap_reconstructs(
                coords in prop::collection::vec(0.0f64..1.0, 1..6),
                m_exp in 1u32..7,
            ) {
                let m = 2u64 << m_exp;
                let d = coords.len();
                let ps = PointSet::new(
                    d,
                    Mode::Toroidal,
                    vec![coords.iter().map(|&x| Coord::from_f64(x).unwrap()).collect()],
                ).unwrap();
                let grid = GridSpec::torus(d, m).unwrap();
                let s = snap_nearest(&ps, &grid).unwrap();
                let half = BigRational::new(1.into(), (2 * m as i64).into());
                let one = BigRational::from_integer(1.into());
                for u in 0..d {
                    let q = s.q_exact(0, u);
                    prop_assert!(q >= -half.clone() && q < half, "q out of range: {q}");
                    // z/M + q == p modulo 1, exactly
                    let back = BigRational::new(s.z(0)[u].into(), (m as i64).into()) + &q;
                    let p = ps.point(0)[u].to_big_rational();
                    let diff = back - p;
                    prop_assert!(
                        diff.clone().abs() == one || diff == BigRational::from_integer(0.into()),
                        "reconstruction off by {diff}"
                    );
                    // float residual tracks the exact one
                    let qf = s.q(0)[u];
                    prop_assert!((qf - q.to_f64().unwrap()).abs() < 1e-12);
                }
            }

            // floor snapping leaves the corner discrepancy unchanged at
            // every grid argument
            #[test]
            fn floor_snap_preserves_grid_corner_disc(
                coords in prop::collection::vec(0.0f64..1.0, 2..20),
                m in 2u64..17,
            ) {
                let ps = PointSet::new(
                    1,
                    Mode::Corner,
                    coords.iter().map(|&x| vec![Coord::from_f64(x).unwrap()]).collect(),
                ).unwrap();
                let grid = GridSpec::corner(1, m).unwrap();
                let snapped = snap_corner(&ps, &grid).unwrap();
                let snapped_ps = PointSet::new(
                    1,
                    Mode::Corner,
                    snapped.z_rows().map(|z| {
                        vec![Coord::from_ratio(z[0], m as i64).unwrap()]
                    }).collect(),
                ).unwrap();
                for j in 1..=m {
                    let x = [num_rational::Ratio::new(j as i64, m as i64)];
                    let a = crate::corner::corner_disc(&ps, &x).unwrap();
                    let b = crate::corner::corner_disc(&snapped_ps, &x).unwrap();
                    prop_assert_eq!(a, b, "j = {}", j);
                }
            }
        }
    }

    #[test]
    fn grid_cap_rejects_oversized_materialization() {
        let g = GridSpec::corner(3, 1 << 10).unwrap();
        assert!(matches!(g.check_cell_cap(), Err(Error::CellCapExceeded { .. })));
        // closed-form users may opt out
        assert!(g.cell_cap(u128::MAX).unwrap().check_cell_cap().is_ok());
    }

    #[test]
    fn badic_grid_checks_structure() {
        let g = GridSpec::corner_badic(2, 2, 4, 1).unwrap();
        assert_eq!(g.m(), 32);
        assert!(GridSpec::corner_badic(2, 2, 4, 0).is_err());
    }
}
