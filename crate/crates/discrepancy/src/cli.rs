//! Command-line front end: generators, engines, verifiers, identity
//! suites and CSV/JSON emission. The binary is a thin wrapper over
//! [`run`]; everything here dispatches straight into the library.
//!
//! Exit codes: 0 success, 2 configuration/validation failure, 3 identity
//! suite failure.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bounds::{self, BoundReport};
use crate::corner;
use crate::error::{Error, Result};
use crate::geometry::{
    gen_hammersley, gen_lattice, gen_uniform_random, gen_van_der_corput, GridSpec, Mode,
    PointSet,
};
use crate::haar::{enumerate_boxes, BAdicBox, BAdicInterval, HaarIndexSet};
use crate::spectral;
use crate::torus_ball;
use crate::torus_cube;

/// Environment variable naming the default output directory for CSV/JSON
/// artifacts.
pub const OUT_DIR_ENV: &str = "DISCREPANCY_OUT_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "discrepancy",
    about = "Exact discrete corner/cube/ball discrepancy norms and lower-bound verdicts",
    version
)]
pub struct Cli {
    /// Cap on rayon worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a point set and write it as CSV.
    Gen(GenArgs),
    /// Corner (anchored box) grid norms; optional field export.
    Corner(CornerArgs),
    /// Toroidal cube ensemble norms (direct and spectral paths).
    Cube(CubeArgs),
    /// Two-radius toroidal ball norms.
    Ball(BallArgs),
    /// Verify one of the lower-bound theorems; emits a BoundReport JSON.
    Verify(VerifyArgs),
    /// Run an exact-identity suite; exits 3 on any failure.
    Identity(IdentityArgs),
    /// Sweep N and emit (N, lhs, rhs, margin) CSV rows.
    Sweep(SweepArgs),
}

/// Point-set source: a CSV file or a named generator.
#[derive(Args, Debug, Clone)]
pub struct SourceArgs {
    /// Point-set CSV file (see the gen subcommand for the format).
    #[arg(long, conflicts_with = "gen")]
    pub input: Option<PathBuf>,

    /// Generator: random | lattice | vdc | hammersley.
    #[arg(long)]
    pub gen: Option<String>,

    /// Number of points (random, vdc, hammersley).
    #[arg(long)]
    pub n: Option<usize>,

    /// Lattice side K (lattice generator yields K^d points).
    #[arg(long)]
    pub lattice: Option<u64>,

    /// Dimension.
    #[arg(long, short = 'd', default_value_t = 2)]
    pub d: usize,

    /// Base for the radical-inverse generators.
    #[arg(long, default_value_t = 2)]
    pub gen_base: u32,

    /// RNG seed (random generator).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SourceArgs {
    pub fn load(&self, mode: Mode) -> Result<PointSet> {
        if let Some(path) = &self.input {
            let file = File::open(path)?;
            let ps = PointSet::read_csv(file)?;
            return Ok(ps.with_mode(mode));
        }
        let kind = self.gen.as_deref().unwrap_or("random");
        match kind {
            "random" => {
                let n = self.require_n()?;
                gen_uniform_random(n, self.d, self.seed, mode)
            }
            "lattice" => {
                let k = self.lattice.ok_or_else(|| {
                    Error::InvalidParameter("--lattice K required for the lattice generator".into())
                })?;
                gen_lattice(k, self.d, mode)
            }
            "vdc" => {
                if self.d != 1 {
                    return Err(Error::InvalidParameter(
                        "van der Corput is 1-dimensional; use --d 1".into(),
                    ));
                }
                gen_van_der_corput(self.gen_base, self.require_n()?, mode)
            }
            "hammersley" => {
                if self.d != 2 {
                    return Err(Error::InvalidParameter(
                        "Hammersley is 2-dimensional; use --d 2".into(),
                    ));
                }
                gen_hammersley(self.gen_base, self.require_n()?, mode)
            }
            other => Err(Error::InvalidParameter(format!(
                "unknown generator {other} (expected random|lattice|vdc|hammersley)"
            ))),
        }
    }

    fn require_n(&self) -> Result<usize> {
        self.n
            .ok_or_else(|| Error::InvalidParameter("--n is required for this generator".into()))
    }

    pub fn tag(&self) -> String {
        if let Some(p) = &self.input {
            format!("file:{}", p.display())
        } else {
            self.gen.clone().unwrap_or_else(|| "random".into())
        }
    }
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(flatten)]
    pub source: SourceArgs,

    /// corner | toroidal
    #[arg(long, default_value = "corner")]
    pub mode: String,

    /// Output CSV path (defaults to stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CornerArgs {
    #[command(flatten)]
    pub source: SourceArgs,

    /// Base of the b-adic grid (with --tau; M = b^(nu+tau), nu from N).
    #[arg(long)]
    pub b: Option<u32>,

    /// Grid exponent margin tau >= 1.
    #[arg(long, default_value_t = 1)]
    pub tau: u32,

    /// Explicit plain grid resolution (alternative to --b/--tau).
    #[arg(long, short = 'm')]
    pub m: Option<u64>,

    /// Export the (j, count, discrepancy) field as CSV.
    #[arg(long)]
    pub field_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CubeArgs {
    #[command(flatten)]
    pub source: SourceArgs,

    /// Even torus grid resolution.
    #[arg(long, short = 'm')]
    pub m: u64,

    /// Export the (j, r, D) ensemble as CSV.
    #[arg(long)]
    pub field_out: Option<PathBuf>,

    /// Export the (k, radius_weight) table as CSV.
    #[arg(long)]
    pub weights_out: Option<PathBuf>,

    /// Export the (k, Re W, Im W) spectral table as CSV.
    #[arg(long)]
    pub spectrum_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BallArgs {
    #[command(flatten)]
    pub source: SourceArgs,

    /// Even torus grid resolution.
    #[arg(long, short = 'm')]
    pub m: u64,

    /// Base radius r in (0, 1/4); the engine also evaluates 2r.
    #[arg(long, short = 'r')]
    pub r: f64,

    /// Export the (j, D_r, D_2r) field as CSV.
    #[arg(long)]
    pub field_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: SourceArgs,

    /// 1 | 1-linf | 2 | 3
    #[arg(long)]
    pub theorem: String,

    /// Base b (theorems 1 and 1-linf).
    #[arg(long, default_value_t = 2)]
    pub b: u32,

    /// Grid exponent margin tau >= 1 (theorems 1 and 1-linf).
    #[arg(long, default_value_t = 1)]
    pub tau: u32,

    /// Riesz-product weight kappa in (0,1) (theorem 1-linf; defaults to
    /// the bracket argmax).
    #[arg(long)]
    pub kappa: Option<f64>,

    /// Explicit grid resolution (theorems 2 and 3).
    #[arg(long, short = 'm')]
    pub m: Option<u64>,

    /// Ball radius (theorem 3).
    #[arg(long, short = 'r', default_value_t = 0.2)]
    pub r: f64,

    /// Grid floor multiplier C (theorem 3).
    #[arg(long)]
    pub big_c: Option<f64>,

    /// Write the BoundReport JSON here as well as to stdout.
    #[arg(long)]
    pub json_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct IdentityArgs {
    /// haar | plancherel | ball-fourier | all
    #[arg(long, default_value = "all")]
    pub suite: String,

    #[arg(long, default_value_t = 2)]
    pub b: u32,

    #[arg(long, short = 'd', default_value_t = 2)]
    pub d: usize,

    /// Haar total resolution (haar suite); N is drawn from
    /// [b^(nu-2), b^(nu-1)).
    #[arg(long, default_value_t = 4)]
    pub nu: u32,

    #[arg(long, default_value_t = 1)]
    pub tau: u32,

    /// Torus grid resolution (plancherel, ball-fourier).
    #[arg(long, short = 'm', default_value_t = 32)]
    pub m: u64,

    /// Point count (plancherel, ball-fourier).
    #[arg(long, default_value_t = 8)]
    pub n: usize,

    /// Ball radius (ball-fourier).
    #[arg(long, short = 'r', default_value_t = 0.2)]
    pub r: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Number of random configurations per suite.
    #[arg(long, default_value_t = 20)]
    pub cases: usize,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// 1 | 2 | 3
    #[arg(long)]
    pub theorem: String,

    /// Comma-separated point counts, e.g. 4,8,16,32.
    #[arg(long, value_delimiter = ',')]
    pub n_list: Vec<usize>,

    /// Random seeds per N.
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,

    #[arg(long, short = 'd', default_value_t = 2)]
    pub d: usize,

    #[arg(long, default_value_t = 2)]
    pub b: u32,

    #[arg(long, default_value_t = 1)]
    pub tau: u32,

    #[arg(long, short = 'r', default_value_t = 0.2)]
    pub r: f64,

    /// Output CSV (defaults to stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Resolve an output path against `DISCREPANCY_OUT_DIR` when it is
/// relative.
fn resolve_out(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) => PathBuf::from(dir).join(path),
        None => path.to_path_buf(),
    }
}

fn create_out(path: &Path) -> Result<File> {
    let full = resolve_out(path);
    if let Some(parent) = full.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    Ok(File::create(full)?)
}

/// Execute a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    if let Some(threads) = cli.threads {
        // a second init in the same process is fine to ignore
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let outcome = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Corner(args) => cmd_corner(args),
        Command::Cube(args) => cmd_cube(args),
        Command::Ball(args) => cmd_ball(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Identity(args) => return run_identity(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let mode = match args.mode.as_str() {
        "corner" => Mode::Corner,
        "toroidal" => Mode::Toroidal,
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown mode {other} (expected corner|toroidal)"
            )))
        }
    };
    let ps = args.source.load(mode)?;
    match &args.out {
        Some(path) => ps.write_csv(create_out(path)?)?,
        None => ps.write_csv(std::io::stdout().lock())?,
    }
    Ok(())
}

fn cmd_corner(args: CornerArgs) -> Result<()> {
    let ps = args.source.load(Mode::Corner)?;
    let grid = match (args.b, args.m) {
        (Some(b), None) => {
            let nu = bounds::nu_from_n(b, ps.len())?;
            GridSpec::corner_badic(ps.d(), b, nu, args.tau)?
        }
        (None, Some(m)) => GridSpec::corner(ps.d(), m)?,
        _ => {
            return Err(Error::InvalidParameter(
                "pass exactly one of --b (b-adic) or --m (plain grid)".into(),
            ))
        }
    };
    let field = corner::CornerDiscrepancyField::build(&ps, &grid)?;
    let norms = field.norms();
    println!("n={} d={} m={}", ps.len(), ps.d(), grid.m());
    println!("l2={:?}", norms.l2);
    println!("l2_sq_exact={}", norms.l2_sq);
    println!(
        "linf={:?} at j={:?}",
        norms.linf.to_f64().unwrap_or(f64::NAN),
        norms.linf_at
    );
    if let Some(path) = &args.field_out {
        field.write_csv(create_out(path)?)?;
    }
    Ok(())
}

fn cmd_cube(args: CubeArgs) -> Result<()> {
    let ps = args.source.load(Mode::Toroidal)?;
    let grid = GridSpec::torus(ps.d(), args.m)?;
    let direct = torus_cube::ensemble_l2(&ps, &grid)?;
    let snapped = crate::geometry::snap_corner(&ps, &grid)?;
    let table = spectral::exp_sums(&snapped)?;
    let spectral_value = torus_cube::spectral_l2(&table)?;
    println!("n={} d={} m={}", ps.len(), ps.d(), grid.m());
    println!("l2_direct={:?}", direct.l2);
    println!("l2_spectral={:?}", spectral_value);
    println!(
        "rel_gap={:?}",
        (direct.l2 - spectral_value).abs() / direct.l2.max(f64::MIN_POSITIVE)
    );
    if let Some(path) = &args.field_out {
        torus_cube::ensemble_field_csv(&ps, &grid, create_out(path)?)?;
    }
    if let Some(path) = &args.weights_out {
        torus_cube::radius_weight_csv(grid.m(), grid.d(), create_out(path)?)?;
    }
    if let Some(path) = &args.spectrum_out {
        table.write_csv(create_out(path)?)?;
    }
    Ok(())
}

fn cmd_ball(args: BallArgs) -> Result<()> {
    let ps = args.source.load(Mode::Toroidal)?;
    let grid = GridSpec::torus(ps.d(), args.m)?;
    let norm = torus_ball::two_radius_l2(&ps, &grid, args.r)?;
    println!("n={} d={} m={} r={:?}", ps.len(), ps.d(), grid.m(), args.r);
    println!("two_radius_l2={:?}", norm.l2);
    println!("mean_sq_r={:?}", norm.per_radius[0]);
    println!("mean_sq_2r={:?}", norm.per_radius[1]);
    if let Some(path) = &args.field_out {
        torus_ball::ball_field_csv(&ps, &grid, args.r, create_out(path)?)?;
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<()> {
    let tag = format!("{}:seed={}", args.source.tag(), args.source.seed);
    let report: BoundReport = match args.theorem.as_str() {
        "1" => {
            let ps = args.source.load(Mode::Corner)?;
            corner::theorem1_verify(&ps, args.b, args.tau, &tag)?
        }
        "1-linf" => {
            let ps = args.source.load(Mode::Corner)?;
            let kappa = match args.kappa {
                Some(k) => Some(BigRational::from_f64(k).ok_or_else(|| {
                    Error::InvalidParameter("kappa must be finite".into())
                })?),
                None => None,
            };
            corner::theorem1_linf_verify(&ps, args.b, args.tau, kappa, &tag)?
        }
        "2" => {
            let ps = args.source.load(Mode::Toroidal)?;
            torus_cube::theorem2_verify(&ps, args.m, &tag)?
        }
        "3" => {
            let ps = args.source.load(Mode::Toroidal)?;
            torus_ball::theorem3_verify(&ps, args.r, args.m, args.big_c, &tag)?
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown theorem {other} (expected 1|1-linf|2|3)"
            )))
        }
    };
    let mut report = report;
    report.input.seed = Some(args.source.seed);
    let json = report.to_json();
    println!("{json}");
    if let Some(path) = &args.json_out {
        writeln!(create_out(path)?, "{json}")?;
    }
    Ok(())
}

fn run_identity(args: IdentityArgs) -> i32 {
    let result = match args.suite.as_str() {
        "haar" => identity_haar(&args),
        "plancherel" => identity_plancherel(&args),
        "ball-fourier" => identity_ball_fourier(&args),
        "all" => identity_haar(&args)
            .and_then(|f| Ok(f + identity_plancherel(&args)?))
            .and_then(|f| Ok(f + identity_ball_fourier(&args)?)),
        other => {
            eprintln!("error: unknown suite {other}");
            return 2;
        }
    };
    match result {
        Ok(0) => {
            println!("identity suites passed");
            0
        }
        Ok(failures) => {
            eprintln!("identity suites recorded {failures} failure(s)");
            3
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Random empty-box Haar coefficient identities plus the mean-zero and
/// weighted-sum checks; returns the number of violations.
fn identity_haar(args: &IdentityArgs) -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let b = args.b;
    let d = args.d;
    let nu = args.nu;
    if nu < 3 {
        return Err(Error::InvalidParameter("haar suite needs nu >= 3".into()));
    }
    let grid = GridSpec::corner_badic(d, b, nu, args.tau)?;
    let lo = (b as u128).pow(nu - 2);
    let hi = (b as u128).pow(nu - 1);
    let mut failures = 0usize;
    for _ in 0..args.cases {
        let n = rng.gen_range(lo..hi) as usize;
        let ps = gen_uniform_random(n, d, rng.gen(), Mode::Corner)?;
        // random resolution vector and a random empty box of it
        let members: Vec<Vec<u32>> = HaarIndexSet::new(nu, d)?.iter().collect();
        let r = members[rng.gen_range(0..members.len())].clone();
        let Some(bx) = random_empty_box(&ps, b, &r, &mut rng) else {
            continue;
        };
        let got = corner::haar_coefficient(&ps, &bx, &grid)?;
        let want = BigRational::new(
            (-(n as i64)).into(),
            num_bigint::BigInt::from(b).pow(2 * d as u32 + 2 * nu),
        );
        if got != want {
            failures += 1;
            eprintln!("haar coefficient mismatch: n={n} r={r:?}: {got} != {want}");
        }
    }
    // mean-zero and weighted-sum identities across all intervals
    for r in 0..=nu {
        for a in 0..(b as u64).pow(r) {
            let iv = BAdicInterval::new(b, r, a)?;
            let grid1 = GridSpec::corner_badic(1, b, nu, args.tau)?;
            if !num_traits::Zero::is_zero(&crate::haar::haar_mean_zero_check(&iv, &grid1)?) {
                failures += 1;
                eprintln!("mean-zero violation at r={r} a={a}");
            }
            let ws = crate::haar::haar_weighted_sum(&iv, &grid1)?;
            let len = iv.length();
            let expect = BigRational::from_integer(grid1.m().into())
                / BigRational::from_integer((b * b).into())
                * &len
                * &len;
            if ws != expect {
                failures += 1;
                eprintln!("weighted-sum violation at r={r} a={a}");
            }
        }
    }
    Ok(failures)
}

fn random_empty_box(
    ps: &PointSet,
    b: u32,
    r: &[u32],
    rng: &mut ChaCha8Rng,
) -> Option<BAdicBox> {
    let boxes: Vec<BAdicBox> = enumerate_boxes(b, r).ok()?.collect();
    // occupancy via the corner engine's cell mapping
    let occupied: std::collections::HashSet<usize> = ps
        .iter()
        .filter_map(|p| {
            let mut idx = 0usize;
            for (c, &ru) in p.iter().zip(r) {
                let scale = (b as u64).pow(ru);
                let (f, exact) = c.floor_scaled_exact(scale);
                let a = if c.is_zero() {
                    return None;
                } else if exact {
                    f - 1
                } else {
                    f
                };
                idx = idx * scale as usize + a as usize;
            }
            Some(idx)
        })
        .collect();
    let empties: Vec<usize> = (0..boxes.len()).filter(|i| !occupied.contains(i)).collect();
    if empties.is_empty() {
        return None;
    }
    Some(boxes[empties[rng.gen_range(0..empties.len())]].clone())
}

/// Direct vs spectral cube ensemble norms; returns violations of the 1e-9
/// relative tolerance.
fn identity_plancherel(args: &IdentityArgs) -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed.wrapping_add(1));
    let grid = GridSpec::torus(args.d, args.m)?;
    let mut failures = 0usize;
    for _ in 0..args.cases {
        let n = rng.gen_range(1..=args.n.max(1));
        let ps = gen_uniform_random(n, args.d, rng.gen(), Mode::Toroidal)?;
        let direct = torus_cube::ensemble_l2(&ps, &grid)?;
        let snapped = crate::geometry::snap_corner(&ps, &grid)?;
        let spectral_value = torus_cube::spectral_l2(&spectral::exp_sums(&snapped)?)?;
        let rel = (direct.l2 - spectral_value).abs() / direct.l2.max(f64::MIN_POSITIVE);
        if rel > 1e-9 {
            failures += 1;
            eprintln!("plancherel gap {rel} at n={n}");
        }
    }
    Ok(failures)
}

/// Per-point ball transform formula vs direct field DFT; returns
/// violations of the 1e-8 tolerance.
fn identity_ball_fourier(args: &IdentityArgs) -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed.wrapping_add(2));
    let d = if args.d == 1 { 2 } else { args.d };
    let grid = GridSpec::torus(d, args.m)?;
    let mut failures = 0usize;
    for _ in 0..args.cases.min(10) {
        let n = rng.gen_range(1..=args.n.max(1)).min(10);
        let ps = gen_uniform_random(n, d, rng.gen(), Mode::Toroidal)?;
        let err = torus_ball::ball_fourier_identity_check(&ps, &grid, args.r)?;
        if err > 1e-8 {
            failures += 1;
            eprintln!("ball fourier identity error {err} at n={n}");
        }
    }
    Ok(failures)
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let mut rows: Vec<(usize, f64, f64, f64)> = Vec::new();
    for &n in &args.n_list {
        for seed in 0..args.seeds {
            let report = match args.theorem.as_str() {
                "1" => {
                    let ps = gen_uniform_random(n, args.d, seed, Mode::Corner)?;
                    corner::theorem1_verify(&ps, args.b, args.tau, "sweep")?
                }
                "2" => {
                    let ps = gen_uniform_random(n, args.d, seed, Mode::Toroidal)?;
                    torus_cube::theorem2_verify(&ps, None, "sweep")?
                }
                "3" => {
                    let ps = gen_uniform_random(n, args.d, seed, Mode::Toroidal)?;
                    torus_ball::theorem3_verify(&ps, args.r, None, None, "sweep")?
                }
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown theorem {other} (expected 1|2|3)"
                    )))
                }
            };
            rows.push((n, report.lhs, report.rhs, report.margin));
        }
    }
    let mut out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(create_out(path)?),
        None => Box::new(std::io::stdout().lock()),
    };
    writeln!(out, "n,lhs,rhs,margin")?;
    for (n, lhs, rhs, margin) in rows {
        writeln!(out, "{n},{lhs:?},{rhs:?},{margin:?}")?;
    }
    Ok(())
}
