//! `ncilw` — command-line driver for the verification laboratory.

mod eig;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ncilw_core::config::Config;
use ncilw_core::fermion::FermionBasis;
use ncilw_core::fock::{inner, FockBasis, ModePoly, TruncationSpec};
use ncilw_core::hamiltonians::{c_poly, h2_poly, h3_poly, w1_poly, w2_poly, w3_poly};
use ncilw_core::insertions::parse_insertions;
use ncilw_core::params::ModelParams;
use ncilw_core::pde::{conserved, ic_preset, integrate, FieldPair};
use ncilw_core::specfun::{self, ThetaKind};
use ncilw_core::transforms::{apply_t, apply_tt, parse_samples_csv, PeriodicField};
use ncilw_core::verify;
use ncilw_core::vertex::{correlator_closed, correlator_fock, visited_sectors, Insertion};
use ncilw_core::Chirality;
use num_complex::Complex64;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "ncilw",
    about = "Numerical laboratory for a regularized non-chiral CFT: special functions, \
             nonlocal transforms, a truncated Fock space with vertex operators and anyons, \
             second-quantized Hamiltonians, and the classical ncILW equation.",
    version
)]
struct Cli {
    /// Configuration file (key = value with [sections])
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Per-key overrides, e.g. --set truncation.l_max=16 (repeatable)
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
    /// Seed for randomized checks
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Scale all tolerances by this factor
    #[arg(long, global = true)]
    tolerance_scale: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suites and emit a pass/fail report
    Verify(VerifyArgs),
    /// Evaluate a special function on a grid, as CSV
    Specfun {
        #[command(subcommand)]
        action: SpecfunAction,
    },
    /// Apply T or T~ to a sampled field from a CSV file
    Transform(TransformArgs),
    /// Anyon correlation functions: closed form vs Fock space
    Correlator(CorrelatorArgs),
    /// Build a second-quantized operator and report its basic data
    Hamiltonian {
        #[command(subcommand)]
        action: HamiltonianAction,
    },
    /// Eigenvalues (with multiplicities) of a named operator
    Spectrum(SpectrumArgs),
    /// Integrate the classical ncILW equation
    Pde {
        #[command(subcommand)]
        action: PdeAction,
    },
    /// Boson-fermion spectral comparison
    Fermion {
        #[command(subcommand)]
        action: FermionAction,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only checks whose id contains this substring
    #[arg(long)]
    only: Option<String>,
    /// Write the JSON report here
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write per-check CSV details into this directory
    #[arg(long)]
    csv_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SpecfunAction {
    /// Evaluate one function at a point or on a grid
    Eval(SpecfunArgs),
}

#[derive(Args)]
struct SpecfunArgs {
    /// Function name: theta1|theta4|zeta1|zeta1_shifted|wp1|wp1_shifted|dirac|sgn|c|ct|j|jt
    #[arg(long = "fn")]
    name: String,
    /// Single evaluation point (omit to scan a grid over [-ell, ell))
    #[arg(long)]
    x: Option<f64>,
    /// Regularization parameter
    #[arg(long)]
    eps: Option<f64>,
    /// Grid size when scanning
    #[arg(long, default_value_t = 64)]
    points: usize,
}

#[derive(Args)]
struct TransformArgs {
    /// Which transform to apply
    #[arg(long = "op", value_parser = ["T", "Tt"])]
    op: String,
    /// Input CSV of samples (one per line, or x,value rows)
    #[arg(long)]
    input: PathBuf,
    /// Output CSV path (defaults to stdout)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CorrelatorArgs {
    /// Insertions `r,m,x[,eps]; ...` with r in {+,-}, m in {1, -1/g}
    #[arg(long)]
    insertions: String,
    /// Scan the first insertion's position over this many grid points
    #[arg(long, default_value_t = 1)]
    scan: usize,
}

#[derive(Subcommand)]
enum HamiltonianAction {
    /// Assemble the operator and report dimension, hermiticity, ground state
    Build(HamiltonianArgs),
}

#[derive(Args)]
struct HamiltonianArgs {
    #[arg(long, value_parser = ["W1", "W2", "W3", "C", "H2", "H3"])]
    kind: String,
    /// Chirality for the W operators
    #[arg(long, default_value = "+")]
    r: String,
    /// Compute the ground eigenvalue densely (guarded by dimension)
    #[arg(long, default_value_t = 400)]
    eig_dim_limit: usize,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Operator: Q+|Q-|C|H2|W2+|W2-
    #[arg(long = "op")]
    op: String,
    /// Dense-eigensolver dimension guard
    #[arg(long, default_value_t = 400)]
    eig_dim_limit: usize,
}

#[derive(Subcommand)]
enum PdeAction {
    /// Time-integrate from an initial condition
    Run(PdeArgs),
}

#[derive(Args)]
struct PdeArgs {
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long = "N")]
    n_grid: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "T")]
    t_end: Option<f64>,
    /// Initial condition: preset name (zero|default|two-mode|gauss) or a CSV
    /// file with u,v sample columns
    #[arg(long)]
    ic: Option<String>,
    #[arg(long)]
    scheme: Option<String>,
    /// Write field snapshots every k logging intervals (0 = never)
    #[arg(long, default_value_t = 0)]
    snapshots: usize,
    /// Output CSV path for the conserved-quantity time series
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum FermionAction {
    /// Sector-by-sector boson/fermion spectral comparison
    BosonizeCheck(FermionArgs),
}

#[derive(Args)]
struct FermionArgs {
    /// Nome q (0 gives the exact character identity, q > 0 the conjectural
    /// spectral relation H2 = G^2 H2^F at nu0 = 1)
    #[arg(long, default_value_t = 0.0)]
    q: f64,
    /// Compare spectra up to this excitation level
    #[arg(long, default_value_t = 6)]
    level: usize,
}

fn load_config(cli: &Cli) -> Result<Config> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            Config::parse(&text)?
        }
        None => Config::default(),
    };
    for ov in &cli.overrides {
        cfg.apply_override(ov)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(ts) = cli.tolerance_scale {
        cfg.tolerance_scale = ts;
    }
    Ok(cfg)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let cfg = load_config(&cli)?;
    match &cli.command {
        Command::Verify(args) => cmd_verify(&cfg, args),
        Command::Specfun { action: SpecfunAction::Eval(args) } => cmd_specfun(&cfg, args),
        Command::Transform(args) => cmd_transform(&cfg, args),
        Command::Correlator(args) => cmd_correlator(&cfg, args),
        Command::Hamiltonian { action: HamiltonianAction::Build(args) } => cmd_hamiltonian(&cfg, args),
        Command::Spectrum(args) => cmd_spectrum(&cfg, args),
        Command::Pde { action: PdeAction::Run(args) } => cmd_pde(&cfg, args),
        Command::Fermion { action: FermionAction::BosonizeCheck(args) } => cmd_fermion(&cfg, args),
    }
}

fn cmd_verify(cfg: &Config, args: &VerifyArgs) -> Result<()> {
    let report = verify::run_all(cfg, args.only.as_deref());
    print!("{}", report.summary());
    if let Some(path) = &args.json {
        std::fs::write(path, report.to_json())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(dir) = &args.csv_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("checks.csv"), report.to_csv())?;
    }
    if !report.all_passed() {
        std::process::exit(1);
    }
    Ok(())
}

fn cmd_specfun(cfg: &Config, args: &SpecfunArgs) -> Result<()> {
    let params = cfg.model()?;
    let eps = args.eps.unwrap_or(params.eps);
    let xs: Vec<f64> = match args.x {
        Some(x) => vec![x],
        None => (0..args.points)
            .map(|j| -params.ell + 2.0 * params.ell * j as f64 / args.points as f64)
            .collect(),
    };
    let kappa = params.kappa();
    println!("x,re,im,path,trunc");
    for &x in &xs {
        let (v, path, trunc): (Complex64, &str, usize) = match args.name.as_str() {
            "theta1" => {
                let e = specfun::theta_reg(ThetaKind::One, Complex64::new(kappa * x, 0.0), params.q(), kappa * eps)?;
                (e.value, "product", e.trunc)
            }
            "theta4" => {
                let e = specfun::theta_reg(ThetaKind::Four, Complex64::new(kappa * x, 0.0), params.q(), kappa * eps)?;
                (e.value, "product", e.trunc)
            }
            "zeta1" => {
                let e = specfun::zeta1(Complex64::new(x, 0.0), &params)?;
                (e.value, "series", e.trunc)
            }
            "zeta1_shifted" => {
                let e = specfun::zeta1_shifted(Complex64::new(x, 0.0), &params)?;
                (e.value, "series", e.trunc)
            }
            "wp1" => {
                let e = specfun::wp1_reg(x, eps, false, &params)?;
                (e.value, "product", e.trunc)
            }
            "wp1_shifted" => {
                let e = specfun::wp1_reg(x, eps, true, &params)?;
                (e.value, "product", e.trunc)
            }
            "dirac" => (
                Complex64::new(specfun::dirac_reg(x, eps, &params)?, 0.0),
                "closed",
                0,
            ),
            "sgn" => (
                Complex64::new(specfun::sgn_reg(x, eps, &params)?, 0.0),
                "closed",
                0,
            ),
            "c" => (specfun::c_fun(Complex64::new(x, 0.0), eps, &params, None)?, "log_sum", 0),
            "ct" => (specfun::ct_fun(Complex64::new(x, 0.0), eps, &params, None)?, "log_sum", 0),
            "j" => (Complex64::new(specfun::j_fun(x, eps, &params, false)?, 0.0), "series", 0),
            "jt" => (Complex64::new(specfun::j_fun(x, eps, &params, true)?, 0.0), "series", 0),
            other => bail!("unknown function {other:?}"),
        };
        println!("{x:.17e},{:.17e},{:.17e},{path},{trunc}", v.re, v.im);
    }
    Ok(())
}

fn cmd_transform(cfg: &Config, args: &TransformArgs) -> Result<()> {
    let params = cfg.model()?;
    let text = std::fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let samples = parse_samples_csv(&text)?;
    let field = PeriodicField::from_samples(params.ell, &samples)?;
    let (out, warn) = match args.op.as_str() {
        "T" => (apply_t(&field, &params), false),
        _ => apply_tt(&field, &params),
    };
    if warn {
        eprintln!(
            "warning: input has non-zero mean; T~ maps it to an imaginary constant, \
             real samples below drop it"
        );
    }
    let mut w: Box<dyn Write> = match &args.output {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout()),
    };
    writeln!(w, "x,sample,mode,coeff_re,coeff_im")?;
    let n = out.n_grid();
    let h = 2.0 * params.ell / n as f64;
    let samples = out.samples();
    for j in 0..n {
        let mode = if j <= n / 2 { j as i64 } else { j as i64 - n as i64 };
        let c = out.coeff(mode);
        writeln!(
            w,
            "{:.17e},{:.17e},{mode},{:.17e},{:.17e}",
            -params.ell + j as f64 * h,
            samples[j],
            c.re,
            c.im
        )?;
    }
    Ok(())
}

fn cmd_correlator(cfg: &Config, args: &CorrelatorArgs) -> Result<()> {
    let params = cfg.model()?;
    let parsed = parse_insertions(&args.insertions, &params)?;
    let base: Vec<Insertion> = parsed.iter().map(|p| p.insertion).collect();
    println!("x1,closed_re,closed_im,fock_re,fock_im,abs_diff");
    let scan = args.scan.max(1);
    for k in 0..scan {
        let mut ins = base.clone();
        if scan > 1 {
            ins[0].x = -params.ell + 2.0 * params.ell * k as f64 / scan as f64;
        }
        let closed = correlator_closed(&ins, &params)?;
        let sectors = visited_sectors(&ins, &params, (0, 0))?;
        let basis = FockBasis::with_sectors(cfg.truncation(), params, sectors)
            .map_err(|e| anyhow!("basis: {e}"))?;
        let (fock, _) = correlator_fock(&ins, &basis)?;
        println!(
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.3e}",
            ins[0].x,
            closed.re,
            closed.im,
            fock.re,
            fock.im,
            (closed - fock).norm()
        );
    }
    Ok(())
}

fn build_named_poly(kind: &str, r: Chirality, basis: &FockBasis, params: &ModelParams) -> ModePoly {
    match kind {
        "W1" => w1_poly(r, basis),
        "W2" => w2_poly(r, basis),
        "W3" => w3_poly(r, basis),
        "C" => c_poly(basis),
        "H2" => h2_poly(basis),
        _ => h3_poly(params.nu(), basis),
    }
}

fn dense_columns(poly: &ModePoly, basis: &FockBasis) -> Vec<Vec<Complex64>> {
    let dim = basis.dim();
    (0..dim)
        .map(|j| {
            let mut e = basis.zero();
            e[j] = Complex64::new(1.0, 0.0);
            poly.apply(basis, &e).0
        })
        .collect()
}

fn cmd_hamiltonian(cfg: &Config, args: &HamiltonianArgs) -> Result<()> {
    let params = cfg.model()?;
    let r: Chirality = args.r.parse().map_err(|e: String| anyhow!(e))?;
    let basis = FockBasis::build(cfg.truncation(), params).map_err(|e| anyhow!("{e}"))?;
    let poly = build_named_poly(&args.kind, r, &basis, &params);
    println!("operator: {}  (chirality {r} where applicable)", args.kind);
    println!("basis dimension: {}", basis.dim());
    println!("monomials: {}", poly.terms.len());
    // Hermiticity residual on a protected probe pair
    let budget = (2 * basis.spec.n_max).min(basis.spec.l_max);
    let level = basis.spec.l_max - budget.min(basis.spec.l_max);
    let u = probe(&basis, level, 3);
    let v = probe(&basis, level, 4);
    let (pu, _) = poly.apply(&basis, &u);
    let (pv, _) = poly.apply(&basis, &v);
    let herm = (inner(&u, &pv) - inner(&pu, &v)).norm();
    println!("hermiticity residual (protected probes): {herm:.3e}");
    let om = basis.vacuum().map_err(|e| anyhow!("{e}"))?;
    let (pom, _) = poly.apply(&basis, &om);
    println!("<Omega|Op|Omega> = {:.12e}", inner(&om, &pom).re);
    if basis.dim() <= args.eig_dim_limit {
        let evs = eig::eigh(&dense_columns(&poly, &basis));
        println!("ground eigenvalue: {:.12e}", evs[0]);
    } else {
        println!(
            "ground eigenvalue: skipped (dimension {} above guard {}; lower truncation or raise --eig-dim-limit)",
            basis.dim(),
            args.eig_dim_limit
        );
    }
    Ok(())
}

fn probe(basis: &FockBasis, max_level: usize, seed: u64) -> Vec<Complex64> {
    // deterministic quasi-random phases, no RNG dependency needed here
    let idx = basis.states_up_to_level(max_level);
    let mut v = basis.zero();
    for (k, &i) in idx.iter().enumerate() {
        let t = (k as f64 + seed as f64) * 0.7391;
        v[i] = Complex64::new(t.sin(), (1.7 * t).cos());
    }
    let n = ncilw_core::fock::norm(&v);
    if n > 0.0 {
        v.iter_mut().for_each(|c| *c /= n);
    }
    v
}

fn cmd_spectrum(cfg: &Config, args: &SpectrumArgs) -> Result<()> {
    let params = cfg.model()?;
    let basis = FockBasis::build(cfg.truncation(), params).map_err(|e| anyhow!("{e}"))?;
    let evs: Vec<f64> = match args.op.as_str() {
        "Q+" | "Q-" => {
            let r = if args.op == "Q+" { Chirality::Plus } else { Chirality::Minus };
            (0..basis.dim())
                .map(|i| {
                    let s = basis.state(i);
                    params.nu0()
                        * match r {
                            Chirality::Plus => s.mu_plus,
                            Chirality::Minus => s.mu_minus,
                        } as f64
                })
                .collect()
        }
        "C" => {
            // diagonal in the occupation basis
            let poly = c_poly(&basis);
            (0..basis.dim())
                .map(|i| {
                    let mut e = basis.zero();
                    e[i] = Complex64::new(1.0, 0.0);
                    let (v, _) = poly.apply(&basis, &e);
                    v[i].re
                })
                .collect()
        }
        "H2" | "W2+" | "W2-" => {
            if basis.dim() > args.eig_dim_limit {
                bail!(
                    "dimension {} above the eigensolver guard {}; lower the truncation",
                    basis.dim(),
                    args.eig_dim_limit
                );
            }
            let poly = match args.op.as_str() {
                "H2" => h2_poly(&basis),
                "W2+" => w2_poly(Chirality::Plus, &basis),
                _ => w2_poly(Chirality::Minus, &basis),
            };
            eig::eigh(&dense_columns(&poly, &basis))
        }
        other => bail!("unknown operator {other:?} (Q+|Q-|C|H2|W2+|W2-)"),
    };
    // collapse to (eigenvalue, multiplicity) at 1e-10 resolution
    let mut sorted = evs;
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    println!("eigenvalue,multiplicity");
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && (sorted[j] - sorted[i]).abs() < 1e-10 {
            j += 1;
        }
        println!("{:.17e},{}", sorted[i], j - i);
        i = j;
    }
    Ok(())
}

fn cmd_pde(cfg: &Config, args: &PdeArgs) -> Result<()> {
    let mut params = cfg.model()?;
    if let Some(g) = args.g {
        // realize a float g as an integer pair p/q with small denominator
        let (r0, s0) = float_to_rational(g).ok_or_else(|| anyhow!("g must be a positive rational"))?;
        params = ModelParams::new(params.ell, params.delta, r0, s0, params.nu_sign, params.eps)?;
    }
    if let Some(d) = args.delta {
        params = ModelParams::new(params.ell, d, params.r0, params.s0, params.nu_sign, params.eps)?;
    }
    let n_grid = args.n_grid.unwrap_or(cfg.n_grid);
    let dt = args.dt.unwrap_or(cfg.dt);
    let t_end = args.t_end.unwrap_or(cfg.t_end);
    let scheme = match &args.scheme {
        Some(s) => s.parse().map_err(|e: String| anyhow!(e))?,
        None => cfg.scheme,
    };
    let ic_name = args.ic.clone().unwrap_or_else(|| cfg.ic.clone());
    let state = if std::path::Path::new(&ic_name).exists() {
        let text = std::fs::read_to_string(&ic_name)?;
        let mut u = Vec::new();
        let mut v = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')) {
            let mut it = line.split(',');
            let a: f64 = it.next().unwrap_or("").trim().parse().map_err(|_| anyhow!("bad ic row {line:?}"))?;
            let b: f64 = it.next().unwrap_or("0").trim().parse().map_err(|_| anyhow!("bad ic row {line:?}"))?;
            u.push(a);
            v.push(b);
        }
        FieldPair {
            u: PeriodicField::from_samples(params.ell, &u)?,
            v: PeriodicField::from_samples(params.ell, &v)?,
            t: 0.0,
        }
    } else {
        ic_preset(&ic_name, params.ell, n_grid)?
    };
    let steps = (t_end / dt).round().max(1.0) as usize;
    let log_every = (steps / 50).max(1);
    let (final_state, log) = integrate(state, dt, steps, scheme, &params, log_every)?;
    let mut w: Box<dyn Write> = match &args.output {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout()),
    };
    writeln!(w, "t,mass_u,mass_v,momentum,hamiltonian")?;
    for c in &log {
        writeln!(
            w,
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            c.t, c.mass_u, c.mass_v, c.momentum, c.hamiltonian
        )?;
    }
    let last = conserved(&final_state, &params);
    let first = &log[0];
    eprintln!(
        "drift over T={t_end}: mass_u {:.2e}, mass_v {:.2e}, momentum {:.2e}, H {:.2e}",
        (last.mass_u - first.mass_u).abs(),
        (last.mass_v - first.mass_v).abs(),
        (last.momentum - first.momentum).abs(),
        (last.hamiltonian - first.hamiltonian).abs()
    );
    if args.snapshots > 0 {
        let samples_u = final_state.u.samples();
        let samples_v = final_state.v.samples();
        let h = 2.0 * params.ell / n_grid as f64;
        let mut s = String::from("x,u,v\n");
        for j in 0..n_grid {
            s.push_str(&format!(
                "{:.17e},{:.17e},{:.17e}\n",
                -params.ell + j as f64 * h,
                samples_u[j],
                samples_v[j]
            ));
        }
        std::fs::write("final_state.csv", s)?;
        eprintln!("final snapshot written to final_state.csv");
    }
    Ok(())
}

fn float_to_rational(g: f64) -> Option<(i64, i64)> {
    if !(g > 0.0) || !g.is_finite() {
        return None;
    }
    for s0 in 1..=64i64 {
        let r0 = (g * s0 as f64).round();
        if (g - r0 / s0 as f64).abs() < 1e-12 && r0 > 0.0 {
            return Some((r0 as i64, s0));
        }
    }
    None
}

fn cmd_fermion(cfg: &Config, args: &FermionArgs) -> Result<()> {
    // nu0 = 1 sector comparison (r0 = s0 = 1, nu = -1)
    let delta = if args.q == 0.0 { 745.0 } else { -args.q.ln() };
    let params = ModelParams::new(std::f64::consts::PI, delta, 1, 1, -1, cfg.eps)?;
    let kappa = params.kappa();
    let g2 = ncilw_core::params::g_const(&params)?.powi(2);
    let level = args.level;
    let boson_basis = FockBasis::build(TruncationSpec::new(level, level, 2), params)
        .map_err(|e| anyhow!("{e}"))?;
    let w2 = w2_poly(Chirality::Plus, &boson_basis);
    let fb = FermionBasis::build((level + 2).min(16), 2 * level as i64 + 4);
    println!("sector,level_count,boson_eig,fermion_eig,abs_diff");
    for mu in -2i64..=2 {
        // boson side, one-chirality states only
        let mut boson: Vec<f64> = Vec::new();
        for i in 0..boson_basis.dim() {
            let st = boson_basis.state(i);
            if st.mu_minus != 0 || st.mu_plus as i64 != mu {
                continue;
            }
            let half = st.occ.len() / 2;
            if st.occ[half..].iter().any(|&m| m > 0) {
                continue;
            }
            if args.q == 0.0 {
                // diagonal
                let mut e = boson_basis.zero();
                e[i] = Complex64::new(1.0, 0.0);
                let (w, _) = w2.apply(&boson_basis, &e);
                boson.push(inner(&e, &w).re);
            }
        }
        if args.q > 0.0 {
            // dense eigenvalues on the (mu, 0) sector block
            let idx = boson_basis.sector_states_up_to_level((mu as i32, 0), level);
            let idx: Vec<usize> = idx
                .into_iter()
                .filter(|&i| {
                    let st = boson_basis.state(i);
                    let half = st.occ.len() / 2;
                    st.occ[half..].iter().all(|&m| m == 0)
                })
                .collect();
            let cols: Vec<Vec<Complex64>> = idx
                .iter()
                .map(|&j| {
                    let mut e = boson_basis.zero();
                    e[j] = Complex64::new(1.0, 0.0);
                    let (w, _) = w2.apply(&boson_basis, &e);
                    idx.iter().map(|&i| w[i]).collect()
                })
                .collect();
            boson = eig::eigh(&cols);
        }
        boson.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut fermion: Vec<f64> = (0..fb.dim())
            .filter(|&i| fb.charge(i, Chirality::Minus) == 0 && fb.is_sea(i, Chirality::Minus))
            .filter(|&i| fb.charge(i, Chirality::Plus) == mu)
            .map(|i| g2 * fb.wf_eigenvalue(2, Chirality::Plus, i, kappa))
            .collect();
        fermion.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let emax = 2.0 * kappa * ((mu * mu) as f64 / 2.0 + level as f64) * g2.max(1.0) + 1e-9;
        let bl: Vec<f64> = boson.into_iter().filter(|&e| e <= emax).collect();
        let fl: Vec<f64> = fermion.into_iter().filter(|&e| e <= emax).collect();
        for (k, (b, f)) in bl.iter().zip(fl.iter()).enumerate() {
            println!("{mu},{k},{b:.12e},{f:.12e},{:.3e}", (b - f).abs());
        }
    }
    Ok(())
}
