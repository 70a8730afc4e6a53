//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage error, 3 numerical-domain
//! error. CSV output uses 17 significant digits and `#` header lines carrying
//! the full configuration.

use crate::error::{Error, Result};
use crate::flow::{
    alphazero_residual, deviation_system_residual, first_order_deviation, plane_fit_residual, trace_flow,
    validity_domain, zero_order_solution, Sign,
};
use crate::geometry::{
    build_embedding, gamma_consistency, metric_closed, metric_from_basis, ricci_closed, riemann_ricci,
    singularity_locus, EXCLUSION_RADIUS,
};
use crate::jet::c;
use crate::modes::{p_mode_quadrature, residual_table, ModeSet, ModeSetSpec, QUADRATURE_POINTS};
use crate::par;
use crate::starprod::{basis_f, fnfm_closed, star_lattice, star_series, verify_identities, Deformation, TrigPoly};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

/// Trace length and step of the flow tracer. The field has square-root turning
/// points at the domain edges, which is what sets the step.
const FLOW_T_END: f64 = 4.0;
const FLOW_DT: f64 = 2.5e-4;
/// Seed offset from the lower edge of the validity domain.
const SEED_OFFSET: f64 = 0.01;
const BOUNDARY_POINTS: usize = 64;
/// Grid for the geometry checks; the assembled curvature loses digits like
/// `1/sin²x` next to the coordinate poles, so this grid stays fixed.
const GEOMETRY_GRID: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "ncsphere", version, about = "Moyal-deformed 2-sphere toolkit", allow_hyphen_values = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every verification suite and report violations.
    Verify,
    /// Ricci tensor and scalar curvature on a grid over [0, π).
    Curvature,
    /// Flow lines of the zero-order field.
    Flow,
    /// Residual table of the p-mode system for a mode set.
    Modes {
        /// Mode-set JSON file; a built-in sample with `--modes` modes (default 3)
        /// when omitted.
        file: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    /// Deformation as α = tanh h.
    #[arg(long, global = true, conflicts_with = "h", allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Deformation parameter h.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub h: Option<f64>,
    #[arg(long, global = true, default_value_t = 1.0, allow_hyphen_values = true)]
    pub a0: f64,
    #[arg(long, global = true, default_value_t = 20.0, allow_hyphen_values = true)]
    pub b0: f64,
    #[arg(long, global = true, default_value_t = 0.0, allow_hyphen_values = true)]
    pub c0: f64,
    #[arg(long, global = true, default_value_t = 0.0, allow_hyphen_values = true)]
    pub d0: f64,
    /// Highest mode index p.
    #[arg(long, global = true, default_value_t = 4)]
    pub p: usize,
    /// Number of modes; pads a mode set read from a file.
    #[arg(long = "modes", global = true)]
    pub n_modes: Option<usize>,
    #[arg(long, global = true, default_value_t = 200)]
    pub grid: usize,
    /// Threshold overriding every check tolerance.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long = "seed-count", global = true, default_value_t = 8)]
    pub seed_count: usize,
}

/// Resolved configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: String,
    pub alpha: f64,
    /// `None` when `|α| ≥ 1`.
    pub h: Option<f64>,
    pub a0: f64,
    pub b0: f64,
    pub c0: f64,
    pub d0: f64,
    pub p: usize,
    pub n_modes: Option<usize>,
    pub grid: usize,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed_count: usize,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self> {
        let o = &cli.opts;
        let (alpha, h) = match (o.alpha, o.h) {
            (Some(_), Some(_)) => return Err(Error::InvalidParameter("give only one of --alpha and --h".into())),
            (None, Some(h)) => (h.tanh(), Some(h)),
            (a, None) => {
                let a = a.unwrap_or(0.2);
                if !(a.abs() <= 1.0) {
                    return Err(Error::InvalidParameter(format!("alpha = {a} must lie in [-1, 1]")));
                }
                (a, (a.abs() < 1.0).then(|| a.atanh()))
            }
        };
        let (command, default_format) = match cli.command {
            Command::Verify => ("verify", Format::Csv),
            Command::Curvature => ("curvature", Format::Csv),
            Command::Flow => ("flow", Format::Csv),
            Command::Modes { .. } => ("modes", Format::Json),
        };
        if o.grid < 2 {
            return Err(Error::InvalidParameter(format!("grid = {} must be at least 2", o.grid)));
        }
        if o.seed_count == 0 {
            return Err(Error::InvalidParameter("--seed-count must be at least 1".into()));
        }
        Ok(RunConfig {
            command: command.into(),
            alpha,
            h,
            a0: o.a0,
            b0: o.b0,
            c0: o.c0,
            d0: o.d0,
            p: o.p,
            n_modes: o.n_modes,
            grid: o.grid,
            tol: o.tol,
            out: o.out.clone(),
            format: o.format.unwrap_or(default_format),
            seed_count: o.seed_count,
        })
    }

    fn deformation(&self) -> Result<Deformation> {
        self.h
            .map(Deformation::real)
            .ok_or_else(|| Error::InvalidParameter(format!("{} needs |alpha| < 1", self.command)))
    }

    fn header(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# ncsphere {} {}", self.command, env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "# alpha = {}", num(self.alpha));
        let _ = writeln!(s, "# h = {}", self.h.map_or("inf".into(), num));
        for (k, v) in [("a0", self.a0), ("b0", self.b0), ("c0", self.c0), ("d0", self.d0)] {
            let _ = writeln!(s, "# {k} = {}", num(v));
        }
        let _ = writeln!(s, "# p = {}", self.p);
        let _ = writeln!(s, "# modes = {}", self.n_modes.map_or("file".into(), |n| n.to_string()));
        let _ = writeln!(s, "# grid = {}", self.grid);
        let _ = writeln!(s, "# tol = {}", self.tol.map_or("default".into(), num));
        let _ = writeln!(s, "# seed_count = {}", self.seed_count);
        s
    }

    fn config_json(&self) -> Value {
        json!({
            "command": self.command,
            "alpha": self.alpha,
            "h": self.h,
            "a0": self.a0, "b0": self.b0, "c0": self.c0, "d0": self.d0,
            "p": self.p,
            "modes": self.n_modes,
            "grid": self.grid,
            "tol": self.tol,
            "seed_count": self.seed_count,
        })
    }
}

/// Fixed 17-significant-digit formatting.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn cnum(v: C64) -> Value {
    json!([v.re, v.im])
}

fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::InvalidParameter(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::InvalidParameter(format!("stdout: {e}"))),
    }
}

fn sidecar_path(out: &Path, name: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(format!(".{name}.json"));
    PathBuf::from(s)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

/// One verification check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub max_violation: f64,
    pub threshold: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.max_violation <= self.threshold
    }
}

/// Grid strictly inside `(0, π)`.
fn interior_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| PI * i as f64 / (n + 1) as f64).collect()
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

/// Deterministic mode set with `n` modes, used when no file is given.
pub fn sample_mode_spec(n: usize) -> ModeSetSpec {
    let entry = |mu: usize, k: usize, s: usize| {
        let a = 0.3 + 0.1 * mu as f64 - 0.05 * k as f64 + 0.02 * s as f64;
        let b = 0.2 - 0.07 * k as f64 + 0.03 * mu as f64 - 0.01 * s as f64;
        crate::modes::ModeSpec::Trigpoly { terms: vec![(0, a, 0.0), (1, 0.5 * b, -0.25 * a), (-1, 0.5 * b, 0.25 * a)] }
    };
    ModeSetSpec {
        n,
        v0: vec![entry(0, 0, 0), entry(1, 0, 0)],
        vc: (0..2).map(|mu| (1..=n).map(|k| entry(mu, k, 1)).collect()).collect(),
        vs: (0..2).map(|mu| (1..=n).map(|k| entry(mu, k, 2)).collect()).collect(),
    }
}

/// Runs every suite; errors only on numerical-domain failures.
pub fn run_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let d = cfg.deformation()?;
    let (h, alpha) = (d.h.re, cfg.alpha);
    let mut checks = vec![];
    let mut add = |name: &str, v: f64, default: f64| {
        checks.push(Check { name: name.into(), max_violation: v, threshold: cfg.tol.unwrap_or(default) });
    };
    let xs = interior_grid(cfg.grid);
    let samples: Vec<(f64, f64)> = xs.iter().take(10).map(|&x| (x, 2.0 * x + 0.3)).collect();

    let rep = verify_identities(&d, &samples);
    add("star identities", rep.max(), 1e-10);

    let mut closed = 0.0f64;
    for n in 1..=4 {
        for m in 1..=4 {
            let lat = star_lattice(&basis_f(n)?, &basis_f(m)?, &d);
            closed = closed.max((&lat - &fnfm_closed(n, m, h)?).norm());
        }
    }
    add("basis products closed form", closed, 1e-13);

    let f = &basis_f(1)? + &TrigPoly::cos_x(2);
    let g = &basis_f(4)? + &TrigPoly::sin_y(1);
    add("series order 25", (&star_series(&f, &g, &d, 25) - &star_lattice(&f, &g, &d)).norm(), 1e-10);

    let e = build_embedding(&d)?;
    let basis = e.tangent_basis();
    let one = TrigPoly::constant(c(1.0));
    let ll = &e.dot(&e.lambda, &e.lambda) - &one;
    let l1 = e.dot(&e.lambda, &basis[0]);
    let l2 = &e.dot(&e.lambda, &basis[1]) + &TrigPoly::sin_x(2).scale(c(alpha));
    let emb = max_of(samples.iter().flat_map(|&(x, y)| {
        [ll.eval_real(x, y).norm(), l1.eval_real(x, y).norm(), l2.eval_real(x, y).norm()]
    }));
    add("embedding identities", emb, 1e-13);

    let gxs = interior_grid(GEOMETRY_GRID);
    let metric = max_of(gxs.iter().map(|&x| (metric_from_basis(&e, x, 0.7) - metric_closed(x, alpha)).abs().max()));
    add("metric from basis", metric, 1e-10);

    let locus = singularity_locus(alpha);
    let safe: Vec<f64> = gxs.iter().copied().filter(|x| locus.iter().all(|s| (x - s).abs() > 1e-3)).collect();
    let gam = par::map(&safe, |&x| gamma_consistency(x, 1.1, &d).map(|r| r.max()));
    add("connection consistency", max_of(gam.into_iter().collect::<Result<Vec<_>>>()?), 1e-10);

    let ric = par::map(&safe, |&x| -> Result<f64> {
        let (ra, sa) = riemann_ricci(x, alpha)?;
        let (rc, sc) = ricci_closed(x, alpha)?;
        let scale = 1.0 + rc.abs().max();
        Ok(((ra - rc).abs().max() / scale).max((sa - sc).abs() / (1.0 + sc.abs())))
    });
    add("ricci assembly", max_of(ric.into_iter().collect::<Result<Vec<_>>>()?), 1e-10);

    let (lo, hi) = validity_domain(cfg.a0, cfg.b0)?;
    let zf = zero_order_solution(cfg.a0, cfg.b0, (Sign::Plus, Sign::Plus))?;
    let flow_xs: Vec<f64> = (1..=cfg.grid).map(|i| lo + (hi - lo) * i as f64 / (cfg.grid + 1) as f64).collect();
    let zero = max_of(flow_xs.iter().map(|&x| {
        let (r1, r2) = alphazero_residual(&zf, x);
        r1.norm().max(r2.norm())
    }));
    add("zero-order flow", zero, 1e-12);

    let dev = first_order_deviation(cfg.a0, cfg.b0, cfg.c0, cfg.d0)?;
    let first = max_of(flow_xs.iter().filter(|&&x| (x - PI / 2.0).abs() > 1e-3 && !dev.near_branch_point(x)).map(|&x| {
        let (r1, r2) = deviation_system_residual(&dev, x);
        r1.norm().max(r2.norm())
    }));
    add("first-order deviation", first, 1e-8);

    let ms = ModeSet::from_spec(&sample_mode_spec(3))?;
    let mode_xs = interior_grid(5);
    let ps: Vec<usize> = (1..=cfg.p.max(1)).collect();
    let rows = residual_table(&ms, &d, &ps, &mode_xs)?;
    let quad = par::map(&rows, |r| p_mode_quadrature(&ms, &d, r.x, r.p, QUADRATURE_POINTS));
    let mut mode_err = 0.0f64;
    for (r, q) in rows.iter().zip(quad) {
        let q = q?;
        for j in 0..6 {
            mode_err = mode_err.max((r.residuals[j] - q[j]).norm() / (1.0 + q[j].norm()));
        }
    }
    add("mode system vs quadrature", mode_err, 1e-8);
    Ok(checks)
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<i32> {
    let checks = run_checks(cfg)?;
    let ok = checks.iter().all(Check::passed);
    let text = match cfg.format {
        Format::Csv => {
            let mut s = cfg.header();
            s.push_str("check,max_violation,threshold,pass\n");
            for c in &checks {
                let _ = writeln!(s, "{},{},{},{}", c.name, num(c.max_violation), num(c.threshold), c.passed());
            }
            s
        }
        Format::Json => pretty(&json!({
            "config": cfg.config_json(),
            "passed": ok,
            "checks": checks.iter().map(|c| json!({
                "name": c.name, "max_violation": c.max_violation, "threshold": c.threshold, "pass": c.passed(),
            })).collect::<Vec<_>>(),
        })),
    };
    emit(cfg, &text)?;
    for c in checks.iter().filter(|c| !c.passed()) {
        eprintln!("FAIL {}: {:e} > {:e}", c.name, c.max_violation, c.threshold);
    }
    Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

/// `(x, R11, R12, R21, R22, R)` on `[0, π)`, skipping singular points.
pub fn curvature_rows(alpha: f64, grid: usize) -> Vec<[f64; 6]> {
    let locus = singularity_locus(alpha);
    let xs: Vec<f64> = par::linspace_open(0.0, PI, grid)
        .into_iter()
        .filter(|x| locus.iter().all(|s| (x - s).abs() > EXCLUSION_RADIUS))
        .collect();
    par::map(&xs, |&x| ricci_closed(x, alpha).ok().map(|(r, s)| [x, r[(0, 0)], r[(0, 1)], r[(1, 0)], r[(1, 1)], s]))
        .into_iter()
        .flatten()
        .collect()
}

pub fn cmd_curvature(cfg: &RunConfig) -> Result<i32> {
    let rows = curvature_rows(cfg.alpha, cfg.grid);
    let locus = singularity_locus(cfg.alpha);
    let side = json!({ "alpha": cfg.alpha, "singularities": locus });
    let text = match cfg.format {
        Format::Csv => {
            let mut s = cfg.header();
            let _ = writeln!(s, "# singularities = [{}]", locus.iter().map(|v| num(*v)).collect::<Vec<_>>().join(" "));
            s.push_str("x,R11,R12,R21,R22,R\n");
            for r in &rows {
                let _ = writeln!(s, "{}", r.iter().map(|v| num(*v)).collect::<Vec<_>>().join(","));
            }
            s
        }
        Format::Json => pretty(&json!({
            "config": cfg.config_json(),
            "singularities": locus,
            "rows": rows.iter().map(|r| json!({
                "x": r[0], "R11": r[1], "R12": r[2], "R21": r[3], "R22": r[4], "R": r[5],
            })).collect::<Vec<_>>(),
        })),
    };
    emit(cfg, &text)?;
    if let Some(out) = &cfg.out {
        let p = sidecar_path(out, "singularities");
        std::fs::write(&p, pretty(&side)).map_err(|e| Error::InvalidParameter(format!("{}: {e}", p.display())))?;
    }
    Ok(EXIT_OK)
}

/// One traced flow line.
#[derive(Debug, Clone)]
pub struct FlowLine {
    pub seed: usize,
    pub rows: Vec<[f64; 6]>,
    pub plane_residual: f64,
    pub exit: Option<(f64, f64)>,
}

/// Traces `seed_count` lines of the zero-order field from `x_min + 0.01`.
pub fn flow_lines(a0: f64, b0: f64, seed_count: usize) -> Result<(f64, f64, Vec<FlowLine>)> {
    let (lo, hi) = validity_domain(a0, b0)?;
    let f = zero_order_solution(a0, b0, (Sign::Plus, Sign::Plus))?;
    let seeds: Vec<usize> = (0..seed_count).collect();
    let lines = par::map(&seeds, |&k| -> Result<FlowLine> {
        let y0 = 2.0 * PI * k as f64 / seed_count as f64;
        let tr = trace_flow(&f, (lo + SEED_OFFSET, y0), FLOW_T_END, FLOW_DT)?;
        let pts: Vec<[f64; 3]> = tr.points.iter().map(|p| p.pos).collect();
        Ok(FlowLine {
            seed: k,
            rows: tr.points.iter().map(|p| [p.t, p.x, p.y, p.pos[0], p.pos[1], p.pos[2]]).collect(),
            plane_residual: plane_fit_residual(&pts),
            exit: tr.exit,
        })
    });
    Ok((lo, hi, lines.into_iter().collect::<Result<Vec<_>>>()?))
}

pub fn cmd_flow(cfg: &RunConfig) -> Result<i32> {
    let (lo, hi, lines) = flow_lines(cfg.a0, cfg.b0, cfg.seed_count)?;
    let boundary = |x: f64| -> Vec<[f64; 6]> {
        (0..BOUNDARY_POINTS)
            .map(|j| {
                let y = 2.0 * PI * j as f64 / BOUNDARY_POINTS as f64;
                [f64::NAN, x, y, x.sin() * y.cos(), x.sin() * y.sin(), x.cos()]
            })
            .collect()
    };
    let text = match cfg.format {
        Format::Csv => {
            let mut s = cfg.header();
            let _ = writeln!(s, "# field = zero-order solution (+,+)");
            let _ = writeln!(s, "# domain = [{}, {}]", num(lo), num(hi));
            let _ = writeln!(s, "# seeds at x = {}; t_end = {}; dt = {}", num(lo + SEED_OFFSET), num(FLOW_T_END), num(FLOW_DT));
            for l in &lines {
                let _ = writeln!(s, "# seed{} plane_residual = {}", l.seed, num(l.plane_residual));
            }
            s.push_str("trace,t,x,y,X,Y,Z\n");
            let mut put = |name: &str, rows: &[[f64; 6]]| {
                for r in rows {
                    let _ = writeln!(s, "{name},{}", r.iter().map(|v| num(*v)).collect::<Vec<_>>().join(","));
                }
            };
            for l in &lines {
                put(&format!("seed{}", l.seed), &l.rows);
            }
            put("boundary_min", &boundary(lo));
            put("boundary_max", &boundary(hi));
            s
        }
        Format::Json => pretty(&json!({
            "config": cfg.config_json(),
            "domain": [lo, hi],
            "traces": lines.iter().map(|l| json!({
                "seed": l.seed,
                "plane_residual": l.plane_residual,
                "exit": l.exit.map(|(x, y)| [x, y]),
                "points": l.rows,
            })).collect::<Vec<_>>(),
        })),
    };
    emit(cfg, &text)?;
    Ok(EXIT_OK)
}

pub fn cmd_modes(cfg: &RunConfig, file: Option<&Path>) -> Result<i32> {
    let d = cfg.deformation()?;
    let ms = match file {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::InvalidParameter(format!("{}: {e}", p.display())))?;
            let ms = ModeSet::from_json(&text)?;
            match cfg.n_modes {
                Some(n) => ms.padded(n)?,
                None => ms,
            }
        }
        None => ModeSet::from_spec(&sample_mode_spec(cfg.n_modes.unwrap_or(3)))?,
    };
    if cfg.p == 0 {
        return Err(Error::InvalidParameter("--p must be at least 1".into()));
    }
    let ps: Vec<usize> = (1..=cfg.p).collect();
    let xs = interior_grid(cfg.grid);
    let rows = residual_table(&ms, &d, &ps, &xs)?;
    let tol = cfg.tol.unwrap_or(1e-8);
    let text = match cfg.format {
        Format::Json => pretty(&json!({
            "config": cfg.config_json(),
            "N": ms.n(),
            "constraint_tol": tol,
            "rows": rows.iter().map(|r| json!({
                "p": r.p,
                "x": r.x,
                "residuals": r.residuals.iter().map(|v| cnum(*v)).collect::<Vec<_>>(),
                "abs": r.residuals.iter().map(|v| v.norm()).collect::<Vec<_>>(),
                "max_abs": r.max_abs(),
                "constraints": [cnum(r.constraints.0), cnum(r.constraints.1)],
                "constraint_violated": r.constraint_violated(tol),
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut s = cfg.header();
            let _ = writeln!(s, "# N = {}", ms.n());
            s.push_str("p,x,eq1,eq2,eq3,eq4,eq5,eq6,c1,c2,constraint_violated\n");
            for r in &rows {
                let abs: Vec<String> = r.residuals.iter().map(|v| num(v.norm())).collect();
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    r.p,
                    num(r.x),
                    abs.join(","),
                    num(r.constraints.0.norm()),
                    num(r.constraints.1.norm()),
                    r.constraint_violated(tol)
                );
            }
            s
        }
    };
    emit(cfg, &text)?;
    Ok(EXIT_OK)
}

fn exit_for(e: &Error) -> i32 {
    if e.is_numerical_domain() {
        EXIT_DOMAIN
    } else {
        EXIT_USAGE
    }
}

/// Parses `args` and runs the selected command, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    par::init_threads_from_env();
    let result = RunConfig::from_cli(&cli).and_then(|cfg| match &cli.command {
        Command::Verify => cmd_verify(&cfg),
        Command::Curvature => cmd_curvature(&cfg),
        Command::Flow => cmd_flow(&cfg),
        Command::Modes { file } => cmd_modes(&cfg, file.as_deref()),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}
