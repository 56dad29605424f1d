//! The `matdyn` command line: argument schema, dispatch and table output.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use matdyn::acceptance;
use matdyn::algebra::{fmt_real, parse_reals};
use matdyn::basin::{basin_classify_phi_id, classify_lambda_set, empirical_basin, BOUNDARY_TOL, RATIO_TOL};
use matdyn::maps::{orbit, MapSpec, Pair, PlanarMapSpec, Verdict};
use matdyn::periodic::{periodic_phi_diag, periodic_phi_id, periodic_phi_jordan, FreeEntry};
use matdyn::quat::{delta_theta, phi_theta, phi_theta_fixed_points, phi_theta_two_periodic, t_n_lambda, CatalogPoint};
use matdyn::raster::{grid_to_csv, grid_to_ppm, iterate_segment, render, ControlTriple, Domain};
use matdyn::sample::{self, DEFAULT_SEED};
use matdyn::{c, Mat2, C64};

#[derive(Parser, Debug)]
#[command(name = "matdyn", version, about = "Iterate rational maps on 2x2 complex matrices")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Iterate a matrix map or a planar map from one seed.
    Orbit(OrbitArgs),
    /// List periodic points from the closed-form enumerations.
    Periodic(PeriodicArgs),
    /// Classify matrices against the basin of the zero matrix.
    Basin(BasinArgs),
    /// Exit-time raster of a planar map.
    Render(RenderArgs),
    /// Iterate a chord of the unit disk under phi-theta.
    Segment(SegmentArgs),
    /// Catalogues and products for the quaternionic restriction.
    Quat(QuatArgs),
    /// Run the acceptance suite.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Output format (csv, ppm, json) or a file path.
    #[arg(long)]
    out: Option<String>,
    /// Output format when --out is a path.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Ppm,
    Json,
}

#[derive(Args, Debug)]
struct OrbitArgs {
    /// Matrix map, e.g. phi-id, phi-diag:2,0, zeta:0,0.5.
    #[arg(long, conflicts_with = "planar", required_unless_present = "planar")]
    map: Option<String>,
    /// Planar map, e.g. sq-phi-id, det0:1, phi-theta:0.5.
    #[arg(long)]
    planar: Option<String>,
    /// Matrix seed as 8 reals: x_re,x_im,y_re,y_im,z_re,z_im,t_re,t_im.
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,
    /// Planar seed as 2 reals (real plane) or 4 reals (complex pair).
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    #[arg(long, default_value_t = 10)]
    steps: usize,
    #[arg(long, default_value_t = 1e12)]
    escape_r: f64,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct PeriodicArgs {
    /// phi-id, phi-diag:re,im or phi-jordan.
    #[arg(long)]
    map: String,
    /// Period bound: points of period dividing n.
    #[arg(long)]
    n: u32,
    /// Resonance tolerance for phi-diag.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct BasinArgs {
    /// Matrix as 8 reals; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    m: Vec<String>,
    /// Number of random matrices to add.
    #[arg(long, default_value_t = 0)]
    random: usize,
    /// Entry radius for random matrices.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Map for the empirical column.
    #[arg(long, default_value = "phi-id")]
    map: String,
    #[arg(long, default_value_t = 200)]
    kappa: u32,
    #[arg(long, default_value_t = 1e6)]
    escape_r: f64,
    #[arg(long, default_value_t = 1e-12)]
    eps: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DomainArg {
    Square,
    Disk,
}

#[derive(Args, Debug)]
struct RenderArgs {
    #[arg(long)]
    planar: String,
    #[arg(long)]
    kappa: u32,
    #[arg(long)]
    escape_r: f64,
    /// Window half-width.
    #[arg(long)]
    window: f64,
    /// Width in pixels (and height unless --py is given).
    #[arg(long)]
    px: usize,
    #[arg(long)]
    py: Option<usize>,
    /// Defaults to disk for phi-theta and square otherwise.
    #[arg(long, value_enum)]
    domain: Option<DomainArg>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct SegmentArgs {
    #[arg(long, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long, allow_hyphen_values = true)]
    x1: f64,
    #[arg(long)]
    iters: usize,
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct QuatArgs {
    #[command(subcommand)]
    op: QuatOp,
}

#[derive(Subcommand, Debug)]
enum QuatOp {
    /// Fixed points of phi-theta.
    Fixed {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// The seven-point period-two catalogue of phi-theta.
    TwoPeriodic {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// The degeneracy polynomial at theta.
    Delta {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Products T_k(v) for k = 0..=n.
    Tn {
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        /// v as re,im.
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args, Debug)]
struct SelftestArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Run only these criteria (1-13); repeatable.
    #[arg(long)]
    only: Vec<u8>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<matdyn::Error> for Failure {
    fn from(e: matdyn::Error) -> Self {
        match e {
            matdyn::Error::Parse(m) => Failure::Usage(m),
            e => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

enum Cell {
    Num(f64),
    Int(i64),
    Str(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) if v.is_finite() => fmt_real(*v),
            Cell::Num(v) if v.is_nan() => "nan".into(),
            Cell::Num(v) => if *v > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Int(i) => i.to_string(),
            Cell::Str(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Num(v) if v.is_finite() => fmt_real(*v),
            Cell::Num(_) => "null".into(),
            Cell::Int(i) => i.to_string(),
            Cell::Str(s) => serde_json::Value::String(s.clone()).to_string(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    fn to_json(&self) -> String {
        let mut s = String::from("[\n");
        for (i, row) in self.rows.iter().enumerate() {
            let fields: Vec<String> = self
                .header
                .iter()
                .zip(row)
                .map(|(h, c)| format!("{}:{}", serde_json::Value::String(h.clone()), c.json()))
                .collect();
            s.push_str(&format!("  {{{}}}", fields.join(",")));
            s.push_str(if i + 1 < self.rows.len() { ",\n" } else { "\n" });
        }
        s.push_str("]\n");
        s
    }
}

fn mat_header(prefix: &[&str]) -> Vec<String> {
    let mut h: Vec<String> = prefix.iter().map(|s| s.to_string()).collect();
    for e in ["x", "y", "z", "t"] {
        h.push(format!("{e}_re"));
        h.push(format!("{e}_im"));
    }
    h
}

fn mat_cells(m: &Mat2) -> Vec<Cell> {
    m.to_reals().iter().map(|&v| Cell::Num(v)).collect()
}

enum Dest {
    Stdout,
    File(PathBuf),
}

/// Resolves `--out`/`--format` into a format and a destination.
fn resolve(o: &OutArgs, default: Format, allowed: &[Format]) -> CliResult<(Format, Dest)> {
    let (fmt, dest) = match o.out.as_deref() {
        None => (o.format.unwrap_or(default), Dest::Stdout),
        Some(tag) if Format::from_str(tag, true).is_ok() => {
            let f = Format::from_str(tag, true).map_err(Failure::Usage)?;
            if o.format.is_some_and(|g| g != f) {
                return Err(Failure::Usage("--out and --format disagree".into()));
            }
            (f, Dest::Stdout)
        }
        Some(path) => {
            let p = PathBuf::from(path);
            let by_ext = p
                .extension()
                .and_then(|e| e.to_str())
                .and_then(|e| Format::from_str(e, true).ok());
            (o.format.or(by_ext).unwrap_or(default), Dest::File(p))
        }
    };
    if !allowed.contains(&fmt) {
        return Err(Failure::Usage(format!("format {fmt:?} is not available here")));
    }
    Ok((fmt, dest))
}

fn emit(out: &mut dyn Write, dest: Dest, bytes: &[u8]) -> CliResult<()> {
    let r = match dest {
        Dest::Stdout => out.write_all(bytes).and_then(|_| out.flush()),
        Dest::File(p) => std::fs::write(p, bytes),
    };
    match r {
        // A closed pipe (e.g. `| head`) is not an error for the caller.
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn emit_table(out: &mut dyn Write, o: &OutArgs, t: &Table) -> CliResult<()> {
    let (fmt, dest) = resolve(o, Format::Csv, &[Format::Csv, Format::Json])?;
    let text = if fmt == Format::Json { t.to_json() } else { t.to_csv() };
    emit(out, dest, text.as_bytes())
}

fn parse_mat(s: &str) -> CliResult<Mat2> {
    s.parse::<Mat2>().map_err(|e| Failure::Usage(format!("--m: {e}")))
}

fn parse_pair(s: &str) -> CliResult<Pair> {
    let v = parse_reals(s).map_err(|e| Failure::Usage(format!("--p: {e}")))?;
    match v.as_slice() {
        [a, b] => Ok((c(*a, 0.0), c(*b, 0.0))),
        [a, b, d, e] => Ok((c(*a, *b), c(*d, *e))),
        _ => Err(Failure::Usage("--p needs 2 or 4 reals".into())),
    }
}

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::Escaped(k) => format!("escaped at step {k}"),
        Verdict::Converged(k) => format!("converged at step {k}"),
        Verdict::Completed => "completed".into(),
        Verdict::IndeterminateHit(k) => format!("indeterminate at step {k}"),
    }
}

fn cmd_orbit(a: &OrbitArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    if let Some(spec) = &a.map {
        let map: MapSpec = spec.parse()?;
        let seed = parse_mat(a.m.as_deref().ok_or_else(|| Failure::Usage("--map needs --m".into()))?)?;
        let rec = orbit(&map, seed, a.steps, a.escape_r, a.eps)?;
        let mut t = Table {
            header: mat_header(&["step"]),
            rows: Vec::new(),
        };
        for (k, p) in rec.points.iter().enumerate() {
            let mut row = vec![Cell::Int(k as i64)];
            row.extend(mat_cells(p));
            t.rows.push(row);
        }
        writeln!(err, "verdict: {}", verdict_text(&rec.verdict))?;
        emit_table(out, &a.out, &t)
    } else {
        let spec = a.planar.as_deref().unwrap_or_default();
        let map: PlanarMapSpec = spec.parse()?;
        let seed = parse_pair(a.p.as_deref().ok_or_else(|| Failure::Usage("--planar needs --p".into()))?)?;
        let rec = orbit(&map, seed, a.steps, a.escape_r, a.eps)?;
        let mut t = Table::new(&["step", "u_re", "u_im", "v_re", "v_im"]);
        for (k, (u, v)) in rec.points.iter().enumerate() {
            t.rows.push(vec![
                Cell::Int(k as i64),
                Cell::Num(u.re),
                Cell::Num(u.im),
                Cell::Num(v.re),
                Cell::Num(v.im),
            ]);
        }
        writeln!(err, "verdict: {}", verdict_text(&rec.verdict))?;
        emit_table(out, &a.out, &t)
    }
}

fn cmd_periodic(a: &PeriodicArgs, out: &mut dyn Write) -> CliResult<()> {
    let map: MapSpec = a.map.parse()?;
    let pts = match map {
        MapSpec::PhiId => periodic_phi_id(a.n)?,
        MapSpec::PhiDiag(l) => periodic_phi_diag(l, a.n, a.tol)?,
        MapSpec::PhiJordan => periodic_phi_jordan(a.n)?,
        _ => return Err(Failure::Usage("periodic supports phi-id, phi-diag and phi-jordan".into())),
    };
    let mut t = Table {
        header: mat_header(&["period", "family", "free"]),
        rows: Vec::new(),
    };
    t.header.push("residual".into());
    for p in &pts {
        let free = match p.free {
            FreeEntry::None => "none",
            FreeEntry::Y => "y",
            FreeEntry::Z => "z",
        };
        let mut row = vec![Cell::Int(p.period as i64), Cell::Str(p.family.as_str().into()), Cell::Str(free.into())];
        row.extend(mat_cells(&p.point));
        row.push(Cell::Num(p.residual));
        t.rows.push(row);
    }
    emit_table(out, &a.out, &t)
}

fn cmd_basin(a: &BasinArgs, out: &mut dyn Write) -> CliResult<()> {
    let map: MapSpec = a.map.parse()?;
    let mut mats = a.m.iter().map(|s| parse_mat(s)).collect::<CliResult<Vec<_>>>()?;
    let mut r = sample::rng(a.seed);
    mats.extend((0..a.random).map(|_| sample::mat(&mut r, a.radius)));
    if mats.is_empty() {
        return Err(Failure::Usage("basin needs --m or --random".into()));
    }
    let mut t = Table {
        header: mat_header(&["index"]),
        rows: Vec::new(),
    };
    t.header.extend(["basin", "max_eig_modulus", "min_eig_modulus", "lambda_set", "empirical"].map(String::from));
    for (i, m) in mats.iter().enumerate() {
        let v = basin_classify_phi_id(m, BOUNDARY_TOL);
        let emp = match empirical_basin(&map, m, a.kappa, a.escape_r, a.eps) {
            Ok(tag) => tag.as_str().to_string(),
            Err(_) => "indeterminate".into(),
        };
        let mut row = vec![Cell::Int(i as i64)];
        row.extend(mat_cells(m));
        row.extend([
            Cell::Str(v.tag.as_str().into()),
            Cell::Num(v.max_eig_modulus),
            Cell::Num(v.min_eig_modulus),
            Cell::Str(classify_lambda_set(m, RATIO_TOL).as_str().into()),
            Cell::Str(emp),
        ]);
        t.rows.push(row);
    }
    emit_table(out, &a.out, &t)
}

fn cmd_render(a: &RenderArgs, out: &mut dyn Write) -> CliResult<()> {
    let map: PlanarMapSpec = a.planar.parse()?;
    let control = ControlTriple::new(a.escape_r, a.window, a.kappa).map_err(|e| Failure::Usage(e.to_string()))?;
    let domain = match a.domain {
        Some(DomainArg::Square) => Domain::Square,
        Some(DomainArg::Disk) => Domain::UnitDisk,
        None if matches!(map, PlanarMapSpec::PhiTheta(_)) => Domain::UnitDisk,
        None => Domain::Square,
    };
    let (fmt, dest) = resolve(&a.out, Format::Ppm, &[Format::Ppm, Format::Csv])?;
    let grid = render(&map, &control, a.px, a.py.unwrap_or(a.px), domain).map_err(|e| match e {
        matdyn::Error::InvalidParameter(m) => Failure::Usage(m),
        e => Failure::Runtime(e.to_string()),
    })?;
    let bytes = match fmt {
        Format::Ppm => grid_to_ppm(&grid, a.kappa),
        _ => grid_to_csv(&grid).into_bytes(),
    };
    emit(out, dest, &bytes)
}

fn cmd_segment(a: &SegmentArgs, out: &mut dyn Write) -> CliResult<()> {
    let lines = iterate_segment(a.theta, a.x1, a.iters, a.eps).map_err(|e| match e {
        matdyn::Error::InvalidParameter(m) => Failure::Usage(m),
        e => Failure::Runtime(e.to_string()),
    })?;
    let mut t = Table::new(&["polyline", "index", "x1", "x2"]);
    for (k, line) in lines.iter().enumerate() {
        for (i, p) in line.iter().enumerate() {
            t.rows.push(vec![Cell::Int(k as i64), Cell::Int(i as i64), Cell::Num(p.0), Cell::Num(p.1)]);
        }
    }
    emit_table(out, &a.out, &t)
}

fn catalog_table(th: f64, pts: &[CatalogPoint]) -> Table {
    let mut t = Table::new(&["tag", "x1", "x2", "in_unit_disk", "fixed"]);
    for p in pts {
        let img = phi_theta(th, p.p);
        let fixed = (img.0 - p.p.0).hypot(img.1 - p.p.1) <= 1e-9;
        t.rows.push(vec![
            Cell::Str(p.tag.as_str().into()),
            Cell::Num(p.p.0),
            Cell::Num(p.p.1),
            Cell::Bool(p.in_unit_disk),
            Cell::Bool(fixed),
        ]);
    }
    t
}

fn cmd_quat(a: &QuatArgs, out: &mut dyn Write) -> CliResult<()> {
    match &a.op {
        QuatOp::Fixed { theta, out: o } => {
            let pts = phi_theta_fixed_points(*theta)?;
            emit_table(out, o, &catalog_table(*theta, &pts))
        }
        QuatOp::TwoPeriodic { theta, out: o } => {
            let cat = phi_theta_two_periodic(*theta)?;
            emit_table(out, o, &catalog_table(*theta, &cat.points))
        }
        QuatOp::Delta { theta, out: o } => {
            let mut t = Table::new(&["theta", "delta"]);
            t.rows.push(vec![Cell::Num(*theta), Cell::Num(delta_theta(*theta))]);
            emit_table(out, o, &t)
        }
        QuatOp::Tn { lambda, v, n, out: o } => {
            let r = parse_reals(v).map_err(|e| Failure::Usage(format!("--v: {e}")))?;
            let [re, im] = r[..] else {
                return Err(Failure::Usage("--v needs re,im".into()));
            };
            let v: C64 = c(re, im);
            let mut t = Table::new(&["n", "re", "im", "modulus"]);
            for k in 0..=*n {
                let p = t_n_lambda(*lambda, v, k);
                t.rows.push(vec![Cell::Int(k as i64), Cell::Num(p.re), Cell::Num(p.im), Cell::Num(p.norm())]);
            }
            emit_table(out, o, &t)
        }
    }
}

fn cmd_selftest(a: &SelftestArgs, out: &mut dyn Write) -> CliResult<bool> {
    let ids: Vec<u8> = if a.only.is_empty() { (1..=acceptance::COUNT).collect() } else { a.only.clone() };
    let mut all = true;
    for id in ids {
        let r = acceptance::run(id, a.seed).ok_or_else(|| Failure::Usage(format!("no criterion {id}")))?;
        writeln!(out, "{r}")?;
        all &= r.passed;
    }
    Ok(all)
}

fn subcommand_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Orbit(_) => "orbit",
        Cmd::Periodic(_) => "periodic",
        Cmd::Basin(_) => "basin",
        Cmd::Render(_) => "render",
        Cmd::Segment(_) => "segment",
        Cmd::Quat(_) => "quat",
        Cmd::Selftest(_) => "selftest",
    }
}

/// Runs the CLI with explicit output streams and returns the exit code:
/// 0 on success, 2 on usage errors, 1 on runtime errors.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let result = match &cli.cmd {
        Cmd::Orbit(a) => cmd_orbit(a, out, err),
        Cmd::Periodic(a) => cmd_periodic(a, out),
        Cmd::Basin(a) => cmd_basin(a, out),
        Cmd::Render(a) => cmd_render(a, out),
        Cmd::Segment(a) => cmd_segment(a, out),
        Cmd::Quat(a) => cmd_quat(a, out),
        Cmd::Selftest(a) => match cmd_selftest(a, out) {
            Ok(true) => Ok(()),
            Ok(false) => Err(Failure::Runtime("acceptance criteria failed".into())),
            Err(e) => Err(e),
        },
    };
    let _ = out.flush();
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}\n");
            let mut root = Cli::command();
            root.build();
            if let Some(sub) = root.find_subcommand_mut(subcommand_name(&cli.cmd)) {
                let _ = write!(err, "{}", sub.render_help());
            }
            2
        }
        Err(Failure::Runtime(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
    }
}

/// Runs the CLI on the process streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let mut err = stderr.lock();
    run_with(argv, &mut out, &mut err)
}
