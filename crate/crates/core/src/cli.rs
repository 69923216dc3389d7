//! Command-line front end. [`run`] parses arguments, runs one subcommand and
//! returns the process exit code.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::analysis::{find_extrema, n2_envelope, Branch, ExtremumKind};
use crate::bloch::{bloch_state, localization_metrics, QSign};
use crate::condition::big_b;
use crate::error::Error;
use crate::lattice::{make_pt_cell, CellSpec, Coupling, Epsilon, UnitCell};
use crate::roots::check_range;
use crate::spectra::{
    allowed_bands, band_table, dispersion, dos, integrated_states, nearest_band, BandInterval,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_IO: i32 = 4;

const QUADRATURE_NODES: usize = 4000;

#[derive(Debug, Parser)]
#[command(
    name = "ptcomb",
    version,
    about = "Band structure of PT-symmetric delta-comb lattices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Band condition B(eps) over an energy grid.
    Condition {
        #[command(flatten)]
        cell: CellArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Append the C+ and C- envelope columns (two-site cells only).
        #[arg(long)]
        envelopes: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Allowed band intervals.
    Edges {
        #[command(flatten)]
        cell: CellArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Energies against N Q a over the irreducible zone.
    Dispersion {
        #[command(flatten)]
        cell: CellArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 64)]
        qsamples: usize,
        /// Solve at this single N Q a in [0, pi] instead of the whole zone.
        #[arg(long)]
        nqa: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Density of states on the grid, at one energy, or integrated per band.
    Dos {
        #[command(flatten)]
        cell: CellArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, conflicts_with = "integrate")]
        eps: Option<f64>,
        /// States held by each complete band in the range.
        #[arg(long)]
        integrate: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Bloch state density over the cell at one energy.
    Wavefunction {
        #[command(flatten)]
        cell: CellArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value = "plus")]
        qsign: SignArg,
        #[arg(long, default_value_t = 401)]
        samples: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// B with its C+ and C- envelopes for a two-site cell.
    Envelope {
        #[command(flatten)]
        cell: CellArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Maxima and minima of B.
    Extrema {
        #[command(flatten)]
        cell: CellArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Label each extremum by its position within a repeating piece.
        #[arg(long)]
        grouping: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Band condition frames over linear ranges of imaginary parts.
    Sweep {
        #[command(flatten)]
        cell: CellArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// `sJ=start:stop:frames`; repeat to move several parts together.
        #[arg(long = "sweep", required = true)]
        sweeps: Vec<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).multiple(false)))]
struct CellArgs {
    /// JSON file with `couplings` or `half` (+ optional `middle`).
    #[arg(long, group = "source")]
    cell: Option<PathBuf>,
    /// Full cell as `r1,s1,r2,s2,...`.
    #[arg(long, group = "source", allow_hyphen_values = true)]
    couplings: Option<String>,
    /// First half of a PT cell as `r1,s1,...`; the rest is mirrored.
    #[arg(long, group = "source", allow_hyphen_values = true)]
    half: Option<String>,
    /// Real coupling of the middle site of an odd PT cell.
    #[arg(long, requires = "half", allow_hyphen_values = true)]
    middle: Option<f64>,
    #[arg(long)]
    allow_non_pt: bool,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long, default_value_t = 0.001)]
    emin: f64,
    #[arg(long, default_value_t = 30.0)]
    emax: f64,
    #[arg(long, default_value_t = 4000)]
    esamples: usize,
    /// Prepend eps = 0 to the grid.
    #[arg(long)]
    include_zero: bool,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SignArg {
    Plus,
    Minus,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::OutOfBand { .. } | Error::BandEdge { .. } | Error::EnvelopeDomain { .. } => {
                EXIT_DOMAIN
            }
            Error::Io(_) | Error::Json(_) => EXIT_IO,
            _ => EXIT_CONFIG,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Runs the tool on `args` (including the program name) and returns the exit
/// code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("ptcomb: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command) -> Outcome<()> {
    match command {
        Command::Condition {
            cell,
            grid,
            envelopes,
            output,
        } => {
            let cell = load_cell(&cell)?;
            if envelopes {
                two_site_parts(&cell)?;
            }
            let table = condition_table(&cell, &grid, envelopes)?;
            emit(&table, &output)
        }
        Command::Edges { cell, grid, output } => {
            let cell = load_pt_cell(&cell)?;
            check_range(grid.emin, grid.emax)?;
            let bands = allowed_bands(&cell, grid.emin, grid.emax)?;
            let mut table = Table::new(
                "edges",
                &cell,
                &["band", "eps_lo", "eps_hi", "edge_lo", "edge_hi"],
            );
            for (i, b) in bands.iter().enumerate() {
                table.push(vec![
                    Field::Int(i as i64),
                    Field::Num(b.eps_lo),
                    Field::Num(b.eps_hi),
                    Field::Text(b.edge_lo_kind.as_str().into()),
                    Field::Text(b.edge_hi_kind.as_str().into()),
                ]);
            }
            emit(&table, &output)
        }
        Command::Dispersion {
            cell,
            grid,
            qsamples,
            nqa,
            output,
        } => {
            let cell = load_pt_cell(&cell)?;
            check_range(grid.emin, grid.emax)?;
            let n = cell.len() as f64;
            let points = match nqa {
                Some(v) => vec![dispersion(&cell, v / n, grid.emin, grid.emax)?],
                None => band_table(&cell, qsamples, grid.emin, grid.emax)?,
            };
            let mut table = Table::new(
                "dispersion",
                &cell,
                &["nqa", "q_a", "branch", "eps", "discontinuity"],
            );
            for p in &points {
                for (i, (&e, &flag)) in p.energies.iter().zip(&p.discontinuity_flags).enumerate() {
                    table.push(vec![
                        Field::Num(n * p.q_a),
                        Field::Num(p.q_a),
                        Field::Int(i as i64),
                        Field::Num(e),
                        Field::Bool(flag),
                    ]);
                }
            }
            emit(&table, &output)
        }
        Command::Dos {
            cell,
            grid,
            eps,
            integrate,
            output,
        } => {
            let cell = load_pt_cell(&cell)?;
            let table = if integrate {
                dos_integrated(&cell, &grid)?
            } else if let Some(e) = eps {
                let point =
                    dos(&cell, Epsilon::new(e)?).map_err(|err| name_nearest(&cell, e, err))?;
                let mut table = Table::new("dos", &cell, &["eps", "density", "interior_extremum"]);
                table.push(vec![
                    Field::Num(point.eps),
                    Field::Num(point.density),
                    Field::Bool(point.interior_extremum),
                ]);
                table
            } else {
                dos_grid(&cell, &grid)?
            };
            emit(&table, &output)
        }
        Command::Wavefunction {
            cell,
            eps,
            qsign,
            samples,
            output,
        } => {
            let cell = load_pt_cell(&cell)?;
            let sign = match qsign {
                SignArg::Plus => QSign::Plus,
                SignArg::Minus => QSign::Minus,
            };
            let state = bloch_state(&cell, Epsilon::new(eps)?, sign)
                .map_err(|err| name_nearest(&cell, eps, err))?;
            if samples < 2 {
                return Err(Error::TooFewSamples {
                    min: 2,
                    got: samples,
                }
                .into());
            }
            let loc = localization_metrics(&state);
            let n = cell.len() as f64;
            let mut table =
                Table::new("wavefunction", &cell, &["x", "re_psi", "im_psi", "density"]);
            table.meta("eps", Field::Num(state.eps));
            table.meta("nqa", Field::Num(n * state.q_a));
            table.meta("participation_ratio", Field::Num(loc.participation_ratio));
            table.meta("peak_to_mean", Field::Num(loc.peak_to_mean));
            let step = n / (samples - 1) as f64;
            let rows: Vec<Vec<Field>> = (0..samples)
                .into_par_iter()
                .map(|k| {
                    let x = if k + 1 == samples { n } else { k as f64 * step };
                    let psi = state.psi(x);
                    vec![
                        Field::Num(x),
                        Field::Num(psi.re),
                        Field::Num(psi.im),
                        Field::Num(psi.norm_sqr()),
                    ]
                })
                .collect();
            table.rows = rows;
            emit(&table, &output)
        }
        Command::Envelope { cell, grid, output } => {
            let cell = load_pt_cell(&cell)?;
            two_site_parts(&cell)?;
            let mut table = condition_table(&cell, &grid, true)?;
            table.command = "envelope";
            table.drop_column("imag_residue");
            emit(&table, &output)
        }
        Command::Extrema {
            cell,
            grid,
            grouping,
            output,
        } => {
            let cell = load_pt_cell(&cell)?;
            check_range(grid.emin, grid.emax)?;
            let found = find_extrema(&cell, grid.emin, grid.emax, grouping)?;
            let mut table = Table::new("extrema", &cell, &["eps", "B", "kind", "group"]);
            for x in found {
                let kind = match x.kind {
                    ExtremumKind::Max => "max",
                    ExtremumKind::Min => "min",
                };
                table.push(vec![
                    Field::Num(x.eps),
                    Field::Num(x.b_value),
                    Field::Text(kind.into()),
                    Field::Int(x.group_label as i64),
                ]);
            }
            emit(&table, &output)
        }
        Command::Sweep {
            cell,
            grid,
            sweeps,
            output,
        } => sweep(&cell, &grid, &sweeps, &output),
    }
}

fn parse_pairs(text: &str, what: &str) -> Outcome<Vec<Coupling>> {
    let values: Vec<f64> = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Failure::config(format!("--{what}: {e}")))?;
    if values.is_empty() || values.len() % 2 != 0 {
        return Err(Failure::config(format!(
            "--{what} needs r,s pairs, got {} numbers",
            values.len()
        )));
    }
    values
        .chunks(2)
        .map(|p| Coupling::new(p[0], p[1]).map_err(Failure::from))
        .collect()
}

fn cell_spec(args: &CellArgs) -> Outcome<CellSpec> {
    if let Some(path) = &args.cell {
        return Ok(CellSpec::read(path)?);
    }
    if let Some(text) = &args.couplings {
        return Ok(CellSpec::Full {
            couplings: parse_pairs(text, "couplings")?,
        });
    }
    let text = args.half.as_deref().unwrap_or_default();
    Ok(CellSpec::Half {
        half: parse_pairs(text, "half")?,
        middle: args.middle,
    })
}

fn load_cell(args: &CellArgs) -> Outcome<UnitCell> {
    let cell = cell_spec(args)?.build()?;
    if !cell.pt_ordered() && !args.allow_non_pt {
        return Err(Failure::config(format!(
            "cell {cell} is not PT-ordered (c[N+1-j] = conj c[j]); pass --allow-non-pt to evaluate it anyway"
        )));
    }
    Ok(cell)
}

fn load_pt_cell(args: &CellArgs) -> Outcome<UnitCell> {
    let cell = load_cell(args)?;
    if !cell.pt_ordered() {
        return Err(Failure::config("this command needs a PT-ordered cell"));
    }
    Ok(cell)
}

fn two_site_parts(cell: &UnitCell) -> Outcome<(f64, f64)> {
    if cell.len() != 2 || !cell.pt_ordered() {
        return Err(Failure::config(
            "envelopes exist only for a two-site PT cell",
        ));
    }
    let c = cell.couplings()[0];
    Ok((c.r, c.s))
}

fn energy_grid(grid: &GridArgs) -> Outcome<Vec<f64>> {
    check_range(grid.emin, grid.emax)?;
    if grid.esamples < 2 {
        return Err(Error::TooFewSamples {
            min: 2,
            got: grid.esamples,
        }
        .into());
    }
    if grid.emin == 0.0 && !grid.include_zero {
        return Err(Failure::config(
            "eps = 0 is only sampled with --include-zero",
        ));
    }
    let last = grid.esamples - 1;
    let width = grid.emax - grid.emin;
    let mut points: Vec<f64> = (0..=last)
        .map(|k| {
            if k == last {
                grid.emax
            } else {
                grid.emin + width * k as f64 / last as f64
            }
        })
        .collect();
    if grid.include_zero && grid.emin > 0.0 {
        points.insert(0, 0.0);
    }
    Ok(points)
}

fn condition_table(cell: &UnitCell, grid: &GridArgs, envelopes: bool) -> Outcome<Table> {
    let points = energy_grid(grid)?;
    let mut columns = vec!["eps", "B", "imag_residue"];
    if envelopes {
        columns.extend(["C_plus", "C_minus"]);
    }
    let parts = if envelopes {
        Some(two_site_parts(cell)?)
    } else {
        None
    };
    let mut table = Table::new("condition", cell, &columns);
    table.rows = points
        .par_iter()
        .map(|&e| {
            let eps = Epsilon::new(e).expect("grid points are finite and non-negative");
            let b = big_b(cell, eps);
            let mut row = vec![
                Field::Num(e),
                Field::Num(b.real_value),
                Field::Num(b.imag_residue),
            ];
            if let Some((r, s)) = parts {
                for branch in [Branch::Plus, Branch::Minus] {
                    let c = n2_envelope(r, s, eps, branch).unwrap_or(f64::NAN);
                    row.push(Field::Num(c));
                }
            }
            row
        })
        .collect();
    Ok(table)
}

fn dos_grid(cell: &UnitCell, grid: &GridArgs) -> Outcome<Table> {
    let points = energy_grid(grid)?;
    let mut table = Table::new("dos", cell, &["eps", "density", "interior_extremum"]);
    // gap points are skipped rather than reported as zero
    table.rows = points
        .par_iter()
        .filter_map(|&e| {
            let p = dos(cell, Epsilon::new(e).ok()?).ok()?;
            Some(vec![
                Field::Num(p.eps),
                Field::Num(p.density),
                Field::Bool(p.interior_extremum),
            ])
        })
        .collect();
    Ok(table)
}

fn dos_integrated(cell: &UnitCell, grid: &GridArgs) -> Outcome<Table> {
    check_range(grid.emin, grid.emax)?;
    let bands = allowed_bands(cell, grid.emin, grid.emax)?;
    let mut table = Table::new(
        "dos",
        cell,
        &[
            "band",
            "eps_lo",
            "eps_hi",
            "states_per_site",
            "states_per_cell",
        ],
    );
    let n = cell.len() as f64;
    for (i, band) in bands.iter().enumerate() {
        if !band.is_complete() {
            continue;
        }
        let states = integrated_states(cell, band, QUADRATURE_NODES);
        table.push(vec![
            Field::Int(i as i64),
            Field::Num(band.eps_lo),
            Field::Num(band.eps_hi),
            Field::Num(states),
            Field::Num(states * n),
        ]);
    }
    Ok(table)
}

/// Adds the closest allowed band to an out-of-band or band-edge error.
fn name_nearest(cell: &UnitCell, eps: f64, err: Error) -> Failure {
    let mut failure = Failure::from(err);
    if failure.code != EXIT_DOMAIN {
        return failure;
    }
    let lo = 1e-3f64.min(eps.max(1e-9) * 0.5);
    let hi = eps + 2.0 * std::f64::consts::PI;
    if let Ok(bands) = allowed_bands(cell, lo, hi) {
        if let Some(BandInterval { eps_lo, eps_hi, .. }) = nearest_band(&bands, eps) {
            let _ = write!(failure.message, "; nearest band is [{eps_lo}, {eps_hi}]");
        }
    }
    failure
}

struct SweepAxis {
    site: usize,
    values: Vec<f64>,
}

fn parse_sweep(text: &str, n: usize) -> Outcome<SweepAxis> {
    let bad = || Failure::config(format!("--sweep {text}: expected sJ=start:stop:frames"));
    let (name, range) = text.split_once('=').ok_or_else(bad)?;
    let site: usize = name
        .strip_prefix('s')
        .and_then(|j| j.parse().ok())
        .ok_or_else(bad)?;
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].parse().map_err(|_| bad())?;
    let frames: usize = parts[2].parse().map_err(|_| bad())?;
    if !start.is_finite() || !stop.is_finite() || frames == 0 {
        return Err(bad());
    }
    if site == 0 || 2 * site > n {
        return Err(Failure::config(format!(
            "--sweep {text}: s{site} is not in the first half of an N = {n} cell; \
             only s1..s{} can move without breaking PT order",
            n / 2
        )));
    }
    let values = (0..frames)
        .map(|k| {
            if frames == 1 {
                start
            } else if k + 1 == frames {
                stop
            } else {
                start + (stop - start) * k as f64 / (frames - 1) as f64
            }
        })
        .collect();
    Ok(SweepAxis { site, values })
}

fn sweep(args: &CellArgs, grid: &GridArgs, specs: &[String], output: &OutputArgs) -> Outcome<()> {
    let base = load_pt_cell(args)?;
    let dir = output
        .out
        .as_ref()
        .ok_or_else(|| Failure::config("sweep writes a directory of frames; pass --out <dir>"))?;
    let n = base.len();
    let axes: Vec<SweepAxis> = specs
        .iter()
        .map(|s| parse_sweep(s, n))
        .collect::<Outcome<_>>()?;
    let frames = axes[0].values.len();
    if axes.iter().any(|a| a.values.len() != frames) {
        return Err(Failure::config(
            "all --sweep ranges need the same frame count",
        ));
    }
    energy_grid(grid)?;
    std::fs::create_dir_all(dir).map_err(Error::from)?;

    let half = n / 2;
    let results: Vec<Outcome<Value>> = (0..frames)
        .into_par_iter()
        .map(|k| {
            let mut first: Vec<Coupling> = base.couplings()[..half].to_vec();
            let mut params = Map::new();
            for axis in &axes {
                let v = axis.values[k];
                first[axis.site - 1] = Coupling::new(first[axis.site - 1].r, v)?;
                params.insert(format!("s{}", axis.site), json_number(v));
            }
            let middle = (n % 2 == 1).then(|| base.couplings()[half].r);
            let cell = make_pt_cell(&first, middle)?;
            let mut table = condition_table(&cell, grid, false)?;
            table.meta("frame", Field::Int(k as i64));
            let file = format!("frame_{k:04}.{}", output.format.extension());
            write_output(&render(&table, output.format)?, Some(&dir.join(&file)))?;
            Ok(json!({
                "index": k,
                "file": file,
                "params": params,
                "couplings": cell.couplings(),
            }))
        })
        .collect();
    let frames: Vec<Value> = results.into_iter().collect::<Outcome<_>>()?;
    let manifest = json!({
        "tool": "ptcomb",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "condition",
        "format": output.format.extension(),
        "frames": frames,
    });
    let text = serde_json::to_string_pretty(&manifest).map_err(Error::from)? + "\n";
    write_output(&text, Some(&dir.join("manifest.json")))
}

#[derive(Debug, Clone)]
enum Field {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

/// Twelve significant digits in scientific notation, with `-0` folded to `0`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

fn json_number(x: f64) -> Value {
    format_number(x)
        .parse::<f64>()
        .ok()
        .and_then(serde_json::Number::from_f64)
        .map_or(Value::Null, Value::Number)
}

impl Field {
    fn csv(&self) -> String {
        match self {
            Field::Num(x) => format_number(*x),
            Field::Int(i) => i.to_string(),
            Field::Bool(b) => u8::from(*b).to_string(),
            Field::Text(t) => t.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Field::Num(x) => json_number(*x),
            Field::Int(i) => json!(i),
            Field::Bool(b) => json!(b),
            Field::Text(t) => json!(t),
        }
    }
}

struct Table {
    command: &'static str,
    couplings: Vec<Coupling>,
    meta: Vec<(&'static str, Field)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Field>>,
}

impl Table {
    fn new(command: &'static str, cell: &UnitCell, columns: &[&'static str]) -> Self {
        Self {
            command,
            couplings: cell.couplings().to_vec(),
            meta: Vec::new(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Field>) {
        self.rows.push(row);
    }

    fn meta(&mut self, key: &'static str, value: Field) {
        self.meta.push((key, value));
    }

    fn drop_column(&mut self, name: &str) {
        if let Some(i) = self.columns.iter().position(|c| *c == name) {
            self.columns.remove(i);
            for row in &mut self.rows {
                row.remove(i);
            }
        }
    }
}

fn render(table: &Table, format: Format) -> Outcome<String> {
    match format {
        Format::Csv => Ok(render_csv(table)),
        Format::Json => render_json(table),
    }
}

fn render_csv(table: &Table) -> String {
    let mut out = String::new();
    let cell: Vec<String> = table
        .couplings
        .iter()
        .map(|c| format!("({},{})", format_number(c.r), format_number(c.s)))
        .collect();
    let _ = writeln!(
        out,
        "# ptcomb {} command={} N={} couplings=[{}]",
        env!("CARGO_PKG_VERSION"),
        table.command,
        table.couplings.len(),
        cell.join(",")
    );
    for (key, value) in &table.meta {
        let _ = writeln!(out, "# {key}={}", value.csv());
    }
    let _ = writeln!(out, "{}", table.columns.join(","));
    for row in &table.rows {
        let fields: Vec<String> = row.iter().map(Field::csv).collect();
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}

/// The top-level `couplings` key makes every JSON output usable as a
/// `--cell` file.
fn render_json(table: &Table) -> Outcome<String> {
    let mut meta = Map::new();
    for (key, value) in &table.meta {
        meta.insert((*key).into(), value.json());
    }
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| Value::Array(r.iter().map(Field::json).collect()))
        .collect();
    let doc = json!({
        "tool": "ptcomb",
        "version": env!("CARGO_PKG_VERSION"),
        "command": table.command,
        "couplings": table.couplings,
        "meta": meta,
        "columns": table.columns,
        "rows": rows,
    });
    Ok(serde_json::to_string(&doc).map_err(Error::from)? + "\n")
}

fn write_output(text: &str, path: Option<&Path>) -> Outcome<()> {
    let result = match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
        }
    };
    result.map_err(|e| Failure::from(Error::from(e)))
}

fn emit(table: &Table, output: &OutputArgs) -> Outcome<()> {
    write_output(&render(table, output.format)?, output.out.as_deref())
}
