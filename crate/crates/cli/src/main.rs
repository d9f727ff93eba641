//! `hpquad`: build, query, decode, generate and benchmark point indexes.
//!
//! Exit codes: 0 on success, 2 for bad input or usage, 3 for a corrupt index.

use std::fs;
use std::hint::black_box;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hpquad::format::{parse_points, write_points, StoredIndex};
use hpquad::oracle::{self, ClusterSpec};
use hpquad::{Error, GridSpec, Point, PointSet, Rect, Structure};
use serde_json::json;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("corrupt index {path}: {msg}")]
    Corrupt { path: PathBuf, msg: String },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Corrupt { .. } => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "hpquad",
    version,
    about = "Heavy-path quadtree and k2-tree point indexes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index from a points file.
    Build {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        lg_u: u32,
        #[arg(long, value_enum, default_value_t = StructureArg::Hp)]
        structure: StructureArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Membership queries; prints 1 or 0 per query.
    Query {
        index: PathBuf,
        #[command(flatten)]
        source: QuerySource,
        /// Append the segment count and per-segment LCPs (heavy-path only).
        #[arg(long)]
        trace: bool,
    },
    /// Report the points inside a half-open rectangle.
    Range {
        index: PathBuf,
        /// "x0,y0,x1,y1", covering [x0, x1) x [y0, y1).
        #[arg(long)]
        rect: String,
    },
    /// Print space statistics as JSON.
    Stats { index: PathBuf },
    /// Write the stored points to a points file.
    Decode {
        index: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic points file.
    Gen {
        #[arg(long, value_enum)]
        mode: GenMode,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        lg_u: u32,
        #[arg(long, required_if_eq("mode", "clusters"))]
        clusters: Option<usize>,
        #[arg(long, required_if_eq("mode", "clusters"))]
        diameter: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw a query workload of one class from a points file.
    Sample {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        lg_u: u32,
        #[arg(long, value_enum)]
        class: QueryClass,
        /// Number of queries; defaults to 1% of the points for `isolated`.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time membership queries and print one CSV row.
    Bench {
        index: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long, value_enum)]
        class: QueryClass,
        #[arg(long, default_value_t = 5)]
        repeat: u32,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct QuerySource {
    /// A single point "x,y".
    #[arg(long)]
    point: Option<String>,
    /// A points file; answers follow the input order.
    #[arg(long)]
    batch: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StructureArg {
    Hp,
    K2,
}

impl From<StructureArg> for Structure {
    fn from(s: StructureArg) -> Self {
        match s {
            StructureArg::Hp => Structure::HeavyPath,
            StructureArg::K2 => Structure::K2Tree,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GenMode {
    Uniform,
    Clusters,
}

#[derive(Clone, Copy, ValueEnum)]
enum QueryClass {
    Empty,
    Filled,
    Isolated,
}

impl QueryClass {
    fn name(self) -> &'static str {
        match self {
            QueryClass::Empty => "empty",
            QueryClass::Filled => "filled",
            QueryClass::Isolated => "isolated",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hpquad: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Build {
            input,
            lg_u,
            structure,
            out,
        } => cmd_build(&input, lg_u, structure.into(), &out),
        Command::Query {
            index,
            source,
            trace,
        } => cmd_query(&index, source, trace),
        Command::Range { index, rect } => cmd_range(&index, &rect),
        Command::Stats { index } => cmd_stats(&index),
        Command::Decode { index, out } => cmd_decode(&index, &out),
        Command::Gen {
            mode,
            n,
            lg_u,
            clusters,
            diameter,
            seed,
            out,
        } => cmd_gen(mode, n, lg_u, clusters.zip(diameter), seed, &out),
        Command::Sample {
            input,
            lg_u,
            class,
            count,
            seed,
            out,
        } => cmd_sample(&input, lg_u, class, count, seed, &out),
        Command::Bench {
            index,
            queries,
            class,
            repeat,
        } => cmd_bench(&index, &queries, class, repeat),
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult {
    fs::write(path, bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Reads a points file, prefixing parse errors with the file name.
fn read_points(path: &Path, grid: Option<GridSpec>) -> CliResult<Vec<Point>> {
    let text = read_text(path)?;
    parse_points(&text, grid).map_err(|e| match e {
        Error::Parse { line, msg } => CliError::Input(format!("{}:{line}: {msg}", path.display())),
        e => e.into(),
    })
}

fn load_index(path: &Path) -> CliResult<StoredIndex> {
    let bytes = fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    StoredIndex::from_bytes(&bytes).map_err(|e| CliError::Corrupt {
        path: path.to_owned(),
        msg: e.to_string(),
    })
}

fn parse_numbers<const N: usize>(s: &str, what: &str) -> CliResult<[u64; N]> {
    let bad = || CliError::Input(format!("malformed {what} {s:?}"));
    let nums = s
        .split(',')
        .map(|f| f.trim().parse::<u64>().map_err(|_| bad()))
        .collect::<CliResult<Vec<_>>>()?;
    nums.try_into().map_err(|_| bad())
}

fn parse_point(s: &str, grid: GridSpec) -> CliResult<Point> {
    let [x, y] = parse_numbers::<2>(s, "point")?;
    if x >= grid.side() || y >= grid.side() {
        return Err(CliError::Input(format!(
            "point ({x}, {y}) outside a grid of side {}",
            grid.side()
        )));
    }
    Ok(Point::new(x as u32, y as u32))
}

fn cmd_build(input: &Path, lg_u: u32, structure: Structure, out: &Path) -> CliResult {
    let grid = GridSpec::new(lg_u)?;
    let points = read_points(input, Some(grid))?;
    let ps = PointSet::new(grid, points)?;
    let index = StoredIndex::build(&ps, structure);
    write_file(out, &index.to_bytes())?;
    eprintln!(
        "built {structure} index of {} points on a 2^{lg_u} grid",
        ps.len()
    );
    Ok(())
}

fn cmd_query(path: &Path, source: QuerySource, trace: bool) -> CliResult {
    let index = load_index(path)?;
    if trace && index.structure() != Structure::HeavyPath {
        return Err(CliError::Input("--trace needs a heavy-path index".into()));
    }
    let grid = index.grid();
    let queries = match (source.point, source.batch) {
        (Some(p), _) => vec![parse_point(&p, grid)?],
        (None, Some(file)) => read_points(&file, Some(grid))?,
        (None, None) => unreachable!("clap requires a query source"),
    };
    let mut out = BufWriter::new(io::stdout().lock());
    for p in queries {
        if trace {
            let t = index.membership_trace(p)?.expect("heavy-path index");
            let lcp: Vec<String> = t.lcp_lengths.iter().map(u32::to_string).collect();
            writeln!(
                out,
                "{} segments={} lcp={}",
                u8::from(t.member),
                t.segments,
                lcp.join(",")
            )?;
        } else {
            writeln!(out, "{}", u8::from(index.contains(p)?))?;
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_range(path: &Path, rect: &str) -> CliResult {
    let index = load_index(path)?;
    let [x0, y0, x1, y1] = parse_numbers::<4>(rect, "rectangle")?;
    let points = index.range_report(Rect::new(x0, y0, x1, y1))?;
    let mut out = BufWriter::new(io::stdout().lock());
    out.write_all(write_points(&points).as_bytes())?;
    out.flush()?;
    Ok(())
}

fn cmd_stats(path: &Path) -> CliResult {
    let s = load_index(path)?.space_stats();
    let stats = json!({
        "structure": s.structure.name(),
        "n": s.n,
        "lg_u": s.lg_u,
        "nodes": s.nodes,
        "bits_total": s.total_bits,
        "bpp": s.bpp,
        "bits_H": s.bits_h,
        "bits_L": s.bits_l,
    });
    println!("{stats}");
    Ok(())
}

fn cmd_decode(path: &Path, out: &Path) -> CliResult {
    let index = load_index(path)?;
    let points = index.points().map_err(|e| CliError::Corrupt {
        path: path.to_owned(),
        msg: e.to_string(),
    })?;
    write_file(out, write_points(&points).as_bytes())
}

fn cmd_gen(
    mode: GenMode,
    n: usize,
    lg_u: u32,
    clusters: Option<(usize, u64)>,
    seed: u64,
    out: &Path,
) -> CliResult {
    let grid = GridSpec::new(lg_u)?;
    if n as u128 > u128::from(grid.cells()) {
        return Err(CliError::Input(format!(
            "{n} points do not fit on a 2^{lg_u} grid"
        )));
    }
    let ps = match (mode, clusters) {
        (GenMode::Uniform, _) => oracle::gen_uniform(n, grid, seed)?,
        (GenMode::Clusters, Some((c, d))) => {
            if c == 0 {
                return Err(CliError::Input("--clusters must be positive".into()));
            }
            oracle::gen_clustered(&ClusterSpec::even(c, n, d), grid, seed)?
        }
        (GenMode::Clusters, None) => unreachable!("clap requires --clusters and --diameter"),
    };
    write_file(out, write_points(ps.points()).as_bytes())?;
    eprintln!("wrote {} points", ps.len());
    Ok(())
}

fn cmd_sample(
    input: &Path,
    lg_u: u32,
    class: QueryClass,
    count: Option<usize>,
    seed: u64,
    out: &Path,
) -> CliResult {
    let grid = GridSpec::new(lg_u)?;
    let ps = PointSet::new(grid, read_points(input, Some(grid))?)?;
    let queries = match class {
        QueryClass::Empty => oracle::sample_empty(&ps, count.unwrap_or(10_000), seed)?,
        QueryClass::Filled => oracle::sample_filled(&ps, count.unwrap_or(10_000), seed)?,
        QueryClass::Isolated => {
            oracle::isolation_rank(&ps, count.unwrap_or(ps.len().div_ceil(100)))
        }
    };
    write_file(out, write_points(&queries).as_bytes())
}

fn cmd_bench(path: &Path, queries: &Path, class: QueryClass, repeat: u32) -> CliResult {
    if repeat < 3 {
        return Err(CliError::Input(format!(
            "--repeat must be at least 3, got {repeat}"
        )));
    }
    let index = load_index(path)?;
    let queries = read_points(queries, Some(index.grid()))?;
    if queries.is_empty() {
        return Err(CliError::Input("no queries".into()));
    }
    let pass = || -> CliResult<usize> {
        let mut hits = 0;
        for &p in &queries {
            hits += usize::from(index.contains(black_box(p))?);
        }
        Ok(black_box(hits))
    };
    pass()?;
    let start = Instant::now();
    for _ in 0..repeat {
        pass()?;
    }
    let elapsed = start.elapsed();
    let ns_per_query = elapsed.as_nanos() as f64 / (f64::from(repeat) * queries.len() as f64);

    let mean_segments = match index.structure() {
        Structure::HeavyPath => {
            let mut total = 0;
            for &p in &queries {
                total += index.membership_trace(p)?.map_or(0, |t| t.segments);
            }
            format!("{:.4}", total as f64 / queries.len() as f64)
        }
        Structure::K2Tree => String::new(),
    };
    let stats = index.space_stats();
    let bpp = stats.bpp.map_or(String::new(), |b| format!("{b:.4}"));
    println!("class,structure,n,lg_u,bpp,ns_per_query,mean_segments");
    println!(
        "{},{},{},{},{bpp},{ns_per_query:.2},{mean_segments}",
        class.name(),
        stats.structure,
        stats.n,
        stats.lg_u,
    );
    Ok(())
}
