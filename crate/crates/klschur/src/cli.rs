//! Command-line surface: block computations, raw Kazhdan-Lusztig queries,
//! and the invariant selftest.
//!
//! Exit codes: 0 success, 1 internal invariant violation, 2 usage error.
//! When `KL_CACHE_DIR` points at a directory, the Kazhdan-Lusztig memo
//! table is loaded from and persisted to `kl_cache.txt` inside it (one
//! record per line, `window|window|poly` in canonical forms).

use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::coxeter::{parse_word, AffinePermutation, ParabolicSubset};
use crate::decomp::{self, BlockMatrices};
use crate::error::Error;
use crate::hecke;
use crate::multipartitions::{Block, Charge};
use crate::selftest;
use crate::Result;

#[derive(Parser, Debug)]
#[command(
    name = "klschur",
    about = "Graded decomposition and Cartan matrices for blocks of cyclotomic q-Schur algebras"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute d(q) and c(q) = d(q)^t d(q) for one block or for all
    /// blocks of the l-partitions of n.
    Decomp(DecompArgs),
    /// Query one polynomial from the h, h^, n, n^ families.
    Kl(KlArgs),
    /// Run the built-in invariant suites.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug)]
pub struct DecompArgs {
    /// Quantum characteristic, e > 1.
    #[arg(long)]
    pub e: i64,
    /// Charge: comma-separated integers, reduced mod e on input.
    #[arg(long)]
    pub s: String,
    /// Residue content of one block, e.g. "0:1,1:2" (exclusive with --n).
    #[arg(long)]
    pub block: Option<String>,
    /// Total box count; runs every block of the l-partitions of n.
    #[arg(long)]
    pub n: Option<u64>,
    /// Override for the composition m ("auto" or comma-separated sizes).
    #[arg(long)]
    pub m: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Worker threads (0 = library default).
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Args, Debug)]
pub struct KlArgs {
    /// Rank N of the affine symmetric group.
    #[arg(long)]
    pub rank: usize,
    /// Reduced word for x, e.g. "1,0,2"; empty for the identity.
    #[arg(long, default_value = "")]
    pub x: String,
    /// Reduced word for y.
    #[arg(long, default_value = "")]
    pub y: String,
    /// Which family: h (Kazhdan-Lusztig), hinv (inverse), n (parabolic),
    /// ninv (inverse parabolic).
    #[arg(long, value_enum)]
    pub family: Family,
    /// Generator subset for the parabolic families, e.g. "1,2".
    #[arg(long, default_value = "")]
    pub f: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    H,
    Hinv,
    N,
    Ninv,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    #[arg(long, value_enum, default_value_t = DepthArg::Small)]
    pub depth: DepthArg,
    /// Worker threads (0 = library default).
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DepthArg {
    Small,
    Full,
}

/// One serialized block record; the JSON interchange object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub e: i64,
    pub s: Vec<i64>,
    pub block: String,
    pub m: Vec<u64>,
    pub labels: Vec<Vec<Vec<u64>>>,
    #[serde(rename = "D")]
    pub d: Vec<Vec<String>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<String>>,
}

impl BlockRecord {
    pub fn from_matrices(bm: &BlockMatrices) -> Self {
        BlockRecord {
            e: bm.e,
            s: bm.s.clone(),
            block: bm.block.to_string(),
            m: bm.m.clone(),
            labels: bm.labels.iter().map(|l| l.to_nested()).collect(),
            d: bm
                .d
                .iter()
                .map(|row| row.iter().map(|p| p.to_string()).collect())
                .collect(),
            c: bm
                .c
                .iter()
                .map(|row| row.iter().map(|p| p.to_string()).collect())
                .collect(),
        }
    }
}

fn parse_int_list(s: &str, what: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|p| {
            p.trim().parse::<i64>().map_err(|e| Error::Parse {
                what: format!("{} '{}'", what, s),
                detail: e.to_string(),
            })
        })
        .collect()
}

/// Runs the decomp command and returns the rendered output.
pub fn run_decomp(args: &DecompArgs) -> Result<String> {
    let s = parse_int_list(&args.s, "charge")?;
    let chg = Charge::new(args.e, s)?;
    let m_override: Option<Vec<u64>> = match args.m.as_deref() {
        None | Some("auto") => None,
        Some(text) => Some(
            parse_int_list(text, "m")?
                .into_iter()
                .map(|v| {
                    if v > 0 {
                        Ok(v as u64)
                    } else {
                        Err(Error::Config("m components must be positive".into()))
                    }
                })
                .collect::<Result<Vec<u64>>>()?,
        ),
    };
    let blocks: Vec<Block> = match (&args.block, args.n) {
        (Some(b), None) => {
            let d = Block::parse(b, args.e)?;
            let labels = crate::multipartitions::enumerate_block(&chg, &d)?;
            if labels.is_empty() {
                return Err(Error::Config(format!(
                    "block {} contains no l-partitions for this charge",
                    d
                )));
            }
            vec![d]
        }
        (None, Some(n)) => crate::multipartitions::blocks_for_size(&chg, n)?
            .into_iter()
            .map(|(d, _)| d)
            .collect(),
        _ => {
            return Err(Error::Config(
                "exactly one of --block or --n must be given".into(),
            ))
        }
    };
    let mut records = Vec::new();
    for d in &blocks {
        let bm = decomp::block_matrices(&chg, d, m_override.clone())?;
        records.push(BlockRecord::from_matrices(&bm));
    }
    Ok(render(&records, args.format))
}

/// Renders block records in the requested format.
pub fn render(records: &[BlockRecord], format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(records).expect("serializable");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut out = String::from("e,s,block,m,matrix,row,col,value\n");
            for r in records {
                let scol = r
                    .s
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                let mcol = r
                    .m
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                let label_str = |idx: usize| format_label(&r.labels[idx]);
                for (mat, name) in [(&r.d, "D"), (&r.c, "C")] {
                    for (i, row) in mat.iter().enumerate() {
                        for (j, val) in row.iter().enumerate() {
                            out.push_str(&format!(
                                "{},{},{},{},{},{},{},{}\n",
                                r.e,
                                scol,
                                r.block,
                                mcol,
                                name,
                                label_str(i),
                                label_str(j),
                                val
                            ));
                        }
                    }
                }
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for (k, r) in records.iter().enumerate() {
                if k > 0 {
                    out.push('\n');
                }
                let block_name = if r.block.is_empty() {
                    "(empty)".to_string()
                } else {
                    r.block.clone()
                };
                out.push_str(&format!(
                    "block {}  e={} s={:?} m={:?}\n",
                    block_name, r.e, r.s, r.m
                ));
                out.push_str("labels:\n");
                for (i, l) in r.labels.iter().enumerate() {
                    out.push_str(&format!("  {}: {}\n", i + 1, format_label(l)));
                }
                out.push_str("D (rows Vermas, columns simples):\n");
                out.push_str(&render_table(&r.d));
                out.push_str("C = D^t D:\n");
                out.push_str(&render_table(&r.c));
            }
            out
        }
    }
}

fn format_label(nested: &[Vec<u64>]) -> String {
    let comps: Vec<String> = nested
        .iter()
        .map(|c| {
            let rows: Vec<String> = c.iter().map(|r| r.to_string()).collect();
            format!("[{}]", rows.join(","))
        })
        .collect();
    format!("[{}]", comps.join(","))
}

fn render_table(mat: &[Vec<String>]) -> String {
    let cols = mat.first().map_or(0, |r| r.len());
    let mut widths = vec![0usize; cols];
    for row in mat {
        for (j, v) in row.iter().enumerate() {
            widths[j] = widths[j].max(v.len());
        }
    }
    let mut out = String::new();
    for row in mat {
        out.push_str(" ");
        for (j, v) in row.iter().enumerate() {
            out.push_str(&format!(" {:>width$}", v, width = widths[j]));
        }
        out.push('\n');
    }
    out
}

/// Runs the kl command and returns the polynomial in canonical form.
pub fn run_kl(args: &KlArgs) -> Result<String> {
    let xw = parse_word(&args.x)?;
    let yw = parse_word(&args.y)?;
    let x = AffinePermutation::from_word(args.rank, &xw)?;
    let y = AffinePermutation::from_word(args.rank, &yw)?;
    let f_gens = if args.f.trim().is_empty() {
        Vec::new()
    } else {
        parse_word(&args.f)?
    };
    let f = ParabolicSubset::new(args.rank, f_gens)?;
    let value = match args.family {
        Family::H => hecke::h(&x, &y),
        Family::Hinv => hecke::h_inverse(&x, &y)?,
        Family::N => hecke::n(&x, &y, &f)?,
        Family::Ninv => hecke::n_inverse(&x, &y, &f)?,
    };
    Ok(format!("{}\n", value))
}

fn with_workers<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        job()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool");
        pool.install(job)
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::Parse { .. }
        | Error::GeneratorOutOfRange { .. }
        | Error::RankMismatch(..)
        | Error::NotMinimalRep(..)
        | Error::InfiniteParabolic(_)
        | Error::RowOverflow { .. }
        | Error::InvalidWindow(..)
        | Error::OrbitMismatch { .. } => 2,
        Error::BlockInvariant(_) | Error::TooLarge(_) | Error::Io(_) | Error::NotAntidominant(_) => 1,
    }
}

/// Executes a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let cache_dir = std::env::var_os("KL_CACHE_DIR").map(PathBuf::from);
    if let Some(dir) = &cache_dir {
        if let Err(e) = hecke::load_cache(dir) {
            eprintln!("warning: could not load KL cache: {}", e);
        }
    }
    let code = match &cli.command {
        Command::Decomp(args) => {
            match with_workers(args.workers, || run_decomp(args)) {
                Ok(text) => {
                    let written: Result<()> = match &args.output {
                        Some(path) => std::fs::write(path, &text).map_err(Error::from),
                        None => std::io::stdout()
                            .write_all(text.as_bytes())
                            .map_err(Error::from),
                    };
                    match written {
                        Ok(()) => 0,
                        Err(e) => {
                            eprintln!("error: {}", e);
                            1
                        }
                    }
                }
                Err(e) => {
                    eprintln!("error: {}", e);
                    exit_code_for(&e)
                }
            }
        }
        Command::Kl(args) => match run_kl(args) {
            Ok(text) => {
                print!("{}", text);
                0
            }
            Err(e) => {
                eprintln!("error: {}", e);
                exit_code_for(&e)
            }
        },
        Command::Selftest(args) => {
            let depth = match args.depth {
                DepthArg::Small => selftest::Depth::Small,
                DepthArg::Full => selftest::Depth::Full,
            };
            let report = with_workers(args.workers, || selftest::run(depth));
            for r in &report.results {
                println!("{}", r.line());
            }
            if report.all_passed() {
                println!("selftest: all families passed");
                0
            } else {
                println!("selftest: FAILURES present");
                1
            }
        }
    };
    if code == 0 {
        if let Some(dir) = &cache_dir {
            if let Err(e) = hecke::save_cache(dir) {
                eprintln!("warning: could not save KL cache: {}", e);
            }
        }
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decomp_two_label_block_text() {
        let args = DecompArgs {
            e: 2,
            s: "0".into(),
            block: Some("0:1,1:1".into()),
            n: None,
            m: None,
            format: Format::Text,
            output: None,
            workers: 0,
        };
        let out = run_decomp(&args).unwrap();
        assert!(out.contains("block 0:1,1:1"));
        assert!(out.contains("[[2]]"));
        assert!(out.contains("[[1,1]]"));
    }

    #[test]
    fn decomp_rejects_bad_m() {
        // m = 3 fails the congruence for e = 2, s = (0)
        let args = DecompArgs {
            e: 2,
            s: "0".into(),
            block: None,
            n: Some(2),
            m: Some("3".into()),
            format: Format::Json,
            output: None,
            workers: 0,
        };
        let err = run_decomp(&args).unwrap_err();
        assert_eq!(exit_code_for(&err), 2);
    }

    #[test]
    fn decomp_requires_exactly_one_mode() {
        let args = DecompArgs {
            e: 2,
            s: "0".into(),
            block: None,
            n: None,
            m: None,
            format: Format::Json,
            output: None,
            workers: 0,
        };
        assert!(run_decomp(&args).is_err());
    }

    #[test]
    fn json_round_trip() {
        let args = DecompArgs {
            e: 2,
            s: "0".into(),
            block: None,
            n: Some(2),
            m: None,
            format: Format::Json,
            output: None,
            workers: 0,
        };
        let out = run_decomp(&args).unwrap();
        let parsed: Vec<BlockRecord> = serde_json::from_str(&out).unwrap();
        let re = serde_json::to_string_pretty(&parsed).unwrap() + "\n";
        assert_eq!(out, re);
        // two blocks cover the partitions of 2
        let total: usize = parsed.iter().map(|r| r.labels.len()).sum();
        assert_eq!(total, 2);
    }

    #[test]
    fn kl_query_examples() {
        let out = run_kl(&KlArgs {
            rank: 2,
            x: "".into(),
            y: "1".into(),
            family: Family::H,
            f: "".into(),
        })
        .unwrap();
        assert_eq!(out, "q\n");

        let out = run_kl(&KlArgs {
            rank: 3,
            x: "1".into(),
            y: "1".into(),
            family: Family::Hinv,
            f: "".into(),
        })
        .unwrap();
        assert_eq!(out, "1\n");

        let out = run_kl(&KlArgs {
            rank: 3,
            x: "".into(),
            y: "2".into(),
            family: Family::N,
            f: "1".into(),
        })
        .unwrap();
        assert_eq!(out, "q\n");
    }

    #[test]
    fn kl_rejects_non_minimal_rep() {
        let err = run_kl(&KlArgs {
            rank: 3,
            x: "1".into(),
            y: "2".into(),
            family: Family::N,
            f: "1".into(),
        })
        .unwrap_err();
        assert_eq!(exit_code_for(&err), 2);
    }

    #[test]
    fn kl_rejects_infinite_parabolic() {
        let err = run_kl(&KlArgs {
            rank: 2,
            x: "".into(),
            y: "1".into(),
            family: Family::N,
            f: "0,1".into(),
        })
        .unwrap_err();
        assert_eq!(exit_code_for(&err), 2);
    }
}
