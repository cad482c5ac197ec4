//! Command-line front end.
//!
//! One subcommand per capability: point-set generation, kernel dumps, the
//! `N_max/b_n` scan, the Korobov search, the verification checks, and the
//! full suite. Every run records its seed, the crate version, and the exact
//! flag set in the output header. Exit codes: 0 on success, 1 when an
//! assertion fails, 2 on usage errors.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::path::PathBuf;

use crate::discretize::{self, Collection, ShiftOperator};
use crate::kernels::{self, KernelId};
use crate::lattices::{fibonacci_n_max, fibonacci_points, gamma_scan, korobov_points, korobov_search, PointSet};
use crate::verify::{self, SuiteConfig};
use crate::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "lattice-sampling",
    version,
    about = "Lattice point sets, trigonometric kernels, and sampling-discretization checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Seed for all random instances
    #[arg(long, global = true, default_value_t = 2024)]
    seed: u64,
    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; `auto` picks CSV for tables and JSON otherwise
    #[arg(long, global = true, value_enum, default_value_t = Format::Auto)]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Format {
    Json,
    Csv,
    Auto,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a lattice point set (coordinates as exact rationals x/2π)
    GenPoints {
        /// Fibonacci index n (point count b_n)
        #[arg(long, conflicts_with_all = ["korobov_m", "korobov_h"])]
        fibonacci: Option<u32>,
        /// Korobov modulus m
        #[arg(long, requires = "korobov_h")]
        korobov_m: Option<u64>,
        /// Korobov generating vector, comma separated
        #[arg(long, value_delimiter = ',')]
        korobov_h: Vec<i64>,
    },
    /// Dump a kernel's Fourier coefficients
    DumpKernel {
        #[arg(long, value_enum)]
        kind: KernelKind,
        /// Order(s) j, comma separated for tensor kernels
        #[arg(long, value_delimiter = ',')]
        j: Vec<u32>,
        /// Dyadic level(s) s
        #[arg(long, value_delimiter = ',')]
        s: Vec<u32>,
        /// Step hyperbolic cross level r
        #[arg(long)]
        r: Option<u32>,
        /// Dimension for the hyperbolic-cross kernels
        #[arg(long, default_value_t = 2)]
        d: usize,
    },
    /// Scan N_max(n) = largest N with Γ(N,2) avoiding the dual lattice
    GammaScan {
        #[arg(long)]
        n_min: u32,
        #[arg(long)]
        n_max: u32,
    },
    /// Find the smallest admissible Korobov modulus and generator for Γ(L,d)
    KorobovSearch {
        #[arg(long = "L")]
        l: u64,
        #[arg(long)]
        d: usize,
    },
    /// Check discretized convolution against exact convolution
    VerifyConvolution {
        /// Number of random (f, g) pairs
        #[arg(long, default_value_t = 200)]
        pairs: usize,
        /// Largest Fibonacci index used
        #[arg(long, default_value_t = 16)]
        n: u32,
    },
    /// Check the kernel norm identities
    VerifyNorms {},
    /// Table of shift-operator norms over the cross level r
    OpNormScan {
        /// Fibonacci index
        #[arg(long, default_value_t = 16)]
        n: u32,
        #[arg(long, default_value_t = 2)]
        r_min: u32,
        /// Defaults to the largest r with 2^r <= N_max(n)
        #[arg(long)]
        r_max: Option<u32>,
        #[arg(long, value_enum, default_value_t = ScanKernel::Vp)]
        kernel: ScanKernel,
    },
    /// Universal two-sided discretization check over a rectangle collection
    UniversalCheck {
        /// Fibonacci index of the point set
        #[arg(long, default_value_t = 14)]
        n: u32,
        /// Point-set JSON produced by gen-points (overrides --n)
        #[arg(long)]
        points: Option<PathBuf>,
        /// Collection bound N for C'(N,2); defaults to N_max/9
        #[arg(long)]
        collection_n: Option<u64>,
        /// Exponent: a number or "inf"
        #[arg(long, default_value = "2")]
        p: String,
        #[arg(long, default_value_t = 3)]
        trials: usize,
    },
    /// Run the complete verification suite
    RunSuite {
        /// JSON configuration file (defaults used when omitted)
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum KernelKind {
    Dirichlet,
    Fejer,
    Vp,
    BlockA,
    TensorVp,
    TensorFejer,
    TensorBlockA,
    HcVp,
    DeltaHcVp,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ScanKernel {
    Vp,
    Delta,
}

/// Entry point for the binary.
pub fn run() -> i32 {
    dispatch(std::env::args_os())
}

/// Parses and runs a command line; returns the process exit code.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let argv_display: Vec<String> = argv
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    let meta = Meta {
        version: crate::VERSION,
        prng: crate::PRNG_ALGORITHM,
        seed: cli.common.seed,
        args: argv_display.join(" "),
    };
    match run_command(cli.command, &cli.common, &meta) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[derive(serde::Serialize, Clone)]
struct Meta {
    version: &'static str,
    prng: &'static str,
    seed: u64,
    args: String,
}

struct Output<'a> {
    common: &'a Common,
    meta: &'a Meta,
}

impl Output<'_> {
    fn emit_json(&self, payload: serde_json::Value) -> Result<()> {
        let body = serde_json::json!({ "meta": self.meta, "result": payload });
        self.write(serde_json::to_string_pretty(&body)? + "\n")
    }

    /// CSV with `#`-prefixed header lines carrying the run metadata.
    fn emit_csv(&self, header: &str, rows: &[String]) -> Result<()> {
        let mut text = format!(
            "# lattice-sampling {} (prng {})\n# args: {}\n# seed: {}\n{header}\n",
            self.meta.version, self.meta.prng, self.meta.args, self.meta.seed
        );
        for row in rows {
            text.push_str(row);
            text.push('\n');
        }
        self.write(text)
    }

    fn table(&self, header: &str, rows: &[String], json: serde_json::Value) -> Result<()> {
        match self.common.format {
            Format::Json => self.emit_json(json),
            _ => self.emit_csv(header, rows),
        }
    }

    fn object(&self, json: serde_json::Value) -> Result<()> {
        match self.common.format {
            Format::Csv => Err(Error::InvalidParameter(
                "this subcommand has no CSV form; use --format json".into(),
            )),
            _ => self.emit_json(json),
        }
    }

    fn write(&self, text: String) -> Result<()> {
        match &self.common.out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

fn run_command(command: Command, common: &Common, meta: &Meta) -> Result<bool> {
    let out = Output { common, meta };
    match command {
        Command::GenPoints {
            fibonacci,
            korobov_m,
            korobov_h,
        } => {
            let ps = match (fibonacci, korobov_m) {
                (Some(n), None) => fibonacci_points(n)?,
                (None, Some(m)) => korobov_points(m, &korobov_h)?,
                _ => {
                    return Err(Error::InvalidParameter(
                        "choose exactly one of --fibonacci or --korobov-m/--korobov-h".into(),
                    ))
                }
            };
            match common.format {
                Format::Json => out.emit_json(ps.to_json())?,
                _ => {
                    let header: Vec<String> = (1..=ps.dim()).map(|i| format!("x{i}")).collect();
                    let m = ps.modulus();
                    let rows: Vec<String> = ps
                        .residues()
                        .iter()
                        .map(|row| {
                            row.iter()
                                .map(|&r| format!("{r}/{m}"))
                                .collect::<Vec<_>>()
                                .join(",")
                        })
                        .collect();
                    out.emit_csv(&header.join(","), &rows)?;
                }
            }
            Ok(true)
        }

        Command::DumpKernel { kind, j, s, r, d } => {
            let id = kernel_id(kind, &j, &s, r, d)?;
            let kernel = kernels::kernel(&id)?;
            let rows: Vec<String> = kernel
                .coeffs()
                .map(|(k, c)| {
                    let coords: Vec<String> = k.coords().iter().map(|v| v.to_string()).collect();
                    format!("{},{},{}", coords.join(","), c.re, c.im)
                })
                .collect();
            let header: Vec<String> = (1..=kernel.dim())
                .map(|i| format!("k{i}"))
                .chain(["re".into(), "im".into()])
                .collect();
            out.table(
                &header.join(","),
                &rows,
                serde_json::json!({ "kernel": id, "coefficients": kernel.to_json() }),
            )?;
            Ok(true)
        }

        Command::GammaScan { n_min, n_max } => {
            let rows = gamma_scan(n_min, n_max)?;
            let csv: Vec<String> = rows
                .iter()
                .map(|r| format!("{},{},{},{}", r.n, r.b_n, r.n_max, r.ratio))
                .collect();
            out.table("n,b_n,N_max,ratio", &csv, serde_json::json!({ "rows": rows }))?;
            Ok(true)
        }

        Command::KorobovSearch { l, d } => {
            let result = korobov_search(l, d)?;
            let verified = result.verified;
            out.object(serde_json::to_value(&result)?)?;
            Ok(verified)
        }

        Command::VerifyConvolution { pairs, n } => {
            let cfg = SuiteConfig {
                seed: common.seed,
                convolution_pairs: pairs,
                shift_bound_max_n: n,
                ..SuiteConfig::default()
            };
            let result = verify::check_discretized_convolution(&cfg)?;
            let passed = result.passed;
            out.object(serde_json::to_value(&result)?)?;
            Ok(passed)
        }

        Command::VerifyNorms {} => {
            let cfg = SuiteConfig {
                seed: common.seed,
                ..SuiteConfig::default()
            };
            let result = verify::check_kernel_identities(&cfg)?;
            let passed = result.passed;
            out.object(serde_json::to_value(&result)?)?;
            Ok(passed)
        }

        Command::OpNormScan {
            n,
            r_min,
            r_max,
            kernel,
        } => {
            let ps = fibonacci_points(n)?;
            let n_max = fibonacci_n_max(n)?;
            let r_hi = r_max.unwrap_or(63 - n_max.leading_zeros());
            let mut csv = Vec::new();
            let mut rows = Vec::new();
            for r in r_min..=r_hi {
                let id = match kernel {
                    ScanKernel::Vp => KernelId::HcValleePoussin { r, dim: 2 },
                    ScanKernel::Delta => KernelId::DeltaHcVp { r, dim: 2 },
                };
                let op = ShiftOperator::from_kernel_id(id, ps.clone())?;
                let n1 = discretize::op_norm(&op, 1.0)?;
                let n2 = discretize::op_norm(&op, 2.0)?;
                let ninf = discretize::op_norm(&op, f64::INFINITY)?;
                csv.push(format!("{r},{n1},{n2},{ninf}"));
                rows.push(serde_json::json!([r, n1, n2, ninf]));
            }
            out.table(
                "r,norm_p1,norm_p2,norm_pinf",
                &csv,
                serde_json::json!({ "n": n, "N_max": n_max, "rows": rows }),
            )?;
            Ok(true)
        }

        Command::UniversalCheck {
            n,
            points,
            collection_n,
            p,
            trials,
        } => {
            let ps = match points {
                Some(path) => {
                    let text = std::fs::read_to_string(path)?;
                    let v: serde_json::Value = serde_json::from_str(&text)?;
                    // accept both raw point-set JSON and gen-points output
                    PointSet::from_json(v.get("result").unwrap_or(&v))?
                }
                None => fibonacci_points(n)?,
            };
            let p: f64 = if p == "inf" || p == "infinity" {
                f64::INFINITY
            } else {
                p.parse()
                    .map_err(|_| Error::InvalidParameter(format!("not an exponent: {p:?}")))?
            };
            let dual = ps.dual().ok_or_else(|| {
                Error::InvalidParameter("universal check needs a rank-1 point set".into())
            })?;
            let big_n = match collection_n {
                Some(v) => v,
                None => (crate::lattices::min_product(&dual)?.saturating_sub(1) / 9).max(1),
            };
            let report = discretize::universal_check(
                &Collection::MaxProduct { n: big_n },
                &ps,
                p,
                trials,
                common.seed,
            )?;
            let mut passed =
                report.exactness_verified && report.max_representation_error <= 1e-10;
            if p == 2.0 {
                passed &= (report.min_lower - 1.0).abs() <= 1e-10
                    && (report.max_upper - 1.0).abs() <= 1e-10;
            }
            out.object(serde_json::to_value(&report)?)?;
            Ok(passed)
        }

        Command::RunSuite { config } => {
            let mut cfg: SuiteConfig = match config {
                Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
                None => SuiteConfig::default(),
            };
            if cfg.out.is_none() {
                cfg.out = common.out.clone();
            }
            let report = verify::run_suite(&cfg)?;
            eprintln!("{}", report.summary());
            if cfg.out.is_none() {
                // no file target: the report goes to stdout
                let body = serde_json::json!({ "meta": meta, "result": report });
                println!("{}", serde_json::to_string_pretty(&body)?);
            }
            Ok(report.passed)
        }
    }
}

fn kernel_id(kind: KernelKind, j: &[u32], s: &[u32], r: Option<u32>, d: usize) -> Result<KernelId> {
    let one_j = || -> Result<u32> {
        j.first()
            .copied()
            .ok_or_else(|| Error::InvalidParameter("this kernel needs --j".into()))
    };
    let one_s = || -> Result<u32> {
        s.first()
            .copied()
            .ok_or_else(|| Error::InvalidParameter("this kernel needs --s".into()))
    };
    let need_r = || r.ok_or_else(|| Error::InvalidParameter("this kernel needs --r".into()));
    Ok(match kind {
        KernelKind::Dirichlet => KernelId::Dirichlet { j: one_j()? },
        KernelKind::Fejer => KernelId::Fejer { j: one_j()? },
        KernelKind::Vp => KernelId::ValleePoussin { j: one_j()? },
        KernelKind::BlockA => KernelId::BlockA { s: one_s()? },
        KernelKind::TensorVp => KernelId::TensorVP { j: j.to_vec() },
        KernelKind::TensorFejer => KernelId::TensorFejer { j: j.to_vec() },
        KernelKind::TensorBlockA => KernelId::TensorBlockA { s: s.to_vec() },
        KernelKind::HcVp => KernelId::HcValleePoussin { r: need_r()?, dim: d },
        KernelKind::DeltaHcVp => KernelId::DeltaHcVp { r: need_r()?, dim: d },
    })
}
