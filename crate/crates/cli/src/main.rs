use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use obdp_core::decode::{bistack_decode, stack_decode, viterbi};
use obdp_core::distance::{bdp, cdf, griesmer_bound};
use obdp_core::search::{search, EvenMode, SearchConfig};
use obdp_core::spectrum::spectra;
use obdp_core::tables::{self, VerifyLimits};
use obdp_core::{BistackConfig, GeneratorMatrix, Shortening, SimConfig, SimReport, SoftFrame64};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "obdp", version, about = "Convolutional code profiles, search and decoding")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a distance profile as comma-separated values.
    Profile {
        /// Code line, e.g. "1 2 2 : 5 7".
        #[arg(long)]
        code: String,
        /// Column distance function of the reverse code.
        #[arg(long, conflicts_with = "bdp")]
        reverse: bool,
        /// Bidirectional distance profile.
        #[arg(long)]
        bdp: bool,
        /// Last index; defaults to m (profiles) or 2m (column distances).
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Print the free distance and the first distance spectrum terms.
    Spectrum {
        #[arg(long)]
        code: String,
        #[arg(long, default_value_t = 16)]
        terms: usize,
    },
    /// Print the Griesmer bound on the free distance.
    Bound {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Search for codes with an optimum bidirectional profile.
    Search {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Shortening: a non-negative integer, or "-inf" for the column
        /// distance criterion.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        s: Shortening,
        #[arg(long, value_enum, default_value_t = Mode::Accelerated)]
        mode: Mode,
        /// Spectrum terms used to pick the best members.
        #[arg(long, default_value_t = 16)]
        terms: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode one received frame read as whitespace-separated reals.
    Decode {
        #[arg(long)]
        code: String,
        #[arg(long, value_enum, default_value_t = DecoderArg::Bsa)]
        decoder: DecoderArg,
        /// Noise standard deviation assumed by the sequential decoders.
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Tree size cap of the sequential decoders.
        #[arg(long, default_value_t = 1 << 20)]
        max_nodes: u64,
        /// Input file; standard input when absent or "-".
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Run a Monte-Carlo simulation described by a key=value file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for report.csv and the complexity tails.
        #[arg(long)]
        out: PathBuf,
    },
    /// Recompute the checkable columns of the bundled code tables.
    VerifyTables {
        /// Largest memory whose spectrum is checked at rates 1/n.
        #[arg(long, default_value_t = 13)]
        max_spectrum_m: usize,
        /// Largest memory whose spectrum is checked at rates k/n, k > 1.
        #[arg(long, default_value_t = 9)]
        max_spectrum_m_multi: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Full,
    Accelerated,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecoderArg {
    Va,
    Sa,
    Bsa,
}

enum Failure {
    Usage(String),
    Verification,
}

impl From<obdp_core::Error> for Failure {
    fn from(e: obdp_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Verification) => ExitCode::from(EXIT_FAIL),
    }
}

fn parse_code(text: &str) -> Result<GeneratorMatrix, Failure> {
    Ok(text.parse()?)
}

/// Writes everything at once so a failing command leaves no partial output.
fn emit(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Profile { code, reverse, bdp: bidirectional, depth } => {
            let g = parse_code(&code)?;
            let m = g.m();
            let profile = if bidirectional {
                let d = depth.unwrap_or(m);
                if d > m {
                    return Err(Failure::Usage(format!("profile depth {d} exceeds memory {m}")));
                }
                bdp(&g, m - d)?
            } else {
                let g = if reverse { g.reverse() } else { g };
                cdf(&g, depth.unwrap_or(2 * m))?
            };
            emit(&format!("{}\n", profile.to_csv()))
        }
        Command::Spectrum { code, terms } => {
            let g = parse_code(&code)?;
            if terms == 0 {
                return Err(Failure::Usage("--terms must be positive".into()));
            }
            let s = spectra::<u128>(&g, terms)?;
            emit(&format!("{s}\n"))
        }
        Command::Bound { k, n, m } => {
            if k == 0 || n <= k {
                return Err(Failure::Usage(format!("need 0 < k < n, got k={k} n={n}")));
            }
            emit(&format!("{}\n", griesmer_bound(k, n, m)))
        }
        Command::Search { k, n, m, s, mode, terms, out } => {
            let cfg = SearchConfig {
                spectrum_terms: terms,
                even_mode: match mode {
                    Mode::Full => EvenMode::Full,
                    Mode::Accelerated => EvenMode::Accelerated,
                },
                ..SearchConfig::default()
            };
            let (set, best) = search::<u128>(k, n, m, s, &cfg)?;
            let annotated = set
                .members
                .par_iter()
                .map(|g| Ok((g, spectra::<u128>(g, terms)?)))
                .collect::<obdp_core::Result<Vec<_>>>()?;
            let mut text = String::new();
            let _ = writeln!(text, "# k={k} n={n} m={m} s={s} members={}", set.len());
            for (g, spec) in annotated {
                let tag = if best.iter().any(|(b, _)| b == g) { " best" } else { "" };
                let _ = writeln!(
                    text,
                    "{g} # profile={} dfree={} spectrum={spec}{tag}",
                    set.profile.to_csv(),
                    spec.d_free
                );
            }
            match out {
                Some(path) => Ok(fs::write(path, text)?),
                None => emit(&text),
            }
        }
        Command::Decode { code, decoder, sigma, max_nodes, input } => {
            let g = parse_code(&code)?;
            if sigma.is_nan() || sigma <= 0.0 {
                return Err(Failure::Usage("--sigma must be positive".into()));
            }
            let mut raw = String::new();
            match input.as_deref() {
                Some(p) if p.as_os_str() != "-" => raw = fs::read_to_string(p)?,
                _ => {
                    io::stdin().read_to_string(&mut raw)?;
                }
            }
            let r = raw
                .split_whitespace()
                .map(|w| w.parse::<f64>().map_err(|_| Failure::Usage(format!("bad value {w:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let blocks = r.len() / g.n();
            if blocks < g.m() || r.len() % g.n() != 0 {
                return Err(Failure::Usage(format!(
                    "{} values do not form a terminated frame of this code",
                    r.len()
                )));
            }
            let frame = SoftFrame64::new(r, sigma, (blocks - g.m()) * g.k(), &g)?;
            let outcome = match decoder {
                DecoderArg::Va => viterbi(&g, &frame)?,
                DecoderArg::Sa => stack_decode(&g, &frame, max_nodes)?,
                DecoderArg::Bsa => bistack_decode(&g, &frame, &BistackConfig::new(max_nodes))?,
            };
            let bits = match &outcome.info_bits {
                Some(b) => b.iter().map(|&x| char::from(b'0' + x)).collect(),
                None => "failure".to_string(),
            };
            emit(&format!(
                "{bits}\ninserted={} extended={}\n",
                outcome.inserted, outcome.extended
            ))
        }
        Command::Simulate { config, seed, out } => {
            let mut cfg = SimConfig::parse(&fs::read_to_string(&config)?)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let report = obdp_core::simulate::run::<f64>(&cfg)?;
            fs::create_dir_all(&out)?;
            fs::write(out.join("report.csv"), report.to_csv())?;
            for p in &report.points {
                fs::write(out.join(format!("tail_{}.csv", p.snr_db)), SimReport::tail_csv(p))?;
            }
            emit(&report.to_csv())
        }
        Command::VerifyTables { max_spectrum_m, max_spectrum_m_multi } => {
            let limits = VerifyLimits {
                max_m_unit_rate: max_spectrum_m,
                max_m_multi_input: max_spectrum_m_multi,
            };
            let reports = tables::verify_all(&tables::code_rows(), limits);
            let mut text = String::new();
            let mut failed = 0usize;
            for r in &reports {
                failed += usize::from(r.failed());
                let _ = writeln!(text, "{r}");
            }
            for row in tables::free_distance_rows() {
                let check = tables::verify_griesmer(&row);
                failed += usize::from(check.failed());
                let _ = writeln!(text, "griesmer k={} n={} m={} {check}", row.k, row.n, row.m);
            }
            emit(&text)?;
            eprintln!("{failed} failing rows");
            if failed == 0 {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
    }
}
