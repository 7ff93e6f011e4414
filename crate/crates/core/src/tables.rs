//! Bundled code tables and a verifier that recomputes their columns.

use std::fmt;

use rayon::prelude::*;

use crate::distance::{bdp, griesmer_bound, Shortening};
use crate::error::{Error, Result};
use crate::polymat::GeneratorMatrix;
use crate::spectrum::{spectra, Spectrum128, TABLE_TERMS};

pub const CODES: &str = include_str!("../data/codes.txt");
pub const FREE_DISTANCES: &str = include_str!("../data/free_distances.txt");
pub const SIMULATION_CODES: &str = include_str!("../data/simulation_codes.txt");
pub const FER_CROSSINGS: &str = include_str!("../data/fer_crossings.txt");
pub const AVERAGE_COMPLEXITY: &str = include_str!("../data/avg_complexity.txt");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Optimum bidirectional column distance function.
    Obcdf,
    /// Improved optimum bidirectional distance profile `BDP^(s)`.
    Obdp(usize),
}

impl Family {
    pub fn shortening(self) -> Shortening {
        match self {
            Family::Obcdf => Shortening::Unbounded,
            Family::Obdp(s) => Shortening::By(s),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Obcdf => f.write_str("OBCDF"),
            Family::Obdp(s) => write!(f, "OBDP({s})"),
        }
    }
}

/// One generator from the code tables with its listed columns.
#[derive(Clone, Debug)]
pub struct CodeRow {
    pub line: usize,
    pub family: Family,
    pub code: GeneratorMatrix,
    pub bdp: Vec<u32>,
    pub spectrum: Spectrum128,
}

/// One row of a free-distance table: the Griesmer bound and the free
/// distances of the listed codes by shortening.
#[derive(Clone, Debug)]
pub struct FreeDistanceRow {
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub griesmer: u64,
    pub entries: Vec<(Shortening, u32)>,
}

#[derive(Clone, Debug)]
pub struct SimulationCode {
    pub name: String,
    pub code: GeneratorMatrix,
    pub d_free: u32,
}

/// Viterbi and bidirectional stack decoders reaching the same FER.
#[derive(Clone, Debug)]
pub struct FerCrossing {
    pub viterbi_code: String,
    pub bistack_code: String,
    pub snr_db: f64,
    pub fer: f64,
    pub log2_max_nodes: u32,
}

/// Average extended nodes at one SNR: stack decoder lower bound on the ODP
/// code and bidirectional stack decoder on the ODP and OBDP codes.
#[derive(Clone, Debug)]
pub struct AverageComplexity {
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub snr_db: f64,
    pub stack_odp_lower: f64,
    pub bistack_odp: f64,
    pub bistack_obdp: f64,
}

fn syntax(line: &str, reason: impl Into<String>) -> Error {
    Error::Syntax {
        line: line.to_string(),
        reason: reason.into(),
    }
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Header fields `key=value` after `@table NAME`.
fn header<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    line.split_whitespace()
        .find_map(|f| f.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
}

fn rate(line: &str) -> Result<(usize, usize)> {
    let r = header(line, "R").ok_or_else(|| syntax(line, "missing rate"))?;
    let (k, n) = r.split_once('/').ok_or_else(|| syntax(line, "bad rate"))?;
    Ok((
        k.parse().map_err(|_| syntax(line, "bad rate"))?,
        n.parse().map_err(|_| syntax(line, "bad rate"))?,
    ))
}

fn field<'a>(line: &'a str, key: &str) -> Result<&'a str> {
    line.split(';')
        .skip(1)
        .find_map(|f| f.trim().strip_prefix(key).and_then(|v| v.strip_prefix('=')))
        .ok_or_else(|| syntax(line, format!("missing {key}")))
}

fn numbers<T: std::str::FromStr>(line: &str, list: &str) -> Result<Vec<T>> {
    list.split(',')
        .map(|x| x.trim().parse().map_err(|_| syntax(line, "bad number")))
        .collect()
}

pub fn parse_code_rows(text: &str) -> Result<Vec<CodeRow>> {
    let mut family = None;
    let mut rows = Vec::new();
    for (no, line) in content_lines(text) {
        if line.starts_with('@') {
            let s = header(line, "s").ok_or_else(|| syntax(line, "missing s"))?;
            family = Some(match s {
                "-inf" => Family::Obcdf,
                v => Family::Obdp(v.parse().map_err(|_| syntax(line, "bad s"))?),
            });
            continue;
        }
        let family = family.ok_or_else(|| syntax(line, "row before any @table header"))?;
        let code: GeneratorMatrix = line.parse()?;
        let bdp = numbers(line, field(line, "bdp")?)?;
        if bdp.len() != code.m() + 1 {
            return Err(syntax(line, "profile length is not m + 1"));
        }
        let spectrum = Spectrum128 {
            d_free: field(line, "dfree")?
                .parse()
                .map_err(|_| syntax(line, "bad dfree"))?,
            a: numbers(line, field(line, "a")?)?,
            c: numbers(line, field(line, "c")?)?,
        };
        rows.push(CodeRow {
            line: no,
            family,
            code,
            bdp,
            spectrum,
        });
    }
    Ok(rows)
}

pub fn parse_free_distances(text: &str) -> Result<Vec<FreeDistanceRow>> {
    let mut dims = None;
    let mut rows = Vec::new();
    for (_, line) in content_lines(text) {
        if line.starts_with('@') {
            dims = Some(rate(line)?);
            continue;
        }
        let (k, n) = dims.ok_or_else(|| syntax(line, "row before any @table header"))?;
        let parts: Vec<&str> = line.split(';').map(str::trim).collect();
        let [m, dg, entries] = parts[..] else {
            return Err(syntax(line, "expected 'm ; dG=.. ; s:d ..'"));
        };
        let griesmer = dg
            .strip_prefix("dG=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| syntax(line, "bad dG"))?;
        let entries = entries
            .split_whitespace()
            .map(|e| {
                let (s, d) = e.rsplit_once(':').ok_or_else(|| syntax(line, "bad entry"))?;
                Ok((s.parse()?, d.parse().map_err(|_| syntax(line, "bad entry"))?))
            })
            .collect::<Result<_>>()?;
        rows.push(FreeDistanceRow {
            k,
            n,
            m: m.parse().map_err(|_| syntax(line, "bad m"))?,
            griesmer,
            entries,
        });
    }
    Ok(rows)
}

pub fn parse_simulation_codes(text: &str) -> Result<Vec<SimulationCode>> {
    content_lines(text)
        .map(|(_, line)| {
            let parts: Vec<&str> = line.split(';').map(str::trim).collect();
            let [name, code, d] = parts[..] else {
                return Err(syntax(line, "expected 'name ; code ; dfree=..'"));
            };
            Ok(SimulationCode {
                name: name.to_string(),
                code: code.parse()?,
                d_free: d
                    .strip_prefix("dfree=")
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| syntax(line, "bad dfree"))?,
            })
        })
        .collect()
}

pub fn parse_fer_crossings(text: &str) -> Result<Vec<FerCrossing>> {
    content_lines(text)
        .map(|(_, line)| {
            let parts: Vec<&str> = line.split(';').map(str::trim).collect();
            let [va, bsa, snr, fer, log2m] = parts[..] else {
                return Err(syntax(line, "expected five fields"));
            };
            let bad = || syntax(line, "bad number");
            Ok(FerCrossing {
                viterbi_code: va.to_string(),
                bistack_code: bsa.to_string(),
                snr_db: snr.parse().map_err(|_| bad())?,
                fer: fer.parse().map_err(|_| bad())?,
                log2_max_nodes: log2m.parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

pub fn parse_average_complexity(text: &str) -> Result<Vec<AverageComplexity>> {
    let mut dims = None;
    let mut rows = Vec::new();
    for (_, line) in content_lines(text) {
        if line.starts_with('@') {
            let (k, n) = rate(line)?;
            let m = header(line, "m")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| syntax(line, "missing m"))?;
            dims = Some((k, n, m));
            continue;
        }
        let (k, n, m) = dims.ok_or_else(|| syntax(line, "row before any @table header"))?;
        let v: Vec<f64> = line
            .split(';')
            .map(|x| x.trim().parse().map_err(|_| syntax(line, "bad number")))
            .collect::<Result<_>>()?;
        let [snr_db, stack_odp_lower, bistack_odp, bistack_obdp] = v[..] else {
            return Err(syntax(line, "expected four fields"));
        };
        rows.push(AverageComplexity {
            k,
            n,
            m,
            snr_db,
            stack_odp_lower,
            bistack_odp,
            bistack_obdp,
        });
    }
    Ok(rows)
}

pub fn code_rows() -> Vec<CodeRow> {
    parse_code_rows(CODES).expect("bundled code table parses")
}

pub fn free_distance_rows() -> Vec<FreeDistanceRow> {
    parse_free_distances(FREE_DISTANCES).expect("bundled free-distance table parses")
}

pub fn simulation_codes() -> Vec<SimulationCode> {
    parse_simulation_codes(SIMULATION_CODES).expect("bundled simulation codes parse")
}

/// Looks up a simulation code by its table name, e.g. `C_1/2,6^ODS`.
pub fn simulation_code(name: &str) -> Option<GeneratorMatrix> {
    simulation_codes()
        .into_iter()
        .find(|c| c.name == name)
        .map(|c| c.code)
}

pub fn fer_crossings() -> Vec<FerCrossing> {
    parse_fer_crossings(FER_CROSSINGS).expect("bundled crossing table parses")
}

pub fn average_complexity() -> Vec<AverageComplexity> {
    parse_average_complexity(AVERAGE_COMPLEXITY).expect("bundled complexity table parses")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    Pass,
    Fail(String),
    Skipped,
}

impl Check {
    fn compare<T: PartialEq + fmt::Debug>(expected: &T, got: &T) -> Self {
        if expected == got {
            Check::Pass
        } else {
            Check::Fail(format!("expected {expected:?}, computed {got:?}"))
        }
    }

    pub fn failed(&self) -> bool {
        matches!(self, Check::Fail(_))
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Check::Pass => f.write_str("pass"),
            Check::Fail(why) => write!(f, "FAIL ({why})"),
            Check::Skipped => f.write_str("skipped"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RowReport {
    pub line: usize,
    pub code: GeneratorMatrix,
    pub family: Family,
    pub bdp: Check,
    pub d_free: Check,
    pub spectrum: Check,
}

impl RowReport {
    pub fn failed(&self) -> bool {
        self.bdp.failed() || self.d_free.failed() || self.spectrum.failed()
    }
}

impl fmt::Display for RowReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {} {} [{}] bdp={} dfree={} spectrum={}",
            self.line, self.family, self.code, self.bdp, self.d_free, self.spectrum
        )
    }
}

/// Which rows get the expensive free-distance and spectrum checks.
#[derive(Clone, Copy, Debug)]
pub struct VerifyLimits {
    /// Largest memory checked at rates `1/n`.
    pub max_m_unit_rate: usize,
    /// Largest memory checked at rates `k/n` with `k > 1`.
    pub max_m_multi_input: usize,
}

impl Default for VerifyLimits {
    fn default() -> Self {
        Self {
            max_m_unit_rate: 13,
            max_m_multi_input: 9,
        }
    }
}

impl VerifyLimits {
    pub fn covers(&self, g: &GeneratorMatrix) -> bool {
        let limit = if g.k() == 1 {
            self.max_m_unit_rate
        } else {
            self.max_m_multi_input
        };
        g.m() <= limit
    }
}

/// Recomputes the profile of every row and, within `limits`, its free
/// distance and 16 spectrum terms.
pub fn verify_row(row: &CodeRow, limits: VerifyLimits) -> RowReport {
    let bdp_check = match bdp(&row.code, 0) {
        Ok(p) => Check::compare(&row.bdp, &p.values),
        Err(e) => Check::Fail(e.to_string()),
    };
    let (d_free, spectrum) = if limits.covers(&row.code) {
        match spectra::<u128>(&row.code, TABLE_TERMS) {
            Ok(s) => (
                Check::compare(&row.spectrum.d_free, &s.d_free),
                Check::compare(&(&row.spectrum.a, &row.spectrum.c), &(&s.a, &s.c)),
            ),
            Err(e) => (Check::Fail(e.to_string()), Check::Fail(e.to_string())),
        }
    } else {
        (Check::Skipped, Check::Skipped)
    };
    RowReport {
        line: row.line,
        code: row.code.clone(),
        family: row.family,
        bdp: bdp_check,
        d_free,
        spectrum,
    }
}

/// Verifies all rows in parallel, returning reports in table order.
pub fn verify_all(rows: &[CodeRow], limits: VerifyLimits) -> Vec<RowReport> {
    rows.par_iter().map(|r| verify_row(r, limits)).collect()
}

/// Recomputes the Griesmer column of a free-distance row.
pub fn verify_griesmer(row: &FreeDistanceRow) -> Check {
    Check::compare(&row.griesmer, &griesmer_bound(row.k, row.n, row.m))
}
