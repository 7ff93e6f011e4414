//! Monte-Carlo simulation of decoders on the binary-input AWGN channel.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::decode::{
    bistack_decode, stack_decode, viterbi, BistackConfig, DecodeOutcome, Direction, MergeScope, Schedule,
    SoftFrame,
};
use crate::error::{Error, Result};
use crate::polymat::GeneratorMatrix;
use crate::tables;
use crate::trellis::Encoder;

/// How the energy per information bit is counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EnergyConvention {
    /// All transmitted symbols, termination included, over the `K`
    /// information bits: `E_b = (K/k + m) n / K`.
    #[default]
    Terminated,
    /// Code rate only: `E_b = n / k`.
    Rate,
}

/// Noise standard deviation for unit-energy bipolar symbols at
/// `E_b/N_0 = snr_db`, with `N_0 = 2 sigma^2`.
pub fn sigma_from_snr(
    snr_db: f64,
    info_len: usize,
    k: usize,
    n: usize,
    m: usize,
    convention: EnergyConvention,
) -> f64 {
    let eb = match convention {
        EnergyConvention::Terminated => ((info_len / k + m) * n) as f64 / info_len as f64,
        EnergyConvention::Rate => n as f64 / k as f64,
    };
    let n0 = eb / 10f64.powf(snr_db / 10.0);
    (n0 / 2.0).sqrt()
}

/// Bipolar mapping `0 -> +1, 1 -> -1` plus Gaussian noise.
pub fn transmit<F, R>(code_bits: &[u8], sigma: F, rng: &mut R) -> Vec<F>
where
    F: Float,
    R: Rng + ?Sized,
    StandardNormal: Distribution<F>,
{
    code_bits
        .iter()
        .map(|&b| {
            let x = if b == 0 { F::one() } else { -F::one() };
            let z: F = StandardNormal.sample(rng);
            x + sigma * z
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecoderKind {
    Viterbi,
    Stack { max_nodes: u64 },
    Bistack(BistackConfig),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub code: GeneratorMatrix,
    pub decoder: DecoderKind,
    pub snr_db: Vec<f64>,
    /// Information bits per frame, `K`.
    pub info_len: usize,
    pub max_frames: u64,
    /// Stop a point once this many frame errors are seen.
    pub target_errors: u64,
    pub seed: u64,
    pub energy: EnergyConvention,
    /// Frames decoded in parallel between stopping checks.
    pub chunk: u64,
}

impl SimConfig {
    pub fn new(code: GeneratorMatrix, decoder: DecoderKind, snr_db: Vec<f64>) -> Self {
        Self {
            code,
            decoder,
            snr_db,
            info_len: 224,
            max_frames: 100_000,
            target_errors: 200,
            seed: 1,
            energy: EnergyConvention::Terminated,
            chunk: 256,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |why: String| Err(Error::Config(why));
        if self.info_len == 0 || !self.info_len.is_multiple_of(self.code.k()) {
            return bad(format!(
                "{} information bits do not split into blocks of {}",
                self.info_len,
                self.code.k()
            ));
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) || self.snr_db.is_empty() {
            return bad("at least one finite SNR is needed".into());
        }
        if self.max_frames == 0 || self.chunk == 0 {
            return bad("frame budget and chunk size must be positive".into());
        }
        match self.decoder {
            DecoderKind::Stack { max_nodes: 0 } => bad("tree-size cap must be positive".into()),
            DecoderKind::Bistack(c) if c.max_nodes < 2 => {
                bad("the bidirectional decoder needs a cap of at least 2".into())
            }
            _ => Ok(()),
        }
    }

    /// Reads `key = value` lines; `#` starts a comment. Keys: `code` (a
    /// code line or a simulation-table name), `decoder` (`va`, `sa`, `bsa`),
    /// `max_nodes` or `log2_max_nodes`, `snr_db` (comma list), `info_bits`,
    /// `max_frames`, `target_errors`, `seed`, `energy` (`terminated` or
    /// `rate`), `schedule` (`larger-top` or `alternate`), `merge`
    /// (`inserted` or `extended`), `first` (`forward` or `backward`), `chunk`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = BTreeMap::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key = value, got {line:?}")))?;
            kv.insert(key.trim().to_string(), value.trim().to_string());
        }
        let take = |key: &str| kv.get(key).map(String::as_str);
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::Config(format!("bad value {v:?} for {key}")))
        }
        for key in kv.keys() {
            const KNOWN: [&str; 14] = [
                "code", "decoder", "max_nodes", "log2_max_nodes", "snr_db", "info_bits",
                "max_frames", "target_errors", "seed", "energy", "schedule", "merge", "first",
                "chunk",
            ];
            if !KNOWN.contains(&key.as_str()) {
                return Err(Error::Config(format!("unknown key {key:?}")));
            }
        }
        let code_text = take("code").ok_or_else(|| Error::Config("missing code".into()))?;
        let code = if code_text.contains(':') {
            code_text.parse()?
        } else {
            tables::simulation_code(code_text)
                .ok_or_else(|| Error::Config(format!("unknown code name {code_text:?}")))?
        };
        let max_nodes = match (take("max_nodes"), take("log2_max_nodes")) {
            (Some(v), _) => num("max_nodes", v)?,
            (None, Some(v)) => 1u64 << num::<u32>("log2_max_nodes", v)?.min(62),
            (None, None) => 1 << 20,
        };
        let schedule = match take("schedule").unwrap_or("larger-top") {
            "larger-top" => Schedule::LargerTop,
            "alternate" => Schedule::Alternate,
            v => return Err(Error::Config(format!("unknown schedule {v:?}"))),
        };
        let merge = match take("merge").unwrap_or("inserted") {
            "inserted" => MergeScope::Inserted,
            "extended" => MergeScope::Extended,
            v => return Err(Error::Config(format!("unknown merge scope {v:?}"))),
        };
        let first = match take("first").unwrap_or("forward") {
            "forward" => Direction::Forward,
            "backward" => Direction::Backward,
            v => return Err(Error::Config(format!("unknown first tree {v:?}"))),
        };
        let decoder = match take("decoder").unwrap_or("bsa") {
            "va" | "viterbi" => DecoderKind::Viterbi,
            "sa" | "stack" => DecoderKind::Stack { max_nodes },
            "bsa" | "bistack" => DecoderKind::Bistack(BistackConfig {
                max_nodes,
                schedule,
                merge,
                first,
            }),
            v => return Err(Error::Config(format!("unknown decoder {v:?}"))),
        };
        let snr_db = take("snr_db")
            .ok_or_else(|| Error::Config("missing snr_db".into()))?
            .split(',')
            .map(|s| num("snr_db", s.trim()))
            .collect::<Result<Vec<f64>>>()?;
        let mut cfg = SimConfig::new(code, decoder, snr_db);
        if let Some(v) = take("info_bits") {
            cfg.info_len = num("info_bits", v)?;
        }
        if let Some(v) = take("max_frames") {
            cfg.max_frames = num("max_frames", v)?;
        }
        if let Some(v) = take("target_errors") {
            cfg.target_errors = num("target_errors", v)?;
        }
        if let Some(v) = take("seed") {
            cfg.seed = num("seed", v)?;
        }
        if let Some(v) = take("chunk") {
            cfg.chunk = num("chunk", v)?;
        }
        cfg.energy = match take("energy").unwrap_or("terminated") {
            "terminated" => EnergyConvention::Terminated,
            "rate" => EnergyConvention::Rate,
            v => return Err(Error::Config(format!("unknown energy convention {v:?}"))),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Results at one SNR.
#[derive(Clone, Debug, PartialEq)]
pub struct PointReport {
    pub snr_db: f64,
    pub sigma: f64,
    pub frames: u64,
    /// Decoder failures plus wrong decisions.
    pub errors: u64,
    /// Frames where the tree-size cap was hit.
    pub failures: u64,
    /// Extended-node counts of correctly decoded frames.
    pub correct_x: BTreeMap<u64, u64>,
    /// Extended-node counts at which failed frames were stopped.
    pub truncated_x: BTreeMap<u64, u64>,
}

impl PointReport {
    pub fn fer(&self) -> f64 {
        if self.frames == 0 {
            0.0
        } else {
            self.errors as f64 / self.frames as f64
        }
    }

    /// 95% Wilson score interval of the FER.
    pub fn fer_interval(&self) -> (f64, f64) {
        wilson_interval(self.errors, self.frames, 1.959_963_984_540_054)
    }

    /// Mean extended nodes over correctly decoded frames.
    pub fn mean_x(&self) -> f64 {
        let (n, sum) = self
            .correct_x
            .iter()
            .fold((0u64, 0f64), |(n, s), (&x, &c)| (n + c, s + (x * c) as f64));
        if n == 0 {
            f64::NAN
        } else {
            sum / n as f64
        }
    }

    /// Mean extended nodes with stopped frames counted at their stopping
    /// point. Stopped frames would have needed at least that many, so this
    /// is a lower bound on the mean over all frames that are not decoded
    /// wrongly.
    pub fn mean_x_censored(&self) -> f64 {
        let (n, sum) = self
            .correct_x
            .iter()
            .chain(&self.truncated_x)
            .fold((0u64, 0f64), |(n, s), (&x, &c)| (n + c, s + (x * c) as f64));
        if n == 0 {
            f64::NAN
        } else {
            sum / n as f64
        }
    }

    /// `(x, lower, upper)` bounds on `P[X >= x]` at every observed `x`. The
    /// lower bound treats stopped frames as never finishing correctly, the
    /// upper bound as finishing right where they were stopped; both are
    /// normalized by the frames that were not decoded wrongly.
    pub fn tail(&self) -> Vec<(u64, f64, f64)> {
        let total: u64 = self.correct_x.values().chain(self.truncated_x.values()).sum();
        if total == 0 {
            return Vec::new();
        }
        let xs: Vec<u64> = {
            let mut v: Vec<u64> = self.correct_x.keys().chain(self.truncated_x.keys()).copied().collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let at_least = |h: &BTreeMap<u64, u64>, x: u64| -> u64 { h.range(x..).map(|(_, c)| c).sum() };
        xs.into_iter()
            .map(|x| {
                let lo = at_least(&self.correct_x, x);
                let hi = lo + at_least(&self.truncated_x, x);
                (x, lo as f64 / total as f64, hi as f64 / total as f64)
            })
            .collect()
    }

    fn absorb(&mut self, f: &FrameResult) {
        self.frames += 1;
        if f.failed {
            self.failures += 1;
            self.errors += 1;
            *self.truncated_x.entry(f.extended).or_default() += 1;
        } else if !f.correct {
            self.errors += 1;
        } else {
            *self.correct_x.entry(f.extended).or_default() += 1;
        }
    }
}

pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimReport {
    pub points: Vec<PointReport>,
}

impl SimReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("snr_db,frames,errors,failures,fer,fer_lo,fer_hi,mean_X\n");
        for p in &self.points {
            let (lo, hi) = p.fer_interval();
            let _ = writeln!(
                out,
                "{},{},{},{},{:.6e},{:.6e},{:.6e},{}",
                p.snr_db,
                p.frames,
                p.errors,
                p.failures,
                p.fer(),
                lo,
                hi,
                p.mean_x()
            );
        }
        out
    }

    /// Complexity tail of one point as CSV (`x,p_lb,p_ub`).
    pub fn tail_csv(point: &PointReport) -> String {
        let mut out = String::from("x,p_lb,p_ub\n");
        for (x, lo, hi) in point.tail() {
            let _ = writeln!(out, "{x},{lo:.6e},{hi:.6e}");
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
struct FrameResult {
    failed: bool,
    correct: bool,
    extended: u64,
}

/// Random number stream of one frame: the seed picks the key, the SNR
/// point and frame number pick the stream, so results do not depend on
/// scheduling.
pub fn frame_rng(seed: u64, point: usize, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((point as u64) << 40) ^ frame);
    rng
}

fn decode_one<F: Float>(cfg: &SimConfig, frame: &SoftFrame<F>) -> Result<DecodeOutcome<F>> {
    match cfg.decoder {
        DecoderKind::Viterbi => viterbi(&cfg.code, frame),
        DecoderKind::Stack { max_nodes } => stack_decode(&cfg.code, frame, max_nodes),
        DecoderKind::Bistack(b) => bistack_decode(&cfg.code, frame, &b),
    }
}

fn run_frame<F>(cfg: &SimConfig, enc: &Encoder, sigma: F, point: usize, index: u64) -> Result<FrameResult>
where
    F: Float,
    StandardNormal: Distribution<F>,
{
    let mut rng = frame_rng(cfg.seed, point, index);
    let info: Vec<u8> = (0..cfg.info_len).map(|_| rng.random_range(0..2u8)).collect();
    let code_bits = enc.encode(&info)?.code_bits;
    let r = transmit(&code_bits, sigma, &mut rng);
    let out = decode_one(cfg, &SoftFrame { r, sigma, info_len: cfg.info_len })?;
    Ok(FrameResult {
        failed: out.failed,
        correct: out.info_bits.as_deref() == Some(&info[..]),
        extended: out.extended,
    })
}

/// Runs every SNR point of `cfg` with scalar type `F` for the channel and
/// the decoder metrics.
pub fn run<F>(cfg: &SimConfig) -> Result<SimReport>
where
    F: Float + Send + Sync,
    StandardNormal: Distribution<F>,
{
    cfg.validate()?;
    let enc = Encoder::new(&cfg.code)?;
    let mut points = Vec::with_capacity(cfg.snr_db.len());
    for (pi, &snr) in cfg.snr_db.iter().enumerate() {
        let sigma = sigma_from_snr(snr, cfg.info_len, cfg.code.k(), cfg.code.n(), cfg.code.m(), cfg.energy);
        let sigma_f = F::from(sigma).ok_or_else(|| Error::Config("sigma not representable".into()))?;
        let mut report = PointReport {
            snr_db: snr,
            sigma,
            frames: 0,
            errors: 0,
            failures: 0,
            correct_x: BTreeMap::new(),
            truncated_x: BTreeMap::new(),
        };
        while report.frames < cfg.max_frames && report.errors < cfg.target_errors {
            let start = report.frames;
            let end = (start + cfg.chunk).min(cfg.max_frames);
            let results = (start..end)
                .into_par_iter()
                .map(|i| run_frame(cfg, &enc, sigma_f, pi, i))
                .collect::<Result<Vec<_>>>()?;
            for r in &results {
                report.absorb(r);
            }
        }
        points.push(report);
    }
    Ok(SimReport { points })
}
