//! BPSK-AWGN Monte-Carlo simulation of QSPA decoding.
//!
//! Every frame draws its noise (and message) from its own ChaCha stream,
//! keyed by the campaign seed, the SNR value and the frame index, so results
//! do not depend on the worker count or on the order of SNR points.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use nbqc_core::codec::{QspaDecoder, SparseGfMatrix, SystematicEncoder};
use nbqc_core::gf2m::{FieldDesc, GfElem};

use crate::Error;

/// Frames decoded per parallel batch. Fixed, so stopping points never depend
/// on the thread pool.
const BATCH: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transmission {
    AllZero,
    RandomMessage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Eb/N0 points in dB; `f64::INFINITY` means noiseless.
    pub snr_db: Vec<f64>,
    pub max_frames: u64,
    pub min_block_errors: u64,
    pub max_iters: usize,
    pub seed: u64,
    pub mode: Transmission,
}

impl SimConfig {
    pub fn new(snr_db: Vec<f64>, seed: u64) -> Self {
        SimConfig { snr_db, max_frames: 100_000, min_block_errors: 100, max_iters: 80, seed, mode: Transmission::AllZero }
    }

    fn validate(&self) -> Result<(), Error> {
        if self.snr_db.is_empty() {
            return Err(Error::Input("at least one SNR point is required".into()));
        }
        if self.snr_db.iter().any(|s| s.is_nan() || *s == f64::NEG_INFINITY) {
            return Err(Error::Input("SNR points must be numbers or +inf".into()));
        }
        if self.min_block_errors == 0 || self.max_frames == 0 || self.max_iters == 0 {
            return Err(Error::Input("min_block_errors, max_frames and max_iters must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimPoint {
    pub snr_db: f64,
    pub frames: u64,
    pub block_errors: u64,
    pub bit_errors: u64,
    pub symbol_errors: u64,
    pub bler: f64,
    pub ber: f64,
    pub mean_iters: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub points: Vec<SimPoint>,
    pub code_digest: String,
    pub seed: u64,
}

/// Noise standard deviation for BPSK at `ebn0_db` and code rate `rate`.
pub fn noise_sigma(ebn0_db: f64, rate: f64) -> f64 {
    if ebn0_db == f64::INFINITY {
        return 0.0;
    }
    (1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))).sqrt()
}

/// Bit `j` of symbol `a` (little-endian polynomial basis) mapped to +-1.
#[inline]
fn bpsk(a: u32, j: u32) -> f64 {
    if (a >> j) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Symbol probabilities from the received samples, `r` per symbol.
/// `sigma == 0` yields point masses on the hard decisions of the samples.
pub fn priors_from_samples(samples: &[f64], sigma: f64, field: &FieldDesc) -> Vec<f64> {
    let r = field.r() as usize;
    let q = field.q() as usize;
    let mut out = vec![0.0; samples.len() / r * q];
    for (y, p) in samples.chunks_exact(r).zip(out.chunks_exact_mut(q)) {
        if sigma == 0.0 {
            let a: usize = y.iter().enumerate().map(|(j, &v)| usize::from(v < 0.0) << j).sum();
            p[a] = 1.0;
            continue;
        }
        // log p(a) = sum_j y_j s_j(a) / sigma^2 + const
        let inv = 1.0 / (sigma * sigma);
        for (a, slot) in p.iter_mut().enumerate() {
            *slot = y.iter().enumerate().map(|(j, &v)| v * bpsk(a as u32, j as u32)).sum::<f64>() * inv;
        }
        let max = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in p.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in p.iter_mut() {
            *v /= sum;
        }
    }
    out
}

/// Transmits `codeword` over BPSK-AWGN and returns the symbol priors.
pub fn channel_priors<R: Rng>(codeword: &[GfElem], ebn0_db: f64, rate: f64, field: &FieldDesc, rng: &mut R) -> Vec<f64> {
    let sigma = noise_sigma(ebn0_db, rate);
    let r = field.r();
    let mut samples = Vec::with_capacity(codeword.len() * r as usize);
    for &s in codeword {
        for j in 0..r {
            let n: f64 = rng.sample(StandardNormal);
            samples.push(bpsk(s.0 as u32, j) + sigma * n);
        }
    }
    priors_from_samples(&samples, sigma, field)
}

fn point_key(seed: u64, snr_db: f64) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"nbqc-frame");
    h.update(seed.to_le_bytes());
    h.update(snr_db.to_bits().to_le_bytes());
    h.finalize().into()
}

#[derive(Debug, Clone, Copy, Default)]
struct FrameOutcome {
    block_error: bool,
    bit_errors: u64,
    symbol_errors: u64,
    iterations: u64,
}

struct Campaign<'a> {
    decoder: QspaDecoder,
    encoder: Option<SystematicEncoder>,
    field: &'a FieldDesc,
    rate: f64,
    max_iters: usize,
}

impl Campaign<'_> {
    fn frame(&self, key: [u8; 32], snr_db: f64, index: u64) -> FrameOutcome {
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(index);
        let n = self.decoder.matrix().n_cols();
        let codeword = match &self.encoder {
            Some(enc) => {
                let msg: Vec<GfElem> = (0..enc.k()).map(|_| GfElem(rng.random_range(0..self.field.q()) as u8)).collect();
                enc.encode(&msg).expect("message length matches")
            }
            None => vec![GfElem::ZERO; n],
        };
        let priors = channel_priors(&codeword, snr_db, self.rate, self.field, &mut rng);
        let res = self.decoder.decode(&priors, self.max_iters).expect("priors are normalized");
        let mut out = FrameOutcome { iterations: res.iterations_used as u64, ..Default::default() };
        for (a, b) in res.hard_decision.iter().zip(&codeword) {
            let diff = (a.0 ^ b.0).count_ones() as u64;
            out.bit_errors += diff;
            out.symbol_errors += u64::from(diff > 0);
        }
        out.block_error = !res.converged || out.symbol_errors > 0;
        out
    }

    fn point(&self, cfg: &SimConfig, snr_db: f64) -> SimPoint {
        let key = point_key(cfg.seed, snr_db);
        let (mut frames, mut blocks, mut bits, mut symbols, mut iters) = (0u64, 0u64, 0u64, 0u64, 0u64);
        'outer: while frames < cfg.max_frames {
            let end = (frames + BATCH).min(cfg.max_frames);
            let batch: Vec<FrameOutcome> = (frames..end).into_par_iter().map(|i| self.frame(key, snr_db, i)).collect();
            for o in batch {
                frames += 1;
                blocks += u64::from(o.block_error);
                bits += o.bit_errors;
                symbols += o.symbol_errors;
                iters += o.iterations;
                if blocks >= cfg.min_block_errors {
                    break 'outer;
                }
            }
        }
        let n_bits = (self.decoder.matrix().n_cols() as u64 * self.field.r() as u64 * frames) as f64;
        SimPoint {
            snr_db,
            frames,
            block_errors: blocks,
            bit_errors: bits,
            symbol_errors: symbols,
            bler: blocks as f64 / frames as f64,
            ber: bits as f64 / n_bits,
            mean_iters: iters as f64 / frames as f64,
        }
    }
}

/// Runs every SNR point of `cfg` on the code with parity-check matrix `h`.
/// `rate` is used for the Eb/N0 conversion; `code_digest` is recorded.
pub fn run_campaign(h: &SparseGfMatrix, rate: f64, code_digest: &str, cfg: &SimConfig) -> Result<SimResult, Error> {
    cfg.validate()?;
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::Input(format!("code rate {rate} outside (0, 1)")));
    }
    let encoder = match cfg.mode {
        Transmission::AllZero => None,
        Transmission::RandomMessage => Some(SystematicEncoder::new(h)?),
    };
    let campaign = Campaign { decoder: QspaDecoder::new(h), encoder, field: h.field(), rate, max_iters: cfg.max_iters };
    let points = cfg.snr_db.iter().map(|&s| campaign.point(cfg, s)).collect();
    Ok(SimResult { points, code_digest: code_digest.to_string(), seed: cfg.seed })
}

fn fmt_f64(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else {
        format!("{x}")
    }
}

pub fn to_csv(result: &SimResult) -> String {
    let mut out = String::from("snr_db,frames,block_errors,bler,bit_errors,ber,mean_iters\n");
    for p in &result.points {
        writeln!(
            out,
            "{},{},{},{:.6e},{},{:.6e},{:.4}",
            fmt_f64(p.snr_db),
            p.frames,
            p.block_errors,
            p.bler,
            p.bit_errors,
            p.ber,
            p.mean_iters
        )
        .unwrap();
    }
    out
}

#[derive(Serialize)]
struct Sidecar<'a> {
    config: SidecarConfig<'a>,
    code_digest: &'a str,
    rate: f64,
    points: Vec<SidecarPoint>,
    version: &'a str,
}

#[derive(Serialize)]
struct SidecarConfig<'a> {
    snr_db: Vec<String>,
    max_frames: u64,
    min_block_errors: u64,
    max_iters: usize,
    seed: u64,
    mode: &'a Transmission,
}

#[derive(Serialize)]
struct SidecarPoint {
    snr_db: String,
    frames: u64,
    block_errors: u64,
    symbol_errors: u64,
    bit_errors: u64,
}

/// JSON description of the run: configuration, code digest and raw counts.
pub fn sidecar_json(cfg: &SimConfig, rate: f64, result: &SimResult) -> String {
    let side = Sidecar {
        config: SidecarConfig {
            snr_db: cfg.snr_db.iter().map(|&s| fmt_f64(s)).collect(),
            max_frames: cfg.max_frames,
            min_block_errors: cfg.min_block_errors,
            max_iters: cfg.max_iters,
            seed: cfg.seed,
            mode: &cfg.mode,
        },
        code_digest: &result.code_digest,
        rate,
        points: result
            .points
            .iter()
            .map(|p| SidecarPoint {
                snr_db: fmt_f64(p.snr_db),
                frames: p.frames,
                block_errors: p.block_errors,
                symbol_errors: p.symbol_errors,
                bit_errors: p.bit_errors,
            })
            .collect(),
        version: env!("CARGO_PKG_VERSION"),
    };
    let mut s = serde_json::to_string_pretty(&side).expect("sidecar serializes");
    s.push('\n');
    s
}
