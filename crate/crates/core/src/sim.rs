//! Erasure decoding of lifted GLDPC codes and block-error-rate simulation.
//!
//! The decoder alternates peeling on single-parity rows with maximum
//! likelihood erasure solving inside each generalized-check block. The
//! all-zero codeword is sent, so only erasure positions matter.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::doping::PdGldpcCode;
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// Largest code length accepted by [`erasure_rank_oracle`].
pub const ORACLE_MAX_COLS: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderMode {
    /// Peeling on single-parity rows plus ML inside GC blocks.
    Gldpc,
    /// Every row, GC rows included, is peeled as a single parity check.
    Peeling,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeOutcome {
    pub success: bool,
    /// Columns still erased, ascending.
    pub residual: Vec<usize>,
    pub iters: usize,
}

/// Reusable decoder with private scratch buffers.
#[derive(Debug, Clone)]
pub struct Decoder<'a> {
    code: &'a PdGldpcCode,
    max_iters: usize,
    peel_row: Vec<bool>,
    col_blocks: Vec<Vec<u32>>,
    mu: usize,
    erased: Vec<bool>,
    row_count: Vec<u32>,
    row_sum: Vec<u64>,
    queue: Vec<u32>,
    dirty: Vec<bool>,
    dirty_list: Vec<u32>,
    left: usize,
}

impl<'a> Decoder<'a> {
    pub fn new(code: &'a PdGldpcCode, mode: DecoderMode, max_iters: usize) -> Self {
        let pcm = code.pcm();
        let (rows, cols) = (pcm.rows(), pcm.cols());
        let mut peel_row = vec![mode == DecoderMode::Peeling; rows];
        let mut col_blocks = vec![Vec::new(); cols];
        let mut n_blocks = 0;
        if mode == DecoderMode::Gldpc {
            for r in code.spc_rows() {
                peel_row[r] = true;
            }
            for (g, blk) in code.gc_blocks().iter().enumerate() {
                for &c in &blk.cols {
                    col_blocks[c as usize].push(g as u32);
                }
            }
            n_blocks = code.gc_blocks().len();
        }
        Decoder {
            code,
            max_iters,
            peel_row,
            col_blocks,
            mu: code.code().mu(),
            erased: vec![false; cols],
            row_count: vec![0; rows],
            row_sum: vec![0; rows],
            queue: Vec::new(),
            dirty: vec![false; n_blocks],
            dirty_list: Vec::new(),
            left: 0,
        }
    }

    fn resolve(&mut self, c: usize) {
        if !std::mem::replace(&mut self.erased[c], false) {
            return;
        }
        self.left -= 1;
        for &r in self.code.pcm().pcm().col(c) {
            let r = r as usize;
            if self.peel_row[r] {
                self.row_count[r] -= 1;
                self.row_sum[r] -= c as u64;
                if self.row_count[r] == 1 {
                    self.queue.push(r as u32);
                }
            }
        }
        for &g in &self.col_blocks[c] {
            if !std::mem::replace(&mut self.dirty[g as usize], true) {
                self.dirty_list.push(g);
            }
        }
    }

    /// Decodes one erasure pattern given as a list of erased columns.
    pub fn decode(&mut self, erasures: &[usize]) -> Result<DecodeOutcome> {
        let pcm = self.code.pcm().pcm();
        self.erased.fill(false);
        self.row_count.fill(0);
        self.row_sum.fill(0);
        self.queue.clear();
        self.dirty.fill(false);
        self.dirty_list.clear();
        self.left = 0;
        for &c in erasures {
            if c >= pcm.cols() {
                return Err(Error::InvalidArgument(format!("erasure {c} outside the code")));
            }
            if std::mem::replace(&mut self.erased[c], true) {
                continue;
            }
            self.left += 1;
            for &r in pcm.col(c) {
                let r = r as usize;
                if self.peel_row[r] {
                    self.row_count[r] += 1;
                    self.row_sum[r] += c as u64;
                }
            }
            for &g in &self.col_blocks[c] {
                if !std::mem::replace(&mut self.dirty[g as usize], true) {
                    self.dirty_list.push(g);
                }
            }
        }
        for r in 0..pcm.rows() {
            if self.row_count[r] == 1 {
                self.queue.push(r as u32);
            }
        }
        let mut iters = 0;
        while self.left > 0 && iters < self.max_iters {
            iters += 1;
            while let Some(r) = self.queue.pop() {
                let r = r as usize;
                if self.row_count[r] == 1 {
                    self.resolve(self.row_sum[r] as usize);
                }
            }
            let before = self.left;
            let pending = std::mem::take(&mut self.dirty_list);
            for &g in &pending {
                self.dirty[g as usize] = false;
            }
            for g in pending {
                self.solve_block(g as usize)?;
            }
            if self.left == before && self.queue.is_empty() {
                break;
            }
        }
        let residual: Vec<usize> = (0..pcm.cols()).filter(|&c| self.erased[c]).collect();
        Ok(DecodeOutcome {
            success: residual.is_empty(),
            residual,
            iters,
        })
    }

    fn solve_block(&mut self, g: usize) -> Result<()> {
        let blk = &self.code.gc_blocks()[g];
        let code = self.code.code();
        let erased_pos: Vec<usize> = (0..self.mu).filter(|&k| self.erased[blk.cols[k] as usize]).collect();
        if erased_pos.is_empty() {
            return Ok(());
        }
        let cols: Vec<usize> = if self.mu <= 64 {
            let mask = erased_pos.iter().fold(0u64, |m, &k| m | 1 << k);
            let res = code.resolvable_mask(mask);
            erased_pos.into_iter().filter(|&k| res >> k & 1 == 1).map(|k| blk.cols[k] as usize).collect()
        } else {
            let known = vec![0u8; self.mu];
            let d = code.ml_erase_decode(&erased_pos, &known)?;
            d.resolved.into_iter().map(|(k, _)| blk.cols[k] as usize).collect()
        };
        for c in cols {
            self.resolve(c);
        }
        Ok(())
    }
}

/// One-shot convenience wrapper around [`Decoder`].
pub fn decode_block(code: &PdGldpcCode, erasures: &[usize], mode: DecoderMode) -> Result<DecodeOutcome> {
    Decoder::new(code, mode, 200).decode(erasures)
}

/// True iff the full parity-check matrix restricted to the erased columns
/// has full column rank, i.e. ML decoding recovers every erasure.
pub fn erasure_rank_oracle(code: &PdGldpcCode, erasures: &[usize]) -> Result<bool> {
    let pcm = code.pcm().pcm();
    if pcm.cols() > ORACLE_MAX_COLS {
        return Err(Error::SizeLimit(format!("{} columns exceed the oracle limit {ORACLE_MAX_COLS}", pcm.cols())));
    }
    let mut cols: Vec<usize> = erasures.to_vec();
    cols.sort_unstable();
    cols.dedup();
    if cols.is_empty() {
        return Ok(true);
    }
    if cols.len() > pcm.rows() {
        return Ok(false);
    }
    let mut m = BitMatrix::zeros(pcm.rows(), cols.len());
    for (k, &c) in cols.iter().enumerate() {
        for &r in pcm.col(c) {
            m.set(r as usize, k, true);
        }
    }
    Ok(m.rank_in_place() == cols.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub epsilon: f64,
    pub max_blocks: u64,
    pub target_errors: u64,
    pub max_decoder_iters: usize,
    pub rng_seed: u64,
    pub workers: usize,
    pub mode: DecoderMode,
}

impl SimConfig {
    pub fn new(epsilon: f64, rng_seed: u64) -> Self {
        SimConfig {
            epsilon,
            max_blocks: 1_000_000,
            target_errors: 100,
            max_decoder_iters: 200,
            rng_seed,
            workers: 1,
            mode: DecoderMode::Gldpc,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::InvalidArgument(format!("epsilon {} outside [0, 1]", self.epsilon)));
        }
        if self.target_errors == 0 || self.max_blocks == 0 {
            return Err(Error::InvalidArgument("target_errors and max_blocks must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub epsilon: f64,
    pub blocks_run: u64,
    pub block_errors: u64,
    pub bler: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_iters: f64,
    /// Residual erasure count of failed blocks -> number of blocks.
    pub residual_erasure_histogram: BTreeMap<usize, u64>,
}

/// Wilson score interval at 95 % confidence.
pub fn wilson_interval(errors: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959964_f64;
    let n = n as f64;
    let p = errors as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors as f64 == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

const BATCH: u64 = 512;

/// Erasure pattern of block `index`: each column erased independently.
pub fn block_erasures(n: usize, epsilon: f64, seed: u64, index: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    (0..n).filter(|_| rng.gen::<f64>() < epsilon).collect()
}

/// Monte Carlo block error rate. Blocks are decoded in fixed-size batches
/// and counted in index order up to the block that produced the
/// `target_errors`-th error, so the result does not depend on `workers`.
pub fn run_bler(code: &PdGldpcCode, cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
    let n = code.pcm().cols();
    let mut blocks = 0u64;
    let mut errors = 0u64;
    let mut iters_total = 0u64;
    let mut hist = BTreeMap::new();
    'outer: while blocks < cfg.max_blocks {
        let end = (blocks + BATCH).min(cfg.max_blocks);
        let outcomes: Vec<(bool, usize, usize)> = pool.install(|| {
            (blocks..end)
                .into_par_iter()
                .map_init(
                    || Decoder::new(code, cfg.mode, cfg.max_decoder_iters),
                    |dec, b| {
                        let e = block_erasures(n, cfg.epsilon, cfg.rng_seed, b);
                        dec.decode(&e).map(|o| (o.success, o.residual.len(), o.iters))
                    },
                )
                .collect::<Result<Vec<_>>>()
        })?;
        for (ok, residual, it) in outcomes {
            blocks += 1;
            iters_total += it as u64;
            if !ok {
                errors += 1;
                *hist.entry(residual).or_insert(0) += 1;
                if errors >= cfg.target_errors {
                    break 'outer;
                }
            }
        }
    }
    let (ci_low, ci_high) = wilson_interval(errors, blocks);
    Ok(SimResult {
        epsilon: cfg.epsilon,
        blocks_run: blocks,
        block_errors: errors,
        bler: errors as f64 / blocks as f64,
        ci_low,
        ci_high,
        mean_iters: iters_total as f64 / blocks as f64,
        residual_erasure_histogram: hist,
    })
}

pub const CSV_HEADER: &str = "epsilon,blocks,errors,bler,ci_low,ci_high,mean_iters";

pub fn csv_row(r: &SimResult) -> String {
    format!(
        "{},{},{},{:.6e},{:.6e},{:.6e},{:.4}",
        r.epsilon, r.blocks_run, r.block_errors, r.bler, r.ci_low, r.ci_high, r.mean_iters
    )
}

pub fn to_csv(results: &[SimResult]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in results {
        s.push_str(&csv_row(r));
        s.push('\n');
    }
    s
}
