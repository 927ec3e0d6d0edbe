//! Hierarchical code over a frame of blocks: an inner length-N code per
//! block plus outer length-B erasure codes threaded across blocks.
//!
//! Encoding runs the outer transforms column-wise over the mixture
//! positions, then the inner transform per block. Decoding peels from the
//! best fading state downward: blocks whose state supports a mixture
//! class decode it directly; each remaining class is recovered column by
//! column, treating still-undecoded blocks as erasures, and the result is
//! fed to worse-state blocks as known frozen values.

use serde::Serialize;

use crate::channel::FadingProfile;
use crate::construction::{
    self, partition_sizes, reliability_order, ConstructionMethod, IndexPartition,
};
use crate::matrix::{BitMatrix, RealMatrix};
use crate::metrics::capacity_from_crossovers;
use crate::polar::{polar_transform, stages_for_len, FrozenMap, Permutation, ScDecoder, Slot};
use crate::rng::{self, ROLE_PAYLOAD};
use crate::{Error, Result};

use rand::Rng;

/// Everything needed to build a plan: geometry, channel, slack, and the
/// reliability method.
#[derive(Debug, Clone)]
pub struct SchemeConfig {
    /// Inner code length N (power of two).
    pub block_len: usize,
    /// Blocks per frame B (power of two), the outer code length.
    pub blocks: usize,
    pub profile: FadingProfile,
    /// Rate slack epsilon in (0,1); larger is more conservative.
    pub epsilon: f64,
    pub method: ConstructionMethod,
    pub construction_seed: u64,
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        let _ = stages_for_len(self.block_len)?;
        let _ = stages_for_len(self.blocks)?;
        if self.block_len < 2 {
            return Err(Error::size("block length must be at least 2".to_string()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::domain(format!("slack {} outside (0,1)", self.epsilon)));
        }
        Ok(())
    }
}

/// One outer code: the inner-code position it occupies and the mixture
/// class it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnPlan {
    /// Index into each block's input vector.
    pub position: usize,
    /// Mixture class: decodable exactly when the block state exceeds it.
    pub set: usize,
}

/// Fully resolved code: index classes, outer-code supports, and rate
/// accounting. Built once per configuration, reused across trials.
#[derive(Debug, Clone)]
pub struct CodePlan {
    pub config: SchemeConfig,
    /// Per-state hard-decision crossovers, worst state first.
    pub crossovers: Vec<f64>,
    /// Erasure rate seen by mixture class j: probability the state is <= j.
    pub erasure_probs: Vec<f64>,
    pub partition: IndexPartition,
    /// Info support of the outer code for each mixture class, ascending.
    pub bec_info: Vec<Vec<usize>>,
    /// All outer codes, ordered by the best state's reliability of their
    /// positions (most reliable first).
    pub columns: Vec<ColumnPlan>,
    /// Reliability orders per state, worst first; used for diagnostics.
    pub state_orders: Vec<Permutation>,
    pub info_bits: u64,
    pub rate_num: u64,
    pub rate_den: u64,
    pub capacity: f64,
    pub gap: f64,
}

impl CodePlan {
    pub fn rate(&self) -> f64 {
        self.rate_num as f64 / self.rate_den as f64
    }

    pub fn state_count(&self) -> usize {
        self.config.profile.state_count()
    }
}

/// Builds the full plan for a configuration.
pub fn build_plan(config: &SchemeConfig) -> Result<CodePlan> {
    config.validate()?;
    let crossovers = config.profile.crossovers()?;
    let z = construction::state_reliabilities(
        &crossovers,
        config.block_len,
        config.method,
        config.construction_seed,
    )?;
    build_plan_from_reliabilities(config, &z)
}

/// Builds a plan from reliability scores computed elsewhere.
///
/// The scores depend only on the channel states and the block length, not
/// on the slack, so callers sweeping epsilon can estimate once (expensive
/// under the Monte-Carlo method) and assemble many plans from the result.
/// `z` must hold one vector per state, worst channel first, each of
/// length N.
pub fn build_plan_from_reliabilities(
    config: &SchemeConfig,
    z: &[construction::ReliabilityVector],
) -> Result<CodePlan> {
    config.validate()?;
    let n = config.block_len;
    let b = config.blocks;
    let crossovers = config.profile.crossovers()?;
    let s_count = crossovers.len();
    if z.len() != s_count {
        return Err(Error::size(format!(
            "{} reliability vectors for {s_count} channel states",
            z.len()
        )));
    }
    let (good_size, mixture_sizes) = partition_sizes(&crossovers, n, config.epsilon)?;
    let partition =
        construction::partition_from_reliabilities(z, n, good_size, &mixture_sizes)?;
    let state_orders: Vec<Permutation> = z.iter().map(reliability_order).collect();

    // cumulative state probabilities give each class its erasure rate
    let probs = config.profile.probs();
    let mut erasure_probs = Vec::with_capacity(s_count.saturating_sub(1));
    let mut acc = 0.0;
    for &q in &probs[..s_count - 1] {
        acc += q;
        erasure_probs.push(acc);
    }

    let b_stages = stages_for_len(b)?;
    let mut bec_info = Vec::with_capacity(erasure_probs.len());
    for &e in &erasure_probs {
        let target = b as f64 * (1.0 - e - config.epsilon);
        if target < 0.0 {
            return Err(Error::config(format!(
                "mixture class with erasure rate {e:.4} cannot carry data at slack {}",
                config.epsilon
            )));
        }
        let size = target.floor() as usize;
        let zb = construction::bec_z_vector(e, b_stages)?;
        let order = reliability_order(&zb);
        let mut info: Vec<usize> = order.as_slice()[..size].to_vec();
        info.sort_unstable();
        bec_info.push(info);
    }

    let mut set_of = vec![usize::MAX; n];
    for (j, m) in partition.mixtures().iter().enumerate() {
        for &i in m {
            set_of[i] = j;
        }
    }
    let columns: Vec<ColumnPlan> = state_orders[s_count - 1]
        .as_slice()
        .iter()
        .filter(|&&i| set_of[i] != usize::MAX)
        .map(|&i| ColumnPlan { position: i, set: set_of[i] })
        .collect();

    let info_bits = (b as u64) * (partition.good().len() as u64)
        + partition
            .mixture_sizes()
            .iter()
            .zip(&bec_info)
            .map(|(&m, info)| m as u64 * info.len() as u64)
            .sum::<u64>();
    let den = (n as u64) * (b as u64);
    let g = gcd(info_bits, den);
    let (rate_num, rate_den) = (info_bits / g, den / g);
    let capacity = capacity_from_crossovers(probs, &crossovers)?;
    let gap = capacity - info_bits as f64 / den as f64;

    Ok(CodePlan {
        config: config.clone(),
        crossovers,
        erasure_probs,
        partition,
        bec_info,
        columns,
        state_orders,
        info_bits,
        rate_num,
        rate_den,
        capacity,
        gap,
    })
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// Exact rate as a reduced fraction, with capacity and gap.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateReport {
    pub num: u64,
    pub den: u64,
    pub rate: f64,
    pub capacity: f64,
    pub gap: f64,
}

pub fn plan_rate(plan: &CodePlan) -> RateReport {
    RateReport {
        num: plan.rate_num,
        den: plan.rate_den,
        rate: plan.rate(),
        capacity: plan.capacity,
        gap: plan.gap,
    }
}

/// Serializable digest of a plan for reporting.
#[derive(Debug, Clone, Serialize)]
pub struct PlanSummary {
    pub n: usize,
    pub b: usize,
    pub states: usize,
    pub snr_db: f64,
    pub epsilon: f64,
    pub method: String,
    pub construction_seed: u64,
    pub crossovers: Vec<f64>,
    pub erasure_probs: Vec<f64>,
    pub good_size: usize,
    pub mixture_sizes: Vec<usize>,
    pub bad_size: usize,
    pub outer_info_sizes: Vec<usize>,
    pub info_bits_per_frame: u64,
    pub rate_num: u64,
    pub rate_den: u64,
    pub rate: f64,
    pub capacity: f64,
    pub gap: f64,
}

impl PlanSummary {
    pub fn from_plan(plan: &CodePlan) -> Self {
        Self {
            n: plan.config.block_len,
            b: plan.config.blocks,
            states: plan.state_count(),
            snr_db: 10.0 * plan.config.profile.snr().log10(),
            epsilon: plan.config.epsilon,
            method: plan.config.method.to_string(),
            construction_seed: plan.config.construction_seed,
            crossovers: plan.crossovers.clone(),
            erasure_probs: plan.erasure_probs.clone(),
            good_size: plan.partition.good().len(),
            mixture_sizes: plan.partition.mixture_sizes(),
            bad_size: plan.partition.bad().len(),
            outer_info_sizes: plan.bec_info.iter().map(Vec::len).collect(),
            info_bits_per_frame: plan.info_bits,
            rate_num: plan.rate_num,
            rate_den: plan.rate_den,
            rate: plan.rate(),
            capacity: plan.capacity,
            gap: plan.gap,
        }
    }
}

/// Information bits for one frame: per-block bits on the good indices and
/// per-column bits on each outer code's info support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Payload {
    pub block_info: Vec<Vec<u8>>,
    pub column_info: Vec<Vec<u8>>,
}

/// Decoder output in the same shape as `Payload`, plus confidence flags.
/// `column_ok[k]` is false when column k had to guess through an
/// unresolved erasure; `block_ok` inherits the flags of every column the
/// block's frozen values came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedPayload {
    pub block_info: Vec<Vec<u8>>,
    pub column_info: Vec<Vec<u8>>,
    pub block_ok: Vec<bool>,
    pub column_ok: Vec<bool>,
}

/// Uniformly random payload in the plan's shape.
pub fn random_payload(plan: &CodePlan, seed: u64) -> Payload {
    let mut rng = rng::substream(seed, ROLE_PAYLOAD, &[]);
    let good = plan.partition.good().len();
    let block_info = (0..plan.config.blocks)
        .map(|_| (0..good).map(|_| u8::from(rng.gen_bool(0.5))).collect())
        .collect();
    let column_info = plan
        .columns
        .iter()
        .map(|c| (0..plan.bec_info[c.set].len()).map(|_| u8::from(rng.gen_bool(0.5))).collect())
        .collect();
    Payload { block_info, column_info }
}

fn check_payload_shape(plan: &CodePlan, payload: &Payload) -> Result<()> {
    let good = plan.partition.good().len();
    if payload.block_info.len() != plan.config.blocks {
        return Err(Error::size(format!(
            "payload has {} block rows, plan wants {}",
            payload.block_info.len(),
            plan.config.blocks
        )));
    }
    for row in &payload.block_info {
        if row.len() != good {
            return Err(Error::size(format!(
                "block payload row length {} does not match {good} good indices",
                row.len()
            )));
        }
    }
    if payload.column_info.len() != plan.columns.len() {
        return Err(Error::size(format!(
            "payload has {} columns, plan wants {}",
            payload.column_info.len(),
            plan.columns.len()
        )));
    }
    for (bits, col) in payload.column_info.iter().zip(&plan.columns) {
        if bits.len() != plan.bec_info[col.set].len() {
            return Err(Error::size(format!(
                "column payload length {} does not match outer info size {}",
                bits.len(),
                plan.bec_info[col.set].len()
            )));
        }
    }
    let all = payload.block_info.iter().chain(&payload.column_info).flatten();
    if all.clone().any(|&b| b > 1) {
        return Err(Error::domain("payload bits must be 0 or 1".to_string()));
    }
    Ok(())
}

/// Encodes a payload into one codeword row per block.
pub fn encode_payload(plan: &CodePlan, payload: &Payload) -> Result<BitMatrix> {
    check_payload_shape(plan, payload)?;
    let n = plan.config.block_len;
    let b = plan.config.blocks;

    // outer pass: transform each column's info bits into the per-block
    // values its position will carry
    let mut column_words = Vec::with_capacity(plan.columns.len());
    for (col, bits) in plan.columns.iter().zip(&payload.column_info) {
        let mut v = vec![0u8; b];
        for (&pos, &bit) in plan.bec_info[col.set].iter().zip(bits) {
            v[pos] = bit;
        }
        polar_transform(&mut v)?;
        column_words.push(v);
    }

    // inner pass: assemble each block's input and transform
    let mut x = BitMatrix::zeros(b, n);
    for blk in 0..b {
        let row = x.row_mut(blk);
        for (&i, &bit) in plan.partition.good().iter().zip(&payload.block_info[blk]) {
            row[i] = bit;
        }
        for (col, word) in plan.columns.iter().zip(&column_words) {
            row[col.position] = word[blk];
        }
        polar_transform(row)?;
    }
    Ok(x)
}

/// Which blocks were still unresolved when one mixture class was peeled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageTrace {
    pub set: usize,
    pub erased_blocks: Vec<usize>,
}

/// Peeling-order diagnostics, outermost class first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DecodeTrace {
    pub stages: Vec<StageTrace>,
}

/// Decodes a frame of demodulated LLRs given the per-block states.
pub fn decode_received(
    plan: &CodePlan,
    llrs: &RealMatrix,
    states: &[usize],
) -> Result<DecodedPayload> {
    decode_received_traced(plan, llrs, states).map(|(d, _)| d)
}

/// As `decode_received`, also reporting which blocks each peeling stage
/// treated as erased.
pub fn decode_received_traced(
    plan: &CodePlan,
    llrs: &RealMatrix,
    states: &[usize],
) -> Result<(DecodedPayload, DecodeTrace)> {
    let n = plan.config.block_len;
    let b = plan.config.blocks;
    let s_count = plan.state_count();
    if llrs.rows() != b || llrs.cols() != n {
        return Err(Error::size(format!(
            "LLR matrix is {}x{}, plan wants {b}x{n}",
            llrs.rows(),
            llrs.cols()
        )));
    }
    if states.len() != b {
        return Err(Error::size(format!("{} states for {b} blocks", states.len())));
    }
    if let Some(&s) = states.iter().find(|&&s| s >= s_count) {
        return Err(Error::domain(format!("state {s} out of range for {s_count} states")));
    }

    let mut block_dec = ScDecoder::new(n)?;
    let mut col_dec = ScDecoder::new(b)?;
    let mut decoded: Vec<Option<Vec<u8>>> = vec![None; b];
    let mut block_ok = vec![true; b];

    // blocks in the best state see every class as information
    let best_map = frozen_template(plan, s_count - 1);
    for blk in 0..b {
        if states[blk] == s_count - 1 {
            decoded[blk] = Some(block_dec.decode(llrs.row(blk), &best_map)?);
        }
    }

    let col_count = plan.columns.len();
    let mut column_words: Vec<Option<Vec<u8>>> = vec![None; col_count];
    let mut column_info: Vec<Option<Vec<u8>>> = vec![None; col_count];
    let mut column_ok = vec![true; col_count];
    let mut trace = DecodeTrace::default();
    let mut col_llrs = vec![0.0f64; b];

    for s in (0..s_count.saturating_sub(1)).rev() {
        let erased: Vec<usize> = (0..b).filter(|&blk| decoded[blk].is_none()).collect();
        trace.stages.push(StageTrace { set: s, erased_blocks: erased });

        // peel class s: decoded blocks pin their position's bit, the
        // rest are erasures
        let outer_map = FrozenMap::from_info_set(b, &plan.bec_info[s])?;
        for (k, col) in plan.columns.iter().enumerate() {
            if col.set != s {
                continue;
            }
            for (blk, l) in col_llrs.iter_mut().enumerate() {
                *l = match &decoded[blk] {
                    Some(u) => {
                        if u[col.position] == 0 {
                            f64::INFINITY
                        } else {
                            f64::NEG_INFINITY
                        }
                    }
                    None => 0.0,
                };
            }
            let (vhat, clean) = col_dec.decode_flagged(&col_llrs, &outer_map)?;
            column_ok[k] = clean;
            column_info[k] = Some(plan.bec_info[s].iter().map(|&i| vhat[i]).collect());
            let mut word = vhat;
            polar_transform(&mut word)?;
            column_words[k] = Some(word);
        }

        // blocks at state s now know every class >= s as frozen values
        let template = frozen_template(plan, s);
        for blk in 0..b {
            if states[blk] != s {
                continue;
            }
            let mut map = template.clone();
            let mut ok = true;
            for (k, col) in plan.columns.iter().enumerate() {
                if col.set < s {
                    continue;
                }
                let word = column_words[k].as_ref().expect("class peeled before use");
                map.set(col.position, Slot::Frozen(word[blk]));
                ok &= column_ok[k];
            }
            decoded[blk] = Some(block_dec.decode(llrs.row(blk), &map)?);
            block_ok[blk] = ok;
        }
    }

    let good = plan.partition.good();
    let block_info = decoded
        .iter()
        .map(|u| {
            let u = u.as_ref().expect("every block decoded by its state's pass");
            good.iter().map(|&i| u[i]).collect()
        })
        .collect();
    let column_info =
        column_info.into_iter().map(|c| c.expect("every class peeled")).collect();
    Ok((DecodedPayload { block_info, column_info, block_ok, column_ok }, trace))
}

/// Frozen map for a block whose state is `s`: good indices and classes
/// below `s` are information, everything else frozen (class values are
/// overwritten per block during decoding).
fn frozen_template(plan: &CodePlan, s: usize) -> FrozenMap {
    let mut map = FrozenMap::all_frozen(plan.config.block_len);
    for &i in plan.partition.good() {
        map.set(i, Slot::Info);
    }
    for m in &plan.partition.mixtures()[..s] {
        for &i in m {
            map.set(i, Slot::Info);
        }
    }
    map
}
