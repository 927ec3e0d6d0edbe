//! Monte-Carlo frame simulation: payload, channel, decode, tally.
//!
//! Every random draw is seeded from (master seed, role, sweep point,
//! trial index), so a batch produces identical counts whether trials run
//! sequentially or across any number of workers.

use crate::channel::{bpsk_modulate, draw_states, fading_awgn, hard_demod};
use crate::matrix::RealMatrix;
use crate::metrics::{compare_payloads, ErrorStats};
use crate::rng::{derive_seed, ROLE_NOISE, ROLE_PAYLOAD, ROLE_STATES};
use crate::scheme::{decode_received, encode_payload, random_payload, CodePlan};
use crate::{exec, Result};

/// Outcome of one simulated frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub frame_error: bool,
    pub bit_errors: u64,
    pub info_bits: u64,
}

/// Simulates one frame end to end: random payload, random block states,
/// faded noisy BPSK, hard demodulation, peeling decode.
pub fn run_trial(plan: &CodePlan, master_seed: u64, point: u64, trial: u64) -> Result<TrialOutcome> {
    let profile = &plan.config.profile;
    let b = plan.config.blocks;
    let n = plan.config.block_len;

    let payload = random_payload(plan, derive_seed(master_seed, ROLE_PAYLOAD, &[point, trial]));
    let x = encode_payload(plan, &payload)?;
    let states = draw_states(profile, b, derive_seed(master_seed, ROLE_STATES, &[point, trial]));

    let mut symbols = RealMatrix::zeros(b, n);
    for blk in 0..b {
        let row = bpsk_modulate(x.row(blk), profile.energy_x())?;
        symbols.row_mut(blk).copy_from_slice(&row);
    }
    let received = fading_awgn(
        &symbols,
        &states,
        profile,
        derive_seed(master_seed, ROLE_NOISE, &[point, trial]),
    )?;
    let (_, llrs) = hard_demod(&received, &states, profile)?;
    let decoded = decode_received(plan, &llrs, &states)?;

    let (frame_error, bit_errors, info_bits) = compare_payloads(&payload, &decoded);
    Ok(TrialOutcome { frame_error, bit_errors, info_bits })
}

/// Runs `trials` independent frames and tallies the counts. Trials are
/// distributed over the worker pool; the tally is integer sums, so the
/// result is identical to a sequential run.
pub fn run_batch(plan: &CodePlan, master_seed: u64, point: u64, trials: u64) -> Result<ErrorStats> {
    let outcomes: Vec<Result<TrialOutcome>> =
        exec::map_collect(trials as usize, |t| run_trial(plan, master_seed, point, t as u64));
    let mut stats = ErrorStats::new();
    for outcome in outcomes {
        let o = outcome?;
        stats.record(o.frame_error, o.bit_errors, o.info_bits);
    }
    Ok(stats)
}
