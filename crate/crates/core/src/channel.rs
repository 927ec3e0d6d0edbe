//! Block-fading BPSK channel with per-block gain states and hard-decision
//! demodulation.
//!
//! A frame is `blocks` codewords of equal length. Each codeword sees one
//! fading state for its whole duration; states are drawn independently
//! across blocks. Conditioned on state `s` with gain `h_s`, hard
//! demodulation turns the block into a BSC with crossover
//! `p_s = Q(h_s·sqrt(snr))`.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::matrix::{BitMatrix, RealMatrix};
use crate::rng::{self, ROLE_FLIP, ROLE_NOISE, ROLE_STATES};
use crate::{Error, Result};

/// Discrete fading profile plus signal/noise energies.
///
/// Gains are kept ascending, so state index 0 is always the worst channel
/// and the last index the best. Crossovers derived from the profile are
/// therefore descending in the state index.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingProfile {
    gains: Vec<f64>,
    probs: Vec<f64>,
    energy_x: f64,
    energy_z: f64,
}

impl FadingProfile {
    pub fn new(gains: Vec<f64>, probs: Vec<f64>, energy_x: f64, energy_z: f64) -> Result<Self> {
        if gains.is_empty() || gains.len() != probs.len() {
            return Err(Error::size(format!(
                "need matching nonempty gain/probability lists, got {} and {}",
                gains.len(),
                probs.len()
            )));
        }
        for &h in &gains {
            if !h.is_finite() || h < 0.0 {
                return Err(Error::domain(format!("gain {h} must be finite and nonnegative")));
            }
        }
        if gains.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::domain("gains must be sorted ascending".to_string()));
        }
        let mut total = 0.0;
        for &q in &probs {
            if !q.is_finite() || q <= 0.0 || q > 1.0 {
                return Err(Error::domain(format!("state probability {q} outside (0,1]")));
            }
            total += q;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("state probabilities sum to {total}, not 1")));
        }
        for &e in &[energy_x, energy_z] {
            if !e.is_finite() || e <= 0.0 {
                return Err(Error::domain(format!("energy {e} must be finite and positive")));
            }
        }
        Ok(Self { gains, probs, energy_x, energy_z })
    }

    /// Unit-energy profile at the given SNR: E_X = 1, E_Z = 1/snr.
    pub fn with_snr(gains: Vec<f64>, probs: Vec<f64>, snr: f64) -> Result<Self> {
        if !snr.is_finite() || snr <= 0.0 {
            return Err(Error::domain(format!("snr {snr} must be finite and positive")));
        }
        Self::new(gains, probs, 1.0, 1.0 / snr)
    }

    pub fn state_count(&self) -> usize {
        self.gains.len()
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn energy_x(&self) -> f64 {
        self.energy_x
    }

    pub fn energy_z(&self) -> f64 {
        self.energy_z
    }

    pub fn snr(&self) -> f64 {
        self.energy_x / self.energy_z
    }

    /// Per-state BSC crossovers at this profile's SNR, descending in the
    /// state index.
    pub fn crossovers(&self) -> Result<Vec<f64>> {
        let snr = self.snr();
        self.gains.iter().map(|&h| crossover_probability(h, snr)).collect()
    }
}

/// Hard-decision crossover Q(h·sqrt(snr)), evaluated through erfc so tiny
/// probabilities keep full relative accuracy.
pub fn crossover_probability(gain: f64, snr: f64) -> Result<f64> {
    if !gain.is_finite() || gain < 0.0 {
        return Err(Error::domain(format!("gain {gain} must be finite and nonnegative")));
    }
    if !snr.is_finite() || snr <= 0.0 {
        return Err(Error::domain(format!("snr {snr} must be finite and positive")));
    }
    let arg = gain * snr.sqrt();
    Ok(0.5 * statrs::function::erf::erfc(arg / std::f64::consts::SQRT_2))
}

/// Draws one fading state per block from the profile's distribution.
pub fn draw_states(profile: &FadingProfile, blocks: usize, seed: u64) -> Vec<usize> {
    let mut rng = rng::substream(seed, ROLE_STATES, &[]);
    let last = profile.state_count() - 1;
    (0..blocks)
        .map(|_| {
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            for (s, &q) in profile.probs.iter().enumerate() {
                acc += q;
                if u < acc {
                    return s;
                }
            }
            last
        })
        .collect()
}

/// Antipodal map: bit 0 to +sqrt(E_X), bit 1 to -sqrt(E_X).
pub fn bpsk_modulate(bits: &[u8], energy_x: f64) -> Result<Vec<f64>> {
    if !energy_x.is_finite() || energy_x <= 0.0 {
        return Err(Error::domain(format!("energy {energy_x} must be finite and positive")));
    }
    let amp = energy_x.sqrt();
    Ok(bits.iter().map(|&b| (1.0 - 2.0 * f64::from(b)) * amp).collect())
}

/// Applies per-block gain and white Gaussian noise: y = h_s·x + z with
/// z ~ N(0, E_Z). One noise stream covers the frame row-major, so the
/// output is independent of any worker partitioning.
pub fn fading_awgn(
    symbols: &RealMatrix,
    states: &[usize],
    profile: &FadingProfile,
    seed: u64,
) -> Result<RealMatrix> {
    check_states(states, symbols.rows(), profile)?;
    let normal = Normal::new(0.0, profile.energy_z.sqrt())
        .map_err(|e| Error::domain(format!("noise distribution: {e}")))?;
    let mut rng = rng::substream(seed, ROLE_NOISE, &[]);
    let mut out = RealMatrix::zeros(symbols.rows(), symbols.cols());
    for blk in 0..symbols.rows() {
        let h = profile.gains[states[blk]];
        let src = symbols.row(blk);
        let dst = out.row_mut(blk);
        for (d, &x) in dst.iter_mut().zip(src) {
            *d = h * x + normal.sample(&mut rng);
        }
    }
    Ok(out)
}

/// Sign-based demodulation with state-informed confidence.
///
/// Bit is 0 iff y >= 0. The LLR magnitude is ln((1-p_s)/p_s) for the
/// block's crossover p_s, positive when the hard decision is 0. A state
/// with p_s = 1/2 yields all-zero LLRs (pure erasures downstream).
pub fn hard_demod(
    received: &RealMatrix,
    states: &[usize],
    profile: &FadingProfile,
) -> Result<(BitMatrix, RealMatrix)> {
    check_states(states, received.rows(), profile)?;
    let crossovers = profile.crossovers()?;
    let lam: Vec<f64> = crossovers.iter().map(|&p| ((1.0 - p) / p).ln()).collect();
    let mut bits = BitMatrix::zeros(received.rows(), received.cols());
    let mut llrs = RealMatrix::zeros(received.rows(), received.cols());
    for blk in 0..received.rows() {
        let m = lam[states[blk]];
        let y = received.row(blk);
        let brow = bits.row_mut(blk);
        let lrow = llrs.row_mut(blk);
        for j in 0..y.len() {
            if !y[j].is_finite() {
                return Err(Error::domain(format!("received sample {} is not finite", y[j])));
            }
            let bit = u8::from(y[j] < 0.0);
            brow[j] = bit;
            lrow[j] = (1.0 - 2.0 * f64::from(bit)) * m;
        }
    }
    Ok((bits, llrs))
}

/// Reference BSC: flips each bit independently with probability p.
pub fn bsc_channel(bits: &[u8], p: f64, seed: u64) -> Result<Vec<u8>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("crossover {p} outside [0,1]")));
    }
    let mut rng = rng::substream(seed, ROLE_FLIP, &[]);
    Ok(bits.iter().map(|&b| b ^ u8::from(rng.gen_bool(p))).collect())
}

fn check_states(states: &[usize], rows: usize, profile: &FadingProfile) -> Result<()> {
    if states.len() != rows {
        return Err(Error::size(format!(
            "state list length {} does not match {} blocks",
            states.len(),
            rows
        )));
    }
    if let Some(&s) = states.iter().find(|&&s| s >= profile.state_count()) {
        return Err(Error::domain(format!(
            "state index {s} out of range for {} states",
            profile.state_count()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state() -> FadingProfile {
        FadingProfile::with_snr(vec![0.8, 2.0], vec![0.5, 0.5], 1.0).unwrap()
    }

    #[test]
    fn profile_validation() {
        assert!(FadingProfile::with_snr(vec![], vec![], 1.0).is_err());
        assert!(FadingProfile::with_snr(vec![1.0], vec![0.5], 1.0).is_err());
        assert!(FadingProfile::with_snr(vec![2.0, 1.0], vec![0.5, 0.5], 1.0).is_err());
        assert!(FadingProfile::with_snr(vec![-1.0], vec![1.0], 1.0).is_err());
        assert!(FadingProfile::with_snr(vec![1.0], vec![1.0], 0.0).is_err());
        assert!(FadingProfile::new(vec![1.0], vec![1.0], 1.0, -2.0).is_err());
        let p = FadingProfile::with_snr(vec![1.0], vec![1.0], 4.0).unwrap();
        assert!((p.snr() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn crossover_frozen_values() {
        // effective argument 1 and 2
        let p1 = crossover_probability(1.0, 1.0).unwrap();
        assert!((p1 - 0.158655253931457).abs() < 1e-10);
        let p2 = crossover_probability(2.0, 1.0).unwrap();
        assert!((p2 - 0.022750131948179).abs() < 1e-10);
        // scale invariance: only h*sqrt(snr) matters
        let p2b = crossover_probability(1.0, 4.0).unwrap();
        assert!((p2 - p2b).abs() < 1e-15);
        // zero gain erases everything
        assert!((crossover_probability(0.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(crossover_probability(-1.0, 1.0).is_err());
        assert!(crossover_probability(1.0, 0.0).is_err());
    }

    #[test]
    fn profile_crossovers_descend() {
        let cs = two_state().crossovers().unwrap();
        assert_eq!(cs.len(), 2);
        assert!(cs[0] > cs[1]);
    }

    #[test]
    fn states_reproducible_and_in_range() {
        let p = two_state();
        let a = draw_states(&p, 64, 7);
        let b = draw_states(&p, 64, 7);
        assert_eq!(a, b);
        assert!(a.iter().all(|&s| s < 2));
        let c = draw_states(&p, 64, 8);
        assert_ne!(a, c);
        // single state collapses to all zeros
        let single = FadingProfile::with_snr(vec![1.0], vec![1.0], 1.0).unwrap();
        assert!(draw_states(&single, 32, 3).iter().all(|&s| s == 0));
    }

    #[test]
    fn state_frequencies_track_probabilities() {
        let p = FadingProfile::with_snr(vec![0.5, 1.0, 2.0], vec![0.2, 0.3, 0.5], 1.0).unwrap();
        let states = draw_states(&p, 20_000, 11);
        let f0 = states.iter().filter(|&&s| s == 0).count() as f64 / 20_000.0;
        let f2 = states.iter().filter(|&&s| s == 2).count() as f64 / 20_000.0;
        assert!((f0 - 0.2).abs() < 0.02, "state 0 frequency {f0}");
        assert!((f2 - 0.5).abs() < 0.02, "state 2 frequency {f2}");
    }

    #[test]
    fn modulation_maps_bits_to_antipodal() {
        let x = bpsk_modulate(&[0, 1, 1, 0], 4.0).unwrap();
        assert_eq!(x, vec![2.0, -2.0, -2.0, 2.0]);
        assert!(bpsk_modulate(&[0], 0.0).is_err());
    }

    #[test]
    fn demod_llr_magnitude_matches_crossover() {
        // gain chosen so p = Q(1.2815...) = 0.1 and the LLR is ln 9
        let p = FadingProfile::with_snr(vec![1.2815515655446004], vec![1.0], 1.0).unwrap();
        let mut y = RealMatrix::zeros(1, 4);
        y.row_mut(0).copy_from_slice(&[3.2, -0.5, 0.0, -2.0]);
        let (bits, llrs) = hard_demod(&y, &[0], &p).unwrap();
        assert_eq!(bits.row(0), &[0, 1, 0, 1]);
        let ln9 = 9.0f64.ln();
        let got = llrs.row(0);
        assert!((got[0] - ln9).abs() < 1e-9);
        assert!((got[1] + ln9).abs() < 1e-9);
        assert!((got[2] - ln9).abs() < 1e-9, "y = 0 decides bit 0");
        assert!((got[3] + ln9).abs() < 1e-9);
    }

    #[test]
    fn faded_noise_is_deterministic_and_scales() {
        let p = two_state();
        let mut x = RealMatrix::zeros(2, 8);
        for j in 0..8 {
            x.row_mut(0)[j] = 1.0;
            x.row_mut(1)[j] = 1.0;
        }
        let states = [0usize, 1];
        let a = fading_awgn(&x, &states, &p, 99).unwrap();
        let b = fading_awgn(&x, &states, &p, 99).unwrap();
        assert_eq!(a.as_slice(), b.as_slice());
        assert!(fading_awgn(&x, &[0], &p, 1).is_err());
        assert!(fading_awgn(&x, &[0, 5], &p, 1).is_err());
    }

    #[test]
    fn noise_moments_match_profile() {
        let p = FadingProfile::new(vec![1.5], vec![1.0], 1.0, 0.25).unwrap();
        let n = 50_000;
        let x = RealMatrix::zeros(1, n);
        let y = fading_awgn(&x, &[0], &p, 1234).unwrap();
        let mean = y.row(0).iter().sum::<f64>() / n as f64;
        let var = y.row(0).iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 0.25).abs() < 0.01, "var {var}");
    }

    #[test]
    fn bsc_flip_rate_and_determinism() {
        let bits = vec![0u8; 100_000];
        let out = bsc_channel(&bits, 0.11, 5).unwrap();
        let flips = out.iter().filter(|&&b| b == 1).count() as f64 / 100_000.0;
        assert!((flips - 0.11).abs() < 0.01, "flip rate {flips}");
        assert_eq!(out, bsc_channel(&bits, 0.11, 5).unwrap());
        assert!(bsc_channel(&bits, -0.1, 5).is_err());
        // p = 0 is the identity
        assert_eq!(bsc_channel(&[1, 0, 1], 0.0, 9).unwrap(), vec![1, 0, 1]);
    }
}
