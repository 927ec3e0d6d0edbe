//! Information measures and Monte-Carlo error statistics.

use statrs::distribution::{Beta, Continuous, ContinuousCDF};

use crate::channel::{crossover_probability, FadingProfile};
use crate::scheme::{DecodedPayload, Payload};
use crate::{Error, Result};

/// Binary entropy in bits, with `0·log 0 = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("entropy argument {p} outside [0,1]")));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    Ok(-p * p.log2() - (1.0 - p) * (1.0 - p).log2())
}

/// Standard normal CDF Φ(x), via the complementary error function so the
/// tails stay accurate (absolute error well below 1e-10).
pub fn gaussian_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// Σ_s q_s·(1 − H(p_s)): the rate limit for a decoder that knows the
/// per-block state, with each state hard-demodulated to a BSC.
pub fn capacity_from_crossovers(probs: &[f64], crossovers: &[f64]) -> Result<f64> {
    if probs.len() != crossovers.len() || probs.is_empty() {
        return Err(Error::size("state probabilities and crossovers must match".to_string()));
    }
    let mut c = 0.0;
    for (&q, &p) in probs.iter().zip(crossovers) {
        c += q * (1.0 - binary_entropy(p)?);
    }
    Ok(c)
}

/// Capacity of the block-fading profile at the given SNR.
pub fn ergodic_capacity(profile: &FadingProfile, snr: f64) -> Result<f64> {
    let crossovers: Result<Vec<f64>> = profile
        .gains()
        .iter()
        .map(|&h| crossover_probability(h, snr))
        .collect();
    capacity_from_crossovers(profile.probs(), &crossovers?)
}

/// Aggregated frame/bit error counts with rate and CI accessors.
///
/// Merging is plain counter addition, so partial tallies from parallel
/// workers combine in any order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct ErrorStats {
    pub frames: u64,
    pub frame_errors: u64,
    pub info_bits: u64,
    pub bit_errors: u64,
}

impl ErrorStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, frame_error: bool, bit_errors: u64, info_bits: u64) {
        self.frames += 1;
        self.frame_errors += u64::from(frame_error);
        self.bit_errors += bit_errors;
        self.info_bits += info_bits;
    }

    pub fn merge(&mut self, other: &ErrorStats) {
        self.frames += other.frames;
        self.frame_errors += other.frame_errors;
        self.info_bits += other.info_bits;
        self.bit_errors += other.bit_errors;
    }

    pub fn fer(&self) -> f64 {
        ratio(self.frame_errors, self.frames)
    }

    pub fn ber(&self) -> f64 {
        ratio(self.bit_errors, self.info_bits)
    }

    /// 95% CI half-width on the frame error rate.
    pub fn fer_ci95(&self) -> f64 {
        ci95_halfwidth(self.frame_errors, self.frames)
    }

    /// 95% CI half-width on the bit error rate.
    pub fn ber_ci95(&self) -> f64 {
        ci95_halfwidth(self.bit_errors, self.info_bits)
    }
}

fn ratio(k: u64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        k as f64 / n as f64
    }
}

// Normal approximation, switching to exact Clopper-Pearson when either
// count is small enough that the approximation is untrustworthy.
fn ci95_halfwidth(k: u64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if k.min(n - k) < 10 {
        let (lo, hi) = clopper_pearson(k, n);
        return (hi - lo) / 2.0;
    }
    let p = k as f64 / n as f64;
    1.96 * (p * (1.0 - p) / n as f64).sqrt()
}

fn clopper_pearson(k: u64, n: u64) -> (f64, f64) {
    let alpha = 0.05;
    let lo = if k == 0 { 0.0 } else { beta_quantile(k as f64, (n - k + 1) as f64, alpha / 2.0) };
    let hi = if k == n { 1.0 } else { beta_quantile((k + 1) as f64, (n - k) as f64, 1.0 - alpha / 2.0) };
    (lo, hi)
}

// The library quantile is a coarse numeric inverse; polish it with Newton
// steps on the exact CDF.
fn beta_quantile(a: f64, b: f64, p: f64) -> f64 {
    let dist = Beta::new(a, b).expect("valid beta shape");
    let mut x = dist.inverse_cdf(p).clamp(f64::MIN_POSITIVE, 1.0 - 1e-16);
    for _ in 0..12 {
        let err = dist.cdf(x) - p;
        let slope = dist.pdf(x);
        if !slope.is_finite() || slope <= 0.0 {
            break;
        }
        let next = (x - err / slope).clamp(0.0, 1.0);
        if (next - x).abs() <= 1e-15 * x.max(1e-12) {
            x = next;
            break;
        }
        x = next;
    }
    x
}

/// Per-trial comparison over information positions only.
/// Returns (frame_error, bit_errors, info_bits).
pub fn compare_payloads(truth: &Payload, decoded: &DecodedPayload) -> (bool, u64, u64) {
    let mut bit_errors = 0u64;
    let mut info_bits = 0u64;
    for (t, d) in truth.block_info.iter().zip(&decoded.block_info) {
        info_bits += t.len() as u64;
        bit_errors += t.iter().zip(d).filter(|(a, b)| a != b).count() as u64;
    }
    for (t, d) in truth.column_info.iter().zip(&decoded.column_info) {
        info_bits += t.len() as u64;
        bit_errors += t.iter().zip(d).filter(|(a, b)| a != b).count() as u64;
    }
    (bit_errors > 0, bit_errors, info_bits)
}

/// Aggregates matched (decoded, truth) pairs. A frame error is any
/// info-bit mismatch within one pair.
pub fn error_stats(decoded: &[DecodedPayload], truth: &[Payload]) -> Result<ErrorStats> {
    if decoded.len() != truth.len() {
        return Err(Error::size(format!(
            "decoded ({}) and truth ({}) trial counts differ",
            decoded.len(),
            truth.len()
        )));
    }
    let mut stats = ErrorStats::new();
    for (d, t) in decoded.iter().zip(truth) {
        if t.block_info.len() != d.block_info.len() || t.column_info.len() != d.column_info.len() {
            return Err(Error::size("payload shapes differ between decoded and truth".to_string()));
        }
        let (fe, be, bits) = compare_payloads(t, d);
        stats.record(fe, be, bits);
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_frozen_values() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert!((binary_entropy(0.11).unwrap() - 0.499915958164528).abs() < 1e-12);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.1).is_err());
    }

    #[test]
    fn entropy_is_symmetric() {
        for p in [0.01, 0.2, 0.37, 0.49] {
            let a = binary_entropy(p).unwrap();
            let b = binary_entropy(1.0 - p).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn gaussian_cdf_reference_values() {
        // reference values to 1e-10 absolute
        assert!((gaussian_cdf(0.0) - 0.5).abs() < 1e-12);
        assert!((gaussian_cdf(1.0) - 0.841344746068543).abs() < 1e-10);
        assert!((gaussian_cdf(-1.0) - 0.158655253931457).abs() < 1e-10);
        assert!((gaussian_cdf(2.0) - 0.977249868051821).abs() < 1e-10);
        assert!((gaussian_cdf(-2.0) - 0.022750131948179).abs() < 1e-10);
        for x in [-3.5, -0.7, 0.3, 4.2] {
            assert!((gaussian_cdf(x) + gaussian_cdf(-x) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn capacity_frozen_value() {
        let c = capacity_from_crossovers(&[0.3, 0.7], &[0.11, 0.02]).unwrap();
        assert!((c - 0.7510165).abs() < 1e-6, "got {c}");
    }

    #[test]
    fn stats_counting() {
        // one flipped bit in one frame of ten
        let mut s = ErrorStats::new();
        for i in 0..10 {
            s.record(i == 0, u64::from(i == 0), 50);
        }
        assert!((s.fer() - 0.1).abs() < 1e-15);
        assert!((s.ber() - 1.0 / 500.0).abs() < 1e-15);

        let mut all_bad = ErrorStats::new();
        for _ in 0..5 {
            all_bad.record(true, 3, 8);
        }
        assert_eq!(all_bad.fer(), 1.0);
    }

    #[test]
    fn stats_merge_matches_sequential() {
        let mut a = ErrorStats::new();
        let mut b = ErrorStats::new();
        let mut whole = ErrorStats::new();
        for i in 0..20 {
            let fe = i % 3 == 0;
            let errs = (i % 4) as u64;
            if i < 7 {
                a.record(fe, errs, 10);
            } else {
                b.record(fe, errs, 10);
            }
            whole.record(fe, errs, 10);
        }
        let mut merged = a;
        merged.merge(&b);
        assert_eq!(merged, whole);
    }

    #[test]
    fn ci_normal_regime() {
        let s = ErrorStats { frames: 100, frame_errors: 40, info_bits: 0, bit_errors: 0 };
        let hw = s.fer_ci95();
        assert!((hw - 1.96 * (0.4f64 * 0.6 / 100.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn ci_exact_fallback_small_counts() {
        // k = 0: Clopper-Pearson upper bound is 1 - (alpha/2)^(1/n)
        let s = ErrorStats { frames: 50, frame_errors: 0, info_bits: 0, bit_errors: 0 };
        let expect = (1.0 - (0.025f64).powf(1.0 / 50.0)) / 2.0;
        assert!((s.fer_ci95() - expect).abs() < 1e-12, "got {} want {expect}", s.fer_ci95());
        // symmetric at k = n
        let t = ErrorStats { frames: 50, frame_errors: 50, info_bits: 0, bit_errors: 0 };
        assert!((t.fer_ci95() - expect).abs() < 1e-12);
    }
}
