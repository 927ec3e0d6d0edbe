//! Code construction: per-index reliability estimates and the nested
//! good/mixture/bad index partition across fading states.

use rand::Rng;

use crate::metrics::binary_entropy;
use crate::polar::{stages_for_len, Permutation, ScDecoder};
use crate::rng::{self, derive_seed, ROLE_CONSTRUCT, ROLE_GENIE};
use crate::{exec, Error, Result};

/// How per-index reliabilities are obtained for a BSC.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstructionMethod {
    /// Analytic upper-bound recursion seeded with the Bhattacharyya
    /// parameter 2·sqrt(p(1-p)).
    Bound,
    /// Monte-Carlo estimate of each index's first-error probability under
    /// genie-aided successive decoding.
    Genie { trials: u64 },
}

impl std::fmt::Display for ConstructionMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConstructionMethod::Bound => write!(f, "bound"),
            ConstructionMethod::Genie { .. } => write!(f, "genie"),
        }
    }
}

/// Per-index unreliability scores for one channel, lower is better.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityVector {
    z: Vec<f64>,
}

impl ReliabilityVector {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn scores(&self) -> &[f64] {
        &self.z
    }

    pub fn mean(&self) -> f64 {
        // compensated sum so the n <= 16 mean-conservation identity holds
        // to near machine precision
        let mut sum = 0.0;
        let mut c = 0.0;
        for &x in &self.z {
            let y = x - c;
            let t = sum + y;
            c = (t - sum) - y;
            sum = t;
        }
        sum / self.z.len() as f64
    }
}

/// Exact erasure-probability recursion for a BEC with erasure rate `q`:
/// each doubling maps z to (2z - z^2, z^2) on adjacent index pairs.
pub fn bec_z_vector(q: f64, stages: u32) -> Result<ReliabilityVector> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::domain(format!("erasure probability {q} outside [0,1]")));
    }
    evolve_bhattacharyya(q, stages)
}

/// Bhattacharyya upper-bound recursion for a BSC, seeded with
/// 2·sqrt(p(1-p)). The same doubling map applies; the check-side branch
/// 2z - z^2 is an upper bound there, so every entry dominates the true
/// error probability.
pub fn bsc_z_bound_vector(p: f64, stages: u32) -> Result<ReliabilityVector> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::domain(format!("crossover {p} outside [0,1/2]")));
    }
    evolve_bhattacharyya(2.0 * (p * (1.0 - p)).sqrt(), stages)
}

fn evolve_bhattacharyya(seed: f64, stages: u32) -> Result<ReliabilityVector> {
    if stages > crate::polar::MAX_STAGES {
        return Err(Error::size(format!("{stages} stages exceed supported maximum")));
    }
    let mut z = vec![seed.clamp(0.0, 1.0)];
    for _ in 0..stages {
        let mut next = Vec::with_capacity(2 * z.len());
        for &v in &z {
            next.push((2.0 * v - v * v).clamp(0.0, 1.0));
            next.push(v * v);
        }
        z = next;
    }
    Ok(ReliabilityVector { z })
}

/// Monte-Carlo per-index error rates under genie-aided successive
/// decoding of random codewords over a BSC(p).
///
/// Each trial draws a fresh input, flips codeword bits with probability
/// p, and records which successive decisions would have been wrong given
/// all earlier decisions corrected. Counts are integers, so the result
/// does not depend on how trials are split across workers.
pub fn genie_reliability(p: f64, stages: u32, trials: u64, seed: u64) -> Result<ReliabilityVector> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::domain(format!("crossover {p} outside [0,1/2]")));
    }
    if trials < 100 {
        return Err(Error::config(format!("{trials} genie trials, need at least 100")));
    }
    if stages > crate::polar::MAX_STAGES {
        return Err(Error::size(format!("{stages} stages exceed supported maximum")));
    }
    let n = 1usize << stages;
    let lam = ((1.0 - p) / p).ln();
    const CHUNK: u64 = 512;
    let chunks = trials.div_ceil(CHUNK) as usize;
    let partials: Vec<Result<Vec<u64>>> = exec::map_collect(chunks, |c| {
        let mut decoder = ScDecoder::new(n)?;
        let mut counts = vec![0u64; n];
        let mut word = vec![0u8; n];
        let mut llrs = vec![0.0f64; n];
        let lo = c as u64 * CHUNK;
        let hi = (lo + CHUNK).min(trials);
        for t in lo..hi {
            let mut rng = rng::substream(seed, ROLE_GENIE, &[t]);
            for b in word.iter_mut() {
                *b = u8::from(rng.gen_bool(0.5));
            }
            crate::polar::polar_transform(&mut word)?;
            for (l, &b) in llrs.iter_mut().zip(&word) {
                let flipped = b ^ u8::from(rng.gen_bool(p));
                *l = (1.0 - 2.0 * f64::from(flipped)) * lam;
            }
            // recover the inputs the decisions are judged against
            crate::polar::polar_transform(&mut word)?;
            let flags = decoder.genie_error_flags(&llrs, &word)?;
            for (cnt, err) in counts.iter_mut().zip(&flags) {
                *cnt += u64::from(*err);
            }
        }
        Ok(counts)
    });
    let mut counts = vec![0u64; n];
    for part in partials {
        for (acc, v) in counts.iter_mut().zip(part?) {
            *acc += v;
        }
    }
    let z = counts.into_iter().map(|c| c as f64 / trials as f64).collect();
    Ok(ReliabilityVector { z })
}

/// Indices sorted most reliable first (ascending score, ties broken by
/// ascending index).
pub fn reliability_order(rel: &ReliabilityVector) -> Permutation {
    let mut idx: Vec<usize> = (0..rel.z.len()).collect();
    idx.sort_by(|&a, &b| rel.z[a].total_cmp(&rel.z[b]).then(a.cmp(&b)));
    Permutation::from_image(idx).expect("sorted index list is a bijection")
}

/// Disjoint cover of the code indices: `good` decodes in every state,
/// `mixtures[j]` decodes in states above j only, `bad` is always frozen.
/// All three are sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexPartition {
    n: usize,
    good: Vec<usize>,
    mixtures: Vec<Vec<usize>>,
    bad: Vec<usize>,
}

impl IndexPartition {
    pub fn block_len(&self) -> usize {
        self.n
    }

    pub fn good(&self) -> &[usize] {
        &self.good
    }

    pub fn mixtures(&self) -> &[Vec<usize>] {
        &self.mixtures
    }

    pub fn bad(&self) -> &[usize] {
        &self.bad
    }

    pub fn mixture_sizes(&self) -> Vec<usize> {
        self.mixtures.iter().map(Vec::len).collect()
    }

    /// Checks the structural invariants: each class sorted and strictly
    /// increasing, classes pairwise disjoint, union covering 0..n.
    pub fn validate(&self) -> Result<()> {
        let mut seen = vec![false; self.n];
        let classes =
            std::iter::once(&self.good).chain(self.mixtures.iter()).chain(std::iter::once(&self.bad));
        for class in classes {
            if class.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::domain("partition class not strictly increasing".to_string()));
            }
            for &i in class {
                if i >= self.n {
                    return Err(Error::domain(format!("index {i} out of range")));
                }
                if seen[i] {
                    return Err(Error::domain(format!("index {i} appears in two classes")));
                }
                seen[i] = true;
            }
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err(Error::domain("partition does not cover all indices".to_string()))
        }
    }
}

/// Class sizes dictated by the state entropies: good gets
/// floor(n(1 - H(p_worst) - epsilon)), mixture j gets
/// floor(n(H(p_j) - H(p_{j+1}))), the rest is bad.
pub fn partition_sizes(crossovers: &[f64], n: usize, epsilon: f64) -> Result<(usize, Vec<usize>)> {
    check_crossovers(crossovers)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(format!("slack {epsilon} outside (0,1)")));
    }
    let nf = n as f64;
    let h: Vec<f64> = crossovers.iter().map(|&p| binary_entropy(p)).collect::<Result<_>>()?;
    let good_target = nf * (1.0 - h[0] - epsilon);
    if good_target < 1.0 {
        return Err(Error::config(format!(
            "no room for always-decodable indices: n(1 - H(p_worst) - eps) = {good_target:.3}"
        )));
    }
    let good = good_target.floor() as usize;
    let mixtures: Vec<usize> =
        h.windows(2).map(|w| (nf * (w[0] - w[1])).max(0.0).floor() as usize).collect();
    let used = good + mixtures.iter().sum::<usize>();
    debug_assert!(used <= n, "entropy budget exceeds block length");
    Ok((good, mixtures))
}

fn check_crossovers(crossovers: &[f64]) -> Result<()> {
    if crossovers.is_empty() {
        return Err(Error::size("need at least one channel state".to_string()));
    }
    for &p in crossovers {
        if !(0.0..=0.5).contains(&p) {
            return Err(Error::domain(format!("crossover {p} outside [0,1/2]")));
        }
    }
    if crossovers.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::domain("crossovers must be strictly descending".to_string()));
    }
    Ok(())
}

/// Reliability scores per state, worst channel first, matching the order
/// of `crossovers`.
pub fn state_reliabilities(
    crossovers: &[f64],
    n: usize,
    method: ConstructionMethod,
    seed: u64,
) -> Result<Vec<ReliabilityVector>> {
    check_crossovers(crossovers)?;
    let stages = stages_for_len(n)?;
    crossovers
        .iter()
        .enumerate()
        .map(|(s, &p)| match method {
            ConstructionMethod::Bound => bsc_z_bound_vector(p, stages),
            ConstructionMethod::Genie { trials } => {
                genie_reliability(p, stages, trials, derive_seed(seed, ROLE_CONSTRUCT, &[s as u64]))
            }
        })
        .collect()
}

/// Builds the nested partition from per-state reliabilities.
///
/// The combined info support is the most reliable good+mixture slice of
/// the best state's order; peeling one state at a time, the slice shrinks
/// by that state's mixture size, keeping the subset most reliable under
/// the next-worse channel. Nesting is by construction: each class of
/// survivors is a subset of the previous one.
pub fn partition_from_reliabilities(
    z: &[ReliabilityVector],
    n: usize,
    good_size: usize,
    mixture_sizes: &[usize],
) -> Result<IndexPartition> {
    if z.is_empty() || z.len() != mixture_sizes.len() + 1 {
        return Err(Error::size(format!(
            "{} reliability vectors for {} mixture classes",
            z.len(),
            mixture_sizes.len()
        )));
    }
    if z.iter().any(|v| v.len() != n) {
        return Err(Error::size(format!("reliability vectors must have length {n}")));
    }
    let k_total = good_size + mixture_sizes.iter().sum::<usize>();
    if k_total > n {
        return Err(Error::size(format!("{k_total} assigned indices exceed block length {n}")));
    }
    let states = z.len();
    let best_order = reliability_order(&z[states - 1]);
    let mut survivors: Vec<usize> = best_order.as_slice()[..k_total].to_vec();
    let mut mixtures: Vec<Vec<usize>> = vec![Vec::new(); states - 1];
    for j in (0..states - 1).rev() {
        let scores = z[j].scores();
        survivors.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
        let keep = survivors.len() - mixture_sizes[j];
        let mut dropped = survivors.split_off(keep);
        dropped.sort_unstable();
        mixtures[j] = dropped;
    }
    let mut good = survivors;
    good.sort_unstable();
    let mut in_use = vec![false; n];
    for &i in good.iter().chain(mixtures.iter().flatten()) {
        in_use[i] = true;
    }
    let bad = (0..n).filter(|&i| !in_use[i]).collect();
    let part = IndexPartition { n, good, mixtures, bad };
    part.validate()?;
    Ok(part)
}

/// End-to-end partition construction for a list of per-state crossovers
/// (worst first).
pub fn build_partition(
    crossovers: &[f64],
    n: usize,
    epsilon: f64,
    method: ConstructionMethod,
    seed: u64,
) -> Result<IndexPartition> {
    let (good_size, mixture_sizes) = partition_sizes(crossovers, n, epsilon)?;
    let z = state_reliabilities(crossovers, n, method, seed)?;
    partition_from_reliabilities(&z, n, good_size, &mixture_sizes)
}
