//! Polar transform and successive cancellation decoding.
//!
//! ## Conventions
//!
//! The transform is `x = u · G` with `G = B · F^{⊗n}`, where `F` is the
//! lower-triangular kernel `[[1,0],[1,1]]` and `B` the bit-reversal
//! permutation. Since `B` and `F^{⊗n}` commute and both square to the
//! identity, the transform is an involution: applying it twice returns
//! the input.
//!
//! LLRs follow `log(W(y|0)/W(y|1))`: positive favors bit 0, `+inf`/`-inf`
//! are certainties, `0.0` is an erasure, NaN is never valid. The check
//! node uses the exact boxplus rule (not min-sum) so three-valued erasure
//! inputs propagate exactly; conflicting certainties at a variable node
//! collapse to an erasure. Ties (`llr == 0`) decode to bit 0.
//!
//! Decisions are made in natural index order `u_0, u_1, ...`; internally
//! the decoder works on the bit-reversed channel ordering, which makes
//! the per-index reliabilities line up with the adjacent-split recursion
//! used in [`crate::construction`].

use crate::{Error, Result};

/// Ceiling on the number of polarization stages (block length 2^24).
pub const MAX_STAGES: u32 = 24;

/// Checks that `n` is a supported block length; returns `log2(n)`.
pub fn stages_for_len(n: usize) -> Result<u32> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::size(format!("block length {n} is not a power of two")));
    }
    let stages = n.trailing_zeros();
    if stages > MAX_STAGES {
        return Err(Error::size(format!(
            "block length {n} exceeds the 2^{MAX_STAGES} ceiling"
        )));
    }
    Ok(stages)
}

fn bit_reverse(i: usize, stages: u32) -> usize {
    if stages == 0 {
        return 0;
    }
    ((i as u64).reverse_bits() >> (64 - stages)) as usize
}

/// A permutation of `0..n`, stored as `image[k] = π(k)`.
///
/// `apply` gathers: `out[k] = src[π(k)]`. Reliability orders use the same
/// type with `π(k)` = the k-th most reliable index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn from_image(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &j in &image {
            if j >= n || seen[j] {
                return Err(Error::domain("permutation image is not a bijection".to_string()));
            }
            seen[j] = true;
        }
        Ok(Permutation(image))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn apply<T: Copy>(&self, src: &[T]) -> Vec<T> {
        assert_eq!(src.len(), self.0.len());
        self.0.iter().map(|&j| src[j]).collect()
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (k, &j) in self.0.iter().enumerate() {
            inv[j] = k;
        }
        Permutation(inv)
    }
}

/// The bit-reversal permutation on `2^stages` indices. Self-inverse.
pub fn bit_reversal_permutation(stages: u32) -> Result<Permutation> {
    if stages > MAX_STAGES {
        return Err(Error::size(format!("{stages} stages exceeds the {MAX_STAGES} ceiling")));
    }
    let n = 1usize << stages;
    Ok(Permutation((0..n).map(|i| bit_reverse(i, stages)).collect()))
}

/// In-place polar transform `x = u · B · F^{⊗n}` over GF(2).
///
/// O(N log N); involution (self-inverse) and linear over XOR.
pub fn polar_transform(bits: &mut [u8]) -> Result<()> {
    let stages = stages_for_len(bits.len())?;
    let n = bits.len();
    debug_assert!(bits.iter().all(|&b| b <= 1));
    for i in 0..n {
        let j = bit_reverse(i, stages);
        if i < j {
            bits.swap(i, j);
        }
    }
    let mut step = 1;
    while step < n {
        let mut blk = 0;
        while blk < n {
            for i in blk..blk + step {
                bits[i] ^= bits[i + step];
            }
            blk += 2 * step;
        }
        step <<= 1;
    }
    Ok(())
}

/// Exact boxplus check-node rule: `2·atanh(tanh(a/2)·tanh(b/2))`.
///
/// Erasures absorb (`0` in ⇒ `0` out); certainties pass the other
/// argument through with the product sign. Never NaN.
pub fn llr_check(a: f64, b: f64) -> f64 {
    debug_assert!(!a.is_nan() && !b.is_nan());
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    if a.is_infinite() {
        return if a > 0.0 { b } else { -b };
    }
    if b.is_infinite() {
        return if b > 0.0 { a } else { -a };
    }
    // sign·min plus the exact correction; stable for large arguments
    let s = if (a > 0.0) == (b > 0.0) { 1.0 } else { -1.0 };
    let m = a.abs().min(b.abs());
    s * m + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
}

/// Variable-node rule with a known earlier decision:
/// `b + (1-2u)·a`. Conflicting certainties collapse to an erasure.
pub fn llr_variable(a: f64, b: f64, u_prev: u8) -> f64 {
    debug_assert!(!a.is_nan() && !b.is_nan());
    debug_assert!(u_prev <= 1);
    let c = if u_prev == 0 { a } else { -a };
    let t = c + b;
    if t.is_nan() {
        0.0
    } else {
        t
    }
}

/// Per-index designation: carries an information bit, or frozen to a
/// known value (possibly a dynamically recovered one).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Info,
    Frozen(u8),
}

/// Designation of every index of a block, in natural order.
#[derive(Debug, Clone)]
pub struct FrozenMap {
    slots: Vec<Slot>,
}

impl FrozenMap {
    /// Everything frozen to zero.
    pub fn all_frozen(n: usize) -> Self {
        FrozenMap { slots: vec![Slot::Frozen(0); n] }
    }

    /// Info at the given indices, zero-frozen elsewhere.
    pub fn from_info_set(n: usize, info: &[usize]) -> Result<Self> {
        let mut slots = vec![Slot::Frozen(0); n];
        for &i in info {
            if i >= n {
                return Err(Error::domain(format!("info index {i} out of range for length {n}")));
            }
            if slots[i] == Slot::Info {
                return Err(Error::domain(format!("info index {i} listed twice")));
            }
            slots[i] = Slot::Info;
        }
        Ok(FrozenMap { slots })
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slot(&self, i: usize) -> Slot {
        self.slots[i]
    }

    pub fn set(&mut self, i: usize, s: Slot) {
        self.slots[i] = s;
    }

    pub fn info_count(&self) -> usize {
        self.slots.iter().filter(|s| **s == Slot::Info).count()
    }

    pub fn info_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(i, s)| (*s == Slot::Info).then_some(i))
    }
}

/// Successive cancellation decoder with preallocated scratch.
///
/// One instance serves any number of decodes at a fixed block length;
/// decoding allocates nothing beyond the returned vector.
pub struct ScDecoder {
    stages: u32,
    // llr[l] and left[l] hold 2^l entries; left[l] stores the left
    // child's re-encoded codeword while the right child is processed.
    llr: Vec<Vec<f64>>,
    left: Vec<Vec<u8>>,
    cw: Vec<u8>,
    u: Vec<u8>,
}

impl ScDecoder {
    pub fn new(block_len: usize) -> Result<Self> {
        let stages = stages_for_len(block_len)?;
        Ok(ScDecoder {
            stages,
            llr: (0..=stages).map(|l| vec![0.0; 1 << l]).collect(),
            left: (0..stages).map(|l| vec![0; 1 << l]).collect(),
            cw: vec![0; block_len],
            u: vec![0; block_len],
        })
    }

    pub fn block_len(&self) -> usize {
        1 << self.stages
    }

    fn check_llrs(&self, llrs: &[f64]) -> Result<()> {
        if llrs.len() != self.block_len() {
            return Err(Error::size(format!(
                "llr length {} does not match block length {}",
                llrs.len(),
                self.block_len()
            )));
        }
        if llrs.iter().any(|x| x.is_nan()) {
            return Err(Error::domain("llr vector contains NaN".to_string()));
        }
        Ok(())
    }

    fn run(&mut self, llrs: &[f64], decide: &mut dyn FnMut(usize, f64) -> u8) {
        let stages = self.stages;
        let top = &mut self.llr[stages as usize];
        for (i, slot) in top.iter_mut().enumerate() {
            *slot = llrs[bit_reverse(i, stages)];
        }
        sc_rec(&mut self.llr, &mut self.left, &mut self.cw, &mut self.u, 0, decide);
    }

    /// Decodes against a frozen map; returns the full natural-order
    /// input-vector estimate (frozen values included).
    pub fn decode(&mut self, llrs: &[f64], frozen: &FrozenMap) -> Result<Vec<u8>> {
        Ok(self.decode_flagged(llrs, frozen)?.0)
    }

    /// Like [`decode`](Self::decode), additionally reporting whether
    /// every info decision was made on a nonzero LLR (no guessed ties).
    pub fn decode_flagged(&mut self, llrs: &[f64], frozen: &FrozenMap) -> Result<(Vec<u8>, bool)> {
        self.check_llrs(llrs)?;
        if frozen.len() != self.block_len() {
            return Err(Error::size(format!(
                "frozen map length {} does not match block length {}",
                frozen.len(),
                self.block_len()
            )));
        }
        let mut clean = true;
        self.run(llrs, &mut |i, llr| match frozen.slot(i) {
            Slot::Frozen(v) => v,
            Slot::Info => {
                if llr == 0.0 {
                    clean = false;
                }
                u8::from(llr < 0.0)
            }
        });
        Ok((self.u.clone(), clean))
    }

    /// Genie-aided pass: every index is decided, compared against the
    /// true input, then corrected. Returns the per-index first-decision
    /// error flags used by Monte-Carlo construction.
    pub fn genie_error_flags(&mut self, llrs: &[f64], truth: &[u8]) -> Result<Vec<bool>> {
        self.check_llrs(llrs)?;
        if truth.len() != self.block_len() {
            return Err(Error::size("truth length does not match block length".to_string()));
        }
        let mut flags = vec![false; self.block_len()];
        self.run(llrs, &mut |i, llr| {
            let d = u8::from(llr < 0.0);
            flags[i] = d != truth[i];
            truth[i]
        });
        Ok(flags)
    }
}

// llr_levels holds levels 0..=l for the current node (last = this node's
// input), left_levels holds levels 0..l. `cw` receives the node's
// re-encoded codeword; decisions land in `u[..]` at global index `base`.
fn sc_rec(
    llr_levels: &mut [Vec<f64>],
    left_levels: &mut [Vec<u8>],
    cw: &mut [u8],
    u: &mut [u8],
    base: usize,
    decide: &mut dyn FnMut(usize, f64) -> u8,
) {
    let (cur, lower) = llr_levels.split_last_mut().expect("level underflow");
    let n = cur.len();
    if n == 1 {
        let bit = decide(base, cur[0]);
        u[0] = bit;
        cw[0] = bit;
        return;
    }
    let half = n / 2;
    let (lbuf, lower_left) = left_levels.split_last_mut().expect("level underflow");
    {
        let next = lower.last_mut().expect("level underflow");
        for i in 0..half {
            next[i] = llr_check(cur[i], cur[i + half]);
        }
    }
    let (ul, ur) = u.split_at_mut(half);
    sc_rec(lower, lower_left, lbuf, ul, base, decide);
    {
        let next = lower.last_mut().expect("level underflow");
        for i in 0..half {
            next[i] = llr_variable(cur[i], cur[i + half], lbuf[i]);
        }
    }
    let (cl, cr) = cw.split_at_mut(half);
    sc_rec(lower, lower_left, cr, ur, base + half, decide);
    for i in 0..half {
        cl[i] = lbuf[i] ^ cr[i];
    }
}
