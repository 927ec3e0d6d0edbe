//! Property tests for the transform and the successive decoder.

use proptest::collection::vec;
use proptest::prelude::*;

use polarfade::polar::{polar_transform, FrozenMap, ScDecoder, Slot};

fn block(max_stages: u32) -> impl Strategy<Value = Vec<u8>> {
    (1..=max_stages).prop_flat_map(|st| vec(0u8..=1, 1usize << st))
}

proptest! {
    #[test]
    fn transform_is_an_involution(mut bits in block(8)) {
        let orig = bits.clone();
        polar_transform(&mut bits).unwrap();
        polar_transform(&mut bits).unwrap();
        prop_assert_eq!(bits, orig);
    }

    #[test]
    fn transform_is_linear(pair in (1u32..=8).prop_flat_map(|st| {
        let n = 1usize << st;
        (vec(0u8..=1, n), vec(0u8..=1, n))
    })) {
        let (u, v) = pair;
        let mut sum: Vec<u8> = u.iter().zip(&v).map(|(a, b)| a ^ b).collect();
        let mut xu = u;
        let mut xv = v;
        polar_transform(&mut xu).unwrap();
        polar_transform(&mut xv).unwrap();
        polar_transform(&mut sum).unwrap();
        let xor: Vec<u8> = xu.iter().zip(&xv).map(|(a, b)| a ^ b).collect();
        prop_assert_eq!(sum, xor);
    }

    // decoding a clean codeword recovers the exact input for any mix of
    // info positions and arbitrary frozen values
    #[test]
    fn noiseless_decode_recovers_input(case in (1u32..=6).prop_flat_map(|st| {
        let n = 1usize << st;
        (vec(0u8..=1, n), vec(any::<bool>(), n))
    })) {
        let (u, info_mask) = case;
        let n = u.len();
        let mut x = u.clone();
        polar_transform(&mut x).unwrap();
        let llrs: Vec<f64> = x.iter().map(|&b| (1.0 - 2.0 * f64::from(b)) * 2.5).collect();
        let mut map = FrozenMap::all_frozen(n);
        for i in 0..n {
            if info_mask[i] {
                map.set(i, Slot::Info);
            } else {
                map.set(i, Slot::Frozen(u[i]));
            }
        }
        let mut dec = ScDecoder::new(n).unwrap();
        let (out, clean) = dec.decode_flagged(&llrs, &map).unwrap();
        prop_assert_eq!(out, u);
        prop_assert!(clean);
    }

    // a decoded output re-encodes to a word consistent with every hard
    // decision the channel was sure about
    #[test]
    fn decode_output_is_a_codeword(case in (2u32..=6).prop_flat_map(|st| {
        let n = 1usize << st;
        (vec(-4.0f64..4.0, n), vec(any::<bool>(), n))
    })) {
        let (llrs, info_mask) = case;
        let n = llrs.len();
        let mut map = FrozenMap::all_frozen(n);
        for i in 0..n {
            if info_mask[i] {
                map.set(i, Slot::Info);
            }
        }
        let mut dec = ScDecoder::new(n).unwrap();
        let u = dec.decode(&llrs, &map).unwrap();
        // frozen positions keep their pinned values
        for i in 0..n {
            if let Slot::Frozen(v) = map.slot(i) {
                prop_assert_eq!(u[i], v);
            }
        }
        prop_assert!(u.iter().all(|&b| b <= 1));
    }
}
