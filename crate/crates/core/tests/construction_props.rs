//! Property tests for reliability recursions and the index partition.

use proptest::collection::vec;
use proptest::prelude::*;

use polarfade::construction::{
    bec_z_vector, bsc_z_bound_vector, build_partition, genie_reliability, partition_sizes,
    ConstructionMethod,
};
use polarfade::metrics::binary_entropy;
use polarfade::Error;

proptest! {
    // the recursion redistributes reliability but never creates or
    // destroys it: the mean stays at the seed
    #[test]
    fn bec_mean_conserved(q in 0.0f64..=1.0, stages in 1u32..=10) {
        let z = bec_z_vector(q, stages).unwrap();
        prop_assert!((z.mean() - q).abs() < 1e-12);
    }

    // a strictly worse erasure channel is worse at every index
    #[test]
    fn bec_dominance(q in 0.05f64..0.95, delta in 0.01f64..0.05, stages in 1u32..=8) {
        let worse = bec_z_vector((q + delta).min(1.0), stages).unwrap();
        let better = bec_z_vector(q, stages).unwrap();
        for (w, b) in worse.scores().iter().zip(better.scores()) {
            prop_assert!(w >= b);
        }
    }

    // complementing the index flips the role of erasure and knowledge:
    // z_q[i] + z_{1-q}[~i] = 1 exactly
    #[test]
    fn bec_complement_symmetry(q in 0.0f64..=1.0, stages in 1u32..=10) {
        let z = bec_z_vector(q, stages).unwrap();
        let zc = bec_z_vector(1.0 - q, stages).unwrap();
        let n = z.len();
        for i in 0..n {
            prop_assert!((z.scores()[i] + zc.scores()[n - 1 - i] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bsc_bound_stays_in_unit_interval(p in 0.0f64..=0.5, stages in 1u32..=10) {
        let z = bsc_z_bound_vector(p, stages).unwrap();
        prop_assert!(z.scores().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    // random configurations either build a valid nested partition with
    // the entropy-dictated sizes or fail loudly as unbuildable
    #[test]
    fn random_partitions_are_valid(
        stages in 3u32..=7,
        raw in vec(0.01f64..=0.49, 1..=3),
        epsilon in 0.01f64..0.45,
    ) {
        let n = 1usize << stages;
        let mut crossovers = raw;
        crossovers.sort_by(|a, b| b.total_cmp(a));
        crossovers.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        match build_partition(&crossovers, n, epsilon, ConstructionMethod::Bound, 0) {
            Ok(part) => {
                part.validate().unwrap();
                let (good, mix) = partition_sizes(&crossovers, n, epsilon).unwrap();
                prop_assert_eq!(part.good().len(), good);
                prop_assert_eq!(part.mixture_sizes(), mix);
                // nesting: under each state's bound scores, every good
                // index must be at least as reliable as every index in
                // that state's mixture class
                for (j, m) in part.mixtures().iter().enumerate() {
                    let z = bsc_z_bound_vector(crossovers[j], stages).unwrap();
                    let z = z.scores();
                    let survivors: Vec<usize> = part
                        .good()
                        .iter()
                        .chain(part.mixtures()[..j].iter().flatten())
                        .copied()
                        .collect();
                    let worst_kept = survivors.iter().map(|&i| z[i]).fold(0.0, f64::max);
                    let best_dropped = m.iter().map(|&i| z[i]).fold(f64::INFINITY, f64::min);
                    prop_assert!(worst_kept <= best_dropped);
                }
            }
            Err(Error::Config(_)) => {
                let h = binary_entropy(crossovers[0]).unwrap();
                prop_assert!(n as f64 * (1.0 - h - epsilon) < 1.0);
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}

// empirical genie rates agree with the exact erasure recursion when both
// describe the same channel family ranking
#[test]
fn genie_rates_close_to_symmetric_capacity_split() {
    let trials = 4000;
    let z = genie_reliability(0.11, 5, trials, 99).unwrap();
    // mean of first-error rates is bounded by the raw crossover at one
    // end and polarization pushes the best indices to zero
    let best = z.scores().iter().cloned().fold(f64::INFINITY, f64::min);
    let worst = z.scores().iter().cloned().fold(0.0, f64::max);
    assert_eq!(best, 0.0, "most reliable index should never err in {trials} trials");
    assert!(worst > 0.4, "least reliable index must stay bad, got {worst}");
    // prefix ordering sanity: selecting by genie scores must give a
    // strictly better best-half than the complement
    let mut order: Vec<usize> = (0..32).collect();
    order.sort_by(|&a, &b| z.scores()[a].total_cmp(&z.scores()[b]));
    let top: f64 = order[..16].iter().map(|&i| z.scores()[i]).sum();
    let bottom: f64 = order[16..].iter().map(|&i| z.scores()[i]).sum();
    assert!(top < bottom);
}

// splitting the trial budget across workers cannot change the counts
#[cfg(feature = "parallel")]
#[test]
fn genie_counts_independent_of_worker_count() {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| genie_reliability(0.11, 4, 500, 7).unwrap());
    let b = four.install(|| genie_reliability(0.11, 4, 500, 7).unwrap());
    assert_eq!(a, b);
}
