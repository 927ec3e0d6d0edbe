use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use polarfade::channel::FadingProfile;
use polarfade::construction::ConstructionMethod;
use polarfade::polar::{polar_transform, FrozenMap, ScDecoder};
use polarfade::rng;
use polarfade::scheme::{build_plan, decode_received, encode_payload, random_payload, CodePlan, SchemeConfig};
use polarfade::sim;

use rand::Rng;

fn plan(n: usize, b: usize) -> CodePlan {
    build_plan(&SchemeConfig {
        block_len: n,
        blocks: b,
        profile: FadingProfile::with_snr(vec![0.8, 2.0], vec![0.5, 0.5], 1.0).unwrap(),
        epsilon: 0.2,
        method: ConstructionMethod::Bound,
        construction_seed: 0,
    })
    .unwrap()
}

fn bench_transform(c: &mut Criterion) {
    let mut group = c.benchmark_group("transform");
    for n in [1024usize, 2048] {
        let mut rng = rng::substream(1, 0x42454e43, &[n as u64]);
        let bits: Vec<u8> = (0..n).map(|_| u8::from(rng.gen_bool(0.5))).collect();
        group.bench_function(format!("n{n}"), |bch| {
            bch.iter_batched(
                || bits.clone(),
                |mut w| polar_transform(&mut w).unwrap(),
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

fn bench_sc_decode(c: &mut Criterion) {
    let mut group = c.benchmark_group("sc_decode");
    for n in [1024usize, 2048] {
        let mut rng = rng::substream(2, 0x42454e43, &[n as u64]);
        let llrs: Vec<f64> = (0..n).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let frozen = FrozenMap::from_info_set(n, &(0..n / 2).collect::<Vec<_>>()).unwrap();
        let mut dec = ScDecoder::new(n).unwrap();
        group.bench_function(format!("n{n}"), |bch| {
            bch.iter(|| dec.decode(&llrs, &frozen).unwrap())
        });
    }
    group.finish();
}

fn bench_frame_roundtrip(c: &mut Criterion) {
    let mut group = c.benchmark_group("frame");
    for n in [1024usize, 2048] {
        let p = plan(n, 64);
        let payload = random_payload(&p, 3);
        group.bench_function(format!("encode_n{n}"), |bch| {
            bch.iter(|| encode_payload(&p, &payload).unwrap())
        });
        group.bench_function(format!("trial_n{n}"), |bch| {
            let mut t = 0u64;
            bch.iter(|| {
                t += 1;
                sim::run_trial(&p, 9, 0, t).unwrap()
            })
        });
        let x = encode_payload(&p, &payload).unwrap();
        let states = vec![1usize; 64];
        let mut llrs = polarfade::matrix::RealMatrix::zeros(64, n);
        for blk in 0..64 {
            for (dst, &bit) in llrs.row_mut(blk).iter_mut().zip(x.row(blk)) {
                *dst = (1.0 - 2.0 * f64::from(bit)) * 3.5;
            }
        }
        group.bench_function(format!("decode_n{n}"), |bch| {
            bch.iter(|| decode_received(&p, &llrs, &states).unwrap())
        });
    }
    group.finish();
}

// one worker pool against a plain loop over the same trials; the counts
// are identical by construction, only the wall time differs
fn bench_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("batch32");
    group.sample_size(10);
    let p = plan(1024, 64);
    group.bench_function("pooled", |bch| {
        bch.iter(|| sim::run_batch(&p, 4, 0, 32).unwrap())
    });
    group.bench_function("sequential_loop", |bch| {
        bch.iter(|| {
            let mut stats = polarfade::metrics::ErrorStats::new();
            for t in 0..32 {
                let o = sim::run_trial(&p, 4, 0, t).unwrap();
                stats.record(o.frame_error, o.bit_errors, o.info_bits);
            }
            stats
        })
    });
    group.finish();
}

criterion_group!(benches, bench_transform, bench_sc_decode, bench_frame_roundtrip, bench_batch);
criterion_main!(benches);
