use dpso::rng::{RunStream, Slot};
use statrs::distribution::{ChiSquared, ContinuousCDF};

const SAMPLES: u32 = 1_000_000;
const BINS: usize = 100;

// Enumerates addresses across iterations, particles and the three scalar slots.
fn draws() -> impl Iterator<Item = f64> {
    let stream = RunStream::new(42, 0);
    (0..SAMPLES).map(move |n| {
        let slot = [Slot::R1, Slot::R2, Slot::R3][(n % 3) as usize];
        let particle = (n / 3) % 40;
        let iteration = n / 120;
        stream.uniform01(iteration, particle, slot)
    })
}

#[test]
fn mean_of_a_million_draws() {
    let mean = draws().sum::<f64>() / f64::from(SAMPLES);
    assert!((mean - 0.5).abs() < 0.002, "{mean}");
}

#[test]
fn chi_square_uniformity() {
    let mut counts = [0u64; BINS];
    for u in draws() {
        assert!((0.0..1.0).contains(&u));
        counts[(u * BINS as f64) as usize] += 1;
    }
    let expected = f64::from(SAMPLES) / BINS as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let p = ChiSquared::new((BINS - 1) as f64).unwrap().sf(stat);
    assert!(p > 0.01, "chi2 {stat}, p {p}");
}
