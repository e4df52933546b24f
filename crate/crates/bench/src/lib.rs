//! Shared fixtures for the criterion benchmarks.

use recurconnect::synthdata::white_noise;

/// AR(1) series driven by centred uniform noise from a fixed seed.
pub fn ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
    let noise = white_noise(n + 200, seed).expect("n > 0");
    let mut x = 0.0;
    noise
        .into_iter()
        .map(|e| {
            x = phi * x + e - 0.5;
            x
        })
        .skip(200)
        .collect()
}
