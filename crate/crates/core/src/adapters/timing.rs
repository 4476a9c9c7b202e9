use std::hint::black_box;
use std::time::Instant;

use super::{AdapterError, Result};

/// Converts a measured wall time into reference-machine seconds.
pub fn normalize_time(wall_time_s: f64, machine_factor: f64) -> Result<f64> {
    if !(machine_factor > 0.0 && machine_factor.is_finite()) {
        return Err(AdapterError::NonPositiveFactor(machine_factor));
    }
    Ok(wall_time_s * machine_factor)
}

const CALIBRATION_SIZE: usize = 160;
/// Seconds one calibration multiply takes on the reference machine.
const REFERENCE_MATMUL_S: f64 = 0.012;

fn matmul_seconds(n: usize) -> f64 {
    let a: Vec<f64> = (0..n * n).map(|i| (i % 17) as f64 * 0.5).collect();
    let b: Vec<f64> = (0..n * n).map(|i| (i % 13) as f64 * 0.25).collect();
    let mut c = vec![0.0; n * n];
    let started = Instant::now();
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    black_box(&c);
    started.elapsed().as_secs_f64()
}

/// Estimates the machine factor from a fixed-size matrix multiply, taking the
/// best of five runs against a stored reference timing. A machine twice as
/// fast as the reference gets factor 2.
pub fn calibrate_machine_factor() -> f64 {
    let best = (0..5)
        .map(|_| matmul_seconds(CALIBRATION_SIZE))
        .fold(f64::INFINITY, f64::min)
        .max(1e-9);
    REFERENCE_MATMUL_S / best
}
