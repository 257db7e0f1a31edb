//! Deterministic direction sets in the plane and in space.

use std::f64::consts::TAU;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// `count` directions in dimension `dim` (2 or 3) as Euclidean unit vectors.
///
/// In the plane the set is evenly spaced with a golden-ratio phase; in space a
/// Fibonacci lattice is used. Both are reproducible and low-discrepancy.
pub fn unit_directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        2 => (0..count)
            .map(|k| {
                let a = TAU * (k as f64 + GOLDEN) / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        3 => (0..count)
            .map(|k| {
                let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
                let r = (1.0 - z * z).max(0.0).sqrt();
                let a = TAU * GOLDEN * k as f64;
                vec![r * a.cos(), r * a.sin(), z]
            })
            .collect(),
        _ => panic!("unsupported dimension {dim}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_length_and_spread() {
        for dim in [2, 3] {
            let d = unit_directions(dim, 64);
            assert_eq!(d.len(), 64);
            let mut mean = vec![0.0; dim];
            for v in &d {
                let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!((n - 1.0).abs() < 1e-12);
                for i in 0..dim {
                    mean[i] += v[i] / 64.0;
                }
            }
            assert!(mean.iter().all(|m| m.abs() < 0.05), "{mean:?}");
        }
    }
}
