//! Hyperspherical ↔ Cartesian coordinates.
//!
//! `x_1 = r cos θ_1`, `x_k = r sin θ_1 ⋯ sin θ_{k-1} cos θ_k`,
//! `x_d = r sin θ_1 ⋯ sin θ_{d-1}`, with `θ_k ∈ [0, π]` for `k < d-1` and
//! `θ_{d-1} ∈ [0, 2π)`.

use std::f64::consts::PI;

/// Writes the Cartesian point for `(r, angles)` into `out` (length `d`).
pub fn to_cartesian(r: f64, angles: &[f64], out: &mut [f64]) {
    let d = angles.len() + 1;
    debug_assert_eq!(out.len(), d);
    let mut sin_prod = r;
    for (k, &theta) in angles.iter().enumerate() {
        out[k] = sin_prod * theta.cos();
        sin_prod *= theta.sin();
    }
    out[d - 1] = sin_prod;
}

/// Inverse of [`to_cartesian`]; `angles` must have length `d - 1`.
pub fn to_hyperspherical(x: &[f64], angles: &mut [f64]) -> f64 {
    let d = x.len();
    debug_assert_eq!(angles.len(), d - 1);
    // tail[k] = sqrt(x_k² + … + x_d²) (0-based)
    let mut tail = 0.0f64;
    let mut tails = vec![0.0; d];
    for k in (0..d).rev() {
        tail = tail.hypot(x[k]);
        tails[k] = tail;
    }
    for k in 0..d.saturating_sub(2) {
        angles[k] = tails[k + 1].atan2(x[k]);
    }
    if d >= 2 {
        let mut phi = x[d - 1].atan2(x[d - 2]);
        if phi < 0.0 {
            phi += 2.0 * PI;
        }
        if phi >= 2.0 * PI {
            phi = 0.0;
        }
        angles[d - 2] = phi;
    }
    tails[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let cases: [(f64, Vec<f64>); 4] = [
            (1.5, vec![0.3]),
            (2.0, vec![0.3, 5.0]),
            (0.7, vec![2.9, 0.1, 4.0]),
            (3.0, vec![1.0, 2.0, 0.5, 6.0]),
        ];
        for (r, angles) in cases {
            let mut x = vec![0.0; angles.len() + 1];
            to_cartesian(r, &angles, &mut x);
            let norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - r).abs() < 1e-14);
            let mut back = vec![0.0; angles.len()];
            let rr = to_hyperspherical(&x, &mut back);
            assert!((rr - r).abs() < 1e-14);
            for (a, b) in angles.iter().zip(&back) {
                assert!((a - b).abs() < 1e-12, "{angles:?} vs {back:?}");
            }
        }
    }

    #[test]
    fn axis_conventions() {
        let mut x = [0.0; 3];
        to_cartesian(1.0, &[0.0, 0.0], &mut x);
        assert_eq!(x, [1.0, 0.0, 0.0]);
        to_cartesian(2.0, &[PI / 2.0, PI / 2.0], &mut x);
        assert!((x[2] - 2.0).abs() < 1e-15 && x[0].abs() < 1e-15);
    }
}
