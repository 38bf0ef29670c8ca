//! Savitzky–Golay smoothing with mirror padding.

use nalgebra::{DMatrix, DVector};

/// Smoothing weights for the centre of a `window`-long least-squares
/// polynomial fit of degree `order`.
///
/// Row 0 of `(VᵀV)⁻¹Vᵀ`, where `V` is the Vandermonde matrix over offsets
/// `−m..=m`.
pub fn coefficients(window: usize, order: usize) -> Vec<f64> {
    assert!(window % 2 == 1 && window > order, "window must be odd and exceed the order");
    let m = (window / 2) as i64;
    let v = DMatrix::from_fn(window, order + 1, |i, j| ((i as i64 - m) as f64).powi(j as i32));
    let vtv = v.transpose() * &v;
    let inv = vtv.try_inverse().expect("Vandermonde normal matrix is invertible for window > order");
    let h = inv * v.transpose();
    h.row(0).iter().copied().collect()
}

/// Index into `0..n` reflected about the end samples (the end sample itself
/// is not repeated): `−1 → 1`, `n → n − 2`.
fn mirror(i: i64, n: usize) -> usize {
    let n = n as i64;
    if n == 1 {
        return 0;
    }
    let period = 2 * (n - 1);
    let mut k = i.rem_euclid(period);
    if k >= n {
        k = period - k;
    }
    k as usize
}

/// Applies the filter. `signal.len()` must be at least 1.
pub fn smooth(signal: &[f64], window: usize, order: usize) -> Vec<f64> {
    let coeffs = coefficients(window, order);
    let m = (window / 2) as i64;
    let n = signal.len();
    let padded = DVector::from_iterator(n + 2 * m as usize, (-m..n as i64 + m).map(|i| signal[mirror(i, n)]));
    (0..n)
        .map(|i| coeffs.iter().enumerate().map(|(j, c)| c * padded[i + j]).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_five_point_quadratic_weights() {
        // Tabulated: (−3, 12, 17, 12, −3) / 35.
        let c = coefficients(5, 2);
        let expect = [-3.0, 12.0, 17.0, 12.0, -3.0].map(|x| x / 35.0);
        for (a, b) in c.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn weights_sum_to_one() {
        for (w, p) in [(5, 0), (7, 1), (11, 3), (21, 4)] {
            let s: f64 = coefficients(w, p).iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mirror_indexing() {
        assert_eq!(mirror(-1, 5), 1);
        assert_eq!(mirror(-2, 5), 2);
        assert_eq!(mirror(5, 5), 3);
        assert_eq!(mirror(6, 5), 2);
        assert_eq!(mirror(2, 5), 2);
    }

    #[test]
    fn quadratic_is_altered_by_linear_fit() {
        // For f(x) = x², a 5-point linear (equivalently order 0/1) fit gives
        // the window mean: (x−2)²+…+(x+2)² over 5 = x² + 2.
        let x: Vec<f64> = (0..30).map(|i| (i as f64).powi(2)).collect();
        let y = smooth(&x, 5, 1);
        for i in 2..28 {
            assert!((y[i] - (x[i] + 2.0)).abs() < 1e-9);
        }
        let y2 = smooth(&x, 5, 2);
        for i in 2..28 {
            assert!((y2[i] - x[i]).abs() < 1e-9);
        }
    }
}
