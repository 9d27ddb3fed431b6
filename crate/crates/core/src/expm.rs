//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 or 13 (Higham 2005).

use nalgebra::{DMatrix, SMatrix};

const THETA_3: f64 = 1.495_585_217_958_292e-2;
const THETA_5: f64 = 2.539_398_330_063_23e-1;
const THETA_7: f64 = 9.504_178_996_162_932e-1;
const THETA_9: f64 = 2.097_847_961_257_068;
const THETA_13: f64 = 5.371_920_351_148_152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17_297_280.0,
    8_648_640.0,
    1_995_840.0,
    277_200.0,
    25_200.0,
    1512.0,
    56.0,
    1.0,
];
const B9: [f64; 10] = [
    17_643_225_600.0,
    8_821_612_800.0,
    2_075_673_600.0,
    302_702_400.0,
    30_270_240.0,
    2_162_160.0,
    110_880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

fn one_norm<const N: usize>(a: &SMatrix<f64, N, N>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Odd/even split `(U, V)` of a low-degree Padé numerator.
fn pade_low<const N: usize>(a: &SMatrix<f64, N, N>, b: &[f64]) -> (SMatrix<f64, N, N>, SMatrix<f64, N, N>) {
    let id = SMatrix::<f64, N, N>::identity();
    let a2 = a * a;
    let mut power = id;
    let mut u = id * b[1];
    let mut v = id * b[0];
    for k in 1..b.len() / 2 {
        power *= a2;
        u += power * b[2 * k + 1];
        v += power * b[2 * k];
    }
    (a * u, v)
}

fn pade_13<const N: usize>(a: &SMatrix<f64, N, N>) -> (SMatrix<f64, N, N>, SMatrix<f64, N, N>) {
    let b = &B13;
    let id = SMatrix::<f64, N, N>::identity();
    let a2 = a * a;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let u_inner = a6 * b[13] + a4 * b[11] + a2 * b[9];
    let u = a * (a6 * u_inner + a6 * b[7] + a4 * b[5] + a2 * b[3] + id * b[1]);
    let v_inner = a6 * b[12] + a4 * b[10] + a2 * b[8];
    let v = a6 * v_inner + a6 * b[6] + a4 * b[4] + a2 * b[2] + id * b[0];
    (u, v)
}

/// `exp(a)` for a small dense real matrix.
pub fn expm<const N: usize>(a: &SMatrix<f64, N, N>) -> SMatrix<f64, N, N> {
    let norm = one_norm(a);
    let (u, v, squarings) = if norm <= THETA_3 {
        let (u, v) = pade_low(a, &B3);
        (u, v, 0)
    } else if norm <= THETA_5 {
        let (u, v) = pade_low(a, &B5);
        (u, v, 0)
    } else if norm <= THETA_7 {
        let (u, v) = pade_low(a, &B7);
        (u, v, 0)
    } else if norm <= THETA_9 {
        let (u, v) = pade_low(a, &B9);
        (u, v, 0)
    } else {
        let s = (norm / THETA_13).log2().ceil().max(0.0) as i32;
        let scaled = a * 2f64.powi(-s);
        let (u, v) = pade_13(&scaled);
        (u, v, s)
    };
    // (V − U)⁻¹ (V + U); V − U is well conditioned for these norm bounds
    let p = DMatrix::from_column_slice(N, N, (v + u).as_slice());
    let q = DMatrix::from_column_slice(N, N, (v - u).as_slice());
    let solved = q
        .lu()
        .solve(&p)
        .expect("Padé denominator is nonsingular within the scaling bounds");
    let mut r = SMatrix::<f64, N, N>::from_column_slice(solved.as_slice());
    for _ in 0..squarings {
        r = r * r;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix2, Matrix3, Matrix4};

    fn max_abs<const N: usize>(m: &SMatrix<f64, N, N>) -> f64 {
        m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    #[test]
    fn zero_gives_identity() {
        assert_eq!(expm(&Matrix4::<f64>::zeros()), Matrix4::identity());
    }

    #[test]
    fn diagonal_matrix() {
        let a = Matrix3::from_diagonal(&nalgebra::Vector3::new(-2.0, 0.5, 3.0));
        let e = expm(&a);
        for (i, d) in [-2.0f64, 0.5, 3.0].iter().enumerate() {
            assert!((e[(i, i)] - d.exp()).abs() <= 1e-13 * d.exp());
        }
    }

    #[test]
    fn rotation_generator_over_many_scales() {
        for &theta in &[1e-3f64, 0.1, 0.9, 2.0, 5.0, 40.0, 300.0] {
            let a = Matrix2::new(0.0, theta, -theta, 0.0);
            let expected = Matrix2::new(theta.cos(), theta.sin(), -theta.sin(), theta.cos());
            let err = max_abs(&(expm(&a) - expected));
            assert!(err < 1e-13 * theta.max(1.0), "theta {theta}: err {err:e}");
        }
    }

    #[test]
    fn nilpotent_jordan_block() {
        let a = Matrix3::new(0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0) * 7.0;
        let expected = Matrix3::new(1.0, 7.0, 24.5, 0.0, 1.0, 7.0, 0.0, 0.0, 1.0);
        assert!(max_abs(&(expm(&a) - expected)) < 1e-12);
    }

    #[test]
    fn agrees_with_nalgebra_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let scale = rng.random_range(0.01..8.0);
            let a = Matrix4::from_fn(|_, _| rng.random_range(-1.0..1.0) * scale);
            let reference = a.exp();
            let err = max_abs(&(expm(&a) - reference)) / max_abs(&reference).max(1.0);
            assert!(err < 1e-11, "scale {scale}: err {err:e}");
        }
    }
}
