use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::symplectic_deviation;

/// Tolerance on `‖SᵀJS − J‖_max` accepted by [`bogoliubov_blocks`].
pub const SYMPLECTIC_TOL: f64 = 1e-8;

/// Blocks of the ladder-operator propagator
/// `(a_x, a_y, a_x†, a_y†)(t) = [[U, V], [V*, U*]] (a_x, a_y, a_x†, a_y†)(0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovBlocks {
    pub u: Matrix2<Complex64>,
    pub v: Matrix2<Complex64>,
}

impl BogoliubovBlocks {
    /// `max |U U† − V V† − I|`.
    pub fn commutator_residual(&self) -> f64 {
        let r = self.u * self.u.adjoint() - self.v * self.v.adjoint() - Matrix2::identity();
        r.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |U Vᵀ − V Uᵀ|`.
    pub fn symmetry_residual(&self) -> f64 {
        let r = self.u * self.v.transpose() - self.v * self.u.transpose();
        r.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Change of basis from `(x, p_x, y, p_y)` to `(a_x, a_y, a_x†, a_y†)` with
/// `a = (x + i p)/√2`.
fn ladder_basis() -> (Matrix4<Complex64>, Matrix4<Complex64>) {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let ih = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
    let z = Complex64::new(0.0, 0.0);
    #[rustfmt::skip]
    let to_ladder = Matrix4::new(
        h,  ih, z,  z,
        z,  z,  h,  ih,
        h, -ih, z,  z,
        z,  z,  h, -ih,
    );
    #[rustfmt::skip]
    let from_ladder = Matrix4::new(
        h,   z,   h,  z,
        -ih, z,   ih, z,
        z,   h,   z,  h,
        z,  -ih,  z,  ih,
    );
    (to_ladder, from_ladder)
}

pub fn bogoliubov_blocks(propagator: &Matrix4<f64>) -> Result<BogoliubovBlocks> {
    let deviation = symplectic_deviation(propagator);
    if deviation > SYMPLECTIC_TOL {
        return Err(Error::NotSymplectic { deviation });
    }
    let (to_ladder, from_ladder) = ladder_basis();
    let complex = to_ladder * propagator.map(|v| Complex64::new(v, 0.0)) * from_ladder;
    Ok(BogoliubovBlocks {
        u: complex.fixed_view::<2, 2>(0, 0).into_owned(),
        v: complex.fixed_view::<2, 2>(0, 2).into_owned(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{build_generator, propagator};
    use crate::model::ModelParams;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_change_is_inverse_pair() {
        let (a, b) = ladder_basis();
        let err = (a * b - Matrix4::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-15);
    }

    #[test]
    fn identity_propagator() {
        let blocks = bogoliubov_blocks(&Matrix4::identity()).unwrap();
        assert!((blocks.u - Matrix2::identity()).iter().all(|z| z.norm() < 1e-15));
        assert!(blocks.v.iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn rejects_non_symplectic() {
        let s = Matrix4::identity() * 2.0;
        assert!(matches!(bogoliubov_blocks(&s), Err(Error::NotSymplectic { .. })));
    }

    #[test]
    fn uncoupled_blocks_match_single_mode_solutions() {
        let (wx, wy) = (1.3, 0.7);
        let p = ModelParams::new(wx, wy, 0.0).unwrap();
        let a = build_generator(&p);
        for t in [0.4, 2.0, 11.0] {
            let blocks = bogoliubov_blocks(&propagator(&a, t).s).unwrap();
            // x: x' = c x + (s/ω) p, p' = −ω s x + c p
            // y: y' = c y − (s/ω) p, p' = ω s y + c p
            let (sx, cx) = (wx * t).sin_cos();
            let (sy, cy) = (wy * t).sin_cos();
            let ux = c(cx, -0.5 * sx * (wx + 1.0 / wx));
            let vx = c(0.0, -0.5 * sx * (wx - 1.0 / wx));
            let uy = c(cy, 0.5 * sy * (wy + 1.0 / wy));
            let vy = c(0.0, 0.5 * sy * (wy - 1.0 / wy));
            let u_ref = Matrix2::new(ux, c(0.0, 0.0), c(0.0, 0.0), uy);
            let v_ref = Matrix2::new(vx, c(0.0, 0.0), c(0.0, 0.0), vy);
            assert!((blocks.u - u_ref).iter().all(|z| z.norm() < 1e-12), "t = {t}");
            assert!((blocks.v - v_ref).iter().all(|z| z.norm() < 1e-12), "t = {t}");
            assert!(blocks.commutator_residual() < 1e-10);
        }
    }

    #[test]
    fn coupled_constraints_hold() {
        let p = ModelParams::new(1.0, 0.8, 0.15).unwrap();
        let blocks = bogoliubov_blocks(&propagator(&build_generator(&p), 1.0).s).unwrap();
        assert!(blocks.symmetry_residual() < 1e-10);
        assert!(blocks.commutator_residual() < 1e-10);
        assert!(blocks.v.iter().any(|z| z.norm() > 1e-3));
    }
}
