//! Branch-cut-correct complex square root, fictitious velocities and the
//! vertical-slowness functions.
//!
//! The square root `g` is fixed by g(q)^2 = q and Re[g(q)] > 0, with the
//! branch cut along the negative real axis. On the cut itself the value is
//! the limit from the upper half-plane, g(-r) = i*sqrt(r); every on-cut
//! slowness evaluation in the head-wave windows relies on that side.

use num_complex::Complex64;

/// Principal square root with the upper-side on-cut convention.
#[inline]
pub fn csqrt(q: Complex64) -> Complex64 {
    if q.im == 0.0 {
        if q.re >= 0.0 {
            Complex64::new(q.re.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-q.re).sqrt())
        }
    } else {
        // num_complex computes the principal branch, Re > 0 off the cut.
        q.sqrt()
    }
}

/// Fictitious velocity V / sqrt(1 + V^2 q^2): the speed seen by the 2D
/// problem at transverse slowness `q_y`. Equals `v` at q_y = 0.
#[inline]
pub fn fictitious_velocity(v: f64, q_y: f64) -> f64 {
    v / (1.0 + v * v * q_y * q_y).sqrt()
}

/// Inverse squared fictitious velocity, 1/V^2 + q_y^2.
#[inline]
pub fn inv_fictitious_sq(v: f64, q_y: f64) -> f64 {
    1.0 / (v * v) + q_y * q_y
}

/// Vertical slowness kappa = (1/V^2 + q_x^2 + q_y^2)^(1/2) for a mode of
/// speed `v`, evaluated with the branch-cut convention of [`csqrt`].
#[inline]
pub fn kappa(v: f64, q_x: Complex64, q_y: f64) -> Complex64 {
    csqrt(q_x * q_x + inv_fictitious_sq(v, q_y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn csqrt_positive_real() {
        assert_eq!(csqrt(Complex64::new(4.0, 0.0)), Complex64::new(2.0, 0.0));
    }

    #[test]
    fn csqrt_on_cut_takes_upper_side() {
        let r = csqrt(Complex64::new(-4.0, 0.0));
        assert_eq!(r, Complex64::new(0.0, 2.0));
        // Negative zero imaginary part is still the cut.
        let r = csqrt(Complex64::new(-4.0, -0.0));
        assert_eq!(r, Complex64::new(0.0, 2.0));
    }

    #[test]
    fn csqrt_of_2i() {
        let r = csqrt(Complex64::new(0.0, 2.0));
        assert!((r - Complex64::new(1.0, 1.0)).norm() < 1e-15);
        let sq = r * r;
        assert!((sq - Complex64::new(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn csqrt_square_round_trip_sampled() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..1_000_000 {
            let q = Complex64::new(
                rng.gen_range(-1e6..1e6f64),
                rng.gen_range(-1e6..1e6f64),
            );
            let g = csqrt(q);
            assert!((g * g - q).norm() <= 1e-13 * q.norm().max(1e-300));
            if q.im != 0.0 || q.re >= 0.0 {
                assert!(g.re >= 0.0);
            } else {
                assert!(g.im > 0.0);
            }
        }
    }

    #[test]
    fn fictitious_velocity_at_zero_is_physical_speed() {
        assert_eq!(fictitious_velocity(2692.0, 0.0), 2692.0);
    }

    #[test]
    fn fictitious_velocity_decreases_with_slowness() {
        let v = 1500.0;
        let samples = [0.0, 1e-4, 5e-4, 2e-3];
        for w in samples.windows(2) {
            assert!(fictitious_velocity(v, w[1]) < fictitious_velocity(v, w[0]));
        }
        // V^2 q^2 = 1 halves the squared speed.
        let got = fictitious_velocity(1000.0, 1e-3);
        assert!((got - 1000.0 / 2.0f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn kappa_at_origin_is_inverse_speed() {
        let k = kappa(1250.0, Complex64::new(0.0, 0.0), 0.0);
        assert!((k.re - 1.0 / 1250.0).abs() < 1e-18);
        assert_eq!(k.im, 0.0);
    }

    #[test]
    fn kappa_on_cut_matches_csqrt_convention() {
        // q_x = i*w with w beyond the branch point lands on the cut.
        let v = 1000.0;
        let w = 2.5e-3;
        let k = kappa(v, Complex64::new(0.0, w), 0.0);
        let expected = (w * w - 1.0 / (v * v)).sqrt();
        assert!((k - Complex64::new(0.0, expected)).norm() < 1e-18);
        // Same for the lower axis point: squaring gives the same argument.
        let k2 = kappa(v, Complex64::new(0.0, -w), 0.0);
        assert!((k2 - k).norm() < 1e-18);
    }

    #[test]
    fn kappa_direct_arithmetic_example() {
        let k = kappa(1000.0, Complex64::new(3e-4, 0.0), 4e-4);
        let expected = (1.0e-6 + 9.0e-8 + 1.6e-7f64).sqrt();
        assert!((k.re - expected).abs() < 1e-18);
        assert!((expected - 1.1180e-3).abs() < 1e-7);
    }

    #[test]
    fn kappa_reduces_to_fictitious_form() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let v = rng.gen_range(300.0..4000.0);
            let qx = Complex64::new(rng.gen_range(-1e-3..1e-3), rng.gen_range(-1e-3..1e-3));
            let qy = rng.gen_range(-1e-3..1e-3f64);
            let a = kappa(v, qx, qy);
            let b = kappa(fictitious_velocity(v, qy), qx, 0.0);
            assert!((a - b).norm() <= 1e-13 * a.norm());
        }
    }

    #[test]
    fn kappa_continuous_across_imaginary_axis_below_branch_point() {
        // For |Im q_x| < 1/V(q_y) there is no cut on the imaginary axis, so
        // values converge to the on-axis value linearly in the offset (a cut
        // would leave an O(kappa) jump no matter how small the offset).
        let v = 1500.0f64;
        let w = 0.5 / v; // inside the segment
        let middle = kappa(v, Complex64::new(0.0, w), 0.0);
        for rel in [1e-10, 1e-7, 1e-4] {
            let delta = rel / v;
            let right = kappa(v, Complex64::new(delta, w), 0.0);
            let left = kappa(v, Complex64::new(-delta, w), 0.0);
            // |dkappa/dq| = |q|/|kappa| < 1 on this segment.
            assert!((right - middle).norm() <= 2.0 * delta);
            assert!((left - middle).norm() <= 2.0 * delta);
            assert!((right - left).norm() <= 4.0 * delta);
        }
    }
}
