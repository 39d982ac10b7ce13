//! Green solid-displacement evaluation: incident closed forms, the twelve
//! scattered-wave quadratures with head-wave window logic, per-wave totals
//! and the rotation back to full 3D.
//!
//! Everything is evaluated in the vertical plane y = 0 with x >= 0; the
//! axisymmetry rotation [`rotate_to_3d`] recovers arbitrary receivers.

use num_complex::Complex64;

use crate::cagniard::{Branch, PathPoint, TimeWindows, WavePair};
use crate::coefficients::{solve_coefficients, SlownessPoint};
use crate::kinematics::kappa;
use crate::material::{DerivedLayer, ModalAmplitudes};
use crate::quad::{adaptive_pair, QuadOutcome};
use crate::{Error, Incidence, Mode, Result, Side};

/// Receiver position. `z > 0` is the source-side (top) half-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Receiver {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Receiver {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if z == 0.0 {
            return Err(Error::Domain(
                "receivers must sit off the interface (z != 0)".into(),
            ));
        }
        Ok(Self { x, y, z })
    }

    /// Horizontal offset of the rotated in-plane problem.
    pub fn offset(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Quadrature controls for the scattered-wave integrals.
#[derive(Debug, Clone, Copy)]
pub struct QuadSettings {
    /// Absolute tolerance per displacement component.
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self { abs_tol: 1e-10, max_depth: 48 }
    }
}

/// Identity of one wave contribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WaveId {
    Incident(Incidence),
    Scattered { incidence: Incidence, outgoing: Mode, side: Side },
}

impl WaveId {
    pub fn label(&self) -> String {
        match self {
            WaveId::Incident(i) => i.label().to_string(),
            WaveId::Scattered { incidence, outgoing, side } => format!(
                "{}{}{}",
                match side {
                    Side::Reflected => "R",
                    Side::Transmitted => "T",
                },
                incidence.label(),
                outgoing.label()
            ),
        }
    }
}

/// One Green sample at a receiver (in-plane components).
#[derive(Debug, Clone, Copy)]
pub struct GreenSample {
    pub t: f64,
    pub u_x: f64,
    pub u_z: f64,
}

/// Incident P-wave displacement (closed form), zero before r/V.
pub fn incident_green(
    mode: Incidence,
    modal: &ModalAmplitudes,
    top: &DerivedLayer,
    h: f64,
    x: f64,
    z: f64,
    t: f64,
) -> Result<(f64, f64)> {
    let r = x.hypot(z - h);
    if r == 0.0 {
        return Err(Error::ReceiverAtSource);
    }
    let (p_entry, v, f_modal) = match mode {
        Incidence::Pf => (top.p11(), top.v_pf, modal.f_pf),
        Incidence::Ps => (top.p12(), top.v_ps, modal.f_ps),
    };
    let t0 = r / v;
    if t <= t0 {
        return Ok((0.0, 0.0));
    }
    let c = -p_entry * f_modal / (v * v) * t / (4.0 * std::f64::consts::PI * r * r * r);
    Ok((c * x, c * (z - h)))
}

/// Rotation of the in-plane solution to a receiver at (x, y): the radial
/// component splits by x/rho and y/rho, the vertical one is unchanged.
pub fn rotate_to_3d(u_x: f64, u_z: f64, x: f64, y: f64) -> (f64, f64, f64) {
    let rho = x.hypot(y);
    if rho == 0.0 {
        return (0.0, 0.0, u_z);
    }
    (u_x * x / rho, u_x * y / rho, u_z)
}

/// One scattered family bound to a receiver, with its window table and
/// kernel selection resolved up front.
#[derive(Debug, Clone)]
pub struct ScatteredWave {
    pub pair: WavePair,
    pub windows: TimeWindows,
    top: DerivedLayer,
    bottom: DerivedLayer,
    /// P-matrix entry of the outgoing mode (1 for S).
    p_entry: f64,
    sign_x: f64,
    sign_z: f64,
}

impl ScatteredWave {
    pub fn new(
        incidence: Incidence,
        outgoing: Mode,
        side: Side,
        top: &DerivedLayer,
        bottom: &DerivedLayer,
        h: f64,
        x: f64,
        z_leg: f64,
    ) -> Result<Self> {
        let pair = WavePair::new(incidence, outgoing, side, top, bottom, h, x, z_leg)?;
        let windows = pair.head_window();
        let out_layer = match side {
            Side::Reflected => top,
            Side::Transmitted => bottom,
        };
        let p_entry = match outgoing {
            Mode::Pf => out_layer.p11(),
            Mode::Ps => out_layer.p12(),
            Mode::S => 1.0,
        };
        // Signs of the x and z kernels per family, as printed wave by wave.
        let (sign_x, sign_z) = match (side, outgoing) {
            (Side::Reflected, Mode::Pf | Mode::Ps) => (-1.0, -1.0),
            (Side::Reflected, Mode::S) => (1.0, 1.0),
            (Side::Transmitted, Mode::Pf | Mode::Ps) => (-1.0, 1.0),
            (Side::Transmitted, Mode::S) => (-1.0, 1.0),
        };
        Ok(Self { pair, windows, top: *top, bottom: *bottom, p_entry, sign_x, sign_z })
    }

    fn out_speed(&self) -> f64 {
        match self.pair.side {
            Side::Reflected => self.top.speed(self.pair.outgoing),
            Side::Transmitted => self.bottom.speed(self.pair.outgoing),
        }
    }

    /// The integrand pair (x, z) at transverse slowness q on one branch.
    fn kernels(&self, t: f64, q: f64, branch: Branch) -> Result<[f64; 2]> {
        let pp: PathPoint = match branch {
            Branch::Gamma => self.pair.gamma_point_unchecked(t, q)?,
            Branch::V => self.pair.v_point(t, q)?,
        };
        let u = pp.value;
        let du = pp.dvalue_dt;
        // The head-wave segment is the limit of the contour from Re > 0,
        // which approaches the fastest-mode cut from below; a vanishing
        // positive real part keeps the coefficient solve on that side
        // (the raw on-cut convention would pick the other sheet).
        let u_coeff = match branch {
            Branch::Gamma => u,
            Branch::V => Complex64::new(u.im.abs() * 1e-150, u.im),
        };
        let coeffs = solve_coefficients(
            SlownessPoint::new(u_coeff, q),
            self.pair.incidence,
            &self.top,
            &self.bottom,
        )?;
        let c = coeffs.outgoing(self.pair.side, self.pair.outgoing);
        let i = Complex64::new(0.0, 1.0);
        let (kx, kz) = match self.pair.outgoing {
            Mode::Pf | Mode::Ps => {
                let kap_out = kappa(self.out_speed(), u, q);
                ((i * u * c * du).re, (kap_out * c * du).re)
            }
            Mode::S => {
                let kap_s = kappa(self.out_speed(), u, q);
                ((i * u * kap_s * c * du).re, ((u * u + q * q) * c * du).re)
            }
        };
        Ok([self.sign_x * kx, self.sign_z * kz])
    }

    /// Volume-wave integral over (0, q0(t)) with the saddle desingularized
    /// by q = q0 sin(theta).
    fn gamma_integral(&self, t: f64, q0: f64, quad: &QuadSettings) -> Result<QuadOutcome> {
        if q0 <= 0.0 {
            return Ok(QuadOutcome::zero());
        }
        adaptive_pair(
            |theta: f64| {
                let q = q0 * theta.sin();
                let jac = q0 * theta.cos();
                let k = self.kernels(t, q, Branch::Gamma)?;
                Ok([k[0] * jac, k[1] * jac])
            },
            0.0,
            std::f64::consts::FRAC_PI_2,
            quad.abs_tol,
            quad.max_depth,
        )
    }

    /// Head-wave integral over (q0, q1) with q = q0 cosh(theta) removing
    /// the saddle singularity at the lower end.
    fn v_integral_above(
        &self,
        t: f64,
        q0: f64,
        q1: f64,
        quad: &QuadSettings,
    ) -> Result<QuadOutcome> {
        if q1 <= q0 * (1.0 + 1e-14) || q0 <= 0.0 {
            return Ok(QuadOutcome::zero());
        }
        let theta_max = (q1 / q0).acosh();
        adaptive_pair(
            |theta: f64| {
                let q = q0 * theta.cosh();
                let jac = q0 * theta.sinh();
                let k = self.kernels(t, q, Branch::V)?;
                Ok([k[0] * jac, k[1] * jac])
            },
            0.0,
            theta_max,
            quad.abs_tol,
            quad.max_depth,
        )
    }

    /// Head-wave-only integral over (0, q1(t)); the integrand is regular.
    fn v_integral_full(&self, t: f64, q1: f64, quad: &QuadSettings) -> Result<QuadOutcome> {
        if q1 <= 0.0 {
            return Ok(QuadOutcome::zero());
        }
        adaptive_pair(
            |q: f64| self.kernels(t, q, Branch::V),
            0.0,
            q1,
            quad.abs_tol,
            quad.max_depth,
        )
    }

    /// Scattered displacement of this family at time t, scaled by the modal
    /// source amplitude of its incidence mode.
    pub fn eval(&self, modal: &ModalAmplitudes, t: f64, quad: &QuadSettings) -> Result<(f64, f64)> {
        Ok(self.eval_with_error(modal, t, quad)?.0)
    }

    /// As [`Self::eval`], also returning the quadrature error estimate of
    /// each component (already scaled like the values).
    pub fn eval_with_error(
        &self,
        modal: &ModalAmplitudes,
        t: f64,
        quad: &QuadSettings,
    ) -> Result<((f64, f64), (f64, f64))> {
        let f_modal = modal.get(self.pair.incidence);
        if f_modal == 0.0 {
            return Ok(((0.0, 0.0), (0.0, 0.0)));
        }
        let w = &self.windows;
        let pre = self.p_entry * f_modal / (std::f64::consts::PI * std::f64::consts::PI);
        // The tolerance is a contract on the displacement components, so the
        // raw kernel integrals must be held to abs_tol over the prefactor.
        let quad = &QuadSettings {
            abs_tol: quad.abs_tol / pre.abs().max(f64::MIN_POSITIVE),
            max_depth: quad.max_depth,
        };
        let mut acc = QuadOutcome::zero();
        if w.head_exists {
            let t_h1 = w.t_h1.expect("head_exists implies a bracket");
            let t_h2 = w.t_h2.expect("head_exists implies a bracket");
            if t <= t_h1 {
                return Ok(((0.0, 0.0), (0.0, 0.0)));
            }
            if t <= w.t0 {
                let q1 = self.pair.q1_of_t(t)?;
                acc.accumulate(&self.v_integral_full(t, q1, quad)?);
            } else if t <= t_h2 {
                let q0 = self.pair.q0_of_t(t)?;
                let q1 = self.pair.q1_of_t(t)?;
                acc.accumulate(&self.gamma_integral(t, q0, quad)?);
                acc.accumulate(&self.v_integral_above(t, q0, q1, quad)?);
            } else {
                let q0 = self.pair.q0_of_t(t)?;
                acc.accumulate(&self.gamma_integral(t, q0, quad)?);
            }
        } else {
            if t <= w.t0 {
                return Ok(((0.0, 0.0), (0.0, 0.0)));
            }
            let q0 = self.pair.q0_of_t(t)?;
            acc.accumulate(&self.gamma_integral(t, q0, quad)?);
        }
        Ok((
            (pre * acc.value[0], pre * acc.value[1]),
            (pre.abs() * acc.err[0], pre.abs() * acc.err[1]),
        ))
    }
}

/// A wave channel of one receiver: incident field or scattered family.
#[derive(Debug, Clone)]
pub enum Channel {
    Incident(Incidence),
    Scattered(Box<ScatteredWave>),
}

/// Per-wave breakdown of one Green sample.
#[derive(Debug, Clone)]
pub struct GreenBreakdown {
    pub t: f64,
    /// In channel order; components are (u_x, u_z) in the rotated plane.
    pub waves: Vec<(f64, f64)>,
    pub total: (f64, f64),
}

/// Evaluates the total Green displacement at one in-plane receiver, keeping
/// the per-wave breakdown. Channels are fixed at construction; evaluation
/// is pure and can run concurrently across times.
#[derive(Debug, Clone)]
pub struct GreenEvaluator {
    pub channels: Vec<(WaveId, Channel)>,
    top: DerivedLayer,
    modal: ModalAmplitudes,
    h: f64,
    x: f64,
    z: f64,
    quad: QuadSettings,
}

impl GreenEvaluator {
    /// Build the 8 top-side channels (2 incident + 6 reflected) or the 6
    /// transmitted ones, for a receiver at in-plane offset `x` and signed
    /// height `z`.
    pub fn new(
        top: &DerivedLayer,
        bottom: &DerivedLayer,
        modal: ModalAmplitudes,
        h: f64,
        x: f64,
        z: f64,
        quad: QuadSettings,
    ) -> Result<Self> {
        if z == 0.0 {
            return Err(Error::Domain("receiver on the interface".into()));
        }
        if !(x >= 0.0) {
            return Err(Error::Domain("in-plane offset must be >= 0".into()));
        }
        let mut channels = Vec::new();
        let incidences = [Incidence::Pf, Incidence::Ps];
        let modes = [Mode::Pf, Mode::Ps, Mode::S];
        if z > 0.0 {
            for inc in incidences {
                channels.push((WaveId::Incident(inc), Channel::Incident(inc)));
            }
            for inc in incidences {
                for out in modes {
                    let w = ScatteredWave::new(
                        inc,
                        out,
                        Side::Reflected,
                        top,
                        bottom,
                        h,
                        x,
                        z,
                    )?;
                    channels.push((
                        WaveId::Scattered { incidence: inc, outgoing: out, side: Side::Reflected },
                        Channel::Scattered(Box::new(w)),
                    ));
                }
            }
        } else {
            for inc in incidences {
                for out in modes {
                    let w = ScatteredWave::new(
                        inc,
                        out,
                        Side::Transmitted,
                        top,
                        bottom,
                        h,
                        x,
                        -z,
                    )?;
                    channels.push((
                        WaveId::Scattered { incidence: inc, outgoing: out, side: Side::Transmitted },
                        Channel::Scattered(Box::new(w)),
                    ));
                }
            }
        }
        Ok(Self { channels, top: *top, modal, h, x, z, quad })
    }

    /// Jump times of every channel (volume and head arrivals), used to keep
    /// sampling grids off the discontinuities.
    pub fn jump_times(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (_, ch) in &self.channels {
            match ch {
                Channel::Incident(inc) => {
                    let v = match inc {
                        Incidence::Pf => self.top.v_pf,
                        Incidence::Ps => self.top.v_ps,
                    };
                    out.push(self.x.hypot(self.z - self.h) / v);
                }
                Channel::Scattered(s) => {
                    out.push(s.windows.t0);
                    if s.windows.head_exists {
                        out.push(s.windows.t_h1.unwrap());
                        out.push(s.windows.t_h2.unwrap());
                    }
                }
            }
        }
        out
    }

    /// Earliest onset per channel (head arrival when it exists, else the
    /// volume arrival; incident channels use r/V).
    pub fn onsets(&self) -> Vec<(WaveId, f64)> {
        self.channels
            .iter()
            .map(|(id, ch)| {
                let t = match ch {
                    Channel::Incident(inc) => {
                        let v = match inc {
                            Incidence::Pf => self.top.v_pf,
                            Incidence::Ps => self.top.v_ps,
                        };
                        self.x.hypot(self.z - self.h) / v
                    }
                    Channel::Scattered(s) => {
                        if s.windows.head_exists {
                            s.windows.t_h1.unwrap()
                        } else {
                            s.windows.t0
                        }
                    }
                };
                (*id, t)
            })
            .collect()
    }

    pub fn eval(&self, t: f64) -> Result<GreenBreakdown> {
        let mut waves = Vec::with_capacity(self.channels.len());
        let mut total = (0.0, 0.0);
        for (_, ch) in &self.channels {
            let u = match ch {
                Channel::Incident(inc) => {
                    incident_green(*inc, &self.modal, &self.top, self.h, self.x, self.z, t)?
                }
                Channel::Scattered(s) => s.eval(&self.modal, t, &self.quad)?,
            };
            total.0 += u.0;
            total.1 += u.1;
            waves.push(u);
        }
        Ok(GreenBreakdown { t, waves, total })
    }
}

/// Total Green displacement at a (possibly out-of-plane) receiver, rotated
/// to 3D components.
pub fn total_green(
    top: &DerivedLayer,
    bottom: &DerivedLayer,
    modal: ModalAmplitudes,
    h: f64,
    receiver: &Receiver,
    t: f64,
    quad: QuadSettings,
) -> Result<(f64, f64, f64)> {
    let ev = GreenEvaluator::new(top, bottom, modal, h, receiver.offset(), receiver.z, quad)?;
    let s = ev.eval(t)?;
    Ok(rotate_to_3d(s.total.0, s.total.1, receiver.x, receiver.y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::{derive_layer, project_source, PoroelasticLayer, SourceAmplitudes};

    fn top_raw() -> PoroelasticLayer {
        PoroelasticLayer {
            rho_s: 2200.0,
            rho_f: 950.0,
            phi: 0.4,
            tortuosity: 2.0,
            k_s: 6.9e9,
            k_f: 2.0e9,
            k_b: 6.7e9,
            mu: 3.0e9,
        }
    }

    fn bottom_raw() -> PoroelasticLayer {
        PoroelasticLayer {
            rho_s: 2650.0,
            rho_f: 750.0,
            phi: 0.2,
            tortuosity: 2.0,
            k_s: 37.0e9,
            k_f: 1.7e9,
            k_b: 2.2e9,
            mu: 4.4e9,
        }
    }

    fn setup() -> (DerivedLayer, DerivedLayer, ModalAmplitudes) {
        let top = derive_layer(&top_raw()).unwrap();
        let bottom = derive_layer(&bottom_raw()).unwrap();
        let modal = project_source(
            &top,
            &SourceAmplitudes { f_u: -1e10, f_w: -1e10, f_p: 0.0 },
        )
        .unwrap();
        (top, bottom, modal)
    }

    #[test]
    fn incident_is_zero_before_arrival_and_marches_after() {
        let (top, _, modal) = setup();
        let r = 400.0f64.hypot(533.0 - 500.0);
        let t0 = r / top.v_pf;
        let before = incident_green(Incidence::Pf, &modal, &top, 500.0, 400.0, 533.0, t0 * 0.99)
            .unwrap();
        assert_eq!(before, (0.0, 0.0));
        let after = incident_green(Incidence::Pf, &modal, &top, 500.0, 400.0, 533.0, 0.2).unwrap();
        assert!(after.0 != 0.0 && after.1 != 0.0);
        // Closed-form value check at t = 0.2 s.
        let c = -top.p11() * modal.f_pf / (top.v_pf * top.v_pf) * 0.2
            / (4.0 * std::f64::consts::PI * r.powi(3));
        assert!((after.0 - c * 400.0).abs() <= 1e-12 * after.0.abs());
        assert!((after.1 - c * 33.0).abs() <= 1e-12 * after.1.abs());
    }

    #[test]
    fn incident_on_axis_has_no_radial_component() {
        let (top, _, modal) = setup();
        let u = incident_green(Incidence::Pf, &modal, &top, 500.0, 0.0, 533.0, 0.5).unwrap();
        assert_eq!(u.0, 0.0);
        assert!(u.1 != 0.0);
    }

    #[test]
    fn incident_at_source_errors() {
        let (top, _, modal) = setup();
        assert!(matches!(
            incident_green(Incidence::Pf, &modal, &top, 500.0, 0.0, 500.0, 0.1),
            Err(Error::ReceiverAtSource)
        ));
    }

    #[test]
    fn rotation_factors() {
        let (ux, uy, uz) = rotate_to_3d(2.0, 3.0, 3.0, 4.0);
        assert!((ux - 2.0 * 0.6).abs() < 1e-15);
        assert!((uy - 2.0 * 0.8).abs() < 1e-15);
        assert_eq!(uz, 3.0);
        // y = 0 keeps the in-plane components.
        assert_eq!(rotate_to_3d(2.0, 3.0, 5.0, 0.0), (2.0, 0.0, 3.0));
        // x = 0 moves everything to u_y.
        let (ux, uy, uz) = rotate_to_3d(2.0, 3.0, 0.0, 5.0);
        assert_eq!((ux, uy, uz), (0.0, 2.0, 3.0));
        // On-axis receiver: radial part must vanish.
        assert_eq!(rotate_to_3d(2.0, 3.0, 0.0, 0.0), (0.0, 0.0, 3.0));
    }

    #[test]
    fn scattered_zero_before_onset() {
        let (top, bottom, modal) = setup();
        for (side, z) in [(Side::Reflected, 533.0), (Side::Transmitted, 533.0)] {
            for out in [Mode::Pf, Mode::Ps, Mode::S] {
                let w = ScatteredWave::new(
                    Incidence::Pf,
                    out,
                    side,
                    &top,
                    &bottom,
                    500.0,
                    400.0,
                    z,
                )
                .unwrap();
                let onset = if w.windows.head_exists {
                    w.windows.t_h1.unwrap()
                } else {
                    w.windows.t0
                };
                let u = w.eval(&modal, onset * 0.95, &QuadSettings::default()).unwrap();
                assert_eq!(u, (0.0, 0.0), "{}", w.pair.label());
            }
        }
    }

    #[test]
    fn null_interface_reflections_are_negligible() {
        let (top, _, modal) = setup();
        let quad = QuadSettings::default();
        // Incident peak scale over the window.
        let mut inc_peak = 0.0f64;
        for k in 0..40 {
            let t = 0.14 + k as f64 * 0.02;
            let u = incident_green(Incidence::Pf, &modal, &top, 500.0, 400.0, 533.0, t).unwrap();
            inc_peak = inc_peak.max(u.0.abs()).max(u.1.abs());
        }
        for out in [Mode::Pf, Mode::Ps, Mode::S] {
            for inc in [Incidence::Pf, Incidence::Ps] {
                let w = ScatteredWave::new(
                    inc,
                    out,
                    Side::Reflected,
                    &top,
                    &top,
                    500.0,
                    400.0,
                    533.0,
                )
                .unwrap();
                for k in 0..10 {
                    let t = w.windows.t0 * (1.001 + 0.08 * k as f64);
                    let u = w.eval(&modal, t, &quad).unwrap();
                    assert!(
                        u.0.abs() <= 1e-8 * inc_peak && u.1.abs() <= 1e-8 * inc_peak,
                        "{} at t = {t}: ({:.3e}, {:.3e}) vs peak {inc_peak:.3e}",
                        w.pair.label(),
                        u.0,
                        u.1
                    );
                }
            }
        }
    }

    #[test]
    fn radial_component_vanishes_on_axis() {
        let (top, bottom, modal) = setup();
        let quad = QuadSettings::default();
        let w = ScatteredWave::new(
            Incidence::Pf,
            Mode::Pf,
            Side::Transmitted,
            &top,
            &bottom,
            500.0,
            0.0,
            533.0,
        )
        .unwrap();
        let t = w.windows.t0 * 1.3;
        let u0 = w.eval(&modal, t, &quad).unwrap();
        assert!(u0.0.abs() <= 1e-18, "u_x on axis = {:.3e}", u0.0);
        // Small-offset limit: u_x is odd in the offset, so it shrinks
        // linearly while u_z approaches the axis value.
        let eval_at = |x: f64| {
            ScatteredWave::new(
                Incidence::Pf,
                Mode::Pf,
                Side::Transmitted,
                &top,
                &bottom,
                500.0,
                x,
                533.0,
            )
            .unwrap()
            .eval(&modal, t, &quad)
            .unwrap()
        };
        let u1 = eval_at(1e-3);
        let u2 = eval_at(2e-3);
        assert!(u1.0.abs() <= 1e-4 * u1.1.abs(), "u_x not small: {:?}", u1);
        assert!((u2.0 / u1.0 - 2.0).abs() <= 0.05, "u_x not linear in x");
        assert!((u1.1 - u0.1).abs() <= 1e-6 * u0.1.abs());
    }

    #[test]
    fn breakdown_sums_to_total() {
        let (top, bottom, modal) = setup();
        let ev = GreenEvaluator::new(
            &top,
            &bottom,
            modal,
            500.0,
            400.0,
            533.0,
            QuadSettings::default(),
        )
        .unwrap();
        assert_eq!(ev.channels.len(), 8);
        let s = ev.eval(0.45).unwrap();
        let sum = s.waves.iter().fold((0.0, 0.0), |a, w| (a.0 + w.0, a.1 + w.1));
        assert!((sum.0 - s.total.0).abs() <= 1e-14 * s.total.0.abs().max(1e-30));
        assert!((sum.1 - s.total.1).abs() <= 1e-14 * s.total.1.abs().max(1e-30));
    }

    #[test]
    fn bottom_receiver_has_six_channels_and_causal_start() {
        let (top, bottom, modal) = setup();
        let ev = GreenEvaluator::new(
            &top,
            &bottom,
            modal,
            500.0,
            400.0,
            -533.0,
            QuadSettings::default(),
        )
        .unwrap();
        assert_eq!(ev.channels.len(), 6);
        let earliest = ev
            .onsets()
            .iter()
            .map(|(_, t)| *t)
            .fold(f64::INFINITY, f64::min);
        let s = ev.eval(earliest * 0.9).unwrap();
        assert_eq!(s.total, (0.0, 0.0));
    }
}
