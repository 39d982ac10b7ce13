//! Kinematics of one scattered-wave family: Fermat travel times, head-wave
//! windows, and the deformed-contour functions gamma(t, q) and v(t, q) with
//! their time derivatives.
//!
//! Every family is described by two legs: the incident leg of length `h`
//! (source to interface, top speed V1) and the outgoing leg of length
//! `z_leg` (interface to receiver, speed V2 on the reflected or transmitted
//! side). At transverse slowness `q` the legs see the fictitious speeds
//! V_i(q), and the contour variable u solves
//!
//!   F(u, q, t) = z_leg * (1/V2(q)^2 + u^2)^(1/2)
//!              + h     * (1/V1(q)^2 + u^2)^(1/2) + i u x - t = 0.
//!
//! The gamma branch is the root with positive real part (it carries the
//! volume wave); the v branch lies on the negative imaginary axis between
//! the fastest-mode branch point and the saddle, carries the head wave, and
//! is selected by Im[dv/dt] < 0.

use num_complex::Complex64;

use crate::kinematics::{csqrt, inv_fictitious_sq};
use crate::material::DerivedLayer;
use crate::{Error, Incidence, Mode, Result, Side};

/// Offsets below this are treated as on-axis geometry (no head-wave
/// segment; the q1 formulas divide by x).
pub const X_EPS: f64 = 1e-9;

/// Which branch of the deformed contour a sample belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Gamma,
    V,
}

/// One contour sample: the complex slowness value and its time derivative.
#[derive(Debug, Clone, Copy)]
pub struct PathPoint {
    pub value: Complex64,
    pub dvalue_dt: Complex64,
    pub branch: Branch,
}

/// Arrival structure of one family at one receiver.
///
/// `t_h1`/`t_h2` hold the closed-form head-wave bracket whenever it is
/// finite; `head_exists` says whether the family actually radiates a head
/// wave at this offset (the contour only wraps the fastest branch cut for
/// post-critical geometry). When `head_exists` is false the bracket values
/// are formal and take no part in the window logic.
#[derive(Debug, Clone, Copy)]
pub struct TimeWindows {
    pub t0: f64,
    pub t_h1: Option<f64>,
    pub t_h2: Option<f64>,
    pub head_exists: bool,
}

/// One scattered-wave family plus its receiver geometry.
#[derive(Debug, Clone, Copy)]
pub struct WavePair {
    pub incidence: Incidence,
    pub outgoing: Mode,
    pub side: Side,
    /// Incident-leg speed (top layer).
    pub v1: f64,
    /// Outgoing-leg speed.
    pub v2: f64,
    /// Source height above the interface (m), > 0.
    pub h: f64,
    /// Receiver horizontal offset (m), >= 0.
    pub x: f64,
    /// Receiver distance from the interface (m), stored positive.
    pub z_leg: f64,
    /// Greatest of the six medium speeds.
    pub v_max: f64,
}

impl WavePair {
    /// Build a family from the two derived layers.
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
        if !(h > 0.0) {
            return Err(Error::Domain(format!("source height must be > 0, got {h}")));
        }
        if !(x >= 0.0) || !(z_leg > 0.0) {
            return Err(Error::Domain(format!(
                "receiver legs must satisfy x >= 0, |z| > 0, got x = {x}, |z| = {z_leg}"
            )));
        }
        let v1 = match incidence {
            Incidence::Pf => top.v_pf,
            Incidence::Ps => top.v_ps,
        };
        let out_layer = match side {
            Side::Reflected => top,
            Side::Transmitted => bottom,
        };
        let v2 = out_layer.speed(outgoing);
        let v_max = [top.v_pf, top.v_ps, top.v_s, bottom.v_pf, bottom.v_ps, bottom.v_s]
            .into_iter()
            .fold(0.0f64, f64::max);
        Ok(Self { incidence, outgoing, side, v1, v2, h, x, z_leg, v_max })
    }

    /// Direct construction from leg speeds, for tests and oracles.
    pub fn from_speeds(
        v1: f64,
        v2: f64,
        v_max: f64,
        h: f64,
        x: f64,
        z_leg: f64,
    ) -> Self {
        Self {
            incidence: Incidence::Pf,
            outgoing: Mode::Pf,
            side: Side::Reflected,
            v1,
            v2,
            h,
            x,
            z_leg,
            v_max,
        }
    }

    pub fn label(&self) -> String {
        format!(
            "{}{}{}",
            match self.side {
                Side::Reflected => "R",
                Side::Transmitted => "T",
            },
            self.incidence.label(),
            self.outgoing.label()
        )
    }

    #[inline]
    fn a1(&self, q: f64) -> f64 {
        inv_fictitious_sq(self.v1, q)
    }

    #[inline]
    fn a2(&self, q: f64) -> f64 {
        inv_fictitious_sq(self.v2, q)
    }

    #[inline]
    pub fn is_same_speed(&self) -> bool {
        (self.v1 - self.v2).abs() <= 1e-12 * self.v1.max(self.v2)
    }

    /// Mirror distance sqrt(x^2 + (h + z_leg)^2), the ray length of a
    /// same-speed family.
    #[inline]
    fn r_mirror(&self) -> f64 {
        self.x.hypot(self.h + self.z_leg)
    }

    /// The defining function F(u, q, t); zero on both contour branches.
    pub fn f_residual(&self, u: Complex64, q: f64, t: f64) -> Complex64 {
        let k1 = csqrt(u * u + self.a1(q));
        let k2 = csqrt(u * u + self.a2(q));
        self.z_leg * k2 + self.h * k1 + Complex64::new(0.0, 1.0) * u * self.x - t
    }

    /// dF/du with the same branch conventions.
    fn df_du(&self, u: Complex64, q: f64) -> Complex64 {
        let k1 = csqrt(u * u + self.a1(q));
        let k2 = csqrt(u * u + self.a2(q));
        self.z_leg * u / k2 + self.h * u / k1 + Complex64::new(0.0, self.x)
    }

    /// Fermat travel time at transverse slowness q, with the optimal
    /// interface crossing. Golden-section bracket followed by Newton on the
    /// stationarity equation.
    fn fermat(&self, q: f64) -> (f64, f64) {
        let (s1, s2) = (self.a1(q).sqrt(), self.a2(q).sqrt()); // leg slownesses
        let time = |xi: f64| -> f64 {
            (xi * xi + self.h * self.h).sqrt() * s1
                + ((self.x - xi) * (self.x - xi) + self.z_leg * self.z_leg).sqrt() * s2
        };
        let reach = self.h + self.z_leg + self.x;
        let mut lo = self.x.min(0.0) - reach;
        let mut hi = self.x.max(0.0) + reach;
        // Golden-section on the (strictly convex) travel time.
        const INVPHI: f64 = 0.618_033_988_749_894_9;
        let mut c = hi - INVPHI * (hi - lo);
        let mut d = lo + INVPHI * (hi - lo);
        let (mut fc, mut fd) = (time(c), time(d));
        while hi - lo > 1e-10 * reach.max(1.0) {
            if fc < fd {
                hi = d;
                d = c;
                fd = fc;
                c = hi - INVPHI * (hi - lo);
                fc = time(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + INVPHI * (hi - lo);
                fd = time(d);
            }
        }
        let mut xi = 0.5 * (lo + hi);
        // Newton polish on d(time)/dxi = 0.
        for _ in 0..8 {
            let l1 = (xi * xi + self.h * self.h).sqrt();
            let l2 = ((self.x - xi) * (self.x - xi) + self.z_leg * self.z_leg).sqrt();
            let g = s1 * xi / l1 - s2 * (self.x - xi) / l2;
            let dg = s1 * self.h * self.h / (l1 * l1 * l1)
                + s2 * self.z_leg * self.z_leg / (l2 * l2 * l2);
            let step = g / dg;
            xi -= step;
            if step.abs() <= 1e-15 * reach.max(1.0) {
                break;
            }
        }
        (time(xi), xi)
    }

    /// Arrival time of the fictitious wave at transverse slowness q.
    pub fn travel_time(&self, q: f64) -> f64 {
        if self.is_same_speed() {
            return self.r_mirror() * self.a1(q).sqrt();
        }
        self.fermat(q).0
    }

    /// Volume arrival time t0 = travel_time(0).
    pub fn arrival_time(&self) -> f64 {
        self.travel_time(0.0)
    }

    /// Horizontal slowness of the Fermat ray at transverse slowness q (the
    /// contour saddle). Solves x = w (z_leg/s2(w) + h/s1(w)) on the real
    /// segment below both leg branch points.
    pub(crate) fn saddle_slowness(&self, q: f64) -> f64 {
        if self.x < X_EPS {
            return 0.0;
        }
        let (a1, a2) = (self.a1(q), self.a2(q));
        let w_cap = a1.min(a2).sqrt();
        let g = |w: f64| -> f64 {
            let s1 = (a1 - w * w).sqrt();
            let s2 = (a2 - w * w).sqrt();
            self.x - w * (self.z_leg / s2 + self.h / s1)
        };
        // g decreases from x to -inf on [0, w_cap); bisect.
        let mut lo = 0.0;
        let mut hi = w_cap * (1.0 - 1e-15);
        while !(g(hi) < 0.0) {
            hi = w_cap - 0.25 * (w_cap - hi);
            if w_cap - hi < 1e-300 {
                return w_cap;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-16 * w_cap {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Travel time restricted to the negative imaginary axis, u = -i w.
    fn axis_time(&self, w: f64, q: f64) -> f64 {
        let s1 = (self.a1(q) - w * w).max(0.0).sqrt();
        let s2 = (self.a2(q) - w * w).max(0.0).sqrt();
        self.z_leg * s2 + self.h * s1 + w * self.x
    }

    fn axis_time_deriv(&self, w: f64, q: f64) -> f64 {
        let s1 = (self.a1(q) - w * w).sqrt();
        let s2 = (self.a2(q) - w * w).sqrt();
        self.x - w * (self.z_leg / s2 + self.h / s1)
    }

    /// Reciprocal of travel_time: the q >= 0 with travel_time(q) = t.
    pub fn q0_of_t(&self, t: f64) -> Result<f64> {
        let t0 = self.arrival_time();
        if t < t0 - 1e-9 * t0.max(1.0) {
            return Err(Error::Domain(format!(
                "q0 undefined for t = {t} below the volume arrival t0 = {t0}"
            )));
        }
        if t <= t0 {
            return Ok(0.0);
        }
        if self.is_same_speed() {
            let r = self.r_mirror();
            let d = (t / r) * (t / r) - 1.0 / (self.v1 * self.v1);
            return Ok(d.abs().sqrt());
        }
        // Bracket by geometric growth, then bisection with Newton polish.
        let mut hi = 1e-5f64;
        let mut grow = 0;
        while self.travel_time(hi) < t {
            hi *= 2.0;
            grow += 1;
            if grow > 80 {
                return Err(Error::Domain(format!("q0 bracket growth failed at t = {t}")));
            }
        }
        let mut lo = 0.0f64;
        for _ in 0..90 {
            let mid = 0.5 * (lo + hi);
            if self.travel_time(mid) < t {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-18 + 1e-15 * hi {
                break;
            }
        }
        let mut q = 0.5 * (lo + hi);
        // Newton with the envelope derivative dt/dq = q (L1/s1 + L2/s2).
        for _ in 0..6 {
            let (tq, xi) = self.fermat(q);
            let l1 = (xi * xi + self.h * self.h).sqrt();
            let l2 = ((self.x - xi) * (self.x - xi) + self.z_leg * self.z_leg).sqrt();
            let dtdq = q * (l1 / self.a1(q).sqrt() + l2 / self.a2(q).sqrt());
            if dtdq <= 0.0 {
                break;
            }
            let step = (tq - t) / dtdq;
            q -= step;
            if !(q > 0.0) {
                q = 0.5 * (lo + hi);
                break;
            }
            if step.abs() <= 1e-16 * q.max(1e-12) {
                break;
            }
        }
        Ok(q)
    }

    fn head_constants(&self) -> (f64, f64) {
        let inv_m2 = 1.0 / (self.v_max * self.v_max);
        let c1 = (1.0 / (self.v1 * self.v1) - inv_m2).max(0.0).sqrt();
        let c2 = (1.0 / (self.v2 * self.v2) - inv_m2).max(0.0).sqrt();
        (c1, c2)
    }

    /// Upper limit of the head-wave segment: the q at which the contour
    /// point sits exactly on the fastest branch point.
    pub fn q1_of_t(&self, t: f64) -> Result<f64> {
        if self.x < X_EPS {
            return Err(Error::Domain("q1 undefined on-axis (x = 0)".into()));
        }
        let (c1, c2) = self.head_constants();
        let u = (t - self.h * c1 - self.z_leg * c2) / self.x;
        let rad = u * u - 1.0 / (self.v_max * self.v_max);
        if rad < 0.0 {
            if rad > -1e-12 * u * u.max(1.0) {
                return Ok(0.0);
            }
            return Err(Error::Domain(format!(
                "no head-wave segment at t = {t}: q1 radicand {rad:.3e} < 0"
            )));
        }
        Ok(rad.sqrt())
    }

    /// Arrival table of the family: volume arrival, head-wave bracket and
    /// the post-critical existence flag.
    pub fn head_window(&self) -> TimeWindows {
        let t0 = self.arrival_time();
        if self.x < X_EPS {
            return TimeWindows { t0, t_h1: None, t_h2: None, head_exists: false };
        }
        let (c1, c2) = self.head_constants();
        let t_h1 = self.h * c1 + self.z_leg * c2 + self.x.abs() / self.v_max;
        let t_h2 = if c1 > 0.0 && c2 > 0.0 {
            let (h, z, x) = (self.h, self.z_leg, self.x);
            Some((h * h + z * z + h * z * (c2 / c1 + c1 / c2) + x * x) / (h / c1 + z / c2))
        } else {
            None
        };
        // The contour wraps the fastest cut only when the saddle slowness
        // exceeds the branch point 1/V_max (post-critical offset).
        let w_star = self.saddle_slowness(0.0);
        let head_exists = c1 > 0.0 && c2 > 0.0 && w_star > 1.0 / self.v_max;
        TimeWindows { t0, t_h1: Some(t_h1), t_h2, head_exists }
    }

    /// Contour point of the gamma branch (the root of F with positive real
    /// part), for t > travel_time(q).
    pub fn gamma_point(&self, t: f64, q: f64) -> Result<PathPoint> {
        let t0q = self.travel_time(q);
        if t < t0q * (1.0 - 1e-12) {
            return Err(Error::Domain(format!(
                "gamma undefined at t = {t} below the fictitious arrival {t0q}"
            )));
        }
        self.gamma_point_unchecked(t, q)
    }

    pub(crate) fn gamma_point_unchecked(&self, t: f64, q: f64) -> Result<PathPoint> {
        let tol = 1e-10 * t.max(1.0);
        let mut value = if self.is_same_speed() {
            let r = self.r_mirror();
            let s = ((t / r) * (t / r) - self.a1(q)).max(0.0).sqrt();
            self.polish_gamma(
                Complex64::new((self.z_leg + self.h) / r * s, -self.x * t / (r * r)),
                q,
                t,
            )
        } else if self.x < X_EPS {
            let v = self.gamma_on_axis(t, q)?;
            self.polish_gamma(v, q, t)
        } else {
            self.gamma_quartic(t, q)
        };
        if self.f_residual(value, q, t).norm() > tol {
            // The quartic start can land on the wrong side of a branch
            // point when the saddle grazes it; walk the path from the
            // saddle instead.
            if let Ok(v) = self.gamma_continuation(t, q) {
                if self.f_residual(v, q, t).norm() < self.f_residual(value, q, t).norm() {
                    value = v;
                }
            }
        }
        let resid = self.f_residual(value, q, t).norm();
        if resid > 1e-9 * t.max(1.0) {
            return Err(Error::PathTracking {
                t,
                q,
                detail: format!("gamma residual {resid:.3e} after polish at {value}"),
            });
        }
        Ok(PathPoint { value, dvalue_dt: 1.0 / self.df_du(value, q), branch: Branch::Gamma })
    }

    /// On-axis geometry keeps gamma real: F restricted to real u is strictly
    /// increasing from the fictitious arrival.
    fn gamma_on_axis(&self, t: f64, q: f64) -> Result<Complex64> {
        let (a1, a2) = (self.a1(q), self.a2(q));
        let phi = |g: f64| self.z_leg * (a2 + g * g).sqrt() + self.h * (a1 + g * g).sqrt() - t;
        if phi(0.0) > 1e-9 * t.max(1.0) {
            return Err(Error::PathTracking { t, q, detail: "on-axis t below arrival".into() });
        }
        let mut hi = 1.0 / self.v1.min(self.v2);
        let mut grow = 0;
        while phi(hi) < 0.0 {
            hi *= 2.0;
            grow += 1;
            if grow > 200 {
                return Err(Error::PathTracking { t, q, detail: "on-axis bracket failed".into() });
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if phi(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-16 * hi.max(1e-12) {
                break;
            }
        }
        Ok(Complex64::new(0.5 * (lo + hi), 0.0))
    }

    /// Quartic pre-solve for the two-speed gamma root: squaring F twice
    /// yields a polynomial whose roots contain both F-roots; the one with
    /// positive real part is the gamma branch. Every plausible root gets
    /// polished and the best survivor wins.
    fn gamma_quartic(&self, t: f64, q: f64) -> Complex64 {
        let (a1, a2) = (self.a1(q), self.a2(q));
        let (zz, hh, x) = (self.z_leg, self.h, self.x);
        let a0 = Complex64::new(t * t - zz * zz * a2 - hh * hh * a1, 0.0);
        let b1 = Complex64::new(0.0, -2.0 * x * t);
        let c2 = Complex64::new(-(x * x + zz * zz + hh * hh), 0.0);
        let zh2 = 4.0 * zz * zz * hh * hh;
        let coeffs = [
            a0 * a0 - zh2 * a1 * a2,
            2.0 * a0 * b1,
            b1 * b1 + 2.0 * a0 * c2 - zh2 * (a1 + a2),
            2.0 * b1 * c2,
            c2 * c2 - zh2,
        ];
        let roots = quartic_roots(coeffs);
        let mut best: Option<(Complex64, f64)> = None;
        for r in roots {
            if r.re < -1e-6 * r.norm() {
                continue; // mirror root on the other side of the axis
            }
            let polished = self.polish_gamma(r, q, t);
            let resid = self.f_residual(polished, q, t).norm();
            let keep = match best {
                None => true,
                Some((_, b)) => resid < b,
            };
            if keep {
                best = Some((polished, resid));
            }
        }
        best.map(|(r, _)| r).unwrap_or(Complex64::new(0.0, 0.0))
    }

    fn polish_gamma(&self, start: Complex64, q: f64, t: f64) -> Complex64 {
        // Backtracking Newton constrained to Re >= 0: left of the
        // imaginary axis the slowness roots live on the other sheet, so a
        // step across the axis breaks the residual monotonically.
        let mut u = Complex64::new(start.re.max(0.0), start.im);
        let mut fnorm = self.f_residual(u, q, t).norm();
        for _ in 0..60 {
            if fnorm <= 1e-13 * t.max(1.0) {
                break;
            }
            let df = self.df_du(u, q);
            if df.norm() == 0.0 {
                break; // saddle: start point already as good as it gets
            }
            let mut step = self.f_residual(u, q, t) / df;
            let cap = 0.5 * u.norm().max(1e-3 / self.v1);
            if step.norm() > cap {
                step *= cap / step.norm();
            }
            let mut improved = false;
            for _ in 0..32 {
                let mut trial = u - step;
                if trial.re < 0.0 {
                    trial = Complex64::new(0.0, trial.im);
                }
                let ftrial = self.f_residual(trial, q, t).norm();
                if ftrial < fnorm {
                    u = trial;
                    fnorm = ftrial;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        u
    }

    /// Continuation in t from just above the fictitious arrival, used when
    /// the quartic pre-solve fails to isolate the branch (typically when
    /// the saddle grazes a branch point at near-interface geometry).
    fn gamma_continuation(&self, t_target: f64, q: f64) -> Result<Complex64> {
        let t0q = self.travel_time(q);
        let w_star = self.saddle_slowness(q);
        let (a1, a2) = (self.a1(q), self.a2(q));
        let (s1, s2) = ((a1 - w_star * w_star).sqrt(), (a2 - w_star * w_star).sqrt());
        let curv = self.z_leg * a2 / (s2 * s2 * s2) + self.h * a1 / (s1 * s1 * s1);
        let mut tt = t0q * (1.0 + 1e-11);
        let mut u = Complex64::new((2.0 * (tt - t0q) / curv.max(1e-300)).sqrt(), -w_star);
        u = self.polish_gamma(u, q, tt);
        let mut step = (t_target - tt).max(1e-11 * t0q) * 0.02;
        let mut tries = 0usize;
        while tt < t_target {
            let dt = step.min(t_target - tt);
            let predictor = u + dt / self.df_du(u, q);
            let next = self.polish_gamma(predictor, q, tt + dt);
            if self.f_residual(next, q, tt + dt).norm() <= 1e-10 * t_target.max(1.0)
                && next.re >= -1e-12
            {
                tt += dt;
                u = next;
                step *= 1.6;
            } else {
                step *= 0.3;
                tries += 1;
                if tries > 200 {
                    return Err(Error::PathTracking {
                        t: t_target,
                        q,
                        detail: format!("continuation stalled at t = {tt}, last = {u}"),
                    });
                }
            }
        }
        Ok(u)
    }

    /// Contour point of the v branch (head-wave segment), for (t, q) inside
    /// the head-wave windows.
    pub fn v_point(&self, t: f64, q: f64) -> Result<PathPoint> {
        let w = if self.is_same_speed() {
            let r = self.r_mirror();
            let s = (self.a1(q) - (t / r) * (t / r)).max(0.0).sqrt();
            self.x * t / (r * r) - (self.z_leg + self.h) / r * s
        } else {
            self.v_axis_root(t, q)?
        };
        let value = Complex64::new(0.0, -w);
        let resid = self.f_residual(value, q, t).norm();
        if resid > 1e-9 * t.max(1.0) {
            return Err(Error::PathTracking {
                t,
                q,
                detail: format!("v residual {resid:.3e} at w = {w}"),
            });
        }
        let dvalue_dt = 1.0 / self.df_du(value, q);
        Ok(PathPoint { value, dvalue_dt, branch: Branch::V })
    }

    /// Root of the on-axis time on the rising side, w in (1/V_max(q), w*).
    fn v_axis_root(&self, t: f64, q: f64) -> Result<f64> {
        let w_star = self.saddle_slowness(q);
        let w_lo = (1.0 / (self.v_max * self.v_max) + q * q).sqrt();
        if w_star <= w_lo {
            return Err(Error::PathTracking {
                t,
                q,
                detail: "no head-wave segment at this q (sub-critical)".into(),
            });
        }
        let (t_lo, t_hi) = (self.axis_time(w_lo, q), self.axis_time(w_star, q));
        if t < t_lo - 1e-9 * t.max(1.0) || t > t_hi + 1e-9 * t.max(1.0) {
            return Err(Error::PathTracking {
                t,
                q,
                detail: format!("t outside the head window [{t_lo}, {t_hi}] at this q"),
            });
        }
        let (mut lo, mut hi) = (w_lo, w_star);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.axis_time(mid, q) < t {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-17 + 1e-15 * hi {
                break;
            }
        }
        let mut w = 0.5 * (lo + hi);
        for _ in 0..4 {
            let d = self.axis_time_deriv(w, q);
            if d <= 0.0 {
                break;
            }
            let step = (self.axis_time(w, q) - t) / d;
            w -= step;
            if !(w > w_lo && w < w_star) {
                w = w.clamp(w_lo, w_star);
            }
            if step.abs() <= 1e-16 * w {
                break;
            }
        }
        Ok(w)
    }
}

/// Durand-Kerner iteration for the roots of a complex quartic.
fn quartic_roots(c: [Complex64; 5]) -> [Complex64; 4] {
    let lead = c[4];
    let a: [Complex64; 4] = [c[0] / lead, c[1] / lead, c[2] / lead, c[3] / lead];
    let eval = |z: Complex64| -> Complex64 {
        (((z + a[3]) * z + a[2]) * z + a[1]) * z + a[0]
    };
    let radius = 1.0 + a.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let rot = Complex64::new(0.4, 0.9);
    let mut z = [Complex64::new(0.0, 0.0); 4];
    let mut p = Complex64::new(1.0, 0.0);
    for zi in z.iter_mut() {
        p *= rot;
        *zi = p * radius;
    }
    for _ in 0..300 {
        let mut biggest = 0.0f64;
        for i in 0..4 {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..4 {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                // Perturb clustered iterates apart.
                z[i] += Complex64::new(1e-8 * radius, 1e-8 * radius);
                continue;
            }
            let delta = eval(z[i]) / den;
            z[i] -= delta;
            biggest = biggest.max(delta.norm() / (1.0 + z[i].norm()));
        }
        if biggest < 1e-14 {
            break;
        }
    }
    z
}
