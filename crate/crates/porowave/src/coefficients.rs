//! Assembly and solution of the 6x6 complex interface system that yields the
//! reflection and transmission coefficients of the six scattered families.
//!
//! Unknown ordering is [R_Pf, R_Ps, R_S, T_Pf, T_Ps, T_S]. Rows 1 and 5 of
//! the printed system carry a common factor i*q_x; the solver divides it out
//! analytically so the solve stays regular at q_x = 0 (normal incidence),
//! where the raw rows vanish identically. `assemble_matrix` still returns
//! the raw system so residuals can be audited against it.

use num_complex::Complex64;

use crate::kinematics::kappa;
use crate::linalg::{self, CMat6, CVec6};
use crate::material::DerivedLayer;
use crate::{Error, Incidence, Mode, Result, Side};

/// A point of the transformed (horizontal-slowness) plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlownessPoint {
    pub qx: Complex64,
    pub qy: f64,
}

impl SlownessPoint {
    pub fn new(qx: Complex64, qy: f64) -> Self {
        Self { qx, qy }
    }
}

/// The six potential-amplitude ratios for one incidence mode.
#[derive(Debug, Clone, Copy)]
pub struct WaveCoefficients {
    pub incidence: Incidence,
    pub r_pf: Complex64,
    pub r_ps: Complex64,
    pub r_s: Complex64,
    pub t_pf: Complex64,
    pub t_ps: Complex64,
    pub t_s: Complex64,
}

impl WaveCoefficients {
    /// Coefficient of one outgoing family.
    pub fn outgoing(&self, side: Side, mode: Mode) -> Complex64 {
        match (side, mode) {
            (Side::Reflected, Mode::Pf) => self.r_pf,
            (Side::Reflected, Mode::Ps) => self.r_ps,
            (Side::Reflected, Mode::S) => self.r_s,
            (Side::Transmitted, Mode::Pf) => self.t_pf,
            (Side::Transmitted, Mode::Ps) => self.t_ps,
            (Side::Transmitted, Mode::S) => self.t_s,
        }
    }

    fn as_vec(&self) -> CVec6 {
        [self.r_pf, self.r_ps, self.r_s, self.t_pf, self.t_ps, self.t_s]
    }
}

/// All six vertical slownesses at one point.
struct Kappas {
    pf_t: Complex64,
    ps_t: Complex64,
    s_t: Complex64,
    pf_b: Complex64,
    ps_b: Complex64,
    s_b: Complex64,
}

fn kappas(q: SlownessPoint, top: &DerivedLayer, bottom: &DerivedLayer) -> Kappas {
    Kappas {
        pf_t: kappa(top.v_pf, q.qx, q.qy),
        ps_t: kappa(top.v_ps, q.qx, q.qy),
        s_t: kappa(top.v_s, q.qx, q.qy),
        pf_b: kappa(bottom.v_pf, q.qx, q.qy),
        ps_b: kappa(bottom.v_ps, q.qx, q.qy),
        s_b: kappa(bottom.v_s, q.qx, q.qy),
    }
}

/// The interface matrix exactly as printed, including the i*q_x factors of
/// rows 1 and 5 (so both rows vanish at q_x = 0).
pub fn assemble_matrix(
    q: SlownessPoint,
    top: &DerivedLayer,
    bottom: &DerivedLayer,
) -> [[Complex64; 6]; 6] {
    let mut a = assemble_scaled(q, top, bottom);
    let iq = Complex64::new(0.0, 1.0) * q.qx;
    for j in 0..6 {
        a[0][j] *= iq;
        a[4][j] *= iq;
    }
    a
}

/// The system with rows 1 and 5 divided by i*q_x (their exact common factor).
fn assemble_scaled(q: SlownessPoint, top: &DerivedLayer, bottom: &DerivedLayer) -> CMat6 {
    let k = kappas(q, top, bottom);
    let q2 = q.qx * q.qx + q.qy * q.qy;
    let zero = Complex64::new(0.0, 0.0);

    let (p11t, p12t, p21t, p22t) = (top.p11(), top.p12(), top.p21(), top.p22());
    let (p11b, p12b, p21b, p22b) = (bottom.p11(), bottom.p12(), bottom.p21(), bottom.p22());
    let (vpf_t2, vps_t2) = (top.v_pf * top.v_pf, top.v_ps * top.v_ps);
    let (vpf_b2, vps_b2) = (bottom.v_pf * bottom.v_pf, bottom.v_ps * bottom.v_ps);

    let row0 = [
        Complex64::new(-p11t, 0.0),
        Complex64::new(-p12t, 0.0),
        k.s_t,
        Complex64::new(p11b, 0.0),
        Complex64::new(p12b, 0.0),
        k.s_b,
    ];
    let row1 = [
        -k.pf_t * p11t,
        -k.ps_t * p12t,
        q2,
        -k.pf_b * p11b,
        -k.ps_b * p12b,
        -q2,
    ];
    let row2 = [
        -k.pf_t * p21t,
        -k.ps_t * p22t,
        -q2 * (top.rho_f / top.rho_w),
        -k.pf_b * p21b,
        -k.ps_b * p22b,
        q2 * (bottom.rho_f / bottom.rho_w),
    ];
    let row3 = [
        Complex64::new(top.m * (top.beta * p11t + p21t) / vpf_t2, 0.0),
        Complex64::new(top.m * (top.beta * p12t + p22t) / vps_t2, 0.0),
        zero,
        Complex64::new(-bottom.m * (bottom.beta * p11b + p21b) / vpf_b2, 0.0),
        Complex64::new(-bottom.m * (bottom.beta * p12b + p22b) / vps_b2, 0.0),
        zero,
    ];
    let row4 = [
        2.0 * top.mu * k.pf_t * p11t,
        2.0 * top.mu * k.ps_t * p12t,
        -top.mu * (k.s_t * k.s_t + q2),
        2.0 * bottom.mu * k.pf_b * p11b,
        2.0 * bottom.mu * k.ps_b * p12b,
        bottom.mu * (k.s_b * k.s_b + q2),
    ];
    let lam_t = top.lambda + top.m * top.beta * top.beta;
    let lam_b = bottom.lambda + bottom.m * bottom.beta * bottom.beta;
    let row5 = [
        Complex64::new((lam_t * p11t + top.m * top.beta * p21t) / vpf_t2, 0.0)
            + 2.0 * top.mu * k.pf_t * k.pf_t * p11t,
        Complex64::new((lam_t * p12t + top.m * top.beta * p22t) / vps_t2, 0.0)
            + 2.0 * top.mu * k.ps_t * k.ps_t * p12t,
        -2.0 * q2 * top.mu * k.s_t,
        Complex64::new(-(lam_b * p11b + bottom.m * bottom.beta * p21b) / vpf_b2, 0.0)
            - 2.0 * bottom.mu * k.pf_b * k.pf_b * p11b,
        Complex64::new(-(lam_b * p12b + bottom.m * bottom.beta * p22b) / vps_b2, 0.0)
            - 2.0 * bottom.mu * k.ps_b * k.ps_b * p12b,
        -2.0 * q2 * bottom.mu * k.s_b,
    ];

    [row0, row1, row2, row3, row4, row5]
}

/// The incidence column exactly as printed, including the global prefactor
/// 1/(2 kappa_inc V_inc^2) and the i*q_x factors of components 1 and 5.
pub fn assemble_rhs(
    q: SlownessPoint,
    incidence: Incidence,
    top: &DerivedLayer,
) -> Result<[Complex64; 6]> {
    let mut b = assemble_rhs_scaled(q, incidence, top)?;
    let iq = Complex64::new(0.0, 1.0) * q.qx;
    b[0] *= iq;
    b[4] *= iq;
    Ok(b)
}

fn assemble_rhs_scaled(
    q: SlownessPoint,
    incidence: Incidence,
    top: &DerivedLayer,
) -> Result<CVec6> {
    let (v_inc, p1, p2) = match incidence {
        Incidence::Pf => (top.v_pf, top.p11(), top.p21()),
        Incidence::Ps => (top.v_ps, top.p12(), top.p22()),
    };
    let k_inc = kappa(v_inc, q.qx, q.qy);
    if k_inc.norm_sqr() == 0.0 {
        return Err(Error::GrazingIncidence { qx: q.qx, qy: q.qy });
    }
    let v2 = v_inc * v_inc;
    let pre = Complex64::new(1.0, 0.0) / (2.0 * k_inc * v2);
    let lam_eff = top.lambda + top.m * top.beta * top.beta;
    Ok([
        pre * p1,
        pre * (-k_inc * p1),
        pre * (-k_inc * p2),
        pre * (-top.m * (top.beta * p1 + p2) / v2),
        pre * (2.0 * top.mu * k_inc * p1),
        pre * (Complex64::new(-(lam_eff * p1 + top.m * top.beta * p2) / v2, 0.0)
            - 2.0 * top.mu * p1 * k_inc * k_inc),
    ])
}

/// Solve the interface system at `q` for one incidence mode.
pub fn solve_coefficients(
    q: SlownessPoint,
    incidence: Incidence,
    top: &DerivedLayer,
    bottom: &DerivedLayer,
) -> Result<WaveCoefficients> {
    let a = assemble_scaled(q, top, bottom);
    let b = assemble_rhs_scaled(q, incidence, top)?;
    solve_equilibrated(&a, &b, q, incidence)
}

/// As [`solve_coefficients`] but with a 1-norm condition estimate; rejects
/// systems above `cond_limit` (a surface-wave pole near the contour).
pub fn solve_coefficients_monitored(
    q: SlownessPoint,
    incidence: Incidence,
    top: &DerivedLayer,
    bottom: &DerivedLayer,
    cond_limit: f64,
) -> Result<(WaveCoefficients, f64)> {
    let a = assemble_scaled(q, top, bottom);
    let b = assemble_rhs_scaled(q, incidence, top)?;
    let (a_eq, _) = equilibrate(&a, &b);
    let cond = linalg::cond1(&a_eq).ok_or(Error::SingularSystem { qx: q.qx, qy: q.qy })?;
    if cond > cond_limit {
        return Err(Error::NearSingularSystem { qx: q.qx, qy: q.qy, cond });
    }
    let coeffs = solve_equilibrated(&a, &b, q, incidence)?;
    Ok((coeffs, cond))
}

/// Row equilibration: rows of the printed system differ by many orders of
/// magnitude (kinematic rows vs stress rows), which partial pivoting alone
/// handles poorly.
fn equilibrate(a: &CMat6, b: &CVec6) -> (CMat6, CVec6) {
    let mut a_eq = *a;
    let mut b_eq = *b;
    for i in 0..6 {
        let mut s = 0.0f64;
        for j in 0..6 {
            s = s.max(a_eq[i][j].norm());
        }
        if s > 0.0 {
            let inv = 1.0 / s;
            for j in 0..6 {
                a_eq[i][j] *= inv;
            }
            b_eq[i] *= inv;
        }
    }
    (a_eq, b_eq)
}

fn solve_equilibrated(
    a: &CMat6,
    b: &CVec6,
    q: SlownessPoint,
    incidence: Incidence,
) -> Result<WaveCoefficients> {
    let (a_eq, b_eq) = equilibrate(a, b);
    let x = linalg::solve6(&a_eq, &b_eq).ok_or(Error::SingularSystem { qx: q.qx, qy: q.qy })?;
    Ok(WaveCoefficients {
        incidence,
        r_pf: x[0],
        r_ps: x[1],
        r_s: x[2],
        t_pf: x[3],
        t_ps: x[4],
        t_s: x[5],
    })
}

/// Backward-error residual of a solution against the raw printed system,
/// normalized by ||A|| ||x|| + ||b||. Used by audits and tests.
pub fn residual(
    q: SlownessPoint,
    top: &DerivedLayer,
    bottom: &DerivedLayer,
    coeffs: &WaveCoefficients,
) -> Result<f64> {
    let a = assemble_matrix(q, top, bottom);
    let b = assemble_rhs(q, coeffs.incidence, top)?;
    let x = coeffs.as_vec();
    let mut rmax = 0.0f64;
    for i in 0..6 {
        let mut r = -b[i];
        for j in 0..6 {
            r += a[i][j] * x[j];
        }
        rmax = rmax.max(r.norm());
    }
    let norm_a = linalg::norm1(&a);
    let norm_x: f64 = x.iter().map(|v| v.norm()).sum();
    let norm_b: f64 = b.iter().map(|v| v.norm()).sum();
    Ok(rmax / (norm_a * norm_x + norm_b))
}
