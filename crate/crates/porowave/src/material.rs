//! Biot model quantities derived from raw physical inputs.
//!
//! The coupled P-wave system couples the solid potential and the relative
//! fluid potential through a 2x2 mass matrix `A` and a 2x2 stiffness matrix
//! `B`. Diagonalizing `A^-1 B` yields the fast and slow compressional speeds
//! and the change-of-coordinates matrix `P`; the shear speed decouples.
//! The medium is assumed non dissipative (zero fluid viscosity), so the
//! permeability never enters the derived quantities.

use crate::{Error, Result};

/// Raw Biot physical parameters of one half-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoroelasticLayer {
    /// Solid grain density (kg/m3).
    pub rho_s: f64,
    /// Pore fluid density (kg/m3).
    pub rho_f: f64,
    /// Porosity, in (0, 1).
    pub phi: f64,
    /// Tortuosity of the solid matrix, >= 1.
    pub tortuosity: f64,
    /// Solid bulk modulus (Pa).
    pub k_s: f64,
    /// Fluid bulk modulus (Pa).
    pub k_f: f64,
    /// Frame bulk modulus (Pa).
    pub k_b: f64,
    /// Frame shear modulus (Pa).
    pub mu: f64,
}

/// Gradient/pressure point-source strengths.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SourceAmplitudes {
    /// Strength of the solid gradient source (N m).
    pub f_u: f64,
    /// Strength of the relative-fluid gradient source (N m).
    pub f_w: f64,
    /// Strength of the pressure source.
    pub f_p: f64,
}

/// Modal source strengths for the fast and slow P potentials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalAmplitudes {
    pub f_pf: f64,
    pub f_ps: f64,
}

/// All model quantities computed from a [`PoroelasticLayer`].
///
/// `p` holds the eigenvectors of `A^-1 B` as columns, column 1 belonging to
/// the larger eigenvalue (the fast P wave). Columns are normalized to unit
/// Euclidean norm with positive first component; every physical output is
/// invariant under column rescaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedLayer {
    /// Overall density phi*rho_f + (1-phi)*rho_s (kg/m3).
    pub rho: f64,
    /// Apparent fluid mass density a*rho_f/phi (kg/m3).
    pub rho_w: f64,
    /// Effective-stress coefficient 1 - K_b/K_s.
    pub beta: f64,
    /// Fluid-storage modulus (Pa).
    pub m: f64,
    /// Lame constant K_b - 2*mu/3 (Pa).
    pub lambda: f64,
    /// P-modulus lambda + 2*mu + m*beta^2 (Pa).
    pub alpha: f64,
    /// Frame shear modulus (Pa), copied from the input.
    pub mu: f64,
    /// Fluid density (kg/m3), copied from the input.
    pub rho_f: f64,
    /// Mass matrix [[rho, rho_f], [rho_f, rho_w]].
    pub a: [[f64; 2]; 2],
    /// Stiffness matrix [[alpha, m*beta], [m*beta, m]].
    pub b: [[f64; 2]; 2],
    /// Fast P speed (m/s).
    pub v_pf: f64,
    /// Slow P speed (m/s), strictly below `v_pf`.
    pub v_ps: f64,
    /// Shear speed sqrt(mu*rho_w / (rho*rho_w - rho_f^2)) (m/s).
    pub v_s: f64,
    /// Change-of-coordinates matrix (eigenvectors of A^-1 B as columns).
    pub p: [[f64; 2]; 2],
    /// Inverse of `p`.
    pub p_inv: [[f64; 2]; 2],
}

impl DerivedLayer {
    #[inline]
    pub fn p11(&self) -> f64 {
        self.p[0][0]
    }
    #[inline]
    pub fn p12(&self) -> f64 {
        self.p[0][1]
    }
    #[inline]
    pub fn p21(&self) -> f64 {
        self.p[1][0]
    }
    #[inline]
    pub fn p22(&self) -> f64 {
        self.p[1][1]
    }

    /// Speed of one mode.
    pub fn speed(&self, mode: crate::Mode) -> f64 {
        match mode {
            crate::Mode::Pf => self.v_pf,
            crate::Mode::Ps => self.v_ps,
            crate::Mode::S => self.v_s,
        }
    }

    /// Rescale column `j` (0 or 1) of `P` by `c` and recompute the inverse.
    ///
    /// The physical fields must not depend on eigenvector normalization, so
    /// this is exposed for invariance testing and auditing.
    pub fn scale_p_column(&mut self, j: usize, c: f64) {
        assert!(j < 2, "column index out of range");
        assert!(c != 0.0, "scale factor must be nonzero");
        self.p[0][j] *= c;
        self.p[1][j] *= c;
        self.p_inv = inv2(&self.p).expect("rescaled P stays invertible");
    }
}

pub(crate) fn mul2(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub(crate) fn inv2(a: &[[f64; 2]; 2]) -> Option<[[f64; 2]; 2]> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some([
        [a[1][1] / det, -a[0][1] / det],
        [-a[1][0] / det, a[0][0] / det],
    ])
}

/// Solve a 2x2 linear system with partial pivoting.
pub(crate) fn solve2(a: &[[f64; 2]; 2], rhs: [f64; 2]) -> Option<[f64; 2]> {
    let (r0, r1, b0, b1) = if a[0][0].abs() >= a[1][0].abs() {
        (a[0], a[1], rhs[0], rhs[1])
    } else {
        (a[1], a[0], rhs[1], rhs[0])
    };
    if r0[0] == 0.0 {
        return None;
    }
    let l = r1[0] / r0[0];
    let d = r1[1] - l * r0[1];
    if d == 0.0 {
        return None;
    }
    let y = (b1 - l * b0) / d;
    let x = (b0 - r0[1] * y) / r0[0];
    if x.is_finite() && y.is_finite() {
        Some([x, y])
    } else {
        None
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::UnphysicalMaterial(format!("{name} must be > 0, got {v}")));
    }
    Ok(())
}

/// Derive all model quantities, wave speeds, eigenbasis and its inverse.
pub fn derive_layer(layer: &PoroelasticLayer) -> Result<DerivedLayer> {
    check_positive("rho_s", layer.rho_s)?;
    check_positive("rho_f", layer.rho_f)?;
    check_positive("K_s", layer.k_s)?;
    check_positive("K_f", layer.k_f)?;
    check_positive("K_b", layer.k_b)?;
    check_positive("mu", layer.mu)?;
    if !(layer.phi > 0.0 && layer.phi < 1.0) {
        return Err(Error::UnphysicalMaterial(format!(
            "porosity must satisfy 0 < phi < 1, got {}",
            layer.phi
        )));
    }
    if !(layer.tortuosity >= 1.0) {
        return Err(Error::UnphysicalMaterial(format!(
            "tortuosity must be >= 1, got {}",
            layer.tortuosity
        )));
    }
    if layer.k_b > layer.k_s {
        return Err(Error::UnphysicalMaterial(format!(
            "K_b <= K_s violated: K_b = {}, K_s = {}",
            layer.k_b, layer.k_s
        )));
    }

    let rho = layer.phi * layer.rho_f + (1.0 - layer.phi) * layer.rho_s;
    let rho_w = layer.tortuosity * layer.rho_f / layer.phi;
    let beta = 1.0 - layer.k_b / layer.k_s;
    let m = 1.0 / (layer.phi / layer.k_f + (beta - layer.phi) / layer.k_s);
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::UnphysicalMaterial(format!(
            "fluid-storage modulus m must be > 0, got {m}"
        )));
    }
    let lambda = layer.k_b - 2.0 * layer.mu / 3.0;
    let alpha = lambda + 2.0 * layer.mu + m * beta * beta;

    let det_a = rho * rho_w - layer.rho_f * layer.rho_f;
    if !(det_a > 0.0) {
        return Err(Error::UnphysicalMaterial(format!(
            "rho*rho_w - rho_f^2 must be > 0, got {det_a}"
        )));
    }
    // B positive definite <=> m > 0 and det B = m*(lambda + 2 mu) > 0.
    if !(lambda + 2.0 * layer.mu > 0.0) {
        return Err(Error::UnphysicalMaterial(format!(
            "lambda + 2*mu must be > 0, got {}",
            lambda + 2.0 * layer.mu
        )));
    }

    let a = [[rho, layer.rho_f], [layer.rho_f, rho_w]];
    let b = [[alpha, m * beta], [m * beta, m]];
    let a_inv = inv2(&a).expect("det A already checked");
    let mm = mul2(&a_inv, &b);

    // M = A^-1 B is similar to a symmetric positive definite matrix, so it
    // has two real positive eigenvalues; a repeated one is degenerate.
    let tr = mm[0][0] + mm[1][1];
    let det = mm[0][0] * mm[1][1] - mm[0][1] * mm[1][0];
    let disc = tr * tr - 4.0 * det;
    if disc <= 0.0 {
        return Err(Error::DegeneratePModes((tr / 2.0).abs().sqrt()));
    }
    let root = disc.sqrt();
    let lam_pf = 0.5 * (tr + root);
    let lam_ps = 0.5 * (tr - root);
    if !(lam_ps > 0.0) {
        return Err(Error::UnphysicalMaterial(format!(
            "A^-1 B has a non-positive eigenvalue {lam_ps}"
        )));
    }
    if (lam_pf - lam_ps) <= 1e-12 * lam_pf {
        return Err(Error::DegeneratePModes(lam_pf.sqrt()));
    }

    let v_pf = lam_pf.sqrt();
    let v_ps = lam_ps.sqrt();
    let v_s = (layer.mu * rho_w / det_a).sqrt();

    let p = [
        [eigvec2(&mm, lam_pf)[0], eigvec2(&mm, lam_ps)[0]],
        [eigvec2(&mm, lam_pf)[1], eigvec2(&mm, lam_ps)[1]],
    ];
    let p_inv = inv2(&p).ok_or(Error::DegeneratePModes(v_pf))?;

    Ok(DerivedLayer {
        rho,
        rho_w,
        beta,
        m,
        lambda,
        alpha,
        mu: layer.mu,
        rho_f: layer.rho_f,
        a,
        b,
        v_pf,
        v_ps,
        v_s,
        p,
        p_inv,
    })
}

/// Unit eigenvector of a 2x2 matrix for eigenvalue `lam`, sign-normalized
/// to positive first component (positive second if the first vanishes).
fn eigvec2(m: &[[f64; 2]; 2], lam: f64) -> [f64; 2] {
    // (M - lam I) v = 0 has rows (m00-lam, m01) and (m10, m11-lam); use the
    // candidate built from the numerically larger row.
    let c1 = [m[0][1], lam - m[0][0]];
    let c2 = [lam - m[1][1], m[1][0]];
    let n1 = c1[0] * c1[0] + c1[1] * c1[1];
    let n2 = c2[0] * c2[0] + c2[1] * c2[1];
    let v = if n1 >= n2 { c1 } else { c2 };
    let norm = (v[0] * v[0] + v[1] * v[1]).sqrt();
    let mut v = [v[0] / norm, v[1] / norm];
    let flip = if v[0] != 0.0 { v[0] < 0.0 } else { v[1] < 0.0 };
    if flip {
        v = [-v[0], -v[1]];
    }
    v
}

/// Project the physical source strengths onto the P-mode potentials:
/// solves (A P) F_modal = (f_u - beta*m*f_p, f_w - m*f_p).
pub fn project_source(top: &DerivedLayer, s: &SourceAmplitudes) -> Result<ModalAmplitudes> {
    let f = [
        s.f_u - top.beta * top.m * s.f_p,
        s.f_w - top.m * s.f_p,
    ];
    let ap = mul2(&top.a, &top.p);
    let x = solve2(&ap, f)
        .ok_or_else(|| Error::Internal("A*P singular after successful derivation".into()))?;
    Ok(ModalAmplitudes { f_pf: x[0], f_ps: x[1] })
}

impl ModalAmplitudes {
    pub fn get(&self, inc: crate::Incidence) -> f64 {
        match inc {
            crate::Incidence::Pf => self.f_pf,
            crate::Incidence::Ps => self.f_ps,
        }
    }
}
