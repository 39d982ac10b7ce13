//! Exact transient wave solutions for an infinite 3D medium made of two
//! homogeneous poroelastic half-spaces separated by a plane interface.
//!
//! The solver evaluates Green functions of the solid displacement (incident,
//! reflected and transmitted wave families, head waves included) by deforming
//! the inversion contour in the horizontal-slowness plane, and convolves them
//! with a source wavelet to produce seismograms suitable for validating
//! numerical wave-propagation codes.
//!
//! Modules mirror the pipeline: [`material`] derives Biot model quantities,
//! [`kinematics`] provides the branch-cut-correct square root and slowness
//! functions, [`coefficients`] solves the 6x6 interface system, [`cagniard`]
//! tracks the complex slowness contour per scattered-wave family, [`greens`]
//! assembles the displacement integrals, [`timeseries`] handles wavelets and
//! convolution, [`validation`] hosts independent oracles, and [`cli`] is the
//! command-line front end.

pub mod cagniard;
pub mod cli;
pub mod coefficients;
pub mod config;
pub mod greens;
pub mod kinematics;
mod linalg;
pub mod material;
mod quad;
pub mod timeseries;
pub mod validation;

use num_complex::Complex64;

/// Incident wave mode (the compression source excites the two P potentials).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Incidence {
    Pf,
    Ps,
}

impl Incidence {
    pub fn label(self) -> &'static str {
        match self {
            Incidence::Pf => "Pf",
            Incidence::Ps => "Ps",
        }
    }
}

/// Outgoing wave mode of a scattered family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Pf,
    Ps,
    S,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::Pf => "Pf",
            Mode::Ps => "Ps",
            Mode::S => "S",
        }
    }
}

/// Which side of the interface a scattered wave lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Reflected,
    Transmitted,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unphysical material: {0}")]
    UnphysicalMaterial(String),
    #[error("degenerate P-modes: V_Pf = V_Ps = {0} m/s")]
    DegeneratePModes(f64),
    #[error("grazing incidence singularity at q_x = {qx}, q_y = {qy}")]
    GrazingIncidence { qx: Complex64, qy: f64 },
    #[error("near-singular interface system at q_x = {qx}, q_y = {qy} (cond ~ {cond:.3e})")]
    NearSingularSystem { qx: Complex64, qy: f64, cond: f64 },
    #[error("singular interface system at q_x = {qx}, q_y = {qy}")]
    SingularSystem { qx: Complex64, qy: f64 },
    #[error("path tracking failure at t = {t}, q = {q}: {detail}")]
    PathTracking { t: f64, q: f64, detail: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature did not converge: worst subinterval [{a}, {b}], err {err:.3e}")]
    Quadrature { a: f64, b: f64, err: f64 },
    #[error("undersampled wavelet: dt = {dt} gives {spp:.1} samples per 1/f0, need >= 20")]
    UndersampledWavelet { dt: f64, spp: f64 },
    #[error("receiver coincides with the source")]
    ReceiverAtSource,
    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("internal error: {0}")]
    Internal(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
