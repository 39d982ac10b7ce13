//! C ABI for the porowave solver: opaque problem handles, integer status
//! codes, and trace evaluation into caller-provided buffers. The generated
//! header lives at `include/porowave.h`.
//!
//! Every entry point catches panics; nothing unwinds across the boundary.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use porowave::config::ProblemConfig;
use porowave::greens::{rotate_to_3d, Channel, GreenEvaluator, QuadSettings};
use porowave::material::{derive_layer, project_source};
use porowave::timeseries::convolve_with_jumps;
use porowave::Error;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum PorowaveStatus {
    Ok = 0,
    ValidationFailed = 1,
    ConfigError = 2,
    NumericalError = 3,
    NullArgument = 4,
    BadIndex = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Arrival-time table entry of one wave at one receiver. Absent head-wave
/// times are NaN.
#[repr(C)]
pub struct PorowaveArrival {
    pub t0: f64,
    pub t_h1: f64,
    pub t_h2: f64,
    /// 1 when the family radiates a head wave at this offset.
    pub head_exists: u8,
}

/// Opaque solver handle: a parsed configuration with per-receiver
/// evaluators, built once and immutable afterwards.
pub struct PorowaveProblem {
    config: ProblemConfig,
    evaluators: Vec<GreenEvaluator>,
    velocities: [f64; 6],
}

fn status_of(e: &Error) -> PorowaveStatus {
    match e {
        Error::Config { .. }
        | Error::UnphysicalMaterial(_)
        | Error::DegeneratePModes(_)
        | Error::Io(_) => PorowaveStatus::ConfigError,
        _ => PorowaveStatus::NumericalError,
    }
}

fn build_problem(text: &str) -> Result<PorowaveProblem, Error> {
    let config = ProblemConfig::parse(text)?;
    let top = derive_layer(&config.top)?;
    let bottom = derive_layer(&config.bottom)?;
    let modal = project_source(&top, &config.source)?;
    let evaluators = config
        .receivers
        .iter()
        .map(|r| {
            GreenEvaluator::new(
                &top,
                &bottom,
                modal,
                config.source_height,
                r.offset(),
                r.z,
                QuadSettings::default(),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PorowaveProblem {
        config,
        evaluators,
        velocities: [top.v_pf, top.v_ps, top.v_s, bottom.v_pf, bottom.v_ps, bottom.v_s],
    })
}

/// Parse a configuration text and build a solver handle. Returns null on
/// failure and stores the status through `status` when given.
///
/// # Safety
/// `text` must be a valid NUL-terminated C string; `status` may be null.
#[no_mangle]
pub unsafe extern "C" fn porowave_problem_parse(
    text: *const c_char,
    status: *mut PorowaveStatus,
) -> *mut PorowaveProblem {
    let set = |s: PorowaveStatus| {
        if !status.is_null() {
            unsafe { *status = s };
        }
    };
    if text.is_null() {
        set(PorowaveStatus::NullArgument);
        return std::ptr::null_mut();
    }
    let text = match unsafe { CStr::from_ptr(text) }.to_str() {
        Ok(t) => t.to_owned(),
        Err(_) => {
            set(PorowaveStatus::ConfigError);
            return std::ptr::null_mut();
        }
    };
    match catch_unwind(AssertUnwindSafe(|| build_problem(&text))) {
        Ok(Ok(p)) => {
            set(PorowaveStatus::Ok);
            Box::into_raw(Box::new(p))
        }
        Ok(Err(e)) => {
            set(status_of(&e));
            std::ptr::null_mut()
        }
        Err(_) => {
            set(PorowaveStatus::Panic);
            std::ptr::null_mut()
        }
    }
}

/// Destroy a handle created by [`porowave_problem_parse`].
///
/// # Safety
/// `problem` must be a pointer previously returned by the parser (or null).
#[no_mangle]
pub unsafe extern "C" fn porowave_problem_free(problem: *mut PorowaveProblem) {
    if !problem.is_null() {
        drop(unsafe { Box::from_raw(problem) });
    }
}

/// The six medium speeds (top Pf, Ps, S, bottom Pf, Ps, S) in m/s.
///
/// # Safety
/// `out6` must point to six writable doubles.
#[no_mangle]
pub unsafe extern "C" fn porowave_velocities(
    problem: *const PorowaveProblem,
    out6: *mut f64,
) -> PorowaveStatus {
    if problem.is_null() || out6.is_null() {
        return PorowaveStatus::NullArgument;
    }
    let p = unsafe { &*problem };
    let out = unsafe { std::slice::from_raw_parts_mut(out6, 6) };
    out.copy_from_slice(&p.velocities);
    PorowaveStatus::Ok
}

/// Number of receivers in the configuration.
///
/// # Safety
/// `problem` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn porowave_receiver_count(problem: *const PorowaveProblem) -> usize {
    if problem.is_null() {
        return 0;
    }
    unsafe { &*problem }.evaluators.len()
}

/// Number of wave channels at one receiver (8 above the interface, 6 below).
///
/// # Safety
/// `problem` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn porowave_wave_count(
    problem: *const PorowaveProblem,
    receiver: usize,
) -> usize {
    if problem.is_null() {
        return 0;
    }
    let p = unsafe { &*problem };
    p.evaluators.get(receiver).map(|e| e.channels.len()).unwrap_or(0)
}

/// Copy the NUL-terminated label of one wave channel ("Pf", "RPfPs", ...).
///
/// # Safety
/// `buf` must point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn porowave_wave_label(
    problem: *const PorowaveProblem,
    receiver: usize,
    wave: usize,
    buf: *mut c_char,
    cap: usize,
) -> PorowaveStatus {
    if problem.is_null() || buf.is_null() {
        return PorowaveStatus::NullArgument;
    }
    let p = unsafe { &*problem };
    let Some(ev) = p.evaluators.get(receiver) else {
        return PorowaveStatus::BadIndex;
    };
    let Some((id, _)) = ev.channels.get(wave) else {
        return PorowaveStatus::BadIndex;
    };
    let label = id.label();
    if label.len() + 1 > cap {
        return PorowaveStatus::BufferTooSmall;
    }
    let out = unsafe { std::slice::from_raw_parts_mut(buf as *mut u8, cap) };
    out[..label.len()].copy_from_slice(label.as_bytes());
    out[label.len()] = 0;
    PorowaveStatus::Ok
}

/// Arrival-time table entry of one wave channel.
///
/// # Safety
/// `out` must point to a writable [`PorowaveArrival`].
#[no_mangle]
pub unsafe extern "C" fn porowave_arrival(
    problem: *const PorowaveProblem,
    receiver: usize,
    wave: usize,
    out: *mut PorowaveArrival,
) -> PorowaveStatus {
    if problem.is_null() || out.is_null() {
        return PorowaveStatus::NullArgument;
    }
    let p = unsafe { &*problem };
    let Some(ev) = p.evaluators.get(receiver) else {
        return PorowaveStatus::BadIndex;
    };
    let Some((_, channel)) = ev.channels.get(wave) else {
        return PorowaveStatus::BadIndex;
    };
    let arrival = match channel {
        Channel::Incident(_) => {
            let onset = ev.onsets()[wave].1;
            PorowaveArrival { t0: onset, t_h1: f64::NAN, t_h2: f64::NAN, head_exists: 0 }
        }
        Channel::Scattered(s) => PorowaveArrival {
            t0: s.windows.t0,
            t_h1: s.windows.t_h1.unwrap_or(f64::NAN),
            t_h2: s.windows.t_h2.unwrap_or(f64::NAN),
            head_exists: s.windows.head_exists as u8,
        },
    };
    unsafe { *out = arrival };
    PorowaveStatus::Ok
}

fn eval_green(p: &PorowaveProblem, receiver: usize, t: f64) -> Result<[f64; 3], PorowaveStatus> {
    let ev = p.evaluators.get(receiver).ok_or(PorowaveStatus::BadIndex)?;
    let r = &p.config.receivers[receiver];
    let s = ev.eval(t).map_err(|e| status_of(&e))?;
    let (ux, uy, uz) = rotate_to_3d(s.total.0, s.total.1, r.x, r.y);
    Ok([ux, uy, uz])
}

/// Total Green solid displacement (ux, uy, uz) at one receiver and time.
///
/// # Safety
/// `out3` must point to three writable doubles.
#[no_mangle]
pub unsafe extern "C" fn porowave_green_at(
    problem: *const PorowaveProblem,
    receiver: usize,
    t: f64,
    out3: *mut f64,
) -> PorowaveStatus {
    if problem.is_null() || out3.is_null() {
        return PorowaveStatus::NullArgument;
    }
    let p = unsafe { &*problem };
    match catch_unwind(AssertUnwindSafe(|| eval_green(p, receiver, t))) {
        Ok(Ok(u)) => {
            unsafe { std::slice::from_raw_parts_mut(out3, 3) }.copy_from_slice(&u);
            PorowaveStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => PorowaveStatus::Panic,
    }
}

fn fill_trace(
    p: &PorowaveProblem,
    receiver: usize,
    t_start: f64,
    dt: f64,
    n: usize,
    convolve: Option<bool>,
    out: &mut [f64],
) -> Result<(), PorowaveStatus> {
    if !(dt > 0.0) || n < 2 {
        return Err(PorowaveStatus::ConfigError);
    }
    let ev = p.evaluators.get(receiver).ok_or(PorowaveStatus::BadIndex)?;
    let r = &p.config.receivers[receiver];
    let mut cols = vec![vec![0.0f64; n]; 3];
    for k in 0..n {
        let s = ev.eval(t_start + k as f64 * dt).map_err(|e| status_of(&e))?;
        let (ux, uy, uz) = rotate_to_3d(s.total.0, s.total.1, r.x, r.y);
        cols[0][k] = ux;
        cols[1][k] = uy;
        cols[2][k] = uz;
    }
    if let Some(derivative) = convolve {
        let jumps = ev.jump_times();
        for col in cols.iter_mut() {
            let tr = porowave::timeseries::Trace::new(t_start, dt, std::mem::take(col))
                .map_err(|e| status_of(&e))?;
            *col = convolve_with_jumps(&tr, &p.config.wavelet, &jumps, derivative)
                .map_err(|e| status_of(&e))?
                .samples;
        }
    }
    for k in 0..n {
        out[3 * k] = cols[0][k];
        out[3 * k + 1] = cols[1][k];
        out[3 * k + 2] = cols[2][k];
    }
    Ok(())
}

/// Total Green trace on a uniform grid: `out` receives n samples of
/// (ux, uy, uz), interleaved.
///
/// # Safety
/// `out` must point to `3 n` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn porowave_green_trace(
    problem: *const PorowaveProblem,
    receiver: usize,
    t_start: f64,
    dt: f64,
    n: usize,
    out: *mut f64,
) -> PorowaveStatus {
    if problem.is_null() || out.is_null() {
        return PorowaveStatus::NullArgument;
    }
    let p = unsafe { &*problem };
    let out = unsafe { std::slice::from_raw_parts_mut(out, 3 * n) };
    match catch_unwind(AssertUnwindSafe(|| fill_trace(p, receiver, t_start, dt, n, None, out))) {
        Ok(Ok(())) => PorowaveStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => PorowaveStatus::Panic,
    }
}

/// Source-convolved seismogram trace; `derivative_kernel != 0` convolves
/// with the wavelet time derivative instead of the wavelet.
///
/// # Safety
/// `out` must point to `3 n` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn porowave_seismogram_trace(
    problem: *const PorowaveProblem,
    receiver: usize,
    t_start: f64,
    dt: f64,
    n: usize,
    derivative_kernel: u8,
    out: *mut f64,
) -> PorowaveStatus {
    if problem.is_null() || out.is_null() {
        return PorowaveStatus::NullArgument;
    }
    let p = unsafe { &*problem };
    let out = unsafe { std::slice::from_raw_parts_mut(out, 3 * n) };
    let conv = Some(derivative_kernel != 0);
    match catch_unwind(AssertUnwindSafe(|| fill_trace(p, receiver, t_start, dt, n, conv, out))) {
        Ok(Ok(())) => PorowaveStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => PorowaveStatus::Panic,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn porowave_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn config_text() -> CString {
        let mut cfg = porowave::config::reference_config();
        cfg.time.t_end = 0.3;
        cfg.time.samples_per_period = Some(25.0);
        CString::new(cfg.emit()).unwrap()
    }

    #[test]
    fn parse_and_query_roundtrip() {
        let text = config_text();
        let mut status = PorowaveStatus::Panic;
        let p = unsafe { porowave_problem_parse(text.as_ptr(), &mut status) };
        assert!(status == PorowaveStatus::Ok);
        assert!(!p.is_null());

        let mut v = [0.0f64; 6];
        assert!(unsafe { porowave_velocities(p, v.as_mut_ptr()) } == PorowaveStatus::Ok);
        assert!((v[0] - 2692.0).abs() < 1.0);
        assert!((v[4] - 744.0).abs() < 1.0);

        assert_eq!(unsafe { porowave_receiver_count(p) }, 2);
        assert_eq!(unsafe { porowave_wave_count(p, 0) }, 8);
        assert_eq!(unsafe { porowave_wave_count(p, 1) }, 6);

        let mut buf = [0i8; 16];
        assert!(
            unsafe { porowave_wave_label(p, 0, 2, buf.as_mut_ptr() as *mut c_char, 16) }
                == PorowaveStatus::Ok
        );
        let label = unsafe { CStr::from_ptr(buf.as_ptr() as *const c_char) };
        assert_eq!(label.to_str().unwrap(), "RPfPf");

        let mut arr = PorowaveArrival { t0: 0.0, t_h1: 0.0, t_h2: 0.0, head_exists: 9 };
        assert!(unsafe { porowave_arrival(p, 0, 0, &mut arr) } == PorowaveStatus::Ok);
        assert!((arr.t0 - 0.149).abs() < 1e-3);
        assert_eq!(arr.head_exists, 0);

        let mut u = [0.0f64; 3];
        assert!(unsafe { porowave_green_at(p, 0, 0.2, u.as_mut_ptr()) } == PorowaveStatus::Ok);
        assert!(u[0] != 0.0 && u[2] != 0.0);
        assert_eq!(u[1], 0.0); // in-plane receiver keeps uy = 0

        let n = 64usize;
        let mut trace = vec![0.0f64; 3 * n];
        assert!(
            unsafe { porowave_green_trace(p, 0, 0.0, 0.004, n, trace.as_mut_ptr()) }
                == PorowaveStatus::Ok
        );
        assert!(trace.iter().any(|&x| x != 0.0));
        let mut seis = vec![0.0f64; 3 * n];
        assert!(
            unsafe { porowave_seismogram_trace(p, 0, 0.0, 0.004, n, 0, seis.as_mut_ptr()) }
                == PorowaveStatus::Ok
        );
        unsafe { porowave_problem_free(p) };
    }

    #[test]
    fn bad_inputs_report_codes() {
        let mut status = PorowaveStatus::Ok;
        let p = unsafe { porowave_problem_parse(std::ptr::null(), &mut status) };
        assert!(p.is_null() && status == PorowaveStatus::NullArgument);

        let junk = CString::new("[nope]\nkey = 1\n").unwrap();
        let p = unsafe { porowave_problem_parse(junk.as_ptr(), &mut status) };
        assert!(p.is_null() && status == PorowaveStatus::ConfigError);

        let text = config_text();
        let p = unsafe { porowave_problem_parse(text.as_ptr(), &mut status) };
        assert!(status == PorowaveStatus::Ok);
        let mut u = [0.0f64; 3];
        assert!(unsafe { porowave_green_at(p, 7, 0.1, u.as_mut_ptr()) } == PorowaveStatus::BadIndex);
        unsafe { porowave_problem_free(p) };
        unsafe { porowave_problem_free(std::ptr::null_mut()) };
    }
}
