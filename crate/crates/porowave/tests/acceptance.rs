//! Acceptance suite for the two-layer reference problem: every release gate
//! in one place, one test per criterion, each printing a pass/fail line.
//! Run with `cargo test --release -p porowave --test acceptance -- --nocapture`.

use std::time::Instant;

use rand::{Rng, SeedableRng};

use porowave::cagniard::WavePair;
use porowave::config::{reference_config, ProblemConfig};
use porowave::greens::{Channel, GreenEvaluator, QuadSettings, WaveId};
use porowave::material::{derive_layer, project_source, DerivedLayer, SourceAmplitudes};
use porowave::timeseries::{convolve_with_jumps, wavelet_derivative, wavelet_value, Trace};
use porowave::validation::{fermat_head_wave, fermat_two_leg};
use porowave::{Incidence, Mode, Side};

fn verdict(criterion: &str, pass: bool, detail: &str) {
    println!(
        "{} criterion {criterion}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion}: {detail}");
}

/// All twelve scattered families of the reference problem, at the geometry
/// of the receiver on the matching side.
fn all_pairs(cfg: &ProblemConfig) -> Vec<WavePair> {
    let top = derive_layer(&cfg.top).unwrap();
    let bottom = derive_layer(&cfg.bottom).unwrap();
    let mut out = Vec::new();
    for r in &cfg.receivers {
        let side = if r.z > 0.0 { Side::Reflected } else { Side::Transmitted };
        for inc in [Incidence::Pf, Incidence::Ps] {
            for mode in [Mode::Pf, Mode::Ps, Mode::S] {
                out.push(
                    WavePair::new(
                        inc,
                        mode,
                        side,
                        &top,
                        &bottom,
                        cfg.source_height,
                        r.offset(),
                        r.z.abs(),
                    )
                    .unwrap(),
                );
            }
        }
    }
    out
}

fn evaluators(cfg: &ProblemConfig) -> Vec<GreenEvaluator> {
    let top = derive_layer(&cfg.top).unwrap();
    let bottom = derive_layer(&cfg.bottom).unwrap();
    let modal = project_source(&top, &cfg.source).unwrap();
    cfg.receivers
        .iter()
        .map(|r| {
            GreenEvaluator::new(
                &top,
                &bottom,
                modal,
                cfg.source_height,
                r.offset(),
                r.z,
                QuadSettings::default(),
            )
            .unwrap()
        })
        .collect()
}

/// Per-wave and total traces of one receiver on the shifted default grid.
fn compute_traces(cfg: &ProblemConfig, ev: &GreenEvaluator) -> (f64, f64, Vec<Vec<(f64, f64)>>) {
    let jumps = ev.jump_times();
    let (t_start, dt, n) = porowave::cli::build_grid(cfg, &jumps);
    let mut per_wave = vec![Vec::with_capacity(n); ev.channels.len() + 1];
    for k in 0..n {
        let s = ev.eval(t_start + k as f64 * dt).unwrap();
        for (w, u) in s.waves.iter().enumerate() {
            per_wave[w].push(*u);
        }
        per_wave[ev.channels.len()].push(s.total);
    }
    (t_start, dt, per_wave)
}

#[test]
fn criterion_01_velocity_table() {
    let start = Instant::now();
    let cfg = reference_config();
    let top = derive_layer(&cfg.top).unwrap();
    let bottom = derive_layer(&cfg.bottom).unwrap();
    let got = [top.v_pf, top.v_ps, top.v_s, bottom.v_pf, bottom.v_ps, bottom.v_s];
    let want = [2692.0, 1186.0, 1409.0, 2535.0, 744.0, 1415.0];
    let worst = got
        .iter()
        .zip(&want)
        .map(|(g, w)| (g - w).abs())
        .fold(0.0f64, f64::max);
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        "1 (velocity table)",
        worst <= 1.0 && elapsed < 1.0,
        &format!("six speeds within {worst:.3} m/s of the reference, {elapsed:.3} s"),
    );
}

#[test]
fn criterion_02_path_residuals() {
    let start = Instant::now();
    let cfg = reference_config();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for pair in all_pairs(&cfg) {
        let w = pair.head_window();
        let n_v = if w.head_exists { 200 } else { 0 };
        for _ in 0..(1000 - n_v) {
            let q = rng.gen_range(0.0..2e-3);
            let t = pair.travel_time(q) * rng.gen_range(1.000001..3.0);
            let g = pair.gamma_point(t, q).unwrap();
            worst = worst.max(pair.f_residual(g.value, q, t).norm());
        }
        if w.head_exists {
            let (t_h1, t0) = (w.t_h1.unwrap(), w.t0);
            let span = t0 - t_h1;
            for _ in 0..n_v {
                let t = rng.gen_range(t_h1 + 0.01 * span..t0 - 0.01 * span);
                let v = pair.v_point(t, 0.0).unwrap();
                worst = worst.max(pair.f_residual(v.value, 0.0, t).norm());
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        "2 (path residuals)",
        worst <= 1e-9 && elapsed < 10.0,
        &format!("12 pairs x 1000 samples, max |F| = {worst:.3e}, {elapsed:.2} s"),
    );
}

#[test]
fn criterion_03_derivative_audit() {
    let cfg = reference_config();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for pair in all_pairs(&cfg) {
        let w = pair.head_window();
        for _ in 0..800 {
            let q = rng.gen_range(0.0..2e-3);
            let t0q = pair.travel_time(q);
            let t = t0q * rng.gen_range(1.000001..3.0);
            let g = pair.gamma_point(t, q).unwrap();
            let dt = (1e-7 * w.t0).min(1e-4 * (t - t0q));
            let gp = pair.gamma_point(t + dt, q).unwrap();
            let gm = pair.gamma_point(t - dt, q).unwrap();
            let fd = (gp.value - gm.value) / (2.0 * dt);
            worst = worst.max((g.dvalue_dt - fd).norm() / g.dvalue_dt.norm());
        }
        // The finite-difference oracle needs head-wave windows wide enough
        // to hold its step; marginally critical pairs keep the residual
        // check of criterion 2 but cannot be differenced meaningfully.
        if w.head_exists {
            let (t_h1, t0) = (w.t_h1.unwrap(), w.t0);
            let span = t0 - t_h1;
            if span > 1e-4 * t0 {
                for _ in 0..200 {
                    let t = rng.gen_range(t_h1 + 0.2 * span..t0 - 0.2 * span);
                    let v = pair.v_point(t, 0.0).unwrap();
                    let dt = 2e-3 * (t - t_h1).min(t0 - t);
                    let vp = pair.v_point(t + dt, 0.0).unwrap();
                    let vm = pair.v_point(t - dt, 0.0).unwrap();
                    let fd = (vp.value - vm.value) / (2.0 * dt);
                    worst = worst.max((v.dvalue_dt - fd).norm() / v.dvalue_dt.norm());
                }
            }
        }
    }
    verdict(
        "3 (derivative audit)",
        worst <= 1e-6,
        &format!("analytic vs central differences, worst relative {worst:.3e}"),
    );
}

#[test]
fn criterion_04_arrival_time_oracles() {
    let cfg = reference_config();
    let mut worst_t0 = 0.0f64;
    let mut worst_h = 0.0f64;
    let mut heads = 0usize;
    for pair in all_pairs(&cfg) {
        let oracle = fermat_two_leg(pair.h, pair.z_leg, pair.x, pair.v1, pair.v2);
        worst_t0 = worst_t0.max((pair.arrival_time() - oracle).abs());
        let w = pair.head_window();
        if w.head_exists {
            heads += 1;
            let ho = fermat_head_wave(pair.h, pair.z_leg, pair.x, pair.v1, pair.v2, pair.v_max);
            worst_h = worst_h.max((w.t_h1.unwrap() - ho).abs());
        }
    }
    // A clearly post-critical geometry exercises the oracle as well.
    let post = WavePair::from_speeds(1186.0, 1186.0, 2692.0, 500.0, 1200.0, 533.0);
    let w = post.head_window();
    assert!(w.head_exists);
    heads += 1;
    let ho = fermat_head_wave(500.0, 533.0, 1200.0, 1186.0, 1186.0, 2692.0);
    worst_h = worst_h.max((w.t_h1.unwrap() - ho).abs());
    verdict(
        "4 (arrival-time oracles)",
        worst_t0 <= 1e-9 && worst_h <= 1e-6,
        &format!(
            "t0 within {worst_t0:.3e} s of the Fermat oracle; t_h1 within {worst_h:.3e} s over {heads} head-wave pairs"
        ),
    );
}

#[test]
fn criterion_05_inverse_consistency() {
    let cfg = reference_config();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for pair in all_pairs(&cfg) {
        let t0 = pair.arrival_time();
        for _ in 0..1000 {
            let t = t0 * rng.gen_range(1.0001..4.0);
            let q = pair.q0_of_t(t).unwrap();
            worst = worst.max((pair.travel_time(q) - t).abs());
        }
    }
    verdict(
        "5 (inverse consistency)",
        worst <= 1e-9,
        &format!("|t0~(q0(t)) - t| <= {worst:.3e} s over 12000 samples"),
    );
}

#[test]
fn criterion_06_null_interface() {
    let mut cfg = reference_config();
    cfg.bottom = cfg.top;
    cfg.receivers.truncate(1); // receiver 1 only
    let evs = evaluators(&cfg);
    let (t_start, dt, per_wave) = compute_traces(&cfg, &evs[0]);
    let jumps = evs[0].jump_times();
    let peak = |idx: usize| -> f64 {
        let (ux, uz): (Vec<f64>, Vec<f64>) = per_wave[idx].iter().copied().unzip();
        let mut best = 0.0f64;
        for col in [ux, uz] {
            let tr = Trace::new(t_start, dt, col).unwrap();
            let conv = convolve_with_jumps(&tr, &cfg.wavelet, &jumps, false).unwrap();
            best = best.max(conv.samples.iter().fold(0.0f64, |a, &v| a.max(v.abs())));
        }
        best
    };
    let mut incident_peak = 0.0f64;
    let mut reflected_peak = 0.0f64;
    for (i, (id, _)) in evs[0].channels.iter().enumerate() {
        match id {
            WaveId::Incident(_) => incident_peak = incident_peak.max(peak(i)),
            _ => reflected_peak = reflected_peak.max(peak(i)),
        }
    }
    let ratio = reflected_peak / incident_peak;
    verdict(
        "6 (null interface)",
        ratio <= 1e-8,
        &format!("reflected/incident seismogram peak ratio = {ratio:.3e}"),
    );
}

#[test]
fn criterion_07_rescaling_invariance() {
    let cfg = reference_config();
    let top = derive_layer(&cfg.top).unwrap();
    let bottom = derive_layer(&cfg.bottom).unwrap();
    let base: Vec<(f64, f64, Vec<Vec<(f64, f64)>>)> = evaluators(&cfg)
        .iter()
        .map(|ev| compute_traces(&cfg, ev))
        .collect();
    let mut worst = 0.0f64;
    for (which, scale) in [(0usize, -1.0), (1usize, 0.5), (2usize, 3.0), (3usize, 0.5)] {
        let mut top2 = top;
        let mut bottom2 = bottom;
        match which {
            0 => top2.scale_p_column(0, scale),
            1 => top2.scale_p_column(1, scale),
            2 => bottom2.scale_p_column(0, scale),
            _ => bottom2.scale_p_column(1, scale),
        }
        let modal2 = project_source(&top2, &cfg.source).unwrap();
        for (ri, r) in cfg.receivers.iter().enumerate() {
            let ev2 = GreenEvaluator::new(
                &top2,
                &bottom2,
                modal2,
                cfg.source_height,
                r.offset(),
                r.z,
                QuadSettings::default(),
            )
            .unwrap();
            let (_, _, pw2) = compute_traces(&cfg, &ev2);
            let totals_base = &base[ri].2[base[ri].2.len() - 1];
            let totals_new = &pw2[pw2.len() - 1];
            let scale_ref = totals_base
                .iter()
                .map(|(x, z)| x.abs().max(z.abs()))
                .fold(0.0f64, f64::max);
            for (a, b) in totals_base.iter().zip(totals_new) {
                worst = worst.max(((a.0 - b.0).abs()).max((a.1 - b.1).abs()) / scale_ref);
            }
        }
    }
    verdict(
        "7 (eigenvector-rescaling invariance)",
        worst <= 1e-10,
        &format!("total seismogram change <= {worst:.3e} relative under column scalings"),
    );
}

#[test]
fn criterion_08_interface_continuity() {
    let cfg = reference_config();
    let top = derive_layer(&cfg.top).unwrap();
    let bottom = derive_layer(&cfg.bottom).unwrap();
    let modal = project_source(&top, &cfg.source).unwrap();
    let quad = QuadSettings::default();
    let up = GreenEvaluator::new(&top, &bottom, modal, cfg.source_height, 400.0, 0.1, quad).unwrap();
    let dn = GreenEvaluator::new(&top, &bottom, modal, cfg.source_height, 400.0, -0.1, quad).unwrap();
    let latest = up
        .onsets()
        .iter()
        .chain(dn.onsets().iter())
        .map(|(_, t)| *t)
        .fold(0.0f64, f64::max);
    let times: Vec<f64> = (0..5).map(|k| latest * (1.15 + 0.15 * k as f64)).collect();
    let mut peak = (0.0f64, 0.0f64);
    let mut diffs = Vec::new();
    for &t in &times {
        let a = up.eval(t).unwrap();
        let b = dn.eval(t).unwrap();
        peak.0 = peak.0.max(a.total.0.abs()).max(b.total.0.abs());
        peak.1 = peak.1.max(a.total.1.abs()).max(b.total.1.abs());
        diffs.push(((a.total.0 - b.total.0).abs(), (a.total.1 - b.total.1).abs()));
    }
    let worst = diffs
        .iter()
        .map(|(dx, dz)| (dx / peak.0).max(dz / peak.1))
        .fold(0.0f64, f64::max);
    verdict(
        "8 (interface continuity)",
        worst <= 0.02,
        &format!("solid displacement at z = +-0.1 m differs by {:.3}% of the local peak", 100.0 * worst),
    );
}

#[test]
fn criterion_09_figure_level_reproduction() {
    let start = Instant::now();
    let sources = [
        ("bulk", SourceAmplitudes { f_u: -1e10, f_w: -1e10, f_p: 0.0 }),
        ("pressure", SourceAmplitudes { f_u: 0.0, f_w: 0.0, f_p: 1.0 }),
    ];
    let mut detail = String::new();
    let mut all_ok = true;
    for (name, source) in sources {
        let mut cfg = reference_config();
        cfg.source = source;
        let evs = evaluators(&cfg);
        for (ri, ev) in evs.iter().enumerate() {
            let expected_channels = if ri == 0 { 8 } else { 6 };
            all_ok &= ev.channels.len() == expected_channels;
            let (t_start, dt, per_wave) = compute_traces(&cfg, ev);
            let onsets = ev.onsets();
            if ri == 0 {
                // incident Pf leads and is the first emitted contribution
                all_ok &= matches!(ev.channels[0].1, Channel::Incident(Incidence::Pf));
                let t_min = onsets.iter().map(|(_, t)| *t).fold(f64::INFINITY, f64::min);
                all_ok &= (onsets[0].1 - t_min).abs() < 1e-12;
            }
            for (w, (_, onset)) in onsets.iter().enumerate() {
                let peak = per_wave[w]
                    .iter()
                    .map(|(x, z)| x.abs().max(z.abs()))
                    .fold(0.0f64, f64::max);
                if peak == 0.0 {
                    all_ok = false;
                    detail.push_str(&format!("[{name} r{} wave {w} silent]", ri + 1));
                    continue;
                }
                let first = per_wave[w]
                    .iter()
                    .position(|(x, z)| x.abs().max(z.abs()) > 1e-8 * peak)
                    .unwrap();
                let t_first = t_start + first as f64 * dt;
                if (t_first - onset).abs() > 2.0 * dt {
                    all_ok = false;
                    detail.push_str(&format!(
                        "[{name} r{} wave {w}: onset {onset:.5} vs first sample {t_first:.5}]",
                        ri + 1
                    ));
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    all_ok &= elapsed < 600.0;
    verdict(
        "9 (figure-level reproduction)",
        all_ok,
        &format!("per-wave onsets within 2 dt for both sources, {elapsed:.1} s {detail}"),
    );
}

#[test]
fn criterion_10_wavelet_checks() {
    let cfg = reference_config();
    let w = cfg.wavelet;
    // symmetry about 1/f0
    let mut sym = 0.0f64;
    for k in 1..100 {
        let s = k as f64 * 0.004;
        let a = wavelet_value(&w, 1.0 / w.f0 + s);
        let b = wavelet_value(&w, 1.0 / w.f0 - s);
        sym = sym.max((a - b).abs() / a.abs().max(1e-300));
    }
    // analytic derivative vs central differences
    let step = 1e-6 / w.f0;
    let mut fd_err = 0.0f64;
    for k in 0..400 {
        let t = -0.6 + k as f64 * 0.005;
        let fd = (wavelet_value(&w, t + step) - wavelet_value(&w, t - step)) / (2.0 * step);
        let an = wavelet_derivative(&w, t);
        fd_err = fd_err.max((an - fd).abs() / an.abs().max(1.0));
    }
    // grid refinement of the reference-scenario seismogram peak (receiver 1)
    let peak_at = |spp: f64| -> f64 {
        let mut cfg = reference_config();
        cfg.receivers.truncate(1);
        cfg.time.samples_per_period = Some(spp);
        let evs = evaluators(&cfg);
        let (t_start, dt, per_wave) = compute_traces(&cfg, &evs[0]);
        let jumps = evs[0].jump_times();
        let uz: Vec<f64> = per_wave.last().unwrap().iter().map(|(_, z)| *z).collect();
        let tr = Trace::new(t_start, dt, uz).unwrap();
        let conv = convolve_with_jumps(&tr, &cfg.wavelet, &jumps, false).unwrap();
        conv.samples.iter().fold(0.0f64, |a, &v| a.max(v.abs()))
    };
    let (p0, p1, p2) = (peak_at(200.0), peak_at(400.0), peak_at(800.0));
    let ratio = (p0 - p1) / (p1 - p2);
    let pass = sym <= 1e-13 && fd_err <= 1e-8 && (3.5..=4.5).contains(&ratio);
    verdict(
        "10 (wavelet checks)",
        pass,
        &format!("symmetry {sym:.2e}, derivative-fd {fd_err:.2e}, refinement ratio {ratio:.3}"),
    );
}
