//! Problem configuration: a flat key-value text format with bracketed
//! section headers and mandatory unit suffixes on dimensioned quantities.
//!
//! ```text
//! [top]
//! rho_s = 2200 kg/m3
//! k_s = 6.9 GPa
//! ...
//! [receivers]
//! receiver = 400 0 533 m
//! ```

use std::path::Path;

use crate::greens::Receiver;
use crate::material::{PoroelasticLayer, SourceAmplitudes};
use crate::timeseries::Wavelet;
use crate::{Error, Result};

/// Sampling window of the output traces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    /// Explicit sample interval; wins over `samples_per_period`.
    pub dt: Option<f64>,
    /// Samples per wavelet period 1/f0; default 200.
    pub samples_per_period: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    pub top: PoroelasticLayer,
    pub bottom: PoroelasticLayer,
    /// Source height above the interface (m).
    pub source_height: f64,
    pub source: SourceAmplitudes,
    pub wavelet: Wavelet,
    pub receivers: Vec<Receiver>,
    pub time: TimeGrid,
}

impl ProblemConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Resolved sample interval: explicit dt, then samples-per-period,
    /// then the default 200 samples per 1/f0.
    pub fn resolved_dt(&self) -> f64 {
        if let Some(dt) = self.time.dt {
            return dt;
        }
        let spp = self.time.samples_per_period.unwrap_or(200.0);
        1.0 / (spp * self.wavelet.f0)
    }

    /// FNV-1a hash of the canonical emission, for output provenance.
    pub fn content_hash(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        for b in self.emit().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h
    }

    pub fn parse(text: &str) -> Result<Self> {
        Parser::new(text).finish()
    }

    /// Extract and parse a config block embedded in a trace header, where
    /// each config line is prefixed with `#> `.
    pub fn parse_embedded(header: &str) -> Result<Self> {
        let text: String = header
            .lines()
            .filter_map(|l| l.strip_prefix("#>").map(|r| r.trim_start()))
            .map(|l| format!("{l}\n"))
            .collect();
        Self::parse(&text)
    }

    /// Canonical text form; parses back to an equal configuration.
    pub fn emit(&self) -> String {
        let mut s = String::new();
        for (name, l) in [("top", &self.top), ("bottom", &self.bottom)] {
            s.push_str(&format!("[{name}]\n"));
            s.push_str(&format!("rho_s = {:.17e} kg/m3\n", l.rho_s));
            s.push_str(&format!("rho_f = {:.17e} kg/m3\n", l.rho_f));
            s.push_str(&format!("phi = {:.17e}\n", l.phi));
            s.push_str(&format!("tortuosity = {:.17e}\n", l.tortuosity));
            s.push_str(&format!("k_s = {:.17e} Pa\n", l.k_s));
            s.push_str(&format!("k_f = {:.17e} Pa\n", l.k_f));
            s.push_str(&format!("k_b = {:.17e} Pa\n", l.k_b));
            s.push_str(&format!("mu = {:.17e} Pa\n", l.mu));
        }
        s.push_str("[source]\n");
        s.push_str(&format!("height = {:.17e} m\n", self.source_height));
        s.push_str(&format!("f_u = {:.17e}\n", self.source.f_u));
        s.push_str(&format!("f_w = {:.17e}\n", self.source.f_w));
        s.push_str(&format!("f_p = {:.17e}\n", self.source.f_p));
        s.push_str("[wavelet]\n");
        s.push_str("kind = gaussian_d4\n");
        s.push_str(&format!("f0 = {:.17e} Hz\n", self.wavelet.f0));
        s.push_str("[receivers]\n");
        for r in &self.receivers {
            s.push_str(&format!(
                "receiver = {:.17e} {:.17e} {:.17e} m\n",
                r.x, r.y, r.z
            ));
        }
        s.push_str("[time]\n");
        s.push_str(&format!("t_start = {:.17e} s\n", self.time.t_start));
        s.push_str(&format!("t_end = {:.17e} s\n", self.time.t_end));
        if let Some(dt) = self.time.dt {
            s.push_str(&format!("dt = {:.17e} s\n", dt));
        }
        if let Some(spp) = self.time.samples_per_period {
            s.push_str(&format!("samples_per_period = {:.17e}\n", spp));
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Unit {
    Density,
    Pressure,
    Length,
    Time,
    Frequency,
    None,
}

fn parse_quantity(raw: &str, unit: Unit, line: usize) -> Result<f64> {
    let err = |msg: String| Error::Config { line, msg };
    let mut parts = raw.split_whitespace();
    let num = parts
        .next()
        .ok_or_else(|| err("missing value".into()))?
        .parse::<f64>()
        .map_err(|e| err(format!("bad number '{raw}': {e}")))?;
    let suffix = parts.next();
    if parts.next().is_some() {
        return Err(err(format!("trailing tokens in '{raw}'")));
    }
    let scaled = match (unit, suffix) {
        (Unit::None, None) => num,
        (Unit::None, Some(u)) => return Err(err(format!("unexpected unit '{u}'"))),
        (Unit::Density, Some("kg/m3")) => num,
        (Unit::Pressure, Some("Pa")) => num,
        (Unit::Pressure, Some("MPa")) => num * 1e6,
        (Unit::Pressure, Some("GPa")) => num * 1e9,
        (Unit::Length, Some("m")) => num,
        (Unit::Length, Some("km")) => num * 1e3,
        (Unit::Time, Some("s")) => num,
        (Unit::Time, Some("ms")) => num * 1e-3,
        (Unit::Frequency, Some("Hz")) => num,
        (_, Some(u)) => return Err(err(format!("unit '{u}' does not fit this key"))),
        (_, None) => {
            return Err(err(format!(
                "missing mandatory unit on dimensioned value '{raw}'"
            )))
        }
    };
    Ok(scaled)
}

#[derive(Default)]
struct LayerDraft {
    rho_s: Option<f64>,
    rho_f: Option<f64>,
    phi: Option<f64>,
    tortuosity: Option<f64>,
    k_s: Option<f64>,
    k_f: Option<f64>,
    k_b: Option<f64>,
    mu: Option<f64>,
}

impl LayerDraft {
    fn build(&self, section: &str, line: usize) -> Result<PoroelasticLayer> {
        let need = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| Error::Config {
                line,
                msg: format!("[{section}] is missing '{key}'"),
            })
        };
        Ok(PoroelasticLayer {
            rho_s: need(self.rho_s, "rho_s")?,
            rho_f: need(self.rho_f, "rho_f")?,
            phi: need(self.phi, "phi")?,
            tortuosity: need(self.tortuosity, "tortuosity")?,
            k_s: need(self.k_s, "k_s")?,
            k_f: need(self.k_f, "k_f")?,
            k_b: need(self.k_b, "k_b")?,
            mu: need(self.mu, "mu")?,
        })
    }
}

struct Parser {
    lines: Vec<(usize, String)>,
}

impl Parser {
    fn new(text: &str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| {
                let no_comment = match l.find('#') {
                    Some(pos) => &l[..pos],
                    None => l,
                };
                (i + 1, no_comment.trim().to_string())
            })
            .filter(|(_, l)| !l.is_empty())
            .collect();
        Self { lines }
    }

    fn finish(self) -> Result<ProblemConfig> {
        let mut section = String::new();
        let mut top = LayerDraft::default();
        let mut bottom = LayerDraft::default();
        let mut height: Option<f64> = None;
        let mut source = SourceAmplitudes::default();
        let mut f0: Option<f64> = None;
        let mut kind_seen = false;
        let mut receivers: Vec<Receiver> = Vec::new();
        let mut t_start: Option<f64> = None;
        let mut t_end: Option<f64> = None;
        let mut dt: Option<f64> = None;
        let mut spp: Option<f64> = None;
        let mut last_line = 0usize;

        for (line, text) in &self.lines {
            let line = *line;
            last_line = line;
            if text.starts_with('[') {
                if !text.ends_with(']') {
                    return Err(Error::Config { line, msg: format!("malformed section '{text}'") });
                }
                section = text[1..text.len() - 1].trim().to_string();
                match section.as_str() {
                    "top" | "bottom" | "source" | "wavelet" | "receivers" | "time" => {}
                    other => {
                        return Err(Error::Config {
                            line,
                            msg: format!("unknown section '[{other}]'"),
                        })
                    }
                }
                continue;
            }
            let (key, value) = text.split_once('=').ok_or_else(|| Error::Config {
                line,
                msg: format!("expected 'key = value', got '{text}'"),
            })?;
            let key = key.trim();
            let value = value.trim();
            match (section.as_str(), key) {
                ("top", _) | ("bottom", _) => {
                    let draft = if section == "top" { &mut top } else { &mut bottom };
                    let slot = match key {
                        "rho_s" => (&mut draft.rho_s, Unit::Density),
                        "rho_f" => (&mut draft.rho_f, Unit::Density),
                        "phi" => (&mut draft.phi, Unit::None),
                        "tortuosity" => (&mut draft.tortuosity, Unit::None),
                        "k_s" => (&mut draft.k_s, Unit::Pressure),
                        "k_f" => (&mut draft.k_f, Unit::Pressure),
                        "k_b" => (&mut draft.k_b, Unit::Pressure),
                        "mu" => (&mut draft.mu, Unit::Pressure),
                        other => {
                            return Err(Error::Config {
                                line,
                                msg: format!("unknown key '{other}' in [{section}]"),
                            })
                        }
                    };
                    *slot.0 = Some(parse_quantity(value, slot.1, line)?);
                }
                ("source", "height") => height = Some(parse_quantity(value, Unit::Length, line)?),
                ("source", "f_u") => source.f_u = parse_quantity(value, Unit::None, line)?,
                ("source", "f_w") => source.f_w = parse_quantity(value, Unit::None, line)?,
                ("source", "f_p") => source.f_p = parse_quantity(value, Unit::None, line)?,
                ("wavelet", "kind") => {
                    if value != "gaussian_d4" {
                        return Err(Error::Config {
                            line,
                            msg: format!("unknown wavelet kind '{value}'"),
                        });
                    }
                    kind_seen = true;
                }
                ("wavelet", "f0") => f0 = Some(parse_quantity(value, Unit::Frequency, line)?),
                ("receivers", "receiver") => {
                    let toks: Vec<&str> = value.split_whitespace().collect();
                    if toks.len() != 4 || toks[3] != "m" {
                        return Err(Error::Config {
                            line,
                            msg: format!("receiver wants 'x y z m', got '{value}'"),
                        });
                    }
                    let mut xyz = [0.0; 3];
                    for (i, v) in xyz.iter_mut().enumerate() {
                        *v = toks[i].parse::<f64>().map_err(|e| Error::Config {
                            line,
                            msg: format!("bad receiver coordinate '{}': {e}", toks[i]),
                        })?;
                    }
                    let r = Receiver::new(xyz[0], xyz[1], xyz[2]).map_err(|e| Error::Config {
                        line,
                        msg: e.to_string(),
                    })?;
                    receivers.push(r);
                }
                ("time", "t_start") => t_start = Some(parse_quantity(value, Unit::Time, line)?),
                ("time", "t_end") => t_end = Some(parse_quantity(value, Unit::Time, line)?),
                ("time", "dt") => dt = Some(parse_quantity(value, Unit::Time, line)?),
                ("time", "samples_per_period") => {
                    spp = Some(parse_quantity(value, Unit::None, line)?)
                }
                ("", k) => {
                    return Err(Error::Config {
                        line,
                        msg: format!("key '{k}' before any section header"),
                    })
                }
                (s, k) => {
                    return Err(Error::Config {
                        line,
                        msg: format!("unknown key '{k}' in [{s}]"),
                    })
                }
            }
        }

        let line = last_line;
        let source_height = height.ok_or(Error::Config {
            line,
            msg: "[source] height missing".into(),
        })?;
        if !(source_height > 0.0) {
            return Err(Error::Config { line, msg: "source height must be > 0".into() });
        }
        if !kind_seen {
            return Err(Error::Config { line, msg: "[wavelet] kind missing".into() });
        }
        let f0 = f0.ok_or(Error::Config { line, msg: "[wavelet] f0 missing".into() })?;
        let wavelet = Wavelet::gaussian_d4(f0)
            .map_err(|e| Error::Config { line, msg: e.to_string() })?;
        if receivers.is_empty() {
            return Err(Error::Config { line, msg: "no receivers given".into() });
        }
        let t_start = t_start.ok_or(Error::Config { line, msg: "[time] t_start missing".into() })?;
        let t_end = t_end.ok_or(Error::Config { line, msg: "[time] t_end missing".into() })?;
        if !(t_end > t_start) {
            return Err(Error::Config { line, msg: "t_end must exceed t_start".into() });
        }
        Ok(ProblemConfig {
            top: top.build("top", line)?,
            bottom: bottom.build("bottom", line)?,
            source_height,
            source,
            wavelet,
            receivers,
            time: TimeGrid { t_start, t_end, dt, samples_per_period: spp },
        })
    }
}

/// The two-layer reference configuration used across the test suite and
/// shipped as an example: bulk source, two receivers at 400 m offset.
pub fn reference_config() -> ProblemConfig {
    ProblemConfig {
        top: PoroelasticLayer {
            rho_s: 2200.0,
            rho_f: 950.0,
            phi: 0.4,
            tortuosity: 2.0,
            k_s: 6.9e9,
            k_f: 2.0e9,
            k_b: 6.7e9,
            mu: 3.0e9,
        },
        bottom: PoroelasticLayer {
            rho_s: 2650.0,
            rho_f: 750.0,
            phi: 0.2,
            tortuosity: 2.0,
            k_s: 37.0e9,
            k_f: 1.7e9,
            k_b: 2.2e9,
            mu: 4.4e9,
        },
        source_height: 500.0,
        source: SourceAmplitudes { f_u: -1e10, f_w: -1e10, f_p: 0.0 },
        wavelet: Wavelet::gaussian_d4(15.0).unwrap(),
        receivers: vec![
            Receiver::new(400.0, 0.0, 533.0).unwrap(),
            Receiver::new(400.0, 0.0, -533.0).unwrap(),
        ],
        time: TimeGrid { t_start: 0.0, t_end: 1.4, dt: None, samples_per_period: Some(200.0) },
    }
}
