//! Adaptive Gauss-Kronrod quadrature for a pair of kernels sharing the same
//! sample points (the x and z displacement integrands of one wave family).

use crate::{Error, Result};

// 15-point Kronrod abscissae (positive half) and weights, with the embedded
// 7-point Gauss weights; standard QUADPACK values.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub(crate) struct QuadOutcome {
    pub value: [f64; 2],
    pub err: [f64; 2],
    pub evals: usize,
}

impl QuadOutcome {
    pub(crate) fn zero() -> Self {
        Self { value: [0.0; 2], err: [0.0; 2], evals: 0 }
    }

    pub(crate) fn accumulate(&mut self, other: &Self) {
        for c in 0..2 {
            self.value[c] += other.value[c];
            self.err[c] += other.err[c];
        }
        self.evals += other.evals;
    }
}

/// One Kronrod panel; returns (value, error-estimate) per component.
fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<([f64; 2], [f64; 2], usize)>
where
    F: FnMut(f64) -> Result<[f64; 2]>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kron = [fc[0] * WGK[7], fc[1] * WGK[7]];
    let mut gauss = [fc[0] * WG[3], fc[1] * WG[3]];
    let mut evals = 1;
    for (j, &xi) in XGK.iter().enumerate().take(7) {
        let dx = half * xi;
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        evals += 2;
        for c in 0..2 {
            let s = f1[c] + f2[c];
            kron[c] += WGK[j] * s;
            if j % 2 == 1 {
                gauss[c] += WG[j / 2] * s;
            }
        }
    }
    let value = [kron[0] * half, kron[1] * half];
    let err = [
        ((kron[0] - gauss[0]) * half).abs(),
        ((kron[1] - gauss[1]) * half).abs(),
    ];
    Ok((value, err, evals))
}

/// Adaptive bisection until each component error is within its share of the
/// absolute tolerance. Fails with the worst subinterval when the budget
/// cannot be met at the depth cap.
pub(crate) fn adaptive_pair<F>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_depth: u32,
) -> Result<QuadOutcome>
where
    F: FnMut(f64) -> Result<[f64; 2]>,
{
    if !(b > a) {
        return Ok(QuadOutcome { value: [0.0; 2], err: [0.0; 2], evals: 0 });
    }
    let total_len = b - a;
    let mut stack = vec![(a, b, 0u32)];
    let mut value = [0.0f64; 2];
    let mut err = [0.0f64; 2];
    let mut evals = 0usize;
    let mut panels = 0usize;
    let mut worst: Option<(f64, f64, f64)> = None;
    while let Some((lo, hi, depth)) = stack.pop() {
        let (v, e, n) = gk15(&mut f, lo, hi)?;
        evals += n;
        panels += 1;
        let share = abs_tol * ((hi - lo) / total_len).max(f64::MIN_POSITIVE);
        let emax = e[0].max(e[1]);
        if emax <= share || depth >= max_depth || panels > 20_000 {
            for c in 0..2 {
                value[c] += v[c];
                err[c] += e[c];
            }
            if emax > share {
                let record = worst.map(|(_, _, we)| emax > we).unwrap_or(true);
                if record {
                    worst = Some((lo, hi, emax));
                }
            }
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
    }
    if err[0].max(err[1]) > abs_tol {
        let (wa, wb, we) = worst.unwrap_or((a, b, err[0].max(err[1])));
        return Err(Error::Quadrature { a: wa, b: wb, err: we });
    }
    Ok(QuadOutcome { value, err, evals })
}
