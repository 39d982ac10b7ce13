//! Dense 6x6 complex linear algebra: LU with partial pivoting, enough for
//! the interface system. No structure exploitation, n = 6.

use num_complex::Complex64;

pub(crate) type CMat6 = [[Complex64; 6]; 6];
pub(crate) type CVec6 = [Complex64; 6];

/// LU factorization with partial pivoting, in place. Returns the pivot
/// permutation or `None` on an exactly singular pivot.
pub(crate) fn lu_factor(a: &mut CMat6) -> Option<[usize; 6]> {
    let mut piv = [0usize; 6];
    for k in 0..6 {
        let mut p = k;
        let mut best = a[k][k].norm_sqr();
        for i in (k + 1)..6 {
            let v = a[i][k].norm_sqr();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return None;
        }
        piv[k] = p;
        if p != k {
            a.swap(p, k);
        }
        let inv = Complex64::new(1.0, 0.0) / a[k][k];
        for i in (k + 1)..6 {
            let l = a[i][k] * inv;
            a[i][k] = l;
            for j in (k + 1)..6 {
                let t = l * a[k][j];
                a[i][j] -= t;
            }
        }
    }
    Some(piv)
}

/// Solve with a prior [`lu_factor`] result, overwriting `b` with the solution.
///
/// The stored multipliers live at their final row positions, so every pivot
/// swap must hit `b` before the forward sweep starts; interleaving swaps
/// with the elimination would pair values with the wrong multipliers.
pub(crate) fn lu_solve(lu: &CMat6, piv: &[usize; 6], b: &mut CVec6) {
    for k in 0..6 {
        b.swap(k, piv[k]);
    }
    for k in 0..6 {
        for i in (k + 1)..6 {
            let t = lu[i][k] * b[k];
            b[i] -= t;
        }
    }
    for k in (0..6).rev() {
        for j in (k + 1)..6 {
            let t = lu[k][j] * b[j];
            b[k] -= t;
        }
        b[k] /= lu[k][k];
    }
}

/// One-shot solve of `a x = b`.
pub(crate) fn solve6(a: &CMat6, b: &CVec6) -> Option<CVec6> {
    let mut lu = *a;
    let piv = lu_factor(&mut lu)?;
    let mut x = *b;
    lu_solve(&lu, &piv, &mut x);
    Some(x)
}

/// Matrix 1-norm (maximum absolute column sum).
pub(crate) fn norm1(a: &CMat6) -> f64 {
    let mut best = 0.0f64;
    for j in 0..6 {
        let mut s = 0.0;
        for row in a.iter() {
            s += row[j].norm();
        }
        best = best.max(s);
    }
    best
}

/// 1-norm condition number via the explicit inverse; n = 6 keeps it cheap.
pub(crate) fn cond1(a: &CMat6) -> Option<f64> {
    let mut lu = *a;
    let piv = lu_factor(&mut lu)?;
    let mut inv_norm = 0.0f64;
    for j in 0..6 {
        let mut e = [Complex64::new(0.0, 0.0); 6];
        e[j] = Complex64::new(1.0, 0.0);
        lu_solve(&lu, &piv, &mut e);
        let s: f64 = e.iter().map(|v| v.norm()).sum();
        inv_norm = inv_norm.max(s);
    }
    Some(norm1(a) * inv_norm)
}
