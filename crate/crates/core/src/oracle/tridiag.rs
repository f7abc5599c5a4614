//! Symmetric tridiagonal eigensolver: Sturm-sequence bisection for selected
//! eigenvalues, inverse iteration for eigenvectors. Deterministic by
//! construction (fixed start vectors, no system randomness).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TridiagError {
    #[error("matrix is empty")]
    Empty,
    #[error("requested {count} eigenpairs of a {n}x{n} matrix")]
    TooManyRequested { count: usize, n: usize },
    #[error(
        "inverse iteration failed to converge for eigenvalue {index} \
         (value {value:.6e}, nearest gap {gap:.3e})"
    )]
    InverseIterationStalled { index: usize, value: f64, gap: f64 },
}

/// Number of eigenvalues of the tridiagonal `(diag, offdiag)` strictly below
/// `x`, by the classic LDL^T sign-count recurrence.
pub fn sturm_count(diag: &[f64], offdiag: &[f64], x: f64) -> usize {
    let mut count = 0usize;
    let mut q = 1.0f64;
    for (i, &d) in diag.iter().enumerate() {
        let e2 = if i == 0 {
            0.0
        } else {
            offdiag[i - 1] * offdiag[i - 1]
        };
        q = d - x - e2 / q;
        if q == 0.0 {
            q = -1e-300; // treat an exact pivot hit as just below
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin_bounds(diag: &[f64], offdiag: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { offdiag[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { offdiag[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    (lo, hi)
}

/// `k`-th (0-based, ascending) eigenvalue by bisection on the Sturm count.
pub fn eigenvalue_by_index(diag: &[f64], offdiag: &[f64], k: usize) -> f64 {
    let (mut lo, mut hi) = gershgorin_bounds(diag, offdiag);
    let scale = lo.abs().max(hi.abs()).max(1.0);
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(diag, offdiag, mid) <= k {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * scale {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Solve `(T - shift I) x = b` by LU with partial pivoting; row exchange
/// introduces one fill-in superdiagonal. Overwrites `b` with the solution.
fn solve_shifted(diag: &[f64], offdiag: &[f64], shift: f64, b: &mut [f64]) {
    let n = diag.len();
    let mut a: Vec<f64> = diag.iter().map(|d| d - shift).collect();
    let mut up1: Vec<f64> = offdiag.to_vec();
    let mut up2 = vec![0.0; n.saturating_sub(2)];
    let tiny = f64::MIN_POSITIVE / f64::EPSILON;

    for k in 0..n - 1 {
        let sub = offdiag[k];
        if a[k].abs() >= sub.abs() {
            // no interchange
            if a[k] == 0.0 {
                a[k] = tiny;
            }
            let m = sub / a[k];
            a[k + 1] -= m * up1[k];
            if k < n - 2 {
                up2[k] = 0.0;
            }
            b[k + 1] -= m * b[k];
        } else {
            // swap rows k and k+1
            let m = a[k] / sub;
            a[k] = sub;
            let tmp = a[k + 1];
            a[k + 1] = up1[k] - m * tmp;
            if k < n - 2 {
                up2[k] = up1[k + 1];
                up1[k + 1] = -m * up2[k];
            }
            up1[k] = tmp;
            b.swap(k, k + 1);
            b[k + 1] -= m * b[k];
        }
    }
    if a[n - 1] == 0.0 {
        a[n - 1] = tiny;
    }
    b[n - 1] /= a[n - 1];
    if n >= 2 {
        b[n - 2] = (b[n - 2] - up1[n - 2] * b[n - 1]) / a[n - 2];
    }
    for k in (0..n.saturating_sub(2)).rev() {
        b[k] = (b[k] - up1[k] * b[k + 1] - up2[k] * b[k + 2]) / a[k];
    }
}

/// One normalized inverse-iteration pass.
fn inverse_iteration(
    diag: &[f64],
    offdiag: &[f64],
    value: f64,
    start: &[f64],
    sweeps: usize,
) -> Vec<f64> {
    let mut v = start.to_vec();
    for _ in 0..sweeps {
        solve_shifted(diag, offdiag, value, &mut v);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    v
}

/// `count` lowest eigenpairs, ascending, vectors l2-normalized.
pub fn lowest_eigenpairs(
    diag: &[f64],
    offdiag: &[f64],
    count: usize,
) -> Result<Vec<(f64, Vec<f64>)>, TridiagError> {
    let n = diag.len();
    if n == 0 {
        return Err(TridiagError::Empty);
    }
    if count > n {
        return Err(TridiagError::TooManyRequested { count, n });
    }
    let norm_t = matrix_inf_norm(diag, offdiag);
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let value = eigenvalue_by_index(diag, offdiag, k);
        // deterministic pseudo-random start vector
        let mut seed = 0x9e3779b97f4a7c15u64 ^ (k as u64).wrapping_mul(0xbf58476d1ce4e5b9);
        let start: Vec<f64> = (0..n)
            .map(|_| {
                seed ^= seed << 13;
                seed ^= seed >> 7;
                seed ^= seed << 17;
                (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect();
        // a hair off the exact eigenvalue keeps the shifted solve well posed
        let shift = value + 1e-13 * norm_t.max(1.0);
        let mut vec = inverse_iteration(diag, offdiag, shift, &start, 2);
        // orthogonalize against close previous states, then polish
        for (pv, pvec) in &out {
            let pv: &f64 = pv;
            if (value - *pv).abs() <= 1e-8 * norm_t.max(1.0) {
                let dot: f64 = vec.iter().zip(pvec.iter()).map(|(a, b)| a * b).sum();
                for (x, y) in vec.iter_mut().zip(pvec.iter()) {
                    *x -= dot * y;
                }
            }
        }
        let mut best = (residual_norm(diag, offdiag, value, &vec), vec);
        for retry in 0..3 {
            if best.0 <= 64.0 * f64::EPSILON * norm_t.max(1.0) {
                break;
            }
            let shift = value + (1e-12 + 1e-11 * retry as f64) * norm_t.max(1.0);
            let cand = inverse_iteration(diag, offdiag, shift, &best.1, 2);
            let res = residual_norm(diag, offdiag, value, &cand);
            if res < best.0 {
                best = (res, cand);
            }
        }
        if best.0 > 1e-8 * norm_t.max(1.0) {
            let gap = if k > 0 {
                value - out[k - 1].0
            } else {
                f64::INFINITY
            };
            return Err(TridiagError::InverseIterationStalled {
                index: k,
                value,
                gap,
            });
        }
        let mut vec = best.1;
        // sign convention: first significant component positive
        if let Some(x) = vec.iter().find(|x| x.abs() > 1e-8) {
            if *x < 0.0 {
                for v in vec.iter_mut() {
                    *v = -*v;
                }
            }
        }
        out.push((value, vec));
    }
    Ok(out)
}

pub fn matrix_inf_norm(diag: &[f64], offdiag: &[f64]) -> f64 {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let left = if i > 0 { offdiag[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { offdiag[i].abs() } else { 0.0 };
            diag[i].abs() + left + right
        })
        .fold(0.0, f64::max)
}

/// `||T v - value v||_2` for a normalized `v`.
pub fn residual_norm(diag: &[f64], offdiag: &[f64], value: f64, v: &[f64]) -> f64 {
    let n = diag.len();
    let mut acc = 0.0;
    for i in 0..n {
        let mut r = (diag[i] - value) * v[i];
        if i > 0 {
            r += offdiag[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            r += offdiag[i] * v[i + 1];
        }
        acc += r * r;
    }
    acc.sqrt()
}
