//! Dense Cholesky factorization and triangular solves.
//!
//! Everything here works on `f64` and assumes row-major (standard layout)
//! arrays. The factorization is blocked: panels are factored with scalar
//! loops, the trailing update runs as a matrix product, which keeps large
//! problems (the GP baseline, wide random feature expansions) out of
//! scalar-loop territory.

use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::CoreError;

/// Panel width for the blocked factorization.
const BLOCK: usize = 64;

/// Jitter escalation ladder: start at 1e-6, multiply by 10, give up past 1e-2.
pub const JITTER_START: f64 = 1e-6;
pub const JITTER_MAX: f64 = 1e-2;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
///
/// Returns `L` with `L L^T = a` and zeros above the diagonal. A non-positive
/// pivot aborts with the offending index; callers that can tolerate repair
/// should go through [`cholesky_jittered`].
pub fn cholesky(a: &ArrayView2<f64>) -> Result<Array2<f64>, CoreError> {
    let n = square_dim(a, "cholesky")?;
    let mut l = to_standard(a);

    let mut k = 0;
    let mut pivot_row = [0.0f64; BLOCK];
    while k < n {
        let b = BLOCK.min(n - k);

        // Factor the panel (diagonal block plus everything below it).
        // Previous panels were folded in by earlier trailing updates, so only
        // within-panel columns [k, jj) contribute.
        {
            let buf = l.as_slice_mut().expect("standard layout");
            for jj in k..k + b {
                let seg = jj - k;
                pivot_row[..seg].copy_from_slice(&buf[jj * n + k..jj * n + jj]);
                let d = buf[jj * n + jj] - dot(&pivot_row[..seg], &pivot_row[..seg]);
                if !(d > 0.0) {
                    return Err(CoreError::Factorization { pivot: jj, value: d });
                }
                let piv = d.sqrt();
                buf[jj * n + jj] = piv;
                let inv = 1.0 / piv;
                for i in jj + 1..n {
                    let row = &mut buf[i * n + k..i * n + jj + 1];
                    let s = row[seg] - dot(&row[..seg], &pivot_row[..seg]);
                    row[seg] = s * inv;
                }
            }
        }

        // Trailing update A22 -= L21 L21^T, in column strips so only the
        // lower blocks are touched (plus a harmless sliver above the diagonal
        // inside each strip, wiped at the end).
        let t0 = k + b;
        if t0 < n {
            let (_, bottom) = l.view_mut().split_at(Axis(0), t0);
            let (left, mut right) = bottom.split_at(Axis(1), t0);
            let l21 = left.slice(s![.., k..t0]);
            let m = n - t0;
            let mut c0 = 0;
            while c0 < m {
                let cw = BLOCK.min(m - c0);
                let a_rows = l21.slice(s![c0.., ..]);
                let b_rows = l21.slice(s![c0..c0 + cw, ..]);
                let mut target = right.slice_mut(s![c0.., c0..c0 + cw]);
                general_mat_mul(-1.0, &a_rows, &b_rows.t(), 1.0, &mut target);
                c0 += cw;
            }
        }
        k += b;
    }

    // Wipe the stale upper triangle.
    for i in 0..n {
        for j in i + 1..n {
            l[[i, j]] = 0.0;
        }
    }
    Ok(l)
}

fn square_dim(a: &ArrayView2<f64>, context: &'static str) -> Result<usize, CoreError> {
    let (r, c) = a.dim();
    if r != c {
        return Err(CoreError::shape(context, "square matrix", format!("{r}x{c}")));
    }
    Ok(r)
}

fn to_standard(a: &ArrayView2<f64>) -> Array2<f64> {
    if a.is_standard_layout() {
        a.to_owned()
    } else {
        a.as_standard_layout().to_owned()
    }
}

/// Cholesky with the SPD repair ladder: retry with `a + jitter*I`, jitter
/// escalating from 1e-6 by factors of 10 up to 1e-2, then give up.
///
/// The ladder is relative to the matrix's diagonal magnitude (floored at
/// unit scale), so badly scaled but mathematically positive definite
/// matrices — e.g. regularized Gram matrices with an enormous precision
/// ratio, where catastrophic cancellation swallows the identity shift —
/// are repaired by a shift proportional to their own scale.
///
/// Returns the factor together with the jitter that was finally applied
/// (0.0 when the matrix factorized as-is).
pub fn cholesky_jittered(a: &ArrayView2<f64>) -> Result<(Array2<f64>, f64), CoreError> {
    match cholesky(a) {
        Ok(l) => return Ok((l, 0.0)),
        Err(CoreError::Factorization { .. }) => {}
        Err(e) => return Err(e),
    }
    let n = a.nrows();
    let diag_scale = (0..n)
        .map(|i| a[[i, i]].abs())
        .sum::<f64>()
        .max(n as f64)
        / n as f64;
    let mut jitter = JITTER_START * diag_scale;
    let max_jitter = JITTER_MAX * diag_scale;
    while jitter <= max_jitter * (1.0 + 1e-12) {
        let mut shifted = to_standard(a);
        for i in 0..n {
            shifted[[i, i]] += jitter;
        }
        if let Ok(l) = cholesky(&shifted.view()) {
            return Ok((l, jitter));
        }
        jitter *= 10.0;
    }
    Err(CoreError::JitterExhausted { max_jitter })
}

/// Solve `L x = b` with `L` lower triangular.
pub fn solve_lower_vec(l: &ArrayView2<f64>, b: &ArrayView1<f64>) -> Array1<f64> {
    let n = l.nrows();
    debug_assert_eq!(b.len(), n);
    let lbuf = l.as_slice().expect("standard layout");
    let mut x = b.to_owned();
    {
        let xs = x.as_slice_mut().expect("contiguous");
        for i in 0..n {
            let row = &lbuf[i * n..i * n + i];
            let s = xs[i] - dot(row, &xs[..i]);
            xs[i] = s / lbuf[i * n + i];
        }
    }
    x
}

/// Solve `L^T x = b` with `L` lower triangular.
pub fn solve_lower_t_vec(l: &ArrayView2<f64>, b: &ArrayView1<f64>) -> Array1<f64> {
    let n = l.nrows();
    debug_assert_eq!(b.len(), n);
    let lbuf = l.as_slice().expect("standard layout");
    let mut x = b.to_owned();
    {
        let xs = x.as_slice_mut().expect("contiguous");
        for i in (0..n).rev() {
            let mut s = xs[i];
            for j in i + 1..n {
                s -= lbuf[j * n + i] * xs[j];
            }
            xs[i] = s / lbuf[i * n + i];
        }
    }
    x
}

/// Solve `L X = B` column by column.
pub fn solve_lower_mat(l: &ArrayView2<f64>, b: &ArrayView2<f64>) -> Array2<f64> {
    let mut out = Array2::zeros(b.raw_dim());
    for (j, col) in b.columns().into_iter().enumerate() {
        out.column_mut(j).assign(&solve_lower_vec(l, &col));
    }
    out
}

/// Solve `L^T X = B` column by column.
pub fn solve_lower_t_mat(l: &ArrayView2<f64>, b: &ArrayView2<f64>) -> Array2<f64> {
    let mut out = Array2::zeros(b.raw_dim());
    for (j, col) in b.columns().into_iter().enumerate() {
        out.column_mut(j).assign(&solve_lower_t_vec(l, &col));
    }
    out
}

/// Explicit inverse of `A = L L^T` from its Cholesky factor.
///
/// Used by the GP baseline's evidence gradient, where the trace terms need
/// every entry of `A^{-1}`.
pub fn chol_inverse(l: &ArrayView2<f64>) -> Array2<f64> {
    let n = l.nrows();
    let lbuf = l.as_slice().expect("standard layout");
    // linv_t[j] holds column j of L^{-1} as a contiguous row, so the
    // symmetric product below runs on slices.
    let mut linv_t = vec![0.0f64; n * n];
    for j in 0..n {
        let col = &mut linv_t[j * n..(j + 1) * n];
        col[j] = 1.0 / lbuf[j * n + j];
        for i in j + 1..n {
            let s = dot(&lbuf[i * n + j..i * n + i], &col[j..i]);
            col[i] = -s / lbuf[i * n + i];
        }
    }
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        let ci = &linv_t[i * n..(i + 1) * n];
        for j in 0..=i {
            let cj = &linv_t[j * n..(j + 1) * n];
            // (A^{-1})_{ij} = sum_t (L^{-1})_{ti} (L^{-1})_{tj}, nonzero from t >= i.
            let v = dot(&ci[i..], &cj[i..]);
            out[[i, j]] = v;
            out[[j, i]] = v;
        }
    }
    out
}

pub fn frobenius(a: &ArrayView2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `||l l^T - a||_F / ||a||_F`, the reconstruction error of a factor.
pub fn reconstruction_error(l: &ArrayView2<f64>, a: &ArrayView2<f64>) -> f64 {
    let rec = l.dot(&l.t());
    let diff = &rec - a;
    frobenius(&diff.view()) / frobenius(a).max(f64::MIN_POSITIVE)
}
