//! Symmetric eigensolvers for the Nyström matrix, the principal eigenpair and a
//! one-dimensional radial reference solver.
//!
//! [`symmetric_eigen`] is a dense Householder tridiagonalization followed by
//! implicit QL iteration. Eigenvectors are kept as rows, so every rotation and
//! every reflector update touches contiguous memory. [`lanczos`] computes the
//! top of the spectrum of large matrices with full reorthogonalization.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domain::{QuadratureGrid, ScalarField};
use crate::error::{invalid, Error, Result};
use crate::operator::{dot, DiscreteOperator};

/// Eigenvalues in descending order with matching orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Row `k` (length `dim`) is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: Vec<f64>,
    pub dim: usize,
    /// Whether the full spectrum was computed, as opposed to its top part.
    pub complete: bool,
}

impl Spectrum {
    pub fn vector(&self, k: usize) -> &[f64] {
        &self.eigenvectors[k * self.dim..(k + 1) * self.dim]
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `max_k ‖B v_k − λ_k v_k‖` against the operator.
    pub fn max_residual(&self, op: &DiscreteOperator) -> f64 {
        let mut y = vec![0.0; self.dim];
        (0..self.len())
            .map(|k| {
                let v = self.vector(k);
                op.matvec(v, &mut y);
                y.iter().zip(v).map(|(a, b)| (a - self.eigenvalues[k] * b).powi(2)).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// `max |v_iᵀ v_j − δ_ij|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.len() {
            for j in 0..=i {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(self.vector(i), self.vector(j)) - target).abs());
            }
        }
        worst
    }
}

const EPS: f64 = f64::EPSILON;

struct Reflector {
    offset: usize,
    beta: f64,
    v: Vec<f64>,
}

/// Householder reduction of a row-major symmetric matrix to tridiagonal form.
///
/// Returns `(d, e, reflectors)` with `e[i] = T[i][i−1]` and `e[0] = 0`. The
/// reflectors act on indices `offset..n`.
fn tridiagonalize(n: usize, a: &mut [f64], keep: bool) -> (Vec<f64>, Vec<f64>, Vec<Reflector>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut refl = Vec::new();
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        d[k] = a[k * n + k];
        let m = n - k - 1;
        let x = a[k * n + k + 1..(k + 1) * n].to_vec();
        let norm = x.iter().map(|t| t * t).sum::<f64>().sqrt();
        let tail = x[1..].iter().any(|t| *t != 0.0);
        if m == 1 || norm == 0.0 || !tail {
            e[k + 1] = x[0];
            continue;
        }
        let alpha = if x[0] > 0.0 { -norm } else { norm };
        let mut v = x;
        v[0] -= alpha;
        let beta = 2.0 / v.iter().map(|t| t * t).sum::<f64>();
        e[k + 1] = alpha;
        let off = k + 1;
        // p = β A22 v
        for i in 0..m {
            let row = &a[(off + i) * n + off..(off + i) * n + n];
            p[i] = beta * dot(row, &v);
        }
        let kk = 0.5 * beta * dot(&p[..m], &v);
        for i in 0..m {
            p[i] -= kk * v[i];
        }
        // A22 −= v pᵀ + p vᵀ
        for i in 0..m {
            let (vi, pi) = (v[i], p[i]);
            let row = &mut a[(off + i) * n + off..(off + i) * n + n];
            for j in 0..m {
                row[j] -= vi * p[j] + pi * v[j];
            }
        }
        if keep {
            refl.push(Reflector { offset: off, beta, v });
        }
    }
    if n > 0 {
        d[n - 1] = a[n * n - 1];
    }
    (d, e, refl)
}

/// `Qᵀ` for `Q = H_0 H_1 ⋯`, row-major.
fn accumulate(n: usize, refl: &[Reflector]) -> Vec<f64> {
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        q[i * n + i] = 1.0;
    }
    let mut w = vec![0.0; n];
    for Reflector { offset: off, beta, v } in refl.iter().rev() {
        let off = *off;
        let m = n - off;
        w[..m].iter_mut().for_each(|x| *x = 0.0);
        for i in 0..m {
            let vi = v[i];
            let row = &q[(off + i) * n + off..(off + i) * n + n];
            for j in 0..m {
                w[j] += vi * row[j];
            }
        }
        for i in 0..m {
            let s = beta * v[i];
            let row = &mut q[(off + i) * n + off..(off + i) * n + n];
            for j in 0..m {
                row[j] -= s * w[j];
            }
        }
    }
    // transpose in place
    for i in 0..n {
        for j in 0..i {
            q.swap(i * n + j, j * n + i);
        }
    }
    q
}

/// Implicit QL on a symmetric tridiagonal matrix. `zt`, if given, holds
/// eigenvector rows and is updated by the same rotations.
fn tql2(d: &mut [f64], e: &mut [f64], mut zt: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > EPS * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::NoConvergence(format!("QL iteration stalled at index {l}")));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for x in d.iter_mut().skip(l + 2) {
                    *x -= h;
                }
                f += h;

                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = zt.as_deref_mut() {
                        let (lo, hi) = z.split_at_mut((i + 1) * n);
                        let zi = &mut lo[i * n..];
                        let zi1 = &mut hi[..n];
                        for k in 0..n {
                            let h = zi1[k];
                            zi1[k] = s * zi[k] + c * h;
                            zi[k] = c * zi[k] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= EPS * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    idx
}

fn check_square(n: usize, a: &[f64]) -> Result<()> {
    if a.len() != n * n {
        return Err(invalid(format!("matrix has {} entries, expected {n}×{n}", a.len())));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("matrix entry".into()));
    }
    Ok(())
}

/// Full eigendecomposition of a row-major symmetric matrix (only its values are read).
pub fn symmetric_eigen(n: usize, a: &[f64]) -> Result<Spectrum> {
    check_square(n, a)?;
    let mut work = a.to_vec();
    let (mut d, mut e, refl) = tridiagonalize(n, &mut work, true);
    drop(work);
    let mut zt = accumulate(n, &refl);
    tql2(&mut d, &mut e, Some(&mut zt))?;
    let order = descending_order(&d);
    let mut vectors = vec![0.0; n * n];
    for (dst, &src) in order.iter().enumerate() {
        vectors[dst * n..(dst + 1) * n].copy_from_slice(&zt[src * n..(src + 1) * n]);
    }
    Ok(Spectrum { eigenvalues: order.iter().map(|&i| d[i]).collect(), eigenvectors: vectors, dim: n, complete: true })
}

/// Eigenvalues of a row-major symmetric matrix in descending order.
pub fn symmetric_eigenvalues(n: usize, a: &[f64]) -> Result<Vec<f64>> {
    check_square(n, a)?;
    let mut work = a.to_vec();
    let (mut d, mut e, _) = tridiagonalize(n, &mut work, false);
    drop(work);
    tql2(&mut d, &mut e, None)?;
    d.sort_by(|x, y| y.total_cmp(x));
    Ok(d)
}

/// Full spectrum of the operator's matrix.
pub fn eigen_decompose(op: &DiscreteOperator) -> Result<Spectrum> {
    symmetric_eigen(op.n(), op.matrix())
}

/// All eigenvalues of the operator's matrix, descending.
pub fn eigenvalues(op: &DiscreteOperator) -> Result<Vec<f64>> {
    symmetric_eigenvalues(op.n(), op.matrix())
}

/// Seed of the deterministic Lanczos start vector.
pub const LANCZOS_SEED: u64 = 0x5eed;

/// Top `k` eigenpairs of a symmetric linear map by Lanczos iteration with full
/// reorthogonalization. Stops when every wanted Ritz pair has residual below
/// `tol`; `scale` should bound the operator norm.
pub fn lanczos<F: FnMut(&[f64], &mut [f64])>(
    n: usize,
    mut matvec: F,
    k: usize,
    tol: f64,
    max_dim: usize,
) -> Result<Spectrum> {
    if k == 0 || k > n {
        return Err(invalid(format!("cannot extract {k} eigenpairs of a {n}-dimensional map")));
    }
    let max_dim = max_dim.min(n).max(k);
    let mut rng = ChaCha8Rng::seed_from_u64(LANCZOS_SEED);
    let mut q: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let nq = dot(&q, &q).sqrt();
    q.iter_mut().for_each(|x| *x /= nq);
    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    loop {
        let j = basis.len() - 1;
        matvec(&basis[j], &mut w);
        let a = dot(&w, &basis[j]);
        alpha.push(a);
        // two passes of classical Gram–Schmidt against the whole basis
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                for (x, y) in w.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let bnorm = dot(&w, &w).sqrt();
        let m = alpha.len();

        let done_dim = m >= max_dim || bnorm == 0.0;
        if m >= k {
            // Ritz values of the current tridiagonal
            let mut d = alpha.clone();
            let mut e = vec![0.0; m];
            e[1..m].copy_from_slice(&beta[..m - 1]);
            let mut st = vec![0.0; m * m];
            for i in 0..m {
                st[i * m + i] = 1.0;
            }
            tql2(&mut d, &mut e, Some(&mut st))?;
            let order = descending_order(&d);
            let converged = order.iter().take(k).all(|&i| (bnorm * st[i * m + m - 1]).abs() <= tol);
            if converged || done_dim {
                if !converged && bnorm != 0.0 && m < n {
                    return Err(Error::NoConvergence(format!("Lanczos did not converge within {m} steps")));
                }
                let mut vectors = vec![0.0; k * n];
                for (slot, &i) in order.iter().take(k).enumerate() {
                    let out = &mut vectors[slot * n..(slot + 1) * n];
                    for (l, b) in basis.iter().enumerate() {
                        let c = st[i * m + l];
                        for (x, y) in out.iter_mut().zip(b) {
                            *x += c * y;
                        }
                    }
                    let nv = dot(out, out).sqrt();
                    out.iter_mut().for_each(|x| *x /= nv);
                }
                return Ok(Spectrum {
                    eigenvalues: order.iter().take(k).map(|&i| d[i]).collect(),
                    eigenvectors: vectors,
                    dim: n,
                    complete: k == n,
                });
            }
        } else if done_dim {
            return Err(Error::NoConvergence("Krylov space exhausted before k vectors".into()));
        }
        beta.push(bnorm);
        basis.push(w.iter().map(|x| x / bnorm).collect());
    }
}

/// Top `k` eigenpairs of the operator with residual at most `1e−11 ‖B‖_F`.
pub fn leading_eigenpairs(op: &DiscreteOperator, k: usize) -> Result<Spectrum> {
    let tol = 1e-11 * op.frobenius_norm();
    lanczos(op.n(), |x, y| op.matvec(x, y), k, tol, 400)
}

/// Dominant eigenvalue by power iteration with shift `shift`, to relative change `tol`.
pub fn power_iteration<F: FnMut(&[f64], &mut [f64])>(
    n: usize,
    mut matvec: F,
    shift: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut y = vec![0.0; n];
    let mut lambda = 0.0;
    for _ in 0..max_iter {
        matvec(&x, &mut y);
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi -= shift * xi;
        }
        let next = dot(&x, &y);
        let ny = dot(&y, &y).sqrt();
        if ny == 0.0 {
            return Ok(shift);
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / ny;
        }
        if (next - lambda).abs() <= tol * next.abs() {
            return Ok(next + shift);
        }
        lambda = next;
    }
    Err(Error::NoConvergence(format!("power iteration after {max_iter} steps")))
}

/// Gap below which the top eigenvalue is reported as degenerate.
pub const DEGENERATE_GAP: f64 = 1e-12;

/// The largest eigenvalue and its eigenfunction `u = v/√w`, normalized in `L²`
/// with positive mean.
#[derive(Clone, Debug)]
pub struct PrincipalPair {
    pub tau: f64,
    pub second: f64,
    pub u: ScalarField,
    pub degenerate: bool,
}

impl PrincipalPair {
    pub fn gap(&self) -> f64 {
        self.tau - self.second
    }

    pub fn relative_gap(&self) -> f64 {
        self.gap() / self.tau
    }

    /// `(min, max)` of `u` over the operator's nodes.
    pub fn range_on(&self, op: &DiscreteOperator) -> (f64, f64) {
        op.indices()
            .iter()
            .map(|&i| self.u.values()[i])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }
}

/// Principal eigenpair from a spectrum with at least two eigenvalues.
pub fn principal_from(op: &DiscreteOperator, spectrum: &Spectrum) -> Result<PrincipalPair> {
    if spectrum.len() < 2 {
        return Err(invalid("principal eigenpair needs the top two eigenvalues"));
    }
    let mut u = op.unsymmetrize(spectrum.vector(0))?;
    let grid: &Arc<QuadratureGrid> = op.grid();
    let mean: f64 = u.values().iter().zip(grid.weights()).map(|(v, w)| v * w).sum();
    let norm = u.values().iter().zip(grid.weights()).map(|(v, w)| v * v * w).sum::<f64>().sqrt();
    let sign = if mean < 0.0 { -1.0 } else { 1.0 };
    u = u.scaled(sign / norm);
    let (tau, second) = (spectrum.eigenvalues[0], spectrum.eigenvalues[1]);
    Ok(PrincipalPair { tau, second, u, degenerate: tau - second < DEGENERATE_GAP })
}

/// Principal eigenpair via [`leading_eigenpairs`].
pub fn principal_eigenpair(op: &DiscreteOperator) -> Result<PrincipalPair> {
    principal_from(op, &leading_eigenpairs(op, 2)?)
}

/// Dense symmetrized matrix of the radial midpoint rule on `(0, R)` with `n` cells.
fn radial_matrix(radius: f64, n: usize) -> Vec<f64> {
    let dr = radius / n as f64;
    let r: Vec<f64> = (0..n).map(|k| (k as f64 + 0.5) * dr).collect();
    let sm: Vec<f64> = r.iter().map(|x| (2.0 * x * dr).sqrt() / (1.0 - x * x)).collect();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = sm[i] * (-0.5 * r[i].max(r[j]).ln()) * sm[j];
        }
    }
    a
}

/// Largest eigenvalue of the `n`-cell midpoint discretization of the radial
/// kernel `½ log(1/max(r, s))` with measure `2r dr/(1 − r²)²` on `(0, R)`.
pub fn radial_oracle(radius: f64, n: usize) -> Result<f64> {
    if !(radius > 0.0 && radius < 1.0) {
        return Err(invalid(format!("radius {radius} must lie in (0, 1)")));
    }
    if n < 32 {
        return Err(invalid(format!("radial oracle needs n ≥ 32, got {n}")));
    }
    let a = radial_matrix(radius, n);
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let s = lanczos(
        n,
        |x, y| {
            for (row, yi) in a.chunks_exact(n).zip(y.iter_mut()) {
                *yi = dot(row, x);
            }
        },
        1,
        1e-13 * norm,
        200,
    )?;
    Ok(s.eigenvalues[0])
}

/// One row of a radial convergence table.
#[derive(Clone, Debug, Serialize)]
pub struct OracleRow {
    pub n: usize,
    pub tau: f64,
    /// `|τ(n) − τ(previous n)|`.
    pub cauchy_difference: Option<f64>,
}

pub fn radial_oracle_table(radius: f64, ns: &[usize]) -> Result<Vec<OracleRow>> {
    let mut rows: Vec<OracleRow> = Vec::with_capacity(ns.len());
    for &n in ns {
        let tau = radial_oracle(radius, n)?;
        let cauchy_difference = rows.last().map(|r| (tau - r.tau).abs());
        rows.push(OracleRow { n, tau, cauchy_difference });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_grid, DomainSpec};
    use crate::operator::{assemble, energy};

    fn random_symmetric(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = rng.gen_range(-1.0..1.0);
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        a
    }

    fn check_decomposition(n: usize, a: &[f64], s: &Spectrum) {
        let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        for k in 0..n {
            let v = s.vector(k);
            for i in 0..n {
                let av: f64 = (0..n).map(|j| a[i * n + j] * v[j]).sum();
                assert!((av - s.eigenvalues[k] * v[i]).abs() < 1e-12 * scale);
            }
        }
        assert!(s.orthonormality_defect() < 1e-12);
        assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn one_by_one() {
        let s = symmetric_eigen(1, &[2.5]).unwrap();
        assert_eq!(s.eigenvalues, vec![2.5]);
        assert_eq!(s.vector(0), &[1.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let (a, b) = (0.7, -0.3);
        let s = symmetric_eigen(2, &[a, b, b, a]).unwrap();
        assert!((s.eigenvalues[0] - (a - b)).abs() < 1e-15);
        assert!((s.eigenvalues[1] - (a + b)).abs() < 1e-15);
        check_decomposition(2, &[a, b, b, a], &s);
    }

    #[test]
    fn random_matrices() {
        for (n, seed) in [(3, 1), (7, 2), (40, 3), (121, 4)] {
            let a = random_symmetric(n, seed);
            let s = symmetric_eigen(n, &a).unwrap();
            check_decomposition(n, &a, &s);
            let vals = symmetric_eigenvalues(n, &a).unwrap();
            for (x, y) in vals.iter().zip(&s.eigenvalues) {
                assert!((x - y).abs() < 1e-12);
            }
            let trace: f64 = (0..n).map(|i| a[i * n + i]).sum();
            assert!((vals.iter().sum::<f64>() - trace).abs() < 1e-11 * n as f64);
        }
    }

    #[test]
    fn diagonal_and_repeated_eigenvalues() {
        let a = [3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 3.0];
        let s = symmetric_eigen(3, &a).unwrap();
        assert_eq!(s.eigenvalues, vec![3.0, 3.0, 1.0]);
        check_decomposition(3, &a, &s);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(symmetric_eigen(2, &[1.0, 2.0, 3.0]).is_err());
        assert!(symmetric_eigen(1, &[f64::NAN]).is_err());
        assert!(lanczos(3, |_, _| {}, 4, 1e-10, 10).is_err());
    }

    #[test]
    fn operator_spectrum_invariants() {
        let (_, mask) = build_grid(&DomainSpec::disk((0.1, -0.1), 0.45), 0.04).unwrap();
        let op = assemble(&mask).unwrap();
        let s = eigen_decompose(&op).unwrap();
        let bnorm = op.frobenius_norm();
        assert!(s.max_residual(&op) <= 1e-9 * bnorm);
        assert!(s.orthonormality_defect() <= 1e-10);
        assert!(*s.eigenvalues.last().unwrap() > 0.0);
        let p = power_iteration(op.n(), |x, y| op.matvec(x, y), 0.0, 1e-14, 100_000).unwrap();
        assert!((p - s.eigenvalues[0]).abs() < 1e-8, "{p} vs {}", s.eigenvalues[0]);
        let top = leading_eigenpairs(&op, 3).unwrap();
        for k in 0..3 {
            assert!((top.eigenvalues[k] - s.eigenvalues[k]).abs() < 1e-12);
        }
        assert!(top.max_residual(&op) <= 1e-9 * bnorm);
        assert!(top.orthonormality_defect() <= 1e-10);
    }

    #[test]
    fn principal_pair_properties() {
        let (grid, mask) = build_grid(&DomainSpec::disk((0.0, 0.0), 0.5), 0.04).unwrap();
        let op = assemble(&mask).unwrap();
        let pp = principal_eigenpair(&op).unwrap();
        assert!(!pp.degenerate);
        let (lo, _) = pp.range_on(&op);
        assert!(lo > 0.0);
        let norm: f64 = pp.u.values().iter().zip(grid.weights()).map(|(v, w)| v * v * w).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        let rq = energy(&op, &pp.u, &pp.u).unwrap();
        assert!((rq - pp.tau).abs() < 1e-9);
        // rotational symmetry of the grid gives equal values on the orbit of a node
        let nodes = grid.nodes();
        for (i, z) in nodes.iter().enumerate() {
            let rot = z.z() * num_complex::Complex64::i();
            if let Some(j) = nodes.iter().position(|w| (w.z() - rot).norm() < 1e-12) {
                assert!((pp.u.values()[i] - pp.u.values()[j]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn radial_oracle_convergence() {
        let rows = radial_oracle_table(0.5, &[128, 256, 512]).unwrap();
        let d1 = rows[1].cauchy_difference.unwrap();
        let d2 = rows[2].cauchy_difference.unwrap();
        assert!(d2 < d1);
        assert!((rows[2].tau - 0.152_967_094_4).abs() < 1e-9, "{}", rows[2].tau);
        assert!(radial_oracle(0.0, 64).is_err());
        assert!(radial_oracle(0.5, 16).is_err());
    }

    #[test]
    fn radial_oracle_vanishes_with_radius() {
        let taus: Vec<f64> = [0.4, 0.2, 0.1, 0.05].iter().map(|&r| radial_oracle(r, 64).unwrap()).collect();
        assert!(taus.windows(2).all(|w| w[1] < w[0]));
        assert!(taus[3] < 0.01);
    }

    #[test]
    fn radial_rayleigh_lower_bound() {
        // constant vector: E(1,1)/τ(Δ_R) ≤ top eigenvalue
        let (r, n) = (0.5, 256);
        let a = radial_matrix(r, n);
        let dr = r / n as f64;
        let x: Vec<f64> = (0..n)
            .map(|k| {
                let s = (k as f64 + 0.5) * dr;
                (2.0 * s * dr).sqrt() / (1.0 - s * s)
            })
            .collect();
        let ax: Vec<f64> = a.chunks_exact(n).map(|row| dot(row, &x)).collect();
        let rq = dot(&x, &ax) / dot(&x, &x);
        let tau = radial_oracle(r, n).unwrap();
        assert!(rq <= tau && rq > 0.9 * tau);
    }
}
