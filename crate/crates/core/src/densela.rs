//! Dense symmetric linear algebra: Cholesky, SPD solves, the generalized
//! symmetric-definite eigenproblem and scaled condition numbers.
//!
//! The symmetric eigensolver is Householder tridiagonalization followed by
//! the implicit-shift QL iteration (the EISPACK `tred2`/`tql2` pair).

use nalgebra::{DMatrix, DVector};

use crate::basis::DofVector;
use crate::error::{Error, Result};

/// QL iterations allowed per eigenvalue.
pub const MAX_QL_ITERATIONS: usize = 30;

/// Lower-triangular `L` with `L L^T = A`. Only the lower triangle of `a` is read.
pub fn cholesky(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite { row: j, pivot: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Solve `L y = b` in place.
fn forward_sub(l: &DMatrix<f64>, b: &mut [f64]) {
    let n = l.nrows();
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[(i, k)] * b[k];
        }
        b[i] = s / l[(i, i)];
    }
}

/// Solve `L^T x = y` in place.
fn backward_sub(l: &DMatrix<f64>, b: &mut [f64]) {
    let n = l.nrows();
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= l[(k, i)] * b[k];
        }
        b[i] = s / l[(i, i)];
    }
}

/// Solve `K u = f` for symmetric positive definite `K`.
pub fn solve_spd(k: &DMatrix<f64>, f: &DVector<f64>) -> Result<DVector<f64>> {
    let l = cholesky(k)?;
    let mut u = f.as_slice().to_vec();
    forward_sub(&l, &mut u);
    backward_sub(&l, &mut u);
    Ok(DVector::from_vec(u))
}

/// Eigenpairs of `K v = lambda M v`, ascending, each `v` with `v^T M v = 1`
/// and its largest-magnitude entry positive.
#[derive(Debug, Clone)]
pub struct EigenSolution {
    pub values: Vec<f64>,
    pub vectors: Vec<DVector<f64>>,
}

impl EigenSolution {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The `i`-th (0-based) eigenvector split into FEM and enrichment parts.
    pub fn dof_vector(&self, i: usize, n_fem: usize) -> DofVector {
        DofVector::from_full(self.vectors[i].as_slice(), n_fem)
    }
}

/// Symmetric eigendecomposition: ascending eigenvalues and orthonormal
/// eigenvectors stored as columns.
pub fn symmetric_eigen(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    if n == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    let mut v = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e)?;
    Ok((d, v))
}

/// Householder reduction to tridiagonal form. On exit `d` is the diagonal,
/// `e[1..]` the subdiagonal, and `v` the accumulated orthogonal transform.
fn tred2(v: &mut DMatrix<f64>, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..(n - 1) {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL on the tridiagonal matrix from [`tred2`], then sort ascending.
fn tql2(v: &mut DMatrix<f64>, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::ConvergenceFailure { iterations: iter - 1 });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[(k, i + 1)];
                        v[(k, i + 1)] = s * v[(k, i)] + c * h;
                        v[(k, i)] = c * v[(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // selection sort keeps columns paired with values
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            v.swap_columns(i, k);
        }
    }
    Ok(())
}

/// The `k` smallest eigenpairs of `K v = lambda M v` for SPD `K` and `M`.
///
/// Reduces with `M = L L^T` to `L^{-1} K L^{-T} y = lambda y`, solves the
/// standard problem in full and back-transforms `v = L^{-T} y`.
pub fn generalized_eigs(k: &DMatrix<f64>, m: &DMatrix<f64>, count: usize) -> Result<EigenSolution> {
    let n = k.nrows();
    if k.shape() != m.shape() || k.ncols() != n {
        return Err(Error::InvalidArgument("K and M must be square and of equal size".into()));
    }
    if count > n {
        return Err(Error::InvalidArgument(format!(
            "requested {count} eigenpairs of a {n}x{n} problem"
        )));
    }
    // positive definiteness of K is part of the contract
    cholesky(k)?;
    let l = cholesky(m)?;

    // X = L^{-1} K, then C = L^{-1} X^T
    let mut x = k.clone();
    for j in 0..n {
        let mut col = x.column(j).iter().copied().collect::<Vec<_>>();
        forward_sub(&l, &mut col);
        x.set_column(j, &DVector::from_vec(col));
    }
    let mut c = x.transpose();
    for j in 0..n {
        let mut col = c.column(j).iter().copied().collect::<Vec<_>>();
        forward_sub(&l, &mut col);
        c.set_column(j, &DVector::from_vec(col));
    }
    let c = (&c + c.transpose()) * 0.5;

    let (values, y) = symmetric_eigen(&c)?;
    let mut vectors = Vec::with_capacity(count);
    for j in 0..count {
        let mut v = y.column(j).iter().copied().collect::<Vec<_>>();
        backward_sub(&l, &mut v);
        let mut v = DVector::from_vec(v);
        let norm = v.dot(&(m * &v)).sqrt();
        v /= norm;
        let imax = v.iamax();
        if v[imax] < 0.0 {
            v = -v;
        }
        vectors.push(v);
    }
    Ok(EigenSolution {
        values: values[..count].to_vec(),
        vectors,
    })
}

/// `lambda_max / lambda_min` of `D^{-1/2} A D^{-1/2}` with `D = diag(A)`.
pub fn scaled_condition_number(a: &DMatrix<f64>) -> Result<f64> {
    let n = a.nrows();
    let mut s = vec![0.0; n];
    for i in 0..n {
        let d = a[(i, i)];
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite { row: i, pivot: d });
        }
        s[i] = 1.0 / d.sqrt();
    }
    let scaled = DMatrix::from_fn(n, n, |i, j| a[(i, j)] * s[i] * s[j]);
    cholesky(&scaled)?;
    let (values, _) = symmetric_eigen(&scaled)?;
    let lo = values[0];
    if !(lo > 0.0) {
        return Err(Error::NotPositiveDefinite { row: 0, pivot: lo });
    }
    Ok(values[n - 1] / lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_spd(n: usize, seed: u64) -> DMatrix<f64> {
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let b = DMatrix::from_fn(n, n, |_, _| next());
        &b * b.transpose() + DMatrix::identity(n, n) * 0.5
    }

    #[test]
    fn cholesky_small() {
        let i = DMatrix::<f64>::identity(3, 3);
        assert_eq!(cholesky(&i).unwrap(), i);
        let a = DMatrix::from_row_slice(2, 2, &[4.0, 2.0, 2.0, 3.0]);
        let l = cholesky(&a).unwrap();
        assert_eq!(l[(0, 0)], 2.0);
        assert_eq!(l[(1, 0)], 1.0);
        assert_eq!(l[(0, 1)], 0.0);
        assert!((l[(1, 1)] - 2f64.sqrt()).abs() < 1e-15);
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(cholesky(&bad), Err(Error::NotPositiveDefinite { row: 1, .. })));
    }

    #[test]
    fn solve_identity() {
        let i = DMatrix::<f64>::identity(4, 4);
        let e1 = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(solve_spd(&i, &e1).unwrap(), e1);
    }

    #[test]
    fn one_by_one_generalized() {
        let k = DMatrix::from_element(1, 1, 2.0);
        let m = DMatrix::from_element(1, 1, 1.0);
        let s = generalized_eigs(&k, &m, 1).unwrap();
        assert_eq!(s.values, vec![2.0]);
        assert_eq!(s.vectors[0][0], 1.0);

        let k = DMatrix::from_element(1, 1, 4.0);
        let m = DMatrix::from_element(1, 1, 1.0 / 3.0);
        let s = generalized_eigs(&k, &m, 1).unwrap();
        assert!((s.values[0] - 12.0).abs() < 1e-13);
    }

    #[test]
    fn symmetric_eigen_against_nalgebra() {
        for (n, seed) in [(1, 1), (2, 2), (5, 3), (17, 4), (40, 5)] {
            let a = random_spd(n, seed) - DMatrix::identity(n, n) * 2.0;
            let (vals, vecs) = symmetric_eigen(&a).unwrap();
            let mut reference: Vec<f64> = a.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
            reference.sort_by(f64::total_cmp);
            let scale = a.amax();
            for (x, y) in vals.iter().zip(&reference) {
                assert!((x - y).abs() < 1e-12 * scale.max(1.0));
            }
            let resid = &a * &vecs - &vecs * DMatrix::from_diagonal(&DVector::from_vec(vals.clone()));
            assert!(resid.amax() < 1e-12 * scale.max(1.0));
            let orth = vecs.transpose() * &vecs - DMatrix::identity(n, n);
            assert!(orth.amax() < 1e-13);
        }
    }

    #[test]
    fn scaled_condition_examples() {
        let i = DMatrix::<f64>::identity(5, 5);
        assert!((scaled_condition_number(&i).unwrap() - 1.0).abs() < 1e-15);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 100.0]));
        assert!((scaled_condition_number(&d).unwrap() - 1.0).abs() < 1e-15);
        let a = DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]);
        assert!((scaled_condition_number(&a).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn generalized_rejects_bad_input() {
        let k = DMatrix::<f64>::identity(2, 2);
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(generalized_eigs(&k, &m, 1), Err(Error::NotPositiveDefinite { .. })));
        assert!(generalized_eigs(&k, &k, 3).is_err());
    }

    proptest! {
        #[test]
        fn generalized_pairs_satisfy_invariants(n in 1usize..25, seed in any::<u64>()) {
            let k = random_spd(n, seed);
            let m = random_spd(n, seed ^ 0x9e3779b97f4a7c15);
            let sol = generalized_eigs(&k, &m, n).unwrap();
            let kmax = k.amax();
            for w in sol.values.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
            for (i, v) in sol.vectors.iter().enumerate() {
                let r = &k * v - (&m * v) * sol.values[i];
                prop_assert!(r.norm() <= 1e-8 * kmax);
                for (j, u) in sol.vectors.iter().enumerate() {
                    let g = u.dot(&(&m * v));
                    if i == j {
                        prop_assert!((g - 1.0).abs() < 1e-10);
                    } else {
                        prop_assert!(g.abs() < 1e-8);
                    }
                }
                prop_assert!(v[v.iamax()] > 0.0);
            }
            let again = generalized_eigs(&k, &m, n).unwrap();
            prop_assert_eq!(&again.values, &sol.values);
            prop_assert_eq!(&again.vectors, &sol.vectors);
        }

        #[test]
        fn cholesky_round_trip(n in 1usize..30, seed in any::<u64>()) {
            let a = random_spd(n, seed);
            let l = cholesky(&a).unwrap();
            let err = (&l * l.transpose() - &a).amax();
            prop_assert!(err <= 1e-12 * a.amax());
        }
    }
}
