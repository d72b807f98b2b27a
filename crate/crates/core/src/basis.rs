//! Degree-p C0 Lagrange basis, the stable GFEM enrichment and the
//! interface-aware interpolant in the enriched space.
//!
//! Global FEM basis functions are numbered by the equispaced Lagrange nodes
//! `k = 0..=pN`; node `k` of element `e` (1-based) with local index `i` has
//! `k = p(e - 1) + i`. The two boundary nodes carry no degree of freedom, so
//! the FEM dofs are `k = 1..=pN-1` and live at position `k - 1` of the
//! coefficient vector.
//!
//! On non-fitting meshes the enrichment is `w = I_h|x - gamma| - |x - gamma|`,
//! supported on the interface element `tau_r`, and every local basis function
//! of `tau_r` is multiplied by `w` to form the enrichment functions.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::mesh::{Mesh1D, Side};

/// Largest supported polynomial degree.
pub const MAX_DEGREE: usize = 15;

/// Discretization flavor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Fem,
    Sgfem,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Fem => "FEM",
            Method::Sgfem => "SGFEM",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fem" => Ok(Method::Fem),
            "sgfem" => Ok(Method::Sgfem),
            other => Err(Error::Config(format!("unknown method '{other}'"))),
        }
    }
}

/// Lagrange shape functions on `p + 1` equispaced nodes of `[0, 1]`, with
/// their derivatives in the reference coordinate.
pub fn lagrange_shape(p: usize, xi: f64, values: &mut [f64], derivs: &mut [f64]) {
    let pf = p as f64;
    let node = |m: usize| m as f64 / pf;
    for i in 0..=p {
        let xi_i = node(i);
        let mut v = 1.0;
        let mut d = 0.0;
        for m in (0..=p).filter(|&m| m != i) {
            let denom = xi_i - node(m);
            let factor = (xi - node(m)) / denom;
            d = d * factor + v / denom;
            v *= factor;
        }
        values[i] = v;
        derivs[i] = d;
    }
}

/// Coefficients of an enriched-space function: `fem[k - 1]` multiplies the
/// FEM basis function of node `k`, `enr[i]` the enrichment function built on
/// local node `i` of the interface element.
#[derive(Debug, Clone, PartialEq)]
pub struct DofVector {
    pub fem: Vec<f64>,
    pub enr: Vec<f64>,
}

impl DofVector {
    pub fn zeros(space: &EnrichedSpace) -> Self {
        Self {
            fem: vec![0.0; space.n_fem()],
            enr: vec![0.0; space.n_enr()],
        }
    }

    pub fn from_full(full: &[f64], n_fem: usize) -> Self {
        Self {
            fem: full[..n_fem].to_vec(),
            enr: full[n_fem..].to_vec(),
        }
    }

    pub fn to_full(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.fem.len() + self.enr.len(),
            self.fem.iter().chain(&self.enr).copied(),
        )
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            fem: self.fem.iter().map(|v| s * v).collect(),
            enr: self.enr.iter().map(|v| s * v).collect(),
        }
    }
}

/// One nonzero basis function at a point: global dof index, value, slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisValue {
    pub dof: usize,
    pub value: f64,
    pub deriv: f64,
}

/// FEM space of degree `p` on a mesh, optionally augmented by the stable GFEM
/// enrichment on the interface element.
#[derive(Debug, Clone)]
pub struct EnrichedSpace {
    p: usize,
    mesh: Mesh1D,
    n_fem: usize,
    enriched_set: Vec<usize>,
}

impl EnrichedSpace {
    /// Build the space. Enrichment is switched off for [`Method::Fem`] and on
    /// fitting meshes.
    pub fn new(mesh: Mesh1D, p: usize, method: Method) -> Result<Self> {
        if p == 0 || p > MAX_DEGREE {
            return Err(Error::InvalidArgument(format!(
                "polynomial degree must be in 1..={MAX_DEGREE}, got {p}"
            )));
        }
        let n_fem = p * mesh.n_elements() - 1;
        let enriched_set = if method == Method::Sgfem && !mesh.is_fitting() {
            let r = mesh.interface_element();
            (0..=p).map(|i| p * (r - 1) + i).collect()
        } else {
            Vec::new()
        };
        Ok(Self {
            p,
            mesh,
            n_fem,
            enriched_set,
        })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn n_fem(&self) -> usize {
        self.n_fem
    }

    pub fn n_enr(&self) -> usize {
        self.enriched_set.len()
    }

    pub fn n_dofs(&self) -> usize {
        self.n_fem + self.n_enr()
    }

    pub fn is_enriched(&self) -> bool {
        !self.enriched_set.is_empty()
    }

    /// Global Lagrange node indices whose basis functions are enriched.
    pub fn enriched_set(&self) -> &[usize] {
        &self.enriched_set
    }

    /// Dof index of local node `i` on element `e`, `None` on the boundary.
    pub fn fem_dof(&self, e: usize, i: usize) -> Option<usize> {
        let k = self.p * (e - 1) + i;
        (k >= 1 && k <= self.n_fem).then(|| k - 1)
    }

    /// Physical coordinate of global Lagrange node `k`.
    pub fn node_position(&self, k: usize) -> f64 {
        let n = self.mesh.n_elements();
        if k == 0 {
            return 0.0;
        }
        let e = ((k - 1) / self.p + 1).min(n);
        let i = k - self.p * (e - 1);
        if i == self.p {
            return self.mesh.nodes()[e];
        }
        let (a, _) = self.mesh.element(e);
        a + self.mesh.element_len(e) * i as f64 / self.p as f64
    }

    /// Value (`deriv = 0`) or slope (`deriv = 1`) of the `j`-th (1-based)
    /// global FEM basis function. Slopes at element ends are one-sided, from
    /// the element returned by [`Mesh1D::locate`].
    pub fn eval_fem_basis(&self, j: usize, x: f64, deriv: u8) -> Result<f64> {
        if j == 0 || j > self.n_fem {
            return Err(Error::IndexOutOfRange { index: j, max: self.n_fem });
        }
        let e = self.mesh.locate(x)?;
        let first = self.p * (e - 1);
        if j < first || j > first + self.p {
            return Ok(0.0);
        }
        let i = j - first;
        let (a, _) = self.mesh.element(e);
        let h = self.mesh.element_len(e);
        let mut vals = vec![0.0; self.p + 1];
        let mut ders = vec![0.0; self.p + 1];
        lagrange_shape(self.p, (x - a) / h, &mut vals, &mut ders);
        Ok(if deriv == 0 { vals[i] } else { ders[i] / h })
    }

    /// Enrichment `w` (and its slope) on the given side of the interface
    /// element. Returns zeros outside `tau_r` or on fitting meshes.
    fn enrichment_on(&self, e: usize, x: f64, side: Side) -> (f64, f64) {
        if self.mesh.is_fitting() || e != self.mesh.interface_element() {
            return (0.0, 0.0);
        }
        let (xl, xr) = self.mesh.element(e);
        let h = xr - xl;
        let g = self.mesh.gamma();
        match side {
            Side::Left => {
                let slope = 2.0 * (xr - g) / h;
                (slope * (x - xl), slope)
            }
            Side::Right => {
                let slope = -2.0 * (g - xl) / h;
                (slope * (x - xr), slope)
            }
        }
    }

    /// Enrichment function `w(x)` or its slope. Slopes use the right limit at
    /// `x_{r-1}` and `gamma` and the left limit at `x_r`.
    pub fn eval_enrichment(&self, x: f64, deriv: u8) -> f64 {
        if self.mesh.is_fitting() || !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        let r = self.mesh.interface_element();
        let (xl, xr) = self.mesh.element(r);
        if x < xl || x > xr {
            return 0.0;
        }
        let side = if x < self.mesh.gamma() { Side::Left } else { Side::Right };
        let (w, dw) = self.enrichment_on(r, x, side);
        if deriv == 0 {
            w
        } else {
            dw
        }
    }

    /// All basis functions that are nonzero on element `e` at `x`, with `side`
    /// selecting the enrichment branch on the interface element.
    pub fn basis_at(&self, e: usize, x: f64, side: Side, out: &mut Vec<BasisValue>) {
        out.clear();
        let p = self.p;
        let (a, _) = self.mesh.element(e);
        let h = self.mesh.element_len(e);
        let mut vals = [0.0; MAX_DEGREE + 1];
        let mut ders = [0.0; MAX_DEGREE + 1];
        lagrange_shape(p, (x - a) / h, &mut vals[..=p], &mut ders[..=p]);
        for i in 0..=p {
            if let Some(dof) = self.fem_dof(e, i) {
                out.push(BasisValue { dof, value: vals[i], deriv: ders[i] / h });
            }
        }
        if self.is_enriched() && e == self.mesh.interface_element() {
            let (w, dw) = self.enrichment_on(e, x, side);
            for i in 0..=p {
                let phi = vals[i];
                let dphi = ders[i] / h;
                out.push(BasisValue {
                    dof: self.n_fem + i,
                    value: w * phi,
                    deriv: dw * phi + w * dphi,
                });
            }
        }
    }

    /// Evaluate the discrete function with coefficients `u` (and its slope) at
    /// `x` on element `e`, side `side`.
    pub fn eval_local(&self, u: &DofVector, e: usize, x: f64, side: Side, scratch: &mut Vec<BasisValue>) -> (f64, f64) {
        self.basis_at(e, x, side, scratch);
        scratch.iter().fold((0.0, 0.0), |(v, d), b| {
            let c = if b.dof < self.n_fem { u.fem[b.dof] } else { u.enr[b.dof - self.n_fem] };
            (v + c * b.value, d + c * b.deriv)
        })
    }

    /// Evaluate the discrete function at any `x` in `[0, 1]`.
    pub fn eval(&self, u: &DofVector, x: f64) -> Result<(f64, f64)> {
        let e = self.mesh.locate(x)?;
        let side = if x < self.mesh.gamma() { Side::Left } else { Side::Right };
        let mut scratch = Vec::new();
        Ok(self.eval_local(u, e, x, side, &mut scratch))
    }

    /// Standard degree-p Lagrange interpolant of `u` on the mesh (no
    /// enrichment coefficients).
    pub fn nodal_interpolant(&self, u: impl Fn(f64) -> f64) -> DofVector {
        let mut out = DofVector::zeros(self);
        for k in 1..=self.n_fem {
            out.fem[k - 1] = u(self.node_position(k));
        }
        out
    }

    /// Interpolant in the enriched space that is the degree-p Lagrange
    /// interpolant of `u0` on `[x_{r-1}, gamma]` and of `u1` on `[gamma, x_r]`
    /// inside the interface element, and the ordinary Lagrange interpolant
    /// elsewhere.
    pub fn build_interface_interpolant(
        &self,
        u0: impl Fn(f64) -> f64,
        u1: impl Fn(f64) -> f64,
    ) -> Result<DofVector> {
        if !self.is_enriched() {
            return Err(Error::InvalidArgument(
                "interface interpolant needs an enriched, non-fitting space".into(),
            ));
        }
        let g = self.mesh.gamma();
        let (left, right) = (u0(g), u1(g));
        if (left - right).abs() > 1e-10 * (1.0 + left.abs()) {
            return Err(Error::DiscontinuousInput { left, right });
        }
        let u = |x: f64| if x < g { u0(x) } else { u1(x) };
        let mut out = self.nodal_interpolant(u);

        let p = self.p;
        let r = self.mesh.interface_element();
        let (xl, _) = self.mesh.element(r);
        let h = self.mesh.element_len(r);
        let nu = (g - xl) / h;
        let pf = p as f64;

        let standard_pts: Vec<f64> = (0..=p).map(|i| i as f64 / pf).collect();
        let standard_vals: Vec<f64> = (0..=p)
            .map(|i| match self.fem_dof(r, i) {
                Some(dof) => out.fem[dof],
                None => 0.0,
            })
            .collect();
        let left_pts: Vec<f64> = (0..=p).map(|i| nu * i as f64 / pf).collect();
        let left_vals: Vec<f64> = left_pts
            .iter()
            .enumerate()
            .map(|(i, &t)| if i == p { left } else { u0(xl + h * t) })
            .collect();
        let right_pts: Vec<f64> = (0..=p).map(|i| nu + (1.0 - nu) * i as f64 / pf).collect();
        let right_vals: Vec<f64> = right_pts
            .iter()
            .enumerate()
            .map(|(i, &t)| if i == 0 { left } else { u1(xl + h * t) })
            .collect();

        let base = monomial_fit(&standard_pts, &standard_vals);
        let p0 = monomial_fit(&left_pts, &left_vals);
        let p1 = monomial_fit(&right_pts, &right_vals);
        let a: Vec<f64> = p0.iter().zip(&base).map(|(x, y)| x - y).collect();
        let b: Vec<f64> = p1.iter().zip(&base).map(|(x, y)| x - y).collect();
        let (alpha, beta) = represent_piecewise_poly(&a, &b, nu)?;

        for i in 1..p {
            if let Some(dof) = self.fem_dof(r, i) {
                out.fem[dof] += horner(&alpha, standard_pts[i]);
            }
        }
        for i in 0..=p {
            out.enr[i] = horner(&beta, standard_pts[i]) / h;
        }
        Ok(out)
    }
}

/// Evaluate `sum_j c_j x^j`.
pub fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

/// Monomial coefficients of the interpolating polynomial through the points.
fn monomial_fit(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let v = DMatrix::from_fn(n, n, |i, j| xs[i].powi(j as i32));
    let rhs = DVector::from_column_slice(ys);
    v.lu()
        .solve(&rhs)
        .expect("distinct interpolation points")
        .iter()
        .copied()
        .collect()
}

fn falling(l: usize, k: usize) -> f64 {
    // l! / (l - k)!
    ((l - k + 1)..=l).fold(1.0, |acc, m| acc * m as f64)
}

/// Reference enrichment on `[0, 1]` with kink at `nu`.
pub fn reference_enrichment(x: f64, nu: f64) -> f64 {
    if x <= nu {
        2.0 * (1.0 - nu) * x
    } else {
        2.0 * nu * (1.0 - x)
    }
}

/// Write the continuous piecewise polynomial `P0 = sum a_j x^j` on `[0, nu]`,
/// `P1 = sum b_j x^j` on `[nu, 1]` as `sum_j (alpha_j + beta_j w(x)) x^j`
/// with `w` the reference enrichment.
///
/// `b_0` is not read: it is fixed by continuity at `nu`. The betas solve the
/// upper-triangular system with diagonal `k!` by back-substitution, then
/// `alpha_0 = a_0` and `alpha_k = a_k - 2(1 - nu) beta_{k-1}`. `beta_p` is
/// always zero.
pub fn represent_piecewise_poly(a: &[f64], b: &[f64], nu: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::InvalidArgument(format!("kink must lie in (0, 1), got {nu}")));
    }
    if a.is_empty() || a.len() != b.len() {
        return Err(Error::InvalidArgument(
            "coefficient vectors must be nonempty and of equal length".into(),
        ));
    }
    let p = a.len() - 1;
    let mut beta = vec![0.0; p + 1];
    // row k (1..=p): sum_{l=k}^p (A_l^k - nu A_{l-1}^k) beta_{l-1}
    //              = sum_{l=k}^p A_l^k (a_l - b_l) / 2
    for k in (1..=p).rev() {
        let rhs: f64 = (k..=p).map(|l| falling(l, k) * (a[l] - b[l])).sum::<f64>() / 2.0;
        let upper: f64 = ((k + 1)..=p)
            .map(|l| (falling(l, k) - nu * falling(l - 1, k)) * beta[l - 1])
            .sum();
        beta[k - 1] = (rhs - upper) / falling(k, k);
    }
    let mut alpha = vec![0.0; p + 1];
    alpha[0] = a[0];
    for k in 1..=p {
        alpha[k] = a[k] - 2.0 * (1.0 - nu) * beta[k - 1];
    }
    Ok((alpha, beta))
}

/// `b_0` that makes `P0` and `P1` agree at `nu`.
pub fn continuity_b0(a: &[f64], b: &[f64], nu: f64) -> f64 {
    a[0] + (1..a.len()).map(|l| (a[l] - b[l]) * nu.powi(l as i32)).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn space(n: usize, gamma: f64, p: usize, method: Method) -> EnrichedSpace {
        EnrichedSpace::new(Mesh1D::uniform(n, gamma).unwrap(), p, method).unwrap()
    }

    #[test]
    fn nodal_property_linear() {
        let s = space(10, 1.0 / 3.0, 1, Method::Fem);
        assert_eq!(s.n_fem(), 9);
        for j in 1..=9 {
            let xj = s.mesh().nodes()[j];
            assert_eq!(s.eval_fem_basis(j, xj, 0).unwrap(), 1.0);
        }
        let sum: f64 = (1..=9).map(|j| s.eval_fem_basis(j, 0.123, 0).unwrap()).sum();
        assert!((sum - 1.0).abs() < 1e-14);
    }

    #[test]
    fn quadratic_on_two_elements() {
        let s = space(2, 0.3, 2, Method::Fem);
        assert_eq!(s.n_fem(), 3);
        assert!((s.eval_fem_basis(1, 0.25, 0).unwrap() - 1.0).abs() < 1e-15);
        assert!(s.eval_fem_basis(1, 0.5, 0).unwrap().abs() < 1e-15);
        assert!(matches!(
            s.eval_fem_basis(4, 0.5, 0),
            Err(Error::IndexOutOfRange { index: 4, max: 3 })
        ));
        assert!(matches!(s.eval_fem_basis(0, 0.5, 0), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn partition_of_unity() {
        for p in 1..=4 {
            let s = space(8, 0.41, p, Method::Fem);
            for &x in &[0.01, 0.1, 0.3, 0.47, 0.77, 0.99] {
                let sum: f64 = (1..=s.n_fem()).map(|j| s.eval_fem_basis(j, x, 0).unwrap()).sum();
                let e = s.mesh().locate(x).unwrap();
                let (a, b) = s.mesh().element(e);
                let mut vals = vec![0.0; p + 1];
                let mut ders = vec![0.0; p + 1];
                lagrange_shape(p, (x - a) / (b - a), &mut vals, &mut ders);
                let missing = if e == 1 {
                    vals[0]
                } else if e == 8 {
                    vals[p]
                } else {
                    0.0
                };
                assert!((sum + missing - 1.0).abs() < 1e-13, "p={p} x={x}");
            }
        }
    }

    #[test]
    fn enrichment_values() {
        let s = space(10, 1.0 / 3.0, 1, Method::Sgfem);
        assert_eq!(s.eval_enrichment(0.3, 0), 0.0);
        assert!(s.eval_enrichment(0.4, 0).abs() < 1e-16);
        assert_eq!(s.eval_enrichment(0.9, 0), 0.0);
        let g = 1.0 / 3.0;
        let kink = 2.0 * (0.4 - g) * (g - 0.3) / 0.1;
        assert!((s.eval_enrichment(g, 0) - kink).abs() < 1e-15);
        assert!((kink - 0.044444444444444446).abs() < 1e-12);
        // one-sided slopes
        assert!((s.eval_enrichment(0.3, 1) - 2.0 * (0.4 - g) / 0.1).abs() < 1e-12);
        assert!((s.eval_enrichment(g, 1) + 2.0 * (g - 0.3) / 0.1).abs() < 1e-12);
        assert!((s.eval_enrichment(0.4, 1) + 2.0 * (g - 0.3) / 0.1).abs() < 1e-12);
        assert_eq!(s.eval_enrichment(0.5, 1), 0.0);
    }

    #[test]
    fn enrichment_continuity() {
        let s = space(13, 0.6180339887, 2, Method::Sgfem);
        let r = s.mesh().interface_element();
        let (xl, xr) = s.mesh().element(r);
        let g = s.mesh().gamma();
        let (wl, _) = s.enrichment_on(r, g, Side::Left);
        let (wr, _) = s.enrichment_on(r, g, Side::Right);
        assert!((wl - wr).abs() < 1e-14);
        assert!(s.enrichment_on(r, xl, Side::Left).0.abs() < 1e-14);
        assert!(s.enrichment_on(r, xr, Side::Right).0.abs() < 1e-14);
        assert!(wl > 0.0);
    }

    #[test]
    fn fitting_space_is_not_enriched() {
        let s = space(12, 1.0 / 3.0, 2, Method::Sgfem);
        assert!(!s.is_enriched());
        assert_eq!(s.n_enr(), 0);
        assert_eq!(s.eval_enrichment(1.0 / 3.0, 0), 0.0);
        let s = space(10, 1.0 / 3.0, 3, Method::Sgfem);
        assert_eq!(s.n_enr(), 4);
        assert_eq!(s.enriched_set(), &[9, 10, 11, 12]);
    }

    #[test]
    fn boundary_interface_element_keeps_all_enrichments() {
        let s = space(10, 0.05, 2, Method::Sgfem);
        assert_eq!(s.mesh().interface_element(), 1);
        assert_eq!(s.n_enr(), 3);
        let u0 = |x: f64| 3.0 * x;
        let u1 = |x: f64| 0.15 * (1.0 - x) / 0.95;
        let v = s.build_interface_interpolant(u0, u1).unwrap();
        for i in 0..=200 {
            let x = i as f64 / 200.0;
            let exact = if x < 0.05 { u0(x) } else { u1(x) };
            assert!((s.eval(&v, x).unwrap().0 - exact).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for p in 1..=3 {
            let s = space(7, 0.37, p, Method::Sgfem);
            let u = DofVector {
                fem: (0..s.n_fem()).map(|i| ((i * 7 + 3) % 11) as f64 / 11.0 - 0.5).collect(),
                enr: (0..s.n_enr()).map(|i| 1.0 + i as f64).collect(),
            };
            let mut scratch = Vec::new();
            for e in 1..=7 {
                let (a, b) = s.mesh().element(e);
                let g = s.mesh().gamma();
                for t in [0.13, 0.29, 0.52, 0.71, 0.88] {
                    let x = a + t * (b - a);
                    let side = if x < g { Side::Left } else { Side::Right };
                    if (x - g).abs() < 1e-5 {
                        continue;
                    }
                    let d = 1e-6;
                    let (_, du) = s.eval_local(&u, e, x, side, &mut scratch);
                    let (up, _) = s.eval_local(&u, e, x + d, side, &mut scratch);
                    let (um, _) = s.eval_local(&u, e, x - d, side, &mut scratch);
                    let fd = (up - um) / (2.0 * d);
                    assert!((du - fd).abs() <= 1e-6 * (1.0 + du.abs()), "p={p} e={e} x={x}");
                }
            }
        }
    }

    #[test]
    fn represent_hat() {
        // P = x on [0, 0.5], 1 - x on [0.5, 1]
        let a = [0.0, 1.0];
        let mut b = [0.0, -1.0];
        b[0] = continuity_b0(&a, &b, 0.5);
        assert_eq!(b[0], 1.0);
        let (alpha, beta) = represent_piecewise_poly(&a, &b, 0.5).unwrap();
        assert_eq!(beta[1], 0.0);
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            let p = if x <= 0.5 { horner(&a, x) } else { horner(&b, x) };
            let q = horner(&alpha, x) + reference_enrichment(x, 0.5) * horner(&beta, x);
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn represent_smooth_needs_no_enrichment() {
        let a = [0.3, -1.2, 0.7, 2.0];
        let (alpha, beta) = represent_piecewise_poly(&a, &a, 0.42).unwrap();
        assert!(beta.iter().all(|&v| v == 0.0));
        assert_eq!(alpha, a.to_vec());
    }

    #[test]
    fn represent_rejects_bad_nu() {
        assert!(represent_piecewise_poly(&[0.0, 1.0], &[0.0, 1.0], 0.0).is_err());
        assert!(represent_piecewise_poly(&[0.0, 1.0], &[0.0, 1.0], 1.0).is_err());
        assert!(represent_piecewise_poly(&[0.0, 1.0], &[0.0], 0.5).is_err());
    }

    #[test]
    fn interpolant_reproduces_global_polynomial() {
        for p in 2..=3 {
            let s = space(10, 1.0 / 3.0, p, Method::Sgfem);
            let u = |x: f64| x * (1.0 - x) * (if p >= 3 { x + 0.5 } else { 1.0 });
            let v = s.build_interface_interpolant(u, u).unwrap();
            for i in 0..=500 {
                let x = i as f64 / 500.0;
                assert!((s.eval(&v, x).unwrap().0 - u(x)).abs() < 1e-12);
            }
            assert!(v.enr.iter().all(|c| c.abs() < 1e-10));
        }
    }

    #[test]
    fn interpolant_reproduces_kinked_polynomial() {
        let g = 1.0 / std::f64::consts::PI;
        for p in 1..=3 {
            let s = space(9, g, p, Method::Sgfem);
            // continuous at g, kinked, degree p on each side, zero at 0 and 1
            let u0 = move |x: f64| x * (1.0 + 0.3 * x).powi(p as i32 - 1);
            let c = u0(g) / (1.0 - g);
            let u1 = move |x: f64| c * (1.0 - x) * (1.0 + 0.8 * (x - g)).powi(p as i32 - 1);
            let v = s.build_interface_interpolant(u0, u1).unwrap();
            for i in 0..=1000 {
                let x = i as f64 / 1000.0;
                let exact = if x < g { u0(x) } else { u1(x) };
                let got = s.eval(&v, x).unwrap().0;
                assert!((got - exact).abs() < 1e-10, "p={p} x={x}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn interpolant_checks_continuity_and_space() {
        let s = space(10, 1.0 / 3.0, 2, Method::Sgfem);
        assert!(matches!(
            s.build_interface_interpolant(|_| 1.0, |_| 0.0),
            Err(Error::DiscontinuousInput { .. })
        ));
        let f = space(10, 1.0 / 3.0, 2, Method::Fem);
        assert!(f.build_interface_interpolant(|x| x, |x| x).is_err());
    }

    proptest! {
        #[test]
        fn representation_round_trip(
            p in 1usize..=3,
            nu in 0.02f64..0.98,
            a in prop::collection::vec(-2.0f64..2.0, 4),
            b in prop::collection::vec(-2.0f64..2.0, 4),
        ) {
            let a = &a[..=p];
            let mut b = b[..=p].to_vec();
            b[0] = continuity_b0(a, &b, nu);
            let (alpha, beta) = represent_piecewise_poly(a, &b, nu).unwrap();
            prop_assert_eq!(beta[p], 0.0);
            for i in 0..=2000 {
                let x = i as f64 / 2000.0;
                let pv = if x <= nu { horner(a, x) } else { horner(&b, x) };
                let q = horner(&alpha, x) + reference_enrichment(x, nu) * horner(&beta, x);
                prop_assert!((pv - q).abs() < 1e-9);
            }
        }
    }
}
