//! Stiffness, mass and load assembly for the FEM and enriched spaces.
//!
//! Full matrices are stored densely with the FEM dofs first and the
//! enrichment dofs last, so the `FF/FE/EF/EE` blocks are contiguous views.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DMatrixView, DVector, DVectorView};

use crate::basis::{BasisValue, DofVector, EnrichedSpace};
use crate::error::{Error, Result};
use crate::mesh::Side;
use crate::quadrature::{gauss_rule, integrate_panels};

/// Shared real function of one variable.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Gauss points per panel for the matrices: exact for the piecewise degree
/// `2p + 2` integrands on the interface element.
pub fn matrix_points(p: usize) -> usize {
    p + 2
}

/// Gauss points per panel for load vectors with a non-polynomial source.
pub fn load_points(p: usize) -> usize {
    (p + 2).max(16)
}

/// Two-material diffusion problem on `(0, 1)` with interface at `gamma`.
#[derive(Clone)]
pub struct InterfaceProblem {
    pub gamma: f64,
    pub kappa0: ScalarFn,
    pub kappa1: ScalarFn,
    pub source: Option<ScalarFn>,
}

impl fmt::Debug for InterfaceProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InterfaceProblem")
            .field("gamma", &self.gamma)
            .field("has_source", &self.source.is_some())
            .finish()
    }
}

impl InterfaceProblem {
    /// `kappa = kappa0` on `(0, gamma)` and `kappa1` on `(gamma, 1)`.
    pub fn piecewise_constant(gamma: f64, kappa0: f64, kappa1: f64) -> Self {
        Self {
            gamma,
            kappa0: Arc::new(move |_| kappa0),
            kappa1: Arc::new(move |_| kappa1),
            source: None,
        }
    }

    pub fn with_source(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.source = Some(Arc::new(f));
        self
    }

    pub fn kappa(&self, x: f64, side: Side) -> f64 {
        match side {
            Side::Left => (self.kappa0)(x),
            Side::Right => (self.kappa1)(x),
        }
    }
}

/// Assembled stiffness `K`, mass `M` and optional load `F`.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    pub n_fem: usize,
    pub stiffness: DMatrix<f64>,
    pub mass: DMatrix<f64>,
    pub load: Option<DVector<f64>>,
}

impl BlockSystem {
    pub fn n_dofs(&self) -> usize {
        self.stiffness.nrows()
    }

    pub fn n_enr(&self) -> usize {
        self.n_dofs() - self.n_fem
    }

    fn block<'a>(m: &'a DMatrix<f64>, n_fem: usize, row_e: bool, col_e: bool) -> DMatrixView<'a, f64> {
        let n = m.nrows();
        let (r0, nr) = if row_e { (n_fem, n - n_fem) } else { (0, n_fem) };
        let (c0, nc) = if col_e { (n_fem, n - n_fem) } else { (0, n_fem) };
        m.view((r0, c0), (nr, nc))
    }

    pub fn k_ff(&self) -> DMatrixView<'_, f64> {
        Self::block(&self.stiffness, self.n_fem, false, false)
    }
    pub fn k_fe(&self) -> DMatrixView<'_, f64> {
        Self::block(&self.stiffness, self.n_fem, false, true)
    }
    pub fn k_ef(&self) -> DMatrixView<'_, f64> {
        Self::block(&self.stiffness, self.n_fem, true, false)
    }
    pub fn k_ee(&self) -> DMatrixView<'_, f64> {
        Self::block(&self.stiffness, self.n_fem, true, true)
    }
    pub fn m_ff(&self) -> DMatrixView<'_, f64> {
        Self::block(&self.mass, self.n_fem, false, false)
    }
    pub fn m_fe(&self) -> DMatrixView<'_, f64> {
        Self::block(&self.mass, self.n_fem, false, true)
    }
    pub fn m_ef(&self) -> DMatrixView<'_, f64> {
        Self::block(&self.mass, self.n_fem, true, false)
    }
    pub fn m_ee(&self) -> DMatrixView<'_, f64> {
        Self::block(&self.mass, self.n_fem, true, true)
    }

    pub fn f_f(&self) -> Option<DVectorView<'_, f64>> {
        self.load.as_ref().map(|f| f.rows(0, self.n_fem))
    }

    pub fn f_e(&self) -> Option<DVectorView<'_, f64>> {
        let n_enr = self.n_enr();
        self.load.as_ref().map(|f| f.rows(self.n_fem, n_enr))
    }
}

fn check_gamma(space: &EnrichedSpace, prob: &InterfaceProblem) -> Result<()> {
    let g = space.mesh().gamma();
    if (g - prob.gamma).abs() > 1e-15 {
        return Err(Error::InvalidArgument(format!(
            "space interface {g} does not match problem interface {}",
            prob.gamma
        )));
    }
    Ok(())
}

/// Assemble `K` and `M` by interface-split Gauss quadrature.
pub fn assemble(space: &EnrichedSpace, prob: &InterfaceProblem) -> Result<BlockSystem> {
    check_gamma(space, prob)?;
    let n = space.n_dofs();
    let mut k = DMatrix::<f64>::zeros(n, n);
    let mut m = DMatrix::<f64>::zeros(n, n);
    let rule = gauss_rule(matrix_points(space.p()))?;
    let mut vals: Vec<BasisValue> = Vec::new();

    for panel in space.mesh().panels() {
        for (x, w) in rule.mapped(panel.a, panel.b) {
            let kappa = prob.kappa(x, panel.side);
            if !(kappa > 0.0) {
                return Err(Error::CoefficientNotPositive { x, value: kappa });
            }
            space.basis_at(panel.element, x, panel.side, &mut vals);
            for bi in &vals {
                for bj in &vals {
                    if bi.dof > bj.dof {
                        continue;
                    }
                    k[(bi.dof, bj.dof)] += w * kappa * bi.deriv * bj.deriv;
                    m[(bi.dof, bj.dof)] += w * bi.value * bj.value;
                }
            }
        }
    }
    for j in 0..n {
        for i in 0..j {
            k[(j, i)] = k[(i, j)];
            m[(j, i)] = m[(i, j)];
        }
    }
    Ok(BlockSystem {
        n_fem: space.n_fem(),
        stiffness: k,
        mass: m,
        load: None,
    })
}

/// Load vector `F_j = (f, phi_j)` over all FEM and enrichment functions.
pub fn assemble_load(space: &EnrichedSpace, prob: &InterfaceProblem) -> Result<DVector<f64>> {
    check_gamma(space, prob)?;
    let f = prob.source.as_ref().ok_or(Error::MissingSource)?;
    let mut load = DVector::<f64>::zeros(space.n_dofs());
    let rule = gauss_rule(load_points(space.p()))?;
    let mut vals = Vec::new();
    for panel in space.mesh().panels() {
        for (x, w) in rule.mapped(panel.a, panel.b) {
            let fx = f(x);
            space.basis_at(panel.element, x, panel.side, &mut vals);
            for b in &vals {
                load[b.dof] += w * fx * b.value;
            }
        }
    }
    Ok(load)
}

/// Assemble matrices and, when the problem has a source, the load vector.
pub fn assemble_system(space: &EnrichedSpace, prob: &InterfaceProblem) -> Result<BlockSystem> {
    let mut sys = assemble(space, prob)?;
    if prob.source.is_some() {
        sys.load = Some(assemble_load(space, prob)?);
    }
    Ok(sys)
}

/// `a(u, u) / (u, u)` integrated from the discrete function itself.
///
/// Both integrands are sums of squares, so unlike `u^T K u / u^T M u` there
/// is no cancellation; used to polish eigenvalues near rounding level.
pub fn rayleigh_quotient(u: &DofVector, space: &EnrichedSpace, prob: &InterfaceProblem) -> f64 {
    let panels = space.mesh().panels();
    let n = matrix_points(space.p());
    let mut scratch = Vec::new();
    let num = integrate_panels(&panels, n, |x, panel| {
        let (_, du) = space.eval_local(u, panel.element, x, panel.side, &mut scratch);
        prob.kappa(x, panel.side) * du * du
    })
    .expect("valid rule size");
    let den = integrate_panels(&panels, n, |x, panel| {
        let (v, _) = space.eval_local(u, panel.element, x, panel.side, &mut scratch);
        v * v
    })
    .expect("valid rule size");
    num / den
}

/// Write a dense matrix in MatrixMarket coordinate format (nonzeros only).
pub fn write_matrix_market(path: &Path, a: &DMatrix<f64>) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let nnz = a.iter().filter(|v| **v != 0.0).count();
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "{} {} {}", a.nrows(), a.ncols(), nnz)?;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let v = a[(i, j)];
            if v != 0.0 {
                writeln!(out, "{} {} {:.17e}", i + 1, j + 1, v)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}
