//! Error norms against exact solutions, eigenfunction alignment and
//! convergence-rate fitting.

use crate::analytic::ExactFunction;
use crate::assembly::InterfaceProblem;
use crate::basis::{DofVector, EnrichedSpace, Method};
use crate::error::{Error, Result};
use crate::quadrature::integrate_panels;

/// Errors below this are rounding noise and are left out of rate fits.
pub const MACHINE_FLOOR: f64 = 5e-13;

/// Gauss points per panel for error norms of degree-p solutions.
pub fn norm_points(p: usize) -> usize {
    p + 4
}

/// One measured error.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRecord {
    pub n: usize,
    pub p: usize,
    pub method: Method,
    pub quantity: String,
    pub value: f64,
}

/// `|u - u_h|_{H^1}` with an `n`-point rule per panel.
pub fn h1_semi_error_with(uh: &DofVector, space: &EnrichedSpace, exact: &ExactFunction, n: usize) -> f64 {
    let mut scratch = Vec::new();
    integrate_panels(&space.mesh().panels(), n, |x, panel| {
        let (_, duh) = space.eval_local(uh, panel.element, x, panel.side, &mut scratch);
        (exact.deriv(x, panel.side) - duh).powi(2)
    })
    .expect("valid rule size")
    .sqrt()
}

/// `|u - u_h|_{H^1}` with `p + 4` points per panel.
pub fn h1_semi_error(uh: &DofVector, space: &EnrichedSpace, exact: &ExactFunction) -> f64 {
    h1_semi_error_with(uh, space, exact, norm_points(space.p()))
}

/// `||u - u_h||_{L^2}` with an `n`-point rule per panel.
pub fn l2_error_with(uh: &DofVector, space: &EnrichedSpace, exact: &ExactFunction, n: usize) -> f64 {
    let mut scratch = Vec::new();
    integrate_panels(&space.mesh().panels(), n, |x, panel| {
        let (uhx, _) = space.eval_local(uh, panel.element, x, panel.side, &mut scratch);
        (exact.value(x, panel.side) - uhx).powi(2)
    })
    .expect("valid rule size")
    .sqrt()
}

/// `||u - u_h||_{L^2}` with `p + 4` points per panel.
pub fn l2_error(uh: &DofVector, space: &EnrichedSpace, exact: &ExactFunction) -> f64 {
    l2_error_with(uh, space, exact, norm_points(space.p()))
}

/// L2 norm of the difference of two discrete functions in the same space.
pub fn l2_distance(u: &DofVector, v: &DofVector, space: &EnrichedSpace) -> f64 {
    let mut scratch = Vec::new();
    integrate_panels(&space.mesh().panels(), norm_points(space.p()), |x, panel| {
        let (a, _) = space.eval_local(u, panel.element, x, panel.side, &mut scratch);
        let (b, _) = space.eval_local(v, panel.element, x, panel.side, &mut scratch);
        (a - b).powi(2)
    })
    .expect("valid rule size")
    .sqrt()
}

/// `(u_h, u)_{L^2}`.
pub fn l2_inner(uh: &DofVector, space: &EnrichedSpace, exact: &ExactFunction, n: usize) -> f64 {
    let mut scratch = Vec::new();
    integrate_panels(&space.mesh().panels(), n, |x, panel| {
        let (uhx, _) = space.eval_local(uh, panel.element, x, panel.side, &mut scratch);
        uhx * exact.value(x, panel.side)
    })
    .expect("valid rule size")
}

/// `a(u - u_h, v) = (kappa (u - u_h)', v')` with `v` a discrete function.
pub fn energy_residual(
    uh: &DofVector,
    v: &DofVector,
    space: &EnrichedSpace,
    exact: &ExactFunction,
    prob: &InterfaceProblem,
    n: usize,
) -> f64 {
    let mut scratch = Vec::new();
    integrate_panels(&space.mesh().panels(), n, |x, panel| {
        let (_, duh) = space.eval_local(uh, panel.element, x, panel.side, &mut scratch);
        let (_, dv) = space.eval_local(v, panel.element, x, panel.side, &mut scratch);
        prob.kappa(x, panel.side) * (exact.deriv(x, panel.side) - duh) * dv
    })
    .expect("valid rule size")
}

/// `a(u - u_h, u - u_h)`.
pub fn energy_error_sq(
    uh: &DofVector,
    space: &EnrichedSpace,
    exact: &ExactFunction,
    prob: &InterfaceProblem,
    n: usize,
) -> f64 {
    let mut scratch = Vec::new();
    integrate_panels(&space.mesh().panels(), n, |x, panel| {
        let (_, duh) = space.eval_local(uh, panel.element, x, panel.side, &mut scratch);
        prob.kappa(x, panel.side) * (exact.deriv(x, panel.side) - duh).powi(2)
    })
    .expect("valid rule size")
}

/// Flip the sign of `uh` so that `(u_h, u) > 0`.
pub fn align_eigenfunction(uh: &DofVector, space: &EnrichedSpace, exact: &ExactFunction) -> Result<DofVector> {
    let inner = l2_inner(uh, space, exact, norm_points(space.p()));
    if inner.abs() < 0.1 {
        return Err(Error::DegenerateAlignment { inner });
    }
    Ok(if inner < 0.0 { uh.scaled(-1.0) } else { uh.clone() })
}

/// `|lambda_h - lambda| / lambda`.
pub fn relative_eigenvalue_error(lambda_h: f64, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("exact eigenvalue must be positive, got {lambda}")));
    }
    Ok((lambda_h - lambda).abs() / lambda)
}

/// Least-squares slope of `log(error)` against `log(1/N)`. Records below
/// [`MACHINE_FLOOR`] are ignored; at least three must remain.
pub fn fit_rate(records: &[ErrorRecord]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.value >= MACHINE_FLOOR && r.value.is_finite())
        .map(|r| (-(r.n as f64).ln(), r.value.ln()))
        .collect();
    let mut ns: Vec<usize> = records
        .iter()
        .filter(|r| r.value >= MACHINE_FLOOR && r.value.is_finite())
        .map(|r| r.n)
        .collect();
    ns.sort_unstable();
    ns.dedup();
    if pts.len() < 3 || ns.len() < 3 {
        return Err(Error::InsufficientData { usable: ns.len() });
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
