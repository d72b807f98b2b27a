//! Gauss-Legendre rules and interface-split panel integration.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mesh::{Mesh1D, Panel};

pub const MAX_POINTS: usize = 30;

/// Gauss-Legendre rule on the reference interval `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.points
            .iter()
            .zip(&self.weights)
            .map(move |(&t, &w)| (mid + half * t, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Legendre polynomial `P_n(x)` and its derivative by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// `n`-point Gauss-Legendre rule, nodes from Newton iteration on `P_n`.
pub fn gauss_rule(n: usize) -> Result<QuadRule> {
    if !(1..=MAX_POINTS).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "Gauss rule size must be in 1..={MAX_POINTS}, got {n}"
        )));
    }
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess for the i-th largest root
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        points[i] = -x;
        points[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        let mid = n / 2;
        points[mid] = 0.0;
        let (_, dp) = legendre(n, 0.0);
        weights[mid] = 2.0 / (dp * dp);
    }
    Ok(QuadRule { points, weights })
}

/// Integrate over a list of panels with an `n`-point rule on each.
pub fn integrate_panels(
    panels: &[Panel],
    n: usize,
    mut f: impl FnMut(f64, &Panel) -> f64,
) -> Result<f64> {
    let rule = gauss_rule(n)?;
    let mut total = 0.0;
    for panel in panels {
        for (x, w) in rule.mapped(panel.a, panel.b) {
            total += w * f(x, panel);
        }
    }
    Ok(total)
}

/// Integrate `f` over `[0, 1]` panel by panel, splitting the interface element
/// at `gamma` so that integrands with a kink there are smooth on every panel.
pub fn integrate_piecewise(f: impl Fn(f64) -> f64, mesh: &Mesh1D, n: usize) -> Result<f64> {
    integrate_panels(&mesh.panels(), n, |x, _| f(x))
}
