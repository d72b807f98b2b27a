//! Exact reference solutions for piecewise-constant coefficients
//! `kappa = 1` on `(0, gamma)` and `kappa = eta` on `(gamma, 1)`.
//!
//! Eigenfunctions have the form `u0 = sin(omega0 x)` on `[0, gamma]` and
//! `u1 = d sin(omega1 x - omega1)` on `[gamma, 1]` with `omega0 = rho omega1`,
//! `rho = sqrt(eta)` and `lambda = eta omega1^2`. Continuity of `u` and of the
//! flux `kappa u'` at `gamma` give
//!
//! ```text
//! sin(rho omega1 gamma) = d sin(omega1 gamma - omega1)
//! cos(rho omega1 gamma) = d rho cos(omega1 gamma - omega1)
//! ```
//!
//! and eliminating `d` leaves a scalar equation in `omega1` whose roots are
//! bracketed on a fine grid and refined by bisection.

use std::f64::consts::PI;

use crate::assembly::InterfaceProblem;
use crate::error::{Error, Result};
use crate::mesh::Side;
use crate::quadrature::gauss_rule;

/// One exact eigenpair, `index` is the 1-based rank in ascending order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactEigenpair {
    pub omega1: f64,
    pub d: f64,
    pub lambda: f64,
    pub index: usize,
}

impl ExactEigenpair {
    /// Residuals of the two matching conditions.
    pub fn matching_residuals(&self, gamma: f64, eta: f64) -> (f64, f64) {
        let rho = eta.sqrt();
        let w = self.omega1;
        let r0 = (rho * w * gamma).sin() - self.d * (w * gamma - w).sin();
        let r1 = (rho * w * gamma).cos() - self.d * rho * (w * gamma - w).cos();
        (r0, r1)
    }
}

/// Scalar dispersion function whose positive roots are the `omega1`.
pub fn dispersion(omega1: f64, gamma: f64, rho: f64) -> f64 {
    let t = omega1 * (gamma - 1.0);
    rho * (rho * omega1 * gamma).sin() * t.cos() - (rho * omega1 * gamma).cos() * t.sin()
}

/// Grid spacing used to bracket roots of [`dispersion`].
pub fn scan_step(gamma: f64, eta: f64) -> f64 {
    let rho = eta.sqrt();
    (PI / (8.0 * rho)).min(PI / 8.0) / gamma.max(1.0 - gamma)
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut flo = f(lo);
    while hi - lo > 1e-14 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Amplitude `d` of the right branch for a root `omega1`, from whichever
/// matching condition has the better-conditioned denominator.
fn amplitude(omega1: f64, gamma: f64, rho: f64) -> f64 {
    let t = omega1 * (gamma - 1.0);
    let sin_den = t.sin();
    let cos_den = rho * t.cos();
    if sin_den.abs() >= cos_den.abs() {
        (rho * omega1 * gamma).sin() / sin_den
    } else {
        (rho * omega1 * gamma).cos() / cos_den
    }
}

/// The `count` smallest exact eigenpairs for interface `gamma` and contrast `eta`.
pub fn solve_matching_system(gamma: f64, eta: f64, count: usize) -> Result<Vec<ExactEigenpair>> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidArgument(format!("gamma must lie in (0, 1), got {gamma}")));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidArgument(format!("eta must be positive, got {eta}")));
    }
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let rho = eta.sqrt();
    let step = scan_step(gamma, eta);
    let f = |w: f64| dispersion(w, gamma, rho);

    let mut roots = Vec::with_capacity(count);
    // omega1 = 0 is a trivial root (u = 0); F > 0 just to its right.
    let mut lo = step;
    let mut flo = f(lo);
    while roots.len() < count {
        let hi = lo + step;
        let fhi = f(hi);
        if flo == 0.0 {
            roots.push(lo);
        } else if fhi != 0.0 && (flo > 0.0) != (fhi > 0.0) {
            roots.push(bisect(lo, hi, f));
        }
        lo = hi;
        flo = fhi;
    }

    Ok(roots
        .into_iter()
        .enumerate()
        .map(|(i, omega1)| ExactEigenpair {
            omega1,
            d: amplitude(omega1, gamma, rho),
            lambda: eta * omega1 * omega1,
            index: i + 1,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    Eigen { omega0: f64, omega1: f64, d: f64 },
    Manufactured,
}

/// Piecewise-smooth exact solution with one-sided evaluation at `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactFunction {
    gamma: f64,
    shape: Shape,
    scale: f64,
}

impl ExactFunction {
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Multiplier applied to the raw formula (the L2 normalization for
    /// eigenfunctions, 1 otherwise).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn value(&self, x: f64, side: Side) -> f64 {
        let raw = match (self.shape, side) {
            (Shape::Eigen { omega0, .. }, Side::Left) => (omega0 * x).sin(),
            (Shape::Eigen { omega1, d, .. }, Side::Right) => d * (omega1 * (x - 1.0)).sin(),
            (Shape::Manufactured, Side::Left) => (6.0 * PI * x).sin(),
            (Shape::Manufactured, Side::Right) => 0.5 * (3.0 * PI * (x - 1.0)).sin(),
        };
        self.scale * raw
    }

    pub fn deriv(&self, x: f64, side: Side) -> f64 {
        let raw = match (self.shape, side) {
            (Shape::Eigen { omega0, .. }, Side::Left) => omega0 * (omega0 * x).cos(),
            (Shape::Eigen { omega1, d, .. }, Side::Right) => d * omega1 * (omega1 * (x - 1.0)).cos(),
            (Shape::Manufactured, Side::Left) => 6.0 * PI * (6.0 * PI * x).cos(),
            (Shape::Manufactured, Side::Right) => 1.5 * PI * (3.0 * PI * (x - 1.0)).cos(),
        };
        self.scale * raw
    }

    pub fn side_of(&self, x: f64) -> Side {
        if x < self.gamma {
            Side::Left
        } else {
            Side::Right
        }
    }

    /// Value using the left branch on `[0, gamma)` and the right branch on `[gamma, 1]`.
    pub fn eval(&self, x: f64) -> f64 {
        self.value(x, self.side_of(x))
    }

    fn raw_l2_norm_sq(&self) -> f64 {
        let rule = gauss_rule(16).expect("16-point rule");
        let panels = 16;
        let mut total = 0.0;
        for (a, b, side) in [(0.0, self.gamma, Side::Left), (self.gamma, 1.0, Side::Right)] {
            let h = (b - a) / panels as f64;
            for k in 0..panels {
                let lo = a + k as f64 * h;
                total += rule.integrate(lo, lo + h, |x| self.value(x, side).powi(2));
            }
        }
        total / (self.scale * self.scale)
    }
}

/// Exact eigenfunction for `pair`, scaled to unit L2 norm on `(0, 1)`.
pub fn exact_eigenfunction(pair: &ExactEigenpair, gamma: f64, eta: f64) -> ExactFunction {
    let mut f = ExactFunction {
        gamma,
        shape: Shape::Eigen {
            omega0: eta.sqrt() * pair.omega1,
            omega1: pair.omega1,
            d: pair.d,
        },
        scale: 1.0,
    };
    f.scale = 1.0 / f.raw_l2_norm_sq().sqrt();
    f
}

/// Interface location of the manufactured benchmark.
pub const MANUFACTURED_GAMMA: f64 = 1.0 / 3.0;

/// Manufactured source benchmark: `u = sin(6 pi x)` on `[0, 1/3]`,
/// `u = sin(3 pi (x - 1)) / 2` on `[1/3, 1]`, `kappa = 1 | 4`, and
/// `f = -(kappa u')'`.
pub fn manufactured_source() -> (ExactFunction, impl Fn(f64) -> f64 + Send + Sync + Clone) {
    let u = ExactFunction {
        gamma: MANUFACTURED_GAMMA,
        shape: Shape::Manufactured,
        scale: 1.0,
    };
    let f = |x: f64| {
        if x < MANUFACTURED_GAMMA {
            36.0 * PI * PI * (6.0 * PI * x).sin()
        } else {
            18.0 * PI * PI * (3.0 * PI * (x - 1.0)).sin()
        }
    };
    (u, f)
}

/// Manufactured benchmark as a ready-to-assemble problem with its exact solution.
pub fn manufactured_problem() -> (InterfaceProblem, ExactFunction) {
    let (u, f) = manufactured_source();
    let prob = InterfaceProblem::piecewise_constant(MANUFACTURED_GAMMA, 1.0, 4.0).with_source(f);
    (prob, u)
}
