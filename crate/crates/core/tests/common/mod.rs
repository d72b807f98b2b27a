//! Invariant checks shared by the integration tests and the acceptance
//! harness. Each check returns the worst measured ratio against its limit
//! so callers can report it.

#![allow(dead_code)]

use nalgebra::DVector;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use sgfem1d::analytic::{self, ExactFunction};
use sgfem1d::assembly::{self, InterfaceProblem};
use sgfem1d::basis::{lagrange_shape, DofVector, EnrichedSpace, Method};
use sgfem1d::densela;
use sgfem1d::errors;
use sgfem1d::mesh::{Mesh1D, Side};

pub const DEGREES: [usize; 3] = [1, 2, 3];
pub const LADDER: [usize; 5] = [10, 20, 40, 80, 160];
pub const METHODS: [Method; 2] = [Method::Fem, Method::Sgfem];

pub const EX1: (f64, f64) = (1.0 / 3.0, 4.0);
pub const EX2: (f64, f64) = (std::f64::consts::FRAC_1_PI, std::f64::consts::E * std::f64::consts::E);

pub fn space(n: usize, gamma: f64, p: usize, method: Method) -> EnrichedSpace {
    EnrichedSpace::new(Mesh1D::uniform(n, gamma).unwrap(), p, method).unwrap()
}

pub fn random_dofs(space: &EnrichedSpace, rng: &mut StdRng) -> DofVector {
    DofVector {
        fem: (0..space.n_fem()).map(|_| rng.random_range(-1.0..1.0)).collect(),
        enr: (0..space.n_enr()).map(|_| rng.random_range(-1.0..1.0)).collect(),
    }
}

/// Assembled matrices are exactly symmetric and both factor by Cholesky.
pub fn system_is_symmetric_spd(space: &EnrichedSpace, prob: &InterfaceProblem) -> bool {
    let sys = assembly::assemble(space, prob).unwrap();
    sys.stiffness == sys.stiffness.transpose()
        && sys.mass == sys.mass.transpose()
        && densela::cholesky(&sys.stiffness).is_ok()
        && densela::cholesky(&sys.mass).is_ok()
}

/// Largest `|a(u - u_h, v)| / ||F||` over `trials` random discrete `v` for
/// the manufactured source problem.
pub fn galerkin_orthogonality(p: usize, n: usize, method: Method, trials: usize, seed: u64) -> f64 {
    let (prob, exact) = analytic::manufactured_problem();
    let sp = space(n, prob.gamma, p, method);
    let sys = assembly::assemble_system(&sp, &prob).unwrap();
    let f = sys.load.as_ref().unwrap();
    let x = densela::solve_spd(&sys.stiffness, f).unwrap();
    let uh = DofVector::from_full(x.as_slice(), sp.n_fem());
    let mut rng = StdRng::seed_from_u64(seed);
    (0..trials)
        .map(|_| {
            let v = random_dofs(&sp, &mut rng);
            errors::energy_residual(&uh, &v, &sp, &exact, &prob, 16).abs() / f.norm()
        })
        .fold(0.0, f64::max)
}

/// Worst-case measurements for one eigenvalue cell.
#[derive(Debug, Default, Clone, Copy)]
pub struct EigenCheck {
    /// `max ||K v - lambda M v|| / ||K||_max`.
    pub residual: f64,
    /// `max |v^T M v - 1|`.
    pub normalization: f64,
    /// `max |v_i^T M v_j|`, `i != j`.
    pub orthogonality: f64,
    /// `max |lambda - v^T K v / v^T M v| / lambda`.
    pub rayleigh: f64,
    /// `max |a(e, e) - (lambda ||e||^2 + lambda_h - lambda)| / a(e, e)`.
    pub pythagorean: f64,
}

impl EigenCheck {
    pub fn worst(self, other: EigenCheck) -> EigenCheck {
        EigenCheck {
            residual: self.residual.max(other.residual),
            normalization: self.normalization.max(other.normalization),
            orthogonality: self.orthogonality.max(other.orthogonality),
            rayleigh: self.rayleigh.max(other.rayleigh),
            pythagorean: self.pythagorean.max(other.pythagorean),
        }
    }

    pub fn within_limits(&self) -> bool {
        self.residual <= 1e-8
            && self.normalization <= 1e-10
            && self.orthogonality <= 1e-8
            && self.rayleigh <= 1e-9
            && self.pythagorean <= 1e-6
    }
}

fn max_abs(m: &nalgebra::DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.abs()))
}

/// Residual, normalization and identity checks on the first `count`
/// eigenpairs of one cell. The Pythagorean identity is evaluated only for
/// pairs whose energy error sits well above the rounding level of
/// `lambda_h - lambda`.
pub fn eigen_cell(gamma: f64, eta: f64, p: usize, n: usize, method: Method, count: usize) -> EigenCheck {
    let prob = InterfaceProblem::piecewise_constant(gamma, 1.0, eta);
    let sp = space(n, gamma, p, method);
    let sys = assembly::assemble(&sp, &prob).unwrap();
    let sol = densela::generalized_eigs(&sys.stiffness, &sys.mass, count).unwrap();
    let pairs = analytic::solve_matching_system(gamma, eta, count).unwrap();
    let kmax = max_abs(&sys.stiffness);
    let mut c = EigenCheck::default();
    for i in 0..count {
        let v: &DVector<f64> = &sol.vectors[i];
        let lam = sol.values[i];
        let kv = &sys.stiffness * v;
        let mv = &sys.mass * v;
        c.residual = c.residual.max((&kv - lam * &mv).norm() / kmax);
        c.normalization = c.normalization.max((v.dot(&mv) - 1.0).abs());
        for j in 0..i {
            c.orthogonality = c.orthogonality.max(sol.vectors[j].dot(&mv).abs());
        }
        c.rayleigh = c.rayleigh.max((lam - v.dot(&kv) / v.dot(&mv)).abs() / lam);

        let exact: ExactFunction = analytic::exact_eigenfunction(&pairs[i], gamma, eta);
        let raw = sol.dof_vector(i, sp.n_fem());
        let Ok(uh) = errors::align_eigenfunction(&raw, &sp, &exact) else { continue };
        let lam_h = assembly::rayleigh_quotient(&uh, &sp, &prob);
        let lam_ex = pairs[i].lambda;
        let energy = errors::energy_error_sq(&uh, &sp, &exact, &prob, 16);
        if energy < 1e-6 * lam_ex {
            continue;
        }
        let l2 = errors::l2_error_with(&uh, &sp, &exact, 16);
        let rhs = lam_ex * l2 * l2 + lam_h - lam_ex;
        c.pythagorean = c.pythagorean.max((energy - rhs).abs() / energy);
    }
    c
}

/// Lagrange shape values sum to one and slopes to zero on random points.
pub fn partition_of_unity(p: usize, samples: usize, seed: u64) -> f64 {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut vals = vec![0.0; p + 1];
    let mut ders = vec![0.0; p + 1];
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        lagrange_shape(p, rng.random_range(0.0..1.0), &mut vals, &mut ders);
        worst = worst.max((vals.iter().sum::<f64>() - 1.0).abs());
        worst = worst.max(ders.iter().sum::<f64>().abs() / (p * p) as f64);
    }
    worst
}

/// Worst relative gap between analytic slopes of a random discrete function
/// and central differences, sampled away from nodes and the interface.
pub fn derivative_vs_fd(p: usize, n: usize, gamma: f64, method: Method, seed: u64) -> f64 {
    let sp = space(n, gamma, p, method);
    let mut rng = StdRng::seed_from_u64(seed);
    let u = random_dofs(&sp, &mut rng);
    let mesh = sp.mesh();
    let h = mesh.h();
    let step = 1e-6 * h;
    let mut scratch = Vec::new();
    let mut worst: f64 = 0.0;
    for e in 1..=mesh.n_elements() {
        let (a, b) = mesh.element(e);
        for _ in 0..5 {
            let x = rng.random_range(a + 0.05 * h..b - 0.05 * h);
            if (x - gamma).abs() < 0.05 * h {
                continue;
            }
            let side = if x < gamma { Side::Left } else { Side::Right };
            let (_, d) = sp.eval_local(&u, e, x, side, &mut scratch);
            let (up, _) = sp.eval_local(&u, e, x + step, side, &mut scratch);
            let (um, _) = sp.eval_local(&u, e, x - step, side, &mut scratch);
            let fd = (up - um) / (2.0 * step);
            worst = worst.max((d - fd).abs() / (1.0 + d.abs()) * h);
        }
    }
    worst
}
