//! Uniform partitions of the unit interval with a marked interface element.

use crate::error::{Error, Result};

/// Absolute distance below which the interface is treated as sitting on a node.
pub const FITTING_TOL: f64 = 1e-12;

/// Partition `0 = x_0 < x_1 < ... < x_N = 1` of the unit interval.
///
/// Element indices are 1-based: element `j` is `[x_{j-1}, x_j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    nodes: Vec<f64>,
    h: f64,
    gamma: f64,
    r: usize,
    fitting: bool,
}

impl Mesh1D {
    /// Uniform mesh with `n` elements and interface at `gamma`.
    ///
    /// `r` is the element with `x_{r-1} < gamma < x_r`. When `gamma` sits on a
    /// node (within [`FITTING_TOL`]) the mesh is fitting and `r` is the element
    /// to the left of that node.
    pub fn uniform(n: usize, gamma: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "element count must be at least 2, got {n}"
            )));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "interface must lie in (0, 1), got {gamma}"
            )));
        }
        let nf = n as f64;
        let mut nodes: Vec<f64> = (0..=n).map(|j| j as f64 / nf).collect();
        nodes[0] = 0.0;
        nodes[n] = 1.0;

        let (nearest, dist) = nodes
            .iter()
            .enumerate()
            .map(|(j, &x)| (j, (x - gamma).abs()))
            .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
        let fitting = dist < FITTING_TOL;
        let r = if fitting {
            // gamma is interior so the nearest node is never x_0
            nearest.max(1)
        } else {
            let mut r = ((gamma * nf).floor() as usize + 1).clamp(1, n);
            while r > 1 && gamma <= nodes[r - 1] {
                r -= 1;
            }
            while r < n && gamma >= nodes[r] {
                r += 1;
            }
            r
        };

        Ok(Self {
            nodes,
            h: 1.0 / nf,
            gamma,
            r,
            fitting,
        })
    }

    pub fn n_elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Largest element size.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// 1-based index of the interface element.
    pub fn interface_element(&self) -> usize {
        self.r
    }

    pub fn is_fitting(&self) -> bool {
        self.fitting
    }

    /// End points of element `j` (1-based).
    pub fn element(&self, j: usize) -> (f64, f64) {
        (self.nodes[j - 1], self.nodes[j])
    }

    pub fn element_len(&self, j: usize) -> f64 {
        self.nodes[j] - self.nodes[j - 1]
    }

    /// Element containing `x`. Shared nodes belong to the element on their
    /// left, except `x = 0` which belongs to element 1.
    pub fn locate(&self, x: f64) -> Result<usize> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain(x));
        }
        let n = self.n_elements();
        let mut j = ((x * n as f64).ceil() as usize).clamp(1, n);
        while j > 1 && x <= self.nodes[j - 1] {
            j -= 1;
        }
        while j < n && x > self.nodes[j] {
            j += 1;
        }
        Ok(j)
    }

    /// Which side of the interface element `j` lies on. Only meaningful for
    /// elements other than the (non-fitting) interface element.
    pub fn element_side(&self, j: usize) -> Side {
        if j <= self.r && (self.fitting || j < self.r) {
            Side::Left
        } else {
            Side::Right
        }
    }

    /// Quadrature panels: every element, with the interface element split at
    /// `gamma` on non-fitting meshes.
    pub fn panels(&self) -> Vec<Panel> {
        let n = self.n_elements();
        let mut out = Vec::with_capacity(n + 1);
        for j in 1..=n {
            let (a, b) = self.element(j);
            if j == self.r && !self.fitting {
                out.push(Panel { element: j, a, b: self.gamma, side: Side::Left });
                out.push(Panel { element: j, a: self.gamma, b, side: Side::Right });
            } else {
                out.push(Panel { element: j, a, b, side: self.element_side(j) });
            }
        }
        out
    }
}

/// Subdomain label: `Left` is `(0, gamma)`, `Right` is `(gamma, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Integration panel `[a, b]` inside element `element`, entirely on one side
/// of the interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub element: usize,
    pub a: f64,
    pub b: f64,
    pub side: Side,
}
