//! X0(N) as N + 1 translates of the SL2(Z) fundamental domain
//! `F = {|x| <= 1/2, |z| >= 1}` by the coset representatives `I` and `S T^j`.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::hplane::{HPoint, MobiusTransform};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOptions {
    /// Gauss-Legendre nodes across `x in [-1/2, 1/2]`.
    pub nx: usize,
    /// Nodes along `y` per panel.
    pub ny: usize,
    /// Relative tolerance on successive refinements.
    pub tol: f64,
    /// Refinements by a factor 3/2 before giving up.
    pub max_refinements: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { nx: 40, ny: 20, tol: 1e-10, max_refinements: 4 }
    }
}

impl QuadratureOptions {
    pub fn refined(&self) -> Self {
        Self { nx: self.nx * 3 / 2, ny: self.ny * 3 / 2, ..*self }
    }
}

/// Quadrature node in `F` with its weight for `dx dy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub w: HPoint,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FundamentalCellDecomposition {
    pub level: u64,
    /// `I` followed by `S T^j`, `j = 0..N-1`, as `[a, b, c, d]`.
    pub representatives: Vec<[i64; 4]>,
    /// Nodes on the compact part `|x| <= 1/2, sqrt(1 - x^2) <= y <= 1`.
    pub nodes: Vec<Node>,
    /// Nodes on `|x| <= 1/2, 1 <= y <= y_max`, in geometric panels.
    pub cusp_nodes: Vec<Node>,
    pub y_max: f64,
}

fn rule(n: usize) -> Vec<(f64, f64)> {
    GaussLegendre::new(NonZeroUsize::new(n.max(1)).expect("nonzero")).as_node_weight_pairs().to_vec()
}

impl FundamentalCellDecomposition {
    pub fn new(level: u64, opts: &QuadratureOptions) -> Result<Self> {
        if !is_prime(level) {
            return Err(Error::LevelNotPrime(level));
        }
        let mut representatives = vec![[1, 0, 0, 1]];
        representatives.extend((0..level as i64).map(|j| [0, -1, 1, j]));
        let gx = rule(opts.nx);
        let gy = rule(opts.ny);
        let mut nodes = Vec::with_capacity(opts.nx * opts.ny);
        for &(xi, wx) in &gx {
            let x = 0.5 * xi;
            let lo = (1.0 - x * x).sqrt();
            for &(eta, wy) in &gy {
                let y = lo + 0.5 * (1.0 - lo) * (eta + 1.0);
                nodes.push(Node { w: HPoint::new(x, y)?, weight: 0.5 * wx * 0.5 * (1.0 - lo) * wy });
            }
        }
        // the cusp at 0 decays like exp(-4 pi y / N); 2^k >= 4N leaves < e^-50
        let panels = ((4.0 * level as f64).log2().ceil() as i32).max(3);
        let y_max = 2f64.powi(panels);
        let mut cusp_nodes = Vec::with_capacity(panels as usize * opts.nx * opts.ny);
        for k in 0..panels {
            let (a, b) = (2f64.powi(k), 2f64.powi(k + 1));
            for &(xi, wx) in &gx {
                for &(eta, wy) in &gy {
                    let y = 0.5 * (a + b) + 0.5 * (b - a) * eta;
                    cusp_nodes.push(Node { w: HPoint::new(0.5 * xi, y)?, weight: 0.5 * wx * 0.5 * (b - a) * wy });
                }
            }
        }
        Ok(Self { level, representatives, nodes, cusp_nodes, y_max })
    }

    /// `[SL2(Z) : Gamma0(N)] = N + 1`.
    pub fn index(&self) -> usize {
        self.representatives.len()
    }

    pub fn representative(&self, k: usize) -> MobiusTransform {
        let [a, b, c, d] = self.representatives[k];
        MobiusTransform::from_integers(a, b, c, d).expect("unimodular")
    }

    /// The point `gamma_k w` of cell `k`.
    pub fn cell_point(&self, k: usize, w: HPoint) -> Result<HPoint> {
        self.representative(k).apply(w)
    }

    /// `int_X phi d mu_hyp` for a Gamma0(N)-invariant `phi`, truncated at
    /// `y_max` in every cell. Returns the compact and cusp contributions.
    pub fn integrate_invariant<F>(&self, phi: F) -> Result<(f64, f64)>
    where
        F: Fn(HPoint) -> Result<f64> + Sync + Send,
    {
        let sum_over = |nodes: &[Node]| -> Result<f64> {
            let jobs: Vec<(usize, Node)> =
                (0..self.index()).flat_map(|k| nodes.iter().map(move |n| (k, *n))).collect();
            let vals = par::map(&jobs, |&(k, n)| -> Result<f64> {
                let z = self.cell_point(k, n.w)?;
                Ok(n.weight * phi(z)? / (n.w.y() * n.w.y()))
            });
            vals.into_iter().sum()
        };
        Ok((sum_over(&self.nodes)?, sum_over(&self.cusp_nodes)?))
    }

    /// Random point of X0(N): a uniformly chosen cell and a point of `F`
    /// below height 1.25 (uniform in x, then in y), mapped into that cell.
    pub fn sample_point<R: Rng>(&self, rng: &mut R) -> Result<HPoint> {
        let k = rng.random_range(0..self.index());
        let x: f64 = rng.random_range(-0.5..0.5);
        let lo = (1.0 - x * x).sqrt();
        let y = rng.random_range(lo..1.25);
        self.cell_point(k, HPoint::new(x, y)?)
    }

    /// A deterministic grid with `per_cell` points in each cell.
    pub fn grid(&self, per_cell: usize) -> Result<Vec<HPoint>> {
        let side = (per_cell as f64).sqrt().ceil() as usize;
        let mut pts = Vec::with_capacity(self.index() * per_cell);
        for k in 0..self.index() {
            let mut count = 0;
            'outer: for i in 0..side {
                for j in 0..side {
                    if count == per_cell {
                        break 'outer;
                    }
                    let x = -0.5 + (i as f64 + 0.5) / side as f64;
                    let lo = (1.0 - x * x).sqrt();
                    let y = lo + (1.5 - lo) * (j as f64 + 0.5) / side as f64;
                    pts.push(self.cell_point(k, HPoint::new(x, y)?)?);
                    count += 1;
                }
            }
        }
        Ok(pts)
    }

    /// Hyperbolic area of X0(N), `(N + 1) pi / 3`.
    pub fn exact_area(&self) -> f64 {
        self.index() as f64 * PI / 3.0
    }
}
