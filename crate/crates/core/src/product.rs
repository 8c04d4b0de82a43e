//! Metrics on the product `X^d`: the hyperbolic volume form, the canonical
//! volume form through its permutation expansion or a determinant, the
//! product Bergman kernel, and the volume-ratio bound.

use itertools::Itertools;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuchsian::SurfaceGeometry;
use crate::hplane::HPoint;
use crate::modforms::{bergman_kernel, CuspFormBasis, FundamentalCellDecomposition};

/// Largest `d` for the literal permutation expansion.
pub const MAX_PERMUTATION_D: usize = 4;

/// A point `(z_1, ..., z_d)` of `X^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductPoint {
    pub points: Vec<HPoint>,
}

impl ProductPoint {
    /// `gonality`, when known, must exceed `d`.
    pub fn new(points: Vec<HPoint>, gonality: Option<usize>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyProductPoint);
        }
        if let Some(g) = gonality {
            if points.len() >= g {
                return Err(Error::GonalityExceeded { d: points.len(), gonality: g });
            }
        }
        Ok(Self { points })
    }

    pub fn d(&self) -> usize {
        self.points.len()
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self { points: perm.iter().map(|&i| self.points[i]).collect() }
    }

    /// `d` independent points from the cell sampler.
    pub fn random<R: Rng>(cells: &FundamentalCellDecomposition, d: usize, rng: &mut R) -> Result<Self> {
        let points = (0..d).map(|_| cells.sample_point(rng)).collect::<Result<Vec<_>>>()?;
        Self::new(points, None)
    }
}

/// `count` reproducible random points of `X^d`.
pub fn sample_points(cells: &FundamentalCellDecomposition, d: usize, count: usize, seed: u64) -> Result<Vec<ProductPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| ProductPoint::random(cells, d, &mut rng)).collect()
}

/// Density of the rescaled product hyperbolic form against `prod dx_k dy_k`:
/// `vol^-d prod y_k^-2`.
pub fn product_hyp_density(p: &ProductPoint, geom: &SurfaceGeometry) -> Result<f64> {
    let vol = geom.volume()?;
    Ok(p.points.iter().map(|z| 1.0 / (vol * z.y() * z.y())).product())
}

/// `H[a][b] = y_a y_b sum_j f_j(z_a) conj(f_j(z_b))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelMatrix {
    pub entries: Vec<Vec<Complex64>>,
}

impl KernelMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    fn to_dmatrix(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| self.entries[i][j])
    }

    pub fn determinant(&self) -> f64 {
        self.to_dmatrix().determinant().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.to_dmatrix().symmetric_eigenvalues().iter().copied().collect()
    }
}

/// Orthonormal values at each coordinate, scaled by `y`.
fn scaled_values(basis: &CuspFormBasis, p: &ProductPoint) -> Result<Vec<Vec<Complex64>>> {
    p.points
        .iter()
        .map(|&z| Ok(basis.values(z)?.into_iter().map(|v| v * z.y()).collect()))
        .collect()
}

pub fn kernel_matrix(basis: &CuspFormBasis, p: &ProductPoint) -> Result<KernelMatrix> {
    let v = scaled_values(basis, p)?;
    let d = p.d();
    let mut entries = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    for a in 0..d {
        for b in a..d {
            let h: Complex64 = v[a].iter().zip(&v[b]).map(|(x, y)| x * y.conj()).sum();
            entries[a][b] = h;
            entries[b][a] = h.conj();
        }
        entries[a][a].im = 0.0;
    }
    Ok(KernelMatrix { entries })
}

fn sign(perm: &[usize]) -> f64 {
    let inversions = (0..perm.len()).flat_map(|i| (i + 1..perm.len()).map(move |j| (i, j))).filter(|&(i, j)| perm[i] > perm[j]).count();
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn prefactor(basis: &CuspFormBasis, geom: &SurfaceGeometry, d: usize) -> Result<f64> {
    let vol = geom.volume()?;
    let g = basis.genus as f64;
    Ok(vol.powi(d as i32) / g.powi((d * d) as i32))
}

/// Canonical over rescaled hyperbolic volume, summed literally over
/// `(j_1..j_d)` and pairs of permutations `(sigma, tau)`:
/// `sum sgn(sigma) sgn(tau) prod_k f_{j_k}(z_sigma(k)) conj(f_{j_k}(z_tau(k)))`,
/// times `prod y_k^2` and `vol^d / g^(d^2)`.
pub fn canonical_volume_ratio_perm(basis: &CuspFormBasis, geom: &SurfaceGeometry, p: &ProductPoint) -> Result<f64> {
    let d = p.d();
    if d > MAX_PERMUTATION_D {
        return Err(Error::DTooLargeForPermutationPath { d, max: MAX_PERMUTATION_D });
    }
    let v = scaled_values(basis, p)?;
    let perms: Vec<(Vec<usize>, f64)> = (0..d).permutations(d).map(|s| {
        let sg = sign(&s);
        (s, sg)
    }).collect();
    let mut total = Complex64::new(0.0, 0.0);
    for js in (0..d).map(|_| 0..basis.genus).multi_cartesian_product() {
        for (sigma, s_sigma) in &perms {
            for (tau, s_tau) in &perms {
                let mut term = Complex64::new(s_sigma * s_tau, 0.0);
                for (k, &j) in js.iter().enumerate() {
                    term *= v[sigma[k]][j] * v[tau[k]][j].conj();
                }
                total += term;
            }
        }
    }
    Ok(prefactor(basis, geom, d)? * total.re.abs())
}

/// The same ratio via `sum = d! det H`.
pub fn canonical_volume_ratio_det(basis: &CuspFormBasis, geom: &SurfaceGeometry, p: &ProductPoint) -> Result<f64> {
    let d = p.d();
    let factorial: f64 = (1..=d).map(|k| k as f64).product();
    let det = kernel_matrix(basis, p)?.determinant();
    Ok(prefactor(basis, geom, d)? * factorial * det.abs())
}

/// Hadamard's bound `det H <= prod H_aa` carried through the ratio:
/// `vol^d d! / g^(d^2) prod B_X(z_a)`. The natural scale for comparing
/// ratios, which vanish identically once `d > g`.
pub fn hadamard_ratio_bound(basis: &CuspFormBasis, geom: &SurfaceGeometry, p: &ProductPoint) -> Result<f64> {
    let factorial: f64 = (1..=p.d()).map(|k| k as f64).product();
    Ok(prefactor(basis, geom, p.d())? * factorial * product_bergman(basis, p)?)
}

/// `(d!)^2 (vol B / g^(d-1))^d`.
pub fn thm32_bound(d: usize, geom: &SurfaceGeometry, b: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::EmptyProductPoint);
    }
    if !(b > 0.0) {
        return Err(Error::Config(format!("kernel bound must be positive, got {b}")));
    }
    let vol = geom.volume()?;
    let g = geom.genus_or_err()? as f64;
    let factorial: f64 = (1..=d).map(|k| k as f64).product();
    Ok(factorial * factorial * (vol * b / g.powi(d as i32 - 1)).powi(d as i32))
}

/// `prod_i B_X(z_i)`, the product kernel on the diagonal.
pub fn product_bergman(basis: &CuspFormBasis, p: &ProductPoint) -> Result<f64> {
    p.points.iter().map(|&z| bergman_kernel(basis, z)).product()
}

/// Least-squares slope of `log ratio` against `log separation` as the second
/// coordinate approaches the first along direction `dir`.
pub fn merge_exponent(
    basis: &CuspFormBasis,
    geom: &SurfaceGeometry,
    z: HPoint,
    dir: Complex64,
    separations: &[f64],
) -> Result<f64> {
    let mut pts = Vec::with_capacity(separations.len());
    for &s in separations {
        let w = HPoint::from_complex(z.to_complex() + dir * s)?;
        let r = canonical_volume_ratio_det(basis, geom, &ProductPoint::new(vec![z, w], None)?)?;
        pts.push((s.ln(), r.ln()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
