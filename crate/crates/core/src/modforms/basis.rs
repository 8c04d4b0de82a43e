use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cells::{FundamentalCellDecomposition, QuadratureOptions};
use super::{direct_sum_many, evaluate_many, Evaluation, QExpansion, DIRECT_TOL};
use crate::arith::genus_x0_prime;
use crate::error::{Error, Result};
use crate::fuchsian::SurfaceGeometry;
use crate::hplane::HPoint;
use crate::ingest::NewformRecord;
use crate::par;

type CMatrix = Vec<Vec<Complex64>>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Petersson Gram matrix `<f_a, f_b> = int_X f_a conj(f_b) dx dy`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub matrix: CMatrix,
    /// Entrywise difference between the last two refinements.
    pub entry_errors: Vec<Vec<f64>>,
    pub max_error: f64,
    pub quadrature: QuadratureOptions,
}

impl GramReport {
    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    /// Largest diagonal entry, the natural scale for tolerances.
    pub fn scale(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[i][i].re).fold(0.0, f64::max)
    }
}

fn to_dmatrix(m: &CMatrix) -> DMatrix<Complex64> {
    let n = m.len();
    DMatrix::from_fn(n, n, |i, j| m[i][j])
}

fn from_dmatrix(m: &DMatrix<Complex64>) -> CMatrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn check_level(forms: &[QExpansion]) -> Result<u64> {
    let level = forms.first().ok_or_else(|| Error::Config("no forms given".into()))?.level;
    if let Some(f) = forms.iter().find(|f| f.level != level) {
        return Err(Error::LevelMismatch(level, f.level));
    }
    Ok(level)
}

/// Gram matrix at one resolution.
///
/// The cell `I F` contributes `int_F f conj(h)`. Since `f | S = (eps / N) f(z / N)`,
/// the cells `S T^j F` together contribute
/// `(eps_f eps_h / N^2) sum_j int_F f((w+j)/N) conj(h((w+j)/N))`.
/// Above `y = 1` both families are integrated in closed form.
fn gram_once(forms: &[QExpansion], cells: &FundamentalCellDecomposition) -> Result<CMatrix> {
    let g = forms.len();
    let level = cells.level;
    let n = level as f64;
    let coeffs: Vec<&[Complex64]> = forms.iter().map(|f| f.coefficients.as_slice()).collect();
    let outer = |acc: &mut [Complex64], vals: &[Evaluation], s: f64| {
        for a in 0..g {
            for b in a..g {
                acc[a * g + b] += s * vals[a].value * vals[b].value.conj();
            }
        }
    };
    let per_node = par::map(&cells.nodes, |node| -> Result<Vec<Complex64>> {
        let w = node.w.to_complex();
        // [cell at infinity | cells at zero]
        let mut acc = vec![ZERO; 2 * g * g];
        let (inf, zero) = acc.split_at_mut(g * g);
        outer(inf, &direct_sum_many(&coeffs, w, DIRECT_TOL)?, node.weight);
        for j in 0..level {
            outer(zero, &direct_sum_many(&coeffs, (w + j as f64) / n, DIRECT_TOL)?, node.weight / (n * n));
        }
        Ok(acc)
    });
    let mut acc = vec![ZERO; 2 * g * g];
    for v in per_node {
        for (s, x) in acc.iter_mut().zip(v?) {
            *s += x;
        }
    }
    let mut m = vec![vec![ZERO; g]; g];
    for a in 0..g {
        for b in a..g {
            let eps = (forms[a].atkin_lehner * forms[b].atkin_lehner) as f64;
            let mut upper_inf = ZERO;
            let mut upper_zero = ZERO;
            for (k, (x, y)) in forms[a].coefficients.iter().zip(&forms[b].coefficients).enumerate() {
                let nn = (k + 1) as f64;
                let p = x * y.conj() / (4.0 * PI * nn);
                upper_inf += p * (-4.0 * PI * nn).exp();
                upper_zero += p * (-4.0 * PI * nn / n).exp();
            }
            let total = acc[a * g + b] + upper_inf + eps * (acc[g * g + a * g + b] + upper_zero);
            m[a][b] = total;
            m[b][a] = total.conj();
        }
        m[a][a].im = 0.0;
    }
    Ok(m)
}

/// Petersson Gram matrix, refined until two successive resolutions agree to
/// `opts.tol` relative to the largest norm.
pub fn petersson_gram(forms: &[QExpansion], opts: &QuadratureOptions) -> Result<GramReport> {
    let level = check_level(forms)?;
    let mut q = *opts;
    let mut prev = gram_once(forms, &FundamentalCellDecomposition::new(level, &q)?)?;
    let mut last_err = f64::INFINITY;
    for _ in 0..opts.max_refinements.max(1) {
        let next_q = q.refined();
        let next = gram_once(forms, &FundamentalCellDecomposition::new(level, &next_q)?)?;
        let entry_errors: Vec<Vec<f64>> =
            next.iter().zip(&prev).map(|(r, s)| r.iter().zip(s).map(|(x, y)| (x - y).norm()).collect()).collect();
        let max_error = entry_errors.iter().flatten().copied().fold(0.0, f64::max);
        let scale = (0..next.len()).map(|i| next[i][i].re).fold(0.0, f64::max);
        if max_error <= opts.tol * scale {
            return Ok(GramReport { matrix: next, entry_errors, max_error, quadrature: next_q });
        }
        last_err = max_error / scale;
        prev = next;
        q = next_q;
    }
    Err(Error::QuadratureNonconvergent { estimate: last_err, tol: opts.tol })
}

/// Orthonormal basis `f'_i = sum_j T_ij f_j` of S2(Gamma0(N)).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuspFormBasis {
    pub level: u64,
    pub genus: usize,
    pub forms: Vec<QExpansion>,
    /// `T = L^{-1}` where `G = L L*` is the Cholesky factorization.
    pub transform: CMatrix,
    pub gram: GramReport,
    pub min_eigenvalue: f64,
}

/// Cholesky change of basis making `gram` the identity.
pub fn orthonormalize(forms: Vec<QExpansion>, gram: GramReport) -> Result<CuspFormBasis> {
    let level = check_level(&forms)?;
    if gram.dim() != forms.len() {
        return Err(Error::Config(format!("Gram matrix is {0}x{0} for {1} forms", gram.dim(), forms.len())));
    }
    let g = to_dmatrix(&gram.matrix);
    let min_eigenvalue = g.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    if !(min_eigenvalue > 0.0) {
        return Err(Error::GramNotPositiveDefinite);
    }
    let chol = g.cholesky().ok_or(Error::GramNotPositiveDefinite)?;
    let l = chol.l();
    let n = forms.len();
    let t = l.solve_lower_triangular(&DMatrix::identity(n, n)).ok_or(Error::GramNotPositiveDefinite)?;
    Ok(CuspFormBasis { level, genus: n, forms, transform: from_dmatrix(&t), gram, min_eigenvalue })
}

impl CuspFormBasis {
    /// Load records, check the genus, integrate the Gram matrix and orthonormalize.
    pub fn from_records(records: &[NewformRecord], opts: &QuadratureOptions) -> Result<Self> {
        let forms: Vec<QExpansion> = records.iter().map(QExpansion::from_record).collect::<Result<_>>()?;
        let level = check_level(&forms)?;
        let genus = genus_x0_prime(level);
        if genus < 2 {
            return Err(Error::GenusTooSmall { level, genus });
        }
        if forms.len() as u64 != genus {
            return Err(Error::SchemaMismatch(format!("level {level} has genus {genus} but {} forms", forms.len())));
        }
        let gram = petersson_gram(&forms, opts)?;
        orthonormalize(forms, gram)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("basis serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// `T G T*`, identity up to rounding.
    pub fn orthonormal_gram(&self) -> CMatrix {
        let t = to_dmatrix(&self.transform);
        from_dmatrix(&(&t * to_dmatrix(&self.gram.matrix) * t.adjoint()))
    }

    /// `T G' T*` for an independently computed Gram matrix `G'`.
    pub fn transform_gram(&self, gram: &CMatrix) -> CMatrix {
        let t = to_dmatrix(&self.transform);
        from_dmatrix(&(&t * to_dmatrix(gram) * t.adjoint()))
    }

    /// Replace `T` by `U T` for a unitary `U`; the result is still orthonormal.
    pub fn rotated(&self, u: &CMatrix) -> Self {
        let t = to_dmatrix(u) * to_dmatrix(&self.transform);
        Self { transform: from_dmatrix(&t), ..self.clone() }
    }

    /// Raw newform values at `z` with error bounds.
    pub fn raw_values(&self, z: HPoint) -> Result<Vec<Evaluation>> {
        let refs: Vec<&QExpansion> = self.forms.iter().collect();
        evaluate_many(&refs, z)
    }

    /// Orthonormal values `f'_i(z)`.
    pub fn values(&self, z: HPoint) -> Result<Vec<Complex64>> {
        let raw = self.raw_values(z)?;
        Ok(self.transform.iter().map(|row| row.iter().zip(&raw).map(|(t, e)| t * e.value).sum()).collect())
    }
}

/// `B_X(z) = y^2 sum |f'_i(z)|^2`.
pub fn bergman_kernel(basis: &CuspFormBasis, z: HPoint) -> Result<f64> {
    let y = z.y();
    Ok(y * y * basis.values(z)?.iter().map(|v| v.norm_sqr()).sum::<f64>())
}

/// Density of the canonical form against the rescaled hyperbolic form,
/// `vol(X) B_X(z) / g`.
pub fn canonical_density_ratio(basis: &CuspFormBasis, geom: &SurfaceGeometry, z: HPoint) -> Result<f64> {
    Ok(geom.volume()? * bergman_kernel(basis, z)? / basis.genus as f64)
}

/// A quadrature result next to the value it is expected to have.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationReport {
    pub value: f64,
    pub expected: f64,
    /// Difference between two resolutions.
    pub quadrature_error: f64,
}

impl NormalizationReport {
    pub fn relative_deviation(&self) -> f64 {
        ((self.value - self.expected) / self.expected).abs()
    }
}

fn two_resolutions<F>(level: u64, opts: &QuadratureOptions, f: F) -> Result<(f64, f64)>
where
    F: Fn(&FundamentalCellDecomposition) -> Result<f64>,
{
    let coarse = f(&FundamentalCellDecomposition::new(level, opts)?)?;
    let fine = f(&FundamentalCellDecomposition::new(level, &opts.refined())?)?;
    Ok((fine, (fine - coarse).abs()))
}

/// `int_X d mu_hyp` by quadrature over the cells, compared with `4 pi (g - 1)`.
pub fn integrate_mu_hyp(level: u64, geom: &SurfaceGeometry, opts: &QuadratureOptions) -> Result<NormalizationReport> {
    let (value, err) = two_resolutions(level, opts, |cells| {
        let (compact, cusp) = cells.integrate_invariant(|_| Ok(1.0))?;
        // int_{y_max}^inf dy / y^2 per cell
        Ok(compact + cusp + cells.index() as f64 / cells.y_max)
    })?;
    Ok(NormalizationReport { value, expected: geom.volume()?, quadrature_error: err })
}

/// `int_X d mu_shyp = int_X d mu_hyp / (4 pi (g - 1))`, compared with 1.
pub fn integrate_mu_shyp(level: u64, geom: &SurfaceGeometry, opts: &QuadratureOptions) -> Result<NormalizationReport> {
    let hyp = integrate_mu_hyp(level, geom, opts)?;
    let vol = geom.volume()?;
    Ok(NormalizationReport { value: hyp.value / vol, expected: 1.0, quadrature_error: hyp.quadrature_error / vol })
}

/// `int_X (mu_can / mu_shyp) d mu_shyp`, compared with 1. Each node is
/// evaluated through the general reduction path, independently of the
/// Gram computation.
pub fn integrate_mu_can(basis: &CuspFormBasis, geom: &SurfaceGeometry, opts: &QuadratureOptions) -> Result<NormalizationReport> {
    let vol = geom.volume()?;
    let (value, err) = two_resolutions(basis.level, opts, |cells| {
        let (compact, cusp) = cells.integrate_invariant(|z| canonical_density_ratio(basis, geom, z))?;
        Ok((compact + cusp) / vol)
    })?;
    Ok(NormalizationReport { value, expected: 1.0, quadrature_error: err })
}
