//! Weight-2 cusp forms on Gamma0(N), N prime: q-expansions, evaluation
//! anywhere in the upper half-plane, Petersson inner products and the
//! Bergman kernel of X0(N).

mod basis;
mod cells;

pub use basis::{
    bergman_kernel, canonical_density_ratio, integrate_mu_can, integrate_mu_hyp, integrate_mu_shyp, orthonormalize,
    petersson_gram, CuspFormBasis, GramReport, NormalizationReport,
};
pub use cells::{FundamentalCellDecomposition, QuadratureOptions};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{divisor_count, is_prime, mod_inverse};
use crate::error::{Error, Result};
use crate::hplane::HPoint;
use crate::ingest::NewformRecord;

/// Absolute tail tolerance for direct summation at a reduced point.
pub const DIRECT_TOL: f64 = 1e-13;

/// Coefficients `a_1, a_2, ...` of a newform embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QExpansion {
    pub level: u64,
    pub label: String,
    pub coefficients: Vec<Complex64>,
    /// `f | W_N = eps f`, so `f(-1/(Nz)) = eps N z^2 f(z)`.
    pub atkin_lehner: i8,
}

impl QExpansion {
    pub fn new(level: u64, label: impl Into<String>, coefficients: Vec<Complex64>, atkin_lehner: i8) -> Result<Self> {
        if !is_prime(level) {
            return Err(Error::LevelNotPrime(level));
        }
        if atkin_lehner.abs() != 1 {
            return Err(Error::SchemaMismatch(format!("Atkin-Lehner eigenvalue must be +-1, got {atkin_lehner}")));
        }
        if coefficients.is_empty() {
            return Err(Error::SchemaMismatch("empty q-expansion".into()));
        }
        Ok(Self { level, label: label.into(), coefficients, atkin_lehner })
    }

    /// From an ingested record; a missing eigenvalue is found numerically.
    pub fn from_record(rec: &NewformRecord) -> Result<Self> {
        let coefficients = rec.coefficients()?;
        let eps = match rec.atkin_lehner_eigenvalue {
            Some(e) => e,
            None => infer_atkin_lehner(rec.level, &coefficients)?,
        };
        Self::new(rec.level, rec.embedding_label.clone(), coefficients, eps)
    }

    pub fn truncation(&self) -> usize {
        self.coefficients.len()
    }

    /// Indices `n` where `|a_n| > d(n) sqrt(n)` (beyond 1e-6 slack).
    pub fn deligne_audit(&self) -> Vec<usize> {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(i, a)| {
                let n = *i as u64 + 1;
                a.norm() > divisor_count(n) as f64 * (n as f64).sqrt() + 1e-6
            })
            .map(|(i, _)| i + 1)
            .collect()
    }
}

/// Value with a rigorous-in-exact-arithmetic truncation bound plus a
/// rounding allowance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub value: Complex64,
    pub error: f64,
}

/// `sum_{n > m} 2 n r^n`, which dominates the tail because `|a_n| <= d(n) sqrt n <= 2n`.
pub fn tail_bound(r: f64, m: usize) -> f64 {
    let m = m as f64;
    2.0 * r.powf(m + 1.0) * ((m + 1.0) - m * r) / ((1.0 - r) * (1.0 - r))
}

/// Smallest truncation whose tail bound at height `y` is at most `tol`.
pub fn terms_needed(y: f64, tol: f64, max_terms: usize) -> Option<usize> {
    let r = (-2.0 * PI * y).exp();
    if r >= 1.0 {
        return None;
    }
    (1..=max_terms).find(|&m| tail_bound(r, m) <= tol)
}

/// Sum several q-expansions at `z`, sharing the powers of `q`.
fn direct_sum_many(coeffs: &[&[Complex64]], z: Complex64, tol: f64) -> Result<Vec<Evaluation>> {
    let avail = coeffs.iter().map(|c| c.len()).min().unwrap_or(0);
    let r = (-2.0 * PI * z.im).exp();
    let m = match terms_needed(z.im, tol, avail) {
        Some(m) => m,
        _ => return Err(Error::TruncationInsufficient { terms: avail, bound: tail_bound(r, avail), tol }),
    };
    let q = Complex64::from_polar(r, 2.0 * PI * z.re);
    let mut sums = vec![Complex64::new(0.0, 0.0); coeffs.len()];
    let mut abs = vec![0.0; coeffs.len()];
    let mut qn = q;
    for n in 0..m {
        for (k, c) in coeffs.iter().enumerate() {
            let t = c[n] * qn;
            sums[k] += t;
            abs[k] += t.norm();
        }
        qn *= q;
    }
    let tail = tail_bound(r, m);
    Ok(sums
        .into_iter()
        .zip(abs)
        .map(|(value, a)| Evaluation { value, error: tail + 4.0 * m as f64 * f64::EPSILON * a })
        .collect())
}

/// `sum a_n exp(2 pi i n z)` with no reduction.
pub fn evaluate_direct(f: &QExpansion, z: HPoint, tol: f64) -> Result<Evaluation> {
    Ok(direct_sum_many(&[&f.coefficients], z.to_complex(), tol)?[0])
}

/// SL2(Z)-reduction: `(w, g)` with `w` in the standard fundamental domain
/// and `z = g w`, `g = [a, b, c, d]` an integer matrix.
pub fn reduce_to_fundamental_domain(z: HPoint) -> Result<(Complex64, [i64; 4])> {
    let mut w = z.to_complex();
    // A with w = A z, kept as integers
    let mut a = [1i64, 0, 0, 1];
    for _ in 0..10_000 {
        let n = w.re.round();
        if n != 0.0 {
            w.re -= n;
            let n = n as i64;
            a = [a[0] - n * a[2], a[1] - n * a[3], a[2], a[3]];
        }
        if w.norm_sqr() < 1.0 - 1e-14 {
            w = -1.0 / w;
            a = [-a[2], -a[3], a[0], a[1]];
        } else {
            let g = [a[3], -a[1], -a[2], a[0]];
            return Ok((w, g));
        }
    }
    Err(Error::ReductionFailed)
}

/// Evaluate several forms of one level at `z`.
///
/// After reducing `z = g w` with `w` in the SL2(Z) fundamental domain, either
/// `g` lies in Gamma0(N), or `g = B S T^j` with `B` in Gamma0(N) and then
/// `f(z) = (cw + d)^2 (eps / N) f((w + j)/N)`, whose argument has imaginary
/// part at least `sqrt(3) / (2N)`.
pub fn evaluate_many(forms: &[&QExpansion], z: HPoint) -> Result<Vec<Evaluation>> {
    let Some(first) = forms.first() else { return Ok(Vec::new()) };
    let level = first.level;
    if let Some(f) = forms.iter().find(|f| f.level != level) {
        return Err(Error::LevelMismatch(level, f.level));
    }
    let n = level as i64;
    let (w, [_, _, c, d]) = reduce_to_fundamental_domain(z)?;
    let cocycle = Complex64::new(c as f64, 0.0) * w + d as f64;
    let factor = cocycle * cocycle;
    let coeffs: Vec<&[Complex64]> = forms.iter().map(|f| f.coefficients.as_slice()).collect();
    if c.rem_euclid(n) == 0 {
        let vals = direct_sum_many(&coeffs, w, DIRECT_TOL)?;
        return Ok(vals.into_iter().map(|e| scale(e, factor)).collect());
    }
    let cinv = mod_inverse(c, n).ok_or(Error::ReductionFailed)?;
    let j = (d * cinv).rem_euclid(n);
    let v = (w + j as f64) / n as f64;
    let vals = direct_sum_many(&coeffs, v, DIRECT_TOL)?;
    Ok(vals.into_iter().zip(forms).map(|(e, f)| scale(e, factor * (f.atkin_lehner as f64 / n as f64))).collect())
}

fn scale(e: Evaluation, s: Complex64) -> Evaluation {
    Evaluation { value: e.value * s, error: e.error * s.norm() }
}

pub fn evaluate_form(f: &QExpansion, z: HPoint) -> Result<Evaluation> {
    Ok(evaluate_many(&[f], z)?[0])
}

/// Pick the sign `eps` for which `f(-1/(Nz)) = eps N z^2 f(z)` at a probe
/// point where both sides converge directly.
pub fn infer_atkin_lehner(level: u64, coefficients: &[Complex64]) -> Result<i8> {
    let n = level as f64;
    // |z| = 1/sqrt(N) puts z and -1/(Nz) at the same height
    let z = Complex64::from_polar(1.0 / n.sqrt(), 1.2);
    let fz = direct_sum_many(&[coefficients], z, 1e-12)?[0].value;
    let fw = direct_sum_many(&[coefficients], -1.0 / (n * z), 1e-12)?[0].value;
    let rhs = n * z * z * fz;
    let plus = (fw - rhs).norm();
    let minus = (fw + rhs).norm();
    if plus.min(minus) > 1e-6 * fw.norm().max(1e-300) {
        return Err(Error::SchemaMismatch(format!("level {level}: q-expansion is not a Fricke eigenform")));
    }
    Ok(if plus < minus { 1 } else { -1 })
}
