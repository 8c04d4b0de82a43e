//! Built-in groups: the cyclic test group, the Bolza surface group and
//! Gamma0(p) for prime p.

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::{FuchsianGroup, GroupKind};
use crate::arith::{is_prime, mod_inverse};
use crate::error::{Error, Result};
use crate::hplane::{HPoint, MobiusTransform};

/// `2 arccosh(1 + sqrt 2)`, the systole of the Bolza surface.
pub const BOLZA_SYSTOLE: f64 = 3.057_141_838_961_996_3;

/// The cyclic group generated by `z -> 4z`.
pub fn cyclic_test() -> FuchsianGroup {
    let g = MobiusTransform::new(2.0, 0.0, 0.0, 0.5).expect("valid diagonal");
    FuchsianGroup::new("cyclic-test", GroupKind::CyclicTest, vec![g], vec!["a".into()])
        .expect("valid presentation")
        // every element's axis is the imaginary axis, which contains i
        .with_base_point(HPoint::I, Some(0.0))
}

/// The genus-2 Bolza surface group, generated by the four hyperbolic
/// translations pairing opposite sides of the regular octagon with interior
/// angles pi/4 centred at `i`.
pub fn bolza() -> FuchsianGroup {
    let alpha = 1.0 + 2f64.sqrt();
    let beta = (2.0 + 2.0 * 2f64.sqrt()).sqrt();
    // Cayley transform from the disc to the upper half-plane: w -> i(1 + w)/(1 - w)
    let cayley = [[Complex64::i(), Complex64::i()], [Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)]];
    let cayley_inv = inverse2(cayley);
    let mut gens = Vec::new();
    let mut labels = Vec::new();
    for k in 0..4 {
        let phase = Complex64::from_polar(1.0, k as f64 * PI / 4.0);
        let disc = [
            [Complex64::new(alpha, 0.0), beta * phase],
            [beta * phase.conj(), Complex64::new(alpha, 0.0)],
        ];
        let m = mul2(mul2(cayley, disc), cayley_inv);
        let scale = m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        debug_assert!(m.iter().flatten().all(|z| z.im.abs() <= 1e-12 * scale));
        gens.push(MobiusTransform::new(m[0][0].re, m[0][1].re, m[1][0].re, m[1][1].re).expect("real SL2"));
        labels.push(["a", "b", "c", "d"][k].to_string());
    }
    // circumradius of the octagon: cosh R = cot^2(pi/8)
    let circumradius = (1.0 / (PI / 8.0).tan()).powi(2).acosh();
    FuchsianGroup::new("bolza", GroupKind::SurfaceGroup { genus: 2 }, gens, labels)
        .expect("valid presentation")
        .with_base_point(HPoint::I, Some(circumradius))
        .with_dirichlet_radius(circumradius)
}

/// Gamma0(p) for prime `p`, with generators found by the Schreier process
/// on the coset action of SL2(Z) = <S, T> on P^1(Z/p).
pub fn gamma0(level: u64) -> Result<FuchsianGroup> {
    if !is_prime(level) {
        return Err(Error::LevelNotPrime(level));
    }
    let gens = schreier_generators(level as i64);
    let mut transforms = Vec::new();
    let mut labels = Vec::new();
    for m in gens {
        let t = MobiusTransform::from_integers(m[0], m[1], m[2], m[3])?;
        if t.is_identity(1e-12) || transforms.iter().any(|s: &MobiusTransform| s.approx_eq(&t, 1e-12)) {
            continue;
        }
        labels.push(format!("g{}", transforms.len()));
        transforms.push(t);
    }
    Ok(FuchsianGroup::new(format!("gamma0-{level}"), GroupKind::Congruence { level }, transforms, labels)?
        .with_gamma0_level(level))
}

type IntMat = [i64; 4];

fn imul(x: IntMat, y: IntMat) -> IntMat {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

fn iinv(x: IntMat) -> IntMat {
    [x[3], -x[1], -x[2], x[0]]
}

/// Index in `0..=p` of the coset `Gamma0(p) g`, read off the bottom row `(c : d)`.
pub(crate) fn coset_index(c: i64, d: i64, p: i64) -> usize {
    let (c, d) = (c.rem_euclid(p), d.rem_euclid(p));
    match mod_inverse(d, p) {
        Some(dinv) => ((c * dinv).rem_euclid(p)) as usize,
        None => p as usize,
    }
}

fn schreier_generators(p: i64) -> Vec<IntMat> {
    const S: IntMat = [0, -1, 1, 0];
    const T: IntMat = [1, 1, 0, 1];
    let n = p as usize + 1;
    let mut reps: Vec<Option<IntMat>> = vec![None; n];
    let start = coset_index(0, 1, p);
    reps[start] = Some([1, 0, 0, 1]);
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        let r = reps[i].expect("visited");
        for s in [S, T] {
            let rs = imul(r, s);
            let j = coset_index(rs[2], rs[3], p);
            if reps[j].is_none() {
                reps[j] = Some(rs);
                queue.push_back(j);
            }
        }
    }
    let mut out = Vec::new();
    for r in reps.iter().flatten() {
        for s in [S, T] {
            let rs = imul(*r, s);
            let j = coset_index(rs[2], rs[3], p);
            let g = imul(rs, iinv(reps[j].expect("connected")));
            debug_assert_eq!(g[2].rem_euclid(p), 0);
            out.push(g);
        }
    }
    out
}

fn mul2(x: [[Complex64; 2]; 2], y: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    [
        [x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]],
        [x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]],
    ]
}

fn inverse2(x: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let det = x[0][0] * x[1][1] - x[0][1] * x[1][0];
    [[x[1][1] / det, -x[0][1] / det], [-x[1][0] / det, x[0][0] / det]]
}

/// Coset representatives of Gamma0(p) in SL2(Z): the identity and `S T^j`.
#[cfg(test)]
fn coset_representatives(p: u64) -> Vec<IntMat> {
    let mut reps = vec![[1, 0, 0, 1]];
    for j in 0..p as i64 {
        reps.push([0, -1, 1, j]);
    }
    reps
}
