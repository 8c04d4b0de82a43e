use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{enumerate_ball, BallOptions, FuchsianGroup, GroupKind};
use crate::arith::genus_x0_prime;
use crate::error::{Error, Result};
use crate::hplane::{HPoint, MobiusTransform};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystoleCertificate {
    pub certified: bool,
    /// Human-readable statement of the rule that was applied.
    pub rule: String,
    pub search_radius: f64,
    /// Smallest search radius for which the rule certifies the found value.
    pub required_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceGeometry {
    pub systole: f64,
    /// Equal to the systole under the convention used throughout the crate.
    pub injectivity_radius: f64,
    pub genus: Option<u32>,
    /// `4 pi (g - 1)`.
    pub hyp_volume: Option<f64>,
    pub witness: MobiusTransform,
    pub certificate: SystoleCertificate,
}

impl SurfaceGeometry {
    /// Geometry from a known systole and genus, for formula-level work.
    pub fn from_parts(systole: f64, genus: u32) -> Result<Self> {
        if !(systole > 0.0) {
            return Err(Error::NonpositiveRadius(systole));
        }
        if genus < 2 {
            return Err(Error::Config(format!("genus {genus} has no hyperbolic structure")));
        }
        Ok(Self {
            systole,
            injectivity_radius: systole,
            genus: Some(genus),
            hyp_volume: Some(4.0 * PI * (genus as f64 - 1.0)),
            witness: MobiusTransform::IDENTITY,
            certificate: SystoleCertificate {
                certified: false,
                rule: "supplied".into(),
                search_radius: 0.0,
                required_radius: 0.0,
            },
        })
    }

    pub fn volume(&self) -> Result<f64> {
        self.hyp_volume.ok_or_else(|| Error::Config("surface has no finite genus".into()))
    }

    /// `Ok(self)` when the certificate holds.
    pub fn require_certified(self) -> Result<Self> {
        if self.certificate.certified {
            Ok(self)
        } else {
            Err(Error::UncertifiedSystole {
                found: self.systole,
                radius: self.certificate.search_radius,
                needed: self.certificate.required_radius,
            })
        }
    }

    pub fn genus_or_err(&self) -> Result<u32> {
        self.genus.ok_or_else(|| Error::Config("surface has no finite genus".into()))
    }
}

/// Shortest translation length among hyperbolic elements.
///
/// For Gamma0(p) traces are integers, so the smallest `t >= 3` for which
/// `x^2 - t x + 1 = 0 (mod p)` is solvable gives the systole exactly. Other
/// groups are searched over a ball of `search_radius` around the base point;
/// the result is certified when `l_min + 2 * axis_reach <= search_radius`,
/// since a shorter geodesic would move the base point by less than that.
/// Parabolic and elliptic elements never count.
pub fn systole(group: &FuchsianGroup, search_radius: f64) -> Result<SurfaceGeometry> {
    if let Some(level) = group.gamma0_level() {
        return gamma0_systole(level);
    }
    let z = group.base_point();
    let ball = enumerate_ball(group, z, z, search_radius, BallOptions::default())?;
    let best = ball
        .records
        .iter()
        .filter_map(|r| r.transform.translation_length().map(|l| (l, r.transform)))
        .min_by(|a, b| a.0.total_cmp(&b.0));
    let Some((length, witness)) = best else {
        return Err(Error::NoHyperbolicElement { radius: search_radius });
    };
    let (required, rule) = match group.axis_reach() {
        Some(reach) => (
            length + 2.0 * reach,
            format!("ball of radius R about the base point certifies when l_min + 2*{reach:.6} <= R"),
        ),
        None => (f64::INFINITY, "no axis-reach bound known for this group".to_string()),
    };
    let certified = ball.complete && required <= search_radius + 1e-12;
    let genus = match group.kind() {
        GroupKind::SurfaceGroup { genus } => Some(genus),
        GroupKind::Congruence { level } if crate::arith::is_prime(level) => Some(genus_x0_prime(level) as u32),
        _ => None,
    };
    Ok(SurfaceGeometry {
        systole: length,
        injectivity_radius: length,
        genus,
        hyp_volume: genus.filter(|&g| g >= 2).map(|g| 4.0 * PI * (g as f64 - 1.0)),
        witness,
        certificate: SystoleCertificate { certified, rule, search_radius, required_radius: required },
    })
}

fn gamma0_systole(level: u64) -> Result<SurfaceGeometry> {
    let p = level as i64;
    let (trace, a) = (3i64..)
        .find_map(|t| (0..p).find(|&x| (x * x - t * x + 1).rem_euclid(p) == 0).map(|x| (t, x)))
        .expect("a solution exists for t = 2 + p");
    let d = trace - a;
    let b = (a * d - 1) / p;
    let witness = MobiusTransform::from_integers(a, b, p, d)?;
    let length = 2.0 * (trace as f64 / 2.0).acosh();
    let genus = genus_x0_prime(level) as u32;
    Ok(SurfaceGeometry {
        systole: length,
        injectivity_radius: length,
        genus: Some(genus),
        hyp_volume: (genus >= 2).then_some(4.0 * PI * (genus as f64 - 1.0)),
        witness,
        certificate: SystoleCertificate {
            certified: true,
            rule: format!(
                "integer traces: no element of trace 3..{} exists mod {level}; witness has trace {trace}",
                trace - 1
            ),
            search_radius: 0.0,
            required_radius: 0.0,
        },
    })
}

/// `r_X`, taken equal to the systole.
pub fn injectivity_radius(geom: &SurfaceGeometry) -> f64 {
    geom.systole
}

/// `min d(z, gamma z)` over hyperbolic `gamma` within `radius` of `z`.
pub fn min_hyperbolic_displacement(group: &FuchsianGroup, z: HPoint, radius: f64) -> Result<Option<f64>> {
    let ball = enumerate_ball(group, z, z, radius, BallOptions::default())?;
    Ok(ball.records.iter().filter(|r| r.transform.is_hyperbolic()).map(|r| r.rho).reduce(f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::{bolza, cyclic_test, gamma0, BOLZA_SYSTOLE};
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    #[test]
    fn cyclic_systole() {
        let g = systole(&cyclic_test(), 3.0).unwrap();
        assert_relative_eq!(g.systole, 2.0 * LN_2, epsilon = 1e-14);
        // 2 arccosh(1.25) = 2 ln 2
        assert_relative_eq!(g.systole, 2.0 * 1.25f64.acosh(), epsilon = 1e-14);
        assert!(g.certificate.certified);
        assert_eq!(injectivity_radius(&g), g.systole);
        assert_eq!(g.genus, None);
    }

    #[test]
    fn bolza_systole_certified() {
        let g = systole(&bolza(), 8.0).unwrap();
        assert_relative_eq!(g.systole, BOLZA_SYSTOLE, epsilon = 1e-9);
        assert!(g.certificate.certified, "{:?}", g.certificate);
        assert_eq!(g.genus, Some(2));
        assert_relative_eq!(g.hyp_volume.unwrap(), 4.0 * PI);
        let small = systole(&bolza(), 4.0).unwrap();
        assert!(!small.certificate.certified);
        assert_relative_eq!(small.systole, BOLZA_SYSTOLE, epsilon = 1e-9);
    }

    #[test]
    fn parabolic_only_group_has_no_systole() {
        let t = MobiusTransform::translation(1.0);
        let g = FuchsianGroup::new("t", GroupKind::Congruence { level: 1 }, vec![t], vec!["T".into()]).unwrap();
        assert!(matches!(systole(&g, 5.0), Err(Error::NoHyperbolicElement { .. })));
    }

    #[test]
    fn gamma0_systoles_by_trace() {
        // 5 is a square mod 29 and 31 (trace 3); 3 but not 5 is a square mod 23 and 37 (trace 4)
        let three = 2.0 * 1.5f64.acosh();
        let four = 2.0 * 2f64.acosh();
        for (p, expect) in [(23, four), (29, three), (31, three), (37, four)] {
            let g = systole(&gamma0(p).unwrap(), 0.0).unwrap();
            assert_relative_eq!(g.systole, expect, epsilon = 1e-14);
            assert_eq!(g.genus, Some(2));
            let w = g.witness.entries();
            assert_eq!((w[2] as i64) % p as i64, 0);
            assert_relative_eq!(g.witness.translation_length().unwrap(), expect, epsilon = 1e-14);
        }
    }
}
