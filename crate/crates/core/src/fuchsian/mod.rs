//! Fuchsian groups given by generators, orbit balls, counting profiles and
//! systoles.

mod ball;
mod library;
mod systole;

pub use ball::{count_profile, enumerate_ball, BallOptions, BallRecord, CountProfile, OrbitBall};
pub use library::{bolza, cyclic_test, gamma0, BOLZA_SYSTOLE};
pub use systole::{
    injectivity_radius, min_hyperbolic_displacement, systole, SurfaceGeometry, SystoleCertificate,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hplane::{hyp_distance, HPoint, MobiusTransform};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GroupKind {
    SurfaceGroup { genus: u32 },
    Congruence { level: u64 },
    CyclicTest,
}

/// A Fuchsian group presented by a finite, inverse-closed generator list.
#[derive(Debug, Clone)]
pub struct FuchsianGroup {
    name: String,
    kind: GroupKind,
    generators: Vec<MobiusTransform>,
    labels: Vec<String>,
    /// Point the generators are adapted to (Dirichlet centre for surface groups).
    base_point: HPoint,
    /// Every closed geodesic has a translate passing within this distance of
    /// `base_point`. `None` when no such bound is known.
    axis_reach: Option<f64>,
    /// Circumradius of a Dirichlet domain at `base_point` whose side pairings
    /// are the generators; bounds how far word prefixes stray in a search.
    dirichlet_radius: Option<f64>,
    /// Set when the group is exactly Gamma0(N); enables integer enumeration.
    gamma0_level: Option<u64>,
    parabolic_generators: Vec<usize>,
}

impl FuchsianGroup {
    /// Builds a group from generators, appending any missing inverses.
    pub fn new(
        name: impl Into<String>,
        kind: GroupKind,
        generators: Vec<MobiusTransform>,
        labels: Vec<String>,
    ) -> Result<Self> {
        if generators.len() != labels.len() {
            return Err(Error::Config(format!(
                "{} generators but {} labels",
                generators.len(),
                labels.len()
            )));
        }
        if generators.is_empty() {
            return Err(Error::Config("a group needs at least one generator".into()));
        }
        let mut gens = generators;
        let mut labs = labels;
        let n = gens.len();
        for i in 0..n {
            let inv = gens[i].inverse();
            if !gens.iter().any(|g| g.approx_eq(&inv, 1e-11)) {
                gens.push(inv);
                labs.push(inverse_label(&labs[i]));
            }
        }
        let mut parabolic = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            let tr = g.trace().abs();
            if (tr - 2.0).abs() < 1e-9 {
                if g.is_identity(1e-12) {
                    return Err(Error::Config(format!("generator {} is the identity", labs[i])));
                }
                if !matches!(kind, GroupKind::Congruence { .. }) {
                    return Err(Error::Config(format!(
                        "generator {} is parabolic, only allowed for congruence groups",
                        labs[i]
                    )));
                }
                parabolic.push(i);
            }
        }
        Ok(Self {
            name: name.into(),
            kind,
            generators: gens,
            labels: labs,
            base_point: HPoint::I,
            axis_reach: None,
            dirichlet_radius: None,
            gamma0_level: None,
            parabolic_generators: parabolic,
        })
    }

    pub(crate) fn with_base_point(mut self, z: HPoint, axis_reach: Option<f64>) -> Self {
        self.base_point = z;
        self.axis_reach = axis_reach;
        self
    }

    pub(crate) fn with_dirichlet_radius(mut self, radius: f64) -> Self {
        self.dirichlet_radius = Some(radius);
        self
    }

    pub(crate) fn with_gamma0_level(mut self, level: u64) -> Self {
        self.gamma0_level = Some(level);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn generators(&self) -> &[MobiusTransform] {
        &self.generators
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn base_point(&self) -> HPoint {
        self.base_point
    }

    pub fn axis_reach(&self) -> Option<f64> {
        self.axis_reach
    }

    pub fn dirichlet_radius(&self) -> Option<f64> {
        self.dirichlet_radius
    }

    pub fn gamma0_level(&self) -> Option<u64> {
        self.gamma0_level
    }

    /// Indices of parabolic generators (congruence groups only).
    pub fn parabolic_generators(&self) -> &[usize] {
        &self.parabolic_generators
    }

    /// Largest displacement `d(z, g z)` over the generators.
    pub fn max_generator_displacement(&self, z: HPoint) -> Result<f64> {
        let mut best = 0.0f64;
        for g in &self.generators {
            best = best.max(hyp_distance(z, g.apply(z)?));
        }
        Ok(best)
    }

    /// Looks up a built-in group: `cyclic-test`, `bolza`, or `gamma0-N` for prime `N`.
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "cyclic-test" => Ok(cyclic_test()),
            "bolza" => Ok(bolza()),
            other => {
                let level = other
                    .strip_prefix("gamma0-")
                    .and_then(|s| s.parse::<u64>().ok())
                    .ok_or_else(|| Error::UnknownGroup(other.to_string()))?;
                gamma0(level)
            }
        }
    }

    /// Loads a presentation from JSON: `{"kind": ..., "generators": [[a,b,c,d], ...], "labels": [...]}`.
    ///
    /// `kind` is `"surface-group"` (with `genus`), `"congruence"` (with
    /// `level`) or `"cyclic-test"`. A congruence document without generators
    /// stands for the full Gamma0(level).
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GroupDocument = serde_json::from_str(text)?;
        let kind = match doc.kind.as_str() {
            "surface-group" => GroupKind::SurfaceGroup {
                genus: doc.genus.ok_or_else(|| Error::SchemaMismatch("surface-group needs genus".into()))?,
            },
            "congruence" => GroupKind::Congruence {
                level: doc.level.ok_or_else(|| Error::SchemaMismatch("congruence needs level".into()))?,
            },
            "cyclic-test" => GroupKind::CyclicTest,
            other => return Err(Error::SchemaMismatch(format!("unknown group kind '{other}'"))),
        };
        if doc.generators.is_empty() {
            if let GroupKind::Congruence { level } = kind {
                return gamma0(level);
            }
        }
        let gens = doc
            .generators
            .iter()
            .map(|m| MobiusTransform::new(m[0], m[1], m[2], m[3]))
            .collect::<Result<Vec<_>>>()?;
        let labels = match doc.labels {
            Some(l) => l,
            None => (0..gens.len()).map(|i| format!("g{i}")).collect(),
        };
        let mut group = Self::new(doc.name.unwrap_or_else(|| "custom".into()), kind, gens, labels)?;
        if let Some([x, y]) = doc.base_point {
            group.base_point = HPoint::new(x, y)?;
        }
        group.axis_reach = doc.axis_reach;
        Ok(group)
    }
}

#[derive(Debug, Deserialize)]
struct GroupDocument {
    kind: String,
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    genus: Option<u32>,
    #[serde(default)]
    level: Option<u64>,
    #[serde(default)]
    generators: Vec<[f64; 4]>,
    #[serde(default)]
    labels: Option<Vec<String>>,
    #[serde(default)]
    base_point: Option<[f64; 2]>,
    #[serde(default)]
    axis_reach: Option<f64>,
}

fn inverse_label(label: &str) -> String {
    match label.strip_suffix("^-1") {
        Some(base) => base.to_string(),
        None => format!("{label}^-1"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverses_are_synthesized() {
        let g = MobiusTransform::new(2.0, 0.0, 0.0, 0.5).unwrap();
        let group = FuchsianGroup::new("t", GroupKind::CyclicTest, vec![g], vec!["a".into()]).unwrap();
        assert_eq!(group.generators().len(), 2);
        assert_eq!(group.labels(), ["a", "a^-1"]);
    }

    #[test]
    fn parabolic_rejected_outside_congruence() {
        let t = MobiusTransform::translation(1.0);
        assert!(FuchsianGroup::new("t", GroupKind::CyclicTest, vec![t], vec!["T".into()]).is_err());
        let g = FuchsianGroup::new("t", GroupKind::Congruence { level: 1 }, vec![t], vec!["T".into()]).unwrap();
        assert_eq!(g.parabolic_generators().len(), 2);
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"kind": "cyclic-test", "generators": [[2, 0, 0, 0.5]], "labels": ["a"]}"#;
        let g = FuchsianGroup::from_json(text).unwrap();
        assert_eq!(g.kind(), GroupKind::CyclicTest);
        assert_eq!(g.generators().len(), 2);
        let text = r#"{"kind": "congruence", "level": 23}"#;
        let g = FuchsianGroup::from_json(text).unwrap();
        assert_eq!(g.gamma0_level(), Some(23));
        assert!(FuchsianGroup::from_json(r#"{"kind": "torus"}"#).is_err());
    }

    #[test]
    fn builtin_names() {
        assert!(FuchsianGroup::builtin("cyclic-test").is_ok());
        assert!(FuchsianGroup::builtin("bolza").is_ok());
        assert_eq!(FuchsianGroup::builtin("gamma0-23").unwrap().gamma0_level(), Some(23));
        assert!(matches!(FuchsianGroup::builtin("klein"), Err(Error::UnknownGroup(_))));
        assert!(FuchsianGroup::builtin("gamma0-24").is_err());
    }
}
