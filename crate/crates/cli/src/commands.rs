//! The verbs.

use std::path::Path;

use hyperbergman::bounds::{bx_closed_form, closed_form_report, theorem21_at};
use hyperbergman::config::RunConfig;
use hyperbergman::fuchsian::{gamma0, systole, FuchsianGroup, SurfaceGeometry};
use hyperbergman::ingest::{fetch_level, validate_records, AuditReport, Source};
use hyperbergman::modforms::{bergman_kernel, CuspFormBasis, FundamentalCellDecomposition};
use hyperbergman::product::{
    canonical_volume_ratio_det, canonical_volume_ratio_perm, sample_points, thm32_bound, ProductPoint,
    MAX_PERMUTATION_D,
};
use hyperbergman::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

use crate::output::Sink;
use crate::{Command, Failure, RatioPath};

pub fn dispatch(cmd: Command, mut cfg: RunConfig, sink: &Sink) -> std::result::Result<(), Failure> {
    match cmd {
        Command::Systole { group, radius } => {
            if let Some(r) = radius {
                cfg.systole_radius = r;
            }
            cfg.validate()?;
            systole_cmd(&group, &cfg, sink)?;
            Ok(())
        }
        Command::Bound { r, group } => bound_cmd(r, group.as_deref(), &cfg, sink),
        Command::VerifyThm21 { level, grid } => {
            if let Some(g) = grid {
                cfg.grid = g;
            }
            verify_thm21(level, &cfg, sink)
        }
        Command::VerifyThm32 { level, d, trials, path, duplicate_probe } => {
            if let Some(t) = trials {
                cfg.trials = t;
            }
            verify_thm32(level, d, path, duplicate_probe, &cfg, sink)
        }
        Command::Sweep { levels } => {
            if let Some(l) = levels {
                cfg.levels = l;
            }
            sweep(&cfg, sink)?;
            Ok(())
        }
        Command::Fetch { level, network } => {
            if network {
                cfg.fixtures_only = false;
            }
            fetch(&level, &cfg, sink)
        }
    }
}

/// A built-in name, or a path to a JSON presentation.
fn load_group(name: &str) -> Result<FuchsianGroup> {
    let path = Path::new(name);
    if name.ends_with(".json") || path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {name}: {e}")))?;
        FuchsianGroup::from_json(&text)
    } else {
        FuchsianGroup::builtin(name)
    }
}

fn certified_geometry(group: &FuchsianGroup, cfg: &RunConfig) -> Result<SurfaceGeometry> {
    systole(group, cfg.systole_radius)?.require_certified()
}

fn level_basis(level: u64, cfg: &RunConfig) -> Result<CuspFormBasis> {
    let records = fetch_level(level, &cfg.fetch_options())?;
    CuspFormBasis::from_records(&records, &cfg.quadrature())
}

#[derive(Serialize)]
struct SystoleOut<'a> {
    group: &'a str,
    #[serde(flatten)]
    geometry: SurfaceGeometry,
}

fn systole_cmd(name: &str, cfg: &RunConfig, sink: &Sink) -> Result<()> {
    let group = load_group(name)?;
    let geometry = certified_geometry(&group, cfg)?;
    sink.json("systole", cfg, &SystoleOut { group: name, geometry })
}

fn bound_cmd(r: Option<f64>, group: Option<&str>, cfg: &RunConfig, sink: &Sink) -> std::result::Result<(), Failure> {
    cfg.validate()?;
    let report = match (r, group) {
        (Some(r), _) => closed_form_report(r)?,
        (None, Some(name)) => {
            let group = load_group(name)?;
            let geom = certified_geometry(&group, cfg)?;
            theorem21_at(&group, &geom, group.base_point())?
        }
        (None, None) => return Err(Error::Config("bound needs --r or --group".into()).into()),
    };
    sink.json("bound", cfg, &report)?;
    if report.chain_holds {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

#[derive(Serialize)]
struct KernelRow {
    x: f64,
    y: f64,
    bergman: f64,
    bound: f64,
    margin: f64,
}

fn verify_thm21(level: u64, cfg: &RunConfig, sink: &Sink) -> std::result::Result<(), Failure> {
    cfg.validate()?;
    if cfg.grid == 0 {
        return Err(Error::Config("grid must be positive".into()).into());
    }
    let basis = level_basis(level, cfg)?;
    let geom = certified_geometry(&gamma0(level)?, cfg)?;
    let bound = bx_closed_form(geom.injectivity_radius)?;
    let cells = FundamentalCellDecomposition::new(level, &cfg.quadrature())?;
    let per_cell = cfg.grid.div_ceil(cells.index());
    let points = cells.grid(per_cell)?;
    let rows = points
        .par_iter()
        .map(|&z| {
            let bergman = bergman_kernel(&basis, z)?;
            Ok(KernelRow { x: z.x(), y: z.y(), bergman, bound, margin: bound - bergman })
        })
        .collect::<Result<Vec<_>>>()?;
    sink.csv("verify-thm21", cfg, &rows)?;
    if rows.iter().all(|r| r.margin > 0.0) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

#[derive(Serialize)]
struct RatioRow {
    level: u64,
    d: usize,
    point: String,
    ratio: f64,
    bound: f64,
    margin: f64,
}

fn format_point(p: &ProductPoint) -> String {
    p.points.iter().map(|z| format!("{}+{}i", z.x(), z.y())).collect::<Vec<_>>().join(";")
}

/// Duplicated coordinates make the ratio vanish; anything above this is a failure.
const DUPLICATE_TOL: f64 = 1e-10;

fn verify_thm32(
    level: u64,
    d: usize,
    path: RatioPath,
    duplicate_probe: bool,
    cfg: &RunConfig,
    sink: &Sink,
) -> std::result::Result<(), Failure> {
    cfg.validate()?;
    if d == 0 {
        return Err(Error::EmptyProductPoint.into());
    }
    if path == RatioPath::Perm && d > MAX_PERMUTATION_D {
        return Err(Error::DTooLargeForPermutationPath { d, max: MAX_PERMUTATION_D }.into());
    }
    if duplicate_probe && d < 2 {
        return Err(Error::Config("the duplicate probe needs d >= 2".into()).into());
    }
    if let Some(g) = cfg.gonality {
        if d >= g {
            return Err(Error::GonalityExceeded { d, gonality: g }.into());
        }
    }
    let basis = level_basis(level, cfg)?;
    let geom = certified_geometry(&gamma0(level)?, cfg)?;
    let bound = thm32_bound(d, &geom, bx_closed_form(geom.injectivity_radius)?)?;
    let cells = FundamentalCellDecomposition::new(level, &cfg.quadrature())?;
    let mut points = sample_points(&cells, d, cfg.trials, cfg.seed)?;
    if duplicate_probe {
        for p in &mut points {
            p.points[d - 1] = p.points[0];
        }
    }
    let rows = points
        .par_iter()
        .map(|p| {
            let ratio = match path {
                RatioPath::Det => canonical_volume_ratio_det(&basis, &geom, p)?,
                RatioPath::Perm => canonical_volume_ratio_perm(&basis, &geom, p)?,
            };
            Ok(RatioRow { level, d, point: format_point(p), ratio, bound, margin: bound - ratio })
        })
        .collect::<Result<Vec<_>>>()?;
    sink.csv("verify-thm32", cfg, &rows)?;
    let ok = rows.iter().all(|r| r.margin > 0.0 && (!duplicate_probe || r.ratio < DUPLICATE_TOL));
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

#[derive(Serialize)]
struct SweepRow {
    level: String,
    genus: Option<u32>,
    systole: f64,
    bound: f64,
}

fn sweep(cfg: &RunConfig, sink: &Sink) -> Result<()> {
    cfg.validate()?;
    if cfg.levels.is_empty() {
        return Err(Error::Config("sweep needs at least one level".into()));
    }
    let opts = cfg.fetch_options();
    let mut rows = Vec::with_capacity(cfg.levels.len() + 1);
    for &level in &cfg.levels {
        // the coefficients must be available even though only the geometry enters the table
        fetch_level(level, &opts)?;
        let geom = certified_geometry(&gamma0(level)?, cfg)?;
        rows.push(SweepRow {
            level: level.to_string(),
            genus: geom.genus,
            systole: geom.systole,
            bound: bx_closed_form(geom.injectivity_radius)?,
        });
    }
    let min_systole = rows.iter().map(|r| r.systole).fold(f64::INFINITY, f64::min);
    rows.push(SweepRow { level: "family".into(), genus: None, systole: min_systole, bound: bx_closed_form(min_systole)? });
    sink.csv("sweep", cfg, &rows)
}

#[derive(Serialize)]
struct FetchOut {
    level: u64,
    embeddings: Vec<String>,
    sources: Vec<Source>,
    min_terms: usize,
    audit: AuditReport,
}

fn fetch(levels: &[u64], cfg: &RunConfig, sink: &Sink) -> std::result::Result<(), Failure> {
    cfg.validate()?;
    let opts = cfg.fetch_options();
    let fetched = levels.par_iter().map(|&l| fetch_level(l, &opts).map(|r| (l, r))).collect::<Result<Vec<_>>>()?;
    let out: Vec<FetchOut> = fetched
        .into_iter()
        .map(|(level, recs)| FetchOut {
            level,
            embeddings: recs.iter().map(|r| r.embedding_label.clone()).collect(),
            sources: recs.iter().map(|r| r.source).collect(),
            min_terms: recs.iter().map(|r| r.terms()).min().unwrap_or(0),
            audit: validate_records(&recs, cfg.min_terms),
        })
        .collect();
    sink.json("fetch", cfg, &out)?;
    let bad: Vec<String> = out.iter().filter(|o| !o.audit.is_clean()).map(|o| o.level.to_string()).collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(format!("audit violations at levels {}", bad.join(", "))).into())
    }
}
