//! Browser bindings: the closed-form bound curve, a Bergman density heat map
//! for the bundled levels, and orbit balls for the built-in groups.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use hyperbergman::bounds::bx_closed_form;
use hyperbergman::fuchsian::{enumerate_ball, BallOptions, FuchsianGroup};
use hyperbergman::hplane::HPoint;
use hyperbergman::ingest::embedded_fixture;
use hyperbergman::modforms::{bergman_kernel, CuspFormBasis, QuadratureOptions};
use hyperbergman::Error;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn js_err(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `[[r, B(r)], ...]` for `n` radii evenly spaced in `[r_min, r_max]`.
#[wasm_bindgen]
pub fn bound_curve(r_min: f64, r_max: f64, n: usize) -> Result<String, JsError> {
    if n < 2 || !(r_min > 0.0 && r_max > r_min) {
        return Err(JsError::new("need 0 < r_min < r_max and n >= 2"));
    }
    let step = (r_max - r_min) / (n - 1) as f64;
    let pts = (0..n)
        .map(|i| {
            let r = r_min + step * i as f64;
            bx_closed_form(r).map(|b| [r, b])
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(js_err)?;
    Ok(serde_json::to_string(&pts).expect("finite floats serialize"))
}

/// Orthonormal cusp-form basis for one of the bundled prime levels.
#[wasm_bindgen]
pub struct Level {
    basis: CuspFormBasis,
}

#[wasm_bindgen]
impl Level {
    #[wasm_bindgen(constructor)]
    pub fn new(level: u32) -> Result<Level, JsError> {
        let recs = embedded_fixture(level.into())
            .map_err(js_err)?
            .ok_or_else(|| JsError::new(&format!("no bundled data for level {level}")))?;
        let basis = CuspFormBasis::from_records(&recs, &QuadratureOptions::default()).map_err(js_err)?;
        Ok(Level { basis })
    }

    pub fn genus(&self) -> usize {
        self.basis.genus
    }

    /// Bergman density `y^2 sum |f_k|^2` on an `nx * ny` grid over
    /// `[x0, x1] x [y0, y1]`, row-major with the top row first.
    pub fn heatmap(&self, x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize) -> Result<Vec<f64>, JsError> {
        if nx < 2 || ny < 2 || !(x1 > x0) || !(y1 > y0 && y0 > 0.0) {
            return Err(JsError::new("bad grid"));
        }
        let mut out = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            let y = y1 - (y1 - y0) * j as f64 / (ny - 1) as f64;
            for i in 0..nx {
                let x = x0 + (x1 - x0) * i as f64 / (nx - 1) as f64;
                let z = HPoint::new(x, y).map_err(js_err)?;
                out.push(bergman_kernel(&self.basis, z).map_err(js_err)?);
            }
        }
        Ok(out)
    }

    pub fn level(&self) -> u32 {
        self.basis.level as u32
    }
}

/// Orbit of `z = x + iy` under a built-in group (`bolza`, `gamma0-N`) within
/// hyperbolic distance `radius`, as JSON `{complete, points: [{x, y, rho, word}]}`.
#[wasm_bindgen]
pub fn orbit_ball(group: &str, x: f64, y: f64, radius: f64) -> Result<String, JsError> {
    let g = FuchsianGroup::builtin(group).map_err(js_err)?;
    let z = HPoint::new(x, y).map_err(js_err)?;
    let ball = enumerate_ball(&g, z, z, radius, BallOptions { budget: 200_000, ..BallOptions::default() })
        .map_err(js_err)?;
    let points = ball
        .records
        .iter()
        .map(|r| {
            let w = r.transform.apply(z).map_err(js_err)?;
            Ok(json!({"x": w.x(), "y": w.y(), "rho": r.rho, "word": r.word}))
        })
        .collect::<Result<Vec<_>, JsError>>()?;
    Ok(json!({"complete": ball.complete, "points": points}).to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_is_decreasing() {
        let pts: Vec<[f64; 2]> = serde_json::from_str(&bound_curve(0.5, 4.0, 8).unwrap()).unwrap();
        assert_eq!(pts.len(), 8);
        assert!(pts.windows(2).all(|w| w[1][1] < w[0][1]));
    }

    #[test]
    fn heatmap_has_grid_shape() {
        let l = Level::new(23).unwrap();
        assert_eq!(l.genus(), 2);
        let h = l.heatmap(-0.5, 0.5, 0.1, 1.0, 4, 3).unwrap();
        assert_eq!(h.len(), 12);
        assert!(h.iter().all(|v| v.is_finite() && *v > 0.0));
    }

    #[test]
    fn orbit_contains_the_point() {
        let v: serde_json::Value = serde_json::from_str(&orbit_ball("bolza", 0.0, 1.0, 3.0).unwrap()).unwrap();
        assert_eq!(v["complete"], true);
        assert_eq!(v["points"][0]["rho"], 0.0);
    }
}
