//! Upper bounds for the Bergman kernel: the closed form in terms of the
//! injectivity radius, the orbit sums it is derived from, and the
//! counting-function tail inequality for `f(rho) = exp(-2 rho)`.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuchsian::{enumerate_ball, BallOptions, CountProfile, FuchsianGroup, OrbitBall, SurfaceGeometry};
use crate::hplane::HPoint;

pub const SCHEMA_VERSION: u32 = 1;

/// `ln sinh(x)` for `x > 0`, switching to `x - ln 2` asymptotics above 30.
pub fn ln_sinh(x: f64) -> f64 {
    if x > 30.0 {
        x - LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

/// `48/pi + 4 / (3 pi sinh^2(r/4))`.
pub fn bx_closed_form(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::NonpositiveRadius(r));
    }
    Ok(48.0 / PI + 4.0 / (3.0 * PI) * (-2.0 * ln_sinh(r / 4.0)).exp())
}

/// `delta` and `r` for the tail inequality, with `delta > r/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBoundParams {
    pub delta: f64,
    pub r: f64,
}

impl TailBoundParams {
    pub fn new(r: f64, delta: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::NonpositiveRadius(r));
        }
        if !(delta > r / 2.0) {
            return Err(Error::DeltaTooSmall { delta, half_r: r / 2.0 });
        }
        Ok(Self { delta, r })
    }

    /// `delta = 3r/4`.
    pub fn standard(r: f64) -> Result<Self> {
        Self::new(r, 0.75 * r)
    }
}

/// The three right-hand terms of the tail inequality for `exp(-2 rho)`, unscaled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailTerms {
    /// `sum exp(-2 rho)` over the atoms with `rho <= delta`.
    pub near_sum: f64,
    /// `f(delta) sinh(r/2) sinh(delta) / sinh^2(r/4)`.
    pub boundary_term: f64,
    /// `(1 / (2 sinh^2(r/4))) int_delta^inf exp(-2 rho) sinh(rho + r/2) d rho`.
    pub tail_integral: f64,
}

impl TailTerms {
    pub fn total(&self) -> f64 {
        self.near_sum + self.boundary_term + self.tail_integral
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            near_sum: factor * self.near_sum,
            boundary_term: factor * self.boundary_term,
            tail_integral: factor * self.tail_integral,
        }
    }
}

/// `int_delta^inf exp(-2 rho) sinh(rho + r/2) d rho
///   = (1/2)(exp(r/2 - delta) - exp(-r/2 - 3 delta)/3)`.
pub fn tail_integral_closed_form(r: f64, delta: f64) -> f64 {
    0.5 * ((0.5 * r - delta).exp() - (-0.5 * r - 3.0 * delta).exp() / 3.0)
}

/// The same integral by double-exponential quadrature after mapping
/// `[delta, inf)` onto `[0, 1)`. Returns `(value, error estimate)`.
pub fn tail_integral_quadrature(r: f64, delta: f64, abs_tol: f64) -> (f64, f64) {
    let integrand = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let u = t / (1.0 - t);
        let rho = delta + u;
        let jac = 1.0 / ((1.0 - t) * (1.0 - t));
        // exp(-2 rho) sinh(rho + r/2), written to avoid overflow
        let v = 0.5 * ((0.5 * r - rho).exp() - (-0.5 * r - 3.0 * rho).exp());
        v * jac
    };
    let out = quadrature::double_exponential::integrate(integrand, 0.0, 1.0, abs_tol);
    (out.integral, out.error_estimate)
}

/// Evaluate the tail inequality terms for `f(rho) = exp(-2 rho)` against a
/// count profile that is complete up to `delta`.
pub fn jl_tail_bound(params: TailBoundParams, profile: &CountProfile) -> Result<TailTerms> {
    let TailBoundParams { delta, r } = TailBoundParams::new(params.r, params.delta)?;
    if !profile.complete && profile.max_threshold() < delta {
        return Err(Error::IncompleteBall);
    }
    let near_sum = profile.stieltjes_sum(|rho| (-2.0 * rho).exp(), delta);
    let ls4 = ln_sinh(r / 4.0);
    let boundary_term = (-2.0 * delta + ln_sinh(r / 2.0) + ln_sinh(delta) - 2.0 * ls4).exp();
    let tail_integral = 0.25 * ((0.5 * r - delta - 2.0 * ls4).exp() - (-0.5 * r - 3.0 * delta - 2.0 * ls4).exp() / 3.0);
    Ok(TailTerms { near_sum, boundary_term, tail_integral })
}

fn check_centred(ball: &OrbitBall) -> Result<()> {
    if !ball.complete {
        return Err(Error::IncompleteBall);
    }
    if !ball.is_centred() {
        return Err(Error::MismatchedBasepoints);
    }
    Ok(())
}

/// `(4 / 3 pi) sum exp(-rho) / cosh^2(rho/2)` over the ball.
pub fn pointwise_orbit_bound(ball: &OrbitBall) -> Result<f64> {
    check_centred(ball)?;
    let sum: f64 = ball.rhos().map(|rho| (-rho).exp() / (0.5 * rho).cosh().powi(2)).sum();
    Ok(4.0 / (3.0 * PI) * sum)
}

/// `(16 / 3 pi) sum exp(-2 rho)` over the ball.
pub fn looser_orbit_bound(ball: &OrbitBall) -> Result<f64> {
    check_centred(ball)?;
    let sum: f64 = ball.rhos().map(|rho| (-2.0 * rho).exp()).sum();
    Ok(16.0 / (3.0 * PI) * sum)
}

/// The termwise relaxations that turn the three-term bound into the closed
/// form, each already multiplied by `16 / 3 pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxedTerms {
    /// `16 / 3 pi`, the near sum when only the identity lies within `3r/4`.
    pub near_sum: f64,
    /// `128 exp(-r/2) / 3 pi`.
    pub boundary_term: f64,
    /// `4 exp(-r/4) / (3 pi sinh^2(r/4))`.
    pub tail_integral: f64,
}

impl RelaxedTerms {
    pub fn new(r: f64) -> Self {
        let c = 1.0 / (3.0 * PI);
        Self {
            near_sum: 16.0 * c,
            boundary_term: 128.0 * c * (-0.5 * r).exp(),
            tail_integral: 4.0 * c * (-0.25 * r - 2.0 * ln_sinh(r / 4.0)).exp(),
        }
    }

    pub fn total(&self) -> f64 {
        self.near_sum + self.boundary_term + self.tail_integral
    }
}

/// Evaluated bound chain at a point (or globally when no ball is supplied).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub schema_version: u32,
    pub r: f64,
    pub closed_form_b: f64,
    pub delta: Option<f64>,
    pub point: Option<HPoint>,
    pub ball_radius: Option<f64>,
    pub ball_size: Option<usize>,
    /// Group elements with `rho <= delta`, identity included.
    pub near_count: Option<usize>,
    pub pointwise_orbit_bound: Option<f64>,
    pub looser_orbit_bound: Option<f64>,
    /// `(16 / 3 pi)` times the tail-inequality terms.
    pub term_breakdown: Option<TailTerms>,
    /// Sum of `term_breakdown`.
    pub orbit_sum_bound: Option<f64>,
    pub relaxed_terms: RelaxedTerms,
    /// `closed_form_b` minus the largest link below it.
    pub margin: f64,
    /// Every link of pointwise <= looser <= assembled <= closed form held.
    pub chain_holds: bool,
}

/// Closed-form report without any orbit data.
pub fn closed_form_report(r: f64) -> Result<BoundReport> {
    let b = bx_closed_form(r)?;
    Ok(BoundReport {
        schema_version: SCHEMA_VERSION,
        r,
        closed_form_b: b,
        delta: None,
        point: None,
        ball_radius: None,
        ball_size: None,
        near_count: None,
        pointwise_orbit_bound: None,
        looser_orbit_bound: None,
        term_breakdown: None,
        orbit_sum_bound: None,
        relaxed_terms: RelaxedTerms::new(r),
        margin: b,
        chain_holds: true,
    })
}

const CHAIN_SLACK: f64 = 1e-9;

/// Evaluate the whole chain at the ball's centre with `delta = 3r/4`.
pub fn assemble_theorem21(ball: &OrbitBall, geom: &SurfaceGeometry) -> Result<BoundReport> {
    check_centred(ball)?;
    let r = geom.injectivity_radius;
    let params = TailBoundParams::standard(r)?;
    if ball.radius < params.delta {
        return Err(Error::BallTooSmall { radius: ball.radius, required: params.delta });
    }
    let profile = CountProfile::atoms(ball);
    let terms = jl_tail_bound(params, &profile)?.scaled(16.0 / (3.0 * PI));
    let assembled = terms.total();
    let pointwise = pointwise_orbit_bound(ball)?;
    let looser = looser_orbit_bound(ball)?;
    let b = bx_closed_form(r)?;
    let chain_holds =
        pointwise <= looser + CHAIN_SLACK && looser <= assembled + CHAIN_SLACK && assembled <= b + CHAIN_SLACK;
    Ok(BoundReport {
        schema_version: SCHEMA_VERSION,
        r,
        closed_form_b: b,
        delta: Some(params.delta),
        point: Some(ball.z1),
        ball_radius: Some(ball.radius),
        ball_size: Some(ball.len()),
        near_count: Some(ball.records.partition_point(|rec| rec.rho <= params.delta + CHAIN_SLACK)),
        pointwise_orbit_bound: Some(pointwise),
        looser_orbit_bound: Some(looser),
        term_breakdown: Some(terms),
        orbit_sum_bound: Some(assembled),
        relaxed_terms: RelaxedTerms::new(r),
        margin: b - assembled,
        chain_holds,
    })
}

/// Radius of the orbit ball used for the chain at a point: far enough past
/// `3r/4` that the looser sum sees the tail the inequality is meant to cover.
pub fn chain_ball_radius(r: f64) -> f64 {
    0.75 * r + 2.0
}

/// Enumerate the ball at `z` and assemble the chain.
pub fn theorem21_at(group: &FuchsianGroup, geom: &SurfaceGeometry, z: HPoint) -> Result<BoundReport> {
    let radius = chain_ball_radius(geom.injectivity_radius);
    let ball = enumerate_ball(group, z, z, radius, BallOptions::default())?;
    assemble_theorem21(&ball, geom)
}
