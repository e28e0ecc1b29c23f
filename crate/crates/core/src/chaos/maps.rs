use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ChaosError;

/// `π^t` is evaluated as `π^(t mod EXPONENT_PERIOD)`.
///
/// `π^(y²)` overflows `f64` once `y² > 620`, which the map reaches for
/// `b > 24.9`. 512 is the largest power of two for which both the map and its
/// Jacobian (`π^t · 2|y| · b · ln π`) stay finite; below `|y| < 22.6` the
/// reduction is a no-op.
pub const EXPONENT_PERIOD: f64 = 512.0;

/// Upper bound for the 2D-SCPHM control parameters.
pub const SCPHM_PARAM_MAX: f64 = 25.0;

pub type State = (f64, f64);

/// Row-major 2x2 Jacobian: `j[r][c] = ∂out_r / ∂in_c`.
pub type Jacobian = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapId {
    /// 2D sin-cos-pi hyperchaotic map.
    Scphm,
    /// 2D-TM: parameters (ω, r).
    Tm,
    /// 2D-SSCDB: parameters (μ, η).
    Sscdb,
    /// Cross-2DHM: parameters (α, β).
    Cross2dhm,
}

impl MapId {
    pub const ALL: [MapId; 4] = [MapId::Scphm, MapId::Tm, MapId::Sscdb, MapId::Cross2dhm];

    pub fn name(self) -> &'static str {
        match self {
            MapId::Scphm => "2D-SCPHM",
            MapId::Tm => "2D-TM",
            MapId::Sscdb => "2D-SSCDB",
            MapId::Cross2dhm => "Cross-2DHM",
        }
    }
}

impl fmt::Display for MapId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MapId {
    type Err = ChaosError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "scphm" | "2dscphm" => Ok(MapId::Scphm),
            "tm" | "2dtm" => Ok(MapId::Tm),
            "sscdb" | "2dsscdb" => Ok(MapId::Sscdb),
            "cross2dhm" | "cross" => Ok(MapId::Cross2dhm),
            _ => Err(ChaosError::InvalidParams(format!("unknown map `{s}`"))),
        }
    }
}

/// The two control parameters of a planar map.
///
/// For the comparison maps `a`/`b` carry (ω, r), (μ, η) or (α, β).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapParams {
    pub a: f64,
    pub b: f64,
}

impl MapParams {
    pub fn new(a: f64, b: f64) -> Self {
        MapParams { a, b }
    }

    /// Checks the 2D-SCPHM parameter range `(0, 25]`.
    ///
    /// The closed upper end admits the `b = 25` bifurcation slices.
    pub fn validate_scphm(&self) -> Result<(), ChaosError> {
        for (name, v) in [("a", self.a), ("b", self.b)] {
            if !(v > 0.0 && v <= SCPHM_PARAM_MAX) {
                return Err(ChaosError::InvalidParams(format!(
                    "2D-SCPHM {name} = {v} outside (0, {SCPHM_PARAM_MAX}]"
                )));
            }
        }
        Ok(())
    }
}

/// Odd extension of `v^π`: `sign(v) · |v|^π`.
#[inline]
pub fn pow_signed(v: f64) -> f64 {
    if v < 0.0 {
        -(-v).powf(PI)
    } else {
        v.powf(PI)
    }
}

/// `d/dv pow_signed(v) = π |v|^(π-1)`, zero at the origin.
#[inline]
fn pow_signed_deriv(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        PI * v.abs().powf(PI - 1.0)
    }
}

#[inline]
fn pi_pow_reduced(t: f64) -> f64 {
    PI.powf(t % EXPONENT_PERIOD)
}

#[inline]
fn finite(v: f64, term: &'static str) -> Result<f64, ChaosError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ChaosError::Overflow { term })
    }
}

struct ScphmTerms {
    pi_y2: f64,
    pi_x2: f64,
    u: f64,
    w: f64,
}

fn scphm_terms((x, y): State) -> Result<ScphmTerms, ChaosError> {
    let pi_y2 = finite(pi_pow_reduced(finite(y * y, "y^2")?), "pi^(y^2)")?;
    let pi_x2 = finite(pi_pow_reduced(finite(x * x, "x^2")?), "pi^(x^2)")?;
    let u = finite(pi_y2 - finite(pow_signed(x), "x^pi")?, "pi^(y^2) - x^pi")?;
    let w = finite(pi_x2 - finite(pow_signed(y), "y^pi")?, "pi^(x^2) - y^pi")?;
    Ok(ScphmTerms { pi_y2, pi_x2, u, w })
}

/// One iteration of the 2D-SCPHM:
///
/// ```text
/// x' = a · sin(π^(y²) − x^π)
/// y' = b · cos(π^(x²) − y^π)
/// ```
pub fn step_scphm(state: State, params: MapParams) -> Result<State, ChaosError> {
    let t = scphm_terms(state)?;
    Ok((params.a * t.u.sin(), params.b * t.w.cos()))
}

fn jacobian_scphm(state: State, params: MapParams) -> Result<Jacobian, ChaosError> {
    let (x, y) = state;
    let t = scphm_terms(state)?;
    let ln_pi = PI.ln();
    let cu = params.a * t.u.cos();
    let sw = params.b * t.w.sin();
    let j = [
        [-cu * pow_signed_deriv(x), cu * t.pi_y2 * ln_pi * 2.0 * y],
        [-sw * t.pi_x2 * ln_pi * 2.0 * x, sw * pow_signed_deriv(y)],
    ];
    for v in j.iter().flatten() {
        finite(*v, "2D-SCPHM jacobian")?;
    }
    Ok(j)
}

/// One iteration of a comparison map (2D-TM, 2D-SSCDB or Cross-2DHM).
pub fn step_reference(state: State, params: MapParams, map: MapId) -> Result<State, ChaosError> {
    let (x, y) = state;
    let MapParams { a, b } = params;
    match map {
        MapId::Tm => Ok(((a * x).sin() - b * (a * y).sin(), (a * x).cos())),
        MapId::Sscdb => {
            let s = x + y;
            if s == 0.0 {
                return Err(ChaosError::Singular { map, x, y });
            }
            Ok(((a * x * (1.0 - y) + 1.0).sin(), (b / s + 1.0).sin()))
        }
        MapId::Cross2dhm => {
            let sy = y.sin();
            if sy == 0.0 {
                return Err(ChaosError::Singular { map, x, y });
            }
            Ok(((a / sy).sin(), b * (PI * (x + y)).sin()))
        }
        MapId::Scphm => Err(ChaosError::InvalidParams(
            "step_reference covers the comparison maps only".into(),
        )),
    }
}

fn jacobian_reference(state: State, params: MapParams, map: MapId) -> Result<Jacobian, ChaosError> {
    let (x, y) = state;
    let MapParams { a, b } = params;
    match map {
        MapId::Tm => Ok([
            [a * (a * x).cos(), -b * a * (a * y).cos()],
            [-a * (a * x).sin(), 0.0],
        ]),
        MapId::Sscdb => {
            let s = x + y;
            if s == 0.0 {
                return Err(ChaosError::Singular { map, x, y });
            }
            let c1 = (a * x * (1.0 - y) + 1.0).cos();
            let d = -(b / s + 1.0).cos() * b / (s * s);
            Ok([[c1 * a * (1.0 - y), -c1 * a * x], [d, d]])
        }
        MapId::Cross2dhm => {
            let sy = y.sin();
            if sy == 0.0 {
                return Err(ChaosError::Singular { map, x, y });
            }
            let dx = -(a / sy).cos() * a * y.cos() / (sy * sy);
            let dy = b * PI * (PI * (x + y)).cos();
            Ok([[0.0, dx], [dy, dy]])
        }
        MapId::Scphm => jacobian_scphm(state, params),
    }
}

/// A differentiable planar map.
pub trait PlanarMap: Sync {
    fn step(&self, state: State) -> Result<State, ChaosError>;
    fn jacobian(&self, state: State) -> Result<Jacobian, ChaosError>;
}

/// One of the four maps with concrete parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChaoticMap {
    pub id: MapId,
    pub params: MapParams,
}

impl ChaoticMap {
    pub fn new(id: MapId, params: MapParams) -> Self {
        ChaoticMap { id, params }
    }

    pub fn scphm(a: f64, b: f64) -> Self {
        ChaoticMap::new(MapId::Scphm, MapParams::new(a, b))
    }
}

impl PlanarMap for ChaoticMap {
    fn step(&self, state: State) -> Result<State, ChaosError> {
        match self.id {
            MapId::Scphm => step_scphm(state, self.params),
            id => step_reference(state, self.params, id),
        }
    }

    fn jacobian(&self, state: State) -> Result<Jacobian, ChaosError> {
        jacobian_reference(state, self.params, self.id)
    }
}
