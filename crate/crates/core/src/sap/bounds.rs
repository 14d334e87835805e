//! Stabilization-time and memory bounds for periodic clocks.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{GStar, GrowthFunction, SapError};

/// Iteration cap for `g*` inside bound formulas.
const G_STAR_CAP: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundError {
    #[error("g*({m}) is not finite: growth function insufficient for this diameter")]
    InsufficientGrowth { m: u64 },
    #[error("growth function must be inflationary")]
    NotInflationary,
    #[error("parameter {0} must be positive")]
    NonPositive(&'static str),
    #[error(transparent)]
    Sap(#[from] SapError),
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

fn g_star_finite(g: &GrowthFunction, m: u64) -> Result<u64, BoundError> {
    match g.g_star(m, G_STAR_CAP) {
        GStar::Finite(q) => Ok(q),
        _ => Err(BoundError::InsufficientGrowth { m }),
    }
}

fn overflow(what: &'static str) -> BoundError {
    BoundError::Sap(SapError::Overflow(what))
}

/// `(g*(ceil(2D/P)) + 2) * D`, the finite-diameter stabilization bound.
pub fn strong_bound(d: u64, p: u64, g: &GrowthFunction) -> Result<u64, BoundError> {
    if d == 0 {
        return Err(BoundError::NonPositive("D"));
    }
    if p == 0 {
        return Err(BoundError::NonPositive("P"));
    }
    let q0 = g_star_finite(g, ceil_div(2 * d, p))?;
    (q0 + 2).checked_mul(d).ok_or_else(|| overflow("bound"))
}

/// The table bound for uniformly rooted schedules with radius `r` and
/// center diameter `d_z`:
/// `R(1 + g*(M + ceil((2+R)/P))) + P*M + T`, where `T = (2 + g*(ceil(2D/P))) D`
/// and `M = g^T(max M_i(0))`.
pub fn uniform_table_bound(
    r: u64,
    d_z: u64,
    p: u64,
    g: &GrowthFunction,
    m0_max: u64,
) -> Result<u64, BoundError> {
    if !g.is_inflationary() {
        return Err(BoundError::NotInflationary);
    }
    let t = strong_bound(d_z, p, g)?;
    let m = g.iterate(m0_max, t)?;
    let inner = m
        .checked_add(ceil_div(2 + r, p))
        .ok_or_else(|| overflow("bound"))?;
    let q = g_star_finite(g, inner)?;
    let first = r.checked_mul(1 + q).ok_or_else(|| overflow("bound"))?;
    let pm = p.checked_mul(m).ok_or_else(|| overflow("bound"))?;
    first
        .checked_add(pm)
        .and_then(|x| x.checked_add(t))
        .ok_or_else(|| overflow("bound"))
}

/// Rounds derived from a trace's measured center stabilization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformTraceBound {
    pub q1: u64,
    pub t1: u64,
    /// All nodes agree with the center modulo `P` from this round on.
    pub t2: u64,
}

/// `q1 = g*(ceil(M_Z + (R+1)/P))`, `t1 = t0 + q1 R`, `t2 = t1 + P M_Z + R`.
pub fn uniform_trace_bound(
    t0_z: u64,
    r: u64,
    p: u64,
    m_z: u64,
    g: &GrowthFunction,
) -> Result<UniformTraceBound, BoundError> {
    if !g.is_inflationary() {
        return Err(BoundError::NotInflationary);
    }
    if p == 0 {
        return Err(BoundError::NonPositive("P"));
    }
    let q1 = g_star_finite(g, m_z + ceil_div(r + 1, p))?;
    let t1 = t0_z + q1 * r;
    Ok(UniformTraceBound {
        q1,
        t1,
        t2: t1 + p * m_z + r,
    })
}

/// States per node for the fixed-period clock sized for diameter bound `b`:
/// `ceil(2B/P) * P`.
pub fn fixed_memory_bound(b: u64, p: u64) -> Result<u64, BoundError> {
    if p == 0 {
        return Err(BoundError::NonPositive("P"));
    }
    Ok(ceil_div(2 * b, p) * p)
}

/// `(P + 1) * g^T(max M_i(0))` with `T = (2 + g*(ceil(2D/P))) D`.
pub fn sap_memory_bound(
    d: u64,
    p: u64,
    g: &GrowthFunction,
    m0_max: u64,
) -> Result<u64, BoundError> {
    let t = strong_bound(d, p, g)?;
    let m = g.iterate(m0_max, t)?;
    (p + 1).checked_mul(m).ok_or_else(|| overflow("bound"))
}
