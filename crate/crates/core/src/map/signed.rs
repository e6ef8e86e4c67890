//! One-sided (signed) points and the extended step that keeps track of
//! which side of a partition point an orbit approaches from.
//!
//! A point carries a side tag: Plus means the limit from the right,
//! Minus from the left. Under a branch with one-sided derivative of sign
//! s, an approach side e maps to e * s: increasing branches preserve the
//! side, decreasing branches flip it. Domain endpoints only have one
//! meaningful side, so results are canonicalized there.

use super::{MapError, MarkovIntervalMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Minus,
    Plus,
    /// Untagged: interior points whose side is irrelevant.
    None,
}

impl Side {
    pub fn sign(self) -> i8 {
        match self {
            Side::Minus => -1,
            Side::Plus => 1,
            Side::None => 0,
        }
    }

    fn from_sign(s: i8) -> Side {
        match s {
            -1 => Side::Minus,
            1 => Side::Plus,
            _ => Side::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedPoint {
    pub x: f64,
    pub side: Side,
}

impl SignedPoint {
    pub fn plus(x: f64) -> Self {
        SignedPoint { x, side: Side::Plus }
    }

    pub fn minus(x: f64) -> Self {
        SignedPoint { x, side: Side::Minus }
    }
}

/// How the signed orbit of a point recurs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitClass {
    /// The starting signed point itself returns after `period` steps.
    Periodic { period: usize },
    /// The orbit enters a cycle it never left from: `preperiod` >= 1 steps
    /// to reach the cycle, then `period` steps around it.
    Preperiodic { preperiod: usize, period: usize },
}

impl OrbitClass {
    pub fn is_periodic(self) -> bool {
        matches!(self, OrbitClass::Periodic { .. })
    }

    pub fn period(self) -> usize {
        match self {
            OrbitClass::Periodic { period } => period,
            OrbitClass::Preperiodic { period, .. } => period,
        }
    }
}

/// One step of the extended map on signed points. For a tagged point the
/// branch on that side of x is used and the value is the one-sided limit;
/// landings on the grid stay exact (snapped within eps), and domain
/// endpoints are canonicalized to their only available side.
pub fn tilde_step(map: &MarkovIntervalMap, point: SignedPoint) -> Result<SignedPoint, MapError> {
    tilde_step_with_branch(map, point).map(|(p, _)| p)
}

/// Like `tilde_step`, additionally reporting which branch carried the
/// point (the symbol the extended orbit reads).
pub fn tilde_step_with_branch(
    map: &MarkovIntervalMap,
    point: SignedPoint,
) -> Result<(SignedPoint, usize), MapError> {
    let (a, b) = map.domain();
    if point.x < a - map.eps_grid || point.x > b + map.eps_grid {
        return Err(MapError::UntrackedPoint { x: point.x });
    }

    // Canonicalize the input side at domain endpoints.
    let side = if (point.x - a).abs() <= map.eps_grid {
        Side::Plus
    } else if (point.x - b).abs() <= map.eps_grid {
        Side::Minus
    } else {
        point.side
    };

    let (branch, x) = match map.grid_index(point.x) {
        Some(i) => {
            let x = map.partition[i];
            let branch = match side {
                Side::Plus => i,
                Side::Minus => i - 1,
                Side::None => return Err(MapError::UntrackedPoint { x: point.x }),
            };
            (branch, x)
        }
        None => match map.branch_index_of(point.x) {
            Some(i) => (i, point.x),
            None => return Err(MapError::UntrackedPoint { x: point.x }),
        },
    };

    let kind = &map.branches[branch].kind;
    let value = kind.value(x);
    let d = kind.one_sided_derivative(x, side.sign().max(-1).min(1));
    let out_sign = side.sign() * if d < 0.0 { -1 } else { 1 };

    // Snap the image to the grid (the Markov property holds only within
    // eps_markov) and canonicalize at domain endpoints.
    let snapped = map
        .partition
        .iter()
        .find(|&&p| (p - value).abs() <= map.eps_markov)
        .copied()
        .unwrap_or(value);
    let side_out = if (snapped - a).abs() <= map.eps_grid {
        Side::Plus
    } else if (snapped - b).abs() <= map.eps_grid {
        Side::Minus
    } else {
        Side::from_sign(out_sign)
    };
    Ok((SignedPoint { x: snapped, side: side_out }, branch))
}

/// Signed forward orbit: point, step(point), ..., `steps` entries beyond
/// the start.
pub fn signed_orbit(
    map: &MarkovIntervalMap,
    start: SignedPoint,
    steps: usize,
) -> Result<Vec<SignedPoint>, MapError> {
    let mut orbit = Vec::with_capacity(steps + 1);
    orbit.push(start);
    let mut current = start;
    for _ in 0..steps {
        current = tilde_step(map, current)?;
        orbit.push(current);
    }
    Ok(orbit)
}

fn same_signed(a: SignedPoint, b: SignedPoint, eps: f64) -> bool {
    a.side == b.side && (a.x - b.x).abs() <= eps
}

/// Classify the signed orbit of a grid point as periodic or preperiodic.
/// Orbits of grid points stay on the (finite) signed grid, so a repeat
/// must occur within twice the number of signed grid points.
pub fn classify_orbit(map: &MarkovIntervalMap, start: SignedPoint) -> Result<OrbitClass, MapError> {
    let limit = 4 * map.partition.len() + 4;
    let orbit = signed_orbit(map, start, limit)?;
    for j in 1..orbit.len() {
        for i in 0..j {
            if same_signed(orbit[i], orbit[j], map.eps_grid) {
                let period = j - i;
                return Ok(if i == 0 {
                    OrbitClass::Periodic { period }
                } else {
                    OrbitClass::Preperiodic { preperiod: i, period }
                });
            }
        }
    }
    // Unreachable for grid points of a valid Markov map; report as an
    // untracked-point failure rather than panicking on corrupt input.
    Err(MapError::UntrackedPoint { x: start.x })
}
