//! Orbit-avoidance windows around a nonrecurrent Holder singularity.
//!
//! For a singular point p whose orbit never returns to p, points at the
//! right log-distance scale shadow the singular orbit long enough that
//! their own orbits stay out of a fixed neighborhood B_p of p. With
//! theta the Holder exponent of the singular branch (alpha = 1/theta),
//! C_H its Holder constant, C_L a sampled Lipschitz bound away from p,
//! and delta half the minimal partition interval, the k-th window is
//!
//!   D_k = p + (delta / C_H)^alpha * [C_L^(-alpha k), C_L^(-alpha (k-1))]
//!
//! and every x in D_k should satisfy f^i(x) not in B_p = [p, p + delta]
//! (one-sided, on the singular side) for i = 1..k. This module samples
//! the windows and follows the orbits, tracking the offset from the
//! singular orbit in exact difference form while it is below floating
//! point resolution: the singular orbit runs along partition points, so
//! the offset form is what makes the deep windows (distances far below
//! 1e-16) checkable at all.

use crate::map::signed::tilde_step_with_branch;
use crate::map::singularity::SingularityInfo;
use crate::map::{HolderClass, MapError, MarkovIntervalMap, OrbitClass};

/// Offsets below this fraction of the minimal interval length are
/// followed in difference form against the singular orbit.
const OFFSET_SCALE: f64 = 1e-6;

#[derive(Debug, Clone, Copy)]
pub struct ShadowingLevel {
    pub k: usize,
    /// Points sampled from the window D_k.
    pub samples: usize,
    /// True when every sampled orbit stayed out of B_p for steps 1..k.
    pub all_avoid: bool,
}

#[derive(Debug, Clone)]
pub struct ShadowingReport {
    /// Radius of the avoided neighborhood (half the minimal interval).
    pub delta: f64,
    /// Holder constant of the singular branch at the anchor.
    pub c_h: f64,
    /// Sampled Lipschitz bound away from the singularity (with a 1%
    /// safety factor).
    pub c_l: f64,
    /// Reciprocal Holder exponent.
    pub alpha: f64,
    pub levels: Vec<ShadowingLevel>,
}

impl ShadowingReport {
    pub fn all_pass(&self) -> bool {
        self.levels.iter().all(|l| l.all_avoid)
    }
}

/// Sample each window D_k for k = 0..=k_max and verify the avoidance
/// property. Requires a nonrecurrent singular orbit and a Holder
/// singular branch.
pub fn dk_shadowing_check(
    map: &MarkovIntervalMap,
    sing: &SingularityInfo,
    k_max: usize,
    samples: usize,
) -> Result<ShadowingReport, MapError> {
    if sing.orbit.is_periodic() {
        return Err(MapError::HypothesesNotMet);
    }
    let (theta, c_h) = match sing.holder {
        HolderClass::Holder { exponent, constant } => (exponent, constant),
        HolderClass::NotHolder => return Err(MapError::HypothesesNotMet),
    };
    assert!(matches!(sing.orbit, OrbitClass::Preperiodic { .. }));
    map.validate()?;

    let alpha = 1.0 / theta;
    let min_len = map
        .partition
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let delta = min_len / 2.0;
    let c_l = 1.01 * lipschitz_away_from(map, sing.location.x, delta);

    // Signed orbit of the singular point: all of its points are
    // partition points (the Markov property keeps the grid invariant),
    // which is what the offset form below leans on.
    let mut spine_points = vec![sing.location];
    let mut spine_branches = Vec::with_capacity(k_max);
    for _ in 0..k_max {
        let (next, branch) = tilde_step_with_branch(map, *spine_points.last().unwrap())?;
        spine_points.push(next);
        spine_branches.push(branch);
    }

    let s0 = sing.location.side.sign() as f64;
    let p = sing.location.x;
    let tau0 = alpha * (c_h / delta).ln();
    let log_cl = c_l.ln();
    let switch_scale = OFFSET_SCALE * min_len;

    let in_bp = |x: f64| {
        let d = s0 * (x - p);
        (0.0..=delta).contains(&d)
    };

    let mut levels = vec![ShadowingLevel { k: 0, samples: 0, all_avoid: true }];
    for k in 1..=k_max {
        let lo = tau0 + alpha * (k - 1) as f64 * log_cl;
        let hi = tau0 + alpha * k as f64 * log_cl;
        let mut all_avoid = true;
        for j in 0..samples {
            let t = if samples > 1 { j as f64 / (samples - 1) as f64 } else { 0.5 };
            let tau = lo + (hi - lo) * t;
            if !orbit_avoids(map, &spine_points, &spine_branches, s0 * (-tau).exp(), k, switch_scale, &in_bp) {
                all_avoid = false;
            }
        }
        levels.push(ShadowingLevel { k, samples, all_avoid });
    }

    Ok(ShadowingReport { delta, c_h, c_l, alpha, levels })
}

/// Largest sampled |f'| over the domain minus the delta-neighborhood of
/// the singular point.
fn lipschitz_away_from(map: &MarkovIntervalMap, p: f64, delta: f64) -> f64 {
    let mut sup: f64 = 0.0;
    for (i, spec) in map.branches.iter().enumerate() {
        let (lo, hi) = map.interval(i);
        for j in 0..=1000 {
            let x = lo + (hi - lo) * j as f64 / 1000.0;
            if (x - p).abs() < delta {
                continue;
            }
            sup = sup.max(spec.kind.derivative(x).abs());
        }
    }
    assert!(sup.is_finite() && sup > 1.0, "expanding map has a finite Lipschitz bound away from p");
    sup
}

/// Follow the orbit of the point at signed offset `o0` from the singular
/// point for `k` steps and report whether it stays out of B_p. While the
/// offset is small the orbit runs through the same branches as the
/// singular orbit and is advanced in exact difference form; once it is
/// macroscopic, plain evaluation takes over.
fn orbit_avoids(
    map: &MarkovIntervalMap,
    spine_points: &[crate::map::SignedPoint],
    spine_branches: &[usize],
    o0: f64,
    k: usize,
    switch_scale: f64,
    in_bp: &dyn Fn(f64) -> bool,
) -> bool {
    let mut offset = Some(o0);
    let mut x = spine_points[0].x + o0;
    for i in 0..k {
        match offset {
            Some(o) => {
                let z = spine_points[i].x;
                let (blo, bhi) = map.interval(spine_branches[i]);
                let pos = z + o;
                if o.abs() >= switch_scale || !(blo <= pos && pos <= bhi) {
                    // Macroscopic offset (or drifted off the spine
                    // branch): continue with the plain map.
                    offset = None;
                    x = pos;
                    match map.apply(x) {
                        Ok(y) => x = y,
                        Err(_) => return false,
                    }
                } else {
                    let next = map.branches[spine_branches[i]].kind.delta_value(z, o);
                    offset = Some(next);
                    x = spine_points[i + 1].x + next;
                }
            }
            None => match map.apply(x) {
                Ok(y) => x = y,
                Err(_) => return false,
            },
        }
        if in_bp(x) {
            return false;
        }
    }
    true
}
