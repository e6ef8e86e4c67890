//! Detection and classification of points where |f'| diverges.
//!
//! Singular points live at partition points, approached from inside the
//! branch whose closed-form kind (or sampled behavior) blows up there.
//! Each one is classified two ways: by the recurrence of its signed
//! orbit, and by whether the branch is Holder at the anchor (power-type
//! anchors are, logarithmic ones are not).

use super::branch::{BranchKind, LocalProfile};
use super::signed::{classify_orbit, OrbitClass, Side, SignedPoint};
use super::{MapError, MarkovIntervalMap};

/// Holder regularity of a branch at its singular anchor: whether
/// |f(p + d) - f(p)| <= constant * d^exponent holds near the anchor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HolderClass {
    Holder { exponent: f64, constant: f64 },
    NotHolder,
}

impl HolderClass {
    pub fn is_holder(self) -> bool {
        matches!(self, HolderClass::Holder { .. })
    }
}

#[derive(Debug, Clone)]
pub struct SingularityInfo {
    /// The anchor with its approach side (the side the singular branch
    /// lives on).
    pub location: SignedPoint,
    /// Branch whose derivative diverges at the anchor.
    pub branch_index: usize,
    /// Recurrence class of the signed orbit of the anchor.
    pub orbit: OrbitClass,
    pub holder: HolderClass,
    /// Local behavior of the branch at the anchor.
    pub profile: LocalProfile,
}

impl SingularityInfo {
    /// Power-law exponent at the anchor when the profile is an exact
    /// power; None for logarithmic, iterated-log, or sampled anchors.
    pub fn exact_power_alpha(&self) -> Option<f64> {
        match self.profile {
            LocalProfile::Power { alpha, .. } if alpha > 1.0 => Some(alpha),
            _ => None,
        }
    }
}

/// Scan every branch endpoint for a divergent one-sided derivative and
/// classify each hit. Closed-form kinds are recognized structurally;
/// Custom branches are probed by sampling |f'| at distances 10^-k.
pub fn detect_singularities(map: &MarkovIntervalMap) -> Result<Vec<SingularityInfo>, MapError> {
    let mut found = Vec::new();
    for (i, spec) in map.branches.iter().enumerate() {
        let (lo, hi) = map.interval(i);
        for (x, side) in [(lo, Side::Plus), (hi, Side::Minus)] {
            let profile = spec.kind.profile_at(x, side.sign());
            let info = match profile {
                LocalProfile::Power { alpha, coeff } if alpha > 1.0 + 1e-9 => {
                    Some((profile, HolderClass::Holder { exponent: 1.0 / alpha, constant: coeff }))
                }
                LocalProfile::Power { .. } => None,
                LocalProfile::LogType { .. } => Some((profile, HolderClass::NotHolder)),
                LocalProfile::IterLogType { rho } => {
                    // Exponent 1/2 with the supremum of f(x)/sqrt(x)
                    // attained at the domain edge.
                    let edge = BranchKind::IterLogPower { rho }.value(rho);
                    Some((profile, HolderClass::Holder { exponent: 0.5, constant: edge / rho.sqrt() }))
                }
                LocalProfile::Unknown => {
                    sampled_singularity(&spec.kind, x, side).map(|h| (LocalProfile::Unknown, h))
                }
            };
            if let Some((profile, holder)) = info {
                let location = SignedPoint { x, side };
                let orbit = classify_orbit(map, location)?;
                found.push(SingularityInfo { location, branch_index: i, orbit, holder, profile });
            }
        }
    }
    Ok(found)
}

/// Convenience wrapper for analyses that require exactly one singular
/// point.
pub fn the_singularity(map: &MarkovIntervalMap) -> Result<SingularityInfo, MapError> {
    let mut all = detect_singularities(map)?;
    match all.len() {
        0 => Err(MapError::NoSingularity),
        1 => Ok(all.pop().unwrap()),
        n => Err(MapError::MultipleSingularities { count: n }),
    }
}

/// Probe an opaque branch at distances 10^-k from the endpoint. The
/// derivative must both exceed 1e5 at the finest probe and have grown by
/// a factor of 10 across the sweep to count as singular. Holder behavior
/// is then read off the decay of |f(p + d) - f(p)|.
fn sampled_singularity(kind: &BranchKind, x: f64, side: Side) -> Option<HolderClass> {
    let s = side.sign() as f64;
    let deriv_at = |k: i32| kind.derivative(x + s * 10f64.powi(-k)).abs();
    let coarse = deriv_at(3);
    let fine = deriv_at(12);
    if !(fine > 1e5 && fine >= 10.0 * coarse) {
        return None;
    }

    // Local exponent of |f(p + d) - f(p)| between consecutive probes.
    let log_delta = |k: i32| kind.delta_value(x, s * 10f64.powi(-k)).abs().ln();
    let mut exponents = Vec::new();
    for k in 8..12 {
        let theta = (log_delta(k + 1) - log_delta(k)) / (-std::f64::consts::LN_10);
        exponents.push(theta);
    }
    exponents.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = exponents[exponents.len() / 2];
    if median < 0.05 {
        Some(HolderClass::NotHolder)
    } else {
        let constant = (8..=12)
            .map(|k| {
                let d = 10f64.powi(-k);
                kind.delta_value(x, s * d).abs() / d.powf(median)
            })
            .fold(0.0f64, f64::max);
        Some(HolderClass::Holder { exponent: median, constant })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::BranchSpec;
    use std::sync::Arc;

    /// Square-root left branch glued to a blend, doubling right branch:
    /// one singular point at 0 approached from the right, fixed orbit.
    fn power_map() -> MarkovIntervalMap {
        MarkovIntervalMap::new(
            vec![0.0, 0.5, 1.0],
            vec![
                BranchSpec::new(BranchKind::Glued {
                    pieces: vec![
                        (0.0, 0.0625, BranchKind::PowerOffset {
                            anchor: 0.0,
                            coeff: 1.0,
                            alpha: 2.0,
                            offset: 0.0,
                        }),
                        (0.0625, 0.5, BranchKind::DerivativeBlend {
                            x0: 0.0625,
                            x1: 0.5,
                            d0: 2.0,
                            d1: 10.0 / 7.0,
                            y0: 0.25,
                        }),
                    ],
                }),
                BranchSpec::new(BranchKind::Affine { slope: 2.0, intercept: -1.0 }),
            ],
        )
    }

    #[test]
    fn power_anchor_is_detected_with_holder_half() {
        let map = power_map();
        let sing = the_singularity(&map).expect("one singular point");
        assert_eq!(sing.location, SignedPoint::plus(0.0));
        assert_eq!(sing.branch_index, 0);
        assert_eq!(sing.orbit, OrbitClass::Periodic { period: 1 });
        match sing.holder {
            HolderClass::Holder { exponent, constant } => {
                assert!((exponent - 0.5).abs() < 1e-12);
                assert!((constant - 1.0).abs() < 1e-12);
            }
            HolderClass::NotHolder => panic!("square root is Holder"),
        }
        assert_eq!(sing.exact_power_alpha(), Some(2.0));
    }

    #[test]
    fn log_reciprocal_anchor_is_not_holder() {
        let map = MarkovIntervalMap::new(
            vec![0.0, 0.5, 1.0],
            vec![
                BranchSpec::new(BranchKind::Affine { slope: 2.0, intercept: 0.0 }),
                BranchSpec::new(BranchKind::LogReciprocal {
                    anchor: 0.5,
                    coeff: std::f64::consts::LN_2,
                }),
            ],
        );
        let sing = the_singularity(&map).expect("one singular point");
        assert_eq!(sing.location, SignedPoint::plus(0.5));
        assert_eq!(sing.holder, HolderClass::NotHolder);
        // (1/2)+ maps to 0+, which is fixed: preperiodic.
        assert_eq!(sing.orbit, OrbitClass::Preperiodic { preperiod: 1, period: 1 });
        assert!(sing.exact_power_alpha().is_none());
    }

    #[test]
    fn affine_maps_have_no_singularities() {
        let map = MarkovIntervalMap::new(
            vec![0.0, 0.5, 1.0],
            vec![
                BranchSpec::new(BranchKind::Affine { slope: 2.0, intercept: 0.0 }),
                BranchSpec::new(BranchKind::Affine { slope: 2.0, intercept: -1.0 }),
            ],
        );
        assert!(detect_singularities(&map).unwrap().is_empty());
        assert!(matches!(the_singularity(&map), Err(MapError::NoSingularity)));
    }

    #[test]
    fn custom_power_branch_is_found_by_sampling() {
        // An opaque full-image square root, 2 sqrt(x) on [0, 1/4].
        let map = MarkovIntervalMap::new(
            vec![0.0, 0.25, 1.0],
            vec![
                BranchSpec::new(BranchKind::Custom {
                    value: Arc::new(|x: f64| 2.0 * x.sqrt()),
                    derivative: Arc::new(|x: f64| 1.0 / x.sqrt()),
                }),
                BranchSpec::new(BranchKind::Affine { slope: 4.0 / 3.0, intercept: -1.0 / 3.0 }),
            ],
        );
        let sing = the_singularity(&map).expect("detected by sampling");
        assert_eq!(sing.location, SignedPoint::plus(0.0));
        match sing.holder {
            HolderClass::Holder { exponent, .. } => {
                assert!((exponent - 0.5).abs() < 0.02, "exponent = {exponent}");
            }
            HolderClass::NotHolder => panic!("sampled square root is Holder"),
        }
    }

    #[test]
    fn custom_log_branch_is_flagged_not_holder() {
        // Mirrored log-reciprocal: decreasing from (1/2, 1/2) to (0.6, 0),
        // derivative diverging at 1/2 from the right, slower than any power.
        let c = 0.5 * 10f64.ln();
        let map = MarkovIntervalMap::new(
            vec![0.0, 0.25, 0.5, 0.6, 1.0],
            vec![
                BranchSpec::new(BranchKind::Affine { slope: -4.0, intercept: 1.0 }),
                BranchSpec::new(BranchKind::Affine { slope: 2.0, intercept: -0.5 }),
                BranchSpec::new(BranchKind::Custom {
                    value: Arc::new(move |x: f64| {
                        if x <= 0.5 {
                            0.5
                        } else {
                            0.5 - c / (-(x - 0.5f64).ln())
                        }
                    }),
                    derivative: Arc::new(move |x: f64| {
                        let u = x - 0.5;
                        let l = u.ln();
                        -c / (u * l * l)
                    }),
                }),
                BranchSpec::new(BranchKind::Affine { slope: 2.5, intercept: -1.5 }),
            ],
        );
        let sing = the_singularity(&map).expect("custom log anchor");
        assert_eq!(sing.location, SignedPoint::plus(0.5));
        assert_eq!(sing.holder, HolderClass::NotHolder);
    }

    #[test]
    fn two_singular_anchors_are_both_reported() {
        // Square roots anchored at both ends of the left interval.
        let map = MarkovIntervalMap::new(
            vec![0.0, 0.5, 1.0],
            vec![
                BranchSpec::new(BranchKind::Glued {
                    pieces: vec![
                        (0.0, 0.0625, BranchKind::PowerOffset {
                            anchor: 0.0,
                            coeff: 1.0,
                            alpha: 2.0,
                            offset: 0.0,
                        }),
                        (0.0625, 0.5, BranchKind::DerivativeBlend {
                            x0: 0.0625,
                            x1: 0.5,
                            d0: 2.0,
                            d1: 10.0 / 7.0,
                            y0: 0.25,
                        }),
                    ],
                }),
                BranchSpec::new(BranchKind::Reflected {
                    inner: Box::new(BranchKind::Glued {
                        pieces: vec![
                            (0.0, 0.0625, BranchKind::PowerOffset {
                                anchor: 0.0,
                                coeff: 1.0,
                                alpha: 2.0,
                                offset: 0.0,
                            }),
                            (0.0625, 0.5, BranchKind::DerivativeBlend {
                                x0: 0.0625,
                                x1: 0.5,
                                d0: 2.0,
                                d1: 10.0 / 7.0,
                                y0: 0.25,
                            }),
                        ],
                    }),
                    sum: 1.0,
                }),
            ],
        );
        let all = detect_singularities(&map).unwrap();
        assert_eq!(all.len(), 2);
        assert!(matches!(the_singularity(&map), Err(MapError::MultipleSingularities { count: 2 })));
    }
}
