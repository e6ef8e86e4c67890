//! Two-sided partial-sum bounds for the integral of |log d(x, p)| over
//! the singular-side neighborhood of the singular point p, against the
//! maximal-entropy measure.
//!
//! The neighborhood decomposes along the symbolic orbit of p: with
//! sigma_0 sigma_1 ... the itinerary of the signed orbit of p, the set
//! B_k of points on the singular side whose first k symbols agree with
//! the spine is a one-sided interval shrinking onto p, and
//!
//!   B_k \ B_{k+1} = union over j != sigma_k of the cylinders
//!                   [sigma_0 .. sigma_{k-1} j].
//!
//! Each such cylinder has exact maximal-entropy mass
//! u(sigma_0) v(j) lambda^{-k} / <u, v> (left/right Perron data of the
//! transitive component), and its distance-to-p range pulls back through
//! the spine branches in log form, exactly through singular anchors. The
//! integrand |log d| is therefore bracketed on every piece, giving
//! monotone lower and upper partial sums for the integral over B_1.
//!
//! Points on the non-singular side of p contribute a finite amount for
//! any expanding Markov map (cylinder distances shrink geometrically
//! there), so the one-sided series decides convergence.

use crate::map::signed::tilde_step_with_branch;
use crate::map::singularity::SingularityInfo;
use crate::map::{transitive_component, BranchKind, LocalProfile, MapError, MarkovIntervalMap};
use crate::sft::perron;

/// One ring of the decomposition.
#[derive(Debug, Clone, Copy)]
pub struct SeriesTerm {
    /// Ring index k >= 1 (the ring B_k \ B_{k+1}).
    pub k: usize,
    /// Lower bound for the integral over the ring.
    pub lower_term: f64,
    /// Upper bound for the integral over the ring.
    pub upper_term: f64,
    /// Running sum of lower bounds through this ring.
    pub lower_partial: f64,
    /// Running sum of upper bounds through this ring.
    pub upper_partial: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeriesVerdict {
    /// Upper terms contract geometrically over the final quarter of the
    /// computed range; the tail bound assumes the observed worst-case
    /// ratio persists.
    ConvergesWithBound { total_upper: f64, tail_bound: f64, ratio: f64 },
    /// Lower terms stay bounded away from zero; the slope is the
    /// least-squares growth rate of the lower partial sums per ring.
    DivergesWithRate { slope: f64 },
    /// Neither certificate held at this depth.
    Inconclusive { computed_to: usize },
}

#[derive(Debug, Clone)]
pub struct SeriesBoundReport {
    pub depth: usize,
    /// Itinerary of the signed orbit of the singular point.
    pub spine: Vec<usize>,
    /// Perron eigenvalue of the transitive component carrying the spine.
    pub lambda: f64,
    pub terms: Vec<SeriesTerm>,
    pub verdict: SeriesVerdict,
}

/// Log-distance tracked in both direct and logarithmic form, so rings can
/// be followed past the point where tau itself overflows (a power anchor
/// multiplies tau per pullback, a logarithmic anchor exponentiates it).
#[derive(Debug, Clone, Copy)]
pub(super) struct TauPair {
    pub(super) tau: f64,
    pub(super) log_tau: f64,
}

fn ln_pos(t: f64) -> f64 {
    if t > 0.0 {
        t.ln()
    } else {
        f64::NEG_INFINITY
    }
}

impl TauPair {
    fn from_distance(d: f64) -> TauPair {
        let tau = -d.ln();
        TauPair { tau, log_tau: ln_pos(tau) }
    }
}

/// Pull a log-distance back through one spine branch. Exact (via
/// `pull_tau`) while tau is representable; beyond that the local profile
/// at the spine point gives the update in log form, which stays exact
/// for power anchors and loses only O(1e-15) relative accuracy at
/// iterated-log anchors.
fn pull_tracked(kind: &BranchKind, z: f64, src_side: i8, img_side: i8, p: TauPair) -> TauPair {
    if p.tau.is_finite() {
        let pulled = kind.pull_tau(z, src_side, img_side, p.tau);
        if pulled.is_finite() {
            return TauPair { tau: pulled, log_tau: ln_pos(pulled) };
        }
    }
    match kind.profile_at(z, src_side) {
        LocalProfile::Power { alpha, coeff } => {
            let tau = alpha * (p.tau + coeff.abs().ln());
            let correction = if p.tau.is_finite() { (coeff.abs().ln() / p.tau).ln_1p() } else { 0.0 };
            TauPair { tau, log_tau: alpha.ln() + p.log_tau + correction }
        }
        LocalProfile::LogType { coeff } => {
            TauPair { tau: f64::INFINITY, log_tau: coeff.abs().ln() + p.tau }
        }
        LocalProfile::IterLogType { .. } => {
            // Fixed point of t = eta(t) tau with eta = 2 - 1/ln ln t;
            // ln t ~ ln 2 + ln tau far out.
            let eta = 2.0 - 1.0 / (std::f64::consts::LN_2 + p.log_tau).ln();
            TauPair { tau: eta * p.tau, log_tau: eta.ln() + p.log_tau }
        }
        LocalProfile::Unknown => {
            // No modelled blow-up at this point; the derivative shift is
            // negligible against a tau this large.
            TauPair { tau: p.tau, log_tau: p.log_tau }
        }
    }
}

/// One ring cylinder: its maximal-entropy log-mass and the pulled-back
/// log-distance bracket of its two endpoints.
#[derive(Debug, Clone, Copy)]
pub(super) struct RingPiece {
    pub(super) log_mass: f64,
    pub(super) far: TauPair,
    pub(super) near: TauPair,
}

pub(super) struct RingData {
    pub(super) spine: Vec<usize>,
    /// rings[k - 1] lists the cylinders of the ring B_k \ B_{k+1}.
    pub(super) rings: Vec<Vec<RingPiece>>,
    /// log mu(B_k) for k = 1 ..= depth + 1.
    pub(super) log_spine_mass: Vec<f64>,
    pub(super) lambda: f64,
}

pub(super) fn ring_decomposition(
    map: &MarkovIntervalMap,
    sing: &SingularityInfo,
    depth: usize,
) -> Result<RingData, MapError> {
    assert!(sing.location.side.sign() > 0, "series runs on a right-sided singular point");
    let report = map.validate()?;
    let matrix = map.transition_matrix_from(&report);
    let comp = transitive_component(&matrix, sing.branch_index)?;
    let mut local = vec![None; map.branch_count()];
    for (li, &s) in comp.iter().enumerate() {
        local[s] = Some(li);
    }
    let sub = matrix.restrict(&comp);
    let pd = perron(&sub).expect("Perron data exists on a strongly connected component");
    let ln_lambda = pd.eigenvalue.ln();
    let norm: f64 = pd.left.iter().zip(&pd.right).map(|(u, v)| u * v).sum();

    // Signed orbit of the singular point and the branches it takes.
    let mut points = Vec::with_capacity(depth + 2);
    let mut spine = Vec::with_capacity(depth + 1);
    points.push(sing.location);
    for _ in 0..=depth {
        let (next, branch) = tilde_step_with_branch(map, *points.last().unwrap())?;
        points.push(next);
        spine.push(branch);
    }
    assert_eq!(spine[0], sing.branch_index, "orbit starts in the singular branch");

    let lu0 = local[spine[0]].map(|i| pd.left[i].ln());

    let mut rings: Vec<Vec<RingPiece>> = Vec::with_capacity(depth);
    let mut log_spine_mass = Vec::with_capacity(depth + 1);
    for k in 1..=depth + 1 {
        let in_comp = spine[..k].iter().all(|&s| local[s].is_some());
        log_spine_mass.push(match (lu0, in_comp) {
            (Some(lu0), true) => {
                lu0 + pd.right[local[spine[k - 1]].unwrap()].ln()
                    - norm.ln()
                    - (k - 1) as f64 * ln_lambda
            }
            _ => f64::NEG_INFINITY,
        });
    }
    for k in 1..=depth {
        let mut pieces = Vec::new();
        // Zero mass once the spine leaves the transitive component.
        let in_comp = spine[..k].iter().all(|&s| local[s].is_some());
        if let (Some(lu0), true) = (lu0, in_comp) {
            let zk = points[k];
            for j in matrix.successors(spine[k - 1]) {
                if j == spine[k] {
                    continue;
                }
                let Some(lj) = local[j] else { continue };
                let log_mass = lu0 + pd.right[lj].ln() - norm.ln() - k as f64 * ln_lambda;

                // The interval I_j sits on the spine side of z_k: z_k is
                // the image of an endpoint of the previous spine interval,
                // so the branch image extends from z_k in that direction
                // only, and the adjacent interval is exactly I_{spine[k]},
                // excluded above.
                let (qlo, qhi) = map.interval(j);
                let (d_near, d_far) = if zk.side.sign() > 0 {
                    (qlo - zk.x, qhi - zk.x)
                } else {
                    (zk.x - qhi, zk.x - qlo)
                };
                debug_assert!(d_near > 0.0, "ring cylinder touches the spine point");
                if d_near <= 0.0 {
                    continue;
                }
                let mut near = TauPair::from_distance(d_near);
                let mut far = TauPair::from_distance(d_far);
                for i in (0..k).rev() {
                    let kind = &map.branches[spine[i]].kind;
                    let (src, img) = (points[i].side.sign(), points[i + 1].side.sign());
                    near = pull_tracked(kind, points[i].x, src, img, near);
                    far = pull_tracked(kind, points[i].x, src, img, far);
                }
                pieces.push(RingPiece { log_mass, far, near });
            }
        }
        rings.push(pieces);
    }
    Ok(RingData { spine, rings, log_spine_mass, lambda: pd.eigenvalue })
}

pub fn integral_bounds(
    map: &MarkovIntervalMap,
    sing: &SingularityInfo,
    depth: usize,
) -> Result<SeriesBoundReport, MapError> {
    let rd = ring_decomposition(map, sing, depth)?;

    let mut terms: Vec<SeriesTerm> = Vec::with_capacity(depth);
    let mut lower_partial = 0.0;
    let mut upper_partial = 0.0;
    for (idx, pieces) in rd.rings.iter().enumerate() {
        let mut lower_term = 0.0;
        let mut upper_term = 0.0;
        for piece in pieces {
            // |log d| bounds from the pulled log-distance bracket
            // [far, near] (pullbacks preserve the ordering).
            let RingPiece { log_mass, far, near } = *piece;
            if far.tau >= 0.0 {
                lower_term += (log_mass + far.log_tau).exp();
                upper_term += (log_mass + near.log_tau).exp();
            } else if near.tau > 0.0 {
                upper_term += log_mass.exp() * near.tau.max(-far.tau);
            } else {
                lower_term += log_mass.exp() * -near.tau;
                upper_term += log_mass.exp() * -far.tau;
            }
        }
        lower_partial += lower_term;
        upper_partial += upper_term;
        terms.push(SeriesTerm { k: idx + 1, lower_term, upper_term, lower_partial, upper_partial });
    }

    let verdict = decide(&terms, depth);
    Ok(SeriesBoundReport { depth, spine: rd.spine, lambda: rd.lambda, terms, verdict })
}

fn decide(terms: &[SeriesTerm], depth: usize) -> SeriesVerdict {
    if terms.is_empty() {
        return SeriesVerdict::Inconclusive { computed_to: depth };
    }
    let q0 = terms.len() - (terms.len() / 4).max(1);
    let quarter = &terms[q0..];

    if quarter.iter().all(|t| t.upper_term == 0.0) {
        // The spine ran out of positive-mass rings: the series is a
        // finite sum.
        let total = terms.last().unwrap().upper_partial;
        return SeriesVerdict::ConvergesWithBound { total_upper: total, tail_bound: 0.0, ratio: 0.0 };
    }

    let mut ratio: f64 = 0.0;
    let mut have_ratio = false;
    for w in quarter.windows(2) {
        if w[0].upper_term > 0.0 && w[1].upper_term.is_finite() {
            ratio = ratio.max(w[1].upper_term / w[0].upper_term);
            have_ratio = true;
        }
    }
    if have_ratio && ratio <= 1.0 - 1e-6 {
        let last = terms.last().unwrap();
        let tail_bound = last.upper_term * ratio / (1.0 - ratio);
        return SeriesVerdict::ConvergesWithBound {
            total_upper: last.upper_partial + tail_bound,
            tail_bound,
            ratio,
        };
    }

    if quarter.iter().all(|t| t.lower_term >= 10.0 * f64::EPSILON) {
        // Least-squares slope of the lower partials per ring.
        if quarter.iter().any(|t| !t.lower_partial.is_finite()) {
            return SeriesVerdict::DivergesWithRate { slope: f64::INFINITY };
        }
        let n = quarter.len() as f64;
        let xbar = quarter.iter().map(|t| t.k as f64).sum::<f64>() / n;
        let ybar = quarter.iter().map(|t| t.lower_partial).sum::<f64>() / n;
        let mut num = 0.0;
        let mut den = 0.0;
        for t in quarter {
            num += (t.k as f64 - xbar) * (t.lower_partial - ybar);
            den += (t.k as f64 - xbar) * (t.k as f64 - xbar);
        }
        let slope = if den > 0.0 { num / den } else { f64::INFINITY };
        return SeriesVerdict::DivergesWithRate { slope };
    }

    SeriesVerdict::Inconclusive { computed_to: depth }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::singularity::the_singularity;
    use crate::map::BranchSpec;

    /// Doubling on [0, 1/2], a reciprocal-log branch on [1/2, 1]: the
    /// singular point 1/2 falls onto the fixed point 0 in one step.
    fn log_map() -> MarkovIntervalMap {
        MarkovIntervalMap::new(
            vec![0.0, 0.5, 1.0],
            vec![
                BranchSpec::new(BranchKind::Affine { slope: 2.0, intercept: 0.0 }),
                BranchSpec::new(BranchKind::LogReciprocal {
                    anchor: 0.5,
                    coeff: std::f64::consts::LN_2,
                }),
            ],
        )
    }

    /// Power-law branch glued to a quadratic-matched affine-ish tail on
    /// [0, 1/2], doubling on [1/2, 1]; the singular point 0 is fixed.
    fn power_map(alpha: f64) -> MarkovIntervalMap {
        let delta = 1.0 / (8.0 * alpha);
        let c = (8.0 * alpha).powf(1.0 / alpha) / 4.0;
        let seam = c * delta.powf(1.0 / alpha);
        let d0 = c / alpha * delta.powf(1.0 / alpha - 1.0);
        let d1 = 2.0 * (1.0 - seam) / (0.5 - delta) - d0;
        MarkovIntervalMap::new(
            vec![0.0, 0.5, 1.0],
            vec![
                BranchSpec::new(BranchKind::Glued {
                    pieces: vec![
                        (0.0, delta, BranchKind::PowerOffset {
                            anchor: 0.0,
                            coeff: c,
                            alpha,
                            offset: 0.0,
                        }),
                        (delta, 0.5, BranchKind::DerivativeBlend {
                            x0: delta,
                            x1: 0.5,
                            d0,
                            d1,
                            y0: seam,
                        }),
                    ],
                }),
                BranchSpec::new(BranchKind::Affine { slope: 2.0, intercept: -1.0 }),
            ],
        )
    }

    #[test]
    fn log_map_terms_are_exact_quarters_of_ln_two() {
        let map = log_map();
        let sing = the_singularity(&map).unwrap();
        let r = integral_bounds(&map, &sing, 100).unwrap();

        assert_eq!(&r.spine[..4], &[1, 0, 0, 0]);
        // Ring k: mass 2^{-k-1}, pulled log-distances [ln2 2^{k-1}, ln2 2^k].
        let l2 = std::f64::consts::LN_2;
        for t in &r.terms {
            assert!((t.lower_term - l2 / 4.0).abs() < 1e-12, "k={}: {}", t.k, t.lower_term);
            assert!((t.upper_term - l2 / 2.0).abs() < 1e-12, "k={}: {}", t.k, t.upper_term);
        }
        let last = r.terms.last().unwrap();
        assert!((last.lower_partial - 25.0 * l2).abs() < 1e-9);
        match r.verdict {
            SeriesVerdict::DivergesWithRate { slope } => {
                assert!((slope - l2 / 4.0).abs() < 1e-9, "slope {slope}");
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn square_root_fixed_singularity_has_constant_lower_terms() {
        let map = power_map(2.0);
        let sing = the_singularity(&map).unwrap();
        let r = integral_bounds(&map, &sing, 200).unwrap();

        // Oracle for the eventual lower term: the far ring endpoint pulls
        // back as 1 -> x1 -> x2 by plain inversion, after which every
        // pullback is the exact anchor doubling tau -> 2 tau. The ring
        // mass is 2^{-k-1}, so the lower term settles at tau_2 / 8.
        let b0 = &map.branches[0].kind;
        let x1 = b0.invert(1.0, 0.0, 0.5);
        let x2 = b0.invert(x1, 0.0, 0.5);
        let tau2 = -x2.ln();
        assert!((x1 - 0.5).abs() < 1e-14);
        for t in &r.terms[2..] {
            assert!(
                (t.lower_term - tau2 / 8.0).abs() < 1e-9 * tau2,
                "k={}: {} vs {}",
                t.k,
                t.lower_term,
                tau2 / 8.0
            );
        }
        assert!(matches!(r.verdict, SeriesVerdict::DivergesWithRate { .. }), "{:?}", r.verdict);
    }

    #[test]
    fn shallow_power_singularity_contracts_geometrically() {
        let map = power_map(1.2);
        let sing = the_singularity(&map).unwrap();
        let r = integral_bounds(&map, &sing, 200).unwrap();

        match r.verdict {
            SeriesVerdict::ConvergesWithBound { total_upper, tail_bound, ratio } => {
                // Asymptotic term ratio is alpha / lambda = 0.6.
                assert!(ratio > 0.55 && ratio < 0.66, "ratio {ratio}");
                assert!(tail_bound > 0.0 && tail_bound < 1e-30, "tail {tail_bound}");
                assert!(total_upper.is_finite() && total_upper > 0.0);
                let last = r.terms.last().unwrap();
                assert!(total_upper >= last.upper_partial);
            }
            other => panic!("expected convergence, got {other:?}"),
        }
        // Partial sums are monotone and ordered.
        for w in r.terms.windows(2) {
            assert!(w[1].lower_partial >= w[0].lower_partial);
            assert!(w[1].upper_partial >= w[0].upper_partial);
        }
        for t in &r.terms {
            assert!(t.lower_term <= t.upper_term + 1e-18);
        }
    }

    #[test]
    fn deep_rings_survive_tau_overflow() {
        // At depth 2000 the square-root pullback tau ~ 2^k overflows f64
        // around k = 1030; the log-form tracking must keep terms finite
        // and constant.
        let map = power_map(2.0);
        let sing = the_singularity(&map).unwrap();
        let r = integral_bounds(&map, &sing, 2000).unwrap();
        let t_mid = r.terms[500].lower_term;
        let t_deep = r.terms[1900].lower_term;
        assert!(t_deep.is_finite() && t_deep > 0.0, "deep term {t_deep}");
        assert!((t_deep - t_mid).abs() < 1e-6 * t_mid, "mid {t_mid} deep {t_deep}");
        assert!(matches!(r.verdict, SeriesVerdict::DivergesWithRate { .. }));
    }
}
