//! The adaptedness decision tree for the measure of maximal entropy.
//!
//! A measure is adapted when it integrates |log d(x, p)|, the log
//! distance to the singular point. The decision splits on the recurrence
//! of the singular orbit:
//!
//! * Nonrecurrent (preperiodic) orbit: if the singular branch is Holder
//!   at the anchor, every invariant measure is adapted; if not, no
//!   general rule exists and we fall back to the numerical series.
//! * Periodic orbit of period n: the blow-up strength beta pins down an
//!   entropy band. Entropy above -(1/n) log(1 - beta_upper) forces
//!   adaptedness, entropy below -(1/n) log(1 - beta_lower) forces
//!   nonadaptedness, and beta = 1 (logarithmic-type anchors) forces
//!   nonadaptedness at every entropy. A fixed singular point whose
//!   branch is an exact power law with h = log(alpha) sits exactly on
//!   the band edge and is nonadapted. Anything still undecided is
//!   reported as indeterminate with the band and the two-sided series
//!   bounds attached.
//!
//! Threshold comparisons carry a safety margin: an entropy within
//! `MARGIN` of a band edge is never called either way.

use crate::adapted::beta::{beta_interval, BetaInterval};
use crate::adapted::series::{integral_bounds, SeriesBoundReport};
use crate::map::singularity::{the_singularity, SingularityInfo};
use crate::map::{transitive_component, MapError, MarkovIntervalMap, OrbitClass};
use crate::sft::perron;

/// Safety margin on band-edge comparisons; within it the classifier
/// answers Indeterminate rather than guessing.
const MARGIN: f64 = 1e-6;

/// Tolerance for recognizing h = log(alpha) exactly (the borderline
/// power-law rule).
const POWER_MATCH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdaptednessStatus {
    /// The maximal-entropy measure integrates |log d(x, p)|.
    Adapted,
    /// It does not.
    Nonadapted,
    /// Every invariant measure is adapted (nonrecurrent Holder anchor).
    AllMeasuresAdapted,
    /// No rule applies; see the attached series bounds.
    Indeterminate,
}

/// Which branch of the decision tree produced the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// Nonrecurrent singular orbit, Holder anchor.
    NonrecurrentHolder,
    /// Nonrecurrent singular orbit, anchor not Holder.
    NonrecurrentNotHolder,
    /// beta reaches 1: the blow-up is too strong at any entropy.
    FullStrengthSingularity,
    /// Entropy clears the upper band edge.
    EntropyAboveBand,
    /// Entropy sits below the lower band edge.
    EntropyBelowBand,
    /// Fixed singular point, exact power law, h = log(alpha).
    PowerLawMatchesEntropy,
    /// Entropy lands inside the band and no exact rule applies.
    InsideBand,
}

#[derive(Debug, Clone)]
pub struct AdaptednessVerdict {
    pub status: AdaptednessStatus,
    pub rule: Rule,
    /// Log of the Perron eigenvalue of the transitive component holding
    /// the singular branch.
    pub entropy: f64,
    pub beta: BetaInterval,
    /// Entropy band (lower edge, upper edge) for periodic singular
    /// orbits: -(1/n) log(1 - beta) at the two beta endpoints, infinite
    /// when beta reaches 1. None for nonrecurrent orbits.
    pub band: Option<(f64, f64)>,
    /// Period of the singular orbit when it is periodic.
    pub period: Option<usize>,
    /// Two-sided series bounds, attached whenever no exact rule decided.
    pub series: Option<SeriesBoundReport>,
    /// True when the map was mirrored to put the singular side on the
    /// right before analysis.
    pub reflected: bool,
    pub singularity: SingularityInfo,
}

/// Classify the maximal-entropy measure of a map with exactly one
/// singular point. Left-sided singularities are handled by reflecting
/// the map first (the analysis is mirror-invariant). `depth` controls
/// the series report attached to indeterminate verdicts.
pub fn classify_mme(map: &MarkovIntervalMap, depth: usize) -> Result<AdaptednessVerdict, MapError> {
    let sing = the_singularity(map)?;
    if sing.location.side.sign() > 0 {
        return classify_with(map, &sing, depth);
    }
    let mirrored = map.reflected();
    let sing = the_singularity(&mirrored)?;
    let mut verdict = classify_with(&mirrored, &sing, depth)?;
    verdict.reflected = true;
    Ok(verdict)
}

/// The decision tree itself, for a singularity already in hand (and on
/// the right side of its anchor). Used directly on reduced systems,
/// where the map has several singular anchors and the caller knows
/// which one carries the dynamics.
pub fn classify_with(
    map: &MarkovIntervalMap,
    sing: &SingularityInfo,
    depth: usize,
) -> Result<AdaptednessVerdict, MapError> {
    assert!(
        sing.location.side.sign() > 0,
        "classification runs on a right-sided singular point; reflect the map first"
    );
    let report = map.validate()?;
    let matrix = map.transition_matrix_from(&report);
    let comp = transitive_component(&matrix, sing.branch_index)?;
    let sub = matrix.restrict(&comp);
    let pd = perron(&sub).expect("Perron data exists on a strongly connected component");
    let entropy = pd.eigenvalue.ln();
    let beta = beta_interval(map, sing);

    let verdict = |status, rule, band, period, series| AdaptednessVerdict {
        status,
        rule,
        entropy,
        beta: beta.clone(),
        band,
        period,
        series,
        reflected: false,
        singularity: sing.clone(),
    };

    match sing.orbit {
        OrbitClass::Preperiodic { .. } => {
            if sing.holder.is_holder() {
                Ok(verdict(
                    AdaptednessStatus::AllMeasuresAdapted,
                    Rule::NonrecurrentHolder,
                    None,
                    None,
                    None,
                ))
            } else {
                let series = integral_bounds(map, sing, depth)?;
                Ok(verdict(
                    AdaptednessStatus::Indeterminate,
                    Rule::NonrecurrentNotHolder,
                    None,
                    None,
                    Some(series),
                ))
            }
        }
        OrbitClass::Periodic { period } => {
            let n = period as f64;
            let edge = |b: f64| {
                if 1.0 - b <= 0.0 {
                    f64::INFINITY
                } else {
                    -(1.0 - b).ln() / n
                }
            };
            let band = (edge(beta.lower), edge(beta.upper));
            let some_band = Some(band);
            let np = Some(period);

            if beta.lower >= 1.0 - MARGIN {
                return Ok(verdict(
                    AdaptednessStatus::Nonadapted,
                    Rule::FullStrengthSingularity,
                    some_band,
                    np,
                    None,
                ));
            }
            if entropy > band.1 + MARGIN {
                return Ok(verdict(
                    AdaptednessStatus::Adapted,
                    Rule::EntropyAboveBand,
                    some_band,
                    np,
                    None,
                ));
            }
            if entropy < band.0 - MARGIN {
                return Ok(verdict(
                    AdaptednessStatus::Nonadapted,
                    Rule::EntropyBelowBand,
                    some_band,
                    np,
                    None,
                ));
            }
            if period == 1 {
                if let Some(alpha) = sing.exact_power_alpha() {
                    if (entropy - alpha.ln()).abs() <= POWER_MATCH_TOL {
                        return Ok(verdict(
                            AdaptednessStatus::Nonadapted,
                            Rule::PowerLawMatchesEntropy,
                            some_band,
                            np,
                            None,
                        ));
                    }
                }
            }
            let series = integral_bounds(map, sing, depth)?;
            Ok(verdict(
                AdaptednessStatus::Indeterminate,
                Rule::InsideBand,
                some_band,
                np,
                Some(series),
            ))
        }
    }
}
