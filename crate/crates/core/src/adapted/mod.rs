//! The adaptedness analysis: does the measure of maximal entropy of a
//! Markov interval map integrate the logarithmic distance to the singular
//! point, and with what quantitative bounds?
//!
//! The pipeline is: estimate the singular strength (the beta interval),
//! reduce a periodic singular orbit to a fixed one by passing to a power
//! of the map, decide adaptedness by comparing entropy against the beta
//! band, and back every borderline answer with two-sided partial-sum
//! bounds on the defining integral.

pub mod beta;
pub mod classify;
pub mod dimension;
pub mod reduce;
pub mod series;
pub mod shadow;

pub use beta::{beta_interval, beta_interval_sampled, BetaInterval, BetaSource};
pub use classify::{classify_mme, classify_with, AdaptednessStatus, AdaptednessVerdict, Rule};
pub use dimension::{ledrappier_dimension, lyapunov_mme, DimensionBracket, LyapunovBracket};
pub use reduce::{period_reduce, ReducedSystem, ReductionFacts};
pub use series::{integral_bounds, SeriesBoundReport, SeriesTerm, SeriesVerdict};
pub use shadow::{dk_shadowing_check, ShadowingLevel, ShadowingReport};

/// Small gallery of maps shared by the unit tests in this module.
#[cfg(test)]
pub(crate) mod test_maps {
    use crate::map::{BranchKind, BranchSpec, MarkovIntervalMap};

    /// Power-law branch of exponent alpha anchored at the fixed point 0,
    /// blended to cover [0, 1], doubling on the right half.
    pub(crate) fn power_fixed(alpha: f64) -> MarkovIntervalMap {
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

    /// Doubling on the left half, reciprocal-log branch on the right:
    /// the singular point 1/2 is preperiodic (falls on the fixed point 0)
    /// and the singularity is not Holder.
    pub(crate) fn log_preperiodic() -> MarkovIntervalMap {
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

    /// Square-root singularity at 1/2 that is preperiodic (1/2 -> 0 -> 0)
    /// and Holder with exponent 1/2.
    pub(crate) fn root_preperiodic() -> MarkovIntervalMap {
        MarkovIntervalMap::new(
            vec![0.0, 0.5, 1.0],
            vec![
                BranchSpec::new(BranchKind::Affine { slope: 2.0, intercept: 0.0 }),
                BranchSpec::new(BranchKind::Glued {
                    pieces: vec![
                        (0.5, 0.5625, BranchKind::PowerOffset {
                            anchor: 0.5,
                            coeff: 1.0,
                            alpha: 2.0,
                            offset: 0.0,
                        }),
                        (0.5625, 1.0, BranchKind::DerivativeBlend {
                            x0: 0.5625,
                            x1: 1.0,
                            d0: 2.0,
                            d1: 10.0 / 7.0,
                            y0: 0.25,
                        }),
                    ],
                }),
            ],
        )
    }

    /// Golden-mean transition structure with a square-root singularity on
    /// a period-2 orbit: 0.3+ -> 0+ -> 0.3+.
    pub(crate) fn root_period_two() -> MarkovIntervalMap {
        let p = 0.3;
        let w = 0.2_f64;
        let seam_x = p + w;
        let seam_y = w.sqrt();
        let d0 = 1.0 / (2.0 * w.sqrt());
        let d1 = 2.0 * (1.0 - seam_y) / (1.0 - seam_x) - d0;
        MarkovIntervalMap::new(
            vec![0.0, p, 1.0],
            vec![
                BranchSpec::new(BranchKind::Affine { slope: 7.0 / 3.0, intercept: p }),
                BranchSpec::new(BranchKind::Glued {
                    pieces: vec![
                        (p, seam_x, BranchKind::PowerOffset {
                            anchor: p,
                            coeff: 1.0,
                            alpha: 2.0,
                            offset: 0.0,
                        }),
                        (seam_x, 1.0, BranchKind::DerivativeBlend {
                            x0: seam_x,
                            x1: 1.0,
                            d0,
                            d1,
                            y0: seam_y,
                        }),
                    ],
                }),
            ],
        )
    }
}
