//! The example gallery: exact builders for the maps the analysis is
//! exercised on, the closed-form renewal measure with polynomial return
//! weights, and the family induced by Lorenz-flow eigenvalue data.
//!
//! Every builder returns a validating Markov map; the tests pin each
//! one's entropy, singularity data, and adaptedness verdict, so the
//! gallery doubles as a regression suite for the whole pipeline.

use crate::adapted::{classify_mme, AdaptednessStatus, AdaptednessVerdict};
use crate::map::{BranchKind, BranchSpec, MapError, MarkovIntervalMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("rho must lie in (0, e^(-e^e)) and keep the completion expanding; got {rho}")]
    BadRho { rho: f64 },
    #[error("return-weight exponent must exceed 2 for a finite mean return time; got {exponent}")]
    ExponentTooSmall { exponent: f64 },
    #[error("eigenvalues must satisfy lambda1 > 0 > lambda3 >= -lambda1 > lambda2 and -lambda3 < lambda1; got ({lambda1}, {lambda2}, {lambda3})")]
    BadEigenvalues { lambda1: f64, lambda2: f64, lambda3: f64 },
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Power-law singularity of exponent alpha fixed at 0: x^(1/alpha)
/// rescaled to pass through (1/(8 alpha), 1/4), completed by the affine
/// derivative blend to (1/2, 1), with doubling on the right half. The
/// transition structure is the full 2-shift, so the entropy is log 2 at
/// every alpha.
pub fn make_power_adapted(alpha: f64) -> MarkovIntervalMap {
    assert!(alpha > 1.0, "power singularity needs alpha > 1, got {alpha}");
    let delta = 1.0 / (8.0 * alpha);
    let c = (8.0 * alpha).powf(1.0 / alpha) / 4.0;
    let seam = c * delta.powf(1.0 / alpha);
    let d0 = c / alpha * delta.powf(1.0 / alpha - 1.0);
    let d1 = 2.0 * (1.0 - seam) / (0.5 - delta) - d0;
    assert!(d1 > 1.0, "completion stays expanding for alpha in (1, 8]");
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
                    (delta, 0.5, BranchKind::DerivativeBlend { x0: delta, x1: 0.5, d0, d1, y0: seam }),
                ],
            }),
            BranchSpec::new(BranchKind::Affine { slope: 2.0, intercept: -1.0 }),
        ],
    )
}

/// The square-root map: sqrt(x) on [0, 1/16], blended to reach 1 at 1/2,
/// doubling on [1/2, 1]. The singular fixed point at 0 has beta = 1/2
/// and the entropy equals log 2 = log alpha, the borderline where the
/// maximal-entropy measure fails to integrate the log distance.
pub fn make_eqnonadapt() -> MarkovIntervalMap {
    MarkovIntervalMap::new(
        vec![0.0, 0.5, 1.0],
        vec![
            BranchSpec::new(BranchKind::Glued {
                pieces: vec![
                    (0.0, 1.0 / 16.0, BranchKind::PowerOffset {
                        anchor: 0.0,
                        coeff: 1.0,
                        alpha: 2.0,
                        offset: 0.0,
                    }),
                    (1.0 / 16.0, 0.5, BranchKind::DerivativeBlend {
                        x0: 1.0 / 16.0,
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

/// Iterated-logarithm singularity at the fixed point 0: x^(1/eta) with
/// eta(x) = 2 - 1/log log(-log x) on [0, rho], blended to (1/2, 1),
/// doubling on the right half. Beta sits exactly at 1/2 like the square
/// root, but the slow correction makes the defining integral converge.
pub fn make_eqadapt(rho: f64) -> Result<MarkovIntervalMap, ConstructionError> {
    let rho_max = (-std::f64::consts::E.powf(std::f64::consts::E)).exp();
    if !(rho > 0.0 && rho < rho_max) {
        return Err(ConstructionError::BadRho { rho });
    }
    let head = BranchKind::IterLogPower { rho };
    let seam = head.value(rho);
    let d0 = head.derivative(rho);
    let d1 = 2.0 * (1.0 - seam) / (0.5 - rho) - d0;
    if !(d0 > 1.0 && d1 > 1.0) {
        // rho so small that the branch already exits too steeply for an
        // expanding affine-derivative completion.
        return Err(ConstructionError::BadRho { rho });
    }
    let map = MarkovIntervalMap::new(
        vec![0.0, 0.5, 1.0],
        vec![
            BranchSpec::new(BranchKind::Glued {
                pieces: vec![
                    (0.0, rho, head),
                    (rho, 0.5, BranchKind::DerivativeBlend { x0: rho, x1: 0.5, d0, d1, y0: seam }),
                ],
            }),
            BranchSpec::new(BranchKind::Affine { slope: 2.0, intercept: -1.0 }),
        ],
    );
    map.validate()?;
    Ok(map)
}

/// Doubling on the left half, reciprocal-logarithm branch on the right:
/// the singular point 1/2 falls onto the fixed point 0, the blow-up is
/// slower than every power (beta = 1), and the branch is not Holder.
pub fn make_nonpolynonadapt() -> MarkovIntervalMap {
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

/// Square-root singularity at 1/2 whose orbit falls onto the fixed point
/// 0 and never returns: sqrt(x - 1/2) on [1/2, 9/16], blended to (1, 1),
/// doubling on the left half.
pub fn make_fig_c() -> MarkovIntervalMap {
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

/// Square-root singularity on a genuine period-2 orbit of the signed
/// dynamics: 0.3 (from the right) maps to 0 and back. The transition
/// structure is golden-mean, so the reduced second-iterate system has
/// entropy 2 log(golden ratio).
pub fn make_fig_b() -> MarkovIntervalMap {
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
                    (p, seam_x, BranchKind::PowerOffset { anchor: p, coeff: 1.0, alpha: 2.0, offset: 0.0 }),
                    (seam_x, 1.0, BranchKind::DerivativeBlend { x0: seam_x, x1: 1.0, d0, d1, y0: seam_y }),
                ],
            }),
        ],
    )
}

/// A singular coordinate that is a fixed point of the map but not of the
/// signed dynamics: the singular branch decreases, so the right side of
/// 1/2 maps to the left side, and the singularity is nonrecurrent even
/// though f(1/2) = 1/2.
pub fn make_fig1_counterexample() -> MarkovIntervalMap {
    fig1_with_singular_branch(BranchKind::PowerOffset {
        anchor: 0.5,
        coeff: -(2.5_f64.sqrt()),
        alpha: 2.0,
        offset: 0.5,
    })
}

/// The same shape with the square root replaced by a reciprocal-log
/// drop, which is not Holder at the anchor.
pub fn make_fig1_notholder() -> MarkovIntervalMap {
    // 1/2 - c/|log(x - 1/2)| with c chosen so the branch ends at 0 when
    // x - 1/2 = 1/10.
    let c = 0.5 * 10.0_f64.ln();
    fig1_with_singular_branch(BranchKind::Composite {
        chain: vec![
            BranchKind::LogReciprocal { anchor: 0.5, coeff: c },
            BranchKind::Affine { slope: -1.0, intercept: 0.5 },
        ],
    })
}

fn fig1_with_singular_branch(kind: BranchKind) -> MarkovIntervalMap {
    MarkovIntervalMap::new(
        vec![0.0, 0.25, 0.5, 0.6, 1.0],
        vec![
            BranchSpec::new(BranchKind::Affine { slope: -4.0, intercept: 1.0 }),
            BranchSpec::new(BranchKind::Affine { slope: 2.0, intercept: -0.5 }),
            BranchSpec::new(kind),
            BranchSpec::new(BranchKind::Affine { slope: 2.5, intercept: -1.5 }),
        ],
    )
}

/// Look a gallery map up by its CLI name.
pub fn by_name(name: &str) -> Option<MarkovIntervalMap> {
    match name {
        "eqnonadapt" => Some(make_eqnonadapt()),
        "eqadapt" => Some(make_eqadapt(1e-8).expect("default rho is valid")),
        "nonpolynonadapt" => Some(make_nonpolynonadapt()),
        "fig_b" => Some(make_fig_b()),
        "fig_c" => Some(make_fig_c()),
        "fig1" => Some(make_fig1_counterexample()),
        "fig1_notholder" => Some(make_fig1_notholder()),
        _ => None,
    }
}

pub const GALLERY_NAMES: &[&str] =
    &["eqnonadapt", "eqadapt", "nonpolynonadapt", "fig_b", "fig_c", "fig1", "fig1_notholder"];

/// Partial sums of the analytic series certifying that the iterated-log
/// map integrates the log distance: term m is 2^(-m) eta_m^(m+1) with
/// eta_m = 2 - 1/log((m+1) log 2 + log|log rho|).
#[derive(Debug, Clone)]
pub struct AnalyticSeries {
    pub terms: Vec<f64>,
    pub partials: Vec<f64>,
    /// Bound on everything beyond the last computed term.
    pub tail_bound: f64,
    /// Last partial sum plus the tail bound.
    pub total_upper: f64,
    /// First index (1-based, like the terms) whose remaining contribution
    /// including the tail stays below the requested tolerance.
    pub stabilized_at: Option<usize>,
}

pub fn eqadapt_series(rho: f64, max_m: usize, tol: f64) -> Result<AnalyticSeries, ConstructionError> {
    let rho_max = (-std::f64::consts::E.powf(std::f64::consts::E)).exp();
    if !(rho > 0.0 && rho < rho_max) {
        return Err(ConstructionError::BadRho { rho });
    }
    assert!(max_m >= 400, "the tail bound needs a few hundred terms to take hold");
    let l = (-rho.ln()).ln();
    let lam = |m: usize| ((m as f64 + 1.0) * std::f64::consts::LN_2 + l).ln();

    let mut terms = Vec::with_capacity(max_m);
    let mut partials = Vec::with_capacity(max_m);
    let mut sum = 0.0;
    for m in 1..=max_m {
        let eta = 2.0 - 1.0 / lam(m);
        let t = (-(m as f64) * std::f64::consts::LN_2 + (m as f64 + 1.0) * eta.ln()).exp();
        sum += t;
        terms.push(t);
        partials.push(sum);
    }

    // Since log eta_m <= log 2 - 1/(2 Lambda_m), term m is at most
    // 2 exp(-(m+1) / (2 Lambda_m)), and once sqrt(m+1) >= 2 Lambda_m the
    // exponent dominates sqrt(m+1); the gap widens with m because Lambda
    // grows logarithmically. Summing the sqrt-exponential envelope gives
    // the closed tail bound below.
    let n = max_m as f64;
    assert!(
        (n + 1.0).sqrt() >= 2.0 * lam(max_m) + 1.0,
        "tail bound regime not reached at m = {max_m}"
    );
    let tail_bound = 4.0 * ((n + 1.0).sqrt() + 1.0) * (-(n + 1.0).sqrt()).exp();
    let total_upper = sum + tail_bound;

    let stabilized_at = (0..max_m).find(|&i| (sum - partials[i]) + tail_bound < tol).map(|i| i + 1);
    Ok(AnalyticSeries { terms, partials, tail_bound, total_upper, stabilized_at })
}

/// Renewal (first-return) measure with polynomial return weights
/// p_n = c / n^s: the closed-form invariant measure of the countable
/// renewal shift, carrying positive entropy by the entropy-over-mean
/// quotient while assigning the log distance infinite mass.
#[derive(Debug, Clone)]
pub struct NonsingMeasure {
    pub exponent: f64,
    /// c = 1 / zeta(s).
    pub normalizer: f64,
    /// p_n for n = 1..=n_tail.
    weights: Vec<f64>,
    /// mu([0^n 1]) = sum of p_i over i > n, for n = 0..=n_tail.
    masses: Vec<f64>,
    /// Mean return time: sum of n p_n.
    pub return_time_mean: f64,
    /// Entropy over mean return time.
    pub entropy: f64,
}

impl NonsingMeasure {
    pub fn weight(&self, n: usize) -> f64 {
        assert!(n >= 1 && n <= self.weights.len(), "weight index out of range");
        self.weights[n - 1]
    }

    /// Mass of the cylinder spending exactly n more steps in the tower
    /// before returning: mu([0^n 1]).
    pub fn cylinder_mass(&self, n: usize) -> f64 {
        assert!(n < self.masses.len(), "cylinder index out of range");
        self.masses[n]
    }

    pub fn max_index(&self) -> usize {
        self.weights.len()
    }

    /// Partial sum of n * mu([0^n 1]) for n <= n_max: the log-distance
    /// integral truncated at return time n_max. Unbounded in n_max
    /// whenever s <= 3, which is the nonadaptedness witness.
    pub fn log_weighted_partial(&self, n_max: usize) -> f64 {
        assert!(n_max < self.masses.len(), "partial-sum index out of range");
        let mut sum = 0.0;
        for n in (1..=n_max).rev() {
            sum += n as f64 * self.masses[n];
        }
        sum
    }
}

/// Tail of sum over n > nn of n^(-s), by midpoint-rule integration; the
/// error is a few orders below the f64 resolution of the head sums.
fn power_tail(s: f64, nn: usize) -> f64 {
    (nn as f64 + 0.5).powf(1.0 - s) / (s - 1.0)
}

pub fn nonsing_measure(s: f64, n_tail: usize) -> Result<NonsingMeasure, ConstructionError> {
    if s <= 2.0 {
        return Err(ConstructionError::ExponentTooSmall { exponent: s });
    }
    assert!(n_tail >= 1000, "tail truncation too coarse");

    // Backward cumulative sums keep the small terms from being absorbed.
    let mut masses = vec![0.0; n_tail + 1];
    masses[n_tail] = power_tail(s, n_tail);
    for n in (0..n_tail).rev() {
        masses[n] = masses[n + 1] + ((n + 1) as f64).powf(-s);
    }
    let zeta = masses[0];
    let c = 1.0 / zeta;

    let mut weights = Vec::with_capacity(n_tail);
    for n in 1..=n_tail {
        weights.push(c * (n as f64).powf(-s));
    }
    for m in masses.iter_mut() {
        *m *= c;
    }

    let mut mean = power_tail(s - 1.0, n_tail);
    let mut neg_log_sum = 0.0;
    for n in (1..=n_tail).rev() {
        let nf = n as f64;
        mean += nf.powf(1.0 - s);
        // -p_n log p_n = c n^(-s) (s log n - log c); the omitted tail is
        // below 1e-15 of the head for any s > 2 and n_tail >= 1000.
        neg_log_sum += c * nf.powf(-s) * (s * nf.ln() - c.ln());
    }
    mean *= c;
    let entropy = neg_log_sum / mean;

    Ok(NonsingMeasure { exponent: s, normalizer: c, weights, masses, return_time_mean: mean, entropy })
}

/// Eigenvalue data of a Lorenz-like flow at the origin, with the derived
/// branch exponent of the induced one-dimensional return map.
#[derive(Debug, Clone, Copy)]
pub struct LorenzParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    /// B = -lambda3 / lambda1, in [1/2, 1).
    pub b: f64,
    /// alpha = 1 / B, in (1, 2].
    pub alpha: f64,
}

impl LorenzParams {
    pub fn new(lambda1: f64, lambda2: f64, lambda3: f64) -> Result<Self, ConstructionError> {
        let ok = lambda1 > 0.0
            && lambda2 < 0.0
            && lambda3 < 0.0
            && lambda1 / 2.0 <= -lambda3
            && -lambda3 < lambda1
            && lambda1 < -lambda2;
        if !ok {
            return Err(ConstructionError::BadEigenvalues { lambda1, lambda2, lambda3 });
        }
        let b = -lambda3 / lambda1;
        Ok(LorenzParams { lambda1, lambda2, lambda3, b, alpha: 1.0 / b })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LorenzScenario {
    /// The critical orbit is periodic with the given period under a
    /// return map of the given entropy.
    PeriodicCritical { period: usize, entropy: f64 },
    /// The critical orbit never returns to the critical point.
    NonperiodicCritical,
}

#[derive(Debug, Clone)]
pub struct LorenzFamilyReport {
    pub params: LorenzParams,
    pub scenario: LorenzScenario,
    /// Verdict from the eigenvalue arithmetic alone.
    pub status: AdaptednessStatus,
    pub log_alpha: f64,
    /// n * h for the periodic scenario.
    pub threshold: Option<f64>,
    /// Illustrative sample map with the same branch exponent, and the
    /// full analysis of it. Its period and entropy are its own (fixed by
    /// the 2-interval Markov structure), not the scenario's.
    pub sample: MarkovIntervalMap,
    pub sample_verdict: AdaptednessVerdict,
}

const LORENZ_MARGIN: f64 = 1e-6;

/// Classify the maximal-entropy measure of the induced Lorenz return
/// map from eigenvalue data, and cross-validate the branch-exponent
/// arithmetic on a concrete sample map.
pub fn lorenz_family(
    params: LorenzParams,
    scenario: LorenzScenario,
) -> Result<LorenzFamilyReport, ConstructionError> {
    let log_alpha = params.alpha.ln();
    let (status, threshold) = match scenario {
        LorenzScenario::PeriodicCritical { period, entropy } => {
            let nh = period as f64 * entropy;
            let status = if log_alpha < nh - LORENZ_MARGIN {
                AdaptednessStatus::Adapted
            } else if log_alpha > nh + LORENZ_MARGIN {
                AdaptednessStatus::Nonadapted
            } else {
                AdaptednessStatus::Indeterminate
            };
            (status, Some(nh))
        }
        LorenzScenario::NonperiodicCritical => (AdaptednessStatus::AllMeasuresAdapted, None),
    };

    let sample = lorenz_sample_map(&params, &scenario);
    let sample_verdict = classify_mme(&sample, 200)?;

    Ok(LorenzFamilyReport { params, scenario, status, log_alpha, threshold, sample, sample_verdict })
}

/// A 2-interval Markov map whose left branch descends from 1 with the
/// Lorenz exponent: 1 - c x^(1/alpha) onto [x1, 1], followed by an
/// affine branch covering the whole interval. A decreasing second branch
/// puts the singular orbit on a period-2 cycle; an increasing one parks
/// it on the fixed point at 1.
fn lorenz_sample_map(params: &LorenzParams, scenario: &LorenzScenario) -> MarkovIntervalMap {
    let alpha = params.alpha;
    let x1 = 0.9 / (1.0 + alpha);
    let c = (1.0 - x1) / x1.powf(1.0 / alpha);
    let second = match scenario {
        LorenzScenario::PeriodicCritical { .. } => BranchKind::Affine {
            slope: -1.0 / (1.0 - x1),
            intercept: 1.0 / (1.0 - x1),
        },
        LorenzScenario::NonperiodicCritical => BranchKind::Affine {
            slope: 1.0 / (1.0 - x1),
            intercept: -x1 / (1.0 - x1),
        },
    };
    MarkovIntervalMap::new(
        vec![0.0, x1, 1.0],
        vec![
            BranchSpec::new(BranchKind::PowerOffset { anchor: 0.0, coeff: -c, alpha, offset: 1.0 }),
            BranchSpec::new(second),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adapted::{beta_interval, Rule, SeriesVerdict};
    use crate::map::signed::tilde_step;
    use crate::map::singularity::the_singularity;
    use crate::map::{HolderClass, OrbitClass, Side};

    #[test]
    fn every_gallery_map_validates_and_expands() {
        for name in GALLERY_NAMES {
            let map = by_name(name).unwrap();
            let report = map.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(report.lambda_exp > 1.0, "{name}: lambda_exp = {}", report.lambda_exp);
        }
        assert!(by_name("no_such_map").is_none());
    }

    #[test]
    fn borderline_square_root_map_matches_its_expectations() {
        let map = make_eqnonadapt();
        let sing = the_singularity(&map).unwrap();
        assert_eq!(sing.location.x, 0.0);
        assert_eq!(sing.location.side, Side::Plus);
        assert_eq!(sing.orbit, OrbitClass::Periodic { period: 1 });
        assert!(matches!(sing.holder, HolderClass::Holder { exponent, .. } if exponent == 0.5));

        let beta = beta_interval(&map, &sing);
        assert_eq!((beta.lower, beta.upper), (0.5, 0.5));

        let v = classify_mme(&map, 100).unwrap();
        assert!((v.entropy - std::f64::consts::LN_2).abs() <= 1e-12);
        assert_eq!(v.status, AdaptednessStatus::Nonadapted);
        assert_eq!(v.rule, Rule::PowerLawMatchesEntropy);

        // The generic power builder at alpha = 2 is the same map.
        let generic = make_power_adapted(2.0);
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            assert!((map.apply(x).unwrap() - generic.apply(x).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn iterated_log_map_is_indeterminate_with_a_convergent_certificate() {
        let map = make_eqadapt(1e-8).unwrap();
        let sing = the_singularity(&map).unwrap();
        assert_eq!(sing.orbit, OrbitClass::Periodic { period: 1 });
        let beta = beta_interval(&map, &sing);
        assert_eq!((beta.lower, beta.upper), (0.5, 0.5));

        let v = classify_mme(&map, 60).unwrap();
        assert_eq!(v.status, AdaptednessStatus::Indeterminate);
        assert_eq!(v.rule, Rule::InsideBand);
        let (lo, hi) = v.band.unwrap();
        assert!((lo - std::f64::consts::LN_2).abs() <= 1e-12);
        assert!((hi - std::f64::consts::LN_2).abs() <= 1e-12);

        let series = eqadapt_series(1e-8, 2000, 1e-10).unwrap();
        let m = series.stabilized_at.expect("series stabilizes");
        assert!(m <= 10_000, "stabilized at {m}");
        assert!(series.total_upper.is_finite() && series.tail_bound < 1e-10);
        // Terms eventually decay: the certificate is a convergent sum.
        assert!(series.terms[1999] < series.terms[999] && series.terms[999] < series.terms[399]);
    }

    #[test]
    fn bad_rho_is_rejected() {
        assert!(matches!(make_eqadapt(0.5), Err(ConstructionError::BadRho { .. })));
        assert!(matches!(make_eqadapt(0.0), Err(ConstructionError::BadRho { .. })));
        assert!(matches!(make_eqadapt(1e-300), Err(ConstructionError::BadRho { .. })));
    }

    #[test]
    fn log_branch_map_diverges_by_rule_two() {
        let map = make_nonpolynonadapt();
        let sing = the_singularity(&map).unwrap();
        assert_eq!(sing.orbit, OrbitClass::Preperiodic { preperiod: 1, period: 1 });
        assert_eq!(sing.holder, HolderClass::NotHolder);

        let v = classify_mme(&map, 200).unwrap();
        assert_eq!(v.status, AdaptednessStatus::Indeterminate);
        assert_eq!(v.rule, Rule::NonrecurrentNotHolder);
        let report = v.series.unwrap();
        assert!(matches!(report.verdict, SeriesVerdict::DivergesWithRate { .. }));
        // Every ring contributes exactly log(2)/4 to the lower sum.
        let n = report.terms.len() as f64;
        assert!((report.terms.last().unwrap().lower_partial - n / 4.0 * std::f64::consts::LN_2).abs() < 1e-9);
        for t in &report.terms {
            assert!((t.lower_term - 0.25 * std::f64::consts::LN_2).abs() < 1e-12, "k = {}", t.k);
            assert!((t.upper_term - 0.5 * std::f64::consts::LN_2).abs() < 1e-12, "k = {}", t.k);
        }
    }

    #[test]
    fn nonreturning_root_map_adapts_every_measure() {
        let map = make_fig_c();
        let sing = the_singularity(&map).unwrap();
        assert!(matches!(sing.orbit, OrbitClass::Preperiodic { .. }));
        let beta = beta_interval(&map, &sing);
        assert_eq!((beta.lower, beta.upper), (0.5, 0.5));
        let v = classify_mme(&map, 100).unwrap();
        assert_eq!(v.status, AdaptednessStatus::AllMeasuresAdapted);
    }

    #[test]
    fn decreasing_singular_branch_breaks_the_period() {
        let map = make_fig1_counterexample();
        let sing = the_singularity(&map).unwrap();
        assert_eq!(sing.location.x, 0.5);
        assert_eq!(sing.location.side, Side::Plus);
        // f(1/2) = 1/2, but the right side lands on the left side.
        let image = tilde_step(&map, sing.location).unwrap();
        assert_eq!(image.x, 0.5);
        assert_eq!(image.side, Side::Minus);
        assert!(matches!(sing.orbit, OrbitClass::Preperiodic { .. }));

        let v = classify_mme(&map, 100).unwrap();
        assert_eq!(v.status, AdaptednessStatus::AllMeasuresAdapted);
        assert_eq!(v.rule, Rule::NonrecurrentHolder);
    }

    #[test]
    fn notholder_variant_falls_to_the_series() {
        let map = make_fig1_notholder();
        let sing = the_singularity(&map).unwrap();
        assert_eq!(sing.holder, HolderClass::NotHolder);
        let v = classify_mme(&map, 80).unwrap();
        assert_eq!(v.status, AdaptednessStatus::Indeterminate);
        assert_eq!(v.rule, Rule::NonrecurrentNotHolder);
        assert!(v.series.is_some());
    }

    #[test]
    fn renewal_weights_follow_the_integral_brackets() {
        let m = nonsing_measure(3.0, 200_000).unwrap();
        // Normalizer is the reciprocal of zeta(3).
        assert!((1.0 / m.normalizer - 1.2020569031595942).abs() < 1e-12);
        assert!((m.cylinder_mass(0) - 1.0).abs() < 1e-12);
        for n in 0..1000 {
            // Telescoping: mass(n) = mass(n+1) + p_{n+1}.
            let gap = m.cylinder_mass(n) - m.cylinder_mass(n + 1) - m.weight(n + 1);
            assert!(gap.abs() < 1e-12, "telescoping fails at {n}: {gap:e}");
            assert!(m.cylinder_mass(n + 1) < m.cylinder_mass(n));
        }
        for n in 0..=100 {
            let bound = m.normalizer / (2.0 * ((n + 1) as f64).powi(2));
            assert!(m.cylinder_mass(n) >= bound, "n = {n}");
        }
        assert!(m.entropy > 0.0);
        // Mean return time is zeta(2)/zeta(3).
        let zeta2 = std::f64::consts::PI * std::f64::consts::PI / 6.0;
        assert!((m.return_time_mean - zeta2 * m.normalizer).abs() < 1e-12);
    }

    #[test]
    fn small_exponents_are_rejected() {
        assert!(matches!(
            nonsing_measure(2.0, 10_000),
            Err(ConstructionError::ExponentTooSmall { .. })
        ));
    }

    #[test]
    fn lorenz_arithmetic_matches_hand_thresholds() {
        let p = LorenzParams::new(1.0, -1.1, -0.6).unwrap();
        assert!((p.alpha - 5.0 / 3.0).abs() < 1e-12);
        let r = lorenz_family(p, LorenzScenario::PeriodicCritical {
            period: 1,
            entropy: std::f64::consts::LN_2,
        })
        .unwrap();
        assert_eq!(r.status, AdaptednessStatus::Adapted);
        assert!((r.log_alpha - (5.0 / 3.0_f64).ln()).abs() < 1e-12);

        let steep = LorenzParams::new(1.0, -1.1, -0.51).unwrap();
        let r2 = lorenz_family(steep, LorenzScenario::PeriodicCritical {
            period: 1,
            entropy: std::f64::consts::LN_2,
        })
        .unwrap();
        assert_eq!(r2.status, AdaptednessStatus::Adapted, "log(1.9608) < log 2");

        assert!(matches!(
            LorenzParams::new(1.0, -1.1, -0.45),
            Err(ConstructionError::BadEigenvalues { .. })
        ));
    }

    #[test]
    fn lorenz_samples_cross_validate() {
        let p = LorenzParams::new(1.0, -1.1, -0.6).unwrap();

        let periodic = lorenz_family(p, LorenzScenario::PeriodicCritical {
            period: 1,
            entropy: std::f64::consts::LN_2,
        })
        .unwrap();
        let sv = &periodic.sample_verdict;
        // The sample's own data: period-2 singular orbit, golden-mean
        // entropy; the eigenvalue arithmetic on those numbers must agree
        // with the full classifier.
        assert_eq!(sv.period, Some(2));
        let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
        assert!((sv.entropy - phi.ln()).abs() < 1e-9);
        assert_eq!(sv.status, AdaptednessStatus::Adapted);
        assert!(periodic.log_alpha < 2.0 * sv.entropy);

        let wandering = lorenz_family(p, LorenzScenario::NonperiodicCritical).unwrap();
        assert_eq!(wandering.status, AdaptednessStatus::AllMeasuresAdapted);
        assert_eq!(wandering.sample_verdict.status, AdaptednessStatus::AllMeasuresAdapted);
    }
}
