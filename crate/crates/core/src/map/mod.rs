//! Piecewise-monotone expanding interval maps whose branch images align
//! with the partition (the Markov property), together with the signed
//! orbit machinery, singularity detection, and symbolic coding built on
//! top of them.

pub mod branch;
pub mod coding;
pub mod signed;
pub mod singularity;

pub use branch::{BranchKind, LocalProfile};
pub use coding::{cylinder_bracket, itinerary, transitive_component, b_range_on_cylinder};
pub use signed::{OrbitClass, Side, SignedPoint};
pub use singularity::{detect_singularities, HolderClass, SingularityInfo};

use crate::sft::TransitionMatrix;
use thiserror::Error;

/// Default tolerance for matching branch-image endpoints to partition
/// points.
pub const EPS_MARKOV: f64 = 1e-9;
/// Default tolerance for snapping points to the partition grid.
pub const EPS_GRID: f64 = 1e-12;
/// Interior sample count per branch when validating monotonicity and
/// expansion.
const GRID_SAMPLES: usize = 1000;

#[derive(Debug, Error)]
pub enum MapError {
    #[error("branch {index}: image endpoint {value} misses every partition point by {mismatch:e}")]
    NotMarkov { index: usize, value: f64, mismatch: f64 },
    #[error("branch {index} fails expansion at x = {witness}: |f'| = {derivative}")]
    NotExpanding { index: usize, witness: f64, derivative: f64 },
    #[error("branch {index} is not strictly monotone near x = {witness}")]
    NotMonotone { index: usize, witness: f64 },
    #[error("point {x} lies outside the domain")]
    UntrackedPoint { x: f64 },
    #[error("no point with divergent derivative was found on the partition grid")]
    NoSingularity,
    #[error("{count} singular points found where exactly one is required")]
    MultipleSingularities { count: usize },
    #[error("symbol {seed} belongs to no recurrent component of the transition graph")]
    EmptyComponent { seed: usize },
    #[error("orbit lands on a partition point at step {step}")]
    OrbitHitsBoundary { step: usize },
    #[error("word is not admissible for this map")]
    Inadmissible,
    #[error("cylinder closure touches the singular point; use the anchored branch form instead")]
    BracketTouchesSingularity,
    #[error("analysis requires a nonrecurrent singular orbit with Holder regularity")]
    HypothesesNotMet,
    #[error("the restricted system has zero entropy")]
    ZeroEntropy,
}

/// A branch together with its declared orientation (+1 increasing,
/// -1 decreasing). The orientation is redundant with the derivative sign
/// and is cross-checked during validation.
#[derive(Debug, Clone)]
pub struct BranchSpec {
    pub kind: BranchKind,
    pub orientation: i8,
}

impl BranchSpec {
    pub fn new(kind: BranchKind) -> Self {
        BranchSpec { kind, orientation: 0 }
    }

    pub fn oriented(kind: BranchKind, orientation: i8) -> Self {
        BranchSpec { kind, orientation }
    }
}

/// Outcome of `MarkovIntervalMap::validate`.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    /// Infimum of |f'| over the sampled grid (the expansion constant).
    pub lambda_exp: f64,
    /// Branch images snapped to partition points: (left image, right image)
    /// in increasing order regardless of orientation.
    pub branch_images: Vec<(f64, f64)>,
    /// Sampled orientation of each branch.
    pub orientations: Vec<i8>,
    /// Worst endpoint-to-partition mismatch seen (before snapping).
    pub max_markov_mismatch: f64,
}

/// A piecewise-monotone map of an interval whose branch images are unions
/// of partition intervals.
#[derive(Debug, Clone)]
pub struct MarkovIntervalMap {
    /// Strictly increasing partition points x_0 < x_1 < ... < x_m; the
    /// domain is [x_0, x_m] and branch i lives on [x_i, x_{i+1}].
    pub partition: Vec<f64>,
    pub branches: Vec<BranchSpec>,
    /// Values assigned at partition points for plain (un-signed) orbit
    /// evaluation; defaults to the right-hand branch limit.
    pub endpoint_values: Vec<f64>,
    pub eps_markov: f64,
    pub eps_grid: f64,
}

impl MarkovIntervalMap {
    pub fn new(partition: Vec<f64>, branches: Vec<BranchSpec>) -> Self {
        assert!(partition.len() >= 2, "partition needs at least two points");
        assert_eq!(
            branches.len() + 1,
            partition.len(),
            "need exactly one branch per partition interval"
        );
        for w in partition.windows(2) {
            assert!(w[0] < w[1], "partition points must be strictly increasing");
        }
        let endpoint_values: Vec<f64> = partition
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                if i < branches.len() {
                    branches[i].kind.value(x)
                } else {
                    branches[i - 1].kind.value(x)
                }
            })
            .collect();
        MarkovIntervalMap {
            partition,
            branches,
            endpoint_values,
            eps_markov: EPS_MARKOV,
            eps_grid: EPS_GRID,
        }
    }

    pub fn with_tolerances(mut self, eps_markov: f64, eps_grid: f64) -> Self {
        self.eps_markov = eps_markov;
        self.eps_grid = eps_grid;
        self
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.partition[0], *self.partition.last().unwrap())
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    /// Interval [x_i, x_{i+1}] carrying branch i.
    pub fn interval(&self, i: usize) -> (f64, f64) {
        (self.partition[i], self.partition[i + 1])
    }

    /// Index of the partition point within eps_grid of x, if any.
    pub fn grid_index(&self, x: f64) -> Option<usize> {
        self.partition.iter().position(|&p| (x - p).abs() <= self.eps_grid)
    }

    /// Index of the branch whose open interval contains x; None on grid
    /// points and outside the domain.
    pub fn branch_index_of(&self, x: f64) -> Option<usize> {
        let (a, b) = self.domain();
        if x <= a || x >= b || self.grid_index(x).is_some() {
            return None;
        }
        let i = match self.partition.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        Some(i.min(self.branches.len() - 1))
    }

    /// Plain forward evaluation; partition points use the stored endpoint
    /// values.
    pub fn apply(&self, x: f64) -> Result<f64, MapError> {
        if let Some(i) = self.grid_index(x) {
            return Ok(self.endpoint_values[i]);
        }
        match self.branch_index_of(x) {
            Some(i) => Ok(self.branches[i].kind.value(x)),
            None => Err(MapError::UntrackedPoint { x }),
        }
    }

    /// Check the defining conditions on a sampled grid: strict
    /// monotonicity, uniform expansion, and branch-image alignment with
    /// the partition. Returns the expansion constant and snapped images.
    pub fn validate(&self) -> Result<ValidationReport, MapError> {
        let mut lambda_exp = f64::INFINITY;
        let mut branch_images = Vec::with_capacity(self.branches.len());
        let mut orientations = Vec::with_capacity(self.branches.len());
        let mut max_mismatch: f64 = 0.0;

        for (i, spec) in self.branches.iter().enumerate() {
            let (lo, hi) = self.interval(i);
            let width = hi - lo;

            // Orientation and monotonicity from interior samples; the
            // derivative may blow up at the endpoints, which is fine.
            let mut sign = 0.0f64;
            let mut prev_value = f64::NAN;
            let mut prev_x = f64::NAN;
            for k in 0..=GRID_SAMPLES {
                let x = lo + width * (k as f64) / (GRID_SAMPLES as f64);
                let interior = k > 0 && k < GRID_SAMPLES;
                if interior {
                    let d = spec.kind.derivative(x);
                    if d == 0.0 || d.is_nan() {
                        return Err(MapError::NotMonotone { index: i, witness: x });
                    }
                    if sign == 0.0 {
                        sign = d.signum();
                    } else if d.signum() != sign {
                        return Err(MapError::NotMonotone { index: i, witness: x });
                    }
                    let mag = d.abs();
                    if mag <= 1.0 + 1e-9 {
                        return Err(MapError::NotExpanding { index: i, witness: x, derivative: mag });
                    }
                    if mag < lambda_exp {
                        lambda_exp = mag;
                    }
                }
                let v = spec.kind.value(x);
                if !prev_value.is_nan() && sign != 0.0 && (v - prev_value).signum() != sign {
                    return Err(MapError::NotMonotone { index: i, witness: 0.5 * (prev_x + x) });
                }
                prev_value = v;
                prev_x = x;
            }
            let sign = if sign == 0.0 { 1.0 } else { sign };
            if spec.orientation != 0 && spec.orientation as f64 != sign {
                return Err(MapError::NotMonotone { index: i, witness: 0.5 * (lo + hi) });
            }
            orientations.push(sign as i8);

            // Branch endpoints must land on partition points.
            let mut snapped = [0.0f64; 2];
            for (slot, &x) in [lo, hi].iter().enumerate() {
                let v = spec.kind.value(x);
                let (best, dist) = self
                    .partition
                    .iter()
                    .map(|&p| (p, (p - v).abs()))
                    .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                    .unwrap();
                if dist > self.eps_markov {
                    return Err(MapError::NotMarkov { index: i, value: v, mismatch: dist });
                }
                if dist > max_mismatch {
                    max_mismatch = dist;
                }
                snapped[slot] = best;
            }
            let (ilo, ihi) = if snapped[0] <= snapped[1] {
                (snapped[0], snapped[1])
            } else {
                (snapped[1], snapped[0])
            };
            branch_images.push((ilo, ihi));
        }

        Ok(ValidationReport { lambda_exp, branch_images, orientations, max_markov_mismatch: max_mismatch })
    }

    /// Transition matrix: A[i][k] = 1 when the image of branch i covers
    /// interval k. Requires a valid map (panics on validation failure).
    pub fn transition_matrix(&self) -> TransitionMatrix {
        let report = self.validate().expect("transition matrix of an invalid map");
        self.transition_matrix_from(&report)
    }

    pub fn transition_matrix_from(&self, report: &ValidationReport) -> TransitionMatrix {
        let m = self.branches.len();
        let mut rows = vec![vec![0u8; m]; m];
        for (i, &(ilo, ihi)) in report.branch_images.iter().enumerate() {
            for k in 0..m {
                let (klo, khi) = self.interval(k);
                if klo >= ilo - self.eps_grid && khi <= ihi + self.eps_grid {
                    rows[i][k] = 1;
                }
            }
        }
        TransitionMatrix::new(&rows)
    }

    /// The map conjugated by x -> (a + b) - x, which swaps orientation and
    /// moves a right-anchored singular point to a left anchor.
    pub fn reflected(&self) -> MarkovIntervalMap {
        let (a, b) = self.domain();
        let sum = a + b;
        let partition: Vec<f64> = self.partition.iter().rev().map(|&x| sum - x).collect();
        let branches: Vec<BranchSpec> = self
            .branches
            .iter()
            .rev()
            .map(|spec| BranchSpec {
                kind: BranchKind::Reflected { inner: Box::new(spec.kind.clone()), sum },
                orientation: spec.orientation,
            })
            .collect();
        let mut map = MarkovIntervalMap::new(partition, branches);
        map.eps_markov = self.eps_markov;
        map.eps_grid = self.eps_grid;
        map
    }
}
