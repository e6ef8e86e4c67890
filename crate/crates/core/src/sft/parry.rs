//! The measure of maximal entropy on an irreducible subshift of finite
//! type, represented through its cylinder masses.
//!
//! For an irreducible transition matrix with spectral radius lambda and
//! positive eigenvectors u (left) and v (right) normalized so <u, v> = 1,
//! the unique maximal-entropy measure assigns the cylinder [w] the mass
//!
//!   mu([w]) = u(w_first) * v(w_last) * lambda^(-(|w| - 1))
//!
//! when w is admissible, and 0 otherwise. Its entropy is ln lambda, the
//! stationary law is p(i) = u(i) v(i), and the transition kernel is
//! P(i, j) = A(i, j) v(j) / (lambda v(i)).

use super::{perron, SftError, TransitionMatrix};

/// Anything that can report the mass of a cylinder set [w].
///
/// Masses must be shift-consistent: summing over one-symbol extensions on
/// the right reproduces the mass of the shorter cylinder, and likewise on
/// the left after one application of the shift.
pub trait CylinderMeasure {
    fn cylinder_mass(&self, word: &[usize]) -> Result<f64, SftError>;
}

/// Two-sided Gibbs envelope: c1 <= mu([w]) * lambda^{|w|} <= c2 over all
/// admissible words w.
#[derive(Debug, Clone, Copy)]
pub struct GibbsConstants {
    pub lower: f64,
    pub upper: f64,
}

/// Maximal-entropy measure of an irreducible transition matrix.
#[derive(Debug, Clone)]
pub struct ParryMeasure {
    matrix: TransitionMatrix,
    eigenvalue: f64,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl ParryMeasure {
    pub fn new(matrix: &TransitionMatrix) -> Result<Self, SftError> {
        for row in 0..matrix.size() {
            if matrix.successors(row).next().is_none() {
                return Err(SftError::DeadRow { row });
            }
        }
        let p = perron(matrix)?;
        Ok(ParryMeasure {
            matrix: matrix.clone(),
            eigenvalue: p.eigenvalue,
            left: p.left,
            right: p.right,
        })
    }

    pub fn matrix(&self) -> &TransitionMatrix {
        &self.matrix
    }

    pub fn eigenvalue(&self) -> f64 {
        self.eigenvalue
    }

    /// Metric entropy, ln(spectral radius).
    pub fn entropy(&self) -> f64 {
        self.eigenvalue.ln()
    }

    pub fn left_eigenvector(&self) -> &[f64] {
        &self.left
    }

    pub fn right_eigenvector(&self) -> &[f64] {
        &self.right
    }

    /// Stationary probability of each symbol, p(i) = u(i) v(i).
    pub fn stationary(&self) -> Vec<f64> {
        self.left.iter().zip(&self.right).map(|(u, v)| u * v).collect()
    }

    /// Markov kernel P(i, j) = A(i, j) v(j) / (lambda v(i)).
    pub fn transition_kernel(&self) -> Vec<Vec<f64>> {
        let n = self.matrix.size();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if self.matrix.get(i, j) {
                            self.right[j] / (self.eigenvalue * self.right[i])
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Gibbs envelope constants lower = lambda * min u(i) v(j) and
    /// upper = lambda * max u(i) v(j).
    pub fn gibbs_constants(&self) -> GibbsConstants {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for &u in &self.left {
            for &v in &self.right {
                lo = lo.min(u * v);
                hi = hi.max(u * v);
            }
        }
        GibbsConstants { lower: self.eigenvalue * lo, upper: self.eigenvalue * hi }
    }
}

impl CylinderMeasure for ParryMeasure {
    fn cylinder_mass(&self, word: &[usize]) -> Result<f64, SftError> {
        if word.is_empty() {
            return Err(SftError::EmptyWord);
        }
        if !self.matrix.is_admissible(word)? {
            return Ok(0.0);
        }
        let len = word.len() as i32;
        Ok(self.left[word[0]] * self.right[*word.last().unwrap()] * self.eigenvalue.powi(1 - len))
    }
}
