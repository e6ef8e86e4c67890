//! Averaging correspondence between shift-invariant measures on a periodic
//! irreducible subshift and measures on its return block.
//!
//! When the transition matrix has cyclic period n with classes C_0, ...,
//! C_{n-1}, a measure nu that lives on sequences starting in one
//! distinguished class is spread over the whole shift by averaging the n
//! shift translates:
//!
//!   lift(nu)([w]) = (1/n) * sum over prefixes z with |z| = t, z_0 in the
//!                   distinguished class and z w admissible of nu([z w]),
//!
//! where t is the unique offset in 0..n aligning the class of w_0 with the
//! distinguished class; every other offset contributes nothing. In the
//! reverse direction a shift-invariant measure mu gives each cyclic class
//! mass 1/n, so restriction is plain rescaling:
//!
//!   restrict(mu)([w]) = n * mu([w])   (w starting in the distinguished
//!                                      class; other cylinders get 0).
//!
//! The two maps are mutually inverse, exactly, cylinder by cylinder.

use super::{cyclic_structure, CyclicStructure, CylinderMeasure, SftError, TransitionMatrix};

#[derive(Debug, Clone)]
pub struct MeasureCorrespondence {
    matrix: TransitionMatrix,
    cyclic: CyclicStructure,
    distinguished: usize,
}

/// Builds the correspondence anchored at the cyclic class of `base_symbol`.
/// `period` must equal the cyclic period of the matrix.
pub fn measure_correspondence(
    matrix: &TransitionMatrix,
    base_symbol: usize,
    period: usize,
) -> Result<MeasureCorrespondence, SftError> {
    if base_symbol >= matrix.size() {
        return Err(SftError::SymbolOutOfRange { symbol: base_symbol, alphabet: matrix.size() });
    }
    let cyclic = cyclic_structure(matrix)?;
    if cyclic.period != period {
        return Err(SftError::PeriodMismatch { expected: cyclic.period, got: period });
    }
    let distinguished = cyclic.class_of[base_symbol];
    Ok(MeasureCorrespondence { matrix: matrix.clone(), cyclic, distinguished })
}

impl MeasureCorrespondence {
    pub fn period(&self) -> usize {
        self.cyclic.period
    }

    /// Symbols of the distinguished cyclic class.
    pub fn return_block_symbols(&self) -> &[usize] {
        &self.cyclic.classes[self.distinguished]
    }

    /// Offset aligning the class of `symbol` with the distinguished class.
    fn offset(&self, symbol: usize) -> usize {
        let n = self.cyclic.period;
        (self.cyclic.class_of[symbol] + n - self.distinguished) % n
    }

    /// Mass that the lifted (shift-invariant) measure gives the cylinder [w].
    pub fn lift_mass(&self, nu: &dyn CylinderMeasure, word: &[usize]) -> Result<f64, SftError> {
        if word.is_empty() {
            return Err(SftError::EmptyWord);
        }
        if !self.matrix.is_admissible(word)? {
            return Ok(0.0);
        }
        let n = self.cyclic.period as f64;
        let t = self.offset(word[0]);
        if t == 0 {
            return Ok(nu.cylinder_mass(word)? / n);
        }
        // Sum nu([z w]) over admissible prefixes z of length t whose first
        // symbol lies in the distinguished class. Built back to front.
        let mut total = 0.0;
        let mut prefix = vec![0usize; t];
        self.sum_prefixes(nu, word, &mut prefix, t, &mut total)?;
        Ok(total / n)
    }

    fn sum_prefixes(
        &self,
        nu: &dyn CylinderMeasure,
        word: &[usize],
        prefix: &mut [usize],
        remaining: usize,
        total: &mut f64,
    ) -> Result<(), SftError> {
        let next = if remaining == prefix.len() { word[0] } else { prefix[remaining] };
        if remaining == 0 {
            let mut full = Vec::with_capacity(prefix.len() + word.len());
            full.extend_from_slice(prefix);
            full.extend_from_slice(word);
            *total += nu.cylinder_mass(&full)?;
            return Ok(());
        }
        for s in self.matrix.predecessors(next) {
            // The class chain is forced, so only one class survives at each
            // slot; this is just a cheap pruning of the enumeration.
            if remaining == 1 && self.cyclic.class_of[s] != self.distinguished {
                continue;
            }
            prefix[remaining - 1] = s;
            self.sum_prefixes(nu, word, prefix, remaining - 1, total)?;
        }
        Ok(())
    }

    /// Mass that the restricted (return-block) measure gives the cylinder
    /// [w]. Words starting outside the distinguished class carry no mass.
    pub fn restrict_mass(&self, mu: &dyn CylinderMeasure, word: &[usize]) -> Result<f64, SftError> {
        if word.is_empty() {
            return Err(SftError::EmptyWord);
        }
        if !self.matrix.is_admissible(word)? {
            return Ok(0.0);
        }
        if self.cyclic.class_of[word[0]] != self.distinguished {
            return Ok(0.0);
        }
        Ok(self.cyclic.period as f64 * mu.cylinder_mass(word)?)
    }

    pub fn lift<'a>(&'a self, nu: &'a dyn CylinderMeasure) -> LiftedMeasure<'a> {
        LiftedMeasure { corr: self, nu }
    }

    pub fn restrict<'a>(&'a self, mu: &'a dyn CylinderMeasure) -> RestrictedMeasure<'a> {
        RestrictedMeasure { corr: self, mu }
    }
}

/// Shift-invariant measure obtained by averaging a return-block measure.
pub struct LiftedMeasure<'a> {
    corr: &'a MeasureCorrespondence,
    nu: &'a dyn CylinderMeasure,
}

impl CylinderMeasure for LiftedMeasure<'_> {
    fn cylinder_mass(&self, word: &[usize]) -> Result<f64, SftError> {
        self.corr.lift_mass(self.nu, word)
    }
}

/// Return-block measure obtained by restricting a shift-invariant one.
pub struct RestrictedMeasure<'a> {
    corr: &'a MeasureCorrespondence,
    mu: &'a dyn CylinderMeasure,
}

impl CylinderMeasure for RestrictedMeasure<'_> {
    fn cylinder_mass(&self, word: &[usize]) -> Result<f64, SftError> {
        self.corr.restrict_mass(self.mu, word)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{admissible_words, ParryMeasure};
    use super::*;

    fn staircase() -> TransitionMatrix {
        // 0 -> {1, 2}, 1 -> 0, 2 -> 0: period 2 with classes {0} and {1, 2}.
        TransitionMatrix::new(&[vec![0, 1, 1], vec![1, 0, 0], vec![1, 0, 0]])
    }

    #[test]
    fn period_mismatch_is_reported() {
        let m = staircase();
        match measure_correspondence(&m, 0, 3) {
            Err(SftError::PeriodMismatch { expected: 2, got: 3 }) => {}
            other => panic!("expected period mismatch, got {other:?}"),
        }
    }

    #[test]
    fn round_trip_restrict_then_lift_recovers_invariant_measure() {
        for m in [staircase(), TransitionMatrix::new(&[vec![0, 1], vec![1, 0]])] {
            let corr = measure_correspondence(&m, 0, 2).unwrap();
            let mu = ParryMeasure::new(&m).unwrap();
            let nu = corr.restrict(&mu);
            for len in 1..=6usize {
                for word in admissible_words(&m, len) {
                    let lifted = corr.lift_mass(&nu, &word).unwrap();
                    let original = mu.cylinder_mass(&word).unwrap();
                    assert!(
                        (lifted - original).abs() <= 1e-12,
                        "word {word:?}: lifted {lifted} vs original {original}"
                    );
                }
            }
        }
    }

    #[test]
    fn round_trip_lift_then_restrict_recovers_block_measure() {
        let m = staircase();
        let corr = measure_correspondence(&m, 0, 2).unwrap();
        let mu = ParryMeasure::new(&m).unwrap();
        let nu = corr.restrict(&mu);
        let lifted = corr.lift(&nu);
        for len in 1..=6usize {
            for word in admissible_words(&m, len) {
                let back = corr.restrict_mass(&lifted, &word).unwrap();
                let original = nu.cylinder_mass(&word).unwrap();
                assert!(
                    (back - original).abs() <= 1e-12,
                    "word {word:?}: back {back} vs original {original}"
                );
            }
        }
    }

    #[test]
    fn lifted_measure_is_shift_consistent() {
        let m = staircase();
        let corr = measure_correspondence(&m, 0, 2).unwrap();
        let mu = ParryMeasure::new(&m).unwrap();
        let nu = corr.restrict(&mu);
        let lifted = corr.lift(&nu);
        for word in admissible_words(&m, 3) {
            let base = lifted.cylinder_mass(&word).unwrap();
            let right: f64 = (0..3)
                .map(|j| {
                    let mut ext = word.clone();
                    ext.push(j);
                    lifted.cylinder_mass(&ext).unwrap()
                })
                .sum();
            assert!((base - right).abs() < 1e-13, "right extension of {word:?}");
            let left: f64 = (0..3)
                .map(|i| {
                    let mut ext = vec![i];
                    ext.extend_from_slice(&word);
                    lifted.cylinder_mass(&ext).unwrap()
                })
                .sum();
            assert!((base - left).abs() < 1e-13, "left extension of {word:?}");
        }
    }

    #[test]
    fn restricted_mass_vanishes_off_the_distinguished_class() {
        let m = staircase();
        let corr = measure_correspondence(&m, 0, 2).unwrap();
        let mu = ParryMeasure::new(&m).unwrap();
        assert_eq!(corr.restrict_mass(&mu, &[1, 0]).unwrap(), 0.0);
        assert_eq!(corr.restrict_mass(&mu, &[2, 0, 1]).unwrap(), 0.0);
        assert!(corr.restrict_mass(&mu, &[0, 1, 0]).unwrap() > 0.0);
    }

    #[test]
    fn aperiodic_case_degenerates_to_identity() {
        let m = TransitionMatrix::new(&[vec![1, 1], vec![1, 0]]);
        let corr = measure_correspondence(&m, 0, 1).unwrap();
        let mu = ParryMeasure::new(&m).unwrap();
        for word in admissible_words(&m, 4) {
            let lifted = corr.lift_mass(&mu, &word).unwrap();
            let restricted = corr.restrict_mass(&mu, &word).unwrap();
            let original = mu.cylinder_mass(&word).unwrap();
            assert!((lifted - original).abs() < 1e-15);
            assert!((restricted - original).abs() < 1e-15);
        }
    }

    #[test]
    fn total_lifted_mass_is_one() {
        let m = staircase();
        let corr = measure_correspondence(&m, 0, 2).unwrap();
        let mu = ParryMeasure::new(&m).unwrap();
        let nu = corr.restrict(&mu);
        let lifted = corr.lift(&nu);
        let total: f64 =
            (0..3).map(|s| lifted.cylinder_mass(&[s]).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12, "total {total}");
    }
}
