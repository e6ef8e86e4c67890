//! Perron eigendata for irreducible nonnegative matrices.
//!
//! Power iteration on a primitive matrix converges directly. A periodic
//! irreducible matrix (cyclic period d > 1) has d eigenvalues of maximal
//! modulus, so plain iteration oscillates; instead we iterate A^d on one
//! cyclic class, where the restriction is primitive, and propagate the
//! eigenvector across the remaining classes by one application of A per
//! class. Both eigenvectors are strictly positive and are normalized to
//! unit Euclidean length, then jointly rescaled so <left, right> = 1.

use super::{cyclic_structure, scc_order, SftError, TransitionMatrix};

const MAX_ITERATIONS: usize = 100_000;
const REL_RESIDUAL: f64 = 1e-13;

/// Spectral radius with matching positive eigenvectors, <left, right> = 1.
#[derive(Debug, Clone)]
pub struct PerronData {
    pub eigenvalue: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

/// Perron data of a 0-1 transition matrix.
pub fn perron(matrix: &TransitionMatrix) -> Result<PerronData, SftError> {
    perron_dense(&matrix.to_dense())
}

/// Perron data of a general nonnegative matrix with irreducible support.
pub fn perron_dense(a: &[Vec<f64>]) -> Result<PerronData, SftError> {
    let n = a.len();
    assert!(n > 0, "empty matrix");
    for row in a {
        assert_eq!(row.len(), n, "matrix must be square");
        assert!(row.iter().all(|&e| e >= 0.0), "matrix entries must be nonnegative");
    }
    let support = TransitionMatrix::from_bool_rows(
        &a.iter().map(|row| row.iter().map(|&e| e > 0.0).collect()).collect::<Vec<_>>(),
    );
    let scc = scc_order(&support);
    if !(scc.components.len() == 1 && scc.cyclic[0]) {
        return Err(SftError::NotIrreducible { components: scc.components.len() });
    }
    let cyc = cyclic_structure(&support)?;
    let d = cyc.period;
    let block = &cyc.classes[0];

    // Iterate A^d (resp. (A^T)^d) on the distinguished class, where the
    // restriction is primitive.
    let fwd = |x: &[f64]| {
        let mut v = embed(n, block, x);
        for _ in 0..d {
            v = apply(a, &v);
        }
        extract(&v, block)
    };
    let bwd = |x: &[f64]| {
        let mut v = embed(n, block, x);
        for _ in 0..d {
            v = apply_transpose(a, &v);
        }
        extract(&v, block)
    };
    let (lambda_d, right_block) = power_iterate(block.len(), fwd)?;
    let (_, left_block) = power_iterate(block.len(), bwd)?;
    let lambda = if d == 1 { lambda_d } else { lambda_d.powf(1.0 / d as f64) };

    // Propagate across cyclic classes: A carries class k+1 data to class k,
    // A^T carries class k data to class k+1, each losing a factor lambda.
    let mut right = embed(n, block, &right_block);
    if d > 1 {
        let mut carried = right.clone();
        for _ in 0..d - 1 {
            carried = apply(a, &carried);
            for e in carried.iter_mut() {
                *e /= lambda;
            }
            for i in 0..n {
                if carried[i] != 0.0 {
                    right[i] = carried[i];
                }
            }
        }
    }
    let mut left = embed(n, block, &left_block);
    if d > 1 {
        let mut carried = left.clone();
        for _ in 0..d - 1 {
            carried = apply_transpose(a, &carried);
            for e in carried.iter_mut() {
                *e /= lambda;
            }
            for i in 0..n {
                if carried[i] != 0.0 {
                    left[i] = carried[i];
                }
            }
        }
    }

    normalize(&mut right);
    normalize(&mut left);
    let pairing: f64 = left.iter().zip(&right).map(|(l, r)| l * r).sum();
    assert!(pairing > 0.0, "eigenvector pairing must be positive");
    let scale = pairing.sqrt();
    for e in right.iter_mut() {
        *e /= scale;
    }
    for e in left.iter_mut() {
        *e /= scale;
    }
    Ok(PerronData { eigenvalue: lambda, left, right })
}

/// Dense n-th power of a 0-1 matrix, as floats.
pub fn matrix_power_dense(matrix: &TransitionMatrix, n: usize) -> Vec<Vec<f64>> {
    let k = matrix.size();
    let mut result: Vec<Vec<f64>> =
        (0..k).map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let base = matrix.to_dense();
    for _ in 0..n {
        result = mat_mul(&result, &base);
    }
    result
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

fn apply(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(x).map(|(&e, &v)| e * v).sum()).collect()
}

fn apply_transpose(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut out = vec![0.0; n];
    for (i, row) in a.iter().enumerate() {
        let xi = x[i];
        if xi == 0.0 {
            continue;
        }
        for j in 0..n {
            out[j] += row[j] * xi;
        }
    }
    out
}

fn embed(n: usize, support: &[usize], x: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0; n];
    for (&i, &e) in support.iter().zip(x) {
        v[i] = e;
    }
    v
}

fn extract(v: &[f64], support: &[usize]) -> Vec<f64> {
    support.iter().map(|&i| v[i]).collect()
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|e| e * e).sum::<f64>().sqrt();
    assert!(norm > 0.0, "cannot normalize the zero vector");
    for e in v.iter_mut() {
        *e /= norm;
    }
}

/// Power iteration with Rayleigh-quotient eigenvalue estimates; stops when
/// the relative residual drops below REL_RESIDUAL.
fn power_iterate(dim: usize, op: impl Fn(&[f64]) -> Vec<f64>) -> Result<(f64, Vec<f64>), SftError> {
    let mut x = vec![1.0 / (dim as f64).sqrt(); dim];
    let mut residual = f64::INFINITY;
    for iter in 0..MAX_ITERATIONS {
        let y = op(&x);
        let norm_sq: f64 = x.iter().map(|e| e * e).sum();
        let rayleigh: f64 = y.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() / norm_sq;
        assert!(rayleigh > 0.0, "spectral radius of an irreducible matrix is positive");
        residual = y
            .iter()
            .zip(&x)
            .map(|(&yi, &xi)| (yi - rayleigh * xi).abs())
            .fold(0.0f64, f64::max);
        let scale: f64 = y.iter().map(|e| e * e).sum::<f64>().sqrt();
        x = y.into_iter().map(|e| e / scale).collect();
        if residual <= REL_RESIDUAL * rayleigh {
            // One more application pins the Rayleigh quotient to the
            // converged vector.
            let y = op(&x);
            let lambda: f64 = y.iter().zip(&x).map(|(a, b)| a * b).sum();
            return Ok((lambda, x));
        }
        let _ = iter;
    }
    Err(SftError::NoConvergence { iterations: MAX_ITERATIONS, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_shift_on_two_symbols() {
        let m = TransitionMatrix::new(&[vec![1, 1], vec![1, 1]]);
        let p = perron(&m).unwrap();
        assert!((p.eigenvalue - 2.0).abs() < 1e-12, "eigenvalue {}", p.eigenvalue);
        let r = 1.0 / 2.0_f64.sqrt();
        for e in p.left.iter().chain(&p.right) {
            assert!((e - r).abs() < 1e-10, "uniform eigenvector expected, got {e}");
        }
    }

    #[test]
    fn golden_mean_shift() {
        let m = TransitionMatrix::new(&[vec![1, 1], vec![1, 0]]);
        let p = perron(&m).unwrap();
        let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
        assert!((p.eigenvalue - phi).abs() < 1e-12, "eigenvalue {}", p.eigenvalue);
        // Symmetric matrix: left and right eigenvectors agree.
        for (l, r) in p.left.iter().zip(&p.right) {
            assert!((l - r).abs() < 1e-10);
        }
        // Check the eigenvector equation directly.
        assert!((p.right[0] + p.right[1] - phi * p.right[0]).abs() < 1e-10);
        assert!((p.right[0] - phi * p.right[1]).abs() < 1e-10);
        assert!(p.right.iter().all(|&e| e > 0.0));
    }

    #[test]
    fn swap_permutation_has_unit_eigenvalue() {
        let m = TransitionMatrix::new(&[vec![0, 1], vec![1, 0]]);
        let p = perron(&m).unwrap();
        assert!((p.eigenvalue - 1.0).abs() < 1e-12);
        let r = 1.0 / 2.0_f64.sqrt();
        for e in p.left.iter().chain(&p.right) {
            assert!((e - r).abs() < 1e-10, "uniform eigenvector expected, got {e}");
        }
    }

    #[test]
    fn period_two_staircase() {
        // 0 -> {1, 2}, 1 -> 0, 2 -> 0: period 2, eigenvalue sqrt(2).
        let m = TransitionMatrix::new(&[vec![0, 1, 1], vec![1, 0, 0], vec![1, 0, 0]]);
        let p = perron(&m).unwrap();
        assert!((p.eigenvalue - 2.0_f64.sqrt()).abs() < 1e-12, "eigenvalue {}", p.eigenvalue);
        // Eigenvector equation A r = lambda r.
        let l = p.eigenvalue;
        assert!((p.right[1] + p.right[2] - l * p.right[0]).abs() < 1e-10);
        assert!((p.right[0] - l * p.right[1]).abs() < 1e-10);
        assert!((p.right[0] - l * p.right[2]).abs() < 1e-10);
        let pairing: f64 = p.left.iter().zip(&p.right).map(|(a, b)| a * b).sum();
        assert!((pairing - 1.0).abs() < 1e-10, "pairing {pairing}");
    }

    #[test]
    fn dense_weighted_matrix() {
        // [[0, 2], [3, 0]] has spectral radius sqrt(6) and period 2.
        let a = vec![vec![0.0, 2.0], vec![3.0, 0.0]];
        let p = perron_dense(&a).unwrap();
        assert!((p.eigenvalue - 6.0_f64.sqrt()).abs() < 1e-12, "eigenvalue {}", p.eigenvalue);
        let l = p.eigenvalue;
        assert!((2.0 * p.right[1] - l * p.right[0]).abs() < 1e-10);
        assert!((3.0 * p.right[0] - l * p.right[1]).abs() < 1e-10);
    }

    #[test]
    fn reducible_matrix_is_rejected() {
        let a = vec![vec![1.0, 1.0], vec![0.0, 1.0]];
        assert!(matches!(perron_dense(&a), Err(SftError::NotIrreducible { .. })));
    }

    #[test]
    fn matrix_power_counts_paths() {
        let m = TransitionMatrix::new(&[vec![1, 1], vec![1, 0]]);
        let p5 = matrix_power_dense(&m, 5);
        // Path counts in the golden-mean graph are Fibonacci numbers.
        assert_eq!(p5[0][0], 8.0);
        assert_eq!(p5[0][1], 5.0);
        assert_eq!(p5[1][0], 5.0);
        assert_eq!(p5[1][1], 3.0);
    }

    #[test]
    fn power_eigenvalue_matches_power_of_eigenvalue() {
        let m = TransitionMatrix::new(&[vec![1, 1], vec![1, 0]]);
        let lambda = perron(&m).unwrap().eigenvalue;
        for n in [2usize, 3, 5] {
            let pn = perron_dense(&matrix_power_dense(&m, n)).unwrap();
            assert!(
                (pn.eigenvalue - lambda.powi(n as i32)).abs() < 1e-9 * lambda.powi(n as i32),
                "power {n}: {} vs {}",
                pn.eigenvalue,
                lambda.powi(n as i32)
            );
        }
    }
}
