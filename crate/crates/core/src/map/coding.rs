//! Symbolic coding of a Markov interval map: itineraries, cylinder
//! brackets, and the recurrent component of the transition graph that an
//! analysis is confined to.

use super::{MapError, MarkovIntervalMap};
use crate::map::signed::SignedPoint;
use crate::sft::{scc_order, TransitionMatrix};

/// Symbols of the strongly connected, recurrent component of the
/// transition graph containing `seed`, sorted increasing. Errors if the
/// seed never returns to itself (a wandering symbol).
pub fn transitive_component(matrix: &TransitionMatrix, seed: usize) -> Result<Vec<usize>, MapError> {
    let n = matrix.size();
    assert!(seed < n, "seed symbol {seed} out of range for {n} symbols");
    let scc = scc_order(matrix);
    let comp = scc.component_of[seed];
    let mut symbols: Vec<usize> = scc.components[comp].clone();
    symbols.sort_unstable();
    // Recurrent means the component carries a cycle: more than one vertex,
    // or a self-loop.
    let recurrent = symbols.len() > 1 || matrix.get(seed, seed);
    if !recurrent {
        return Err(MapError::EmptyComponent { seed });
    }
    Ok(symbols)
}

/// First `depth` symbols of the itinerary of x: the indices of the
/// partition intervals visited by x, f(x), ..., f^{depth-1}(x). Fails if
/// the finite orbit lands within eps_grid of a partition point, where the
/// symbol is ambiguous.
pub fn itinerary(map: &MarkovIntervalMap, x: f64, depth: usize) -> Result<Vec<usize>, MapError> {
    let mut word = Vec::with_capacity(depth);
    let mut current = x;
    for step in 0..depth {
        match map.branch_index_of(current) {
            Some(i) => {
                word.push(i);
                current = map.branches[i].kind.value(current);
            }
            None => return Err(MapError::OrbitHitsBoundary { step }),
        }
    }
    Ok(word)
}

/// The closed interval of points whose itinerary starts with `word`:
/// the intersection of pulled-back partition intervals. Empty cylinders
/// (inadmissible words) are an error.
pub fn cylinder_bracket(map: &MarkovIntervalMap, word: &[usize]) -> Result<(f64, f64), MapError> {
    assert!(!word.is_empty(), "cylinder of the empty word is the whole domain");
    for &s in word {
        assert!(s < map.branch_count(), "symbol {s} out of range");
    }
    let (mut lo, mut hi) = map.interval(word[word.len() - 1]);
    for &s in word[..word.len() - 1].iter().rev() {
        let (blo, bhi) = map.interval(s);
        let kind = &map.branches[s].kind;
        let (va, vb) = (kind.value(blo), kind.value(bhi));
        let (ilo, ihi) = if va <= vb { (va, vb) } else { (vb, va) };
        // Clip the target to this branch's image before inverting. A clip
        // that degenerates to (at most) a boundary point means the word is
        // not admissible: cylinders of admissible words keep interior.
        let tlo = lo.max(ilo);
        let thi = hi.min(ihi);
        if thi - tlo <= map.eps_grid {
            return Err(MapError::Inadmissible);
        }
        let xa = kind.invert(tlo, blo, bhi);
        let xb = kind.invert(thi, blo, bhi);
        let (mut nlo, mut nhi) = if xa <= xb { (xa, xb) } else { (xb, xa) };
        nlo = nlo.max(blo);
        nhi = nhi.min(bhi);
        if nhi - nlo < -map.eps_grid {
            return Err(MapError::Inadmissible);
        }
        lo = nlo;
        hi = nhi.max(nlo);
    }
    Ok((lo, hi))
}

/// Range of b(x) = |ln|x - p|| over the cylinder of `word`, where p is
/// the singular point. The bracket must stay away from p; cylinders
/// accumulating on the singularity need the anchored branch algebra
/// instead of interval arithmetic.
pub fn b_range_on_cylinder(
    map: &MarkovIntervalMap,
    word: &[usize],
    singularity: SignedPoint,
) -> Result<(f64, f64), MapError> {
    let (lo, hi) = cylinder_bracket(map, word)?;
    let p = singularity.x;
    if lo - map.eps_grid <= p && p <= hi + map.eps_grid {
        return Err(MapError::BracketTouchesSingularity);
    }
    let d_near = (lo - p).abs().min((hi - p).abs());
    let d_far = (lo - p).abs().max((hi - p).abs());
    let b_near = d_near.ln().abs();
    let b_far = d_far.ln().abs();
    let (mut bmin, bmax) = (b_near.min(b_far), b_near.max(b_far));
    // If the distance range straddles 1, b dips to zero inside.
    if d_near < 1.0 && d_far > 1.0 {
        bmin = 0.0;
    }
    Ok((bmin, bmax))
}
