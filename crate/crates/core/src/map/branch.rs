//! Branch descriptors: closed-form monotone pieces with exact derivatives,
//! exact or bisected inverses, and cancellation-safe arithmetic near
//! anchor points.
//!
//! Distances to an anchor shrink far below the spacing of representable
//! floats long before any analysis is done, so every descriptor exposes
//! three forms of evaluation besides the plain value:
//!
//! * `delta_value(z, d)`: f(z + d) - f(z) without subtracting nearby
//!   floats (expm1/log1p algebra per kind);
//! * `pull_delta(z, dv)`: the inverse of the above, solving
//!   f(z + d) = f(z) + dv for d;
//! * `pull_tau(z, tau)`: the same inversion carried out on log-distances
//!   tau = -ln|d|, exact at singular anchors for arbitrarily large tau
//!   and linearized (error below one ulp) for regular points once
//!   e^{-tau} underflows the useful range.

use std::fmt;
use std::sync::Arc;

/// Threshold beyond which a regular-point pullback switches from delta
/// algebra to the linearization tau' = tau + ln|f'(z)|; at tau > 600 the
/// quadratic correction is below 1e-260 and invisible in f64.
const TAU_LINEAR: f64 = 600.0;

/// Anchor coincidence tolerance when deciding whether a point sits at a
/// branch's singular anchor.
const ANCHOR_TOL: f64 = 1e-12;

pub type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A monotone piece of a Markov map. Singular kinds (PowerOffset,
/// LogReciprocal, IterLogPower) have one anchor where |f'| diverges.
#[derive(Clone)]
pub enum BranchKind {
    /// x -> slope * x + intercept
    Affine { slope: f64, intercept: f64 },
    /// x -> offset + coeff * sgn(x - anchor) * |x - anchor|^(1/alpha),
    /// alpha > 1; |f'| -> infinity at the anchor.
    PowerOffset { anchor: f64, coeff: f64, alpha: f64, offset: f64 },
    /// x -> -coeff / ln|x - anchor|; value 0 at the anchor, |f'| -> infinity
    /// there, slower than any power (not Holder).
    LogReciprocal { anchor: f64, coeff: f64 },
    /// x -> x^(1/eta(x)) with eta(x) = 2 - 1/ln(ln(-ln x)), anchored at 0,
    /// defined on (0, rho); rho must satisfy rho < e^(-e^e).
    IterLogPower { rho: f64 },
    /// The monotone C^1 piece with value y0 at x0 whose derivative moves
    /// affinely from d0 at x0 to d1 at x1.
    DerivativeBlend { x0: f64, x1: f64, d0: f64, d1: f64, y0: f64 },
    /// Opaque evaluators; inverses fall back to bisection and
    /// near-anchor arithmetic degrades to plain subtraction.
    Custom { value: Evaluator, derivative: Evaluator },
    /// Consecutive sub-pieces (lo, hi, kind) forming one monotone branch;
    /// adjacent pieces must agree at the seams.
    Glued { pieces: Vec<(f64, f64, BranchKind)> },
    /// Left-to-right composition: x -> last(... first(x) ...).
    Composite { chain: Vec<BranchKind> },
    /// Conjugation by the reflection x -> sum - x.
    Reflected { inner: Box<BranchKind>, sum: f64 },
}

impl fmt::Debug for BranchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchKind::Affine { slope, intercept } => {
                write!(f, "Affine({slope}, {intercept})")
            }
            BranchKind::PowerOffset { anchor, coeff, alpha, offset } => {
                write!(f, "PowerOffset({anchor}, {coeff}, {alpha}, {offset})")
            }
            BranchKind::LogReciprocal { anchor, coeff } => {
                write!(f, "LogReciprocal({anchor}, {coeff})")
            }
            BranchKind::IterLogPower { rho } => write!(f, "IterLogPower({rho})"),
            BranchKind::DerivativeBlend { x0, x1, d0, d1, y0 } => {
                write!(f, "DerivativeBlend({x0}, {x1}, {d0}, {d1}, {y0})")
            }
            BranchKind::Custom { .. } => write!(f, "Custom(..)"),
            BranchKind::Glued { pieces } => {
                write!(f, "Glued(")?;
                for (i, (lo, hi, kind)) in pieces.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "[{lo}, {hi}] {kind:?}")?;
                }
                write!(f, ")")
            }
            BranchKind::Composite { chain } => {
                write!(f, "Composite(")?;
                for (i, kind) in chain.iter().enumerate() {
                    if i > 0 {
                        write!(f, " then ")?;
                    }
                    write!(f, "{kind:?}")?;
                }
                write!(f, ")")
            }
            BranchKind::Reflected { inner, sum } => write!(f, "Reflected({sum} - x, {inner:?})"),
        }
    }
}

/// Local behavior of a branch at a point, used for singularity detection
/// and Holder classification. Power with alpha = 1 is an ordinary
/// differentiable point with |f'| = coeff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LocalProfile {
    Power { alpha: f64, coeff: f64 },
    LogType { coeff: f64 },
    IterLogType { rho: f64 },
    Unknown,
}

fn iter_log_eta(t: f64) -> f64 {
    // eta(x) = 2 - 1/ln(ln(-ln x)) as a function of t = -ln x; needs
    // t > e for the inner logs, which the domain bound rho < e^(-e^e)
    // guarantees with a wide margin.
    assert!(t > std::f64::consts::E, "iterated-log exponent needs -ln x > e, got {t}");
    2.0 - 1.0 / t.ln().ln()
}

impl BranchKind {
    pub fn value(&self, x: f64) -> f64 {
        match self {
            BranchKind::Affine { slope, intercept } => slope * x + intercept,
            BranchKind::PowerOffset { anchor, coeff, alpha, offset } => {
                let u = x - anchor;
                offset + coeff * u.signum() * u.abs().powf(1.0 / alpha)
            }
            BranchKind::LogReciprocal { anchor, coeff } => {
                let u = (x - anchor).abs();
                if u == 0.0 {
                    0.0
                } else {
                    -coeff / u.ln()
                }
            }
            BranchKind::IterLogPower { .. } => {
                if x == 0.0 {
                    return 0.0;
                }
                let t = -x.ln();
                (-t / iter_log_eta(t)).exp()
            }
            BranchKind::DerivativeBlend { x0, x1, d0, d1, y0 } => {
                let u = x - x0;
                y0 + d0 * u + (d1 - d0) * u * u / (2.0 * (x1 - x0))
            }
            BranchKind::Custom { value, .. } => value(x),
            BranchKind::Glued { pieces } => pieces[self.glued_index(x, 0)].2.value(x),
            BranchKind::Composite { chain } => {
                chain.iter().fold(x, |y, k| k.value(k.snap_anchor(y)))
            }
            BranchKind::Reflected { inner, sum } => sum - inner.value(sum - x),
        }
    }

    /// Signed derivative; +-infinity at a singular anchor.
    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            BranchKind::Affine { slope, .. } => *slope,
            BranchKind::PowerOffset { anchor, coeff, alpha, .. } => {
                (coeff / alpha) * (x - anchor).abs().powf(1.0 / alpha - 1.0)
            }
            BranchKind::LogReciprocal { anchor, coeff } => {
                let u = x - anchor;
                if u == 0.0 {
                    return f64::INFINITY * coeff.signum();
                }
                let l = u.abs().ln();
                coeff.signum() * u.signum() * coeff.abs() / (u.abs() * l * l)
            }
            BranchKind::IterLogPower { .. } => {
                if x == 0.0 {
                    return f64::INFINITY;
                }
                let t = -x.ln();
                let s = t.ln().ln();
                let eta = 2.0 - 1.0 / s;
                let value = (-t / eta).exp();
                (value / x) * (1.0 / eta - 1.0 / (eta * eta * s * s * t.ln()))
            }
            BranchKind::DerivativeBlend { x0, x1, d0, d1, .. } => {
                d0 + (d1 - d0) * (x - x0) / (x1 - x0)
            }
            BranchKind::Custom { derivative, .. } => derivative(x),
            BranchKind::Glued { pieces } => pieces[self.glued_index(x, 0)].2.derivative(x),
            BranchKind::Composite { chain } => {
                let mut y = x;
                let mut product = 1.0;
                for k in chain {
                    let z = k.snap_anchor(y);
                    product *= k.derivative(z);
                    y = k.value(z);
                }
                product
            }
            BranchKind::Reflected { inner, sum } => inner.derivative(sum - x),
        }
    }

    /// One-sided derivative taken from the given side (+1: limit from the
    /// right, -1: from the left). Identical to `derivative` except exactly
    /// at piece seams and anchors, where the side picks the piece.
    pub fn one_sided_derivative(&self, x: f64, side: i8) -> f64 {
        match self {
            BranchKind::Glued { pieces } => {
                pieces[self.glued_index(x, side)].2.one_sided_derivative(x, side)
            }
            BranchKind::Composite { chain } => {
                let mut y = x;
                let mut s = side;
                let mut product = 1.0;
                for k in chain {
                    let z = k.snap_anchor(y);
                    let d = k.one_sided_derivative(z, s);
                    product *= d;
                    y = k.value(z);
                    if d < 0.0 {
                        s = -s;
                    }
                }
                product
            }
            BranchKind::Reflected { inner, sum } => inner.one_sided_derivative(sum - x, -side),
            _ => self.derivative(x),
        }
    }

    /// Pull x onto this branch's singular anchor when it sits within a few
    /// ulps of it. Composite chains route orbit points through anchors of
    /// later elements, and plain evaluation leaves such intermediates a
    /// rounding error short of the anchor, which a fractional power then
    /// amplifies to visible size (a one-ulp miss of a square-root anchor
    /// costs 2^-27). Identifying points with anchors at this tolerance is
    /// the same convention the map layer uses for grid points.
    fn snap_anchor(&self, x: f64) -> f64 {
        match self {
            BranchKind::PowerOffset { anchor, .. }
            | BranchKind::LogReciprocal { anchor, .. } => {
                if (x - anchor).abs() <= ANCHOR_TOL {
                    *anchor
                } else {
                    x
                }
            }
            BranchKind::IterLogPower { .. } => {
                if x.abs() <= ANCHOR_TOL {
                    0.0
                } else {
                    x
                }
            }
            BranchKind::Glued { pieces } => {
                for (_, _, kind) in pieces {
                    let s = kind.snap_anchor(x);
                    if s != x {
                        return s;
                    }
                }
                x
            }
            BranchKind::Composite { chain } => chain.first().map_or(x, |k| k.snap_anchor(x)),
            BranchKind::Reflected { inner, sum } => {
                let y = sum - x;
                let s = inner.snap_anchor(y);
                if s != y {
                    sum - s
                } else {
                    x
                }
            }
            _ => x,
        }
    }

    /// Index of the glued piece containing x, disambiguating seams by side.
    fn glued_index(&self, x: f64, side: i8) -> usize {
        let BranchKind::Glued { pieces } = self else {
            panic!("glued_index on non-glued branch")
        };
        for (i, &(lo, hi, _)) in pieces.iter().enumerate() {
            if x < hi || (x == hi && (side <= 0 || i == pieces.len() - 1)) {
                if x > lo || (x == lo && (side >= 0 || i == 0)) {
                    return i;
                }
            }
        }
        // Clamp out-of-range queries to the nearest piece.
        if x <= pieces[0].0 {
            0
        } else {
            pieces.len() - 1
        }
    }

    /// Solve value(x) = y for x in [lo, hi]. The branch must be monotone
    /// there and y must lie in the closed image. Closed forms where the
    /// kind admits one, bisection to ~1e-15 relative otherwise.
    pub fn invert(&self, y: f64, lo: f64, hi: f64) -> f64 {
        match self {
            BranchKind::Affine { slope, intercept } => (y - intercept) / slope,
            BranchKind::PowerOffset { anchor, coeff, alpha, offset } => {
                let w = (y - offset) / coeff;
                anchor + w.signum() * w.abs().powf(*alpha)
            }
            BranchKind::LogReciprocal { anchor, coeff } => {
                if y == 0.0 {
                    return *anchor;
                }
                let u = (-coeff / y).exp();
                // Pick the side from the bracket.
                if hi <= *anchor {
                    anchor - u
                } else {
                    anchor + u
                }
            }
            BranchKind::DerivativeBlend { x0, x1, d0, d1, y0 } => {
                // Quadratic in u = x - x0: q u^2 + d0 u - (y - y0) = 0 with
                // q = (d1 - d0) / (2 (x1 - x0)); stable small-root form.
                let q = (d1 - d0) / (2.0 * (x1 - x0));
                let rhs = y - y0;
                if q.abs() < 1e-300 {
                    return x0 + rhs / d0;
                }
                let disc = d0 * d0 + 4.0 * q * rhs;
                assert!(disc >= 0.0, "blend inversion out of range: y = {y}");
                x0 + 2.0 * rhs / (d0 + d0.signum() * disc.sqrt())
            }
            BranchKind::Glued { pieces } => {
                let increasing = self.value(hi) >= self.value(lo);
                for &(plo, phi, ref kind) in pieces {
                    let (alo, ahi) = (plo.max(lo), phi.min(hi));
                    if alo > ahi {
                        continue;
                    }
                    let (va, vb) = (kind.value(alo), kind.value(ahi));
                    let (vmin, vmax) = if va <= vb { (va, vb) } else { (vb, va) };
                    if y >= vmin - 1e-12 && y <= vmax + 1e-12 {
                        return kind.invert(y, alo, ahi);
                    }
                }
                // Numeric slack put y just outside every piece image.
                if (y < self.value(lo)) == increasing {
                    lo
                } else {
                    hi
                }
            }
            BranchKind::Composite { chain } => {
                // Push the bracket endpoints forward, then invert link by
                // link from the back.
                let mut brackets = vec![(lo, hi)];
                let (mut a, mut b) = (lo, hi);
                for k in &chain[..chain.len() - 1] {
                    a = k.value(a);
                    b = k.value(b);
                    brackets.push((a, b));
                }
                let mut y = y;
                for (k, &(blo, bhi)) in chain.iter().zip(brackets.iter()).rev() {
                    let (lo_k, hi_k) = if blo <= bhi { (blo, bhi) } else { (bhi, blo) };
                    y = k.invert(y, lo_k, hi_k);
                }
                y
            }
            BranchKind::Reflected { inner, sum } => sum - inner.invert(sum - y, sum - hi, sum - lo),
            _ => self.bisect_invert(y, lo, hi),
        }
    }

    fn bisect_invert(&self, y: f64, mut lo: f64, mut hi: f64) -> f64 {
        let increasing = self.value(hi) >= self.value(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if (self.value(mid) < y) == increasing {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// f(z + d) - f(z) computed without catastrophic cancellation for the
    /// closed-form kinds. z + d must stay on one side of any anchor.
    pub fn delta_value(&self, z: f64, d: f64) -> f64 {
        match self {
            BranchKind::Affine { slope, .. } => slope * d,
            BranchKind::PowerOffset { anchor, coeff, alpha, .. } => {
                let u = z - anchor;
                if u.abs() <= ANCHOR_TOL * (1.0 + anchor.abs()) {
                    return coeff * d.signum() * d.abs().powf(1.0 / alpha);
                }
                assert!((u + d).signum() == u.signum() || u + d == 0.0,
                    "delta crosses the power anchor");
                coeff * u.signum() * u.abs().powf(1.0 / alpha)
                    * ((d / u).ln_1p() / alpha).exp_m1()
            }
            BranchKind::LogReciprocal { anchor, coeff } => {
                let u = z - anchor;
                if u.abs() <= ANCHOR_TOL * (1.0 + anchor.abs()) {
                    return -coeff / d.abs().ln();
                }
                // 1/A' - 1/A = t / (A (A - t)) with A = -ln|u| and
                // t = ln(1 + d/u), keeping the tiny increment t intact.
                let a = -u.abs().ln();
                let t = (d / u).ln_1p();
                coeff * t / (a * (a - t))
            }
            BranchKind::IterLogPower { .. } => {
                if z.abs() <= ANCHOR_TOL {
                    return self.value(d);
                }
                self.value(z + d) - self.value(z)
            }
            BranchKind::DerivativeBlend { x0, x1, d0, d1, .. } => {
                let dz = d0 + (d1 - d0) * (z - x0) / (x1 - x0);
                dz * d + (d1 - d0) * d * d / (2.0 * (x1 - x0))
            }
            BranchKind::Custom { value, .. } => value(z + d) - value(z),
            BranchKind::Glued { pieces } => {
                // Walk pieces from z toward z + d, accumulating exact
                // piece-local deltas.
                let dir: i8 = if d >= 0.0 { 1 } else { -1 };
                let mut idx = self.glued_index(z, dir);
                let mut at = z;
                let mut remaining = d;
                let mut total = 0.0;
                loop {
                    let (plo, phi, ref kind) = pieces[idx];
                    let edge = if dir > 0 { phi } else { plo };
                    if (dir > 0 && at + remaining <= edge) || (dir < 0 && at + remaining >= edge) {
                        return total + kind.delta_value(at, remaining);
                    }
                    total += kind.delta_value(at, edge - at);
                    remaining -= edge - at;
                    at = edge;
                    let next = (idx as isize + dir as isize) as usize;
                    assert!(next < pieces.len(), "delta walks off the glued branch");
                    idx = next;
                }
            }
            BranchKind::Composite { chain } => {
                let mut anchor = z;
                let mut delta = d;
                for k in chain {
                    delta = k.delta_value(anchor, delta);
                    anchor = k.value(anchor);
                }
                delta
            }
            BranchKind::Reflected { inner, sum } => -inner.delta_value(sum - z, -d),
        }
    }

    /// Solve f(z + d) = f(z) + dv for d; the inverse of `delta_value`.
    pub fn pull_delta(&self, z: f64, dv: f64) -> f64 {
        match self {
            BranchKind::Affine { slope, .. } => dv / slope,
            BranchKind::PowerOffset { anchor, coeff, alpha, .. } => {
                let u = z - anchor;
                if u.abs() <= ANCHOR_TOL * (1.0 + anchor.abs()) {
                    let w = dv / coeff;
                    return w.signum() * w.abs().powf(*alpha);
                }
                let scaled = dv / (coeff * u.signum() * u.abs().powf(1.0 / alpha));
                u * (alpha * scaled.ln_1p()).exp_m1()
            }
            BranchKind::LogReciprocal { anchor, coeff } => {
                let u = z - anchor;
                if u.abs() <= ANCHOR_TOL * (1.0 + anchor.abs()) {
                    // dv = -coeff/ln d; side from the sign convention of the
                    // caller (returned d is positive; orbit code applies side).
                    return (-coeff / dv).exp();
                }
                // a - a' for a' = a/(1 + x), written to avoid subtracting
                // the nearly equal logs when x is tiny.
                let a = -u.abs().ln();
                let x = a * dv / coeff;
                let a_minus_ap = a * x / (1.0 + x);
                u * a_minus_ap.exp_m1()
            }
            BranchKind::DerivativeBlend { x0, x1, d0, d1, .. } => {
                let dz = d0 + (d1 - d0) * (z - x0) / (x1 - x0);
                let q = (d1 - d0) / (2.0 * (x1 - x0));
                if q.abs() < 1e-300 {
                    return dv / dz;
                }
                let disc = dz * dz + 4.0 * q * dv;
                assert!(disc >= 0.0, "blend pullback out of range");
                2.0 * dv / (dz + dz.signum() * disc.sqrt())
            }
            BranchKind::Glued { pieces } => {
                let fwd = self.one_sided_derivative(z, 1);
                let dir: i8 = if (dv >= 0.0) == (fwd >= 0.0) { 1 } else { -1 };
                let mut idx = self.glued_index(z, dir);
                let mut at = z;
                let mut remaining = dv;
                let mut total = 0.0;
                loop {
                    let (plo, phi, ref kind) = pieces[idx];
                    let edge = if dir > 0 { phi } else { plo };
                    let extent = kind.delta_value(at, edge - at);
                    if remaining.abs() <= extent.abs() || edge - at == 0.0 {
                        return total + kind.pull_delta(at, remaining);
                    }
                    total += edge - at;
                    remaining -= extent;
                    at = edge;
                    let next = (idx as isize + dir as isize) as usize;
                    assert!(next < pieces.len(), "pullback walks off the glued branch");
                    idx = next;
                }
            }
            BranchKind::Composite { chain } => {
                let mut anchors = Vec::with_capacity(chain.len());
                let mut a = z;
                for k in chain {
                    anchors.push(a);
                    a = k.value(a);
                }
                let mut dv = dv;
                for (k, &anchor) in chain.iter().zip(anchors.iter()).rev() {
                    dv = k.pull_delta(anchor, dv);
                }
                dv
            }
            BranchKind::Reflected { inner, sum } => -inner.pull_delta(sum - z, -dv),
            _ => {
                // Monotone bisection in delta space.
                let increasing = self.one_sided_derivative(z, if dv >= 0.0 { 1 } else { -1 }) > 0.0;
                let want_positive = (dv >= 0.0) == increasing;
                let (mut lo, mut hi): (f64, f64) = if want_positive { (0.0, 1.0) } else { (-1.0, 0.0) };
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo.min(hi) || mid >= lo.max(hi) {
                        break;
                    }
                    if (self.delta_value(z, mid) < dv) == increasing {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    /// Log-distance pullback: the image sits at distance e^{-tau} from
    /// f(z) (side handled by the caller); returns the log-distance of the
    /// preimage from z. Exact at singular anchors for any tau; for regular
    /// z it uses delta algebra below TAU_LINEAR and the one-ulp-exact
    /// linearization tau + ln|f'(z)| beyond.
    ///
    /// `src_side`: which side of z the preimage lies on (needed to pick
    /// glued pieces and one-sided derivatives); `img_side`: side of the
    /// image relative to f(z).
    pub fn pull_tau(&self, z: f64, src_side: i8, img_side: i8, tau: f64) -> f64 {
        match self {
            BranchKind::Affine { slope, .. } => tau + slope.abs().ln(),
            BranchKind::PowerOffset { anchor, coeff, alpha, .. }
                if (z - anchor).abs() <= ANCHOR_TOL * (1.0 + anchor.abs()) =>
            {
                alpha * (tau + coeff.abs().ln())
            }
            BranchKind::LogReciprocal { anchor, coeff }
                if (z - anchor).abs() <= ANCHOR_TOL * (1.0 + anchor.abs()) =>
            {
                // d = e^{-coeff/dv}, dv = e^{-tau}: log-distance coeff*e^{tau}.
                coeff.abs() * tau.exp()
            }
            BranchKind::IterLogPower { .. } if z.abs() <= ANCHOR_TOL => {
                // Fixed point of t = eta(t) * tau; eta moves so slowly that
                // direct iteration converges in a handful of steps.
                let mut t = 2.0 * tau;
                for _ in 0..80 {
                    let next = iter_log_eta(t) * tau;
                    if (next - t).abs() <= 1e-13 * t {
                        return next;
                    }
                    t = next;
                }
                t
            }
            BranchKind::Glued { pieces } => {
                let idx = self.glued_index(z, src_side);
                let (plo, phi, ref kind) = pieces[idx];
                let edge = if src_side > 0 { phi } else { plo };
                let extent = kind.delta_value(z, edge - z).abs();
                if tau > TAU_LINEAR || (-tau).exp() <= extent {
                    kind.pull_tau(z, src_side, img_side, tau)
                } else {
                    // The image distance reaches past this piece; fall back
                    // to plain-value inversion (safe: distances this large
                    // carry no cancellation risk).
                    let y = self.value(z) + img_side as f64 * (-tau).exp();
                    let (lo, hi) = (pieces[0].0, pieces[pieces.len() - 1].1);
                    let x = self.invert(y, lo, hi);
                    -((x - z).abs()).ln()
                }
            }
            BranchKind::Composite { chain } => {
                let mut anchors = Vec::with_capacity(chain.len());
                let mut sides = Vec::with_capacity(chain.len());
                let mut a = z;
                let mut s = src_side;
                for k in chain {
                    anchors.push(a);
                    sides.push(s);
                    if k.one_sided_derivative(a, s) < 0.0 {
                        s = -s;
                    }
                    a = k.value(a);
                }
                let mut tau = tau;
                let mut img = img_side;
                for ((k, &anchor), &side) in chain.iter().zip(&anchors).zip(&sides).rev() {
                    tau = k.pull_tau(anchor, side, img, tau);
                    if k.one_sided_derivative(anchor, side) < 0.0 {
                        img = -img;
                    }
                    let _ = img;
                }
                tau
            }
            BranchKind::Reflected { inner, sum } => {
                inner.pull_tau(sum - z, -src_side, -img_side, tau)
            }
            _ => {
                if tau > TAU_LINEAR {
                    tau + self.one_sided_derivative(z, src_side).abs().ln()
                } else {
                    let dv = img_side as f64 * (-tau).exp();
                    let d = self.pull_delta(z, dv);
                    -d.abs().ln()
                }
            }
        }
    }

    /// Local behavior at (z, side); Power with alpha = 1 means a plain
    /// differentiable point.
    pub fn profile_at(&self, z: f64, side: i8) -> LocalProfile {
        let at_anchor = |anchor: f64| (z - anchor).abs() <= ANCHOR_TOL * (1.0 + anchor.abs());
        match self {
            BranchKind::Affine { slope, .. } => LocalProfile::Power { alpha: 1.0, coeff: slope.abs() },
            BranchKind::PowerOffset { anchor, coeff, alpha, .. } => {
                if at_anchor(*anchor) {
                    LocalProfile::Power { alpha: *alpha, coeff: coeff.abs() }
                } else {
                    LocalProfile::Power { alpha: 1.0, coeff: self.derivative(z).abs() }
                }
            }
            BranchKind::LogReciprocal { anchor, coeff } => {
                if at_anchor(*anchor) {
                    LocalProfile::LogType { coeff: coeff.abs() }
                } else {
                    LocalProfile::Power { alpha: 1.0, coeff: self.derivative(z).abs() }
                }
            }
            BranchKind::IterLogPower { rho } => {
                if z.abs() <= ANCHOR_TOL {
                    LocalProfile::IterLogType { rho: *rho }
                } else {
                    LocalProfile::Power { alpha: 1.0, coeff: self.derivative(z).abs() }
                }
            }
            BranchKind::DerivativeBlend { .. } => {
                LocalProfile::Power { alpha: 1.0, coeff: self.derivative(z).abs() }
            }
            BranchKind::Custom { .. } => LocalProfile::Unknown,
            BranchKind::Glued { .. } => {
                let BranchKind::Glued { pieces } = self else { unreachable!() };
                pieces[self.glued_index(z, side)].2.profile_at(z, side)
            }
            BranchKind::Composite { chain } => {
                let mut profile = LocalProfile::Power { alpha: 1.0, coeff: 1.0 };
                let mut a = z;
                let mut s = side;
                for k in chain {
                    let next = k.profile_at(a, s);
                    profile = compose_profiles(profile, next);
                    if matches!(profile, LocalProfile::Unknown) {
                        return LocalProfile::Unknown;
                    }
                    if k.one_sided_derivative(a, s) < 0.0 {
                        s = -s;
                    }
                    a = k.value(a);
                }
                profile
            }
            BranchKind::Reflected { inner, sum } => inner.profile_at(sum - z, -side),
        }
    }
}

/// Profile of g(f(x)) at an anchor given the profile of f there and the
/// profile of g at the image point. |f(p + d) - f(p)| ~ K d^{1/a} composed
/// with |g(q + e) - g(q)| ~ K' e^{1/a'} gives K' K^{1/a'} d^{1/(a a')}.
fn compose_profiles(first: LocalProfile, second: LocalProfile) -> LocalProfile {
    use LocalProfile::*;
    match (first, second) {
        (Power { alpha: a1, coeff: k1 }, Power { alpha: a2, coeff: k2 }) => {
            Power { alpha: a1 * a2, coeff: k2 * k1.powf(1.0 / a2) }
        }
        // A logarithmic (slower than any power) head stays logarithmic
        // under any power-type continuation, and vice versa.
        (LogType { coeff }, Power { alpha, coeff: k2 }) => {
            LogType { coeff: k2 * coeff.powf(1.0 / alpha) }
        }
        (Power { alpha: a1, coeff }, LogType { coeff: c2 }) => {
            let _ = coeff;
            LogType { coeff: c2 * a1 }
        }
        (IterLogType { rho }, Power { alpha, .. }) if alpha == 1.0 => IterLogType { rho },
        (Power { alpha, .. }, IterLogType { rho }) if alpha == 1.0 => IterLogType { rho },
        _ => Unknown,
    }
}
