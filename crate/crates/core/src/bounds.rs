//! Analytic layer: the two-set Poisson bound and its exact counterpart on
//! disjoint sets, the interior and boundary bound-curve families, their
//! crossing optima, the disc-blocking event and the derived thresholds.
//!
//! "log" is the natural logarithm throughout.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

#[allow(unused_imports)]

use crate::math::MathExt;
use crate::Error;

/// `|A'|`-scaled bound on the lune area, rounded up from
/// [`witness_area_coefficient`] at the default shrink.
pub const LUNE_COEFF: f64 = 0.61;
/// First interior curve is valid for `x` below this.
pub const INTERIOR_F1_MAX_X: f64 = 3.13;
/// First boundary curve is valid for `x` below this.
pub const BOUNDARY_G1_MAX_X: f64 = 2.56;
/// Second boundary curve is valid for `x` below this.
pub const BOUNDARY_G2_MAX_X: f64 = 12.0;
/// Default ratio `r / r0` used when converting the witness distance into `x`.
pub const DEFAULT_SHRINK: f64 = 1.0 - 1e-4;

/// Areas `|A|, |B|, |C|` and the count threshold `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundQuery {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub k: u32,
}

/// `(4|A||B| / (|A|+|B|+|C|)^2)^k`, clamped to `[0, 1]`.
///
/// Bounds `P(#A >= k, #B >= k, #(A∩B) = 0, #C = 0)` whenever
/// `|A| <= |C|` and `|B| <= |C|`.
pub fn lemma_kk_bound(q: BoundQuery) -> Result<f64, Error> {
    let BoundQuery { a, b, c, k } = q;
    if !(a >= 0.0 && b >= 0.0 && c >= 0.0) || a > c || b > c {
        return Err(Error::LemmaHypothesis { a, b, c });
    }
    let total = a + b + c;
    if !(total > 0.0) {
        return Err(Error::InvalidArgument("a + b + c must be positive"));
    }
    let base = 4.0 * a * b / (total * total);
    Ok(base.powi(k as i32).clamp(0.0, 1.0))
}

/// Exact `P(#A >= k, #B >= k, #C = 0)` for pairwise-disjoint sets of the
/// given areas under a unit-intensity Poisson process.
pub fn lemma_kk_exact(a: f64, b: f64, c: f64, k: u32) -> f64 {
    (-c).exp() * poisson_tail(k, a) * poisson_tail(k, b)
}

/// `Q(k, lambda) = P(Poisson(lambda) >= k)`.
///
/// Summed directly from log-space pmf terms on whichever side of the mean
/// avoids cancellation.
pub fn poisson_tail(k: u32, lambda: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if !(lambda > 0.0) {
        return 0.0;
    }
    let ln_lambda = lambda.ln();
    let ln_pmf = |j: u32| -lambda + j as f64 * ln_lambda - (j as f64 + 1.0).lgamma();
    if (k as f64) > lambda {
        // upper tail: terms fall off geometrically past the mean
        let mut ln_term = ln_pmf(k);
        let mut sum = 0.0;
        let mut j = k;
        loop {
            let t = ln_term.exp();
            sum += t;
            if t <= sum * 1e-17 || (t == 0.0 && j as f64 > lambda + 50.0) {
                break;
            }
            j += 1;
            ln_term += ln_lambda - (j as f64).ln();
        }
        sum.min(1.0)
    } else {
        let mut ln_term = -lambda;
        let mut lower = 0.0;
        for j in 0..k {
            if j > 0 {
                ln_term += ln_lambda - (j as f64).ln();
            }
            lower += ln_term.exp();
        }
        (1.0 - lower).clamp(0.0, 1.0)
    }
}

/// Interior family at ratio `x`; `None` marks a curve outside its validity
/// domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorCurves {
    /// From the six empty bisector regions: valid for `x < 3.13`.
    pub f1: Option<f64>,
    /// From the empty blow-up excess: valid for `x > sqrt 2 - 1`.
    pub f2: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCurves {
    /// From the four empty bisector regions: valid for `x < 2.56`.
    pub g1: Option<f64>,
    /// From the half-plane blow-up excess: valid for `2 - sqrt 2 < x < 12`.
    pub g2: Option<f64>,
    /// `A'` full, blow-up excess empty: always valid.
    pub g3: f64,
}

fn interior_f1_base(x: f64) -> f64 {
    let w = LUNE_COEFF * x * x;
    4.0 * w / ((7.0 + w) * (7.0 + w))
}

fn interior_f2_base(x: f64) -> f64 {
    let w = LUNE_COEFF * x * x;
    let s = (x + 1.0) * (x + 1.0) + w;
    4.0 * w / (s * s)
}

fn boundary_g1_base(x: f64) -> f64 {
    let w = LUNE_COEFF * x * x;
    4.0 * w / ((5.0 + w) * (5.0 + w))
}

fn boundary_g2_base(x: f64) -> f64 {
    let w = LUNE_COEFF * x * x;
    let g = 1.0 + x / SQRT_2;
    let s = g * g + w;
    4.0 * w / (s * s)
}

fn boundary_g3_base(x: f64) -> f64 {
    let g = 1.0 + x / SQRT_2;
    1.0 / (g * g)
}

pub fn interior_curves(x: f64, k: u32) -> InteriorCurves {
    let k = k as i32;
    InteriorCurves {
        f1: (x < INTERIOR_F1_MAX_X).then(|| interior_f1_base(x).powi(k)),
        f2: (x > SQRT_2 - 1.0).then(|| interior_f2_base(x).powi(k)),
    }
}

pub fn boundary_curves(x: f64, k: u32) -> BoundaryCurves {
    let k = k as i32;
    BoundaryCurves {
        g1: (x < BOUNDARY_G1_MAX_X).then(|| boundary_g1_base(x).powi(k)),
        g2: (x > 2.0 - SQRT_2 && x < BOUNDARY_G2_MAX_X).then(|| boundary_g2_base(x).powi(k)),
        g3: boundary_g3_base(x).powi(k),
    }
}

/// Cut-offs with the exact algebraic values behind the decimal ones.
pub mod cutoffs {
    use super::LUNE_COEFF;
    #[allow(unused_imports)]
    use crate::math::MathExt;
    use core::f64::consts::SQRT_2;

    /// `0.61 x^2 < 6` for `x` below this.
    pub fn interior_f1_exact() -> f64 {
        (6.0 / LUNE_COEFF).sqrt()
    }

    /// `0.61 x^2 < 4` for `x` below this.
    pub fn boundary_g1_exact() -> f64 {
        (4.0 / LUNE_COEFF).sqrt()
    }

    /// `0.61 x^2 <= (1 + x/sqrt 2)^2 - 1` for `x` below this.
    pub fn boundary_g2_exact() -> f64 {
        SQRT_2 / (LUNE_COEFF - 0.5)
    }

    /// `(x + 1)^2 - 1 >= 1` from here on.
    pub fn interior_f2_min() -> f64 {
        SQRT_2 - 1.0
    }

    /// `(1 + x/sqrt 2)^2 - 1 >= 1` from here on.
    pub fn boundary_g2_min() -> f64 {
        2.0 - SQRT_2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Interior,
    Boundary,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Interior => "interior",
            Family::Boundary => "boundary",
        }
    }

    /// Closed-form crossing of the two main curves: `sqrt 7 - 1` for the
    /// interior family, `sqrt 2 (sqrt 5 - 1)` for the boundary family.
    pub fn analytic_crossing(self) -> f64 {
        match self {
            Family::Interior => 7f64.sqrt() - 1.0,
            Family::Boundary => SQRT_2 * (5f64.sqrt() - 1.0),
        }
    }

    /// Minimum over the valid curves at `x` (per-point base, `k = 1`).
    pub fn envelope(self, x: f64) -> f64 {
        let vals: Vec<Option<f64>> = match self {
            Family::Interior => {
                let c = interior_curves(x, 1);
                vec![c.f1, c.f2]
            }
            Family::Boundary => {
                let c = boundary_curves(x, 1);
                vec![c.g1, c.g2, Some(c.g3)]
            }
        };
        vals.into_iter().flatten().fold(1.0, f64::min)
    }

    /// Difference of the two curves that cross at the optimum.
    fn crossing_gap(self, x: f64) -> f64 {
        match self {
            Family::Interior => interior_f1_base(x) - interior_f2_base(x),
            Family::Boundary => boundary_g1_base(x) - boundary_g2_base(x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult {
    pub family: Family,
    /// Maximiser of the envelope.
    pub x_star: f64,
    /// Envelope value at `x_star` for `k = 1`.
    pub value: f64,
    /// `1 / value`: the bound is `alpha^-k`.
    pub alpha: f64,
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Golden-section maximisation of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Worst case over `x > 0` of the family's envelope with a per-`k`
/// normalisation, located by a grid scan, refined by golden section to
/// `|dx| < 1e-9`, then polished onto the curve crossing by bisection.
pub fn optimal_alpha_with_k(family: Family, k: u32) -> BoundResult {
    let k = k.max(1);
    let env = |x: f64| family.envelope(x).powi(k as i32);
    let (x_lo, x_hi, steps) = (1e-6, 40.0, 4000usize);
    let h = (x_hi - x_lo) / steps as f64;
    let best_i = (0..=steps)
        .max_by(|&i, &j| env(x_lo + i as f64 * h).total_cmp(&env(x_lo + j as f64 * h)))
        .unwrap_or(0);
    let lo = (x_lo + (best_i as f64 - 1.0) * h).max(x_lo);
    let hi = (x_lo + (best_i as f64 + 1.0) * h).min(x_hi);
    let mut x = golden_section_max(env, lo, hi, 1e-9);

    // at a kink the optimum is the crossing; bisect the curve gap there
    let (mut a, mut b) = (x - 1e-6, x + 1e-6);
    let (ga, gb) = (family.crossing_gap(a), family.crossing_gap(b));
    if ga.signum() != gb.signum() {
        let mut sa = ga.signum();
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let gm = family.crossing_gap(mid);
            if gm == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if gm.signum() == sa {
                a = mid;
                sa = gm.signum();
            } else {
                b = mid;
            }
        }
        let cand = 0.5 * (a + b);
        if env(cand) >= env(x) {
            x = cand;
        }
    }
    let value = family.envelope(x);
    BoundResult {
        family,
        x_star: x,
        value,
        alpha: 1.0 / value,
    }
}

pub fn optimal_alpha(family: Family) -> BoundResult {
    optimal_alpha_with_k(family, 1)
}

/// `(pi/3 + sqrt(3)/2) / (pi shrink^2)`: the lune area over `x^2 |A'|` when
/// `r = shrink * r0`.
pub fn witness_area_coefficient(shrink: f64) -> f64 {
    debug_assert!(shrink > 0.0 && shrink <= 1.0);
    (PI / 3.0 + 3f64.sqrt() / 2.0) / (PI * shrink * shrink)
}

fn ln_factorial(n: u32) -> f64 {
    (n as f64 + 1.0).lgamma()
}

/// Probability that a disc of area `lambda` holds exactly `k + 1` points
/// while the concentric disc of three times the radius holds no others:
/// `e^(-9 lambda) lambda^(k+1) / (k+1)!`.
pub fn disc_blocking_probability(lambda: f64, k: u32) -> f64 {
    if !(lambda > 0.0) {
        return 0.0;
    }
    let n = k + 1;
    (-9.0 * lambda + n as f64 * lambda.ln() - ln_factorial(n)).exp()
}

/// As [`disc_blocking_probability`] but with at least `k + 1` points in
/// the disc.
pub fn disc_blocking_probability_at_least(lambda: f64, k: u32) -> f64 {
    if !(lambda > 0.0) {
        return 0.0;
    }
    (-8.0 * lambda).exp() * poisson_tail(k + 1, lambda)
}

/// Numerical maximiser of [`disc_blocking_probability`] over `lambda`
/// (grid, then golden section on the log-probability).
pub fn disc_blocking_argmax(k: u32) -> f64 {
    let n = (k + 1) as f64;
    let ln_p = |l: f64| -9.0 * l + n * l.ln();
    let hi = 4.0 * n;
    let steps = 2000usize;
    let h = hi / steps as f64;
    let best = (1..=steps)
        .max_by(|&i, &j| ln_p(i as f64 * h).total_cmp(&ln_p(j as f64 * h)))
        .unwrap_or(1);
    let lo = ((best as f64 - 1.0) * h).max(h * 1e-3);
    let top = (best as f64 + 1.0) * h;
    golden_section_max(ln_p, lo, top, 1e-12 * n)
}

/// Radius `r` with `9 pi r^2 = k + 1`.
pub fn blocking_disc_radius(k: u32) -> f64 {
    ((k + 1) as f64 / (9.0 * PI)).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRow {
    pub name: &'static str,
    /// Value recomputed here, if this crate derives it.
    pub derived: Option<f64>,
    /// Published (rounded) constant.
    pub reported: f64,
    pub note: &'static str,
}

/// Threshold constants `c` in `k = c log n`, derived where possible.
pub fn threshold_table() -> Vec<ThresholdRow> {
    let interior = optimal_alpha(Family::Interior);
    let boundary = optimal_alpha(Family::Boundary);
    vec![
        ThresholdRow {
            name: "c_centre",
            derived: Some(1.0 / interior.alpha.ln()),
            reported: 0.4125,
            note: "connectivity upper threshold, 1/ln(alpha_interior)",
        },
        ThresholdRow {
            name: "c_boundary",
            derived: Some(1.0 / (2.0 * boundary.alpha.ln())),
            reported: 0.272,
            note: "no non-giant vertex near the boundary, 1/(2 ln(alpha_boundary))",
        },
        ThresholdRow {
            name: "c_disc",
            derived: Some(1.0 / 9f64.ln()),
            reported: 0.455,
            note: "subgraphs with no out-degree exist below 1/ln 9",
        },
        ThresholdRow {
            name: "bbsw_lower",
            derived: None,
            reported: 0.3043,
            note: "prior work: disconnected below",
        },
        ThresholdRow {
            name: "bbsw_upper",
            derived: None,
            reported: 0.5139,
            note: "prior work: connected above",
        },
        ThresholdRow {
            name: "bbsw_boundary",
            derived: None,
            reported: 0.311,
            note: "prior work: no small component near the boundary above",
        },
        ThresholdRow {
            name: "xue_kumar_upper",
            derived: None,
            reported: 5.1774,
            note: "prior work: connected above",
        },
        ThresholdRow {
            name: "xue_kumar_lower",
            derived: None,
            reported: 0.074,
            note: "prior work: disconnected below",
        },
    ]
}
