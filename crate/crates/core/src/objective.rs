//! Separable convex objectives: one univariate term per variable.

use std::fmt;
use std::sync::Arc;

use crate::error::{add, mul, sub, NFoldError, Result};

/// A user-supplied univariate convex function.
///
/// Terms of this kind are usable through the library API but cannot be
/// written to instance files.
pub trait UnivariateConvex: Send + Sync {
    fn eval(&self, x: i64) -> Result<i64>;

    /// Short label used in diagnostics.
    fn name(&self) -> &str {
        "custom"
    }
}

/// Convex piecewise-linear function given by integer breakpoints.
///
/// Between breakpoints the function is linear; outside the first and last
/// breakpoint it continues with the slope of the adjacent segment. Every
/// segment must have an integer slope so that evaluation stays exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseLinear {
    points: Vec<(i64, i64)>,
    slopes: Vec<i64>,
}

impl PiecewiseLinear {
    pub fn new(points: Vec<(i64, i64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(NFoldError::Invalid(vec!["piecewise-linear term has no breakpoints".into()]));
        }
        let mut slopes = Vec::with_capacity(points.len().saturating_sub(1));
        for w in points.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            if x1 <= x0 {
                return Err(NFoldError::Invalid(vec![format!(
                    "breakpoint abscissae not strictly increasing at {x0}, {x1}"
                )]));
            }
            let dx = sub(x1, x0)?;
            let dy = sub(y1, y0)?;
            if dy % dx != 0 {
                return Err(NFoldError::Invalid(vec![format!(
                    "segment [{x0}, {x1}] has a non-integer slope"
                )]));
            }
            slopes.push(dy / dx);
        }
        if let Some(w) = slopes.windows(2).find(|w| w[1] < w[0]) {
            return Err(NFoldError::Invalid(vec![format!(
                "piecewise-linear term is not convex (slope {} followed by {})",
                w[0], w[1]
            )]));
        }
        Ok(Self { points, slopes })
    }

    /// Builds the partial-sum function `k -> w_1 + ... + w_k` on `0..=len`.
    pub fn partial_sums(sorted_weights: &[i64]) -> Result<Self> {
        let mut points = Vec::with_capacity(sorted_weights.len() + 1);
        let mut acc = 0i64;
        points.push((0, 0));
        for (k, &w) in sorted_weights.iter().enumerate() {
            acc = add(acc, w)?;
            points.push((k as i64 + 1, acc));
        }
        Self::new(points)
    }

    pub fn points(&self) -> &[(i64, i64)] {
        &self.points
    }

    pub fn eval(&self, x: i64) -> Result<i64> {
        let pts = &self.points;
        if pts.len() == 1 {
            return Ok(pts[0].1);
        }
        // index of the segment containing x (clamped to the end segments)
        let seg = match pts.binary_search_by(|p| p.0.cmp(&x)) {
            Ok(i) => return Ok(pts[i].1),
            Err(0) => 0,
            Err(i) if i >= pts.len() => pts.len() - 2,
            Err(i) => i - 1,
        };
        let (x0, y0) = pts[seg];
        add(y0, mul(self.slopes[seg], sub(x, x0)?)?)
    }
}

/// One univariate term of a separable objective.
#[derive(Clone)]
pub enum Term {
    Zero,
    Linear(i64),
    PiecewiseLinear(PiecewiseLinear),
    Custom(Arc<dyn UnivariateConvex>),
}

impl Term {
    pub fn eval(&self, x: i64) -> Result<i64> {
        match self {
            Term::Zero => Ok(0),
            Term::Linear(c) => mul(*c, x),
            Term::PiecewiseLinear(p) => p.eval(x),
            Term::Custom(f) => f.eval(x),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Term::Zero | Term::Linear(0))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Zero => write!(f, "Zero"),
            Term::Linear(c) => write!(f, "Linear({c})"),
            Term::PiecewiseLinear(p) => write!(f, "PiecewiseLinear({:?})", p.points),
            Term::Custom(c) => write!(f, "Custom({})", c.name()),
        }
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Term::Zero, Term::Zero) => true,
            (Term::Linear(a), Term::Linear(b)) => a == b,
            (Term::PiecewiseLinear(a), Term::PiecewiseLinear(b)) => a == b,
            (Term::Custom(a), Term::Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

/// `f(x) = sum_k f_k(x_k)` over the flat variable vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SeparableObjective {
    pub terms: Vec<Term>,
}

impl SeparableObjective {
    pub fn new(terms: Vec<Term>) -> Self {
        Self { terms }
    }

    pub fn zero(len: usize) -> Self {
        Self { terms: vec![Term::Zero; len] }
    }

    pub fn linear(coeffs: &[i64]) -> Self {
        Self { terms: coeffs.iter().map(|&c| Term::Linear(c)).collect() }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: &[i64]) -> Result<i64> {
        if x.len() != self.terms.len() {
            return Err(NFoldError::Dimension(format!(
                "point has {} coordinates, objective has {} terms",
                x.len(),
                self.terms.len()
            )));
        }
        self.terms
            .iter()
            .zip(x)
            .try_fold(0i64, |acc, (term, &xi)| add(acc, term.eval(xi)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pwl_reads_breakpoints() {
        let p = PiecewiseLinear::new(vec![(0, 0), (1, 0), (2, 3)]).unwrap();
        assert_eq!(p.eval(2).unwrap(), 3);
        assert_eq!(p.eval(1).unwrap(), 0);
        // extrapolation continues the end slopes
        assert_eq!(p.eval(3).unwrap(), 6);
        assert_eq!(p.eval(-1).unwrap(), 0);
    }

    #[test]
    fn pwl_rejects_nonconvex_and_fractional() {
        assert!(PiecewiseLinear::new(vec![(0, 0), (1, 2), (2, 3)]).is_err());
        assert!(PiecewiseLinear::new(vec![(0, 0), (2, 1)]).is_err());
        assert!(PiecewiseLinear::new(vec![(0, 0), (0, 1)]).is_err());
        assert!(PiecewiseLinear::new(vec![]).is_err());
    }

    #[test]
    fn linear_overflow_is_an_error() {
        let t = Term::Linear(i64::MAX);
        assert_eq!(t.eval(2), Err(NFoldError::Overflow("multiplication")));
    }

    #[test]
    fn objective_examples() {
        let zero = SeparableObjective::zero(4);
        assert_eq!(zero.eval(&[5, -3, 2, 9]).unwrap(), 0);
        let lin = SeparableObjective::linear(&[2, 1, 1, 1]);
        assert_eq!(lin.eval(&[0, 1, 1, 0]).unwrap(), 2);
        let pwl = PiecewiseLinear::new(vec![(0, 0), (1, 0), (2, 3)]).unwrap();
        let obj = SeparableObjective::new(vec![Term::PiecewiseLinear(pwl), Term::Zero]);
        assert_eq!(obj.eval(&[2, 7]).unwrap(), 3);
    }

    proptest! {
        #[test]
        fn partial_sums_are_convex(mut w in proptest::collection::vec(0i64..50, 0..8),
                                   a in -3i64..12, gap1 in 1i64..4, gap2 in 1i64..4) {
            w.sort();
            let g = PiecewiseLinear::partial_sums(&w).unwrap();
            let (b, c) = (a + gap1, a + gap1 + gap2);
            let (ga, gb, gc) = (g.eval(a).unwrap(), g.eval(b).unwrap(), g.eval(c).unwrap());
            // (g(b)-g(a))/(b-a) <= (g(c)-g(b))/(c-b), cross-multiplied
            prop_assert!((gb - ga) * (c - b) <= (gc - gb) * (b - a));
        }
    }
}
