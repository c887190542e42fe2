//! Instance data model for combinatorial n-fold integer programs.
//!
//! The constraint matrix is
//!
//! ```text
//!   ( D   D   ...  D  )        globally uniform rows,  = b0
//!   ( 1ᵀ  0   ...  0  )
//!   ( 0   1ᵀ  ...  0  )        one all-ones row per brick, = b_local[i]
//!   (        ...      )
//!   ( 0   0   ...  1ᵀ )
//! ```
//!
//! Variable `(i, j)` (brick `i`, position `j`, both zero-based) lives at flat
//! index `i * t + j`.

use crate::error::{add, mul, NFoldError, Result};
use crate::objective::{SeparableObjective, Term};

/// The upper block `D` (r × t). The lower block `1ᵀ` is implicit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bimatrix {
    rows: usize,
    cols: usize,
    // row-major
    data: Vec<i64>,
}

impl Bimatrix {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(NFoldError::Invalid(vec!["D must have at least one row".into()]));
        }
        let t = rows[0].len();
        if t == 0 {
            return Err(NFoldError::Invalid(vec!["D must have at least one column".into()]));
        }
        if let Some(bad) = rows.iter().position(|row| row.len() != t) {
            return Err(NFoldError::Dimension(format!(
                "row {bad} of D has {} entries, expected {t}",
                rows[bad].len()
            )));
        }
        if rows.iter().flatten().any(|&v| v == i64::MIN) {
            return Err(NFoldError::Overflow("matrix entry magnitude"));
        }
        Ok(Self { rows: r, cols: t, data: rows.into_iter().flatten().collect() })
    }

    pub fn r(&self) -> usize {
        self.rows
    }

    pub fn t(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> i64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[i64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.cols).map(<[i64]>::to_vec).collect()
    }

    pub fn column(&self, col: usize) -> Vec<i64> {
        (0..self.rows).map(|row| self.get(row, col)).collect()
    }

    /// `‖D‖∞`, the largest absolute entry.
    pub fn max_abs(&self) -> i64 {
        self.data.iter().map(|v| v.abs()).max().unwrap_or(0)
    }

    /// `Δ = 1 + ‖D‖∞`.
    pub fn delta(&self) -> Result<i64> {
        add(1, self.max_abs())
    }
}

/// `min f(x)  s.t.  E^(n) x = (b0, b_local),  lower <= x <= upper,  x integer`.
#[derive(Debug, Clone, PartialEq)]
pub struct CombNFoldInstance {
    pub bimatrix: Bimatrix,
    pub n: usize,
    pub b0: Vec<i64>,
    pub b_local: Vec<i64>,
    pub lower: Vec<i64>,
    pub upper: Vec<i64>,
    pub objective: SeparableObjective,
}

/// Outcome of [`validate_instance`]; violations are data, not errors.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationResult {
    pub violations: Vec<String>,
}

impl ValidationResult {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(NFoldError::Invalid(self.violations))
        }
    }
}

pub fn validate_instance(inst: &CombNFoldInstance) -> ValidationResult {
    let mut violations = Vec::new();
    let (r, t, n) = (inst.bimatrix.r(), inst.bimatrix.t(), inst.n);
    if n == 0 {
        violations.push("brick count must be at least 1".to_string());
    }
    let dim = n.checked_mul(t);
    if inst.b0.len() != r {
        violations.push(format!("global RHS length mismatch: {} entries for {r} rows", inst.b0.len()));
    }
    if inst.b_local.len() != n {
        violations.push(format!("RHS length mismatch: {} local entries for {n} bricks", inst.b_local.len()));
    }
    match dim {
        None => violations.push("n * t overflows".to_string()),
        Some(dim) => {
            for (name, len) in [
                ("lower", inst.lower.len()),
                ("upper", inst.upper.len()),
                ("objective", inst.objective.len()),
            ] {
                if len != dim {
                    violations.push(format!("{name} length mismatch: {len} entries for {dim} variables"));
                }
            }
        }
    }
    if let Some(k) = inst.lower.iter().zip(&inst.upper).position(|(l, u)| l > u) {
        violations.push(format!("lower exceeds upper at variable {k}"));
    }
    if inst.lower.iter().chain(&inst.upper).any(|&v| v == i64::MIN || v == i64::MAX) {
        violations.push("bounds must be finite".to_string());
    }
    if inst.bimatrix.delta().is_err() {
        violations.push("Δ overflows".to_string());
    }
    ValidationResult { violations }
}

impl CombNFoldInstance {
    pub fn t(&self) -> usize {
        self.bimatrix.t()
    }

    pub fn r(&self) -> usize {
        self.bimatrix.r()
    }

    pub fn dim(&self) -> usize {
        self.n * self.t()
    }

    pub fn index(&self, brick: usize, pos: usize) -> usize {
        brick * self.t() + pos
    }

    pub fn brick_of(&self, k: usize) -> (usize, usize) {
        (k / self.t(), k % self.t())
    }

    pub fn validate(&self) -> ValidationResult {
        validate_instance(self)
    }

    pub fn evaluate(&self, x: &[i64]) -> Result<i64> {
        evaluate_objective(self, x)
    }

    pub fn is_feasible(&self, x: &[i64]) -> bool {
        is_feasible(self, x)
    }

    /// `D · Σ_i x^i`.
    pub fn global_lhs(&self, x: &[i64]) -> Result<Vec<i64>> {
        let t = self.t();
        let mut out = vec![0i64; self.r()];
        for (k, &v) in x.iter().enumerate() {
            if v == 0 {
                continue;
            }
            for (row, acc) in out.iter_mut().enumerate() {
                *acc = add(*acc, mul(self.bimatrix.get(row, k % t), v)?)?;
            }
        }
        Ok(out)
    }

    pub fn brick_sums(&self, x: &[i64]) -> Result<Vec<i64>> {
        x.chunks(self.t())
            .map(|brick| brick.iter().try_fold(0i64, |a, &v| add(a, v)))
            .collect()
    }

    /// `‖upper − lower‖∞`.
    pub fn box_width(&self) -> Result<i64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .try_fold(0i64, |m, (&l, &u)| Ok(m.max(crate::error::sub(u, l)?)))
    }

    /// Number of integer points in the box, saturating at `u128::MAX`.
    pub fn box_volume(&self) -> u128 {
        self.lower.iter().zip(&self.upper).fold(1u128, |acc, (&l, &u)| {
            let w = (u as i128 - l as i128 + 1).max(0) as u128;
            acc.saturating_mul(w)
        })
    }

    pub fn has_custom_terms(&self) -> bool {
        self.objective.terms.iter().any(|t| matches!(t, Term::Custom(_)))
    }
}

pub fn evaluate_objective(inst: &CombNFoldInstance, x: &[i64]) -> Result<i64> {
    if x.len() != inst.dim() {
        return Err(NFoldError::Dimension(format!(
            "point has {} coordinates, instance has {}",
            x.len(),
            inst.dim()
        )));
    }
    inst.objective.eval(x)
}

pub fn is_feasible(inst: &CombNFoldInstance, x: &[i64]) -> bool {
    if x.len() != inst.dim() {
        return false;
    }
    let in_box = x
        .iter()
        .zip(inst.lower.iter().zip(&inst.upper))
        .all(|(v, (l, u))| l <= v && v <= u);
    if !in_box {
        return false;
    }
    match (inst.brick_sums(x), inst.global_lhs(x)) {
        (Ok(sums), Ok(lhs)) => sums == inst.b_local && lhs == inst.b0,
        _ => false,
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_instance_is_valid() {
        assert!(validate_instance(&minimal()).is_valid());
    }

    #[test]
    fn inverted_bounds_are_reported() {
        let mut inst = minimal();
        inst.lower = vec![1, 1];
        inst.upper = vec![0, 0];
        let v = validate_instance(&inst);
        assert!(v.violations.iter().any(|m| m.contains("lower exceeds upper")));
    }

    #[test]
    fn rhs_length_mismatch_is_reported() {
        let mut inst = minimal();
        inst.b_local = vec![1, 1];
        let v = validate_instance(&inst);
        assert!(v.violations.iter().any(|m| m.contains("RHS length mismatch")));
    }

    #[test]
    fn bimatrix_rejects_ragged_and_empty() {
        assert!(Bimatrix::new(vec![]).is_err());
        assert!(Bimatrix::new(vec![vec![]]).is_err());
        assert!(Bimatrix::new(vec![vec![1, 2], vec![3]]).is_err());
        assert_eq!(Bimatrix::new(vec![vec![0, -3]]).unwrap().delta().unwrap(), 4);
    }

    #[test]
    fn feasibility_examples() {
        let a = instance_a(&[0, 0, 0, 0]);
        assert!(is_feasible(&a, &[1, 0, 0, 1]));
        assert!(!is_feasible(&a, &[1, 1, 0, 0]));
        let mut variant = a.clone();
        variant.bimatrix = Bimatrix::new(vec![vec![1, 0]]).unwrap();
        variant.b0 = vec![1];
        assert!(!is_feasible(&variant, &[1, 0, 1, 0]));
        assert!(!is_feasible(&a, &[1, 0, 0]));
    }

    #[test]
    fn objective_overflow_is_error() {
        let mut a = instance_a(&[i64::MAX, i64::MAX, 0, 0]);
        a.upper = vec![5; 4];
        assert!(evaluate_objective(&a, &[1, 1, 0, 0]).is_err());
    }

    proptest! {
        #[test]
        fn flat_index_is_bijective(n in 1usize..6, t in 1usize..6) {
            let mut inst = minimal();
            inst.bimatrix = Bimatrix::new(vec![vec![0; t]]).unwrap();
            inst.n = n;
            let mut seen = vec![false; n * t];
            for i in 0..n {
                for j in 0..t {
                    let k = inst.index(i, j);
                    prop_assert!(!seen[k]);
                    seen[k] = true;
                    prop_assert_eq!(inst.brick_of(k), (i, j));
                }
            }
            prop_assert!(seen.into_iter().all(|s| s));
        }
    }
}
