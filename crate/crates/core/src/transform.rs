//! Instance rewrites: inequality rows to equalities, the lift of programs with
//! unequal block widths, and proximity-based box tightening.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{add, mul, sub, NFoldError, Result};
use crate::instance::{Bimatrix, CombNFoldInstance};
use crate::objective::{SeparableObjective, Term};
use crate::solver::{solve, SolveReport, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl Relation {
    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "<" => Relation::Lt,
            "<=" | "≤" => Relation::Le,
            "=" | "==" => Relation::Eq,
            ">=" | "≥" => Relation::Ge,
            ">" => Relation::Gt,
            _ => return None,
        })
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A combinatorial n-fold program whose rows may be inequalities.
/// `global[ρ]` relates row ρ of `D Σ xⁱ` to `b0[ρ]`; `local[i]` relates the
/// sum of brick `i` to `b_local[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationalInstance {
    pub base: CombNFoldInstance,
    pub global: Vec<Relation>,
    pub local: Vec<Relation>,
}

impl RelationalInstance {
    pub fn new(base: CombNFoldInstance, global: Vec<Relation>, local: Vec<Relation>) -> Result<Self> {
        if global.len() != base.r() || local.len() != base.n {
            return Err(NFoldError::Dimension(format!(
                "relations: {} global for {} rows, {} local for {} bricks",
                global.len(),
                base.r(),
                local.len(),
                base.n
            )));
        }
        Ok(Self { base, global, local })
    }

    pub fn equalities(base: CombNFoldInstance) -> Self {
        let (r, n) = (base.r(), base.n);
        Self { base, global: vec![Relation::Eq; r], local: vec![Relation::Eq; n] }
    }

    pub fn is_all_equalities(&self) -> bool {
        self.global.iter().chain(&self.local).all(|&r| r == Relation::Eq)
    }

    pub fn is_feasible(&self, x: &[i64]) -> bool {
        let b = &self.base;
        if x.len() != b.dim() || x.iter().zip(b.lower.iter().zip(&b.upper)).any(|(v, (l, u))| v < l || v > u) {
            return false;
        }
        let (Ok(sums), Ok(lhs)) = (b.brick_sums(x), b.global_lhs(x)) else {
            return false;
        };
        self.local.iter().zip(sums.iter().zip(&b.b_local)).all(|(rel, (&s, &rhs))| rel.holds(s, rhs))
            && self.global.iter().zip(lhs.iter().zip(&b.b0)).all(|(rel, (&v, &rhs))| rel.holds(v, rhs))
    }

    pub fn evaluate(&self, x: &[i64]) -> Result<i64> {
        self.base.evaluate(x)
    }
}

/// Where each source variable lives in a rewritten instance. Target variables
/// that are not the image of any source variable are dummies or slacks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableMap {
    /// flat target index of every source variable
    pub forward: Vec<usize>,
    pub target_t: usize,
    pub target_dim: usize,
    /// target variables with no source preimage that are pinned to zero
    pub dummies: Vec<usize>,
}

impl VariableMap {
    pub fn identity(dim: usize, t: usize) -> Self {
        Self { forward: (0..dim).collect(), target_t: t, target_dim: dim, dummies: Vec::new() }
    }

    /// `(brick, position)` of source variable `k` in the target.
    pub fn target_pair(&self, k: usize) -> (usize, usize) {
        let f = self.forward[k];
        (f / self.target_t, f % self.target_t)
    }

    /// Pulls a target point back to source coordinates.
    pub fn project(&self, target: &[i64]) -> Vec<i64> {
        self.forward.iter().map(|&f| target[f]).collect()
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &VariableMap) -> VariableMap {
        VariableMap {
            forward: self.forward.iter().map(|&f| next.forward[f]).collect(),
            target_t: next.target_t,
            target_dim: next.target_dim,
            dummies: self.dummies.iter().map(|&d| next.forward[d]).chain(next.dummies.iter().copied()).collect(),
        }
    }
}

fn sum(values: &[i64]) -> Result<i64> {
    values.iter().try_fold(0i64, |a, &v| add(a, v))
}

/// Appends `extra` columns per brick; `fill(i, c)` gives the bounds of new
/// column `c` in brick `i`. The new columns get Zero objective terms.
fn widen(
    inst: &CombNFoldInstance,
    new_rows: Vec<Vec<i64>>,
    extra: usize,
    mut fill: impl FnMut(usize, usize) -> (i64, i64),
) -> Result<(CombNFoldInstance, VariableMap)> {
    let (t, n) = (inst.t(), inst.n);
    let width = t + extra;
    let mut lower = Vec::with_capacity(n * width);
    let mut upper = Vec::with_capacity(n * width);
    let mut terms = Vec::with_capacity(n * width);
    let mut forward = Vec::with_capacity(n * t);
    for i in 0..n {
        for j in 0..t {
            forward.push(lower.len());
            lower.push(inst.lower[i * t + j]);
            upper.push(inst.upper[i * t + j]);
            terms.push(inst.objective.terms[i * t + j].clone());
        }
        for c in 0..extra {
            let (l, u) = fill(i, c);
            lower.push(l);
            upper.push(u);
            terms.push(Term::Zero);
        }
    }
    let target = CombNFoldInstance {
        bimatrix: Bimatrix::new(new_rows)?,
        n,
        b0: inst.b0.clone(),
        b_local: inst.b_local.clone(),
        lower,
        upper,
        objective: SeparableObjective::new(terms),
    };
    let map = VariableMap { forward, target_t: width, target_dim: n * width, dummies: Vec::new() };
    Ok((target, map))
}

/// Turns every local inequality into an equality with one slack column per
/// brick; global relations are carried over unchanged.
fn equalize_local_rows(rel: &RelationalInstance) -> Result<(RelationalInstance, VariableMap)> {
    let inst = &rel.base;
    let t = inst.t();
    if let Some(i) = rel.local.iter().position(|r| matches!(r, Relation::Lt | Relation::Gt)) {
        return Err(NFoldError::Relation(format!("strict relation on brick {i} is not supported")));
    }
    let mut bounds = Vec::with_capacity(inst.n);
    for i in 0..inst.n {
        let b = inst.b_local[i];
        let lo = sum(&inst.lower[i * t..(i + 1) * t])?;
        let hi = sum(&inst.upper[i * t..(i + 1) * t])?;
        // slack s = b − 1ᵀxⁱ
        bounds.push(match rel.local[i] {
            Relation::Eq => (0, 0),
            Relation::Le => (0, b.max(sub(b, lo)?).max(0)),
            Relation::Ge => ((-b).min(sub(b, hi)?).min(0), 0),
            Relation::Lt | Relation::Gt => unreachable!(),
        });
    }
    let rows = inst
        .bimatrix
        .rows()
        .into_iter()
        .map(|mut row| {
            row.push(0);
            row
        })
        .collect();
    let (target, map) = widen(inst, rows, 1, |i, _| bounds[i])?;
    let n = target.n;
    Ok((RelationalInstance { base: target, global: rel.global.clone(), local: vec![Relation::Eq; n] }, map))
}

/// Replaces local inequalities by equalities. Global rows must already be
/// equalities; strict local relations are rejected.
pub fn equalize_local(rel: &RelationalInstance) -> Result<(CombNFoldInstance, VariableMap)> {
    if rel.global.iter().any(|&r| r != Relation::Eq) {
        return Err(NFoldError::Relation("equalize_local expects equality global rows".into()));
    }
    let (out, map) = equalize_local_rows(rel)?;
    Ok((out.base, map))
}

/// Replaces global inequalities by equalities. Local rows must already be
/// equalities.
///
/// Brick width grows by `r + 1`: one slack per global row and one absorber.
/// The slack columns enter `D` as the identity, the absorber as a zero
/// column. In the original bricks both are pinned to zero. A new last brick
/// has its original columns pinned to zero, carries the slack values, and
/// has local right-hand side zero, so the absorber takes the negated slack
/// total. Strict rows are shifted by one first (`<` becomes `≤ b − 1`).
pub fn equalize_global(rel: &RelationalInstance) -> Result<(CombNFoldInstance, VariableMap)> {
    if rel.local.iter().any(|&r| r != Relation::Eq) {
        return Err(NFoldError::Relation("equalize_global expects equality local rows".into()));
    }
    let inst = &rel.base;
    let (t, r, n) = (inst.t(), inst.r(), inst.n);
    let mut b0 = inst.b0.clone();
    let mut rels = rel.global.clone();
    for (b, rel) in b0.iter_mut().zip(rels.iter_mut()) {
        match rel {
            Relation::Lt => {
                *b = sub(*b, 1)?;
                *rel = Relation::Le;
            }
            Relation::Gt => {
                *b = add(*b, 1)?;
                *rel = Relation::Ge;
            }
            _ => {}
        }
    }
    let b_inf = b0
        .iter()
        .chain(&inst.b_local)
        .map(|v| v.checked_abs().ok_or(NFoldError::Overflow("abs")))
        .try_fold(0i64, |m, v| Ok::<_, NFoldError>(m.max(v?)))?;

    // range of row ρ of D Σ xⁱ over the box
    let mut slack_bounds = Vec::with_capacity(r);
    for row in 0..r {
        let (mut lo, mut hi) = (0i64, 0i64);
        for k in 0..inst.dim() {
            let d = inst.bimatrix.get(row, k % t);
            let (a, b) = (mul(d, inst.lower[k])?, mul(d, inst.upper[k])?);
            lo = add(lo, a.min(b))?;
            hi = add(hi, a.max(b))?;
        }
        // slack s = b − (D Σ x)_ρ
        slack_bounds.push(match rels[row] {
            Relation::Eq => (0, 0),
            Relation::Le => (0, b_inf.max(sub(b0[row], lo)?)),
            Relation::Ge => ((-b_inf).min(sub(b0[row], hi)?), 0),
            Relation::Lt | Relation::Gt => unreachable!(),
        });
    }
    let absorb = slack_bounds.iter().try_fold(0i64, |a, &(l, u)| add(a, l.abs().max(u.abs())))?;

    let rows = (0..r)
        .map(|row| {
            let mut v = inst.bimatrix.row(row).to_vec();
            v.extend((0..r).map(|c| i64::from(c == row)));
            v.push(0);
            v
        })
        .collect();
    let (mut target, map) = widen(inst, rows, r + 1, |_, _| (0, 0))?;
    let width = t + r + 1;
    target.n = n + 1;
    target.b0 = b0;
    target.b_local.push(0);
    target.lower.extend(std::iter::repeat_n(0, t));
    target.upper.extend(std::iter::repeat_n(0, t));
    for &(l, u) in &slack_bounds {
        target.lower.push(l);
        target.upper.push(u);
    }
    target.lower.push(-absorb);
    target.upper.push(absorb);
    target.objective.terms.extend(std::iter::repeat_n(Term::Zero, width));
    let map = VariableMap { target_dim: (n + 1) * width, ..map };
    Ok((target, map))
}

/// Local rows first, then global rows.
pub fn equalize(rel: &RelationalInstance) -> Result<(CombNFoldInstance, VariableMap)> {
    if rel.is_all_equalities() {
        return Ok((rel.base.clone(), VariableMap::identity(rel.base.dim(), rel.base.t())));
    }
    let (mid, first) = equalize_local_rows(rel)?;
    if mid.global.iter().all(|&r| r == Relation::Eq) {
        return Ok((mid.base, first));
    }
    let (out, second) = equalize_global(&mid)?;
    Ok((out, first.then(&second)))
}

/// Equalizes, solves and maps the result back to the source variables.
pub fn solve_relational(
    rel: &RelationalInstance,
    cfg: &SolverConfig,
    relaxation: Option<&dyn RelaxationOracle>,
) -> Result<SolveReport> {
    let (target, map) = equalize(rel)?;
    let mut report = solve(&target, cfg, relaxation)?;
    if let Some(p) = report.point.take() {
        let x = map.project(&p);
        debug_assert!(rel.is_feasible(&x));
        debug_assert_eq!(Some(rel.evaluate(&x)?), report.objective_value);
        report.point = Some(x);
    }
    Ok(report)
}

/// A program with blocks of unequal width: block `τ` has its own `D_τ`
/// (`r` rows, `widths[τ]` columns), a local sum row, and bounds.
/// Variables are numbered block after block.
#[derive(Debug, Clone, PartialEq)]
pub struct PreNFoldInstance {
    pub widths: Vec<usize>,
    /// `blocks[τ]` is `D_τ`, row-major `r × widths[τ]`
    pub blocks: Vec<Vec<Vec<i64>>>,
    pub b0: Vec<i64>,
    pub b_local: Vec<i64>,
    pub lower: Vec<i64>,
    pub upper: Vec<i64>,
    pub objective: SeparableObjective,
    pub global: Vec<Relation>,
    pub local: Vec<Relation>,
}

impl PreNFoldInstance {
    pub fn dim(&self) -> usize {
        self.widths.iter().sum()
    }

    pub fn offsets(&self) -> Vec<usize> {
        self.widths
            .iter()
            .scan(0usize, |acc, &w| {
                let start = *acc;
                *acc += w;
                Some(start)
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        let blocks = self.widths.len();
        let r = self.b0.len();
        if blocks == 0 {
            v.push("at least one block is required".to_string());
        }
        if self.blocks.len() != blocks || self.b_local.len() != blocks || self.local.len() != blocks {
            v.push("block count mismatch".to_string());
        }
        if self.global.len() != r {
            v.push("global relation count mismatch".to_string());
        }
        for (tau, (block, &w)) in self.blocks.iter().zip(&self.widths).enumerate() {
            if block.len() != r || block.iter().any(|row| row.len() != w) {
                v.push(format!("block {tau} matrix is not {r} x {w}"));
            }
        }
        let dim = self.dim();
        if self.lower.len() != dim || self.upper.len() != dim || self.objective.len() != dim {
            v.push("bounds or objective length mismatch".to_string());
        }
        if self.lower.iter().zip(&self.upper).any(|(l, u)| l > u) {
            v.push("lower exceeds upper".to_string());
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(NFoldError::Invalid(v))
        }
    }

    pub fn is_feasible(&self, x: &[i64]) -> bool {
        if x.len() != self.dim() || x.iter().zip(self.lower.iter().zip(&self.upper)).any(|(v, (l, u))| v < l || v > u) {
            return false;
        }
        let offsets = self.offsets();
        let mut lhs = vec![0i128; self.b0.len()];
        for (tau, &w) in self.widths.iter().enumerate() {
            let part = &x[offsets[tau]..offsets[tau] + w];
            let s: i128 = part.iter().map(|&v| v as i128).sum();
            if !holds_wide(self.local[tau], s, self.b_local[tau]) {
                return false;
            }
            for (row, acc) in lhs.iter_mut().enumerate() {
                *acc += self.blocks[tau][row].iter().zip(part).map(|(&d, &v)| d as i128 * v as i128).sum::<i128>();
            }
        }
        self.global.iter().zip(lhs.iter().zip(&self.b0)).all(|(rel, (&v, &b))| holds_wide(*rel, v, b))
    }
}

fn holds_wide(rel: Relation, lhs: i128, rhs: i64) -> bool {
    let rhs = rhs as i128;
    match rel {
        Relation::Lt => lhs < rhs,
        Relation::Le => lhs <= rhs,
        Relation::Eq => lhs == rhs,
        Relation::Ge => lhs >= rhs,
        Relation::Gt => lhs > rhs,
    }
}

/// Embeds every block in a brick of width `Σ t_τ`: block `τ` occupies
/// positions `T̄_{τ−1} .. T̄_τ` of brick `τ`, the rest of the brick is dummy
/// (pinned to zero, Zero objective). `D = (D_1 ⋯ D_T)`.
pub fn lift_pre_nfold(p: &PreNFoldInstance) -> Result<(RelationalInstance, VariableMap)> {
    p.validate()?;
    let blocks = p.widths.len();
    let t = p.dim();
    let r = p.b0.len();
    if r == 0 {
        return Err(NFoldError::Invalid(vec!["at least one global row is required".into()]));
    }
    let rows: Vec<Vec<i64>> =
        (0..r).map(|row| p.blocks.iter().flat_map(|b| b[row].iter().copied()).collect()).collect();
    let offsets = p.offsets();
    let mut lower = vec![0; blocks * t];
    let mut upper = vec![0; blocks * t];
    let mut terms = vec![Term::Zero; blocks * t];
    let mut forward = Vec::with_capacity(t);
    for (tau, &w) in p.widths.iter().enumerate() {
        for j in 0..w {
            let src = offsets[tau] + j;
            let dst = tau * t + offsets[tau] + j;
            forward.push(dst);
            lower[dst] = p.lower[src];
            upper[dst] = p.upper[src];
            terms[dst] = p.objective.terms[src].clone();
        }
    }
    let mut is_image = vec![false; blocks * t];
    for &f in &forward {
        is_image[f] = true;
    }
    let dummies = (0..blocks * t).filter(|&k| !is_image[k]).collect();
    let base = CombNFoldInstance {
        bimatrix: Bimatrix::new(rows)?,
        n: blocks,
        b0: p.b0.clone(),
        b_local: p.b_local.clone(),
        lower,
        upper,
        objective: SeparableObjective::new(terms),
    };
    let rel = RelationalInstance::new(base, p.global.clone(), p.local.clone())?;
    Ok((rel, VariableMap { forward, target_t: t, target_dim: blocks * t, dummies }))
}

/// Supplies an optimum of the continuous relaxation of an instance, or
/// `None` when the relaxation is infeasible.
pub trait RelaxationOracle: Send + Sync {
    fn relaxed_optimum(&self, inst: &CombNFoldInstance) -> Result<Option<Vec<Ratio<i64>>>>;
}

/// Intersects the box with `[⌊x̂⌋ − ntG, ⌈x̂⌉ + ntG]`, which keeps some
/// integer optimum when `x̂` is a relaxation optimum and `G` bounds the
/// Graver complexity.
pub fn tighten_box(inst: &CombNFoldInstance, fractional: &[Ratio<i64>], g: i64) -> Result<CombNFoldInstance> {
    if fractional.len() != inst.dim() {
        return Err(NFoldError::Dimension(format!(
            "relaxation point has {} coordinates, instance has {}",
            fractional.len(),
            inst.dim()
        )));
    }
    let radius = g.saturating_mul(inst.dim() as i64);
    let mut out = inst.clone();
    for (k, q) in fractional.iter().enumerate() {
        out.lower[k] = q.floor().to_integer().saturating_sub(radius).max(inst.lower[k]);
        out.upper[k] = q.ceil().to_integer().saturating_add(radius).min(inst.upper[k]);
    }
    if let Some(k) = (0..out.dim()).find(|&k| out.lower[k] > out.upper[k]) {
        return Err(NFoldError::InfeasiblePoint(format!("relaxation point lies outside the box at variable {k}")));
    }
    Ok(out)
}
