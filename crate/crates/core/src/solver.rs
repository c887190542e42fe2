//! Graver-best augmentation: step-length sweep, the augmentation loop, and a
//! Phase-I auxiliary program for the initial feasible point.

use rayon::prelude::*;

use crate::augment::{find_best_step_with, DpLimits, DpStep};
use crate::error::{add, mul, sub, NFoldError, Result};
use crate::instance::{Bimatrix, CombNFoldInstance};
use crate::objective::{SeparableObjective, Term};
use crate::transform::{tighten_box, RelaxationOracle};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Radius from the Graver complexity bound; certifies optimality.
    Exact,
    /// Caller-chosen radius; every step is valid but the final point is only
    /// a local optimum with respect to steps of that radius.
    Heuristic(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaStrategy {
    /// Every step length in `[1, α_max]`.
    FullSweep,
    /// Step lengths `1, 2, 4, …`, then an exact line search along the
    /// winning direction.
    PowersOfTwoThenRefine,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub mode: Mode,
    pub max_iterations: Option<usize>,
    pub alpha_strategy: AlphaStrategy,
    pub trace_enabled: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Exact,
            max_iterations: None,
            alpha_strategy: AlphaStrategy::FullSweep,
            trace_enabled: true,
        }
    }
}

impl SolverConfig {
    pub fn with_strategy(mut self, strategy: AlphaStrategy) -> Self {
        self.alpha_strategy = strategy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.mode {
            Mode::Heuristic(g) if g < 1 => {
                Err(NFoldError::Invalid(vec![format!("heuristic radius must be at least 1, got {g}")]))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    /// Heuristic mode stopped: no improving step within the chosen radius.
    LocalOptimum,
    Infeasible,
    Error(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEntry {
    pub iteration: usize,
    pub alpha: i64,
    /// `f(x) − f(x + αh)`, always positive.
    pub drop: i64,
    /// objective after the step
    pub objective: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub point: Option<Vec<i64>>,
    pub objective_value: Option<i64>,
    /// objective of the point the augmentation started from
    pub initial_objective: Option<i64>,
    pub iterations: usize,
    pub trace: Vec<TraceEntry>,
    pub phase_one: Option<Box<SolveReport>>,
}

impl SolveReport {
    pub(crate) fn infeasible() -> Self {
        Self::empty(SolveStatus::Infeasible)
    }

    pub(crate) fn empty(status: SolveStatus) -> Self {
        Self {
            status,
            point: None,
            objective_value: None,
            initial_objective: None,
            iterations: 0,
            trace: Vec::new(),
            phase_one: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

/// An augmenting direction `h` with its step length and weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepPair {
    pub alpha: i64,
    pub h: Vec<i64>,
    /// `f(x + αh) − f(x)`
    pub weight: i64,
}

/// `t² (2rΔ)^r`, the bound on the Graver complexity of `(D; 1ᵀ)`.
pub fn graver_complexity_bound(bm: &Bimatrix) -> Result<i64> {
    let err = || NFoldError::BoundTooLarge("g(E) bound exceeds integer range");
    let t = i64::try_from(bm.t()).map_err(|_| err())?;
    let r = i64::try_from(bm.r()).map_err(|_| err())?;
    let base = bm
        .delta()
        .ok()
        .and_then(|d| d.checked_mul(2))
        .and_then(|v| v.checked_mul(r))
        .ok_or_else(err)?;
    let mut acc = t.checked_mul(t).ok_or_else(err)?;
    for _ in 0..bm.r() {
        acc = acc.checked_mul(base).ok_or_else(err)?;
    }
    Ok(acc)
}

/// `4·n·t·(1 + log₂(1 + f(x0) − f(x*)))`, a conservative cap on the number of
/// Graver-best steps from `x0` to an optimum.
pub fn iteration_sanity_cap(n: usize, t: usize, initial: i64, optimum: i64) -> f64 {
    let gap = (initial as f64 - optimum as f64).max(0.0);
    4.0 * n as f64 * t as f64 * (1.0 + (1.0 + gap).log2())
}

/// Radii and step-length range for one instance under one configuration.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Plan {
    pub g: i64,
    pub limits: DpLimits,
    pub alpha_max: i64,
}

pub(crate) fn plan(inst: &CombNFoldInstance, cfg: &SolverConfig) -> Result<Plan> {
    cfg.validate()?;
    let delta = inst.bimatrix.delta()?;
    let g = match cfg.mode {
        Mode::Exact => graver_complexity_bound(&inst.bimatrix)?,
        Mode::Heuristic(g) => g,
    };
    let limits = DpLimits::from_radius(g, delta).clip_to_box(inst);
    if cfg.mode == Mode::Exact {
        limits.layer_size(inst.r())?;
    }
    let ntg = g.saturating_mul(inst.dim() as i64);
    let alpha_max = ntg.min(inst.box_width()?);
    Ok(Plan { g, limits, alpha_max })
}

fn step_lengths(plan: &Plan, strategy: AlphaStrategy) -> Vec<i64> {
    match strategy {
        AlphaStrategy::FullSweep => (1..=plan.alpha_max).collect(),
        AlphaStrategy::PowersOfTwoThenRefine => {
            std::iter::successors(Some(1i64), |a| a.checked_mul(2))
                .take_while(|&a| a <= plan.alpha_max)
                .collect()
        }
    }
}

/// Largest `a` with `l <= x + a·h <= u`.
fn max_feasible_length(inst: &CombNFoldInstance, x: &[i64], h: &[i64]) -> i64 {
    h.iter()
        .enumerate()
        .filter(|(_, &hk)| hk != 0)
        .map(|(k, &hk)| {
            let room = if hk > 0 { inst.upper[k] - x[k] } else { x[k] - inst.lower[k] };
            room / hk.abs()
        })
        .min()
        .unwrap_or(0)
}

/// `f(x + a·h) − f(x)` over the support of `h`.
fn weight_along(inst: &CombNFoldInstance, x: &[i64], h: &[i64], a: i64) -> Result<i64> {
    let mut w = 0i64;
    for (k, &hk) in h.iter().enumerate().filter(|(_, &hk)| hk != 0) {
        let term = &inst.objective.terms[k];
        w = add(w, sub(term.eval(add(x[k], mul(a, hk)?)?)?, term.eval(x[k])?)?)?;
    }
    Ok(w)
}

/// Exact line search of the convex function `a ↦ f(x + a·h)` on `[1, a_max]`.
fn line_search(inst: &CombNFoldInstance, x: &[i64], h: &[i64]) -> Result<(i64, i64)> {
    let a_max = max_feasible_length(inst, x, h);
    // first a with φ(a+1) >= φ(a)
    let (mut lo, mut hi) = (1i64, a_max);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if weight_along(inst, x, h, mid + 1)? >= weight_along(inst, x, h, mid)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok((lo, weight_along(inst, x, h, lo)?))
}

pub(crate) fn best_step_planned(
    inst: &CombNFoldInstance,
    x: &[i64],
    plan: &Plan,
    strategy: AlphaStrategy,
) -> Result<Option<StepPair>> {
    let alphas = step_lengths(plan, strategy);
    let results: Vec<Result<Option<DpStep>>> = alphas
        .par_iter()
        .map(|&alpha| find_best_step_with(inst, x, alpha, &plan.limits))
        .collect();
    let mut best: Option<StepPair> = None;
    for (alpha, res) in alphas.into_iter().zip(results) {
        if let Some(step) = res? {
            if step.weight < 0 && best.as_ref().is_none_or(|b| step.weight < b.weight) {
                best = Some(StepPair { alpha, h: step.h, weight: step.weight });
            }
        }
    }
    if strategy == AlphaStrategy::PowersOfTwoThenRefine {
        if let Some(b) = best.as_mut() {
            let (alpha, weight) = line_search(inst, x, &b.h)?;
            if weight < b.weight {
                b.alpha = alpha;
                b.weight = weight;
            }
        }
    }
    Ok(best)
}

/// The best step pair over all step lengths, or `None` if no step improves.
pub fn graver_best_step(inst: &CombNFoldInstance, x: &[i64], cfg: &SolverConfig) -> Result<Option<StepPair>> {
    if !inst.is_feasible(x) {
        return Err(NFoldError::InfeasiblePoint("augmentation needs a feasible point".into()));
    }
    let plan = plan(inst, cfg)?;
    best_step_planned(inst, x, &plan, cfg.alpha_strategy)
}

/// Runs Graver-best augmentation from a feasible `x0`.
pub fn optimize(inst: &CombNFoldInstance, x0: &[i64], cfg: &SolverConfig) -> Result<SolveReport> {
    if !inst.is_feasible(x0) {
        return Err(NFoldError::InfeasiblePoint("starting point violates the constraints".into()));
    }
    let plan = plan(inst, cfg)?;
    let mut x = x0.to_vec();
    let mut value = inst.evaluate(&x)?;
    let mut report = SolveReport::empty(SolveStatus::Optimal);
    report.initial_objective = Some(value);
    loop {
        if let Some(cap) = cfg.max_iterations {
            if report.iterations >= cap {
                report.status = SolveStatus::Error(NFoldError::IterationCap { cap }.to_string());
                report.point = Some(x);
                report.objective_value = Some(value);
                return Ok(report);
            }
        }
        let Some(step) = best_step_planned(inst, &x, &plan, cfg.alpha_strategy)? else {
            break;
        };
        for (xk, hk) in x.iter_mut().zip(&step.h) {
            *xk = add(*xk, mul(step.alpha, *hk)?)?;
        }
        let next = add(value, step.weight)?;
        debug_assert!(next < value && inst.is_feasible(&x));
        report.iterations += 1;
        if cfg.trace_enabled {
            report.trace.push(TraceEntry {
                iteration: report.iterations,
                alpha: step.alpha,
                drop: value - next,
                objective: next,
            });
        }
        value = next;
    }
    report.status = match cfg.mode {
        Mode::Exact => SolveStatus::Optimal,
        Mode::Heuristic(_) => SolveStatus::LocalOptimum,
    };
    report.point = Some(x);
    report.objective_value = Some(value);
    Ok(report)
}

/// Per brick, starts at the lower bound and raises coordinates in index
/// order until the brick sums to its right-hand side. `None` if some brick
/// cannot reach its sum inside the box.
pub fn greedy_local_point(inst: &CombNFoldInstance) -> Result<Option<Vec<i64>>> {
    let t = inst.t();
    let mut x = inst.lower.clone();
    for i in 0..inst.n {
        let range = i * t..(i + 1) * t;
        let low: i64 = inst.lower[range.clone()].iter().try_fold(0i64, |a, &v| add(a, v))?;
        let high: i64 = inst.upper[range.clone()].iter().try_fold(0i64, |a, &v| add(a, v))?;
        let b = inst.b_local[i];
        if b < low || b > high {
            return Ok(None);
        }
        let mut need = b - low;
        for k in range {
            if need == 0 {
                break;
            }
            let raise = need.min(inst.upper[k] - inst.lower[k]);
            x[k] += raise;
            need -= raise;
        }
    }
    Ok(Some(x))
}

/// Outcome of the feasibility phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PhaseOne {
    Feasible(Vec<i64>),
    Infeasible,
    /// Heuristic mode stopped with positive auxiliary cost.
    Inconclusive,
}

/// Largest number of free variables per brick for which [`repair_residual`]
/// scans all pairs.
const REPAIR_MAX_FREE: usize = 64;

/// Moves `x` along steps `a·(e_p − e_q)` inside single bricks while that
/// lowers `‖b0 − Dx‖₁`, keeping `x` inside the box and every brick sum
/// fixed. Returns the final residual norm.
pub fn repair_residual(inst: &CombNFoldInstance, x: &mut [i64]) -> Result<i64> {
    let (t, r) = (inst.t(), inst.r());
    let d = &inst.bimatrix;
    let mut residual: Vec<i64> =
        inst.b0.iter().zip(inst.global_lhs(x)?).map(|(&b, lhs)| sub(b, lhs)).collect::<Result<_>>()?;
    let norm = |res: &[i64]| res.iter().try_fold(0i64, |a, &v| add(a, v.checked_abs().ok_or(NFoldError::Overflow("abs"))?));
    let mut current = norm(&residual)?;
    let free: Vec<Vec<usize>> = (0..inst.n)
        .map(|i| (0..t).filter(|&j| inst.lower[i * t + j] < inst.upper[i * t + j]).collect())
        .collect();
    let mut improved = true;
    while improved && current > 0 {
        improved = false;
        for (i, cols) in free.iter().enumerate() {
            if cols.len() < 2 || cols.len() > REPAIR_MAX_FREE {
                continue;
            }
            for &p in cols {
                for &q in cols {
                    let (kp, kq) = (i * t + p, i * t + q);
                    let room = (inst.upper[kp] - x[kp]).min(x[kq] - inst.lower[kq]);
                    if p == q || room == 0 {
                        continue;
                    }
                    // change of the residual per unit step: −(D_p − D_q)
                    let dir: Vec<i64> = (0..r).map(|row| d.get(row, q) - d.get(row, p)).collect();
                    if dir.iter().all(|&c| c == 0) {
                        continue;
                    }
                    // ‖residual + a·dir‖₁ is convex in a: try its breakpoints
                    let mut candidates = vec![1, room];
                    for (&res, &c) in residual.iter().zip(&dir) {
                        if c != 0 {
                            let a = -res / c;
                            candidates.extend([a - 1, a, a + 1]);
                        }
                    }
                    let mut best: Option<(i64, i64)> = None;
                    for a in candidates.into_iter().filter(|&a| a >= 1 && a <= room) {
                        let trial: Vec<i64> =
                            residual.iter().zip(&dir).map(|(&v, &c)| add(v, mul(a, c)?)).collect::<Result<_>>()?;
                        let value = norm(&trial)?;
                        if value < current && best.is_none_or(|(_, b)| value < b) {
                            best = Some((a, value));
                        }
                    }
                    if let Some((a, value)) = best {
                        x[kp] += a;
                        x[kq] -= a;
                        for (v, &c) in residual.iter_mut().zip(&dir) {
                            *v += a * c;
                        }
                        current = value;
                        improved = true;
                    }
                }
            }
        }
    }
    Ok(current)
}

/// The auxiliary program: `D̄ = (D I −I 0)`, width `t + 2r + 1`, the original
/// bricks with auxiliary columns pinned to zero, plus one slack brick with the
/// original columns pinned to zero. Returns the program and its starting point.
///
/// The columns of `I` and `−I` are interleaved as `e_1, −e_1, e_2, −e_2, …` so
/// that each row's signature is settled as soon as its pair has been placed.
pub fn phase_one_instance(inst: &CombNFoldInstance, x0: &[i64]) -> Result<(CombNFoldInstance, Vec<i64>)> {
    let (t, r, n) = (inst.t(), inst.r(), inst.n);
    let width = t + 2 * r + 1;
    let residual: Vec<i64> = inst
        .b0
        .iter()
        .zip(inst.global_lhs(x0)?)
        .map(|(&b, lhs)| sub(b, lhs))
        .collect::<Result<_>>()?;
    let budget = residual.iter().try_fold(0i64, |a, &v| add(a, v.checked_abs().ok_or(NFoldError::Overflow("abs"))?))?;

    let rows = (0..r)
        .map(|row| {
            let mut v = inst.bimatrix.row(row).to_vec();
            v.extend((0..r).flat_map(|c| [i64::from(c == row), -i64::from(c == row)]));
            v.push(0);
            v
        })
        .collect();
    let mut lower = Vec::with_capacity((n + 1) * width);
    let mut upper = Vec::with_capacity((n + 1) * width);
    let mut terms = Vec::with_capacity((n + 1) * width);
    let mut start = Vec::with_capacity((n + 1) * width);
    for i in 0..n {
        let range = i * t..(i + 1) * t;
        lower.extend_from_slice(&inst.lower[range.clone()]);
        upper.extend_from_slice(&inst.upper[range.clone()]);
        start.extend_from_slice(&x0[range]);
        lower.extend(std::iter::repeat_n(0, 2 * r + 1));
        upper.extend(std::iter::repeat_n(0, 2 * r + 1));
        start.extend(std::iter::repeat_n(0, 2 * r + 1));
        terms.extend(std::iter::repeat_n(Term::Zero, width));
    }
    lower.extend(std::iter::repeat_n(0, width));
    upper.extend(std::iter::repeat_n(0, t));
    upper.extend(std::iter::repeat_n(budget, 2 * r + 1));
    terms.extend(std::iter::repeat_n(Term::Zero, t));
    terms.extend(std::iter::repeat_n(Term::Linear(1), 2 * r));
    terms.push(Term::Zero);
    start.extend(std::iter::repeat_n(0, t));
    start.extend(residual.iter().flat_map(|&v| [v.max(0), (-v).max(0)]));
    start.push(0);

    let mut b_local = inst.b_local.clone();
    b_local.push(budget);
    let aux = CombNFoldInstance {
        bimatrix: Bimatrix::new(rows)?,
        n: n + 1,
        b0: inst.b0.clone(),
        b_local,
        lower,
        upper,
        objective: SeparableObjective::new(terms),
    };
    debug_assert!(aux.is_feasible(&start));
    Ok((aux, start))
}

/// Finds a feasible point, solving the auxiliary program if the greedy
/// local point misses the global rows. The report of the auxiliary solve is
/// returned alongside when one was needed.
pub fn phase_one(inst: &CombNFoldInstance, cfg: &SolverConfig) -> Result<(PhaseOne, Option<SolveReport>)> {
    let Some(mut x0) = greedy_local_point(inst)? else {
        return Ok((PhaseOne::Infeasible, None));
    };
    if repair_residual(inst, &mut x0)? == 0 {
        return Ok((PhaseOne::Feasible(x0), None));
    }
    let (aux, start) = phase_one_instance(inst, &x0)?;
    let report = optimize(&aux, &start, cfg)?;
    let outcome = match (&report.status, report.objective_value) {
        (SolveStatus::Error(_), _) => PhaseOne::Inconclusive,
        (_, Some(0)) => {
            let point = report.point.as_ref().expect("optimal report carries a point");
            let width = aux.t();
            let x: Vec<i64> = (0..inst.n)
                .flat_map(|i| point[i * width..i * width + inst.t()].iter().copied())
                .collect();
            debug_assert!(inst.is_feasible(&x));
            PhaseOne::Feasible(x)
        }
        (SolveStatus::Optimal, _) => PhaseOne::Infeasible,
        _ => PhaseOne::Inconclusive,
    };
    Ok((outcome, Some(report)))
}

/// A feasible point, or `None` when the instance is infeasible (or, in
/// heuristic mode, when the auxiliary program stalled).
pub fn find_initial_feasible(inst: &CombNFoldInstance, cfg: &SolverConfig) -> Result<Option<Vec<i64>>> {
    Ok(match phase_one(inst, cfg)?.0 {
        PhaseOne::Feasible(x) => Some(x),
        _ => None,
    })
}

/// Full pipeline: optional box tightening, feasibility, augmentation.
pub fn solve(
    inst: &CombNFoldInstance,
    cfg: &SolverConfig,
    relaxation: Option<&dyn RelaxationOracle>,
) -> Result<SolveReport> {
    inst.validate().into_result()?;
    let tightened;
    let inst = match relaxation {
        None => inst,
        Some(oracle) => {
            let Some(frac) = oracle.relaxed_optimum(inst)? else {
                return Ok(SolveReport::infeasible());
            };
            let g = plan(inst, cfg)?.g;
            tightened = tighten_box(inst, &frac, g)?;
            &tightened
        }
    };
    // refuse before doing any work if the exact radius is out of range
    plan(inst, cfg)?;
    let (outcome, aux_report) = phase_one(inst, cfg)?;
    let mut report = match outcome {
        PhaseOne::Feasible(x0) => optimize(inst, &x0, cfg)?,
        PhaseOne::Infeasible => SolveReport::infeasible(),
        PhaseOne::Inconclusive => SolveReport::empty(SolveStatus::Error(
            "heuristic feasibility phase stopped with positive auxiliary cost".into(),
        )),
    };
    report.phase_one = aux_report.map(Box::new);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::instance_a;
    use crate::objective::PiecewiseLinear;

    fn bm(rows: Vec<Vec<i64>>) -> Bimatrix {
        Bimatrix::new(rows).unwrap()
    }

    #[test]
    fn graver_bound_examples() {
        assert_eq!(graver_complexity_bound(&bm(vec![vec![1, 0]])).unwrap(), 16);
        assert_eq!(graver_complexity_bound(&bm(vec![vec![0, 0, 0]])).unwrap(), 18);
        assert_eq!(graver_complexity_bound(&bm(vec![vec![1, 0], vec![0, 1]])).unwrap(), 256);
        let huge = bm(vec![vec![1_000_000; 2]; 3]);
        assert!(matches!(graver_complexity_bound(&huge), Err(NFoldError::BoundTooLarge(_))));
    }

    #[test]
    fn degenerate_box_has_no_step() {
        let mut inst = instance_a(&[2, 1, 1, 1]);
        let x = vec![1, 0, 1, 0];
        inst.lower = x.clone();
        inst.upper = x.clone();
        assert_eq!(graver_best_step(&inst, &x, &SolverConfig::default()).unwrap(), None);
    }

    #[test]
    fn improving_step_exists_on_instance_a() {
        let inst = instance_a(&[2, 1, 1, 1]);
        let step = graver_best_step(&inst, &[1, 0, 1, 0], &SolverConfig::default()).unwrap().unwrap();
        assert_eq!(step.weight, -1);
    }

    #[test]
    fn optimize_instance_a() {
        let inst = instance_a(&[2, 1, 1, 1]);
        let rep = optimize(&inst, &[1, 0, 1, 0], &SolverConfig::default()).unwrap();
        assert_eq!(rep.status, SolveStatus::Optimal);
        assert_eq!(rep.objective_value, Some(2));
        assert_eq!(rep.iterations, 1);
        // already optimal: no iterations, same point
        let again = optimize(&inst, rep.point.as_ref().unwrap(), &SolverConfig::default()).unwrap();
        assert_eq!(again.iterations, 0);
        assert_eq!(again.point, rep.point);
    }

    #[test]
    fn optimize_quadratic_brick() {
        let sq = PiecewiseLinear::new((0..=4).map(|v| (v, v * v)).collect()).unwrap();
        let inst = CombNFoldInstance {
            bimatrix: bm(vec![vec![0, 0]]),
            n: 1,
            b0: vec![0],
            b_local: vec![4],
            lower: vec![0, 0],
            upper: vec![4, 4],
            objective: SeparableObjective::new(vec![Term::PiecewiseLinear(sq), Term::Zero]),
        };
        let rep = solve(&inst, &SolverConfig::default(), None).unwrap();
        assert_eq!(rep.status, SolveStatus::Optimal);
        assert_eq!(rep.point, Some(vec![0, 4]));
        assert_eq!(rep.objective_value, Some(0));
    }

    #[test]
    fn initial_point_examples() {
        let inst = instance_a(&[2, 1, 1, 1]);
        assert_eq!(find_initial_feasible(&inst, &SolverConfig::default()).unwrap(), Some(vec![1, 0, 1, 0]));

        let mut cap = instance_a(&[0; 4]);
        cap.b_local = vec![3, 1];
        assert_eq!(greedy_local_point(&cap).unwrap(), None);
        assert_eq!(find_initial_feasible(&cap, &SolverConfig::default()).unwrap(), None);

        let infeasible = CombNFoldInstance {
            bimatrix: bm(vec![vec![1, 0]]),
            n: 1,
            b0: vec![2],
            b_local: vec![1],
            lower: vec![0, 0],
            upper: vec![1, 1],
            objective: SeparableObjective::zero(2),
        };
        let (outcome, aux) = phase_one(&infeasible, &SolverConfig::default()).unwrap();
        assert_eq!(outcome, PhaseOne::Infeasible);
        assert_eq!(aux.unwrap().objective_value, Some(1));
        let rep = solve(&infeasible, &SolverConfig::default(), None).unwrap();
        assert_eq!(rep.status, SolveStatus::Infeasible);
    }

    #[test]
    fn phase_one_repairs_global_rows() {
        // greedy puts brick 0 at (1,0) and brick 1 at (1,0): D x = 2 ≠ 0
        let inst = CombNFoldInstance {
            bimatrix: bm(vec![vec![1, -1]]),
            n: 2,
            b0: vec![0],
            b_local: vec![1, 1],
            lower: vec![0; 4],
            upper: vec![1; 4],
            objective: SeparableObjective::zero(4),
        };
        let x = find_initial_feasible(&inst, &SolverConfig::default()).unwrap().unwrap();
        assert!(inst.is_feasible(&x));
    }

    #[test]
    fn heuristic_mode_reports_local_optimum() {
        let inst = instance_a(&[2, 1, 1, 1]);
        let cfg = SolverConfig { mode: Mode::Heuristic(1), ..Default::default() };
        let rep = solve(&inst, &cfg, None).unwrap();
        assert_eq!(rep.status, SolveStatus::LocalOptimum);
        assert_eq!(rep.objective_value, Some(2));
        let bad = SolverConfig { mode: Mode::Heuristic(0), ..Default::default() };
        assert!(solve(&inst, &bad, None).is_err());
    }

    #[test]
    fn iteration_cap_returns_partial_report() {
        let inst = instance_a(&[2, 1, 1, 1]);
        let cfg = SolverConfig { max_iterations: Some(0), ..Default::default() };
        let rep = optimize(&inst, &[1, 0, 1, 0], &cfg).unwrap();
        assert!(matches!(rep.status, SolveStatus::Error(_)));
        assert_eq!(rep.point, Some(vec![1, 0, 1, 0]));
    }

    #[test]
    fn exact_mode_refuses_huge_bound() {
        let mut inst = instance_a(&[0; 4]);
        inst.bimatrix = bm(vec![vec![1_000_000, 1]; 3]);
        inst.b0 = vec![0; 3];
        let err = solve(&inst, &SolverConfig::default(), None).unwrap_err();
        assert!(matches!(err, NFoldError::BoundTooLarge(_)));
    }

    #[test]
    fn powers_of_two_with_line_search_takes_long_steps() {
        let inst = CombNFoldInstance {
            bimatrix: bm(vec![vec![0, 0]]),
            n: 1,
            b0: vec![0],
            b_local: vec![1000],
            lower: vec![0, 0],
            upper: vec![1000, 1000],
            objective: SeparableObjective::linear(&[1, 0]),
        };
        let cfg = SolverConfig::default().with_strategy(AlphaStrategy::PowersOfTwoThenRefine);
        let rep = optimize(&inst, &[1000, 0], &cfg).unwrap();
        assert_eq!(rep.objective_value, Some(0));
        assert_eq!(rep.iterations, 1);
        assert_eq!(rep.point, Some(vec![0, 1000]));
        assert_eq!(rep.trace[0].drop, 1000);
    }

    #[test]
    fn repair_moves_within_bricks() {
        // D = (1 2), two bricks of sum 3; b0 = 8 needs two units moved to column 2
        let inst = CombNFoldInstance {
            bimatrix: bm(vec![vec![1, 2]]),
            n: 2,
            b0: vec![8],
            b_local: vec![3, 3],
            lower: vec![0; 4],
            upper: vec![3; 4],
            objective: SeparableObjective::zero(4),
        };
        let mut x = vec![3, 0, 3, 0];
        assert_eq!(repair_residual(&inst, &mut x).unwrap(), 0);
        assert!(inst.is_feasible(&x));

        // 2·x + 4·y is even, so the best reachable residual against 15 is 1
        let mut odd = inst.clone();
        odd.bimatrix = bm(vec![vec![2, 4]]);
        odd.b0 = vec![15];
        let mut y = vec![3, 0, 3, 0];
        assert_eq!(repair_residual(&odd, &mut y).unwrap(), 1);
        assert_eq!(odd.brick_sums(&y).unwrap(), vec![3, 3]);
    }
}
