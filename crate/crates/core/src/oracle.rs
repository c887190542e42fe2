//! Exhaustive ground truth: brute-force optima over the box, brute-force
//! Graver bases of small matrices, and a seeded generator of tiny instances.
//!
//! Everything here is deliberately naive. The only shared code with the
//! solver is the instance type and objective evaluation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{NFoldError, Result};
use crate::instance::{Bimatrix, CombNFoldInstance};
use crate::objective::SeparableObjective;
use crate::solver::{SolveReport, SolveStatus};
use crate::transform::{PreNFoldInstance, Relation, RelationalInstance};

pub mod apps;

/// Default limit on the number of box points the oracle will enumerate.
pub const DEFAULT_CAP: u128 = 10_000_000;

fn volume(lower: &[i64], upper: &[i64]) -> u128 {
    lower.iter().zip(upper).fold(1u128, |acc, (&l, &u)| {
        acc.saturating_mul((u as i128 - l as i128 + 1).max(0) as u128)
    })
}

fn check_cap(lower: &[i64], upper: &[i64], cap: u128) -> Result<()> {
    if volume(lower, upper) > cap {
        Err(NFoldError::OracleTooLarge { cap })
    } else {
        Ok(())
    }
}

/// Calls `visit` on every integer point of `[lower, upper]` in lexicographic
/// order. Stops early if `visit` returns `false`.
pub fn for_each_point(lower: &[i64], upper: &[i64], mut visit: impl FnMut(&[i64]) -> bool) {
    if lower.iter().zip(upper).any(|(l, u)| l > u) {
        return;
    }
    let mut x = lower.to_vec();
    loop {
        if !visit(&x) {
            return;
        }
        // odometer increment, last coordinate fastest
        let mut k = x.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if x[k] < upper[k] {
                x[k] += 1;
                break;
            }
            x[k] = lower[k];
        }
    }
}

/// Lexicographically first minimizer of `objective` over the points of the
/// box accepted by `feasible`. Partitioned on the first coordinate and
/// evaluated in parallel.
pub fn minimize_over_box<F, O>(lower: &[i64], upper: &[i64], cap: u128, feasible: F, objective: O) -> Result<Option<(Vec<i64>, i64)>>
where
    F: Fn(&[i64]) -> bool + Sync,
    O: Fn(&[i64]) -> Result<i64> + Sync,
{
    check_cap(lower, upper, cap)?;
    if lower.is_empty() {
        return Ok(if feasible(&[]) { Some((Vec::new(), objective(&[])?)) } else { None });
    }
    let parts: Vec<Result<Option<(Vec<i64>, i64)>>> = (lower[0]..=upper[0])
        .into_par_iter()
        .map(|first| {
            let mut lo = lower.to_vec();
            let mut hi = upper.to_vec();
            lo[0] = first;
            hi[0] = first;
            let mut best: Option<(Vec<i64>, i64)> = None;
            let mut err = None;
            for_each_point(&lo, &hi, |x| {
                if feasible(x) {
                    match objective(x) {
                        Ok(v) => {
                            if best.as_ref().is_none_or(|b| v < b.1) {
                                best = Some((x.to_vec(), v));
                            }
                        }
                        Err(e) => {
                            err = Some(e);
                            return false;
                        }
                    }
                }
                true
            });
            match err {
                Some(e) => Err(e),
                None => Ok(best),
            }
        })
        .collect();
    let mut best: Option<(Vec<i64>, i64)> = None;
    for part in parts {
        if let Some(cand) = part? {
            if best.as_ref().is_none_or(|b| cand.1 < b.1) {
                best = Some(cand);
            }
        }
    }
    Ok(best)
}

fn report(best: Option<(Vec<i64>, i64)>) -> SolveReport {
    match best {
        None => SolveReport::infeasible(),
        Some((x, v)) => {
            let mut rep = SolveReport::empty(SolveStatus::Optimal);
            rep.point = Some(x);
            rep.objective_value = Some(v);
            rep.initial_objective = Some(v);
            rep
        }
    }
}

/// Brute-force optimum of a relational program, checking every relation
/// directly on each point.
///
/// Bricks are enumerated one at a time: first every assignment of each brick
/// that satisfies its local relation, then every combination of those, so
/// boxes much larger than the number of locally valid points stay cheap.
pub fn brute_force_relational(rel: &RelationalInstance, cap: u128) -> Result<SolveReport> {
    let inst = &rel.base;
    inst.validate().into_result()?;
    check_cap(&inst.lower, &inst.upper, cap)?;
    let (t, r) = (inst.t(), inst.r());

    // per brick: (assignment, D·assignment, objective part), lexicographic
    let mut options: Vec<Vec<(Vec<i64>, Vec<i64>, i64)>> = Vec::with_capacity(inst.n);
    for i in 0..inst.n {
        let range = i * t..(i + 1) * t;
        let mut list = Vec::new();
        let mut err = None;
        for_each_point(&inst.lower[range.clone()], &inst.upper[range.clone()], |x| {
            let s: i64 = x.iter().sum();
            if !rel.local[i].holds(s, inst.b_local[i]) {
                return true;
            }
            let contrib = (0..r).map(|row| (0..t).map(|j| inst.bimatrix.get(row, j) * x[j]).sum()).collect();
            let value = x.iter().enumerate().try_fold(0i64, |acc, (j, &v)| {
                let term = inst.objective.terms[i * t + j].eval(v)?;
                acc.checked_add(term).ok_or(NFoldError::Overflow("addition"))
            });
            match value {
                Ok(v) => list.push((x.to_vec(), contrib, v)),
                Err(e) => {
                    err = Some(e);
                    return false;
                }
            }
            true
        });
        if let Some(e) = err {
            return Err(e);
        }
        options.push(list);
    }

    let mut best: Option<(Vec<usize>, i64)> = None;
    let mut choice = vec![0usize; inst.n];
    let mut lhs = vec![vec![0i64; r]; inst.n + 1];
    let mut value = vec![0i64; inst.n + 1];
    search(rel, &options, 0, &mut choice, &mut lhs, &mut value, &mut best)?;
    Ok(report(best.map(|(c, v)| {
        let x = c.iter().enumerate().flat_map(|(i, &o)| options[i][o].0.iter().copied()).collect();
        (x, v)
    })))
}

type Options = Vec<Vec<(Vec<i64>, Vec<i64>, i64)>>;

fn search(
    rel: &RelationalInstance,
    options: &Options,
    i: usize,
    choice: &mut [usize],
    lhs: &mut [Vec<i64>],
    value: &mut [i64],
    best: &mut Option<(Vec<usize>, i64)>,
) -> Result<()> {
    if i == options.len() {
        let ok = rel.global.iter().zip(&lhs[i]).zip(&rel.base.b0).all(|((g, &v), &b)| g.holds(v, b));
        if ok && best.as_ref().is_none_or(|b| value[i] < b.1) {
            *best = Some((choice.to_vec(), value[i]));
        }
        return Ok(());
    }
    for (o, (_, contrib, v)) in options[i].iter().enumerate() {
        choice[i] = o;
        let next: Vec<i64> = lhs[i]
            .iter()
            .zip(contrib)
            .map(|(a, b)| a.checked_add(*b).ok_or(NFoldError::Overflow("addition")))
            .collect::<Result<_>>()?;
        lhs[i + 1] = next;
        value[i + 1] = value[i].checked_add(*v).ok_or(NFoldError::Overflow("addition"))?;
        search(rel, options, i + 1, choice, lhs, value, best)?;
    }
    Ok(())
}

/// Enumerates the box, keeps the feasible points and returns the
/// lexicographically first minimizer, or `Infeasible`.
pub fn brute_force_solve(inst: &CombNFoldInstance, cap: u128) -> Result<SolveReport> {
    brute_force_relational(&RelationalInstance::equalities(inst.clone()), cap)
}

/// All feasible points in lexicographic order, by plain enumeration.
pub fn feasible_points(inst: &CombNFoldInstance, cap: u128) -> Result<Vec<Vec<i64>>> {
    check_cap(&inst.lower, &inst.upper, cap)?;
    let mut out = Vec::new();
    for_each_point(&inst.lower, &inst.upper, |x| {
        if inst.is_feasible(x) {
            out.push(x.to_vec());
        }
        true
    });
    Ok(out)
}

/// Brute-force optimum of a program with blocks of unequal width.
pub fn brute_force_pre_nfold(p: &PreNFoldInstance, cap: u128) -> Result<SolveReport> {
    p.validate()?;
    let best = minimize_over_box(&p.lower, &p.upper, cap, |x| p.is_feasible(x), |x| p.objective.eval(x))?;
    Ok(report(best))
}

/// The Graver basis of the all-ones row of width `t`: every `e_a − e_b`.
pub fn graver_of_ones(t: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::with_capacity(t * t.saturating_sub(1));
    for a in 0..t {
        for b in 0..t {
            if a != b {
                let mut v = vec![0; t];
                v[a] = 1;
                v[b] = -1;
                out.push(v);
            }
        }
    }
    out.sort();
    out
}

/// `u ⊑ v`: same orthant and `|u_k| <= |v_k|` everywhere.
pub fn conformal_le(u: &[i64], v: &[i64]) -> bool {
    u.iter().zip(v).all(|(&a, &b)| a * b >= 0 && a.abs() <= b.abs())
}

fn in_kernel(matrix: &[Vec<i64>], v: &[i64]) -> bool {
    matrix.iter().all(|row| row.iter().zip(v).map(|(a, b)| a * b).sum::<i64>() == 0)
}

/// The ⊑-minimal non-zero kernel vectors of `matrix` inside `[−radius, radius]^dim`,
/// sorted. This is the Graver basis whenever every Graver element fits
/// the radius.
pub fn graver_brute_force(matrix: &[Vec<i64>], radius: i64) -> Result<Vec<Vec<i64>>> {
    let dim = matrix.first().map_or(0, Vec::len);
    if matrix.iter().any(|row| row.len() != dim) {
        return Err(NFoldError::Dimension("ragged matrix".into()));
    }
    let lower = vec![-radius; dim];
    let upper = vec![radius; dim];
    check_cap(&lower, &upper, DEFAULT_CAP)?;
    let mut kernel = Vec::new();
    for_each_point(&lower, &upper, |v| {
        if v.iter().any(|&c| c != 0) && in_kernel(matrix, v) {
            kernel.push(v.to_vec());
        }
        true
    });
    // any non-minimal vector dominates a minimal one of smaller 1-norm
    kernel.sort_by_key(|v| v.iter().map(|c| c.abs()).sum::<i64>());
    let mut minimal: Vec<Vec<i64>> = Vec::new();
    for v in kernel {
        if !minimal.iter().any(|g| conformal_le(g, &v)) {
            minimal.push(v);
        }
    }
    minimal.sort();
    Ok(minimal)
}

/// Writes `v` as a sign-compatible sum of elements of `basis`, if possible,
/// by repeatedly subtracting a conformal element.
pub fn sign_compatible_decomposition(v: &[i64], basis: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let mut rest = v.to_vec();
    let mut parts = Vec::new();
    while rest.iter().any(|&c| c != 0) {
        let g = basis.iter().find(|g| g.iter().any(|&c| c != 0) && conformal_le(g, &rest))?;
        for (r, c) in rest.iter_mut().zip(g) {
            *r -= c;
        }
        parts.push(g.clone());
    }
    Some(parts)
}

/// The full constraint matrix `E^(n)`: `r` global rows, then `n` local rows.
pub fn nfold_matrix(bm: &Bimatrix, n: usize) -> Vec<Vec<i64>> {
    let t = bm.t();
    let mut rows: Vec<Vec<i64>> = (0..bm.r()).map(|row| bm.row(row).repeat(n)).collect();
    for i in 0..n {
        let mut row = vec![0; n * t];
        row[i * t..(i + 1) * t].fill(1);
        rows.push(row);
    }
    rows
}

/// Shape limits for [`random_instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusParams {
    pub max_n: usize,
    pub max_t: usize,
    pub max_r: usize,
    pub max_abs_d: i64,
    pub max_width: i64,
    pub max_coeff: i64,
}

impl Default for CorpusParams {
    fn default() -> Self {
        Self { max_n: 3, max_t: 3, max_r: 2, max_abs_d: 1, max_width: 3, max_coeff: 3 }
    }
}

/// A random tiny instance with a linear objective. Right-hand sides are
/// usually taken from a random box point, so most instances are feasible.
pub fn random_instance(rng: &mut impl Rng, p: &CorpusParams) -> CombNFoldInstance {
    let n = rng.gen_range(1..=p.max_n);
    let t = rng.gen_range(1..=p.max_t);
    let r = rng.gen_range(1..=p.max_r);
    let d: Vec<Vec<i64>> = (0..r).map(|_| (0..t).map(|_| rng.gen_range(-p.max_abs_d..=p.max_abs_d)).collect()).collect();
    let lower: Vec<i64> = (0..n * t).map(|_| rng.gen_range(-1..=1)).collect();
    let upper: Vec<i64> = lower.iter().map(|&l| l + rng.gen_range(0..=p.max_width)).collect();
    let coeffs: Vec<i64> = (0..n * t).map(|_| rng.gen_range(-p.max_coeff..=p.max_coeff)).collect();
    let witness: Vec<i64> = lower.iter().zip(&upper).map(|(&l, &u)| rng.gen_range(l..=u)).collect();
    let bimatrix = Bimatrix::new(d).expect("generated matrix is rectangular");
    let mut inst = CombNFoldInstance {
        bimatrix,
        n,
        b0: vec![0; r],
        b_local: vec![0; n],
        lower,
        upper,
        objective: SeparableObjective::linear(&coeffs),
    };
    inst.b0 = inst.global_lhs(&witness).expect("tiny values");
    inst.b_local = inst.brick_sums(&witness).expect("tiny values");
    if rng.gen_bool(0.2) {
        let row = rng.gen_range(0..r);
        inst.b0[row] += rng.gen_range(-2..=2);
    }
    if rng.gen_bool(0.1) {
        let brick = rng.gen_range(0..n);
        inst.b_local[brick] += rng.gen_range(-2..=2);
    }
    inst
}

/// `count` instances from a ChaCha stream seeded with `seed`.
pub fn corpus(seed: u64, count: usize, p: &CorpusParams) -> Vec<CombNFoldInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_instance(&mut rng, p)).collect()
}

/// Random relations for a tiny instance, each row independently.
pub fn random_relations(rng: &mut impl Rng, count: usize, allow_strict: bool) -> Vec<Relation> {
    const ALL: [Relation; 5] = [Relation::Lt, Relation::Le, Relation::Eq, Relation::Ge, Relation::Gt];
    const NON_STRICT: [Relation; 3] = [Relation::Le, Relation::Eq, Relation::Ge];
    (0..count)
        .map(|_| {
            if allow_strict {
                ALL[rng.gen_range(0..ALL.len())]
            } else {
                NON_STRICT[rng.gen_range(0..NON_STRICT.len())]
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::{instance_a, minimal};

    #[test]
    fn instance_a_optimum() {
        let rep = brute_force_solve(&instance_a(&[2, 1, 1, 1]), DEFAULT_CAP).unwrap();
        assert_eq!(rep.status, SolveStatus::Optimal);
        assert_eq!(rep.objective_value, Some(2));
        // lexicographically first of the two optima
        assert_eq!(rep.point, Some(vec![0, 1, 0, 1]));
    }

    #[test]
    fn empty_and_singleton_boxes() {
        let inst = CombNFoldInstance {
            bimatrix: Bimatrix::new(vec![vec![1, 0]]).unwrap(),
            n: 1,
            b0: vec![2],
            b_local: vec![1],
            lower: vec![0, 0],
            upper: vec![1, 1],
            objective: SeparableObjective::zero(2),
        };
        assert_eq!(brute_force_solve(&inst, DEFAULT_CAP).unwrap().status, SolveStatus::Infeasible);

        let mut single = minimal();
        single.lower = vec![1, 0];
        single.upper = vec![1, 0];
        single.b0 = vec![1];
        let rep = brute_force_solve(&single, DEFAULT_CAP).unwrap();
        assert_eq!(rep.point, Some(vec![1, 0]));
    }

    #[test]
    fn cap_is_enforced() {
        let mut inst = minimal();
        inst.upper = vec![10_000, 10_000];
        assert_eq!(brute_force_solve(&inst, 1000).unwrap_err(), NFoldError::OracleTooLarge { cap: 1000 });
    }

    #[test]
    fn instance_a_feasible_set() {
        let pts = feasible_points(&instance_a(&[0; 4]), DEFAULT_CAP).unwrap();
        assert_eq!(pts, vec![vec![0, 1, 0, 1], vec![0, 1, 1, 0], vec![1, 0, 0, 1], vec![1, 0, 1, 0]]);
    }

    #[test]
    fn graver_of_ones_structure() {
        assert_eq!(graver_of_ones(2), vec![vec![-1, 1], vec![1, -1]]);
        assert_eq!(graver_of_ones(3).len(), 6);
        assert!(graver_of_ones(4).iter().all(|g| g.iter().map(|c| c.abs()).sum::<i64>() == 2));
    }

    #[test]
    fn graver_brute_force_examples() {
        assert_eq!(graver_brute_force(&[vec![1, 1, 1]], 1).unwrap(), graver_of_ones(3));
        assert_eq!(graver_brute_force(&[vec![1, -1]], 2).unwrap(), vec![vec![-1, -1], vec![1, 1]]);
        // (2, -1)·x = 0 has kernel multiples of (1, 2)
        assert_eq!(graver_brute_force(&[vec![2, -1]], 3).unwrap(), vec![vec![-1, -2], vec![1, 2]]);
    }

    #[test]
    fn decomposition_of_kernel_vectors() {
        let e = nfold_matrix(&Bimatrix::new(vec![vec![1, 0]]).unwrap(), 2);
        assert_eq!(e.len(), 3);
        let basis = graver_brute_force(&e, 2).unwrap();
        let v = vec![2, -2, -2, 2];
        let parts = sign_compatible_decomposition(&v, &basis).unwrap();
        let total: Vec<i64> = (0..4).map(|k| parts.iter().map(|p| p[k]).sum()).collect();
        assert_eq!(total, v);
        assert!(parts.iter().all(|p| conformal_le(p, &v)));
    }

    #[test]
    fn corpus_is_reproducible() {
        let p = CorpusParams::default();
        assert_eq!(corpus(7, 20, &p), corpus(7, 20, &p));
        assert!(corpus(7, 50, &p).iter().all(|i| i.validate().is_valid()));
    }

    #[test]
    fn relational_oracle_checks_inequalities() {
        let base = instance_a(&[-1, -1, -1, -1]);
        let rel = RelationalInstance::new(base, vec![Relation::Le], vec![Relation::Le, Relation::Le]).unwrap();
        let rep = brute_force_relational(&rel, DEFAULT_CAP).unwrap();
        assert_eq!(rep.objective_value, Some(-2));
    }

    #[test]
    fn pre_nfold_oracle() {
        let p = PreNFoldInstance {
            widths: vec![1, 2],
            blocks: vec![vec![vec![1]], vec![vec![1, 1]]],
            b0: vec![2],
            b_local: vec![1, 1],
            lower: vec![0; 3],
            upper: vec![2; 3],
            objective: SeparableObjective::linear(&[0, 3, 1]),
            global: vec![Relation::Eq],
            local: vec![Relation::Eq, Relation::Eq],
        };
        let rep = brute_force_pre_nfold(&p, DEFAULT_CAP).unwrap();
        assert_eq!(rep.point, Some(vec![1, 0, 1]));
        assert_eq!(rep.objective_value, Some(1));
    }
}
