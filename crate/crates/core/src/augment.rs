//! The augmentation graph: a layered DAG whose lightest source–sink path is
//! the best step of a fixed length from a feasible point.
//!
//! Layers follow the flat variable order, one layer per variable. A vertex in
//! the layer of variable `(i, j)` carries the proposed step coordinate `h`,
//! the brick prefix sum `β = h_1 + … + h_j`, and the signature `σ`, the
//! D-weighted prefix sum of the whole step so far. Leaving the last layer of
//! a brick requires `β = 0`; reaching the sink requires `σ = 0`. Every
//! source–sink path therefore spells out a kernel vector of `E^(n)`, and the
//! vertex weights `f_k(x_k + αh) − f_k(x_k)` add up to `f(x + αh) − f(x)`.
//!
//! Only vertices that are reachable from the source *and* can still reach the
//! sink are materialized. Outgoing edges depend on `(β, σ)` alone, so vertices
//! that agree on `(β, σ)` are merged and keep the lightest incoming path.

use rustc_hash::FxHashMap;

use crate::error::{add, mul, sub, NFoldError, Result};
use crate::instance::CombNFoldInstance;

/// Box radii for the vertex coordinates of the augmentation graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DpLimits {
    /// `|h_k| <= h`
    pub h: i64,
    /// `|β| <= beta`
    pub beta: i64,
    /// `|σ_ρ| <= sigma` for every row ρ
    pub sigma: i64,
}

impl DpLimits {
    /// Radii for a Graver-norm bound `g`: `h, β ∈ [−g, g]`, `σ ∈ [−2Δg, 2Δg]^r`.
    pub fn from_radius(g: i64, delta: i64) -> Self {
        Self { h: g, beta: g, sigma: g.saturating_mul(delta).saturating_mul(2) }
    }

    /// Shrinks the radii to what any step inside the box of `inst` can use.
    ///
    /// For `α >= 1` every coordinate of a feasible step is bounded by the
    /// variable's box width, every brick prefix by the brick's total width,
    /// and every signature entry by `Σ_k |D_ρ,k| · width_k`. Clipping never
    /// removes a step that the unclipped graph contains.
    pub fn clip_to_box(self, inst: &CombNFoldInstance) -> Self {
        let t = inst.t();
        let widths: Vec<i64> = inst
            .lower
            .iter()
            .zip(&inst.upper)
            .map(|(&l, &u)| u.saturating_sub(l).max(0))
            .collect();
        let h_box = widths.iter().copied().max().unwrap_or(0);
        let beta_box = widths
            .chunks(t)
            .map(|c| c.iter().fold(0i64, |a, &w| a.saturating_add(w)))
            .max()
            .unwrap_or(0);
        let sigma_box = (0..inst.r())
            .map(|row| {
                widths.iter().enumerate().fold(0i64, |a, (k, &w)| {
                    a.saturating_add(inst.bimatrix.get(row, k % t).saturating_abs().saturating_mul(w))
                })
            })
            .max()
            .unwrap_or(0);
        Self {
            h: self.h.min(h_box),
            beta: self.beta.min(beta_box),
            sigma: self.sigma.min(sigma_box),
        }
    }

    /// Upper bound on the number of vertices per layer for these radii.
    pub fn layer_size(&self, r: usize) -> Result<i64> {
        let span = |v: i64| v.checked_mul(2).and_then(|v| v.checked_add(1));
        let too_large = NFoldError::BoundTooLarge("bound too large");
        let mut acc = span(self.h)
            .and_then(|a| span(self.beta).and_then(|b| a.checked_mul(b)))
            .ok_or_else(|| too_large.clone())?;
        let s = span(self.sigma).ok_or_else(|| too_large.clone())?;
        for _ in 0..r {
            acc = acc.checked_mul(s).ok_or_else(|| too_large.clone())?;
        }
        Ok(acc)
    }
}

/// A step direction and its weight `f(x + αh) − f(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpStep {
    pub h: Vec<i64>,
    pub weight: i64,
}

/// `(2G+1)² · (1+4ΔG)^r`, an upper bound on the vertices per layer of the
/// augmentation graph with radius `G`.
pub fn dp_layer_size_bound(r: usize, delta: i64, g: i64) -> Result<i64> {
    let too_large = || NFoldError::BoundTooLarge("bound too large");
    let side = g.checked_mul(2).and_then(|v| v.checked_add(1)).ok_or_else(too_large)?;
    let sig = delta
        .checked_mul(g)
        .and_then(|v| v.checked_mul(4))
        .and_then(|v| v.checked_add(1))
        .ok_or_else(too_large)?;
    let mut acc = side.checked_mul(side).ok_or_else(too_large)?;
    for _ in 0..r {
        acc = acc.checked_mul(sig).ok_or_else(too_large)?;
    }
    Ok(acc)
}

/// Lightest path in the augmentation graph with radius `g` for `h` and `β`
/// and `2Δg` for the signature.
pub fn find_best_step(
    inst: &CombNFoldInstance,
    x: &[i64],
    alpha: i64,
    g: i64,
) -> Result<Option<DpStep>> {
    let limits = DpLimits::from_radius(g, inst.bimatrix.delta()?);
    find_best_step_with(inst, x, alpha, &limits)
}

struct Node {
    key: Box<[i64]>,
    dist: i64,
}

fn div_floor(a: i64, b: i64) -> i64 {
    num_integer::Integer::div_floor(&a, &b)
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -div_floor(-a, b)
}

/// Lightest path in the augmentation graph with explicit radii.
///
/// Returns `None` only if the graph has no source–sink path, which cannot
/// happen for a feasible `x` since `h = 0` is always a path. Equal-weight
/// paths are broken in favour of the first-reached predecessor.
pub fn find_best_step_with(
    inst: &CombNFoldInstance,
    x: &[i64],
    alpha: i64,
    limits: &DpLimits,
) -> Result<Option<DpStep>> {
    if alpha < 1 {
        return Err(NFoldError::Invalid(vec![format!("step length must be positive, got {alpha}")]));
    }
    let dim = inst.dim();
    if x.len() != dim {
        return Err(NFoldError::Dimension(format!("point has {} coordinates, instance has {dim}", x.len())));
    }
    let (t, r) = (inst.t(), inst.r());
    let d = &inst.bimatrix;

    // per-variable step ranges and vertex weights
    let mut lo = Vec::with_capacity(dim);
    let mut hi = Vec::with_capacity(dim);
    let mut weights: Vec<Vec<i64>> = Vec::with_capacity(dim);
    for k in 0..dim {
        let l = div_ceil(sub(inst.lower[k], x[k])?, alpha).max(-limits.h);
        let u = div_floor(sub(inst.upper[k], x[k])?, alpha).min(limits.h);
        if l > u {
            return Ok(None);
        }
        let term = &inst.objective.terms[k];
        let base = term.eval(x[k])?;
        let w = (l..=u)
            .map(|h| sub(term.eval(add(x[k], mul(alpha, h)?)?)?, base))
            .collect::<Result<Vec<_>>>()?;
        lo.push(l);
        hi.push(u);
        weights.push(w);
    }

    // what the variables after k can still contribute to β (within the
    // brick) and to σ (over all later variables)
    let mut beta_rest = vec![(0i64, 0i64); dim];
    let mut sigma_rest = vec![vec![(0i64, 0i64); r]; dim];
    for k in (0..dim.saturating_sub(1)).rev() {
        let next = k + 1;
        if next % t != 0 {
            let (a, b) = beta_rest[next];
            beta_rest[k] = (a.saturating_add(lo[next]), b.saturating_add(hi[next]));
        }
        for row in 0..r {
            let c = d.get(row, next % t);
            let (p, q) = (c.saturating_mul(lo[next]), c.saturating_mul(hi[next]));
            let (a, b) = sigma_rest[next][row];
            sigma_rest[k][row] = (a.saturating_add(p.min(q)), b.saturating_add(p.max(q)));
        }
    }

    // back[k][v] = (h, predecessor index in layer k-1)
    let mut back: Vec<Vec<(i64, u32)>> = Vec::with_capacity(dim);
    let mut frontier = vec![Node { key: vec![0i64; r + 1].into_boxed_slice(), dist: 0 }];
    let mut buf = vec![0i64; r + 1];
    for k in 0..dim {
        if lo[k] == 0 && hi[k] == 0 {
            // h_k = 0 is forced: β, σ and the pruning ranges are unchanged
            // (at a brick start, pruning already forced β = 0)
            back.push(Vec::new());
            continue;
        }
        let j = k % t;
        let column = d.column(j);
        let mut index: FxHashMap<Box<[i64]>, u32> = FxHashMap::default();
        let mut next: Vec<Node> = Vec::new();
        let mut links: Vec<(i64, u32)> = Vec::new();
        for (pi, node) in frontier.iter().enumerate() {
            // brick boundary: the previous brick closed with β = 0 (pruning
            // guarantees it), and the new brick starts its prefix afresh
            let beta_prev = if j == 0 { 0 } else { node.key[0] };
            'step: for (wi, h) in (lo[k]..=hi[k]).enumerate() {
                let beta = add(beta_prev, h)?;
                let (bl, bh) = beta_rest[k];
                if beta.abs() > limits.beta || beta.saturating_add(bl) > 0 || beta.saturating_add(bh) < 0 {
                    continue;
                }
                buf[0] = beta;
                for row in 0..r {
                    let s = add(node.key[row + 1], mul(column[row], h)?)?;
                    let (sl, sh) = sigma_rest[k][row];
                    if s.abs() > limits.sigma || s.saturating_add(sl) > 0 || s.saturating_add(sh) < 0 {
                        continue 'step;
                    }
                    buf[row + 1] = s;
                }
                let dist = add(node.dist, weights[k][wi])?;
                match index.get(buf.as_slice()) {
                    Some(&vi) => {
                        let v = &mut next[vi as usize];
                        if dist < v.dist {
                            v.dist = dist;
                            links[vi as usize] = (h, pi as u32);
                        }
                    }
                    None => {
                        let key: Box<[i64]> = buf.clone().into_boxed_slice();
                        index.insert(key.clone(), next.len() as u32);
                        next.push(Node { key, dist });
                        links.push((h, pi as u32));
                    }
                }
            }
        }
        if next.is_empty() {
            return Ok(None);
        }
        back.push(links);
        frontier = next;
    }

    // suffix pruning leaves only the sink-compatible vertex (β = 0, σ = 0)
    debug_assert!(frontier.len() == 1 && frontier[0].key.iter().all(|&v| v == 0));
    let weight = frontier[0].dist;
    let mut h = vec![0i64; dim];
    let mut v = 0u32;
    for k in (0..dim).rev() {
        if back[k].is_empty() {
            continue;
        }
        let (hk, pred) = back[k][v as usize];
        h[k] = hk;
        v = pred;
    }

    #[cfg(debug_assertions)]
    check_step(inst, x, alpha, &h, weight)?;

    Ok(Some(DpStep { h, weight }))
}

/// Verifies `E^(n) h = 0`, `l <= x + αh <= u` and the path weight.
#[cfg(debug_assertions)]
fn check_step(inst: &CombNFoldInstance, x: &[i64], alpha: i64, h: &[i64], weight: i64) -> Result<()> {
    let moved: Vec<i64> = x
        .iter()
        .zip(h)
        .map(|(&xi, &hi)| add(xi, mul(alpha, hi)?))
        .collect::<Result<_>>()?;
    assert!(inst.brick_sums(h)?.iter().all(|&s| s == 0), "step leaves a brick sum");
    assert!(inst.global_lhs(h)?.iter().all(|&s| s == 0), "step leaves the kernel of D");
    assert!(
        moved.iter().zip(inst.lower.iter().zip(&inst.upper)).all(|(v, (l, u))| l <= v && v <= u),
        "step leaves the box"
    );
    assert_eq!(weight, sub(inst.evaluate(&moved)?, inst.evaluate(x)?)?, "path weight mismatch");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::instance_a;

    #[test]
    fn layer_bound_examples() {
        assert_eq!(dp_layer_size_bound(1, 1, 1).unwrap(), 45);
        assert_eq!(dp_layer_size_bound(1, 1, 2).unwrap(), 225);
        // 33 * 33 * 129 computed separately
        assert_eq!(dp_layer_size_bound(1, 2, 16).unwrap(), 140_481);
        assert!(dp_layer_size_bound(3, 1_000_000, 1 << 20).is_err());
    }

    #[test]
    fn pinned_box_gives_zero_step() {
        let mut inst = instance_a(&[2, 1, 1, 1]);
        let x = vec![1, 0, 0, 1];
        inst.lower = x.clone();
        inst.upper = x.clone();
        let step = find_best_step(&inst, &x, 1, 16).unwrap().unwrap();
        assert_eq!(step, DpStep { h: vec![0; 4], weight: 0 });
    }

    #[test]
    fn optimal_point_has_no_negative_step() {
        let inst = instance_a(&[0, 1, 1, 0]);
        let step = find_best_step(&inst, &[1, 0, 0, 1], 1, 16).unwrap().unwrap();
        assert_eq!(step.weight, 0);
    }

    #[test]
    fn improving_step_is_found() {
        // x = ((0,1),(0,1)), f(x) = 1. The kernel steps inside the box are
        // ±((1,-1),(0,0)), ±((0,0),(1,-1)) and their sums; only
        // ((1,-1),(0,0)) reaches f = 0.
        let inst = instance_a(&[0, 1, 1, 0]);
        let step = find_best_step(&inst, &[0, 1, 0, 1], 1, 16).unwrap().unwrap();
        assert_eq!(step.weight, -1);
        assert_eq!(step.h, vec![1, -1, 0, 0]);
    }

    #[test]
    fn rejects_nonpositive_alpha() {
        let inst = instance_a(&[0, 0, 0, 0]);
        assert!(find_best_step(&inst, &[1, 0, 0, 1], 0, 4).is_err());
    }

    #[test]
    fn clip_to_box_respects_widths() {
        let inst = instance_a(&[0, 0, 0, 0]);
        let lim = DpLimits::from_radius(100, 2).clip_to_box(&inst);
        assert_eq!(lim, DpLimits { h: 1, beta: 2, sigma: 4 });
    }
}
