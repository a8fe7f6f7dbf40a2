//! Greedy point families: separated nets, biorthogonal families and norming
//! families on the sphere.
//!
//! All three scan a caller-supplied candidate stream and accept a candidate
//! when it is compatible with everything accepted so far, so maximality
//! holds relative to that stream.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::space::{Functional, NormedSpace, SpaceError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetError {
    #[error("empty candidate stream")]
    EmptyCandidates,
    #[error("separation must be positive, got {0}")]
    BadSeparation(f64),
    #[error("threshold {0} outside (0, 1)")]
    BadThreshold(f64),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Relative slack on separation comparisons, so that lattice candidates
/// whose spacing is not representable in binary are not rejected by
/// rounding.
pub const SEPARATION_SLACK: f64 = 1e-12;

/// Absolute slack on pairing thresholds, for the same reason.
pub const PAIRING_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Region {
    Ball { radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl Region {
    pub fn contains(&self, space: &NormedSpace, x: &[f64]) -> bool {
        match self {
            Region::Ball { radius } => space.norm(x) <= *radius,
            Region::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (a, b))| *a <= *v && *v <= *b),
        }
    }

    /// Smallest axis box containing the region, for a space whose norm
    /// dominates the sup norm.
    pub fn bounding_box(&self, dim: usize) -> (Vec<f64>, Vec<f64>) {
        match self {
            Region::Ball { radius } => (vec![-radius; dim], vec![*radius; dim]),
            Region::Box { lo, hi } => (lo.clone(), hi.clone()),
        }
    }
}

/// Uniform hash grid over ℝⁿ with cubic cells. Every norm used here
/// dominates the sup norm, so a point at norm distance `< cell` from `x`
/// lies in one of the `3ⁿ` cells around `x`.
#[derive(Debug, Clone, Default)]
pub struct GridIndex {
    cell: f64,
    dim: usize,
    map: HashMap<Vec<i64>, Vec<usize>>,
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl GridIndex {
    pub fn new(dim: usize, cell: f64) -> Self {
        GridIndex { cell, dim, map: HashMap::new(), lo: vec![i64::MAX; dim], hi: vec![i64::MIN; dim] }
    }

    pub fn key(&self, x: &[f64]) -> Vec<i64> {
        x.iter().map(|v| (v / self.cell).floor() as i64).collect()
    }

    pub fn insert(&mut self, id: usize, x: &[f64]) {
        let k = self.key(x);
        for i in 0..self.dim {
            self.lo[i] = self.lo[i].min(k[i]);
            self.hi[i] = self.hi[i].max(k[i]);
        }
        self.map.entry(k).or_default().push(id);
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Ids in cells whose offset from `x`'s cell has sup norm exactly `ring`.
    pub fn visit_ring(&self, x: &[f64], ring: i64, mut f: impl FnMut(usize)) {
        let base = self.key(x);
        let mut off = vec![-ring; self.dim];
        let mut key = vec![0i64; self.dim];
        loop {
            if off.iter().any(|o| o.abs() == ring) || ring == 0 {
                for i in 0..self.dim {
                    key[i] = base[i] + off[i];
                }
                if let Some(ids) = self.map.get(&key) {
                    ids.iter().for_each(|&i| f(i));
                }
            }
            let mut d = 0;
            loop {
                if d == self.dim {
                    return;
                }
                off[d] += 1;
                if off[d] <= ring {
                    break;
                }
                off[d] = -ring;
                d += 1;
            }
        }
    }

    /// Ids in the cells within `rings` of `x`'s cell.
    pub fn visit_near(&self, x: &[f64], rings: i64, mut f: impl FnMut(usize)) {
        for r in 0..=rings {
            self.visit_ring(x, r, &mut f);
        }
    }

    /// Largest ring that can still contain points.
    fn max_ring(&self, x: &[f64]) -> i64 {
        let k = self.key(x);
        (0..self.dim)
            .map(|i| (self.hi[i] - k[i]).abs().max((k[i] - self.lo[i]).abs()))
            .max()
            .unwrap_or(0)
    }

    /// All ids whose point lies within `best + slack` of the nearest one,
    /// as `(id, distance)`, nearest first.
    pub fn near_ties(
        &self,
        x: &[f64],
        slack: f64,
        dist: impl Fn(usize) -> f64,
    ) -> Vec<(usize, f64)> {
        if self.is_empty() {
            return Vec::new();
        }
        let limit = self.max_ring(x);
        let mut found: Vec<(usize, f64)> = Vec::new();
        let mut best = f64::INFINITY;
        let mut ring = 0;
        loop {
            self.visit_ring(x, ring, |i| {
                let d = dist(i);
                best = best.min(d);
                found.push((i, d));
            });
            if best + slack < ring as f64 * self.cell || ring >= limit {
                break;
            }
            ring += 1;
        }
        found.retain(|&(_, d)| d <= best + slack);
        found.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        found
    }
}

/// Maximal separated family relative to its candidate stream.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeparatedNet {
    pub centers: Vec<Vec<f64>>,
    pub separation: f64,
    pub region: Region,
    pub seed: u64,
    #[serde(skip)]
    index: GridIndex,
}

impl SeparatedNet {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn index(&self) -> &GridIndex {
        &self.index
    }

    /// Rebuild the spatial index, e.g. after deserialising.
    pub fn reindex(&mut self) {
        let dim = self.centers.first().map_or(0, |c| c.len());
        let mut index = GridIndex::new(dim, self.separation);
        for (i, c) in self.centers.iter().enumerate() {
            index.insert(i, c);
        }
        self.index = index;
    }

    /// Smallest pairwise distance, by brute force.
    pub fn min_pairwise_distance(&self, space: &NormedSpace) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..self.centers.len() {
            for j in 0..i {
                m = m.min(space.distance(&self.centers[i], &self.centers[j]));
            }
        }
        m
    }

    /// Candidates in the region that are separated from every centre; empty
    /// exactly when the net is maximal relative to `candidates`.
    pub fn unblocked<'a>(
        &self,
        space: &NormedSpace,
        candidates: impl IntoIterator<Item = &'a Vec<f64>>,
    ) -> Vec<Vec<f64>> {
        candidates
            .into_iter()
            .filter(|c| self.region.contains(space, c))
            .filter(|c| {
                let mut blocked = false;
                self.index.visit_near(c, 1, |i| {
                    if space.distance(c, &self.centers[i]) < self.separation * (1.0 - SEPARATION_SLACK) {
                        blocked = true;
                    }
                });
                !blocked
            })
            .cloned()
            .collect()
    }
}

/// Scan `candidates` in order and keep each one that lies in `region` and
/// is at least `separation` from every centre kept so far.
pub fn greedy_separated_net(
    space: &NormedSpace,
    region: Region,
    separation: f64,
    candidates: impl IntoIterator<Item = Vec<f64>>,
    seed: u64,
) -> Result<SeparatedNet, NetError> {
    if !(separation > 0.0) {
        return Err(NetError::BadSeparation(separation));
    }
    let mut index = GridIndex::new(space.dim(), separation);
    let mut centers: Vec<Vec<f64>> = Vec::new();
    let mut seen = false;
    let threshold = separation * (1.0 - SEPARATION_SLACK);
    for c in candidates {
        seen = true;
        if c.len() != space.dim() {
            return Err(SpaceError::DimensionMismatch { expected: space.dim(), got: c.len() }.into());
        }
        if !region.contains(space, &c) {
            continue;
        }
        let mut ok = true;
        index.visit_near(&c, 1, |i| {
            if ok && space.distance(&c, &centers[i]) < threshold {
                ok = false;
            }
        });
        if ok {
            index.insert(centers.len(), &c);
            centers.push(c);
        }
    }
    if !seen {
        return Err(NetError::EmptyCandidates);
    }
    Ok(SeparatedNet { centers, separation, region, seed, index })
}

/// Points of `step·ℤⁿ` inside the box, the origin first and the rest in
/// lexicographic order.
pub fn grid_candidates(lo: &[f64], hi: &[f64], step: f64) -> Vec<Vec<f64>> {
    let n = lo.len();
    let lo_i: Vec<i64> = lo.iter().map(|v| (v / step).ceil() as i64).collect();
    let hi_i: Vec<i64> = hi.iter().map(|v| (v / step).floor() as i64).collect();
    if lo_i.iter().zip(&hi_i).any(|(a, b)| a > b) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = lo_i.clone();
    loop {
        out.push(cur.iter().map(|&k| k as f64 * step).collect::<Vec<f64>>());
        let mut d = 0;
        loop {
            if d == n {
                let origin = out.iter().position(|p| p.iter().all(|v| *v == 0.0));
                if let Some(i) = origin {
                    let o = out.remove(i);
                    out.insert(0, o);
                }
                return out;
            }
            cur[d] += 1;
            if cur[d] <= hi_i[d] {
                break;
            }
            cur[d] = lo_i[d];
            d += 1;
        }
    }
}

/// The lattice `step·ℤⁿ` followed by its half-shift, both clipped to the
/// ball of the given radius and sorted by norm (ties lexicographic).
pub fn lattice_candidates(space: &NormedSpace, radius: f64, step: f64) -> Vec<Vec<f64>> {
    let n = space.dim();
    let sort = |mut v: Vec<Vec<f64>>| {
        v.retain(|p| space.norm(p) <= radius);
        v.sort_by(|a, b| {
            space.norm(a).total_cmp(&space.norm(b)).then_with(|| {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        });
        v
    };
    let lo = vec![-radius; n];
    let hi = vec![radius; n];
    let mut out = sort(grid_candidates(&lo, &hi, step));
    let shifted: Vec<Vec<f64>> = grid_candidates(&lo, &hi, step)
        .into_iter()
        .map(|p| p.iter().map(|v| v + 0.5 * step).collect())
        .collect();
    out.extend(sort(shifted));
    out
}

/// Unit vectors `v_j` with norming functionals `v*_j` such that
/// `|v*_j(v_k)| ≤ δ` whenever `j < k`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BiorthogonalFamily {
    pub vectors: Vec<Vec<f64>>,
    pub functionals: Vec<Functional>,
    pub delta: f64,
}

impl BiorthogonalFamily {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `sup_j |v*_j(v)|`.
    pub fn sup_pairing(&self, v: &[f64]) -> f64 {
        self.functionals.iter().fold(0.0, |m, f| m.max(f.apply(v).abs()))
    }

    /// See [`NormingFamily::saturate`]; returns the number of vectors added.
    pub fn saturate(&mut self, space: &NormedSpace, probes: &[Vec<f64>], cap: usize) -> Result<usize, NetError> {
        saturate_pairs(space, self.delta, &mut self.vectors, &mut self.functionals, probes, cap)
    }

    /// Probes where `sup_j |v*_j(v)| < (δ − tol)‖v‖`.
    pub fn norming_failures(&self, space: &NormedSpace, probes: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
        probes
            .iter()
            .filter(|v| self.sup_pairing(v) < (self.delta - tol) * space.norm(v))
            .cloned()
            .collect()
    }
}

pub fn greedy_biorthogonal(
    space: &NormedSpace,
    delta: f64,
    candidates: impl IntoIterator<Item = Vec<f64>>,
) -> Result<BiorthogonalFamily, NetError> {
    greedy_biorthogonal_capped(space, delta, candidates, usize::MAX)
}

/// As [`greedy_biorthogonal`], stopping once `cap` vectors are accepted.
pub fn greedy_biorthogonal_capped(
    space: &NormedSpace,
    delta: f64,
    candidates: impl IntoIterator<Item = Vec<f64>>,
    cap: usize,
) -> Result<BiorthogonalFamily, NetError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(NetError::BadThreshold(delta));
    }
    let (vectors, functionals) = greedy_pairs(space, delta, candidates, cap)?;
    Ok(BiorthogonalFamily { vectors, functionals, delta })
}

fn greedy_pairs(
    space: &NormedSpace,
    threshold: f64,
    candidates: impl IntoIterator<Item = Vec<f64>>,
    cap: usize,
) -> Result<(Vec<Vec<f64>>, Vec<Functional>), NetError> {
    let mut vectors = Vec::new();
    let mut functionals: Vec<Functional> = Vec::new();
    for c in candidates {
        if vectors.len() >= cap {
            break;
        }
        let v = match space.normalize(&c) {
            Ok(v) => v,
            Err(SpaceError::ZeroVector) => continue,
            Err(e) => return Err(e.into()),
        };
        if functionals.iter().all(|f| f.apply(&v).abs() <= threshold + PAIRING_SLACK) {
            functionals.push(space.duality_map(&v)?);
            vectors.push(v);
        }
    }
    Ok((vectors, functionals))
}

/// Local minimum of `sup_j |f_j(v)|` over the unit sphere near `start`, by
/// pattern search along coordinate and pairwise-diagonal directions.
/// Stops early once the value drops below `target`.
fn minimize_sup_pairing(space: &NormedSpace, functionals: &[Functional], start: &[f64], target: f64) -> (Vec<f64>, f64) {
    let g = |v: &[f64]| functionals.iter().fold(0.0f64, |m, f| m.max(f.apply(v).abs()));
    let n = start.len();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        dirs.push(e);
        for j in 0..i {
            for s in [1.0, -1.0] {
                let mut d = vec![0.0; n];
                d[i] = std::f64::consts::FRAC_1_SQRT_2;
                d[j] = s * std::f64::consts::FRAC_1_SQRT_2;
                dirs.push(d);
            }
        }
    }
    let mut v = start.to_vec();
    let mut best = g(&v);
    let mut step = 0.1;
    let mut evals = 0usize;
    while step > 1e-9 && evals < 4_000 && best >= target {
        let mut improved = false;
        for d in &dirs {
            for s in [step, -step] {
                let trial: Vec<f64> = v.iter().zip(d).map(|(a, b)| a + s * b).collect();
                evals += 1;
                if let Ok(u) = space.normalize(&trial) {
                    let val = g(&u);
                    if val < best {
                        best = val;
                        v = u;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (v, best)
}

/// Extend a greedy family towards true maximality: every probe whose sup
/// pairing is within `margin` of the threshold seeds a local search, and a
/// found direction with sup pairing below the threshold is appended.
/// Appending at the end keeps the triangular pairing condition intact.
fn saturate_pairs(
    space: &NormedSpace,
    threshold: f64,
    vectors: &mut Vec<Vec<f64>>,
    functionals: &mut Vec<Functional>,
    probes: &[Vec<f64>],
    cap: usize,
) -> Result<usize, NetError> {
    let margin = 0.1f64.min((1.0 - threshold) / 2.0);
    let mut added = 0;
    for p in probes {
        if vectors.len() >= cap {
            break;
        }
        let start = match space.normalize(p) {
            Ok(v) => v,
            Err(SpaceError::ZeroVector) => continue,
            Err(e) => return Err(e.into()),
        };
        let g0 = functionals.iter().fold(0.0f64, |m, f| m.max(f.apply(&start).abs()));
        if g0 >= threshold + margin {
            continue;
        }
        let (v, g) = if g0 < threshold {
            (start, g0)
        } else {
            // Functionals far below the threshold at the start cannot bind
            // within the search radius; the full family is re-checked below.
            let near: Vec<Functional> =
                functionals.iter().filter(|f| f.apply(&start).abs() > threshold - 0.5).cloned().collect();
            let (v, _) = minimize_sup_pairing(space, &near, &start, threshold - PAIRING_SLACK);
            let g = functionals.iter().fold(0.0f64, |m, f| m.max(f.apply(&v).abs()));
            (v, g)
        };
        if g < threshold - PAIRING_SLACK {
            functionals.push(space.duality_map(&v)?);
            vectors.push(v);
            added += 1;
        }
    }
    Ok(added)
}

/// Pairs `(x_j, f_j)` of unit vectors and norming functionals with
/// `|f_j(x_i)| ≤ r` for `j < i`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormingFamily {
    pub points: Vec<Vec<f64>>,
    pub functionals: Vec<Functional>,
    pub r: f64,
}

/// Outcome of probing the norming inequality `sup_j |f_j(x)| ≥ r‖x‖`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormingCheck {
    pub probes: usize,
    pub failures: Vec<Vec<f64>>,
    /// Smallest `sup_j |f_j(x)| / ‖x‖` seen.
    pub min_ratio: f64,
}

impl NormingFamily {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn sup_pairing(&self, x: &[f64]) -> f64 {
        self.functionals.iter().fold(0.0, |m, f| m.max(f.apply(x).abs()))
    }

    /// Close gaps left by a finite candidate stream. Each probe whose sup
    /// pairing is near `r` seeds a local minimisation of `sup_j |f_j|` on
    /// the sphere; a minimiser below `r` is appended. Returns the number of
    /// points added.
    pub fn saturate(&mut self, space: &NormedSpace, probes: &[Vec<f64>], cap: usize) -> Result<usize, NetError> {
        saturate_pairs(space, self.r, &mut self.points, &mut self.functionals, probes, cap)
    }

    /// As [`saturate`](Self::saturate), but only closes gaps where
    /// `sup_j |f_j| < level` for some `level ≤ r`. Any point added has
    /// pairing below `level`, so the family condition still holds at `r`.
    pub fn saturate_below(
        &mut self,
        space: &NormedSpace,
        level: f64,
        probes: &[Vec<f64>],
        cap: usize,
    ) -> Result<usize, NetError> {
        if !(level > 0.0 && level <= self.r) {
            return Err(NetError::BadThreshold(level));
        }
        saturate_pairs(space, level, &mut self.points, &mut self.functionals, probes, cap)
    }

    pub fn check_norming(&self, space: &NormedSpace, probes: &[Vec<f64>], tol: f64) -> NormingCheck {
        let mut failures = Vec::new();
        let mut min_ratio = f64::INFINITY;
        for x in probes {
            let n = space.norm(x);
            if n == 0.0 {
                continue;
            }
            let s = self.sup_pairing(x);
            min_ratio = min_ratio.min(s / n);
            if s < (self.r - tol) * n {
                failures.push(x.clone());
            }
        }
        NormingCheck { probes: probes.len(), failures, min_ratio }
    }
}

pub fn greedy_norming_family(
    space: &NormedSpace,
    r: f64,
    candidates: impl IntoIterator<Item = Vec<f64>>,
) -> Result<NormingFamily, NetError> {
    if !(r > 0.0 && r < 1.0) {
        return Err(NetError::BadThreshold(r));
    }
    let (points, functionals) = greedy_pairs(space, r, candidates, usize::MAX)?;
    Ok(NormingFamily { points, functionals, r })
}
