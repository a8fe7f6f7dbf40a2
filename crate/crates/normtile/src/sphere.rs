//! Convex tiling of the unit sphere of a uniformly convex space.
//!
//! With `δ = δ(ε/2)` and `1 − 2δ < r′ < r < 1`, a norming family
//! `(x_j, f_j)` with `|f_j(x_i)| ≤ r` for `j < i` defines the tiles
//!
//! `S ∩ H_j^p`, `H_j^p = f_j⁻¹(U_p) ∩ ⋂_{i<j} f_i⁻¹([−r′, r′])`,
//!
//! with `U_1 = (−∞, −r′]` and `U_2 = [r′, ∞)`. Uniform convexity puts each
//! tile inside `B(±x_j, ε/2)`. The centre `h_j^2 = R x_j + v_j` (and
//! `h_j^1 = −h_j^2`), `R = 2r′/(1+r)`, uses a vector `v_j` of the kernel
//! intersection `⋂_{i≤j} Ker f_i`, which gives every inequality a slack of
//! `ρ = r′(1−r)/(1+r)`.
//!
//! In dimension `n` that intersection is trivial once `j ≥ n`. Those tiles
//! get the point of largest slack found by a local search, and the slack
//! actually achieved is recorded per tile.

use serde::Serialize;
use thiserror::Error;

use crate::nets::{greedy_norming_family, NetError, NormingFamily};
use crate::sampling::quasirandom_sphere;
use crate::space::{dot, Functional, NormedSpace, SpaceError};
use crate::svg::Canvas;
use crate::tiling::{Chart, Domain, Membership, Tiling};
use crate::verify::CheckOutcome;

pub const TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SphereError {
    #[error("epsilon {0} outside (0, 1)")]
    Epsilon(f64),
    #[error("need 1 − 2δ < r′ < r < 1, got δ = {delta}, r′ = {r_prime}, r = {r}")]
    Thresholds { delta: f64, r_prime: f64, r: f64 },
    #[error("point has norm {0}, not on the unit sphere")]
    OffSphere(f64),
    #[error("invalid tile ({j}, {p})")]
    InvalidTile { j: usize, p: u8 },
    #[error("no family functional reaches r′ at this point (largest |f_j(x)| = {0}); the family is too sparse")]
    Unclassified(f64),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// `(j, p)`: family index `j ≥ 1`, side `p ∈ {1, 2}` (`p = 2` is the
/// side of `x_j`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SphereTileId {
    pub j: u32,
    pub p: u8,
}

impl SphereTileId {
    fn sign(self) -> f64 {
        if self.p == 2 {
            1.0
        } else {
            -1.0
        }
    }
}

/// The scalar parameters of the construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereParams {
    pub eps: f64,
    pub delta: f64,
    pub r_prime: f64,
    pub r: f64,
    pub big_r: f64,
    pub rho: f64,
}

impl SphereParams {
    /// `r′ = 1 − 2δ + a·2δ`, `r = 1 − 2δ + b·2δ` with `0 < a < b < 1`.
    pub fn with_fractions(eps: f64, delta: f64, a: f64, b: f64) -> Result<Self, SphereError> {
        let base = 1.0 - 2.0 * delta;
        Self::new(eps, delta, base + a * 2.0 * delta, base + b * 2.0 * delta)
    }

    /// Thirds of the interval `(1 − 2δ, 1)`.
    pub fn thirds(eps: f64, delta: f64) -> Result<Self, SphereError> {
        Self::with_fractions(eps, delta, 1.0 / 3.0, 2.0 / 3.0)
    }

    pub fn new(eps: f64, delta: f64, r_prime: f64, r: f64) -> Result<Self, SphereError> {
        if !(1.0 - 2.0 * delta < r_prime && r_prime < r && r < 1.0) {
            return Err(SphereError::Thresholds { delta, r_prime, r });
        }
        let big_r = 2.0 * r_prime / (1.0 + r);
        let rho = r_prime * (1.0 - r) / (1.0 + r);
        Ok(SphereParams { eps, delta, r_prime, r, big_r, rho })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CentreKind {
    /// `±(R x_j + v_j)` with `v_j` in the kernel intersection.
    Kernel,
    /// Largest-slack point from a local search.
    Search,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereCentre {
    pub point: Vec<f64>,
    pub kind: CentreKind,
    /// Smallest margin of the tile's inequalities at the centre; a ball of
    /// this radius around it lies in `H_j^p`.
    pub slack: f64,
}

#[derive(Debug, Clone)]
pub struct SphereTiling {
    pub space: NormedSpace,
    pub params: SphereParams,
    pub family: NormingFamily,
    /// Centres indexed by `j − 1`, for `p = 2`; the `p = 1` centre is the
    /// negation.
    pub centres: Vec<SphereCentre>,
    pub tol: f64,
}

/// Orthogonal (Euclidean) projection of `probe` onto the common kernel of
/// `functionals`, by Gram–Schmidt on their coefficient vectors.
fn kernel_projection(functionals: &[Functional], probe: &[f64]) -> Vec<f64> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for f in functionals {
        let mut g = f.0.clone();
        for b in &basis {
            let c = dot(&g, b);
            for (gi, bi) in g.iter_mut().zip(b) {
                *gi -= c * bi;
            }
        }
        let n = dot(&g, &g).sqrt();
        if n > 1e-10 {
            basis.push(g.iter().map(|v| v / n).collect());
        }
    }
    let mut v = probe.to_vec();
    for b in &basis {
        let c = dot(&v, b);
        for (vi, bi) in v.iter_mut().zip(b) {
            *vi -= c * bi;
        }
    }
    v
}

/// [`SphereTiling::build`] as a free function.
pub fn build_sphere_tiling(space: NormedSpace, eps: f64, candidates: usize, seed: u64) -> Result<SphereTiling, SphereError> {
    SphereTiling::build(space, eps, candidates, seed)
}

impl SphereTiling {
    /// Build with `δ = δ(ε/2)` (exact for ℓ₂, a certified lower bound
    /// otherwise), thresholds at the thirds of `(1 − 2δ, 1)`, a greedy
    /// norming family from `candidates` quasirandom sphere points, then
    /// saturated below `r′` against twice as many probes.
    pub fn build(space: NormedSpace, eps: f64, candidates: usize, seed: u64) -> Result<Self, SphereError> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(SphereError::Epsilon(eps));
        }
        let delta = space.modulus_of_convexity(eps / 2.0)?.delta;
        let params = SphereParams::thirds(eps, delta)?;
        let mut family = greedy_norming_family(&space, params.r, quasirandom_sphere(&space, candidates, seed))?;
        let probes = quasirandom_sphere(&space, 2 * candidates, seed.wrapping_add(1));
        family.saturate_below(&space, params.r_prime, &probes, usize::MAX)?;
        let mut t = Self::from_family(space, params, family);
        t.refine_centres(&probes);
        Ok(t)
    }

    /// Restart the local search of each searched centre from the probe of
    /// largest slack classified into its tile, keeping the better result.
    pub fn refine_centres(&mut self, probes: &[Vec<f64>]) {
        let mut starts: Vec<Option<(f64, Vec<f64>)>> = vec![None; self.len()];
        for x in probes {
            let Ok(u) = self.space.normalize(x) else { continue };
            let Ok(id) = self.sphere_classify(&u) else { continue };
            let j = id.j as usize;
            if self.centres[j - 1].kind != CentreKind::Search {
                continue;
            }
            let up: Vec<f64> = u.iter().map(|v| id.sign() * v).collect();
            let s = self.slack(SphereTileId { j: id.j, p: 2 }, &up);
            if starts[j - 1].as_ref().is_none_or(|(best, _)| s > *best) {
                starts[j - 1] = Some((s, up));
            }
        }
        for (j, start) in starts.into_iter().enumerate() {
            let Some((s, start)) = start else { continue };
            if s <= self.centres[j].slack {
                continue;
            }
            let point = self.search_centre(j + 1, start);
            let slack = self.slack(SphereTileId { j: j as u32 + 1, p: 2 }, &point);
            if slack > self.centres[j].slack {
                self.centres[j] = SphereCentre { point, kind: CentreKind::Search, slack };
            }
        }
    }

    pub fn from_family(space: NormedSpace, params: SphereParams, family: NormingFamily) -> Self {
        let mut t = SphereTiling { space, params, family, centres: Vec::new(), tol: TOL };
        t.centres = (1..=t.len()).map(|j| t.build_centre(j)).collect();
        t
    }

    pub fn len(&self) -> usize {
        self.family.len()
    }

    pub fn is_empty(&self) -> bool {
        self.family.is_empty()
    }

    fn f(&self, j: usize, x: &[f64]) -> f64 {
        self.family.functionals[j - 1].apply(x)
    }

    /// Smallest margin of the inequalities of `H_j^p` at `h`.
    pub fn slack(&self, id: SphereTileId, h: &[f64]) -> f64 {
        let j = id.j as usize;
        let own = id.sign() * self.f(j, h) - self.params.r_prime;
        (1..j).fold(own, |m, i| m.min(self.params.r_prime - self.f(i, h).abs()))
    }

    fn kernel_centre(&self, j: usize) -> Option<Vec<f64>> {
        let n = self.space.dim();
        let x = &self.family.points[j - 1];
        let fs = &self.family.functionals[..j];
        let v = (0..n).find_map(|m| {
            let mut probe = vec![0.0; n];
            probe[(j + m) % n] = 1.0;
            let v = kernel_projection(fs, &probe);
            (dot(&v, &v).sqrt() > 1e-8).then_some(v)
        })?;
        let big_r = self.params.big_r;
        let at = |t: f64| -> f64 { self.space.norm(&x.iter().zip(&v).map(|(a, b)| big_r * a + t * b).collect::<Vec<_>>()) };
        let mut hi = 1.0;
        while at(hi) < 1.0 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        assert!(at(lo) < 1.0, "R < 1 brackets the root");
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if at(mid) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        Some(x.iter().zip(&v).map(|(a, b)| big_r * a + t * b).collect())
    }

    /// Largest slack of `H_j^2` near `start`. The slack is a minimum of
    /// affine pieces `a·x + b`; an annealed soft-minimum is climbed by
    /// projected gradient steps on the sphere, then a pattern search
    /// polishes the exact minimum. Only functionals that can bind near
    /// `start` are kept.
    fn search_centre(&self, j: usize, start: Vec<f64>) -> Vec<f64> {
        let rp = self.params.r_prime;
        let reach = 0.3;
        let coef = |i: usize| self.family.functionals[i - 1].0.as_slice();
        let mut pieces: Vec<(Vec<f64>, f64)> = vec![(coef(j).to_vec(), -rp)];
        for i in (1..j).filter(|&i| self.f(i, &start).abs() > rp - reach) {
            pieces.push((coef(i).to_vec(), rp));
            pieces.push((coef(i).iter().map(|v| -v).collect(), rp));
        }
        let slack = |h: &[f64]| pieces.iter().fold(f64::INFINITY, |m, (a, b)| m.min(dot(a, h) + b));
        let mut h = start;
        let mut best = slack(&h);
        let mut best_h = h.clone();
        let mut tau = 1e-2;
        while tau > 1e-5 {
            let soft = |h: &[f64]| -> (f64, Vec<f64>) {
                let vals: Vec<f64> = pieces.iter().map(|(a, b)| dot(a, h) + b).collect();
                let m = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                let w: Vec<f64> = vals.iter().map(|v| (-(v - m) / tau).exp()).collect();
                let z: f64 = w.iter().sum();
                let mut grad = vec![0.0; h.len()];
                for ((a, _), wk) in pieces.iter().zip(&w) {
                    for (g, ak) in grad.iter_mut().zip(a) {
                        *g += wk / z * ak;
                    }
                }
                (m - tau * z.ln(), grad)
            };
            let mut eta = tau;
            let (mut value, mut grad) = soft(&h);
            for _ in 0..100 {
                // Tangent direction: remove the component along the normal.
                let normal = match self.space.duality_map(&h) {
                    Ok(f) => f,
                    Err(_) => break,
                };
                let along = normal.apply(&grad);
                let d: Vec<f64> = grad.iter().zip(&h).map(|(g, x)| g - along * x).collect();
                let Ok(trial) = self.space.normalize(&h.iter().zip(&d).map(|(x, d)| x + eta * d).collect::<Vec<_>>())
                else {
                    break;
                };
                let (v, g) = soft(&trial);
                if v > value {
                    h = trial;
                    value = v;
                    grad = g;
                    eta *= 1.5;
                    let exact = slack(&h);
                    if exact > best {
                        best = exact;
                        best_h = h.clone();
                    }
                } else {
                    eta *= 0.5;
                    if eta < 1e-12 {
                        break;
                    }
                }
            }
            tau /= 4.0;
        }
        let n = best_h.len();
        let mut dirs: Vec<Vec<f64>> = Vec::new();
        for a in 0..n {
            let mut e = vec![0.0; n];
            e[a] = 1.0;
            dirs.push(e);
            for b in 0..a {
                for s in [1.0, -1.0] {
                    let mut d = vec![0.0; n];
                    d[a] = std::f64::consts::FRAC_1_SQRT_2;
                    d[b] = s * std::f64::consts::FRAC_1_SQRT_2;
                    dirs.push(d);
                }
            }
        }
        let mut h = best_h;
        let mut step = 1e-3;
        let mut evals = 0;
        while step > 1e-10 && evals < 5_000 {
            let mut improved = false;
            for d in &dirs {
                for s in [step, -step] {
                    evals += 1;
                    let trial: Vec<f64> = h.iter().zip(d).map(|(a, b)| a + s * b).collect();
                    if let Ok(u) = self.space.normalize(&trial) {
                        let v = slack(&u);
                        if v > best {
                            best = v;
                            h = u;
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        h
    }

    fn build_centre(&self, j: usize) -> SphereCentre {
        let id = SphereTileId { j: j as u32, p: 2 };
        let kernel = self.kernel_centre(j);
        let (point, kind) = match kernel {
            Some(h) => (h, CentreKind::Kernel),
            None => (self.search_centre(j, self.family.points[j - 1].clone()), CentreKind::Search),
        };
        let slack = self.slack(id, &point);
        SphereCentre { point, kind, slack }
    }

    pub fn centre(&self, id: SphereTileId) -> Vec<f64> {
        let c = &self.centres[id.j as usize - 1].point;
        c.iter().map(|v| id.sign() * v).collect()
    }

    fn check_id(&self, id: SphereTileId) -> Result<(), SphereError> {
        if id.j == 0 || id.j as usize > self.len() || !(id.p == 1 || id.p == 2) {
            Err(SphereError::InvalidTile { j: id.j as usize, p: id.p })
        } else {
            Ok(())
        }
    }

    fn membership_unchecked(&self, id: SphereTileId, x: &[f64]) -> Membership {
        let rp = self.params.r_prime;
        let j = id.j as usize;
        let mut m = Membership::from_slack(rp - id.sign() * self.f(j, x), self.tol);
        for i in 1..j {
            if !m.is_inside() {
                break;
            }
            m = m.and(Membership::from_slack(self.f(i, x).abs() - rp, self.tol));
        }
        m
    }

    pub fn sphere_tile_membership(&self, id: SphereTileId, x: &[f64]) -> Result<Membership, SphereError> {
        self.check_id(id)?;
        let n = self.space.try_norm(x)?;
        if (n - 1.0).abs() > 1e-9 {
            return Err(SphereError::OffSphere(n));
        }
        Ok(self.membership_unchecked(id, x))
    }

    /// First `j` with `|f_j(x)| ≥ r′`; `p = 2` when `f_j(x) > 0`.
    pub fn sphere_classify(&self, x: &[f64]) -> Result<SphereTileId, SphereError> {
        let n = self.space.try_norm(x)?;
        if (n - 1.0).abs() > 1e-9 {
            return Err(SphereError::OffSphere(n));
        }
        let mut best = 0.0f64;
        for j in 1..=self.len() {
            let v = self.f(j, x);
            if v.abs() >= self.params.r_prime {
                return Ok(SphereTileId { j: j as u32, p: if v > 0.0 { 2 } else { 1 } });
            }
            best = best.max(v.abs());
        }
        Err(SphereError::Unclassified(best))
    }

    /// Construction invariants: the two closed-form identities, unit
    /// centres, the value `±R` of `f_j` and the bound `rR` at kernel
    /// centres, and the per-tile slack against `ρ`.
    pub fn construction_checks(&self) -> Vec<CheckOutcome> {
        let p = &self.params;
        let mut out = vec![
            CheckOutcome::at_most("rho = R - r'", 1e-12, [((p.rho - (p.big_r - p.r_prime)).abs(), vec![])]),
            CheckOutcome::at_most("R = 2r'/(1+r)", 1e-12, [((p.big_r - 2.0 * p.r_prime / (1.0 + p.r)).abs(), vec![])]),
            CheckOutcome::at_most(
                "unit centres",
                1e-9,
                self.centres.iter().map(|c| ((self.space.norm(&c.point) - 1.0).abs(), c.point.clone())),
            ),
        ];
        let kernel: Vec<(usize, &SphereCentre)> =
            self.centres.iter().enumerate().filter(|(_, c)| c.kind == CentreKind::Kernel).map(|(j, c)| (j + 1, c)).collect();
        out.push(CheckOutcome::at_most(
            "f_j(h_j) = R at kernel centres",
            1e-9,
            kernel.iter().map(|(j, c)| ((self.f(*j, &c.point) - p.big_r).abs(), c.point.clone())),
        ));
        out.push(CheckOutcome::at_most(
            "|f_i(h_j)| <= rR at kernel centres",
            p.r * p.big_r + 1e-9,
            kernel
                .iter()
                .flat_map(|(j, c)| (1..*j).map(move |i| (self.f(i, &c.point).abs(), c.point.clone()))),
        ));
        out.push(CheckOutcome::at_least(
            "centre slack at least rho",
            p.rho - 1e-12,
            self.centres.iter().map(|c| (c.slack, c.point.clone())),
        ));
        out
    }

    /// Number of indices `j` whose centre certifies the full radius `ρ`.
    pub fn certified_tiles(&self) -> usize {
        self.centres.iter().filter(|c| c.slack >= self.params.rho - 1e-12).count()
    }

    /// Number of indices `j` with no interior point found.
    pub fn degenerate_tiles(&self) -> usize {
        self.centres.iter().filter(|c| c.slack <= 0.0).count()
    }

    /// Picture of the tiling: for a circle, coloured sample points along
    /// the curve; in dimension three, the upper hemisphere projected to the
    /// plane.
    pub fn render_svg(&self, samples: usize, seed: u64) -> Option<String> {
        let dim = self.space.dim();
        if !(dim == 2 || dim == 3) {
            return None;
        }
        let mut canvas = Canvas::new((-1.1, -1.1), (1.1, 1.1), 640.0);
        for x in self.domain().samples(samples, seed) {
            if dim == 3 && x[2] < 0.0 {
                continue;
            }
            if let Ok(id) = self.sphere_classify(&x) {
                let colour = Canvas::palette(2 * id.j as usize + id.p as usize);
                canvas.circle((x[0], x[1]), 2.0, colour);
            }
        }
        for j in 1..=self.len() {
            for p in [1u8, 2] {
                let c = self.centre(SphereTileId { j: j as u32, p });
                if dim == 2 || c[2] >= 0.0 {
                    canvas.circle((c[0], c[1]), 3.5, "#000");
                }
            }
        }
        Some(canvas.finish())
    }
}

impl Tiling for SphereTiling {
    type Id = SphereTileId;

    fn metric(&self) -> &NormedSpace {
        &self.space
    }

    fn domain(&self) -> Domain {
        Domain::Sphere { space: self.space }
    }

    fn chart(&self) -> Chart {
        Chart::Sphere
    }

    fn classify(&self, x: &[f64]) -> Option<SphereTileId> {
        self.sphere_classify(x).ok()
    }

    fn membership(&self, id: SphereTileId, x: &[f64]) -> Membership {
        self.sphere_tile_membership(id, x).unwrap_or(Membership::Outside)
    }

    fn tiles_containing(&self, x: &[f64]) -> Vec<(SphereTileId, Membership)> {
        let mut out = Vec::new();
        for j in 1..=self.len() {
            for p in [1u8, 2] {
                let id = SphereTileId { j: j as u32, p };
                let m = self.membership_unchecked(id, x);
                if m.is_inside() {
                    out.push((id, m));
                }
            }
            if self.f(j, x).abs() > self.params.r_prime + self.tol {
                break;
            }
        }
        out
    }

    fn center(&self, id: SphereTileId) -> Vec<f64> {
        self.centre(id)
    }

    fn inner_radius(&self, _id: SphereTileId) -> f64 {
        self.params.rho
    }

    fn outer_radius(&self, _id: SphereTileId) -> f64 {
        self.params.eps
    }

    /// Tiles with a known interior point. The rest have empty interior as
    /// far as the centre search can tell; any of them that owns a sample is
    /// still certified by the harness.
    fn tile_ids(&self) -> Option<Vec<SphereTileId>> {
        Some(
            self.centres
                .iter()
                .enumerate()
                .filter(|(_, c)| c.slack > 0.0)
                .flat_map(|(j, _)| {
                    let j = j as u32 + 1;
                    [SphereTileId { j, p: 1 }, SphereTileId { j, p: 2 }]
                })
                .collect(),
        )
    }

    fn describe(&self) -> String {
        let p = &self.params;
        format!(
            "convex sphere tiling of {} (dim {}), eps {}, delta {:.6}, r' {:.6}, r {:.6}, rho {:.6}, {} tiles ({} with a certified rho-ball, {} without interior)",
            self.space.kind().label(),
            self.space.dim(),
            p.eps,
            p.delta,
            p.r_prime,
            p.r,
            p.rho,
            2 * self.len(),
            2 * self.certified_tiles(),
            2 * self.degenerate_tiles()
        )
    }
}
