//! Normal tilings of convex bodies by peeling slices.
//!
//! A body `C` with `B(0,η) ⊆ C ⊆ B(0,1)` loses, one at a time, slices
//! `{x ∈ D : f(x) ≥ 1 − δ}` built at its points of norm above `√(1−δ)`.
//! Each slice contains the ball `B(y₀, r)` tangent from outside to
//! `B(0, 1 − δ)`, and uniform convexity bounds its diameter by `ε`. What
//! survives lies in `B(0, √(1−δ))`; rescaling by `γ = √(1−δ)` and
//! repeating `n` times, with `γⁿ ≤ ε`, leaves a core small enough to be a
//! tile itself.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sampling::{quasirandom_ball, Sampler};
use crate::space::{Functional, NormedSpace, SpaceError};
use crate::svg::raster_tiling;
use crate::tiling::{Domain, Membership, Tiling};
use crate::verify::CheckOutcome;

pub const TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BodyError {
    #[error("epsilon {0} outside (0, 1)")]
    Epsilon(f64),
    #[error("inner radius {0} outside (0, 1]")]
    Eta(f64),
    #[error("0 must lie strictly inside every half-space; got level {0}")]
    OriginOutside(f64),
    #[error("point of norm {norm} is below the slicing threshold {threshold}")]
    BelowThreshold { norm: f64, threshold: f64 },
    #[error("point is not in the body")]
    NotInBody,
    #[error("degenerate inner radius {0}")]
    DegenerateEta(f64),
    #[error("pool too sparse after {slices} slices: the core reaches radius {radius} > {bound} in direction {direction:?}")]
    SparsePool { slices: usize, direction: Vec<f64>, radius: f64, bound: f64 },
    #[error("invalid tile {0:?}")]
    InvalidTile(BodyTileId),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// `{x : f(x) ≤ λ}` with `‖f‖* = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub f: Functional,
    pub lambda: f64,
}

impl HalfSpace {
    fn excess(&self, x: &[f64]) -> f64 {
        self.f.apply(x) - self.lambda
    }
}

/// `C = B(0, radius) ∩ ⋂ {f ≤ λ}`, with `B(0, η) ⊆ C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexBody {
    pub space: NormedSpace,
    pub radius: f64,
    pub halfspaces: Vec<HalfSpace>,
    pub eta: f64,
}

impl ConvexBody {
    pub fn unit_ball(space: NormedSpace) -> Self {
        ConvexBody { space, radius: 1.0, halfspaces: Vec::new(), eta: 1.0 }
    }

    /// `B(centre, radius) ∩ ⋂ {f ≤ λ}`, translated to put `centre` at the
    /// origin and scaled into the unit ball. `η` is the exact distance from
    /// the origin to the nearest face.
    pub fn from_parts(
        space: NormedSpace,
        centre: &[f64],
        radius: f64,
        halfspaces: Vec<(Functional, f64)>,
    ) -> Result<Self, BodyError> {
        if !(radius > 0.0) {
            return Err(BodyError::Eta(radius));
        }
        let mut body = ConvexBody::unit_ball(space);
        for (f, lambda) in halfspaces {
            let norm = space.dual_norm(&f);
            if !(norm > 0.0) {
                return Err(SpaceError::ZeroVector.into());
            }
            let level = (lambda - f.apply(centre)) / (radius * norm);
            let unit = Functional(f.0.iter().map(|v| v / norm).collect());
            body = body.cut(HalfSpace { f: unit, lambda: level })?;
        }
        Ok(body)
    }

    /// Intersect with a half-space through which the origin stays interior.
    pub fn cut(mut self, h: HalfSpace) -> Result<Self, BodyError> {
        if !(h.lambda > 0.0) {
            return Err(BodyError::OriginOutside(h.lambda));
        }
        self.eta = self.eta.min(h.lambda);
        self.halfspaces.push(h);
        Ok(self)
    }

    /// The body `s·C`.
    pub fn scaled(&self, s: f64) -> Self {
        ConvexBody {
            space: self.space,
            radius: self.radius * s,
            halfspaces: self
                .halfspaces
                .iter()
                .map(|h| HalfSpace { f: h.f.clone(), lambda: h.lambda * s })
                .collect(),
            eta: self.eta * s,
        }
    }

    pub fn membership(&self, x: &[f64]) -> Membership {
        let mut m = Membership::from_slack(self.space.norm(x) - self.radius, TOL);
        for h in &self.halfspaces {
            if !m.is_inside() {
                break;
            }
            m = m.and(Membership::from_slack(h.excess(x), TOL));
        }
        m
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.membership(x).is_inside()
    }

    /// Largest `t` with `t·u` in the body.
    pub fn exit_radius(&self, u: &[f64]) -> f64 {
        let mut t = self.radius / self.space.norm(u);
        for h in &self.halfspaces {
            let v = h.f.apply(u);
            if v > 0.0 {
                t = t.min(h.lambda / v);
            }
        }
        t
    }

    /// Local maximum of the exit radius over directions near `u`, by
    /// pattern search; stops early once the radius exceeds `stop`.
    pub fn climb_exit(&self, u: &[f64], stop: f64) -> (f64, Vec<f64>) {
        let n = u.len();
        let mut u = self.space.normalize(u).unwrap_or_else(|_| u.to_vec());
        let mut best = self.exit_radius(&u);
        let mut step = 0.05;
        while step > 1e-7 && best <= stop {
            let mut improved = false;
            for i in 0..n {
                for s in [step, -step] {
                    let mut v = u.clone();
                    v[i] += s;
                    let Ok(v) = self.space.normalize(&v) else { continue };
                    let t = self.exit_radius(&v);
                    if t > best {
                        best = t;
                        u = v;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        (best, u)
    }

    pub fn domain(&self) -> Domain {
        if self.halfspaces.is_empty() && self.radius == 1.0 {
            Domain::Ball { space: self.space, radius: 1.0 }
        } else {
            let s = self.radius;
            Domain::CutBall {
                space: self.space,
                halfspaces: self.halfspaces.iter().map(|h| (h.f.0.iter().map(|v| v * s).collect(), h.lambda)).collect(),
            }
        }
    }
}

/// `{x ∈ D : f(x) ≥ λ}` with the ball `B(y₀, r_slice)` inside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceSpec {
    pub f: Functional,
    pub lambda: f64,
    pub y0: Vec<f64>,
    pub r_slice: f64,
    pub layer: usize,
    /// The body point the slice was built at.
    pub anchor: Vec<f64>,
}

impl SliceSpec {
    fn scaled(&self, s: f64) -> Self {
        SliceSpec {
            f: self.f.clone(),
            lambda: self.lambda * s,
            y0: self.y0.iter().map(|v| v * s).collect(),
            r_slice: self.r_slice * s,
            layer: self.layer,
            anchor: self.anchor.iter().map(|v| v * s).collect(),
        }
    }

    fn halfspace(&self) -> HalfSpace {
        HalfSpace { f: self.f.clone(), lambda: self.lambda }
    }
}

/// The slice at `x`, for a body inside the unit ball containing `B(0,η)`:
/// with `η_δ = min(η, 1−δ)` and `x₀ = √(1−δ)·x/‖x‖`, the ball around
/// `y₀ = (η_δ+1−δ)/(η_δ+√(1−δ))·x₀` of radius
/// `r = η_δ(√(1−δ)−(1−δ))/(η_δ+√(1−δ))` lies in the convex hull of `x`
/// and `B(0, η_δ)`, and `‖y₀‖ − r = 1 − δ`, so the norming functional of
/// `y₀` at level `1 − δ` separates it from `B(0, 1−δ)`.
pub fn build_slice(body: &ConvexBody, x: &[f64], delta: f64, eta: f64) -> Result<SliceSpec, BodyError> {
    let space = &body.space;
    let norm = space.try_norm(x)?;
    let g = (1.0 - delta).sqrt();
    if norm < g - 1e-12 {
        return Err(BodyError::BelowThreshold { norm, threshold: g });
    }
    if !body.contains(x) {
        return Err(BodyError::NotInBody);
    }
    let eta_d = eta.min(1.0 - delta);
    if !(eta_d > 0.0) {
        return Err(BodyError::DegenerateEta(eta_d));
    }
    let c = (eta_d + 1.0 - delta) / (eta_d + g) * g / norm;
    let y0: Vec<f64> = x.iter().map(|v| c * v).collect();
    let r_slice = eta_d * (g - (1.0 - delta)) / (eta_d + g);
    let f = space.duality_map(&y0)?;
    Ok(SliceSpec { f, lambda: 1.0 - delta, y0, r_slice, layer: 1, anchor: x.to_vec() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeelConfig {
    /// Quasirandom pool points per layer.
    pub pool: usize,
    /// Directional probes whose exit points above the threshold become
    /// additional survivors; refinement stops after this many consecutive
    /// clean probes.
    pub refine_probes: usize,
    /// Fresh directional probes, each climbed to a local maximum of the
    /// exit radius, certifying the core radius.
    pub certify_probes: usize,
    /// Pool points kept per slice as samples of it.
    pub keep_samples: usize,
    pub seed: u64,
}

impl Default for PeelConfig {
    fn default() -> Self {
        PeelConfig { pool: 100_000, refine_probes: 2_000, certify_probes: 1_000, keep_samples: 100, seed: 0 }
    }
}

/// Slices in creation order, their captured pool points, and the core.
#[derive(Debug, Clone)]
pub struct Layer {
    pub slices: Vec<SliceSpec>,
    pub samples: Vec<Vec<Vec<f64>>>,
    pub core: ConvexBody,
    /// Largest exit radius of the core seen by the certification probes.
    pub core_outer: f64,
    /// Smallest exit radius of the core seen by the certification probes.
    pub core_inner: f64,
}

/// Peel slices off `body` (inside the unit ball, containing `B(0,η)`)
/// until no pool point or probe direction reaches past `√(1−δ)`. The
/// survivor of largest norm is sliced first.
pub fn peel_layer(
    body: &ConvexBody,
    delta: f64,
    eta: f64,
    pool: Vec<Vec<f64>>,
    cfg: &PeelConfig,
) -> Result<Layer, BodyError> {
    let space = body.space;
    let g = (1.0 - delta).sqrt();
    let mut pool: Vec<(f64, Vec<f64>)> = pool
        .into_iter()
        .filter(|x| body.contains(x))
        .map(|x| (space.norm(&x), x))
        .filter(|(n, _)| *n > g)
        .collect();
    pool.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut alive = vec![true; pool.len()];
    let mut core = body.clone();
    let mut slices = Vec::new();
    let mut samples: Vec<Vec<Vec<f64>>> = Vec::new();
    let add = |core: &mut ConvexBody,
                   x: &[f64],
                   pool: &[(f64, Vec<f64>)],
                   alive: &mut [bool],
                   slices: &mut Vec<SliceSpec>,
                   samples: &mut Vec<Vec<Vec<f64>>>|
     -> Result<(), BodyError> {
        let s = build_slice(core, x, delta, eta)?;
        let mut kept = vec![x.to_vec()];
        for (k, (_, p)) in pool.iter().enumerate() {
            if alive[k] && s.f.apply(p) >= s.lambda {
                alive[k] = false;
                if kept.len() < cfg.keep_samples {
                    kept.push(p.clone());
                }
            }
        }
        *core = std::mem::replace(core, ConvexBody::unit_ball(space)).cut(s.halfspace())?;
        slices.push(s);
        samples.push(kept);
        Ok(())
    };
    for k in 0..pool.len() {
        if alive[k] {
            let x = pool[k].1.clone();
            add(&mut core, &x, &pool, &mut alive, &mut slices, &mut samples)?;
        }
    }
    let mut sampler = Sampler::new(cfg.seed);
    let (mut clean, mut total) = (0, 0);
    while clean < cfg.refine_probes && total < 50 * cfg.refine_probes {
        total += 1;
        let (t, u) = core.climb_exit(&sampler.unit_sphere(&space), g + 1e-12);
        if t > g + 1e-12 {
            clean = 0;
            let x: Vec<f64> = u.iter().map(|v| t * v).collect();
            add(&mut core, &x, &pool, &mut alive, &mut slices, &mut samples)?;
        } else {
            clean += 1;
        }
    }
    let mut sampler = Sampler::new(cfg.seed ^ 0x5eed);
    let (mut core_outer, mut core_inner) = (0.0f64, f64::INFINITY);
    for _ in 0..cfg.certify_probes {
        let u = sampler.unit_sphere(&space);
        core_inner = core_inner.min(core.exit_radius(&u));
        let (t, u) = core.climb_exit(&u, g + 1e-9);
        if t > core_outer {
            core_outer = t;
            if t > g + 1e-9 {
                return Err(BodyError::SparsePool { slices: slices.len(), direction: u, radius: t, bound: g });
            }
        }
    }
    Ok(Layer { slices, samples, core, core_outer, core_inner })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BodyTileId {
    Slice(usize),
    Core,
}

/// All slices of all layers in original coordinates, plus the core.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayeredTiling {
    pub body: ConvexBody,
    pub slices: Vec<SliceSpec>,
    /// Captured pool points per slice, original coordinates.
    pub slice_samples: Vec<Vec<Vec<f64>>>,
    pub core: ConvexBody,
    pub eps: f64,
    pub delta: f64,
    pub gamma: f64,
    pub layers: usize,
    /// Slice ball radius per layer before rescaling.
    pub layer_r: Vec<f64>,
    pub rho: f64,
}

/// Smallest `n` with `γⁿ ≤ ε`.
pub fn layer_count(gamma: f64, eps: f64) -> usize {
    let mut n = 0;
    let mut g = 1.0;
    while g > eps {
        g *= gamma;
        n += 1;
    }
    n
}

pub fn build_body_tiling(body: &ConvexBody, eps: f64, cfg: &PeelConfig) -> Result<LayeredTiling, BodyError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(BodyError::Epsilon(eps));
    }
    if !(body.eta > 0.0 && body.eta <= 1.0) {
        return Err(BodyError::Eta(body.eta));
    }
    let space = body.space;
    let delta = space.modulus_of_convexity(eps)?.delta;
    let gamma = (1.0 - delta).sqrt();
    let layers = layer_count(gamma, eps);
    let mut current = body.clone();
    let mut slices = Vec::new();
    let mut slice_samples = Vec::new();
    let mut layer_r = Vec::new();
    let mut inner = body.eta;
    for k in 1..=layers {
        let s = gamma.powi(k as i32 - 1);
        let local = current.scaled(1.0 / s);
        let eta = (inner / s).min(1.0);
        let pool = quasirandom_ball(&space, cfg.pool, cfg.seed.wrapping_add(k as u64));
        let layer_cfg = PeelConfig { seed: cfg.seed.wrapping_add(1000 * k as u64), ..*cfg };
        let layer = peel_layer(&local, delta, eta, pool, &layer_cfg)?;
        let eta_d = eta.min(1.0 - delta);
        layer_r.push(eta_d * (gamma - (1.0 - delta)) / (eta_d + gamma));
        for (sl, smp) in layer.slices.iter().zip(&layer.samples) {
            let mut sl = sl.scaled(s);
            sl.layer = k;
            current = current.cut(sl.halfspace())?;
            slices.push(sl);
            slice_samples.push(smp.iter().map(|p| p.iter().map(|v| v * s).collect()).collect());
        }
        inner = s * eta_d;
    }
    let rho = layer_r
        .iter()
        .enumerate()
        .fold(body.eta.min(gamma.powi(layers as i32 + 1)), |m, (k, r)| m.min(r * gamma.powi(k as i32)));
    Ok(LayeredTiling {
        body: body.clone(),
        slices,
        slice_samples,
        core: current,
        eps,
        delta,
        gamma,
        layers,
        layer_r,
        rho,
    })
}

impl LayeredTiling {
    fn check_id(&self, id: BodyTileId) -> Result<(), BodyError> {
        match id {
            BodyTileId::Slice(a) if a >= self.slices.len() => Err(BodyError::InvalidTile(id)),
            _ => Ok(()),
        }
    }

    fn membership_unchecked(&self, id: BodyTileId, x: &[f64]) -> Membership {
        let before = match id {
            BodyTileId::Slice(a) => a,
            BodyTileId::Core => self.slices.len(),
        };
        let mut m = Membership::from_slack(self.body.space.norm(x) - self.body.radius, TOL);
        for h in &self.body.halfspaces {
            m = m.and(Membership::from_slack(h.excess(x), TOL));
        }
        if let BodyTileId::Slice(a) = id {
            let s = &self.slices[a];
            m = m.and(Membership::from_slack(s.lambda - s.f.apply(x), TOL));
        }
        for s in &self.slices[..before] {
            if !m.is_inside() {
                break;
            }
            m = m.and(Membership::from_slack(s.f.apply(x) - s.lambda, TOL));
        }
        m
    }

    pub fn body_tile_membership(&self, id: BodyTileId, x: &[f64]) -> Result<Membership, BodyError> {
        self.check_id(id)?;
        self.body.space.try_norm(x)?;
        Ok(self.membership_unchecked(id, x))
    }

    /// First slice with `f(x) ≥ λ`, else the core; `None` outside the body.
    pub fn body_classify(&self, x: &[f64]) -> Option<BodyTileId> {
        if !self.body.contains(x) {
            return None;
        }
        Some(
            self.slices
                .iter()
                .position(|s| s.f.apply(x) >= s.lambda)
                .map_or(BodyTileId::Core, BodyTileId::Slice),
        )
    }

    pub fn centre(&self, id: BodyTileId) -> Vec<f64> {
        match id {
            BodyTileId::Slice(a) => self.slices[a].y0.clone(),
            BodyTileId::Core => vec![0.0; self.body.space.dim()],
        }
    }

    /// Construction identities and the probe checks specific to slices:
    /// tangency, the layer count and `ρ`, slice balls inside their tiles,
    /// and sampled slice diameters.
    pub fn construction_checks(&self, directions: usize, seed: u64) -> Vec<CheckOutcome> {
        let space = &self.body.space;
        let mut out = Vec::new();
        out.push(CheckOutcome::at_most(
            "tangency |y0| - r = (1-delta) scale",
            1e-9,
            self.slices.iter().map(|s| {
                let scale = self.gamma.powi(s.layer as i32 - 1);
                ((space.norm(&s.y0) - s.r_slice - (1.0 - self.delta) * scale).abs(), s.y0.clone())
            }),
        ));
        let n = self.layers as i32;
        out.push(CheckOutcome::flag(
            "gamma^n <= eps < gamma^(n-1)",
            self.gamma.powi(n) <= self.eps && (n == 0 || self.gamma.powi(n - 1) > self.eps),
            None,
        ));
        let mut sampler = Sampler::new(seed);
        let mut ball = Vec::new();
        for (a, s) in self.slices.iter().enumerate() {
            for _ in 0..directions {
                let u = sampler.unit_sphere(space);
                let x: Vec<f64> = s.y0.iter().zip(&u).map(|(c, v)| c + (s.r_slice - TOL) * v).collect();
                let bad = if self.membership_unchecked(BodyTileId::Slice(a), &x).is_inside() { 0.0 } else { 1.0 };
                ball.push((bad, x));
            }
        }
        out.push(CheckOutcome::at_most("slice balls B(y0, r) inside their tiles", 0.0, ball));
        out.push(CheckOutcome::at_most(
            "sampled slice diameters",
            self.eps + 1e-6,
            self.slice_samples.iter().flat_map(|pts| {
                let mut worst = (0.0f64, Vec::new());
                for (i, p) in pts.iter().enumerate() {
                    for q in &pts[..i] {
                        let d = space.distance(p, q);
                        if d > worst.0 {
                            worst = (d, p.clone());
                        }
                    }
                }
                Some(worst)
            }),
        ));
        out
    }

    /// Raster picture of a planar body tiling.
    pub fn render_svg(&self, pixels: usize) -> Option<String> {
        raster_tiling(self, (-1.05, -1.05), (1.05, 1.05), pixels)
    }
}

impl Tiling for LayeredTiling {
    type Id = BodyTileId;

    fn metric(&self) -> &NormedSpace {
        &self.body.space
    }

    fn domain(&self) -> Domain {
        self.body.domain()
    }

    fn classify(&self, x: &[f64]) -> Option<BodyTileId> {
        self.body_classify(x)
    }

    fn membership(&self, id: BodyTileId, x: &[f64]) -> Membership {
        if self.check_id(id).is_err() {
            return Membership::Outside;
        }
        self.membership_unchecked(id, x)
    }

    fn tiles_containing(&self, x: &[f64]) -> Vec<(BodyTileId, Membership)> {
        (0..self.slices.len())
            .map(BodyTileId::Slice)
            .chain([BodyTileId::Core])
            .map(|id| (id, self.membership_unchecked(id, x)))
            .filter(|(_, m)| m.is_inside())
            .collect()
    }

    fn center(&self, id: BodyTileId) -> Vec<f64> {
        self.centre(id)
    }

    fn inner_radius(&self, _id: BodyTileId) -> f64 {
        self.rho
    }

    fn outer_radius(&self, _id: BodyTileId) -> f64 {
        self.eps
    }

    fn tile_ids(&self) -> Option<Vec<BodyTileId>> {
        Some((0..self.slices.len()).map(BodyTileId::Slice).chain([BodyTileId::Core]).collect())
    }

    fn describe(&self) -> String {
        format!(
            "layered body tiling of the {} unit ball{} (dim {}), eps {}, delta {:.6}, gamma {:.6}, {} layers, {} slices, rho {:.6}",
            self.body.space.kind().label(),
            if self.body.halfspaces.is_empty() { "" } else { " cut by half-spaces" },
            self.body.space.dim(),
            self.eps,
            self.delta,
            self.gamma,
            self.layers,
            self.slices.len(),
            self.rho
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> PeelConfig {
        PeelConfig { pool: 20_000, refine_probes: 500, certify_probes: 300, keep_samples: 50, seed: 3 }
    }

    #[test]
    fn slice_formulas() {
        let body = ConvexBody::unit_ball(NormedSpace::euclidean(2));
        let s = build_slice(&body, &[1.0, 0.0], 0.19, 1.0).unwrap();
        assert!((s.r_slice - 0.81 * 0.09 / 1.71).abs() < 1e-15);
        assert!((s.r_slice - 0.0426316).abs() < 1e-7);
        let ny = body.space.norm(&s.y0);
        assert!((ny - 0.9 * 1.62 / 1.71).abs() < 1e-15);
        assert!((ny - 0.8526316).abs() < 1e-7);
        assert!((ny - s.r_slice - 0.81).abs() < 1e-15);
        assert!(s.y0[1].abs() < 1e-15 && (s.f.0[0] - 1.0).abs() < 1e-15 && s.f.0[1].abs() < 1e-15);
        assert!(s.f.apply(&[1.0, 0.0]) >= s.lambda);
        assert!(matches!(build_slice(&body, &[0.5, 0.0], 0.19, 1.0), Err(BodyError::BelowThreshold { .. })));
        assert!(matches!(build_slice(&body, &[1.0, 0.0], 0.19, 0.0), Err(BodyError::DegenerateEta(_))));
    }

    #[test]
    fn layer_count_example() {
        let s = NormedSpace::euclidean(3);
        let delta = s.modulus_of_convexity(0.75).unwrap().delta;
        assert!((delta - (1.0 - (1.0f64 - 0.140625).sqrt())).abs() < 1e-12);
        let gamma = (1.0 - delta).sqrt();
        assert_eq!(layer_count(gamma, 0.75), 8);
        assert_eq!(layer_count(gamma, 0.75), (0.75f64.ln() / gamma.ln()).ceil() as usize);
    }

    #[test]
    fn disk_peels_with_tangent_slices() {
        let body = ConvexBody::unit_ball(NormedSpace::euclidean(2));
        let layer = peel_layer(&body, 0.19, 1.0, quasirandom_ball(&body.space, 20_000, 1), &small()).unwrap();
        assert!(!layer.slices.is_empty());
        for s in &layer.slices {
            assert!((body.space.norm(&s.y0) - s.r_slice - 0.81).abs() < 1e-12);
        }
        assert!(layer.core_outer <= 0.9 + 1e-9);
        assert!(layer.core_inner >= 0.81 - 1e-9);
    }

    #[test]
    fn small_body_needs_no_slices() {
        let body = ConvexBody::unit_ball(NormedSpace::euclidean(2)).scaled(0.85);
        let layer = peel_layer(&body, 0.19, 0.85, quasirandom_ball(&body.space, 5_000, 1), &small()).unwrap();
        assert!(layer.slices.is_empty());
        assert_eq!(layer.core, body);
    }

    #[test]
    fn origin_only_pool_is_reported() {
        let body = ConvexBody::unit_ball(NormedSpace::euclidean(2));
        let cfg = PeelConfig { refine_probes: 0, ..small() };
        match peel_layer(&body, 0.19, 1.0, vec![vec![0.0, 0.0]], &cfg) {
            Err(BodyError::SparsePool { slices, radius, .. }) => {
                assert_eq!(slices, 0);
                assert!(radius > 0.9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn memberships_at_special_points() {
        let body = ConvexBody::unit_ball(NormedSpace::euclidean(2));
        let t = build_body_tiling(&body, 0.8, &small()).unwrap();
        assert_eq!(t.body_tile_membership(BodyTileId::Core, &[0.0, 0.0]).unwrap(), Membership::Strict);
        let s = &t.slices[3];
        assert_eq!(t.body_tile_membership(BodyTileId::Slice(3), &s.y0).unwrap(), Membership::Strict);
        // A point on the cutting hyperplane of slice 0, inside the disc.
        let f = &t.slices[0].f.0;
        let on: Vec<f64> = f.iter().map(|v| v * t.slices[0].lambda).collect();
        let in0 = t.body_tile_membership(BodyTileId::Slice(0), &on).unwrap();
        assert_eq!(in0, Membership::Inside);
        let others: Vec<_> = t.tiles_containing(&on).into_iter().filter(|(id, _)| *id != BodyTileId::Slice(0)).collect();
        assert!(!others.is_empty() && others.iter().all(|(_, m)| !m.is_strict()));
        assert!(t.body_tile_membership(BodyTileId::Slice(10_000), &on).is_err());
    }

    #[test]
    fn single_layer_when_eps_is_large() {
        let body = ConvexBody::unit_ball(NormedSpace::euclidean(2));
        let t = build_body_tiling(&body, 0.99, &small()).unwrap();
        assert_eq!(t.layers, 1);
        assert!(t.slices.iter().all(|s| s.layer == 1));
    }

    #[test]
    fn planar_tiling_checks_pass() {
        let body = ConvexBody::unit_ball(NormedSpace::lp(2, 3.0).unwrap());
        let t = build_body_tiling(&body, 0.8, &small()).unwrap();
        for c in t.construction_checks(20, 1) {
            assert!(c.passed, "{}", c.line());
        }
        let mut s = Sampler::new(8);
        for _ in 0..3000 {
            let x = s.unit_ball(&body.space);
            let id = t.body_classify(&x).unwrap();
            assert!(body.space.distance(&x, &t.centre(id)) <= t.eps + 1e-9);
            assert!(t.tiles_containing(&x).iter().filter(|(_, m)| m.is_strict()).count() <= 1);
        }
        assert!(t.render_svg(40).unwrap().contains("<rect"));
    }

    #[test]
    fn cut_bodies_are_normalised() {
        let s = NormedSpace::euclidean(2);
        let body = ConvexBody::from_parts(s, &[1.0, 1.0], 2.0, vec![(Functional(vec![0.0, 2.0]), 3.0)]).unwrap();
        // y ≤ 1.5 in the original frame is y ≤ 0.25 after centring and scaling.
        assert!((body.halfspaces[0].lambda - 0.25).abs() < 1e-15);
        assert!((body.eta - 0.25).abs() < 1e-15);
        assert!(ConvexBody::from_parts(s, &[0.0, 0.0], 1.0, vec![(Functional(vec![1.0, 0.0]), -0.1)]).is_err());
        let t = build_body_tiling(&body, 0.8, &small()).unwrap();
        for x in body.domain().samples(500, 2) {
            assert!(t.body_classify(&x).is_some());
        }
    }
}
