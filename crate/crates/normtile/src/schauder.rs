//! Layered starshaped tiling of ℝⁿ along the standard basis.
//!
//! Write `V_k = span{e_0..e_k}`, `W_k = span{e_m : m > k}`, `P_k` for the
//! head projection onto `V_k` and `Q_k = I − P_k`. Level `k` combines
//!
//! * a starshaped Voronoi tiling `{D_i}` of `V_k` from a `2r`-separated net,
//! * a tiling `{H_j}` of `W_k` lifted from the planar strip system through
//!   the maps `π_j(w) = (e*(w), w*_j(w))`, where `e = e_{k+1}` and the
//!   `w*_j = v*_j ∘ Q_{k+1}` come from a biorthogonal δ-family of `W_{k+1}`.
//!
//! The composite tile `C^k_{i,j}` is `P_k⁻¹(D_i) ∩ Q_k⁻¹(H_j^k) ∩ ⋂_{m>k}
//! Q_m⁻¹(H_0^m)`, with `j ≠ 0` when `k ≥ 1`. Levels run over `0..=K`; the
//! constraints for `m > K` are dropped, which is exact when `K = n − 2`
//! (then `Q_{K+1}` has rank one and `Q_{n−1} = 0`).
//!
//! Distances use the renormed norm `sup_k ‖Q_k x‖`, in which every tail
//! projection has norm one.

use num_rational::Rational64;
use num_traits::{One, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::nets::{
    greedy_biorthogonal_capped, greedy_separated_net, lattice_candidates, BiorthogonalFamily, NetError, Region,
};
use crate::sampling::{quasirandom_sphere, Sampler};
use crate::space::{Functional, NormKind, NormedSpace, SpaceError};
use crate::strip::{HalfPlane, PlaneTile, StripError, StripParams};
use crate::tiling::{Domain, Membership, Tiling};
use crate::verify::CheckOutcome;
use crate::voronoi::VoronoiTiling;

type Q = Rational64;

/// Membership tolerance for the linear constraints.
pub const TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchauderError {
    #[error("depth {depth} too large for dimension {dim} (need depth ≤ dim − 2)")]
    DepthTooLarge { depth: usize, dim: usize },
    #[error("vector is not in W_{level}: a coordinate with index ≤ {level} is nonzero")]
    NotInLevel { level: usize },
    #[error("invalid tile {0}")]
    InvalidTile(String),
    #[error("classification failed: {0}")]
    Classification(String),
    #[error(transparent)]
    Strip(#[from] StripError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// A tile of `W_k`: the central tile, a corner tile `H_j^p` (`j ≥ 1`,
/// `p ∈ 1..=4`), or a translated strip `H_n` (`n ≠ 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum HTile {
    Zero,
    Corner { j: u32, p: u8 },
    Strip { n: i64 },
}

/// Exact constants of the construction: `B(c, r) ⊂ C ⊂ B(c, R)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalityConstants {
    pub r0: Q,
    /// Additive constant of the affine bound `‖h − h_j‖ ≤ A + c‖Qh‖`.
    pub affine: Q,
    pub big_r: Q,
    pub r: Q,
    pub ratio: Q,
    pub params: String,
    pub unconditional: bool,
}

impl NormalityConstants {
    /// With `c = 2` (or `1` for an unconditional basis), half-width `w`
    /// and declared core height `y₀`: `R₀ = w + c·y₀/δ`, `A = w + c`,
    /// `R = 2r + A + c·R₀`.
    pub fn from_params(p: &StripParams<Q>, tag: &str, unconditional: bool) -> Self {
        let c = if unconditional { Q::one() } else { Q::from_integer(2) };
        let r0 = p.halfwidth + c * p.outer_y / p.delta;
        let affine = p.halfwidth + c;
        let big_r = Q::from_integer(2) * p.r + affine + c * r0;
        NormalityConstants { r0, affine, big_r, r: p.r, ratio: big_r / p.r, params: tag.to_string(), unconditional }
    }

    pub fn summary(&self) -> String {
        format!("R0={} R={} R/r={}", self.r0, self.big_r, self.ratio)
    }

    pub fn norm_multiplier(&self) -> f64 {
        if self.unconditional {
            1.0
        } else {
            2.0
        }
    }
}

pub fn normality_constants(preset: &str, unconditional: bool) -> Result<NormalityConstants, SchauderError> {
    Ok(NormalityConstants::from_params(&StripParams::preset(preset)?, preset, unconditional))
}

/// A linear constraint `α·e*(x) + β·f(x) ≤ γ`, where `f` is a lifted family
/// functional (or absent).
#[derive(Debug, Clone, Copy)]
struct Constraint {
    functional: Option<usize>,
    plane: HalfPlane<f64>,
}

/// The tiling `{H_j}` of `W_k`.
#[derive(Debug, Clone)]
pub struct WLevelTiling {
    pub level: usize,
    pub family: BiorthogonalFamily,
    /// `w*_j` on the whole space.
    pub lifted: Vec<Functional>,
    /// `w_j` embedded in the whole space.
    pub vectors: Vec<Vec<f64>>,
    pub params: StripParams<f64>,
    pub unconditional: bool,
    pub tol: f64,
    space: NormedSpace,
    core: Vec<HalfPlane<f64>>,
    corners: Vec<Vec<HalfPlane<f64>>>,
}

fn embed(v: &[f64], offset: usize, dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    out[offset..offset + v.len()].copy_from_slice(v);
    out
}

impl WLevelTiling {
    /// Build level `k` of an `n`-dimensional space: a capped, saturated
    /// biorthogonal δ-family of `W_{k+1}` from `candidates` quasirandom
    /// unit vectors.
    pub fn build(
        space: &NormedSpace,
        level: usize,
        params: StripParams<f64>,
        unconditional: bool,
        family_cap: usize,
        candidates: usize,
        seed: u64,
    ) -> Result<Self, SchauderError> {
        let n = space.dim();
        if level + 2 > n {
            return Err(SchauderError::DepthTooLarge { depth: level, dim: n });
        }
        let tail_dim = n - level - 2;
        let family = if tail_dim == 0 {
            BiorthogonalFamily { vectors: vec![], functionals: vec![], delta: params.delta }
        } else {
            let fs = space.with_dim(tail_dim)?;
            let mut fam =
                greedy_biorthogonal_capped(&fs, params.delta, quasirandom_sphere(&fs, candidates, seed), family_cap)?;
            let probes = quasirandom_sphere(&fs, 4 * candidates, seed.wrapping_add(1));
            fam.saturate(&fs, &probes, family_cap)?;
            fam
        };
        Ok(Self::from_family(space, level, params, unconditional, family))
    }

    pub fn from_family(
        space: &NormedSpace,
        level: usize,
        params: StripParams<f64>,
        unconditional: bool,
        family: BiorthogonalFamily,
    ) -> Self {
        let n = space.dim();
        let offset = level + 2;
        let lifted = family.functionals.iter().map(|f| Functional(embed(&f.0, offset, n))).collect();
        let vectors = family.vectors.iter().map(|v| embed(v, offset, n)).collect();
        let core = params.tile_halfplanes(PlaneTile::U0);
        let corners = PlaneTile::CORNERS.iter().map(|&t| params.tile_halfplanes(t)).collect();
        WLevelTiling { level, family, lifted, vectors, params, unconditional, tol: TOL, space: *space, core, corners }
    }

    pub fn e_index(&self) -> usize {
        self.level + 1
    }

    pub fn len(&self) -> usize {
        self.lifted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lifted.is_empty()
    }

    pub fn space(&self) -> &NormedSpace {
        &self.space
    }

    /// `π_j(x) = (e*(x), w*_j(x))` for the 1-based index `j`.
    pub fn project(&self, j: usize, x: &[f64]) -> (f64, f64) {
        (x[self.e_index()], self.lifted[j - 1].apply(x))
    }

    pub fn validate(&self, h: HTile) -> Result<(), SchauderError> {
        let ok = match h {
            HTile::Zero => true,
            HTile::Corner { j, p } => j >= 1 && (j as usize) <= self.len() && (1..=4).contains(&p),
            HTile::Strip { n } => n != 0,
        };
        if ok {
            Ok(())
        } else {
            Err(SchauderError::InvalidTile(format!("{h:?} at level {}", self.level)))
        }
    }

    fn strip_bounds(&self, centre: f64) -> [Constraint; 2] {
        let w = self.params.halfwidth;
        [
            Constraint { functional: None, plane: HalfPlane { a: 1.0, b: 0.0, c: centre + w } },
            Constraint { functional: None, plane: HalfPlane { a: -1.0, b: 0.0, c: w - centre } },
        ]
    }

    fn constraints(&self, h: HTile) -> Vec<Constraint> {
        fn with(j: usize, planes: &[HalfPlane<f64>]) -> impl Iterator<Item = Constraint> + '_ {
            planes.iter().map(move |&plane| Constraint { functional: Some(j), plane })
        }
        match h {
            HTile::Zero => {
                let mut v: Vec<Constraint> = self.strip_bounds(0.0).to_vec();
                for j in 1..=self.len() {
                    v.extend(with(j, &self.core));
                }
                v
            }
            HTile::Corner { j, p } => {
                let j = j as usize;
                let mut v: Vec<Constraint> = with(j, &self.corners[p as usize - 1]).collect();
                for i in 1..j {
                    v.extend(with(i, &self.core));
                }
                v
            }
            HTile::Strip { n } => self.strip_bounds(self.params.period * n as f64).to_vec(),
        }
    }

    fn value(&self, c: &Constraint, x: &[f64]) -> f64 {
        let f = c.functional.map_or(0.0, |j| self.lifted[j - 1].apply(x));
        c.plane.slack(x[self.e_index()], f)
    }

    /// Membership of `Q_k x` in a tile; only the coordinates above `k` of
    /// `x` are read.
    pub fn membership_of_tail(&self, h: HTile, x: &[f64]) -> Membership {
        let worst = self.constraints(h).iter().map(|c| self.value(c, x)).fold(f64::NEG_INFINITY, f64::max);
        Membership::from_slack(worst, self.tol)
    }

    /// Membership of a vector of `W_k`.
    pub fn h_tile_membership(&self, h: HTile, w: &[f64]) -> Result<Membership, SchauderError> {
        self.validate(h)?;
        if w.len() != self.space.dim() {
            return Err(SpaceError::DimensionMismatch { expected: self.space.dim(), got: w.len() }.into());
        }
        if w[..=self.level].iter().any(|v| v.abs() > 1e-12) {
            return Err(SchauderError::NotInLevel { level: self.level });
        }
        Ok(self.membership_of_tail(h, w))
    }

    fn in_core(&self, j: usize, x: &[f64]) -> bool {
        let (e, f) = self.project(j, x);
        self.core.iter().all(|h| h.slack(e, f) <= self.tol)
    }

    /// Owner of `Q_k x`: a translated strip when `e*(x)` leaves strip 0,
    /// else the corner tile of the first `j` with `π_j(x) ∉ U₀`, else the
    /// central tile.
    pub fn classify_tail(&self, x: &[f64]) -> HTile {
        let e = x[self.e_index()];
        let n = self.params.strip_index(e);
        if n != 0 {
            return HTile::Strip { n };
        }
        for j in 1..=self.len() {
            if !self.in_core(j, x) {
                let (e, f) = self.project(j, x);
                let p = (0..4)
                    .find(|&q| self.corners[q].iter().all(|h| h.slack(e, f) <= self.tol))
                    .map_or(1, |q| q + 1);
                return HTile::Corner { j: j as u32, p: p as u8 };
            }
        }
        HTile::Zero
    }

    /// Every tile containing `Q_k x`.
    pub fn tiles_containing_tail(&self, x: &[f64]) -> Vec<(HTile, Membership)> {
        let mut out = Vec::new();
        let push = |h: HTile, out: &mut Vec<(HTile, Membership)>| {
            let m = self.membership_of_tail(h, x);
            if m.is_inside() {
                out.push((h, m));
            }
        };
        push(HTile::Zero, &mut out);
        for j in 1..=self.len() {
            for p in 1..=4u8 {
                push(HTile::Corner { j: j as u32, p }, &mut out);
            }
            if !self.in_core(j, x) {
                break;
            }
        }
        let e = x[self.e_index()];
        let n0 = (e / self.params.period).floor() as i64;
        for n in n0 - 1..=n0 + 2 {
            if n != 0 {
                push(HTile::Strip { n }, &mut out);
            }
        }
        out
    }

    pub fn centre(&self, h: HTile) -> Vec<f64> {
        let n = self.space.dim();
        let mut c = vec![0.0; n];
        match h {
            HTile::Zero => {}
            HTile::Corner { j, p } => {
                let (sa, sb) = match p {
                    1 => (1.0, 1.0),
                    2 => (1.0, -1.0),
                    3 => (-1.0, 1.0),
                    _ => (-1.0, -1.0),
                };
                for (ci, wi) in c.iter_mut().zip(&self.vectors[j as usize - 1]) {
                    *ci = sb * self.params.b * wi;
                }
                c[self.e_index()] = sa * self.params.a;
            }
            HTile::Strip { n: m } => c[self.e_index()] = self.params.period * m as f64,
        }
        c
    }

    /// Every tile other than translated strips with `|n| > 1`.
    pub fn finite_tiles(&self) -> Vec<HTile> {
        let mut v = vec![HTile::Zero];
        for j in 1..=self.len() as u32 {
            for p in 1..=4 {
                v.push(HTile::Corner { j, p });
            }
        }
        v.push(HTile::Strip { n: 1 });
        v.push(HTile::Strip { n: -1 });
        v
    }

    /// Largest `t` with `base + t·dir` in the (convex) tile.
    pub fn ray_exit(&self, h: HTile, base: &[f64], dir: &[f64]) -> f64 {
        let mut t = f64::INFINITY;
        for c in self.constraints(h) {
            let at0 = self.value(&c, base);
            let rate = self.value(&c, dir) + c.plane.c;
            if rate > 1e-15 {
                t = t.min(-at0 / rate);
            }
        }
        t
    }

    fn tail_norm(&self, x: &[f64]) -> f64 {
        let mut q = x.to_vec();
        for v in q.iter_mut().take(self.level + 2) {
            *v = 0.0;
        }
        self.space.norm(&q)
    }

    /// Probe the four properties of the level tiling: `B(0,1) ⊂ H₀ ⊂
    /// B(0,R₀)`, `‖Q_{k+1}h_j‖ ≤ 1 − r`, `B(h_j, r) ⊂ H_j`, and
    /// `‖h − h_j‖ ≤ A + c‖Q_{k+1}h‖` on `H_j`.
    pub fn w_level_bounds(&self, constants: &NormalityConstants, directions: usize, seed: u64) -> Vec<CheckOutcome> {
        let n = self.space.dim();
        let k = self.level;
        let r = self.params.r;
        let r0 = constants.r0.to_f64().unwrap_or(f64::NAN);
        let affine = constants.affine.to_f64().unwrap_or(f64::NAN);
        let c = constants.norm_multiplier();
        let tol = 1e-9;
        let ws = self.space.with_dim(n - k - 1).expect("level below dimension");
        let mut sampler = Sampler::new(seed);
        let dirs: Vec<Vec<f64>> = (0..directions).map(|_| embed(&sampler.unit_sphere(&ws), k + 1, n)).collect();
        let origin = vec![0.0; n];
        let exits: Vec<(f64, Vec<f64>)> = dirs.iter().map(|u| (self.ray_exit(HTile::Zero, &origin, u), u.clone())).collect();
        let name = |s: &str| format!("level {k}: {s}");
        let mut out = vec![
            CheckOutcome::at_least(&name("unit ball inside H0"), 1.0 - tol, exits.clone()),
            CheckOutcome::at_most(&name("H0 inside B(0, R0)"), r0 + tol, exits),
        ];
        let corners: Vec<HTile> = self.finite_tiles().into_iter().filter(|h| matches!(h, HTile::Corner { .. })).collect();
        out.push(CheckOutcome::at_most(
            &name("tail norm of centres at most 1 - r"),
            1.0 - r + tol,
            corners.iter().map(|&h| {
                let cen = self.centre(h);
                (self.tail_norm(&cen), cen)
            }),
        ));
        let mut inner = Vec::new();
        let mut affine_gap = Vec::new();
        for h in self.finite_tiles().into_iter().filter(|h| *h != HTile::Zero) {
            let cen = self.centre(h);
            for (m, u) in dirs.iter().enumerate() {
                let t = self.ray_exit(h, &cen, u);
                inner.push((t, cen.clone()));
                let reach = if t.is_finite() { t } else { 4.0 * r0 };
                for s in [reach, reach * ((m % 7) as f64 + 0.5) / 7.0] {
                    let x: Vec<f64> = cen.iter().zip(u).map(|(a, b)| a + s * b).collect();
                    let gap = self.space.distance(&x, &cen) - (affine + c * self.tail_norm(&x));
                    affine_gap.push((gap, x));
                }
            }
        }
        out.push(CheckOutcome::at_least(&name("ball of radius r inside each tile"), r - tol, inner));
        out.push(CheckOutcome::at_most(&name("affine outer bound"), tol, affine_gap));
        out
    }
}

/// `(k, h, i)`: level, tile of `W_k`, Voronoi cell of `V_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CompositeId {
    pub k: usize,
    pub h: HTile,
    pub i: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchauderConfig {
    pub space: NormedSpace,
    pub depth: usize,
    pub preset: String,
    pub unconditional: bool,
    pub seed: u64,
    pub region_radius: f64,
    pub family_cap: usize,
    pub candidates: usize,
}

impl SchauderConfig {
    pub fn new(space: NormedSpace, depth: usize, preset: &str) -> Self {
        SchauderConfig {
            space,
            depth,
            preset: preset.to_string(),
            unconditional: false,
            seed: 0,
            region_radius: 10.0,
            family_cap: 64,
            candidates: 4000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SchauderTiling {
    pub config: SchauderConfig,
    pub constants: NormalityConstants,
    pub levels: Vec<WLevelTiling>,
    pub cells: Vec<VoronoiTiling>,
    space: NormedSpace,
    params: StripParams<f64>,
}

/// The renormed version of an ℓ_p space; other norms are returned as is.
pub fn renormed(space: &NormedSpace) -> Result<NormedSpace, SpaceError> {
    match space.kind() {
        NormKind::Lp { p } => NormedSpace::renormed_lp(space.dim(), p),
        _ => Ok(*space),
    }
}

impl SchauderTiling {
    pub fn build(config: SchauderConfig) -> Result<Self, SchauderError> {
        let n = config.space.dim();
        if n < 2 || config.depth + 2 > n {
            return Err(SchauderError::DepthTooLarge { depth: config.depth, dim: n });
        }
        let exact = StripParams::preset(&config.preset)?;
        let constants = NormalityConstants::from_params(&exact, &config.preset, config.unconditional);
        let params = exact.to_f64();
        let space = renormed(&config.space)?;
        let mut levels = Vec::new();
        let mut cells = Vec::new();
        for k in 0..=config.depth {
            let seed = config.seed.wrapping_add(7919 * k as u64);
            levels.push(WLevelTiling::build(
                &space,
                k,
                params.clone(),
                config.unconditional,
                config.family_cap,
                config.candidates,
                seed,
            )?);
            let vs = space.with_dim(k + 1)?;
            let radius = config.region_radius + 4.0 * params.r;
            let cands = lattice_candidates(&vs, radius, 2.0 * params.r);
            let net = greedy_separated_net(&vs, Region::Ball { radius }, 2.0 * params.r, cands, seed)?;
            cells.push(VoronoiTiling::new(vs, net, Domain::Ball { space: vs, radius: config.region_radius }));
        }
        Ok(SchauderTiling { config, constants, levels, cells, space, params })
    }

    pub fn depth(&self) -> usize {
        self.config.depth
    }

    pub fn params(&self) -> &StripParams<f64> {
        &self.params
    }

    pub fn validate(&self, id: CompositeId) -> Result<(), SchauderError> {
        let bad = || SchauderError::InvalidTile(format!("{id:?}"));
        if id.k > self.depth() || id.i >= self.cells[id.k].len() || (id.k >= 1 && id.h == HTile::Zero) {
            return Err(bad());
        }
        self.levels[id.k].validate(id.h)
    }

    fn head<'a>(&self, k: usize, x: &'a [f64]) -> &'a [f64] {
        &x[..=k]
    }

    fn above(&self, k: usize, x: &[f64]) -> Membership {
        (k + 1..=self.depth())
            .map(|m| self.levels[m].membership_of_tail(HTile::Zero, x))
            .fold(Membership::Strict, Membership::and)
    }

    pub fn composite_membership(&self, id: CompositeId, x: &[f64]) -> Result<Membership, SchauderError> {
        self.validate(id)?;
        if x.len() != self.space.dim() {
            return Err(SpaceError::DimensionMismatch { expected: self.space.dim(), got: x.len() }.into());
        }
        let d = self.cells[id.k]
            .star_tile_membership(id.i, self.head(id.k, x))
            .map_err(|e| SchauderError::InvalidTile(e.to_string()))?;
        if !d.is_inside() {
            return Ok(Membership::Outside);
        }
        Ok(d.and(self.levels[id.k].membership_of_tail(id.h, x)).and(self.above(id.k, x)))
    }

    /// Minimal level whose higher levels all hold `x` in their central
    /// tile; then the tile of `Q_k x` and the cell of `P_k x`.
    pub fn composite_classify(&self, x: &[f64]) -> Result<CompositeId, SchauderError> {
        if x.len() != self.space.dim() {
            return Err(SpaceError::DimensionMismatch { expected: self.space.dim(), got: x.len() }.into());
        }
        let k = (1..=self.depth())
            .rev()
            .find(|&m| !self.levels[m].membership_of_tail(HTile::Zero, x).is_inside())
            .unwrap_or(0);
        let h = self.levels[k].classify_tail(x);
        if k >= 1 && h == HTile::Zero {
            return Err(SchauderError::Classification(format!("level {k} central tile chosen above level 0 at {x:?}")));
        }
        let i = self.cells[k].classify(self.head(k, x)).ok_or_else(|| {
            SchauderError::Classification(format!("head projection at level {k} outside the Voronoi net: {x:?}"))
        })?;
        Ok(CompositeId { k, h, i })
    }

    pub fn centre_of(&self, id: CompositeId) -> Vec<f64> {
        let mut c = self.levels[id.k].centre(id.h);
        for (ci, di) in c.iter_mut().zip(&self.cells[id.k].net.centers[id.i]) {
            *ci += di;
        }
        c
    }

    pub fn space(&self) -> &NormedSpace {
        &self.space
    }
}

impl Tiling for SchauderTiling {
    type Id = CompositeId;

    fn metric(&self) -> &NormedSpace {
        &self.space
    }

    fn domain(&self) -> Domain {
        Domain::Ball { space: self.space, radius: self.config.region_radius }
    }

    fn classify(&self, x: &[f64]) -> Option<CompositeId> {
        self.composite_classify(x).ok()
    }

    fn membership(&self, id: CompositeId, x: &[f64]) -> Membership {
        self.composite_membership(id, x).unwrap_or(Membership::Outside)
    }

    fn tiles_containing(&self, x: &[f64]) -> Vec<(CompositeId, Membership)> {
        let mut out = Vec::new();
        for k in 0..=self.depth() {
            let above = self.above(k, x);
            if !above.is_inside() {
                continue;
            }
            let hs: Vec<(HTile, Membership)> = self.levels[k]
                .tiles_containing_tail(x)
                .into_iter()
                .filter(|(h, _)| k == 0 || *h != HTile::Zero)
                .collect();
            if hs.is_empty() {
                continue;
            }
            let cells = self.cells[k].tiles_containing(self.head(k, x));
            for &(h, mh) in &hs {
                for &(i, mi) in &cells {
                    out.push((CompositeId { k, h, i }, above.and(mh).and(mi)));
                }
            }
        }
        out.sort();
        out
    }

    fn center(&self, id: CompositeId) -> Vec<f64> {
        self.centre_of(id)
    }

    fn inner_radius(&self, _id: CompositeId) -> f64 {
        self.params.r
    }

    fn outer_radius(&self, _id: CompositeId) -> f64 {
        self.constants.big_r.to_f64().unwrap_or(f64::INFINITY)
    }

    fn describe(&self) -> String {
        let sizes: Vec<String> = self.levels.iter().zip(&self.cells).map(|(l, c)| format!("{}/{}", l.len(), c.len())).collect();
        format!(
            "layered starshaped tiling of {} (dim {}), depth {}, {} preset{}, family/cell counts per level [{}]",
            self.space.kind().label(),
            self.space.dim(),
            self.depth(),
            self.config.preset,
            if self.config.unconditional { ", unconditional" } else { "" },
            sizes.join(", ")
        )
    }
}
