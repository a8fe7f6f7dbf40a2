//! The interface shared by every construction.

use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::sampling::Sampler;
use crate::space::NormedSpace;

/// Closed and strict membership of a point in a tile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    Outside,
    Inside,
    Strict,
}

impl Membership {
    pub fn is_inside(self) -> bool {
        self != Membership::Outside
    }

    pub fn is_strict(self) -> bool {
        self == Membership::Strict
    }

    /// Membership in an intersection.
    pub fn and(self, other: Membership) -> Membership {
        self.min(other)
    }

    /// Membership in `{x : g(x) ≤ 0}` from the value `g(x)`.
    pub fn from_slack(g: f64, tol: f64) -> Membership {
        if g < -tol {
            Membership::Strict
        } else if g <= tol {
            Membership::Inside
        } else {
            Membership::Outside
        }
    }
}

/// The set a tiling claims to cover, with its sampler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Domain {
    Ball { space: NormedSpace, radius: f64 },
    Sphere { space: NormedSpace },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// The unit ball cut by half-spaces `a·x ≤ b`; must contain 0.
    CutBall { space: NormedSpace, halfspaces: Vec<(Vec<f64>, f64)> },
}

impl Domain {
    pub fn sample(&self, s: &mut Sampler) -> Vec<f64> {
        match self {
            Domain::Ball { space, radius } => s.ball(space, &vec![0.0; space.dim()], *radius),
            Domain::Sphere { space } => s.unit_sphere(space),
            Domain::Box { lo, hi } => s.in_box(lo, hi),
            Domain::CutBall { space, halfspaces } => loop {
                let x = s.unit_ball(space);
                if halfspaces.iter().all(|(a, b)| crate::space::dot(a, &x) <= *b) {
                    break x;
                }
            },
        }
    }

    pub fn samples(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut s = Sampler::new(seed);
        (0..count).map(|_| self.sample(&mut s)).collect()
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Ball { space, .. } | Domain::Sphere { space } | Domain::CutBall { space, .. } => space.dim(),
            Domain::Box { lo, .. } => lo.len(),
        }
    }
}

/// How inner-ball probes are placed: in the ambient space, or on the unit
/// sphere by radial renormalisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    Flat,
    Sphere,
}

pub trait Tiling: Sync {
    type Id: Copy + Eq + Ord + Hash + Debug + Send + Sync + Serialize;

    /// Norm used for all radii.
    fn metric(&self) -> &NormedSpace;
    fn domain(&self) -> Domain;
    fn chart(&self) -> Chart {
        Chart::Flat
    }
    /// The deterministic owner of `x`, or `None` when no tile contains it.
    fn classify(&self, x: &[f64]) -> Option<Self::Id>;
    fn membership(&self, id: Self::Id, x: &[f64]) -> Membership;
    /// Every tile containing `x` (closed membership), found independently
    /// of [`Tiling::classify`].
    fn tiles_containing(&self, x: &[f64]) -> Vec<(Self::Id, Membership)>;
    fn center(&self, id: Self::Id) -> Vec<f64>;
    fn inner_radius(&self, id: Self::Id) -> f64;
    fn outer_radius(&self, id: Self::Id) -> f64;
    /// All tile ids, when the tiling is small enough to enumerate.
    fn tile_ids(&self) -> Option<Vec<Self::Id>> {
        None
    }
    fn describe(&self) -> String;
}

/// Closed balls in a normed space, ordered; the first containing ball owns
/// a point. A tiling only when the balls happen to form one, which makes it
/// handy for negative controls.
#[derive(Debug, Clone)]
pub struct BallTiling {
    pub space: NormedSpace,
    pub balls: Vec<(Vec<f64>, f64)>,
    pub domain: Domain,
}

impl Tiling for BallTiling {
    type Id = usize;

    fn metric(&self) -> &NormedSpace {
        &self.space
    }

    fn domain(&self) -> Domain {
        self.domain.clone()
    }

    fn classify(&self, x: &[f64]) -> Option<usize> {
        (0..self.balls.len()).find(|&i| self.membership(i, x).is_inside())
    }

    fn membership(&self, id: usize, x: &[f64]) -> Membership {
        let (c, r) = &self.balls[id];
        Membership::from_slack(self.space.distance(x, c) - r, 1e-12)
    }

    fn tiles_containing(&self, x: &[f64]) -> Vec<(usize, Membership)> {
        (0..self.balls.len())
            .map(|i| (i, self.membership(i, x)))
            .filter(|(_, m)| m.is_inside())
            .collect()
    }

    fn center(&self, id: usize) -> Vec<f64> {
        self.balls[id].0.clone()
    }

    fn inner_radius(&self, id: usize) -> f64 {
        self.balls[id].1
    }

    fn outer_radius(&self, id: usize) -> f64 {
        self.balls[id].1
    }

    fn tile_ids(&self) -> Option<Vec<usize>> {
        Some((0..self.balls.len()).collect())
    }

    fn describe(&self) -> String {
        format!("{} balls", self.balls.len())
    }
}

/// A tiling with one tile removed.
#[derive(Debug, Clone)]
pub struct WithoutTile<'a, T: Tiling> {
    pub inner: &'a T,
    pub removed: T::Id,
}

impl<T: Tiling> Tiling for WithoutTile<'_, T> {
    type Id = T::Id;

    fn metric(&self) -> &NormedSpace {
        self.inner.metric()
    }

    fn domain(&self) -> Domain {
        self.inner.domain()
    }

    fn chart(&self) -> Chart {
        self.inner.chart()
    }

    fn classify(&self, x: &[f64]) -> Option<T::Id> {
        self.tiles_containing(x).first().map(|(id, _)| *id)
    }

    fn membership(&self, id: T::Id, x: &[f64]) -> Membership {
        if id == self.removed {
            Membership::Outside
        } else {
            self.inner.membership(id, x)
        }
    }

    fn tiles_containing(&self, x: &[f64]) -> Vec<(T::Id, Membership)> {
        let mut v = self.inner.tiles_containing(x);
        v.retain(|(id, _)| *id != self.removed);
        v.sort();
        v
    }

    fn center(&self, id: T::Id) -> Vec<f64> {
        self.inner.center(id)
    }

    fn inner_radius(&self, id: T::Id) -> f64 {
        self.inner.inner_radius(id)
    }

    fn outer_radius(&self, id: T::Id) -> f64 {
        self.inner.outer_radius(id)
    }

    fn tile_ids(&self) -> Option<Vec<T::Id>> {
        self.inner
            .tile_ids()
            .map(|v| v.into_iter().filter(|id| *id != self.removed).collect())
    }

    fn describe(&self) -> String {
        format!("{} without tile {:?}", self.inner.describe(), self.removed)
    }
}
