//! Voronoi cells of a separated net in an arbitrary norm, and the
//! starshaped tiles `D_i = closure(V_i \ ⋃_{j<i} V_j)`.
//!
//! In a non-Euclidean norm two cells can share a set with interior (the
//! bisector is "fat"), so the raw cells do not tile. Removing earlier cells
//! fixes that, and the result is starshaped around its centre with
//! `B(d_i, r) ⊂ D_i ⊂ B(d_i, 2r)` for a `2r`-separated maximal net.

use serde::Serialize;
use thiserror::Error;

use crate::nets::{greedy_separated_net, grid_candidates, NetError, Region, SeparatedNet, SEPARATION_SLACK};
use crate::sampling::{Kronecker, Sampler};
use crate::space::NormedSpace;
use crate::tiling::{Domain, Membership, Tiling};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VoronoiError {
    #[error("tile index {index} out of range ({len} tiles)")]
    IndexOutOfRange { index: usize, len: usize },
}

/// Default tolerance for distance comparisons.
pub const TOL: f64 = 1e-9;

/// Tiling of the box `[-h, h]^n` from a greedy `sep`-separated net of the
/// wider box `[-h - 2sep, h + 2sep]^n`. Candidates are the grid of step
/// `sep` followed by quasirandom points at density `(4/sep)^n`, capped at
/// 400 000.
pub fn box_net_tiling(space: NormedSpace, half: f64, sep: f64, seed: u64) -> Result<VoronoiTiling, NetError> {
    let n = space.dim();
    let lo = vec![-half - 2.0 * sep; n];
    let hi = vec![half + 2.0 * sep; n];
    let mut cands = grid_candidates(&lo, &hi, sep);
    let count = ((hi[0] - lo[0]) / (sep / 4.0)).powi(n as i32).min(400_000.0) as usize;
    let mut k = Kronecker::new(n, seed);
    cands.extend((0..count).map(|_| k.next_in_box(&lo, &hi)));
    let net = greedy_separated_net(&space, Region::Box { lo, hi }, sep, cands, seed)?;
    Ok(VoronoiTiling::new(space, net, Domain::Box { lo: vec![-half; n], hi: vec![half; n] }))
}

#[derive(Debug, Clone)]
pub struct VoronoiTiling {
    pub net: SeparatedNet,
    pub space: NormedSpace,
    pub tol: f64,
    domain: Domain,
}

/// A point on a segment towards the centre that left its tile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StarViolation {
    pub sample: Vec<f64>,
    pub t: f64,
}

impl VoronoiTiling {
    /// `domain` is where the tiling is meant to be used; the net should
    /// extend at least two separations beyond it.
    pub fn new(space: NormedSpace, mut net: SeparatedNet, domain: Domain) -> Self {
        if net.index().is_empty() && !net.is_empty() {
            net.reindex();
        }
        VoronoiTiling { net, space, tol: TOL, domain }
    }

    pub fn len(&self) -> usize {
        self.net.len()
    }

    pub fn is_empty(&self) -> bool {
        self.net.is_empty()
    }

    fn check(&self, i: usize) -> Result<(), VoronoiError> {
        if i >= self.len() {
            Err(VoronoiError::IndexOutOfRange { index: i, len: self.len() })
        } else {
            Ok(())
        }
    }

    /// Centres within `tol` of the nearest one, nearest first.
    pub fn nearest(&self, x: &[f64]) -> Vec<(usize, f64)> {
        self.net
            .index()
            .near_ties(x, self.tol, |i| self.space.distance(x, &self.net.centers[i]))
    }

    fn cell_from_ties(&self, i: usize, ties: &[(usize, f64)]) -> Membership {
        if !ties.iter().any(|&(j, _)| j == i) {
            Membership::Outside
        } else if ties.len() == 1 {
            Membership::Strict
        } else {
            Membership::Inside
        }
    }

    /// `V_i = {x : ‖x − d_i‖ ≤ ‖x − d_j‖ for all j}`.
    pub fn voronoi_membership(&self, i: usize, x: &[f64]) -> Result<Membership, VoronoiError> {
        self.check(i)?;
        Ok(self.cell_from_ties(i, &self.nearest(x)))
    }

    /// Whether `x` lies in the interior of `V_j`, given that it lies in
    /// `V_j`: off ties it does; on a tie, every small axis perturbation must
    /// stay in `V_j`.
    fn interior_to(&self, j: usize, x: &[f64], ties: &[(usize, f64)]) -> bool {
        if ties.len() == 1 {
            return true;
        }
        let eta = 1e-6 * (1.0 + self.space.norm(x));
        let mut y = x.to_vec();
        for k in 0..x.len() {
            for s in [-1.0, 1.0] {
                y[k] = x[k] + s * eta;
                let stays = self.cell_from_ties(j, &self.nearest(&y)).is_inside();
                y[k] = x[k];
                if !stays {
                    return false;
                }
            }
        }
        true
    }

    fn star_from_ties(&self, i: usize, x: &[f64], ties: &[(usize, f64)]) -> Membership {
        match self.cell_from_ties(i, ties) {
            Membership::Outside => Membership::Outside,
            Membership::Strict => Membership::Strict,
            Membership::Inside => {
                let blocked = ties
                    .iter()
                    .any(|&(j, _)| j < i && self.interior_to(j, x, ties));
                if blocked {
                    Membership::Outside
                } else {
                    Membership::Inside
                }
            }
        }
    }

    /// Membership in `D_i`: strict when strictly inside `V_i`; inside when
    /// in `V_i` and not interior to any earlier cell.
    pub fn star_tile_membership(&self, i: usize, x: &[f64]) -> Result<Membership, VoronoiError> {
        self.check(i)?;
        let ties = self.nearest(x);
        Ok(self.star_from_ties(i, x, &ties))
    }

    /// Smallest index whose tile contains `x`: the smallest index among the
    /// nearest centres.
    pub fn classify(&self, x: &[f64]) -> Option<usize> {
        self.nearest(x).iter().map(|&(i, _)| i).min()
    }

    /// Points on segments from each sample to `d_i` that fall outside
    /// `D_i`. `segment_points ≥ 2` values of `t` are spread over `[0, 1]`.
    pub fn starshape_probe(
        &self,
        i: usize,
        samples: &[Vec<f64>],
        segment_points: usize,
    ) -> Result<Vec<StarViolation>, VoronoiError> {
        self.check(i)?;
        let d = &self.net.centers[i];
        let m = segment_points.max(2);
        let mut out = Vec::new();
        for x in samples {
            for s in 0..m {
                let t = s as f64 / (m - 1) as f64;
                let y: Vec<f64> = x.iter().zip(d).map(|(a, b)| t * b + (1.0 - t) * a).collect();
                if !self.star_tile_membership(i, &y)?.is_inside() {
                    out.push(StarViolation { sample: x.clone(), t });
                }
            }
        }
        Ok(out)
    }

    /// Rejection samples from `B(d_i, 2r)` that land in `D_i`.
    pub fn samples_in_tile(&self, i: usize, count: usize, seed: u64) -> Result<Vec<Vec<f64>>, VoronoiError> {
        self.check(i)?;
        let mut s = Sampler::new(seed);
        let c = &self.net.centers[i];
        let mut out = Vec::with_capacity(count);
        let mut tries = 0usize;
        while out.len() < count && tries < 1000 * count.max(1) {
            tries += 1;
            let x = s.ball(&self.space, c, self.net.separation);
            if self.star_tile_membership(i, &x)?.is_inside() {
                out.push(x);
            }
        }
        // Keep some boundary points: push a few samples radially out to the
        // edge of the tile.
        let extra = count / 10;
        for k in 0..extra.min(out.len()) {
            let dir: Vec<f64> = out[k].iter().zip(c).map(|(a, b)| a - b).collect();
            let (mut lo, mut hi) = (0.0, 2.0);
            for _ in 0..50 {
                let mid = 0.5 * (lo + hi);
                let y: Vec<f64> = c.iter().zip(&dir).map(|(a, b)| a + mid * b).collect();
                if self.star_tile_membership(i, &y)?.is_inside() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out[k] = c.iter().zip(&dir).map(|(a, b)| a + lo * b).collect();
        }
        Ok(out)
    }
}

impl Tiling for VoronoiTiling {
    type Id = usize;

    fn metric(&self) -> &NormedSpace {
        &self.space
    }

    fn domain(&self) -> Domain {
        self.domain.clone()
    }

    fn classify(&self, x: &[f64]) -> Option<usize> {
        VoronoiTiling::classify(self, x)
    }

    fn membership(&self, id: usize, x: &[f64]) -> Membership {
        self.star_tile_membership(id, x).unwrap_or(Membership::Outside)
    }

    fn tiles_containing(&self, x: &[f64]) -> Vec<(usize, Membership)> {
        let ties = self.nearest(x);
        let mut v: Vec<(usize, Membership)> = ties
            .iter()
            .map(|&(i, _)| (i, self.star_from_ties(i, x, &ties)))
            .filter(|(_, m)| m.is_inside())
            .collect();
        v.sort();
        v
    }

    fn center(&self, id: usize) -> Vec<f64> {
        self.net.centers[id].clone()
    }

    fn inner_radius(&self, _id: usize) -> f64 {
        0.5 * self.net.separation * (1.0 - SEPARATION_SLACK)
    }

    fn outer_radius(&self, _id: usize) -> f64 {
        self.net.separation
    }

    fn tile_ids(&self) -> Option<Vec<usize>> {
        Some((0..self.len()).collect())
    }

    fn describe(&self) -> String {
        format!(
            "starshaped Voronoi tiling, {} cells, separation {}, {}",
            self.len(),
            self.net.separation,
            self.space.kind().label()
        )
    }
}
