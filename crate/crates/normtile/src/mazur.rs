//! The Mazur map `ℓ₂ⁿ → ℓ_qⁿ` and transport of tilings along it.
//!
//! `M(f) = sign(f)·|f|^{2/q}` coordinatewise sends the ℓ₂ sphere and ball
//! onto those of ℓ_q. A uniform homeomorphism `h` with modulus `ω` in both
//! directions carries a tiling with `B(c, ρ) ⊆ T ⊆ B(c, ε)` to one with
//! `B(h(c), ρ′) ⊆ h(T) ⊆ B(h(c), ω(ε))` whenever `ω(ρ′) ≤ ρ`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sampling::Sampler;
use crate::space::{sub, NormedSpace, SpaceError};
use crate::tiling::{Chart, Domain, Membership, Tiling};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MazurError {
    #[error("exponent q = {0} must be at least 1")]
    Exponent(f64),
    #[error("no modulus of continuity is available for q = {0}")]
    NoModulus(f64),
    #[error("no grid value ρ′ > 0 with ω(ρ′) ≤ {0}")]
    Unsatisfiable(f64),
    #[error("source domain {0} is not an ℓ₂ ball or sphere")]
    Domain(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

fn signed_power(f: &[f64], e: f64) -> Vec<f64> {
    f.iter().map(|&v| v.signum() * v.abs().powf(e)).collect()
}

/// `sign(f)·|f|^{2/q}`.
pub fn mazur(f: &[f64], q: f64) -> Vec<f64> {
    signed_power(f, 2.0 / q)
}

/// `sign(g)·|g|^{q/2}`.
pub fn mazur_inverse(g: &[f64], q: f64) -> Vec<f64> {
    signed_power(g, q / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MazurMap {
    pub q: f64,
    pub direction: Direction,
}

impl MazurMap {
    pub fn new(q: f64) -> Result<Self, MazurError> {
        if !(q >= 1.0) {
            return Err(MazurError::Exponent(q));
        }
        Ok(MazurMap { q, direction: Direction::Forward })
    }

    pub fn inverse(self) -> Self {
        let direction = match self.direction {
            Direction::Forward => Direction::Inverse,
            Direction::Inverse => Direction::Forward,
        };
        MazurMap { direction, ..self }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self.direction {
            Direction::Forward => mazur(x, self.q),
            Direction::Inverse => mazur_inverse(x, self.q),
        }
    }
}

/// A bound `ω` with `‖h(x) − h(y)‖ ≤ ω(‖x − y‖)` for a map and its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModulusOfContinuity {
    Identity,
    /// `max(2δ, 2√δ)`, valid for the `q = 1` map on the unit balls.
    MazurL1,
}

/// Spacing of the grid on which `ρ′` is chosen.
pub const RADIUS_GRID: f64 = 1e-6;

impl ModulusOfContinuity {
    pub fn for_exponent(q: f64) -> Result<Self, MazurError> {
        if q == 1.0 {
            Ok(ModulusOfContinuity::MazurL1)
        } else if q == 2.0 {
            Ok(ModulusOfContinuity::Identity)
        } else {
            Err(MazurError::NoModulus(q))
        }
    }

    pub fn eval(&self, d: f64) -> f64 {
        match self {
            ModulusOfContinuity::Identity => d,
            ModulusOfContinuity::MazurL1 => (2.0 * d).max(2.0 * d.sqrt()),
        }
    }

    /// Largest multiple `ρ′` of [`RADIUS_GRID`] with `ω(ρ′) ≤ rho`.
    pub fn inner_radius(&self, rho: f64) -> Result<f64, MazurError> {
        let guess = match self {
            ModulusOfContinuity::Identity => rho,
            ModulusOfContinuity::MazurL1 => (rho / 2.0).min((rho / 2.0).powi(2)),
        };
        let mut k = (guess / RADIUS_GRID + 1e-6).floor() + 1.0;
        while k > 0.0 && self.eval(k * RADIUS_GRID) > rho {
            k -= 1.0;
        }
        if k <= 0.0 {
            return Err(MazurError::Unsatisfiable(rho));
        }
        Ok(k * RADIUS_GRID)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModuliReport {
    pub dim: usize,
    pub pairs: usize,
    pub forward_violations: usize,
    pub inverse_violations: usize,
    /// Largest `‖M(f)−M(g)‖₁ / ‖f−g‖₂` seen.
    pub forward_ratio: f64,
    /// Largest `‖M⁻¹(f)−M⁻¹(g)‖₂ / ‖f−g‖₁^{1/2}` seen.
    pub inverse_ratio: f64,
    pub roundtrip_error: f64,
    pub norm_error: f64,
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
}

impl ModuliReport {
    pub fn passed(&self) -> bool {
        self.forward_violations == 0 && self.inverse_violations == 0 && self.roundtrip_error <= 1e-12
    }
}

/// Random pairs in the ℓ₂ ball for `‖M(f)−M(g)‖₁ ≤ 2‖f−g‖₂` and in the ℓ₁
/// ball for `‖M⁻¹(f)−M⁻¹(g)‖₂ ≤ 2‖f−g‖₁^{1/2}`, half of them close pairs.
/// Also records the round-trip error and the error of `‖M(f)‖₁ = ‖f‖₂²`.
pub fn verify_moduli(dim: usize, pairs: usize, seed: u64) -> Result<ModuliReport, MazurError> {
    let l2 = NormedSpace::euclidean(dim);
    let l1 = NormedSpace::lp(dim, 1.0)?;
    let mut s = Sampler::new(seed);
    let mut rep = ModuliReport {
        dim,
        pairs,
        forward_violations: 0,
        inverse_violations: 0,
        forward_ratio: 0.0,
        inverse_ratio: 0.0,
        roundtrip_error: 0.0,
        norm_error: 0.0,
        witness: None,
    };
    let pair = |s: &mut Sampler, space: &NormedSpace, k: usize| {
        let f = s.unit_ball(space);
        let g = if k.is_multiple_of(2) {
            s.unit_ball(space)
        } else {
            let scale = 10f64.powf(s.uniform(-8.0, -1.0));
            let g = s.ball(space, &f, scale);
            let n = space.norm(&g);
            if n > 1.0 {
                g.iter().map(|v| v / n).collect()
            } else {
                g
            }
        };
        (f, g)
    };
    for k in 0..pairs {
        let (f, g) = pair(&mut s, &l2, k);
        let lhs = l1.norm(&sub(&mazur(&f, 1.0), &mazur(&g, 1.0)));
        let d = l2.norm(&sub(&f, &g));
        if lhs > 2.0 * d + 1e-12 {
            rep.forward_violations += 1;
            rep.witness.get_or_insert((f.clone(), g.clone()));
        }
        if d > 0.0 {
            rep.forward_ratio = rep.forward_ratio.max(lhs / d);
        }
        let back = mazur_inverse(&mazur(&f, 1.0), 1.0);
        rep.roundtrip_error = f.iter().zip(&back).fold(rep.roundtrip_error, |m, (a, b)| m.max((a - b).abs()));
        rep.norm_error = rep.norm_error.max((l1.norm(&mazur(&f, 1.0)) - l2.norm(&f).powi(2)).abs());

        let (f, g) = pair(&mut s, &l1, k);
        let lhs = l2.norm(&sub(&mazur_inverse(&f, 1.0), &mazur_inverse(&g, 1.0)));
        let d = l1.norm(&sub(&f, &g));
        if lhs > 2.0 * d.sqrt() + 1e-12 {
            rep.inverse_violations += 1;
            rep.witness.get_or_insert((f.clone(), g.clone()));
        }
        if d > 0.0 {
            rep.inverse_ratio = rep.inverse_ratio.max(lhs / d.sqrt());
        }
        let back = mazur(&mazur_inverse(&f, 1.0), 1.0);
        rep.roundtrip_error = f.iter().zip(&back).fold(rep.roundtrip_error, |m, (a, b)| m.max((a - b).abs()));
    }
    Ok(rep)
}

/// The image of an ℓ₂ ball or sphere tiling under the Mazur map. Tiles
/// are pulled back through the inverse map; they need not be convex or
/// starshaped.
#[derive(Debug, Clone)]
pub struct TransportedTiling<T> {
    pub source: T,
    pub map: MazurMap,
    pub modulus: ModulusOfContinuity,
    pub space: NormedSpace,
    pub rho_in: f64,
    pub eps_in: f64,
    pub rho: f64,
    pub outer: f64,
}

pub fn transport_tiling<T: Tiling>(
    source: T,
    q: f64,
    rho_in: f64,
    eps_in: f64,
) -> Result<TransportedTiling<T>, MazurError> {
    let map = MazurMap::new(q)?;
    let modulus = ModulusOfContinuity::for_exponent(q)?;
    let dim = source.metric().dim();
    if source.metric() != &NormedSpace::euclidean(dim) {
        return Err(MazurError::Domain(source.metric().kind().label()));
    }
    match source.domain() {
        Domain::Ball { radius: 1.0, .. } => {}
        Domain::Sphere { .. } => {}
        d => return Err(MazurError::Domain(format!("{d:?}"))),
    }
    let rho = modulus.inner_radius(rho_in)?;
    let outer = modulus.eval(eps_in);
    Ok(TransportedTiling { space: NormedSpace::lp(dim, q)?, source, map, modulus, rho_in, eps_in, rho, outer })
}

impl<T: Tiling> TransportedTiling<T> {
    fn pull(&self, y: &[f64]) -> Vec<f64> {
        self.map.inverse().apply(y)
    }
}

impl<T: Tiling> Tiling for TransportedTiling<T> {
    type Id = T::Id;

    fn metric(&self) -> &NormedSpace {
        &self.space
    }

    fn domain(&self) -> Domain {
        match self.source.domain() {
            Domain::Sphere { .. } => Domain::Sphere { space: self.space },
            _ => Domain::Ball { space: self.space, radius: 1.0 },
        }
    }

    fn chart(&self) -> Chart {
        self.source.chart()
    }

    fn classify(&self, y: &[f64]) -> Option<T::Id> {
        self.source.classify(&self.pull(y))
    }

    fn membership(&self, id: T::Id, y: &[f64]) -> Membership {
        self.source.membership(id, &self.pull(y))
    }

    fn tiles_containing(&self, y: &[f64]) -> Vec<(T::Id, Membership)> {
        self.source.tiles_containing(&self.pull(y))
    }

    fn center(&self, id: T::Id) -> Vec<f64> {
        self.map.apply(&self.source.center(id))
    }

    fn inner_radius(&self, _id: T::Id) -> f64 {
        self.rho
    }

    fn outer_radius(&self, _id: T::Id) -> f64 {
        self.outer
    }

    fn tile_ids(&self) -> Option<Vec<T::Id>> {
        self.source.tile_ids()
    }

    fn describe(&self) -> String {
        format!(
            "image under the Mazur map into l{} of [{}]; rho {} -> {}, eps {} -> {}",
            self.map.q,
            self.source.describe(),
            self.rho_in,
            self.rho,
            self.eps_in,
            self.outer
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::BallTiling;
    use proptest::prelude::*;

    #[test]
    fn map_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m = mazur(&[h, -h], 1.0);
        assert!((m[0] - 0.5).abs() < 1e-15 && (m[1] + 0.5).abs() < 1e-15);
        assert_eq!(mazur(&[0.0, 0.0], 1.0), vec![0.0, 0.0]);
        let m = mazur(&[0.6, 0.8], 1.0);
        assert!((m[0] - 0.36).abs() < 1e-15 && (m[1] - 0.64).abs() < 1e-15);
        assert!((m[0] + m[1] - 1.0).abs() < 1e-15);
        let map = MazurMap::new(1.0).unwrap();
        assert_eq!(map.inverse().inverse(), map);
        assert!(MazurMap::new(0.5).is_err());
    }

    #[test]
    fn antipodal_pair() {
        let l1 = NormedSpace::lp(3, 1.0).unwrap();
        let d = l1.norm(&sub(&mazur(&[1.0, 0.0, 0.0], 1.0), &mazur(&[-1.0, 0.0, 0.0], 1.0)));
        assert_eq!(d, 2.0);
        assert!(d <= 2.0 * 2.0);
    }

    #[test]
    fn moduli_hold_on_random_pairs() {
        let rep = verify_moduli(8, 20_000, 3).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.norm_error < 1e-12);
        assert!(rep.forward_ratio <= 2.0 && rep.inverse_ratio <= 2.0);
    }

    #[test]
    fn grid_radius() {
        let w = ModulusOfContinuity::MazurL1;
        let r = w.inner_radius(0.04).unwrap();
        assert!((r - 4e-4).abs() < 1e-15, "{r}");
        assert!(w.eval(r) <= 0.04);
        assert!(w.eval(r + RADIUS_GRID) > 0.04);
        assert_eq!(ModulusOfContinuity::Identity.inner_radius(0.25).unwrap(), 0.25);
        assert!(w.inner_radius(1e-7).is_err());
        assert!((w.eval(0.75) - 3f64.sqrt()).abs() < 1e-15);
        assert!(ModulusOfContinuity::for_exponent(3.0).is_err());
    }

    #[test]
    fn identity_transport_keeps_constants() {
        let s = NormedSpace::euclidean(2);
        let t = BallTiling { space: s, balls: vec![(vec![0.0, 0.0], 1.0)], domain: Domain::Ball { space: s, radius: 1.0 } };
        let tt = transport_tiling(t, 2.0, 0.5, 1.0).unwrap();
        assert_eq!((tt.rho, tt.outer), (0.5, 1.0));
        assert_eq!(tt.center(0), vec![0.0, 0.0]);
        let v = BallTiling { space: s, balls: vec![], domain: Domain::Box { lo: vec![0.0; 2], hi: vec![1.0; 2] } };
        assert!(matches!(transport_tiling(v, 1.0, 0.5, 1.0), Err(MazurError::Domain(_))));
    }

    proptest! {
        #[test]
        fn roundtrip_and_norms(f in proptest::collection::vec(-1.0f64..1.0, 1..10), q in 1.0f64..4.0) {
            let back = mazur_inverse(&mazur(&f, q), q);
            for (a, b) in f.iter().zip(&back) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
            let l2 = NormedSpace::euclidean(f.len());
            let lq = NormedSpace::lp(f.len(), q).unwrap();
            let lhs = lq.norm(&mazur(&f, q));
            prop_assert!((lhs - l2.norm(&f).powf(2.0 / q)).abs() <= 1e-12);
        }
    }
}
