//! Finite-dimensional normed spaces.
//!
//! The standard basis of ℝⁿ plays the role of the Schauder basis: the tail
//! projection `Q_k` zeroes coordinates `0..k` and the head projection
//! `P_k = I − Q_k` keeps them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sampling::Sampler;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("exponent p = {0} must be finite and at least 1")]
    InvalidExponent(f64),
    #[error("projection index {k} out of range 0..={dim}")]
    ProjectionOutOfRange { k: usize, dim: usize },
    #[error("the zero vector has no norming functional")]
    ZeroVector,
    #[error("numerical duality map did not converge (residual {residual:e})")]
    NoConvergence { residual: f64 },
    #[error("epsilon = {0} outside (0, 2]")]
    EpsilonOutOfRange(f64),
    #[error("{0} is not uniformly convex")]
    NotUniformlyConvex(String),
    #[error("invalid space preset: {0}")]
    Preset(String),
}

/// Which norm a [`NormedSpace`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "norm_kind", rename_all = "kebab-case")]
pub enum NormKind {
    Lp { p: f64 },
    Sup,
    /// `|x| = max_k ‖Q_k x‖_p`, the renorming that makes every tail
    /// projection a contraction.
    RenormedLp { p: f64 },
}

impl NormKind {
    pub fn exponent(&self) -> Option<f64> {
        match *self {
            NormKind::Lp { p } | NormKind::RenormedLp { p } => Some(p),
            NormKind::Sup => None,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            NormKind::Lp { p } => format!("l{p}"),
            NormKind::Sup => "sup".to_string(),
            NormKind::RenormedLp { p } => format!("renormed-l{p}"),
        }
    }
}

/// A linear functional given by its coefficients; `f(x) = Σ fᵢxᵢ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Functional(pub Vec<f64>);

impl Functional {
    pub fn apply(&self, x: &[f64]) -> f64 {
        dot(&self.0, x)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `f ∘ Q_k`: the functional that ignores coordinates `0..k`.
    pub fn compose_tail(&self, k: usize) -> Functional {
        let mut c = self.0.clone();
        for v in c.iter_mut().take(k) {
            *v = 0.0;
        }
        Functional(c)
    }
}

/// Lower bound or exact value of the modulus of convexity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Modulus {
    pub delta: f64,
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpacePreset", into = "SpacePreset")]
pub struct NormedSpace {
    dim: usize,
    kind: NormKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SpacePreset {
    dim: usize,
    #[serde(flatten)]
    kind: NormKind,
}

impl TryFrom<SpacePreset> for NormedSpace {
    type Error = SpaceError;
    fn try_from(p: SpacePreset) -> Result<Self, SpaceError> {
        NormedSpace::new(p.dim, p.kind)
    }
}

impl From<NormedSpace> for SpacePreset {
    fn from(s: NormedSpace) -> Self {
        SpacePreset { dim: s.dim, kind: s.kind }
    }
}

impl NormedSpace {
    pub fn new(dim: usize, kind: NormKind) -> Result<Self, SpaceError> {
        if dim == 0 {
            return Err(SpaceError::ZeroDimension);
        }
        if let Some(p) = kind.exponent() {
            if !p.is_finite() || p < 1.0 {
                return Err(SpaceError::InvalidExponent(p));
            }
        }
        Ok(NormedSpace { dim, kind })
    }

    pub fn lp(dim: usize, p: f64) -> Result<Self, SpaceError> {
        Self::new(dim, NormKind::Lp { p })
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::new(dim, NormKind::Lp { p: 2.0 }).expect("positive dimension")
    }

    pub fn sup(dim: usize) -> Result<Self, SpaceError> {
        Self::new(dim, NormKind::Sup)
    }

    pub fn renormed_lp(dim: usize, p: f64) -> Result<Self, SpaceError> {
        Self::new(dim, NormKind::RenormedLp { p })
    }

    /// Parse a `{dim, norm_kind, p}` preset.
    pub fn from_json(text: &str) -> Result<Self, SpaceError> {
        serde_json::from_str(text).map_err(|e| SpaceError::Preset(e.to_string()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> NormKind {
        self.kind
    }

    /// Same norm family in another dimension.
    pub fn with_dim(&self, dim: usize) -> Result<Self, SpaceError> {
        Self::new(dim, self.kind)
    }

    fn check_dim(&self, len: usize) -> Result<(), SpaceError> {
        if len != self.dim {
            Err(SpaceError::DimensionMismatch { expected: self.dim, got: len })
        } else {
            Ok(())
        }
    }

    pub fn try_norm(&self, x: &[f64]) -> Result<f64, SpaceError> {
        self.check_dim(x.len())?;
        Ok(self.norm(x))
    }

    /// The norm of `x`. Panics on a dimension mismatch; see [`Self::try_norm`].
    pub fn norm(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim, "vector length does not match space dimension");
        match self.kind {
            NormKind::Lp { p } => lp_norm(x, p),
            NormKind::Sup => sup_norm(x),
            NormKind::RenormedLp { p } => renormed_norm(x, p),
        }
    }

    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        assert_eq!(x.len(), y.len());
        let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.norm(&d)
    }

    /// Dual norm of a functional.
    pub fn dual_norm(&self, f: &Functional) -> f64 {
        assert_eq!(f.dim(), self.dim);
        match self.kind {
            NormKind::Lp { p } | NormKind::RenormedLp { p } => {
                if p == 1.0 {
                    sup_norm(&f.0)
                } else {
                    lp_norm(&f.0, p / (p - 1.0))
                }
            }
            NormKind::Sup => lp_norm(&f.0, 1.0),
        }
    }

    /// `x / ‖x‖`.
    pub fn normalize(&self, x: &[f64]) -> Result<Vec<f64>, SpaceError> {
        let n = self.try_norm(x)?;
        if n == 0.0 {
            return Err(SpaceError::ZeroVector);
        }
        Ok(x.iter().map(|v| v / n).collect())
    }

    pub fn tail_projection(&self, k: usize, x: &[f64]) -> Result<Vec<f64>, SpaceError> {
        self.check_dim(x.len())?;
        if k > self.dim {
            return Err(SpaceError::ProjectionOutOfRange { k, dim: self.dim });
        }
        let mut y = x.to_vec();
        for v in y.iter_mut().take(k) {
            *v = 0.0;
        }
        Ok(y)
    }

    pub fn head_projection(&self, k: usize, x: &[f64]) -> Result<Vec<f64>, SpaceError> {
        let q = self.tail_projection(k, x)?;
        Ok(x.iter().zip(&q).map(|(a, b)| a - b).collect())
    }

    /// A norming functional: dual norm one and `f(x) = ‖x‖`.
    ///
    /// At points where the norm is not smooth (ℓ₁ with zero coordinates,
    /// sup with ties) a fixed subgradient is returned: signs on the support
    /// for ℓ₁, the first maximal coordinate for sup.
    pub fn duality_map(&self, x: &[f64]) -> Result<Functional, SpaceError> {
        self.check_dim(x.len())?;
        if x.iter().all(|&v| v == 0.0) {
            return Err(SpaceError::ZeroVector);
        }
        let f = match self.kind {
            NormKind::Lp { p } => lp_duality(x, p),
            NormKind::Sup => {
                let m = sup_norm(x);
                let i = x.iter().position(|v| v.abs() == m).unwrap();
                let mut c = vec![0.0; self.dim];
                c[i] = x[i].signum();
                c
            }
            NormKind::RenormedLp { p } => {
                let tails = tail_norms(x, p);
                let best = tails.iter().cloned().fold(f64::MIN, f64::max);
                let k = tails.iter().position(|&t| t == best).unwrap();
                let mut y = x.to_vec();
                for v in y.iter_mut().take(k) {
                    *v = 0.0;
                }
                lp_duality(&y, p)
            }
        };
        Ok(Functional(f))
    }

    /// Norming functional from a finite-difference gradient of the norm,
    /// used as an independent route for norms without a closed-form map.
    /// Returns the functional and its residual `|f(x) − ‖x‖| / ‖x‖` after
    /// scaling to dual norm one.
    pub fn numerical_duality_map(&self, x: &[f64]) -> Result<(Functional, f64), SpaceError> {
        const TOL: f64 = 1e-10;
        const MAX_ITER: usize = 10_000;
        self.check_dim(x.len())?;
        let nx = self.norm(x);
        if nx == 0.0 {
            return Err(SpaceError::ZeroVector);
        }
        let mut best: Option<(Functional, f64)> = None;
        let mut h = 1e-3 * nx;
        let mut evals = 0;
        while evals < MAX_ITER && h > 1e-14 * nx {
            let mut g = vec![0.0; self.dim];
            let mut y = x.to_vec();
            for i in 0..self.dim {
                y[i] = x[i] + h;
                let up = self.norm(&y);
                y[i] = x[i] - h;
                let down = self.norm(&y);
                y[i] = x[i];
                g[i] = (up - down) / (2.0 * h);
                evals += 2;
            }
            let f = Functional(g);
            let d = self.dual_norm(&f);
            if d > 0.0 {
                let f = Functional(f.0.iter().map(|v| v / d).collect());
                let res = (f.apply(x) - nx).abs() / nx;
                if best.as_ref().is_none_or(|b| res < b.1) {
                    best = Some((f, res));
                }
                if res <= TOL {
                    break;
                }
            }
            h *= 0.5;
        }
        match best {
            Some((f, res)) if res <= TOL => Ok((f, res)),
            Some((_, res)) => Err(SpaceError::NoConvergence { residual: res }),
            None => Err(SpaceError::NoConvergence { residual: f64::INFINITY }),
        }
    }

    /// Modulus of convexity `δ(ε)`: exact for ℓ₂, otherwise a lower bound.
    ///
    /// For p ≥ 2 the bound is Clarkson's `1 − (1 − (ε/2)^p)^{1/p}`; for
    /// 1 < p < 2 it comes from 2-uniform convexity with constant `p − 1`:
    /// `‖(x+y)/2‖² ≤ 1 − (p−1)‖(x−y)/2‖²` on the unit ball.
    pub fn modulus_of_convexity(&self, eps: f64) -> Result<Modulus, SpaceError> {
        if !(eps > 0.0 && eps <= 2.0) {
            return Err(SpaceError::EpsilonOutOfRange(eps));
        }
        let p = match self.kind {
            NormKind::Sup => return Err(SpaceError::NotUniformlyConvex(self.kind.label())),
            NormKind::Lp { p } | NormKind::RenormedLp { p } => p,
        };
        if p == 1.0 {
            return Err(SpaceError::NotUniformlyConvex(self.kind.label()));
        }
        let m = if p == 2.0 {
            Modulus { delta: 1.0 - (1.0 - eps * eps / 4.0).max(0.0).sqrt(), exact: true }
        } else if p > 2.0 {
            let t = (eps / 2.0).powf(p);
            Modulus { delta: 1.0 - (1.0 - t).max(0.0).powf(1.0 / p), exact: false }
        } else {
            let t = (p - 1.0) * eps * eps / 4.0;
            Modulus { delta: 1.0 - (1.0 - t).max(0.0).sqrt(), exact: false }
        };
        Ok(m)
    }

    /// Sampled estimate of `δ(ε)` from above: the smallest `1 − ‖(x+y)/2‖`
    /// seen over unit pairs at distance exactly `ε`.
    pub fn sampled_modulus(&self, eps: f64, pairs: usize, seed: u64) -> Result<f64, SpaceError> {
        if !(eps > 0.0 && eps <= 2.0) {
            return Err(SpaceError::EpsilonOutOfRange(eps));
        }
        let mut s = Sampler::new(seed);
        let mut best = f64::INFINITY;
        for _ in 0..pairs {
            let x = s.unit_sphere(self);
            let u = s.unit_sphere(self);
            if let Some(y) = self.partner_at_distance(&x, &u, eps) {
                let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
                best = best.min(1.0 - self.norm(&mid));
            }
        }
        Ok(best)
    }

    /// A unit vector `y` on the arc from `x` towards `u` with `‖x − y‖ = ε`.
    fn partner_at_distance(&self, x: &[f64], u: &[f64], eps: f64) -> Option<Vec<f64>> {
        let point = |t: f64| -> Option<Vec<f64>> {
            let v: Vec<f64> = x.iter().zip(u).map(|(a, b)| a + t * b).collect();
            self.normalize(&v).ok()
        };
        let mut hi = 1.0;
        loop {
            let y = point(hi)?;
            if self.distance(x, &y) >= eps {
                break;
            }
            hi *= 2.0;
            if hi > 1e8 {
                return None;
            }
        }
        let mut lo = 0.0;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let y = point(mid)?;
            if self.distance(x, &y) < eps {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        point(hi)
    }
}

fn sup_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        return x.iter().map(|v| v.abs()).sum();
    }
    if p == 2.0 {
        return x.iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    let m = sup_norm(x);
    if m == 0.0 {
        return 0.0;
    }
    m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `‖Q_k x‖_p` for `k = 0..=dim`.
fn tail_norms(x: &[f64], p: f64) -> Vec<f64> {
    (0..=x.len()).map(|k| lp_norm(&x[k..], p)).collect()
}

fn renormed_norm(x: &[f64], p: f64) -> f64 {
    tail_norms(x, p).into_iter().fold(0.0, f64::max)
}

fn lp_duality(x: &[f64], p: f64) -> Vec<f64> {
    if p == 1.0 {
        return x
            .iter()
            .map(|&v| if v == 0.0 { 0.0 } else { v.signum() })
            .collect();
    }
    let n = lp_norm(x, p);
    x.iter()
        .map(|&v| if v == 0.0 { 0.0 } else { v.signum() * (v.abs() / n).powf(p - 1.0) })
        .collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scaled(a: &[f64], t: f64) -> Vec<f64> {
    a.iter().map(|x| x * t).collect()
}

/// `a + t·b`
pub fn axpy(a: &[f64], t: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * y).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn norm_examples() {
        assert_eq!(NormedSpace::euclidean(3).norm(&[3.0, 4.0, 0.0]), 5.0);
        assert_eq!(NormedSpace::lp(2, 1.0).unwrap().norm(&[0.5, -0.5]), 1.0);
        let r = NormedSpace::renormed_lp(2, 2.0).unwrap();
        assert!(close(r.norm(&[1.0, 1.0]), 2f64.sqrt(), 1e-15));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let s = NormedSpace::euclidean(3);
        assert_eq!(
            s.try_norm(&[1.0, 2.0]),
            Err(SpaceError::DimensionMismatch { expected: 3, got: 2 })
        );
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert_eq!(NormedSpace::lp(0, 2.0), Err(SpaceError::ZeroDimension));
        assert_eq!(NormedSpace::lp(2, 0.5), Err(SpaceError::InvalidExponent(0.5)));
        assert!(NormedSpace::lp(2, f64::INFINITY).is_err());
    }

    #[test]
    fn tail_projection_examples() {
        let s = NormedSpace::euclidean(3);
        let x = [1.0, 2.0, 3.0];
        assert_eq!(s.tail_projection(0, &x).unwrap(), x.to_vec());
        assert_eq!(s.tail_projection(3, &x).unwrap(), vec![0.0; 3]);
        assert_eq!(s.tail_projection(1, &x).unwrap(), vec![0.0, 2.0, 3.0]);
        assert_eq!(s.head_projection(1, &x).unwrap(), vec![1.0, 0.0, 0.0]);
        assert_eq!(
            s.tail_projection(4, &x),
            Err(SpaceError::ProjectionOutOfRange { k: 4, dim: 3 })
        );
    }

    #[test]
    fn duality_examples() {
        let f = NormedSpace::euclidean(2).duality_map(&[0.6, 0.8]).unwrap();
        assert!(close(f.0[0], 0.6, 1e-15) && close(f.0[1], 0.8, 1e-15));

        let l3 = NormedSpace::lp(2, 3.0).unwrap();
        let f = l3.duality_map(&[1.0, 1.0]).unwrap();
        let expected = 2f64.powf(-2.0 / 3.0);
        assert!(close(f.0[0], expected, 1e-14) && close(f.0[1], expected, 1e-14));
        assert!(close(f.apply(&[1.0, 1.0]), 2f64.powf(1.0 / 3.0), 1e-14));

        let l1 = NormedSpace::lp(2, 1.0).unwrap();
        assert_eq!(l1.duality_map(&[0.0, -2.0]).unwrap().0, vec![0.0, -1.0]);

        let sup = NormedSpace::sup(3).unwrap();
        assert_eq!(sup.duality_map(&[1.0, -3.0, 3.0]).unwrap().0, vec![0.0, -1.0, 0.0]);

        assert_eq!(
            NormedSpace::euclidean(2).duality_map(&[0.0, 0.0]),
            Err(SpaceError::ZeroVector)
        );
    }

    #[test]
    fn numerical_duality_agrees_with_closed_form() {
        for s in [
            NormedSpace::lp(3, 3.0).unwrap(),
            NormedSpace::lp(3, 1.5).unwrap(),
            NormedSpace::renormed_lp(3, 2.0).unwrap(),
        ] {
            let x = [0.3, -1.2, 0.7];
            let exact = s.duality_map(&x).unwrap();
            let (num, res) = s.numerical_duality_map(&x).unwrap();
            assert!(res <= 1e-10);
            for (a, b) in exact.0.iter().zip(&num.0) {
                assert!(close(*a, *b, 1e-6), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn modulus_examples() {
        let s = NormedSpace::euclidean(2);
        let m = s.modulus_of_convexity(2.0).unwrap();
        assert_eq!(m.delta, 1.0);
        assert!(m.exact);
        let m = s.modulus_of_convexity(1.0).unwrap();
        assert!(close(m.delta, 1.0 - 3f64.sqrt() / 2.0, 1e-15));
        assert!(close(m.delta, 0.133975, 1e-6));
        assert!(s.modulus_of_convexity(1e-9).unwrap().delta < 1e-15);
    }

    #[test]
    fn modulus_brute_force_cross_check_l2() {
        // Direct minimisation of 1 − ‖(x+y)/2‖ over 10⁶ random pairs of the
        // unit disc with ‖x − y‖ ≥ 1.
        let mut s = Sampler::new(11);
        let mut best = f64::INFINITY;
        for _ in 0..1_000_000 {
            let (a, ra) = (s.uniform(0.0, std::f64::consts::TAU), s.uniform(0.0, 1.0).sqrt());
            let (b, rb) = (s.uniform(0.0, std::f64::consts::TAU), s.uniform(0.0, 1.0).sqrt());
            let x = [ra * a.cos(), ra * a.sin()];
            let y = [rb * b.cos(), rb * b.sin()];
            let d = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
            if d >= 1.0 {
                let m = (((x[0] + y[0]) / 2.0).powi(2) + ((x[1] + y[1]) / 2.0).powi(2)).sqrt();
                best = best.min(1.0 - m);
            }
        }
        let exact = 1.0 - 3f64.sqrt() / 2.0;
        assert!(best >= exact - 1e-12);
        assert!(best - exact < 5e-3, "sampled {best} vs {exact}");
    }

    #[test]
    fn modulus_bounds_sit_below_sampled_values() {
        for p in [1.5, 3.0, 4.0] {
            let s = NormedSpace::lp(3, p).unwrap();
            for eps in [0.5, 1.0, 1.6] {
                let lower = s.modulus_of_convexity(eps).unwrap();
                assert!(!lower.exact);
                let upper = s.sampled_modulus(eps, 4000, 3).unwrap();
                assert!(lower.delta <= upper + 1e-9, "p={p} eps={eps}: {} > {upper}", lower.delta);
            }
        }
    }

    #[test]
    fn modulus_errors() {
        assert!(matches!(
            NormedSpace::lp(2, 1.0).unwrap().modulus_of_convexity(1.0),
            Err(SpaceError::NotUniformlyConvex(_))
        ));
        assert!(matches!(
            NormedSpace::sup(2).unwrap().modulus_of_convexity(1.0),
            Err(SpaceError::NotUniformlyConvex(_))
        ));
        let s = NormedSpace::euclidean(2);
        assert_eq!(s.modulus_of_convexity(0.0), Err(SpaceError::EpsilonOutOfRange(0.0)));
        assert_eq!(s.modulus_of_convexity(2.5), Err(SpaceError::EpsilonOutOfRange(2.5)));
    }

    #[test]
    fn presets_round_trip() {
        let s = NormedSpace::from_json(r#"{"dim": 4, "norm_kind": "lp", "p": 3}"#).unwrap();
        assert_eq!(s, NormedSpace::lp(4, 3.0).unwrap());
        let s = NormedSpace::from_json(r#"{"dim": 2, "norm_kind": "sup"}"#).unwrap();
        assert_eq!(s.kind(), NormKind::Sup);
        let r = NormedSpace::renormed_lp(5, 2.0).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(NormedSpace::from_json(&text).unwrap(), r);
        assert!(NormedSpace::from_json(r#"{"dim": 0, "norm_kind": "lp", "p": 2}"#).is_err());
    }

    fn spaces() -> impl Strategy<Value = NormedSpace> {
        prop_oneof![
            (1.0f64..6.0).prop_map(|p| NormedSpace::lp(4, p).unwrap()),
            Just(NormedSpace::sup(4).unwrap()),
            (1.0f64..6.0).prop_map(|p| NormedSpace::renormed_lp(4, p).unwrap()),
        ]
    }

    fn vec4() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-10.0f64..10.0, 4)
    }

    proptest! {
        #[test]
        fn norm_axioms(s in spaces(), x in vec4(), y in vec4(), t in -5.0f64..5.0) {
            let nx = s.norm(&x);
            prop_assert!(nx >= 0.0);
            prop_assert!((s.norm(&scaled(&x, t)) - t.abs() * nx).abs() <= 1e-9 * (1.0 + nx));
            prop_assert!(s.norm(&add(&x, &y)) <= nx + s.norm(&y) + 1e-9);
            prop_assert_eq!(s.norm(&[0.0; 4]), 0.0);
        }

        #[test]
        fn duality_is_norming(s in spaces(), x in vec4(), ys in proptest::collection::vec(vec4(), 20)) {
            prop_assume!(x.iter().any(|v| v.abs() > 1e-6));
            let f = s.duality_map(&x).unwrap();
            prop_assert!((s.dual_norm(&f) - 1.0).abs() <= 1e-10);
            prop_assert!((f.apply(&x) - s.norm(&x)).abs() <= 1e-10 * (1.0 + s.norm(&x)));
            for y in ys {
                prop_assert!(f.apply(&y).abs() <= s.dual_norm(&f) * s.norm(&y) + 1e-9);
            }
        }

        #[test]
        fn renormed_tail_projections_contract(p in 1.0f64..6.0, x in vec4()) {
            let s = NormedSpace::renormed_lp(4, p).unwrap();
            for k in 0..=4 {
                prop_assert!(s.norm(&s.tail_projection(k, &x).unwrap()) <= s.norm(&x) + 1e-12);
            }
        }

        #[test]
        fn modulus_nondecreasing(p in 1.1f64..6.0) {
            let s = NormedSpace::lp(3, p).unwrap();
            let mut prev = 0.0;
            for i in 1..=40 {
                let d = s.modulus_of_convexity(i as f64 * 0.05).unwrap().delta;
                prop_assert!(d >= prev - 1e-15);
                prev = d;
            }
        }
    }
}
