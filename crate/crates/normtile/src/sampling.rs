//! Seeded random and quasirandom point streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use crate::space::{NormKind, NormedSpace};

/// Seeded pseudorandom sampler for balls, spheres and boxes.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn gaussian_vec(&mut self, dim: usize) -> Vec<f64> {
        (0..dim).map(|_| self.rng.sample(StandardNormal)).collect()
    }

    /// Uniform point of the unit ball of `space`.
    ///
    /// For ℓ_p balls this uses the generalised Gaussian representation:
    /// with `gᵢ` of density ∝ `exp(−|t|^p)` and `W ~ Exp(1)`,
    /// `g / (‖g‖_p^p + W)^{1/p}` is uniform in the ball.
    pub fn unit_ball(&mut self, space: &NormedSpace) -> Vec<f64> {
        let n = space.dim();
        match space.kind() {
            NormKind::Sup => (0..n).map(|_| self.uniform(-1.0, 1.0)).collect(),
            NormKind::Lp { p } | NormKind::RenormedLp { p } => {
                let g = self.generalized_gaussian(n, p);
                let w: f64 = self.rng.sample(Exp1);
                let s: f64 = g.iter().map(|v| v.abs().powf(p)).sum::<f64>() + w;
                let scale = s.powf(-1.0 / p);
                g.iter().map(|v| v * scale).collect()
            }
        }
    }

    /// Point of the unit sphere: normalised Gaussians for ℓ₂, radial
    /// projection of a uniform ball point otherwise (the cone measure).
    pub fn unit_sphere(&mut self, space: &NormedSpace) -> Vec<f64> {
        loop {
            let x = match space.kind() {
                NormKind::Lp { p } | NormKind::RenormedLp { p } if p == 2.0 => {
                    self.gaussian_vec(space.dim())
                }
                _ => self.unit_ball(space),
            };
            if let Ok(u) = space.normalize(&x) {
                return u;
            }
        }
    }

    pub fn ball(&mut self, space: &NormedSpace, center: &[f64], radius: f64) -> Vec<f64> {
        let u = self.unit_ball(space);
        center.iter().zip(&u).map(|(c, v)| c + radius * v).collect()
    }

    pub fn in_box(&mut self, lo: &[f64], hi: &[f64]) -> Vec<f64> {
        lo.iter().zip(hi).map(|(&a, &b)| self.uniform(a, b)).collect()
    }

    fn generalized_gaussian(&mut self, n: usize, p: f64) -> Vec<f64> {
        let gamma = Gamma::new(1.0 / p, 1.0).expect("positive shape");
        (0..n)
            .map(|_| {
                let m: f64 = gamma.sample(&mut self.rng).powf(1.0 / p);
                if self.rng.random_bool(0.5) {
                    m
                } else {
                    -m
                }
            })
            .collect()
    }
}

/// Additive recurrence `frac(s + n·α)` with `αᵢ = φ^{−(i+1)}`, where `φ` is
/// the positive root of `x^{d+1} = x + 1`. The shift `s` comes from the seed.
#[derive(Debug, Clone)]
pub struct Kronecker {
    alpha: Vec<f64>,
    state: Vec<f64>,
}

impl Kronecker {
    pub fn new(dim: usize, seed: u64) -> Self {
        let d = dim as f64;
        let mut phi = 2.0f64;
        for _ in 0..64 {
            phi = (1.0 + phi).powf(1.0 / (d + 1.0));
        }
        let alpha = (0..dim).map(|i| phi.powi(-(i as i32 + 1)).fract()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = (0..dim).map(|_| rng.random::<f64>()).collect();
        Kronecker { alpha, state }
    }

    /// Next point of `[0, 1)^d`.
    pub fn next_unit(&mut self) -> Vec<f64> {
        for (s, a) in self.state.iter_mut().zip(&self.alpha) {
            *s = (*s + a).fract();
        }
        self.state.clone()
    }

    /// Next point of the box `[lo, hi]`.
    pub fn next_in_box(&mut self, lo: &[f64], hi: &[f64]) -> Vec<f64> {
        let u = self.next_unit();
        u.iter().zip(lo.iter().zip(hi)).map(|(t, (a, b))| a + t * (b - a)).collect()
    }
}

/// Quasirandom points of the unit sphere of `space`: cube points kept when
/// they fall in the unit ball (away from the origin), then projected
/// radially.
pub fn quasirandom_sphere(space: &NormedSpace, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let n = space.dim();
    let mut k = Kronecker::new(n, seed);
    let lo = vec![-1.0; n];
    let hi = vec![1.0; n];
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = k.next_in_box(&lo, &hi);
        let r = space.norm(&x);
        if r <= 1.0 && r > 1e-3 {
            out.push(x.iter().map(|v| v / r).collect());
        }
    }
    out
}

/// Quasirandom points of the unit ball of `space`: cube points kept when
/// they fall in the ball.
pub fn quasirandom_ball(space: &NormedSpace, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let n = space.dim();
    let mut k = Kronecker::new(n, seed);
    let lo = vec![-1.0; n];
    let hi = vec![1.0; n];
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = k.next_in_box(&lo, &hi);
        if space.norm(&x) <= 1.0 {
            out.push(x);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_given_seed() {
        let s = NormedSpace::lp(3, 3.0).unwrap();
        let a: Vec<_> = {
            let mut r = Sampler::new(9);
            (0..5).map(|_| r.unit_ball(&s)).collect()
        };
        let b: Vec<_> = {
            let mut r = Sampler::new(9);
            (0..5).map(|_| r.unit_ball(&s)).collect()
        };
        assert_eq!(a, b);
        assert_eq!(quasirandom_sphere(&s, 10, 4), quasirandom_sphere(&s, 10, 4));
    }

    #[test]
    fn ball_and_sphere_points_have_the_right_norm() {
        for s in [
            NormedSpace::euclidean(4),
            NormedSpace::lp(8, 1.0).unwrap(),
            NormedSpace::lp(3, 3.5).unwrap(),
            NormedSpace::sup(3).unwrap(),
        ] {
            let mut r = Sampler::new(1);
            for _ in 0..500 {
                assert!(s.norm(&r.unit_ball(&s)) <= 1.0);
                assert!((s.norm(&r.unit_sphere(&s)) - 1.0).abs() < 1e-12);
            }
            for x in quasirandom_sphere(&s, 200, 2) {
                assert!((s.norm(&x) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ball_sampler_is_uniform_in_radius() {
        // For a uniform point of an n-dimensional ball, P(‖x‖ ≤ t) = tⁿ.
        for s in [NormedSpace::lp(8, 1.0).unwrap(), NormedSpace::lp(3, 1.5).unwrap()] {
            let mut r = Sampler::new(5);
            let m = 20_000;
            let inside = (0..m).filter(|_| s.norm(&r.unit_ball(&s)) <= 0.9).count();
            let expected = 0.9f64.powi(s.dim() as i32);
            assert!((inside as f64 / m as f64 - expected).abs() < 0.015);
        }
    }

    #[test]
    fn kronecker_fills_the_cube_evenly() {
        let mut k = Kronecker::new(2, 0);
        let mut counts = [0usize; 16];
        for _ in 0..16_000 {
            let u = k.next_unit();
            counts[(u[0] * 4.0) as usize * 4 + (u[1] * 4.0) as usize] += 1;
        }
        for c in counts {
            assert!((c as i64 - 1000).abs() < 30, "{counts:?}");
        }
    }
}
