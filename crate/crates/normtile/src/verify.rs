//! Sampling-based certification of any [`Tiling`].
//!
//! Coverage and disjointness are checked on seeded samples of the tiling's
//! domain. Inner radii are checked adversarially with directional probes at
//! the claimed radius; outer radii are observational (largest distance from
//! a tile centre to a sample it owns). Work is spread over a rayon pool
//! whose size is capped by the `TILE_THREADS` environment variable.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::sampling::Sampler;
use crate::space::NormedSpace;
use crate::tiling::{BallTiling, Chart, Domain, Tiling, WithoutTile};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Ratios `R/r` quoted for comparison in every report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceConstants {
    pub preiss: f64,
    pub fig1: f64,
    pub fig2: f64,
    pub unconditional: f64,
}

pub const REFERENCE_CONSTANTS: ReferenceConstants =
    ReferenceConstants { preiss: 15.0, fig1: 290.0, fig2: 148.0, unconditional: 68.0 };

/// One named numeric check: `worst` is compared against `bound`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub probes: usize,
    pub worst: f64,
    pub bound: f64,
    pub witness: Option<Vec<f64>>,
}

impl CheckOutcome {
    /// Passes when every value is at most `bound`.
    pub fn at_most(name: &str, bound: f64, items: impl IntoIterator<Item = (f64, Vec<f64>)>) -> Self {
        Self::extreme(name, bound, items, true)
    }

    /// Passes when every value is at least `bound`.
    pub fn at_least(name: &str, bound: f64, items: impl IntoIterator<Item = (f64, Vec<f64>)>) -> Self {
        Self::extreme(name, bound, items, false)
    }

    fn extreme(name: &str, bound: f64, items: impl IntoIterator<Item = (f64, Vec<f64>)>, upper: bool) -> Self {
        let mut probes = 0;
        let mut worst = if upper { f64::NEG_INFINITY } else { f64::INFINITY };
        let mut worst_point = None;
        for (v, p) in items {
            probes += 1;
            let beats = if upper { v > worst } else { v < worst };
            if beats || v.is_nan() {
                worst = v;
                worst_point = Some(p);
            }
        }
        let passed = if upper { worst <= bound } else { worst >= bound };
        CheckOutcome {
            name: name.to_string(),
            passed,
            probes,
            worst,
            bound,
            witness: if passed { None } else { worst_point },
        }
    }

    /// A yes/no check.
    pub fn flag(name: &str, passed: bool, witness: Option<Vec<f64>>) -> Self {
        CheckOutcome {
            name: name.to_string(),
            passed,
            probes: 1,
            worst: if passed { 0.0 } else { 1.0 },
            bound: 0.0,
            witness: if passed { None } else { witness },
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: worst {:.6e} vs bound {:.6e} over {} probes",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.worst,
            self.bound,
            self.probes
        )
    }
}

/// Run `f` on a pool sized by `TILE_THREADS` (all cores when unset).
pub fn with_pool<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let threads = std::env::var("TILE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0);
    match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        None => f(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coverage {
    pub samples: usize,
    pub covered: usize,
    pub fraction: f64,
    /// Up to ten unclassified samples.
    pub uncovered: Vec<Vec<f64>>,
}

pub fn check_coverage<T: Tiling>(t: &T, samples: &[Vec<f64>]) -> Coverage {
    let misses: Vec<usize> = samples
        .par_iter()
        .enumerate()
        .filter(|(_, x)| t.classify(x).is_none())
        .map(|(i, _)| i)
        .collect();
    let covered = samples.len() - misses.len();
    Coverage {
        samples: samples.len(),
        covered,
        fraction: if samples.is_empty() { 1.0 } else { covered as f64 / samples.len() as f64 },
        uncovered: misses.iter().take(10).map(|&i| samples[i].clone()).collect(),
    }
}

/// A sample in the interior of two or more tiles, or whose owner does not
/// list it as contained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub point: Vec<f64>,
    pub tiles: Vec<String>,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    DoubleStrict,
    OwnerMismatch,
}

pub fn check_disjoint_interiors<T: Tiling>(t: &T, samples: &[Vec<f64>]) -> Vec<Violation> {
    samples
        .par_iter()
        .filter_map(|x| {
            let hits = t.tiles_containing(x);
            let strict: Vec<String> = hits
                .iter()
                .filter(|(_, m)| m.is_strict())
                .map(|(id, _)| format!("{id:?}"))
                .collect();
            if strict.len() >= 2 {
                return Some(Violation { point: x.clone(), tiles: strict, kind: ViolationKind::DoubleStrict });
            }
            let owner = t.classify(x)?;
            if !hits.iter().any(|(id, _)| *id == owner) {
                return Some(Violation {
                    point: x.clone(),
                    tiles: vec![format!("{owner:?}")],
                    kind: ViolationKind::OwnerMismatch,
                });
            }
            None
        })
        .collect()
}

/// Per-tile radius certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TileCertificate {
    pub id: String,
    pub center: Vec<f64>,
    pub claimed_inner: f64,
    pub claimed_outer: f64,
    pub samples: usize,
    /// Largest distance from the centre to an owned sample.
    pub observed_outer: f64,
    pub inner_probes: usize,
    pub inner_failures: usize,
    /// Smallest radius, along a failing direction, at which the tile was
    /// left.
    pub min_failing_radius: Option<f64>,
    pub inner_ok: bool,
    pub outer_ok: bool,
    pub witness: Option<Vec<f64>>,
}

/// Probe point at distance `s` from `c` in direction `u`, in the tiling's
/// chart. On the sphere chart the point is renormalised, and `s` is tuned
/// by bisection so that the distance to `c` is exactly `target`.
fn chart_probe<T: Tiling>(t: &T, c: &[f64], u: &[f64], target: f64) -> Option<Vec<f64>> {
    let space = t.metric();
    let flat = |s: f64| c.iter().zip(u).map(|(a, b)| a + s * b).collect::<Vec<f64>>();
    match t.chart() {
        Chart::Flat => Some(flat(target)),
        Chart::Sphere => {
            let on_sphere = |s: f64| space.normalize(&flat(s)).ok();
            let dist = |s: f64| on_sphere(s).map(|x| space.distance(&x, c));
            let (mut lo, mut hi) = (0.0, 0.9 * target);
            while dist(hi)? < target {
                hi *= 2.0;
                if hi > 4.0 {
                    return None;
                }
            }
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if dist(mid)? < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            on_sphere(lo)
        }
    }
}

/// Failing directions per tile whose exit radius is located; the reported
/// minimum failing radius is taken over these.
const EXIT_SEARCHES: usize = 8;

fn exit_radius<T: Tiling>(t: &T, id: T::Id, c: &[f64], u: &[f64], hi: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, hi);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        match chart_probe(t, c, u, mid) {
            Some(x) if t.membership(id, &x).is_inside() => lo = mid,
            _ => hi = mid,
        }
    }
    lo
}

fn certify_tile<T: Tiling>(
    t: &T,
    id: T::Id,
    owned: &[&Vec<f64>],
    directions: usize,
    tol: f64,
    seed: u64,
) -> TileCertificate {
    let space = t.metric();
    let c = t.center(id);
    let r = t.inner_radius(id);
    let big_r = t.outer_radius(id);
    let mut observed_outer = 0.0f64;
    let mut outer_witness = None;
    for x in owned {
        let d = space.distance(x, &c);
        if d > observed_outer {
            observed_outer = d;
            outer_witness = Some((*x).clone());
        }
    }
    let mut sampler = Sampler::new(seed);
    let target = (r - tol).max(0.0);
    let mut failures = 0;
    let mut min_fail: Option<f64> = None;
    let mut inner_witness = None;
    let mut probes = 0;
    for _ in 0..directions {
        let u = sampler.unit_sphere(space);
        let Some(x) = chart_probe(t, &c, &u, target) else { continue };
        probes += 1;
        if !t.membership(id, &x).is_inside() {
            failures += 1;
            if failures > EXIT_SEARCHES {
                continue;
            }
            let e = exit_radius(t, id, &c, &u, target);
            if min_fail.is_none_or(|m| e < m) {
                min_fail = Some(e);
                inner_witness = Some(x);
            }
        }
    }
    let inner_ok = failures == 0;
    let outer_ok = observed_outer <= big_r + tol;
    TileCertificate {
        id: format!("{id:?}"),
        center: c,
        claimed_inner: r,
        claimed_outer: big_r,
        samples: owned.len(),
        observed_outer,
        inner_probes: probes,
        inner_failures: failures,
        min_failing_radius: min_fail,
        inner_ok,
        outer_ok,
        witness: if !inner_ok { inner_witness } else if !outer_ok { outer_witness } else { None },
    }
}

/// Classify every sample, then certify each tile: the enumerable ones when
/// the tiling lists its tiles, otherwise every tile that owns a sample.
pub fn certify_radii<T: Tiling>(
    t: &T,
    samples: &[Vec<f64>],
    directions: usize,
    tol: f64,
    seed: u64,
) -> Vec<TileCertificate> {
    let owners: Vec<Option<T::Id>> = samples.par_iter().map(|x| t.classify(x)).collect();
    let mut groups: BTreeMap<T::Id, Vec<&Vec<f64>>> = BTreeMap::new();
    if let Some(ids) = t.tile_ids() {
        for id in ids {
            groups.entry(id).or_default();
        }
    }
    for (x, o) in samples.iter().zip(&owners) {
        if let Some(id) = o {
            groups.entry(*id).or_default().push(x);
        }
    }
    let groups: Vec<(T::Id, Vec<&Vec<f64>>)> = groups.into_iter().collect();
    groups
        .par_iter()
        .enumerate()
        .map(|(k, (id, owned))| certify_tile(t, *id, owned, directions, tol, seed ^ (0x9e37_79b9 + k as u64)))
        .collect()
}

/// Segment probes from each owned sample back to its tile's centre.
pub fn check_starshaped<T: Tiling>(t: &T, samples: &[Vec<f64>], segment_points: usize) -> CheckOutcome {
    let m = segment_points.max(2);
    let results: Vec<(f64, Vec<f64>)> = samples
        .par_iter()
        .filter_map(|x| {
            let id = t.classify(x)?;
            let c = t.center(id);
            let mut bad = 0.0;
            let mut witness = x.clone();
            for s in 0..m {
                let lambda = s as f64 / (m - 1) as f64;
                let y: Vec<f64> = c.iter().zip(x).map(|(a, b)| a + lambda * (b - a)).collect();
                if !t.membership(id, &y).is_inside() {
                    bad += 1.0;
                    witness = y;
                }
            }
            Some((bad, witness))
        })
        .collect();
    let mut out = CheckOutcome::at_most("starshaped segments", 0.0, results);
    out.probes *= m;
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub samples: usize,
    pub seed: u64,
    pub directions: usize,
    pub tol: f64,
    /// Points per segment for the starshapedness check; 0 skips it.
    pub segment_points: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { samples: 10_000, seed: 0, directions: 100, tol: DEFAULT_TOL, segment_points: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub version: u32,
    pub tiling: String,
    pub metric: String,
    pub chart: Chart,
    pub seed: u64,
    pub samples: usize,
    pub coverage: f64,
    pub uncovered: Vec<Vec<f64>>,
    pub violations: Vec<Violation>,
    pub tiles: Vec<TileCertificate>,
    pub inner_certified: bool,
    pub outer_certified: bool,
    /// Largest observed outer distance over the smallest certified inner
    /// radius.
    pub achieved_ratio: Option<f64>,
    /// Largest claimed outer radius over the smallest claimed inner radius.
    pub claimed_ratio: Option<f64>,
    pub starshaped: Option<CheckOutcome>,
    /// Construction-specific checks appended by the caller.
    pub checks: Vec<CheckOutcome>,
    pub constants: ReferenceConstants,
    pub passed: bool,
    pub wall_clock_ms: u64,
}

impl VerificationReport {
    pub fn push_check(&mut self, c: CheckOutcome) {
        self.passed &= c.passed;
        self.checks.push(c);
    }

    /// Report JSON without the wall-clock field, for reproducibility checks.
    pub fn canonical_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serialises");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("wall_clock_ms");
        }
        v.to_string()
    }

    pub fn summary(&self) -> String {
        let ratio = |r: Option<f64>| r.map_or("n/a".to_string(), |v| format!("{v:.3}"));
        format!(
            "{}: coverage {:.4}, {} violations, {} tiles certified (inner {}, outer {}), achieved R/r {} (claimed {}; reference fig1 {} fig2 {} unconditional {} preiss {})",
            if self.passed { "ok" } else { "FAILED" },
            self.coverage,
            self.violations.len(),
            self.tiles.len(),
            self.inner_certified,
            self.outer_certified,
            ratio(self.achieved_ratio),
            ratio(self.claimed_ratio),
            self.constants.fig1,
            self.constants.fig2,
            self.constants.unconditional,
            self.constants.preiss
        )
    }
}

/// Coverage, disjointness, radius and (optionally) starshapedness checks on
/// `cfg.samples` samples of the tiling's domain.
pub fn verify_tiling<T: Tiling>(t: &T, cfg: &VerifyConfig) -> VerificationReport {
    let start = Instant::now();
    let samples = t.domain().samples(cfg.samples, cfg.seed);
    verify_on_samples(t, &samples, cfg, start)
}

pub fn verify_on_samples<T: Tiling>(t: &T, samples: &[Vec<f64>], cfg: &VerifyConfig, start: Instant) -> VerificationReport {
    with_pool(|| {
        let coverage = check_coverage(t, samples);
        let violations = check_disjoint_interiors(t, samples);
        let tiles = certify_radii(t, samples, cfg.directions, cfg.tol, cfg.seed);
        let starshaped = (cfg.segment_points > 0).then(|| check_starshaped(t, samples, cfg.segment_points));
        let inner_certified = tiles.iter().all(|c| c.inner_ok);
        let outer_certified = tiles.iter().all(|c| c.outer_ok);
        let min_inner = tiles.iter().map(|c| c.claimed_inner).fold(f64::INFINITY, f64::min);
        let max_observed = tiles.iter().map(|c| c.observed_outer).fold(0.0, f64::max);
        let max_claimed = tiles.iter().map(|c| c.claimed_outer).fold(0.0, f64::max);
        let achieved_ratio = (inner_certified && min_inner > 0.0 && !tiles.is_empty()).then(|| max_observed / min_inner);
        let claimed_ratio = (min_inner > 0.0 && !tiles.is_empty()).then(|| max_claimed / min_inner);
        let passed = coverage.covered == coverage.samples
            && violations.is_empty()
            && inner_certified
            && outer_certified
            && starshaped.as_ref().is_none_or(|s| s.passed);
        VerificationReport {
            version: 1,
            tiling: t.describe(),
            metric: t.metric().kind().label(),
            chart: t.chart(),
            seed: cfg.seed,
            samples: samples.len(),
            coverage: coverage.fraction,
            uncovered: coverage.uncovered,
            violations,
            tiles,
            inner_certified,
            outer_certified,
            achieved_ratio,
            claimed_ratio,
            starshaped,
            checks: Vec::new(),
            constants: REFERENCE_CONSTANTS,
            passed,
            wall_clock_ms: start.elapsed().as_millis() as u64,
        }
    })
}

/// The harness on two broken tilings of `[-1, 1]`: two half-intervals with
/// one removed, which must lose coverage, and two overlapping balls, which
/// must show double-strict points.
pub fn negative_controls(samples: usize, seed: u64) -> Vec<CheckOutcome> {
    let space = NormedSpace::euclidean(1);
    let domain = Domain::Ball { space, radius: 1.0 };
    let points = domain.samples(samples, seed);
    let halves = BallTiling { space, balls: vec![(vec![-0.5], 0.5), (vec![0.5], 0.5)], domain: domain.clone() };
    let coverage = check_coverage(&WithoutTile { inner: &halves, removed: 1 }, &points);
    let overlap = BallTiling { space, balls: vec![(vec![-0.4], 0.6), (vec![0.4], 0.6)], domain };
    let violations = check_disjoint_interiors(&overlap, &points);
    vec![
        CheckOutcome::flag(
            "control: deleted tile loses coverage",
            coverage.covered < coverage.samples,
            coverage.uncovered.first().cloned(),
        ),
        CheckOutcome::flag(
            "control: overlapping balls are flagged",
            !violations.is_empty(),
            violations.first().map(|v| v.point.clone()),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_halves() -> BallTiling {
        // Two unit sup-norm balls tile the box [−2, 2] × [−1, 1].
        let s = NormedSpace::sup(2).unwrap();
        BallTiling {
            space: s,
            balls: vec![(vec![-1.0, 0.0], 1.0), (vec![1.0, 0.0], 1.0)],
            domain: Domain::Box { lo: vec![-2.0, -1.0], hi: vec![2.0, 1.0] },
        }
    }

    #[test]
    fn a_genuine_tiling_passes() {
        let t = two_halves();
        let r = verify_tiling(&t, &VerifyConfig { samples: 2000, seed: 1, directions: 50, tol: 1e-9, segment_points: 5 });
        assert!(r.passed, "{}", r.summary());
        assert_eq!(r.coverage, 1.0);
        assert_eq!(r.achieved_ratio.map(|v| v <= 1.0 + 1e-9), Some(true));
        assert_eq!(r.claimed_ratio, Some(1.0));
    }

    #[test]
    fn deleting_a_tile_leaves_a_hole() {
        let t = two_halves();
        let w = WithoutTile { inner: &t, removed: 1 };
        let samples = t.domain().samples(2000, 2);
        let c = check_coverage(&w, &samples);
        assert!(c.fraction < 1.0);
        assert!(c.uncovered.iter().all(|x| x[0] >= 0.0));
    }

    #[test]
    fn overlapping_balls_are_caught() {
        let s = NormedSpace::euclidean(2);
        let t = BallTiling {
            space: s,
            balls: vec![(vec![-0.3, 0.0], 1.0), (vec![0.3, 0.0], 1.0)],
            domain: Domain::Ball { space: s, radius: 1.0 },
        };
        let samples = t.domain().samples(2000, 3);
        assert!(!check_disjoint_interiors(&t, &samples).is_empty());
        let disjoint = BallTiling {
            space: s,
            balls: vec![(vec![-2.0, 0.0], 1.0), (vec![2.0, 0.0], 1.0)],
            domain: Domain::Box { lo: vec![-3.0, -1.0], hi: vec![3.0, 1.0] },
        };
        assert!(check_disjoint_interiors(&disjoint, &disjoint.domain().samples(2000, 3)).is_empty());
    }

    #[test]
    fn shrunken_claims_fail_the_inner_probe() {
        let mut t = two_halves();
        t.balls[0].1 = 1.0;
        let samples = t.domain().samples(500, 4);
        let certs = certify_radii(&t, &samples, 50, 1e-9, 4);
        assert!(certs.iter().all(|c| c.inner_ok && c.observed_outer <= 1.0 + 1e-9));
        // A fake tile claiming a larger inner ball than it has.
        struct Liar(BallTiling);
        impl Tiling for Liar {
            type Id = usize;
            fn metric(&self) -> &NormedSpace {
                self.0.metric()
            }
            fn domain(&self) -> Domain {
                self.0.domain()
            }
            fn classify(&self, x: &[f64]) -> Option<usize> {
                self.0.classify(x)
            }
            fn membership(&self, id: usize, x: &[f64]) -> crate::tiling::Membership {
                self.0.membership(id, x)
            }
            fn tiles_containing(&self, x: &[f64]) -> Vec<(usize, crate::tiling::Membership)> {
                self.0.tiles_containing(x)
            }
            fn center(&self, id: usize) -> Vec<f64> {
                self.0.center(id)
            }
            fn inner_radius(&self, _: usize) -> f64 {
                1.5
            }
            fn outer_radius(&self, _: usize) -> f64 {
                1.5
            }
            fn tile_ids(&self) -> Option<Vec<usize>> {
                self.0.tile_ids()
            }
            fn describe(&self) -> String {
                "liar".into()
            }
        }
        let certs = certify_radii(&Liar(t), &samples, 50, 1e-9, 4);
        let c = &certs[0];
        assert!(!c.inner_ok);
        let m = c.min_failing_radius.unwrap();
        assert!((m - 1.0).abs() < 1e-6, "{m}");
    }

    #[test]
    fn reports_are_reproducible() {
        let t = two_halves();
        let cfg = VerifyConfig { samples: 500, seed: 7, directions: 20, tol: 1e-9, segment_points: 3 };
        assert_eq!(verify_tiling(&t, &cfg).canonical_json(), verify_tiling(&t, &cfg).canonical_json());
    }

    #[test]
    fn check_outcomes() {
        let c = CheckOutcome::at_most("x", 1.0, vec![(0.5, vec![0.0]), (2.0, vec![1.0])]);
        assert!(!c.passed);
        assert_eq!(c.witness, Some(vec![1.0]));
        let c = CheckOutcome::at_least("y", 0.0, vec![(0.5, vec![0.0])]);
        assert!(c.passed && c.witness.is_none());
        assert!(c.line().starts_with("PASS y"));
    }
}
