//! The five-tile system of the planar strip `{|x| ≤ w}`.
//!
//! A central polygon `U₀` and four corner pieces `U₁…U₄` (reflections of
//! one another) tile the strip. Translating the strip by multiples of the
//! period tiles the plane. Three conditions make the system usable for the
//! layered tiling in [`crate::schauder`]:
//!
//! * (a) `[−1,1]² ⊂ U₀ ⊂ [−w,w] × [−y₀,y₀]` for the declared height `y₀`;
//! * (b) the square `(a,b) + r[−1,1]²` lies in `U₁` and in `|y| ≤ 1`;
//! * (c) for `|t| ≤ δb` the square `(a,t) + r[−1,1]²` lies in `U₀`.
//!
//! Every tile is an intersection of half-planes, so each condition reduces
//! to finitely many corner checks, done here in exact rational arithmetic.

use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::svg::{clip_polygon, Canvas};
use crate::tiling::Membership;

pub type Q = Rational64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StripError {
    #[error("point x = {0} lies outside the strip")]
    OutsideStrip(f64),
    #[error("not an exact rational: {0:?}")]
    NotRational(String),
    #[error("unknown preset {0:?} (expected fig1 or fig2)")]
    UnknownPreset(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PlaneTile {
    U0,
    U1,
    U2,
    U3,
    U4,
}

impl PlaneTile {
    pub const ALL: [PlaneTile; 5] = [PlaneTile::U0, PlaneTile::U1, PlaneTile::U2, PlaneTile::U3, PlaneTile::U4];
    pub const CORNERS: [PlaneTile; 4] = [PlaneTile::U1, PlaneTile::U2, PlaneTile::U3, PlaneTile::U4];

    /// Sign flips `(sx, sy)` that carry `U₁` onto this corner tile.
    fn flips(self) -> (i64, i64) {
        match self {
            PlaneTile::U0 | PlaneTile::U1 => (1, 1),
            PlaneTile::U2 => (1, -1),
            PlaneTile::U3 => (-1, 1),
            PlaneTile::U4 => (-1, -1),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<PlaneTile> {
        Self::ALL.get(i).copied()
    }
}

/// Shape of the central tile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum CoreShape<T> {
    /// `|x| + |y| ≤ s`
    Diamond { s: T },
    /// `|x| + m|y| ≤ c` and `|x| ≤ cap`
    Capped { m: T, c: T, cap: T },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripParams<T> {
    pub a: T,
    pub b: T,
    pub r: T,
    pub delta: T,
    pub core: CoreShape<T>,
    pub halfwidth: T,
    pub period: T,
    /// Declared bound on `|y|` over `U₀`.
    pub outer_y: T,
}

/// `a·x + b·y ≤ c`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Signed + Copy + PartialOrd> HalfPlane<T> {
    fn new(a: T, b: T, c: T) -> Self {
        HalfPlane { a, b, c }
    }

    pub fn slack(&self, x: T, y: T) -> T {
        self.a * x + self.b * y - self.c
    }
}

/// Outcome of the three corner checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FactConditions {
    pub a_holds: bool,
    pub b_holds: bool,
    pub c_holds: bool,
}

impl FactConditions {
    pub fn all(&self) -> bool {
        self.a_holds && self.b_holds && self.c_holds
    }

    pub fn summary(&self) -> String {
        let tag = |ok: bool, name: &str| if ok { format!("({name})") } else { String::new() };
        let held = format!("{}{}{}", tag(self.a_holds, "a"), tag(self.b_holds, "b"), tag(self.c_holds, "c"));
        let failed: Vec<&str> = [(self.a_holds, "(a)"), (self.b_holds, "(b)"), (self.c_holds, "(c)")]
            .iter()
            .filter(|(ok, _)| !ok)
            .map(|(_, n)| *n)
            .collect();
        match (held.is_empty(), failed.is_empty()) {
            (_, true) => format!("{held} hold"),
            (true, false) => format!("{} fail", failed.join("")),
            (false, false) => format!("{held} hold, {} fail", failed.join("")),
        }
    }
}

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

impl StripParams<Q> {
    /// Figure-one system: diamond core of half-diagonal 2, strip half-width
    /// 2, period 4, `(a,b) = (3/2, 5/6)`, `r = 1/6`, `δ = 1/5`.
    pub fn fig1() -> Self {
        StripParams {
            a: q(3, 2),
            b: q(5, 6),
            r: q(1, 6),
            delta: q(1, 5),
            core: CoreShape::Diamond { s: q(2, 1) },
            halfwidth: q(2, 1),
            period: q(4, 1),
            outer_y: q(2, 1),
        }
    }

    /// Figure-two system: core `|x| + 8|y| ≤ 9, |x| ≤ 11/2`, period 11,
    /// `(a,b) = (21/4, 3/4)`, `r = δ = 1/4`.
    pub fn fig2() -> Self {
        StripParams {
            a: q(21, 4),
            b: q(3, 4),
            r: q(1, 4),
            delta: q(1, 4),
            core: CoreShape::Capped { m: q(8, 1), c: q(9, 1), cap: q(11, 2) },
            halfwidth: q(11, 2),
            period: q(11, 1),
            outer_y: q(9, 8),
        }
    }

    pub fn preset(name: &str) -> Result<Self, StripError> {
        match name {
            "fig1" => Ok(Self::fig1()),
            "fig2" => Ok(Self::fig2()),
            other => Err(StripError::UnknownPreset(other.to_string())),
        }
    }

    pub fn to_f64(&self) -> StripParams<f64> {
        let f = |v: &Q| v.to_f64().expect("finite rational");
        StripParams {
            a: f(&self.a),
            b: f(&self.b),
            r: f(&self.r),
            delta: f(&self.delta),
            core: match &self.core {
                CoreShape::Diamond { s } => CoreShape::Diamond { s: f(s) },
                CoreShape::Capped { m, c, cap } => CoreShape::Capped { m: f(m), c: f(c), cap: f(cap) },
            },
            halfwidth: f(&self.halfwidth),
            period: f(&self.period),
            outer_y: f(&self.outer_y),
        }
    }

    /// Conditions (a), (b), (c) by exact corner checks.
    pub fn check_fact_conditions(&self) -> FactConditions {
        let one = Q::one();
        let inside = |t: PlaneTile, x: Q, y: Q| self.membership_exact(t, x, y).is_inside();
        let square = |cx: Q, cy: Q, h: Q| [(cx - h, cy - h), (cx - h, cy + h), (cx + h, cy - h), (cx + h, cy + h)];

        let unit_in_core = square(Q::zero(), Q::zero(), one).iter().all(|&(x, y)| inside(PlaneTile::U0, x, y));
        let core_in_box = self
            .core_vertices()
            .iter()
            .all(|(x, y)| x.abs() <= self.halfwidth && y.abs() <= self.outer_y);
        let a_holds = unit_in_core && core_in_box;

        let b_holds = square(self.a, self.b, self.r)
            .iter()
            .all(|&(x, y)| inside(PlaneTile::U1, x, y) && y.abs() <= one);

        let t = self.delta * self.b;
        let c_holds = [t, -t]
            .iter()
            .all(|&t| square(self.a, t, self.r).iter().all(|&(x, y)| inside(PlaneTile::U0, x, y)));

        FactConditions { a_holds, b_holds, c_holds }
    }

    fn membership_exact(&self, t: PlaneTile, x: Q, y: Q) -> Membership {
        if x.abs() > self.halfwidth {
            return Membership::Outside;
        }
        self.membership_with(t, x, y, Q::zero())
    }
}

impl<T: Signed + Copy + PartialOrd> StripParams<T> {
    fn two() -> T {
        T::one() + T::one()
    }

    /// Half-planes of the central tile.
    pub fn core_halfplanes(&self) -> Vec<HalfPlane<T>> {
        let one = T::one();
        match &self.core {
            CoreShape::Diamond { s } => [(one, one), (one, -one), (-one, one), (-one, -one)]
                .iter()
                .map(|&(a, b)| HalfPlane::new(a, b, *s))
                .collect(),
            CoreShape::Capped { m, c, cap } => {
                let mut v: Vec<HalfPlane<T>> = [(one, *m), (one, -*m), (-one, *m), (-one, -*m)]
                    .iter()
                    .map(|&(a, b)| HalfPlane::new(a, b, *c))
                    .collect();
                v.push(HalfPlane::new(one, T::zero(), *cap));
                v.push(HalfPlane::new(-one, T::zero(), *cap));
                v
            }
        }
    }

    /// Vertices of the central tile, counter-clockwise from the positive
    /// x-axis.
    pub fn core_vertices(&self) -> Vec<(T, T)> {
        let z = T::zero();
        match &self.core {
            CoreShape::Diamond { s } => vec![(*s, z), (z, *s), (-*s, z), (z, -*s)],
            CoreShape::Capped { m, c, cap } => {
                if *cap < *c {
                    let h = (*c - *cap) / *m;
                    let top = *c / *m;
                    vec![(*cap, -h), (*cap, h), (z, top), (-*cap, h), (-*cap, -h), (z, -top)]
                } else {
                    vec![(*c, z), (z, *c / *m), (-*c, z), (z, -*c / *m)]
                }
            }
        }
    }

    /// Half-planes of a tile.
    pub fn tile_halfplanes(&self, t: PlaneTile) -> Vec<HalfPlane<T>> {
        if t == PlaneTile::U0 {
            return self.core_halfplanes();
        }
        let one = T::one();
        let z = T::zero();
        let mut u1 = vec![HalfPlane::new(-one, z, z), HalfPlane::new(z, -one, z)];
        match &self.core {
            CoreShape::Diamond { s } => {
                u1.push(HalfPlane::new(-one, -one, -*s));
                u1.push(HalfPlane::new(one, z, self.halfwidth));
            }
            CoreShape::Capped { m, c, cap } => {
                u1.push(HalfPlane::new(-one, -*m, -*c));
                u1.push(HalfPlane::new(one, z, *cap));
            }
        }
        let (sx, sy) = t.flips();
        let flip = |v: T, s: i64| if s < 0 { -v } else { v };
        u1.into_iter()
            .map(|h| HalfPlane::new(flip(h.a, sx), flip(h.b, sy), h.c))
            .collect()
    }

    /// Membership with tolerance `tol` on every half-plane.
    pub fn membership_with(&self, t: PlaneTile, x: T, y: T, tol: T) -> Membership {
        let mut worst: Option<T> = None;
        for h in self.tile_halfplanes(t) {
            let s = h.slack(x, y);
            worst = Some(match worst {
                Some(w) if w >= s => w,
                _ => s,
            });
        }
        let w = worst.unwrap_or_else(T::zero);
        if w < -tol {
            Membership::Strict
        } else if w <= tol {
            Membership::Inside
        } else {
            Membership::Outside
        }
    }

    /// The strip index `n` with `|x − n·period| ≤ halfwidth`; on a shared
    /// boundary the smaller `|n|` wins, then the positive one.
    pub fn strip_index_generic(&self, x: T, floor: impl Fn(T) -> i64, from_i64: impl Fn(i64) -> T) -> i64 {
        let n0 = floor(x / self.period);
        let mut best: Option<i64> = None;
        for n in [n0 - 1, n0, n0 + 1, n0 + 2] {
            if (x - from_i64(n) * self.period).abs() <= self.halfwidth {
                best = Some(match best {
                    None => n,
                    Some(b) => {
                        if (n.abs(), -n.signum()) < (b.abs(), -b.signum()) {
                            n
                        } else {
                            b
                        }
                    }
                });
            }
        }
        best.unwrap_or_else(|| {
            let half = Self::two();
            floor(x / self.period + T::one() / half)
        })
    }
}

impl StripParams<f64> {
    pub fn plane_membership(&self, t: PlaneTile, point: (f64, f64), tol: f64) -> Result<Membership, StripError> {
        if point.0.abs() > self.halfwidth + tol {
            return Err(StripError::OutsideStrip(point.0));
        }
        Ok(self.membership_with(t, point.0, point.1, tol))
    }

    /// Smallest-index tile containing a strip point.
    pub fn classify(&self, point: (f64, f64)) -> Option<PlaneTile> {
        PlaneTile::ALL
            .iter()
            .copied()
            .find(|&t| self.membership_with(t, point.0, point.1, 0.0).is_inside())
    }

    pub fn strip_index(&self, x: f64) -> i64 {
        self.strip_index_generic(x, |v| v.floor() as i64, |n| n as f64)
    }

    /// SVG drawing of the five tiles over `|y| ≤ y_extent`, with the squares
    /// of conditions (b) and (c).
    pub fn render_svg(&self, y_extent: f64) -> String {
        let w = self.halfwidth;
        let mut canvas = Canvas::new((-w - 0.5, -y_extent), (w + 0.5, y_extent), 720.0);
        let frame = vec![(-w, -y_extent), (w, -y_extent), (w, y_extent), (-w, y_extent)];
        for (k, t) in PlaneTile::ALL.iter().enumerate() {
            let hp: Vec<(f64, f64, f64)> = self.tile_halfplanes(*t).iter().map(|h| (h.a, h.b, h.c)).collect();
            let poly = clip_polygon(&frame, &hp);
            canvas.polygon(&poly, Canvas::palette(k), "#222");
            if let Some((cx, cy)) = centroid(&poly) {
                canvas.label(cx, cy, &format!("U{k}"));
            }
        }
        let square = |cx: f64, cy: f64, h: f64| vec![(cx - h, cy - h), (cx + h, cy - h), (cx + h, cy + h), (cx - h, cy + h)];
        canvas.polygon(&square(0.0, 0.0, 1.0), "none", "#555");
        canvas.polygon(&square(self.a, self.b, self.r), "none", "#000");
        let t = self.delta * self.b;
        canvas.polygon(&[(self.a - self.r, -t - self.r), (self.a + self.r, -t - self.r), (self.a + self.r, t + self.r), (self.a - self.r, t + self.r)], "none", "#000");
        canvas.finish()
    }
}

fn centroid(poly: &[(f64, f64)]) -> Option<(f64, f64)> {
    if poly.is_empty() {
        return None;
    }
    let n = poly.len() as f64;
    Some((poly.iter().map(|p| p.0).sum::<f64>() / n, poly.iter().map(|p| p.1).sum::<f64>() / n))
}

/// Parse `"p/q"`, an integer, or a finite decimal as an exact rational.
pub fn parse_rational(text: &str) -> Result<Q, StripError> {
    let err = || StripError::NotRational(text.to_string());
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| err())?;
        let d: i64 = d.trim().parse().map_err(|_| err())?;
        if d == 0 {
            return Err(err());
        }
        return Ok(Q::new(n, d));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) || frac.len() > 15 {
        return Err(err());
    }
    let digits = format!("{int}{frac}");
    let n: i64 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| err())? };
    let d = 10i64.checked_pow(frac.len() as u32).ok_or_else(err)?;
    let v = Q::new(n, d);
    Ok(if neg { -v } else { v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Sampler;

    #[test]
    fn presets_satisfy_all_three_conditions() {
        assert!(StripParams::fig1().check_fact_conditions().all());
        assert!(StripParams::fig2().check_fact_conditions().all());
    }

    #[test]
    fn large_r_breaks_condition_b() {
        // Corners of (3/2, 5/6) + (1/2)[−1,1]² include (1, 1/3), where
        // x + y = 4/3 < 2, and (1, 4/3), where |y| > 1. The squares of (c)
        // reach (2, 2/3), past x + y = 2, so (c) fails as well.
        let mut p = StripParams::fig1();
        p.r = q(1, 2);
        let c = p.check_fact_conditions();
        assert!(!c.b_holds);
        assert!(!p.membership_exact(PlaneTile::U1, q(1, 1), q(1, 3)).is_inside());
        assert_eq!(c.summary(), "(a) hold, (b)(c) fail");
        assert_eq!(StripParams::fig1().check_fact_conditions().summary(), "(a)(b)(c) hold");
    }

    #[test]
    fn condition_c_is_tight_for_figure_one() {
        // The corner (5/3, 1/3) of (3/2, 1/6) + (1/6)[−1,1]² lies on x + y = 2.
        let p = StripParams::fig1();
        assert_eq!(p.membership_exact(PlaneTile::U0, q(5, 3), q(1, 3)), Membership::Inside);
        let mut wider = p.clone();
        wider.delta = q(1, 4);
        assert!(!wider.check_fact_conditions().c_holds);
    }

    #[test]
    fn figure_two_fails_the_literal_doubled_square() {
        // U₀ reaches x = 11/2, so U₀ ⊄ [−2, 2]²; only the declared box holds.
        let p = StripParams::fig2();
        assert!(p.core_vertices().iter().any(|(x, _)| x.abs() > q(2, 1)));
        let mut literal = p.clone();
        literal.halfwidth = q(2, 1);
        literal.outer_y = q(2, 1);
        assert!(!literal.check_fact_conditions().a_holds);
    }

    #[test]
    fn membership_examples() {
        let p = StripParams::fig1().to_f64();
        assert_eq!(p.plane_membership(PlaneTile::U0, (0.0, 0.0), 0.0).unwrap(), Membership::Strict);
        assert!(p.plane_membership(PlaneTile::U1, (1.5, 5.0 / 6.0), 0.0).unwrap().is_inside());
        assert_eq!(p.plane_membership(PlaneTile::U0, (2.0, 0.0), 0.0).unwrap(), Membership::Inside);
        assert_eq!(p.plane_membership(PlaneTile::U1, (2.0, 0.0), 0.0).unwrap(), Membership::Inside);
        assert_eq!(p.plane_membership(PlaneTile::U0, (3.0, 0.0), 0.0), Err(StripError::OutsideStrip(3.0)));
        assert_eq!(p.plane_membership(PlaneTile::U2, (1.0, -1.5), 0.0).unwrap(), Membership::Strict);
        assert_eq!(p.plane_membership(PlaneTile::U3, (-1.0, 1.5), 0.0).unwrap(), Membership::Strict);
        assert_eq!(p.plane_membership(PlaneTile::U4, (-1.0, -1.5), 0.0).unwrap(), Membership::Strict);
    }

    #[test]
    fn core_vertices() {
        let v = StripParams::fig2().core_vertices();
        assert!(v.contains(&(q(11, 2), q(7, 16))));
        assert!(v.contains(&(q(0, 1), q(9, 8))));
        assert_eq!(StripParams::fig1().core_vertices().len(), 4);
    }

    #[test]
    fn strip_index_examples() {
        let p1 = StripParams::fig1().to_f64();
        assert_eq!(p1.strip_index(5.0), 1);
        assert_eq!(p1.strip_index(2.0), 0);
        assert_eq!(p1.strip_index(-2.0), 0);
        assert_eq!(p1.strip_index(6.0), 1);
        assert_eq!(p1.strip_index(-6.0), -1);
        let p2 = StripParams::fig2().to_f64();
        assert_eq!(p2.strip_index(-12.0), -1);
        let exact = StripParams::fig1();
        assert_eq!(exact.strip_index_generic(q(6, 1), |v| v.floor().to_integer(), |n| q(n, 1)), 1);
    }

    #[test]
    fn tiles_cover_the_strip_without_overlap() {
        for p in [StripParams::fig1().to_f64(), StripParams::fig2().to_f64()] {
            let mut s = Sampler::new(4);
            for _ in 0..100_000 {
                let x = s.uniform(-p.halfwidth, p.halfwidth);
                let y = s.uniform(-6.0, 6.0);
                assert!(p.classify((x, y)).is_some(), "({x}, {y}) uncovered");
                let strict = PlaneTile::ALL
                    .iter()
                    .filter(|&&t| p.membership_with(t, x, y, 0.0).is_strict())
                    .count();
                assert!(strict <= 1);
            }
        }
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1/2").unwrap(), q(1, 2));
        assert_eq!(parse_rational("5.25").unwrap(), q(21, 4));
        assert_eq!(parse_rational("-3").unwrap(), q(-3, 1));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert!(parse_rational("pi").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1e3").is_err());
    }

    #[test]
    fn presets_round_trip_through_json() {
        let p = StripParams::fig2();
        let text = serde_json::to_string(&p).unwrap();
        let back: StripParams<Q> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
        assert_eq!(StripParams::preset("fig3"), Err(StripError::UnknownPreset("fig3".into())));
    }

    #[test]
    fn svg_mentions_every_tile() {
        let svg = StripParams::fig1().to_f64().render_svg(3.5);
        for k in 0..5 {
            assert!(svg.contains(&format!(">U{k}<")));
        }
    }
}
