//! Slice peeling of convex bodies: a cut disc in ℓ₂² (drawn) and the unit
//! ball of ℓ₂³ at ε = 0.75.

use normtile::body::{build_body_tiling, ConvexBody, HalfSpace, PeelConfig};
use normtile::verify::{verify_tiling, VerifyConfig};
use normtile::{Functional, NormedSpace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let disc = ConvexBody::unit_ball(NormedSpace::euclidean(2))
        .cut(HalfSpace { f: Functional(vec![1.0, 1.0]), lambda: 1.0 })?;
    let cfg = PeelConfig { pool: 20_000, ..PeelConfig::default() };
    let t = build_body_tiling(&disc, 0.6, &cfg)?;
    println!("cut disc: {} layers, {} slices, ρ = {:.5}", t.layers, t.slices.len(), t.rho);
    println!("  {}", verify_tiling(&t, &VerifyConfig::default()).summary());
    let path = std::env::temp_dir().join("body_disc.svg");
    std::fs::write(&path, t.render_svg(300).expect("planar"))?;
    println!("  drawing: {}", path.display());

    let ball = ConvexBody::unit_ball(NormedSpace::euclidean(3));
    let t = build_body_tiling(&ball, 0.75, &PeelConfig::default())?;
    println!(
        "ℓ₂³ ball: δ = {:.6}, γ = {:.6}, {} layers, {} slices, ρ = {:.6}",
        t.delta,
        t.gamma,
        t.layers,
        t.slices.len(),
        t.rho
    );
    for c in t.construction_checks(100, 0) {
        println!("  {}", c.line());
    }
    println!("  {}", verify_tiling(&t, &VerifyConfig::default()).summary());
    Ok(())
}
