//! Slice tiling of the unit sphere of ℓ₂⁴ at ε = 0.8, and a picture of the
//! tiling of the 2-sphere in ℓ₂³.
//!
//! Tiles whose kernel centre does not exist (the family outgrows the
//! dimension) get a searched centre; in four dimensions some of those tiles
//! are thinner than ρ, which the inner-radius battery reports.

use normtile::sphere::SphereTiling;
use normtile::verify::{verify_tiling, VerifyConfig};
use normtile::NormedSpace;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = SphereTiling::build(NormedSpace::euclidean(4), 0.8, 20_000, 0)?;
    let p = &t.params;
    println!(
        "family {}, δ = {:.6}, r′ = {:.6}, r = {:.6}, R = {:.6}, ρ = {:.6}",
        t.family.len(),
        p.delta,
        p.r_prime,
        p.r,
        p.big_r,
        p.rho
    );
    for c in t.construction_checks() {
        println!("  {}", c.line());
    }
    println!("tiles with a certified centre: {} of {}", t.certified_tiles(), t.len());
    let report = verify_tiling(&t, &VerifyConfig { samples: 10_000, seed: 1, ..VerifyConfig::default() });
    println!("{}", report.summary());

    let small = SphereTiling::build(NormedSpace::euclidean(3), 0.8, 4_000, 0)?;
    let path = std::env::temp_dir().join("sphere_l2_3.svg");
    std::fs::write(&path, small.render_svg(20_000, 0).expect("3-d picture"))?;
    println!("ℓ₂³ sphere with {} tiles: {}", small.len(), path.display());
    Ok(())
}
