//! The Mazur map `f ↦ sign(f)|f|²` from the ℓ₂ ball onto the ℓ₁ ball: its
//! moduli of continuity on random pairs, and a body tiling carried across.

use normtile::body::{build_body_tiling, ConvexBody, PeelConfig};
use normtile::mazur::{transport_tiling, verify_moduli};
use normtile::svg::raster_tiling;
use normtile::verify::{verify_tiling, VerifyConfig};
use normtile::NormedSpace;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = verify_moduli(8, 100_000, 0)?;
    println!(
        "moduli on {} pairs in dimension {}: {} forward and {} inverse violations, worst ratios {:.4} / {:.4}, round trip {:.1e}",
        m.pairs, m.dim, m.forward_violations, m.inverse_violations, m.forward_ratio, m.inverse_ratio, m.roundtrip_error
    );

    let ball = ConvexBody::unit_ball(NormedSpace::euclidean(2));
    let source = build_body_tiling(&ball, 0.75, &PeelConfig { pool: 20_000, ..PeelConfig::default() })?;
    let (rho, eps) = (source.rho, source.eps);
    let t = transport_tiling(source, 1.0, rho, eps)?;
    println!("ℓ₁² ball: inner radius {:.3e} from {rho:.5}, outer {:.4} from {eps}", t.rho, t.outer);
    println!("  {}", verify_tiling(&t, &VerifyConfig::default()).summary());
    let path = std::env::temp_dir().join("mazur_l1_ball.svg");
    std::fs::write(&path, raster_tiling(&t, (-1.05, -1.05), (1.05, 1.05), 300).expect("planar"))?;
    println!("  drawing: {}", path.display());
    Ok(())
}
