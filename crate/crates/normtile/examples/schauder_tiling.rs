//! Layered starshaped tiling of ℓ_p⁶ (depth 2, figure-one strip system),
//! certified on 10⁴ samples of the ball of radius 10.

use std::time::Instant;

use normtile::schauder::{SchauderConfig, SchauderTiling};
use normtile::verify::{verify_tiling, VerifyConfig};
use normtile::NormedSpace;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for p in [2.0, 3.0] {
        let start = Instant::now();
        let tiling = SchauderTiling::build(SchauderConfig::new(NormedSpace::lp(6, p)?, 2, "fig1"))?;
        println!("{}", normtile::Tiling::describe(&tiling));
        println!("built in {:.1?}", start.elapsed());
        for level in &tiling.levels {
            for check in level.w_level_bounds(&tiling.constants, 500, 1) {
                println!("  {}", check.line());
            }
        }
        let cfg = VerifyConfig { samples: 10_000, seed: 1, directions: 100, tol: 1e-6, segment_points: 20 };
        let report = verify_tiling(&tiling, &cfg);
        println!("  {}", report.summary());
        println!("  constants {}; total {:.1?}", tiling.constants.summary(), start.elapsed());
    }
    Ok(())
}
