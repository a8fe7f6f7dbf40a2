//! The certification harness on hand-made tilings: a correct one, the two
//! negative controls, and a reproducibility check.

use normtile::tiling::BallTiling;
use normtile::verify::{negative_controls, verify_tiling, VerifyConfig};
use normtile::{Domain, NormedSpace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Two sup-norm unit balls tile the box [-2, 2] × [-1, 1].
    let sup = NormedSpace::sup(2)?;
    let t = BallTiling {
        space: sup,
        balls: vec![(vec![-1.0, 0.0], 1.0), (vec![1.0, 0.0], 1.0)],
        domain: Domain::Box { lo: vec![-2.0, -1.0], hi: vec![2.0, 1.0] },
    };
    let cfg = VerifyConfig { samples: 5_000, seed: 3, ..VerifyConfig::default() };
    let report = verify_tiling(&t, &cfg);
    println!("two squares: {}", report.summary());
    let again = verify_tiling(&t, &cfg);
    println!("same seed, same canonical report: {}", report.canonical_json() == again.canonical_json());

    for c in negative_controls(2_000, 0) {
        println!("{}", c.line());
    }
    Ok(())
}
