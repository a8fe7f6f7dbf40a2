//! Voronoi tiling of the plane from a 2-separated net: every cell sits
//! between the balls of radius 1 and 2 about its centre.

use normtile::svg::raster_tiling;
use normtile::verify::{verify_tiling, VerifyConfig};
use normtile::voronoi::box_net_tiling;
use normtile::{NormedSpace, Tiling};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = NormedSpace::euclidean(2);
    let t = box_net_tiling(space, 6.0, 2.0, 0)?;
    println!("{}", t.describe());
    println!("net separation {:.6}", t.net.min_pairwise_distance(&space));

    let report = verify_tiling(&t, &VerifyConfig { samples: 10_000, seed: 1, directions: 200, tol: 1e-3, segment_points: 0 });
    println!("{}", report.summary());
    let worst_outer = report.tiles.iter().map(|c| c.observed_outer).fold(0.0, f64::max);
    println!("largest sampled distance to a centre: {worst_outer:.4}");

    let path = std::env::temp_dir().join("voronoi_plane.svg");
    std::fs::write(&path, raster_tiling(&t, (-6.0, -6.0), (6.0, 6.0), 300).expect("planar"))?;
    println!("drawing: {}", path.display());
    Ok(())
}
