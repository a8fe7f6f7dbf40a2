//! Starshaped correction of Voronoi cells in ℓ₃² and ℓ₂³: segments from
//! points of a tile to its centre never leave the tile.

use normtile::voronoi::box_net_tiling;
use normtile::NormedSpace;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for space in [NormedSpace::lp(2, 3.0)?, NormedSpace::euclidean(3)] {
        let t = box_net_tiling(space, 3.0, 2.0, 0)?;
        let tiles = t.len().min(25);
        let mut violations = 0;
        for i in 0..tiles {
            let samples = t.samples_in_tile(i, 100, i as u64)?;
            violations += t.starshape_probe(i, &samples, 100)?.len();
        }
        println!(
            "{}: {} centres, {tiles} tiles probed with 100 samples x 100 segment points, {violations} violations",
            space.kind().label(),
            t.len()
        );
    }
    Ok(())
}
