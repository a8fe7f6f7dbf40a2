//! The planar five-tile strip systems: exact checks of conditions (a), (b),
//! (c), the resulting normality constants, and SVG drawings of both.

use normtile::schauder::NormalityConstants;
use normtile::strip::{parse_rational, StripParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir();
    for name in ["fig1", "fig2"] {
        let p = StripParams::preset(name)?;
        println!("{name}: {}", p.check_fact_conditions().summary());
        for unconditional in [false, true] {
            let c = NormalityConstants::from_params(&p, name, unconditional);
            println!("  unconditional={unconditional}: {}", c.summary());
        }
        let path = dir.join(format!("strip_{name}.svg"));
        std::fs::write(&path, p.to_f64().render_svg(2.0 * p.to_f64().outer_y + 1.0))?;
        println!("  drawing: {}", path.display());
    }

    // With r = 1/2 the squares of half-side r around the corner points no
    // longer fit inside their tiles.
    let mut p = StripParams::fig1();
    p.r = parse_rational("1/2")?;
    println!("fig1 with r = 1/2: {}", p.check_fact_conditions().summary());
    Ok(())
}
