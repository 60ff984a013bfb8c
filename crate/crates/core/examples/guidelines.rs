//! Prints the decodability envelope of each imaging method and the observed
//! visibility of embedded bodies per colour.

use subprint::geometry::{Color, FabricationMode};
use subprint::harness::{visibility_lookup, GuidelineRow};

fn main() {
    for row in GuidelineRow::table() {
        println!("{}:", row.method);
        for axis in row.axes() {
            println!("  {:<16} {}", axis.to_string(), row.threshold(axis));
        }
    }

    println!("\n{:<8} {:>12} {:>12} {:>12} {:>12}", "color", "fill d=1", "fill d=2", "fill d=3", "join d=1");
    let cells = [
        (FabricationMode::SurfaceFill, 1.0),
        (FabricationMode::SurfaceFill, 2.0),
        (FabricationMode::SurfaceFill, 3.0),
        (FabricationMode::SurfaceJoin, 1.0),
    ];
    for color in Color::ALL {
        let row: Vec<String> = cells
            .iter()
            .map(|&(mode, d)| visibility_lookup(color, mode, d).map_or("-".into(), |v| format!("{v:?}")))
            .collect();
        println!("{:<8} {:>12} {:>12} {:>12} {:>12}", color.to_string(), row[0], row[1], row[2], row[3]);
    }
}
