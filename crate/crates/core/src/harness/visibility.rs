//! How visible an embedded body is to the naked eye, as observed on printed
//! samples. Static data.

use serde::{Deserialize, Serialize};

use crate::geometry::{Color, FabricationMode};

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Visible,
    Unobtrusive,
    Invisible,
}

use Visibility::{Invisible as I, Unobtrusive as U, Visible as V};

/// Per colour: surface-fill at d = 1, 2, 3 mm, then surface-join at d = 1 mm.
const TABLE: [(Color, [Visibility; 4]); 5] = [
    (Color::Blue, [V, I, I, U]),
    (Color::Red, [V, I, I, U]),
    (Color::Orange, [V, U, I, V]),
    (Color::Gray, [V, I, I, V]),
    (Color::Black, [I, I, I, I]),
];

pub fn visibility_lookup(color: Color, mode: FabricationMode, depth_mm: f64) -> Result<Visibility, HarnessError> {
    let out = || HarnessError::OutOfTable(format!("{color} {mode} d={depth_mm} mm"));
    let row = TABLE.iter().find(|(c, _)| *c == color).ok_or_else(out)?;
    let d = depth_mm.round();
    if (depth_mm - d).abs() > 1e-9 {
        return Err(out());
    }
    let col = match (mode, d as i64) {
        (FabricationMode::SurfaceFill, 1..=3) => d as usize - 1,
        (FabricationMode::SurfaceJoin, 1) => 3,
        _ => return Err(out()),
    };
    Ok(row.1[col])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells() {
        use FabricationMode::*;
        assert_eq!(visibility_lookup(Color::Black, SurfaceJoin, 1.0).unwrap(), Visibility::Invisible);
        assert_eq!(visibility_lookup(Color::Orange, SurfaceFill, 2.0).unwrap(), Visibility::Unobtrusive);
        assert_eq!(visibility_lookup(Color::Blue, SurfaceFill, 3.0).unwrap(), Visibility::Invisible);
        assert_eq!(visibility_lookup(Color::Red, SurfaceJoin, 1.0).unwrap(), Visibility::Unobtrusive);
        assert_eq!(visibility_lookup(Color::Gray, SurfaceFill, 1.0).unwrap(), Visibility::Visible);
    }

    #[test]
    fn outside_the_table() {
        use FabricationMode::*;
        for (c, m, d) in [
            (Color::White, SurfaceFill, 1.0),
            (Color::Blue, SurfaceFill, 4.0),
            (Color::Blue, SurfaceJoin, 2.0),
            (Color::Blue, SurfaceFill, 1.5),
        ] {
            assert!(matches!(visibility_lookup(c, m, d), Err(HarnessError::OutOfTable(_))));
        }
    }
}
