//! The 18 benchmark manifolds, addressable by id (`M11` .. `M10`).

use super::{ManifoldKind, ManifoldSpec};
use crate::{Error, Result};

const IDS: [&str; 18] = [
    "M11", "M12", "M13", "M21", "M22", "M23", "M31", "M32", "M33", "M41", "M42", "M43", "M5", "M6",
    "M7", "M8", "M9", "M10",
];

pub fn catalog_ids() -> &'static [&'static str] {
    &IDS
}

/// Look up a catalog manifold by id; case-insensitive, `M_11` also accepted.
pub fn lookup(id: &str) -> Result<ManifoldSpec> {
    let key: String = id.trim().chars().filter(|c| *c != '_').collect::<String>().to_ascii_uppercase();
    let unknown = || Error::Unknown {
        kind: "manifold",
        name: id.to_string(),
    };
    let spec = match key.as_str() {
        "M11" => ManifoldSpec::sphere(5, 1.0, 10),
        "M12" => ManifoldSpec::sphere(10, 1.0, 20),
        "M13" => ManifoldSpec::sphere(20, 1.0, 40),
        "M21" => ManifoldSpec::new(ManifoldKind::Ball, 5).with_ambient(10),
        "M22" => ManifoldSpec::new(ManifoldKind::Ball, 10).with_ambient(20),
        "M23" => ManifoldSpec::new(ManifoldKind::Ball, 20).with_ambient(40),
        "M31" => ManifoldSpec::new(ManifoldKind::GaussianSurface, 5).with_ambient(10),
        "M32" => ManifoldSpec::new(ManifoldKind::GaussianSurface, 10).with_ambient(20),
        "M33" => ManifoldSpec::new(ManifoldKind::GaussianSurface, 20).with_ambient(40),
        "M41" => ManifoldSpec::deformed_sphere(3, 0.01),
        "M42" => ManifoldSpec::deformed_sphere(3, 0.1),
        "M43" => ManifoldSpec::deformed_sphere(3, 1.0),
        "M5" => ManifoldSpec::new(ManifoldKind::Cylinder, 2).with_ambient(4),
        "M6" => {
            // radius 0.5 keeps neighbouring turns out of K <= n/4 neighbourhoods
            let mut s = ManifoldSpec::new(ManifoldKind::Helix, 1).with_ambient(3);
            s.params.radius = 0.5;
            s
        }
        "M7" => ManifoldSpec::new(ManifoldKind::SwissRoll, 2).with_ambient(4),
        "M8" => ManifoldSpec::new(ManifoldKind::Mobius, 2).with_ambient(4),
        "M9" => ManifoldSpec::new(ManifoldKind::Torus, 2).with_ambient(4),
        "M10" => ManifoldSpec::new(ManifoldKind::Hyperboloid, 2).with_ambient(4),
        _ => return Err(unknown()),
    };
    Ok(spec)
}

/// All 18 entries in table order, paired with their ids.
pub fn catalog() -> Vec<(&'static str, ManifoldSpec)> {
    IDS.iter().map(|id| (*id, lookup(id).expect("catalog id"))).collect()
}
