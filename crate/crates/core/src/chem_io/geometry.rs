use crate::{Error, Result};

/// Symmetric water geometry: O at the origin, both hydrogens in the xy
/// plane mirrored through the y axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    /// H-O-H angle in degrees.
    pub bond_angle: f64,
    /// O-H distance in Angstrom.
    pub bond_length: f64,
    /// Cartesian positions of O, H1, H2 in Angstrom.
    pub coordinates: [[f64; 3]; 3],
}

pub fn build_geometry(bond_angle: f64, bond_length: f64) -> Result<Geometry> {
    if !(bond_angle > 0.0 && bond_angle <= 180.0) {
        return Err(Error::Domain(format!(
            "bond angle {bond_angle} outside (0, 180] degrees"
        )));
    }
    if !(bond_length > 0.0 && bond_length.is_finite()) {
        return Err(Error::Domain(format!("bond length {bond_length} must be positive")));
    }
    let half = (bond_angle / 2.0).to_radians();
    let (s, c) = half.sin_cos();
    let x = bond_length * s;
    let y = bond_length * c;
    Ok(Geometry {
        bond_angle,
        bond_length,
        coordinates: [[0.0; 3], [x, y, 0.0], [-x, y, 0.0]],
    })
}

impl Geometry {
    pub fn oxygen(&self) -> [f64; 3] {
        self.coordinates[0]
    }

    pub fn hydrogens(&self) -> ([f64; 3], [f64; 3]) {
        (self.coordinates[1], self.coordinates[2])
    }

    pub fn same_point(&self, other: &Geometry) -> bool {
        self.bond_angle == other.bond_angle && self.bond_length == other.bond_length
    }
}

impl std::fmt::Display for Geometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "angle={} deg, length={} A", self.bond_angle, self.bond_length)
    }
}
