//! Per-element constants used for idealized geometry and the toy force field.

/// Single-bond covalent radius in Å (Cordero et al. values, rounded).
pub fn covalent_radius(symbol: &str) -> f64 {
    match symbol {
        "H" => 0.31,
        "B" => 0.84,
        "C" => 0.76,
        "N" => 0.71,
        "O" => 0.66,
        "F" => 0.57,
        "Si" => 1.11,
        "P" => 1.07,
        "S" => 1.05,
        "Cl" => 1.02,
        "Br" => 1.20,
        "I" => 1.39,
        "*" => 0.76,
        _ => 0.80,
    }
}

/// Valence electron count, if known.
pub fn valence_electrons(symbol: &str) -> Option<u32> {
    Some(match symbol {
        "H" => 1,
        "B" => 3,
        "C" | "Si" | "*" => 4,
        "N" | "P" => 5,
        "O" | "S" => 6,
        "F" | "Cl" | "Br" | "I" => 7,
        _ => return None,
    })
}

pub fn is_hydrogen(symbol: &str) -> bool {
    symbol == "H"
}

/// Ideal bond length: sum of covalent radii, shortened for multiple bonds.
pub fn ideal_bond_length(a: &str, b: &str, order: u8) -> f64 {
    let single = covalent_radius(a) + covalent_radius(b);
    match order {
        2 => single * 0.87,
        3 => single * 0.78,
        _ => single,
    }
}

/// Ideal bond angle (radians) at a center with `degree` neighbors and a total
/// bond order `order_sum`, from the steric number (neighbors + lone pairs).
pub fn ideal_bond_angle(center: &str, degree: usize, order_sum: u32) -> f64 {
    let lone_pairs = valence_electrons(center)
        .map(|v| v.saturating_sub(order_sum) / 2)
        .unwrap_or(0) as usize;
    let steric = degree + lone_pairs;
    match steric {
        0..=2 => std::f64::consts::PI,
        3 => 120f64.to_radians(),
        _ => (-1.0f64 / 3.0).acos(),
    }
}
