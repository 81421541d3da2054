//! Physical constants, CODATA 2018, quoted to 10 significant digits.
//!
//! Every absolute-frequency formula in the crate goes through this table so
//! that the rate-unit convention (ordinary Hz everywhere) has exactly one
//! seam to angular/SI quantities.

/// Planck constant h (J·s), exact: 6.626070150e-34.
pub const PLANCK: f64 = 6.62607015e-34;

/// Reduced Planck constant ħ = h/2π (J·s): 1.054571817e-34.
pub const HBAR: f64 = 1.054571817e-34;

/// Boltzmann constant k_B (J/K), exact: 1.380649000e-23.
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Vacuum electric permittivity ε₀ (F/m): 8.854187813e-12.
pub const EPSILON_0: f64 = 8.8541878128e-12;

/// Vacuum magnetic permeability µ₀ (N/A²): 1.256637062e-6.
pub const MU_0: f64 = 1.25663706212e-6;

/// Speed of light in vacuum c (m/s), exact: 2.997924580e8.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Elementary charge e (C), exact: 1.602176634e-19.
pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;

/// Bohr magneton µ_B (J/T): 9.274010078e-24.
pub const BOHR_MAGNETON: f64 = 9.2740100783e-24;

/// One debye (C·m): 3.335640952e-30.
pub const DEBYE: f64 = 1.0e-21 / SPEED_OF_LIGHT;

/// One electronvolt (J), exact: 1.602176634e-19.
pub const ELECTRONVOLT: f64 = 1.602176634e-19;

/// Photon energy ħω for an ordinary frequency `f` in Hz, in joules.
#[inline]
pub fn photon_energy(f: f64) -> f64 {
    PLANCK * f
}

/// Angular frequency ω = 2πf for an ordinary frequency `f` in Hz.
#[inline]
pub fn angular(f: f64) -> f64 {
    std::f64::consts::TAU * f
}
