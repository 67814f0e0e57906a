//! Congruence subgroups as finite data mod their level, the lattice Λ_N with
//! its right action, orbits, admissible representatives and cusps.

pub mod admissible;
pub mod closed_form;
pub mod cusps;
pub mod lattice;
pub mod matrix;
pub mod subgroup;

pub use admissible::{admissible_reps, AdmissibleReps};
pub use closed_form::{closed_form_orbits_gamma0, closed_form_orbits_gamma_nt, orbit_size_formula_gamma0};
pub use cusps::{amplitude, cusps, min_amplitude_cusp, orbit_size_in_cusps, Cusp, CuspClass};
pub use lattice::{lambda_points, orbits, LatticeOrbit, LatticePoint};
pub use matrix::{sl2_mod, ResidueMatrix};
pub use subgroup::{CongruenceSubgroup, GroupSpec};
