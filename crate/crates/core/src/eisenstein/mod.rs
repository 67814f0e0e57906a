//! Eisenstein series at s = 0: scaled G-series, normalized E-series recovered
//! by inverting the partial-zeta matrix, orbital sums, spectral and
//! unnormalized bases, and constant terms at every cusp through label slashing.

pub mod basis;
pub mod labels;
pub mod series;

pub use basis::{
    constant_term_at_cusp, orbital_sum, spectral_basis, spectral_series, unnormalized_basis, unnormalized_series,
    BasisElement, BasisKind, EisensteinBasis, SpectralData,
};
pub use labels::{epsilon, nonhol_per_label, Combination, Kind};
pub use series::{c_vector, closed_form_series_gamma_nt, e_series, g_series, half_units, s_tilde_matrix};

/// Default truncation: 30·N coefficients in q_N.
pub fn default_truncation(n: u32) -> usize {
    30 * n as usize
}
