//! Numerical constants and the resolved `m(ξ)` variant.

/// Euler–Mascheroni constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Reference value of `(1/√(4π)) ∫ e^{-ξ²/4} ln m²(ξ) dξ`.
pub const REFERENCE_LOG_INTEGRAL: f64 = 0.692_032_962;

/// Reference value of the Neumann star constant `γ + ∫…`, four decimals.
pub const REFERENCE_C_NEUMANN: f64 = 1.2692;

/// The `m(ξ)` variant that reproduces [`REFERENCE_LOG_INTEGRAL`].
///
/// Computed values (tolerance 1e-12):
///
/// | variant | integral | C |
/// |---------|----------|---|
/// | `Plain` | 0.692032961969 | 1.269248626871 |
/// | `TwoOverSqrtPi` | 0.835259295637 | 1.412474960539 |
///
/// `star::tests::default_variant_matches_reference` keeps this table honest.
pub const DEFAULT_M_VARIANT: crate::star::MVariant = crate::star::MVariant::Plain;
