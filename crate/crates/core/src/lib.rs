//! Growth of iterated sumsets `B + h₁A₁ + ⋯ + hᵣAᵣ` in abelian semigroups.
//!
//! For finite nonempty `B, A₁, …, Aᵣ` the cardinality `γ(h₁,…,hᵣ)` agrees
//! with a polynomial once every `hᵢ` is large enough. This crate computes
//! `γ` exactly over boxes, finds and certifies that polynomial on a finite
//! window, extracts the gap structure of integer sumsets, and checks that
//! the growth series has the rational form with denominator
//! `∏ (1 − zᵢ)^{kᵢ}`, `kᵢ = |Aᵢ|`.
//!
//! Modules:
//! - [`semigroup`]: ambient semigroups (products of `ℤ`, `ℤ/m`; Cayley tables)
//! - [`sumset`]: sumsets, growth tables and the brute-force oracle
//! - [`growth`]: finite differences, interpolation, threshold search
//! - [`structure`]: integer gap sets, `Δ`, Frobenius numbers
//! - [`series`]: truncated growth series and their numerators
//! - [`cli`]: the `sumset` command-line front end
//!
//! Difference, interpolation and series code is generic over an
//! [`ExactInt`] scalar; the aliases below fix it to `BigInt`.

pub mod cli;
pub mod error;
pub mod growth;
pub mod lattice;
pub mod poly;
pub mod scalar;
pub mod semigroup;
pub mod series;
pub mod structure;
pub mod sumset;

pub use error::{Error, Result};
pub use lattice::Grid;
pub use scalar::{ExactInt, Rat};
pub use semigroup::{validate_spec, Component, Element, ElementSet, RawSemigroup, SemigroupSpec};
pub use structure::{
    frobenius_number, normalize, structure_sets, verify_multilinear, NormalizedIntegerProblem,
    StructureReport,
};
pub use sumset::{
    brute_force_sumset, combined_sumset, growth_table, h_fold, set_sum, GrowthOptions, GrowthTable,
    Mode, Problem, Retain,
};

/// Arbitrary-precision integer used by the default aliases.
pub type Int = num_bigint::BigInt;
/// Exact rational over [`Int`].
pub type Rational = num_rational::BigRational;

pub type Polynomial = poly::Polynomial<Int>;
pub type FittedPolynomial = growth::FittedPolynomial<Int>;
pub type StabilizationReport = growth::StabilizationReport<Int>;
pub type TruncatedSeries = series::TruncatedSeries<Int>;
pub type NumeratorReport = series::NumeratorReport<Int>;
pub type RationalFormSummary = series::RationalFormSummary<Int>;

/// Fixed-width variants, for tables whose values are known to stay small.
pub type Polynomial128 = poly::Polynomial<i128>;
pub type FittedPolynomial128 = growth::FittedPolynomial<i128>;
pub type StabilizationReport128 = growth::StabilizationReport<i128>;
pub type NumeratorReport128 = series::NumeratorReport<i128>;
