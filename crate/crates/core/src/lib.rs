//! Radial extremal Kähler metrics in exact arithmetic.
//!
//! A radial metric with potential `f(r)` is encoded by `y = r f'(r)` and
//! `ψ(y) = r y'(r)`. Extremal metrics are exactly those whose `ψ` lies in a
//! four-parameter Laurent family; this crate builds that family, the
//! resolvability obstruction sequence `Q_k^ε`, exact sign certificates for it,
//! and numerical reconstructions of the metric profiles.

pub mod ratlaurent;
pub mod family;
pub mod resolvability;
pub mod profile;
pub mod ke;
