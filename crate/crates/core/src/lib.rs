//! Numerical toolkit for the sub-Riemannian Heisenberg group Hⁿ.
//!
//! * [`heisenberg`]: group law, Korányi gauge and distance, contact form,
//!   left-invariant horizontal frame.
//! * [`symplectic`]: symplectic form, complex structure, complements,
//!   Lagrangian completion and Korányi isometries between isotropic subspaces.
//! * [`horizontal`]: exact horizontal lifts of planar polylines, projected
//!   signed areas, Carnot–Carathéodory length, geodesics and distance.
//! * [`extension`]: geodesic-bridge Lipschitz extension of partial curves on
//!   intervals and circles.
//! * [`contact`]: finite-difference analysis of sampled maps into Hⁿ:
//!   contact residuals, numeric rank, pullback isotropy, loop integrals,
//!   Hölder exponents and collision search.
//! * [`measure`]: Korányi ball coverings, Hausdorff content estimates and
//!   the covering-decay experiment.
//! * [`generators`]: seeded families of contact and control maps.

// `!(x > 0.0)` deliberately rejects NaN; index loops mirror the formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod contact;
pub mod error;
pub mod exec;
pub mod extension;
pub mod generators;
pub mod heisenberg;
pub mod horizontal;
pub mod io;
pub mod measure;
pub mod spatial;
pub mod symplectic;

pub use error::{Error, Result};
pub use exec::Exec;
pub use heisenberg::{
    contact_form, group_inv, group_mul, horizontal_frame, koranyi_dist, koranyi_norm, ETangent,
    HFrame, HPoint,
};
pub use symplectic::{
    complex_structure, is_isotropic, isometry_between_isotropic, lagrangian_extension,
    symp_complement, symp_form, HIsometry, Subspace, SympVector,
};
