// SPDX-License-Identifier: Apache-2.0

//! Definite quaternion algebras ramified at one prime, their maximal orders,
//! right ideal classes and Brandt matrices.

pub mod algebra;
pub mod brandt;
pub mod eigen;
pub mod enumerate;
pub mod ideals;
pub mod lattice;
pub mod order;

pub use algebra::{build_algebra, Quat, QuaternionAlgebra};
pub use enumerate::ShortVectors;
pub use lattice::Lattice;
pub use order::{maximal_order, QuatOrder};
pub use brandt::{brandt_matrices, brandt_matrix, BrandtMatrix};
pub use ideals::{is_isomorphic, right_ideal_classes, RightIdeal, ShimuraSet};
pub use eigen::{eigenform, Eigenform};
