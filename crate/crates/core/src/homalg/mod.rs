//! Natural transformations, kernels and cokernels, free resolutions and Koszul complexes.

mod koszul;
mod nat;
mod resolution;

pub use koszul::{
    betti_koszul, betti_koszul_all, differentials_square_to_zero, global_koszul, koszul, koszul_with_order,
    normalized_basis, KoszulComplex,
};
pub use nat::{cokernel, is_exact, kernel, nat_basis, NatSpace, NatTransformation};
pub use resolution::{betti, minimal_cover, minimal_resolution, FreeModule, Resolution};
