//! Klein-Gordon evolution on static 1+1 spacetimes driven by self-adjoint
//! extensions of the Laplacian.

pub mod error;
pub mod evolution;
pub mod extension;
pub mod fd;
pub mod geometry;
pub mod numeric;
pub mod observables;
pub mod spectral;

pub use error::{Error, Result};
pub use evolution::{
    evolve, make_bump, mode_coefficients, Basis, BasisOptions, Bump, CauchyData, CoefficientState, FieldState,
    ModeCoefficients, Profile, Solution, Term,
};
pub use extension::{boundary_residual, canonicalize, mass_shift_spectrum, Extension, Problem};
pub use fd::{fd_evolve, FdGrid, FdRun};
pub use geometry::{causal_slice, t_infinity, Manifold, Point, SpatialSet};
pub use observables::{conserved_series, energy, leakage, symplectic, ConservedSeries};
pub use spectral::{
    classify, eigenfunction, eigenvalue_condition, find_eigenvalues, greens_function, resolvent_apply, spectrum,
    Classification, Eigenpair, Eigenvalue, Mode, SpectralData, Window,
};
