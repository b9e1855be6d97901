pub mod algebra;
pub mod central;
pub mod error;
pub mod ideal;
pub mod instance;
pub mod linalg;
pub mod report;
pub mod shoda;
pub mod spectral;
pub mod subspace;
pub mod suite;
pub mod wedderburn;

pub use algebra::{Algebra, Element, RandomProfile};
pub use error::{Result, SocleError};
pub use linalg::{CMatrix, Tolerance, C64};
pub use subspace::Subspace;
