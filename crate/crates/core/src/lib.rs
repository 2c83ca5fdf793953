pub mod elliptic;
pub mod error;
pub mod hyper_faltings;
pub mod linalg;
pub mod local_heights;
pub mod precision;
pub mod siegel;
pub mod theta;
pub mod weierstrass;

pub use error::{Error, Result};
pub use precision::PrecisionContext;
pub use theta::{SiegelMatrix, ThetaCharacteristic};
pub use weierstrass::{ModelChange, Poly, WeierstrassEquation};
pub use elliptic::{faltings_elliptic, FaltingsElliptic, FiniteModel, Point};
pub use hyper_faltings::{faltings_jacobian, ArchPlace, FinitePlaceInput, JacobianFaltings};
pub use local_heights::{canonical_height_q, CanonicalHeight, HeightBreakdown, Place, PlaceEntry};
