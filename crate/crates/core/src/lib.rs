//! Numerical laboratory for admissible control operators on diagonal
//! spectral models: Orlicz norms, mild solutions with unbounded input
//! operators, admissibility bounds, and ISS/iISS certificates.

pub mod admissibility;
pub mod certify;
pub mod error;
pub mod numeric;
pub mod orlicz;
pub mod quad;
pub mod signals;
pub mod spectral;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Version of each computational module, embedded in every report.
pub const MODULE_VERSIONS: [(&str, &str); 6] = [
    ("admissibility", VERSION),
    ("certify", VERSION),
    ("orlicz", VERSION),
    ("quad", VERSION),
    ("signals", VERSION),
    ("spectral", VERSION),
];
