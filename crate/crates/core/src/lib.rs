pub mod densities;
pub mod error;
pub mod law;
pub mod mixing;
pub mod oracle;
pub mod sampling;
pub mod specfun;
mod sum;

pub use densities::{
    fy_density, fz_density, GaussStudentSeries, RadialDensity, StudentPairSeries, TruncationPolicy,
};
pub use error::{Error, Result};
pub use law::ConvolutionSpec;
pub use mixing::{CoefficientSequence, GaussStudentParams, StudentPairParams};
