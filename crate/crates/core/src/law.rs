use serde::{Deserialize, Serialize};

use crate::densities::{DensityKind, GaussStudentSeries, RadialDensity, StudentPairSeries, TruncationPolicy};
use crate::error::Result;
use crate::mixing::{GaussStudentParams, StudentPairParams};
use crate::sampling::{sample_y, sample_z, SampleBatch};

/// One of the two sums handled by the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum ConvolutionSpec {
    /// `a₁X + a₂T` with `X ~ N(0, σ²I_d)` and `T ~ t_{2ν}`; `params` are
    /// already scaled.
    GaussStudent { params: GaussStudentParams, a1: f64, a2: f64 },
    /// `T₁ + T₂` with `T₁ ~ t_{2ν}` and `T₂ ~ t_{2μ}`.
    StudentPair { params: StudentPairParams },
}

impl ConvolutionSpec {
    pub fn gauss_student(base: GaussStudentParams, a1: f64, a2: f64) -> Result<Self> {
        Ok(Self::GaussStudent {
            params: base.scaled(a1, a2)?,
            a1,
            a2,
        })
    }

    pub fn student_pair(params: StudentPairParams) -> Self {
        Self::StudentPair { params }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Self::GaussStudent { params, .. } => params.d(),
            Self::StudentPair { params } => params.d(),
        }
    }

    pub fn digest(&self) -> String {
        match self {
            Self::GaussStudent { params, .. } => params.digest(),
            Self::StudentPair { params } => params.digest(),
        }
    }

    pub fn density(&self, tp: TruncationPolicy) -> Result<ConvolutionDensity> {
        Ok(match *self {
            Self::GaussStudent { params, .. } => ConvolutionDensity::GaussStudent(GaussStudentSeries::new(params, tp)?),
            Self::StudentPair { params } => ConvolutionDensity::StudentPair(StudentPairSeries::new(params, tp)?),
        })
    }

    /// Draws from the direct (non-series) representation.
    pub fn sample(&self, count: usize, seed: u64) -> Result<SampleBatch> {
        match self {
            Self::GaussStudent { params, .. } => sample_z(params, count, seed),
            Self::StudentPair { params } => sample_y(params, count, seed),
        }
    }
}

/// Series density of a [`ConvolutionSpec`].
pub enum ConvolutionDensity {
    GaussStudent(GaussStudentSeries),
    StudentPair(StudentPairSeries),
}

impl ConvolutionDensity {
    pub fn eval_grid(&self, rs: &[f64]) -> Result<Vec<f64>> {
        match self {
            Self::GaussStudent(s) => s.eval_grid(rs),
            Self::StudentPair(s) => s.eval_grid(rs),
        }
    }
}

impl RadialDensity for ConvolutionDensity {
    fn dimension(&self) -> usize {
        match self {
            Self::GaussStudent(s) => s.dimension(),
            Self::StudentPair(s) => s.dimension(),
        }
    }

    fn kind(&self) -> DensityKind {
        match self {
            Self::GaussStudent(s) => s.kind(),
            Self::StudentPair(s) => s.kind(),
        }
    }

    fn eval_radial(&self, r: f64) -> Result<f64> {
        match self {
            Self::GaussStudent(s) => s.eval_radial(r),
            Self::StudentPair(s) => s.eval_radial(r),
        }
    }
}
