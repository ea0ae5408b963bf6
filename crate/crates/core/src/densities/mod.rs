//! Component and series densities. Every density here is rotation invariant
//! and is evaluated as a function of the radius `r = ‖x‖`.

mod components;
mod series;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub use crate::specfun::student_cf;
pub use components::{g_component, phi_component, student_density, subordination_check};
pub use series::{
    fy_density, fz_density, GaussStudentSeries, SeriesValue, StudentPairSeries, TruncationPolicy,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityKind {
    Student,
    GaussianComponent,
    PhiComponent,
    GaussStudentSum,
    StudentStudentSum,
}

/// A rotation-invariant density on `ℝ^d`.
pub trait RadialDensity: Sync {
    fn dimension(&self) -> usize;
    fn kind(&self) -> DensityKind;
    /// Density at any `x` with `‖x‖ = r`.
    fn eval_radial(&self, r: f64) -> Result<f64>;
}

/// `f_ν` on `ℝ^d` as a [`RadialDensity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Student {
    pub nu: f64,
    pub d: usize,
}

impl RadialDensity for Student {
    fn dimension(&self) -> usize {
        self.d
    }

    fn kind(&self) -> DensityKind {
        DensityKind::Student
    }

    fn eval_radial(&self, r: f64) -> Result<f64> {
        student_density(self.nu, self.d, r)
    }
}

/// `g_{k,σ}` on `ℝ^d` as a [`RadialDensity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianComponent {
    pub k: u64,
    pub sigma: f64,
    pub d: usize,
}

impl RadialDensity for GaussianComponent {
    fn dimension(&self) -> usize {
        self.d
    }

    fn kind(&self) -> DensityKind {
        DensityKind::GaussianComponent
    }

    fn eval_radial(&self, r: f64) -> Result<f64> {
        g_component(self.k, self.sigma, self.d, r)
    }
}

/// `φ_{n,η}` on `ℝ^d` as a [`RadialDensity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiComponent {
    pub n: u64,
    pub eta: f64,
    pub d: usize,
}

impl RadialDensity for PhiComponent {
    fn dimension(&self) -> usize {
        self.d
    }

    fn kind(&self) -> DensityKind {
        DensityKind::PhiComponent
    }

    fn eval_radial(&self, r: f64) -> Result<f64> {
        phi_component(self.n, self.eta, self.d, r)
    }
}
