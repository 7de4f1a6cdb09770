/// Numerical tolerances shared by every check in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Tolerances {
    /// Unitarity and generic matrix identities.
    pub tol: f64,
    /// Endpoint block-form checks of dimension drop elements.
    pub boundary_tol: f64,
    /// Agreement of the two halves of a concatenation at the glue point.
    pub glue_tol: f64,
    /// Minimum distance of an eigen-phase from the branch cut of the logarithm.
    pub branch_margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { tol: 1e-9, boundary_tol: 1e-9, glue_tol: 1e-9, branch_margin: 1e-6 }
    }
}

/// Sampling resolutions and the continuity budget used by certificates.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Resolution {
    /// Samples of the interval parameter t (must be even for concatenations).
    pub grid_t: usize,
    /// Samples of the homotopy parameter s, per stage.
    pub grid_s: usize,
    /// Largest admissible jump between adjacent samples, in either direction.
    pub step_budget: f64,
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution { grid_t: 256, grid_s: 64, step_budget: 0.5 }
    }
}
