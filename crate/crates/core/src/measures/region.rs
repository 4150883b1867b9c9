//! Integration regions and grid parameters.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionKind {
    Rectangle,
    Disk { radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub center: Complex64,
    pub half_width: f64,
    pub half_height: f64,
    #[serde(flatten)]
    pub kind: RegionKind,
}

impl Region {
    pub fn rectangle(center: Complex64, half_width: f64, half_height: f64) -> Result<Self> {
        let r = Region { center, half_width, half_height, kind: RegionKind::Rectangle };
        r.validate()?;
        Ok(r)
    }

    pub fn square(center: Complex64, side: f64) -> Result<Self> {
        Self::rectangle(center, side / 2.0, side / 2.0)
    }

    pub fn disk(center: Complex64, radius: f64) -> Result<Self> {
        let r = Region { center, half_width: radius, half_height: radius, kind: RegionKind::Disk { radius } };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.half_width) || !ok(self.half_height) || !self.center.is_finite() {
            return Err(Error::InvalidArgument(format!("region needs finite center and positive extent: {self:?}")));
        }
        if let RegionKind::Disk { radius } = self.kind {
            if !ok(radius) {
                return Err(Error::InvalidArgument(format!("disk radius must be positive, got {radius}")));
            }
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        match self.kind {
            RegionKind::Rectangle => 4.0 * self.half_width * self.half_height,
            RegionKind::Disk { radius } => PI * radius * radius,
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let d = z - self.center;
        match self.kind {
            RegionKind::Rectangle => d.re.abs() <= self.half_width && d.im.abs() <= self.half_height,
            RegionKind::Disk { radius } => d.norm() <= radius,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Cells per side of the starting grid.
    pub base_resolution: usize,
    /// Maximum number of bisections applied to a starting cell.
    pub max_refinements: usize,
    pub rel_tol: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { base_resolution: 32, max_refinements: 24, rel_tol: 1e-3 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.base_resolution < 16 {
            return Err(Error::InvalidArgument(format!("base_resolution must be >= 16, got {}", self.base_resolution)));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol <= 0.1) {
            return Err(Error::InvalidArgument(format!("rel_tol must lie in (0, 0.1], got {}", self.rel_tol)));
        }
        Ok(())
    }
}

/// Coordinates `(u, v)` on a box mapped onto a region. Disks use
/// `z = c + r e^{iθ}` with `r = r₀(e^u − 1)`, which spreads radii
/// logarithmically beyond `r₀ = min(radius, 1)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Chart {
    pub u: (f64, f64),
    pub v: (f64, f64),
    center: Complex64,
    disk_r0: Option<f64>,
}

impl Chart {
    pub fn new(region: &Region) -> Self {
        match region.kind {
            RegionKind::Rectangle => Chart {
                u: (-region.half_width, region.half_width),
                v: (-region.half_height, region.half_height),
                center: region.center,
                disk_r0: None,
            },
            RegionKind::Disk { radius } => {
                let r0 = radius.min(1.0);
                Chart { u: (0.0, (radius / r0).ln_1p()), v: (-PI, PI), center: region.center, disk_r0: Some(r0) }
            }
        }
    }

    /// Point and log of the area Jacobian.
    pub fn map(&self, u: f64, v: f64) -> (Complex64, f64) {
        match self.disk_r0 {
            None => (self.center + Complex64::new(u, v), 0.0),
            Some(r0) => {
                let r = r0 * u.exp_m1();
                (self.center + Complex64::from_polar(r, v), r.ln() + (r + r0).ln())
            }
        }
    }
}
