//! Run configuration: one section per experiment, every field defaulted.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::classical::ClassicalParams;
use super::render::RenderParams;
use super::specfun::SpecfunParams;
use super::thm3::Thm3Params;
use super::thm4::Thm4Params;
use super::thm56::Control;
use crate::dynamics::find_periodic_point;
use crate::error::Result;
use crate::function::FunctionDescriptor;
use crate::measures::{GridSpec, Region};

/// Repelling fixed point of `e^z` in the upper half plane.
pub const EXP_FIXED_POINT: Complex64 = Complex64::new(0.318_131_505_204_764_1, 1.337_235_701_430_689);

fn exp_region() -> Region {
    Region::disk(EXP_FIXED_POINT, 0.5).unwrap()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thm7Config {
    pub function: FunctionDescriptor,
    pub region: Region,
    pub r: f64,
    pub m: usize,
    pub n_min: usize,
    pub n_max: usize,
    /// When set, the region is re-centred on a periodic point of this period
    /// found by Newton from the configured centre.
    pub center_on_periodic: Option<usize>,
}

impl Default for Thm7Config {
    fn default() -> Self {
        Thm7Config { function: FunctionDescriptor::exp(), region: exp_region(), r: 5.0, m: 2, n_min: 1, n_max: 4, center_on_periodic: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thm56Config {
    pub function: FunctionDescriptor,
    pub region: Region,
    pub r_lower: f64,
    pub r_upper: f64,
    pub m: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub center_on_periodic: Option<usize>,
    /// Negative control: a region away from the Julia set whose lower
    /// bound is expected to fail.
    pub control: Option<Control>,
}

impl Default for Thm56Config {
    fn default() -> Self {
        Thm56Config {
            function: FunctionDescriptor::exp(),
            region: exp_region(),
            r_lower: 5.0,
            r_upper: 5.0,
            m: 2,
            n_min: 1,
            n_max: 4,
            center_on_periodic: None,
            control: Some(Control {
                function: FunctionDescriptor::exp_affine(Complex64::new(0.1, 0.0)),
                region: Region::disk(Complex64::new(0.0, 0.0), 0.5).unwrap(),
                r: 5.0,
            }),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thm1Config {
    pub function: FunctionDescriptor,
    pub region: Region,
    pub horizon: usize,
    pub starts: usize,
}

impl Default for Thm1Config {
    fn default() -> Self {
        Thm1Config { function: FunctionDescriptor::exp(), region: exp_region(), horizon: 5, starts: 64 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderConfig {
    pub function: FunctionDescriptor,
    #[serde(flatten)]
    pub params: RenderParams,
    /// File name inside the output directory.
    pub file: String,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig { function: FunctionDescriptor::exp(), params: RenderParams::default(), file: "escape.ppm".into() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub grid: GridSpec,
    pub thm7: Thm7Config,
    pub thm56: Thm56Config,
    pub thm1scan: Thm1Config,
    pub thm3: Thm3Params,
    pub thm4scan: Thm4Params,
    pub classical: ClassicalParams,
    pub render: RenderConfig,
    pub specfun: SpecfunParams,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 20_240_601,
            grid: GridSpec::default(),
            thm7: Thm7Config::default(),
            thm56: Thm56Config::default(),
            thm1scan: Thm1Config::default(),
            thm3: Thm3Params::default(),
            thm4scan: Thm4Params::default(),
            classical: ClassicalParams::default(),
            render: RenderConfig::default(),
            specfun: SpecfunParams::default(),
        }
    }
}

impl Config {
    pub fn from_json(s: &str) -> Result<Config> {
        let c: Config = serde_json::from_str(s)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Config> {
        Config::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        for f in [&self.thm7.function, &self.thm56.function, &self.thm1scan.function, &self.render.function] {
            f.validate()?;
        }
        for r in [&self.thm7.region, &self.thm56.region, &self.thm1scan.region, &self.render.params.window] {
            r.validate()?;
        }
        Ok(())
    }
}

/// `region` moved onto a period-`p` point found from its centre.
pub fn recenter(f: &FunctionDescriptor, region: &Region, p: Option<usize>) -> Result<Region> {
    match p {
        None => Ok(*region),
        Some(p) => {
            let pp = find_periodic_point(f, p, region.center)?;
            Ok(Region { center: pp.location, ..*region })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_default() {
        let c = Config::from_json("{}").unwrap();
        assert_eq!(c.thm7.m, 2);
        assert_eq!(c.thm4scan.starts, 1000);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Config::from_json(r#"{"thm7": {"q": 1}}"#).is_err());
    }

    #[test]
    fn round_trip() {
        let c = Config::default();
        let s = serde_json::to_string(&c).unwrap();
        let d = Config::from_json(&s).unwrap();
        assert_eq!(serde_json::to_string(&d).unwrap(), s);
    }

    #[test]
    fn recentering_finds_the_fixed_point() {
        let r = Region::disk(Complex64::new(0.3, 1.3), 0.5).unwrap();
        let r = recenter(&FunctionDescriptor::exp(), &r, Some(1)).unwrap();
        assert!((r.center - EXP_FIXED_POINT).norm() < 1e-12);
    }
}
