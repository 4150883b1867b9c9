//! Escape-time images with fast-escaping classification, written as PPM.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{fast_escaping_with_table, iterate_orbit};
use crate::error::{Error, Result};
use crate::function::FunctionDescriptor;
use crate::measures::Region;

pub const MAX_SIDE: usize = 8192;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderParams {
    pub window: Region,
    pub width: usize,
    pub height: usize,
    pub r: f64,
    pub l_max: usize,
    pub n_max: usize,
}

impl Default for RenderParams {
    fn default() -> Self {
        RenderParams { window: Region::rectangle(Complex64::new(1.0, 0.0), 3.0, 3.0).unwrap(), width: 512, height: 512, r: 5.0, l_max: 4, n_max: 8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PixelClass {
    /// Dominates `M^{n−l}(R)` along the compared horizon.
    FastEscaping { first_escape: usize },
    Escaping { first_escape: usize },
    Bounded,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RenderStats {
    pub width: usize,
    pub height: usize,
    pub fast_escaping: usize,
    pub escaping: usize,
    pub bounded: usize,
}

impl RenderStats {
    pub fn fast_fraction(&self) -> f64 {
        self.fast_escaping as f64 / (self.width * self.height) as f64
    }
}

/// Classifies every pixel centre, row-major from the top-left corner.
pub fn classify(f: &FunctionDescriptor, p: &RenderParams) -> Result<Vec<PixelClass>> {
    if p.width == 0 || p.height == 0 || p.width > MAX_SIDE || p.height > MAX_SIDE {
        return Err(Error::InvalidArgument(format!("resolution {}x{} outside 1..={MAX_SIDE}", p.width, p.height)));
    }
    p.window.validate()?;
    let table = f.iterated_max_modulus(p.r, p.n_max)?;
    let log_r = p.r.ln();
    let (w, h) = (p.width, p.height);
    let x0 = p.window.center.re - p.window.half_width;
    let y1 = p.window.center.im + p.window.half_height;
    let dx = 2.0 * p.window.half_width / w as f64;
    let dy = 2.0 * p.window.half_height / h as f64;
    Ok((0..w * h)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % w, k / w);
            let z = Complex64::new(x0 + (i as f64 + 0.5) * dx, y1 - (j as f64 + 0.5) * dy);
            let orbit = iterate_orbit(f, z, p.n_max);
            let first = (0..orbit.len()).find(|&n| orbit.log_modulus(n).unwrap() > log_r);
            match first {
                None => PixelClass::Bounded,
                Some(first_escape) => {
                    if fast_escaping_with_table(f, z, &table, p.l_max, p.n_max).member {
                        PixelClass::FastEscaping { first_escape }
                    } else {
                        PixelClass::Escaping { first_escape }
                    }
                }
            }
        })
        .collect())
}

fn color(c: PixelClass, n_max: usize) -> [u8; 3] {
    let shade = |n: usize| (255.0 * (1.0 - n as f64 / (n_max + 1) as f64)) as u8;
    match c {
        PixelClass::FastEscaping { first_escape } => [255, shade(first_escape), 0],
        PixelClass::Escaping { first_escape } => [0, shade(first_escape) / 2, shade(first_escape)],
        PixelClass::Bounded => [0, 0, 0],
    }
}

pub fn write_ppm<W: Write>(mut out: W, width: usize, height: usize, pixels: &[[u8; 3]]) -> Result<()> {
    write!(out, "P6\n{width} {height}\n255\n")?;
    for px in pixels {
        out.write_all(px)?;
    }
    out.flush()?;
    Ok(())
}

pub fn render_escape(f: &FunctionDescriptor, p: &RenderParams, out_path: &Path) -> Result<RenderStats> {
    let classes = classify(f, p)?;
    let mut stats = RenderStats { width: p.width, height: p.height, fast_escaping: 0, escaping: 0, bounded: 0 };
    for c in &classes {
        match c {
            PixelClass::FastEscaping { .. } => stats.fast_escaping += 1,
            PixelClass::Escaping { .. } => stats.escaping += 1,
            PixelClass::Bounded => stats.bounded += 1,
        }
    }
    let pixels: Vec<[u8; 3]> = classes.iter().map(|&c| color(c, p.n_max)).collect();
    let file = std::fs::File::create(out_path)?;
    write_ppm(std::io::BufWriter::new(file), p.width, p.height, &pixels)?;
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pixel_file() {
        let dir = std::env::temp_dir().join(format!("ed-render-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("one.ppm");
        let p = RenderParams { width: 1, height: 1, ..Default::default() };
        render_escape(&FunctionDescriptor::exp(), &p, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..11], b"P6\n1 1\n255\n");
        assert_eq!(bytes.len(), 14);
    }

    #[test]
    fn attracting_basin_has_no_escapers() {
        let f = FunctionDescriptor::exp_affine(Complex64::new(0.1, 0.0));
        let p = RenderParams { window: Region::rectangle(Complex64::new(0.0, 0.0), 0.5, 0.5).unwrap(), width: 16, height: 16, ..Default::default() };
        let c = classify(&f, &p).unwrap();
        assert!(c.iter().all(|&x| x == PixelClass::Bounded));
    }

    #[test]
    fn exp_window_has_fast_escapers() {
        let p = RenderParams { width: 128, height: 128, ..Default::default() };
        let c = classify(&FunctionDescriptor::exp(), &p).unwrap();
        let fast = c.iter().filter(|x| matches!(x, PixelClass::FastEscaping { .. })).count();
        assert!(fast as f64 >= 0.01 * c.len() as f64, "{fast}");
    }

    #[test]
    fn oversized_is_rejected() {
        let p = RenderParams { width: MAX_SIDE + 1, ..Default::default() };
        assert!(classify(&FunctionDescriptor::exp(), &p).is_err());
    }
}
