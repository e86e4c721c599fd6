//! Strip-flow and level-curve rendering on a plane raster and on a
//! triangulated Riemann sphere, plus a domain-coloring phase portrait mode.
//!
//! All renderers are data-parallel over disjoint pixel rows (or triangle
//! ranges) and produce output that is bit-identical regardless of worker
//! count.

mod raster;
mod sphere;

pub use raster::{render_level_curve, render_phase_portrait, render_strips_plane, Mask};
pub use sphere::{
    build_sphere_mesh, plane_to_stereographic, render_strips_sphere, stereographic_to_plane,
    write_ply, SphereMesh,
};

use num_complex::Complex64;
use thiserror::Error;

use crate::wrap_angle;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("invalid raster region (need x_min < x_max, y_min < y_max, pixels >= 1)")]
    InvalidRegion,
    #[error("invalid strip partition: {0}")]
    InvalidPartition(String),
    #[error("sphere subdivision depth {0} exceeds the maximum of 8")]
    DepthTooLarge(usize),
    #[error("level-curve base point is singular for this field")]
    SingularBasePoint,
}

pub type Rgb = [u8; 3];

/// Reserved for singular evaluations; palettes must not contain it.
pub const SENTINEL_COLOR: Rgb = [0, 0, 0];

/// Background for points matched by no fixed interval.
pub const BACKGROUND_COLOR: Rgb = [255, 255, 255];

/// Rectangular region sampled at pixel centers,
/// `z = x_min + (col + 1/2) dx + i (y_max - (row + 1/2) dy)`;
/// row 0 is the top image row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RasterRegion {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub width: usize,
    pub height: usize,
}

impl RasterRegion {
    pub fn new(
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
        width: usize,
        height: usize,
    ) -> Result<Self, RenderError> {
        if !(x_min < x_max) || !(y_min < y_max) || width == 0 || height == 0 {
            return Err(RenderError::InvalidRegion);
        }
        Ok(RasterRegion {
            x_min,
            x_max,
            y_min,
            y_max,
            width,
            height,
        })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.width as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / self.height as f64
    }

    pub fn pixel_diagonal(&self) -> f64 {
        self.dx().hypot(self.dy())
    }

    pub fn center(&self, col: usize, row: usize) -> Complex64 {
        Complex64::new(
            self.x_min + (col as f64 + 0.5) * self.dx(),
            self.y_max - (row as f64 + 0.5) * self.dy(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
enum PartitionMode {
    /// Bins of width `2 pi / n` covering `(-pi, pi]`, applied to the wrapped
    /// value; branch-independent by construction.
    Cyclic,
    /// Half-open intervals `[a, b)` matched against the raw value.
    Fixed(Vec<(f64, f64)>),
}

/// Coloring rule mapping the first integral `rho` to strip colors.
#[derive(Debug, Clone, PartialEq)]
pub struct StripPartition {
    bins: usize,
    palette: Vec<Rgb>,
    mode: PartitionMode,
}

impl StripPartition {
    pub fn cyclic(bins: usize, palette: Vec<Rgb>) -> Result<Self, RenderError> {
        if bins < 2 {
            return Err(RenderError::InvalidPartition("need at least 2 bins".into()));
        }
        Self::check_palette(&palette)?;
        Ok(StripPartition {
            bins,
            palette,
            mode: PartitionMode::Cyclic,
        })
    }

    pub fn fixed(intervals: Vec<(f64, f64)>, palette: Vec<Rgb>) -> Result<Self, RenderError> {
        if intervals.is_empty() {
            return Err(RenderError::InvalidPartition("no intervals".into()));
        }
        if intervals.iter().any(|&(a, b)| !(a < b)) {
            return Err(RenderError::InvalidPartition(
                "intervals must satisfy a < b".into(),
            ));
        }
        Self::check_palette(&palette)?;
        Ok(StripPartition {
            bins: intervals.len(),
            palette,
            mode: PartitionMode::Fixed(intervals),
        })
    }

    fn check_palette(palette: &[Rgb]) -> Result<(), RenderError> {
        if palette.is_empty() {
            return Err(RenderError::InvalidPartition("empty palette".into()));
        }
        if palette.iter().any(|&c| c == SENTINEL_COLOR) {
            return Err(RenderError::InvalidPartition(
                "pure black is reserved for singular pixels".into(),
            ));
        }
        Ok(())
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    /// Bin index for a finite `rho`; `None` when no interval matches.
    pub fn bin_index(&self, rho: f64) -> Option<usize> {
        if !rho.is_finite() {
            return None;
        }
        match &self.mode {
            PartitionMode::Cyclic => {
                let wrapped = wrap_angle(rho);
                let width = std::f64::consts::TAU / self.bins as f64;
                let idx = ((wrapped + std::f64::consts::PI) / width) as usize;
                Some(idx.min(self.bins - 1))
            }
            PartitionMode::Fixed(intervals) => intervals
                .iter()
                .position(|&(a, b)| rho >= a && rho < b),
        }
    }

    /// Color for `rho`: sentinel black for singular values, palette color for
    /// a matched bin, background for unmatched (fixed mode only).
    pub fn color_for(&self, rho: f64) -> Rgb {
        if !rho.is_finite() {
            return SENTINEL_COLOR;
        }
        match self.bin_index(rho) {
            Some(idx) => self.palette[idx % self.palette.len()],
            None => BACKGROUND_COLOR,
        }
    }
}

/// Named palettes: the default two-tone strips of the figures and a 12-hue
/// wheel. None contain the reserved sentinel black.
pub fn palette(name: &str) -> Option<Vec<Rgb>> {
    match name {
        "duotone" => Some(vec![[232, 232, 232], [96, 96, 120]]),
        "hue12" => Some(
            (0..12)
                .map(|k| hsv_to_rgb(k as f64 * 30.0, 1.0, 1.0))
                .collect(),
        ),
        _ => None,
    }
}

/// Standard HSV to RGB, `h` in degrees.
pub(crate) fn hsv_to_rgb(h: f64, s: f64, v: f64) -> Rgb {
    let h = h.rem_euclid(360.0) / 60.0;
    let i = h.floor() as i32 % 6;
    let f = h - h.floor();
    let p = v * (1.0 - s);
    let q = v * (1.0 - f * s);
    let t = v * (1.0 - (1.0 - f) * s);
    let (r, g, b) = match i {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    [
        (r * 255.0).round() as u8,
        (g * 255.0).round() as u8,
        (b * 255.0).round() as u8,
    ]
}

/// Row-major RGB8 image.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl Image {
    pub fn new(width: usize, height: usize) -> Image {
        Image {
            width,
            height,
            pixels: vec![255; width * height * 3],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, col: usize, row: usize) -> Rgb {
        let i = (row * self.width + col) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn set(&mut self, col: usize, row: usize, rgb: Rgb) {
        let i = (row * self.width + col) * 3;
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    pub(crate) fn rows_mut(&mut self) -> std::slice::ChunksMut<'_, u8> {
        self.pixels.chunks_mut(self.width * 3)
    }

    /// Binary PPM (P6, maxval 255).
    pub fn write_ppm(&self, out: &mut dyn std::io::Write) -> std::io::Result<()> {
        write!(out, "P6\n{} {}\n255\n", self.width, self.height)?;
        out.write_all(&self.pixels)
    }

    /// RGBA8 copy for canvas-style consumers.
    pub fn to_rgba(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.width * self.height * 4);
        for px in self.pixels.chunks(3) {
            out.extend_from_slice(px);
            out.push(255);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn region_invariants() {
        assert!(RasterRegion::new(0.0, 1.0, 0.0, 1.0, 10, 10).is_ok());
        assert!(RasterRegion::new(1.0, 0.0, 0.0, 1.0, 10, 10).is_err());
        assert!(RasterRegion::new(0.0, 1.0, 0.0, 1.0, 0, 10).is_err());
    }

    #[test]
    fn pixel_centers() {
        let r = RasterRegion::new(-1.0, 1.0, -1.0, 1.0, 4, 4).unwrap();
        let c00 = r.center(0, 0);
        assert!((c00.re - (-0.75)).abs() < 1e-12);
        assert!((c00.im - 0.75).abs() < 1e-12, "row 0 is the top");
        let c33 = r.center(3, 3);
        assert!((c33.re - 0.75).abs() < 1e-12);
        assert!((c33.im - (-0.75)).abs() < 1e-12);
    }

    #[test]
    fn cyclic_bins_cover_principal_interval() {
        let part = StripPartition::cyclic(24, palette("duotone").unwrap()).unwrap();
        assert_eq!(part.bin_index(-std::f64::consts::PI + 1e-9), Some(0));
        assert_eq!(part.bin_index(std::f64::consts::PI), Some(23));
        // wrapping: rho and rho + 2 pi land in the same bin
        let rho = 1.234;
        assert_eq!(
            part.bin_index(rho),
            part.bin_index(rho + std::f64::consts::TAU)
        );
        assert_eq!(part.color_for(f64::NAN), SENTINEL_COLOR);
    }

    #[test]
    fn fixed_intervals_and_background() {
        let part = StripPartition::fixed(
            vec![(0.0, 1.0), (2.0, 3.0)],
            vec![[10, 10, 10], [20, 20, 20]],
        )
        .unwrap();
        assert_eq!(part.color_for(0.5), [10, 10, 10]);
        assert_eq!(part.color_for(2.5), [20, 20, 20]);
        assert_eq!(part.color_for(1.5), BACKGROUND_COLOR);
    }

    #[test]
    fn black_palette_rejected() {
        assert!(StripPartition::cyclic(4, vec![[0, 0, 0]]).is_err());
    }

    #[test]
    fn ppm_header_and_payload() {
        let mut img = Image::new(2, 1);
        img.set(0, 0, [1, 2, 3]);
        img.set(1, 0, [4, 5, 6]);
        let mut buf = Vec::new();
        img.write_ppm(&mut buf).unwrap();
        assert_eq!(&buf, b"P6\n2 1\n255\n\x01\x02\x03\x04\x05\x06");
    }

    #[test]
    fn hsv_wheel_endpoints() {
        assert_eq!(hsv_to_rgb(0.0, 1.0, 1.0), [255, 0, 0]);
        assert_eq!(hsv_to_rgb(120.0, 1.0, 1.0), [0, 255, 0]);
        assert_eq!(hsv_to_rgb(240.0, 1.0, 1.0), [0, 0, 255]);
    }
}
