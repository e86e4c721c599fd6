use num_complex::Complex64;
use rayon::prelude::*;

use crate::expr::Expr;
use crate::newton::FieldSpec;
use crate::{is_singular, wrap_angle};

use super::{
    hsv_to_rgb, Image, RasterRegion, RenderError, Rgb, StripPartition, SENTINEL_COLOR,
};

/// Colors each pixel by the strip bin of `rho` at its center. Singular
/// evaluations get the reserved sentinel color. Rows are rendered in parallel
/// but written to disjoint slices, so the output is scheduling-independent.
pub fn render_strips_plane(
    spec: &FieldSpec,
    region: &RasterRegion,
    part: &StripPartition,
) -> Image {
    let mut img = Image::new(region.width, region.height);
    let width = region.width;
    img.rows_mut()
        .enumerate()
        .par_bridge()
        .for_each(|(row, buf)| {
            for col in 0..width {
                let z = region.center(col, row);
                let rgb = part.color_for(spec.rho(z));
                buf[col * 3..col * 3 + 3].copy_from_slice(&rgb);
            }
        });
    img
}

/// Domain-coloring phase portrait of a function: hue is `arg f(z)` on a full
/// saturation/value color wheel; zeros and singular points paint black.
pub fn render_phase_portrait(function: &Expr, region: &RasterRegion) -> Image {
    let mut img = Image::new(region.width, region.height);
    let width = region.width;
    img.rows_mut()
        .enumerate()
        .par_bridge()
        .for_each(|(row, buf)| {
            for col in 0..width {
                let z = region.center(col, row);
                let v = function.eval(z);
                let rgb = if is_singular(v) || v == Complex64::new(0.0, 0.0) {
                    SENTINEL_COLOR
                } else {
                    hsv_to_rgb(v.arg().to_degrees(), 1.0, 1.0)
                };
                buf[col * 3..col * 3 + 3].copy_from_slice(&rgb);
            }
        });
    img
}

/// Pixel mask of one specific level curve (a trajectory through `z0`).
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl Mask {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn is_marked(&self, col: usize, row: usize) -> bool {
        self.bits[row * self.width + col]
    }

    pub fn marked_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn iter_marked(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i % w, i / w))
    }

    /// Paints the marked pixels onto an image.
    pub fn overlay(&self, img: &mut Image, color: Rgb) {
        for (col, row) in self.iter_marked() {
            img.set(col, row, color);
        }
    }
}

/// Marks the pixels crossed by the trajectory through `z0`, following the
/// sign-change test along the gradient direction of `rho`: with
/// `e = X_perp(z)/|X_perp(z)|` (the direction of maximum growth of `rho`) and
/// `delta` the pixel diagonal, a pixel is marked iff
/// `wrapped(rho(z + delta e) - rho(z0)) * wrapped(rho(z - delta e) - rho(z0)) < 0`
/// and the sign change passes through zero rather than through the +/- pi
/// seam (a seam flip has both wrapped values near +/- pi and is a branch
/// artifact, not a crossing of the level).
pub fn render_level_curve(
    spec: &FieldSpec,
    z0: Complex64,
    region: &RasterRegion,
) -> Result<Mask, RenderError> {
    let rho0 = spec.rho(z0);
    if !rho0.is_finite() {
        return Err(RenderError::SingularBasePoint);
    }
    let delta = region.pixel_diagonal();
    let width = region.width;
    let mut bits = vec![false; region.width * region.height];
    bits.par_chunks_mut(width)
        .enumerate()
        .for_each(|(row, buf)| {
            for (col, slot) in buf.iter_mut().enumerate() {
                let z = region.center(col, row);
                let f = spec.f(z);
                if is_singular(f) || f == Complex64::new(0.0, 0.0) {
                    continue;
                }
                // X_perp = i f; normalize to step one pixel diagonal.
                let e = Complex64::new(0.0, 1.0) * f / f.norm();
                let ahead = spec.rho(z + delta * e);
                let behind = spec.rho(z - delta * e);
                if !ahead.is_finite() || !behind.is_finite() {
                    continue;
                }
                let a = wrap_angle(ahead - rho0);
                let b = wrap_angle(behind - rho0);
                *slot = a * b < 0.0 && a.abs() + b.abs() < std::f64::consts::PI;
            }
        });
    Ok(Mask {
        width: region.width,
        height: region.height,
        bits,
    })
}
