use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::newton::FieldSpec;
use crate::{INFINITY_SENTINEL};

use super::{RenderError, Rgb, StripPartition, SENTINEL_COLOR};

/// Almost-uniform triangulation of the unit sphere: an octahedron refined by
/// edge-midpoint 1-to-4 splits, every new vertex renormalized to the sphere.
#[derive(Debug, Clone)]
pub struct SphereMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    pub depth: usize,
}

/// Builds the mesh at the given subdivision depth: `8 * 4^depth` triangles,
/// consistently outward-oriented, shared vertices deduplicated.
pub fn build_sphere_mesh(depth: usize) -> Result<SphereMesh, RenderError> {
    if depth > 8 {
        return Err(RenderError::DepthTooLarge(depth));
    }
    let mut vertices: Vec<[f64; 3]> = vec![
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ];
    let mut triangles: Vec<[usize; 3]> = vec![
        [0, 2, 4],
        [2, 1, 4],
        [1, 3, 4],
        [3, 0, 4],
        [2, 0, 5],
        [1, 2, 5],
        [3, 1, 5],
        [0, 3, 5],
    ];

    for _ in 0..depth {
        let mut midpoint_cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for &[a, b, c] in &triangles {
            let ab = midpoint(&mut vertices, &mut midpoint_cache, a, b);
            let bc = midpoint(&mut vertices, &mut midpoint_cache, b, c);
            let ca = midpoint(&mut vertices, &mut midpoint_cache, c, a);
            next.push([a, ab, ca]);
            next.push([ab, b, bc]);
            next.push([ca, bc, c]);
            next.push([ab, bc, ca]);
        }
        triangles = next;
    }

    Ok(SphereMesh {
        vertices,
        triangles,
        depth,
    })
}

fn midpoint(
    vertices: &mut Vec<[f64; 3]>,
    cache: &mut HashMap<(usize, usize), usize>,
    a: usize,
    b: usize,
) -> usize {
    let key = if a < b { (a, b) } else { (b, a) };
    if let Some(&idx) = cache.get(&key) {
        return idx;
    }
    let va = vertices[a];
    let vb = vertices[b];
    let mut m = [va[0] + vb[0], va[1] + vb[1], va[2] + vb[2]];
    let norm = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
    m = [m[0] / norm, m[1] / norm, m[2] / norm];
    vertices.push(m);
    let idx = vertices.len() - 1;
    cache.insert(key, idx);
    idx
}

/// Stereographic projection from the north pole `(0,0,1)`:
/// `zeta = (p_x + i p_y)/(1 - p_z)`; the pole itself maps to the
/// point-at-infinity sentinel. The south pole is the chart origin.
pub fn stereographic_to_plane(p: [f64; 3]) -> Complex64 {
    let denom = 1.0 - p[2];
    if denom <= 0.0 || denom < 1e-15 {
        return INFINITY_SENTINEL;
    }
    Complex64::new(p[0] / denom, p[1] / denom)
}

/// Inverse projection: `(2x, 2y, |z|^2 - 1)/(|z|^2 + 1)`; the sentinel maps
/// back to the north pole.
pub fn plane_to_stereographic(z: Complex64) -> [f64; 3] {
    if crate::is_singular(z) {
        return [0.0, 0.0, 1.0];
    }
    let n = z.norm_sqr();
    [2.0 * z.re / (n + 1.0), 2.0 * z.im / (n + 1.0), (n - 1.0) / (n + 1.0)]
}

/// Colors each triangle by the strip bin of `rho` at its barycenter
/// (renormalized to the sphere, projected to the plane). Triangles touching
/// the north pole chart singularity get the sentinel color.
pub fn render_strips_sphere(
    spec: &FieldSpec,
    mesh: &SphereMesh,
    part: &StripPartition,
) -> Vec<Rgb> {
    mesh.triangles
        .par_iter()
        .map(|&[a, b, c]| {
            if [a, b, c].iter().any(|&v| is_north_pole(mesh.vertices[v])) {
                return SENTINEL_COLOR;
            }
            let va = mesh.vertices[a];
            let vb = mesh.vertices[b];
            let vc = mesh.vertices[c];
            let mut bary = [
                (va[0] + vb[0] + vc[0]) / 3.0,
                (va[1] + vb[1] + vc[1]) / 3.0,
                (va[2] + vb[2] + vc[2]) / 3.0,
            ];
            let norm = (bary[0] * bary[0] + bary[1] * bary[1] + bary[2] * bary[2]).sqrt();
            bary = [bary[0] / norm, bary[1] / norm, bary[2] / norm];
            let z = stereographic_to_plane(bary);
            if crate::is_singular(z) {
                return SENTINEL_COLOR;
            }
            part.color_for(spec.rho(z))
        })
        .collect()
}

fn is_north_pole(v: [f64; 3]) -> bool {
    (v[0].abs() < 1e-12) && (v[1].abs() < 1e-12) && ((v[2] - 1.0).abs() < 1e-12)
}

/// ASCII PLY with float vertices and per-face uchar RGB. `colors` must match
/// the triangle count when given; otherwise faces are uniform light gray.
pub fn write_ply(
    mesh: &SphereMesh,
    colors: Option<&[Rgb]>,
    out: &mut dyn std::io::Write,
) -> std::io::Result<()> {
    writeln!(out, "ply")?;
    writeln!(out, "format ascii 1.0")?;
    writeln!(out, "element vertex {}", mesh.vertices.len())?;
    writeln!(out, "property float x")?;
    writeln!(out, "property float y")?;
    writeln!(out, "property float z")?;
    writeln!(out, "element face {}", mesh.triangles.len())?;
    writeln!(out, "property list uchar int vertex_indices")?;
    writeln!(out, "property uchar red")?;
    writeln!(out, "property uchar green")?;
    writeln!(out, "property uchar blue")?;
    writeln!(out, "end_header")?;
    for v in &mesh.vertices {
        writeln!(out, "{} {} {}", v[0], v[1], v[2])?;
    }
    for (i, t) in mesh.triangles.iter().enumerate() {
        let rgb = colors.map_or([200, 200, 200], |cs| cs[i]);
        writeln!(
            out,
            "3 {} {} {} {} {} {}",
            t[0], t[1], t[2], rgb[0], rgb[1], rgb[2]
        )?;
    }
    Ok(())
}
