//! Exact flows and phase portraits of singular complex analytic vector fields.
//!
//! A vector field `X = f(z) d/dz` with zeros, poles or essential singularities
//! is rectified by two global maps: the distinguished parameter
//! `Psi(z) = integral of dz/f` (a flow box, `Psi' = 1/f`) and the Newton map
//! `Phi(z) = exp(-Psi(z))`, which satisfies `X = -Phi/Phi' d/dz`. The two real
//! first integrals
//!
//! ```text
//! rho(z)   = arg Phi(z) = -Im Psi(z)      (constant along trajectories)
//! theta(z) = -log|Phi(z)| = Re Psi(z)     (advances linearly with flow time)
//! ```
//!
//! solve the flow exactly: the trajectory through `z0` is the level curve
//! `rho = rho(z0)`, and the point at time `tau` sits on `theta = theta(z0) + tau`.
//!
//! The crate builds `Psi` and `Phi` in closed form for rational fields (Euclid
//! division plus partial fractions), for fields of the shape
//! `rational * exp(rational)`, and for elliptic fields through the Weierstrass
//! sigma/zeta functions. On top of that sit an exact flow solver, reference
//! RK4/RKF45 integrators with error metrics, and raster/sphere renderers for
//! strip flows, separatrices and phase portraits.

pub mod algebra;
pub mod elliptic;
pub mod expr;
pub mod flow;
pub mod newton;
pub mod render;

pub use num_complex::Complex64;

/// Point-at-infinity sentinel returned by evaluators instead of panicking on
/// division by exact zero or a lattice point.
pub const INFINITY_SENTINEL: Complex64 = Complex64::new(f64::INFINITY, f64::INFINITY);

/// True for values that left the finite plane (pole hit, overflow, NaN).
pub fn is_singular(v: Complex64) -> bool {
    !v.re.is_finite() || !v.im.is_finite()
}

/// Wrap an angle difference into the principal interval `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    if !a.is_finite() {
        return f64::NAN;
    }
    let two_pi = std::f64::consts::TAU;
    let mut w = a % two_pi;
    if w <= -std::f64::consts::PI {
        w += two_pi;
    } else if w > std::f64::consts::PI {
        w -= two_pi;
    }
    w
}
