use num_complex::Complex64;

use crate::{INFINITY_SENTINEL};

use super::EllipticError;

/// A period lattice `Z*g1 + Z*g2` together with everything needed to evaluate
/// the Weierstrass functions on it: the invariants `g2, g3`, the quasi-period
/// increments `eta1, eta2` of zeta across the two generators, and an
/// internally Gauss-reduced basis driving the theta series.
///
/// Generators are full lattice periods; the classical half-period quantities
/// carry an extra factor 1/2 against these. In particular the Legendre
/// relation reads `eta1*g2 - eta2*g1 = 2*pi*i` in this convention.
#[derive(Debug, Clone)]
pub struct Lattice {
    g1: Complex64,
    g2gen: Complex64,
    eta1: Complex64,
    eta2: Complex64,
    inv_g2: Complex64,
    inv_g3: Complex64,
    // Gauss-reduced basis (shortest vectors, Im(w2/w1) > 0) and its etas.
    w1: Complex64,
    w2: Complex64,
    eta_w1: Complex64,
    eta_w2: Complex64,
    nome: Complex64,
    theta1_prime0: Complex64,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.g1 == other.g1 && self.g2gen == other.g2gen
    }
}

impl Lattice {
    /// Builds the lattice from two generators. The second generator is negated
    /// if needed so that `Im(g2gen/g1) > 0`.
    pub fn new(g1: Complex64, g2gen: Complex64) -> Result<Self, EllipticError> {
        if g1.norm() == 0.0 || g2gen.norm() == 0.0 {
            return Err(EllipticError::DegenerateLattice);
        }
        let ratio = g2gen / g1;
        if ratio.im.abs() < 1e-12 * ratio.norm().max(1.0) {
            return Err(EllipticError::DegenerateLattice);
        }
        let g2gen = if ratio.im > 0.0 { g2gen } else { -g2gen };

        // Gauss/Lagrange reduction using only det = +1 moves (T: w2 -= m*w1,
        // S: (w1, w2) -> (w2, -w1)), tracked through the unimodular matrix so
        // quasi-periods can be mapped back to the user basis.
        let (mut w1, mut w2) = (g1, g2gen);
        // [a b; c d]: w1 = a*g1 + b*g2gen, w2 = c*g1 + d*g2gen.
        let (mut a, mut b, mut c, mut d) = (1i64, 0i64, 0i64, 1i64);
        if w2.norm() < w1.norm() {
            let (nw1, nw2) = (w2, -w1);
            w1 = nw1;
            w2 = nw2;
            let (na, nb, nc, nd) = (c, d, -a, -b);
            a = na;
            b = nb;
            c = nc;
            d = nd;
        }
        for _ in 0..64 {
            let mu = ((w2 * w1.conj()).re / w1.norm_sqr()).round();
            if mu != 0.0 {
                w2 -= mu * w1;
                c -= mu as i64 * a;
                d -= mu as i64 * b;
            }
            if w2.norm() < w1.norm() {
                let (nw1, nw2) = (w2, -w1);
                w1 = nw1;
                w2 = nw2;
                let (na, nb, nc, nd) = (c, d, -a, -b);
                a = na;
                b = nb;
                c = nc;
                d = nd;
            } else {
                break;
            }
        }
        debug_assert_eq!(a * d - b * c, 1);

        let tau = w2 / w1;
        debug_assert!(tau.im > 0.0);
        let nome = (Complex64::new(0.0, std::f64::consts::PI) * tau).exp();

        let t = theta1_derivs_at(Complex64::new(0.0, 0.0), nome);
        let theta1_prime0 = t[1];
        // eta for the reduced basis: eta_w1 = -(pi^2/(3 w1)) theta1'''(0)/theta1'(0),
        // eta_w2 from the Legendre relation eta_w1*w2 - eta_w2*w1 = 2 pi i.
        let pi = std::f64::consts::PI;
        let eta_w1 = -(pi * pi / 3.0) / w1 * (t[3] / t[1]);
        let two_pi_i = Complex64::new(0.0, 2.0 * pi);
        let eta_w2 = (eta_w1 * w2 - two_pi_i) / w1;

        // Map back to the user generators: (eta_w1, eta_w2) = U (eta1, eta2)
        // with U = [a b; c d], det 1, so (eta1, eta2) = U^{-1} (eta_w1, eta_w2).
        let eta1 = d as f64 * eta_w1 - b as f64 * eta_w2;
        let eta2 = -(c as f64) * eta_w1 + a as f64 * eta_w2;

        let mut lattice = Lattice {
            g1,
            g2gen,
            eta1,
            eta2,
            inv_g2: Complex64::new(0.0, 0.0),
            inv_g3: Complex64::new(0.0, 0.0),
            w1,
            w2,
            eta_w1,
            eta_w2,
            nome,
            theta1_prime0,
        };

        // Invariants from the half-period values e_i = wp(half period):
        // g2 = 2(e1^2+e2^2+e3^2), g3 = 4 e1 e2 e3 (with e1+e2+e3 = 0).
        let e1 = lattice.wp(0.5 * w1);
        let e2 = lattice.wp(0.5 * (w1 + w2));
        let e3 = lattice.wp(0.5 * w2);
        lattice.inv_g2 = 2.0 * (e1 * e1 + e2 * e2 + e3 * e3);
        lattice.inv_g3 = 4.0 * e1 * e2 * e3;

        Ok(lattice)
    }

    pub fn g1(&self) -> Complex64 {
        self.g1
    }

    pub fn g2gen(&self) -> Complex64 {
        self.g2gen
    }

    /// Invariant `g2` of `wp'^2 = 4 wp^3 - g2 wp - g3`.
    pub fn g2(&self) -> Complex64 {
        self.inv_g2
    }

    /// Invariant `g3`.
    pub fn g3(&self) -> Complex64 {
        self.inv_g3
    }

    /// Zeta increment across `g1`: `zeta(z + g1) = zeta(z) + eta1`.
    pub fn eta1(&self) -> Complex64 {
        self.eta1
    }

    /// Zeta increment across `g2gen`.
    pub fn eta2(&self) -> Complex64 {
        self.eta2
    }

    /// Splits `z = a*w1 + b*w2` over the reduced basis and returns the
    /// nearest-lattice-translate remainder plus the integer shift.
    fn reduce(&self, z: Complex64) -> (Complex64, i64, i64) {
        // Solve the 2x2 real system [Re w1 Re w2; Im w1 Im w2] (a,b) = (Re z, Im z).
        let det = self.w1.re * self.w2.im - self.w2.re * self.w1.im;
        let a = (z.re * self.w2.im - self.w2.re * z.im) / det;
        let b = (self.w1.re * z.im - z.re * self.w1.im) / det;
        let m = a.round() as i64;
        let n = b.round() as i64;
        let zr = z - m as f64 * self.w1 - n as f64 * self.w2;
        (zr, m, n)
    }

    fn eta_of(&self, m: i64, n: i64) -> Complex64 {
        m as f64 * self.eta_w1 + n as f64 * self.eta_w2
    }

    fn is_lattice_point(&self, zr: Complex64) -> bool {
        zr.norm() < 1e-12 * self.w1.norm()
    }

    /// Weierstrass `wp(z)`; lattice points map to the infinity sentinel.
    pub fn wp(&self, z: Complex64) -> Complex64 {
        let (zr, _, _) = self.reduce(z);
        if self.is_lattice_point(zr) {
            return INFINITY_SENTINEL;
        }
        let v = std::f64::consts::PI * zr / self.w1;
        let t = theta1_derivs_at(v, self.nome);
        let s = std::f64::consts::PI / self.w1;
        let g1v = t[1] / t[0];
        // wp = -eta_w1/w1 - (pi/w1)^2 d/dv (theta1'/theta1)
        -(self.eta_w1 / self.w1) - s * s * (t[2] / t[0] - g1v * g1v)
    }

    /// `wp'(z)`.
    pub fn wp_prime(&self, z: Complex64) -> Complex64 {
        let (zr, _, _) = self.reduce(z);
        if self.is_lattice_point(zr) {
            return INFINITY_SENTINEL;
        }
        let v = std::f64::consts::PI * zr / self.w1;
        let t = theta1_derivs_at(v, self.nome);
        let s = std::f64::consts::PI / self.w1;
        let g = t[1] / t[0];
        let gp = t[2] / t[0] - g * g;
        let gpp = t[3] / t[0] - (t[1] / t[0]) * (t[2] / t[0]) - 2.0 * g * gp;
        -s * s * s * gpp
    }

    /// Quasi-periodic `zeta(z)`.
    pub fn wzeta(&self, z: Complex64) -> Complex64 {
        let (zr, m, n) = self.reduce(z);
        if self.is_lattice_point(zr) {
            return INFINITY_SENTINEL;
        }
        let v = std::f64::consts::PI * zr / self.w1;
        let t = theta1_derivs_at(v, self.nome);
        let base = self.eta_w1 * zr / self.w1
            + (std::f64::consts::PI / self.w1) * (t[1] / t[0]);
        base + self.eta_of(m, n)
    }

    /// Entire `sigma(z)`; exactly zero on the lattice.
    pub fn wsigma(&self, z: Complex64) -> Complex64 {
        let (zr, m, n) = self.reduce(z);
        if self.is_lattice_point(zr) && zr.norm() == 0.0 && m == 0 && n == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let v = std::f64::consts::PI * zr / self.w1;
        let t = theta1_derivs_at(v, self.nome);
        let base = self.w1 * (self.eta_w1 * zr * zr / (2.0 * self.w1)).exp() * t[0]
            / (std::f64::consts::PI * self.theta1_prime0);
        if m == 0 && n == 0 {
            return base;
        }
        // sigma(z + Omega) = eps * exp(eta(Omega) (z + Omega/2)) * sigma(z)
        // for Omega = m*w1 + n*w2, eps = (-1)^{m+n+mn}.
        let omega = m as f64 * self.w1 + n as f64 * self.w2;
        let eta = self.eta_of(m, n);
        let eps = if (m + n + m * n) % 2 == 0 { 1.0 } else { -1.0 };
        eps * (eta * (zr + 0.5 * omega)).exp() * base
    }

    /// `zeta^{(k)}(z)` for `k = 0..=upto` (`upto <= 6`), using
    /// `zeta'' = -wp'`, `wp'' = 6 wp^2 - g2/2` and its derivatives.
    pub fn zeta_derivs(&self, z: Complex64, upto: usize) -> Vec<Complex64> {
        assert!(upto <= 6, "zeta derivatives supported up to order 6");
        let mut out = Vec::with_capacity(upto + 1);
        out.push(self.wzeta(z));
        if upto >= 1 {
            let p = self.wp(z);
            let pp = self.wp_prime(z);
            let g2 = self.inv_g2;
            let d2p = 6.0 * p * p - 0.5 * g2;
            let d3p = 12.0 * p * pp;
            let d4p = 12.0 * pp * pp + 72.0 * p * p * p - 6.0 * g2 * p;
            let d5p = pp * (360.0 * p * p - 18.0 * g2);
            let chain = [p, pp, d2p, d3p, d4p, d5p];
            for item in chain.iter().take(upto) {
                out.push(-item);
            }
        }
        out
    }
}

/// `theta1(v, q)` and its first three derivatives in `v`, by the sine series
/// `theta1 = 2 sum (-1)^n q^{(n+1/2)^2} sin((2n+1)v)`.
fn theta1_derivs_at(v: Complex64, q: Complex64) -> [Complex64; 4] {
    let mut t = [Complex64::new(0.0, 0.0); 4];
    let log_q = q.ln();
    for n in 0..32u32 {
        let k = 2 * n + 1;
        let kf = k as f64;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let weight = ((n as f64 + 0.5) * (n as f64 + 0.5) * log_q).exp() * sign * 2.0;
        let (s, c) = {
            let kv = kf * v;
            (kv.sin(), kv.cos())
        };
        let term0 = weight * s;
        t[0] += term0;
        t[1] += weight * kf * c;
        t[2] -= weight * kf * kf * s;
        t[3] -= weight * kf * kf * kf * c;
        // Terms decay like q^{(n+1/2)^2 - (n+1/2)}; stop once negligible.
        if n > 2 && weight.norm() * (1.0 + kf * kf * kf) * (kf * v.im.abs()).exp() < 1e-18 {
            break;
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::is_singular;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn paper_lattice() -> Lattice {
        Lattice::new(c(1.0, 0.0), c(0.25, 1.25)).unwrap()
    }

    /// Brute-force symmetric-pair lattice sum; the +/- pairing pushes the tail
    /// to O(1/N^2), good enough for an independent oracle.
    fn wp_brute(l: &Lattice, z: Complex64, n_max: i64) -> Complex64 {
        let mut acc = 1.0 / (z * z);
        for m in -n_max..=n_max {
            for n in 0..=n_max {
                if n == 0 && m <= 0 {
                    continue;
                }
                let w = m as f64 * l.g1() + n as f64 * l.g2gen();
                let a = 1.0 / ((z - w) * (z - w));
                let b = 1.0 / ((z + w) * (z + w));
                acc += a + b - 2.0 / (w * w);
            }
        }
        acc
    }

    fn zeta_brute(l: &Lattice, z: Complex64, n_max: i64) -> Complex64 {
        let mut acc = 1.0 / z;
        for m in -n_max..=n_max {
            for n in 0..=n_max {
                if n == 0 && m <= 0 {
                    continue;
                }
                let w = m as f64 * l.g1() + n as f64 * l.g2gen();
                acc += 1.0 / (z - w) + 1.0 / (z + w) + 2.0 * z / (w * w);
            }
        }
        acc
    }

    #[test]
    fn square_lattice_g3_vanishes() {
        let l = Lattice::new(c(2.0, 0.0), c(0.0, 2.0)).unwrap();
        assert!(l.g3().norm() < 1e-9 * l.g2().norm().max(1.0));
    }

    #[test]
    fn hexagonal_lattice_g2_vanishes() {
        let g2gen = Complex64::from_polar(2.0, std::f64::consts::PI / 3.0);
        let l = Lattice::new(c(2.0, 0.0), g2gen).unwrap();
        assert!(l.g2().norm() < 1e-9 * l.g3().norm().max(1.0));
    }

    #[test]
    fn wp_at_half_period_matches_brute_force_sum_and_kills_wp_prime() {
        let l = Lattice::new(c(2.0, 0.0), c(0.0, 2.0)).unwrap();
        let half = c(1.0, 0.0);
        let e1 = l.wp(half);
        assert!(e1.im.abs() < 1e-9, "e1 should be real on a square lattice");
        let brute = wp_brute(&l, half, 700);
        assert!(
            (e1 - brute).norm() < 2e-5 * e1.norm(),
            "theta {e1} vs brute {brute}"
        );
        assert!(l.wp_prime(half).norm() < 1e-8);
    }

    #[test]
    fn wp_and_zeta_match_brute_force_on_paper_lattice() {
        let l = paper_lattice();
        let pts = [c(0.31, 0.17), c(-0.2, 0.6), c(0.45, -0.33)];
        for &z in &pts {
            let w = l.wp(z);
            let wb = wp_brute(&l, z, 500);
            assert!(
                (w - wb).norm() < 5e-5 * w.norm().max(1.0),
                "wp({z}): {w} vs {wb}"
            );
            let ze = l.wzeta(z);
            let zb = zeta_brute(&l, z, 500);
            assert!(
                (ze - zb).norm() < 5e-5 * ze.norm().max(1.0),
                "zeta({z}): {ze} vs {zb}"
            );
        }
    }

    #[test]
    fn differential_equation_residual() {
        let l = paper_lattice();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let z = rng.gen_range(0.05..0.95) * l.g1()
                + rng.gen_range(0.05..0.95) * l.g2gen();
            let p = l.wp(z);
            let pp = l.wp_prime(z);
            let lhs = pp * pp;
            let rhs = 4.0 * p * p * p - l.g2() * p - l.g3();
            let scale = lhs.norm().max(rhs.norm()).max(1.0);
            assert!((lhs - rhs).norm() < 1e-7 * scale, "residual at {z}");
        }
    }

    #[test]
    fn zeta_prime_is_minus_wp_and_sigma_log_derivative_is_zeta() {
        let l = paper_lattice();
        let z = c(0.3, 0.41);
        let h = 1e-6;
        let dz = (l.wzeta(z + c(h, 0.0)) - l.wzeta(z - c(h, 0.0))) / (2.0 * h);
        assert!((dz + l.wp(z)).norm() < 1e-6 * l.wp(z).norm().max(1.0));
        let ds = (l.wsigma(z + c(h, 0.0)) - l.wsigma(z - c(h, 0.0))) / (2.0 * h);
        let logderiv = ds / l.wsigma(z);
        assert!((logderiv - l.wzeta(z)).norm() < 1e-6 * l.wzeta(z).norm().max(1.0));
    }

    #[test]
    fn quasi_periodicity_of_zeta_and_sigma() {
        let l = paper_lattice();
        let z = c(0.27, 0.35);
        let jump = l.wzeta(z + l.g1()) - l.wzeta(z);
        assert!((jump - l.eta1()).norm() < 1e-8 * l.eta1().norm().max(1.0));
        let jump2 = l.wzeta(z + l.g2gen()) - l.wzeta(z);
        assert!((jump2 - l.eta2()).norm() < 1e-8 * l.eta2().norm().max(1.0));

        // sigma(z + g1) = -exp(eta1 (z + g1/2)) sigma(z)
        let lhs = l.wsigma(z + l.g1());
        let rhs = -(l.eta1() * (z + 0.5 * l.g1())).exp() * l.wsigma(z);
        assert!((lhs - rhs).norm() < 1e-6 * lhs.norm().max(1.0));
    }

    #[test]
    fn legendre_relation() {
        for l in [
            paper_lattice(),
            Lattice::new(c(2.0, 0.0), c(0.0, 2.0)).unwrap(),
            Lattice::new(c(1.3, -0.4), c(0.2, 2.9)).unwrap(),
        ] {
            let rel = l.eta1() * l.g2gen() - l.eta2() * l.g1();
            let expected = c(0.0, 2.0 * std::f64::consts::PI);
            assert!((rel - expected).norm() < 1e-8, "legendre: {rel}");
        }
    }

    #[test]
    fn lattice_points_are_singular_for_wp_and_zero_for_sigma() {
        let l = paper_lattice();
        assert!(is_singular(l.wp(c(0.0, 0.0))));
        assert!(is_singular(l.wzeta(l.g1())));
        assert_eq!(l.wsigma(c(0.0, 0.0)).norm(), 0.0);
    }

    #[test]
    fn orientation_normalization_flips_second_generator() {
        let l = Lattice::new(c(1.0, 0.0), c(0.0, -1.0)).unwrap();
        assert_eq!(l.g2gen(), c(0.0, 1.0));
        assert!(Lattice::new(c(1.0, 0.0), c(2.0, 0.0)).is_err());
    }

    #[test]
    fn argument_reduction_keeps_wp_periodic_far_from_cell() {
        let l = paper_lattice();
        let z = c(0.3, 0.2);
        let far = z + 7.0 * l.g1() - 11.0 * l.g2gen();
        assert!((l.wp(z) - l.wp(far)).norm() < 1e-9 * l.wp(z).norm().max(1.0));
        assert!((l.wp_prime(z) - l.wp_prime(far)).norm() < 1e-9 * l.wp_prime(z).norm().max(1.0));
    }

    #[test]
    fn tall_lattice_still_accurate() {
        // Severely skewed user basis; internal reduction has to fix it.
        let l = Lattice::new(c(1.0, 0.0), c(7.5, 10.0)).unwrap();
        let z = c(0.4, 0.13);
        let w = l.wp(z);
        let wb = wp_brute(&l, z, 400);
        assert!((w - wb).norm() < 1e-4 * w.norm().max(1.0), "{w} vs {wb}");
        let rel = l.eta1() * l.g2gen() - l.eta2() * l.g1();
        assert!((rel - c(0.0, 2.0 * std::f64::consts::PI)).norm() < 1e-8);
    }
}
