use num_complex::Complex64;

use crate::algebra::{partial_fractions, Polynomial, RationalFunction};

use super::NewtonError;

/// Distinguished parameter `Psi(z) = integral of dz/f` of a rational field,
/// held in closed form: an antiderivative polynomial, logarithmic terms
/// `lambda_j log(z - b_j)`, principal-part terms `sum c_k (z - b_j)^{-k}`,
/// and an additive constant normalizing `Psi(base_point) = 0`.
///
/// All logarithms are principal-branch; branch jumps are the caller's business
/// (wrapped differences downstream).
#[derive(Debug, Clone)]
pub struct ClosedFormPsi {
    polynomial_part: Polynomial,
    log_terms: Vec<(Complex64, Complex64)>,
    principal_terms: Vec<(Complex64, Vec<Complex64>)>,
    base_point: Complex64,
    constant: Complex64,
}

impl ClosedFormPsi {
    /// Integrates `1/f` in closed form. `z0` must not be a zero of `f`
    /// (a pole is fine: the 1-form vanishes there and `Psi` stays finite).
    pub fn build(f: &RationalFunction, z0: Complex64) -> Result<Self, NewtonError> {
        if f.is_zero() {
            return Err(NewtonError::ZeroField);
        }
        // Zeros of f are the poles of omega = dz/f.
        let zero_scale = f.numerator().coeff_scale() * z0.norm().max(1.0).powi(
            f.numerator().degree().unwrap_or(0) as i32,
        );
        if f.numerator().eval(z0).norm() < 1e-12 * zero_scale.max(f64::MIN_POSITIVE) {
            return Err(NewtonError::BasePointIsZero { z0 });
        }

        let omega = f.recip()?;
        let pf = partial_fractions(&omega)?;
        let polynomial_part = pf.polynomial_part.antiderivative();
        let mut log_terms = Vec::new();
        let mut principal_terms = Vec::new();
        for term in &pf.terms {
            let lambda = term.residue();
            if lambda.norm() > 0.0 {
                log_terms.push((term.pole, lambda));
            }
            if term.coefficients.len() > 1 {
                // integral of A_k (z-b)^{-k} = A_k/(1-k) (z-b)^{1-k}; store as
                // coefficients c[m] of (z-b)^{-m}, m = k-1.
                let coeffs: Vec<Complex64> = term.coefficients[1..]
                    .iter()
                    .enumerate()
                    .map(|(idx, &a)| {
                        let k = idx + 2;
                        a / (1.0 - k as f64)
                    })
                    .collect();
                if coeffs.iter().any(|c| c.norm() > 0.0) {
                    principal_terms.push((term.pole, coeffs));
                }
            }
        }

        let mut psi = ClosedFormPsi {
            polynomial_part,
            log_terms,
            principal_terms,
            base_point: z0,
            constant: Complex64::new(0.0, 0.0),
        };
        psi.constant = -psi.eval(z0);
        Ok(psi)
    }

    pub fn polynomial_part(&self) -> &Polynomial {
        &self.polynomial_part
    }

    /// `(b_j, lambda_j)` pairs contributing `lambda_j log(z - b_j)`; the
    /// lambdas are exactly the residues of `omega = dz/f`.
    pub fn log_terms(&self) -> &[(Complex64, Complex64)] {
        &self.log_terms
    }

    /// `(b_j, c[1..m])` pairs contributing `sum c_k (z - b_j)^{-k}`.
    pub fn principal_terms(&self) -> &[(Complex64, Vec<Complex64>)] {
        &self.principal_terms
    }

    pub fn base_point(&self) -> Complex64 {
        self.base_point
    }

    pub fn constant(&self) -> Complex64 {
        self.constant
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = self.polynomial_part.eval(z) + self.constant;
        for &(b, lambda) in &self.log_terms {
            acc += lambda * (z - b).ln();
        }
        for (b, coeffs) in &self.principal_terms {
            let w = 1.0 / (z - b);
            let mut horner = Complex64::new(0.0, 0.0);
            for &c in coeffs.iter().rev() {
                horner = (horner + c) * w;
            }
            acc += horner;
        }
        acc
    }

    /// `Psi'(z)`, which equals `1/f(z)` by construction.
    pub fn eval_derivative(&self, z: Complex64) -> Complex64 {
        let mut acc = self.polynomial_part.derivative().eval(z);
        for &(b, lambda) in &self.log_terms {
            acc += lambda / (z - b);
        }
        for (b, coeffs) in &self.principal_terms {
            let w = 1.0 / (z - b);
            for (idx, &c) in coeffs.iter().enumerate() {
                let k = (idx + 1) as f64;
                acc += -k * c * w.powi(idx as i32 + 2);
            }
        }
        acc
    }

    /// `k * Psi` (used for the perpendicular field, `Psi -> -i Psi`).
    pub fn scale(&self, k: Complex64) -> ClosedFormPsi {
        ClosedFormPsi {
            polynomial_part: self.polynomial_part.scale(k),
            log_terms: self
                .log_terms
                .iter()
                .map(|&(b, l)| (b, l * k))
                .collect(),
            principal_terms: self
                .principal_terms
                .iter()
                .map(|(b, cs)| (*b, cs.iter().map(|&c| c * k).collect()))
                .collect(),
            base_point: self.base_point,
            constant: self.constant * k,
        }
    }
}
