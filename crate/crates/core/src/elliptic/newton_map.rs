use num_complex::Complex64;
use std::sync::Arc;

use super::{EllipticError, Lattice};

/// Principal part of an elliptic function at one pole of the fundamental cell:
/// `coefficients[j-1]` multiplies `(z - pole)^{-j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticPrincipalPart {
    pub pole: Complex64,
    pub coefficients: Vec<Complex64>,
}

impl EllipticPrincipalPart {
    pub fn residue(&self) -> Complex64 {
        self.coefficients
            .first()
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }
}

/// Newton map of an elliptic field, assembled from sigma/zeta building blocks:
///
/// ```text
/// Phi(z) = C' e^{-Cz} prod_k sigma(z - b_k)^{-A_{1k}}
///                       exp[ sum_{j>=2} (-1)^j A_{jk}/(j-1)! zeta^{(j-2)}(z - b_k) ]
/// ```
///
/// so that `-Phi'/Phi` is the elliptic function with principal parts `A_{jk}`
/// at the `b_k` and constant term `C`.
#[derive(Debug, Clone)]
pub struct EllipticNewtonMap {
    lattice: Arc<Lattice>,
    parts: Vec<EllipticPrincipalPart>,
    c: Complex64,
    c_prime: Complex64,
}

impl EllipticNewtonMap {
    pub fn new(
        lattice: Arc<Lattice>,
        parts: Vec<EllipticPrincipalPart>,
        c: Complex64,
        c_prime: Complex64,
    ) -> Result<Self, EllipticError> {
        let mut residue_sum = Complex64::new(0.0, 0.0);
        let mut scale: f64 = 0.0;
        for p in &parts {
            if p.coefficients.is_empty() {
                return Err(EllipticError::EmptyPrincipalPart);
            }
            if p.coefficients.len() > 8 {
                return Err(EllipticError::PoleOrderTooHigh(p.coefficients.len()));
            }
            residue_sum += p.residue();
            scale = scale.max(p.residue().norm());
        }
        if residue_sum.norm() > 1e-9 * scale.max(1.0) {
            return Err(EllipticError::ResidueSumNonzero);
        }
        Ok(EllipticNewtonMap {
            lattice,
            parts,
            c,
            c_prime,
        })
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn phi(&self, z: Complex64) -> Complex64 {
        let mut log_phi = self.c_prime.ln() - self.c * z;
        for part in &self.parts {
            let w = z - part.pole;
            let a1 = part.residue();
            if a1.norm() > 0.0 {
                log_phi += -a1 * self.lattice.wsigma(w).ln();
            }
            if part.coefficients.len() > 1 {
                let derivs = self.lattice.zeta_derivs(w, part.coefficients.len() - 2);
                let mut fact = 1.0; // (j-1)! running value
                for (j, &a) in part.coefficients.iter().enumerate().skip(1) {
                    let order = j + 1; // coefficient of (z-b)^{-order}
                    fact *= j as f64;
                    let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
                    log_phi += sign * a / fact * derivs[order - 2];
                }
            }
        }
        log_phi.exp()
    }

    /// Logarithmic derivative `Phi'/Phi`, computed term by term.
    pub fn log_deriv(&self, z: Complex64) -> Complex64 {
        let mut acc = -self.c;
        for part in &self.parts {
            let w = z - part.pole;
            let a1 = part.residue();
            if a1.norm() > 0.0 {
                acc += -a1 * self.lattice.wzeta(w);
            }
            if part.coefficients.len() > 1 {
                let derivs = self.lattice.zeta_derivs(w, part.coefficients.len() - 1);
                let mut fact = 1.0;
                for (j, &a) in part.coefficients.iter().enumerate().skip(1) {
                    let order = j + 1;
                    fact *= j as f64;
                    let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
                    acc += sign * a / fact * derivs[order - 1];
                }
            }
        }
        acc
    }

    /// The vector-field coefficient `f = -Phi/Phi'`.
    pub fn field(&self, z: Complex64) -> Complex64 {
        -1.0 / self.log_deriv(z)
    }

    /// `Phi^k`: scales `log Phi` by `k` (residue sums stay zero), so the
    /// field picks up a factor `1/k`.
    pub fn scale_log(&self, k: Complex64) -> Result<Self, EllipticError> {
        EllipticNewtonMap::new(
            Arc::clone(&self.lattice),
            self.parts
                .iter()
                .map(|p| EllipticPrincipalPart {
                    pole: p.pole,
                    coefficients: p.coefficients.iter().map(|&c| c * k).collect(),
                })
                .collect(),
            self.c * k,
            self.c_prime.powc(k),
        )
    }
}

/// Solves for the constant `C` of the map by matching `-Phi'/Phi = g` at one
/// regular sample point: the principal parts fix everything except the
/// additive constant of the logarithmic derivative.
pub fn fit_field_constant(
    lattice: &Arc<Lattice>,
    parts: &[EllipticPrincipalPart],
    g: impl Fn(Complex64) -> Complex64,
    sample: Complex64,
) -> Result<Complex64, EllipticError> {
    let trial = EllipticNewtonMap::new(
        Arc::clone(lattice),
        parts.to_vec(),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
    )?;
    // log_deriv = -C + S(z); want C - S(sample) such that -log_deriv = g.
    Ok(g(sample) + trial.log_deriv(sample))
}
