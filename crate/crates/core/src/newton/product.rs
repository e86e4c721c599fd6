use num_complex::Complex64;
use std::fmt::Write as _;

use crate::algebra::Polynomial;
use crate::{is_singular, INFINITY_SENTINEL};

use super::ClosedFormPsi;

/// Newton map in factored form,
///
/// ```text
/// Phi(z) = C e^{P0(z)} prod_j (z - b_j)^{A_j} e^{P_j(1/(z - b_j))},
/// ```
///
/// obtained from a closed-form `Psi` via `Phi = e^{-Psi}`: `P0` is the negated
/// antiderivative polynomial, `A_j = -lambda_j`, and `P_j` collects the negated
/// principal terms.
#[derive(Debug, Clone)]
pub struct NewtonMapProduct {
    constant: Complex64,
    poly: Polynomial,
    factors: Vec<ProductFactor>,
}

#[derive(Debug, Clone)]
pub struct ProductFactor {
    pub root: Complex64,
    pub exponent: Complex64,
    /// Coefficients `p_k` of `P_j(w) = sum_k p_k w^k`, `k >= 1`.
    pub principal: Vec<Complex64>,
}

impl NewtonMapProduct {
    pub fn from_psi(psi: &ClosedFormPsi) -> Self {
        let minus_one = Complex64::new(-1.0, 0.0);
        let mut factors: Vec<ProductFactor> = Vec::new();
        fn factor_at(factors: &mut Vec<ProductFactor>, root: Complex64) -> usize {
            match factors.iter().position(|f| f.root == root) {
                Some(i) => i,
                None => {
                    factors.push(ProductFactor {
                        root,
                        exponent: Complex64::new(0.0, 0.0),
                        principal: Vec::new(),
                    });
                    factors.len() - 1
                }
            }
        }
        for &(b, lambda) in psi.log_terms() {
            let i = factor_at(&mut factors, b);
            factors[i].exponent = -lambda;
        }
        for (b, coeffs) in psi.principal_terms() {
            let i = factor_at(&mut factors, *b);
            factors[i].principal = coeffs.iter().map(|&c| c * minus_one).collect();
        }
        NewtonMapProduct {
            constant: (-psi.constant()).exp(),
            poly: psi.polynomial_part().scale(minus_one),
            factors,
        }
    }

    pub fn constant(&self) -> Complex64 {
        self.constant
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn factors(&self) -> &[ProductFactor] {
        &self.factors
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = self.constant * self.poly.eval(z).exp();
        for f in &self.factors {
            let d = z - f.root;
            acc *= power(d, f.exponent);
            if !f.principal.is_empty() {
                if d == Complex64::new(0.0, 0.0) {
                    return INFINITY_SENTINEL;
                }
                let w = 1.0 / d;
                let mut horner = Complex64::new(0.0, 0.0);
                for &p in f.principal.iter().rev() {
                    horner = (horner + p) * w;
                }
                acc *= horner.exp();
            }
        }
        if is_singular(acc) {
            INFINITY_SENTINEL
        } else {
            acc
        }
    }

    /// `Phi'/Phi`, assembled term by term (no finite differences).
    pub fn log_deriv(&self, z: Complex64) -> Complex64 {
        let mut acc = self.poly.derivative().eval(z);
        for f in &self.factors {
            let d = z - f.root;
            acc += f.exponent / d;
            let w = 1.0 / d;
            for (idx, &p) in f.principal.iter().enumerate() {
                let k = (idx + 1) as f64;
                acc += -k * p * w.powi(idx as i32 + 2);
            }
        }
        acc
    }

    /// `Phi^k` (log-scales every exponent; used for the perpendicular field).
    pub fn pow_scale(&self, k: Complex64) -> NewtonMapProduct {
        NewtonMapProduct {
            constant: power(self.constant, k),
            poly: self.poly.scale(k),
            factors: self
                .factors
                .iter()
                .map(|f| ProductFactor {
                    root: f.root,
                    exponent: f.exponent * k,
                    principal: f.principal.iter().map(|&p| p * k).collect(),
                })
                .collect(),
        }
    }

    /// Expression-grammar text of the product; parses back through
    /// [`crate::expr::parse`].
    pub fn to_expr_string(&self) -> String {
        let mut out = String::new();
        write!(out, "{}", fmt_const(self.constant)).unwrap();
        if !self.poly.is_zero() {
            write!(out, "*exp({})", fmt_poly(&self.poly)).unwrap();
        }
        for f in &self.factors {
            if f.exponent != Complex64::new(0.0, 0.0) {
                write!(
                    out,
                    "*(z-{})^({})",
                    fmt_const(f.root),
                    fmt_const_bare(f.exponent)
                )
                .unwrap();
            }
            if !f.principal.is_empty() {
                let mut inner = String::new();
                let mut first = true;
                for (idx, &p) in f.principal.iter().enumerate() {
                    if p == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    if !first {
                        inner.push('+');
                    }
                    first = false;
                    write!(
                        inner,
                        "{}*(z-{})^(-{})",
                        fmt_const(p),
                        fmt_const(f.root),
                        idx + 1
                    )
                    .unwrap();
                }
                if !first {
                    write!(out, "*exp({inner})").unwrap();
                }
            }
        }
        out
    }
}

fn power(base: Complex64, k: Complex64) -> Complex64 {
    if k.im == 0.0 && k.re.fract() == 0.0 && k.re.abs() <= i32::MAX as f64 {
        let n = k.re as i32;
        if base == Complex64::new(0.0, 0.0) {
            return if n > 0 {
                Complex64::new(0.0, 0.0)
            } else if n == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                INFINITY_SENTINEL
            };
        }
        return base.powi(n);
    }
    if base == Complex64::new(0.0, 0.0) {
        return if k.re > 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            INFINITY_SENTINEL
        };
    }
    base.powc(k)
}

fn fmt_const(c: Complex64) -> String {
    if c.im == 0.0 {
        if c.re < 0.0 {
            format!("({})", c.re)
        } else {
            format!("{}", c.re)
        }
    } else if c.re == 0.0 {
        format!("({}i)", c.im)
    } else if c.im < 0.0 {
        format!("({}-{}i)", c.re, -c.im)
    } else {
        format!("({}+{}i)", c.re, c.im)
    }
}

fn fmt_const_bare(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else if c.im < 0.0 {
        format!("{}-{}i", c.re, -c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

fn fmt_poly(p: &Polynomial) -> String {
    let mut out = String::new();
    let mut first = true;
    for (k, &c) in p.coeffs().iter().enumerate() {
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        if !first {
            out.push('+');
        }
        first = false;
        if k == 0 {
            write!(out, "{}", fmt_const(c)).unwrap();
        } else {
            write!(out, "{}*z^{}", fmt_const(c), k).unwrap();
        }
    }
    if first {
        out.push('0');
    }
    out
}
