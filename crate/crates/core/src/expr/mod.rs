//! Symbolic front end: parse complex-function expressions, differentiate them,
//! and evaluate at complex points. This is the front door for non-rational
//! fields (exp z, tan z, cosh z + 1, Weierstrass wp).

mod calculus;
mod parser;
mod printer;

pub use calculus::{antiderivative, differentiate, expr_to_rational};
pub use parser::{parse, parse_with_lattice};

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::elliptic::Lattice;
use crate::{is_singular, INFINITY_SENTINEL};

/// Syntax or semantic problem found while parsing, anchored to a byte offset
/// of the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at byte {byte_offset}: {message}")]
pub struct ParseDiagnostic {
    pub byte_offset: usize,
    pub message: String,
}

/// Immutable expression tree in one variable `z`.
///
/// Exponents are stored constants, never subexpressions, which keeps
/// differentiation closed over the node set. Weierstrass nodes carry the
/// lattice they are evaluated on.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    Z,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Complex64),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Tan(Box<Expr>),
    Sinh(Box<Expr>),
    Cosh(Box<Expr>),
    Wp(Box<Expr>, Arc<Lattice>),
    WpPrime(Box<Expr>, Arc<Lattice>),
    WZeta(Box<Expr>, Arc<Lattice>),
    WSigma(Box<Expr>, Arc<Lattice>),
}

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn cone() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

impl Expr {
    pub fn constant(c: Complex64) -> Expr {
        Expr::Const(c)
    }

    pub fn real(x: f64) -> Expr {
        Expr::Const(Complex64::new(x, 0.0))
    }

    fn as_const(&self) -> Option<Complex64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// Smart constructors fold constants and drop identities; anything beyond
    /// that is out of scope.
    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x + y),
            (Some(x), None) if x == czero() => b,
            (None, Some(y)) if y == czero() => a,
            _ => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x - y),
            (None, Some(y)) if y == czero() => a,
            _ => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x * y),
            (Some(x), None) if x == czero() => Expr::Const(czero()),
            (None, Some(y)) if y == czero() => Expr::Const(czero()),
            (Some(x), None) if x == cone() => b,
            (None, Some(y)) if y == cone() => a,
            _ => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != czero() => Expr::Const(x / y),
            (None, Some(y)) if y == cone() => a,
            _ => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn neg(a: Expr) -> Expr {
        match a.as_const() {
            Some(x) => Expr::Const(-x),
            None => Expr::Mul(Box::new(Expr::Const(-cone())), Box::new(a)),
        }
    }

    pub fn pow(base: Expr, exponent: Complex64) -> Expr {
        if exponent == czero() {
            return Expr::Const(cone());
        }
        if exponent == cone() {
            return base;
        }
        if let Some(c) = base.as_const() {
            return Expr::Const(pow_value(c, exponent));
        }
        Expr::Pow(Box::new(base), exponent)
    }

    /// Evaluates the expression at `z`. Division by exact zero, poles of the
    /// Weierstrass functions and floating overflow all collapse to the
    /// point-at-infinity sentinel; evaluation never panics.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Z => z,
            Expr::Add(a, b) => a.eval(z) + b.eval(z),
            Expr::Sub(a, b) => a.eval(z) - b.eval(z),
            Expr::Mul(a, b) => a.eval(z) * b.eval(z),
            Expr::Div(a, b) => {
                let den = b.eval(z);
                if den == czero() {
                    return INFINITY_SENTINEL;
                }
                a.eval(z) / den
            }
            Expr::Pow(e, k) => pow_value(e.eval(z), *k),
            Expr::Exp(e) => e.eval(z).exp(),
            Expr::Log(e) => {
                let v = e.eval(z);
                if v == czero() {
                    return INFINITY_SENTINEL;
                }
                v.ln()
            }
            Expr::Sin(e) => e.eval(z).sin(),
            Expr::Cos(e) => e.eval(z).cos(),
            Expr::Tan(e) => e.eval(z).tan(),
            Expr::Sinh(e) => e.eval(z).sinh(),
            Expr::Cosh(e) => e.eval(z).cosh(),
            Expr::Wp(e, l) => l.wp(e.eval(z)),
            Expr::WpPrime(e, l) => l.wp_prime(e.eval(z)),
            Expr::WZeta(e, l) => l.wzeta(e.eval(z)),
            Expr::WSigma(e, l) => l.wsigma(e.eval(z)),
        };
        if is_singular(v) {
            INFINITY_SENTINEL
        } else {
            v
        }
    }
}

/// Principal-branch power with integer fast path and pole-aware base zero.
fn pow_value(base: Complex64, k: Complex64) -> Complex64 {
    if k.im == 0.0 && k.re.fract() == 0.0 && k.re.abs() <= i32::MAX as f64 {
        let n = k.re as i32;
        if base == czero() {
            return if n > 0 {
                czero()
            } else if n == 0 {
                cone()
            } else {
                INFINITY_SENTINEL
            };
        }
        return base.powi(n);
    }
    if base == czero() {
        return if k.re > 0.0 { czero() } else { INFINITY_SENTINEL };
    }
    base.powc(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tan_at_quarter_pi_is_one() {
        let e = Expr::Tan(Box::new(Expr::Z));
        let v = e.eval(c(FRAC_PI_4, 0.0));
        assert!((v - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn exp_at_i_pi_is_minus_one() {
        let e = Expr::Exp(Box::new(Expr::Z));
        let v = e.eval(c(0.0, PI));
        assert!((v - c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn quadratic_at_i() {
        // z^2 - z + 1 at z = i: i^2 - i + 1 = -1 - i + 1 = -i (hand oracle).
        let e = Expr::add(
            Expr::sub(Expr::pow(Expr::Z, c(2.0, 0.0)), Expr::Z),
            Expr::real(1.0),
        );
        let v = e.eval(c(0.0, 1.0));
        assert!((v - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn division_by_exact_zero_is_sentinel() {
        let e = Expr::Div(Box::new(Expr::real(1.0)), Box::new(Expr::Z));
        assert!(is_singular(e.eval(c(0.0, 0.0))));
        assert!(!is_singular(e.eval(c(1.0, 0.0))));
    }

    #[test]
    fn overflow_becomes_sentinel() {
        let e = Expr::Exp(Box::new(Expr::Z));
        assert!(is_singular(e.eval(c(1e5, 0.0))));
    }

    #[test]
    fn constant_folding_in_constructors() {
        let e = Expr::mul(Expr::real(2.0), Expr::real(3.0));
        assert_eq!(e, Expr::Const(c(6.0, 0.0)));
        assert_eq!(Expr::mul(Expr::real(1.0), Expr::Z), Expr::Z);
        assert_eq!(Expr::pow(Expr::Z, c(1.0, 0.0)), Expr::Z);
        assert_eq!(Expr::add(Expr::Z, Expr::real(0.0)), Expr::Z);
    }

    #[test]
    fn integer_pow_of_zero() {
        assert_eq!(pow_value(czero(), c(3.0, 0.0)), czero());
        assert!(is_singular(pow_value(czero(), c(-2.0, 0.0))));
    }
}
