//! Newton maps and distinguished parameters: build `Psi_X` and `Phi_X` from a
//! field, build a field from a given `Psi` or `Phi`, and evaluate the first
//! integrals `rho` and `theta`.

mod product;
mod psi;
mod single_valued;

pub use product::{NewtonMapProduct, ProductFactor};
pub use psi::ClosedFormPsi;
pub use single_valued::{single_valuedness, SingleValuedness};

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::{AlgebraError, RationalFunction};
use crate::elliptic::{EllipticError, EllipticNewtonMap};
use crate::expr::{antiderivative, differentiate, expr_to_rational, Expr};
use crate::is_singular;

#[derive(Debug, Error)]
pub enum NewtonError {
    #[error("base point {z0} is a zero of the field")]
    BasePointIsZero { z0: Complex64 },
    #[error("the zero field has no distinguished parameter")]
    ZeroField,
    #[error("field has no first integrals: no closed-form Psi or Phi is attached")]
    NoFirstIntegrals,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
}

/// How the field coefficient `f` is evaluated.
#[derive(Debug, Clone)]
enum FieldKind {
    Rational(RationalFunction),
    Expression(Expr),
    Elliptic(EllipticNewtonMap),
}

#[derive(Debug, Clone)]
enum PsiEval {
    ClosedForm(ClosedFormPsi),
    Symbolic { psi: Expr },
    /// Derive from `Phi` as `-Log Phi` (principal branch).
    NegLogPhi,
    Unavailable,
}

#[derive(Debug, Clone)]
enum PhiEval {
    Product(NewtonMapProduct),
    Symbolic { phi: Expr, dphi: Expr },
    /// Derive from `Psi` as `exp(-Psi)`.
    ExpNegPsi,
    /// The elliptic map carried by the field kind.
    Elliptic,
    Unavailable,
}

/// A singular complex analytic vector field `X = f(z) d/dz` together with
/// whatever evaluators for `Psi` and `Phi` its source form affords.
///
/// Everything is immutable after construction and safe to share across
/// threads; the renderers rely on that.
#[derive(Debug, Clone)]
pub struct FieldSpec {
    kind: FieldKind,
    psi: PsiEval,
    phi: PhiEval,
}

impl FieldSpec {
    /// Builds the spec of a rational field with full closed-form `Psi` and a
    /// factored Newton map. `base_point` defaults to the first of a fixed
    /// candidate list that is not a zero of `f` (so that the first integrals
    /// are well defined at generic initial conditions).
    pub fn from_rational(
        f: RationalFunction,
        base_point: Option<Complex64>,
    ) -> Result<FieldSpec, NewtonError> {
        let z0 = match base_point {
            Some(z0) => z0,
            None => default_base_point(&f),
        };
        let psi = ClosedFormPsi::build(&f, z0)?;
        let phi = NewtonMapProduct::from_psi(&psi);
        Ok(FieldSpec {
            kind: FieldKind::Rational(f),
            psi: PsiEval::ClosedForm(psi),
            phi: PhiEval::Product(phi),
        })
    }

    /// Builds the spec from an arbitrary expression for `f`. Rational
    /// expressions are routed through the exact rational construction; for
    /// the rest a closed-form antiderivative of `1/f` is attempted (rational
    /// times exponential shapes). If none exists the field still evaluates,
    /// but carries no first integrals — no quadrature is ever substituted.
    pub fn from_expr(f_expr: Expr) -> Result<FieldSpec, NewtonError> {
        FieldSpec::from_expr_with_base(f_expr, None)
    }

    /// [`FieldSpec::from_expr`] with an explicit normalization base point for
    /// the rational route.
    pub fn from_expr_with_base(
        f_expr: Expr,
        base_point: Option<Complex64>,
    ) -> Result<FieldSpec, NewtonError> {
        if let Some(rational) = expr_to_rational(&f_expr) {
            if !rational.is_zero() {
                return FieldSpec::from_rational(rational, base_point);
            }
        }
        let reciprocal = Expr::div(Expr::real(1.0), f_expr.clone());
        match antiderivative(&reciprocal) {
            Some(psi) => Ok(FieldSpec {
                kind: FieldKind::Expression(f_expr),
                psi: PsiEval::Symbolic { psi },
                phi: PhiEval::ExpNegPsi,
            }),
            None => Ok(FieldSpec {
                kind: FieldKind::Expression(f_expr),
                psi: PsiEval::Unavailable,
                phi: PhiEval::Unavailable,
            }),
        }
    }

    /// Field with a user-supplied distinguished parameter: `f = 1/Psi'`.
    pub fn from_psi(psi_expr: Expr) -> FieldSpec {
        let dpsi = differentiate(&psi_expr);
        let f = Expr::div(Expr::real(1.0), dpsi);
        FieldSpec {
            kind: FieldKind::Expression(f),
            psi: PsiEval::Symbolic { psi: psi_expr },
            phi: PhiEval::ExpNegPsi,
        }
    }

    /// Field with a user-supplied Newton map: `f = -Phi/Phi'`.
    pub fn from_phi(phi_expr: Expr) -> FieldSpec {
        let dphi = differentiate(&phi_expr);
        let f = Expr::neg(Expr::div(phi_expr.clone(), dphi.clone()));
        FieldSpec {
            kind: FieldKind::Expression(f),
            psi: PsiEval::NegLogPhi,
            phi: PhiEval::Symbolic {
                phi: phi_expr,
                dphi,
            },
        }
    }

    /// Field of an elliptic Newton map built from principal parts.
    pub fn from_elliptic_map(map: EllipticNewtonMap) -> FieldSpec {
        FieldSpec {
            kind: FieldKind::Elliptic(map),
            psi: PsiEval::NegLogPhi,
            phi: PhiEval::Elliptic,
        }
    }

    /// The coefficient `f(z)` of the field.
    pub fn f(&self, z: Complex64) -> Complex64 {
        match &self.kind {
            FieldKind::Rational(r) => r.eval(z),
            FieldKind::Expression(e) => e.eval(z),
            FieldKind::Elliptic(map) => map.field(z),
        }
    }

    /// The rational form, when the field has one.
    pub fn rational(&self) -> Option<&RationalFunction> {
        match &self.kind {
            FieldKind::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// The closed-form `Psi`, when the field was built from a rational source.
    pub fn closed_form_psi(&self) -> Option<&ClosedFormPsi> {
        match &self.psi {
            PsiEval::ClosedForm(p) => Some(p),
            _ => None,
        }
    }

    /// The factored Newton map, when the field was built from a rational source.
    pub fn newton_map(&self) -> Option<&NewtonMapProduct> {
        match &self.phi {
            PhiEval::Product(p) => Some(p),
            _ => None,
        }
    }

    pub fn has_first_integrals(&self) -> bool {
        !matches!(
            (&self.psi, &self.phi),
            (PsiEval::Unavailable, PhiEval::Unavailable)
        )
    }

    /// Evaluates `Psi(z)` when any route to it exists.
    pub fn psi(&self, z: Complex64) -> Option<Complex64> {
        match &self.psi {
            PsiEval::ClosedForm(p) => Some(p.eval(z)),
            PsiEval::Symbolic { psi } => Some(psi.eval(z)),
            PsiEval::NegLogPhi => {
                let phi = self.phi(z)?;
                if is_singular(phi) || phi == Complex64::new(0.0, 0.0) {
                    return Some(crate::INFINITY_SENTINEL);
                }
                Some(-phi.ln())
            }
            PsiEval::Unavailable => None,
        }
    }

    /// Evaluates `Phi(z)` when any route to it exists.
    pub fn phi(&self, z: Complex64) -> Option<Complex64> {
        match &self.phi {
            PhiEval::Product(p) => Some(p.eval(z)),
            PhiEval::Symbolic { phi, .. } => Some(phi.eval(z)),
            PhiEval::ExpNegPsi => {
                let psi = self.psi(z)?;
                Some((-psi).exp())
            }
            PhiEval::Elliptic => match &self.kind {
                FieldKind::Elliptic(map) => Some(map.phi(z)),
                _ => None,
            },
            PhiEval::Unavailable => None,
        }
    }

    /// `Phi'(z)`, where available analytically (`Phi' = -Phi/f` otherwise).
    pub fn phi_derivative(&self, z: Complex64) -> Option<Complex64> {
        match &self.phi {
            PhiEval::Product(p) => Some(p.eval(z) * p.log_deriv(z)),
            PhiEval::Symbolic { dphi, .. } => Some(dphi.eval(z)),
            PhiEval::ExpNegPsi | PhiEval::Elliptic => {
                let phi = self.phi(z)?;
                let f = self.f(z);
                Some(-phi / f)
            }
            PhiEval::Unavailable => None,
        }
    }

    /// True when the preferred exact-flow route is through `Psi` (as opposed
    /// to solving on `Phi` directly).
    pub(crate) fn prefers_psi_route(&self) -> bool {
        match &self.psi {
            // Principal-branch logs make Psi discontinuous across cuts; the
            // factored Phi is single-valued whenever the residues are integers,
            // so prefer it as soon as logs are present.
            PsiEval::ClosedForm(p) => p.log_terms().is_empty(),
            PsiEval::Symbolic { psi } => !expr_contains_log(psi),
            PsiEval::NegLogPhi => false,
            PsiEval::Unavailable => false,
        }
    }

    /// First integral `rho`: `-Im Psi` on the closed-form route (raw
    /// principal-branch value, unwrapped), else `arg Phi` in `(-pi, pi]`.
    /// Singular evaluations yield NaN.
    pub fn rho(&self, z: Complex64) -> f64 {
        match &self.psi {
            PsiEval::ClosedForm(_) | PsiEval::Symbolic { .. } => {
                let psi = self.psi(z).expect("psi available");
                if is_singular(psi) {
                    f64::NAN
                } else {
                    -psi.im
                }
            }
            _ => match self.phi(z) {
                Some(phi) if !is_singular(phi) && phi != Complex64::new(0.0, 0.0) => phi.arg(),
                _ => f64::NAN,
            },
        }
    }

    /// First integral `theta`: `Re Psi = -log|Phi|`; NaN on singularities.
    pub fn theta(&self, z: Complex64) -> f64 {
        match &self.psi {
            PsiEval::ClosedForm(_) | PsiEval::Symbolic { .. } => {
                let psi = self.psi(z).expect("psi available");
                if is_singular(psi) {
                    f64::NAN
                } else {
                    psi.re
                }
            }
            _ => match self.phi(z) {
                Some(phi) if !is_singular(phi) && phi != Complex64::new(0.0, 0.0) => {
                    -phi.norm().ln()
                }
                _ => f64::NAN,
            },
        }
    }

    /// The perpendicular field `X^perp = i f d/dz`, with `Psi -> -i Psi` and
    /// `Phi -> Phi^{-i}`.
    pub fn perp(&self) -> FieldSpec {
        let minus_i = Complex64::new(0.0, -1.0);
        let i = Complex64::new(0.0, 1.0);
        let kind = match &self.kind {
            FieldKind::Rational(r) => {
                let scaled = r
                    .mul(&RationalFunction::constant(i))
                    .expect("scaling by i cannot fail");
                FieldKind::Rational(scaled)
            }
            FieldKind::Expression(e) => {
                FieldKind::Expression(Expr::mul(Expr::constant(i), e.clone()))
            }
            FieldKind::Elliptic(map) => FieldKind::Elliptic(
                map.scale_log(minus_i)
                    .expect("log scaling keeps residue sum zero"),
            ),
        };
        let psi = match &self.psi {
            PsiEval::ClosedForm(p) => PsiEval::ClosedForm(p.scale(minus_i)),
            PsiEval::Symbolic { psi } => PsiEval::Symbolic {
                psi: Expr::mul(Expr::constant(minus_i), psi.clone()),
            },
            PsiEval::NegLogPhi => PsiEval::NegLogPhi,
            PsiEval::Unavailable => PsiEval::Unavailable,
        };
        let phi = match &self.phi {
            PhiEval::Product(p) => PhiEval::Product(p.pow_scale(minus_i)),
            PhiEval::Symbolic { phi, .. } => {
                let powed = Expr::Pow(Box::new(phi.clone()), minus_i);
                let dphi = differentiate(&powed);
                PhiEval::Symbolic { phi: powed, dphi }
            }
            PhiEval::ExpNegPsi => PhiEval::ExpNegPsi,
            PhiEval::Elliptic => PhiEval::Elliptic,
            PhiEval::Unavailable => PhiEval::Unavailable,
        };
        FieldSpec { kind, psi, phi }
    }
}

fn expr_contains_log(e: &Expr) -> bool {
    match e {
        Expr::Log(_) => true,
        Expr::Const(_) | Expr::Z => false,
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            expr_contains_log(a) || expr_contains_log(b)
        }
        Expr::Pow(a, _) => expr_contains_log(a),
        Expr::Exp(a)
        | Expr::Sin(a)
        | Expr::Cos(a)
        | Expr::Tan(a)
        | Expr::Sinh(a)
        | Expr::Cosh(a)
        | Expr::Wp(a, _)
        | Expr::WpPrime(a, _)
        | Expr::WZeta(a, _)
        | Expr::WSigma(a, _) => expr_contains_log(a),
    }
}

/// First candidate that keeps clear of every zero of `f` (zeros of `f` are
/// logarithmic or polar points of `Psi`, where normalization would blow up).
fn default_base_point(f: &RationalFunction) -> Complex64 {
    let candidates = [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 2.0),
        Complex64::new(3.0, 1.0),
        Complex64::new(-2.0, -3.0),
        Complex64::new(5.0, 7.0),
    ];
    let num = f.numerator();
    for &cand in &candidates {
        let scale =
            num.coeff_scale() * cand.norm().max(1.0).powi(num.degree().unwrap_or(0) as i32);
        if num.eval(cand).norm() > 1e-6 * scale.max(f64::MIN_POSITIVE) {
            return cand;
        }
    }
    // Degree <= 64 means at most 64 zeros; some candidate above essentially
    // always works for desk inputs. Fall back to an arbitrary offset.
    Complex64::new(0.123_456, 0.654_321)
}
