use num_complex::Complex64;

use crate::algebra::{partial_fractions, Polynomial, RationalFunction};

use super::Expr;

/// Symbolic derivative `d e / dz`.
///
/// The Weierstrass nodes close under differentiation via `sigma' = sigma*zeta`,
/// `zeta' = -wp`, `wp' = wp_prime` and `wp_prime' = 6 wp^2 - g2/2`.
pub fn differentiate(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) => Expr::real(0.0),
        Expr::Z => Expr::real(1.0),
        Expr::Add(a, b) => Expr::add(differentiate(a), differentiate(b)),
        Expr::Sub(a, b) => Expr::sub(differentiate(a), differentiate(b)),
        Expr::Mul(a, b) => Expr::add(
            Expr::mul(differentiate(a), (**b).clone()),
            Expr::mul((**a).clone(), differentiate(b)),
        ),
        Expr::Div(a, b) => Expr::div(
            Expr::sub(
                Expr::mul(differentiate(a), (**b).clone()),
                Expr::mul((**a).clone(), differentiate(b)),
            ),
            Expr::pow((**b).clone(), Complex64::new(2.0, 0.0)),
        ),
        Expr::Pow(base, k) => Expr::mul(
            Expr::mul(
                Expr::constant(*k),
                Expr::pow((**base).clone(), k - Complex64::new(1.0, 0.0)),
            ),
            differentiate(base),
        ),
        Expr::Exp(u) => Expr::mul(e.clone(), differentiate(u)),
        Expr::Log(u) => Expr::div(differentiate(u), (**u).clone()),
        Expr::Sin(u) => Expr::mul(Expr::Cos(u.clone()), differentiate(u)),
        Expr::Cos(u) => Expr::neg(Expr::mul(Expr::Sin(u.clone()), differentiate(u))),
        Expr::Tan(u) => Expr::div(
            differentiate(u),
            Expr::pow(Expr::Cos(u.clone()), Complex64::new(2.0, 0.0)),
        ),
        Expr::Sinh(u) => Expr::mul(Expr::Cosh(u.clone()), differentiate(u)),
        Expr::Cosh(u) => Expr::mul(Expr::Sinh(u.clone()), differentiate(u)),
        Expr::Wp(u, l) => Expr::mul(
            Expr::WpPrime(u.clone(), l.clone()),
            differentiate(u),
        ),
        Expr::WpPrime(u, l) => {
            // wp'' = 6 wp^2 - g2/2, expanded with the lattice invariants
            let wp2 = Expr::pow(Expr::Wp(u.clone(), l.clone()), Complex64::new(2.0, 0.0));
            let second = Expr::sub(
                Expr::mul(Expr::real(6.0), wp2),
                Expr::constant(l.g2() * 0.5),
            );
            Expr::mul(second, differentiate(u))
        }
        Expr::WZeta(u, l) => Expr::neg(Expr::mul(
            Expr::Wp(u.clone(), l.clone()),
            differentiate(u),
        )),
        Expr::WSigma(u, l) => Expr::mul(
            Expr::mul(
                Expr::WSigma(u.clone(), l.clone()),
                Expr::WZeta(u.clone(), l.clone()),
            ),
            differentiate(u),
        ),
    }
}

/// Extracts an exact rational form when the tree is built from constants, `z`,
/// arithmetic and integer powers; returns `None` for anything transcendental.
pub fn expr_to_rational(e: &Expr) -> Option<RationalFunction> {
    let r = to_rational_inner(e)?;
    // Desk-scale guard: fields of this kind stay in low degrees.
    let deg = r
        .numerator()
        .degree()
        .unwrap_or(0)
        .max(r.denominator().degree().unwrap_or(0));
    if deg > 64 {
        return None;
    }
    Some(r)
}

fn to_rational_inner(e: &Expr) -> Option<RationalFunction> {
    match e {
        Expr::Const(c) => Some(RationalFunction::constant(*c)),
        Expr::Z => Some(RationalFunction::from_polynomial(Polynomial::monomial(
            Complex64::new(1.0, 0.0),
            1,
        ))),
        Expr::Add(a, b) => to_rational_inner(a)?.add(&to_rational_inner(b)?).ok(),
        Expr::Sub(a, b) => to_rational_inner(a)?.sub(&to_rational_inner(b)?).ok(),
        Expr::Mul(a, b) => to_rational_inner(a)?.mul(&to_rational_inner(b)?).ok(),
        Expr::Div(a, b) => to_rational_inner(a)?.div(&to_rational_inner(b)?).ok(),
        Expr::Pow(base, k) => {
            if k.im != 0.0 || k.re.fract() != 0.0 || k.re.abs() > 40.0 {
                return None;
            }
            to_rational_inner(base)?.powi(k.re as i32).ok()
        }
        _ => None,
    }
}

/// Closed-form antiderivative, when one exists within the classes this tool
/// needs: rational integrands, and `R(z) * exp(u(z))` with `R`, `u` rational
/// (matched either as `c * u' e^u` or through a polynomial ansatz `w e^u`).
/// Returns `None` rather than falling back to quadrature.
pub fn antiderivative(e: &Expr) -> Option<Expr> {
    if let Some(r) = expr_to_rational(e) {
        return rational_antiderivative(&r);
    }
    match e {
        Expr::Add(a, b) => Some(Expr::add(antiderivative(a)?, antiderivative(b)?)),
        Expr::Sub(a, b) => Some(Expr::sub(antiderivative(a)?, antiderivative(b)?)),
        _ => exp_product_antiderivative(e),
    }
}

/// Integrates a rational function exactly via Euclid division plus partial
/// fractions, emitting polynomial, logarithmic and principal-part terms.
fn rational_antiderivative(r: &RationalFunction) -> Option<Expr> {
    let pf = partial_fractions(r).ok()?;
    let mut acc = polynomial_to_expr(&pf.polynomial_part.antiderivative());
    for term in &pf.terms {
        let shifted = Expr::sub(Expr::Z, Expr::constant(term.pole));
        for (idx, &a) in term.coefficients.iter().enumerate() {
            let k = idx + 1;
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let piece = if k == 1 {
                Expr::mul(Expr::constant(a), Expr::Log(Box::new(shifted.clone())))
            } else {
                let coeff = a / (1.0 - k as f64);
                Expr::mul(
                    Expr::constant(coeff),
                    Expr::pow(shifted.clone(), Complex64::new(1.0 - k as f64, 0.0)),
                )
            };
            acc = Expr::add(acc, piece);
        }
    }
    Some(acc)
}

pub(crate) fn polynomial_to_expr(p: &Polynomial) -> Expr {
    let mut acc = Expr::real(0.0);
    for (k, &c) in p.coeffs().iter().enumerate() {
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let term = if k == 0 {
            Expr::constant(c)
        } else {
            Expr::mul(
                Expr::constant(c),
                Expr::pow(Expr::Z, Complex64::new(k as f64, 0.0)),
            )
        };
        acc = Expr::add(acc, term);
    }
    acc
}

/// Handles `R(z) e^{u(z)}`: if `R/u'` is constant the integral is `c e^u`;
/// if `R` and `u` are polynomial, tries `w(z) e^u` with `w' + w u' = R`.
fn exp_product_antiderivative(e: &Expr) -> Option<Expr> {
    let mut rational = RationalFunction::constant(Complex64::new(1.0, 0.0));
    let mut exponent: Option<Expr> = None;
    collect_factors(e, false, &mut rational, &mut exponent)?;
    let u = exponent?;
    let u_rat = expr_to_rational(&u)?;
    let du = u_rat.derivative().ok()?;

    let ratio = rational.div(&du).ok()?;
    if ratio.is_constant() {
        let c = ratio.eval(Complex64::new(0.0, 0.0));
        return Some(Expr::mul(Expr::constant(c), Expr::Exp(Box::new(u))));
    }

    // Polynomial ansatz: valid only when both R and u' are polynomials.
    if rational.denominator().degree() != Some(0) || du.denominator().degree() != Some(0) {
        return None;
    }
    let r_poly = rational.numerator().clone();
    let p = du.numerator().clone();
    let w = solve_w_prime_plus_w_p(&r_poly, &p)?;
    Some(Expr::mul(
        polynomial_to_expr(&w),
        Expr::Exp(Box::new(u)),
    ))
}

/// Multiplies rational factors into `rational` and adds exponents of `exp`
/// factors into `exponent`; `invert` handles denominators.
fn collect_factors(
    e: &Expr,
    invert: bool,
    rational: &mut RationalFunction,
    exponent: &mut Option<Expr>,
) -> Option<()> {
    if let Some(r) = expr_to_rational(e) {
        let r = if invert { r.recip().ok()? } else { r };
        *rational = rational.mul(&r).ok()?;
        return Some(());
    }
    match e {
        Expr::Mul(a, b) => {
            collect_factors(a, invert, rational, exponent)?;
            collect_factors(b, invert, rational, exponent)
        }
        Expr::Div(a, b) => {
            collect_factors(a, invert, rational, exponent)?;
            collect_factors(b, !invert, rational, exponent)
        }
        Expr::Exp(u) => {
            let u = if invert {
                Expr::neg((**u).clone())
            } else {
                (**u).clone()
            };
            *exponent = Some(match exponent.take() {
                None => u,
                Some(prev) => Expr::add(prev, u),
            });
            Some(())
        }
        _ => None,
    }
}

/// Solves `w' + w*p = r` for polynomial `w` by descending-degree
/// back-substitution, verifying the candidate afterwards.
fn solve_w_prime_plus_w_p(r: &Polynomial, p: &Polynomial) -> Option<Polynomial> {
    let dp = p.degree()?;
    if dp == 0 {
        // constant u': already covered by the c*e^u branch
        return None;
    }
    let dr = r.degree()?;
    if dr < dp {
        return None;
    }
    let dw = dr - dp;
    let p_lead = p.leading_coeff();
    let mut w = vec![Complex64::new(0.0, 0.0); dw + 1];
    for k in (0..=dw).rev() {
        // Coefficient of z^{k+dp} in w' + w*p equals r_{k+dp}.
        let mut acc = r.coeff(k + dp);
        for j in k + 1..=dw {
            let pi = k + dp - j;
            if pi <= dp {
                acc -= w[j] * p.coeff(pi);
            }
        }
        if k + dp + 1 <= dw {
            acc -= (k as f64 + dp as f64 + 1.0) * w[k + dp + 1];
        }
        w[k] = acc / p_lead;
    }
    let w = Polynomial::new(w);
    let check = w.derivative().add(&w.mul(p));
    let diff = check.sub(r);
    let scale = r.coeff_scale().max(1.0);
    if diff.coeff_scale() < 1e-10 * scale {
        Some(w)
    } else {
        None
    }
}
