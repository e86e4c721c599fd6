use num_complex::Complex64;

use crate::{is_singular, INFINITY_SENTINEL};

use super::{poly_roots, AlgebraError, Polynomial, CLUSTER_RADIUS};

/// Quotient of two polynomials, kept coprime with a monic denominator.
///
/// Coprimality is enforced numerically: common roots are matched within the
/// root-finder cluster radius and cancelled, rather than through a symbolic
/// gcd, since coefficients are floating complex.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    numerator: Polynomial,
    denominator: Polynomial,
}

impl RationalFunction {
    pub fn new(numerator: Polynomial, denominator: Polynomial) -> Result<Self, AlgebraError> {
        if denominator.is_zero() {
            return Err(AlgebraError::ZeroDivisor);
        }
        let mut r = RationalFunction {
            numerator,
            denominator,
        };
        r.reduce()?;
        Ok(r)
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        RationalFunction {
            numerator: p,
            denominator: Polynomial::one(),
        }
    }

    pub fn constant(c: Complex64) -> Self {
        RationalFunction::from_polynomial(Polynomial::constant(c))
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.numerator
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.denominator
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.numerator.degree().map_or(true, |d| d == 0)
            && self.denominator.degree() == Some(0)
    }

    /// Cancels matched numerator/denominator roots and makes the denominator
    /// monic. Skips root finding entirely when either side is constant.
    fn reduce(&mut self) -> Result<(), AlgebraError> {
        if self.numerator.is_zero() {
            self.denominator = Polynomial::one();
            return Ok(());
        }
        let num_deg = self.numerator.degree().unwrap_or(0);
        let den_deg = self.denominator.degree().unwrap_or(0);
        if num_deg >= 1 && den_deg >= 1 {
            let mut num_roots = poly_roots(&self.numerator)?;
            let mut den_roots = poly_roots(&self.denominator)?;
            let mut cancelled = false;
            for nr in num_roots.iter_mut() {
                for dr in den_roots.iter_mut() {
                    if dr.1 > 0 && nr.1 > 0 && (nr.0 - dr.0).norm() < CLUSTER_RADIUS {
                        let k = nr.1.min(dr.1);
                        nr.1 -= k;
                        dr.1 -= k;
                        cancelled = true;
                    }
                }
            }
            if cancelled {
                num_roots.retain(|&(_, m)| m > 0);
                den_roots.retain(|&(_, m)| m > 0);
                self.numerator =
                    Polynomial::from_roots(self.numerator.leading_coeff(), &num_roots);
                self.denominator =
                    Polynomial::from_roots(self.denominator.leading_coeff(), &den_roots);
            }
        }
        let lead = self.denominator.leading_coeff();
        self.denominator = self.denominator.scale(1.0 / lead);
        self.numerator = self.numerator.scale(1.0 / lead);
        Ok(())
    }

    /// Evaluates `num(z)/den(z)`; a denominator hitting exact zero yields the
    /// point-at-infinity sentinel so raster scans never branch on exceptions.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let d = self.denominator.eval(z);
        if d.re == 0.0 && d.im == 0.0 {
            return INFINITY_SENTINEL;
        }
        let v = self.numerator.eval(z) / d;
        if is_singular(v) {
            INFINITY_SENTINEL
        } else {
            v
        }
    }

    pub fn derivative(&self) -> Result<RationalFunction, AlgebraError> {
        let n = &self.numerator;
        let d = &self.denominator;
        RationalFunction::new(
            n.derivative().mul(d).sub(&n.mul(&d.derivative())),
            d.mul(d),
        )
    }

    pub fn add(&self, other: &RationalFunction) -> Result<RationalFunction, AlgebraError> {
        RationalFunction::new(
            self.numerator
                .mul(&other.denominator)
                .add(&other.numerator.mul(&self.denominator)),
            self.denominator.mul(&other.denominator),
        )
    }

    pub fn sub(&self, other: &RationalFunction) -> Result<RationalFunction, AlgebraError> {
        RationalFunction::new(
            self.numerator
                .mul(&other.denominator)
                .sub(&other.numerator.mul(&self.denominator)),
            self.denominator.mul(&other.denominator),
        )
    }

    pub fn mul(&self, other: &RationalFunction) -> Result<RationalFunction, AlgebraError> {
        RationalFunction::new(
            self.numerator.mul(&other.numerator),
            self.denominator.mul(&other.denominator),
        )
    }

    pub fn div(&self, other: &RationalFunction) -> Result<RationalFunction, AlgebraError> {
        if other.is_zero() {
            return Err(AlgebraError::ZeroDivisor);
        }
        RationalFunction::new(
            self.numerator.mul(&other.denominator),
            self.denominator.mul(&other.numerator),
        )
    }

    pub fn neg(&self) -> RationalFunction {
        RationalFunction {
            numerator: self.numerator.scale(Complex64::new(-1.0, 0.0)),
            denominator: self.denominator.clone(),
        }
    }

    /// `1/self`; fails on the zero function.
    pub fn recip(&self) -> Result<RationalFunction, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::ZeroDivisor);
        }
        RationalFunction::new(self.denominator.clone(), self.numerator.clone())
    }

    pub fn powi(&self, k: i32) -> Result<RationalFunction, AlgebraError> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let mut acc = RationalFunction::constant(Complex64::new(1.0, 0.0));
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }
}

/// Where a rational function is classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum At {
    Point,
    Infinity,
}

/// Degree bookkeeping at infinity differs between a plain function and the
/// coefficient of a vector field (which pulls back via `z -> 1/z` as
/// `-z^2 f(1/z)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifyMode {
    Function,
    VectorField,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    Regular,
    Zero(usize),
    Pole(usize),
}

/// Order of `f` at a finite point or at infinity.
pub fn classify_point(
    f: &RationalFunction,
    z0: Option<Complex64>,
    mode: ClassifyMode,
) -> Result<PointClass, AlgebraError> {
    let order = match z0 {
        Some(z0) => {
            multiplicity_at(f.numerator(), z0)? as i64 - multiplicity_at(f.denominator(), z0)? as i64
        }
        None => {
            let num_deg = f.numerator().degree().map_or(0, |d| d as i64);
            let den_deg = f.denominator().degree().map_or(0, |d| d as i64);
            match mode {
                // Plain degree difference: deg num - deg den poles at infinity.
                ClassifyMode::Function => den_deg - num_deg,
                // Vector-field pullback -z^2 f(1/z) contributes two extra zeros.
                ClassifyMode::VectorField => 2 + den_deg - num_deg,
            }
        }
    };
    Ok(if order > 0 {
        PointClass::Zero(order as usize)
    } else if order < 0 {
        PointClass::Pole((-order) as usize)
    } else {
        PointClass::Regular
    })
}

fn multiplicity_at(p: &Polynomial, z0: Complex64) -> Result<usize, AlgebraError> {
    if p.is_zero() {
        return Ok(0);
    }
    if p.degree() == Some(0) {
        return Ok(0);
    }
    let scale = p.coeff_scale() * z0.norm().max(1.0).powi(p.degree().unwrap() as i32);
    if p.eval(z0).norm() > 1e-9 * scale {
        return Ok(0);
    }
    let roots = poly_roots(p)?;
    Ok(roots
        .iter()
        .find(|&&(r, _)| (r - z0).norm() < CLUSTER_RADIUS)
        .map_or(0, |&(_, m)| m))
}
