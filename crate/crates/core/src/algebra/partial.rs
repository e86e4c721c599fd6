use num_complex::Complex64;

use super::{poly_roots, AlgebraError, Polynomial, RationalFunction};

/// Principal-part data at one pole: `coefficients[j-1]` multiplies
/// `(z - pole)^{-j}`, `j = 1..=m`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleTerm {
    pub pole: Complex64,
    pub coefficients: Vec<Complex64>,
}

impl PoleTerm {
    /// The residue, i.e. the coefficient of `(z - pole)^{-1}`.
    pub fn residue(&self) -> Complex64 {
        self.coefficients
            .first()
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let w = 1.0 / (z - self.pole);
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coefficients.iter().rev() {
            acc = (acc + c) * w;
        }
        acc
    }
}

/// `polynomial_part + sum of principal parts`, the output of Euclid division
/// followed by partial-fraction decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialFractions {
    pub polynomial_part: Polynomial,
    pub terms: Vec<PoleTerm>,
}

impl PartialFractions {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = self.polynomial_part.eval(z);
        for t in &self.terms {
            acc += t.eval(z);
        }
        acc
    }

    /// Sum of all residues.
    pub fn residue_sum(&self) -> Complex64 {
        self.terms.iter().map(|t| t.residue()).sum()
    }
}

/// Decomposes `r` into polynomial part plus principal parts at each pole.
///
/// Coefficients come from clearing denominators and solving the resulting
/// square linear system, which behaves better at high pole multiplicities
/// than repeated differentiation.
pub fn partial_fractions(r: &RationalFunction) -> Result<PartialFractions, AlgebraError> {
    let (quotient, remainder) = r.numerator().divmod(r.denominator())?;
    let den = r.denominator();
    let n = match den.degree() {
        None | Some(0) => {
            // No finite poles at all.
            return Ok(PartialFractions {
                polynomial_part: quotient,
                terms: Vec::new(),
            });
        }
        Some(d) => d,
    };

    let poles = poly_roots(den)?;
    // Clearing denominators: remainder(z) = sum A_{jk} * den(z)/(z-b_j)^k,
    // and each den/(z-b_j)^k is a polynomial of degree n-k. Match coefficients.
    let mut basis: Vec<Polynomial> = Vec::with_capacity(n);
    let mut layout: Vec<(usize, usize)> = Vec::new(); // (pole index, k)
    for (j, &(pole, mult)) in poles.iter().enumerate() {
        let linear = Polynomial::new(vec![-pole, Complex64::new(1.0, 0.0)]);
        let mut reduced = den.clone();
        for k in 1..=mult {
            let (q, _exact_rem) = reduced.divmod(&linear)?;
            reduced = q;
            basis.push(reduced.clone());
            layout.push((j, k));
        }
    }

    let mut matrix = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    for (col, b) in basis.iter().enumerate() {
        for row in 0..n {
            matrix[row][col] = b.coeff(row);
        }
    }
    for (row, item) in rhs.iter_mut().enumerate() {
        *item = remainder.coeff(row);
    }
    let solution = solve_dense(matrix, rhs)?;

    let mut terms: Vec<PoleTerm> = poles
        .iter()
        .map(|&(pole, mult)| PoleTerm {
            pole,
            coefficients: vec![Complex64::new(0.0, 0.0); mult],
        })
        .collect();
    for (&(j, k), &a) in layout.iter().zip(solution.iter()) {
        terms[j].coefficients[k - 1] = a;
    }

    Ok(PartialFractions {
        polynomial_part: quotient,
        terms,
    })
}

/// Gaussian elimination with partial pivoting on a dense complex system.
pub(crate) fn solve_dense(
    mut a: Vec<Vec<Complex64>>,
    mut b: Vec<Complex64>,
) -> Result<Vec<Complex64>, AlgebraError> {
    let n = b.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| {
                a[i][col]
                    .norm()
                    .partial_cmp(&a[j][col].norm())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("nonempty range");
        if a[pivot_row][col].norm() < 1e-300 {
            return Err(AlgebraError::SingularSystem);
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot = a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / pivot;
            if factor.norm() == 0.0 {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= factor * v;
            }
            let bv = b[col];
            b[row] -= factor * bv;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in col + 1..n {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rational(num: &[Complex64], den: &[Complex64]) -> RationalFunction {
        RationalFunction::new(Polynomial::new(num.to_vec()), Polynomial::new(den.to_vec()))
            .unwrap()
    }

    #[test]
    fn simple_pole_one_over_z() {
        let r = rational(&[c(1.0, 0.0)], &[c(0.0, 0.0), c(1.0, 0.0)]);
        let pf = partial_fractions(&r).unwrap();
        assert!(pf.polynomial_part.is_zero());
        assert_eq!(pf.terms.len(), 1);
        assert!((pf.terms[0].pole).norm() < 1e-12);
        assert_eq!(pf.terms[0].coefficients.len(), 1);
        assert!((pf.terms[0].coefficients[0] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn example_with_zero_residue_at_origin() {
        // -(z^2-z+1)/(z^2(z-1)) = 1/z^2 - 1/(z-1); the residue at 0 vanishes.
        // Oracle: clear denominators and solve by hand (z=0 gives B=1, z=1
        // gives C=-1, z^2 coefficient gives A=0).
        let num = Polynomial::new(vec![c(-1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)]);
        let den = Polynomial::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)]);
        let r = RationalFunction::new(num, den).unwrap();
        let pf = partial_fractions(&r).unwrap();
        assert!(pf.polynomial_part.is_zero());
        let at_zero = pf
            .terms
            .iter()
            .find(|t| t.pole.norm() < 1e-9)
            .expect("pole at 0");
        assert!(at_zero.coefficients[0].norm() < 1e-10, "zero residue at 0");
        assert!((at_zero.coefficients[1] - c(1.0, 0.0)).norm() < 1e-10);
        let at_one = pf
            .terms
            .iter()
            .find(|t| (t.pole - c(1.0, 0.0)).norm() < 1e-9)
            .expect("pole at 1");
        assert!((at_one.coefficients[0] - c(-1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn paper_rational_field_principal_part() {
        // 1/f for f = z(2z-i)^2/(2z+i)^2: decomposition has residue 1 at 0 and
        // principal part 2i/(z-i/2)^2 (zero residue) at i/2.
        let num = Polynomial::from_roots(c(4.0, 0.0), &[(c(0.0, -0.5), 2)]);
        let den = Polynomial::from_roots(c(4.0, 0.0), &[(c(0.0, 0.0), 1), (c(0.0, 0.5), 2)]);
        let r = RationalFunction::new(num, den).unwrap();
        let pf = partial_fractions(&r).unwrap();
        let at_zero = pf.terms.iter().find(|t| t.pole.norm() < 1e-9).unwrap();
        assert!((at_zero.coefficients[0] - c(1.0, 0.0)).norm() < 1e-9);
        let at_half_i = pf
            .terms
            .iter()
            .find(|t| (t.pole - c(0.0, 0.5)).norm() < 1e-9)
            .unwrap();
        assert!(at_half_i.coefficients[0].norm() < 1e-9);
        assert!((at_half_i.coefficients[1] - c(0.0, 2.0)).norm() < 1e-9);
    }

    #[test]
    fn reconstruction_matches_input_on_random_rationals() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let num_deg = rng.gen_range(0..=6usize);
            let den_deg = rng.gen_range(1..=6usize);
            let num = Polynomial::new(
                (0..=num_deg)
                    .map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                    .collect(),
            );
            let den = Polynomial::new(
                (0..=den_deg)
                    .map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                    .collect(),
            );
            if num.is_zero() || den.is_zero() {
                continue;
            }
            let r = match RationalFunction::new(num, den) {
                Ok(r) => r,
                Err(_) => continue,
            };
            if r.denominator().degree().map_or(true, |d| d == 0) {
                continue;
            }
            let pf = partial_fractions(&r).unwrap();
            for _ in 0..100 {
                let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                let exact = r.eval(z);
                if crate::is_singular(exact) || exact.norm() < 1e-6 {
                    continue;
                }
                let rebuilt = pf.eval(z);
                assert!(
                    (rebuilt - exact).norm() <= 1e-9 * exact.norm().max(1.0),
                    "reconstruction off at {z}: {rebuilt} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn residue_sum_vanishes_when_degree_drops_by_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let den_deg = rng.gen_range(2..=6usize);
            let num_deg = den_deg - 2;
            let num = Polynomial::new(
                (0..=num_deg)
                    .map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                    .collect(),
            );
            let den = Polynomial::new(
                (0..=den_deg)
                    .map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                    .collect(),
            );
            if num.is_zero() || den.degree() != Some(den_deg) {
                continue;
            }
            let r = match RationalFunction::new(num, den) {
                Ok(r) => r,
                Err(_) => continue,
            };
            if r.denominator().degree().map_or(0, |d| d)
                < r.numerator().degree().map_or(0, |d| d) + 2
            {
                continue;
            }
            let pf = partial_fractions(&r).unwrap();
            assert!(pf.residue_sum().norm() < 1e-10 * pf_scale(&pf).max(1.0));
        }
    }

    fn pf_scale(pf: &PartialFractions) -> f64 {
        pf.terms
            .iter()
            .flat_map(|t| t.coefficients.iter())
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn solve_dense_small_system() {
        // [1 i; -i 2] x = [1+i; 0]  ->  check by substitution
        let a = vec![
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(2.0, 0.0)],
        ];
        let b = vec![c(1.0, 1.0), c(0.0, 0.0)];
        let x = solve_dense(a.clone(), b.clone()).unwrap();
        for i in 0..2 {
            let lhs = a[i][0] * x[0] + a[i][1] * x[1];
            assert!((lhs - b[i]).norm() < 1e-12);
        }
    }
}
