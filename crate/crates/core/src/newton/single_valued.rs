use num_complex::Complex64;

use super::ClosedFormPsi;

/// Multivaluedness analysis of `Psi` and `Phi` from the residues of
/// `omega = dz/f`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleValuedness {
    /// `Psi` is single-valued iff every residue vanishes.
    pub psi_single: bool,
    /// `Phi` is a single-valued map to the sphere (for a suitably scaled
    /// radial target field) iff all periods `2 pi i lambda_j` are integer
    /// multiples of one complex number `Pi`.
    pub phi_single: bool,
    /// The common period `Pi` when it exists and residues are nonzero.
    pub common_period: Option<Complex64>,
}

const RESIDUE_ZERO_TOL: f64 = 1e-10;
const INTEGER_TOL: f64 = 1e-8;
const MAX_DENOMINATOR: i64 = 1_000_000;

/// Decides single-valuedness of `Psi` (all residues zero) and `Phi` (residues
/// commensurable: pairwise rational ratios, searched within 1e-8).
pub fn single_valuedness(psi: &ClosedFormPsi) -> SingleValuedness {
    let lambdas: Vec<Complex64> = psi
        .log_terms()
        .iter()
        .map(|&(_, l)| l)
        .filter(|l| l.norm() > RESIDUE_ZERO_TOL)
        .collect();

    if lambdas.is_empty() {
        return SingleValuedness {
            psi_single: true,
            phi_single: true,
            common_period: None,
        };
    }

    let reference = lambdas[0];
    let mut fractions: Vec<(i64, i64)> = Vec::with_capacity(lambdas.len());
    for l in &lambdas {
        let ratio = l / reference;
        if ratio.im.abs() > INTEGER_TOL * (1.0 + ratio.norm()) {
            return not_commensurable();
        }
        match rational_approx(ratio.re) {
            Some(pq) => fractions.push(pq),
            None => return not_commensurable(),
        }
    }

    let lcm_den = fractions
        .iter()
        .fold(1i64, |acc, &(_, q)| lcm(acc, q));
    let multiples: Vec<i64> = fractions
        .iter()
        .map(|&(p, q)| p * (lcm_den / q))
        .collect();
    let common = multiples.iter().fold(0i64, |acc, &n| gcd(acc, n.abs()));
    let generator = reference * common as f64 / lcm_den as f64;

    // Final integer gate at the spec tolerance.
    for l in &lambdas {
        let n = l / generator;
        if (n.re - n.re.round()).abs() > INTEGER_TOL || n.im.abs() > INTEGER_TOL {
            return not_commensurable();
        }
    }

    SingleValuedness {
        psi_single: false,
        phi_single: true,
        common_period: Some(Complex64::new(0.0, std::f64::consts::TAU) * generator),
    }
}

fn not_commensurable() -> SingleValuedness {
    SingleValuedness {
        psi_single: false,
        phi_single: false,
        common_period: None,
    }
}

/// Continued-fraction rational reconstruction of `x` within [`INTEGER_TOL`].
fn rational_approx(x: f64) -> Option<(i64, i64)> {
    let mut a = x.floor() as i64;
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, a, 1i64);
    let mut frac = x - a as f64;
    for _ in 0..64 {
        if (x - p1 as f64 / q1 as f64).abs() <= INTEGER_TOL {
            return Some((p1, q1));
        }
        if frac.abs() < f64::EPSILON {
            break;
        }
        let inv = 1.0 / frac;
        a = inv.floor() as i64;
        frac = inv - a as f64;
        let p2 = a.checked_mul(p1)?.checked_add(p0)?;
        let q2 = a.checked_mul(q1)?.checked_add(q0)?;
        if q2 > MAX_DENOMINATOR {
            return None;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    if q1 != 0 && (x - p1 as f64 / q1 as f64).abs() <= INTEGER_TOL {
        Some((p1, q1))
    } else {
        None
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: i64, b: i64) -> i64 {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Polynomial, RationalFunction};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn psi_of(num: &[Complex64], den: &[Complex64], z0: Complex64) -> ClosedFormPsi {
        let f = RationalFunction::new(
            Polynomial::new(num.to_vec()),
            Polynomial::new(den.to_vec()),
        )
        .unwrap();
        ClosedFormPsi::build(&f, z0).unwrap()
    }

    #[test]
    fn polynomial_psi_single_both_ways() {
        // f = 1/z^2 has no residues at all.
        let psi = psi_of(
            &[c(1.0, 0.0)],
            &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            c(1.0, 0.0),
        );
        let sv = single_valuedness(&psi);
        assert!(sv.psi_single);
        assert!(sv.phi_single);
        assert_eq!(sv.common_period, None);
    }

    #[test]
    fn simple_zero_period_two_pi_i() {
        // f = z: lambda = 1, so Psi is multivalued but Phi = 1/z is fine,
        // with period 2 pi i.
        let psi = psi_of(&[c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0)], c(1.0, 0.0));
        let sv = single_valuedness(&psi);
        assert!(!sv.psi_single);
        assert!(sv.phi_single);
        let pi = sv.common_period.unwrap();
        assert!((pi - c(0.0, std::f64::consts::TAU)).norm() < 1e-8);
    }

    #[test]
    fn sqrt_two_exponent_not_single_valued() {
        // The field of Phi = z^{sqrt 2} (z-1):
        // f = -(1/(sqrt2+1)) z(z-1)/(z - sqrt2/(sqrt2+1)), residues -sqrt2, -1.
        let s = std::f64::consts::SQRT_2;
        let scale = -1.0 / (s + 1.0);
        let num = Polynomial::from_roots(
            c(scale, 0.0),
            &[(c(0.0, 0.0), 1), (c(1.0, 0.0), 1)],
        );
        let den = Polynomial::new(vec![c(-s / (s + 1.0), 0.0), c(1.0, 0.0)]);
        let f = RationalFunction::new(num, den).unwrap();
        let psi = ClosedFormPsi::build(&f, c(0.5, 0.5)).unwrap();
        // sanity: residues are -sqrt2 and -1 in some order
        let mut res: Vec<f64> = psi.log_terms().iter().map(|&(_, l)| l.re).collect();
        res.sort_by(f64::total_cmp);
        assert!((res[0] + s).abs() < 1e-9 && (res[1] + 1.0).abs() < 1e-9);
        let sv = single_valuedness(&psi);
        assert!(!sv.psi_single);
        assert!(!sv.phi_single);
        assert_eq!(sv.common_period, None);
    }

    #[test]
    fn rational_ratio_residues_find_generator() {
        // 1/f = 1.5/z + 1/(z-1) = (2.5 z - 1.5)/(z(z-1)): residues 3/2 and 1,
        // so the generator is 1/2 and the common period is pi*i.
        let psi = psi_of(
            &[c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)],
            &[c(-1.5, 0.0), c(2.5, 0.0)],
            c(2.0, 0.0),
        );
        let sv = single_valuedness(&psi);
        assert!(!sv.psi_single);
        assert!(sv.phi_single);
        let pi = sv.common_period.unwrap();
        assert!(
            (pi - c(0.0, std::f64::consts::PI)).norm() < 1e-7,
            "period {pi}"
        );
    }
}
