use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AlgebraError, Polynomial};

/// Multiplicity-merging radius: simultaneous iteration drives the members of a
/// cluster around a multiple root to within roughly `eps^(1/m)` of it, so the
/// merge radius must sit well above machine precision.
pub const CLUSTER_RADIUS: f64 = 1e-7;

const MAX_ITERATIONS: usize = 400;

/// All roots of `p` with multiplicities, by Aberth-Ehrlich simultaneous
/// iteration. Roots closer than [`CLUSTER_RADIUS`] are merged into one root
/// with summed multiplicity and re-polished by multiplicity-aware Newton steps.
pub fn poly_roots(p: &Polynomial) -> Result<Vec<(Complex64, usize)>, AlgebraError> {
    let deg = match p.degree() {
        None | Some(0) => return Err(AlgebraError::RootsOfConstant),
        Some(d) => d,
    };

    // Exact zero roots come off first; they are common (monomial factors) and
    // cost the iteration accuracy if left in.
    let mut coeffs = p.coeffs().to_vec();
    let mut zero_mult = 0usize;
    while coeffs
        .first()
        .is_some_and(|c| c.re == 0.0 && c.im == 0.0)
        && coeffs.len() > 1
    {
        coeffs.remove(0);
        zero_mult += 1;
    }
    let reduced = Polynomial::new(coeffs);
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    if zero_mult > 0 {
        clusters.push((Complex64::new(0.0, 0.0), zero_mult));
    }

    if reduced.degree() == Some(0) {
        return Ok(clusters);
    }

    let simple = aberth(&reduced)?;
    let mut merged = cluster(&simple);
    for (root, mult) in &mut merged {
        *root = polish(&reduced, *root, *mult);
    }

    // Residual gate on the original polynomial.
    let scale = p.coeff_scale().max(f64::MIN_POSITIVE);
    for &(root, _) in &merged {
        let bound = 1e-9 * scale * root.norm().max(1.0).powi(deg as i32);
        if p.eval(root).norm() > bound {
            return Err(AlgebraError::RootsDiverged {
                poly: p.to_string(),
            });
        }
    }

    clusters.extend(merged);
    clusters.sort_by(|a, b| {
        (a.0.re, a.0.im)
            .partial_cmp(&(b.0.re, b.0.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    debug_assert_eq!(clusters.iter().map(|&(_, m)| m).sum::<usize>(), deg);
    Ok(clusters)
}

fn aberth(p: &Polynomial) -> Result<Vec<Complex64>, AlgebraError> {
    let deg = p.degree().expect("nonconstant");
    let lead = p.leading_coeff();

    // Cauchy bound for the root radius, plus a jittered ring start so no two
    // guesses coincide and no guess lands on a symmetry axis.
    let radius = 1.0
        + p.coeffs()
            .iter()
            .take(deg)
            .map(|c| (c / lead).norm())
            .fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e3779b97f4a7c15);
    let mut zs: Vec<Complex64> = (0..deg)
        .map(|k| {
            let angle = std::f64::consts::TAU * (k as f64 + 0.354) / deg as f64
                + rng.gen_range(-0.05..0.05);
            let r = radius * (0.6 + 0.3 * rng.gen_range(0.0..1.0));
            Complex64::from_polar(r, angle)
        })
        .collect();

    for _ in 0..MAX_ITERATIONS {
        let mut done = true;
        for i in 0..deg {
            let (pv, dpv) = p.eval_with_derivative(zs[i]);
            if pv.norm() == 0.0 {
                continue;
            }
            let newton = if dpv.norm() == 0.0 {
                // Flat spot: nudge off it.
                Complex64::new(1e-8, 1e-8)
            } else {
                pv / dpv
            };
            let mut repulsion = Complex64::new(0.0, 0.0);
            for j in 0..deg {
                if i != j {
                    let d = zs[i] - zs[j];
                    if d.norm() > 1e-300 {
                        repulsion += 1.0 / d;
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
            let correction = if denom.norm() < 1e-300 {
                newton
            } else {
                newton / denom
            };
            zs[i] -= correction;
            if correction.norm() > 1e-13 * (1.0 + zs[i].norm()) {
                done = false;
            }
        }
        if done {
            return Ok(zs);
        }
    }
    // Aberth stalls near multiple roots at the cluster scale; that is still a
    // success for us because clustering recovers the multiplicity.
    let scale = p.coeff_scale().max(f64::MIN_POSITIVE);
    let acceptable = zs.iter().all(|&z| {
        p.eval(z).norm() < 1e-6 * scale * z.norm().max(1.0).powi(p.degree().unwrap() as i32)
    });
    if acceptable {
        Ok(zs)
    } else {
        Err(AlgebraError::RootsDiverged {
            poly: p.to_string(),
        })
    }
}

fn cluster(roots: &[Complex64]) -> Vec<(Complex64, usize)> {
    let mut remaining: Vec<Complex64> = roots.to_vec();
    let mut out = Vec::new();
    while let Some(seed) = remaining.pop() {
        let mut members = vec![seed];
        // Chain-link: anything within the radius of any member joins.
        loop {
            let before = remaining.len();
            remaining.retain(|&z| {
                let close = members.iter().any(|&m| (z - m).norm() < CLUSTER_RADIUS);
                if close {
                    members.push(z);
                }
                !close
            });
            if remaining.len() == before {
                break;
            }
        }
        let mean = members.iter().sum::<Complex64>() / members.len() as f64;
        out.push((mean, members.len()));
    }
    out
}

/// Multiplicity-aware Newton polish: `z -= m * p(z)/p'(z)` converges
/// quadratically at an m-fold root.
fn polish(p: &Polynomial, mut z: Complex64, mult: usize) -> Complex64 {
    for _ in 0..30 {
        let (pv, dpv) = p.eval_with_derivative(z);
        if dpv.norm() == 0.0 {
            break;
        }
        let step = mult as f64 * pv / dpv;
        z -= step;
        if step.norm() < 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn find(roots: &[(Complex64, usize)], target: Complex64) -> (Complex64, usize) {
        *roots
            .iter()
            .min_by(|a, b| {
                (a.0 - target)
                    .norm()
                    .partial_cmp(&(b.0 - target).norm())
                    .unwrap()
            })
            .expect("nonempty")
    }

    #[test]
    fn cube_roots_of_unity() {
        // z^3 - 1
        let p = Polynomial::new(vec![c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let roots = poly_roots(&p).unwrap();
        assert_eq!(roots.len(), 3);
        for k in 0..3 {
            let expected = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 3.0);
            let (found, mult) = find(&roots, expected);
            assert_eq!(mult, 1);
            assert!((found - expected).norm() < 1e-10);
        }
    }

    #[test]
    fn double_zero_root() {
        let p = Polynomial::monomial(c(1.0, 0.0), 2);
        let roots = poly_roots(&p).unwrap();
        assert_eq!(roots, vec![(c(0.0, 0.0), 2)]);
    }

    #[test]
    fn double_root_at_one_and_simple_at_minus_i() {
        // (z-1)^2 (z+i), expanded by the oracle below and refactored
        let expected = [(c(1.0, 0.0), 2usize), (c(0.0, -1.0), 1usize)];
        let p = Polynomial::from_roots(c(1.0, 0.0), &expected);
        assert_eq!(
            p,
            Polynomial::new(vec![c(0.0, 1.0), c(1.0, -2.0), c(-2.0, 1.0), c(1.0, 0.0)])
        );
        let roots = poly_roots(&p).unwrap();
        assert_eq!(roots.len(), 2);
        let (r1, m1) = find(&roots, c(1.0, 0.0));
        assert_eq!(m1, 2);
        assert!((r1 - c(1.0, 0.0)).norm() < 1e-8);
        let (r2, m2) = find(&roots, c(0.0, -1.0));
        assert_eq!(m2, 1);
        assert!((r2 - c(0.0, -1.0)).norm() < 1e-10);
    }

    #[test]
    fn constant_rejected() {
        assert!(poly_roots(&Polynomial::one()).is_err());
    }

    #[test]
    fn high_degree_random_poly_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let coeffs: Vec<Complex64> = (0..13)
            .map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        let p = Polynomial::new(coeffs);
        let roots = poly_roots(&p).unwrap();
        assert_eq!(roots.iter().map(|&(_, m)| m).sum::<usize>(), 12);
        for &(r, _) in &roots {
            assert!(p.eval(r).norm() <= 1e-9 * p.coeff_scale() * r.norm().max(1.0).powi(12));
        }
    }
}
