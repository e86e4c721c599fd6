use std::fmt;

use num_complex::Complex64;

use super::Expr;

// Precedence levels for parenthesization: additive 1, multiplicative 2,
// unary minus 2 (prints as -1*expr anyway), power 3, atoms 4.
fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(_, _) | Expr::Sub(_, _) => 1,
        Expr::Mul(_, _) | Expr::Div(_, _) => 2,
        Expr::Pow(_, _) => 3,
        Expr::Const(c) => {
            if c.im == 0.0 && c.re >= 0.0 {
                4
            } else {
                // Negative or complex constants print with structure.
                0
            }
        }
        _ => 4,
    }
}

fn fmt_constant(f: &mut fmt::Formatter<'_>, c: Complex64) -> fmt::Result {
    if c.im == 0.0 {
        write!(f, "{}", c.re)
    } else if c.re == 0.0 {
        write!(f, "{}i", c.im)
    } else if c.im < 0.0 {
        write!(f, "({}-{}i)", c.re, -c.im)
    } else {
        write!(f, "({}+{}i)", c.re, c.im)
    }
}

fn fmt_child(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if precedence(e) < min_prec {
        write!(f, "(")?;
        write!(f, "{e}")?;
        write!(f, ")")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    /// Prints in the same grammar [`super::parse`] accepts; parsing the output
    /// reproduces the tree (floats use shortest round-trip formatting).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => fmt_constant(f, *c),
            Expr::Z => write!(f, "z"),
            Expr::Add(a, b) => {
                fmt_child(f, a, 1)?;
                write!(f, "+")?;
                fmt_child(f, b, 2)
            }
            Expr::Sub(a, b) => {
                fmt_child(f, a, 1)?;
                write!(f, "-")?;
                fmt_child(f, b, 2)
            }
            Expr::Mul(a, b) => {
                fmt_child(f, a, 2)?;
                write!(f, "*")?;
                fmt_child(f, b, 3)
            }
            Expr::Div(a, b) => {
                fmt_child(f, a, 2)?;
                write!(f, "/")?;
                fmt_child(f, b, 4)
            }
            Expr::Pow(base, k) => {
                fmt_child(f, base, 4)?;
                write!(f, "^")?;
                if k.im == 0.0 && k.re >= 0.0 {
                    write!(f, "{}", k.re)
                } else if k.im == 0.0 {
                    write!(f, "-{}", -k.re)
                } else {
                    write!(f, "(")?;
                    fmt_constant(f, *k)?;
                    write!(f, ")")
                }
            }
            Expr::Exp(e) => write!(f, "exp({e})"),
            Expr::Log(e) => write!(f, "log({e})"),
            Expr::Sin(e) => write!(f, "sin({e})"),
            Expr::Cos(e) => write!(f, "cos({e})"),
            Expr::Tan(e) => write!(f, "tan({e})"),
            Expr::Sinh(e) => write!(f, "sinh({e})"),
            Expr::Cosh(e) => write!(f, "cosh({e})"),
            Expr::Wp(e, _) => write!(f, "wp({e})"),
            Expr::WpPrime(e, _) => write!(f, "wp_prime({e})"),
            Expr::WZeta(e, _) => write!(f, "wzeta({e})"),
            Expr::WSigma(e, _) => write!(f, "wsigma({e})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;

    #[test]
    fn printer_parser_fixpoint_on_corpus() {
        let corpus = [
            "z",
            "exp(z^3)/(3*z^3-1)",
            "(1+2i)*sin(z)",
            "-z^2",
            "z^-2",
            "1/(z-1)",
            "(z-(0.5+0.25i))^(1+1i)",
            "cosh(z)+1",
            "exp(1/z)*(z-1)",
            "z^2-z+1",
            "-1*tan(z)",
            "sin(z)/cos(z)",
            "log(z-2)",
            "2e-3*z+1.5i",
            "z/(z*z-1)",
            "exp(-1*z)*exp(exp(-1*z))",
        ];
        for s in corpus {
            let t1 = parse(s).unwrap();
            let printed = t1.to_string();
            let t2 = parse(&printed)
                .unwrap_or_else(|e| panic!("printed form `{printed}` failed to parse: {e}"));
            assert_eq!(t1, t2, "fixpoint broke for `{s}` -> `{printed}`");
        }
    }
}
