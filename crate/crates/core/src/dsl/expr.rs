use std::fmt;

use num_complex::Complex64;

use crate::error::{GeomError, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Conj,
    Exp,
    Log,
    Abs2,
}

impl Func {
    pub fn name(&self) -> &'static str {
        match self {
            Func::Conj => "conj",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs2 => "abs2",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "conj" => Some(Func::Conj),
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "abs2" => Some(Func::Abs2),
            _ => None,
        }
    }
}

/// Expression tree of the metric language. Variables are 0-based (`z1` is `Var(0)`).
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Lit(Complex64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn real(x: f64) -> Self {
        Expr::Lit(Complex64::new(x, 0.0))
    }

    /// Largest variable index used, 1-based; 0 for constant expressions.
    pub fn max_var(&self) -> usize {
        match self {
            Expr::Lit(_) => 0,
            Expr::Var(k) => k + 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.max_var().max(b.max_var())
            }
        }
    }

    /// True if the tree applies `conj` or `abs2` anywhere.
    pub fn uses_conjugation(&self) -> bool {
        match self {
            Expr::Lit(_) | Expr::Var(_) => false,
            Expr::Call(Func::Conj | Func::Abs2, _) => true,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.uses_conjugation(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.uses_conjugation() || b.uses_conjugation()
            }
        }
    }

    /// Evaluates on any scalar carrier. Division by zero, `log(0)` and negative
    /// powers of zero are domain violations.
    pub fn eval<S: Scalar>(&self, z: &[S]) -> Result<S> {
        let domain = |what: &str| GeomError::DomainViolation {
            field: format!("expression ({what})"),
            point: crate::point::format_point(&z.iter().map(|s| s.value()).collect::<Vec<_>>()),
        };
        Ok(match self {
            Expr::Lit(c) => S::constant(*c),
            Expr::Var(k) => *z.get(*k).ok_or_else(|| {
                GeomError::DimensionMismatch(format!("z{} used in a {}-dimensional chart", k + 1, z.len()))
            })?,
            Expr::Neg(a) => -a.eval(z)?,
            Expr::Add(a, b) => a.eval(z)? + b.eval(z)?,
            Expr::Sub(a, b) => a.eval(z)? - b.eval(z)?,
            Expr::Mul(a, b) => a.eval(z)? * b.eval(z)?,
            Expr::Div(a, b) => {
                let den = b.eval(z)?;
                if den.value() == Complex64::new(0.0, 0.0) {
                    return Err(domain("division by zero"));
                }
                a.eval(z)? / den
            }
            Expr::Pow(a, k) => {
                let base = a.eval(z)?;
                if *k < 0 && base.value() == Complex64::new(0.0, 0.0) {
                    return Err(domain("negative power of zero"));
                }
                base.powi(*k)
            }
            Expr::Call(f, a) => {
                let x = a.eval(z)?;
                match f {
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if x.value() == Complex64::new(0.0, 0.0) {
                            return Err(domain("log of zero"));
                        }
                        x.ln()
                    }
                    Func::Conj => x
                        .try_conj()
                        .ok_or_else(|| GeomError::HolomorphyViolation(self.to_string()))?,
                    Func::Abs2 => {
                        let c = x
                            .try_conj()
                            .ok_or_else(|| GeomError::HolomorphyViolation(self.to_string()))?;
                        x * c
                    }
                }
            }
        })
    }

    fn fmt_expr(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let op = if matches!(self, Expr::Add(..)) { "+" } else { "-" };
                a.fmt_expr(f)?;
                write!(f, " {op} ")?;
                b.fmt_term(f)
            }
            _ => self.fmt_term(f),
        }
    }

    fn fmt_term(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                let op = if matches!(self, Expr::Mul(..)) { "*" } else { "/" };
                a.fmt_term(f)?;
                write!(f, " {op} ")?;
                b.fmt_factor(f)
            }
            Expr::Add(..) | Expr::Sub(..) => {
                write!(f, "(")?;
                self.fmt_expr(f)?;
                write!(f, ")")
            }
            _ => self.fmt_factor(f),
        }
    }

    fn fmt_factor(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Pow(a, k) => {
                a.fmt_atom(f)?;
                write!(f, "^{k}")
            }
            _ => self.fmt_atom(f),
        }
    }

    fn fmt_atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // Imaginary parts are only ever printed inside the parenthesised
            // complex-literal form, so `(a + bi)` cannot reappear as a sum.
            Expr::Lit(c) if c.im == 0.0 && c.re >= 0.0 && !c.re.is_sign_negative() => {
                write!(f, "{}", c.re)
            }
            Expr::Lit(c) => {
                let (re, im) = (c.re, c.im);
                if re < 0.0 || re.is_sign_negative() {
                    write!(f, "-")?;
                    return Expr::Lit(-*c).fmt_atom(f);
                }
                if im < 0.0 {
                    write!(f, "({re}-{}i)", -im)
                } else {
                    write!(f, "({re}+{im}i)")
                }
            }
            Expr::Var(k) => write!(f, "z{}", k + 1),
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.fmt_atom(f)
            }
            Expr::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.fmt_expr(f)?;
                write!(f, ")")
            }
            _ => {
                write!(f, "(")?;
                self.fmt_expr(f)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_expr(f)
    }
}
