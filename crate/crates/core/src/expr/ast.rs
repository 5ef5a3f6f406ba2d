use std::fmt;

use super::dual::Dual2;

/// Expression tree for a closed-form function of `t`.
///
/// Parentheses are not kept as nodes; the printer re-inserts them from
/// operator precedence so that printing and re-parsing yields an equal tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Ln(Box<Expr>),
}

/// Why a node could not be evaluated.
#[derive(Clone, Debug, PartialEq)]
pub enum DomainFault {
    DivisionByZero,
    LogOfNonPositive(f64),
    Power { base: f64, exponent: f64 },
    NonFinite,
}

impl fmt::Display for DomainFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainFault::DivisionByZero => write!(f, "division by zero"),
            DomainFault::LogOfNonPositive(x) => write!(f, "ln of non-positive value {x}"),
            DomainFault::Power { base, exponent } => {
                write!(f, "{base}^{exponent} needs a positive base")
            }
            DomainFault::NonFinite => write!(f, "non-finite result"),
        }
    }
}

// Plain constructors, not operator overloads.
#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn constant(v: f64) -> Self {
        Expr::Const(v)
    }

    pub fn add(a: Expr, b: Expr) -> Self {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Self {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Self {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Self {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn ln(a: Expr) -> Self {
        Expr::Ln(Box::new(a))
    }

    /// True when the subtree does not mention `t`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var => false,
            Expr::Neg(a) | Expr::Exp(a) | Expr::Ln(a) => a.is_constant(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.is_constant() && b.is_constant(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(v) if *v == 0.0)
    }

    pub fn eval(&self, t: f64) -> Result<f64, DomainFault> {
        self.eval_dual(Dual2::variable(t)).map(|d| d.v)
    }

    pub fn eval_dual(&self, t: Dual2) -> Result<Dual2, DomainFault> {
        let out = match self {
            Expr::Const(c) => Dual2::constant(*c),
            Expr::Var => t,
            Expr::Neg(a) => -a.eval_dual(t)?,
            Expr::Add(a, b) => a.eval_dual(t)? + b.eval_dual(t)?,
            Expr::Sub(a, b) => a.eval_dual(t)? - b.eval_dual(t)?,
            Expr::Mul(a, b) => a.eval_dual(t)? * b.eval_dual(t)?,
            Expr::Div(a, b) => {
                let num = a.eval_dual(t)?;
                let den = b.eval_dual(t)?;
                if den.v == 0.0 {
                    return Err(DomainFault::DivisionByZero);
                }
                num / den
            }
            Expr::Pow(a, b) => {
                let base = a.eval_dual(t)?;
                let exponent = b.eval_dual(t)?;
                if exponent.is_constant() {
                    let p = exponent.v;
                    if p.fract() != 0.0 && base.v <= 0.0 {
                        return Err(DomainFault::Power {
                            base: base.v,
                            exponent: p,
                        });
                    }
                    if base.v == 0.0 && p < 0.0 {
                        return Err(DomainFault::DivisionByZero);
                    }
                    base.powf_const(p)
                } else {
                    if base.v <= 0.0 {
                        return Err(DomainFault::Power {
                            base: base.v,
                            exponent: exponent.v,
                        });
                    }
                    (exponent * base.ln()).exp()
                }
            }
            Expr::Exp(a) => a.eval_dual(t)?.exp(),
            Expr::Ln(a) => {
                let x = a.eval_dual(t)?;
                if x.v <= 0.0 {
                    return Err(DomainFault::LogOfNonPositive(x.v));
                }
                x.ln()
            }
        };
        if out.v.is_nan() || out.v.is_infinite() {
            return Err(DomainFault::NonFinite);
        }
        Ok(out)
    }

    /// Symbolic `ln(self)`, pushed through products, quotients, powers and
    /// `exp` so that e.g. `ln(a * exp(-t^2))` never forms the underflowing
    /// product.
    pub fn log_of(&self) -> Expr {
        match self {
            Expr::Mul(a, b) => Expr::add(a.log_of(), b.log_of()),
            Expr::Div(a, b) => match a.as_ref() {
                Expr::Const(v) if *v == 1.0 => Expr::Neg(Box::new(b.log_of())),
                _ => Expr::sub(a.log_of(), b.log_of()),
            },
            Expr::Exp(a) => (**a).clone(),
            Expr::Pow(a, b) => Expr::mul((**b).clone(), a.log_of()),
            Expr::Const(v) if *v > 0.0 => Expr::Const(v.ln()),
            other => Expr::ln(other.clone()),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(v) if *v < 0.0 || v.is_sign_negative() => 3,
            _ => 5,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Const(v) => {
                if v.is_sign_negative() {
                    write!(f, "-{}", -v)
                } else {
                    write!(f, "{v}")
                }
            }
            Expr::Var => write!(f, "t"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.fmt_at(f, 3)
            }
            Expr::Add(a, b) => {
                a.fmt_at(f, 1)?;
                write!(f, " + ")?;
                b.fmt_at(f, 2)
            }
            Expr::Sub(a, b) => {
                a.fmt_at(f, 1)?;
                write!(f, " - ")?;
                b.fmt_at(f, 2)
            }
            Expr::Mul(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, "*")?;
                b.fmt_at(f, 3)
            }
            Expr::Div(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, "/")?;
                b.fmt_at(f, 3)
            }
            Expr::Pow(a, b) => {
                a.fmt_at(f, 5)?;
                write!(f, "^")?;
                b.fmt_at(f, 3)
            }
            Expr::Exp(a) => {
                write!(f, "exp(")?;
                a.fmt_at(f, 0)?;
                write!(f, ")")
            }
            Expr::Ln(a) => {
                write!(f, "ln(")?;
                a.fmt_at(f, 0)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}
