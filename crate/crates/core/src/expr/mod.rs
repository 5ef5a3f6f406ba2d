//! Closed-form, possibly piecewise, functions of `t`.
//!
//! Pieces are left-closed and right-open, so at an interior breakpoint the
//! value comes from the piece on the right. Inside a piece the first and
//! second derivatives are exact (forward-mode dual numbers).

mod ast;
mod dual;
mod parse;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use ast::{DomainFault, Expr};
pub use dual::Dual2;

/// Relative tolerance used to decide whether one-sided derivatives agree.
const JOIN_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("first piece starts at {0}, expected 0")]
    FirstNotZero(f64),
    #[error("gap between pieces: one ends at {end}, the next starts at {next}")]
    Gap { end: f64, next: f64 },
    #[error("pieces overlap: one ends at {end}, the next starts at {next}")]
    Overlap { end: f64, next: f64 },
    #[error("empty interval [{lower}, {upper})")]
    EmptyInterval { lower: f64, upper: f64 },
    #[error("only the last piece may extend to inf (piece {piece} does)")]
    UnboundedNotLast { piece: usize },
    #[error("last piece must extend to inf, it ends at {0}")]
    LastBounded(f64),
    #[error("negative argument t = {0}")]
    NegativeArgument(f64),
    #[error("domain error at t = {t}: {fault}")]
    Domain { t: f64, fault: DomainFault },
    #[error("two-sided derivative requested at breakpoint t = {t}, but left {left} and right {right} differ")]
    Kink { t: f64, left: f64, right: f64 },
}

/// Which adjacent piece to use at a breakpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    TwoSided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivOrder {
    First,
    Second,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub lower: f64,
    pub upper: f64,
    pub body: Expr,
}

/// A function of `t` on `[0, ∞)` made of contiguous pieces.
#[derive(Clone, Debug)]
pub struct PiecewiseExpr {
    pieces: Vec<Piece>,
    source: String,
}

impl PartialEq for PiecewiseExpr {
    /// Structural equality of the pieces; the source text is ignored.
    fn eq(&self, other: &Self) -> bool {
        self.pieces == other.pieces
    }
}

impl PiecewiseExpr {
    pub fn parse(src: &str) -> Result<Self, ExprError> {
        let raw = parse::parse_pieces(src)?;
        let n = raw.len();
        let mut pieces = Vec::with_capacity(n);
        for (i, rp) in raw.into_iter().enumerate() {
            let (lower, upper) = match rp.interval {
                Some(iv) => iv,
                None if n == 1 => (0.0, f64::INFINITY),
                None => {
                    return Err(ExprError::Syntax {
                        line: rp.line,
                        column: rp.column,
                        message: format!("piece {} needs an 'on [a, b)' interval", i + 1),
                    })
                }
            };
            pieces.push(Piece {
                lower,
                upper,
                body: rp.body,
            });
        }
        Self::check_tiling(&pieces)?;
        Ok(Self {
            pieces,
            source: src.trim().to_string(),
        })
    }

    /// A single smooth piece on `[0, ∞)`.
    pub fn from_expr(body: Expr) -> Self {
        let pieces = vec![Piece {
            lower: 0.0,
            upper: f64::INFINITY,
            body,
        }];
        Self::from_pieces_unchecked(pieces)
    }

    pub fn constant(v: f64) -> Self {
        Self::from_expr(Expr::Const(v))
    }

    pub fn from_pieces(pieces: Vec<Piece>) -> Result<Self, ExprError> {
        Self::check_tiling(&pieces)?;
        Ok(Self::from_pieces_unchecked(pieces))
    }

    fn from_pieces_unchecked(pieces: Vec<Piece>) -> Self {
        let mut out = Self {
            pieces,
            source: String::new(),
        };
        out.source = out.to_string();
        out
    }

    fn check_tiling(pieces: &[Piece]) -> Result<(), ExprError> {
        let first = &pieces[0];
        if first.lower != 0.0 {
            return Err(ExprError::FirstNotZero(first.lower));
        }
        let last = pieces.len() - 1;
        for (i, p) in pieces.iter().enumerate() {
            if p.upper.is_infinite() && i != last {
                return Err(ExprError::UnboundedNotLast { piece: i + 1 });
            }
            if !(p.lower < p.upper) {
                return Err(ExprError::EmptyInterval {
                    lower: p.lower,
                    upper: p.upper,
                });
            }
        }
        if pieces[last].upper.is_finite() {
            return Err(ExprError::LastBounded(pieces[last].upper));
        }
        for w in pieces.windows(2) {
            let (end, next) = (w[0].upper, w[1].lower);
            if next > end {
                return Err(ExprError::Gap { end, next });
            }
            if next < end {
                return Err(ExprError::Overlap { end, next });
            }
        }
        Ok(())
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Interior breakpoints in increasing order.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces.iter().skip(1).map(|p| p.lower).collect()
    }

    pub fn is_breakpoint(&self, t: f64) -> bool {
        self.pieces.iter().skip(1).any(|p| p.lower == t)
    }

    /// Index of the piece whose half-open interval contains `t`.
    fn piece_index(&self, t: f64) -> usize {
        self.pieces
            .partition_point(|p| p.lower <= t)
            .saturating_sub(1)
    }

    fn piece_for(&self, t: f64, side: Side) -> usize {
        let i = self.piece_index(t);
        if side == Side::Left && i > 0 && self.pieces[i].lower == t {
            i - 1
        } else {
            i
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64, ExprError> {
        self.eval_dual(t, Side::Right).map(|d| d.v)
    }

    /// Value with first and second derivatives, taken from the piece selected
    /// by `side` (`TwoSided` behaves like `Right` here).
    pub fn eval_dual(&self, t: f64, side: Side) -> Result<Dual2, ExprError> {
        if t < 0.0 || t.is_nan() {
            return Err(ExprError::NegativeArgument(t));
        }
        let i = self.piece_for(t, side);
        self.pieces[i]
            .body
            .eval_dual(Dual2::variable(t))
            .map_err(|fault| ExprError::Domain { t, fault })
    }

    pub fn deriv(&self, t: f64, order: DerivOrder, side: Side) -> Result<f64, ExprError> {
        let pick = |d: Dual2| match order {
            DerivOrder::First => d.d1,
            DerivOrder::Second => d.d2,
        };
        if side == Side::TwoSided && t > 0.0 && self.is_breakpoint(t) {
            let left = pick(self.eval_dual(t, Side::Left)?);
            let right = pick(self.eval_dual(t, Side::Right)?);
            let scale = 1f64.max(left.abs()).max(right.abs());
            if (left - right).abs() > JOIN_TOL * scale {
                return Err(ExprError::Kink { t, left, right });
            }
            return Ok(right);
        }
        Ok(pick(self.eval_dual(t, side)?))
    }

    /// Pointwise sum, with breakpoints merged.
    pub fn add(&self, other: &PiecewiseExpr) -> PiecewiseExpr {
        let mut cuts: Vec<f64> = self
            .breakpoints()
            .into_iter()
            .chain(other.breakpoints())
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut bounds = vec![0.0];
        bounds.extend(cuts);
        bounds.push(f64::INFINITY);
        let pieces = bounds
            .windows(2)
            .map(|w| {
                let a = &self.pieces[self.piece_index(w[0])].body;
                let b = &other.pieces[other.piece_index(w[0])].body;
                let body = if a.is_zero() {
                    b.clone()
                } else if b.is_zero() {
                    a.clone()
                } else {
                    Expr::add(a.clone(), b.clone())
                };
                Piece {
                    lower: w[0],
                    upper: w[1],
                    body,
                }
            })
            .collect();
        Self::from_pieces_unchecked(pieces)
    }

    /// `ln` of the function, pushed symbolically through products, quotients,
    /// powers and `exp` so that tiny survival values never materialize.
    pub fn log_rewrite(&self) -> PiecewiseExpr {
        self.map_bodies(|b| b.log_of())
    }

    /// The function `t ↦ f(k·t)`.
    pub fn scale_argument(&self, k: f64) -> PiecewiseExpr {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                lower: p.lower / k,
                upper: p.upper / k,
                body: p.body.substitute_var(&Expr::mul(Expr::Const(k), Expr::Var)),
            })
            .collect();
        Self::from_pieces_unchecked(pieces)
    }

    fn map_bodies(&self, f: impl Fn(&Expr) -> Expr) -> PiecewiseExpr {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                lower: p.lower,
                upper: p.upper,
                body: f(&p.body),
            })
            .collect();
        Self::from_pieces_unchecked(pieces)
    }

    /// True when every piece is the literal constant 0.
    pub fn is_identically_zero(&self) -> bool {
        self.pieces
            .iter()
            .all(|p| p.body.is_constant() && p.body.eval(0.0) == Ok(0.0))
    }

    /// `(breakpoint, left value, right value)` for every interior breakpoint.
    pub fn continuity_jumps(&self) -> Result<Vec<(f64, f64, f64)>, ExprError> {
        self.one_sided_pairs(|d| d.v)
    }

    /// `(breakpoint, left slope, right slope)` for every interior breakpoint.
    pub fn derivative_jumps(&self) -> Result<Vec<(f64, f64, f64)>, ExprError> {
        self.one_sided_pairs(|d| d.d1)
    }

    fn one_sided_pairs(&self, pick: impl Fn(Dual2) -> f64) -> Result<Vec<(f64, f64, f64)>, ExprError> {
        self.breakpoints()
            .into_iter()
            .map(|b| {
                let l = pick(self.eval_dual(b, Side::Left)?);
                let r = pick(self.eval_dual(b, Side::Right)?);
                Ok((b, l, r))
            })
            .collect()
    }

    /// Largest relative mismatch between adjacent pieces at a breakpoint.
    pub fn max_jump(&self) -> Result<f64, ExprError> {
        Ok(self
            .continuity_jumps()?
            .into_iter()
            .map(|(_, l, r)| (l - r).abs() / 1f64.max(l.abs()).max(r.abs()))
            .fold(0.0, f64::max))
    }
}

impl Expr {
    /// Replace every occurrence of `t` by `with`.
    pub fn substitute_var(&self, with: &Expr) -> Expr {
        let s = |e: &Expr| Box::new(e.substitute_var(with));
        match self {
            Expr::Const(v) => Expr::Const(*v),
            Expr::Var => with.clone(),
            Expr::Neg(a) => Expr::Neg(s(a)),
            Expr::Exp(a) => Expr::Exp(s(a)),
            Expr::Ln(a) => Expr::Ln(s(a)),
            Expr::Add(a, b) => Expr::Add(s(a), s(b)),
            Expr::Sub(a, b) => Expr::Sub(s(a), s(b)),
            Expr::Mul(a, b) => Expr::Mul(s(a), s(b)),
            Expr::Div(a, b) => Expr::Div(s(a), s(b)),
            Expr::Pow(a, b) => Expr::Pow(s(a), s(b)),
        }
    }
}

impl FromStr for PiecewiseExpr {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl fmt::Display for PiecewiseExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.len() == 1 {
            return write!(f, "{}", self.pieces[0].body);
        }
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{} on [{}, ", p.body, p.lower)?;
            if p.upper.is_infinite() {
                write!(f, "inf)")?;
            } else {
                write!(f, "{})", p.upper)?;
            }
        }
        Ok(())
    }
}
