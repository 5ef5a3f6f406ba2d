//! Recursive-descent parser for the piecewise function language.
//!
//! ```text
//! func     := piece (";" piece)*
//! piece    := expr ["on" "[" endpoint "," (endpoint | "inf") (")" | "]")]
//! expr     := term (("+" | "-") term)*
//! term     := factor (("*" | "/") factor)*
//! factor   := "-" factor | atom ["^" factor]
//! atom     := number | "t" | "(" expr ")" | "exp" "(" expr ")" | "ln" "(" expr ")"
//! ```
//!
//! Endpoints are constant expressions, so `(1/4)` and `0.25` are the same bound.

use super::ast::Expr;
use super::ExprError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Plus => "'+'".into(),
        Tok::Minus => "'-'".into(),
        Tok::Star => "'*'".into(),
        Tok::Slash => "'/'".into(),
        Tok::Caret => "'^'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::LBracket => "'['".into(),
        Tok::RBracket => "']'".into(),
        Tok::Comma => "','".into(),
        Tok::Semi => "';'".into(),
        Tok::End => "end of input".into(),
    }
}

fn lex(src: &str) -> Result<Vec<Token>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token {
                tok,
                line: tl,
                column: tc,
            });
            i += 1;
            column += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // optional exponent: 1e-3, 2.5E+4
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value: f64 = text.parse().map_err(|_| ExprError::Syntax {
                line: tl,
                column: tc,
                message: format!("malformed number '{text}'"),
            })?;
            column += i - start;
            out.push(Token {
                tok: Tok::Num(value),
                line: tl,
                column: tc,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            column += i - start;
            out.push(Token {
                tok: Tok::Ident(word),
                line: tl,
                column: tc,
            });
            continue;
        }
        return Err(ExprError::Syntax {
            line: tl,
            column: tc,
            message: format!("unexpected character '{c}'"),
        });
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

/// One parsed piece before coverage checks.
pub(super) struct RawPiece {
    pub body: Expr,
    pub interval: Option<(f64, f64)>,
    pub line: usize,
    pub column: usize,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> ExprError {
        let t = self.peek();
        ExprError::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ExprError> {
        if self.peek().tok == want {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(format!(
                "expected {what}, found {}",
                describe(&self.peek().tok)
            )))
        }
    }

    fn is_ident(&self, word: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(w) if w == word)
    }

    fn func(&mut self) -> Result<Vec<RawPiece>, ExprError> {
        let mut pieces = vec![self.piece()?];
        while self.peek().tok == Tok::Semi {
            self.bump();
            pieces.push(self.piece()?);
        }
        if self.peek().tok != Tok::End {
            return Err(self.error_here(format!(
                "unexpected {} after expression",
                describe(&self.peek().tok)
            )));
        }
        Ok(pieces)
    }

    fn piece(&mut self) -> Result<RawPiece, ExprError> {
        let (line, column) = (self.peek().line, self.peek().column);
        let body = self.expr()?;
        let interval = if self.is_ident("on") {
            self.bump();
            self.expect(Tok::LBracket, "'['")?;
            let lo = self.endpoint()?;
            self.expect(Tok::Comma, "','")?;
            let hi = if self.is_ident("inf") {
                self.bump();
                f64::INFINITY
            } else {
                self.endpoint()?
            };
            match self.peek().tok {
                Tok::RParen | Tok::RBracket => {
                    self.bump();
                }
                _ => return Err(self.error_here("expected ')' or ']' closing the interval")),
            }
            Some((lo, hi))
        } else {
            None
        };
        Ok(RawPiece {
            body,
            interval,
            line,
            column,
        })
    }

    fn endpoint(&mut self) -> Result<f64, ExprError> {
        let (line, column) = (self.peek().line, self.peek().column);
        let e = self.expr()?;
        if !e.is_constant() {
            return Err(ExprError::Syntax {
                line,
                column,
                message: "interval endpoint must not depend on t".into(),
            });
        }
        e.eval(0.0).map_err(|fault| ExprError::Syntax {
            line,
            column,
            message: format!("interval endpoint: {fault}"),
        })
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::add(lhs, self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::mul(lhs, self.factor()?);
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::div(lhs, self.factor()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if self.peek().tok == Tok::Caret {
            self.bump();
            let exponent = self.factor()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let tok = self.peek().clone();
        match tok.tok {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Const(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Ident(ref w) => match w.as_str() {
                "t" => {
                    self.bump();
                    Ok(Expr::Var)
                }
                "exp" | "ln" => {
                    let is_exp = w == "exp";
                    self.bump();
                    self.expect(Tok::LParen, "'(' after function name")?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "')'")?;
                    Ok(if is_exp {
                        Expr::Exp(Box::new(arg))
                    } else {
                        Expr::Ln(Box::new(arg))
                    })
                }
                other => Err(ExprError::Syntax {
                    line: tok.line,
                    column: tok.column,
                    message: format!("unknown identifier '{other}'"),
                }),
            },
            other => Err(ExprError::Syntax {
                line: tok.line,
                column: tok.column,
                message: format!("expected a number, 't', '(' or a function, found {}", describe(&other)),
            }),
        }
    }
}

pub(super) fn parse_pieces(src: &str) -> Result<Vec<RawPiece>, ExprError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    p.func()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn body(src: &str) -> Expr {
        let mut pieces = parse_pieces(src).unwrap();
        assert_eq!(pieces.len(), 1);
        pieces.remove(0).body
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let e = body("-t^2");
        assert_eq!(e.eval(3.0).unwrap(), -9.0);
        let e = body("t^-1");
        assert_eq!(e.eval(4.0).unwrap(), 0.25);
    }

    #[test]
    fn power_is_right_associative() {
        let e = body("2^3^2");
        assert_eq!(e.eval(0.0).unwrap(), 512.0);
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = parse_pieces("1 +\n  * t").err().unwrap();
        match err {
            ExprError::Syntax { line, column, .. } => assert_eq!((line, column), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_identifier() {
        assert!(matches!(
            parse_pieces("sin(t)"),
            Err(ExprError::Syntax { line: 1, column: 1, .. })
        ));
    }

    #[test]
    fn scientific_notation() {
        assert_eq!(body("1e-3").eval(0.0).unwrap(), 1e-3);
        assert_eq!(body("2.5E+2*t").eval(2.0).unwrap(), 500.0);
    }
}
