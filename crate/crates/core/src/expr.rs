//! Expression language for user-registered families.
//!
//! ```text
//! expr   := term   (("+" | "-" | "−") term)*
//! term   := unary  (("*" | "×" | "/" | "÷") unary)*
//! unary  := ("-" | "−" | "+") unary | power
//! power  := atom ("^" unary)?            right associative
//! atom   := number | "a" | "x" | "pi" | "π" | "e"
//!         | func "(" expr ")" | "(" expr ")"
//! func   := sin | cos | tan | ln | exp | abs | sqrt
//! ```
//!
//! `a` is the family parameter and `x` the moment. Implicit
//! multiplication is not supported: write `2*x`, not `2x`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Ln,
    Exp,
    Abs,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "ln" => Func::Ln,
            "exp" => Func::Exp,
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Tan => v.tan(),
            Func::Ln => v.ln(),
            Func::Exp => v.exp(),
            Func::Abs => v.abs(),
            Func::Sqrt => v.sqrt(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Ln => "ln",
            Func::Exp => "exp",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Param,
    Moment,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, a: f64, x: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Param => a,
            Expr::Moment => x,
            Expr::Neg(e) => -e.eval(a, x),
            Expr::Bin(op, l, r) => {
                let (l, r) = (l.eval(a, x), r.eval(a, x));
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => l / r,
                    BinOp::Pow => l.powf(r),
                }
            }
            Expr::Call(f, e) => f.apply(e.eval(a, x)),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Param => f.write_str("a"),
            Expr::Moment => f.write_str("x"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, l, r) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({l} {s} {r})")
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                i += 1;
            }
            // exponent part, e.g. 1e-3
            if i + 1 < chars.len()
                && (chars[i].1 == 'e' || chars[i].1 == 'E')
                && (chars[i + 1].1.is_ascii_digit()
                    || (matches!(chars[i + 1].1, '+' | '-')
                        && i + 2 < chars.len()
                        && chars[i + 2].1.is_ascii_digit()))
            {
                i += 2;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
            }
            let text: String = chars[start..i].iter().map(|(_, c)| c).collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number `{text}` at {pos}")))?;
            out.push((pos, Tok::Num(v)));
        } else if c.is_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].1.is_alphanumeric() {
                i += 1;
            }
            let text: String = chars[start..i].iter().map(|(_, c)| c).collect();
            out.push((pos, Tok::Ident(text)));
        } else {
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '+' | '*' | '/' | '^' => Tok::Op(c),
                '-' | '−' => Tok::Op('-'),
                '×' => Tok::Op('*'),
                '÷' => Tok::Op('/'),
                _ => return Err(Error::Parse(format!("unexpected `{c}` at {pos}"))),
            };
            out.push((pos, tok));
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn where_(&self) -> String {
        match self.toks.get(self.pos) {
            Some((p, _)) => format!("at {p}"),
            None => "at end of input".to_string(),
        }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { BinOp::Add } else { BinOp::Sub };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' { BinOp::Mul } else { BinOp::Div };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Op('+')) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let here = self.where_();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "a" => Ok(Expr::Param),
                "x" => Ok(Expr::Moment),
                "pi" | "π" => Ok(Expr::Num(std::f64::consts::PI)),
                "e" => Ok(Expr::Num(std::f64::consts::E)),
                other => {
                    let func = Func::from_name(other).ok_or_else(|| {
                        Error::Parse(format!("unknown identifier `{other}` {here}"))
                    })?;
                    if self.bump() != Some(Tok::LParen) {
                        return Err(Error::Parse(format!("expected `(` after `{other}` {here}")));
                    }
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    Ok(Expr::Call(func, Box::new(arg)))
                }
            },
            Some(t) => Err(Error::Parse(format!("unexpected {t:?} {here}"))),
            None => Err(Error::Parse("unexpected end of expression".into())),
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        let here = self.where_();
        match self.bump() {
            Some(Tok::RParen) => Ok(()),
            _ => Err(Error::Parse(format!("expected `)` {here}"))),
        }
    }
}

impl FromStr for Expr {
    type Err = Error;

    fn from_str(src: &str) -> Result<Expr> {
        let toks = tokenize(src)?;
        let mut p = Parser { toks, pos: 0 };
        let e = p.expr()?;
        if p.pos < p.toks.len() {
            return Err(Error::Parse(format!("trailing input {}", p.where_())));
        }
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ev(s: &str, a: f64, x: f64) -> f64 {
        s.parse::<Expr>().unwrap().eval(a, x)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1 + 2 * 3", 0.0, 0.0), 7.0);
        assert_eq!(ev("2 ^ 3 ^ 2", 0.0, 0.0), 512.0);
        assert_eq!(ev("-2 ^ 2", 0.0, 0.0), -4.0);
        assert_eq!(ev("8 / 4 / 2", 0.0, 0.0), 1.0);
        assert_eq!(ev("10 − 4 − 3", 0.0, 0.0), 3.0);
        assert_eq!(ev("3 × 4 ÷ 6", 0.0, 0.0), 2.0);
    }

    #[test]
    fn variables_constants_functions() {
        assert_eq!(ev("a*x", 0.5, 2.0), 1.0);
        assert!((ev("sin(pi*x)", 0.0, 0.5) - 1.0).abs() < 1e-15);
        assert_eq!(ev("ln(e)", 0.0, 0.0), 1.0);
        assert_eq!(ev("abs(-3) + sqrt(4)", 0.0, 0.0), 5.0);
        assert_eq!(ev("exp(0) + cos(0)", 0.0, 0.0), 2.0);
        assert_eq!(ev("1e-3 * 1000", 0.0, 0.0), 1.0);
        assert!((ev("(sin(a*ln(1/(2*a*x))/x)+1)/2", 0.5, 0.25)
            - (((0.5f64 * (1.0f64 / 0.25).ln() / 0.25).sin() + 1.0) / 2.0))
            .abs()
            < 1e-15);
        assert!((ev("π", 0.0, 0.0) - PI).abs() == 0.0);
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "1 +", "sin x", "foo(1)", "(1", "1 2", "2x", "$"] {
            assert!(bad.parse::<Expr>().is_err(), "accepted `{bad}`");
        }
    }

    #[test]
    fn display_reparses() {
        let e: Expr = "-(a + 1) * sin(x) ^ 2 / 3".parse().unwrap();
        let again: Expr = e.to_string().parse().unwrap();
        for &(a, x) in &[(0.3, 1.7), (-2.0, 0.1)] {
            assert_eq!(e.eval(a, x), again.eval(a, x));
        }
    }
}
