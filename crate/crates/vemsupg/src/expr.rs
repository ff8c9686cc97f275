//! Closed-form coefficient expressions in `x` and `y`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr  = term (('+' | '-') term)*
//! term  = unary (('*' | '/') unary)*
//! unary = '-' unary | power
//! power = atom ('^' unary)?          right associative
//! atom  = number | 'x' | 'y' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func  = 'sin' | 'cos' | 'exp'
//! ```

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Y,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
    /// Natural logarithm; only produced by differentiation of `a^b`.
    Ln(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("column {column}: {message}")]
pub struct ExprError {
    /// 1-based character position.
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

fn num(v: f64) -> Expr {
    Expr::Num(v)
}

fn as_num(e: &Expr) -> Option<f64> {
    match e {
        Expr::Num(v) => Some(*v),
        _ => None,
    }
}

// Constructors with constant folding, so derivatives stay small.
fn add(a: Expr, b: Expr) -> Expr {
    match (as_num(&a), as_num(&b)) {
        (Some(x), Some(y)) => num(x + y),
        (Some(z), _) if z == 0.0 => b,
        (_, Some(z)) if z == 0.0 => a,
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (as_num(&a), as_num(&b)) {
        (Some(x), Some(y)) => num(x - y),
        (Some(z), _) if z == 0.0 => neg(b),
        (_, Some(z)) if z == 0.0 => a,
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (as_num(&a), as_num(&b)) {
        (Some(x), Some(y)) => num(x * y),
        (Some(z), _) | (_, Some(z)) if z == 0.0 => num(0.0),
        (Some(o), _) if o == 1.0 => b,
        (_, Some(o)) if o == 1.0 => a,
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (as_num(&a), as_num(&b)) {
        (Some(z), _) if z == 0.0 => num(0.0),
        (_, Some(o)) if o == 1.0 => a,
        _ => Expr::Div(Box::new(a), Box::new(b)),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(v) => num(-v),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match as_num(&b) {
        Some(z) if z == 0.0 => num(1.0),
        Some(o) if o == 1.0 => a,
        _ => Expr::Pow(Box::new(a), Box::new(b)),
    }
}

impl Expr {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Self::Num(v) => *v,
            Self::X => x,
            Self::Y => y,
            Self::Neg(a) => -a.eval(x, y),
            Self::Add(a, b) => a.eval(x, y) + b.eval(x, y),
            Self::Sub(a, b) => a.eval(x, y) - b.eval(x, y),
            Self::Mul(a, b) => a.eval(x, y) * b.eval(x, y),
            Self::Div(a, b) => a.eval(x, y) / b.eval(x, y),
            Self::Pow(a, b) => {
                let (base, e) = (a.eval(x, y), b.eval(x, y));
                if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 {
                    base.powi(e as i32)
                } else {
                    base.powf(e)
                }
            }
            Self::Sin(a) => a.eval(x, y).sin(),
            Self::Cos(a) => a.eval(x, y).cos(),
            Self::Exp(a) => a.eval(x, y).exp(),
            Self::Ln(a) => a.eval(x, y).ln(),
        }
    }

    /// `true` when the expression does not involve `x` or `y`.
    pub fn is_constant(&self) -> bool {
        match self {
            Self::Num(_) => true,
            Self::X | Self::Y => false,
            Self::Neg(a) | Self::Sin(a) | Self::Cos(a) | Self::Exp(a) | Self::Ln(a) => a.is_constant(),
            Self::Add(a, b) | Self::Sub(a, b) | Self::Mul(a, b) | Self::Div(a, b) | Self::Pow(a, b) => {
                a.is_constant() && b.is_constant()
            }
        }
    }

    /// Symbolic partial derivative.
    pub fn diff(&self, v: Var) -> Expr {
        let d = |e: &Expr| e.diff(v);
        match self {
            Self::Num(_) => num(0.0),
            Self::X => num(if v == Var::X { 1.0 } else { 0.0 }),
            Self::Y => num(if v == Var::Y { 1.0 } else { 0.0 }),
            Self::Neg(a) => neg(d(a)),
            Self::Add(a, b) => add(d(a), d(b)),
            Self::Sub(a, b) => sub(d(a), d(b)),
            Self::Mul(a, b) => add(mul(d(a), (**b).clone()), mul((**a).clone(), d(b))),
            Self::Div(a, b) => div(
                sub(mul(d(a), (**b).clone()), mul((**a).clone(), d(b))),
                pow((**b).clone(), num(2.0)),
            ),
            Self::Pow(a, b) if b.is_constant() => {
                let e = (**b).clone();
                let lowered = pow((**a).clone(), sub(e.clone(), num(1.0)));
                mul(mul(e, lowered), d(a))
            }
            Self::Pow(a, b) => {
                // a^b (b' ln a + b a' / a)
                let inner = add(
                    mul(d(b), Expr::Ln(a.clone())),
                    div(mul((**b).clone(), d(a)), (**a).clone()),
                );
                mul(self.clone(), inner)
            }
            Self::Sin(a) => mul(Expr::Cos(a.clone()), d(a)),
            Self::Cos(a) => neg(mul(Expr::Sin(a.clone()), d(a))),
            Self::Exp(a) => mul(self.clone(), d(a)),
            Self::Ln(a) => div(d(a), (**a).clone()),
        }
    }

    pub fn gradient(&self) -> [Expr; 2] {
        [self.diff(Var::X), self.diff(Var::Y)]
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Num(v) if *v < 0.0 => write!(f, "({v})"),
            Self::Num(v) => write!(f, "{v}"),
            Self::X => f.write_str("x"),
            Self::Y => f.write_str("y"),
            Self::Neg(a) => write!(f, "(-{a})"),
            Self::Add(a, b) => write!(f, "({a} + {b})"),
            Self::Sub(a, b) => write!(f, "({a} - {b})"),
            Self::Mul(a, b) => write!(f, "({a} * {b})"),
            Self::Div(a, b) => write!(f, "({a} / {b})"),
            Self::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Self::Sin(a) => write!(f, "sin({a})"),
            Self::Cos(a) => write!(f, "cos({a})"),
            Self::Exp(a) => write!(f, "exp({a})"),
            Self::Ln(a) => write!(f, "ln({a})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent part, e.g. 1e-7
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
            let v = text.parse::<f64>().map_err(|_| ExprError {
                column: col,
                message: format!("invalid number {text:?}"),
            })?;
            out.push((col, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((col, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((col, Tok::Op(c)));
            i += 1;
        } else {
            return Err(ExprError {
                column: col,
                message: format!("unexpected character {c:?}"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn err(&self, message: impl Into<String>) -> ExprError {
        ExprError {
            column: self.column(),
            message: message.into(),
        }
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut e = self.term()?;
        loop {
            if self.eat('+') {
                e = Expr::Add(Box::new(e), Box::new(self.term()?));
            } else if self.eat('-') {
                e = Expr::Sub(Box::new(e), Box::new(self.term()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut e = self.unary()?;
        loop {
            if self.eat('*') {
                e = Expr::Mul(Box::new(e), Box::new(self.unary()?));
            } else if self.eat('/') {
                e = Expr::Div(Box::new(e), Box::new(self.unary()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat('^') {
            return Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "x" => Ok(Expr::X),
                    "y" => Ok(Expr::Y),
                    "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                    "sin" | "cos" | "exp" => {
                        if !self.eat('(') {
                            return Err(self.err(format!("expected '(' after {name}")));
                        }
                        let arg = Box::new(self.expr()?);
                        if !self.eat(')') {
                            return Err(self.err("expected ')'"));
                        }
                        Ok(match name.as_str() {
                            "sin" => Expr::Sin(arg),
                            "cos" => Expr::Cos(arg),
                            _ => Expr::Exp(arg),
                        })
                    }
                    _ => {
                        self.pos -= 1;
                        Err(self.err(format!("unknown identifier {name:?}")))
                    }
                }
            }
            Some(Tok::Op(c)) => Err(self.err(format!("unexpected {c:?}"))),
            None => Err(self.err("unexpected end of expression")),
        }
    }
}

impl FromStr for Expr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let toks = tokenize(s)?;
        let mut p = Parser {
            toks,
            pos: 0,
            end: s.chars().count() + 1,
        };
        let e = p.expr()?;
        if p.pos < p.toks.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, x: f64, y: f64) -> f64 {
        s.parse::<Expr>().unwrap().eval(x, y)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1 + 2 * 3", 0.0, 0.0), 7.0);
        assert_eq!(ev("(1 + 2) * 3", 0.0, 0.0), 9.0);
        assert_eq!(ev("2 ^ 3 ^ 2", 0.0, 0.0), 512.0);
        assert_eq!(ev("-2 ^ 2", 0.0, 0.0), -4.0);
        assert_eq!(ev("8 / 4 / 2", 0.0, 0.0), 1.0);
        assert_eq!(ev("1 - 2 - 3", 0.0, 0.0), -4.0);
        assert_eq!(ev("2 * x ^ 2 + y", 3.0, 1.0), 19.0);
        assert_eq!(ev("1e-7 * (1 + x^2)", 1.0, 0.0), 2e-7);
        assert_eq!(ev("2.5E+1", 0.0, 0.0), 25.0);
    }

    #[test]
    fn functions() {
        let (x, y) = (0.3, 0.7);
        let v = ev("sin(2*pi*x)*sin(2*pi*y) + x^5 + y^5 + 1", x, y);
        let pi = std::f64::consts::PI;
        let r = (2.0 * pi * x).sin() * (2.0 * pi * y).sin() + x.powi(5) + y.powi(5) + 1.0;
        assert!((v - r).abs() < 1e-15);
        assert!((ev("exp(x + y)", x, y) - (x + y).exp()).abs() < 1e-15);
        assert!((ev("cos(2*pi*x)", x, y) - (2.0 * pi * x).cos()).abs() < 1e-15);
    }

    #[test]
    fn errors_report_columns() {
        let e = "1 + * 2".parse::<Expr>().unwrap_err();
        assert_eq!(e.column, 5);
        let e = "sin x".parse::<Expr>().unwrap_err();
        assert_eq!(e.column, 5);
        let e = "z + 1".parse::<Expr>().unwrap_err();
        assert_eq!(e.column, 1);
        assert!(e.message.contains("\"z\""));
        let e = "(1 + 2".parse::<Expr>().unwrap_err();
        assert_eq!(e.column, 7);
        assert!("1 $ 2".parse::<Expr>().is_err());
        assert!("".parse::<Expr>().is_err());
        assert!("1 2".parse::<Expr>().is_err());
        assert!("ln(x)".parse::<Expr>().is_err());
    }

    fn fd(e: &Expr, v: Var, x: f64, y: f64) -> f64 {
        let h = 1e-5;
        match v {
            Var::X => (e.eval(x + h, y) - e.eval(x - h, y)) / (2.0 * h),
            Var::Y => (e.eval(x, y + h) - e.eval(x, y - h)) / (2.0 * h),
        }
    }

    #[test]
    fn derivatives_match_differences() {
        let cases = [
            "sin(2*pi*x)*sin(2*pi*y) + x^5 + y^5 + 1",
            "exp(x + y) / (1 + x*y)",
            "x ^ y + cos(x*y)",
            "-(x - 2*y) ^ 3 / 7",
            "(1 + x^2) ^ 0.5",
        ];
        for s in cases {
            let e: Expr = s.parse().unwrap();
            for &(x, y) in &[(0.3, 0.6), (0.8, 0.15), (0.5, 0.5)] {
                for v in [Var::X, Var::Y] {
                    let exact = e.diff(v).eval(x, y);
                    let approx = fd(&e, v, x, y);
                    assert!((exact - approx).abs() < 1e-7 * (1.0 + exact.abs()), "{s} {v:?} {exact} {approx}");
                }
            }
        }
    }

    #[test]
    fn folding_keeps_constants_small() {
        let e: Expr = "3 * x + 2".parse().unwrap();
        assert_eq!(e.diff(Var::X), Expr::Num(3.0));
        assert_eq!(e.diff(Var::Y), Expr::Num(0.0));
        assert!("2 * pi".parse::<Expr>().unwrap().is_constant());
        let shown = e.to_string();
        assert_eq!(shown.parse::<Expr>().unwrap().eval(1.5, 0.0), 6.5);
    }
}
