//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | "+" unary | power
//! power   := atom ("^" integer)?
//! atom    := number | identifier | "(" expr ")"
//! number  := digit+ ("." digit+)?
//! ```
//!
//! Identifiers must be coordinates or constants of the chart. Exponents are
//! non-negative integer literals bounded by [`MAX_EXPONENT`](super::MAX_EXPONENT).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::pow;

use super::{Chart, ExprError, RationalFunction, MAX_EXPONENT};

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => Token::Plus,
            b'-' => Token::Minus,
            b'*' => Token::Star,
            b'/' => Token::Slash,
            b'^' => Token::Caret,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let int_part = &text[start..i];
                let mut value = BigRational::from_integer(int_part.parse::<BigInt>().unwrap());
                if i < bytes.len() && bytes[i] == b'.' {
                    let frac_start = i + 1;
                    let mut j = frac_start;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    if j == frac_start {
                        return Err(ExprError::Syntax {
                            pos: i,
                            message: "expected digits after decimal point".into(),
                        });
                    }
                    let frac: BigInt = text[frac_start..j].parse().unwrap();
                    let scale = pow(BigInt::from(10), j - frac_start);
                    value += BigRational::new(frac, scale);
                    i = j;
                }
                out.push((start, Token::Number(value)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Token::Ident(text[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ExprError::Syntax {
                    pos: i,
                    message: format!("unexpected character '{ch}'"),
                });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
    chart: &'a Chart,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<(usize, Token)> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<RationalFunction, ExprError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    acc = acc.checked_add(&self.term()?)?;
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    acc = acc.checked_add(&-self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction, ExprError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    acc = acc.checked_mul(&self.unary()?)?;
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    let at = self.offset();
                    let rhs = self.unary()?;
                    if rhs.is_zero() {
                        return Err(ExprError::DivisionByZero { pos: Some(at) });
                    }
                    acc = acc.checked_div(&rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction, ExprError> {
        match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Token::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RationalFunction, ExprError> {
        let base = self.atom()?;
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let at = self.offset();
        match self.next() {
            Some((_, Token::Number(n))) if n.is_integer() => {
                let e = n.to_integer();
                if e > BigInt::from(MAX_EXPONENT) {
                    return Err(ExprError::ExponentOverflow {
                        exponent: u64::try_from(&e).unwrap_or(u64::MAX),
                    });
                }
                let e = u32::try_from(&e).expect("bounded exponent");
                base.checked_pow(e)
            }
            _ => Err(ExprError::Syntax {
                pos: at,
                message: "exponent must be a non-negative integer literal".into(),
            }),
        }
    }

    fn atom(&mut self) -> Result<RationalFunction, ExprError> {
        let at = self.offset();
        match self.next() {
            Some((_, Token::Number(n))) => Ok(RationalFunction::constant(n)),
            Some((_, Token::Ident(name))) => match self.chart.index_of(&name) {
                Some(i) => Ok(RationalFunction::var(i)),
                None => Err(ExprError::UnknownIdentifier { name, pos: at }),
            },
            Some((_, Token::LParen)) => {
                let inner = self.expr()?;
                match self.next() {
                    Some((_, Token::RParen)) => Ok(inner),
                    _ => Err(ExprError::Syntax { pos: self.offset().min(self.end), message: "expected ')'".into() }),
                }
            }
            Some((_, tok)) => Err(ExprError::Syntax {
                pos: at,
                message: format!("unexpected token {tok:?}"),
            }),
            None => Err(ExprError::Syntax { pos: at, message: "unexpected end of input".into() }),
        }
    }
}

/// Parses `text` into an exact rational function over `chart`.
pub fn parse_expression(text: &str, chart: &Chart) -> Result<RationalFunction, ExprError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0, end: text.len(), chart };
    let value = p.expr()?;
    if p.pos < p.tokens.len() {
        return Err(ExprError::Syntax {
            pos: p.offset(),
            message: "unexpected trailing input".into(),
        });
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn chart() -> Chart {
        Chart::with_constants(&["q1", "p1"], &["omega"]).unwrap()
    }

    #[test]
    fn sum_of_squares() {
        let c = chart();
        let f = parse_expression("p1^2 + q1^2", &c).unwrap();
        assert!(f.is_polynomial());
        assert_eq!(f.numerator().len(), 2);
        assert!(f.numerator().terms().all(|(_, v)| v.is_one()));
    }

    #[test]
    fn rational_coefficient_pattern() {
        let c = chart();
        let f = parse_expression("q1/(p1^2+q1^2)", &c).unwrap();
        assert_eq!(f.numerator(), &parse_expression("q1", &c).unwrap().numerator().clone());
        assert_eq!(&f.denominator(), parse_expression("p1^2+q1^2", &c).unwrap().numerator());
    }

    #[test]
    fn zero_denominator() {
        let c = chart();
        assert!(matches!(
            parse_expression("1/0", &c),
            Err(ExprError::DivisionByZero { pos: Some(2) })
        ));
        assert!(matches!(
            parse_expression("q1/(p1 - p1)", &c),
            Err(ExprError::DivisionByZero { .. })
        ));
    }

    #[test]
    fn errors_carry_positions() {
        let c = chart();
        assert!(matches!(
            parse_expression("q1 + x", &c),
            Err(ExprError::UnknownIdentifier { pos: 5, .. })
        ));
        assert!(matches!(parse_expression("q1 + ", &c), Err(ExprError::Syntax { pos: 5, .. })));
        assert!(matches!(parse_expression("q1 $ 2", &c), Err(ExprError::Syntax { pos: 3, .. })));
        assert!(matches!(parse_expression("q1^p1", &c), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expression("q1^1.5", &c), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expression("(q1", &c), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expression("q1^70000", &c), Err(ExprError::ExponentOverflow { .. })));
    }

    #[test]
    fn decimals_are_exact() {
        let c = chart();
        let f = parse_expression("0.25*q1", &c).unwrap();
        let g = parse_expression("q1/4", &c).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let c = chart();
        let f = parse_expression("-q1^2", &c).unwrap();
        let g = parse_expression("0 - (q1*q1)", &c).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn constants_are_variables() {
        let c = chart();
        let f = parse_expression("1/2*omega*(p1^2 + q1^2)", &c).unwrap();
        assert_eq!(f.display(&c), "1/2*q1^2*omega + 1/2*p1^2*omega");
    }
}
