//! Text grammar for polynomial inputs.
//!
//! ```text
//! bilinear a=<v> b=<v> c=<v> d=<v>
//! pencil b0=<v> broots=<v,...> a0=<v> aroots=<v,...>
//! lead=<v> roots=<v,...>            (one-variable, for pfrac and numerators)
//! ```
//!
//! Values are decimals or exact rationals `p/q`. A document starting with `{`
//! is read as JSON instead.

use std::collections::BTreeMap;
use std::fmt;

use momenta_core::poly::{BilinearPoly, FactoredPoly, PencilPoly, TwoVarPoly};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

struct Token<'a> {
    text: &'a str,
    offset: usize,
}

fn position(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(offset, |nl| offset - nl - 1) + 1;
    (line, column)
}

fn error_at(src: &str, offset: usize, message: impl Into<String>) -> ParseError {
    let (line, column) = position(src, offset);
    ParseError { line, column, message: message.into() }
}

fn tokens(src: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in src.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token { text: &src[s..i], offset: s });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &src[s..], offset: s });
    }
    out
}

/// One literal, decimal or `p/q`.
pub fn parse_number(src: &str, text: &str, offset: usize) -> Result<f64, ParseError> {
    if text.is_empty() {
        return Err(error_at(src, offset, "expected a number"));
    }
    if let Some((p, q)) = text.split_once('/') {
        let num: BigInt = p
            .parse()
            .map_err(|_| error_at(src, offset, format!("bad numerator {p:?}")))?;
        let den: BigInt = q
            .parse()
            .map_err(|_| error_at(src, offset + p.len() + 1, format!("bad denominator {q:?}")))?;
        if den == BigInt::from(0) {
            return Err(error_at(src, offset + p.len() + 1, "zero denominator"));
        }
        return BigRational::new(num, den)
            .to_f64()
            .filter(|v| v.is_finite())
            .ok_or_else(|| error_at(src, offset, format!("{text:?} is out of range")));
    }
    let ok_chars = text.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
    match text.parse::<f64>() {
        Ok(v) if ok_chars && v.is_finite() => Ok(v),
        _ => Err(error_at(src, offset, format!("bad number {text:?}"))),
    }
}

fn parse_list(src: &str, text: &str, offset: usize) -> Result<Vec<f64>, ParseError> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut at = offset;
    for item in text.split(',') {
        out.push(parse_number(src, item, at)?);
        at += item.len() + 1;
    }
    Ok(out)
}

/// `key=value` pairs after the form keyword, with the offset of each value.
fn key_values<'a>(
    src: &'a str,
    toks: &[Token<'a>],
    allowed: &[&str],
) -> Result<BTreeMap<&'a str, (&'a str, usize)>, ParseError> {
    let mut map = BTreeMap::new();
    for t in toks {
        let Some((key, value)) = t.text.split_once('=') else {
            return Err(error_at(src, t.offset, format!("expected key=value, found {:?}", t.text)));
        };
        if !allowed.contains(&key) {
            return Err(error_at(src, t.offset, format!("unknown key {key:?}; expected one of {}", allowed.join(", "))));
        }
        if map.insert(key, (value, t.offset + key.len() + 1)).is_some() {
            return Err(error_at(src, t.offset, format!("duplicate key {key:?}")));
        }
    }
    Ok(map)
}

fn require<'a>(
    src: &str,
    map: &BTreeMap<&str, (&'a str, usize)>,
    key: &str,
    end: usize,
) -> Result<(&'a str, usize), ParseError> {
    map.get(key).copied().ok_or_else(|| error_at(src, end, format!("missing key {key:?}")))
}

fn from_json<T: serde::de::DeserializeOwned>(src: &str) -> Result<T, ParseError> {
    serde_json::from_str(src).map_err(|e| ParseError { line: e.line(), column: e.column(), message: e.to_string() })
}

/// Bilinear or pencil polynomial.
pub fn parse_poly(src: &str) -> Result<TwoVarPoly, ParseError> {
    if src.trim_start().starts_with('{') {
        return from_json(src);
    }
    let toks = tokens(src);
    let Some((form, rest)) = toks.split_first() else {
        return Err(error_at(src, 0, "empty polynomial spec"));
    };
    let end = src.trim_end().len();
    let invalid = |e: momenta_core::Error| error_at(src, form.offset, e.to_string());
    match form.text {
        "bilinear" => {
            let map = key_values(src, rest, &["a", "b", "c", "d"])?;
            let mut v = [0.0; 4];
            for (slot, key) in v.iter_mut().zip(["a", "b", "c", "d"]) {
                let (text, at) = require(src, &map, key, end)?;
                *slot = parse_number(src, text, at)?;
            }
            Ok(TwoVarPoly::Bilinear(BilinearPoly::new(v[0], v[1], v[2], v[3]).map_err(invalid)?))
        }
        "pencil" => {
            let map = key_values(src, rest, &["b0", "broots", "a0", "aroots"])?;
            let num = |key| -> Result<f64, ParseError> {
                let (text, at) = require(src, &map, key, end)?;
                parse_number(src, text, at)
            };
            let list = |key| -> Result<Vec<f64>, ParseError> {
                let (text, at) = require(src, &map, key, end)?;
                parse_list(src, text, at)
            };
            let b = FactoredPoly::new(num("b0")?, list("broots")?).map_err(invalid)?;
            let a = FactoredPoly::new(num("a0")?, list("aroots")?).map_err(invalid)?;
            Ok(TwoVarPoly::Pencil(PencilPoly::new(b, a)))
        }
        other => Err(error_at(src, form.offset, format!("unknown form {other:?}; expected bilinear or pencil"))),
    }
}

/// One-variable polynomial `lead=<v> roots=<v,...>`.
pub fn parse_factored(src: &str) -> Result<FactoredPoly, ParseError> {
    if src.trim_start().starts_with('{') {
        return from_json(src);
    }
    let toks = tokens(src);
    let end = src.trim_end().len();
    let map = key_values(src, &toks, &["lead", "roots"])?;
    let (text, at) = require(src, &map, "lead", end)?;
    let lead = parse_number(src, text, at)?;
    let (text, at) = require(src, &map, "roots", end)?;
    let roots = parse_list(src, text, at)?;
    FactoredPoly::new(lead, roots).map_err(|e| error_at(src, 0, e.to_string()))
}

/// Comma-separated numbers, e.g. a list of Bessel arguments.
pub fn parse_numbers(src: &str) -> Result<Vec<f64>, ParseError> {
    let trimmed = src.trim();
    let offset = src.len() - src.trim_start().len();
    if trimmed.is_empty() {
        return Err(error_at(src, offset, "expected at least one number"));
    }
    parse_list(src, trimmed, offset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use momenta_core::poly::Bivariate;

    #[test]
    fn bilinear_and_pencil() {
        let p = parse_poly("bilinear a=1 b=0 c=1 d=1").unwrap();
        assert_eq!(p, TwoVarPoly::Bilinear(BilinearPoly::new(1.0, 0.0, 1.0, 1.0).unwrap()));
        let q = parse_poly("pencil b0=1 broots=1,4 a0=1 aroots=2,3").unwrap();
        assert_eq!(q.eval(1.0, 1.0), 2.0 * 5.0 + 3.0 * 4.0);
        // Key order is free and whitespace may span lines.
        let r = parse_poly("pencil a0=1 aroots=2,3\n  b0=1 broots=1,4").unwrap();
        assert_eq!(q, r);
        let c = parse_poly("pencil b0=2 broots= a0=1 aroots=").unwrap();
        assert_eq!(c.eval(5.0, 3.0), 5.0);
    }

    #[test]
    fn rationals_are_exact() {
        let p = parse_poly("bilinear a=1/3 b=-0/7 c=22/7 d=1e-3").unwrap();
        let TwoVarPoly::Bilinear(b) = p else { panic!() };
        assert_eq!(b.a(), 1.0 / 3.0);
        assert_eq!(b.c(), 22.0 / 7.0);
        assert_eq!(b.d(), 0.001);
        // 2^-1074 is only reachable through exact rounding of the quotient.
        let tiny = format!("1/{}", num_bigint::BigInt::from(2).pow(1074));
        assert_eq!(parse_numbers(&tiny).unwrap(), vec![f64::from_bits(1)]);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_poly("bilinear a=1 b=x c=1 d=1").unwrap_err();
        assert_eq!((e.line, e.column), (1, 16));
        let e = parse_poly("bilinear a=1 b=0 c=1").unwrap_err();
        assert!(e.message.contains("\"d\""), "{e}");
        let e = parse_poly("pencil b0=1 broots=1,,4 a0=1 aroots=2,3").unwrap_err();
        assert_eq!(e.column, 22);
        let e = parse_poly("bilinear a=1 b=0\nc=1 d=1 q=2").unwrap_err();
        assert_eq!((e.line, e.column), (2, 9));
        let e = parse_poly("trilinear a=1").unwrap_err();
        assert_eq!(e.column, 1);
        let e = parse_poly("bilinear a=-1 b=0 c=0 d=0").unwrap_err();
        assert!(e.message.contains("invalid polynomial"), "{e}");
        assert!(parse_poly("bilinear a=1 a=2 b=0 c=0 d=0").is_err());
        assert!(parse_poly("bilinear a=1 b=0 c=0 d=1/0").is_err());
        assert!(parse_poly("bilinear a=inf b=0 c=0 d=0").is_err());
        assert!(parse_poly("").is_err());
    }

    #[test]
    fn json_equivalent() {
        let p = parse_poly("bilinear a=1 b=1 c=2 d=3").unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(parse_poly(&json).unwrap(), p);
        let e = parse_poly("{\"form\": \"bilinear\",\n \"a\": }").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn factored() {
        let f = parse_factored("lead=2 roots=1,1/2").unwrap();
        assert_eq!(f.eval(0.0), 1.0);
        assert!(parse_factored("lead=1").is_err());
        assert_eq!(parse_numbers(" 0,1, 3").unwrap_err().column, 6);
        assert_eq!(parse_numbers("0,1,3").unwrap(), vec![0.0, 1.0, 3.0]);
    }
}
