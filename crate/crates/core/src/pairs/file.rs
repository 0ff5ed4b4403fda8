//! Plain-text exponent-pair lists: one `q, r, s` triple per line, commas or
//! whitespace between fields, `#` comments, an optional `q,r,s` header.

use num_traits::One;

use super::ExponentPair;
use crate::error::{Error, Result};
use crate::rational::{parse_rational, Exponent, Q};

pub fn parse_pairs_file(text: &str) -> Result<Vec<ExponentPair>> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split_once('#').map_or(raw, |(b, _)| b).trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split(|c: char| c == ',' || c.is_whitespace()).filter(|f| !f.is_empty()).collect();
        if pairs.is_empty() && fields.iter().map(|f| f.to_ascii_lowercase()).eq(["q", "r", "s"]) {
            continue;
        }
        if fields.len() != 3 {
            return Err(Error::Config { line, msg: format!("expected 3 fields q, r, s (got {})", fields.len()) });
        }
        let at = |e: Error| Error::Config { line, msg: e.to_string() };
        let q: Exponent = fields[0].parse().map_err(at)?;
        let r = parse_rational(fields[1]).map_err(at)?;
        let s = parse_rational(fields[2]).map_err(at)?;
        if !q.is_positive() {
            return Err(Error::Config { line, msg: format!("q must be positive (got {q})") });
        }
        if r < Q::one() {
            return Err(Error::Config { line, msg: format!("r must be >= 1 (got {r})") });
        }
        pairs.push(ExponentPair::new(q, r, s));
    }
    if pairs.is_empty() {
        return Err(Error::Config { line: text.lines().count().max(1), msg: "no pairs found".into() });
    }
    Ok(pairs)
}
