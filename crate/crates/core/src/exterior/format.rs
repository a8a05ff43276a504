//! Text and JSON encodings of forms.
//!
//! Text: `e123 + e145 - 2.5*e167`, 1-based single-digit indices (n <= 9).
//! JSON: `{"n": 7, "p": 3, "terms": [{"idx": [1,2,3], "c": 1.0}]}`.

use serde::{Deserialize, Serialize};

use super::AltForm;
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub idx: Vec<usize>,
    pub c: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AltFormJson {
    pub n: usize,
    pub p: usize,
    pub terms: Vec<TermJson>,
}

impl From<&AltForm> for AltFormJson {
    fn from(f: &AltForm) -> Self {
        AltFormJson {
            n: f.dim(),
            p: f.degree(),
            terms: f
                .terms()
                .map(|(idx, c)| TermJson {
                    idx: idx.iter().map(|i| i + 1).collect(),
                    c,
                })
                .collect(),
        }
    }
}

impl TryFrom<AltFormJson> for AltForm {
    type Error = Error;

    fn try_from(j: AltFormJson) -> Result<AltForm> {
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in j.terms {
            if t.idx.contains(&0) {
                return Err(Error::InvalidIndex(t.idx));
            }
            terms.push((t.idx.iter().map(|i| i - 1).collect(), t.c));
        }
        AltForm::from_terms(j.n, j.p, terms)
    }
}

impl AltForm {
    pub fn to_json(&self) -> AltFormJson {
        AltFormJson::from(self)
    }

    pub fn from_json_str(s: &str) -> Result<AltForm> {
        let j: AltFormJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        AltForm::try_from(j)
    }

    /// Parses the text literal format in ambient dimension `n`.
    pub fn parse(n: usize, s: &str) -> Result<AltForm> {
        parse_text(n, s)
    }
}

pub(super) fn to_text(f: &AltForm) -> String {
    if f.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (idx, c)) in f.terms().enumerate() {
        let (sign, mag) = if c < 0.0 { ("-", -c) } else { ("+", c) };
        if k == 0 {
            if sign == "-" {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        if mag != 1.0 {
            out.push_str(&format!("{mag}*"));
        }
        if idx.is_empty() {
            if mag == 1.0 {
                out.push('1');
            } else {
                out.pop();
            }
            continue;
        }
        out.push('e');
        if f.dim() <= 9 {
            for i in idx {
                out.push_str(&(i + 1).to_string());
            }
        } else {
            let parts: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
            out.push_str(&format!("[{}]", parts.join(",")));
        }
    }
    out
}

fn parse_text(n: usize, s: &str) -> Result<AltForm> {
    if n > 9 {
        return Err(Error::Parse("text literals support n <= 9; use JSON".into()));
    }
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty form literal".into()));
    }
    // split into signed terms
    let mut raw_terms: Vec<(f64, String)> = Vec::new();
    let mut sign = 1.0;
    let mut cur = String::new();
    let chars: Vec<char> = compact.chars().collect();
    for (k, &ch) in chars.iter().enumerate() {
        let exponent_sign =
            k > 0 && matches!(chars[k - 1], 'e' | 'E') && cur.starts_with(|c: char| c.is_ascii_digit() || c == '.');
        if (ch == '+' || ch == '-') && !exponent_sign {
            if !cur.is_empty() {
                raw_terms.push((sign, std::mem::take(&mut cur)));
            } else if k != 0 {
                return Err(Error::Parse(format!("dangling sign in {s:?}")));
            }
            sign = if ch == '-' { -1.0 } else { 1.0 };
            continue;
        }
        cur.push(ch);
    }
    if cur.is_empty() {
        return Err(Error::Parse(format!("trailing sign in {s:?}")));
    }
    raw_terms.push((sign, cur));

    let mut degree: Option<usize> = None;
    let mut terms = Vec::new();
    for (sign, t) in raw_terms {
        let (coef, basis) = match t.split_once('*') {
            Some((c, b)) => {
                let c: f64 = c.parse().map_err(|_| Error::Parse(format!("bad coefficient {c:?}")))?;
                (c, b.to_string())
            }
            None => (1.0, t.clone()),
        };
        let digits = basis
            .strip_prefix('e')
            .ok_or_else(|| Error::Parse(format!("term {t:?} must look like c*e123")))?;
        let mut idx = Vec::with_capacity(digits.len());
        for ch in digits.chars() {
            let d = ch
                .to_digit(10)
                .ok_or_else(|| Error::Parse(format!("bad index in {t:?}")))? as usize;
            if d == 0 || d > n {
                return Err(Error::InvalidIndex(
                    digits
                        .chars()
                        .filter_map(|c| c.to_digit(10))
                        .map(|d| d as usize)
                        .collect(),
                ));
            }
            idx.push(d - 1);
        }
        if !idx.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidIndex(idx.iter().map(|i| i + 1).collect()));
        }
        match degree {
            None => degree = Some(idx.len()),
            Some(p) if p != idx.len() => {
                return Err(Error::DegreeMismatch {
                    expected: p,
                    found: idx.len(),
                })
            }
            _ => {}
        }
        terms.push((idx, sign * coef));
    }
    AltForm::from_terms(n, degree.unwrap_or(0), terms)
}
