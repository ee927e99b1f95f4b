//! Line-oriented maxterm file:
//!
//! ```text
//! # gfcube maxterms field=31 n_pub=4 n_sec=6 seed=7
//! term=x1^4*x2 c0=3 c=1,0,5,0,0,2 evals=1234
//! ```
//!
//! Field elements use the coefficient syntax of the polynomial grammar
//! without parentheses.

use std::fmt::Write as _;

use thiserror::Error;

use super::MaxtermRecord;
use crate::field::{Field, FieldElement};
use crate::poly::{parse_element, Monomial};

const MAGIC: &str = "# gfcube maxterms";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RecordError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordFile {
    pub field: Field,
    pub n_pub: usize,
    pub n_sec: usize,
    pub seed: u64,
    pub records: Vec<MaxtermRecord>,
}

impl RecordFile {
    pub fn to_text(&self) -> String {
        let f = &self.field;
        let mut s = format!(
            "{MAGIC} field={} n_pub={} n_sec={} seed={}\n",
            f, self.n_pub, self.n_sec, self.seed
        );
        for r in &self.records {
            let c: Vec<String> = r.c.iter().map(|&x| f.format_element(x)).collect();
            writeln!(
                s,
                "term={} c0={} c={} evals={}",
                r.term.to_text(),
                f.format_element(r.c0),
                c.join(","),
                r.evaluations
            )
            .expect("writing to a String");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, RecordError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let err = |line: usize, message: String| RecordError::Syntax {
            line: line + 1,
            message,
        };
        let (hl, header) = lines.next().ok_or_else(|| err(0, "empty file".into()))?;
        let rest = header
            .strip_prefix(MAGIC)
            .ok_or_else(|| err(hl, "missing maxterm header".into()))?;
        let kv = pairs(rest).map_err(|m| err(hl, m))?;
        let get = |k: &str| kv.iter().find(|(key, _)| key == k).map(|(_, v)| v.as_str());
        let need = |k: &str| get(k).ok_or_else(|| err(hl, format!("header lacks `{k}`")));
        let field: Field = need("field")?
            .parse()
            .map_err(|e| err(hl, format!("{e}")))?;
        let num = |k: &str| -> Result<u64, RecordError> {
            need(k)?
                .parse::<u64>()
                .map_err(|_| err(hl, format!("`{k}` is not a number")))
        };
        let n_pub = num("n_pub")? as usize;
        let n_sec = num("n_sec")? as usize;
        let seed = num("seed")?;
        let mut records = Vec::new();
        for (ln, line) in lines {
            if line.trim_start().starts_with('#') {
                continue;
            }
            let kv = pairs(line).map_err(|m| err(ln, m))?;
            let get = |k: &str| {
                kv.iter()
                    .find(|(key, _)| key == k)
                    .map(|(_, v)| v.as_str())
                    .ok_or_else(|| err(ln, format!("missing `{k}`")))
            };
            let element = |s: &str| -> Result<FieldElement, RecordError> {
                parse_element(&field, &format!("({s})")).map_err(|e| err(ln, e.to_string()))
            };
            let term = parse_term(&field, n_pub, get("term")?).map_err(|m| err(ln, m))?;
            let c0 = element(get("c0")?)?;
            let c_text = get("c")?;
            let c = if c_text.is_empty() {
                Vec::new()
            } else {
                c_text
                    .split(',')
                    .map(element)
                    .collect::<Result<Vec<_>, _>>()?
            };
            if c.len() != n_sec {
                return Err(err(
                    ln,
                    format!("{} coefficients, expected {n_sec}", c.len()),
                ));
            }
            let evaluations = get("evals")?
                .parse()
                .map_err(|_| err(ln, "`evals` is not a number".into()))?;
            records.push(MaxtermRecord {
                term,
                c0,
                c,
                evaluations,
            });
        }
        Ok(RecordFile {
            field,
            n_pub,
            n_sec,
            seed,
            records,
        })
    }
}

fn pairs(text: &str) -> Result<Vec<(String, String)>, String> {
    text.split_whitespace()
        .map(|tok| {
            tok.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| format!("expected key=value, found `{tok}`"))
        })
        .collect()
}

fn parse_term(field: &Field, n_pub: usize, text: &str) -> Result<Monomial, String> {
    Monomial::parse(field, n_pub, text).map_err(|e| e.to_string())
}
