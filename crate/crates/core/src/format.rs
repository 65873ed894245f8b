//! Plain-text QPBF format.
//!
//! ```text
//! qpbf <n> <num_pairs> <const>
//! u <id> <θ0> <θ1>
//! p <id_u> <id_v> <θ00> <θ01> <θ10> <θ11>
//! ```
//!
//! Ids are 0-based. Numbers are written with the shortest representation
//! that reads back to the same `f64`, so write-then-read is exact.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::qpbf::Qpbf;

pub fn write_qpbf<W: Write>(f: &Qpbf, mut out: W) -> Result<()> {
    writeln!(out, "qpbf {} {} {}", f.num_vars(), f.num_pairs(), f.constant())?;
    for u in 0..f.num_vars() {
        let [a, b] = f.unary(u);
        if a != 0.0 || b != 0.0 {
            writeln!(out, "u {u} {a} {b}")?;
        }
    }
    for ((u, v), [t00, t01, t10, t11]) in f.pairs() {
        writeln!(out, "p {u} {v} {t00} {t01} {t10} {t11}")?;
    }
    Ok(())
}

pub fn to_text(f: &Qpbf) -> String {
    let mut buf = Vec::new();
    write_qpbf(f, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("format output is ASCII")
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn numbers<'a, T: std::str::FromStr>(
    line: usize,
    tokens: impl Iterator<Item = &'a str>,
    expected: usize,
) -> Result<Vec<T>> {
    let vals = tokens
        .map(|t| t.parse::<T>().map_err(|_| parse_err(line, format!("bad number `{t}`"))))
        .collect::<Result<Vec<T>>>()?;
    if vals.len() != expected {
        return Err(parse_err(line, format!("expected {expected} fields, found {}", vals.len())));
    }
    Ok(vals)
}

pub fn read_qpbf<R: BufRead>(input: R) -> Result<Qpbf> {
    let mut f: Option<Qpbf> = None;
    let mut declared_pairs = 0usize;
    let mut seen_pairs = std::collections::BTreeSet::new();
    for (idx, line) in input.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let mut tokens = line.split_whitespace();
        let Some(tag) = tokens.next() else { continue };
        match (tag, f.as_mut()) {
            ("qpbf", None) => {
                let fields: Vec<&str> = tokens.collect();
                if fields.len() != 3 {
                    return Err(parse_err(lineno, "header needs n, num_pairs and const"));
                }
                let n: usize = fields[0].parse().map_err(|_| parse_err(lineno, "bad n"))?;
                declared_pairs = fields[1].parse().map_err(|_| parse_err(lineno, "bad num_pairs"))?;
                let c: f64 = fields[2].parse().map_err(|_| parse_err(lineno, "bad const"))?;
                let mut q = Qpbf::new(n);
                q.add_constant(c).map_err(|e| parse_err(lineno, e.to_string()))?;
                f = Some(q);
            }
            ("qpbf", Some(_)) => return Err(parse_err(lineno, "duplicate header")),
            (_, None) => return Err(parse_err(lineno, "missing `qpbf` header")),
            ("u", Some(q)) => {
                let mut it = tokens;
                let id: usize = it
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| parse_err(lineno, "bad unary id"))?;
                let t: Vec<f64> = numbers(lineno, it, 2)?;
                q.add_unary(id, [t[0], t[1]]).map_err(|e| parse_err(lineno, e.to_string()))?;
            }
            ("p", Some(q)) => {
                let mut it = tokens;
                let ids: Vec<usize> = numbers(lineno, it.by_ref().take(2), 2)?;
                let t: Vec<f64> = numbers(lineno, it, 4)?;
                q.add_pairwise(ids[0], ids[1], [t[0], t[1], t[2], t[3]])
                    .map_err(|e| parse_err(lineno, e.to_string()))?;
                seen_pairs.insert((ids[0].min(ids[1]), ids[0].max(ids[1])));
            }
            (other, Some(_)) => return Err(parse_err(lineno, format!("unknown record `{other}`"))),
        }
    }
    let f = f.ok_or_else(|| parse_err(0, "empty input"))?;
    if seen_pairs.len() != declared_pairs {
        return Err(parse_err(
            0,
            format!("header declares {declared_pairs} pairs, found {}", seen_pairs.len()),
        ));
    }
    Ok(f)
}

pub fn from_text(s: &str) -> Result<Qpbf> {
    read_qpbf(s.as_bytes())
}
