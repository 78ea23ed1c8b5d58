//! Text formats for graphs and the embedded fixture bundle.
//!
//! Two conventions share one grammar:
//!
//! ```text
//! n=8; 3: {1,3},{2,6},{4,8},{5,12},{7,9},{10,14},{11,16},{13,15}
//! n=2; 1: {0,1},{2,3}; 2: {0,3},{1,2}; 3: {0,2},{1,3}
//! ```
//!
//! The first line is the *table* convention: colors 1 and 2 are implicit
//! (`E1 = {1,2},{3,4},...`, `E2 = {2,3},...,{2n,1}`) and only color 3 is
//! listed, with 1-based labels. The second is the *explicit* convention: all
//! three colors, 0-based labels. In memory every graph is 0-based.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::graph::{Color, ColoredGraph, MAX_N};
use crate::table::survey_fixed_colors;

/// The 41 sixteen-vertex graphs with `max_M F(M, G) = 12`, one per line in
/// the table convention.
pub const FIXTURE_BUNDLE: &str = include_str!("../fixtures/violators_n8.txt");

/// SHA-256 of [`FIXTURE_BUNDLE`].
pub const FIXTURE_SHA256: &str = "72cd4408c66fe960a46dc502ece4ab747cce69cf9ab6b552beadda72baab9fe8";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// Colors 1/2 implicit, color 3 listed, 1-based.
    Table3,
    /// All colors listed, 0-based.
    Explicit,
}

impl Convention {
    fn base(self) -> usize {
        match self {
            Convention::Table3 => 1,
            Convention::Explicit => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("colors 1 and 2 are not the fixed path/cycle matchings; use the explicit convention")]
    ConventionMismatch,
}

/// A parsed record before it is turned into a graph; edges exactly as
/// written (labels in the record's own base).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphRecord {
    pub n: usize,
    pub convention: Convention,
    pub edges: Vec<(Color, Vec<(usize, usize)>)>,
}

impl GraphRecord {
    pub fn to_graph(&self) -> ColoredGraph {
        let base = self.convention.base();
        let mut partner: [Option<Vec<u8>>; 3] = [None, None, None];
        if self.convention == Convention::Table3 {
            let (e1, e2) = survey_fixed_colors(self.n);
            partner[0] = Some(e1);
            partner[1] = Some(e2);
        }
        for (c, list) in &self.edges {
            let mut p = vec![0u8; 2 * self.n];
            for &(a, b) in list {
                p[a - base] = (b - base) as u8;
                p[b - base] = (a - base) as u8;
            }
            partner[c.index()] = Some(p);
        }
        let partner = partner.map(|p| p.expect("parser checked every color is present"));
        ColoredGraph::from_partners(partner).expect("parser checked the matchings")
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, at: usize, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: at + 1, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, ch: u8) -> Result<(), ParseError> {
        match self.peek() {
            Some(c) if c == ch => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(self.err(self.pos, format!("expected '{}', found '{}'", ch as char, c as char))),
            None => Err(self.err(self.pos, format!("expected '{}', found end of line", ch as char))),
        }
    }

    fn number(&mut self) -> Result<(usize, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err(start, "expected a number"));
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        text.parse().map(|v| (v, start)).map_err(|_| self.err(start, "number too large"))
    }
}

fn parse_line(text: &str, line: usize, convention: Convention) -> Result<GraphRecord, ParseError> {
    let mut cur = Cursor { bytes: text.as_bytes(), pos: 0, line };
    cur.expect(b'n')?;
    cur.expect(b'=')?;
    let (n, at) = cur.number()?;
    if n == 0 || n > MAX_N {
        return Err(cur.err(at, format!("n must be between 1 and {MAX_N}")));
    }
    let base = convention.base();
    let (lo, hi) = (base, 2 * n - 1 + base);
    let mut edges: Vec<(Color, Vec<(usize, usize)>)> = Vec::new();
    while cur.peek().is_some() {
        cur.expect(b';')?;
        if cur.peek().is_none() {
            break;
        }
        let (c, at) = cur.number()?;
        let color = match (convention, c) {
            (Convention::Table3, 3) => Color::Three,
            (Convention::Table3, _) => {
                return Err(cur.err(at, "the table convention lists only color 3"));
            }
            (Convention::Explicit, 1..=3) => Color::try_from(c as u8).unwrap(),
            (Convention::Explicit, _) => return Err(cur.err(at, format!("unknown color {c}"))),
        };
        if edges.iter().any(|(k, _)| *k == color) {
            return Err(cur.err(at, format!("color {color} listed twice")));
        }
        cur.expect(b':')?;
        let mut seen = vec![false; 2 * n];
        let mut list = Vec::new();
        loop {
            let pair_at = {
                cur.skip_ws();
                cur.pos
            };
            cur.expect(b'{')?;
            let (a, at_a) = cur.number()?;
            cur.expect(b',')?;
            let (b, at_b) = cur.number()?;
            cur.expect(b'}')?;
            for (v, at) in [(a, at_a), (b, at_b)] {
                if v < lo || v > hi {
                    return Err(cur.err(at, format!("color {color}: label {v} out of range {lo}..={hi}")));
                }
            }
            if a == b {
                return Err(cur.err(pair_at, format!("color {color}: loop at vertex {a}")));
            }
            for v in [a, b] {
                if std::mem::replace(&mut seen[v - base], true) {
                    return Err(cur.err(pair_at, format!("color {color}: vertex {v} matched twice")));
                }
            }
            list.push((a, b));
            if cur.peek() == Some(b',') {
                cur.pos += 1;
            } else {
                break;
            }
        }
        if let Some(v) = seen.iter().position(|&s| !s) {
            return Err(cur.err(cur.pos, format!("color {color}: vertex {} is not matched", v + base)));
        }
        edges.push((color, list));
    }
    let needed: &[Color] = match convention {
        Convention::Table3 => &[Color::Three],
        Convention::Explicit => &Color::ALL,
    };
    for c in needed {
        if !edges.iter().any(|(k, _)| k == c) {
            return Err(cur.err(cur.pos, format!("color {c} is missing")));
        }
    }
    Ok(GraphRecord { n, convention, edges })
}

fn record_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let body = l.split('#').next().unwrap_or("");
        (!body.trim().is_empty()).then_some((i + 1, body))
    })
}

/// Parses text holding exactly one record.
pub fn parse_record(text: &str, convention: Convention) -> Result<GraphRecord, ParseError> {
    let mut lines = record_lines(text);
    let (line, body) = lines
        .next()
        .ok_or(ParseError { line: 1, column: 1, message: "no graph record found".into() })?;
    let rec = parse_line(body, line, convention)?;
    if let Some((line, _)) = lines.next() {
        return Err(ParseError { line, column: 1, message: "expected a single graph record".into() });
    }
    Ok(rec)
}

pub fn parse_graph(text: &str, convention: Convention) -> Result<ColoredGraph, ParseError> {
    parse_record(text, convention).map(|r| r.to_graph())
}

/// Guesses the convention: a record with a color-1 section is explicit.
pub fn detect_convention(text: &str) -> Convention {
    let first = record_lines(text).next().map(|(_, l)| l).unwrap_or("");
    let has_color1 = first.split(';').skip(1).any(|sec| sec.trim_start().starts_with("1"));
    if has_color1 {
        Convention::Explicit
    } else {
        Convention::Table3
    }
}

pub fn parse_graph_auto(text: &str) -> Result<ColoredGraph, ParseError> {
    parse_graph(text, detect_convention(text))
}

/// Parses a bundle with one record per line; `#` starts a comment.
pub fn parse_bundle(text: &str, convention: Convention) -> Result<Vec<ColoredGraph>, ParseError> {
    record_lines(text).map(|(line, body)| parse_line(body, line, convention).map(|r| r.to_graph())).collect()
}

fn write_pairs(out: &mut String, edges: &[(usize, usize)], shift: usize) {
    for (k, &(a, b)) in edges.iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        write!(out, "{{{},{}}}", a + shift, b + shift).unwrap();
    }
}

/// Normalized text: each pair written smaller label first, pairs sorted by
/// first label.
pub fn serialize_graph(g: &ColoredGraph, convention: Convention) -> Result<String, FormatError> {
    let mut out = format!("n={}", g.n());
    match convention {
        Convention::Table3 => {
            let (e1, e2) = survey_fixed_colors(g.n());
            if g.partners(Color::One) != e1.as_slice() || g.partners(Color::Two) != e2.as_slice() {
                return Err(FormatError::ConventionMismatch);
            }
            out.push_str("; 3: ");
            write_pairs(&mut out, &g.edges(Color::Three), 1);
        }
        Convention::Explicit => {
            for c in Color::ALL {
                write!(out, "; {c}: ").unwrap();
                write_pairs(&mut out, &g.edges(c), 0);
            }
        }
    }
    Ok(out)
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// The embedded fixture graphs, in file order.
pub fn embedded_fixtures() -> Vec<ColoredGraph> {
    parse_bundle(FIXTURE_BUNDLE, Convention::Table3).expect("embedded bundle parses")
}

/// Writes via a temporary sibling file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)
}
