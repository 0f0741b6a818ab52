//! Text format for arrangement pairs, plus text and SVG rendering.
//!
//! ```text
//! gridpair v1 n=<n> d=<d>
//! <n rows of n tokens: grid A, row y, column x>
//!
//! <n rows of n tokens: grid B>
//! ```
//!
//! For `d >= 3` each grid is one line per cell, `<x_1> ... <x_d> <token>`, in
//! cell-index order (first coordinate fastest), and the grids are separated by
//! a line holding `---`. Tokens are non-whitespace ASCII strings. Parsing maps
//! them to dense symbol ids in order of first appearance in grid A.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::construct::color_of;
use crate::error::{Error, Result};
use crate::grid::{Arrangement, ArrangementPair, GridSpec, Symbol};

pub const FORMAT_VERSION: &str = "v1";
const SEPARATOR: &str = "---";

/// A pair together with the external token of every symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairDocument {
    pub pair: ArrangementPair,
    tokens: Vec<String>,
}

impl PairDocument {
    /// Symbols are written as their decimal ids.
    pub fn from_pair(pair: ArrangementPair) -> Self {
        let tokens = (0..pair.symbol_count()).map(|s| s.to_string()).collect();
        Self { pair, tokens }
    }

    pub fn new(pair: ArrangementPair, tokens: Vec<String>) -> Result<Self> {
        if tokens.len() != pair.symbol_count() {
            return Err(Error::InvalidSymbol(format!(
                "{} tokens for {} symbols",
                tokens.len(),
                pair.symbol_count()
            )));
        }
        let mut seen = HashMap::with_capacity(tokens.len());
        for (s, tok) in tokens.iter().enumerate() {
            check_token(tok).map_err(Error::InvalidSymbol)?;
            if let Some(other) = seen.insert(tok.as_str(), s) {
                return Err(Error::InvalidSymbol(format!(
                    "token {tok:?} names symbols {other} and {s}"
                )));
            }
        }
        Ok(Self { pair, tokens })
    }

    pub fn token(&self, s: Symbol) -> &str {
        &self.tokens[s.0]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

fn check_token(tok: &str) -> std::result::Result<(), String> {
    if tok.is_empty() {
        return Err("empty token".into());
    }
    if !tok.bytes().all(|b| b.is_ascii_graphic()) {
        return Err(format!("token {tok:?} must be non-whitespace ASCII"));
    }
    Ok(())
}

struct Header {
    n: usize,
    d: usize,
}

fn parse_header(line: &str) -> Result<Header> {
    let err = |msg: &str| Error::parse(1, format!("malformed header: {msg}"));
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "gridpair" {
        return Err(err("expected `gridpair v1 n=<n> d=<d>`"));
    }
    if fields[1] != FORMAT_VERSION {
        return Err(err(&format!("unsupported version {:?}", fields[1])));
    }
    let number = |field: &str, key: &str| -> Result<usize> {
        field
            .strip_prefix(key)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| err(&format!("expected {key}<integer>, got {field:?}")))
    };
    let n = number(fields[2], "n=")?;
    let d = number(fields[3], "d=")?;
    GridSpec::new(n, d).map_err(|e| err(&e.to_string()))?;
    Ok(Header { n, d })
}

/// Incrementally assigns dense ids to tokens.
struct TokenTable<'t> {
    ids: HashMap<&'t str, usize>,
    order: Vec<&'t str>,
}

impl<'t> TokenTable<'t> {
    fn intern_a(&mut self, tok: &'t str, line: usize) -> Result<usize> {
        check_token(tok).map_err(|m| Error::parse(line, m))?;
        if self.ids.contains_key(tok) {
            return Err(Error::parse(line, format!("duplicate token {tok:?} in grid A")));
        }
        let id = self.order.len();
        self.ids.insert(tok, id);
        self.order.push(tok);
        Ok(id)
    }

    fn lookup_b(&self, tok: &str, seen: &mut [bool], line: usize) -> Result<usize> {
        let id = *self.ids.get(tok).ok_or_else(|| {
            Error::parse(line, format!("token set mismatch: {tok:?} appears in grid B but not in grid A"))
        })?;
        if std::mem::replace(&mut seen[id], true) {
            return Err(Error::parse(line, format!("duplicate token {tok:?} in grid B")));
        }
        Ok(id)
    }
}

/// One placed token: cell index, token, line number.
type Entry<'t> = (usize, &'t str, usize);

fn read_rows<'t>(lines: &[(usize, &'t str)], spec: &GridSpec) -> Result<Vec<Entry<'t>>> {
    let n = spec.n();
    let mut out = Vec::with_capacity(spec.cell_count());
    for (y, &(line, text)) in lines.iter().enumerate() {
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.len() != n {
            return Err(Error::parse(line, format!("expected {n} tokens in a row, found {}", toks.len())));
        }
        out.extend(toks.into_iter().enumerate().map(|(x, tok)| (y * n + x, tok, line)));
    }
    Ok(out)
}

fn read_cells<'t>(lines: &[(usize, &'t str)], spec: &GridSpec) -> Result<Vec<Entry<'t>>> {
    let (n, d) = (spec.n(), spec.d());
    let mut out = Vec::with_capacity(spec.cell_count());
    let mut filled = vec![false; spec.cell_count()];
    for &(line, text) in lines {
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != d + 1 {
            return Err(Error::parse(
                line,
                format!("expected {d} coordinates and a token, found {} fields", fields.len()),
            ));
        }
        let mut index = 0;
        for field in fields[..d].iter().rev() {
            let x: usize = field
                .parse()
                .ok()
                .filter(|&x| x < n)
                .ok_or_else(|| Error::parse(line, format!("coordinate {field:?} is not in 0..{n}")))?;
            index = index * n + x;
        }
        if std::mem::replace(&mut filled[index], true) {
            return Err(Error::parse(line, "cell listed twice"));
        }
        out.push((index, fields[d], line));
    }
    Ok(out)
}

/// Parse a document, validating both grids and their token sets.
pub fn parse(text: &str) -> Result<PairDocument> {
    let mut lines = Vec::new();
    for (i, raw) in text.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if !line.is_ascii() {
            return Err(Error::parse(i + 1, "non-ASCII text"));
        }
        lines.push((i + 1, line));
    }
    let header = lines
        .first()
        .filter(|(_, l)| !l.trim().is_empty())
        .ok_or_else(|| Error::parse(1, "malformed header: missing"))?;
    let Header { n, d } = parse_header(header.1)?;
    let spec = GridSpec::new(n, d).expect("validated in header");
    let count = spec.cell_count();
    let body = &lines[1..];
    let last_line = lines.len();

    // split the body into the two grids
    let (grid_a, grid_b): (Vec<_>, Vec<_>) = if d == 2 {
        let mut blocks: Vec<Vec<(usize, &str)>> = vec![Vec::new()];
        for &(no, l) in body {
            if l.trim().is_empty() {
                if !blocks.last().unwrap().is_empty() {
                    blocks.push(Vec::new());
                }
            } else {
                blocks.last_mut().unwrap().push((no, l));
            }
        }
        blocks.retain(|b| !b.is_empty());
        if blocks.len() != 2 {
            let line = blocks.get(2).map_or(last_line, |b| b[0].0);
            return Err(Error::parse(
                line,
                format!("expected two grids separated by a blank line, found {}", blocks.len()),
            ));
        }
        for block in &blocks {
            if block.len() != n {
                return Err(Error::parse(
                    block[0].0,
                    format!("grid has {} rows, expected {n}", block.len()),
                ));
            }
        }
        let b = blocks.pop().unwrap();
        (blocks.pop().unwrap(), b)
    } else {
        let content: Vec<(usize, &str)> = body.iter().copied().filter(|(_, l)| !l.trim().is_empty()).collect();
        let split = content
            .iter()
            .position(|(_, l)| l.trim() == SEPARATOR)
            .ok_or_else(|| Error::parse(last_line, format!("missing `{SEPARATOR}` between the grids")))?;
        let (a, rest) = content.split_at(split);
        let b = &rest[1..];
        for grid in [a, b] {
            if grid.len() != count {
                let line = grid.first().map_or(rest[0].0, |g| g.0);
                return Err(Error::parse(line, format!("grid lists {} cells, expected {count}", grid.len())));
            }
        }
        (a.to_vec(), b.to_vec())
    };

    let read = if d == 2 { read_rows } else { read_cells };
    let entries_a = read(&grid_a, &spec)?;
    let entries_b = read(&grid_b, &spec)?;

    let mut table = TokenTable {
        ids: HashMap::with_capacity(count),
        order: Vec::with_capacity(count),
    };
    let mut symbol_at = vec![0usize; count];
    for &(cell, tok, line) in &entries_a {
        symbol_at[cell] = table.intern_a(tok, line)?;
    }
    let a = Arrangement::from_symbols(spec, symbol_at.clone()).map_err(|e| Error::parse(1, e.to_string()))?;
    let mut seen = vec![false; count];
    for &(cell, tok, line) in &entries_b {
        symbol_at[cell] = table.lookup_b(tok, &mut seen, line)?;
    }
    let b = Arrangement::from_symbols(spec, symbol_at).map_err(|e| Error::parse(last_line, e.to_string()))?;
    let tokens = table.order.iter().map(|t| t.to_string()).collect();
    Ok(PairDocument {
        pair: ArrangementPair::new(a, b)?,
        tokens,
    })
}

/// Canonical text: LF line endings, single spaces, trailing newline.
pub fn serialize(doc: &PairDocument) -> String {
    let spec = *doc.pair.spec();
    let (n, d) = (spec.n(), spec.d());
    let mut out = String::with_capacity(spec.cell_count() * 8 + 32);
    writeln!(out, "gridpair {FORMAT_VERSION} n={n} d={d}").unwrap();
    let grid = |arr: &Arrangement, out: &mut String| {
        let symbols = arr.symbols();
        if d == 2 {
            for row in symbols.chunks_exact(n) {
                for (x, &s) in row.iter().enumerate() {
                    if x > 0 {
                        out.push(' ');
                    }
                    out.push_str(&doc.tokens[s]);
                }
                out.push('\n');
            }
        } else {
            let mut coords = vec![0usize; d];
            for (cell, &s) in symbols.iter().enumerate() {
                spec.decode(cell, &mut coords);
                for x in &coords {
                    write!(out, "{x} ").unwrap();
                }
                out.push_str(&doc.tokens[s]);
                out.push('\n');
            }
        }
    };
    grid(doc.pair.a(), &mut out);
    out.push_str(if d == 2 { "\n" } else { "---\n" });
    grid(doc.pair.b(), &mut out);
    out
}

/// Serialize with decimal symbol ids as tokens.
pub fn serialize_pair(pair: &ArrangementPair) -> String {
    serialize(&PairDocument::from_pair(pair.clone()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Text,
    Svg,
}

impl FromStr for RenderFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(RenderFormat::Text),
            "svg" => Ok(RenderFormat::Svg),
            _ => Err(Error::Unsupported(format!("render format {s:?}"))),
        }
    }
}

/// Draw both grids. `k` colors cells by their residue class; without it each
/// symbol gets a hashed color.
pub fn render(doc: &PairDocument, format: RenderFormat, k: Option<usize>) -> Result<String> {
    match format {
        RenderFormat::Text => Ok(render_text(doc)),
        RenderFormat::Svg => render_svg(doc, k),
    }
}

fn render_text(doc: &PairDocument) -> String {
    let spec = *doc.pair.spec();
    let (n, d) = (spec.n(), spec.d());
    let width = doc.tokens.iter().map(String::len).max().unwrap_or(1);
    let plane = n * n;
    let slices = spec.cell_count() / plane;
    let mut out = String::new();
    for (name, arr) in [("A", doc.pair.a()), ("B", doc.pair.b())] {
        for slice in 0..slices {
            if !out.is_empty() {
                out.push('\n');
            }
            if d == 2 {
                writeln!(out, "{name}").unwrap();
            } else {
                let upper = spec.cell_at(slice * plane);
                let label: Vec<String> = upper.coords()[2..]
                    .iter()
                    .enumerate()
                    .map(|(i, x)| format!("x{}={x}", i + 3))
                    .collect();
                writeln!(out, "{name} ({})", label.join(", ")).unwrap();
            }
            let cells = &arr.symbols()[slice * plane..(slice + 1) * plane];
            for row in cells.chunks_exact(n) {
                let line: Vec<String> = row
                    .iter()
                    .map(|&s| format!("{:>width$}", doc.tokens[s]))
                    .collect();
                writeln!(out, "{}", line.join(" ")).unwrap();
            }
        }
    }
    out
}

fn escape(tok: &str) -> String {
    tok.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn render_svg(doc: &PairDocument, k: Option<usize>) -> Result<String> {
    let spec = *doc.pair.spec();
    if spec.d() != 2 {
        return Err(Error::Unsupported(format!("svg output needs d = 2, got d = {}", spec.d())));
    }
    const CELL: usize = 28;
    const MARGIN: usize = 20;
    const TITLE: usize = 24;
    let n = spec.n();
    let side = n * CELL;
    let width = 2 * side + 3 * MARGIN;
    let height = side + 2 * MARGIN + TITLE;
    let font = (CELL * 2 / 5).max(6);

    let fill = |cell: usize, symbol: usize| -> String {
        match k.filter(|&k| k > 0) {
            Some(k) => {
                let color = color_of(&spec.cell_at(cell), k);
                let class = color[0] * k + color[1];
                let hue = class * 360 / (k * k);
                let light = if class == 0 { 92 } else { 72 };
                format!("hsl({hue},60%,{light}%)")
            }
            None => {
                let hue = (symbol as u64).wrapping_mul(2654435761) % 360;
                format!("hsl({hue},55%,75%)")
            }
        }
    };

    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )
    .unwrap();
    writeln!(out, r#"<g font-family="monospace" font-size="{font}" text-anchor="middle">"#).unwrap();
    for (g, (name, arr)) in [("A", doc.pair.a()), ("B", doc.pair.b())].into_iter().enumerate() {
        let x0 = MARGIN + g * (side + MARGIN);
        let y0 = MARGIN + TITLE;
        writeln!(out, r#"<text x="{}" y="{}" font-size="{}">{name}</text>"#, x0 + side / 2, MARGIN + TITLE / 2, font + 4).unwrap();
        for (cell, &s) in arr.symbols().iter().enumerate() {
            let (x, y) = (cell % n, cell / n);
            let (px, py) = (x0 + x * CELL, y0 + y * CELL);
            writeln!(
                out,
                r##"<rect class="cell" x="{px}" y="{py}" width="{CELL}" height="{CELL}" fill="{}" stroke="#333" stroke-width="1"/>"##,
                fill(cell, s)
            )
            .unwrap();
            writeln!(
                out,
                r#"<text x="{}" y="{}" dominant-baseline="central">{}</text>"#,
                px + CELL / 2,
                py + CELL / 2,
                escape(&doc.tokens[s])
            )
            .unwrap();
        }
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, "</svg>").unwrap();
    Ok(out)
}
