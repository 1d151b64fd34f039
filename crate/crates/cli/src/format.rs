//! Line-oriented text formats for networks, matrices, Gram matrices and
//! common-domain pairs.

use std::fmt::Write as _;

use duality_lab::hilbert::{CommonDomain, OperatorBetween, WeightedSpace};
use duality_lab::linalg::DenseMatrix;
use duality_lab::network::Network;

use crate::error::{JobError, ParseError};

/// A line number with its `(column, token)` pairs.
type Line<'a> = (usize, Vec<(usize, &'a str)>);

/// Non-blank, non-comment lines split into tokens.
struct Lines<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
    last_line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let mut lines = Vec::new();
        let mut last_line = 1;
        for (i, raw) in text.lines().enumerate() {
            last_line = i + 1;
            let trimmed = raw.trim_start();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut tokens = Vec::new();
            let mut start = None;
            for (col, (byte, ch)) in raw.char_indices().enumerate() {
                match (ch.is_whitespace(), start) {
                    (false, None) => start = Some((col + 1, byte)),
                    (true, Some((c, b))) => {
                        tokens.push((c, &raw[b..byte]));
                        start = None;
                    }
                    _ => {}
                }
            }
            if let Some((c, b)) = start {
                tokens.push((c, &raw[b..]));
            }
            lines.push((i + 1, tokens));
        }
        Self {
            lines,
            pos: 0,
            last_line,
        }
    }

    fn next(&mut self, expected: &str) -> Result<Line<'a>, ParseError> {
        let line = self.lines.get(self.pos).cloned().ok_or_else(|| {
            ParseError::new(
                self.last_line,
                1,
                format!("unexpected end of input, expected {expected}"),
            )
        })?;
        self.pos += 1;
        Ok(line)
    }

    fn peek_keyword(&self) -> Option<&'a str> {
        self.lines.get(self.pos).map(|(_, t)| t[0].1)
    }

    fn done(&self) -> bool {
        self.pos >= self.lines.len()
    }
}

fn keyword(line: usize, tokens: &[(usize, &str)], word: &str, arity: usize) -> Result<(), ParseError> {
    let (col, first) = tokens[0];
    if first != word {
        return Err(ParseError::new(
            line,
            col,
            format!("expected `{word}`, found `{first}`"),
        ));
    }
    if tokens.len() != arity + 1 {
        let col = tokens.get(arity + 1).map_or(col, |t| t.0);
        return Err(ParseError::new(
            line,
            col,
            format!("`{word}` takes {arity} argument(s), found {}", tokens.len() - 1),
        ));
    }
    Ok(())
}

fn number(line: usize, (col, tok): (usize, &str)) -> Result<f64, ParseError> {
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(ParseError::new(
            line,
            col,
            format!("`{tok}` is not a finite decimal number"),
        )),
    }
}

fn count(line: usize, (col, tok): (usize, &str)) -> Result<usize, ParseError> {
    tok.parse::<usize>()
        .map_err(|_| ParseError::new(line, col, format!("`{tok}` is not a count")))
}

fn rows(lines: &mut Lines<'_>, rows: usize, cols: usize) -> Result<DenseMatrix<f64>, ParseError> {
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let (line, tokens) = lines.next("a matrix row")?;
        if tokens.len() != cols {
            let col = tokens.get(cols).map_or(tokens.last().map_or(1, |t| t.0), |t| t.0);
            return Err(ParseError::new(
                line,
                col,
                format!("expected {cols} entries, found {}", tokens.len()),
            ));
        }
        for &t in &tokens {
            data.push(number(line, t)?);
        }
    }
    Ok(DenseMatrix::from_row_major(rows, cols, data))
}

fn block(lines: &mut Lines<'_>, word: &str) -> Result<DenseMatrix<f64>, ParseError> {
    let (line, tokens) = lines.next(&format!("`{word}` header"))?;
    if word == "gram" {
        keyword(line, &tokens, "gram", 1)?;
        let n = count(line, tokens[1])?;
        rows(lines, n, n)
    } else {
        keyword(line, &tokens, word, 2)?;
        let (r, c) = (count(line, tokens[1])?, count(line, tokens[2])?);
        rows(lines, r, c)
    }
}

fn trailing(lines: &mut Lines<'_>) -> Result<(), ParseError> {
    if lines.done() {
        return Ok(());
    }
    let (line, tokens) = lines.next("end of input")?;
    Err(ParseError::new(
        line,
        tokens[0].0,
        format!("unexpected `{}`", tokens[0].1),
    ))
}

pub fn parse_network_str(text: &str) -> Result<Network<f64>, JobError> {
    let mut lines = Lines::new(text);
    let (line, tokens) = lines.next("`network <name>`")?;
    if tokens[0].1 != "network" || tokens.len() < 2 {
        return Err(ParseError::new(line, tokens[0].0, "expected `network <name>`").into());
    }
    let name = {
        let raw = text.lines().nth(line - 1).unwrap_or_default();
        raw.trim_start()["network".len()..].trim().to_string()
    };
    let (line, tokens) = lines.next("`base <vertex>`")?;
    keyword(line, &tokens, "base", 1)?;
    let base = tokens[1].1.to_string();
    let mut edges = Vec::new();
    while !lines.done() {
        let (line, tokens) = lines.next("`edge <u> <v> <conductance>`")?;
        keyword(line, &tokens, "edge", 3)?;
        edges.push((
            tokens[1].1.to_string(),
            tokens[2].1.to_string(),
            number(line, tokens[3])?,
        ));
    }
    Ok(Network::new(name, &base, edges)?)
}

pub fn emit_network(n: &Network<f64>) -> String {
    let mut s = format!("network {}\nbase {}\n", n.name(), n.base_label());
    for (u, v, c) in n.labelled_edges() {
        writeln!(s, "edge {u} {v} {c}").expect("writing to a String");
    }
    s
}

pub fn parse_matrix_str(text: &str) -> Result<DenseMatrix<f64>, JobError> {
    let mut lines = Lines::new(text);
    let m = block(&mut lines, "matrix")?;
    trailing(&mut lines)?;
    Ok(m)
}

pub fn parse_gram_str(text: &str) -> Result<DenseMatrix<f64>, JobError> {
    let mut lines = Lines::new(text);
    let g = block(&mut lines, "gram")?;
    trailing(&mut lines)?;
    Ok(g)
}

/// A `matrix` block, optionally followed by the domain and codomain Grams;
/// both default to the identity.
pub fn parse_operator_str(text: &str) -> Result<OperatorBetween<f64>, JobError> {
    let mut lines = Lines::new(text);
    let m = block(&mut lines, "matrix")?;
    let (g1, g2) = if lines.peek_keyword() == Some("gram") {
        (block(&mut lines, "gram")?, block(&mut lines, "gram")?)
    } else {
        (DenseMatrix::identity(m.cols()), DenseMatrix::identity(m.rows()))
    };
    trailing(&mut lines)?;
    let h1 = WeightedSpace::new(g1, "H1")?;
    let h2 = WeightedSpace::new(g2, "H2")?;
    Ok(OperatorBetween::new(m, h1, h2)?)
}

/// `pair`, two Gram blocks on the same coordinates, and an optional `basis`
/// block whose columns span `𝒟` (default: all coordinates).
pub fn parse_pair_str(text: &str) -> Result<CommonDomain<f64>, JobError> {
    let mut lines = Lines::new(text);
    let (line, tokens) = lines.next("`pair`")?;
    keyword(line, &tokens, "pair", 0)?;
    let g1 = block(&mut lines, "gram")?;
    let g2 = block(&mut lines, "gram")?;
    let basis = if lines.peek_keyword() == Some("basis") {
        Some(block(&mut lines, "basis")?)
    } else {
        None
    };
    trailing(&mut lines)?;
    let n = g1.rows();
    let h1 = WeightedSpace::new(g1, "H1")?;
    let h2 = WeightedSpace::new(g2, "H2")?;
    match basis {
        None => Ok(CommonDomain::same_coordinates(h1, h2)?),
        Some(b) => {
            let ambient = WeightedSpace::euclidean(n, "coordinates");
            let e1 = OperatorBetween::new(DenseMatrix::identity(n), ambient.clone(), h1)?;
            let e2 = OperatorBetween::new(DenseMatrix::identity(h2.dim()), ambient, h2)?;
            Ok(CommonDomain::new(b, e1, e2)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_carry_columns() {
        let l = Lines::new("# c\n\n  edge a  b 1\n");
        assert_eq!(l.lines, vec![(3, vec![(3, "edge"), (8, "a"), (11, "b"), (13, "1")])]);
    }

    #[test]
    fn bad_number_points_at_token() {
        let err = parse_network_str("network n\nbase a\nedge a b x1\n").unwrap_err();
        match err {
            JobError::Parse(p) => assert_eq!((p.line, p.column), (3, 10)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn short_matrix_row() {
        let err = parse_matrix_str("matrix 2 2\n1 2\n3\n").unwrap_err();
        assert!(matches!(err, JobError::Parse(ParseError { line: 3, .. })));
    }
}
