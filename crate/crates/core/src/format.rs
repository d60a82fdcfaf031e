//! Text formats for instances and solution lists.
//!
//! Instance:
//! ```text
//! SIS n m q
//! a_00 a_01 ... a_0(n-1)
//! ...
//! ```
//! Solutions:
//! ```text
//! SOL m count
//! c_0 c_1 ... c_(m-1)
//! ...
//! ```
//! Tokens are separated by single spaces, lines end in LF, and there is no
//! trailing whitespace. Parse errors carry 1-based line and column.

use std::fmt::Write as _;

use thiserror::Error;

use crate::zq::{CombinationVector, SisInstance, ZqError, ZqMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid instance: {0}")]
    Instance(#[from] ZqError),
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Splits one line into `(column, token)` pairs, rejecting anything other
/// than single-space separation.
fn tokens(line_no: usize, line: &str) -> Result<Vec<(usize, &str)>, ParseError> {
    if line.ends_with('\r') {
        return Err(syntax(line_no, line.len(), "CR line ending"));
    }
    let mut out = Vec::new();
    let mut col = 1;
    for tok in line.split(' ') {
        if tok.is_empty() {
            return Err(syntax(line_no, col, "expected a single space between tokens"));
        }
        out.push((col, tok));
        col += tok.len() + 1;
    }
    Ok(out)
}

fn lines(text: &str) -> Result<Vec<&str>, ParseError> {
    let Some(body) = text.strip_suffix('\n') else {
        let n = text.lines().count().max(1);
        return Err(syntax(
            n,
            text.lines().last().map_or(1, |l| l.len() + 1),
            "missing final LF",
        ));
    };
    Ok(body.split('\n').collect())
}

fn number<T: std::str::FromStr>(line: usize, col: usize, tok: &str) -> Result<T, ParseError> {
    tok.parse()
        .map_err(|_| syntax(line, col, format!("not a valid integer: {tok:?}")))
}

fn header<'a>(line: &'a str, tag: &str, arity: usize) -> Result<Vec<(usize, &'a str)>, ParseError> {
    let toks = tokens(1, line)?;
    if toks[0].1 != tag {
        return Err(syntax(1, 1, format!("expected header tag {tag}")));
    }
    if toks.len() != arity + 1 {
        return Err(syntax(1, 1, format!("header needs {arity} fields")));
    }
    Ok(toks[1..].to_vec())
}

pub fn write_instance(inst: &SisInstance) -> String {
    let mut s = String::new();
    writeln!(s, "SIS {} {} {}", inst.n(), inst.m(), inst.q()).unwrap();
    for row in inst.matrix().iter_rows() {
        push_row(&mut s, row);
    }
    s
}

pub fn parse_instance(text: &str) -> Result<SisInstance, ParseError> {
    let lines = lines(text)?;
    let h = header(lines[0], "SIS", 3)?;
    let n: usize = number(1, h[0].0, h[0].1)?;
    let m: usize = number(1, h[1].0, h[1].1)?;
    let q: u64 = number(1, h[2].0, h[2].1)?;
    if lines.len() != m + 1 {
        return Err(syntax(
            lines.len(),
            1,
            format!("expected {m} matrix rows, found {}", lines.len() - 1),
        ));
    }
    let mut data = Vec::with_capacity(n * m);
    for (i, line) in lines[1..].iter().enumerate() {
        let line_no = i + 2;
        let toks = tokens(line_no, line)?;
        if toks.len() != n {
            return Err(syntax(
                line_no,
                1,
                format!("expected {n} entries, found {}", toks.len()),
            ));
        }
        for (col, tok) in toks {
            let v: u64 = number(line_no, col, tok)?;
            if v >= q {
                return Err(syntax(line_no, col, format!("entry {v} not in [0, {q})")));
            }
            data.push(v);
        }
    }
    Ok(SisInstance::new(q, ZqMatrix::from_row_major(m, n, data))?)
}

pub fn write_solutions<'a, I>(m: usize, sols: I) -> String
where
    I: IntoIterator<Item = &'a CombinationVector>,
    I::IntoIter: ExactSizeIterator,
{
    let it = sols.into_iter();
    let mut s = String::new();
    writeln!(s, "SOL {} {}", m, it.len()).unwrap();
    for c in it {
        debug_assert_eq!(c.len(), m);
        push_row(&mut s, c.coeffs());
    }
    s
}

/// Parse a solution file. Returns `m` and the vectors in file order.
pub fn parse_solutions(text: &str) -> Result<(usize, Vec<CombinationVector>), ParseError> {
    let lines = lines(text)?;
    let h = header(lines[0], "SOL", 2)?;
    let m: usize = number(1, h[0].0, h[0].1)?;
    let count: usize = number(1, h[1].0, h[1].1)?;
    // "SOL m 0\n" has exactly one line
    if lines.len() != count + 1 {
        return Err(syntax(
            lines.len(),
            1,
            format!("expected {count} solution rows, found {}", lines.len() - 1),
        ));
    }
    let mut out = Vec::with_capacity(count);
    for (i, line) in lines[1..].iter().enumerate() {
        let line_no = i + 2;
        let toks = tokens(line_no, line)?;
        if toks.len() != m {
            return Err(syntax(
                line_no,
                1,
                format!("expected {m} entries, found {}", toks.len()),
            ));
        }
        let mut c = Vec::with_capacity(m);
        for (col, tok) in toks {
            let v: i64 = number(line_no, col, tok)?;
            if v == i64::MIN {
                return Err(syntax(line_no, col, "coefficient out of range"));
            }
            c.push(v);
        }
        out.push(CombinationVector::new(c));
    }
    Ok((m, out))
}

fn push_row<T: std::fmt::Display>(s: &mut String, row: &[T]) {
    for (j, x) in row.iter().enumerate() {
        if j > 0 {
            s.push(' ');
        }
        write!(s, "{x}").unwrap();
    }
    s.push('\n');
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zq::gen_instance;
    use proptest::prelude::*;

    #[test]
    fn instance_layout_is_exact() {
        let inst = SisInstance::new(5, ZqMatrix::from_rows(&[vec![1, 0], vec![4, 3], vec![0, 2]])).unwrap();
        assert_eq!(write_instance(&inst), "SIS 2 3 5\n1 0\n4 3\n0 2\n");
    }

    #[test]
    fn solution_layout_is_exact() {
        let sols = [
            CombinationVector::new(vec![1, -1, 0]),
            CombinationVector::new(vec![0, 2, -3]),
        ];
        assert_eq!(write_solutions(3, sols.iter()), "SOL 3 2\n1 -1 0\n0 2 -3\n");
        assert_eq!(write_solutions(3, [].iter()), "SOL 3 0\n");
        assert_eq!(parse_solutions("SOL 3 0\n").unwrap(), (3, vec![]));
    }

    #[test]
    fn errors_name_line_and_column() {
        let err = parse_instance("SIS 2 3 5\n1 0\n4  3\n0 2\n").unwrap_err();
        assert_eq!(err, syntax(3, 3, "expected a single space between tokens"));
        let err = parse_instance("SIS 2 3 5\n1 0\n4 x\n0 2\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 3, column: 3, .. }));
        let err = parse_instance("SIS 2 3 5\n1 0\n4 7\n0 2\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 3, column: 3, .. }));
        let err = parse_instance("SIS 2 3 5\n1 0\n4 3\n0 2 \n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 4, column: 5, .. }));
        let err = parse_instance("SIS 2 3 5\n1 0\n4 3\n0 2").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 4, .. }));
        let err = parse_instance("SIS 2 3 5\n1 0\n4 3\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }));
        let err = parse_instance("SOL 2 3 5\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, column: 1, .. }));
        let err = parse_instance("").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }));
        assert_eq!(
            parse_instance("SIS 2 3 91\n1 0\n4 3\n0 2\n").unwrap_err(),
            ParseError::Instance(ZqError::NotPrime(91))
        );
        let err = parse_solutions("SOL 2 1\n1 -9223372036854775808\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, column: 3, .. }));
    }

    #[test]
    fn garbage_never_panics() {
        for text in [
            "\n",
            "SIS\n",
            "SIS 1 2\n",
            "SIS a b c\n",
            "SIS 1 2 3\n\n\n",
            "SOL -1 2\n",
            "SIS 1 2 3\r\n1\n2\n",
        ] {
            assert!(parse_instance(text).is_err());
            assert!(parse_solutions(text).is_err());
        }
    }

    proptest! {
        #[test]
        fn instance_round_trip(n in 1usize..5, extra in 1usize..8, q in prop::sample::select(vec![2u64, 3, 97, 65_537, (1 << 61) - 1]), seed: u64) {
            let inst = gen_instance(n, n + extra, q, seed).unwrap();
            let text = write_instance(&inst);
            prop_assert_eq!(parse_instance(&text).unwrap(), inst);
        }

        #[test]
        fn solution_round_trip(rows in prop::collection::vec(prop::collection::vec(-1000i64..1000, 4), 0..10)) {
            let sols: Vec<_> = rows.into_iter().map(CombinationVector::new).collect();
            let text = write_solutions(4, sols.iter());
            prop_assert_eq!(parse_solutions(&text).unwrap(), (4, sols));
        }
    }
}
