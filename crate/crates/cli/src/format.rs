//! Line-oriented exact text formats for fields, pseudo-matrices, bi-pseudo
//! matrices, ideals and divisor chains.
//!
//! `#` starts a comment. Elements are written as their `d` coefficients over
//! the integral basis followed by `/ den`; the denominator may be omitted on
//! input.

use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use okmod_core::pseudo_snf::DivisorChain;
use okmod_core::{BiPseudoMatrix, FieldElement, FractionalIdeal, IntMatrix, NumberField, PseudoMatrix, RatMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

pub type ParseResult<T> = std::result::Result<T, ParseError>;

#[derive(Debug, Clone)]
struct Token {
    text: String,
    line: usize,
    col: usize,
}

/// Token stream grouped by line.
struct Lines {
    lines: Vec<Vec<Token>>,
    pos: usize,
    last_line: usize,
}

impl Lines {
    fn new(src: &str) -> Self {
        let mut lines = Vec::new();
        for (n, raw) in src.lines().enumerate() {
            let body = raw.split('#').next().unwrap_or("");
            let mut toks = Vec::new();
            let mut start = None;
            for (c, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
                match (ch.is_whitespace(), start) {
                    (false, None) => start = Some(c),
                    (true, Some(s)) => {
                        toks.push(Token {
                            text: body[s..c].to_string(),
                            line: n + 1,
                            col: body[..s].chars().count() + 1,
                        });
                        start = None;
                    }
                    _ => {}
                }
            }
            if !toks.is_empty() {
                lines.push(toks);
            }
        }
        let last_line = src.lines().count().max(1);
        Lines { lines, pos: 0, last_line }
    }

    fn next(&mut self, what: &str) -> ParseResult<Vec<Token>> {
        match self.lines.get(self.pos) {
            Some(l) => {
                self.pos += 1;
                Ok(l.clone())
            }
            None => Err(ParseError {
                line: self.last_line,
                col: 1,
                msg: format!("unexpected end of input, expected {what}"),
            }),
        }
    }

    fn done(&self) -> ParseResult<()> {
        match self.lines.get(self.pos) {
            None => Ok(()),
            Some(l) => Err(err(&l[0], "unexpected trailing input")),
        }
    }
}

fn err(t: &Token, msg: impl Into<String>) -> ParseError {
    ParseError {
        line: t.line,
        col: t.col,
        msg: msg.into(),
    }
}

fn int(t: &Token) -> ParseResult<BigInt> {
    t.text.parse().map_err(|_| err(t, format!("expected an integer, found `{}`", t.text)))
}

fn count(t: &Token) -> ParseResult<usize> {
    t.text.parse().map_err(|_| err(t, format!("expected a count, found `{}`", t.text)))
}

fn keyword(line: &[Token], kw: &str, args: usize) -> ParseResult<()> {
    if line[0].text != kw {
        return Err(err(&line[0], format!("expected `{kw}`, found `{}`", line[0].text)));
    }
    if line.len() != args + 1 {
        let t = line.get(args + 1).unwrap_or(&line[0]);
        return Err(err(t, format!("`{kw}` takes {args} argument(s)")));
    }
    Ok(())
}

/// `d` integers followed by an optional `/ den`, starting at `*i`.
fn element_at(line: &[Token], i: &mut usize, d: usize) -> ParseResult<(Vec<BigInt>, BigInt)> {
    let mut c = Vec::with_capacity(d);
    for _ in 0..d {
        let t = line.get(*i).ok_or_else(|| err(line.last().unwrap(), "element has too few coefficients"))?;
        c.push(int(t)?);
        *i += 1;
    }
    let mut den = BigInt::one();
    if line.get(*i).is_some_and(|t| t.text == "/") {
        let t = line.get(*i + 1).ok_or_else(|| err(&line[*i], "missing denominator"))?;
        den = int(t)?;
        if den.is_zero() {
            return Err(err(t, "zero denominator"));
        }
        *i += 2;
    }
    Ok((c, den))
}

fn elements_line(line: &[Token], count: usize, d: usize) -> ParseResult<Vec<FieldElement>> {
    let mut i = 0;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let (c, den) = element_at(line, &mut i, d)?;
        out.push(FieldElement::new(c, den));
    }
    if let Some(t) = line.get(i) {
        return Err(err(t, format!("expected {count} element(s) on this line")));
    }
    Ok(out)
}

/// A parsed field together with the display names of its basis elements.
#[derive(Debug, Clone)]
pub struct FieldSpec {
    pub field: NumberField,
    pub names: Vec<String>,
}

pub fn parse_field(src: &str) -> ParseResult<FieldSpec> {
    let mut ls = Lines::new(src);
    let l = ls.next("`degree`")?;
    keyword(&l, "degree", 1)?;
    let d = count(&l[1])?;
    if d == 0 {
        return Err(err(&l[1], "degree must be positive"));
    }
    let l = ls.next("`poly`")?;
    keyword(&l, "poly", d + 1)?;
    let poly: Vec<BigInt> = l[1..].iter().map(int).collect::<ParseResult<_>>()?;
    if !poly[d].is_one() {
        return Err(err(&l[d + 1], "polynomial must be monic"));
    }
    let mut l = ls.next("basis rows")?;
    let mut names: Vec<String> = std::iter::once("1".to_string()).chain((1..d).map(|i| format!("w{i}"))).collect();
    if l[0].text == "names" {
        keyword(&l, "names", d)?;
        names = l[1..].iter().map(|t| t.text.clone()).collect();
        l = ls.next("basis rows")?;
    }
    if l[0].text == "basis" {
        keyword(&l, "basis", 0)?;
        l = ls.next("basis rows")?;
    }
    let first = l[0].clone();
    let mut rows = Vec::with_capacity(d);
    for r in 0..d {
        if r > 0 {
            l = ls.next("basis rows")?;
        }
        let mut i = 0;
        let (c, den) = element_at(&l, &mut i, d)?;
        if let Some(t) = l.get(i) {
            return Err(err(t, "basis row has extra tokens"));
        }
        rows.push(c.into_iter().map(|x| BigRational::new(x, den.clone())).collect::<Vec<_>>());
    }
    ls.done()?;
    let field = NumberField::new(poly, RatMatrix::from_rational_rows(&rows)).map_err(|e| err(&first, e.to_string()))?;
    Ok(FieldSpec { field, names })
}

pub fn write_field(spec: &FieldSpec) -> String {
    let k = &spec.field;
    let mut s = String::new();
    writeln!(s, "degree {}", k.degree()).unwrap();
    writeln!(s, "poly {}", join(k.poly())).unwrap();
    writeln!(s, "names {}", spec.names.join(" ")).unwrap();
    writeln!(s, "basis").unwrap();
    for row in k.basis().to_rational_rows() {
        let den = row.iter().fold(BigInt::one(), |a, q| a.lcm(q.denom()));
        let num: Vec<BigInt> = row.iter().map(|q| (q * BigRational::from_integer(den.clone())).to_integer()).collect();
        writeln!(s, "{} / {}", join(&num), den).unwrap();
    }
    s
}

fn join(v: &[BigInt]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn parse_ideal(ls: &mut Lines, k: &NumberField) -> ParseResult<FractionalIdeal> {
    let d = k.degree();
    let head = ls.next("an ideal block")?;
    if head[0].text != "ideal" || head.len() < 2 {
        return Err(err(&head[0], "expected `ideal hnf` or `ideal gens <count>`"));
    }
    match head[1].text.as_str() {
        "hnf" => {
            keyword(&head[1..], "hnf", 0)?;
            let mut rows = Vec::with_capacity(d);
            for _ in 0..d {
                let l = ls.next("ideal basis row")?;
                if l.len() != d {
                    return Err(err(&l[0], format!("ideal basis row needs {d} integers")));
                }
                rows.push(l.iter().map(int).collect::<ParseResult<Vec<_>>>()?);
            }
            let l = ls.next("`den`")?;
            keyword(&l, "den", 1)?;
            let den = int(&l[1])?;
            if !den.is_positive() {
                return Err(err(&l[1], "denominator must be positive"));
            }
            FractionalIdeal::from_matrix(&IntMatrix::from_rows(rows), den, k).map_err(|e| err(&head[0], e.to_string()))
        }
        "gens" => {
            keyword(&head[1..], "gens", 1)?;
            let g = count(&head[2])?;
            let mut gens = Vec::with_capacity(g);
            for _ in 0..g {
                let l = ls.next("generator")?;
                gens.extend(elements_line(&l, 1, d)?);
            }
            FractionalIdeal::from_generators(&gens, k).map_err(|e| err(&head[0], e.to_string()))
        }
        _ => Err(err(&head[1], "expected `hnf` or `gens`")),
    }
}

fn write_ideal(s: &mut String, a: &FractionalIdeal) {
    writeln!(s, "ideal hnf").unwrap();
    let h = a.numerator();
    for i in 0..h.rows() {
        writeln!(s, "{}", join(h.row(i))).unwrap();
    }
    writeln!(s, "den {}", a.den()).unwrap();
}

fn write_elements(s: &mut String, row: &[FieldElement]) {
    let parts: Vec<String> = row.iter().map(|x| x.to_string()).collect();
    writeln!(s, "{}", parts.join("   ")).unwrap();
}

/// Contents of a matrix file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixInput {
    Pseudo(PseudoMatrix),
    BiPseudo(BiPseudoMatrix),
}

pub fn parse_matrix(src: &str, k: &NumberField) -> ParseResult<MatrixInput> {
    let d = k.degree();
    let mut ls = Lines::new(src);
    let head = ls.next("`pseudo n m` or `bipseudo n`")?;
    let out = match head[0].text.as_str() {
        "pseudo" => {
            keyword(&head, "pseudo", 2)?;
            let (n, m) = (count(&head[1])?, count(&head[2])?);
            let ideals = (0..n).map(|_| parse_ideal(&mut ls, k)).collect::<ParseResult<Vec<_>>>()?;
            let rows = (0..n)
                .map(|_| ls.next("matrix row").and_then(|l| elements_line(&l, m, d)))
                .collect::<ParseResult<Vec<_>>>()?;
            let p = PseudoMatrix::new(rows, ideals).map_err(|e| err(&head[0], e.to_string()))?;
            MatrixInput::Pseudo(p)
        }
        "bipseudo" => {
            keyword(&head, "bipseudo", 1)?;
            let n = count(&head[1])?;
            let rows_i = (0..n).map(|_| parse_ideal(&mut ls, k)).collect::<ParseResult<Vec<_>>>()?;
            let cols_i = (0..n).map(|_| parse_ideal(&mut ls, k)).collect::<ParseResult<Vec<_>>>()?;
            let mut first_row = None;
            let mut rows = Vec::with_capacity(n);
            for _ in 0..n {
                let l = ls.next("matrix row")?;
                first_row.get_or_insert_with(|| l[0].clone());
                rows.push(elements_line(&l, n, d)?);
            }
            let b = BiPseudoMatrix::new(rows, rows_i, cols_i, k).map_err(|e| err(first_row.as_ref().unwrap_or(&head[0]), e.to_string()))?;
            MatrixInput::BiPseudo(b)
        }
        _ => return Err(err(&head[0], "expected `pseudo` or `bipseudo`")),
    };
    ls.done()?;
    Ok(out)
}

pub fn write_pseudo(p: &PseudoMatrix) -> String {
    let mut s = String::new();
    writeln!(s, "pseudo {} {}", p.n(), p.m()).unwrap();
    for a in p.ideals() {
        write_ideal(&mut s, a);
    }
    for r in p.rows() {
        write_elements(&mut s, r);
    }
    s
}

pub fn write_bipseudo(b: &BiPseudoMatrix) -> String {
    let mut s = String::new();
    writeln!(s, "bipseudo {}", b.n()).unwrap();
    for a in b.row_ideals().iter().chain(b.col_ideals()) {
        write_ideal(&mut s, a);
    }
    for r in b.matrix() {
        write_elements(&mut s, r);
    }
    s
}

pub fn write_matrix(m: &MatrixInput) -> String {
    match m {
        MatrixInput::Pseudo(p) => write_pseudo(p),
        MatrixInput::BiPseudo(b) => write_bipseudo(b),
    }
}

/// A file holding a single ideal block.
pub fn parse_ideal_file(src: &str, k: &NumberField) -> ParseResult<FractionalIdeal> {
    let mut ls = Lines::new(src);
    let a = parse_ideal(&mut ls, k)?;
    ls.done()?;
    Ok(a)
}

pub fn write_ideal_file(a: &FractionalIdeal) -> String {
    let mut s = String::new();
    writeln!(s, "# norm {}", a.norm()).unwrap();
    write_ideal(&mut s, a);
    s
}

pub fn write_chain(c: &DivisorChain) -> String {
    let mut s = String::new();
    writeln!(s, "chain {}", c.len()).unwrap();
    for (i, a) in c.divisors().iter().enumerate() {
        writeln!(s, "# d_{} norm {}", i + 1, a.norm()).unwrap();
        write_ideal(&mut s, a);
    }
    s
}

pub fn parse_chain(src: &str, k: &NumberField) -> ParseResult<Vec<FractionalIdeal>> {
    let mut ls = Lines::new(src);
    let head = ls.next("`chain n`")?;
    keyword(&head, "chain", 1)?;
    let n = count(&head[1])?;
    let out = (0..n).map(|_| parse_ideal(&mut ls, k)).collect::<ParseResult<Vec<_>>>()?;
    ls.done()?;
    Ok(out)
}

/// Readable form over the basis names, e.g. `3+3i` or `(1-w1)/2`.
pub fn pretty_element(x: &FieldElement, names: &[String]) -> String {
    let mut s = String::new();
    for (c, name) in x.coeffs().iter().zip(names) {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        if !s.is_empty() || neg {
            s.push(if neg { '-' } else { '+' });
        }
        let a = c.abs();
        let unit = name == "1";
        if unit {
            write!(s, "{a}").unwrap();
        } else {
            if !a.is_one() {
                write!(s, "{a}").unwrap();
                if name.chars().count() > 1 {
                    s.push('*');
                }
            }
            s.push_str(name);
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    if x.den().is_one() {
        s
    } else {
        format!("({s})/{}", x.den())
    }
}
