//! Command-line front end: file formats and the command runner.

pub mod format;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use okmod_core::determinant::{det_of_rows, determinantal_ideal, determinantal_ideal_multiple};
use okmod_core::pseudo_hnf::{canonicalize, pseudo_hnf, pseudo_hnf_auto, to_absolute};
use okmod_core::pseudo_snf::{pseudo_snf, DivisorChain};
use okmod_core::verify::{chain_invariants, check_hnf, cofactor_det, quotient_invariants};
use okmod_core::{BiPseudoMatrix, FractionalIdeal, NumberField, PseudoMatrix};
use rand::seq::SliceRandom;
use rand::SeedableRng;

use format::{FieldSpec, MatrixInput, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Hnf,
    Snf,
    Det,
    Detideal,
    Canonical,
    Absolute,
    Check,
}

#[derive(Debug, Clone)]
pub struct Job {
    pub command: Command,
    pub field: PathBuf,
    pub matrix: PathBuf,
    pub detideal: Option<PathBuf>,
    /// A previously computed result for `check` to verify instead of
    /// recomputing it.
    pub result: Option<PathBuf>,
    pub canonical: bool,
    pub check: bool,
    pub seed: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("{0}: {1}")]
    Parse(PathBuf, ParseError),
    #[error("{0}")]
    Input(String),
    #[error("computation failed: {0}")]
    Compute(#[from] okmod_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute(_) => 1,
            _ => 2,
        }
    }
}

/// Text to print and whether every oracle passed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub pass: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, pass: true }
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            3
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

pub fn load_field(path: &Path) -> Result<FieldSpec, CliError> {
    format::parse_field(&read(path)?).map_err(|e| CliError::Parse(path.to_path_buf(), e))
}

pub fn load_matrix(path: &Path, k: &NumberField) -> Result<MatrixInput, CliError> {
    format::parse_matrix(&read(path)?, k).map_err(|e| CliError::Parse(path.to_path_buf(), e))
}

fn load_ideal(path: &Path, k: &NumberField) -> Result<FractionalIdeal, CliError> {
    format::parse_ideal_file(&read(path)?, k).map_err(|e| CliError::Parse(path.to_path_buf(), e))
}

fn want_pseudo(m: MatrixInput) -> Result<PseudoMatrix, CliError> {
    match m {
        MatrixInput::Pseudo(p) => Ok(p),
        MatrixInput::BiPseudo(_) => Err(CliError::Input("this command needs a `pseudo` matrix".into())),
    }
}

fn want_bipseudo(m: MatrixInput) -> Result<BiPseudoMatrix, CliError> {
    match m {
        MatrixInput::BiPseudo(b) => Ok(b),
        MatrixInput::Pseudo(_) => Err(CliError::Input("this command needs a `bipseudo` matrix".into())),
    }
}

struct Report {
    text: String,
    pass: bool,
}

impl Report {
    fn new() -> Self {
        Report {
            text: String::new(),
            pass: true,
        }
    }

    fn line(&mut self, what: &str, r: Result<(), String>) {
        match r {
            Ok(()) => writeln!(self.text, "{what}: PASS").unwrap(),
            Err(e) => {
                writeln!(self.text, "{what}: FAIL ({e})").unwrap();
                self.pass = false;
            }
        }
    }

    fn finish(mut self) -> Output {
        writeln!(self.text, "{}", if self.pass { "PASS" } else { "FAIL" }).unwrap();
        Output {
            text: self.text,
            pass: self.pass,
        }
    }
}

fn compute_hnf(p: &PseudoMatrix, dd: Option<&FractionalIdeal>, k: &NumberField) -> Result<PseudoMatrix, CliError> {
    Ok(match dd {
        Some(d) => pseudo_hnf(p, d, k)?,
        None => pseudo_hnf_auto(p, k)?,
    })
}

fn check_pseudo(job: &Job, p: &PseudoMatrix, dd: Option<&FractionalIdeal>, k: &NumberField) -> Result<Report, CliError> {
    let mut rep = Report::new();
    let h = match &job.result {
        Some(path) => want_pseudo(load_matrix(path, k)?)?,
        None => compute_hnf(p, dd, k)?,
    };
    rep.line("hnf module equality", check_hnf(p, &h, k));
    if job.result.is_none() {
        // canonical forms do not depend on the order of the input rows
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(job.seed);
        let mut idx: Vec<usize> = (0..p.n()).collect();
        idx.shuffle(&mut rng);
        let q = PseudoMatrix::new(
            idx.iter().map(|&i| p.row(i).to_vec()).collect(),
            idx.iter().map(|&i| p.ideal(i).clone()).collect(),
        )?;
        let a = canonicalize(&h, k)?;
        let b = canonicalize(&compute_hnf(&q, dd, k)?, k)?;
        writeln!(rep.text, "# seed {}", job.seed).unwrap();
        rep.line("canonical form under row shuffle", if a == b { Ok(()) } else { Err("canonical forms differ".into()) });
    }
    if p.n() == p.m() && p.n() <= 6 && !p.rows().is_empty() {
        let fast = det_of_rows(p.rows(), k)?;
        let slow = cofactor_det(p.rows(), k);
        rep.line("determinant against cofactor expansion", if fast == slow { Ok(()) } else { Err(format!("{fast} vs {slow}")) });
    }
    Ok(rep)
}

fn check_bipseudo(job: &Job, b: &BiPseudoMatrix, dd: Option<&FractionalIdeal>, k: &NumberField) -> Result<Report, CliError> {
    let mut rep = Report::new();
    let chain = match &job.result {
        Some(path) => {
            let src = read(path)?;
            DivisorChain::from_divisors(format::parse_chain(&src, k).map_err(|e| CliError::Parse(path.clone(), e))?)
        }
        None => pseudo_snf(b, dd, k)?,
    };
    rep.line(
        "divisor chain integral and ordered",
        if chain.is_valid() { Ok(()) } else { Err("chain condition".into()) },
    );
    let order = b.determinantal_ideal(k)?;
    let prod = chain.product(k);
    rep.line(
        "product equals the determinantal ideal",
        if prod == order { Ok(()) } else { Err(format!("{prod} vs {order}")) },
    );
    let from_chain = chain_invariants(&chain);
    let from_quotient = quotient_invariants(b, None, k)?;
    rep.line(
        "quotient invariant factors",
        if from_chain == from_quotient {
            Ok(())
        } else {
            Err(format!("{from_chain:?} vs {from_quotient:?}"))
        },
    );
    Ok(rep)
}

fn absolute_text(p: &PseudoMatrix, k: &NumberField) -> Result<String, CliError> {
    let a = to_absolute(p, k)?;
    let mut s = String::new();
    writeln!(s, "matrix {} {}", a.rows(), a.cols()).unwrap();
    for i in 0..a.rows() {
        let row: Vec<String> = a.row(i).iter().map(|x| x.to_string()).collect();
        writeln!(s, "{}", row.join(" ")).unwrap();
    }
    Ok(s)
}

pub fn run(job: &Job) -> Result<Output, CliError> {
    let spec = load_field(&job.field)?;
    let k = &spec.field;
    let input = load_matrix(&job.matrix, k)?;
    let dd = match &job.detideal {
        Some(p) => Some(load_ideal(p, k)?),
        None => None,
    };
    let dd = dd.as_ref();
    match job.command {
        Command::Hnf | Command::Canonical => {
            let p = want_pseudo(input)?;
            let mut h = compute_hnf(&p, dd, k)?;
            if job.canonical || job.command == Command::Canonical {
                h = canonicalize(&h, k)?;
            }
            let mut text = format::write_pseudo(&h);
            let mut pass = true;
            if job.check {
                let mut rep = Report::new();
                rep.line("hnf module equality", check_hnf(&p, &h, k));
                let out = rep.finish();
                text.push_str(&out.text.lines().map(|l| format!("# {l}\n")).collect::<String>());
                pass = out.pass;
            }
            Ok(Output { text, pass })
        }
        Command::Snf => {
            let b = want_bipseudo(input)?;
            let chain = pseudo_snf(&b, dd, k)?;
            let mut text = format::write_chain(&chain);
            let mut pass = true;
            if job.check {
                let inv = chain_invariants(&chain);
                let ok = chain.is_valid() && inv == quotient_invariants(&b, None, k)?;
                writeln!(text, "# check: {}", if ok { "PASS" } else { "FAIL" }).unwrap();
                pass = ok;
            }
            Ok(Output { text, pass })
        }
        Command::Det => {
            let rows = match &input {
                MatrixInput::Pseudo(p) if p.n() == p.m() => p.rows().to_vec(),
                MatrixInput::BiPseudo(b) => b.matrix().to_vec(),
                _ => return Err(CliError::Input("determinant of a non-square matrix".into())),
            };
            let d = det_of_rows(&rows, k)?;
            Ok(Output::ok(format!("{}\nelement {}\n", format::pretty_element(&d, &spec.names), d)))
        }
        Command::Detideal => {
            let a = match &input {
                MatrixInput::Pseudo(p) if p.n() == p.m() => determinantal_ideal(p, k)?,
                MatrixInput::Pseudo(p) => determinantal_ideal_multiple(p, k)?,
                MatrixInput::BiPseudo(b) => b.determinantal_ideal(k)?,
            };
            Ok(Output::ok(format::write_ideal_file(&a)))
        }
        Command::Absolute => Ok(Output::ok(absolute_text(&want_pseudo(input)?, k)?)),
        Command::Check => {
            let rep = match input {
                MatrixInput::Pseudo(p) => check_pseudo(job, &p, dd, k)?,
                MatrixInput::BiPseudo(b) => check_bipseudo(job, &b, dd, k)?,
            };
            Ok(rep.finish())
        }
    }
}
