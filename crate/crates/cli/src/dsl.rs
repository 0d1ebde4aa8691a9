//! System files: one chart, named objects and named analysis requests.
//!
//! ```text
//! file       = { statement } ;
//! statement  = chart | constants | definition | block ;
//! chart      = "chart" ident { "," ident } ";" ;
//! constants  = "constants" ident { "," ident } ";" ;
//! definition = objkind ident "=" value ";" ;
//! objkind    = "function" | "hamiltonian" | "form" | "field" | "tensor" | "matrix" ;
//! block      = blockkind [ ident ] "{" { entry } "}" ;
//! blockkind  = "frequencies" | "verify" | "factorize" | "altgen" | "resonance"
//!            | "period" | "normalform" | "validate" ;
//! entry      = ident ":" value ( ";" | before "}" ) ;
//! value      = text up to ";" or "}" outside brackets ;
//! comment    = "#" to end of line ;
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use hamkit::expr::{parse_expression, Chart, ExprError, RationalFunction};
use hamkit::geom::{parse_field, parse_form, parse_tensor, DifferentialForm, GeomError, StructureKind, Tensor11, VectorField};
use hamkit::linfact::ExactMatrix;
use hamkit::torus::FrequencySpec;
use num_rational::BigRational;

/// A problem in a system file, at a byte offset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DslError {
    pub offset: usize,
    pub message: String,
}

impl DslError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        DslError { offset, message: message.into() }
    }

    fn geom(e: GeomError, offset: usize) -> Self {
        let pos = e.position().unwrap_or(0);
        DslError::new(offset + pos, e.to_string())
    }

    fn expr(e: ExprError, offset: usize) -> Self {
        let pos = match &e {
            ExprError::Syntax { pos, .. } | ExprError::UnknownIdentifier { pos, .. } => *pos,
            ExprError::DivisionByZero { pos } => pos.unwrap_or(0),
            _ => 0,
        };
        DslError::new(offset + pos, e.to_string())
    }
}

/// A [`DslError`] placed at a line and column (both 1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn locate(source: &str, e: DslError) -> Self {
        let offset = e.offset.min(source.len());
        let before = &source[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        ParseError { line, column, message: e.message }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

#[derive(Clone, Debug)]
pub enum Object {
    Function(RationalFunction),
    Form(DifferentialForm),
    Field(VectorField),
    Tensor(Tensor11),
    Matrix(ExactMatrix),
    Frequencies(FrequencySpec),
}

impl Object {
    fn kind(&self) -> &'static str {
        match self {
            Object::Function(_) => "function",
            Object::Form(_) => "form",
            Object::Field(_) => "field",
            Object::Tensor(_) => "tensor",
            Object::Matrix(_) => "matrix",
            Object::Frequencies(_) => "frequencies",
        }
    }
}

#[derive(Clone, Debug)]
pub enum Analysis {
    Verify { field: VectorField, form: DifferentialForm, hamiltonian: RationalFunction },
    Factorize { matrix: ExactMatrix },
    AltgenMatrix { matrix: ExactMatrix, power: u32, lambda: BigRational },
    AltgenTensor { field: VectorField, tensor: Tensor11, function: RationalFunction },
    AltgenSymmetry { field: VectorField, symmetry: VectorField, form: DifferentialForm, hamiltonian: RationalFunction },
    Resonance { spec: FrequencySpec },
    Period { hamiltonian: RationalFunction, energies: Vec<f64>, seeds: usize, rel_tol: f64 },
    NormalForm { field: VectorField, integrals: Vec<RationalFunction>, fields: Vec<VectorField>, nu: Option<Vec<RationalFunction>> },
    Validate { structure: StructureKind },
}

#[derive(Clone, Debug)]
pub struct Request {
    /// Block keyword: the subcommand that runs it.
    pub command: String,
    pub name: String,
    pub analysis: Analysis,
}

#[derive(Clone, Debug)]
pub struct SystemFile {
    pub chart: Arc<Chart>,
    pub objects: BTreeMap<String, Object>,
    pub requests: Vec<Request>,
}

impl SystemFile {
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        Parser::new(source).file().map_err(|e| ParseError::locate(source, e))
    }

    pub fn requests_for<'a>(&'a self, command: &'a str) -> impl Iterator<Item = &'a Request> + 'a {
        self.requests.iter().filter(move |r| r.command == command)
    }
}

const OBJECT_KINDS: [&str; 6] = ["function", "hamiltonian", "form", "field", "tensor", "matrix"];
const REQUEST_KINDS: [&str; 7] = ["verify", "factorize", "altgen", "resonance", "period", "normalform", "validate"];

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    chart: Option<Arc<Chart>>,
    coords: Vec<String>,
    constants: Vec<String>,
    chart_offset: usize,
    objects: BTreeMap<String, Object>,
    requests: Vec<Request>,
    block_counts: BTreeMap<String, usize>,
}

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn is_ident(s: &str) -> bool {
    let b = s.as_bytes();
    !b.is_empty() && is_ident_start(b[0]) && b.iter().all(|c| c.is_ascii_alphanumeric() || *c == b'_')
}

/// Entries of a block: key → (value, offset of the value).
type Entries<'a> = BTreeMap<String, (&'a str, usize)>;

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src,
            pos: 0,
            chart: None,
            coords: Vec::new(),
            constants: Vec::new(),
            chart_offset: 0,
            objects: BTreeMap::new(),
            requests: Vec::new(),
            block_counts: BTreeMap::new(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_ascii_whitespace() {
                self.pos += 1;
            } else if c == b'#' {
                while let Some(c) = self.peek() {
                    if c == b'\n' {
                        break;
                    }
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn ident(&mut self) -> Result<(&'a str, usize), DslError> {
        self.skip_trivia();
        let start = self.pos;
        if !self.peek().is_some_and(is_ident_start) {
            return Err(DslError::new(start, "expected an identifier"));
        }
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        Ok((&self.src[start..self.pos], start))
    }

    fn expect(&mut self, c: u8) -> Result<(), DslError> {
        self.skip_trivia();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(DslError::new(self.pos, format!("expected '{}'", c as char)))
        }
    }

    /// Raw text up to a `;` (consumed) or `}` (left in place) outside
    /// brackets, trimmed, with its offset.
    fn value(&mut self, allow_brace_end: bool) -> Result<(&'a str, usize), DslError> {
        let start = self.pos;
        let mut depth = 0i32;
        let bytes = self.src.as_bytes();
        loop {
            let Some(&c) = bytes.get(self.pos) else {
                return Err(DslError::new(self.pos, "unexpected end of file: missing ';'"));
            };
            match c {
                b'(' | b'[' => depth += 1,
                b')' | b']' => {
                    depth -= 1;
                    if depth < 0 {
                        return Err(DslError::new(self.pos, "unbalanced bracket"));
                    }
                }
                b'#' => return Err(DslError::new(self.pos, "comment inside a value")),
                b';' if depth == 0 => break,
                b'}' if depth == 0 && allow_brace_end => break,
                b'{' | b'}' => return Err(DslError::new(self.pos, format!("unexpected '{}'", c as char))),
                _ => {}
            }
            self.pos += 1;
        }
        let raw = &self.src[start..self.pos];
        if bytes[self.pos] == b';' {
            self.pos += 1;
        }
        let lead = raw.len() - raw.trim_start().len();
        let text = raw.trim();
        if text.is_empty() {
            return Err(DslError::new(start, "empty value"));
        }
        Ok((text, start + lead))
    }

    fn file(mut self) -> Result<SystemFile, DslError> {
        loop {
            self.skip_trivia();
            if self.peek().is_none() {
                break;
            }
            let (kw, at) = self.ident()?;
            match kw {
                "chart" => self.chart_statement(at)?,
                "constants" => self.constants_statement(at)?,
                k if OBJECT_KINDS.contains(&k) => self.definition(k, at)?,
                "frequencies" => self.frequencies_block(at)?,
                k if REQUEST_KINDS.contains(&k) => self.request_block(k, at)?,
                other => return Err(DslError::new(at, format!("unknown statement '{other}'"))),
            }
        }
        let chart = self.chart.ok_or_else(|| DslError::new(0, "no chart declared"))?;
        Ok(SystemFile { chart, objects: self.objects, requests: self.requests })
    }

    fn ident_list(&mut self) -> Result<Vec<(&'a str, usize)>, DslError> {
        let mut names = vec![self.ident()?];
        loop {
            self.skip_trivia();
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                    names.push(self.ident()?);
                }
                Some(b';') => {
                    self.pos += 1;
                    return Ok(names);
                }
                _ => return Err(DslError::new(self.pos, "expected ',' or ';'")),
            }
        }
    }

    fn rebuild_chart(&mut self, at: usize) -> Result<(), DslError> {
        let chart = Chart::with_constants(&self.coords, &self.constants).map_err(|e| DslError::new(at, e.to_string()))?;
        self.chart = Some(Arc::new(chart));
        Ok(())
    }

    fn chart_statement(&mut self, at: usize) -> Result<(), DslError> {
        if self.chart.is_some() {
            return Err(DslError::new(at, "only one chart per file"));
        }
        self.coords = self.ident_list()?.into_iter().map(|(n, _)| n.to_string()).collect();
        self.chart_offset = at;
        self.rebuild_chart(at)
    }

    fn constants_statement(&mut self, at: usize) -> Result<(), DslError> {
        if self.chart.is_none() {
            return Err(DslError::new(at, "constants must follow the chart declaration"));
        }
        if !self.objects.is_empty() {
            return Err(DslError::new(at, "constants must be declared before any object"));
        }
        let names = self.ident_list()?;
        self.constants.extend(names.into_iter().map(|(n, _)| n.to_string()));
        self.rebuild_chart(at)
    }

    fn chart_or_err(&self, at: usize) -> Result<Arc<Chart>, DslError> {
        self.chart.clone().ok_or_else(|| DslError::new(at, "chart must be declared before use"))
    }

    fn declare(&mut self, name: &str, at: usize, obj: Object) -> Result<(), DslError> {
        if self.coords.iter().chain(&self.constants).any(|c| c == name) {
            return Err(DslError::new(at, format!("'{name}' is already a chart variable")));
        }
        if self.objects.contains_key(name) {
            return Err(DslError::new(at, format!("'{name}' is already defined")));
        }
        self.objects.insert(name.to_string(), obj);
        Ok(())
    }

    fn definition(&mut self, kind: &str, at: usize) -> Result<(), DslError> {
        let chart = self.chart_or_err(at)?;
        let (name, name_at) = self.ident()?;
        self.expect(b'=')?;
        self.skip_trivia();
        let (text, off) = self.value(false)?;
        let obj = match kind {
            "function" | "hamiltonian" => Object::Function(parse_function(text, off, &chart)?),
            "form" => Object::Form(parse_form(text, &chart).map_err(|e| DslError::geom(e, off))?),
            "field" => Object::Field(parse_field(text, &chart).map_err(|e| DslError::geom(e, off))?),
            "tensor" => Object::Tensor(parse_tensor(text, &chart).map_err(|e| DslError::geom(e, off))?),
            _ => Object::Matrix(parse_matrix(text, off)?),
        };
        self.declare(name, name_at, obj)
    }

    fn block_name(&mut self, kind: &str) -> Result<(String, usize), DslError> {
        self.skip_trivia();
        let count = self.block_counts.entry(kind.to_string()).or_insert(0);
        *count += 1;
        let default = if *count == 1 { kind.to_string() } else { format!("{kind}_{count}") };
        if self.peek() == Some(b'{') {
            return Ok((default, self.pos));
        }
        let (name, at) = self.ident()?;
        Ok((name.to_string(), at))
    }

    fn entries(&mut self) -> Result<Entries<'a>, DslError> {
        self.expect(b'{')?;
        let mut out = Entries::new();
        loop {
            self.skip_trivia();
            if self.peek() == Some(b'}') {
                self.pos += 1;
                return Ok(out);
            }
            let (key, at) = self.ident()?;
            self.expect(b':')?;
            self.skip_trivia();
            let v = self.value(true)?;
            if out.insert(key.to_string(), v).is_some() {
                return Err(DslError::new(at, format!("duplicate key '{key}'")));
            }
        }
    }

    fn frequencies_block(&mut self, at: usize) -> Result<(), DslError> {
        self.chart_or_err(at)?;
        let (name, name_at) = self.block_name("frequencies")?;
        let mut e = self.entries()?;
        let (basis_text, boff) = take(&mut e, "basis", name_at)?;
        let (omega_text, ooff) = take(&mut e, "omega", name_at)?;
        no_extra(&e)?;
        let basis: Vec<String> = split_list(basis_text, boff)?.into_iter().map(|(_, s)| s.to_string()).collect();
        if let Some(dup) = basis.iter().enumerate().find(|(i, b)| basis[..*i].contains(b)) {
            return Err(DslError::new(boff, format!("basis symbol '{}' repeated", dup.1)));
        }
        let rows = split_list(omega_text, ooff)?
            .into_iter()
            .map(|(o, row)| split_list(row, o)?.into_iter().map(|(p, v)| parse_rational(v, p)).collect())
            .collect::<Result<Vec<Vec<BigRational>>, DslError>>()?;
        let spec = FrequencySpec::new(basis, rows).map_err(|e| DslError::new(ooff, e.to_string()))?;
        self.declare(&name, name_at, Object::Frequencies(spec))
    }

    fn request_block(&mut self, kind: &str, at: usize) -> Result<(), DslError> {
        let chart = self.chart_or_err(at)?;
        let (name, name_at) = self.block_name(kind)?;
        if self.requests.iter().any(|r| r.name == name) {
            return Err(DslError::new(name_at, format!("request '{name}' is already defined")));
        }
        let mut e = self.entries()?;
        let r = Resolver { objects: &self.objects, chart: &chart };
        let analysis = match kind {
            "verify" => Analysis::Verify {
                field: r.field(take(&mut e, "field", name_at)?)?,
                form: r.form(take(&mut e, "form", name_at)?)?,
                hamiltonian: r.function(take(&mut e, "hamiltonian", name_at)?)?,
            },
            "factorize" => Analysis::Factorize { matrix: r.matrix(take(&mut e, "matrix", name_at)?)? },
            "altgen" if e.contains_key("matrix") => Analysis::AltgenMatrix {
                matrix: r.matrix(take(&mut e, "matrix", name_at)?)?,
                power: match e.remove("power") {
                    Some((t, o)) => t.parse().map_err(|_| DslError::new(o, "power must be a non-negative integer"))?,
                    None => 1,
                },
                lambda: match e.remove("lambda") {
                    Some((t, o)) => parse_rational(t, o)?,
                    None => BigRational::from_integer(1.into()),
                },
            },
            "altgen" if e.contains_key("tensor") => Analysis::AltgenTensor {
                field: r.field(take(&mut e, "field", name_at)?)?,
                tensor: r.tensor(take(&mut e, "tensor", name_at)?)?,
                function: r.function(take(&mut e, "function", name_at)?)?,
            },
            "altgen" if e.contains_key("symmetry") => Analysis::AltgenSymmetry {
                field: r.field(take(&mut e, "field", name_at)?)?,
                symmetry: r.field(take(&mut e, "symmetry", name_at)?)?,
                form: r.form(take(&mut e, "form", name_at)?)?,
                hamiltonian: r.function(take(&mut e, "hamiltonian", name_at)?)?,
            },
            "altgen" => return Err(DslError::new(name_at, "altgen needs a 'matrix', 'tensor' or 'symmetry' entry")),
            "resonance" => {
                let (t, o) = take(&mut e, "frequencies", name_at)?;
                match self.objects.get(t) {
                    Some(Object::Frequencies(s)) => Analysis::Resonance { spec: s.clone() },
                    Some(other) => return Err(kind_error(t, o, other, "frequencies")),
                    None => return Err(DslError::new(o, format!("unknown name '{t}'"))),
                }
            }
            "period" => {
                let hamiltonian = r.function(take(&mut e, "hamiltonian", name_at)?)?;
                let (t, o) = take(&mut e, "energies", name_at)?;
                let energies =
                    split_list(t, o)?.into_iter().map(|(p, v)| parse_float(v, p)).collect::<Result<Vec<f64>, _>>()?;
                let seeds = match e.remove("seeds") {
                    Some((t, o)) => t.parse().map_err(|_| DslError::new(o, "seeds must be a non-negative integer"))?,
                    None => 3,
                };
                let rel_tol = match e.remove("rel_tol") {
                    Some((t, o)) => parse_float(t, o)?,
                    None => 1e-6,
                };
                Analysis::Period { hamiltonian, energies, seeds, rel_tol }
            }
            "normalform" => {
                let field = r.field(take(&mut e, "field", name_at)?)?;
                let (t, o) = take(&mut e, "integrals", name_at)?;
                let integrals = split_list(t, o)?.into_iter().map(|(p, v)| r.function((v, p))).collect::<Result<_, _>>()?;
                let (t, o) = take(&mut e, "fields", name_at)?;
                let fields = split_list(t, o)?.into_iter().map(|(p, v)| r.field((v, p))).collect::<Result<_, _>>()?;
                let nu = match e.remove("nu") {
                    Some((t, o)) => Some(split_list(t, o)?.into_iter().map(|(p, v)| r.function((v, p))).collect::<Result<_, _>>()?),
                    None => None,
                };
                Analysis::NormalForm { field, integrals, fields, nu }
            }
            _ => {
                let (t, o) = take(&mut e, "structure", name_at)?;
                let structure = match t {
                    "tangent" => StructureKind::Tangent {
                        s: r.tensor(take(&mut e, "tensor", name_at)?)?,
                        delta: r.field(take(&mut e, "field", name_at)?)?,
                    },
                    "cotangent" => StructureKind::Cotangent {
                        theta: r.form(take(&mut e, "form", name_at)?)?,
                        delta: r.field(take(&mut e, "field", name_at)?)?,
                    },
                    "linear" => StructureKind::Linear { delta: r.field(take(&mut e, "field", name_at)?)? },
                    other => {
                        return Err(DslError::new(o, format!("unknown structure '{other}' (tangent, cotangent, linear)")))
                    }
                };
                Analysis::Validate { structure }
            }
        };
        no_extra(&e)?;
        self.requests.push(Request { command: kind.to_string(), name, analysis });
        Ok(())
    }
}

fn take<'a>(e: &mut Entries<'a>, key: &str, at: usize) -> Result<(&'a str, usize), DslError> {
    e.remove(key).ok_or_else(|| DslError::new(at, format!("missing entry '{key}'")))
}

fn no_extra(e: &Entries<'_>) -> Result<(), DslError> {
    match e.iter().next() {
        Some((k, (_, o))) => Err(DslError::new(*o, format!("unexpected entry '{k}'"))),
        None => Ok(()),
    }
}

fn kind_error(name: &str, at: usize, obj: &Object, expected: &str) -> DslError {
    DslError::new(at, format!("'{name}' is a {}, expected a {expected}", obj.kind()))
}

/// Looks names up first and parses inline values otherwise.
struct Resolver<'a> {
    objects: &'a BTreeMap<String, Object>,
    chart: &'a Arc<Chart>,
}

impl Resolver<'_> {
    fn named(&self, text: &str) -> Option<&Object> {
        if is_ident(text) {
            self.objects.get(text)
        } else {
            None
        }
    }

    fn function(&self, (t, o): (&str, usize)) -> Result<RationalFunction, DslError> {
        match self.named(t) {
            Some(Object::Function(f)) => Ok(f.clone()),
            Some(other) => Err(kind_error(t, o, other, "function")),
            None => parse_function(t, o, self.chart),
        }
    }

    fn form(&self, (t, o): (&str, usize)) -> Result<DifferentialForm, DslError> {
        match self.named(t) {
            Some(Object::Form(f)) => Ok(f.clone()),
            // A function is a 0-form.
            Some(Object::Function(f)) => Ok(DifferentialForm::function(self.chart, f.clone())),
            Some(other) => Err(kind_error(t, o, other, "form")),
            None => parse_form(t, self.chart).map_err(|e| DslError::geom(e, o)),
        }
    }

    fn field(&self, (t, o): (&str, usize)) -> Result<VectorField, DslError> {
        match self.named(t) {
            Some(Object::Field(f)) => Ok(f.clone()),
            Some(other) => Err(kind_error(t, o, other, "field")),
            None if is_ident(t) => Err(DslError::new(o, format!("unknown name '{t}'"))),
            None => parse_field(t, self.chart).map_err(|e| DslError::geom(e, o)),
        }
    }

    fn tensor(&self, (t, o): (&str, usize)) -> Result<Tensor11, DslError> {
        match self.named(t) {
            Some(Object::Tensor(x)) => Ok(x.clone()),
            Some(other) => Err(kind_error(t, o, other, "tensor")),
            None if is_ident(t) => Err(DslError::new(o, format!("unknown name '{t}'"))),
            None => parse_tensor(t, self.chart).map_err(|e| DslError::geom(e, o)),
        }
    }

    fn matrix(&self, (t, o): (&str, usize)) -> Result<ExactMatrix, DslError> {
        match self.named(t) {
            Some(Object::Matrix(m)) => Ok(m.clone()),
            Some(other) => Err(kind_error(t, o, other, "matrix")),
            None if is_ident(t) => Err(DslError::new(o, format!("unknown name '{t}'"))),
            None => parse_matrix(t, o),
        }
    }
}

fn parse_function(text: &str, off: usize, chart: &Arc<Chart>) -> Result<RationalFunction, DslError> {
    parse_expression(text, chart).map_err(|e| DslError::expr(e, off))
}

fn parse_rational(text: &str, off: usize) -> Result<BigRational, DslError> {
    let t = text.trim();
    let r = BigRational::from_str(t).map_err(|_| DslError::new(off, format!("'{t}' is not a rational number")))?;
    Ok(r)
}

fn parse_float(text: &str, off: usize) -> Result<f64, DslError> {
    let t = text.trim();
    t.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .or_else(|| parse_rational(t, off).ok().map(|r| hamkit::expr::rational_to_f64(&r)))
        .ok_or_else(|| DslError::new(off, format!("'{t}' is not a number")))
}

fn parse_matrix(text: &str, off: usize) -> Result<ExactMatrix, DslError> {
    let rows = split_list(text, off)?
        .into_iter()
        .map(|(o, row)| split_list(row, o)?.into_iter().map(|(p, v)| parse_rational(v, p)).collect())
        .collect::<Result<Vec<Vec<BigRational>>, DslError>>()?;
    ExactMatrix::new(rows).map_err(|e| DslError::new(off, e.to_string()))
}

/// Splits `[a, b, …]` at top-level commas into trimmed items with offsets.
fn split_list(text: &str, off: usize) -> Result<Vec<(usize, &str)>, DslError> {
    let t = text.trim();
    let lead = text.len() - text.trim_start().len();
    if !t.starts_with('[') || !t.ends_with(']') {
        return Err(DslError::new(off + lead, "expected '[ ... ]'"));
    }
    let inner = &t[1..t.len() - 1];
    let base = off + lead + 1;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let bytes = inner.as_bytes();
    for i in 0..=bytes.len() {
        let c = bytes.get(i).copied();
        match c {
            Some(b'(' | b'[') => depth += 1,
            Some(b')' | b']') => depth -= 1,
            Some(b',') | None if depth == 0 => {
                let piece = &inner[start..i];
                let l = piece.len() - piece.trim_start().len();
                if piece.trim().is_empty() {
                    return Err(DslError::new(base + start, "empty list item"));
                }
                out.push((base + start + l, piece.trim()));
                start = i + 1;
            }
            _ => {}
        }
    }
    Ok(out)
}
