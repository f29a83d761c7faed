//! Scenario files: TOML documents describing a tower, a space and a Galois action.
//!
//! Literals are strings. Value-group elements use `3^(-1)`, `1/2`; field elements are
//! polynomials in the generator `a`; series are expressions in `T1, T2, …`, `s`, `t`
//! and `a`, optionally ending in a tail declaration `O[(1, 1): 3^(-5)]`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use toml::Spanned;

use crate::descent::{synth, GaloisScenario, DEFAULT_MAX_ITER};
use crate::error::{Error, Result};
use crate::finite_field::{FiniteField, Fq};
use crate::laurent::{Laurent, Tower};
use crate::tate::{Domain, Tail, TateSeries};
use crate::value_group::{Gamma, Point, ValueOrZero};
use crate::zshape::{ConvexPiece, ZAffineForm, ZPolytope, ZShape};

/// A parsed scenario with its free-text description.
#[derive(Clone, Debug)]
pub struct ScenarioFile {
    pub scenario: GaloisScenario,
    pub description: String,
}

/// Settings for producing random twists.
#[derive(Clone, Debug)]
pub struct GeneratorConfig {
    pub name: String,
    pub seed: u64,
    pub count: usize,
    pub tower: Tower,
    pub domain: Domain,
}

#[derive(Clone, Debug)]
pub enum Document {
    Scenario(Box<ScenarioFile>),
    Generator(GeneratorConfig),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    name: String,
    #[serde(default)]
    description: String,
    field: RawField,
    space: RawSpace,
    #[serde(default)]
    action: Vec<RawAction>,
    #[serde(default)]
    options: RawOptions,
    generator: Option<RawGenerator>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    p: u32,
    #[serde(default = "one_u32")]
    f: u32,
    #[serde(default = "one_u32")]
    m: u32,
    #[serde(default = "one_u32")]
    e: u32,
    t_abs: Option<Spanned<String>>,
    zeta: Option<Spanned<String>>,
}

fn one_u32() -> u32 {
    1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpace {
    kind: Spanned<String>,
    radii: Option<Vec<Spanned<String>>>,
    interval: Option<Vec<Spanned<String>>>,
    point: Option<Vec<Spanned<String>>>,
    #[serde(rename = "box")]
    boxed: Option<RawBox>,
    polytopes: Option<Vec<RawPolytope>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBox {
    lo: Vec<Spanned<String>>,
    hi: Vec<Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolytope {
    pieces: Vec<RawPiece>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPiece {
    #[serde(default)]
    forms: Vec<RawForm>,
    vertices: Vec<Vec<Spanned<String>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawForm {
    exps: Vec<i64>,
    constant: Spanned<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAction {
    element: Spanned<RawElement>,
    images: Vec<Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawElement {
    Index(usize),
    Parts(Vec<u32>),
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOptions {
    epsilon: Option<Spanned<String>>,
    max_iter: Option<usize>,
    target: Option<Vec<Spanned<String>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenerator {
    seed: u64,
    count: usize,
}

/// Line and column (1-based) of a byte offset.
fn locate(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

struct Ctx<'a> {
    src: &'a str,
}

impl Ctx<'_> {
    fn error_at(&self, offset: usize, message: impl Into<String>) -> Error {
        let (line, column) = locate(self.src, offset);
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    /// Re-anchors an error raised while reading a string literal.
    fn at<T>(&self, lit: &Spanned<String>, r: Result<T>) -> Result<T> {
        r.map_err(|e| {
            let (inner, message) = match e {
                Error::Parse { column, message, .. } => (column.saturating_sub(1), message),
                other => (0, other.to_string()),
            };
            self.error_at(lit.span().start + 1 + inner, message)
        })
    }

    fn gamma(&self, lit: &Spanned<String>) -> Result<Gamma> {
        self.at(lit, lit.get_ref().parse::<Gamma>())
    }

    fn point(&self, lits: &[Spanned<String>]) -> Result<Point> {
        lits.iter().map(|l| self.gamma(l)).collect()
    }
}

pub fn parse_document(src: &str) -> Result<Document> {
    let raw: RawDocument = toml::from_str(src).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| locate(src, s.start));
        Error::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    let ctx = Ctx { src };
    let field = &raw.field;
    let t_abs = match &field.t_abs {
        Some(l) => ctx.gamma(l)?,
        None => Gamma::from_ratio(1, u64::from(field.p)),
    };
    let zeta = match &field.zeta {
        Some(l) => {
            let ff = FiniteField::get(field.p, field.f * field.m)?;
            Some(ctx.at(l, parse_fq(ff, l.get_ref()))?)
        }
        None => None,
    };
    let tower = Tower::new(field.p, field.f, field.m, field.e, t_abs, zeta)?;
    let domain = parse_space(&ctx, &raw.space)?;
    let n = domain.dim();
    if let Some(g) = raw.generator {
        return Ok(Document::Generator(GeneratorConfig {
            name: raw.name,
            seed: g.seed,
            count: g.count,
            tower,
            domain,
        }));
    }
    let mut action = Vec::with_capacity(raw.action.len());
    for a in &raw.action {
        let element = match a.element.get_ref() {
            RawElement::Index(i) => *i,
            RawElement::Parts(parts) if parts.len() == 2 => tower
                .element(parts[0], parts[1])
                .map_err(|e| ctx.error_at(a.element.span().start, e.to_string()))?,
            RawElement::Parts(_) => {
                return Err(ctx.error_at(a.element.span().start, "element must be [j, a] or an index"))
            }
        };
        let images = a
            .images
            .iter()
            .map(|l| ctx.at(l, parse_series(&tower, n, l.get_ref())))
            .collect::<Result<Vec<_>>>()?;
        action.push((element, images));
    }
    let opts = &raw.options;
    let eps = match &opts.epsilon {
        Some(l) => ctx.gamma(l)?,
        None => tower.t_abs().powi(32),
    };
    let max_iter = opts.max_iter.unwrap_or(DEFAULT_MAX_ITER);
    let mut scenario = GaloisScenario::new(raw.name, tower, domain, action)?.with_precision(eps, max_iter);
    if let Some(t) = &opts.target {
        scenario = scenario.with_target(ctx.point(t)?);
    }
    Ok(Document::Scenario(Box::new(ScenarioFile {
        scenario,
        description: raw.description,
    })))
}

pub fn parse_scenario(src: &str) -> Result<ScenarioFile> {
    match parse_document(src)? {
        Document::Scenario(s) => Ok(*s),
        Document::Generator(_) => Err(Error::InvalidScenario(
            "this is a generator configuration; use `generate`".into(),
        )),
    }
}

fn parse_space(ctx: &Ctx, space: &RawSpace) -> Result<Domain> {
    match space.kind.get_ref().as_str() {
        "polydisc" => {
            let radii = space
                .radii
                .as_ref()
                .ok_or_else(|| ctx.error_at(space.kind.span().start, "a polydisc needs `radii`"))?;
            Ok(Domain::Polydisc(ctx.point(radii)?))
        }
        "lace" => {
            let at = space.kind.span().start;
            let shape = if let Some(i) = &space.interval {
                if i.len() != 2 {
                    return Err(ctx.error_at(at, "`interval` takes [lo, hi]"));
                }
                ZShape::interval(ctx.gamma(&i[0])?, ctx.gamma(&i[1])?)
            } else if let Some(p) = &space.point {
                ZShape::point(&ctx.point(p)?)
            } else if let Some(b) = &space.boxed {
                ZShape::boxed(&ctx.point(&b.lo)?, &ctx.point(&b.hi)?)
            } else if let Some(polys) = &space.polytopes {
                let mut polytopes = Vec::with_capacity(polys.len());
                for poly in polys {
                    let mut pieces = Vec::with_capacity(poly.pieces.len());
                    for piece in &poly.pieces {
                        let forms = piece
                            .forms
                            .iter()
                            .map(|f| Ok(ZAffineForm::new(f.exps.clone(), ctx.gamma(&f.constant)?)))
                            .collect::<Result<Vec<_>>>()?;
                        let vertices = piece
                            .vertices
                            .iter()
                            .map(|v| ctx.point(v))
                            .collect::<Result<Vec<_>>>()?;
                        pieces.push(ConvexPiece::new(forms, vertices).map_err(|e| ctx.error_at(at, e.to_string()))?);
                    }
                    polytopes.push(ZPolytope::new(pieces).map_err(|e| ctx.error_at(at, e.to_string()))?);
                }
                ZShape::new(polytopes)
            } else {
                return Err(ctx.error_at(at, "a lace needs `interval`, `point`, `box` or `polytopes`"));
            };
            Ok(Domain::Lace(shape.map_err(|e| ctx.error_at(at, e.to_string()))?))
        }
        other => Err(ctx.error_at(
            space.kind.span().start,
            format!("unknown space kind `{other}`"),
        )),
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Int(i64),
    Gen,
    S,
    T,
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Tail(String),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |pos: usize, m: String| Error::Parse {
        line: 1,
        column: src[..pos].chars().count() + 1,
        message: m,
    };
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            ' ' | '\t' => {
                i += 1;
                continue;
            }
            '0'..='9' => {
                let mut j = i;
                while j < chars.len() && chars[j].1.is_ascii_digit() {
                    j += 1;
                }
                let end = chars.get(j).map_or(src.len(), |x| x.0);
                let v = src[pos..end]
                    .parse()
                    .map_err(|_| err(pos, "integer too large".into()))?;
                out.push((pos, Token::Int(v)));
                i = j;
                continue;
            }
            'T' => {
                let mut j = i + 1;
                while j < chars.len() && chars[j].1.is_ascii_digit() {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(err(pos, "variable needs an index, as in T1".into()));
                }
                let end = chars.get(j).map_or(src.len(), |x| x.0);
                let k: usize = src[pos + 1..end]
                    .parse()
                    .map_err(|_| err(pos, "bad variable index".into()))?;
                if k == 0 {
                    return Err(err(pos, "variables are numbered from T1".into()));
                }
                out.push((pos, Token::Var(k - 1)));
                i = j;
                continue;
            }
            'O' => {
                let rest = &src[pos..];
                let close = rest
                    .find(']')
                    .filter(|_| rest[1..].starts_with('['))
                    .ok_or_else(|| err(pos, "tail must read O[point: bound; …]".into()))?;
                out.push((pos, Token::Tail(rest[2..close].to_string())));
                let end = pos + close + 1;
                while i < chars.len() && chars[i].0 < end {
                    i += 1;
                }
                continue;
            }
            'a' => out.push((pos, Token::Gen)),
            's' => out.push((pos, Token::S)),
            't' => out.push((pos, Token::T)),
            '+' => out.push((pos, Token::Plus)),
            '-' => out.push((pos, Token::Minus)),
            '*' => out.push((pos, Token::Star)),
            '^' => out.push((pos, Token::Caret)),
            '(' => out.push((pos, Token::LParen)),
            ')' => out.push((pos, Token::RParen)),
            _ => return Err(err(pos, format!("unexpected character `{c}`"))),
        }
        i += 1;
    }
    Ok(out)
}

struct SeriesParser<'a> {
    src: &'a str,
    tokens: Vec<(usize, Token)>,
    pos: usize,
    tower: &'a Tower,
    n: usize,
}

impl SeriesParser<'_> {
    fn err(&self, m: impl Into<String>) -> Error {
        let at = self.tokens.get(self.pos).map_or(self.src.len(), |t| t.0);
        Error::Parse {
            line: 1,
            column: self.src[..at].chars().count() + 1,
            message: m.into(),
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|t| &t.1)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|t| t.1.clone());
        self.pos += 1;
        t
    }

    fn constant(&self, c: Laurent) -> TateSeries {
        TateSeries::constant(self.tower, self.n, c)
    }

    fn expr(&mut self) -> Result<TateSeries> {
        let mut acc = if self.peek() == Some(&Token::Minus) {
            self.next();
            self.term()?.neg()
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.next();
                    acc = acc.add(&self.term()?);
                }
                Some(Token::Minus) => {
                    self.next();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<TateSeries> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.next();
                    acc = acc.mul(&self.factor()?);
                }
                Some(Token::Int(_) | Token::Gen | Token::S | Token::T | Token::Var(_) | Token::LParen) => {
                    acc = acc.mul(&self.factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn exponent(&mut self) -> Result<i64> {
        let paren = self.peek() == Some(&Token::LParen);
        if paren {
            self.next();
        }
        let neg = self.peek() == Some(&Token::Minus);
        if neg {
            self.next();
        }
        let k = match self.next() {
            Some(Token::Int(k)) => k,
            _ => {
                self.pos -= 1;
                return Err(self.err("expected an integer exponent"));
            }
        };
        if paren && self.next() != Some(Token::RParen) {
            self.pos -= 1;
            return Err(self.err("expected `)`"));
        }
        Ok(if neg { -k } else { k })
    }

    fn factor(&mut self) -> Result<TateSeries> {
        let field = self.tower.field();
        let e = i64::from(self.tower.degrees().2);
        let base = match self.next() {
            Some(Token::Int(v)) => self.constant(Laurent::constant(field.from_int(v))),
            Some(Token::Gen) => self.constant(Laurent::constant(field.generator())),
            Some(Token::S) => self.constant(Laurent::monomial(field.one(), 1)),
            Some(Token::T) => self.constant(Laurent::monomial(field.one(), e)),
            Some(Token::Var(k)) => {
                if k >= self.n {
                    self.pos -= 1;
                    return Err(self.err(format!("T{} exceeds the {} variables", k + 1, self.n)));
                }
                TateSeries::var(self.tower, self.n, k)
            }
            Some(Token::LParen) => {
                let inner = self.expr()?;
                if self.next() != Some(Token::RParen) {
                    self.pos -= 1;
                    return Err(self.err("expected `)`"));
                }
                inner
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                return Err(self.err("expected a term"));
            }
        };
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        self.next();
        let k = self.exponent()?;
        if k >= 0 {
            let mut out = TateSeries::one(self.tower, self.n);
            for _ in 0..k {
                out = out.mul(&base);
            }
            return Ok(out);
        }
        let mono = base.terms().len() == 1 && base.terms().values().all(Laurent::is_monomial);
        if !mono || !base.is_exact() {
            return Err(self.err("negative powers apply to monomials only"));
        }
        let (exps, c) = base.terms().iter().next().expect("one term");
        let (v, u) = c.leading().expect("nonzero");
        let inv_exps: Vec<i64> = exps.iter().map(|x| x * k).collect();
        let inv = Laurent::monomial(u.inv().powi(-k), v * k);
        Ok(TateSeries::monomial(self.tower, self.n, inv, inv_exps))
    }

    fn tails(&self, body: &str) -> Result<Tail> {
        let mut list = Vec::new();
        for part in body.split(';').filter(|p| !p.trim().is_empty()) {
            let (pt, bound) = part
                .rsplit_once(':')
                .ok_or_else(|| self.err("tail entries read `(r1, …): bound`"))?;
            let pt = pt.trim();
            let inner = pt
                .strip_prefix('(')
                .and_then(|x| x.strip_suffix(')'))
                .ok_or_else(|| self.err("tail point must be parenthesized"))?;
            let point: Point = inner
                .split(',')
                .map(|x| x.trim().parse::<Gamma>())
                .collect::<Result<_>>()
                .map_err(|e| self.err(e.to_string()))?;
            if point.len() != self.n {
                return Err(self.err(format!("tail point has {} coordinates, expected {}", point.len(), self.n)));
            }
            let bound = bound.trim();
            let value = if bound == "0" {
                ValueOrZero::Zero
            } else {
                ValueOrZero::Value(bound.parse::<Gamma>().map_err(|e| self.err(e.to_string()))?)
            };
            list.push((point, value));
        }
        Ok(Tail::Bounded(list))
    }
}

/// Parses a series literal in `n` variables.
pub fn parse_series(tower: &Tower, n: usize, src: &str) -> Result<TateSeries> {
    let mut tokens = tokenize(src)?;
    let tail = match tokens.last() {
        Some((_, Token::Tail(_))) => {
            let (_, Token::Tail(body)) = tokens.pop().expect("present") else {
                unreachable!()
            };
            if tokens.last().map(|t| &t.1) != Some(&Token::Plus) {
                return Err(Error::parse("tail must follow ` + `"));
            }
            tokens.pop();
            Some(body)
        }
        _ => None,
    };
    let mut p = SeriesParser {
        src,
        tokens,
        pos: 0,
        tower,
        n,
    };
    let mut f = if p.tokens.is_empty() && tail.is_some() {
        return Err(p.err("a tail needs a stored part"));
    } else {
        p.expr()?
    };
    if p.pos < p.tokens.len() {
        return Err(p.err("unexpected token"));
    }
    if let Some(body) = tail {
        let t = p.tails(&body)?;
        f = f.with_tail(t);
    }
    Ok(f)
}

/// Parses a field element such as `2a+1`.
pub fn parse_fq(field: &'static FiniteField, src: &str) -> Result<Fq> {
    let tower = Tower::new(field.characteristic(), field.degree(), 1, 1, Gamma::from_ratio(1, 2), None)?;
    let f = parse_series(&tower, 0, src)?;
    match f.terms().get(&Vec::new()) {
        None if f.terms().is_empty() => Ok(field.zero()),
        Some(c) if f.terms().len() == 1 && c.terms().len() == 1 && c.terms().contains_key(&0) => Ok(c.coeff(0)),
        _ => Err(Error::parse(format!("`{src}` is not a field element"))),
    }
}

fn quote_point(p: &[Gamma]) -> String {
    let parts: Vec<String> = p.iter().map(|g| format!("\"{g}\"")).collect();
    format!("[{}]", parts.join(", "))
}

fn write_space(out: &mut String, domain: &Domain) {
    out.push_str("[space]\n");
    match domain {
        Domain::Polydisc(r) => {
            let _ = writeln!(out, "kind = \"polydisc\"\nradii = {}", quote_point(r));
        }
        Domain::Lace(u) => {
            out.push_str("kind = \"lace\"\n");
            for poly in u.polytopes() {
                out.push_str("\n[[space.polytopes]]\n");
                for piece in poly.pieces() {
                    out.push_str("[[space.polytopes.pieces]]\nforms = [\n");
                    for f in piece.constraints() {
                        let _ = writeln!(out, "  {{ exps = {:?}, constant = \"{}\" }},", f.exps, f.constant);
                    }
                    out.push_str("]\nvertices = [\n");
                    for v in piece.vertices() {
                        let _ = writeln!(out, "  {},", quote_point(v));
                    }
                    out.push_str("]\n");
                }
            }
        }
    }
}

fn write_field(out: &mut String, name: &str, description: &str, tower: &Tower) {
    let (f, m, e) = tower.degrees();
    let _ = writeln!(out, "name = \"{name}\"");
    if !description.is_empty() {
        let _ = writeln!(out, "description = \"{}\"", description.replace('\\', "\\\\").replace('"', "\\\""));
    }
    let _ = writeln!(
        out,
        "\n[field]\np = {}\nf = {f}\nm = {m}\ne = {e}\nt_abs = \"{}\"\nzeta = \"{}\"\n",
        tower.characteristic(),
        tower.t_abs(),
        tower.zeta()
    );
}

/// The canonical text of a scenario; parsing it gives back the same scenario.
pub fn print_scenario(file: &ScenarioFile) -> String {
    let scn = &file.scenario;
    let mut out = String::new();
    write_field(&mut out, &scn.name, &file.description, &scn.tower);
    write_space(&mut out, &scn.domain);
    for (g, images) in &scn.action {
        let (j, a) = scn.tower.element_parts(*g);
        let parts: Vec<String> = images.iter().map(|f| format!("\"{f}\"")).collect();
        let _ = writeln!(out, "\n[[action]]\nelement = [{j}, {a}]\nimages = [{}]", parts.join(", "));
    }
    let _ = writeln!(out, "\n[options]\nepsilon = \"{}\"\nmax_iter = {}", scn.eps, scn.max_iter);
    if let Some(t) = &scn.target {
        let _ = writeln!(out, "target = {}", quote_point(t));
    }
    out
}

pub fn print_generator(config: &GeneratorConfig) -> String {
    let mut out = String::new();
    write_field(&mut out, &config.name, "", &config.tower);
    write_space(&mut out, &config.domain);
    let _ = writeln!(out, "\n[generator]\nseed = {}\ncount = {}", config.seed, config.count);
    out
}

/// Random twists described by a generator configuration.
pub fn generate(config: &GeneratorConfig) -> Result<Vec<ScenarioFile>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    (0..config.count)
        .map(|i| {
            let name = format!("{}-{i:03}", config.name);
            let scenario = match &config.domain {
                Domain::Polydisc(r) => synth::polydisc_twist(&mut rng, &config.tower, r, &name)?,
                Domain::Lace(u) => synth::lace_twist(&mut rng, &config.tower, u, &name)?,
            };
            Ok(ScenarioFile {
                scenario,
                description: format!("random twist {i} from seed {}", config.seed),
            })
        })
        .collect()
}

/// A gallery entry: file name, contents and the verdict `descend` gives.
pub struct GalleryEntry {
    pub file: &'static str,
    pub contents: String,
    pub expected: Option<&'static str>,
}

pub fn gallery() -> Vec<GalleryEntry> {
    let entries: [(&str, &str, Option<&str>); 5] = [
        (
            "bidisc-shear.toml",
            r#"name = "bidisc-shear"
description = "Closed unit bidisc over F3((t)) split by F9. Frobenius fixes T1 and sends T2 to T2 + a*T1^2, whose reduction tau2 + a*tau1^2 is not affine."

[field]
p = 3
m = 2
t_abs = "1/3"

[space]
kind = "polydisc"
radii = ["1", "1"]

[[action]]
element = [1, 0]
images = ["T1", "T2 + a*T1^2"]
"#,
            Some("ObstructionNotResiduallyAffine"),
        ),
        (
            "annulus-swapped-ends.toml",
            r#"name = "annulus-swapped-ends"
description = "Annulus 1/2 <= |T| <= 2 over F3((t)) split by F9, with Frobenius exchanging the two ends: T -> 1/T. The action is not trivial on the lattice."

[field]
p = 3
m = 2
t_abs = "1/3"

[space]
kind = "lace"
interval = ["1/2", "2"]

[[action]]
element = [1, 0]
images = ["T1^-1"]
"#,
            Some("ObstructionLatticeNontrivial"),
        ),
        (
            "annulus-negated.toml",
            r#"name = "annulus-negated"
description = "Same annulus with sigma(T) = -T. The residue cocycle is -1 and the rescaled coordinate T/a is invariant."

[field]
p = 3
m = 2
t_abs = "1/3"

[space]
kind = "lace"
interval = ["1/2", "2"]

[[action]]
element = [1, 0]
images = ["-T1"]
"#,
            Some("Descends"),
        ),
        (
            "empty-gl-types.toml",
            r#"name = "empty-gl-types"
description = "Unit disc over F3((t)) compared with the disc of radius 2. Since 2 is not in |k^x| = 3^Z, GL(k~, (2), (1)) is empty and the types differ."

[field]
p = 3
t_abs = "1/3"

[space]
kind = "polydisc"
radii = ["1"]

[options]
target = ["2"]
"#,
            Some("NotIsomorphic"),
        ),
        (
            "generator.toml",
            r#"name = "ramified-annulus-twists"

[field]
p = 3
e = 2
t_abs = "1/3"

[space]
kind = "lace"
interval = ["1/2", "2"]

[generator]
seed = 2024
count = 5
"#,
            None,
        ),
    ];
    entries
        .into_iter()
        .map(|(file, contents, expected)| GalleryEntry {
            file,
            contents: contents.to_string(),
            expected,
        })
        .collect()
}

/// Series in a scenario, grouped by element, for quick inspection.
pub fn action_table(scn: &GaloisScenario) -> BTreeMap<usize, Vec<String>> {
    scn.action
        .iter()
        .map(|(g, images)| (*g, images.iter().map(|f| f.to_string()).collect()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descent::{descend, Verdict};

    fn f9() -> Tower {
        Tower::new(3, 1, 2, 1, Gamma::from_ratio(1, 3), None).unwrap()
    }

    #[test]
    fn series_literals() {
        let k = f9();
        let field = k.field();
        let f = parse_series(&k, 2, "T2 + a*T1^2").unwrap();
        assert_eq!(f.coeff(&[2, 0]), Laurent::constant(field.generator()));
        let g = parse_series(&k, 1, "-T1").unwrap();
        assert_eq!(g.coeff(&[1]), Laurent::constant(field.from_int(2)));
        let h = parse_series(&k, 1, "(2a+1)*s^-1*T1^-2 + t").unwrap();
        assert_eq!(h.coeff(&[-2]), Laurent::monomial(field.from_coeffs(&[1, 2]), -1));
        assert_eq!(h.coeff(&[0]), Laurent::monomial(field.one(), 1));
        let tail = parse_series(&k, 1, "T1 + O[(1): 3^(-5)]").unwrap();
        assert_eq!(tail.tail().at(&[Gamma::one()]), Some(ValueOrZero::Value(Gamma::from_ratio(1, 243))));
    }

    #[test]
    fn series_print_roundtrip() {
        let k = f9();
        for src in ["(2a+1) + a*T1*T2^-1", "2*s^-1*T2 + T1", "T1 + (1 + a*s)*T2^3 + O[(1, 1): 3^(-4); (1, 1/2): 0]"] {
            let f = parse_series(&k, 2, src).unwrap();
            assert_eq!(parse_series(&k, 2, &f.to_string()).unwrap(), f, "{src}");
        }
    }

    #[test]
    fn located_errors() {
        let k = f9();
        match parse_series(&k, 1, "T1 + T3") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 6),
            other => panic!("{other:?}"),
        }
        let src = "name = \"x\"\n[field]\np = 3\nm = 2\n[space]\nkind = \"polydisc\"\nradii = [\"1\"]\n[[action]]\nelement = [1, 0]\nimages = [\"T1 + %\"]\n";
        match parse_scenario(src) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (10, 17)),
            other => panic!("{other:?}"),
        }
        match parse_scenario("name = \"x\"\n[field]\np = 3\nbogus = 1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn field_elements() {
        let ff = FiniteField::get(3, 2).unwrap();
        assert_eq!(parse_fq(ff, "2a+1").unwrap(), ff.from_coeffs(&[1, 2]));
        assert_eq!(parse_fq(ff, "0").unwrap(), ff.zero());
        assert!(parse_fq(ff, "T1").is_err());
    }

    #[test]
    fn gallery_verdicts_and_roundtrip() {
        let entries = gallery();
        assert_eq!(entries.len(), 5);
        for entry in entries {
            match parse_document(&entry.contents).unwrap() {
                Document::Scenario(file) => {
                    let report = descend(&file.scenario).unwrap();
                    assert_eq!(Some(report.verdict.name()), entry.expected, "{}", entry.file);
                    let printed = print_scenario(&file);
                    let again = parse_scenario(&printed).unwrap();
                    assert_eq!(print_scenario(&again), printed);
                    assert_eq!(again.scenario.domain, file.scenario.domain);
                    assert_eq!(again.scenario.action, file.scenario.action);
                }
                Document::Generator(config) => {
                    assert!(entry.expected.is_none());
                    let printed = print_generator(&config);
                    assert!(matches!(parse_document(&printed).unwrap(), Document::Generator(_)));
                    for file in generate(&config).unwrap() {
                        let again = parse_scenario(&print_scenario(&file)).unwrap();
                        assert_eq!(descend(&again.scenario).unwrap().verdict, Verdict::Descends);
                    }
                }
            }
        }
    }
}
