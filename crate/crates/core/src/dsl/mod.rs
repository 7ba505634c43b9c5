//! Text format for user-supplied metrics and holomorphic maps.
//!
//! ```text
//! # Hopf metric on C² \ {0}
//! n = 2
//! domain = abs2(z1) + abs2(z2)
//! g[1][1] = 1 / (abs2(z1) + abs2(z2))
//! g[2][2] = 1 / (abs2(z1) + abs2(z2))
//! ```
//!
//! Map files use `f<k> = <expr>` and optional `inv<k> = <expr>` lines.

mod expr;
mod parser;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

pub use expr::{Expr, Func};
pub use parser::parse_expr;
use parser::{lex, Parser, Tok};

use crate::error::{GeomError, Result};
use crate::maps::{HolomorphicMap, MapJet};
use crate::metric::{hermitian_from_upper, Metric, SampleRegion};
use crate::point::MAX_DIM;
use crate::scalar::{HolJet2, Jet2, Scalar};
use crate::wirtinger::ChartField;

/// A parsed metric file.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec {
    pub name: String,
    pub dim: usize,
    /// Upper-triangular entries keyed by 0-based `(i, j)` with `i ≤ j`.
    pub entries: BTreeMap<(usize, usize), Expr>,
    pub domain: Option<Expr>,
    pub region: SampleRegion,
}

/// A parsed map file.
#[derive(Debug, Clone, PartialEq)]
pub struct MapSpec {
    pub name: String,
    pub dim: usize,
    pub components: Vec<Expr>,
    pub inverse: Option<Vec<Expr>>,
}

enum Statement {
    Dim(usize),
    Domain(Expr),
    Entry(usize, usize, Expr),
    Component(usize, Expr),
    Inverse(usize, Expr),
}

fn parse_index(p: &mut Parser) -> Result<usize> {
    p.expect(Tok::LBracket, "'['")?;
    let k = p.parse_int()?;
    p.expect(Tok::RBracket, "']'")?;
    usize::try_from(k)
        .ok()
        .filter(|&k| k >= 1)
        .ok_or_else(|| GeomError::DimensionMismatch(format!("index {k} must be at least 1")))
}

fn numbered(name: &str, prefix: &str) -> Option<usize> {
    name.strip_prefix(prefix)?.parse::<usize>().ok().filter(|&k| k >= 1)
}

fn parse_statements(text: &str) -> Result<Vec<(usize, Statement)>> {
    let mut p = Parser::new(lex(text)?);
    let mut out = Vec::new();
    loop {
        p.skip_seps();
        if p.at_end() {
            return Ok(out);
        }
        let head = p.bump();
        let line = head.line;
        let name = match head.tok {
            Tok::Ident(s) => s,
            _ => {
                return Err(GeomError::Syntax {
                    line: head.line,
                    column: head.col,
                    message: "expected a statement".into(),
                })
            }
        };
        let stmt = if name == "n" {
            p.expect(Tok::Eq, "'='")?;
            let k = p.parse_int()?;
            if !(1..=MAX_DIM as i64).contains(&k) {
                return Err(GeomError::DimensionMismatch(format!(
                    "dimension must be between 1 and {MAX_DIM}, got {k}"
                )));
            }
            Statement::Dim(k as usize)
        } else if name == "domain" {
            p.expect(Tok::Eq, "'='")?;
            Statement::Domain(p.parse_expr()?)
        } else if name == "g" {
            let i = parse_index(&mut p)?;
            let j = parse_index(&mut p)?;
            p.expect(Tok::Eq, "'='")?;
            Statement::Entry(i, j, p.parse_expr()?)
        } else if let Some(k) = numbered(&name, "inv") {
            p.expect(Tok::Eq, "'='")?;
            Statement::Inverse(k, p.parse_expr()?)
        } else if let Some(k) = numbered(&name, "f") {
            p.expect(Tok::Eq, "'='")?;
            Statement::Component(k, p.parse_expr()?)
        } else {
            return Err(GeomError::Syntax {
                line: head.line,
                column: head.col,
                message: format!("unknown statement '{name}'"),
            });
        };
        if !matches!(p.peek().tok, Tok::Sep | Tok::End) {
            return Err(p.error_here("expected end of statement"));
        }
        out.push((line, stmt));
    }
}

fn syntax_at(line: usize, message: impl Into<String>) -> GeomError {
    GeomError::Syntax {
        line,
        column: 1,
        message: message.into(),
    }
}

fn check_vars(e: &Expr, n: usize, what: &str) -> Result<()> {
    if e.max_var() > n {
        return Err(GeomError::DimensionMismatch(format!(
            "{what} references z{} but n = {n}",
            e.max_var()
        )));
    }
    Ok(())
}

/// Parses a metric file.
pub fn parse_metric(text: &str) -> Result<MetricSpec> {
    let mut dim = None;
    let mut domain = None;
    let mut entries = BTreeMap::new();
    let mut last_line = 1;
    for (line, stmt) in parse_statements(text)? {
        last_line = line;
        match stmt {
            Statement::Dim(k) => {
                if dim.replace(k).is_some() {
                    return Err(syntax_at(line, "dimension given twice"));
                }
            }
            Statement::Domain(e) => {
                if domain.replace(e).is_some() {
                    return Err(syntax_at(line, "domain given twice"));
                }
            }
            Statement::Entry(i, j, e) => {
                if i > j {
                    return Err(syntax_at(
                        line,
                        format!("g[{i}][{j}] is implied by g[{j}][{i}]; give entries with i <= j"),
                    ));
                }
                if entries.insert((i - 1, j - 1), e).is_some() {
                    return Err(syntax_at(line, format!("g[{i}][{j}] given twice")));
                }
            }
            Statement::Component(..) | Statement::Inverse(..) => {
                return Err(syntax_at(line, "map components are not allowed in a metric file"))
            }
        }
    }
    let n = dim.ok_or_else(|| syntax_at(last_line, "missing 'n = <dimension>'"))?;
    for (&(i, j), e) in &entries {
        if j >= n {
            return Err(GeomError::DimensionMismatch(format!(
                "entry g[{}][{}] exceeds n = {n}",
                i + 1,
                j + 1
            )));
        }
        check_vars(e, n, &format!("g[{}][{}]", i + 1, j + 1))?;
    }
    for k in 0..n {
        if !entries.contains_key(&(k, k)) {
            return Err(GeomError::DimensionMismatch(format!(
                "diagonal entry g[{0}][{0}] is missing",
                k + 1
            )));
        }
    }
    if let Some(d) = &domain {
        check_vars(d, n, "domain")?;
    }
    Ok(MetricSpec {
        name: "dsl".into(),
        dim: n,
        entries,
        domain,
        region: SampleRegion::ball(1.0),
    })
}

/// Parses a map file; components must be syntactically holomorphic.
pub fn parse_map(text: &str) -> Result<MapSpec> {
    let mut dim = None;
    let mut comps: BTreeMap<usize, Expr> = BTreeMap::new();
    let mut inv: BTreeMap<usize, Expr> = BTreeMap::new();
    let mut last_line = 1;
    for (line, stmt) in parse_statements(text)? {
        last_line = line;
        match stmt {
            Statement::Dim(k) => {
                if dim.replace(k).is_some() {
                    return Err(syntax_at(line, "dimension given twice"));
                }
            }
            Statement::Component(k, e) => {
                if e.uses_conjugation() {
                    return Err(GeomError::HolomorphyViolation(format!("f{k}")));
                }
                if comps.insert(k, e).is_some() {
                    return Err(syntax_at(line, format!("f{k} given twice")));
                }
            }
            Statement::Inverse(k, e) => {
                if e.uses_conjugation() {
                    return Err(GeomError::HolomorphyViolation(format!("inv{k}")));
                }
                if inv.insert(k, e).is_some() {
                    return Err(syntax_at(line, format!("inv{k} given twice")));
                }
            }
            Statement::Domain(_) | Statement::Entry(..) => {
                return Err(syntax_at(line, "metric statements are not allowed in a map file"))
            }
        }
    }
    let n = match dim {
        Some(n) => n,
        None => comps.keys().copied().max().unwrap_or(0),
    };
    if n == 0 {
        return Err(syntax_at(last_line, "map file defines no components"));
    }
    if n > MAX_DIM {
        return Err(GeomError::DimensionMismatch(format!("map dimension {n} exceeds {MAX_DIM}")));
    }
    let collect = |m: &BTreeMap<usize, Expr>, prefix: &str| -> Result<Vec<Expr>> {
        (1..=n)
            .map(|k| {
                let e = m.get(&k).cloned().ok_or_else(|| {
                    GeomError::DimensionMismatch(format!("component {prefix}{k} is missing"))
                })?;
                check_vars(&e, n, &format!("{prefix}{k}"))?;
                Ok(e)
            })
            .collect()
    };
    if let Some(&k) = comps.keys().chain(inv.keys()).find(|&&k| k > n) {
        return Err(GeomError::DimensionMismatch(format!("component {k} exceeds n = {n}")));
    }
    let components = collect(&comps, "f")?;
    let inverse = if inv.is_empty() {
        None
    } else {
        Some(collect(&inv, "inv")?)
    };
    Ok(MapSpec {
        name: "dsl".into(),
        dim: n,
        components,
        inverse,
    })
}

impl MetricSpec {
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_region(mut self, region: SampleRegion) -> Self {
        self.region = region;
        self
    }

    fn eval_generic<S: Scalar>(&self, z: &[S]) -> Result<Vec<S>> {
        hermitian_from_upper(self.dim, |i, j| match self.entries.get(&(i, j)) {
            Some(e) => {
                let v = e.eval(z)?;
                let c = v.value();
                if i == j && c.im.abs() > 1e-12 * (1.0 + c.re.abs()) {
                    return Err(GeomError::NonHermitianSpec(i + 1));
                }
                Ok(v)
            }
            None => Ok(S::real(0.0)),
        })
    }
}

impl ChartField for MetricSpec {
    fn label(&self) -> String {
        self.name.clone()
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn outputs(&self) -> usize {
        self.dim * self.dim
    }
    fn contains(&self, z: &[Complex64]) -> bool {
        match &self.domain {
            None => true,
            Some(d) => matches!(d.eval(z), Ok(v) if v.re > 0.0),
        }
    }
    fn eval(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        self.eval_generic(z)
    }
    fn eval_jet(&self, z: &[Jet2]) -> Result<Vec<Jet2>> {
        self.eval_generic(z)
    }
}

impl Metric for MetricSpec {
    fn sample_region(&self) -> SampleRegion {
        self.region
    }
}

impl fmt::Display for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n = {}", self.dim)?;
        if let Some(d) = &self.domain {
            writeln!(f, "domain = {d}")?;
        }
        for ((i, j), e) in &self.entries {
            writeln!(f, "g[{}][{}] = {e}", i + 1, j + 1)?;
        }
        Ok(())
    }
}

impl MapSpec {
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    fn eval_components<S: Scalar>(exprs: &[Expr], z: &[S]) -> Result<Vec<S>> {
        exprs.iter().map(|e| e.eval(z)).collect()
    }

    /// Wirtinger jets of the components; the `∂̄` parts measure holomorphy.
    pub fn wirtinger_jets(&self, z: &[Complex64]) -> Result<Vec<Jet2>> {
        Self::eval_components(&self.components, &Jet2::seed(z))
    }

    fn holjet(&self, exprs: &[Expr], z: &[Complex64]) -> Result<MapJet> {
        if z.len() != self.dim {
            return Err(GeomError::DimensionMismatch(format!(
                "map expects {} coordinates, got {}",
                self.dim,
                z.len()
            )));
        }
        let comps = Self::eval_components(exprs, &HolJet2::seed(z))?;
        let jet = MapJet::from_holjets(self.dim, &comps);
        if !jet.is_finite() {
            return Err(GeomError::NonFinite(self.name.clone()));
        }
        Ok(jet)
    }
}

impl HolomorphicMap for MapSpec {
    fn label(&self) -> String {
        self.name.clone()
    }
    fn source_dim(&self) -> usize {
        self.dim
    }
    fn target_dim(&self) -> usize {
        self.dim
    }
    fn jet(&self, z: &[Complex64]) -> Result<MapJet> {
        self.holjet(&self.components, z)
    }
    fn has_inverse(&self) -> bool {
        self.inverse.is_some()
    }
    fn inverse_jet(&self, w: &[Complex64]) -> Result<MapJet> {
        match &self.inverse {
            Some(inv) => self.holjet(inv, w),
            None => Err(GeomError::MissingInverse),
        }
    }
}

impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n = {}", self.dim)?;
        for (k, e) in self.components.iter().enumerate() {
            writeln!(f, "f{} = {e}", k + 1)?;
        }
        if let Some(inv) = &self.inverse {
            for (k, e) in inv.iter().enumerate() {
                writeln!(f, "inv{} = {e}", k + 1)?;
            }
        }
        Ok(())
    }
}
