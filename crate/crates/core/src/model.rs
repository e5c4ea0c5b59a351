//! The sectioned plain-text model file.
//!
//! ```text
//! # comment
//! [generators]
//! x = 3 fiber
//! b = 3 base
//! [differential]
//! z = x*y
//! [meta]
//! name = example
//! declared_top = 11
//! truncated_above = 7
//! fiber_dim = 9
//! base_dim = 6
//! assert.fiber_formal = product of spheres
//! reference = free text
//! ```
//!
//! Generators without a block make a plain CDGA, on which fibration
//! commands are refused.

use std::fmt::Write as _;

use thiserror::Error;

use crate::cdga::{CdgaError, CdgaPresentation};
use crate::fibration::{FibrationError, FibrationPresentation};
use crate::graded::{Block, GeneratorSet, GradedError, GradedPoly};
use crate::invariants::AssertionSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("{}{source}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Validation { line: Option<usize>, source: FibrationError },
    #[error("model is a plain CDGA (no base/fiber blocks); fibration commands need blocks")]
    NotFibration,
}

impl ModelError {
    /// Parse errors are input errors; validation errors are mathematical.
    pub fn is_parse(&self) -> bool {
        matches!(self, ModelError::Parse { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorLine {
    pub name: String,
    pub degree: u32,
    pub block: Option<Block>,
    pub line: usize,
}

/// A parsed, not yet validated model file.
#[derive(Clone, Debug)]
pub struct ModelFile {
    pub generators: Vec<GeneratorLine>,
    /// `(generator, polynomial, line)`.
    pub differential: Vec<(String, GradedPoly, usize)>,
    pub name: Option<String>,
    pub reference: Option<String>,
    pub declared_top: Option<u32>,
    pub truncated_above: Option<u32>,
    pub fiber_dim: Option<u32>,
    pub base_dim: Option<u32>,
    pub assertions: AssertionSet,
    gens: GeneratorSet,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Generators,
    Differential,
    Meta,
}

fn perr(line: usize, reason: impl Into<String>) -> ModelError {
    ModelError::Parse { line, reason: reason.into() }
}

fn parse_u32(line: usize, key: &str, v: &str) -> Result<u32, ModelError> {
    v.parse().map_err(|_| perr(line, format!("`{key}` expects a nonnegative integer, found `{v}`")))
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let mut section = Section::None;
        let mut generators: Vec<GeneratorLine> = Vec::new();
        let mut raw_diffs: Vec<(String, String, usize)> = Vec::new();
        let mut meta = ModelMeta::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if content.starts_with('[') {
                section = match content {
                    "[generators]" => Section::Generators,
                    "[differential]" => Section::Differential,
                    "[meta]" => Section::Meta,
                    other => return Err(perr(line, format!("unknown section {other}"))),
                };
                continue;
            }
            let (key, value) =
                content.split_once('=').ok_or_else(|| perr(line, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            match section {
                Section::None => return Err(perr(line, "entry outside a section")),
                Section::Generators => {
                    let mut parts = value.split_whitespace();
                    let degree = parts
                        .next()
                        .ok_or_else(|| perr(line, "missing degree"))
                        .and_then(|d| parse_u32(line, key, d))?;
                    let block = match parts.next() {
                        None => None,
                        Some("base") => Some(Block::Base),
                        Some("fiber") => Some(Block::Fiber { copy: 0 }),
                        Some(other) => {
                            return Err(perr(line, format!("block must be `base` or `fiber`, found `{other}`")))
                        }
                    };
                    if parts.next().is_some() {
                        return Err(perr(line, "trailing text after block"));
                    }
                    generators.push(GeneratorLine { name: key.to_string(), degree, block, line });
                }
                Section::Differential => raw_diffs.push((key.to_string(), value.to_string(), line)),
                Section::Meta => meta.set(line, key, value)?,
            }
        }
        if generators.is_empty() {
            return Err(perr(text.lines().count().max(1), "no generators declared"));
        }
        let blocked = generators.iter().filter(|g| g.block.is_some()).count();
        if blocked != 0 && blocked != generators.len() {
            let g = generators.iter().find(|g| g.block.is_none()).expect("unblocked");
            return Err(perr(g.line, format!("generator `{}` needs a block (base or fiber)", g.name)));
        }
        let gens = GeneratorSet::new(
            generators.iter().map(|g| (g.name.clone(), g.degree, g.block.unwrap_or(Block::Fiber { copy: 0 }))),
        )
        .map_err(|e| {
            let line = match &e {
                GradedError::ZeroDegree(n) | GradedError::DuplicateName(n) | GradedError::InvalidName(n) => {
                    generators.iter().rev().find(|g| &g.name == n).map_or(0, |g| g.line)
                }
                _ => 0,
            };
            perr(line, e.to_string())
        })?;
        let mut differential: Vec<(String, GradedPoly, usize)> = Vec::new();
        for (name, expr, line) in raw_diffs {
            if gens.index_of(&name).is_none() {
                return Err(perr(line, format!("differential of undeclared generator `{name}`")));
            }
            if differential.iter().any(|(n, _, _)| n == &name) {
                return Err(perr(line, format!("differential of `{name}` given twice")));
            }
            let p = gens.parse(&expr).map_err(|e| perr(line, e.to_string()))?;
            differential.push((name, p, line));
        }
        Ok(ModelFile {
            generators,
            differential,
            name: meta.name,
            reference: meta.reference,
            declared_top: meta.declared_top,
            truncated_above: meta.truncated_above,
            fiber_dim: meta.fiber_dim,
            base_dim: meta.base_dim,
            assertions: meta.assertions,
            gens,
        })
    }

    pub fn gens(&self) -> &GeneratorSet {
        &self.gens
    }

    pub fn is_fibration(&self) -> bool {
        self.generators.iter().all(|g| g.block.is_some())
    }

    fn line_of_generator(&self, name: &str) -> Option<usize> {
        self.differential
            .iter()
            .find(|(n, _, _)| n == name)
            .map(|(_, _, l)| *l)
            .or_else(|| self.generators.iter().find(|g| g.name == name).map(|g| g.line))
    }

    fn validation(&self, source: FibrationError) -> ModelError {
        let name = match &source {
            FibrationError::Cdga(CdgaError::DegreeMismatch { generator, .. })
            | FibrationError::Cdga(CdgaError::LeibnizSquareNonzero { generator, .. }) => Some(generator.clone()),
            FibrationError::BaseNotSubalgebra(n) => Some(n.clone()),
            _ => None,
        };
        ModelError::Validation { line: name.and_then(|n| self.line_of_generator(&n)), source }
    }

    /// The presentation, without validation.
    pub fn presentation(&self) -> CdgaPresentation {
        let mut d = vec![GradedPoly::zero(); self.gens.len()];
        for (name, p, _) in &self.differential {
            d[self.gens.index_of(name).expect("declared")] = p.clone();
        }
        let mut pres = CdgaPresentation::new(self.gens.clone(), d);
        pres.declared_top = self.declared_top;
        pres.truncated_above = self.truncated_above;
        pres
    }

    /// Validates (degrees, `d² = 0`).
    pub fn validate(&self) -> Result<crate::cdga::ValidationReport, ModelError> {
        self.presentation().validate().map_err(|e| self.validation(e.into()))
    }

    /// The validated CDGA; a plain model is read as a fibration over a point.
    pub fn cdga(&self) -> Result<std::sync::Arc<crate::cdga::Cdga>, ModelError> {
        crate::cdga::Cdga::new(self.presentation()).map_err(|e| self.validation(e.into()))
    }

    /// The validated fibration presentation.
    pub fn fibration(&self) -> Result<FibrationPresentation, ModelError> {
        if !self.is_fibration() {
            return Err(ModelError::NotFibration);
        }
        let mut f = FibrationPresentation::new(self.presentation()).map_err(|e| self.validation(e))?;
        f.declared_fiber_dim = self.fiber_dim;
        f.declared_base_dim = self.base_dim;
        Ok(f)
    }

    /// Canonical text form; parsing it yields an identical model.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        if let Some(n) = &self.name {
            let _ = writeln!(out, "# {n}");
        }
        out.push_str("[generators]\n");
        for g in &self.generators {
            let block = match g.block {
                None => "",
                Some(Block::Base) => " base",
                Some(Block::Fiber { .. }) => " fiber",
            };
            let _ = writeln!(out, "{} = {}{}", g.name, g.degree, block);
        }
        out.push_str("\n[differential]\n");
        for (name, p, _) in &self.differential {
            let _ = writeln!(out, "{name} = {}", self.gens.format(p));
        }
        out.push_str("\n[meta]\n");
        if let Some(n) = &self.name {
            let _ = writeln!(out, "name = {n}");
        }
        for (key, v) in [
            ("declared_top", self.declared_top),
            ("truncated_above", self.truncated_above),
            ("fiber_dim", self.fiber_dim),
            ("base_dim", self.base_dim),
        ] {
            if let Some(v) = v {
                let _ = writeln!(out, "{key} = {v}");
            }
        }
        for (flag, why) in self.assertions.entries() {
            let _ = writeln!(out, "assert.{flag} = {why}");
        }
        if let Some(r) = &self.reference {
            let _ = writeln!(out, "reference = {r}");
        }
        out
    }

    /// Structural equality of the mathematical content (ignores line numbers).
    pub fn same_content(&self, other: &ModelFile) -> bool {
        let strip = |m: &ModelFile| {
            (
                m.generators.iter().map(|g| (g.name.clone(), g.degree, g.block)).collect::<Vec<_>>(),
                m.differential.iter().map(|(n, p, _)| (n.clone(), p.clone())).collect::<Vec<_>>(),
            )
        };
        strip(self) == strip(other)
            && self.name == other.name
            && self.reference == other.reference
            && self.declared_top == other.declared_top
            && self.truncated_above == other.truncated_above
            && self.fiber_dim == other.fiber_dim
            && self.base_dim == other.base_dim
            && self.assertions == other.assertions
    }
}

#[derive(Default)]
struct ModelMeta {
    name: Option<String>,
    reference: Option<String>,
    declared_top: Option<u32>,
    truncated_above: Option<u32>,
    fiber_dim: Option<u32>,
    base_dim: Option<u32>,
    assertions: AssertionSet,
}

impl ModelMeta {
    fn set(&mut self, line: usize, key: &str, value: &str) -> Result<(), ModelError> {
        match key {
            "name" => self.name = Some(value.to_string()),
            "reference" => self.reference = Some(value.to_string()),
            "declared_top" => self.declared_top = Some(parse_u32(line, key, value)?),
            "truncated_above" => self.truncated_above = Some(parse_u32(line, key, value)?),
            "fiber_dim" => self.fiber_dim = Some(parse_u32(line, key, value)?),
            "base_dim" => self.base_dim = Some(parse_u32(line, key, value)?),
            _ => match key.strip_prefix("assert.") {
                Some(flag) => self
                    .assertions
                    .parse_entry(&format!("{flag}={value}"))
                    .map_err(|e| perr(line, e.to_string()))?,
                None => return Err(perr(line, format!("unknown meta key `{key}`"))),
            },
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const KY: &str = "# comment\n[generators]\nx = 3 fiber\ny = 3 fiber\nz = 5 fiber\n\n[differential]\nz = x*y  # product\n\n[meta]\nname = ky\nassert.fiber_formal = no\n";

    #[test]
    fn parses_and_round_trips() {
        let m = ModelFile::parse(KY).unwrap();
        assert_eq!(m.generators.len(), 3);
        assert!(m.is_fibration());
        m.fibration().unwrap();
        let again = ModelFile::parse(&m.serialize()).unwrap();
        assert!(m.same_content(&again));
        assert_eq!(again.serialize(), m.serialize());
    }

    #[test]
    fn empty_generators_is_parse_error() {
        let e = ModelFile::parse("[generators]\n[differential]\n").unwrap_err();
        assert!(e.is_parse());
    }

    #[test]
    fn errors_carry_lines() {
        let e = ModelFile::parse("[generators]\nx = 3 fiber\n[differential]\nx = q\n").unwrap_err();
        assert_eq!(e, ModelError::Parse { line: 4, reason: "unknown generator `q`".into() });
        let bad = ModelFile::parse("[generators]\nx = 2 fiber\ny = 3 fiber\nw = 4 fiber\n[differential]\ny = x^2\nw = x*y\n")
            .unwrap();
        match bad.validate().unwrap_err() {
            ModelError::Validation { line, source } => {
                assert_eq!(line, Some(7));
                assert!(matches!(source, FibrationError::Cdga(CdgaError::LeibnizSquareNonzero { ref generator, .. }) if generator == "w"));
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn plain_cdga_refuses_fibration() {
        let m = ModelFile::parse("[generators]\nx = 4\nz = 7\n[differential]\nz = x^2\n").unwrap();
        assert!(m.cdga().is_ok());
        assert_eq!(m.fibration().unwrap_err(), ModelError::NotFibration);
    }
}
