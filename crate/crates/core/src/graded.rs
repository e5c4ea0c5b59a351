//! Graded-commutative polynomials over the rationals.
//!
//! Generators of odd degree are exterior, generators of even degree are
//! polynomial. A [`Monomial`] is a dense exponent vector over a fixed
//! [`GeneratorSet`]; its canonical reading order is ascending generator
//! index, and the Koszul sign of reordering is absorbed into the owning
//! polynomial's coefficient.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{SparseVec, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Block {
    Base,
    /// Fiber generator; `copy` is 0 for an uncopied generator and `λ ≥ 1`
    /// inside an r-fold fiberwise product.
    Fiber {
        copy: u32,
    },
}

impl Block {
    pub fn is_base(self) -> bool {
        matches!(self, Block::Base)
    }

    pub fn is_fiber(self) -> bool {
        matches!(self, Block::Fiber { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
    pub index: usize,
    pub block: Block,
}

impl Generator {
    pub fn is_odd(&self) -> bool {
        self.degree % 2 == 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradedError {
    #[error("generator `{0}` has degree 0; presentations must be connected")]
    ZeroDegree(String),
    #[error("duplicate generator name `{0}`")]
    DuplicateName(String),
    #[error("invalid generator name `{0}`")]
    InvalidName(String),
    #[error("expected a homogeneous polynomial of degree {expected}, found {found}")]
    WrongDegree { expected: u32, found: String },
    #[error("parse error at column {column}: {reason}")]
    Parse { column: usize, reason: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
}

/// Dense exponent vector; for exterior generators the exponent is 0 or 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Box<[u16]>);

impl Monomial {
    pub fn one(ngens: usize) -> Self {
        Monomial(vec![0; ngens].into_boxed_slice())
    }

    pub fn from_exponents(exps: Vec<u16>) -> Self {
        Monomial(exps.into_boxed_slice())
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn exponent(&self, i: usize) -> u16 {
        self.0[i]
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Word length (total number of generator factors).
    pub fn word_length(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }
}

/// Finite linear combination of monomials with nonzero rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GradedPoly {
    terms: BTreeMap<Monomial, Q>,
}

impl GradedPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(m: Monomial, c: Q) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> + '_ {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &GradedPoly) -> GradedPoly {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &GradedPoly) -> GradedPoly {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> GradedPoly {
        if c.is_zero() {
            return GradedPoly::zero();
        }
        GradedPoly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn neg(&self) -> GradedPoly {
        self.scale(&-Q::one())
    }

    /// Largest word length among the terms, 0 for the zero polynomial.
    pub fn max_word_length(&self) -> u32 {
        self.terms
            .keys()
            .map(Monomial::word_length)
            .max()
            .unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyDegree {
    Zero,
    Homogeneous(u32),
    Mixed,
}

/// The ordered generator list of a free graded-commutative algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    gens: Vec<Generator>,
    by_name: HashMap<String, usize>,
}

pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && !name.chars().all(|c| c.is_ascii_digit())
}

impl GeneratorSet {
    /// Builds a generator set from `(name, degree, block)` triples; indices
    /// follow the given order.
    pub fn new<S: Into<String>>(
        gens: impl IntoIterator<Item = (S, u32, Block)>,
    ) -> Result<Self, GradedError> {
        let mut out = Vec::new();
        let mut by_name = HashMap::new();
        for (index, (name, degree, block)) in gens.into_iter().enumerate() {
            let name: String = name.into();
            if !is_valid_name(&name) {
                return Err(GradedError::InvalidName(name));
            }
            if degree == 0 {
                return Err(GradedError::ZeroDegree(name));
            }
            if by_name.insert(name.clone(), index).is_some() {
                return Err(GradedError::DuplicateName(name));
            }
            out.push(Generator {
                name,
                degree,
                index,
                block,
            });
        }
        Ok(Self { gens: out, by_name })
    }

    pub fn empty() -> Self {
        Self {
            gens: Vec::new(),
            by_name: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn generator(&self, i: usize) -> &Generator {
        &self.gens[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn all_odd(&self) -> bool {
        self.gens.iter().all(Generator::is_odd)
    }

    /// Sum of the generator degrees; the top degree of the algebra when all
    /// generators are odd.
    pub fn degree_sum(&self) -> u32 {
        self.gens.iter().map(|g| g.degree).sum()
    }

    pub fn one(&self) -> GradedPoly {
        GradedPoly::monomial(Monomial::one(self.len()), Q::one())
    }

    pub fn constant(&self, c: Q) -> GradedPoly {
        GradedPoly::monomial(Monomial::one(self.len()), c)
    }

    pub fn generator_poly(&self, i: usize) -> GradedPoly {
        let mut e = vec![0u16; self.len()];
        e[i] = 1;
        GradedPoly::monomial(Monomial::from_exponents(e), Q::one())
    }

    pub fn monomial_degree(&self, m: &Monomial) -> u32 {
        m.0.iter()
            .zip(&self.gens)
            .map(|(&e, g)| e as u32 * g.degree)
            .sum()
    }

    pub fn monomial_is_odd(&self, m: &Monomial) -> bool {
        self.monomial_degree(m) % 2 == 1
    }

    pub fn degree(&self, p: &GradedPoly) -> PolyDegree {
        let mut degs = p.terms.keys().map(|m| self.monomial_degree(m));
        let Some(first) = degs.next() else {
            return PolyDegree::Zero;
        };
        if degs.all(|d| d == first) {
            PolyDegree::Homogeneous(first)
        } else {
            PolyDegree::Mixed
        }
    }

    /// Product of two monomials in canonical order: `None` when an exterior
    /// generator would appear twice, else `(negative, monomial)`.
    pub fn mul_monomials(&self, a: &Monomial, b: &Monomial) -> Option<(bool, Monomial)> {
        let n = self.len();
        let mut out = Vec::with_capacity(n);
        let mut odd_in_a_above = 0u32;
        let mut swaps = 0u32;
        // Walk from the top index down: each odd factor of `b` moves left
        // past every odd factor of `a` with a larger index.
        for i in (0..n).rev() {
            let (ea, eb) = (a.0[i], b.0[i]);
            if self.gens[i].is_odd() {
                if ea > 0 && eb > 0 {
                    return None;
                }
                if eb > 0 {
                    swaps += odd_in_a_above;
                }
                if ea > 0 {
                    odd_in_a_above += 1;
                }
            }
            out.push(ea + eb);
        }
        out.reverse();
        Some((swaps % 2 == 1, Monomial::from_exponents(out)))
    }

    pub fn mul(&self, p: &GradedPoly, q: &GradedPoly) -> GradedPoly {
        let mut out = GradedPoly::zero();
        for (ma, ca) in p.terms() {
            for (mb, cb) in q.terms() {
                if let Some((neg, m)) = self.mul_monomials(ma, mb) {
                    let c = ca * cb;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        out
    }

    pub fn pow(&self, p: &GradedPoly, k: u32) -> GradedPoly {
        let mut out = self.one();
        for _ in 0..k {
            out = self.mul(&out, p);
        }
        out
    }

    pub fn product<'a>(&self, factors: impl IntoIterator<Item = &'a GradedPoly>) -> GradedPoly {
        factors
            .into_iter()
            .fold(self.one(), |acc, f| self.mul(&acc, f))
    }

    /// All canonical monomials of total degree `n`, in descending
    /// lexicographic order of exponent vectors.
    pub fn monomial_basis(&self, n: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut current = vec![0u16; self.len()];
        self.enumerate(0, n, &mut current, &mut out);
        out
    }

    fn enumerate(&self, i: usize, remaining: u32, current: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if i == self.len() {
            if remaining == 0 {
                out.push(Monomial::from_exponents(current.clone()));
            }
            return;
        }
        let g = &self.gens[i];
        let max = if g.is_odd() {
            (remaining / g.degree).min(1)
        } else {
            remaining / g.degree
        };
        for e in (0..=max).rev() {
            current[i] = e as u16;
            self.enumerate(i + 1, remaining - e * g.degree, current, out);
        }
        current[i] = 0;
    }

    /// Number of monomials of each degree `0..=n`, by dynamic programming.
    pub fn slice_dimensions(&self, n: u32) -> Vec<u64> {
        let n = n as usize;
        let mut dims = vec![0u64; n + 1];
        dims[0] = 1;
        for g in &self.gens {
            let d = g.degree as usize;
            if g.is_odd() {
                for k in (d..=n).rev() {
                    dims[k] = dims[k].saturating_add(dims[k - d]);
                }
            } else {
                for k in d..=n {
                    dims[k] = dims[k].saturating_add(dims[k - d]);
                }
            }
        }
        dims
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        for (i, &e) in m.0.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(self.gens[i].name.clone()),
                _ => parts.push(format!("{}^{}", self.gens[i].name, e)),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    /// Canonical text form in the expression grammar; terms in descending
    /// monomial order.
    pub fn format(&self, p: &GradedPoly) -> String {
        if p.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (m, c)) in p.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if m.is_one() {
                s.push_str(&abs.to_string());
            } else {
                if !abs.is_one() {
                    s.push_str(&abs.to_string());
                    s.push('*');
                }
                s.push_str(&self.format_monomial(m));
            }
        }
        s
    }

    /// Parses the shared expression grammar: terms separated by `+`/`-`, each
    /// an optional rational coefficient followed by `*`-separated factors
    /// `name` or `name^k`. Whitespace is ignored.
    pub fn parse(&self, text: &str) -> Result<GradedPoly, GradedError> {
        Parser {
            gens: self,
            chars: text.chars().collect(),
            pos: 0,
        }
        .parse_expr()
    }
}

struct Parser<'a> {
    gens: &'a GeneratorSet,
    chars: Vec<char>,
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, reason: impl Into<String>) -> Result<T, GradedError> {
        Err(GradedError::Parse {
            column: self.pos + 1,
            reason: reason.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn word(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos];
            if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                self.pos += 1;
            } else {
                break;
            }
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn parse_expr(&mut self) -> Result<GradedPoly, GradedError> {
        let mut out = GradedPoly::zero();
        let mut first = true;
        loop {
            let sign = match self.peek() {
                None if first => return self.err("empty expression"),
                None => break,
                Some('+') => {
                    self.pos += 1;
                    Q::one()
                }
                Some('-') => {
                    self.pos += 1;
                    -Q::one()
                }
                Some(_) if first => Q::one(),
                Some(c) => return self.err(format!("expected `+` or `-`, found `{c}`")),
            };
            first = false;
            let term = self.parse_term()?;
            out = out.add(&term.scale(&sign));
        }
        Ok(out)
    }

    fn parse_term(&mut self) -> Result<GradedPoly, GradedError> {
        let mut coeff = Q::one();
        let mut mono = self.gens.one();
        let mut expect_factor = true;
        let mut any = false;
        while expect_factor {
            let w = self.word();
            if w.is_empty() {
                return self.err("expected a coefficient or a generator name");
            }
            if w.chars().all(|c| c.is_ascii_digit()) {
                let mut value = Q::from_integer(w.parse().expect("digits"));
                if self.peek() == Some('/') {
                    self.pos += 1;
                    let d = self.word();
                    if d.is_empty() || !d.chars().all(|c| c.is_ascii_digit()) {
                        return self.err("expected a denominator");
                    }
                    let d: num_bigint::BigInt = d.parse().expect("digits");
                    if d.is_zero() {
                        return self.err("zero denominator");
                    }
                    value /= Q::from_integer(d);
                }
                coeff *= value;
            } else {
                let Some(idx) = self.gens.index_of(&w) else {
                    return Err(GradedError::UnknownGenerator(w));
                };
                let mut k = 1u32;
                if self.peek() == Some('^') {
                    self.pos += 1;
                    let e = self.word();
                    k = match e.parse() {
                        Ok(k) => k,
                        Err(_) => return self.err("expected an integer exponent"),
                    };
                }
                let g = self.gens.generator_poly(idx);
                mono = self.gens.mul(&mono, &self.gens.pow(&g, k));
            }
            any = true;
            expect_factor = self.peek() == Some('*');
            if expect_factor {
                self.pos += 1;
            }
        }
        debug_assert!(any);
        Ok(mono.scale(&coeff))
    }
}

/// The ordered monomial basis of one degree, with a reverse index.
#[derive(Clone, Debug)]
pub struct DegreeSlice {
    pub degree: u32,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl DegreeSlice {
    pub fn new(gens: &GeneratorSet, degree: u32) -> Self {
        let monomials = gens.monomial_basis(degree);
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        Self {
            degree,
            monomials,
            index,
        }
    }

    pub fn dim(&self) -> usize {
        self.monomials.len()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Coordinate vector of a homogeneous polynomial of this slice's degree.
    pub fn coordinates(&self, p: &GradedPoly) -> Result<SparseVec, GradedError> {
        let mut pairs = Vec::with_capacity(p.num_terms());
        for (m, c) in p.terms() {
            match self.index.get(m) {
                Some(&i) => pairs.push((i, c.clone())),
                None => {
                    return Err(GradedError::WrongDegree {
                        expected: self.degree,
                        found: "a term of another degree".into(),
                    })
                }
            }
        }
        Ok(SparseVec::from_pairs(pairs))
    }

    pub fn from_coordinates(&self, v: &SparseVec) -> GradedPoly {
        let mut p = GradedPoly::zero();
        for (i, c) in v.iter() {
            p.add_term(self.monomials[i].clone(), c.clone());
        }
        p
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{q, q_frac};

    fn xyz() -> GeneratorSet {
        GeneratorSet::new([
            ("x", 3, Block::Fiber { copy: 0 }),
            ("y", 3, Block::Fiber { copy: 0 }),
            ("z", 5, Block::Fiber { copy: 0 }),
        ])
        .unwrap()
    }

    #[test]
    fn odd_square_vanishes() {
        let g = xyz();
        let x = g.generator_poly(0);
        assert!(g.mul(&x, &x).is_zero());
    }

    #[test]
    fn koszul_sign_on_swap() {
        let g = xyz();
        let (x, y) = (g.generator_poly(0), g.generator_poly(1));
        assert_eq!(g.mul(&y, &x), g.mul(&x, &y).neg());
    }

    #[test]
    fn even_generator_squares() {
        let g = GeneratorSet::new([("a", 6, Block::Base)]).unwrap();
        let a = g.generator_poly(0);
        let a2 = g.mul(&a, &a);
        assert_eq!(g.format(&a2), "a^2");
        assert_eq!(g.degree(&a2), PolyDegree::Homogeneous(12));
    }

    #[test]
    fn basis_examples() {
        let g = xyz();
        assert_eq!(g.monomial_basis(0), vec![Monomial::one(3)]);
        let b8: Vec<String> = g
            .monomial_basis(8)
            .iter()
            .map(|m| g.format_monomial(m))
            .collect();
        assert_eq!(b8, vec!["x*z", "y*z"]);
        assert!(g.monomial_basis(7).is_empty());
    }

    #[test]
    fn coordinates_in_slice() {
        let g = xyz();
        let s = DegreeSlice::new(&g, 8);
        assert!(s.coordinates(&GradedPoly::zero()).unwrap().is_zero());
        let p = g.parse("3*x*z - 1/2*y*z").unwrap();
        assert_eq!(
            s.coordinates(&p).unwrap().to_dense(2),
            vec![q(3), q_frac(-1, 2)]
        );
        assert_eq!(
            s.coordinates(&g.parse("y*z").unwrap()).unwrap(),
            SparseVec::unit(1)
        );
        assert!(matches!(
            s.coordinates(&g.parse("x").unwrap()),
            Err(GradedError::WrongDegree { .. })
        ));
    }

    #[test]
    fn parse_and_format() {
        let g = GeneratorSet::new([
            ("b'", 5, Block::Base),
            ("t1", 5, Block::Fiber { copy: 1 }),
            ("x1", 3, Block::Fiber { copy: 1 }),
        ])
        .unwrap();
        let p = g.parse("t1*x1 - b'*x1").unwrap();
        assert_eq!(g.format(&p), "-b'*x1 + t1*x1");
        assert_eq!(g.parse(&g.format(&p)).unwrap(), p);
        assert_eq!(g.parse(" 0 ").unwrap(), GradedPoly::zero());
        assert_eq!(g.parse("1").unwrap(), g.one());
        // reordering picks up the Koszul sign
        assert_eq!(g.parse("x1*t1").unwrap(), g.parse("-t1*x1").unwrap());
        assert!(matches!(
            g.parse("q*x1"),
            Err(GradedError::UnknownGenerator(_))
        ));
        assert!(matches!(g.parse("x1 +"), Err(GradedError::Parse { .. })));
        assert!(matches!(g.parse(""), Err(GradedError::Parse { .. })));
    }

    #[test]
    fn slice_dimensions_match_enumeration() {
        let g = GeneratorSet::new([
            ("a", 2, Block::Base),
            ("b", 3, Block::Base),
            ("c", 4, Block::Base),
            ("d", 5, Block::Base),
        ])
        .unwrap();
        let dims = g.slice_dimensions(20);
        for n in 0..=20 {
            assert_eq!(
                dims[n as usize],
                g.monomial_basis(n).len() as u64,
                "degree {n}"
            );
        }
    }
}
