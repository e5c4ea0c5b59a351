//! Finitely presented CDGAs: differentials, degreewise cohomology, induced
//! maps, cohomology-ring products and nilpotency of cohomology ideals.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::graded::{
    Block, DegreeSlice, GeneratorSet, GradedError, GradedPoly, Monomial, PolyDegree,
};
use crate::linalg::{
    kernel, quotient_basis, LinalgError, RationalMatrix, SparseVec, SubspaceBasis, Q,
};
use crate::status::Status;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CdgaError {
    #[error(
        "differential of `{generator}` is not homogeneous of degree {expected} (found {found})"
    )]
    DegreeMismatch {
        generator: String,
        expected: u32,
        found: String,
    },
    #[error("d(d({generator})) = {residue} is nonzero")]
    LeibnizSquareNonzero { generator: String, residue: String },
    #[error("morphism image of `{generator}` has the wrong degree")]
    MorphismDegree { generator: String },
    #[error("morphism does not commute with differentials on `{generator}`: residue {residue}")]
    MorphismNotChainMap { generator: String, residue: String },
    #[error("morphism images given for {found} generators, source has {expected}")]
    MorphismArity { expected: usize, found: usize },
    #[error("element is not a cocycle")]
    NotCocycle,
    #[error("expected a homogeneous element")]
    NotHomogeneous,
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Generators with their differentials, plus optional user declarations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CdgaPresentation {
    pub gens: GeneratorSet,
    pub differential: Vec<GradedPoly>,
    /// User assertion: the cohomology vanishes above this degree.
    pub declared_top: Option<u32>,
    /// Generators of degree above this bound were omitted from the presentation.
    pub truncated_above: Option<u32>,
}

impl CdgaPresentation {
    pub fn new(gens: GeneratorSet, differential: Vec<GradedPoly>) -> Self {
        assert_eq!(gens.len(), differential.len());
        Self {
            gens,
            differential,
            declared_top: None,
            truncated_above: None,
        }
    }

    /// Convenience constructor from text: generators `(name, degree, block)`
    /// and differentials `(name, expression)`; unlisted generators are closed.
    pub fn parse(gens: &[(&str, u32, Block)], diffs: &[(&str, &str)]) -> Result<Self, CdgaError> {
        let set = GeneratorSet::new(gens.iter().map(|(n, d, b)| (n.to_string(), *d, *b)))?;
        let mut differential = vec![GradedPoly::zero(); set.len()];
        for (name, expr) in diffs {
            let i = set
                .index_of(name)
                .ok_or_else(|| GradedError::UnknownGenerator(name.to_string()))?;
            differential[i] = set.parse(expr)?;
        }
        Ok(Self::new(set, differential))
    }

    pub fn d_generator(&self, i: usize) -> &GradedPoly {
        &self.differential[i]
    }

    /// Leibniz extension of the differential to a monomial.
    pub fn d_monomial(&self, m: &Monomial) -> GradedPoly {
        let n = self.gens.len();
        let mut out = GradedPoly::zero();
        let mut prefix_degree = 0u32;
        for i in 0..n {
            let e = m.exponent(i);
            if e == 0 {
                continue;
            }
            let dg = &self.differential[i];
            if !dg.is_zero() {
                let mut left = vec![0u16; n];
                let mut right = vec![0u16; n];
                for j in 0..n {
                    if j < i {
                        left[j] = m.exponent(j);
                    } else if j > i {
                        right[j] = m.exponent(j);
                    }
                }
                left[i] = e - 1;
                let mut coeff = Q::from_integer(e.into());
                if prefix_degree % 2 == 1 {
                    coeff = -coeff;
                }
                let l = GradedPoly::monomial(Monomial::from_exponents(left), coeff);
                let r = GradedPoly::monomial(
                    Monomial::from_exponents(right),
                    Q::from_integer(1.into()),
                );
                let term = self.gens.mul(&self.gens.mul(&l, dg), &r);
                out = out.add(&term);
            }
            prefix_degree += e as u32 * self.gens.generator(i).degree;
        }
        out
    }

    pub fn d(&self, p: &GradedPoly) -> GradedPoly {
        let mut out = GradedPoly::zero();
        for (m, c) in p.terms() {
            out = out.add(&self.d_monomial(m).scale(c));
        }
        out
    }

    /// Checks degree homogeneity of every differential image and `d² = 0`
    /// on every generator.
    pub fn validate(&self) -> Result<ValidationReport, CdgaError> {
        for (i, g) in self.gens.generators().iter().enumerate() {
            let dg = &self.differential[i];
            match self.gens.degree(dg) {
                PolyDegree::Zero => {}
                PolyDegree::Homogeneous(k) if k == g.degree + 1 => {}
                PolyDegree::Homogeneous(k) => {
                    return Err(CdgaError::DegreeMismatch {
                        generator: g.name.clone(),
                        expected: g.degree + 1,
                        found: k.to_string(),
                    })
                }
                PolyDegree::Mixed => {
                    return Err(CdgaError::DegreeMismatch {
                        generator: g.name.clone(),
                        expected: g.degree + 1,
                        found: "mixed degrees".into(),
                    })
                }
            }
        }
        for (i, g) in self.gens.generators().iter().enumerate() {
            let dd = self.d(&self.differential[i]);
            if !dd.is_zero() {
                return Err(CdgaError::LeibnizSquareNonzero {
                    generator: g.name.clone(),
                    residue: self.gens.format(&dd),
                });
            }
        }
        Ok(ValidationReport {
            generators: self.gens.len(),
            nonzero_differentials: self.differential.iter().filter(|p| !p.is_zero()).count(),
        })
    }

    /// Top degree of the underlying algebra when it is finite dimensional
    /// (all generators odd) and not truncated.
    pub fn finite_top(&self) -> Option<u32> {
        (self.gens.all_odd() && self.truncated_above.is_none()).then(|| self.gens.degree_sum())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub generators: usize,
    pub nonzero_differentials: usize,
}

struct Cache<T> {
    map: Mutex<BTreeMap<u32, Arc<T>>>,
}

impl<T> Cache<T> {
    fn new() -> Self {
        Self {
            map: Mutex::new(BTreeMap::new()),
        }
    }

    /// The lock is not held while computing, so nested lookups are fine;
    /// concurrent callers may both compute, and the first stored value wins.
    fn get_or(&self, n: u32, f: impl FnOnce() -> T) -> Arc<T> {
        if let Some(v) = self.map.lock().unwrap().get(&n) {
            return v.clone();
        }
        let v = Arc::new(f());
        self.map.lock().unwrap().entry(n).or_insert(v).clone()
    }
}

/// Cohomology in one degree: fixed cocycle representatives and a solver
/// that expresses cocycles in class coordinates.
pub struct CohomologySlice {
    pub degree: u32,
    slice: Arc<DegreeSlice>,
    cocycles: SubspaceBasis,
    coboundaries: SubspaceBasis,
    reps: Vec<SparseVec>,
    rep_pivot_pos: HashMap<usize, usize>,
    /// coboundary pivot -> its row's entries in the representative pivot columns
    cob_to_rep: HashMap<usize, Vec<(usize, Q)>>,
}

impl CohomologySlice {
    fn new(
        slice: Arc<DegreeSlice>,
        cocycles: SubspaceBasis,
        coboundaries: SubspaceBasis,
    ) -> Result<Self, CdgaError> {
        let reps = quotient_basis(&cocycles, &coboundaries)?;
        let rep_pivot_pos: HashMap<usize, usize> = reps
            .iter()
            .enumerate()
            .map(|(i, r)| (r.leading().expect("nonzero representative").0, i))
            .collect();
        let mut cob_to_rep = HashMap::new();
        for p in coboundaries.pivots() {
            let row = coboundaries.row_at_pivot(p).expect("pivot row");
            let hits: Vec<(usize, Q)> = row
                .iter()
                .filter_map(|(c, v)| rep_pivot_pos.get(&c).map(|&i| (i, v.clone())))
                .collect();
            if !hits.is_empty() {
                cob_to_rep.insert(p, hits);
            }
        }
        Ok(Self {
            degree: slice.degree,
            slice,
            cocycles,
            coboundaries,
            reps,
            rep_pivot_pos,
            cob_to_rep,
        })
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn slice(&self) -> &DegreeSlice {
        &self.slice
    }

    pub fn cocycles(&self) -> &SubspaceBasis {
        &self.cocycles
    }

    pub fn coboundaries(&self) -> &SubspaceBasis {
        &self.coboundaries
    }

    pub fn representative_vectors(&self) -> &[SparseVec] {
        &self.reps
    }

    pub fn representative(&self, i: usize) -> GradedPoly {
        self.slice.from_coordinates(&self.reps[i])
    }

    pub fn representatives(&self) -> Vec<GradedPoly> {
        (0..self.dim()).map(|i| self.representative(i)).collect()
    }

    /// Class coordinates of a cocycle given in monomial coordinates. The
    /// input is assumed to be a cocycle; see [`Cdga::class_of`] for the
    /// checked version.
    pub fn class_coordinates(&self, v: &SparseVec) -> SparseVec {
        let mut pairs: Vec<(usize, Q)> = Vec::new();
        for (c, val) in v.iter() {
            if let Some(&i) = self.rep_pivot_pos.get(&c) {
                pairs.push((i, val.clone()));
            } else if let Some(hits) = self.cob_to_rep.get(&c) {
                for (i, b) in hits {
                    pairs.push((*i, -(val * b)));
                }
            }
        }
        SparseVec::from_pairs(pairs)
    }

    /// Cocycle (in monomial coordinates) representing the given class.
    pub fn cocycle_of(&self, class: &SparseVec) -> SparseVec {
        let mut acc = SparseVec::new();
        for (i, c) in class.iter() {
            acc = acc.add_scaled(&self.reps[i], c);
        }
        acc
    }

    pub fn poly_of(&self, class: &SparseVec) -> GradedPoly {
        self.slice.from_coordinates(&self.cocycle_of(class))
    }

    pub fn is_coboundary(&self, v: &SparseVec) -> bool {
        self.coboundaries.contains(v)
    }
}

/// A validated presentation together with memoized degreewise data.
pub struct Cdga {
    pres: CdgaPresentation,
    slices: Cache<DegreeSlice>,
    diffs: Cache<Vec<SparseVec>>,
    cohomology: Cache<CohomologySlice>,
    algebra_gens: Mutex<Option<(u32, Vec<(u32, GradedPoly)>)>>,
}

impl std::fmt::Debug for Cdga {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Cdga")
            .field("pres", &self.pres)
            .finish_non_exhaustive()
    }
}

impl Cdga {
    pub fn new(pres: CdgaPresentation) -> Result<Arc<Self>, CdgaError> {
        pres.validate()?;
        Ok(Arc::new(Self {
            pres,
            slices: Cache::new(),
            diffs: Cache::new(),
            cohomology: Cache::new(),
            algebra_gens: Mutex::new(None),
        }))
    }

    pub fn presentation(&self) -> &CdgaPresentation {
        &self.pres
    }

    pub fn gens(&self) -> &GeneratorSet {
        &self.pres.gens
    }

    pub fn slice(&self, n: u32) -> Arc<DegreeSlice> {
        self.slices
            .get_or(n, || DegreeSlice::new(&self.pres.gens, n))
    }

    /// Images of the degree-`n` basis monomials, in degree-`n+1` coordinates.
    pub fn differential_images(&self, n: u32) -> Arc<Vec<SparseVec>> {
        self.diffs.get_or(n, || {
            let source = self.slice(n);
            let target = self.slice(n + 1);
            source
                .monomials()
                .iter()
                .map(|m| {
                    target
                        .coordinates(&self.pres.d_monomial(m))
                        .expect("differential raises degree by one")
                })
                .collect()
        })
    }

    /// Matrix of `d : A^n -> A^{n+1}` acting on column vectors.
    pub fn differential_matrix(&self, n: u32) -> RationalMatrix {
        let images = self.differential_images(n);
        RationalMatrix::from_rows(self.slice(n + 1).dim(), images.to_vec()).transpose()
    }

    pub fn cohomology(&self, n: u32) -> Arc<CohomologySlice> {
        self.cohomology.get_or(n, || {
            let slice = self.slice(n);
            let cocycles = kernel(&self.differential_matrix(n));
            let coboundaries = if n == 0 {
                SubspaceBasis::zero(slice.dim())
            } else {
                SubspaceBasis::span(slice.dim(), self.differential_images(n - 1).iter().cloned())
            };
            CohomologySlice::new(slice, cocycles, coboundaries)
                .expect("d^2 = 0 on a validated presentation")
        })
    }

    pub fn homogeneous_degree(&self, p: &GradedPoly) -> Result<Option<u32>, CdgaError> {
        match self.gens().degree(p) {
            PolyDegree::Zero => Ok(None),
            PolyDegree::Homogeneous(n) => Ok(Some(n)),
            PolyDegree::Mixed => Err(CdgaError::NotHomogeneous),
        }
    }

    /// Class coordinates of a homogeneous cocycle of degree `n`.
    pub fn class_of(&self, p: &GradedPoly, n: u32) -> Result<SparseVec, CdgaError> {
        let h = self.cohomology(n);
        let v = h.slice().coordinates(p)?;
        if !h.cocycles().contains(&v) {
            return Err(CdgaError::NotCocycle);
        }
        Ok(h.class_coordinates(&v))
    }

    /// Class coordinates of a product of cocycles. Assumes the inputs are
    /// cocycles of degree `n`.
    pub fn class_of_product(&self, a: &GradedPoly, b: &GradedPoly, n: u32) -> SparseVec {
        let h = self.cohomology(n);
        let p = self.gens().mul(a, b);
        h.class_coordinates(&h.slice().coordinates(&p).expect("product degree"))
    }

    /// Cup product of classes `(degree, class coordinates)`.
    pub fn class_product(&self, classes: &[(u32, SparseVec)]) -> (u32, SparseVec) {
        let mut degree = 0;
        let mut poly = self.gens().one();
        for (n, c) in classes {
            poly = self.gens().mul(&poly, &self.cohomology(*n).poly_of(c));
            degree += n;
        }
        let h = self.cohomology(degree);
        (
            degree,
            h.class_coordinates(&h.slice().coordinates(&poly).expect("product degree")),
        )
    }

    /// Vanishing certificate for the cohomology: a degree above which it is
    /// zero, with the status of that claim.
    pub fn vanishing_above(&self) -> Option<(u32, Status)> {
        if let Some(top) = self.pres.finite_top() {
            return Some((top, Status::Exact));
        }
        if self.pres.truncated_above.is_some() {
            return None;
        }
        self.pres.declared_top.map(|n| {
            (
                n,
                Status::conditional([format!("cohomology declared to vanish above degree {n}")]),
            )
        })
    }

    /// Working window for a computation requested through `cutoff`, and the
    /// status a nilpotency verdict in that window carries.
    pub fn window(&self, cutoff: u32, vanishing: Option<(u32, Status)>) -> (u32, Status) {
        if let Some(t) = self.pres.truncated_above {
            return (cutoff, Status::ModuloTruncation { truncated_above: t });
        }
        match vanishing {
            Some((top, status)) if top <= cutoff => (top, status),
            _ => (cutoff, Status::WindowLimited { cutoff }),
        }
    }

    /// Representatives of a minimal set of algebra generators of `H^+`
    /// through degree `window`.
    pub fn algebra_generators(&self, window: u32) -> Vec<(u32, GradedPoly)> {
        if let Some((w, gens)) = self.algebra_gens.lock().unwrap().as_ref() {
            if *w >= window {
                return gens.iter().filter(|(d, _)| *d <= window).cloned().collect();
            }
        }
        let mut gens: Vec<(u32, GradedPoly)> = Vec::new();
        for n in 1..=window {
            let h = self.cohomology(n);
            if h.dim() == 0 {
                continue;
            }
            let mut span = SubspaceBasis::zero(h.dim());
            for (a, g) in &gens {
                let lower = self.cohomology(n - a);
                for r in lower.representatives() {
                    span.insert(self.class_of_product(g, &r, n));
                }
            }
            for i in 0..h.dim() {
                if span.insert(SparseVec::unit(i)) {
                    gens.push((n, h.representative(i)));
                }
            }
        }
        *self.algebra_gens.lock().unwrap() = Some((window, gens.clone()));
        gens
    }

    /// Nilpotency of the augmentation ideal `H^+` through `cutoff`.
    pub fn cuplength(&self, cutoff: u32) -> Nilpotency {
        let (window, status) = self.window(cutoff, self.vanishing_above());
        let mut ideal = ClassIdeal::new();
        for n in 1..=window {
            ideal.set_degree(self, n, self.cohomology(n).representatives());
        }
        let gens = self.algebra_generators(window);
        ideal_nilpotency(self, &ideal, &gens, window, status)
    }
}

/// A graded subspace of cohomology with spanning cocycle representatives.
#[derive(Clone, Debug, Default)]
pub struct ClassIdeal {
    degrees: BTreeMap<u32, ClassSubspace>,
}

#[derive(Clone, Debug)]
pub struct ClassSubspace {
    pub span: SubspaceBasis,
    /// Independent cocycles whose classes span `span`.
    pub reps: Vec<GradedPoly>,
    /// For products: indices of the generator factors of each representative.
    pub factors: Vec<Vec<usize>>,
}

impl ClassIdeal {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets degree `n` to the span of the given cocycles, keeping an
    /// independent subset as representatives.
    pub fn set_degree(&mut self, a: &Cdga, n: u32, cocycles: Vec<GradedPoly>) {
        let h = a.cohomology(n);
        let mut span = SubspaceBasis::zero(h.dim());
        let mut reps = Vec::new();
        for p in cocycles {
            let c = h.class_coordinates(&h.slice().coordinates(&p).expect("degree"));
            if span.insert(c) {
                reps.push(p);
            }
        }
        if !reps.is_empty() {
            let factors = vec![Vec::new(); reps.len()];
            self.degrees.insert(
                n,
                ClassSubspace {
                    span,
                    reps,
                    factors,
                },
            );
        }
    }

    pub fn degree(&self, n: u32) -> Option<&ClassSubspace> {
        self.degrees.get(&n)
    }

    pub fn dim(&self, n: u32) -> usize {
        self.degrees.get(&n).map_or(0, |s| s.span.dim())
    }

    pub fn dims(&self) -> BTreeMap<u32, usize> {
        self.degrees
            .iter()
            .map(|(n, s)| (*n, s.span.dim()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &ClassSubspace)> + '_ {
        self.degrees.iter().map(|(n, s)| (*n, s))
    }

    /// Minimal ideal generators: classes not in `H^+ · I`, given algebra
    /// generators of `H^+`.
    pub fn ideal_generators(
        &self,
        a: &Cdga,
        algebra_gens: &[(u32, GradedPoly)],
    ) -> Vec<(u32, GradedPoly)> {
        let mut out = Vec::new();
        for (&n, sub) in &self.degrees {
            let h = a.cohomology(n);
            let mut span = SubspaceBasis::zero(h.dim());
            for (da, g) in algebra_gens {
                if *da >= n {
                    continue;
                }
                if let Some(lower) = self.degrees.get(&(n - da)) {
                    for r in &lower.reps {
                        span.insert(a.class_of_product(g, r, n));
                    }
                }
            }
            for r in &sub.reps {
                let c = h.class_coordinates(&h.slice().coordinates(r).expect("degree"));
                if span.insert(c) {
                    out.push((n, r.clone()));
                }
            }
        }
        out
    }
}

/// Nilpotency of a cohomology ideal: the least `k` with `I^{k+1} = 0`.
#[derive(Clone, Debug)]
pub struct Nilpotency {
    pub value: u32,
    pub status: Status,
    pub window: u32,
    /// Dimensions of `I^j` per degree, for `j = 1..=value` (and beyond, if
    /// a power was nonzero only above the window).
    pub power_dims: Vec<BTreeMap<u32, usize>>,
    /// Factors of a nonzero product of `value` ideal elements.
    pub certificate: Vec<GradedPoly>,
    pub certificate_degree: u32,
}

/// Computes `I^j = I^{j-1} · G` degreewise, where `G` generates `I` as an
/// ideal, until a power vanishes in the window.
pub fn ideal_nilpotency(
    a: &Cdga,
    ideal: &ClassIdeal,
    ideal_gens: &[(u32, GradedPoly)],
    window: u32,
    status: Status,
) -> Nilpotency {
    // Factor bookkeeping: `all_factors` holds the degree-one representatives
    // followed by the ideal generators; each power element records indices.
    let mut power = ideal.clone();
    let mut all_factors: Vec<GradedPoly> = Vec::new();
    for sub in power.degrees.values_mut() {
        sub.factors = sub
            .reps
            .iter()
            .map(|r| {
                all_factors.push(r.clone());
                vec![all_factors.len() - 1]
            })
            .collect();
    }
    let gen_offset = all_factors.len();
    all_factors.extend(ideal_gens.iter().map(|(_, g)| g.clone()));

    let mut powers_dims = Vec::new();
    let mut value = 0;
    let mut certificate = Vec::new();
    let mut certificate_degree = 0;
    let mut j = 1u32;
    while !power.is_zero() {
        value = j;
        powers_dims.push(power.dims());
        let (&n, top) = power.degrees.iter().next().expect("nonzero power");
        certificate = top.factors[0]
            .iter()
            .map(|&f| all_factors[f].clone())
            .collect();
        certificate_degree = n;

        let mut next = ClassIdeal::new();
        for n in 1..=window {
            let h = a.cohomology(n);
            if h.dim() == 0 {
                continue;
            }
            let mut span = SubspaceBasis::zero(h.dim());
            let mut reps = Vec::new();
            let mut factors = Vec::new();
            for (gi, (db, g)) in ideal_gens.iter().enumerate() {
                if *db >= n {
                    continue;
                }
                let Some(lower) = power.degrees.get(&(n - db)) else {
                    continue;
                };
                for (r, fr) in lower.reps.iter().zip(&lower.factors) {
                    let p = a.gens().mul(r, g);
                    if p.is_zero() {
                        continue;
                    }
                    let c = h.class_coordinates(&h.slice().coordinates(&p).expect("degree"));
                    if span.insert(c) {
                        reps.push(p);
                        let mut f = fr.clone();
                        f.push(gen_offset + gi);
                        factors.push(f);
                    }
                }
                if span.dim() == h.dim() {
                    break;
                }
            }
            if !reps.is_empty() {
                next.degrees.insert(
                    n,
                    ClassSubspace {
                        span,
                        reps,
                        factors,
                    },
                );
            }
        }
        power = next;
        j += 1;
    }
    Nilpotency {
        value,
        status,
        window,
        power_dims: powers_dims,
        certificate,
        certificate_degree,
    }
}

/// A CDGA morphism given on generators.
#[derive(Clone, Debug)]
pub struct CdgaMorphism {
    pub source: Arc<Cdga>,
    pub target: Arc<Cdga>,
    pub images: Vec<GradedPoly>,
}

impl CdgaMorphism {
    /// Checks degrees and `φ(d s) = d(φ s)` on every generator.
    pub fn new(
        source: Arc<Cdga>,
        target: Arc<Cdga>,
        images: Vec<GradedPoly>,
    ) -> Result<Self, CdgaError> {
        if images.len() != source.gens().len() {
            return Err(CdgaError::MorphismArity {
                expected: source.gens().len(),
                found: images.len(),
            });
        }
        let phi = Self {
            source,
            target,
            images,
        };
        for (i, g) in phi.source.gens().generators().iter().enumerate() {
            match phi.target.gens().degree(&phi.images[i]) {
                PolyDegree::Zero => {}
                PolyDegree::Homogeneous(k) if k == g.degree => {}
                _ => {
                    return Err(CdgaError::MorphismDegree {
                        generator: g.name.clone(),
                    })
                }
            }
            let lhs = phi.apply(phi.source.presentation().d_generator(i));
            let rhs = phi.target.presentation().d(&phi.images[i]);
            let residue = lhs.sub(&rhs);
            if !residue.is_zero() {
                return Err(CdgaError::MorphismNotChainMap {
                    generator: g.name.clone(),
                    residue: phi.target.gens().format(&residue),
                });
            }
        }
        Ok(phi)
    }

    pub fn identity(a: Arc<Cdga>) -> Self {
        let images = (0..a.gens().len())
            .map(|i| a.gens().generator_poly(i))
            .collect();
        Self {
            source: a.clone(),
            target: a,
            images,
        }
    }

    pub fn apply_monomial(&self, m: &Monomial) -> GradedPoly {
        let t = self.target.gens();
        let mut out = t.one();
        for (i, &e) in m.exponents().iter().enumerate() {
            for _ in 0..e {
                out = t.mul(&out, &self.images[i]);
                if out.is_zero() {
                    return out;
                }
            }
        }
        out
    }

    pub fn apply(&self, p: &GradedPoly) -> GradedPoly {
        let mut out = GradedPoly::zero();
        for (m, c) in p.terms() {
            out = out.add(&self.apply_monomial(m).scale(c));
        }
        out
    }

    /// Composite `other ∘ self`.
    pub fn then(&self, other: &CdgaMorphism) -> Result<CdgaMorphism, CdgaError> {
        let images = self.images.iter().map(|p| other.apply(p)).collect();
        CdgaMorphism::new(self.source.clone(), other.target.clone(), images)
    }

    /// Matrix of the map on degree-`n` monomial coordinates.
    pub fn coordinate_matrix(&self, n: u32) -> RationalMatrix {
        let s = self.source.slice(n);
        let t = self.target.slice(n);
        let cols: Vec<SparseVec> = s
            .monomials()
            .iter()
            .map(|m| {
                t.coordinates(&self.apply_monomial(m))
                    .expect("morphism preserves degree")
            })
            .collect();
        RationalMatrix::from_rows(t.dim(), cols).transpose()
    }

    /// `H^n(φ)` in class coordinates, with its kernel.
    pub fn induced_map(&self, n: u32) -> InducedMap {
        let hs = self.source.cohomology(n);
        let ht = self.target.cohomology(n);
        let cols: Vec<SparseVec> = (0..hs.dim())
            .map(|i| {
                let img = self.apply(&hs.representative(i));
                ht.class_coordinates(&ht.slice().coordinates(&img).expect("degree"))
            })
            .collect();
        let matrix = RationalMatrix::from_rows(ht.dim(), cols).transpose();
        let kernel = kernel(&matrix);
        InducedMap {
            degree: n,
            matrix,
            kernel,
        }
    }
}

#[derive(Clone, Debug)]
pub struct InducedMap {
    pub degree: u32,
    /// target classes × source classes
    pub matrix: RationalMatrix,
    /// kernel, as a subspace of source class coordinates
    pub kernel: SubspaceBasis,
}

impl InducedMap {
    pub fn is_surjective(&self) -> bool {
        self.matrix.rank() == self.matrix.rows()
    }

    pub fn is_injective(&self) -> bool {
        self.kernel.is_zero()
    }
}

/// Euler characteristic `Σ (-1)^n dim A^n` of the underlying algebra.
pub fn algebra_euler_characteristic(gens: &GeneratorSet) -> Option<i64> {
    gens.all_odd().then(|| {
        let top = gens.degree_sum();
        gens.slice_dimensions(top)
            .iter()
            .enumerate()
            .map(|(n, &d)| if n % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    const F: Block = Block::Fiber { copy: 0 };

    fn ky() -> Arc<Cdga> {
        Cdga::new(
            CdgaPresentation::parse(&[("x", 3, F), ("y", 3, F), ("z", 5, F)], &[("z", "x*y")])
                .unwrap(),
        )
        .unwrap()
    }

    fn s4() -> Arc<Cdga> {
        let mut p = CdgaPresentation::parse(&[("x", 4, F), ("z", 7, F)], &[("z", "x^2")]).unwrap();
        p.declared_top = Some(4);
        Cdga::new(p).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(
            CdgaPresentation::parse(&[("x", 3, F), ("y", 3, F), ("z", 5, F)], &[("z", "x*y")])
                .unwrap()
                .validate()
                .is_ok()
        );
        let stiefel_base = CdgaPresentation::parse(
            &[("a", 6, Block::Base), ("b", 11, Block::Base)],
            &[("b", "a^2")],
        )
        .unwrap();
        assert!(stiefel_base.validate().is_ok());
        let bad = CdgaPresentation::parse(&[("x", 3, F), ("z", 5, F)], &[("z", "x")]).unwrap();
        assert!(
            matches!(bad.validate(), Err(CdgaError::DegreeMismatch { generator, .. }) if generator == "z")
        );
        let not_closed = CdgaPresentation::parse(
            &[("x", 3, F), ("y", 3, F), ("z", 5, F), ("w", 6, F)],
            &[("z", "x*y"), ("w", "z")],
        )
        .unwrap();
        assert!(not_closed.validate().is_err());
        let leibniz = CdgaPresentation::parse(
            &[("x", 2, F), ("y", 3, F), ("w", 4, F)],
            &[("y", "x^2"), ("w", "x*y")],
        )
        .unwrap();
        assert!(
            matches!(leibniz.validate(), Err(CdgaError::LeibnizSquareNonzero { generator, .. }) if generator == "w")
        );
    }

    #[test]
    fn differential_matrix_ky() {
        let a = ky();
        assert!(a.differential_matrix(3).is_zero());
        let m = a.differential_matrix(5);
        assert_eq!((m.rows(), m.cols()), (1, 1));
        assert_eq!(m.get(0, 0), q(1));
        for n in 0..=11 {
            let prod = a
                .differential_matrix(n + 1)
                .mul(&a.differential_matrix(n))
                .unwrap();
            assert!(prod.is_zero(), "d^2 in degree {n}");
        }
    }

    #[test]
    fn ky_cohomology_dims() {
        let a = ky();
        let dims: Vec<usize> = [0, 3, 6, 8, 11]
            .iter()
            .map(|&n| a.cohomology(n).dim())
            .collect();
        assert_eq!(dims, vec![1, 2, 0, 2, 1]);
    }

    #[test]
    fn even_sphere_cohomology() {
        let a = s4();
        let dims: Vec<usize> = [0, 4, 8].iter().map(|&n| a.cohomology(n).dim()).collect();
        assert_eq!(dims, vec![1, 1, 0]);
    }

    #[test]
    fn identity_induced_map() {
        let a = ky();
        let id = CdgaMorphism::identity(a);
        for n in [3, 8, 11] {
            let m = id.induced_map(n);
            assert_eq!(m.matrix, RationalMatrix::identity(m.matrix.rows()));
            assert!(m.is_injective());
        }
    }

    #[test]
    fn unit_class_product() {
        let a = ky();
        let (n, c) = a.class_product(&[(0, SparseVec::unit(0)), (8, SparseVec::unit(1))]);
        assert_eq!((n, c), (8, SparseVec::unit(1)));
    }

    #[test]
    fn cuplength_examples() {
        let point = Cdga::new(CdgaPresentation::new(GeneratorSet::empty(), vec![])).unwrap();
        let c = point.cuplength(10);
        assert_eq!((c.value, c.status), (0, Status::Exact));
        let ext =
            Cdga::new(CdgaPresentation::parse(&[("x", 3, F), ("y", 5, F)], &[]).unwrap()).unwrap();
        let c = ext.cuplength(100);
        assert_eq!((c.value, c.status), (2, Status::Exact));
        let c = s4().cuplength(40);
        assert_eq!(c.value, 1);
        assert!(matches!(c.status, Status::Conditional { .. }));
        // the KY space has cup-length 2: x * (y z) = x y z is the top class
        assert_eq!(ky().cuplength(100).value, 2);
    }

    #[test]
    fn window_without_certificate_is_limited() {
        let p = CdgaPresentation::parse(&[("x", 4, F), ("z", 7, F)], &[("z", "x^2")]).unwrap();
        let a = Cdga::new(p).unwrap();
        let c = a.cuplength(20);
        assert_eq!(c.value, 1);
        assert_eq!(c.status, Status::WindowLimited { cutoff: 20 });
    }
}
