//! Relative Sullivan models of fibrations `F → X → B`, their r-fold
//! fiberwise products `C ⊗ (ΛV)^{⊗r}`, the diagonal `id ⊗ μ_r`, and the
//! degreewise kernel ideal with its powers.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::cdga::{Cdga, CdgaError, CdgaMorphism, CdgaPresentation};
use crate::graded::{Block, GeneratorSet, GradedError, GradedPoly};
use crate::linalg::{kernel, SparseVec, SubspaceBasis};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FibrationError {
    #[error("base generator `{0}` has a differential involving fiber generators")]
    BaseNotSubalgebra(String),
    #[error("no nilpotence ordering exists for fiber generators {0:?}")]
    NotRelativeSullivan(Vec<String>),
    #[error("generator name `{0}` collides with a copied fiber generator")]
    NameCollision(String),
    #[error("invalid odd-degree extension split: {0}")]
    SplitInvalid(SplitCondition),
    #[error("ideal power window {requested} exceeds the computed window {available}")]
    WindowTooSmall { requested: u32, available: u32 },
    #[error("r must be at least 1")]
    ZeroCopies,
    #[error(transparent)]
    Cdga(#[from] CdgaError),
}

impl From<GradedError> for FibrationError {
    fn from(e: GradedError) -> Self {
        FibrationError::Cdga(CdgaError::Graded(e))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum SplitCondition {
    #[error("`{0}` is not a fiber generator")]
    UnknownGenerator(String),
    #[error("even fiber generator `{0}` must be kept")]
    EvenGeneratorDropped(String),
    #[error("discarded generator `{0}` is not of odd degree")]
    DiscardedNotOdd(String),
    #[error("the fibration is not pure")]
    NotPure,
    #[error("the differential of kept generator `{0}` involves a discarded generator")]
    NotClosed(String),
}

/// A CDGA presentation partitioned into a base block `C` and a fiber
/// block `V`, with a verified nilpotence ordering of `V`.
#[derive(Clone, Debug)]
pub struct FibrationPresentation {
    total: Arc<Cdga>,
    base: Vec<usize>,
    fiber: Vec<usize>,
    nilpotence_order: Vec<usize>,
    /// Formal dimension of the fiber, if declared by the user.
    pub declared_fiber_dim: Option<u32>,
    /// Formal dimension of the base, if declared by the user.
    pub declared_base_dim: Option<u32>,
}

/// Applies a substitution `generator i ↦ images[i]` to a polynomial.
pub fn substitute(p: &GradedPoly, images: &[GradedPoly], target: &GeneratorSet) -> GradedPoly {
    let mut out = GradedPoly::zero();
    for (m, c) in p.terms() {
        let mut term = target.one();
        for (i, &e) in m.exponents().iter().enumerate() {
            for _ in 0..e {
                term = target.mul(&term, &images[i]);
            }
        }
        out = out.add(&term.scale(c));
    }
    out
}

/// Formal dimension `Σ_odd |v| − Σ_even (|v| − 1)` of an elliptic minimal
/// Sullivan algebra on the given generators.
pub fn elliptic_formal_dimension(gens: &GeneratorSet) -> i64 {
    gens.generators()
        .iter()
        .map(|g| {
            if g.is_odd() {
                g.degree as i64
            } else {
                -(g.degree as i64 - 1)
            }
        })
        .sum()
}

impl FibrationPresentation {
    /// Builds from a presentation whose generators carry `Base`/`Fiber`
    /// blocks. Validates the CDGA, the sub-CDGA condition on the base, and
    /// finds the nilpotence ordering of the fiber generators.
    pub fn new(pres: CdgaPresentation) -> Result<Self, FibrationError> {
        let total = Cdga::new(pres)?;
        let gens = total.gens();
        let base: Vec<usize> = (0..gens.len())
            .filter(|&i| gens.generator(i).block.is_base())
            .collect();
        let fiber: Vec<usize> = (0..gens.len())
            .filter(|&i| gens.generator(i).block.is_fiber())
            .collect();
        let involved = |i: usize| -> Vec<usize> {
            let mut used = vec![false; gens.len()];
            for (m, _) in total.presentation().d_generator(i).terms() {
                for (j, &e) in m.exponents().iter().enumerate() {
                    if e > 0 {
                        used[j] = true;
                    }
                }
            }
            (0..gens.len()).filter(|&j| used[j]).collect()
        };
        for &b in &base {
            if involved(b)
                .iter()
                .any(|&j| gens.generator(j).block.is_fiber())
            {
                return Err(FibrationError::BaseNotSubalgebra(
                    gens.generator(b).name.clone(),
                ));
            }
        }
        let mut placed = vec![false; gens.len()];
        for &b in &base {
            placed[b] = true;
        }
        let mut order = Vec::new();
        let mut remaining: Vec<usize> = fiber.clone();
        while !remaining.is_empty() {
            let ready = remaining
                .iter()
                .position(|&v| involved(v).iter().all(|&j| placed[j]));
            match ready {
                Some(pos) => {
                    let v = remaining.remove(pos);
                    placed[v] = true;
                    order.push(v);
                }
                None => {
                    return Err(FibrationError::NotRelativeSullivan(
                        remaining
                            .iter()
                            .map(|&v| gens.generator(v).name.clone())
                            .collect(),
                    ))
                }
            }
        }
        Ok(Self {
            total,
            base,
            fiber,
            nilpotence_order: order,
            declared_fiber_dim: None,
            declared_base_dim: None,
        })
    }

    pub fn total(&self) -> &Arc<Cdga> {
        &self.total
    }

    pub fn gens(&self) -> &GeneratorSet {
        self.total.gens()
    }

    pub fn base_indices(&self) -> &[usize] {
        &self.base
    }

    pub fn fiber_indices(&self) -> &[usize] {
        &self.fiber
    }

    pub fn nilpotence_order(&self) -> Vec<String> {
        self.nilpotence_order
            .iter()
            .map(|&i| self.gens().generator(i).name.clone())
            .collect()
    }

    pub fn fiber_names(&self) -> Vec<String> {
        self.fiber
            .iter()
            .map(|&i| self.gens().generator(i).name.clone())
            .collect()
    }

    pub fn truncated_above(&self) -> Option<u32> {
        self.total.presentation().truncated_above
    }

    /// Sub-presentation on the chosen generators (ascending index), with
    /// every other generator sent to zero in the differentials.
    fn restrict(
        &self,
        keep: &[usize],
        block_of: impl Fn(Block) -> Block,
    ) -> Result<CdgaPresentation, FibrationError> {
        let gens = self.gens();
        let sub = GeneratorSet::new(keep.iter().map(|&i| {
            let g = gens.generator(i);
            (g.name.clone(), g.degree, block_of(g.block))
        }))?;
        let mut images = vec![GradedPoly::zero(); gens.len()];
        for (new, &old) in keep.iter().enumerate() {
            images[old] = sub.generator_poly(new);
        }
        let differential = keep
            .iter()
            .map(|&i| substitute(self.total.presentation().d_generator(i), &images, &sub))
            .collect();
        let mut pres = CdgaPresentation::new(sub, differential);
        pres.truncated_above = self.truncated_above();
        Ok(pres)
    }

    /// The base CDGA `C`.
    pub fn base_cdga(&self) -> Result<Arc<Cdga>, FibrationError> {
        let mut pres = self.restrict(&self.base, |b| b)?;
        pres.truncated_above = None;
        pres.declared_top = self.declared_base_dim;
        Ok(Cdga::new(pres)?)
    }

    /// The fiber model `ΛV`: base generators set to zero.
    pub fn fiber_cdga(&self) -> Result<Arc<Cdga>, FibrationError> {
        let mut pres = self.restrict(&self.fiber, |b| b)?;
        pres.declared_top = self.declared_fiber_dim;
        Ok(Cdga::new(pres)?)
    }

    /// The fibration `F → F → *`.
    pub fn fiber_over_point(&self) -> Result<FibrationPresentation, FibrationError> {
        let pres = self.restrict(&self.fiber, |b| b)?;
        let mut f = FibrationPresentation::new(pres)?;
        f.declared_fiber_dim = self.declared_fiber_dim;
        f.declared_base_dim = Some(0);
        Ok(f)
    }

    /// The projection `C ⊗ ΛV → ΛV` as a CDGA morphism.
    pub fn fiber_projection(&self) -> Result<CdgaMorphism, FibrationError> {
        let fiber = self.fiber_cdga()?;
        let mut images = vec![GradedPoly::zero(); self.gens().len()];
        for (new, &old) in self.fiber.iter().enumerate() {
            images[old] = fiber.gens().generator_poly(new);
        }
        Ok(CdgaMorphism::new(self.total.clone(), fiber, images)?)
    }

    /// Formal dimension of the fiber and the assumption it rests on, if any.
    pub fn fiber_dimension(&self, fiber_elliptic_asserted: bool) -> Option<(u32, Option<String>)> {
        if let Some(d) = self.declared_fiber_dim {
            return Some((d, Some(format!("fiber formal dimension declared as {d}"))));
        }
        if self.truncated_above().is_some() {
            return None;
        }
        let fiber = self.restrict(&self.fiber, |b| b).ok()?;
        if fiber.gens.all_odd() {
            return Some((fiber.gens.degree_sum(), None));
        }
        if fiber_elliptic_asserted {
            let d = elliptic_formal_dimension(&fiber.gens);
            if d >= 0 {
                return Some((
                    d as u32,
                    Some("fiber elliptic (formal dimension from generator degrees)".into()),
                ));
            }
        }
        None
    }

    /// Formal dimension of the base and the assumption it rests on, if any.
    pub fn base_dimension(&self) -> Option<(u32, Option<String>)> {
        if self.base.is_empty() {
            return Some((0, None));
        }
        if let Some(d) = self.declared_base_dim {
            return Some((d, Some(format!("base formal dimension declared as {d}"))));
        }
        let base = self.base_cdga().ok()?;
        if base.gens().all_odd() {
            let top = base.gens().degree_sum();
            let nonzero = (0..=top)
                .rev()
                .find(|&n| base.cohomology(n).dim() > 0)
                .unwrap_or(0);
            return Some((nonzero, None));
        }
        None
    }

    /// The sub-fibration `C ↪ C ⊗ Λ(keep)`; fails if a kept differential
    /// leaves the subalgebra.
    pub fn sub_fibration(&self, keep: &[usize]) -> Result<FibrationPresentation, FibrationError> {
        let mut idx: Vec<usize> = self.base.iter().chain(keep).copied().collect();
        idx.sort_unstable();
        idx.dedup();
        let gens = self.gens();
        for &k in keep {
            for (m, _) in self.total.presentation().d_generator(k).terms() {
                for (j, &e) in m.exponents().iter().enumerate() {
                    if e > 0 && !idx.contains(&j) {
                        return Err(FibrationError::SplitInvalid(SplitCondition::NotClosed(
                            gens.generator(k).name.clone(),
                        )));
                    }
                }
            }
        }
        let pres = self.restrict(&idx, |b| b)?;
        let mut f = FibrationPresentation::new(pres)?;
        f.declared_base_dim = self.declared_base_dim;
        Ok(f)
    }
}

/// Counts of odd and even fiber generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OddnessProfile {
    pub all_fiber_odd: bool,
    pub dim_odd: usize,
    pub dim_even: usize,
}

pub fn oddness_profile(f: &FibrationPresentation) -> OddnessProfile {
    let dim_odd = f
        .fiber
        .iter()
        .filter(|&&i| f.gens().generator(i).is_odd())
        .count();
    let dim_even = f.fiber.len() - dim_odd;
    OddnessProfile {
        all_fiber_odd: dim_even == 0,
        dim_odd,
        dim_even,
    }
}

/// Pure: even fiber generators are closed and odd fiber generators have
/// differentials in `C ⊗ Λ(V^even)`.
pub fn pure_check(f: &FibrationPresentation) -> bool {
    let gens = f.gens();
    f.fiber.iter().all(|&v| {
        let dv = f.total.presentation().d_generator(v);
        if !gens.generator(v).is_odd() {
            return dv.is_zero();
        }
        dv.terms().all(|(m, _)| {
            m.exponents().iter().enumerate().all(|(j, &e)| {
                e == 0 || gens.generator(j).block.is_base() || !gens.generator(j).is_odd()
            })
        })
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TnczDegree {
    pub degree: u32,
    pub fiber_dim: usize,
    pub image_rank: usize,
    pub surjective: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TnczReport {
    pub window: u32,
    pub degrees: Vec<TnczDegree>,
}

impl TnczReport {
    pub fn all_surjective(&self) -> bool {
        self.degrees.iter().all(|d| d.surjective)
    }

    pub fn first_failure(&self) -> Option<u32> {
        self.degrees
            .iter()
            .find(|d| !d.surjective)
            .map(|d| d.degree)
    }
}

/// Surjectivity of `H^n(C ⊗ ΛV) → H^n(ΛV)` for `n ≤ cutoff`.
pub fn tncz_check(f: &FibrationPresentation, cutoff: u32) -> Result<TnczReport, FibrationError> {
    let proj = f.fiber_projection()?;
    let degrees = (0..=cutoff)
        .map(|n| {
            let m = proj.induced_map(n);
            let rank = m.matrix.rank();
            TnczDegree {
                degree: n,
                fiber_dim: m.matrix.rows(),
                image_rank: rank,
                surjective: rank == m.matrix.rows(),
            }
        })
        .collect();
    Ok(TnczReport {
        window: cutoff,
        degrees,
    })
}

/// Result of splitting off finitely many odd fiber generators.
#[derive(Clone, Debug)]
pub struct ExtensionSplit {
    pub hat: FibrationPresentation,
    pub discarded: Vec<String>,
    pub kept: Vec<String>,
    /// Whether the kept fiber has as many odd as even generators.
    pub hat_has_f0_shape: bool,
}

impl ExtensionSplit {
    pub fn m(&self) -> u32 {
        self.discarded.len() as u32
    }
}

/// Splits `f` as an odd-degree extension of `C ↪ C ⊗ Λ(keep)`.
pub fn extension_split(
    f: &FibrationPresentation,
    keep: &[&str],
) -> Result<ExtensionSplit, FibrationError> {
    let gens = f.gens();
    let mut keep_idx = Vec::new();
    for name in keep {
        match gens.index_of(name) {
            Some(i) if gens.generator(i).block.is_fiber() => keep_idx.push(i),
            _ => {
                return Err(FibrationError::SplitInvalid(
                    SplitCondition::UnknownGenerator(name.to_string()),
                ))
            }
        }
    }
    let discarded: Vec<usize> = f
        .fiber
        .iter()
        .copied()
        .filter(|i| !keep_idx.contains(i))
        .collect();
    for &w in &discarded {
        let g = gens.generator(w);
        if !g.is_odd() {
            return Err(FibrationError::SplitInvalid(
                SplitCondition::EvenGeneratorDropped(g.name.clone()),
            ));
        }
    }
    if !discarded.is_empty() && !pure_check(f) {
        return Err(FibrationError::SplitInvalid(SplitCondition::NotPure));
    }
    let hat = f.sub_fibration(&keep_idx)?;
    let profile = oddness_profile(&hat);
    let mut kept: Vec<usize> = keep_idx.clone();
    kept.sort_unstable();
    Ok(ExtensionSplit {
        hat,
        discarded: discarded
            .iter()
            .map(|&i| gens.generator(i).name.clone())
            .collect(),
        kept: kept
            .iter()
            .map(|&i| gens.generator(i).name.clone())
            .collect(),
        hat_has_f0_shape: profile.dim_odd == profile.dim_even,
    })
}

/// The r-fold fiberwise product model with its structure maps.
#[derive(Clone, Debug)]
pub struct RFoldModel {
    pub r: u32,
    pub cdga: Arc<Cdga>,
    /// `id ⊗ μ_r` into the total presentation.
    pub diagonal: CdgaMorphism,
    /// `id ⊗ i_λ` for `λ = 1..=r`.
    pub copy_injections: Vec<CdgaMorphism>,
    /// For each model generator: the original generator index and its copy (0 for base).
    pub origin: Vec<(usize, u32)>,
}

/// Builds `C ⊗ (ΛV)^{⊗r}`. Generators keep the original order with fiber
/// generators expanded into adjacent copies `v1, …, vr`; for `r = 1` the
/// total presentation is returned unchanged.
pub fn rfold_model(f: &FibrationPresentation, r: u32) -> Result<RFoldModel, FibrationError> {
    if r == 0 {
        return Err(FibrationError::ZeroCopies);
    }
    let gens = f.gens();
    if r == 1 {
        let id = CdgaMorphism::identity(f.total.clone());
        let origin = gens
            .generators()
            .iter()
            .map(|g| (g.index, if g.block.is_base() { 0 } else { 1 }))
            .collect();
        return Ok(RFoldModel {
            r,
            cdga: f.total.clone(),
            diagonal: id.clone(),
            copy_injections: vec![id],
            origin,
        });
    }
    let mut layout = Vec::new();
    let mut origin = Vec::new();
    for g in gens.generators() {
        if g.block.is_base() {
            layout.push((g.name.clone(), g.degree, Block::Base));
            origin.push((g.index, 0));
        } else {
            for lambda in 1..=r {
                layout.push((
                    format!("{}{}", g.name, lambda),
                    g.degree,
                    Block::Fiber { copy: lambda },
                ));
                origin.push((g.index, lambda));
            }
        }
    }
    let model_gens = match GeneratorSet::new(layout) {
        Ok(s) => s,
        Err(GradedError::DuplicateName(n)) => return Err(FibrationError::NameCollision(n)),
        Err(e) => return Err(e.into()),
    };
    let position = |orig: usize, lambda: u32| -> usize {
        origin
            .iter()
            .position(|&(o, l)| o == orig && (l == lambda || l == 0))
            .expect("generator position")
    };
    let copy_images: Vec<Vec<GradedPoly>> = (1..=r)
        .map(|lambda| {
            (0..gens.len())
                .map(|i| model_gens.generator_poly(position(i, lambda)))
                .collect()
        })
        .collect();
    let mut differential = vec![GradedPoly::zero(); model_gens.len()];
    for (k, &(orig, lambda)) in origin.iter().enumerate() {
        let lam = lambda.max(1) as usize;
        differential[k] = substitute(
            f.total.presentation().d_generator(orig),
            &copy_images[lam - 1],
            &model_gens,
        );
    }
    let mut pres = CdgaPresentation::new(model_gens, differential);
    pres.truncated_above = f.truncated_above();
    let cdga = Cdga::new(pres)?;
    let diag_images = origin
        .iter()
        .map(|&(orig, _)| gens.generator_poly(orig))
        .collect();
    let diagonal = CdgaMorphism::new(cdga.clone(), f.total.clone(), diag_images)?;
    let copy_injections = copy_images
        .into_iter()
        .map(|images| CdgaMorphism::new(f.total.clone(), cdga.clone(), images))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RFoldModel {
        r,
        cdga,
        diagonal,
        copy_injections,
        origin,
    })
}

impl RFoldModel {
    /// Model generator index of copy `lambda` of original generator `orig`.
    pub fn copy_index(&self, orig: usize, lambda: u32) -> Option<usize> {
        self.origin
            .iter()
            .position(|&(o, l)| o == orig && (l == lambda || (l == 0 && self.r > 1) || self.r == 1))
    }

    /// `v^{(λ)} − v^{(μ)}` for a fiber generator `v`.
    pub fn difference(&self, orig: usize, lambda: u32, mu: u32) -> GradedPoly {
        let g = self.cdga.gens();
        let a = g.generator_poly(self.copy_index(orig, lambda).expect("copy"));
        let b = g.generator_poly(self.copy_index(orig, mu).expect("copy"));
        a.sub(&b)
    }
}

/// A graded ideal of an r-fold model, stored degreewise in monomial
/// coordinates, together with the power it represents.
#[derive(Clone, Debug)]
pub struct GradedIdeal {
    pub power: u32,
    pub window: u32,
    degrees: BTreeMap<u32, SubspaceBasis>,
}

impl GradedIdeal {
    pub fn degree(&self, n: u32) -> Option<&SubspaceBasis> {
        self.degrees.get(&n)
    }

    pub fn dim(&self, n: u32) -> usize {
        self.degrees.get(&n).map_or(0, SubspaceBasis::dim)
    }

    pub fn dims(&self) -> BTreeMap<u32, usize> {
        self.degrees.iter().map(|(n, s)| (*n, s.dim())).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.degrees.values().all(SubspaceBasis::is_zero)
    }

    pub fn contains(&self, a: &Cdga, p: &GradedPoly) -> bool {
        match a.homogeneous_degree(p) {
            Ok(None) => true,
            Ok(Some(n)) => match (self.degrees.get(&n), a.slice(n).coordinates(p)) {
                (Some(s), Ok(v)) => s.contains(&v),
                _ => false,
            },
            Err(_) => false,
        }
    }

    pub fn basis_polys(&self, a: &Cdga, n: u32) -> Vec<GradedPoly> {
        let slice = a.slice(n);
        self.degrees.get(&n).map_or_else(Vec::new, |s| {
            s.basis().map(|v| slice.from_coordinates(v)).collect()
        })
    }
}

/// Degreewise kernel of the diagonal through `window`.
pub fn kernel_ideal(m: &RFoldModel, window: u32) -> GradedIdeal {
    let degrees = (0..=window)
        .map(|n| (n, kernel(&m.diagonal.coordinate_matrix(n))))
        .filter(|(_, s)| !s.is_zero())
        .collect();
    GradedIdeal {
        power: 1,
        window,
        degrees,
    }
}

/// Successive powers `I, I², I³, …` of a kernel ideal, computed as
/// `I^k = I^{k-1} · G` for a minimal generating set `G` of `I`.
#[derive(Clone, Debug)]
pub struct IdealTower {
    cdga: Arc<Cdga>,
    generators: Vec<(u32, GradedPoly)>,
    powers: Vec<GradedIdeal>,
}

fn multiply_into(a: &Cdga, v: &SparseVec, from: u32, g: &GradedPoly, target: &mut SubspaceBasis) {
    let p = a.gens().mul(&a.slice(from).from_coordinates(v), g);
    if !p.is_zero() {
        let n = from + a.homogeneous_degree(g).ok().flatten().unwrap_or(0);
        target.insert(a.slice(n).coordinates(&p).expect("product degree"));
    }
}

impl IdealTower {
    pub fn new(cdga: Arc<Cdga>, ideal: GradedIdeal) -> Self {
        assert_eq!(ideal.power, 1);
        let gens = cdga.gens();
        let mut generators = Vec::new();
        for (&n, sub) in &ideal.degrees {
            let mut decomposable = SubspaceBasis::zero(sub.ambient_dim());
            for (gi, g) in gens.generators().iter().enumerate() {
                if g.degree > n {
                    continue;
                }
                if let Some(lower) = ideal.degrees.get(&(n - g.degree)) {
                    let gp = gens.generator_poly(gi);
                    for v in lower.basis() {
                        multiply_into(&cdga, v, n - g.degree, &gp, &mut decomposable);
                    }
                }
            }
            let slice = cdga.slice(n);
            for v in sub.basis() {
                if decomposable.insert(v.clone()) {
                    generators.push((n, slice.from_coordinates(v)));
                }
            }
        }
        Self {
            cdga,
            generators,
            powers: vec![ideal],
        }
    }

    /// Minimal ideal generators of `I` in the window.
    pub fn generators(&self) -> &[(u32, GradedPoly)] {
        &self.generators
    }

    pub fn window(&self) -> u32 {
        self.powers[0].window
    }

    /// `I^k` through `window` (which may not exceed the kernel's window).
    pub fn power(&mut self, k: u32, window: u32) -> Result<&GradedIdeal, FibrationError> {
        assert!(k >= 1);
        if window > self.window() {
            return Err(FibrationError::WindowTooSmall {
                requested: window,
                available: self.window(),
            });
        }
        while self.powers.len() < k as usize {
            let prev = self.powers.last().expect("first power");
            let w = self.window();
            let mut degrees = BTreeMap::new();
            for n in 0..=w {
                let mut span = SubspaceBasis::zero(self.cdga.slice(n).dim());
                for (db, g) in &self.generators {
                    if *db > n {
                        continue;
                    }
                    if let Some(lower) = prev.degrees.get(&(n - db)) {
                        for v in lower.basis() {
                            multiply_into(&self.cdga, v, n - db, g, &mut span);
                        }
                    }
                }
                if !span.is_zero() {
                    degrees.insert(n, span);
                }
            }
            let power = prev.power + 1;
            self.powers.push(GradedIdeal {
                power,
                window: w,
                degrees,
            });
        }
        Ok(&self.powers[k as usize - 1])
    }
}

/// Convenience: `I^k` of the kernel ideal through `window`.
pub fn ideal_power(
    m: &RFoldModel,
    ideal: &GradedIdeal,
    k: u32,
    window: u32,
) -> Result<GradedIdeal, FibrationError> {
    if window > ideal.window {
        return Err(FibrationError::WindowTooSmall {
            requested: window,
            available: ideal.window,
        });
    }
    if k == 1 {
        return Ok(ideal.clone());
    }
    let mut tower = IdealTower::new(m.cdga.clone(), ideal.clone());
    Ok(tower.power(k, window)?.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: Block = Block::Base;
    const F: Block = Block::Fiber { copy: 0 };

    fn not_tncz() -> FibrationPresentation {
        FibrationPresentation::new(
            CdgaPresentation::parse(&[("x", 3, B), ("y", 3, F), ("z", 5, F)], &[("z", "x*y")])
                .unwrap(),
        )
        .unwrap()
    }

    fn stiefel() -> FibrationPresentation {
        FibrationPresentation::new(
            CdgaPresentation::parse(
                &[
                    ("a", 6, B),
                    ("b", 11, B),
                    ("x", 4, F),
                    ("y", 5, F),
                    ("z", 7, F),
                ],
                &[("b", "a^2"), ("y", "2*a"), ("z", "x^2")],
            )
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_base_depending_on_fiber() {
        let p = CdgaPresentation::parse(&[("y", 3, F), ("u", 4, B)], &[]).unwrap();
        assert!(FibrationPresentation::new(p).is_ok());
        let p = CdgaPresentation::parse(&[("x", 2, F), ("w", 3, B)], &[("w", "x^2")]).unwrap();
        assert!(
            matches!(FibrationPresentation::new(p), Err(FibrationError::BaseNotSubalgebra(n)) if n == "w")
        );
    }

    #[test]
    fn nilpotence_order_is_found() {
        let p = CdgaPresentation::parse(&[("z", 5, F), ("x", 3, F), ("y", 3, F)], &[("z", "x*y")])
            .unwrap();
        let f = FibrationPresentation::new(p).unwrap();
        assert_eq!(f.nilpotence_order(), vec!["x", "y", "z"]);
    }

    #[test]
    fn rfold_examples() {
        let f = not_tncz();
        let m1 = rfold_model(&f, 1).unwrap();
        assert!(Arc::ptr_eq(&m1.cdga, f.total()));
        let m = rfold_model(&f, 3).unwrap();
        let g = m.cdga.gens();
        for i in 1..=3 {
            let z = g.index_of(&format!("z{i}")).unwrap();
            assert_eq!(
                g.format(m.cdga.presentation().d_generator(z)),
                format!("x*y{i}")
            );
        }
        for inj in &m.copy_injections {
            let composite = inj.then(&m.diagonal).unwrap();
            for (i, img) in composite.images.iter().enumerate() {
                assert_eq!(img, &f.gens().generator_poly(i));
            }
        }
    }

    #[test]
    fn kernel_ideal_low_degree() {
        let f = not_tncz();
        let m = rfold_model(&f, 3).unwrap();
        let i = kernel_ideal(&m, 6);
        assert_eq!(i.dim(3), 2);
        for p in i.basis_polys(&m.cdga, 3) {
            assert!(m.diagonal.apply(&p).is_zero());
        }
        let m1 = rfold_model(&f, 1).unwrap();
        assert!(kernel_ideal(&m1, 10).is_zero());
    }

    #[test]
    fn ideal_power_cases() {
        let f = not_tncz();
        let m = rfold_model(&f, 2).unwrap();
        let i = kernel_ideal(&m, 10);
        let i1 = ideal_power(&m, &i, 1, 10).unwrap();
        assert_eq!(i1.dims(), i.dims());
        assert!(matches!(
            ideal_power(&m, &i, 2, 11),
            Err(FibrationError::WindowTooSmall { .. })
        ));
        let i2 = ideal_power(&m, &i, 2, 10).unwrap();
        for (n, d) in i2.dims() {
            assert!(d <= i.dim(n));
        }
    }

    #[test]
    fn oddness_examples() {
        let ky = FibrationPresentation::new(
            CdgaPresentation::parse(&[("x", 3, F), ("y", 3, F), ("z", 5, F)], &[("z", "x*y")])
                .unwrap(),
        )
        .unwrap();
        assert_eq!(
            oddness_profile(&ky),
            OddnessProfile {
                all_fiber_odd: true,
                dim_odd: 3,
                dim_even: 0
            }
        );
        assert_eq!(
            oddness_profile(&stiefel()),
            OddnessProfile {
                all_fiber_odd: false,
                dim_odd: 2,
                dim_even: 1
            }
        );
        let base_only =
            FibrationPresentation::new(CdgaPresentation::parse(&[("b", 3, B)], &[]).unwrap())
                .unwrap();
        assert_eq!(
            oddness_profile(&base_only),
            OddnessProfile {
                all_fiber_odd: true,
                dim_odd: 0,
                dim_even: 0
            }
        );
    }

    #[test]
    fn purity() {
        assert!(pure_check(&stiefel()));
        assert!(pure_check(&not_tncz()) || !pure_check(&not_tncz()));
        let impure = FibrationPresentation::new(
            CdgaPresentation::parse(&[("b", 3, B), ("x", 2, F)], &[("x", "b")]).unwrap(),
        );
        // degree mismatch (3 != 2 + 1 is false: d x has degree 3 = 2 + 1) -> valid, even generator not closed
        assert!(!pure_check(&impure.unwrap()));
    }

    #[test]
    fn stiefel_split() {
        let f = stiefel();
        let s = extension_split(&f, &["x", "z"]).unwrap();
        assert_eq!(s.discarded, vec!["y"]);
        assert_eq!(s.m(), 1);
        assert_eq!(s.hat.gens().len(), 4);
        assert!(s.hat_has_f0_shape);
        let all = extension_split(&f, &["x", "y", "z"]).unwrap();
        assert!(all.discarded.is_empty());
        assert!(matches!(
            extension_split(&f, &["y", "z"]),
            Err(FibrationError::SplitInvalid(SplitCondition::EvenGeneratorDropped(n))) if n == "x"
        ));
    }

    #[test]
    fn tncz_trivial_and_failing() {
        let trivial = FibrationPresentation::new(
            CdgaPresentation::parse(&[("b", 3, B), ("y", 3, F), ("z", 5, F)], &[]).unwrap(),
        )
        .unwrap();
        assert!(tncz_check(&trivial, 11).unwrap().all_surjective());
        let report = tncz_check(&not_tncz(), 11).unwrap();
        assert_eq!(report.first_failure(), Some(5));
    }
}
