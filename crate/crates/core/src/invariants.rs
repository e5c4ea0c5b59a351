//! Cohomological lower bounds (zero-divisor cup-length, HTC witnesses) and
//! the upper bounds / exact values available for sequential parametrized
//! topological complexity, assembled into a [`BoundReport`].

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::cdga::{ideal_nilpotency, CdgaError, ClassIdeal};
use crate::fibration::{
    extension_split, kernel_ideal, oddness_profile, rfold_model, tncz_check, FibrationError,
    FibrationPresentation, IdealTower, RFoldModel,
};
use crate::graded::{GradedError, GradedPoly};
use crate::status::Status;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("fiber has even-degree generators {0:?}; the odd-fiber formula does not apply")]
    NotOddFiber(Vec<String>),
    #[error("presentation omits generators above degree {0}; exact formulas are not applicable")]
    Truncated(u32),
    #[error("formal dimension of the {0} is unknown; declare it or assert fiber ellipticity")]
    MissingDimension(&'static str),
    #[error("bad assertion `{0}`")]
    BadAssertion(String),
    #[error(transparent)]
    Fibration(#[from] FibrationError),
}

impl From<CdgaError> for InvariantError {
    fn from(e: CdgaError) -> Self {
        InvariantError::Fibration(e.into())
    }
}

impl From<GradedError> for InvariantError {
    fn from(e: GradedError) -> Self {
        InvariantError::Fibration(e.into())
    }
}

/// User-supplied facts the engine cannot decide.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AssertionFlag {
    FiberFormal,
    BaseFormal,
    FiberElliptic,
    FibrationTnczAsserted,
}

impl AssertionFlag {
    pub const ALL: [AssertionFlag; 4] = [
        AssertionFlag::FiberFormal,
        AssertionFlag::BaseFormal,
        AssertionFlag::FiberElliptic,
        AssertionFlag::FibrationTnczAsserted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AssertionFlag::FiberFormal => "fiber_formal",
            AssertionFlag::BaseFormal => "base_formal",
            AssertionFlag::FiberElliptic => "fiber_elliptic",
            AssertionFlag::FibrationTnczAsserted => "fibration_tncz_asserted",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }
}

/// Assertions with free-text justifications.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AssertionSet {
    flags: BTreeMap<AssertionFlag, String>,
    vanishes_above: Option<(u32, String)>,
}

impl AssertionSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, flag: AssertionFlag, justification: impl Into<String>) {
        self.flags.insert(flag, justification.into());
    }

    pub fn set_vanishes_above(&mut self, n: u32, justification: impl Into<String>) {
        self.vanishes_above = Some((n, justification.into()));
    }

    pub fn has(&self, flag: AssertionFlag) -> bool {
        self.flags.contains_key(&flag)
    }

    pub fn vanishes_above(&self) -> Option<u32> {
        self.vanishes_above.as_ref().map(|(n, _)| *n)
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty() && self.vanishes_above.is_none()
    }

    /// Parses `flag=justification`; `cohomology_vanishes_above=N[: why]`.
    pub fn parse_entry(&mut self, entry: &str) -> Result<(), InvariantError> {
        let (key, value) = entry.split_once('=').unwrap_or((entry, ""));
        let (key, value) = (key.trim(), value.trim());
        if key == "cohomology_vanishes_above" {
            let (num, why) = value.split_once([':', ' ']).unwrap_or((value, ""));
            let n = num
                .trim()
                .parse()
                .map_err(|_| InvariantError::BadAssertion(entry.to_string()))?;
            self.set_vanishes_above(n, why.trim());
            return Ok(());
        }
        let flag = AssertionFlag::from_name(key)
            .ok_or_else(|| InvariantError::BadAssertion(entry.to_string()))?;
        self.insert(flag, value);
        Ok(())
    }

    /// `(key, justification)` pairs, in a stable order.
    pub fn entries(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = self
            .flags
            .iter()
            .map(|(f, j)| (f.name().to_string(), j.clone()))
            .collect();
        if let Some((n, j)) = &self.vanishes_above {
            out.push((
                "cohomology_vanishes_above".into(),
                format!("{n}: {j}").trim_end_matches(": ").to_string(),
            ));
        }
        out
    }

    fn label(&self, flag: AssertionFlag) -> String {
        match self.flags.get(&flag) {
            Some(j) if !j.is_empty() => format!("{} asserted ({j})", flag.name()),
            _ => format!("{} asserted", flag.name()),
        }
    }
}

/// Where a bound comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    ZeroDivisorCupLength,
    HtcWitness,
    FiberLowerBound,
    OddFiberFormula,
    OddDegreeExtension,
    NilpotentKernelEquality,
    DimensionBound,
}

impl Route {
    pub fn describe(self) -> &'static str {
        match self {
            Route::ZeroDivisorCupLength => "zcl_r <= TC_r: nilpotency of the kernel of H(diagonal)",
            Route::HtcWitness => {
                "HTC_r <= TC_r: non-exact cocycle in a power of the diagonal's kernel ideal"
            }
            Route::FiberLowerBound => "TC_r(F) <= TC_r[X->B]: restriction to a fiber",
            Route::OddFiberFormula => {
                "TC_r = (r-1) dim V for an elliptic fiber concentrated in odd degrees"
            }
            Route::OddDegreeExtension => {
                "TC_r[X->B] <= TC_r[X^->B] + m(r-1) for an odd-degree extension of a pure fibration"
            }
            Route::NilpotentKernelEquality => {
                "TC_r = zcl_r for a TNCZ fibration with formal elliptic fiber and formal base"
            }
            Route::DimensionBound => "TC_r[X->B] <= floor((r dim F + dim B + 1) / 2)",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl Route {
    /// Stable identifier, as used in machine-readable reports.
    pub fn id(self) -> &'static str {
        match self {
            Route::ZeroDivisorCupLength => "zero_divisor_cup_length",
            Route::HtcWitness => "htc_witness",
            Route::FiberLowerBound => "fiber_lower_bound",
            Route::OddFiberFormula => "odd_fiber_formula",
            Route::OddDegreeExtension => "odd_degree_extension",
            Route::NilpotentKernelEquality => "nilpotent_kernel_equality",
            Route::DimensionBound => "dimension_bound",
        }
    }
}

/// A single bound with the computation behind it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bound {
    pub value: u32,
    pub route: Route,
    pub detail: String,
    pub status: Status,
}

/// Cohomology vanishing degree for the r-fold model, with its status.
fn rfold_vanishing(
    f: &FibrationPresentation,
    m: &RFoldModel,
    a: &AssertionSet,
) -> Option<(u32, Status)> {
    if let Some(v) = m.cdga.vanishing_above() {
        if v.1.is_exact() {
            return Some(v);
        }
    }
    if f.truncated_above().is_some() {
        return None;
    }
    if let Some(n) = a.vanishes_above() {
        return Some((
            n,
            Status::conditional([format!(
                "cohomology of the r-fold model asserted to vanish above {n}"
            )]),
        ));
    }
    let elliptic = a.has(AssertionFlag::FiberElliptic);
    let (fd, fa) = f.fiber_dimension(elliptic)?;
    let (bd, ba) = f.base_dimension()?;
    let top = bd + m.r * fd;
    let mut assumptions: Vec<String> = fa.into_iter().chain(ba).collect();
    if !assumptions.is_empty() {
        assumptions.push(format!(
            "r-fold cohomology vanishes above dim B + r dim F = {top}"
        ));
    }
    Some((top, Status::conditional(assumptions)))
}

fn rfold_window(
    f: &FibrationPresentation,
    m: &RFoldModel,
    cutoff: u32,
    a: &AssertionSet,
) -> (u32, Status) {
    m.cdga.window(cutoff, rfold_vanishing(f, m, a))
}

/// Kernel of `H(Δ_r)` as a class ideal, through `window`.
fn kernel_class_ideal(m: &RFoldModel, window: u32) -> ClassIdeal {
    let mut ideal = ClassIdeal::new();
    for n in 1..=window {
        let map = m.diagonal.induced_map(n);
        if map.kernel.is_zero() {
            continue;
        }
        let h = m.cdga.cohomology(n);
        ideal.set_degree(
            &m.cdga,
            n,
            map.kernel.basis().map(|c| h.poly_of(c)).collect(),
        );
    }
    ideal
}

#[derive(Clone, Debug, Serialize)]
pub struct ZclReport {
    pub r: u32,
    pub value: u32,
    pub status: Status,
    pub window: u32,
    pub kernel_dims: BTreeMap<u32, usize>,
    pub power_dims: Vec<BTreeMap<u32, usize>>,
    /// Kernel classes whose product is nonzero, realizing the value.
    pub certificate: Vec<String>,
    pub certificate_degree: u32,
}

fn zcl_on(f: &FibrationPresentation, m: &RFoldModel, cutoff: u32, a: &AssertionSet) -> ZclReport {
    let (window, status) = rfold_window(f, m, cutoff, a);
    let ideal = kernel_class_ideal(m, window);
    let gens = m.cdga.algebra_generators(window);
    let ideal_gens = ideal.ideal_generators(&m.cdga, &gens);
    let nil = ideal_nilpotency(&m.cdga, &ideal, &ideal_gens, window, status);
    ZclReport {
        r: m.r,
        value: nil.value,
        status: nil.status,
        window,
        kernel_dims: ideal.dims(),
        power_dims: nil.power_dims,
        certificate: nil
            .certificate
            .iter()
            .map(|p| m.cdga.gens().format(p))
            .collect(),
        certificate_degree: nil.certificate_degree,
    }
}

/// `zcl_r[X → B]`: nilpotency of `Ker H(Δ_r)` through `cutoff`.
pub fn zcl(
    f: &FibrationPresentation,
    r: u32,
    cutoff: u32,
    a: &AssertionSet,
) -> Result<ZclReport, InvariantError> {
    let m = rfold_model(f, r)?;
    Ok(zcl_on(f, &m, cutoff, a))
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelRow {
    pub degree: u32,
    pub dim: usize,
    pub basis: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelTable {
    pub r: u32,
    pub window: u32,
    pub status: Status,
    /// Nonzero degrees only.
    pub rows: Vec<KernelRow>,
}

impl KernelTable {
    pub fn dim(&self, n: u32) -> usize {
        self.rows
            .iter()
            .find(|row| row.degree == n)
            .map_or(0, |row| row.dim)
    }
}

/// Degreewise bases of `Ker H(Δ_r)`.
pub fn zcl_kernel_table(
    f: &FibrationPresentation,
    r: u32,
    cutoff: u32,
    a: &AssertionSet,
) -> Result<KernelTable, InvariantError> {
    let m = rfold_model(f, r)?;
    let (window, status) = rfold_window(f, &m, cutoff, a);
    let ideal = kernel_class_ideal(&m, window);
    let rows = ideal
        .iter()
        .map(|(n, sub)| KernelRow {
            degree: n,
            dim: sub.span.dim(),
            basis: sub.reps.iter().map(|p| m.cdga.gens().format(p)).collect(),
        })
        .collect();
    Ok(KernelTable {
        r,
        window,
        status,
        rows,
    })
}

/// Whether given elements of the r-fold model are cocycles representing
/// linearly independent classes in `Ker H^n(Δ_r)`.
#[derive(Clone, Debug, Serialize)]
pub struct KernelElementCheck {
    pub degree: u32,
    pub all_cocycles: bool,
    pub all_in_kernel: bool,
    pub independent: bool,
    pub kernel_dim: usize,
}

pub fn check_kernel_elements(
    f: &FibrationPresentation,
    r: u32,
    degree: u32,
    elements: &[&str],
) -> Result<KernelElementCheck, InvariantError> {
    let m = rfold_model(f, r)?;
    let a = &m.cdga;
    let h = a.cohomology(degree);
    let map = m.diagonal.induced_map(degree);
    let mut all_cocycles = true;
    let mut all_in_kernel = true;
    let mut span = crate::linalg::SubspaceBasis::zero(h.dim());
    for e in elements {
        let p = a.gens().parse(e)?;
        let v = h.slice().coordinates(&p)?;
        if !h.cocycles().contains(&v) {
            all_cocycles = false;
            continue;
        }
        let c = h.class_coordinates(&v);
        all_in_kernel &= map.kernel.contains(&c);
        span.insert(c);
    }
    Ok(KernelElementCheck {
        degree,
        all_cocycles,
        all_in_kernel,
        independent: all_cocycles && span.dim() == elements.len(),
        kernel_dim: map.kernel.dim(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HtcWitness {
    pub r: u32,
    pub k: u32,
    pub degree: u32,
    pub element: String,
    /// Difference factors when the witness is a product of `k + 1` of them.
    pub factors: Vec<String>,
    /// Lower bound `HTC_r >= k + 1` proved by the witness.
    pub bound: u32,
    pub status: Status,
}

/// Products of `count` differences `v^(λ) − v^(λ+1)` with total degree `n`.
fn difference_products(m: &RFoldModel, count: u32, n: u32) -> Vec<(Vec<GradedPoly>, GradedPoly)> {
    let gens = m.cdga.gens();
    let mut diffs: Vec<(u32, GradedPoly)> = Vec::new();
    let mut origins: Vec<usize> = m
        .origin
        .iter()
        .filter(|(_, l)| *l > 0)
        .map(|(o, _)| *o)
        .collect();
    origins.dedup();
    for &o in &origins {
        let deg = m
            .cdga
            .gens()
            .generator(m.copy_index(o, 1).expect("copy"))
            .degree;
        for lambda in 1..m.r {
            diffs.push((deg, m.difference(o, lambda, lambda + 1)));
        }
    }
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    fn rec(
        diffs: &[(u32, GradedPoly)],
        start: usize,
        left: u32,
        deg_left: u32,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if left == 0 {
            if deg_left == 0 {
                out.push(chosen.clone());
            }
            return;
        }
        for i in start..diffs.len() {
            if diffs[i].0 <= deg_left {
                chosen.push(i);
                rec(diffs, i, left - 1, deg_left - diffs[i].0, chosen, out);
                chosen.pop();
            }
        }
    }
    let mut combos = Vec::new();
    rec(&diffs, 0, count, n, &mut chosen, &mut combos);
    for c in combos {
        let factors: Vec<GradedPoly> = c.iter().map(|&i| diffs[i].1.clone()).collect();
        let p = gens.product(factors.iter());
        if !p.is_zero() {
            out.push((factors, p));
        }
    }
    out
}

fn search_witness(
    m: &RFoldModel,
    tower: &mut IdealTower,
    k: u32,
    window: u32,
    status: &Status,
) -> Result<Option<HtcWitness>, InvariantError> {
    let a = m.cdga.clone();
    let power = tower.power(k + 1, window)?.clone();
    for n in 1..=window {
        let Some(j) = power.degree(n) else { continue };
        let h = a.cohomology(n);
        if h.dim() == 0 {
            continue;
        }
        let zj = h
            .cocycles()
            .intersection(j)
            .map_err(|_| InvariantError::MissingDimension("ideal"))?;
        if zj.is_subspace_of(h.coboundaries()) {
            continue;
        }
        let witness = |element: &GradedPoly, factors: Vec<String>| HtcWitness {
            r: m.r,
            k,
            degree: n,
            element: a.gens().format(element),
            factors,
            bound: k + 1,
            status: status.clone(),
        };
        for (factors, p) in difference_products(m, k + 1, n) {
            let v = h.slice().coordinates(&p)?;
            if zj.contains(&v) && !h.is_coboundary(&v) {
                let names = factors.iter().map(|q| a.gens().format(q)).collect();
                return Ok(Some(witness(&p, names)));
            }
        }
        let v = zj
            .basis()
            .find(|v| !h.is_coboundary(v))
            .expect("element outside coboundaries");
        return Ok(Some(witness(&h.slice().from_coordinates(v), Vec::new())));
    }
    Ok(None)
}

fn witness_status(f: &FibrationPresentation) -> Status {
    match f.truncated_above() {
        Some(t) => Status::ModuloTruncation { truncated_above: t },
        None => Status::Exact,
    }
}

/// Searches ascending degrees for a cocycle in `I^{k+1}` with nonzero class,
/// `I = Ker(id ⊗ μ_r)`. A witness proves `HTC_r >= k + 1`.
pub fn htc_witness(
    f: &FibrationPresentation,
    r: u32,
    k: u32,
    cutoff: u32,
    a: &AssertionSet,
) -> Result<Option<HtcWitness>, InvariantError> {
    let m = rfold_model(f, r)?;
    let (window, _) = rfold_window(f, &m, cutoff, a);
    let mut tower = IdealTower::new(m.cdga.clone(), kernel_ideal(&m, window));
    search_witness(&m, &mut tower, k, window, &witness_status(f))
}

#[derive(Clone, Debug, Serialize)]
pub struct HtcReport {
    pub r: u32,
    pub value: u32,
    pub status: Status,
    pub window: u32,
    /// For each `k < value`: the lowest degree where `H(ρ_k)` fails to be injective.
    pub failures: Vec<(u32, u32)>,
}

/// Whether `H^n(A) → H^n(A / J)` is injective: `Z ∩ (J + B) = B`.
fn quotient_injective(m: &RFoldModel, j: Option<&crate::linalg::SubspaceBasis>, n: u32) -> bool {
    let Some(j) = j else { return true };
    let h = m.cdga.cohomology(n);
    if h.dim() == 0 {
        return true;
    }
    let jb = j.sum(h.coboundaries()).expect("same ambient");
    let meet = h.cocycles().intersection(&jb).expect("same ambient");
    meet.dim() == h.coboundaries().dim()
}

/// `HTC_r`: least `k` with `H(ρ_k)` injective in the window.
pub fn htc(
    f: &FibrationPresentation,
    r: u32,
    cutoff: u32,
    a: &AssertionSet,
) -> Result<HtcReport, InvariantError> {
    let m = rfold_model(f, r)?;
    let (window, status) = rfold_window(f, &m, cutoff, a);
    let mut tower = IdealTower::new(m.cdga.clone(), kernel_ideal(&m, window));
    let mut failures = Vec::new();
    let mut k = 0;
    loop {
        let power = tower.power(k + 1, window)?;
        if power.is_zero() {
            break;
        }
        match (1..=window).find(|&n| !quotient_injective(&m, power.degree(n), n)) {
            Some(n) => failures.push((k, n)),
            None => break,
        }
        k += 1;
    }
    Ok(HtcReport {
        r,
        value: k,
        status,
        window,
        failures,
    })
}

/// Cup-length of the fiber, using its certified formal dimension as the
/// vanishing degree when one is available.
pub fn fiber_cuplength(
    f: &FibrationPresentation,
    cutoff: u32,
    a: &AssertionSet,
) -> Result<crate::cdga::Nilpotency, InvariantError> {
    let fiber = f.fiber_cdga()?;
    if fiber.vanishing_above().is_some() || f.truncated_above().is_some() {
        return Ok(fiber.cuplength(cutoff));
    }
    match f.fiber_dimension(a.has(AssertionFlag::FiberElliptic)) {
        Some((top, why)) => {
            let mut pres = fiber.presentation().clone();
            pres.declared_top = Some(top);
            let mut nil = crate::cdga::Cdga::new(pres)?.cuplength(cutoff);
            if nil.status.is_certified() {
                nil.status = Status::conditional(why);
            }
            Ok(nil)
        }
        None => Ok(fiber.cuplength(cutoff)),
    }
}

/// LS category of the fiber where it is determined: `dim V` for an all-odd
/// fiber, the cup-length for an asserted formal fiber, otherwise unknown.
pub fn fiber_category(
    f: &FibrationPresentation,
    cutoff: u32,
    a: &AssertionSet,
) -> Result<Option<(u32, Status)>, InvariantError> {
    let profile = oddness_profile(f);
    if profile.all_fiber_odd && f.truncated_above().is_none() {
        return Ok(Some((profile.dim_odd as u32, Status::Exact)));
    }
    if a.has(AssertionFlag::FiberFormal) {
        let nil = fiber_cuplength(f, cutoff, a)?;
        if nil.status.is_certified() {
            let status = nil.status.and(&Status::conditional([a.label(AssertionFlag::FiberFormal)]));
            return Ok(Some((nil.value, status)));
        }
    }
    Ok(None)
}

/// `TC_r = (r − 1) · dim V` for an all-odd (hence elliptic) fiber.
pub fn tc_odd_fiber(f: &FibrationPresentation, r: u32) -> Result<Bound, InvariantError> {
    if let Some(t) = f.truncated_above() {
        return Err(InvariantError::Truncated(t));
    }
    let profile = oddness_profile(f);
    if !profile.all_fiber_odd {
        let even = f
            .fiber_indices()
            .iter()
            .map(|&i| f.gens().generator(i))
            .filter(|g| !g.is_odd())
            .map(|g| g.name.clone())
            .collect();
        return Err(InvariantError::NotOddFiber(even));
    }
    let dim = profile.dim_odd as u32;
    Ok(Bound {
        value: (r - 1) * dim,
        route: Route::OddFiberFormula,
        detail: format!("(r-1) dim V = ({r}-1)*{dim}, fiber generators all odd"),
        status: Status::Exact,
    })
}

/// Lower bound `TC_r(F)`: the odd-fiber formula for all-odd fibers, else
/// `zcl_r` of the fiber over a point.
pub fn tc_fiber_lower(
    f: &FibrationPresentation,
    r: u32,
    cutoff: u32,
    a: &AssertionSet,
) -> Result<Bound, InvariantError> {
    let point = f.fiber_over_point()?;
    if let Ok(b) = tc_odd_fiber(&point, r) {
        return Ok(Bound {
            route: Route::FiberLowerBound,
            detail: format!("TC_{r}(F) = {} by the odd-fiber formula", b.value),
            ..b
        });
    }
    let z = zcl(&point, r, cutoff, a)?;
    Ok(Bound {
        value: z.value,
        route: Route::FiberLowerBound,
        detail: format!(
            "TC_{r}(F) >= zcl_{r}(F) = {} (window {})",
            z.value, z.window
        ),
        status: z.status,
    })
}

/// `floor((r dim F + dim B + 1) / 2)`.
pub fn svarc_bound(
    f: &FibrationPresentation,
    r: u32,
    a: &AssertionSet,
) -> Result<Bound, InvariantError> {
    let (fd, fa) = f
        .fiber_dimension(a.has(AssertionFlag::FiberElliptic))
        .ok_or(InvariantError::MissingDimension("fiber"))?;
    let (bd, ba) = f
        .base_dimension()
        .ok_or(InvariantError::MissingDimension("base"))?;
    Ok(Bound {
        value: (r * fd + bd).div_ceil(2),
        route: Route::DimensionBound,
        detail: format!("floor(({r}*{fd} + {bd} + 1)/2)"),
        status: Status::conditional(fa.into_iter().chain(ba)),
    })
}

/// Checks the hypotheses of `TC_r = zcl_r`; returns the assumptions used
/// or the reason the route is unavailable.
pub fn kernel_equality_license(
    f: &FibrationPresentation,
    cutoff: u32,
    a: &AssertionSet,
) -> Result<Vec<String>, String> {
    if let Some(t) = f.truncated_above() {
        return Err(format!("presentation truncated above degree {t}"));
    }
    let mut assumptions = Vec::new();
    let all_odd = oddness_profile(f).all_fiber_odd;
    if !all_odd {
        if !a.has(AssertionFlag::FiberElliptic) {
            return Err("fiber ellipticity not asserted".into());
        }
        assumptions.push(a.label(AssertionFlag::FiberElliptic));
    }
    if !f.fiber_indices().is_empty() {
        if !a.has(AssertionFlag::FiberFormal) {
            return Err("fiber formality not asserted".into());
        }
        assumptions.push(a.label(AssertionFlag::FiberFormal));
    }
    if !f.base_indices().is_empty() {
        if !a.has(AssertionFlag::BaseFormal) {
            return Err("base formality not asserted".into());
        }
        assumptions.push(a.label(AssertionFlag::BaseFormal));
    }
    if !f.base_indices().is_empty() {
        let top = f
            .fiber_dimension(a.has(AssertionFlag::FiberElliptic))
            .map(|(d, _)| d);
        let through = top.map_or(cutoff, |t| t.min(cutoff));
        let report = tncz_check(f, through).map_err(|e| e.to_string())?;
        if let Some(n) = report.first_failure() {
            return Err(format!("not TNCZ: H^{n}(X) -> H^{n}(F) is not surjective"));
        }
        if top.is_none_or(|t| t > cutoff) {
            assumptions.push(format!("TNCZ verified through degree {through}"));
            if a.has(AssertionFlag::FibrationTnczAsserted) {
                assumptions.push(a.label(AssertionFlag::FibrationTnczAsserted));
            }
        }
    }
    Ok(assumptions)
}

fn kernel_equality_on(
    f: &FibrationPresentation,
    z: &ZclReport,
    cutoff: u32,
    a: &AssertionSet,
) -> Result<Bound, String> {
    let assumptions = kernel_equality_license(f, cutoff, a)?;
    if !z.status.is_certified() {
        return Err(format!("zcl_{} only known {}", z.r, z.status.label()));
    }
    Ok(Bound {
        value: z.value,
        route: Route::NilpotentKernelEquality,
        detail: format!("TC_{} = zcl_{} = {}", z.r, z.r, z.value),
        status: z.status.and(&Status::conditional(assumptions)),
    })
}

/// Upper bound (or exact value) for `TC_r` of a fibration without discarding
/// generators: odd-fiber formula, else the zcl equality, else the dimension bound.
fn resolve_tc(
    f: &FibrationPresentation,
    r: u32,
    cutoff: u32,
    a: &AssertionSet,
    notes: &mut Vec<String>,
) -> Result<Bound, InvariantError> {
    if let Ok(b) = tc_odd_fiber(f, r) {
        return Ok(b);
    }
    let z = zcl(f, r, cutoff, a)?;
    match kernel_equality_on(f, &z, cutoff, a) {
        Ok(b) => return Ok(b),
        Err(why) => notes.push(format!("zcl equality unavailable: {why}")),
    }
    svarc_bound(f, r, a)
}

/// `TC_r[X→B] <= TC_r[X̂→B] + m(r − 1)` for the split keeping `keep`.
pub fn tc_extension_bound(
    f: &FibrationPresentation,
    keep: &[&str],
    r: u32,
    cutoff: u32,
    a: &AssertionSet,
) -> Result<Bound, InvariantError> {
    let split = extension_split(f, keep)?;
    let mut notes = Vec::new();
    let inner = resolve_tc(&split.hat, r, cutoff, a, &mut notes)?;
    let m = split.m();
    let inner_name = match inner.route {
        Route::NilpotentKernelEquality => format!("zcl_{r}[X^->B]"),
        _ => format!("TC_{r}[X^->B]"),
    };
    let mut detail = format!(
        "{inner_name} + m(r-1) = {} + {m}*({r}-1), keeping {{{}}} and discarding {{{}}}; inner value via {}",
        inner.value,
        split.kept.join(","),
        split.discarded.join(","),
        inner.route
    );
    for n in notes {
        detail.push_str("; ");
        detail.push_str(&n);
    }
    Ok(Bound {
        value: inner.value + m * (r - 1),
        route: Route::OddDegreeExtension,
        detail,
        status: inner.status,
    })
}

#[derive(Clone, Debug)]
pub struct SandwichOptions {
    pub keep: Option<Vec<String>>,
    /// Largest number of monomials (summed over the window) for which zcl
    /// and witness searches are attempted.
    pub budget: u64,
    pub witness_search: bool,
}

impl Default for SandwichOptions {
    fn default() -> Self {
        Self {
            keep: None,
            budget: 6000,
            witness_search: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundSide {
    pub value: Option<u32>,
    pub status: Option<Status>,
    /// Every route attaining the value.
    pub provenance: Vec<Bound>,
}

impl BoundSide {
    fn pick(candidates: &[Bound], best: impl Fn(u32, u32) -> bool) -> Self {
        let Some(value) = candidates
            .iter()
            .map(|b| b.value)
            .reduce(|x, y| if best(y, x) { y } else { x })
        else {
            return Self {
                value: None,
                status: None,
                provenance: Vec::new(),
            };
        };
        let provenance: Vec<Bound> = candidates
            .iter()
            .filter(|b| b.value == value)
            .cloned()
            .collect();
        let status = provenance
            .iter()
            .map(|b| b.status.clone())
            .min_by_key(status_rank)
            .expect("nonempty");
        Self {
            value: Some(value),
            status: Some(status),
            provenance,
        }
    }
}

fn status_rank(s: &Status) -> u8 {
    match s {
        Status::Exact => 0,
        Status::Conditional { .. } => 1,
        Status::WindowLimited { .. } => 2,
        Status::ModuloTruncation { .. } => 3,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub r: u32,
    pub cutoff: u32,
    pub lower: BoundSide,
    pub upper: BoundSide,
    pub exact: Option<u32>,
    pub status: Status,
    pub zcl: Option<ZclReport>,
    pub witness: Option<HtcWitness>,
    /// All bounds computed, including non-optimal ones.
    pub candidates: Vec<Bound>,
    pub notes: Vec<String>,
}

fn model_size(m: &RFoldModel, window: u32) -> u64 {
    m.cdga.gens().slice_dimensions(window).iter().sum()
}

/// Lower and upper bounds for `TC_r[X → B]` from every applicable route.
pub fn tc_sandwich(
    f: &FibrationPresentation,
    r: u32,
    cutoff: u32,
    a: &AssertionSet,
    opts: &SandwichOptions,
) -> Result<BoundReport, InvariantError> {
    let mut candidates_lower = Vec::new();
    let mut candidates_upper = Vec::new();
    let mut notes = Vec::new();

    let m = rfold_model(f, r)?;
    let (window, _) = rfold_window(f, &m, cutoff, a);
    let feasible = model_size(&m, window) <= opts.budget;
    let mut zcl_report = None;
    let mut witness = None;
    if feasible {
        let z = zcl_on(f, &m, cutoff, a);
        candidates_lower.push(Bound {
            value: z.value,
            route: Route::ZeroDivisorCupLength,
            detail: format!("zcl_{r} = {} through degree {}", z.value, z.window),
            status: z.status.clone(),
        });
        if opts.witness_search && r >= 2 {
            let status = witness_status(f);
            let mut tower = IdealTower::new(m.cdga.clone(), kernel_ideal(&m, window));
            let mut k = z.value;
            while let Some(w) = search_witness(&m, &mut tower, k, window, &status)? {
                k += 1;
                witness = Some(w);
            }
            if let Some(w) = &witness {
                candidates_lower.push(Bound {
                    value: w.bound,
                    route: Route::HtcWitness,
                    detail: format!(
                        "non-exact cocycle {} in I^{} (degree {})",
                        w.element,
                        w.k + 1,
                        w.degree
                    ),
                    status: w.status.clone(),
                });
            }
        }
        match kernel_equality_on(f, &z, cutoff, a) {
            Ok(b) => {
                candidates_lower.push(b.clone());
                candidates_upper.push(b);
            }
            Err(why) => notes.push(format!("zcl equality unavailable: {why}")),
        }
        zcl_report = Some(z);
    } else {
        notes.push(format!(
            "zcl and witness search skipped: r-fold model exceeds {} monomials",
            opts.budget
        ));
    }

    match tc_fiber_lower(f, r, cutoff, a) {
        Ok(b) => candidates_lower.push(b),
        Err(e) => notes.push(format!("fiber lower bound unavailable: {e}")),
    }
    match tc_odd_fiber(f, r) {
        Ok(b) => {
            candidates_lower.push(b.clone());
            candidates_upper.push(b);
        }
        Err(e) => notes.push(format!("odd-fiber formula unavailable: {e}")),
    }
    if let Some(keep) = &opts.keep {
        let keep: Vec<&str> = keep.iter().map(String::as_str).collect();
        match tc_extension_bound(f, &keep, r, cutoff, a) {
            Ok(b) => candidates_upper.push(b),
            Err(e) => notes.push(format!("odd-degree extension bound unavailable: {e}")),
        }
    }
    match svarc_bound(f, r, a) {
        Ok(b) => candidates_upper.push(b),
        Err(e) => notes.push(format!("dimension bound unavailable: {e}")),
    }

    let lower = BoundSide::pick(&candidates_lower, |a, b| a > b);
    let upper = BoundSide::pick(&candidates_upper, |a, b| a < b);
    let exact = match (lower.value, upper.value) {
        (Some(l), Some(u)) if l == u => Some(l),
        _ => None,
    };
    if let (Some(z), Some(e)) = (&zcl_report, exact) {
        if z.value < e && z.status.is_certified() {
            notes.push(format!("gap: zcl_{r} = {} < {e} = TC_{r}", z.value));
        }
    }
    let status = match (&lower.status, &upper.status) {
        (Some(l), Some(u)) => l.and(u),
        (Some(l), None) => l.clone(),
        _ => Status::Exact,
    };
    let mut candidates = candidates_lower;
    candidates.extend(candidates_upper);
    candidates.sort_by_key(|x| (x.route, x.value));
    candidates.dedup();
    Ok(BoundReport {
        r,
        cutoff,
        lower,
        upper,
        exact,
        status,
        zcl: zcl_report,
        witness,
        candidates,
        notes,
    })
}
