//! Text rendering of engine reports, plus the two reports the CLI assembles itself.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use seqtc_core::cdga::Cdga;
use seqtc_core::genfun::{DiffNilReport, SeriesReport};
use seqtc_core::invariants::{Bound, BoundReport, BoundSide, HtcReport, HtcWitness, KernelTable, ZclReport};
use seqtc_core::model::{ModelError, ModelFile};
use seqtc_core::status::Status;

#[derive(Serialize)]
pub struct ValidateReport {
    pub generators: usize,
    pub nonzero_differentials: usize,
    pub base: Option<Vec<String>>,
    pub fiber: Option<Vec<String>>,
    pub nilpotence_order: Option<Vec<String>>,
}

impl ValidateReport {
    pub fn text(&self) -> String {
        let mut s = format!(
            "ok: {} generators, {} nonzero differentials, d^2 = 0\n",
            self.generators, self.nonzero_differentials
        );
        if let (Some(b), Some(f), Some(o)) = (&self.base, &self.fiber, &self.nilpotence_order) {
            let _ = writeln!(s, "base: {}", list(b));
            let _ = writeln!(s, "fiber: {}", list(f));
            let _ = writeln!(s, "relative Sullivan order: {}", o.join(", "));
        }
        s
    }
}

fn list(names: &[String]) -> String {
    if names.is_empty() {
        "(point)".into()
    } else {
        names.join(", ")
    }
}

pub fn validate(m: &ModelFile) -> Result<ValidateReport, ModelError> {
    let v = m.validate()?;
    let mut rep = ValidateReport {
        generators: v.generators,
        nonzero_differentials: v.nonzero_differentials,
        base: None,
        fiber: None,
        nilpotence_order: None,
    };
    if m.is_fibration() {
        let f = m.fibration()?;
        let names = |ix: &[usize]| ix.iter().map(|&i| f.gens().generator(i).name.clone()).collect();
        rep.base = Some(names(f.base_indices()));
        rep.fiber = Some(f.fiber_names());
        rep.nilpotence_order = Some(f.nilpotence_order());
    }
    Ok(rep)
}

#[derive(Serialize)]
pub struct CohomologyRow {
    pub degree: u32,
    pub dim: usize,
    pub representatives: Vec<String>,
}

#[derive(Serialize)]
pub struct CohomologyReport {
    pub window: u32,
    pub status: Status,
    pub rows: Vec<CohomologyRow>,
    pub dims: BTreeMap<u32, usize>,
}

impl CohomologyReport {
    pub fn text(&self) -> String {
        let mut s = format!("cohomology through degree {} [{}]\n", self.window, self.status);
        for row in &self.rows {
            let _ = writeln!(s, "H^{}: dim {}  {}", row.degree, row.dim, row.representatives.join(", "));
        }
        s
    }
}

pub fn cohomology(cdga: &Cdga, cutoff: u32) -> CohomologyReport {
    let (window, status) = cdga.window(cutoff, cdga.vanishing_above());
    let rows: Vec<CohomologyRow> = (0..=window)
        .filter_map(|n| {
            let h = cdga.cohomology(n);
            (h.dim() > 0).then(|| CohomologyRow {
                degree: n,
                dim: h.dim(),
                representatives: h.representatives().iter().map(|p| cdga.gens().format(p)).collect(),
            })
        })
        .collect();
    let dims = rows.iter().map(|r| (r.degree, r.dim)).collect();
    CohomologyReport { window, status, rows, dims }
}

fn dims(map: &BTreeMap<u32, usize>) -> String {
    map.iter().filter(|(_, &d)| d > 0).map(|(n, d)| format!("{n}:{d}")).collect::<Vec<_>>().join(" ")
}

pub fn zcl_text(z: &ZclReport) -> String {
    let mut s = format!("zcl_{} = {} [{}]\n", z.r, z.value, z.status);
    let _ = writeln!(s, "window: degrees <= {}", z.window);
    let _ = writeln!(s, "kernel dims: {}", dims(&z.kernel_dims));
    for (j, p) in z.power_dims.iter().enumerate() {
        let _ = writeln!(s, "power {} dims: {}", j + 1, dims(p));
    }
    if !z.certificate.is_empty() {
        let _ = writeln!(s, "nonzero product in degree {}: ({})", z.certificate_degree, z.certificate.join(")("));
    }
    s
}

pub fn kernel_table_text(t: &KernelTable) -> String {
    let mut s = format!("Ker H(diagonal), r = {}, degrees <= {} [{}]\n", t.r, t.window, t.status);
    for row in &t.rows {
        if row.dim > 0 {
            let _ = writeln!(s, "degree {}: dim {}  {}", row.degree, row.dim, row.basis.join(", "));
        }
    }
    s
}

pub fn htc_text(h: &HtcReport) -> String {
    let mut s = format!("HTC_{} = {} [{}]\n", h.r, h.value, h.status);
    for (k, n) in &h.failures {
        let _ = writeln!(s, "k = {k}: H(rho_k) not injective in degree {n}");
    }
    s
}

pub fn witness_text(w: &HtcWitness) -> String {
    let mut s = format!("witness for k = {} in degree {}: {}\n", w.k, w.degree, w.element);
    if !w.factors.is_empty() {
        let _ = writeln!(s, "factors: ({})", w.factors.join(")("));
    }
    let _ = writeln!(s, "{} <= HTC_{} [{}]", w.bound, w.r, w.status);
    s
}

fn bound_line(b: &Bound) -> String {
    format!("  {} via {}: {} [{}]", b.value, b.route, b.detail, b.status)
}

fn side(s: &mut String, label: &str, b: &BoundSide) {
    match (b.value, &b.status) {
        (Some(v), Some(st)) => {
            let _ = writeln!(s, "{label}: {v} [{st}]");
            for p in &b.provenance {
                let _ = writeln!(s, "{}", bound_line(p));
            }
        }
        _ => {
            let _ = writeln!(s, "{label}: none");
        }
    }
}

pub fn tc_text(r: &BoundReport) -> String {
    let mut s = match r.exact {
        Some(v) => format!("TC_{} = {} [{}]\n", r.r, v, r.status),
        None => format!("TC_{} not determined [{}]\n", r.r, r.status),
    };
    side(&mut s, "lower", &r.lower);
    side(&mut s, "upper", &r.upper);
    let others: Vec<&Bound> = r
        .candidates
        .iter()
        .filter(|c| !r.lower.provenance.contains(c) && !r.upper.provenance.contains(c))
        .collect();
    if !others.is_empty() {
        let _ = writeln!(s, "other bounds:");
        for b in others {
            let _ = writeln!(s, "{}", bound_line(b));
        }
    }
    for n in &r.notes {
        let _ = writeln!(s, "note: {n}");
    }
    s
}

pub fn series_text(r: &SeriesReport) -> String {
    let mut s = String::from("c_r = TC_{r+1}\n");
    for c in &r.coefficients {
        let v = match (c.value, c.lower, c.upper) {
            (Some(v), ..) => v.to_string(),
            (None, l, u) => format!(
                "in [{}, {}]",
                l.map_or("?".into(), |x| x.to_string()),
                u.map_or("?".into(), |x| x.to_string())
            ),
        };
        let _ = writeln!(s, "c_{} = {} [{}]", c.r, v, c.status);
    }
    match (&r.fit, &r.fit_error) {
        (Some(fit), _) => {
            let _ = writeln!(s, "fit: P(z) = {}, P(1) = {}, differences constant from r = {}", fit.format(), fit.p_at_1, fit.stable_from);
        }
        (None, Some(e)) => {
            let _ = writeln!(s, "fit: refused ({e})");
        }
        (None, None) => {}
    }
    match (r.cat_fiber, &r.cat_fiber_status) {
        (Some(c), Some(st)) => {
            let _ = writeln!(s, "cat(F) = {c} [{st}]");
        }
        _ => {
            let _ = writeln!(s, "cat(F) unknown");
        }
    }
    for n in &r.notes {
        let _ = writeln!(s, "note: {n}");
    }
    s
}

pub fn diffnil_text(r: &DiffNilReport) -> String {
    let mut s = format!("cupl(F) = {} [{}]\n", r.cupl_fiber, r.cupl_status);
    for st in &r.steps {
        let _ = writeln!(
            s,
            "r = {}: zcl_{} - zcl_{} = {} - {} = {} {} {} [{}]",
            st.r,
            st.r + 1,
            st.r,
            st.zcl_next,
            st.zcl_r,
            st.difference,
            if st.holds { ">=" } else { "<" },
            r.cupl_fiber,
            st.status
        );
    }
    if !r.all_hold() {
        let _ = writeln!(s, "VIOLATED");
    }
    s
}
