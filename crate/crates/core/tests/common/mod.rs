//! Brute-force oracle for exterior algebras on odd generators.
//!
//! Elements are dense vectors indexed by subset bitmasks; arithmetic is in
//! F_p with p = 2^61 − 1. The test models have coefficients in {±1, ±2, ±3},
//! so ranks over F_p agree with ranks over Q (a disagreement would need p to
//! divide a nonzero minor of a tiny small-entry matrix).
#![allow(dead_code)]

use std::path::PathBuf;

pub const P: u64 = (1 << 61) - 1;

pub fn fp(c: i64) -> u64 {
    (c.rem_euclid(P as i64)) as u64
}

fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

fn neg(a: u64) -> u64 {
    if a == 0 {
        0
    } else {
        P - a
    }
}

fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn inv(a: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a, P - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, base);
        }
        base = mul(base, base);
        e >>= 1;
    }
    acc
}

/// Exterior algebra on odd generators with a differential given on generators.
#[derive(Clone, Debug)]
pub struct Ext {
    pub degs: Vec<u32>,
    /// `d(g_i)` as `(coefficient, mask)` terms.
    pub d: Vec<Vec<(i64, u32)>>,
}

pub type Vector = Vec<u64>;

impl Ext {
    pub fn new(degs: Vec<u32>) -> Self {
        assert!(degs.iter().all(|d| d % 2 == 1));
        let n = degs.len();
        Self { degs, d: vec![Vec::new(); n] }
    }

    pub fn ngens(&self) -> usize {
        self.degs.len()
    }

    pub fn size(&self) -> usize {
        1 << self.ngens()
    }

    pub fn degree(&self, mask: u32) -> u32 {
        (0..self.ngens()).filter(|i| mask >> i & 1 == 1).map(|i| self.degs[i]).sum()
    }

    pub fn top(&self) -> u32 {
        self.degs.iter().sum()
    }

    pub fn basis(&self, n: u32) -> Vec<u32> {
        (0..self.size() as u32).filter(|&m| self.degree(m) == n).collect()
    }

    /// `e_s · e_t`: zero on overlap, else the sign of sorting the concatenation.
    pub fn mul_basis(s: u32, t: u32) -> Option<(bool, u32)> {
        if s & t != 0 {
            return None;
        }
        let mut inversions = 0;
        for j in 0..32 {
            if t >> j & 1 == 1 {
                inversions += (s >> (j + 1)).count_ones();
            }
        }
        Some((inversions % 2 == 1, s | t))
    }

    pub fn zero(&self) -> Vector {
        vec![0; self.size()]
    }

    pub fn unit(&self, mask: u32) -> Vector {
        let mut v = self.zero();
        v[mask as usize] = 1;
        v
    }

    pub fn from_terms(&self, terms: &[(i64, u32)]) -> Vector {
        let mut v = self.zero();
        for &(c, m) in terms {
            v[m as usize] = add(v[m as usize], fp(c));
        }
        v
    }

    pub fn mul(&self, a: &Vector, b: &Vector) -> Vector {
        let mut out = self.zero();
        for (s, &ca) in a.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for (t, &cb) in b.iter().enumerate() {
                if cb == 0 {
                    continue;
                }
                if let Some((negative, m)) = Self::mul_basis(s as u32, t as u32) {
                    let c = mul(ca, cb);
                    out[m as usize] = add(out[m as usize], if negative { neg(c) } else { c });
                }
            }
        }
        out
    }

    /// Leibniz: `d(g_{i1} ⋯ g_{ik}) = Σ_j (−1)^{j−1} g_{i1} ⋯ d(g_{ij}) ⋯ g_{ik}`.
    pub fn d_basis(&self, mask: u32) -> Vector {
        let idx: Vec<usize> = (0..self.ngens()).filter(|i| mask >> i & 1 == 1).collect();
        let mut out = self.zero();
        for (j, &i) in idx.iter().enumerate() {
            let left: u32 = idx[..j].iter().map(|&k| 1u32 << k).sum();
            let right: u32 = idx[j + 1..].iter().map(|&k| 1u32 << k).sum();
            let term = self.mul(&self.mul(&self.unit(left), &self.from_terms(&self.d[i])), &self.unit(right));
            let sign = if j % 2 == 1 { P - 1 } else { 1 };
            for (m, c) in term.iter().enumerate() {
                out[m] = add(out[m], mul(*c, sign));
            }
        }
        out
    }

    pub fn d(&self, v: &Vector) -> Vector {
        let mut out = self.zero();
        for (m, &c) in v.iter().enumerate() {
            if c != 0 {
                for (t, &e) in self.d_basis(m as u32).iter().enumerate() {
                    out[t] = add(out[t], mul(c, e));
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        (0..self.ngens()).all(|i| self.d(&self.from_terms(&self.d[i])).iter().all(|&c| c == 0))
    }

    /// Cocycles of degree n, as vectors.
    pub fn cocycles(&self, n: u32) -> Vec<Vector> {
        let basis = self.basis(n);
        let images: Vec<Vector> = basis.iter().map(|&m| self.d_basis(m)).collect();
        nullspace(&images)
            .into_iter()
            .map(|coeffs| {
                let mut v = self.zero();
                for (k, &m) in basis.iter().enumerate() {
                    v[m as usize] = coeffs[k];
                }
                v
            })
            .collect()
    }

    pub fn coboundaries(&self, n: u32) -> Space {
        let mut s = Space::new();
        if n > 0 {
            for m in self.basis(n - 1) {
                s.insert(self.d_basis(m));
            }
        }
        s
    }

    pub fn cohomology_dim(&self, n: u32) -> usize {
        self.cocycles(n).len() - self.coboundaries(n).dim()
    }

    pub fn algebra_dim(&self, n: u32) -> usize {
        self.basis(n).len()
    }
}

/// Row-reduced span over F_p.
#[derive(Clone, Debug, Default)]
pub struct Space {
    rows: Vec<(usize, Vector)>,
}

impl Space {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn reduce(&self, v: &Vector) -> Vector {
        let mut v = v.clone();
        for (p, row) in &self.rows {
            let c = v[*p];
            if c != 0 {
                for (x, r) in v.iter_mut().zip(row) {
                    *x = add(*x, neg(mul(c, *r)));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &Vector) -> bool {
        self.reduce(v).iter().all(|&c| c == 0)
    }

    pub fn insert(&mut self, v: Vector) -> bool {
        let mut v = self.reduce(&v);
        let Some(p) = v.iter().position(|&c| c != 0) else { return false };
        let scale = inv(v[p]);
        for x in v.iter_mut() {
            *x = mul(*x, scale);
        }
        for (_, row) in self.rows.iter_mut() {
            let c = row[p];
            if c != 0 {
                for (x, r) in row.iter_mut().zip(&v) {
                    *x = add(*x, neg(mul(c, *r)));
                }
            }
        }
        self.rows.push((p, v));
        true
    }
}

/// Coefficient vectors `c` with `Σ c_k cols[k] = 0`.
pub fn nullspace(cols: &[Vector]) -> Vec<Vec<u64>> {
    let k = cols.len();
    if k == 0 {
        return Vec::new();
    }
    let len = cols[0].len();
    // Augment each column with an identity block and reduce.
    let mut space = Space::new();
    let mut out = Vec::new();
    for (i, c) in cols.iter().enumerate() {
        let mut v = c.clone();
        v.extend((0..k).map(|j| u64::from(j == i)));
        let r = space.reduce(&v);
        if r[..len].iter().all(|&x| x == 0) {
            out.push(r[len..].to_vec());
        } else {
            space.insert(v);
        }
    }
    out
}

pub fn rank(rows: &[Vector]) -> usize {
    let mut s = Space::new();
    rows.iter().filter(|r| s.insert((*r).clone())).count()
}

/// Algebra map on generators: each source generator goes to a single
/// target generator (or to a sum given as terms).
pub fn apply_map(src: &Ext, tgt: &Ext, images: &[Vector], v: &Vector) -> Vector {
    let mut out = tgt.zero();
    for (m, &c) in v.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let mut img = tgt.unit(0);
        for i in 0..src.ngens() {
            if m >> i & 1 == 1 {
                img = tgt.mul(&img, &images[i]);
            }
        }
        for (t, &e) in img.iter().enumerate() {
            out[t] = add(out[t], mul(c, e));
        }
    }
    out
}

/// `(ΛV)` with base generators `base` and fiber generators; the r-fold model
/// lists base generators first, then fiber copies `v^(1..r)` for each fiber
/// generator in order. Returns the r-fold algebra and the diagonal images.
pub fn rfold(base_degs: &[u32], fiber_degs: &[u32], d: &[Vec<(i64, Vec<usize>)>], r: usize) -> (Ext, Ext, Vec<Vector>) {
    let nb = base_degs.len();
    let nf = fiber_degs.len();
    let mut total = Ext::new(base_degs.iter().chain(fiber_degs).copied().collect());
    let to_mask = |ix: &[usize]| -> (i64, u32) {
        // Sort with sign.
        let mut v = ix.to_vec();
        let mut sign = 1;
        for i in 0..v.len() {
            for j in 0..v.len() - 1 - i {
                if v[j] > v[j + 1] {
                    v.swap(j, j + 1);
                    sign = -sign;
                }
            }
        }
        let mut mask = 0u32;
        for &i in &v {
            if mask >> i & 1 == 1 {
                return (0, 0);
            }
            mask |= 1 << i;
        }
        (sign, mask)
    };
    for (g, terms) in d.iter().enumerate() {
        for (c, ix) in terms {
            let (s, m) = to_mask(ix);
            if s != 0 {
                total.d[g].push((c * s, m));
            }
        }
    }
    // index in r-fold model of (original generator, copy)
    let pos = |g: usize, copy: usize| if g < nb { g } else { nb + (g - nb) * r + copy };
    let mut degs = base_degs.to_vec();
    for &fd in fiber_degs {
        degs.extend(std::iter::repeat_n(fd, r));
    }
    let mut model = Ext::new(degs);
    for g in 0..nb + nf {
        let copies = if g < nb { 1 } else { r };
        for copy in 0..copies {
            for (c, ix) in &d[g] {
                let mapped: Vec<usize> = ix.iter().map(|&i| pos(i, copy)).collect();
                let (s, m) = to_mask(&mapped);
                if s != 0 {
                    model.d[pos(g, copy)].push((c * s, m));
                }
            }
        }
    }
    let mut images = Vec::new();
    for g in 0..nb + nf {
        let copies = if g < nb { 1 } else { r };
        for _ in 0..copies {
            images.push(total.unit(1 << g));
        }
    }
    (model, total, images)
}

/// zcl_r by brute force: nilpotency of Ker H(Δ) computed from all pairwise
/// products of kernel representatives.
pub fn zcl_oracle(model: &Ext, total: &Ext, images: &[Vector]) -> u32 {
    let top = model.top();
    // Kernel representatives by degree (modulo coboundaries).
    let mut kernel: Vec<(u32, Vector)> = Vec::new();
    for n in 1..=top {
        let z = model.cocycles(n);
        if z.is_empty() {
            continue;
        }
        let target_b = total.coboundaries(n);
        let reduced: Vec<Vector> = z.iter().map(|v| target_b.reduce(&apply_map(model, total, images, v))).collect();
        let mut quotient = model.coboundaries(n);
        for coeffs in nullspace(&reduced) {
            let mut v = model.zero();
            for (k, zk) in z.iter().enumerate() {
                for (x, y) in v.iter_mut().zip(zk) {
                    *x = add(*x, mul(coeffs[k], *y));
                }
            }
            if quotient.insert(v.clone()) {
                kernel.push((n, v));
            }
        }
    }
    let mut power = kernel.clone();
    let mut value = 0;
    while !power.is_empty() {
        value += 1;
        let mut spaces: std::collections::BTreeMap<u32, Space> = std::collections::BTreeMap::new();
        let mut next = Vec::new();
        for (da, a) in &power {
            for (db, b) in &kernel {
                let n = da + db;
                if n > top {
                    continue;
                }
                let p = model.mul(a, b);
                let s = spaces.entry(n).or_insert_with(|| model.coboundaries(n));
                if s.insert(p.clone()) {
                    next.push((n, p));
                }
            }
        }
        power = next;
    }
    value
}

pub fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

/// Random connected all-odd CDGA on at most `max_gens` generators. Each
/// differential is a random combination of products of earlier generators,
/// kept only if `d² = 0` still holds.
pub fn random_ext(rng: &mut impl rand::Rng, max_gens: usize) -> Ext {
    let n = rng.gen_range(1..=max_gens);
    let degs: Vec<u32> = (0..n).map(|_| [1, 3, 5, 7][rng.gen_range(0..4)]).collect();
    let mut e = Ext::new(degs);
    for k in 0..n {
        let target = e.degs[k] + 1;
        let candidates: Vec<u32> = (1u32..1 << k)
            .filter(|m| m.count_ones() >= 2 && e.degree(*m) == target)
            .collect();
        for _ in 0..8 {
            let mut terms: Vec<(i64, u32)> = Vec::new();
            for &m in &candidates {
                if rng.gen_bool(0.5) {
                    terms.push((rng.gen_range(1..=3) * if rng.gen_bool(0.5) { -1 } else { 1 }, m));
                }
            }
            e.d[k] = terms;
            if e.is_valid() {
                break;
            }
            e.d[k].clear();
        }
    }
    e
}

/// The same algebra in the model-file format (generators `g0, g1, …`).
pub fn ext_model_text(e: &Ext) -> String {
    let mut s = String::from("[generators]\n");
    for (i, d) in e.degs.iter().enumerate() {
        s.push_str(&format!("g{i} = {d}\n"));
    }
    s.push_str("\n[differential]\n");
    for (i, terms) in e.d.iter().enumerate() {
        if terms.is_empty() {
            continue;
        }
        let mut body = String::new();
        for (k, (c, m)) in terms.iter().enumerate() {
            let factors: Vec<String> = (0..e.ngens()).filter(|j| m >> j & 1 == 1).map(|j| format!("g{j}")).collect();
            let sign = match (k, *c < 0) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            body.push_str(&format!("{sign}{}*{}", c.abs(), factors.join("*")));
        }
        s.push_str(&format!("g{i} = {body}\n"));
    }
    s
}
