//! Exhaustive orbit tables over finite rings.
//!
//! Objects are unimodular rows (acted on by elementary linear generators)
//! or isotropic frames (acted on by symplectic or orthogonal generators),
//! always by right multiplication. Objects are numbered in lexicographic
//! order of their entries, generators in (i, j, parameter) order.
//!
//! Each orbit is explored breadth first from its least object. A level is
//! expanded in parallel, then parents are assigned sequentially in
//! (frontier order, generator order), so the lowest-ordered edge always
//! wins and the table does not depend on the number of worker threads.

use std::collections::HashMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::json::{elem_from_json, elem_to_json, ring_from_json, ring_to_json};
use crate::matrices::{FormKind, IsotropicFrame, Mat};
use crate::rings::{Elem, RingRef};
use crate::words::{apply_right, validate, ClaimKind, Family, GenWord, Generator, Witness};

pub const DEFAULT_BUDGET: u64 = 10_000_000;
pub const CACHE_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ObjectKind {
    /// Unimodular rows of the given length, family `lin`.
    Row { len: usize },
    /// 2n × 2m frames V with V ψ_m Vᵗ = ψ_n, family `sp`.
    SpFrame { n: usize, m: usize },
    /// 2n × 2m frames V with V φ_m Vᵗ = φ_n, family `orth`.
    OrthFrame { n: usize, m: usize },
}

impl ObjectKind {
    pub fn shape(self) -> (usize, usize) {
        match self {
            ObjectKind::Row { len } => (1, len),
            ObjectKind::SpFrame { n, m } | ObjectKind::OrthFrame { n, m } => (2 * n, 2 * m),
        }
    }

    pub fn family(self) -> Family {
        match self {
            ObjectKind::Row { .. } => Family::Lin,
            ObjectKind::SpFrame { .. } => Family::Sp,
            ObjectKind::OrthFrame { .. } => Family::Orth,
        }
    }

    fn form(self) -> FormKind {
        match self {
            ObjectKind::Row { .. } => FormKind::None,
            ObjectKind::SpFrame { m, .. } => FormKind::SymplecticPsi(m),
            ObjectKind::OrthFrame { m, .. } => FormKind::OrthogonalPhi(m),
        }
    }

    pub fn describe(self) -> String {
        match self {
            ObjectKind::Row { len } => format!("row:{}", len),
            ObjectKind::SpFrame { n, m } => format!("sp:{}x{}", 2 * n, 2 * m),
            ObjectKind::OrthFrame { n, m } => format!("orth:{}x{}", 2 * n, 2 * m),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitTable {
    ring: RingRef,
    kind: ObjectKind,
    gens: Vec<Generator>,
    objects: Vec<Vec<Elem>>,
    index: HashMap<Vec<Elem>, usize>,
    orbit_of: Vec<usize>,
    /// Least object of each orbit.
    reps: Vec<usize>,
    /// (parent object, generator index) on a shortest path from the representative.
    parent: Vec<Option<(usize, usize)>>,
}

fn cartesian(elems: &[Elem], len: usize) -> Vec<Vec<Elem>> {
    let mut out: Vec<Vec<Elem>> = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                elems.iter().map(move |e| {
                    let mut v = prefix.clone();
                    v.push(e.clone());
                    v
                })
            })
            .collect();
    }
    out
}

/// Ideal generated by a tuple is the whole ring, by closure under addition
/// of multiples (finite rings only).
fn generates_unit_ideal(ring: &RingRef, elems: &[Elem], v: &[Elem]) -> bool {
    if v.iter().any(|x| ring.is_unit(x)) {
        return true;
    }
    if ring.is_local() {
        return false;
    }
    let mut ideal = vec![ring.zero()];
    let mut seen: std::collections::HashSet<Elem> = ideal.iter().cloned().collect();
    let mut k = 0;
    while k < ideal.len() {
        let a = ideal[k].clone();
        k += 1;
        for x in v {
            for r in elems {
                let b = ring.add(&a, &ring.mul(r, x).expect("finite ring"));
                if seen.insert(b.clone()) {
                    if ring.is_one(&b) {
                        return true;
                    }
                    ideal.push(b);
                }
            }
        }
    }
    false
}

fn enumerate_objects(ring: &RingRef, kind: ObjectKind) -> Result<Vec<Vec<Elem>>> {
    let elems = ring.elements().ok_or_else(|| Error::Unsupported(format!("{} is not finite", ring)))?;
    Ok(match kind {
        ObjectKind::Row { len } => {
            cartesian(&elems, len).into_iter().filter(|v| generates_unit_ideal(ring, &elems, v)).collect()
        }
        ObjectKind::SpFrame { n, m } | ObjectKind::OrthFrame { n, m } => {
            // Build the frame row by row, pruning with the form identity.
            let form = Mat::form(ring, kind.form()).expect("form frame");
            let target = Mat::form(ring, match kind {
                ObjectKind::SpFrame { .. } => FormKind::SymplecticPsi(n),
                _ => FormKind::OrthogonalPhi(n),
            })
            .expect("form frame");
            let vectors = cartesian(&elems, 2 * m);
            let pair = |x: &[Elem], y: &[Elem]| -> Elem {
                let xm = Mat::from_rows(ring, vec![x.to_vec()]).unwrap();
                let ym = Mat::from_rows(ring, vec![y.to_vec()]).unwrap();
                xm.mul(&form).unwrap().mul(&ym.transpose()).unwrap().get(0, 0).clone()
            };
            let mut partial: Vec<Vec<Vec<Elem>>> = vec![vec![]];
            for k in 0..2 * n {
                let mut next = Vec::new();
                for p in &partial {
                    for v in &vectors {
                        let ok = (0..k).all(|a| pair(&p[a], v) == *target.get(a, k))
                            && pair(v, v) == *target.get(k, k);
                        if ok {
                            let mut q = p.clone();
                            q.push(v.clone());
                            next.push(q);
                        }
                    }
                }
                partial = next;
            }
            partial.into_iter().map(|rows| rows.concat()).collect()
        }
    })
}

fn generators(ring: &RingRef, kind: ObjectKind) -> Vec<Generator> {
    let (_, size) = kind.shape();
    let family = kind.family();
    let params: Vec<Elem> = ring.elements().unwrap_or_default().into_iter().filter(|e| !ring.is_zero(e)).collect();
    let mut out = Vec::new();
    for i in 1..=size {
        for j in 1..=size {
            if validate(family, size, i, j).is_err() {
                continue;
            }
            for z in &params {
                out.push(Generator::new(i, j, z.clone()));
            }
        }
    }
    out
}

fn object_size(ring: &RingRef, kind: ObjectKind) -> Result<u64> {
    let card = ring.cardinality().ok_or_else(|| Error::Unsupported(format!("{} is not finite", ring)))?;
    let (r, c) = kind.shape();
    Ok((card as f64).powi((r * c) as i32).min(u64::MAX as f64) as u64)
}

/// Complete orbit table of `kind` objects over a finite ring.
pub fn enumerate_orbits(ring: &RingRef, kind: ObjectKind, budget: u64) -> Result<OrbitTable> {
    enumerate_orbits_with(ring, kind, budget, None)
}

/// As [`enumerate_orbits`], on a dedicated pool of `workers` threads.
pub fn enumerate_orbits_with(ring: &RingRef, kind: ObjectKind, budget: u64, workers: Option<usize>) -> Result<OrbitTable> {
    let space = object_size(ring, kind)?;
    if space > budget {
        return Err(Error::SearchBudgetExceeded(format!(
            "{} objects of kind {} over {} exceed the budget {}",
            space,
            kind.describe(),
            ring,
            budget
        )));
    }
    match workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::Unsupported(e.to_string()))?;
            pool.install(|| build(ring, kind))
        }
        None => build(ring, kind),
    }
}

fn build(ring: &RingRef, kind: ObjectKind) -> Result<OrbitTable> {
    let objects = enumerate_objects(ring, kind)?;
    let gens = generators(ring, kind);
    let index: HashMap<Vec<Elem>, usize> = objects.iter().cloned().enumerate().map(|(k, v)| (v, k)).collect();
    let (rows, cols) = kind.shape();
    let family = kind.family();
    let n = objects.len();
    let mut orbit_of = vec![usize::MAX; n];
    let mut parent = vec![None; n];
    let mut reps = Vec::new();

    let neighbours = |obj: usize| -> Vec<Option<usize>> {
        let base = Mat::new(ring, rows, cols, objects[obj].clone()).expect("enumerated object");
        gens.iter()
            .map(|g| {
                let mut m = base.clone();
                apply_right(&mut m, family, g).ok()?;
                index.get(m.entries()).copied()
            })
            .collect()
    };

    for start in 0..n {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let id = reps.len();
        reps.push(start);
        orbit_of[start] = id;
        let mut frontier = vec![start];
        while !frontier.is_empty() {
            let expanded: Vec<Vec<Option<usize>>> = frontier.par_iter().map(|&o| neighbours(o)).collect();
            let mut next = Vec::new();
            for (&o, nbrs) in frontier.iter().zip(&expanded) {
                for (gi, t) in nbrs.iter().enumerate() {
                    if let Some(t) = *t {
                        if orbit_of[t] == usize::MAX {
                            orbit_of[t] = id;
                            parent[t] = Some((o, gi));
                            next.push(t);
                        }
                    }
                }
            }
            next.sort_unstable();
            frontier = next;
        }
    }
    Ok(OrbitTable { ring: ring.clone(), kind, gens, objects, index, orbit_of, reps, parent })
}

impl OrbitTable {
    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn kind(&self) -> ObjectKind {
        self.kind
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn orbit_count(&self) -> usize {
        self.reps.len()
    }

    /// Orbit sizes in orbit-id order.
    pub fn orbit_sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.reps.len()];
        for &o in &self.orbit_of {
            s[o] += 1;
        }
        s
    }

    pub fn representative(&self, orbit: usize) -> Mat {
        self.object_matrix(self.reps[orbit])
    }

    fn object_matrix(&self, k: usize) -> Mat {
        let (r, c) = self.kind.shape();
        Mat::new(&self.ring, r, c, self.objects[k].clone()).expect("enumerated object")
    }

    fn lookup(&self, v: &Mat) -> Result<usize> {
        if v.ring() != &self.ring || (v.rows(), v.cols()) != self.kind.shape() {
            return Err(Error::ObjectOutOfDomain(format!("{:?} is not a {} object over {}", v, self.kind.describe(), self.ring)));
        }
        self.index
            .get(v.entries())
            .copied()
            .ok_or_else(|| Error::ObjectOutOfDomain(format!("{:?} is not in the table", v)))
    }

    pub fn orbit_of(&self, v: &Mat) -> Result<usize> {
        Ok(self.orbit_of[self.lookup(v)?])
    }

    /// Object chain and generator indices from the orbit representative to `k`.
    fn chain(&self, mut k: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        while let Some((p, g)) = self.parent[k] {
            out.push((k, g));
            k = p;
        }
        out.reverse();
        out
    }

    fn word_of(&self, steps: &[(usize, usize)]) -> GenWord {
        let (_, size) = self.kind.shape();
        let gens = steps.iter().map(|&(_, g)| self.gens[g].clone()).collect();
        GenWord::new(&self.ring, size, self.kind.family(), gens).expect("table generators are valid")
    }

    /// Word `w` with `v1·eval(w) = v2`: back from v1 to the last tree node
    /// the two paths share, then forward to v2.
    pub fn certify_equivalence(&self, v1: &Mat, v2: &Mat) -> Result<GenWord> {
        let (a, b) = (self.lookup(v1)?, self.lookup(v2)?);
        if self.orbit_of[a] != self.orbit_of[b] {
            return Err(Error::NotEquivalent);
        }
        let (pa, pb) = (self.chain(a), self.chain(b));
        let common = pa.iter().zip(&pb).take_while(|(x, y)| x == y).count();
        self.word_of(&pa[common..]).invert().concat(&self.word_of(&pb[common..]))
    }

    pub fn certify_witness(&self, v1: &Mat, v2: &Mat) -> Result<Witness> {
        let w = self.certify_equivalence(v1, v2)?;
        let reached = w.act(v1)? == *v2;
        Witness::builder(ClaimKind::Certify)
            .matrix("v1", v1.clone())
            .matrix("v2", v2.clone())
            .word("word", w)
            .note("orbit", self.orbit_of[self.lookup(v1)?].to_string())
            .check("v1·eval(word) = v2", reached)
            .build()
    }

    /// Parent links stay inside their orbit and every extracted path carries
    /// the representative to its object.
    pub fn self_check(&self) -> bool {
        self.parent.iter().enumerate().all(|(k, p)| match p {
            None => self.reps.contains(&k),
            Some((q, _)) => self.orbit_of[*q] == self.orbit_of[k],
        }) && (0..self.objects.len()).all(|k| {
            let rep = self.object_matrix(self.reps[self.orbit_of[k]]);
            self.word_of(&self.chain(k)).act(&rep).map_or(false, |x| x == self.object_matrix(k))
        })
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(CacheFile {
            format_version: CACHE_FORMAT_VERSION,
            ring: ring_to_json(&self.ring),
            kind: self.kind,
            gens: self.gens.iter().map(|g| (g.i, g.j, elem_to_json(&self.ring, &g.param))).collect(),
            objects: self.objects.iter().map(|o| o.iter().map(|e| elem_to_json(&self.ring, e)).collect()).collect(),
            orbit_of: self.orbit_of.clone(),
            reps: self.reps.clone(),
            parent: self.parent.clone(),
        })
        .expect("serializable")
    }

    pub fn from_json(v: &Value) -> Result<OrbitTable> {
        let c: CacheFile = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        if c.format_version != CACHE_FORMAT_VERSION {
            return Err(Error::Parse(format!("cache format {} is not {}", c.format_version, CACHE_FORMAT_VERSION)));
        }
        let ring = ring_from_json(&c.ring)?;
        let gens = c
            .gens
            .iter()
            .map(|(i, j, p)| Ok(Generator::new(*i, *j, elem_from_json(&ring, p)?)))
            .collect::<Result<Vec<_>>>()?;
        let objects = c
            .objects
            .iter()
            .map(|o| o.iter().map(|e| elem_from_json(&ring, e)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let index = objects.iter().cloned().enumerate().map(|(k, v)| (v, k)).collect();
        let n = objects.len();
        if c.orbit_of.len() != n || c.parent.len() != n {
            return Err(Error::Parse("cache arrays disagree in length".into()));
        }
        Ok(OrbitTable { ring, kind: c.kind, gens, objects, index, orbit_of: c.orbit_of, reps: c.reps, parent: c.parent })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(&self.to_json()).expect("serializable");
        std::fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {}", path.display(), e)))
    }

    pub fn load(path: &Path) -> Result<OrbitTable> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {}", path.display(), e)))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
        OrbitTable::from_json(&v)
    }

    /// Summary used by the CLI.
    pub fn summary(&self) -> Value {
        serde_json::json!({
            "ring": ring_to_json(&self.ring),
            "kind": self.kind,
            "objects": self.object_count(),
            "orbits": self.orbit_count(),
            "orbit_sizes": self.orbit_sizes(),
            "representatives": (0..self.orbit_count())
                .map(|k| self.objects[self.reps[k]].iter().map(|e| elem_to_json(&self.ring, e)).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    format_version: u32,
    ring: Value,
    kind: ObjectKind,
    gens: Vec<(usize, usize, Value)>,
    objects: Vec<Vec<Value>>,
    orbit_of: Vec<usize>,
    reps: Vec<usize>,
    parent: Vec<Option<(usize, usize)>>,
}

/// Validate that a frame is in the table domain before lookup.
pub fn frame_in_domain(v: &Mat, kind: ObjectKind) -> bool {
    match kind {
        ObjectKind::Row { .. } => true,
        _ => IsotropicFrame::new(v.clone(), kind.form()).is_ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::Ring;

    #[test]
    fn um2_z2() {
        let r = Ring::modular(2).unwrap();
        let t = enumerate_orbits(&r, ObjectKind::Row { len: 2 }, DEFAULT_BUDGET).unwrap();
        assert_eq!(t.object_count(), 3);
        assert_eq!(t.orbit_sizes(), vec![3]);
        let a = Mat::from_i64(&r, &[&[1, 0]]);
        let b = Mat::from_i64(&r, &[&[1, 1]]);
        let w = t.certify_equivalence(&a, &b).unwrap();
        assert_eq!(w, GenWord::from_i64(&r, 2, Family::Lin, &[(1, 2, 1)]).unwrap());
        assert!(t.certify_equivalence(&a, &a).unwrap().is_empty());
        assert!(t.self_check());
    }

    #[test]
    fn size_one_rows() {
        let r = Ring::modular(3).unwrap();
        let t = enumerate_orbits(&r, ObjectKind::Row { len: 1 }, DEFAULT_BUDGET).unwrap();
        assert_eq!(t.orbit_sizes(), vec![1, 1]);
        let a = Mat::from_i64(&r, &[&[1]]);
        let b = Mat::from_i64(&r, &[&[2]]);
        assert!(matches!(t.certify_equivalence(&a, &b), Err(Error::NotEquivalent)));
    }

    #[test]
    fn out_of_domain_and_budget() {
        let r = Ring::modular(4).unwrap();
        let t = enumerate_orbits(&r, ObjectKind::Row { len: 2 }, DEFAULT_BUDGET).unwrap();
        let bad = Mat::from_i64(&r, &[&[2, 2]]);
        assert!(matches!(t.certify_equivalence(&bad, &bad), Err(Error::ObjectOutOfDomain(_))));
        assert!(matches!(enumerate_orbits(&r, ObjectKind::Row { len: 20 }, 1000), Err(Error::SearchBudgetExceeded(_))));
    }

    #[test]
    fn frames_and_cache() {
        let r = Ring::modular(3).unwrap();
        let t = enumerate_orbits(&r, ObjectKind::SpFrame { n: 1, m: 2 }, DEFAULT_BUDGET).unwrap();
        assert_eq!(t.orbit_count(), 1);
        let back = OrbitTable::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        let o = enumerate_orbits(&r, ObjectKind::OrthFrame { n: 1, m: 3 }, DEFAULT_BUDGET).unwrap();
        assert!(o.self_check());
        let std = Mat::standard_frame(&r, 2, 6);
        assert_eq!(o.orbit_of(&std).unwrap(), 0);
    }
}
