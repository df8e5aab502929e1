//! Words in elementary generators: the currency every witness is paid in.
//!
//! Generator indices are 1-based and the hyperbolic pairing is
//! σ(2k−1) = 2k, σ(2k) = 2k−1.

use std::fmt;

use crate::error::{Error, Result};
use crate::matrices::{Group, Mat};
use crate::rings::{Elem, Ring, RingRef};

/// Default cap on word length.
pub const DEFAULT_WORD_LIMIT: usize = 100_000;

/// Current word-length cap; `CGF_WORD_LIMIT` overrides the default.
pub fn word_limit() -> usize {
    std::env::var("CGF_WORD_LIMIT")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_WORD_LIMIT)
}

/// The hyperbolic partner of a 1-based index.
pub fn sigma(i: usize) -> usize {
    if i % 2 == 0 {
        i - 1
    } else {
        i + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// e_ij(λ) = I + λE_ij
    Lin,
    /// se_ij(z), preserving ψ
    Sp,
    /// oe_ij(z), preserving φ
    Orth,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Lin => "lin",
            Family::Sp => "sp",
            Family::Orth => "orth",
        }
    }

    pub fn parse(s: &str) -> Result<Family> {
        match s {
            "lin" | "linear" | "e" => Ok(Family::Lin),
            "sp" | "symplectic" | "se" => Ok(Family::Sp),
            "orth" | "orthogonal" | "oe" => Ok(Family::Orth),
            _ => Err(Error::Parse(format!("unknown generator family {:?}", s))),
        }
    }

    /// The group a word of this family evaluates into.
    pub fn group(self) -> Group {
        match self {
            Family::Lin => Group::SL,
            Family::Sp => Group::Sp,
            Family::Orth => Group::SO,
        }
    }

    fn prefix(self) -> &'static str {
        match self {
            Family::Lin => "e",
            Family::Sp => "se",
            Family::Orth => "oe",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub i: usize,
    pub j: usize,
    pub param: Elem,
}

impl Generator {
    pub fn new(i: usize, j: usize, param: Elem) -> Generator {
        Generator { i, j, param }
    }

    pub fn inverse(&self, ring: &Ring) -> Generator {
        Generator { i: self.i, j: self.j, param: ring.neg(&self.param) }
    }
}

/// Check indices of a generator against a family and ambient size.
pub fn validate(family: Family, size: usize, i: usize, j: usize) -> Result<()> {
    let bad = |why: &str| Err(Error::BadIndices(format!("({}, {}) in size {}: {}", i, j, size, why)));
    if i == j {
        return bad("i = j");
    }
    if i == 0 || j == 0 || i > size || j > size {
        return bad("out of range");
    }
    match family {
        Family::Lin if size < 2 => bad("size below 2"),
        Family::Sp | Family::Orth if size % 2 == 1 => bad("odd size"),
        Family::Orth if i == sigma(j) => bad("oe_ij needs i ≠ σ(j)"),
        _ => Ok(()),
    }
}

/// The second elementary term of se/oe, as (row, col, coefficient sign):
/// g = I + zE_ij + c·z·E_{σ(j)σ(i)}.
fn companion(family: Family, i: usize, j: usize) -> Option<(usize, usize, i64)> {
    match family {
        Family::Lin => None,
        Family::Sp if i == sigma(j) => None,
        Family::Sp => {
            let c = if (i + j) % 2 == 0 { -1 } else { 1 };
            Some((sigma(j), sigma(i), c))
        }
        Family::Orth => Some((sigma(j), sigma(i), -1)),
    }
}

/// `m ← m · g` by column operations.
pub fn apply_right(m: &mut Mat, family: Family, g: &Generator) -> Result<()> {
    let r = m.ring().clone();
    m.col_axpy(g.j - 1, g.i - 1, &g.param)?;
    if let Some((a, b, c)) = companion(family, g.i, g.j) {
        let z = r.mul(&r.from_i64(c), &g.param)?;
        m.col_axpy(b - 1, a - 1, &z)?;
    }
    Ok(())
}

/// `m ← g · m` by row operations.
pub fn apply_left(m: &mut Mat, family: Family, g: &Generator) -> Result<()> {
    let r = m.ring().clone();
    m.row_axpy(g.i - 1, g.j - 1, &g.param)?;
    if let Some((a, b, c)) = companion(family, g.i, g.j) {
        let z = r.mul(&r.from_i64(c), &g.param)?;
        m.row_axpy(a - 1, b - 1, &z)?;
    }
    Ok(())
}

/// The defining matrix of a single generator.
pub fn gen_matrix(ring: &RingRef, family: Family, size: usize, g: &Generator) -> Result<Mat> {
    validate(family, size, g.i, g.j)?;
    ring.check(&g.param)?;
    let mut m = Mat::identity(ring, size);
    apply_right(&mut m, family, g)?;
    Ok(m)
}

/// A sequence of generators of one family over one ring and size.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GenWord {
    ring: RingRef,
    size: usize,
    family: Family,
    gens: Vec<Generator>,
}

impl GenWord {
    pub fn empty(ring: &RingRef, size: usize, family: Family) -> GenWord {
        GenWord { ring: ring.clone(), size, family, gens: Vec::new() }
    }

    /// Build and validate a word. Zero-parameter generators are dropped.
    pub fn new(ring: &RingRef, size: usize, family: Family, gens: Vec<Generator>) -> Result<GenWord> {
        let mut w = GenWord::empty(ring, size, family);
        for g in gens {
            w.push(g)?;
        }
        Ok(w)
    }

    /// Convenience: generators as (i, j, small integer).
    pub fn from_i64(ring: &RingRef, size: usize, family: Family, gens: &[(usize, usize, i64)]) -> Result<GenWord> {
        GenWord::new(ring, size, family, gens.iter().map(|&(i, j, z)| Generator::new(i, j, ring.from_i64(z))).collect())
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn gens(&self) -> &[Generator] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// Append one generator; zero parameters are skipped.
    pub fn push(&mut self, g: Generator) -> Result<()> {
        validate(self.family, self.size, g.i, g.j)?;
        self.ring.check(&g.param)?;
        if self.ring.is_zero(&g.param) {
            return Ok(());
        }
        let limit = word_limit();
        if self.gens.len() >= limit {
            return Err(Error::WordLimit { len: self.gens.len() + 1, limit });
        }
        self.gens.push(g);
        Ok(())
    }

    pub fn push_i(&mut self, i: usize, j: usize, param: Elem) -> Result<()> {
        self.push(Generator::new(i, j, param))
    }

    fn compatible(&self, other: &GenWord) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::DescriptorMismatch(format!("{} vs {}", self.ring, other.ring)));
        }
        if self.size != other.size || self.family != other.family {
            return Err(Error::ShapeMismatch(format!(
                "{} word of size {} vs {} word of size {}",
                self.family.name(),
                self.size,
                other.family.name(),
                other.size
            )));
        }
        Ok(())
    }

    /// Append all of `other`.
    pub fn append(&mut self, other: &GenWord) -> Result<()> {
        self.compatible(other)?;
        let limit = word_limit();
        if self.gens.len() + other.gens.len() > limit {
            return Err(Error::WordLimit { len: self.gens.len() + other.gens.len(), limit });
        }
        self.gens.extend(other.gens.iter().cloned());
        Ok(())
    }

    /// `self ++ other`
    pub fn concat(&self, other: &GenWord) -> Result<GenWord> {
        let mut w = self.clone();
        w.append(other)?;
        Ok(w)
    }

    /// Concatenate a list of words of one shape.
    pub fn concat_all(parts: &[&GenWord]) -> Result<GenWord> {
        let mut it = parts.iter();
        let mut w = (*it.next().expect("at least one word")).clone();
        for p in it {
            w.append(p)?;
        }
        Ok(w)
    }

    /// Product of the generator matrices; the empty word gives I.
    pub fn eval(&self) -> Result<Mat> {
        let mut m = Mat::identity(&self.ring, self.size);
        self.apply_to(&mut m)?;
        Ok(m)
    }

    /// `m ← m · eval(self)`
    pub fn apply_to(&self, m: &mut Mat) -> Result<()> {
        if m.cols() != self.size || m.ring() != &self.ring {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} over {} times a word of size {} over {}",
                m.rows(),
                m.cols(),
                m.ring(),
                self.size,
                self.ring
            )));
        }
        for g in &self.gens {
            apply_right(m, self.family, g)?;
        }
        Ok(())
    }

    /// `m · eval(self)` for a copy of `m`.
    pub fn act(&self, m: &Mat) -> Result<Mat> {
        let mut out = m.clone();
        self.apply_to(&mut out)?;
        Ok(out)
    }

    /// `eval(self) · m` by row operations.
    pub fn act_left(&self, m: &Mat) -> Result<Mat> {
        if m.rows() != self.size || m.ring() != &self.ring {
            return Err(Error::ShapeMismatch("left action shape".into()));
        }
        let mut out = m.clone();
        for g in self.gens.iter().rev() {
            apply_left(&mut out, self.family, g)?;
        }
        Ok(out)
    }

    /// Reverse with negated parameters, so eval(invert(w))·eval(w) = I.
    pub fn invert(&self) -> GenWord {
        let gens = self.gens.iter().rev().map(|g| g.inverse(&self.ring)).collect();
        GenWord { gens, ..self.clone() }
    }

    /// For linear words: the word evaluating to eval(self)ᵗ.
    pub fn transpose(&self) -> Result<GenWord> {
        if self.family != Family::Lin {
            return Err(Error::Unsupported("transpose of a non-linear word".into()));
        }
        let gens = self.gens.iter().rev().map(|g| Generator::new(g.j, g.i, g.param.clone())).collect();
        Ok(GenWord { gens, ..self.clone() })
    }

    /// Move every generator into a larger ambient size with an index offset.
    /// The offset must be even for se/oe families so the pairing survives.
    pub fn embed(&self, new_size: usize, offset: usize) -> Result<GenWord> {
        if offset + self.size > new_size || (self.family != Family::Lin && offset % 2 == 1) {
            return Err(Error::BadIndices(format!("cannot embed size {} at {} in {}", self.size, offset, new_size)));
        }
        let gens = self
            .gens
            .iter()
            .map(|g| Generator::new(g.i + offset, g.j + offset, g.param.clone()))
            .collect();
        GenWord::new(&self.ring, new_size, self.family, gens)
    }

    /// Rebuild over another ring by mapping every parameter.
    pub fn map_params(&self, target: &RingRef, f: impl Fn(&Elem) -> Result<Elem>) -> Result<GenWord> {
        let gens = self
            .gens
            .iter()
            .map(|g| Ok(Generator::new(g.i, g.j, f(&g.param)?)))
            .collect::<Result<Vec<_>>>()?;
        GenWord::new(target, self.size, self.family, gens)
    }

    /// Rebuild over another ring, keeping every parameter's payload.
    pub fn recast(&self, target: &RingRef) -> Result<GenWord> {
        self.map_params(target, |e| Ok(e.clone()))
    }

    /// Every parameter p(T) ↦ p(bT).
    pub fn dilate(&self, b: &Elem) -> Result<GenWord> {
        let r = self.ring.clone();
        self.map_params(&r, |p| r.dilate(p, b))
    }

    /// Every parameter p(T) ↦ p(t), landing over the coefficient ring.
    pub fn specialize(&self, t: &Elem) -> Result<GenWord> {
        let base = self
            .ring
            .poly_base()
            .ok_or_else(|| Error::DescriptorMismatch(format!("{} is not a polynomial ring", self.ring)))?
            .clone();
        self.map_params(&base, |p| self.ring.substitute(p, t))
    }

    /// Embed a word over R as a word of constants over `target` = R[T] or R_s.
    pub fn lift_into(&self, target: &RingRef) -> Result<GenWord> {
        self.map_params(target, |p| target.embed_base(p))
    }

    /// Cancel adjacent inverse pairs and merge equal-position neighbours.
    /// Never needed for correctness.
    pub fn peephole(&self) -> GenWord {
        let r = &self.ring;
        let mut out: Vec<Generator> = Vec::with_capacity(self.gens.len());
        for g in &self.gens {
            if let Some(last) = out.last_mut() {
                if last.i == g.i && last.j == g.j {
                    let s = r.add(&last.param, &g.param);
                    if r.is_zero(&s) {
                        out.pop();
                    } else {
                        last.param = s;
                    }
                    continue;
                }
            }
            out.push(g.clone());
        }
        GenWord { gens: out, ..self.clone() }
    }

    pub fn display(&self) -> String {
        let parts: Vec<String> = self
            .gens
            .iter()
            .map(|g| format!("{}_{}{}({})", self.family.prefix(), g.i, g.j, self.ring.format(&g.param)))
            .collect();
        format!("[{}]", parts.join(", "))
    }
}

impl fmt::Display for GenWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

/// What a witness claims.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClaimKind {
    ReduceRow,
    Complete,
    Whitehead,
    Transvection,
    CommonPerp,
    TwoRow,
    Roitman,
    HomotopyCommute,
    Commutator,
    VasersteinTransport,
    QuillenSplit,
    Patch,
    FixedFrame,
    ClassifyO2,
    OrthoQuotient,
    OrthoCommutator,
    Certify,
}

impl ClaimKind {
    pub fn name(self) -> &'static str {
        use ClaimKind::*;
        match self {
            ReduceRow => "reduce_row",
            Complete => "complete",
            Whitehead => "whitehead",
            Transvection => "transvection",
            CommonPerp => "common_perp",
            TwoRow => "two_row",
            Roitman => "roitman",
            HomotopyCommute => "homotopy_commute",
            Commutator => "commutator",
            VasersteinTransport => "vaserstein_transport",
            QuillenSplit => "quillen_split",
            Patch => "patch",
            FixedFrame => "fixed_frame",
            ClassifyO2 => "classify_o2",
            OrthoQuotient => "ortho_quotient",
            OrthoCommutator => "ortho_commutator",
            Certify => "certify",
        }
    }
}

/// One certified identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

/// A claim bundled with the matrices, words and checks that certify it.
/// Only constructed when every check passes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub claim: ClaimKind,
    pub matrices: Vec<(String, Mat)>,
    pub words: Vec<(String, GenWord)>,
    pub checks: Vec<Check>,
    /// Free-form annotations such as the witness mode.
    pub notes: Vec<(String, String)>,
}

impl Witness {
    pub fn builder(claim: ClaimKind) -> WitnessBuilder {
        WitnessBuilder {
            w: Witness { claim, matrices: vec![], words: vec![], checks: vec![], notes: vec![] },
        }
    }

    pub fn word(&self, name: &str) -> Option<&GenWord> {
        self.words.iter().find(|(n, _)| n == name).map(|(_, w)| w)
    }

    pub fn matrix(&self, name: &str) -> Option<&Mat> {
        self.matrices.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    pub fn note(&self, name: &str) -> Option<&str> {
        self.notes.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_str())
    }
}

pub struct WitnessBuilder {
    w: Witness,
}

impl WitnessBuilder {
    pub fn matrix(mut self, name: &str, m: Mat) -> Self {
        self.w.matrices.push((name.to_string(), m));
        self
    }

    pub fn word(mut self, name: &str, w: GenWord) -> Self {
        self.w.words.push((name.to_string(), w));
        self
    }

    pub fn check(mut self, name: &str, passed: bool) -> Self {
        self.w.checks.push(Check { name: name.to_string(), passed });
        self
    }

    pub fn note(mut self, name: &str, value: impl Into<String>) -> Self {
        self.w.notes.push((name.to_string(), value.into()));
        self
    }

    /// Fails with [`Error::CheckFailed`] naming the first failing check.
    pub fn build(self) -> Result<Witness> {
        if let Some(c) = self.w.checks.iter().find(|c| !c.passed) {
            return Err(Error::CheckFailed(format!("{}: {}", self.w.claim.name(), c.name)));
        }
        Ok(self.w)
    }
}
