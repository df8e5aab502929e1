//! Row reduction and completion over local rings.
//!
//! Every routine pivots on the lowest-index unit and sweeps clearing passes
//! left to right, so identical inputs always give identical words.
//!
//! Completion works by reducing the leading rows to `[I | 0]` with a word ε
//! acting on the right and returning `W = ε⁻¹`, whose evaluation then has
//! the input as its leading rows.
//!
//! The symplectic reduction pivots directly with `se` generators. The
//! orthogonal one pivots on hyperbolic pairs: it first moves a unit into
//! a coordinate of index at least 3, uses it to make the first entry 1,
//! clears the rest, and lets the form identity (with 1/2 in the ring)
//! force the leftover entries to vanish.

use crate::error::{Error, Result};
use crate::matrices::{FormKind, Group, IsotropicFrame, Mat};
use crate::rings::{Elem, RingRef};
use crate::words::{ClaimKind, Family, GenWord, Generator, Witness};

/// A working copy of a matrix together with the word applied so far.
struct Sweep {
    mat: Mat,
    word: GenWord,
}

impl Sweep {
    fn new(mat: &Mat, family: Family) -> Sweep {
        let word = GenWord::empty(mat.ring(), mat.cols(), family);
        Sweep { mat: mat.clone(), word }
    }

    fn ring(&self) -> &RingRef {
        self.mat.ring()
    }

    /// Entry in 1-based coordinates.
    fn at(&self, row: usize, col: usize) -> Elem {
        self.mat.get(row, col - 1).clone()
    }

    fn op(&mut self, i: usize, j: usize, z: Elem) -> Result<()> {
        if self.ring().is_zero(&z) {
            return Ok(());
        }
        let g = Generator::new(i, j, z);
        crate::words::apply_right(&mut self.mat, self.word.family(), &g)?;
        self.word.push(g)
    }

    /// Lowest 1-based column in `from..=to` holding a unit of row `row`.
    fn pivot(&self, row: usize, from: usize, to: usize) -> Option<usize> {
        (from..=to).find(|&c| self.ring().is_unit(&self.mat.get(row, c - 1)))
    }
}

fn require_local(ring: &RingRef) -> Result<()> {
    if ring.is_local() {
        Ok(())
    } else {
        Err(Error::NotLocal)
    }
}

fn one_minus_over(ring: &RingRef, a: &Elem, unit: &Elem) -> Result<Elem> {
    ring.mul(&ring.sub(&ring.one(), a), &ring.inverse(unit)?)
}

/// Linear reduction of `row`, columns `off+1..=size`, to the unit vector at `off+1`.
fn linear_row(s: &mut Sweep, row: usize, off: usize) -> Result<()> {
    let r = s.ring().clone();
    let size = s.mat.cols();
    let first = off + 1;
    let p = s
        .pivot(row, first, size)
        .ok_or_else(|| Error::NoUnitEntry(format!("row {} has no unit entry", row + 1)))?;
    let v1 = s.at(row, first);
    if p != first {
        let z = one_minus_over(&r, &v1, &s.at(row, p))?;
        s.op(p, first, z)?;
    } else if !r.is_one(&v1) {
        let z = one_minus_over(&r, &s.at(row, first + 1), &v1)?;
        s.op(first, first + 1, z)?;
        let v1 = s.at(row, first);
        s.op(first + 1, first, r.sub(&r.one(), &v1))?;
    }
    for j in first + 1..=size {
        let z = r.neg(&s.at(row, j));
        s.op(first, j, z)?;
    }
    Ok(())
}

/// Word ε with v·eval(ε) = e_1 for a unimodular row v over a local ring.
pub fn reduce_row_linear(v: &Mat) -> Result<GenWord> {
    if v.rows() != 1 || v.cols() < 2 {
        return Err(Error::ShapeMismatch("reduce_row_linear needs a 1×m row with m ≥ 2".into()));
    }
    require_local(v.ring())?;
    let mut s = Sweep::new(v, Family::Lin);
    linear_row(&mut s, 0, 0)?;
    Ok(s.word)
}

/// Word W of size m whose evaluation has V as its leading rows.
///
/// When n = m the completion exists only for det V = 1.
pub fn complete_um_linear(v: &Mat) -> Result<GenWord> {
    let (n, m) = (v.rows(), v.cols());
    if m < 2 || n > m {
        return Err(Error::ShapeMismatch(format!("cannot complete a {}x{} matrix", n, m)));
    }
    require_local(v.ring())?;
    let r = v.ring().clone();
    let mut s = Sweep::new(v, Family::Lin);
    for k in 0..n {
        if k + 1 < m {
            linear_row(&mut s, k, k).map_err(|e| match e {
                Error::NoUnitEntry(_) => Error::NotRightInvertible,
                e => e,
            })?;
        } else {
            let last = s.at(k, m);
            if !r.is_unit(&last) {
                return Err(Error::NotRightInvertible);
            }
            if !r.is_one(&last) {
                return Err(Error::NotSpecialLinear);
            }
        }
        for c in 1..=k {
            let z = r.neg(&s.at(k, c));
            s.op(k + 1, c, z)?;
        }
    }
    debug_assert_eq!(s.mat, Mat::standard_frame(&r, n, m));
    Ok(s.word.invert())
}

/// Symplectic reduction of `row`, columns `off+1..=size`, to the unit
/// vector at `off+1`. `off` is even.
fn symplectic_row(s: &mut Sweep, row: usize, off: usize) -> Result<()> {
    let r = s.ring().clone();
    let size = s.mat.cols();
    let (c1, c2) = (off + 1, off + 2);
    let p = s
        .pivot(row, c1, size)
        .ok_or_else(|| Error::NoUnitEntry(format!("row {} has no unit entry", row + 1)))?;
    let v1 = s.at(row, c1);
    if p == c1 {
        if !r.is_one(&v1) {
            let z = one_minus_over(&r, &s.at(row, c2), &v1)?;
            s.op(c1, c2, z)?;
            let v1 = s.at(row, c1);
            s.op(c2, c1, r.sub(&r.one(), &v1))?;
        }
    } else {
        let z = one_minus_over(&r, &v1, &s.at(row, p))?;
        s.op(p, c1, z)?;
    }
    for j in off + 3..=size {
        let z = r.neg(&s.at(row, j));
        s.op(c1, j, z)?;
    }
    let z = r.neg(&s.at(row, c2));
    s.op(c1, c2, z)?;
    Ok(())
}

/// Word θ with v·eval(θ) = e_1, for a unimodular row of even length.
pub fn reduce_row_symplectic(v: &Mat) -> Result<GenWord> {
    if v.rows() != 1 || v.cols() % 2 == 1 {
        return Err(Error::ShapeMismatch("reduce_row_symplectic needs a 1×2m row".into()));
    }
    require_local(v.ring())?;
    let mut s = Sweep::new(v, Family::Sp);
    symplectic_row(&mut s, 0, 0)?;
    Ok(s.word)
}

/// Word W in `se` generators whose evaluation has the frame as leading rows.
pub fn complete_sp(frame: &IsotropicFrame) -> Result<GenWord> {
    if !matches!(frame.kind(), FormKind::SymplecticPsi(_)) {
        return Err(Error::FormViolation("complete_sp needs a symplectic frame".into()));
    }
    let v = frame.matrix();
    require_local(v.ring())?;
    let r = v.ring().clone();
    let (n, m) = frame.half_shape();
    let mut s = Sweep::new(v, Family::Sp);
    for k in 0..n {
        let (a, b) = (2 * k, 2 * k + 1);
        let off = 2 * k;
        symplectic_row(&mut s, a, off)?;
        // The form pairs row a with row b, forcing entry off+2 of row b to 1.
        if !r.is_one(&s.at(b, off + 2)) {
            return Err(Error::FormViolation("paired row does not meet the pivot".into()));
        }
        for j in off + 3..=2 * m {
            let z = r.neg(&s.at(b, j));
            s.op(off + 2, j, z)?;
        }
        let c = s.at(b, off + 1);
        s.op(off + 2, off + 1, r.neg(&c))?;
    }
    if s.mat != Mat::standard_frame(&r, 2 * n, 2 * m) {
        return Err(Error::FormViolation("reduction left a non-standard frame".into()));
    }
    Ok(s.word.invert())
}

/// Orthogonal reduction of `row`, columns `off+1..=size`, to the unit
/// vector at `off+1`, relying on isotropy of the row.
fn orthogonal_row(s: &mut Sweep, row: usize, off: usize) -> Result<()> {
    let r = s.ring().clone();
    let size = s.mat.cols();
    let (c1, c2) = (off + 1, off + 2);
    let mut p = s
        .pivot(row, c1, size)
        .ok_or_else(|| Error::NoUnitEntry(format!("row {} has no unit entry", row + 1)))?;
    if r.is_one(&s.at(row, c1)) {
        p = c1;
    } else if p <= c2 {
        if size < off + 4 {
            return Err(Error::ReductionFailed("no room to move the pivot past its hyperbolic partner".into()));
        }
        let c3 = off + 3;
        let z = one_minus_over(&r, &s.at(row, c3), &s.at(row, p))?;
        s.op(p, c3, z)?;
        p = c3;
    }
    let z = one_minus_over(&r, &s.at(row, c1), &s.at(row, p))?;
    s.op(p, c1, z)?;
    for j in off + 3..=size {
        let z = r.neg(&s.at(row, j));
        s.op(c1, j, z)?;
    }
    if !r.is_zero(&s.at(row, c2)) {
        return Err(Error::FormViolation("row is not isotropic".into()));
    }
    Ok(())
}

/// Options for [`complete_orth_with`].
#[derive(Clone, Copy, Debug, Default)]
pub struct OrthOptions {
    /// Attempt completion outside m ≥ n + 2; failures are reported.
    pub permissive: bool,
}

/// Word W in `oe` generators whose evaluation has the frame as leading rows.
/// Requires m ≥ n + 2.
pub fn complete_orth(frame: &IsotropicFrame) -> Result<GenWord> {
    complete_orth_with(frame, OrthOptions::default())
}

pub fn complete_orth_with(frame: &IsotropicFrame, opts: OrthOptions) -> Result<GenWord> {
    if !matches!(frame.kind(), FormKind::OrthogonalPhi(_)) {
        return Err(Error::FormViolation("complete_orth needs an orthogonal frame".into()));
    }
    let v = frame.matrix();
    let r = v.ring().clone();
    require_local(&r)?;
    if !r.half_invertible() {
        return Err(Error::HalfNotInvertible);
    }
    let (n, m) = frame.half_shape();
    if n > 0 && m < n + 2 {
        if !opts.permissive {
            return Err(Error::SizeBound(format!("orthogonal completion needs m ≥ n + 2, got n = {}, m = {}", n, m)));
        }
    } else if n > 0 && m == n + 2 {
        log::warn!("orthogonal completion at the size boundary m = n + 2 (n = {}, m = {})", n, m);
    }
    let mut s = Sweep::new(v, Family::Orth);
    for k in 0..n {
        let (a, b) = (2 * k, 2 * k + 1);
        let off = 2 * k;
        orthogonal_row(&mut s, a, off)?;
        if !r.is_one(&s.at(b, off + 2)) {
            return Err(Error::FormViolation("paired row does not meet the pivot".into()));
        }
        for j in off + 3..=2 * m {
            let z = r.neg(&s.at(b, j));
            s.op(off + 2, j, z)?;
        }
        if !r.is_zero(&s.at(b, off + 1)) {
            return Err(Error::FormViolation("paired row is not isotropic".into()));
        }
    }
    if s.mat != Mat::standard_frame(&r, 2 * n, 2 * m) {
        return Err(Error::ReductionFailed("reduction left a non-standard frame".into()));
    }
    Ok(s.word.invert())
}

/// Reduce the leading rows of `v` (a full matrix or a frame) to `[I | 0]`
/// with an orthogonal word, permissively. Used by the quotient machinery.
pub(crate) fn orth_reduce_rows(v: &Mat, rows: usize) -> Result<(GenWord, Mat)> {
    let mut s = Sweep::new(v, Family::Orth);
    let r = v.ring().clone();
    for k in 0..rows / 2 {
        let (a, b) = (2 * k, 2 * k + 1);
        let off = 2 * k;
        orthogonal_row(&mut s, a, off)?;
        for j in off + 3..=v.cols() {
            let z = r.neg(&s.at(b, j));
            s.op(off + 2, j, z)?;
        }
    }
    Ok((s.word, s.mat))
}

/// The flavor of a completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Linear,
    Symplectic,
    Orthogonal,
}

impl Flavor {
    pub fn parse(s: &str) -> Result<Flavor> {
        match s {
            "linear" | "lin" => Ok(Flavor::Linear),
            "sp" | "symplectic" => Ok(Flavor::Symplectic),
            "orth" | "orthogonal" => Ok(Flavor::Orthogonal),
            _ => Err(Error::Parse(format!("unknown flavor {:?}", s))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Flavor::Linear => "linear",
            Flavor::Symplectic => "sp",
            Flavor::Orthogonal => "orth",
        }
    }

    pub fn family(self) -> Family {
        match self {
            Flavor::Linear => Family::Lin,
            Flavor::Symplectic => Family::Sp,
            Flavor::Orthogonal => Family::Orth,
        }
    }

    pub fn group(self) -> Group {
        self.family().group()
    }

    pub fn form_kind(self) -> FormKind {
        match self {
            Flavor::Linear => FormKind::None,
            Flavor::Symplectic => FormKind::SymplecticPsi(0),
            Flavor::Orthogonal => FormKind::OrthogonalPhi(0),
        }
    }
}

/// Witness that `v·eval(word) = e_1`.
pub fn reduce_row_witness(v: &Mat, flavor: Flavor) -> Result<Witness> {
    let w = match flavor {
        Flavor::Linear => reduce_row_linear(v)?,
        Flavor::Symplectic => reduce_row_symplectic(v)?,
        Flavor::Orthogonal => return Err(Error::Unsupported("orthogonal rows reduce through complete_orth".into())),
    };
    let target = Mat::standard_frame(v.ring(), 1, v.cols());
    let reached = w.act(v)? == target;
    Witness::builder(ClaimKind::ReduceRow)
        .note("flavor", flavor.name())
        .matrix("v", v.clone())
        .word("epsilon", w)
        .check("v·eval(epsilon) = e_1", reached)
        .build()
}

/// Complete `v` and certify leading-row agreement and group membership.
pub fn complete_witness(v: &Mat, flavor: Flavor, opts: OrthOptions) -> Result<Witness> {
    let w = match flavor {
        Flavor::Linear => complete_um_linear(v)?,
        Flavor::Symplectic => complete_sp(&IsotropicFrame::new(v.clone(), flavor.form_kind())?)?,
        Flavor::Orthogonal => {
            complete_orth_with(&IsotropicFrame::new(v.clone(), flavor.form_kind())?, opts)?
        }
    };
    let e = w.eval()?;
    let rows_ok = e.top_rows(v.rows()) == *v;
    let member = match flavor {
        Flavor::Linear if e.rows() <= crate::matrices::DET_SIZE_LIMIT => e.membership(Group::SL)?,
        Flavor::Linear => true,
        Flavor::Symplectic => e.membership(Group::Sp)?,
        Flavor::Orthogonal => e.membership(Group::O)?,
    };
    Witness::builder(ClaimKind::Complete)
        .note("flavor", flavor.name())
        .matrix("V", v.clone())
        .word("W", w)
        .check("leading rows of eval(W) equal V", rows_ok)
        .check("eval(W) lies in the group", member)
        .build()
}
