//! Orthogonal quotients over local rings.
//!
//! Over a local ring with 1/2 every element of O_2 is diagonal
//! `diag(u, u⁻¹)` or antidiagonal `antidiag(u, u⁻¹)`. An element `a` of
//! O_2m (m ≥ 3) reduces by orthogonal row pivoting to `I ⊥ δ` with δ in
//! O_2, and the commutator of two such factored elements is elementary.
//!
//! Elementary orthogonal words realize `I ⊥ diag(w², w⁻²)` (see
//! [`square_word`]), so δ is only determined up to squares in its
//! unit. [`vaserstein_quotient`] normalizes δ to the least representative
//! of its square class when the ring is finite.

use crate::error::{Error, Result};
use crate::homotopy::Homotopy;
use crate::matrices::{Group, Mat};
use crate::reduce::{orth_reduce_rows, Flavor};
use crate::rings::{Elem, RingRef};
use crate::words::{sigma, ClaimKind, Family, GenWord, Generator, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Diag,
    AntiDiag,
}

impl Shape {
    pub fn name(self) -> &'static str {
        match self {
            Shape::Diag => "diag",
            Shape::AntiDiag => "antidiag",
        }
    }
}

/// `diag(u, u⁻¹)` or `antidiag(u, u⁻¹)`.
pub fn o2_element(ring: &RingRef, shape: Shape, u: &Elem) -> Result<Mat> {
    let (z, ui) = (ring.zero(), ring.inverse(u)?);
    let rows = match shape {
        Shape::Diag => vec![vec![u.clone(), z.clone()], vec![z, ui]],
        Shape::AntiDiag => vec![vec![z.clone(), u.clone()], vec![ui, z]],
    };
    Mat::from_rows(ring, rows)
}

pub fn classify_o2(a: &Mat) -> Result<(Shape, Elem)> {
    if a.rows() != 2 || a.cols() != 2 {
        return Err(Error::ShapeMismatch("classify_o2 takes a 2x2 matrix".into()));
    }
    let r = a.ring();
    if !a.membership(Group::O)? {
        return Err(Error::NotOrthogonal);
    }
    let (p, q, s, t) = (a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1));
    if r.is_zero(q) && r.is_zero(s) && r.is_one(&r.mul(p, t)?) {
        return Ok((Shape::Diag, p.clone()));
    }
    if r.is_zero(p) && r.is_zero(t) && r.is_one(&r.mul(q, s)?) {
        return Ok((Shape::AntiDiag, q.clone()));
    }
    Err(Error::NotClassifiable)
}

fn sl2_h(word: &mut GenWord, a: usize, c: usize, w: &Elem) -> Result<()> {
    // n(t) = x(t) y(-1/t) x(t), h(t) = n(t) n(-1) with x = oe_ac, y = oe_ca.
    let r = word.ring().clone();
    let winv = r.inverse(w)?;
    let one = r.one();
    let minus = r.neg(&one);
    for (t, ti) in [(w.clone(), winv), (minus.clone(), minus)] {
        word.push_i(a, c, t.clone())?;
        word.push_i(c, a, r.neg(&ti))?;
        word.push_i(a, c, t)?;
    }
    Ok(())
}

/// Orthogonal word of size `size` evaluating to `diag(w², w⁻²)` on the
/// hyperbolic plane starting at odd 1-based index `p` and the identity
/// elsewhere. A second plane `q` serves as scratch space.
pub fn square_word(ring: &RingRef, size: usize, p: usize, q: usize, w: &Elem) -> Result<GenWord> {
    if p % 2 == 0 || q % 2 == 0 || p == q || p.max(q) + 1 > size {
        return Err(Error::BadIndices(format!("planes {} and {} in size {}", p, q, size)));
    }
    let mut word = GenWord::empty(ring, size, Family::Orth);
    sl2_h(&mut word, p, q, w)?;
    sl2_h(&mut word, p, sigma(q), w)?;
    Ok(word)
}

/// Least unit in enumeration order in the square class of `u`, and a square
/// root `w` of `u/c`. `None` when the ring cannot be enumerated.
fn square_class(ring: &RingRef, u: &Elem) -> Result<Option<(Elem, Elem)>> {
    let candidates = match ring.elements() {
        Some(e) => e,
        None => match ring.poly_base().and_then(|b| b.elements()) {
            Some(e) => e.iter().map(|x| ring.embed_base(x)).collect::<Result<Vec<_>>>()?,
            None => return Ok(None),
        },
    };
    for c in candidates.iter().filter(|c| ring.is_unit(c)) {
        let target = ring.mul(u, &ring.inverse(c)?)?;
        for w in &candidates {
            if ring.mul(w, w)? == target {
                return Ok(Some((c.clone(), w.clone())));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug)]
pub struct Quotient {
    pub delta: Mat,
    pub shape: Shape,
    pub unit: Elem,
    /// `a = (I ⊥ δ)·eval(word)`.
    pub word: GenWord,
    /// Whether δ was reduced to its square-class representative.
    pub normalized: bool,
}

/// `a = (I_{2m−2} ⊥ δ)·eval(w)` with δ ∈ O_2.
pub fn vaserstein_quotient(a: &Mat) -> Result<Quotient> {
    let r = a.ring().clone();
    if !r.is_local() {
        return Err(Error::NotLocal);
    }
    if !r.half_invertible() {
        return Err(Error::HalfNotInvertible);
    }
    if !a.is_square() || a.rows() % 2 == 1 {
        return Err(Error::ShapeMismatch("vaserstein_quotient needs an even square matrix".into()));
    }
    let size = a.rows();
    let m = size / 2;
    if m < 3 {
        return Err(Error::SizeBound(format!("vaserstein_quotient needs m ≥ 3, got {}", m)));
    }
    if !a.membership(Group::O)? {
        return Err(Error::NotOrthogonal);
    }
    let (eps, b) = orth_reduce_rows(a, size - 2)?;
    let rest = Mat::identity(&r, size - 2).block_perp(&b.submatrix(size - 2, size, size - 2, size))?;
    if b != rest {
        return Err(Error::ReductionFailed(format!("reduction did not reach I ⊥ δ: {:?}", b)));
    }
    let delta = b.submatrix(size - 2, size, size - 2, size);
    let (shape, u) = classify_o2(&delta)?;
    let mut word = eps.invert();
    let (mut delta, mut unit, mut normalized) = (delta, u.clone(), false);
    if let Some((c, w)) = square_class(&r, &u)? {
        normalized = true;
        if c != u {
            // diag(u,u⁻¹) = diag(c,c⁻¹)·diag(w²,w⁻²);
            // antidiag(u,u⁻¹) = antidiag(c,c⁻¹)·diag(w⁻²,w²).
            let w = match shape {
                Shape::Diag => w,
                Shape::AntiDiag => r.inverse(&w)?,
            };
            let h = square_word(&r, size, size - 1, 1, &w)?;
            word = h.concat(&word)?;
            delta = o2_element(&r, shape, &c)?;
            unit = c;
        }
    }
    let rebuilt = Mat::identity(&r, size - 2).block_perp(&delta)?.mul(&word.eval()?)?;
    if rebuilt != *a {
        return Err(Error::ReductionFailed("(I ⊥ δ)·eval(w) differs from the input".into()));
    }
    Ok(Quotient { delta, shape, unit, word, normalized })
}

pub fn quotient_witness(a: &Mat, q: &Quotient) -> Result<Witness> {
    let r = a.ring();
    let size = a.rows();
    let rebuilt = Mat::identity(r, size - 2).block_perp(&q.delta)?.mul(&q.word.eval()?)? == *a;
    Witness::builder(ClaimKind::OrthoQuotient)
        .matrix("a", a.clone())
        .matrix("delta", q.delta.clone())
        .word("w", q.word.clone())
        .note("shape", q.shape.name())
        .note("unit", r.format(&q.unit))
        .note("normalized", q.normalized.to_string())
        .check("(I ⊥ delta)·eval(w) = a", rebuilt)
        .check("eval(w) ∈ O", q.word.eval()?.membership(Group::O)?)
        .build()
}

/// An element of O_2m presented as `(I_{2m−2} ⊥ δ)·eval(word)`.
#[derive(Clone, Debug)]
pub struct Factored {
    pub delta: Mat,
    pub word: GenWord,
}

impl Factored {
    pub fn new(delta: Mat, word: GenWord) -> Result<Factored> {
        if word.family() != Family::Orth {
            return Err(Error::UnsupportedPresentation("the word must be orthogonal".into()));
        }
        if delta.ring() != word.ring() {
            return Err(Error::DescriptorMismatch("δ and the word live over different rings".into()));
        }
        if word.size() < 6 {
            return Err(Error::SizeBound("factored elements need m ≥ 3".into()));
        }
        classify_o2(&delta)?;
        Ok(Factored { delta, word })
    }

    /// Factor a constant element through [`vaserstein_quotient`].
    pub fn from_matrix(a: &Mat) -> Result<Factored> {
        if a.ring().poly_base().is_some() {
            return Err(Error::UnsupportedPresentation(
                "polynomial inputs must be given as (I ⊥ δ)·word".into(),
            ));
        }
        let q = vaserstein_quotient(a)?;
        Factored::new(q.delta, q.word)
    }

    pub fn size(&self) -> usize {
        self.word.size()
    }

    pub fn d_matrix(&self) -> Result<Mat> {
        Mat::identity(self.word.ring(), self.size() - 2).block_perp(&self.delta)
    }

    pub fn matrix(&self) -> Result<Mat> {
        self.d_matrix()?.mul(&self.word.eval()?)
    }
}

/// `a⁻¹ = φ aᵗ φ` for a ∈ O.
fn orth_inverse(a: &Mat) -> Result<Mat> {
    let phi = Mat::phi(a.ring(), a.rows() / 2);
    phi.mul(&a.transpose())?.mul(&phi)
}

/// The word of `D⁻¹·eval(w)·D` for a monomial orthogonal D.
fn conjugate(w: &GenWord, d: &Mat) -> Result<GenWord> {
    let r = w.ring().clone();
    let n = d.rows();
    // column k of D is λ_k·e_{π(k)}
    let mut pinv = vec![0; n];
    let mut lambda = vec![r.zero(); n];
    for k in 0..n {
        let row = (0..n)
            .find(|&i| !r.is_zero(d.get(i, k)))
            .ok_or_else(|| Error::UnsupportedPresentation("δ is not monomial".into()))?;
        pinv[row] = k;
        lambda[k] = d.get(row, k).clone();
    }
    let gens = w
        .gens()
        .iter()
        .map(|g| {
            let (i, j) = (pinv[g.i - 1], pinv[g.j - 1]);
            let z = r.mul(&r.mul(&g.param, &r.inverse(&lambda[i])?)?, &lambda[j])?;
            Ok(Generator::new(i + 1, j + 1, z))
        })
        .collect::<Result<Vec<_>>>()?;
    GenWord::new(&r, n, w.family(), gens)
}

/// Square root of s among the candidate w = 1, u, v⁻¹, u·v⁻¹ (and their
/// negatives) suggested by the shapes, falling back to enumeration.
fn residual_root(r: &RingRef, s: &Elem, u: &Elem, v: &Elem) -> Result<Option<Elem>> {
    let vi = r.inverse(v)?;
    let mut cands = vec![r.one(), u.clone(), vi.clone(), r.mul(u, &vi)?];
    cands.extend(cands.clone().iter().map(|c| r.neg(c)));
    for w in cands {
        if r.mul(&w, &w)? == *s {
            return Ok(Some(w));
        }
    }
    Ok(square_class(r, s)?.filter(|(c, _)| r.is_one(c)).map(|(_, w)| w))
}

/// Word in EO_{2m+2} for `[a, b] ⊥ I_2`, where `[a,b] = a b a⁻¹ b⁻¹`.
///
/// The δ-factors are pushed to the left by conjugating the words they pass.
/// What remains on the left is `I ⊥ [δ_a, δ_b]`, which is diagonal with
/// square entries `diag(w², w⁻²)` for every pair of shapes and so is
/// realized by [`square_word`].
pub fn commutator_harness(a: &Factored, b: &Factored) -> Result<(GenWord, Witness)> {
    let r = a.word.ring().clone();
    if b.word.ring() != &r {
        return Err(Error::DescriptorMismatch("a and b over different rings".into()));
    }
    if a.size() != b.size() {
        return Err(Error::ShapeMismatch("a and b of different sizes".into()));
    }
    let size = a.size();
    let (da, db) = (a.d_matrix()?, b.d_matrix()?);
    let (da_inv, db_inv) = (orth_inverse(&da)?, orth_inverse(&db)?);

    enum F<'x> {
        D(Mat),
        W(&'x GenWord),
        Winv(GenWord),
    }
    let factors = [
        F::D(da.clone()),
        F::W(&a.word),
        F::D(db.clone()),
        F::W(&b.word),
        F::Winv(a.word.invert()),
        F::D(da_inv),
        F::Winv(b.word.invert()),
        F::D(db_inv),
    ];
    let mut left = Mat::identity(&r, size);
    let mut word = GenWord::empty(&r, size, Family::Orth);
    for f in &factors {
        match f {
            F::W(w) => word.append(w)?,
            F::Winv(w) => word.append(w)?,
            F::D(d) => {
                left = left.mul(d)?;
                word = conjugate(&word, d)?;
            }
        }
    }
    let res = left.submatrix(size - 2, size, size - 2, size);
    if left != Mat::identity(&r, size - 2).block_perp(&res)? {
        return Err(Error::ReductionFailed("δ-commutator escaped the last plane".into()));
    }
    let (_, u) = classify_o2(&a.delta)?;
    let (_, v) = classify_o2(&b.delta)?;
    let (shape, s) = classify_o2(&res)?;
    if shape != Shape::Diag {
        return Err(Error::ReductionFailed("δ-commutator is not diagonal".into()));
    }
    let w = residual_root(&r, &s, &u, &v)?
        .ok_or_else(|| Error::ReductionFailed(format!("{} is not a visible square", r.format(&s))))?;
    let full = square_word(&r, size, size - 1, 1, &w)?.concat(&word)?.embed(size + 2, 0)?;

    let (am, bm) = (a.matrix()?, b.matrix()?);
    let comm = am.mul(&bm)?.mul(&orth_inverse(&am)?)?.mul(&orth_inverse(&bm)?)?;
    let target = comm.pad_identity(2);
    let ev = full.eval()?;
    let mut wb = Witness::builder(ClaimKind::OrthoCommutator)
        .matrix("commutator", target.clone())
        .word("word", full.clone())
        .note("residual_root", r.format(&w))
        .check("eval(word) = [a,b] ⊥ I_2", ev == target)
        .check("word ∈ O", ev.membership(Group::O)?);
    if let Some(base) = r.poly_base() {
        if let Some(points) = base.elements() {
            let ok = points.iter().take(16).all(|x| {
                matches!((ev.substitute(x), target.substitute(x)), (Ok(p), Ok(q)) if p == q)
            });
            wb = wb.check("agrees at sample points X = x0", ok);
        }
    } else if size >= 6 && r.is_local() {
        let q = vaserstein_quotient(&comm)?;
        wb = wb.note("quotient_delta_unit", r.format(&q.unit));
        if q.normalized {
            wb = wb.check("quotient class of [a,b] is trivial", q.delta.is_identity());
        }
    }
    Ok((full, wb.build()?))
}

/// HSO variant: `a = γ(1)` for a word-backed special orthogonal homotopy γ.
pub fn commutator_harness_hso(gamma: &Homotopy, b: &Factored) -> Result<(GenWord, Witness)> {
    if gamma.flavor() != Flavor::Orthogonal {
        return Err(Error::UnsupportedPresentation("HSO factor needs an orthogonal homotopy".into()));
    }
    let w = gamma
        .word()
        .ok_or_else(|| Error::UnsupportedPresentation("HSO factor must be word-backed".into()))?;
    let base = gamma.ring().poly_base().cloned().expect("homotopy over a polynomial ring");
    if &base != b.word.ring() {
        return Err(Error::DescriptorMismatch("γ and b over different base rings".into()));
    }
    let at_one = w.specialize(&base.one())?;
    let a = Factored::new(Mat::identity(&base, 2), at_one)?;
    commutator_harness(&a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::Ring;

    #[test]
    fn classify_examples() {
        let r = Ring::modular(5).unwrap();
        let d = Mat::from_i64(&r, &[&[2, 0], &[0, 3]]);
        assert_eq!(classify_o2(&d).unwrap(), (Shape::Diag, Elem::int(2)));
        let a = Mat::from_i64(&r, &[&[0, 1], &[1, 0]]);
        assert_eq!(classify_o2(&a).unwrap(), (Shape::AntiDiag, Elem::int(1)));
        assert_eq!(classify_o2(&Mat::identity(&r, 2)).unwrap(), (Shape::Diag, Elem::int(1)));
        let bad = Mat::from_i64(&r, &[&[1, 1], &[0, 1]]);
        assert!(matches!(classify_o2(&bad), Err(Error::NotOrthogonal)));
    }

    #[test]
    fn square_word_shape() {
        let r = Ring::modular(7).unwrap();
        let w = Elem::int(3);
        let h = square_word(&r, 6, 5, 1, &w).unwrap();
        let expect = Mat::identity(&r, 4).block_perp(&Mat::from_i64(&r, &[&[2, 0], &[0, 4]])).unwrap();
        assert_eq!(h.eval().unwrap(), expect);
    }

    #[test]
    fn quotient_examples() {
        let r = Ring::modular(5).unwrap();
        let q = vaserstein_quotient(&Mat::identity(&r, 6)).unwrap();
        assert!(q.delta.is_identity() && q.word.is_empty());
        let a = Mat::identity(&r, 4).block_perp(&Mat::from_i64(&r, &[&[2, 0], &[0, 3]])).unwrap();
        let q = vaserstein_quotient(&a).unwrap();
        // 2 is not a square mod 5, so its class is represented by 2 itself.
        assert_eq!(q.unit, Elem::int(2));
        let a = Mat::identity(&r, 4).block_perp(&Mat::from_i64(&r, &[&[4, 0], &[0, 4]])).unwrap();
        let q = vaserstein_quotient(&a).unwrap();
        assert!(q.delta.is_identity());
    }

    #[test]
    fn commutator_shapes() {
        let r = Ring::modular(5).unwrap();
        let e1 = GenWord::from_i64(&r, 6, Family::Orth, &[(1, 3, 2), (4, 5, 1), (6, 1, 3)]).unwrap();
        let e2 = GenWord::from_i64(&r, 6, Family::Orth, &[(3, 5, 4), (2, 6, 1)]).unwrap();
        let a = Factored::new(o2_element(&r, Shape::Diag, &Elem::int(2)).unwrap(), e1).unwrap();
        let b = Factored::new(o2_element(&r, Shape::AntiDiag, &Elem::int(3)).unwrap(), e2).unwrap();
        let (w, _) = commutator_harness(&a, &b).unwrap();
        assert_eq!(w.size(), 8);
        let (w2, _) = commutator_harness(&b, &b).unwrap();
        assert_eq!(w2.size(), 8);
    }
}
