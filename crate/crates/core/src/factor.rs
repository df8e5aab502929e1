//! Explicit elementary factorizations.
//!
//! * Whitehead: `δ ⊥ δ⁻¹` as a word, linear (any ring) and symplectic.
//! * Unipotent transvections `I + c·r` with `r·c = 0` over local rings.
//! * The common-perpendicular lemma: rows with a shared `w`,
//!   `⟨v1, w⟩ = ⟨v2, w⟩ = 1`, are elementarily equivalent.
//! * Two rows of a right-invertible 2×n matrix are equivalent.
//! * Roitman's lifting argument through `R/(x_0, …, x_{k−1})`.

use crate::error::{Error, Result};
use crate::matrices::{FormKind, Group, IsotropicFrame, Mat, RightInverseCert};
use crate::reduce::{complete_sp, reduce_row_linear};
use crate::rings::{Descriptor, Elem, Ring, RingRef};
use crate::words::{ClaimKind, Family, GenWord, Generator, Witness};

/// Word for `[[I, A], [0, I]]` (upper) or `[[I, 0], [A, I]]` (lower) in size 2n.
fn block_unipotent(a: &Mat, upper: bool) -> Result<GenWord> {
    let n = a.rows();
    let mut w = GenWord::empty(a.ring(), 2 * n, Family::Lin);
    for i in 0..n {
        for j in 0..n {
            let (gi, gj) = if upper { (i + 1, n + j + 1) } else { (n + i + 1, j + 1) };
            w.push(Generator::new(gi, gj, a.get(i, j).clone()))?;
        }
    }
    Ok(w)
}

/// Word evaluating to `d ⊥ d⁻¹`, from
/// `(d ⊥ d⁻¹) = U(d)·L(−d⁻¹)·U(d)·J` and `J = U(−I)·L(I)·U(−I)`.
pub fn whitehead_linear(d: &Mat) -> Result<GenWord> {
    if !d.is_square() {
        return Err(Error::ShapeMismatch("Whitehead needs a square matrix".into()));
    }
    let r = d.ring().clone();
    let n = d.rows();
    let dinv = d.inverse().map_err(|e| match e {
        Error::NotInvertible => Error::NotInvertible,
        e => e,
    })?;
    let id = Mat::identity(&r, n);
    let u_d = block_unipotent(d, true)?;
    let l_dinv = block_unipotent(&dinv.neg(), false)?;
    let u_mi = block_unipotent(&id.neg(), true)?;
    let l_i = block_unipotent(&id, false)?;
    GenWord::concat_all(&[&u_d, &l_dinv, &u_d, &u_mi, &l_i, &u_mi])
}

/// `se` word of size 4n evaluating to `d ⊥ d⁻¹` for `d ∈ Sp_2n` over a
/// local ring, by completing the full symplectic matrix.
pub fn whitehead_symplectic(d: &Mat) -> Result<GenWord> {
    if !d.is_square() || d.rows() % 2 == 1 {
        return Err(Error::ShapeMismatch("symplectic Whitehead needs a 2n×2n matrix".into()));
    }
    if !d.membership(Group::Sp)? {
        return Err(Error::NotSymplectic);
    }
    let dinv = d.inverse()?;
    let full = d.block_perp(&dinv)?;
    let frame = IsotropicFrame::new(full, FormKind::SymplecticPsi(0))?;
    complete_sp(&frame)
}

/// For `d` given as a word of any family: `embed(w) ++ embed(w⁻¹)` in
/// twice the size. Valid over every ring.
pub fn whitehead_from_word(w: &GenWord) -> Result<GenWord> {
    let n = w.size();
    let top = w.embed(2 * n, 0)?;
    let bottom = w.invert().embed(2 * n, n)?;
    top.concat(&bottom)
}

fn dot(r: &Ring, a: &[Elem], b: &[Elem]) -> Result<Elem> {
    let mut s = r.zero();
    for (x, y) in a.iter().zip(b) {
        s = r.add(&s, &r.mul(x, y)?);
    }
    Ok(s)
}

/// Word with evaluation `I + c·r`, for a unimodular column `c` and a row
/// `r` with `r·c = 0`, over a local ring, m ≥ 3.
pub fn transvection_factor(c: &Mat, r: &Mat) -> Result<GenWord> {
    if c.cols() == 1 && c.rows() < 3 {
        return Err(Error::SizeBound("transvection_factor needs m ≥ 3".into()));
    }
    transvection_unchecked(c, r)
}

/// As [`transvection_factor`] but only requiring m ≥ 2.
pub(crate) fn transvection_unchecked(c: &Mat, r: &Mat) -> Result<GenWord> {
    let m = c.rows();
    if c.cols() != 1 || r.rows() != 1 || r.cols() != m || m < 2 {
        return Err(Error::ShapeMismatch("transvection needs an m×1 column and a 1×m row".into()));
    }
    let ring = c.ring().clone();
    if !ring.is_zero(&dot(&ring, &r.row_vec(0), &c.col_vec(0))?) {
        return Err(Error::NotPerpendicular);
    }
    if !ring.is_local() {
        return Err(Error::NotLocal);
    }
    // γ·c = e_1ᵗ with γ the transpose of the row reduction of cᵗ.
    let gamma = reduce_row_linear(&c.transpose())?.transpose()?;
    let r_prime = gamma.invert().act(r)?;
    debug_assert!(ring.is_zero(r_prime.get(0, 0)));
    let mut mid = GenWord::empty(&ring, m, Family::Lin);
    for j in 1..m {
        mid.push(Generator::new(1, j + 1, r_prime.get(0, j).clone()))?;
    }
    GenWord::concat_all(&[&gamma.invert(), &mid, &gamma])
}

/// Word ε with `v1·eval(ε) = v2` when `⟨v1, w⟩ = ⟨v2, w⟩ = 1`; r ≥ 3.
pub fn common_perp(v1: &Mat, v2: &Mat, w: &Mat) -> Result<GenWord> {
    if v1.cols() < 3 {
        return Err(Error::SizeBound("common_perp needs r ≥ 3".into()));
    }
    common_perp_unchecked(v1, v2, w)
}

fn common_perp_unchecked(v1: &Mat, v2: &Mat, w: &Mat) -> Result<GenWord> {
    let ring = v1.ring().clone();
    for v in [v1, v2, w] {
        if v.rows() != 1 || v.cols() != v1.cols() {
            return Err(Error::ShapeMismatch("common_perp needs three rows of one length".into()));
        }
    }
    let wv = w.row_vec(0);
    if !ring.is_one(&dot(&ring, &v1.row_vec(0), &wv)?) || !ring.is_one(&dot(&ring, &v2.row_vec(0), &wv)?) {
        return Err(Error::BadPerp);
    }
    transvection_unchecked(&w.transpose(), &v2.sub(v1)?)
}

/// Word ε carrying row 1 of `a` to row 2, from the right inverse `[c | d]`
/// via `w = c + d`; n ≥ 3.
pub fn two_row_equiv(a: &Mat, cert: &RightInverseCert) -> Result<GenWord> {
    if a.cols() < 3 {
        return Err(Error::SizeBound("two_row_equiv needs n ≥ 3".into()));
    }
    two_row_unchecked(a, cert)
}

fn two_row_unchecked(a: &Mat, cert: &RightInverseCert) -> Result<GenWord> {
    if a.rows() != 2 || cert.alpha() != a {
        return Err(Error::ShapeMismatch("certificate does not belong to this 2×n matrix".into()));
    }
    let beta = cert.beta();
    let ring = a.ring().clone();
    let w: Vec<Elem> = (0..a.cols()).map(|i| ring.add(beta.get(i, 0), beta.get(i, 1))).collect();
    let w = Mat::from_rows(&ring, vec![w])?;
    common_perp_unchecked(&a.top_rows(1), &a.submatrix(1, 2, 0, a.cols()), &w)
}

/// Does `gens` generate the unit ideal? Decided over local rings (some
/// generator is a unit), residue rings and Z (gcd).
fn generates_unit_ideal(ring: &RingRef, gens: &[Elem]) -> Result<bool> {
    if gens.iter().any(|g| ring.is_unit(g)) {
        return Ok(true);
    }
    if ring.is_local() {
        return Ok(false);
    }
    match ring.descriptor() {
        Descriptor::Integers | Descriptor::Modular { .. } => {
            let mut g = ring.residue_modulus().cloned().unwrap_or_default();
            for x in gens {
                g = num_integer::Integer::gcd(&g, x.as_int().unwrap());
            }
            Ok(g == num_bigint::BigInt::from(1))
        }
        _ => Err(Error::UnsupportedQuotient(format!("ideal membership over {}", ring))),
    }
}

/// Word ε (of shape `I_k ⊥ ε'`) with
/// `x·eval(ε) = (x_0, …, x_{k−1}, y_k, …, y_n)`, provided
/// `Rx_0 + … + Rx_{k−1} + I = R` for I the ideal of 2×2 minors of
/// `[[x_k … x_n], [y_k … y_n]]`.
pub fn roitman(x: &Mat, k: usize, y: &Mat) -> Result<GenWord> {
    let ring = x.ring().clone();
    let len = x.cols();
    if x.rows() != 1 || y.rows() != 1 || len < 3 || k + 2 > len || y.cols() != len - k {
        return Err(Error::ShapeMismatch(format!(
            "roitman needs x of length n+1 ≥ 3, 0 ≤ k ≤ n−1 and y of length n−k+1 (got {}, {}, {})",
            len,
            k,
            y.cols()
        )));
    }
    let xs = x.row_vec(0);
    let ys = y.row_vec(0);
    let tail = &xs[k..];
    if tail == ys.as_slice() {
        return Ok(GenWord::empty(&ring, len, Family::Lin));
    }
    let mut gens: Vec<Elem> = xs[..k].to_vec();
    for i in 0..tail.len() {
        for j in i + 1..tail.len() {
            let m = ring.sub(&ring.mul(&tail[i], &ys[j])?, &ring.mul(&tail[j], &ys[i])?);
            gens.push(m);
        }
    }
    if !generates_unit_ideal(&ring, &gens)? {
        return Err(Error::IdealNotComaximal);
    }

    // Solve over R̄ = R/(x_0, …, x_{k−1}) and lift.
    let head: Vec<Elem> = xs[..k].iter().filter(|e| !ring.is_zero(e)).cloned().collect();
    let inner_len = len - k;
    let lifted = if head.iter().any(|e| ring.is_unit(e)) {
        // R̄ = 0: every lift works, the correction pass does all the work.
        GenWord::empty(&ring, inner_len, Family::Lin)
    } else {
        let quot = if head.is_empty() {
            ring.clone()
        } else {
            Ring::quotient(&ring, head.clone()).map_err(|e| Error::UnsupportedQuotient(e.to_string()))?
        };
        let project = |e: &Elem| if head.is_empty() { Ok(e.clone()) } else { quot.project(e) };
        let lift = |e: &Elem| if head.is_empty() { Ok(e.clone()) } else { quot.lift(e) };
        let rows = vec![
            tail.iter().map(project).collect::<Result<Vec<_>>>()?,
            ys.iter().map(project).collect::<Result<Vec<_>>>()?,
        ];
        let alpha = Mat::from_rows(&quot, rows)?;
        let cert = alpha.right_inverse().map_err(|e| match e {
            Error::NotRightInvertible => Error::IdealNotComaximal,
            e => e,
        })?;
        let eps_bar = two_row_unchecked(&alpha, &cert)?;
        eps_bar.map_params(&ring, lift)?
    };
    let mut eps = lifted.embed(len, k)?;

    // Clear a_i = (x ε)_i − y_i ∈ (x_0, …, x_{k−1}).
    let reached = eps.act(x)?;
    for i in k..len {
        let a = ring.sub(reached.get(0, i), &ys[i - k]);
        if ring.is_zero(&a) {
            continue;
        }
        let (j, q) = (0..k)
            .find_map(|j| ring.div_exact(&a, &xs[j]).map(|q| (j, q)))
            .ok_or_else(|| Error::UnsupportedQuotient(format!("cannot divide {} by the leading entries", ring.format(&a))))?;
        eps.push(Generator::new(j + 1, i + 1, ring.neg(&q)))?;
    }
    Ok(eps)
}

// ---- witnesses ----

pub fn whitehead_witness(d: &Mat, flavor_sp: bool) -> Result<Witness> {
    let w = if flavor_sp { whitehead_symplectic(d)? } else { whitehead_linear(d)? };
    let target = d.block_perp(&d.inverse()?)?;
    let e = w.eval()?;
    Witness::builder(ClaimKind::Whitehead)
        .note("flavor", if flavor_sp { "sp" } else { "linear" })
        .matrix("delta", d.clone())
        .word("word", w)
        .check("eval(word) = delta ⊥ delta^-1", e == target)
        .build()
}

pub fn transvection_witness(c: &Mat, r: &Mat) -> Result<Witness> {
    let w = transvection_factor(c, r)?;
    let target = Mat::identity(c.ring(), c.rows()).add(&c.mul(r)?)?;
    let e = w.eval()?;
    let det_ok = e.rows() > crate::matrices::DET_SIZE_LIMIT || c.ring().is_one(&e.det()?);
    Witness::builder(ClaimKind::Transvection)
        .matrix("c", c.clone())
        .matrix("r", r.clone())
        .word("word", w)
        .check("eval(word) = I + c·r", e == target)
        .check("det = 1", det_ok)
        .build()
}

fn carries(claim: ClaimKind, v1: &Mat, v2: &Mat, w: GenWord) -> Result<Witness> {
    let ok = w.act(v1)? == *v2;
    Witness::builder(claim)
        .matrix("v1", v1.clone())
        .matrix("v2", v2.clone())
        .word("epsilon", w)
        .check("v1·eval(epsilon) = v2", ok)
        .build()
}

pub fn common_perp_witness(v1: &Mat, v2: &Mat, w: &Mat) -> Result<Witness> {
    carries(ClaimKind::CommonPerp, v1, v2, common_perp(v1, v2, w)?)
}

pub fn two_row_witness(a: &Mat, cert: &RightInverseCert) -> Result<Witness> {
    let w = two_row_equiv(a, cert)?;
    carries(ClaimKind::TwoRow, &a.top_rows(1), &a.submatrix(1, 2, 0, a.cols()), w)
}

pub fn roitman_witness(x: &Mat, k: usize, y: &Mat) -> Result<Witness> {
    let w = roitman(x, k, y)?;
    let mut target = x.row_vec(0);
    target.truncate(k);
    target.extend(y.row_vec(0));
    let target = Mat::from_rows(x.ring(), vec![target])?;
    carries(ClaimKind::Roitman, x, &target, w)
}
