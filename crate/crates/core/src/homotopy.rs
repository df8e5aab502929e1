//! Homotopy and commutativity over local rings.
//!
//! Given δ(T) with δ(0) = I and a right-invertible (or isotropic) V over a
//! local ring R, complete V to W (so V is the leading rows of W), set
//! D = δ(T) ⊥ I and
//!
//! ```text
//! σ(T) = W⁻¹ D W,      ε(T) = D⁻¹ σ(T) = D⁻¹ W⁻¹ D W.
//! ```
//!
//! Then δ(T)·V = V·σ(T) because V = [I | 0]·W, σ(0) = I, and ε(T) is a
//! product of four elementary factors whenever δ(T) is given by a word.
//! The companion product σ(T)⁻¹·D = W⁻¹ D⁻¹ W D is also elementary and is
//! reported alongside.

use crate::error::{Error, Result};
use crate::factor::{whitehead_linear, whitehead_symplectic};
use crate::matrices::{FormKind, Group, IsotropicFrame, Mat, DET_SIZE_LIMIT};
use crate::reduce::{complete_orth, complete_sp, complete_um_linear, Flavor};
use crate::rings::{Elem, Ring, RingRef};
use crate::words::{ClaimKind, GenWord, Witness};

/// δ(T) over R[T] with δ(0) = I, optionally backed by a word whose
/// parameters all vanish at T = 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homotopy {
    flavor: Flavor,
    matrix: Mat,
    word: Option<GenWord>,
}

fn poly_base(ring: &RingRef) -> Result<RingRef> {
    ring.poly_base()
        .cloned()
        .ok_or_else(|| Error::DescriptorMismatch(format!("{} is not a polynomial ring", ring)))
}

fn flavor_member(m: &Mat, flavor: Flavor) -> Result<bool> {
    match flavor {
        Flavor::Linear if m.rows() > DET_SIZE_LIMIT => Ok(true),
        _ => m.membership(flavor.group()),
    }
}

impl Homotopy {
    pub fn from_word(flavor: Flavor, word: GenWord) -> Result<Homotopy> {
        if word.family() != flavor.family() {
            return Err(Error::ShapeMismatch("word family does not match the flavor".into()));
        }
        let ring = word.ring().clone();
        poly_base(&ring)?;
        for g in word.gens() {
            if !ring.is_zero(&ring.constant_term(&g.param)) {
                return Err(Error::CheckFailed("homotopy word parameter not in (T)".into()));
            }
        }
        let matrix = word.eval()?;
        Ok(Homotopy { flavor, matrix, word: Some(word) })
    }

    pub fn from_matrix(flavor: Flavor, matrix: Mat) -> Result<Homotopy> {
        let ring = matrix.ring().clone();
        let base = poly_base(&ring)?;
        if !matrix.substitute(&base.zero())?.is_identity() {
            return Err(Error::CheckFailed("δ(0) is not the identity".into()));
        }
        if !flavor_member(&matrix, flavor)? {
            return Err(match flavor {
                Flavor::Linear => Error::NotSpecialLinear,
                Flavor::Symplectic => Error::NotSymplectic,
                Flavor::Orthogonal => Error::NotOrthogonal,
            });
        }
        Ok(Homotopy { flavor, matrix, word: None })
    }

    /// The straight-line homotopy of a word over R: every parameter z
    /// becomes z·T, so δ(1) = eval(word).
    pub fn scaled(flavor: Flavor, word: &GenWord, poly: &RingRef) -> Result<Homotopy> {
        let t = poly.var_elem();
        let lifted = word.lift_into(poly)?;
        let scaled = lifted.map_params(poly, |p| poly.mul(p, &t))?;
        Homotopy::from_word(flavor, scaled)
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn word(&self) -> Option<&GenWord> {
        self.word.as_ref()
    }

    pub fn ring(&self) -> &RingRef {
        self.matrix.ring()
    }

    pub fn at(&self, t: &Elem) -> Result<Mat> {
        self.matrix.substitute(t)
    }
}

/// How ε(T) was certified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EpsWitness {
    /// Explicit elementary words for ε(T) = D⁻¹σ(T) and σ(T)⁻¹D.
    Word { epsilon: GenWord, sigma_inv_delta: GenWord },
    /// Only the matrix identity is certified; membership is unverified.
    AssertOnly(Mat),
}

#[derive(Clone, Debug)]
pub struct HomotopyOutcome {
    pub sigma: Mat,
    pub eps: EpsWitness,
    /// The completion of V over R.
    pub completion: GenWord,
    pub witness: Witness,
}

fn check_bounds(flavor: Flavor, n: usize, m: usize) -> Result<()> {
    let ok = match flavor {
        Flavor::Linear | Flavor::Symplectic => (m > n && n >= 2) || (m == n && n >= 3),
        Flavor::Orthogonal => m >= n + 2 && n >= 2,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::SizeBound(format!("{} homotopy with n = {}, m = {}", flavor.name(), n, m)))
    }
}

fn complete(flavor: Flavor, v: &Mat) -> Result<GenWord> {
    match flavor {
        Flavor::Linear => complete_um_linear(v),
        Flavor::Symplectic => complete_sp(&IsotropicFrame::new(v.clone(), FormKind::SymplecticPsi(0))?),
        Flavor::Orthogonal => complete_orth(&IsotropicFrame::new(v.clone(), FormKind::OrthogonalPhi(0))?),
    }
}

/// Theorem engine with the size bounds of each flavor enforced.
pub fn homotopy_commute(d: &Homotopy, v: &Mat) -> Result<HomotopyOutcome> {
    let (n, m) = match d.flavor {
        Flavor::Linear => (v.rows(), v.cols()),
        _ => (v.rows() / 2, v.cols() / 2),
    };
    check_bounds(d.flavor, n, m)?;
    commute_unbounded(d, v)
}

pub fn homotopy_commute_linear(d: &Homotopy, v: &Mat) -> Result<HomotopyOutcome> {
    expect_flavor(d, Flavor::Linear)?;
    homotopy_commute(d, v)
}

pub fn homotopy_commute_symplectic(d: &Homotopy, v: &Mat) -> Result<HomotopyOutcome> {
    expect_flavor(d, Flavor::Symplectic)?;
    homotopy_commute(d, v)
}

pub fn homotopy_commute_orthogonal(d: &Homotopy, v: &Mat) -> Result<HomotopyOutcome> {
    expect_flavor(d, Flavor::Orthogonal)?;
    homotopy_commute(d, v)
}

fn expect_flavor(d: &Homotopy, f: Flavor) -> Result<()> {
    if d.flavor == f {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(format!("expected a {} homotopy", f.name())))
    }
}

pub(crate) fn commute_unbounded(d: &Homotopy, v: &Mat) -> Result<HomotopyOutcome> {
    let poly = d.ring().clone();
    let base = poly_base(&poly)?;
    if v.ring() != &base {
        return Err(Error::DescriptorMismatch(format!("V over {}, homotopy over {}", v.ring(), poly)));
    }
    if !base.is_local() {
        return Err(Error::NotLocal);
    }
    if d.matrix.rows() != v.rows() {
        return Err(Error::ShapeMismatch("δ and V have different row counts".into()));
    }
    let size = v.cols();
    let w = complete(d.flavor, v).map_err(|e| match e {
        Error::NoUnitEntry(_) => Error::NotRightInvertible,
        e => e,
    })?;
    let w_t = w.lift_into(&poly)?;
    let w_mat = w_t.eval()?;
    let w_inv = w_t.invert().eval()?;
    let big_d = d.matrix.pad_identity(size - v.rows());
    let sigma = w_inv.mul(&big_d)?.mul(&w_mat)?;

    let v_t = v.embed_into(&poly)?;
    let commutes = d.matrix.mul(&v_t)? == v_t.mul(&sigma)?;
    let at_zero = sigma.substitute(&base.zero())?.is_identity();
    let member = flavor_member(&sigma, d.flavor)?;

    let one = base.one();
    let sigma1 = sigma.substitute(&one)?;
    let d1 = d.at(&one)?;
    let commutes_at_one = d1.mul(v)? == v.mul(&sigma1)?;

    let mut builder = Witness::builder(ClaimKind::HomotopyCommute)
        .note("flavor", d.flavor.name())
        .matrix("V", v.clone())
        .matrix("delta", d.matrix.clone())
        .matrix("sigma", sigma.clone())
        .word("W", w.clone())
        .check("delta(T)·V = V·sigma(T)", commutes)
        .check("sigma(0) = I", at_zero)
        .check("sigma(T) lies in the group over R[T]", member)
        .check("delta(1)·V = V·sigma(1)", commutes_at_one);

    let eps = match &d.word {
        Some(dw) => {
            let dw = dw.embed(size, 0)?;
            let epsilon = GenWord::concat_all(&[&dw.invert(), &w_t.invert(), &dw, &w_t])?;
            let sigma_inv_delta = GenWord::concat_all(&[&w_t.invert(), &dw.invert(), &w_t, &dw])?;
            let e = epsilon.eval()?;
            let ok_eps = big_d.mul(&e)? == sigma;
            let ok_sid = sigma.mul(&sigma_inv_delta.eval()?)? == big_d;
            let e1 = epsilon.specialize(&one)?.eval()?;
            let ok_one = d1.pad_identity(size - v.rows()).mul(&e1)? == sigma1;
            builder = builder
                .note("mode", "word")
                .word("epsilon", epsilon.clone())
                .word("sigma_inv_delta", sigma_inv_delta.clone())
                .check("(delta ⊥ I)·eval(epsilon) = sigma(T)", ok_eps)
                .check("sigma(T)·eval(sigma_inv_delta) = delta ⊥ I", ok_sid)
                .check("specialize(epsilon, 1) matches sigma(1)", ok_one);
            EpsWitness::Word { epsilon, sigma_inv_delta }
        }
        None => {
            let e = big_d.inverse()?.mul(&sigma)?;
            let ok = big_d.mul(&e)? == sigma;
            builder = builder
                .note("mode", "assert_only")
                .note("elementary_membership", "unverified")
                .matrix("epsilon", e.clone())
                .check("(delta ⊥ I)·epsilon = sigma(T)", ok);
            EpsWitness::AssertOnly(e)
        }
    };
    Ok(HomotopyOutcome { sigma, eps, completion: w, witness: builder.build()? })
}

/// For a word-backed homotopy `a` and `b` in the same group: a word ε with
/// `a(1)·b = b·a(1)·eval(ε)`. Linear needs n ≥ 3, symplectic 2m ≥ 4.
pub fn commutator_witness(a: &Homotopy, b: &Mat) -> Result<(GenWord, Witness)> {
    if a.word.is_none() {
        return Err(Error::Unsupported("commutator_witness needs a word-backed homotopy".into()));
    }
    let n = b.rows();
    match a.flavor {
        Flavor::Linear if n < 3 => return Err(Error::SizeBound("linear commutators need n ≥ 3".into())),
        Flavor::Symplectic if n < 4 => return Err(Error::SizeBound("symplectic commutators need 2m ≥ 4".into())),
        Flavor::Orthogonal => return Err(Error::Unsupported("orthogonal commutators go through orthoquot".into())),
        _ => {}
    }
    if !b.membership(a.flavor.group())? {
        return Err(match a.flavor {
            Flavor::Symplectic => Error::NotSymplectic,
            _ => Error::NotSpecialLinear,
        });
    }
    let out = commute_unbounded(a, b)?;
    let base = poly_base(a.ring())?;
    let one = base.one();
    let eps = match out.eps {
        EpsWitness::Word { epsilon, .. } => epsilon.specialize(&one)?,
        EpsWitness::AssertOnly(_) => unreachable!("word-backed input"),
    };
    let alpha = a.at(&one)?;
    let e = eps.eval()?;
    let lhs = alpha.mul(b)?;
    let rhs = b.mul(&alpha)?.mul(&e)?;
    let mut builder = Witness::builder(ClaimKind::Commutator)
        .note("flavor", a.flavor.name())
        .matrix("alpha", alpha)
        .matrix("beta", b.clone())
        .word("epsilon", eps.clone())
        .check("alpha·beta = beta·alpha·eval(epsilon)", lhs == rhs);
    if e.rows() <= DET_SIZE_LIMIT {
        builder = builder.check("det eval(epsilon) = 1", base.is_one(&e.det()?));
    }
    if a.flavor == Flavor::Symplectic {
        builder = builder.check("eval(epsilon) preserves psi", e.membership(Group::Sp)?);
    }
    Ok((eps, builder.build()?))
}

/// δV = Vσ with `σ ⊥ δ⁻¹` elementary, witnessed by a word of size n + m
/// (linear) or 2(n + m) (symplectic).
pub fn vaserstein_transport(d: &Mat, v: &Mat, flavor: Flavor) -> Result<(Mat, GenWord, Witness)> {
    let r = d.ring().clone();
    if !r.is_local() {
        return Err(Error::NotLocal);
    }
    let (wh, dn) = match flavor {
        Flavor::Linear => {
            if !d.membership(Group::SL)? {
                return Err(Error::NotSpecialLinear);
            }
            (whitehead_linear(d)?, d.rows())
        }
        Flavor::Symplectic => (whitehead_symplectic(d)?, d.rows()),
        Flavor::Orthogonal => return Err(Error::Unsupported("orthogonal transport".into())),
    };
    if v.rows() != dn || v.cols() < dn {
        return Err(Error::ShapeMismatch("V must have as many rows as δ and at least as many columns".into()));
    }
    let m = v.cols();
    let dinv = d.inverse()?;
    let poly = Ring::poly(&r, "T");
    let h = Homotopy::scaled(flavor, &wh, &poly)?;
    let big_v = v.block_perp(&Mat::identity(&r, dn))?;
    let out = commute_unbounded(&h, &big_v)?;
    let one = r.one();
    let sigma_p = out.sigma.substitute(&one)?;
    // σ' = W⁻¹ (δ ⊥ δ⁻¹ ⊥ I) W at T = 1, as a word over R.
    let w = &out.completion;
    let sigma_word = GenWord::concat_all(&[&w.invert(), &wh.embed(m + dn, 0)?, w])?;

    let alpha = sigma_p.submatrix(0, m, 0, m);
    let beta = sigma_p.submatrix(0, m, m, m + dn);
    let gamma = sigma_p.submatrix(m, m + dn, 0, m);
    let zeta = sigma_p.submatrix(m, m + dn, m, m + dn);
    let gamma_zero = gamma.is_zero();
    let zeta_ok = zeta == dinv;

    // Clear β by the left factor [[I, −β·δ], [0, I]].
    let y = beta.mul(d)?.neg();
    let mut word = GenWord::empty(&r, m + dn, flavor.family());
    if flavor == Flavor::Linear {
        for i in 0..m {
            for j in 0..dn {
                word.push_i(i + 1, m + j + 1, y.get(i, j).clone())?;
            }
        }
    } else if !beta.is_zero() {
        return Err(Error::CheckFailed("symplectic off-diagonal block is nonzero".into()));
    }
    word.append(&sigma_word)?;
    let target = alpha.block_perp(&dinv)?;
    let ok_word = word.eval()? == target;
    let ok_sigma_word = sigma_word.eval()? == sigma_p;
    let commutes = d.mul(v)? == v.mul(&alpha)?;
    let witness = Witness::builder(ClaimKind::VasersteinTransport)
        .note("flavor", flavor.name())
        .matrix("delta", d.clone())
        .matrix("V", v.clone())
        .matrix("sigma", alpha.clone())
        .word("word", word.clone())
        .check("gamma = 0", gamma_zero)
        .check("zeta = delta^-1", zeta_ok)
        .check("delta·V = V·sigma", commutes)
        .check("eval(sigma' word) = sigma'", ok_sigma_word)
        .check("eval(word) = sigma ⊥ delta^-1", ok_word)
        .build()?;
    Ok((alpha, word, witness))
}
