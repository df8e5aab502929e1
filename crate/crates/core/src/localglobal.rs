//! Word-level Quillen splitting and comaximal patching.
//!
//! With s1 + s2 = 1 and θ(T) a word over `R_{s1 s2}[T]` with θ(0) = I,
//! search the least N ≤ N_max such that for b = s2^N
//!
//! * every parameter of θ(bT) has only s1-denominators, and
//! * every entry of θ(bT)⁻¹·θ(T) has only s2-denominators,
//!
//! so θ(T) = θ(bT)·{θ(bT)⁻¹θ(T)} splits across the two charts. The second
//! factor is certified on its evaluation; whether its word is already
//! s2-local generator by generator is recorded separately.
//!
//! Patching glues a matrix over `R_{s1}[T]` and one over `R_{s2}[T]` that
//! agree on the overlap into one over `R[T]`, for R = Z (Bézout on the
//! denominators) or R = Z/n (Chinese remaindering).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrices::Mat;
use crate::rings::intmath::{prime_factors, xgcd};
use crate::rings::{Descriptor, Elem, Ring, RingRef};
use crate::words::{ClaimKind, Family, GenWord, Witness};

/// Default ceiling on the split exponent.
pub const DEFAULT_N_MAX: u32 = 16;

/// Every prime of `den` divides `allowed`.
fn only_primes_of(den: &BigInt, allowed: &BigInt) -> bool {
    let mut d = den.abs();
    for p in prime_factors(allowed) {
        while (&d % &p).is_zero() {
            d /= &p;
        }
    }
    d.is_one()
}

/// All rational coefficients of a polynomial (or a bare rational).
fn rational_coeffs(ring: &Ring, e: &Elem) -> Vec<BigRational> {
    match (ring.poly_base(), e) {
        (Some(base), Elem::Poly(c)) => c.iter().flat_map(|x| rational_coeffs(base, x)).collect(),
        (_, Elem::Rat(r)) => vec![r.clone()],
        (_, Elem::Int(a)) => vec![BigRational::from_integer(a.clone())],
        _ => vec![],
    }
}

fn local_at(ring: &Ring, e: &Elem, allowed: &BigInt) -> bool {
    rational_coeffs(ring, e).iter().all(|r| only_primes_of(r.denom(), allowed))
}

#[derive(Clone, Debug)]
pub struct Split {
    pub n: u32,
    pub b: BigInt,
    /// θ(bT), local at s1 parameter by parameter.
    pub theta_a: GenWord,
    /// θ(bT)⁻¹ ++ θ(T), local at s2 on its evaluation.
    pub theta_b: GenWord,
    /// Whether θ_b is also s2-local generator by generator.
    pub theta_b_word_local: bool,
}

fn check_theta(theta: &GenWord, s1: &BigInt, s2: &BigInt) -> Result<(RingRef, RingRef)> {
    if s1 + s2 != BigInt::one() {
        return Err(Error::BadComaximal(format!("{} + {} != 1", s1, s2)));
    }
    let poly = theta.ring().clone();
    let frac = poly
        .poly_base()
        .cloned()
        .ok_or_else(|| Error::DescriptorMismatch("θ must live over a polynomial ring".into()))?;
    for g in theta.gens() {
        if !poly.is_zero(&poly.constant_term(&g.param)) {
            return Err(Error::CheckFailed("θ(0) ≠ I: a parameter has a constant term".into()));
        }
    }
    Ok((poly, frac))
}

/// Try one exponent. `Ok(None)` when a locality check fails.
pub fn split_at(theta: &GenWord, s1: &BigInt, s2: &BigInt, n: u32) -> Result<Option<Split>> {
    let (poly, frac) = check_theta(theta, s1, s2)?;
    let b = num_traits::pow(s2.clone(), n as usize);
    let b_elem = frac.from_bigint(&b);
    let theta_a = theta.dilate(&b_elem)?;
    if !theta_a.gens().iter().all(|g| local_at(&poly, &g.param, s1)) {
        return Ok(None);
    }
    let theta_b = theta_a.invert().concat(theta)?;
    let eb = theta_b.eval()?;
    if !eb.entries().iter().all(|e| local_at(&poly, e, s2)) {
        return Ok(None);
    }
    if theta_a.eval()?.mul(&eb)? != theta.eval()? {
        return Err(Error::CheckFailed("θ_a·θ_b differs from θ".into()));
    }
    let theta_b_word_local = theta_b.gens().iter().all(|g| local_at(&poly, &g.param, s2));
    Ok(Some(Split { n, b, theta_a, theta_b, theta_b_word_local }))
}

/// The least N ≤ `n_max` that splits θ.
pub fn quillen_split(theta: &GenWord, s1: &BigInt, s2: &BigInt, n_max: u32) -> Result<Split> {
    check_theta(theta, s1, s2)?;
    for n in 0..=n_max {
        if let Some(s) = split_at(theta, s1, s2, n)? {
            return Ok(s);
        }
    }
    Err(Error::SplitExponentExhausted(n_max))
}

pub fn split_witness(theta: &GenWord, s: &Split) -> Result<Witness> {
    let poly = theta.ring();
    let prod = s.theta_a.eval()?.mul(&s.theta_b.eval()?)? == theta.eval()?;
    Witness::builder(ClaimKind::QuillenSplit)
        .note("N", s.n.to_string())
        .note("b", s.b.to_string())
        .note("theta_b_locality", if s.theta_b_word_local { "word" } else { "evaluation" })
        .word("theta", theta.clone())
        .word("theta_a", s.theta_a.clone())
        .word("theta_b", s.theta_b.clone())
        .check("eval(theta_a)·eval(theta_b) = eval(theta)", prod)
        .check("theta_a(0) = I", s.theta_a.specialize(&poly.poly_base().unwrap().zero())?.eval()?.is_identity())
        .build()
}

/// Decompose a chart ring `B_s[T]` (or `B_s`) into (B, s, is-polynomial).
fn chart(ring: &RingRef) -> Result<(RingRef, Elem, bool)> {
    let (inner, poly) = match ring.poly_base() {
        Some(b) => (b.clone(), true),
        None => (ring.clone(), false),
    };
    match inner.descriptor() {
        Descriptor::Fraction { base, s } => Ok((base.clone(), s.clone(), poly)),
        _ => Err(Error::UnsupportedBase(format!("{} is not a localization chart", ring))),
    }
}

/// Glue σ1 over `R_{s1}[T]` and σ2 over `R_{s2}[T]` into σ over `R[T]`.
pub fn patch(sigma1: &Mat, sigma2: &Mat) -> Result<Mat> {
    let (b1, s1, p1) = chart(sigma1.ring())?;
    let (b2, s2, p2) = chart(sigma2.ring())?;
    if b1 != b2 || p1 != p2 {
        return Err(Error::DescriptorMismatch("charts over different bases".into()));
    }
    if (sigma1.rows(), sigma1.cols()) != (sigma2.rows(), sigma2.cols()) {
        return Err(Error::ShapeMismatch("charts of different shapes".into()));
    }
    let base = b1;
    if !base.is_one(&base.add(&s1, &s2)) {
        return Err(Error::BadComaximal(format!("{} + {} != 1", base.format(&s1), base.format(&s2))));
    }
    let target = if p1 { Ring::poly(&base, sigma1.ring().var()) } else { base.clone() };
    let c1 = sigma1.ring().poly_base().cloned().unwrap_or_else(|| sigma1.ring().clone());
    let c2 = sigma2.ring().poly_base().cloned().unwrap_or_else(|| sigma2.ring().clone());

    let glue_scalar = |x1: &Elem, x2: &Elem| -> Result<Elem> {
        match base.descriptor() {
            Descriptor::Integers => {
                let (r1, r2) = (c1.as_rational(x1).unwrap(), c2.as_rational(x2).unwrap());
                if r1 != r2 {
                    return Err(Error::OverlapMismatch(format!("{} vs {}", r1, r2)));
                }
                // a/d1 = c/d2 with d1 | s1^k, d2 | s2^j: y = u·a·(s1^k/d1) + v·c·(s2^j/d2)
                // where u·s1^k + v·s2^j = 1.
                let (d1, d2) = (r1.denom().clone(), r2.denom().clone());
                let pk = power_covering(&d1, s1.as_int().unwrap());
                let pj = power_covering(&d2, s2.as_int().unwrap());
                let (g, u, v) = xgcd(&pk, &pj);
                if !g.is_one() {
                    return Err(Error::BadComaximal("denominator powers are not coprime".into()));
                }
                let a = r1.numer() * (&pk / &d1);
                let c = r2.numer() * (&pj / &d2);
                let y = u * a + v * c;
                if BigRational::from_integer(y.clone()) != r1 {
                    return Err(Error::OverlapMismatch("Bézout reconstruction disagrees".into()));
                }
                Ok(Elem::Int(y))
            }
            Descriptor::Modular { .. } => {
                let (n1, n2) = (c1.residue_modulus().unwrap(), c2.residue_modulus().unwrap());
                let (a, c) = (x1.as_int().unwrap(), x2.as_int().unwrap());
                let g = n1.gcd(n2);
                if (a - c).mod_floor(&g) != BigInt::zero() {
                    return Err(Error::OverlapMismatch(format!("{} vs {} modulo {}", a, c, g)));
                }
                let (_, u, _) = xgcd(&(n1 / &g), &(n2 / &g));
                let l = n1 / &g * n2;
                let y = (a + n1 * (u * ((c - a) / &g))).mod_floor(&l);
                Ok(base.from_bigint(&y))
            }
            _ => Err(Error::UnsupportedBase(format!("patching over {}", base))),
        }
    };

    let glue = |x1: &Elem, x2: &Elem| -> Result<Elem> {
        if !p1 {
            return glue_scalar(x1, x2);
        }
        let (a1, a2) = (sigma1.ring().coeffs(x1), sigma2.ring().coeffs(x2));
        let n = a1.len().max(a2.len());
        let (z1, z2) = (c1.zero(), c2.zero());
        let coeffs = (0..n)
            .map(|k| glue_scalar(a1.get(k).unwrap_or(&z1), a2.get(k).unwrap_or(&z2)))
            .collect::<Result<Vec<_>>>()?;
        Ok(target.poly_from_coeffs(coeffs))
    };

    let data = sigma1
        .entries()
        .iter()
        .zip(sigma2.entries())
        .map(|(x1, x2)| glue(x1, x2))
        .collect::<Result<Vec<_>>>()?;
    Mat::new(&target, sigma1.rows(), sigma1.cols(), data)
}

/// Smallest power of |s| divisible by `d`.
fn power_covering(d: &BigInt, s: &BigInt) -> BigInt {
    let s = s.abs();
    let mut p = BigInt::one();
    while !(&p % d).is_zero() {
        p *= &s;
        if p.bits() > 4096 {
            break;
        }
    }
    p
}

/// Localize a matrix over `R[T]` (or R) into the chart with `s` inverted.
pub fn localize(m: &Mat, chart_ring: &RingRef) -> Result<Mat> {
    match (m.ring().poly_base(), chart_ring.poly_base()) {
        (Some(b), Some(cb)) => {
            let (src, dst) = (m.ring().clone(), chart_ring.clone());
            m.map(&dst, |e| {
                let c = src.coeffs(e).iter().map(|x| to_chart(b, cb, x)).collect::<Result<Vec<_>>>()?;
                Ok(dst.poly_from_coeffs(c))
            })
        }
        (None, None) => m.map(chart_ring, |e| to_chart(m.ring(), chart_ring, e)),
        _ => Err(Error::DescriptorMismatch("mixed polynomial and constant rings".into())),
    }
}

/// Re-express an element of one subring of Q (or residue ring) in another.
fn to_chart(src: &Ring, dst: &Ring, e: &Elem) -> Result<Elem> {
    if let Some(r) = src.as_rational(e) {
        return dst.from_rational(&r);
    }
    match e {
        Elem::Int(a) => Ok(dst.from_bigint(a)),
        _ => Err(Error::DescriptorMismatch(format!("cannot move {} into {}", src, dst))),
    }
}

/// Move a word between rings of the Z_s[T] family, failing with
/// `InvalidElement` when a parameter is not in the target.
pub fn recast_word(w: &GenWord, target: &RingRef) -> Result<GenWord> {
    let (src_base, dst_base) = match (w.ring().poly_base(), target.poly_base()) {
        (Some(a), Some(b)) => (a.clone(), b.clone()),
        _ => return Err(Error::DescriptorMismatch("recast_word expects polynomial rings".into())),
    };
    let src = w.ring().clone();
    w.map_params(target, |p| {
        let c = src.coeffs(p).iter().map(|x| to_chart(&src_base, &dst_base, x)).collect::<Result<Vec<_>>>()?;
        Ok(target.poly_from_coeffs(c))
    })
}

/// V·eval(θ) = V, i.e. the frame padded with zero rows is fixed.
pub fn fixed_frame_check(v: &Mat, theta: &GenWord) -> bool {
    match theta.act(v) {
        Ok(x) => x == *v,
        Err(_) => false,
    }
}

/// Inputs of the two-chart gluing demonstration.
pub struct TwoChart {
    /// δ(T) over Z[T] (linear, size n), parameters in (T).
    pub delta: GenWord,
    /// Ambient size m ≥ n.
    pub m: usize,
    pub s1: BigInt,
    pub s2: BigInt,
    /// Chart words over `Z_{s1}[T]` and `Z_{s2}[T]` of size m, using only
    /// generators e_ij with i > n and parameters in (T).
    pub zeta1: GenWord,
    pub zeta2: GenWord,
    pub n_max: u32,
}

/// Run the local-global gluing on V = [I_n | 0]: the chart solutions are
/// σ_i = ζ_i·(δ ⊥ I); θ = σ_1σ_2⁻¹ splits, the pieces η_1 = θ(bT)⁻¹ and
/// η_2 = θ(bT)⁻¹θ(T) correct the charts so they agree, and the corrected
/// charts patch to σ over Z[T] with δV = Vσ.
pub fn two_chart_glue(inst: &TwoChart) -> Result<(Mat, Witness)> {
    let poly_z = inst.delta.ring().clone();
    let z = poly_z.poly_base().cloned().ok_or_else(|| Error::DescriptorMismatch("δ must be over Z[T]".into()))?;
    if z.descriptor() != &Descriptor::Integers {
        return Err(Error::UnsupportedBase("the gluing demonstration runs over Z".into()));
    }
    let var = poly_z.var().to_string();
    let n = inst.delta.size();
    let m = inst.m;
    let chart1 = Ring::poly(&Ring::fraction(&z, Elem::Int(inst.s1.clone()))?, &var);
    let chart2 = Ring::poly(&Ring::fraction(&z, Elem::Int(inst.s2.clone()))?, &var);
    let overlap = Ring::poly(&Ring::fraction(&z, Elem::Int(&inst.s1 * &inst.s2))?, &var);
    let v = Mat::standard_frame(&z, n, m);

    let d_big = inst.delta.embed(m, 0)?;
    let sigma1_w = inst.zeta1.concat(&recast_word(&d_big, &chart1)?)?;
    let sigma2_w = inst.zeta2.concat(&recast_word(&d_big, &chart2)?)?;
    let v1 = localize(&v.embed_into(&poly_z)?, &chart1)?;
    let v2 = localize(&v.embed_into(&poly_z)?, &chart2)?;
    let d1 = localize(&inst.delta.eval()?, &chart1)?;
    let d2 = localize(&inst.delta.eval()?, &chart2)?;
    let chart1_ok = d1.mul(&v1)? == sigma1_w.act(&v1)?;
    let chart2_ok = d2.mul(&v2)? == sigma2_w.act(&v2)?;

    let theta = recast_word(&inst.zeta1, &overlap)?.concat(&recast_word(&inst.zeta2, &overlap)?.invert())?;
    let v_o = localize(&v.embed_into(&poly_z)?, &overlap)?;
    let fixed = fixed_frame_check(&v_o, &theta);
    let split = quillen_split(&theta, &inst.s1, &inst.s2, inst.n_max)?;
    let fixed_a = fixed_frame_check(&v_o, &split.theta_a);
    let fixed_b = fixed_frame_check(&v_o, &split.theta_b);

    // Chart 1: η_1·σ_1 = θ(bT)⁻¹·σ_1 as a word over Z_{s1}[T].
    let eta1 = recast_word(&split.theta_a.invert(), &chart1)?;
    let glued1 = eta1.concat(&sigma1_w)?.eval()?;
    // Chart 2: η_2·σ_2, certified on evaluation, then moved into Z_{s2}[T].
    let glued2_o = split.theta_b.concat(&recast_word(&sigma2_w, &overlap)?)?.eval()?;
    let glued2 = localize(&glued2_o, &chart2)?;
    let sigma = patch(&glued1, &glued2)?;

    let v_t = v.embed_into(&poly_z)?;
    let commutes = inst.delta.eval()?.mul(&v_t)? == v_t.mul(&sigma)?;
    let loc1 = localize(&sigma, &chart1)? == glued1;
    let loc2 = localize(&sigma, &chart2)? == glued2;
    let at_zero = sigma.substitute(&z.zero())?.is_identity();
    let witness = Witness::builder(ClaimKind::Patch)
        .note("N", split.n.to_string())
        .note("b", split.b.to_string())
        .note("theta_b_locality", if split.theta_b_word_local { "word" } else { "evaluation" })
        .matrix("sigma", sigma.clone())
        .word("theta", theta)
        .word("theta_a", split.theta_a.clone())
        .word("theta_b", split.theta_b.clone())
        .check("chart 1: delta·V = V·sigma_1", chart1_ok)
        .check("chart 2: delta·V = V·sigma_2", chart2_ok)
        .check("[V; 0]·theta = [V; 0]", fixed)
        .check("theta_a fixes the frame", fixed_a)
        .check("theta_b fixes the frame", fixed_b)
        .check("sigma localizes to chart 1", loc1)
        .check("sigma localizes to chart 2", loc2)
        .check("delta(T)·V = V·sigma(T) over Z[T]", commutes)
        .check("sigma(0) = I", at_zero)
        .build()?;
    Ok((sigma, witness))
}

/// Rational-parameter helper for tests and the CLI: `c·T^k` over `ring[T]`.
pub fn monomial(poly: &RingRef, c: BigRational, k: usize) -> Result<Elem> {
    let base = poly.poly_base().ok_or_else(|| Error::DescriptorMismatch("not a polynomial ring".into()))?;
    let mut coeffs = vec![base.zero(); k];
    coeffs.push(base.from_rational(&c)?);
    Ok(poly.poly_from_coeffs(coeffs))
}

/// Linear word over `Z_{s1 s2}[T]` from (i, j, coefficient, degree) data.
pub fn theta_word(poly: &RingRef, size: usize, gens: &[(usize, usize, BigRational, usize)]) -> Result<GenWord> {
    let mut w = GenWord::empty(poly, size, Family::Lin);
    for (i, j, c, k) in gens {
        w.push_i(*i, *j, monomial(poly, c.clone(), *k)?)?;
    }
    Ok(w)
}
