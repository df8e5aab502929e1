//! A closed tower of commutative rings with exact arithmetic.
//!
//! Rings are described by a [`Descriptor`] constructor tree. Construction
//! validates the tree and derives an internal arithmetic model, so every
//! element has one canonical payload and equality of elements is plain
//! structural equality of [`Elem`]s.
//!
//! Supported shapes:
//!
//! | descriptor | payload |
//! |---|---|
//! | `Z` | `Int` |
//! | `Q`, `Z_(p)`, `Z_s` | reduced `Rat` with a denominator rule |
//! | `Z/n`, `F_p` | `Int` residue in `[0, n)` |
//! | `F_p[x]/(x^e)` | `Poly` of residues, degree `< e` |
//! | `R[T]` | `Poly` over `R`, trimmed |
//! | `R/I` | reduced representative (shape depends on `R` and `I`) |
//! | `R_s` | rational or residue payload depending on `R` |

mod arith;
pub mod intmath;
mod value;

pub use value::RingValue;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use intmath::{is_prime, is_prime_power, prime_factors, strip_common, valuation};

pub type RingRef = Arc<Ring>;

/// Default cap on polynomial degree for `R[T]`.
pub const DEFAULT_DEGREE_CAP: usize = 64;

/// Canonical element payload. Its meaning depends on the owning ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    Int(BigInt),
    Rat(BigRational),
    /// Coefficients from degree 0 upward, no trailing zeros.
    Poly(Vec<Elem>),
}

impl Elem {
    pub fn int(n: i64) -> Elem {
        Elem::Int(BigInt::from(n))
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Elem::Int(n) => Some(n),
            _ => None,
        }
    }
}

/// The public constructor tree of a ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Descriptor {
    Integers,
    Rationals,
    Modular { n: u64 },
    PrimeField { p: u64 },
    /// F_p[x]/(x^e)
    TruncatedPoly { p: u64, e: u32 },
    /// Z localized at the prime ideal (p).
    LocalizedIntegers { p: u64 },
    Poly { base: RingRef, var: String, degree_cap: usize },
    Quotient { base: RingRef, gens: Vec<Elem> },
    /// base with `s` inverted.
    Fraction { base: RingRef, s: Elem },
}

/// Which reduced denominators a subring of Q admits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct DenRule {
    all: bool,
    /// Any prime other than this one may appear.
    coprime_to: Option<BigInt>,
    /// These primes may always appear.
    primes: Vec<BigInt>,
}

impl DenRule {
    pub(crate) fn allows(&self, den: &BigInt) -> bool {
        if self.all {
            return true;
        }
        let mut d = den.abs();
        if d.is_zero() {
            return false;
        }
        for p in &self.primes {
            while (&d % p).is_zero() {
                d /= p;
            }
        }
        if d.is_one() {
            return true;
        }
        match &self.coprime_to {
            Some(p) => !(&d % p).is_zero(),
            None => false,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Arith {
    Z,
    Residue(BigInt),
    Rat(DenRule),
    Trunc { p: BigInt, e: usize },
    Poly { base: RingRef, cap: usize },
    /// base[T]/(f) with f monic of degree >= 1.
    PolyQuot { base: RingRef, modulus: Vec<Elem> },
}

/// How a quotient maps representatives of its base.
#[derive(Clone, Debug)]
pub(crate) enum Projection {
    Identity,
    ResidueOfInt,
    ResidueOfLocal,
    Truncate(usize),
    PolyRemainder,
}

pub struct Ring {
    desc: Descriptor,
    pub(crate) arith: Arith,
    local: bool,
    domain: bool,
    pub(crate) projection: Projection,
    var: String,
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.desc == other.desc
    }
}
impl Eq for Ring {}

impl Hash for Ring {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.desc.hash(state)
    }
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.desc {
            Descriptor::Integers => write!(f, "Z"),
            Descriptor::Rationals => write!(f, "Q"),
            Descriptor::Modular { n } => write!(f, "Z/{}", n),
            Descriptor::PrimeField { p } => write!(f, "F_{}", p),
            Descriptor::TruncatedPoly { p, e } => write!(f, "F_{}[x]/(x^{})", p, e),
            Descriptor::LocalizedIntegers { p } => write!(f, "Z_({})", p),
            Descriptor::Poly { base, var, .. } => write!(f, "{}[{}]", base, var),
            Descriptor::Quotient { base, gens } => {
                let g: Vec<String> = gens.iter().map(|g| base.format(g)).collect();
                write!(f, "{}/({})", base, g.join(","))
            }
            Descriptor::Fraction { base, s } => write!(f, "({})_{}", base, base.format(s)),
        }
    }
}

fn make(desc: Descriptor, arith: Arith, local: bool, domain: bool, var: &str) -> RingRef {
    Arc::new(Ring { desc, arith, local, domain, projection: Projection::Identity, var: var.to_string() })
}

impl Ring {
    pub fn integers() -> RingRef {
        make(Descriptor::Integers, Arith::Z, false, true, "")
    }

    pub fn rationals() -> RingRef {
        let rule = DenRule { all: true, coprime_to: None, primes: vec![] };
        make(Descriptor::Rationals, Arith::Rat(rule), true, true, "")
    }

    pub fn modular(n: u64) -> Result<RingRef> {
        if n < 2 {
            return Err(Error::InvalidRing(format!("Z/{} is not a ring with 1 != 0", n)));
        }
        Ok(make(
            Descriptor::Modular { n },
            Arith::Residue(BigInt::from(n)),
            is_prime_power(n),
            is_prime(n),
            "",
        ))
    }

    pub fn prime_field(p: u64) -> Result<RingRef> {
        if !is_prime(p) {
            return Err(Error::InvalidRing(format!("{} is not prime", p)));
        }
        Ok(make(Descriptor::PrimeField { p }, Arith::Residue(BigInt::from(p)), true, true, ""))
    }

    pub fn truncated_poly(p: u64, e: u32) -> Result<RingRef> {
        if !is_prime(p) || e == 0 {
            return Err(Error::InvalidRing(format!("F_{}[x]/(x^{}) is not supported", p, e)));
        }
        Ok(make(
            Descriptor::TruncatedPoly { p, e },
            Arith::Trunc { p: BigInt::from(p), e: e as usize },
            true,
            e == 1,
            "x",
        ))
    }

    pub fn localized_integers(p: u64) -> Result<RingRef> {
        if !is_prime(p) {
            return Err(Error::InvalidRing(format!("{} is not prime", p)));
        }
        let rule = DenRule { all: false, coprime_to: Some(BigInt::from(p)), primes: vec![] };
        Ok(make(Descriptor::LocalizedIntegers { p }, Arith::Rat(rule), true, true, ""))
    }

    pub fn poly(base: &RingRef, var: &str) -> RingRef {
        Ring::poly_with_cap(base, var, DEFAULT_DEGREE_CAP)
    }

    pub fn poly_with_cap(base: &RingRef, var: &str, degree_cap: usize) -> RingRef {
        make(
            Descriptor::Poly { base: base.clone(), var: var.to_string(), degree_cap },
            Arith::Poly { base: base.clone(), cap: degree_cap },
            false,
            base.domain,
            var,
        )
    }

    /// `base / (gens)`. Supported ideal shapes: integer ideals of `Z` and of
    /// residue rings, ideals of the chain rings `Z_(p)` and `F_p[x]/(x^e)`,
    /// and principal ideals of `R[T]` with a unit leading coefficient.
    pub fn quotient(base: &RingRef, gens: Vec<Elem>) -> Result<RingRef> {
        for g in &gens {
            base.check(g)?;
        }
        let desc = Descriptor::Quotient { base: base.clone(), gens: gens.clone() };
        let nonzero: Vec<&Elem> = gens.iter().filter(|g| !base.is_zero(g)).collect();
        let unit_ideal = || Error::InvalidRing(format!("{}: quotient by the unit ideal", base));
        let (arith, local, domain, projection) = match &base.arith {
            _ if nonzero.is_empty() => {
                (base.arith.clone(), base.local, base.domain, Projection::Identity)
            }
            Arith::Z => {
                let g = nonzero.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x.as_int().unwrap()));
                if g.is_one() {
                    return Err(unit_ideal());
                }
                let local = prime_factors(&g).len() == 1;
                let domain = local && prime_factors(&g)[0] == g;
                (Arith::Residue(g), local, domain, Projection::ResidueOfInt)
            }
            Arith::Residue(n) => {
                let g = nonzero.iter().fold(n.clone(), |acc, x| acc.gcd(x.as_int().unwrap()));
                if g.is_one() {
                    return Err(unit_ideal());
                }
                let local = prime_factors(&g).len() == 1;
                let domain = local && prime_factors(&g)[0] == g;
                (Arith::Residue(g), local, domain, Projection::ResidueOfInt)
            }
            Arith::Rat(rule) if base.local && !rule.all => {
                let p = rule.coprime_to.clone().unwrap();
                let v = nonzero
                    .iter()
                    .map(|x| match x {
                        Elem::Rat(r) => valuation(r.numer(), &p),
                        _ => unreachable!(),
                    })
                    .min()
                    .unwrap();
                if v == 0 {
                    return Err(unit_ideal());
                }
                let pv = num_traits::pow(p.clone(), v as usize);
                (Arith::Residue(pv), true, v == 1, Projection::ResidueOfLocal)
            }
            Arith::Trunc { p, .. } => {
                let v = nonzero
                    .iter()
                    .map(|x| match x {
                        Elem::Poly(c) => c.iter().position(|c| !c.as_int().unwrap().is_zero()).unwrap(),
                        _ => unreachable!(),
                    })
                    .min()
                    .unwrap();
                if v == 0 {
                    return Err(unit_ideal());
                }
                (Arith::Trunc { p: p.clone(), e: v }, true, v == 1, Projection::Truncate(v))
            }
            Arith::Poly { base: coeffs, .. } => {
                if nonzero.len() != 1 {
                    return Err(Error::Unsupported("quotients of R[T] need a single generator".into()));
                }
                let f = match nonzero[0] {
                    Elem::Poly(c) => c.clone(),
                    _ => unreachable!(),
                };
                let lc = f.last().unwrap();
                if f.len() == 1 {
                    if coeffs.is_unit(lc) {
                        return Err(unit_ideal());
                    }
                    return Err(Error::Unsupported("constant non-unit generator in R[T]".into()));
                }
                if !coeffs.is_unit(lc) {
                    return Err(Error::Unsupported("generator needs a unit leading coefficient".into()));
                }
                let inv = coeffs.inverse(lc)?;
                let mut monic = Vec::with_capacity(f.len());
                for c in &f {
                    monic.push(coeffs.mul(c, &inv)?);
                }
                (Arith::PolyQuot { base: coeffs.clone(), modulus: monic }, false, false, Projection::PolyRemainder)
            }
            _ => return Err(Error::Unsupported(format!("quotients of {}", base))),
        };
        Ok(Arc::new(Ring { desc, arith, local, domain, projection, var: base.var.clone() }))
    }

    /// `base` with `s` inverted. Supported over subrings of Q, residue
    /// rings and truncated polynomial rings.
    pub fn fraction(base: &RingRef, s: Elem) -> Result<RingRef> {
        base.check(&s)?;
        if base.is_zero(&s) {
            return Err(Error::InvalidRing("localization at 0 is the zero ring".into()));
        }
        let desc = Descriptor::Fraction { base: base.clone(), s: s.clone() };
        let (arith, projection) = match (&base.arith, &s) {
            (Arith::Z, Elem::Int(s)) => {
                let rule = DenRule { all: false, coprime_to: None, primes: prime_factors(s) };
                (Arith::Rat(rule), Projection::Identity)
            }
            (Arith::Rat(rule), Elem::Rat(s)) => {
                let mut rule = rule.clone();
                for p in prime_factors(s.numer()) {
                    if !rule.primes.contains(&p) {
                        rule.primes.push(p);
                    }
                }
                if let Some(p) = &rule.coprime_to {
                    if rule.primes.contains(p) {
                        rule = DenRule { all: true, coprime_to: None, primes: vec![] };
                    }
                }
                (Arith::Rat(rule), Projection::Identity)
            }
            (Arith::Residue(n), Elem::Int(s)) => {
                let n2 = strip_common(n, s);
                if n2.is_one() {
                    return Err(Error::InvalidRing(format!("{} localized at a nilpotent is zero", base)));
                }
                (Arith::Residue(n2), Projection::ResidueOfInt)
            }
            (Arith::Trunc { .. }, _) if base.is_unit(&s) => (base.arith.clone(), Projection::Identity),
            (Arith::Trunc { .. }, _) => {
                return Err(Error::InvalidRing(format!("{} localized at a nilpotent is zero", base)))
            }
            _ => return Err(Error::Unsupported(format!("localization of {}", base))),
        };
        let domain = match &arith {
            Arith::Residue(n) => prime_factors(n).first() == Some(n),
            _ => base.domain,
        };
        Ok(Arc::new(Ring { desc, arith, local: false, domain, projection, var: base.var.clone() }))
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.desc
    }

    /// Computed locality flag. `R[T]` and `R_s` are never flagged.
    pub fn is_local(&self) -> bool {
        self.local
    }

    pub fn is_domain(&self) -> bool {
        self.domain
    }

    /// The base ring of `R[T]`, `R/I` or `R_s`.
    pub fn base(&self) -> Option<&RingRef> {
        match &self.desc {
            Descriptor::Poly { base, .. }
            | Descriptor::Quotient { base, .. }
            | Descriptor::Fraction { base, .. } => Some(base),
            _ => None,
        }
    }

    /// Coefficient ring when this is a polynomial extension.
    pub fn poly_base(&self) -> Option<&RingRef> {
        match &self.arith {
            Arith::Poly { base, .. } => Some(base),
            _ => None,
        }
    }

    pub fn degree_cap(&self) -> Option<usize> {
        match &self.arith {
            Arith::Poly { cap, .. } => Some(*cap),
            _ => None,
        }
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    /// 0 for characteristic zero.
    pub fn characteristic(&self) -> BigInt {
        match &self.arith {
            Arith::Z | Arith::Rat(_) => BigInt::zero(),
            Arith::Residue(n) => n.clone(),
            Arith::Trunc { p, .. } => p.clone(),
            Arith::Poly { base, .. } | Arith::PolyQuot { base, .. } => base.characteristic(),
        }
    }

    pub fn half_invertible(&self) -> bool {
        self.is_unit(&self.from_i64(2))
    }

    /// Number of elements, when finite and small enough to count in u64.
    pub fn cardinality(&self) -> Option<u64> {
        match &self.arith {
            Arith::Residue(n) => n.try_into().ok(),
            Arith::Trunc { p, e } => {
                let p: u64 = p.try_into().ok()?;
                p.checked_pow(*e as u32)
            }
            Arith::PolyQuot { base, modulus } => {
                base.cardinality()?.checked_pow((modulus.len() - 1) as u32)
            }
            _ => None,
        }
    }

    /// For a residue-type ring, its modulus.
    pub fn residue_modulus(&self) -> Option<&BigInt> {
        match &self.arith {
            Arith::Residue(n) => Some(n),
            _ => None,
        }
    }

    /// Map a representative of the base ring into this quotient.
    pub fn project(&self, base_elem: &Elem) -> Result<Elem> {
        let base = match &self.desc {
            Descriptor::Quotient { base, .. } => base,
            _ => return Err(Error::Unsupported(format!("{} is not a quotient", self))),
        };
        base.check(base_elem)?;
        Ok(match (&self.projection, base_elem) {
            (Projection::Identity, e) => e.clone(),
            (Projection::ResidueOfInt, Elem::Int(a)) => Elem::Int(a.mod_floor(self.residue_modulus().unwrap())),
            (Projection::ResidueOfLocal, Elem::Rat(r)) => {
                let n = self.residue_modulus().unwrap();
                let inv = intmath::mod_inverse(r.denom(), n).expect("denominator is a unit");
                Elem::Int((r.numer() * inv).mod_floor(n))
            }
            (Projection::Truncate(v), Elem::Poly(c)) => {
                let mut c: Vec<Elem> = c.iter().take(*v).cloned().collect();
                while c.last().map_or(false, |x| x.as_int().unwrap().is_zero()) {
                    c.pop();
                }
                Elem::Poly(c)
            }
            (Projection::PolyRemainder, Elem::Poly(c)) => self.poly_reduce(c.clone())?,
            _ => return Err(Error::InvalidElement("projection payload mismatch".into())),
        })
    }

    /// Canonical lift of a quotient element back to a base representative.
    pub fn lift(&self, e: &Elem) -> Result<Elem> {
        self.check(e)?;
        Ok(match (&self.projection, e) {
            (Projection::ResidueOfLocal, Elem::Int(a)) => {
                Elem::Rat(BigRational::from_integer(a.clone()))
            }
            _ => e.clone(),
        })
    }

    /// Map an element of the base into `R_s` (or `R[T]`, as a constant).
    pub fn embed_base(&self, e: &Elem) -> Result<Elem> {
        match &self.desc {
            Descriptor::Fraction { base, .. } => {
                base.check(e)?;
                Ok(match (&self.arith, e) {
                    (Arith::Rat(_), Elem::Int(a)) => Elem::Rat(BigRational::from_integer(a.clone())),
                    (Arith::Residue(n), Elem::Int(a)) => Elem::Int(a.mod_floor(n)),
                    _ => e.clone(),
                })
            }
            Descriptor::Poly { base, .. } => {
                base.check(e)?;
                Ok(self.poly_from_coeffs(vec![e.clone()]))
            }
            _ => Err(Error::Unsupported(format!("{} has no base embedding", self))),
        }
    }

    /// The element `s` that a fraction ring inverts.
    pub fn inverted_element(&self) -> Option<&Elem> {
        match &self.desc {
            Descriptor::Fraction { s, .. } => Some(s),
            _ => None,
        }
    }

    /// Reduced rational value of an element of a subring of Q (or of Z).
    pub fn as_rational(&self, e: &Elem) -> Option<BigRational> {
        match (&self.arith, e) {
            (Arith::Z, Elem::Int(a)) => Some(BigRational::from_integer(a.clone())),
            (Arith::Rat(_), Elem::Rat(r)) => Some(r.clone()),
            _ => None,
        }
    }

    /// Inverse of [`Ring::as_rational`]; fails when the value is not in the ring.
    pub fn from_rational(&self, r: &BigRational) -> Result<Elem> {
        match &self.arith {
            Arith::Z if r.is_integer() => Ok(Elem::Int(r.to_integer())),
            Arith::Rat(rule) if rule.allows(r.denom()) => Ok(Elem::Rat(r.clone())),
            Arith::Residue(n) => {
                let inv = intmath::mod_inverse(r.denom(), n)
                    .ok_or_else(|| Error::InvalidElement(format!("{} not in {}", r, self)))?;
                Ok(Elem::Int((r.numer() * inv).mod_floor(n)))
            }
            _ => Err(Error::InvalidElement(format!("{} not in {}", r, self))),
        }
    }

    /// Verify that `e` is a canonical payload of this ring.
    pub fn check(&self, e: &Elem) -> Result<()> {
        let bad = || Error::InvalidElement(format!("{:?} is not a canonical element of {}", e, self));
        match (&self.arith, e) {
            (Arith::Z, Elem::Int(_)) => Ok(()),
            (Arith::Residue(n), Elem::Int(a)) if !a.is_negative() && a < n => Ok(()),
            (Arith::Rat(rule), Elem::Rat(r)) if rule.allows(r.denom()) && r.denom().is_positive() => Ok(()),
            (Arith::Trunc { p, e }, Elem::Poly(c)) => {
                let ok = c.len() <= *e
                    && c.iter().all(|x| matches!(x, Elem::Int(a) if !a.is_negative() && a < p))
                    && c.last().map_or(true, |x| !x.as_int().unwrap().is_zero());
                if ok {
                    Ok(())
                } else {
                    Err(bad())
                }
            }
            (Arith::Poly { base, cap }, Elem::Poly(c)) => {
                if c.last().map_or(false, |x| base.is_zero(x)) {
                    return Err(bad());
                }
                if c.len() > cap + 1 {
                    return Err(Error::DegreeCap { degree: c.len() - 1, cap: *cap });
                }
                c.iter().try_for_each(|x| base.check(x))
            }
            (Arith::PolyQuot { base, modulus }, Elem::Poly(c)) => {
                if c.len() >= modulus.len() || c.last().map_or(false, |x| base.is_zero(x)) {
                    return Err(bad());
                }
                c.iter().try_for_each(|x| base.check(x))
            }
            _ => Err(bad()),
        }
    }

    /// All elements in canonical order, for finite rings.
    pub fn elements(&self) -> Option<Vec<Elem>> {
        match &self.arith {
            Arith::Residue(n) => {
                let n: u64 = n.try_into().ok()?;
                Some((0..n).map(|k| Elem::Int(BigInt::from(k))).collect())
            }
            Arith::Trunc { p, e } => {
                let p: u64 = p.try_into().ok()?;
                let digits: Vec<Elem> = (0..p).map(|k| Elem::Int(BigInt::from(k))).collect();
                let vecs = cartesian(&digits, *e);
                Some(vecs.into_iter().map(|v| Elem::Poly(trim_ints(v))).collect())
            }
            Arith::PolyQuot { base, modulus } => {
                let digits = base.elements()?;
                let vecs = cartesian(&digits, modulus.len() - 1);
                Some(
                    vecs.into_iter()
                        .map(|mut v| {
                            while v.last().map_or(false, |x| base.is_zero(x)) {
                                v.pop();
                            }
                            Elem::Poly(v)
                        })
                        .collect(),
                )
            }
            _ => None,
        }
    }
}

fn cartesian(digits: &[Elem], len: usize) -> Vec<Vec<Elem>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * digits.len());
        for v in &out {
            for d in digits {
                let mut w = v.clone();
                w.push(d.clone());
                next.push(w);
            }
        }
        out = next;
    }
    out
}

fn trim_ints(mut v: Vec<Elem>) -> Vec<Elem> {
    while v.last().map_or(false, |x| x.as_int().map_or(false, |a| a.is_zero())) {
        v.pop();
    }
    v
}

#[cfg(test)]
mod tests;
