use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::intmath::prime_factors;
use super::{Arith, Elem, Ring, RingRef};
use crate::error::{Error, Result};

/// An element bundled with the ring it lives in.
///
/// Binary operations check that both operands share a descriptor and
/// report [`Error::DescriptorMismatch`] otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingValue {
    ring: RingRef,
    elem: Elem,
}

impl RingValue {
    /// Wrap a payload, validating its canonical form.
    pub fn new(ring: &RingRef, elem: Elem) -> Result<RingValue> {
        ring.check(&elem)?;
        Ok(RingValue { ring: ring.clone(), elem })
    }

    pub fn from_i64(ring: &RingRef, n: i64) -> RingValue {
        RingValue { ring: ring.clone(), elem: ring.from_i64(n) }
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn elem(&self) -> &Elem {
        &self.elem
    }

    pub fn into_elem(self) -> Elem {
        self.elem
    }

    fn same(&self, other: &RingValue) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::DescriptorMismatch(format!("{} vs {}", self.ring, other.ring)))
        }
    }

    fn wrap(&self, elem: Elem) -> RingValue {
        RingValue { ring: self.ring.clone(), elem }
    }

    pub fn add(&self, other: &RingValue) -> Result<RingValue> {
        self.same(other)?;
        Ok(self.wrap(self.ring.add(&self.elem, &other.elem)))
    }

    pub fn sub(&self, other: &RingValue) -> Result<RingValue> {
        self.same(other)?;
        Ok(self.wrap(self.ring.sub(&self.elem, &other.elem)))
    }

    pub fn mul(&self, other: &RingValue) -> Result<RingValue> {
        self.same(other)?;
        Ok(self.wrap(self.ring.mul(&self.elem, &other.elem)?))
    }

    pub fn neg(&self) -> RingValue {
        self.wrap(self.ring.neg(&self.elem))
    }

    pub fn is_zero(&self) -> bool {
        self.ring.is_zero(&self.elem)
    }

    pub fn is_unit(&self) -> bool {
        self.ring.is_unit(&self.elem)
    }

    pub fn inverse(&self) -> Result<RingValue> {
        Ok(self.wrap(self.ring.inverse(&self.elem)?))
    }

    /// Evaluate a polynomial at a value of its coefficient ring.
    pub fn substitute(&self, t: &RingValue) -> Result<RingValue> {
        let base = self
            .ring
            .poly_base()
            .ok_or_else(|| Error::DescriptorMismatch(format!("{} is not a polynomial ring", self.ring)))?;
        if base != t.ring() {
            return Err(Error::DescriptorMismatch(format!("{} vs {}", base, t.ring())));
        }
        Ok(RingValue { ring: base.clone(), elem: self.ring.substitute(&self.elem, &t.elem)? })
    }

    /// Whether this value can be written with a denominator that is a power
    /// of `allowed` (up to sign). Polynomials are checked coefficientwise.
    pub fn localize_denominator_check(&self, allowed: &RingValue) -> bool {
        let a = match allowed.ring().as_rational(allowed.elem()) {
            Some(r) if r.is_integer() => r.to_integer(),
            Some(r) => r.numer() * r.denom(),
            None => return false,
        };
        denominators_divide_power(&self.ring, &self.elem, &a)
    }
}

fn denominators_divide_power(ring: &Ring, e: &Elem, allowed: &BigInt) -> bool {
    match (&ring.arith, e) {
        (Arith::Poly { base, .. }, Elem::Poly(c)) => {
            c.iter().all(|x| denominators_divide_power(base, x, allowed))
        }
        (_, Elem::Rat(r)) => only_primes_of(r.denom(), allowed),
        // Integers and residues of a localized residue ring always admit
        // such a representative.
        (_, Elem::Int(_)) => true,
        _ => false,
    }
}

/// Every prime dividing `den` also divides `allowed`.
fn only_primes_of(den: &BigInt, allowed: &BigInt) -> bool {
    let mut d = den.abs();
    for p in prime_factors(allowed) {
        while (&d % &p).is_zero() {
            d /= &p;
        }
    }
    d.is_one()
}

use num_traits::Zero;

impl fmt::Display for RingValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ring.format(&self.elem))
    }
}
