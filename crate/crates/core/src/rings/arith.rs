use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::intmath::mod_inverse;
use super::{Arith, Elem, Ring, RingRef};
use crate::error::{Error, Result};

const SERIES_LIMIT: usize = 4096;

impl Ring {
    pub fn zero(&self) -> Elem {
        match &self.arith {
            Arith::Z | Arith::Residue(_) => Elem::Int(BigInt::zero()),
            Arith::Rat(_) => Elem::Rat(BigRational::zero()),
            Arith::Trunc { .. } | Arith::Poly { .. } | Arith::PolyQuot { .. } => Elem::Poly(vec![]),
        }
    }

    pub fn one(&self) -> Elem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Elem {
        self.from_bigint(&BigInt::from(n))
    }

    /// Image of an integer under the unique map Z -> R.
    pub fn from_bigint(&self, n: &BigInt) -> Elem {
        match &self.arith {
            Arith::Z => Elem::Int(n.clone()),
            Arith::Residue(m) => Elem::Int(n.mod_floor(m)),
            Arith::Rat(_) => Elem::Rat(BigRational::from_integer(n.clone())),
            Arith::Trunc { p, .. } => {
                let c = n.mod_floor(p);
                Elem::Poly(if c.is_zero() { vec![] } else { vec![Elem::Int(c)] })
            }
            Arith::Poly { base, .. } | Arith::PolyQuot { base, .. } => {
                let c = base.from_bigint(n);
                Elem::Poly(if base.is_zero(&c) { vec![] } else { vec![c] })
            }
        }
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        match a {
            Elem::Int(n) => n.is_zero(),
            Elem::Rat(r) => r.is_zero(),
            Elem::Poly(c) => c.is_empty(),
        }
    }

    pub fn is_one(&self, a: &Elem) -> bool {
        *a == self.one()
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match (&self.arith, a, b) {
            (Arith::Z, Elem::Int(x), Elem::Int(y)) => Elem::Int(x + y),
            (Arith::Residue(n), Elem::Int(x), Elem::Int(y)) => Elem::Int((x + y).mod_floor(n)),
            (Arith::Rat(_), Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x + y),
            (Arith::Trunc { p, .. }, Elem::Poly(x), Elem::Poly(y)) => {
                Elem::Poly(zip_coeffs(x, y, |u, v| Elem::Int((int(u) + int(v)).mod_floor(p)), &int_zero()))
            }
            (Arith::Poly { base, .. } | Arith::PolyQuot { base, .. }, Elem::Poly(x), Elem::Poly(y)) => {
                let z = base.zero();
                let mut c = zip_coeffs(x, y, |u, v| base.add(u, v), &z);
                trim(base, &mut c);
                Elem::Poly(c)
            }
            _ => panic!("payload does not match ring {}", self),
        }
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        match (&self.arith, a) {
            (Arith::Z, Elem::Int(x)) => Elem::Int(-x),
            (Arith::Residue(n), Elem::Int(x)) => Elem::Int((-x).mod_floor(n)),
            (Arith::Rat(_), Elem::Rat(x)) => Elem::Rat(-x),
            (Arith::Trunc { p, .. }, Elem::Poly(x)) => {
                Elem::Poly(x.iter().map(|u| Elem::Int((-int(u)).mod_floor(p))).collect())
            }
            (Arith::Poly { base, .. } | Arith::PolyQuot { base, .. }, Elem::Poly(x)) => {
                Elem::Poly(x.iter().map(|u| base.neg(u)).collect())
            }
            _ => panic!("payload does not match ring {}", self),
        }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    /// Product. Fails only when a polynomial product exceeds the degree cap.
    pub fn mul(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        Ok(match (&self.arith, a, b) {
            (Arith::Z, Elem::Int(x), Elem::Int(y)) => Elem::Int(x * y),
            (Arith::Residue(n), Elem::Int(x), Elem::Int(y)) => Elem::Int((x * y).mod_floor(n)),
            (Arith::Rat(_), Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x * y),
            (Arith::Trunc { p, e }, Elem::Poly(x), Elem::Poly(y)) => {
                let mut c = vec![BigInt::zero(); (*e).min(x.len() + y.len())];
                for (i, u) in x.iter().enumerate() {
                    for (j, v) in y.iter().enumerate() {
                        if i + j < *e {
                            c[i + j] += int(u) * int(v);
                        }
                    }
                }
                let mut c: Vec<Elem> = c.into_iter().map(|v| Elem::Int(v.mod_floor(p))).collect();
                while c.last().map_or(false, |x| int(x).is_zero()) {
                    c.pop();
                }
                Elem::Poly(c)
            }
            (Arith::Poly { base, cap }, Elem::Poly(x), Elem::Poly(y)) => {
                if x.is_empty() || y.is_empty() {
                    return Ok(Elem::Poly(vec![]));
                }
                let c = poly_mul(base, x, y)?;
                if c.len() > cap + 1 {
                    return Err(Error::DegreeCap { degree: c.len() - 1, cap: *cap });
                }
                Elem::Poly(c)
            }
            (Arith::PolyQuot { base, .. }, Elem::Poly(x), Elem::Poly(y)) => {
                if x.is_empty() || y.is_empty() {
                    return Ok(Elem::Poly(vec![]));
                }
                let c = poly_mul(base, x, y)?;
                self.poly_reduce(c)?
            }
            _ => panic!("payload does not match ring {}", self),
        })
    }

    pub fn pow(&self, a: &Elem, mut k: u64) -> Result<Elem> {
        let mut acc = self.one();
        let mut base = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base)?;
            }
        }
        Ok(acc)
    }

    pub fn is_unit(&self, a: &Elem) -> bool {
        match (&self.arith, a) {
            (Arith::Z, Elem::Int(x)) => x.abs().is_one(),
            (Arith::Residue(n), Elem::Int(x)) => x.gcd(n).is_one(),
            (Arith::Rat(rule), Elem::Rat(x)) => !x.is_zero() && rule.allows(x.numer()),
            (Arith::Trunc { .. }, Elem::Poly(c)) => c.first().map_or(false, |c0| !int(c0).is_zero()),
            (Arith::Poly { base, .. }, Elem::Poly(c)) => {
                !c.is_empty() && base.is_unit(&c[0]) && c[1..].iter().all(|x| base.is_nilpotent(x))
            }
            (Arith::PolyQuot { .. }, _) => self.inverse(a).is_ok(),
            _ => false,
        }
    }

    pub fn inverse(&self, a: &Elem) -> Result<Elem> {
        let not_unit = || Error::NotAUnit(format!("{} in {}", self.format(a), self));
        match (&self.arith, a) {
            (Arith::Z, Elem::Int(x)) if x.abs().is_one() => Ok(a.clone()),
            (Arith::Residue(n), Elem::Int(x)) => mod_inverse(x, n).map(Elem::Int).ok_or_else(not_unit),
            (Arith::Rat(_), Elem::Rat(x)) if self.is_unit(a) => Ok(Elem::Rat(x.recip())),
            (Arith::Trunc { .. }, _) | (Arith::Poly { .. }, _) if self.is_unit(a) => self.series_inverse(a),
            (Arith::PolyQuot { base, modulus }, Elem::Poly(c)) => {
                if c.is_empty() {
                    return Err(not_unit());
                }
                if base.is_field() {
                    let (g, s) = poly_xgcd_field(base, c, modulus)?;
                    if g.len() == 1 {
                        let ginv = base.inverse(&g[0])?;
                        let scaled: Vec<Elem> =
                            s.iter().map(|x| base.mul(x, &ginv)).collect::<Result<_>>()?;
                        return self.poly_reduce(scaled);
                    }
                    return Err(not_unit());
                }
                if self.cardinality().map_or(false, |n| n <= 1_000_000) {
                    let one = self.one();
                    for cand in self.elements().unwrap() {
                        if self.mul(a, &cand)? == one {
                            return Ok(cand);
                        }
                    }
                    return Err(not_unit());
                }
                Err(Error::Unsupported(format!("unit test in {}", self)))
            }
            _ => Err(not_unit()),
        }
    }

    /// a = c·(1 + N) with N nilpotent: invert by the finite geometric series.
    fn series_inverse(&self, a: &Elem) -> Result<Elem> {
        let (c0, base) = match (&self.arith, a) {
            (Arith::Poly { base, .. }, Elem::Poly(c)) => (c[0].clone(), base.clone()),
            (Arith::Trunc { p, .. }, Elem::Poly(c)) => {
                (c[0].clone(), Ring::modular(p.try_into().unwrap()).unwrap())
            }
            _ => unreachable!(),
        };
        let c0_inv = self.poly_const(&base, base.inverse(&c0)?);
        let u = self.mul(a, &c0_inv)?;
        let n = self.sub(&u, &self.one());
        let minus_n = self.neg(&n);
        let mut term = self.one();
        let mut sum = self.zero();
        for _ in 0..SERIES_LIMIT {
            if self.is_zero(&term) {
                return self.mul(&sum, &c0_inv);
            }
            sum = self.add(&sum, &term);
            term = self.mul(&term, &minus_n)?;
        }
        Err(Error::Unsupported("nilpotent series did not terminate".into()))
    }

    fn poly_const(&self, _base: &RingRef, c: Elem) -> Elem {
        if matches!(c, Elem::Int(ref x) if x.is_zero()) {
            Elem::Poly(vec![])
        } else {
            Elem::Poly(vec![c])
        }
    }

    pub fn is_field(&self) -> bool {
        match &self.arith {
            Arith::Residue(n) => self.domain && !n.is_zero(),
            Arith::Rat(rule) => rule.all,
            Arith::Trunc { e, .. } => *e == 1,
            _ => false,
        }
    }

    pub fn is_nilpotent(&self, a: &Elem) -> bool {
        match (&self.arith, a) {
            (Arith::Z | Arith::Rat(_), _) => self.is_zero(a),
            (Arith::Residue(n), Elem::Int(x)) => {
                let k = n.bits();
                x.modpow(&BigInt::from(k), n).is_zero()
            }
            (Arith::Trunc { .. }, Elem::Poly(c)) => c.first().map_or(true, |c0| int(c0).is_zero()),
            (Arith::Poly { base, .. }, Elem::Poly(c)) => c.iter().all(|x| base.is_nilpotent(x)),
            (Arith::PolyQuot { modulus, .. }, _) => {
                let mut x = a.clone();
                for _ in 0..(2 * modulus.len() + 8) {
                    if self.is_zero(&x) {
                        return true;
                    }
                    x = match self.mul(&x, &x) {
                        Ok(y) => y,
                        Err(_) => return false,
                    };
                }
                self.is_zero(&x)
            }
            _ => false,
        }
    }

    /// Some x with b·x = a, when one exists and can be found.
    pub fn div_exact(&self, a: &Elem, b: &Elem) -> Option<Elem> {
        if self.is_zero(a) {
            return Some(self.zero());
        }
        if self.is_unit(b) {
            return self.mul(a, &self.inverse(b).ok()?).ok();
        }
        match (&self.arith, a, b) {
            (Arith::Z, Elem::Int(x), Elem::Int(y)) => {
                if !y.is_zero() && (x % y).is_zero() {
                    Some(Elem::Int(x / y))
                } else {
                    None
                }
            }
            (Arith::Residue(n), Elem::Int(x), Elem::Int(y)) => {
                let g = y.gcd(n);
                if !(x % &g).is_zero() {
                    return None;
                }
                let n2 = n / &g;
                let inv = mod_inverse(&(y / &g), &n2)?;
                Some(Elem::Int(((x / &g) * inv).mod_floor(&n2)))
            }
            (Arith::Rat(rule), Elem::Rat(x), Elem::Rat(y)) => {
                if y.is_zero() {
                    return None;
                }
                let q = x / y;
                rule.allows(q.denom()).then(|| Elem::Rat(q))
            }
            (Arith::Trunc { p, e }, Elem::Poly(x), Elem::Poly(y)) => {
                let vb = y.iter().position(|c| !int(c).is_zero())?;
                let va = x.iter().position(|c| !int(c).is_zero())?;
                if va < vb {
                    return None;
                }
                let shift = |v: &Vec<Elem>, k: usize| {
                    let mut w: Vec<Elem> = v[k..].to_vec();
                    while w.last().map_or(false, |c| int(c).is_zero()) {
                        w.pop();
                    }
                    Elem::Poly(w)
                };
                let unit = shift(y, vb);
                let q = self.mul(&shift(x, vb), &self.inverse(&unit).ok()?).ok()?;
                let _ = (p, e);
                (self.mul(&q, b).ok()? == *a).then_some(q)
            }
            (Arith::Poly { base, .. }, Elem::Poly(x), Elem::Poly(y)) => {
                if y.is_empty() {
                    return None;
                }
                let mut r = x.clone();
                let mut q = vec![base.zero(); x.len().saturating_sub(y.len()) + 1];
                let lc = y.last().unwrap();
                while r.len() >= y.len() && !r.is_empty() {
                    let k = r.len() - y.len();
                    let c = base.div_exact(r.last().unwrap(), lc)?;
                    for (i, yc) in y.iter().enumerate() {
                        let t = base.mul(&c, yc).ok()?;
                        r[i + k] = base.sub(&r[i + k], &t);
                    }
                    q[k] = base.add(&q[k], &c);
                    trim(base, &mut r);
                    if r.len() > k + y.len() {
                        return None;
                    }
                }
                if !r.is_empty() {
                    return None;
                }
                trim(base, &mut q);
                Some(Elem::Poly(q))
            }
            _ => None,
        }
    }

    /// Human-readable rendering.
    pub fn format(&self, a: &Elem) -> String {
        match (&self.arith, a) {
            (_, Elem::Int(x)) => x.to_string(),
            (_, Elem::Rat(r)) => r.to_string(),
            (Arith::Trunc { .. }, Elem::Poly(c)) => format_poly(c, "x", |e| e.as_int().unwrap().to_string()),
            (Arith::Poly { base, .. } | Arith::PolyQuot { base, .. }, Elem::Poly(c)) => {
                format_poly(c, &self.var, |e| base.format(e))
            }
            _ => format!("{:?}", a),
        }
    }

    /// A random element. Infinite rings draw from a small box.
    pub fn random<G: rand::Rng + ?Sized>(&self, rng: &mut G) -> Elem {
        match &self.arith {
            Arith::Z => Elem::Int(BigInt::from(rng.gen_range(-9i64..=9))),
            Arith::Residue(n) => {
                let n64: u64 = n.try_into().unwrap_or(u64::MAX);
                Elem::Int(BigInt::from(rng.gen_range(0..n64)))
            }
            Arith::Rat(rule) => loop {
                let num = BigInt::from(rng.gen_range(-9i64..=9));
                let den = if rule.all {
                    BigInt::from(rng.gen_range(1i64..=9))
                } else if let Some(p) = rule.primes.first().filter(|_| rng.gen_bool(0.5)) {
                    num_traits::pow(p.clone(), rng.gen_range(0..3))
                } else {
                    BigInt::from(rng.gen_range(1i64..=9))
                };
                if rule.allows(&den) {
                    return Elem::Rat(BigRational::new(num, den));
                }
            },
            Arith::Trunc { p, e } => {
                let p64: u64 = p.try_into().unwrap();
                let c: Vec<Elem> = (0..*e).map(|_| Elem::Int(BigInt::from(rng.gen_range(0..p64)))).collect();
                Elem::Poly(super::trim_ints(c))
            }
            Arith::Poly { base, .. } => {
                let d = rng.gen_range(0..3usize);
                let mut c: Vec<Elem> = (0..=d).map(|_| base.random(rng)).collect();
                trim(base, &mut c);
                Elem::Poly(c)
            }
            Arith::PolyQuot { base, modulus } => {
                let mut c: Vec<Elem> = (0..modulus.len() - 1).map(|_| base.random(rng)).collect();
                trim(base, &mut c);
                Elem::Poly(c)
            }
        }
    }

    /// A random unit, by rejection.
    pub fn random_unit<G: rand::Rng + ?Sized>(&self, rng: &mut G) -> Elem {
        loop {
            let x = self.random(rng);
            if self.is_unit(&x) {
                return x;
            }
        }
    }

    /// Canonicalize a loosely typed payload (integers where rationals are
    /// expected, unreduced residues, untrimmed coefficient lists).
    pub fn normalize(&self, raw: Elem) -> Result<Elem> {
        let bad = |e: &Elem| Error::InvalidElement(format!("{:?} does not describe an element of {}", e, self));
        let out = match (&self.arith, raw) {
            (_, Elem::Int(a)) => self.from_bigint(&a),
            (Arith::Rat(_) | Arith::Residue(_) | Arith::Z, Elem::Rat(r)) => self.from_rational(&r)?,
            (Arith::Trunc { p, e }, Elem::Poly(c)) => {
                if c.len() > *e {
                    return Err(bad(&Elem::Poly(c)));
                }
                let c = c
                    .into_iter()
                    .map(|x| x.as_int().map(|a| Elem::Int(a.mod_floor(p))).ok_or_else(|| bad(&x)))
                    .collect::<Result<Vec<_>>>()?;
                Elem::Poly(super::trim_ints(c))
            }
            (Arith::Poly { base, .. }, r @ Elem::Rat(_)) => self.poly_from_coeffs(vec![base.normalize(r)?]),
            (Arith::Poly { base, .. }, Elem::Poly(c)) => {
                let c = c.into_iter().map(|x| base.normalize(x)).collect::<Result<Vec<_>>>()?;
                self.poly_from_coeffs(c)
            }
            (Arith::PolyQuot { base, .. }, Elem::Poly(c)) => {
                let c = c.into_iter().map(|x| base.normalize(x)).collect::<Result<Vec<_>>>()?;
                self.poly_reduce(c)?
            }
            (_, e) => return Err(bad(&e)),
        };
        self.check(&out)?;
        Ok(out)
    }

    // ---- polynomial extension helpers ----

    /// Build an element of `R[T]` (or `R[T]/(f)`) from coefficients.
    pub fn poly_from_coeffs(&self, mut c: Vec<Elem>) -> Elem {
        match &self.arith {
            Arith::Poly { base, .. } => {
                trim(base, &mut c);
                Elem::Poly(c)
            }
            _ => panic!("{} is not a polynomial ring", self),
        }
    }

    /// The variable T of `R[T]`.
    pub fn var_elem(&self) -> Elem {
        let base = self.poly_base().expect("polynomial ring");
        Elem::Poly(vec![base.zero(), base.one()])
    }

    pub fn coeffs<'a>(&self, f: &'a Elem) -> &'a [Elem] {
        match f {
            Elem::Poly(c) => c,
            _ => panic!("not a polynomial payload"),
        }
    }

    pub fn constant_term(&self, f: &Elem) -> Elem {
        let base = self.poly_base().expect("polynomial ring");
        self.coeffs(f).first().cloned().unwrap_or_else(|| base.zero())
    }

    /// Evaluate f ∈ R[T] at t ∈ R (Horner).
    pub fn substitute(&self, f: &Elem, t: &Elem) -> Result<Elem> {
        let base = self
            .poly_base()
            .ok_or_else(|| Error::DescriptorMismatch(format!("{} is not a polynomial ring", self)))?;
        base.check(t).map_err(|_| Error::DescriptorMismatch(format!("value not in {}", base)))?;
        let mut acc = base.zero();
        for c in self.coeffs(f).iter().rev() {
            acc = base.add(&base.mul(&acc, t)?, c);
        }
        Ok(acc)
    }

    /// f(T) ↦ f(bT) for b ∈ R.
    pub fn dilate(&self, f: &Elem, b: &Elem) -> Result<Elem> {
        let base = self
            .poly_base()
            .ok_or_else(|| Error::DescriptorMismatch(format!("{} is not a polynomial ring", self)))?;
        base.check(b).map_err(|_| Error::DescriptorMismatch(format!("value not in {}", base)))?;
        let mut out = Vec::new();
        let mut bk = base.one();
        for c in self.coeffs(f) {
            out.push(base.mul(c, &bk)?);
            bk = base.mul(&bk, b)?;
        }
        Ok(self.poly_from_coeffs(out))
    }

    pub(crate) fn poly_reduce(&self, mut c: Vec<Elem>) -> Result<Elem> {
        let (base, modulus) = match &self.arith {
            Arith::PolyQuot { base, modulus } => (base, modulus),
            _ => unreachable!(),
        };
        trim(base, &mut c);
        let d = modulus.len() - 1;
        while c.len() > d {
            let k = c.len() - 1 - d;
            let lead = c.last().unwrap().clone();
            for (i, m) in modulus.iter().enumerate() {
                c[i + k] = base.sub(&c[i + k], &base.mul(&lead, m)?);
            }
            trim(base, &mut c);
        }
        Ok(Elem::Poly(c))
    }
}

fn int(e: &Elem) -> &BigInt {
    e.as_int().expect("integer payload")
}

fn int_zero() -> Elem {
    Elem::Int(BigInt::zero())
}

fn zip_coeffs(x: &[Elem], y: &[Elem], f: impl Fn(&Elem, &Elem) -> Elem, zero: &Elem) -> Vec<Elem> {
    let n = x.len().max(y.len());
    let mut out: Vec<Elem> = (0..n).map(|i| f(x.get(i).unwrap_or(zero), y.get(i).unwrap_or(zero))).collect();
    while out.last().map_or(false, |e| match e {
        Elem::Int(a) => a.is_zero(),
        Elem::Rat(r) => r.is_zero(),
        Elem::Poly(c) => c.is_empty(),
    }) {
        out.pop();
    }
    out
}

pub(crate) fn trim(base: &Ring, c: &mut Vec<Elem>) {
    while c.last().map_or(false, |x| base.is_zero(x)) {
        c.pop();
    }
}

fn poly_mul(base: &RingRef, x: &[Elem], y: &[Elem]) -> Result<Vec<Elem>> {
    let mut c = vec![base.zero(); x.len() + y.len() - 1];
    for (i, u) in x.iter().enumerate() {
        if base.is_zero(u) {
            continue;
        }
        for (j, v) in y.iter().enumerate() {
            c[i + j] = base.add(&c[i + j], &base.mul(u, v)?);
        }
    }
    trim(base, &mut c);
    Ok(c)
}

/// Over a field: (g, s) with s·a ≡ g mod m, g = gcd(a, m).
fn poly_xgcd_field(base: &RingRef, a: &[Elem], m: &[Elem]) -> Result<(Vec<Elem>, Vec<Elem>)> {
    let divmod = |a: &[Elem], b: &[Elem]| -> Result<(Vec<Elem>, Vec<Elem>)> {
        let mut r = a.to_vec();
        let mut q = vec![base.zero(); a.len().saturating_sub(b.len()) + 1];
        let inv = base.inverse(b.last().unwrap())?;
        while r.len() >= b.len() && !r.is_empty() {
            let k = r.len() - b.len();
            let c = base.mul(r.last().unwrap(), &inv)?;
            for (i, bc) in b.iter().enumerate() {
                r[i + k] = base.sub(&r[i + k], &base.mul(&c, bc)?);
            }
            q[k] = c;
            trim(base, &mut r);
        }
        trim(base, &mut q);
        Ok((q, r))
    };
    let sub_mul = |s0: &[Elem], q: &[Elem], s1: &[Elem]| -> Result<Vec<Elem>> {
        let prod = if q.is_empty() || s1.is_empty() { vec![] } else { poly_mul(base, q, s1)? };
        let z = base.zero();
        let n = s0.len().max(prod.len());
        let mut out: Vec<Elem> =
            (0..n).map(|i| base.sub(s0.get(i).unwrap_or(&z), prod.get(i).unwrap_or(&z))).collect();
        trim(base, &mut out);
        Ok(out)
    };
    let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
    let (mut s0, mut s1) = (vec![], vec![base.one()]);
    while !r1.is_empty() {
        let (q, r) = divmod(&r0, &r1)?;
        let s2 = sub_mul(&s0, &q, &s1)?;
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    Ok((r0, s0))
}

fn format_poly(c: &[Elem], var: &str, f: impl Fn(&Elem) -> String) -> String {
    if c.is_empty() {
        return "0".into();
    }
    let mut terms = Vec::new();
    for (k, x) in c.iter().enumerate().rev() {
        let s = f(x);
        if s == "0" {
            continue;
        }
        let coef = if s.contains(['+', '-', '/']) && k > 0 { format!("({})", s) } else { s };
        terms.push(match k {
            0 => coef,
            1 if coef == "1" => var.to_string(),
            1 => format!("{}{}", coef, var),
            _ if coef == "1" => format!("{}^{}", var, k),
            _ => format!("{}{}^{}", coef, var, k),
        });
    }
    terms.join(" + ")
}
