use super::*;
use num_rational::BigRational;

fn rat(n: i64, d: i64) -> Elem {
    Elem::Rat(BigRational::new(BigInt::from(n), BigInt::from(d)))
}

#[test]
fn residue_arith() {
    let r = Ring::modular(4).unwrap();
    assert_eq!(r.mul(&Elem::int(3), &Elem::int(3)).unwrap(), Elem::int(1));
    assert!(!r.is_unit(&Elem::int(2)));
    assert_eq!(r.inverse(&Elem::int(3)).unwrap(), Elem::int(3));
    assert!(r.is_local() && !r.is_domain());
    assert!(!Ring::modular(6).unwrap().is_local());
}

#[test]
fn localized_integers() {
    let r = Ring::localized_integers(5).unwrap();
    assert_eq!(r.add(&rat(1, 2), &rat(1, 3)), rat(5, 6));
    assert!(r.is_unit(&rat(5, 6)) == false);
    assert!(r.is_unit(&rat(6, 7)));
    assert!(r.check(&rat(1, 5)).is_err());
}

#[test]
fn truncated() {
    let r = Ring::truncated_poly(2, 2).unwrap();
    let x = Elem::Poly(vec![Elem::int(0), Elem::int(1)]);
    assert_eq!(r.mul(&x, &x).unwrap(), r.zero());
    let u = Elem::Poly(vec![Elem::int(1), Elem::int(1)]);
    assert_eq!(r.mul(&u, &r.inverse(&u).unwrap()).unwrap(), r.one());
    assert_eq!(r.elements().unwrap().len(), 4);
}

#[test]
fn poly_units_and_substitution() {
    let z5 = Ring::localized_integers(5).unwrap();
    let p = Ring::poly(&z5, "T");
    let f = p.poly_from_coeffs(vec![rat(2, 1), rat(5, 1)]);
    assert!(!p.is_unit(&f));

    let z4 = Ring::modular(4).unwrap();
    let p4 = Ring::poly(&z4, "T");
    // 1 + 2T is a unit because 2 is nilpotent.
    let g = p4.poly_from_coeffs(vec![Elem::int(1), Elem::int(2)]);
    assert!(p4.is_unit(&g));
    assert_eq!(p4.mul(&g, &p4.inverse(&g).unwrap()).unwrap(), p4.one());

    let h = p4.poly_from_coeffs(vec![Elem::int(0), Elem::int(3), Elem::int(1)]);
    assert_eq!(p4.substitute(&h, &Elem::int(0)).unwrap(), Elem::int(0));
    assert_eq!(p4.substitute(&h, &Elem::int(1)).unwrap(), Elem::int(0));
    let two_t = p4.poly_from_coeffs(vec![Elem::int(0), Elem::int(2)]);
    assert_eq!(p4.substitute(&two_t, &Elem::int(2)).unwrap(), Elem::int(0));
}

#[test]
fn degree_cap_is_an_error() {
    let p = Ring::poly_with_cap(&Ring::integers(), "T", 2);
    let t = p.var_elem();
    let t2 = p.mul(&t, &t).unwrap();
    assert!(matches!(p.mul(&t2, &t), Err(Error::DegreeCap { degree: 3, cap: 2 })));
}

#[test]
fn quotients() {
    let z = Ring::integers();
    let q = Ring::quotient(&z, vec![Elem::int(12), Elem::int(18)]).unwrap();
    assert_eq!(q.residue_modulus(), Some(&BigInt::from(6)));
    assert_eq!(q.project(&Elem::int(-1)).unwrap(), Elem::int(5));

    let l = Ring::localized_integers(3).unwrap();
    let q = Ring::quotient(&l, vec![rat(18, 1)]).unwrap();
    assert_eq!(q.residue_modulus(), Some(&BigInt::from(9)));
    assert_eq!(q.project(&rat(1, 2)).unwrap(), Elem::int(5));
    assert!(q.is_local());

    let f3 = Ring::prime_field(3).unwrap();
    let p = Ring::poly(&f3, "T");
    // F_3[T]/(T^2 + 1) is the field with 9 elements.
    let q = Ring::quotient(&p, vec![p.poly_from_coeffs(vec![Elem::int(1), Elem::int(0), Elem::int(1)])]).unwrap();
    let nonzero: Vec<Elem> = q.elements().unwrap().into_iter().filter(|e| !q.is_zero(e)).collect();
    assert_eq!(nonzero.len(), 8);
    assert!(nonzero.iter().all(|e| q.is_unit(e)));

    assert!(Ring::quotient(&z, vec![Elem::int(3), Elem::int(2)]).is_err());
}

#[test]
fn fractions() {
    let z = Ring::integers();
    let z6 = Ring::fraction(&z, Elem::int(6)).unwrap();
    assert!(z6.check(&rat(1, 12)).is_ok());
    assert!(z6.check(&rat(1, 5)).is_err());
    assert!(z6.is_unit(&rat(3, 1)));
    assert!(!z6.is_unit(&rat(5, 1)));
    assert!(!z6.is_local());

    let m = Ring::modular(12).unwrap();
    let f = Ring::fraction(&m, Elem::int(2)).unwrap();
    assert_eq!(f.residue_modulus(), Some(&BigInt::from(3)));
    assert!(Ring::fraction(&Ring::modular(4).unwrap(), Elem::int(2)).is_err());
}

#[test]
fn denominator_check() {
    let z6 = Ring::fraction(&Ring::integers(), Elem::int(6)).unwrap();
    let p = Ring::poly(&z6, "T");
    let v = |c: Elem| RingValue::new(&p, p.poly_from_coeffs(vec![rat(0, 1), c])).unwrap();
    let allowed = |n: i64| RingValue::new(&z6, rat(n, 1)).unwrap();
    assert!(v(rat(2, 3)).localize_denominator_check(&allowed(3)));
    assert!(v(rat(-1, 2)).localize_denominator_check(&allowed(-2)));
    assert!(!v(rat(1, 6)).localize_denominator_check(&allowed(3)));
}

#[test]
fn value_mismatch() {
    let a = RingValue::from_i64(&Ring::modular(4).unwrap(), 1);
    let b = RingValue::from_i64(&Ring::modular(5).unwrap(), 1);
    assert!(matches!(a.add(&b), Err(Error::DescriptorMismatch(_))));
}

#[test]
fn div_exact_cases() {
    let m = Ring::modular(8).unwrap();
    let q = m.div_exact(&Elem::int(6), &Elem::int(2)).unwrap();
    assert_eq!(m.mul(&q, &Elem::int(2)).unwrap(), Elem::int(6));
    assert!(m.div_exact(&Elem::int(1), &Elem::int(2)).is_none());

    let t = Ring::truncated_poly(3, 3).unwrap();
    let x = Elem::Poly(vec![Elem::int(0), Elem::int(1)]);
    let a = Elem::Poly(vec![Elem::int(0), Elem::int(2), Elem::int(1)]);
    let q = t.div_exact(&a, &x).unwrap();
    assert_eq!(t.mul(&q, &x).unwrap(), a);
}
