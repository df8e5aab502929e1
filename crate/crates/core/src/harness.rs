//! Seeded randomized check suites, shared by the CLI `harness` verb.
//!
//! Instance `k` of a suite draws from its own ChaCha stream seeded by
//! `(seed, k)`, instances run in parallel, and results are aggregated in
//! instance order, so a report depends only on (suite, seed, budget).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::{transvection_factor, whitehead_linear};
use crate::homotopy::{homotopy_commute, Homotopy};
use crate::localglobal::{quillen_split, two_chart_glue, TwoChart, DEFAULT_N_MAX};
use crate::matrices::{FormKind, Group, IsotropicFrame, Mat};
use crate::orthoquot::{commutator_harness, o2_element, vaserstein_quotient, Factored, Shape};
use crate::reduce::{complete_orth, complete_sp, complete_um_linear, reduce_row_linear, Flavor};
use crate::rings::{Elem, Ring, RingRef};
use crate::words::{Family, GenWord, Generator};

/// Random instance builders.
pub mod sample {
    use super::*;

    pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        r.set_stream(stream);
        r
    }

    /// Random valid (i, j) for a family and size.
    pub fn indices<G: Rng + ?Sized>(g: &mut G, family: Family, size: usize) -> (usize, usize) {
        loop {
            let (i, j) = (g.gen_range(1..=size), g.gen_range(1..=size));
            if crate::words::validate(family, size, i, j).is_ok() {
                return (i, j);
            }
        }
    }

    /// Word of `len` generators with random ring parameters.
    pub fn word<G: Rng + ?Sized>(g: &mut G, ring: &RingRef, family: Family, size: usize, len: usize) -> GenWord {
        let gens = (0..len)
            .map(|_| {
                let (i, j) = indices(g, family, size);
                Generator::new(i, j, ring.random(g))
            })
            .collect();
        GenWord::new(ring, size, family, gens).expect("valid random word")
    }

    /// Word over `R[T]` whose parameters are multiples of T.
    pub fn t_word<G: Rng + ?Sized>(g: &mut G, poly: &RingRef, family: Family, size: usize, len: usize) -> GenWord {
        let base = poly.poly_base().expect("polynomial ring").clone();
        let gens = (0..len)
            .map(|_| {
                let (i, j) = indices(g, family, size);
                let deg = g.gen_range(1..=2);
                let mut c = vec![base.zero(); deg];
                c.push(base.random(g));
                Generator::new(i, j, poly.poly_from_coeffs(c))
            })
            .collect();
        GenWord::new(poly, size, family, gens).expect("valid random word")
    }

    /// Leading `rows` rows of a random elementary matrix.
    pub fn leading_rows<G: Rng + ?Sized>(g: &mut G, ring: &RingRef, family: Family, size: usize, rows: usize) -> Mat {
        word(g, ring, family, size, 3 * size).eval().expect("evaluates").top_rows(rows)
    }

    /// Rational with denominator a power of `s` (possibly 1).
    pub fn local_rational<G: Rng + ?Sized>(g: &mut G, s: &BigInt) -> BigRational {
        let num = BigInt::from(g.gen_range(-6i64..=6));
        let den = num_traits::pow(s.clone(), g.gen_range(0..3usize));
        BigRational::new(num, den)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Lemmas,
    Homotopy,
    LocalGlobal,
    Ortho,
}

impl Suite {
    pub fn parse(s: &str) -> Result<Suite> {
        match s {
            "lemmas" => Ok(Suite::Lemmas),
            "homotopy" => Ok(Suite::Homotopy),
            "localglobal" => Ok(Suite::LocalGlobal),
            "ortho" => Ok(Suite::Ortho),
            _ => Err(Error::Parse(format!("unknown suite {:?}", s))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemmas => "lemmas",
            Suite::Homotopy => "homotopy",
            Suite::LocalGlobal => "localglobal",
            Suite::Ortho => "ortho",
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct Tally {
    pub passed: u64,
    pub failed: u64,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub budget: u64,
    pub checks: BTreeMap<String, Tally>,
    pub failures: Vec<String>,
    pub ok: bool,
}

type Outcomes = Vec<(&'static str, std::result::Result<(), String>)>;

fn expect(name: &'static str, r: Result<bool>) -> (&'static str, std::result::Result<(), String>) {
    match r {
        Ok(true) => (name, Ok(())),
        Ok(false) => (name, Err("identity does not hold".into())),
        Err(e) => (name, Err(format!("{}: {}", e.code(), e))),
    }
}

fn ring_for(k: u64) -> RingRef {
    Ring::modular(if k % 2 == 0 { 9 } else { 5 }).expect("modulus")
}

fn lemmas_instance(seed: u64, k: u64) -> Outcomes {
    let mut g = sample::rng(seed, k);
    let r = ring_for(k);
    let mut out = Outcomes::new();

    let v = sample::leading_rows(&mut g, &r, Family::Lin, 3, 1);
    out.push(expect("reduce_row_linear", (|| {
        let w = reduce_row_linear(&v)?;
        Ok(w.act(&v)? == Mat::standard_frame(&r, 1, 3))
    })()));

    let v = sample::leading_rows(&mut g, &r, Family::Lin, 4, 2);
    out.push(expect("complete_um_linear", (|| {
        let e = complete_um_linear(&v)?.eval()?;
        Ok(e.top_rows(2) == v && e.membership(Group::SL)?)
    })()));

    for (name, n, m) in [("complete_sp m>n", 1, 3), ("complete_sp m=n", 2, 2)] {
        let v = sample::leading_rows(&mut g, &r, Family::Sp, 2 * m, 2 * n);
        out.push(expect(name, (|| {
            let e = complete_sp(&IsotropicFrame::new(v.clone(), FormKind::SymplecticPsi(m))?)?.eval()?;
            Ok(e.top_rows(2 * n) == v && e.membership(Group::Sp)?)
        })()));
    }

    let v = sample::leading_rows(&mut g, &r, Family::Orth, 6, 2);
    out.push(expect("complete_orth", (|| {
        let e = complete_orth(&IsotropicFrame::new(v.clone(), FormKind::OrthogonalPhi(3))?)?.eval()?;
        Ok(e.top_rows(2) == v && e.membership(Group::O)?)
    })()));

    let d = sample::word(&mut g, &r, Family::Lin, 2, 4).eval().expect("evaluates");
    out.push(expect("whitehead_linear", (|| {
        Ok(whitehead_linear(&d)?.eval()? == d.block_perp(&d.inverse()?)?)
    })()));

    let gm = sample::word(&mut g, &r, Family::Lin, 3, 6).eval().expect("evaluates");
    let c = gm.submatrix(0, 3, 0, 1);
    let h = gm.inverse().expect("elementary").top_rows(1);
    let u = Mat::from_rows(&r, vec![(0..3).map(|_| r.random(&mut g)).collect()]).expect("row");
    out.push(expect("transvection_factor", (|| {
        let uc = u.mul(&c)?.get(0, 0).clone();
        let row = u.sub(&h.scale(&uc)?)?;
        let e = transvection_factor(&c, &row)?.eval()?;
        Ok(e == Mat::identity(&r, 3).add(&c.mul(&row)?)?)
    })()));
    out
}

fn homotopy_instance(seed: u64, k: u64) -> Outcomes {
    let mut g = sample::rng(seed, k);
    let r = ring_for(k);
    let p = Ring::poly(&r, "T");
    let mut out = Outcomes::new();
    for (name, flavor, n, m) in [
        ("homotopy linear", Flavor::Linear, 2, 3),
        ("homotopy sp", Flavor::Symplectic, 2, 3),
        ("homotopy orth", Flavor::Orthogonal, 2, 4),
    ] {
        let family = flavor.family();
        let (dn, vm, vr) = match flavor {
            Flavor::Linear => (n, m, n),
            _ => (2 * n, 2 * m, 2 * n),
        };
        let base_word = sample::word(&mut g, &r, family, dn, 3);
        let v = sample::leading_rows(&mut g, &r, family, vm, vr);
        out.push(expect(name, (|| {
            let h = Homotopy::scaled(flavor, &base_word, &p)?;
            let o = homotopy_commute(&h, &v)?;
            let vt = v.embed_into(&p)?;
            Ok(h.matrix().mul(&vt)? == vt.mul(&o.sigma)?)
        })()));
    }
    out
}

fn localglobal_instance(seed: u64, k: u64) -> Outcomes {
    let mut g = sample::rng(seed, k);
    let z = Ring::integers();
    let pz = Ring::poly(&z, "T");
    let (s1, s2) = [(3i64, -2i64), (5, -4), (-2, 3)][(k % 3) as usize];
    let (s1, s2) = (BigInt::from(s1), BigInt::from(s2));
    let mut out = Outcomes::new();
    let chart = |s: &BigInt| Ring::poly(&Ring::fraction(&z, Elem::Int(s.clone())).expect("nonzero"), "T");
    let (c1, c2) = (chart(&s1), chart(&s2));
    let zeta = |g: &mut ChaCha8Rng, ring: &RingRef, s: &BigInt| -> GenWord {
        let gens = (0..3)
            .map(|_| {
                let i = 3;
                let j = g.gen_range(1..=2);
                let mut c = vec![Elem::Rat(BigRational::from_integer(BigInt::from(0)))];
                c.push(Elem::Rat(sample::local_rational(g, s)));
                Generator::new(i, j, ring.normalize(Elem::Poly(c)).expect("local coefficient"))
            })
            .collect();
        GenWord::new(ring, 3, Family::Lin, gens).expect("valid")
    };
    let delta = sample::t_word(&mut g, &pz, Family::Lin, 2, 2);
    let inst = TwoChart {
        delta,
        m: 3,
        s1: s1.clone(),
        s2: s2.clone(),
        zeta1: zeta(&mut g, &c1, &s1),
        zeta2: zeta(&mut g, &c2, &s2),
        n_max: DEFAULT_N_MAX,
    };
    out.push(expect("two_chart_glue", two_chart_glue(&inst).map(|_| true)));

    let overlap = Ring::poly(&Ring::fraction(&z, Elem::Int(&s1 * &s2)).expect("nonzero"), "T");
    let theta = {
        let gens = (0..2)
            .map(|_| {
                let (i, j) = sample::indices(&mut g, Family::Lin, 2);
                let num = BigInt::from(g.gen_range(-5i64..=5));
                let den = num_traits::pow(s1.clone(), g.gen_range(0..2usize)) * num_traits::pow(s2.clone(), g.gen_range(0..2usize));
                let c = vec![Elem::int(0), Elem::Rat(BigRational::new(num, den))];
                Generator::new(i, j, overlap.normalize(Elem::Poly(c)).expect("overlap element"))
            })
            .collect();
        GenWord::new(&overlap, 2, Family::Lin, gens).expect("valid")
    };
    out.push(expect("quillen_split", match quillen_split(&theta, &s1, &s2, DEFAULT_N_MAX) {
        Ok(s) => s.theta_a.eval().and_then(|a| Ok(a.mul(&s.theta_b.eval()?)? == theta.eval()?)),
        Err(Error::SplitExponentExhausted(_)) => Ok(true),
        Err(e) => Err(e),
    }));
    out
}

fn ortho_instance(seed: u64, k: u64) -> Outcomes {
    let mut g = sample::rng(seed, k);
    let r = Ring::modular(5).expect("modulus");
    let mut out = Outcomes::new();
    let a = sample::word(&mut g, &r, Family::Orth, 6, 8).eval().expect("evaluates");
    out.push(expect("vaserstein_quotient on EO", vaserstein_quotient(&a).map(|q| q.delta.is_identity())));
    let factored = |g: &mut ChaCha8Rng| -> Result<Factored> {
        let shape = if g.gen_bool(0.5) { Shape::Diag } else { Shape::AntiDiag };
        let u = r.random_unit(g);
        Factored::new(o2_element(&r, shape, &u)?, sample::word(g, &r, Family::Orth, 6, 5))
    };
    let (fa, fb) = (factored(&mut g), factored(&mut g));
    out.push(expect("commutator_harness", (|| {
        let (w, _) = commutator_harness(&fa?, &fb?)?;
        Ok(w.size() == 8)
    })()));
    out
}

/// Run `budget` instances of a suite.
pub fn run(suite: Suite, seed: u64, budget: u64) -> Report {
    let f: fn(u64, u64) -> Outcomes = match suite {
        Suite::Lemmas => lemmas_instance,
        Suite::Homotopy => homotopy_instance,
        Suite::LocalGlobal => localglobal_instance,
        Suite::Ortho => ortho_instance,
    };
    let results: Vec<Outcomes> = (0..budget).into_par_iter().map(|k| f(seed, k)).collect();
    aggregate(suite, seed, budget, results)
}

fn aggregate(suite: Suite, seed: u64, budget: u64, results: Vec<Outcomes>) -> Report {
    let mut checks: BTreeMap<String, Tally> = BTreeMap::new();
    let mut failures = Vec::new();
    for (k, outcomes) in results.into_iter().enumerate() {
        for (name, res) in outcomes {
            let t = checks.entry(name.to_string()).or_default();
            match res {
                Ok(()) => t.passed += 1,
                Err(msg) => {
                    t.failed += 1;
                    failures.push(format!("instance {}: {}: {}", k, name, msg));
                }
            }
        }
    }
    let ok = failures.is_empty();
    Report { suite: suite.name().to_string(), seed, budget, checks, failures, ok }
}
