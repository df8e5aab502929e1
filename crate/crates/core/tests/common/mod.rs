//! Naive reference arithmetic over Z/n with plain `i64` matrices.
//!
//! Nothing here calls into the library's ring or matrix code, so the checks
//! built on it are independent of the implementation under test.

#![allow(dead_code)]

use cgf_core::matrices::Mat;
use cgf_core::rings::Elem;
use cgf_core::words::Family;
use num_traits::ToPrimitive;

pub type M = Vec<Vec<i64>>;

pub fn md(x: i64, n: i64) -> i64 {
    x.rem_euclid(n)
}

pub fn int_of(e: &Elem) -> i64 {
    match e {
        Elem::Int(b) => b.to_i64().expect("small residue"),
        other => panic!("expected a residue, got {:?}", other),
    }
}

pub fn to_m(a: &Mat) -> M {
    a.to_rows().iter().map(|r| r.iter().map(int_of).collect()).collect()
}

pub fn ident(k: usize) -> M {
    (0..k).map(|i| (0..k).map(|j| (i == j) as i64).collect()).collect()
}

pub fn zeros(r: usize, c: usize) -> M {
    vec![vec![0; c]; r]
}

pub fn mul(a: &M, b: &M, n: i64) -> M {
    let (r, k, c) = (a.len(), b.len(), b.first().map_or(0, |x| x.len()));
    assert!(a.iter().all(|row| row.len() == k), "inner dimensions differ");
    let mut out = zeros(r, c);
    for i in 0..r {
        for j in 0..c {
            let mut s = 0i64;
            for t in 0..k {
                s = md(s + a[i][t] * b[t][j], n);
            }
            out[i][j] = s;
        }
    }
    out
}

pub fn add(a: &M, b: &M, n: i64) -> M {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| md(p + q, n)).collect()).collect()
}

pub fn reduce(a: &M, n: i64) -> M {
    a.iter().map(|r| r.iter().map(|&x| md(x, n)).collect()).collect()
}

pub fn transpose(a: &M) -> M {
    let c = a.first().map_or(0, |r| r.len());
    (0..c).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

pub fn block_perp(a: &M, b: &M) -> M {
    let (p, q) = (a.len(), b.len());
    let mut out = zeros(p + q, p + q);
    for i in 0..p {
        out[i][..p].copy_from_slice(&a[i]);
    }
    for i in 0..q {
        out[p + i][p..].copy_from_slice(&b[i]);
    }
    out
}

pub fn block(a: &M, r0: usize, r1: usize, c0: usize, c1: usize) -> M {
    a[r0..r1].iter().map(|r| r[c0..c1].to_vec()).collect()
}

/// ψ_m: blocks [[0,1],[-1,0]] along the diagonal.
pub fn psi(m: usize, n: i64) -> M {
    let mut f = zeros(2 * m, 2 * m);
    for k in 0..m {
        f[2 * k][2 * k + 1] = 1;
        f[2 * k + 1][2 * k] = md(-1, n);
    }
    f
}

/// φ_m: blocks [[0,1],[1,0]] along the diagonal.
pub fn phi(m: usize) -> M {
    let mut f = zeros(2 * m, 2 * m);
    for k in 0..m {
        f[2 * k][2 * k + 1] = 1;
        f[2 * k + 1][2 * k] = 1;
    }
    f
}

pub fn preserves(a: &M, f: &M, n: i64) -> bool {
    mul(&mul(&transpose(a), f, n), a, n) == reduce(f, n)
}

/// Determinant by cofactor expansion along the first row.
pub fn det(a: &M, n: i64) -> i64 {
    let k = a.len();
    if k == 0 {
        return 1;
    }
    if k == 1 {
        return md(a[0][0], n);
    }
    let mut s = 0;
    for j in 0..k {
        if a[0][j] == 0 {
            continue;
        }
        let minor: M = a[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, &x)| x).collect()).collect();
        let sign = if j % 2 == 0 { 1 } else { -1 };
        s = md(s + sign * a[0][j] * det(&minor, n), n);
    }
    s
}

fn partner(i: usize) -> usize {
    if i % 2 == 0 {
        i - 1
    } else {
        i + 1
    }
}

/// Generator matrix straight from the defining formulas (1-based i, j).
///
/// e_ij(z) = I + zE_ij;
/// se_ij(z) = I + zE_ij if i = σ(j), else I + zE_ij − (−1)^{i+j} z E_{σ(j)σ(i)};
/// oe_ij(z) = I + zE_ij − zE_{σ(j)σ(i)}.
pub fn generator(family: Family, size: usize, i: usize, j: usize, z: i64, n: i64) -> M {
    let mut g = ident(size);
    g[i - 1][j - 1] = md(g[i - 1][j - 1] + z, n);
    let second = match family {
        Family::Lin => None,
        Family::Sp if i == partner(j) => None,
        Family::Sp => Some(if (i + j) % 2 == 0 { -z } else { z }),
        Family::Orth => Some(-z),
    };
    if let Some(c) = second {
        let (a, b) = (partner(j) - 1, partner(i) - 1);
        g[a][b] = md(g[a][b] + c, n);
    }
    g
}

/// Evaluate a word over Z/n by multiplying naive generator matrices.
pub fn eval_word(w: &cgf_core::words::GenWord, n: i64) -> M {
    let mut acc = ident(w.size());
    for g in w.gens() {
        acc = mul(&acc, &generator(w.family(), w.size(), g.i, g.j, int_of(&g.param), n), n);
    }
    acc
}

pub fn is_identity(a: &M) -> bool {
    *a == ident(a.len())
}

pub fn is_zero(a: &M) -> bool {
    a.iter().all(|r| r.iter().all(|&x| x == 0))
}

pub fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

pub fn is_unit(x: i64, n: i64) -> bool {
    gcd(md(x, n), n) == 1
}

pub fn inv(x: i64, n: i64) -> i64 {
    (1..n).find(|&y| md(x * y, n) == 1).expect("unit")
}
