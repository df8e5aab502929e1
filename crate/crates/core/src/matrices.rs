//! Dense exact matrices over a [`Ring`], the standard forms ψ_n and φ_n,
//! group membership predicates and right-inverse certificates.
//!
//! Indices are 0-based throughout this module. The generator layer in
//! [`crate::words`] uses the 1-based convention of the mathematics.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rings::intmath::{prime_factors, xgcd};
use crate::rings::{Descriptor, Elem, Ring, RingRef};

/// Largest square size accepted by [`Mat::det`].
pub const DET_SIZE_LIMIT: usize = 12;
/// Largest square size accepted by [`Mat::inverse`].
pub const INVERSE_SIZE_LIMIT: usize = 24;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    ring: RingRef,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} over {}", self.rows, self.cols, self.ring)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.ring.format(self.get(i, j))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Which standard bilinear form a frame is measured against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormKind {
    None,
    SymplecticPsi(usize),
    OrthogonalPhi(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    GL,
    SL,
    Sp,
    O,
    SO,
}

impl Mat {
    pub fn new(ring: &RingRef, rows: usize, cols: usize, data: Vec<Elem>) -> Result<Mat> {
        if rows == 0 || cols == 0 || rows * cols != data.len() {
            return Err(Error::ShapeMismatch(format!("{}x{} with {} entries", rows, cols, data.len())));
        }
        for e in &data {
            ring.check(e)?;
        }
        Ok(Mat { ring: ring.clone(), rows, cols, data })
    }

    /// Build from nested rows. Every row must have the same length.
    pub fn from_rows(ring: &RingRef, rows: Vec<Vec<Elem>>) -> Result<Mat> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Mat::new(ring, r, c, rows.into_iter().flatten().collect())
    }

    /// Build from small integers, mapped into the ring.
    pub fn from_i64(ring: &RingRef, rows: &[&[i64]]) -> Mat {
        let data: Vec<Vec<Elem>> = rows.iter().map(|r| r.iter().map(|&x| ring.from_i64(x)).collect()).collect();
        Mat::from_rows(ring, data).expect("well-formed integer matrix")
    }

    pub(crate) fn from_parts(ring: &RingRef, rows: usize, cols: usize, data: Vec<Elem>) -> Mat {
        debug_assert_eq!(rows * cols, data.len());
        Mat { ring: ring.clone(), rows, cols, data }
    }

    pub fn zeros(ring: &RingRef, rows: usize, cols: usize) -> Mat {
        Mat::from_parts(ring, rows, cols, vec![ring.zero(); rows * cols])
    }

    pub fn identity(ring: &RingRef, n: usize) -> Mat {
        let mut m = Mat::zeros(ring, n, n);
        for i in 0..n {
            m.data[i * n + i] = ring.one();
        }
        m
    }

    /// `[I_n | 0]`, an n×m matrix.
    pub fn standard_frame(ring: &RingRef, n: usize, m: usize) -> Mat {
        let mut a = Mat::zeros(ring, n, m);
        for i in 0..n.min(m) {
            a.data[i * m + i] = ring.one();
        }
        a
    }

    /// The symplectic form ψ_n of size 2n.
    pub fn psi(ring: &RingRef, n: usize) -> Mat {
        let mut a = Mat::zeros(ring, 2 * n, 2 * n);
        for k in 0..n {
            a.set(2 * k, 2 * k + 1, ring.one());
            a.set(2 * k + 1, 2 * k, ring.from_i64(-1));
        }
        a
    }

    /// The split orthogonal form φ_n of size 2n.
    pub fn phi(ring: &RingRef, n: usize) -> Mat {
        let mut a = Mat::zeros(ring, 2 * n, 2 * n);
        for k in 0..n {
            a.set(2 * k, 2 * k + 1, ring.one());
            a.set(2 * k + 1, 2 * k, ring.one());
        }
        a
    }

    pub fn form(ring: &RingRef, kind: FormKind) -> Option<Mat> {
        match kind {
            FormKind::None => None,
            FormKind::SymplecticPsi(n) => Some(Mat::psi(ring, n)),
            FormKind::OrthogonalPhi(n) => Some(Mat::phi(ring, n)),
        }
    }

    pub fn diag(ring: &RingRef, d: &[Elem]) -> Mat {
        let n = d.len();
        let mut a = Mat::zeros(ring, n, n);
        for (i, x) in d.iter().enumerate() {
            a.data[i * n + i] = x.clone();
        }
        a
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Elem] {
        &self.data
    }

    pub fn row_vec(&self, i: usize) -> Vec<Elem> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col_vec(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|i| self.row_vec(i)).collect()
    }

    /// Rows `r0..r1` and columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Mat {
        let mut data = Vec::with_capacity((r1 - r0) * (c1 - c0));
        for i in r0..r1 {
            data.extend_from_slice(&self.data[i * self.cols + c0..i * self.cols + c1]);
        }
        Mat::from_parts(&self.ring, r1 - r0, c1 - c0, data)
    }

    pub fn top_rows(&self, n: usize) -> Mat {
        self.submatrix(0, n, 0, self.cols)
    }

    fn same_ring(&self, other: &Mat) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::DescriptorMismatch(format!("{} vs {}", self.ring, other.ring)));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        self.same_ring(other)?;
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let r = &self.ring;
        let mut out = Mat::zeros(r, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if r.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if r.is_zero(b) {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.data[idx] = r.add(&out.data[idx], &r.mul(a, b)?);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        self.same_ring(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::ShapeMismatch("addition of different shapes".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| self.ring.add(a, b)).collect();
        Ok(Mat::from_parts(&self.ring, self.rows, self.cols, data))
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Mat {
        let data = self.data.iter().map(|a| self.ring.neg(a)).collect();
        Mat::from_parts(&self.ring, self.rows, self.cols, data)
    }

    pub fn scale(&self, c: &Elem) -> Result<Mat> {
        let data = self.data.iter().map(|a| self.ring.mul(c, a)).collect::<Result<_>>()?;
        Ok(Mat::from_parts(&self.ring, self.rows, self.cols, data))
    }

    pub fn transpose(&self) -> Mat {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Mat::from_parts(&self.ring, self.cols, self.rows, data)
    }

    /// Block diagonal sum `self ⊥ other`.
    pub fn block_perp(&self, other: &Mat) -> Result<Mat> {
        self.same_ring(other)?;
        let (r, c) = (self.rows + other.rows, self.cols + other.cols);
        let mut out = Mat::zeros(&self.ring, r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        Ok(out)
    }

    /// `self ⊥ I_k`.
    pub fn pad_identity(&self, k: usize) -> Mat {
        if k == 0 {
            return self.clone();
        }
        self.block_perp(&Mat::identity(&self.ring, k)).expect("same ring")
    }

    /// Stack `self` above `other`.
    pub fn vstack(&self, other: &Mat) -> Result<Mat> {
        self.same_ring(other)?;
        if self.cols != other.cols {
            return Err(Error::ShapeMismatch("vstack of different widths".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Mat::from_parts(&self.ring, self.rows + other.rows, self.cols, data))
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Mat::identity(&self.ring, self.rows)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| self.ring.is_zero(a))
    }

    /// Apply `f` entrywise, landing in `target`.
    pub fn map(&self, target: &RingRef, f: impl Fn(&Elem) -> Result<Elem>) -> Result<Mat> {
        let data = self.data.iter().map(f).collect::<Result<Vec<_>>>()?;
        Mat::new(target, self.rows, self.cols, data)
    }

    /// For a matrix over `R[T]`: substitute `t ∈ R` into every entry.
    pub fn substitute(&self, t: &Elem) -> Result<Mat> {
        let base = self
            .ring
            .poly_base()
            .ok_or_else(|| Error::DescriptorMismatch(format!("{} is not a polynomial ring", self.ring)))?
            .clone();
        self.map(&base, |e| self.ring.substitute(e, t))
    }

    /// Embed a matrix over `R` as a constant matrix over `R[T]` (or `R_s`).
    pub fn embed_into(&self, target: &RingRef) -> Result<Mat> {
        if target == &self.ring {
            return Ok(self.clone());
        }
        if target.base() != Some(&self.ring) {
            return Err(Error::DescriptorMismatch(format!("{} does not extend {}", target, self.ring)));
        }
        self.map(target, |e| target.embed_base(e))
    }

    // ---- elementary operations in place ----

    /// column `dst` += column `src` · z
    pub fn col_axpy(&mut self, dst: usize, src: usize, z: &Elem) -> Result<()> {
        if self.ring.is_zero(z) {
            return Ok(());
        }
        for i in 0..self.rows {
            let s = self.get(i, src);
            if self.ring.is_zero(s) {
                continue;
            }
            let t = self.ring.mul(s, z)?;
            let idx = i * self.cols + dst;
            self.data[idx] = self.ring.add(&self.data[idx], &t);
        }
        Ok(())
    }

    /// row `dst` += z · row `src`
    pub fn row_axpy(&mut self, dst: usize, src: usize, z: &Elem) -> Result<()> {
        if self.ring.is_zero(z) {
            return Ok(());
        }
        for j in 0..self.cols {
            let s = self.get(src, j);
            if self.ring.is_zero(s) {
                continue;
            }
            let t = self.ring.mul(z, s)?;
            let idx = dst * self.cols + j;
            self.data[idx] = self.ring.add(&self.data[idx], &t);
        }
        Ok(())
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub fn scale_col(&mut self, j: usize, z: &Elem) -> Result<()> {
        for i in 0..self.rows {
            let idx = i * self.cols + j;
            self.data[idx] = self.ring.mul(&self.data[idx], z)?;
        }
        Ok(())
    }

    // ---- determinant and inverse ----

    pub fn det(&self) -> Result<Elem> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("determinant of a non-square matrix".into()));
        }
        if self.rows > DET_SIZE_LIMIT {
            return Err(Error::SizeLimit(format!("det of size {} > {}", self.rows, DET_SIZE_LIMIT)));
        }
        if self.ring.is_domain() {
            if let Some(d) = self.det_bareiss()? {
                return Ok(d);
            }
        }
        let c = self.charpoly()?;
        let n = self.rows;
        let d = c[n].clone();
        Ok(if n % 2 == 1 { self.ring.neg(&d) } else { d })
    }

    /// Fraction-free elimination. `None` when an exact quotient could not be
    /// computed, in which case the caller falls back to the division-free path.
    fn det_bareiss(&self) -> Result<Option<Elem>> {
        let r = &self.ring;
        let n = self.rows;
        let mut a = self.to_rows();
        let mut sign = false;
        let mut prev = r.one();
        for k in 0..n.saturating_sub(1) {
            if r.is_zero(&a[k][k]) {
                match (k + 1..n).find(|&i| !r.is_zero(&a[i][k])) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = !sign;
                    }
                    None => return Ok(Some(r.zero())),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = r.sub(&r.mul(&a[i][j], &a[k][k])?, &r.mul(&a[i][k], &a[k][j])?);
                    a[i][j] = match r.div_exact(&num, &prev) {
                        Some(q) => q,
                        None => return Ok(None),
                    };
                }
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].clone();
        Ok(Some(if sign { r.neg(&d) } else { d }))
    }

    /// Coefficients `c_0 = 1, c_1, …, c_n` of `det(tI − A) = Σ c_k t^{n−k}`,
    /// computed without division.
    pub fn charpoly(&self) -> Result<Vec<Elem>> {
        let r = &self.ring;
        let n = self.rows;
        let mut v = vec![r.one()];
        for k in 0..n {
            // Leading k×k block, row and column borders, corner.
            let akk = self.get(k, k);
            let mut t = vec![r.one(), r.neg(akk)];
            let mut col: Vec<Elem> = (0..k).map(|i| self.get(i, k).clone()).collect();
            for _ in 0..k {
                let mut s = r.zero();
                for j in 0..k {
                    s = r.add(&s, &r.mul(self.get(k, j), &col[j])?);
                }
                t.push(r.neg(&s));
                let mut next = vec![r.zero(); k];
                for (i, slot) in next.iter_mut().enumerate() {
                    for j in 0..k {
                        *slot = r.add(slot, &r.mul(self.get(i, j), &col[j])?);
                    }
                }
                col = next;
            }
            let mut w = vec![r.zero(); k + 2];
            for (i, wi) in w.iter_mut().enumerate() {
                for j in 0..=i.min(k) {
                    if i - j < t.len() {
                        *wi = r.add(wi, &r.mul(&t[i - j], &v[j])?);
                    }
                }
            }
            v = w;
        }
        Ok(v)
    }

    /// Inverse through Cayley–Hamilton; works over any commutative ring.
    pub fn inverse(&self) -> Result<Mat> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        if n > INVERSE_SIZE_LIMIT {
            return Err(Error::SizeLimit(format!("inverse of size {} > {}", n, INVERSE_SIZE_LIMIT)));
        }
        let r = &self.ring;
        let c = self.charpoly()?;
        if !r.is_unit(&c[n]) {
            return Err(Error::NotInvertible);
        }
        // A^{-1} = −c_n^{-1} (A^{n−1} + c_1 A^{n−2} + … + c_{n−1} I)
        let mut acc = Mat::identity(r, n);
        for ck in c.iter().take(n).skip(1) {
            acc = self.mul(&acc)?.add(&Mat::identity(r, n).scale(ck)?)?;
        }
        let k = r.neg(&r.inverse(&c[n])?);
        acc.scale(&k)
    }

    // ---- group membership ----

    pub fn membership(&self, group: Group) -> Result<bool> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("membership of a non-square matrix".into()));
        }
        let r = &self.ring;
        let even = || {
            if self.rows % 2 == 1 {
                Err(Error::ShapeMismatch("form groups need even size".into()))
            } else {
                Ok(self.rows / 2)
            }
        };
        match group {
            Group::GL => Ok(r.is_unit(&self.det()?)),
            Group::SL => Ok(r.is_one(&self.det()?)),
            Group::Sp => {
                let m = even()?;
                self.preserves(&Mat::psi(r, m))
            }
            Group::O | Group::SO => {
                let m = even()?;
                if !r.half_invertible() {
                    return Err(Error::HalfNotInvertible);
                }
                if !self.preserves(&Mat::phi(r, m))? {
                    return Ok(false);
                }
                Ok(group == Group::O || r.is_one(&self.det()?))
            }
        }
    }

    /// αᵗ F α = F
    pub fn preserves(&self, form: &Mat) -> Result<bool> {
        Ok(self.transpose().mul(form)?.mul(self)? == *form)
    }

    /// V F_m Vᵗ
    pub fn gram(&self, form: &Mat) -> Result<Mat> {
        self.mul(form)?.mul(&self.transpose())
    }

    // ---- right inverses ----

    pub fn right_inverse(&self) -> Result<RightInverseCert> {
        if self.rows > self.cols {
            return Err(Error::NotRightInvertible);
        }
        let beta = right_inverse_of(self)?;
        RightInverseCert::new(self.clone(), beta)
    }
}

fn right_inverse_of(a: &Mat) -> Result<Mat> {
    let ring = a.ring();
    match ring.descriptor() {
        _ if ring.is_local() => local_right_inverse(a),
        Descriptor::Integers => integer_right_inverse(a),
        _ if ring.residue_modulus().is_some() && !matches!(ring.descriptor(), Descriptor::Fraction { .. }) => {
            crt_right_inverse(a)
        }
        _ => Err(Error::UnsupportedRing(format!("no right-inverse solver over {}", ring))),
    }
}

/// Column elimination to `[I | 0]` with unit pivots, tracking the operations.
fn local_right_inverse(a: &Mat) -> Result<Mat> {
    let r = a.ring().clone();
    let (n, m) = (a.rows(), a.cols());
    let mut w = a.clone();
    let mut ops = Mat::identity(&r, m);
    for i in 0..n {
        let p = (i..m).find(|&j| r.is_unit(w.get(i, j))).ok_or(Error::NotRightInvertible)?;
        if p != i {
            w.swap_cols(i, p);
            ops.swap_cols(i, p);
        }
        let inv = r.inverse(w.get(i, i))?;
        w.scale_col(i, &inv)?;
        ops.scale_col(i, &inv)?;
        for k in 0..m {
            if k != i {
                let z = r.neg(w.get(i, k));
                w.col_axpy(k, i, &z)?;
                ops.col_axpy(k, i, &z)?;
            }
        }
    }
    Ok(ops.submatrix(0, m, 0, n))
}

/// Euclidean column operations over Z.
fn integer_right_inverse(a: &Mat) -> Result<Mat> {
    let r = a.ring().clone();
    let (n, m) = (a.rows(), a.cols());
    let mut w = a.clone();
    let mut ops = Mat::identity(&r, m);
    let int = |e: &Elem| e.as_int().unwrap().clone();
    for i in 0..n {
        for j in i + 1..m {
            let (x, y) = (int(w.get(i, i)), int(w.get(i, j)));
            if y.is_zero() {
                continue;
            }
            let (g, s, t) = xgcd(&x, &y);
            // [col_i, col_j] ← [s·col_i + t·col_j, −(y/g)·col_i + (x/g)·col_j]
            let (yg, xg) = (&y / &g, &x / &g);
            for mat in [&mut w, &mut ops] {
                let ci = mat.col_vec(i);
                let cj = mat.col_vec(j);
                for row in 0..mat.rows() {
                    let (u, v) = (int(&ci[row]), int(&cj[row]));
                    mat.set(row, i, Elem::Int(&s * &u + &t * &v));
                    mat.set(row, j, Elem::Int(-&yg * &u + &xg * &v));
                }
            }
        }
        let piv = int(w.get(i, i));
        if piv.abs() != BigInt::from(1) {
            return Err(Error::NotRightInvertible);
        }
        let e = Elem::Int(piv);
        w.scale_col(i, &e)?;
        ops.scale_col(i, &e)?;
        for k in 0..m {
            if k != i {
                let z = r.neg(w.get(i, k));
                w.col_axpy(k, i, &z)?;
                ops.col_axpy(k, i, &z)?;
            }
        }
    }
    Ok(ops.submatrix(0, m, 0, n))
}

/// Solve modulo each prime-power factor and recombine.
fn crt_right_inverse(a: &Mat) -> Result<Mat> {
    let ring = a.ring().clone();
    let n = ring.residue_modulus().unwrap().clone();
    let mut combined: Option<(BigInt, Vec<BigInt>)> = None;
    for p in prime_factors(&n) {
        let mut q = BigInt::from(1);
        while (&n % (&q * &p)).is_zero() {
            q *= &p;
        }
        let q64: u64 = (&q).try_into().map_err(|_| Error::UnsupportedRing("modulus too large".into()))?;
        let local = Ring::modular(q64)?;
        let a_loc = a.map(&local, |e| Ok(local.from_bigint(e.as_int().unwrap())))?;
        let b = local_right_inverse(&a_loc)?;
        let vals: Vec<BigInt> = b.entries().iter().map(|e| e.as_int().unwrap().clone()).collect();
        combined = Some(match combined {
            None => (q, vals),
            Some((m0, v0)) => {
                let (_, s, _) = xgcd(&m0, &q);
                let m1 = &m0 * &q;
                let v = v0
                    .iter()
                    .zip(&vals)
                    .map(|(x, y)| {
                        use num_integer::Integer;
                        (x + &m0 * (&s * (y - x))).mod_floor(&m1)
                    })
                    .collect();
                (m1, v)
            }
        });
    }
    let (_, vals) = combined.expect("modulus has a prime factor");
    let data = vals.iter().map(|v| ring.from_bigint(v)).collect();
    Ok(Mat::from_parts(&ring, a.cols(), a.rows(), data))
}

/// `alpha · beta = I_n`, checked at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RightInverseCert {
    alpha: Mat,
    beta: Mat,
}

impl RightInverseCert {
    pub fn new(alpha: Mat, beta: Mat) -> Result<RightInverseCert> {
        if !alpha.mul(&beta)?.is_identity() {
            return Err(Error::NotRightInvertible);
        }
        Ok(RightInverseCert { alpha, beta })
    }

    pub fn alpha(&self) -> &Mat {
        &self.alpha
    }

    pub fn beta(&self) -> &Mat {
        &self.beta
    }
}

/// A 2n×2m matrix V with V F_m Vᵗ = F_n for the standard form F.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotropicFrame {
    v: Mat,
    kind: FormKind,
}

impl IsotropicFrame {
    /// `kind` should be `SymplecticPsi(_)` or `OrthogonalPhi(_)`; its size
    /// argument is ignored and recomputed from the shape of `v`.
    pub fn new(v: Mat, kind: FormKind) -> Result<IsotropicFrame> {
        if v.rows() % 2 == 1 || v.cols() % 2 == 1 || v.rows() > v.cols() {
            return Err(Error::ShapeMismatch(format!("frame of shape {}x{}", v.rows(), v.cols())));
        }
        let (n, m) = (v.rows() / 2, v.cols() / 2);
        let r = v.ring().clone();
        let (fm, fn_) = match kind {
            FormKind::SymplecticPsi(_) => (Mat::psi(&r, m), Mat::psi(&r, n)),
            FormKind::OrthogonalPhi(_) => {
                if !r.half_invertible() {
                    return Err(Error::HalfNotInvertible);
                }
                (Mat::phi(&r, m), Mat::phi(&r, n))
            }
            FormKind::None => return Err(Error::FormViolation("a frame needs a form".into())),
        };
        if v.gram(&fm)? != fn_ {
            return Err(Error::FormViolation("V F_m Vᵗ differs from F_n".into()));
        }
        let kind = match kind {
            FormKind::SymplecticPsi(_) => FormKind::SymplecticPsi(m),
            _ => FormKind::OrthogonalPhi(m),
        };
        Ok(IsotropicFrame { v, kind })
    }

    pub fn matrix(&self) -> &Mat {
        &self.v
    }

    pub fn kind(&self) -> FormKind {
        self.kind
    }

    /// (n, m) for a 2n×2m frame.
    pub fn half_shape(&self) -> (usize, usize) {
        (self.v.rows() / 2, self.v.cols() / 2)
    }

    /// The form identity yields β = F_m Vᵗ F_n^{-1} directly.
    pub fn right_inverse(&self) -> Result<RightInverseCert> {
        let r = self.v.ring();
        let (n, m) = self.half_shape();
        let (fm, fn_inv) = match self.kind {
            FormKind::SymplecticPsi(_) => (Mat::psi(r, m), Mat::psi(r, n).neg()),
            _ => (Mat::phi(r, m), Mat::phi(r, n)),
        };
        let beta = fm.mul(&self.v.transpose())?.mul(&fn_inv)?;
        RightInverseCert::new(self.v.clone(), beta)
    }
}

/// An element x + f of P ⊕ P* for free P, with q(x + f) = f(x).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperbolicVector {
    ring: RingRef,
    x: Vec<Elem>,
    f: Vec<Elem>,
    q: Elem,
}

impl HyperbolicVector {
    pub fn new(ring: &RingRef, x: Vec<Elem>, f: Vec<Elem>) -> Result<HyperbolicVector> {
        if x.len() != f.len() {
            return Err(Error::ShapeMismatch("x and f parts differ in rank".into()));
        }
        let q = pairing(ring, &f, &x)?;
        Ok(HyperbolicVector { ring: ring.clone(), x, f, q })
    }

    pub fn q(&self) -> &Elem {
        &self.q
    }

    pub fn rank(&self) -> usize {
        self.x.len()
    }

    /// B(w1, w2) = f1(x2) + f2(x1)
    pub fn bilinear(&self, other: &HyperbolicVector) -> Result<Elem> {
        let r = &self.ring;
        Ok(r.add(&pairing(r, &self.f, &other.x)?, &pairing(r, &other.f, &self.x)?))
    }
}

fn pairing(r: &Ring, f: &[Elem], x: &[Elem]) -> Result<Elem> {
    let mut s = r.zero();
    for (a, b) in f.iter().zip(x) {
        s = r.add(&s, &r.mul(a, b)?);
    }
    Ok(s)
}

/// q(w1) = 1, q(w2) = −1 and B(w1, w2) = 0.
pub fn hyperbolic_pair_check(w1: &HyperbolicVector, w2: &HyperbolicVector) -> bool {
    if w1.rank() != w2.rank() || w1.ring != w2.ring {
        return false;
    }
    let r = &w1.ring;
    let Ok(b) = w1.bilinear(w2) else { return false };
    r.is_one(&w1.q) && w2.q == r.from_i64(-1) && r.is_zero(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64) -> RingRef {
        Ring::modular(n).unwrap()
    }

    #[test]
    fn forms_and_blocks() {
        let r = Ring::integers();
        assert_eq!(Mat::psi(&r, 1).block_perp(&Mat::psi(&r, 1)).unwrap(), Mat::psi(&r, 2));
        for n in 1..=6 {
            let p = Mat::psi(&r, n);
            let f = Mat::phi(&r, n);
            assert_eq!(p.transpose(), p.neg());
            assert_eq!(f.transpose(), f);
            assert_eq!(p.det().unwrap(), Elem::int(1));
            let d = f.det().unwrap();
            assert_eq!(r.mul(&d, &d).unwrap(), Elem::int(1));
        }
        assert_eq!(Mat::identity(&r, 3).det().unwrap(), Elem::int(1));
    }

    #[test]
    fn det_over_zero_divisors_matches_domain_path() {
        let r4 = z(4);
        let a = Mat::from_i64(&r4, &[&[2, 1, 3], &[1, 2, 0], &[3, 3, 1]]);
        let zz = Ring::integers();
        let b = Mat::from_i64(&zz, &[&[2, 1, 3], &[1, 2, 0], &[3, 3, 1]]);
        let dz = b.det().unwrap().as_int().unwrap().clone();
        assert_eq!(a.det().unwrap(), r4.from_bigint(&dz));
    }

    #[test]
    fn o2_membership() {
        let r = z(5);
        let d = Mat::from_i64(&r, &[&[2, 0], &[0, 3]]);
        assert!(d.membership(Group::O).unwrap() && d.membership(Group::SO).unwrap());
        let a = Mat::from_i64(&r, &[&[0, 2], &[3, 0]]);
        assert!(a.membership(Group::O).unwrap() && !a.membership(Group::SO).unwrap());
        assert_eq!(Mat::identity(&z(4), 2).membership(Group::O), Err(Error::HalfNotInvertible));
        assert!(Mat::identity(&r, 4).membership(Group::Sp).unwrap());
    }

    #[test]
    fn right_inverses() {
        let r = z(4);
        let a = Mat::from_i64(&r, &[&[1, 0, 0], &[0, 1, 0]]);
        assert_eq!(a.right_inverse().unwrap().beta(), &a.transpose());
        let row = Mat::from_i64(&r, &[&[2, 3, 0]]);
        assert!(row.right_inverse().is_ok());
        assert_eq!(Mat::from_i64(&r, &[&[2, 2]]).right_inverse(), Err(Error::NotRightInvertible));

        let r6 = z(6);
        assert!(Mat::from_i64(&r6, &[&[2, 3]]).right_inverse().is_ok());
        assert!(Mat::from_i64(&Ring::integers(), &[&[6, 10, 15]]).right_inverse().is_ok());
        let p = Ring::poly(&r, "T");
        assert!(matches!(Mat::identity(&p, 2).right_inverse(), Err(Error::UnsupportedRing(_))));
    }

    #[test]
    fn inverse_by_cayley_hamilton() {
        let r = z(9);
        let a = Mat::from_i64(&r, &[&[1, 3, 2], &[0, 4, 1], &[5, 0, 7]]);
        if r.is_unit(&a.det().unwrap()) {
            assert!(a.mul(&a.inverse().unwrap()).unwrap().is_identity());
        }
        let b = Mat::from_i64(&r, &[&[3, 0], &[0, 1]]);
        assert_eq!(b.inverse(), Err(Error::NotInvertible));
    }

    #[test]
    fn hyperbolic_pairs() {
        let r = z(5);
        let v = |x: i64, f: i64| HyperbolicVector::new(&r, vec![r.from_i64(x)], vec![r.from_i64(f)]).unwrap();
        assert!(hyperbolic_pair_check(&v(1, 1), &v(1, -1)));
        assert!(!hyperbolic_pair_check(&v(1, 1), &v(1, 1)));
        assert!(!hyperbolic_pair_check(&v(0, 1), &v(1, -1)));
    }
}
