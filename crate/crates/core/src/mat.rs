//! Square matrices over a table-driven scalar domain (a residue field or a
//! length-two local ring), plus exact dense linear algebra over F_q.
//!
//! Entries are scalar indices (`u16`). A matrix packs into a `u128` key in
//! base `radix = |scalars|`, which is what all the hash-set orbit machinery
//! runs on.

use crate::error::{Error, Result};
use crate::field::Fq;
use crate::ring::LocalRing;

/// Common interface of F_q and O_2 as coefficient domains.
pub trait Scalars: Sync + Send + std::fmt::Debug {
    fn size(&self) -> usize;
    fn one(&self) -> u16;
    fn add(&self, a: u16, b: u16) -> u16;
    fn neg(&self, a: u16) -> u16;
    fn mul(&self, a: u16, b: u16) -> u16;
    fn inv(&self, a: u16) -> Option<u16>;
    fn is_unit(&self, a: u16) -> bool {
        self.inv(a).is_some()
    }
    fn sub(&self, a: u16, b: u16) -> u16 {
        self.add(a, self.neg(b))
    }
}

impl Scalars for Fq {
    fn size(&self) -> usize {
        self.q as usize
    }
    fn one(&self) -> u16 {
        1
    }
    fn add(&self, a: u16, b: u16) -> u16 {
        Fq::add(self, a, b)
    }
    fn neg(&self, a: u16) -> u16 {
        Fq::neg(self, a)
    }
    fn mul(&self, a: u16, b: u16) -> u16 {
        Fq::mul(self, a, b)
    }
    fn inv(&self, a: u16) -> Option<u16> {
        Fq::inv(self, a)
    }
    fn is_unit(&self, a: u16) -> bool {
        a != 0
    }
}

impl Scalars for LocalRing {
    fn size(&self) -> usize {
        LocalRing::size(self)
    }
    fn one(&self) -> u16 {
        LocalRing::one(self)
    }
    fn add(&self, a: u16, b: u16) -> u16 {
        LocalRing::add(self, a, b)
    }
    fn neg(&self, a: u16) -> u16 {
        LocalRing::neg(self, a)
    }
    fn mul(&self, a: u16, b: u16) -> u16 {
        LocalRing::mul(self, a, b)
    }
    fn inv(&self, a: u16) -> Option<u16> {
        LocalRing::inv(self, a)
    }
    fn is_unit(&self, a: u16) -> bool {
        LocalRing::is_unit(self, a)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mat {
    pub n: usize,
    pub e: Vec<u16>,
}

impl Mat {
    pub fn zero(n: usize) -> Mat {
        Mat { n, e: vec![0; n * n] }
    }

    pub fn identity<S: Scalars>(n: usize, s: &S) -> Mat {
        let mut m = Mat::zero(n);
        for i in 0..n {
            m.set(i, i, s.one());
        }
        m
    }

    pub fn scalar<S: Scalars>(n: usize, c: u16, _s: &S) -> Mat {
        let mut m = Mat::zero(n);
        for i in 0..n {
            m.set(i, i, c);
        }
        m
    }

    pub fn from_rows(rows: &[&[u16]]) -> Mat {
        let n = rows.len();
        let mut e = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n);
            e.extend_from_slice(r);
        }
        Mat { n, e }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> u16 {
        self.e[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u16) {
        self.e[i * self.n + j] = v;
    }

    pub fn is_identity<S: Scalars>(&self, s: &S) -> bool {
        self == &Mat::identity(self.n, s)
    }

    pub fn add<S: Scalars>(&self, o: &Mat, s: &S) -> Mat {
        debug_assert_eq!(self.n, o.n);
        Mat { n: self.n, e: self.e.iter().zip(&o.e).map(|(&a, &b)| s.add(a, b)).collect() }
    }

    pub fn sub<S: Scalars>(&self, o: &Mat, s: &S) -> Mat {
        debug_assert_eq!(self.n, o.n);
        Mat { n: self.n, e: self.e.iter().zip(&o.e).map(|(&a, &b)| s.sub(a, b)).collect() }
    }

    pub fn neg<S: Scalars>(&self, s: &S) -> Mat {
        Mat { n: self.n, e: self.e.iter().map(|&a| s.neg(a)).collect() }
    }

    pub fn smul<S: Scalars>(&self, c: u16, s: &S) -> Mat {
        Mat { n: self.n, e: self.e.iter().map(|&a| s.mul(c, a)).collect() }
    }

    pub fn mul<S: Scalars>(&self, o: &Mat, s: &S) -> Mat {
        let n = self.n;
        debug_assert_eq!(n, o.n);
        let mut out = Mat::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.at(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let t = s.mul(a, o.at(k, j));
                    out.set(i, j, s.add(out.at(i, j), t));
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let n = self.n;
        let mut out = Mat::zero(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.at(i, j));
            }
        }
        out
    }

    /// Entrywise map (used for sigma and reductions).
    pub fn map(&self, f: impl Fn(u16) -> u16) -> Mat {
        Mat { n: self.n, e: self.e.iter().map(|&a| f(a)).collect() }
    }

    pub fn trace<S: Scalars>(&self, s: &S) -> u16 {
        let mut t = 0;
        for i in 0..self.n {
            t = s.add(t, self.at(i, i));
        }
        t
    }

    /// Base-radix packing; the fixed total order on matrices is key order.
    pub fn key(&self, radix: u16) -> u128 {
        let mut k: u128 = 0;
        for &v in self.e.iter().rev() {
            k = k * radix as u128 + v as u128;
        }
        k
    }

    pub fn from_key(mut k: u128, radix: u16, n: usize) -> Mat {
        let mut e = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            e.push((k % radix as u128) as u16);
            k /= radix as u128;
        }
        Mat { n, e }
    }

    /// Determinant: closed formulas for n <= 3, elimination with unit
    /// pivots beyond, with cofactor expansion when a column has no unit
    /// (over a local ring such entries are all in the maximal ideal).
    pub fn det<S: Scalars>(&self, s: &S) -> u16 {
        match self.n {
            0 => s.one(),
            1 => self.at(0, 0),
            2 => s.sub(s.mul(self.at(0, 0), self.at(1, 1)), s.mul(self.at(0, 1), self.at(1, 0))),
            3 => {
                let m = |i: usize, j: usize| self.at(i, j);
                let t1 = s.mul(m(0, 0), s.sub(s.mul(m(1, 1), m(2, 2)), s.mul(m(1, 2), m(2, 1))));
                let t2 = s.mul(m(0, 1), s.sub(s.mul(m(1, 0), m(2, 2)), s.mul(m(1, 2), m(2, 0))));
                let t3 = s.mul(m(0, 2), s.sub(s.mul(m(1, 0), m(2, 1)), s.mul(m(1, 1), m(2, 0))));
                s.add(s.sub(t1, t2), t3)
            }
            _ => det_general(self, s),
        }
    }

    pub fn inverse<S: Scalars>(&self, s: &S) -> Option<Mat> {
        let n = self.n;
        let mut a = self.clone();
        let mut b = Mat::identity(n, s);
        for col in 0..n {
            let piv = (col..n).find(|&r| s.is_unit(a.at(r, col)))?;
            if piv != col {
                for j in 0..n {
                    let (x, y) = (a.at(col, j), a.at(piv, j));
                    a.set(col, j, y);
                    a.set(piv, j, x);
                    let (x, y) = (b.at(col, j), b.at(piv, j));
                    b.set(col, j, y);
                    b.set(piv, j, x);
                }
            }
            let pi = s.inv(a.at(col, col)).unwrap();
            for j in 0..n {
                a.set(col, j, s.mul(pi, a.at(col, j)));
                b.set(col, j, s.mul(pi, b.at(col, j)));
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.at(r, col);
                if f == 0 {
                    continue;
                }
                for j in 0..n {
                    a.set(r, j, s.sub(a.at(r, j), s.mul(f, a.at(col, j))));
                    b.set(r, j, s.sub(b.at(r, j), s.mul(f, b.at(col, j))));
                }
            }
        }
        Some(b)
    }

    /// g * self * g^-1 with the inverse supplied by the caller.
    pub fn conj_by<S: Scalars>(&self, g: &Mat, ginv: &Mat, s: &S) -> Mat {
        g.mul(self, s).mul(ginv, s)
    }
}

fn det_general<S: Scalars>(m: &Mat, s: &S) -> u16 {
    let n = m.n;
    if n == 3 || n < 3 {
        return m.det(s);
    }
    let mut a = m.clone();
    let mut acc = s.one();
    let mut negate = false;
    for col in 0..n {
        match (col..n).find(|&r| s.is_unit(a.at(r, col))) {
            Some(piv) => {
                if piv != col {
                    for j in 0..n {
                        let (x, y) = (a.at(col, j), a.at(piv, j));
                        a.set(col, j, y);
                        a.set(piv, j, x);
                    }
                    negate = !negate;
                }
                let d = a.at(col, col);
                acc = s.mul(acc, d);
                let di = s.inv(d).unwrap();
                for r in col + 1..n {
                    let f = s.mul(a.at(r, col), di);
                    if f == 0 {
                        continue;
                    }
                    for j in col..n {
                        a.set(r, j, s.sub(a.at(r, j), s.mul(f, a.at(col, j))));
                    }
                }
            }
            None => {
                // whole column is non-unit torsion: expand along it
                let mut total = 0u16;
                for r in col..n {
                    let c = a.at(r, col);
                    if c == 0 {
                        continue;
                    }
                    let minor = submatrix(&a, col, n, r, col);
                    let md = minor.det(s);
                    let term = s.mul(c, md);
                    let sign_flip = (r - col) % 2 == 1;
                    total = if sign_flip { s.sub(total, term) } else { s.add(total, term) };
                }
                let res = s.mul(acc, total);
                return if negate { s.neg(res) } else { res };
            }
        }
    }
    if negate {
        s.neg(acc)
    } else {
        acc
    }
}

/// Minor of the trailing block starting at `from`, deleting row `dr` and
/// column `dc` (absolute indices).
fn submatrix(a: &Mat, from: usize, n: usize, dr: usize, dc: usize) -> Mat {
    let keep: Vec<usize> = (from..n).collect();
    let rows: Vec<usize> = keep.iter().copied().filter(|&r| r != dr).collect();
    let cols: Vec<usize> = keep.iter().copied().filter(|&c| c != dc).collect();
    let k = rows.len();
    let mut out = Mat::zero(k);
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            out.set(i, j, a.at(r, c));
        }
    }
    out
}

// ---------------------------------------------------------------------
// dense rectangular linear algebra over F_q
// ---------------------------------------------------------------------

/// Rectangular matrix over a field, for kernels and solves.
#[derive(Clone, Debug)]
pub struct FMat {
    pub rows: usize,
    pub cols: usize,
    pub d: Vec<u16>,
}

impl FMat {
    pub fn zero(rows: usize, cols: usize) -> FMat {
        FMat { rows, cols, d: vec![0; rows * cols] }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> u16 {
        self.d[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u16) {
        self.d[i * self.cols + j] = v;
    }

    /// In-place reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self, f: &Fq) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| self.at(r, col) != 0) else {
                continue;
            };
            if pr != row {
                for j in 0..self.cols {
                    let (x, y) = (self.at(row, j), self.at(pr, j));
                    self.set(row, j, y);
                    self.set(pr, j, x);
                }
            }
            let inv = f.inv(self.at(row, col)).unwrap();
            for j in 0..self.cols {
                self.set(row, j, f.mul(inv, self.at(row, j)));
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let c = self.at(r, col);
                if c == 0 {
                    continue;
                }
                for j in 0..self.cols {
                    let t = f.sub(self.at(r, j), f.mul(c, self.at(row, j)));
                    self.set(r, j, t);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// Basis of the right kernel, deterministic (free variables in column
    /// order, each basis vector normalized with leading coefficient 1).
    pub fn kernel(&self, f: &Fq) -> Vec<Vec<u16>> {
        let mut m = self.clone();
        let pivots = m.rref(f);
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![0u16; self.cols];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(m.at(r, free));
            }
            basis.push(v);
        }
        basis
    }

    pub fn rank(&self, f: &Fq) -> usize {
        let mut m = self.clone();
        m.rref(f).len()
    }
}

/// Solve M x = rhs over F_q; particular solution with free variables set
/// to zero, or None when inconsistent.
pub fn solve(m: &FMat, rhs: &[u16], f: &Fq) -> Option<Vec<u16>> {
    assert_eq!(m.rows, rhs.len());
    let mut aug = FMat::zero(m.rows, m.cols + 1);
    for i in 0..m.rows {
        for j in 0..m.cols {
            aug.set(i, j, m.at(i, j));
        }
        aug.set(i, m.cols, rhs[i]);
    }
    let pivots = aug.rref(f);
    if pivots.contains(&m.cols) {
        return None;
    }
    let mut x = vec![0u16; m.cols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug.at(r, m.cols);
    }
    Some(x)
}

/// Lift a residue matrix entrywise through the multiplicative section.
pub fn lift_sections(m: &Mat, r: &LocalRing) -> Mat {
    m.map(|a| r.section(a))
}

/// Reduce a ring matrix to the residue field.
pub fn reduce_mat(m: &Mat, r: &LocalRing) -> Mat {
    m.map(|x| r.reduce(x))
}

/// For g in the kernel of reduction, recover X with g = I + pi X.
pub fn kernel_coordinate(g: &Mat, r: &LocalRing) -> Result<Mat> {
    let n = g.n;
    let mut x = Mat::zero(n);
    for i in 0..n {
        for j in 0..n {
            let d = r.sub(g.at(i, j), if i == j { r.one() } else { r.zero() });
            if r.coord_a(d) != 0 {
                return Err(Error::Internal("matrix is not in the reduction kernel".into()));
            }
            x.set(i, j, r.coord_b(d));
        }
    }
    Ok(x)
}

/// I + pi X for a residue matrix X.
pub fn one_plus_pi(x: &Mat, r: &LocalRing) -> Mat {
    let mut g = Mat::identity(x.n, r);
    for i in 0..x.n {
        for j in 0..x.n {
            if x.at(i, j) != 0 {
                g.set(i, j, r.add(g.at(i, j), r.pi_times(x.at(i, j))));
            }
        }
    }
    g
}

/// sigma applied entrywise followed by transpose (the star of the unitary
/// family), at ring level.
pub fn star_ring(m: &Mat, r: &LocalRing) -> Result<Mat> {
    let mut out = Mat::zero(m.n);
    for i in 0..m.n {
        for j in 0..m.n {
            out.set(j, i, r.sigma(m.at(i, j))?);
        }
    }
    Ok(out)
}

/// Star at residue level: x -> x^(q0) entrywise, then transpose.
pub fn star_field(m: &Mat, f: &Fq, base_m: u32) -> Mat {
    let mut out = Mat::zero(m.n);
    for i in 0..m.n {
        for j in 0..m.n {
            out.set(j, i, f.frob_k(m.at(i, j), base_m));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingKind;

    #[test]
    fn det_examples() {
        let f3 = Fq::new(3, 1).unwrap();
        let id = Mat::identity(3, &f3);
        assert_eq!(id.det(&f3), 1);

        let r = LocalRing::new(RingKind::Unramified, std::sync::Arc::new(Fq::new(3, 1).unwrap()), None).unwrap();
        let mut d = Mat::identity(3, &r);
        d.set(0, 0, r.pi());
        assert_eq!(d.det(&r), r.pi());

        // det over Z/9 of [[2,1],[1,2]] = 3
        let two = r.from_int(2).unwrap();
        let one = r.one();
        let m = Mat::from_rows(&[&[two, one], &[one, two]]);
        assert_eq!(r.to_int(m.det(&r)).unwrap(), 3);
    }

    #[test]
    fn det_multiplicative_on_random_ring_matrices() {
        let r = LocalRing::new(RingKind::Ramified, std::sync::Arc::new(Fq::new(3, 1).unwrap()), None).unwrap();
        let mut s = 1234usize;
        for n in [2usize, 3, 4] {
            for _ in 0..60 {
                let mut a = Mat::zero(n);
                let mut b = Mat::zero(n);
                for i in 0..n * n {
                    s = s.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
                    a.e[i] = (s % r.size()) as u16;
                    s = s.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
                    b.e[i] = (s % r.size()) as u16;
                }
                assert_eq!(a.mul(&b, &r).det(&r), r.mul(a.det(&r), b.det(&r)));
            }
        }
    }

    #[test]
    fn inverse_round_trip_over_ring() {
        let r = LocalRing::new(RingKind::Unramified, std::sync::Arc::new(Fq::new(3, 1).unwrap()), None).unwrap();
        let mut s = 77usize;
        let mut found = 0;
        while found < 40 {
            let mut a = Mat::zero(3);
            for i in 0..9 {
                s = s.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
                a.e[i] = (s % r.size()) as u16;
            }
            if let Some(inv) = a.inverse(&r) {
                assert!(a.mul(&inv, &r).is_identity(&r));
                assert!(inv.mul(&a, &r).is_identity(&r));
                found += 1;
            }
        }
    }

    #[test]
    fn key_round_trip() {
        let f9 = Fq::new(3, 2).unwrap();
        let m = Mat::from_rows(&[&[0, 5, 8], &[3, 1, 2], &[7, 7, 0]]);
        let k = m.key(f9.q);
        assert_eq!(Mat::from_key(k, f9.q, 3), m);
    }

    #[test]
    fn kernel_and_solve() {
        let f = Fq::new(3, 1).unwrap();
        // x + y + z = 0 over F_3 has kernel rank 2
        let mut m = FMat::zero(1, 3);
        m.set(0, 0, 1);
        m.set(0, 1, 1);
        m.set(0, 2, 1);
        let basis = m.kernel(&f);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert_eq!((v[0] + v[1] + v[2]) % 3, 0);
        }
        let sol = solve(&m, &[2], &f).unwrap();
        assert_eq!((sol[0] + sol[1] + sol[2]) % 3, 2);
        // inconsistent system
        let mut m2 = FMat::zero(2, 1);
        m2.set(0, 0, 1);
        m2.set(1, 0, 1);
        assert!(solve(&m2, &[1, 2], &f).is_none());
    }

    #[test]
    fn one_plus_pi_round_trip() {
        let r = LocalRing::new(RingKind::Ramified, std::sync::Arc::new(Fq::new(3, 1).unwrap()), None).unwrap();
        let x = Mat::from_rows(&[&[1, 2], &[0, 1]]);
        let g = one_plus_pi(&x, &r);
        assert_eq!(kernel_coordinate(&g, &r).unwrap(), x);
        assert_eq!(reduce_mat(&g, &r), Mat::identity(2, &*r.field));
    }
}
