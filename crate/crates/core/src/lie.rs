//! The subspaces M_C of n x n matrices over the residue field attached to
//! each classical family: the kernel of reduction C(O_2) -> C(O_1) is
//! isomorphic to M_C via X -> I + pi X.
//!
//! Defining conditions over O_1:
//!   O:  X + X^t = 0
//!   U:  X + X* = 0          (* = entrywise x -> x^q0, then transpose)
//!   Sp: X^t J + J X = 0     (J the standard alternating form)
//!   SL: tr X = 0
//!
//! Every space is handled as an F_p-vector space: bases are computed as
//! exact kernels of the defining map with F_p coefficients, which covers
//! the unitary family (an F_q-space sitting inside matrices over F_{q^2})
//! uniformly.

use std::sync::Arc;

use crate::config::Family;
use crate::error::{Error, Result};
use crate::field::Fq;
use crate::mat::{star_field, FMat, Mat};

/// J for the symplectic family: [[0, I], [-I, 0]].
pub fn symplectic_form(n_param: usize, f: &Fq) -> Mat {
    let n = 2 * n_param;
    let mut j = Mat::zero(n);
    for i in 0..n_param {
        j.set(i, n_param + i, 1);
        j.set(n_param + i, i, f.neg(1));
    }
    j
}

#[derive(Debug)]
pub struct LieSpace {
    pub family: Family,
    /// Group parameter n (for Sp, matrices have size 2n).
    pub n_param: usize,
    pub mat_n: usize,
    pub field: Arc<Fq>,
    /// Residue degree of the sigma-fixed base field (equals field.deg
    /// except for the unitary family, where field.deg = 2 * base_deg).
    pub base_deg: u32,
    /// F_p-basis of M_C.
    pub basis: Vec<Mat>,
    /// F_p-dimension.
    pub dim_p: usize,
    pub form_j: Option<Mat>,
}

impl LieSpace {
    /// The image of the defining linear map, as a matrix over F_p acting on
    /// digit coordinates of M_n(F).
    pub fn new(family: Family, n_param: usize, field: Arc<Fq>, base_deg: u32) -> Result<LieSpace> {
        let mat_n = family.mat_size(n_param);
        if n_param == 0 {
            return Err(Error::InvalidConfig("n must be positive".into()));
        }
        if family == Family::U && field.deg != 2 * base_deg {
            return Err(Error::InvalidConfig("unitary family needs the quadratic extension field".into()));
        }
        let f = &*field;
        let p = f.p;
        let fp = Fq::prime(p)?;
        let deg = f.deg as usize;
        let dim_amb = mat_n * mat_n * deg;
        let form_j = (family == Family::Sp).then(|| symplectic_form(n_param, f));

        // standard F_p-basis of M_n(F): unit matrix positions times power
        // basis elements of F
        let amb_basis: Vec<Mat> = (0..dim_amb)
            .map(|idx| {
                let (pos, d) = (idx / deg, idx % deg);
                let mut m = Mat::zero(mat_n);
                m.e[pos] = pow_basis(f, d as u32);
                m
            })
            .collect();

        let defining = |x: &Mat| -> Vec<u16> {
            match family {
                Family::O => x.add(&x.transpose(), f).e,
                Family::U => x.add(&star_field(x, f, base_deg), f).e,
                Family::Sp => {
                    let j = form_j.as_ref().unwrap();
                    x.transpose().mul(j, f).add(&j.mul(x, f), f).e
                }
                Family::Sl => vec![x.trace(f)],
            }
        };

        let out_len = defining(&Mat::zero(mat_n)).len() * deg;
        let mut sys = FMat::zero(out_len, dim_amb);
        for (col, b) in amb_basis.iter().enumerate() {
            let img = defining(b);
            for (k, &v) in img.iter().enumerate() {
                for d in 0..deg {
                    sys.set(k * deg + d, col, f.digit(v, d as u32));
                }
            }
        }
        let kernel = sys.kernel(&fp);
        let basis: Vec<Mat> = kernel
            .iter()
            .map(|coeffs| {
                let mut m = Mat::zero(mat_n);
                for (i, &c) in coeffs.iter().enumerate() {
                    if c != 0 {
                        m = m.add(&amb_basis[i].smul(f.from_prime(c), f), f);
                    }
                }
                m
            })
            .collect();
        let dim_p = basis.len();

        let expected = expected_dim_p(family, n_param, f.deg, base_deg);
        if dim_p != expected {
            return Err(Error::Internal(format!(
                "M_C dimension mismatch for {:?} n={n_param}: got {dim_p}, expected {expected}",
                family
            )));
        }

        Ok(LieSpace { family, n_param, mat_n, field, base_deg, basis, dim_p, form_j })
    }

    pub fn contains(&self, x: &Mat) -> bool {
        let f = &*self.field;
        match self.family {
            Family::O => x.add(&x.transpose(), f).e.iter().all(|&v| v == 0),
            Family::U => x.add(&star_field(x, f, self.base_deg), f).e.iter().all(|&v| v == 0),
            Family::Sp => {
                let j = self.form_j.as_ref().unwrap();
                x.transpose().mul(j, f).add(&j.mul(x, f), f).e.iter().all(|&v| v == 0)
            }
            Family::Sl => x.trace(f) == 0,
        }
    }

    /// Number of elements p^dim_p.
    pub fn order(&self) -> u64 {
        (self.field.p as u64).pow(self.dim_p as u32)
    }

    /// All elements, generated by the F_p odometer over the basis. Index
    /// order of the odometer is the enumeration order.
    pub fn enumerate(&self) -> Vec<Mat> {
        let p = self.field.p;
        let f = &*self.field;
        let mut out = Vec::with_capacity(self.order() as usize);
        let mut digits = vec![0u16; self.dim_p];
        loop {
            let mut m = Mat::zero(self.mat_n);
            for (i, &c) in digits.iter().enumerate() {
                if c != 0 {
                    m = m.add(&self.basis[i].smul(f.from_prime(c), f), f);
                }
            }
            out.push(m);
            let mut i = 0;
            loop {
                if i == self.dim_p {
                    return out;
                }
                digits[i] += 1;
                if digits[i] < p {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
        }
    }

    /// Basis of the radical {A in M_C : tr(AX) = 0 for all X in M_C},
    /// computed exactly over F_p.
    pub fn radical(&self) -> Vec<Mat> {
        let f = &*self.field;
        let fp = Fq::prime(f.p).unwrap();
        let deg = f.deg as usize;
        let dim = self.dim_p;
        // gram[i][j] = tr(B_i B_j) in F; radical vectors kill every column
        let mut sys = FMat::zero(dim * deg, dim);
        for (j, bj) in self.basis.iter().enumerate() {
            for (i, bi) in self.basis.iter().enumerate() {
                let t = trace_form(f, bi, bj);
                for d in 0..deg {
                    sys.set(j * deg + d, i, f.digit(t, d as u32));
                }
            }
        }
        sys.kernel(&fp)
            .iter()
            .map(|coeffs| {
                let mut m = Mat::zero(self.mat_n);
                for (i, &c) in coeffs.iter().enumerate() {
                    if c != 0 {
                        m = m.add(&self.basis[i].smul(f.from_prime(c), f), f);
                    }
                }
                m
            })
            .collect()
    }
}

fn pow_basis(f: &Fq, d: u32) -> u16 {
    // the element x^d, i.e. index p^d
    let mut v = 1u16;
    for _ in 0..d {
        v *= f.p;
    }
    v
}

fn expected_dim_p(family: Family, n: usize, deg: u32, base_deg: u32) -> usize {
    let d = deg as usize;
    match family {
        Family::O => d * n * (n - 1) / 2,
        Family::Sp => d * n * (2 * n + 1),
        Family::Sl => d * (n * n - 1),
        // F_q-dimension n^2, over the base field of degree base_deg
        Family::U => base_deg as usize * n * n,
    }
}

/// The symmetric bilinear pairing (A, B) -> tr(AB).
pub fn trace_form(f: &Fq, a: &Mat, b: &Mat) -> u16 {
    a.mul(b, f).trace(f)
}

// ---------------------------------------------------------------------
// scalar classes: Lambda = M_n(O_1) / {scalar matrices}
// ---------------------------------------------------------------------

/// An equivalence class [A] = {A + xI}; the stored representative is the
/// one with the least matrix key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarClass {
    pub rep: Mat,
}

impl ScalarClass {
    pub fn of(a: &Mat, f: &Fq) -> ScalarClass {
        let mut best = a.clone();
        let mut best_key = a.key(f.q);
        for x in 1..f.q {
            let cand = a.add(&Mat::scalar(a.n, x, f), f);
            let k = cand.key(f.q);
            if k < best_key {
                best_key = k;
                best = cand;
            }
        }
        ScalarClass { rep: best }
    }

    pub fn key(&self, f: &Fq) -> u128 {
        self.rep.key(f.q)
    }
}

/// Enumerate Lambda for n x n matrices over F_q: canonical representatives
/// in key order, plus a map from any matrix key to the class index.
pub fn lambda_classes(f: &Fq, n: usize) -> (Vec<Mat>, std::collections::HashMap<u128, u32>) {
    let total = (f.q as u64).pow((n * n) as u32);
    let mut reps: Vec<Mat> = Vec::new();
    let mut map = std::collections::HashMap::new();
    for key in 0..total {
        let m = Mat::from_key(key as u128, f.q, n);
        let canon = ScalarClass::of(&m, f);
        let ck = canon.key(f);
        let idx = match map.get(&ck) {
            Some(&i) => i,
            None => {
                let i = reps.len() as u32;
                reps.push(canon.rep.clone());
                map.insert(ck, i);
                i
            }
        };
        map.insert(m.key(f.q), idx);
    }
    (reps, map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Arc<Fq> {
        Arc::new(Fq::new(3, 1).unwrap())
    }

    #[test]
    fn o2_dimension_and_order() {
        let l = LieSpace::new(Family::O, 2, f3(), 1).unwrap();
        assert_eq!(l.dim_p, 1);
        assert_eq!(l.order(), 3);
        assert_eq!(l.enumerate().len(), 3);
    }

    #[test]
    fn sp1_basis_matches_block_shape() {
        let l = LieSpace::new(Family::Sp, 1, f3(), 1).unwrap();
        assert_eq!(l.dim_p, 3);
        let f = &*l.field;
        let expected = [
            Mat::from_rows(&[&[1, 0], &[0, f.neg(1)]]),
            Mat::from_rows(&[&[0, 1], &[0, 0]]),
            Mat::from_rows(&[&[0, 0], &[1, 0]]),
        ];
        for m in &expected {
            assert!(l.contains(m));
        }
        // and the three matrices are independent, so they span M_Sp
        let els: std::collections::HashSet<u128> =
            l.enumerate().iter().map(|m| m.key(f.q)).collect();
        for m in &expected {
            assert!(els.contains(&m.key(f.q)));
        }
    }

    #[test]
    fn sl3_dimension() {
        let l = LieSpace::new(Family::Sl, 3, f3(), 1).unwrap();
        assert_eq!(l.dim_p, 8);
        assert_eq!(l.order(), 6561);
    }

    #[test]
    fn u2_dimension_over_f9() {
        let f9 = Arc::new(Fq::new(3, 2).unwrap());
        let l = LieSpace::new(Family::U, 2, f9, 1).unwrap();
        assert_eq!(l.dim_p, 4);
        assert_eq!(l.order(), 81);
        for x in l.enumerate() {
            assert!(l.contains(&x));
        }
    }

    #[test]
    fn trace_form_examples() {
        let f = f3();
        let e12 = Mat::from_rows(&[&[0, 1], &[0, 0]]);
        let e21 = Mat::from_rows(&[&[0, 0], &[1, 0]]);
        assert_eq!(trace_form(&f, &e12, &e21), 1);
        let a = Mat::from_rows(&[&[1, 2], &[0, 2]]);
        let id = Mat::identity(2, &*f);
        assert_eq!(trace_form(&f, &a, &id), a.trace(&*f));
    }

    #[test]
    fn o_family_pairing_identity() {
        // for A in M_O and B = Y - Y^t: tr(AB) = 2 tr(AY), all A, random Y
        for n in [2usize, 3] {
            let f = f3();
            let l = LieSpace::new(Family::O, n, f.clone(), 1).unwrap();
            let mut s = 5usize;
            for a in l.enumerate() {
                for _ in 0..10 {
                    let mut y = Mat::zero(n);
                    for i in 0..n * n {
                        s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
                        y.e[i] = (s % f.q as usize) as u16;
                    }
                    let b = y.sub(&y.transpose(), &*f);
                    let lhs = trace_form(&f, &a, &b);
                    let rhs = f.mul(2, trace_form(&f, &a, &y));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn radicals_match_nondegeneracy() {
        let f = f3();
        assert!(LieSpace::new(Family::O, 2, f.clone(), 1).unwrap().radical().is_empty());
        assert!(LieSpace::new(Family::O, 3, f.clone(), 1).unwrap().radical().is_empty());
        assert!(LieSpace::new(Family::Sl, 2, f.clone(), 1).unwrap().radical().is_empty());
        // p | n: the radical is exactly the scalar line
        let l = LieSpace::new(Family::Sl, 3, f.clone(), 1).unwrap();
        let rad = l.radical();
        assert_eq!(rad.len(), 1);
        let r0 = &rad[0];
        assert!((1..3).any(|c| r0 == &Mat::scalar(3, c, &*f)));
    }

    #[test]
    fn scalar_class_basics() {
        let f = f3();
        let a = Mat::from_rows(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 0]]);
        let c1 = ScalarClass::of(&a, &f);
        let shifted = a.add(&Mat::scalar(3, 2, &*f), &*f);
        let c2 = ScalarClass::of(&shifted, &f);
        assert_eq!(c1, c2);
        let (reps, map) = lambda_classes(&f, 2);
        assert_eq!(reps.len(), 27); // q^{n^2-1}
        assert_eq!(map.get(&a.key(f.q)).is_some(), false); // 3x3 key not in 2x2 map
    }

    #[test]
    fn lambda_count_for_sl3() {
        let f = f3();
        let (reps, _) = lambda_classes(&f, 3);
        assert_eq!(reps.len(), 6561);
    }
}
