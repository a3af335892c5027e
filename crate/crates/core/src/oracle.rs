//! Brute-force character-degree engine for enumerated finite groups.
//!
//! Class multiplication coefficients are counted exactly, then the common
//! eigenvectors of the class matrices are found over a prime field F_l
//! with l = 1 (mod exp G), following Dixon's method (Dixon, Numer. Math.
//! 10 (1967); Schneider, J. Symb. Comput. 9 (1990)). Degrees come out of
//! the orthogonality normalization d^2 = |G| / sum_k w(k) w(k*) / |Cl_k|,
//! read off modulo l and pinned by l > 2 sqrt(|G|). Everything is exact;
//! no floating point enters at any stage.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::mat::Scalars;
use crate::par::maybe_par_range_map;

/// Conjugacy classes with their multiplication coefficients
/// a_{ijk} = #{(x, y) in Cl_i x Cl_j : xy = z_k}.
#[derive(Debug)]
pub struct ClassAlgebra {
    pub class_count: usize,
    pub sizes: Vec<u64>,
    pub inverse_class: Vec<u32>,
    /// Index of the class of the identity.
    pub identity_class: usize,
    /// Group exponent: lcm of the element orders.
    pub exponent: u64,
    /// coeffs[i][j * class_count + k] = a_{ijk}.
    pub coeffs: Vec<Vec<u64>>,
}

/// Budget guards for the oracle itself.
const MAX_CLASSES: usize = 300;
const MAX_ORACLE_GROUP: u64 = 200_000;

pub fn class_algebra<S: Scalars>(g: &FiniteGroup<S>) -> Result<ClassAlgebra> {
    if g.order() > MAX_ORACLE_GROUP {
        return Err(Error::Budget { what: "oracle group order", needed: g.order(), cap: MAX_ORACLE_GROUP });
    }
    let classes = g.classes();
    let kc = classes.reps.len();
    if kc > MAX_CLASSES {
        return Err(Error::Budget { what: "oracle class count", needed: kc as u64, cap: MAX_CLASSES as u64 });
    }
    let exponent = classes
        .reps
        .iter()
        .map(|&r| g.element_order(r))
        .fold(1u64, lcm);
    let identity_class = classes.class_of[g.identity_index() as usize] as usize;

    // per target class k, count a_{ijk} over all x in G with y = x^-1 z_k
    let slices: Vec<Vec<u64>> = maybe_par_range_map(kc, |k| {
        let zk = &g.elems[classes.reps[k] as usize];
        let mut slice = vec![0u64; kc * kc];
        for (xi, _) in g.elems.iter().enumerate() {
            let i = classes.class_of[xi] as usize;
            let xinv = &g.elems[g.inv_idx[xi] as usize];
            let y = xinv.mul(zk, &*g.scalars);
            let j = classes.class_of[g.index[&g.key_of(&y)] as usize] as usize;
            slice[i * kc + j] += 1;
        }
        slice
    });
    let mut coeffs = vec![vec![0u64; kc * kc]; kc];
    for (k, slice) in slices.iter().enumerate() {
        for i in 0..kc {
            for j in 0..kc {
                coeffs[i][j * kc + k] = slice[i * kc + j];
            }
        }
    }

    let ca = ClassAlgebra {
        class_count: kc,
        sizes: classes.sizes.clone(),
        inverse_class: classes.inverse_class.clone(),
        identity_class,
        exponent,
        coeffs,
    };
    ca.verify()?;
    Ok(ca)
}

impl ClassAlgebra {
    /// Column-sum identity sum_k a_{ijk} |Cl_k| = |Cl_i| |Cl_j|.
    fn verify(&self) -> Result<()> {
        let kc = self.class_count;
        for i in 0..kc {
            for j in 0..kc {
                let mut s = 0u64;
                for k in 0..kc {
                    s += self.coeffs[i][j * kc + k] * self.sizes[k];
                }
                if s != self.sizes[i] * self.sizes[j] {
                    return Err(Error::Internal(format!(
                        "class algebra column sum broken at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Sorted multiset of the irreducible character degrees of `g`.
pub fn character_degrees<S: Scalars>(g: &FiniteGroup<S>) -> Result<Vec<u64>> {
    let ca = class_algebra(g)?;
    degrees_from_algebra(&ca, g.order())
}

pub fn degrees_from_algebra(ca: &ClassAlgebra, order: u64) -> Result<Vec<u64>> {
    let mut ell = first_prime(ca.exponent, order)?;
    for _attempt in 0..5 {
        match try_degrees(ca, order, ell) {
            Ok(d) => return Ok(d),
            Err(Error::Internal(_)) => {
                ell = next_prime(ca.exponent, ell, order)?;
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::Internal("no suitable prime produced a common eigenbasis".into()))
}

/// Smallest prime l = 1 (mod exponent) with l > 2 sqrt(order). The lower
/// bound pins each degree uniquely from its square mod l; l never divides
/// the group order because every prime factor of the order divides the
/// exponent.
fn first_prime(exponent: u64, order: u64) -> Result<u64> {
    let bound = 2 * (order as f64).sqrt() as u64 + 1;
    let mut ell = exponent + 1;
    loop {
        if ell > bound && is_prime_u64(ell) {
            return Ok(ell);
        }
        ell = ell.checked_add(exponent).ok_or_else(|| Error::Internal("prime search overflow".into()))?;
        if ell > 100_000_000 {
            return Err(Error::Budget { what: "oracle prime size", needed: ell, cap: 100_000_000 });
        }
    }
}

fn next_prime(exponent: u64, after: u64, order: u64) -> Result<u64> {
    let mut ell = after + exponent;
    let bound = 2 * (order as f64).sqrt() as u64 + 1;
    loop {
        if ell > bound && is_prime_u64(ell) {
            return Ok(ell);
        }
        ell += exponent;
        if ell > 100_000_000 {
            return Err(Error::Budget { what: "oracle prime size", needed: ell, cap: 100_000_000 });
        }
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

// ---------------------------------------------------------------------
// arithmetic mod l
// ---------------------------------------------------------------------

#[derive(Clone, Copy)]
struct Fl {
    l: u64,
}

impl Fl {
    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.l
    }
    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.l - b) % self.l
    }
    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.l
    }
    fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }
    fn inv(&self, a: u64) -> u64 {
        debug_assert!(a % self.l != 0);
        self.pow(a % self.l, self.l - 2)
    }
}

/// Dense square matrices over F_l, column-major-free simple layout.
#[derive(Clone)]
struct LMat {
    n: usize,
    d: Vec<u64>,
}

impl LMat {
    fn zero(n: usize) -> LMat {
        LMat { n, d: vec![0; n * n] }
    }
    #[inline]
    fn at(&self, i: usize, j: usize) -> u64 {
        self.d[i * self.n + j]
    }
    #[inline]
    fn set(&mut self, i: usize, j: usize, v: u64) {
        self.d[i * self.n + j] = v;
    }
}

/// Apply an n x n matrix to a vector.
fn apply(m: &LMat, v: &[u64], fl: Fl) -> Vec<u64> {
    (0..m.n)
        .map(|i| {
            let mut acc = 0;
            for j in 0..m.n {
                acc = fl.add(acc, fl.mul(m.at(i, j), v[j]));
            }
            acc
        })
        .collect()
}

/// Solve the full-column-rank system W x = rhs (W given as columns).
fn solve_in_span(cols: &[Vec<u64>], rhs: &[u64], fl: Fl) -> Option<Vec<u64>> {
    let n = rhs.len();
    let w = cols.len();
    let mut aug = vec![0u64; n * (w + 1)];
    for i in 0..n {
        for (j, c) in cols.iter().enumerate() {
            aug[i * (w + 1) + j] = c[i];
        }
        aug[i * (w + 1) + w] = rhs[i];
    }
    // row reduce
    let mut row = 0;
    let mut pivots = Vec::new();
    for col in 0..w {
        let Some(pr) = (row..n).find(|&r| aug[r * (w + 1) + col] != 0) else { continue };
        for j in 0..w + 1 {
            aug.swap(row * (w + 1) + j, pr * (w + 1) + j);
        }
        let inv = fl.inv(aug[row * (w + 1) + col]);
        for j in 0..w + 1 {
            aug[row * (w + 1) + j] = fl.mul(inv, aug[row * (w + 1) + j]);
        }
        for r in 0..n {
            if r != row && aug[r * (w + 1) + col] != 0 {
                let f = aug[r * (w + 1) + col];
                for j in 0..w + 1 {
                    let t = fl.sub(aug[r * (w + 1) + j], fl.mul(f, aug[row * (w + 1) + j]));
                    aug[r * (w + 1) + j] = t;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == n {
            break;
        }
    }
    // consistency: rows beyond the pivot rows must have zero rhs
    for r in row..n {
        if aug[r * (w + 1) + w] != 0 {
            return None;
        }
    }
    let mut x = vec![0u64; w];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[r * (w + 1) + w];
    }
    Some(x)
}

/// Characteristic polynomial via Hessenberg reduction, coefficients lowest
/// degree first, monic.
fn char_poly_mod(m: &LMat, fl: Fl) -> Vec<u64> {
    let n = m.n;
    let mut h = m.clone();
    // similarity reduction to upper Hessenberg
    for col in 0..n.saturating_sub(2) {
        let piv = ((col + 1)..n).find(|&r| h.at(r, col) != 0);
        let Some(piv) = piv else { continue };
        if piv != col + 1 {
            for j in 0..n {
                let (a, b) = (h.at(col + 1, j), h.at(piv, j));
                h.set(col + 1, j, b);
                h.set(piv, j, a);
            }
            for i in 0..n {
                let (a, b) = (h.at(i, col + 1), h.at(i, piv));
                h.set(i, col + 1, b);
                h.set(i, piv, a);
            }
        }
        let inv = fl.inv(h.at(col + 1, col));
        for r in (col + 2)..n {
            let f = fl.mul(h.at(r, col), inv);
            if f == 0 {
                continue;
            }
            // row_r -= f * row_{col+1}; col_{col+1} += f * col_r
            for j in 0..n {
                let t = fl.sub(h.at(r, j), fl.mul(f, h.at(col + 1, j)));
                h.set(r, j, t);
            }
            for i in 0..n {
                let t = fl.add(h.at(i, col + 1), fl.mul(f, h.at(i, r)));
                h.set(i, col + 1, t);
            }
        }
    }
    // p_m(x) = (x - h[m-1][m-1]) p_{m-1}(x)
    //          - sum_i h[i-1][m-1] (prod_{j=i}^{m-1} h[j][j-1]) p_{i-1}(x)
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for mdeg in 1..=n {
        let mut p = poly_shift_mul(&polys[mdeg - 1], h.at(mdeg - 1, mdeg - 1), fl);
        let mut subprod = 1u64;
        for i in (1..mdeg).rev() {
            subprod = fl.mul(subprod, h.at(i, i - 1));
            let coef = fl.mul(h.at(i - 1, mdeg - 1), subprod);
            if coef == 0 {
                continue;
            }
            for (idx, &c) in polys[i - 1].iter().enumerate() {
                p[idx] = fl.sub(p[idx], fl.mul(coef, c));
            }
        }
        polys.push(p);
    }
    polys.pop().unwrap()
}

/// (x - a) * p
fn poly_shift_mul(p: &[u64], a: u64, fl: Fl) -> Vec<u64> {
    let mut out = vec![0u64; p.len() + 1];
    for (i, &c) in p.iter().enumerate() {
        out[i + 1] = fl.add(out[i + 1], c);
        out[i] = fl.sub(out[i], fl.mul(a, c));
    }
    out
}

fn poly_eval_mod(p: &[u64], x: u64, fl: Fl) -> u64 {
    let mut acc = 0;
    for &c in p.iter().rev() {
        acc = fl.add(fl.mul(acc, x), c);
    }
    acc
}

/// Kernel basis of (R - lambda I) as vectors in the w-dim coordinate space.
fn eigen_kernel(r: &LMat, lambda: u64, fl: Fl) -> Vec<Vec<u64>> {
    let w = r.n;
    let mut m = vec![0u64; w * w];
    for i in 0..w {
        for j in 0..w {
            let v = if i == j { fl.sub(r.at(i, j), lambda) } else { r.at(i, j) };
            m[i * w + j] = v;
        }
    }
    // rref
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..w {
        let Some(pr) = (row..w).find(|&rr| m[rr * w + col] != 0) else { continue };
        for j in 0..w {
            m.swap(row * w + j, pr * w + j);
        }
        let inv = fl.inv(m[row * w + col]);
        for j in 0..w {
            m[row * w + j] = fl.mul(inv, m[row * w + j]);
        }
        for rr in 0..w {
            if rr != row && m[rr * w + col] != 0 {
                let f = m[rr * w + col];
                for j in 0..w {
                    let t = fl.sub(m[rr * w + j], fl.mul(f, m[row * w + j]));
                    m[rr * w + j] = t;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..w {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![0u64; w];
        v[free] = 1;
        for (rr, &pc) in pivots.iter().enumerate() {
            v[pc] = fl.sub(0, m[rr * w + free]);
        }
        basis.push(v);
    }
    basis
}

fn try_degrees(ca: &ClassAlgebra, order: u64, ell: u64) -> Result<Vec<u64>> {
    let fl = Fl { l: ell };
    let kc = ca.class_count;
    let bmats: Vec<LMat> = (0..kc)
        .map(|i| {
            let mut b = LMat::zero(kc);
            for j in 0..kc {
                for k in 0..kc {
                    b.set(j, k, ca.coeffs[i][j * kc + k] % ell);
                }
            }
            b
        })
        .collect();

    // iterative splitting: random class-matrix combinations first, then a
    // deterministic sweep over the individual class matrices
    let mut spaces: Vec<Vec<Vec<u64>>> = vec![(0..kc)
        .map(|i| {
            let mut v = vec![0u64; kc];
            v[i] = 1;
            v
        })
        .collect()];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c1a5);
    let mut rounds = 0;
    loop {
        if spaces.iter().all(|s| s.len() == 1) {
            break;
        }
        let m = if rounds < 40 {
            let mut m = LMat::zero(kc);
            for b in &bmats {
                let c = rng.gen_range(0..ell);
                if c == 0 {
                    continue;
                }
                for idx in 0..kc * kc {
                    m.d[idx] = fl.add(m.d[idx], fl.mul(c, b.d[idx]));
                }
            }
            m
        } else {
            let idx = (rounds - 40) % kc;
            if rounds - 40 >= kc {
                return Err(Error::Internal("no common eigenbasis found".into()));
            }
            bmats[idx].clone()
        };
        rounds += 1;

        let mut next = Vec::new();
        for space in spaces {
            if space.len() == 1 {
                next.push(space);
                continue;
            }
            let w = space.len();
            // restriction R of m to the span: m * space = space * R
            let mut r = LMat::zero(w);
            let mut ok = true;
            for (j, v) in space.iter().enumerate() {
                let mv = apply(&m, v, fl);
                match solve_in_span(&space, &mv, fl) {
                    Some(col) => {
                        for i in 0..w {
                            r.set(i, j, col[i]);
                        }
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                return Err(Error::Internal("subspace is not invariant".into()));
            }
            let cp = char_poly_mod(&r, fl);
            let mut pieces = Vec::new();
            for lam in 0..ell {
                if poly_eval_mod(&cp, lam, fl) != 0 {
                    continue;
                }
                let ker = eigen_kernel(&r, lam, fl);
                if ker.is_empty() {
                    continue;
                }
                let lifted: Vec<Vec<u64>> = ker
                    .iter()
                    .map(|coeffs| {
                        let mut v = vec![0u64; kc];
                        for (ci, c) in coeffs.iter().enumerate() {
                            for t in 0..kc {
                                v[t] = fl.add(v[t], fl.mul(*c, space[ci][t]));
                            }
                        }
                        v
                    })
                    .collect();
                pieces.push(lifted);
            }
            let split_dim: usize = pieces.iter().map(|p| p.len()).sum();
            if split_dim != w {
                return Err(Error::Internal("eigenvalues escape the prime field".into()));
            }
            next.extend(pieces);
        }
        spaces = next;
    }

    // extract central characters and degrees
    let mut degs = Vec::with_capacity(kc);
    for space in &spaces {
        let v = &space[0];
        // normalize at the identity class
        let v0 = v[ca.identity_class];
        if v0 == 0 {
            return Err(Error::Internal("eigenvector vanishes at the identity class".into()));
        }
        let inv0 = fl.inv(v0);
        let omega: Vec<u64> = v.iter().map(|&c| fl.mul(c, inv0)).collect();
        // simultaneous eigenvector check
        for b in &bmats {
            let bv = apply(b, &omega, fl);
            let lam = omega
                .iter()
                .zip(&bv)
                .find(|(o, _)| **o != 0)
                .map(|(o, b)| fl.mul(*b, fl.inv(*o)))
                .unwrap();
            for (o, b) in omega.iter().zip(&bv) {
                if fl.mul(lam, *o) != *b {
                    return Err(Error::Internal("not a simultaneous eigenvector".into()));
                }
            }
        }
        let mut e = 0u64;
        for k in 0..kc {
            let term = fl.mul(
                fl.mul(omega[k], omega[ca.inverse_class[k] as usize]),
                fl.inv(ca.sizes[k] % ell),
            );
            e = fl.add(e, term);
        }
        if e == 0 {
            return Err(Error::Internal("degenerate orthogonality sum".into()));
        }
        let d2 = fl.mul(order % ell, fl.inv(e));
        let max_d = (order as f64).sqrt() as u64 + 1;
        let d = (1..=max_d).find(|&d| fl.mul(d % ell, d % ell) == d2);
        let Some(d) = d else {
            return Err(Error::Internal("degree square has no small root".into()));
        };
        if order % d != 0 {
            return Err(Error::Internal("degree does not divide the group order".into()));
        }
        degs.push(d);
    }
    if degs.len() != kc {
        return Err(Error::Internal("degree count differs from class count".into()));
    }
    let sum: u64 = degs.iter().map(|&d| d * d).sum();
    if sum != order {
        return Err(Error::Internal(format!("sum of squares {sum} != group order {order}")));
    }
    degs.sort();
    Ok(degs)
}
