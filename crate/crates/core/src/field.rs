//! Table-driven arithmetic in the finite field F_q, q = p^d.
//!
//! Elements are encoded as indices in `0..q`: the element with polynomial
//! coordinates (c_0, .., c_{d-1}) in the basis 1, x, .., x^{d-1} has index
//! `sum c_i p^i`. In particular 0 and 1 are the indices 0 and 1, and the
//! prime subfield occupies the indices `0..p`. The index order doubles as
//! the fixed total order on field elements used for every deterministic
//! tie-break in this crate.
//!
//! The defining polynomial is the canonical one: the monic irreducible
//! f(x) = x^d + c_{d-1} x^{d-1} + .. + c_0 over F_p whose coefficient index
//! `sum c_i p^i` is smallest. For d = 1 this gives f = x, i.e. the prime
//! field itself. Examples: F_9 = F_3[x]/(x^2 + 1), F_25 = F_5[x]/(x^2 + 2).

use crate::error::{Error, Result};

/// Polynomials over Z/p as dense coefficient vectors, lowest degree first.
mod fppoly {
    pub fn trim(v: &mut Vec<u16>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn mul(a: &[u16], b: &[u16], p: u16) -> Vec<u16> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0u16; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + ai * bj) % p;
            }
        }
        trim(&mut out);
        out
    }

    /// Remainder of `a` modulo the monic polynomial `m`.
    pub fn rem(a: &[u16], m: &[u16], p: u16) -> Vec<u16> {
        let dm = m.len() - 1;
        let mut r = a.to_vec();
        trim(&mut r);
        while r.len() > dm {
            let lead = *r.last().unwrap();
            let shift = r.len() - 1 - dm;
            for (i, &mi) in m.iter().enumerate() {
                let t = (lead * mi) % p;
                let idx = i + shift;
                r[idx] = (r[idx] + p - t) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn gcd(a: &[u16], b: &[u16], p: u16) -> Vec<u16> {
        let (mut a, mut b) = (a.to_vec(), b.to_vec());
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            // scale b monic before taking remainders
            let lead = *b.last().unwrap();
            let inv = mod_inv(lead, p);
            let bm: Vec<u16> = b.iter().map(|&c| (c * inv) % p).collect();
            let r = rem(&a, &bm, p);
            a = b;
            b = r;
        }
        a
    }

    pub fn mod_inv(a: u16, p: u16) -> u16 {
        // p is a small prime; brute scan is fine
        (1..p).find(|&b| (a * b) % p == 1).expect("unit in Z/p")
    }

    /// x^(p^k) mod m, computed by iterating the p-power map.
    pub fn x_pow_p_tower(k: u32, m: &[u16], p: u16) -> Vec<u16> {
        let mut cur = if m.len() > 2 { vec![0, 1] } else { rem(&[0, 1], m, p) };
        for _ in 0..k {
            cur = pow(&cur, p as u64, m, p);
        }
        cur
    }

    pub fn pow(a: &[u16], mut e: u64, m: &[u16], p: u16) -> Vec<u16> {
        let mut base = rem(a, m, p);
        let mut acc = vec![1u16];
        while e > 0 {
            if e & 1 == 1 {
                acc = rem(&mul(&acc, &base, p), m, p);
            }
            base = rem(&mul(&base, &base, p), m, p);
            e >>= 1;
        }
        acc
    }

    /// Rabin irreducibility test for a monic polynomial over F_p.
    pub fn is_irreducible(m: &[u16], p: u16) -> bool {
        let d = (m.len() - 1) as u32;
        if d == 0 {
            return false;
        }
        if d == 1 {
            return true;
        }
        // x^(p^d) must reduce to x
        let xq = x_pow_p_tower(d, m, p);
        if xq != vec![0, 1] {
            return false;
        }
        // for each prime r | d: gcd(x^(p^(d/r)) - x, m) must be constant
        let mut rest = d;
        let mut r = 2;
        while r * r <= rest {
            if rest % r == 0 {
                if !tower_coprime(d / r, m, p) {
                    return false;
                }
                while rest % r == 0 {
                    rest /= r;
                }
            }
            r += 1;
        }
        if rest > 1 && !tower_coprime(d / rest, m, p) {
            return false;
        }
        true
    }

    fn tower_coprime(k: u32, m: &[u16], p: u16) -> bool {
        let mut v = x_pow_p_tower(k, m, p);
        // v - x
        if v.len() < 2 {
            v.resize(2, 0);
        }
        v[1] = (v[1] + p - 1) % p;
        trim(&mut v);
        let g = gcd(m, &v, p);
        g.len() <= 1
    }
}

/// The finite field F_{p^d} with all operations precomputed into tables.
#[derive(Debug)]
pub struct Fq {
    pub p: u16,
    /// Extension degree over the prime field.
    pub deg: u32,
    /// Field size p^deg.
    pub q: u16,
    /// Canonical monic defining polynomial, lowest degree first, length deg+1.
    pub modulus: Vec<u16>,
    add_t: Vec<u16>,
    mul_t: Vec<u16>,
    neg_t: Vec<u16>,
    inv_t: Vec<u16>,
    /// x -> x^p
    frob_t: Vec<u16>,
    /// Absolute trace to Z/p, as a value in 0..p.
    trace_t: Vec<u16>,
}

impl Fq {
    pub fn new(p: u16, deg: u32) -> Result<Fq> {
        if !is_prime(p) || p == 2 {
            return Err(Error::InvalidConfig(format!("p = {p} must be an odd prime")));
        }
        let q128 = (p as u128).checked_pow(deg).filter(|&v| v <= u16::MAX as u128);
        let q = match q128 {
            Some(v) if deg >= 1 => v as u16,
            _ => return Err(Error::InvalidConfig(format!("p^deg out of range: {p}^{deg}"))),
        };
        let modulus = canonical_modulus(p, deg);
        let qs = q as usize;

        // digit decomposition of an index
        let digits = |a: u16| -> Vec<u16> {
            let mut v = Vec::with_capacity(deg as usize);
            let mut a = a;
            for _ in 0..deg {
                v.push(a % p);
                a /= p;
            }
            v
        };
        let undigit = |v: &[u16]| -> u16 {
            let mut acc = 0u16;
            for &c in v.iter().rev() {
                acc = acc * p + c;
            }
            acc
        };

        let mut add_t = vec![0u16; qs * qs];
        let mut mul_t = vec![0u16; qs * qs];
        let mut neg_t = vec![0u16; qs];
        for a in 0..q {
            let da = digits(a);
            let negd: Vec<u16> = da.iter().map(|&c| (p - c) % p).collect();
            neg_t[a as usize] = undigit(&negd);
            for b in 0..q {
                let db = digits(b);
                let sum: Vec<u16> = da.iter().zip(&db).map(|(&x, &y)| (x + y) % p).collect();
                add_t[a as usize * qs + b as usize] = undigit(&sum);
                let mut prod = fppoly::rem(&fppoly::mul(&da, &db, p), &modulus, p);
                prod.resize(deg as usize, 0);
                mul_t[a as usize * qs + b as usize] = undigit(&prod);
            }
        }
        let mut inv_t = vec![0u16; qs];
        for a in 1..q {
            inv_t[a as usize] = (1..q)
                .find(|&b| mul_t[a as usize * qs + b as usize] == 1)
                .expect("every nonzero field element is a unit");
        }
        let mut frob_t = vec![0u16; qs];
        for a in 0..q {
            let mut acc = 1u16;
            for _ in 0..p {
                acc = mul_t[acc as usize * qs + a as usize];
            }
            frob_t[a as usize] = if a == 0 { 0 } else { acc };
        }
        // frob_t above computed a^p as a * a * ... (p times) starting from 1: fine for a=0 too
        frob_t[0] = 0;
        let mut trace_t = vec![0u16; qs];
        for a in 0..q {
            let mut tr = 0u16;
            let mut cur = a;
            for _ in 0..deg {
                tr = add_t[tr as usize * qs + cur as usize];
                cur = frob_t[cur as usize];
            }
            debug_assert!(tr < p, "absolute trace must land in the prime subfield");
            trace_t[a as usize] = tr;
        }

        Ok(Fq { p, deg, q, modulus, add_t, mul_t, neg_t, inv_t, frob_t, trace_t })
    }

    /// The prime field Z/p.
    pub fn prime(p: u16) -> Result<Fq> {
        Fq::new(p, 1)
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        self.add_t[a as usize * self.q as usize + b as usize]
    }
    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul_t[a as usize * self.q as usize + b as usize]
    }
    #[inline]
    pub fn neg(&self, a: u16) -> u16 {
        self.neg_t[a as usize]
    }
    #[inline]
    pub fn sub(&self, a: u16, b: u16) -> u16 {
        self.add(a, self.neg(b))
    }
    #[inline]
    pub fn inv(&self, a: u16) -> Option<u16> {
        (a != 0).then(|| self.inv_t[a as usize])
    }
    #[inline]
    pub fn frob(&self, a: u16) -> u16 {
        self.frob_t[a as usize]
    }
    /// Absolute trace to the prime field, returned as a residue in 0..p.
    #[inline]
    pub fn trace_p(&self, a: u16) -> u16 {
        self.trace_t[a as usize]
    }

    pub fn pow(&self, a: u16, e: u64) -> u16 {
        let mut acc = 1u16;
        let mut base = a;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// a -> a^(p^k), k-fold Frobenius.
    pub fn frob_k(&self, a: u16, k: u32) -> u16 {
        let mut cur = a;
        for _ in 0..k {
            cur = self.frob(cur);
        }
        cur
    }

    /// Coefficient of x^i in the polynomial coordinates of `a`.
    #[inline]
    pub fn digit(&self, a: u16, i: u32) -> u16 {
        let mut a = a;
        for _ in 0..i {
            a /= self.p;
        }
        a % self.p
    }

    /// Embed a prime-subfield residue 0..p.
    #[inline]
    pub fn from_prime(&self, c: u16) -> u16 {
        c % self.p
    }

    /// All elements in the fixed total order.
    pub fn elements(&self) -> impl Iterator<Item = u16> {
        0..self.q
    }
}

fn is_prime(p: u16) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p as u32 {
        if p as u32 % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest-index monic irreducible of the given degree (see module docs).
fn canonical_modulus(p: u16, deg: u32) -> Vec<u16> {
    if deg == 1 {
        return vec![0, 1]; // f = x, so the quotient is Z/p itself
    }
    let count = (p as u64).pow(deg);
    for v in 0..count {
        let mut f = Vec::with_capacity(deg as usize + 1);
        let mut t = v;
        for _ in 0..deg {
            f.push((t % p as u64) as u16);
            t /= p as u64;
        }
        f.push(1);
        if fppoly::is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// The fixed nontrivial additive character psi of F_q, valued in the p-th
/// roots of unity and stored as the exponent map a -> Tr_{F_q/F_p}(a).
#[derive(Debug)]
pub struct AdditiveCharacter {
    pub p: u16,
    exps: Vec<u16>,
}

impl AdditiveCharacter {
    pub fn of_field(f: &Fq) -> AdditiveCharacter {
        AdditiveCharacter { p: f.p, exps: (0..f.q).map(|a| f.trace_p(a)).collect() }
    }

    /// Exponent of psi(a) as a residue mod p.
    #[inline]
    pub fn exp(&self, a: u16) -> u16 {
        self.exps[a as usize]
    }

    pub fn is_nontrivial(&self) -> bool {
        self.exps.iter().any(|&e| e != 0)
    }
}
