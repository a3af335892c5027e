//! Length-two principal ideal local rings with residue field F_q.
//!
//! Two families, both of size q^2 with maximal ideal of square zero:
//!
//! * unramified: the Galois ring of characteristic p^2 with residue F_q
//!   (Z/p^2 when q = p), uniformizer pi = p;
//! * ramified: F_q[t]/t^2, uniformizer pi = t.
//!
//! Elements are stored in canonical coordinates (a, b) with a, b in F_q,
//! meaning s(a) + pi s(b), where s is the multiplicative (Teichmueller)
//! section. The index of (a, b) is `a + q*b`. In these coordinates the two
//! families share every formula:
//!
//! ```text
//!   (a,b) * (c,d) = (ac, ad + bc)
//!   (a,b) + (c,d) = (a+c, b + d + carry(a,c))
//! ```
//!
//! with carry identically zero for the ramified ring and the Witt carry
//! s(a) + s(c) = s(a+c) + pi s(carry(a,c)) for the unramified one. The
//! carry table is the only piece of data distinguishing the two rings.

use std::sync::Arc;

use crate::config::Budgets;
use crate::error::{Error, Result};
use crate::field::Fq;


#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RingKind {
    Unramified,
    Ramified,
}

impl RingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RingKind::Unramified => "unramified",
            RingKind::Ramified => "ramified",
        }
    }
}

impl std::str::FromStr for RingKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<RingKind> {
        match s.to_ascii_lowercase().as_str() {
            "unramified" => Ok(RingKind::Unramified),
            "ramified" => Ok(RingKind::Ramified),
            other => Err(Error::InvalidConfig(format!("unknown ring kind `{other}`"))),
        }
    }
}

/// Descriptor for a base ring with residue field F_{p^m}; `ext` asks for
/// the quadratic unramified extension (residue F_{q^2}) carrying the
/// involution sigma, as used by the unitary groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingSpec {
    pub kind: RingKind,
    pub p: u16,
    pub m: u32,
    pub ext: bool,
}

impl RingSpec {
    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.m)
    }

    /// Build the ring (the extension ring when `ext` is set).
    pub fn build(&self, budgets: &Budgets) -> Result<Arc<LocalRing>> {
        let q = self.q();
        if q > budgets.max_q as u64 {
            return Err(Error::Budget { what: "residue field size q", needed: q, cap: budgets.max_q as u64 });
        }
        let deg = if self.ext { 2 * self.m } else { self.m };
        let field = Arc::new(Fq::new(self.p, deg)?);
        LocalRing::new(self.kind, field, if self.ext { Some(self.m) } else { None }).map(Arc::new)
    }
}

/// A length-two local ring in canonical (a, b) coordinates over its residue
/// field. Immutable after construction; all operations are table lookups.
#[derive(Debug)]
pub struct LocalRing {
    pub kind: RingKind,
    /// Residue field O_1 (the extension field F_{q^2} when sigma is present).
    pub field: Arc<Fq>,
    /// Witt carry table, row-major over (a, c). All zero for ramified rings.
    carry: Vec<u16>,
    /// Field-level sigma x -> x^(p^m0) when this ring is a quadratic
    /// extension of the ring with residue F_{p^m0}.
    sigma_f: Option<Vec<u16>>,
}

impl LocalRing {
    /// `ext_base_m`: when building the quadratic extension, the residue
    /// degree m of the base ring (the field must have degree 2m).
    pub fn new(kind: RingKind, field: Arc<Fq>, ext_base_m: Option<u32>) -> Result<LocalRing> {
        let q = field.q as usize;
        let carry = match kind {
            RingKind::Ramified => vec![0u16; q * q],
            RingKind::Unramified => witt_carry_table(&field),
        };
        let sigma_f = match ext_base_m {
            None => None,
            Some(m0) => {
                if field.deg != 2 * m0 {
                    return Err(Error::InvalidConfig(format!(
                        "extension ring needs residue degree 2m = {}, field has {}",
                        2 * m0,
                        field.deg
                    )));
                }
                let table: Vec<u16> = (0..field.q).map(|a| field.frob_k(a, m0)).collect();
                // sigma must commute with the carry so that it extends to a
                // ring automorphism
                for a in 0..field.q {
                    for c in 0..field.q {
                        let lhs = table[carry[a as usize * q + c as usize] as usize];
                        let rhs = carry[table[a as usize] as usize * q + table[c as usize] as usize];
                        if lhs != rhs {
                            return Err(Error::Internal("carry is not Frobenius-equivariant".into()));
                        }
                    }
                }
                Some(table)
            }
        };
        Ok(LocalRing { kind, field, carry, sigma_f })
    }

    #[inline]
    pub fn q(&self) -> u16 {
        self.field.q
    }

    /// Ring size q^2.
    #[inline]
    pub fn size(&self) -> usize {
        self.field.q as usize * self.field.q as usize
    }

    #[inline]
    pub fn elem(&self, a: u16, b: u16) -> u16 {
        a + self.field.q * b
    }

    /// Teichmueller coordinate a of x = s(a) + pi s(b).
    #[inline]
    pub fn coord_a(&self, x: u16) -> u16 {
        x % self.field.q
    }

    #[inline]
    pub fn coord_b(&self, x: u16) -> u16 {
        x / self.field.q
    }

    #[inline]
    pub fn zero(&self) -> u16 {
        0
    }

    #[inline]
    pub fn one(&self) -> u16 {
        1
    }

    /// The fixed uniformizer.
    #[inline]
    pub fn pi(&self) -> u16 {
        self.field.q
    }

    #[inline]
    pub fn add(&self, x: u16, y: u16) -> u16 {
        let (a, b) = (self.coord_a(x), self.coord_b(x));
        let (c, d) = (self.coord_a(y), self.coord_b(y));
        let f = &self.field;
        let lo = f.add(a, c);
        let hi = f.add(f.add(b, d), self.carry[a as usize * f.q as usize + c as usize]);
        self.elem(lo, hi)
    }

    #[inline]
    pub fn neg(&self, x: u16) -> u16 {
        // -s(a) = s(-a) because q is odd, so negation is coordinatewise
        let f = &self.field;
        self.elem(f.neg(self.coord_a(x)), f.neg(self.coord_b(x)))
    }

    #[inline]
    pub fn sub(&self, x: u16, y: u16) -> u16 {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: u16, y: u16) -> u16 {
        let (a, b) = (self.coord_a(x), self.coord_b(x));
        let (c, d) = (self.coord_a(y), self.coord_b(y));
        let f = &self.field;
        self.elem(f.mul(a, c), f.add(f.mul(a, d), f.mul(b, c)))
    }

    #[inline]
    pub fn is_unit(&self, x: u16) -> bool {
        self.coord_a(x) != 0
    }

    pub fn inv(&self, x: u16) -> Option<u16> {
        let a = self.coord_a(x);
        let ai = self.field.inv(a)?;
        let b = self.coord_b(x);
        // (a,b)^-1 = (a^-1, -a^-2 b)
        let f = &self.field;
        Some(self.elem(ai, f.neg(f.mul(f.mul(ai, ai), b))))
    }

    /// Reduction O_2 -> O_1.
    #[inline]
    pub fn reduce(&self, x: u16) -> u16 {
        self.coord_a(x)
    }

    /// The multiplicative section of `reduce`, extended by s(0) = 0.
    #[inline]
    pub fn section(&self, a: u16) -> u16 {
        self.elem(a, 0)
    }

    /// pi * s(c) for a residue element c; pi*x depends only on reduce(x).
    #[inline]
    pub fn pi_times(&self, c: u16) -> u16 {
        self.elem(0, c)
    }

    /// Write a unit u as s(a) * (1 + pi c); returns (s(a), 1 + pi c).
    pub fn unit_decompose(&self, u: u16) -> Result<(u16, u16)> {
        let a = self.coord_a(u);
        if a == 0 {
            return Err(Error::InvalidConfig("unit_decompose on a non-unit".into()));
        }
        let f = &self.field;
        let c = f.mul(f.inv(a).unwrap(), self.coord_b(u));
        Ok((self.section(a), self.add(self.one(), self.pi_times(c))))
    }

    /// The principal-unit coordinate: for a unit u = s(a)(1 + pi c), the
    /// residue c.
    pub fn principal_coord(&self, u: u16) -> Result<u16> {
        let a = self.coord_a(u);
        if a == 0 {
            return Err(Error::InvalidConfig("principal_coord on a non-unit".into()));
        }
        Ok(self.field.mul(self.field.inv(a).unwrap(), self.coord_b(u)))
    }

    pub fn has_sigma(&self) -> bool {
        self.sigma_f.is_some()
    }

    /// Field-level involution x -> x^q0 (q0 the base residue size).
    pub fn sigma_field(&self, a: u16) -> Result<u16> {
        match &self.sigma_f {
            Some(t) => Ok(t[a as usize]),
            None => Err(Error::InvalidConfig("sigma on a ring without quadratic extension".into())),
        }
    }

    /// The ring involution extending the residue Frobenius; fixes pi.
    pub fn sigma(&self, x: u16) -> Result<u16> {
        let t = self
            .sigma_f
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("sigma on a ring without quadratic extension".into()))?;
        Ok(self.elem(t[self.coord_a(x) as usize], t[self.coord_b(x) as usize]))
    }

    /// All ring elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = u16> {
        0..(self.size() as u16)
    }

    /// Integer value in 0..p^2 for rings with residue Z/p (used by tests
    /// and display for the classical Z/p^2 picture).
    pub fn to_int(&self, x: u16) -> Result<u64> {
        if self.field.deg != 1 {
            return Err(Error::InvalidConfig("to_int needs residue degree 1".into()));
        }
        let p = self.field.p as u64;
        let (a, b) = (self.coord_a(x) as u64, self.coord_b(x) as u64);
        Ok(match self.kind {
            RingKind::Ramified => a + p * b, // positional encoding a + t b
            RingKind::Unramified => {
                let s = |c: u64| c.pow(self.field.p as u32) % (p * p);
                (s(a) + p * s(b)) % (p * p)
            }
        })
    }

    pub fn from_int(&self, v: u64) -> Result<u16> {
        if self.field.deg != 1 {
            return Err(Error::InvalidConfig("from_int needs residue degree 1".into()));
        }
        let p = self.field.p as u64;
        match self.kind {
            RingKind::Ramified => Ok(self.elem((v % p) as u16, (v / p % p) as u16)),
            RingKind::Unramified => {
                let v = v % (p * p);
                let a = (v % p) as u16;
                let s_a = (a as u64).pow(self.field.p as u32) % (p * p);
                let diff = (v + p * p - s_a) % (p * p);
                debug_assert_eq!(diff % p, 0);
                Ok(self.elem(a, ((diff / p) % p) as u16))
            }
        }
    }
}

/// Build the Witt carry table of the Galois ring GR(p^2, deg) over the
/// given residue field, via an explicit polynomial model Z[x]/(p^2, f)
/// with f the coefficientwise lift of the field's modulus.
fn witt_carry_table(field: &Fq) -> Vec<u16> {
    let p = field.p as u64;
    let p2 = p * p;
    let deg = field.deg as usize;
    let modulus: Vec<u64> = field.modulus.iter().map(|&c| c as u64).collect();

    // dense polynomial arithmetic mod (p^2, f)
    let pmul = |a: &[u64], b: &[u64]| -> Vec<u64> {
        let mut out = vec![0u64; a.len() + b.len()];
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + ai * bj) % p2;
            }
        }
        // reduce by monic f
        let dm = deg;
        while out.len() > dm {
            let lead = *out.last().unwrap();
            let shift = out.len() - 1 - dm;
            if lead != 0 {
                for (i, &mi) in modulus.iter().enumerate() {
                    let t = (lead * mi) % p2;
                    out[i + shift] = (out[i + shift] + p2 - t) % p2;
                }
            }
            debug_assert_eq!(*out.last().unwrap(), 0);
            out.pop();
        }
        out.resize(dm, 0);
        out
    };

    let digits = |a: u16| -> Vec<u64> {
        let mut v = Vec::with_capacity(deg);
        let mut a = a as u64;
        for _ in 0..deg {
            v.push(a % p);
            a /= p;
        }
        v
    };
    let residue_index = |v: &[u64]| -> u16 {
        let mut acc = 0u64;
        for &c in v.iter().rev() {
            acc = acc * p + (c % p);
        }
        acc as u16
    };

    // Teichmueller lift: s(a) = lift(a)^q, independent of the lift choice
    let q_exp = (field.q as u64) as u32;
    let teich: Vec<Vec<u64>> = (0..field.q)
        .map(|a| {
            let base = digits(a);
            let mut acc = vec![0u64; deg];
            acc[0] = 1;
            let mut cur = base;
            let mut e = q_exp;
            while e > 0 {
                if e & 1 == 1 {
                    acc = pmul(&acc, &cur);
                }
                cur = pmul(&cur, &cur);
                e >>= 1;
            }
            acc
        })
        .collect();

    let q = field.q as usize;
    let mut carry = vec![0u16; q * q];
    for a in 0..field.q {
        for c in 0..field.q {
            let sum: Vec<u64> = teich[a as usize]
                .iter()
                .zip(&teich[c as usize])
                .map(|(&x, &y)| (x + y) % p2)
                .collect();
            let e = residue_index(&sum);
            debug_assert_eq!(e, field.add(a, c));
            let w: Vec<u64> = sum
                .iter()
                .zip(&teich[e as usize])
                .map(|(&x, &y)| {
                    let d = (x + p2 - y) % p2;
                    debug_assert_eq!(d % p, 0);
                    d / p
                })
                .collect();
            carry[a as usize * q + c as usize] = residue_index(&w);
        }
    }
    carry
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z9() -> LocalRing {
        LocalRing::new(RingKind::Unramified, Arc::new(Fq::new(3, 1).unwrap()), None).unwrap()
    }

    fn f3t() -> LocalRing {
        LocalRing::new(RingKind::Ramified, Arc::new(Fq::new(3, 1).unwrap()), None).unwrap()
    }

    fn check_ring_axioms(r: &LocalRing) {
        let els: Vec<u16> = r.elements().collect();
        for &x in &els {
            assert_eq!(r.add(x, r.zero()), x);
            assert_eq!(r.mul(x, r.one()), x);
            assert_eq!(r.add(x, r.neg(x)), r.zero());
            for &y in &els {
                assert_eq!(r.add(x, y), r.add(y, x));
                assert_eq!(r.mul(x, y), r.mul(y, x));
            }
        }
        // associativity and distributivity on all triples for small rings,
        // which covers q = 3 exhaustively
        if els.len() <= 100 {
            for &x in &els {
                for &y in &els {
                    for &z in &els {
                        assert_eq!(r.add(r.add(x, y), z), r.add(x, r.add(y, z)));
                        assert_eq!(r.mul(r.mul(x, y), z), r.mul(x, r.mul(y, z)));
                        assert_eq!(r.mul(x, r.add(y, z)), r.add(r.mul(x, y), r.mul(x, z)));
                    }
                }
            }
        }
    }

    #[test]
    fn ring_axioms_q3_both_kinds() {
        check_ring_axioms(&z9());
        check_ring_axioms(&f3t());
    }

    #[test]
    fn ring_axioms_q9_unramified() {
        let r = LocalRing::new(RingKind::Unramified, Arc::new(Fq::new(3, 2).unwrap()), None).unwrap();
        // sampled triples plus full pair checks
        check_ring_axioms(&r);
        let els: Vec<u16> = r.elements().collect();
        let mut s = 7usize;
        for _ in 0..2000 {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let x = els[s % els.len()];
            let y = els[(s >> 8) % els.len()];
            let z = els[(s >> 16) % els.len()];
            assert_eq!(r.mul(r.mul(x, y), z), r.mul(x, r.mul(y, z)));
            assert_eq!(r.mul(x, r.add(y, z)), r.add(r.mul(x, y), r.mul(x, z)));
        }
    }

    #[test]
    fn z9_matches_integer_model() {
        let r = z9();
        for u in 0u64..9 {
            for v in 0u64..9 {
                let x = r.from_int(u).unwrap();
                let y = r.from_int(v).unwrap();
                assert_eq!(r.to_int(r.add(x, y)).unwrap(), (u + v) % 9);
                assert_eq!(r.to_int(r.mul(x, y)).unwrap(), (u * v) % 9);
            }
        }
    }

    #[test]
    fn uniformizer_squares_to_zero_and_ideal_size() {
        for r in [z9(), f3t()] {
            let pi = r.pi();
            assert_eq!(r.mul(pi, pi), r.zero());
            let ideal: std::collections::HashSet<u16> =
                r.elements().map(|x| r.mul(pi, x)).collect();
            assert_eq!(ideal.len(), r.q() as usize);
        }
    }

    #[test]
    fn reduce_examples() {
        let r = z9();
        assert_eq!(r.reduce(r.from_int(8).unwrap()), 2);
        assert_eq!(r.reduce(r.pi()), 0);
        let rr = f3t();
        // 2 + t*1
        assert_eq!(rr.reduce(rr.elem(2, 1)), 2);
    }

    #[test]
    fn section_is_multiplicative_and_fixed_by_qth_power() {
        for r in [z9(), f3t()] {
            for a in 0..r.q() {
                assert_eq!(r.reduce(r.section(a)), a);
                let s = r.section(a);
                let mut acc = r.one();
                for _ in 0..r.q() {
                    acc = r.mul(acc, s);
                }
                assert_eq!(acc, s, "s(a)^q = s(a)");
                for b in 0..r.q() {
                    assert_eq!(r.mul(r.section(a), r.section(b)), r.section(r.field.mul(a, b)));
                }
            }
        }
    }

    #[test]
    fn section_of_two_in_z9_is_eight() {
        let r = z9();
        // oracle: the unique x in Z/9 with x = 2 mod 3 and x^2 = s(4) = s(1) = 1
        let mut found = Vec::new();
        for v in 0..9u64 {
            let x = r.from_int(v).unwrap();
            if r.reduce(x) == 2 && r.mul(x, x) == r.one() {
                found.push(v);
            }
        }
        assert_eq!(found, vec![8]);
        assert_eq!(r.to_int(r.section(2)).unwrap(), 8);
    }

    #[test]
    fn section_constant_in_ramified_ring() {
        let r = f3t();
        assert_eq!(r.section(2), r.elem(2, 0));
    }

    #[test]
    fn no_other_multiplicative_section_exists() {
        // all multiplicative maps F_q^x -> O_2^x splitting the reduction,
        // checked exhaustively for q in {3, 5}, both kinds
        for (p, kind) in [(3, RingKind::Unramified), (3, RingKind::Ramified), (5, RingKind::Unramified), (5, RingKind::Ramified)] {
            let r = LocalRing::new(kind, Arc::new(Fq::new(p, 1).unwrap()), None).unwrap();
            let units: Vec<u16> = (1..r.q()).collect();
            let lifts: Vec<Vec<u16>> = units
                .iter()
                .map(|&a| r.elements().filter(|&x| r.is_unit(x) && r.reduce(x) == a).collect())
                .collect();
            let mut choice = vec![0usize; units.len()];
            let mut count = 0;
            loop {
                let cand: Vec<u16> =
                    choice.iter().zip(&lifts).map(|(&c, l)| l[c]).collect();
                let sect = |a: u16| cand[units.iter().position(|&u| u == a).unwrap()];
                let multiplicative = units.iter().all(|&a| {
                    units.iter().all(|&b| r.mul(sect(a), sect(b)) == sect(r.field.mul(a, b)))
                });
                if multiplicative {
                    count += 1;
                    for &a in &units {
                        assert_eq!(sect(a), r.section(a));
                    }
                }
                // odometer
                let mut i = 0;
                loop {
                    if i == choice.len() {
                        break;
                    }
                    choice[i] += 1;
                    if choice[i] < lifts[i].len() {
                        break;
                    }
                    choice[i] = 0;
                    i += 1;
                }
                if i == choice.len() {
                    break;
                }
            }
            assert_eq!(count, 1, "exactly one multiplicative section");
        }
    }

    #[test]
    fn unit_group_order_and_principal_units() {
        for r in [z9(), f3t()] {
            let units: Vec<u16> = r.elements().filter(|&x| r.is_unit(x)).collect();
            assert_eq!(units.len(), (r.q() * (r.q() - 1)) as usize);
            let principal: Vec<u16> = (0..r.q()).map(|c| r.add(r.one(), r.pi_times(c))).collect();
            for &u in &principal {
                let mut acc = r.one();
                for _ in 0..r.field.p {
                    acc = r.mul(acc, u);
                }
                assert_eq!(acc, r.one(), "principal units have order dividing p");
            }
        }
    }

    #[test]
    fn unit_decompose_examples() {
        let r = z9();
        let two = r.from_int(2).unwrap();
        let (t, pu) = r.unit_decompose(two).unwrap();
        assert_eq!(r.to_int(t).unwrap(), 8);
        assert_eq!(r.to_int(pu).unwrap(), 7); // 1 + 3*2
        assert_eq!(r.mul(t, pu), two);

        let rr = f3t();
        // u = 2 + t -> (2, 1 + 2t), exhaustive product re-check
        let u = rr.elem(2, 1);
        let (t, pu) = rr.unit_decompose(u).unwrap();
        assert_eq!(t, rr.elem(2, 0));
        assert_eq!(pu, rr.elem(1, 2));
        for x in rr.elements().filter(|&x| rr.is_unit(x)) {
            let (a, b) = rr.unit_decompose(x).unwrap();
            assert_eq!(rr.mul(a, b), x);
            assert_eq!(rr.coord_b(a), 0);
            assert_eq!(rr.coord_a(b), 1);
        }
        assert!(r.unit_decompose(r.pi()).is_err());
    }

    fn ext_ring(kind: RingKind) -> LocalRing {
        LocalRing::new(kind, Arc::new(Fq::new(3, 2).unwrap()), Some(1)).unwrap()
    }

    #[test]
    fn sigma_is_a_ring_involution_fixing_the_base() {
        for kind in [RingKind::Unramified, RingKind::Ramified] {
            let r = ext_ring(kind);
            let mut fixed = 0;
            for x in r.elements() {
                let sx = r.sigma(x).unwrap();
                assert_eq!(r.sigma(sx).unwrap(), x, "sigma^2 = id");
                if sx == x {
                    fixed += 1;
                }
                for y in r.elements() {
                    assert_eq!(r.sigma(r.add(x, y)).unwrap(), r.add(sx, r.sigma(y).unwrap()));
                    assert_eq!(r.sigma(r.mul(x, y)).unwrap(), r.mul(sx, r.sigma(y).unwrap()));
                }
            }
            // fixed ring: both coordinates in F_3, i.e. 9 elements
            assert_eq!(fixed, 9);
            assert_eq!(r.sigma(r.pi()).unwrap(), r.pi());
            // sigma on Teichmueller points is the residue Frobenius
            for a in 0..r.q() {
                assert_eq!(r.sigma(r.section(a)).unwrap(), r.section(r.field.frob_k(a, 1)));
            }
        }
    }

    #[test]
    fn sigma_rejected_without_extension() {
        let r = z9();
        assert!(r.sigma(0).is_err());
    }
}
