//! Finite matrix groups: enumeration of the classical groups over the
//! residue field and over the length-two ring, deterministic element
//! lifts along the reduction map, conjugacy classes, and centralizers.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, OnceLock};

use crate::config::{Budgets, Family};
use crate::error::{Error, Result};
use crate::field::Fq;
use crate::lie::{symplectic_form, LieSpace};
use crate::mat::{
    kernel_coordinate, lift_sections, one_plus_pi, reduce_mat, solve, star_field, star_ring, FMat,
    Mat, Scalars,
};
use crate::par::maybe_par_map;
use crate::ring::LocalRing;

/// Group descriptor: family, parameter n, and the ring data. The matrix
/// size is `family.mat_size(n)`; for U the matrices live over the
/// quadratic extension.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    pub family: Family,
    pub n_param: usize,
    pub ring: Arc<LocalRing>,
    /// Residue degree of the sigma-fixed base field.
    pub base_deg: u32,
}

impl GroupSpec {
    pub fn mat_n(&self) -> usize {
        self.family.mat_size(self.n_param)
    }

    pub fn field(&self) -> &Fq {
        &self.ring.field
    }

    /// Membership at residue level.
    pub fn is_member_residue(&self, g: &Mat) -> bool {
        let f = self.field();
        match self.family {
            Family::Sl => g.det(f) == 1,
            Family::O => g.transpose().mul(g, f).is_identity(f),
            Family::Sp => {
                let j = symplectic_form(self.n_param, f);
                g.transpose().mul(&j, f).mul(g, f) == j
            }
            Family::U => g.mul(&star_field(g, f, self.base_deg), f).is_identity(f),
        }
    }

    /// Membership at ring level.
    pub fn is_member_ring(&self, g: &Mat) -> Result<bool> {
        let r = &*self.ring;
        Ok(match self.family {
            Family::Sl => g.det(r) == r.one(),
            Family::O => g.transpose().mul(g, r).is_identity(r),
            Family::Sp => {
                let j = ring_symplectic_form(self.n_param, r);
                g.transpose().mul(&j, r).mul(g, r) == j
            }
            Family::U => g.mul(&star_ring(g, r)?, r).is_identity(r),
        })
    }
}

pub fn ring_symplectic_form(n_param: usize, r: &LocalRing) -> Mat {
    let n = 2 * n_param;
    let mut j = Mat::zero(n);
    for i in 0..n_param {
        j.set(i, n_param + i, r.one());
        j.set(n_param + i, i, r.neg(r.one()));
    }
    j
}

/// Conjugacy class data of an enumerated group.
#[derive(Debug, Clone)]
pub struct Classes {
    /// Representative indices, ordered by representative key.
    pub reps: Vec<u32>,
    pub sizes: Vec<u64>,
    pub class_of: Vec<u32>,
    /// Class index of the inverses of class i.
    pub inverse_class: Vec<u32>,
}

/// A fully enumerated group of square matrices over `S`.
#[derive(Debug)]
pub struct FiniteGroup<S: Scalars> {
    pub n: usize,
    pub scalars: Arc<S>,
    pub elems: Vec<Mat>,
    pub index: HashMap<u128, u32>,
    pub inv_idx: Vec<u32>,
    pub gens: Vec<u32>,
    radix: u16,
    classes: OnceLock<Classes>,
}

impl<S: Scalars> FiniteGroup<S> {
    pub fn from_elements(scalars: Arc<S>, n: usize, mut elems: Vec<Mat>) -> Result<FiniteGroup<S>> {
        let radix = scalars.size() as u16;
        check_key_capacity(radix, n)?;
        elems.sort_by_key(|m| m.key(radix));
        elems.dedup();
        let index: HashMap<u128, u32> =
            elems.iter().enumerate().map(|(i, m)| (m.key(radix), i as u32)).collect();
        let inv_idx: Vec<u32> = {
            let pairs = maybe_par_map(&elems, |m| {
                let inv = m.inverse(&*scalars).ok_or_else(|| {
                    Error::Internal("group element without an inverse".into())
                })?;
                index
                    .get(&inv.key(radix))
                    .copied()
                    .ok_or_else(|| Error::CheckFailed("inverse escapes the element set".into()))
            });
            pairs.into_iter().collect::<Result<Vec<u32>>>()?
        };
        let mut g = FiniteGroup {
            n,
            scalars,
            elems,
            index,
            inv_idx,
            gens: Vec::new(),
            radix,
            classes: OnceLock::new(),
        };
        g.gens = g.compute_generators()?;
        Ok(g)
    }

    #[inline]
    pub fn order(&self) -> u64 {
        self.elems.len() as u64
    }

    #[inline]
    pub fn radix(&self) -> u16 {
        self.radix
    }

    #[inline]
    pub fn key_of(&self, m: &Mat) -> u128 {
        m.key(self.radix)
    }

    pub fn identity_index(&self) -> u32 {
        let id = Mat::identity(self.n, &*self.scalars);
        self.index[&self.key_of(&id)]
    }

    pub fn contains(&self, m: &Mat) -> bool {
        self.index.contains_key(&self.key_of(m))
    }

    pub fn mul_idx(&self, a: u32, b: u32) -> u32 {
        let m = self.elems[a as usize].mul(&self.elems[b as usize], &*self.scalars);
        self.index[&self.key_of(&m)]
    }

    /// Greedy generating set: scan elements in key order, adding any not
    /// generated yet. Closes in a handful of generators for these groups.
    fn compute_generators(&self) -> Result<Vec<u32>> {
        let mut gens: Vec<u32> = Vec::new();
        let mut covered: HashSet<u32> = HashSet::new();
        covered.insert(self.identity_index());
        for i in 0..self.elems.len() as u32 {
            if covered.contains(&i) {
                continue;
            }
            gens.push(i);
            // close the subgroup generated so far
            let mut queue: Vec<u32> = covered.iter().copied().collect();
            covered.insert(i);
            queue.push(i);
            while let Some(x) = queue.pop() {
                for &g in &gens {
                    for y in [self.mul_idx(x, g), self.mul_idx(g, x)] {
                        if covered.insert(y) {
                            queue.push(y);
                        }
                    }
                }
            }
            if covered.len() == self.elems.len() {
                break;
            }
        }
        if covered.len() != self.elems.len() {
            return Err(Error::CheckFailed("element set is not closed under products".into()));
        }
        Ok(gens)
    }

    /// Conjugacy classes via breadth-first conjugation by generators.
    pub fn classes(&self) -> &Classes {
        self.classes.get_or_init(|| {
            let m = self.elems.len();
            let mut class_of = vec![u32::MAX; m];
            let mut reps = Vec::new();
            let mut sizes = Vec::new();
            let gen_mats: Vec<(Mat, Mat)> = self
                .gens
                .iter()
                .map(|&g| {
                    (self.elems[g as usize].clone(), self.elems[self.inv_idx[g as usize] as usize].clone())
                })
                .collect();
            for start in 0..m {
                if class_of[start] != u32::MAX {
                    continue;
                }
                let cid = reps.len() as u32;
                let mut queue = vec![start as u32];
                class_of[start] = cid;
                let mut size = 0u64;
                while let Some(x) = queue.pop() {
                    size += 1;
                    let xm = &self.elems[x as usize];
                    for (g, ginv) in &gen_mats {
                        let y = xm.conj_by(g, ginv, &*self.scalars);
                        let yi = self.index[&self.key_of(&y)];
                        if class_of[yi as usize] == u32::MAX {
                            class_of[yi as usize] = cid;
                            queue.push(yi);
                        }
                    }
                }
                reps.push(start as u32);
                sizes.push(size);
            }
            let inverse_class: Vec<u32> = reps
                .iter()
                .map(|&r| class_of[self.inv_idx[r as usize] as usize])
                .collect();
            Classes { reps, sizes, class_of, inverse_class }
        })
    }

    /// Order of an element by iterated multiplication.
    pub fn element_order(&self, idx: u32) -> u64 {
        let id = self.identity_index();
        let mut cur = idx;
        let mut ord = 1u64;
        while cur != id {
            cur = self.mul_idx(cur, idx);
            ord += 1;
        }
        ord
    }

    /// Exact centralizer scan: indices of elements commuting with `a`
    /// (a matrix over the same scalars).
    pub fn centralizer_exact(&self, a: &Mat) -> Vec<u32> {
        let hits = maybe_par_map(&self.elems, |g| {
            g.mul(a, &*self.scalars) == a.mul(g, &*self.scalars)
        });
        hits.iter().enumerate().filter(|(_, &h)| h).map(|(i, _)| i as u32).collect()
    }

    /// Subgroup on a subset of element indices (must be closed).
    pub fn subgroup(&self, indices: &[u32]) -> Result<FiniteGroup<S>> {
        let elems: Vec<Mat> = indices.iter().map(|&i| self.elems[i as usize].clone()).collect();
        FiniteGroup::from_elements(self.scalars.clone(), self.n, elems)
    }
}

impl FiniteGroup<Fq> {
    /// Scalar-class centralizer: elements g with g a g^-1 = a + xI for
    /// some scalar x.
    pub fn centralizer_scalar_class(&self, a: &Mat) -> Vec<u32> {
        let f = &*self.scalars;
        let hits = maybe_par_map(&self.elems, |g| {
            let gi = g.inverse(f).unwrap();
            let c = a.conj_by(g, &gi, f).sub(a, f);
            is_scalar_mat(&c, f)
        });
        hits.iter().enumerate().filter(|(_, &h)| h).map(|(i, _)| i as u32).collect()
    }

    /// Scalars x realized as g a g^-1 - a over this group.
    pub fn realized_shifts(&self, a: &Mat) -> Vec<u16> {
        let f = &*self.scalars;
        let mut shifts: HashSet<u16> = HashSet::new();
        for g in &self.elems {
            let gi = g.inverse(f).unwrap();
            let c = a.conj_by(g, &gi, f).sub(a, f);
            if is_scalar_mat(&c, f) {
                shifts.insert(c.at(0, 0));
            }
        }
        let mut v: Vec<u16> = shifts.into_iter().collect();
        v.sort();
        v
    }
}

pub fn is_scalar_mat(m: &Mat, _f: &Fq) -> bool {
    let c = m.at(0, 0);
    for i in 0..m.n {
        for j in 0..m.n {
            if m.at(i, j) != (if i == j { c } else { 0 }) {
                return false;
            }
        }
    }
    true
}

fn check_key_capacity(radix: u16, n: usize) -> Result<()> {
    let mut acc: u128 = 1;
    for _ in 0..n * n {
        acc = acc
            .checked_mul(radix as u128)
            .ok_or_else(|| Error::InvalidConfig("matrix key exceeds 128 bits".into()))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------
// enumeration over the residue field
// ---------------------------------------------------------------------

/// Enumerate C(O_1). SL scans all matrices with a determinant test; the
/// isometry groups are built by extending partial column tuples against
/// the form, which prunes the search space.
pub fn enumerate_residue_group(
    spec: &GroupSpec,
    field: Arc<Fq>,
    budgets: &Budgets,
) -> Result<FiniteGroup<Fq>> {
    let n = spec.mat_n();
    let f = &*field;
    let elems: Vec<Mat> = match spec.family {
        Family::Sl => {
            let total = (f.q as u64).checked_pow((n * n) as u32).ok_or(Error::Budget {
                what: "SL matrix scan",
                needed: u64::MAX,
                cap: budgets.max_enum,
            })?;
            budgets.check_enum("SL matrix scan", total)?;
            let mut out = Vec::new();
            for key in 0..total {
                let m = Mat::from_key(key as u128, f.q, n);
                if m.det(f) == 1 {
                    out.push(m);
                }
            }
            out
        }
        Family::O | Family::U | Family::Sp => {
            enumerate_isometries(spec, f, budgets)?
        }
    };
    budgets.check_orbit("residue group order", elems.len() as u64)?;
    FiniteGroup::from_elements(field, n, elems)
}

/// Full GL_n(O_1), by scanning all matrices. Used for the ambient
/// stabilizer comparisons of the special linear family.
pub fn enumerate_gl(field: Arc<Fq>, n: usize, budgets: &Budgets) -> Result<FiniteGroup<Fq>> {
    let f = &*field;
    let total = (f.q as u64).checked_pow((n * n) as u32).ok_or(Error::Budget {
        what: "GL matrix scan",
        needed: u64::MAX,
        cap: budgets.max_enum,
    })?;
    budgets.check_enum("GL matrix scan", total)?;
    let mut out = Vec::new();
    for key in 0..total {
        let m = Mat::from_key(key as u128, f.q, n);
        if m.det(f) != 0 {
            out.push(m);
        }
    }
    FiniteGroup::from_elements(field, n, out)
}

fn enumerate_isometries(spec: &GroupSpec, f: &Fq, budgets: &Budgets) -> Result<Vec<Mat>> {
    let n = spec.mat_n();
    let vec_count = (f.q as u64).pow(n as u32);
    budgets.check_enum("isometry column candidates", vec_count.saturating_mul(n as u64))?;
    let all_vecs: Vec<Vec<u16>> = (0..vec_count)
        .map(|key| {
            let mut v = Vec::with_capacity(n);
            let mut k = key;
            for _ in 0..n {
                v.push((k % f.q as u64) as u16);
                k /= f.q as u64;
            }
            v
        })
        .collect();

    let dot = |a: &[u16], b: &[u16]| -> u16 {
        let mut acc = 0;
        for i in 0..n {
            acc = f.add(acc, f.mul(a[i], b[i]));
        }
        acc
    };
    let herm = |a: &[u16], b: &[u16]| -> u16 {
        // sum sigma(a_i) b_i
        let mut acc = 0;
        for i in 0..n {
            acc = f.add(acc, f.mul(f.frob_k(a[i], spec.base_deg), b[i]));
        }
        acc
    };
    let jform = (spec.family == Family::Sp).then(|| symplectic_form(spec.n_param, f));
    let jdot = |a: &[u16], b: &[u16]| -> u16 {
        let j = jform.as_ref().unwrap();
        let mut acc = 0;
        for i in 0..n {
            if a[i] == 0 {
                continue;
            }
            for k in 0..n {
                acc = f.add(acc, f.mul(a[i], f.mul(j.at(i, k), b[k])));
            }
        }
        acc
    };

    // column i constraint against column j<=i
    let ok = |cols: &[&Vec<u16>], cand: &Vec<u16>| -> bool {
        let i = cols.len();
        match spec.family {
            Family::O => {
                if dot(cand, cand) != 1 {
                    return false;
                }
                cols.iter().all(|c| dot(c, cand) == 0)
            }
            Family::U => {
                if herm(cand, cand) != 1 {
                    return false;
                }
                cols.iter().all(|c| herm(c, cand) == 0)
            }
            Family::Sp => {
                let j = jform.as_ref().unwrap();
                cols.iter().enumerate().all(|(jj, c)| jdot(c, cand) == j.at(jj, i))
            }
            Family::Sl => unreachable!(),
        }
    };

    let mut out = Vec::new();
    let mut stack: Vec<&Vec<u16>> = Vec::new();
    fn rec<'a>(
        all: &'a [Vec<u16>],
        stack: &mut Vec<&'a Vec<u16>>,
        n: usize,
        ok: &impl Fn(&[&Vec<u16>], &Vec<u16>) -> bool,
        out: &mut Vec<Mat>,
        cap: u64,
    ) -> Result<()> {
        if stack.len() == n {
            let mut m = Mat::zero(n);
            for (j, col) in stack.iter().enumerate() {
                for i in 0..n {
                    m.set(i, j, col[i]);
                }
            }
            out.push(m);
            if out.len() as u64 > cap {
                return Err(Error::Budget { what: "isometry group order", needed: out.len() as u64, cap });
            }
            return Ok(());
        }
        for cand in all {
            if ok(stack, cand) {
                stack.push(cand);
                rec(all, stack, n, ok, out, cap)?;
                stack.pop();
            }
        }
        Ok(())
    }
    rec(&all_vecs, &mut stack, n, &ok, &mut out, budgets.max_enum)?;
    Ok(out)
}

// ---------------------------------------------------------------------
// lifting along the reduction map
// ---------------------------------------------------------------------

/// Deterministic lift of a residue group element to the ring-level group:
/// section entrywise, then a correction that restores the defining
/// condition exactly. Odd residue characteristic makes 2 invertible,
/// which the O and U corrections use.
pub fn lift_element(spec: &GroupSpec, gbar: &Mat) -> Result<Mat> {
    let r = &*spec.ring;
    let f = &*r.field;
    let n = gbar.n;
    let g0 = lift_sections(gbar, r);
    let lifted = match spec.family {
        Family::Sl => {
            // det(g0) = 1 + pi d; scale the first row by (1 + pi d)^-1
            let d = g0.det(r);
            if r.reduce(d) != 1 {
                return Err(Error::Internal("reduction is not special linear".into()));
            }
            let corr = r.inv(d).unwrap();
            let mut g = g0;
            for j in 0..n {
                g.set(0, j, r.mul(corr, g.at(0, j)));
            }
            g
        }
        Family::O => {
            // g0^t g0 = I + pi E with E symmetric; g = g0 (I - pi E/2)
            let gram = g0.transpose().mul(&g0, r);
            let e = kernel_coordinate(&gram, r)?;
            let half = f.inv(f.from_prime(2)).unwrap();
            let y = e.smul(f.neg(half), f);
            g0.mul(&one_plus_pi(&y, r), r)
        }
        Family::U => {
            // g0 g0* = I + pi E with E Hermitian; g = g0 (I + pi Y),
            // Y + Y* = -gbar^-1 E (gbar*)^-1, take Y = -E'/2
            let gram = g0.mul(&star_ring(&g0, r)?, r);
            let e = kernel_coordinate(&gram, r)?;
            let gbar_inv = gbar.inverse(f).ok_or_else(|| Error::Internal("singular residue".into()))?;
            let star_inv = star_field(gbar, f, spec.base_deg)
                .inverse(f)
                .ok_or_else(|| Error::Internal("singular residue".into()))?;
            let e_prime = gbar_inv.mul(&e, f).mul(&star_inv, f);
            let half = f.inv(f.from_prime(2)).unwrap();
            let y = e_prime.smul(f.neg(half), f);
            g0.mul(&one_plus_pi(&y, r), r)
        }
        Family::Sp => {
            // g0^t J g0 = J + pi E (E antisymmetric); solve
            // Y^t J + J Y = -E over the residue field
            let jr = ring_symplectic_form(spec.n_param, r);
            let gram = g0.transpose().mul(&jr, r).mul(&g0, r);
            let diff = gram.sub(&jr, r);
            let mut e = Mat::zero(n);
            for i in 0..n {
                for j in 0..n {
                    let d = diff.at(i, j);
                    if r.coord_a(d) != 0 {
                        return Err(Error::Internal("symplectic defect is not in pi O".into()));
                    }
                    e.set(i, j, r.coord_b(d));
                }
            }
            let jbar = symplectic_form(spec.n_param, f);
            // linear system over F in the n^2 unknowns of Y
            let mut sys = FMat::zero(n * n, n * n);
            for (col, (bi, bj)) in (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).enumerate() {
                let mut basis = Mat::zero(n);
                basis.set(bi, bj, 1);
                let img = basis.transpose().mul(&jbar, f).add(&jbar.mul(&basis, f), f);
                for row in 0..n * n {
                    sys.set(row, col, img.e[row]);
                }
            }
            let rhs: Vec<u16> = e.neg(f).e.clone();
            let ysol = solve(&sys, &rhs, f)
                .ok_or_else(|| Error::Internal("symplectic lift correction unsolvable".into()))?;
            let y = Mat { n, e: ysol };
            g0.mul(&one_plus_pi(&y, r), r)
        }
    };
    if !spec.is_member_ring(&lifted)? {
        return Err(Error::Internal("lift correction failed to restore the form".into()));
    }
    if reduce_mat(&lifted, r) != *gbar {
        return Err(Error::Internal("lift changed the reduction".into()));
    }
    Ok(lifted)
}

// ---------------------------------------------------------------------
// enumeration over the ring
// ---------------------------------------------------------------------

/// Enumerate C(O_2) as {lift(gbar) (I + pi X)}: the lifts of C(O_1) tile
/// the group by kernel cosets.
pub fn enumerate_ring_group(
    spec: &GroupSpec,
    residue: &FiniteGroup<Fq>,
    lie: &LieSpace,
    budgets: &Budgets,
) -> Result<FiniteGroup<LocalRing>> {
    let total = residue.order().saturating_mul(lie.order());
    budgets.check_enum("ring group order", total)?;
    let r = spec.ring.clone();
    let kernel: Vec<Mat> = lie.enumerate().iter().map(|x| one_plus_pi(x, &r)).collect();
    let lifts: Vec<Mat> = residue
        .elems
        .iter()
        .map(|gbar| lift_element(spec, gbar))
        .collect::<Result<Vec<_>>>()?;
    let elems: Vec<Mat> = maybe_par_map(&lifts, |l| {
        kernel.iter().map(|k| l.mul(k, &*r)).collect::<Vec<Mat>>()
    })
    .into_iter()
    .flatten()
    .collect();
    if elems.len() as u64 != total {
        return Err(Error::Internal("kernel cosets do not tile the group".into()));
    }
    let g = FiniteGroup::from_elements(r, spec.mat_n(), elems)?;
    if g.order() != total {
        return Err(Error::Internal("lift/kernel products collide".into()));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{RingKind, RingSpec};

    fn budgets() -> Budgets {
        Budgets::default()
    }

    fn build(family: Family, n: usize, p: u16, m: u32, kind: RingKind) -> GroupSpec {
        let spec = RingSpec { kind, p, m, ext: family.needs_extension() };
        let ring = spec.build(&budgets()).unwrap();
        GroupSpec { family, n_param: n, ring, base_deg: m }
    }

    fn field_of(spec: &GroupSpec) -> Arc<Fq> {
        spec.ring.field.clone()
    }

    #[test]
    fn sl2_f3_has_24_elements() {
        let spec = build(Family::Sl, 2, 3, 1, RingKind::Unramified);
        let g = enumerate_residue_group(&spec, field_of(&spec), &budgets()).unwrap();
        assert_eq!(g.order(), 24);
    }

    #[test]
    fn o2_f3_order_matches_brute_scan() {
        let spec = build(Family::O, 2, 3, 1, RingKind::Unramified);
        let f = field_of(&spec);
        let g = enumerate_residue_group(&spec, f.clone(), &budgets()).unwrap();
        // independent oracle: scan all 3^4 matrices for g^t g = I
        let mut count = 0;
        for key in 0..81u128 {
            let m = Mat::from_key(key, 3, 2);
            if m.transpose().mul(&m, &*f).is_identity(&*f) {
                count += 1;
            }
        }
        assert_eq!(count, 8);
        assert_eq!(g.order(), 8);
    }

    #[test]
    fn o3_f3_order() {
        let spec = build(Family::O, 3, 3, 1, RingKind::Unramified);
        let g = enumerate_residue_group(&spec, field_of(&spec), &budgets()).unwrap();
        assert_eq!(g.order(), 48);
    }

    #[test]
    fn u2_f9_order_matches_brute_scan() {
        let spec = build(Family::U, 2, 3, 1, RingKind::Unramified);
        let f = field_of(&spec);
        let g = enumerate_residue_group(&spec, f.clone(), &budgets()).unwrap();
        let mut count = 0;
        for key in 0..6561u128 {
            let m = Mat::from_key(key, 9, 2);
            if m.mul(&star_field(&m, &f, 1), &*f).is_identity(&*f) {
                count += 1;
            }
        }
        assert_eq!(count, 96);
        assert_eq!(g.order(), 96);
    }

    #[test]
    fn sp1_equals_sl2_elementwise() {
        for kind in [RingKind::Unramified, RingKind::Ramified] {
            let sp = build(Family::Sp, 1, 3, 1, kind);
            let sl = build(Family::Sl, 2, 3, 1, kind);
            let gsp = enumerate_residue_group(&sp, field_of(&sp), &budgets()).unwrap();
            let gsl = enumerate_residue_group(&sl, field_of(&sl), &budgets()).unwrap();
            assert_eq!(gsp.elems, gsl.elems);
        }
    }

    #[test]
    fn sl2_f3_class_count_matches_partition_oracle() {
        let spec = build(Family::Sl, 2, 3, 1, RingKind::Unramified);
        let g = enumerate_residue_group(&spec, field_of(&spec), &budgets()).unwrap();
        let classes = g.classes();
        assert_eq!(classes.reps.len(), 7);
        assert_eq!(classes.sizes.iter().sum::<u64>(), 24);
        let mut sizes = classes.sizes.clone();
        sizes.sort();
        assert_eq!(sizes, vec![1, 1, 4, 4, 4, 4, 6]);

        // independent oracle: pairwise conjugation partition
        let f = &*g.scalars;
        let mut seen: HashSet<u128> = HashSet::new();
        let mut count = 0;
        for a in &g.elems {
            if seen.contains(&g.key_of(a)) {
                continue;
            }
            count += 1;
            for x in &g.elems {
                let xi = x.inverse(f).unwrap();
                seen.insert(g.key_of(&a.conj_by(x, &xi, f)));
            }
        }
        assert_eq!(count, 7);
    }

    #[test]
    fn lifts_are_exact_and_exhaustive() {
        for kind in [RingKind::Unramified, RingKind::Ramified] {
            for (family, n) in [(Family::O, 2), (Family::Sl, 2), (Family::Sp, 1), (Family::U, 2)] {
                let spec = build(family, n, 3, 1, kind);
                let g = enumerate_residue_group(&spec, field_of(&spec), &budgets()).unwrap();
                for gbar in &g.elems {
                    let lift = lift_element(&spec, gbar).unwrap();
                    assert!(spec.is_member_ring(&lift).unwrap());
                    assert_eq!(reduce_mat(&lift, &spec.ring), *gbar);
                }
            }
        }
    }

    #[test]
    fn sl2_det_of_lift_is_one_in_z9() {
        let spec = build(Family::Sl, 2, 3, 1, RingKind::Unramified);
        let g = enumerate_residue_group(&spec, field_of(&spec), &budgets()).unwrap();
        for gbar in &g.elems {
            let lift = lift_element(&spec, gbar).unwrap();
            assert_eq!(spec.ring.to_int(lift.det(&*spec.ring)).unwrap(), 1);
        }
    }

    #[test]
    fn ring_group_orders() {
        for kind in [RingKind::Unramified, RingKind::Ramified] {
            let spec = build(Family::Sl, 2, 3, 1, kind);
            let f = field_of(&spec);
            let res = enumerate_residue_group(&spec, f.clone(), &budgets()).unwrap();
            let lie = LieSpace::new(Family::Sl, 2, f, 1).unwrap();
            let g2 = enumerate_ring_group(&spec, &res, &lie, &budgets()).unwrap();
            assert_eq!(g2.order(), 648);

            let ospec = build(Family::O, 2, 3, 1, kind);
            let of = field_of(&ospec);
            let ores = enumerate_residue_group(&ospec, of.clone(), &budgets()).unwrap();
            let olie = LieSpace::new(Family::O, 2, of, 1).unwrap();
            let og2 = enumerate_ring_group(&ospec, &ores, &olie, &budgets()).unwrap();
            assert_eq!(og2.order(), 24);
        }
    }

    #[test]
    fn kernel_of_reduction_is_exactly_one_plus_pi_mc() {
        let spec = build(Family::Sl, 2, 3, 1, RingKind::Ramified);
        let f = field_of(&spec);
        let res = enumerate_residue_group(&spec, f.clone(), &budgets()).unwrap();
        let lie = LieSpace::new(Family::Sl, 2, f.clone(), 1).unwrap();
        let g2 = enumerate_ring_group(&spec, &res, &lie, &budgets()).unwrap();
        let r = &spec.ring;
        let kernel_keys: HashSet<u128> = lie
            .enumerate()
            .iter()
            .map(|x| g2.key_of(&one_plus_pi(x, r)))
            .collect();
        let mut seen = 0;
        for g in &g2.elems {
            if reduce_mat(g, r).is_identity(&*f) {
                assert!(kernel_keys.contains(&g2.key_of(g)));
                seen += 1;
            }
        }
        assert_eq!(seen, kernel_keys.len());
        // homomorphism + surjectivity: reductions hit every residue element
        let images: HashSet<u128> =
            g2.elems.iter().map(|g| reduce_mat(g, r).key(f.q)).collect();
        assert_eq!(images.len(), res.order() as usize);
    }

    #[test]
    fn centralizer_modes() {
        let spec = build(Family::Sl, 2, 3, 1, RingKind::Unramified);
        let f = field_of(&spec);
        let g = enumerate_residue_group(&spec, f.clone(), &budgets()).unwrap();
        // A = 0: whole group
        let zero = Mat::zero(2);
        assert_eq!(g.centralizer_exact(&zero).len(), 24);
        // regular split semisimple: diagonal torus in SL_2(F_3), order 2
        let a = Mat::from_rows(&[&[1, 0], &[0, 2]]);
        let c = g.centralizer_exact(&a);
        assert_eq!(c.len(), 2);
        let sub = g.subgroup(&c).unwrap();
        assert_eq!(sub.order(), 2);
    }

    #[test]
    fn scalar_class_centralizer_strictly_larger_somewhere_when_p_divides_n() {
        let budget = budgets();
        let f = Arc::new(Fq::new(3, 1).unwrap());
        let gl = enumerate_gl(f.clone(), 3, &budget).unwrap();
        assert_eq!(gl.order(), 11232);
        // exhaustive witness search over diagonal matrices
        let mut found = false;
        for key in 0..27u16 {
            let a = Mat::from_rows(&[
                &[key % 3, 0, 0],
                &[0, (key / 3) % 3, 0],
                &[0, 0, (key / 9) % 3],
            ]);
            let exact = gl.centralizer_exact(&a).len();
            let class = gl.centralizer_scalar_class(&a).len();
            assert!(class >= exact);
            if class > exact {
                found = true;
            }
        }
        assert!(found, "scalar-class centralizer exceeds exact centralizer for some A");
    }

    #[test]
    fn budget_refusal_is_explicit() {
        let tight = Budgets { max_enum: 10, max_orbit_group: 10, max_q: 9 };
        let spec = build(Family::Sl, 2, 3, 1, RingKind::Unramified);
        let err = enumerate_residue_group(&spec, field_of(&spec), &tight);
        assert!(matches!(err, Err(Error::Budget { .. })));
    }
}
