//! Exact Jordan canonical form over F_q for matrices with split
//! characteristic polynomial, and the cycle arrangement of eigenvalues
//! used by the special linear family when p divides n.
//!
//! Non-split inputs are not an error: `jordan_form` returns the
//! factorization instead, and callers fall back to a search-based path.

use crate::error::{Error, Result};
use crate::field::Fq;
use crate::mat::{FMat, Mat};

/// All Jordan data for one eigenvalue: block sizes in decreasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenBlocks {
    pub eigen: u16,
    pub sizes: Vec<usize>,
}

impl EigenBlocks {
    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }
}

/// P^-1 A P = J with J block diagonal, grouped by eigenvalue in field
/// index order; each group is a direct sum of Jordan blocks (ones on the
/// superdiagonal) in decreasing size order.
#[derive(Debug, Clone)]
pub struct JordanForm {
    pub groups: Vec<EigenBlocks>,
    pub p_mat: Mat,
    pub p_inv: Mat,
    pub jmat: Mat,
}

#[derive(Debug, Clone)]
pub enum JordanOutcome {
    Split(JordanForm),
    /// Characteristic polynomial does not split; carries the monic
    /// irreducible factors (lowest-degree coefficients first).
    SplitFailure { factors: Vec<Vec<u16>> },
}

/// Characteristic polynomial det(xI - A), coefficients lowest first,
/// monic of degree n. Laplace expansion over the polynomial ring; fine for
/// the small n this crate handles.
pub fn char_poly(f: &Fq, a: &Mat) -> Vec<u16> {
    let n = a.n;
    // entries of xI - A as degree<=1 polynomials
    let entry = |i: usize, j: usize| -> Vec<u16> {
        if i == j {
            vec![f.neg(a.at(i, j)), 1]
        } else {
            vec![f.neg(a.at(i, j)), 0]
        }
    };
    let rows: Vec<usize> = (0..n).collect();
    let cols: Vec<usize> = (0..n).collect();
    poly_det(f, &entry, &rows, &cols)
}

fn poly_det(
    f: &Fq,
    entry: &impl Fn(usize, usize) -> Vec<u16>,
    rows: &[usize],
    cols: &[usize],
) -> Vec<u16> {
    if rows.is_empty() {
        return vec![1];
    }
    let mut acc = vec![0u16];
    let r = rows[0];
    let rest: Vec<usize> = rows[1..].to_vec();
    for (k, &c) in cols.iter().enumerate() {
        let e = entry(r, c);
        if e.iter().all(|&v| v == 0) {
            continue;
        }
        let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = poly_det(f, entry, &rest, &sub_cols);
        let mut term = poly_mul(f, &e, &minor);
        if k % 2 == 1 {
            for v in term.iter_mut() {
                *v = f.neg(*v);
            }
        }
        acc = poly_add(f, &acc, &term);
    }
    acc
}

pub fn poly_mul(f: &Fq, a: &[u16], b: &[u16]) -> Vec<u16> {
    let mut out = vec![0u16; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(ai, bj));
        }
    }
    out
}

pub fn poly_add(f: &Fq, a: &[u16], b: &[u16]) -> Vec<u16> {
    let mut out = vec![0u16; a.len().max(b.len())];
    for (i, &v) in a.iter().enumerate() {
        out[i] = v;
    }
    for (i, &v) in b.iter().enumerate() {
        out[i] = f.add(out[i], v);
    }
    out
}

pub fn poly_eval(f: &Fq, a: &[u16], x: u16) -> u16 {
    let mut acc = 0;
    for &c in a.iter().rev() {
        acc = f.add(f.mul(acc, x), c);
    }
    acc
}

/// Divide by the linear factor (x - root); the division must be exact.
fn poly_deflate(f: &Fq, a: &[u16], root: u16) -> Vec<u16> {
    // synthetic division
    let mut out = vec![0u16; a.len() - 1];
    let mut carry = 0u16;
    for i in (0..a.len()).rev() {
        let v = f.add(a[i], f.mul(root, carry));
        if i == 0 {
            debug_assert_eq!(v, 0, "deflation by a non-root");
        } else {
            out[i - 1] = v;
            carry = v;
        }
    }
    out
}

/// Monic irreducible factors of a monic polynomial, by root stripping and
/// trial division over the (small) field. Degrees up to 4 are all this
/// crate needs; the trial division handles anything of degree <= 5.
pub fn factor_monic(f: &Fq, poly: &[u16]) -> Vec<Vec<u16>> {
    let mut rest = poly.to_vec();
    let mut out = Vec::new();
    // strip linear factors
    loop {
        if rest.len() <= 1 {
            break;
        }
        let root = (0..f.q).find(|&x| poly_eval(f, &rest, x) == 0);
        match root {
            Some(r) => {
                out.push(vec![f.neg(r), 1]);
                rest = poly_deflate(f, &rest, r);
            }
            None => break,
        }
    }
    let mut deg = rest.len().saturating_sub(1);
    if deg <= 1 {
        if deg == 1 {
            out.push(rest);
        }
        out.sort();
        return out;
    }
    // no roots left: factor by monic divisors of degree 2 (then what
    // remains of degree <= 3 is irreducible)
    'outer: while deg > 3 {
        for c0 in 0..f.q {
            for c1 in 0..f.q {
                let d = vec![c0, c1, 1];
                if let Some(q) = poly_div_exact(f, &rest, &d) {
                    out.push(d);
                    rest = q;
                    deg = rest.len() - 1;
                    continue 'outer;
                }
            }
        }
        break;
    }
    if rest.len() > 1 {
        out.push(rest);
    }
    out.sort();
    out
}

fn poly_div_exact(f: &Fq, a: &[u16], d: &[u16]) -> Option<Vec<u16>> {
    let mut r = a.to_vec();
    let dd = d.len() - 1;
    let mut q = vec![0u16; a.len() - dd];
    while r.len() > dd {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dd;
        q[shift] = lead;
        for (i, &di) in d.iter().enumerate() {
            r[i + shift] = f.sub(r[i + shift], f.mul(lead, di));
        }
        while r.last() == Some(&0) && r.len() > 1 {
            r.pop();
        }
        if r.iter().all(|&v| v == 0) {
            r = vec![0];
        }
        if r.len() <= dd {
            break;
        }
    }
    if r.iter().all(|&v| v == 0) {
        Some(q)
    } else {
        None
    }
}

pub fn jordan_form(f: &Fq, a: &Mat) -> JordanOutcome {
    let n = a.n;
    let cp = char_poly(f, a);
    // eigenvalues with algebraic multiplicities
    let mut rest = cp.clone();
    let mut eigens: Vec<(u16, usize)> = Vec::new();
    for x in 0..f.q {
        let mut mult = 0;
        while rest.len() > 1 && poly_eval(f, &rest, x) == 0 {
            rest = poly_deflate(f, &rest, x);
            mult += 1;
        }
        if mult > 0 {
            eigens.push((x, mult));
        }
    }
    if eigens.iter().map(|&(_, m)| m).sum::<usize>() != n {
        return JordanOutcome::SplitFailure { factors: factor_monic(f, &cp) };
    }

    // assemble chains eigenvalue by eigenvalue, in field index order
    let mut groups = Vec::new();
    let mut columns: Vec<Vec<u16>> = Vec::new();
    for &(lam, mult) in &eigens {
        let nmat = a.sub(&Mat::scalar(n, lam, f), f);
        let (sizes, chain_cols) = nilpotent_chains(f, &nmat, mult);
        groups.push(EigenBlocks { eigen: lam, sizes });
        columns.extend(chain_cols);
    }

    let mut p = Mat::zero(n);
    for (j, col) in columns.iter().enumerate() {
        for i in 0..n {
            p.set(i, j, col[i]);
        }
    }
    let p_inv = p.inverse(f).expect("Jordan basis is invertible");
    let jmat = p_inv.mul(a, f).mul(&p, f);
    let form = JordanForm { groups, p_mat: p, p_inv, jmat };
    debug_assert_eq!(form.jmat, assemble_jordan(f, n, &form.groups));
    JordanOutcome::Split(form)
}

/// The block matrix determined by the groups (ones on superdiagonals).
pub fn assemble_jordan(_f: &Fq, n: usize, groups: &[EigenBlocks]) -> Mat {
    let mut j = Mat::zero(n);
    let mut pos = 0;
    for g in groups {
        for &sz in &g.sizes {
            for k in 0..sz {
                j.set(pos + k, pos + k, g.eigen);
                if k + 1 < sz {
                    j.set(pos + k, pos + k + 1, 1);
                }
            }
            pos += sz;
        }
    }
    j
}

/// Jordan chains of a nilpotent-on-its-generalized-eigenspace matrix N
/// restricted to ker(N^n); returns (block sizes desc, basis columns in
/// chain order bottom-up: N^{h-1}v, .., Nv, v per chain).
fn nilpotent_chains(f: &Fq, nmat: &Mat, mult: usize) -> (Vec<usize>, Vec<Vec<u16>>) {
    let n = nmat.n;
    // kernels of N^k as column spans
    let mut powers = vec![Mat::identity(n, f)];
    for _ in 0..n {
        let last = powers.last().unwrap().mul(nmat, f);
        powers.push(last);
    }
    let kernel_basis = |k: usize| -> Vec<Vec<u16>> {
        let m = &powers[k];
        let mut fm = FMat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                fm.set(i, j, m.at(i, j));
            }
        }
        fm.kernel(f)
    };
    let mut h = 1;
    while kernel_basis(h).len() < mult {
        h += 1;
    }

    // incremental span tracking via row reduction
    struct Span {
        f_p: FMat,
        rank: usize,
    }
    impl Span {
        fn new(n: usize) -> Span {
            Span { f_p: FMat::zero(0, n), rank: 0 }
        }
        fn contains(&self, f: &Fq, v: &[u16]) -> bool {
            let mut m = self.f_p.clone();
            m.rows += 1;
            m.d.extend_from_slice(v);
            m.rank(f) == self.rank
        }
        fn insert(&mut self, f: &Fq, v: &[u16]) {
            if !self.contains(f, v) {
                self.f_p.rows += 1;
                self.f_p.d.extend_from_slice(v);
                self.rank += 1;
            }
        }
    }

    let apply = |m: &Mat, v: &[u16]| -> Vec<u16> {
        (0..n)
            .map(|i| {
                let mut acc = 0u16;
                for j in 0..n {
                    acc = f.add(acc, f.mul(m.at(i, j), v[j]));
                }
                acc
            })
            .collect()
    };

    // chains[c] = (height, top vector)
    let mut chains: Vec<(usize, Vec<u16>)> = Vec::new();
    for k in (1..=h).rev() {
        let mut span = Span::new(n);
        for v in kernel_basis(k - 1) {
            span.insert(f, &v);
        }
        // level-k vectors of taller chains
        for &(height, ref top) in &chains {
            let mut v = top.clone();
            for _ in 0..height - k {
                v = apply(nmat, &v);
            }
            span.insert(f, &v);
        }
        for v in kernel_basis(k) {
            if !span.contains(f, &v) {
                span.insert(f, &v);
                chains.push((k, v));
            }
        }
    }
    chains.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));

    let mut sizes = Vec::new();
    let mut cols = Vec::new();
    for (height, top) in &chains {
        sizes.push(*height);
        let mut chain = vec![top.clone()];
        for _ in 1..*height {
            let last = chain.last().unwrap();
            chain.push(apply(nmat, last));
        }
        chain.reverse(); // N^{h-1}v first
        cols.extend(chain);
    }
    (sizes, cols)
}

// ---------------------------------------------------------------------
// eigenvalue cycles for the special linear family with p | n
// ---------------------------------------------------------------------

/// The arrangement of the distinct eigenvalues of A into cycles of length
/// p with step x: row i lists a_{i1}, a_{i1}+x, .., a_{i1}+(p-1)x, rows
/// sorted by their minimal eigenvalue, each row starting at its minimum.
/// Valid only when A is conjugate to A + xI, which forces the blocks of
/// each eigenvalue in a cycle to share one Jordan structure.
#[derive(Debug, Clone)]
pub struct CycleArrangement {
    pub x: u16,
    /// Number of cycles.
    pub r: usize,
    pub p_len: usize,
    /// grid[i][j]: blocks of the eigenvalue at cycle i, position j.
    pub grid: Vec<Vec<EigenBlocks>>,
    /// The conjugating matrix and the rearranged block-diagonal form.
    pub p_mat: Mat,
    pub p_inv: Mat,
    pub jmat: Mat,
    /// Column offsets of each grid cell in the rearranged form.
    pub offsets: Vec<Vec<usize>>,
}

/// Rearrange a split Jordan form so the eigenvalue groups sit in cycle
/// order. Signals an inconsistency when the eigenvalue set is not a
/// disjoint union of full x-cycles or when block structures differ within
/// a forced cycle (either would contradict A being conjugate to A + xI).
pub fn arrange_cycles(f: &Fq, jf: &JordanForm, x: u16) -> Result<CycleArrangement> {
    if x == 0 {
        return Err(Error::InvalidConfig("cycle step x must be nonzero".into()));
    }
    let p = f.p as usize;
    let by_eigen: std::collections::HashMap<u16, &EigenBlocks> =
        jf.groups.iter().map(|g| (g.eigen, g)).collect();
    let mut seen: std::collections::HashSet<u16> = std::collections::HashSet::new();
    let mut cycles: Vec<Vec<u16>> = Vec::new();
    let mut starts: Vec<u16> = by_eigen.keys().copied().collect();
    starts.sort();
    for &start in &starts {
        if seen.contains(&start) {
            continue;
        }
        // walk the forward orbit under +x
        let mut cyc = vec![start];
        let mut cur = start;
        for _ in 1..p {
            cur = f.add(cur, x);
            cyc.push(cur);
        }
        // the cycle must close up and stay inside the spectrum
        if f.add(cur, x) != start {
            return Err(Error::Internal("eigenvalue cycle does not close".into()));
        }
        // choose the minimal eigenvalue as the starting point
        let min_pos = cyc
            .iter()
            .enumerate()
            .min_by_key(|&(_, &e)| e)
            .map(|(i, _)| i)
            .unwrap();
        cyc.rotate_left(min_pos);
        for &e in &cyc {
            if !by_eigen.contains_key(&e) {
                return Err(Error::CheckFailed(format!(
                    "spectrum is not closed under +x: missing eigenvalue index {e}"
                )));
            }
            seen.insert(e);
        }
        cycles.push(cyc);
    }
    cycles.sort_by_key(|c| c[0]);

    // identical block structure along each cycle
    for cyc in &cycles {
        let first = &by_eigen[&cyc[0]].sizes;
        for &e in &cyc[1..] {
            if &by_eigen[&e].sizes != first {
                return Err(Error::CheckFailed(
                    "Jordan structures differ inside a forced eigenvalue cycle".into(),
                ));
            }
        }
    }

    // permute the columns of P so that groups appear in cycle order
    let n = jf.p_mat.n;
    let mut old_offsets: std::collections::HashMap<u16, usize> = std::collections::HashMap::new();
    let mut pos = 0;
    for g in &jf.groups {
        old_offsets.insert(g.eigen, pos);
        pos += g.total();
    }
    let mut col_order: Vec<usize> = Vec::with_capacity(n);
    let mut grid = Vec::new();
    let mut offsets = Vec::new();
    let mut newpos = 0;
    for cyc in &cycles {
        let mut row = Vec::new();
        let mut row_off = Vec::new();
        for &e in cyc {
            let g = by_eigen[&e];
            let start = old_offsets[&e];
            for k in 0..g.total() {
                col_order.push(start + k);
            }
            row_off.push(newpos);
            newpos += g.total();
            row.push(g.clone());
        }
        grid.push(row);
        offsets.push(row_off);
    }

    let mut p_mat = Mat::zero(n);
    for (newj, &oldj) in col_order.iter().enumerate() {
        for i in 0..n {
            p_mat.set(i, newj, jf.p_mat.at(i, oldj));
        }
    }
    let p_inv = p_mat.inverse(f).expect("permuted Jordan basis stays invertible");
    let groups_flat: Vec<EigenBlocks> =
        grid.iter().flat_map(|row| row.iter().cloned()).collect();
    let jmat = assemble_jordan(f, n, &groups_flat);

    Ok(CycleArrangement {
        x,
        r: cycles.len(),
        p_len: p,
        grid,
        p_mat,
        p_inv,
        jmat,
        offsets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Fq {
        Fq::new(3, 1).unwrap()
    }

    #[test]
    fn char_poly_of_companion() {
        let f = f3();
        // companion of x^2 + 1 (irreducible over F_3)
        let a = Mat::from_rows(&[&[0, 2], &[1, 0]]);
        assert_eq!(char_poly(&f, &a), vec![1, 0, 1]);
    }

    #[test]
    fn zero_matrix_is_one_group() {
        let f = f3();
        let a = Mat::zero(3);
        match jordan_form(&f, &a) {
            JordanOutcome::Split(jf) => {
                assert_eq!(jf.groups.len(), 1);
                assert_eq!(jf.groups[0].eigen, 0);
                assert_eq!(jf.groups[0].sizes, vec![1, 1, 1]);
            }
            _ => panic!("zero matrix splits"),
        }
    }

    #[test]
    fn nilpotent_block_already_in_form() {
        let f = f3();
        let a = Mat::from_rows(&[&[0, 1], &[0, 0]]);
        match jordan_form(&f, &a) {
            JordanOutcome::Split(jf) => {
                assert_eq!(jf.groups[0].sizes, vec![2]);
                assert_eq!(jf.jmat, a);
            }
            _ => panic!("expected split"),
        }
    }

    #[test]
    fn companion_of_irreducible_quadratic_fails_to_split() {
        let f = f3();
        // oracle: x^2 + 1 has no roots over F_3
        for x in 0..3u16 {
            assert_ne!(f.add(f.mul(x, x), 1), 0);
        }
        let a = Mat::from_rows(&[&[0, 2], &[1, 0]]);
        match jordan_form(&f, &a) {
            JordanOutcome::SplitFailure { factors } => {
                assert_eq!(factors, vec![vec![1, 0, 1]]);
            }
            _ => panic!("must not split"),
        }
    }

    #[test]
    fn reconstruction_check_on_random_split_matrices() {
        let f = f3();
        let mut s = 99usize;
        let mut split_seen = 0;
        while split_seen < 120 {
            let n = 2 + s % 3;
            let mut a = Mat::zero(n);
            for i in 0..n * n {
                s = s.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
                a.e[i] = (s % 3) as u16;
            }
            if let JordanOutcome::Split(jf) = jordan_form(&f, &a) {
                split_seen += 1;
                assert!(jf.p_mat.inverse(&f).is_some());
                assert_eq!(jf.p_inv.mul(&a, &f).mul(&jf.p_mat, &f), jf.jmat);
            }
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        }
    }

    #[test]
    fn arrange_full_cycle_diag() {
        let f = f3();
        let a = Mat::from_rows(&[&[0, 0, 0], &[0, 1, 0], &[0, 0, 2]]);
        let JordanOutcome::Split(jf) = jordan_form(&f, &a) else { panic!() };
        let arr = arrange_cycles(&f, &jf, 1).unwrap();
        assert_eq!(arr.r, 1);
        assert_eq!(arr.grid[0].iter().map(|g| g.eigen).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(arr.p_inv.mul(&a, &f).mul(&arr.p_mat, &f), arr.jmat);
    }

    #[test]
    fn arrange_mixed_blocks_single_cycle() {
        // 9x9: J2 and J1 blocks at each of 0, 1, 2. The eigenvalue set is
        // one x-cycle {0,1,2}; blocks match along the cycle, so r = 1.
        // Oracle: A and A + I share Jordan data, hence are conjugate.
        let f = f3();
        let groups = vec![
            EigenBlocks { eigen: 0, sizes: vec![2, 1] },
            EigenBlocks { eigen: 1, sizes: vec![2, 1] },
            EigenBlocks { eigen: 2, sizes: vec![2, 1] },
        ];
        let a = assemble_jordan(&f, 9, &groups);
        let shifted = a.add(&Mat::scalar(9, 1, &f), &f);
        let (JordanOutcome::Split(ja), JordanOutcome::Split(js)) =
            (jordan_form(&f, &a), jordan_form(&f, &shifted))
        else {
            panic!()
        };
        let data_a: Vec<_> = ja.groups.iter().map(|g| (g.eigen, g.sizes.clone())).collect();
        let data_s: Vec<_> = js.groups.iter().map(|g| (g.eigen, g.sizes.clone())).collect();
        assert_eq!(data_a, data_s, "A conjugate to A + I");

        let arr = arrange_cycles(&f, &ja, 1).unwrap();
        assert_eq!(arr.r, 1);
        assert_eq!(arr.grid[0][0].sizes, vec![2, 1]);
    }

    #[test]
    fn arrange_rejects_non_conjugate_shift() {
        let f = f3();
        let a = Mat::from_rows(&[&[0, 0], &[0, 1]]);
        let JordanOutcome::Split(jf) = jordan_form(&f, &a) else { panic!() };
        assert!(arrange_cycles(&f, &jf, 1).is_err());
    }
}
