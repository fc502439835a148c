//! Exact integer linear algebra: relation matrices, Smith normal form,
//! first Betti number and torsion of the abelianization.
//!
//! Entries are arbitrary-precision integers throughout; there is no
//! fixed-width fast path. Intermediate growth during Smith reduction would
//! silently corrupt Betti numbers otherwise.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::presentations::FinitePresentation;

/// Dense row-major matrix of exact integers. Zero-row and zero-column
/// matrices are legal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| BigInt::from(x)))
            .collect();
        IntMatrix { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let add = a * rhs.get(k, j);
                    let cur = out.get(i, j) + add;
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row_i -= q * row_j`
    fn row_sub_mul(&mut self, i: usize, j: usize, q: &BigInt) {
        for c in 0..self.cols {
            let v = self.get(i, c) - q * self.get(j, c);
            self.set(i, c, v);
        }
    }

    /// `col_i -= q * col_j`
    fn col_sub_mul(&mut self, i: usize, j: usize, q: &BigInt) {
        for r in 0..self.rows {
            let v = self.get(r, i) - q * self.get(r, j);
            self.set(r, i, v);
        }
    }

    /// `row_i += row_j`
    fn row_add(&mut self, i: usize, j: usize) {
        for c in 0..self.cols {
            let v = self.get(i, c) + self.get(j, c);
            self.set(i, c, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let v = -self.get(i, c);
            self.set(i, c, v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }
}

/// `U * A * V = D` with `U`, `V` unimodular and `D` diagonal with positive
/// invariant factors forming a divisibility chain.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub invariant_factors: Vec<BigInt>,
    pub rank: usize,
}

impl SmithDecomposition {
    /// Exact structural check against the input matrix: `U*A*V = D`,
    /// diagonal shape, positive factors, divisibility chain.
    pub fn verify(&self, a: &IntMatrix) -> bool {
        if self.u.mul(a).mul(&self.v) != self.d {
            return false;
        }
        for i in 0..self.d.rows() {
            for j in 0..self.d.cols() {
                if i != j && !self.d.get(i, j).is_zero() {
                    return false;
                }
            }
        }
        if self.invariant_factors.len() != self.rank {
            return false;
        }
        for (i, f) in self.invariant_factors.iter().enumerate() {
            if !f.is_positive() || self.d.get(i, i) != f {
                return false;
            }
            if i + 1 < self.invariant_factors.len()
                && !self.invariant_factors[i + 1].is_multiple_of(f)
            {
                return false;
            }
        }
        let limit = self.d.rows().min(self.d.cols());
        (self.rank..limit).all(|i| self.d.get(i, i).is_zero())
    }
}

/// Abelianized relation data: entry `(i, j)` is the exponent sum of
/// generator `j` in relator `i`.
pub fn relation_matrix(p: &FinitePresentation) -> IntMatrix {
    let m = p.relator_count();
    let g = p.generator_count();
    let mut out = IntMatrix::zeros(m, g);
    for (i, r) in p.relators().iter().enumerate() {
        for j in 0..g {
            out.set(i, j, BigInt::from(r.exponent_sum(j)));
        }
    }
    out
}

fn select_pivot(w: &IntMatrix, p: usize) -> Option<(usize, usize)> {
    let mut best: Option<(BigInt, usize, usize)> = None;
    for i in p..w.rows() {
        for j in p..w.cols() {
            let e = w.get(i, j);
            if e.is_zero() {
                continue;
            }
            let a = e.abs();
            match &best {
                Some((m, _, _)) if *m <= a => {}
                _ => best = Some((a, i, j)),
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

/// Smith normal form by Euclidean elimination. Pivot rule: the nonzero
/// entry of smallest absolute value in the remaining submatrix; row and
/// column remainders re-enter as new pivots until both are clear, then a
/// non-divisible submatrix entry (if any) is mixed into the pivot row and
/// reduction repeats. This keeps intermediate entries small at desk scale
/// and produces the divisibility chain directly.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let m = a.rows();
    let g = a.cols();
    let mut w = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(g);
    let limit = m.min(g);
    let mut p = 0;
    let mut iters: u64 = 0;
    'pivot: while p < limit {
        iters += 1;
        if iters > 1_000_000 {
            panic!("SNF did not converge: pivot {p}, state {w:?}");
        }
        let Some((pi, pj)) = select_pivot(&w, p) else {
            break;
        };
        w.swap_rows(p, pi);
        u.swap_rows(p, pi);
        w.swap_cols(p, pj);
        v.swap_cols(p, pj);
        loop {
            iters += 1;
            if iters > 1_000_000 {
                panic!("SNF did not converge: pivot {p}, state {w:?}");
            }
            let mut clean = true;
            for i in (p + 1)..m {
                if w.get(i, p).is_zero() {
                    continue;
                }
                let q = w.get(i, p).div_floor(w.get(p, p));
                if !q.is_zero() {
                    w.row_sub_mul(i, p, &q);
                    u.row_sub_mul(i, p, &q);
                }
                if !w.get(i, p).is_zero() {
                    w.swap_rows(p, i);
                    u.swap_rows(p, i);
                    clean = false;
                }
            }
            for j in (p + 1)..g {
                if w.get(p, j).is_zero() {
                    continue;
                }
                let q = w.get(p, j).div_floor(w.get(p, p));
                if !q.is_zero() {
                    w.col_sub_mul(j, p, &q);
                    v.col_sub_mul(j, p, &q);
                }
                if !w.get(p, j).is_zero() {
                    w.swap_cols(p, j);
                    v.swap_cols(p, j);
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // row p and column p are clear; enforce that the pivot divides
            // every remaining entry before moving on
            let piv = w.get(p, p).clone();
            let mut mixed = false;
            'search: for i in (p + 1)..m {
                for j in (p + 1)..g {
                    if !w.get(i, j).is_multiple_of(&piv) {
                        w.row_add(p, i);
                        u.row_add(p, i);
                        mixed = true;
                        break 'search;
                    }
                }
            }
            if !mixed {
                p += 1;
                continue 'pivot;
            }
        }
    }
    for i in 0..limit {
        if w.get(i, i).is_negative() {
            w.negate_row(i);
            u.negate_row(i);
        }
    }
    let mut invariant_factors = Vec::new();
    for i in 0..limit {
        if w.get(i, i).is_zero() {
            break;
        }
        invariant_factors.push(w.get(i, i).clone());
    }
    let rank = invariant_factors.len();
    let out = SmithDecomposition {
        d: w,
        u,
        v,
        invariant_factors,
        rank,
    };
    debug_assert!(out.verify(a));
    out
}

/// First Betti number, torsion coefficients (> 1), and the resulting lower
/// bound on the minimal number of abelian generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abelianization {
    pub b1: usize,
    pub torsion: Vec<BigInt>,
    pub min_abelian_gens: usize,
}

pub fn abelianization(p: &FinitePresentation) -> Abelianization {
    let snf = smith_normal_form(&relation_matrix(p));
    let b1 = p.generator_count() - snf.rank;
    let torsion: Vec<BigInt> = snf
        .invariant_factors
        .iter()
        .filter(|f| **f > BigInt::one())
        .cloned()
        .collect();
    let min_abelian_gens = b1 + torsion.len();
    Abelianization {
        b1,
        torsion,
        min_abelian_gens,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{Letter, Word};
    use proptest::prelude::*;

    fn word(ls: &[(usize, i8)]) -> Word {
        Word::from_letters(ls.iter().map(|&(g, s)| Letter::new(g, s)))
    }

    #[test]
    fn relation_matrix_examples() {
        let bs = FinitePresentation::from_names(
            &["t", "a"],
            vec![word(&[(0, 1), (1, 1), (0, -1), (1, -1), (1, -1)])],
        )
        .unwrap();
        assert_eq!(relation_matrix(&bs), IntMatrix::from_rows(&[vec![0, -1]]));

        let f2 = FinitePresentation::from_names(&["a", "b"], vec![]).unwrap();
        let m = relation_matrix(&f2);
        assert_eq!((m.rows(), m.cols()), (0, 2));

        let genus2 = FinitePresentation::from_names(
            &["a", "b", "c", "d"],
            vec![word(&[
                (0, 1),
                (1, 1),
                (0, -1),
                (1, -1),
                (2, 1),
                (3, 1),
                (2, -1),
                (3, -1),
            ])],
        )
        .unwrap();
        assert_eq!(
            relation_matrix(&genus2),
            IntMatrix::from_rows(&[vec![0, 0, 0, 0]])
        );
    }

    #[test]
    fn snf_identity() {
        let a = IntMatrix::identity(3);
        let snf = smith_normal_form(&a);
        assert!(snf.verify(&a));
        assert_eq!(snf.rank, 3);
        assert_eq!(
            snf.invariant_factors,
            vec![BigInt::one(), BigInt::one(), BigInt::one()]
        );
    }

    #[test]
    fn snf_two_by_two() {
        // gcd of entries 2; |det| = 8 so factors are (2, 4)
        let a = IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]);
        let snf = smith_normal_form(&a);
        assert!(snf.verify(&a));
        assert_eq!(snf.invariant_factors, vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn snf_cover_relation_matrix() {
        // gcd of all entries 1; gcd of 2x2 minors 3 -> factors (1, 3)
        let a = IntMatrix::from_rows(&[vec![0, -2, 1], vec![0, 1, -2]]);
        let snf = smith_normal_form(&a);
        assert!(snf.verify(&a));
        assert_eq!(snf.invariant_factors, vec![BigInt::from(1), BigInt::from(3)]);
    }

    #[test]
    fn snf_zero_and_empty() {
        let a = IntMatrix::zeros(2, 3);
        let snf = smith_normal_form(&a);
        assert!(snf.verify(&a));
        assert_eq!(snf.rank, 0);

        let e = IntMatrix::zeros(0, 2);
        let snf = smith_normal_form(&e);
        assert!(snf.verify(&e));
        assert_eq!(snf.rank, 0);
        assert_eq!(snf.v, IntMatrix::identity(2));
    }

    #[test]
    fn abelianization_examples() {
        let bs = FinitePresentation::from_names(
            &["t", "a"],
            vec![word(&[(0, 1), (1, 1), (0, -1), (1, -1), (1, -1)])],
        )
        .unwrap();
        let ab = abelianization(&bs);
        assert_eq!((ab.b1, ab.min_abelian_gens), (1, 1));
        assert!(ab.torsion.is_empty());

        let f2 = FinitePresentation::from_names(&["a", "b"], vec![]).unwrap();
        let ab = abelianization(&f2);
        assert_eq!(ab.b1, 2);
        assert!(ab.torsion.is_empty());

        // K_2 of BS(1,2): <x, a0, a1 | a1 a0^-2, x a0 x^-1 a1^-2>
        let k2 = FinitePresentation::from_names(
            &["x", "a0", "a1"],
            vec![
                word(&[(2, 1), (1, -1), (1, -1)]),
                word(&[(0, 1), (1, 1), (0, -1), (2, -1), (2, -1)]),
            ],
        )
        .unwrap();
        let ab = abelianization(&k2);
        assert_eq!(ab.b1, 1);
        assert_eq!(ab.torsion, vec![BigInt::from(3)]);
    }

    /// Brute-force gcd of all k x k minors (Laplace expansion), the
    /// independent oracle for the divisibility invariant.
    fn det_expand(m: &IntMatrix, rows: &[usize], cols: &[usize]) -> BigInt {
        if rows.is_empty() {
            return BigInt::one();
        }
        let mut acc = BigInt::zero();
        let r = rows[0];
        for (pos, &c) in cols.iter().enumerate() {
            let e = m.get(r, c);
            if e.is_zero() {
                continue;
            }
            let sub_cols: Vec<usize> = cols
                .iter()
                .copied()
                .filter(|&x| x != c)
                .collect();
            let minor = det_expand(m, &rows[1..], &sub_cols);
            let term = e * minor;
            if pos % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if k > n {
            return vec![];
        }
        let mut out = Vec::new();
        fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..n {
                cur.push(i);
                go(i + 1, n, k, cur, out);
                cur.pop();
            }
        }
        go(0, n, k, &mut Vec::new(), &mut out);
        out
    }

    fn gcd_of_k_minors(m: &IntMatrix, k: usize) -> BigInt {
        let mut acc = BigInt::zero();
        for rows in combinations(m.rows(), k) {
            for cols in combinations(m.cols(), k) {
                acc = acc.gcd(&det_expand(m, &rows, &cols));
            }
        }
        acc
    }

    fn matrix_strategy(max_dim: usize) -> impl Strategy<Value = IntMatrix> {
        (1..=max_dim, 1..=max_dim).prop_flat_map(|(r, c)| {
            prop::collection::vec(-10i64..=10, r * c).prop_map(move |data| {
                let rows: Vec<Vec<i64>> = data.chunks(c).map(|ch| ch.to_vec()).collect();
                IntMatrix::from_rows(&rows)
            })
        })
    }

    proptest! {
        #[test]
        fn snf_verifies_on_random_matrices(a in matrix_strategy(8)) {
            let snf = smith_normal_form(&a);
            prop_assert!(snf.verify(&a));
            prop_assert_eq!(snf.invariant_factors.len(), snf.rank);
        }

        #[test]
        fn minor_gcd_cross_check(a in matrix_strategy(4)) {
            let snf = smith_normal_form(&a);
            let limit = a.rows().min(a.cols());
            let mut prod = BigInt::one();
            for i in 1..=limit {
                prod *= snf.d.get(i - 1, i - 1);
                prop_assert_eq!(prod.clone(), gcd_of_k_minors(&a, i), "at minor size {}", i);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn b1_plus_rank_is_generator_count(
            g in 1..4usize,
            raw in prop::collection::vec(prop::collection::vec((0..4usize, prop_oneof![Just(1i8), Just(-1i8)]), 0..8), 0..4)
        ) {
            let names: Vec<String> = (0..g).map(|i| format!("g{i}")).collect();
            let relators: Vec<Word> = raw
                .into_iter()
                .map(|ls| Word::from_letters(ls.into_iter().map(|(x, s)| Letter::new(x % g, s))))
                .collect();
            let p = FinitePresentation::new(names, relators).unwrap();
            let snf = smith_normal_form(&relation_matrix(&p));
            let ab = abelianization(&p);
            prop_assert_eq!(ab.b1 + snf.rank, p.generator_count());
        }
    }
}
