//! Cyclic-cover kernel presentations via Reidemeister-Schreier rewriting.
//!
//! For a normalized presentation (stable letter `t`, all relators with zero
//! `t`-exponent sum) and a degree `n ≥ 1`, the kernel of the composite map
//! onto `Z/nZ` has Schreier transversal `{t^0, …, t^{n-1}}`. The tree
//! generators rewrite to the empty word and are eliminated during
//! construction, leaving `x = t^n` and `a[α,i] = t^i a_α t^-i` with the
//! rewrites of `t^i R_j t^-i` as relators.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::hnn::HnnSplitting;
use crate::intlin::{abelianization, Abelianization};
use crate::presentations::{FinitePresentation, GeneratorSymbol};
use crate::words::{GenId, Letter, Word};
use crate::zmaps::ZHomomorphism;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoverError {
    #[error("cover degree must be at least 1, got {0}")]
    BadDegree(usize),
    #[error("cover degree {n} is smaller than the shift bound {needed}")]
    DegreeTooSmall { n: usize, needed: usize },
    #[error("presentation is not normalized: relator {relator} has stable-letter exponent sum {sum}")]
    NotNormalized { relator: usize, sum: i64 },
    #[error("stable letter id {0} out of range")]
    StableOutOfRange(GenId),
    #[error("splitting and cover come from different presentations: {0}")]
    Mismatch(String),
}

/// One Schreier generator `a[α,i] = t^i a_α t^-i` of the cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchreierGen {
    /// Generator id in the cover presentation.
    pub cover_id: GenId,
    /// The original (non-stable) generator.
    pub orig_gen: GenId,
    /// Coset index `i`, `0 ≤ i < n`.
    pub coset: usize,
    /// Embedding word `t^i a_α t^-i` over the original generators.
    pub embedding: Word,
}

/// Presentation of the degree-`n` cyclic cover kernel.
#[derive(Debug, Clone)]
pub struct CoverPresentation {
    pub n: usize,
    pub presentation: FinitePresentation,
    /// The generator `x = t^n` (always cover id 0).
    pub stable_x: GeneratorSymbol,
    pub schreier_gens: Vec<SchreierGen>,
    /// Embedding of `x`: the word `t^n`.
    pub x_embedding: Word,
    /// The homomorphism the cover inherits: `x -> 1`, all `a[α,i] -> 0`.
    pub inherited_zmap: ZHomomorphism,
    /// Number of non-stable generators upstairs.
    pub k: usize,
    /// Number of relators upstairs.
    pub m: usize,
}

impl CoverPresentation {
    /// Cover generator id of `a[α,i]`, with `alpha_pos` indexing the
    /// non-stable generators in presentation order.
    pub fn schreier_id(&self, alpha_pos: usize, coset: usize) -> GenId {
        1 + alpha_pos * self.n + coset
    }
}

/// Edge data for the induced HNN splitting of the cover: the associated
/// subgroups are carried by the same shift letters for every degree, so
/// the rank bound does not grow with `n`.
#[derive(Debug, Clone)]
pub struct CoverHnnData {
    pub stable_x: GeneratorSymbol,
    /// Words over the cover generators: `a[α,β]` for `0 ≤ β ≤ N-1`.
    pub assoc_c_words: Vec<Word>,
    /// Their `x`-conjugates `x a[α,β] x^-1`.
    pub assoc_d_words: Vec<Word>,
    /// All Schreier generators (the base of the induced splitting).
    pub base_gens: Vec<GenId>,
    /// Degree-independent rank bound `M`.
    pub sharp_rank_bound: usize,
}

/// Reidemeister-Schreier presentation of the kernel of the composite map
/// onto `Z/nZ`, over the transversal `{t^0, …, t^{n-1}}`.
pub fn kernel_presentation(
    p: &FinitePresentation,
    t: GenId,
    n: usize,
) -> Result<CoverPresentation, CoverError> {
    if n < 1 {
        return Err(CoverError::BadDegree(n));
    }
    if t >= p.generator_count() {
        return Err(CoverError::StableOutOfRange(t));
    }
    for (i, r) in p.relators().iter().enumerate() {
        let sum = r.exponent_sum(t);
        if sum != 0 {
            return Err(CoverError::NotNormalized { relator: i, sum });
        }
    }
    let non_stable: Vec<GenId> = (0..p.generator_count()).filter(|&g| g != t).collect();
    let k = non_stable.len();
    let m = p.relator_count();

    let mut names = Vec::with_capacity(k * n + 1);
    names.push("x".to_string());
    let mut schreier_gens = Vec::with_capacity(k * n);
    for (pos, &a) in non_stable.iter().enumerate() {
        for i in 0..n {
            let cover_id = 1 + pos * n + i;
            names.push(format!("{}_c{}", p.gen_name(a), i));
            let shift = i as i64;
            schreier_gens.push(SchreierGen {
                cover_id,
                orig_gen: a,
                coset: i,
                embedding: Word::letter_power(t, shift)
                    .concat(&Word::generator(a))
                    .concat(&Word::letter_power(t, -shift)),
            });
        }
    }
    let alpha_pos_of: Vec<Option<usize>> = {
        let mut v = vec![None; p.generator_count()];
        for (pos, &a) in non_stable.iter().enumerate() {
            v[a] = Some(pos);
        }
        v
    };
    let schreier_id = |pos: usize, coset: usize| 1 + pos * n + coset;

    // Rewrite of t^i R t^-i: walk R keeping the current coset; a-letters
    // emit the Schreier generator at the current coset, t-letters emit x
    // exactly when crossing the wrap-around edge of the cycle.
    let mut relators = Vec::with_capacity(m * n);
    for r in p.relators() {
        for i in 0..n {
            let mut coset = i;
            let mut out: Vec<Letter> = Vec::new();
            for l in r.letters() {
                if l.gen == t {
                    if l.sign == 1 {
                        if coset == n - 1 {
                            out.push(Letter::new(0, 1));
                        }
                        coset = (coset + 1) % n;
                    } else {
                        coset = (coset + n - 1) % n;
                        if coset == n - 1 {
                            out.push(Letter::new(0, -1));
                        }
                    }
                } else {
                    let pos = alpha_pos_of[l.gen].expect("non-stable generator");
                    out.push(Letter::new(schreier_id(pos, coset), l.sign));
                }
            }
            debug_assert_eq!(coset, i);
            relators.push(Word::from_letters(out));
        }
    }
    let presentation =
        FinitePresentation::new(names, relators).expect("cover names are valid and unique");
    debug_assert_eq!(presentation.generator_count(), k * n + 1);
    debug_assert_eq!(presentation.relator_count(), m * n);

    let mut values = vec![BigInt::zero(); k * n + 1];
    values[0] = BigInt::one();
    Ok(CoverPresentation {
        n,
        stable_x: presentation.generators()[0].clone(),
        presentation,
        schreier_gens,
        x_embedding: Word::letter_power(t, n as i64),
        inherited_zmap: ZHomomorphism::new(values),
        k,
        m,
    })
}

/// Abelianization of the degree-`n` cover.
pub fn betti_of_cover(
    p: &FinitePresentation,
    t: GenId,
    n: usize,
) -> Result<Abelianization, CoverError> {
    Ok(abelianization(&kernel_presentation(p, t, n)?.presentation))
}

/// Associated-subgroup data for the induced splitting of the cover.
/// Requires `n ≥ N` so that every shift letter `b[α,β]`, `β ≤ N-1`, is
/// literally a Schreier generator of the cover.
pub fn cover_hnn_data(
    split: &HnnSplitting,
    cover: &CoverPresentation,
) -> Result<CoverHnnData, CoverError> {
    if cover.n < split.shift_bound_n {
        return Err(CoverError::DegreeTooSmall {
            n: cover.n,
            needed: split.shift_bound_n,
        });
    }
    if split.non_stable.len() != cover.k {
        return Err(CoverError::Mismatch(format!(
            "splitting has {} non-stable generators, cover has {}",
            split.non_stable.len(),
            cover.k
        )));
    }
    let n_bound = split.shift_bound_n;
    let mut assoc_c_words = Vec::new();
    let mut assoc_d_words = Vec::new();
    for pos in 0..cover.k {
        for beta in 0..n_bound {
            let c = Word::generator(cover.schreier_id(pos, beta));
            let d = c.conjugate_by(&Word::generator(0));
            assoc_c_words.push(c);
            assoc_d_words.push(d);
        }
    }
    Ok(CoverHnnData {
        stable_x: cover.stable_x.clone(),
        assoc_c_words,
        assoc_d_words,
        base_gens: cover.schreier_gens.iter().map(|s| s.cover_id).collect(),
        sharp_rank_bound: split.rank_bound_m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hnn::split_as_hnn;
    use crate::presentations::abelianized_invariants_preserved;
    use crate::zmaps::verify_zmap;

    fn word(ls: &[(usize, i8)]) -> Word {
        Word::from_letters(ls.iter().map(|&(g, s)| Letter::new(g, s)))
    }

    fn bs12() -> FinitePresentation {
        FinitePresentation::from_names(
            &["t", "a"],
            vec![word(&[(0, 1), (1, 1), (0, -1), (1, -1), (1, -1)])],
        )
        .unwrap()
    }

    #[test]
    fn bs12_degree_two() {
        let cover = kernel_presentation(&bs12(), 0, 2).unwrap();
        let p = &cover.presentation;
        assert_eq!(p.generator_names(), vec!["x", "a_c0", "a_c1"]);
        // relators: a1 a0^-2 and x a0 x^-1 a1^-2
        assert_eq!(
            p.relators(),
            &[
                word(&[(2, 1), (1, -1), (1, -1)]),
                word(&[(0, 1), (1, 1), (0, -1), (2, -1), (2, -1)]),
            ]
        );
        assert!(verify_zmap(p, &cover.inherited_zmap));
    }

    #[test]
    fn free_group_cover_is_free_of_rank_n_plus_1() {
        let f2 = FinitePresentation::from_names(&["t", "a"], vec![]).unwrap();
        let cover = kernel_presentation(&f2, 0, 3).unwrap();
        assert_eq!(cover.presentation.generator_count(), 4);
        assert!(cover.presentation.relators().is_empty());
        let ab = betti_of_cover(&f2, 0, 3).unwrap();
        assert_eq!(ab.b1, 4);
    }

    #[test]
    fn degree_one_is_renaming() {
        let p = bs12();
        let cover = kernel_presentation(&p, 0, 1).unwrap();
        assert_eq!(cover.presentation.generator_count(), p.generator_count());
        assert_eq!(cover.presentation.relator_count(), p.relator_count());
        assert!(abelianized_invariants_preserved(&p, &cover.presentation));
    }

    #[test]
    fn bad_degree_rejected() {
        assert!(matches!(
            kernel_presentation(&bs12(), 0, 0),
            Err(CoverError::BadDegree(0))
        ));
    }

    #[test]
    fn cover_counting_laws() {
        let p = bs12();
        for n in 1..=6 {
            let cover = kernel_presentation(&p, 0, n).unwrap();
            assert_eq!(cover.presentation.generator_count(), cover.k * n + 1);
            assert_eq!(cover.presentation.relator_count(), cover.m * n);
            assert_eq!(
                cover.presentation.deficiency(),
                n as i64 * (p.deficiency() - 1) + 1
            );
            // embedding t-sums: 0 mod n for Schreier gens, exactly n for x
            for s in &cover.schreier_gens {
                assert_eq!(s.embedding.exponent_sum(0) % n as i64, 0);
            }
            assert_eq!(cover.x_embedding.exponent_sum(0), n as i64);
            let ab = abelianization(&cover.presentation);
            assert!(ab.b1 >= 1);
        }
    }

    #[test]
    fn betti_of_bs12_covers() {
        // b1(K_n) = 1 for all n; torsion 2^n - 1 at small degrees
        let p = bs12();
        for n in 1..=6 {
            let ab = betti_of_cover(&p, 0, n).unwrap();
            assert_eq!(ab.b1, 1, "degree {n}");
        }
        let ab = betti_of_cover(&p, 0, 2).unwrap();
        assert_eq!(ab.torsion, vec![BigInt::from(3)]);
    }

    #[test]
    fn cover_hnn_edge_data() {
        let p = bs12();
        let split = split_as_hnn(&p, 0).unwrap();
        let cover = kernel_presentation(&p, 0, 2).unwrap();
        let data = cover_hnn_data(&split, &cover).unwrap();
        assert_eq!(data.sharp_rank_bound, 1);
        assert_eq!(data.assoc_c_words, vec![Word::generator(1)]);
        assert_eq!(
            data.assoc_d_words,
            vec![word(&[(0, 1), (1, 1), (0, -1)])]
        );
        assert_eq!(data.base_gens, vec![1, 2]);
    }

    #[test]
    fn cover_hnn_trivial_for_free_group() {
        let f2 = FinitePresentation::from_names(&["t", "a"], vec![]).unwrap();
        let split = split_as_hnn(&f2, 0).unwrap();
        let cover = kernel_presentation(&f2, 0, 4).unwrap();
        let data = cover_hnn_data(&split, &cover).unwrap();
        assert!(data.assoc_c_words.is_empty());
        assert_eq!(data.sharp_rank_bound, 0);
    }

    #[test]
    fn degree_too_small_rejected() {
        // relator t^2 a t^-2 a^-1 ... needs shift bound 2
        let p = FinitePresentation::from_names(
            &["t", "a"],
            vec![word(&[(0, 1), (0, 1), (1, 1), (0, -1), (0, -1), (1, -1)])],
        )
        .unwrap();
        let split = split_as_hnn(&p, 0).unwrap();
        assert_eq!(split.shift_bound_n, 2);
        let cover = kernel_presentation(&p, 0, 1).unwrap();
        assert!(matches!(
            cover_hnn_data(&split, &cover),
            Err(CoverError::DegreeTooSmall { n: 1, needed: 2 })
        ));
    }
}
