//! HNN splittings of a normalized presentation over the shift alphabet.
//!
//! For a presentation whose relators all have zero exponent sum in the
//! stable letter `t`, every relator rewrites (after conjugation by a power
//! of `t`) as a word in the letters `b[α,β] = t^β a_α t^-β`. Adding the
//! conjugation relations `t b[α,β] t^-1 = b[α,β+1]` exhibits the group as
//! an HNN extension of the subgroup generated by the shift alphabet, with
//! associated subgroups generated by at most `M = k·N` of the `b[α,β]`.

use thiserror::Error;

use crate::presentations::{FinitePresentation, GeneratorSymbol};
use crate::words::{GenId, Letter, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HnnError {
    #[error("stable letter id {0} out of range")]
    StableOutOfRange(GenId),
    #[error("relator {relator} has stable-letter exponent sum {sum}, expected 0")]
    NonzeroStableExponent { relator: usize, sum: i64 },
    #[error("presentation is not normalized: relator {relator} has stable-letter exponent sum {sum}")]
    NotNormalized { relator: usize, sum: i64 },
}

/// One letter of a rewritten relator: `sign`-power of `b[gen, shift]`,
/// where `gen` is an original (non-stable) generator id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftLetter {
    pub gen: GenId,
    pub shift: usize,
    pub sign: i8,
}

/// A relator rewritten over the shift alphabet, conjugated by `t^offset`
/// so that the minimum emitted shift is exactly 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewrittenRelator {
    pub letters: Vec<ShiftLetter>,
    pub offset: i64,
    pub max_shift: usize,
}

/// Scan the relator keeping the running `t`-prefix exponent; each non-`t`
/// letter at prefix `β` emits `b[α,β]^±1`. The emitted sequence of a
/// freely reduced input is already freely reduced.
pub fn rewrite_relator(r: &Word, t: GenId) -> Result<RewrittenRelator, HnnError> {
    let sum = r.exponent_sum(t);
    if sum != 0 {
        return Err(HnnError::NonzeroStableExponent { relator: 0, sum });
    }
    let mut beta: i64 = 0;
    let mut raw: Vec<(GenId, i64, i8)> = Vec::new();
    for l in r.letters() {
        if l.gen == t {
            beta += l.sign as i64;
        } else {
            raw.push((l.gen, beta, l.sign));
        }
    }
    let min = raw.iter().map(|&(_, b, _)| b).min().unwrap_or(0);
    let offset = -min;
    let letters: Vec<ShiftLetter> = raw
        .into_iter()
        .map(|(gen, b, sign)| ShiftLetter {
            gen,
            shift: (b + offset) as usize,
            sign,
        })
        .collect();
    debug_assert!(letters
        .windows(2)
        .all(|w| !(w[0].gen == w[1].gen && w[0].shift == w[1].shift && w[0].sign == -w[1].sign)));
    let max_shift = letters.iter().map(|l| l.shift).max().unwrap_or(0);
    Ok(RewrittenRelator {
        letters,
        offset,
        max_shift,
    })
}

/// The full splitting data. Base generators are the grid
/// `b[α,β]`, `α` over the non-stable generators, `0 ≤ β ≤ N`, named
/// `<gen>_s<β>`; unused letters carry no relators.
#[derive(Debug, Clone)]
pub struct HnnSplitting {
    /// Stable letter in the original presentation.
    pub stable: GeneratorSymbol,
    /// Presentation of the base alphabet with the rewritten relators.
    pub base: FinitePresentation,
    /// Generators of the first associated subgroup: `b[α,β]`, `β ≤ N-1`.
    pub assoc_c: Vec<Word>,
    /// Generators of the second associated subgroup: `b[α,β]`, `β ≥ 1`.
    pub assoc_d: Vec<Word>,
    /// Conjugation relations `t b[α,β] t^-1 = b[α,β+1]` as base-id pairs.
    pub conj_relations: Vec<(GenId, GenId)>,
    /// Maximum shift actually emitted (0 when nothing is emitted).
    pub shift_bound_n: usize,
    /// Rank bound `M = k·N` for the associated subgroups.
    pub rank_bound_m: usize,
    /// The coarser bound: maximum number of stable-letter occurrences in a
    /// relator. Reported for cross-reference; `shift_bound_n` never
    /// exceeds it.
    pub coarse_shift_bound: usize,
    /// Per base generator, its image `t^β a_α t^-β` in the original
    /// generators.
    pub embedding: Vec<Word>,
    /// Per base relator, the conjugating power `c` with
    /// `embed(S_i) = t^c R_i t^-c`.
    pub offsets: Vec<i64>,
    /// Non-stable original generator ids, in presentation order; column
    /// `α` of the grid corresponds to `non_stable[α]`.
    pub non_stable: Vec<GenId>,
}

impl HnnSplitting {
    /// Base-generator id of `b[α,β]` where `alpha_pos` indexes
    /// `non_stable`.
    pub fn base_id(&self, alpha_pos: usize, beta: usize) -> GenId {
        alpha_pos * (self.shift_bound_n + 1) + beta
    }

    /// Map a word over the base alphabet to the original generators.
    pub fn embed_word(&self, w: &Word) -> Word {
        let mut out = Word::identity();
        for l in w.letters() {
            let img = &self.embedding[l.gen];
            out = out.concat(&if l.sign == 1 { img.clone() } else { img.inverse() });
        }
        out
    }
}

/// Split a normalized presentation as an HNN extension over the shift
/// alphabet. Degenerate cases: no relators (or no non-stable generators)
/// give `N = 0`, trivial associated subgroups and `M = 0`.
pub fn split_as_hnn(p: &FinitePresentation, t: GenId) -> Result<HnnSplitting, HnnError> {
    if t >= p.generator_count() {
        return Err(HnnError::StableOutOfRange(t));
    }
    for (i, r) in p.relators().iter().enumerate() {
        let sum = r.exponent_sum(t);
        if sum != 0 {
            return Err(HnnError::NotNormalized { relator: i, sum });
        }
    }
    let rewrites: Vec<RewrittenRelator> = p
        .relators()
        .iter()
        .map(|r| rewrite_relator(r, t))
        .collect::<Result<_, _>>()?;
    let n = rewrites.iter().map(|r| r.max_shift).max().unwrap_or(0);
    let coarse = p
        .relators()
        .iter()
        .map(|r| r.occurrences(t))
        .max()
        .unwrap_or(0);
    let non_stable: Vec<GenId> = (0..p.generator_count()).filter(|&g| g != t).collect();
    let k = non_stable.len();

    let mut names = Vec::with_capacity(k * (n + 1));
    let mut embedding = Vec::with_capacity(k * (n + 1));
    for &a in &non_stable {
        for beta in 0..=n {
            names.push(format!("{}_s{}", p.gen_name(a), beta));
            let b = beta as i64;
            embedding.push(
                Word::letter_power(t, b)
                    .concat(&Word::generator(a))
                    .concat(&Word::letter_power(t, -b)),
            );
        }
    }
    let alpha_pos_of: Vec<Option<usize>> = {
        let mut v = vec![None; p.generator_count()];
        for (pos, &a) in non_stable.iter().enumerate() {
            v[a] = Some(pos);
        }
        v
    };
    let base_id = |alpha_pos: usize, beta: usize| alpha_pos * (n + 1) + beta;
    let base_relators: Vec<Word> = rewrites
        .iter()
        .map(|rw| {
            Word::from_letters(rw.letters.iter().map(|l| {
                Letter::new(
                    base_id(alpha_pos_of[l.gen].expect("non-stable generator"), l.shift),
                    l.sign,
                )
            }))
        })
        .collect();
    let offsets: Vec<i64> = rewrites.iter().map(|r| r.offset).collect();
    let base = FinitePresentation::new(names, base_relators)
        .expect("base alphabet names are valid and unique");
    debug_assert_eq!(base.relator_count(), p.relator_count());

    let mut assoc_c = Vec::new();
    let mut assoc_d = Vec::new();
    let mut conj_relations = Vec::new();
    for pos in 0..k {
        for beta in 0..n {
            assoc_c.push(Word::generator(base_id(pos, beta)));
            assoc_d.push(Word::generator(base_id(pos, beta + 1)));
            conj_relations.push((base_id(pos, beta), base_id(pos, beta + 1)));
        }
    }
    Ok(HnnSplitting {
        stable: p.generators()[t].clone(),
        base,
        assoc_c,
        assoc_d,
        conj_relations,
        shift_bound_n: n,
        rank_bound_m: k * n,
        coarse_shift_bound: coarse,
        embedding,
        offsets,
        non_stable,
    })
}

/// Soundness check of a splitting against the original presentation:
/// every base relator embeds to the recorded conjugate of its source
/// relator, every conjugation relation embeds to a trivial identity, and
/// the structural counts match.
pub fn verify_splitting(split: &HnnSplitting, original: &FinitePresentation) -> bool {
    let t = split.stable.id;
    if t >= original.generator_count() || original.gen_name(t) != split.stable.name {
        return false;
    }
    let k = split.non_stable.len();
    if k + 1 != original.generator_count() && !(k == 0 && original.generator_count() == 1) {
        return false;
    }
    if split.base.relator_count() != original.relator_count()
        || split.offsets.len() != original.relator_count()
    {
        return false;
    }
    if split.assoc_c.len() != split.assoc_d.len()
        || split.assoc_c.len() > split.rank_bound_m
        || split.rank_bound_m != k * split.shift_bound_n
    {
        return false;
    }
    if split.embedding.len() != split.base.generator_count() {
        return false;
    }
    for (i, s) in split.base.relators().iter().enumerate() {
        let c = split.offsets[i];
        let expected = original.relators()[i].conjugate_by(&Word::letter_power(t, c));
        if split.embed_word(s) != expected {
            return false;
        }
    }
    for &(from, to) in &split.conj_relations {
        if from >= split.embedding.len() || to >= split.embedding.len() {
            return false;
        }
        let lhs = split.embedding[from].conjugate_by(&Word::generator(t));
        if lhs != split.embedding[to] {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

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

    fn genus2() -> FinitePresentation {
        FinitePresentation::from_names(
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
        .unwrap()
    }

    #[test]
    fn rewrite_bs_relator() {
        // t a t^-1 a^-2 -> b[a,1] b[a,0]^-2, offset 0
        let p = bs12();
        let rw = rewrite_relator(&p.relators()[0], 0).unwrap();
        assert_eq!(rw.offset, 0);
        assert_eq!(rw.max_shift, 1);
        assert_eq!(
            rw.letters,
            vec![
                ShiftLetter { gen: 1, shift: 1, sign: 1 },
                ShiftLetter { gen: 1, shift: 0, sign: -1 },
                ShiftLetter { gen: 1, shift: 0, sign: -1 },
            ]
        );
    }

    #[test]
    fn rewrite_genus2_relator() {
        // with t = a: b[b,1] b[b,0]^-1 b[c,0] b[d,0] b[c,0]^-1 b[d,0]^-1
        let p = genus2();
        let rw = rewrite_relator(&p.relators()[0], 0).unwrap();
        assert_eq!(rw.offset, 0);
        assert_eq!(
            rw.letters,
            vec![
                ShiftLetter { gen: 1, shift: 1, sign: 1 },
                ShiftLetter { gen: 1, shift: 0, sign: -1 },
                ShiftLetter { gen: 2, shift: 0, sign: 1 },
                ShiftLetter { gen: 3, shift: 0, sign: 1 },
                ShiftLetter { gen: 2, shift: 0, sign: -1 },
                ShiftLetter { gen: 3, shift: 0, sign: -1 },
            ]
        );
    }

    #[test]
    fn rewrite_conjugation_normalization() {
        // t^-1 a t emits b[a,-1]; offset 1 shifts it to b[a,0]
        let r = word(&[(0, -1), (1, 1), (0, 1)]);
        let rw = rewrite_relator(&r, 0).unwrap();
        assert_eq!(rw.offset, 1);
        assert_eq!(
            rw.letters,
            vec![ShiftLetter { gen: 1, shift: 0, sign: 1 }]
        );
    }

    #[test]
    fn rewrite_rejects_nonzero_sum() {
        let r = word(&[(0, 1), (1, 1)]);
        assert!(matches!(
            rewrite_relator(&r, 0),
            Err(HnnError::NonzeroStableExponent { sum: 1, .. })
        ));
    }

    #[test]
    fn split_bs12() {
        let p = bs12();
        let s = split_as_hnn(&p, 0).unwrap();
        assert_eq!(s.shift_bound_n, 1);
        assert_eq!(s.rank_bound_m, 1);
        assert_eq!(s.base.generator_names(), vec!["a_s0", "a_s1"]);
        assert_eq!(
            s.base.relators(),
            &[word(&[(1, 1), (0, -1), (0, -1)])]
        );
        assert_eq!(s.assoc_c, vec![Word::generator(0)]);
        assert_eq!(s.assoc_d, vec![Word::generator(1)]);
        assert!(verify_splitting(&s, &p));
    }

    #[test]
    fn split_free_group_trivial_edges() {
        let p = FinitePresentation::from_names(&["t", "a"], vec![]).unwrap();
        let s = split_as_hnn(&p, 0).unwrap();
        assert_eq!(s.shift_bound_n, 0);
        assert_eq!(s.rank_bound_m, 0);
        assert_eq!(s.base.generator_names(), vec!["a_s0"]);
        assert!(s.base.relators().is_empty());
        assert!(s.assoc_c.is_empty() && s.assoc_d.is_empty());
        assert!(verify_splitting(&s, &p));
    }

    #[test]
    fn split_genus2() {
        let p = genus2();
        let s = split_as_hnn(&p, 0).unwrap();
        assert_eq!(s.shift_bound_n, 1);
        assert_eq!(s.rank_bound_m, 3);
        assert_eq!(
            s.base.generator_names(),
            vec!["b_s0", "b_s1", "c_s0", "c_s1", "d_s0", "d_s1"]
        );
        assert_eq!(s.base.relator_count(), 1);
        assert_eq!(s.assoc_c.len(), 3);
        assert!(verify_splitting(&s, &p));
        // base deficiency = k(N+1) - m
        assert_eq!(s.base.deficiency(), 3 * 2 - 1);
    }

    #[test]
    fn split_rejects_unnormalized() {
        let p = FinitePresentation::from_names(&["t", "a"], vec![word(&[(0, 1), (1, 1)])]).unwrap();
        assert!(matches!(
            split_as_hnn(&p, 0),
            Err(HnnError::NotNormalized { .. })
        ));
    }

    #[test]
    fn corrupted_shift_index_fails_verification() {
        let p = bs12();
        let mut s = split_as_hnn(&p, 0).unwrap();
        // corrupt: replace the base relator by one with a wrong shift
        let bad = word(&[(0, 1), (0, -1), (0, -1)]);
        s.base = FinitePresentation::new(s.base.generator_names(), vec![bad]).unwrap();
        assert!(!verify_splitting(&s, &p));
    }

    #[test]
    fn stable_exponent_bound_by_coarse() {
        let p = genus2();
        let s = split_as_hnn(&p, 1).unwrap();
        assert!(s.shift_bound_n <= s.coarse_shift_bound);
    }
}
