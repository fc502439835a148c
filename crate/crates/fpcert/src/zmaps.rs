//! Homomorphisms onto the integers: discovery, verification, and Tietze
//! normalization so that one generator (the stable letter) maps to 1 and
//! all others to 0.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::intlin::{relation_matrix, smith_normal_form};
use crate::presentations::{apply_tietze, FinitePresentation, GeneratorSymbol, TietzeMove};
use crate::words::{GenId, Word};

/// A homomorphism to the integers, given by the image of each generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZHomomorphism {
    values: Vec<BigInt>,
}

impl ZHomomorphism {
    pub fn new(values: Vec<BigInt>) -> Self {
        ZHomomorphism { values }
    }

    pub fn from_i64(values: &[i64]) -> Self {
        ZHomomorphism {
            values: values.iter().map(|&v| BigInt::from(v)).collect(),
        }
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    pub fn value(&self, g: GenId) -> &BigInt {
        &self.values[g]
    }

    /// Image of a word under the homomorphism.
    pub fn apply(&self, w: &Word) -> BigInt {
        let mut acc = BigInt::zero();
        for l in w.letters() {
            if l.sign == 1 {
                acc += &self.values[l.gen];
            } else {
                acc -= &self.values[l.gen];
            }
        }
        acc
    }

    pub fn gcd_of_values(&self) -> BigInt {
        let mut acc = BigInt::zero();
        for v in &self.values {
            acc = acc.gcd(v);
        }
        acc
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ZmapError {
    #[error("value vector has {got} entries but the presentation has {want} generators")]
    LengthMismatch { got: usize, want: usize },
    #[error("not a homomorphism: relator {relator} has image {image}, expected 0")]
    NotHomomorphism { relator: usize, image: BigInt },
    #[error("not surjective: gcd of generator values is {gcd}, expected 1")]
    NotSurjective { gcd: BigInt },
}

/// Verification report; `verify_zmap` collapses it to a boolean but the
/// CLI distinguishes the two failure modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZmapCheck {
    pub homomorphism: bool,
    pub surjective: bool,
    pub failing_relators: Vec<usize>,
    pub gcd: BigInt,
}

impl ZmapCheck {
    pub fn ok(&self) -> bool {
        self.homomorphism && self.surjective
    }
}

pub fn check_zmap(p: &FinitePresentation, eps: &ZHomomorphism) -> ZmapCheck {
    let failing: Vec<usize> = p
        .relators()
        .iter()
        .enumerate()
        .filter(|(_, r)| !eps.apply(r).is_zero())
        .map(|(i, _)| i)
        .collect();
    let gcd = if eps.values().len() == p.generator_count() {
        eps.gcd_of_values()
    } else {
        BigInt::zero()
    };
    ZmapCheck {
        homomorphism: eps.values().len() == p.generator_count() && failing.is_empty(),
        surjective: gcd == BigInt::from(1),
        failing_relators: failing,
        gcd,
    }
}

/// True iff every relator maps to 0 and the gcd of the values is 1.
pub fn verify_zmap(p: &FinitePresentation, eps: &ZHomomorphism) -> bool {
    check_zmap(p, eps).ok()
}

/// Search for a surjective homomorphism onto the integers. Returns `None`
/// exactly when the first Betti number is 0. When several kernel vectors
/// are available the one minimizing (sum of absolute values, then
/// lexicographic order) is chosen, after normalizing the leading nonzero
/// entry to be positive.
pub fn find_zmap(p: &FinitePresentation) -> Option<ZHomomorphism> {
    let g = p.generator_count();
    let snf = smith_normal_form(&relation_matrix(p));
    if snf.rank == g {
        return None;
    }
    let mut best: Option<(BigInt, Vec<BigInt>)> = None;
    for col in snf.rank..g {
        let mut vals: Vec<BigInt> = (0..g).map(|row| snf.v.get(row, col).clone()).collect();
        if let Some(first) = vals.iter().find(|x| !x.is_zero()) {
            if first.is_negative() {
                for v in &mut vals {
                    *v = -&*v;
                }
            }
        }
        let sum: BigInt = vals.iter().map(|x| x.abs()).sum();
        let better = match &best {
            None => true,
            Some((bs, bv)) => sum < *bs || (sum == *bs && vals < *bv),
        };
        if better {
            best = Some((sum, vals));
        }
    }
    let (_, vals) = best?;
    let eps = ZHomomorphism::new(vals);
    debug_assert!(verify_zmap(p, &eps));
    Some(eps)
}

/// Result of normalizing the stable letter: an isomorphic presentation, the
/// distinguished generator, the Tietze moves that carry the isomorphism,
/// and the transported homomorphism (1 on the stable letter, 0 elsewhere).
#[derive(Debug, Clone)]
pub struct Normalized {
    pub presentation: FinitePresentation,
    pub stable: GeneratorSymbol,
    pub moves: Vec<TietzeMove>,
    pub zmap: ZHomomorphism,
}

/// Transport a homomorphism through one Tietze move: the returned map is
/// the composite of `eps` with the isomorphism the move induces, so it is
/// again a homomorphism on the new presentation.
pub fn transport_zmap(
    eps: &ZHomomorphism,
    mv: &TietzeMove,
    before: &FinitePresentation,
) -> ZHomomorphism {
    match mv {
        TietzeMove::AddGenerator { definition, .. } => {
            let mut vals = eps.values().to_vec();
            vals.push(eps.apply(definition));
            ZHomomorphism::new(vals)
        }
        TietzeMove::RemoveGenerator { gen, .. } => {
            let vals = eps
                .values()
                .iter()
                .enumerate()
                .filter(|(i, _)| i != gen)
                .map(|(_, v)| v.clone())
                .collect();
            ZHomomorphism::new(vals)
        }
        TietzeMove::AddRedundantRelator { .. } | TietzeMove::RemoveRedundantRelator { .. } => {
            eps.clone()
        }
        TietzeMove::SubstituteGenerator { gen, replacement } => {
            // phi(g) = u g^d v; solve eps'(phi(g)) = eps(g) for eps'(g)
            let pos = replacement
                .letters()
                .iter()
                .position(|l| l.gen == *gen)
                .expect("replacement contains the generator");
            let delta = replacement.letters()[pos].sign;
            let rest: BigInt = replacement
                .letters()
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != pos)
                .map(|(_, l)| {
                    let v = eps.value(l.gen);
                    if l.sign == 1 {
                        v.clone()
                    } else {
                        -v
                    }
                })
                .sum();
            let mut vals = eps.values().to_vec();
            let new = eps.value(*gen) - &rest;
            vals[*gen] = if delta == 1 { new } else { -new };
            let _ = before;
            ZHomomorphism::new(vals)
        }
    }
}

/// Euclidean normalization: substitution moves subtract generator values
/// pairwise until a single generator carries value 1; every step is a
/// logged Tietze move so the isomorphism is auditable.
pub fn normalize_stable_letter(
    p: &FinitePresentation,
    eps: &ZHomomorphism,
) -> Result<Normalized, ZmapError> {
    if eps.values().len() != p.generator_count() {
        return Err(ZmapError::LengthMismatch {
            got: eps.values().len(),
            want: p.generator_count(),
        });
    }
    let check = check_zmap(p, eps);
    if !check.homomorphism {
        let relator = check.failing_relators[0];
        return Err(ZmapError::NotHomomorphism {
            relator,
            image: eps.apply(&p.relators()[relator]),
        });
    }
    if !check.surjective {
        return Err(ZmapError::NotSurjective { gcd: check.gcd });
    }

    let mut cur = p.clone();
    let mut vals = eps.values().to_vec();
    let mut moves: Vec<TietzeMove> = Vec::new();
    loop {
        let nonzero: Vec<usize> = vals
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, _)| i)
            .collect();
        if nonzero.len() <= 1 {
            break;
        }
        let pivot = *nonzero
            .iter()
            .min_by_key(|&&i| (vals[i].abs(), i))
            .unwrap();
        for &i in &nonzero {
            if i == pivot {
                continue;
            }
            let q = vals[i].div_floor(&vals[pivot]);
            if q.is_zero() {
                continue;
            }
            let power = q
                .to_i64()
                .expect("substitution power exceeds addressable word length");
            let replacement =
                Word::generator(i).concat(&Word::letter_power(pivot, power));
            let mv = TietzeMove::SubstituteGenerator {
                gen: i,
                replacement,
            };
            let out = apply_tietze(&cur, &mv).expect("normalization move is well-formed");
            cur = out.presentation;
            vals[i] = &vals[i] - &q * &vals[pivot];
            moves.push(mv);
        }
    }
    let stable_id = vals
        .iter()
        .position(|v| !v.is_zero())
        .expect("surjective map has a nonzero value");
    if vals[stable_id].is_negative() {
        let mv = TietzeMove::SubstituteGenerator {
            gen: stable_id,
            replacement: Word::letter(stable_id, -1),
        };
        let out = apply_tietze(&cur, &mv).expect("inversion move is well-formed");
        cur = out.presentation;
        vals[stable_id] = -vals[stable_id].clone();
        moves.push(mv);
    }
    debug_assert_eq!(vals[stable_id], BigInt::from(1));
    let zmap = ZHomomorphism::new(vals);
    debug_assert!(verify_zmap(&cur, &zmap));
    Ok(Normalized {
        stable: cur.generators()[stable_id].clone(),
        presentation: cur,
        moves,
        zmap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::abelianized_invariants_preserved;
    use crate::words::Letter;

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

    fn trefoil() -> FinitePresentation {
        FinitePresentation::from_names(
            &["x", "y"],
            vec![word(&[(0, 1), (0, 1), (1, -1), (1, -1), (1, -1)])],
        )
        .unwrap()
    }

    #[test]
    fn verify_examples() {
        let p = bs12();
        assert!(verify_zmap(&p, &ZHomomorphism::from_i64(&[1, 0])));
        assert!(!verify_zmap(&p, &ZHomomorphism::from_i64(&[0, 1])));
        let report = check_zmap(&p, &ZHomomorphism::from_i64(&[0, 1]));
        assert!(!report.homomorphism);
        assert_eq!(report.failing_relators, vec![0]);

        let z = FinitePresentation::from_names(&["a"], vec![]).unwrap();
        let report = check_zmap(&z, &ZHomomorphism::from_i64(&[2]));
        assert!(report.homomorphism && !report.surjective);
    }

    #[test]
    fn find_zmap_trefoil() {
        let eps = find_zmap(&trefoil()).unwrap();
        assert_eq!(eps.values(), &[BigInt::from(3), BigInt::from(2)]);
    }

    #[test]
    fn find_zmap_finite_group_is_none() {
        let p = FinitePresentation::from_names(&["a"], vec![word(&[(0, 1), (0, 1)])]).unwrap();
        assert!(find_zmap(&p).is_none());
    }

    #[test]
    fn find_zmap_free_group_primitive() {
        let p = FinitePresentation::from_names(&["a", "b"], vec![]).unwrap();
        let eps = find_zmap(&p).unwrap();
        assert!(verify_zmap(&p, &eps));
        assert_eq!(eps.gcd_of_values(), BigInt::from(1));
    }

    #[test]
    fn normalize_already_normalized() {
        let p = bs12();
        let n = normalize_stable_letter(&p, &ZHomomorphism::from_i64(&[1, 0])).unwrap();
        assert_eq!(n.presentation, p);
        assert_eq!(n.stable.name, "t");
        assert!(n.moves.is_empty());
        assert_eq!(n.zmap.values(), &[BigInt::from(1), BigInt::from(0)]);
    }

    #[test]
    fn normalize_swap_case() {
        let p = FinitePresentation::from_names(&["a", "b"], vec![]).unwrap();
        let n = normalize_stable_letter(&p, &ZHomomorphism::from_i64(&[0, 1])).unwrap();
        assert_eq!(n.stable.name, "b");
        assert!(n.moves.is_empty());
    }

    #[test]
    fn normalize_trefoil_euclid() {
        let p = trefoil();
        let eps = ZHomomorphism::from_i64(&[3, 2]);
        let n = normalize_stable_letter(&p, &eps).unwrap();
        assert_eq!(n.stable.name, "x");
        assert_eq!(n.zmap.values(), &[BigInt::from(1), BigInt::from(0)]);
        assert!(verify_zmap(&n.presentation, &n.zmap));
        assert!(abelianized_invariants_preserved(&p, &n.presentation));
        // stable-letter exponent sum vanishes in every relator
        let t = n.stable.id;
        for r in n.presentation.relators() {
            assert_eq!(r.exponent_sum(t), 0);
        }
        // replay the move log independently and check the transported values
        let mut q = p.clone();
        let mut cur = eps;
        for mv in &n.moves {
            cur = transport_zmap(&cur, mv, &q);
            q = apply_tietze(&q, mv).unwrap().presentation;
        }
        assert_eq!(q, n.presentation);
        assert_eq!(cur, n.zmap);
    }

    #[test]
    fn normalize_rejects_bad_maps() {
        let p = bs12();
        assert!(matches!(
            normalize_stable_letter(&p, &ZHomomorphism::from_i64(&[0, 1])),
            Err(ZmapError::NotHomomorphism { .. })
        ));
        assert!(matches!(
            normalize_stable_letter(&p, &ZHomomorphism::from_i64(&[2, 0])),
            Err(ZmapError::NotSurjective { .. })
        ));
    }

    #[test]
    fn normalize_negative_unit() {
        let p = FinitePresentation::from_names(&["t"], vec![]).unwrap();
        let n = normalize_stable_letter(&p, &ZHomomorphism::from_i64(&[-1])).unwrap();
        assert_eq!(n.zmap.values(), &[BigInt::from(1)]);
        assert_eq!(n.moves.len(), 1);
    }
}
