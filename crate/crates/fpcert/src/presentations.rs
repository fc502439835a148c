//! Finite presentations and the Tietze-transformation engine.
//!
//! A [`FinitePresentation`] stores uniquely named generators with dense ids
//! and cyclically reduced relators. Tietze moves change the generating set
//! while preserving the group; redundancy claims are never decided
//! algorithmically — removals require a derivation witness that is verified
//! by free reduction.

use thiserror::Error;

use crate::words::{GenId, Word};

/// A named generator with its dense id (`id` equals the position in the
/// generator list).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSymbol {
    pub id: GenId,
    pub name: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PresentationError {
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("invalid generator name `{0}` (expected letter followed by letters/digits/underscore)")]
    BadGeneratorName(String),
    #[error("relator {relator} references generator id {gen} but only {count} generators are declared")]
    UnknownGeneratorId {
        relator: usize,
        gen: GenId,
        count: usize,
    },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TietzeError {
    #[error("malformed move: {0}")]
    MalformedMove(String),
    #[error("relator is not redundant: {0}")]
    NotRedundant(String),
}

pub fn valid_generator_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Generators plus cyclically reduced relators. Trivial relators are dropped
/// on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePresentation {
    generators: Vec<GeneratorSymbol>,
    relators: Vec<Word>,
}

impl FinitePresentation {
    pub fn new(names: Vec<String>, relators: Vec<Word>) -> Result<Self, PresentationError> {
        let mut seen: Vec<&str> = Vec::new();
        for name in &names {
            if !valid_generator_name(name) {
                return Err(PresentationError::BadGeneratorName(name.clone()));
            }
            if seen.contains(&name.as_str()) {
                return Err(PresentationError::DuplicateGenerator(name.clone()));
            }
            seen.push(name);
        }
        let generators: Vec<GeneratorSymbol> = names
            .into_iter()
            .enumerate()
            .map(|(id, name)| GeneratorSymbol { id, name })
            .collect();
        let mut reduced = Vec::with_capacity(relators.len());
        for (i, r) in relators.into_iter().enumerate() {
            if let Some(g) = r.max_gen() {
                if g >= generators.len() {
                    return Err(PresentationError::UnknownGeneratorId {
                        relator: i,
                        gen: g,
                        count: generators.len(),
                    });
                }
            }
            let (core, _) = r.cyclic_reduce();
            if !core.is_identity() {
                reduced.push(core);
            }
        }
        Ok(FinitePresentation {
            generators,
            relators: reduced,
        })
    }

    /// Convenience constructor for `&str` names.
    pub fn from_names(names: &[&str], relators: Vec<Word>) -> Result<Self, PresentationError> {
        Self::new(names.iter().map(|s| s.to_string()).collect(), relators)
    }

    pub fn generators(&self) -> &[GeneratorSymbol] {
        &self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn relator_count(&self) -> usize {
        self.relators.len()
    }

    pub fn gen_id(&self, name: &str) -> Option<GenId> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn gen_name(&self, id: GenId) -> &str {
        &self.generators[id].name
    }

    pub fn generator_names(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.name.clone()).collect()
    }

    /// Generator count minus relator count for this presentation; a lower
    /// bound witness for the deficiency of the group.
    pub fn deficiency(&self) -> i64 {
        self.generators.len() as i64 - self.relators.len() as i64
    }
}

/// A product-of-conjugates expression `prod_i c_i * R_{k_i}^{e_i} * c_i^-1`
/// used as a mechanical redundancy witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelatorDerivation {
    pub factors: Vec<ConjugateFactor>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugateFactor {
    pub relator: usize,
    pub conjugator: Word,
    pub exponent: i64,
}

impl RelatorDerivation {
    /// Evaluate the product over the relators of `p`, freely reduced.
    pub fn evaluate(&self, p: &FinitePresentation) -> Result<Word, TietzeError> {
        let mut out = Word::identity();
        for f in &self.factors {
            let r = p.relators.get(f.relator).ok_or_else(|| {
                TietzeError::MalformedMove(format!("witness references relator {}", f.relator))
            })?;
            out = out.concat(&r.pow(f.exponent).conjugate_by(&f.conjugator));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TietzeMove {
    /// Adjoin a generator `name` defined to equal `definition`; adds the
    /// relator `name * definition^-1`.
    AddGenerator { name: String, definition: Word },
    /// Remove `gen` using the relator at `via_relator`, which must contain
    /// `gen` exactly once; `gen` is solved for and substituted everywhere.
    RemoveGenerator { gen: GenId, via_relator: usize },
    /// Append `relator`; if `witness` is present it is verified to derive a
    /// conjugate of `relator` from the existing ones.
    AddRedundantRelator {
        relator: Word,
        witness: Option<RelatorDerivation>,
    },
    /// Remove the relator at `index`; `witness` must derive a conjugate of
    /// it from the other relators (indices refer to the original list).
    RemoveRedundantRelator {
        index: usize,
        witness: RelatorDerivation,
    },
    /// Replace `gen` by `replacement` in every relator; `replacement` must
    /// contain `gen` exactly once, so the substitution is invertible.
    SubstituteGenerator { gen: GenId, replacement: Word },
}

/// Result of applying one move. `renames` maps old generator ids to new
/// ones (`None` for a removed generator).
#[derive(Debug, Clone)]
pub struct TietzeOutcome {
    pub presentation: FinitePresentation,
    pub renames: Vec<Option<GenId>>,
}

pub fn apply_tietze(
    p: &FinitePresentation,
    mv: &TietzeMove,
) -> Result<TietzeOutcome, TietzeError> {
    let g = p.generator_count();
    let identity_renames = |n: usize| (0..n).map(Some).collect::<Vec<_>>();
    match mv {
        TietzeMove::AddGenerator { name, definition } => {
            if p.gen_id(name).is_some() {
                return Err(TietzeError::MalformedMove(format!(
                    "generator `{name}` already exists"
                )));
            }
            if !valid_generator_name(name) {
                return Err(TietzeError::MalformedMove(format!(
                    "invalid generator name `{name}`"
                )));
            }
            if definition.max_gen().is_some_and(|m| m >= g) {
                return Err(TietzeError::MalformedMove(
                    "definition references a missing generator".into(),
                ));
            }
            let mut names = p.generator_names();
            names.push(name.clone());
            let mut relators = p.relators.clone();
            relators.push(Word::generator(g).concat(&definition.inverse()));
            let presentation = FinitePresentation::new(names, relators)
                .map_err(|e| TietzeError::MalformedMove(e.to_string()))?;
            Ok(TietzeOutcome {
                presentation,
                renames: identity_renames(g),
            })
        }
        TietzeMove::RemoveGenerator { gen, via_relator } => {
            if *gen >= g {
                return Err(TietzeError::MalformedMove(format!(
                    "generator id {gen} out of range"
                )));
            }
            let relator = p.relators.get(*via_relator).ok_or_else(|| {
                TietzeError::MalformedMove(format!("relator index {via_relator} out of range"))
            })?;
            if relator.occurrences(*gen) != 1 {
                return Err(TietzeError::NotRedundant(format!(
                    "relator {via_relator} does not contain generator `{}` exactly once",
                    p.gen_name(*gen)
                )));
            }
            let solved = solve_for(relator, *gen);
            let renames: Vec<Option<GenId>> = (0..g)
                .map(|i| match i.cmp(gen) {
                    std::cmp::Ordering::Less => Some(i),
                    std::cmp::Ordering::Equal => None,
                    std::cmp::Ordering::Greater => Some(i - 1),
                })
                .collect();
            let names: Vec<String> = p
                .generators
                .iter()
                .filter(|s| s.id != *gen)
                .map(|s| s.name.clone())
                .collect();
            let relators: Vec<Word> = p
                .relators
                .iter()
                .enumerate()
                .filter(|(i, _)| i != via_relator)
                .map(|(_, r)| {
                    r.substitute(*gen, &solved)
                        .map_gens(|i| renames[i].expect("solved word avoids removed generator"))
                })
                .collect();
            let presentation = FinitePresentation::new(names, relators)
                .map_err(|e| TietzeError::MalformedMove(e.to_string()))?;
            Ok(TietzeOutcome {
                presentation,
                renames,
            })
        }
        TietzeMove::AddRedundantRelator { relator, witness } => {
            if relator.max_gen().is_some_and(|m| m >= g) {
                return Err(TietzeError::MalformedMove(
                    "relator references a missing generator".into(),
                ));
            }
            if let Some(w) = witness {
                let derived = w.evaluate(p)?;
                if !conjugacy_witnessed(&derived, relator) {
                    return Err(TietzeError::NotRedundant(
                        "witness product does not reduce to the stated relator".into(),
                    ));
                }
            }
            let mut relators = p.relators.clone();
            relators.push(relator.clone());
            let presentation = FinitePresentation::new(p.generator_names(), relators)
                .map_err(|e| TietzeError::MalformedMove(e.to_string()))?;
            Ok(TietzeOutcome {
                presentation,
                renames: identity_renames(g),
            })
        }
        TietzeMove::RemoveRedundantRelator { index, witness } => {
            let target = p.relators.get(*index).ok_or_else(|| {
                TietzeError::MalformedMove(format!("relator index {index} out of range"))
            })?;
            if witness.factors.iter().any(|f| f.relator == *index) {
                return Err(TietzeError::NotRedundant(
                    "witness may not use the relator being removed".into(),
                ));
            }
            let derived = witness.evaluate(p)?;
            if !conjugacy_witnessed(&derived, target) {
                return Err(TietzeError::NotRedundant(
                    "witness product does not reduce to the removed relator".into(),
                ));
            }
            let relators: Vec<Word> = p
                .relators
                .iter()
                .enumerate()
                .filter(|(i, _)| i != index)
                .map(|(_, r)| r.clone())
                .collect();
            let presentation = FinitePresentation::new(p.generator_names(), relators)
                .map_err(|e| TietzeError::MalformedMove(e.to_string()))?;
            Ok(TietzeOutcome {
                presentation,
                renames: identity_renames(g),
            })
        }
        TietzeMove::SubstituteGenerator { gen, replacement } => {
            if *gen >= g {
                return Err(TietzeError::MalformedMove(format!(
                    "generator id {gen} out of range"
                )));
            }
            if replacement.max_gen().is_some_and(|m| m >= g) {
                return Err(TietzeError::MalformedMove(
                    "replacement references a missing generator".into(),
                ));
            }
            if replacement.occurrences(*gen) != 1 {
                return Err(TietzeError::MalformedMove(format!(
                    "replacement must contain generator `{}` exactly once",
                    p.gen_name(*gen)
                )));
            }
            let relators: Vec<Word> = p
                .relators
                .iter()
                .map(|r| r.substitute(*gen, replacement))
                .collect();
            let presentation = FinitePresentation::new(p.generator_names(), relators)
                .map_err(|e| TietzeError::MalformedMove(e.to_string()))?;
            Ok(TietzeOutcome {
                presentation,
                renames: identity_renames(g),
            })
        }
    }
}

/// Inverse move, relative to the presentation *after* `mv` is applied.
/// `None` when no mechanical inverse exists (an unwitnessed relator
/// addition cannot be removed soundly).
pub fn inverse_move(p: &FinitePresentation, mv: &TietzeMove) -> Option<TietzeMove> {
    match mv {
        TietzeMove::AddGenerator { .. } => Some(TietzeMove::RemoveGenerator {
            gen: p.generator_count(),
            via_relator: p.relator_count(),
        }),
        TietzeMove::RemoveGenerator { gen, via_relator } => {
            let relator = p.relators.get(*via_relator)?;
            if relator.occurrences(*gen) != 1 {
                return None;
            }
            let renumber = |i: GenId| if i < *gen { i } else { i - 1 };
            Some(TietzeMove::AddGenerator {
                name: p.gen_name(*gen).to_string(),
                definition: solve_for(relator, *gen).map_gens(renumber),
            })
        }
        TietzeMove::AddRedundantRelator { witness, .. } => {
            witness.as_ref()?;
            Some(TietzeMove::RemoveRedundantRelator {
                index: p.relator_count(),
                witness: witness.clone().unwrap(),
            })
        }
        TietzeMove::RemoveRedundantRelator { index, witness } => {
            let relator = p.relators.get(*index)?.clone();
            let factors = witness
                .factors
                .iter()
                .map(|f| ConjugateFactor {
                    relator: if f.relator > *index {
                        f.relator - 1
                    } else {
                        f.relator
                    },
                    conjugator: f.conjugator.clone(),
                    exponent: f.exponent,
                })
                .collect();
            Some(TietzeMove::AddRedundantRelator {
                relator,
                witness: Some(RelatorDerivation { factors }),
            })
        }
        TietzeMove::SubstituteGenerator { gen, replacement } => {
            let pos = replacement.letters().iter().position(|l| l.gen == *gen)?;
            let delta = replacement.letters()[pos].sign;
            let u = Word::from_letters(replacement.letters()[..pos].iter().copied());
            let v = Word::from_letters(replacement.letters()[pos + 1..].iter().copied());
            let inv = if delta == 1 {
                // phi(g) = u g v  =>  phi^-1(g) = u^-1 g v^-1
                u.inverse()
                    .concat(&Word::generator(*gen))
                    .concat(&v.inverse())
            } else {
                // phi(g) = u g^-1 v  =>  phi^-1(g) = v g^-1 u
                v.concat(&Word::letter(*gen, -1)).concat(&u)
            };
            Some(TietzeMove::SubstituteGenerator {
                gen: *gen,
                replacement: inv,
            })
        }
    }
}

/// Solve `relator = 1` for `gen`, which must occur exactly once. The result
/// is a word in the other generators.
fn solve_for(relator: &Word, gen: GenId) -> Word {
    let pos = relator
        .letters()
        .iter()
        .position(|l| l.gen == gen)
        .expect("generator occurs in relator");
    let delta = relator.letters()[pos].sign;
    let u = Word::from_letters(relator.letters()[..pos].iter().copied());
    let v = Word::from_letters(relator.letters()[pos + 1..].iter().copied());
    // u g^d v = 1  =>  g^d = u^-1 v^-1
    let g_to_d = u.inverse().concat(&v.inverse());
    if delta == 1 {
        g_to_d
    } else {
        g_to_d.inverse()
    }
}

/// Redundancy check: the derived product must be the target as a cyclic
/// word. A conjugate of a normal-closure element stays in the closure, so
/// rotation tolerance keeps the check sound while letting callers hand in
/// witnesses for relators that were cyclically reduced on storage.
fn conjugacy_witnessed(derived: &Word, target: &Word) -> bool {
    let (dc, _) = derived.cyclic_reduce();
    let (tc, _) = target.cyclic_reduce();
    dc.cyclically_equal(&tc)
}

/// True iff `p` and `q` have identical first Betti number and torsion
/// coefficients. Audit check for logged Tietze sequences.
pub fn abelianized_invariants_preserved(p: &FinitePresentation, q: &FinitePresentation) -> bool {
    let a = crate::intlin::abelianization(p);
    let b = crate::intlin::abelianization(q);
    a.b1 == b.b1 && a.torsion == b.torsion
}
