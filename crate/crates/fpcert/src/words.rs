//! Freely reduced words over signed generator alphabets.
//!
//! A [`Word`] is the currency of every other module: relators, Schreier
//! generators, embeddings, Tietze witnesses. Words are kept freely reduced
//! at construction, so downstream code may assume the invariant
//! unconditionally.

/// Dense index of a generator within a presentation (`0..g`).
pub type GenId = usize;

/// One signed letter. `sign` is always `+1` or `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: GenId,
    pub sign: i8,
}

impl Letter {
    pub fn new(gen: GenId, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        Letter { gen, sign }
    }

    pub fn inverse(self) -> Self {
        Letter {
            gen: self.gen,
            sign: -self.sign,
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.sign == -other.sign
    }
}

/// A freely reduced word; the empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

/// Free reduction: cancel all adjacent `g g^-1` pairs. Single stack pass;
/// the result is the unique reduced form of the input.
pub fn free_reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
    let mut stack: Vec<Letter> = Vec::new();
    for l in letters {
        debug_assert!(l.sign == 1 || l.sign == -1);
        match stack.last() {
            Some(&top) if top.cancels(l) => {
                stack.pop();
            }
            _ => stack.push(l),
        }
    }
    Word { letters: stack }
}

/// Cyclic reduction. Returns `(core, conjugator)` with
/// `input = conjugator * core * conjugator^-1` after free reduction and
/// `core` cyclically reduced.
pub fn cyclic_reduce(w: &Word) -> (Word, Word) {
    let mut core = w.letters.clone();
    let mut conj: Vec<Letter> = Vec::new();
    while core.len() >= 2 && core[0].cancels(*core.last().unwrap()) {
        conj.push(core[0]);
        core.pop();
        core.remove(0);
    }
    (Word { letters: core }, Word { letters: conj })
}

/// Total exponent sum of `g` in `w`.
pub fn exponent_sum(w: &Word, g: GenId) -> i64 {
    w.exponent_sum(g)
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        free_reduce(letters)
    }

    /// The single-letter word `g`.
    pub fn generator(gen: GenId) -> Self {
        Word {
            letters: vec![Letter::new(gen, 1)],
        }
    }

    pub fn letter(gen: GenId, sign: i8) -> Self {
        Word {
            letters: vec![Letter::new(gen, sign)],
        }
    }

    /// The word `g^e` (empty for `e = 0`).
    pub fn letter_power(gen: GenId, e: i64) -> Self {
        let sign = if e >= 0 { 1 } else { -1 };
        Word {
            letters: (0..e.unsigned_abs()).map(|_| Letter::new(gen, sign)).collect(),
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        free_reduce(self.letters.iter().chain(other.letters.iter()).copied())
    }

    /// `c * self * c^-1`, freely reduced.
    pub fn conjugate_by(&self, c: &Word) -> Word {
        c.concat(self).concat(&c.inverse())
    }

    pub fn pow(&self, e: i64) -> Word {
        let base = if e >= 0 { self.clone() } else { self.inverse() };
        let mut out = Word::identity();
        for _ in 0..e.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    pub fn exponent_sum(&self, g: GenId) -> i64 {
        self.letters
            .iter()
            .filter(|l| l.gen == g)
            .map(|l| l.sign as i64)
            .sum()
    }

    /// Number of occurrences of `g^{+1}` or `g^{-1}`.
    pub fn occurrences(&self, g: GenId) -> usize {
        self.letters.iter().filter(|l| l.gen == g).count()
    }

    pub fn max_gen(&self) -> Option<GenId> {
        self.letters.iter().map(|l| l.gen).max()
    }

    /// Replace every occurrence of `gen` by `replacement` (and of `gen^-1`
    /// by its inverse), then freely reduce.
    pub fn substitute(&self, gen: GenId, replacement: &Word) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            if l.gen == gen {
                if l.sign == 1 {
                    out.extend_from_slice(&replacement.letters);
                } else {
                    out.extend(replacement.letters.iter().rev().map(|x| x.inverse()));
                }
            } else {
                out.push(l);
            }
        }
        free_reduce(out)
    }

    /// Rename generator ids. `f` must be injective on the ids that occur.
    pub fn map_gens<F: Fn(GenId) -> GenId>(&self, f: F) -> Word {
        free_reduce(self.letters.iter().map(|l| Letter::new(f(l.gen), l.sign)))
    }

    pub fn cyclic_reduce(&self) -> (Word, Word) {
        cyclic_reduce(self)
    }

    /// Equality of cyclic words (rotation only, no inversion).
    pub fn cyclically_equal(&self, other: &Word) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let n = self.len();
        if n == 0 {
            return true;
        }
        (0..n).any(|r| (0..n).all(|i| self.letters[(r + i) % n] == other.letters[i]))
    }
}
