//! Text grammar for words, presentations and homomorphism values.
//!
//! Word grammar: a whitespace- or `*`-separated sequence of atoms, each
//! `name` or `name^e` with `e` a nonzero signed integer; `1` denotes the
//! empty word. Presentations come either inline (`t, a | w1 ; w2`) or as
//! two lines (`gens: t a` / `rels: w1 ; w2`). Canonical JSON input is
//! detected by a leading `{` and delegated to the JSON reader.

use num_bigint::BigInt;
use thiserror::Error;

use crate::presentations::{valid_generator_name, FinitePresentation, PresentationError};
use crate::words::{GenId, Letter, Word};
use crate::zmaps::ZHomomorphism;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown generator `{name}` at offset {offset}")]
    UnknownGenerator { offset: usize, name: String },
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("{0}")]
    BadPresentation(String),
    #[error("invalid JSON document: {0}")]
    Json(String),
}

impl From<PresentationError> for ParseError {
    fn from(e: PresentationError) -> Self {
        match e {
            PresentationError::DuplicateGenerator(n) => ParseError::DuplicateGenerator(n),
            other => ParseError::BadPresentation(other.to_string()),
        }
    }
}

/// Split into atoms, remembering each atom's byte offset.
fn atoms(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() || c == '*' {
            if let Some(s) = start.take() {
                out.push((s, &text[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &text[s..]));
    }
    out
}

/// Parse one word with a name resolver.
pub fn parse_word_with<F>(text: &str, lookup: F) -> Result<Word, ParseError>
where
    F: Fn(&str) -> Option<GenId>,
{
    let mut letters: Vec<Letter> = Vec::new();
    for (offset, atom) in atoms(text) {
        if atom == "1" {
            continue;
        }
        let (name, exp) = match atom.split_once('^') {
            Some((n, e)) => {
                let exp: i64 = e.parse().map_err(|_| ParseError::Syntax {
                    offset,
                    message: format!("invalid exponent `{e}`"),
                })?;
                if exp == 0 {
                    return Err(ParseError::Syntax {
                        offset,
                        message: "exponent must be nonzero".into(),
                    });
                }
                (n, exp)
            }
            None => (atom, 1),
        };
        if !valid_generator_name(name) {
            return Err(ParseError::Syntax {
                offset,
                message: format!("invalid atom `{atom}`"),
            });
        }
        let gen = lookup(name).ok_or_else(|| ParseError::UnknownGenerator {
            offset,
            name: name.to_string(),
        })?;
        let sign = if exp > 0 { 1 } else { -1 };
        for _ in 0..exp.unsigned_abs() {
            letters.push(Letter::new(gen, sign));
        }
    }
    Ok(Word::from_letters(letters))
}

/// Parse one word against a presentation's generator names.
pub fn parse_word(text: &str, p: &FinitePresentation) -> Result<Word, ParseError> {
    parse_word_with(text, |name| p.gen_id(name))
}

fn split_generator_names(text: &str) -> Vec<&str> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Parse a presentation from inline text, the two-line form, or canonical
/// JSON. Returns the presentation plus warnings for relators that reduce
/// to the trivial word (those are dropped).
pub fn parse_presentation(text: &str) -> Result<(FinitePresentation, Vec<String>), ParseError> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        let p = crate::jsonio::presentation_from_json(trimmed)?;
        return Ok((p, Vec::new()));
    }
    let (gens_text, rels_text) = if let Some((g, r)) = trimmed.split_once('|') {
        (g.to_string(), r.to_string())
    } else {
        let mut gens: Option<String> = None;
        let mut rels = String::new();
        for line in trimmed.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("gens:") {
                if gens.is_some() {
                    return Err(ParseError::Syntax {
                        offset: 0,
                        message: "repeated `gens:` line".into(),
                    });
                }
                gens = Some(rest.to_string());
            } else if let Some(rest) = line.strip_prefix("rels:") {
                if !rels.is_empty() {
                    rels.push(';');
                }
                rels.push_str(rest);
            } else {
                return Err(ParseError::Syntax {
                    offset: 0,
                    message: format!("unrecognized line `{line}` (expected `gens:` or `rels:`)"),
                });
            }
        }
        let gens = gens.ok_or_else(|| ParseError::Syntax {
            offset: 0,
            message: "missing `|` or `gens:` line".into(),
        })?;
        (gens, rels)
    };

    let names: Vec<String> = split_generator_names(&gens_text)
        .into_iter()
        .map(|s| s.to_string())
        .collect();
    for name in &names {
        if !valid_generator_name(name) {
            return Err(ParseError::Syntax {
                offset: 0,
                message: format!("invalid generator name `{name}`"),
            });
        }
    }
    {
        let mut seen: Vec<&str> = Vec::new();
        for name in &names {
            if seen.contains(&name.as_str()) {
                return Err(ParseError::DuplicateGenerator(name.clone()));
            }
            seen.push(name);
        }
    }
    let lookup = |n: &str| names.iter().position(|x| x == n);

    let mut relators = Vec::new();
    let mut warnings = Vec::new();
    for piece in rels_text.split(';') {
        if piece.trim().is_empty() {
            continue;
        }
        let w = parse_word_with(piece, lookup)?;
        if w.is_identity() {
            warnings.push(format!(
                "relator `{}` reduces to the trivial word and was dropped",
                piece.trim()
            ));
            continue;
        }
        relators.push(w);
    }
    let p = FinitePresentation::new(names, relators)?;
    Ok((p, warnings))
}

/// Parse homomorphism values of the form `t=1,a=0`. Unlisted generators
/// map to 0; unknown names are rejected.
pub fn parse_zmap(text: &str, p: &FinitePresentation) -> Result<ZHomomorphism, ParseError> {
    let mut values = vec![BigInt::from(0); p.generator_count()];
    let mut assigned = vec![false; p.generator_count()];
    for piece in text.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let (name, value) = piece.split_once('=').ok_or_else(|| ParseError::Syntax {
            offset: 0,
            message: format!("expected `name=value`, got `{piece}`"),
        })?;
        let name = name.trim();
        let gen = p.gen_id(name).ok_or_else(|| ParseError::UnknownGenerator {
            offset: 0,
            name: name.to_string(),
        })?;
        if assigned[gen] {
            return Err(ParseError::Syntax {
                offset: 0,
                message: format!("generator `{name}` assigned twice"),
            });
        }
        assigned[gen] = true;
        values[gen] = value.trim().parse().map_err(|_| ParseError::Syntax {
            offset: 0,
            message: format!("invalid integer `{}`", value.trim()),
        })?;
    }
    Ok(ZHomomorphism::new(values))
}

/// Render a word in the text grammar, collapsing runs into powers. The
/// empty word renders as `1`.
pub fn render_word(w: &Word, names: &[String]) -> String {
    if w.is_identity() {
        return "1".to_string();
    }
    let mut parts: Vec<String> = Vec::new();
    let letters = w.letters();
    let mut i = 0;
    while i < letters.len() {
        let l = letters[i];
        let mut run = 1;
        while i + run < letters.len() && letters[i + run] == l {
            run += 1;
        }
        let e = l.sign as i64 * run as i64;
        if e == 1 {
            parts.push(names[l.gen].clone());
        } else {
            parts.push(format!("{}^{}", names[l.gen], e));
        }
        i += run;
    }
    parts.join(" ")
}

/// Render a presentation in the inline form `g1, g2 | w1 ; w2`.
pub fn render_presentation(p: &FinitePresentation) -> String {
    let names = p.generator_names();
    let rels: Vec<String> = p.relators().iter().map(|r| render_word(r, &names)).collect();
    format!("{} | {}", names.join(", "), rels.join(" ; "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_bs12_inline() {
        let (p, warnings) = parse_presentation("t, a | t a t^-1 a^-2").unwrap();
        assert!(warnings.is_empty());
        assert_eq!(p.generator_names(), vec!["t", "a"]);
        assert_eq!(p.relator_count(), 1);
        assert_eq!(p.relators()[0].exponent_sum(0), 0);
        assert_eq!(p.relators()[0].exponent_sum(1), -1);
    }

    #[test]
    fn parse_free_group_empty_relators() {
        let (p, warnings) = parse_presentation("a, b |").unwrap();
        assert!(warnings.is_empty());
        assert_eq!(p.generator_count(), 2);
        assert_eq!(p.relator_count(), 0);
    }

    #[test]
    fn parse_trivial_relator_warns() {
        let (p, warnings) = parse_presentation("t | t t^-1").unwrap();
        assert_eq!(p.relator_count(), 0);
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn parse_two_line_form() {
        let (p, _) = parse_presentation("gens: t a\nrels: t a t^-1 a^-2").unwrap();
        assert_eq!(p.generator_names(), vec!["t", "a"]);
        assert_eq!(p.relator_count(), 1);
    }

    #[test]
    fn parse_star_separated_word() {
        let (p, _) = parse_presentation("x, y | x^2 * y^-3").unwrap();
        assert_eq!(p.relators()[0].len(), 5);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_presentation("a, a |"),
            Err(ParseError::DuplicateGenerator(_))
        ));
        assert!(matches!(
            parse_presentation("a | b"),
            Err(ParseError::UnknownGenerator { .. })
        ));
        assert!(matches!(
            parse_presentation("a | a^0"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_presentation("a b"),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn render_round_trip() {
        let (p, _) = parse_presentation("t, a | t a t^-1 a^-2").unwrap();
        let text = render_presentation(&p);
        assert_eq!(text, "t, a | t a t^-1 a^-2");
        let (q, _) = parse_presentation(&text).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn render_identity_word() {
        assert_eq!(render_word(&Word::identity(), &[]), "1");
    }

    #[test]
    fn parse_zmap_values() {
        let (p, _) = parse_presentation("t, a |").unwrap();
        let eps = parse_zmap("t=1,a=0", &p).unwrap();
        assert_eq!(eps.values(), &[BigInt::from(1), BigInt::from(0)]);
        let eps = parse_zmap("a=-3", &p).unwrap();
        assert_eq!(eps.values(), &[BigInt::from(0), BigInt::from(-3)]);
        assert!(parse_zmap("q=1", &p).is_err());
        assert!(parse_zmap("t=1,t=2", &p).is_err());
    }
}
