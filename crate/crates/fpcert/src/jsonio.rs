//! Canonical JSON documents. All numeric values are emitted as decimal
//! strings (rationals as `p/q`) so arbitrary precision survives any JSON
//! consumer; every document carries `schema_version: "1"`.

use serde::{Deserialize, Serialize};

use crate::covers::{CoverHnnData, CoverPresentation};
use crate::grammar::ParseError;
use crate::hnn::HnnSplitting;
use crate::l2est::{format_ratio, BettiGrowthReport, L2Bounds};
use crate::presentations::FinitePresentation;
use crate::words::{Letter, Word};
use crate::zmaps::ZHomomorphism;

pub const SCHEMA_VERSION: &str = "1";

pub type WordDoc = Vec<(String, String)>;

pub fn word_to_doc(w: &Word, names: &[String]) -> WordDoc {
    w.letters()
        .iter()
        .map(|l| (names[l.gen].clone(), l.sign.to_string()))
        .collect()
}

pub fn word_from_doc(doc: &[(String, String)], names: &[String]) -> Result<Word, ParseError> {
    let mut letters = Vec::with_capacity(doc.len());
    for (name, sign) in doc {
        let gen = names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| ParseError::UnknownGenerator {
                offset: 0,
                name: name.clone(),
            })?;
        let sign: i8 = match sign.as_str() {
            "1" => 1,
            "-1" => -1,
            other => {
                return Err(ParseError::Json(format!(
                    "letter sign must be \"1\" or \"-1\", got {other:?}"
                )))
            }
        };
        letters.push(Letter::new(gen, sign));
    }
    Ok(Word::from_letters(letters))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PresentationDoc {
    pub schema_version: String,
    pub generators: Vec<String>,
    pub relators: Vec<WordDoc>,
}

pub fn presentation_to_doc(p: &FinitePresentation) -> PresentationDoc {
    let names = p.generator_names();
    PresentationDoc {
        schema_version: SCHEMA_VERSION.to_string(),
        generators: names.clone(),
        relators: p.relators().iter().map(|r| word_to_doc(r, &names)).collect(),
    }
}

pub fn presentation_from_doc(doc: &PresentationDoc) -> Result<FinitePresentation, ParseError> {
    if doc.schema_version != SCHEMA_VERSION {
        return Err(ParseError::Json(format!(
            "unsupported schema_version {:?}",
            doc.schema_version
        )));
    }
    let relators = doc
        .relators
        .iter()
        .map(|r| word_from_doc(r, &doc.generators))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FinitePresentation::new(doc.generators.clone(), relators)?)
}

pub fn presentation_to_json(p: &FinitePresentation) -> String {
    serde_json::to_string_pretty(&presentation_to_doc(p)).expect("serializable document")
}

pub fn presentation_from_json(s: &str) -> Result<FinitePresentation, ParseError> {
    let doc: PresentationDoc =
        serde_json::from_str(s).map_err(|e| ParseError::Json(e.to_string()))?;
    presentation_from_doc(&doc)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZmapDoc {
    pub values: Vec<(String, String)>,
}

pub fn zmap_to_doc(eps: &ZHomomorphism, p: &FinitePresentation) -> ZmapDoc {
    ZmapDoc {
        values: p
            .generators()
            .iter()
            .map(|g| (g.name.clone(), eps.value(g.id).to_string()))
            .collect(),
    }
}

/// Splitting document. Shift letters `b[α,β]` are serialized under their
/// base names `<gen>_s<β>`; the embedding map is emitted explicitly so the
/// rewriting can be verified externally.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplittingDoc {
    pub schema_version: String,
    pub stable: String,
    pub shift_bound_n: String,
    pub rank_bound_m: String,
    pub coarse_shift_bound: String,
    pub base_generators: Vec<String>,
    pub base_relators: Vec<WordDoc>,
    pub relator_offsets: Vec<String>,
    pub assoc_c: Vec<WordDoc>,
    pub assoc_d: Vec<WordDoc>,
    pub conj_relations: Vec<(String, String)>,
    pub embedding: Vec<(String, WordDoc)>,
}

pub fn splitting_to_doc(s: &HnnSplitting, original: &FinitePresentation) -> SplittingDoc {
    let base_names = s.base.generator_names();
    let orig_names = original.generator_names();
    SplittingDoc {
        schema_version: SCHEMA_VERSION.to_string(),
        stable: s.stable.name.clone(),
        shift_bound_n: s.shift_bound_n.to_string(),
        rank_bound_m: s.rank_bound_m.to_string(),
        coarse_shift_bound: s.coarse_shift_bound.to_string(),
        base_generators: base_names.clone(),
        base_relators: s
            .base
            .relators()
            .iter()
            .map(|r| word_to_doc(r, &base_names))
            .collect(),
        relator_offsets: s.offsets.iter().map(|o| o.to_string()).collect(),
        assoc_c: s.assoc_c.iter().map(|w| word_to_doc(w, &base_names)).collect(),
        assoc_d: s.assoc_d.iter().map(|w| word_to_doc(w, &base_names)).collect(),
        conj_relations: s
            .conj_relations
            .iter()
            .map(|&(a, b)| (base_names[a].clone(), base_names[b].clone()))
            .collect(),
        embedding: base_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), word_to_doc(&s.embedding[i], &orig_names)))
            .collect(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchreierGenDoc {
    pub name: String,
    pub source_generator: String,
    pub coset: String,
    pub embedding: WordDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverDoc {
    pub schema_version: String,
    pub degree: String,
    pub stable: String,
    pub presentation: PresentationDoc,
    pub schreier_generators: Vec<SchreierGenDoc>,
    pub stable_embedding: WordDoc,
    pub inherited_zmap: Vec<(String, String)>,
    pub hnn_edge_data: Option<CoverHnnDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverHnnDoc {
    pub assoc_c: Vec<WordDoc>,
    pub assoc_d: Vec<WordDoc>,
    pub base_generators: Vec<String>,
    pub sharp_rank_bound: String,
}

pub fn cover_to_doc(
    cover: &CoverPresentation,
    original: &FinitePresentation,
    edge: Option<&CoverHnnData>,
) -> CoverDoc {
    let cover_names = cover.presentation.generator_names();
    let orig_names = original.generator_names();
    CoverDoc {
        schema_version: SCHEMA_VERSION.to_string(),
        degree: cover.n.to_string(),
        stable: cover.stable_x.name.clone(),
        presentation: presentation_to_doc(&cover.presentation),
        schreier_generators: cover
            .schreier_gens
            .iter()
            .map(|s| SchreierGenDoc {
                name: cover_names[s.cover_id].clone(),
                source_generator: orig_names[s.orig_gen].clone(),
                coset: s.coset.to_string(),
                embedding: word_to_doc(&s.embedding, &orig_names),
            })
            .collect(),
        stable_embedding: word_to_doc(&cover.x_embedding, &orig_names),
        inherited_zmap: cover
            .presentation
            .generators()
            .iter()
            .map(|g| (g.name.clone(), cover.inherited_zmap.value(g.id).to_string()))
            .collect(),
        hnn_edge_data: edge.map(|e| CoverHnnDoc {
            assoc_c: e
                .assoc_c_words
                .iter()
                .map(|w| word_to_doc(w, &cover_names))
                .collect(),
            assoc_d: e
                .assoc_d_words
                .iter()
                .map(|w| word_to_doc(w, &cover_names))
                .collect(),
            base_generators: e
                .base_gens
                .iter()
                .map(|&g| cover_names[g].clone())
                .collect(),
            sharp_rank_bound: e.sharp_rank_bound.to_string(),
        }),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthRowDoc {
    pub n: String,
    pub b1: String,
    pub torsion: Vec<String>,
    pub ratio: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrendDoc {
    pub last_ratio: String,
    pub nonincreasing: bool,
    pub nondecreasing: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundsDoc {
    pub lower_from_deficiency: String,
    pub upper_from_rank: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub user_lower: Option<(String, String)>,
}

pub fn bounds_to_doc(b: &L2Bounds) -> BoundsDoc {
    BoundsDoc {
        lower_from_deficiency: b.lower_from_deficiency.to_string(),
        upper_from_rank: b.upper_from_rank.to_string(),
        user_lower: b
            .user_lower
            .as_ref()
            .map(|(r, note)| (format_ratio(r), note.clone())),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthDoc {
    pub schema_version: String,
    pub label: String,
    pub note: String,
    pub rows: Vec<GrowthRowDoc>,
    pub trend: TrendDoc,
    pub bounds: BoundsDoc,
}

pub const GROWTH_NOTE: &str = "growth along cyclic covers; convergence to the first L2-Betti \
number is not asserted for this chain";

pub fn growth_to_doc(report: &BettiGrowthReport, bounds: &L2Bounds) -> GrowthDoc {
    GrowthDoc {
        schema_version: SCHEMA_VERSION.to_string(),
        label: report.label.clone(),
        note: GROWTH_NOTE.to_string(),
        rows: report
            .rows
            .iter()
            .map(|r| GrowthRowDoc {
                n: r.n.to_string(),
                b1: r.b1.to_string(),
                torsion: r.torsion.iter().map(|t| t.to_string()).collect(),
                ratio: format_ratio(&r.ratio),
            })
            .collect(),
        trend: TrendDoc {
            last_ratio: format_ratio(&report.trend.last_ratio),
            nonincreasing: report.trend.nonincreasing,
            nondecreasing: report.trend.nondecreasing,
        },
        bounds: bounds_to_doc(bounds),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AbelianizationDoc {
    pub schema_version: String,
    pub b1: String,
    pub torsion: Vec<String>,
    pub min_abelian_gens: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_presentation;

    #[test]
    fn presentation_json_round_trip() {
        for text in [
            "t, a | t a t^-1 a^-2",
            "a, b |",
            "a, b, c, d | a b a^-1 b^-1 c d c^-1 d^-1",
            "x, y | x^2 y^-3",
        ] {
            let (p, _) = parse_presentation(text).unwrap();
            let json = presentation_to_json(&p);
            let q = presentation_from_json(&json).unwrap();
            assert_eq!(p, q);
            // canonical: serialize(parse(serialize(x))) == serialize(x)
            assert_eq!(presentation_to_json(&q), json);
        }
    }

    #[test]
    fn bad_documents_rejected() {
        assert!(presentation_from_json("{}").is_err());
        let bad_version = r#"{"schema_version":"9","generators":["a"],"relators":[]}"#;
        assert!(presentation_from_json(bad_version).is_err());
        let bad_sign = r#"{"schema_version":"1","generators":["a"],"relators":[[["a","2"]]]}"#;
        assert!(presentation_from_json(bad_sign).is_err());
    }
}
