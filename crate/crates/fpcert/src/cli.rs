//! Command-line surface. Exit codes are part of the contract so shell
//! pipelines can branch on verdicts: 0 success/CERTIFIED, 1 usage error,
//! 2 no epimorphism onto Z, 3 INCONCLUSIVE, 4 FAILED certificate,
//! 5 parse error.

use std::ffi::OsString;
use std::fmt::Write as _;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::certify::{
    audit_certificate, certify, render_certificate, CertifyOptions, LowerBoundRoute, RenderFormat,
    Verdict,
};
use crate::covers::{cover_hnn_data, kernel_presentation};
use crate::grammar::{parse_presentation, parse_zmap, render_presentation, render_word};
use crate::hnn::split_as_hnn;
use crate::intlin::abelianization;
use crate::jsonio::{
    cover_to_doc, growth_to_doc, presentation_to_doc, splitting_to_doc, zmap_to_doc,
    AbelianizationDoc, CoverDoc, PresentationDoc, SplittingDoc, ZmapDoc, SCHEMA_VERSION,
};
use crate::l2est::{betti_growth, format_ratio, l2_bounds, parse_ratio};
use crate::presentations::FinitePresentation;
use crate::zmaps::{check_zmap, find_zmap, normalize_stable_letter, Normalized, ZHomomorphism};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NO_ZMAP: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_FAILED: i32 = 4;
pub const EXIT_PARSE: i32 = 5;

pub const DEFAULT_SNF_DIM_CAP: usize = 2000;
pub const SNF_DIM_ENV: &str = "FPCERT_MAX_SNF_DIM";

#[derive(Debug, Clone)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliOutput {
    fn ok(stdout: String, stderr: String) -> Self {
        CliOutput {
            code: EXIT_OK,
            stdout,
            stderr,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Parser, Debug)]
#[command(
    name = "fpcert",
    version,
    about = "Finite group presentations: HNN splittings, cyclic covers, Betti growth, acylindricity certificates",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// PRESENTATION arguments accept a file path, `-` for stdin, or inline
/// text (`t, a | t a t^-1 a^-2`, a `gens:`/`rels:` pair of lines, or a
/// canonical JSON document).
#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a presentation and print its canonical form
    Parse {
        presentation: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// First Betti number and torsion of the abelianization
    Abelianize {
        presentation: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Find a surjective homomorphism onto Z
    FindZ {
        presentation: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// HNN splitting over the shift alphabet (after normalization)
    Split {
        presentation: String,
        /// Generator values `t=1,a=0`; found automatically when omitted
        #[arg(long = "z")]
        zmap: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Presentation of the degree-n cyclic cover kernel
    Cover {
        presentation: String,
        #[arg(short = 'n')]
        degree: usize,
        #[arg(long = "z")]
        zmap: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Betti numbers of the cyclic covers for n = 1..=max-n
    BettiGrowth {
        presentation: String,
        #[arg(long = "max-n", default_value_t = 6)]
        max_n: usize,
        #[arg(long = "z")]
        zmap: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run the acylindricity certificate pipeline
    Certify {
        presentation: String,
        /// Take L = max(def - 1, 0) as the lower bound
        #[arg(long = "use-deficiency")]
        use_deficiency: bool,
        /// User-supplied rational lower bound `P/Q` on the first L2-Betti number
        #[arg(long = "l2-lower-bound")]
        l2_lower_bound: Option<String>,
        #[arg(long = "z")]
        zmap: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

struct Fail {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Fail {
    Fail {
        code,
        message: message.into(),
    }
}

fn snf_dim_cap() -> usize {
    std::env::var(SNF_DIM_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_SNF_DIM_CAP)
}

fn guard_dims(rows: usize, cols: usize) -> Result<(), Fail> {
    let cap = snf_dim_cap();
    if rows > cap || cols > cap {
        return Err(fail(
            EXIT_USAGE,
            format!("relation matrix {rows}x{cols} exceeds {SNF_DIM_ENV} = {cap}"),
        ));
    }
    Ok(())
}

fn load_presentation(arg: &str) -> Result<(FinitePresentation, Vec<String>), Fail> {
    let content = if arg == "-" {
        std::io::read_to_string(std::io::stdin())
            .map_err(|e| fail(EXIT_USAGE, format!("cannot read stdin: {e}")))?
    } else if std::path::Path::new(arg).is_file() {
        std::fs::read_to_string(arg)
            .map_err(|e| fail(EXIT_USAGE, format!("cannot read `{arg}`: {e}")))?
    } else {
        arg.to_string()
    };
    parse_presentation(&content).map_err(|e| fail(EXIT_PARSE, format!("parse error: {e}")))
}

/// Obtain a verified homomorphism: from `--z` when given, otherwise by
/// search. Search failure is exit 2; a bad supplied map is a usage error.
fn resolve_zmap(p: &FinitePresentation, zflag: &Option<String>) -> Result<ZHomomorphism, Fail> {
    match zflag {
        Some(text) => {
            let eps = parse_zmap(text, p)
                .map_err(|e| fail(EXIT_USAGE, format!("invalid --z value: {e}")))?;
            let report = check_zmap(p, &eps);
            if !report.homomorphism {
                return Err(fail(
                    EXIT_USAGE,
                    format!(
                        "--z does not define a homomorphism: relator {} has nonzero image",
                        report.failing_relators[0]
                    ),
                ));
            }
            if !report.surjective {
                return Err(fail(
                    EXIT_USAGE,
                    format!("--z is not surjective: gcd of values is {}", report.gcd),
                ));
            }
            Ok(eps)
        }
        None => find_zmap(p).ok_or_else(|| fail(EXIT_NO_ZMAP, "b1 = 0: no epimorphism onto Z")),
    }
}

fn normalize(p: &FinitePresentation, zflag: &Option<String>) -> Result<Normalized, Fail> {
    let eps = resolve_zmap(p, zflag)?;
    normalize_stable_letter(p, &eps)
        .map_err(|e| fail(EXIT_USAGE, format!("normalization failed: {e}")))
}

fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("serializable document");
    s.push('\n');
    s
}

fn warnings_to_stderr(warnings: &[String]) -> String {
    warnings
        .iter()
        .map(|w| format!("warning: {w}\n"))
        .collect()
}

#[derive(Serialize)]
struct FindZDoc {
    schema_version: String,
    values: Vec<(String, String)>,
}

#[derive(Serialize)]
struct SplitOutputDoc {
    schema_version: String,
    normalized: PresentationDoc,
    zmap: ZmapDoc,
    moves_applied: String,
    splitting: SplittingDoc,
}

#[derive(Serialize)]
struct CoverOutputDoc {
    schema_version: String,
    normalized: PresentationDoc,
    cover: CoverDoc,
}

pub fn run<I, S>(args: I) -> CliOutput
where
    I: IntoIterator<Item = S>,
    S: Into<OsString>,
{
    let argv: Vec<OsString> = std::iter::once(OsString::from("fpcert"))
        .chain(args.into_iter().map(Into::into))
        .collect();
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliOutput {
                    code: EXIT_OK,
                    stdout: rendered,
                    stderr: String::new(),
                },
                _ => CliOutput {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: rendered,
                },
            };
        }
    };
    match dispatch(cli.command) {
        Ok(out) => out,
        Err(Fail { code, message }) => CliOutput {
            code,
            stdout: String::new(),
            stderr: format!("{message}\n"),
        },
    }
}

fn dispatch(cmd: Command) -> Result<CliOutput, Fail> {
    match cmd {
        Command::Parse {
            presentation,
            format,
        } => {
            let (p, warnings) = load_presentation(&presentation)?;
            let stdout = match format {
                Format::Json => to_json(&presentation_to_doc(&p)),
                Format::Text => format!("{}\n", render_presentation(&p)),
            };
            Ok(CliOutput::ok(stdout, warnings_to_stderr(&warnings)))
        }
        Command::Abelianize {
            presentation,
            format,
        } => {
            let (p, warnings) = load_presentation(&presentation)?;
            guard_dims(p.relator_count(), p.generator_count())?;
            let ab = abelianization(&p);
            let stdout = match format {
                Format::Json => to_json(&AbelianizationDoc {
                    schema_version: SCHEMA_VERSION.to_string(),
                    b1: ab.b1.to_string(),
                    torsion: ab.torsion.iter().map(|t| t.to_string()).collect(),
                    min_abelian_gens: ab.min_abelian_gens.to_string(),
                }),
                Format::Text => {
                    let torsion = if ab.torsion.is_empty() {
                        "-".to_string()
                    } else {
                        ab.torsion
                            .iter()
                            .map(|t| t.to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    };
                    format!(
                        "b1 = {}\ntorsion = {}\nmin_abelian_gens = {}\n",
                        ab.b1, torsion, ab.min_abelian_gens
                    )
                }
            };
            Ok(CliOutput::ok(stdout, warnings_to_stderr(&warnings)))
        }
        Command::FindZ {
            presentation,
            format,
        } => {
            let (p, warnings) = load_presentation(&presentation)?;
            guard_dims(p.relator_count(), p.generator_count())?;
            let eps =
                find_zmap(&p).ok_or_else(|| fail(EXIT_NO_ZMAP, "b1 = 0: no epimorphism onto Z"))?;
            let doc = zmap_to_doc(&eps, &p);
            let stdout = match format {
                Format::Json => to_json(&FindZDoc {
                    schema_version: SCHEMA_VERSION.to_string(),
                    values: doc.values,
                }),
                Format::Text => {
                    let vals: Vec<String> =
                        doc.values.iter().map(|(n, v)| format!("{n}={v}")).collect();
                    format!("{}\n", vals.join(", "))
                }
            };
            Ok(CliOutput::ok(stdout, warnings_to_stderr(&warnings)))
        }
        Command::Split {
            presentation,
            zmap,
            format,
        } => {
            let (p, warnings) = load_presentation(&presentation)?;
            guard_dims(p.relator_count(), p.generator_count())?;
            let norm = normalize(&p, &zmap)?;
            let split = split_as_hnn(&norm.presentation, norm.stable.id)
                .expect("normalized presentation splits");
            let stdout = match format {
                Format::Json => to_json(&SplitOutputDoc {
                    schema_version: SCHEMA_VERSION.to_string(),
                    normalized: presentation_to_doc(&norm.presentation),
                    zmap: zmap_to_doc(&norm.zmap, &norm.presentation),
                    moves_applied: norm.moves.len().to_string(),
                    splitting: splitting_to_doc(&split, &norm.presentation),
                }),
                Format::Text => {
                    let base_names = split.base.generator_names();
                    let mut out = String::new();
                    let _ = writeln!(
                        out,
                        "normalized: {}",
                        render_presentation(&norm.presentation)
                    );
                    let _ = writeln!(out, "stable letter: {}", split.stable.name);
                    let _ = writeln!(
                        out,
                        "N = {}, M = {} (coarse shift bound {})",
                        split.shift_bound_n, split.rank_bound_m, split.coarse_shift_bound
                    );
                    let _ = writeln!(out, "base: {}", render_presentation(&split.base));
                    let c: Vec<String> = split
                        .assoc_c
                        .iter()
                        .map(|w| render_word(w, &base_names))
                        .collect();
                    let d: Vec<String> = split
                        .assoc_d
                        .iter()
                        .map(|w| render_word(w, &base_names))
                        .collect();
                    let _ = writeln!(out, "C = {{{}}}", c.join(", "));
                    let _ = writeln!(out, "D = {{{}}}", d.join(", "));
                    out
                }
            };
            Ok(CliOutput::ok(stdout, warnings_to_stderr(&warnings)))
        }
        Command::Cover {
            presentation,
            degree,
            zmap,
            format,
        } => {
            let (p, warnings) = load_presentation(&presentation)?;
            let norm = normalize(&p, &zmap)?;
            let k = norm.presentation.generator_count().saturating_sub(1);
            let m = norm.presentation.relator_count();
            guard_dims(m.saturating_mul(degree), k.saturating_mul(degree) + 1)?;
            let cover = kernel_presentation(&norm.presentation, norm.stable.id, degree)
                .map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
            let split = split_as_hnn(&norm.presentation, norm.stable.id)
                .expect("normalized presentation splits");
            let edge = cover_hnn_data(&split, &cover).ok();
            let stdout = match format {
                Format::Json => to_json(&CoverOutputDoc {
                    schema_version: SCHEMA_VERSION.to_string(),
                    normalized: presentation_to_doc(&norm.presentation),
                    cover: cover_to_doc(&cover, &norm.presentation, edge.as_ref()),
                }),
                Format::Text => {
                    let mut out = String::new();
                    let _ = writeln!(out, "degree: {}", cover.n);
                    let _ = writeln!(out, "kernel: {}", render_presentation(&cover.presentation));
                    let ab = abelianization(&cover.presentation);
                    let torsion: Vec<String> =
                        ab.torsion.iter().map(|t| t.to_string()).collect();
                    let _ = writeln!(out, "b1 = {}, torsion = [{}]", ab.b1, torsion.join(","));
                    if let Some(e) = &edge {
                        let names = cover.presentation.generator_names();
                        let c: Vec<String> = e
                            .assoc_c_words
                            .iter()
                            .map(|w| render_word(w, &names))
                            .collect();
                        let _ = writeln!(
                            out,
                            "edge rank bound M = {}; C = {{{}}}",
                            e.sharp_rank_bound,
                            c.join(", ")
                        );
                    }
                    out
                }
            };
            Ok(CliOutput::ok(stdout, warnings_to_stderr(&warnings)))
        }
        Command::BettiGrowth {
            presentation,
            max_n,
            zmap,
            format,
        } => {
            let (p, warnings) = load_presentation(&presentation)?;
            if max_n < 1 {
                return Err(fail(EXIT_USAGE, "--max-n must be at least 1"));
            }
            let norm = normalize(&p, &zmap)?;
            let k = norm.presentation.generator_count().saturating_sub(1);
            let m = norm.presentation.relator_count();
            guard_dims(m.saturating_mul(max_n), k.saturating_mul(max_n) + 1)?;
            let report = betti_growth(&norm.presentation, norm.stable.id, max_n)
                .map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
            let bounds = l2_bounds(&p);
            let stdout = match format {
                Format::Json => to_json(&growth_to_doc(&report, &bounds)),
                Format::Text => {
                    let mut rows: Vec<[String; 4]> =
                        vec![["n".into(), "b1".into(), "torsion".into(), "ratio".into()]];
                    for r in &report.rows {
                        let torsion = if r.torsion.is_empty() {
                            "-".to_string()
                        } else {
                            r.torsion
                                .iter()
                                .map(|t| t.to_string())
                                .collect::<Vec<_>>()
                                .join(",")
                        };
                        rows.push([
                            r.n.to_string(),
                            r.b1.to_string(),
                            torsion,
                            format_ratio(&r.ratio),
                        ]);
                    }
                    let widths: Vec<usize> = (0..4)
                        .map(|i| rows.iter().map(|r| r[i].len()).max().unwrap_or(0))
                        .collect();
                    let mut out = String::new();
                    let _ = writeln!(out, "{}", report.label);
                    for row in &rows {
                        let cells: Vec<String> = row
                            .iter()
                            .enumerate()
                            .map(|(i, c)| format!("{:<w$}", c, w = widths[i]))
                            .collect();
                        let _ = writeln!(out, "  {}", cells.join("  ").trim_end());
                    }
                    let _ = writeln!(
                        out,
                        "bounds: def-1 = {} <= b1^(2) <= rank-1 = {}",
                        bounds.lower_from_deficiency, bounds.upper_from_rank
                    );
                    let _ = writeln!(
                        out,
                        "last ratio: {}",
                        format_ratio(&report.trend.last_ratio)
                    );
                    out
                }
            };
            Ok(CliOutput::ok(stdout, warnings_to_stderr(&warnings)))
        }
        Command::Certify {
            presentation,
            use_deficiency,
            l2_lower_bound,
            zmap,
            format,
        } => {
            let (p, warnings) = load_presentation(&presentation)?;
            let route = match (use_deficiency, l2_lower_bound) {
                (true, None) => LowerBoundRoute::Deficiency,
                (false, Some(text)) => {
                    let r = parse_ratio(&text).ok_or_else(|| {
                        fail(
                            EXIT_USAGE,
                            format!("invalid --l2-lower-bound value `{text}` (expected P/Q)"),
                        )
                    })?;
                    LowerBoundRoute::UserSupplied(r)
                }
                (true, Some(_)) => {
                    return Err(fail(
                        EXIT_USAGE,
                        "choose one of --use-deficiency or --l2-lower-bound, not both",
                    ))
                }
                (false, None) => {
                    return Err(fail(
                        EXIT_USAGE,
                        "a lower-bound route is required: --use-deficiency or --l2-lower-bound P/Q",
                    ))
                }
            };
            let eps_override = match &zmap {
                Some(text) => Some(
                    parse_zmap(text, &p)
                        .map_err(|e| fail(EXIT_USAGE, format!("invalid --z value: {e}")))?,
                ),
                None => None,
            };
            let cap = snf_dim_cap();
            let k = p.generator_count().saturating_sub(1).max(1);
            let m = p.relator_count().max(1);
            let opts = CertifyOptions {
                max_cover_degree: CertifyOptions::default()
                    .max_cover_degree
                    .min(cap / m)
                    .min(cap.saturating_sub(1) / k),
            };
            let cert = certify(&p, &route, eps_override.as_ref(), &opts);
            let audit = audit_certificate(&cert, &p);
            let mut stderr = warnings_to_stderr(&warnings);
            for f in &audit.failures {
                let _ = writeln!(stderr, "audit failure: {f}");
            }
            let stdout = match format {
                Format::Json => {
                    let mut s = render_certificate(&cert, RenderFormat::Json);
                    s.push('\n');
                    s
                }
                Format::Text => render_certificate(&cert, RenderFormat::Text),
            };
            let code = if !audit.pass {
                EXIT_FAILED
            } else {
                match cert.verdict {
                    Verdict::Certified => EXIT_OK,
                    Verdict::Inconclusive => EXIT_INCONCLUSIVE,
                    Verdict::Failed => EXIT_FAILED,
                }
            };
            Ok(CliOutput {
                code,
                stdout,
                stderr,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_bs12_json() {
        let out = run(["split", "t, a | t a t^-1 a^-2"]);
        assert_eq!(out.code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["splitting"]["shift_bound_n"], "1");
        assert_eq!(v["splitting"]["rank_bound_m"], "1");
    }

    #[test]
    fn find_z_finite_group_exit_2() {
        let out = run(["find-z", "a | a^2"]);
        assert_eq!(out.code, EXIT_NO_ZMAP);
        assert!(out.stderr.contains("b1 = 0"));
    }

    #[test]
    fn certify_exit_codes() {
        let out = run([
            "certify",
            "a, b, c, d | a b a^-1 b^-1 c d c^-1 d^-1",
            "--use-deficiency",
        ]);
        assert_eq!(out.code, EXIT_OK);
        let out = run(["certify", "t, a | t a t^-1 a^-2", "--use-deficiency"]);
        assert_eq!(out.code, EXIT_INCONCLUSIVE);
    }

    #[test]
    fn certify_requires_a_route() {
        let out = run(["certify", "a, b |"]);
        assert_eq!(out.code, EXIT_USAGE);
    }

    #[test]
    fn unknown_flag_rejected() {
        let out = run(["split", "a, b |", "--bogus"]);
        assert_eq!(out.code, EXIT_USAGE);
    }

    #[test]
    fn parse_error_exit_5() {
        let out = run(["parse", "a | q"]);
        assert_eq!(out.code, EXIT_PARSE);
    }

    #[test]
    fn trivial_relator_warning_on_stderr() {
        let out = run(["parse", "t | t t^-1"]);
        assert_eq!(out.code, EXIT_OK);
        assert!(out.stderr.contains("trivial"));
    }

    #[test]
    fn betti_growth_free_group_rows() {
        let out = run(["betti-growth", "a, b |", "--max-n", "4"]);
        assert_eq!(out.code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        let rows = v["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0]["b1"], "2");
        assert_eq!(rows[0]["ratio"], "2");
        assert_eq!(rows[1]["ratio"], "3/2");
        assert_eq!(rows[3]["ratio"], "5/4");
    }
}
