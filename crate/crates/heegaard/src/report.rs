//! Aggregated invariant reports.
//!
//! [`InvariantReport`] gathers every classification invariant this crate
//! computes for a single input — either a symplectic gluing matrix or a
//! linked group given directly — into one serializable structure with a
//! deterministic field order. [`CompareReport`] wraps two reports together
//! with an equivalence verdict.
//!
//! All big integers and rationals are rendered as decimal strings
//! (`"num/den"` for rationals) so that serialized output is exact,
//! human-readable, and byte-for-byte reproducible.
//!
//! Three fields carry presentation data rather than double-coset
//! invariants, and [`InvariantReport::same_invariants`] treats them
//! accordingly: `reidemeister` records residues read off the computed
//! partial normal form (different presentations can produce different
//! residues); the 2-primary `summands` list is one orthogonal decomposition
//! among possibly many (phases decide, summands only witness); and
//! `det_value` is reported as `None` for stabilized gluing input, where the
//! presentation basis is not pinned tightly enough to define it.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::classify_odd::seifert_invariants;
use crate::classify_two::{phase_vector, wall_decompose, BasicForm};
use crate::error::Result;
use crate::linked::{linked_group_of, LinkedGroup};
use crate::minimal::{
    class_count, det_invariant, groups_minimally_equivalent, minimal_equivalence,
    reidemeister_symbols, Parity, DEFAULT_SEARCH_LIMIT,
};
use crate::stable::{groups_stably_equivalent, stable_equivalence};
use crate::symplectic::{partial_normal_form, SymplecticMatrix};

/// 64-bit FNV-1a hash.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Canonical text encoding of a gluing matrix, used for the input digest.
fn canonical_matrix_encoding(h: &SymplecticMatrix) -> String {
    let m = h.matrix();
    let mut out = format!("matrix:{}x{}:", m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.push_str(&m.get(i, j).to_string());
            out.push(',');
        }
    }
    out
}

/// Canonical text encoding of a linked group, used for the input digest.
fn canonical_group_encoding(g: &LinkedGroup) -> String {
    let mut out = format!("group:rank={}:torsion=", g.free_rank());
    for t in g.torsion() {
        out.push_str(&t.to_string());
        out.push(',');
    }
    out.push_str(":linking=");
    for row in g.linking() {
        for e in row {
            out.push_str(&e.to_string());
            out.push(',');
        }
    }
    out
}

/// One block of odd-primary invariants: generators of order `prime^exponent`
/// and the quadratic character of the block determinant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OddBlockReport {
    pub exponent: u32,
    pub multiplicity: usize,
    /// `+1` or `-1`: Legendre symbol of the block's linking determinant.
    pub character: i32,
}

/// Classification data for one prime dividing the torsion order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrimeSection {
    /// Odd prime: block structure plus quadratic-residue characters.
    Odd {
        prime: String,
        blocks: Vec<OddBlockReport>,
    },
    /// Prime 2: generator exponents, one orthogonal summand decomposition
    /// of the linking form, and the Gauss-sum phase vector.
    ///
    /// The summand list is a *witness*, not a canonical invariant: isometric
    /// forms can decompose differently (e.g. `(1/2)⊕(3/4)` and
    /// `(1/2)⊕(1/4)` are isometric). The exponents together with the phase
    /// vector are the complete invariant.
    Two {
        exponents: Vec<u32>,
        summands: Vec<String>,
        /// `(φ_n, …, φ₁)`, each `"0"`–`"7"` or `"inf"`.
        phases: Vec<String>,
    },
}

/// Invariants of the minimal (unstabilized) splitting carried by the group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalSection {
    /// `"even"` or `"odd"`: parity of the linking form.
    pub parity: String,
    /// Smallest torsion coefficient τ.
    pub tau: String,
    /// Modulus τ̄ of the determinant invariant (τ, or 2τ for even parity).
    pub tau_bar: String,
    /// `|T|·det(lifted linking)` reduced mod τ̄; a unit mod τ.
    ///
    /// `None` for stabilized gluing input: a stabilization handle lets the
    /// presentation basis absorb any unit, so the value is only defined up
    /// to unit squares — and inequivalent minimal splittings can share one
    /// stabilization, so no canonical value exists. Group input always
    /// reports the value of the presentation as given.
    pub det_value: Option<String>,
    /// Number of distinct equivalence classes sharing these stable data.
    pub class_count: String,
}

/// One normal-form residue symbol. Presentation-dependent: see the module
/// docs and [`InvariantReport::same_invariants`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolReport {
    /// 1-based position in the torsion chain.
    pub index: usize,
    pub prime: String,
    pub residue: String,
}

/// Every invariant this crate computes for one input, in one structure.
///
/// Field order is the serialization order. `genus`, `stab_index`,
/// `minimal_genus`, and `reidemeister` are `None` when the input was a
/// linked group rather than a gluing matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    /// FNV-1a digest (16 hex digits) of the canonical input encoding.
    pub digest: String,
    pub genus: Option<usize>,
    /// Number of trivial handles split off by the normal form.
    pub stab_index: Option<usize>,
    pub minimal_genus: Option<usize>,
    pub free_rank: usize,
    /// Torsion coefficients `τ₁ | τ₂ | …`, each > 1.
    pub torsion: Vec<String>,
    /// One section per prime dividing the torsion order, ascending.
    pub primes: Vec<PrimeSection>,
    /// `None` when there is no torsion.
    pub minimal: Option<MinimalSection>,
    /// Residues read off the computed normal form; **not** invariant under
    /// presentation changes. `None` for group input.
    pub reidemeister: Option<Vec<SymbolReport>>,
    /// Caveats, e.g. `"bounded-search"` when exhaustive checks were skipped
    /// because the torsion subgroup exceeds the search budget.
    pub qualifiers: Vec<String>,
}

fn render_summand(form: &BasicForm) -> String {
    match form {
        BasicForm::Unary { level, unit } => format!("U({level},{unit})"),
        BasicForm::BinaryC { level } => format!("C({level})"),
        BasicForm::BinaryD { level } => format!("D({level})"),
    }
}

fn prime_sections(g: &LinkedGroup) -> Result<Vec<PrimeSection>> {
    let mut sections = Vec::new();
    for component in g.primary_decompose() {
        if component.prime() == &BigInt::from(2) {
            let wall = wall_decompose(&component)?;
            let phases = phase_vector(&component)?;
            sections.push(PrimeSection::Two {
                exponents: component.exponents().to_vec(),
                summands: wall.summands.iter().map(render_summand).collect(),
                phases: phases.entries.iter().map(|p| p.to_string()).collect(),
            });
        } else {
            let inv = seifert_invariants(&component)?;
            sections.push(PrimeSection::Odd {
                prime: inv.prime.to_string(),
                blocks: inv
                    .blocks
                    .iter()
                    .map(|b| OddBlockReport {
                        exponent: b.exponent,
                        multiplicity: b.multiplicity,
                        character: b.character,
                    })
                    .collect(),
            });
        }
    }
    Ok(sections)
}

fn minimal_section(
    g: &LinkedGroup,
    search_limit: usize,
    det_pinned: bool,
) -> Result<(Option<MinimalSection>, Vec<String>)> {
    if g.torsion_rank() == 0 {
        return Ok((None, Vec::new()));
    }
    let inv = det_invariant(g)?;
    let count = class_count(g)?;
    let section = MinimalSection {
        parity: match inv.parity {
            Parity::Even => "even".to_string(),
            Parity::Odd => "odd".to_string(),
        },
        tau: inv.tau.to_string(),
        tau_bar: inv.tau_bar.to_string(),
        det_value: det_pinned.then(|| inv.det_value.to_string()),
        class_count: count.to_string(),
    };
    let mut qualifiers = Vec::new();
    if g.torsion_order() > BigInt::from(search_limit as u64) {
        qualifiers.push("bounded-search".to_string());
    }
    if !det_pinned {
        qualifiers.push("stabilized".to_string());
    }
    Ok((Some(section), qualifiers))
}

fn base_report(
    g: &LinkedGroup,
    digest: String,
    search_limit: usize,
    det_pinned: bool,
) -> Result<InvariantReport> {
    let (minimal, qualifiers) = minimal_section(g, search_limit, det_pinned)?;
    Ok(InvariantReport {
        digest,
        genus: None,
        stab_index: None,
        minimal_genus: None,
        free_rank: g.free_rank(),
        torsion: g.torsion().iter().map(|t| t.to_string()).collect(),
        primes: prime_sections(g)?,
        minimal,
        reidemeister: None,
        qualifiers,
    })
}

/// Builds the full report for a linked group given directly.
pub fn report_for_group(g: &LinkedGroup) -> Result<InvariantReport> {
    report_for_group_with_limit(g, DEFAULT_SEARCH_LIMIT)
}

/// [`report_for_group`] with an explicit exhaustive-search budget used only
/// to decide the `"bounded-search"` qualifier.
pub fn report_for_group_with_limit(g: &LinkedGroup, search_limit: usize) -> Result<InvariantReport> {
    let digest = format!("{:016x}", fnv1a64(canonical_group_encoding(g).as_bytes()));
    base_report(g, digest, search_limit, true)
}

/// Builds the full report for a symplectic gluing matrix.
pub fn report_for_matrix(h: &SymplecticMatrix) -> Result<InvariantReport> {
    report_for_matrix_with_limit(h, DEFAULT_SEARCH_LIMIT)
}

/// [`report_for_matrix`] with an explicit exhaustive-search budget used only
/// to decide the `"bounded-search"` qualifier.
pub fn report_for_matrix_with_limit(
    h: &SymplecticMatrix,
    search_limit: usize,
) -> Result<InvariantReport> {
    let digest = format!("{:016x}", fnv1a64(canonical_matrix_encoding(h).as_bytes()));
    let nf = partial_normal_form(h);
    let g = linked_group_of(h)?;
    let mut report = base_report(&g, digest, search_limit, nf.stab_index == 0)?;
    report.genus = Some(h.genus());
    report.stab_index = Some(nf.stab_index);
    report.minimal_genus = Some(h.genus() - nf.stab_index);
    let symbols = reidemeister_symbols(&nf)?;
    report.reidemeister = Some(
        symbols
            .symbols
            .iter()
            .map(|s| SymbolReport {
                index: s.index,
                prime: s.prime.to_string(),
                residue: s.residue.to_string(),
            })
            .collect(),
    );
    Ok(report)
}

/// Invariant-level equality of per-prime sections: for the prime 2 this
/// compares exponents and phase vectors but not the summand witnesses.
fn prime_sections_equivalent(a: &[PrimeSection], b: &[PrimeSection]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| match (x, y) {
            (
                PrimeSection::Odd {
                    prime: p1,
                    blocks: b1,
                },
                PrimeSection::Odd {
                    prime: p2,
                    blocks: b2,
                },
            ) => p1 == p2 && b1 == b2,
            (
                PrimeSection::Two {
                    exponents: e1,
                    phases: f1,
                    ..
                },
                PrimeSection::Two {
                    exponents: e2,
                    phases: f2,
                    ..
                },
            ) => e1 == e2 && f1 == f2,
            _ => false,
        })
}

impl InvariantReport {
    /// True when the two reports agree on every classification invariant.
    ///
    /// Ignores the input digest (different presentations of the same
    /// manifold hash differently), the normal-form residue symbols
    /// (presentation data, not double-coset invariants), and the 2-primary
    /// summand witnesses (isometric forms can decompose differently; the
    /// exponents plus phase vector decide).
    pub fn same_invariants(&self, other: &Self) -> bool {
        self.genus == other.genus
            && self.stab_index == other.stab_index
            && self.minimal_genus == other.minimal_genus
            && self.free_rank == other.free_rank
            && self.torsion == other.torsion
            && prime_sections_equivalent(&self.primes, &other.primes)
            && self.minimal == other.minimal
            && self.qualifiers == other.qualifiers
    }

    /// Lists invariant-level differences as `"field: left vs right"` lines.
    ///
    /// Compares the same fields as [`InvariantReport::same_invariants`];
    /// empty exactly when that method returns true.
    pub fn differences(&self, other: &Self) -> Vec<String> {
        let mut out = Vec::new();
        fn diff<T: PartialEq + std::fmt::Debug>(
            out: &mut Vec<String>,
            name: &str,
            a: &T,
            b: &T,
        ) {
            if a != b {
                out.push(format!("{name}: {a:?} vs {b:?}"));
            }
        }
        diff(&mut out, "genus", &self.genus, &other.genus);
        diff(&mut out, "stab-index", &self.stab_index, &other.stab_index);
        diff(
            &mut out,
            "minimal-genus",
            &self.minimal_genus,
            &other.minimal_genus,
        );
        diff(&mut out, "free-rank", &self.free_rank, &other.free_rank);
        if self.torsion != other.torsion {
            out.push(format!(
                "torsion: [{}] vs [{}]",
                self.torsion.join(", "),
                other.torsion.join(", ")
            ));
        }
        if !prime_sections_equivalent(&self.primes, &other.primes) {
            let render = |sections: &[PrimeSection]| -> String {
                sections
                    .iter()
                    .map(|s| match s {
                        PrimeSection::Odd { prime, blocks } => format!(
                            "p={} {}",
                            prime,
                            blocks
                                .iter()
                                .map(|b| format!(
                                    "{}^{}x{} chi={:+}",
                                    prime, b.exponent, b.multiplicity, b.character
                                ))
                                .collect::<Vec<_>>()
                                .join(",")
                        ),
                        PrimeSection::Two { phases, .. } => {
                            format!("p=2 phases ({})", phases.join(", "))
                        }
                    })
                    .collect::<Vec<_>>()
                    .join("; ")
            };
            out.push(format!(
                "prime-sections: {} vs {}",
                render(&self.primes),
                render(&other.primes)
            ));
        }
        match (&self.minimal, &other.minimal) {
            (Some(a), Some(b)) => {
                if a.parity != b.parity {
                    out.push(format!("parity: {} vs {}", a.parity, b.parity));
                }
                if a.tau != b.tau {
                    out.push(format!("tau: {} vs {}", a.tau, b.tau));
                }
                if a.tau_bar != b.tau_bar {
                    out.push(format!("tau-bar: {} vs {}", a.tau_bar, b.tau_bar));
                }
                match (&a.det_value, &b.det_value) {
                    (Some(da), Some(db)) if da != db => out.push(format!(
                        "det-invariant: {} vs {} (mod {})",
                        da, db, a.tau_bar
                    )),
                    (Some(_), None) | (None, Some(_)) => {
                        out.push("det-invariant: pinned vs not pinned".to_string())
                    }
                    _ => {}
                }
                if a.class_count != b.class_count {
                    out.push(format!(
                        "class-count: {} vs {}",
                        a.class_count, b.class_count
                    ));
                }
            }
            (None, None) => {}
            (Some(_), None) => out.push("torsion: present vs none".to_string()),
            (None, Some(_)) => out.push("torsion: none vs present".to_string()),
        }
        if self.qualifiers != other.qualifiers {
            out.push(format!(
                "qualifiers: [{}] vs [{}]",
                self.qualifiers.join(", "),
                other.qualifiers.join(", ")
            ));
        }
        out
    }

    /// Plain-text rendering, one `key: value` line per field.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("digest: {}\n", self.digest));
        if let Some(g) = self.genus {
            out.push_str(&format!("genus: {g}\n"));
        }
        if let Some(s) = self.stab_index {
            out.push_str(&format!("stab-index: {s}\n"));
        }
        if let Some(m) = self.minimal_genus {
            out.push_str(&format!("minimal-genus: {m}\n"));
        }
        out.push_str(&format!("free-rank: {}\n", self.free_rank));
        out.push_str(&format!("torsion: [{}]\n", self.torsion.join(", ")));
        for section in &self.primes {
            match section {
                PrimeSection::Odd { prime, blocks } => {
                    let parts: Vec<String> = blocks
                        .iter()
                        .map(|b| {
                            format!(
                                "{}^{} x{} chi={:+}",
                                prime, b.exponent, b.multiplicity, b.character
                            )
                        })
                        .collect();
                    out.push_str(&format!("prime {}: {}\n", prime, parts.join("; ")));
                }
                PrimeSection::Two {
                    exponents,
                    summands,
                    phases,
                } => {
                    out.push_str(&format!(
                        "prime 2: exponents {exponents:?}, summands [{}], phases ({})\n",
                        summands.join(", "),
                        phases.join(", ")
                    ));
                }
            }
        }
        if let Some(m) = &self.minimal {
            out.push_str(&format!("parity: {}\n", m.parity));
            out.push_str(&format!("tau: {}\n", m.tau));
            out.push_str(&format!("tau-bar: {}\n", m.tau_bar));
            match &m.det_value {
                Some(d) => out.push_str(&format!("det-invariant: {} (mod {})\n", d, m.tau_bar)),
                None => out.push_str("det-invariant: not pinned (stabilized input)\n"),
            }
            out.push_str(&format!("class-count: {}\n", m.class_count));
        }
        if let Some(symbols) = &self.reidemeister {
            if symbols.is_empty() {
                out.push_str("normal-form symbols: none\n");
            } else {
                let parts: Vec<String> = symbols
                    .iter()
                    .map(|s| format!("e_{}({}) = {}", s.index, s.prime, s.residue))
                    .collect();
                out.push_str(&format!("normal-form symbols: {}\n", parts.join(", ")));
            }
        }
        if !self.qualifiers.is_empty() {
            out.push_str(&format!("qualifiers: [{}]\n", self.qualifiers.join(", ")));
        }
        out
    }
}

/// Two reports plus an equivalence verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareReport {
    pub a: InvariantReport,
    pub b: InvariantReport,
    /// `"stable"` or `"minimal"`.
    pub mode: String,
    pub equivalent: bool,
    /// True when the minimal decision could not exhaust the isomorphism
    /// search and fell back to invariant comparison.
    pub bounded_search: bool,
    /// True when the verdict is only as strong as stable equivalence.
    pub stable_fallback: bool,
    pub note: String,
    /// Per-invariant differences between the two reports, one line each.
    pub differences: Vec<String>,
}

/// Compares two gluing matrices and packages the verdict with both reports.
pub fn compare_matrices(
    h1: &SymplecticMatrix,
    h2: &SymplecticMatrix,
    minimal: bool,
    search_limit: usize,
) -> Result<CompareReport> {
    let a = report_for_matrix_with_limit(h1, search_limit)?;
    let b = report_for_matrix_with_limit(h2, search_limit)?;
    let differences = a.differences(&b);
    if minimal {
        let verdict = minimal_equivalence(h1, h2, search_limit)?;
        Ok(CompareReport {
            a,
            b,
            mode: "minimal".to_string(),
            equivalent: verdict.equivalent,
            bounded_search: verdict.bounded_search,
            stable_fallback: verdict.stable_fallback,
            note: verdict.note,
            differences,
        })
    } else {
        let equivalent = stable_equivalence(h1, h2)?;
        Ok(CompareReport {
            a,
            b,
            mode: "stable".to_string(),
            equivalent,
            bounded_search: false,
            stable_fallback: false,
            note: String::new(),
            differences,
        })
    }
}

/// Compares two linked groups and packages the verdict with both reports.
pub fn compare_groups(
    g1: &LinkedGroup,
    g2: &LinkedGroup,
    minimal: bool,
    search_limit: usize,
) -> Result<CompareReport> {
    let a = report_for_group_with_limit(g1, search_limit)?;
    let b = report_for_group_with_limit(g2, search_limit)?;
    let differences = a.differences(&b);
    if minimal {
        let verdict = groups_minimally_equivalent(g1, g2, search_limit)?;
        Ok(CompareReport {
            a,
            b,
            mode: "minimal".to_string(),
            equivalent: verdict.equivalent,
            bounded_search: verdict.bounded_search,
            stable_fallback: verdict.stable_fallback,
            note: verdict.note,
            differences,
        })
    } else {
        let equivalent = groups_stably_equivalent(g1, g2)?;
        Ok(CompareReport {
            a,
            b,
            mode: "stable".to_string(),
            equivalent,
            bounded_search: false,
            stable_fallback: false,
            note: String::new(),
            differences,
        })
    }
}

impl CompareReport {
    /// Plain-text rendering of the verdict and both reports.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("mode: {}\n", self.mode));
        out.push_str(&format!(
            "verdict: {}\n",
            if self.equivalent {
                "equivalent"
            } else {
                "inequivalent"
            }
        ));
        if self.bounded_search {
            out.push_str("qualifier: bounded-search\n");
        }
        if self.stable_fallback {
            out.push_str("qualifier: stable-fallback\n");
        }
        if !self.note.is_empty() {
            out.push_str(&format!("note: {}\n", self.note));
        }
        for d in &self.differences {
            out.push_str(&format!("difference: {d}\n"));
        }
        out.push_str("--- input A ---\n");
        out.push_str(&self.a.render_text());
        out.push_str("--- input B ---\n");
        out.push_str(&self.b.render_text());
        out
    }
}
