//! Subcommand implementations.
//!
//! Each command returns the complete stdout text and the process exit
//! code; errors carry their own exit codes (see [`crate::error`]).
//! Output is deterministic byte for byte: every collection printed here
//! is either ordered by construction or explicitly sorted.

use num_bigint::BigInt;
use serde_json::json;

use heegaard::{
    class_count, compare_groups, compare_matrices, det_invariant, gauss_sum_bruteforce,
    gauss_sum_closed_form, gauss_sum_symbolic, linked_group_of, partial_normal_form, phase_vector,
    report_for_group_with_limit, report_for_matrix_with_limit, smith_normal_form, wall_decompose,
    BasicForm, GaussSum, IntegerMatrix, LinkedGroup, PrimaryComponent, SymplecticMatrix,
};

use crate::error::CliError;
use crate::input::Input;

/// Shared command context.
pub struct Ctx {
    /// Emit JSON instead of text.
    pub json: bool,
    /// Enumeration bound for searches and brute-force checks
    /// (`HEEGAARD_MAX_ENUM` overrides the default).
    pub search_limit: usize,
}

type Outcome = Result<(String, i32), CliError>;

/// The linked quotient of an input: gluings are projected, groups are
/// taken as-is.
fn group_of(input: &Input) -> Result<LinkedGroup, CliError> {
    match input {
        Input::Gluing(h) => Ok(linked_group_of(h)?),
        Input::Group(g) => Ok(g.clone()),
    }
}

fn require_gluing<'a>(input: &'a Input, command: &str) -> Result<&'a SymplecticMatrix, CliError> {
    match input {
        Input::Gluing(h) => Ok(h),
        Input::Group(_) => Err(CliError::Parse(format!(
            "`{command}` needs a gluing input (genus + matrix), found a group input"
        ))),
    }
}

/// The 2-primary component of a group, if its torsion has even part.
fn two_component(g: &LinkedGroup) -> Option<PrimaryComponent> {
    g.primary_decompose()
        .into_iter()
        .find(|c| c.prime() == &BigInt::from(2))
}

fn matrix_rows(m: &IntegerMatrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect())
        .collect()
}

fn emit(json_value: serde_json::Value, text: String, json: bool) -> (String, i32) {
    if json {
        (
            serde_json::to_string_pretty(&json_value).expect("value serializes") + "\n",
            0,
        )
    } else {
        (text, 0)
    }
}

/// `analyze <file>`: full invariant report.
pub fn analyze(input: &Input, ctx: &Ctx) -> Outcome {
    let report = match input {
        Input::Gluing(h) => report_for_matrix_with_limit(h, ctx.search_limit)?,
        Input::Group(g) => report_for_group_with_limit(g, ctx.search_limit)?,
    };
    let out = if ctx.json {
        serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
    } else {
        report.render_text()
    };
    Ok((out, 0))
}

/// `compare <A> <B> --stable|--minimal`: equivalence verdict with a
/// per-invariant diff.  Exit 0 when equivalent, 1 when not.
pub fn compare(a: &Input, b: &Input, minimal: bool, ctx: &Ctx) -> Outcome {
    let report = match (a, b) {
        (Input::Gluing(h1), Input::Gluing(h2)) => {
            compare_matrices(h1, h2, minimal, ctx.search_limit)?
        }
        _ => compare_groups(&group_of(a)?, &group_of(b)?, minimal, ctx.search_limit)?,
    };
    let code = i32::from(!report.equivalent);
    let out = if ctx.json {
        serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
    } else {
        report.render_text()
    };
    Ok((out, code))
}

/// `snf <file>`: Smith normal form of the presentation block of a gluing.
pub fn snf(input: &Input, ctx: &Ctx) -> Outcome {
    let h = require_gluing(input, "snf")?;
    let p = h.p_block();
    let form = smith_normal_form(&p);
    let diagonal: Vec<String> = form.diag.iter().map(ToString::to_string).collect();
    let value = json!({
        "diagonal": diagonal,
        "d": matrix_rows(&form.d),
        "u": matrix_rows(&form.u),
        "v": matrix_rows(&form.v),
    });
    let text = format!(
        "presentation block P =\n{}\ndiagonal: [{}]\nD =\n{}\nU =\n{}\nV =\n{}\nidentity U * P * V = D verified\n",
        p,
        diagonal.join(", "),
        form.d,
        form.u,
        form.v,
    );
    Ok(emit(value, text, ctx.json))
}

/// `normalize <file>`: partial normal form of a gluing with witnesses.
pub fn normalize(input: &Input, ctx: &Ctx) -> Outcome {
    let h = require_gluing(input, "normalize")?;
    let nf = partial_normal_form(h);
    let tau: Vec<String> = nf.tau.iter().map(ToString::to_string).collect();
    let value = json!({
        "genus": h.genus(),
        "stab_index": nf.stab_index,
        "torsion": tau,
        "free_rank": nf.r,
        "normalized": matrix_rows(nf.normalized.matrix()),
        "left_witness": matrix_rows(nf.left_witness.matrix()),
        "right_witness": matrix_rows(nf.right_witness.matrix()),
    });
    let text = format!(
        "genus: {}\nstab-index: {}\ntorsion: [{}]\nfree-rank: {}\nnormalized =\n{}\nleft witness =\n{}\nright witness =\n{}\nidentity normalized = left * original * right verified\n",
        h.genus(),
        nf.stab_index,
        tau.join(", "),
        nf.r,
        nf.normalized.matrix(),
        nf.left_witness.matrix(),
        nf.right_witness.matrix(),
    );
    Ok(emit(value, text, ctx.json))
}

/// `phase <file>`: phase vector of the 2-primary linking.
pub fn phase(input: &Input, ctx: &Ctx) -> Outcome {
    let g = group_of(input)?;
    let (exponents, phases, rendered) = match two_component(&g) {
        Some(c) => {
            let pv = phase_vector(&c)?;
            let phases: Vec<String> = pv.entries.iter().map(ToString::to_string).collect();
            (c.exponents().to_vec(), phases, pv.to_string())
        }
        None => (Vec::new(), Vec::new(), "()".to_string()),
    };
    let value = json!({
        "exponents": exponents,
        "phases": phases,
    });
    let text = format!(
        "2-primary exponents: {exponents:?}\nphase vector: {rendered}\n"
    );
    Ok(emit(value, text, ctx.json))
}

/// `wall <file>`: orthogonal splitting of the 2-primary linking into
/// basic forms, with the change-of-generators witness.
pub fn wall(input: &Input, ctx: &Ctx) -> Outcome {
    let g = group_of(input)?;
    const NOTE: &str = "the summand list is one valid splitting; \
        only the level multiset and the phase vector are invariants";
    let (exponents, summands, witness) = match two_component(&g) {
        Some(c) => {
            let d = wall_decompose(&c)?;
            let summands: Vec<String> = d.summands.iter().map(ToString::to_string).collect();
            (c.exponents().to_vec(), summands, Some(d.witness))
        }
        None => (Vec::new(), Vec::new(), None),
    };
    let value = json!({
        "exponents": exponents,
        "summands": summands,
        "witness": witness.as_ref().map(matrix_rows),
        "note": NOTE,
    });
    let mut text = format!(
        "2-primary exponents: {exponents:?}\nsummands: {}\n",
        if summands.is_empty() {
            "none".to_string()
        } else {
            summands.join(" + ")
        }
    );
    if let Some(w) = &witness {
        text.push_str(&format!("witness =\n{w}\n"));
    }
    text.push_str(&format!("note: {NOTE}\n"));
    Ok(emit(value, text, ctx.json))
}

/// `gauss <file> --k <k>`: the sum `Σ_x E(2^k λ(x,x))` over the
/// 2-primary part, in product form and as an exact cyclotomic element,
/// cross-checked by enumeration when the part is small enough.
pub fn gauss(input: &Input, k: u32, ctx: &Ctx) -> Outcome {
    let g = group_of(input)?;
    let two = two_component(&g);
    let forms: Vec<BasicForm> = match &two {
        Some(c) => wall_decompose(c)?.summands,
        None => Vec::new(),
    };
    let symbolic = gauss_sum_symbolic(&forms, k);
    let closed = gauss_sum_closed_form(&forms, k);
    let brute_check = match &two {
        None => "trivial".to_string(),
        Some(c) if c.group_size() <= BigInt::from(ctx.search_limit as u64) => {
            let brute = gauss_sum_bruteforce(c, k, ctx.search_limit)?;
            if brute == closed {
                format!("agrees ({} elements enumerated)", c.group_size())
            } else {
                "MISMATCH".to_string()
            }
        }
        Some(_) => "skipped (2-primary part larger than the enumeration limit)".to_string(),
    };
    let symbolic_text = match &symbolic {
        GaussSum::Zero => "0".to_string(),
        GaussSum::NonZero { pow2, sqrt2, phase } => {
            let mut parts = vec![format!("2^{pow2}")];
            if *sqrt2 {
                parts.push("sqrt2".to_string());
            }
            parts.push(format!("rho^{phase}"));
            parts.join(" * ")
        }
    };
    let symbolic_json = match &symbolic {
        GaussSum::Zero => json!({ "zero": true }),
        GaussSum::NonZero { pow2, sqrt2, phase } => json!({
            "zero": false,
            "pow2": pow2,
            "sqrt2": sqrt2,
            "phase": phase,
        }),
    };
    let value = json!({
        "k": k,
        "symbolic": symbolic_json,
        "cyclotomic": closed.to_string(),
        "brute_check": brute_check,
    });
    let text = format!(
        "gauss sum k={k}: {symbolic_text}   (rho = primitive eighth root of unity)\ncyclotomic form: {closed}\nbrute-force check: {brute_check}\n"
    );
    let code = i32::from(brute_check == "MISMATCH");
    if ctx.json {
        Ok((
            serde_json::to_string_pretty(&value).expect("value serializes") + "\n",
            code,
        ))
    } else {
        Ok((text, code))
    }
}

/// `count-classes <file>`: number of minimal classes inside the stable
/// class of the input.
pub fn count_classes(input: &Input, ctx: &Ctx) -> Outcome {
    let g = group_of(input)?;
    if g.torsion_rank() == 0 {
        let value = json!({
            "torsion": Vec::<String>::new(),
            "class_count": "1",
        });
        let text = "torsion: []\nclass-count: 1\n".to_string();
        return Ok(emit(value, text, ctx.json));
    }
    let inv = det_invariant(&g)?;
    let count = class_count(&g)?;
    let torsion: Vec<String> = g.torsion().iter().map(ToString::to_string).collect();
    let value = json!({
        "torsion": torsion,
        "parity": inv.parity.to_string(),
        "tau": inv.tau.to_string(),
        "tau_bar": inv.tau_bar.to_string(),
        "class_count": count.to_string(),
    });
    let text = format!(
        "torsion: [{}]\nparity: {}\ntau: {}\ntau-bar: {}\nclass-count: {}\n",
        torsion.join(", "),
        inv.parity,
        inv.tau,
        inv.tau_bar,
        count,
    );
    Ok(emit(value, text, ctx.json))
}
