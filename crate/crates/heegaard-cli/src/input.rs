//! Input file parsing.
//!
//! Inputs are plain-text `key = value` files.  `#` starts a comment; a
//! value may continue over following lines until the next `key =` line.
//! Two shapes are accepted:
//!
//! * a **gluing**: fields `genus` (a positive integer) and `matrix`
//!   (`2g × 2g` integers in row-major order), validated as a symplectic
//!   matrix in the handlebody block convention;
//! * a **group**: fields `rank` (free rank, default 0), `torsion` (a
//!   divisibility chain of integers ≥ 2) and `linking` (`t × t`
//!   rationals written `num/den` or as plain integers).
//!
//! ```text
//! # a genus-1 gluing
//! genus  = 1
//! matrix =
//!   2 5
//!   1 3
//! ```

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use heegaard::{validate_symplectic, IntegerMatrix, LinkedGroup, SymplecticMatrix};

use crate::error::CliError;

/// A parsed input: a symplectic gluing or a direct linked group.
#[derive(Clone, Debug)]
pub enum Input {
    Gluing(SymplecticMatrix),
    Group(LinkedGroup),
}

/// Reads and parses one input file.
pub fn load(path: &Path) -> Result<Input, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text)
}

/// Parses input text into a gluing or a group.
pub fn parse(text: &str) -> Result<Input, CliError> {
    let mut fields = split_fields(text)?;
    const GLUING_KEYS: [&str; 2] = ["genus", "matrix"];
    const GROUP_KEYS: [&str; 3] = ["rank", "torsion", "linking"];
    for key in fields.keys() {
        if !GLUING_KEYS.contains(&key.as_str()) && !GROUP_KEYS.contains(&key.as_str()) {
            return Err(CliError::Parse(format!("unknown field `{key}`")));
        }
    }
    let has_gluing = GLUING_KEYS.iter().any(|k| fields.contains_key(*k));
    let has_group = GROUP_KEYS.iter().any(|k| fields.contains_key(*k));
    match (has_gluing, has_group) {
        (true, true) => Err(CliError::Parse(
            "cannot mix gluing fields (genus, matrix) with group fields (rank, torsion, linking)"
                .to_string(),
        )),
        (false, false) => Err(CliError::Parse(
            "empty input: expected `genus` + `matrix` or `rank`/`torsion`/`linking`".to_string(),
        )),
        (true, false) => parse_gluing(&mut fields),
        (false, true) => parse_group(&mut fields),
    }
}

/// Splits the text into `name → value` with multi-line value support.
fn split_fields(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut fields: BTreeMap<String, String> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (index, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let head = line.split_once('=').and_then(|(name, rest)| {
            let name = name.trim();
            let valid = !name.is_empty()
                && name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
            valid.then(|| (name.to_string(), rest.trim().to_string()))
        });
        match head {
            Some((name, rest)) => {
                if fields.contains_key(&name) {
                    return Err(CliError::Parse(format!(
                        "line {}: duplicate field `{name}`",
                        index + 1
                    )));
                }
                fields.insert(name.clone(), rest);
                current = Some(name);
            }
            None => match &current {
                Some(name) => {
                    let value = fields.get_mut(name).expect("current field exists");
                    if !value.is_empty() {
                        value.push(' ');
                    }
                    value.push_str(trimmed);
                }
                None => {
                    return Err(CliError::Parse(format!(
                        "line {}: expected `field = value`, found `{trimmed}`",
                        index + 1
                    )))
                }
            },
        }
    }
    Ok(fields)
}

fn parse_gluing(fields: &mut BTreeMap<String, String>) -> Result<Input, CliError> {
    let genus_text = fields
        .remove("genus")
        .ok_or_else(|| CliError::Parse("missing field `genus`".to_string()))?;
    let genus: usize = genus_text
        .parse()
        .map_err(|_| CliError::Parse(format!("invalid genus `{genus_text}`")))?;
    if genus == 0 {
        return Err(CliError::Parse("genus must be at least 1".to_string()));
    }
    let matrix_text = fields
        .remove("matrix")
        .ok_or_else(|| CliError::Parse("missing field `matrix`".to_string()))?;
    let entries = parse_integers(&matrix_text, "matrix")?;
    let n = 2 * genus;
    if entries.len() != n * n {
        return Err(CliError::Parse(format!(
            "matrix for genus {genus} needs {n}x{n} = {} entries, found {}",
            n * n,
            entries.len()
        )));
    }
    let m = IntegerMatrix::from_fn(n, n, |i, j| entries[i * n + j].clone());
    Ok(Input::Gluing(validate_symplectic(m)?))
}

fn parse_group(fields: &mut BTreeMap<String, String>) -> Result<Input, CliError> {
    let rank = match fields.remove("rank") {
        Some(text) => text
            .parse()
            .map_err(|_| CliError::Parse(format!("invalid rank `{text}`")))?,
        None => 0,
    };
    let torsion = match fields.remove("torsion") {
        Some(text) => parse_integers(&text, "torsion")?,
        None => Vec::new(),
    };
    let t = torsion.len();
    let linking = match fields.remove("linking") {
        Some(text) => {
            let entries = parse_rationals(&text)?;
            if entries.len() != t * t {
                return Err(CliError::Parse(format!(
                    "linking for {t} torsion coefficients needs {t}x{t} = {} entries, found {}",
                    t * t,
                    entries.len()
                )));
            }
            entries.chunks(t).map(<[BigRational]>::to_vec).collect()
        }
        None if t == 0 => Vec::new(),
        None => {
            return Err(CliError::Parse(
                "missing field `linking` (required when `torsion` is nonempty)".to_string(),
            ))
        }
    };
    Ok(Input::Group(LinkedGroup::new(rank, torsion, linking)?))
}

/// Splits on whitespace and commas.
fn tokens(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
}

fn parse_integers(text: &str, field: &str) -> Result<Vec<BigInt>, CliError> {
    tokens(text)
        .map(|tok| {
            BigInt::from_str(tok)
                .map_err(|_| CliError::Parse(format!("invalid integer `{tok}` in `{field}`")))
        })
        .collect()
}

fn parse_rationals(text: &str) -> Result<Vec<BigRational>, CliError> {
    tokens(text)
        .map(|tok| {
            let bad = || CliError::Parse(format!("invalid rational `{tok}` in `linking`"));
            match tok.split_once('/') {
                Some((num, den)) => {
                    let num = BigInt::from_str(num).map_err(|_| bad())?;
                    let den = BigInt::from_str(den).map_err(|_| bad())?;
                    if den.is_zero() {
                        return Err(CliError::Parse(format!(
                            "zero denominator in `{tok}` in `linking`"
                        )));
                    }
                    Ok(BigRational::new(num, den))
                }
                None => Ok(BigRational::from_integer(
                    BigInt::from_str(tok).map_err(|_| bad())?,
                )),
            }
        })
        .collect()
}
