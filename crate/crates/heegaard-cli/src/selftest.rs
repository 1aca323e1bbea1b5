//! Randomized self-check suites.
//!
//! Four oracle equivalences run on random instances whose size is
//! bounded by `--max-size`:
//!
//! * recomposition of the Smith normal form (`U·M·V = D` plus the
//!   divisibility chain),
//! * the closed-form Gauss sum against direct enumeration,
//! * agreement of the two routes to the linked quotient of a gluing,
//! * the square law `d² ≡ 1 (mod τ̄)` for self-isometry determinants.
//!
//! The transcript is a pure function of `--max-size` and `--seed`;
//! `--max-size 0` runs nothing and passes vacuously.  Any failing case
//! makes the exit code 1.  Library-internal assertion panics are caught
//! and reported as failures instead of aborting the run.

use std::panic::{self, AssertUnwindSafe};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use heegaard::exact::numtheory::normalize_mod;
use heegaard::iso::{isometry_dets, FiniteForm, DEFAULT_NODE_LIMIT};
use heegaard::linked::sampling::random_component_with_exponents;
use heegaard::linked::sampling::random_linked_group;
use heegaard::symplectic::sampling::random_symplectic;
use heegaard::{
    det_invariant, gauss_sum_bruteforce, gauss_sum_closed_form, linking_from_normal_form,
    pair_from_matrix, partial_normal_form, quotient_with_linking, smith_normal_form,
    stable_invariants, wall_decompose, Error, IntegerMatrix,
};

enum CaseOutcome {
    Pass,
    /// Instance exceeded the size bound; sampled but not checked.
    Skip,
    Fail(String),
}

struct Suite {
    name: &'static str,
    cases: usize,
    skipped: usize,
    failures: Vec<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite {
            name,
            cases: 0,
            skipped: 0,
            failures: Vec::new(),
        }
    }

    fn run_case(&mut self, index: usize, body: impl FnOnce() -> CaseOutcome) {
        match panic::catch_unwind(AssertUnwindSafe(body)) {
            Ok(CaseOutcome::Pass) => self.cases += 1,
            Ok(CaseOutcome::Skip) => self.skipped += 1,
            Ok(CaseOutcome::Fail(msg)) => {
                self.cases += 1;
                self.failures.push(format!("case {index}: {msg}"));
            }
            Err(payload) => {
                self.cases += 1;
                let msg = payload
                    .downcast_ref::<&str>()
                    .map(|s| (*s).to_string())
                    .or_else(|| payload.downcast_ref::<String>().cloned())
                    .unwrap_or_else(|| "panic".to_string());
                self.failures.push(format!("case {index}: panic: {msg}"));
            }
        }
    }
}

/// `U·M·V = D` with unimodular witnesses and a nonnegative divisibility
/// chain, on random integer matrices.
fn snf_suite(rng: &mut ChaCha8Rng, max_size: usize) -> Suite {
    let mut suite = Suite::new("snf-recomposition");
    if max_size == 0 {
        return suite;
    }
    let bound = max_size.min(50) as i64;
    for index in 0..100 {
        let rows = rng.gen_range(1..=6);
        let cols = rng.gen_range(1..=6);
        let m = IntegerMatrix::from_fn(rows, cols, |_, _| {
            BigInt::from(rng.gen_range(-bound..=bound))
        });
        suite.run_case(index, || {
            let f = smith_normal_form(&m);
            if &(&f.u * &m) * &f.v != f.d {
                return CaseOutcome::Fail("U*M*V differs from D".to_string());
            }
            if f.u.determinant().abs() != BigInt::one() || f.v.determinant().abs() != BigInt::one()
            {
                return CaseOutcome::Fail("witness is not unimodular".to_string());
            }
            let mut seen_zero = false;
            for pair in f.diag.windows(2) {
                if !pair[0].is_zero() && !(&pair[1] % &pair[0]).is_zero() {
                    return CaseOutcome::Fail("divisibility chain broken".to_string());
                }
            }
            for d in &f.diag {
                if d.sign() == num_bigint::Sign::Minus {
                    return CaseOutcome::Fail("negative diagonal entry".to_string());
                }
                if d.sign() == num_bigint::Sign::NoSign {
                    seen_zero = true;
                } else if seen_zero {
                    return CaseOutcome::Fail("nonzero entry after a zero".to_string());
                }
            }
            CaseOutcome::Pass
        });
    }
    suite
}

/// Closed-form Gauss sums against enumeration on random 2-primary
/// components of order at most `max_size`.
fn gauss_suite(rng: &mut ChaCha8Rng, max_size: usize) -> Suite {
    let mut suite = Suite::new("gauss-closed-form");
    if max_size < 2 {
        return suite;
    }
    let max_total = max_size.ilog2().min(12);
    for index in 0..50 {
        let mut chosen: Option<Vec<u32>> = None;
        for _ in 0..20 {
            let len = rng.gen_range(1..=3);
            let mut exps: Vec<u32> = (0..len).map(|_| rng.gen_range(1..=3)).collect();
            exps.sort_unstable();
            if exps.iter().sum::<u32>() <= max_total {
                chosen = Some(exps);
                break;
            }
        }
        let Some(exps) = chosen else {
            suite.skipped += 1;
            continue;
        };
        let c = random_component_with_exponents(rng, 2, &exps);
        let n = *exps.last().expect("nonempty exponents");
        suite.run_case(index, || {
            let forms = match wall_decompose(&c) {
                Ok(d) => d.summands,
                Err(e) => return CaseOutcome::Fail(e.to_string()),
            };
            for k in 0..=n + 1 {
                let closed = gauss_sum_closed_form(&forms, k);
                let brute = match gauss_sum_bruteforce(&c, k, max_size) {
                    Ok(b) => b,
                    Err(e) => return CaseOutcome::Fail(e.to_string()),
                };
                if closed != brute {
                    return CaseOutcome::Fail(format!(
                        "k={k}: closed form differs from enumeration"
                    ));
                }
            }
            CaseOutcome::Pass
        });
    }
    suite
}

/// The two routes from a gluing to its linked quotient (direct span
/// quotient vs. partial normal form) must give the same group and the
/// same stable invariants.
fn linking_suite(rng: &mut ChaCha8Rng, max_size: usize) -> Suite {
    let mut suite = Suite::new("linking-oracle");
    if max_size == 0 {
        return suite;
    }
    let cap = BigInt::from(max_size as u64);
    for index in 0..50 {
        let genus = rng.gen_range(1..=3);
        let h = random_symplectic(genus, 4, rng);
        let cap = cap.clone();
        suite.run_case(index, || {
            let direct = match quotient_with_linking(&pair_from_matrix(&h)) {
                Ok(g) => g,
                Err(e) => return CaseOutcome::Fail(e.to_string()),
            };
            if direct.torsion_order() > cap {
                return CaseOutcome::Skip;
            }
            let via_nf = match linking_from_normal_form(&partial_normal_form(&h)) {
                Ok(g) => g,
                Err(e) => return CaseOutcome::Fail(e.to_string()),
            };
            if direct.free_rank() != via_nf.free_rank() {
                return CaseOutcome::Fail("free ranks differ between routes".to_string());
            }
            if direct.torsion() != via_nf.torsion() {
                return CaseOutcome::Fail("torsion chains differ between routes".to_string());
            }
            let a = match stable_invariants(&direct) {
                Ok(v) => v,
                Err(e) => return CaseOutcome::Fail(e.to_string()),
            };
            let b = match stable_invariants(&via_nf) {
                Ok(v) => v,
                Err(e) => return CaseOutcome::Fail(e.to_string()),
            };
            if a != b {
                return CaseOutcome::Fail(
                    "stable invariants differ between the two quotient routes".to_string(),
                );
            }
            CaseOutcome::Pass
        });
    }
    suite
}

/// Every self-isometry determinant of a linked group squares to 1
/// mod τ̄.
fn isometry_suite(rng: &mut ChaCha8Rng, max_size: usize) -> Suite {
    let mut suite = Suite::new("isometry-square-law");
    if max_size == 0 {
        return suite;
    }
    let cap = max_size.min(2000);
    for index in 0..30 {
        let g = random_linked_group(rng, 2, 6, 0);
        suite.run_case(index, || {
            if g.torsion_rank() == 0 || g.torsion_order() > BigInt::from(cap as u64) {
                return CaseOutcome::Skip;
            }
            let inv = match det_invariant(&g) {
                Ok(v) => v,
                Err(e) => return CaseOutcome::Fail(e.to_string()),
            };
            let form = match FiniteForm::from_group(&g, cap) {
                Ok(f) => f,
                Err(Error::SizeLimit { .. }) => return CaseOutcome::Skip,
                Err(e) => return CaseOutcome::Fail(e.to_string()),
            };
            let dets = match isometry_dets(&form, &form, DEFAULT_NODE_LIMIT) {
                Ok(d) => d,
                Err(Error::SizeLimit { .. }) => return CaseOutcome::Skip,
                Err(e) => return CaseOutcome::Fail(e.to_string()),
            };
            if dets.is_empty() {
                return CaseOutcome::Fail("no self-isometry found".to_string());
            }
            for d in &dets {
                if normalize_mod(&(d * d), &inv.tau_bar) != BigInt::one() {
                    return CaseOutcome::Fail(format!("determinant {d} does not square to 1"));
                }
            }
            CaseOutcome::Pass
        });
    }
    suite
}

/// Runs all suites and renders the transcript; exit code 1 on any
/// failure.
pub fn run(max_size: usize, seed: u64, json: bool) -> (String, i32) {
    let prev_hook = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let suites = [
        snf_suite(&mut rng, max_size),
        gauss_suite(&mut rng, max_size),
        linking_suite(&mut rng, max_size),
        isometry_suite(&mut rng, max_size),
    ];
    panic::set_hook(prev_hook);

    let total_cases: usize = suites.iter().map(|s| s.cases).sum();
    let total_failures: usize = suites.iter().map(|s| s.failures.len()).sum();
    let pass = total_failures == 0;
    let code = i32::from(!pass);

    if json {
        let value = json!({
            "max_size": max_size,
            "seed": seed,
            "suites": suites.iter().map(|s| json!({
                "name": s.name,
                "cases": s.cases,
                "skipped": s.skipped,
                "failures": s.failures,
            })).collect::<Vec<_>>(),
            "pass": pass,
        });
        return (
            serde_json::to_string_pretty(&value).expect("value serializes") + "\n",
            code,
        );
    }

    let mut out = format!("selftest: max size {max_size}, seed {seed}\n");
    for s in &suites {
        out.push_str(&format!(
            "suite {}: {} cases, {} skipped, {} failures\n",
            s.name,
            s.cases,
            s.skipped,
            s.failures.len()
        ));
        for f in &s.failures {
            out.push_str(&format!("  failure {}: {f}\n", s.name));
        }
    }
    out.push_str(&format!(
        "result: {} ({total_cases} cases, {total_failures} failures)\n",
        if pass { "PASS" } else { "FAIL" }
    ));
    (out, code)
}
