//! Acceptance suite: one PASS/FAIL line per criterion, all exact.
//!
//! Runs as a plain binary (`harness = false`). It exits non-zero when a
//! criterion fails that is not listed in `KNOWN_RED`. A known-red criterion
//! still runs in full and still prints FAIL.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hyperhodge::closed_form::{jordan_structure, partial_sum_count, profile_closed, special_hodge_index, POINT_ONE};
use hyperhodge::combinatorics::{check_shift_identity, contribution, dualize_table, special_gamma, Pole, PositionRow};
use hyperhodge::convolution::{mc_nu_infinity, ConvolutionContext};
use hyperhodge::profile::equal_up_to_shift;
use hyperhodge::recursion::profile_recursive;
use hyperhodge::sweep::{
    all_permutations, random_instances, random_tables, run_default, seeded_permutations, Checks, Exhaustive,
    SweepReport,
};
use hyperhodge::{Error, HypergeometricParams, LocalHodgeTable, Residue, SingularPoint};

const SEED: u64 = 7;

/// The two printed table rows whose value pairs are transposed make
/// criterion 3 unattainable as stated; it is reported, not hidden.
const KNOWN_RED: &[u32] = &[3];

struct Outcome {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

fn count_check(report: &SweepReport, check: &str) -> usize {
    report.failures.iter().filter(|f| f.check == check).count()
}

fn first_failure(report: &SweepReport, checks: &[&str]) -> String {
    report
        .failures
        .iter()
        .filter(|f| checks.contains(&f.check.as_str()))
        .min_by_key(|f| (f.params.rank(), f.reproducer()))
        .map(|f| format!("; first: {} [{}] {}", f.reproducer(), f.check, f.detail))
        .unwrap_or_default()
}

fn criterion1_instances() -> (Vec<HypergeometricParams>, Vec<HypergeometricParams>) {
    (Exhaustive::new(2, 4).collect(), random_instances(1000, 4, 8, SEED))
}

fn c1_cross_engine() -> Outcome {
    let (grid, sample) = criterion1_instances();
    let start = Instant::now();
    let checks = Checks {
        cross_engine: true,
        ..Checks::NONE
    };
    let a = run_default(grid, checks, SEED);
    let b = run_default(sample, checks, SEED);
    let elapsed = start.elapsed();
    let fails = count_check(&a, "cross_engine") + count_check(&b, "cross_engine");
    let mut both = a.clone();
    both.failures.extend(b.failures.clone());
    Outcome {
        id: 1,
        title: "recursive engine = closed form, shift 0",
        pass: fails == 0 && elapsed < Duration::from_secs(60),
        detail: format!(
            "{} exhaustive (n≤2, den≤4) + {} sampled (n≤4, den≤8): {fails} mismatches in {}{}",
            a.instances,
            b.instances,
            secs(elapsed),
            first_failure(&both, &["cross_engine"])
        ),
    }
}

fn c2_shift_identity() -> Outcome {
    let start = Instant::now();
    let report = run_default(
        Exhaustive::new(3, 8),
        Checks {
            shift_identity: true,
            ..Checks::NONE
        },
        SEED,
    );
    let elapsed = start.elapsed();
    Outcome {
        id: 2,
        title: "p_count − fedorov_p = #{α_k<β_k} at 0 and ∞, every m",
        pass: report.passed() && elapsed < Duration::from_secs(30),
        detail: format!(
            "{} instances (n≤3, den≤8, exhaustive): {} failures in {}{}",
            report.instances,
            report.failures.len(),
            secs(elapsed),
            first_failure(&report, &["shift_identity"])
        ),
    }
}

struct Row {
    label: &'static str,
    row: PositionRow,
    pole: Pole,
    /// pair k, then (if different from k) the target pair m, in eighths
    k: (i64, i64),
    m: Option<(i64, i64)>,
    printed: (i64, i64),
}

fn rows() -> Vec<Row> {
    use PositionRow::*;
    let r = |label, row, pole, k, m, printed| Row {
        label,
        row,
        pole,
        k,
        m,
        printed,
    };
    vec![
        r("α_m < α_k < β_k", TargetAlphaBeta, Pole::Zero, (2, 5), Some((1, 7)), (1, 0)),
        r("α_k = α_m < β_k", AlphaIsTargetBeta, Pole::Zero, (2, 5), None, (1, 0)),
        r("α_k < α_m < β_k", AlphaTargetBeta, Pole::Zero, (1, 6), Some((3, 7)), (0, -1)),
        r("α_k < β_k < α_m", AlphaBetaTarget, Pole::Zero, (1, 3), Some((5, 7)), (1, 0)),
        r("α_m < β_k < α_k", TargetBetaAlpha, Pole::Zero, (6, 3), Some((1, 7)), (0, 0)),
        r("β_k < α_m < α_k", BetaTargetAlpha, Pole::Zero, (6, 1), Some((3, 7)), (1, 1)),
        r("β_k < α_k = α_m", BetaAlphaIsTarget, Pole::Zero, (6, 1), None, (1, 1)),
        r("β_k < α_k < α_m", BetaAlphaTarget, Pole::Zero, (3, 1), Some((6, 7)), (0, 0)),
        r("β_m < α_k < β_k", TargetAlphaBeta, Pole::Infinity, (3, 6), Some((7, 1)), (1, 0)),
        r("α_k < β_m < β_k", AlphaTargetBeta, Pole::Infinity, (1, 6), Some((7, 3)), (0, -1)),
        r("α_k < β_k = β_m", AlphaBetaIsTarget, Pole::Infinity, (1, 6), None, (1, 0)),
        r("α_k < β_k < β_m", AlphaBetaTarget, Pole::Infinity, (1, 3), Some((7, 6)), (1, 0)),
        r("β_m < β_k < α_k", TargetBetaAlpha, Pole::Infinity, (6, 3), Some((7, 1)), (0, 0)),
        r("β_k = β_m < α_k", BetaIsTargetAlpha, Pole::Infinity, (6, 1), None, (1, 1)),
        r("β_k < β_m < α_k", BetaTargetAlpha, Pole::Infinity, (6, 1), Some((7, 3)), (0, 0)),
        r("β_k < α_k < β_m", BetaAlphaTarget, Pole::Infinity, (3, 1), Some((7, 6)), (1, 1)),
    ]
}

fn c3_contribution_tables() -> Outcome {
    let mut matched = 0;
    let mut bad = Vec::new();
    let all = rows();
    for row in &all {
        let (alpha, beta): (Vec<_>, Vec<_>) = match row.m {
            Some(m) => (vec![(row.k.0, 8), (m.0, 8)], vec![(row.k.1, 8), (m.1, 8)]),
            None => (vec![(row.k.0, 8)], vec![(row.k.1, 8)]),
        };
        let params = HypergeometricParams::irreducible(
            alpha.iter().map(|&(n, d)| Residue::from_ratio(n, d)).collect(),
            beta.iter().map(|&(n, d)| Residue::from_ratio(n, d)).collect(),
        )
        .expect("row instances are irreducible");
        let m = if row.m.is_some() { 1 } else { 0 };
        let check = check_shift_identity(&params, m, row.pole).expect("index in range");
        let c = &check.contributions[0];
        let (a, b) = (&params.alpha()[0], &params.beta()[0]);
        let t = match row.pole {
            Pole::Zero => &params.alpha()[m],
            Pole::Infinity => &params.beta()[m],
        };
        let got = (c.to_p_count, c.to_fedorov);
        let classified = c.row == Some(row.row) && PositionRow::all(row.pole).contains(&row.row);
        if classified && got == row.printed && contribution(a, b, t, row.pole) == got {
            matched += 1;
        } else {
            bad.push(format!(
                "at {} \"{}\": printed {:?}, computed {:?}",
                row.pole, row.label, row.printed, got
            ));
        }
    }
    Outcome {
        id: 3,
        title: "per-pair contribution tables, 16 rows",
        pass: bad.is_empty(),
        detail: format!("{matched}/{} rows match the printed values{}", all.len(), if bad.is_empty() {
            String::new()
        } else {
            format!("; mismatched: {}", bad.join("; "))
        }),
    }
}

struct Tables {
    grid: SweepReport,
    c1: SweepReport,
    elapsed: Duration,
}

fn fiber_and_monodromy() -> Tables {
    let start = Instant::now();
    let grid = run_default(
        Exhaustive::new(3, 8),
        Checks {
            fiber_rank: true,
            monodromy: true,
            ..Checks::NONE
        },
        SEED,
    );
    let (a, b) = criterion1_instances();
    let checks = Checks {
        fiber_rank: true,
        monodromy: true,
        cross_engine: true,
        ..Checks::NONE
    };
    let mut c1 = run_default(a, checks, SEED);
    let more = run_default(b, checks, SEED);
    c1.instances += more.instances;
    c1.failures.extend(more.failures);
    Tables {
        grid,
        c1,
        elapsed: start.elapsed(),
    }
}

fn c4_fiber_rank(t: &Tables) -> Outcome {
    let fails = count_check(&t.grid, "fiber_rank") + count_check(&t.c1, "fiber_rank");
    Outcome {
        id: 4,
        title: "Σ_λ ν₀^p = Σ_λ ν∞^p for all p and Σ_p h^p = n",
        pass: fails == 0 && t.grid.instances > 0,
        detail: format!(
            "{} instances (criterion 2 grid, closed form) + {} (criterion 1 set, both engines): {fails} failures in {}{}{}",
            t.grid.instances,
            t.c1.instances,
            secs(t.elapsed),
            first_failure(&t.grid, &["fiber_rank"]),
            first_failure(&t.c1, &["fiber_rank"])
        ),
    }
}

fn c5_monodromy(t: &Tables) -> Outcome {
    let fails = count_check(&t.grid, "monodromy") + count_check(&t.c1, "monodromy");
    Outcome {
        id: 5,
        title: "μ at 1 is one ℓ=0 entry; dim ψ_1 = n−1, or n for a transvection",
        pass: fails == 0 && t.grid.instances > 0,
        detail: format!(
            "{} + {} instances: {fails} failures{}{}",
            t.grid.instances,
            t.c1.instances,
            first_failure(&t.grid, &["monodromy"]),
            first_failure(&t.c1, &["monodromy"])
        ),
    }
}

fn c6_permutations() -> Outcome {
    let sample: Vec<_> = random_instances(100, 4, 8, SEED + 6);
    let report = run_default(
        sample.clone(),
        Checks {
            permutations: 10,
            ..Checks::NONE
        },
        SEED,
    );
    let mut index_fails = 0;
    let mut literal_varies = 0;
    for (i, p) in sample.iter().enumerate() {
        let base = special_hodge_index(p);
        let literal = partial_sum_count(p);
        let mut varies = false;
        for perm in seeded_permutations(p.rank(), 10, SEED + i as u64) {
            let q = p.permuted(&perm);
            index_fails += usize::from(special_hodge_index(&q) != base);
            varies |= partial_sum_count(&q) != literal;
        }
        literal_varies += usize::from(varies);
    }
    let tags = ["permutation_closed", "permutation_recursive", "permutation_delta"];
    let fails: usize = tags.iter().map(|t| count_check(&report, t)).sum();
    Outcome {
        id: 6,
        title: "profiles unchanged under simultaneous permutation of the pairs",
        pass: fails == 0 && index_fails == 0,
        detail: format!(
            "100 instances × 10 permutations, both engines: {fails} profile failures, {index_fails} vanishing-cycle index failures{} (the literal ordered partial-sum count, kept for reference, changes on {literal_varies}/100)",
            first_failure(&report, &tags)
        ),
    }
}

fn c7_repairing() -> Outcome {
    let sample: Vec<_> = random_instances(50, 4, 8, SEED + 7);
    let mut pairings = 0;
    let mut none = 0;
    let mut shift_off = 0;
    let mut first = String::new();
    for p in &sample {
        let closed = profile_closed(p).unwrap();
        let rec = profile_recursive(p).unwrap().without_delta();
        let c0 = hyperhodge::combinatorics::shift_constant(p) as i64;
        for perm in all_permutations(p.rank()).into_iter().take(24) {
            let q = p.repaired(&perm);
            pairings += 1;
            let s_closed = equal_up_to_shift(&profile_closed(&q).unwrap(), &closed);
            let s_rec = equal_up_to_shift(&profile_recursive(&q).unwrap().without_delta(), &rec);
            match (s_closed, s_rec) {
                (Some(a), Some(b)) if a == b => {
                    // the whole profile moves by the change in #{α_k < β_k}
                    let expected = c0 - hyperhodge::combinatorics::shift_constant(&q) as i64;
                    shift_off += usize::from(a != expected);
                }
                _ => {
                    none += 1;
                    if first.is_empty() {
                        first = format!("; first: {q:?}");
                    }
                }
            }
        }
    }
    Outcome {
        id: 7,
        title: "re-pairing the same multisets shifts the profile by an integer",
        pass: none == 0,
        detail: format!(
            "50 instances, {pairings} pairings: {none} without an integer shift; shift = Δ#{{α_k<β_k}} off on {shift_off}{first}"
        ),
    }
}

fn c8_duality() -> Outcome {
    let tables = random_tables(1000, SEED);
    let bad = tables
        .iter()
        .filter(|t| {
            let d = dualize_table(t);
            dualize_table(&d) != **t || d.total_dimension() != t.total_dimension()
        })
        .count();
    Outcome {
        id: 8,
        title: "dualize_table is an involution preserving total dimension",
        pass: bad == 0,
        detail: format!("1000 random tables: {bad} failures"),
    }
}

fn c9_examples() -> Outcome {
    let legendre = HypergeometricParams::from_ratios(&[(0, 1), (0, 1)], &[(1, 2), (1, 2)]).unwrap();
    let interlaced = HypergeometricParams::from_ratios(&[(0, 1), (1, 2)], &[(1, 4), (3, 4)]).unwrap();
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, engine) in [
        ("closed", profile_closed as fn(&HypergeometricParams) -> hyperhodge::Result<_>),
        ("recursive", profile_recursive),
    ] {
        let l = engine(&legendre).unwrap();
        let i = engine(&interlaced).unwrap();
        let legendre_ok = l.h == BTreeMap::from([(1, 1), (2, 1)]);
        let interlaced_ok = i.h.len() == 1;
        ok &= legendre_ok && interlaced_ok;
        notes.push(format!("{name}: legendre h={:?}, interlaced h={:?}", l.h, i.h));
    }
    let transvection = jordan_structure(&legendre, POINT_ONE).unwrap().is_transvection() && special_gamma(&legendre).is_one();
    ok &= transvection;
    Outcome {
        id: 9,
        title: "worked examples: Legendre-type weight spread and transvection, interlaced concentration",
        pass: ok,
        detail: format!("{}; legendre transvection at 1: {transvection}", notes.join("; ")),
    }
}

fn c10_delta() -> Outcome {
    let (grid, sample) = criterion1_instances();
    let all: Vec<_> = grid.into_iter().chain(sample).collect();
    let mut unknown = 0;
    let mut other_errors = 0;
    for p in &all {
        match profile_recursive(p) {
            Ok(_) => {}
            Err(Error::InternalUnknownConsulted(_)) => unknown += 1,
            Err(_) => other_errors += 1,
        }
    }
    let report = run_default(
        all.clone(),
        Checks {
            cross_engine: true,
            permutations: 5,
            ..Checks::NONE
        },
        SEED,
    );
    let perm = count_check(&report, "permutation_delta");
    let total = count_check(&report, "delta_total");
    Outcome {
        id: 10,
        title: "δ is order-invariant and integral; no unknown slot is ever read",
        pass: unknown == 0 && other_errors == 0 && perm == 0 && total == 0,
        detail: format!(
            "{} instances × 5 permutations: {perm} δ changes, {total} degree-sum mismatches, {unknown} unknown-slot reads, {other_errors} other errors{}",
            all.len(),
            first_failure(&report, &["permutation_delta", "delta_total"])
        ),
    }
}

fn c11_unknown_slot() -> Outcome {
    let ctx = ConvolutionContext::from_residue(&Residue::from_ratio(1, 2)).unwrap();
    let input = LocalHodgeTable::nearby(SingularPoint::Infinity).with(Residue::from_ratio(1, 2), 0, 0, 1);
    let out = mc_nu_infinity(&input, &ctx);
    let half = Residue::from_ratio(1, 2);
    let fabricated = out.entries().any(|(k, _)| k.residue == half && k.ell == 0);
    let ok = out.is_unknown(&half, 0) && !fabricated && out.entries_at(&half) == vec![(1, 1, 1)];
    Outcome {
        id: 11,
        title: "the deferred (λ̄₀, ℓ=0) output at ∞ is an unknown slot, never a value",
        pass: ok,
        detail: format!(
            "input {{(1/2,0,0):1}}, γ₀=1/2 → entries {:?}, unknown {:?}",
            out.entries_at(&half),
            out.unknown_slots().collect::<Vec<_>>()
        ),
    }
}

fn main() -> ExitCode {
    let mut outcomes = vec![c1_cross_engine(), c2_shift_identity(), c3_contribution_tables()];
    let tables = fiber_and_monodromy();
    outcomes.push(c4_fiber_rank(&tables));
    outcomes.push(c5_monodromy(&tables));
    outcomes.extend([c6_permutations(), c7_repairing(), c8_duality(), c9_examples(), c10_delta(), c11_unknown_slot()]);

    let mut unexpected = Vec::new();
    for o in &outcomes {
        let status = if o.pass { "PASS" } else { "FAIL" };
        let known = if !o.pass && KNOWN_RED.contains(&o.id) { " (known red)" } else { "" };
        println!("criterion {:>2} [PRIMARY] {status}{known}: {} — {}", o.id, o.title, o.detail);
        if !o.pass && !KNOWN_RED.contains(&o.id) {
            unexpected.push(o.id);
        }
        if o.pass && KNOWN_RED.contains(&o.id) {
            println!("criterion {:>2} is listed as known red but passed; update KNOWN_RED", o.id);
        }
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("acceptance: {passed}/{} criteria pass", outcomes.len());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
