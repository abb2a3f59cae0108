//! Instance generators and batch verification.
//!
//! [`Exhaustive`] streams every irreducible `(α, β)` up to given rank and
//! denominator bounds, with `α` non-decreasing (simultaneous permutation of
//! the pairs is a symmetry of every checked property, and is checked
//! separately). [`random_instances`] draws a seeded sample. [`run`] applies
//! the selected checks, fanning out with rayon while keeping input order.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::{hodge_numbers, mu_one_closed, nu_closed, nu_one_counts, nu_one_from_mu, profile_closed};
use crate::combinatorics::{shift_identity_holds, special_gamma, Pole};
use crate::error::Result;
use crate::numbers::Residue;
use crate::params::HypergeometricParams;
use crate::profile::HodgeProfile;
use crate::recursion::{compare, profile_recursive};
use crate::table::{LocalHodgeTable, SingularPoint, TableKind};

/// A profile engine under test.
pub type EngineFn = dyn Fn(&HypergeometricParams) -> Result<HodgeProfile> + Sync;

/// All residues in `[0, 1)` with denominator at most `den_max`, sorted.
pub fn residues_up_to(den_max: u32) -> Vec<Residue> {
    let mut out: Vec<Residue> = (1..=i64::from(den_max.max(1)))
        .flat_map(|d| (0..d).map(move |n| Residue::from_ratio(n, d)))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Streams the exhaustive grid, rank by rank.
pub struct Exhaustive {
    residues: Vec<Residue>,
    n_max: usize,
    n: usize,
    alpha: Vec<usize>,
    beta: Vec<usize>,
    done: bool,
}

impl Exhaustive {
    pub fn new(n_max: usize, den_max: u32) -> Self {
        Exhaustive {
            residues: residues_up_to(den_max),
            n_max,
            n: 1,
            alpha: vec![0],
            beta: vec![0],
            done: n_max == 0,
        }
    }

    /// Advances to the next index state; false once everything is visited.
    fn advance(&mut self) -> bool {
        let r = self.residues.len();
        // β: any tuple, odometer order
        for i in (0..self.n).rev() {
            if self.beta[i] + 1 < r {
                self.beta[i] += 1;
                self.beta[i + 1..].iter_mut().for_each(|b| *b = 0);
                return true;
            }
        }
        // α: non-decreasing tuple
        for i in (0..self.n).rev() {
            if self.alpha[i] + 1 < r {
                let v = self.alpha[i] + 1;
                self.alpha[i..].iter_mut().for_each(|a| *a = v);
                self.beta.iter_mut().for_each(|b| *b = 0);
                return true;
            }
        }
        if self.n < self.n_max {
            self.n += 1;
            self.alpha = vec![0; self.n];
            self.beta = vec![0; self.n];
            return true;
        }
        false
    }

    fn irreducible_state(&self) -> bool {
        self.beta.iter().all(|b| !self.alpha.contains(b))
    }
}

impl Iterator for Exhaustive {
    type Item = HypergeometricParams;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            let hit = self.irreducible_state().then(|| {
                let pick = |ix: &[usize]| ix.iter().map(|&i| self.residues[i].clone()).collect();
                HypergeometricParams::new(pick(&self.alpha), pick(&self.beta)).expect("equal lengths")
            });
            self.done = !self.advance();
            if hit.is_some() {
                return hit;
            }
        }
        None
    }
}

fn random_residue(rng: &mut impl Rng, den_max: u32) -> Residue {
    let d = rng.gen_range(1..=i64::from(den_max.max(1)));
    Residue::from_ratio(rng.gen_range(0..d), d)
}

/// `count` irreducible instances, rank uniform in `1..=n_max`, each residue
/// drawn as `k/d` with `d` uniform in `1..=den_max`. Reducible draws are
/// rejected and redrawn.
pub fn random_instances(count: usize, n_max: usize, den_max: u32, seed: u64) -> Vec<HypergeometricParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(1..=n_max.max(1));
        let alpha: Vec<Residue> = (0..n).map(|_| random_residue(&mut rng, den_max)).collect();
        let beta: Vec<Residue> = (0..n).map(|_| random_residue(&mut rng, den_max)).collect();
        if let Ok(p) = HypergeometricParams::irreducible(alpha, beta) {
            out.push(p);
        }
    }
    out
}

/// A random simultaneous permutation of the pairs.
pub fn random_permutation(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

/// A random table: up to five entries with small residues, `ℓ ≤ 3`,
/// `p ∈ [−3, 3]`, occasionally an unknown slot.
pub fn random_table(rng: &mut impl Rng) -> LocalHodgeTable {
    let point = match rng.gen_range(0..3) {
        0 => SingularPoint::Zero,
        1 => SingularPoint::Infinity,
        _ => SingularPoint::Finite(0),
    };
    let kind = if rng.gen_bool(0.5) {
        TableKind::NearbyPrimitive
    } else {
        TableKind::VanishingPrimitive
    };
    let mut t = LocalHodgeTable::new(point, kind);
    for _ in 0..rng.gen_range(0..=5) {
        let r = random_residue(rng, 8);
        let ell = rng.gen_range(0..=3);
        if !t.is_unknown(&r, ell) {
            t.add(r, ell, rng.gen_range(-3..=3), rng.gen_range(1..=3));
        }
    }
    if rng.gen_bool(0.2) {
        let r = random_residue(rng, 8);
        let ell = rng.gen_range(0..=3);
        if t.entries_at(&r).iter().all(|&(l, _, _)| l != ell) {
            t.mark_unknown(r, ell);
        }
    }
    t
}

/// `count` tables from [`random_table`], seeded.
pub fn random_tables(count: usize, seed: u64) -> Vec<LocalHodgeTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_table(&mut rng)).collect()
}

/// `count` seeded simultaneous permutations of `n` pairs.
pub fn seeded_permutations(n: usize, count: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_permutation(&mut rng, n)).collect()
}

/// Every permutation of `0..n` (lexicographic order).
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            go(prefix, rest, out);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..n).collect(), &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub check: String,
    pub params: HypergeometricParams,
    pub detail: String,
}

impl Failure {
    /// CLI arguments that reproduce the failing instance.
    pub fn reproducer(&self) -> String {
        let join = |xs: &[Residue]| xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        format!("--alpha {} --beta {}", join(self.params.alpha()), join(self.params.beta()))
    }

    fn size(&self) -> (usize, String) {
        (self.params.rank(), self.reproducer())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    /// Engine profile equals the closed form with shift 0.
    pub cross_engine: bool,
    /// `p_count − fedorov_p = #{α_k < β_k}` for every `m`, both poles.
    pub shift_identity: bool,
    /// `Σ_λ ν₀^p = Σ_λ ν∞^p` for all `p` and `Σ h = n`.
    pub fiber_rank: bool,
    /// μ at 1 is one `ℓ = 0` entry; `dim ψ_1` is `n − 1`, or `n` for a
    /// transvection.
    pub monodromy: bool,
    /// Random simultaneous permutations checked per instance, both engines.
    pub permutations: usize,
}

impl Checks {
    pub const ALL: Checks = Checks {
        cross_engine: true,
        shift_identity: true,
        fiber_rank: true,
        monodromy: true,
        permutations: 3,
    };

    pub const NONE: Checks = Checks {
        cross_engine: false,
        shift_identity: false,
        fiber_rank: false,
        monodromy: false,
        permutations: 0,
    };
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub instances: usize,
    pub failures: Vec<Failure>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Smallest-rank failure (ties broken by the reproducer text).
    pub fn minimal_failure(&self) -> Option<&Failure> {
        self.failures.iter().min_by_key(|f| f.size())
    }

    fn absorb(&mut self, other: SweepReport) {
        self.instances += other.instances;
        self.failures.extend(other.failures);
    }
}

/// Same tables and Hodge numbers (δ, notes and metadata ignored).
pub fn same_tables(a: &HodgeProfile, b: &HodgeProfile) -> bool {
    a.rank == b.rank
        && a.nu_zero == b.nu_zero
        && a.nu_infinity == b.nu_infinity
        && a.nu_finite == b.nu_finite
        && a.mu_finite == b.mu_finite
        && a.h == b.h
}

/// The closed-form tables the fiber-rank checks read, without the rest of
/// the profile (notes, metadata) that a large sweep does not need.
fn closed_tables(params: &HypergeometricParams) -> Result<HodgeProfile> {
    let nu_zero = nu_closed(params, Pole::Zero)?;
    let mu_one = mu_one_closed(params)?;
    Ok(HodgeProfile {
        rank: params.rank(),
        nu_infinity: nu_closed(params, Pole::Infinity)?,
        nu_finite: vec![nu_one_from_mu(&mu_one, params.rank())],
        mu_finite: vec![mu_one],
        h: hodge_numbers(&nu_zero)?,
        nu_zero,
        delta: None,
        normalization_note: String::new(),
        metadata: Default::default(),
    })
}

fn fiber_rank_failure(p: &HodgeProfile, params: &HypergeometricParams) -> Option<String> {
    let (zero, inf) = match (p.nu_zero.graded_dimensions(), p.nu_infinity.graded_dimensions()) {
        (Ok(z), Ok(i)) => (z, i),
        (z, i) => return Some(format!("ungraded ν: {:?} {:?}", z.err(), i.err())),
    };
    if zero != inf {
        return Some(format!("graded ν at 0 {zero:?} ≠ at ∞ {inf:?}"));
    }
    let total: u64 = p.h.values().sum();
    if total != params.rank() as u64 {
        return Some(format!("Σh = {total}"));
    }
    None
}

fn monodromy_failure(p: &HodgeProfile, params: &HypergeometricParams) -> Option<String> {
    let mu = &p.mu_finite[0];
    let entries: Vec<_> = mu.entries().collect();
    if entries.len() != 1 || entries[0].1 != 1 || entries[0].0.ell != 0 || mu.unknown_slots().next().is_some() {
        return Some(format!("μ at 1 is not a single ℓ=0 entry: {mu:?}"));
    }
    // ψ_λ = φ_λ away from λ = 1; the rest of the fiber is ψ_1.
    let special: u64 = p.nu_finite[0]
        .entries()
        .filter(|(k, _)| !k.residue.is_zero())
        .map(|(k, m)| m * (u64::from(k.ell) + 1))
        .sum();
    let unit = params.rank() as u64 - special;
    let expect = if special_gamma(params).is_one() {
        params.rank()
    } else {
        params.rank() - 1
    };
    if unit != expect as u64 || nu_one_counts(params).ok() != Some((expect, params.rank() - expect)) {
        return Some(format!("ν_(1,1) count {unit}, expected {expect}"));
    }
    None
}

fn table_checks(p: &HodgeProfile, params: &HypergeometricParams, checks: Checks, tag: &str, fail: &mut impl FnMut(&str, String)) {
    if checks.fiber_rank {
        if let Some(d) = fiber_rank_failure(p, params) {
            fail("fiber_rank", format!("{tag}: {d}"));
        }
    }
    if checks.monodromy {
        if let Some(d) = monodromy_failure(p, params) {
            fail("monodromy", format!("{tag}: {d}"));
        }
    }
}

/// All selected checks on one instance.
pub fn check_instance(params: &HypergeometricParams, engine: &EngineFn, checks: Checks, seed: u64) -> Vec<Failure> {
    let mut failures = Vec::new();
    let mut fail = |check: &str, detail: String| {
        failures.push(Failure {
            check: check.into(),
            params: params.clone(),
            detail,
        })
    };
    if checks.shift_identity {
        for pole in [Pole::Zero, Pole::Infinity] {
            for m in 0..params.rank() {
                match shift_identity_holds(params, m, pole) {
                    Ok(true) => {}
                    Ok(false) => fail("shift_identity", format!("m={m} at {pole}")),
                    Err(e) => fail("shift_identity", e.to_string()),
                }
            }
        }
    }
    let needs_engine = checks.cross_engine || checks.permutations > 0;
    if !needs_engine {
        if checks.fiber_rank || checks.monodromy {
            match closed_tables(params) {
                Ok(c) => table_checks(&c, params, checks, "closed", &mut fail),
                Err(e) => fail("closed", e.to_string()),
            }
        }
        return failures;
    }
    let closed = match profile_closed(params) {
        Ok(c) => c,
        Err(e) => {
            fail("closed", e.to_string());
            return failures;
        }
    };
    table_checks(&closed, params, checks, "closed", &mut fail);
    let rec = match engine(params) {
        Ok(r) => r,
        Err(e) => {
            // the cross-engine check owns this failure
            fail("cross_engine", format!("engine error: {e}"));
            return failures;
        }
    };
    table_checks(&rec, params, checks, "recursive", &mut fail);
    if checks.cross_engine {
        let report = compare(params, Ok(rec.clone()), Ok(closed.clone()));
        if !report.agree {
            fail(
                "cross_engine",
                format!("mismatch in {:?}, shift {:?}", report.mismatches, report.shift),
            );
        }
        match &rec.delta {
            Some(d) => {
                let total: i64 = d.values().sum();
                if !delta_total_holds(params, total) {
                    fail("delta_total", format!("Σδ = {total}"));
                }
            }
            None => fail("delta_total", "no δ".into()),
        }
    }
    if checks.permutations > 0 && params.rank() > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..checks.permutations {
            let perm = random_permutation(&mut rng, params.rank());
            let q = params.permuted(&perm);
            match profile_closed(&q) {
                Ok(c) if same_tables(&c, &closed) => {}
                _ => fail("permutation_closed", format!("perm {perm:?}")),
            }
            match engine(&q) {
                Ok(rq) => {
                    if !same_tables(&rq, &rec) {
                        fail("permutation_recursive", format!("perm {perm:?}"));
                    }
                    if rq.delta != rec.delta {
                        fail("permutation_delta", format!("perm {perm:?}: {:?} vs {:?}", rq.delta, rec.delta));
                    }
                }
                Err(e) => fail("permutation_recursive", format!("perm {perm:?}: {e}")),
            }
        }
    }
    failures
}

/// `Σ_p δ^p = −(Σ α + Σ {−β} + {Σ (β − α)})`: the degree of the Deligne
/// extension is minus the sum of its residues.
pub fn delta_total_holds(params: &HypergeometricParams, total: i64) -> bool {
    let mut s = special_gamma(params).residue().value().clone();
    for (a, b) in params.pairs() {
        s += a.value() + b.conjugate().value();
    }
    s == crate::numbers::rat(-total, 1)
}

const CHUNK: usize = 4096;

/// Runs `checks` on every instance. Each instance's permutation seed is
/// derived from `seed` and its position, so results do not depend on
/// scheduling.
pub fn run<I>(instances: I, engine: &EngineFn, checks: Checks, seed: u64) -> SweepReport
where
    I: IntoIterator<Item = HypergeometricParams>,
{
    let mut report = SweepReport::default();
    let mut iter = instances.into_iter().enumerate().peekable();
    while iter.peek().is_some() {
        let chunk: Vec<_> = iter.by_ref().take(CHUNK).collect();
        let results: Vec<Vec<Failure>> = chunk
            .par_iter()
            .map(|(i, p)| check_instance(p, engine, checks, seed ^ (*i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
            .collect();
        report.absorb(SweepReport {
            instances: chunk.len(),
            failures: results.into_iter().flatten().collect(),
        });
    }
    report
}

/// [`run`] with the recursive engine.
pub fn run_default<I>(instances: I, checks: Checks, seed: u64) -> SweepReport
where
    I: IntoIterator<Item = HypergeometricParams>,
{
    run(instances, &profile_recursive, checks, seed)
}
