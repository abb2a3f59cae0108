//! Closed formulas for the local Hodge data of an irreducible `H_{α,β}`.
//!
//! At 0 (resp. ∞) each distinct `α_m` (resp. `β_m`) carries one Jordan
//! block of size `mult`, so the nearby-cycle table has a single entry
//! `(α_m, ℓ_m, p(α, β, α_m))` per residue class. At 1 the monodromy is a
//! pseudoreflection with special eigenvalue `exp(−2πiγ_s)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{p_count, shift_constant, special_gamma, total_difference, Pole};
use crate::error::{Error, Result};
use crate::numbers::{ceil_i64, Residue};
use crate::params::{mult_and_ell, HypergeometricParams};
use crate::profile::HodgeProfile;
use crate::table::{LocalHodgeTable, SingularPoint};

/// The point `1`, the only finite singularity of a hypergeometric module.
pub const POINT_ONE: SingularPoint = SingularPoint::Finite(0);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JordanStructure {
    pub point: SingularPoint,
    /// `(eigenvalue residue, block size)`, sizes summing to the rank.
    pub blocks: Vec<(Residue, usize)>,
}

impl JordanStructure {
    pub fn total_size(&self) -> usize {
        self.blocks.iter().map(|(_, s)| s).sum()
    }

    /// At 1: a single block of size 2 at eigenvalue 1.
    pub fn is_transvection(&self) -> bool {
        self.blocks.iter().any(|(r, s)| r.is_zero() && *s == 2)
    }
}

pub fn jordan_structure(params: &HypergeometricParams, point: SingularPoint) -> Result<JordanStructure> {
    params.check_irreducible()?;
    let n = params.rank();
    let distinct = |tuple: &[Residue]| {
        let mut seen: Vec<(Residue, usize)> = Vec::new();
        for (m, r) in tuple.iter().enumerate() {
            if !seen.iter().any(|(s, _)| s == r) {
                seen.push((r.clone(), mult_and_ell(tuple, m).expect("in range").0));
            }
        }
        seen
    };
    let blocks = match point {
        SingularPoint::Zero => distinct(params.alpha()),
        SingularPoint::Infinity => distinct(params.beta()),
        SingularPoint::Finite(0) => {
            let gs = special_gamma(params);
            let one = Residue::zero();
            if gs.is_one() {
                let mut b = vec![(one.clone(), 2)];
                b.extend(std::iter::repeat((one, 1)).take(n - 2));
                b
            } else {
                let mut b: Vec<_> = std::iter::repeat((one, 1)).take(n - 1).collect();
                b.push((gs.residue(), 1));
                b
            }
        }
        SingularPoint::Finite(i) => return Err(Error::IndexOutOfRange { index: i, len: 1 }),
    };
    Ok(JordanStructure { point, blocks })
}

/// Nearby-cycle table at 0 or ∞ (residues at ∞ are the `β_m`, eigenvalue
/// `exp(+2πiβ_m)`).
pub fn nu_closed(params: &HypergeometricParams, pole: Pole) -> Result<LocalHodgeTable> {
    params.check_irreducible()?;
    let (tuple, point) = match pole {
        Pole::Zero => (params.alpha(), SingularPoint::Zero),
        Pole::Infinity => (params.beta(), SingularPoint::Infinity),
    };
    let mut table = LocalHodgeTable::nearby(point);
    for (m, r) in tuple.iter().enumerate() {
        if tuple[..m].contains(r) {
            continue;
        }
        let (_, ell) = mult_and_ell(tuple, m)?;
        table.add(r.clone(), ell, p_count(params, r) as i64, 1);
    }
    Ok(table)
}

/// Hodge index of the vanishing cycle at the special eigenvalue:
/// `#{k | α_k < β_k} − ⌈Σ β − Σ α⌉`, equivalently `n − ⌈Σ_k {β_k − α_k}⌉`,
/// i.e. the number of steps without wrap-around when the `{β_k − α_k}` are
/// accumulated in `(0, 1]`. Depends on the pairing but not on the order of
/// the pairs.
pub fn special_hodge_index(params: &HypergeometricParams) -> i64 {
    shift_constant(params) as i64 - ceil_i64(&total_difference(params))
}

/// `#{i | {Σ_{k≤i} (β_k − α_k)} < γ_s}` over the prefixes in the stored
/// order. Unlike [`special_hodge_index`] this depends on the order of the
/// pairs; it is kept for comparison only.
pub fn partial_sum_count(params: &HypergeometricParams) -> usize {
    let gs = special_gamma(params);
    let mut acc = Residue::zero();
    let mut count = 0;
    for (a, b) in params.pairs() {
        acc = acc.add(&b.sub(a));
        if acc.value() < gs.value() {
            count += 1;
        }
    }
    count
}

/// Vanishing-cycle table at 1: one entry `(γ_s mod 1, 0, p)`.
pub fn mu_one_closed(params: &HypergeometricParams) -> Result<LocalHodgeTable> {
    params.check_irreducible()?;
    let gs = special_gamma(params);
    Ok(LocalHodgeTable::vanishing(POINT_ONE).with(gs.residue(), 0, special_hodge_index(params), 1))
}

/// `(dim ψ_1, dim ψ_{λ_s})` at the point 1 when `λ_s ≠ 1`; `(n, 0)` for a
/// transvection.
pub fn nu_one_counts(params: &HypergeometricParams) -> Result<(usize, usize)> {
    params.check_irreducible()?;
    let n = params.rank();
    Ok(if special_gamma(params).is_one() {
        (n, 0)
    } else {
        (n - 1, 1)
    })
}

/// Nearby cycles at 1 as far as the vanishing cycles determine them: the
/// special eigenvalue (`ψ_λ = φ_λ` for `λ ≠ 1`), or for a transvection the
/// size-two block whose primitive part carries the Hodge index of `φ_1`.
/// The remaining `ℓ = 0` part at eigenvalue 1 is an unknown slot.
pub fn nu_one_from_mu(mu_one: &LocalHodgeTable, rank: usize) -> LocalHodgeTable {
    let mut table = LocalHodgeTable::nearby(mu_one.point());
    let one = Residue::zero();
    let mut accounted = 0;
    for (k, m) in mu_one.entries() {
        if k.residue.is_zero() {
            table.add(one.clone(), k.ell + 1, k.p, m);
            accounted += m as usize * (k.ell as usize + 2);
        } else {
            table.add(k.residue.clone(), k.ell, k.p, m);
            accounted += m as usize * (k.ell as usize + 1);
        }
    }
    if accounted < rank {
        table.mark_unknown(one, 0);
    }
    table
}

/// `h^p = Σ_λ ν_{0,λ}^p`.
pub fn hodge_numbers(nu_zero: &LocalHodgeTable) -> Result<BTreeMap<i64, u64>> {
    nu_zero.graded_dimensions()
}

pub fn profile_closed(params: &HypergeometricParams) -> Result<HodgeProfile> {
    params.check_irreducible()?;
    let nu_zero = nu_closed(params, Pole::Zero)?;
    let nu_infinity = nu_closed(params, Pole::Infinity)?;
    let mu_one = mu_one_closed(params)?;
    let nu_one = nu_one_from_mu(&mu_one, params.rank());
    let h = hodge_numbers(&nu_zero)?;
    let mut metadata = BTreeMap::new();
    metadata.insert("engine".into(), "closed".into());
    metadata.insert("special_gamma".into(), special_gamma(params).to_string());
    if params.rank() == 1 {
        metadata.insert(
            "rank_one_offset".into(),
            "nu at 0 and infinity sit at p = 1, mu at 1 at p = 0".into(),
        );
    }
    Ok(HodgeProfile {
        rank: params.rank(),
        nu_zero,
        nu_infinity,
        nu_finite: vec![nu_one],
        mu_finite: vec![mu_one],
        h,
        delta: None,
        normalization_note: decomposition_note(params),
        metadata,
    })
}

pub(crate) fn decomposition_note(params: &HypergeometricParams) -> String {
    let factors: Vec<String> = params
        .pairs()
        .map(|(a, b)| format!("H({a},{b})"))
        .collect();
    format!("filtration of the decomposition {}", factors.join(" * "))
}
