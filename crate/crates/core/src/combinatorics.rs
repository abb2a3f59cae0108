//! Circle separation, the count `p(α, β, γ)`, the special eigenvalue and the
//! horizontal-section (Fedorov-side) Hodge indices.

use std::fmt;

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numbers::{frac, GammaRep, Rational, Residue};
use crate::params::HypergeometricParams;
use crate::table::{LocalHodgeTable, Slot};

/// Which strict chain places `γ` on the open arc from `α` to `β`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeparationCase {
    /// `0 ≤ α < γ < β < 1`
    AlphaGammaBeta,
    /// `0 ≤ γ < β < α < 1`
    GammaBetaAlpha,
    /// `0 ≤ β < α < γ < 1`
    BetaAlphaGamma,
    NotSeparated,
}

impl SeparationCase {
    pub fn is_separated(self) -> bool {
        self != SeparationCase::NotSeparated
    }
}

/// `α → γ → β`: `exp(2πiγ)` lies on the open oriented arc from `exp(2πiα)`
/// to `exp(2πiβ)`. Never holds when two of the three coincide.
pub fn separation_case(a: &Residue, g: &Residue, b: &Residue) -> SeparationCase {
    if a < g && g < b {
        SeparationCase::AlphaGammaBeta
    } else if g < b && b < a {
        SeparationCase::GammaBetaAlpha
    } else if b < a && a < g {
        SeparationCase::BetaAlphaGamma
    } else {
        SeparationCase::NotSeparated
    }
}

pub fn separated(a: &Residue, g: &Residue, b: &Residue) -> bool {
    separation_case(a, g, b).is_separated()
}

/// `p(α, β, γ) = #{k | ¬(α_k → γ → β_k)}`.
pub fn p_count(params: &HypergeometricParams, g: &Residue) -> usize {
    params.pairs().filter(|(a, b)| !separated(a, g, b)).count()
}

/// `γ_s ∈ (0, 1]` with `γ_s ≡ Σ (β_k − α_k) mod 1`.
pub fn special_gamma(params: &HypergeometricParams) -> GammaRep {
    frac(&total_difference(params)).gamma()
}

/// `Σ_k (β_k − α_k)` on the `[0, 1)` representatives.
pub(crate) fn total_difference(params: &HypergeometricParams) -> Rational {
    small_total_difference(params).unwrap_or_else(|| {
        params
            .pairs()
            .fold(Rational::zero(), |acc, (a, b)| acc + b.value() - a.value())
    })
}

// BigRational addition renormalizes through BigInt gcds at every step; for
// the usual small denominators a machine-integer accumulation is much cheaper.
fn small_total_difference(params: &HypergeometricParams) -> Option<Rational> {
    fn gcd(mut a: i64, mut b: i64) -> i64 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a.abs()
    }
    let (mut num, mut den) = (0i64, 1i64);
    for (a, b) in params.pairs() {
        for (x, sign) in [(b, 1), (a, -1)] {
            let (xn, xd) = (x.value().numer().to_i64()?, x.value().denom().to_i64()?);
            let g = gcd(den, xd);
            num = num.checked_mul(xd / g)?.checked_add(sign * xn.checked_mul(den / g)?)?;
            den = den.checked_mul(xd / g)?;
            let g = gcd(num, den);
            (num, den) = (num / g, den / g);
        }
    }
    Some(Rational::new_raw(num.into(), den.into()))
}

/// The two points where the nearby-cycle formulas live.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pole {
    Zero,
    Infinity,
}

impl fmt::Display for Pole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pole::Zero => "0",
            Pole::Infinity => "inf",
        })
    }
}

fn target(params: &HypergeometricParams, m: usize, pole: Pole) -> Result<&Residue> {
    let tuple = match pole {
        Pole::Zero => params.alpha(),
        Pole::Infinity => params.beta(),
    };
    tuple.get(m).ok_or(Error::IndexOutOfRange {
        index: m,
        len: tuple.len(),
    })
}

/// Hodge index of the `m`-th eigenvalue in the horizontal-section
/// normalization:
/// at 0, `#{j | β_j < α_m} − #{i | α_i < α_m}`;
/// at ∞, `#{j | β_j ≤ β_m} − #{i | α_i < β_m}`.
pub fn fedorov_p(params: &HypergeometricParams, m: usize, pole: Pole) -> Result<i64> {
    let t = target(params, m, pole)?;
    let count = |xs: &[Residue], f: &dyn Fn(&Residue) -> bool| xs.iter().filter(|x| f(x)).count() as i64;
    Ok(match pole {
        Pole::Zero => count(params.beta(), &|b| b < t) - count(params.alpha(), &|a| a < t),
        Pole::Infinity => count(params.beta(), &|b| b <= t) - count(params.alpha(), &|a| a < t),
    })
}

/// `#{k | α_k < β_k}`.
pub fn shift_constant(params: &HypergeometricParams) -> usize {
    params.pairs().filter(|(a, b)| a < b).count()
}

/// Duality between solutions and horizontal sections:
/// `(r, ℓ, p) ↦ ({−r}, ℓ, ℓ − p)`.
pub fn dualize_table(table: &LocalHodgeTable) -> LocalHodgeTable {
    let mut out = LocalHodgeTable::new(table.point(), table.kind());
    for Slot { residue, ell } in table.unknown_slots() {
        out.mark_unknown(residue.conjugate(), *ell);
    }
    for (k, m) in table.entries() {
        out.add(k.residue.conjugate(), k.ell, i64::from(k.ell) - k.p, m);
    }
    out
}

/// Relative position of `(α_k, β_k)` and the target `t` (`α_m` at 0, `β_m`
/// at ∞), as enumerated in the per-k contribution tables. Positions with a
/// coincidence the tables do not list (only possible for reducible data)
/// are `None` from [`PositionRow::classify`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PositionRow {
    /// `t < α_k < β_k`
    TargetAlphaBeta,
    /// `α_k = t < β_k` (at 0 only)
    AlphaIsTargetBeta,
    /// `α_k < t < β_k`
    AlphaTargetBeta,
    /// `α_k < β_k = t` (at ∞ only)
    AlphaBetaIsTarget,
    /// `α_k < β_k < t`
    AlphaBetaTarget,
    /// `t < β_k < α_k`
    TargetBetaAlpha,
    /// `β_k < t < α_k`
    BetaTargetAlpha,
    /// `β_k = t < α_k` (at ∞ only)
    BetaIsTargetAlpha,
    /// `β_k < α_k = t` (at 0 only)
    BetaAlphaIsTarget,
    /// `β_k < α_k < t`
    BetaAlphaTarget,
}

impl PositionRow {
    pub fn classify(a: &Residue, b: &Residue, t: &Residue, pole: Pole) -> Option<PositionRow> {
        use PositionRow::*;
        if a == b {
            return None;
        }
        let row = if a < b {
            if t < a {
                TargetAlphaBeta
            } else if t == a {
                AlphaIsTargetBeta
            } else if t < b {
                AlphaTargetBeta
            } else if t == b {
                AlphaBetaIsTarget
            } else {
                AlphaBetaTarget
            }
        } else if t < b {
            TargetBetaAlpha
        } else if t == b {
            BetaIsTargetAlpha
        } else if t < a {
            BetaTargetAlpha
        } else if t == a {
            BetaAlphaIsTarget
        } else {
            BetaAlphaTarget
        };
        let listed = match pole {
            Pole::Zero => !matches!(row, AlphaBetaIsTarget | BetaIsTargetAlpha),
            Pole::Infinity => !matches!(row, AlphaIsTargetBeta | BetaAlphaIsTarget),
        };
        listed.then_some(row)
    }

    /// Rows in table order for `pole`.
    pub fn all(pole: Pole) -> [PositionRow; 8] {
        use PositionRow::*;
        match pole {
            Pole::Zero => [
                TargetAlphaBeta,
                AlphaIsTargetBeta,
                AlphaTargetBeta,
                AlphaBetaTarget,
                TargetBetaAlpha,
                BetaTargetAlpha,
                BetaAlphaIsTarget,
                BetaAlphaTarget,
            ],
            Pole::Infinity => [
                TargetAlphaBeta,
                AlphaTargetBeta,
                AlphaBetaIsTarget,
                AlphaBetaTarget,
                TargetBetaAlpha,
                BetaIsTargetAlpha,
                BetaTargetAlpha,
                BetaAlphaTarget,
            ],
        }
    }
}

/// What pair `k` adds to `p(α, β, t)` and to the Fedorov-side index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contribution {
    pub k: usize,
    pub row: Option<PositionRow>,
    pub to_p_count: i64,
    pub to_fedorov: i64,
}

/// Per-pair contribution, computed from the definitions directly.
pub fn contribution(a: &Residue, b: &Residue, t: &Residue, pole: Pole) -> (i64, i64) {
    let to_p = i64::from(!separated(a, t, b));
    let beta_side = match pole {
        Pole::Zero => b < t,
        Pole::Infinity => b <= t,
    };
    (to_p, i64::from(beta_side) - i64::from(a < t))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftIdentityCheck {
    pub m: usize,
    pub pole: Pole,
    pub p_count: i64,
    pub fedorov_p: i64,
    pub shift_constant: i64,
    pub holds: bool,
    pub contributions: Vec<Contribution>,
}

/// `p(α, β, t) − fedorov_p(m) = #{k | α_k < β_k}` with `t = α_m` (at 0) or
/// `t = β_m` (at ∞).
pub fn check_shift_identity(params: &HypergeometricParams, m: usize, pole: Pole) -> Result<ShiftIdentityCheck> {
    let t = target(params, m, pole)?;
    let p = p_count(params, t) as i64;
    let f = fedorov_p(params, m, pole)?;
    let c = shift_constant(params) as i64;
    let contributions = params
        .pairs()
        .enumerate()
        .map(|(k, (a, b))| {
            let (to_p_count, to_fedorov) = contribution(a, b, t, pole);
            Contribution {
                k,
                row: PositionRow::classify(a, b, t, pole),
                to_p_count,
                to_fedorov,
            }
        })
        .collect();
    Ok(ShiftIdentityCheck {
        m,
        pole,
        p_count: p,
        fedorov_p: f,
        shift_constant: c,
        holds: p - f == c,
        contributions,
    })
}

/// The identity of [`check_shift_identity`] without the per-pair breakdown.
pub fn shift_identity_holds(params: &HypergeometricParams, m: usize, pole: Pole) -> Result<bool> {
    let t = target(params, m, pole)?;
    Ok(p_count(params, t) as i64 - fedorov_p(params, m, pole)? == shift_constant(params) as i64)
}
