//! Middle multiplicative convolution with `H_{0,γ₀}` on local Hodge tables.
//!
//! Through Katz's relation `M *_mid H_{0,γ} = j^+ MC_λ(j_{†+}(M ⊗ L_λ̄))`,
//! the behaviour of the local Hodge data under additive middle convolution
//! transposes to the multiplicative setting. The transforms here are written
//! as forward maps (old entry to new entry). Two outputs are not determined
//! by the input tables: the `(λ̄₀, ℓ = 0)` part at ∞ and the `(1, ℓ = 0)`
//! part at 0. They are emitted as unknown slots, never as zeros.
//!
//! Residue convention: every table passed to this module is read with
//! eigenvalue `λ = exp(−2πi r)`, and interval conditions are evaluated on
//! `γ = gamma_rep(r) ∈ (0, 1]`. Profiles store ∞ tables with
//! `λ = exp(+2πi r)`; conjugate them (`LocalHodgeTable::conjugated`) first.
//!
//! Irreducibility, non-Kummer and non-punctual preconditions are the
//! caller's responsibility.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;

use crate::error::{Error, Result};
use crate::numbers::{GammaRep, Rational, Residue};
use crate::profile::HodgeProfile;
use crate::table::LocalHodgeTable;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvolutionContext {
    gamma0: GammaRep,
}

impl ConvolutionContext {
    /// `γ₀` must lie strictly inside `(0, 1)`.
    pub fn new(gamma0: GammaRep) -> Result<Self> {
        if gamma0.is_one() {
            return Err(Error::InvalidGamma(gamma0.to_string()));
        }
        Ok(ConvolutionContext { gamma0 })
    }

    pub fn from_residue(r: &Residue) -> Result<Self> {
        Self::new(r.gamma())
    }

    pub fn gamma0(&self) -> &GammaRep {
        &self.gamma0
    }

    pub fn lambda0_residue(&self) -> Residue {
        self.gamma0.residue()
    }

    /// Residue of `λ̄₀`, i.e. `1 − γ₀`.
    pub fn lambda0_bar_residue(&self) -> Residue {
        Residue::new(self.gamma0.complement())
    }

    fn g0(&self) -> &Rational {
        self.gamma0.value()
    }
}

fn gamma_of(r: &Residue) -> Rational {
    r.gamma().value().clone()
}

/// Half-open `[lo, 1)` on γ-values.
fn in_closed_open(r: &Residue, lo: &Rational) -> bool {
    let g = gamma_of(r);
    &g >= lo && g < Rational::one()
}

/// Open `(0, hi)` on γ-values.
fn in_open(r: &Residue, hi: &Rational) -> bool {
    &gamma_of(r) < hi
}

/// Kummer twist: residues at 0 and ∞ become `{r − c}`; finite-point tables,
/// `h` and every `(ℓ, p, m)` are unchanged. `δ` is dropped (see
/// [`twist_delta`]).
pub fn twist(profile: &HodgeProfile, c: &Residue) -> HodgeProfile {
    HodgeProfile {
        nu_zero: profile.nu_zero.map_residues(|r| r.sub(c)),
        nu_infinity: profile.nu_infinity.map_residues(|r| r.sub(c)),
        delta: None,
        ..profile.clone()
    }
}

/// [`twist`] with `δ` carried along through [`twist_delta`]; the profile's
/// ∞ table is in its stored convention.
pub fn twist_with_delta(profile: &HodgeProfile, c: &Residue) -> Result<HodgeProfile> {
    if c.is_zero() {
        return Ok(profile.clone());
    }
    let mut out = twist(profile, c);
    if let Some(delta) = &profile.delta {
        let ctx = ConvolutionContext::from_residue(c)?;
        out.delta = Some(twist_delta(
            delta,
            &profile.h,
            &profile.nu_zero,
            &profile.nu_infinity.conjugated(),
            &ctx,
        )?);
    }
    Ok(out)
}

fn p_candidates<'a>(
    maps: impl IntoIterator<Item = BTreeSet<i64>>,
    tables: impl IntoIterator<Item = &'a LocalHodgeTable>,
) -> BTreeSet<i64> {
    let mut ps: BTreeSet<i64> = maps.into_iter().flatten().collect();
    for t in tables {
        for p in t.p_support() {
            ps.insert(p);
            ps.insert(p + 1);
        }
    }
    ps
}

/// Errors if any residue selected by `keep` carries an unknown slot, even
/// when no entry would otherwise make the sum look at it.
fn require_known(table: &LocalHodgeTable, keep: impl Fn(&Residue) -> bool) -> Result<()> {
    for r in table.residues().iter().filter(|r| keep(r)) {
        table.total(r, 0)?;
    }
    Ok(())
}

fn drop_zeros(map: BTreeMap<i64, i64>) -> BTreeMap<i64, i64> {
    map.into_iter().filter(|(_, v)| *v != 0).collect()
}

/// `δ^p(M ⊗ L_λ̄₀) = δ^p(M) − h^p(M) + Σ_{γ∈[γ₀,1)} ν_{0,λ}^p(M)
/// + Σ_{γ∈[1−γ₀,1)} ν_{∞,λ}^p(M)`, i.e. the degrees after the twist by
/// `c = γ₀`.
pub fn twist_delta(
    delta: &BTreeMap<i64, i64>,
    h: &BTreeMap<i64, u64>,
    nu_zero: &LocalHodgeTable,
    nu_infinity: &LocalHodgeTable,
    ctx: &ConvolutionContext,
) -> Result<BTreeMap<i64, i64>> {
    let g0 = ctx.g0();
    let lo_inf = ctx.gamma0.complement();
    require_known(nu_zero, |r| in_closed_open(r, g0))?;
    require_known(nu_infinity, |r| in_closed_open(r, &lo_inf))?;
    let ps = p_candidates(
        [delta.keys().copied().collect(), h.keys().copied().collect()],
        [nu_zero, nu_infinity],
    );
    let mut out = BTreeMap::new();
    for p in ps {
        let mut v = delta.get(&p).copied().unwrap_or(0) - h.get(&p).copied().unwrap_or(0) as i64;
        for r in nu_zero.residues().iter().filter(|r| in_closed_open(r, g0)) {
            v += nu_zero.total(r, p)? as i64;
        }
        for r in nu_infinity.residues().iter().filter(|r| in_closed_open(r, &lo_inf)) {
            v += nu_infinity.total(r, p)? as i64;
        }
        out.insert(p, v);
    }
    Ok(drop_zeros(out))
}

/// Vanishing cycles at a finite point `x_i ≠ 0`: the entry at `γ′` moves to
/// `γ = γ′ + γ₀ mod 1`; its Hodge index is kept when `γ ∈ (0, γ₀]` and
/// raised by one when `γ ∈ (γ₀, 1]`.
pub fn mc_mu_finite(table: &LocalHodgeTable, ctx: &ConvolutionContext) -> LocalHodgeTable {
    let shift = ctx.lambda0_residue();
    let mut out = LocalHodgeTable::new(table.point(), table.kind());
    for slot in table.unknown_slots() {
        out.mark_unknown(slot.residue.add(&shift), slot.ell);
    }
    for (k, m) in table.entries() {
        let r = k.residue.add(&shift);
        let raise = &gamma_of(&r) > ctx.g0();
        out.add(r, k.ell, k.p + i64::from(raise), m);
    }
    out
}

enum Image {
    To(u32, i64),
    Consumed,
}

/// Nearby cycles at ∞. With `γ′` the γ-value of an old entry:
/// `γ′ ∈ (0, 1−γ₀)` raises `p`; `γ′ ∈ (1−γ₀, 1)` keeps it;
/// `γ′ = 1` lowers `ℓ` (the `ℓ = 0` part disappears);
/// `γ′ = 1 − γ₀` (eigenvalue `λ̄₀`) raises both `ℓ` and `p`.
/// The new `(λ̄₀, ℓ = 0)` part is registered as unknown.
pub fn mc_nu_infinity(table: &LocalHodgeTable, ctx: &ConvolutionContext) -> LocalHodgeTable {
    let bar = ctx.lambda0_bar_residue();
    let bar_gamma = ctx.gamma0.complement();
    let image = |r: &Residue, ell: u32, p: i64| -> Image {
        if r.is_zero() {
            if ell == 0 {
                Image::Consumed
            } else {
                Image::To(ell - 1, p)
            }
        } else if r == &bar {
            Image::To(ell + 1, p + 1)
        } else if in_open(r, &bar_gamma) {
            Image::To(ell, p + 1)
        } else {
            Image::To(ell, p)
        }
    };
    let mut out = LocalHodgeTable::new(table.point(), table.kind());
    for slot in table.unknown_slots() {
        if let Image::To(ell, _) = image(&slot.residue, slot.ell, 0) {
            out.mark_unknown(slot.residue.clone(), ell);
        }
    }
    out.mark_unknown(bar.clone(), 0);
    for (k, m) in table.entries() {
        if let Image::To(ell, p) = image(&k.residue, k.ell, k.p) {
            out.add(k.residue.clone(), ell, p, m);
        }
    }
    out
}

/// Nearby cycles at 0. With `γ′` the γ-value of an old entry:
/// `γ′ ∈ (0, γ₀)` keeps `p`; `γ′ ∈ (γ₀, 1)` raises it;
/// `γ′ = γ₀` lowers `ℓ` (the `ℓ = 0` part disappears);
/// `γ′ = 1` raises both `ℓ` and `p`.
/// The new `(1, ℓ = 0)` part is `h^p H^1(ℙ¹, DR M^min)`: taken from `h1`
/// when supplied, otherwise registered as unknown.
pub fn mc_nu_zero(
    table: &LocalHodgeTable,
    ctx: &ConvolutionContext,
    h1: Option<&BTreeMap<i64, u64>>,
) -> LocalHodgeTable {
    let lambda0 = ctx.lambda0_residue();
    let image = |r: &Residue, ell: u32, p: i64| -> Image {
        if r.is_zero() {
            Image::To(ell + 1, p + 1)
        } else if r == &lambda0 {
            if ell == 0 {
                Image::Consumed
            } else {
                Image::To(ell - 1, p)
            }
        } else if in_open(r, ctx.g0()) {
            Image::To(ell, p)
        } else {
            Image::To(ell, p + 1)
        }
    };
    let mut out = LocalHodgeTable::new(table.point(), table.kind());
    for slot in table.unknown_slots() {
        if let Image::To(ell, _) = image(&slot.residue, slot.ell, 0) {
            out.mark_unknown(slot.residue.clone(), ell);
        }
    }
    match h1 {
        Some(h1) => {
            for (&p, &m) in h1 {
                out.add(Residue::zero(), 0, p, m);
            }
        }
        None => out.mark_unknown(Residue::zero(), 0),
    }
    for (k, m) in table.entries() {
        if let Image::To(ell, p) = image(&k.residue, k.ell, k.p) {
            out.add(k.residue.clone(), ell, p, m);
        }
    }
    out
}

/// Hodge numbers after convolution:
/// `h^p + ν_{0,1,prim}^{p−1} − ν_{0,λ₀,prim}^{p−1} + h^p H^1
/// + Σ_{γ∈[γ₀,1)} (ν_{0,λ}^{p−1} − ν_{0,λ}^p)`.
pub fn mc_h(
    h: &BTreeMap<i64, u64>,
    nu_zero: &LocalHodgeTable,
    h1: &BTreeMap<i64, u64>,
    ctx: &ConvolutionContext,
) -> Result<BTreeMap<i64, u64>> {
    let one = Residue::zero();
    let lambda0 = ctx.lambda0_residue();
    require_known(nu_zero, |r| r.is_zero() || r == &lambda0 || in_closed_open(r, ctx.g0()))?;
    let ps = p_candidates(
        [h.keys().copied().collect(), h1.keys().copied().collect()],
        [nu_zero],
    );
    let mut out = BTreeMap::new();
    for p in ps {
        let mut v = h.get(&p).copied().unwrap_or(0) as i64 + h1.get(&p).copied().unwrap_or(0) as i64;
        v += nu_zero.prim(&one, p - 1)? as i64;
        v -= nu_zero.prim(&lambda0, p - 1)? as i64;
        for r in nu_zero.residues().iter().filter(|r| in_closed_open(r, ctx.g0())) {
            v += nu_zero.total(r, p - 1)? as i64 - nu_zero.total(r, p)? as i64;
        }
        match v {
            0 => {}
            v if v > 0 => {
                out.insert(p, v as u64);
            }
            v => {
                return Err(Error::Inconsistent(format!("h^{p} would be {v}")));
            }
        }
    }
    Ok(out)
}

/// Degrees after convolution, from the data of the input module `M`:
/// `δ^p + Σ_{γ∈[γ₀,1)} (ν_{0,λ}^p − ν_{0,λ}^{p−1}) + ν_{0,λ₀,prim}^{p−1}
/// − Σ_i (μ_{x_i,1}^p + Σ_{γ∈(0,1−γ₀)} μ_{x_i,λ}^{p−1})`.
pub fn mc_delta(
    delta: &BTreeMap<i64, i64>,
    nu_zero: &LocalHodgeTable,
    mu_finite: &[LocalHodgeTable],
    ctx: &ConvolutionContext,
) -> Result<BTreeMap<i64, i64>> {
    let one = Residue::zero();
    let lambda0 = ctx.lambda0_residue();
    let bar_gamma = ctx.gamma0.complement();
    require_known(nu_zero, |r| r == &lambda0 || in_closed_open(r, ctx.g0()))?;
    for mu in mu_finite {
        require_known(mu, |r| r.is_zero() || in_open(r, &bar_gamma))?;
    }
    let ps = p_candidates([delta.keys().copied().collect()], std::iter::once(nu_zero).chain(mu_finite));
    let mut out = BTreeMap::new();
    for p in ps {
        let mut v = delta.get(&p).copied().unwrap_or(0);
        for r in nu_zero.residues().iter().filter(|r| in_closed_open(r, ctx.g0())) {
            v += nu_zero.total(r, p)? as i64 - nu_zero.total(r, p - 1)? as i64;
        }
        v += nu_zero.prim(&lambda0, p - 1)? as i64;
        for mu in mu_finite {
            if mu.residues().contains(&one) {
                v -= mu.total(&one, p)? as i64;
            }
            for r in mu.residues().iter().filter(|r| !r.is_zero() && in_open(r, &bar_gamma)) {
                v -= mu.total(r, p - 1)? as i64;
            }
        }
        out.insert(p, v);
    }
    Ok(drop_zeros(out))
}

/// `μ_1^p = ν_1^{p−1} − ν_{1,prim}^{p−1}` at eigenvalue 1.
pub fn mu_from_nu_unit(nu_table: &LocalHodgeTable) -> Result<BTreeMap<i64, u64>> {
    let one = Residue::zero();
    require_known(nu_table, Residue::is_zero)?;
    let mut out = BTreeMap::new();
    for p in nu_table.p_support() {
        let v = nu_table.total(&one, p)? - nu_table.prim(&one, p)?;
        if v != 0 {
            out.insert(p + 1, v);
        }
    }
    Ok(out)
}
