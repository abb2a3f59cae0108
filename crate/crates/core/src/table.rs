//! Tables of local Hodge numerical data at one singular point.
//!
//! An entry `(r, ℓ, p) ↦ m` records `m = dim gr_F^p prim_ℓ` of the nearby
//! (or vanishing) cycles at the eigenvalue with residue `r`. A primitive
//! vector at level `ℓ` generates a Jordan block of size `ℓ + 1` whose Hodge
//! indices run from `p` down to `p - ℓ`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numbers::Residue;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularPoint {
    Zero,
    /// Index into the declared finite singular points; for hypergeometric
    /// modules `Finite(0)` is the point `1`.
    Finite(usize),
    Infinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    NearbyPrimitive,
    VanishingPrimitive,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntryKey {
    pub residue: Residue,
    pub ell: u32,
    pub p: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub residue: Residue,
    pub ell: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTable", into = "RawTable")]
pub struct LocalHodgeTable {
    point: SingularPoint,
    kind: TableKind,
    entries: BTreeMap<EntryKey, u64>,
    unknown: BTreeSet<Slot>,
}

#[derive(Serialize, Deserialize)]
struct RawEntry {
    residue: Residue,
    ell: u32,
    p: i64,
    mult: u64,
}

#[derive(Serialize, Deserialize)]
struct RawTable {
    point: SingularPoint,
    kind: TableKind,
    entries: Vec<RawEntry>,
    #[serde(default)]
    unknown: Vec<Slot>,
}

impl TryFrom<RawTable> for LocalHodgeTable {
    type Error = String;

    fn try_from(raw: RawTable) -> Result<Self, String> {
        let mut table = LocalHodgeTable::new(raw.point, raw.kind);
        for slot in raw.unknown {
            table.unknown.insert(slot);
        }
        for e in raw.entries {
            if e.mult == 0 {
                return Err(format!("zero multiplicity at ({}, {}, {})", e.residue, e.ell, e.p));
            }
            if table.is_unknown(&e.residue, e.ell) {
                return Err(format!("({}, {}) is both an entry and an unknown slot", e.residue, e.ell));
            }
            table.add(e.residue, e.ell, e.p, e.mult);
        }
        Ok(table)
    }
}

impl From<LocalHodgeTable> for RawTable {
    fn from(t: LocalHodgeTable) -> Self {
        RawTable {
            point: t.point,
            kind: t.kind,
            entries: t
                .entries
                .into_iter()
                .map(|(k, mult)| RawEntry {
                    residue: k.residue,
                    ell: k.ell,
                    p: k.p,
                    mult,
                })
                .collect(),
            unknown: t.unknown.into_iter().collect(),
        }
    }
}

impl LocalHodgeTable {
    pub fn new(point: SingularPoint, kind: TableKind) -> Self {
        LocalHodgeTable {
            point,
            kind,
            entries: BTreeMap::new(),
            unknown: BTreeSet::new(),
        }
    }

    pub fn nearby(point: SingularPoint) -> Self {
        Self::new(point, TableKind::NearbyPrimitive)
    }

    pub fn vanishing(point: SingularPoint) -> Self {
        Self::new(point, TableKind::VanishingPrimitive)
    }

    /// Builder form of [`LocalHodgeTable::add`].
    pub fn with(mut self, residue: Residue, ell: u32, p: i64, mult: u64) -> Self {
        self.add(residue, ell, p, mult);
        self
    }

    pub fn with_unknown(mut self, residue: Residue, ell: u32) -> Self {
        self.mark_unknown(residue, ell);
        self
    }

    pub fn point(&self) -> SingularPoint {
        self.point
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    /// Adds `mult` to the entry; zero is a no-op.
    ///
    /// Panics if `(residue, ell)` is an unknown slot.
    pub fn add(&mut self, residue: Residue, ell: u32, p: i64, mult: u64) {
        if mult == 0 {
            return;
        }
        assert!(
            !self.is_unknown(&residue, ell),
            "entry ({residue}, {ell}) collides with an unknown slot"
        );
        *self.entries.entry(EntryKey { residue, ell, p }).or_insert(0) += mult;
    }

    /// Panics if entries already exist at `(residue, ell)`.
    pub fn mark_unknown(&mut self, residue: Residue, ell: u32) {
        assert!(
            !self.entries.keys().any(|k| k.residue == residue && k.ell == ell),
            "unknown slot ({residue}, {ell}) collides with an entry"
        );
        self.unknown.insert(Slot { residue, ell });
    }

    pub fn entries(&self) -> impl Iterator<Item = (&EntryKey, u64)> {
        self.entries.iter().map(|(k, &m)| (k, m))
    }

    pub fn unknown_slots(&self) -> impl Iterator<Item = &Slot> {
        self.unknown.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty() && self.unknown.is_empty()
    }

    pub fn is_unknown(&self, residue: &Residue, ell: u32) -> bool {
        self.unknown.iter().any(|s| &s.residue == residue && s.ell == ell)
    }

    pub fn has_unknown_at(&self, residue: &Residue) -> bool {
        self.unknown.iter().any(|s| &s.residue == residue)
    }

    pub fn get(&self, residue: &Residue, ell: u32, p: i64) -> u64 {
        self.entries
            .get(&EntryKey {
                residue: residue.clone(),
                ell,
                p,
            })
            .copied()
            .unwrap_or(0)
    }

    /// All entries at one residue, as `(ℓ, p, m)`.
    pub fn entries_at(&self, residue: &Residue) -> Vec<(u32, i64, u64)> {
        self.entries
            .iter()
            .filter(|(k, _)| &k.residue == residue)
            .map(|(k, &m)| (k.ell, k.p, m))
            .collect()
    }

    /// Residues carrying an entry or an unknown slot.
    pub fn residues(&self) -> BTreeSet<Residue> {
        self.entries
            .keys()
            .map(|k| k.residue.clone())
            .chain(self.unknown.iter().map(|s| s.residue.clone()))
            .collect()
    }

    fn require_known(&self, residue: &Residue) -> Result<()> {
        match self.unknown.iter().find(|s| &s.residue == residue) {
            Some(slot) => Err(Error::UnknownData {
                residue: residue.to_string(),
                ell: slot.ell,
            }),
            None => Ok(()),
        }
    }

    /// `Σ_ℓ Σ_{k=0}^{ℓ} t_{r,ℓ}^{p+k}`: the full (non-primitive) Hodge number
    /// at `(residue, p)`.
    pub fn total(&self, residue: &Residue, p: i64) -> Result<u64> {
        self.require_known(residue)?;
        Ok(self
            .entries
            .iter()
            .filter(|(k, _)| &k.residue == residue && k.p >= p && k.p <= p + i64::from(k.ell))
            .map(|(_, &m)| m)
            .sum())
    }

    /// `(Σ_ℓ t_{r,ℓ}^p, Σ_ℓ t_{r,ℓ}^{p+ℓ})`
    pub fn prim_and_coprim(&self, residue: &Residue, p: i64) -> Result<(u64, u64)> {
        self.require_known(residue)?;
        let mut prim = 0;
        let mut coprim = 0;
        for (k, &m) in self.entries.iter().filter(|(k, _)| &k.residue == residue) {
            if k.p == p {
                prim += m;
            }
            if k.p == p + i64::from(k.ell) {
                coprim += m;
            }
        }
        Ok((prim, coprim))
    }

    pub fn prim(&self, residue: &Residue, p: i64) -> Result<u64> {
        self.prim_and_coprim(residue, p).map(|(prim, _)| prim)
    }

    /// Every entry `(r, ℓ, p, m)` becomes `(r, ℓ, p + s, m)`.
    pub fn shifted(&self, s: i64) -> LocalHodgeTable {
        LocalHodgeTable {
            point: self.point,
            kind: self.kind,
            entries: self
                .entries
                .iter()
                .map(|(k, &m)| {
                    (
                        EntryKey {
                            residue: k.residue.clone(),
                            ell: k.ell,
                            p: k.p + s,
                        },
                        m,
                    )
                })
                .collect(),
            unknown: self.unknown.clone(),
        }
    }

    /// Applies `f` to every residue, merging entries that collide.
    pub fn map_residues(&self, f: impl Fn(&Residue) -> Residue) -> LocalHodgeTable {
        let mut out = LocalHodgeTable::new(self.point, self.kind);
        for slot in &self.unknown {
            out.unknown.insert(Slot {
                residue: f(&slot.residue),
                ell: slot.ell,
            });
        }
        for (k, &m) in &self.entries {
            *out
                .entries
                .entry(EntryKey {
                    residue: f(&k.residue),
                    ell: k.ell,
                    p: k.p,
                })
                .or_insert(0) += m;
        }
        out
    }

    pub fn at_point(&self, point: SingularPoint) -> LocalHodgeTable {
        LocalHodgeTable {
            point,
            ..self.clone()
        }
    }

    /// Residue `r ↦ {-r}`: switches between the `exp(+2πi r)` and
    /// `exp(-2πi r)` readings of a table.
    pub fn conjugated(&self) -> LocalHodgeTable {
        self.map_residues(Residue::conjugate)
    }

    /// `Σ m (ℓ + 1)` over the known entries.
    pub fn total_dimension(&self) -> u64 {
        self.entries
            .iter()
            .map(|(k, &m)| m * (u64::from(k.ell) + 1))
            .sum()
    }

    /// `Σ m` over the known entries.
    pub fn total_multiplicity(&self) -> u64 {
        self.entries.values().sum()
    }

    /// Hodge indices touched by some Jordan block, `p - ℓ ..= p`.
    pub fn p_support(&self) -> BTreeSet<i64> {
        self.entries
            .keys()
            .flat_map(|k| (k.p - i64::from(k.ell))..=k.p)
            .collect()
    }

    pub fn min_p(&self) -> Option<i64> {
        self.entries.keys().map(|k| k.p - i64::from(k.ell)).min()
    }

    /// `p ↦ Σ_r total(r, p)`, the graded dimensions of the whole space.
    pub fn graded_dimensions(&self) -> Result<BTreeMap<i64, u64>> {
        if let Some(slot) = self.unknown.iter().next() {
            return Err(Error::UnknownData {
                residue: slot.residue.to_string(),
                ell: slot.ell,
            });
        }
        let mut out = BTreeMap::new();
        for (k, &m) in &self.entries {
            for q in (k.p - i64::from(k.ell))..=k.p {
                *out.entry(q).or_insert(0) += m;
            }
        }
        Ok(out)
    }
}

/// `ν_λ^p = Σ_{ℓ≥0} Σ_{k=0}^{ℓ} ν_{λ,ℓ}^{p+k}`.
pub fn nu_total_from_prim(table: &LocalHodgeTable, residue: &Residue, p: i64) -> Result<u64> {
    table.total(residue, p)
}

/// `(ν_{λ,prim}^p, ν_{λ,coprim}^p)`.
pub fn nu_prim_and_coprim(table: &LocalHodgeTable, residue: &Residue, p: i64) -> Result<(u64, u64)> {
    table.prim_and_coprim(residue, p)
}

pub fn table_shift(table: &LocalHodgeTable, s: i64) -> LocalHodgeTable {
    table.shifted(s)
}
