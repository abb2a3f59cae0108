use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::table::LocalHodgeTable;

/// Complete local Hodge numerical data of one module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HodgeProfile {
    pub rank: usize,
    pub nu_zero: LocalHodgeTable,
    pub nu_infinity: LocalHodgeTable,
    /// One nearby-cycle table per finite singular point.
    pub nu_finite: Vec<LocalHodgeTable>,
    /// One vanishing-cycle table per finite singular point.
    pub mu_finite: Vec<LocalHodgeTable>,
    /// Hodge numbers `h^p` of the generic fiber.
    pub h: BTreeMap<i64, u64>,
    /// Degrees `δ^p = deg gr_F^p V^0`, when known.
    pub delta: Option<BTreeMap<i64, i64>>,
    pub normalization_note: String,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl HodgeProfile {
    /// Moves every Hodge index by `s`; notes and metadata are copied as is.
    pub fn shifted(&self, s: i64) -> HodgeProfile {
        HodgeProfile {
            rank: self.rank,
            nu_zero: self.nu_zero.shifted(s),
            nu_infinity: self.nu_infinity.shifted(s),
            nu_finite: self.nu_finite.iter().map(|t| t.shifted(s)).collect(),
            mu_finite: self.mu_finite.iter().map(|t| t.shifted(s)).collect(),
            h: self.h.iter().map(|(&p, &v)| (p + s, v)).collect(),
            delta: self
                .delta
                .as_ref()
                .map(|d| d.iter().map(|(&p, &v)| (p + s, v)).collect()),
            normalization_note: self.normalization_note.clone(),
            metadata: self.metadata.clone(),
        }
    }

    /// Smallest Hodge index appearing in `h` or in any table.
    pub fn min_p(&self) -> Option<i64> {
        self.tables()
            .filter_map(LocalHodgeTable::min_p)
            .chain(self.h.keys().copied())
            .min()
    }

    /// Shifts so that the smallest index is 0; returns the shift applied.
    pub fn normalized(&self) -> (HodgeProfile, i64) {
        let s = self.min_p().map_or(0, |m| -m);
        let mut out = self.shifted(s);
        out.normalization_note = format!("{} (normalized: p shifted by {s})", self.normalization_note);
        (out, s)
    }

    pub fn tables(&self) -> impl Iterator<Item = &LocalHodgeTable> {
        [&self.nu_zero, &self.nu_infinity]
            .into_iter()
            .chain(self.nu_finite.iter())
            .chain(self.mu_finite.iter())
    }

    pub fn without_delta(&self) -> HodgeProfile {
        HodgeProfile {
            delta: None,
            ..self.clone()
        }
    }

    fn same_data(&self, other: &HodgeProfile) -> bool {
        self.rank == other.rank
            && self.nu_zero == other.nu_zero
            && self.nu_infinity == other.nu_infinity
            && self.nu_finite == other.nu_finite
            && self.mu_finite == other.mu_finite
            && self.h == other.h
            && self.delta == other.delta
    }
}

/// The unique `s` with `a.shifted(s) == b` on all numerical data (tables,
/// `h`, `δ`), ignoring notes and metadata.
pub fn equal_up_to_shift(a: &HodgeProfile, b: &HodgeProfile) -> Option<i64> {
    if a.rank != b.rank {
        return None;
    }
    let s = match (a.min_p(), b.min_p()) {
        (Some(x), Some(y)) => y - x,
        (None, None) => 0,
        _ => return None,
    };
    a.shifted(s).same_data(b).then_some(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::Residue;
    use crate::table::SingularPoint;

    fn sample() -> HodgeProfile {
        let r = Residue::zero();
        HodgeProfile {
            rank: 2,
            nu_zero: LocalHodgeTable::nearby(SingularPoint::Zero).with(r.clone(), 1, 2, 1),
            nu_infinity: LocalHodgeTable::nearby(SingularPoint::Infinity).with(
                Residue::from_ratio(1, 2),
                1,
                2,
                1,
            ),
            nu_finite: vec![],
            mu_finite: vec![LocalHodgeTable::vanishing(SingularPoint::Finite(0)).with(r, 0, 1, 1)],
            h: [(1, 1), (2, 1)].into_iter().collect(),
            delta: Some([(1, -1)].into_iter().collect()),
            normalization_note: "test".into(),
            metadata: BTreeMap::new(),
        }
    }

    #[test]
    fn shift_detection() {
        let p = sample();
        assert_eq!(equal_up_to_shift(&p, &p), Some(0));
        assert_eq!(equal_up_to_shift(&p, &p.shifted(2)), Some(2));
        assert_eq!(equal_up_to_shift(&p.shifted(2), &p), Some(-2));
        for s in -6..6 {
            assert_eq!(equal_up_to_shift(&p, &p.shifted(s)), Some(s));
        }
    }

    #[test]
    fn different_ell_structure_is_not_a_shift() {
        let p = sample();
        let mut q = p.clone();
        q.nu_zero = LocalHodgeTable::nearby(SingularPoint::Zero)
            .with(Residue::zero(), 0, 2, 1)
            .with(Residue::from_ratio(1, 3), 0, 1, 1);
        assert_eq!(equal_up_to_shift(&p, &q), None);
        let mut r = p.clone();
        r.delta = None;
        assert_eq!(equal_up_to_shift(&p, &r), None);
    }

    #[test]
    fn metadata_is_ignored() {
        let p = sample();
        let mut q = p.clone();
        q.normalization_note = "other".into();
        q.metadata.insert("k".into(), "v".into());
        assert_eq!(equal_up_to_shift(&p, &q), Some(0));
    }

    #[test]
    fn normalization_moves_min_to_zero() {
        let (n, s) = sample().normalized();
        assert_eq!(s, -1);
        assert_eq!(n.min_p(), Some(0));
        assert_eq!(n.h, [(0, 1), (1, 1)].into_iter().collect());
    }
}
