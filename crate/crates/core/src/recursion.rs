//! Inductive engine: peel a rank-one pair `(α_j, β_j)`, twist the rest by
//! `α_j`, convolve with `H_{0,γ₀}` (`γ₀ = {β_j − α_j}`), untwist.
//!
//! Each local invariant (an eigenvalue class at 0 or ∞, and the vanishing
//! cycles at 1) gets its own peel, chosen so the quantity being read is never
//! one of the transforms' unknown slots. Sub-profiles are memoized by the
//! sorted pair multiset: the tables do not depend on pair order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::closed_form::{self, hodge_numbers, nu_one_from_mu, POINT_ONE};
use crate::combinatorics::{check_shift_identity, special_gamma, ShiftIdentityCheck, Pole};
use crate::convolution::{
    mc_delta, mc_mu_finite, mc_nu_infinity, mc_nu_zero, twist, twist_with_delta, ConvolutionContext,
};
use crate::error::{Error, Result};
use crate::numbers::{GammaRep, Residue};
use crate::params::{mult_and_ell, multiplicity, HypergeometricParams};
use crate::profile::{equal_up_to_shift, HodgeProfile};
use crate::table::{LocalHodgeTable, SingularPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PeelCase {
    /// The peeled residue differs from the target.
    Case1,
    /// Same residue, but the class has multiplicity ≥ 2.
    Case2,
    /// Same residue of multiplicity 1: renumber and peel a different index.
    Case3,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeelPlan {
    pub peel_index: usize,
    pub case_tag: PeelCase,
    pub gamma0: GammaRep,
}

fn gamma0_of(params: &HypergeometricParams, j: usize) -> GammaRep {
    params.beta()[j].sub(&params.alpha()[j]).gamma()
}

/// The peel used for the invariant at `point` with eigenvalue residue
/// `residue` (`α`-side at 0, `β`-side at ∞). Finite points are unaffected by
/// the twist, so they always peel index 0.
pub fn choose_peel(params: &HypergeometricParams, point: SingularPoint, residue: &Residue) -> Result<PeelPlan> {
    let n = params.rank();
    if n < 2 {
        return Err(Error::NoValidPeel(format!("rank {n} has nothing to peel")));
    }
    let side = match point {
        SingularPoint::Zero => params.alpha(),
        SingularPoint::Infinity => params.beta(),
        SingularPoint::Finite(_) => {
            return Ok(PeelPlan {
                peel_index: 0,
                case_tag: PeelCase::Case1,
                gamma0: gamma0_of(params, 0),
            })
        }
    };
    let mult = multiplicity(side, residue);
    if mult == 0 {
        return Err(Error::NoValidPeel(format!("{residue} is not an eigenvalue class at {point:?}")));
    }
    let plan = |j, case_tag| PeelPlan {
        peel_index: j,
        case_tag,
        gamma0: gamma0_of(params, j),
    };
    if &side[0] != residue {
        return Ok(plan(0, PeelCase::Case1));
    }
    if mult >= 2 {
        return Ok(plan(0, PeelCase::Case2));
    }
    side.iter()
        .position(|r| r != residue)
        .map(|j| plan(j, PeelCase::Case3))
        .ok_or_else(|| Error::NoValidPeel(format!("no index with residue ≠ {residue}")))
}

/// Rank-one module `H(a, b)`.
pub fn base_profile(a: &Residue, b: &Residue) -> Result<HodgeProfile> {
    let params = HypergeometricParams::irreducible(vec![a.clone()], vec![b.clone()])?;
    let gs = special_gamma(&params);
    let mu = LocalHodgeTable::vanishing(POINT_ONE).with(gs.residue(), 0, 0, 1);
    let nu_one = nu_one_from_mu(&mu, 1);
    let degree = a.value() + b.conjugate().value() + b.sub(a).value();
    let degree = crate::numbers::ceil_i64(&degree);
    let mut metadata = BTreeMap::new();
    metadata.insert("engine".into(), "recursive".into());
    metadata.insert("delta".into(), "experimental".into());
    Ok(HodgeProfile {
        rank: 1,
        nu_zero: LocalHodgeTable::nearby(SingularPoint::Zero).with(a.clone(), 0, 1, 1),
        nu_infinity: LocalHodgeTable::nearby(SingularPoint::Infinity).with(b.clone(), 0, 1, 1),
        nu_finite: vec![nu_one],
        mu_finite: vec![mu],
        h: BTreeMap::from([(1, 1)]),
        delta: Some(BTreeMap::from([(1, -degree)])),
        normalization_note: closed_form::decomposition_note(&params),
        metadata,
    })
}

type Key = Vec<(Residue, Residue)>;

/// Memo of sub-profiles (δ excluded) keyed by the sorted pair list.
#[derive(Default)]
pub struct Engine {
    memo: BTreeMap<Key, HodgeProfile>,
    computed: usize,
}

impl Engine {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of distinct profiles computed (including the top-level one).
    pub fn profiles_computed(&self) -> usize {
        self.computed
    }

    /// Full profile, δ included (δ follows the given pair order).
    pub fn profile(&mut self, params: &HypergeometricParams) -> Result<HodgeProfile> {
        params.check_irreducible()?;
        let mut out = self.tables(params)?;
        out.delta = Some(self.delta(params)?);
        out.normalization_note = closed_form::decomposition_note(params);
        Ok(out)
    }

    /// Profile without δ; memoized.
    fn tables(&mut self, params: &HypergeometricParams) -> Result<HodgeProfile> {
        let key = params.canonical_pairs();
        if let Some(p) = self.memo.get(&key) {
            return Ok(p.clone());
        }
        self.computed += 1;
        let out = if params.rank() == 1 {
            base_profile(&params.alpha()[0], &params.beta()[0])?.without_delta()
        } else {
            self.tables_inductive(params)?
        };
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    fn tables_inductive(&mut self, params: &HypergeometricParams) -> Result<HodgeProfile> {
        let mut nu_zero = LocalHodgeTable::nearby(SingularPoint::Zero);
        let mut nu_infinity = LocalHodgeTable::nearby(SingularPoint::Infinity);
        for (point, side) in [(SingularPoint::Zero, params.alpha()), (SingularPoint::Infinity, params.beta())] {
            let mut classes = side.to_vec();
            classes.sort();
            classes.dedup();
            for target in &classes {
                let plan = choose_peel(params, point, target)?;
                let m = side.iter().position(|r| r == target).expect("class present");
                let (_, ell) = mult_and_ell(side, m)?;
                let table = self.convolved_at(params, &plan, point)?;
                if table.is_unknown(target, ell) {
                    return Err(Error::InternalUnknownConsulted(format!(
                        "{point:?} residue {target} ℓ={ell} via peel {}",
                        plan.peel_index
                    )));
                }
                let dest = match point {
                    SingularPoint::Zero => &mut nu_zero,
                    _ => &mut nu_infinity,
                };
                for (l, p, mult) in table.entries_at(target) {
                    if l == ell {
                        dest.add(target.clone(), l, p, mult);
                    }
                }
            }
        }

        let plan = choose_peel(params, POINT_ONE, &Residue::zero())?;
        let sub = self.tables(&params.without(plan.peel_index))?;
        let ctx = ConvolutionContext::new(plan.gamma0.clone())?;
        let mu_one = mc_mu_finite(&sub.mu_finite[0], &ctx);
        if mu_one.unknown_slots().next().is_some() {
            return Err(Error::InternalUnknownConsulted("vanishing cycles at 1".into()));
        }
        let nu_one = nu_one_from_mu(&mu_one, params.rank());
        let h = hodge_numbers(&nu_zero).map_err(internal)?;
        let mut metadata = BTreeMap::new();
        metadata.insert("engine".into(), "recursive".into());
        metadata.insert("delta".into(), "experimental".into());
        Ok(HodgeProfile {
            rank: params.rank(),
            nu_zero,
            nu_infinity,
            nu_finite: vec![nu_one],
            mu_finite: vec![mu_one],
            h,
            delta: None,
            normalization_note: String::new(),
            metadata,
        })
    }

    /// The nearby table at 0 or ∞ obtained by peeling pair `j`, unknown
    /// slots included, for any `j` (not only the one [`choose_peel`] picks).
    pub fn convolved_nearby(
        &mut self,
        params: &HypergeometricParams,
        j: usize,
        point: SingularPoint,
    ) -> Result<LocalHodgeTable> {
        params.check_irreducible()?;
        if params.rank() < 2 {
            return Err(Error::NoValidPeel("rank 1 has nothing to peel".into()));
        }
        if j >= params.rank() {
            return Err(Error::IndexOutOfRange {
                index: j,
                len: params.rank(),
            });
        }
        let plan = PeelPlan {
            peel_index: j,
            case_tag: PeelCase::Case1,
            gamma0: gamma0_of(params, j),
        };
        self.convolved_at(params, &plan, point)
    }

    /// The nearby table at `point` of the convolution along `plan`, in the
    /// profile's own residue coordinates (unknown slots included).
    fn convolved_at(
        &mut self,
        params: &HypergeometricParams,
        plan: &PeelPlan,
        point: SingularPoint,
    ) -> Result<LocalHodgeTable> {
        let j = plan.peel_index;
        let a = &params.alpha()[j];
        let sub = twist(&self.tables(&params.without(j))?, a);
        let ctx = ConvolutionContext::new(plan.gamma0.clone())?;
        let out = match point {
            SingularPoint::Zero => mc_nu_zero(&sub.nu_zero, &ctx, None),
            _ => mc_nu_infinity(&sub.nu_infinity.conjugated(), &ctx).conjugated(),
        };
        Ok(out.map_residues(|r| r.add(a)))
    }

    /// δ along the pair order: peel index 0 at every level.
    fn delta(&mut self, params: &HypergeometricParams) -> Result<BTreeMap<i64, i64>> {
        if params.rank() == 1 {
            return Ok(base_profile(&params.alpha()[0], &params.beta()[0])?
                .delta
                .expect("base δ"));
        }
        let a0 = params.alpha()[0].clone();
        let sub_params = params.without(0);
        let mut sub = self.tables(&sub_params)?;
        sub.delta = Some(self.delta(&sub_params)?);
        let twisted = twist_with_delta(&sub, &a0).map_err(internal)?;
        let ctx = ConvolutionContext::new(gamma0_of(params, 0))?;
        let delta_n = mc_delta(
            twisted.delta.as_ref().expect("δ carried"),
            &twisted.nu_zero,
            &twisted.mu_finite,
            &ctx,
        )
        .map_err(internal)?;
        let mut n = twist(&self.tables(params)?, &a0);
        n.delta = Some(delta_n);
        let full = twist_with_delta(&n, &a0.conjugate()).map_err(internal)?;
        Ok(full.delta.expect("δ carried"))
    }
}

fn internal(e: Error) -> Error {
    match e {
        Error::UnknownData { residue, ell } => {
            Error::InternalUnknownConsulted(format!("residue {residue} ℓ={ell}"))
        }
        other => other,
    }
}

pub fn profile_recursive(params: &HypergeometricParams) -> Result<HodgeProfile> {
    Engine::new().profile(params)
}

/// Outcome of comparing the two engines on one input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineReport {
    pub agree: bool,
    /// `equal_up_to_shift(recursive, closed)`; expected `Some(0)`.
    pub shift: Option<i64>,
    pub nu_zero_equal: bool,
    pub nu_infinity_equal: bool,
    pub mu_one_equal: bool,
    pub h_equal: bool,
    pub mismatches: Vec<String>,
    pub shift_identity: Vec<ShiftIdentityCheck>,
    pub shift_identity_holds: bool,
    pub metadata: BTreeMap<String, String>,
}

impl EngineReport {
    pub fn summary(&self) -> String {
        match (self.agree, self.shift) {
            (true, Some(s)) => format!("agree, shift {s}"),
            (_, Some(s)) => format!("disagree, shift {s}"),
            _ => "disagree".into(),
        }
    }

    fn failed(metadata: BTreeMap<String, String>) -> Self {
        EngineReport {
            agree: false,
            shift: None,
            nu_zero_equal: false,
            nu_infinity_equal: false,
            mu_one_equal: false,
            h_equal: false,
            mismatches: Vec::new(),
            shift_identity: Vec::new(),
            shift_identity_holds: false,
            metadata,
        }
    }
}

pub fn verify_cross_engine(params: &HypergeometricParams) -> EngineReport {
    compare(params, profile_recursive(params), closed_form::profile_closed(params))
}

/// Shared by [`verify_cross_engine`] and sweeps with a substituted engine.
pub fn compare(
    params: &HypergeometricParams,
    recursive: Result<HodgeProfile>,
    closed: Result<HodgeProfile>,
) -> EngineReport {
    let mut metadata = BTreeMap::new();
    if let Err(e) = params.check_irreducible() {
        metadata.insert("error".into(), e.to_string());
        return EngineReport::failed(metadata);
    }
    let (rec, closed) = match (recursive, closed) {
        (Ok(r), Ok(c)) => (r, c),
        (r, c) => {
            for (name, res) in [("recursive", r.err()), ("closed", c.err())] {
                if let Some(e) = res {
                    metadata.insert(format!("{name}_error"), e.to_string());
                }
            }
            return EngineReport::failed(metadata);
        }
    };
    let mut mismatches = Vec::new();
    let mut check = |name: &str, eq: bool| {
        if !eq {
            mismatches.push(name.to_string());
        }
        eq
    };
    let nu_zero_equal = check("nu_zero", rec.nu_zero == closed.nu_zero);
    let nu_infinity_equal = check("nu_infinity", rec.nu_infinity == closed.nu_infinity);
    let mu_one_equal = check("mu_one", rec.mu_finite == closed.mu_finite);
    let h_equal = check("h", rec.h == closed.h);
    check("nu_one", rec.nu_finite == closed.nu_finite);
    let shift = equal_up_to_shift(&rec.without_delta(), &closed.without_delta());

    let mut shift_identity = Vec::new();
    for pole in [Pole::Zero, Pole::Infinity] {
        for m in 0..params.rank() {
            match check_shift_identity(params, m, pole) {
                Ok(c) => shift_identity.push(c),
                Err(e) => {
                    metadata.insert("shift_identity_error".into(), e.to_string());
                }
            }
        }
    }
    let shift_identity_holds = !metadata.contains_key("shift_identity_error") && shift_identity.iter().all(|c| c.holds);
    if let Some(d) = &rec.delta {
        metadata.insert(
            "delta".into(),
            d.iter().map(|(p, v)| format!("{p}:{v}")).collect::<Vec<_>>().join(","),
        );
    }
    EngineReport {
        agree: mismatches.is_empty() && shift == Some(0),
        shift,
        nu_zero_equal,
        nu_infinity_equal,
        mu_one_equal,
        h_equal,
        mismatches,
        shift_identity,
        shift_identity_holds,
        metadata,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::rat;

    fn res(n: i64, d: i64) -> Residue {
        Residue::from_ratio(n, d)
    }

    fn params(a: &[(i64, i64)], b: &[(i64, i64)]) -> HypergeometricParams {
        HypergeometricParams::from_ratios(a, b).unwrap()
    }

    #[test]
    fn base_examples() {
        let p = base_profile(&res(1, 3), &res(0, 1)).unwrap();
        assert_eq!(p.nu_zero.get(&res(1, 3), 0, 1), 1);
        assert_eq!(p.nu_infinity.get(&res(0, 1), 0, 1), 1);
        assert_eq!(p.mu_finite[0].get(&res(2, 3), 0, 0), 1);
        assert_eq!(p.h, BTreeMap::from([(1, 1)]));

        let d = |a, b| base_profile(&a, &b).unwrap().delta.unwrap();
        assert_eq!(d(res(0, 1), res(1, 2)), BTreeMap::from([(1, -1)]));
        assert_eq!(d(res(1, 2), res(1, 4)), BTreeMap::from([(1, -2)]));
        assert!(base_profile(&res(1, 3), &res(1, 3)).is_err());
    }

    #[test]
    fn peel_examples() {
        let legendre = params(&[(0, 1), (0, 1)], &[(1, 2), (1, 2)]);
        let plan = choose_peel(&legendre, SingularPoint::Infinity, &res(1, 2)).unwrap();
        assert_eq!((plan.peel_index, plan.case_tag), (0, PeelCase::Case2));

        let inter = params(&[(0, 1), (1, 2)], &[(1, 4), (3, 4)]);
        let plan = choose_peel(&inter, SingularPoint::Zero, &res(0, 1)).unwrap();
        assert_eq!((plan.peel_index, plan.case_tag), (1, PeelCase::Case3));
        assert_eq!(plan.gamma0.value(), &rat(1, 4));
        let plan = choose_peel(&inter, SingularPoint::Zero, &res(1, 2)).unwrap();
        assert_eq!((plan.peel_index, plan.case_tag), (0, PeelCase::Case1));

        assert!(matches!(
            choose_peel(&inter, SingularPoint::Zero, &res(1, 3)),
            Err(Error::NoValidPeel(_))
        ));
    }

    #[test]
    fn engines_agree_on_examples() {
        for p in [
            params(&[(0, 1), (0, 1)], &[(1, 2), (1, 2)]),
            params(&[(0, 1), (1, 2)], &[(1, 4), (3, 4)]),
            params(&[(1, 3)], &[(0, 1)]),
        ] {
            let report = verify_cross_engine(&p);
            assert!(report.agree, "{p:?}: {report:?}");
            assert_eq!(report.summary(), "agree, shift 0");
            assert!(report.shift_identity_holds);
        }
    }

    #[test]
    fn rank_one_is_base() {
        let p = params(&[(1, 3)], &[(0, 1)]);
        let base = base_profile(&res(1, 3), &res(0, 1)).unwrap();
        let rec = profile_recursive(&p).unwrap();
        assert_eq!(rec.nu_zero, base.nu_zero);
        assert_eq!(rec.delta, base.delta);
    }

    #[test]
    fn delta_total_matches_residue_sum() {
        // Σ_p δ^p = −(Σα + Σ{−β} + {Σ(β−α)})
        for p in [
            params(&[(0, 1), (0, 1)], &[(1, 2), (1, 2)]),
            params(&[(0, 1), (1, 2)], &[(1, 4), (3, 4)]),
            params(&[(1, 5), (2, 3), (0, 1)], &[(1, 2), (1, 4), (3, 4)]),
        ] {
            let d = profile_recursive(&p).unwrap().delta.unwrap();
            let total: i64 = d.values().sum();
            let mut s = crate::combinatorics::special_gamma(&p).residue().value().clone();
            for (a, b) in p.pairs() {
                s += a.value() + b.conjugate().value();
            }
            assert_eq!(rat(-total, 1), s, "{p:?}");
        }
    }

    #[test]
    fn reducible_reported_in_metadata() {
        let p = HypergeometricParams::from_ratios(&[(1, 3)], &[(1, 3)]).unwrap();
        let report = verify_cross_engine(&p);
        assert!(!report.agree);
        assert!(report.metadata["error"].contains("α_i ≠ β_j"));
        assert!(matches!(profile_recursive(&p), Err(Error::Reducible { .. })));
    }
}
