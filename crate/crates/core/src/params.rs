use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numbers::Residue;

/// The pair of tuples `(α, β)` defining `H_{α,β}`.
///
/// The order of the pairs is the decomposition `H_{α₁,β₁} * ... * H_{αₙ,βₙ}`
/// into rank-one convolution factors. Invariants that depend on the pairing
/// (rather than on the two multisets) are only defined relative to it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct HypergeometricParams {
    alpha: Vec<Residue>,
    beta: Vec<Residue>,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    alpha: Vec<Residue>,
    beta: Vec<Residue>,
}

impl TryFrom<RawParams> for HypergeometricParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        HypergeometricParams::new(raw.alpha, raw.beta)
    }
}

impl From<HypergeometricParams> for RawParams {
    fn from(p: HypergeometricParams) -> Self {
        RawParams {
            alpha: p.alpha,
            beta: p.beta,
        }
    }
}

impl HypergeometricParams {
    /// Checks lengths only; see [`HypergeometricParams::irreducible`].
    pub fn new(alpha: Vec<Residue>, beta: Vec<Residue>) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(Error::LengthMismatch {
                alpha: alpha.len(),
                beta: beta.len(),
            });
        }
        if alpha.is_empty() {
            return Err(Error::Empty);
        }
        Ok(HypergeometricParams { alpha, beta })
    }

    pub fn irreducible(alpha: Vec<Residue>, beta: Vec<Residue>) -> Result<Self> {
        let params = Self::new(alpha, beta)?;
        params.check_irreducible()?;
        Ok(params)
    }

    /// Parses both lists in the rational text format, reducing mod 1.
    pub fn parse<S: AsRef<str>>(alpha: &[S], beta: &[S]) -> Result<Self> {
        let parse_all = |xs: &[S]| {
            xs.iter()
                .map(|s| Residue::parse(s.as_ref()))
                .collect::<Result<Vec<_>>>()
        };
        Self::new(parse_all(alpha)?, parse_all(beta)?)
    }

    /// Builds from `(numerator, denominator)` pairs; convenient in tests.
    pub fn from_ratios(alpha: &[(i64, i64)], beta: &[(i64, i64)]) -> Result<Self> {
        let conv = |xs: &[(i64, i64)]| xs.iter().map(|&(n, d)| Residue::from_ratio(n, d)).collect();
        Self::new(conv(alpha), conv(beta))
    }

    pub fn rank(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[Residue] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Residue] {
        &self.beta
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Residue, &Residue)> {
        self.alpha.iter().zip(self.beta.iter())
    }

    /// The irreducibility criterion `α_i ≠ β_j` for all `i, j`.
    pub fn check_irreducible(&self) -> Result<()> {
        for (i, a) in self.alpha.iter().enumerate() {
            if let Some(j) = self.beta.iter().position(|b| b == a) {
                return Err(Error::Reducible {
                    alpha_index: i,
                    beta_index: j,
                    value: a.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn is_irreducible(&self) -> bool {
        self.check_irreducible().is_ok()
    }

    /// Drops pair `index`. Panics when that would leave an empty tuple.
    pub fn without(&self, index: usize) -> HypergeometricParams {
        assert!(self.rank() >= 2, "cannot remove the last pair");
        let mut alpha = self.alpha.clone();
        let mut beta = self.beta.clone();
        alpha.remove(index);
        beta.remove(index);
        HypergeometricParams { alpha, beta }
    }

    /// `({α - c}, {β - c})`, the parameters of the Kummer twist.
    pub fn twisted(&self, c: &Residue) -> HypergeometricParams {
        HypergeometricParams {
            alpha: self.alpha.iter().map(|a| a.sub(c)).collect(),
            beta: self.beta.iter().map(|b| b.sub(c)).collect(),
        }
    }

    /// Applies the same permutation to both tuples: pair `k` of the result is
    /// pair `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> HypergeometricParams {
        assert_eq!(perm.len(), self.rank());
        HypergeometricParams {
            alpha: perm.iter().map(|&i| self.alpha[i].clone()).collect(),
            beta: perm.iter().map(|&i| self.beta[i].clone()).collect(),
        }
    }

    /// Re-pairs the same two multisets: `β` is replaced by `β[perm[k]]`.
    pub fn repaired(&self, perm: &[usize]) -> HypergeometricParams {
        assert_eq!(perm.len(), self.rank());
        HypergeometricParams {
            alpha: self.alpha.clone(),
            beta: perm.iter().map(|&i| self.beta[i].clone()).collect(),
        }
    }

    /// Sorted pair list; equal for any two orderings of the same pairs.
    pub fn canonical_pairs(&self) -> Vec<(Residue, Residue)> {
        let mut pairs: Vec<_> = self
            .pairs()
            .map(|(a, b)| (a.clone(), b.clone()))
            .collect();
        pairs.sort();
        pairs
    }

    pub fn canonical(&self) -> HypergeometricParams {
        let (alpha, beta) = self.canonical_pairs().into_iter().unzip();
        HypergeometricParams { alpha, beta }
    }
}

/// `mult(x_m) = #{j | x_j = x_m}` and `ℓ_m = mult - 1`.
pub fn mult_and_ell(tuple: &[Residue], m: usize) -> Result<(usize, u32)> {
    let target = tuple.get(m).ok_or(Error::IndexOutOfRange {
        index: m,
        len: tuple.len(),
    })?;
    let mult = tuple.iter().filter(|x| *x == target).count();
    Ok((mult, (mult - 1) as u32))
}

/// Multiplicity of `value` in `tuple` (zero when absent).
pub fn multiplicity(tuple: &[Residue], value: &Residue) -> usize {
    tuple.iter().filter(|x| *x == value).count()
}
