//! Exact coefficients of the `1/n` expansion.
//!
//! Everything here is exact: integers are [`BigInt`] and ratios are
//! [`BigRational`]. The composition sums behind the four contribution families
//! are evaluated as finite convolutions of the Catalan sequence and never via
//! generating-function closed forms, so that [`crate::series`] stays an
//! independent check.

use std::fmt;

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

/// Rejected ensemble parameters.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("r must be 0 (complex entries) or 1 (real entries), got {0}")]
    InvalidR(u8),
    #[error("off-diagonal variance sigma2 must be positive, got {0}")]
    NonPositiveVariance(Box<BigRational>),
    #[error("diagonal variance s2 must be nonnegative, got {0}")]
    NegativeDiagonalVariance(Box<BigRational>),
    #[error(
        "fourth moment alpha = {alpha} is below sigma2^2 = {sigma4}; \
         the moment inequality E[|W|^4] >= E[|W|^2]^2 requires alpha >= sigma2^2"
    )]
    FourthMomentTooSmall {
        alpha: Box<BigRational>,
        sigma4: Box<BigRational>,
    },
}

/// The four scalars that determine the correction measure.
///
/// `r = 1` for real symmetric entries, `r = 0` for complex Hermitian ones;
/// `sigma2` and `alpha` are the second and fourth absolute moments of the
/// off-diagonal entries and `s2` is the diagonal variance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnsembleParams {
    r: u8,
    #[serde(serialize_with = "serialize_rational")]
    sigma2: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    s2: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    alpha: BigRational,
}

fn serialize_rational<S: serde::Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl EnsembleParams {
    pub fn new(
        r: u8,
        sigma2: BigRational,
        s2: BigRational,
        alpha: BigRational,
    ) -> Result<Self, ParamError> {
        if r > 1 {
            return Err(ParamError::InvalidR(r));
        }
        if !sigma2.is_positive() {
            return Err(ParamError::NonPositiveVariance(Box::new(sigma2)));
        }
        if s2.is_negative() {
            return Err(ParamError::NegativeDiagonalVariance(Box::new(s2)));
        }
        let sigma4 = &sigma2 * &sigma2;
        if alpha < sigma4 {
            return Err(ParamError::FourthMomentTooSmall {
                alpha: Box::new(alpha),
                sigma4: Box::new(sigma4),
            });
        }
        Ok(Self {
            r,
            sigma2,
            s2,
            alpha,
        })
    }

    /// Convenience constructor from small integers.
    pub fn from_integers(r: u8, sigma2: i64, s2: i64, alpha: i64) -> Result<Self, ParamError> {
        Self::new(r, int(sigma2), int(s2), int(alpha))
    }

    /// Gaussian Orthogonal Ensemble: `(r, σ², s², α) = (1, 1, 2, 3)`.
    pub fn goe() -> Self {
        Self::from_integers(1, 1, 2, 3).expect("GOE parameters are valid")
    }

    /// Gaussian Unitary Ensemble: `(r, σ², s², α) = (0, 1, 1, 2)`.
    pub fn gue() -> Self {
        Self::from_integers(0, 1, 1, 2).expect("GUE parameters are valid")
    }

    /// Real symmetric ±1 entries on and off the diagonal: `(1, 1, 1, 1)`.
    pub fn rademacher() -> Self {
        Self::from_integers(1, 1, 1, 1).expect("Rademacher parameters are valid")
    }

    pub fn r(&self) -> u8 {
        self.r
    }

    pub fn is_real(&self) -> bool {
        self.r == 1
    }

    pub fn sigma2(&self) -> &BigRational {
        &self.sigma2
    }

    pub fn s2(&self) -> &BigRational {
        &self.s2
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    /// `a = α / σ⁴`.
    pub fn fourth_ratio(&self) -> BigRational {
        &self.alpha / (&self.sigma2 * &self.sigma2)
    }

    /// `s = s² / σ²`.
    pub fn diagonal_ratio(&self) -> BigRational {
        &self.s2 / &self.sigma2
    }

    fn r_rational(&self) -> BigRational {
        int(i64::from(self.r))
    }
}

impl fmt::Display for EnsembleParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "r={} sigma2={} s2={} alpha={}",
            self.r, self.sigma2, self.s2, self.alpha
        )
    }
}

/// The four order-`1/n` contributions to `m_{2l}(n)`, with the `1/n` stripped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionTerm {
    pub l: usize,
    /// Trees with `l + 1` vertices, from the falling factorial.
    pub c1: BigRational,
    /// Trees with one edge visited four times.
    pub c2: BigRational,
    /// Trees plus one self-loop.
    pub c3: BigRational,
    /// Unicyclic graphs, cycle walked one way (real case only) or both ways.
    pub c4: BigRational,
    pub total: BigRational,
}

pub(crate) fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn big(v: BigInt) -> BigRational {
    BigRational::from_integer(v)
}

/// `Cat(k) = C(2k, k) / (k + 1)`.
pub fn catalan(k: usize) -> BigInt {
    central_binomial(k) / BigInt::from(k + 1)
}

/// `[Cat(0), ..., Cat(max)]` via `Cat(n+1) = Cat(n)·2(2n+1)/(n+2)`.
pub fn catalan_numbers(max: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(max + 1);
    let mut c = BigInt::one();
    for n in 0..=max {
        out.push(c.clone());
        c = c * BigInt::from(2 * (2 * n + 1)) / BigInt::from(n + 2);
    }
    out
}

/// `C(2m, m)`, the `2m`-th moment of the arcsine law on `[-2, 2]`.
pub fn central_binomial(m: usize) -> BigInt {
    binomial(BigInt::from(2 * m), BigInt::from(m))
}

/// Moments of the semicircle law: `Cat(k/2)` for even `k`, zero otherwise.
pub fn semicircle_moment(k: usize) -> BigInt {
    if k % 2 == 1 {
        BigInt::zero()
    } else {
        catalan(k / 2)
    }
}

/// `conv[j][m]` is the `j`-fold convolution of the Catalan sequence at `m`,
/// i.e. the sum of `Cat(p_1)···Cat(p_j)` over compositions of `m` into `j`
/// nonnegative parts. `conv[0]` is the unit sequence.
fn catalan_convolutions(max_parts: usize, max_total: usize) -> Vec<Vec<BigInt>> {
    let cat = catalan_numbers(max_total);
    let mut conv = Vec::with_capacity(max_parts + 1);
    let mut unit = vec![BigInt::zero(); max_total + 1];
    unit[0] = BigInt::one();
    conv.push(unit);
    for j in 1..=max_parts {
        let prev = &conv[j - 1];
        let next: Vec<BigInt> = (0..=max_total)
            .map(|m| (0..=m).map(|i| &prev[i] * &cat[m - i]).sum())
            .collect();
        conv.push(next);
    }
    conv
}

/// Sum over compositions `(p_1, ..., p_parts)` of `total` of
/// `(2 p_1 + 1) · Cat(p_1) ··· Cat(p_parts)`: the first tree carries a marked
/// corner.
fn marked_composition_sum(total: usize, parts: usize) -> BigInt {
    debug_assert!(parts >= 1);
    let cat = catalan_numbers(total);
    let conv = catalan_convolutions(parts - 1, total);
    let rest = &conv[parts - 1];
    (0..=total)
        .map(|p1| BigInt::from(2 * p1 + 1) * &cat[p1] * &rest[total - p1])
        .sum()
}

/// Trees on `l + 1` vertices: `-l(l+1)/2 · Cat(l)`.
pub fn term1_coeff(l: usize) -> BigInt {
    -(BigInt::from(l) * BigInt::from(l + 1) / BigInt::from(2u8)) * catalan(l)
}

/// Trees on `l` vertices with one edge walked four times, weighted by `α/σ⁴`.
pub fn term2_coeff(l: usize, params: &EnsembleParams) -> BigRational {
    if l < 2 {
        return BigRational::zero();
    }
    params.fourth_ratio() * big(marked_composition_sum(l - 2, 4))
}

/// Trees on `l` vertices with one self-loop, weighted by `s²/σ²`.
pub fn term3_coeff(l: usize, params: &EnsembleParams) -> BigRational {
    if l < 1 {
        return BigRational::zero();
    }
    params.diagonal_ratio() * big(marked_composition_sum(l - 1, 2))
}

/// Unicyclic graphs with a cycle of length `p ≥ 3`: `p` both-way traversals
/// plus `r` one-way traversals per cycle shape.
pub fn term4_coeff(l: usize, params: &EnsembleParams) -> BigRational {
    if l < 3 {
        return BigRational::zero();
    }
    let r = BigInt::from(params.r());
    let total: BigInt = (3..=l)
        .map(|p| (BigInt::from(p) + &r) * marked_composition_sum(l - p, 2 * p))
        .sum();
    big(total)
}

/// `∫ x^k dν` in closed form.
///
/// Uses `∫ x^{2m} dx / (π√(4-x²)) = C(2m, m)` on `[-2, 2]` and the atoms of
/// mass `r/4` at `±2`.
pub fn nu_moment(k: usize, params: &EnsembleParams) -> BigRational {
    if k % 2 == 1 {
        return BigRational::zero();
    }
    let l = k / 2;
    let r = params.r_rational();
    let a = params.fourth_ratio();
    let s = params.diagonal_ratio();
    let four_pow = big(BigInt::from(4u8).pow(l as u32));
    let cb = |m: usize| big(central_binomial(m));

    let atoms_and_arcsine = &r / int(2) * (four_pow - cb(l));
    let c4 = &a - int(2) - &r;
    let c2 = &s - int(4) * &a + int(7) + int(3) * &r;
    let c0 = int(2) * (&a - &s - int(1));
    let density = (c4 * cb(l + 2) + c2 * cb(l + 1) + c0 * cb(l)) / int(2);
    atoms_and_arcsine + density
}

/// The four contributions to the `1/n` coefficient of `m_{2l}(n)`.
pub fn order_one_coeff(l: usize, params: &EnsembleParams) -> ExpansionTerm {
    let c1 = big(term1_coeff(l));
    let c2 = term2_coeff(l, params);
    let c3 = term3_coeff(l, params);
    let c4 = term4_coeff(l, params);
    let total = &c1 + &c2 + &c3 + &c4;
    ExpansionTerm {
        l,
        c1,
        c2,
        c3,
        c4,
        total,
    }
}

/// Number of equivalence classes in each family of words of length `2l`
/// that contributes at order `1/n`, before weighting by entry moments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyCounts {
    pub l: usize,
    /// `v = l + 1`, `e = l`.
    pub trees: BigInt,
    /// `v = l`, `e = l - 1`: one edge walked four times.
    pub fourfold_edge: BigInt,
    /// `v = e = l` with a self-loop.
    pub self_loop: BigInt,
    /// `v = e = l`, cycle edges walked twice in the same direction.
    pub cycle_one_way: BigInt,
    /// `v = e = l`, cycle edges walked once in each direction.
    pub cycle_both_ways: BigInt,
}

pub fn family_counts(l: usize) -> FamilyCounts {
    let fourfold_edge = if l >= 2 {
        marked_composition_sum(l - 2, 4)
    } else {
        BigInt::zero()
    };
    let self_loop = if l >= 1 {
        marked_composition_sum(l - 1, 2)
    } else {
        BigInt::zero()
    };
    let mut cycle_one_way = BigInt::zero();
    let mut cycle_both_ways = BigInt::zero();
    for p in 3..=l {
        let m = marked_composition_sum(l - p, 2 * p);
        cycle_both_ways += BigInt::from(p) * &m;
        cycle_one_way += m;
    }
    FamilyCounts {
        l,
        trees: catalan(l),
        fourfold_edge,
        self_loop,
        cycle_one_way,
        cycle_both_ways,
    }
}

/// Two-term truncation `sc_k + ν_k / n`.
pub fn expected_moment_expansion(k: usize, n: u64, params: &EnsembleParams) -> BigRational {
    assert!(n >= 1, "matrix size must be positive");
    big(semicircle_moment(k)) + nu_moment(k, params) / big(BigInt::from(n))
}
