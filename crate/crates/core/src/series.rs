//! Exact truncated power series and the generating series of the correction.
//!
//! A [`TruncatedRationalSeries`] of order `N` stores the coefficients of
//! `x^0 .. x^N`. Binary operations require equal orders; the operator impls
//! panic on a mismatch, the `checked_*` methods return [`SeriesError`].

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::combinatorics::{catalan_numbers, int, EnsembleParams};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("truncation orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("divisor has zero constant term and is not invertible")]
    NotInvertible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedRationalSeries {
    coeffs: Vec<BigRational>,
}

impl TruncatedRationalSeries {
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![BigRational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(BigRational::one(), 0, order)
    }

    /// `c · x^power`, or zero if `power > order`.
    pub fn monomial(c: BigRational, power: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if power <= order {
            s.coeffs[power] = c;
        }
        s
    }

    /// The series `x`.
    pub fn x(order: usize) -> Self {
        Self::monomial(BigRational::one(), 1, order)
    }

    /// Takes ownership of `coeffs`; the order is `coeffs.len() - 1`.
    ///
    /// # Panics
    ///
    /// If `coeffs` is empty.
    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a series needs at least one coefficient"
        );
        Self { coeffs }
    }

    pub fn from_integers<I: IntoIterator<Item = BigInt>>(coeffs: I) -> Self {
        Self::from_coeffs(coeffs.into_iter().map(BigRational::from_integer).collect())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `x^i`.
    ///
    /// # Panics
    ///
    /// If `i` exceeds the truncation order.
    pub fn coeff(&self, i: usize) -> &BigRational {
        &self.coeffs[i]
    }

    pub fn set_coeff(&mut self, i: usize, c: BigRational) {
        self.coeffs[i] = c;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Index of the first nonzero coefficient.
    pub fn first_nonzero(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// First index where the two series differ.
    pub fn first_difference(&self, other: &Self) -> Result<Option<usize>, SeriesError> {
        self.check_order(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .position(|(a, b)| a != b))
    }

    /// Drops coefficients above `order`, or pads with zeros.
    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, BigRational::zero());
        Self { coeffs }
    }

    fn check_order(&self, other: &Self) -> Result<(), SeriesError> {
        if self.order() == other.order() {
            Ok(())
        } else {
            Err(SeriesError::OrderMismatch(self.order(), other.order()))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        Ok(Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        Ok(Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Cauchy product truncated at the common order.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        let n = self.order();
        let mut coeffs = vec![BigRational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        Ok(Self { coeffs })
    }

    /// `q` with `q · divisor = self` through the truncation order.
    pub fn checked_div(&self, divisor: &Self) -> Result<Self, SeriesError> {
        self.check_order(divisor)?;
        let b0 = &divisor.coeffs[0];
        if b0.is_zero() {
            return Err(SeriesError::NotInvertible);
        }
        let n = self.order();
        let mut q: Vec<BigRational> = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let mut acc = self.coeffs[m].clone();
            for i in 1..=m {
                let b = &divisor.coeffs[i];
                if !b.is_zero() {
                    acc -= b * &q[m - i];
                }
            }
            q.push(acc / b0);
        }
        Ok(Self { coeffs: q })
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.order());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiply by `x^k`, dropping what falls past the order.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.order();
        let mut out = Self::zero(n);
        for i in 0..=n.saturating_sub(k) {
            if i + k <= n {
                out.coeffs[i + k] = self.coeffs[i].clone();
            }
        }
        out
    }

    /// Term-wise derivative.
    ///
    /// The coefficient of `x^N` in the derivative would need `x^{N+1}`, which
    /// is not stored, so the result has order `N - 1` (order 0 for constants).
    pub fn derivative(&self) -> Self {
        let n = self.order();
        if n == 0 {
            return Self::zero(0);
        }
        Self {
            coeffs: (1..=n).map(|i| &self.coeffs[i] * int(i as i64)).collect(),
        }
    }

    /// Evaluate at a floating point `x`.
    pub fn eval_f64(&self, x: f64) -> f64 {
        use num_traits::ToPrimitive;
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }
}

impl Add for &TruncatedRationalSeries {
    type Output = TruncatedRationalSeries;
    fn add(self, rhs: Self) -> Self::Output {
        self.checked_add(rhs).expect("series orders must match")
    }
}

impl Sub for &TruncatedRationalSeries {
    type Output = TruncatedRationalSeries;
    fn sub(self, rhs: Self) -> Self::Output {
        self.checked_sub(rhs).expect("series orders must match")
    }
}

impl Mul for &TruncatedRationalSeries {
    type Output = TruncatedRationalSeries;
    fn mul(self, rhs: Self) -> Self::Output {
        self.checked_mul(rhs).expect("series orders must match")
    }
}

impl Neg for &TruncatedRationalSeries {
    type Output = TruncatedRationalSeries;
    fn neg(self) -> Self::Output {
        TruncatedRationalSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// `T(x) = Σ Cat(k) x^k` through `x^order`.
pub fn catalan_series(order: usize) -> TruncatedRationalSeries {
    TruncatedRationalSeries::from_integers(catalan_numbers(order))
}

/// Building blocks shared by the closed forms: `T`, `x` and `D = 1/(1 - xT²)`.
struct Blocks {
    t: TruncatedRationalSeries,
    x: TruncatedRationalSeries,
    d: TruncatedRationalSeries,
}

impl Blocks {
    fn from_t(t: &TruncatedRationalSeries) -> Self {
        let order = t.order();
        let x = TruncatedRationalSeries::x(order);
        let one = TruncatedRationalSeries::one(order);
        let denom = &one - &(&x * &t.pow(2));
        let d = one
            .checked_div(&denom)
            .expect("1 - xT^2 has constant term 1");
        Self { t: t.clone(), x, d }
    }

    /// `x^xp · T^tp · D^dp`.
    fn xtd(&self, xp: usize, tp: u32, dp: u32) -> TruncatedRationalSeries {
        (&self.t.pow(tp) * &self.d.pow(dp)).shift(xp)
    }
}

/// Outcome of one exact identity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: &'static str,
    /// Highest coefficient index the identity is asserted through.
    pub order: usize,
    /// First coefficient index where the two sides differ.
    pub first_mismatch: Option<usize>,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.first_mismatch.is_none()
    }

    fn compare(
        name: &'static str,
        lhs: &TruncatedRationalSeries,
        rhs: &TruncatedRationalSeries,
    ) -> Self {
        let order = lhs.order().min(rhs.order());
        let first_mismatch = lhs
            .truncate(order)
            .first_difference(&rhs.truncate(order))
            .expect("truncated to the same order");
        Self {
            name,
            order,
            first_mismatch,
        }
    }
}

/// The algebraic facts about `T` and its derivatives, each checked through
/// its reliable order: `N` for `T` itself, `N-1` for `T′`, `N-2` for `T″`.
/// Checks involving a derivative are skipped when the order is too small.
pub fn catalan_identities(t: &TruncatedRationalSeries) -> Vec<IdentityCheck> {
    let order = t.order();
    let b = Blocks::from_t(t);
    let one = TruncatedRationalSeries::one(order);

    let functional = &one + &(&b.x * &t.pow(2));
    let inverse_form = t * &(&one - &(&b.x * t));

    let t1 = t.derivative();
    let t1_closed = b.xtd(0, 3, 1);

    let t2 = t1.derivative();
    let t2_closed = &b.xtd(0, 5, 2).scale(&int(2)) + &b.xtd(0, 5, 3).scale(&int(2));

    // -x²T″/2 - xT′ only reads T″ up to x^{N-2}, so it is exact through x^N
    let s1_from_derivatives = &t2
        .truncate(order)
        .shift(2)
        .scale(&BigRational::new((-1).into(), 2.into()))
        - &t1.truncate(order).shift(1);
    let s1_closed = -&b.xtd(1, 3, 3);

    let mut checks = vec![
        IdentityCheck::compare("T = 1 + xT^2", t, &functional),
        IdentityCheck::compare("T(1 - xT) = 1", &inverse_form, &one),
    ];
    if order >= 1 {
        checks.push(IdentityCheck::compare(
            "T' = T^3/(1 - xT^2)",
            &t1,
            &t1_closed,
        ));
    }
    if order >= 2 {
        checks.push(IdentityCheck::compare(
            "T'' = 2T^5/(1 - xT^2)^2 + 2T^5/(1 - xT^2)^3",
            &t2,
            &t2_closed,
        ));
        checks.push(IdentityCheck::compare(
            "-x^2 T''/2 - x T' = -xT^3/(1 - xT^2)^3",
            &s1_from_derivatives,
            &s1_closed,
        ));
    }
    checks
}

/// Generating series of the four contribution families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SComponents {
    pub s1: TruncatedRationalSeries,
    pub s2: TruncatedRationalSeries,
    pub s3: TruncatedRationalSeries,
    pub s4: TruncatedRationalSeries,
}

impl SComponents {
    pub fn sum(&self) -> TruncatedRationalSeries {
        &(&(&self.s1 + &self.s2) + &self.s3) + &self.s4
    }
}

/// `S₁ .. S₄` built from a supplied `T`.
pub fn s_components_from(t: &TruncatedRationalSeries, params: &EnsembleParams) -> SComponents {
    let b = Blocks::from_t(t);
    let a = params.fourth_ratio();
    let s = params.diagonal_ratio();
    let r = int(i64::from(params.r()));
    SComponents {
        s1: -&b.xtd(1, 3, 3),
        s2: b.xtd(2, 5, 1).scale(&a),
        s3: b.xtd(1, 3, 1).scale(&s),
        s4: &b.xtd(3, 7, 3) + &b.xtd(3, 7, 2).scale(&(int(2) + r)),
    }
}

/// `S₁ .. S₄` through `x^order`.
pub fn s_components(order: usize, params: &EnsembleParams) -> SComponents {
    s_components_from(&catalan_series(order), params)
}

/// [`s_total`] built from a supplied `T`.
pub fn s_total_from(
    t: &TruncatedRationalSeries,
    params: &EnsembleParams,
) -> TruncatedRationalSeries {
    let b = Blocks::from_t(t);
    let a = params.fourth_ratio();
    let s = params.diagonal_ratio();
    let r = int(i64::from(params.r()));
    let cycle = b.xtd(3, 7, 2).scale(&r);
    let inner = &b.xtd(1, 2, 0).scale(&(a - int(2)))
        + &TruncatedRationalSeries::one(t.order()).scale(&(s - int(1)));
    &cycle + &(&b.xtd(1, 3, 1) * &inner)
}

/// The reduced generating series
/// `S(x) = r x³T⁷/(1-xT²)² + xT³/(1-xT²) · ((α/σ⁴ - 2) xT² + s²/σ² - 1)`,
/// whose coefficient of `x^l` is `ν_{2l}`.
pub fn s_total(order: usize, params: &EnsembleParams) -> TruncatedRationalSeries {
    s_total_from(&catalan_series(order), params)
}

/// Weights of the GUE combination
/// `-xT⁴/(1-xT²)² + 2x³T⁷/(1-xT²)² + 2x²T⁵/(1-xT²) + xT³/(1-xT²)`.
pub const CANCELLATION_WEIGHTS: [i64; 4] = [-1, 2, 2, 1];

/// The four-term combination with arbitrary weights.
pub fn cancellation_combination(order: usize, weights: [i64; 4]) -> TruncatedRationalSeries {
    let b = Blocks::from_t(&catalan_series(order));
    let terms = [
        b.xtd(1, 4, 2),
        b.xtd(3, 7, 2),
        b.xtd(2, 5, 1),
        b.xtd(1, 3, 1),
    ];
    terms
        .iter()
        .zip(weights)
        .fold(TruncatedRationalSeries::zero(order), |acc, (t, w)| {
            &acc + &t.scale(&int(w))
        })
}

/// True iff the GUE combination vanishes through `x^order`.
pub fn verify_cancellation(order: usize) -> bool {
    cancellation_combination(order, CANCELLATION_WEIGHTS).is_zero()
}

/// Cross-checks of the generating series against one another, built from a
/// caller-supplied `T` so that a corrupted `T` surfaces as a mismatch.
pub fn generating_series_checks(
    t: &TruncatedRationalSeries,
    params: &EnsembleParams,
) -> Vec<IdentityCheck> {
    let comps = s_components_from(t, params);
    let total = s_total_from(t, params);
    vec![IdentityCheck::compare(
        "S1 + S2 + S3 + S4 = S",
        &comps.sum(),
        &total,
    )]
}
