//! Sampled Wigner matrices and Monte Carlo estimates of the correction.
//!
//! Moments are traces of matrix powers: `∫ x^k dμ_n = tr(X^k)/n`. Complex
//! Hermitian matrices are stored as a real symmetric part and a real
//! antisymmetric part so that every product runs on real `gemm`.
//!
//! Every sample draws from its own ChaCha stream keyed by
//! `(seed, n, sample index)`; estimates are therefore bit-for-bit
//! reproducible and independent of the number of threads.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::combinatorics::{nu_moment, semicircle_moment, EnsembleParams, ParamError};
use crate::oracle::{MomentModel, OracleError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonteCarloError {
    #[error("the correction estimate needs an even moment order, got k = {0}")]
    OddOrder(usize),
    #[error("at least {min} samples are required, got {got}")]
    TooFewSamples { got: usize, min: usize },
    #[error("matrix size must be positive")]
    ZeroSize,
    #[error("moment order must be positive")]
    ZeroOrder,
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Fewest samples accepted by the estimators.
pub const MIN_SAMPLES: usize = 100;

/// Dense Hermitian matrix `re + i·im`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    re: DMatrix<f64>,
    im: Option<DMatrix<f64>>,
}

impl HermitianMatrix {
    /// # Panics
    ///
    /// If `re` is not square.
    pub fn real(re: DMatrix<f64>) -> Self {
        assert!(re.is_square(), "matrix must be square");
        Self { re, im: None }
    }

    /// # Panics
    ///
    /// If the parts are not square matrices of the same size.
    pub fn complex(re: DMatrix<f64>, im: DMatrix<f64>) -> Self {
        assert!(
            re.is_square() && re.shape() == im.shape(),
            "parts must be square and equal size"
        );
        Self { re, im: Some(im) }
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self::real(DMatrix::from_diagonal(
            &nalgebra::DVector::from_column_slice(d),
        ))
    }

    pub fn identity(n: usize) -> Self {
        Self::real(DMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.re.nrows()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_none()
    }

    pub fn real_part(&self) -> &DMatrix<f64> {
        &self.re
    }

    pub fn imag_part(&self) -> Option<&DMatrix<f64>> {
        self.im.as_ref()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.re[(i, j)], self.im.as_ref().map_or(0.0, |m| m[(i, j)]))
    }

    /// Exact check that the matrix equals its conjugate transpose.
    pub fn is_hermitian(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (0..n).all(|j| {
                self.re[(i, j)] == self.re[(j, i)]
                    && self.im.as_ref().is_none_or(|m| m[(i, j)] == -m[(j, i)])
            })
        })
    }

    pub fn trace(&self) -> f64 {
        self.re.trace()
    }

    /// `self · other`. Only Hermitian when the factors commute, which holds
    /// for the powers of one matrix.
    fn mul(&self, other: &Self) -> Self {
        match (&self.im, &other.im) {
            (None, None) => Self::real(&self.re * &other.re),
            _ => {
                let zero = |m: &DMatrix<f64>| DMatrix::zeros(m.nrows(), m.ncols());
                let a_im = self.im.clone().unwrap_or_else(|| zero(&self.re));
                let b_im = other.im.clone().unwrap_or_else(|| zero(&other.re));
                let mut re = &self.re * &other.re;
                re.gemm(-1.0, &a_im, &b_im, 1.0);
                let mut im = &self.re * &b_im;
                im.gemm(1.0, &a_im, &other.re, 1.0);
                Self::complex(re, im)
            }
        }
    }

    /// `Re tr(self · other)` for Hermitian `other`.
    fn trace_of_product(&self, other: &Self) -> f64 {
        let re = self.re.dot(&other.re);
        match (&self.im, &other.im) {
            (Some(a), Some(b)) => re + a.dot(b),
            _ => re,
        }
    }
}

/// `[tr(X^j)/n for j = 1..=kmax]`.
///
/// Powers up to `⌈kmax/2⌉` are formed by repeated multiplication and
/// `tr(X^j) = tr(X^⌈j/2⌉ X^⌊j/2⌋)`.
pub fn empirical_moments(x: &HermitianMatrix, kmax: usize) -> Vec<f64> {
    let n = x.dim() as f64;
    let half = kmax.div_ceil(2);
    let mut powers: Vec<HermitianMatrix> = Vec::with_capacity(half);
    if half >= 1 {
        powers.push(x.clone());
    }
    for _ in 1..half {
        let next = powers.last().expect("nonempty").mul(x);
        powers.push(next);
    }
    (1..=kmax)
        .map(|j| {
            let (hi, lo) = (j.div_ceil(2), j / 2);
            let t = if lo == 0 {
                powers[hi - 1].trace()
            } else {
                powers[hi - 1].trace_of_product(&powers[lo - 1])
            };
            t / n
        })
        .collect()
}

/// Named entry distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Real Gaussian, `σ² = 1`, diagonal variance 2.
    Goe,
    /// Complex Gaussian, `E|W|² = 1`, real Gaussian diagonal of variance 1.
    Gue,
    /// Real `±σ` off the diagonal and `±s` on it.
    Rademacher,
    /// Sparse three-point law matching any valid `(r, σ², s², α)`, Gaussian
    /// diagonal; see [`MomentModel::three_point`].
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum OffDiagonalLaw {
    Gaussian { sd: f64 },
    ComplexGaussian { part_sd: f64 },
    Sign { c: f64 },
    ThreePoint { c: f64, q: f64, complex: bool },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum DiagonalLaw {
    Gaussian { sd: f64 },
    Sign { c: f64 },
}

/// Entry generator for one ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSampler {
    params: EnsembleParams,
    preset: Preset,
    offdiag: OffDiagonalLaw,
    diag: DiagonalLaw,
}

fn to_f64(v: &num_rational::BigRational) -> f64 {
    v.to_f64().expect("finite parameter")
}

impl EnsembleSampler {
    pub fn goe() -> Self {
        Self {
            params: EnsembleParams::goe(),
            preset: Preset::Goe,
            offdiag: OffDiagonalLaw::Gaussian { sd: 1.0 },
            diag: DiagonalLaw::Gaussian {
                sd: std::f64::consts::SQRT_2,
            },
        }
    }

    pub fn gue() -> Self {
        Self {
            params: EnsembleParams::gue(),
            preset: Preset::Gue,
            offdiag: OffDiagonalLaw::ComplexGaussian {
                part_sd: std::f64::consts::FRAC_1_SQRT_2,
            },
            diag: DiagonalLaw::Gaussian { sd: 1.0 },
        }
    }

    /// Signs scaled to off-diagonal variance `sigma2` and diagonal variance
    /// `s2`; `α = σ⁴`.
    pub fn rademacher(
        sigma2: num_rational::BigRational,
        s2: num_rational::BigRational,
    ) -> Result<Self, MonteCarloError> {
        let alpha = &sigma2 * &sigma2;
        let params = EnsembleParams::new(1, sigma2, s2, alpha)?;
        Ok(Self {
            offdiag: OffDiagonalLaw::Sign {
                c: to_f64(params.sigma2()).sqrt(),
            },
            diag: DiagonalLaw::Sign {
                c: to_f64(params.s2()).sqrt(),
            },
            params,
            preset: Preset::Rademacher,
        })
    }

    /// Three-point off-diagonal law for arbitrary valid parameters.
    pub fn custom(params: &EnsembleParams) -> Self {
        let sigma2 = to_f64(params.sigma2());
        let alpha = to_f64(params.alpha());
        Self {
            offdiag: OffDiagonalLaw::ThreePoint {
                c: (alpha / sigma2).sqrt(),
                q: sigma2 * sigma2 / alpha,
                complex: !params.is_real(),
            },
            diag: DiagonalLaw::Gaussian {
                sd: to_f64(params.s2()).sqrt(),
            },
            params: params.clone(),
            preset: Preset::Custom,
        }
    }

    pub fn params(&self) -> &EnsembleParams {
        &self.params
    }

    pub fn preset(&self) -> Preset {
        self.preset
    }

    pub fn is_real(&self) -> bool {
        self.params.is_real()
    }

    /// Exact moment tables of the same distribution, for the oracle.
    pub fn moment_model(&self, max_order: usize) -> Result<MomentModel, MonteCarloError> {
        Ok(match self.preset {
            Preset::Goe => MomentModel::goe(max_order),
            Preset::Gue => MomentModel::gue(max_order),
            Preset::Rademacher => MomentModel::rademacher(
                self.params.sigma2().clone(),
                self.params.s2().clone(),
                max_order,
            )?,
            Preset::Custom => MomentModel::three_point(&self.params, max_order)?,
        })
    }

    /// One off-diagonal `W_ij` (unscaled) as `(re, im)`.
    pub fn draw_offdiag<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        match self.offdiag {
            OffDiagonalLaw::Gaussian { sd } => (sd * normal(rng), 0.0),
            OffDiagonalLaw::ComplexGaussian { part_sd } => {
                (part_sd * normal(rng), part_sd * normal(rng))
            }
            OffDiagonalLaw::Sign { c } => (if rng.random::<bool>() { c } else { -c }, 0.0),
            OffDiagonalLaw::ThreePoint { c, q, complex } => {
                // draw the phase unconditionally so the stream layout is fixed
                let hit = rng.random::<f64>() < q;
                let magnitude = if hit { c } else { 0.0 };
                if complex {
                    let phase = rng.random::<f64>() * std::f64::consts::TAU;
                    (magnitude * phase.cos(), magnitude * phase.sin())
                } else {
                    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    (sign * magnitude, 0.0)
                }
            }
        }
    }

    /// One diagonal `W_ii` (unscaled).
    pub fn draw_diag<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.diag {
            DiagonalLaw::Gaussian { sd } => sd * normal(rng),
            DiagonalLaw::Sign { c } => {
                if rng.random::<bool>() {
                    c
                } else {
                    -c
                }
            }
        }
    }
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// `X = W / (σ √n)` from an explicit generator.
pub fn sample_matrix_with<R: Rng + ?Sized>(
    n: usize,
    sampler: &EnsembleSampler,
    rng: &mut R,
) -> HermitianMatrix {
    let scale = 1.0 / (to_f64(sampler.params.sigma2()) * n as f64).sqrt();
    let mut re = DMatrix::zeros(n, n);
    let mut im = (!sampler.is_real()).then(|| DMatrix::zeros(n, n));
    for i in 0..n {
        re[(i, i)] = scale * sampler.draw_diag(rng);
        for j in i + 1..n {
            let (a, b) = sampler.draw_offdiag(rng);
            re[(i, j)] = scale * a;
            re[(j, i)] = scale * a;
            if let Some(m) = im.as_mut() {
                m[(i, j)] = scale * b;
                m[(j, i)] = -scale * b;
            }
        }
    }
    match im {
        None => HermitianMatrix::real(re),
        Some(im) => HermitianMatrix::complex(re, im),
    }
}

/// Deterministic sample for `(n, sampler, seed)`.
pub fn sample_matrix(n: usize, sampler: &EnsembleSampler, seed: u64) -> HermitianMatrix {
    sample_matrix_with(n, sampler, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE5_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for sample `index` of a run at size `n`.
pub fn sample_rng(seed: u64, n: usize, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(n as u64)));
    rng.set_stream(index);
    rng
}

/// Per-sample moments `tr(X^j)/n`, `j = 1..=kmax`, in sample order.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSamples {
    pub n: usize,
    pub kmax: usize,
    pub values: Vec<Vec<f64>>,
}

impl MomentSamples {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Mean and standard error of a per-sample statistic.
    pub fn statistic<F: Fn(&[f64]) -> f64>(&self, f: F) -> (f64, f64) {
        mean_and_stderr(self.values.iter().map(|m| f(m)))
    }
}

/// Sample mean and `sd/√count` (sample standard deviation), in input order.
pub fn mean_and_stderr<I: IntoIterator<Item = f64>>(values: I) -> (f64, f64) {
    let v: Vec<f64> = values.into_iter().collect();
    let count = v.len() as f64;
    let mean = v.iter().sum::<f64>() / count;
    if v.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1.0);
    (mean, (var / count).sqrt())
}

/// Draw `samples` matrices of size `n` and record their first `kmax` moments.
pub fn sample_moments(
    n: usize,
    samples: usize,
    sampler: &EnsembleSampler,
    seed: u64,
    kmax: usize,
) -> Result<MomentSamples, MonteCarloError> {
    if n == 0 {
        return Err(MonteCarloError::ZeroSize);
    }
    if kmax == 0 {
        return Err(MonteCarloError::ZeroOrder);
    }
    let values = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let x = sample_matrix_with(n, sampler, &mut sample_rng(seed, n, i));
            empirical_moments(&x, kmax)
        })
        .collect();
    Ok(MomentSamples { n, kmax, values })
}

/// Monte Carlo estimate of `n (m_k(n) - sc_k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectionEstimate {
    pub k: usize,
    pub n: usize,
    pub samples: usize,
    pub point: f64,
    pub stderr: f64,
    /// `ν_k`.
    pub reference: f64,
}

impl CorrectionEstimate {
    /// `(point - ν_k) / stderr`.
    pub fn z_score(&self) -> f64 {
        self.z_against(self.reference)
    }

    pub fn z_against(&self, target: f64) -> f64 {
        (self.point - target) / self.stderr
    }
}

fn check_estimate_args(k: usize, samples: usize) -> Result<(), MonteCarloError> {
    if k == 0 || k % 2 == 1 {
        return Err(MonteCarloError::OddOrder(k));
    }
    if samples < MIN_SAMPLES {
        return Err(MonteCarloError::TooFewSamples {
            got: samples,
            min: MIN_SAMPLES,
        });
    }
    Ok(())
}

/// Correction estimates for several even `k` from one set of samples.
pub fn estimate_corrections(
    ks: &[usize],
    n: usize,
    samples: usize,
    sampler: &EnsembleSampler,
    seed: u64,
) -> Result<Vec<CorrectionEstimate>, MonteCarloError> {
    for &k in ks {
        check_estimate_args(k, samples)?;
    }
    let kmax = ks.iter().copied().max().unwrap_or(0);
    if kmax == 0 {
        return Ok(Vec::new());
    }
    let data = sample_moments(n, samples, sampler, seed, kmax)?;
    Ok(ks
        .iter()
        .map(|&k| corrections_from(&data, k, sampler.params()))
        .collect())
}

/// The estimate for moment `k` from already drawn samples.
pub fn corrections_from(
    data: &MomentSamples,
    k: usize,
    params: &EnsembleParams,
) -> CorrectionEstimate {
    let sc = semicircle_moment(k).to_f64().expect("finite");
    let n = data.n as f64;
    let (point, stderr) = data.statistic(|m| n * (m[k - 1] - sc));
    CorrectionEstimate {
        k,
        n: data.n,
        samples: data.len(),
        point,
        stderr,
        reference: nu_moment(k, params).to_f64().expect("finite"),
    }
}

pub fn estimate_correction(
    k: usize,
    n: usize,
    samples: usize,
    sampler: &EnsembleSampler,
    seed: u64,
) -> Result<CorrectionEstimate, MonteCarloError> {
    Ok(estimate_corrections(&[k], n, samples, sampler, seed)?.remove(0))
}

/// `2·E(2n) - E(n)`, which removes the `1/n` term of the finite-size bias.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RichardsonEstimate {
    pub k: usize,
    /// The coarse size; the fine size is `2n`.
    pub n: usize,
    pub samples: usize,
    pub point: f64,
    /// `√(4 se(2n)² + se(n)²)`; the two runs use independent streams.
    pub stderr: f64,
    pub reference: f64,
}

impl RichardsonEstimate {
    pub fn from_pair(coarse: &CorrectionEstimate, fine: &CorrectionEstimate) -> Self {
        debug_assert_eq!(coarse.k, fine.k);
        debug_assert_eq!(2 * coarse.n, fine.n);
        Self {
            k: coarse.k,
            n: coarse.n,
            samples: coarse.samples,
            point: 2.0 * fine.point - coarse.point,
            stderr: (4.0 * fine.stderr.powi(2) + coarse.stderr.powi(2)).sqrt(),
            reference: coarse.reference,
        }
    }

    pub fn z_score(&self) -> f64 {
        (self.point - self.reference) / self.stderr
    }
}

pub fn richardson_correction(
    k: usize,
    n: usize,
    sampler: &EnsembleSampler,
    samples: usize,
    seed: u64,
) -> Result<RichardsonEstimate, MonteCarloError> {
    let coarse = estimate_correction(k, n, samples, sampler, seed)?;
    let fine = estimate_correction(k, 2 * n, samples, sampler, seed)?;
    Ok(RichardsonEstimate::from_pair(&coarse, &fine))
}
