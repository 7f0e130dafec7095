//! The semicircle law and the correction measure `ν` as functions.
//!
//! `ν` has atoms of mass `r/4` at `±2` and an absolutely continuous part
//!
//! ```text
//! [ -r/2 + (c4 x⁴ + c2 x² + c0)/2 ] / (π √(4 - x²))   on (-2, 2)
//! ```
//!
//! with `c4 = a - (2 + r)`, `c2 = s - 4a + 7 + 3r`, `c0 = 2(a - s - 1)`,
//! `a = α/σ⁴` and `s = s²/σ²`. Integrals against the arcsine weight are done
//! after the substitution `x = 2 cos θ`, which turns them into plain integrals
//! over `θ ∈ [0, π]`.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::combinatorics::EnsembleParams;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum MeasureError {
    #[error("x = {0} is outside the open interval (-2, 2) where the density is finite")]
    OutsideSupport(f64),
    #[error("z = {0} lies on the cut [-2, 2]")]
    OnCut(Complex64),
}

/// Density of the semicircle law, zero outside `[-2, 2]`.
pub fn semicircle_density(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - x * x).sqrt() / (2.0 * PI)
    }
}

/// The correction measure in floating point.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedMeasureNu {
    pub params: EnsembleParams,
    pub r: f64,
    /// `α/σ⁴`.
    pub a: f64,
    /// `s²/σ²`.
    pub s: f64,
    pub c4: f64,
    pub c2: f64,
    pub c0: f64,
    /// Mass of each atom at `±2`.
    pub atom_mass: f64,
    /// Coefficient of the bare arcsine density.
    pub arcsine_mass_coeff: f64,
}

impl SignedMeasureNu {
    pub fn new(params: &EnsembleParams) -> Self {
        let r = f64::from(params.r());
        let a = params.fourth_ratio().to_f64().expect("finite ratio");
        let s = params.diagonal_ratio().to_f64().expect("finite ratio");
        Self {
            params: params.clone(),
            r,
            a,
            s,
            c4: a - (2.0 + r),
            c2: s - 4.0 * a + 7.0 + 3.0 * r,
            c0: 2.0 * (a - s - 1.0),
            atom_mass: r / 4.0,
            arcsine_mass_coeff: -r / 2.0,
        }
    }

    /// Density relative to the arcsine weight `1/(π√(4-x²))`.
    fn arcsine_factor(&self, x: f64) -> f64 {
        let x2 = x * x;
        self.arcsine_mass_coeff + 0.5 * ((self.c4 * x2 + self.c2) * x2 + self.c0)
    }

    /// Density of the absolutely continuous part at `|x| < 2`.
    pub fn density(&self, x: f64) -> Result<f64, MeasureError> {
        if x.is_nan() || x.abs() >= 2.0 {
            return Err(MeasureError::OutsideSupport(x));
        }
        Ok(self.arcsine_factor(x) / (PI * (4.0 - x * x).sqrt()))
    }

    /// `[(2, r/4), (-2, r/4)]`.
    pub fn atoms(&self) -> [(f64, f64); 2] {
        [(2.0, self.atom_mass), (-2.0, self.atom_mass)]
    }

    /// `∫ f dν` with the midpoint rule in `θ` on `npoints` nodes.
    ///
    /// Exact for polynomial `f` of degree below `2 npoints - 4`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, npoints: usize) -> f64 {
        assert!(npoints >= 1, "npoints must be positive");
        let h = PI / npoints as f64;
        let continuous: f64 = (0..npoints)
            .map(|j| {
                let x = 2.0 * ((j as f64 + 0.5) * h).cos();
                f(x) * self.arcsine_factor(x)
            })
            .sum::<f64>()
            / npoints as f64;
        let atoms: f64 = self.atoms().iter().map(|(x, m)| m * f(*x)).sum();
        continuous + atoms
    }

    /// `∫ x^k dν` by quadrature.
    pub fn quadrature_moment(&self, k: usize, npoints: usize) -> f64 {
        self.integrate(|x| x.powi(k as i32), npoints)
    }

    /// `∫ dν(x)/(z - x)` by quadrature; only accurate away from the cut.
    pub fn quadrature_stieltjes(&self, z: Complex64, npoints: usize) -> Complex64 {
        let h = PI / npoints as f64;
        let continuous: Complex64 = (0..npoints)
            .map(|j| {
                let x = 2.0 * ((j as f64 + 0.5) * h).cos();
                self.arcsine_factor(x) / (z - x)
            })
            .sum::<Complex64>()
            / npoints as f64;
        let atoms: Complex64 = self.atoms().iter().map(|(x, m)| *m / (z - x)).sum();
        continuous + atoms
    }

    /// Closed-form Stieltjes transform of `ν`.
    pub fn stieltjes(&self, z: Complex64) -> Result<Complex64, MeasureError> {
        let root = sqrt_z2_minus_4(z)?;
        let h = 2.0 / (z + root);
        let h2 = h * h;
        let atoms_and_arcsine =
            self.r / 2.0 * (0.5 * (1.0 / (z - 2.0) + 1.0 / (z + 2.0)) - 1.0 / root);
        let polynomial = h2 / root * ((self.a - 2.0 - self.r) * h2 + (self.s - 1.0 - self.r));
        Ok(atoms_and_arcsine + polynomial)
    }
}

fn on_cut(z: Complex64) -> bool {
    z.im == 0.0 && z.re.abs() <= 2.0
}

/// `√(z² - 4)` on the branch `z √(1 - 4/z²)` that behaves like `z` at infinity.
pub fn sqrt_z2_minus_4(z: Complex64) -> Result<Complex64, MeasureError> {
    if on_cut(z) || !z.is_finite() {
        return Err(MeasureError::OnCut(z));
    }
    Ok(z * (1.0 - 4.0 / (z * z)).sqrt())
}

/// `H(z) = (z - √(z² - 4))/2`, the Stieltjes transform of the semicircle law.
///
/// Evaluated as `2/(z + √(z² - 4))`, which avoids cancellation for large `|z|`.
pub fn semicircle_stieltjes(z: Complex64) -> Result<Complex64, MeasureError> {
    Ok(2.0 / (z + sqrt_z2_minus_4(z)?))
}

pub fn nu_density(x: f64, params: &EnsembleParams) -> Result<f64, MeasureError> {
    SignedMeasureNu::new(params).density(x)
}

pub fn nu_atoms(params: &EnsembleParams) -> [(f64, f64); 2] {
    SignedMeasureNu::new(params).atoms()
}

pub fn nu_quadrature_moment(k: usize, params: &EnsembleParams, npoints: usize) -> f64 {
    SignedMeasureNu::new(params).quadrature_moment(k, npoints)
}

pub fn nu_stieltjes(z: Complex64, params: &EnsembleParams) -> Result<Complex64, MeasureError> {
    SignedMeasureNu::new(params).stieltjes(z)
}

/// `Σ_k moments[k] z^{-k-1}`, the moment expansion of a Stieltjes transform.
pub fn stieltjes_from_moments(z: Complex64, moments: &[f64]) -> Complex64 {
    let w = 1.0 / z;
    moments
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, m| acc * w + m)
        * w
}

/// `(1/z) S(1/z²)` from the coefficients `S_l = ν_{2l}`.
pub fn stieltjes_from_even_moments(z: Complex64, even_moments: &[f64]) -> Complex64 {
    let w2 = 1.0 / (z * z);
    even_moments
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, m| acc * w2 + m)
        / z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::nu_moment;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn semicircle_density_values() {
        assert!((semicircle_density(0.0) - 1.0 / PI).abs() < 1e-15);
        assert_eq!(semicircle_density(2.0), 0.0);
        assert_eq!(semicircle_density(3.0), 0.0);
    }

    #[test]
    fn nu_density_values() {
        let gue = EnsembleParams::gue();
        for x in [-1.9, -0.3, 0.0, 1.2] {
            assert_eq!(nu_density(x, &gue).unwrap(), 0.0);
        }
        let goe = EnsembleParams::goe();
        let d = nu_density(0.0, &goe).unwrap();
        assert!((d + 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert_eq!(nu_atoms(&goe), [(2.0, 0.25), (-2.0, 0.25)]);
        assert_eq!(nu_atoms(&gue), [(2.0, 0.0), (-2.0, 0.0)]);
        assert!(matches!(
            nu_density(2.0, &goe),
            Err(MeasureError::OutsideSupport(_))
        ));
    }

    #[test]
    fn quadrature_moments() {
        let goe = EnsembleParams::goe();
        assert!(nu_quadrature_moment(0, &EnsembleParams::rademacher(), 200).abs() < 1e-10);
        assert!((nu_quadrature_moment(2, &goe, 200) - 1.0).abs() < 1e-10);
        assert!((nu_quadrature_moment(8, &goe, 400) - 93.0).abs() < 1e-8);
    }

    #[test]
    fn quadrature_exact_once_degree_is_covered() {
        let p = EnsembleParams::from_integers(1, 1, 3, 7).unwrap();
        for k in (0..=12).step_by(2) {
            let exact = nu_moment(k, &p).to_f64().unwrap();
            let npoints = k / 2 + 4;
            let q = nu_quadrature_moment(k, &p, npoints);
            assert!((q - exact).abs() < 1e-9 * exact.abs().max(1.0), "k={k}");
        }
    }

    #[test]
    fn semicircle_transform() {
        let h3 = semicircle_stieltjes(c(3.0, 0.0)).unwrap();
        assert!((h3.re - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!(h3.im.abs() < 1e-15);
        let big = c(1e6, 0.0);
        assert!((semicircle_stieltjes(big).unwrap() * big - 1.0).norm() < 1e-9);
        for z in [c(3.0, 0.0), c(0.5, 0.1), c(-2.5, -1.0), c(0.0, 3.0)] {
            let h = semicircle_stieltjes(z).unwrap();
            let lhs = 1.0 - h * h;
            let rhs = h * sqrt_z2_minus_4(z).unwrap();
            assert!((lhs - rhs).norm() < 1e-12, "z={z}");
        }
        assert!(semicircle_stieltjes(c(1.0, 0.0)).is_err());
        assert!(semicircle_stieltjes(c(-2.0, 0.0)).is_err());
    }

    #[test]
    fn herglotz_sign() {
        for z in [c(0.3, 0.5), c(-1.0, 1e-3), c(4.0, -2.0), c(-0.5, -0.01)] {
            let h = semicircle_stieltjes(z).unwrap();
            assert!(h.im * z.im < 0.0, "z={z}");
        }
    }

    #[test]
    fn nu_transform_vanishes_for_gue() {
        let gue = EnsembleParams::gue();
        for z in [c(3.0, 0.0), c(0.1, 0.2), c(-5.0, 4.0)] {
            assert!(nu_stieltjes(z, &gue).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn nu_transform_matches_quadrature() {
        let nu = SignedMeasureNu::new(&EnsembleParams::goe());
        let z = c(3.0, 0.0);
        let closed = nu.stieltjes(z).unwrap();
        let quad = nu.quadrature_stieltjes(z, 400);
        assert!((closed - quad).norm() < 1e-9);
    }

    #[test]
    fn moment_expansion_helpers_agree() {
        let moments = [0.0, 0.0, 1.0, 0.0, 5.0];
        let even = [0.0, 1.0, 5.0];
        let z = c(3.0, 1.0);
        assert!(
            (stieltjes_from_moments(z, &moments) - stieltjes_from_even_moments(z, &even)).norm()
                < 1e-15
        );
    }
}
