//! Averaged characteristic polynomial `Q(x) = (1/r) Σ_v det(xI − Y_v)`.
//!
//! Each `Y_v` is PSD of rank at most `d_v`, so `det(xI − Y_v)` is
//! `x^{ρ − d_v} Π (x − μ_i)` over its nonzero eigenvalues. The average keeps a
//! common factor `x^{ρ − D}` (`D` the largest nonzero count) which is split
//! off exactly; only the degree-`D` cofactor goes through the companion
//! matrix. Without the split the high-multiplicity zero root would scatter
//! into a ring of spurious complex roots.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Eigenvalues at or below this are treated as exact zeros.
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-12;

/// Roots with `|imag|` at or below this count as real.
pub const REAL_ROOT_IMAG_TOL: f64 = 1e-8;

/// Relative residual below which a root's real part is accepted as a real
/// (numerically multiple) root even when its imaginary part is larger.
const MULTIPLE_ROOT_RESIDUAL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QPolynomial {
    /// Full degree `ρ`.
    pub degree: usize,
    /// Multiplicity of the exact factor `x^{ρ − D}`.
    pub zero_multiplicity: usize,
    /// Monic cofactor of degree `D`, highest power first.
    pub cofactor: Vec<f64>,
    /// Cofactor roots as `(re, im)`.
    pub roots: Vec<(f64, f64)>,
    pub max_real_root: Option<f64>,
    /// Sum of all `ρ` roots; by Vieta equals the average trace.
    pub root_sum: f64,
}

impl QPolynomial {
    /// Builds `Q` from each candidate's nonzero spectrum in a `rho`-dimensional space.
    pub fn from_spectra<'a>(spectra: impl IntoIterator<Item = &'a [f64]>, rho: usize) -> Self {
        let cleaned: Vec<Vec<f64>> = spectra
            .into_iter()
            .map(|s| s.iter().copied().filter(|&m| m > ZERO_EIGENVALUE_TOL).collect())
            .collect();
        let r = cleaned.len();
        let top = cleaned.iter().map(Vec::len).max().unwrap_or(0).min(rho);

        let mut cofactor = vec![0.0; top + 1];
        for spectrum in &cleaned {
            let poly = monic_from_roots(spectrum);
            // x^{top − len} · poly, aligned at the leading coefficient.
            for (i, c) in poly.iter().enumerate() {
                cofactor[i] += c;
            }
        }
        if r > 0 {
            for c in &mut cofactor {
                *c /= r as f64;
            }
        } else {
            cofactor[0] = 1.0;
        }

        let roots = companion_roots(&cofactor);
        let zero_multiplicity = rho - top;
        let root_sum = roots.iter().map(|z| z.0).sum();

        let mut max_real_root = (zero_multiplicity > 0).then_some(0.0);
        for &(re, im) in &roots {
            if im.abs() <= REAL_ROOT_IMAG_TOL || is_numerical_root(&cofactor, re) {
                max_real_root = Some(max_real_root.map_or(re, |m: f64| m.max(re)));
            }
        }
        Self { degree: rho, zero_multiplicity, cofactor, roots, max_real_root, root_sum }
    }

    /// Evaluates the full `Q(x) = x^{ρ−D} · cofactor(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.cofactor, x) * x.powi(self.zero_multiplicity as i32)
    }
}

/// Coefficients of `Π (x − μ)`, highest power first.
pub fn monic_from_roots(roots: &[f64]) -> Vec<f64> {
    let mut poly = vec![1.0];
    for &mu in roots {
        poly.push(0.0);
        for i in (1..poly.len()).rev() {
            poly[i] -= mu * poly[i - 1];
        }
    }
    poly
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
}

fn is_numerical_root(coeffs: &[f64], x: f64) -> bool {
    let scale: f64 = coeffs
        .iter()
        .rev()
        .enumerate()
        .map(|(k, c)| c.abs() * x.abs().powi(k as i32))
        .sum();
    horner(coeffs, x).abs() <= MULTIPLE_ROOT_RESIDUAL * scale.max(f64::MIN_POSITIVE)
}

/// Roots of a monic polynomial (highest power first) via companion-matrix eigenvalues.
pub fn companion_roots(monic: &[f64]) -> Vec<(f64, f64)> {
    let degree = monic.len().saturating_sub(1);
    if degree == 0 {
        return Vec::new();
    }
    let mut companion = DMatrix::zeros(degree, degree);
    for j in 0..degree {
        companion[(0, j)] = -monic[j + 1] / monic[0];
    }
    for i in 1..degree {
        companion[(i, i - 1)] = 1.0;
    }
    let mut roots: Vec<(f64, f64)> = companion
        .complex_eigenvalues()
        .iter()
        .map(|z| (z.re, z.im))
        .collect();
    roots.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    roots
}
