//! Hardy martingales on a discretized torus product `T_{N_1} x ... x T_{N_m}`.
//!
//! A function is in `H1_last` when its spectrum lies in the cone of nonzero
//! frequencies whose last nonzero entry is positive; equivalently each
//! `Δ_k f` is, for fixed `x_{<k}`, an analytic mean-zero polynomial in `x_k`.
//! On analytic functions the `H1(T)` norm coincides with the `L1` norm, and the
//! working `H1_last` norm is the `L1` norm of the square function.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtration::square_function_norm;
use crate::harmonics::{dft_forward, dft_inverse, GroupFunction, GroupSpec, MultiIndex, SpectrumTable};
use crate::rng::{complex_gaussian, seeded};

/// Relative size (against the largest coefficient) below which an off-cone
/// coefficient counts as zero.
pub const CONE_TOL: f64 = 1e-10;

pub fn require_torus(group: &GroupSpec) -> Result<()> {
    match group.torus_flags().iter().position(|&t| !t) {
        Some(i) => Err(Error::NotTorus { coordinate: i + 1 }),
        None => Ok(()),
    }
}

/// Finds the largest off-cone coefficient relative to the spectrum's scale.
fn off_cone_violation(spec: &SpectrumTable) -> Option<MultiIndex> {
    let scale = spec.raw().iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if scale == 0.0 {
        return None;
    }
    spec.iter()
        .filter(|(idx, _)| !idx.is_last_positive())
        .find(|(_, c)| c.iter().any(|z| z.norm() > CONE_TOL * scale))
        .map(|(idx, _)| idx)
}

pub fn is_hardy_last(f: &GroupFunction) -> Result<bool> {
    require_torus(f.group())?;
    Ok(off_cone_violation(&dft_forward(f)).is_none())
}

/// Zeroes every Fourier coefficient outside the `>_last` cone.
pub fn project_hardy_last(f: &GroupFunction) -> Result<GroupFunction> {
    require_torus(f.group())?;
    let mut spec = dft_forward(f);
    let g = spec.group().clone();
    let c = spec.channels();
    for (p, chunk) in spec.raw_mut().chunks_mut(c).enumerate() {
        if !g.index_at(p).is_last_positive() {
            chunk.fill(Complex64::new(0.0, 0.0));
        }
    }
    Ok(dft_inverse(&spec))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct H1LastNorm {
    /// `E (sum_k |Δ_k f|^2)^{1/2}`, the working norm.
    pub square_function: f64,
    /// Plain `E|f|`, carried for equivalence studies.
    pub l1: f64,
}

pub fn h1_last_norm(f: &GroupFunction) -> Result<H1LastNorm> {
    require_torus(f.group())?;
    if let Some(index) = off_cone_violation(&dft_forward(f)) {
        return Err(Error::NotHardy { index: index.entries().to_vec() });
    }
    Ok(H1LastNorm { square_function: square_function_norm(f), l1: f.l1_norm() })
}

fn check_degree(group: &GroupSpec, degree: usize) -> Result<()> {
    for i in 1..=group.depth() {
        let max = group.order(i) / 2;
        if degree > max {
            return Err(Error::DegreeTooLarge { degree, max });
        }
    }
    Ok(())
}

/// A random Hardy martingale `f = sum_k Δ_k` with
/// `Δ_k(x) = c_k(x_{<k}) * sum_{n=1..degree} a_{k,n} e(n x_k)`, all coefficients
/// independent standard complex Gaussians drawn from `seed`.
pub fn sample_hardy_martingale(group: &GroupSpec, degree: usize, seed: u64) -> Result<GroupFunction> {
    require_torus(group)?;
    check_degree(group, degree)?;
    let mut rng = seeded(seed);
    Ok(hardy_martingale_from_rng(group, degree, &mut rng))
}

pub(crate) fn hardy_martingale_from_rng<R: Rng + ?Sized>(group: &GroupSpec, degree: usize, rng: &mut R) -> GroupFunction {
    let mut values = vec![Complex64::new(0.0, 0.0); group.size()];
    if degree == 0 {
        return GroupFunction::scalar(group.clone(), values).expect("shape");
    }
    for k in 1..=group.depth() {
        let field: Vec<Complex64> = (0..group.prefix_size(k - 1)).map(|_| complex_gaussian(rng)).collect();
        let poly: Vec<Complex64> = (0..degree).map(|_| complex_gaussian(rng)).collect();
        let n_k = group.order(k);
        let psi: Vec<Complex64> = (0..n_k)
            .map(|t| {
                poly.iter()
                    .enumerate()
                    .map(|(j, a)| a * unit(((j + 1) * t) % n_k, n_k))
                    .sum()
            })
            .collect();
        let block = group.suffix_size(k);
        for (p, v) in values.iter_mut().enumerate() {
            let prefix = p / (block * n_k);
            let t = (p / block) % n_k;
            *v += field[prefix] * psi[t];
        }
    }
    GroupFunction::scalar(group.clone(), values).expect("shape")
}

fn unit(t: usize, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t as f64 / n as f64)
}

/// The `φ` factor of a `φ ⊗ ψ` probe, a function of `x_1..x_{k-1}`.
#[derive(Clone, Debug)]
pub enum PrefixKernel {
    One,
    /// `N_1 ... N_{k-1}` times the indicator of the identity: every Fourier
    /// coefficient equals 1 and the `L1` norm is 1.
    PointMass,
    /// Coefficients 1 on the box `|n_i| <= radius`.
    Dirichlet { radius: usize },
    /// Coefficients `prod_i (1 - |n_i| / (order + 1))` on `|n_i| <= order`.
    Fejer { order: usize },
    /// Explicit values on the prefix group.
    Values(GroupFunction),
}

/// `ψ(t) = sum_n c_n e(n t)` with every `n >= 1`.
#[derive(Clone, Debug, Default)]
pub struct AnalyticPolynomial {
    coeffs: Vec<(i64, Complex64)>,
}

impl AnalyticPolynomial {
    pub fn new(coeffs: Vec<(i64, Complex64)>) -> Result<Self> {
        if let Some(&(n, _)) = coeffs.iter().find(|(n, c)| *n <= 0 && c.norm() > 0.0) {
            return Err(Error::NotHardy { index: vec![n] });
        }
        Ok(AnalyticPolynomial { coeffs: coeffs.into_iter().filter(|(n, _)| *n > 0).collect() })
    }

    pub fn monomial(n: i64) -> Result<Self> {
        Self::new(vec![(n, Complex64::new(1.0, 0.0))])
    }

    /// `e((order+1) t) F_order(t)`: the Fejér kernel shifted onto frequencies
    /// `1..=2 order + 1`; its `L1` norm on the continuous torus is 1.
    pub fn shifted_fejer(order: usize) -> Self {
        let r = order as i64;
        let coeffs = (1..=2 * r + 1)
            .map(|n| (n, Complex64::new(1.0 - (n - r - 1).abs() as f64 / (r + 1) as f64, 0.0)))
            .collect();
        AnalyticPolynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[(i64, Complex64)] {
        &self.coeffs
    }
}

fn prefix_kernel(prefix: &GroupSpec, phi: &PrefixKernel) -> Result<GroupFunction> {
    let box_spectrum = |radius: usize, weight: &dyn Fn(i64) -> f64| -> Result<GroupFunction> {
        let mut spec = SpectrumTable::zeros(prefix.clone(), 1);
        for p in 0..prefix.size() {
            let idx = prefix.index_at(p);
            let w: f64 = (1..=prefix.depth())
                .map(|i| {
                    let n = idx.get(i);
                    if n.unsigned_abs() as usize <= radius {
                        weight(n)
                    } else {
                        0.0
                    }
                })
                .product();
            spec.raw_mut()[p] = Complex64::new(w, 0.0);
        }
        Ok(dft_inverse(&spec))
    };
    match phi {
        PrefixKernel::One => Ok(GroupFunction::scalar(prefix.clone(), vec![Complex64::new(1.0, 0.0); prefix.size()])?),
        PrefixKernel::PointMass => {
            let mut values = vec![Complex64::new(0.0, 0.0); prefix.size()];
            values[0] = Complex64::new(prefix.size() as f64, 0.0);
            GroupFunction::scalar(prefix.clone(), values)
        }
        PrefixKernel::Dirichlet { radius } => box_spectrum(*radius, &|_| 1.0),
        PrefixKernel::Fejer { order } => {
            let r = *order as f64;
            box_spectrum(*order, &|n| 1.0 - n.unsigned_abs() as f64 / (r + 1.0))
        }
        PrefixKernel::Values(f) => {
            if f.group() != prefix || f.channels() != 1 {
                return Err(Error::ShapeMismatch);
            }
            Ok(f.clone())
        }
    }
}

/// `x -> φ(x_1..x_{k-1}) ψ(x_k)` on the full group, constant in `x_{>k}`.
pub fn phi_psi_test_function(
    group: &GroupSpec,
    k: usize,
    phi: &PrefixKernel,
    psi: &AnalyticPolynomial,
) -> Result<GroupFunction> {
    require_torus(group)?;
    if k == 0 || k > group.depth() {
        return Err(Error::LevelOutOfRange { k, depth: group.depth() });
    }
    let (_, hi) = group.freq_range(k);
    if let Some(&(n, _)) = psi.coeffs.iter().find(|(n, _)| *n > hi) {
        return Err(Error::FrequencyOutOfRange { coordinate: k, value: n, lo: 1, hi });
    }
    let prefix = group.truncate(k - 1);
    let phi_values = prefix_kernel(&prefix, phi)?;
    let n_k = group.order(k);
    let psi_values: Vec<Complex64> = (0..n_k)
        .map(|t| {
            psi.coeffs
                .iter()
                .map(|&(n, c)| c * unit((n as usize * t) % n_k, n_k))
                .sum()
        })
        .collect();
    let block = group.suffix_size(k);
    let values = (0..group.size())
        .map(|p| phi_values.values()[p / (block * n_k)] * psi_values[(p / block) % n_k])
        .collect();
    GroupFunction::scalar(group.clone(), values)
}
