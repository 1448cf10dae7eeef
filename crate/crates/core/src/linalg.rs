//! Small dense complex-matrix kernel.
//!
//! Everything here is sized for qubits and qubit pairs (dimension 2 and 4).
//! Bipartite matrices use the Kronecker block convention
//! `(a ⊗ b)[(i·db + k), (j·db + l)] = a[i][j]·b[k][l]`: the first factor is
//! the slow index. Partial transpose and partial trace rely on it.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `‖m − m†‖_max` accepted by the eigensolver.
pub const HERMITIAN_TOL: f64 = 1e-10;

const JACOBI_OFF_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::BadShape {
                dim,
                len: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from real entries, row-major.
    pub fn from_real(dim: usize, data: &[f64]) -> Result<Self> {
        Self::new(dim, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Builds a matrix from nested rows. Panics if the rows are ragged.
    pub fn from_rows<const N: usize>(rows: [[Complex64; N]; N]) -> Self {
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self { dim: N, data }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Outer product `|v⟩⟨v|`.
    pub fn projector(v: &[Complex64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product with the first factor as the slow index.
    pub fn tensor_product(&self, other: &Self) -> Self {
        let (na, nb) = (self.dim, other.dim);
        let mut out = Self::zeros(na * nb);
        for i in 0..na {
            for j in 0..na {
                let aij = self[(i, j)];
                for k in 0..nb {
                    for l in 0..nb {
                        out[(i * nb + k, j * nb + l)] = aij * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Transpose on the second qubit of a 2⊗2 matrix.
    pub fn partial_transpose(&self) -> Result<Self> {
        self.expect_dim(4)?;
        let mut out = Self::zeros(4);
        for i in 0..2 {
            for k in 0..2 {
                for j in 0..2 {
                    for l in 0..2 {
                        out[(2 * i + k, 2 * j + l)] = self[(2 * i + l, 2 * j + k)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Trace over the second qubit of a 2⊗2 matrix.
    pub fn partial_trace_second(&self) -> Result<Self> {
        self.expect_dim(4)?;
        let mut out = Self::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                out[(i, j)] = (0..2).map(|k| self[(2 * i + k, 2 * j + k)]).sum();
            }
        }
        Ok(out)
    }

    /// Largest entry magnitude of `self − self†`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `max_ij |self_ij − other_ij|`. Panics on dimension mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn hermitian_eigenvalues(&self, want_vectors: bool) -> Result<HermitianSpectrum> {
        hermitian_eigenvalues(self, want_vectors)
    }

    pub fn trace_norm(&self) -> Result<f64> {
        trace_norm(self)
    }

    pub(crate) fn expect_dim(&self, expected: usize) -> Result<()> {
        if self.dim != expected {
            return Err(Error::WrongDimension {
                expected,
                got: self.dim,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on dimension mismatch; use [`ComplexMatrix::multiply`] for a fallible product.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.multiply(rhs).expect("dimension mismatch")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:>+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Pauli matrix σ_k for k ∈ {1, 2, 3}; k = 0 gives the identity.
pub fn pauli(k: usize) -> ComplexMatrix {
    match k {
        0 => ComplexMatrix::identity(2),
        1 => ComplexMatrix::from_rows([[ZERO, ONE], [ONE, ZERO]]),
        2 => ComplexMatrix::from_rows([[ZERO, -I], [I, ZERO]]),
        3 => ComplexMatrix::from_rows([[ONE, ZERO], [ZERO, -ONE]]),
        _ => panic!("Pauli index {k} out of range 0..=3"),
    }
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` pairs with `eigenvalues[k]`; present only when requested.
    pub eigenvectors: Option<Vec<Vec<Complex64>>>,
}

impl HermitianSpectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// `Σ λ_k v_k v_k†`, or `None` if eigenvectors were not requested.
    pub fn reconstruct(&self) -> Option<ComplexMatrix> {
        let vecs = self.eigenvectors.as_ref()?;
        let n = self.eigenvalues.len();
        let mut out = ComplexMatrix::zeros(n);
        for (lambda, v) in self.eigenvalues.iter().zip(vecs) {
            let p = ComplexMatrix::projector(v).scale_real(*lambda);
            out = &out + &p;
        }
        Some(out)
    }
}

/// Cyclic complex Jacobi diagonalization.
///
/// The input is symmetrized as `(m + m†)/2` after the Hermiticity check, so
/// round-off from upstream arithmetic does not leak into the spectrum.
pub fn hermitian_eigenvalues(m: &ComplexMatrix, want_vectors: bool) -> Result<HermitianSpectrum> {
    if !m.is_finite() {
        return Err(Error::NonFinite("eigensolver input"));
    }
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let n = m.dim();
    let mut a = (m + &m.adjoint()).scale_real(0.5);
    let mut v = ComplexMatrix::identity(n);

    let mut sweeps = 0;
    while !diagonal_enough(&a) {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence(sweeps));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                if !negligible(&a, p, q) {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = want_vectors.then(|| {
        order
            .iter()
            .map(|&col| (0..n).map(|row| v[(row, col)]).collect())
            .collect()
    });
    Ok(HermitianSpectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// `a[p][q]` is below the relative threshold `ε·√|a_pp·a_qq|` (or underflows).
///
/// The relative test lets the sweep resolve eigenvalues far smaller than the
/// matrix norm, e.g. the `−e^{−γt}/2` partial-transpose eigenvalue of a
/// long-dephased Choi matrix.
fn negligible(a: &ComplexMatrix, p: usize, q: usize) -> bool {
    let apq = a[(p, q)].norm();
    apq < f64::MIN_POSITIVE || apq <= f64::EPSILON * (a[(p, p)].re * a[(q, q)].re).abs().sqrt()
}

fn diagonal_enough(a: &ComplexMatrix) -> bool {
    let n = a.dim();
    let fro_off: f64 = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| a[(i, j)].norm_sqr())
        .sum::<f64>()
        .sqrt();
    fro_off < JACOBI_OFF_TOL && (0..n).all(|p| ((p + 1)..n).all(|q| negligible(a, p, q)))
}

/// One Jacobi step annihilating `a[p][q]`: `a ← U† a U`, `v ← v U`.
///
/// `U = D·R` where `D` strips the phase of `a[p][q]` and `R` is the real
/// plane rotation of the resulting real-symmetric 2×2 block.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag < f64::MIN_POSITIVE {
        return;
    }
    let phase = apq / mag;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // Non-identity entries of U.
    let upp = Complex64::new(c, 0.0);
    let upq = Complex64::new(s, 0.0);
    let uqp = -phase.conj() * s;
    let uqq = phase.conj() * c;

    let n = a.dim();
    // a ← a U (columns p, q)
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * upp + akq * uqp;
        a[(k, q)] = akp * upq + akq * uqq;
    }
    // a ← U† a (rows p, q)
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
        a[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * upp + vkq * uqp;
        v[(k, q)] = vkp * upq + vkq * uqq;
    }
}

/// `Σ |λ_k|` for a Hermitian matrix.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m, false)?
        .eigenvalues
        .iter()
        .map(|x| x.abs())
        .sum())
}

/// Real 4×4 matrix acting on `(1, r₁, r₂, r₃)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealMatrix4(pub [[f64; 4]; 4]);

impl RealMatrix4 {
    pub const ZERO: Self = Self([[0.0; 4]; 4]);

    pub fn identity() -> Self {
        let mut m = Self::ZERO;
        for i in 0..4 {
            m.0[i][i] = 1.0;
        }
        m
    }

    pub fn diag(d: [f64; 4]) -> Self {
        let mut m = Self::ZERO;
        for i in 0..4 {
            m.0[i][i] = d[i];
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::ZERO;
        for i in 0..4 {
            for k in 0..4 {
                let x = self.0[i][k];
                for j in 0..4 {
                    out.0[i][j] += x * other.0[k][j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: [f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for i in 0..4 {
            out[i] = (0..4).map(|j| self.0[i][j] * v[j]).sum();
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = *self;
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] += other.0[i][j];
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|x| *x *= s);
        out
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        self.0
            .iter()
            .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }
}

/// `exp(g·t)` by scaling and squaring around a truncated Taylor series.
pub fn matrix_exp_real(g: &RealMatrix4, t: f64) -> Result<RealMatrix4> {
    if !t.is_finite() {
        return Err(Error::NonFinite("exponent time"));
    }
    if !g.is_finite() {
        return Err(Error::NonFinite("generator"));
    }
    let x = g.scale(t);
    let norm = x.inf_norm();
    let squarings = if norm > 0.5 {
        (norm.log2().ceil() as i32 + 1).max(0) as u32
    } else {
        0
    };
    let y = x.scale(0.5_f64.powi(squarings as i32));

    // ‖y‖ ≤ 1/2 here, so the series converges fast.
    let mut sum = RealMatrix4::identity();
    let mut term = RealMatrix4::identity();
    for k in 1..=40 {
        term = term.mul(&y).scale(1.0 / k as f64);
        sum = sum.add(&term);
        if term.inf_norm() < 1e-16 * sum.inf_norm() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.mul(&sum);
    }
    if !sum.is_finite() {
        return Err(Error::NonFinite("matrix exponential"));
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sigma_dot_sigma() -> ComplexMatrix {
        (1..=3)
            .map(|k| pauli(k).tensor_product(&pauli(k)))
            .fold(ComplexMatrix::zeros(4), |acc, m| &acc + &m)
    }

    fn singlet() -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::projector(&[ZERO, c(s, 0.0), c(-s, 0.0), ZERO])
    }

    fn hermitian_from(entries: &[f64]) -> ComplexMatrix {
        // 16 reals for the upper triangle (re, im) plus diagonal.
        let mut m = ComplexMatrix::zeros(4);
        let mut it = entries.iter().copied();
        for i in 0..4 {
            m[(i, i)] = c(it.next().unwrap(), 0.0);
            for j in (i + 1)..4 {
                let z = c(it.next().unwrap(), it.next().unwrap());
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(
            ComplexMatrix::identity(2).adjoint(),
            ComplexMatrix::identity(2)
        );
        assert_eq!(pauli(2).adjoint(), pauli(2));
        let raise = ComplexMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let lower = ComplexMatrix::from_real(2, &[0.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(raise.adjoint(), lower);
    }

    #[test]
    fn pauli_algebra() {
        assert_eq!(&pauli(1) * &pauli(1), ComplexMatrix::identity(2));
        assert_eq!(&pauli(1) * &pauli(2), pauli(3).scale(I));
        let m = hermitian_from(&[
            0.3, 1.0, -2.0, 0.5, 0.1, 0.7, 0.2, -0.4, 2.0, 1.5, -1.1, 0.0, 0.6, 3.0, 0.9, 0.8,
        ]);
        assert_eq!(&ComplexMatrix::identity(4) * &m, m);
        assert!(matches!(
            pauli(1).multiply(&m),
            Err(Error::DimensionMismatch { left: 2, right: 4 })
        ));
    }

    #[test]
    fn new_rejects_bad_shape() {
        assert!(ComplexMatrix::new(2, vec![ZERO; 3]).is_err());
        assert!(ComplexMatrix::new(0, vec![]).is_err());
    }

    #[test]
    fn tensor_product_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.tensor_product(&i2), ComplexMatrix::identity(4));
        let zz = pauli(3).tensor_product(&pauli(3));
        let expected = ComplexMatrix::from_real(
            4,
            &[
                1., 0., 0., 0., 0., -1., 0., 0., 0., 0., -1., 0., 0., 0., 0., 1.,
            ],
        )
        .unwrap();
        assert_eq!(zz, expected);
    }

    #[test]
    fn sigma_dot_sigma_spectrum() {
        let spec = sigma_dot_sigma().hermitian_eigenvalues(false).unwrap();
        let expected = [-3.0, 1.0, 1.0, 1.0];
        for (got, want) in spec.eigenvalues.iter().zip(expected) {
            assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        }
    }

    #[test]
    fn partial_transpose_examples() {
        let mixed = ComplexMatrix::identity(4).scale_real(0.25);
        assert_eq!(mixed.partial_transpose().unwrap(), mixed);

        let pt = singlet().partial_transpose().unwrap();
        let spec = pt.hermitian_eigenvalues(false).unwrap();
        assert!((spec.min() + 0.5).abs() < 1e-14);
        assert!((trace_norm(&pt).unwrap() - 2.0).abs() < 1e-13);

        assert!(matches!(
            pauli(1).partial_transpose(),
            Err(Error::WrongDimension {
                expected: 4,
                got: 2
            })
        ));
    }

    #[test]
    fn partial_trace_examples() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(
            singlet()
                .partial_trace_second()
                .unwrap()
                .max_abs_diff(&half)
                < 1e-15
        );
        assert_eq!(
            ComplexMatrix::identity(4).partial_trace_second().unwrap(),
            ComplexMatrix::identity(2).scale_real(2.0)
        );
        let a = ComplexMatrix::from_rows([[c(0.2, 0.0), c(0.1, -0.3)], [c(0.1, 0.3), c(0.8, 0.0)]]);
        let b = ComplexMatrix::from_rows([[c(0.6, 0.0), c(0.0, 0.2)], [c(0.0, -0.2), c(0.4, 0.0)]]);
        let ab = a.tensor_product(&b);
        assert!(ab.partial_trace_second().unwrap().max_abs_diff(&a) < 1e-15);
        assert!(pauli(3).partial_trace_second().is_err());
    }

    #[test]
    fn eigenvalue_examples() {
        let spec = pauli(3).hermitian_eigenvalues(true).unwrap();
        assert_eq!(spec.eigenvalues, vec![-1.0, 1.0]);

        // Werner matrix (I − σ·σ)/4 at f = 1: {0, 0, 0, 1}.
        let werner = (&ComplexMatrix::identity(4) - &sigma_dot_sigma()).scale_real(0.25);
        let spec = werner.hermitian_eigenvalues(false).unwrap();
        for (got, want) in spec.eigenvalues.iter().zip([0.0, 0.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn eigensolver_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            m.hermitian_eigenvalues(false),
            Err(Error::NotHermitian(_))
        ));
        let mut nan = ComplexMatrix::identity(2);
        nan[(0, 0)] = c(f64::NAN, 0.0);
        assert!(matches!(
            nan.hermitian_eigenvalues(false),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn eigensolver_handles_degenerate_and_diagonal() {
        let spec = ComplexMatrix::identity(4)
            .hermitian_eigenvalues(true)
            .unwrap();
        assert_eq!(spec.eigenvalues, vec![1.0; 4]);
        assert!(
            spec.reconstruct()
                .unwrap()
                .max_abs_diff(&ComplexMatrix::identity(4))
                < 1e-15
        );
    }

    #[test]
    fn trace_norm_examples() {
        let rho =
            ComplexMatrix::from_rows([[c(0.7, 0.0), c(0.1, 0.2)], [c(0.1, -0.2), c(0.3, 0.0)]]);
        assert!((trace_norm(&rho).unwrap() - 1.0).abs() < 1e-14);
        assert!((trace_norm(&pauli(3)).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exp_examples() {
        assert_eq!(
            matrix_exp_real(&RealMatrix4::ZERO, 3.0).unwrap(),
            RealMatrix4::identity()
        );

        let tau = 1.7;
        let g = RealMatrix4::diag([0.0, -1.0 / tau, -1.0 / tau, -1.0 / tau]);
        let e = matrix_exp_real(&g, tau).unwrap();
        let em1 = (-1.0_f64).exp();
        let want = RealMatrix4::diag([1.0, em1, em1, em1]);
        for i in 0..4 {
            let rel = (e.0[i][i] - want.0[i][i]).abs() / want.0[i][i];
            assert!(rel <= 1e-12, "rel err {rel}");
        }
        assert!(e.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn exp_relative_accuracy_on_large_diagonal() {
        let g = RealMatrix4::diag([0.0, -1.0, -3.0, 2.5]);
        for &t in &[0.01, 0.5, 1.0, 7.3, 20.0] {
            let e = matrix_exp_real(&g, t).unwrap();
            for i in 0..4 {
                let want = (g.0[i][i] * t).exp();
                let rel = (e.0[i][i] - want).abs() / want;
                assert!(rel <= 1e-12, "t={t} i={i} rel={rel:e}");
            }
        }
    }

    #[test]
    fn exp_rejects_non_finite() {
        assert!(matrix_exp_real(&RealMatrix4::identity(), f64::NAN).is_err());
        let mut g = RealMatrix4::ZERO;
        g.0[1][2] = f64::INFINITY;
        assert!(matrix_exp_real(&g, 1.0).is_err());
    }

    #[test]
    fn exp_rotation_generator() {
        // Rotation about z at unit rate: exp yields cos/sin block.
        let mut g = RealMatrix4::ZERO;
        g.0[1][2] = -1.0;
        g.0[2][1] = 1.0;
        let t = 2.3;
        let e = matrix_exp_real(&g, t).unwrap();
        assert!((e.0[1][1] - t.cos()).abs() < 1e-14);
        assert!((e.0[2][1] - t.sin()).abs() < 1e-14);
        assert!((e.0[3][3] - 1.0).abs() < 1e-15);
    }

    fn hermitian_strategy() -> impl Strategy<Value = ComplexMatrix> {
        prop::collection::vec(-2.0f64..2.0, 16).prop_map(|v| hermitian_from(&v))
    }

    fn real4_strategy() -> impl Strategy<Value = RealMatrix4> {
        prop::collection::vec(-2.0f64..2.0, 16).prop_map(|v| {
            let mut m = RealMatrix4::ZERO;
            for (k, x) in v.into_iter().enumerate() {
                m.0[k / 4][k % 4] = x;
            }
            m
        })
    }

    proptest! {
        #[test]
        fn eigen_reconstruction_and_orthonormality(m in hermitian_strategy()) {
            let spec = m.hermitian_eigenvalues(true).unwrap();
            prop_assert!(spec.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            let rebuilt = spec.reconstruct().unwrap();
            prop_assert!(rebuilt.max_abs_diff(&m) < 1e-12, "reconstruction {:e}", rebuilt.max_abs_diff(&m));
            let vecs = spec.eigenvectors.as_ref().unwrap();
            for (a, va) in vecs.iter().enumerate() {
                for (b, vb) in vecs.iter().enumerate() {
                    let ip: Complex64 = va.iter().zip(vb).map(|(x, y)| x.conj() * y).sum();
                    let want = if a == b { 1.0 } else { 0.0 };
                    prop_assert!((ip - want).norm() < 1e-12);
                }
            }
            let sum: f64 = spec.eigenvalues.iter().sum();
            prop_assert!((sum - m.trace().re).abs() < 1e-12);
        }

        #[test]
        fn partial_transpose_involution_and_trace(m in hermitian_strategy()) {
            let pt = m.partial_transpose().unwrap();
            prop_assert_eq!(pt.partial_transpose().unwrap(), m.clone());
            for i in 0..4 {
                prop_assert_eq!(pt[(i, i)], m[(i, i)]);
            }
            prop_assert_eq!(pt.hermiticity_defect(), 0.0);
        }

        #[test]
        fn tensor_trace_is_product(a in hermitian_strategy(), b in hermitian_strategy()) {
            let a2 = a.partial_trace_second().unwrap();
            let b2 = b.partial_trace_second().unwrap();
            let ab = a2.tensor_product(&b2);
            prop_assert!((ab.trace() - a2.trace() * b2.trace()).norm() < 1e-13);
        }

        #[test]
        fn exp_semigroup(g in real4_strategy(), t1 in 0.0f64..1.5, t2 in 0.0f64..1.5) {
            let lhs = matrix_exp_real(&g, t1).unwrap().mul(&matrix_exp_real(&g, t2).unwrap());
            let rhs = matrix_exp_real(&g, t1 + t2).unwrap();
            let scale = rhs.inf_norm().max(1.0);
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-10 * scale, "{:e}", lhs.max_abs_diff(&rhs));
        }
    }
}
