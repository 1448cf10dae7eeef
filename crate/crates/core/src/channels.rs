//! Qubit states and channels in Bloch (affine Pauli-transfer) form.
//!
//! A state is `ρ = ½(I + r·σ)`; a channel acts as `r ↦ A·r + b`, which keeps
//! the trace fixed by construction. Semigroups `exp(𝓛t)` are handled in the
//! 4×4 transfer space acting on `(1, r₁, r₂, r₃)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{matrix_exp_real, pauli, ComplexMatrix, RealMatrix4, HERMITIAN_TOL, I, ZERO};

/// Slack on `‖r‖ ≤ 1` and on state positivity.
pub const POSITIVITY_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector(pub [f64; 3]);

impl BlochVector {
    pub const ORIGIN: Self = Self([0.0; 3]);

    pub fn new(r1: f64, r2: f64, r3: f64) -> Self {
        Self([r1, r2, r3])
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (0..3)
            .map(|k| (self.0[k] - other.0[k]).abs())
            .fold(0.0, f64::max)
    }
}

/// A validated 2×2 density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix2 {
    m: ComplexMatrix,
}

impl DensityMatrix2 {
    /// Checks Hermiticity, unit trace and positivity.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        m.expect_dim(2)?;
        if !m.is_finite() {
            return Err(Error::NonFinite("density matrix"));
        }
        let defect = m.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = m.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        let min = m.hermitian_eigenvalues(false)?.min();
        if min < -POSITIVITY_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { m })
    }

    /// `½(I + r·σ)`.
    pub fn from_bloch(r: &BlochVector) -> Result<Self> {
        let norm = r.norm();
        if !norm.is_finite() {
            return Err(Error::NonFinite("Bloch vector"));
        }
        if norm > 1.0 + POSITIVITY_TOL {
            return Err(Error::UnphysicalBloch(norm));
        }
        let [x, y, z] = r.0;
        let m = ComplexMatrix::from_rows([
            [
                Complex64::new(0.5 * (1.0 + z), 0.0),
                Complex64::new(0.5 * x, -0.5 * y),
            ],
            [
                Complex64::new(0.5 * x, 0.5 * y),
                Complex64::new(0.5 * (1.0 - z), 0.0),
            ],
        ]);
        Ok(Self { m })
    }

    /// Pure state `|ψ⟩⟨ψ|`; the amplitudes are normalized first.
    pub fn from_pure(psi: [Complex64; 2]) -> Result<Self> {
        let n = (psi[0].norm_sqr() + psi[1].norm_sqr()).sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidParameter(
                "state vector must be nonzero and finite".into(),
            ));
        }
        Self::new(ComplexMatrix::projector(&[psi[0] / n, psi[1] / n]))
    }

    pub fn maximally_mixed() -> Self {
        Self {
            m: ComplexMatrix::identity(2).scale_real(0.5),
        }
    }

    /// `r_k = tr(σ_k ρ)`.
    pub fn bloch(&self) -> BlochVector {
        let m = &self.m;
        BlochVector([
            2.0 * m[(0, 1)].re,
            -2.0 * m[(0, 1)].im,
            (m[(0, 0)] - m[(1, 1)]).re,
        ])
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.m
    }
}

pub fn density_from_bloch(r: &BlochVector) -> Result<DensityMatrix2> {
    DensityMatrix2::from_bloch(r)
}

pub fn bloch_from_density(rho: &DensityMatrix2) -> BlochVector {
    rho.bloch()
}

/// Affine qubit channel `r ↦ a·r + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitChannel {
    pub a: [[f64; 3]; 3],
    pub b: [f64; 3],
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "time must be >= 0, got {t}"
        )));
    }
    Ok(())
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "{name} must be > 0, got {x}"
        )));
    }
    Ok(())
}

impl QubitChannel {
    pub fn new(a: [[f64; 3]; 3], b: [f64; 3]) -> Self {
        Self { a, b }
    }

    pub fn identity() -> Self {
        Self::diagonal([1.0; 3])
    }

    /// Unital channel with `a = diag(d)`.
    pub fn diagonal(d: [f64; 3]) -> Self {
        let mut a = [[0.0; 3]; 3];
        for k in 0..3 {
            a[k][k] = d[k];
        }
        Self { a, b: [0.0; 3] }
    }

    /// Isotropic depolarization: the Bloch vector shrinks as `e^{−t/τ}`.
    pub fn depolarizing(t: f64, tau: f64) -> Result<Self> {
        check_time(t)?;
        check_positive("tau", tau)?;
        let f = (-t / tau).exp();
        Ok(Self::diagonal([f, f, f]))
    }

    /// σ₃ dephasing: transverse components decay at rate `gamma`, `r₃` is kept.
    pub fn dephasing(t: f64, gamma: f64) -> Result<Self> {
        check_time(t)?;
        check_positive("gamma", gamma)?;
        let f = (-gamma * t).exp();
        Ok(Self::diagonal([f, f, 1.0]))
    }

    /// Dephasing generated by `−(1/τ)[σ₃,[σ₃,ρ]]`, i.e. transverse rate `4/τ`.
    pub fn dephasing_literal(t: f64, tau: f64) -> Result<Self> {
        check_positive("tau", tau)?;
        Self::dephasing(t, 4.0 / tau)
    }

    /// The semigroup map `exp(g·t)` read back in affine form.
    pub fn from_generator(g: &BlochGenerator, t: f64) -> Result<Self> {
        check_time(t)?;
        let e = matrix_exp_real(&g.0, t)?;
        let mut a = [[0.0; 3]; 3];
        let mut b = [0.0; 3];
        for i in 0..3 {
            b[i] = e.0[i + 1][0];
            for j in 0..3 {
                a[i][j] = e.0[i + 1][j + 1];
            }
        }
        Ok(Self { a, b })
    }

    pub fn map_bloch(&self, r: &BlochVector) -> BlochVector {
        let mut out = self.b;
        for i in 0..3 {
            for j in 0..3 {
                out[i] += self.a[i][j] * r.0[j];
            }
        }
        BlochVector(out)
    }

    /// Applies the channel; fails if the image is not a positive state.
    pub fn apply(&self, rho: &DensityMatrix2) -> Result<DensityMatrix2> {
        let r = self.map_bloch(&rho.bloch());
        let norm = r.norm();
        if norm > 1.0 + POSITIVITY_TOL {
            return Err(Error::NotPositive(0.5 * (1.0 - norm)));
        }
        DensityMatrix2::from_bloch(&r)
    }

    /// Linear extension to an arbitrary 2×2 operator `X`.
    ///
    /// With `x₀ = tr X` and `x_k = tr(σ_k X)`, the image is
    /// `½(x₀ I + Σ_i (Σ_k a_ik x_k + b_i x₀) σ_i)`.
    pub fn apply_to_operator(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        x.expect_dim(2)?;
        let x0 = x.trace();
        let xs: Vec<Complex64> = (1..=3).map(|k| (&pauli(k) * x).trace()).collect();
        let mut out = ComplexMatrix::identity(2).scale(x0);
        for i in 0..3 {
            let coeff: Complex64 =
                (0..3).map(|k| xs[k] * self.a[i][k]).sum::<Complex64>() + x0 * self.b[i];
            out = &out + &pauli(i + 1).scale(coeff);
        }
        Ok(out.scale_real(0.5))
    }

    /// `second ∘ first`.
    pub fn compose(second: &Self, first: &Self) -> Self {
        let mut a = [[0.0; 3]; 3];
        let mut b = second.b;
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] = (0..3).map(|k| second.a[i][k] * first.a[k][j]).sum();
                b[i] += second.a[i][j] * first.b[j];
            }
        }
        Self { a, b }
    }

    /// Largest output Bloch norm over the six axis-aligned pure inputs `±e_k`.
    pub fn axis_bloch_norm(&self) -> f64 {
        let mut worst = 0.0_f64;
        for k in 0..3 {
            for s in [-1.0, 1.0] {
                let mut r = [0.0; 3];
                r[k] = s;
                worst = worst.max(self.map_bloch(&BlochVector(r)).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let da = self
            .a
            .iter()
            .flatten()
            .zip(other.a.iter().flatten())
            .map(|(x, y)| (x - y).abs());
        let db = self.b.iter().zip(&other.b).map(|(x, y)| (x - y).abs());
        da.chain(db).fold(0.0, f64::max)
    }
}

pub fn depolarizing_channel(t: f64, tau: f64) -> Result<QubitChannel> {
    QubitChannel::depolarizing(t, tau)
}

pub fn dephasing_channel(t: f64, gamma: f64) -> Result<QubitChannel> {
    QubitChannel::dephasing(t, gamma)
}

pub fn dephasing_channel_literal(t: f64, tau: f64) -> Result<QubitChannel> {
    QubitChannel::dephasing_literal(t, tau)
}

pub fn channel_from_generator(g: &BlochGenerator, t: f64) -> Result<QubitChannel> {
    QubitChannel::from_generator(g, t)
}

pub fn apply_channel(ch: &QubitChannel, rho: &DensityMatrix2) -> Result<DensityMatrix2> {
    ch.apply(rho)
}

pub fn compose(second: &QubitChannel, first: &QubitChannel) -> QubitChannel {
    QubitChannel::compose(second, first)
}

/// Jump operator `L = c₀I + c₁σ₁ + c₂σ₂ + c₃σ₃` with a nonnegative rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub rate: f64,
    pub coeffs: [Complex64; 4],
}

impl Jump {
    /// `L = σ_k` (k ∈ 1..=3).
    pub fn pauli(k: usize, rate: f64) -> Self {
        let mut coeffs = [ZERO; 4];
        coeffs[k] = Complex64::new(1.0, 0.0);
        Self { rate, coeffs }
    }

    pub fn operator(&self) -> ComplexMatrix {
        (0..4).fold(ComplexMatrix::zeros(2), |acc, k| {
            &acc + &pauli(k).scale(self.coeffs[k])
        })
    }
}

/// Semigroup generator: `H = ½h·σ` plus weighted jumps.
///
/// `dρ/dt = −i[H,ρ] + Σ rate·(LρL† − ½{L†L, ρ})`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LindbladGenerator {
    h: [f64; 3],
    jumps: Vec<Jump>,
}

impl LindbladGenerator {
    pub fn new(h: [f64; 3], jumps: Vec<Jump>) -> Result<Self> {
        if h.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("Hamiltonian"));
        }
        for j in &jumps {
            if !j.rate.is_finite()
                || j.coeffs
                    .iter()
                    .any(|c| !c.re.is_finite() || !c.im.is_finite())
            {
                return Err(Error::NonFinite("jump operator"));
            }
            if j.rate < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "jump rate {} is negative",
                    j.rate
                )));
            }
        }
        Ok(Self { h, jumps })
    }

    /// Pauli jumps at rate `1/(4τ)` each; the Bloch vector decays as `e^{−t/τ}`.
    pub fn depolarizing(tau: f64) -> Result<Self> {
        check_positive("tau", tau)?;
        let rate = 0.25 / tau;
        Self::new([0.0; 3], (1..=3).map(|k| Jump::pauli(k, rate)).collect())
    }

    /// σ₃ jump at rate `γ/2`; transverse components decay at rate `γ`.
    pub fn dephasing(gamma: f64) -> Result<Self> {
        check_positive("gamma", gamma)?;
        Self::new([0.0; 3], vec![Jump::pauli(3, 0.5 * gamma)])
    }

    /// `−(1/τ)[σ₃,[σ₃,ρ]]`, which is a σ₃ jump at rate `2/τ`.
    pub fn dephasing_literal(tau: f64) -> Result<Self> {
        check_positive("tau", tau)?;
        Self::new([0.0; 3], vec![Jump::pauli(3, 2.0 / tau)])
    }

    pub fn hamiltonian_vector(&self) -> [f64; 3] {
        self.h
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn hamiltonian(&self) -> ComplexMatrix {
        (0..3).fold(ComplexMatrix::zeros(2), |acc, k| {
            &acc + &pauli(k + 1).scale_real(0.5 * self.h[k])
        })
    }

    /// Right-hand side of the master equation for any 2×2 operator.
    pub fn rhs(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let h = self.hamiltonian();
        let comm = &(&h * rho) - &(rho * &h);
        let mut out = comm.scale(-I);
        for j in &self.jumps {
            let l = j.operator();
            let ld = l.adjoint();
            let ldl = &ld * &l;
            let sandwich = &(&l * rho) * &ld;
            let anti = &(&ldl * rho) + &(rho * &ldl);
            let d = &sandwich - &anti.scale_real(0.5);
            out = &out + &d.scale_real(j.rate);
        }
        out
    }

    /// Image of the generator in transfer space acting on `(1, r)`.
    pub fn to_bloch(&self) -> BlochGenerator {
        // ρ = ½(I + Σ r_k σ_k) ⇒ dr_i/dt = ½tr(σ_i 𝓛(I)) + Σ_k ½tr(σ_i 𝓛(σ_k)) r_k
        let images: Vec<ComplexMatrix> = (0..4).map(|k| self.rhs(&pauli(k))).collect();
        let mut g = RealMatrix4::ZERO;
        for i in 1..4 {
            let s = pauli(i);
            for (k, img) in images.iter().enumerate() {
                g.0[i][k] = 0.5 * (&s * img).trace().re;
            }
        }
        BlochGenerator(g)
    }
}

pub fn bloch_generator_from_lindblad(gen: &LindbladGenerator) -> BlochGenerator {
    gen.to_bloch()
}

/// Generator in transfer space; its first row is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochGenerator(RealMatrix4);

impl BlochGenerator {
    pub fn new(g: RealMatrix4) -> Result<Self> {
        if !g.is_finite() {
            return Err(Error::NonFinite("Bloch generator"));
        }
        if g.0[0].iter().any(|&x| x != 0.0) {
            return Err(Error::InvalidParameter(
                "first row of a Bloch generator must be zero".into(),
            ));
        }
        Ok(Self(g))
    }

    pub fn zero() -> Self {
        Self(RealMatrix4::ZERO)
    }

    pub fn matrix(&self) -> &RealMatrix4 {
        &self.0
    }
}
