//! Bipartite analysis: Choi matrices, PPT verdicts, the disentanglement-time
//! search, the six-outcome measure-and-prepare form of the depolarizer, and
//! the Werner family reached from the singlet.
//!
//! In 2⊗2 a state is separable iff its partial transpose is positive, so the
//! PPT test on the Choi matrix decides entanglement breaking exactly.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channels::{BlochGenerator, BlochVector, DensityMatrix2, QubitChannel, POSITIVITY_TOL};
use crate::error::{Error, Result};
use crate::linalg::{pauli, trace_norm, ComplexMatrix, HERMITIAN_TOL, ONE, ZERO};

/// Multiple of machine epsilon used in the rounding bound of [`ppt_verdict`].
pub const ROUNDOFF_FACTOR: f64 = 64.0;
const TRACE_TOL: f64 = 1e-12;
const POVM_TOL: f64 = 1e-13;

/// Number of uniform probe times used to certify a single false→true onset.
pub const ONSET_SCAN_POINTS: usize = 64;

/// Seed used by [`verify_holevo_form`] for its random test states.
pub const VERIFY_SEED: u64 = 0x5EED_D10C_0003;

/// Which factor of a 2⊗2 system a local channel acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    First,
    Second,
}

/// `|Φ⁺⟩ = (|00⟩ + |11⟩)/√2` projector.
pub fn phi_plus() -> ComplexMatrix {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    ComplexMatrix::projector(&[s, ZERO, ZERO, s])
}

/// Singlet `(|01⟩ − |10⟩)/√2` projector.
pub fn singlet() -> ComplexMatrix {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    ComplexMatrix::projector(&[ZERO, s, -s, ZERO])
}

/// `Σ_k σ_k ⊗ σ_k`.
pub fn sigma_dot_sigma() -> ComplexMatrix {
    (1..=3).fold(ComplexMatrix::zeros(4), |acc, k| {
        &acc + &pauli(k).tensor_product(&pauli(k))
    })
}

/// Applies `ch` to one factor of a 4×4 operator, identity on the other.
pub fn apply_local(ch: &QubitChannel, m: &ComplexMatrix, factor: Factor) -> Result<ComplexMatrix> {
    m.expect_dim(4)?;
    let mut out = ComplexMatrix::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            let mut unit = ComplexMatrix::zeros(2);
            unit[(i, j)] = ONE;
            let image = ch.apply_to_operator(&unit)?;
            // m = Σ |i⟩⟨j| ⊗ B_ij (first) or Σ A_ij ⊗ |i⟩⟨j| (second)
            for k in 0..2 {
                for l in 0..2 {
                    let mut block = ComplexMatrix::zeros(2);
                    block[(k, l)] = ONE;
                    let (lhs, coeff) = match factor {
                        Factor::First => (image.tensor_product(&block), m[(2 * i + k, 2 * j + l)]),
                        Factor::Second => (block.tensor_product(&image), m[(2 * k + i, 2 * l + j)]),
                    };
                    out = &out + &lhs.scale(coeff);
                }
            }
        }
    }
    Ok(out)
}

/// Gaussian `G·G†/tr(G·G†)` with complex standard-normal entries.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let mut g = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            g[(i, j)] = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
    }
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    w.scale_real(1.0 / tr)
}

fn validate_density4(m: &ComplexMatrix) -> Result<()> {
    m.expect_dim(4)?;
    if !m.is_finite() {
        return Err(Error::NonFinite("two-qubit state"));
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
    Ok(())
}

/// `(id ⊗ Λ)|Φ⁺⟩⟨Φ⁺|`, trace-normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    m: ComplexMatrix,
}

impl ChoiMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.m.hermitian_eigenvalues(false)?.min())
    }
}

/// Fails with [`Error::NotCompletelyPositive`] when the Choi matrix has an
/// eigenvalue below `-1e-10`.
pub fn choi_of_channel(ch: &QubitChannel) -> Result<ChoiMatrix> {
    let m = apply_local(ch, &phi_plus(), Factor::Second)?;
    let min = m.hermitian_eigenvalues(false)?.min();
    if min < -POSITIVITY_TOL {
        return Err(Error::NotCompletelyPositive(min));
    }
    Ok(ChoiMatrix { m })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EBVerdict {
    pub is_entanglement_breaking: bool,
    pub min_pt_eigenvalue: f64,
    pub negativity: f64,
}

/// PPT test on a two-qubit density matrix.
///
/// Negative partial transpose is declared only when it is certified against
/// rounding: with `v` the computed eigenvector of the smallest eigenvalue of
/// `ρ^{T_B}`, the Rayleigh quotient `q = v†ρ^{T_B}v` is an upper bound on that
/// eigenvalue, so `q < −ROUNDOFF_FACTOR·ε·Σ|v_i||ρ^{T_B}_ij||v_j|` proves a
/// negative eigenvalue. Anything else, including the exact boundary, is
/// reported PPT with zero negativity.
///
/// When NPT is certified, negativity is the magnitude of the (single, in
/// 2⊗2) negative eigenvalue, i.e. `(‖ρ^{T_B}‖₁ − 1)/2` without the
/// cancellation of subtracting 1.
pub fn ppt_verdict(m: &ComplexMatrix) -> Result<EBVerdict> {
    validate_density4(m)?;
    let pt = m.partial_transpose()?;
    let spec = pt.hermitian_eigenvalues(true)?;
    let min = spec.min();
    let v = &spec.eigenvectors.as_ref().expect("requested eigenvectors")[0];

    let mut q = ZERO;
    let mut magnitude = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            q += v[i].conj() * pt[(i, j)] * v[j];
            magnitude += v[i].norm() * pt[(i, j)].norm() * v[j].norm();
        }
    }
    let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let quotient = q.re / norm_sq;
    let bound = ROUNDOFF_FACTOR * f64::EPSILON * magnitude / norm_sq;

    let certified_npt = quotient < -bound;
    let negativity = if certified_npt {
        spec.eigenvalues
            .iter()
            .filter(|&&x| x < 0.0)
            .map(|x| -x)
            .sum::<f64>()
            .max(-quotient)
    } else {
        0.0
    };
    Ok(EBVerdict {
        is_entanglement_breaking: !certified_npt,
        min_pt_eigenvalue: min,
        negativity,
    })
}

pub fn is_entanglement_breaking(ch: &QubitChannel) -> Result<EBVerdict> {
    ppt_verdict(choi_of_channel(ch)?.matrix())
}

/// Smallest `t ∈ [0, t_max]` at which `pred` turns true, to within `tol`.
///
/// The interval is first probed at [`ONSET_SCAN_POINTS`] uniform times; a
/// true→false reversion among them is reported as
/// [`Error::NonMonotoneOnset`]. Returns `Ok(None)` if `pred(t_max)` is false.
/// The returned time is the upper end of the final bracket, so `pred` holds
/// there.
pub fn locate_onset<F>(mut pred: F, t_max: f64, tol: f64) -> Result<Option<f64>>
where
    F: FnMut(f64) -> Result<bool>,
{
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "t_max must be finite and > 0, got {t_max}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be > 0, got {tol}"
        )));
    }
    let n = ONSET_SCAN_POINTS;
    let grid: Vec<f64> = (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect();
    let mut first_true = None;
    for (i, &t) in grid.iter().enumerate() {
        let v = pred(t)?;
        match (first_true, v) {
            (None, true) => first_true = Some(i),
            (Some(_), false) => return Err(Error::NonMonotoneOnset { t_max, at: t }),
            _ => {}
        }
    }
    let Some(k) = first_true else {
        return Ok(None);
    };
    if k == 0 {
        return Ok(Some(0.0));
    }
    let (mut lo, mut hi) = (grid[k - 1], grid[k]);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// First time the semigroup `exp(g·t)` becomes entanglement-breaking.
pub fn disentanglement_time(g: &BlochGenerator, t_max: f64, tol: f64) -> Result<Option<f64>> {
    locate_onset(
        |t| {
            Ok(
                is_entanglement_breaking(&QubitChannel::from_generator(g, t)?)?
                    .is_entanglement_breaking,
            )
        },
        t_max,
        tol,
    )
}

/// First time the evolved singlet's negativity drops to zero.
pub fn singlet_separation_time(tau: f64, t_max: f64, tol: f64) -> Result<Option<f64>> {
    locate_onset(
        |t| Ok(ppt_verdict(evolve_singlet(t, tau)?.matrix())?.negativity == 0.0),
        t_max,
        tol,
    )
}

/// One measurement outcome and the state prepared for it.
#[derive(Debug, Clone, PartialEq)]
pub struct HolevoEntry {
    pub povm_element: ComplexMatrix,
    pub output_state: DensityMatrix2,
}

/// Measure-and-prepare decomposition `ρ ↦ Σ tr(P_λ ρ)·ρ_λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct HolevoForm {
    entries: Vec<HolevoEntry>,
}

impl HolevoForm {
    /// Checks POVM positivity and completeness.
    pub fn new(entries: Vec<HolevoEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParameter(
                "a POVM needs at least one element".into(),
            ));
        }
        let mut sum = ComplexMatrix::zeros(2);
        for e in &entries {
            e.povm_element.expect_dim(2)?;
            let min = e.povm_element.hermitian_eigenvalues(false)?.min();
            if min < -1e-12 {
                return Err(Error::NotPositive(min));
            }
            sum = &sum + &e.povm_element;
        }
        let defect = sum.max_abs_diff(&ComplexMatrix::identity(2));
        if defect > POVM_TOL {
            return Err(Error::InvalidParameter(format!(
                "POVM elements sum to I only within {defect:e}"
            )));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[HolevoEntry] {
        &self.entries
    }

    /// `‖Σ P_λ − I‖_max`.
    pub fn completeness_defect(&self) -> f64 {
        self.entries
            .iter()
            .fold(ComplexMatrix::zeros(2), |acc, e| &acc + &e.povm_element)
            .max_abs_diff(&ComplexMatrix::identity(2))
    }

    /// Outcome probabilities `tr(P_λ ρ)`.
    pub fn probabilities(&self, rho: &DensityMatrix2) -> Vec<f64> {
        self.entries
            .iter()
            .map(|e| (&e.povm_element * rho.matrix()).trace().re)
            .collect()
    }

    pub fn apply(&self, rho: &DensityMatrix2) -> ComplexMatrix {
        self.probabilities(rho)
            .into_iter()
            .zip(&self.entries)
            .fold(ComplexMatrix::zeros(2), |acc, (p, e)| {
                &acc + &e.output_state.matrix().scale_real(p)
            })
    }
}

/// The six-outcome form of `depolarizing(t, τ)`:
/// `P_{αs} = (I + sσ_α)/6`, `ρ_{αs} = (I + 3s·e^{−t/τ}σ_α)/2`.
///
/// The prepared states exist only once `3e^{−t/τ} ≤ 1`.
pub fn holevo_form_depolarizing(t: f64, tau: f64) -> Result<HolevoForm> {
    // Reuse the parameter checks of the channel constructor.
    QubitChannel::depolarizing(t, tau)?;
    let coefficient = 3.0 * (-t / tau).exp();
    if coefficient > 1.0 + 1e-12 {
        return Err(Error::HolevoStatesDoNotExist { coefficient });
    }
    let mut entries = Vec::with_capacity(6);
    for alpha in 1..=3 {
        for s in [1.0, -1.0] {
            let povm_element =
                (&ComplexMatrix::identity(2) + &pauli(alpha).scale_real(s)).scale_real(1.0 / 6.0);
            let mut r = [0.0; 3];
            r[alpha - 1] = s * coefficient.min(1.0);
            let output_state = DensityMatrix2::from_bloch(&BlochVector(r))?;
            entries.push(HolevoEntry {
                povm_element,
                output_state,
            });
        }
    }
    HolevoForm::new(entries)
}

/// Largest trace-norm gap between the decomposition and the channel over
/// `n_samples` random states drawn with [`VERIFY_SEED`].
pub fn verify_holevo_form(form: &HolevoForm, ch: &QubitChannel, n_samples: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(VERIFY_SEED);
    verify_holevo_form_with(form, ch, n_samples, &mut rng)
}

pub fn verify_holevo_form_with<R: Rng + ?Sized>(
    form: &HolevoForm,
    ch: &QubitChannel,
    n_samples: usize,
    rng: &mut R,
) -> Result<f64> {
    let mut worst = 0.0_f64;
    for _ in 0..n_samples {
        let rho = DensityMatrix2::new(random_density_matrix(2, rng))?;
        let diff = &form.apply(&rho) - ch.apply(&rho)?.matrix();
        worst = worst.max(trace_norm(&diff)?);
    }
    Ok(worst)
}

/// `(I⊗I − f·σ·σ)/4`.
#[derive(Debug, Clone, PartialEq)]
pub struct WernerState {
    f: f64,
    m: ComplexMatrix,
}

impl WernerState {
    /// Valid for `f ∈ [−1/3, 1]`.
    pub fn new(f: f64) -> Result<Self> {
        if !(-1.0 / 3.0 - 1e-15..=1.0 + 1e-15).contains(&f) {
            return Err(Error::InvalidParameter(format!(
                "Werner parameter {f} outside [-1/3, 1]"
            )));
        }
        let m = (&ComplexMatrix::identity(4) - &sigma_dot_sigma().scale_real(f)).scale_real(0.25);
        Ok(Self { f, m })
    }

    pub fn f(&self) -> f64 {
        self.f
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }
}

/// Singlet with the first qubit depolarized for time `t`; `f = e^{−t/τ}`.
pub fn evolve_singlet(t: f64, tau: f64) -> Result<WernerState> {
    QubitChannel::depolarizing(t, tau)?;
    WernerState::new((-t / tau).exp())
}
