//! Dense complex linear algebra for registers of two-level bosonic modes.
//!
//! A register is an ordered list of named modes. Basis indices are big-endian
//! over the register order: bit `k` of an index (counting from the most
//! significant of the `n` used bits) is the occupation of mode `k`, so the
//! ket `|1010⟩` over modes `(I, E, A, F)` sits at index `0b1010`. Every mode
//! is a two-level system; states, operators and density matrices are stored
//! densely, which is the right trade-off for the at most six-mode registers
//! used here.
//!
//! All values are immutable after construction and every operation returns a
//! fresh value, so sharing across parameter-sweep workers is safe.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance for algebraic identities (unitarity, trace preservation).
pub const TOL_ALGEBRA: f64 = 1e-12;
/// Tolerance for quantities accumulated over chained evolutions.
pub const TOL_CHAIN: f64 = 1e-10;
/// Below this squared norm a measurement branch counts as impossible.
pub const TOL_ZERO_BRANCH: f64 = 1e-15;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// An ordered register of named two-level modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeRegister {
    labels: Vec<String>,
}

impl ModeRegister {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidRegister("register has no modes".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::LabelCollision(l.clone()));
            }
        }
        Ok(Self { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Hilbert-space dimension, `2^n`.
    pub fn dim(&self) -> usize {
        1 << self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownMode(label.into()))
    }

    /// Concatenate two registers; labels must be disjoint.
    pub fn join(&self, other: &Self) -> Result<Self> {
        for l in &other.labels {
            if self.labels.contains(l) {
                return Err(Error::LabelCollision(l.clone()));
            }
        }
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Ok(Self { labels })
    }

    fn positions(&self, targets: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(targets.len());
        for (i, t) in targets.iter().enumerate() {
            if targets[..i].contains(t) {
                return Err(Error::DuplicateTarget((*t).into()));
            }
            out.push(self.position(t)?);
        }
        Ok(out)
    }
}

/// A linear operator on `arity` modes, stored as a dense `2^arity` matrix.
///
/// Carries no mode labels of its own; it is bound to modes when applied.
#[derive(Debug, Clone)]
pub struct LinearOp {
    matrix: Array2<C64>,
    arity: usize,
}

impl LinearOp {
    pub fn new(matrix: Array2<C64>) -> Result<Self> {
        let (r, k) = matrix.dim();
        if r != k || !r.is_power_of_two() || r < 2 {
            return Err(Error::DimensionMismatch { expected: r, got: k });
        }
        let arity = r.trailing_zeros() as usize;
        Ok(Self { matrix, arity })
    }

    pub fn from_rows(arity: usize, rows: &[&[C64]]) -> Self {
        let dim = 1 << arity;
        assert_eq!(rows.len(), dim);
        let mut m = Array2::zeros((dim, dim));
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim);
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        Self { matrix: m, arity }
    }

    pub fn identity(arity: usize) -> Self {
        Self {
            matrix: Array2::eye(1 << arity),
            arity,
        }
    }

    /// Rank-one projector `|v⟩⟨v|` on a single mode.
    pub fn projector(v: [C64; 2]) -> Self {
        let mut m = Array2::zeros((2, 2));
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        Self { matrix: m, arity: 1 }
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn dagger(&self) -> Self {
        let mut m = Array2::zeros(self.matrix.raw_dim());
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                m[(i, j)] = self.matrix[(j, i)].conj();
            }
        }
        Self {
            matrix: m,
            arity: self.arity,
        }
    }

    /// Matrix product `self · rhs`.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: rhs.dim(),
            });
        }
        Ok(Self {
            matrix: self.matrix.dot(&rhs.matrix),
            arity: self.arity,
        })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: rhs.dim(),
            });
        }
        Ok(Self {
            matrix: &self.matrix + &rhs.matrix,
            arity: self.arity,
        })
    }

    pub fn scale(&self, f: f64) -> Self {
        Self {
            matrix: self.matrix.mapv(|v| v * c(f)),
            arity: self.arity,
        }
    }

    pub fn tensor(&self, rhs: &Self) -> Self {
        Self {
            matrix: kron(&self.matrix, &rhs.matrix),
            arity: self.arity + rhs.arity,
        }
    }

    /// Largest absolute entry of `U†U − I`.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.dagger().matrix.dot(&self.matrix);
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let want = if i == j { c(1.0) } else { c(0.0) };
                worst = worst.max((prod[(i, j)] - want).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() < tol
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        max_entry_diff(&self.matrix, &rhs.matrix)
    }

    /// Positive-semidefinite square root, via the Hermitian eigensystem.
    ///
    /// Eigenvalues in `[-1e-10, 0)` are clamped to zero; anything more
    /// negative is rejected.
    pub fn sqrt_psd(&self) -> Result<Self> {
        let matrix = eigh::hermitian_map(&self.matrix, |lambda| {
            if lambda < 0.0 {
                0.0
            } else {
                lambda.sqrt()
            }
        });
        let min = eigh::min_eigenvalue(&self.matrix);
        if min < -1e-10 {
            return Err(Error::NotPositiveSemidefinite(min));
        }
        Ok(Self {
            matrix,
            arity: self.arity,
        })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eigh::min_eigenvalue(&self.matrix)
    }
}

/// A pure state: complex amplitudes over the register's basis.
#[derive(Debug, Clone)]
pub struct PureState {
    register: ModeRegister,
    amplitudes: Array1<C64>,
}

impl PureState {
    pub fn new(register: ModeRegister, amplitudes: Array1<C64>) -> Result<Self> {
        if amplitudes.len() != register.dim() {
            return Err(Error::DimensionMismatch {
                expected: register.dim(),
                got: amplitudes.len(),
            });
        }
        Ok(Self {
            register,
            amplitudes,
        })
    }

    /// All modes in `|0⟩`.
    pub fn vacuum(register: ModeRegister) -> Self {
        let mut amplitudes = Array1::zeros(register.dim());
        amplitudes[0] = c(1.0);
        Self {
            register,
            amplitudes,
        }
    }

    /// Computational basis state from per-mode occupations.
    pub fn basis(register: ModeRegister, bits: &[u8]) -> Result<Self> {
        if bits.len() != register.len() {
            return Err(Error::DimensionMismatch {
                expected: register.len(),
                got: bits.len(),
            });
        }
        let mut idx = 0usize;
        for &b in bits {
            idx = (idx << 1) | (b as usize & 1);
        }
        let mut amplitudes = Array1::zeros(register.dim());
        amplitudes[idx] = c(1.0);
        Ok(Self {
            register,
            amplitudes,
        })
    }

    /// Single-mode state `a|0⟩ + b|1⟩`.
    pub fn qubit(label: &str, a: C64, b: C64) -> Result<Self> {
        let register = ModeRegister::new([label])?;
        let amplitudes = Array1::from(vec![a, b]);
        Ok(Self {
            register,
            amplitudes,
        })
    }

    pub fn register(&self) -> &ModeRegister {
        &self.register
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    /// Amplitude of a computational basis ket given per-mode occupations.
    pub fn amplitude(&self, bits: &[u8]) -> Result<C64> {
        if bits.len() != self.register.len() {
            return Err(Error::DimensionMismatch {
                expected: self.register.len(),
                got: bits.len(),
            });
        }
        let mut idx = 0usize;
        for &b in bits {
            idx = (idx << 1) | (b as usize & 1);
        }
        Ok(self.amplitudes[idx])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm();
        if n * n < TOL_ZERO_BRANCH {
            return Err(Error::ZeroProbabilityBranch);
        }
        Ok(Self {
            register: self.register.clone(),
            amplitudes: self.amplitudes.mapv(|a| a / c(n)),
        })
    }

    pub fn scale(&self, f: C64) -> Self {
        Self {
            register: self.register.clone(),
            amplitudes: self.amplitudes.mapv(|a| a * f),
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.register != rhs.register {
            return Err(Error::RegisterMismatch);
        }
        Ok(Self {
            register: self.register.clone(),
            amplitudes: &self.amplitudes + &rhs.amplitudes,
        })
    }

    /// `⟨self|rhs⟩`.
    pub fn inner(&self, rhs: &Self) -> Result<C64> {
        if self.register != rhs.register {
            return Err(Error::RegisterMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(rhs.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Tensor product on disjoint registers.
    pub fn tensor(&self, rhs: &Self) -> Result<Self> {
        let register = self.register.join(&rhs.register)?;
        let mut amplitudes = Array1::zeros(register.dim());
        let rd = rhs.register.dim();
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            for (j, b) in rhs.amplitudes.iter().enumerate() {
                amplitudes[i * rd + j] = *a * *b;
            }
        }
        Ok(Self {
            register,
            amplitudes,
        })
    }

    /// Apply `op` to the named target modes, identity elsewhere.
    pub fn apply(&self, op: &LinearOp, targets: &[&str]) -> Result<Self> {
        let pos = self.register.positions(targets)?;
        if op.arity() != pos.len() {
            return Err(Error::ArityMismatch {
                op: op.arity(),
                targets: pos.len(),
            });
        }
        let n = self.register.len();
        let dim = self.register.dim();
        let k = pos.len();
        let sub = 1usize << k;
        let shifts: Vec<usize> = pos.iter().map(|&p| n - 1 - p).collect();

        let mut out = Array1::zeros(dim);
        for b in 0..dim {
            let mut row = 0usize;
            for (i, &s) in shifts.iter().enumerate() {
                row |= ((b >> s) & 1) << (k - 1 - i);
            }
            let mut acc = c(0.0);
            for col in 0..sub {
                let m = op.matrix[(row, col)];
                if m.norm_sqr() == 0.0 {
                    continue;
                }
                let mut b2 = b;
                for (i, &s) in shifts.iter().enumerate() {
                    let bit = (col >> (k - 1 - i)) & 1;
                    b2 = (b2 & !(1usize << s)) | (bit << s);
                }
                acc += m * self.amplitudes[b2];
            }
            out[b] = acc;
        }
        Ok(Self {
            register: self.register.clone(),
            amplitudes: out,
        })
    }

    /// Measure a positive element `M` on the target modes.
    ///
    /// Returns `(⟨ψ|M|ψ⟩, post)` where the post-state is `√M |ψ⟩`
    /// renormalized. Branches of numerically zero probability are an error:
    /// the caller must not renormalize them.
    pub fn project(&self, element: &LinearOp, targets: &[&str]) -> Result<(f64, Self)> {
        let applied = self.apply(element, targets)?;
        let p = self.inner(&applied)?.re;
        if p < TOL_ZERO_BRANCH {
            return Err(Error::ZeroProbabilityBranch);
        }
        let root = element.sqrt_psd()?;
        let post = self.apply(&root, targets)?.normalize()?;
        Ok((p, post))
    }

    /// Contract one mode with a bra vector, returning the unnormalized
    /// remainder `⟨v|ψ⟩` on the shrunken register.
    ///
    /// The squared norm of the result is the Born weight of the outcome.
    pub fn contract(&self, mode: &str, bra: [C64; 2]) -> Result<Self> {
        let p = self.register.position(mode)?;
        let n = self.register.len();
        if n == 1 {
            return Err(Error::InvalidRegister(
                "cannot contract the last remaining mode".into(),
            ));
        }
        let shift = n - 1 - p;
        let labels: Vec<String> = self
            .register
            .labels
            .iter()
            .filter(|l| l.as_str() != mode)
            .cloned()
            .collect();
        let register = ModeRegister::new(labels)?;
        let mut out = Array1::zeros(register.dim());
        let low_mask = (1usize << shift) - 1;
        for ob in 0..register.dim() {
            let high = (ob >> shift) << (shift + 1);
            let low = ob & low_mask;
            let b0 = high | low;
            let b1 = b0 | (1usize << shift);
            out[ob] = bra[0].conj() * self.amplitudes[b0] + bra[1].conj() * self.amplitudes[b1];
        }
        Ok(Self {
            register,
            amplitudes: out,
        })
    }

    /// Reorder the register; amplitudes are permuted to match.
    pub fn permute(&self, order: &[&str]) -> Result<Self> {
        if order.len() != self.register.len() {
            return Err(Error::DimensionMismatch {
                expected: self.register.len(),
                got: order.len(),
            });
        }
        let pos = self.register.positions(order)?;
        let n = self.register.len();
        let register = ModeRegister::new(order.iter().map(|s| s.to_string()))?;
        let mut out = Array1::zeros(self.register.dim());
        for b in 0..self.register.dim() {
            let mut nb = 0usize;
            for (newp, &oldp) in pos.iter().enumerate() {
                let bit = (b >> (n - 1 - oldp)) & 1;
                nb |= bit << (n - 1 - newp);
            }
            out[nb] = self.amplitudes[b];
        }
        Ok(Self {
            register,
            amplitudes: out,
        })
    }

    /// Relabel modes without touching amplitudes.
    pub fn relabel(&self, from_to: &[(&str, &str)]) -> Result<Self> {
        let mut labels = self.register.labels.clone();
        for (from, to) in from_to {
            let p = self.register.position(from)?;
            labels[p] = (*to).to_string();
        }
        Ok(Self {
            register: ModeRegister::new(labels)?,
            amplitudes: self.amplitudes.clone(),
        })
    }

    pub fn density(&self) -> DensityOperator {
        let dim = self.register.dim();
        let mut m = Array2::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        DensityOperator {
            register: self.register.clone(),
            matrix: m,
        }
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> Result<f64> {
        if self.register != rhs.register {
            return Err(Error::RegisterMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(rhs.amplitudes.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// True iff `|⟨a|b⟩| ≥ 1 − tol`; global phase is unobservable.
pub fn states_equal_up_to_phase(a: &PureState, b: &PureState, tol: f64) -> Result<bool> {
    Ok(a.inner(b)?.norm() >= 1.0 - tol)
}

/// A density operator over a register.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    register: ModeRegister,
    matrix: Array2<C64>,
}

impl DensityOperator {
    pub fn new(register: ModeRegister, matrix: Array2<C64>) -> Result<Self> {
        if matrix.nrows() != register.dim() || matrix.ncols() != register.dim() {
            return Err(Error::DimensionMismatch {
                expected: register.dim(),
                got: matrix.nrows(),
            });
        }
        Ok(Self { register, matrix })
    }

    pub fn register(&self) -> &ModeRegister {
        &self.register
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        (0..self.matrix.nrows()).map(|i| self.matrix[(i, i)]).sum()
    }

    pub fn scale(&self, f: f64) -> Self {
        Self {
            register: self.register.clone(),
            matrix: self.matrix.mapv(|v| v * c(f)),
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.register != rhs.register {
            return Err(Error::RegisterMismatch);
        }
        Ok(Self {
            register: self.register.clone(),
            matrix: &self.matrix + &rhs.matrix,
        })
    }

    pub fn tensor(&self, rhs: &Self) -> Result<Self> {
        let register = self.register.join(&rhs.register)?;
        Ok(Self {
            register,
            matrix: kron(&self.matrix, &rhs.matrix),
        })
    }

    /// Reduce to the named modes, tracing out everything else.
    ///
    /// The result's mode order follows the `keep` argument.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptyKeepSet);
        }
        let keep_pos = self.register.positions(keep)?;
        let n = self.register.len();
        let traced_pos: Vec<usize> = (0..n).filter(|p| !keep_pos.contains(p)).collect();
        let register = ModeRegister::new(keep.iter().map(|s| s.to_string()))?;
        let kn = keep_pos.len();
        let tn = traced_pos.len();
        let kdim = 1usize << kn;
        let tdim = 1usize << tn;

        let assemble = |kept: usize, traced: usize| -> usize {
            let mut idx = 0usize;
            for (i, &p) in keep_pos.iter().enumerate() {
                let bit = (kept >> (kn - 1 - i)) & 1;
                idx |= bit << (n - 1 - p);
            }
            for (i, &p) in traced_pos.iter().enumerate() {
                let bit = (traced >> (tn - 1 - i)) & 1;
                idx |= bit << (n - 1 - p);
            }
            idx
        };

        let mut m = Array2::zeros((kdim, kdim));
        for a in 0..kdim {
            for b in 0..kdim {
                let mut acc = c(0.0);
                for t in 0..tdim {
                    acc += self.matrix[(assemble(a, t), assemble(b, t))];
                }
                m[(a, b)] = acc;
            }
        }
        Ok(Self { register, matrix: m })
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> Result<f64> {
        if self.register != rhs.register {
            return Err(Error::RegisterMismatch);
        }
        Ok(max_entry_diff(&self.matrix, &rhs.matrix))
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.matrix.nrows() {
            for j in 0..self.matrix.ncols() {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eigh::min_eigenvalue(&self.matrix)
    }

    /// Hermitian within `tol`, unit trace within `tol`, eigenvalues above
    /// `-1e-10`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let h = self.hermiticity_defect();
        if h > tol {
            return Err(Error::DimensionMismatch {
                expected: 0,
                got: 1,
            });
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::AmplitudesNotNormalized(tr.re));
        }
        let min = self.min_eigenvalue();
        if min < -1e-10 {
            return Err(Error::NotPositiveSemidefinite(min));
        }
        Ok(())
    }

    /// Fidelity `⟨ψ|ρ|ψ⟩` with a pure state.
    pub fn fidelity_with_pure(&self, psi: &PureState) -> Result<f64> {
        if self.register != *psi.register() {
            return Err(Error::RegisterMismatch);
        }
        let v = psi.amplitudes();
        let mut acc = c(0.0);
        for i in 0..self.matrix.nrows() {
            for j in 0..self.matrix.ncols() {
                acc += v[i].conj() * self.matrix[(i, j)] * v[j];
            }
        }
        Ok(acc.re)
    }
}

/// Kronecker product of dense complex matrices.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let v = a[(i, j)];
            if v.norm_sqr() == 0.0 {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = v * b[(k, l)];
                }
            }
        }
    }
    out
}

fn max_entry_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Hermitian eigensystem via cyclic Jacobi on the real symmetric embedding.
///
/// For `H = X + iY` Hermitian, `M = [[X, -Y], [Y, X]]` is real symmetric with
/// the eigenvalues of `H` each doubled; an embedding eigenvector `(u; w)`
/// lifts to the complex eigenvector `u + iw`. The paired copies reconstruct
/// `f(H) = Σ f(λ) v v† / 2` without any explicit pairing step.
pub(crate) mod eigh {
    use super::{c, Array2, C64};

    fn embed(h: &Array2<C64>) -> Vec<Vec<f64>> {
        let n = h.nrows();
        let mut m = vec![vec![0.0; 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                let x = h[(i, j)].re;
                let y = h[(i, j)].im;
                m[i][j] = x;
                m[i + n][j + n] = x;
                m[i][j + n] = -y;
                m[i + n][j] = y;
            }
        }
        m
    }

    /// Cyclic Jacobi for a real symmetric matrix; returns (eigenvalues,
    /// eigenvector columns).
    #[allow(clippy::needless_range_loop)] // pivot sweeps address symmetric pairs
    fn jacobi(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
        let n = a.len();
        let mut v = vec![vec![0.0; n]; n];
        for (i, row) in v.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        let scale: f64 = a
            .iter()
            .flat_map(|r| r.iter())
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
            .max(1e-300);
        for _sweep in 0..100 {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[p][q] * a[p][q];
                }
            }
            if off.sqrt() < 1e-14 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p][q];
                    if apq.abs() < 1e-300 {
                        continue;
                    }
                    let tau = (a[q][q] - a[p][p]) / (2.0 * apq);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let cth = 1.0 / (1.0 + t * t).sqrt();
                    let sth = t * cth;
                    for row in a.iter_mut() {
                        let akp = row[p];
                        let akq = row[q];
                        row[p] = cth * akp - sth * akq;
                        row[q] = sth * akp + cth * akq;
                    }
                    for k in 0..n {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = cth * apk - sth * aqk;
                        a[q][k] = sth * apk + cth * aqk;
                    }
                    for row in v.iter_mut() {
                        let vkp = row[p];
                        let vkq = row[q];
                        row[p] = cth * vkp - sth * vkq;
                        row[q] = sth * vkp + cth * vkq;
                    }
                }
            }
        }
        let evals = (0..n).map(|i| a[i][i]).collect();
        (evals, v)
    }

    pub fn min_eigenvalue(h: &Array2<C64>) -> f64 {
        let (evals, _) = jacobi(embed(h));
        evals.into_iter().fold(f64::INFINITY, f64::min)
    }

    /// `f(H)` for Hermitian `H` through its eigensystem.
    pub fn hermitian_map(h: &Array2<C64>, f: impl Fn(f64) -> f64) -> Array2<C64> {
        let n = h.nrows();
        let (evals, vecs) = jacobi(embed(h));
        let mut out = Array2::zeros((n, n));
        for (k, &lambda) in evals.iter().enumerate() {
            let flam = f(lambda);
            if flam == 0.0 {
                continue;
            }
            // complex eigenvector u + i w from the embedding column
            let col: Vec<C64> = (0..n)
                .map(|i| C64::new(vecs[i][k], vecs[i + n][k]))
                .collect();
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += c(flam * 0.5) * col[i] * col[j].conj();
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;

    fn amps(v: &[(f64, f64)]) -> Array1<C64> {
        Array1::from(v.iter().map(|&(r, i)| C64::new(r, i)).collect::<Vec<_>>())
    }

    #[test]
    fn vacuum_tensor_vacuum() {
        let a = PureState::vacuum(ModeRegister::new(["a"]).unwrap());
        let b = PureState::vacuum(ModeRegister::new(["b"]).unwrap());
        let ab = a.tensor(&b).unwrap();
        assert_eq!(ab.amplitudes().to_vec(), amps(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]).to_vec());
    }

    #[test]
    fn tensor_identity_on_second_factor() {
        let a = PureState::qubit("a", c(0.6), c(0.8)).unwrap();
        let b = PureState::vacuum(ModeRegister::new(["b"]).unwrap());
        let ab = a.tensor(&b).unwrap();
        // α|00⟩ + β|10⟩
        assert!((ab.amplitude(&[0, 0]).unwrap().re - 0.6).abs() < TOL_ALGEBRA);
        assert!((ab.amplitude(&[1, 0]).unwrap().re - 0.8).abs() < TOL_ALGEBRA);
        assert!(ab.amplitude(&[0, 1]).unwrap().norm() < TOL_ALGEBRA);
    }

    #[test]
    fn tensor_rejects_label_collision() {
        let a = PureState::vacuum(ModeRegister::new(["x"]).unwrap());
        let b = PureState::vacuum(ModeRegister::new(["x"]).unwrap());
        assert!(matches!(a.tensor(&b), Err(Error::LabelCollision(_))));
    }

    #[test]
    fn apply_bit_flip_on_named_mode() {
        let reg = ModeRegister::new(["s", "f"]).unwrap();
        let s = PureState::vacuum(reg);
        let flipped = s.apply(&gates::pauli_x(), &["f"]).unwrap();
        assert!((flipped.amplitude(&[0, 1]).unwrap().re - 1.0).abs() < TOL_ALGEBRA);
    }

    #[test]
    fn apply_hadamard() {
        let s = PureState::qubit("i", c(1.0), c(0.0)).unwrap();
        let plus = s.apply(&gates::hadamard(), &["i"]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((plus.amplitude(&[0]).unwrap().re - r).abs() < TOL_ALGEBRA);
        assert!((plus.amplitude(&[1]).unwrap().re - r).abs() < TOL_ALGEBRA);
    }

    #[test]
    fn apply_cz_phase_on_one_one() {
        let reg = ModeRegister::new(["i", "a"]).unwrap();
        let s = PureState::basis(reg, &[1, 1]).unwrap();
        let out = s.apply(&gates::cz(), &["i", "a"]).unwrap();
        assert!((out.amplitude(&[1, 1]).unwrap().re + 1.0).abs() < TOL_ALGEBRA);
    }

    #[test]
    fn apply_errors() {
        let s = PureState::qubit("i", c(1.0), c(0.0)).unwrap();
        assert!(matches!(
            s.apply(&gates::pauli_x(), &["nope"]),
            Err(Error::UnknownMode(_))
        ));
        assert!(matches!(
            s.apply(&gates::cz(), &["i"]),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn project_eigenstate_and_overlap() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureState::qubit("m", c(r), c(r)).unwrap();
        let proj_plus = LinearOp::projector([c(r), c(r)]);
        let (p, post) = plus.project(&proj_plus, &["m"]).unwrap();
        assert!((p - 1.0).abs() < TOL_ALGEBRA);
        assert!(states_equal_up_to_phase(&post, &plus, TOL_ALGEBRA).unwrap());

        let zero = PureState::qubit("m", c(1.0), c(0.0)).unwrap();
        let proj_minus = LinearOp::projector([c(r), c(-r)]);
        let (p, post) = zero.project(&proj_minus, &["m"]).unwrap();
        assert!((p - 0.5).abs() < TOL_ALGEBRA);
        let minus = PureState::qubit("m", c(r), c(-r)).unwrap();
        assert!(states_equal_up_to_phase(&post, &minus, TOL_ALGEBRA).unwrap());
    }

    #[test]
    fn project_zero_probability_branch_is_an_error() {
        let zero = PureState::qubit("m", c(1.0), c(0.0)).unwrap();
        let proj_one = LinearOp::projector([c(0.0), c(1.0)]);
        assert!(matches!(
            zero.project(&proj_one, &["m"]),
            Err(Error::ZeroProbabilityBranch)
        ));
    }

    #[test]
    fn partial_trace_bell_state_is_maximally_mixed() {
        let reg = ModeRegister::new(["a", "b"]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::new(reg, amps(&[(r, 0.0), (0.0, 0.0), (0.0, 0.0), (r, 0.0)])).unwrap();
        let reduced = bell.density().partial_trace(&["a"]).unwrap();
        assert!((reduced.matrix()[(0, 0)].re - 0.5).abs() < TOL_ALGEBRA);
        assert!((reduced.matrix()[(1, 1)].re - 0.5).abs() < TOL_ALGEBRA);
        assert!(reduced.matrix()[(0, 1)].norm() < TOL_ALGEBRA);
    }

    #[test]
    fn partial_trace_product_state() {
        let a = PureState::qubit("a", c(0.6), c(0.8)).unwrap();
        let b = PureState::qubit("b", c(0.8), c(-0.6)).unwrap();
        let joint = a.tensor(&b).unwrap().density();
        let back = joint.partial_trace(&["a"]).unwrap();
        assert!(back.max_abs_diff(&a.density()).unwrap() < TOL_ALGEBRA);
    }

    #[test]
    fn density_tensor_matches_pure_tensor() {
        let a = PureState::qubit("a", c(0.6), c(0.8)).unwrap();
        let b = PureState::qubit("b", c(0.28), c(0.96)).unwrap();
        let via_density = a.density().tensor(&b.density()).unwrap();
        let via_pure = a.tensor(&b).unwrap().density();
        assert!(via_density.max_abs_diff(&via_pure).unwrap() < TOL_ALGEBRA);
        assert!(a.density().tensor(&a.density()).is_err());
    }

    #[test]
    fn partial_trace_requires_keep() {
        let a = PureState::qubit("a", c(1.0), c(0.0)).unwrap().density();
        assert!(matches!(a.partial_trace(&[]), Err(Error::EmptyKeepSet)));
    }

    #[test]
    fn partial_trace_preserves_trace_on_random_densities() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n = rng.gen_range(2..=4usize);
            let labels: Vec<String> = (0..n).map(|i| format!("m{i}")).collect();
            let reg = ModeRegister::new(labels.clone()).unwrap();
            let dim = reg.dim();
            // random mixture of two random pure states
            let mut mix = Array2::<C64>::zeros((dim, dim));
            for w in [0.3, 0.7] {
                let v: Vec<C64> = (0..dim)
                    .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                    .collect();
                let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                for i in 0..dim {
                    for j in 0..dim {
                        mix[(i, j)] += c(w) * v[i] * v[j].conj() / c(norm * norm);
                    }
                }
            }
            let rho = DensityOperator::new(reg, mix).unwrap();
            let keep: Vec<&str> = labels[..1].iter().map(|s| s.as_str()).collect();
            let reduced = rho.partial_trace(&keep).unwrap();
            assert!((reduced.trace().re - rho.trace().re).abs() < TOL_ALGEBRA);
        }
    }

    #[test]
    fn equal_up_to_phase() {
        let psi = PureState::qubit("m", c(0.6), c(0.8)).unwrap();
        let phased = psi.scale(C64::from_polar(1.0, 1.234));
        assert!(states_equal_up_to_phase(&psi, &phased, TOL_ALGEBRA).unwrap());
        let zero = PureState::qubit("m", c(1.0), c(0.0)).unwrap();
        let one = PureState::qubit("m", c(0.0), c(1.0)).unwrap();
        assert!(!states_equal_up_to_phase(&zero, &one, TOL_ALGEBRA).unwrap());
        let other = PureState::qubit("x", c(1.0), c(0.0)).unwrap();
        assert!(states_equal_up_to_phase(&zero, &other, TOL_ALGEBRA).is_err());
    }

    #[test]
    fn permute_and_relabel_round_trip() {
        let a = PureState::qubit("a", c(0.6), c(0.8)).unwrap();
        let b = PureState::qubit("b", c(0.28), c(0.96)).unwrap();
        let ab = a.tensor(&b).unwrap();
        let ba = ab.permute(&["b", "a"]).unwrap();
        let ab2 = ba.permute(&["a", "b"]).unwrap();
        assert!(ab.max_abs_diff(&ab2).unwrap() < TOL_ALGEBRA);
        // amplitude of |a=1, b=0⟩ must equal |b=0, a=1⟩ after permutation
        assert!(
            (ab.amplitude(&[1, 0]).unwrap() - ba.amplitude(&[0, 1]).unwrap()).norm() < TOL_ALGEBRA
        );
        let renamed = ab.relabel(&[("a", "x")]).unwrap();
        assert_eq!(renamed.register().labels()[0], "x");
    }

    #[test]
    fn contract_extracts_branches() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let reg = ModeRegister::new(["a", "b"]).unwrap();
        let bell = PureState::new(reg, amps(&[(r, 0.0), (0.0, 0.0), (0.0, 0.0), (r, 0.0)])).unwrap();
        let branch0 = bell.contract("a", [c(1.0), c(0.0)]).unwrap();
        assert!((branch0.norm_sqr() - 0.5).abs() < TOL_ALGEBRA);
        assert!((branch0.amplitude(&[0]).unwrap().re - r).abs() < TOL_ALGEBRA);
    }

    #[test]
    fn sqrt_of_projector_is_projector() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let proj = LinearOp::projector([c(r), c(-r)]);
        let root = proj.sqrt_psd().unwrap();
        assert!(root.max_abs_diff(&proj) < 1e-12);
    }

    #[test]
    fn sqrt_rejects_negative_operator() {
        let zg = gates::pauli_z();
        assert!(matches!(
            zg.sqrt_psd(),
            Err(Error::NotPositiveSemidefinite(_))
        ));
    }

    #[test]
    fn density_validation() {
        let psi = PureState::qubit("m", c(0.6), c(0.8)).unwrap();
        psi.density().validate(TOL_ALGEBRA).unwrap();
    }
}
