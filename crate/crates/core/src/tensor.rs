//! Pointwise Kähler curvature tensors in a unitary frame.
//!
//! A tensor is stored against the identity metric, as the full complex
//! 4-index array R_{i j̄ k l̄} (0-based internally, 1-based in the JSON
//! exchange format). Construction validates the two defining identities:
//!
//! * Kähler symmetry: R_{i j̄ k l̄} = R_{k j̄ i l̄} = R_{i l̄ k j̄};
//! * Hermitian reality: R_{i j̄ k l̄} = conj(R_{j ī l k̄}).
//!
//! Together these make every contraction against Hermitian data real,
//! which the rest of the crate relies on.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Validation tolerance for the symmetry identities (max absolute violation).
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Orthogonality tolerance for bisectional-curvature arguments.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum CurvatureError {
    #[error("{identity} violated at (i,j,k,l)=({},{},{},{}) by {magnitude:.3e}", indices[0]+1, indices[1]+1, indices[2]+1, indices[3]+1)]
    SymmetryViolation {
        identity: &'static str,
        indices: [usize; 4],
        magnitude: f64,
    },
    #[error("complex dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("entry array has {got} entries, expected n^4 = {want}")]
    WrongShape { got: usize, want: usize },
    #[error("zero vector passed where a direction is required")]
    ZeroVector,
    #[error("arguments are not orthogonal: |<X,Y>| = {inner:.3e}")]
    NotOrthogonal { inner: f64 },
    #[error("minimization exceeded its iteration budget; best value {best:.6e}")]
    NonConvergence { best: f64 },
    #[error("rejection sampling budget exhausted after {0} draws")]
    SamplingBudgetExhausted(usize),
    #[error("conflicting entries for the same symmetry orbit at (i,j,k,l)=({},{},{},{})", .0[0]+1, .0[1]+1, .0[2]+1, .0[3]+1)]
    ConflictingEntries([usize; 4]),
    #[error("index out of range 1..=n in exchange entry: {0:?}")]
    IndexOutOfRange([i64; 4]),
    #[error("malformed tensor JSON: {0}")]
    Json(String),
}

/// The symmetry orbit of one index quadruple: the eight images under the
/// two index swaps and the conjugating swap, with a flag telling whether
/// the value is conjugated there.
fn symmetry_orbit(idx: [usize; 4]) -> [([usize; 4], bool); 8] {
    let [i, j, k, l] = idx;
    [
        ([i, j, k, l], false),
        ([k, j, i, l], false),
        ([i, l, k, j], false),
        ([k, l, i, j], false),
        ([j, i, l, k], true),
        ([j, k, l, i], true),
        ([l, i, j, k], true),
        ([l, k, j, i], true),
    ]
}

/// Pointwise Kähler curvature tensor R_{i j̄ k l̄} in a unitary frame.
#[derive(Clone, Debug, PartialEq)]
pub struct KahlerCurvatureTensor {
    n: usize,
    entries: Vec<Complex64>,
}

impl KahlerCurvatureTensor {
    #[inline]
    fn flat(n: usize, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * n + j) * n + k) * n + l
    }

    /// Complex dimension of the underlying space.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry R_{i j̄ k l̄}, 0-based indices.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        self.entries[Self::flat(self.n, i, j, k, l)]
    }

    /// Raw entry slice in row-major (i, j, k, l) order.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Validate a raw n⁴ array and wrap it as a curvature tensor.
    ///
    /// Both symmetry identities must hold within [`SYMMETRY_TOL`]; the
    /// worst offending index quadruple is reported otherwise.
    pub fn from_entries(raw: Vec<Complex64>, n: usize) -> Result<Self, CurvatureError> {
        if n < 2 {
            return Err(CurvatureError::DimensionTooSmall(n));
        }
        if raw.len() != n * n * n * n {
            return Err(CurvatureError::WrongShape {
                got: raw.len(),
                want: n * n * n * n,
            });
        }
        let t = Self { n, entries: raw };
        t.check_symmetries(SYMMETRY_TOL)?;
        Ok(t)
    }

    /// Re-run the symmetry scan at a caller-chosen tolerance.
    pub fn check_symmetries(&self, tol: f64) -> Result<(), CurvatureError> {
        let n = self.n;
        let mut worst = (0.0f64, [0usize; 4], "");
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = self.get(i, j, k, l);
                        let d1 = (v - self.get(k, j, i, l)).norm();
                        let d2 = (v - self.get(i, l, k, j)).norm();
                        let d3 = (v - self.get(j, i, l, k).conj()).norm();
                        if d1 > worst.0 {
                            worst = (d1, [i, j, k, l], "Kahler symmetry (first pair)");
                        }
                        if d2 > worst.0 {
                            worst = (d2, [i, j, k, l], "Kahler symmetry (second pair)");
                        }
                        if d3 > worst.0 {
                            worst = (d3, [i, j, k, l], "Hermitian reality");
                        }
                    }
                }
            }
        }
        if worst.0 > tol {
            return Err(CurvatureError::SymmetryViolation {
                identity: worst.2,
                indices: worst.1,
                magnitude: worst.0,
            });
        }
        Ok(())
    }

    /// Largest violation over both identities (0 for an exactly symmetric array).
    pub fn max_symmetry_violation(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = self.get(i, j, k, l);
                        worst = worst
                            .max((v - self.get(k, j, i, l)).norm())
                            .max((v - self.get(i, l, k, j)).norm())
                            .max((v - self.get(j, i, l, k).conj()).norm());
                    }
                }
            }
        }
        worst
    }

    /// Project an arbitrary n⁴ array onto the symmetry subspace by
    /// averaging its orbit under the symmetry group.
    pub fn symmetrize(raw: &[Complex64], n: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (idx, conj) in symmetry_orbit([i, j, k, l]) {
                            let v = raw[Self::flat(n, idx[0], idx[1], idx[2], idx[3])];
                            acc += if conj { v.conj() } else { v };
                        }
                        out[Self::flat(n, i, j, k, l)] = acc / 8.0;
                    }
                }
            }
        }
        out
    }

    /// The constant-curvature model R = (c/2)(g*g), which has holomorphic
    /// sectional curvature c in every direction.
    pub fn constant_curvature(n: usize, c: f64) -> Result<Self, CurvatureError> {
        if n < 2 {
            return Err(CurvatureError::DimensionTooSmall(n));
        }
        let gg = GgTensor::new(n);
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        entries[Self::flat(n, i, j, k, l)] =
                            Complex64::new(0.5 * c * gg.get(i, j, k, l), 0.0);
                    }
                }
            }
        }
        Ok(Self { n, entries })
    }

    /// Zero tensor.
    pub fn zero(n: usize) -> Result<Self, CurvatureError> {
        Self::constant_curvature(n, 0.0)
    }

    /// Ricci contraction ricci_{i j̄} = Σ_k R_{i j̄ k k̄} and its trace.
    pub fn traces(&self) -> (DMatrix<Complex64>, f64) {
        let n = self.n;
        let mut ricci = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.get(i, j, k, k);
                }
                ricci[(i, j)] = acc;
            }
        }
        let scalar = (0..n).map(|i| ricci[(i, i)].re).sum();
        (ricci, scalar)
    }

    /// Scalar curvature (trace of Ricci).
    pub fn scalar(&self) -> f64 {
        self.traces().1
    }

    /// Raw multilinear evaluation R(A, B̄, C, D̄): slots 2 and 4 are
    /// conjugated internally.
    pub fn eval(
        &self,
        a: &DVector<Complex64>,
        b: &DVector<Complex64>,
        c: &DVector<Complex64>,
        d: &DVector<Complex64>,
    ) -> Complex64 {
        let n = self.n;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let ab = a[i] * b[j].conj();
                if ab.norm_sqr() == 0.0 {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        acc += self.get(i, j, k, l) * ab * c[k] * d[l].conj();
                    }
                }
            }
        }
        acc
    }

    /// Bisectional value R(X, X̄, Y, Ȳ); real for any valid tensor.
    pub fn bisectional(&self, x: &DVector<Complex64>, y: &DVector<Complex64>) -> f64 {
        self.eval(x, x, y, y).re
    }

    /// Holomorphic sectional curvature R(v, v̄, v, v̄)/|v|⁴.
    pub fn holomorphic_sectional(&self, v: &DVector<Complex64>) -> Result<f64, CurvatureError> {
        let nv = v.norm();
        if nv < 1e-14 {
            return Err(CurvatureError::ZeroVector);
        }
        Ok(self.bisectional(v, v) / nv.powi(4))
    }

    /// Orthogonal bisectional curvature R(X, X̄, Y, Ȳ)/(|X|²|Y|²) for
    /// orthogonal nonzero X, Y.
    pub fn orthogonal_bisectional(
        &self,
        x: &DVector<Complex64>,
        y: &DVector<Complex64>,
    ) -> Result<f64, CurvatureError> {
        let (nx, ny) = (x.norm(), y.norm());
        if nx < 1e-14 || ny < 1e-14 {
            return Err(CurvatureError::ZeroVector);
        }
        let inner = x.dotc(y).norm() / (nx * ny);
        if inner > ORTHOGONALITY_TOL {
            return Err(CurvatureError::NotOrthogonal { inner });
        }
        Ok(self.bisectional(x, y) / (nx * nx * ny * ny))
    }

    /// Components in a new unitary frame whose vectors are the columns of `u`:
    /// R'_{a b̄ c d̄} = Σ R_{i j̄ k l̄} U_{ia} conj(U_{jb}) U_{kc} conj(U_{ld}).
    pub fn unitary_transform(&self, u: &DMatrix<Complex64>) -> Self {
        let n = self.n;
        // Contract one slot at a time; n ≤ 8 so O(n^5) is nothing.
        let mut cur = self.entries.clone();
        for slot in 0..4 {
            let mut next = vec![Complex64::new(0.0, 0.0); n * n * n * n];
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            let idx = [i, j, k, l];
                            let mut acc = Complex64::new(0.0, 0.0);
                            for m in 0..n {
                                let mut src = idx;
                                src[slot] = m;
                                let w = if slot % 2 == 0 {
                                    u[(m, idx[slot])]
                                } else {
                                    u[(m, idx[slot])].conj()
                                };
                                acc += cur[Self::flat(n, src[0], src[1], src[2], src[3])] * w;
                            }
                            next[Self::flat(n, i, j, k, l)] = acc;
                        }
                    }
                }
            }
            cur = next;
        }
        Self { n, entries: cur }
    }

    /// Entrywise linear combination a·self + b·other.
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Self {
        assert_eq!(self.n, other.n);
        let entries = self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(x, y)| x * a + y * b)
            .collect();
        Self { n: self.n, entries }
    }

    /// Entrywise scaling s·self.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|x| x * s).collect(),
        }
    }

    /// Max |entry|.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Construct from pre-validated entries. Used internally where the
    /// symmetry is guaranteed by construction; debug builds sanity-check
    /// loosely (callers with a real tolerance contract validate
    /// explicitly).
    pub(crate) fn from_entries_unchecked(entries: Vec<Complex64>, n: usize) -> Self {
        let t = Self { n, entries };
        debug_assert!(t.max_symmetry_violation() < 1e-6 * (1.0 + t.max_abs()));
        t
    }

    /// Serialize as the exchange format: a generating set of entries,
    /// 1-based indices, one representative per symmetry orbit.
    pub fn to_exchange_json(&self) -> TensorExchange {
        let n = self.n;
        let mut seen = vec![false; n * n * n * n];
        let mut entries = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        if seen[Self::flat(n, i, j, k, l)] {
                            continue;
                        }
                        for (idx, _) in symmetry_orbit([i, j, k, l]) {
                            seen[Self::flat(n, idx[0], idx[1], idx[2], idx[3])] = true;
                        }
                        let v = self.get(i, j, k, l);
                        if v.norm() > 0.0 {
                            entries.push([
                                (i + 1) as f64,
                                (j + 1) as f64,
                                (k + 1) as f64,
                                (l + 1) as f64,
                                v.re,
                                v.im,
                            ]);
                        }
                    }
                }
            }
        }
        TensorExchange { n, entries }
    }

    /// Read the exchange format: complete each listed entry across its
    /// symmetry orbit, reject conflicts, validate the result.
    pub fn from_exchange_json(ex: &TensorExchange) -> Result<Self, CurvatureError> {
        let n = ex.n;
        if n < 2 {
            return Err(CurvatureError::DimensionTooSmall(n));
        }
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n * n * n];
        let mut set = vec![false; n * n * n * n];
        for e in &ex.entries {
            let raw = [e[0] as i64, e[1] as i64, e[2] as i64, e[3] as i64];
            if raw.iter().any(|&x| x < 1 || x > n as i64) {
                return Err(CurvatureError::IndexOutOfRange(raw));
            }
            let idx = [
                raw[0] as usize - 1,
                raw[1] as usize - 1,
                raw[2] as usize - 1,
                raw[3] as usize - 1,
            ];
            let v = Complex64::new(e[4], e[5]);
            for (img, conj) in symmetry_orbit(idx) {
                let w = if conj { v.conj() } else { v };
                let f = Self::flat(n, img[0], img[1], img[2], img[3]);
                if set[f] && (entries[f] - w).norm() > SYMMETRY_TOL {
                    return Err(CurvatureError::ConflictingEntries(img));
                }
                entries[f] = w;
                set[f] = true;
            }
        }
        Self::from_entries(entries, n)
    }
}

/// Serde shape of the tensor exchange format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TensorExchange {
    pub n: usize,
    pub entries: Vec<[f64; 6]>,
}

/// The model tensor (g*g)_{i j̄ k l̄} = δ_{ij}δ_{kl} + δ_{il}δ_{kj} against
/// the identity metric. R = (c/2)(g*g) is the constant-curvature tensor.
#[derive(Clone, Copy, Debug)]
pub struct GgTensor {
    n: usize,
}

impl GgTensor {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry (g*g)_{i j̄ k l̄}, 0-based.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let mut v = 0.0;
        if i == j && k == l {
            v += 1.0;
        }
        if i == l && k == j {
            v += 1.0;
        }
        v
    }

    /// Bisectional pairing (g*g)(X, X̄, Y, Ȳ) = |X|²|Y|² + |⟨X,Y⟩|².
    pub fn bisectional(&self, x: &DVector<Complex64>, y: &DVector<Complex64>) -> f64 {
        x.norm_squared() * y.norm_squared() + x.dotc(y).norm_sqr()
    }

    /// Materialize as a full curvature tensor (equals constant curvature c = 2).
    pub fn as_tensor(&self) -> KahlerCurvatureTensor {
        KahlerCurvatureTensor::constant_curvature(self.n, 2.0).unwrap()
    }
}
