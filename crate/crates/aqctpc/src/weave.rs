//! Tensor-product and concatenated matrices, and the AQCTPC CSS pair.
//!
//! The inner generator is brought to standard form `(I | A)` before any
//! block matrix is built; each length-`n1` block of the outputs is then
//! mapped back to the inner code's original coordinates.

use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::codes::{
    coset_min_weight, min_distance_exhaustive, CodeError, DistanceKind, Enumerated, LinearCode, NestedOuterPair,
    DEFAULT_ENUMERATION_CAP,
};
use crate::galois::Field;
use crate::matgf::{MatError, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeaveError {
    #[error(transparent)]
    Matrix(#[from] MatError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("outer field must be the degree-{expected} extension of the inner field, got degree {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("outer codes have different lengths")]
    LengthMismatch,
    #[error("C3^⊥ is not contained in C2")]
    ContainmentUnverified,
    #[error("the quantum code would have dimension {0} <= 0")]
    NonPositiveDimension(i64),
    #[error("inner code distance is unknown and too large to enumerate")]
    UnknownDistance,
    #[error("CSS condition fails: H_Z · H_X^T has a nonzero entry at ({row}, {col})")]
    NotOrthogonal { row: usize, col: usize },
    #[error("{which} has rank {rank}, expected {expected}")]
    Rank {
        which: &'static str,
        rank: usize,
        expected: usize,
    },
    #[error("partition sizes {sizes:?} do not sum to the inner dimension {k}")]
    Partition { sizes: Vec<usize>, k: usize },
    #[error("level {level}: the outer pair fails C^⊥ ⊆ B")]
    LevelContainment { level: usize },
}

/// The inner code in standard form.
#[derive(Debug, Clone)]
pub struct StandardInner {
    /// `(I_k | A)`.
    pub g: Matrix,
    /// `(−A^T | I_r)`, so `P1 = −A^T` and `P2 = I`.
    pub h: Matrix,
    /// Standard-frame column `j` is original column `perm[j]`.
    pub perm: Vec<usize>,
}

impl StandardInner {
    pub fn new(c1: &LinearCode) -> Result<StandardInner, WeaveError> {
        let sf = c1.generator().standard_form()?;
        let (k, n) = (c1.k(), c1.n());
        let f = c1.field();
        let mut h = Matrix::zeros(f, n - k, n);
        for i in 0..n - k {
            for j in 0..k {
                h.set(i, j, f.neg(sf.matrix.get(j, k + i)));
            }
            h.set(i, k + i, 1);
        }
        Ok(StandardInner {
            g: sf.matrix,
            h,
            perm: sf.perm,
        })
    }

    pub fn k(&self) -> usize {
        self.g.rows()
    }

    pub fn n(&self) -> usize {
        self.g.cols()
    }

    /// `A` as a `k × r` matrix.
    pub fn a(&self) -> Matrix {
        let k = self.k();
        self.g.select_cols(&(k..self.n()).collect::<Vec<_>>())
    }

    /// Column permutation on `n2` blocks mapping standard-frame positions to original ones.
    pub fn block_perm(&self, n2: usize) -> Vec<usize> {
        let n1 = self.n();
        (0..n1 * n2).map(|i| (i / n1) * n1 + self.perm[i % n1]).collect()
    }

    /// Reorders a length-`n1 n2` vector from the original frame into the standard frame.
    pub fn to_standard(&self, v: &[u32]) -> Vec<u32> {
        let n1 = self.n();
        (0..v.len()).map(|i| v[(i / n1) * n1 + self.perm[i % n1]]).collect()
    }

    /// Inverse of [`StandardInner::to_standard`].
    pub fn from_standard(&self, v: &[u32]) -> Vec<u32> {
        let n1 = self.n();
        let mut out = vec![0; v.len()];
        for (i, &x) in v.iter().enumerate() {
            out[(i / n1) * n1 + self.perm[i % n1]] = x;
        }
        out
    }
}

fn check_degree(inner: &Arc<Field>, outer: &Arc<Field>, expected: usize) -> Result<(), WeaveError> {
    let base_ok = match outer.base() {
        Some(b) => b == inner,
        None => outer == inner,
    };
    if !base_ok || outer.degree() as usize != expected {
        return Err(WeaveError::DegreeMismatch {
            expected,
            got: outer.degree() as usize,
        });
    }
    Ok(())
}

/// Parity check of the tensor product code, `[H_c2^t] ⊗ H_c1`.
pub fn tpc_parity(c1: &LinearCode, c2: &LinearCode) -> Result<Matrix, WeaveError> {
    check_degree(c1.field(), c2.field(), c1.r())?;
    if c2.r() == 0 {
        return Ok(Matrix::zeros(c1.field(), 0, c1.n() * c2.n()));
    }
    Ok(Matrix::kron_companion(c2.parity(), c1.parity(), true)?)
}

/// X checks `[H_c2^t] ⊗ G_c1` with `G_c1` in standard form.
pub fn aqctpc_x_checks(c1: &LinearCode, c2: &LinearCode) -> Result<Matrix, WeaveError> {
    let std = StandardInner::new(c1)?;
    x_checks(&std, c1.field(), c2)
}

fn x_checks(std: &StandardInner, base: &Arc<Field>, c2: &LinearCode) -> Result<Matrix, WeaveError> {
    check_degree(base, c2.field(), std.k())?;
    if c2.r() == 0 {
        return Ok(Matrix::zeros(base, 0, std.n() * c2.n()));
    }
    let m = Matrix::kron_companion(c2.parity(), &std.g, true)?;
    Ok(m.unpermute_cols(&std.block_perm(c2.n())))
}

/// Parity check of the concatenated code: `[H_c3] ⊗ (I_k1, 0)` over `[I_n2] ⊗ H_c1`.
pub fn cc_parity(c1: &LinearCode, c3: &LinearCode) -> Result<Matrix, WeaveError> {
    let std = StandardInner::new(c1)?;
    cc_parity_std(&std, c1.field(), c3)
}

fn top_selector(std: &StandardInner, base: &Arc<Field>) -> Matrix {
    let mut sel = Matrix::zeros(base, std.k(), std.n());
    for i in 0..std.k() {
        sel.set(i, i, 1);
    }
    sel
}

fn cc_parity_std(std: &StandardInner, base: &Arc<Field>, c3: &LinearCode) -> Result<Matrix, WeaveError> {
    check_degree(base, c3.field(), std.k())?;
    let n2 = c3.n();
    let top = if c3.r() == 0 {
        Matrix::zeros(base, 0, std.n() * n2)
    } else {
        Matrix::kron_companion(c3.parity(), &top_selector(std, base), false)?
    };
    let bottom = std.h.kron_identity(n2);
    Ok(top.vstack(&bottom)?.unpermute_cols(&std.block_perm(n2)))
}

/// Generator of the concatenated code, `[G_c3^t] ⊗ G_c1`.
pub fn cc_generator(c1: &LinearCode, c3: &LinearCode) -> Result<Matrix, WeaveError> {
    let std = StandardInner::new(c1)?;
    cc_generator_std(&std, c1.field(), c3)
}

fn cc_generator_std(std: &StandardInner, base: &Arc<Field>, c3: &LinearCode) -> Result<Matrix, WeaveError> {
    check_degree(base, c3.field(), std.k())?;
    if c3.k() == 0 {
        return Ok(Matrix::zeros(base, 0, std.n() * c3.n()));
    }
    let m = Matrix::kron_companion(c3.generator(), &std.g, true)?;
    Ok(m.unpermute_cols(&std.block_perm(c3.n())))
}

/// `[[N, K, d_Z / d_X]]` together with the constituent parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Parameters {
    pub n: usize,
    pub k: usize,
    /// Lower bound `d1 · d3`.
    pub dz: usize,
    /// Lower bound `d2`.
    pub dx: usize,
    pub n1: usize,
    pub k1: usize,
    pub d1: usize,
    pub n2: usize,
    pub k2: usize,
    pub d2: usize,
    pub k3: usize,
    pub d3: usize,
}

impl Parameters {
    /// Parameters implied by the constituents, without building matrices.
    pub fn from_constituents(n1: usize, k1: usize, d1: usize, n2: usize, d2: usize, d3: usize) -> Option<Parameters> {
        let k2 = (n2 + 1).checked_sub(d2)?;
        let k3 = (n2 + 1).checked_sub(d3)?;
        let s = (k2 + k3).checked_sub(n2)?;
        Some(Parameters {
            n: n1 * n2,
            k: k1 * s,
            dz: d1 * d3,
            dx: d2,
            n1,
            k1,
            d1,
            n2,
            k2,
            d2,
            k3,
            d3,
        })
    }
}

impl std::fmt::Display for Parameters {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[[{}, {}, {}/{}]]", self.n, self.k, self.dz, self.dx)
    }
}

/// An asymmetric quantum concatenated and tensor product code.
#[derive(Debug)]
pub struct AqctpcCode {
    c1: LinearCode,
    std: StandardInner,
    pair: NestedOuterPair,
    hx: Matrix,
    hz: Matrix,
    gcc: Matrix,
    params: Parameters,
    krylov: Matrix,
    krylov_inv: Matrix,
    tpc_generator: OnceLock<Matrix>,
}

fn inner_distance(c1: &LinearCode) -> Result<usize, WeaveError> {
    match c1.distance().kind {
        DistanceKind::Unknown => match min_distance_exhaustive(c1, DEFAULT_ENUMERATION_CAP) {
            Enumerated::Exact(d) => Ok(d),
            Enumerated::NotComputed { .. } => Err(WeaveError::UnknownDistance),
        },
        _ => Ok(c1.distance().value),
    }
}

/// Krylov matrix `K` with `M K = K M^T` for the companion `M` of the modulus.
fn krylov(ext: &Arc<Field>, base: &Arc<Field>) -> (Matrix, Matrix) {
    let m = ext.degree() as usize;
    if m == 1 {
        return (Matrix::identity(base, 1), Matrix::identity(base, 1));
    }
    let cm = ext.companion_of_modulus();
    for start in (0..m).rev() {
        let mut k = Matrix::zeros(base, m, m);
        let mut col = vec![0u32; m];
        col[start] = 1;
        for c in 0..m {
            for (r, &v) in col.iter().enumerate() {
                k.set(r, c, v);
            }
            col = cm.mul_vec(&col).expect("square");
        }
        if let Ok(inv) = k.invert() {
            debug_assert_eq!(cm.mul(&k).unwrap(), k.mul(&cm.transpose()).unwrap());
            return (k, inv);
        }
    }
    unreachable!("the companion matrix of an irreducible polynomial is cyclic")
}

impl AqctpcCode {
    /// Assembles and verifies the CSS pair from an inner code and a nested outer pair.
    pub fn build(c1: LinearCode, pair: NestedOuterPair) -> Result<AqctpcCode, WeaveError> {
        if pair.verify().is_err() {
            return Err(WeaveError::ContainmentUnverified);
        }
        let (c2, c3) = (&pair.c2, &pair.c3);
        if c2.n() != c3.n() {
            return Err(WeaveError::LengthMismatch);
        }
        let base = Arc::clone(c1.field());
        let std = StandardInner::new(&c1)?;
        let (n1, k1, n2) = (c1.n(), c1.k(), c2.n());
        let s = (c2.k() + c3.k()) as i64 - n2 as i64;
        if s <= 0 {
            return Err(WeaveError::NonPositiveDimension(k1 as i64 * s));
        }
        let hx = x_checks(&std, &base, c2)?;
        let hz = cc_parity_std(&std, &base, c3)?;
        let gcc = cc_generator_std(&std, &base, c3)?;
        let d1 = inner_distance(&c1)?;
        let params = Parameters {
            n: n1 * n2,
            k: k1 * s as usize,
            dz: d1 * c3.distance().value,
            dx: c2.distance().value,
            n1,
            k1,
            d1,
            n2,
            k2: c2.k(),
            d2: c2.distance().value,
            k3: c3.k(),
            d3: c3.distance().value,
        };
        let (krylov, krylov_inv) = krylov(c2.field(), &base);
        let code = AqctpcCode {
            c1,
            std,
            pair,
            hx,
            hz,
            gcc,
            params,
            krylov,
            krylov_inv,
            tpc_generator: OnceLock::new(),
        };
        code.verify()?;
        Ok(code)
    }

    /// Checks the CSS condition, the ranks and the dimension identity.
    pub fn verify(&self) -> Result<(), WeaveError> {
        verify_css(&self.hx, &self.hz)?;
        let p = &self.params;
        let expect_x = p.k1 * (p.n2 - p.k2);
        let expect_z = p.n - p.k1 * p.k3;
        for (which, m, expected) in [("H_X", &self.hx, expect_x), ("H_Z", &self.hz, expect_z)] {
            let rank = m.rank();
            if rank != expected {
                return Err(WeaveError::Rank { which, rank, expected });
            }
        }
        if !self.gcc.mul_transpose(&self.hz)?.is_zero() {
            return Err(WeaveError::Rank {
                which: "G_CC against H_Z",
                rank: 1,
                expected: 0,
            });
        }
        debug_assert_eq!(p.n - expect_x - expect_z, p.k);
        Ok(())
    }

    pub fn params(&self) -> Parameters {
        self.params
    }

    pub fn inner(&self) -> &LinearCode {
        &self.c1
    }

    pub fn standard_inner(&self) -> &StandardInner {
        &self.std
    }

    pub fn pair(&self) -> &NestedOuterPair {
        &self.pair
    }

    pub fn outer_field(&self) -> &Arc<Field> {
        self.pair.c2.field()
    }

    pub fn base_field(&self) -> &Arc<Field> {
        self.c1.field()
    }

    /// `H_X = H_{𝒞_T}`.
    pub fn hx(&self) -> &Matrix {
        &self.hx
    }

    /// `H_Z = H_{𝒞_C}`.
    pub fn hz(&self) -> &Matrix {
        &self.hz
    }

    /// `G_{𝒞_C}`.
    pub fn gcc(&self) -> &Matrix {
        &self.gcc
    }

    /// Number of rows in the outer (top) block of `H_Z`.
    pub fn hz_top_rows(&self) -> usize {
        self.params.k1 * self.pair.c3.r()
    }

    /// Generator of `𝒞_T`, the kernel of `H_X`, computed on first use.
    pub fn tpc_generator(&self) -> &Matrix {
        self.tpc_generator.get_or_init(|| self.hx.kernel())
    }

    /// Symbol for a top-block coordinate vector: `sym(K^{-1} x)`.
    pub fn z_symbol(&self, x: &[u32]) -> u32 {
        let v = self.krylov_inv.mul_vec(x).expect("length k1");
        self.outer_field().vector_to_symbol(&v).expect("length k1")
    }

    /// Inverse of [`AqctpcCode::z_symbol`].
    pub fn z_vector(&self, s: u32) -> Vec<u32> {
        self.krylov
            .mul_vec(&self.outer_field().symbol_to_vector(s))
            .expect("length k1")
    }

    /// Exact `(d_Z, d_X)` via coset enumeration, if both fit in `cap`.
    pub fn exact_distances(&self, cap: u128) -> Result<(usize, usize), WeaveError> {
        let base = self.base_field();
        let cc = LinearCode::from_matrices(base, Some(self.gcc.clone()), None)?;
        let tpc_dual = LinearCode::from_matrices(base, Some(self.hx.clone()), None)?;
        let dz = coset_min_weight(&cc, &tpc_dual, cap)?.weight;
        let tpc = LinearCode::from_matrices(base, Some(self.tpc_generator().clone()), None)?;
        let cc_dual = LinearCode::from_matrices(base, Some(self.hz.clone()), None)?;
        let dx = coset_min_weight(&tpc, &cc_dual, cap)?.weight;
        Ok((dz, dx))
    }
}

/// Fails with the first nonzero entry of `H_Z · H_X^T`.
pub fn verify_css(hx: &Matrix, hz: &Matrix) -> Result<(), WeaveError> {
    let prod = hz.mul_transpose(hx)?;
    for r in 0..prod.rows() {
        if let Some(c) = prod.row(r).iter().position(|&v| v != 0) {
            return Err(WeaveError::NotOrthogonal { row: r, col: c });
        }
    }
    Ok(())
}

/// Collection of duals: blocks `Ĥ_1 … Ĥ_L` matching the partition of `g`'s rows, then the parity block.
///
/// `Ĥ_ℓ 𝐆_ℏ^T` is zero for `ℓ ≠ ℏ` and the identity for `ℓ = ℏ`.
pub fn cdm(g: &Matrix, sizes: &[usize]) -> Result<Vec<Matrix>, WeaveError> {
    let k = g.rows();
    if sizes.iter().sum::<usize>() != k || sizes.contains(&0) {
        return Err(WeaveError::Partition {
            sizes: sizes.to_vec(),
            k,
        });
    }
    let rref = g.rref();
    if rref.rank != k {
        return Err(MatError::RankDeficient {
            rank: rref.rank,
            expected: k,
        }
        .into());
    }
    let gj = g.select_cols(&rref.pivots);
    let dj = gj.transpose().invert()?;
    let mut d = Matrix::zeros(g.field(), k, g.cols());
    for r in 0..k {
        for (c, &p) in rref.pivots.iter().enumerate() {
            d.set(r, p, dj.get(r, c));
        }
    }
    let mut out = Vec::with_capacity(sizes.len() + 1);
    let mut start = 0;
    for &s in sizes {
        out.push(d.select_rows(&(start..start + s).collect::<Vec<_>>()));
        start += s;
    }
    out.push(g.kernel());
    Ok(out)
}

/// Inputs of the generalized construction.
///
/// Level `ℓ` uses the rows of `inner` in partition block `ℓ` together with
/// outer codes `b[ℓ]` (X side) and `c[ℓ]` (Z side) over the degree-`sizes[ℓ]`
/// extension, with `c[ℓ]^⊥ ⊆ b[ℓ]`.
#[derive(Debug, Clone)]
pub struct GeneralizedSpec {
    pub inner: Matrix,
    pub sizes: Vec<usize>,
    pub b: Vec<LinearCode>,
    pub c: Vec<LinearCode>,
}

/// Output of [`build_generalized`].
#[derive(Debug, Clone)]
pub struct GeneralizedCode {
    pub hx: Matrix,
    pub hz: Matrix,
    pub n: usize,
    pub k: usize,
    /// Lower bound on `d_Z`, when every needed distance is known.
    pub dz: Option<usize>,
    /// Lower bound on `d_X`.
    pub dx: usize,
}

/// Builds the generalized CSS pair and checks orthogonality and the dimension identity.
pub fn build_generalized(spec: &GeneralizedSpec) -> Result<GeneralizedCode, WeaveError> {
    let base = spec.inner.field();
    let levels = spec.sizes.len();
    if spec.b.len() != levels || spec.c.len() != levels {
        return Err(WeaveError::Partition {
            sizes: spec.sizes.clone(),
            k: spec.inner.rows(),
        });
    }
    let nb = spec.b[0].n();
    if spec.b.iter().chain(&spec.c).any(|code| code.n() != nb) {
        return Err(WeaveError::LengthMismatch);
    }
    let hats = cdm(&spec.inner, &spec.sizes)?;
    let n_a = spec.inner.cols();
    let mut hx = Matrix::zeros(base, 0, n_a * nb);
    let mut hz = Matrix::zeros(base, 0, n_a * nb);
    let mut start = 0;
    let mut k_total = 0i64;
    for (l, hat) in hats.iter().enumerate().take(levels) {
        let (b, c, size) = (&spec.b[l], &spec.c[l], spec.sizes[l]);
        check_degree(base, b.field(), size)?;
        check_degree(base, c.field(), size)?;
        if !c.parity().mul_transpose(b.parity())?.is_zero() {
            return Err(WeaveError::LevelContainment { level: l + 1 });
        }
        let gl = spec.inner.select_rows(&(start..start + size).collect::<Vec<_>>());
        start += size;
        if b.r() > 0 {
            hx = hx.vstack(&Matrix::kron_companion(b.parity(), &gl, true)?)?;
        }
        if c.r() > 0 {
            hz = hz.vstack(&Matrix::kron_companion(c.parity(), hat, false)?)?;
        }
        k_total += size as i64 * (b.k() as i64 + c.k() as i64 - nb as i64);
    }
    hz = hz.vstack(&hats[levels].kron_identity(nb))?;
    verify_css(&hx, &hz)?;
    let n = n_a * nb;
    let (rx, rz) = (hx.rank(), hz.rank());
    let k = n as i64 - rx as i64 - rz as i64;
    if k != k_total {
        return Err(WeaveError::Rank {
            which: "generalized dimension",
            rank: k.max(0) as usize,
            expected: k_total.max(0) as usize,
        });
    }
    if k <= 0 {
        return Err(WeaveError::NonPositiveDimension(k));
    }
    let dx = spec.b.iter().map(|b| b.distance().value).min().unwrap_or(0);
    let mut dz = Some(usize::MAX);
    let mut start = 0;
    for l in 0..levels {
        let chain = spec.inner.select_rows(&(start..spec.inner.rows()).collect::<Vec<_>>());
        start += spec.sizes[l];
        let chain_code = LinearCode::from_matrices(base, Some(chain), None)?;
        let d_chain = match min_distance_exhaustive(&chain_code, DEFAULT_ENUMERATION_CAP) {
            Enumerated::Exact(d) => Some(d),
            Enumerated::NotComputed { .. } => None,
        };
        let dc = spec.c[l].distance();
        dz = match (dz, d_chain, dc.kind) {
            (Some(cur), Some(da), kind) if kind != DistanceKind::Unknown => Some(cur.min(da * dc.value)),
            _ => None,
        };
    }
    Ok(GeneralizedCode {
        hx,
        hz,
        n,
        k: k as usize,
        dz,
        dx,
    })
}
