//! Linear codes, constituent families and distance oracles.

use std::sync::Arc;

use thiserror::Error;

use crate::galois::Field;
use crate::matgf::{MatError, Matrix};

/// Default budget for exhaustive enumeration, in codeword-coordinate visits.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error(transparent)]
    Matrix(#[from] MatError),
    #[error("a generator or a parity-check matrix is required")]
    NoMatrices,
    #[error("generator and parity-check matrices are not orthogonal")]
    NotOrthogonal,
    #[error("{which} matrix has rank {rank}, expected {expected}")]
    NotFullRank {
        which: &'static str,
        rank: usize,
        expected: usize,
    },
    #[error("invalid parameters: {0}")]
    Parameters(String),
    #[error("evaluation points must be distinct")]
    RepeatedPoint,
    #[error("multipliers must be nonzero")]
    ZeroMultiplier,
    #[error("codes differ in field or length")]
    Incompatible,
    #[error("row {row} of the first code is not in the second")]
    NotSubcode { row: usize },
    #[error("the set difference of the two codes is empty")]
    EmptyDifference,
    #[error("enumeration needs {work} steps, above the cap {cap}")]
    TooLarge { work: u128, cap: u128 },
    #[error("no nested MDS pair: {0}")]
    NoMdsPair(String),
    #[error("containment check failed for the constructed pair")]
    ContainmentFailed,
}

/// How a distance value is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceKind {
    /// Computed by exhaustive enumeration.
    Exact,
    /// Known from the family construction.
    Family,
    /// A proven lower bound.
    LowerBound,
    /// Not known.
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Distance {
    pub value: usize,
    pub kind: DistanceKind,
}

impl Distance {
    pub fn unknown() -> Distance {
        Distance {
            value: 0,
            kind: DistanceKind::Unknown,
        }
    }

    pub fn family(value: usize) -> Distance {
        Distance {
            value,
            kind: DistanceKind::Family,
        }
    }
}

/// Parity check in the canonical GRS form `H[i][j] = y_j · a_j^i`.
///
/// Present only for nonzero evaluation points, which is what the
/// Berlekamp–Massey decoder needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrsParity {
    pub points: Vec<u32>,
    pub multipliers: Vec<u32>,
}

/// An evaluation point of a (doubly-extended) GRS code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Point {
    Finite(u32),
    Infinity,
}

/// A linear `[n, k, d]` code with orthogonal generator and parity-check matrices.
#[derive(Debug, Clone)]
pub struct LinearCode {
    field: Arc<Field>,
    n: usize,
    k: usize,
    g: Matrix,
    h: Matrix,
    distance: Distance,
    grs: Option<GrsParity>,
}

impl LinearCode {
    /// Builds a code from a generator, a parity check, or both.
    pub fn from_matrices(field: &Arc<Field>, g: Option<Matrix>, h: Option<Matrix>) -> Result<LinearCode, CodeError> {
        let (g, h) = match (g, h) {
            (None, None) => return Err(CodeError::NoMatrices),
            (Some(g), None) => {
                let h = g.kernel();
                (g, h)
            }
            (None, Some(h)) => {
                let g = h.kernel();
                (g, h)
            }
            (Some(g), Some(h)) => (g, h),
        };
        if g.field() != field || h.field() != field {
            return Err(MatError::FieldMismatch.into());
        }
        let n = g.cols();
        if h.cols() != n {
            return Err(MatError::Dimension("generator and parity lengths differ".into()).into());
        }
        let (rg, rh) = (g.rank(), h.rank());
        if rg != g.rows() {
            return Err(CodeError::NotFullRank {
                which: "generator",
                rank: rg,
                expected: g.rows(),
            });
        }
        if rh != h.rows() {
            return Err(CodeError::NotFullRank {
                which: "parity-check",
                rank: rh,
                expected: h.rows(),
            });
        }
        if rg + rh != n {
            return Err(CodeError::NotFullRank {
                which: "parity-check",
                rank: rh,
                expected: n - rg,
            });
        }
        if !g.mul_transpose(&h)?.is_zero() {
            return Err(CodeError::NotOrthogonal);
        }
        Ok(LinearCode {
            field: Arc::clone(field),
            n,
            k: rg,
            g,
            h,
            distance: Distance::unknown(),
            grs: None,
        })
    }

    /// Attaches a distance record.
    pub fn with_distance(mut self, distance: Distance) -> LinearCode {
        self.distance = distance;
        self
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Redundancy `n − k`.
    pub fn r(&self) -> usize {
        self.n - self.k
    }

    pub fn generator(&self) -> &Matrix {
        &self.g
    }

    pub fn parity(&self) -> &Matrix {
        &self.h
    }

    pub fn distance(&self) -> Distance {
        self.distance
    }

    pub fn grs_parity(&self) -> Option<&GrsParity> {
        self.grs.as_ref()
    }

    /// The dual code, with generator and parity check swapped.
    pub fn dual(&self) -> LinearCode {
        LinearCode {
            field: Arc::clone(&self.field),
            n: self.n,
            k: self.n - self.k,
            g: self.h.clone(),
            h: self.g.clone(),
            distance: Distance::unknown(),
            grs: None,
        }
    }

    /// `H · e^T`.
    pub fn syndrome(&self, e: &[u32]) -> Vec<u32> {
        self.h.mul_vec(e).expect("length checked by caller")
    }

    /// `msg · G`.
    pub fn encode(&self, msg: &[u32]) -> Vec<u32> {
        self.g.vec_mul(msg).expect("length checked by caller")
    }

    /// True if `v` is a codeword.
    pub fn contains(&self, v: &[u32]) -> bool {
        v.len() == self.n && self.syndrome(v).iter().all(|&s| s == 0)
    }
}

fn binary() -> Arc<Field> {
    Field::prime(2).expect("2 is prime")
}

/// The binary `[m1+1, m1, 2]` single-parity-check code.
pub fn spc_code(m1: usize) -> Result<LinearCode, CodeError> {
    if m1 < 2 {
        return Err(CodeError::Parameters(format!("SPC needs m1 >= 2, got {m1}")));
    }
    let f = binary();
    let h = Matrix::from_data(&f, 1, m1 + 1, vec![1; m1 + 1])?;
    let mut g = Matrix::zeros(&f, m1, m1 + 1);
    for i in 0..m1 {
        g.set(i, i, 1);
        g.set(i, m1, 1);
    }
    Ok(LinearCode::from_matrices(&f, Some(g), Some(h))?.with_distance(Distance::family(2)))
}

/// The binary `[n, 1, n]` repetition code.
pub fn repetition_code(n: usize) -> Result<LinearCode, CodeError> {
    if n < 2 {
        return Err(CodeError::Parameters(format!("repetition needs n >= 2, got {n}")));
    }
    let f = binary();
    let g = Matrix::from_data(&f, 1, n, vec![1; n])?;
    Ok(LinearCode::from_matrices(&f, Some(g), None)?.with_distance(Distance::family(n)))
}

/// The binary `[2^m − 1, m, 2^{m−1}]` simplex code.
///
/// Column `j` of the generator is the binary expansion of `j + 1`, bit `i` in row `i`.
pub fn simplex_code(m: usize) -> Result<LinearCode, CodeError> {
    if !(2..=20).contains(&m) {
        return Err(CodeError::Parameters(format!("simplex needs 2 <= m <= 20, got {m}")));
    }
    let f = binary();
    let n = (1usize << m) - 1;
    let mut g = Matrix::zeros(&f, m, n);
    for j in 0..n {
        for i in 0..m {
            g.set(i, j, ((j + 1) >> i & 1) as u32);
        }
    }
    Ok(LinearCode::from_matrices(&f, Some(g), None)?.with_distance(Distance::family(1 << (m - 1))))
}

/// The first-order binary Reed–Muller code `[2^m, m+1, 2^{m−1}]`.
pub fn reed_muller_1(m: usize) -> Result<LinearCode, CodeError> {
    if !(2..=16).contains(&m) {
        return Err(CodeError::Parameters(format!("RM(1,m) needs 2 <= m <= 16, got {m}")));
    }
    let f = binary();
    let n = 1usize << m;
    let mut g = Matrix::zeros(&f, m + 1, n);
    for j in 0..n {
        g.set(0, j, 1);
        for i in 0..m {
            g.set(i + 1, j, (j >> i & 1) as u32);
        }
    }
    Ok(LinearCode::from_matrices(&f, Some(g), None)?.with_distance(Distance::family(n / 2)))
}

/// Generalized Reed–Solomon code.
///
/// Row `i` of the generator evaluates `x^i` at each finite point, scaled by
/// the column multiplier; the infinity column is the indicator of `i = k − 1`.
pub fn grs_code(field: &Arc<Field>, k: usize, points: &[Point], multipliers: &[u32]) -> Result<LinearCode, CodeError> {
    let n = points.len();
    if multipliers.len() != n || k > n || n as u64 > field.order() as u64 + 1 {
        return Err(CodeError::Parameters(format!(
            "GRS with n = {n}, k = {k}, {} multipliers over a field of order {}",
            multipliers.len(),
            field.order()
        )));
    }
    let mut seen = vec![false; field.order() as usize + 1];
    for p in points {
        let slot = match *p {
            Point::Finite(a) if a < field.order() => a as usize,
            Point::Finite(a) => return Err(MatError::BadEntry(a).into()),
            Point::Infinity => field.order() as usize,
        };
        if std::mem::replace(&mut seen[slot], true) {
            return Err(CodeError::RepeatedPoint);
        }
    }
    if multipliers.contains(&0) {
        return Err(CodeError::ZeroMultiplier);
    }
    let g = grs_rows(field, k, points, multipliers);
    let grs = grs_canonical_parity(field, k, points, multipliers);
    let h = match &grs {
        Some(par) => {
            let mut h = Matrix::zeros(field, n - k, n);
            for i in 0..n - k {
                for j in 0..n {
                    h.set(i, j, field.mul(par.multipliers[j], field.pow(par.points[j], i as u64)));
                }
            }
            h
        }
        None => g.kernel(),
    };
    let mut code = LinearCode::from_matrices(field, Some(g), Some(h))?.with_distance(Distance::family(n - k + 1));
    code.grs = grs;
    Ok(code)
}

fn grs_rows(field: &Arc<Field>, k: usize, points: &[Point], multipliers: &[u32]) -> Matrix {
    let mut g = Matrix::zeros(field, k, points.len());
    for i in 0..k {
        for (j, p) in points.iter().enumerate() {
            let v = match *p {
                Point::Finite(a) => field.pow(a, i as u64),
                Point::Infinity => u32::from(i + 1 == k),
            };
            g.set(i, j, field.mul(multipliers[j], v));
        }
    }
    g
}

/// Dual multipliers `y_j = 1 / (v_j ∏_{i≠j} (a_j − a_i))` when every point is finite and nonzero.
fn grs_canonical_parity(field: &Arc<Field>, k: usize, points: &[Point], multipliers: &[u32]) -> Option<GrsParity> {
    let finite: Vec<u32> = points
        .iter()
        .map(|p| match *p {
            Point::Finite(a) if a != 0 => Some(a),
            _ => None,
        })
        .collect::<Option<_>>()?;
    if k == 0 {
        return None;
    }
    let y = finite
        .iter()
        .enumerate()
        .map(|(j, &aj)| {
            let prod = finite
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .fold(1, |acc, (_, &ai)| field.mul(acc, field.sub(aj, ai)));
            field.inv(field.mul(multipliers[j], prod))
        })
        .collect();
    Some(GrsParity {
        points: finite,
        multipliers: y,
    })
}

/// How a nested pair was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairConstruction {
    /// GRS codes on a common set of finite points.
    SharedPoints,
    /// Doubly-extended RS, `C3^⊥ = C2`.
    SelfDualPair,
    /// Doubly-extended RS with `C3^⊥` the multiples of a root-free polynomial.
    RootFreeMultiples { degree: usize },
    /// Doubly-extended RS nested with a conic (oval) code of dimension 3.
    Oval,
    /// Supplied as matrices; no evaluation points are known.
    Explicit,
}

/// Outer codes `C2`, `C3` over the same field with `C3^⊥ ⊆ C2`.
#[derive(Debug, Clone)]
pub struct NestedOuterPair {
    pub c2: LinearCode,
    pub c3: LinearCode,
    pub construction: PairConstruction,
    /// Evaluation point of each coordinate; empty for explicit pairs.
    pub points: Vec<Point>,
}

impl NestedOuterPair {
    /// Checks the containment directly.
    pub fn verify(&self) -> Result<(), CodeError> {
        if self.c2.field() != self.c3.field() || self.c2.n() != self.c3.n() {
            return Err(CodeError::Incompatible);
        }
        if !self.c2.parity().mul_transpose(self.c3.parity())?.is_zero() {
            return Err(CodeError::ContainmentFailed);
        }
        Ok(())
    }
}

/// Builds MDS codes `C2 = [n2, n2−d2+1, d2]`, `C3 = [n2, n2−d3+1, d3]` with `C3^⊥ ⊆ C2`.
///
/// `d = 1` stands for the full space. Lengths up to `q − 1` use GRS codes on
/// nonzero points, length `q` adds the zero point, and length `q + 1` uses
/// doubly-extended codes. With `s = n2 + 2 − d2 − d3`, the length `q + 1`
/// case is covered for `s = 0`, `s ≥ 2`, and `s = 1` when 3 ∈ {d2, d3} in
/// even characteristic; the other `s = 1` cases return [`CodeError::NoMdsPair`].
pub fn nested_grs_pair(field: &Arc<Field>, n2: usize, d2: usize, d3: usize) -> Result<NestedOuterPair, CodeError> {
    let q = field.order() as usize;
    if n2 < 2 || n2 > q + 1 || d2 < 1 || d3 < 1 || d2 > n2 || d3 > n2 || d2 + d3 < 2 || d2 + d3 > n2 + 2 {
        return Err(CodeError::Parameters(format!(
            "need 2 <= n2 <= {}, 1 <= d2, d3 <= n2 and d2 + d3 <= n2 + 2; got n2 = {n2}, d2 = {d2}, d3 = {d3}",
            q + 1
        )));
    }
    let (k2, k3) = (n2 - d2 + 1, n2 - d3 + 1);
    let s = n2 + 2 - d2 - d3;
    let pair = if n2 <= q {
        let points: Vec<Point> = if n2 < q {
            (0..n2).map(|i| Point::Finite(field.alpha_pow(i as u64))).collect()
        } else {
            field.elements().map(Point::Finite).collect()
        };
        let ones = vec![1; n2];
        let c2 = grs_code(field, k2, &points, &ones)?;
        let h3 = grs_rows(field, d3 - 1, &points, &ones);
        let mut c3 = LinearCode::from_matrices(field, None, Some(h3))?.with_distance(Distance::family(d3));
        if n2 < q && d3 > 1 {
            c3.grs = Some(GrsParity {
                points: points
                    .iter()
                    .map(|p| match p {
                        Point::Finite(a) => *a,
                        Point::Infinity => unreachable!(),
                    })
                    .collect(),
                multipliers: ones,
            });
        }
        NestedOuterPair {
            c2,
            c3,
            construction: PairConstruction::SharedPoints,
            points,
        }
    } else {
        doubly_extended_pair(field, n2, d2, d3, k2, k3, s)?
    };
    pair.verify()?;
    Ok(pair)
}

fn drs_points(field: &Arc<Field>) -> Vec<Point> {
    field
        .elements()
        .map(Point::Finite)
        .chain(std::iter::once(Point::Infinity))
        .collect()
}

/// Generator of the length-`q+1` code spanned by the conic: DRS_2 plus `(√a)_a` with 0 at infinity.
fn oval_generator(field: &Arc<Field>) -> Matrix {
    let points = drs_points(field);
    let n = points.len();
    let drs2 = grs_rows(field, 2, &points, &vec![1; n]);
    let mut w = Matrix::zeros(field, 1, n);
    for a in field.elements() {
        w.set(0, a as usize, field.sqrt_char2(a));
    }
    drs2.vstack(&w).expect("same width")
}

/// A monic degree-`s` polynomial over the field with no root in it, coefficients low-to-high.
fn root_free_polynomial(field: &Arc<Field>, s: usize) -> Vec<u32> {
    let q = field.order();
    for b in 1..q {
        for a in 0..q {
            let mut h = vec![0u32; s + 1];
            h[0] = b;
            h[1] = field.add(h[1], a);
            h[s] = field.add(h[s], 1);
            let has_root = field
                .elements()
                .any(|x| h.iter().rev().fold(0, |acc, &c| field.add(field.mul(acc, x), c)) == 0);
            if !has_root {
                return h;
            }
        }
    }
    unreachable!("root-free polynomials of degree >= 2 exist over every finite field")
}

fn doubly_extended_pair(
    field: &Arc<Field>,
    n2: usize,
    d2: usize,
    d3: usize,
    k2: usize,
    k3: usize,
    s: usize,
) -> Result<NestedOuterPair, CodeError> {
    let points = drs_points(field);
    let ones = vec![1; n2];
    let even = field.characteristic() == 2;
    let (c2, h3, construction) = match s {
        0 => {
            let c2 = grs_code(field, k2, &points, &ones)?;
            let h3 = grs_rows(field, d3 - 1, &points, &ones);
            (c2, h3, PairConstruction::SelfDualPair)
        }
        1 if d2 == 3 && even => {
            let c2 = grs_code(field, k2, &points, &ones)?;
            let oval = LinearCode::from_matrices(field, Some(oval_generator(field)), None)?;
            (c2, oval.parity().clone(), PairConstruction::Oval)
        }
        1 if d3 == 3 && even => {
            let c2 = LinearCode::from_matrices(field, Some(oval_generator(field)), None)?
                .with_distance(Distance::family(d2));
            let h3 = grs_rows(field, 2, &points, &ones);
            (c2, h3, PairConstruction::Oval)
        }
        1 => {
            let reason = if d2 == 2 || d3 == 2 {
                format!(
                    "d2 + d3 = n2 + 1 with a distance-2 code at length q + 1 = {n2}: the [q+1, 2, q] code has no \
                     full-weight word, so the containment is impossible"
                )
            } else {
                format!(
                    "d2 + d3 = n2 + 1 at length q + 1 = {n2} is only constructed when d2 = 3 or d3 = 3 in even \
                     characteristic (got d2 = {d2}, d3 = {d3})"
                )
            };
            return Err(CodeError::NoMdsPair(reason));
        }
        _ => {
            let c2 = grs_code(field, k2, &points, &ones)?;
            let h = root_free_polynomial(field, s);
            let mut h3 = Matrix::zeros(field, d3 - 1, n2);
            for i in 0..d3 - 1 {
                let mut poly = vec![0u32; k2];
                for (j, &c) in h.iter().enumerate() {
                    poly[i + j] = c;
                }
                let row = Matrix::from_rows(field, &[poly])?.mul(&grs_rows(field, k2, &points, &ones))?;
                h3.row_mut(i).copy_from_slice(row.row(0));
            }
            (c2, h3, PairConstruction::RootFreeMultiples { degree: s })
        }
    };
    let c3 = LinearCode::from_matrices(field, None, Some(h3))?.with_distance(Distance::family(d3));
    debug_assert_eq!(c3.k(), k3);
    let c2 = c2.with_distance(Distance::family(d2));
    Ok(NestedOuterPair {
        c2,
        c3,
        construction,
        points,
    })
}

/// Result of an exhaustive enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Enumerated {
    Exact(usize),
    NotComputed { work: u128 },
}

fn enumeration_work(field: &Field, k: usize, n: usize) -> u128 {
    (field.order() as u128)
        .saturating_pow(k as u32)
        .saturating_mul(n as u128)
}

/// Visits every codeword of the row space of `g` exactly once (zero first).
fn for_each_codeword(g: &Matrix, mut visit: impl FnMut(&[u32])) {
    let f = Arc::clone(g.field());
    let (k, n, q) = (g.rows(), g.cols(), f.order());
    let mut digits = vec![0u32; k];
    let mut cw = vec![0u32; n];
    visit(&cw);
    'outer: loop {
        let mut i = 0;
        loop {
            if i == k {
                break 'outer;
            }
            let old = digits[i];
            let new = if old + 1 == q { 0 } else { old + 1 };
            digits[i] = new;
            let delta = f.sub(new, old);
            for (c, &gv) in cw.iter_mut().zip(g.row(i)) {
                *c = f.add(*c, f.mul(delta, gv));
            }
            if new != 0 {
                break;
            }
            i += 1;
        }
        visit(&cw);
    }
}

fn min_weight_binary(g: &Matrix) -> usize {
    let n = g.cols();
    let words = n.div_ceil(64).max(1);
    let rows: Vec<Vec<u64>> = (0..g.rows())
        .map(|r| {
            let mut w = vec![0u64; words];
            for (c, &v) in g.row(r).iter().enumerate() {
                if v != 0 {
                    w[c / 64] |= 1 << (c % 64);
                }
            }
            w
        })
        .collect();
    let mut cw = vec![0u64; words];
    let mut best = usize::MAX;
    for i in 1u64..(1u64 << g.rows()) {
        let r = &rows[i.trailing_zeros() as usize];
        for (c, x) in cw.iter_mut().zip(r) {
            *c ^= x;
        }
        best = best.min(cw.iter().map(|x| x.count_ones() as usize).sum());
    }
    best
}

/// True minimum distance by enumerating all `q^k` codewords, if within `cap`.
pub fn min_distance_exhaustive(code: &LinearCode, cap: u128) -> Enumerated {
    let work = enumeration_work(&code.field, code.k, code.n);
    if work > cap {
        return Enumerated::NotComputed { work };
    }
    if code.k == 0 {
        return Enumerated::Exact(code.n + 1);
    }
    if code.field.is_binary() && code.k < 63 {
        return Enumerated::Exact(min_weight_binary(&code.g));
    }
    let mut best = usize::MAX;
    let mut first = true;
    for_each_codeword(&code.g, |cw| {
        if std::mem::take(&mut first) {
            return;
        }
        best = best.min(cw.iter().filter(|&&x| x != 0).count());
    });
    Enumerated::Exact(best)
}

/// Outcome of [`is_subcode`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Subcode {
    Contained,
    /// The generator row of the first code that escapes the second.
    Violated {
        row: usize,
    },
}

/// Tests whether every generator row of `a` is a codeword of `b`.
pub fn is_subcode(a: &LinearCode, b: &LinearCode) -> Result<Subcode, CodeError> {
    if a.field != b.field || a.n != b.n {
        return Err(CodeError::Incompatible);
    }
    let prod = a.g.mul_transpose(&b.h)?;
    Ok(match (0..prod.rows()).find(|&r| prod.row(r).iter().any(|&x| x != 0)) {
        Some(row) => Subcode::Violated { row },
        None => Subcode::Contained,
    })
}

/// Minimum weight over `C \ D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CosetWeight {
    /// `min wt(C \ D)`.
    pub weight: usize,
    /// `min wt(C \ {0})`.
    pub plain: usize,
}

impl CosetWeight {
    /// True when the coset minimum exceeds the plain minimum distance.
    pub fn degenerate(&self) -> bool {
        self.weight > self.plain
    }
}

/// Minimum weight of codewords of `c` outside the subcode `d`.
pub fn coset_min_weight(c: &LinearCode, d: &LinearCode, cap: u128) -> Result<CosetWeight, CodeError> {
    if let Subcode::Violated { row } = is_subcode(d, c)? {
        return Err(CodeError::NotSubcode { row });
    }
    let work = enumeration_work(&c.field, c.k, c.n);
    if work > cap {
        return Err(CodeError::TooLarge { work, cap });
    }
    let (mut weight, mut plain) = (usize::MAX, usize::MAX);
    for_each_codeword(&c.g, |cw| {
        let wt = cw.iter().filter(|&&x| x != 0).count();
        if wt == 0 {
            return;
        }
        plain = plain.min(wt);
        if wt < weight && !d.contains(cw) {
            weight = wt;
        }
    });
    if weight == usize::MAX {
        return Err(CodeError::EmptyDifference);
    }
    Ok(CosetWeight { weight, plain })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf4() -> Arc<Field> {
        Field::extension(&Field::prime(2).unwrap(), 2, Some(&[1, 1, 1])).unwrap()
    }

    fn exact(code: &LinearCode) -> usize {
        match min_distance_exhaustive(code, DEFAULT_ENUMERATION_CAP) {
            Enumerated::Exact(d) => d,
            other => panic!("{other:?}"),
        }
    }

    fn exact_if_small(code: &LinearCode) -> Option<usize> {
        match min_distance_exhaustive(code, DEFAULT_ENUMERATION_CAP) {
            Enumerated::Exact(d) => Some(d),
            Enumerated::NotComputed { .. } => None,
        }
    }

    #[test]
    fn spc_from_parity() {
        let f = Field::prime(2).unwrap();
        let h = Matrix::from_digit_rows(&f, &["111"]).unwrap();
        let c = LinearCode::from_matrices(&f, None, Some(h)).unwrap();
        assert_eq!((c.n(), c.k()), (3, 2));
        assert_eq!(exact(&c), 2);
    }

    #[test]
    fn example_outer_code() {
        let f = gf4();
        let (w, w2) = (2, 3);
        let h = Matrix::from_rows(&f, &[vec![1, 0, 1, w, w], vec![0, 1, w, w, 1]]).unwrap();
        let c = LinearCode::from_matrices(&f, None, Some(h)).unwrap();
        assert_eq!((c.n(), c.k()), (5, 3));
        assert_eq!(exact(&c), 3);
        assert_eq!(f.mul(w, w), w2);
    }

    #[test]
    fn inconsistent_pair_rejected() {
        let f = Field::prime(2).unwrap();
        let g = Matrix::from_digit_rows(&f, &["110"]).unwrap();
        let h = Matrix::from_digit_rows(&f, &["100", "001"]).unwrap();
        assert_eq!(
            LinearCode::from_matrices(&f, Some(g), Some(h)).unwrap_err(),
            CodeError::NotOrthogonal
        );
    }

    #[test]
    fn families() {
        for (m, n, k, d) in [(2, 3, 2, 2), (6, 7, 6, 2), (8, 9, 8, 2)] {
            let c = spc_code(m).unwrap();
            assert_eq!((c.n(), c.k(), exact(&c)), (n, k, d));
        }
        assert!(spc_code(1).is_err());
        assert_eq!(exact(&simplex_code(2).unwrap()), 2);
        let s5 = simplex_code(5).unwrap();
        assert_eq!((s5.n(), s5.k(), exact(&s5)), (31, 5, 16));
        assert!(simplex_code(1).is_err());
        assert_eq!(exact(&repetition_code(3).unwrap()), 3);
        let rm = reed_muller_1(4).unwrap();
        assert_eq!((rm.n(), rm.k(), exact(&rm)), (16, 5, 8));
    }

    #[test]
    fn simplex_is_constant_weight() {
        for m in 2..=6 {
            let c = simplex_code(m).unwrap();
            let mut first = true;
            for_each_codeword(c.generator(), |cw| {
                if std::mem::take(&mut first) {
                    return;
                }
                assert_eq!(cw.iter().filter(|&&x| x != 0).count(), 1 << (m - 1));
            });
        }
    }

    #[test]
    fn grs_examples() {
        let f4 = gf4();
        let mut pts: Vec<Point> = f4.elements().map(Point::Finite).collect();
        pts.push(Point::Infinity);
        let c = grs_code(&f4, 3, &pts, &[1; 5]).unwrap();
        assert_eq!((c.n(), c.k(), exact(&c)), (5, 3, 3));
        let f8 = Field::binary_extension(3).unwrap();
        let mut pts8: Vec<Point> = f8.elements().map(Point::Finite).collect();
        pts8.push(Point::Infinity);
        let c = grs_code(&f8, 7, &pts8, &[1; 9]).unwrap();
        assert_eq!((c.n(), c.k(), exact(&c)), (9, 7, 3));
        let three: Vec<Point> = [1, 2, 3].into_iter().map(Point::Finite).collect();
        let rep = grs_code(&f4, 1, &three, &[1; 3]).unwrap();
        assert_eq!(exact(&rep), 3);
        assert!(rep.grs_parity().is_some());
        let dup = [Point::Finite(1), Point::Finite(1)];
        assert_eq!(grs_code(&f4, 1, &dup, &[1, 1]).unwrap_err(), CodeError::RepeatedPoint);
        assert_eq!(
            grs_code(&f4, 1, &three, &[1, 0, 1]).unwrap_err(),
            CodeError::ZeroMultiplier
        );
    }

    #[test]
    fn grs_is_mds_small_fields() {
        for m in [2, 3, 4] {
            let f = Field::binary_extension(m).unwrap();
            let q = f.order() as usize;
            let mut pts: Vec<Point> = f.elements().map(Point::Finite).collect();
            pts.push(Point::Infinity);
            for n in [q - 1, q, q + 1] {
                if n > 17 {
                    continue;
                }
                let p = &pts[pts.len() - n..];
                for k in 1..n {
                    let c = grs_code(&f, k, p, &vec![1; n]).unwrap();
                    if let Some(d) = exact_if_small(&c) {
                        assert_eq!(d, n - k + 1, "q={q} n={n} k={k}");
                    }
                    if let Some(d) = exact_if_small(&c.dual()) {
                        assert_eq!(d, k + 1, "dual q={q} n={n} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn canonical_parity_matches_kernel() {
        let f = Field::binary_extension(3).unwrap();
        let pts: Vec<Point> = (0..7).map(|i| Point::Finite(f.alpha_pow(i))).collect();
        let mult: Vec<u32> = (1..=7).collect();
        let c = grs_code(&f, 3, &pts, &mult).unwrap();
        assert!(c.parity().same_row_space(&c.generator().kernel()));
    }

    #[test]
    fn dual_involution() {
        let c = simplex_code(3).unwrap();
        let dd = c.dual().dual();
        assert!(dd.generator().same_row_space(c.generator()));
    }

    #[test]
    fn subcode_checks() {
        let c = simplex_code(3).unwrap();
        assert_eq!(is_subcode(&c, &c).unwrap(), Subcode::Contained);
        let zero = LinearCode::from_matrices(c.field(), None, Some(Matrix::identity(c.field(), 7))).unwrap();
        assert_eq!(is_subcode(&zero, &c).unwrap(), Subcode::Contained);
        let all = LinearCode::from_matrices(c.field(), Some(Matrix::identity(c.field(), 7)), None).unwrap();
        assert!(matches!(is_subcode(&all, &c).unwrap(), Subcode::Violated { .. }));
    }

    #[test]
    fn coset_weights() {
        let spc = spc_code(2).unwrap();
        let zero = LinearCode::from_matrices(spc.field(), None, Some(Matrix::identity(spc.field(), 3))).unwrap();
        let w = coset_min_weight(&spc, &zero, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(w.weight, 2);
        assert!(!w.degenerate());
        assert_eq!(
            coset_min_weight(&spc, &spc, DEFAULT_ENUMERATION_CAP).unwrap_err(),
            CodeError::EmptyDifference
        );
    }

    #[test]
    fn nested_pairs_examples() {
        let f4 = gf4();
        let p = nested_grs_pair(&f4, 5, 3, 3).unwrap();
        assert_eq!((p.c2.k(), p.c3.k()), (3, 3));
        assert_eq!(exact(&p.c2), 3);
        assert_eq!(exact(&p.c3), 3);
        assert!(matches!(nested_grs_pair(&f4, 5, 2, 4), Err(CodeError::NoMdsPair(_))));
        let f64 = Field::binary_extension(6).unwrap();
        let p = nested_grs_pair(&f64, 54, 3, 52).unwrap();
        assert_eq!((p.c2.k(), p.c3.k()), (52, 3));
        assert!(p.c2.grs_parity().is_some() && p.c3.grs_parity().is_some());
        assert!(nested_grs_pair(&f4, 6, 3, 3).is_err());
        assert!(nested_grs_pair(&f4, 5, 4, 4).is_err());
    }

    /// Every window point over GF(4), GF(8), GF(16) either yields a verified MDS
    /// pair or is one of the documented length-(q+1) gaps.
    #[test]
    fn nested_pair_window_sweep() {
        for m in [2u32, 3, 4] {
            let f = Field::binary_extension(m).unwrap();
            let q = f.order() as usize;
            for n2 in 2..=q + 1 {
                for d2 in 1..=n2 {
                    for d3 in 1..=n2 {
                        if d2 + d3 < 2 || d2 + d3 > n2 + 2 {
                            continue;
                        }
                        let s = n2 + 2 - d2 - d3;
                        match nested_grs_pair(&f, n2, d2, d3) {
                            Ok(p) => {
                                assert_eq!(p.c2.k(), n2 - d2 + 1);
                                assert_eq!(p.c3.k(), n2 - d3 + 1);
                                if q <= 8 {
                                    if let Some(d) = exact_if_small(&p.c2) {
                                        assert_eq!(d, d2);
                                    }
                                    if let Some(d) = exact_if_small(&p.c3) {
                                        assert_eq!(d, d3);
                                    }
                                }
                            }
                            Err(CodeError::NoMdsPair(_)) => {
                                assert!(n2 == q + 1 && s == 1 && d2 != 3 && d3 != 3, "q={q} {n2} {d2} {d3}");
                            }
                            Err(e) => panic!("q={q} n2={n2} d2={d2} d3={d3}: {e}"),
                        }
                    }
                }
            }
        }
    }

    /// Exhaustive oracle: no [5,2,4] MDS code over GF(4) contains a weight-5
    /// word, so a [5,4,2] code can never have its dual inside a [5,2,4] code.
    #[test]
    fn gf4_length5_distance2_pairs_do_not_exist() {
        let f = gf4();
        let vecs: Vec<[u32; 5]> = (1u32..1024)
            .map(|v| std::array::from_fn(|i| v >> (2 * i) & 3))
            .collect();
        let mut mds_codes = 0;
        for (i, a) in vecs.iter().enumerate() {
            for b in &vecs[i + 1..] {
                let mut min = usize::MAX;
                let mut full = false;
                for lam in 0..4 {
                    for mu in 0..4 {
                        if lam == 0 && mu == 0 {
                            continue;
                        }
                        let wt = (0..5)
                            .filter(|&j| f.add(f.mul(lam, a[j]), f.mul(mu, b[j])) != 0)
                            .count();
                        min = min.min(wt);
                        full |= wt == 5;
                    }
                }
                if min == 4 {
                    mds_codes += 1;
                    assert!(!full);
                }
            }
        }
        assert!(mds_codes > 0);
    }

    #[test]
    fn oval_code_is_mds() {
        for m in [2, 3, 4] {
            let f = Field::binary_extension(m).unwrap();
            let c = LinearCode::from_matrices(&f, Some(oval_generator(&f)), None).unwrap();
            let q = f.order() as usize;
            assert_eq!((c.n(), c.k(), exact(&c)), (q + 1, 3, q - 1));
        }
    }
}
