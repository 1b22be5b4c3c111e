//! Syndrome decoders for the outer, inner and quantum codes.
//!
//! Outer decoding uses Berlekamp–Massey for GRS codes on nonzero points,
//! homogeneous Welch–Berlekamp for GRS codes that use the points 0 or ∞,
//! and a bounded enumeration otherwise. Every decoder either returns an
//! error vector reproducing the syndrome or aborts.
//!
//! Ties between equal-weight candidates are broken by support (as an
//! increasing index tuple) and then by values, both lexicographically.

use std::cmp::Ordering;
use std::sync::Arc;

use thiserror::Error;

use crate::codes::{LinearCode, Point};
use crate::galois::Field;
use crate::matgf::Matrix;
use crate::weave::AqctpcCode;

/// Default bound on candidate enumeration in the generic decoders.
pub const DEFAULT_DECODE_CAP: u128 = 1 << 24;

/// Largest syndrome space for which a coset-leader table is built.
pub const COSET_TABLE_LIMIT: u128 = 1 << 20;

const CODEWORD_ENUMERATION_LIMIT: u128 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Abort {
    #[error("error pattern is outside the decoding radius ({0})")]
    OutOfRadius(&'static str),
    #[error("enumeration needs {work} candidates, above the cap")]
    Infeasible { work: u128 },
    #[error("syndrome has length {got}, expected {expected}")]
    Length { expected: usize, got: usize },
}

/// Work tallies for the inner and outer stages.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub inner: u64,
    pub outer: u64,
}

impl std::ops::AddAssign for OpCounts {
    fn add_assign(&mut self, rhs: OpCounts) {
        self.inner += rhs.inner;
        self.outer += rhs.outer;
    }
}

/// Decoder output over the base field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedError {
    /// The estimate; all zeros when aborted.
    pub error: Vec<u32>,
    pub abort: Option<Abort>,
    pub ops: OpCounts,
}

/// X and Z syndromes of a Pauli error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyndromeBundle {
    /// `H_X · u^T`, length `k1 r2`.
    pub phi: Vec<u32>,
    /// Per-block inner syndromes, `n2` vectors of length `r1`.
    pub psi_inner: Vec<Vec<u32>>,
    /// Measured outer block of `H_Z · v^T`, length `k1 r3`.
    pub psi_outer: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZMode {
    Plain,
    /// Blocks with a nonzero inner syndrome become outer erasures.
    DetectErasure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    X,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Exact,
    DegenerateSuccess,
    LogicalFailure,
}

/// Orders candidate errors by weight, then support, then values.
pub fn leader_order(a: &[u32], b: &[u32]) -> Ordering {
    let wa = a.iter().filter(|&&x| x != 0).count();
    let wb = b.iter().filter(|&&x| x != 0).count();
    wa.cmp(&wb)
        .then_with(|| {
            let sa = a.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, _)| i);
            let sb = b.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, _)| i);
            sa.cmp(sb)
        })
        .then_with(|| {
            let va = a.iter().filter(|&&x| x != 0);
            let vb = b.iter().filter(|&&x| x != 0);
            va.cmp(vb)
        })
}

#[cfg(test)]
fn weight(v: &[u32]) -> usize {
    v.iter().filter(|&&x| x != 0).count()
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

/// Advances `c` to the next `k`-subset of `0..n` in lexicographic order.
pub(crate) fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Advances nonzero values `vals` in lexicographic order.
pub(crate) fn next_values(vals: &mut [u32], q: u32) -> bool {
    for i in (0..vals.len()).rev() {
        vals[i] += 1;
        if vals[i] < q {
            return true;
        }
        vals[i] = 1;
    }
    false
}

fn check_len(v: &[u32], expected: usize) -> Result<(), Abort> {
    if v.len() != expected {
        return Err(Abort::Length { expected, got: v.len() });
    }
    Ok(())
}

fn syndrome_index(field: &Field, s: &[u32]) -> usize {
    s.iter()
        .rev()
        .fold(0usize, |acc, &x| acc * field.order() as usize + x as usize)
}

/// All solutions of `m x^T = s` with every entry nonzero, smallest value tuple first.
fn smallest_full_support_solution(
    m: &Matrix,
    s: &[u32],
    cap: u128,
    work: &mut u128,
) -> Result<Option<Vec<u32>>, Abort> {
    let Some(x0) = m.solve_any(s) else {
        return Ok(None);
    };
    let kernel = m.kernel();
    if kernel.rows() == 0 {
        *work += 1;
        return Ok(x0.iter().all(|&x| x != 0).then_some(x0));
    }
    let f = m.field();
    let q = f.order() as u128;
    let total = q.saturating_pow(kernel.rows() as u32);
    *work = work.saturating_add(total);
    if *work > cap {
        return Err(Abort::Infeasible { work: *work });
    }
    let mut best: Option<Vec<u32>> = None;
    let mut coeffs = vec![0u32; kernel.rows()];
    loop {
        let mut x = x0.clone();
        for (r, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                for (xi, &k) in x.iter_mut().zip(kernel.row(r)) {
                    *xi = f.add(*xi, f.mul(c, k));
                }
            }
        }
        if x.iter().all(|&v| v != 0) && best.as_ref().is_none_or(|b| x < *b) {
            best = Some(x);
        }
        let mut i = 0;
        loop {
            if i == coeffs.len() {
                return Ok(best);
            }
            coeffs[i] += 1;
            if coeffs[i] < f.order() {
                break;
            }
            coeffs[i] = 0;
            i += 1;
        }
    }
}

/// Minimum-weight solution of `H e^T = s` by support enumeration.
pub fn generic_syndrome_decode(code: &LinearCode, s: &[u32], cap: u128) -> Result<Vec<u32>, Abort> {
    coset_leader(code.parity(), s, cap)
}

fn coset_leader(h: &Matrix, s: &[u32], cap: u128) -> Result<Vec<u32>, Abort> {
    check_len(s, h.rows())?;
    let n = h.cols();
    if s.iter().all(|&x| x == 0) {
        return Ok(vec![0; n]);
    }
    let mut work = 0u128;
    for t in 1..=n {
        let mut support: Vec<usize> = (0..t).collect();
        loop {
            let cols = h.select_cols(&support);
            if let Some(vals) = smallest_full_support_solution(&cols, s, cap, &mut work)? {
                let mut e = vec![0; n];
                for (&j, &v) in support.iter().zip(&vals) {
                    e[j] = v;
                }
                return Ok(e);
            }
            if work > cap {
                return Err(Abort::Infeasible { work });
            }
            if !next_combination(&mut support, n) {
                break;
            }
        }
    }
    Err(Abort::OutOfRadius("syndrome outside the column space"))
}

/// Coset leader for every syndrome, under [`leader_order`].
#[derive(Debug, Clone)]
pub struct CosetTable {
    field: Arc<Field>,
    h: Matrix,
    leaders: Vec<Vec<u32>>,
}

impl CosetTable {
    pub fn new(h: &Matrix) -> Result<CosetTable, Abort> {
        let field = Arc::clone(h.field());
        let (r, n) = (h.rows(), h.cols());
        let size = (field.order() as u128).saturating_pow(r as u32);
        if size > COSET_TABLE_LIMIT {
            return Err(Abort::Infeasible { work: size });
        }
        let size = size as usize;
        let mut leaders: Vec<Option<Vec<u32>>> = vec![None; size];
        leaders[0] = Some(vec![0; n]);
        let mut filled = 1;
        let q = field.order();
        let columns: Vec<Vec<u32>> = (0..n).map(|j| (0..r).map(|i| h.get(i, j)).collect()).collect();
        'weights: for t in 1..=n {
            let mut support: Vec<usize> = (0..t).collect();
            loop {
                let mut vals = vec![1u32; t];
                loop {
                    let mut s = vec![0u32; r];
                    for (&j, &v) in support.iter().zip(&vals) {
                        for (si, &c) in s.iter_mut().zip(&columns[j]) {
                            *si = field.add(*si, field.mul(v, c));
                        }
                    }
                    let idx = syndrome_index(&field, &s);
                    if leaders[idx].is_none() {
                        let mut e = vec![0; n];
                        for (&j, &v) in support.iter().zip(&vals) {
                            e[j] = v;
                        }
                        leaders[idx] = Some(e);
                        filled += 1;
                        if filled == size {
                            break 'weights;
                        }
                    }
                    if !next_values(&mut vals, q) {
                        break;
                    }
                }
                if !next_combination(&mut support, n) {
                    break;
                }
            }
        }
        let leaders = leaders.into_iter().map(|l| l.unwrap_or_else(|| vec![0; n])).collect();
        Ok(CosetTable {
            field,
            h: h.clone(),
            leaders,
        })
    }

    pub fn leader(&self, s: &[u32]) -> Result<&[u32], Abort> {
        check_len(s, self.h.rows())?;
        Ok(&self.leaders[syndrome_index(&self.field, s)])
    }
}

fn poly_eval(f: &Field, coeffs: &[u32], x: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
}

fn poly_degree(p: &[u32]) -> Option<usize> {
    p.iter().rposition(|&c| c != 0)
}

/// Quotient of `num / den` when the division is exact.
fn poly_div_exact(f: &Field, num: &[u32], den: &[u32]) -> Option<Vec<u32>> {
    let dd = poly_degree(den)?;
    let mut rem = num.to_vec();
    let Some(dn) = poly_degree(&rem) else {
        return Some(vec![0]);
    };
    if dn < dd {
        return None;
    }
    let lead_inv = f.inv(den[dd]);
    let mut quot = vec![0u32; dn - dd + 1];
    for i in (0..=dn - dd).rev() {
        let c = f.mul(rem[i + dd], lead_inv);
        quot[i] = c;
        if c != 0 {
            for (j, &d) in den[..=dd].iter().enumerate() {
                rem[i + j] = f.sub(rem[i + j], f.mul(c, d));
            }
        }
    }
    rem.iter().all(|&x| x == 0).then_some(quot)
}

/// Monomial `X^i Y^{deg−i}` at a projective point.
fn monomial(f: &Field, p: Point, i: usize, deg: usize) -> u32 {
    match p {
        Point::Finite(a) => f.pow(a, i as u64),
        Point::Infinity => u32::from(i == deg),
    }
}

/// Column multipliers `v` with `code = { (v_j f(P_j)) : deg f < k }`, if the code has that form.
pub fn grs_multipliers(code: &LinearCode, points: &[Point]) -> Option<Vec<u32>> {
    let (n, k, r) = (code.n(), code.k(), code.r());
    if points.len() != n || k == 0 {
        return None;
    }
    let f = code.field();
    let h = code.parity();
    let mut eqs = Matrix::zeros(f, r * k, n);
    for a in 0..r {
        for i in 0..k {
            for (j, &p) in points.iter().enumerate() {
                eqs.set(a * k + i, j, f.mul(h.get(a, j), monomial(f, p, i, k - 1)));
            }
        }
    }
    let ker = eqs.kernel();
    (ker.rows() == 1 && ker.row(0).iter().all(|&x| x != 0)).then(|| ker.row(0).to_vec())
}

/// Decoding strategy for an outer code, chosen once per code.
#[derive(Debug, Clone)]
pub enum OuterDecoder {
    /// The zero-redundancy code.
    Trivial { n: usize },
    /// Berlekamp–Massey on the canonical GRS parity `H[i][j] = y_j a_j^i`.
    BerlekampMassey { h: Matrix, points: Vec<u32> },
    /// Welch–Berlekamp on homogeneous polynomials over the projective line.
    WelchBerlekamp {
        h: Matrix,
        points: Vec<Point>,
        multipliers: Vec<u32>,
        k: usize,
        pivots: Vec<usize>,
        pivot_inverse: Matrix,
    },
    /// Enumeration of error supports with erasure values solved linearly.
    Bounded { h: Matrix, distance: usize, cap: u128 },
}

impl OuterDecoder {
    /// Picks BM, then Welch–Berlekamp (if `points` gives a GRS description), then enumeration.
    pub fn for_code(code: &LinearCode, points: Option<&[Point]>) -> OuterDecoder {
        let h = code.parity().clone();
        if code.r() == 0 {
            return OuterDecoder::Trivial { n: code.n() };
        }
        if let Some(grs) = code.grs_parity() {
            return OuterDecoder::BerlekampMassey {
                h,
                points: grs.points.clone(),
            };
        }
        if let Some(points) = points {
            if let Some(multipliers) = grs_multipliers(code, points) {
                let rref = h.rref();
                let pivot_inverse = h.select_cols(&rref.pivots).invert().expect("full-rank parity");
                return OuterDecoder::WelchBerlekamp {
                    h,
                    points: points.to_vec(),
                    multipliers,
                    k: code.k(),
                    pivots: rref.pivots,
                    pivot_inverse,
                };
            }
        }
        OuterDecoder::Bounded {
            h,
            distance: code.distance().value.max(1),
            cap: DEFAULT_DECODE_CAP,
        }
    }

    /// Generic enumeration regardless of the code's structure.
    pub fn bounded(code: &LinearCode, cap: u128) -> OuterDecoder {
        OuterDecoder::Bounded {
            h: code.parity().clone(),
            distance: code.distance().value.max(1),
            cap,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OuterDecoder::Trivial { .. } => "trivial",
            OuterDecoder::BerlekampMassey { .. } => "berlekamp-massey",
            OuterDecoder::WelchBerlekamp { .. } => "welch-berlekamp",
            OuterDecoder::Bounded { .. } => "bounded-enumeration",
        }
    }

    /// Error with the given syndrome, erased positions counted at half cost.
    ///
    /// Succeeds whenever `2 · (errors outside erasures) + (erasures) < d`.
    pub fn decode(&self, s: &[u32], erasures: &[usize], ops: &mut u64) -> Result<Vec<u32>, Abort> {
        match self {
            OuterDecoder::Trivial { n } => {
                check_len(s, 0)?;
                Ok(vec![0; *n])
            }
            OuterDecoder::BerlekampMassey { h, points } => bm_decode(h, points, s, erasures, ops),
            OuterDecoder::WelchBerlekamp {
                h,
                points,
                multipliers,
                k,
                pivots,
                pivot_inverse,
            } => {
                check_len(s, h.rows())?;
                let mut y = vec![0; h.cols()];
                for (&p, v) in pivots.iter().zip(pivot_inverse.mul_vec(s).expect("square")) {
                    y[p] = v;
                }
                *ops += (h.rows() * h.rows()) as u64;
                wb_decode(h, points, multipliers, *k, &y, erasures, ops)
            }
            OuterDecoder::Bounded { h, distance, cap } => bounded_decode(h, *distance, s, erasures, *cap, ops),
        }
    }
}

fn radius_ok(e: &[u32], erasures: &[usize], r: usize) -> bool {
    let t = e
        .iter()
        .enumerate()
        .filter(|&(j, &x)| x != 0 && !erasures.contains(&j))
        .count();
    2 * t + erasures.len() <= r
}

/// Values on `support` solving `H e^T = s`, if unique.
fn solve_on_support(h: &Matrix, s: &[u32], support: &[usize]) -> Option<Vec<u32>> {
    let cols = h.select_cols(support);
    let x = cols.solve_any(s)?;
    let mut e = vec![0; h.cols()];
    for (&j, &v) in support.iter().zip(&x) {
        e[j] = v;
    }
    Some(e)
}

fn bm_decode(h: &Matrix, points: &[u32], s: &[u32], erasures: &[usize], ops: &mut u64) -> Result<Vec<u32>, Abort> {
    check_len(s, h.rows())?;
    let f = h.field();
    let (r, n) = (h.rows(), h.cols());
    let rho = erasures.len();
    if rho > r {
        return Err(Abort::OutOfRadius("more erasures than redundancy"));
    }
    if rho == 0 && s.iter().all(|&x| x == 0) {
        return Ok(vec![0; n]);
    }
    let mut lambda = vec![1u32];
    for &j in erasures {
        let mut next = vec![0u32; lambda.len() + 1];
        for (i, &c) in lambda.iter().enumerate() {
            next[i] = f.add(next[i], c);
            next[i + 1] = f.sub(next[i + 1], f.mul(c, points[j]));
        }
        lambda = next;
    }
    let mut b = lambda.clone();
    let mut l = rho;
    for k in rho + 1..=r {
        let mut delta = 0;
        for (i, &c) in lambda.iter().enumerate().take(l + 1) {
            if i < k {
                delta = f.add(delta, f.mul(c, s[k - 1 - i]));
            }
        }
        *ops += (l + 1) as u64;
        let mut shifted = vec![0u32; b.len() + 1];
        shifted[1..].copy_from_slice(&b);
        if delta == 0 {
            b = shifted;
            continue;
        }
        let mut t = lambda.clone();
        t.resize(t.len().max(shifted.len()), 0);
        for (ti, &bi) in t.iter_mut().zip(&shifted) {
            *ti = f.sub(*ti, f.mul(delta, bi));
        }
        if 2 * l <= k - 1 + rho {
            let dinv = f.inv(delta);
            b = lambda.iter().map(|&c| f.mul(c, dinv)).collect();
            l = k + rho - l;
        } else {
            b = shifted;
        }
        lambda = t;
    }
    let deg = poly_degree(&lambda).unwrap_or(0);
    if deg != l || 2 * l > r + rho {
        return Err(Abort::OutOfRadius("locator degree exceeds the radius"));
    }
    let roots: Vec<usize> = (0..n)
        .filter(|&j| poly_eval(f, &lambda, f.inv(points[j])) == 0)
        .collect();
    *ops += (n * (deg + 1)) as u64;
    if roots.len() != deg {
        return Err(Abort::OutOfRadius("locator does not split over the code points"));
    }
    let e = solve_on_support(h, s, &roots).ok_or(Abort::OutOfRadius("inconsistent error values"))?;
    *ops += (r * roots.len() * roots.len()) as u64;
    if !radius_ok(&e, erasures, r) {
        return Err(Abort::OutOfRadius("decoded error exceeds the radius"));
    }
    Ok(e)
}

fn wb_decode(
    h: &Matrix,
    points: &[Point],
    multipliers: &[u32],
    k: usize,
    y: &[u32],
    erasures: &[usize],
    ops: &mut u64,
) -> Result<Vec<u32>, Abort> {
    let f = h.field();
    let n = points.len();
    let r = n - k;
    let rho = erasures.len();
    if rho > r {
        return Err(Abort::OutOfRadius("more erasures than redundancy"));
    }
    let kept: Vec<usize> = (0..n).filter(|j| !erasures.contains(j)).collect();
    let tau = (kept.len() - k) / 2;
    let (ne, nn) = (tau + 1, tau + k);
    let mut sys = Matrix::zeros(f, kept.len(), ne + nn);
    for (row, &j) in kept.iter().enumerate() {
        let yj = f.div(y[j], multipliers[j]);
        for i in 0..ne {
            sys.set(row, i, f.mul(yj, monomial(f, points[j], i, tau)));
        }
        for i in 0..nn {
            sys.set(row, ne + i, f.neg(monomial(f, points[j], i, tau + k - 1)));
        }
    }
    *ops += (kept.len() * (ne + nn) * (ne + nn)) as u64;
    let ker = sys.kernel();
    if ker.rows() == 0 {
        return Err(Abort::OutOfRadius("no key-equation solution"));
    }
    let sol = ker.row(0);
    let (e_poly, n_poly) = sol.split_at(ne);
    let msg = poly_div_exact(f, n_poly, e_poly).ok_or(Abort::OutOfRadius("locator does not divide"))?;
    if msg.len() > k && msg[k..].iter().any(|&c| c != 0) {
        return Err(Abort::OutOfRadius("message degree too large"));
    }
    let mut msg = msg;
    msg.resize(k, 0);
    let e: Vec<u32> = (0..n)
        .map(|j| {
            let c = (0..k).fold(0, |acc, i| f.add(acc, f.mul(msg[i], monomial(f, points[j], i, k - 1))));
            f.sub(y[j], f.mul(multipliers[j], c))
        })
        .collect();
    *ops += (n * k) as u64;
    if !radius_ok(&e, erasures, r) {
        return Err(Abort::OutOfRadius("decoded error exceeds the radius"));
    }
    debug_assert!(h.mul_vec(&e).unwrap() == h.mul_vec(y).unwrap());
    Ok(e)
}

fn bounded_decode(
    h: &Matrix,
    distance: usize,
    s: &[u32],
    erasures: &[usize],
    cap: u128,
    ops: &mut u64,
) -> Result<Vec<u32>, Abort> {
    check_len(s, h.rows())?;
    let n = h.cols();
    let rho = erasures.len();
    let free: Vec<usize> = (0..n).filter(|j| !erasures.contains(j)).collect();
    let mut work = 0u128;
    let mut t = 0;
    while 2 * t + rho < distance {
        work = work.saturating_add(binomial(free.len(), t));
        if work > cap {
            return Err(Abort::Infeasible { work });
        }
        let mut pick: Vec<usize> = (0..t).collect();
        loop {
            let mut support: Vec<usize> = erasures.to_vec();
            support.extend(pick.iter().map(|&i| free[i]));
            support.sort_unstable();
            *ops += (h.rows() * support.len().max(1)) as u64;
            if let Some(e) = solve_on_support(h, s, &support) {
                if pick.iter().all(|&i| e[free[i]] != 0) {
                    return Ok(e);
                }
            }
            if t == 0 || !next_combination(&mut pick, free.len()) {
                break;
            }
        }
        t += 1;
    }
    Err(Abort::OutOfRadius("no error pattern within the radius"))
}

/// Minimum-weight inner decoding of one sub-block.
#[derive(Debug, Clone)]
pub struct InnerDecoder {
    h: Matrix,
    strategy: InnerStrategy,
}

#[derive(Debug, Clone)]
enum InnerStrategy {
    Empty,
    SingleCheck,
    Codewords {
        codewords: Vec<Vec<u32>>,
        pivots: Vec<usize>,
        pivot_inverse: Matrix,
    },
    Table(CosetTable),
    Enumerate,
}

impl InnerDecoder {
    /// `h` is a full-rank parity check; `g` generates its kernel.
    pub fn new(h: &Matrix, g: &Matrix) -> InnerDecoder {
        let f = h.field();
        let q = f.order() as u128;
        let strategy = if h.rows() == 0 {
            InnerStrategy::Empty
        } else if h.rows() == 1 {
            InnerStrategy::SingleCheck
        } else if q.saturating_pow(g.rows() as u32) <= CODEWORD_ENUMERATION_LIMIT {
            let mut codewords = vec![vec![0u32; h.cols()]];
            for row in 0..g.rows() {
                let mut next = Vec::with_capacity(codewords.len() * q as usize);
                for c in 0..f.order() {
                    for w in &codewords {
                        next.push(w.iter().zip(g.row(row)).map(|(&a, &b)| f.add(a, f.mul(c, b))).collect());
                    }
                }
                codewords = next;
            }
            let rref = h.rref();
            let pivot_inverse = h.select_cols(&rref.pivots).invert().expect("full-rank parity");
            InnerStrategy::Codewords {
                codewords,
                pivots: rref.pivots,
                pivot_inverse,
            }
        } else if let Ok(table) = CosetTable::new(h) {
            InnerStrategy::Table(table)
        } else {
            InnerStrategy::Enumerate
        };
        InnerDecoder { h: h.clone(), strategy }
    }

    pub fn for_code(code: &LinearCode) -> InnerDecoder {
        InnerDecoder::new(code.parity(), code.generator())
    }

    /// Coset leader for `psi` and whether `psi` is nonzero.
    pub fn decode(&self, psi: &[u32], ops: &mut u64) -> Result<(Vec<u32>, bool), Abort> {
        check_len(psi, self.h.rows())?;
        let n = self.h.cols();
        let detected = psi.iter().any(|&x| x != 0);
        if !detected {
            *ops += psi.len() as u64;
            return Ok((vec![0; n], false));
        }
        let f = self.h.field();
        let e = match &self.strategy {
            InnerStrategy::Empty => vec![0; n],
            InnerStrategy::SingleCheck => {
                let j = (0..n).find(|&j| self.h.get(0, j) != 0).expect("nonzero check");
                let mut e = vec![0; n];
                e[j] = f.div(psi[0], self.h.get(0, j));
                *ops += j as u64 + 1;
                e
            }
            InnerStrategy::Codewords {
                codewords,
                pivots,
                pivot_inverse,
            } => {
                let mut y = vec![0; n];
                for (&p, v) in pivots.iter().zip(pivot_inverse.mul_vec(psi).expect("square")) {
                    y[p] = v;
                }
                let mut best: Option<Vec<u32>> = None;
                for c in codewords {
                    let cand: Vec<u32> = y.iter().zip(c).map(|(&a, &b)| f.sub(a, b)).collect();
                    if best.as_ref().is_none_or(|b| leader_order(&cand, b) == Ordering::Less) {
                        best = Some(cand);
                    }
                }
                *ops += (codewords.len() * n) as u64;
                best.expect("nonempty code")
            }
            InnerStrategy::Table(t) => {
                *ops += psi.len() as u64;
                t.leader(psi)?.to_vec()
            }
            InnerStrategy::Enumerate => {
                *ops += n as u64;
                coset_leader(&self.h, psi, DEFAULT_DECODE_CAP)?
            }
        };
        Ok((e, true))
    }
}

/// Minimum-weight `ē` with `H_c1 ē^T = psi`, and whether `psi` is nonzero.
pub fn inner_z_decode(c1: &LinearCode, psi: &[u32]) -> Result<(Vec<u32>, bool), Abort> {
    InnerDecoder::for_code(c1).decode(psi, &mut 0)
}

/// Decoders for an [`AqctpcCode`], with tables built once.
#[derive(Debug)]
pub struct AqctpcDecoder<'a> {
    code: &'a AqctpcCode,
    outer_x: OuterDecoder,
    outer_z: OuterDecoder,
    inner: InnerDecoder,
    /// `A^T`, `r1 × k1`.
    a_t: Matrix,
    hz_top: Matrix,
    hz_bottom: Matrix,
}

impl<'a> AqctpcDecoder<'a> {
    pub fn new(code: &'a AqctpcCode) -> AqctpcDecoder<'a> {
        let pair = code.pair();
        let points = (!pair.points.is_empty()).then_some(pair.points.as_slice());
        let std = code.standard_inner();
        let mut inv_perm = vec![0; std.perm.len()];
        for (j, &p) in std.perm.iter().enumerate() {
            inv_perm[p] = j;
        }
        let h1 = std.h.unpermute_cols(&std.perm);
        let g1 = std.g.unpermute_cols(&std.perm);
        let top = code.hz_top_rows();
        let hz = code.hz();
        AqctpcDecoder {
            code,
            outer_x: OuterDecoder::for_code(&pair.c2, points),
            outer_z: OuterDecoder::for_code(&pair.c3, points),
            inner: InnerDecoder::new(&h1, &g1),
            a_t: std.a().transpose(),
            hz_top: hz.select_rows(&(0..top).collect::<Vec<_>>()),
            hz_bottom: hz.select_rows(&(top..hz.rows()).collect::<Vec<_>>()),
        }
    }

    pub fn code(&self) -> &AqctpcCode {
        self.code
    }

    pub fn outer_x(&self) -> &OuterDecoder {
        &self.outer_x
    }

    pub fn outer_z(&self) -> &OuterDecoder {
        &self.outer_z
    }

    /// Syndromes of an X component `u` and a Z component `v`.
    pub fn syndromes(&self, u: &[u32], v: &[u32]) -> SyndromeBundle {
        let p = self.code.params();
        let phi = self.code.hx().mul_vec(u).expect("length n");
        let bottom = self.hz_bottom.mul_vec(v).expect("length n");
        let r1 = p.n1 - p.k1;
        let psi_inner = (0..p.n2).map(|j| bottom[j * r1..(j + 1) * r1].to_vec()).collect();
        let psi_outer = self.hz_top.mul_vec(v).expect("length n");
        SyndromeBundle {
            phi,
            psi_inner,
            psi_outer,
        }
    }

    fn aborted(&self, abort: Abort, ops: OpCounts) -> DecodedError {
        DecodedError {
            error: vec![0; self.code.params().n],
            abort: Some(abort),
            ops,
        }
    }

    /// X decoding: outer decoding of `C2`, then `(Φ_I, 0)` in each block.
    pub fn decode_x(&self, phi: &[u32]) -> DecodedError {
        let p = self.code.params();
        let mut ops = OpCounts::default();
        if let Err(a) = check_len(phi, self.code.hx().rows()) {
            return self.aborted(a, ops);
        }
        let ext = self.code.outer_field();
        let syn: Vec<u32> = phi
            .chunks(p.k1)
            .map(|b| ext.vector_to_symbol(b).expect("block length k1"))
            .collect();
        ops.outer += phi.len() as u64;
        let symbols = match self.outer_x.decode(&syn, &[], &mut ops.outer) {
            Ok(e) => e,
            Err(a) => return self.aborted(a, ops),
        };
        let mut std_err = vec![0u32; p.n];
        for (j, &sym) in symbols.iter().enumerate() {
            let block = &mut std_err[j * p.n1..(j + 1) * p.n1];
            block[..p.k1].copy_from_slice(&ext.symbol_to_vector(sym));
            ops.inner += (p.k1 + p.n1) as u64;
        }
        DecodedError {
            error: self.code.standard_inner().from_standard(&std_err),
            abort: None,
            ops,
        }
    }

    /// Z decoding: inner coset leaders, outer decoding of `C3`, then parity completion.
    pub fn decode_z(&self, bundle: &SyndromeBundle, mode: ZMode) -> DecodedError {
        let p = self.code.params();
        let mut ops = OpCounts::default();
        let r1 = p.n1 - p.k1;
        if bundle.psi_inner.len() != p.n2 {
            return self.aborted(
                Abort::Length {
                    expected: p.n2,
                    got: bundle.psi_inner.len(),
                },
                ops,
            );
        }
        if let Err(a) = check_len(&bundle.psi_outer, self.hz_top.rows()) {
            return self.aborted(a, ops);
        }
        let f = self.code.base_field();
        let std = self.code.standard_inner();
        let mut inner_est = vec![0u32; p.n];
        let mut erasures = Vec::new();
        for (j, psi) in bundle.psi_inner.iter().enumerate() {
            match self.inner.decode(psi, &mut ops.inner) {
                Ok((e, detected)) => {
                    inner_est[j * p.n1..(j + 1) * p.n1].copy_from_slice(&e);
                    if detected {
                        erasures.push(j);
                    }
                }
                Err(a) => return self.aborted(a, ops),
            }
        }
        let top_est = self.hz_top.mul_vec(&inner_est).expect("length n");
        let outer_syn: Vec<u32> = bundle
            .psi_outer
            .iter()
            .zip(&top_est)
            .map(|(&a, &b)| f.sub(a, b))
            .collect();
        ops.outer += (self.hz_top.rows() * p.n1) as u64;
        let syn: Vec<u32> = outer_syn.chunks(p.k1).map(|b| self.code.z_symbol(b)).collect();
        let erasures: &[usize] = match mode {
            ZMode::Plain => &[],
            ZMode::DetectErasure => &erasures,
        };
        let symbols = match self.outer_z.decode(&syn, erasures, &mut ops.outer) {
            Ok(e) => e,
            Err(a) => return self.aborted(a, ops),
        };
        let inner_std = std.to_standard(&inner_est);
        let mut out = vec![0u32; p.n];
        for j in 0..p.n2 {
            let xhat = self.code.z_vector(symbols[j]);
            let block = &inner_std[j * p.n1..(j + 1) * p.n1];
            let e_info: Vec<u32> = block[..p.k1].iter().zip(&xhat).map(|(&a, &b)| f.add(a, b)).collect();
            let correction = self.a_t.mul_vec(&e_info).expect("length k1");
            let dst = &mut out[j * p.n1..(j + 1) * p.n1];
            dst[..p.k1].copy_from_slice(&e_info);
            for i in 0..r1 {
                dst[p.k1 + i] = f.add(bundle.psi_inner[j][i], correction[i]);
            }
            ops.inner += (p.k1 * r1 + p.n1) as u64;
        }
        DecodedError {
            error: std.from_standard(&out),
            abort: None,
            ops,
        }
    }
}

/// Classifies `truth − decoded` for an X or Z error.
pub fn classify_residual(code: &AqctpcCode, truth: &[u32], decoded: &[u32], kind: ErrorKind) -> Classification {
    assert_eq!(truth.len(), decoded.len(), "length mismatch");
    assert_eq!(truth.len(), code.params().n, "length mismatch");
    if truth == decoded {
        return Classification::Exact;
    }
    let f = code.base_field();
    let r: Vec<u32> = truth.iter().zip(decoded).map(|(&a, &b)| f.sub(a, b)).collect();
    let checks = match kind {
        ErrorKind::X => code.gcc(),
        ErrorKind::Z => code.tpc_generator(),
    };
    if checks.mul_vec(&r).expect("length n").iter().all(|&x| x == 0) {
        Classification::DegenerateSuccess
    } else {
        Classification::LogicalFailure
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{grs_code, nested_grs_pair, simplex_code, spc_code};
    use proptest::prelude::*;

    fn gf8() -> Arc<Field> {
        Field::binary_extension(3).unwrap()
    }

    fn rs(k: usize) -> LinearCode {
        let f = gf8();
        let pts: Vec<Point> = (0..7).map(|i| Point::Finite(f.alpha_pow(i))).collect();
        grs_code(&f, k, &pts, &[1; 7]).unwrap()
    }

    /// Every error of weight at most `t` over the code's field.
    fn errors_up_to(f: &Field, n: usize, t: usize) -> Vec<Vec<u32>> {
        let mut out = vec![vec![0; n]];
        for w in 1..=t {
            let mut sup: Vec<usize> = (0..w).collect();
            loop {
                let mut vals = vec![1u32; w];
                'vals: loop {
                    let mut e = vec![0; n];
                    for (&j, &v) in sup.iter().zip(&vals) {
                        e[j] = v;
                    }
                    out.push(e);
                    for val in vals.iter_mut() {
                        *val += 1;
                        if *val < f.order() {
                            continue 'vals;
                        }
                        *val = 1;
                    }
                    break;
                }
                if !next_combination(&mut sup, n) {
                    break;
                }
            }
        }
        out
    }

    #[test]
    fn spc_tie_break() {
        let spc = spc_code(2).unwrap();
        assert_eq!(
            generic_syndrome_decode(&spc, &[1], DEFAULT_DECODE_CAP).unwrap(),
            vec![1, 0, 0]
        );
        assert_eq!(
            generic_syndrome_decode(&spc, &[0], DEFAULT_DECODE_CAP).unwrap(),
            vec![0, 0, 0]
        );
        let t = CosetTable::new(spc.parity()).unwrap();
        assert_eq!(t.leader(&[1]).unwrap(), &[1, 0, 0]);
    }

    #[test]
    fn leader_order_ranks() {
        assert_eq!(leader_order(&[0, 1, 0], &[1, 1, 0]), Ordering::Less);
        assert_eq!(leader_order(&[0, 1, 0], &[1, 0, 0]), Ordering::Greater);
        assert_eq!(leader_order(&[2, 0], &[1, 0]), Ordering::Greater);
    }

    #[test]
    fn table_and_enumeration_agree() {
        let c = rs(5);
        let t = CosetTable::new(c.parity()).unwrap();
        let f = c.field();
        for a in f.elements() {
            for b in f.elements() {
                let s = [a, b];
                assert_eq!(
                    t.leader(&s).unwrap(),
                    generic_syndrome_decode(&c, &s, DEFAULT_DECODE_CAP).unwrap().as_slice()
                );
            }
        }
    }

    fn check_outer_against_table(k: usize) {
        let c = rs(k);
        let dec = OuterDecoder::for_code(&c, None);
        assert_eq!(dec.name(), "berlekamp-massey");
        let table = CosetTable::new(c.parity()).unwrap();
        let t = (7 - k) / 2;
        for e in errors_up_to(c.field(), 7, t) {
            let s = c.syndrome(&e);
            let got = dec.decode(&s, &[], &mut 0).unwrap();
            assert_eq!(got, e);
            assert_eq!(table.leader(&s).unwrap(), e.as_slice());
        }
    }

    #[test]
    fn bm_matches_table_rs_7_3() {
        check_outer_against_table(3);
    }

    #[test]
    fn bm_matches_table_rs_7_5() {
        check_outer_against_table(5);
    }

    #[test]
    fn bm_errors_and_erasures() {
        let c = rs(3);
        let dec = OuterDecoder::for_code(&c, None);
        let e = vec![0, 5, 0, 3, 0, 0, 6];
        let got = dec.decode(&c.syndrome(&e), &[1, 3], &mut 0).unwrap();
        assert_eq!(got, e);
        let e = vec![0, 0, 0, 0, 0, 0, 6];
        assert_eq!(dec.decode(&c.syndrome(&e), &[1, 3], &mut 0).unwrap(), e);
        let zero = dec.decode(&[0; 4], &[], &mut 0).unwrap();
        assert_eq!(zero, vec![0; 7]);
    }

    #[test]
    fn bm_aborts_beyond_radius() {
        let c = rs(5);
        let dec = OuterDecoder::for_code(&c, None);
        let mut aborted = 0;
        for e in errors_up_to(c.field(), 7, 2).into_iter().filter(|e| weight(e) == 2) {
            match dec.decode(&c.syndrome(&e), &[], &mut 0) {
                Ok(got) => {
                    assert_eq!(c.syndrome(&got), c.syndrome(&e));
                    assert!(weight(&got) <= 1);
                }
                Err(_) => aborted += 1,
            }
        }
        assert!(aborted > 0);
    }

    fn exercise_pair(n2: usize, d2: usize, d3: usize, expect: &str) {
        let f = gf8();
        let pair = nested_grs_pair(&f, n2, d2, d3).unwrap();
        for code in [&pair.c2, &pair.c3] {
            let dec = OuterDecoder::for_code(code, Some(&pair.points));
            assert_eq!(dec.name(), expect);
            let oracle = OuterDecoder::bounded(code, DEFAULT_DECODE_CAP);
            let d = code.distance().value;
            for e in errors_up_to(&f, n2, (d - 1) / 2) {
                let s = code.syndrome(&e);
                assert_eq!(dec.decode(&s, &[], &mut 0).unwrap(), e);
                assert_eq!(oracle.decode(&s, &[], &mut 0).unwrap(), e);
            }
        }
    }

    #[test]
    fn welch_berlekamp_with_zero_point() {
        exercise_pair(8, 3, 4, "welch-berlekamp");
    }

    #[test]
    fn welch_berlekamp_doubly_extended() {
        exercise_pair(9, 3, 5, "welch-berlekamp");
        exercise_pair(9, 4, 7, "welch-berlekamp");
        exercise_pair(9, 5, 6, "welch-berlekamp");
    }

    #[test]
    fn welch_berlekamp_erasures_at_special_points() {
        let f = gf8();
        let pair = nested_grs_pair(&f, 9, 3, 5).unwrap();
        let dec = OuterDecoder::for_code(&pair.c3, Some(&pair.points));
        for erasures in [vec![0, 8], vec![8], vec![0, 3]] {
            for err_pos in 0..9 {
                if erasures.contains(&err_pos) || 2 + erasures.len() > 4 {
                    continue;
                }
                let mut e = vec![0; 9];
                e[err_pos] = 3;
                e[erasures[0]] = 5;
                assert_eq!(dec.decode(&pair.c3.syndrome(&e), &erasures, &mut 0).unwrap(), e);
            }
        }
    }

    #[test]
    fn oval_code_has_no_grs_description() {
        let f = gf8();
        let pair = nested_grs_pair(&f, 9, 3, 7).unwrap();
        let dec = OuterDecoder::for_code(&pair.c3, Some(&pair.points));
        assert_eq!(dec.name(), "bounded-enumeration");
        assert_eq!(
            OuterDecoder::for_code(&pair.c2, Some(&pair.points)).name(),
            "welch-berlekamp"
        );
        let mut e = vec![0; 9];
        e[8] = 4;
        assert_eq!(dec.decode(&pair.c3.syndrome(&e), &[], &mut 0).unwrap(), e);
    }

    #[test]
    fn inner_decoding_paths() {
        let spc = spc_code(6).unwrap();
        assert_eq!(inner_z_decode(&spc, &[0]).unwrap(), (vec![0; 7], false));
        let (e, det) = inner_z_decode(&spc, &[1]).unwrap();
        assert!(det && weight(&e) == 1);
        let simplex = simplex_code(3).unwrap();
        let table = CosetTable::new(simplex.parity()).unwrap();
        let dec = InnerDecoder::for_code(&simplex);
        let f = simplex.field();
        let mut weight_one = 0;
        for e in errors_up_to(f, 7, 7) {
            let s = simplex.syndrome(&e);
            let (got, _) = dec.decode(&s, &mut 0).unwrap();
            assert_eq!(got.as_slice(), table.leader(&s).unwrap());
            assert_eq!(simplex.syndrome(&got), s);
            if weight(&e) == 1 {
                assert_eq!(got, e);
                weight_one += 1;
            }
        }
        assert_eq!(weight_one, 7);
    }

    fn instance_15() -> AqctpcCode {
        let f4 = Field::binary_extension(2).unwrap();
        AqctpcCode::build(simplex_code(2).unwrap(), nested_grs_pair(&f4, 5, 3, 3).unwrap()).unwrap()
    }

    #[test]
    fn zero_syndromes_decode_to_zero() {
        let code = instance_15();
        let dec = AqctpcDecoder::new(&code);
        let b = dec.syndromes(&[0; 15], &[0; 15]);
        assert_eq!(dec.decode_x(&b.phi).error, vec![0; 15]);
        assert_eq!(dec.decode_z(&b, ZMode::Plain).error, vec![0; 15]);
    }

    #[test]
    fn x_radius_and_degeneracy_on_15() {
        let code = instance_15();
        let dec = AqctpcDecoder::new(&code);
        let mut degenerate = 0;
        for i in 0..15 {
            let mut u = vec![0; 15];
            u[i] = 1;
            let out = dec.decode_x(&dec.syndromes(&u, &[0; 15]).phi);
            assert_eq!(code.hx().mul_vec(&out.error).unwrap(), code.hx().mul_vec(&u).unwrap());
            let class = classify_residual(&code, &u, &out.error, ErrorKind::X);
            assert_ne!(class, Classification::LogicalFailure);
            degenerate += usize::from(class == Classification::DegenerateSuccess);
        }
        assert!(degenerate > 0);
    }

    #[test]
    fn z_block_radius_on_15() {
        let code = instance_15();
        let dec = AqctpcDecoder::new(&code);
        for block in 0..5 {
            for pattern in 1..8u32 {
                let mut v = vec![0; 15];
                for b in 0..3 {
                    v[block * 3 + b] = (pattern >> b) & 1;
                }
                let bundle = dec.syndromes(&[0; 15], &v);
                for mode in [ZMode::Plain, ZMode::DetectErasure] {
                    let out = dec.decode_z(&bundle, mode);
                    assert!(out.abort.is_none());
                    assert_eq!(code.hz().mul_vec(&out.error).unwrap(), code.hz().mul_vec(&v).unwrap());
                    assert_ne!(
                        classify_residual(&code, &v, &out.error, ErrorKind::Z),
                        Classification::LogicalFailure
                    );
                }
            }
        }
    }

    #[test]
    fn detect_erasure_recovers_mixed_pattern() {
        let f4 = Field::binary_extension(2).unwrap();
        let code = AqctpcCode::build(spc_code(2).unwrap(), nested_grs_pair(&f4, 5, 1, 4).unwrap()).unwrap();
        let dec = AqctpcDecoder::new(&code);
        let mut v = vec![0; 15];
        v[0] = 1;
        v[4] = 1;
        v[5] = 1;
        let bundle = dec.syndromes(&[0; 15], &v);
        let out = dec.decode_z(&bundle, ZMode::DetectErasure);
        assert!(out.abort.is_none(), "{:?}", out.abort);
        assert_ne!(
            classify_residual(&code, &v, &out.error, ErrorKind::Z),
            Classification::LogicalFailure
        );
    }

    #[test]
    fn classify_cases() {
        let code = instance_15();
        let u = vec![0; 15];
        assert_eq!(classify_residual(&code, &u, &u, ErrorKind::X), Classification::Exact);
        let stab = code.hz().row(0).to_vec();
        assert_eq!(
            classify_residual(&code, &stab, &u, ErrorKind::X),
            Classification::DegenerateSuccess
        );
        let t = code.tpc_generator();
        let logical = (0..t.rows())
            .map(|i| t.row(i).to_vec())
            .find(|row| !code.hz().row_space_contains(row))
            .unwrap();
        assert_eq!(
            classify_residual(&code, &logical, &u, ErrorKind::X),
            Classification::LogicalFailure
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn outer_decoders_reproduce_syndromes(pos in proptest::collection::vec(0usize..9, 0..3), vals in proptest::collection::vec(1u32..8, 3)) {
            let f = gf8();
            let pair = nested_grs_pair(&f, 9, 3, 5).unwrap();
            let dec = OuterDecoder::for_code(&pair.c3, Some(&pair.points));
            let mut e = vec![0; 9];
            for (&p, &v) in pos.iter().zip(&vals) {
                e[p] = v;
            }
            let s = pair.c3.syndrome(&e);
            if let Ok(got) = dec.decode(&s, &[], &mut 0) {
                prop_assert_eq!(pair.c3.syndrome(&got), s);
                prop_assert_eq!(got, e);
            }
        }

        #[test]
        fn z_decoder_reproduces_syndromes(v in proptest::collection::vec(0u32..2, 15)) {
            let code = instance_15();
            let dec = AqctpcDecoder::new(&code);
            let bundle = dec.syndromes(&[0; 15], &v);
            let out = dec.decode_z(&bundle, ZMode::Plain);
            if out.abort.is_none() {
                prop_assert_eq!(code.hz().mul_vec(&out.error).unwrap(), code.hz().mul_vec(&v).unwrap());
            }
        }
    }
}
