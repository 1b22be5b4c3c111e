//! Asymptotic rate bounds and curve emission.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("argument {0} is outside [0, 1]")]
    OutOfUnitInterval(f64),
    #[error("field size {0} is below 2")]
    FieldSize(u64),
    #[error("{0}")]
    Window(String),
    #[error("grid step must be positive, got {0}")]
    Grid(f64),
}

/// A rate bound at one pair of relative distances.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundPoint {
    pub id: String,
    pub delta_z: f64,
    pub delta_x: f64,
    /// Raw value, possibly negative.
    pub rate: f64,
}

/// `H_q(x) = x log_q(q−1) − x log_q x − (1−x) log_q(1−x)`, with `0 log 0 = 0`.
pub fn entropy_q(q: u64, x: f64) -> Result<f64, BoundError> {
    if q < 2 {
        return Err(BoundError::FieldSize(q));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(BoundError::OutOfUnitInterval(x));
    }
    let ln_q = (q as f64).ln();
    let xlogx = |t: f64| if t == 0.0 { 0.0 } else { t * t.ln() };
    Ok((x * ((q - 1) as f64).ln() - xlogx(x) - xlogx(1.0 - x)) / ln_q)
}

/// `(1 − H_q(d1/n1)) (1 − d2/n2 − d3/n2)` with `δ_z = d1 d3 / N` and `δ_x = d2 / N`.
pub fn gv_family_bound(q: u64, n1: u64, d1: u64, n2: u64, d2: u64, d3: u64) -> Result<BoundPoint, BoundError> {
    if !(2..=n1).contains(&d1) || d2 + d3 < 2 || d2 + d3 > n2 {
        return Err(BoundError::Window(format!(
            "need 2 <= d1 <= n1 and 2 <= d2 + d3 <= n2, got n1 = {n1}, d1 = {d1}, n2 = {n2}, d2 = {d2}, d3 = {d3}"
        )));
    }
    let h = entropy_q(q, d1 as f64 / n1 as f64)?;
    let n = (n1 * n2) as f64;
    Ok(BoundPoint {
        id: "gv-family".into(),
        delta_z: (d1 * d3) as f64 / n,
        delta_x: d2 as f64 / n,
        rate: (1.0 - h) * (1.0 - d2 as f64 / n2 as f64 - d3 as f64 / n2 as f64),
    })
}

fn ag_defect(m: u32) -> f64 {
    2.0 / (2f64.powf(m as f64 / 2.0) - 1.0)
}

/// Binary extension of asymmetric QAG codes: `1 − m δ_x − m δ_z − 2/(√(2^m) − 1)`.
pub fn qag_binary_bound(m: u32, delta_x: f64, delta_z: f64) -> Result<BoundPoint, BoundError> {
    if m < 2 {
        return Err(BoundError::Window(format!("m = {m} is below 2")));
    }
    for d in [delta_x, delta_z] {
        if !(0.0..=1.0).contains(&d) {
            return Err(BoundError::OutOfUnitInterval(d));
        }
    }
    let cap = 1.0 - ag_defect(m);
    if delta_x + delta_z > cap + 1e-15 {
        return Err(BoundError::Window(format!(
            "δ_x + δ_z = {} exceeds 1 − 2/(√(2^{m}) − 1) = {cap}",
            delta_x + delta_z
        )));
    }
    Ok(BoundPoint {
        id: format!("qag-m{m}"),
        delta_z,
        delta_x,
        rate: 1.0 - m as f64 * (delta_x + delta_z) - ag_defect(m),
    })
}

/// AQCTPC with AG outer codes: `(k1/n1)(1 − (n1/d1) δ_z − n1 δ_x − 2/(√(2^{k1}) − 1))`.
pub fn aqctpc_ag_bound(k1: u32, n1: u32, d1: u32, delta_x: f64, delta_z: f64) -> Result<BoundPoint, BoundError> {
    if k1 < 2 || k1 > n1 || d1 == 0 || d1 > n1 {
        return Err(BoundError::Window(format!(
            "need 2 <= k1 <= n1 and 1 <= d1 <= n1, got [{n1}, {k1}, {d1}]"
        )));
    }
    let (k, n, d) = (k1 as f64, n1 as f64, d1 as f64);
    Ok(BoundPoint {
        id: format!("aqctpc[{n1},{k1},{d1}]"),
        delta_z,
        delta_x,
        rate: (k / n) * (1.0 - (n / d) * delta_z - n * delta_x - ag_defect(k1)),
    })
}

/// Multiplicative order of 2 modulo an odd `n > 1`.
pub fn order_of_two(n: u64) -> Option<u32> {
    if n < 3 || n.is_multiple_of(2) {
        return None;
    }
    let mut x = 2 % n;
    for m in 1..=n as u32 {
        if x == 1 {
            return Some(m);
        }
        x = x * 2 % n;
    }
    None
}

/// `1 − m(δ − 1)/N` for binary quantum BCH codes; `m = ord_N(2)` when not given.
pub fn qbch_rate(n: u64, delta: u64, m: Option<u32>) -> Result<f64, BoundError> {
    let m = match m {
        Some(m) => m,
        None => order_of_two(n).ok_or_else(|| BoundError::Window(format!("N = {n} must be odd and at least 3")))?,
    };
    let cap = n as f64 * (2f64.powi(m.div_ceil(2) as i32) - 1.0) / (2f64.powi(m as i32) - 1.0);
    if delta < 1 || delta as f64 > cap {
        return Err(BoundError::Window(format!(
            "designed distance {delta} outside [1, {cap}]"
        )));
    }
    Ok(1.0 - m as f64 * (delta - 1) as f64 / n as f64)
}

/// GV bound for CSS codes, `1 − H_2(δ_x) − H_2(δ_z)`, with each entropy held at 1 beyond 1/2.
pub fn gv_css_bound(delta_x: f64, delta_z: f64) -> Result<BoundPoint, BoundError> {
    let h = |d: f64| entropy_q(2, d.min(0.5));
    Ok(BoundPoint {
        id: "gv-css".into(),
        delta_z,
        delta_x,
        rate: 1.0 - h(delta_x)? - h(delta_z)?,
    })
}

/// Inner code `[n1, k1, d1]` used for one piece of the AQCTPC envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Constituent {
    pub n1: u32,
    pub k1: u32,
    pub d1: u32,
}

/// Default inner codes for the AQCTPC envelope, in [`parse_constituents`] format.
pub const DEFAULT_CONSTITUENTS: &str = include_str!("../data/constituents.txt");

/// Parses `n k d` lines; `#` starts a comment.
pub fn parse_constituents(text: &str) -> Result<Vec<Constituent>, BoundError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let nums: Vec<u32> = line
            .split_whitespace()
            .map(|t| t.parse::<u32>())
            .collect::<Result<_, _>>()
            .map_err(|e| BoundError::Window(format!("line {}: {e}", lineno + 1)))?;
        let [n1, k1, d1] = nums[..] else {
            return Err(BoundError::Window(format!("line {}: expected `n k d`", lineno + 1)));
        };
        out.push(Constituent { n1, k1, d1 });
    }
    Ok(out)
}

/// Which curves [`emit_curves`] produces.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSelection {
    pub constituents: Vec<Constituent>,
    pub include_pieces: bool,
    pub qag: bool,
    pub gv_css: bool,
}

impl Default for CurveSelection {
    fn default() -> Self {
        CurveSelection {
            constituents: Vec::new(),
            include_pieces: true,
            qag: true,
            gv_css: true,
        }
    }
}

/// Largest `m` considered for the QAG envelope.
pub const QAG_MAX_M: u32 = 24;

/// Best QAG bound over `m`, or 0 when no `m` applies.
pub fn qag_envelope(delta_x: f64, delta_z: f64) -> f64 {
    (2..=QAG_MAX_M)
        .filter_map(|m| qag_binary_bound(m, delta_x, delta_z).ok())
        .map(|p| p.rate)
        .fold(0.0, f64::max)
}

/// One row per curve per `δ_z` on `0, step, 2 step, … ≤ 1`, with `δ_x = δ_z / θ`; rates clipped at 0.
pub fn emit_curves(selection: &CurveSelection, step: f64, theta: f64) -> Result<Vec<BoundPoint>, BoundError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(BoundError::Grid(step));
    }
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(BoundError::Window(format!("θ must be positive, got {theta}")));
    }
    let steps = (1.0 / step + 1e-9).floor() as usize;
    let mut rows = Vec::new();
    for i in 0..=steps {
        let dz = (i as f64 * step).min(1.0);
        let dx = dz / theta;
        if !selection.constituents.is_empty() {
            let mut best = 0.0f64;
            for c in &selection.constituents {
                let p = aqctpc_ag_bound(c.k1, c.n1, c.d1, dx, dz)?;
                best = best.max(p.rate);
                if selection.include_pieces {
                    rows.push(BoundPoint {
                        rate: p.rate.max(0.0),
                        ..p
                    });
                }
            }
            rows.push(BoundPoint {
                id: "aqctpc-envelope".into(),
                delta_z: dz,
                delta_x: dx,
                rate: best,
            });
        }
        if selection.qag {
            rows.push(BoundPoint {
                id: "qag-envelope".into(),
                delta_z: dz,
                delta_x: dx,
                rate: qag_envelope(dx, dz),
            });
        }
        if selection.gv_css {
            let p = gv_css_bound(dx, dz)?;
            rows.push(BoundPoint {
                rate: p.rate.max(0.0),
                ..p
            });
        }
    }
    Ok(rows)
}

pub const CURVE_HEADER: &str = "bound\ttheta\tdelta_z\tdelta_x\trate";

/// Tab-separated rows with a header line.
pub fn curves_to_table(rows: &[BoundPoint], theta: f64) -> String {
    let mut s = String::from(CURVE_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{}\t{theta}\t{:.9}\t{:.9}\t{:.12}",
            r.id, r.delta_z, r.delta_x, r.rate
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_constituents_parse() {
        let c = parse_constituents(DEFAULT_CONSTITUENTS).unwrap();
        assert!(c.len() >= 10 && c.iter().all(|c| c.k1 >= 2 && c.d1 <= c.n1));
    }
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn entropy_values() {
        assert!(entropy_q(2, 0.0).unwrap().abs() < TOL);
        assert!((entropy_q(2, 0.5).unwrap() - 1.0).abs() < TOL);
        assert!((entropy_q(4, 0.75).unwrap() - 1.0).abs() < TOL);
        assert!(entropy_q(2, 1.5).is_err());
        assert!(entropy_q(1, 0.5).is_err());
    }

    #[test]
    fn entropy_concave_and_symmetric() {
        let h = |x: f64| entropy_q(2, x).unwrap();
        for i in 1..100 {
            let x = i as f64 / 100.0;
            assert!((h(x) - h(1.0 - x)).abs() < TOL);
            if i < 99 {
                let (a, b) = (x - 0.005, x + 0.005);
                assert!(h(x) >= (h(a) + h(b)) / 2.0 - TOL);
            }
        }
    }

    #[test]
    fn gv_family_examples() {
        assert!(gv_family_bound(2, 10, 3, 20, 10, 10).unwrap().rate.abs() < TOL);
        let p = gv_family_bound(2, 1000, 110, 1000, 10, 10).unwrap();
        let expect = (1.0 - entropy_q(2, 0.11).unwrap()) * 0.98;
        assert!((p.rate - expect).abs() < TOL);
        assert!(gv_family_bound(2, 10, 5, 20, 5, 5).unwrap().rate.abs() < TOL);
        assert!(gv_family_bound(2, 10, 1, 20, 5, 5).is_err());
    }

    #[test]
    fn qag_examples() {
        assert!((qag_binary_bound(4, 0.0, 0.0).unwrap().rate - 1.0 / 3.0).abs() < TOL);
        let cap = 1.0 / 3.0;
        let end = qag_binary_bound(4, cap / 2.0, cap / 2.0).unwrap();
        assert!((end.rate - (1.0 / 3.0 - 4.0 * cap)).abs() < TOL);
        assert!(qag_binary_bound(4, 0.3, 0.3).is_err());
        assert!(qag_binary_bound(1, 0.0, 0.0).is_err());
    }

    #[test]
    fn aqctpc_ag_examples() {
        let p = aqctpc_ag_bound(4, 7, 4, 0.0, 0.0).unwrap();
        assert!((p.rate - 4.0 / 21.0).abs() < TOL);
        let root = (1.0 - 2.0 / 3.0) * 4.0 / 7.0;
        assert!(aqctpc_ag_bound(4, 7, 4, 0.0, root).unwrap().rate.abs() < TOL);
        assert!(aqctpc_ag_bound(1, 7, 4, 0.0, 0.0).is_err());
    }

    #[test]
    fn qbch_examples() {
        assert!((qbch_rate(15, 2, Some(4)).unwrap() - (1.0 - 4.0 / 15.0)).abs() < TOL);
        assert_eq!(order_of_two(15), Some(4));
        assert!((qbch_rate(15, 3, None).unwrap() - (1.0 - 8.0 / 15.0)).abs() < TOL);
        assert!((qbch_rate(15, 1, None).unwrap() - 1.0).abs() < TOL);
        assert!(qbch_rate(15, 5, None).is_err());
        assert!(qbch_rate(16, 2, None).is_err());
    }

    #[test]
    fn curve_shapes() {
        let sel = CurveSelection {
            constituents: vec![Constituent { n1: 8, k1: 4, d1: 4 }],
            ..CurveSelection::default()
        };
        let rows = emit_curves(&sel, 0.5, 1.0).unwrap();
        assert_eq!(rows.len(), 3 * 4);
        assert!(rows.iter().any(|r| r.id == "gv-css"));
        let comparators = emit_curves(&CurveSelection::default(), 0.5, 1.0).unwrap();
        assert_eq!(comparators.len(), 3 * 2);
        assert!(emit_curves(&sel, 0.0, 1.0).is_err());
        let table = curves_to_table(&rows, 1.0);
        assert!(table.starts_with(CURVE_HEADER));
        assert_eq!(table.lines().count(), rows.len() + 1);
    }

    #[test]
    fn constituents_parse() {
        let c = parse_constituents("# inner codes\n7 4 3\n\n16 5 8 # RM\n").unwrap();
        assert_eq!(
            c,
            vec![
                Constituent { n1: 7, k1: 4, d1: 3 },
                Constituent { n1: 16, k1: 5, d1: 8 }
            ]
        );
        assert!(parse_constituents("7 4").is_err());
    }

    fn series(rows: &[BoundPoint], id: &str) -> Vec<f64> {
        rows.iter().filter(|r| r.id == id).map(|r| r.rate).collect()
    }

    proptest! {
        #[test]
        fn curves_monotone_and_envelope_dominates(theta in prop_oneof![Just(1.0), Just(10.0), Just(100.0)], k in 4u32..9, extra in 1u32..20) {
            let n = k + extra;
            let sel = CurveSelection {
                constituents: vec![Constituent { n1: n, k1: k, d1: (extra + 1).min(n) }, Constituent { n1: 24, k1: 12, d1: 8 }],
                ..CurveSelection::default()
            };
            let rows = emit_curves(&sel, 0.01, theta).unwrap();
            let ids: Vec<String> = rows.iter().map(|r| r.id.clone()).collect();
            for id in ids.iter().collect::<std::collections::BTreeSet<_>>() {
                let s = series(&rows, id);
                prop_assert!(s.windows(2).all(|w| w[1] <= w[0] + TOL), "{id} not monotone");
            }
            let env = series(&rows, "aqctpc-envelope");
            for c in &sel.constituents {
                let piece = series(&rows, &format!("aqctpc[{},{},{}]", c.n1, c.k1, c.d1));
                prop_assert!(env.iter().zip(&piece).all(|(e, p)| e + TOL >= *p));
            }
        }
    }
}
