//! Asymmetric Pauli noise, Monte-Carlo trials and exhaustive radius checks.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::decode::{
    classify_residual, next_combination, next_values, AqctpcDecoder, Classification, ErrorKind, OpCounts,
    SyndromeBundle, ZMode,
};
use crate::galois::Field;
use crate::weave::AqctpcCode;

/// Trials per RNG stream; fixed so results do not depend on the worker count.
pub const TRIAL_BLOCK: usize = 256;

const WILSON_Z: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("probability {0} is outside [0, 1]")]
    Probability(f64),
    #[error("asymmetry must be positive and finite, got {0}")]
    Theta(f64),
    #[error("at least one trial is required")]
    NoTrials,
    #[error("enumeration would visit {cases} cases, above the cap {cap}")]
    Infeasible { cases: u128, cap: u128 },
    #[error("vector of length {got}, expected {expected}")]
    Length { expected: usize, got: usize },
}

/// X component `u` and Z component `v` of a Pauli error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliError {
    pub u: Vec<u32>,
    pub v: Vec<u32>,
}

impl PauliError {
    pub fn wt_q(&self) -> usize {
        self.u.iter().zip(&self.v).filter(|(&a, &b)| a != 0 || b != 0).count()
    }

    pub fn wt_x(&self) -> usize {
        self.u.iter().filter(|&&a| a != 0).count()
    }

    pub fn wt_z(&self) -> usize {
        self.v.iter().filter(|&&b| b != 0).count()
    }
}

/// Independent X and Z flip probabilities per position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub p_x: f64,
    pub p_z: f64,
    pub seed: u64,
}

impl ChannelParams {
    pub fn new(p_x: f64, p_z: f64, seed: u64) -> Result<ChannelParams, ChannelError> {
        for p in [p_x, p_z] {
            if !(0.0..=1.0).contains(&p) {
                return Err(ChannelError::Probability(p));
            }
        }
        Ok(ChannelParams { p_x, p_z, seed })
    }

    /// `p_x = p_z / θ`.
    pub fn from_asymmetry(p_z: f64, theta: f64, seed: u64) -> Result<ChannelParams, ChannelError> {
        if !(theta.is_finite() && theta > 0.0) {
            return Err(ChannelError::Theta(theta));
        }
        ChannelParams::new(p_z / theta, p_z, seed)
    }

    /// `p_z / p_x`, undefined when `p_x = 0`.
    pub fn theta(&self) -> Option<f64> {
        (self.p_x > 0.0).then(|| self.p_z / self.p_x)
    }
}

fn flip<R: Rng>(field: &Field, p: f64, rng: &mut R) -> u32 {
    if p > 0.0 && rng.random_bool(p) {
        if field.order() == 2 {
            1
        } else {
            rng.random_range(1..field.order())
        }
    } else {
        0
    }
}

/// Samples each position independently; nonzero values are uniform.
pub fn sample_pauli<R: Rng>(field: &Field, n: usize, params: &ChannelParams, rng: &mut R) -> PauliError {
    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for _ in 0..n {
        u.push(flip(field, params.p_x, rng));
        v.push(flip(field, params.p_z, rng));
    }
    PauliError { u, v }
}

pub fn extract_syndromes(decoder: &AqctpcDecoder<'_>, e: &PauliError) -> Result<SyndromeBundle, ChannelError> {
    let n = decoder.code().params().n;
    for len in [e.u.len(), e.v.len()] {
        if len != n {
            return Err(ChannelError::Length { expected: n, got: len });
        }
    }
    Ok(decoder.syndromes(&e.u, &e.v))
}

/// Outcome tallies for one error kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KindCounts {
    pub exact: u64,
    pub degenerate: u64,
    pub failure: u64,
    pub abort: u64,
}

impl KindCounts {
    fn add(&mut self, other: &KindCounts) {
        self.exact += other.exact;
        self.degenerate += other.degenerate;
        self.failure += other.failure;
        self.abort += other.abort;
    }

    fn record(&mut self, class: Option<Classification>) {
        match class {
            Some(Classification::Exact) => self.exact += 1,
            Some(Classification::DegenerateSuccess) => self.degenerate += 1,
            Some(Classification::LogicalFailure) => self.failure += 1,
            None => self.abort += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.exact + self.degenerate + self.failure + self.abort
    }

    /// Logical failures plus aborts.
    pub fn failures(&self) -> u64 {
        self.failure + self.abort
    }
}

/// Wilson score interval at 95%.
pub fn wilson_interval(failures: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if failures == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if failures == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOptions {
    pub mode: ZMode,
    pub workers: usize,
}

impl Default for TrialOptions {
    fn default() -> Self {
        TrialOptions {
            mode: ZMode::Plain,
            workers: 1,
        }
    }
}

/// Aggregated Monte-Carlo results; contains no timing so equal inputs give equal reports.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub code: String,
    pub params: ChannelParams,
    pub mode: ZMode,
    pub trials: u64,
    pub x: KindCounts,
    pub z: KindCounts,
    pub ops: OpCounts,
}

impl SimulationReport {
    pub fn logical_x_rate(&self) -> f64 {
        self.x.failures() as f64 / self.trials as f64
    }

    pub fn logical_z_rate(&self) -> f64 {
        self.z.failures() as f64 / self.trials as f64
    }

    pub fn x_interval(&self) -> (f64, f64) {
        wilson_interval(self.x.failures(), self.trials)
    }

    pub fn z_interval(&self) -> (f64, f64) {
        wilson_interval(self.z.failures(), self.trials)
    }

    /// `key = value` lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let theta = self.params.theta().map_or("inf".to_string(), |t| format!("{t:.6}"));
        let mode = match self.mode {
            ZMode::Plain => "plain",
            ZMode::DetectErasure => "detect-erasure",
        };
        let (xl, xh) = self.x_interval();
        let (zl, zh) = self.z_interval();
        let lines: [(&str, String); 21] = [
            ("code", self.code.clone()),
            ("p_x", format!("{:.9e}", self.params.p_x)),
            ("p_z", format!("{:.9e}", self.params.p_z)),
            ("theta", theta),
            ("seed", self.params.seed.to_string()),
            ("z_mode", mode.to_string()),
            ("trials", self.trials.to_string()),
            ("x_exact", self.x.exact.to_string()),
            ("x_degenerate", self.x.degenerate.to_string()),
            ("x_logical_failure", self.x.failure.to_string()),
            ("x_abort", self.x.abort.to_string()),
            ("z_exact", self.z.exact.to_string()),
            ("z_degenerate", self.z.degenerate.to_string()),
            ("z_logical_failure", self.z.failure.to_string()),
            ("z_abort", self.z.abort.to_string()),
            ("logical_x_rate", format!("{:.9e}", self.logical_x_rate())),
            ("logical_x_ci95", format!("{xl:.9e} {xh:.9e}")),
            ("logical_z_rate", format!("{:.9e}", self.logical_z_rate())),
            ("logical_z_ci95", format!("{zl:.9e} {zh:.9e}")),
            ("ops_inner", self.ops.inner.to_string()),
            ("ops_outer", self.ops.outer.to_string()),
        ];
        for (k, v) in lines {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    pub const TABLE_HEADER: &'static str =
        "code\tp_x\tp_z\ttrials\tx_failures\tz_failures\tx_rate\tz_rate\tx_lo\tx_hi\tz_lo\tz_hi";

    /// One tab-separated row matching [`SimulationReport::TABLE_HEADER`].
    pub fn to_row(&self) -> String {
        let (xl, xh) = self.x_interval();
        let (zl, zh) = self.z_interval();
        format!(
            "{}\t{:.9e}\t{:.9e}\t{}\t{}\t{}\t{:.9e}\t{:.9e}\t{xl:.9e}\t{xh:.9e}\t{zl:.9e}\t{zh:.9e}",
            self.code,
            self.params.p_x,
            self.params.p_z,
            self.trials,
            self.x.failures(),
            self.z.failures(),
            self.logical_x_rate(),
            self.logical_z_rate(),
        )
    }
}

#[derive(Default)]
struct Tally {
    x: KindCounts,
    z: KindCounts,
    ops: OpCounts,
}

fn run_block(decoder: &AqctpcDecoder<'_>, params: &ChannelParams, mode: ZMode, block: usize, count: usize) -> Tally {
    let code = decoder.code();
    let n = code.params().n;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(block as u64);
    let mut t = Tally::default();
    for _ in 0..count {
        let e = sample_pauli(code.base_field(), n, params, &mut rng);
        let bundle = decoder.syndromes(&e.u, &e.v);
        let dx = decoder.decode_x(&bundle.phi);
        let dz = decoder.decode_z(&bundle, mode);
        t.x.record(
            dx.abort
                .is_none()
                .then(|| classify_residual(code, &e.u, &dx.error, ErrorKind::X)),
        );
        t.z.record(
            dz.abort
                .is_none()
                .then(|| classify_residual(code, &e.v, &dz.error, ErrorKind::Z)),
        );
        t.ops += dx.ops;
        t.ops += dz.ops;
    }
    t
}

/// Samples, decodes and classifies `trials` errors.
///
/// Trial block `b` draws from stream `b` of a ChaCha8 generator seeded with
/// `params.seed`, so the report is the same for every worker count.
pub fn run_trials(
    code: &AqctpcCode,
    params: &ChannelParams,
    trials: u64,
    options: TrialOptions,
) -> Result<SimulationReport, ChannelError> {
    if trials == 0 {
        return Err(ChannelError::NoTrials);
    }
    let decoder = AqctpcDecoder::new(code);
    code.tpc_generator();
    let trials_usize = trials as usize;
    let blocks = trials_usize.div_ceil(TRIAL_BLOCK);
    let next = AtomicUsize::new(0);
    let total = Mutex::new(Tally::default());
    let workers = options.workers.clamp(1, blocks);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| {
                let mut local = Tally::default();
                loop {
                    let b = next.fetch_add(1, Ordering::Relaxed);
                    if b >= blocks {
                        break;
                    }
                    let count = TRIAL_BLOCK.min(trials_usize - b * TRIAL_BLOCK);
                    let t = run_block(&decoder, params, options.mode, b, count);
                    local.x.add(&t.x);
                    local.z.add(&t.z);
                    local.ops += t.ops;
                }
                let mut g = total.lock().expect("no poisoned tally");
                g.x.add(&local.x);
                g.z.add(&local.z);
                g.ops += local.ops;
            });
        }
    });
    let t = total.into_inner().expect("no poisoned tally");
    Ok(SimulationReport {
        code: code.params().to_string(),
        params: *params,
        mode: options.mode,
        trials,
        x: t.x,
        z: t.z,
        ops: t.ops,
    })
}

/// Result of [`exhaustive_radius_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadiusCheck {
    pub x_cases: u64,
    pub z_cases: u64,
    /// X cases decoded to a different but equivalent error.
    pub x_degenerate: u64,
    pub z_degenerate: u64,
    /// First logical failure or abort found.
    pub counterexample: Option<(ErrorKind, Vec<u32>)>,
}

impl RadiusCheck {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

/// Number of cases visited by [`exhaustive_radius_check`].
pub fn radius_check_cases(code: &AqctpcCode, x_radius: usize, z_blocks: usize) -> u128 {
    let p = code.params();
    let q = code.base_field().order() as u128;
    let x: u128 = (1..=x_radius)
        .map(|w| binomial(p.n, w).saturating_mul((q - 1).saturating_pow(w as u32)))
        .fold(0u128, |a, b| a.saturating_add(b));
    let per_block = q.saturating_pow(p.n1 as u32) - 1;
    let z: u128 = (1..=z_blocks)
        .map(|w| binomial(p.n2, w).saturating_mul(per_block.saturating_pow(w as u32)))
        .fold(0u128, |a, b| a.saturating_add(b));
    x.saturating_add(z)
}

/// Decodes every X error of weight at most `x_radius` and every Z error on at most `z_blocks` sub-blocks.
pub fn exhaustive_radius_check(
    code: &AqctpcCode,
    x_radius: usize,
    z_blocks: usize,
    cap: u128,
) -> Result<RadiusCheck, ChannelError> {
    let cases = radius_check_cases(code, x_radius, z_blocks);
    if cases > cap {
        return Err(ChannelError::Infeasible { cases, cap });
    }
    let decoder = AqctpcDecoder::new(code);
    let p = code.params();
    let q = code.base_field().order();
    let zero = vec![0u32; p.n];
    let mut out = RadiusCheck {
        x_cases: 0,
        z_cases: 0,
        x_degenerate: 0,
        z_degenerate: 0,
        counterexample: None,
    };
    for w in 1..=x_radius.min(p.n) {
        let mut support: Vec<usize> = (0..w).collect();
        loop {
            let mut vals = vec![1u32; w];
            loop {
                let mut u = zero.clone();
                for (&j, &v) in support.iter().zip(&vals) {
                    u[j] = v;
                }
                let d = decoder.decode_x(&code.hx().mul_vec(&u).expect("length n"));
                out.x_cases += 1;
                let class = d
                    .abort
                    .is_none()
                    .then(|| classify_residual(code, &u, &d.error, ErrorKind::X));
                match class {
                    Some(Classification::Exact) => {}
                    Some(Classification::DegenerateSuccess) => out.x_degenerate += 1,
                    _ => {
                        if out.counterexample.is_none() {
                            out.counterexample = Some((ErrorKind::X, u));
                        }
                    }
                }
                if !next_values(&mut vals, q) {
                    break;
                }
            }
            if !next_combination(&mut support, p.n) {
                break;
            }
        }
    }
    for w in 1..=z_blocks.min(p.n2) {
        let mut blocks: Vec<usize> = (0..w).collect();
        loop {
            let mut patterns = vec![vec![0u32; p.n1]; w];
            for pat in patterns.iter_mut() {
                pat[p.n1 - 1] = 1;
            }
            loop {
                let mut v = zero.clone();
                for (&b, pat) in blocks.iter().zip(&patterns) {
                    v[b * p.n1..(b + 1) * p.n1].copy_from_slice(pat);
                }
                let bundle = decoder.syndromes(&zero, &v);
                let d = decoder.decode_z(&bundle, ZMode::Plain);
                out.z_cases += 1;
                let class = d
                    .abort
                    .is_none()
                    .then(|| classify_residual(code, &v, &d.error, ErrorKind::Z));
                match class {
                    Some(Classification::Exact) => {}
                    Some(Classification::DegenerateSuccess) => out.z_degenerate += 1,
                    _ => {
                        if out.counterexample.is_none() {
                            out.counterexample = Some((ErrorKind::Z, v));
                        }
                    }
                }
                if !next_nonzero_patterns(&mut patterns, q) {
                    break;
                }
            }
            if !next_combination(&mut blocks, p.n2) {
                break;
            }
        }
    }
    Ok(out)
}

/// Steps a tuple of nonzero block patterns through all combinations.
fn next_nonzero_patterns(patterns: &mut [Vec<u32>], q: u32) -> bool {
    for pat in patterns.iter_mut().rev() {
        loop {
            let mut i = pat.len();
            let wrapped = loop {
                if i == 0 {
                    break true;
                }
                i -= 1;
                pat[i] += 1;
                if pat[i] < q {
                    break false;
                }
                pat[i] = 0;
            };
            if wrapped {
                let last = pat.len() - 1;
                pat[last] = 1;
                break;
            }
            if pat.iter().any(|&x| x != 0) {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{nested_grs_pair, simplex_code, spc_code};

    fn instance_15() -> AqctpcCode {
        let f4 = Field::binary_extension(2).unwrap();
        AqctpcCode::build(simplex_code(2).unwrap(), nested_grs_pair(&f4, 5, 3, 3).unwrap()).unwrap()
    }

    #[test]
    fn sampling_extremes() {
        let f2 = Field::prime(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let zero = sample_pauli(&f2, 10, &ChannelParams::new(0.0, 0.0, 1).unwrap(), &mut rng);
        assert_eq!(zero.wt_q(), 0);
        let e = sample_pauli(&f2, 4, &ChannelParams::new(0.0, 1.0, 1).unwrap(), &mut rng);
        assert_eq!(e.v, vec![1; 4]);
        assert_eq!(e.u, vec![0; 4]);
        assert_eq!((e.wt_x(), e.wt_z(), e.wt_q()), (0, 4, 4));
        assert!(ChannelParams::new(1.5, 0.0, 0).is_err());
        assert!(ChannelParams::from_asymmetry(0.1, 0.0, 0).is_err());
        assert_eq!(
            ChannelParams::from_asymmetry(0.1, 100.0, 0)
                .unwrap()
                .theta()
                .unwrap()
                .round(),
            100.0
        );
    }

    #[test]
    fn sampling_concentration() {
        let f2 = Field::prime(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let e = sample_pauli(&f2, n, &ChannelParams::new(0.0, 0.01, 7).unwrap(), &mut rng);
        let sigma = (n as f64 * 0.01 * 0.99).sqrt();
        assert!((e.wt_z() as f64 - 1000.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn nonbinary_samples_are_nonzero_uniform() {
        let f4 = Field::binary_extension(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let e = sample_pauli(&f4, 3000, &ChannelParams::new(1.0, 0.0, 3).unwrap(), &mut rng);
        for val in 1..4 {
            let c = e.u.iter().filter(|&&x| x == val).count();
            assert!((800..1200).contains(&c));
        }
    }

    #[test]
    fn syndrome_extraction_structure() {
        let code = instance_15();
        let dec = AqctpcDecoder::new(&code);
        let zero = PauliError {
            u: vec![0; 15],
            v: vec![0; 15],
        };
        let b = extract_syndromes(&dec, &zero).unwrap();
        assert!(b.phi.iter().all(|&x| x == 0) && b.psi_outer.iter().all(|&x| x == 0));
        let mut u = vec![0; 15];
        u[4] = 1;
        let b = extract_syndromes(&dec, &PauliError { u, v: vec![0; 15] }).unwrap();
        let col: Vec<u32> = (0..code.hx().rows()).map(|r| code.hx().get(r, 4)).collect();
        assert_eq!(b.phi, col);
        let mut v = vec![0; 15];
        v[7] = 1;
        let b = extract_syndromes(&dec, &PauliError { u: vec![0; 15], v }).unwrap();
        for (j, psi) in b.psi_inner.iter().enumerate() {
            assert_eq!(psi.iter().any(|&x| x != 0), j == 2);
        }
        assert!(extract_syndromes(
            &dec,
            &PauliError {
                u: vec![0; 3],
                v: vec![0; 3]
            }
        )
        .is_err());
    }

    #[test]
    fn wilson_behaves_at_zero() {
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.03 && hi < 0.04);
        let (lo, hi) = wilson_interval(50, 100);
        assert!(lo < 0.5 && hi > 0.5);
    }

    #[test]
    fn noiseless_trials_never_fail() {
        let code = instance_15();
        let params = ChannelParams::new(0.0, 0.0, 5).unwrap();
        let r = run_trials(&code, &params, 300, TrialOptions::default()).unwrap();
        assert_eq!(r.x.exact, 300);
        assert_eq!(r.z.exact, 300);
        assert_eq!(r.x.total(), r.trials);
    }

    #[test]
    fn worker_count_does_not_change_report() {
        let code = instance_15();
        let params = ChannelParams::from_asymmetry(0.05, 10.0, 42).unwrap();
        let one = run_trials(
            &code,
            &params,
            1000,
            TrialOptions {
                mode: ZMode::Plain,
                workers: 1,
            },
        )
        .unwrap();
        let four = run_trials(
            &code,
            &params,
            1000,
            TrialOptions {
                mode: ZMode::Plain,
                workers: 4,
            },
        )
        .unwrap();
        assert_eq!(one.to_text(), four.to_text());
        assert_eq!(one.z.total(), 1000);
    }

    #[test]
    fn radius_check_on_15() {
        let code = instance_15();
        let r = exhaustive_radius_check(&code, 1, 1, 1 << 20).unwrap();
        assert!(r.passed());
        assert_eq!((r.x_cases, r.z_cases), (15, 35));
        assert!(r.x_degenerate > 0);
        let none = exhaustive_radius_check(&code, 0, 0, 1).unwrap();
        assert!(none.passed() && none.x_cases == 0);
        assert!(exhaustive_radius_check(&code, 15, 5, 1000).is_err());
    }

    #[test]
    fn pattern_stepping_counts() {
        let mut pats = vec![vec![0, 0, 1], vec![0, 0, 1]];
        let mut count = 1;
        while next_nonzero_patterns(&mut pats, 2) {
            count += 1;
        }
        assert_eq!(count, 49);
    }

    #[test]
    fn spc_instance_shows_degeneracy() {
        let f8 = Field::binary_extension(3).unwrap();
        let code = AqctpcCode::build(spc_code(3).unwrap(), nested_grs_pair(&f8, 7, 3, 3).unwrap()).unwrap();
        let r = exhaustive_radius_check(&code, 1, 1, 1 << 20).unwrap();
        assert!(r.passed());
        assert!(r.x_degenerate > 0);
    }
}
