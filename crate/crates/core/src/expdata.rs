//! Measurement statistics: per-setting count histograms, correlation and
//! operator estimation with error propagation, and Born-rule simulation.
//!
//! Conventions match the rest of the crate: qubit 1 is the leftmost character
//! of a setting or outcome string, and outcome bit `0` means the +1 eigenvalue
//! of the local observable.

use crate::pauli::{
    axes_to_string, correlation_tensor, fidelity_operator, parse_axes, Axis, ObservableSum,
    PauliString, RELEVANCE_THRESHOLD,
};
use crate::qstate::{DensityMatrix, StateVector};
use crate::real::{c_one, c_zero, Real, C};
use crate::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

/// Coincidence counts for one product measurement setting.
///
/// Counts are stored densely, indexed by the outcome bits. Histograms may
/// have fewer qubits than a state (marginals of measured data), hence the
/// wider `1..=6` range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SettingHistogram {
    n: usize,
    setting: Vec<Axis>,
    counts: Vec<u64>,
}

/// On-disk form: `{"n":4,"setting":"zzzz","counts":{"0011":124,…}}`.
/// Absent outcomes mean zero; serialization writes all of them explicitly.
#[derive(Serialize, Deserialize)]
struct RawHistogram {
    n: usize,
    setting: String,
    counts: BTreeMap<String, u64>,
}

impl SettingHistogram {
    pub fn new(n: usize, setting: Vec<Axis>, counts: Vec<u64>) -> Result<Self> {
        if n == 0 || n > 6 {
            return Err(Error::UnsupportedQubitCount(n));
        }
        if setting.len() != n {
            return Err(Error::QubitMismatch { expected: n, got: setting.len() });
        }
        if setting.contains(&Axis::I) {
            return Err(Error::IdentityInSetting(axes_to_string(&setting)));
        }
        if counts.len() != 1 << n {
            return Err(Error::BadOutcome(format!(
                "expected {} dense counts, got {}",
                1 << n,
                counts.len()
            )));
        }
        Ok(SettingHistogram { n, setting, counts })
    }

    /// Build from sparse (bitstring, count) pairs; absent outcomes are zero.
    pub fn from_pairs<I, S>(n: usize, setting: Vec<Axis>, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: AsRef<str>,
    {
        let mut counts = vec![0u64; 1usize.checked_shl(n as u32).unwrap_or(0).max(1)];
        if n == 0 || n > 6 {
            return Err(Error::UnsupportedQubitCount(n));
        }
        counts.resize(1 << n, 0);
        for (key, c) in pairs {
            counts[outcome_index(key.as_ref(), n)?] += c;
        }
        SettingHistogram::new(n, setting, counts)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn setting(&self) -> &[Axis] {
        &self.setting
    }

    pub fn setting_string(&self) -> String {
        axes_to_string(&self.setting)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, outcome: &str) -> Result<u64> {
        Ok(self.counts[outcome_index(outcome, self.n)?])
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn outcome_key(&self, index: usize) -> String {
        format!("{:0width$b}", index, width = self.n)
    }

    /// Histogram over a subset of positions, summing out the rest. Positions
    /// are 0-based from the left (position 0 = qubit 1).
    pub fn marginalized(&self, active: &[usize]) -> Result<SettingHistogram> {
        let active = checked_positions(active, self.n)?;
        let m = active.len();
        let setting: Vec<Axis> = active.iter().map(|&p| self.setting[p]).collect();
        let mut counts = vec![0u64; 1 << m];
        for (o, &c) in self.counts.iter().enumerate() {
            let mut reduced = 0usize;
            for (j, &p) in active.iter().enumerate() {
                reduced |= ((o >> (self.n - 1 - p)) & 1) << (m - 1 - j);
            }
            counts[reduced] += c;
        }
        SettingHistogram::new(m, setting, counts)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("histogram serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl Serialize for SettingHistogram {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let counts = self
            .counts
            .iter()
            .enumerate()
            .map(|(o, &c)| (self.outcome_key(o), c))
            .collect();
        RawHistogram { n: self.n, setting: self.setting_string(), counts }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for SettingHistogram {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = RawHistogram::deserialize(de)?;
        let setting = parse_axes(&raw.setting).map_err(serde::de::Error::custom)?;
        SettingHistogram::from_pairs(raw.n, setting, raw.counts)
            .map_err(serde::de::Error::custom)
    }
}

fn outcome_index(key: &str, n: usize) -> Result<usize> {
    if key.len() != n || !key.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::BadOutcome(key.to_string()));
    }
    Ok(usize::from_str_radix(key, 2).expect("validated bitstring"))
}

fn checked_positions(active: &[usize], n: usize) -> Result<Vec<usize>> {
    if active.is_empty() {
        return Err(Error::EmptyMarginal);
    }
    let set: BTreeSet<usize> = active.iter().copied().collect();
    if let Some(&p) = set.iter().find(|&&p| p >= n) {
        return Err(Error::Parse(format!("qubit position {p} out of range for n = {n}")));
    }
    Ok(set.into_iter().collect())
}

/// A point estimate with its standard error and the settings it consumed.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: serde::de::DeserializeOwned"))]
pub struct EstimatedValue<T> {
    pub value: T,
    pub stderr: T,
    pub settings_used: Vec<String>,
}

/// Parity estimator over the masked positions: E = Σ_o (−1)^{|o∧mask|} N_o/N
/// with the multinomial error sqrt((1−E²)/N). The signed sum is integer, so
/// exact Born-weight counts reproduce analytic values exactly.
fn parity_estimate<T: Real>(h: &SettingHistogram, mask: usize) -> Result<(T, T)> {
    let total = h.total();
    if total == 0 {
        return Err(Error::EmptyHistogram { setting: h.setting_string() });
    }
    let mut signed: i128 = 0;
    for (o, &c) in h.counts().iter().enumerate() {
        if (o & mask).count_ones() & 1 == 1 {
            signed -= c as i128;
        } else {
            signed += c as i128;
        }
    }
    let n = T::of(total as f64);
    let e = T::of(signed as f64) / n;
    let var = (T::one() - e * e).max(T::zero()) / n;
    Ok((e, var.sqrt()))
}

fn mask_of(active: &[usize], n: usize) -> usize {
    active.iter().fold(0, |m, &p| m | (1 << (n - 1 - p)))
}

/// Full-weight correlation of the histogram's setting.
pub fn estimate_correlation<T: Real>(h: &SettingHistogram) -> Result<EstimatedValue<T>> {
    let (value, stderr) = parity_estimate(h, (1 << h.n()) - 1)?;
    Ok(EstimatedValue { value, stderr, settings_used: vec![h.setting_string()] })
}

/// Correlation over a subset of positions, identity on the rest.
pub fn marginal_correlation<T: Real>(
    h: &SettingHistogram,
    active: &[usize],
) -> Result<EstimatedValue<T>> {
    let active = checked_positions(active, h.n())?;
    let (value, stderr) = parity_estimate(h, mask_of(&active, h.n()))?;
    Ok(EstimatedValue { value, stderr, settings_used: vec![h.setting_string()] })
}

/// True when the setting measures the term: it agrees on every non-identity
/// position (identity positions are marginalized away).
fn covers(setting: &[Axis], axes: &[Axis]) -> bool {
    setting.len() == axes.len()
        && axes.iter().zip(setting).all(|(&a, &s)| a == Axis::I || a == s)
}

/// Inverse-variance pooling of independent estimates of one quantity. Returns
/// the pooled value and the weight given to each estimate (weights sum to 1).
/// Any zero-error estimate takes precedence (exact counts), short-circuiting
/// the weighting.
fn pool<T: Real>(estimates: &[(T, T)]) -> (T, Vec<T>) {
    let exact = estimates.iter().filter(|(_, s)| *s == T::zero()).count();
    let mut alphas = vec![T::zero(); estimates.len()];
    if exact > 0 {
        let share = T::of(exact as f64).recip();
        let mut sum = T::zero();
        for (i, &(e, s)) in estimates.iter().enumerate() {
            if s == T::zero() {
                alphas[i] = share;
                sum += e;
            }
        }
        return (sum * share, alphas);
    }
    let wsum: T = estimates.iter().map(|&(_, s)| (s * s).recip()).sum();
    let mut acc = T::zero();
    for (i, &(e, s)) in estimates.iter().enumerate() {
        alphas[i] = (s * s).recip() / wsum;
        acc += alphas[i] * e;
    }
    (acc, alphas)
}

/// Variance of the empirical mean of f(o) = Σ c·(−1)^{|o∧mask|} over one
/// histogram: (E[f²] − E[f]²)/N. Terms sharing a histogram share its events,
/// so their errors are combined here rather than added in quadrature.
fn combined_variance<T: Real>(h: &SettingHistogram, contrib: &[(T, usize)]) -> T {
    let total = T::of(h.total() as f64);
    let mut mean = T::zero();
    let mut mean_sq = T::zero();
    for (o, &c) in h.counts().iter().enumerate() {
        if c == 0 {
            continue;
        }
        let w = T::of(c as f64) / total;
        let mut f = T::zero();
        for &(coef, mask) in contrib {
            if (o & mask).count_ones() & 1 == 1 {
                f -= coef;
            } else {
                f += coef;
            }
        }
        mean += w * f;
        mean_sq += w * f * f;
    }
    (mean_sq - mean * mean).max(T::zero()) / total
}

/// Estimate ⟨op⟩ from per-setting histograms.
///
/// Every non-identity term must be covered by at least one setting; terms
/// covered several times are inverse-variance averaged. Distinct settings are
/// independent runs; terms estimated from the same setting share its events,
/// so the error per setting is that of the combined contribution, covariances
/// included.
pub fn evaluate_operator<T: Real>(
    op: &ObservableSum<T>,
    data: &[SettingHistogram],
) -> Result<EstimatedValue<T>> {
    let mut value = T::zero();
    let mut used: BTreeSet<String> = BTreeSet::new();
    let mut contributions: Vec<Vec<(T, usize)>> = vec![Vec::new(); data.len()];
    for term in op.terms() {
        let axes = term.axes();
        let active: Vec<usize> = (0..axes.len()).filter(|&p| axes[p] != Axis::I).collect();
        if active.is_empty() {
            // ⟨identity⟩ = 1 with no statistical error and no measurement
            value += term.weight();
            continue;
        }
        let mask = mask_of(&active, axes.len());
        let mut estimates = Vec::new();
        let mut sources = Vec::new();
        for (i, h) in data.iter().enumerate() {
            if covers(h.setting(), axes) {
                estimates.push(parity_estimate::<T>(h, mask)?);
                sources.push(i);
                used.insert(h.setting_string());
            }
        }
        if estimates.is_empty() {
            let suggestion: String = axes
                .iter()
                .map(|&a| if a == Axis::I { 'z' } else { a.to_char() })
                .collect();
            return Err(Error::UncoveredTerm { term: term.axes_string(), suggestion });
        }
        let (e, alphas) = pool(&estimates);
        value += term.weight() * e;
        for (&i, &a) in sources.iter().zip(&alphas) {
            if a != T::zero() {
                contributions[i].push((term.weight() * a, mask));
            }
        }
    }
    let mut var = T::zero();
    for (h, contrib) in data.iter().zip(&contributions) {
        if !contrib.is_empty() {
            var += combined_variance(h, contrib);
        }
    }
    Ok(EstimatedValue { value, stderr: var.sqrt(), settings_used: used.into_iter().collect() })
}

/// Overlap with a pure target state, estimated from measured correlations of
/// the target's relevant tensor entries (|T| above the relevance cutoff).
pub fn fidelity_from_data<T: Real>(
    target: &StateVector<T>,
    data: &[SettingHistogram],
) -> Result<EstimatedValue<T>> {
    let tensor = correlation_tensor(target);
    let full = fidelity_operator(&tensor)?;
    let cutoff = T::of(RELEVANCE_THRESHOLD);
    let kept: Vec<PauliString<T>> = full
        .terms()
        .iter()
        .filter(|t| tensor.get(t.axes()).abs() > cutoff)
        .cloned()
        .collect();
    let op = ObservableSum::new(target.n(), kept)?;
    evaluate_operator(&op, data)
}

/// A set of settings sufficient to evaluate the operator: full-weight terms
/// measure themselves; remaining identity slots are filled with the term's
/// leading non-identity axis.
pub fn covering_settings<T: Real>(op: &ObservableSum<T>) -> Vec<Vec<Axis>> {
    let mut settings: Vec<Vec<Axis>> = Vec::new();
    for term in op.terms() {
        if term.is_identity() {
            continue;
        }
        if term.axes().iter().all(|&a| a != Axis::I) && !settings.contains(&term.axes().to_vec()) {
            settings.push(term.axes().to_vec());
        }
    }
    for term in op.terms() {
        if term.is_identity() || settings.iter().any(|s| covers(s, term.axes())) {
            continue;
        }
        let fill = term
            .axes()
            .iter()
            .copied()
            .find(|&a| a != Axis::I)
            .expect("non-identity term has an axis");
        let s: Vec<Axis> =
            term.axes().iter().map(|&a| if a == Axis::I { fill } else { a }).collect();
        if !settings.contains(&s) {
            settings.push(s);
        }
    }
    settings
}

/// Outcome probabilities of a product measurement in the setting's eigenbasis.
pub fn born_probabilities<T: Real>(rho: &DensityMatrix<T>, setting: &[Axis]) -> Result<Vec<T>> {
    let n = rho.n();
    if setting.len() != n {
        return Err(Error::QubitMismatch { expected: n, got: setting.len() });
    }
    if setting.contains(&Axis::I) {
        return Err(Error::IdentityInSetting(axes_to_string(setting)));
    }
    let dim = 1usize << n;
    let mat = rho.matrix();
    let mut probs = Vec::with_capacity(dim);
    let mut sum = T::zero();
    for o in 0..dim {
        // product eigenvector of the outcome, qubit 1 outermost
        let mut phi = vec![c_one::<T>()];
        for (p, &ax) in setting.iter().enumerate() {
            let v = local_eigvec::<T>(ax, (o >> (n - 1 - p)) & 1);
            let mut next = Vec::with_capacity(phi.len() * 2);
            for a in &phi {
                next.push(*a * v[0]);
                next.push(*a * v[1]);
            }
            phi = next;
        }
        let rphi = mat.mul_vec(&phi);
        let mut q = c_zero::<T>();
        for (a, b) in phi.iter().zip(&rphi) {
            q += a.conj() * *b;
        }
        let p = q.re.max(T::zero());
        sum += p;
        probs.push(p);
    }
    // trace-1 positivity of rho keeps the total at 1 up to roundoff
    for p in &mut probs {
        *p /= sum;
    }
    Ok(probs)
}

fn local_eigvec<T: Real>(axis: Axis, bit: usize) -> [C<T>; 2] {
    let h = T::of(std::f64::consts::FRAC_1_SQRT_2);
    let z = T::zero();
    match (axis, bit) {
        (Axis::Z, 0) => [c_one(), c_zero()],
        (Axis::Z, _) => [c_zero(), c_one()],
        (Axis::X, 0) => [C::new(h, z), C::new(h, z)],
        (Axis::X, _) => [C::new(h, z), C::new(-h, z)],
        (Axis::Y, 0) => [C::new(h, z), C::new(z, h)],
        (Axis::Y, _) => [C::new(h, z), C::new(z, -h)],
        (Axis::I, _) => unreachable!("identity rejected before sampling"),
    }
}

/// How event totals fluctuate in simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    /// Fixed total: counts are one multinomial draw.
    Multinomial,
    /// Independent Poisson counts per outcome with mean events·p; the total
    /// varies.
    Poisson,
}

/// Simulated coincidence histogram for one setting. Deterministic in `seed`.
pub fn simulate_counts<T: Real>(
    rho: &DensityMatrix<T>,
    setting: &[Axis],
    events: u64,
    seed: u64,
) -> Result<SettingHistogram> {
    simulate_counts_with_mode(rho, setting, events, seed, Sampling::Multinomial)
}

pub fn simulate_counts_with_mode<T: Real>(
    rho: &DensityMatrix<T>,
    setting: &[Axis],
    events: u64,
    seed: u64,
    mode: Sampling,
) -> Result<SettingHistogram> {
    if events == 0 {
        return Err(Error::EmptyHistogram { setting: axes_to_string(setting) });
    }
    let probs: Vec<f64> = born_probabilities(rho, setting)?.iter().map(|p| p.as_f64()).collect();
    let dim = probs.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; dim];
    match mode {
        Sampling::Multinomial => {
            // chain-binomial decomposition of one multinomial draw
            let mut remaining = events;
            let mut rem_p = 1.0f64;
            for o in 0..dim {
                if remaining == 0 {
                    break;
                }
                if o == dim - 1 {
                    counts[o] = remaining;
                    break;
                }
                let p = if rem_p > 0.0 { (probs[o] / rem_p).clamp(0.0, 1.0) } else { 0.0 };
                let draw =
                    Binomial::new(remaining, p).expect("clamped probability").sample(&mut rng);
                counts[o] = draw;
                remaining -= draw;
                rem_p = (rem_p - probs[o]).max(0.0);
            }
        }
        Sampling::Poisson => {
            for (o, &p) in probs.iter().enumerate() {
                let lambda = p * events as f64;
                if lambda > 0.0 {
                    counts[o] = Poisson::new(lambda).expect("positive mean").sample(&mut rng) as u64;
                }
            }
        }
    }
    SettingHistogram::new(setting.len(), setting.to_vec(), counts)
}

/// Write one histogram as pretty JSON.
pub fn write_histogram(path: &Path, h: &SettingHistogram) -> Result<()> {
    std::fs::write(path, h.to_json() + "\n")?;
    Ok(())
}

pub fn read_histogram(path: &Path) -> Result<SettingHistogram> {
    SettingHistogram::from_json(&std::fs::read_to_string(path)?)
}

/// Manifest: one histogram path per line, relative to the manifest file;
/// blank lines and `#` comments are skipped.
pub fn read_manifest(path: &Path) -> Result<Vec<SettingHistogram>> {
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut out = Vec::new();
    for line in std::fs::read_to_string(path)?.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let entry = Path::new(line);
        let full = if entry.is_absolute() { entry.to_path_buf() } else { base.join(entry) };
        out.push(read_histogram(&full)?);
    }
    Ok(out)
}

pub fn write_manifest<S: AsRef<str>>(path: &Path, entries: &[S]) -> Result<()> {
    let mut text = String::new();
    for e in entries {
        text.push_str(e.as_ref());
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}
