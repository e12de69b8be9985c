//! Seeded sampling runs: draw carried multicurves uniformly, classify them
//! and tabulate the topological types.

use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::thread;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};
use thiserror::Error;

use crate::lattice::cone::{OpenCone, TruncatedCone};
use crate::lattice::{Counter, LatticeError};
use crate::surface::{shorten_with, trace_components, MulticurveCoords, ShortenOptions, SurfaceError, Triangulation};
use crate::topotype::{canonical_name, closed_surface_name, crush, partition_graph, CanonicalName, TopotypeError};
use crate::tracks::{CarriedWeights, TrackError, TrainTrack};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Track(#[from] TrackError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Topotype(#[from] TopotypeError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("the track carries no multicurve of length at most {0}")]
    Empty(u64),
    #[error("expected table: {0}")]
    Expected(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Filter {
    #[default]
    None,
    /// Connected multicurves only.
    Curves,
    /// Multicurves with no two parallel components.
    Primitive,
}

impl FromStr for Filter {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Filter::None),
            "curves" => Ok(Filter::Curves),
            "primitive" => Ok(Filter::Primitive),
            _ => Err(ExperimentError::Config(format!("unknown filter {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// How a uniform index is turned into a lattice point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    /// Triangulate the carried cone and index its half-open pieces.
    #[default]
    Cone,
    /// Lexicographic order on the length polytope, by recursive counting.
    Lex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub track: PathBuf,
    pub length: u64,
    pub samples: u64,
    pub seed: u64,
    pub filter: Filter,
    /// Name curves on the closed surface. Tracks marked closed are always
    /// named this way.
    pub closed: bool,
    pub format: OutputFormat,
    pub workers: usize,
    pub sampler: SamplerKind,
    pub move_budget: u64,
}

impl ExperimentConfig {
    pub fn new(track: impl Into<PathBuf>, length: u64, samples: u64, seed: u64) -> Self {
        ExperimentConfig {
            track: track.into(),
            length,
            samples,
            seed,
            filter: Filter::None,
            closed: false,
            format: OutputFormat::Csv,
            workers: 1,
            sampler: SamplerKind::Cone,
            move_budget: crate::surface::DEFAULT_MOVE_BUDGET,
        }
    }
}

/// A sampler for one track and length bound. Cheap to share across threads.
#[derive(Debug, Clone)]
pub struct Sampler {
    track: Arc<TrainTrack>,
    kind: SamplerKind,
    truncated: TruncatedCone,
}

impl Sampler {
    pub fn new(track: Arc<TrainTrack>, length: u64, kind: SamplerKind) -> Result<Self> {
        let cone: Arc<OpenCone> = track.cone()?;
        let truncated = cone.truncate(length);
        Ok(Sampler { track, kind, truncated })
    }

    pub fn track(&self) -> &TrainTrack {
        &self.track
    }

    /// `|s_τ(L)|`
    pub fn count(&self) -> u128 {
        self.truncated.count()
    }

    /// Branch weights of the `index`-th carried multicurve.
    pub fn weights(&self, index: u128, counter: &mut Counter) -> Result<CarriedWeights> {
        let point = match self.kind {
            SamplerKind::Cone => self.truncated.point(index)?,
            SamplerKind::Lex => {
                let p = self.track.length_polytope(self.truncated.bound());
                counter
                    .ith_point(&p, &BigUint::from(index))?
                    .to_i64s()
                    .ok_or_else(|| ExperimentError::Config("branch weight out of range".into()))?
            }
        };
        Ok(CarriedWeights(point.into_iter().map(|x| x as u64).collect()))
    }

    /// A uniformly random carried multicurve with its branch weights.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, counter: &mut Counter) -> Result<(CarriedWeights, MulticurveCoords)> {
        let n = self.count();
        if n == 0 {
            return Err(ExperimentError::Empty(self.truncated.bound()));
        }
        let w = self.weights(rng.gen_range(0..n), counter)?;
        let c = self.track.to_multicurve(&w)?;
        Ok((w, c))
    }
}

/// A uniformly random multicurve fully carried by `track` with length at
/// most `length`.
pub fn sample_multicurve<R: Rng + ?Sized>(track: &TrainTrack, length: u64, rng: &mut R) -> Result<MulticurveCoords> {
    let s = Sampler::new(Arc::new(track.clone()), length, SamplerKind::Cone)?;
    Ok(s.sample(rng, &mut Counter::new())?.1)
}

/// The random stream used for sample `index` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub name: CanonicalName,
    /// Components counted with multiplicity.
    pub num_components: u64,
    pub primitive: bool,
}

/// Shorten, crush and name a multicurve. With `closed` the punctures of `t`
/// are treated as artificial.
pub fn classify(t: &Triangulation, coords: &MulticurveCoords, closed: bool) -> Result<Classification> {
    classify_with(t, coords, closed, &ShortenOptions::default())
}

pub fn classify_with(
    t: &Triangulation,
    coords: &MulticurveCoords,
    closed: bool,
    opts: &ShortenOptions,
) -> Result<Classification> {
    let s = shorten_with(t, coords, opts)?;
    let g = partition_graph(&crush(&s.short_form)?);
    let name = if closed { closed_surface_name(&g) } else { canonical_name(&g) };
    Ok(Classification {
        name,
        num_components: s.short_form.num_components(),
        primitive: s.short_form.is_primitive(),
    })
}

fn passes(filter: Filter, t: &Triangulation, coords: &MulticurveCoords) -> Result<bool> {
    if filter == Filter::None {
        return Ok(true);
    }
    let mut comps = trace_components(t, coords)?;
    if filter == Filter::Curves {
        return Ok(comps.len() == 1);
    }
    let n = comps.len();
    comps.sort();
    comps.dedup();
    Ok(comps.len() == n)
}

/// A sample that could not be classified, with enough to replay it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcludedSample {
    pub index: u64,
    pub weights: Vec<u64>,
    pub coords: Vec<u64>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    pub count: u64,
    pub fraction: f64,
}

/// `K̂(a, b)`, the ratio of two counts, with a Wilson interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub numerator: String,
    pub denominator: String,
    pub value: f64,
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub config: ExperimentConfig,
    /// `|s_τ(L)|`, as a decimal string.
    pub population: String,
    pub counts: BTreeMap<String, u64>,
    pub drawn: u64,
    pub retained: u64,
    pub filtered_out: u64,
    pub errored: u64,
    pub excluded: Vec<ExcludedSample>,
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, confidence: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(0.5 + confidence / 2.0);
    let (k, n) = (k as f64, n as f64);
    let p = k / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

impl DistributionReport {
    /// Rows by decreasing count, ties by name.
    pub fn rows(&self) -> Vec<Row> {
        let mut rows: Vec<Row> = self
            .counts
            .iter()
            .map(|(name, &count)| Row {
                name: name.clone(),
                count,
                fraction: if self.retained == 0 { 0.0 } else { count as f64 / self.retained as f64 },
            })
            .collect();
        rows.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.name.cmp(&b.name)));
        rows
    }

    pub fn count(&self, name: &str) -> u64 {
        self.counts.get(name).copied().unwrap_or(0)
    }

    pub fn fraction(&self, name: &str) -> f64 {
        if self.retained == 0 {
            return 0.0;
        }
        self.count(name) as f64 / self.retained as f64
    }

    /// Estimate `K(a, b) = count(a) / count(b)` with the Wilson interval on
    /// `count(a) / (count(a) + count(b))` pushed through `p / (1 - p)`.
    pub fn ratio(&self, a: &str, b: &str, confidence: f64) -> RatioEstimate {
        let (ka, kb) = (self.count(a), self.count(b));
        let (lo, hi) = wilson_interval(ka, ka + kb, confidence);
        let odds = |p: f64| if p >= 1.0 { f64::INFINITY } else { p / (1.0 - p) };
        RatioEstimate {
            numerator: a.to_string(),
            denominator: b.to_string(),
            value: if kb == 0 { f64::INFINITY } else { ka as f64 / kb as f64 },
            low: odds(lo),
            high: odds(hi),
        }
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in self.rows() {
            w.serialize(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self, comparison: Option<&Comparison>) -> Result<String> {
        let rows = self.rows();
        let mut ratios = Vec::new();
        let top: Vec<&Row> = rows.iter().take(6).collect();
        for (i, a) in top.iter().enumerate() {
            for b in &top[i + 1..] {
                ratios.push(self.ratio(&a.name, &b.name, 0.99));
            }
        }
        let value = serde_json::json!({
            "config": self.config,
            "seed": self.config.seed,
            "population": self.population,
            "drawn": self.drawn,
            "retained": self.retained,
            "filtered_out": self.filtered_out,
            "errored": self.errored,
            "rows": rows,
            "ratios": ratios,
            "comparison": comparison,
            "excluded": self.excluded,
        });
        Ok(serde_json::to_string_pretty(&value)?)
    }
}

#[derive(Default)]
struct Tally {
    counts: BTreeMap<String, u64>,
    retained: u64,
    filtered_out: u64,
    excluded: Vec<ExcludedSample>,
}

impl Tally {
    fn merge(&mut self, other: Tally) {
        for (k, v) in other.counts {
            *self.counts.entry(k).or_insert(0) += v;
        }
        self.retained += other.retained;
        self.filtered_out += other.filtered_out;
        self.excluded.extend(other.excluded);
    }
}

/// Load the track named in `config` and run the experiment.
pub fn run(config: &ExperimentConfig) -> Result<DistributionReport> {
    let track = TrainTrack::load(&config.track)?;
    run_with_track(config, track)
}

/// Run on an already loaded track; `config.track` is only echoed.
pub fn run_with_track(config: &ExperimentConfig, track: TrainTrack) -> Result<DistributionReport> {
    if config.samples == 0 {
        return Err(ExperimentError::Config("need at least one sample".into()));
    }
    if config.length < track.num_branches() as u64 {
        return Err(ExperimentError::Config(format!(
            "length {} is below the number of branches {}",
            config.length,
            track.num_branches()
        )));
    }
    let closed = config.closed || track.is_closed();
    let sampler = Sampler::new(Arc::new(track), config.length, config.sampler)?;
    if sampler.count() == 0 {
        return Err(ExperimentError::Empty(config.length));
    }
    let workers = config.workers.max(1) as u64;
    let opts = ShortenOptions {
        move_budget: config.move_budget,
        tie_break_seed: None,
    };
    let work = |w: u64| -> Result<Tally> {
        let mut tally = Tally::default();
        let mut counter = Counter::new();
        let base = sampler.track().base();
        let mut index = w;
        while index < config.samples {
            let mut rng = sample_rng(config.seed, index);
            let (weights, coords) = sampler.sample(&mut rng, &mut counter)?;
            if !passes(config.filter, base, &coords)? {
                tally.filtered_out += 1;
            } else {
                match classify_with(base, &coords, closed, &opts) {
                    Ok(c) => {
                        *tally.counts.entry(c.name.to_string()).or_insert(0) += 1;
                        tally.retained += 1;
                    }
                    Err(e) => tally.excluded.push(ExcludedSample {
                        index,
                        weights: weights.0,
                        coords: coords.weights().to_vec(),
                        error: e.to_string(),
                    }),
                }
            }
            index += workers;
        }
        Ok(tally)
    };
    let results: Vec<Result<Tally>> = if workers == 1 {
        vec![work(0)]
    } else {
        thread::scope(|s| {
            let handles: Vec<_> = (0..workers).map(|w| s.spawn(move || work(w))).collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        })
    };
    let mut total = Tally::default();
    for r in results {
        total.merge(r?);
    }
    total.excluded.sort_by_key(|e| e.index);
    Ok(DistributionReport {
        config: config.clone(),
        population: sampler.count().to_string(),
        counts: total.counts,
        drawn: config.samples,
        retained: total.retained,
        filtered_out: total.filtered_out,
        errored: total.excluded.len() as u64,
        excluded: total.excluded,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub name: String,
    pub observed: u64,
    pub observed_fraction: f64,
    pub expected_fraction: f64,
    /// Observed minus expected, in percentage points.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    pub rows: Vec<ComparisonRow>,
    /// Observed names missing from the expected table; left out of the
    /// statistic.
    pub unexpected: Vec<(String, u64)>,
}

/// Pearson's chi-square test of observed counts against expected fractions.
pub fn compare(counts: &BTreeMap<String, u64>, expected: &[(String, f64)]) -> Result<Comparison> {
    let total: f64 = expected.iter().map(|(_, p)| p).sum();
    if expected.is_empty() || (total - 1.0).abs() > 1e-6 {
        return Err(ExperimentError::Expected(format!("fractions sum to {total}, not 1")));
    }
    let n: u64 = expected.iter().map(|(name, _)| counts.get(name).copied().unwrap_or(0)).sum();
    let mut chi = 0.0;
    let mut rows = Vec::with_capacity(expected.len());
    for (name, p) in expected {
        let o = counts.get(name).copied().unwrap_or(0);
        let e = n as f64 * p;
        if e > 0.0 {
            chi += (o as f64 - e).powi(2) / e;
        } else if o > 0 {
            chi = f64::INFINITY;
        }
        let of = if n == 0 { 0.0 } else { o as f64 / n as f64 };
        rows.push(ComparisonRow {
            name: name.clone(),
            observed: o,
            observed_fraction: of,
            expected_fraction: *p,
            deviation: 100.0 * (of - p),
        });
    }
    let dof = expected.iter().filter(|(_, p)| *p > 0.0).count().saturating_sub(1);
    let p_value = if chi == 0.0 || dof == 0 {
        1.0
    } else {
        1.0 - ChiSquared::new(dof as f64).expect("positive degrees of freedom").cdf(chi)
    };
    let unexpected = counts
        .iter()
        .filter(|(name, _)| !expected.iter().any(|(e, _)| e == *name))
        .map(|(name, &c)| (name.clone(), c))
        .collect();
    Ok(Comparison {
        chi_square: chi,
        degrees_of_freedom: dof,
        p_value,
        rows,
        unexpected,
    })
}

fn parse_fraction(s: &str) -> Option<f64> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
            (b != 0.0).then(|| a / b)
        }
        None => s.parse().ok(),
    }
}

/// Read an expected table: CSV with a header and columns `name,fraction`,
/// where a fraction is a decimal or `a/b`. Names are normalised through
/// the canonical-name parser.
pub fn read_expected<R: io::Read>(input: R) -> Result<Vec<(String, f64)>> {
    let mut reader = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let (Some(name), Some(frac)) = (rec.get(0), rec.get(1)) else {
            return Err(ExperimentError::Expected(format!("short row {rec:?}")));
        };
        let name: CanonicalName = name.parse()?;
        let p = parse_fraction(frac).ok_or_else(|| ExperimentError::Expected(format!("bad fraction {frac:?}")))?;
        out.push((name.to_string(), p));
    }
    Ok(out)
}

pub fn load_expected(path: &Path) -> Result<Vec<(String, f64)>> {
    read_expected(std::fs::File::open(path)?)
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(
                f,
                "{:<48} {:>8} {:>8.2}% {:>8.2}% {:>+7.2}",
                r.name,
                r.observed,
                100.0 * r.observed_fraction,
                100.0 * r.expected_fraction,
                r.deviation
            )?;
        }
        for (name, c) in &self.unexpected {
            writeln!(f, "{name:<48} {c:>8} (not in expected table)")?;
        }
        write!(
            f,
            "chi-square {:.3} on {} degrees of freedom, p = {:.4}",
            self.chi_square, self.degrees_of_freedom, self.p_value
        )
    }
}
