//! Samplers for symmetric walks and bridges and Monte Carlo estimates of
//! every functional in [`crate::formulas`].
//!
//! Sample `i` of a run draws from `ChaCha8` seeded with the run seed on
//! stream `i`, and the per-sample values are summed in index order. Results
//! therefore do not depend on how many workers compute them.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Cauchy, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulas::{Formulas, Functional, FunctionalQuery, Indices, Model, ModelKind};
use crate::geometry::{
    self, count_k_faces, face_in_own_span, in_general_position, intersects_subspace, is_face, is_full_cone,
    is_pointed, k_faces, polar_generators, project_onto_cone, sample_uniform_subspace,
    tangent_cone_projection_base, ConeSample, GENERAL_POSITION_THRESHOLD,
};
use crate::identities::{self, IdentityCheck, SuiteLimits};
use crate::rational::ExactRational;

/// Draws that fail the general-position guard this many times in a row
/// abort the run.
pub const RETRY_BUDGET: u64 = 1000;

/// Largest `|z|` accepted by a Monte Carlo gate.
pub const Z_GATE: f64 = 4.0;

/// Smallest per-gate sample count for which gates are run at all.
pub const MIN_GATE_BUDGET: u64 = 10_000;

/// Increment law. Every family is sign- and permutation-invariant and has a
/// density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistFamily {
    /// i.i.d. standard Gaussian increments.
    GaussianIid,
    /// i.i.d. increments with independent standard Cauchy coordinates.
    HeavyTailIid,
    /// One shared log-normal scale times i.i.d. Gaussian increments;
    /// exchangeable but not independent.
    ScaledGaussianExchangeable,
}

impl DistFamily {
    pub const ALL: [DistFamily; 3] =
        [DistFamily::GaussianIid, DistFamily::HeavyTailIid, DistFamily::ScaledGaussianExchangeable];

    pub fn name(self) -> &'static str {
        match self {
            DistFamily::GaussianIid => "gaussian_iid",
            DistFamily::HeavyTailIid => "heavy_tail_iid",
            DistFamily::ScaledGaussianExchangeable => "scaled_gaussian_exchangeable",
        }
    }
}

impl fmt::Display for DistFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DistFamily {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "gaussian" | "gaussian_iid" => Ok(DistFamily::GaussianIid),
            "heavy" | "heavy_tail" | "heavy_tail_iid" | "cauchy" => Ok(DistFamily::HeavyTailIid),
            "scaled" | "scaled_gaussian" | "scaled_gaussian_exchangeable" => {
                Ok(DistFamily::ScaledGaussianExchangeable)
            }
            _ => Err(format!("unknown distribution {s:?} (expected gaussian, heavy or scaled)")),
        }
    }
}

/// Increment distribution in `R^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub family: DistFamily,
    pub d: usize,
    /// Gaussian standard deviation or Cauchy scale.
    pub scale: f64,
    /// Standard deviation of the log of the shared scale.
    pub log_scale_sd: f64,
}

impl DistributionSpec {
    pub fn new(family: DistFamily, d: usize) -> Self {
        DistributionSpec { family, d, scale: 1.0, log_scale_sd: 1.0 }
    }

    pub fn gaussian(d: usize) -> Self {
        DistributionSpec::new(DistFamily::GaussianIid, d)
    }

    /// `n x d` matrix of increments.
    pub fn increments<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> DMatrix<f64> {
        match self.family {
            DistFamily::GaussianIid => {
                DMatrix::from_fn(n, self.d, |_, _| self.scale * rng.sample::<f64, _>(StandardNormal))
            }
            DistFamily::HeavyTailIid => {
                let c = Cauchy::new(0.0, self.scale).expect("positive Cauchy scale");
                DMatrix::from_fn(n, self.d, |_, _| c.sample(rng))
            }
            DistFamily::ScaledGaussianExchangeable => {
                let shared = (self.log_scale_sd * rng.sample::<f64, _>(StandardNormal)).exp() * self.scale;
                DMatrix::from_fn(n, self.d, |_, _| shared * rng.sample::<f64, _>(StandardNormal))
            }
        }
    }
}

fn partial_sums(x: &DMatrix<f64>) -> DMatrix<f64> {
    let mut s = x.clone();
    for i in 1..s.nrows() {
        let prev = s.row(i - 1).into_owned();
        let mut row = s.row_mut(i);
        row += prev;
    }
    s
}

fn guarded<R: Rng + ?Sized>(
    rejected: &mut u64,
    rng: &mut R,
    mut draw: impl FnMut(&mut R) -> DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    for _ in 0..RETRY_BUDGET {
        let g = draw(rng);
        if g.iter().all(|v| v.is_finite()) && in_general_position(&g, GENERAL_POSITION_THRESHOLD) {
            return Ok(g);
        }
        *rejected += 1;
    }
    Err(Error::Sampling(format!("{RETRY_BUDGET} consecutive draws failed the general-position guard")))
}

fn walk_rows<R: Rng + ?Sized>(dist: &DistributionSpec, n: usize, rng: &mut R) -> DMatrix<f64> {
    partial_sums(&dist.increments(n, rng))
}

/// Centered increments `X_i - S_n / n`; returns partial sums `1..n-1`.
fn bridge_rows<R: Rng + ?Sized>(dist: &DistributionSpec, n: usize, rng: &mut R) -> DMatrix<f64> {
    let mut x = dist.increments(n, rng);
    let mean = x.row_mean();
    for mut row in x.row_iter_mut() {
        row -= &mean;
    }
    partial_sums(&x).rows(0, n - 1).into_owned()
}

/// Walk `S_1, ..., S_n`, counting general-position rejections.
pub fn sample_walk_counted<R: Rng + ?Sized>(
    dist: &DistributionSpec,
    n: usize,
    rng: &mut R,
    rejected: &mut u64,
) -> Result<ConeSample> {
    if n < dist.d {
        return Err(Error::domain(format!("walk needs n >= d (got n = {n}, d = {})", dist.d)));
    }
    let rows = guarded(rejected, rng, |r| walk_rows(dist, n, r))?;
    Ok(ConeSample::new(rows)?.with_kind(ModelKind::BWalk))
}

/// Bridge `S~_1, ..., S~_{n-1}`, counting general-position rejections.
pub fn sample_bridge_counted<R: Rng + ?Sized>(
    dist: &DistributionSpec,
    n: usize,
    rng: &mut R,
    rejected: &mut u64,
) -> Result<ConeSample> {
    if n < dist.d + 1 {
        return Err(Error::domain(format!("bridge needs n >= d + 1 (got n = {n}, d = {})", dist.d)));
    }
    let rows = guarded(rejected, rng, |r| bridge_rows(dist, n, r))?;
    Ok(ConeSample::new(rows)?.with_kind(ModelKind::ABridge))
}

pub fn sample_walk<R: Rng + ?Sized>(dist: &DistributionSpec, n: usize, rng: &mut R) -> Result<ConeSample> {
    sample_walk_counted(dist, n, rng, &mut 0)
}

pub fn sample_bridge<R: Rng + ?Sized>(dist: &DistributionSpec, n: usize, rng: &mut R) -> Result<ConeSample> {
    sample_bridge_counted(dist, n, rng, &mut 0)
}

fn sample_model<R: Rng + ?Sized>(
    model: &Model,
    dist: &DistributionSpec,
    rng: &mut R,
    rejected: &mut u64,
) -> Result<ConeSample> {
    match model.kind {
        ModelKind::BWalk => sample_walk_counted(dist, model.n, rng, rejected),
        ModelKind::ABridge => sample_bridge_counted(dist, model.n, rng, rejected),
    }
}

/// Union of independent walks and bridges, as used for joint absorption.
fn sample_joint<R: Rng + ?Sized>(
    walks: &[usize],
    bridges: &[usize],
    dist: &DistributionSpec,
    rng: &mut R,
    rejected: &mut u64,
) -> Result<ConeSample> {
    let rows = guarded(rejected, rng, |r| {
        let mut blocks: Vec<DMatrix<f64>> = Vec::new();
        for &n in walks {
            blocks.push(walk_rows(dist, n, r));
        }
        for &m in bridges {
            blocks.push(bridge_rows(dist, m, r));
        }
        let total: usize = blocks.iter().map(|b| b.nrows()).sum();
        let mut all = DMatrix::<f64>::zeros(total, dist.d);
        let mut at = 0;
        for b in blocks {
            all.rows_mut(at, b.nrows()).copy_from(&b);
            at += b.nrows();
        }
        all
    })?;
    ConeSample::new(rows)
}

// ---- per-cone measurements ---------------------------------------------------

fn half_if(hit: bool) -> f64 {
    if hit {
        0.5
    } else {
        0.0
    }
}

/// One-draw estimate of `U_k(C)`. For `R^d` the definition gives
/// `1{d - k odd}`; otherwise half the indicator of meeting a uniform
/// `(d - k)`-subspace.
fn quermass_draw<R: Rng + ?Sized>(cone: &ConeSample, k: usize, rng: &mut R) -> Result<f64> {
    let d = cone.dim();
    if k >= d {
        return Ok(0.0);
    }
    if is_full_cone(cone)? {
        return Ok(if (d - k) % 2 == 1 { 1.0 } else { 0.0 });
    }
    let w = sample_uniform_subspace(d, d - k, rng)?;
    Ok(half_if(intersects_subspace(cone, &w)?))
}

/// Indicator that a Gaussian vector projects onto a `k`-face.
fn intrinsic_draw<R: Rng + ?Sized>(cone: &ConeSample, k: usize, rng: &mut R) -> Result<f64> {
    let g = DVector::from_fn(cone.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
    let p = project_onto_cone(&g, cone)?;
    Ok(if p.face_dim == k { 1.0 } else { 0.0 })
}

fn full_rank(cone: &ConeSample) -> bool {
    let mut m = cone.generators().clone();
    if m.nrows() < m.ncols() {
        return false;
    }
    let scale = m.amax().max(f64::MIN_POSITIVE);
    m /= scale;
    let sv = m.singular_values();
    sv.iter().all(|&s| s > 1e-10 * sv.max())
}

fn measure<R: Rng + ?Sized>(query: &FunctionalQuery, cone: &ConeSample, rng: &mut R) -> Result<f64> {
    let idx = &query.indices;
    let need = |name: &str, v: Option<usize>| {
        v.ok_or_else(|| Error::domain(format!("{} needs index {name}", query.functional)))
    };
    let d = cone.dim();
    match query.functional {
        Functional::Absorption => Ok(if is_full_cone(cone)? { 1.0 } else { 0.0 }),
        Functional::Nonabsorption | Functional::Wendel => Ok(if is_full_cone(cone)? { 0.0 } else { 1.0 }),
        Functional::Fk => Ok(count_k_faces(cone, need("k", idx.k)?)?.count as f64),
        Functional::Uk => quermass_draw(cone, need("k", idx.k)?, rng),
        Functional::Vk => intrinsic_draw(cone, need("k", idx.k)?, rng),
        Functional::Lambda => {
            let k = need("k", idx.k)?;
            if k == 0 {
                return Err(Error::domain("Lambda_k needs k >= 1"));
            }
            y_draw(cone, k, k - 1, rng)
        }
        Functional::Y | Functional::YDual => y_draw(cone, need("m", idx.m)?, need("l", idx.l)?, rng),
        Functional::Z => {
            let (j, k) = (need("j", idx.j)?, need("k", idx.k)?);
            if j == 0 {
                return if is_pointed(cone)? { quermass_draw(cone, k, rng) } else { Ok(0.0) };
            }
            let mut acc = 0.0;
            for face in k_faces(cone, j)? {
                let base = tangent_cone_projection_base(cone, &face)?;
                acc += quermass_draw(&base, k - j, rng)?;
            }
            Ok(acc)
        }
        Functional::FaceIntrinsicSum => {
            let (m, l) = (need("m", idx.m)?, need("l", idx.l)?);
            if m == d {
                return intrinsic_draw(cone, l, rng);
            }
            let mut acc = 0.0;
            for face in k_faces(cone, m)? {
                acc += intrinsic_draw(&face_in_own_span(cone, &face)?, l, rng)?;
            }
            Ok(acc)
        }
        Functional::TangentIntrinsicSum => {
            let (j, k) = (need("j", idx.j)?, need("k", idx.k)?);
            if j == 0 {
                return if is_pointed(cone)? { intrinsic_draw(cone, k, rng) } else { Ok(0.0) };
            }
            let mut acc = 0.0;
            for face in k_faces(cone, j)? {
                let base = tangent_cone_projection_base(cone, &face)?;
                acc += intrinsic_draw(&base, k - j, rng)?;
            }
            Ok(acc)
        }
        Functional::FaceProb => {
            let tuple = idx.tuple.as_ref().ok_or_else(|| Error::domain("face_prob needs an index tuple"))?;
            let zero_based: Vec<usize> = tuple
                .iter()
                .map(|&i| i.checked_sub(1).ok_or_else(|| Error::domain("face indices start at 1")))
                .collect::<Result<_>>()?;
            Ok(if is_face(cone, &zero_based)? { 1.0 } else { 0.0 })
        }
        Functional::SubspaceProb => {
            let k = need("k", idx.k)?;
            let w = sample_uniform_subspace(d, d - k.min(d), rng)?;
            Ok(if intersects_subspace(cone, &w)? { 1.0 } else { 0.0 })
        }
        Functional::JointAbsorption => Ok(if is_full_cone(cone)? { 1.0 } else { 0.0 }),
    }
}

/// `Y_{m,l}`: sum of `U_l` over `m`-faces, each measured inside its own span.
/// The only `d`-face of a full-dimensional cone is the cone itself.
fn y_draw<R: Rng + ?Sized>(cone: &ConeSample, m: usize, l: usize, rng: &mut R) -> Result<f64> {
    if l >= m {
        return Err(Error::domain(format!("Y_{{m,l}} needs l < m (got m = {m}, l = {l})")));
    }
    let d = cone.dim();
    if m > d {
        return Err(Error::domain(format!("Y_{{m,l}} needs m <= d (got m = {m}, d = {d})")));
    }
    if m == d {
        return if full_rank(cone) { quermass_draw(cone, l, rng) } else { Ok(0.0) };
    }
    let mut acc = 0.0;
    for face in k_faces(cone, m)? {
        acc += quermass_draw(&face_in_own_span(cone, &face)?, l, rng)?;
    }
    Ok(acc)
}

/// Everything one sample needs: the cone it was measured on, its value and
/// how many draws were thrown away.
struct Draw {
    value: f64,
    rejected: u64,
    discarded: u64,
}

fn one_sample(query: &FunctionalQuery, dist: &DistributionSpec, seed: u64, index: u64) -> Result<Draw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut rejected = 0u64;
    let mut discarded = 0u64;
    let model = &query.model;
    let dual = query.dual || query.functional == Functional::YDual;

    let cone = loop {
        let cone = match query.functional {
            Functional::Wendel => {
                let rows = guarded(&mut rejected, &mut rng, |r| dist.increments(model.n, r))?;
                ConeSample::new(rows)?
            }
            Functional::JointAbsorption => {
                let walks = query.indices.walks.clone().unwrap_or_default();
                let bridges = query.indices.bridges.clone().unwrap_or_default();
                sample_joint(&walks, &bridges, dist, &mut rng, &mut rejected)?
            }
            _ => sample_model(model, dist, &mut rng, &mut rejected)?,
        };
        if query.conditioned && is_full_cone(&cone)? {
            discarded += 1;
            if discarded >= RETRY_BUDGET * 100 {
                return Err(Error::Sampling("conditioning event is practically never hit".into()));
            }
            continue;
        }
        break cone;
    };
    let cone = if dual { polar_generators(&cone)? } else { cone };
    let value = measure(query, &cone, &mut rng)?;
    Ok(Draw { value, rejected, discarded })
}

// ---- estimation ----------------------------------------------------------------

/// What to estimate, under which law, and how.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub query: FunctionalQuery,
    pub dist: DistributionSpec,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
}

impl RunConfig {
    pub fn new(query: FunctionalQuery, family: DistFamily, samples: u64, seed: u64) -> Self {
        let dist = DistributionSpec::new(family, query.model.d);
        RunConfig { query, dist, samples, seed, workers: 1 }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

/// Sample mean with its standard error and the comparison to the exact value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub exact_ref: Option<ExactRational>,
    pub z: Option<f64>,
    /// Draws resampled by the general-position guard.
    pub rejected: u64,
    /// Draws skipped because they missed the conditioning event.
    pub discarded: u64,
}

impl MCEstimate {
    pub fn passes(&self, gate: f64) -> bool {
        self.z.is_some_and(|z| z.abs() <= gate)
    }
}

fn validate(config: &RunConfig) -> Result<()> {
    let q = &config.query;
    if config.samples < 2 {
        return Err(Error::domain("a Monte Carlo run needs at least 2 samples"));
    }
    if config.dist.d != q.model.d {
        return Err(Error::domain(format!(
            "distribution dimension {} differs from model dimension {}",
            config.dist.d, q.model.d
        )));
    }
    if (q.dual || q.functional == Functional::YDual) && q.model.d > 3 {
        return Err(Error::domain("dual-cone sampling enumerates polar faces and supports d <= 3 only"));
    }
    Ok(())
}

const CHUNK: u64 = 1 << 14;

/// Runs the configured Monte Carlo estimate.
pub fn estimate(config: &RunConfig) -> Result<MCEstimate> {
    validate(config)?;
    let formulas = Formulas::for_model(&config.query.model);
    let exact_ref = formulas.evaluate(&config.query).map(|r| r.exact).ok();
    estimate_with_reference(config, exact_ref)
}

fn estimate_with_reference(config: &RunConfig, exact_ref: Option<ExactRational>) -> Result<MCEstimate> {
    validate(config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .map_err(|e| Error::numeric(format!("cannot start worker pool: {e}")))?;
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    let (mut rejected, mut discarded) = (0u64, 0u64);
    let mut start = 0u64;
    while start < config.samples {
        let end = (start + CHUNK).min(config.samples);
        let draws: Vec<Result<Draw>> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map(|i| one_sample(&config.query, &config.dist, config.seed, i))
                .collect()
        });
        for draw in draws {
            let draw = draw?;
            sum += draw.value;
            sum_sq += draw.value * draw.value;
            rejected += draw.rejected;
            discarded += draw.discarded;
        }
        start = end;
    }
    let n = config.samples as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    let stderr = (var / n).sqrt();
    let z = exact_ref.as_ref().map(|e| {
        let diff = mean - e.to_f64();
        if stderr > 0.0 {
            diff / stderr
        } else if diff.abs() <= 1e-12 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    });
    Ok(MCEstimate { mean, stderr, samples: config.samples, exact_ref, z, rejected, discarded })
}

// ---- verification suite -------------------------------------------------------

/// Settings for [`verify_suite`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    /// Samples per Monte Carlo gate; below [`MIN_GATE_BUDGET`] gates are
    /// skipped.
    pub budget: u64,
    pub seed: u64,
    pub workers: usize,
    /// Required fraction of passing gates.
    pub threshold: f64,
    pub distributions: Vec<DistFamily>,
    pub limits: SuiteLimits,
    /// Extra models whose full functional matrix is gated.
    pub models: Vec<Model>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            budget: 20_000,
            seed: 1,
            workers: 1,
            threshold: 0.95,
            distributions: DistFamily::ALL.to_vec(),
            limits: SuiteLimits::default(),
            models: default_models(),
        }
    }
}

/// Desk-scale models (`d <= 4`, `n <= 8`) gated beyond the core checks.
pub fn default_models() -> Vec<Model> {
    [(ModelKind::ABridge, 5, 3), (ModelKind::BWalk, 5, 3), (ModelKind::BWalk, 6, 4), (ModelKind::ABridge, 8, 4)]
        .into_iter()
        .map(|(k, n, d)| Model::new(k, n, d).expect("valid desk model"))
        .collect()
}

fn q(model: Model, f: Functional, idx: Indices) -> FunctionalQuery {
    FunctionalQuery::new(model, f, idx)
}

/// The fixed Monte Carlo checks on small models with hand-checked values.
pub fn core_gates() -> Vec<FunctionalQuery> {
    let a = |n, d| Model::bridge(n, d).expect("valid bridge");
    let b = |n, d| Model::walk(n, d).expect("valid walk");
    vec![
        q(a(4, 2), Functional::Nonabsorption, Indices::default()),
        q(b(2, 1), Functional::Nonabsorption, Indices::default()),
        q(b(3, 2), Functional::Fk, Indices::k(1)),
        q(a(4, 2), Functional::Fk, Indices::k(1)),
        q(a(3, 2), Functional::Vk, Indices::k(0)),
        q(a(3, 2), Functional::Vk, Indices::k(1)),
        q(a(3, 2), Functional::Vk, Indices::k(2)),
        q(b(3, 2), Functional::FaceProb, Indices::tuple(vec![1])),
        q(a(4, 2), Functional::Uk, Indices::k(1)).conditioned(),
        q(
            b(1, 1),
            Functional::JointAbsorption,
            Indices { walks: Some(vec![1]), bridges: Some(vec![2]), ..Default::default() },
        ),
        q(a(5, 3), Functional::Y, Indices::ml(2, 1)),
        q(b(5, 3), Functional::Y, Indices::ml(2, 1)),
        q(a(5, 3), Functional::Z, Indices::jk(1, 2)),
        q(b(5, 3), Functional::Z, Indices::jk(1, 2)),
    ]
}

/// The functional matrix for one model.
pub fn model_gates(model: Model) -> Vec<FunctionalQuery> {
    let d = model.d;
    let mut out = vec![q(model, Functional::Nonabsorption, Indices::default())];
    for k in 0..d {
        out.push(q(model, Functional::Fk, Indices::k(k)));
        out.push(q(model, Functional::SubspaceProb, Indices::k(k)));
    }
    for k in 0..=d {
        out.push(q(model, Functional::Vk, Indices::k(k)));
        out.push(q(model, Functional::Uk, Indices::k(k)));
    }
    for k in 1..d {
        out.push(q(model, Functional::Lambda, Indices::k(k)));
        out.push(q(model, Functional::Fk, Indices::k(k)).conditioned());
    }
    out.push(q(model, Functional::Z, Indices::jk(0, 1)));
    out.push(q(model, Functional::TangentIntrinsicSum, Indices::jk(1, 1)));
    out.push(q(model, Functional::FaceIntrinsicSum, Indices::ml(1, 0)));
    out.push(q(model, Functional::FaceProb, Indices::tuple(vec![1, 2])));
    if d <= 3 {
        out.push(q(model, Functional::YDual, Indices::ml(d, 0)));
        out.push(q(model, Functional::Fk, Indices::k(1)).dual());
        out.push(q(model, Functional::Z, Indices::jk(1, 2)).dual());
    }
    out
}

/// The Wendel check uses i.i.d. points, not a walk.
fn wendel_gate() -> FunctionalQuery {
    q(Model::walk(4, 3).expect("valid"), Functional::Wendel, Indices::default())
}

/// All gates run by [`verify_suite`], in report order.
pub fn all_gates(models: &[Model]) -> Vec<FunctionalQuery> {
    let mut out = core_gates();
    out.push(wendel_gate());
    for &m in models {
        out.extend(model_gates(m));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateStatus {
    Pass,
    Fail,
    Skipped,
}

/// One Monte Carlo gate in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateResult {
    pub query: FunctionalQuery,
    pub distribution: DistFamily,
    pub seed: u64,
    pub status: GateStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<MCEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Outcome of [`verify_suite`]. Contains nothing that depends on timing or
/// on the worker count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub seed: u64,
    pub budget: u64,
    pub threshold: f64,
    pub z_gate: f64,
    pub identities: Vec<IdentityCheck>,
    pub identities_passed: bool,
    pub mc_skipped: bool,
    pub mc_gates: usize,
    pub mc_passed: usize,
    pub mc_pass_rate: f64,
    pub mc_ok: bool,
    pub gates: Vec<GateResult>,
    pub passed: bool,
}

/// Per-gate seed, derived from the run seed and the gate position.
pub fn gate_seed(seed: u64, gate: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ (gate as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs the exact identity suite on `formulas` and the Monte Carlo gate
/// matrix under every configured distribution.
pub fn verify_suite(config: &VerifyConfig, formulas: &Formulas) -> VerifyReport {
    let identities = identities::run_all(formulas, config.limits);
    let identities_passed = identities.iter().all(|c| c.passed);
    let mc_skipped = config.budget < MIN_GATE_BUDGET;

    let mut gates = Vec::new();
    let mut index = 0usize;
    for query in all_gates(&config.models) {
        for &family in &config.distributions {
            let seed = gate_seed(config.seed, index);
            index += 1;
            if mc_skipped {
                gates.push(GateResult {
                    query: query.clone(),
                    distribution: family,
                    seed,
                    status: GateStatus::Skipped,
                    estimate: None,
                    error: None,
                });
                continue;
            }
            let run = RunConfig::new(query.clone(), family, config.budget, seed).with_workers(config.workers);
            let exact = formulas.evaluate(&query).map(|r| r.exact);
            let result = exact.and_then(|e| estimate_with_reference(&run, Some(e)));
            let (status, estimate, error) = match result {
                Ok(est) => {
                    let status = if est.passes(Z_GATE) { GateStatus::Pass } else { GateStatus::Fail };
                    (status, Some(est), None)
                }
                Err(e) => (GateStatus::Fail, None, Some(e.to_string())),
            };
            gates.push(GateResult { query: query.clone(), distribution: family, seed, status, estimate, error });
        }
    }
    let mc_gates = gates.iter().filter(|g| g.status != GateStatus::Skipped).count();
    let mc_passed = gates.iter().filter(|g| g.status == GateStatus::Pass).count();
    let mc_pass_rate = if mc_gates == 0 { 1.0 } else { mc_passed as f64 / mc_gates as f64 };
    let mc_ok = mc_skipped || mc_pass_rate >= config.threshold;
    VerifyReport {
        schema: 1,
        seed: config.seed,
        budget: config.budget,
        threshold: config.threshold,
        z_gate: Z_GATE,
        identities,
        identities_passed,
        mc_skipped,
        mc_gates,
        mc_passed,
        mc_pass_rate,
        mc_ok,
        gates,
        passed: identities_passed && mc_ok,
    }
}

/// Re-export for callers that only need the geometry tolerance.
pub use geometry::DEFAULT_TOL;

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn bridge_is_centered() {
        let mut r = rng(1);
        for family in DistFamily::ALL {
            let dist = DistributionSpec::new(family, 3);
            for _ in 0..200 {
                let mut x = dist.increments(6, &mut r);
                let mean = x.row_mean();
                for mut row in x.row_iter_mut() {
                    row -= &mean;
                }
                let total = x.row_sum();
                let scale = x.amax().max(1.0);
                assert!(total.norm() <= 1e-10 * scale, "{family}: {total}");
            }
            let c = sample_bridge(&dist, 6, &mut r).unwrap();
            assert_eq!((c.len(), c.dim()), (5, 3));
        }
    }

    #[test]
    fn walk_with_n_equal_d_is_never_full() {
        let mut r = rng(2);
        let dist = DistributionSpec::gaussian(3);
        for _ in 0..300 {
            let c = sample_walk(&dist, 3, &mut r).unwrap();
            assert!(!is_full_cone(&c).unwrap());
        }
        assert!(sample_walk(&dist, 2, &mut r).is_err());
        assert!(sample_bridge(&dist, 3, &mut r).is_err());
    }

    #[test]
    fn small_bridge_is_never_full() {
        let mut r = rng(3);
        let dist = DistributionSpec::gaussian(2);
        for _ in 0..300 {
            let c = sample_bridge(&dist, 3, &mut r).unwrap();
            assert!(!is_full_cone(&c).unwrap());
        }
    }

    #[test]
    fn estimates_do_not_depend_on_workers() {
        let query = q(Model::walk(3, 2).unwrap(), Functional::Fk, Indices::k(1));
        let base = RunConfig::new(query, DistFamily::GaussianIid, 3000, 9);
        let one = estimate(&base).unwrap();
        let four = estimate(&base.clone().with_workers(4)).unwrap();
        assert_eq!(one.mean.to_bits(), four.mean.to_bits());
        assert_eq!(one.stderr.to_bits(), four.stderr.to_bits());
        assert_eq!(one, estimate(&base).unwrap());
    }

    #[test]
    fn walk_face_count_matches_exact() {
        let query = q(Model::walk(3, 2).unwrap(), Functional::Fk, Indices::k(1));
        let est = estimate(&RunConfig::new(query, DistFamily::GaussianIid, 20_000, 4)).unwrap();
        assert_eq!(est.exact_ref, Some(ExactRational::new(23, 12)));
        assert!(est.passes(Z_GATE), "{est:?}");
    }

    #[test]
    fn intrinsic_histogram_sums_to_one() {
        let model = Model::bridge(3, 2).unwrap();
        let mut total = 0.0;
        for k in 0..=2 {
            let query = q(model, Functional::Vk, Indices::k(k));
            let est = estimate(&RunConfig::new(query, DistFamily::GaussianIid, 4000, 6)).unwrap();
            assert!(est.passes(Z_GATE), "k = {k}: {est:?}");
            total += est.mean * est.samples as f64;
        }
        // Same seed, same draws: each sample lands in exactly one bin.
        assert_eq!(total, 4000.0);
    }

    #[test]
    fn conditioned_runs_discard_full_cones() {
        let query = q(Model::bridge(4, 2).unwrap(), Functional::Uk, Indices::k(1)).conditioned();
        let est = estimate(&RunConfig::new(query, DistFamily::GaussianIid, 5000, 2)).unwrap();
        assert!(est.discarded > 0);
        assert!(est.passes(Z_GATE), "{est:?}");
    }

    #[test]
    fn dimension_mismatch_and_dual_limits() {
        let query = q(Model::walk(3, 2).unwrap(), Functional::Fk, Indices::k(1));
        let mut cfg = RunConfig::new(query, DistFamily::GaussianIid, 100, 1);
        cfg.dist.d = 3;
        assert!(estimate(&cfg).is_err());
        let dual = q(Model::walk(5, 4).unwrap(), Functional::Fk, Indices::k(1)).dual();
        assert!(estimate(&RunConfig::new(dual, DistFamily::GaussianIid, 100, 1)).is_err());
    }

    #[test]
    fn distribution_names_parse() {
        assert_eq!("heavy".parse::<DistFamily>().unwrap(), DistFamily::HeavyTailIid);
        assert_eq!("scaled".parse::<DistFamily>().unwrap(), DistFamily::ScaledGaussianExchangeable);
        assert!("uniform".parse::<DistFamily>().is_err());
    }

    #[test]
    fn gate_seeds_differ() {
        let seeds: std::collections::BTreeSet<u64> = (0..1000).map(|g| gate_seed(7, g)).collect();
        assert_eq!(seeds.len(), 1000);
    }

    #[test]
    fn low_budget_skips_gates() {
        let cfg = VerifyConfig {
            budget: 100,
            models: vec![],
            limits: SuiteLimits { stirling_n: 10, composition_n: 5, formula_n: 6, formula_d: 3 },
            ..Default::default()
        };
        let report = verify_suite(&cfg, &Formulas::new(12));
        assert!(report.mc_skipped && report.identities_passed && report.passed);
        assert!(report.gates.iter().all(|g| g.status == GateStatus::Skipped));
    }
}
