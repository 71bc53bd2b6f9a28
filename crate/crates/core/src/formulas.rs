//! Exact expectations for positive hulls of random walks (`B`) and random
//! bridges (`A`).
//!
//! Every value is an [`ExactRational`]. The infinite-looking sums over `r`
//! stop once the Stirling index leaves `0..=n`, where the table reads zero.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    binomial, factorial, joint_polynomial, p_polynomial, q_polynomial, Composition,
    StirlingTables,
};
use crate::error::{Error, Result};
use crate::rational::ExactRational;

/// Random walk (`BWalk`, sign- and permutation-symmetric increments) or random
/// bridge (`ABridge`, exchangeable increments summing to zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "A")]
    ABridge,
    #[serde(rename = "B")]
    BWalk,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::ABridge => "A",
            ModelKind::BWalk => "B",
        })
    }
}

/// A model with `n` increments in dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Model {
    pub kind: ModelKind,
    pub n: usize,
    pub d: usize,
}

impl Model {
    pub fn new(kind: ModelKind, n: usize, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::domain("dimension d must be at least 1"));
        }
        match kind {
            ModelKind::ABridge if n < d + 1 => Err(Error::domain(format!(
                "bridge general position needs n >= d + 1 (got n = {n}, d = {d})"
            ))),
            ModelKind::BWalk if n < d => Err(Error::domain(format!(
                "walk general position needs n >= d (got n = {n}, d = {d})"
            ))),
            _ => Ok(Model { kind, n, d }),
        }
    }

    pub fn bridge(n: usize, d: usize) -> Result<Self> {
        Model::new(ModelKind::ABridge, n, d)
    }

    pub fn walk(n: usize, d: usize) -> Result<Self> {
        Model::new(ModelKind::BWalk, n, d)
    }

    /// Number of cone generators: `n - 1` for bridges, `n` for walks.
    pub fn generators(&self) -> usize {
        match self.kind {
            ModelKind::ABridge => self.n - 1,
            ModelKind::BWalk => self.n,
        }
    }

    /// Table size needed to evaluate any formula for this model.
    pub fn table_size(&self) -> usize {
        self.n.max(self.d + 1)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(n={}, d={})", self.kind, self.n, self.d)
    }
}

/// Which quantity a [`FunctionalQuery`] asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    Absorption,
    Nonabsorption,
    Wendel,
    Fk,
    Uk,
    Vk,
    Lambda,
    Y,
    Z,
    FaceIntrinsicSum,
    TangentIntrinsicSum,
    YDual,
    FaceProb,
    SubspaceProb,
    JointAbsorption,
}

impl Functional {
    pub const ALL: [Functional; 15] = [
        Functional::Absorption,
        Functional::Nonabsorption,
        Functional::Wendel,
        Functional::Fk,
        Functional::Uk,
        Functional::Vk,
        Functional::Lambda,
        Functional::Y,
        Functional::Z,
        Functional::FaceIntrinsicSum,
        Functional::TangentIntrinsicSum,
        Functional::YDual,
        Functional::FaceProb,
        Functional::SubspaceProb,
        Functional::JointAbsorption,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Functional::Absorption => "absorption",
            Functional::Nonabsorption => "nonabsorption",
            Functional::Wendel => "wendel",
            Functional::Fk => "fk",
            Functional::Uk => "Uk",
            Functional::Vk => "vk",
            Functional::Lambda => "Lambda",
            Functional::Y => "Y",
            Functional::Z => "Z",
            Functional::FaceIntrinsicSum => "face_intrinsic_sum",
            Functional::TangentIntrinsicSum => "tangent_intrinsic_sum",
            Functional::YDual => "Y_dual",
            Functional::FaceProb => "face_prob",
            Functional::SubspaceProb => "subspace_prob",
            Functional::JointAbsorption => "joint_absorption",
        }
    }

    /// Accepts the canonical names plus a few spellings (`f1`, `v0`, ...)
    /// where a trailing digit is the `k` index. Returns the functional and
    /// the embedded index, if any.
    pub fn parse(s: &str) -> Option<(Functional, Option<usize>)> {
        if let Some(f) = Functional::ALL.into_iter().find(|f| f.name() == s) {
            return Some((f, None));
        }
        let lower = s.to_ascii_lowercase();
        let alias = match lower.as_str() {
            "f" | "fk" | "faces" => Some(Functional::Fk),
            "u" | "uk" | "quermass" => Some(Functional::Uk),
            "v" | "vk" | "intrinsic" => Some(Functional::Vk),
            "lambda" | "lambdak" => Some(Functional::Lambda),
            "ydual" | "y_dual" => Some(Functional::YDual),
            "absorb" => Some(Functional::Absorption),
            "nonabsorb" => Some(Functional::Nonabsorption),
            "face" | "faceprob" => Some(Functional::FaceProb),
            "subspace" | "subspaceprob" => Some(Functional::SubspaceProb),
            "joint" | "jointabsorption" => Some(Functional::JointAbsorption),
            _ => None,
        };
        if let Some(f) = alias {
            return Some((f, None));
        }
        // f1, U2, v0, Lambda1 ...
        let split = lower.find(|c: char| c.is_ascii_digit())?;
        let (head, digits) = lower.split_at(split);
        let k: usize = digits.parse().ok()?;
        let f = match head {
            "f" => Functional::Fk,
            "u" => Functional::Uk,
            "v" => Functional::Vk,
            "lambda" => Functional::Lambda,
            _ => return None,
        };
        Some((f, Some(k)))
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Index arguments of a query; unused fields stay `None`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Indices {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuple: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walks: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bridges: Option<Vec<usize>>,
}

impl Indices {
    pub fn k(k: usize) -> Self {
        Indices { k: Some(k), ..Default::default() }
    }

    pub fn ml(m: usize, l: usize) -> Self {
        Indices { m: Some(m), l: Some(l), ..Default::default() }
    }

    pub fn jk(j: usize, k: usize) -> Self {
        Indices { j: Some(j), k: Some(k), ..Default::default() }
    }

    pub fn tuple(tuple: Vec<usize>) -> Self {
        Indices { tuple: Some(tuple), ..Default::default() }
    }
}

/// A single exact evaluation request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionalQuery {
    pub model: Model,
    pub functional: Functional,
    pub indices: Indices,
    pub conditioned: bool,
    pub dual: bool,
}

impl FunctionalQuery {
    pub fn new(model: Model, functional: Functional, indices: Indices) -> Self {
        FunctionalQuery { model, functional, indices, conditioned: false, dual: false }
    }

    pub fn conditioned(mut self) -> Self {
        self.conditioned = true;
        self
    }

    pub fn dual(mut self) -> Self {
        self.dual = true;
        self
    }
}

/// An exact value with its double approximation and a short label for the
/// formula that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormulaResult {
    pub exact: ExactRational,
    pub decimal: f64,
    pub citation: String,
}

impl FormulaResult {
    fn new(exact: ExactRational, citation: impl Into<String>) -> Self {
        let decimal = exact.to_f64();
        FormulaResult { exact, decimal, citation: citation.into() }
    }
}

fn need(name: &str, value: Option<usize>, functional: Functional) -> Result<usize> {
    value.ok_or_else(|| Error::domain(format!("{functional} needs index {name}")))
}

fn int(v: &BigUint) -> BigInt {
    BigInt::from(v.clone())
}

/// Evaluator bound to a shared set of Stirling tables.
#[derive(Debug, Clone)]
pub struct Formulas {
    tables: Arc<StirlingTables>,
}

impl Formulas {
    pub fn new(max_n: usize) -> Self {
        Formulas { tables: Arc::new(StirlingTables::new(max_n)) }
    }

    pub fn for_model(model: &Model) -> Self {
        Formulas::new(model.table_size())
    }

    pub fn with_tables(tables: Arc<StirlingTables>) -> Self {
        Formulas { tables }
    }

    pub fn tables(&self) -> &StirlingTables {
        &self.tables
    }

    fn check_capacity(&self, model: &Model) -> Result<()> {
        if model.table_size() > self.tables.max_n() {
            return Err(Error::domain(format!(
                "{model} needs Stirling tables up to {}, evaluator holds {}",
                model.table_size(),
                self.tables.max_n()
            )));
        }
        Ok(())
    }

    // ---- raw family reads -------------------------------------------------

    fn s1(&self, n: i64, k: i64) -> BigInt {
        int(self.tables.first(n, k))
    }

    fn s2(&self, n: i64, k: i64) -> BigInt {
        int(self.tables.second(n, k))
    }

    fn b1(&self, n: i64, k: i64) -> BigInt {
        int(self.tables.first_b(n, k))
    }

    fn b2(&self, n: i64, k: i64) -> BigInt {
        int(self.tables.second_b(n, k))
    }

    /// `sum_{r>=0} f(x - 2r)` over non-negative arguments.
    fn down2(x: i64, f: impl Fn(i64) -> BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        let mut i = x;
        while i >= 0 {
            acc += f(i);
            i -= 2;
        }
        acc
    }

    /// `sum_{r>=0} f(x + 2r)` up to `limit`.
    fn up2(x: i64, limit: i64, f: impl Fn(i64) -> BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        let mut i = x.max(x.rem_euclid(2));
        if x < 0 {
            // Keep the parity of x while skipping negative indices.
            i = if x.rem_euclid(2) == 0 { 0 } else { 1 };
        }
        while i <= limit {
            acc += f(i);
            i += 2;
        }
        acc
    }

    /// `sum_{r>=0} (-1)^r f(x - r)` over non-negative arguments.
    fn alternating(x: i64, f: impl Fn(i64) -> BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        let mut sign_positive = true;
        let mut i = x;
        while i >= 0 {
            if sign_positive {
                acc += f(i);
            } else {
                acc -= f(i);
            }
            sign_positive = !sign_positive;
            i -= 1;
        }
        acc
    }

    /// `n!` for bridges, `2^n n!` for walks.
    fn normalizer(model: &Model) -> BigInt {
        let f = BigInt::from(factorial(model.n));
        match model.kind {
            ModelKind::ABridge => f,
            ModelKind::BWalk => f << model.n,
        }
    }

    fn ratio(num: BigInt, den: BigInt) -> ExactRational {
        ExactRational::new(num, den)
    }

    /// Bridge tail `sum_r [n, x-2r] {x-2r, j}`.
    fn tail_a(&self, n: i64, x: i64, j: i64) -> BigInt {
        Self::down2(x, |i| self.s1(n, i) * self.s2(i, j))
    }

    /// Walk tail `sum_r B[n, x-2r] B{x-2r, j}`.
    fn tail_b(&self, n: i64, x: i64, j: i64) -> BigInt {
        Self::down2(x, |i| self.b1(n, i) * self.b2(i, j))
    }

    // ---- probabilities ----------------------------------------------------

    /// Probability that `n` symmetric points in general position do not
    /// positively span `R^d`.
    pub fn wendel_probability(n: i64, d: i64) -> Result<ExactRational> {
        if n < 1 || d < 1 {
            return Err(Error::domain(format!(
                "wendel probability needs n >= 1 and d >= 1 (got n = {n}, d = {d})"
            )));
        }
        let mut acc = BigUint::zero();
        for k in 0..d {
            acc += binomial(n - 1, k)?;
        }
        let den = BigUint::one() << (n - 1) as usize;
        Ok(ExactRational::from_uints(&acc, &den))
    }

    /// `P[C != R^d]`.
    pub fn nonabsorption_probability(&self, model: &Model) -> Result<ExactRational> {
        self.check_capacity(model)?;
        let (n, d) = (model.n as i64, model.d as i64);
        let num = match model.kind {
            ModelKind::ABridge => Self::down2(d, |i| self.s1(n, i)),
            ModelKind::BWalk => Self::down2(d - 1, |i| self.b1(n, i)),
        };
        Ok(Self::ratio(num * 2, Self::normalizer(model)))
    }

    /// `P[C = R^d]`, from the upper parity tail.
    pub fn absorption_probability(&self, model: &Model) -> Result<ExactRational> {
        self.check_capacity(model)?;
        let (n, d) = (model.n as i64, model.d as i64);
        let num = match model.kind {
            ModelKind::ABridge => Self::up2(d + 2, n, |i| self.s1(n, i)),
            ModelKind::BWalk => Self::up2(d + 1, n, |i| self.b1(n, i)),
        };
        Ok(Self::ratio(num * 2, Self::normalizer(model)))
    }

    // ---- generalized angle sums -------------------------------------------

    /// `E Y_{m,l}`: sum over `m`-faces of the `l`-th quermassintegral.
    pub fn expected_y(&self, model: &Model, m: usize, l: usize, conditioned: bool) -> Result<ExactRational> {
        self.check_capacity(model)?;
        if !(l < m && m < model.d) {
            return Err(Error::domain(format!(
                "Y_{{m,l}} requires 0 <= l < m <= d - 1 (got m = {m}, l = {l}, d = {})",
                model.d
            )));
        }
        let (n, d, m, l) = (model.n as i64, model.d as i64, m as i64, l as i64);
        let num = match model.kind {
            ModelKind::ABridge => {
                let face = Self::up2(l + 2, m + 1, |i| self.s1(m + 1, i));
                face * self.tail_a(n, d, m + 1)
            }
            ModelKind::BWalk => {
                let face = Self::up2(l + 1, m, |i| self.b1(m, i));
                face * self.tail_b(n, d - 1, m)
            }
        };
        let value = Self::ratio(num * 2, Self::normalizer(model));
        self.condition(model, value, ExactRational::zero(), conditioned)
    }

    /// `E Z_{j,k}`: sum over `j`-faces of `U_k` of the tangent cone.
    pub fn expected_z(&self, model: &Model, j: usize, k: usize, conditioned: bool) -> Result<ExactRational> {
        self.check_capacity(model)?;
        if !(j <= k && k <= model.d) {
            return Err(Error::domain(format!(
                "Z_{{j,k}} requires 0 <= j <= k <= d (got j = {j}, k = {k}, d = {})",
                model.d
            )));
        }
        let value = self.z_unconditioned(model, j as i64, k as i64);
        self.condition(model, value, ExactRational::zero(), conditioned)
    }

    fn z_unconditioned(&self, model: &Model, j: i64, k: i64) -> ExactRational {
        let (n, d) = (model.n as i64, model.d as i64);
        match model.kind {
            ModelKind::ABridge => {
                let diff = self.tail_a(n, d, j + 1) - self.tail_a(n, k, j + 1);
                let pre = BigInt::from(factorial(j as usize + 1));
                Self::ratio(pre * diff, Self::normalizer(model))
            }
            ModelKind::BWalk => {
                let diff = self.tail_b(n, d - 1, j) - self.tail_b(n, k - 1, j);
                let pre = BigInt::from(factorial(j as usize)) << j as usize;
                Self::ratio(pre * diff, Self::normalizer(model))
            }
        }
    }

    // ---- special cases ----------------------------------------------------

    /// `E f_k`, the expected number of `k`-faces, `0 <= k <= d - 1`.
    pub fn expected_fk(&self, model: &Model, k: usize, conditioned: bool) -> Result<ExactRational> {
        self.check_capacity(model)?;
        if k >= model.d {
            return Err(Error::domain(format!(
                "f_k requires 0 <= k <= d - 1 (got k = {k}, d = {})",
                model.d
            )));
        }
        let value = self.fk_unconditioned(model, k);
        self.condition(model, value, ExactRational::zero(), conditioned)
    }

    fn fk_unconditioned(&self, model: &Model, k: usize) -> ExactRational {
        let (n, d, ki) = (model.n as i64, model.d as i64, k as i64);
        match model.kind {
            ModelKind::ABridge => {
                let pre = BigInt::from(factorial(k + 1)) * 2;
                Self::ratio(pre * self.tail_a(n, d, ki + 1), Self::normalizer(model))
            }
            ModelKind::BWalk => {
                let pre = (BigInt::from(factorial(k)) << k) * 2;
                Self::ratio(pre * self.tail_b(n, d - 1, ki), Self::normalizer(model))
            }
        }
    }

    /// `E U_k`, the expected conic quermassintegral, `0 <= k <= d`.
    ///
    /// The conditioned variant uses its own closed form: `U_k(R^d)` is 1 when
    /// `d - k` is odd, so plain division by the non-absorption probability
    /// would be wrong.
    pub fn expected_uk(&self, model: &Model, k: usize, conditioned: bool) -> Result<ExactRational> {
        self.check_capacity(model)?;
        if k > model.d {
            return Err(Error::domain(format!(
                "U_k requires 0 <= k <= d (got k = {k}, d = {})",
                model.d
            )));
        }
        let (n, d, k) = (model.n as i64, model.d as i64, k as i64);
        if conditioned {
            let (upper, lower) = match model.kind {
                ModelKind::ABridge => (
                    Self::down2(d, |i| self.s1(n, i)),
                    Self::down2(k, |i| self.s1(n, i)),
                ),
                ModelKind::BWalk => (
                    Self::down2(d - 1, |i| self.b1(n, i)),
                    Self::down2(k - 1, |i| self.b1(n, i)),
                ),
            };
            return Ok(Self::ratio(&upper - lower, upper * 2));
        }
        let odd = (d - k) % 2 == 1;
        let num = match (model.kind, odd) {
            (ModelKind::ABridge, true) => {
                Self::up2(k + 2, n, |i| self.s1(n, i)) + Self::up2(d + 2, n, |i| self.s1(n, i))
            }
            (ModelKind::ABridge, false) => {
                let mut acc = BigInt::zero();
                let mut i = k + 2;
                while i <= d {
                    acc += self.s1(n, i);
                    i += 2;
                }
                acc
            }
            (ModelKind::BWalk, true) => {
                Self::up2(k + 1, n, |i| self.b1(n, i)) + Self::up2(d + 1, n, |i| self.b1(n, i))
            }
            (ModelKind::BWalk, false) => {
                let mut acc = BigInt::zero();
                let mut i = k + 1;
                while i <= d - 1 {
                    acc += self.b1(n, i);
                    i += 2;
                }
                acc
            }
        };
        Ok(Self::ratio(num, Self::normalizer(model)))
    }

    /// `E v_k`, the expected conic intrinsic volume, `0 <= k <= d`.
    pub fn expected_vk(&self, model: &Model, k: usize, conditioned: bool) -> Result<ExactRational> {
        self.check_capacity(model)?;
        if k > model.d {
            return Err(Error::domain(format!(
                "v_k requires 0 <= k <= d (got k = {k}, d = {})",
                model.d
            )));
        }
        let (n, d, ki) = (model.n as i64, model.d as i64, k as i64);
        let top = k == model.d;
        if conditioned {
            let (num, nonabs) = match model.kind {
                ModelKind::ABridge => (
                    if top {
                        Self::alternating(d, |i| self.s1(n, i))
                    } else {
                        self.s1(n, ki + 1)
                    },
                    Self::down2(d, |i| self.s1(n, i)),
                ),
                ModelKind::BWalk => (
                    if top {
                        Self::alternating(d - 1, |i| self.b1(n, i))
                    } else {
                        self.b1(n, ki)
                    },
                    Self::down2(d - 1, |i| self.b1(n, i)),
                ),
            };
            return Ok(Self::ratio(num, nonabs * 2));
        }
        let num = match (model.kind, top) {
            (ModelKind::ABridge, true) => Self::up2(d + 1, n, |i| self.s1(n, i)) + Self::up2(d + 2, n, |i| self.s1(n, i)),
            (ModelKind::ABridge, false) => self.s1(n, ki + 1),
            (ModelKind::BWalk, true) => Self::up2(d, n, |i| self.b1(n, i)) + Self::up2(d + 1, n, |i| self.b1(n, i)),
            (ModelKind::BWalk, false) => self.b1(n, ki),
        };
        Ok(Self::ratio(num, Self::normalizer(model)))
    }

    /// `E Lambda_k`, total solid angle of the `k`-faces, `1 <= k <= d - 1`.
    pub fn expected_lambda(&self, model: &Model, k: usize, conditioned: bool) -> Result<ExactRational> {
        self.check_capacity(model)?;
        if !(1 <= k && k < model.d) {
            return Err(Error::domain(format!(
                "Lambda_k requires 1 <= k <= d - 1 (got k = {k}, d = {})",
                model.d
            )));
        }
        let (n, d, ki) = (model.n as i64, model.d as i64, k as i64);
        let num = match model.kind {
            ModelKind::ABridge => self.tail_a(n, d, ki + 1),
            ModelKind::BWalk => self.tail_b(n, d - 1, ki),
        };
        let value = Self::ratio(num * 2, Self::normalizer(model));
        self.condition(model, value, ExactRational::zero(), conditioned)
    }

    /// `E sum_{F in F_m} v_l(F)`, `0 <= l <= m <= d`.
    ///
    /// For `m = d` the only `d`-face is the cone itself, so the value is
    /// `E v_l(C)`.
    pub fn expected_face_intrinsic_sum(
        &self,
        model: &Model,
        m: usize,
        l: usize,
        conditioned: bool,
    ) -> Result<ExactRational> {
        self.check_capacity(model)?;
        if !(l <= m && m <= model.d) {
            return Err(Error::domain(format!(
                "face intrinsic-volume sum requires 0 <= l <= m <= d (got m = {m}, l = {l}, d = {})",
                model.d
            )));
        }
        if m == model.d {
            return self.expected_vk(model, l, conditioned);
        }
        let (n, d, mi, li) = (model.n as i64, model.d as i64, m as i64, l as i64);
        let num = match model.kind {
            ModelKind::ABridge => self.s1(mi + 1, li + 1) * self.tail_a(n, d, mi + 1),
            ModelKind::BWalk => self.b1(mi, li) * self.tail_b(n, d - 1, mi),
        };
        let value = Self::ratio(num * 2, Self::normalizer(model));
        self.condition(model, value, ExactRational::zero(), conditioned)
    }

    /// `E sum_{F in F_j} v_k(T_F(C))`, `0 <= j <= d - 1`, `j <= k <= d`.
    pub fn expected_tangent_intrinsic_sum(
        &self,
        model: &Model,
        j: usize,
        k: usize,
        conditioned: bool,
    ) -> Result<ExactRational> {
        self.check_capacity(model)?;
        if !(j < model.d && j <= k && k <= model.d) {
            return Err(Error::domain(format!(
                "tangent intrinsic-volume sum requires 0 <= j <= d - 1 and j <= k <= d (got j = {j}, k = {k}, d = {})",
                model.d
            )));
        }
        let (n, d, ji, ki) = (model.n as i64, model.d as i64, j as i64, k as i64);
        let top = k == model.d;
        let value = match model.kind {
            ModelKind::ABridge => {
                let pre = BigInt::from(factorial(j + 1));
                let body = if top {
                    Self::alternating(d, |i| self.s1(n, i) * self.s2(i, ji + 1))
                } else {
                    self.s1(n, ki + 1) * self.s2(ki + 1, ji + 1)
                };
                Self::ratio(pre * body, Self::normalizer(model))
            }
            ModelKind::BWalk => {
                let pre = BigInt::from(factorial(j)) << j;
                let body = if top {
                    Self::alternating(d - 1, |i| self.b1(n, i) * self.b2(i, ji))
                } else {
                    self.b1(n, ki) * self.b2(ki, ji)
                };
                Self::ratio(pre * body, Self::normalizer(model))
            }
        };
        self.condition(model, value, ExactRational::zero(), conditioned)
    }

    // ---- dual cones -------------------------------------------------------

    /// `E Y_{m,l}` of the dual cone, `0 <= l < m <= d`.
    pub fn expected_y_dual(&self, model: &Model, m: usize, l: usize, conditioned: bool) -> Result<ExactRational> {
        self.check_capacity(model)?;
        if !(l < m && m <= model.d) {
            return Err(Error::domain(format!(
                "dual Y_{{m,l}} requires 0 <= l < m <= d (got m = {m}, l = {l}, d = {})",
                model.d
            )));
        }
        let (n, d, mi, li) = (model.n as i64, model.d as i64, m as i64, l as i64);
        let codim = model.d - m;
        let value = match model.kind {
            ModelKind::ABridge => {
                let pre = BigInt::from(factorial(codim + 1));
                Self::ratio(pre * self.tail_a(n, d - li, d - mi + 1), Self::normalizer(model))
            }
            ModelKind::BWalk => {
                let pre = BigInt::from(factorial(codim)) << codim;
                Self::ratio(pre * self.tail_b(n, d - li - 1, d - mi), Self::normalizer(model))
            }
        };
        self.condition(model, value, ExactRational::zero(), conditioned)
    }

    /// `E Z_{j,k}` of the dual cone, `0 <= j <= k <= d`.
    ///
    /// There is no printed closed form for this one. It is obtained from the
    /// Y/Z duality applied to the dual cone: on `C != R^d`,
    /// `Z_{j,k}(C°) = f_{d-j}(C)/2 - Y_{d-j,d-k}(C)` with `f_d = 1` and
    /// `Y_{m,m} = 0`; on `C = R^d` the dual is `{0}` and contributes nothing.
    pub fn expected_z_dual(&self, model: &Model, j: usize, k: usize, conditioned: bool) -> Result<ExactRational> {
        self.check_capacity(model)?;
        if !(j <= k && k <= model.d) {
            return Err(Error::domain(format!(
                "dual Z_{{j,k}} requires 0 <= j <= k <= d (got j = {j}, k = {k}, d = {})",
                model.d
            )));
        }
        let d = model.d;
        let value = if j == 0 {
            if k == d {
                ExactRational::zero()
            } else {
                // U_k(C°) on pointed C, zero on the degenerate dual {0}.
                self.expected_y_dual(model, d, k, false)?
            }
        } else {
            let half_faces = self.fk_unconditioned(model, d - j) * ExactRational::half();
            if k == j {
                half_faces
            } else {
                half_faces - self.expected_y(model, d - j, d - k, false)?
            }
        };
        self.condition(model, value, ExactRational::zero(), conditioned)
    }

    /// `E f_k` of the dual cone, `0 <= k <= d - 1`; equals `E f_{d-k}(C)`.
    pub fn expected_fk_dual(&self, model: &Model, k: usize, conditioned: bool) -> Result<ExactRational> {
        self.check_capacity(model)?;
        if k >= model.d {
            return Err(Error::domain(format!(
                "f_k requires 0 <= k <= d - 1 (got k = {k}, d = {})",
                model.d
            )));
        }
        // f_d(C) = 1 for every full-dimensional C; the dual {0} has one 0-face.
        let value = if k == 0 {
            ExactRational::one()
        } else {
            self.fk_unconditioned(model, model.d - k)
        };
        let at_degenerate = if k == 0 { ExactRational::one() } else { ExactRational::zero() };
        self.condition(model, value, at_degenerate, conditioned)
    }

    /// `E v_k` of the dual cone; equals `E v_{d-k}(C)`.
    pub fn expected_vk_dual(&self, model: &Model, k: usize, conditioned: bool) -> Result<ExactRational> {
        if k > model.d {
            return Err(Error::domain(format!(
                "v_k requires 0 <= k <= d (got k = {k}, d = {})",
                model.d
            )));
        }
        self.expected_vk(model, model.d - k, conditioned)
    }

    /// `E U_k` of the dual cone, read off `Y_{d,k}` of the dual.
    pub fn expected_uk_dual(&self, model: &Model, k: usize, conditioned: bool) -> Result<ExactRational> {
        self.check_capacity(model)?;
        if k > model.d {
            return Err(Error::domain(format!(
                "U_k requires 0 <= k <= d (got k = {k}, d = {})",
                model.d
            )));
        }
        if k == model.d {
            return Ok(ExactRational::zero());
        }
        self.expected_y_dual(model, model.d, k, conditioned)
    }

    /// `E Lambda_k` of the dual cone, read off `Y_{k,k-1}` of the dual.
    pub fn expected_lambda_dual(&self, model: &Model, k: usize, conditioned: bool) -> Result<ExactRational> {
        if !(1 <= k && k < model.d) {
            return Err(Error::domain(format!(
                "Lambda_k requires 1 <= k <= d - 1 (got k = {k}, d = {})",
                model.d
            )));
        }
        self.expected_y_dual(model, k, k - 1, conditioned)
    }

    /// Turns `E phi(C)` into `E[phi(C) | C nondegenerate]`, where
    /// `at_degenerate` is the value of `phi` on the degenerate cone.
    fn condition(
        &self,
        model: &Model,
        value: ExactRational,
        at_degenerate: ExactRational,
        conditioned: bool,
    ) -> Result<ExactRational> {
        if !conditioned {
            return Ok(value);
        }
        let nonabs = self.nonabsorption_probability(model)?;
        let abs = ExactRational::one() - &nonabs;
        Ok((value - at_degenerate * abs) / nonabs)
    }

    // ---- face and subspace probabilities ----------------------------------

    fn face_setup(&self, model: &Model, indices: &[usize]) -> Result<(Composition, Vec<BigUint>, BigInt)> {
        self.check_capacity(model)?;
        let k = indices.len();
        if !(1 <= k && k < model.d) {
            return Err(Error::domain(format!(
                "face probability requires 1 <= k <= d - 1 indices (got k = {k}, d = {})",
                model.d
            )));
        }
        let comp = Composition::from_indices(indices)?;
        let last = *indices.last().expect("k >= 1");
        let top = model.generators();
        if last > top {
            return Err(Error::domain(format!(
                "face probability index {last} exceeds the generator count {top} of {model}"
            )));
        }
        let tail = model.n - last;
        let mut norm = comp
            .parts()
            .iter()
            .fold(BigInt::one(), |acc, &j| acc * BigInt::from(factorial(j)));
        norm *= BigInt::from(factorial(tail));
        let poly = match model.kind {
            ModelKind::BWalk => {
                norm <<= tail;
                p_polynomial(model.n, &comp)?
            }
            ModelKind::ABridge => q_polynomial(model.n, &comp)?,
        };
        Ok((comp, poly, norm))
    }

    fn poly_at(poly: &[BigUint], r: i64) -> BigInt {
        if r < 0 {
            return BigInt::zero();
        }
        poly.get(r as usize).map(int).unwrap_or_default()
    }

    /// Probability that `pos{S_i1, ..., S_ik}` is a `k`-face of the cone.
    pub fn face_probability(&self, model: &Model, indices: &[usize]) -> Result<ExactRational> {
        let (_, poly, norm) = self.face_setup(model, indices)?;
        let top = model.d as i64 - indices.len() as i64 - 1;
        let num = Self::down2(top, |r| Self::poly_at(&poly, r));
        Ok(Self::ratio(num * 2, norm))
    }

    /// Probability that `pos{S_i1, ..., S_ik}` is not a face, from the upper
    /// coefficient tail.
    pub fn face_probability_complement(&self, model: &Model, indices: &[usize]) -> Result<ExactRational> {
        let (_, poly, norm) = self.face_setup(model, indices)?;
        let start = model.d as i64 - indices.len() as i64 + 1;
        let num = Self::up2(start, poly.len() as i64, |r| Self::poly_at(&poly, r));
        Ok(Self::ratio(num * 2, norm))
    }

    /// Probability that the cone meets a uniform `(d-k)`-dimensional subspace
    /// nontrivially, `0 <= k <= d - 1`.
    pub fn subspace_intersection_probability(&self, model: &Model, k: usize) -> Result<ExactRational> {
        self.check_capacity(model)?;
        if k >= model.d {
            return Err(Error::domain(format!(
                "subspace intersection requires 0 <= k <= d - 1 (got k = {k}, d = {})",
                model.d
            )));
        }
        let (n, k) = (model.n as i64, k as i64);
        let num = match model.kind {
            ModelKind::ABridge => Self::up2(k + 2, n, |i| self.s1(n, i)),
            ModelKind::BWalk => Self::up2(k + 1, n, |i| self.b1(n, i)),
        };
        Ok(Self::ratio(num * 2, Self::normalizer(model)))
    }

    // ---- queries ----------------------------------------------------------

    /// Dispatches a [`FunctionalQuery`].
    pub fn evaluate(&self, query: &FunctionalQuery) -> Result<FormulaResult> {
        let model = &query.model;
        let idx = &query.indices;
        let f = query.functional;
        let cond = query.conditioned;
        let dual_ok = matches!(
            f,
            Functional::Fk | Functional::Uk | Functional::Vk | Functional::Lambda | Functional::Y | Functional::Z | Functional::YDual
        );
        if query.dual && !dual_ok {
            return Err(Error::domain(format!("{f} has no dual-cone variant")));
        }
        let cond_ok = !matches!(
            f,
            Functional::Absorption
                | Functional::Nonabsorption
                | Functional::Wendel
                | Functional::FaceProb
                | Functional::SubspaceProb
                | Functional::JointAbsorption
        );
        if cond && !cond_ok {
            return Err(Error::domain(format!("{f} has no conditioned variant")));
        }
        let dual = query.dual || f == Functional::YDual;
        let (exact, citation) = match f {
            Functional::Absorption => (self.absorption_probability(model)?, "absorption probability"),
            Functional::Nonabsorption => (self.nonabsorption_probability(model)?, "non-absorption probability"),
            Functional::Wendel => (
                Self::wendel_probability(model.n as i64, model.d as i64)?,
                "Wendel probability for symmetric i.i.d. points",
            ),
            Functional::Fk => {
                let k = need("k", idx.k, f)?;
                if dual {
                    (self.expected_fk_dual(model, k, cond)?, "dual face counts via f_k(C°) = f_{d-k}(C)")
                } else {
                    (self.expected_fk(model, k, cond)?, "expected f-vector")
                }
            }
            Functional::Uk => {
                let k = need("k", idx.k, f)?;
                if dual {
                    (self.expected_uk_dual(model, k, cond)?, "dual quermassintegral via dual Y_{d,k}")
                } else {
                    (self.expected_uk(model, k, cond)?, "expected conic quermassintegral")
                }
            }
            Functional::Vk => {
                let k = need("k", idx.k, f)?;
                if dual {
                    (self.expected_vk_dual(model, k, cond)?, "dual intrinsic volume via v_k(C°) = v_{d-k}(C)")
                } else {
                    (self.expected_vk(model, k, cond)?, "expected conic intrinsic volume")
                }
            }
            Functional::Lambda => {
                let k = need("k", idx.k, f)?;
                if dual {
                    (self.expected_lambda_dual(model, k, cond)?, "dual total face content via dual Y_{k,k-1}")
                } else {
                    (self.expected_lambda(model, k, cond)?, "expected total k-face content")
                }
            }
            Functional::Y | Functional::YDual => {
                let m = need("m", idx.m, f)?;
                let l = need("l", idx.l, f)?;
                if dual {
                    (self.expected_y_dual(model, m, l, cond)?, "dual size functional Y_{m,l}")
                } else {
                    (self.expected_y(model, m, l, cond)?, "size functional Y_{m,l}")
                }
            }
            Functional::Z => {
                let j = need("j", idx.j, f)?;
                let k = need("k", idx.k, f)?;
                if dual {
                    (
                        self.expected_z_dual(model, j, k, cond)?,
                        "dual Z_{j,k} derived from the Y/Z duality (no printed closed form)",
                    )
                } else {
                    (self.expected_z(model, j, k, cond)?, "tangent-cone quermassintegral sum Z_{j,k}")
                }
            }
            Functional::FaceIntrinsicSum => {
                let m = need("m", idx.m, f)?;
                let l = need("l", idx.l, f)?;
                (
                    self.expected_face_intrinsic_sum(model, m, l, cond)?,
                    "sum of intrinsic volumes over m-faces",
                )
            }
            Functional::TangentIntrinsicSum => {
                let j = need("j", idx.j, f)?;
                let k = need("k", idx.k, f)?;
                (
                    self.expected_tangent_intrinsic_sum(model, j, k, cond)?,
                    "sum of tangent-cone intrinsic volumes over j-faces",
                )
            }
            Functional::FaceProb => {
                let tuple = idx
                    .tuple
                    .as_ref()
                    .ok_or_else(|| Error::domain("face_prob needs an index tuple"))?;
                (self.face_probability(model, tuple)?, "face probability of pos{S_i1..S_ik}")
            }
            Functional::SubspaceProb => {
                let k = need("k", idx.k, f)?;
                (
                    self.subspace_intersection_probability(model, k)?,
                    "probability of meeting a uniform (d-k)-subspace",
                )
            }
            Functional::JointAbsorption => {
                let walks = idx.walks.clone().unwrap_or_default();
                let bridges = idx.bridges.clone().unwrap_or_default();
                (
                    joint_absorption_probability(&walks, &bridges, model.d)?,
                    "absorption of a joint hull of walks and bridges",
                )
            }
        };
        Ok(FormulaResult::new(exact, citation))
    }
}

fn joint_setup(walks: &[usize], bridges: &[usize]) -> Result<(Vec<BigUint>, BigUint)> {
    if walks.is_empty() && bridges.is_empty() {
        return Err(Error::domain("joint hull needs at least one walk or bridge"));
    }
    if let Some(&bad) = walks.iter().find(|&&n| n == 0) {
        return Err(Error::domain(format!("walk lengths must be positive (got {bad})")));
    }
    if let Some(&bad) = bridges.iter().find(|&&m| m < 2) {
        return Err(Error::domain(format!("bridge lengths must be at least 2 (got {bad})")));
    }
    let poly = joint_polynomial(walks, bridges);
    let mut norm = BigUint::one();
    for &n in walks {
        norm *= factorial(n) << n;
    }
    for &m in bridges {
        norm *= factorial(m);
    }
    Ok((poly, norm))
}

fn joint_tail(poly: &[BigUint], start: i64) -> BigUint {
    let mut acc = BigUint::zero();
    let mut i = start;
    while i < poly.len() as i64 {
        if i >= 0 {
            acc += &poly[i as usize];
        }
        i += 2;
    }
    acc
}

/// Probability that the joint convex hull of the given walks and bridges
/// contains the origin in `R^d`.
pub fn joint_absorption_probability(walks: &[usize], bridges: &[usize], d: usize) -> Result<ExactRational> {
    if d == 0 {
        return Err(Error::domain("dimension d must be at least 1"));
    }
    let (poly, norm) = joint_setup(walks, bridges)?;
    let num = joint_tail(&poly, d as i64 + 1) * 2u32;
    Ok(ExactRational::from_uints(&num, &norm))
}

/// Complement of [`joint_absorption_probability`], from the lower tail.
pub fn joint_nonabsorption_probability(walks: &[usize], bridges: &[usize], d: usize) -> Result<ExactRational> {
    if d == 0 {
        return Err(Error::domain("dimension d must be at least 1"));
    }
    let (poly, norm) = joint_setup(walks, bridges)?;
    let mut num = BigUint::zero();
    let mut i = d as i64 - 1;
    while i >= 0 {
        if let Some(c) = poly.get(i as usize) {
            num += c;
        }
        i -= 2;
    }
    Ok(ExactRational::from_uints(&(num * 2u32), &norm))
}

/// Probability that the joint positive hull meets a uniform `(d-k)`-subspace.
pub fn joint_subspace_intersection_probability(
    walks: &[usize],
    bridges: &[usize],
    k: usize,
) -> Result<ExactRational> {
    let (poly, norm) = joint_setup(walks, bridges)?;
    let num = joint_tail(&poly, k as i64 + 1) * 2u32;
    Ok(ExactRational::from_uints(&num, &norm))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(num: i64, den: i64) -> ExactRational {
        ExactRational::new(num, den)
    }

    fn a(n: usize, d: usize) -> Model {
        Model::bridge(n, d).unwrap()
    }

    fn b(n: usize, d: usize) -> Model {
        Model::walk(n, d).unwrap()
    }

    fn ev(model: &Model) -> Formulas {
        Formulas::for_model(model)
    }

    #[test]
    fn model_validation() {
        assert!(Model::bridge(3, 3).is_err());
        assert!(Model::bridge(4, 3).is_ok());
        assert!(Model::walk(2, 3).is_err());
        assert!(Model::walk(3, 3).is_ok());
        assert!(Model::walk(3, 0).is_err());
    }

    #[test]
    fn wendel_examples() {
        assert_eq!(Formulas::wendel_probability(4, 3).unwrap(), q(7, 8));
        assert_eq!(Formulas::wendel_probability(2, 1).unwrap(), q(1, 2));
        for n in 1..6 {
            assert_eq!(Formulas::wendel_probability(n, n + 2).unwrap(), q(1, 1));
            assert_eq!(Formulas::wendel_probability(n, n).unwrap(), q(1, 1));
        }
        assert!(Formulas::wendel_probability(0, 2).is_err());
        assert!(Formulas::wendel_probability(3, 0).is_err());
    }

    #[test]
    fn absorption_examples() {
        let m = a(3, 2);
        assert_eq!(ev(&m).nonabsorption_probability(&m).unwrap(), q(1, 1));
        let m = b(2, 1);
        assert_eq!(ev(&m).nonabsorption_probability(&m).unwrap(), q(3, 4));
        let m = a(4, 2);
        assert_eq!(ev(&m).nonabsorption_probability(&m).unwrap(), q(11, 12));
        assert_eq!(ev(&m).absorption_probability(&m).unwrap(), q(1, 12));
    }

    #[test]
    fn y_examples() {
        let m = a(4, 3);
        assert_eq!(ev(&m).expected_y(&m, 2, 1, false).unwrap(), q(1, 2));
        let m = b(3, 2);
        assert_eq!(ev(&m).expected_y(&m, 1, 0, false).unwrap(), q(23, 24));
        assert!(ev(&m).expected_y(&m, 2, 1, false).is_err());
        assert!(ev(&m).expected_y(&m, 1, 1, false).is_err());
    }

    #[test]
    fn z_examples() {
        let m = a(4, 2);
        let f = ev(&m);
        assert_eq!(f.expected_z(&m, 0, 1, false).unwrap(), q(5, 24));
        for j in 0..=2 {
            assert!(f.expected_z(&m, j, 2, false).unwrap().is_zero());
        }
        assert!(f.expected_z(&m, 2, 1, false).is_err());
    }

    #[test]
    fn fk_examples() {
        let m = b(3, 2);
        assert_eq!(ev(&m).expected_fk(&m, 1, false).unwrap(), q(23, 12));
        let m = a(4, 2);
        assert_eq!(ev(&m).expected_fk(&m, 1, false).unwrap(), q(11, 6));
        for d in 1..=6usize {
            let m = b(d, d);
            let f = ev(&m);
            for k in 0..d {
                let expected = ExactRational::from(binomial(d as i64, k as i64).unwrap());
                assert_eq!(f.expected_fk(&m, k, false).unwrap(), expected, "d = {d}, k = {k}");
            }
        }
    }

    #[test]
    fn uk_examples() {
        let m = a(4, 2);
        let f = ev(&m);
        assert_eq!(f.expected_uk(&m, 1, true).unwrap(), q(5, 22));
        assert!(f.expected_uk(&m, 2, false).unwrap().is_zero());
        assert!(f.expected_uk(&m, 3, false).is_err());
    }

    #[test]
    fn vk_examples() {
        let m = a(3, 2);
        let f = ev(&m);
        let got: Vec<_> = (0..=2).map(|k| f.expected_vk(&m, k, false).unwrap()).collect();
        assert_eq!(got, vec![q(1, 3), q(1, 2), q(1, 6)]);
        let m = b(2, 2);
        let f = ev(&m);
        let got: Vec<_> = (0..=2).map(|k| f.expected_vk(&m, k, false).unwrap()).collect();
        assert_eq!(got, vec![q(3, 8), q(1, 2), q(1, 8)]);
    }

    #[test]
    fn lambda_matches_y() {
        let m = a(4, 3);
        let f = ev(&m);
        assert_eq!(f.expected_lambda(&m, 2, false).unwrap(), q(1, 2));
        for model in [a(7, 4), b(6, 4)] {
            let f = ev(&model);
            for k in 1..model.d {
                assert_eq!(
                    f.expected_lambda(&model, k, false).unwrap(),
                    f.expected_y(&model, k, k - 1, false).unwrap()
                );
            }
        }
        assert!(f.expected_lambda(&m, 0, false).is_err());
    }

    #[test]
    fn face_intrinsic_examples() {
        let m = a(4, 2);
        assert_eq!(ev(&m).expected_face_intrinsic_sum(&m, 1, 0, false).unwrap(), q(11, 12));
        let m = a(6, 3);
        let f = ev(&m);
        for k in 1..3 {
            assert_eq!(
                f.expected_face_intrinsic_sum(&m, k, k, false).unwrap(),
                f.expected_lambda(&m, k, false).unwrap()
            );
        }
    }

    #[test]
    fn tangent_intrinsic_examples() {
        let m = a(3, 2);
        assert_eq!(ev(&m).expected_tangent_intrinsic_sum(&m, 1, 1, false).unwrap(), q(1, 1));
        let m = b(2, 2);
        assert_eq!(ev(&m).expected_tangent_intrinsic_sum(&m, 0, 1, false).unwrap(), q(1, 2));
    }

    #[test]
    fn y_dual_examples() {
        let m = a(3, 2);
        assert_eq!(ev(&m).expected_y_dual(&m, 2, 0, false).unwrap(), q(1, 2));
    }

    #[test]
    fn face_probability_examples() {
        let m = b(3, 2);
        let f = ev(&m);
        assert_eq!(f.face_probability(&m, &[1]).unwrap(), q(3, 4));
        assert_eq!(f.face_probability_complement(&m, &[1]).unwrap(), q(1, 4));
        let m = b(4, 4);
        let f = ev(&m);
        for tuple in [vec![1], vec![2, 4], vec![1, 2, 3], vec![4]] {
            assert_eq!(f.face_probability(&m, &tuple).unwrap(), q(1, 1));
        }
        // Bridges index generators 1..=n-1.
        let m = a(4, 2);
        assert!(ev(&m).face_probability(&m, &[4]).is_err());
        assert!(ev(&m).face_probability(&m, &[1, 2]).is_err());
    }

    #[test]
    fn subspace_examples() {
        for model in [a(5, 3), b(5, 3), a(3, 2), b(2, 2)] {
            let f = ev(&model);
            assert_eq!(f.subspace_intersection_probability(&model, 0).unwrap(), q(1, 1));
        }
        let m = b(2, 2);
        // (2/8) * B[2,2] = 1/4.
        assert_eq!(ev(&m).subspace_intersection_probability(&m, 1).unwrap(), q(1, 4));
    }

    #[test]
    fn joint_examples() {
        assert_eq!(joint_absorption_probability(&[1], &[2], 1).unwrap(), q(1, 2));
        for n in 2..8 {
            for d in 1..n {
                let w = b(n, d);
                assert_eq!(
                    joint_absorption_probability(&[n], &[], d).unwrap(),
                    ev(&w).absorption_probability(&w).unwrap()
                );
                if n > d {
                    let br = a(n, d);
                    assert_eq!(
                        joint_absorption_probability(&[], &[n], d).unwrap(),
                        ev(&br).absorption_probability(&br).unwrap()
                    );
                }
            }
        }
        assert!(joint_absorption_probability(&[], &[], 2).is_err());
        assert!(joint_absorption_probability(&[2], &[1], 2).is_err());
    }

    #[test]
    fn large_n_conditioned_edges() {
        let m = a(500, 3);
        let f = ev(&m);
        let v = f.expected_fk(&m, 1, true).unwrap().to_f64();
        assert!((v - 6.0).abs() <= 0.6, "got {v}");
    }

    #[test]
    fn evaluate_dispatch_and_errors() {
        let m = a(4, 2);
        let f = ev(&m);
        let r = f.evaluate(&FunctionalQuery::new(m, Functional::Fk, Indices::k(1))).unwrap();
        assert_eq!(r.exact, q(11, 6));
        assert!((r.decimal - 11.0 / 6.0).abs() < 1e-15);
        assert!(f.evaluate(&FunctionalQuery::new(m, Functional::Fk, Indices::default())).is_err());
        assert!(f
            .evaluate(&FunctionalQuery::new(m, Functional::FaceProb, Indices::tuple(vec![1])).dual())
            .is_err());
    }

    #[test]
    fn parse_functional_names() {
        assert_eq!(Functional::parse("f1"), Some((Functional::Fk, Some(1))));
        assert_eq!(Functional::parse("fk"), Some((Functional::Fk, None)));
        assert_eq!(Functional::parse("Lambda"), Some((Functional::Lambda, None)));
        assert_eq!(Functional::parse("Y_dual"), Some((Functional::YDual, None)));
        assert_eq!(Functional::parse("U1"), Some((Functional::Uk, Some(1))));
        assert_eq!(Functional::parse("bogus"), None);
    }
}
