//! Exact self-checks over the Stirling tables and the closed forms.
//!
//! Each check aggregates one identity family over its whole parameter range
//! and records the first counterexample. All comparisons are exact.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    binomial, compositions, factorial, p_polynomial, q_polynomial, Composition, StirlingKind,
    StirlingTables,
};
use crate::formulas::{joint_absorption_probability, joint_nonabsorption_probability, Formulas, Model, ModelKind};
use crate::rational::ExactRational;

/// Outcome of one identity family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub cases: u64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

struct Checker {
    name: &'static str,
    cases: u64,
    failure: Option<String>,
}

impl Checker {
    fn new(name: &'static str) -> Self {
        Checker { name, cases: 0, failure: None }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(detail());
        }
    }

    /// Records a failed case from a formula error.
    fn error(&mut self, err: impl std::fmt::Display) {
        self.check(false, || err.to_string());
    }

    fn finish(self) -> IdentityCheck {
        IdentityCheck {
            name: self.name.to_string(),
            cases: self.cases,
            passed: self.failure.is_none(),
            counterexample: self.failure,
        }
    }
}

/// Parameter ranges for [`run_all`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteLimits {
    /// Largest `n` for table identities.
    pub stirling_n: usize,
    /// Largest `n` for exhaustive composition sums.
    pub composition_n: usize,
    /// Largest `n` and `d` for formula consistency.
    pub formula_n: usize,
    pub formula_d: usize,
}

impl Default for SuiteLimits {
    fn default() -> Self {
        SuiteLimits { stirling_n: 30, composition_n: 8, formula_n: 10, formula_d: 5 }
    }
}

impl SuiteLimits {
    pub fn table_size(&self) -> usize {
        self.stirling_n.max(self.composition_n).max(self.formula_n).max(self.formula_d + 1)
    }
}

/// Runs every identity family against `formulas` and its tables.
pub fn run_all(formulas: &Formulas, limits: SuiteLimits) -> Vec<IdentityCheck> {
    let tables = formulas.tables();
    let mut out = stirling_suite(tables, limits.stirling_n.min(tables.max_n()));
    out.extend(composition_suite(tables, limits.composition_n.min(tables.max_n())));
    out.extend(formula_suite(formulas, limits.formula_n, limits.formula_d));
    out
}

fn u(v: usize) -> BigUint {
    BigUint::from(v)
}

/// Multiplies a coefficient vector (ascending powers) by `(t + c)`.
fn times_linear(poly: &[BigUint], c: usize) -> Vec<BigUint> {
    let mut out = vec![BigUint::zero(); poly.len() + 1];
    for (i, a) in poly.iter().enumerate() {
        out[i] += a * u(c);
        out[i + 1] += a;
    }
    out
}

/// Recurrences, polynomial and explicit-sum oracles, row sums and the four
/// Stirling convolutions, for every `n <= max_n`.
pub fn stirling_suite(t: &StirlingTables, max_n: usize) -> Vec<IdentityCheck> {
    let mut base = Checker::new("table_base_and_bounds");
    let mut rec1 = Checker::new("first_kind_recurrence");
    let mut rec2 = Checker::new("second_kind_recurrence");
    let mut rec1b = Checker::new("first_kind_b_recurrence");
    let mut rec2b = Checker::new("second_kind_b_recurrence");
    let mut poly1 = Checker::new("first_kind_polynomial_expansion");
    let mut poly1b = Checker::new("first_kind_b_polynomial_expansion");
    let mut explicit2 = Checker::new("second_kind_explicit_sum");
    let mut rows = Checker::new("row_sums");
    let mut parity = Checker::new("parity_row_sums");
    let mut alt_b = Checker::new("alternating_b_convolution");
    let mut sum_b = Checker::new("b_convolution");
    let mut alt_a = Checker::new("alternating_convolution");
    let mut sum_a = Checker::new("lah_convolution");

    let n_i = |n: usize| n as i64;
    let mut rising = vec![BigUint::one()]; // t(t+1)...(t+n-1)
    let mut odd = vec![BigUint::one()]; // (t+1)(t+3)...(t+2n-1)
    for n in 0..=max_n {
        let ni = n_i(n);
        if n > 0 {
            rising = times_linear(&rising, n - 1);
            odd = times_linear(&odd, 2 * n - 1);
        }
        for kind in StirlingKind::ALL {
            base.check(
                t.entry(kind, ni, -1).is_zero() && t.entry(kind, ni, ni + 1).is_zero(),
                || format!("{kind}: nonzero entry outside 0..={n}"),
            );
        }
        if n == 0 {
            for kind in StirlingKind::ALL {
                base.check(t.entry(kind, 0, 0).is_one(), || format!("{kind}(0,0) != 1"));
            }
        }
        for k in 0..=ni {
            if n > 0 {
                let (p, km) = (ni - 1, k - 1);
                let e = t.first(p, km) + u(n - 1) * t.first(p, k);
                rec1.check(&e == t.first(ni, k), || format!("n={n}, k={k}"));
                let e = t.second(p, km) + BigUint::from(k as u64) * t.second(p, k);
                rec2.check(&e == t.second(ni, k), || format!("n={n}, k={k}"));
                let e = t.first_b(p, km) + u(2 * n - 1) * t.first_b(p, k);
                rec1b.check(&e == t.first_b(ni, k), || format!("n={n}, k={k}"));
                let e = t.second_b(p, km) + BigUint::from(2 * k as u64 + 1) * t.second_b(p, k);
                rec2b.check(&e == t.second_b(ni, k), || format!("n={n}, k={k}"));
            }
            let ku = k as usize;
            if n <= 12 {
                poly1.check(&rising[ku] == t.first(ni, k), || format!("n={n}, k={k}"));
                poly1b.check(&odd[ku] == t.first_b(ni, k), || format!("n={n}, k={k}"));
                // k! {n k} = sum_i (-1)^i C(k,i) (k-i)^n
                let mut acc = BigInt::zero();
                for i in 0..=ku {
                    let term = BigInt::from(binomial(k, i as i64).unwrap_or_default())
                        * BigInt::from(ku - i).pow(n as u32);
                    if i % 2 == 0 {
                        acc += term;
                    } else {
                        acc -= term;
                    }
                }
                let lhs = BigInt::from(factorial(ku) * t.second(ni, k));
                explicit2.check(acc == lhs, || format!("n={n}, k={k}"));
            }
        }

        let nf = factorial(n);
        let sum_row = |kind: StirlingKind, parity: Option<i64>| -> BigUint {
            (0..=ni)
                .filter(|k| parity.is_none_or(|p| k % 2 == p))
                .map(|k| t.entry(kind, ni, k).clone())
                .sum()
        };
        rows.check(sum_row(StirlingKind::First, None) == nf, || format!("first kind, n={n}"));
        let bnf = nf.clone() << n;
        rows.check(sum_row(StirlingKind::FirstB, None) == bnf, || format!("first kind B, n={n}"));
        if n >= 2 {
            let half = &nf >> 1usize;
            parity.check(
                sum_row(StirlingKind::First, Some(0)) == half && sum_row(StirlingKind::First, Some(1)) == half,
                || format!("first kind, n={n}"),
            );
        }
        if n >= 1 {
            let half = &bnf >> 1usize;
            parity.check(
                sum_row(StirlingKind::FirstB, Some(0)) == half && sum_row(StirlingKind::FirstB, Some(1)) == half,
                || format!("first kind B, n={n}"),
            );
        }

        // The alternating sums equal (-1)^n on the diagonal (j = n, resp.
        // j + 1 = n) and vanish elsewhere; the proofs only use the off-diagonal
        // range.
        for j in 0..=n {
            let ji = j as i64;
            let mut alt = BigInt::zero();
            let mut plain = BigInt::zero();
            for k in 0..=ni {
                let term = BigInt::from(t.first_b(ni, k) * t.second_b(k, ji));
                plain += &term;
                if k % 2 == 0 {
                    alt += term;
                } else {
                    alt -= term;
                }
            }
            let diag = if j == n { sign(n) } else { BigInt::zero() };
            alt_b.check(alt == diag, || format!("n={n}, j={j}: got {alt}"));
            let rhs = BigInt::from((factorial(n) << n) * binomial(ni, ji).unwrap_or_default());
            sum_b.check(plain * BigInt::from(factorial(j) << j) == rhs, || format!("n={n}, j={j}"));

            let mut alt = BigInt::zero();
            let mut plain = BigInt::zero();
            for k in 0..=ni {
                let term = BigInt::from(t.first(ni, k) * t.second(k, ji + 1));
                plain += &term;
                if k % 2 == 0 {
                    alt += term;
                } else {
                    alt -= term;
                }
            }
            let diag = if j + 1 == n { sign(n) } else { BigInt::zero() };
            alt_a.check(alt == diag, || format!("n={n}, j={j}: got {alt}"));
            if n >= 1 {
                let rhs = BigInt::from(factorial(n) * binomial(ni - 1, ji).unwrap_or_default());
                sum_a.check(plain * BigInt::from(factorial(j + 1)) == rhs, || format!("n={n}, j={j}"));
            }
        }
    }

    [
        base, rec1, rec2, rec1b, rec2b, poly1, poly1b, explicit2, rows, parity, alt_b, sum_b, alt_a, sum_a,
    ]
    .into_iter()
    .map(Checker::finish)
    .collect()
}

fn sign(n: usize) -> BigInt {
    if n % 2 == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// Exhaustive composition sums behind the face-probability formulas, for
/// every `n <= max_n`, every block count `m` and every target index.
pub fn composition_suite(t: &StirlingTables, max_n: usize) -> Vec<IdentityCheck> {
    let mut p_conv = Checker::new("p_polynomial_convolution");
    let mut q_conv = Checker::new("q_polynomial_convolution");
    let mut p_eval = Checker::new("p_polynomial_value_at_one");

    for n in 1..=max_n {
        let ni = n as i64;
        let nf = BigInt::from(factorial(n));
        for m in 0..=n {
            // Walk blocks: j_1..j_m >= 1, j_{m+1} = n - sum >= 0.
            let mut lhs = vec![ExactRational::zero(); n + 1];
            for total in m..=n {
                let heads: Vec<Vec<usize>> = if m == 0 {
                    if total == 0 { vec![vec![]] } else { vec![] }
                } else {
                    compositions(total, m)
                };
                for parts in heads {
                    let Ok(comp) = Composition::new(parts.clone()) else {
                        p_conv.error(format!("invalid composition {parts:?}"));
                        continue;
                    };
                    let poly = match p_polynomial(n, &comp) {
                        Ok(p) => p,
                        Err(e) => {
                            p_conv.error(e);
                            continue;
                        }
                    };
                    let tail = n - total;
                    let mut den = parts.iter().fold(BigInt::one(), |a, &j| a * BigInt::from(factorial(j)));
                    den *= BigInt::from(factorial(tail)) << tail;
                    // Value at t = 1: (2·tail)!/(2^tail tail!) times prod j_l!.
                    let mut at_one = BigUint::one();
                    for i in 1..=tail {
                        at_one *= u(2 * i);
                    }
                    for &j in &parts {
                        at_one *= factorial(j);
                    }
                    let total_coeffs: BigUint = poly.iter().sum();
                    p_eval.check(total_coeffs == at_one, || format!("n={n}, parts={parts:?}"));
                    for (l, slot) in lhs.iter_mut().enumerate() {
                        if l < m {
                            continue;
                        }
                        if let Some(c) = poly.get(l - m) {
                            *slot = slot.clone() + ExactRational::new(BigInt::from(c.clone()), den.clone());
                        }
                    }
                }
            }
            for (l, got) in lhs.iter().enumerate() {
                let li = l as i64;
                let num = BigInt::from(factorial(m) * t.first_b(ni, li) * t.second_b(li, m as i64));
                let den = nf.clone() << (n - m);
                let want = ExactRational::new(num, den);
                p_conv.check(got == &want, || format!("n={n}, m={m}, index={l}: {got} vs {want}"));
            }

            // Bridge blocks: m + 1 parts, all >= 1.
            if m + 1 > n {
                continue;
            }
            let mut lhs = vec![ExactRational::zero(); n + 1];
            for parts in compositions(n, m + 1) {
                let head = parts[..m].to_vec();
                let poly = match Composition::new(head).and_then(|c| q_polynomial(n, &c)) {
                    Ok(p) => p,
                    Err(e) => {
                        q_conv.error(e);
                        continue;
                    }
                };
                let den = parts.iter().fold(BigInt::one(), |a, &j| a * BigInt::from(factorial(j)));
                for (idx, slot) in lhs.iter_mut().enumerate() {
                    if idx < m + 1 {
                        continue;
                    }
                    if let Some(c) = poly.get(idx - m - 1) {
                        *slot = slot.clone() + ExactRational::new(BigInt::from(c.clone()), den.clone());
                    }
                }
            }
            for (idx, got) in lhs.iter().enumerate() {
                let ii = idx as i64;
                let num = BigInt::from(factorial(m + 1) * t.first(ni, ii) * t.second(ii, m as i64 + 1));
                let want = ExactRational::new(num, nf.clone());
                q_conv.check(got == &want, || format!("n={n}, m={m}, index={idx}: {got} vs {want}"));
            }
        }
    }
    [p_conv, q_conv, p_eval].into_iter().map(Checker::finish).collect()
}

/// All models with `n <= max_n`, `1 <= d <= max_d` satisfying general
/// position.
pub fn desk_models(max_n: usize, max_d: usize) -> Vec<Model> {
    let mut out = Vec::new();
    for d in 1..=max_d {
        for n in 1..=max_n {
            for kind in [ModelKind::ABridge, ModelKind::BWalk] {
                if let Ok(m) = Model::new(kind, n, d) {
                    out.push(m);
                }
            }
        }
    }
    out
}

/// Cross-identities between the closed forms over every desk-scale model.
pub fn formula_suite(f: &Formulas, max_n: usize, max_d: usize) -> Vec<IdentityCheck> {
    let mut total = Checker::new("absorption_complement");
    let mut bounds = Checker::new("probabilities_in_unit_interval");
    let mut y_f = Checker::new("y_k0_is_half_fk");
    let mut lam = Checker::new("lambda_is_y_k_km1");
    let mut dual = Checker::new("y_z_duality");
    let mut crofton = Checker::new("crofton_u_from_v");
    let mut differencing = Checker::new("v_from_u_differences");
    let mut vsum = Checker::new("intrinsic_volumes_sum_to_one");
    let mut cond_u = Checker::new("conditioned_u_matches_generic_rule");
    let mut cond_v = Checker::new("conditioned_v_matches_generic_rule");
    let mut z_u = Checker::new("z_0k_is_u_k_off_absorption");
    let mut tangent = Checker::new("tangent_sums_add_to_fk");
    let mut face_crofton = Checker::new("face_sum_crofton");
    let mut face_sum = Checker::new("face_probabilities_sum_to_fk");
    let mut face_total = Checker::new("face_in_out_sum_to_one");
    let mut subspace = Checker::new("subspace_is_twice_u");
    let mut joint = Checker::new("joint_reduces_to_single_block");
    let mut dual_z = Checker::new("dual_z_apex_is_dual_u");

    let one = ExactRational::one();
    let half = ExactRational::half();

    for model in desk_models(max_n, max_d) {
        if model.table_size() > f.tables().max_n() {
            continue;
        }
        let d = model.d;
        let tag = model.to_string();
        macro_rules! get {
            ($c:expr, $e:expr) => {
                match $e {
                    Ok(v) => v,
                    Err(err) => {
                        $c.error(format!("{tag}: {err}"));
                        continue;
                    }
                }
            };
        }

        let nonabs = get!(total, f.nonabsorption_probability(&model));
        let abs = get!(total, f.absorption_probability(&model));
        total.check(&nonabs + &abs == one, || tag.clone());
        bounds.check(nonabs.in_unit_interval() && abs.in_unit_interval(), || tag.clone());

        // U_k(R^d) = 1 iff d - k is odd.
        let u_full = |k: usize| if (d - k) % 2 == 1 { one.clone() } else { ExactRational::zero() };

        for k in 1..d {
            let y = get!(y_f, f.expected_y(&model, k, 0, false));
            let fk = get!(y_f, f.expected_fk(&model, k, false));
            y_f.check(&y * &ExactRational::integer(2) == fk, || format!("{tag}, k={k}"));
            let l = get!(lam, f.expected_lambda(&model, k, false));
            let y = get!(lam, f.expected_y(&model, k, k - 1, false));
            lam.check(l == y, || format!("{tag}, k={k}"));
        }

        for m in 1..=d {
            for l in 0..m {
                let lhs = get!(dual, f.expected_y_dual(&model, m, l, false));
                let fk = get!(dual, f.expected_fk(&model, d - m, false));
                let z = get!(dual, f.expected_z(&model, d - m, d - l, false));
                dual.check(lhs == &fk * &half - z, || format!("{tag}, m={m}, l={l}"));
            }
        }

        let mut vs = Vec::with_capacity(d + 1);
        let mut us = Vec::with_capacity(d + 1);
        for k in 0..=d {
            vs.push(get!(vsum, f.expected_vk(&model, k, false)));
            us.push(get!(crofton, f.expected_uk(&model, k, false)));
        }
        if vs.len() != d + 1 || us.len() != d + 1 {
            continue;
        }
        let sum_v: ExactRational = vs.iter().cloned().sum();
        vsum.check(sum_v == one, || format!("{tag}: sum {sum_v}"));
        for k in 0..=d {
            let want: ExactRational = (k + 1..=d).step_by(2).map(|i| vs[i].clone()).sum();
            crofton.check(us[k] == want, || format!("{tag}, k={k}: {} vs {want}", us[k]));
            bounds.check(us[k].in_unit_interval() && vs[k].in_unit_interval(), || format!("{tag}, k={k}"));
            let u_at = |i: i64| -> ExactRational {
                if i < 0 || i as usize > d {
                    ExactRational::zero()
                } else {
                    us[i as usize].clone()
                }
            };
            let ki = k as i64;
            let from_u = u_at(ki - 1) - u_at(ki + 1);
            if k >= 1 {
                differencing.check(vs[k] == from_u, || format!("{tag}, k={k}"));
            }

            let printed = get!(cond_u, f.expected_uk(&model, k, true));
            let generic = (&us[k] - &(u_full(k) * &abs)) / &nonabs;
            cond_u.check(printed == generic, || format!("{tag}, k={k}"));

            let printed = get!(cond_v, f.expected_vk(&model, k, true));
            let at_full = if k == d { one.clone() } else { ExactRational::zero() };
            let generic = (&vs[k] - &(at_full * &abs)) / &nonabs;
            cond_v.check(printed == generic, || format!("{tag}, k={k}"));

            let z = get!(z_u, f.expected_z(&model, 0, k, false));
            z_u.check(z == &us[k] - &(u_full(k) * &abs), || format!("{tag}, k={k}"));

            if k < d {
                let p = get!(subspace, f.subspace_intersection_probability(&model, k));
                let want = &us[k] * &ExactRational::integer(2) - u_full(k) * ExactRational::integer(2) * &abs + &abs;
                subspace.check(p == want, || format!("{tag}, k={k}"));
                bounds.check(p.in_unit_interval(), || format!("{tag}, subspace k={k}"));

                let zd = get!(dual_z, f.expected_z_dual(&model, 0, k, false));
                let ud = get!(dual_z, f.expected_uk_dual(&model, k, false));
                dual_z.check(zd == ud, || format!("{tag}, k={k}"));
            }
        }

        for j in 0..d {
            let fj = get!(tangent, f.expected_fk(&model, j, false));
            let mut acc = ExactRational::zero();
            for k in j..=d {
                let v = get!(tangent, f.expected_tangent_intrinsic_sum(&model, j, k, false));
                acc = acc + v;
            }
            tangent.check(acc == fj, || format!("{tag}, j={j}"));
        }

        for m in 1..d {
            for l in 0..m {
                let y = get!(face_crofton, f.expected_y(&model, m, l, false));
                let mut acc = ExactRational::zero();
                for i in (l + 1..=m).step_by(2) {
                    let v = get!(face_crofton, f.expected_face_intrinsic_sum(&model, m, i, false));
                    acc = acc + v;
                }
                face_crofton.check(acc == y, || format!("{tag}, m={m}, l={l}"));
            }
        }

        let generators = model.generators();
        for k in 1..d {
            let fk = get!(face_sum, f.expected_fk(&model, k, false));
            let mut acc = ExactRational::zero();
            for tuple in k_subsets(generators, k) {
                let p_in = get!(face_sum, f.face_probability(&model, &tuple));
                let p_out = get!(face_total, f.face_probability_complement(&model, &tuple));
                face_total.check(&p_in + &p_out == one, || format!("{tag}, indices={tuple:?}"));
                bounds.check(p_in.in_unit_interval(), || format!("{tag}, face {tuple:?}"));
                acc = acc + p_in;
            }
            face_sum.check(acc == fk, || format!("{tag}, k={k}"));
        }

        let single = match model.kind {
            ModelKind::BWalk => (vec![model.n], vec![]),
            ModelKind::ABridge => (vec![], vec![model.n]),
        };
        let ja = get!(joint, joint_absorption_probability(&single.0, &single.1, d));
        let jn = get!(joint, joint_nonabsorption_probability(&single.0, &single.1, d));
        joint.check(ja == abs && jn == nonabs, || tag.clone());
    }

    // Mixed joint hulls: absorption and non-absorption tails add to one.
    for walks in 0..=3usize {
        for bridges in 0..=2usize {
            for d in 1..=max_d {
                let w: Vec<usize> = (1..=walks).collect();
                let b: Vec<usize> = (2..2 + bridges).collect();
                if w.is_empty() && b.is_empty() {
                    continue;
                }
                let (Ok(a), Ok(n)) = (
                    joint_absorption_probability(&w, &b, d),
                    joint_nonabsorption_probability(&w, &b, d),
                ) else {
                    joint.error(format!("walks={w:?}, bridges={b:?}, d={d}"));
                    continue;
                };
                joint.check(&a + &n == one && a.in_unit_interval(), || {
                    format!("walks={w:?}, bridges={b:?}, d={d}")
                });
            }
        }
    }

    [
        total, bounds, y_f, lam, dual, crofton, differencing, vsum, cond_u, cond_v, z_u, tangent, face_crofton,
        face_sum, face_total, subspace, joint, dual_z,
    ]
    .into_iter()
    .map(Checker::finish)
    .collect()
}

/// Strictly increasing `k`-tuples from `1..=n`.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n {
            if n - i + 1 < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(1, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn failures(checks: &[IdentityCheck]) -> Vec<&IdentityCheck> {
        checks.iter().filter(|c| !c.passed).collect()
    }

    #[test]
    fn stirling_suite_passes() {
        let t = StirlingTables::new(30);
        let checks = stirling_suite(&t, 30);
        assert!(failures(&checks).is_empty(), "{:#?}", failures(&checks));
        assert!(checks.iter().all(|c| c.cases > 0));
    }

    #[test]
    fn composition_suite_passes() {
        let t = StirlingTables::new(8);
        let checks = composition_suite(&t, 8);
        assert!(failures(&checks).is_empty(), "{:#?}", failures(&checks));
    }

    #[test]
    fn formula_suite_passes() {
        let f = Formulas::new(11);
        let checks = formula_suite(&f, 10, 5);
        assert!(failures(&checks).is_empty(), "{:#?}", failures(&checks));
        assert!(checks.iter().all(|c| c.cases > 0), "{checks:#?}");
    }

    #[test]
    fn tampered_entry_is_caught() {
        for kind in StirlingKind::ALL {
            let t = Arc::new(StirlingTables::tampered(30, kind, 7, 3));
            let f = Formulas::with_tables(t);
            let checks = run_all(&f, SuiteLimits::default());
            assert!(!failures(&checks).is_empty(), "{kind} tampering went unnoticed");
        }
    }

    #[test]
    fn subsets_enumerate() {
        assert_eq!(k_subsets(4, 2).len(), 6);
        assert_eq!(k_subsets(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(k_subsets(2, 3).len(), 0);
    }
}
