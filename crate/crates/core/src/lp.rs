//! Exact rational linear programming.
//!
//! [`solve_lp`] is a dense dictionary-form simplex over `BigRational` with
//! Bland's rule. Only the nonbasic columns are stored, so a pivot costs
//! `rows x structural columns`, which keeps the subtour relaxation with a few
//! hundred SEC rows cheap. Infeasible starts go through an auxiliary-variable
//! phase one. At optimality the dual values are read off the objective row.
//!
//! [`is_implied`] maximizes the left-hand side of an inequality over the
//! degree + SEC + unit-box relaxation of an instance and either returns a
//! checked dual certificate (implied) or the maximizing point (violated).

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::constraints::{
    gen_degree, gen_secs, mask_to_set, sec_inequality, upper_bound, violated_sec_masks, DegreeMode,
    LinearInequality, Relation, SecOptions,
};
use crate::error::{Error, Result};
use crate::graph::{int, BipartiteInstance, Edge, FractionalPoint, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpRow {
    pub coeffs: Vec<(usize, Rational)>,
    pub sense: Sense,
    pub rhs: Rational,
}

/// `maximize objective . x` subject to `rows`, `x >= 0`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<Rational>,
    pub rows: Vec<LpRow>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram { num_vars, objective: vec![Rational::zero(); num_vars], rows: Vec::new() }
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, Rational)>, sense: Sense, rhs: Rational) {
        self.rows.push(LpRow { coeffs, sense, rhs });
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub value: Option<Rational>,
    /// Primal solution (meaningful when optimal).
    pub x: Vec<Rational>,
    /// One multiplier per row: `>= 0` for `Le`, `<= 0` for `Ge`, free for
    /// `Eq`; at optimality `sum y_i a_i >= c` and `sum y_i b_i = value`.
    pub duals: Vec<Rational>,
    pub pivots: usize,
}

struct Tableau {
    a: Vec<Vec<Rational>>,
    b: Vec<Rational>,
    d: Vec<Rational>,
    z: Rational,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    pivots: usize,
}

enum Step {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        self.pivots += 1;
        let piv = self.a[r][c].clone();
        let inv = piv.recip();
        let row_r: Vec<Rational> = self.a[r]
            .iter()
            .enumerate()
            .map(|(j, v)| if j == c { inv.clone() } else { v * &inv })
            .collect();
        let b_r = &self.b[r] * &inv;

        for i in 0..self.a.len() {
            if i == r || self.a[i][c].is_zero() {
                continue;
            }
            let f = self.a[i][c].clone();
            let row = &mut self.a[i];
            for (j, v) in row_r.iter().enumerate() {
                if j == c {
                    row[j] = -(&f * &inv);
                } else if !v.is_zero() {
                    row[j] -= &f * v;
                }
            }
            self.b[i] -= &f * &b_r;
        }
        let f = self.d[c].clone();
        if !f.is_zero() {
            for (j, v) in row_r.iter().enumerate() {
                if j == c {
                    self.d[j] = -(&f * &inv);
                } else if !v.is_zero() {
                    self.d[j] -= &f * v;
                }
            }
            self.z += &f * &b_r;
        }
        self.a[r] = row_r;
        self.b[r] = b_r;
        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[c]);
    }

    /// Bland's rule: smallest-label improving column, then smallest-label
    /// basic variable among the minimum ratios.
    fn run(&mut self) -> Step {
        loop {
            let entering = (0..self.d.len())
                .filter(|&j| self.d[j].is_positive())
                .min_by_key(|&j| self.nonbasic[j]);
            let Some(c) = entering else { return Step::Optimal };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.a.len() {
                if !self.a[i][c].is_positive() {
                    continue;
                }
                let ratio = &self.b[i] / &self.a[i][c];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basic[i] < self.basic[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else { return Step::Unbounded };
            self.pivot(r, c);
        }
    }

    fn drop_column(&mut self, c: usize) {
        for row in &mut self.a {
            row.remove(c);
        }
        self.d.remove(c);
        self.nonbasic.remove(c);
    }
}

/// Solves `lp` exactly. Deterministic for a fixed row and column order.
pub fn solve_lp(lp: &LinearProgram) -> LpOutcome {
    let n = lp.num_vars;
    // Every row becomes one or two `<=` rows; remember where each came from.
    let mut rows: Vec<(Vec<Rational>, Rational)> = Vec::new();
    let mut origin: Vec<(usize, bool)> = Vec::new();
    for (k, row) in lp.rows.iter().enumerate() {
        let mut dense = vec![Rational::zero(); n];
        for (j, v) in &row.coeffs {
            dense[*j] += v;
        }
        let neg: Vec<Rational> = dense.iter().map(|v| -v).collect();
        match row.sense {
            Sense::Le => {
                rows.push((dense, row.rhs.clone()));
                origin.push((k, false));
            }
            Sense::Ge => {
                rows.push((neg, -&row.rhs));
                origin.push((k, true));
            }
            Sense::Eq => {
                rows.push((dense, row.rhs.clone()));
                origin.push((k, false));
                rows.push((neg, -&row.rhs));
                origin.push((k, true));
            }
        }
    }
    let m = rows.len();
    let aux = n + m;
    let needs_phase1 = rows.iter().any(|(_, b)| b.is_negative());

    let (a, b): (Vec<Vec<Rational>>, Vec<Rational>) = rows.into_iter().unzip();
    let mut t = Tableau {
        a,
        b,
        d: lp.objective.clone(),
        z: Rational::zero(),
        basic: (n..n + m).collect(),
        nonbasic: (0..n).collect(),
        pivots: 0,
    };

    let infeasible = |pivots| LpOutcome {
        status: LpStatus::Infeasible,
        value: None,
        x: vec![Rational::zero(); n],
        duals: vec![Rational::zero(); lp.rows.len()],
        pivots,
    };

    if needs_phase1 {
        for row in &mut t.a {
            row.push(-Rational::one());
        }
        t.nonbasic.push(aux);
        t.d = vec![Rational::zero(); n];
        t.d.push(-Rational::one());
        let c = n;
        let r = (0..m)
            .min_by(|&i, &k| t.b[i].cmp(&t.b[k]).then(t.basic[i].cmp(&t.basic[k])))
            .expect("phase one needs a negative row");
        t.pivot(r, c);
        t.run();
        if t.z.is_negative() {
            return infeasible(t.pivots);
        }
        if let Some(r) = t.basic.iter().position(|&v| v == aux) {
            let c = (0..t.nonbasic.len())
                .filter(|&j| !t.a[r][j].is_zero())
                .min_by_key(|&j| t.nonbasic[j]);
            match c {
                Some(c) => t.pivot(r, c),
                None => {
                    // Row reads aux = 0 identically; drop it.
                    t.a.remove(r);
                    t.b.remove(r);
                    t.basic.remove(r);
                }
            }
        }
        if let Some(c) = t.nonbasic.iter().position(|&v| v == aux) {
            t.drop_column(c);
        }
        // Re-express the real objective over the current nonbasic set.
        t.z = Rational::zero();
        t.d = vec![Rational::zero(); t.nonbasic.len()];
        for (j, &v) in t.nonbasic.iter().enumerate() {
            if v < n {
                t.d[j] += &lp.objective[v];
            }
        }
        for (i, &v) in t.basic.iter().enumerate() {
            if v < n && !lp.objective[v].is_zero() {
                let c = &lp.objective[v];
                t.z += c * &t.b[i];
                for j in 0..t.d.len() {
                    let delta = c * &t.a[i][j];
                    t.d[j] -= delta;
                }
            }
        }
    }

    match t.run() {
        Step::Unbounded => LpOutcome {
            status: LpStatus::Unbounded,
            value: None,
            x: vec![Rational::zero(); n],
            duals: vec![Rational::zero(); lp.rows.len()],
            pivots: t.pivots,
        },
        Step::Optimal => {
            let mut x = vec![Rational::zero(); n];
            for (i, &v) in t.basic.iter().enumerate() {
                if v < n {
                    x[v] = t.b[i].clone();
                }
            }
            let mut duals = vec![Rational::zero(); lp.rows.len()];
            for (j, &v) in t.nonbasic.iter().enumerate() {
                if (n..n + m).contains(&v) {
                    let (k, negated) = origin[v - n];
                    let y = -&t.d[j];
                    if negated {
                        duals[k] -= y;
                    } else {
                        duals[k] += y;
                    }
                }
            }
            LpOutcome { status: LpStatus::Optimal, value: Some(t.z), x, duals, pivots: t.pivots }
        }
    }
}

/// An LP over instance edges: maximize `objective . x` subject to
/// `constraints` and `0 <= x <= 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpProblem {
    pub variables: Vec<Edge>,
    pub objective: BTreeMap<Edge, Rational>,
    pub constraints: Vec<LinearInequality>,
}

impl LpProblem {
    pub fn over(instance: &BipartiteInstance) -> Self {
        LpProblem { variables: instance.edges().to_vec(), objective: BTreeMap::new(), constraints: Vec::new() }
    }
}

/// Nonnegative (for `<=`) or free (for `=`) multipliers on constraints,
/// together proving `objective . x <= bound` for every feasible `x >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualCertificate {
    pub terms: Vec<(LinearInequality, Rational)>,
}

impl DualCertificate {
    /// Checks sign conditions and `sum y a >= objective` on every variable;
    /// returns the proven bound `sum y b`.
    pub fn check(&self, variables: &[Edge], objective: &BTreeMap<Edge, Rational>) -> Result<Rational, String> {
        let mut combo: BTreeMap<Edge, Rational> = BTreeMap::new();
        let mut bound = Rational::zero();
        for (k, (ineq, y)) in self.terms.iter().enumerate() {
            if ineq.relation() == Relation::Le && y.is_negative() {
                return Err(format!("term {k}: negative multiplier {y} on an inequality"));
            }
            for (e, c) in &ineq.coeffs {
                *combo.entry(*e).or_insert_with(Rational::zero) += c * y;
            }
            bound += &ineq.rhs * y;
        }
        for e in combo.keys() {
            if !variables.contains(e) {
                return Err(format!("edge {e} is not a variable"));
            }
        }
        for e in variables {
            let have = combo.get(e).cloned().unwrap_or_else(Rational::zero);
            let need = objective.get(e).cloned().unwrap_or_else(Rational::zero);
            if have < need {
                return Err(format!("edge {e}: combined coefficient {have} < objective {need}"));
            }
        }
        Ok(bound)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective_value: Option<Rational>,
    pub point: FractionalPoint,
    pub dual: Option<DualCertificate>,
    pub pivots: usize,
}

pub fn solve(problem: &LpProblem) -> Result<LpSolution> {
    let col: BTreeMap<Edge, usize> = problem.variables.iter().enumerate().map(|(k, e)| (*e, k)).collect();
    let index = |e: &Edge| col.get(e).copied().ok_or_else(|| Error::MissingEdge(e.to_string()));
    let mut lp = LinearProgram::new(problem.variables.len());
    for (e, c) in &problem.objective {
        lp.objective[index(e)?] = c.clone();
    }
    let bounds: Vec<LinearInequality> = problem.variables.iter().map(|e| upper_bound(*e)).collect();
    let rows: Vec<&LinearInequality> = problem.constraints.iter().chain(&bounds).collect();
    for ineq in &rows {
        let coeffs = ineq.coeffs.iter().map(|(e, c)| Ok((index(e)?, c.clone()))).collect::<Result<Vec<_>>>()?;
        let sense = match ineq.relation() {
            Relation::Le => Sense::Le,
            Relation::Eq => Sense::Eq,
        };
        lp.add_row(coeffs, sense, ineq.rhs.clone());
    }
    let out = solve_lp(&lp);
    let mut point = FractionalPoint::new();
    for (k, e) in problem.variables.iter().enumerate() {
        point.set(*e, out.x[k].clone());
    }
    let dual = (out.status == LpStatus::Optimal).then(|| DualCertificate {
        terms: rows
            .iter()
            .zip(&out.duals)
            .filter(|(_, y)| !y.is_zero())
            .map(|(ineq, y)| ((*ineq).clone(), y.clone()))
            .collect(),
    });
    Ok(LpSolution { status: out.status, objective_value: out.value, point, dual, pivots: out.pivots })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ImpliedOptions {
    pub mode: DegreeMode,
    /// Start from degree constraints only and add the most violated SEC until
    /// none is violated.
    pub lazy: bool,
    pub secs: SecOptions,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Implication {
    /// `max lhs <= rhs`; `dual` proves `lhs <= bound` with `bound = optimum`.
    Implied { optimum: Rational, dual: DualCertificate },
    /// The maximizing relaxation point violates the inequality.
    Violated { optimum: Rational, witness: FractionalPoint },
    /// The relaxation is empty (possible in equality mode), so the
    /// inequality holds vacuously.
    RelaxationInfeasible,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImpliedReport {
    pub outcome: Implication,
    /// LP solves performed (1 in direct mode).
    pub rounds: usize,
    /// Constraint rows in the final LP, bounds excluded.
    pub constraints: usize,
}

impl ImpliedReport {
    pub fn is_implied(&self) -> bool {
        !matches!(self.outcome, Implication::Violated { .. })
    }
}

/// Maximizes `objective` over the relaxation of `instance`.
pub fn maximize_over_relaxation(
    instance: &BipartiteInstance,
    objective: &BTreeMap<Edge, Rational>,
    opts: &ImpliedOptions,
) -> Result<(LpSolution, usize, usize)> {
    let mut problem = LpProblem::over(instance);
    problem.objective = objective.clone();
    problem.constraints = gen_degree(instance, opts.mode);
    if !opts.lazy {
        problem.constraints.extend(gen_secs(instance, &opts.secs)?);
        let sol = solve(&problem)?;
        return Ok((sol, 1, problem.constraints.len()));
    }
    opts.secs.check_cap(instance)?;
    let mut rounds = 0;
    loop {
        rounds += 1;
        let sol = solve(&problem)?;
        if sol.status != LpStatus::Optimal {
            return Ok((sol, rounds, problem.constraints.len()));
        }
        let hits = violated_sec_masks(instance, &sol.point, &opts.secs)?;
        // Most violated first; earliest mask on ties.
        let worst = hits.into_iter().fold(None::<(u64, Rational)>, |best, (mask, x)| {
            let gap = x - int(mask.count_ones() as i64 - 1);
            match best {
                Some((_, ref g)) if *g >= gap => best,
                _ => Some((mask, gap)),
            }
        });
        match worst {
            None => return Ok((sol, rounds, problem.constraints.len())),
            Some((mask, _)) => problem.constraints.push(sec_inequality(instance, &mask_to_set(instance, mask))),
        }
    }
}

/// Decides whether `target` holds on the whole relaxation.
pub fn is_implied(
    instance: &BipartiteInstance,
    target: &LinearInequality,
    opts: &ImpliedOptions,
) -> Result<ImpliedReport> {
    let (sol, rounds, constraints) = maximize_over_relaxation(instance, &target.coeffs, opts)?;
    let outcome = match sol.status {
        LpStatus::Infeasible => Implication::RelaxationInfeasible,
        LpStatus::Unbounded => return Err(Error::Internal("relaxation inside the unit box is unbounded".into())),
        LpStatus::Optimal => {
            let optimum = sol.objective_value.expect("optimal value");
            if optimum <= target.rhs {
                let dual = sol.dual.expect("optimal dual");
                let bound = dual
                    .check(instance.edges(), &target.coeffs)
                    .map_err(|e| Error::Internal(format!("dual certificate rejected: {e}")))?;
                if bound != optimum {
                    return Err(Error::Internal(format!("dual bound {bound} differs from optimum {optimum}")));
                }
                Implication::Implied { optimum, dual }
            } else {
                Implication::Violated { optimum, witness: sol.point }
            }
        }
    };
    Ok(ImpliedReport { outcome, rounds, constraints })
}
