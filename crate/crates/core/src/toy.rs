//! Two-site, discrete-time dynamics in three flavours: deterministic maps,
//! Markov chains and unitary evolution, plus a search for a single
//! time-homogeneous Markov matrix reproducing given step data.
//!
//! Matrices act on columns: `p_i(t+1) = Σ_j w_ij p_j(t)`.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

/// Tolerance for stochastic, unitary and normalisation checks.
pub const TOY_TOLERANCE: f64 = 1e-12;
/// A candidate matrix is feasible when every constraint holds to this.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-6;
/// Resolution of the exhaustive grid over the matrix parameters.
pub const GRID_STEP: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ToyError {
    #[error("not column-stochastic: {0:?}")]
    NotStochastic([[f64; 2]; 2]),
    #[error("not unitary (max |U†U − I| = {0:e})")]
    NotUnitary(f64),
    #[error("not a probability pair: {0:?}")]
    NotProbability([f64; 2]),
    #[error("amplitude pair has norm² {0}, expected 1")]
    NotNormalized(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Site {
    One,
    Two,
}

/// Deterministic rule `x ↦ rule[x]`.
pub type ClassicalRule = [Site; 2];
pub const IDENTITY_RULE: ClassicalRule = [Site::One, Site::Two];
pub const SWAP_RULE: ClassicalRule = [Site::Two, Site::One];

pub fn classical_step(x: Site, rule: ClassicalRule) -> Site {
    match x {
        Site::One => rule[0],
        Site::Two => rule[1],
    }
}

/// Column-stochastic 2×2 matrix `[[a, b], [1 − a, 1 − b]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StochasticMatrix {
    w: [[f64; 2]; 2],
}

impl StochasticMatrix {
    pub fn new(w: [[f64; 2]; 2]) -> Result<Self, ToyError> {
        let entries_ok = w.iter().flatten().all(|&x| (-TOY_TOLERANCE..=1.0 + TOY_TOLERANCE).contains(&x));
        let cols_ok = (0..2).all(|j| (w[0][j] + w[1][j] - 1.0).abs() <= TOY_TOLERANCE);
        if !(entries_ok && cols_ok) {
            return Err(ToyError::NotStochastic(w));
        }
        Ok(Self { w })
    }

    /// `a = w_11`, `b = w_12`.
    pub fn from_params(a: f64, b: f64) -> Result<Self, ToyError> {
        Self::new([[a, b], [1.0 - a, 1.0 - b]])
    }

    pub fn identity() -> Self {
        Self { w: [[1.0, 0.0], [0.0, 1.0]] }
    }

    pub fn swap() -> Self {
        Self { w: [[0.0, 1.0], [1.0, 0.0]] }
    }

    pub fn entries(&self) -> [[f64; 2]; 2] {
        self.w
    }

    pub fn params(&self) -> (f64, f64) {
        (self.w[0][0], self.w[0][1])
    }

    fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        [self.w[0][0] * p[0] + self.w[0][1] * p[1], self.w[1][0] * p[0] + self.w[1][1] * p[1]]
    }

    /// `wⁿ p`.
    pub fn power_apply(&self, p: [f64; 2], n: u32) -> [f64; 2] {
        (0..n).fold(p, |q, _| self.apply(q))
    }
}

fn check_probability(p: [f64; 2]) -> Result<(), ToyError> {
    if p.iter().any(|&x| x < -TOY_TOLERANCE) || (p[0] + p[1] - 1.0).abs() > TOY_TOLERANCE {
        return Err(ToyError::NotProbability(p));
    }
    Ok(())
}

pub fn markov_step(p: [f64; 2], w: &StochasticMatrix) -> Result<[f64; 2], ToyError> {
    check_probability(p)?;
    Ok(w.apply(p))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyUnitary {
    s: [[Complex64; 2]; 2],
}

impl ToyUnitary {
    pub fn new(s: [[Complex64; 2]; 2]) -> Result<Self, ToyError> {
        let mut defect = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let e: Complex64 = (0..2).map(|k| s[k][i].conj() * s[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((e - target).norm());
            }
        }
        if defect > TOY_TOLERANCE {
            return Err(ToyError::NotUnitary(defect));
        }
        Ok(Self { s })
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Result<Self, ToyError> {
        let r = Complex64::from;
        Self::new([[r(a), r(b)], [r(c), r(d)]])
    }

    /// `(1/√2)[[1, 1], [1, −1]]`.
    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_real(h, h, h, -h).expect("Hadamard matrix is unitary")
    }

    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        self.s
    }

    fn apply(&self, psi: [Complex64; 2]) -> [Complex64; 2] {
        [self.s[0][0] * psi[0] + self.s[0][1] * psi[1], self.s[1][0] * psi[0] + self.s[1][1] * psi[1]]
    }

    /// `w_ij = |S_ij|²`, the transition probabilities of one step from a
    /// basis state.
    pub fn transition_probabilities(&self) -> [[f64; 2]; 2] {
        [[self.s[0][0].norm_sqr(), self.s[0][1].norm_sqr()], [self.s[1][0].norm_sqr(), self.s[1][1].norm_sqr()]]
    }
}

pub fn quantum_step(psi: [Complex64; 2], s: &ToyUnitary) -> Result<[Complex64; 2], ToyError> {
    let n = psi[0].norm_sqr() + psi[1].norm_sqr();
    if (n - 1.0).abs() > TOY_TOLERANCE {
        return Err(ToyError::NotNormalized(n));
    }
    Ok(s.apply(psi))
}

pub fn probabilities(psi: [Complex64; 2]) -> [f64; 2] {
    [psi[0].norm_sqr(), psi[1].norm_sqr()]
}

/// `wⁿ input = output` for the unknown matrix `w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constraint {
    pub input: [f64; 2],
    pub steps: u32,
    pub output: [f64; 2],
}

impl Constraint {
    pub fn new(input: [f64; 2], steps: u32, output: [f64; 2]) -> Result<Self, ToyError> {
        check_probability(input)?;
        check_probability(output)?;
        Ok(Self { input, steps, output })
    }

    /// `|(wⁿ input)_1 − output_1|`; the second component follows from
    /// normalisation.
    pub fn residual(&self, w: &StochasticMatrix) -> f64 {
        (w.power_apply(self.input, self.steps)[0] - self.output[0]).abs()
    }
}

/// Why no single Markov matrix fits the data.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// A zero-step constraint whose output differs from its input.
    ZeroStep { constraint: usize },
    /// The one-step constraints have no common solution `(a, b) ∈ ℝ²`;
    /// `rows` are two constraints that contradict each other.
    OneStepInconsistent { rows: (usize, usize), residual: f64 },
    /// The one-step constraints force `(a, b)` outside `[0, 1]²`.
    OutsideSimplex { a: f64, b: f64 },
    /// The one-step constraints force `w`, and `w` violates `constraint`.
    Forced { w: StochasticMatrix, constraint: usize, predicted: [f64; 2], residual: f64 },
    /// Every grid point misses some constraint by at least `min_residual`,
    /// and `min_residual − margin` bounds the miss over the whole square.
    GridBound { min_residual: f64, margin: f64 },
}

impl Certificate {
    /// Re-derives the certificate's claim from the constraints alone.
    pub fn verify(&self, constraints: &[Constraint]) -> bool {
        match self {
            Certificate::ZeroStep { constraint } => constraints
                .get(*constraint)
                .is_some_and(|c| c.steps == 0 && (c.input[0] - c.output[0]).abs() > FEASIBILITY_TOLERANCE),
            Certificate::OneStepInconsistent { rows: (i, j), residual } => {
                let (Some(ci), Some(cj)) = (constraints.get(*i), constraints.get(*j)) else { return false };
                // identical inputs demanding different outputs
                ci.steps == 1
                    && cj.steps == 1
                    && ci.input == cj.input
                    && (ci.output[0] - cj.output[0]).abs() == *residual
                    && *residual > FEASIBILITY_TOLERANCE
            }
            Certificate::OutsideSimplex { a, b } => {
                let rows: Vec<&Constraint> = constraints.iter().filter(|c| c.steps == 1).collect();
                let spans = rows.iter().any(|r| rows.iter().any(|s| det(r.input, s.input).abs() > 1e-12));
                spans
                    && rows.iter().all(|c| (c.input[0] * a + c.input[1] * b - c.output[0]).abs() <= 1e-12)
                    && !((0.0..=1.0).contains(a) && (0.0..=1.0).contains(b))
            }
            Certificate::Forced { w, constraint, residual, .. } => {
                let rows: Vec<&Constraint> = constraints.iter().filter(|c| c.steps == 1).collect();
                let spans = rows.iter().any(|r| rows.iter().any(|s| det(r.input, s.input).abs() > 1e-12));
                spans
                    && rows.iter().all(|c| c.residual(w) <= 1e-12)
                    && constraints.get(*constraint).is_some_and(|c| c.residual(w) == *residual)
                    && *residual > FEASIBILITY_TOLERANCE
            }
            Certificate::GridBound { min_residual, margin } => {
                let l = constraints.iter().map(|c| c.steps).max().unwrap_or(0) as f64;
                *margin >= l * GRID_STEP / 2.0
                    && grid_minimum(constraints).0 == *min_residual
                    && min_residual - margin > FEASIBILITY_TOLERANCE
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible(StochasticMatrix),
    Infeasible(Certificate),
    /// Neither a fit nor a proof of infeasibility was found.
    Inconclusive { best: StochasticMatrix, residual: f64 },
}

fn det(u: [f64; 2], v: [f64; 2]) -> f64 {
    u[0] * v[1] - u[1] * v[0]
}

fn max_residual(constraints: &[Constraint], w: &StochasticMatrix) -> f64 {
    constraints.iter().map(|c| c.residual(w)).fold(0.0, f64::max)
}

/// Searches for one time-homogeneous column-stochastic `w` satisfying all
/// constraints. One-step constraints are solved exactly when they pin `w`
/// down; otherwise the `[0, 1]²` parameter square is searched on a grid
/// and refined. Among equally good grid points, the one closest to doubly
/// stochastic (`a + b = 1`) is kept.
pub fn markov_feasibility(constraints: &[Constraint]) -> Feasibility {
    for (i, c) in constraints.iter().enumerate() {
        if c.steps == 0 && (c.input[0] - c.output[0]).abs() > FEASIBILITY_TOLERANCE {
            return Feasibility::Infeasible(Certificate::ZeroStep { constraint: i });
        }
    }
    let rows: Vec<(usize, &Constraint)> = constraints.iter().enumerate().filter(|(_, c)| c.steps == 1).collect();
    for (x, (i, ci)) in rows.iter().enumerate() {
        for (j, cj) in &rows[x + 1..] {
            if ci.input == cj.input {
                let residual = (ci.output[0] - cj.output[0]).abs();
                if residual > FEASIBILITY_TOLERANCE {
                    return Feasibility::Infeasible(Certificate::OneStepInconsistent { rows: (*i, *j), residual });
                }
            }
        }
    }
    // the best-conditioned pair of one-step inputs
    let pair = rows
        .iter()
        .flat_map(|r| rows.iter().map(move |s| (r.1, s.1)))
        .max_by(|x, y| det(x.0.input, x.1.input).abs().total_cmp(&det(y.0.input, y.1.input).abs()));
    if let Some((r, s)) = pair.filter(|(r, s)| det(r.input, s.input).abs() > 1e-12) {
        // a p_1 + b p_2 = o_1 for both rows, by Cramer's rule
        let d = det(r.input, s.input);
        let a = (r.output[0] * s.input[1] - s.output[0] * r.input[1]) / d;
        let b = (r.input[0] * s.output[0] - s.input[0] * r.output[0]) / d;
        let inside = |x: f64| (-TOY_TOLERANCE..=1.0 + TOY_TOLERANCE).contains(&x);
        if !(inside(a) && inside(b)) {
            return Feasibility::Infeasible(Certificate::OutsideSimplex { a, b });
        }
        let w = StochasticMatrix::from_params(a.clamp(0.0, 1.0), b.clamp(0.0, 1.0)).expect("clamped parameters");
        let worst = constraints
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.residual(&w)))
            .max_by(|x, y| x.1.total_cmp(&y.1));
        return match worst {
            Some((i, res)) if res > FEASIBILITY_TOLERANCE => Feasibility::Infeasible(Certificate::Forced {
                w,
                constraint: i,
                predicted: w.power_apply(constraints[i].input, constraints[i].steps),
                residual: res,
            }),
            _ => Feasibility::Feasible(w),
        };
    }
    markov_feasibility_grid(constraints)
}

/// Smallest worst-constraint residual over the `GRID_STEP` grid of the
/// parameter square, with its grid indices. Ties go to the point closest to
/// doubly stochastic, then to the lowest index; rows are independent, so
/// the winner does not depend on how they are split across threads.
fn grid_minimum(constraints: &[Constraint]) -> (f64, usize, usize) {
    let n = (1.0 / GRID_STEP).round() as usize;
    let h = 1.0 / n as f64;
    let key = |a: f64, b: f64| {
        let w = StochasticMatrix { w: [[a, b], [1.0 - a, 1.0 - b]] };
        (max_residual(constraints, &w), (a + b - 1.0).abs())
    };
    let order = |x: &(f64, f64, usize, usize), y: &(f64, f64, usize, usize)| {
        x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)).then((x.2, x.3).cmp(&(y.2, y.3)))
    };
    let (r, _, i, j) = (0..=n)
        .into_par_iter()
        .map(|i| {
            let a = i as f64 * h;
            (0..=n)
                .map(|j| {
                    let (r, t) = key(a, j as f64 * h);
                    (r, t, i, j)
                })
                .min_by(order)
                .expect("nonempty row")
        })
        .min_by(order)
        .expect("nonempty grid");
    (r, i, j)
}

/// The grid-plus-refinement search alone, without the exact one-step solve.
pub fn markov_feasibility_grid(constraints: &[Constraint]) -> Feasibility {
    let h = GRID_STEP;
    let (best_r, ia, ib) = grid_minimum(constraints);
    let (a0, b0) = (ia as f64 * h, ib as f64 * h);
    if best_r <= FEASIBILITY_TOLERANCE {
        return Feasibility::Feasible(StochasticMatrix::from_params(a0, b0).expect("grid point"));
    }
    let (a, b) = refine(constraints, a0, b0, h);
    let w = StochasticMatrix::from_params(a, b).expect("refined point stays in the square");
    let r = max_residual(constraints, &w);
    if r <= FEASIBILITY_TOLERANCE {
        return Feasibility::Feasible(w);
    }
    // (wⁿp)_1 moves by at most n·max(|Δa|, |Δb|), and every point of the
    // square is within h/2 of a grid point in each coordinate
    let l = constraints.iter().map(|c| c.steps).max().unwrap_or(0) as f64;
    let margin = l * h / 2.0;
    if best_r - margin > FEASIBILITY_TOLERANCE {
        return Feasibility::Infeasible(Certificate::GridBound { min_residual: best_r, margin });
    }
    Feasibility::Inconclusive { best: w, residual: r }
}

/// Compass search on the summed squared residuals, eight directions,
/// halving the step down to 1e−15.
fn refine(constraints: &[Constraint], mut a: f64, mut b: f64, mut step: f64) -> (f64, f64) {
    let cost = |a: f64, b: f64| {
        let w = StochasticMatrix { w: [[a, b], [1.0 - a, 1.0 - b]] };
        constraints.iter().map(|c| c.residual(&w).powi(2)).sum::<f64>()
    };
    let dirs = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];
    let mut f = cost(a, b);
    while step > 1e-15 {
        let mut moved = false;
        for (da, db) in dirs {
            let (na, nb) = ((a + da * step).clamp(0.0, 1.0), (b + db * step).clamp(0.0, 1.0));
            let nf = cost(na, nb);
            if nf < f {
                (a, b, f) = (na, nb, nf);
                moved = true;
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    (a, b)
}

/// `|ψ_i|² / ‖ψ‖²`; unitary steps preserve the norm, so dividing by it
/// only removes rounding drift.
fn renormalized_probabilities(psi: [Complex64; 2]) -> [f64; 2] {
    let p = probabilities(psi);
    let t = p[0] + p[1];
    [p[0] / t, p[1] / t]
}

/// One row of [`interference_demo`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceRow {
    pub step: u32,
    pub quantum: [f64; 2],
    pub markov: [f64; 2],
    /// Total-variation distance `½ Σ |quantum_i − markov_i|`.
    pub gap: f64,
}

/// Outcome probabilities after `0..=steps` applications of `s` to site 1,
/// against the Markov matrix fitted to one step from both sites.
pub fn interference_demo(s: &ToyUnitary, steps: u32) -> Vec<InterferenceRow> {
    let one_step: Vec<Constraint> = [[1.0, 0.0], [0.0, 1.0]]
        .iter()
        .map(|&input| {
            let amp = s.apply([Complex64::from(input[0]), Complex64::from(input[1])]);
            Constraint { input, steps: 1, output: renormalized_probabilities(amp) }
        })
        .collect();
    let w = match markov_feasibility(&one_step) {
        Feasibility::Feasible(w) => w,
        other => unreachable!("one-step data from basis inputs always fit: {other:?}"),
    };
    let mut psi = [Complex64::from(1.0), Complex64::default()];
    let mut p = [1.0, 0.0];
    let mut rows = Vec::with_capacity(steps as usize + 1);
    for step in 0..=steps {
        let q = renormalized_probabilities(psi);
        let gap = 0.5 * ((q[0] - p[0]).abs() + (q[1] - p[1]).abs());
        rows.push(InterferenceRow { step, quantum: q, markov: p, gap });
        psi = s.apply(psi);
        p = w.apply(p);
    }
    rows
}

/// The two-step Hadamard data: one step sends each site to `(½, ½)`, two
/// steps return each site to itself.
pub fn hadamard_constraints() -> Vec<Constraint> {
    vec![
        Constraint { input: [1.0, 0.0], steps: 1, output: [0.5, 0.5] },
        Constraint { input: [0.0, 1.0], steps: 1, output: [0.5, 0.5] },
        Constraint { input: [1.0, 0.0], steps: 2, output: [1.0, 0.0] },
        Constraint { input: [0.0, 1.0], steps: 2, output: [0.0, 1.0] },
    ]
}
