//! Platt's SMO: the outer loop alternates full sweeps with sweeps over the
//! non-bound multipliers, the second multiplier is chosen by the largest
//! |E1 - E2| first, then by scanning non-bound and finally all examples.

use std::collections::VecDeque;

use super::{SupportVector, SvmModel, Termination, TrainConfig, TrainExample, TrainStats};
use crate::error::{Error, Result};
use crate::features::SpaceId;
use crate::scalar::Scalar;

/// Entries kept in the kernel row cache.
const KERNEL_CACHE_ENTRIES: usize = 1 << 23;

struct KernelRows<'a, F: Scalar> {
    examples: &'a [TrainExample<F>],
    config: &'a TrainConfig<F>,
    rows: Vec<Option<Box<[F]>>>,
    order: VecDeque<usize>,
    capacity: usize,
    diag: Vec<F>,
}

impl<'a, F: Scalar> KernelRows<'a, F> {
    fn new(examples: &'a [TrainExample<F>], config: &'a TrainConfig<F>) -> Self {
        let n = examples.len();
        let diag = examples
            .iter()
            .map(|e| config.kernel.eval(&e.x, &e.x))
            .collect();
        KernelRows {
            examples,
            config,
            rows: vec![None; n],
            order: VecDeque::new(),
            capacity: (KERNEL_CACHE_ENTRIES / n.max(1)).max(2),
            diag,
        }
    }

    fn row(&mut self, i: usize) -> &[F] {
        if self.rows[i].is_none() {
            if self.order.len() >= self.capacity {
                if let Some(old) = self.order.pop_front() {
                    self.rows[old] = None;
                }
            }
            let xi = &self.examples[i].x;
            let row: Box<[F]> = self
                .examples
                .iter()
                .enumerate()
                .map(|(j, e)| if j == i { self.diag[i] } else { self.config.kernel.eval(xi, &e.x) })
                .collect();
            self.rows[i] = Some(row);
            self.order.push_back(i);
        }
        self.rows[i].as_deref().unwrap()
    }
}

struct Solver<'a, F: Scalar> {
    kernel: KernelRows<'a, F>,
    y: Vec<F>,
    alpha: Vec<F>,
    /// E_i = f(x_i) - y_i under the current multipliers and bias.
    errors: Vec<F>,
    bias: F,
    c: F,
    tol: F,
    eps: F,
    steps: usize,
    min_gain: F,
    trace: Option<Vec<F>>,
}

impl<'a, F: Scalar> Solver<'a, F> {
    fn n(&self) -> usize {
        self.alpha.len()
    }

    fn non_bound(&self, i: usize) -> bool {
        self.alpha[i] > F::zero() && self.alpha[i] < self.c
    }

    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        if i1 == i2 {
            return false;
        }
        let (a1, a2) = (self.alpha[i1], self.alpha[i2]);
        let (y1, y2) = (self.y[i1], self.y[i2]);
        let (e1, e2) = (self.errors[i1], self.errors[i2]);
        let s = y1 * y2;
        let c = self.c;
        let (lo, hi) = if s < F::zero() {
            ((a2 - a1).max(F::zero()), c.min(c + a2 - a1))
        } else {
            ((a1 + a2 - c).max(F::zero()), c.min(a1 + a2))
        };
        if hi - lo <= F::zero() {
            return false;
        }
        let k11 = self.kernel.diag[i1];
        let k22 = self.kernel.diag[i2];
        let k12 = self.kernel.row(i1)[i2];
        let eta = k11 + k22 - F::lit(2.0) * k12;
        // objective change when a2 moves by t along the constraint line
        let gain = |t: F| t * y2 * (e1 - e2) - F::lit(0.5) * eta * t * t;

        let mut a2_new = if eta > F::zero() {
            (a2 + y2 * (e1 - e2) / eta).max(lo).min(hi)
        } else {
            let (g_lo, g_hi) = (gain(lo - a2), gain(hi - a2));
            if g_lo > g_hi + self.eps {
                lo
            } else if g_hi > g_lo + self.eps {
                hi
            } else {
                a2
            }
        };
        // snap to the box so bound membership is exact
        let snap = c * F::lit(1e-12);
        if a2_new < snap {
            a2_new = F::zero();
        } else if a2_new > c - snap {
            a2_new = c;
        }
        if (a2_new - a2).abs() < self.eps * (a2_new + a2 + self.eps) {
            return false;
        }
        let mut a1_new = a1 + s * (a2 - a2_new);
        if a1_new < snap {
            a1_new = F::zero();
        } else if a1_new > c - snap {
            a1_new = c;
        }

        let step_gain = gain(a2_new - a2);
        self.min_gain = self.min_gain.min(step_gain);

        let d1 = y1 * (a1_new - a1);
        let d2 = y2 * (a2_new - a2);
        let b1 = self.bias - e1 - d1 * k11 - d2 * k12;
        let b2 = self.bias - e2 - d1 * k12 - d2 * k22;
        let free = |a: F| a > F::zero() && a < c;
        let b_new = if free(a1_new) {
            b1
        } else if free(a2_new) {
            b2
        } else {
            (b1 + b2) * F::lit(0.5)
        };
        let db = b_new - self.bias;

        let row1: Vec<F> = self.kernel.row(i1).to_vec();
        let row2 = self.kernel.row(i2);
        for (k, e) in self.errors.iter_mut().enumerate() {
            *e = *e + d1 * row1[k] + d2 * row2[k] + db;
        }
        self.alpha[i1] = a1_new;
        self.alpha[i2] = a2_new;
        self.bias = b_new;
        self.steps += 1;
        if self.trace.is_some() {
            let w = self.objective();
            self.trace.as_mut().unwrap().push(w);
        }
        true
    }

    fn violates(&self, i: usize) -> bool {
        let r = self.errors[i] * self.y[i];
        let a = self.alpha[i];
        (r < -self.tol && a < self.c) || (r > self.tol && a > F::zero())
    }

    /// Sets the bias from the free multipliers, or to the middle of the
    /// interval allowed by the bound ones.
    fn refit_bias(&mut self) {
        let n = self.n();
        // b - E_i is the bias that puts example i exactly on its margin
        let on_margin = |s: &Self, i: usize| s.bias - s.errors[i];
        let free: Vec<usize> = (0..n).filter(|&i| self.non_bound(i)).collect();
        let b_new = if free.is_empty() {
            let mut lower = F::neg_infinity();
            let mut upper = F::infinity();
            for i in 0..n {
                let r = on_margin(self, i);
                if (self.y[i] > F::zero()) == (self.alpha[i] <= F::zero()) {
                    lower = lower.max(r);
                } else {
                    upper = upper.min(r);
                }
            }
            match (lower.is_finite(), upper.is_finite()) {
                (true, true) => (lower + upper) * F::lit(0.5),
                (true, false) => lower,
                (false, true) => upper,
                (false, false) => self.bias,
            }
        } else {
            free.iter().map(|&i| on_margin(self, i)).sum::<F>() / F::from_count(free.len())
        };
        let db = b_new - self.bias;
        for e in &mut self.errors {
            *e = *e + db;
        }
        self.bias = b_new;
    }

    fn examine(&mut self, i2: usize) -> bool {
        let n = self.n();
        if !self.violates(i2) {
            return false;
        }
        let e2 = self.errors[i2];
        let mut best: Option<(usize, F)> = None;
        let mut free_count = 0;
        for i in 0..n {
            if self.non_bound(i) {
                free_count += 1;
                let gap = (self.errors[i] - e2).abs();
                if best.is_none_or(|(_, g)| gap > g) {
                    best = Some((i, gap));
                }
            }
        }
        if free_count > 1 {
            if let Some((i1, _)) = best {
                if self.take_step(i1, i2) {
                    return true;
                }
            }
        }
        for off in 1..=n {
            let i1 = (i2 + off) % n;
            if self.non_bound(i1) && self.take_step(i1, i2) {
                return true;
            }
        }
        for off in 1..=n {
            let i1 = (i2 + off) % n;
            if self.take_step(i1, i2) {
                return true;
            }
        }
        false
    }

    /// Dual objective `sum alpha - 1/2 sum alpha_i alpha_j y_i y_j K_ij`.
    fn objective(&mut self) -> F {
        // f_i - b = E_i + y_i - b, so the quadratic part is sum alpha_i y_i (f_i - b)
        let mut lin = F::zero();
        let mut quad = F::zero();
        for i in 0..self.n() {
            lin = lin + self.alpha[i];
            quad = quad + self.alpha[i] * self.y[i] * (self.errors[i] + self.y[i] - self.bias);
        }
        lin - F::lit(0.5) * quad
    }
}

fn validate(examples: &[TrainExample<impl Scalar>]) -> Result<Option<SpaceId>> {
    if examples.is_empty() {
        return Err(Error::invalid("examples", "training set is empty"));
    }
    let spam = examples.iter().any(|e| e.y == crate::corpus::Class::Spam);
    let legit = examples.iter().any(|e| e.y == crate::corpus::Class::Legitimate);
    if !(spam && legit) || examples.len() < 2 {
        return Err(Error::SingleClass);
    }
    let space = examples[0].x.space();
    if let Some(e) = examples.iter().find(|e| e.x.space() != space) {
        return Err(Error::SpaceMismatch {
            expected: space.map_or("none".into(), |s| s.to_string()),
            found: e.x.space().map_or("none".into(), |s| s.to_string()),
        });
    }
    Ok(space)
}

fn solve<F: Scalar>(
    examples: &[TrainExample<F>],
    config: &TrainConfig<F>,
    traced: bool,
) -> Result<(SvmModel<F>, Vec<F>)> {
    config.validate()?;
    let space = validate(examples)?;
    let n = examples.len();
    let y: Vec<F> = examples
        .iter()
        .map(|e| F::from_i8(e.y.sign()).unwrap())
        .collect();
    let mut solver = Solver {
        kernel: KernelRows::new(examples, config),
        errors: y.iter().map(|&v| -v).collect(),
        y,
        alpha: vec![F::zero(); n],
        bias: F::zero(),
        c: config.c,
        tol: config.kkt_tolerance,
        eps: F::lit(1e-12).max(F::epsilon() * F::lit(16.0)),
        steps: 0,
        min_gain: F::infinity(),
        trace: traced.then(Vec::new),
    };

    let mut passes = 0;
    let termination = 'outer: loop {
        let mut examine_all = true;
        let mut changed = 0;
        loop {
            if !(changed > 0 || examine_all) {
                break;
            }
            if passes >= config.max_passes {
                break 'outer Termination::MaxPasses;
            }
            passes += 1;
            changed = 0;
            for i in 0..n {
                if (examine_all || solver.non_bound(i)) && solver.examine(i) {
                    changed += 1;
                }
            }
            if examine_all {
                examine_all = false;
            } else if changed == 0 {
                examine_all = true;
            }
        }
        // the last step's bias can sit outside the KKT interval when no
        // multiplier is free; refit it and resume if anything still violates
        solver.refit_bias();
        if (0..n).all(|i| !solver.violates(i)) {
            break Termination::Converged;
        }
    };

    let dual_objective = solver.objective();
    let stats = TrainStats {
        passes,
        steps: solver.steps,
        termination,
        min_step_gain: if solver.steps == 0 { F::zero() } else { solver.min_gain },
        dual_objective,
    };
    let support = examples
        .iter()
        .zip(&solver.alpha)
        .filter(|(_, &a)| a > config.alpha_epsilon)
        .map(|(e, &a)| SupportVector {
            id: e.id.clone(),
            alpha: a,
            y: e.y,
            x: e.x.clone(),
        })
        .collect();
    let dim = examples.iter().map(|e| e.x.extent()).max().unwrap_or(0);
    let model = SvmModel {
        config: config.clone(),
        bias: solver.bias,
        support,
        space,
        dim,
        stats: Some(stats),
    };
    Ok((model, solver.trace.unwrap_or_default()))
}

/// Trains a soft-margin SVM on `examples`.
///
/// Requires at least two examples covering both classes, all built against
/// the same feature space. Deterministic for a fixed example order.
pub fn train_smo<F: Scalar>(examples: &[TrainExample<F>], config: &TrainConfig<F>) -> Result<SvmModel<F>> {
    solve(examples, config, false).map(|(m, _)| m)
}

/// As [`train_smo`], also returning the dual objective after every accepted
/// joint step, recomputed from the multipliers. Costs O(n) extra per step.
pub fn train_smo_traced<F: Scalar>(
    examples: &[TrainExample<F>],
    config: &TrainConfig<F>,
) -> Result<(SvmModel<F>, Vec<F>)> {
    solve(examples, config, true)
}
