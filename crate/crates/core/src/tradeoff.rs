//! Constrained searches for the information/disturbance frontier: over the
//! closed-form family, over general interactions generated by Hermitian
//! exponentials, and at zero disturbance. Also tabulates the family surface.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;

use crate::eavesdrop::{evolve, generator_len, isometry_from_generator, MAX_DIM_E};
use crate::error::{Error, Result};
use crate::metrics::{
    closed_forms, disturbance, frontier_d, frontier_pe_at, helstrom_error, pe_min, FamilyParams,
    Source, TradeoffPoint,
};
use crate::optimize::{multistart, secant, NelderMead};
use crate::random::{rng_from, uniform};
use crate::scalar::Real;
use crate::states::{pair_from_overlap, StatePair};

/// Weight of the quadratic penalty on `|P_e − target|`.
pub const PENALTY_WEIGHT: f64 = 1e4;
/// A reported point is feasible when its error probability is this close to
/// the target.
pub const FEASIBILITY_TOL: f64 = 1e-6;
/// Gaps below `−VIOLATION_TOL` count as frontier violations.
pub const VIOLATION_TOL: f64 = 1e-6;
/// Disturbance ceiling for the zero-disturbance search.
pub const ZERO_DISTURBANCE_CAP: f64 = 1e-9;
const ZERO_DISTURBANCE_WEIGHT: f64 = 1e6;
const ZERO_POLISH_WEIGHTS: [f64; 6] = [1e8, 1e10, 1e12, 1e14, 1e16, 1e18];
const POLISH_TOL: f64 = 1e-8;
const POLISH_WEIGHTS: [f64; 4] = [1e6, 1e8, 1e10, 1e12];
const MAX_RECORDED_VIOLATIONS: usize = 64;

const TAG_FAMILY: u64 = 0x46;
const TAG_ISOMETRY: u64 = 0x49;
const TAG_ZERO: u64 = 0x5a;

/// Restart count, per-restart iteration budget, simplex tolerance and seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchBudget {
    pub restarts: usize,
    pub iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            restarts: 32,
            iterations: 2000,
            tolerance: 1e-12,
            seed: 0,
        }
    }
}

impl SearchBudget {
    pub fn validate(&self) -> Result<()> {
        let field = if self.restarts == 0 {
            Some(("restarts", self.restarts as f64))
        } else if self.iterations == 0 {
            Some(("iterations", self.iterations as f64))
        } else if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            Some(("tolerance", self.tolerance))
        } else {
            None
        };
        match field {
            Some((field, value)) => Err(Error::OutOfRange {
                field,
                value,
                lo: 0.0,
                hi: f64::INFINITY,
            }),
            None => Ok(()),
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

/// Which search produced a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Method {
    Family,
    Isometry { dim_e: usize },
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::Family => "family",
            Method::Isometry { .. } => "isometry",
        }
    }
}

/// One optimized point on a searched curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontierPoint<T> {
    pub pe_target: T,
    /// Error probability actually achieved.
    pub pe: T,
    /// Frontier disturbance at the achieved `pe`.
    pub d_frontier: T,
    pub d_achieved: T,
    /// `d_achieved − d_frontier`, unclamped.
    pub gap: T,
    pub feasible: bool,
    pub source: Source<T>,
    /// Family searches only: the minimum over the `sin 2φ < 0` half-space at
    /// the same target, or `None` if that search was infeasible.
    pub d_negative_half: Option<T>,
}

/// A visited point that fell below the frontier by more than
/// [`VIOLATION_TOL`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation<T> {
    pub pe: T,
    pub d: T,
    pub gap: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontierCurve<T> {
    pub s_overlap: T,
    pub method: Method,
    pub budget: SearchBudget,
    /// Sorted ascending in achieved `pe`.
    pub points: Vec<FrontierPoint<T>>,
    /// Smallest `d − frontier_d(pe)` over every point the search evaluated.
    pub min_visited_gap: T,
    /// First visited violations, in target then restart order.
    pub violations: Vec<Violation<T>>,
}

impl<T: Real> FrontierCurve<T> {
    pub fn seed(&self) -> u64 {
        self.budget.seed
    }

    pub fn max_abs_gap(&self) -> T {
        self.points
            .iter()
            .fold(T::zero(), |m, p| m.max(p.gap.abs()))
    }

    pub fn all_feasible(&self) -> bool {
        self.points.iter().all(|p| p.feasible)
    }

    /// Whether any reported or visited point lies below the frontier by more
    /// than [`VIOLATION_TOL`].
    pub fn has_violation(&self) -> bool {
        let floor = -T::lit(VIOLATION_TOL);
        self.min_visited_gap < floor || self.points.iter().any(|p| p.gap < floor)
    }

    /// Largest `|d_negative_half − d_achieved|` over the family half-spaces.
    pub fn half_space_difference(&self) -> Option<T> {
        self.points
            .iter()
            .filter_map(|p| p.d_negative_half.map(|d| (d - p.d_achieved).abs()))
            .fold(None, |m: Option<T>, x| Some(m.map_or(x, |m| m.max(x))))
    }
}

#[derive(Debug, Clone)]
struct Tracker<T> {
    min_gap: T,
    violations: Vec<Violation<T>>,
}

impl<T: Real> Tracker<T> {
    fn new() -> Self {
        Self {
            min_gap: T::infinity(),
            violations: Vec::new(),
        }
    }

    fn visit(&mut self, pe: T, d: T, s: T) {
        let Ok(df) = frontier_d(pe, s) else { return };
        let gap = d - df;
        self.min_gap = self.min_gap.min(gap);
        if gap < -T::lit(VIOLATION_TOL) && self.violations.len() < MAX_RECORDED_VIOLATIONS {
            self.violations.push(Violation { pe, d, gap });
        }
    }

    fn merge(&mut self, other: Tracker<T>) {
        self.min_gap = self.min_gap.min(other.min_gap);
        let room = MAX_RECORDED_VIOLATIONS - self.violations.len();
        self.violations
            .extend(other.violations.into_iter().take(room));
    }
}

/// A constrained problem in unconstrained coordinates `u`.
trait Surface<T: Real>: Sync {
    /// `(P_e, D)` at `u`, or `None` where undefined.
    fn eval(&self, u: &[T]) -> Option<(T, T)>;
}

struct Search<'a, T: Real, P: Surface<T>> {
    surface: &'a P,
    s: T,
    target: T,
    budget: &'a SearchBudget,
    step: T,
}

struct Found<T> {
    u: Vec<T>,
    pe: T,
    d: T,
    feasible: bool,
    tracker: Tracker<T>,
}

impl<T: Real, P: Surface<T>> Search<'_, T, P> {
    fn penalized(&self, u: &[T], weight: T, tracker: &mut Tracker<T>) -> T {
        match self.surface.eval(u) {
            Some((pe, d)) => {
                tracker.visit(pe, d, self.s);
                let r = pe - self.target;
                d + weight * r * r
            }
            None => T::infinity(),
        }
    }

    fn pe_at(&self, u: &[T], tracker: &mut Tracker<T>) -> Option<T> {
        let (pe, d) = self.surface.eval(u)?;
        tracker.visit(pe, d, self.s);
        Some(pe)
    }

    fn run(&self, start: impl Fn(usize) -> Vec<T> + Sync) -> Option<Found<T>> {
        let nm = NelderMead::new(
            self.budget.iterations,
            T::lit(self.budget.tolerance),
            self.step,
        );
        let trackers: Vec<Mutex<Tracker<T>>> = (0..self.budget.restarts)
            .map(|_| Mutex::new(Tracker::new()))
            .collect();
        let weight = T::lit(PENALTY_WEIGHT);
        let (_, run) = multistart(&nm, self.budget.restarts, start, |r, u| {
            let mut t = trackers[r].lock().expect("tracker lock");
            self.penalized(u, weight, &mut t)
        })?;
        let mut tracker = Tracker::new();
        for t in trackers {
            tracker.merge(t.into_inner().expect("tracker lock"));
        }
        if !run.f.is_finite() {
            return None;
        }

        let tol = T::lit(POLISH_TOL);
        let fine = NelderMead::new(
            self.budget.iterations,
            T::lit(self.budget.tolerance),
            self.step * T::lit(1e-2),
        );
        let mut u = run.x;
        let mut dir = run.last_descent;
        for w in POLISH_WEIGHTS {
            let pe = self.pe_at(&u, &mut tracker)?;
            if (pe - self.target).abs() <= tol {
                break;
            }
            let w = T::lit(w);
            let r = fine.minimize(|x| self.penalized(x, w, &mut tracker), &u);
            u = r.x;
            if r.last_descent.iter().any(|v| *v != T::zero()) {
                dir = r.last_descent;
            }
        }
        let u = self.project(u, &dir, &mut tracker);
        let (pe, d) = self.surface.eval(&u)?;
        tracker.visit(pe, d, self.s);
        Some(Found {
            feasible: (pe - self.target).abs() <= T::lit(FEASIBILITY_TOL),
            u,
            pe,
            d,
            tracker,
        })
    }

    /// Moves `u` onto `P_e = target`: secant along `dir`, falling back to
    /// Newton steps along the finite-difference gradient of `P_e`.
    fn project(&self, u: Vec<T>, dir: &[T], tracker: &mut Tracker<T>) -> Vec<T> {
        let tol = T::lit(POLISH_TOL);
        let residual = |x: &[T], tr: &mut Tracker<T>| self.pe_at(x, tr).map(|pe| pe - self.target);
        match residual(&u, tracker) {
            Some(r) if r.abs() <= tol => return u,
            None => return u,
            _ => {}
        }
        let along = |t: T| -> Vec<T> { u.iter().zip(dir).map(|(a, b)| *a + t * *b).collect() };
        if dir.iter().any(|v| *v != T::zero()) {
            let mut h = |t: T| residual(&along(t), tracker).unwrap_or(T::nan());
            if let Some(t) = secant(&mut h, T::zero(), T::one(), tol, 60) {
                return along(t);
            }
        }
        let mut x = u.clone();
        let eps = T::lit(1e-7);
        for _ in 0..40 {
            let Some(r) = residual(&x, tracker) else {
                break;
            };
            if r.abs() <= tol {
                return x;
            }
            let mut grad = vec![T::zero(); x.len()];
            for i in 0..x.len() {
                let mut hi = x.clone();
                let mut lo = x.clone();
                hi[i] += eps;
                lo[i] -= eps;
                match (self.pe_at(&hi, tracker), self.pe_at(&lo, tracker)) {
                    (Some(a), Some(b)) => grad[i] = (a - b) / (T::two() * eps),
                    _ => return u,
                }
            }
            let g2: T = grad.iter().map(|g| *g * *g).sum();
            if g2.partial_cmp(&T::zero()) != Some(Ordering::Greater) {
                break;
            }
            for (xi, gi) in x.iter_mut().zip(&grad) {
                *xi -= r * *gi / g2;
            }
        }
        match residual(&x, tracker) {
            Some(r) if r.abs() <= tol => x,
            _ => u,
        }
    }
}

fn check_targets<T: Real>(targets: &[T], s: T) -> Result<()> {
    let lo = pe_min(s);
    let slack = T::tol(1e-12);
    for &t in targets {
        if t.is_nan() || t < lo - slack || t > T::half() + slack {
            return Err(Error::InfeasibleTarget {
                pe: t.to_f64_lossy(),
                lo: lo.to_f64_lossy(),
                hi: 0.5,
            });
        }
    }
    Ok(())
}

fn check_open_overlap<T: Real>(s: T) -> Result<()> {
    if s > T::zero() && s < T::one() {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            field: "overlap",
            value: s.to_f64_lossy(),
            lo: 0.0,
            hi: 1.0,
        })
    }
}

fn check_search_dim_e(dim_e: usize) -> Result<()> {
    if (2..=MAX_DIM_E).contains(&dim_e) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            field: "dim_e",
            value: dim_e as f64,
            lo: 2.0,
            hi: MAX_DIM_E as f64,
        })
    }
}

fn frontier_point<T: Real>(
    target: T,
    found: &Found<T>,
    s: T,
    source: Source<T>,
) -> Result<FrontierPoint<T>> {
    let d_frontier = frontier_d(found.pe, s)?;
    Ok(FrontierPoint {
        pe_target: target,
        pe: found.pe,
        d_frontier,
        d_achieved: found.d,
        gap: found.d - d_frontier,
        feasible: found.feasible,
        source,
        d_negative_half: None,
    })
}

fn assemble<T: Real>(
    s: T,
    method: Method,
    budget: &SearchBudget,
    mut points: Vec<FrontierPoint<T>>,
    trackers: Vec<Tracker<T>>,
) -> FrontierCurve<T> {
    let mut tracker = Tracker::new();
    for t in trackers {
        tracker.merge(t);
    }
    points.sort_by(|a, b| a.pe.partial_cmp(&b.pe).unwrap_or(std::cmp::Ordering::Equal));
    FrontierCurve {
        s_overlap: s,
        method,
        budget: *budget,
        points,
        min_visited_gap: tracker.min_gap,
        violations: tracker.violations,
    }
}

fn fold_into<T: Real>(x: T, period: T) -> T {
    let r = x % period;
    let r = if r < T::zero() { r + period } else { r };
    if r >= period {
        T::zero()
    } else {
        r
    }
}

/// Triangle wave onto `[0, w]`.
fn triangle<T: Real>(x: T, w: T) -> T {
    let r = fold_into(x, T::two() * w);
    if r > w {
        T::two() * w - r
    } else {
        r
    }
}

struct FamilySurface<T> {
    s: T,
    negative_half: bool,
}

impl<T: Real> FamilySurface<T> {
    fn params(&self, u: &[T]) -> FamilyParams<T> {
        let h = T::FRAC_PI_2();
        let phi = triangle(u[1], h);
        FamilyParams {
            lambda: triangle(u[0], h),
            phi: if self.negative_half { h + phi } else { phi },
            theta: fold_into(u[2], T::PI()),
        }
    }
}

impl<T: Real> Surface<T> for FamilySurface<T> {
    fn eval(&self, u: &[T]) -> Option<(T, T)> {
        let p = closed_forms(&self.params(u), self.s).ok()?;
        Some((p.pe, p.d))
    }
}

fn box_start<T: Real>(n: usize, seed: u64, tags: &[u64]) -> Vec<T> {
    let mut rng = rng_from(seed, tags);
    (0..n)
        .map(|_| uniform(-T::PI(), T::PI(), &mut rng))
        .collect()
}

/// Minimizes the closed-form disturbance over `(λ, φ, θ)` at each target
/// error probability, separately on the `sin 2φ ≥ 0` and `sin 2φ < 0`
/// half-spaces. Reported points come from the nonnegative half-space.
pub fn family_frontier<T: Real>(
    s_overlap: T,
    pe_targets: &[T],
    budget: &SearchBudget,
) -> Result<FrontierCurve<T>> {
    check_open_overlap(s_overlap)?;
    budget.validate()?;
    check_targets(pe_targets, s_overlap)?;
    let results: Vec<Result<(FrontierPoint<T>, Tracker<T>)>> = pe_targets
        .par_iter()
        .enumerate()
        .map(|(i, &target)| {
            let mut halves = [false, true].map(|negative_half| {
                let surface = FamilySurface {
                    s: s_overlap,
                    negative_half,
                };
                let search = Search {
                    surface: &surface,
                    s: s_overlap,
                    target,
                    budget,
                    step: T::half(),
                };
                let tag = negative_half as u64;
                search
                    .run(|r| box_start(3, budget.seed, &[TAG_FAMILY, i as u64, tag, r as u64]))
                    .map(|f| (surface.params(&f.u), f))
            });
            let (params, found) = halves[0].take().ok_or(Error::InfeasibleTarget {
                pe: target.to_f64_lossy(),
                lo: pe_min(s_overlap).to_f64_lossy(),
                hi: 0.5,
            })?;
            let mut point = frontier_point(target, &found, s_overlap, Source::ClosedForm(params))?;
            let mut tracker = found.tracker;
            if let Some((_, neg)) = halves[1].take() {
                if neg.feasible {
                    point.d_negative_half = Some(neg.d);
                }
                tracker.merge(neg.tracker);
            }
            Ok((point, tracker))
        })
        .collect();
    let (points, trackers) = results
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    Ok(assemble(
        s_overlap,
        Method::Family,
        budget,
        points,
        trackers,
    ))
}

struct IsometrySurface<T> {
    pair: StatePair<T>,
    dim_e: usize,
}

impl<T: Real> Surface<T> for IsometrySurface<T> {
    fn eval(&self, u: &[T]) -> Option<(T, T)> {
        isometry_tradeoff(&self.pair, u, self.dim_e).ok()
    }
}

/// `(P_e, D)` for the interaction generated by `params`: Helstrom error on
/// Eve's marginals (equal priors) and Bob's disturbance.
pub fn isometry_tradeoff<T: Real>(
    pair: &StatePair<T>,
    params: &[T],
    dim_e: usize,
) -> Result<(T, T)> {
    let v = isometry_from_generator(params, dim_e)?;
    let post = evolve(pair, &v)?;
    let pe = helstrom_error(&post.rho_e[0], &post.rho_e[1], T::half())?;
    Ok((pe, disturbance(pair, &post)?))
}

fn isometry_start<T: Real>(k: usize, seed: u64, tags: &[u64], restart: usize) -> Vec<T> {
    if restart == 0 {
        vec![T::zero(); k]
    } else {
        let mut all = tags.to_vec();
        all.push(restart as u64);
        box_start(k, seed, &all)
    }
}

/// Minimizes the disturbance over generator parameters `[−π, π]^k` at each
/// target error probability. Restart 0 starts from the zero generator.
pub fn isometry_frontier<T: Real>(
    s_overlap: T,
    pe_targets: &[T],
    dim_e: usize,
    budget: &SearchBudget,
) -> Result<FrontierCurve<T>> {
    check_open_overlap(s_overlap)?;
    check_search_dim_e(dim_e)?;
    budget.validate()?;
    check_targets(pe_targets, s_overlap)?;
    let surface = IsometrySurface {
        pair: pair_from_overlap(s_overlap)?,
        dim_e,
    };
    let k = generator_len(dim_e);
    let results: Vec<Result<(FrontierPoint<T>, Tracker<T>)>> = pe_targets
        .par_iter()
        .enumerate()
        .map(|(i, &target)| {
            let search = Search {
                surface: &surface,
                s: s_overlap,
                target,
                budget,
                step: T::half(),
            };
            let tags = [TAG_ISOMETRY, dim_e as u64, i as u64];
            let found = search
                .run(|r| isometry_start(k, budget.seed, &tags, r))
                .ok_or(Error::NumericalInconsistency {
                    what: "isometry search produced no finite objective",
                    value: target.to_f64_lossy(),
                })?;
            let source = Source::Isometry {
                dim_e,
                params: found.u.clone(),
            };
            let point = frontier_point(target, &found, s_overlap, source)?;
            Ok((point, found.tracker))
        })
        .collect();
    let (points, trackers) = results
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    Ok(assemble(
        s_overlap,
        Method::Isometry { dim_e },
        budget,
        points,
        trackers,
    ))
}

/// Outcome of the zero-disturbance information search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroDisturbanceReport<T> {
    pub s_overlap: T,
    pub dim_e: usize,
    pub budget: SearchBudget,
    /// Smallest error probability found with `d ≤ 1e-9`.
    pub best_pe: T,
    pub d: T,
    pub params: Vec<T>,
    /// Largest error probability the frontier allows at `d = 1e-9`, i.e. the
    /// best any interaction can do under the same cap.
    pub frontier_bound_pe: T,
}

/// Minimizes Eve's error probability subject to `D ≤ 1e-9`.
pub fn zero_disturbance_max_info<T: Real>(
    s_overlap: T,
    dim_e: usize,
    budget: &SearchBudget,
) -> Result<ZeroDisturbanceReport<T>> {
    if !(s_overlap >= T::zero() && s_overlap < T::one()) {
        return Err(Error::OutOfRange {
            field: "overlap",
            value: s_overlap.to_f64_lossy(),
            lo: 0.0,
            hi: 1.0,
        });
    }
    check_search_dim_e(dim_e)?;
    budget.validate()?;
    let pair = pair_from_overlap(s_overlap)?;
    let k = generator_len(dim_e);
    let cap = T::lit(ZERO_DISTURBANCE_CAP);
    let tags = [TAG_ZERO, dim_e as u64];
    let runs: Vec<Option<Feasible<T>>> = (0..budget.restarts)
        .into_par_iter()
        .map(|r| {
            let probe = ZeroProbe {
                pair: &pair,
                dim_e,
                cap,
                best: RefCell::new(None),
            };
            probe.run(&isometry_start(k, budget.seed, &tags, r), budget);
            probe.best.into_inner()
        })
        .collect();
    let best = runs
        .into_iter()
        .flatten()
        .fold(None, |best: Option<Feasible<T>>, cand| match best {
            Some(b) if cand.pe.partial_cmp(&b.pe) != Some(Ordering::Less) => Some(b),
            _ => Some(cand),
        })
        .expect("the zero generator is always feasible");
    Ok(ZeroDisturbanceReport {
        s_overlap,
        dim_e,
        budget: *budget,
        best_pe: best.pe,
        d: best.d,
        params: best.u,
        frontier_bound_pe: frontier_pe_at(cap, s_overlap)?,
    })
}

#[derive(Debug, Clone)]
struct Feasible<T> {
    u: Vec<T>,
    pe: T,
    d: T,
}

/// One restart of the zero-disturbance search. Every evaluated point with
/// `D ≤ cap` is a candidate; the best one seen is kept.
struct ZeroProbe<'a, T> {
    pair: &'a StatePair<T>,
    dim_e: usize,
    cap: T,
    best: RefCell<Option<Feasible<T>>>,
}

impl<T: Real> ZeroProbe<'_, T> {
    fn eval(&self, u: &[T]) -> Option<(T, T)> {
        let (pe, d) = isometry_tradeoff(self.pair, u, self.dim_e).ok()?;
        if d <= self.cap {
            let mut best = self.best.borrow_mut();
            if best.as_ref().is_none_or(|b| pe < b.pe) {
                *best = Some(Feasible {
                    u: u.to_vec(),
                    pe,
                    d,
                });
            }
        }
        Some((pe, d))
    }

    fn objective(&self, u: &[T], weight: T) -> T {
        match self.eval(u) {
            Some((pe, d)) => {
                let excess = (d - self.cap).max(T::zero());
                pe + weight * excess * excess
            }
            None => T::infinity(),
        }
    }

    /// Penalty search at the base weight, refinement at escalating weights,
    /// then a secant projection onto `D = cap` along the last descent.
    fn run(&self, start: &[T], budget: &SearchBudget) {
        let tol = T::lit(budget.tolerance);
        let nm = NelderMead::new(budget.iterations, tol, T::half());
        let base = T::lit(ZERO_DISTURBANCE_WEIGHT);
        let run = nm.minimize(|x| self.objective(x, base), start);
        let mut u = run.x;
        let mut dir = run.last_descent;
        let fine = NelderMead::new(budget.iterations, tol, T::lit(0.1));
        for w in ZERO_POLISH_WEIGHTS {
            match self.eval(&u) {
                Some((_, d)) if d > self.cap => {}
                _ => break,
            }
            let w = T::lit(w);
            let r = fine.minimize(|x| self.objective(x, w), &u);
            u = r.x;
            if r.last_descent.iter().any(|v| *v != T::zero()) {
                dir = r.last_descent;
            }
        }
        let Some((_, d)) = self.eval(&u) else { return };
        if d <= self.cap {
            return;
        }
        let along = |t: T| -> Vec<T> { u.iter().zip(&dir).map(|(a, b)| *a - t * *b).collect() };
        let mut h = |t: T| self.eval(&along(t)).map_or(T::nan(), |(_, d)| d - self.cap);
        let projected = dir.iter().any(|v| *v != T::zero())
            && secant(&mut h, T::zero(), T::one(), self.cap * T::lit(1e-3), 60).is_some();
        if !projected {
            self.shrink(&u);
        }
    }

    /// Bisection on the scale of `u` toward the zero generator, which has
    /// `D = 0`.
    fn shrink(&self, u: &[T]) {
        let scaled = |t: T| -> Vec<T> { u.iter().map(|v| *v * t).collect() };
        let (mut lo, mut hi) = (T::zero(), T::one());
        for _ in 0..60 {
            let mid = T::half() * (lo + hi);
            match self.eval(&scaled(mid)) {
                Some((_, d)) if d <= self.cap => lo = mid,
                _ => hi = mid,
            }
        }
        self.eval(&scaled(lo));
    }
}

/// A rectangular lattice of family parameters, traversed with `λ` outermost
/// and `θ` innermost.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyLattice<T> {
    pub lambdas: Vec<T>,
    pub phis: Vec<T>,
    pub thetas: Vec<T>,
}

impl<T: Real> FamilyLattice<T> {
    /// `n` points per axis over `λ ∈ [0, π/2]`, `φ ∈ [0, π]` (both ends
    /// included) and `θ ∈ [0, π)`.
    pub fn canonical(n: usize) -> Self {
        let closed = |hi: T| -> Vec<T> {
            match n {
                0 => vec![],
                1 => vec![T::zero()],
                _ => (0..n)
                    .map(|k| hi * T::lit(k as f64) / T::lit((n - 1) as f64))
                    .collect(),
            }
        };
        Self {
            lambdas: closed(T::FRAC_PI_2()),
            phis: closed(T::PI()),
            thetas: (0..n)
                .map(|k| T::PI() * T::lit(k as f64) / T::lit(n as f64))
                .collect(),
        }
    }

    pub fn single(p: FamilyParams<T>) -> Self {
        Self {
            lambdas: vec![p.lambda],
            phis: vec![p.phi],
            thetas: vec![p.theta],
        }
    }

    pub fn len(&self) -> usize {
        self.lambdas.len() * self.phis.len() * self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (T, T, T)> + '_ {
        self.lambdas.iter().flat_map(move |&l| {
            self.phis
                .iter()
                .flat_map(move |&p| self.thetas.iter().map(move |&t| (l, p, t)))
        })
    }
}

/// The closed forms at every lattice point, in lattice order.
pub fn sweep<T: Real>(s_overlap: T, lattice: &FamilyLattice<T>) -> Result<Vec<TradeoffPoint<T>>> {
    lattice
        .iter()
        .map(|(l, p, t)| closed_forms(&FamilyParams::new(l, p, t)?, s_overlap))
        .collect()
}

/// Evenly spaced error probabilities from `pe_min(S)` to `½`, inclusive.
pub fn pe_grid<T: Real>(s_overlap: T, n: usize) -> Vec<T> {
    let lo = pe_min(s_overlap);
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (T::half() - lo) * T::lit(k as f64) / T::lit((n - 1) as f64))
            .collect(),
    }
}
