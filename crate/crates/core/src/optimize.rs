//! Derivative-free minimization: adaptive Nelder–Mead with in-budget simplex
//! re-initialization, plus a one-dimensional secant root finder used by the
//! feasibility polish.

use rayon::prelude::*;

use crate::scalar::Real;

/// Nelder–Mead settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead<T> {
    /// Iteration budget (shared across re-initializations).
    pub max_iterations: usize,
    /// Converged once `f_worst − f_best` falls below this.
    pub tolerance: T,
    /// Edge length of the initial (and re-initialized) simplex.
    pub initial_step: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult<T> {
    pub x: Vec<T>,
    pub f: T,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Best objective value after each iteration; nonincreasing.
    pub history: Vec<T>,
    /// Difference between the final best vertex and the best vertex it
    /// replaced (zero if the start was never improved on).
    pub last_descent: Vec<T>,
}

fn sanitize<T: Real>(v: T) -> T {
    if v.is_nan() {
        T::infinity()
    } else {
        v
    }
}

impl<T: Real> NelderMead<T> {
    pub fn new(max_iterations: usize, tolerance: T, initial_step: T) -> Self {
        Self {
            max_iterations,
            tolerance,
            initial_step,
        }
    }

    /// Minimizes `f` from `x0`. After each convergence the simplex is rebuilt
    /// around the best vertex while budget remains; the run stops when a
    /// rebuilt simplex brings no improvement.
    pub fn minimize<F: FnMut(&[T]) -> T>(&self, mut f: F, x0: &[T]) -> NelderMeadResult<T> {
        let n = x0.len();
        let mut evaluations = 0usize;
        let mut eval = |x: &[T]| {
            evaluations += 1;
            sanitize(f(x))
        };
        let mut best_x = x0.to_vec();
        let mut best_f = eval(&best_x);
        let mut history = Vec::new();
        let mut iterations = 0usize;
        let mut converged = false;
        let mut last_descent = vec![T::zero(); n];
        if n == 0 {
            return NelderMeadResult {
                x: best_x,
                f: best_f,
                iterations,
                evaluations,
                converged: true,
                history,
                last_descent,
            };
        }

        let nf = T::lit(n as f64);
        let alpha = T::one();
        let expand = T::one() + T::two() / nf;
        let contract = T::lit(0.75) - T::half() / nf;
        let shrink = T::one() - T::one() / nf;

        while iterations < self.max_iterations {
            let start_f = best_f;
            let mut xs: Vec<Vec<T>> = Vec::with_capacity(n + 1);
            let mut fs: Vec<T> = Vec::with_capacity(n + 1);
            xs.push(best_x.clone());
            fs.push(best_f);
            for i in 0..n {
                let mut x = best_x.clone();
                x[i] += self.initial_step;
                fs.push(eval(&x));
                xs.push(x);
            }
            let mut sum = vec![T::zero(); n];
            let recompute_sum = |xs: &Vec<Vec<T>>, sum: &mut Vec<T>| {
                sum.iter_mut().for_each(|s| *s = T::zero());
                for x in xs {
                    for (s, v) in sum.iter_mut().zip(x) {
                        *s += *v;
                    }
                }
            };
            recompute_sum(&xs, &mut sum);
            let mut since_recompute = 0usize;
            let mut prev_best = best_x.clone();
            converged = false;

            while iterations < self.max_iterations {
                let (mut lo, mut hi) = (0, 0);
                for i in 1..=n {
                    if fs[i] < fs[lo] {
                        lo = i;
                    }
                    if fs[i] > fs[hi] {
                        hi = i;
                    }
                }
                let mut second = if hi == 0 { 1 } else { 0 };
                for i in 0..=n {
                    if i != hi && fs[i] > fs[second] {
                        second = i;
                    }
                }
                if xs[lo] != prev_best {
                    last_descent = xs[lo]
                        .iter()
                        .zip(&prev_best)
                        .map(|(a, b)| *a - *b)
                        .collect();
                    prev_best = xs[lo].clone();
                }
                history.push(fs[lo]);
                iterations += 1;
                if fs[hi] - fs[lo] <= self.tolerance {
                    converged = true;
                    break;
                }
                let centroid: Vec<T> = sum
                    .iter()
                    .zip(&xs[hi])
                    .map(|(s, w)| (*s - *w) / nf)
                    .collect();
                let along = |t: T| -> Vec<T> {
                    centroid
                        .iter()
                        .zip(&xs[hi])
                        .map(|(c, w)| *c + t * (*c - *w))
                        .collect()
                };
                let xr = along(alpha);
                let fr = eval(&xr);
                let mut replacement = None;
                if fr < fs[lo] {
                    let xe = along(alpha * expand);
                    let fe = eval(&xe);
                    replacement = Some(if fe < fr { (xe, fe) } else { (xr, fr) });
                } else if fr < fs[second] {
                    replacement = Some((xr, fr));
                } else {
                    let (xc, fc) = if fr < fs[hi] {
                        let xc = along(alpha * contract);
                        let fc = eval(&xc);
                        (xc, fc)
                    } else {
                        let xc = along(-contract);
                        let fc = eval(&xc);
                        (xc, fc)
                    };
                    if fc < fs[hi].min(fr) {
                        replacement = Some((xc, fc));
                    }
                }
                match replacement {
                    Some((x, fx)) => {
                        for ((s, new), old) in sum.iter_mut().zip(&x).zip(&xs[hi]) {
                            *s += *new - *old;
                        }
                        xs[hi] = x;
                        fs[hi] = fx;
                        since_recompute += 1;
                        if since_recompute >= n.max(16) {
                            recompute_sum(&xs, &mut sum);
                            since_recompute = 0;
                        }
                    }
                    None => {
                        let anchor = xs[lo].clone();
                        for i in 0..=n {
                            if i == lo {
                                continue;
                            }
                            let x: Vec<T> = anchor
                                .iter()
                                .zip(&xs[i])
                                .map(|(a, v)| *a + shrink * (*v - *a))
                                .collect();
                            fs[i] = eval(&x);
                            xs[i] = x;
                        }
                        recompute_sum(&xs, &mut sum);
                        since_recompute = 0;
                    }
                }
            }

            let lo = (0..=n).fold(0, |b, i| if fs[i] < fs[b] { i } else { b });
            if fs[lo] < best_f {
                if xs[lo] != prev_best {
                    last_descent = xs[lo]
                        .iter()
                        .zip(&prev_best)
                        .map(|(a, b)| *a - *b)
                        .collect();
                }
                best_f = fs[lo];
                best_x = xs[lo].clone();
            }
            if !converged || start_f - best_f <= self.tolerance {
                break;
            }
        }

        NelderMeadResult {
            x: best_x,
            f: best_f,
            iterations,
            evaluations,
            converged,
            history,
            last_descent,
        }
    }
}

/// Runs `restarts` independent minimizations in parallel, restart `r`
/// starting from `start(r)`, and returns the index and result of the best.
/// Ties go to the lower restart index, so the outcome does not depend on
/// scheduling.
pub fn multistart<T, S, F>(
    nm: &NelderMead<T>,
    restarts: usize,
    start: S,
    objective: F,
) -> Option<(usize, NelderMeadResult<T>)>
where
    T: Real,
    S: Fn(usize) -> Vec<T> + Sync,
    F: Fn(usize, &[T]) -> T + Sync,
{
    let runs: Vec<NelderMeadResult<T>> = (0..restarts)
        .into_par_iter()
        .map(|r| nm.minimize(|x| objective(r, x), &start(r)))
        .collect();
    runs.into_iter()
        .enumerate()
        .fold(None, |best, (i, run)| match best {
            Some((j, b)) if sanitize(run.f) >= sanitize(b.f) => Some((j, b)),
            _ => Some((i, run)),
        })
}

/// Finds `t` with `g(t) = 0` by the secant method from `t0`, `t1`. Returns
/// `None` if `|g|` does not drop below `tol` within `max_steps`.
pub fn secant<T: Real>(
    mut g: impl FnMut(T) -> T,
    t0: T,
    t1: T,
    tol: T,
    max_steps: usize,
) -> Option<T> {
    let (mut a, mut b) = (t0, t1);
    let (mut ga, mut gb) = (g(a), g(b));
    for _ in 0..max_steps {
        if gb.abs() <= tol {
            return Some(b);
        }
        let denom = gb - ga;
        if denom == T::zero() || !denom.is_finite() {
            return None;
        }
        let c = b - gb * (b - a) / denom;
        if !c.is_finite() {
            return None;
        }
        a = b;
        ga = gb;
        b = c;
        gb = g(b);
    }
    (gb.abs() <= tol).then_some(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        x.windows(2)
            .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
            .sum()
    }

    #[test]
    fn quadratic_bowl() {
        let nm = NelderMead::new(5000, 1e-14, 0.5);
        let r = nm.minimize(
            |x| {
                x.iter()
                    .enumerate()
                    .map(|(i, v)| (v - i as f64).powi(2))
                    .sum()
            },
            &[3.0; 6],
        );
        for (i, v) in r.x.iter().enumerate() {
            assert!((v - i as f64).abs() < 1e-5, "{:?}", r.x);
        }
        assert!(r.converged);
    }

    #[test]
    fn rosenbrock_2d() {
        let nm = NelderMead::new(5000, 1e-16, 0.5);
        let r = nm.minimize(rosenbrock, &[-1.2, 1.0]);
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn history_is_nonincreasing_and_budget_respected() {
        let nm = NelderMead::new(300, 1e-16, 0.3);
        let r = nm.minimize(rosenbrock, &[0.0; 5]);
        assert!(r.iterations <= 300);
        assert_eq!(r.history.len(), r.iterations);
        assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
        assert!(r.f <= rosenbrock(&[0.0; 5]));
    }

    #[test]
    fn nan_is_treated_as_worse() {
        let nm = NelderMead::new(500, 1e-12, 0.5);
        let r = nm.minimize(
            |x| {
                if x[0] < 0.0 {
                    f64::NAN
                } else {
                    (x[0] - 1.0).powi(2)
                }
            },
            &[0.5],
        );
        assert!((r.x[0] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn multistart_picks_global_basin_deterministically() {
        let f = |_: usize, x: &[f64]| (x[0] * x[0] - 4.0).powi(2) + 0.1 * x[0];
        let nm = NelderMead::new(500, 1e-14, 0.1);
        let starts = |r: usize| vec![if r.is_multiple_of(2) { 3.0 } else { -3.0 }];
        let (i, r) = multistart(&nm, 6, starts, f).unwrap();
        assert_eq!(i, 1);
        assert!(r.x[0] < 0.0);
        let (j, r2) = multistart(&nm, 6, starts, f).unwrap();
        assert_eq!((i, r.x.clone()), (j, r2.x));
        assert!(multistart(&nm, 0, starts, f).is_none());
    }

    #[test]
    fn secant_finds_root() {
        let t = secant(|t: f64| t * t - 2.0, 1.0, 2.0, 1e-14, 50).unwrap();
        assert!((t - 2f64.sqrt()).abs() < 1e-12);
        assert!(secant(|_t: f64| 1.0, 0.0, 1.0, 1e-12, 10).is_none());
    }
}
