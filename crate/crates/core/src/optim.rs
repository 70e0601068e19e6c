//! Small deterministic maximizers used by the strategy and cloning searches.

/// Location and value of a maximum found by one of the searches below.
#[derive(Debug, Clone, PartialEq)]
pub struct Maximum<X> {
    pub x: X,
    pub value: f64,
    pub evaluations: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`,
/// stopping once the bracket is narrower than `tol`.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Maximum<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evaluations = 2;
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
        evaluations += 1;
    }
    let (x, value) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    Maximum {
        x,
        value,
        evaluations,
    }
}

/// Scans `grid + 1` evenly spaced points of `[lo, hi]`, then refines the
/// best cell with [`golden_section_max`]. Never returns a value below the
/// best scanned point, so the endpoints are always candidates.
pub fn bracketed_max<F>(mut f: F, lo: f64, hi: f64, grid: usize, tol: f64) -> Maximum<f64>
where
    F: FnMut(f64) -> f64,
{
    let grid = grid.max(2);
    if hi <= lo {
        return Maximum {
            x: lo,
            value: f(lo),
            evaluations: 1,
        };
    }
    let step = (hi - lo) / grid as f64;
    let point = |k: usize| if k == grid { hi } else { lo + step * k as f64 };
    let mut best = (0, f64::NEG_INFINITY);
    for k in 0..=grid {
        let v = f(point(k));
        if v > best.1 {
            best = (k, v);
        }
    }
    let (k, grid_value) = best;
    let refined = golden_section_max(
        &mut f,
        point(k.saturating_sub(1)),
        point((k + 1).min(grid)),
        tol,
    );
    let evaluations = grid + 1 + refined.evaluations;
    if refined.value > grid_value {
        Maximum {
            x: refined.x,
            value: refined.value,
            evaluations,
        }
    } else {
        Maximum {
            x: point(k),
            value: grid_value,
            evaluations,
        }
    }
}

/// Nelder–Mead simplex maximization from `start` with initial edge `step`.
///
/// Stops when the simplex values agree to `ftol` and its vertices to
/// `xtol`, or after `max_evals` evaluations.
pub fn nelder_mead_max<F>(
    mut f: F,
    start: &[f64],
    step: f64,
    ftol: f64,
    xtol: f64,
    max_evals: usize,
) -> Maximum<Vec<f64>>
where
    F: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        // minimize the negation
        -f(x)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), eval(start, &mut evals)));
    for i in 0..n {
        let mut x = start.to_vec();
        x[i] += step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }

    let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(ai, bi)| ai + t * (bi - ai)).collect()
    };

    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let spread = simplex
            .iter()
            .skip(1)
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if (worst - best).abs() <= ftol && spread <= xtol {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|d| simplex[..n].iter().map(|(x, _)| x[d]).sum::<f64>() / n as f64)
            .collect();
        let reflected = lerp(&centroid, &simplex[n].0, -1.0);
        let fr = eval(&reflected, &mut evals);
        if fr < simplex[0].1 {
            let expanded = lerp(&centroid, &simplex[n].0, -2.0);
            let fe = eval(&expanded, &mut evals);
            simplex[n] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let contracted = if fr < simplex[n].1 {
                lerp(&centroid, &reflected, 0.5)
            } else {
                lerp(&centroid, &simplex[n].0, 0.5)
            };
            let fc = eval(&contracted, &mut evals);
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (contracted, fc);
            } else {
                let anchor = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let x = lerp(&anchor, &vertex.0, 0.5);
                    let v = eval(&x, &mut evals);
                    *vertex = (x, v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, v) = simplex.swap_remove(0);
    Maximum {
        x,
        value: -v,
        evaluations: evals,
    }
}
