//! Derivative-free Nelder–Mead simplex minimizer with box bounds.
//!
//! Bounds are enforced by evaluating at the clamped point plus a quadratic
//! penalty on the excursion, which steers the simplex back into the box
//! without distorting the interior landscape.

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    pub max_iterations: usize,
    /// Relative spread of function values at which to stop.
    pub f_tolerance: f64,
    /// Simplex extent (fraction of the bound width) at which to stop.
    pub x_tolerance: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            max_iterations: 4000,
            f_tolerance: 1e-14,
            x_tolerance: 1e-11,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

fn clamp_to(x: &[f64], lo: &[f64], hi: &[f64]) -> (Vec<f64>, f64) {
    let mut clamped = Vec::with_capacity(x.len());
    let mut excursion = 0.0;
    for i in 0..x.len() {
        let c = x[i].clamp(lo[i], hi[i]);
        let width = (hi[i] - lo[i]).max(1e-300);
        let d = (x[i] - c) / width;
        excursion += d * d;
        clamped.push(c);
    }
    (clamped, excursion)
}

/// Minimize `f` inside `[lo, hi]` starting from `x0` with the given initial
/// step per axis. Axes with `lo == hi` are held fixed.
pub fn minimize<F>(
    f: F,
    x0: &[f64],
    init_step: &[f64],
    lo: &[f64],
    hi: &[f64],
    opts: &SimplexOptions,
) -> SimplexResult
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    assert!(n > 0 && init_step.len() == n && lo.len() == n && hi.len() == n);

    let free: Vec<usize> = (0..n).filter(|&i| hi[i] > lo[i]).collect();
    let mut evals = 0usize;
    let mut eval = |x: &[f64]| {
        evals += 1;
        let (c, excursion) = clamp_to(x, lo, hi);
        f(&c) + 1e6 * excursion
    };

    if free.is_empty() {
        let fx = eval(x0);
        return SimplexResult {
            x: x0.to_vec(),
            fx,
            iterations: 0,
            evaluations: evals,
            converged: true,
        };
    }

    let m = free.len();
    // Simplex of m+1 points in the free subspace, embedded in full vectors.
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    pts.push(x0.to_vec());
    for &axis in &free {
        let mut p = x0.to_vec();
        let step = if init_step[axis] != 0.0 {
            init_step[axis]
        } else {
            0.05 * (hi[axis] - lo[axis])
        };
        p[axis] = if p[axis] + step <= hi[axis] {
            p[axis] + step
        } else {
            p[axis] - step
        };
        pts.push(p);
    }
    let mut fs: Vec<f64> = pts.iter().map(|p| eval(p)).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iterations = 0usize;
    let mut converged = false;

    while iterations < opts.max_iterations {
        iterations += 1;

        // Order ascending by function value.
        let mut order: Vec<usize> = (0..=m).collect();
        order.sort_by(|&a, &b| fs[a].total_cmp(&fs[b]));
        let best = order[0];
        let worst = order[m];
        let second_worst = order[m - 1];

        // Convergence: value spread and simplex extent.
        let f_spread = (fs[worst] - fs[best]).abs();
        let f_scale = fs[best].abs().max(1.0);
        let mut x_extent = 0.0f64;
        for &axis in &free {
            let mut axis_min = f64::INFINITY;
            let mut axis_max = f64::NEG_INFINITY;
            for p in &pts {
                axis_min = axis_min.min(p[axis]);
                axis_max = axis_max.max(p[axis]);
            }
            x_extent = x_extent.max((axis_max - axis_min) / (hi[axis] - lo[axis]));
        }
        if f_spread <= opts.f_tolerance * f_scale && x_extent <= opts.x_tolerance {
            converged = true;
            break;
        }

        // Centroid of all but the worst, over free axes.
        let mut centroid = pts[best].clone();
        for &axis in &free {
            let mut acc = 0.0;
            for (k, p) in pts.iter().enumerate() {
                if k != worst {
                    acc += p[axis];
                }
            }
            centroid[axis] = acc / m as f64;
        }

        let blend = |from: &[f64], toward: &[f64], t: f64| -> Vec<f64> {
            let mut out = from.to_vec();
            for &axis in &free {
                out[axis] = from[axis] + t * (toward[axis] - from[axis]);
            }
            out
        };

        // Reflection.
        let reflected = blend(&centroid, &pts[worst], -alpha);
        let f_ref = eval(&reflected);

        if f_ref < fs[best] {
            // Expansion.
            let expanded = blend(&centroid, &pts[worst], -gamma);
            let f_exp = eval(&expanded);
            if f_exp < f_ref {
                pts[worst] = expanded;
                fs[worst] = f_exp;
            } else {
                pts[worst] = reflected;
                fs[worst] = f_ref;
            }
        } else if f_ref < fs[second_worst] {
            pts[worst] = reflected;
            fs[worst] = f_ref;
        } else {
            // Contraction (outside if the reflection improved on the worst).
            let contracted = if f_ref < fs[worst] {
                blend(&centroid, &reflected, rho)
            } else {
                blend(&centroid, &pts[worst], rho)
            };
            let f_con = eval(&contracted);
            if f_con < fs[worst].min(f_ref) {
                pts[worst] = contracted;
                fs[worst] = f_con;
            } else {
                // Shrink toward the best vertex.
                let anchor = pts[best].clone();
                for k in 0..=m {
                    if k == best {
                        continue;
                    }
                    pts[k] = blend(&anchor, &pts[k], sigma);
                    fs[k] = eval(&pts[k]);
                }
            }
        }
    }

    let mut best = 0;
    for k in 1..=m {
        if fs[k] < fs[best] {
            best = k;
        }
    }
    let (x, _) = clamp_to(&pts[best], lo, hi);
    SimplexResult {
        x,
        fx: fs[best],
        iterations,
        evaluations: evals,
        converged,
    }
}
