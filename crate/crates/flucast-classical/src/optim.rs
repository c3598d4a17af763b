//! A small Nelder-Mead simplex minimizer.
//!
//! Both classical fitters optimize low-dimensional, non-smooth-ish objectives
//! (sums of squares through recursive filters, sometimes with hard barriers),
//! which is exactly the regime this method is comfortable in. The objective
//! may return `f64::INFINITY` to mark infeasible points; the simplex reflects
//! away from them.

/// Standard simplex coefficients: reflection 1, expansion 2, contraction 0.5,
/// shrink 0.5.
#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub max_iters: usize,
    /// Relative tolerance on the objective spread across the simplex:
    /// converged when (worst - best) <= tol * (1 + |best|).
    pub tol: f64,
    /// Step used to build the initial simplex around the start point.
    pub init_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            max_iters: 2000,
            tol: 1e-8,
            init_step: 0.25,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn nelder_mead(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    opts: &NelderMeadOptions,
) -> NelderMeadResult {
    let dim = x0.len();
    assert!(dim > 0, "cannot optimize a zero-dimensional problem");

    // Initial simplex: start point plus one perturbed vertex per axis.
    let mut vertices: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    vertices.push(x0.to_vec());
    for i in 0..dim {
        let mut v = x0.to_vec();
        let step = if v[i].abs() > 1.0 {
            opts.init_step * v[i].abs()
        } else {
            opts.init_step
        };
        v[i] += step;
        vertices.push(v);
    }
    let mut fv: Vec<f64> = vertices.iter().map(|v| f(v)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iters {
        iterations += 1;

        // Order the simplex: best first.
        let mut idx: Vec<usize> = (0..=dim).collect();
        idx.sort_by(|&a, &b| fv[a].partial_cmp(&fv[b]).unwrap_or(std::cmp::Ordering::Equal));
        let reorder_v: Vec<Vec<f64>> = idx.iter().map(|&i| vertices[i].clone()).collect();
        let reorder_f: Vec<f64> = idx.iter().map(|&i| fv[i]).collect();
        vertices = reorder_v;
        fv = reorder_f;

        let best = fv[0];
        let worst = fv[dim];
        if worst.is_finite() && (worst - best) <= opts.tol * (1.0 + best.abs()) {
            converged = true;
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; dim];
        for v in vertices.iter().take(dim) {
            for (c, &vi) in centroid.iter_mut().zip(v.iter()) {
                *c += vi;
            }
        }
        for c in centroid.iter_mut() {
            *c /= dim as f64;
        }

        let lerp = |from: &[f64], to: &[f64], t: f64| -> Vec<f64> {
            from.iter()
                .zip(to.iter())
                .map(|(&a, &b)| a + t * (b - a))
                .collect()
        };

        // Reflect the worst vertex through the centroid.
        let reflected = lerp(&centroid, &vertices[dim], -1.0);
        let fr = f(&reflected);

        if fr < fv[0] {
            // Try expanding further in the same direction.
            let expanded = lerp(&centroid, &vertices[dim], -2.0);
            let fe = f(&expanded);
            if fe < fr {
                vertices[dim] = expanded;
                fv[dim] = fe;
            } else {
                vertices[dim] = reflected;
                fv[dim] = fr;
            }
        } else if fr < fv[dim - 1] {
            vertices[dim] = reflected;
            fv[dim] = fr;
        } else {
            // Contract toward the better of worst/reflected.
            let (towards, f_towards) = if fr < fv[dim] {
                (reflected.clone(), fr)
            } else {
                (vertices[dim].clone(), fv[dim])
            };
            let contracted = lerp(&centroid, &towards, 0.5);
            let fc = f(&contracted);
            if fc < f_towards {
                vertices[dim] = contracted;
                fv[dim] = fc;
            } else {
                // Shrink everything toward the best vertex.
                let best_v = vertices[0].clone();
                for i in 1..=dim {
                    vertices[i] = lerp(&best_v, &vertices[i], 0.5);
                    fv[i] = f(&vertices[i]);
                }
            }
        }
    }

    let mut best_i = 0;
    for i in 1..=dim {
        if fv[i] < fv[best_i] {
            best_i = i;
        }
    }
    NelderMeadResult {
        x: vertices[best_i].clone(),
        fx: fv[best_i],
        iterations,
        converged,
    }
}

/// Numerically stable logistic function, used to map unconstrained optimizer
/// coordinates into (0, 1) boxes.
pub fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// Inverse of [`sigmoid`] for interior starting points.
pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_a_quadratic_bowl() {
        let mut f = |x: &[f64]| (x[0] - 3.0).powi(2) + 2.0 * (x[1] + 1.0).powi(2) + 5.0;
        let r = nelder_mead(&mut f, &[0.0, 0.0], &NelderMeadOptions::default());
        assert!(r.converged);
        // The stop rule bounds the objective spread, so position accuracy is
        // on the order of sqrt(tol).
        assert!((r.x[0] - 3.0).abs() < 1e-3, "{:?}", r.x);
        assert!((r.x[1] + 1.0).abs() < 1e-3);
        assert!((r.fx - 5.0).abs() < 1e-6);
    }

    #[test]
    fn handles_rosenbrock() {
        let mut f = |x: &[f64]| {
            let a = 1.0 - x[0];
            let b = x[1] - x[0] * x[0];
            a * a + 100.0 * b * b
        };
        let r = nelder_mead(
            &mut f,
            &[-1.2, 1.0],
            &NelderMeadOptions {
                max_iters: 5000,
                ..Default::default()
            },
        );
        assert!((r.x[0] - 1.0).abs() < 1e-3, "{:?}", r.x);
        assert!((r.x[1] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn reflects_away_from_an_infinite_barrier() {
        // Feasible region x > 1; minimum at x = 2.
        let mut f = |x: &[f64]| {
            if x[0] <= 1.0 {
                f64::INFINITY
            } else {
                (x[0] - 2.0).powi(2)
            }
        };
        let r = nelder_mead(&mut f, &[1.5, ], &NelderMeadOptions::default());
        assert!(r.fx.is_finite());
        assert!((r.x[0] - 2.0).abs() < 1e-4);
    }

    #[test]
    fn sigmoid_and_logit_round_trip() {
        for &p in &[1e-6, 0.25, 0.5, 0.887, 1.0 - 1e-6] {
            assert!((sigmoid(logit(p)) - p).abs() < 1e-12);
        }
        assert_eq!(sigmoid(40.0), 1.0); // saturates cleanly at f64
        assert!(sigmoid(-40.0) > 0.0);
        assert!(sigmoid(-40.0) < 1e-15);
    }
}
