//! Derivative-free maximizer used to polish grid optima.

#[derive(Debug, Clone, Copy)]
pub(crate) struct Polished<const D: usize> {
    pub point: [f64; D],
    pub value: f64,
}

/// Maximizes `f` starting from `start` with an axis-aligned initial simplex
/// of edge `scale`. Stops when the simplex diameter falls below `xtol`
/// (or after `max_evals`). `-∞` is treated as an infeasible point.
pub(crate) fn maximize<const D: usize>(
    mut f: impl FnMut(&[f64; D]) -> f64,
    start: [f64; D],
    scale: f64,
    xtol: f64,
    max_evals: usize,
) -> Polished<D> {
    let mut evals = 0usize;
    let mut eval = |x: &[f64; D], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<([f64; D], f64)> = Vec::with_capacity(D + 1);
    simplex.push((start, eval(&start, &mut evals)));
    for axis in 0..D {
        let mut p = start;
        p[axis] += scale;
        let mut v = eval(&p, &mut evals);
        if v == f64::NEG_INFINITY {
            p[axis] = start[axis] - scale;
            v = eval(&p, &mut evals);
        }
        simplex.push((p, v));
    }

    while evals < max_evals {
        // Descending by value: best first.
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        let diameter = simplex
            .iter()
            .skip(1)
            .map(|(p, _)| {
                p.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diameter < xtol {
            break;
        }
        let mut centroid = [0.0; D];
        for (p, _) in &simplex[..D] {
            centroid
                .iter_mut()
                .zip(p)
                .for_each(|(c, x)| *c += x / D as f64);
        }
        let worst = simplex[D];
        let along = |t: f64| {
            let mut q = [0.0; D];
            for i in 0..D {
                q[i] = centroid[i] + t * (worst.0[i] - centroid[i]);
            }
            q
        };
        let reflected = along(-1.0);
        let fr = eval(&reflected, &mut evals);
        if fr > simplex[0].1 {
            let expanded = along(-2.0);
            let fe = eval(&expanded, &mut evals);
            simplex[D] = if fe > fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr > simplex[D - 1].1 {
            simplex[D] = (reflected, fr);
            continue;
        }
        let outside = fr > worst.1;
        let contracted = along(if outside { -0.5 } else { 0.5 });
        let fc = eval(&contracted, &mut evals);
        let accept = if outside { fc >= fr } else { fc > worst.1 };
        if accept {
            simplex[D] = (contracted, fc);
            continue;
        }
        // Shrink toward the best vertex.
        let best = simplex[0].0;
        for vertex in simplex.iter_mut().skip(1) {
            for i in 0..D {
                vertex.0[i] = best[i] + 0.5 * (vertex.0[i] - best[i]);
            }
            vertex.1 = eval(&vertex.0, &mut evals);
        }
    }
    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    Polished {
        point: simplex[0].0,
        value: simplex[0].1,
    }
}
