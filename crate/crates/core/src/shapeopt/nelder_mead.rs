//! Plain Nelder-Mead simplex search with an evaluation budget. Infeasible
//! trial points are expected to carry `f = +inf`; the simplex routine needs
//! no other constraint handling.

/// Standard reflection/expansion/contraction/shrink coefficients.
const ALPHA: f64 = 1.0;
const GAMMA: f64 = 2.0;
const RHO: f64 = 0.5;
const SIGMA: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    /// Maximum number of objective evaluations, initial simplex included.
    pub budget: usize,
    /// Terminate once the simplex max-norm diameter drops below this.
    pub diameter_tol: f64,
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub best_x: Vec<f64>,
    pub best_f: f64,
    pub evaluations: usize,
    /// True when the diameter criterion stopped the search.
    pub converged: bool,
}

struct Vertex {
    x: Vec<f64>,
    f: f64,
    /// Creation order; breaks ties deterministically.
    order: usize,
}

/// Minimizes `f` from `x0` with per-coordinate initial steps.
pub fn nelder_mead(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    init_steps: &[f64],
    opts: &NelderMeadOptions,
) -> NelderMeadResult {
    let dim = x0.len();
    assert!(dim >= 1, "need at least one coordinate");
    assert_eq!(init_steps.len(), dim);
    assert!(opts.budget >= dim + 1, "budget below initial simplex size");

    let mut evals = 0usize;
    let mut order = 0usize;
    let mut best_x = x0.to_vec();
    let mut best_f = f64::INFINITY;

    let mut eval = |x: &[f64], evals: &mut usize, best_x: &mut Vec<f64>, best_f: &mut f64| {
        *evals += 1;
        let v = f(x);
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if v < *best_f {
            *best_f = v;
            *best_x = x.to_vec();
        }
        v
    };

    let mut simplex: Vec<Vertex> = Vec::with_capacity(dim + 1);
    let fx0 = eval(x0, &mut evals, &mut best_x, &mut best_f);
    simplex.push(Vertex {
        x: x0.to_vec(),
        f: fx0,
        order,
    });
    for i in 0..dim {
        if evals >= opts.budget {
            break;
        }
        let mut x = x0.to_vec();
        x[i] += init_steps[i];
        order += 1;
        let fx = eval(&x, &mut evals, &mut best_x, &mut best_f);
        simplex.push(Vertex { x, f: fx, order });
    }

    let mut converged = false;
    while evals < opts.budget && simplex.len() == dim + 1 {
        simplex.sort_by(|a, b| a.f.total_cmp(&b.f).then(a.order.cmp(&b.order)));
        if diameter(&simplex) < opts.diameter_tol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|v| v.x[k]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].x.clone();
        let f_best = simplex[0].f;
        let f_second_worst = simplex[dim - 1].f;
        let f_worst = simplex[dim].f;

        let combine = |t: f64| -> Vec<f64> {
            (0..dim)
                .map(|k| centroid[k] + t * (centroid[k] - worst[k]))
                .collect()
        };

        let xr = combine(ALPHA);
        let fr = eval(&xr, &mut evals, &mut best_x, &mut best_f);

        if fr < f_best && evals < opts.budget {
            let xe = combine(GAMMA);
            let fe = eval(&xe, &mut evals, &mut best_x, &mut best_f);
            order += 1;
            if fe < fr {
                simplex[dim] = Vertex { x: xe, f: fe, order };
            } else {
                simplex[dim] = Vertex { x: xr, f: fr, order };
            }
            continue;
        }
        if fr < f_second_worst {
            order += 1;
            simplex[dim] = Vertex { x: xr, f: fr, order };
            continue;
        }
        if evals >= opts.budget {
            break;
        }
        // Contraction, outside or inside of the reflected point.
        let (xc, fc) = if fr < f_worst {
            let xc = combine(RHO);
            let fc = eval(&xc, &mut evals, &mut best_x, &mut best_f);
            (xc, fc)
        } else {
            let xc = combine(-RHO);
            let fc = eval(&xc, &mut evals, &mut best_x, &mut best_f);
            (xc, fc)
        };
        if fc < fr.min(f_worst) {
            order += 1;
            simplex[dim] = Vertex { x: xc, f: fc, order };
            continue;
        }
        // Shrink toward the best vertex.
        let anchor = simplex[0].x.clone();
        for v in simplex.iter_mut().skip(1) {
            if evals >= opts.budget {
                break;
            }
            for k in 0..dim {
                v.x[k] = anchor[k] + SIGMA * (v.x[k] - anchor[k]);
            }
            order += 1;
            v.order = order;
            v.f = eval(&v.x, &mut evals, &mut best_x, &mut best_f);
        }
    }

    NelderMeadResult {
        best_x,
        best_f,
        evaluations: evals,
        converged,
    }
}

fn diameter(simplex: &[Vertex]) -> f64 {
    let mut d = 0.0f64;
    for i in 0..simplex.len() {
        for j in i + 1..simplex.len() {
            let gap = simplex[i]
                .x
                .iter()
                .zip(&simplex[j].x)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            d = d.max(gap);
        }
    }
    d
}
