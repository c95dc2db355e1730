//! Derivative-free Nelder-Mead simplex minimization.

/// Result of a minimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Nelder-Mead with the standard coefficients (reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2). Stops when the simplex diameter (max-norm
/// distance of any vertex from the best one) drops below `x_tol`, or after
/// `max_evals` function evaluations.
#[derive(Debug, Clone)]
pub struct NelderMead {
    pub x_tol: f64,
    pub max_evals: usize,
    /// Initial edge length along each coordinate.
    pub steps: Vec<f64>,
}

impl NelderMead {
    pub fn new(dim: usize) -> Self {
        Self { x_tol: 1e-6, max_evals: 2000 * dim.max(1), steps: vec![0.1; dim] }
    }

    pub fn with_steps(mut self, steps: Vec<f64>) -> Self {
        self.steps = steps;
        self
    }

    pub fn minimize<F>(&self, mut f: F, x0: &[f64]) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        let dim = x0.len();
        let evals = std::cell::Cell::new(0usize);
        let mut eval = |x: &[f64]| {
            evals.set(evals.get() + 1);
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        if dim == 0 {
            let value = eval(x0);
            return Minimum { x: Vec::new(), value, evaluations: 1, converged: true };
        }

        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
        simplex.push(x0.to_vec());
        for i in 0..dim {
            let mut v = x0.to_vec();
            v[i] += self.steps.get(i).copied().unwrap_or(0.1);
            simplex.push(v);
        }
        let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();
        let mut converged = false;

        loop {
            let mut order: Vec<usize> = (0..=dim).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();

            let diameter = simplex[1..]
                .iter()
                .map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if diameter < self.x_tol {
                converged = true;
                break;
            }
            if evals.get() >= self.max_evals {
                break;
            }

            let mut centroid = vec![0.0; dim];
            for v in &simplex[..dim] {
                for (c, x) in centroid.iter_mut().zip(v) {
                    *c += x / dim as f64;
                }
            }
            let worst = simplex[dim].clone();
            let along = |t: f64| -> Vec<f64> {
                centroid.iter().zip(&worst).map(|(c, w)| c + t * (c - w)).collect()
            };

            let reflected = along(1.0);
            let fr = eval(&reflected);
            if fr < values[0] {
                let expanded = along(2.0);
                let fe = eval(&expanded);
                if fe < fr {
                    simplex[dim] = expanded;
                    values[dim] = fe;
                } else {
                    simplex[dim] = reflected;
                    values[dim] = fr;
                }
                continue;
            }
            if fr < values[dim - 1] {
                simplex[dim] = reflected;
                values[dim] = fr;
                continue;
            }
            let (contracted, fc) = if fr < values[dim] {
                let c = along(0.5);
                let fc = eval(&c);
                (c, fc)
            } else {
                let c = along(-0.5);
                let fc = eval(&c);
                (c, fc)
            };
            if fc < fr.min(values[dim]) {
                simplex[dim] = contracted;
                values[dim] = fc;
                continue;
            }
            let best = simplex[0].clone();
            for i in 1..=dim {
                simplex[i] = best.iter().zip(&simplex[i]).map(|(b, x)| b + 0.5 * (x - b)).collect();
                values[i] = eval(&simplex[i]);
            }
        }

        Minimum { x: simplex[0].clone(), value: values[0], evaluations: evals.get(), converged }
    }
}
