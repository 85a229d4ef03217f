//! Two-parameter Nelder-Mead used to polish grid minima.

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub initial_step: f64,
    /// Stop once the spread of vertex values falls below this.
    pub f_tol: f64,
    /// ... and the simplex has shrunk below this (in parameter units).
    pub x_tol: f64,
    pub max_iter: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.02,
            f_tol: 1e-13,
            x_tol: 1e-9,
            max_iter: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexResult {
    pub x: [f64; 2],
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn minimize(mut f: impl FnMut([f64; 2]) -> f64, x0: [f64; 2], opts: &SimplexOptions) -> SimplexResult {
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let h = opts.initial_step;
    let mut pts = [x0, [x0[0] + h, x0[1]], [x0[0], x0[1] + h]];
    let mut vals = [f(pts[0]), f(pts[1]), f(pts[2])];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iter {
        // order: best first
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = [pts[idx[0]], pts[idx[1]], pts[idx[2]]];
        vals = [vals[idx[0]], vals[idx[1]], vals[idx[2]]];

        let spread = vals[2] - vals[0];
        let size = pts[1..]
            .iter()
            .map(|p| (p[0] - pts[0][0]).abs().max((p[1] - pts[0][1]).abs()))
            .fold(0.0, f64::max);
        if spread <= opts.f_tol && size <= opts.x_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid = [(pts[0][0] + pts[1][0]) / 2.0, (pts[0][1] + pts[1][1]) / 2.0];
        let along = |t: f64| {
            [
                centroid[0] + t * (pts[2][0] - centroid[0]),
                centroid[1] + t * (pts[2][1] - centroid[1]),
            ]
        };

        let xr = along(-REFLECT);
        let fr = f(xr);
        if fr < vals[0] {
            let xe = along(-EXPAND);
            let fe = f(xe);
            if fe < fr {
                pts[2] = xe;
                vals[2] = fe;
            } else {
                pts[2] = xr;
                vals[2] = fr;
            }
            continue;
        }
        if fr < vals[1] {
            pts[2] = xr;
            vals[2] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[2] {
            let xc = along(-CONTRACT);
            (xc, f(xc))
        } else {
            let xc = along(CONTRACT);
            (xc, f(xc))
        };
        if fc < vals[2].min(fr) {
            pts[2] = xc;
            vals[2] = fc;
            continue;
        }
        for k in 1..3 {
            pts[k] = [
                pts[0][0] + SHRINK * (pts[k][0] - pts[0][0]),
                pts[0][1] + SHRINK * (pts[k][1] - pts[0][1]),
            ];
            vals[k] = f(pts[k]);
        }
    }

    let best = (0..3).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    SimplexResult {
        x: pts[best],
        f: vals[best],
        iterations,
        converged,
    }
}
