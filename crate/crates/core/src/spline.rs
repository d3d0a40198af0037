//! Clamped cubic spline interpolation for tabulated pulse envelopes.
//!
//! Endpoint slopes are taken from the cubic through the four outermost
//! samples on each side, so splines built from smooth data reproduce low
//! order polynomials exactly. Evaluation outside the knot range extends the
//! boundary cubic, which keeps finite differences well defined at the edges.

/// Natural cubic segments with clamped endpoint slopes, solved once at
/// construction.
#[derive(Debug, Clone)]
pub(crate) struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    second: Vec<f64>,
}

impl CubicSpline {
    /// Fits the spline; `xs` must hold at least two strictly increasing
    /// finite knots (the pulse loader has validated this already).
    pub(crate) fn new(xs: Vec<f64>, ys: Vec<f64>) -> CubicSpline {
        assert_eq!(xs.len(), ys.len(), "knot and value counts differ");
        assert!(xs.len() >= 2, "a spline needs at least two knots");
        assert!(
            xs.windows(2).all(|w| w[0] < w[1]),
            "spline knots must be strictly increasing"
        );

        let slope_start = edge_slope(&xs, &ys, false);
        let slope_end = edge_slope(&xs, &ys, true);
        let second = solve_clamped(&xs, &ys, slope_start, slope_end);
        CubicSpline { xs, ys, second }
    }

    pub(crate) fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let left = self.xs[i + 1] - x;
        let right = x - self.xs[i];
        self.second[i] * left * left * left / (6.0 * h)
            + self.second[i + 1] * right * right * right / (6.0 * h)
            + (self.ys[i] / h - self.second[i] * h / 6.0) * left
            + (self.ys[i + 1] / h - self.second[i + 1] * h / 6.0) * right
    }

    fn segment(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|knot| knot.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.xs.len() - 2),
        }
    }
}

/// Slope of the interpolating cubic through the four outermost samples,
/// evaluated at the boundary knot. Falls back to fewer points for short
/// tables (secant line for two knots).
fn edge_slope(xs: &[f64], ys: &[f64], at_end: bool) -> f64 {
    let n = xs.len().min(4);
    let (window_x, window_y, at): (Vec<f64>, Vec<f64>, f64) = if at_end {
        let start = xs.len() - n;
        (xs[start..].to_vec(), ys[start..].to_vec(), xs[xs.len() - 1])
    } else {
        (xs[..n].to_vec(), ys[..n].to_vec(), xs[0])
    };
    lagrange_slope(&window_x, &window_y, at)
}

/// Derivative of the Lagrange interpolating polynomial at `at`.
fn lagrange_slope(xs: &[f64], ys: &[f64], at: f64) -> f64 {
    let n = xs.len();
    let mut slope = 0.0;
    for j in 0..n {
        let mut denom = 1.0;
        for k in 0..n {
            if k != j {
                denom *= xs[j] - xs[k];
            }
        }
        let mut basis_slope = 0.0;
        for m in 0..n {
            if m == j {
                continue;
            }
            let mut term = 1.0;
            for k in 0..n {
                if k != j && k != m {
                    term *= at - xs[k];
                }
            }
            basis_slope += term;
        }
        slope += ys[j] * basis_slope / denom;
    }
    slope
}

/// Solves the tridiagonal system for the spline's second derivatives under
/// clamped boundary slopes, with the Thomas algorithm.
fn solve_clamped(xs: &[f64], ys: &[f64], slope_start: f64, slope_end: f64) -> Vec<f64> {
    let n = xs.len();
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();

    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut lower = vec![0.0; n];
    let mut rhs = vec![0.0; n];

    diag[0] = 2.0 * h[0];
    upper[0] = h[0];
    rhs[0] = 6.0 * ((ys[1] - ys[0]) / h[0] - slope_start);

    for i in 1..n - 1 {
        lower[i] = h[i - 1];
        diag[i] = 2.0 * (h[i - 1] + h[i]);
        upper[i] = h[i];
        rhs[i] = 6.0 * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1]);
    }

    lower[n - 1] = h[n - 2];
    diag[n - 1] = 2.0 * h[n - 2];
    rhs[n - 1] = 6.0 * (slope_end - (ys[n - 1] - ys[n - 2]) / h[n - 2]);

    for i in 1..n {
        let w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }

    let mut second = vec![0.0; n];
    second[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        second[i] = (rhs[i] - upper[i] * second[i + 1]) / diag[i];
    }
    second
}
