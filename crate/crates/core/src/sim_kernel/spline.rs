use crate::error::{Error, Result};
use crate::geometry::{Polyline, Vec2};

/// Natural cubic spline through `(t_i, y_i)`: zero second derivative at
/// both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalCubicSpline {
    t: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl NaturalCubicSpline {
    pub fn new(t: &[f64], y: &[f64]) -> Result<Self> {
        let n = t.len();
        if n != y.len() {
            return Err(Error::InvalidArgument(format!(
                "spline needs as many values as knots ({n} vs {})",
                y.len()
            )));
        }
        if n < 3 {
            return Err(Error::InvalidArgument(format!(
                "spline needs at least 3 knots, got {n}"
            )));
        }
        if let Some(w) = t.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(format!(
                "spline knots must increase strictly ({} then {})",
                w[0], w[1]
            )));
        }
        // Thomas algorithm on the interior second derivatives.
        let h: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
        let k = n - 2;
        let mut diag = vec![0.0; k];
        let mut rhs = vec![0.0; k];
        for i in 0..k {
            diag[i] = 2.0 * (h[i] + h[i + 1]);
            rhs[i] = 6.0 * ((y[i + 2] - y[i + 1]) / h[i + 1] - (y[i + 1] - y[i]) / h[i]);
        }
        for i in 1..k {
            let w = h[i] / diag[i - 1];
            diag[i] -= w * h[i];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut m = vec![0.0; n];
        for i in (0..k).rev() {
            let upper = if i + 1 < k { h[i + 1] * m[i + 2] } else { 0.0 };
            m[i + 1] = (rhs[i] - upper) / diag[i];
        }
        Ok(NaturalCubicSpline {
            t: t.to_vec(),
            y: y.to_vec(),
            m,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.t
    }

    fn interval(&self, x: f64) -> usize {
        self.t
            .partition_point(|&k| k <= x)
            .saturating_sub(1)
            .min(self.t.len() - 2)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.interval(x);
        let h = self.t[i + 1] - self.t[i];
        let a = (self.t[i + 1] - x) / h;
        let b = (x - self.t[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        let i = self.interval(x);
        let h = self.t[i + 1] - self.t[i];
        let a = (self.t[i + 1] - x) / h;
        a * self.m[i] + (1.0 - a) * self.m[i + 1]
    }
}

/// Planar path as two natural splines over chord-length parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpline {
    x: NaturalCubicSpline,
    y: NaturalCubicSpline,
}

impl PathSpline {
    pub fn length_param(&self) -> f64 {
        *self.x.knots().last().unwrap()
    }

    pub fn eval(&self, s: f64) -> Vec2 {
        Vec2::new(self.x.eval(s), self.y.eval(s))
    }

    pub fn second_derivative(&self, s: f64) -> Vec2 {
        Vec2::new(self.x.second_derivative(s), self.y.second_derivative(s))
    }

    /// Dense polyline through the spline. Every knot is kept.
    pub fn resample(&self, step: f64) -> Polyline {
        let knots = self.x.knots();
        let mut pts = vec![self.eval(knots[0])];
        for w in knots.windows(2) {
            let pieces = ((w[1] - w[0]) / step).ceil().max(1.0) as usize;
            for k in 1..=pieces {
                let s = if k == pieces {
                    w[1]
                } else {
                    w[0] + (w[1] - w[0]) * k as f64 / pieces as f64
                };
                pts.push(self.eval(s));
            }
        }
        Polyline::new(pts)
    }
}

/// Fits a natural cubic spline per coordinate over chord length.
pub fn smooth_path(points: &[Vec2]) -> Result<PathSpline> {
    let mut s = Vec::with_capacity(points.len());
    let mut acc = 0.0;
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            acc += p.distance(points[i - 1]);
        }
        s.push(acc);
    }
    let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.y).collect();
    Ok(PathSpline {
        x: NaturalCubicSpline::new(&s, &xs)?,
        y: NaturalCubicSpline::new(&s, &ys)?,
    })
}
