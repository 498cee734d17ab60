//! Parameter manifolds: tori with angle coordinates and round spheres with
//! an atlas of graph charts.
//!
//! A sphere chart `(axis, positive)` drops ambient coordinate `axis` and
//! solves for it on the chosen hemisphere. A tangent frame `(v₁, …, v_d)` is
//! positively oriented when `det[v₁, …, v_d, x] > 0` with the outward normal
//! `x` placed last, ambient coordinates in their natural order.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Base {
    /// `T^d` with coordinates in `[0, 2π)`.
    Torus(usize),
    /// `S^d ⊂ ℝ^{d+1}` with ambient coordinates.
    Sphere(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Chart {
    Torus,
    Graph { axis: usize, positive: bool },
}

impl std::fmt::Display for Chart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Chart::Torus => write!(f, "torus"),
            Chart::Graph { axis, positive } => {
                write!(f, "graph{}{}", if *positive { '+' } else { '-' }, axis)
            }
        }
    }
}

pub fn wrap_angle(t: f64) -> f64 {
    let w = t.rem_euclid(2.0 * PI);
    if w >= 2.0 * PI {
        0.0
    } else {
        w
    }
}

/// Signed difference `a − b` reduced to `(−π, π]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    if d > PI {
        d - 2.0 * PI
    } else {
        d
    }
}

impl Base {
    pub fn dim(&self) -> usize {
        match *self {
            Base::Torus(d) | Base::Sphere(d) => d,
        }
    }

    /// Length of the point representation (angles or ambient vector).
    pub fn point_len(&self) -> usize {
        match *self {
            Base::Torus(d) => d,
            Base::Sphere(d) => d + 1,
        }
    }

    pub fn charts(&self) -> Vec<Chart> {
        match *self {
            Base::Torus(_) => vec![Chart::Torus],
            Base::Sphere(d) => (0..=d)
                .flat_map(|axis| [true, false].map(|positive| Chart::Graph { axis, positive }))
                .collect(),
        }
    }

    /// `+1` or `−1` according to whether the chart is orientation preserving.
    pub fn chart_orientation(&self, chart: Chart) -> f64 {
        match (*self, chart) {
            (_, Chart::Torus) => 1.0,
            (Base::Sphere(d), Chart::Graph { axis, positive }) => {
                let s = if positive { 1.0 } else { -1.0 };
                if (d - axis) % 2 == 0 {
                    s
                } else {
                    -s
                }
            }
            (Base::Torus(_), Chart::Graph { .. }) => panic!("graph chart on a torus"),
        }
    }

    pub fn to_point(&self, chart: Chart, u: &[f64]) -> Vec<f64> {
        match chart {
            Chart::Torus => u.iter().map(|&t| wrap_angle(t)).collect(),
            Chart::Graph { axis, positive } => {
                let r2: f64 = u.iter().map(|x| x * x).sum();
                let h = (1.0 - r2).max(0.0).sqrt();
                let mut x = u.to_vec();
                x.insert(axis, if positive { h } else { -h });
                x
            }
        }
    }

    /// Chart coordinates of a point; angles are kept as given for tori.
    pub fn to_chart(&self, chart: Chart, x: &[f64]) -> Vec<f64> {
        match chart {
            Chart::Torus => x.to_vec(),
            Chart::Graph { axis, .. } => {
                let mut u = x.to_vec();
                u.remove(axis);
                u
            }
        }
    }

    /// `∂x/∂u`, stored as `point_len` rows of `dim` entries.
    pub fn chart_derivative(&self, chart: Chart, u: &[f64]) -> Vec<Vec<f64>> {
        let d = self.dim();
        match chart {
            Chart::Torus => (0..d)
                .map(|i| (0..d).map(|j| f64::from(i == j)).collect())
                .collect(),
            Chart::Graph { axis, positive } => {
                let r2: f64 = u.iter().map(|x| x * x).sum();
                let h = (1.0 - r2).max(1e-300).sqrt();
                let s = if positive { 1.0 } else { -1.0 };
                let mut rows = Vec::with_capacity(d + 1);
                for i in 0..=d {
                    if i == axis {
                        rows.push(u.iter().map(|&uj| -s * uj / h).collect());
                    } else {
                        let j = if i < axis { i } else { i - 1 };
                        rows.push((0..d).map(|l| f64::from(l == j)).collect());
                    }
                }
                rows
            }
        }
    }

    /// Chart in which the point is most central.
    pub fn best_chart(&self, x: &[f64]) -> Chart {
        match *self {
            Base::Torus(_) => Chart::Torus,
            Base::Sphere(_) => {
                let (axis, v) = x.iter().enumerate().fold((0, 0.0_f64), |acc, (i, &v)| {
                    if v.abs() > acc.1.abs() {
                        (i, v)
                    } else {
                        acc
                    }
                });
                Chart::Graph {
                    axis,
                    positive: v >= 0.0,
                }
            }
        }
    }

    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            Base::Torus(_) => x
                .iter()
                .zip(y)
                .map(|(&a, &b)| angle_diff(a, b).powi(2))
                .sum::<f64>()
                .sqrt(),
            Base::Sphere(_) => x
                .iter()
                .zip(y)
                .map(|(&a, &b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt(),
        }
    }

    /// Orientation-reversing reflection of the first coordinate.
    pub fn reflect(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        y[0] = match self {
            Base::Torus(_) => wrap_angle(-x[0]),
            Base::Sphere(_) => -x[0],
        };
        y
    }

    /// Normalizes a point: wraps angles or projects onto the unit sphere.
    pub fn normalize(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Base::Torus(_) => x.iter().map(|&t| wrap_angle(t)).collect(),
            Base::Sphere(_) => {
                let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                x.iter().map(|v| v / n).collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_det;

    #[test]
    fn orientation_matches_normal_last_rule() {
        for d in 1..=3 {
            let base = Base::Sphere(d);
            for chart in base.charts() {
                let u: Vec<f64> = (0..d).map(|i| 0.1 * (i as f64 + 1.0)).collect();
                let x = base.to_point(chart, &u);
                let dx = base.chart_derivative(chart, &u);
                let rows: Vec<Vec<f64>> = (0..=d)
                    .map(|i| {
                        let mut r = dx[i].clone();
                        r.push(x[i]);
                        r
                    })
                    .collect();
                let det = real_det(&rows);
                assert_eq!(
                    det.signum(),
                    base.chart_orientation(chart),
                    "{chart} in S^{d}"
                );
            }
        }
    }

    #[test]
    fn angle_helpers() {
        assert!((wrap_angle(-0.5) - (2.0 * PI - 0.5)).abs() < 1e-15);
        assert!((angle_diff(0.1, 2.0 * PI - 0.1) - 0.2).abs() < 1e-14);
    }
}
