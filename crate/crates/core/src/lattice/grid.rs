use crate::emfields::{DomainBox, Vec3};
use crate::error::{GaugeLabError, Result};

/// Fewest interior points allowed per axis.
pub const MIN_POINTS: usize = 16;

/// One axis of a Dirichlet grid: `points` interior nodes strictly inside
/// `(min, max)`, the walls sitting at `min` and `max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, points: usize) -> Self {
        Self { min, max, points }
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.points + 1) as f64
    }

    #[inline]
    pub fn coordinate(&self, j: usize) -> f64 {
        self.min + (j + 1) as f64 * self.spacing()
    }
}

/// Uniform grid in one or two dimensions. Points are stored row-major with
/// x running fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    axes: Vec<Axis>,
}

impl GridSpec {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(GaugeLabError::InvalidInput(format!(
                "grids are 1D or 2D, got {} axes",
                axes.len()
            )));
        }
        for (i, a) in axes.iter().enumerate() {
            if !(a.min.is_finite() && a.max.is_finite() && a.max > a.min) {
                return Err(GaugeLabError::InvalidInput(format!(
                    "axis {i} has invalid extent [{}, {}]",
                    a.min, a.max
                )));
            }
            if a.points < MIN_POINTS {
                return Err(GaugeLabError::GridTooCoarse {
                    axis: i,
                    points: a.points,
                    minimum: MIN_POINTS,
                });
            }
        }
        Ok(Self { axes })
    }

    pub fn line(min: f64, max: f64, points: usize) -> Result<Self> {
        Self::new(vec![Axis::new(min, max, points)])
    }

    /// Square grid `[min, max]^2` with `points` per axis.
    pub fn square(min: f64, max: f64, points: usize) -> Result<Self> {
        Self::new(vec![Axis::new(min, max, points); 2])
    }

    /// Same extents, `points` per axis.
    pub fn with_points(&self, points: usize) -> Result<Self> {
        Self::new(
            self.axes
                .iter()
                .map(|a| Axis::new(a.min, a.max, points))
                .collect(),
        )
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, a: usize) -> &Axis {
        &self.axes[a]
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn spacing(&self, a: usize) -> f64 {
        self.axes[a].spacing()
    }

    /// Volume element `prod h`.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).product()
    }

    /// Index offset between neighbours along axis `a`.
    #[inline]
    pub fn stride(&self, a: usize) -> usize {
        if a == 0 {
            1
        } else {
            self.axes[0].points
        }
    }

    /// Per-axis indices of the flat index `idx`.
    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 2] {
        let nx = self.axes[0].points;
        [idx % nx, idx / nx]
    }

    pub fn position(&self, idx: usize) -> Vec3 {
        let c = self.coords(idx);
        let mut r = Vec3::zeros();
        for (a, axis) in self.axes.iter().enumerate() {
            r[a] = axis.coordinate(c[a]);
        }
        r
    }

    pub fn positions(&self) -> Vec<Vec3> {
        (0..self.len()).map(|i| self.position(i)).collect()
    }

    /// Whether `idx` has a neighbour at `+1` along axis `a`.
    #[inline]
    pub fn has_forward(&self, idx: usize, a: usize) -> bool {
        self.coords(idx)[a] + 1 < self.axes[a].points
    }

    #[inline]
    pub fn has_backward(&self, idx: usize, a: usize) -> bool {
        self.coords(idx)[a] > 0
    }

    /// Distance, in points, from `idx` to the nearest wall node.
    pub fn margin(&self, idx: usize) -> usize {
        let c = self.coords(idx);
        self.axes
            .iter()
            .enumerate()
            .map(|(a, axis)| c[a].min(axis.points - 1 - c[a]))
            .min()
            .unwrap_or(0)
    }

    /// Box spanned by the grid including its walls; unused axes collapse to 0.
    pub fn bounding_box(&self) -> DomainBox {
        let mut min = Vec3::zeros();
        let mut max = Vec3::zeros();
        for (a, axis) in self.axes.iter().enumerate() {
            min[a] = axis.min;
            max[a] = axis.max;
        }
        DomainBox { min, max }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_coarse_and_degenerate_grids() {
        assert!(matches!(
            GridSpec::line(0.0, 1.0, 15),
            Err(GaugeLabError::GridTooCoarse { points: 15, .. })
        ));
        assert!(GridSpec::line(1.0, 1.0, 32).is_err());
        assert!(GridSpec::new(vec![]).is_err());
    }

    #[test]
    fn dirichlet_nodes_exclude_the_walls() {
        let g = GridSpec::line(-1.0, 1.0, 19).unwrap();
        assert!((g.spacing(0) - 0.1).abs() < 1e-15);
        assert!((g.position(0).x + 0.9).abs() < 1e-15);
        assert!((g.position(18).x - 0.9).abs() < 1e-15);
    }

    #[test]
    fn row_major_layout() {
        let g = GridSpec::square(0.0, 17.0, 16).unwrap();
        assert_eq!(g.len(), 256);
        assert_eq!(g.stride(1), 16);
        assert_eq!(g.coords(35), [3, 2]);
        let r = g.position(35);
        assert_eq!((r.x, r.y), (4.0, 3.0));
        assert!(!g.has_forward(15, 0) && g.has_forward(15, 1));
        assert_eq!(g.margin(35), 2);
    }
}
