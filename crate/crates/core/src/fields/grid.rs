use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary treatment along one axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// Node `count` coincides with node 0.
    Periodic,
    /// Endpoints are real nodes; derivatives use one-sided stencils there.
    OneSided,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub count: usize,
    pub spacing: f64,
    pub origin: f64,
    pub boundary: Boundary,
}

impl Axis {
    /// `count` nodes covering `[origin, origin + length)` periodically.
    pub fn periodic(name: &str, count: usize, origin: f64, length: f64) -> Self {
        Axis {
            name: name.to_string(),
            count,
            spacing: length / count as f64,
            origin,
            boundary: Boundary::Periodic,
        }
    }

    /// `count` nodes covering the closed interval `[lo, hi]`.
    pub fn closed(name: &str, count: usize, lo: f64, hi: f64) -> Self {
        Axis {
            name: name.to_string(),
            count,
            spacing: (hi - lo) / (count as f64 - 1.0),
            origin: lo,
            boundary: Boundary::OneSided,
        }
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        self.origin + self.spacing * i as f64
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }
}

/// Uniform tensor-product grid over 1–4 named axes. Nodes are stored
/// row-major: the first axis varies slowest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct GridSpec {
    axes: Vec<Axis>,
    strides: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct GridRepr {
    axes: Vec<Axis>,
}

impl TryFrom<GridRepr> for GridSpec {
    type Error = Error;
    fn try_from(r: GridRepr) -> Result<Self> {
        GridSpec::new(r.axes)
    }
}

impl From<GridSpec> for GridRepr {
    fn from(g: GridSpec) -> Self {
        GridRepr { axes: g.axes }
    }
}

impl GridSpec {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 4 {
            return Err(Error::InvalidGrid(format!(
                "need 1 to 4 axes, got {}",
                axes.len()
            )));
        }
        for (i, a) in axes.iter().enumerate() {
            if a.count < 3 {
                return Err(Error::InvalidGrid(format!(
                    "axis `{}` has {} points, need at least 3",
                    a.name, a.count
                )));
            }
            if !(a.spacing > 0.0 && a.spacing.is_finite()) || !a.origin.is_finite() {
                return Err(Error::InvalidGrid(format!(
                    "axis `{}` needs finite positive spacing",
                    a.name
                )));
            }
            if axes[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::InvalidGrid(format!("duplicate axis `{}`", a.name)));
            }
        }
        let mut strides = vec![1; axes.len()];
        for i in (0..axes.len() - 1).rev() {
            strides[i] = strides[i + 1] * axes[i + 1].count;
        }
        Ok(GridSpec { axes, strides })
    }

    /// Periodic grid with `n` points per axis on `[0, length)`.
    pub fn periodic(names: &[&str], n: usize, length: f64) -> Result<Self> {
        GridSpec::new(
            names
                .iter()
                .map(|nm| Axis::periodic(nm, n, 0.0, length))
                .collect(),
        )
    }

    /// Non-periodic grid with `n` points per axis on `[lo, hi]`.
    pub fn closed(names: &[&str], n: usize, lo: f64, hi: f64) -> Result<Self> {
        GridSpec::new(names.iter().map(|nm| Axis::closed(nm, n, lo, hi)).collect())
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn ndim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn axis_index(&self, name: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::UnknownAxis(name.to_string()))
    }

    pub fn axis(&self, name: &str) -> Result<&Axis> {
        Ok(&self.axes[self.axis_index(name)?])
    }

    pub fn has_axis(&self, name: &str) -> bool {
        self.axes.iter().any(|a| a.name == name)
    }

    pub fn names(&self) -> Vec<&str> {
        self.axes.iter().map(|a| a.name.as_str()).collect()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    /// Largest spacing over all axes.
    pub fn max_spacing(&self) -> f64 {
        self.axes.iter().map(|a| a.spacing).fold(0.0, f64::max)
    }

    pub fn multi_index(&self, mut node: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (i, s) in self.strides.iter().enumerate() {
            idx[i] = node / s;
            node %= s;
        }
        idx
    }

    pub fn node(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn coords(&self, node: usize) -> Vec<f64> {
        self.multi_index(node)
            .iter()
            .zip(&self.axes)
            .map(|(&i, a)| a.coord(i))
            .collect()
    }

    /// Same grid with every axis count replaced by `n` (spacing rescaled so
    /// the covered interval is unchanged).
    pub fn refined(&self, n: usize) -> Result<Self> {
        GridSpec::new(
            self.axes
                .iter()
                .map(|a| {
                    let length = match a.boundary {
                        Boundary::Periodic => a.spacing * a.count as f64,
                        Boundary::OneSided => a.spacing * (a.count as f64 - 1.0),
                    };
                    match a.boundary {
                        Boundary::Periodic => Axis::periodic(&a.name, n, a.origin, length),
                        Boundary::OneSided => Axis::closed(&a.name, n, a.origin, a.origin + length),
                    }
                })
                .collect(),
        )
    }

    /// Starting nodes of every line running along `axis`.
    pub fn line_starts(&self, axis: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&n| (n / self.strides[axis]) % self.axes[axis].count == 0)
            .collect()
    }
}
