//! Grid coordinates, nodes and the interpolation functionals `λ_α u = D^{ρ(α)} u(x_α)`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::multiindex::{check_order, face_of, FaceIndex, LowerSet, MultiIndex};
use crate::Rational;

/// How the interior grid coordinates `x_{j,k}`, `k = 2..r`, are placed.
///
/// Every scheme fixes `x_{j,0} = -1` and `x_{j,1} = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GridScheme {
    /// `x_{j,k} = -1 + 2(k-1)/r`.
    UniformIncreasing,
    /// The uniform values reordered so that low indices sit near the middle of `[-1, 1]`.
    SymmetricReordered,
    /// All interior coordinates at 0; yields Hermite-type conditions at face midpoints.
    HermiteMidpoint,
    /// Explicit interior coordinates, one list per axis (a single list applies to every axis).
    /// Repeated values are allowed and produce derivative conditions.
    Custom(Vec<Vec<Rational>>),
}

impl GridScheme {
    pub fn name(&self) -> &'static str {
        match self {
            GridScheme::UniformIncreasing => "uniform",
            GridScheme::SymmetricReordered => "symmetric",
            GridScheme::HermiteMidpoint => "hermite",
            GridScheme::Custom(_) => "custom",
        }
    }

    /// Interior coordinates `x_2, ..., x_r` for one axis.
    fn interior(&self, axis: usize, r: u32) -> Result<Vec<Rational>> {
        let r_big = Rational::from_integer(r.into());
        let two = || Rational::from_integer(2.into());
        let count = r.saturating_sub(1) as usize;
        match self {
            GridScheme::UniformIncreasing => Ok((2..=r)
                .map(|k| -Rational::one() + two() * Rational::from_integer((k - 1).into()) / &r_big)
                .collect()),
            GridScheme::SymmetricReordered => {
                let mut x = vec![Rational::zero(); count];
                // x_{r-2s} = 1 - 2(s+1)/r and x_{r-2s-1} = -1 + 2(s+1)/r.
                let mut s = 0u32;
                while r >= 2 * s + 2 {
                    let step = two() * Rational::from_integer((s + 1).into()) / &r_big;
                    x[(r - 2 * s - 2) as usize] = Rational::one() - &step;
                    if r >= 2 * s + 3 {
                        x[(r - 2 * s - 3) as usize] = -Rational::one() + step;
                    }
                    s += 1;
                }
                Ok(x)
            }
            GridScheme::HermiteMidpoint => Ok(vec![Rational::zero(); count]),
            GridScheme::Custom(axes) => {
                let list = match axes.len() {
                    0 => return Err(Error::InvalidCoordinates("no axes given".into())),
                    1 => &axes[0],
                    _ => axes.get(axis).ok_or_else(|| {
                        Error::InvalidCoordinates(format!("no coordinates for axis {axis}"))
                    })?,
                };
                if list.len() != count {
                    return Err(Error::InvalidCoordinates(format!(
                        "axis {axis}: expected {count} interior coordinates for r = {r}, got {}",
                        list.len()
                    )));
                }
                if let Some(bad) = list.iter().find(|x| x.abs() >= Rational::one()) {
                    return Err(Error::InvalidCoordinates(format!(
                        "axis {axis}: {bad} is not strictly inside (-1, 1)"
                    )));
                }
                Ok(list.clone())
            }
        }
    }
}

impl fmt::Display for GridScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GridScheme {
    type Err = Error;

    /// Parses the built-in scheme names; custom schemes are loaded from files.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(GridScheme::UniformIncreasing),
            "symmetric" => Ok(GridScheme::SymmetricReordered),
            "hermite" => Ok(GridScheme::HermiteMidpoint),
            other => Err(Error::InvalidCoordinates(format!(
                "unknown scheme `{other}`"
            ))),
        }
    }
}

/// Per-axis coordinate sequences `x_{j,0..=r}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridCoordinates {
    r: u32,
    axes: Vec<Vec<Rational>>,
}

impl GridCoordinates {
    pub fn build(scheme: &GridScheme, n: usize, r: u32) -> Result<Self> {
        check_order(n, r)?;
        if let GridScheme::Custom(axes) = scheme {
            if axes.len() > 1 && axes.len() != n {
                return Err(Error::InvalidCoordinates(format!(
                    "{} coordinate lists given for dimension {n}",
                    axes.len()
                )));
            }
        }
        let axes = (0..n)
            .map(|j| {
                let mut axis = vec![-Rational::one(), Rational::one()];
                axis.extend(scheme.interior(j, r)?);
                Ok(axis)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GridCoordinates { r, axes })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn order(&self) -> u32 {
        self.r
    }

    /// `x_{j,0..=r}` for axis `j`.
    pub fn axis(&self, j: usize) -> &[Rational] {
        &self.axes[j]
    }

    pub fn coordinate(&self, j: usize, k: u32) -> &Rational {
        &self.axes[j][k as usize]
    }

    /// The grid restricted to a subset of axes, in the given order.
    pub fn sub_axes(&self, axes: &[usize]) -> GridCoordinates {
        GridCoordinates {
            r: self.r,
            axes: axes.iter().map(|&j| self.axes[j].clone()).collect(),
        }
    }

    fn check_index(&self, alpha: &MultiIndex) -> Result<()> {
        if alpha.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: alpha.dim(),
            });
        }
        if alpha.max_entry() > self.r {
            return Err(Error::IndexOutOfRange {
                index: alpha.clone(),
                r: self.r,
            });
        }
        Ok(())
    }

    /// The grid point `x_α = (x_{1,α_1}, ..., x_{n,α_n})`.
    pub fn node_of(&self, alpha: &MultiIndex) -> Result<Node> {
        self.check_index(alpha)?;
        let point = alpha
            .entries()
            .iter()
            .enumerate()
            .map(|(j, &k)| self.coordinate(j, k).clone())
            .collect();
        Ok(Node {
            point,
            source_index: alpha.clone(),
        })
    }

    /// `ρ_j(α) = #{k < α_j : x_{j,k} = x_{j,α_j}}`.
    pub fn left_multiplicity(&self, alpha: &MultiIndex) -> Result<MultiIndex> {
        self.check_index(alpha)?;
        Ok(alpha
            .entries()
            .iter()
            .enumerate()
            .map(|(j, &a)| univariate_left_multiplicity(&self.axes[j][..=a as usize]))
            .collect())
    }

    pub fn functional(&self, alpha: &MultiIndex) -> Result<Functional> {
        Ok(Functional {
            derivative_order: self.left_multiplicity(alpha)?,
            node: self.node_of(alpha)?,
        })
    }

    /// One functional per member of `set`, in the set's order.
    pub fn functionals_for(&self, set: &LowerSet) -> Result<Vec<Functional>> {
        set.iter().map(|a| self.functional(a)).collect()
    }
}

/// Number of entries before the last one that equal the last one.
pub(crate) fn univariate_left_multiplicity(prefix: &[Rational]) -> u32 {
    match prefix.split_last() {
        Some((last, rest)) => rest.iter().filter(|x| *x == last).count() as u32,
        None => 0,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub point: Vec<Rational>,
    pub source_index: MultiIndex,
}

impl Node {
    pub fn point_f64(&self) -> Vec<f64> {
        self.point.iter().map(crate::polynomial::to_f64).collect()
    }

    /// The face containing this node, derived from its source index.
    pub fn face(&self) -> FaceIndex {
        face_of(&self.source_index)
    }
}

/// `u ↦ D^ρ u(x)` with `ρ` the left multiplicity of the node's index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Functional {
    pub node: Node,
    pub derivative_order: MultiIndex,
}

/// Derivative orders `K_{r,β}` interpolated at the midpoint `y_β` of a face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermiteConditionSet {
    pub beta: FaceIndex,
    pub midpoint: Vec<Rational>,
    pub orders: Vec<MultiIndex>,
}

/// `K_{r,β} = {ρ : |ρ| <= r - 2d, ρ_j = 0 where β_j < 2}`, lexicographic.
pub fn hermite_orders(beta: &FaceIndex, r: u32) -> Vec<MultiIndex> {
    let d = beta.dim();
    let budget = i64::from(r) - 2 * d as i64;
    if budget < 0 {
        return Vec::new();
    }
    let free = beta.free_axes();
    let n = beta.ambient_dim();
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn walk(free: &[usize], i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if i == free.len() {
            out.push(MultiIndex::new(cur.clone()));
            return;
        }
        for v in 0..=left {
            cur[free[i]] = v;
            walk(free, i + 1, left - v, cur, out);
        }
        cur[free[i]] = 0;
    }
    walk(&free, 0, budget as u32, &mut cur, &mut out);
    out.sort();
    out
}

/// Hermite conditions for every face with a nonempty `K_{r,β}`.
pub fn hermite_conditions(n: usize, r: u32) -> Result<Vec<HermiteConditionSet>> {
    check_order(n, r)?;
    Ok(FaceIndex::all(n)
        .into_iter()
        .filter_map(|beta| {
            let orders = hermite_orders(&beta, r);
            if orders.is_empty() {
                return None;
            }
            let midpoint = beta
                .midpoint()
                .into_iter()
                .map(|v| Rational::from_integer(v.into()))
                .collect();
            Some(HermiteConditionSet {
                beta,
                midpoint,
                orders,
            })
        })
        .collect())
}
