//! Exact sparse multivariate polynomials and tensor-product cardinal functions.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::nodes::{univariate_left_multiplicity, Functional, GridCoordinates};
use crate::Rational;

pub(crate) fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `i (i-1) ... (i-k+1)`, the factor produced by differentiating `x^i` `k` times.
fn falling_factorial(i: u32, k: u32) -> BigInt {
    if k > i {
        return BigInt::zero();
    }
    (i - k + 1..=i).fold(BigInt::one(), |acc, v| acc * v)
}

fn pow(x: &Rational, e: u32) -> Rational {
    num_traits::pow(x.clone(), e as usize)
}

/// A polynomial in `n` variables with rational coefficients, stored as a sparse
/// map from exponent multi-index to coefficient. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Polynomial::monomial(MultiIndex::zeros(dim), c)
    }

    pub fn one(dim: usize) -> Self {
        Polynomial::constant(dim, Rational::one())
    }

    pub fn monomial(exponent: MultiIndex, c: Rational) -> Self {
        let mut p = Polynomial::zero(exponent.dim());
        p.add_term(exponent, c);
        p
    }

    /// The coordinate function `x_j`.
    pub fn variable(dim: usize, j: usize) -> Self {
        Polynomial::monomial(MultiIndex::unit(dim, j), Rational::one())
    }

    pub fn from_terms(
        dim: usize,
        terms: impl IntoIterator<Item = (MultiIndex, Rational)>,
    ) -> Result<Self> {
        let mut p = Polynomial::zero(dim);
        for (e, c) in terms {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: e.dim(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exponent: &MultiIndex) -> Rational {
        self.terms
            .get(exponent)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Exponents with nonzero coefficient.
    pub fn support(&self) -> impl Iterator<Item = &MultiIndex> {
        self.terms.keys()
    }

    pub fn add_term(&mut self, exponent: MultiIndex, c: Rational) {
        if c.is_zero() {
            return;
        }
        assert_eq!(exponent.dim(), self.dim, "polynomial dimension mismatch");
        let entry = self.terms.entry(exponent);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Polynomial, c: &Rational) {
        assert_eq!(self.dim, other.dim, "polynomial dimension mismatch");
        if c.is_zero() {
            return;
        }
        for (e, v) in &other.terms {
            self.add_term(e.clone(), v * c);
        }
    }

    pub fn scaled(&self, c: &Rational) -> Polynomial {
        let mut p = Polynomial::zero(self.dim);
        p.add_scaled(self, c);
        p
    }

    fn check_dim(&self, actual: usize) -> Result<()> {
        if actual != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual,
            });
        }
        Ok(())
    }

    /// Exact value at a rational point.
    pub fn evaluate(&self, x: &[Rational]) -> Result<Rational> {
        self.check_dim(x.len())?;
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (xj, &ej) in x.iter().zip(e.entries()) {
                if ej > 0 {
                    term *= pow(xj, ej);
                }
            }
            total += term;
        }
        Ok(total)
    }

    /// Floating-point value, from coefficients converted to `f64`.
    pub fn evaluate_f64(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| {
                e.entries()
                    .iter()
                    .zip(x)
                    .fold(to_f64(c), |acc, (&ej, &xj)| acc * xj.powi(ej as i32))
            })
            .sum())
    }

    /// `∂^{|ρ|} / ∂x^ρ`, applied monomial-wise.
    pub fn derivative(&self, order: &MultiIndex) -> Result<Polynomial> {
        self.check_dim(order.dim())?;
        let mut out = Polynomial::zero(self.dim);
        for (e, c) in &self.terms {
            if !order.is_below(e) {
                continue;
            }
            let factor: BigInt = e
                .entries()
                .iter()
                .zip(order.entries())
                .map(|(&ej, &rj)| falling_factorial(ej, rj))
                .product();
            let exponent: MultiIndex = e
                .entries()
                .iter()
                .zip(order.entries())
                .map(|(&ej, &rj)| ej - rj)
                .collect();
            out.add_term(exponent, c * Rational::from_integer(factor));
        }
        Ok(out)
    }

    /// `D^ρ p(x)` without forming the derivative polynomial.
    pub fn derivative_at(&self, order: &MultiIndex, x: &[Rational]) -> Result<Rational> {
        self.check_dim(order.dim())?;
        self.check_dim(x.len())?;
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            if !order.is_below(e) {
                continue;
            }
            let mut term = c.clone();
            for ((&ej, &rj), xj) in e.entries().iter().zip(order.entries()).zip(x) {
                if rj > 0 {
                    term *= Rational::from_integer(falling_factorial(ej, rj));
                }
                if ej > rj {
                    term *= pow(xj, ej - rj);
                }
            }
            total += term;
        }
        Ok(total)
    }

    /// `λ p = D^{ρ} p(x)` for the functional's node and derivative order.
    pub fn apply_functional(&self, functional: &Functional) -> Result<Rational> {
        self.derivative_at(&functional.derivative_order, &functional.node.point)
    }

    /// Substitutes fixed values for some variables and keeps the rest, in order.
    ///
    /// `values[j] = Some(v)` pins `x_j = v`; `None` keeps `x_j` as a free variable.
    pub fn partial_evaluate(&self, values: &[Option<Rational>]) -> Result<Polynomial> {
        self.check_dim(values.len())?;
        let free = values.iter().filter(|v| v.is_none()).count();
        let mut out = Polynomial::zero(free);
        for (e, c) in &self.terms {
            let mut coeff = c.clone();
            let mut exponent = Vec::with_capacity(free);
            for (&ej, v) in e.entries().iter().zip(values) {
                match v {
                    Some(v) => {
                        if ej > 0 {
                            coeff *= pow(v, ej);
                        }
                    }
                    None => exponent.push(ej),
                }
            }
            out.add_term(MultiIndex::new(exponent), coeff);
        }
        Ok(out)
    }

    /// `∏_j f_j(x_j)` for dense univariate coefficient vectors `f_j`.
    pub fn tensor_product(factors: &[&[Rational]]) -> Polynomial {
        let dim = factors.len();
        let mut terms: Vec<(Vec<u32>, Rational)> = vec![(Vec::with_capacity(dim), Rational::one())];
        for f in factors {
            let mut next = Vec::with_capacity(terms.len() * f.len());
            for (e, c) in &terms {
                for (deg, fc) in f.iter().enumerate() {
                    if fc.is_zero() {
                        continue;
                    }
                    let mut e2 = e.clone();
                    e2.push(deg as u32);
                    next.push((e2, c * fc));
                }
            }
            terms = next;
        }
        let mut p = Polynomial::zero(dim);
        for (e, c) in terms {
            p.add_term(MultiIndex::new(e), c);
        }
        p
    }

    /// Largest absolute coefficient, zero for the zero polynomial.
    pub fn max_abs_coefficient(&self) -> Rational {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::one());
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scaled(&-Rational::one())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.dim, rhs.dim, "polynomial dimension mismatch");
        let mut out = Polynomial::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea.plus(eb), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.abs();
            let mut parts = Vec::new();
            if !mag.is_one() || e.total_degree() == 0 {
                parts.push(mag.to_string());
            }
            for (j, &ej) in e.entries().iter().enumerate() {
                match ej {
                    0 => {}
                    1 => parts.push(format!("x{}", j + 1)),
                    _ => parts.push(format!("x{}^{}", j + 1, ej)),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

/// Cardinal polynomials `ℓ_0..ℓ_a` on a coordinate sequence with repetitions allowed.
///
/// `D^{ρ(k')} ℓ_k (x_{k'}) = δ_{k,k'}`, where `ρ(k')` counts earlier coordinates equal to `x_{k'}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnivariateCardinalSet {
    coordinates: Vec<Rational>,
    /// Dense coefficient vectors, lowest degree first, each of length `a + 1`.
    cardinals: Vec<Vec<Rational>>,
}

impl UnivariateCardinalSet {
    pub fn coordinates(&self) -> &[Rational] {
        &self.coordinates
    }

    pub fn len(&self) -> usize {
        self.cardinals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cardinals.is_empty()
    }

    pub fn coefficients(&self, k: usize) -> &[Rational] {
        &self.cardinals[k]
    }

    /// `ℓ_k` as a polynomial in one variable.
    pub fn cardinal(&self, k: usize) -> Polynomial {
        Polynomial::tensor_product(&[&self.cardinals[k]])
    }
}

/// Inverse of a square rational matrix by Gauss-Jordan elimination.
pub(crate) fn invert(matrix: Vec<Vec<Rational>>) -> Result<Vec<Vec<Rational>>> {
    let size = matrix.len();
    let mut rows: Vec<Vec<Rational>> = matrix
        .into_iter()
        .enumerate()
        .map(|(r, mut row)| {
            row.extend((0..size).map(|c| {
                if c == r {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            row
        })
        .collect();
    for col in 0..size {
        let pivot = (col..size)
            .find(|&r| !rows[r][col].is_zero())
            .ok_or(Error::SingularSystem)?;
        rows.swap(col, pivot);
        let inv = rows[col][col].recip();
        for v in rows[col].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[col].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
    }
    Ok(rows.into_iter().map(|row| row[size..].to_vec()).collect())
}

/// Solves the confluent Vandermonde system for the cardinal basis on `coordinates`.
pub fn univariate_cardinals(coordinates: &[Rational]) -> Result<UnivariateCardinalSet> {
    let size = coordinates.len();
    // Row k' holds D^{ρ(k')} x^i evaluated at x_{k'}, for i = 0..size.
    let rows: Vec<Vec<Rational>> = (0..size)
        .map(|kp| {
            let rho = univariate_left_multiplicity(&coordinates[..=kp]);
            let x = &coordinates[kp];
            (0..size as u32)
                .map(|i| {
                    if i < rho {
                        Rational::zero()
                    } else {
                        Rational::from_integer(falling_factorial(i, rho)) * pow(x, i - rho)
                    }
                })
                .collect()
        })
        .collect();
    let inverse = invert(rows)?;
    // Column k of V^{-1} holds the coefficients of ℓ_k.
    let cardinals = (0..size)
        .map(|k| (0..size).map(|i| inverse[i][k].clone()).collect())
        .collect();
    Ok(UnivariateCardinalSet {
        coordinates: coordinates.to_vec(),
        cardinals,
    })
}

/// Univariate cardinal sets for every axis and every prefix length of a grid.
///
/// Entry `[j][a]` holds the cardinals on `x_{j,0..=a}`.
#[derive(Clone, Debug)]
pub struct CardinalCache {
    axes: Vec<Vec<UnivariateCardinalSet>>,
}

impl CardinalCache {
    pub fn new(coords: &GridCoordinates) -> Result<Self> {
        let axes = (0..coords.dim())
            .map(|j| {
                let axis = coords.axis(j);
                (0..axis.len())
                    .map(|a| univariate_cardinals(&axis[..=a]))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CardinalCache { axes })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn cardinals(&self, axis: usize, a: u32) -> &UnivariateCardinalSet {
        &self.axes[axis][a as usize]
    }

    /// `φ_{β,α}(x) = ∏_j ℓ^{(α_j)}_{β_j}(x_j)`.
    pub fn block_basis(&self, beta: &MultiIndex, alpha: &MultiIndex) -> Result<Polynomial> {
        self.check_block(alpha)?;
        if beta.dim() != alpha.dim() || !beta.is_below(alpha) {
            return Err(Error::NotBelow(beta.clone(), alpha.clone()));
        }
        let factors: Vec<&[Rational]> = (0..alpha.dim())
            .map(|j| self.cardinals(j, alpha[j]).coefficients(beta[j] as usize))
            .collect();
        Ok(Polynomial::tensor_product(&factors))
    }

    /// `p_α = Σ_{β ≤ α} data(β) φ_{β,α}`.
    pub fn block_interpolant(
        &self,
        alpha: &MultiIndex,
        data: &BTreeMap<MultiIndex, Rational>,
    ) -> Result<Polynomial> {
        self.check_block(alpha)?;
        let mut p = Polynomial::zero(alpha.dim());
        for beta in alpha.block_members() {
            let value = data
                .get(&beta)
                .ok_or_else(|| Error::MissingData(beta.clone()))?;
            if value.is_zero() {
                continue;
            }
            p.add_scaled(&self.block_basis(&beta, alpha)?, value);
        }
        Ok(p)
    }

    fn check_block(&self, alpha: &MultiIndex) -> Result<()> {
        if alpha.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: alpha.dim(),
            });
        }
        let r = self.axes.first().map_or(0, |a| a.len() as u32 - 1);
        if alpha.max_entry() > r {
            return Err(Error::IndexOutOfRange {
                index: alpha.clone(),
                r,
            });
        }
        Ok(())
    }
}

/// The tensor-product cardinal function `φ_{β,α}` on the block `B_α`.
pub fn block_basis(
    coords: &GridCoordinates,
    beta: &MultiIndex,
    alpha: &MultiIndex,
) -> Result<Polynomial> {
    CardinalCache::new(coords)?.block_basis(beta, alpha)
}

/// Tensor-product interpolant on `B_α` to one functional value per block member.
pub fn block_interpolant(
    coords: &GridCoordinates,
    alpha: &MultiIndex,
    data: &BTreeMap<MultiIndex, Rational>,
) -> Result<Polynomial> {
    CardinalCache::new(coords)?.block_interpolant(alpha, data)
}
