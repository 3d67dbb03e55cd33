//! Multi-indices, lower sets and the serendipity index set `S_r`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered tuple of `n` non-negative integers.
///
/// Indexes monomials `x^α`, grid points `x_α` and derivative orders alike.
/// Ordering is lexicographic on the entries.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The all-ones index `1_n`.
    pub fn ones(n: usize) -> Self {
        MultiIndex(vec![1; n])
    }

    /// The unit index `e_j` in dimension `n`.
    pub fn unit(n: usize, j: usize) -> Self {
        let mut e = vec![0; n];
        e[j] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<u32> {
        self.0
    }

    /// `|α| = Σ α_j`, the degree of `x^α`.
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `|α|'`, the total degree counting only entries that are at least 2.
    pub fn superlinear_degree(&self) -> u32 {
        self.0.iter().filter(|&&a| a >= 2).sum()
    }

    /// `m_i(α)`, the number of entries equal to `i`.
    pub fn multiplicity(&self, i: u32) -> usize {
        self.0.iter().filter(|&&a| a == i).count()
    }

    /// Componentwise partial order `self <= other`.
    pub fn is_below(&self, other: &MultiIndex) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn max_entry(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// Componentwise sum. Panics on mismatched dimensions.
    pub fn plus(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.dim(), other.dim(), "multi-index dimension mismatch");
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - e_j`, or `None` if the entry is already zero.
    pub fn predecessor(&self, j: usize) -> Option<MultiIndex> {
        let mut v = self.0.clone();
        v[j] = v[j].checked_sub(1)?;
        Some(MultiIndex(v))
    }

    /// Entries at the given axes, in order.
    pub fn select(&self, axes: &[usize]) -> MultiIndex {
        MultiIndex(axes.iter().map(|&j| self.0[j]).collect())
    }

    /// All `μ <= self`, in lexicographic order.
    pub fn block_members(&self) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.dim()];
        fill_block(&self.0, 0, &mut cur, &mut out);
        out
    }
}

fn fill_block(corner: &[u32], axis: usize, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if axis == corner.len() {
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for v in 0..=corner[axis] {
        cur[axis] = v;
        fill_block(corner, axis + 1, cur, out);
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

impl<const N: usize> From<[u32; N]> for MultiIndex {
    fn from(v: [u32; N]) -> Self {
        MultiIndex(v.to_vec())
    }
}

impl FromIterator<u32> for MultiIndex {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        MultiIndex(iter.into_iter().collect())
    }
}

impl std::ops::Index<usize> for MultiIndex {
    type Output = u32;

    fn index(&self, j: usize) -> &u32 {
        &self.0[j]
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// A finite downward-closed set of multi-indices in a fixed dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerSet {
    dim: usize,
    members: BTreeSet<MultiIndex>,
}

impl LowerSet {
    /// Builds a lower set, rejecting collections that are not downward closed.
    pub fn new(dim: usize, members: impl IntoIterator<Item = MultiIndex>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let members: BTreeSet<MultiIndex> = members.into_iter().collect();
        for alpha in &members {
            if alpha.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: alpha.dim(),
                });
            }
        }
        let set = LowerSet { dim, members };
        if let Some((member, missing)) = set.closure_violation() {
            return Err(Error::NotLowerSet { member, missing });
        }
        Ok(set)
    }

    /// The rectangular block `B_α = {μ : μ <= α}`.
    pub fn block(corner: &MultiIndex) -> Self {
        LowerSet {
            dim: corner.dim(),
            members: corner.block_members().into_iter().collect(),
        }
    }

    // Closure under single-step decrements implies closure under `<=`.
    fn closure_violation(&self) -> Option<(MultiIndex, MultiIndex)> {
        for alpha in &self.members {
            for j in 0..self.dim {
                if let Some(mu) = alpha.predecessor(j) {
                    if !self.members.contains(&mu) {
                        return Some((alpha.clone(), mu));
                    }
                }
            }
        }
        None
    }

    /// Exhaustive check of the closure property: every `μ <= α` of every member is present.
    pub fn is_downward_closed(&self) -> bool {
        self.members
            .iter()
            .all(|a| a.block_members().iter().all(|mu| self.members.contains(mu)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, alpha: &MultiIndex) -> bool {
        self.members.contains(alpha)
    }

    /// Members in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = &MultiIndex> {
        self.members.iter()
    }

    pub fn members(&self) -> &BTreeSet<MultiIndex> {
        &self.members
    }

    /// `∂L = {α ∈ L : α + 1_n ∉ L}`.
    pub fn boundary_points(&self) -> BTreeSet<MultiIndex> {
        let ones = MultiIndex::ones(self.dim);
        self.members
            .iter()
            .filter(|a| !self.members.contains(&a.plus(&ones)))
            .cloned()
            .collect()
    }
}

impl<'a> IntoIterator for &'a LowerSet {
    type Item = &'a MultiIndex;
    type IntoIter = std::collections::btree_set::Iter<'a, MultiIndex>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

/// A face `f_β` of the cube, one of `3^n`.
///
/// Entry 0 pins the axis at -1, entry 1 pins it at +1, entry 2 leaves it free.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct FaceIndex(Vec<u8>);

impl FaceIndex {
    pub fn new(beta: Vec<u8>) -> Result<Self> {
        if beta.iter().any(|&b| b > 2) {
            return Err(Error::InvalidFaceIndex);
        }
        Ok(FaceIndex(beta))
    }

    pub fn entries(&self) -> &[u8] {
        &self.0
    }

    pub fn ambient_dim(&self) -> usize {
        self.0.len()
    }

    /// `dim f_β`, the number of free axes.
    pub fn dim(&self) -> usize {
        self.0.iter().filter(|&&b| b == 2).count()
    }

    /// Axes with `β_j = 2`, increasing.
    pub fn free_axes(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&j| self.0[j] == 2).collect()
    }

    /// Every face of the `n`-cube, lexicographically.
    pub fn all(n: usize) -> Vec<FaceIndex> {
        let mut out = vec![Vec::with_capacity(n)];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..3u8).map(move |b| {
                        let mut v = prefix.clone();
                        v.push(b);
                        v
                    })
                })
                .collect();
        }
        out.into_iter().map(FaceIndex).collect()
    }

    /// Whether `α` indexes a node on the closure of this face: pinned axes match exactly.
    pub fn closure_contains(&self, alpha: &MultiIndex) -> bool {
        self.0
            .iter()
            .zip(alpha.entries())
            .all(|(&b, &a)| b == 2 || u32::from(b) == a)
    }

    /// The face midpoint `y_β`: pinned axes at ±1, free axes at 0.
    pub fn midpoint(&self) -> Vec<i32> {
        self.0
            .iter()
            .map(|&b| match b {
                0 => -1,
                1 => 1,
                _ => 0,
            })
            .collect()
    }
}

impl TryFrom<Vec<u8>> for FaceIndex {
    type Error = Error;

    fn try_from(v: Vec<u8>) -> Result<Self> {
        FaceIndex::new(v)
    }
}

impl From<FaceIndex> for Vec<u8> {
    fn from(f: FaceIndex) -> Self {
        f.0
    }
}

impl fmt::Display for FaceIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|b| b.to_string()).collect();
        write!(f, "[{}]", s.join(","))
    }
}

/// `β_j = min(α_j, 2)`.
pub fn face_of(alpha: &MultiIndex) -> FaceIndex {
    FaceIndex(alpha.entries().iter().map(|&a| a.min(2) as u8).collect())
}

/// The rectangular block `B_α` with its corner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub corner: MultiIndex,
}

impl Block {
    pub fn new(corner: MultiIndex) -> Self {
        Block { corner }
    }

    pub fn cardinality(&self) -> usize {
        self.corner
            .entries()
            .iter()
            .map(|&a| a as usize + 1)
            .product()
    }

    pub fn contains(&self, mu: &MultiIndex) -> bool {
        mu.is_below(&self.corner)
    }

    pub fn members(&self) -> LowerSet {
        LowerSet::block(&self.corner)
    }
}

/// Guard rails on `(n, r)` to keep enumeration sizes reasonable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_n: usize,
    pub max_r: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_n: 8,
            max_r: 16,
        }
    }
}

impl Limits {
    pub fn check(&self, n: usize, r: u32) -> Result<()> {
        check_order(n, r)?;
        if n > self.max_n || r > self.max_r {
            return Err(Error::LimitExceeded {
                n,
                r,
                max_n: self.max_n,
                max_r: self.max_r,
            });
        }
        Ok(())
    }
}

pub(crate) fn check_order(n: usize, r: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    if r == 0 {
        return Err(Error::InvalidOrder(r));
    }
    Ok(())
}

/// `S_r = {α : |α|' <= r}` in dimension `n`, under the default limits.
pub fn serendipity_set(n: usize, r: u32) -> Result<LowerSet> {
    serendipity_set_with(n, r, &Limits::default())
}

pub fn serendipity_set_with(n: usize, r: u32, limits: &Limits) -> Result<LowerSet> {
    limits.check(n, r)?;
    let mut members = BTreeSet::new();
    let mut cur = vec![0u32; n];
    enumerate_superlinear(n, r, 0, 0, 0, &mut cur, &mut members);
    Ok(LowerSet { dim: n, members })
}

/// Members of `S_r` with every entry at least `lowest` (0 for all of `S_r`, 1 for `S_r ∩ N_1^n`).
pub(crate) fn serendipity_members_from(n: usize, r: u32, lowest: u32) -> Vec<MultiIndex> {
    let mut members = BTreeSet::new();
    let mut cur = vec![0u32; n];
    enumerate_superlinear(n, r, lowest, 0, 0, &mut cur, &mut members);
    members.into_iter().collect()
}

fn enumerate_superlinear(
    n: usize,
    r: u32,
    lowest: u32,
    axis: usize,
    used: u32,
    cur: &mut Vec<u32>,
    out: &mut BTreeSet<MultiIndex>,
) {
    if axis == n {
        out.insert(MultiIndex(cur.clone()));
        return;
    }
    for v in lowest..=r.max(1) {
        let cost = if v >= 2 { v } else { 0 };
        if used + cost > r {
            break;
        }
        cur[axis] = v;
        enumerate_superlinear(n, r, lowest, axis + 1, used + cost, cur, out);
    }
}

/// Partition of `S_r` into cells `S_{r,β}`; faces with empty cells are omitted.
pub fn face_partition(n: usize, r: u32) -> Result<BTreeMap<FaceIndex, BTreeSet<MultiIndex>>> {
    let set = serendipity_set(n, r)?;
    let mut cells: BTreeMap<FaceIndex, BTreeSet<MultiIndex>> = BTreeMap::new();
    for alpha in set.iter() {
        cells
            .entry(face_of(alpha))
            .or_default()
            .insert(alpha.clone());
    }
    Ok(cells)
}

/// `#S_{r,β}` for a face of dimension `d`: `C(r-d, d)` when `r >= 2d`, else 0.
pub fn face_cell_size(r: u32, d: usize) -> Result<i64> {
    if (r as usize) < 2 * d {
        return Ok(0);
    }
    binomial(i64::from(r) - d as i64, d as i64)
}

/// Number of faces of dimension `d` of the `n`-cube, `2^{n-d} C(n, d)`.
pub fn face_count(n: usize, d: usize) -> Result<u64> {
    if d > n {
        return Err(Error::FaceDimension { n, d });
    }
    let pow = 1u64
        .checked_shl((n - d) as u32)
        .filter(|_| n - d < 64)
        .ok_or(Error::Overflow("face_count"))?;
    let c = binomial(n as i64, d as i64)? as u64;
    pow.checked_mul(c).ok_or(Error::Overflow("face_count"))
}

/// `dim S_r = Σ_{d=0}^{min(n, ⌊r/2⌋)} 2^{n-d} C(n,d) C(r-d,d)`.
pub fn serendipity_dimension(n: usize, r: u32) -> Result<u64> {
    check_order(n, r)?;
    let top = n.min((r / 2) as usize);
    let mut total = 0u64;
    for d in 0..=top {
        let term = face_count(n, d)?
            .checked_mul(face_cell_size(r, d)? as u64)
            .ok_or(Error::Overflow("serendipity_dimension"))?;
        total = total
            .checked_add(term)
            .ok_or(Error::Overflow("serendipity_dimension"))?;
    }
    Ok(total)
}

/// Binomial coefficient with `C(l, j) = 0` for `j < 0` or `j > l`.
pub fn binomial(l: i64, j: i64) -> Result<i64> {
    if j < 0 || l < 0 || j > l {
        return Ok(0);
    }
    let j = j.min(l - j);
    let mut c: i64 = 1;
    for i in 0..j {
        // c * (l - i) is divisible by (i + 1) after the multiplication.
        c = c.checked_mul(l - i).ok_or(Error::Overflow("binomial"))? / (i + 1);
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi<const N: usize>(v: [u32; N]) -> MultiIndex {
        MultiIndex::from(v)
    }

    #[test]
    fn degrees() {
        assert_eq!(mi([0, 0, 0]).total_degree(), 0);
        assert_eq!(mi([2, 1, 3]).total_degree(), 6);
        assert_eq!(mi([5]).total_degree(), 5);
        assert_eq!(mi([1, 1, 1]).superlinear_degree(), 0);
        assert_eq!(mi([2, 1, 3]).superlinear_degree(), 5);
        let doubled = MultiIndex::ones(2).plus(&MultiIndex::ones(2));
        assert_eq!(doubled.superlinear_degree(), 4);
    }

    #[test]
    fn serendipity_set_examples() {
        let s = serendipity_set(1, 3).unwrap();
        let v: Vec<_> = s.iter().cloned().collect();
        assert_eq!(v, vec![mi([0]), mi([1]), mi([2]), mi([3])]);

        let s = serendipity_set(2, 2).unwrap();
        let expected: BTreeSet<_> = [
            mi([0, 0]),
            mi([0, 1]),
            mi([1, 0]),
            mi([1, 1]),
            mi([2, 0]),
            mi([0, 2]),
            mi([2, 1]),
            mi([1, 2]),
        ]
        .into_iter()
        .collect();
        assert_eq!(s.members(), &expected);

        let s = serendipity_set(2, 1).unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.iter().all(|a| a.max_entry() <= 1));
    }

    #[test]
    fn serendipity_set_rejects_bad_orders() {
        assert_eq!(serendipity_set(0, 2), Err(Error::ZeroDimension));
        assert_eq!(serendipity_set(2, 0), Err(Error::InvalidOrder(0)));
        assert!(matches!(
            serendipity_set(9, 2),
            Err(Error::LimitExceeded { .. })
        ));
        let loose = Limits { max_n: 9, max_r: 2 };
        assert!(serendipity_set_with(9, 2, &loose).is_ok());
    }

    #[test]
    fn faces() {
        assert_eq!(face_of(&mi([0, 1, 5])).entries(), &[0, 1, 2]);
        assert_eq!(face_of(&mi([1, 1])).dim(), 0);
        assert_eq!(face_of(&mi([3, 2])).entries(), &[2, 2]);
        assert_eq!(face_count(3, 0).unwrap(), 8);
        assert_eq!(face_count(3, 1).unwrap(), 12);
        assert_eq!(face_count(2, 2).unwrap(), 1);
        assert_eq!(face_count(2, 3), Err(Error::FaceDimension { n: 2, d: 3 }));
        assert_eq!(FaceIndex::all(3).len(), 27);
        assert!(FaceIndex::new(vec![0, 3]).is_err());
    }

    #[test]
    fn partition_cells() {
        let cells = face_partition(2, 4).unwrap();
        let edge = FaceIndex::new(vec![2, 1]).unwrap();
        let interior = FaceIndex::new(vec![2, 2]).unwrap();
        assert_eq!(cells[&edge].len(), 3);
        assert_eq!(cells[&interior].len(), 1);
        for vertex in FaceIndex::all(2).into_iter().filter(|f| f.dim() == 0) {
            let cell = &cells[&vertex];
            assert_eq!(cell.len(), 1);
            let alpha: MultiIndex = vertex.entries().iter().map(|&b| u32::from(b)).collect();
            assert!(cell.contains(&alpha));
        }
    }

    #[test]
    fn dimension_formula() {
        assert_eq!(serendipity_dimension(2, 2).unwrap(), 8);
        assert_eq!(serendipity_dimension(2, 4).unwrap(), 17);
        assert_eq!(serendipity_dimension(3, 2).unwrap(), 20);
        for r in 1..=6 {
            assert_eq!(serendipity_dimension(1, r).unwrap(), u64::from(r) + 1);
        }
    }

    #[test]
    fn boundary_points_examples() {
        let line = LowerSet::new(1, [mi([0]), mi([1]), mi([2])]).unwrap();
        assert_eq!(
            line.boundary_points().into_iter().collect::<Vec<_>>(),
            vec![mi([2])]
        );

        // (0,0) + (1,1) = (1,1) stays in the block; the other three members leave it.
        let block = LowerSet::block(&mi([1, 1]));
        let expected: BTreeSet<_> = [mi([0, 1]), mi([1, 0]), mi([1, 1])].into_iter().collect();
        assert_eq!(block.boundary_points(), expected);

        // (0,0)+(1,1), (1,0)+(1,1) and (0,1)+(1,1) all stay inside S_2.
        let s2 = serendipity_set(2, 2).unwrap();
        let expected: BTreeSet<_> = s2
            .iter()
            .filter(|a| !s2.contains(&a.plus(&MultiIndex::ones(2))))
            .cloned()
            .collect();
        let boundary = s2.boundary_points();
        assert_eq!(boundary, expected);
        for interior in [mi([0, 0]), mi([1, 0]), mi([0, 1])] {
            assert!(!boundary.contains(&interior));
        }
        assert_eq!(boundary.len(), 5);
    }

    #[test]
    fn multiplicities() {
        assert_eq!(mi([0, 2, 0]).multiplicity(0), 2);
        assert_eq!(mi([1, 1, 1]).multiplicity(1), 3);
        assert_eq!(mi([3, 1, 2]).multiplicity(1), 1);
    }

    #[test]
    fn lower_set_validation() {
        assert!(matches!(
            LowerSet::new(2, [mi([0, 0]), mi([1, 1])]),
            Err(Error::NotLowerSet { .. })
        ));
        assert!(matches!(
            LowerSet::new(2, [mi([0])]),
            Err(Error::DimensionMismatch { .. })
        ));
        let block = LowerSet::block(&mi([2, 1, 3]));
        assert_eq!(block.len(), Block::new(mi([2, 1, 3])).cardinality());
        assert!(block.is_downward_closed());
        assert!(block.contains(&MultiIndex::zeros(3)));
    }

    #[test]
    fn binomial_convention() {
        assert_eq!(binomial(5, -1).unwrap(), 0);
        assert_eq!(binomial(3, 4).unwrap(), 0);
        assert_eq!(binomial(-1, 0).unwrap(), 0);
        assert_eq!(binomial(6, 3).unwrap(), 20);
        assert_eq!(binomial(0, 0).unwrap(), 1);
        assert!(binomial(200, 100).is_err());
    }
}
