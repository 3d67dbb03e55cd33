//! Assembly and verification of serendipity bases.
//!
//! Each basis function is a signed sum of tensor-product cardinal functions,
//! `φ_β = Σ_{α ≥ β} c_α φ_{β,α}`, taken over the nonzero combination
//! coefficients of `S_r`. All arithmetic is exact.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::coefficients::{coefficient_table, CoefficientTable};
use crate::error::{Error, Result};
use crate::multiindex::{face_of, serendipity_set_with, FaceIndex, Limits, LowerSet, MultiIndex};
use crate::nodes::{hermite_conditions, Functional, GridCoordinates, GridScheme};
use crate::polynomial::{invert, to_f64, CardinalCache, Polynomial};
use crate::Rational;

/// Nodal (or Hermite) basis `{φ_α : α ∈ S_r}` of the serendipity space, with
/// `λ_{α'} φ_α = δ_{α,α'}`.
#[derive(Clone, Debug)]
pub struct SerendipityBasis {
    n: usize,
    r: u32,
    scheme: GridScheme,
    coords: GridCoordinates,
    set: LowerSet,
    coefficients: CoefficientTable,
    functionals: BTreeMap<MultiIndex, Functional>,
    functions: BTreeMap<MultiIndex, Polynomial>,
    cache: CardinalCache,
}

impl SerendipityBasis {
    pub fn build(n: usize, r: u32, scheme: &GridScheme) -> Result<Self> {
        Self::build_with_limits(n, r, scheme, &Limits::default())
    }

    pub fn build_with_limits(
        n: usize,
        r: u32,
        scheme: &GridScheme,
        limits: &Limits,
    ) -> Result<Self> {
        limits.check(n, r)?;
        let coords = GridCoordinates::build(scheme, n, r)?;
        Self::assemble(scheme.clone(), coords, limits)
    }

    /// Builds the basis on an explicit grid, e.g. a sub-grid of a higher-dimensional one.
    pub fn from_coordinates(coords: GridCoordinates, scheme: GridScheme) -> Result<Self> {
        let unbounded = Limits {
            max_n: usize::MAX,
            max_r: u32::MAX,
        };
        Self::assemble(scheme, coords, &unbounded)
    }

    fn assemble(scheme: GridScheme, coords: GridCoordinates, limits: &Limits) -> Result<Self> {
        let (n, r) = (coords.dim(), coords.order());
        let set = serendipity_set_with(n, r, limits)?;
        let coefficients = coefficient_table(n, r)?;
        let cache = CardinalCache::new(&coords)?;
        let functionals = set
            .iter()
            .map(|a| Ok((a.clone(), coords.functional(a)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;

        let support: Vec<(&MultiIndex, Rational)> = coefficients
            .iter()
            .map(|(a, c)| (a, Rational::from_integer(c.into())))
            .collect();
        let members: Vec<&MultiIndex> = set.iter().collect();
        let functions = members
            .par_iter()
            .map(|&beta| {
                let mut phi = Polynomial::zero(n);
                for (alpha, c) in &support {
                    if beta.is_below(alpha) {
                        phi.add_scaled(&cache.block_basis(beta, alpha)?, c);
                    }
                }
                Ok((beta.clone(), phi))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;

        Ok(SerendipityBasis {
            n,
            r,
            scheme,
            coords,
            set,
            coefficients,
            functionals,
            functions,
            cache,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.r
    }

    pub fn scheme(&self) -> &GridScheme {
        &self.scheme
    }

    pub fn coordinates(&self) -> &GridCoordinates {
        &self.coords
    }

    pub fn index_set(&self) -> &LowerSet {
        &self.set
    }

    pub fn coefficients(&self) -> &CoefficientTable {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn functions(&self) -> &BTreeMap<MultiIndex, Polynomial> {
        &self.functions
    }

    pub fn function(&self, alpha: &MultiIndex) -> Option<&Polynomial> {
        self.functions.get(alpha)
    }

    pub fn functionals(&self) -> &BTreeMap<MultiIndex, Functional> {
        &self.functionals
    }

    /// Replaces one basis function. Intended for negative controls in verification.
    pub fn replace_function(&mut self, alpha: &MultiIndex, p: Polynomial) -> Result<()> {
        if p.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: p.dim(),
            });
        }
        match self.functions.get_mut(alpha) {
            Some(slot) => {
                *slot = p;
                Ok(())
            }
            None => Err(Error::NotInSet(alpha.clone())),
        }
    }

    /// `λ_α u` for every `α ∈ S_r`.
    pub fn sample(&self, u: &Polynomial) -> Result<BTreeMap<MultiIndex, Rational>> {
        self.functionals
            .iter()
            .map(|(a, f)| Ok((a.clone(), u.apply_functional(f)?)))
            .collect()
    }

    /// `p = Σ_α data(α) φ_α`.
    pub fn interpolate(&self, data: &BTreeMap<MultiIndex, Rational>) -> Result<Polynomial> {
        let mut p = Polynomial::zero(self.n);
        for (alpha, phi) in &self.functions {
            let v = data
                .get(alpha)
                .ok_or_else(|| Error::MissingData(alpha.clone()))?;
            p.add_scaled(phi, v);
        }
        Ok(p)
    }

    /// `p = Σ_α c_α p_α`, the signed sum of block interpolants.
    pub fn interpolate_by_blocks(
        &self,
        data: &BTreeMap<MultiIndex, Rational>,
    ) -> Result<Polynomial> {
        if let Some(missing) = self.set.iter().find(|a| !data.contains_key(*a)) {
            return Err(Error::MissingData(missing.clone()));
        }
        let mut p = Polynomial::zero(self.n);
        for (alpha, c) in self.coefficients.iter() {
            let block = self.cache.block_interpolant(alpha, data)?;
            p.add_scaled(&block, &Rational::from_integer(c.into()));
        }
        Ok(p)
    }

    /// Blocks used by [`interpolate_by_blocks`](Self::interpolate_by_blocks) with their signs.
    pub fn block_terms(&self) -> Vec<(MultiIndex, i64)> {
        self.coefficients
            .iter()
            .map(|(a, c)| (a.clone(), c))
            .collect()
    }

    /// Hermite labels `α ↦ (face_of(α), ρ(α))`, checked to be a bijection onto the
    /// flattened condition sets `{(β, ρ) : ρ ∈ K_{r,β}}`.
    pub fn hermite_labels(&self) -> Result<BTreeMap<MultiIndex, (FaceIndex, MultiIndex)>> {
        hermite_labels(&self.coords, &self.set)
    }

    /// `[λ_{α'} φ_α]` with rows `α'` and columns `α`, both in lexicographic order.
    pub fn delta_matrix(&self) -> Result<Vec<Vec<Rational>>> {
        let functionals: Vec<&Functional> = self.functionals.values().collect();
        functionals
            .par_iter()
            .map(|f| {
                self.functions
                    .values()
                    .map(|phi| phi.apply_functional(f))
                    .collect::<Result<Vec<_>>>()
            })
            .collect()
    }

    /// Runs every property check and reports the worst residual of each.
    pub fn verify(&self) -> VerifyReport {
        let mut checks = vec![
            self.check_delta(),
            self.check_reproduction(),
            self.check_partition_of_unity(),
            self.check_support(),
            self.check_route_equivalence(),
            self.check_face_nesting(),
        ];
        if self.n <= 2 && self.r <= 4 {
            checks.push(self.check_against_system_solve());
        }
        VerifyReport {
            n: self.n,
            r: self.r,
            scheme: self.scheme.name().to_string(),
            checks,
        }
    }

    fn check_delta(&self) -> CheckResult {
        let result = self.delta_matrix().map(|m| {
            let mut worst = Rational::zero();
            for (i, row) in m.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    let want = if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    };
                    worst = worst.max((v - want).abs());
                }
            }
            worst
        });
        CheckResult::from_residual("delta", result, "λ_α' φ_α = δ over S_r x S_r")
    }

    fn check_reproduction(&self) -> CheckResult {
        let result = (|| {
            let mut worst = Rational::zero();
            for gamma in self.set.iter() {
                let u = Polynomial::monomial(gamma.clone(), Rational::one());
                let p = self.interpolate(&self.sample(&u)?)?;
                worst = worst.max((&p - &u).max_abs_coefficient());
            }
            Ok(worst)
        })();
        CheckResult::from_residual("reproduction", result, "x^γ reproduced for all γ ∈ S_r")
    }

    fn check_partition_of_unity(&self) -> CheckResult {
        let result = (|| {
            let one = Polynomial::one(self.n);
            let data = self.sample(&one)?;
            let sum = self.interpolate(&data)?;
            Ok((&sum - &one).max_abs_coefficient())
        })();
        CheckResult::from_residual("partition_of_unity", result, "Σ φ_α λ_α(1) = 1")
    }

    fn check_support(&self) -> CheckResult {
        let outside = self
            .functions
            .values()
            .flat_map(|p| p.support())
            .filter(|e| !self.set.contains(e))
            .count();
        CheckResult {
            name: "support".into(),
            passed: outside == 0,
            residual: Rational::from_integer(outside.into()),
            detail: format!("{outside} monomials outside S_r"),
        }
    }

    fn check_route_equivalence(&self) -> CheckResult {
        let result = (|| {
            // Arbitrary nonzero data with varying signs and magnitudes.
            let data: BTreeMap<MultiIndex, Rational> = self
                .set
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let i = i as i64;
                    let sign = if i % 3 == 1 { -1 } else { 1 };
                    (
                        a.clone(),
                        Rational::new((sign * (i + 1)).into(), (i % 4 + 1).into()),
                    )
                })
                .collect();
            let by_basis = self.interpolate(&data)?;
            let by_blocks = self.interpolate_by_blocks(&data)?;
            Ok((&by_basis - &by_blocks).max_abs_coefficient())
        })();
        CheckResult::from_residual("route_equivalence", result, "Σ data(α) φ_α = Σ c_α p_α")
    }

    fn check_face_nesting(&self) -> CheckResult {
        let result = (|| {
            let mut worst = Rational::zero();
            let mut lower: BTreeMap<Vec<usize>, SerendipityBasis> = BTreeMap::new();
            for face in FaceIndex::all(self.n) {
                let d = face.dim();
                if d == self.n {
                    continue;
                }
                let free = face.free_axes();
                if d > 0 && !lower.contains_key(&free) {
                    let sub = SerendipityBasis::from_coordinates(
                        self.coords.sub_axes(&free),
                        self.scheme.clone(),
                    )?;
                    lower.insert(free.clone(), sub);
                }
                for (alpha, phi) in &self.functions {
                    let on_face = face.closure_contains(alpha);
                    match restrict_to_face(phi, &face)? {
                        FaceRestriction::Value(v) => {
                            let want = if on_face {
                                Rational::one()
                            } else {
                                Rational::zero()
                            };
                            worst = worst.max((v - want).abs());
                        }
                        FaceRestriction::Polynomial(p) => {
                            let diff = if on_face {
                                let sub = &lower[&free];
                                let target = sub
                                    .function(&alpha.select(&free))
                                    .ok_or_else(|| Error::NotInSet(alpha.select(&free)))?;
                                &p - target
                            } else {
                                p
                            };
                            worst = worst.max(diff.max_abs_coefficient());
                        }
                    }
                }
            }
            Ok(worst)
        })();
        CheckResult::from_residual(
            "face_nesting",
            result,
            "restriction to every proper face equals the lower-dimensional basis",
        )
    }

    /// Independent route: invert the generalized Vandermonde matrix `[λ_{α'} x^γ]`.
    fn check_against_system_solve(&self) -> CheckResult {
        let result = (|| {
            let solved = solve_basis_directly(&self.coords, &self.set)?;
            let mut worst = Rational::zero();
            for (alpha, phi) in &self.functions {
                worst = worst.max((phi - &solved[alpha]).max_abs_coefficient());
            }
            Ok(worst)
        })();
        CheckResult::from_residual(
            "system_solve",
            result,
            "agrees with direct inversion of the interpolation matrix",
        )
    }
}

/// Basis of `P(L)` obtained by inverting `[λ_{α'} x^γ]` over `α', γ ∈ L`.
pub fn solve_basis_directly(
    coords: &GridCoordinates,
    set: &LowerSet,
) -> Result<BTreeMap<MultiIndex, Polynomial>> {
    let members: Vec<&MultiIndex> = set.iter().collect();
    let functionals = coords.functionals_for(set)?;
    let matrix = functionals
        .iter()
        .map(|f| {
            members
                .iter()
                .map(|&g| Polynomial::monomial(g.clone(), Rational::one()).apply_functional(f))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let inverse = invert(matrix)?;
    // Column α of the inverse holds the monomial coefficients of φ_α.
    Ok(members
        .iter()
        .enumerate()
        .map(|(col, &alpha)| {
            let terms = members
                .iter()
                .enumerate()
                .map(|(row, &g)| (g.clone(), inverse[row][col].clone()));
            let p = Polynomial::from_terms(set.dim(), terms).expect("dimensions agree");
            (alpha.clone(), p)
        })
        .collect())
}

/// `p = Σ_α data(α) φ_α` without keeping the basis around.
pub fn interpolate(
    n: usize,
    r: u32,
    scheme: &GridScheme,
    data: &BTreeMap<MultiIndex, Rational>,
) -> Result<Polynomial> {
    SerendipityBasis::build(n, r, scheme)?.interpolate(data)
}

fn hermite_labels(
    coords: &GridCoordinates,
    set: &LowerSet,
) -> Result<BTreeMap<MultiIndex, (FaceIndex, MultiIndex)>> {
    let expected: BTreeSet<(FaceIndex, MultiIndex)> =
        hermite_conditions(coords.dim(), coords.order())?
            .into_iter()
            .flat_map(|c| {
                let beta = c.beta;
                c.orders.into_iter().map(move |rho| (beta.clone(), rho))
            })
            .collect();
    let mut labels = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for alpha in set.iter() {
        let label = (face_of(alpha), coords.left_multiplicity(alpha)?);
        if !expected.contains(&label) {
            return Err(Error::HermiteIndexing(format!(
                "{alpha} maps to ({}, {}) outside the condition sets",
                label.0, label.1
            )));
        }
        if !seen.insert(label.clone()) {
            return Err(Error::HermiteIndexing(format!(
                "({}, {}) is hit twice",
                label.0, label.1
            )));
        }
        labels.insert(alpha.clone(), label);
    }
    if seen.len() != expected.len() {
        return Err(Error::HermiteIndexing(format!(
            "{} of {} conditions covered",
            seen.len(),
            expected.len()
        )));
    }
    Ok(labels)
}

/// Hermite basis `φ_{β,ρ}` with `D^{ρ'} φ_{β,ρ}(y_{β'}) = δ_{β,β'} δ_{ρ,ρ'}`.
pub fn hermite_basis(n: usize, r: u32) -> Result<BTreeMap<(FaceIndex, MultiIndex), Polynomial>> {
    let basis = SerendipityBasis::build(n, r, &GridScheme::HermiteMidpoint)?;
    let labels = basis.hermite_labels()?;
    Ok(basis
        .functions
        .into_iter()
        .map(|(alpha, p)| (labels[&alpha].clone(), p))
        .collect())
}

/// Restriction of a polynomial to the closure of a face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FaceRestriction {
    /// The face is a vertex: the restriction is a single value.
    Value(Rational),
    /// A polynomial in the face's free variables, in increasing axis order.
    Polynomial(Polynomial),
}

/// Pins `x_j = -1` where `β_j = 0` and `x_j = 1` where `β_j = 1`.
pub fn restrict_to_face(p: &Polynomial, face: &FaceIndex) -> Result<FaceRestriction> {
    if face.ambient_dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            actual: face.ambient_dim(),
        });
    }
    let values: Vec<Option<Rational>> = face
        .entries()
        .iter()
        .map(|&b| match b {
            0 => Some(-Rational::one()),
            1 => Some(Rational::one()),
            _ => None,
        })
        .collect();
    let restricted = p.partial_evaluate(&values)?;
    if face.dim() == 0 {
        Ok(FaceRestriction::Value(
            restricted.coefficient(&MultiIndex::zeros(0)),
        ))
    } else {
        Ok(FaceRestriction::Polynomial(restricted))
    }
}

/// Outcome of one verification property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst exact deviation; zero when the property holds.
    pub residual: Rational,
    pub detail: String,
}

impl CheckResult {
    fn from_residual(name: &str, residual: Result<Rational>, what: &str) -> Self {
        match residual {
            Ok(res) => CheckResult {
                name: name.into(),
                passed: res.is_zero(),
                residual: res,
                detail: what.into(),
            },
            Err(e) => CheckResult {
                name: name.into(),
                passed: false,
                residual: Rational::zero(),
                detail: format!("error: {e}"),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub n: usize,
    pub r: u32,
    pub scheme: String,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "n = {}, r = {}, scheme = {}",
            self.n, self.r, self.scheme
        )?;
        for c in &self.checks {
            writeln!(
                f,
                "  [{}] {:<20} residual {:<12} {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                to_f64(&c.residual),
                c.detail
            )?;
        }
        write!(
            f,
            "{}",
            if self.passed() {
                "all checks passed"
            } else {
                "verification FAILED"
            }
        )
    }
}
