//! Combination coefficients `c_α` expressing the lower-set interpolant on `S_r`
//! as a signed sum of tensor-product block interpolants, `p = Σ c_α p_α`.
//!
//! Two independent routes are provided: [`coeff_oracle`] evaluates the
//! inclusion-exclusion sum `Σ_ε (-1)^{|ε|} χ(L)(α + ε)` over all `2^n` shifts
//! for any lower set, and [`coeff_closed_form`] uses the boundary-point
//! characterisation together with the `c_{m,k}` formula and the `1_n` special case.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::{binomial, check_order, serendipity_members_from, LowerSet, MultiIndex};

fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `c_α = Σ_{ε ∈ {0,1}^n} (-1)^{|ε|} χ(L)(α + ε)` for any lower set.
pub fn coeff_oracle(set: &LowerSet, alpha: &MultiIndex) -> Result<i64> {
    if !set.contains(alpha) {
        return Err(Error::NotInSet(alpha.clone()));
    }
    let n = set.dim();
    let mut total = 0i64;
    for mask in 0u64..(1u64 << n) {
        let shifted: MultiIndex = (0..n)
            .map(|j| alpha[j] + ((mask >> j) & 1) as u32)
            .collect();
        if set.contains(&shifted) {
            total += sign(i64::from(mask.count_ones()));
        }
    }
    Ok(total)
}

/// `c_{m,k} = Σ_{i=0}^{m} (-1)^{k+i} C(m,i) C(n-m-1, k-2i)`, valid for `m < n`.
pub fn cmk(n: usize, m: usize, k: usize) -> Result<i64> {
    if m >= n {
        return Err(Error::InvalidArgument("c_{m,k} requires m < n"));
    }
    let (n, m, k) = (n as i64, m as i64, k as i64);
    let mut total = 0i64;
    for i in 0..=m {
        let term = binomial(m, i)?
            .checked_mul(binomial(n - m - 1, k - 2 * i)?)
            .ok_or(Error::Overflow("cmk"))?;
        total = total
            .checked_add(sign(k + i) * term)
            .ok_or(Error::Overflow("cmk"))?;
    }
    Ok(total)
}

/// `c_{1_n} = (-1)^{⌊r/2⌋} C(n-1, ⌊r/2⌋)`, valid when `r < 2n`.
pub fn coeff_all_ones(n: usize, r: u32) -> Result<i64> {
    let half = i64::from(r / 2);
    Ok(sign(half) * binomial(n as i64 - 1, half)?)
}

/// Closed-form `c_α` for `α ∈ S_r`.
pub fn coeff_closed_form(n: usize, r: u32, alpha: &MultiIndex) -> Result<i64> {
    check_order(n, r)?;
    if alpha.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: alpha.dim(),
        });
    }
    let degree = alpha.superlinear_degree();
    if degree > r {
        return Err(Error::NotInSet(alpha.clone()));
    }
    // Any zero entry forces c_α = 0.
    if alpha.multiplicity(0) > 0 {
        return Ok(0);
    }
    let m = alpha.multiplicity(1);
    if m == n {
        // α = 1_n lies on the boundary exactly when r < 2n.
        return if (r as usize) < 2 * n {
            coeff_all_ones(n, r)
        } else {
            Ok(0)
        };
    }
    // Boundary test for α ∈ N_1^n: |α|' > r - (n + m).
    if i64::from(degree) <= i64::from(r) - (n + m) as i64 {
        return Ok(0);
    }
    cmk(n, m, (r - degree) as usize)
}

/// Nonzero combination coefficients of `S_r`, keyed by multi-index in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub n: usize,
    pub r: u32,
    entries: BTreeMap<MultiIndex, i64>,
}

impl CoefficientTable {
    pub fn get(&self, alpha: &MultiIndex) -> i64 {
        self.entries.get(alpha).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, i64)> {
        self.entries.iter().map(|(a, &c)| (a, c))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &BTreeMap<MultiIndex, i64> {
        &self.entries
    }

    /// Aligned text listing `α`, `m_1(α)`, `k = r - |α|'` and `c_α`.
    pub fn to_text(&self) -> String {
        let width = self
            .entries
            .keys()
            .map(|a| a.to_string().len())
            .max()
            .unwrap_or(5)
            .max(5);
        let mut out = String::new();
        let _ = writeln!(out, "# n = {}, r = {}", self.n, self.r);
        let _ = writeln!(
            out,
            "{:<width$}  {:>3}  {:>3}  {:>6}",
            "alpha", "m1", "k", "c"
        );
        for (a, c) in &self.entries {
            let k = self.r - a.superlinear_degree();
            let _ = writeln!(
                out,
                "{:<width$}  {:>3}  {:>3}  {:>6}",
                a.to_string(),
                a.multiplicity(1),
                k,
                c
            );
        }
        out
    }
}

/// Nonzero coefficients of `S_r`, enumerating only candidates `α ∈ N_1^n ∩ S_r`.
pub fn coefficient_table(n: usize, r: u32) -> Result<CoefficientTable> {
    check_order(n, r)?;
    let mut entries = BTreeMap::new();
    for alpha in serendipity_members_from(n, r, 1) {
        let c = coeff_closed_form(n, r, &alpha)?;
        if c != 0 {
            entries.insert(alpha, c);
        }
    }
    Ok(CoefficientTable { n, r, entries })
}

/// The same table computed by the inclusion-exclusion oracle over all of `S_r`.
pub fn coefficient_table_oracle(n: usize, r: u32) -> Result<CoefficientTable> {
    let set = crate::multiindex::serendipity_set(n, r)?;
    let mut entries = BTreeMap::new();
    for alpha in set.iter() {
        let c = coeff_oracle(&set, alpha)?;
        if c != 0 {
            entries.insert(alpha.clone(), c);
        }
    }
    Ok(CoefficientTable { n, r, entries })
}

/// Rows `m = 0..n-1` of `c_{m,k}`, each for `k = 0..n+m-1`.
pub fn cmk_table(n: usize) -> Result<Vec<Vec<i64>>> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    (0..n)
        .map(|m| (0..n + m).map(|k| cmk(n, m, k)).collect())
        .collect()
}

/// Renders `c_{m,k}` tables for several `n` as aligned text with columns `n`, `m`, `k = 0, 1, ...`.
pub fn render_cmk_tables(ns: &[usize]) -> Result<String> {
    let widest = ns.iter().map(|&n| 2 * n - 1).max().unwrap_or(1);
    let mut out = String::new();
    let _ = write!(out, "{:>3} {:>3} |", "n", "m");
    for k in 0..widest {
        let _ = write!(out, " {k:>4}");
    }
    out.push('\n');
    let _ = writeln!(out, "{}", "-".repeat(9 + 5 * widest));
    for &n in ns {
        for (m, row) in cmk_table(n)?.into_iter().enumerate() {
            let label = if m == 0 { n.to_string() } else { String::new() };
            let _ = write!(out, "{label:>3} {m:>3} |");
            for v in row {
                let _ = write!(out, " {v:>4}");
            }
            out.push('\n');
        }
    }
    Ok(out)
}
