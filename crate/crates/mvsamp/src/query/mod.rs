//! Multivariate range queries over raw grids and sampled point sets.
//!
//! A query is a boolean combination (AND/OR) of per-variable range
//! predicates, written in a small expression language:
//!
//! ```text
//! -4900 < pressure < -100 AND velocity > 10
//! 0.3 < mixfrac < 0.7 AND 0.0006 < y_oh < 0.1
//! ```
//!
//! AND binds tighter than OR; parentheses group. Chained comparisons with
//! reversed bounds are canonicalized (swapped) with a warning. Evaluation is a
//! full scan; results are ascending index sets, and a query on a sampled
//! point set always returns a subset of the same query on the raw grid.

mod parse;

pub use parse::{parse_query, ParsedQuery};

use crate::error::{Error, Result};
use crate::fieldio::{GridDims, MultiField, SampledPointSet};

/// One variable's value-range predicate. Missing bounds are the infinities.
#[derive(Debug, Clone, PartialEq)]
pub struct RangePredicate {
    pub variable: String,
    pub lo: f64,
    pub hi: f64,
    pub lo_inclusive: bool,
    pub hi_inclusive: bool,
}

impl RangePredicate {
    #[inline]
    pub fn matches(&self, v: f64) -> bool {
        let above = if self.lo_inclusive { v >= self.lo } else { v > self.lo };
        let below = if self.hi_inclusive { v <= self.hi } else { v < self.hi };
        above && below
    }
}

impl std::fmt::Display for RangePredicate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.lo == f64::NEG_INFINITY, self.hi == f64::INFINITY) {
            (false, false) => write!(
                f,
                "{} {} {} {} {}",
                self.lo,
                if self.lo_inclusive { "<=" } else { "<" },
                self.variable,
                if self.hi_inclusive { "<=" } else { "<" },
                self.hi
            ),
            (false, true) => write!(
                f,
                "{} {} {}",
                self.variable,
                if self.lo_inclusive { ">=" } else { ">" },
                self.lo
            ),
            (true, false) => write!(
                f,
                "{} {} {}",
                self.variable,
                if self.hi_inclusive { "<=" } else { "<" },
                self.hi
            ),
            (true, true) => write!(f, "{} > -inf", self.variable),
        }
    }
}

/// Boolean combination of range predicates.
#[derive(Debug, Clone, PartialEq)]
pub enum QueryExpr {
    Leaf(RangePredicate),
    And(Vec<QueryExpr>),
    Or(Vec<QueryExpr>),
}

impl QueryExpr {
    /// All variables the expression references.
    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_variables(&mut out);
        out.dedup();
        out
    }

    fn collect_variables<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            QueryExpr::Leaf(p) => {
                if !out.contains(&p.variable.as_str()) {
                    out.push(&p.variable);
                }
            }
            QueryExpr::And(cs) | QueryExpr::Or(cs) => {
                for c in cs {
                    c.collect_variables(out);
                }
            }
        }
    }

    fn matches(&self, resolve: &impl Fn(&str) -> f64) -> bool {
        match self {
            QueryExpr::Leaf(p) => p.matches(resolve(&p.variable)),
            QueryExpr::And(cs) => cs.iter().all(|c| c.matches(resolve)),
            QueryExpr::Or(cs) => cs.iter().any(|c| c.matches(resolve)),
        }
    }
}

impl std::fmt::Display for QueryExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QueryExpr::Leaf(p) => write!(f, "{p}"),
            QueryExpr::And(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " AND ")?;
                    }
                    match c {
                        QueryExpr::Or(_) => write!(f, "({c})")?,
                        _ => write!(f, "{c}")?,
                    }
                }
                Ok(())
            }
            QueryExpr::Or(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " OR ")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
        }
    }
}

/// Where a query result came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResultSource {
    Raw,
    Sampled,
}

/// Ascending set of linear grid indices satisfying a query.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    pub indices: Vec<u64>,
    pub source: ResultSource,
    dims: GridDims,
}

impl QueryResult {
    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

fn check_variables(q: &QueryExpr, available: &[String]) -> Result<()> {
    for v in q.variables() {
        if !available.iter().any(|a| a == v) {
            return Err(Error::UnknownVariable(v.to_string()));
        }
    }
    Ok(())
}

/// Evaluate a query against the full raw grid (the ground truth).
pub fn query_raw(mf: &MultiField, q: &QueryExpr) -> Result<QueryResult> {
    check_variables(q, &mf.variable_names())?;
    let vars = q.variables();
    let columns: Vec<(&str, &[f64])> = vars
        .iter()
        .map(|&v| mf.field(v).map(|f| (v, f.values())))
        .collect::<Result<_>>()?;
    let n = mf.dims().total();
    let mut indices = Vec::new();
    for p in 0..n {
        let resolve = |name: &str| -> f64 {
            columns
                .iter()
                .find(|(v, _)| *v == name)
                .map(|(_, col)| col[p as usize])
                .unwrap_or(f64::NAN)
        };
        if q.matches(&resolve) {
            indices.push(p);
        }
    }
    Ok(QueryResult {
        indices,
        source: ResultSource::Raw,
        dims: mf.dims(),
    })
}

/// Evaluate a query against a sampled point set's stored values.
pub fn query_sampled(ps: &SampledPointSet, q: &QueryExpr) -> Result<QueryResult> {
    check_variables(q, ps.variable_names())?;
    let var_slots: Vec<(String, usize)> = q
        .variables()
        .iter()
        .map(|&v| ps.var_index(v).map(|i| (v.to_string(), i)))
        .collect::<Result<_>>()?;
    let mut indices = Vec::new();
    for p in 0..ps.len() {
        let values = ps.point_values(p);
        let resolve = |name: &str| -> f64 {
            var_slots
                .iter()
                .find(|(v, _)| v == name)
                .map(|&(_, slot)| values[slot])
                .unwrap_or(f64::NAN)
        };
        if q.matches(&resolve) {
            indices.push(ps.indices()[p]);
        }
    }
    Ok(QueryResult {
        indices,
        source: ResultSource::Sampled,
        dims: ps.dims(),
    })
}

/// Jaccard index |P intersect Q| / |P union Q| of two results over the same
/// grid. Two empty sets are identical, so J = 1; callers should surface the
/// empty-ground-truth case to users.
pub fn jaccard(a: &QueryResult, b: &QueryResult) -> Result<f64> {
    if a.dims != b.dims {
        return Err(Error::GridMismatch {
            a: a.dims.total(),
            b: b.dims.total(),
        });
    }
    let (mut i, mut j) = (0usize, 0usize);
    let (mut inter, mut union) = (0u64, 0u64);
    while i < a.indices.len() && j < b.indices.len() {
        union += 1;
        match a.indices[i].cmp(&b.indices[j]) {
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
        }
    }
    union += (a.indices.len() - i) as u64 + (b.indices.len() - j) as u64;
    if union == 0 {
        return Ok(1.0);
    }
    Ok(inter as f64 / union as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldio::Field;

    fn mf_8pt() -> MultiField {
        let dims = GridDims::new(8, 1, 1).unwrap();
        MultiField::new(vec![
            Field::new("a", dims, vec![0., 1., 2., 3., 4., 5., 6., 7.]).unwrap(),
            Field::new("b", dims, vec![7., 6., 5., 4., 3., 2., 1., 0.]).unwrap(),
        ])
        .unwrap()
    }

    fn leaf(var: &str, lo: f64, hi: f64) -> QueryExpr {
        QueryExpr::Leaf(RangePredicate {
            variable: var.into(),
            lo,
            hi,
            lo_inclusive: false,
            hi_inclusive: false,
        })
    }

    #[test]
    fn empty_and_tautological_results() {
        let mf = mf_8pt();
        let none = query_raw(&mf, &leaf("a", 100.0, 200.0)).unwrap();
        assert!(none.is_empty());
        let all = query_raw(&mf, &leaf("a", f64::NEG_INFINITY, f64::INFINITY)).unwrap();
        assert_eq!(all.len(), 8);
    }

    #[test]
    fn hand_enumerated_and() {
        let mf = mf_8pt();
        // a in (2, 6) gives {3,4,5}; b in (1, 4) gives {4,5,6}; AND -> {4,5}.
        let q = QueryExpr::And(vec![leaf("a", 2.0, 6.0), leaf("b", 1.0, 4.0)]);
        let r = query_raw(&mf, &q).unwrap();
        assert_eq!(r.indices, vec![4, 5]);
    }

    #[test]
    fn and_is_intersection_or_is_union() {
        let mf = mf_8pt();
        let qa = leaf("a", 2.0, 6.0);
        let qb = leaf("b", 1.0, 4.0);
        let ra = query_raw(&mf, &qa).unwrap();
        let rb = query_raw(&mf, &qb).unwrap();
        let rand = query_raw(&mf, &QueryExpr::And(vec![qa.clone(), qb.clone()])).unwrap();
        let ror = query_raw(&mf, &QueryExpr::Or(vec![qa, qb])).unwrap();
        let inter: Vec<u64> = ra
            .indices
            .iter()
            .filter(|i| rb.indices.contains(i))
            .copied()
            .collect();
        let mut uni: Vec<u64> = ra.indices.iter().chain(&rb.indices).copied().collect();
        uni.sort_unstable();
        uni.dedup();
        assert_eq!(rand.indices, inter);
        assert_eq!(ror.indices, uni);
    }

    #[test]
    fn widening_never_shrinks() {
        let mf = mf_8pt();
        let narrow = query_raw(&mf, &leaf("a", 2.0, 5.0)).unwrap();
        let wide = query_raw(&mf, &leaf("a", 1.0, 6.0)).unwrap();
        assert!(narrow.indices.iter().all(|i| wide.indices.contains(i)));
    }

    #[test]
    fn sampled_queries_are_subsets() {
        let mf = mf_8pt();
        let full = SampledPointSet::full(&mf);
        let q = QueryExpr::And(vec![leaf("a", 1.0, 7.0), leaf("b", 0.0, 6.0)]);
        let raw = query_raw(&mf, &q).unwrap();
        let via_ps = query_sampled(&full, &q).unwrap();
        assert_eq!(raw.indices, via_ps.indices);

        let empty = SampledPointSet::new(
            mf.dims(),
            mf.variable_names(),
            Vec::new(),
            Vec::new(),
        )
        .unwrap();
        assert!(query_sampled(&empty, &q).unwrap().is_empty());

        let sub = crate::sampler::random_sample(
            &mf,
            crate::sampler::SamplingFraction::new(0.5).unwrap(),
            3,
        );
        let rs = query_sampled(&sub, &q).unwrap();
        assert!(rs.indices.iter().all(|i| raw.indices.contains(i)));
    }

    #[test]
    fn jaccard_hand_values() {
        let dims = GridDims::new(8, 1, 1).unwrap();
        let mk = |v: Vec<u64>| QueryResult {
            indices: v,
            source: ResultSource::Raw,
            dims,
        };
        assert_eq!(jaccard(&mk(vec![1, 2, 3]), &mk(vec![1, 2, 3])).unwrap(), 1.0);
        let j = jaccard(&mk(vec![1, 2]), &mk(vec![2, 3])).unwrap();
        assert!((j - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(jaccard(&mk(vec![]), &mk(vec![])).unwrap(), 1.0);
        assert_eq!(jaccard(&mk(vec![1]), &mk(vec![])).unwrap(), 0.0);
    }

    #[test]
    fn jaccard_grid_mismatch() {
        let a = QueryResult {
            indices: vec![],
            source: ResultSource::Raw,
            dims: GridDims::new(2, 2, 2).unwrap(),
        };
        let b = QueryResult {
            indices: vec![],
            source: ResultSource::Sampled,
            dims: GridDims::new(4, 2, 2).unwrap(),
        };
        assert!(matches!(jaccard(&a, &b), Err(Error::GridMismatch { .. })));
    }

    #[test]
    fn unknown_variable_rejected() {
        let mf = mf_8pt();
        assert!(matches!(
            query_raw(&mf, &leaf("nope", 0.0, 1.0)),
            Err(Error::UnknownVariable(_))
        ));
    }
}
