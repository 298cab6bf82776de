use crate::error::{Error, Result};
use crate::graph::AdjacencyMatrix;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StrategicKind {
    /// `s_ij = d_ji`
    Reciprocity,
    /// `s_ij = sum_k d_ik d_kj`
    Transitivity,
    /// `s_ij = (out-degree of i excluding j) * (out-degree of j)`
    CustomerProduct,
    Custom,
}

pub type Evaluator = Arc<dyn Fn(&AdjacencyMatrix, usize, usize) -> i64 + Send + Sync>;

/// The strategic term `s_ij(d)`. It must not depend on `d_ij` itself.
#[derive(Clone)]
pub struct StrategicSpec {
    kind: StrategicKind,
    custom: Option<(String, Evaluator, i64, i64, bool)>,
}

impl fmt::Debug for StrategicSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StrategicSpec({})", self.name())
    }
}

impl StrategicSpec {
    pub fn reciprocity() -> Self {
        StrategicSpec { kind: StrategicKind::Reciprocity, custom: None }
    }

    pub fn transitivity() -> Self {
        StrategicSpec { kind: StrategicKind::Transitivity, custom: None }
    }

    pub fn customer_product() -> Self {
        StrategicSpec { kind: StrategicKind::CustomerProduct, custom: None }
    }

    /// A user-supplied term with fixed bounds. `monotone` declares it weakly
    /// increasing in every entry of `d`.
    pub fn custom(
        name: impl Into<String>,
        eval: Evaluator,
        s_min: i64,
        s_max: i64,
        monotone: bool,
    ) -> Result<Self> {
        if s_min > s_max {
            return Err(Error::invalid("custom strategic term has s_min > s_max"));
        }
        Ok(StrategicSpec {
            kind: StrategicKind::Custom,
            custom: Some((name.into(), eval, s_min, s_max, monotone)),
        })
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name.replace('-', "_").as_str() {
            "reciprocity" => Ok(Self::reciprocity()),
            "transitivity" => Ok(Self::transitivity()),
            "customer_product" => Ok(Self::customer_product()),
            other => Err(Error::invalid(format!("unknown strategic term `{other}`"))),
        }
    }

    pub fn kind(&self) -> StrategicKind {
        self.kind
    }

    pub fn name(&self) -> &str {
        match self.kind {
            StrategicKind::Reciprocity => "reciprocity",
            StrategicKind::Transitivity => "transitivity",
            StrategicKind::CustomerProduct => "customer_product",
            StrategicKind::Custom => &self.custom.as_ref().expect("custom payload").0,
        }
    }

    /// Bounds `(s_min, s_max)` of the term on `n`-node networks.
    pub fn bounds(&self, n: usize) -> (i64, i64) {
        let n = n as i64;
        match self.kind {
            StrategicKind::Reciprocity => (0, 1),
            StrategicKind::Transitivity => (0, (n - 2).max(0)),
            StrategicKind::CustomerProduct => (0, ((n - 2) * (n - 1)).max(0)),
            StrategicKind::Custom => {
                let c = self.custom.as_ref().expect("custom payload");
                (c.2, c.3)
            }
        }
    }

    pub fn is_monotone(&self) -> bool {
        match &self.custom {
            Some(c) => c.4,
            None => true,
        }
    }

    #[inline]
    pub fn value(&self, d: &AdjacencyMatrix, i: usize, j: usize) -> i64 {
        debug_assert!(i != j);
        match self.kind {
            StrategicKind::Reciprocity => d.get(j, i) as i64,
            StrategicKind::Transitivity => d.two_paths(i, j) as i64,
            StrategicKind::CustomerProduct => {
                (d.out_degree(i) - d.get(i, j) as usize) as i64 * d.out_degree(j) as i64
            }
            StrategicKind::Custom => (self.custom.as_ref().expect("custom payload").1)(d, i, j),
        }
    }
}

/// `s_ij(d)` for `spec`; same as [`StrategicSpec::value`].
pub fn strategic_term(spec: &StrategicSpec, d: &AdjacencyMatrix, i: usize, j: usize) -> i64 {
    spec.value(d, i, j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn matrix(n: usize, bits: &[bool]) -> AdjacencyMatrix {
        AdjacencyMatrix::from_fn(n, |i, j| bits[i * n + j])
    }

    #[test]
    fn reciprocity_values() {
        let (d, _) = AdjacencyMatrix::from_edge_list(&[(0, 1), (1, 0), (1, 2)], 3).unwrap();
        let s = StrategicSpec::reciprocity();
        assert_eq!(s.value(&d, 0, 1), 1);
        assert_eq!(s.value(&d, 1, 2), 0);
    }

    #[test]
    fn transitivity_on_complete_graph() {
        let d = AdjacencyMatrix::complete(6);
        let s = StrategicSpec::transitivity();
        for i in 0..6 {
            for j in 0..6 {
                if i != j {
                    assert_eq!(s.value(&d, i, j), 4);
                }
            }
        }
    }

    #[test]
    fn customer_product_fixture() {
        // Row sums (3, 2, ...); arc 0 -> 1 present.
        let (d, _) =
            AdjacencyMatrix::from_edge_list(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 0)], 4)
                .unwrap();
        assert_eq!(StrategicSpec::customer_product().value(&d, 0, 1), 4);
    }

    #[test]
    fn names_parse() {
        assert_eq!(StrategicSpec::from_name("customer-product").unwrap().kind(), StrategicKind::CustomerProduct);
        assert!(StrategicSpec::from_name("nope").is_err());
    }

    proptest! {
        #[test]
        fn builtins_respect_exclusion_and_bounds(
            n in 2usize..8,
            bits in proptest::collection::vec(any::<bool>(), 64),
            i in 0usize..8,
            j_off in 0usize..7,
        ) {
            let i = i % n;
            let j = (i + 1 + j_off % (n - 1)) % n;
            let mut d = matrix(n, &bits);
            for spec in [StrategicSpec::reciprocity(), StrategicSpec::transitivity(), StrategicSpec::customer_product()] {
                d.set(i, j, false);
                let minus = spec.value(&d, i, j);
                d.set(i, j, true);
                let plus = spec.value(&d, i, j);
                prop_assert_eq!(minus, plus);
                let (lo, hi) = spec.bounds(n);
                prop_assert!(lo <= plus && plus <= hi);
            }
        }

        #[test]
        fn builtins_are_monotone(
            n in 3usize..7,
            bits in proptest::collection::vec(any::<bool>(), 49),
            a in 0usize..7, b_off in 0usize..6, i in 0usize..7, j_off in 0usize..6,
        ) {
            // Ordered pairs of distinct nodes from arbitrary offsets.
            let (a, i) = (a % n, i % n);
            let (b, j) = ((a + 1 + b_off % (n - 1)) % n, (i + 1 + j_off % (n - 1)) % n);
            let mut d = matrix(n, &bits);
            for spec in [StrategicSpec::reciprocity(), StrategicSpec::transitivity(), StrategicSpec::customer_product()] {
                d.set(a, b, false);
                let lo = spec.value(&d, i, j);
                d.set(a, b, true);
                prop_assert!(spec.value(&d, i, j) >= lo);
            }
        }
    }
}
