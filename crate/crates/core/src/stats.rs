//! Propagation work counters.

use std::collections::BTreeMap;

/// Work counters accumulated by the propagation engines. A "cell domain read"
/// is one access to the domain of `a[b]` for a concrete tuple `b`; a
/// "t computation" is one evaluation of `T = D_x ∩ D_{a[b]}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PropagationStats {
    pub runs: u64,
    pub cell_domain_reads: u64,
    pub t_computations: u64,
    pub values_pruned: u64,
    pub skipped_indices: u64,
    pub backtracks: u64,
}

impl PropagationStats {
    pub fn merge(&mut self, other: &PropagationStats) {
        self.runs += other.runs;
        self.cell_domain_reads += other.cell_domain_reads;
        self.t_computations += other.t_computations;
        self.values_pruned += other.values_pruned;
        self.skipped_indices += other.skipped_indices;
        self.backtracks += other.backtracks;
    }

    /// Stable field order for reports.
    pub fn as_map(&self) -> BTreeMap<&'static str, u64> {
        BTreeMap::from([
            ("backtracks", self.backtracks),
            ("cell_domain_reads", self.cell_domain_reads),
            ("runs", self.runs),
            ("skipped_indices", self.skipped_indices),
            ("t_computations", self.t_computations),
            ("values_pruned", self.values_pruned),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_adds_fieldwise() {
        let mut a = PropagationStats {
            runs: 1,
            cell_domain_reads: 4,
            t_computations: 4,
            values_pruned: 0,
            skipped_indices: 2,
            backtracks: 0,
        };
        let b = PropagationStats {
            runs: 2,
            cell_domain_reads: 3,
            t_computations: 1,
            values_pruned: 5,
            skipped_indices: 0,
            backtracks: 7,
        };
        a.merge(&b);
        assert_eq!(a.runs, 3);
        assert_eq!(a.cell_domain_reads, 7);
        assert_eq!(a.t_computations, 5);
        assert_eq!(a.values_pruned, 5);
        assert_eq!(a.skipped_indices, 2);
        assert_eq!(a.backtracks, 7);
    }

    #[test]
    fn map_has_all_fields() {
        let s = PropagationStats::default();
        let m = s.as_map();
        assert_eq!(m.len(), 6);
        assert!(m.contains_key("cell_domain_reads"));
        assert!(m.contains_key("t_computations"));
    }
}
