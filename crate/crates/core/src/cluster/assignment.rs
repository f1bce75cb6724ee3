use crate::error::{Error, Result};

/// Partition of users into at most `M` clusters plus the unserved rest.
/// Within a cluster, list order is the SIC decoding order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    pub clusters: Vec<Vec<usize>>,
    /// Sorted ascending.
    pub unserved: Vec<usize>,
}

impl ClusterAssignment {
    /// `n_clusters` empty slots, every user unserved.
    pub fn empty(n_clusters: usize, n_users: usize) -> Self {
        ClusterAssignment {
            clusters: vec![Vec::new(); n_clusters],
            unserved: (0..n_users).collect(),
        }
    }

    /// Fills `unserved` with every user missing from `clusters`.
    pub fn from_clusters(clusters: Vec<Vec<usize>>, n_users: usize) -> Self {
        let mut served = vec![false; n_users];
        for &u in clusters.iter().flatten() {
            served[u] = true;
        }
        let unserved = (0..n_users).filter(|&u| !served[u]).collect();
        ClusterAssignment { clusters, unserved }
    }

    pub fn served_count(&self) -> usize {
        self.clusters.iter().map(Vec::len).sum()
    }

    pub fn non_empty(&self) -> usize {
        self.clusters.iter().filter(|c| !c.is_empty()).count()
    }

    /// Cluster slot holding `user`, if served.
    pub fn cluster_of(&self, user: usize) -> Option<usize> {
        self.clusters.iter().position(|c| c.contains(&user))
    }

    /// Checks disjointness, coverage and the cluster-count bound.
    pub fn validate(&self, n_users: usize, max_clusters: usize) -> Result<()> {
        if self.clusters.len() > max_clusters {
            return Err(Error::invalid(
                "assignment",
                format!("{} clusters exceed the limit {max_clusters}", self.clusters.len()),
            ));
        }
        let mut seen = vec![false; n_users];
        for &u in self.clusters.iter().flatten().chain(&self.unserved) {
            if u >= n_users {
                return Err(Error::invalid("assignment", format!("user {u} out of range")));
            }
            if seen[u] {
                return Err(Error::invalid("assignment", format!("user {u} appears twice")));
            }
            seen[u] = true;
        }
        if let Some(u) = seen.iter().position(|s| !s) {
            return Err(Error::invalid("assignment", format!("user {u} is missing")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_clusters_collects_the_rest() {
        let a = ClusterAssignment::from_clusters(vec![vec![3, 1], vec![], vec![4]], 6);
        assert_eq!(a.unserved, vec![0, 2, 5]);
        assert_eq!(a.served_count(), 3);
        assert_eq!(a.non_empty(), 2);
        assert_eq!(a.cluster_of(4), Some(2));
        assert_eq!(a.cluster_of(0), None);
        a.validate(6, 3).unwrap();
    }

    #[test]
    fn validation_catches_overlap_and_gaps() {
        let dup = ClusterAssignment {
            clusters: vec![vec![0, 1], vec![1]],
            unserved: vec![2],
        };
        assert!(dup.validate(3, 2).is_err());
        let gap = ClusterAssignment {
            clusters: vec![vec![0]],
            unserved: vec![2],
        };
        assert!(gap.validate(3, 2).is_err());
        let many = ClusterAssignment::empty(3, 2);
        assert!(many.validate(2, 2).is_err());
    }
}
