//! Seeded inputs for the selection benchmarks.

use minset::experiment::dataset;
use minset::{KnowledgeBase, SyntheticShape};

/// Objects regenerated from 300 individuals drawn with 10% overlap, as in the
/// `bench` command.
pub fn objects(size: usize, n_variables: usize, seed: u64) -> KnowledgeBase {
    let per_cluster = (300 / size).max(1);
    dataset(&SyntheticShape::mixed(size, n_variables), per_cluster, 0.1, seed)
        .expect("seeded dataset")
        .objects
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn objects_are_seeded() {
        let a = objects(10, 20, 1);
        assert_eq!(a.n_assertions(), 10);
        assert_eq!(a, objects(10, 20, 1));
    }
}
