//! Labeled partitions of `{0, .., n-1}`.
//!
//! A [`LabeledPartition`] assigns every element to exactly one block. Block
//! ids are canonical: blocks are numbered `0..m` in order of their minimum
//! member, so two partitions with the same blocks compare equal regardless of
//! how the input labeled them.

use thiserror::Error;

/// Errors raised by partition constructors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    /// The partition covers no elements.
    #[error("partition must cover at least one element")]
    Empty,
    /// The supplied blocks do not form a partition of `{0, .., n-1}`.
    #[error("element {0} is missing or assigned to more than one block")]
    NotAPartition(usize),
}

/// A partition of `{0, .., n-1}` into non-empty blocks with canonical ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabeledPartition {
    /// Element -> block id. Ids are contiguous and ordered by minimum member.
    assignment: Vec<usize>,
    block_count: usize,
}

impl LabeledPartition {
    /// The discrete partition: every element in its own block.
    pub fn singletons(n: usize) -> Self {
        LabeledPartition {
            assignment: (0..n).collect(),
            block_count: n,
        }
    }

    /// Builds a partition from an element -> label map. Labels may be
    /// arbitrary; they are renumbered canonically.
    pub fn from_assignment(labels: &[usize]) -> Result<Self, PartitionError> {
        if labels.is_empty() {
            return Err(PartitionError::Empty);
        }
        let mut remap: Vec<Option<usize>> = vec![None; labels.len()];
        let mut assignment = Vec::with_capacity(labels.len());
        let mut next = 0;
        for &label in labels {
            let slot = remap.get_mut(label).ok_or(PartitionError::NotAPartition(label))?;
            let id = *slot.get_or_insert_with(|| {
                let id = next;
                next += 1;
                id
            });
            assignment.push(id);
        }
        Ok(LabeledPartition {
            assignment,
            block_count: next,
        })
    }

    /// Builds a partition from explicit blocks over `{0, .., n-1}`.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self, PartitionError> {
        if n == 0 {
            return Err(PartitionError::Empty);
        }
        let mut labels = vec![usize::MAX; n];
        for (id, block) in blocks.iter().enumerate() {
            for &x in block {
                if x >= n || labels[x] != usize::MAX {
                    return Err(PartitionError::NotAPartition(x.min(n)));
                }
                labels[x] = id;
            }
        }
        if let Some(missing) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(PartitionError::NotAPartition(missing));
        }
        Self::from_assignment(&labels)
    }

    /// Number of elements.
    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    /// True when the partition covers no elements (never holds for a
    /// successfully constructed value).
    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Number of blocks.
    pub fn block_count(&self) -> usize {
        self.block_count
    }

    /// Block id of an element.
    pub fn block_of(&self, x: usize) -> usize {
        self.assignment[x]
    }

    /// Element -> block id view.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Blocks as sorted member lists, ordered by block id.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.block_count];
        for (x, &id) in self.assignment.iter().enumerate() {
            blocks[id].push(x);
        }
        blocks
    }

    /// True when every element is alone in its block.
    pub fn is_singletons(&self) -> bool {
        self.block_count == self.assignment.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renumbers_labels_canonically() {
        let p = LabeledPartition::from_assignment(&[2, 0, 2, 1]).unwrap();
        assert_eq!(p.assignment(), &[0, 1, 0, 2]);
        assert_eq!(p.block_count(), 3);
        assert_eq!(p.blocks(), vec![vec![0, 2], vec![1], vec![3]]);
    }

    #[test]
    fn blocks_round_trip() {
        let p = LabeledPartition::from_blocks(4, &[vec![1, 3], vec![0], vec![2]]).unwrap();
        assert_eq!(p.blocks(), vec![vec![0], vec![1, 3], vec![2]]);
        let q = LabeledPartition::from_assignment(p.assignment()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn rejects_non_partitions() {
        assert_eq!(
            LabeledPartition::from_blocks(3, &[vec![0, 1]]),
            Err(PartitionError::NotAPartition(2))
        );
        assert_eq!(
            LabeledPartition::from_blocks(2, &[vec![0, 1], vec![1]]),
            Err(PartitionError::NotAPartition(1))
        );
        assert_eq!(LabeledPartition::from_assignment(&[]), Err(PartitionError::Empty));
    }

    #[test]
    fn singletons_are_singletons() {
        let p = LabeledPartition::singletons(5);
        assert!(p.is_singletons());
        assert_eq!(p.block_count(), 5);
    }
}
