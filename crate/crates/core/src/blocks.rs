//! Player-block partition of the joint decision vector.
//!
//! Player indices are zero-based throughout the crate. For player `i` the
//! selection `F_iᵀ v` extracts block `i`, the embedding `F_i b` pads a block
//! with zeros, and the mask `E_i v = F_i F_iᵀ v` keeps block `i` in place.

use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};
use crate::linalg::Vector;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockStructure {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
}

impl BlockStructure {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidParameter("a game needs at least one player".into()));
        }
        if sizes.contains(&0) {
            return Err(Error::InvalidParameter("every player block must be non-empty".into()));
        }
        let mut offsets = Vec::with_capacity(sizes.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &s in &sizes {
            acc += s;
            offsets.push(acc);
        }
        Ok(BlockStructure { sizes, offsets })
    }

    pub fn players(&self) -> usize {
        self.sizes.len()
    }

    pub fn total(&self) -> usize {
        *self.offsets.last().expect("offsets is never empty")
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn size(&self, player: usize) -> usize {
        self.sizes[player]
    }

    pub fn range(&self, player: usize) -> Range<usize> {
        self.offsets[player]..self.offsets[player + 1]
    }

    /// `F_iᵀ v`.
    pub fn select(&self, player: usize, v: &Vector) -> Vector {
        let r = self.range(player);
        v.rows(r.start, r.len()).into_owned()
    }

    /// `F_i b`.
    pub fn embed(&self, player: usize, block: &Vector) -> Vector {
        debug_assert_eq!(block.len(), self.size(player));
        let mut out = Vector::zeros(self.total());
        let r = self.range(player);
        out.rows_mut(r.start, r.len()).copy_from(block);
        out
    }

    /// `E_i v`.
    pub fn mask(&self, player: usize, v: &Vector) -> Vector {
        let r = self.range(player);
        let mut out = Vector::zeros(v.len());
        out.rows_mut(r.start, r.len()).copy_from(&v.rows(r.start, r.len()));
        out
    }

    pub fn split(&self, v: &Vector) -> Vec<Vector> {
        (0..self.players()).map(|i| self.select(i, v)).collect()
    }

    pub fn assemble(&self, blocks: &[Vector]) -> Result<Vector> {
        if blocks.len() != self.players() {
            return Err(Error::DimensionMismatch {
                expected: self.players(),
                found: blocks.len(),
            });
        }
        let mut out = Vector::zeros(self.total());
        for (i, b) in blocks.iter().enumerate() {
            if b.len() != self.size(i) {
                return Err(Error::DimensionMismatch {
                    expected: self.size(i),
                    found: b.len(),
                });
            }
            let r = self.range(i);
            out.rows_mut(r.start, r.len()).copy_from(b);
        }
        Ok(out)
    }

    pub fn check_len(&self, v: &Vector) -> Result<()> {
        if v.len() != self.total() {
            return Err(Error::DimensionMismatch {
                expected: self.total(),
                found: v.len(),
            });
        }
        Ok(())
    }
}

/// A joint point `x = (x_1, ..., x_N)` tagged with its block layout.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPoint {
    coords: Vector,
    structure: BlockStructure,
}

impl JointPoint {
    pub fn new(structure: BlockStructure, coords: Vector) -> Result<Self> {
        structure.check_len(&coords)?;
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain("non-finite coordinate"));
        }
        Ok(JointPoint { coords, structure })
    }

    pub fn from_blocks(structure: BlockStructure, blocks: &[Vector]) -> Result<Self> {
        let coords = structure.assemble(blocks)?;
        Self::new(structure, coords)
    }

    pub fn coords(&self) -> &Vector {
        &self.coords
    }

    pub fn into_coords(self) -> Vector {
        self.coords
    }

    pub fn structure(&self) -> &BlockStructure {
        &self.structure
    }

    pub fn block(&self, player: usize) -> Vector {
        self.structure.select(player, &self.coords)
    }

    pub fn blocks(&self) -> Vec<Vector> {
        self.structure.split(&self.coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_empty_or_zero_blocks() {
        assert!(BlockStructure::new(alloc::vec![]).is_err());
        assert!(BlockStructure::new(alloc::vec![2, 0]).is_err());
        let b = BlockStructure::new(alloc::vec![2, 3]).unwrap();
        assert_eq!(b.offsets(), &[0, 2, 5]);
        assert_eq!(b.total(), 5);
    }

    #[test]
    fn joint_point_rejects_bad_coords() {
        let b = BlockStructure::new(alloc::vec![1, 1]).unwrap();
        assert!(JointPoint::new(b.clone(), Vector::from_vec(alloc::vec![1.0])).is_err());
        assert!(JointPoint::new(b, Vector::from_vec(alloc::vec![1.0, f64::NAN])).is_err());
    }

    fn arb_layout() -> impl Strategy<Value = (Vec<usize>, Vec<f64>)> {
        prop::collection::vec(1usize..5, 1..5).prop_flat_map(|sizes| {
            let n: usize = sizes.iter().sum();
            (Just(sizes), prop::collection::vec(-10.0f64..10.0, n))
        })
    }

    proptest! {
        #[test]
        fn masks_are_idempotent_and_disjoint((sizes, v) in arb_layout()) {
            let b = BlockStructure::new(sizes).unwrap();
            let v = Vector::from_vec(v);
            for i in 0..b.players() {
                let once = b.mask(i, &v);
                prop_assert_eq!(b.mask(i, &once), once.clone());
                prop_assert_eq!(b.embed(i, &b.select(i, &v)), once.clone());
                for j in 0..b.players() {
                    if i != j {
                        prop_assert!(b.mask(i, &b.mask(j, &v)).iter().all(|&c| c == 0.0));
                    }
                }
            }
        }

        #[test]
        fn split_assemble_round_trips((sizes, v) in arb_layout()) {
            let b = BlockStructure::new(sizes).unwrap();
            let v = Vector::from_vec(v);
            let p = JointPoint::new(b.clone(), v.clone()).unwrap();
            prop_assert_eq!(b.assemble(&p.blocks()).unwrap(), v);
        }
    }
}
