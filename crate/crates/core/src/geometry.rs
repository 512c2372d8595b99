//! Block geometry and the neighbouring pixel-pair sets used by the blocking
//! effect factor.
//!
//! Pixels are addressed by row-major linear index `y * n_h + x`. The pair
//! sets are:
//!
//! * `h_b` / `h_bc`: horizontal neighbours `(x, y)-(x+1, y)` that straddle /
//!   do not straddle a vertical block edge,
//! * `v_b` / `v_bc`: vertical neighbours `(x, y)-(x, y+1)`, same split,
//! * `r_bc`: down-right diagonal neighbours `(x, y)-(x+1, y+1)` inside one block,
//! * `l_bc`: down-left diagonal neighbours `(x, y)-(x-1, y+1)` inside one block.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Image dimensions plus the block size used for blockiness measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockGeometry {
    n_h: usize,
    n_v: usize,
    b: usize,
}

impl BlockGeometry {
    pub fn new(n_h: usize, n_v: usize, b: usize) -> Result<Self> {
        if b < 2 {
            return Err(Error::InvalidGeometry(format!("block size {b} < 2")));
        }
        if b > n_h.min(n_v) {
            return Err(Error::InvalidGeometry(format!(
                "block size {b} exceeds image dimension {}",
                n_h.min(n_v)
            )));
        }
        if !n_h.is_multiple_of(b) || !n_v.is_multiple_of(b) {
            return Err(Error::NotDivisible {
                block: b,
                width: n_h,
                height: n_v,
            });
        }
        Ok(Self { n_h, n_v, b })
    }

    /// Horizontal dimension (image width).
    pub fn n_h(&self) -> usize {
        self.n_h
    }

    /// Vertical dimension (image height).
    pub fn n_v(&self) -> usize {
        self.n_v
    }

    pub fn block(&self) -> usize {
        self.b
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.n_h + x
    }

    /// Closed form for the number of horizontal boundary pairs,
    /// `N_V * (N_H / B - 1)`.
    pub fn n_hb(&self) -> usize {
        self.n_v * (self.n_h / self.b - 1)
    }

    pub fn n_hbc(&self) -> usize {
        self.n_v * (self.n_h - 1) - self.n_hb()
    }

    /// `N_H * (N_V / B - 1)`.
    pub fn n_vb(&self) -> usize {
        self.n_h * (self.n_v / self.b - 1)
    }

    pub fn n_vbc(&self) -> usize {
        self.n_h * (self.n_v - 1) - self.n_vb()
    }

    /// Number of same-block down-right (equivalently down-left) diagonal
    /// pairs: each block holds `(B - 1)^2` of each.
    pub fn n_diagonal(&self) -> usize {
        (self.n_h / self.b) * (self.n_v / self.b) * (self.b - 1) * (self.b - 1)
    }

    /// Diagonal counts taken as the horizontal/vertical non-boundary counts.
    /// These differ from the enumerated set sizes and exist for comparison
    /// with results normalized that way.
    pub fn axial_diagonal_counts(&self) -> (usize, usize) {
        (self.n_hbc(), self.n_vbc())
    }

    /// Converts a 1-based column-major figure label (`y1..y8` running down
    /// the first column) into a row-major linear index.
    pub fn column_major_label(&self, label: usize) -> usize {
        assert!(label >= 1 && label <= self.n_h * self.n_v, "label {label} out of range");
        let k = label - 1;
        self.index(k / self.n_v, k % self.n_v)
    }
}

pub type PixelPair = (usize, usize);

/// Explicit enumeration of every neighbouring pixel pair, classified by
/// direction and by whether it crosses a block boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelPairSets {
    pub h_b: Vec<PixelPair>,
    pub h_bc: Vec<PixelPair>,
    pub v_b: Vec<PixelPair>,
    pub v_bc: Vec<PixelPair>,
    pub r_bc: Vec<PixelPair>,
    pub l_bc: Vec<PixelPair>,
}

impl PixelPairSets {
    pub fn n_hb(&self) -> usize {
        self.h_b.len()
    }
    pub fn n_hbc(&self) -> usize {
        self.h_bc.len()
    }
    pub fn n_vb(&self) -> usize {
        self.v_b.len()
    }
    pub fn n_vbc(&self) -> usize {
        self.v_bc.len()
    }
    pub fn n_rbc(&self) -> usize {
        self.r_bc.len()
    }
    pub fn n_lbc(&self) -> usize {
        self.l_bc.len()
    }
}

/// Enumerates all six pair sets by scanning the grid.
pub fn build_pair_sets(geom: &BlockGeometry) -> PixelPairSets {
    let (w, h, b) = (geom.n_h, geom.n_v, geom.b);
    let block_of = |x: usize, y: usize| (x / b, y / b);
    let mut sets = PixelPairSets {
        h_b: Vec::with_capacity(geom.n_hb()),
        h_bc: Vec::with_capacity(geom.n_hbc()),
        v_b: Vec::with_capacity(geom.n_vb()),
        v_bc: Vec::with_capacity(geom.n_vbc()),
        r_bc: Vec::with_capacity(geom.n_diagonal()),
        l_bc: Vec::with_capacity(geom.n_diagonal()),
    };
    for y in 0..h {
        for x in 0..w {
            let here = geom.index(x, y);
            let home = block_of(x, y);
            if x + 1 < w {
                let pair = (here, geom.index(x + 1, y));
                if block_of(x + 1, y) == home {
                    sets.h_bc.push(pair);
                } else {
                    sets.h_b.push(pair);
                }
            }
            if y + 1 < h {
                let pair = (here, geom.index(x, y + 1));
                if block_of(x, y + 1) == home {
                    sets.v_bc.push(pair);
                } else {
                    sets.v_b.push(pair);
                }
                if x + 1 < w && block_of(x + 1, y + 1) == home {
                    sets.r_bc.push((here, geom.index(x + 1, y + 1)));
                }
                if x >= 1 && block_of(x - 1, y + 1) == home {
                    sets.l_bc.push((here, geom.index(x - 1, y + 1)));
                }
            }
        }
    }
    sets
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn geometry_validation() {
        assert!(BlockGeometry::new(8, 8, 1).is_err());
        assert!(BlockGeometry::new(8, 8, 16).is_err());
        assert!(matches!(BlockGeometry::new(10, 8, 4), Err(Error::NotDivisible { .. })));
        assert!(BlockGeometry::new(16, 8, 8).is_ok());
    }

    #[test]
    fn eight_by_eight_block_four_counts() {
        let g = BlockGeometry::new(8, 8, 4).unwrap();
        let s = build_pair_sets(&g);
        assert_eq!((s.n_hb(), s.n_hbc(), s.n_vb(), s.n_vbc()), (8, 48, 8, 48));
        // four 4x4 blocks, 3x3 diagonal pairs each
        assert_eq!((s.n_rbc(), s.n_lbc()), (36, 36));
        assert_eq!(g.axial_diagonal_counts(), (48, 48));
    }

    #[test]
    fn figure_labels_map_into_sets() {
        let g = BlockGeometry::new(8, 8, 4).unwrap();
        let s = build_pair_sets(&g);
        let p = |a, b| (g.column_major_label(a), g.column_major_label(b));
        assert!(s.h_b.contains(&p(25, 33)));
        assert!(s.h_b.contains(&p(32, 40)));
        assert!(s.h_bc.contains(&p(1, 9)));
        assert!(s.h_bc.contains(&p(56, 64)));
        assert!(s.v_b.contains(&p(4, 5)));
        assert!(s.v_b.contains(&p(60, 61)));
        assert!(s.v_bc.contains(&p(3, 4)));
        assert!(!s.v_bc.contains(&p(4, 5)));
        assert!(s.r_bc.contains(&p(1, 10)));
        assert!(s.r_bc.contains(&p(55, 64)));
        assert!(s.l_bc.contains(&p(9, 2)));
        assert!(s.l_bc.contains(&p(41, 34)));
        // crosses the vertical block edge between columns 3 and 4
        assert!(!s.l_bc.contains(&p(33, 26)));
    }

    #[test]
    fn single_block_has_no_boundaries() {
        let s = build_pair_sets(&BlockGeometry::new(4, 4, 4).unwrap());
        assert_eq!((s.n_hb(), s.n_vb()), (0, 0));
        assert_eq!((s.n_hbc(), s.n_vbc()), (12, 12));
    }

    fn geometry() -> impl Strategy<Value = BlockGeometry> {
        (2usize..9, 1usize..6, 1usize..6).prop_map(|(b, bx, by)| BlockGeometry::new(b * bx, b * by, b).unwrap())
    }

    proptest! {
        #[test]
        fn sets_partition_and_match_closed_forms(g in geometry()) {
            let s = build_pair_sets(&g);
            let (w, h) = (g.n_h(), g.n_v());
            prop_assert_eq!(s.n_hb() + s.n_hbc(), h * (w - 1));
            prop_assert_eq!(s.n_vb() + s.n_vbc(), w * (h - 1));
            prop_assert_eq!(s.n_hb(), g.n_hb());
            prop_assert_eq!(s.n_vb(), g.n_vb());
            prop_assert_eq!(s.n_hbc(), g.n_hbc());
            prop_assert_eq!(s.n_vbc(), g.n_vbc());
            prop_assert_eq!(s.n_rbc(), g.n_diagonal());
            prop_assert_eq!(s.n_lbc(), g.n_diagonal());
        }

        #[test]
        fn diagonal_pairs_step_and_stay_in_block(g in geometry()) {
            let s = build_pair_sets(&g);
            let b = g.block();
            let xy = |i: usize| (i % g.n_h(), i / g.n_h());
            for &(p, q) in &s.r_bc {
                let ((x0, y0), (x1, y1)) = (xy(p), xy(q));
                prop_assert_eq!((x1, y1), (x0 + 1, y0 + 1));
                prop_assert_eq!((x0 / b, y0 / b), (x1 / b, y1 / b));
            }
            for &(p, q) in &s.l_bc {
                let ((x0, y0), (x1, y1)) = (xy(p), xy(q));
                prop_assert_eq!((x1 + 1, y1), (x0, y0 + 1));
                prop_assert_eq!((x0 / b, y0 / b), (x1 / b, y1 / b));
            }
        }
    }
}
