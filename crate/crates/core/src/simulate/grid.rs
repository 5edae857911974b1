//! Uniform cell grid for fixed-radius neighbor queries in a disk.
//!
//! Points are copied in cell order, row by row, so the three cells of one
//! grid row around a query point form a single contiguous range.

use std::ops::Range;

pub(crate) struct NeighborGrid {
    origin: f64,
    inv_cell: f64,
    side: usize,
    starts: Vec<u32>,
    /// Coordinates in cell order.
    pub(crate) points: Vec<[f64; 2]>,
    /// Marks in cell order, empty when unmarked.
    pub(crate) marks: Vec<f64>,
    /// Original index of each point in cell order.
    pub(crate) index: Vec<u32>,
}

const MAX_SIDE: usize = 1024;

impl NeighborGrid {
    /// Grid over the square [-extent, extent]² for queries of radius `reach`.
    /// Cells are at least `reach` wide and hold about one point on average.
    pub(crate) fn new(points: &[[f64; 2]], marks: Option<&[f64]>, extent: f64, reach: f64) -> Self {
        let extent = extent.max(f64::MIN_POSITIVE);
        let spacing = 2.0 * extent / (points.len().max(1) as f64).sqrt();
        let cell = reach.max(spacing).max(2.0 * extent / MAX_SIDE as f64);
        let side = ((2.0 * extent / cell).ceil() as usize).max(1);
        let n = points.len();
        let mut grid = NeighborGrid {
            origin: -extent,
            inv_cell: 1.0 / cell,
            side,
            starts: vec![0; side * side + 1],
            points: Vec::with_capacity(n),
            marks: Vec::new(),
            index: vec![0; n],
        };
        let cells: Vec<u32> = points.iter().map(|p| grid.cell_of(p) as u32).collect();
        for &c in &cells {
            grid.starts[c as usize + 1] += 1;
        }
        for i in 0..side * side {
            grid.starts[i + 1] += grid.starts[i];
        }
        // starts[c + 1] is the end of cell c. Filling back to front moves it
        // to the start of cell c, after which one shift restores the layout.
        for (i, &c) in cells.iter().enumerate().rev() {
            let c = c as usize + 1;
            grid.starts[c] -= 1;
            grid.index[grid.starts[c] as usize] = i as u32;
        }
        grid.starts.rotate_left(1);
        grid.starts[side * side] = n as u32;
        grid.points.extend(grid.index.iter().map(|&i| points[i as usize]));
        if let Some(m) = marks {
            grid.marks = grid.index.iter().map(|&i| m[i as usize]).collect();
        }
        grid
    }

    fn coord(&self, v: f64) -> usize {
        // Saturating cast: negative offsets land in cell 0.
        (((v - self.origin) * self.inv_cell) as usize).min(self.side - 1)
    }

    fn cell_of(&self, p: &[f64; 2]) -> usize {
        self.coord(p[1]) * self.side + self.coord(p[0])
    }

    /// Calls `visit(s, range)` so that every unordered pair of cell-ordered
    /// slots in touching cells appears exactly once as `s` and a member of
    /// `range`, with `s` never in `range`. This covers every pair closer
    /// than `reach`.
    ///
    /// Each cell is paired with itself, its right neighbor and the three
    /// cells above it; the latter are one contiguous range.
    #[inline]
    pub(crate) fn for_each_near_range<F: FnMut(usize, Range<usize>)>(&self, mut visit: F) {
        let n = self.side;
        for cy in 0..n {
            for cx in 0..n {
                let c = cy * n + cx;
                let (a0, a1) = (self.starts[c] as usize, self.starts[c + 1] as usize);
                if a0 == a1 {
                    continue;
                }
                let right_end = if cx + 1 < n { self.starts[c + 2] as usize } else { a1 };
                let above = if cy + 1 < n {
                    let row = (cy + 1) * n;
                    self.starts[row + cx.saturating_sub(1)] as usize..self.starts[row + (cx + 1).min(n - 1) + 1] as usize
                } else {
                    0..0
                };
                for s in a0..a1 {
                    // Rest of this cell and the right neighbor are adjacent.
                    visit(s, s + 1..right_end);
                    visit(s, above.clone());
                }
            }
        }
    }
}
