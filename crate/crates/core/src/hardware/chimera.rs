use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left = 0,
    Right = 1,
}

/// Chimera coupler graph: a grid of `K_{t,t}` cells. Right-side qubits
/// couple to the same `k` in the horizontally adjacent cell, left-side
/// qubits to the vertically adjacent one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HardwareGraph {
    cells_rows: usize,
    cells_cols: usize,
    t: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl HardwareGraph {
    pub fn cells_rows(&self) -> usize {
        self.cells_rows
    }

    pub fn cells_cols(&self) -> usize {
        self.cells_cols
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn node_count(&self) -> usize {
        self.cells_rows * self.cells_cols * 2 * self.t
    }

    /// `((row·cells_cols + col)·2 + side)·t + k`.
    pub fn node_id(&self, row: usize, col: usize, side: Side, k: usize) -> usize {
        ((row * self.cells_cols + col) * 2 + side as usize) * self.t + k
    }

    /// Edges as `(a, b)` with `a < b`.
    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn is_single_cell(&self) -> bool {
        self.cells_rows == 1 && self.cells_cols == 1
    }
}

/// Panics if any argument is zero.
pub fn chimera(cells_rows: usize, cells_cols: usize, t: usize) -> HardwareGraph {
    assert!(cells_rows > 0 && cells_cols > 0 && t > 0, "chimera dimensions must be positive");
    let id = |row: usize, col: usize, side: usize, k: usize| ((row * cells_cols + col) * 2 + side) * t + k;
    let mut edges = BTreeSet::new();
    for row in 0..cells_rows {
        for col in 0..cells_cols {
            for i in 0..t {
                for j in 0..t {
                    edges.insert((id(row, col, 0, i), id(row, col, 1, j)));
                }
                if col + 1 < cells_cols {
                    edges.insert((id(row, col, 1, i), id(row, col + 1, 1, i)));
                }
                if row + 1 < cells_rows {
                    edges.insert((id(row, col, 0, i), id(row + 1, col, 0, i)));
                }
            }
        }
    }
    HardwareGraph {
        cells_rows,
        cells_cols,
        t,
        edges,
    }
}
