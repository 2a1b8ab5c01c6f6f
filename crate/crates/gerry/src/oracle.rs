//! Brute-force ground truth for small boards.
//!
//! Everything here enumerates bitmasks directly, with no shared machinery
//! with the transfer engine, so the two sides can be compared as independent
//! implementations. Boards are capped hard: these routines exist to validate,
//! not to scale.

use rayon::prelude::*;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("board {0}x{0} exceeds the brute-force limit of {1} cells")]
    BoardTooLarge(usize, usize),
    #[error("a {0}x{0} partition census needs the heavy-run opt-in")]
    HeavyRunNotEnabled(usize),
}

/// Which cell subsets `brute_cycles` keeps.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SpanFilter {
    /// Every closed cycle.
    All,
    /// Only cycles touching both the first and the last column.
    LeftRight,
    /// Only cycles touching all four sides of the board.
    FourSides,
}

/// Canonical contact classes used to cross-check the engine's two runs.
/// Weights 2, 4, 4, 1 recombine these into the engine's one-sided counts.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PanelClass {
    /// Grey contains the whole bottom row and stays off the top row.
    BottomRow,
    /// Grey contains the bottom-left corner and no other corner.
    BottomLeftCorner,
    /// Grey touches the left side but no corner and no other side.
    LeftSide,
    /// Grey touches no side at all.
    Interior,
}

struct Grid {
    rows: usize,
    cols: usize,
    all: u32,
    recv_from_left: u32,
    recv_from_right: u32,
}

impl Grid {
    fn new(rows: usize, cols: usize) -> Grid {
        let n = rows * cols;
        assert!(n <= 25, "bitmask grids cap at 25 cells");
        let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        let mut col0 = 0u32;
        let mut col_last = 0u32;
        for y in 0..rows {
            col0 |= 1 << (y * cols);
            col_last |= 1 << (y * cols + cols - 1);
        }
        Grid {
            rows,
            cols,
            all,
            // A left shift moves a bit to the cell on its right, so cells in
            // column 0 must not receive it (that would be a row wrap).
            recv_from_left: all & !col0,
            recv_from_right: all & !col_last,
        }
    }

    fn grow(&self, set: u32, within: u32) -> u32 {
        let mut g = set;
        g |= (set << 1) & self.recv_from_left;
        g |= (set >> 1) & self.recv_from_right;
        g |= (set << self.cols) & self.all;
        g |= set >> self.cols;
        g & within
    }

    fn flood(&self, start: u32, within: u32) -> u32 {
        let mut comp = start & within;
        loop {
            let next = self.grow(comp, within);
            if next == comp {
                return comp;
            }
            comp = next;
        }
    }

    fn is_connected(&self, set: u32) -> bool {
        if set == 0 {
            return false;
        }
        self.flood(set & set.wrapping_neg(), set) == set
    }

    fn border(&self) -> u32 {
        let mut b = 0u32;
        for y in 0..self.rows {
            for x in 0..self.cols {
                if y == 0 || y == self.rows - 1 || x == 0 || x == self.cols - 1 {
                    b |= 1 << (y * self.cols + x);
                }
            }
        }
        b
    }

    fn row(&self, y: usize) -> u32 {
        let mut m = 0u32;
        for x in 0..self.cols {
            m |= 1 << (y * self.cols + x);
        }
        m
    }

    fn col(&self, x: usize) -> u32 {
        let mut m = 0u32;
        for y in 0..self.rows {
            m |= 1 << (y * self.cols + x);
        }
        m
    }
}

/// Number of two-part grid partitions of an `l` x `l` board, by area of one
/// part. Entry `k` counts the ordered partitions whose grey part has `k`
/// cells; both parts must be nonempty and edge-connected, so each unordered
/// partition shows up under both labelings.
///
/// Boards up to 4x4 run freely; 5x5 costs half a minute of cores and needs
/// `allow_heavy`; anything larger is refused.
pub fn brute_partitions(l: usize, allow_heavy: bool) -> Result<Vec<u64>, OracleError> {
    if l > 5 {
        return Err(OracleError::BoardTooLarge(l, 25));
    }
    if l == 5 && !allow_heavy {
        return Err(OracleError::HeavyRunNotEnabled(l));
    }
    let grid = Grid::new(l, l);
    let n = l * l;
    let count_range = |lo: u32, hi: u32| {
        let mut tally = vec![0u64; n + 1];
        for grey in lo..hi {
            let white = grid.all & !grey;
            if white == 0 || grey == 0 {
                continue;
            }
            if grid.is_connected(grey) && grid.is_connected(white) {
                tally[grey.count_ones() as usize] += 1;
            }
        }
        tally
    };
    if n < 20 {
        return Ok(count_range(1, grid.all));
    }
    // 33M masks for 5x5: split into chunks and sum the tallies.
    let chunks = 1u32 << 10;
    let span = (grid.all / chunks) + 1;
    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = (c * span).max(1);
            let hi = ((c + 1) * span).min(grid.all);
            count_range(lo, hi)
        })
        .reduce(
            || vec![0u64; n + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(tally)
}

/// Areas of all closed cycles on a `rows` x `cols` cell grid: nonempty,
/// edge-connected, hole-free cell subsets, optionally filtered to those
/// spanning the full width. Entry `k` counts cycles enclosing `k` cells.
pub fn brute_cycles(
    rows: usize,
    cols: usize,
    filter: SpanFilter,
) -> Result<Vec<u64>, OracleError> {
    let n = rows * cols;
    if n > 16 {
        return Err(OracleError::BoardTooLarge(rows.max(cols), 16));
    }
    let grid = Grid::new(rows, cols);
    let border = grid.border();
    let first_col = grid.col(0);
    let last_col = grid.col(cols - 1);
    let mut tally = vec![0u64; n + 1];
    for set in 1..=grid.all {
        if !grid.is_connected(set) {
            continue;
        }
        // Hole-free: every empty cell must reach the rim through empty cells.
        let white = grid.all & !set;
        if grid.flood(white & border, white) != white {
            continue;
        }
        match filter {
            SpanFilter::All => {}
            SpanFilter::LeftRight => {
                if set & first_col == 0 || set & last_col == 0 {
                    continue;
                }
            }
            SpanFilter::FourSides => {
                if set & first_col == 0
                    || set & last_col == 0
                    || set & grid.row(0) == 0
                    || set & grid.row(rows - 1) == 0
                {
                    continue;
                }
            }
        }
        tally[set.count_ones() as usize] += 1;
    }
    Ok(tally)
}

/// Census of valid partitions whose grey part sits in one canonical contact
/// class, by grey area. See `PanelClass` for the weights that recombine
/// these into engine counts.
pub fn brute_panel_census(l: usize, class: PanelClass) -> Result<Vec<u64>, OracleError> {
    if l > 4 {
        return Err(OracleError::BoardTooLarge(l, 16));
    }
    let grid = Grid::new(l, l);
    let n = l * l;
    let bottom = grid.row(0);
    let top = grid.row(l - 1);
    let left = grid.col(0);
    let right = grid.col(l - 1);
    let bl = 1u32;
    let corners = bl | (1 << (l - 1)) | (1 << ((l - 1) * l)) | (1 << (l * l - 1));
    let mut tally = vec![0u64; n + 1];
    for grey in 1..grid.all {
        let white = grid.all & !grey;
        if !grid.is_connected(grey) || !grid.is_connected(white) {
            continue;
        }
        let keep = match class {
            PanelClass::BottomRow => grey & bottom == bottom && grey & top == 0,
            PanelClass::BottomLeftCorner => grey & corners == bl,
            PanelClass::LeftSide => {
                grey & left != 0 && grey & (bottom | top | right) == 0
            }
            PanelClass::Interior => grey & (bottom | top | left | right) == 0,
        };
        if keep {
            tally[grey.count_ones() as usize] += 1;
        }
    }
    Ok(tally)
}

/// Weighted recombination of the four censuses: what the engine's two runs
/// should add up to for one grey orientation.
pub fn census_recombined(l: usize) -> Result<Vec<u64>, OracleError> {
    let c1 = brute_panel_census(l, PanelClass::BottomRow)?;
    let c2 = brute_panel_census(l, PanelClass::BottomLeftCorner)?;
    let c3 = brute_panel_census(l, PanelClass::LeftSide)?;
    let c4 = brute_panel_census(l, PanelClass::Interior)?;
    Ok((0..=l * l)
        .map(|k| 2 * c1[k] + 4 * c2[k] + 4 * c3[k] + c4[k])
        .collect())
}
