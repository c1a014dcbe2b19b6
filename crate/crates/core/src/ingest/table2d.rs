use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Emitter, IngestReport};
use crate::error::IngestError;
use crate::graph::Graph;
use crate::model::{labels, DatasetId, NodeId, NodeKind};
use crate::typing::classify_value;

/// Inclusive rectangle of merged cells; the top-left cell carries the content.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Merge {
    pub row0: usize,
    pub col0: usize,
    pub row1: usize,
    pub col1: usize,
}

impl Merge {
    fn contains(&self, r: usize, c: usize) -> bool {
        (self.row0..=self.row1).contains(&r) && (self.col0..=self.col1).contains(&c)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Grid2d {
    pub cells: Vec<Vec<Option<String>>>,
    #[serde(default)]
    pub header_rows: usize,
    #[serde(default)]
    pub header_cols: usize,
    #[serde(default)]
    pub merges: Vec<Merge>,
}

impl Grid2d {
    pub fn rows(&self) -> usize {
        self.cells.len()
    }

    pub fn cols(&self) -> usize {
        self.cells.first().map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<(), IngestError> {
        let (rows, cols) = (self.rows(), self.cols());
        if let Some(r) = self.cells.iter().position(|row| row.len() != cols) {
            return Err(IngestError::InvalidGrid(format!(
                "row {r} has {} cells, expected {cols}",
                self.cells[r].len()
            )));
        }
        if self.header_rows > rows || self.header_cols > cols {
            return Err(IngestError::InvalidGrid(format!(
                "{}x{} headers exceed a {rows}x{cols} grid",
                self.header_rows, self.header_cols
            )));
        }
        for (i, m) in self.merges.iter().enumerate() {
            if m.row0 > m.row1 || m.col0 > m.col1 || m.row1 >= rows || m.col1 >= cols {
                return Err(IngestError::InvalidGrid(format!("merge {i} out of bounds")));
            }
            for other in &self.merges[..i] {
                let disjoint = m.row1 < other.row0
                    || other.row1 < m.row0
                    || m.col1 < other.col0
                    || other.col1 < m.col0;
                if !disjoint {
                    return Err(IngestError::InvalidGrid(format!(
                        "merge {i} overlaps another"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Cell holding the content of (r, c) once merges are resolved.
    fn owner(&self, r: usize, c: usize) -> (usize, usize) {
        self.merges
            .iter()
            .find(|m| m.contains(r, c))
            .map_or((r, c), |m| (m.row0, m.col0))
    }

    fn is_header(&self, r: usize, c: usize) -> bool {
        r < self.header_rows || c < self.header_cols
    }
}

/// A mapped cell and the identity generated for it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CellNode {
    pub row: usize,
    pub col: usize,
    pub node: NodeId,
    pub uri: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Table2dReport {
    #[serde(flatten)]
    pub report: IngestReport,
    pub cells: Vec<CellNode>,
}

/// Header cells become header-cell nodes linked to their enclosing header by
/// `cl:parentHeaderCell`; each data cell becomes one fresh value node linked
/// to its nearest column and row headers.
#[allow(clippy::needless_range_loop)]
pub fn ingest_2dtable(
    graph: &mut Graph,
    grid: &Grid2d,
    ds: DatasetId,
) -> Result<Table2dReport, IngestError> {
    grid.validate()?;
    let mut em = Emitter::new(graph, ds)?;
    let (rows, cols) = (grid.rows(), grid.cols());
    let mut node_at: Vec<Vec<Option<NodeId>>> = vec![vec![None; cols]; rows];
    let mut cells = Vec::new();

    for r in 0..rows {
        for c in 0..cols {
            if grid.owner(r, c) != (r, c) {
                continue;
            }
            let Some(label) = &grid.cells[r][c] else {
                continue;
            };
            let node = if grid.is_header(r, c) {
                em.fresh(label, NodeKind::HeaderCellNode)?
            } else {
                match classify_value(label) {
                    NodeKind::UriNode => em.uri(label)?,
                    kind => em.fresh(label, kind)?,
                }
            };
            node_at[r][c] = Some(node);
            cells.push(CellNode {
                row: r,
                col: c,
                node,
                uri: format!("urn:integraph:table:{ds}:r{r}c{c}"),
            });
        }
    }
    let at = |r: usize, c: usize| {
        let (r, c) = grid.owner(r, c);
        node_at[r][c]
    };

    let mut parents: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    let mut anchored: BTreeSet<NodeId> = BTreeSet::new();
    for r in 0..rows {
        for c in 0..cols {
            let Some(node) = at(r, c) else { continue };
            let column_header = r < grid.header_rows && c >= grid.header_cols;
            let row_header = c < grid.header_cols && r >= grid.header_rows;
            if column_header || row_header {
                let parent = if column_header {
                    (0..r).rev().find_map(|pr| at(pr, c).filter(|p| *p != node))
                } else {
                    (0..c).rev().find_map(|pc| at(r, pc).filter(|p| *p != node))
                };
                match parent {
                    Some(p) => {
                        parents.insert((node, p));
                    }
                    None => {
                        anchored.insert(node);
                    }
                }
            } else if grid.is_header(r, c) {
                anchored.insert(node);
            } else {
                let x = (0..grid.header_rows).rev().find_map(|hr| at(hr, c));
                let y = (0..grid.header_cols).rev().find_map(|hc| at(r, hc));
                if let Some(x) = x {
                    em.reserved_edge(node, x, labels::CLOSEST_X_HEADER_CELL)?;
                }
                if let Some(y) = y {
                    em.reserved_edge(node, y, labels::CLOSEST_Y_HEADER_CELL)?;
                }
                if x.is_none() && y.is_none() {
                    anchored.insert(node);
                }
            }
        }
    }
    for (child, parent) in parents {
        em.reserved_edge(child, parent, labels::PARENT_HEADER_CELL)?;
    }
    for node in anchored {
        em.anchor(node)?;
    }
    Ok(Table2dReport {
        report: em.finish(),
        cells,
    })
}
