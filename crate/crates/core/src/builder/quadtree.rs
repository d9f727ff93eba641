use super::PointSet;
use crate::morton::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QNode {
    /// 1 for internal nodes and filled cells, 0 for empty squares.
    pub filled: bool,
    pub depth: u32,
    /// Children in top-left, top-right, bottom-left, bottom-right order.
    pub children: Option<[u32; 4]>,
}

/// Pointer-based 4-ary quadtree, root at index 0.
///
/// Squares are subdivided whenever they contain at least one point, so every
/// filled leaf is a unit cell at depth `lg_u`, even inside fully filled
/// squares.
#[derive(Debug, Clone)]
pub struct QTree {
    pub grid: GridSpec,
    pub nodes: Vec<QNode>,
}

impl QTree {
    pub const ROOT: u32 = 0;

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: u32) -> &QNode {
        &self.nodes[id as usize]
    }
}

pub fn build_quadtree(ps: &PointSet) -> QTree {
    let grid = ps.grid();
    let labels: Vec<u64> = ps.labels().collect();
    let mut nodes = Vec::new();
    build_rec(&labels, 0, grid.lg_u(), &mut nodes);
    QTree { grid, nodes }
}

fn build_rec(labels: &[u64], depth: u32, lg_u: u32, nodes: &mut Vec<QNode>) -> u32 {
    let id = nodes.len() as u32;
    if labels.is_empty() || depth == lg_u {
        debug_assert!(labels.len() <= 1);
        nodes.push(QNode {
            filled: !labels.is_empty(),
            depth,
            children: None,
        });
        return id;
    }
    nodes.push(QNode {
        filled: true,
        depth,
        children: None,
    });
    let shift = 2 * (lg_u - depth - 1);
    let mut children = [0u32; 4];
    let mut rest = labels;
    for (q, child) in children.iter_mut().enumerate() {
        let split = rest.partition_point(|&l| (l >> shift & 3) as usize == q);
        *child = build_rec(&rest[..split], depth + 1, lg_u, nodes);
        rest = &rest[split..];
    }
    nodes[id as usize].children = Some(children);
    id
}
