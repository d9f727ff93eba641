use super::quadtree::QTree;
use crate::morton::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinNode {
    pub depth: u32,
    /// `[left, right]`; left is the 0 edge.
    pub children: [Option<u32>; 2],
    /// Number of leaves below (or at) this node.
    pub leaf_count: u32,
}

impl BinNode {
    pub fn is_leaf(&self) -> bool {
        self.children == [None, None]
    }

    pub fn has_two_children(&self) -> bool {
        self.children[0].is_some() && self.children[1].is_some()
    }
}

/// The binarized, pruned quadtree.
///
/// Each quadtree level becomes two binary levels, the first splitting on the
/// `y` bit and the second on the `x` bit, so the left/right edges on the way
/// to a leaf spell the leaf's Morton label. Nodes without a filled
/// descendant are dropped.
#[derive(Debug, Clone)]
pub struct BinTree {
    pub grid: GridSpec,
    pub nodes: Vec<BinNode>,
    pub root: Option<u32>,
    /// Leaves in left-to-right (Morton) order.
    pub leaves: Vec<u32>,
}

impl BinTree {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: u32) -> &BinNode {
        &self.nodes[id as usize]
    }

    pub fn internal_count(&self) -> usize {
        self.nodes.iter().filter(|n| !n.is_leaf()).count()
    }
}

pub fn binarize(qt: &QTree) -> BinTree {
    let mut t = BinTree {
        grid: qt.grid,
        nodes: Vec::new(),
        root: None,
        leaves: Vec::new(),
    };
    t.root = convert(qt, QTree::ROOT, &mut t);
    t
}

fn push(t: &mut BinTree, depth: u32, children: [Option<u32>; 2]) -> Option<u32> {
    let leaf_count = children
        .iter()
        .flatten()
        .map(|&c| t.nodes[c as usize].leaf_count)
        .sum();
    if leaf_count == 0 {
        return None;
    }
    let id = t.nodes.len() as u32;
    t.nodes.push(BinNode {
        depth,
        children,
        leaf_count,
    });
    Some(id)
}

fn convert(qt: &QTree, qid: u32, t: &mut BinTree) -> Option<u32> {
    let q = *qt.node(qid);
    let depth = 2 * q.depth;
    let Some(kids) = q.children else {
        if !q.filled {
            return None;
        }
        let id = t.nodes.len() as u32;
        t.nodes.push(BinNode {
            depth,
            children: [None, None],
            leaf_count: 1,
        });
        t.leaves.push(id);
        return Some(id);
    };
    let mut halves = [None, None];
    for (y, half) in halves.iter_mut().enumerate() {
        let left = convert(qt, kids[2 * y], t);
        let right = convert(qt, kids[2 * y + 1], t);
        *half = push(t, depth + 1, [left, right]);
    }
    push(t, depth, halves)
}
