use super::bintree::BinTree;
use crate::bitvec::{BitBuf, RankSelect};
use crate::error::Result;
use crate::hpindex::HPIndex;

/// One heavy path, top node first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeavyPath {
    pub start_depth: u32,
    pub nodes: Vec<u32>,
    /// One bit per node: `false` for a left child, `true` for a right child.
    /// The root counts as a left child.
    pub bits: Vec<bool>,
}

impl HeavyPath {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn head(&self) -> u32 {
        self.nodes[0]
    }

    /// Node of this path at tree depth `depth`, if the path covers it.
    pub fn node_at(&self, depth: u32) -> Option<u32> {
        let off = depth.checked_sub(self.start_depth)?;
        self.nodes.get(off as usize).copied()
    }
}

#[derive(Debug, Clone)]
pub struct HeavyPaths {
    pub paths: Vec<HeavyPath>,
    /// Index into `paths` of the path containing each tree node.
    pub path_of: Vec<u32>,
}

impl HeavyPaths {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Applies a new order; `order[r]` is the old index of the path ranked `r`.
    fn permuted(self, order: &[usize]) -> Self {
        let mut new_index = vec![0u32; self.paths.len()];
        for (r, &old) in order.iter().enumerate() {
            new_index[old] = r as u32;
        }
        let mut slots: Vec<Option<HeavyPath>> = self.paths.into_iter().map(Some).collect();
        let paths = order
            .iter()
            .map(|&old| slots[old].take().unwrap())
            .collect();
        let path_of = self
            .path_of
            .iter()
            .map(|&p| new_index[p as usize])
            .collect();
        Self { paths, path_of }
    }
}

/// Splits `t` into root-to-leaf heavy paths. A path always continues into
/// the child with more leaves below it, the left child on ties. Paths come
/// out in discovery order; see [`order_paths`] for the ranking.
pub fn decompose(t: &BinTree) -> HeavyPaths {
    let mut paths = Vec::new();
    let mut path_of = vec![u32::MAX; t.node_count()];
    let mut heads: Vec<(u32, bool)> = t.root.map(|r| (r, false)).into_iter().collect();
    while let Some((head, side)) = heads.pop() {
        let index = paths.len() as u32;
        let mut path = HeavyPath {
            start_depth: t.node(head).depth,
            nodes: Vec::new(),
            bits: Vec::new(),
        };
        let (mut v, mut bit) = (head, side);
        loop {
            path.nodes.push(v);
            path.bits.push(bit);
            path_of[v as usize] = index;
            match t.node(v).children {
                [None, None] => break,
                [Some(l), Some(r)] => {
                    let heavy_left = t.node(l).leaf_count >= t.node(r).leaf_count;
                    let (next, light) = if heavy_left {
                        ((l, false), (r, true))
                    } else {
                        ((r, true), (l, false))
                    };
                    heads.push(light);
                    (v, bit) = next;
                }
                [Some(l), None] => (v, bit) = (l, false),
                [None, Some(r)] => (v, bit) = (r, true),
            }
        }
        paths.push(path);
    }
    HeavyPaths { paths, path_of }
}

/// Ranks the paths: longer paths first, and among paths of equal length
/// (equal start depth) in the order of the paths holding their parents.
///
/// Built depth by depth: the ranked prefix at depth `d` is exactly the set
/// of paths covering `d`, and scanning it in rank order while appending the
/// path hung off each branching node makes the `j`-th branching node at
/// depth `d` the parent of the `j`-th path starting at depth `d + 1`.
pub fn order_paths(t: &BinTree, hp: HeavyPaths) -> HeavyPaths {
    let Some(root) = t.root else {
        return hp;
    };
    let leaf_depth = t.grid.label_len();
    let mut order = vec![hp.path_of[root as usize] as usize];
    for d in 0..leaf_depth {
        let covering = order.len();
        for r in 0..covering {
            let path = &hp.paths[order[r]];
            let Some(v) = path.node_at(d) else { continue };
            if let [Some(l), Some(rc)] = t.node(v).children {
                let own = order[r] as u32;
                let light = if hp.path_of[l as usize] == own { rc } else { l };
                order.push(hp.path_of[light as usize] as usize);
            }
        }
    }
    debug_assert_eq!(order.len(), hp.paths.len());
    hp.permuted(&order)
}

/// Emits the concatenated path encodings and the per-depth branching
/// bitvectors for ranked paths.
pub fn encode<B: RankSelect>(t: &BinTree, hp: &HeavyPaths) -> Result<HPIndex<B>> {
    let grid = t.grid;
    let leaf_depth = grid.label_len();
    let mut paths_starting_at = vec![0u64; leaf_depth as usize + 1];
    let mut h = BitBuf::with_capacity(t.node_count());
    for path in &hp.paths {
        paths_starting_at[path.start_depth as usize] += 1;
        for &b in &path.bits {
            h.push(b);
        }
    }
    let levels = (0..leaf_depth)
        .map(|d| {
            hp.paths
                .iter()
                .take_while(|p| p.start_depth <= d)
                .map(|p| t.node(p.node_at(d).unwrap()).has_two_children())
                .collect()
        })
        .collect();
    HPIndex::from_parts(grid, paths_starting_at, h, levels)
}

/// Position in `H` of every tree node, for ranked paths.
pub fn node_positions(t: &BinTree, hp: &HeavyPaths) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(hp.len());
    let mut acc = 0;
    for p in &hp.paths {
        offsets.push(acc);
        acc += p.len();
    }
    (0..t.node_count())
        .map(|v| {
            let p = hp.path_of[v] as usize;
            offsets[p] + (t.nodes[v].depth - hp.paths[p].start_depth) as usize
        })
        .collect()
}
