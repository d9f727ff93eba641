use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Structure {
    HeavyPath,
    K2Tree,
}

impl Structure {
    pub fn name(self) -> &'static str {
        match self {
            Structure::HeavyPath => "hp",
            Structure::K2Tree => "k2",
        }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Space accounting shared by both index structures.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceStats {
    pub structure: Structure,
    pub n: u64,
    pub lg_u: u32,
    /// Tree nodes: `|H|` for the heavy-path index, quadtree nodes for the
    /// k²-tree.
    pub nodes: usize,
    pub bits_h: Option<usize>,
    pub bits_l: Option<usize>,
    pub payload_bits: usize,
    /// Rank/select directories and fixed-size tables.
    pub aux_bits: usize,
    pub total_bits: usize,
    /// Bits per point; absent for an empty set.
    pub bpp: Option<f64>,
}

impl SpaceStats {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        structure: Structure,
        n: u64,
        lg_u: u32,
        nodes: usize,
        bits_h: Option<usize>,
        bits_l: Option<usize>,
        payload_bits: usize,
        aux_bits: usize,
    ) -> Self {
        let total_bits = payload_bits + aux_bits;
        Self {
            structure,
            n,
            lg_u,
            nodes,
            bits_h,
            bits_l,
            payload_bits,
            aux_bits,
            total_bits,
            bpp: (n > 0).then(|| total_bits as f64 / n as f64),
        }
    }
}
