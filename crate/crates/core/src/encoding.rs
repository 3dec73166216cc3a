//! Site-to-codeword maps, Gray orderings and hypercube edges.
//!
//! A codeword is stored as an integer whose bit `l` is the value of qubit
//! `l`. When printed it is big-endian: the leftmost character is qubit
//! `n - 1`, so site 0 under the shifted map on three qubits reads `001`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sim::bitstring;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EncodingError {
    #[error("number of sites must be at least 1")]
    NoSites,
    #[error("codeword widths differ ({0} vs {1})")]
    WidthMismatch(usize, usize),
    #[error("register width must be at least 1")]
    ZeroWidth,
    #[error("register width {0} exceeds 63 qubits")]
    TooWide(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncodingMode {
    /// Site `k` stored as `binary(k)`.
    Plain,
    /// Site `k` stored as `binary(k + 1 mod 2^n)`, keeping the all-zero
    /// register distinct from the first prepared site.
    Shifted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Codeword {
    pub bits: u64,
    pub width: usize,
}

impl Codeword {
    pub fn new(bits: u64, width: usize) -> Self {
        Self { bits, width }
    }

    pub fn bit(&self, position: usize) -> bool {
        self.bits >> position & 1 == 1
    }

    pub fn hamming(&self, other: &Codeword) -> u32 {
        (self.bits ^ other.bits).count_ones()
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&bitstring(self.bits, self.width))
    }
}

/// Qubit width for `n_sites`: `max(1, ceil(log2 N))`.
pub fn register_width(n_sites: usize) -> usize {
    if n_sites <= 2 {
        1
    } else {
        (usize::BITS - (n_sites - 1).leading_zeros()) as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EncodingMap {
    n_sites: usize,
    width: usize,
    mode: EncodingMode,
    table: Vec<u64>,
    inverse: Vec<Option<usize>>,
}

impl EncodingMap {
    pub fn build(n_sites: usize, mode: EncodingMode) -> Result<Self, EncodingError> {
        if n_sites == 0 {
            return Err(EncodingError::NoSites);
        }
        let width = register_width(n_sites);
        if width > 30 {
            return Err(EncodingError::TooWide(width));
        }
        let dim = 1u64 << width;
        let table: Vec<u64> = (0..n_sites as u64)
            .map(|k| match mode {
                EncodingMode::Plain => k,
                EncodingMode::Shifted => (k + 1) % dim,
            })
            .collect();
        let mut inverse = vec![None; dim as usize];
        for (site, &cw) in table.iter().enumerate() {
            inverse[cw as usize] = Some(site);
        }
        Ok(Self { n_sites, width, mode, table, inverse })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Qubit count of the data register.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn mode(&self) -> EncodingMode {
        self.mode
    }

    pub fn codeword(&self, site: usize) -> Codeword {
        Codeword::new(self.table[site], self.width)
    }

    pub fn codewords(&self) -> impl Iterator<Item = Codeword> + '_ {
        self.table.iter().map(move |&b| Codeword::new(b, self.width))
    }

    pub fn site_of(&self, bits: u64) -> Option<usize> {
        self.inverse.get(bits as usize).copied().flatten()
    }

    /// Codewords with no site attached (structurally inactive).
    pub fn unencoded(&self) -> Vec<Codeword> {
        self.inverse
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_none())
            .map(|(b, _)| Codeword::new(b as u64, self.width))
            .collect()
    }
}

/// Reflected binary Gray order on `n` bits, as a cycle.
pub fn gray_sequence(n: usize) -> Result<Vec<Codeword>, EncodingError> {
    if n == 0 {
        return Err(EncodingError::ZeroWidth);
    }
    if n > 30 {
        return Err(EncodingError::TooWide(n));
    }
    Ok((0..1u64 << n).map(|i| Codeword::new(i ^ (i >> 1), n)).collect())
}

/// Positions where two codewords differ, and the shared value elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffSets {
    pub differ: Vec<usize>,
    pub same: Vec<(usize, bool)>,
}

pub fn diff_sets(a: Codeword, b: Codeword) -> Result<DiffSets, EncodingError> {
    if a.width != b.width {
        return Err(EncodingError::WidthMismatch(a.width, b.width));
    }
    let x = a.bits ^ b.bits;
    let mut differ = Vec::new();
    let mut same = Vec::new();
    for l in 0..a.width {
        if x >> l & 1 == 1 {
            differ.push(l);
        } else {
            same.push((l, a.bit(l)));
        }
    }
    Ok(DiffSets { differ, same })
}

/// Two encoded sites whose codewords differ in exactly one position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HypercubeEdge {
    /// Lower site index.
    pub j: usize,
    pub k: usize,
    /// The single differing qubit.
    pub position: usize,
}

/// All Hamming-distance-1 site pairs of a map, sorted by `(j, k)`.
pub fn hypercube_edges(map: &EncodingMap) -> Vec<HypercubeEdge> {
    let mut edges = Vec::new();
    for j in 0..map.n_sites() {
        let cj = map.codeword(j).bits;
        for l in 0..map.width() {
            let partner = cj ^ (1 << l);
            if let Some(k) = map.site_of(partner) {
                if k > j {
                    edges.push(HypercubeEdge { j, k, position: l });
                }
            }
        }
    }
    edges.sort();
    edges
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(c: Codeword) -> String {
        c.to_string()
    }

    #[test]
    fn shifted_map_matches_table() {
        let m = EncodingMap::build(8, EncodingMode::Shifted).unwrap();
        let expected = ["001", "010", "011", "100", "101", "110", "111", "000"];
        for (k, e) in expected.iter().enumerate() {
            assert_eq!(s(m.codeword(k)), *e, "site {k}");
        }
        assert_eq!(m.site_of(0b111), Some(6));
    }

    #[test]
    fn single_site_gets_one_qubit() {
        let m = EncodingMap::build(1, EncodingMode::Plain).unwrap();
        assert_eq!(m.width(), 1);
        assert_eq!(s(m.codeword(0)), "0");
        assert!(matches!(EncodingMap::build(0, EncodingMode::Plain), Err(EncodingError::NoSites)));
    }

    #[test]
    fn widths() {
        assert_eq!(register_width(1), 1);
        assert_eq!(register_width(2), 1);
        assert_eq!(register_width(3), 2);
        assert_eq!(register_width(4), 2);
        assert_eq!(register_width(5), 3);
        assert_eq!(register_width(1024), 10);
        assert_eq!(register_width(1025), 11);
    }

    #[test]
    fn gray_three_bits() {
        let g: Vec<String> = gray_sequence(3).unwrap().into_iter().map(s).collect();
        assert_eq!(g, ["000", "001", "011", "010", "110", "111", "101", "100"]);
        let g1: Vec<String> = gray_sequence(1).unwrap().into_iter().map(s).collect();
        assert_eq!(g1, ["0", "1"]);
    }

    #[test]
    fn diff_set_examples() {
        let d = diff_sets(Codeword::new(0b000, 3), Codeword::new(0b001, 3)).unwrap();
        assert_eq!(d.differ, vec![0]);
        assert_eq!(d.same, vec![(1, false), (2, false)]);
        let d = diff_sets(Codeword::new(0b010, 3), Codeword::new(0b010, 3)).unwrap();
        assert!(d.differ.is_empty());
        assert_eq!(d.same.len(), 3);
        let d = diff_sets(Codeword::new(0b011, 3), Codeword::new(0b101, 3)).unwrap();
        assert_eq!(d.differ, vec![1, 2]);
        assert_eq!(d.same, vec![(0, true)]);
        assert!(diff_sets(Codeword::new(0, 2), Codeword::new(0, 3)).is_err());
    }

    #[test]
    fn hypercube_edge_counts() {
        let m1 = EncodingMap::build(2, EncodingMode::Shifted).unwrap();
        let e1 = hypercube_edges(&m1);
        assert_eq!(e1.len(), 1);
        assert_eq!(e1[0].position, 0);
        let m2 = EncodingMap::build(4, EncodingMode::Shifted).unwrap();
        assert_eq!(hypercube_edges(&m2).len(), 4);
        let m3 = EncodingMap::build(8, EncodingMode::Shifted).unwrap();
        let e3 = hypercube_edges(&m3);
        assert_eq!(e3.len(), 12);
        for l in 0..3 {
            assert_eq!(e3.iter().filter(|e| e.position == l).count(), 4);
        }
    }

    #[test]
    fn partial_map_leaves_codewords_unencoded() {
        let m = EncodingMap::build(5, EncodingMode::Shifted).unwrap();
        assert_eq!(m.width(), 3);
        assert_eq!(m.unencoded().len(), 3);
    }
}
