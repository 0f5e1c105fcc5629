//! The order-2 Cayley tree as reduced words of the free product
//! Z₂ ∗ Z₂ ∗ Z₂ of three cyclic groups of order two.
//!
//! Every vertex corresponds one-to-one with a reduced word over the
//! generators a₁, a₂, a₃ (no two adjacent letters equal); the empty word is
//! the root. Word length equals graph distance from the root, so subgroup
//! parity and level queries are structural.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Number of generators of the free product (= k+1 for the order-2 tree).
pub const GENERATOR_COUNT: u8 = 3;

/// Deepest level `enumerate_levels` / `Volume` will materialize
/// (|V_20| ≈ 3.1M vertices).
pub const MAX_ENUM_DEPTH: usize = 20;

/// A vertex of the tree, stored as a reduced word over generators 1..=3.
///
/// The empty word is the root. Invariant: adjacent letters differ, so the
/// word is reduced under a_i² = e and `level() == word.len()` is the graph
/// distance to the root.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex {
    word: Vec<u8>,
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            write!(f, "e")
        } else {
            let letters: Vec<String> = self.word.iter().map(|g| g.to_string()).collect();
            write!(f, "[{}]", letters.join(","))
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Vertex {
    /// The root (identity word).
    pub fn root() -> Self {
        Vertex { word: Vec::new() }
    }

    /// Builds a vertex from a word, checking that it is reduced.
    pub fn from_word(word: &[u8]) -> Result<Self> {
        for (i, &g) in word.iter().enumerate() {
            if g == 0 || g > GENERATOR_COUNT {
                return Err(Error::InvalidParameter(format!(
                    "generator index {g} out of range 1..={GENERATOR_COUNT}"
                )));
            }
            if i > 0 && word[i - 1] == g {
                return Err(Error::InvalidParameter(format!(
                    "word not reduced: repeated generator {g} at position {i}"
                )));
            }
        }
        Ok(Vertex {
            word: word.to_vec(),
        })
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    /// Word length = distance to the root.
    pub fn level(&self) -> usize {
        self.word.len()
    }

    pub fn is_root(&self) -> bool {
        self.word.is_empty()
    }

    /// Right-multiplies by the generator a_i. Since a_i² = e this either
    /// cancels the last letter or appends; the result is always reduced.
    pub fn multiply_generator(&self, i: u8) -> Self {
        assert!(
            (1..=GENERATOR_COUNT).contains(&i),
            "generator index {i} out of range"
        );
        let mut word = self.word.clone();
        if word.last() == Some(&i) {
            word.pop();
        } else {
            word.push(i);
        }
        Vertex { word }
    }

    /// The unique neighbor one level up; `None` for the root.
    pub fn parent(&self) -> Option<Vertex> {
        if self.word.is_empty() {
            None
        } else {
            Some(Vertex {
                word: self.word[..self.word.len() - 1].to_vec(),
            })
        }
    }

    /// Neighbors one level down, in generator order. The root has three,
    /// every other vertex two (its parent's generator is excluded by
    /// reduction).
    pub fn direct_successors(&self) -> Vec<Vertex> {
        let last = self.word.last().copied();
        (1..=GENERATOR_COUNT)
            .filter(|&g| Some(g) != last)
            .map(|g| {
                let mut word = self.word.clone();
                word.push(g);
                Vertex { word }
            })
            .collect()
    }

    /// All nearest neighbors (parent plus successors); always three.
    pub fn neighbors(&self) -> Vec<Vertex> {
        (1..=GENERATOR_COUNT)
            .map(|g| self.multiply_generator(g))
            .collect()
    }

    /// Membership in the index-2 subgroup of even-length words.
    pub fn in_even_subgroup(&self) -> bool {
        self.word.len().is_multiple_of(2)
    }
}

/// Unordered pairs {x, y} of direct successors of `z`: the one-level
/// next-nearest-neighbor bonds below `z`. Three pairs under the root, one
/// under every other vertex.
pub fn ternary_sibling_pairs(z: &Vertex) -> Vec<(Vertex, Vertex)> {
    let succ = z.direct_successors();
    let mut pairs = Vec::new();
    for i in 0..succ.len() {
        for j in (i + 1)..succ.len() {
            pairs.push((succ[i].clone(), succ[j].clone()));
        }
    }
    pairs
}

/// Which normal-subgroup case a periodic boundary field lives on.
///
/// Only two facts about a finite-index subgroup H₀ matter for the periodic
/// classification: whether it contains one of the generators
/// (I(H₀) = H₀ ∩ {a₁,a₂,a₃} ≠ ∅) and the even/odd word-length parity, so
/// the descriptor carries exactly those.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubgroupDescriptor {
    /// The whole group; fields are constant (translation invariant).
    FullGroup,
    /// Words of even length (index 2); contains no generator.
    EvenSubgroup,
    /// Any other finite-index subgroup, abstracted to its generator test.
    AbstractFiniteIndex { has_generator: bool },
}

impl SubgroupDescriptor {
    /// Whether the subgroup contains at least one generator a_i.
    pub fn has_generator(&self) -> bool {
        match self {
            SubgroupDescriptor::FullGroup => true,
            SubgroupDescriptor::EvenSubgroup => false,
            SubgroupDescriptor::AbstractFiniteIndex { has_generator } => *has_generator,
        }
    }

    /// Structural membership test, where one exists. `None` for the
    /// abstract case (cosets are deliberately not materialized).
    pub fn contains(&self, v: &Vertex) -> Option<bool> {
        match self {
            SubgroupDescriptor::FullGroup => Some(true),
            SubgroupDescriptor::EvenSubgroup => Some(v.in_even_subgroup()),
            SubgroupDescriptor::AbstractFiniteIndex { .. } => None,
        }
    }
}

/// Shells W_0 .. W_n, each in lexicographic word order.
#[derive(Clone, Debug)]
pub struct Levels {
    shells: Vec<Vec<Vertex>>,
}

impl Levels {
    pub fn depth(&self) -> usize {
        self.shells.len() - 1
    }

    /// The shell W_m.
    pub fn shell(&self, m: usize) -> &[Vertex] {
        &self.shells[m]
    }

    /// V_n = W_0 ∪ ... ∪ W_n in level-major, lex-within-level order.
    pub fn volume_vertices(&self) -> Vec<Vertex> {
        self.shells.iter().flatten().cloned().collect()
    }
}

/// Enumerates the shells W_0..W_n. |W_0| = 1 and |W_m| = 3·2^{m−1} for
/// m ≥ 1, so |V_n| = 1 + 3(2^n − 1).
pub fn enumerate_levels(n: usize) -> Result<Levels> {
    if n > MAX_ENUM_DEPTH {
        return Err(Error::ResourceLimit(format!(
            "enumeration depth {n} exceeds cap {MAX_ENUM_DEPTH}"
        )));
    }
    let mut shells = vec![vec![Vertex::root()]];
    for m in 1..=n {
        let mut shell = Vec::with_capacity(3 << (m - 1));
        for parent in &shells[m - 1] {
            shell.extend(parent.direct_successors());
        }
        // parents are lex-sorted and successors appended in generator
        // order, so the shell is already lex-sorted
        shells.push(shell);
    }
    Ok(Levels { shells })
}

/// The finite volume V_n with its vertex indexing and bond lists.
///
/// Vertices are indexed level-major (lex within each level), so V_{n−1} is
/// exactly the index prefix `0..shell_start()` and the outer shell W_n the
/// suffix. Bond lists are deterministic: nearest-neighbor bonds are
/// (parent, child) in child order, ternary bonds are sibling pairs in
/// parent order.
#[derive(Clone, Debug)]
pub struct Volume {
    depth: usize,
    vertices: Vec<Vertex>,
    index: HashMap<Vertex, usize>,
    levels: Vec<u8>,
    nn_bonds: Vec<(u32, u32)>,
    ternary_bonds: Vec<(u32, u32)>,
    shell_start: usize,
}

impl Volume {
    pub fn new(depth: usize) -> Result<Self> {
        let levels = enumerate_levels(depth)?;
        let vertices = levels.volume_vertices();
        let index: HashMap<Vertex, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let vertex_levels: Vec<u8> = vertices.iter().map(|v| v.level() as u8).collect();

        let mut nn_bonds = Vec::with_capacity(vertices.len().saturating_sub(1));
        for (i, v) in vertices.iter().enumerate().skip(1) {
            let p = v.parent().expect("non-root vertex has a parent");
            nn_bonds.push((index[&p] as u32, i as u32));
        }

        let mut ternary_bonds = Vec::new();
        for z in &vertices {
            if z.level() + 1 > depth {
                continue;
            }
            for (x, y) in ternary_sibling_pairs(z) {
                ternary_bonds.push((index[&x] as u32, index[&y] as u32));
            }
        }

        let shell_start = if depth == 0 {
            0
        } else {
            vertices.len() - levels.shell(depth).len()
        };

        Ok(Volume {
            depth,
            vertices,
            index,
            levels: vertex_levels,
            nn_bonds,
            ternary_bonds,
            shell_start,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Vertex {
        &self.vertices[i]
    }

    pub fn index_of(&self, v: &Vertex) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn level_of(&self, i: usize) -> usize {
        self.levels[i] as usize
    }

    /// Nearest-neighbor (parent, child) index pairs; |V_n| − 1 of them.
    pub fn nn_bonds(&self) -> &[(u32, u32)] {
        &self.nn_bonds
    }

    /// One-level next-nearest-neighbor (sibling) index pairs:
    /// 3 + (|V_{n−1}| − 1) = 3·2^{n−1} of them for n ≥ 1.
    pub fn ternary_bonds(&self) -> &[(u32, u32)] {
        &self.ternary_bonds
    }

    /// Index range of the outer shell W_n.
    pub fn shell_indices(&self) -> std::ops::Range<usize> {
        self.shell_start..self.vertices.len()
    }

    /// Number of vertices in the outer shell.
    pub fn shell_len(&self) -> usize {
        self.vertices.len() - self.shell_start
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(word: &[u8]) -> Vertex {
        Vertex::from_word(word).unwrap()
    }

    #[test]
    fn multiply_generator_appends_and_cancels() {
        assert_eq!(Vertex::root().multiply_generator(1), v(&[1]));
        assert_eq!(v(&[1, 2]).multiply_generator(2), v(&[1]));
        assert_eq!(v(&[1, 2]).multiply_generator(3), v(&[1, 2, 3]));
    }

    #[test]
    fn multiply_generator_is_involutive() {
        let words: [&[u8]; 5] = [&[], &[1], &[2, 1], &[1, 2, 3], &[3, 1, 3, 2]];
        for w in words {
            let x = v(w);
            for g in 1..=GENERATOR_COUNT {
                assert_eq!(x.multiply_generator(g).multiply_generator(g), x);
            }
        }
    }

    #[test]
    fn from_word_rejects_unreduced_or_out_of_range() {
        assert!(Vertex::from_word(&[1, 1]).is_err());
        assert!(Vertex::from_word(&[0]).is_err());
        assert!(Vertex::from_word(&[4]).is_err());
        assert!(Vertex::from_word(&[1, 2, 2, 3]).is_err());
    }

    #[test]
    fn successors_of_root_and_inner_vertices() {
        assert_eq!(
            Vertex::root().direct_successors(),
            vec![v(&[1]), v(&[2]), v(&[3])]
        );
        assert_eq!(v(&[1]).direct_successors(), vec![v(&[1, 2]), v(&[1, 3])]);
        assert_eq!(
            v(&[2, 1]).direct_successors(),
            vec![v(&[2, 1, 2]), v(&[2, 1, 3])]
        );
    }

    #[test]
    fn every_vertex_has_three_neighbors() {
        let words: [&[u8]; 4] = [&[], &[2], &[1, 3], &[3, 2, 1]];
        for w in words {
            let x = v(w);
            let nb = x.neighbors();
            assert_eq!(nb.len(), 3);
            // parent is among the neighbors for non-root vertices
            if let Some(p) = x.parent() {
                assert!(nb.contains(&p));
            }
            for y in &nb {
                assert_eq!(
                    (y.level() as i64 - x.level() as i64).abs(),
                    1,
                    "neighbor differs by one level"
                );
            }
        }
    }

    #[test]
    fn sibling_pairs_counts() {
        assert_eq!(ternary_sibling_pairs(&Vertex::root()).len(), 3);
        assert_eq!(ternary_sibling_pairs(&v(&[1])).len(), 1);
        assert_eq!(ternary_sibling_pairs(&v(&[2, 1])).len(), 1);
        assert_eq!(
            ternary_sibling_pairs(&Vertex::root()),
            vec![
                (v(&[1]), v(&[2])),
                (v(&[1]), v(&[3])),
                (v(&[2]), v(&[3]))
            ]
        );
        assert_eq!(
            ternary_sibling_pairs(&v(&[1])),
            vec![(v(&[1, 2]), v(&[1, 3]))]
        );
    }

    #[test]
    fn shell_sizes_match_reduced_word_counts() {
        // oracle: count reduced words of each length directly
        fn count_reduced(len: usize) -> usize {
            fn rec(word: &mut Vec<u8>, len: usize, acc: &mut usize) {
                if word.len() == len {
                    *acc += 1;
                    return;
                }
                for g in 1..=GENERATOR_COUNT {
                    if word.last() != Some(&g) {
                        word.push(g);
                        rec(word, len, acc);
                        word.pop();
                    }
                }
            }
            let mut acc = 0;
            rec(&mut Vec::new(), len, &mut acc);
            acc
        }

        let levels = enumerate_levels(4).unwrap();
        for m in 0..=4 {
            assert_eq!(levels.shell(m).len(), count_reduced(m));
        }
        // frozen values from the counting oracle
        assert_eq!(levels.shell(1).len(), 3);
        assert_eq!(levels.shell(2).len(), 6);
        assert_eq!(levels.shell(3).len(), 12);
        // |W_m| = 3·2^{m−1}, |V_n| = 1 + 3(2^n − 1)
        for m in 1..=4 {
            assert_eq!(levels.shell(m).len(), 3 << (m - 1));
        }
        let total: usize = (0..=3).map(|m| levels.shell(m).len()).sum();
        assert_eq!(total, 22);
    }

    #[test]
    fn enumeration_is_lexicographic_within_levels() {
        let levels = enumerate_levels(3).unwrap();
        for m in 0..=3 {
            let shell = levels.shell(m);
            for w in shell.windows(2) {
                assert!(w[0] < w[1], "shell {m} not sorted");
            }
        }
    }

    #[test]
    fn enumeration_depth_cap() {
        assert!(matches!(
            enumerate_levels(MAX_ENUM_DEPTH + 1),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn even_subgroup_is_word_length_parity() {
        assert!(Vertex::root().in_even_subgroup());
        assert!(!v(&[1]).in_even_subgroup());
        assert!(v(&[1, 2]).in_even_subgroup());
        assert!(SubgroupDescriptor::EvenSubgroup.contains(&v(&[1, 2])).unwrap());
        assert!(!SubgroupDescriptor::EvenSubgroup.contains(&v(&[3])).unwrap());
        assert!(!SubgroupDescriptor::EvenSubgroup.has_generator());
        assert!(SubgroupDescriptor::FullGroup.has_generator());
    }

    #[test]
    fn volume_counts_and_bond_counts() {
        // |V_1| = 4, |V_2| = 10, |V_3| = 22
        for (n, vn) in [(1usize, 4usize), (2, 10), (3, 22)] {
            let vol = Volume::new(n).unwrap();
            assert_eq!(vol.len(), vn);
            assert_eq!(vol.len(), 1 + 3 * ((1usize << n) - 1));
            // nearest-neighbor bonds: tree property |V_n| − 1
            assert_eq!(vol.nn_bonds().len(), vn - 1);
        }
    }

    #[test]
    fn ternary_bond_count_matches_pair_enumeration() {
        // explicit oracle: enumerate sibling pairs with both members in V_n
        for n in 1..=4usize {
            let vol = Volume::new(n).unwrap();
            let mut oracle = 0usize;
            for z in vol.vertices() {
                for (x, y) in ternary_sibling_pairs(z) {
                    if vol.index_of(&x).is_some() && vol.index_of(&y).is_some() {
                        oracle += 1;
                    }
                }
            }
            assert_eq!(vol.ternary_bonds().len(), oracle);
            // closed form: 3 pairs under the root plus one per non-root
            // internal vertex, i.e. 3 + (|V_{n−1}| − 1) = 3·2^{n−1}
            assert_eq!(oracle, 3 << (n - 1));
        }
    }

    #[test]
    fn volume_order_is_level_major_prefix_consistent() {
        let v2 = Volume::new(2).unwrap();
        let v3 = Volume::new(3).unwrap();
        // V_2 is an index prefix of V_3
        for i in 0..v2.len() {
            assert_eq!(v2.vertex(i), v3.vertex(i));
        }
        assert_eq!(v3.shell_indices(), 10..22);
        assert_eq!(v2.shell_indices(), 4..10);
    }
}
