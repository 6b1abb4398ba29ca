//! Transition-sequence algebra.
//!
//! A circuit code in the `d`-cube is stored as the cyclic word of coordinates
//! flipped along the cycle. Vertices are coordinate sets packed into a `u64`
//! (bit `l - 1` set means coordinate `l` is one), so `d` is capped at 64.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported hypercube dimension (one bit per coordinate in a `u64`).
pub const MAX_DIMENSION: usize = 64;

/// A coordinate label in `1..=d`.
pub type Label = u8;

/// Dimension and spread of a circuit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodeParams {
    pub d: usize,
    pub k: usize,
}

impl CodeParams {
    pub fn new(d: usize, k: usize) -> Result<Self> {
        if !(2..=MAX_DIMENSION).contains(&d) {
            return Err(Error::InvalidParams(format!(
                "dimension must lie in 2..={MAX_DIMENSION}, got {d}"
            )));
        }
        if k < 1 {
            return Err(Error::InvalidParams("spread must be at least 1".into()));
        }
        Ok(Self { d, k })
    }
}

impl fmt::Display for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(d={}, k={})", self.d, self.k)
    }
}

/// A set of hypercube coordinates, doubling as a vertex of `I(d)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex(pub u64);

impl Vertex {
    pub const ORIGIN: Vertex = Vertex(0);

    #[inline]
    pub fn toggled(self, label: Label) -> Vertex {
        Vertex(self.0 ^ label_bit(label))
    }

    pub fn contains(self, label: Label) -> bool {
        self.0 & label_bit(label) != 0
    }

    pub fn weight(self) -> u32 {
        self.0.count_ones()
    }

    /// Coordinates in ascending order.
    pub fn coords(self) -> impl Iterator<Item = Label> {
        let bits = self.0;
        (1..=MAX_DIMENSION as u8).filter(move |&l| bits & label_bit(l) != 0)
    }

    pub fn from_coords(coords: &[Label]) -> Vertex {
        coords
            .iter()
            .fold(Vertex::ORIGIN, |v, &l| Vertex(v.0 | label_bit(l)))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, l) in self.coords().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("}")
    }
}

#[inline]
pub(crate) fn label_bit(label: Label) -> u64 {
    debug_assert!((1..=MAX_DIMENSION as u8).contains(&label));
    1u64 << (label - 1)
}

/// Cyclic word over the labels `1..=d`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TransitionSequence {
    elems: Vec<Label>,
}

impl TransitionSequence {
    /// Builds a sequence, rejecting labels outside `1..=64`.
    pub fn new(elems: Vec<Label>) -> Result<Self> {
        if let Some((i, &l)) = elems
            .iter()
            .enumerate()
            .find(|(_, &l)| l == 0 || l as usize > MAX_DIMENSION)
        {
            return Err(Error::LabelOutOfRange {
                position: i + 1,
                label: l as i64,
                d: MAX_DIMENSION,
            });
        }
        Ok(Self { elems })
    }

    pub(crate) fn from_vec_unchecked(elems: Vec<Label>) -> Self {
        Self { elems }
    }

    /// Parses the plain-text syntax `"l1,l2,..."`, checking every label
    /// against `1..=d`. Whitespace around tokens is ignored; an empty
    /// string is the empty sequence.
    pub fn parse(text: &str, d: usize) -> Result<Self> {
        let seq: TransitionSequence = text.parse()?;
        seq.validate(d)?;
        Ok(seq)
    }

    /// Checks every label against `1..=d`.
    pub fn validate(&self, d: usize) -> Result<()> {
        match self
            .elems
            .iter()
            .enumerate()
            .find(|(_, &l)| l == 0 || l as usize > d)
        {
            Some((i, &l)) => Err(Error::LabelOutOfRange {
                position: i + 1,
                label: l as i64,
                d,
            }),
            None => Ok(()),
        }
    }

    pub fn as_slice(&self) -> &[Label] {
        &self.elems
    }

    pub fn into_vec(self) -> Vec<Label> {
        self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// Largest label used, or 0 for the empty word.
    pub fn max_label(&self) -> Label {
        self.elems.iter().copied().max().unwrap_or(0)
    }

    /// Label at 1-based cyclic position `i` (any `i >= 1`).
    pub fn at(&self, i: usize) -> Label {
        self.elems[(i - 1) % self.elems.len()]
    }

    /// Left rotation: the result starts at 0-based offset `shift`.
    pub fn rotated(&self, shift: usize) -> TransitionSequence {
        if self.elems.is_empty() {
            return self.clone();
        }
        let mut elems = self.elems.clone();
        elems.rotate_left(shift % self.elems.len());
        Self { elems }
    }

    pub fn reversed(&self) -> TransitionSequence {
        let mut elems = self.elems.clone();
        elems.reverse();
        Self { elems }
    }

    /// Applies `map` to every label (`map[l - 1]` is the image of `l`).
    pub fn relabeled(&self, map: &[Label]) -> TransitionSequence {
        Self {
            elems: self.elems.iter().map(|&l| map[l as usize - 1]).collect(),
        }
    }

    /// The word followed by itself.
    pub fn doubled(&self) -> TransitionSequence {
        let mut elems = Vec::with_capacity(2 * self.elems.len());
        elems.extend_from_slice(&self.elems);
        elems.extend_from_slice(&self.elems);
        Self { elems }
    }

    /// Labels of a cyclic segment.
    pub fn segment_labels(&self, seg: Segment) -> Vec<Label> {
        (0..seg.len).map(|o| self.at(seg.start + o)).collect()
    }

    /// Vertices `x_1 = origin, x_{i+1} = x_i xor tau_i` for `i = 0..=N`,
    /// including the endpoint. Unlike [`expand_vertices`] this never drops
    /// the closing vertex.
    pub fn prefix_vertices(&self) -> Vec<Vertex> {
        let mut out = Vec::with_capacity(self.elems.len() + 1);
        let mut v = Vertex::ORIGIN;
        out.push(v);
        for &l in &self.elems {
            v = v.toggled(l);
            out.push(v);
        }
        out
    }
}

impl From<TransitionSequence> for Vec<Label> {
    fn from(seq: TransitionSequence) -> Self {
        seq.elems
    }
}

impl FromStr for TransitionSequence {
    type Err = Error;

    /// Parses `"l1,l2,..."` with labels in `1..=64`.
    fn from_str(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Ok(Self::default());
        }
        let mut elems = Vec::new();
        for (i, token) in trimmed.split(',').enumerate() {
            let token = token.trim();
            let value: i64 = token.parse().map_err(|_| Error::Parse {
                position: i + 1,
                token: token.to_string(),
            })?;
            if value < 1 || value > MAX_DIMENSION as i64 {
                return Err(Error::LabelOutOfRange {
                    position: i + 1,
                    label: value,
                    d: MAX_DIMENSION,
                });
            }
            elems.push(value as Label);
        }
        Ok(Self { elems })
    }
}

impl fmt::Display for TransitionSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.elems.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Cyclically consecutive run of `len` transitions starting at the 1-based
/// position `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub len: usize,
}

impl Segment {
    pub fn new(start: usize, len: usize) -> Self {
        Self { start, len }
    }

    /// The segment covering the rest of a cycle of length `n`.
    pub fn complement(self, n: usize) -> Segment {
        let start = (self.start - 1 + self.len) % n + 1;
        Segment {
            start,
            len: n - self.len,
        }
    }
}

/// Labels of odd multiplicity in a run of transitions.
///
/// The set is also the vertex reached from the origin after the run, and its
/// size is the Hamming distance spanned by the run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParitySet {
    bits: u64,
    odd: u32,
    consumed: usize,
}

impl ParitySet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Consumes one transition and returns the new odd count.
    #[inline]
    pub fn push(&mut self, label: Label) -> u32 {
        let bit = label_bit(label);
        let before = self.odd;
        self.bits ^= bit;
        if self.bits & bit != 0 {
            self.odd += 1;
        } else {
            self.odd -= 1;
        }
        self.consumed += 1;
        // a single transition always moves the count by exactly one
        debug_assert_eq!(before.abs_diff(self.odd), 1);
        debug_assert_eq!(self.odd as usize % 2, self.consumed % 2);
        self.odd
    }

    pub fn odd_count(&self) -> u32 {
        self.odd
    }

    pub fn consumed(&self) -> usize {
        self.consumed
    }

    pub fn vertex(&self) -> Vertex {
        Vertex(self.bits)
    }
}

/// Vertices visited by a transition word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexWalk {
    pub vertices: Vec<Vertex>,
}

impl VertexWalk {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Whether all listed vertices are pairwise distinct.
    pub fn all_distinct(&self) -> bool {
        let mut sorted = self.vertices.clone();
        sorted.sort_unstable();
        sorted.windows(2).all(|w| w[0] != w[1])
    }
}

/// Walks the word from the origin.
///
/// For a non-empty closed word the walk has `N` vertices `x_1..x_N` (the
/// return to `x_1` is implicit); otherwise the endpoint is kept and the walk
/// has `N + 1` vertices.
pub fn expand_vertices(seq: &TransitionSequence, d: usize) -> Result<VertexWalk> {
    seq.validate(d)?;
    let mut vertices = seq.prefix_vertices();
    if !seq.is_empty() && *vertices.last().unwrap() == Vertex::ORIGIN {
        vertices.pop();
    }
    Ok(VertexWalk { vertices })
}

/// True iff every label occurs an even number of times.
pub fn is_closed(seq: &TransitionSequence) -> bool {
    let mut parity = ParitySet::new();
    for &l in seq.as_slice() {
        parity.push(l);
    }
    parity.odd_count() == 0
}

/// Number of labels with odd multiplicity in the segment.
pub fn delta(seq: &TransitionSequence, seg: Segment) -> u32 {
    let mut parity = ParitySet::new();
    for o in 0..seg.len {
        parity.push(seq.at(seg.start + o));
    }
    parity.odd_count()
}

/// Distance between positions `i` and `j` along a cycle of length `n`.
pub fn cyclic_code_distance(i: usize, j: usize, n: usize) -> usize {
    let diff = i.abs_diff(j);
    diff.min(n - diff)
}

pub fn hamming_distance(u: Vertex, v: Vertex) -> u32 {
    (u.0 ^ v.0).count_ones()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(labels: &[Label]) -> TransitionSequence {
        TransitionSequence::new(labels.to_vec()).unwrap()
    }

    fn set(coords: &[Label]) -> Vertex {
        Vertex::from_coords(coords)
    }

    /// Counts odd-multiplicity labels directly.
    fn delta_recount(labels: &[Label]) -> u32 {
        let mut counts = [0u32; 65];
        for &l in labels {
            counts[l as usize] += 1;
        }
        counts.iter().filter(|&&c| c % 2 == 1).count() as u32
    }

    #[test]
    fn expand_small_cycles() {
        let walk = expand_vertices(&seq(&[1, 2, 1, 2]), 2).unwrap();
        assert_eq!(
            walk.vertices,
            vec![set(&[]), set(&[1]), set(&[1, 2]), set(&[2])]
        );

        let walk = expand_vertices(&seq(&[]), 2).unwrap();
        assert_eq!(walk.vertices, vec![Vertex::ORIGIN]);

        let walk = expand_vertices(&seq(&[1, 2, 3, 1, 2, 3]), 3).unwrap();
        assert_eq!(
            walk.vertices,
            vec![
                set(&[]),
                set(&[1]),
                set(&[1, 2]),
                set(&[1, 2, 3]),
                set(&[2, 3]),
                set(&[3])
            ]
        );
    }

    #[test]
    fn expand_rejects_labels_beyond_dimension() {
        let err = expand_vertices(&seq(&[1, 4]), 3).unwrap_err();
        assert!(matches!(
            err,
            Error::LabelOutOfRange {
                position: 2,
                label: 4,
                d: 3
            }
        ));
    }

    #[test]
    fn open_walk_keeps_endpoint() {
        let walk = expand_vertices(&seq(&[1, 2, 3]), 3).unwrap();
        assert_eq!(walk.len(), 4);
        assert_eq!(walk.vertices[3], set(&[1, 2, 3]));
    }

    #[test]
    fn closedness() {
        assert!(is_closed(&seq(&[1, 2, 1, 2])));
        assert!(!is_closed(&seq(&[1, 2, 3])));
        assert!(is_closed(&seq(&[1, 2, 3, 1, 2, 3])));
        assert!(is_closed(&seq(&[])));
    }

    #[test]
    fn delta_examples() {
        let t = seq(&[1, 2, 1]);
        assert_eq!(delta(&t, Segment::new(1, 3)), 1);
        assert_eq!(delta(&t, Segment::new(1, 0)), 0);
        let t = seq(&[3, 1, 4, 1, 5]);
        assert_eq!(delta(&t, Segment::new(1, 5)), 3);
    }

    #[test]
    fn delta_wraps_cyclically() {
        let t = seq(&[1, 2, 3, 1, 2, 3]);
        // (3,1,2,3) starting at position 6 -> (3,1,2,3)
        assert_eq!(delta(&t, Segment::new(6, 4)), 2);
        assert_eq!(t.segment_labels(Segment::new(5, 3)), vec![2, 3, 1]);
    }

    #[test]
    fn code_distance_examples() {
        assert_eq!(cyclic_code_distance(1, 4, 8), 3);
        assert_eq!(cyclic_code_distance(1, 1, 8), 0);
        assert_eq!(cyclic_code_distance(2, 8, 8), 2);
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming_distance(set(&[1]), set(&[1])), 0);
        assert_eq!(hamming_distance(set(&[]), set(&[1, 2, 3])), 3);
        assert_eq!(hamming_distance(set(&[1, 2]), set(&[2, 3])), 2);
    }

    #[test]
    fn parse_and_display() {
        let t: TransitionSequence = " 1, 2 ,1,2".parse().unwrap();
        assert_eq!(t.as_slice(), &[1, 2, 1, 2]);
        assert_eq!(t.to_string(), "1,2,1,2");
        assert_eq!("".parse::<TransitionSequence>().unwrap().len(), 0);
    }

    #[test]
    fn parse_rejections_carry_position() {
        assert!(matches!(
            TransitionSequence::parse("1,0,2", 3),
            Err(Error::LabelOutOfRange {
                position: 2,
                label: 0,
                ..
            })
        ));
        assert!(matches!(
            TransitionSequence::parse("1,2,-1", 3),
            Err(Error::LabelOutOfRange {
                position: 3,
                label: -1,
                ..
            })
        ));
        assert!(matches!(
            TransitionSequence::parse("1,2,4", 3),
            Err(Error::LabelOutOfRange {
                position: 3,
                label: 4,
                d: 3
            })
        ));
        assert!(matches!(
            TransitionSequence::parse("1,x", 3),
            Err(Error::Parse { position: 2, .. })
        ));
        assert!(matches!(
            TransitionSequence::parse("1,,2", 3),
            Err(Error::Parse { position: 2, .. })
        ));
    }

    #[test]
    fn params_validation() {
        assert!(CodeParams::new(1, 1).is_err());
        assert!(CodeParams::new(65, 1).is_err());
        assert!(CodeParams::new(4, 0).is_err());
        assert!(CodeParams::new(64, 9).is_ok());
    }

    /// All words of length `n` over `1..=d`.
    fn all_words(d: u8, n: usize) -> Vec<Vec<Label>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (1..=d).map(move |l| {
                        let mut w = w.clone();
                        w.push(l);
                        w
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn walk_delta_identity_exhaustive() {
        for d in 1..=4u8 {
            for n in 0..=10usize {
                if (d as usize).pow(n as u32) > 300_000 {
                    continue;
                }
                for w in all_words(d, n) {
                    let t = TransitionSequence::from_vec_unchecked(w);
                    let path = t.prefix_vertices();
                    for i in 0..=n {
                        for j in i + 1..=n {
                            let seg = Segment::new(i + 1, j - i);
                            let by_delta = delta(&t, seg);
                            assert_eq!(hamming_distance(path[i], path[j]), by_delta);
                            assert_eq!(by_delta, delta_recount(&t.segment_labels(seg)));
                        }
                    }
                    let walk = expand_vertices(&t, d as usize).unwrap();
                    let returns = *path.last().unwrap() == Vertex::ORIGIN;
                    assert_eq!(is_closed(&t), returns);
                    assert_eq!(walk.len() == n || n == 0, returns);
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn word() -> impl Strategy<Value = Vec<Label>> {
            (1u8..=8).prop_flat_map(|d| prop::collection::vec(1..=d, 0..24))
        }

        proptest! {
            #[test]
            fn delta_parity_matches_length(w in word(), start in 1usize..50, len in 0usize..24) {
                let t = TransitionSequence::from_vec_unchecked(w);
                prop_assume!(!t.is_empty());
                let seg = Segment::new(start, len);
                prop_assert_eq!(delta(&t, seg) as usize % 2, len % 2);
            }

            #[test]
            fn incremental_delta_steps_by_one(w in word()) {
                let mut parity = ParitySet::new();
                let mut prev = 0u32;
                for (i, &l) in w.iter().enumerate() {
                    let next = parity.push(l);
                    prop_assert_eq!(prev.abs_diff(next), 1);
                    prop_assert_eq!(next, delta_recount(&w[..=i]));
                    prev = next;
                }
            }

            #[test]
            fn closed_words_have_complement_symmetric_delta(
                half in word(), start in 1usize..50, len in 0usize..48
            ) {
                // a word followed by a rearrangement of itself is closed
                let mut w = half.clone();
                w.extend(half.iter().rev());
                let t = TransitionSequence::from_vec_unchecked(w);
                prop_assume!(!t.is_empty());
                prop_assert!(is_closed(&t));
                let n = t.len();
                let start = (start - 1) % n + 1;
                let seg = Segment::new(start, len % (n + 1));
                prop_assert_eq!(delta(&t, seg), delta(&t, seg.complement(n)));
            }

            #[test]
            fn parse_display_round_trip(w in prop::collection::vec(1u8..=64, 0..40)) {
                let t = TransitionSequence::new(w).unwrap();
                let back = TransitionSequence::parse(&t.to_string(), 64).unwrap();
                prop_assert_eq!(back, t);
            }
        }
    }
}
