//! Canonical forms of transition words under cyclic shift and label
//! permutation (optionally also traversal reversal).
//!
//! Every candidate rotation is relabeled in first-occurrence order (the first
//! label seen becomes 1, the next new label 2, and so on) and the
//! lexicographically smallest result is the canonical word. Candidates are
//! abandoned at the first position where they exceed the current best, which
//! keeps the quadratic scan cheap for the lengths met in practice.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::model::{Label, TransitionSequence, MAX_DIMENSION};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub sequence: TransitionSequence,
    /// Left rotation applied (to the reversed word when `reversed`).
    pub shift: usize,
    /// `permutation[l - 1]` is the canonical name of input label `l`;
    /// 0 for labels that do not occur.
    pub permutation: Vec<Label>,
    pub reversed: bool,
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} shift={} map=", self.sequence, self.shift)?;
        let mut first = true;
        for (i, &to) in self.permutation.iter().enumerate() {
            if to == 0 {
                continue;
            }
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{}->{}", i + 1, to)?;
        }
        if self.reversed {
            f.write_str(" reversed")?;
        }
        Ok(())
    }
}

/// Writes the first-occurrence relabeling of `src` rotated left by `shift`
/// into `out`, stopping early once it is known to compare greater than
/// `best`. Returns the ordering against `best` (`Less` if `best` is empty).
fn relabel_against(src: &[Label], shift: usize, out: &mut Vec<Label>, best: &[Label]) -> Ordering {
    let n = src.len();
    let mut map = [0 as Label; MAX_DIMENSION + 1];
    let mut next = 1 as Label;
    let mut ord = if best.is_empty() {
        Ordering::Less
    } else {
        Ordering::Equal
    };
    out.clear();
    for p in 0..n {
        let l = src[(shift + p) % n] as usize;
        if map[l] == 0 {
            map[l] = next;
            next += 1;
        }
        let c = map[l];
        if ord == Ordering::Equal {
            ord = c.cmp(&best[p]);
            if ord == Ordering::Greater {
                return ord;
            }
        }
        out.push(c);
    }
    ord
}

fn first_occurrence_map(src: &[Label], shift: usize) -> Vec<Label> {
    let n = src.len();
    let max = src.iter().copied().max().unwrap_or(0) as usize;
    let mut map = vec![0 as Label; max];
    let mut next = 1 as Label;
    for p in 0..n {
        let l = src[(shift + p) % n] as usize;
        if map[l - 1] == 0 {
            map[l - 1] = next;
            next += 1;
        }
    }
    map
}

/// Smallest first-occurrence relabeling over all rotations (and reversed
/// rotations when `include_reversal`). Ties go to the smaller shift and the
/// forward orientation.
pub fn canonical_form(seq: &TransitionSequence, include_reversal: bool) -> CanonicalForm {
    let forward = seq.as_slice();
    let backward: Vec<Label> = forward.iter().rev().copied().collect();
    let mut best: Vec<Label> = Vec::new();
    let mut best_at = (false, 0usize);
    let mut scratch = Vec::with_capacity(forward.len());

    let orientations: &[(bool, &[Label])] = if include_reversal {
        &[(false, forward), (true, &backward)]
    } else {
        &[(false, forward)]
    };
    for &(reversed, src) in orientations {
        for shift in 0..src.len() {
            if relabel_against(src, shift, &mut scratch, &best) == Ordering::Less {
                std::mem::swap(&mut best, &mut scratch);
                best_at = (reversed, shift);
            }
        }
    }

    let (reversed, shift) = best_at;
    let src = if reversed { &backward[..] } else { forward };
    CanonicalForm {
        sequence: TransitionSequence::from_vec_unchecked(best),
        shift,
        permutation: first_occurrence_map(src, shift),
        reversed,
    }
}

/// Same length and same canonical word.
pub fn are_isomorphic(
    a: &TransitionSequence,
    b: &TransitionSequence,
    include_reversal: bool,
) -> bool {
    a.len() == b.len()
        && canonical_form(a, include_reversal).sequence
            == canonical_form(b, include_reversal).sequence
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsomorphismClass {
    /// Canonical form of the first member in input order.
    pub representative: CanonicalForm,
    pub count: usize,
}

impl IsomorphismClass {
    pub fn canonical(&self) -> &TransitionSequence {
        &self.representative.sequence
    }
}

/// Partitions `codes` by canonical word. Classes come back sorted by their
/// canonical word and the counts sum to `codes.len()`.
pub fn classify(codes: &[TransitionSequence], include_reversal: bool) -> Vec<IsomorphismClass> {
    let forms: Vec<CanonicalForm> = codes
        .par_iter()
        .map(|c| canonical_form(c, include_reversal))
        .collect();
    let mut classes: BTreeMap<TransitionSequence, IsomorphismClass> = BTreeMap::new();
    for form in forms {
        classes
            .entry(form.sequence.clone())
            .and_modify(|c| c.count += 1)
            .or_insert(IsomorphismClass {
                representative: form,
                count: 1,
            });
    }
    classes.into_values().collect()
}
