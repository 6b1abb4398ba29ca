#![allow(dead_code)]

use circuit_codes::{Label, TransitionSequence};

/// Every closed word of length `n` over `1..=d`, in lexicographic order.
///
/// Generated by plain enumeration; the only cut is the exact parity test
/// (the remaining steps must be able to clear every odd label).
pub fn closed_words(d: u8, n: usize) -> Vec<Vec<Label>> {
    fn go(d: u8, n: usize, word: &mut Vec<Label>, parity: u64, out: &mut Vec<Vec<Label>>) {
        let left = n - word.len();
        if parity.count_ones() as usize > left {
            return;
        }
        if left == 0 {
            out.push(word.clone());
            return;
        }
        for l in 1..=d {
            word.push(l);
            go(d, n, word, parity ^ (1 << (l - 1)), out);
            word.pop();
        }
    }
    let mut out = Vec::new();
    go(d, n, &mut Vec::with_capacity(n), 0, &mut out);
    out
}

/// Relabels in order of first occurrence.
pub fn first_occurrence(word: &[Label]) -> Vec<Label> {
    let mut map = [0 as Label; 65];
    let mut next = 1;
    word.iter()
        .map(|&l| {
            if map[l as usize] == 0 {
                map[l as usize] = next;
                next += 1;
            }
            map[l as usize]
        })
        .collect()
}

pub fn seq(word: Vec<Label>) -> TransitionSequence {
    TransitionSequence::new(word).unwrap()
}
