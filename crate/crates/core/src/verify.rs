//! Circuit-code verification, bit-run analysis, and audits of the structural
//! facts every valid code must satisfy.
//!
//! A cycle in `I(d)` with transition word `T` is a `(d, k)` circuit code when
//! every pair of cycle vertices `x_i, x_j` satisfies
//! `hamming(x_i, x_j) >= min(cyclic_distance(i, j), k)`. The Hamming distance
//! between two cycle vertices equals `delta` of either segment joining them,
//! which is what [`check_spread`] scans; [`brute_force_check`] is the
//! independent pairwise-vertex oracle.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{
    cyclic_code_distance, expand_vertices, hamming_distance, is_closed, CodeParams, Label,
    ParitySet, Segment, TransitionSequence,
};

/// Witness pair violating the spread requirement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolationReport {
    /// 1-based vertex indices, `i < j`.
    pub i: usize,
    pub j: usize,
    pub code_dist: usize,
    pub cube_dist: usize,
    pub required: usize,
    /// The shorter of the two segments joining `x_i` and `x_j`.
    pub segment: Segment,
    pub segment_labels: TransitionSequence,
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "violation i={} j={} code_dist={} cube_dist={} required={} segment={}",
            self.i, self.j, self.code_dist, self.cube_dist, self.required, self.segment_labels
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpreadVerdict {
    Valid,
    Violation(ViolationReport),
}

impl SpreadVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, SpreadVerdict::Valid)
    }

    pub fn violation(&self) -> Option<&ViolationReport> {
        match self {
            SpreadVerdict::Valid => None,
            SpreadVerdict::Violation(v) => Some(v),
        }
    }
}

fn check_structure(seq: &TransitionSequence, params: CodeParams) -> Result<()> {
    seq.validate(params.d)?;
    if seq.len() < 4 {
        return Err(Error::TooShort { len: seq.len() });
    }
    if !is_closed(seq) {
        return Err(Error::NotClosed);
    }
    Ok(())
}

fn make_report(
    seq: &TransitionSequence,
    i: usize,
    j: usize,
    cube_dist: usize,
    k: usize,
) -> ViolationReport {
    let n = seq.len();
    let gap = j - i;
    let code_dist = cyclic_code_distance(i, j, n);
    let segment = if gap <= n / 2 {
        Segment::new(i, gap)
    } else {
        Segment::new(j, n - gap)
    };
    ViolationReport {
        i,
        j,
        code_dist,
        cube_dist,
        required: code_dist.min(k),
        segment,
        segment_labels: TransitionSequence::from_vec_unchecked(seq.segment_labels(segment)),
    }
}

/// Decides whether `seq` is a `(d, k)` circuit code.
///
/// Only segments of length at most `N/2` are evaluated: the longer segment
/// joining two vertices has the same `delta` as its complement. Repeated
/// vertices surface as violations with `cube_dist = 0`. The reported
/// violation is the first in lexicographic `(i, j)` order.
pub fn check_spread(seq: &TransitionSequence, params: CodeParams) -> Result<SpreadVerdict> {
    check_structure(seq, params)?;
    let n = seq.len();
    let half = n / 2;
    // short[(s - 1) * (half + 1) + len] = delta of the segment (s, len)
    let stride = half + 1;
    let mut short = vec![0u8; n * stride];
    for s in 1..=n {
        let mut parity = ParitySet::new();
        for len in 1..=half {
            short[(s - 1) * stride + len] = parity.push(seq.at(s + len - 1)) as u8;
        }
    }
    for i in 1..=n {
        for j in i + 1..=n {
            let gap = j - i;
            let cube = if gap <= half {
                short[(i - 1) * stride + gap]
            } else {
                short[(j - 1) * stride + (n - gap)]
            } as usize;
            let required = cyclic_code_distance(i, j, n).min(params.k);
            if cube < required {
                return Ok(SpreadVerdict::Violation(make_report(
                    seq, i, j, cube, params.k,
                )));
            }
        }
    }
    Ok(SpreadVerdict::Valid)
}

/// Pairwise-vertex oracle for [`check_spread`]: expands the walk and compares
/// Hamming distances of all vertex pairs directly.
pub fn brute_force_check(seq: &TransitionSequence, params: CodeParams) -> Result<SpreadVerdict> {
    check_structure(seq, params)?;
    let n = seq.len();
    let walk = expand_vertices(seq, params.d)?;
    debug_assert_eq!(walk.len(), n);
    for i in 0..n {
        for j in i + 1..n {
            let cube = hamming_distance(walk.vertices[i], walk.vertices[j]) as usize;
            let code = cyclic_code_distance(i, j, n);
            if cube < code.min(params.k) {
                return Ok(SpreadVerdict::Violation(make_report(
                    seq,
                    i + 1,
                    j + 1,
                    cube,
                    params.k,
                )));
            }
        }
    }
    Ok(SpreadVerdict::Valid)
}

/// `tau_i = tau_{N/2 + i}` for every `i`; odd lengths are never symmetric.
pub fn is_symmetric(seq: &TransitionSequence) -> bool {
    let n = seq.len();
    if n % 2 == 1 {
        return false;
    }
    let (a, b) = seq.as_slice().split_at(n / 2);
    a == b
}

/// Maximal bit runs (segments with pairwise distinct labels) of a cyclic word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitRunReport {
    pub runs: Vec<Segment>,
    pub longest: usize,
    /// Start positions of the runs achieving `longest`.
    pub longest_starts: Vec<usize>,
}

/// Finds every maximal bit run under cyclic reading.
///
/// When the whole word is distinct a single run starting at position 1 is
/// reported.
pub fn bit_runs(seq: &TransitionSequence) -> BitRunReport {
    let n = seq.len();
    if n == 0 {
        return BitRunReport {
            runs: vec![],
            longest: 0,
            longest_starts: vec![],
        };
    }
    // reach[s] = length of the longest bit run starting at 0-based s, capped at n
    let reach: Vec<usize> = (0..n)
        .map(|s| {
            let mut seen = 0u64;
            let mut len = 0;
            while len < n {
                let bit = 1u64 << (seq.at(s + len + 1) - 1);
                if seen & bit != 0 {
                    break;
                }
                seen |= bit;
                len += 1;
            }
            len
        })
        .collect();

    let runs: Vec<Segment> = if reach[0] == n {
        vec![Segment::new(1, n)]
    } else {
        (0..n)
            .filter(|&s| reach[(s + n - 1) % n] <= reach[s])
            .map(|s| Segment::new(s + 1, reach[s]))
            .collect()
    };
    let longest = runs.iter().map(|r| r.len).max().unwrap_or(0);
    let longest_starts = runs
        .iter()
        .filter(|r| r.len == longest)
        .map(|r| r.start)
        .collect();
    BitRunReport {
        runs,
        longest,
        longest_starts,
    }
}

fn require_valid(seq: &TransitionSequence, params: CodeParams) -> Result<()> {
    match check_spread(seq, params)? {
        SpreadVerdict::Valid => Ok(()),
        SpreadVerdict::Violation(v) => Err(Error::NotACode(v.to_string())),
    }
}

/// Membership in the family of `(d, k)` codes containing a bit run of
/// length at least `k + l`.
pub fn in_family(seq: &TransitionSequence, params: CodeParams, l: usize) -> Result<bool> {
    if l < 2 {
        return Err(Error::InvalidParams(format!(
            "family parameter l must be >= 2, got {l}"
        )));
    }
    require_valid(seq, params)?;
    Ok(bit_runs(seq).longest >= params.k + l)
}

fn all_distinct(labels: impl Iterator<Item = Label>) -> bool {
    let mut seen = 0u64;
    for l in labels {
        let bit = 1u64 << (l - 1);
        if seen & bit != 0 {
            return false;
        }
        seen |= bit;
    }
    true
}

/// Checks that every segment of length `k + 3` begins or ends with a bit
/// run of length `k + 2`. Applies to codes longer than `2(k + 1)`.
///
/// Returns the offending segments; on a valid code the list is empty.
pub fn check_singleton_property(
    seq: &TransitionSequence,
    params: CodeParams,
) -> Result<Vec<Segment>> {
    check_structure(seq, params)?;
    let n = seq.len();
    let k = params.k;
    if n <= 2 * (k + 1) {
        return Err(Error::Inapplicable(format!(
            "length {n} does not exceed 2(k+1) = {}",
            2 * (k + 1)
        )));
    }
    let window = k + 3;
    Ok((1..=n)
        .filter(|&s| {
            let head = all_distinct((0..window - 1).map(|o| seq.at(s + o)));
            let tail = all_distinct((1..window).map(|o| seq.at(s + o)));
            !(head || tail)
        })
        .map(|s| Segment::new(s, window))
        .collect())
}

/// Which `delta` bound a segment broke.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaRule {
    /// Segments of length at most `k + 1` must have `delta = |segment|`.
    ShortSegmentDistinct,
    /// Segments with `k <= |segment| <= N - k` must have `delta >= k`.
    MidSegmentReachesSpread,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaFinding {
    pub segment: Segment,
    pub labels: TransitionSequence,
    pub delta: u32,
    pub rule: DeltaRule,
}

impl fmt::Display for DeltaFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bound = match self.rule {
            DeltaRule::ShortSegmentDistinct => format!("expected {}", self.segment.len),
            DeltaRule::MidSegmentReachesSpread => "expected at least k".to_string(),
        };
        write!(
            f,
            "segment start={} len={} ({}) has delta={} ({bound})",
            self.segment.start, self.segment.len, self.labels, self.delta
        )
    }
}

/// Audits the `delta` bounds that hold on every code with `N > 2k`.
///
/// Segments are visited by start position, then by length; the list of
/// breaches is empty on a valid code.
pub fn audit_delta_inequalities(
    seq: &TransitionSequence,
    params: CodeParams,
) -> Result<Vec<DeltaFinding>> {
    check_structure(seq, params)?;
    let n = seq.len();
    let k = params.k;
    if n <= 2 * k {
        return Err(Error::Inapplicable(format!(
            "length {n} does not exceed 2k = {}",
            2 * k
        )));
    }
    let mut findings = Vec::new();
    for s in 1..=n {
        let mut parity = ParitySet::new();
        for len in 1..=n {
            let delta = parity.push(seq.at(s + len - 1));
            let rule = if len <= k + 1 && delta as usize != len {
                Some(DeltaRule::ShortSegmentDistinct)
            } else if (k..=n - k).contains(&len) && (delta as usize) < k {
                Some(DeltaRule::MidSegmentReachesSpread)
            } else {
                None
            };
            if let Some(rule) = rule {
                let segment = Segment::new(s, len);
                findings.push(DeltaFinding {
                    segment,
                    labels: TransitionSequence::from_vec_unchecked(seq.segment_labels(segment)),
                    delta,
                    rule,
                });
            }
        }
    }
    Ok(findings)
}

/// A breach of the ordering constraints on the labels following the
/// leading run in [`BitRunForm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaBreach {
    /// `beta_i <= i`.
    NotAboveIndex { i: usize, beta: Label },
    /// `beta_j` lies in `{j + 3, ..., k + 2}`.
    InRunTail { j: usize, beta: Label },
}

impl fmt::Display for BetaBreach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BetaBreach::NotAboveIndex { i, beta } => write!(f, "beta_{i} = {beta} <= {i}"),
            BetaBreach::InRunTail { j, beta } => {
                write!(f, "beta_{j} = {beta} lies in {{{}..k+2}}", j + 3)
            }
        }
    }
}

/// A symmetric code rewritten as `(1, 2, ..., k+2, x, beta_1..beta_k)`
/// repeated twice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitRunForm {
    pub sequence: TransitionSequence,
    /// 0-based left rotation applied to the input before relabeling.
    pub shift: usize,
    /// `permutation[l - 1]` is the new name of input label `l`.
    pub permutation: Vec<Label>,
    pub x: Label,
    pub betas: Vec<Label>,
    pub breaches: Vec<BetaBreach>,
}

impl BitRunForm {
    pub fn run(&self) -> &[Label] {
        &self.sequence.as_slice()[..self.betas.len() + 2]
    }
}

/// Rotates and relabels a maximum-length symmetric code with even spread
/// `k` in dimension `(3k + 4)/2` so that it opens with the run `1..=k+2`.
///
/// Among all length-`k+2` bit runs the one giving the lexicographically
/// smallest result is used. The labels after the run are checked against
/// `beta_i > i` (`i = 1..k`) and `beta_j` not in `{j+3..k+2}`
/// (`j = 1..k-1`); breaches are listed in the result.
pub fn normalize_to_bitrun_form(
    seq: &TransitionSequence,
    params: CodeParams,
) -> Result<BitRunForm> {
    let CodeParams { d, k } = params;
    if k % 2 != 0 || 2 * d != 3 * k + 4 {
        return Err(Error::Inapplicable(format!(
            "requires even k and d = (3k+4)/2, got {params}"
        )));
    }
    seq.validate(d)?;
    let n = seq.len();
    if n != 4 * k + 6 {
        return Err(Error::Inapplicable(format!(
            "requires length 4k+6 = {}, got {n}",
            4 * k + 6
        )));
    }
    if !is_symmetric(seq) {
        return Err(Error::Inapplicable("sequence is not symmetric".into()));
    }
    let run_len = k + 2;
    let starts: Vec<usize> = (0..n)
        .filter(|&s| all_distinct((0..run_len).map(|o| seq.at(s + o + 1))))
        .collect();
    if starts.is_empty() {
        return Err(Error::Inapplicable(format!(
            "no bit run of length k+2 = {run_len}"
        )));
    }

    let (shift, permutation, sequence) = starts
        .into_iter()
        .map(|s| {
            let rotated = seq.rotated(s);
            let mut map = vec![0 as Label; d];
            let mut next = 1 as Label;
            for &l in rotated.as_slice() {
                if map[l as usize - 1] == 0 {
                    map[l as usize - 1] = next;
                    next += 1;
                }
            }
            for slot in map.iter_mut().filter(|m| **m == 0) {
                *slot = next;
                next += 1;
            }
            let relabeled = rotated.relabeled(&map);
            (s, map, relabeled)
        })
        .min_by(|a, b| a.2.cmp(&b.2).then(a.0.cmp(&b.0)))
        .expect("at least one run start");

    let w = sequence.as_slice();
    debug_assert!(w[..run_len].iter().copied().eq(1..=run_len as Label));
    let x = w[run_len];
    let betas = w[run_len + 1..run_len + 1 + k].to_vec();

    let mut breaches = Vec::new();
    for (idx, &beta) in betas.iter().enumerate() {
        let i = idx + 1;
        if beta as usize <= i {
            breaches.push(BetaBreach::NotAboveIndex { i, beta });
        }
        if i < k && (i + 3..=k + 2).contains(&(beta as usize)) {
            breaches.push(BetaBreach::InRunTail { j: i, beta });
        }
    }
    Ok(BitRunForm {
        sequence,
        shift,
        permutation,
        x,
        betas,
        breaches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(labels: &[Label]) -> TransitionSequence {
        TransitionSequence::new(labels.to_vec()).unwrap()
    }

    fn params(d: usize, k: usize) -> CodeParams {
        CodeParams::new(d, k).unwrap()
    }

    #[test]
    fn four_cycle_is_valid() {
        let t = seq(&[1, 2, 1, 2]);
        assert!(check_spread(&t, params(2, 1)).unwrap().is_valid());
        assert!(brute_force_check(&t, params(2, 3)).unwrap().is_valid());
        assert!(check_spread(&t, params(2, 3)).unwrap().is_valid());
    }

    #[test]
    fn antipodal_six_cycle_is_valid_at_spread_three() {
        let t = seq(&[1, 2, 3, 1, 2, 3]);
        assert!(brute_force_check(&t, params(3, 3)).unwrap().is_valid());
        assert!(check_spread(&t, params(3, 3)).unwrap().is_valid());
    }

    #[test]
    fn reports_first_violation() {
        let t = seq(&[1, 2, 1, 3, 1, 2, 1, 3]);
        for verdict in [
            check_spread(&t, params(3, 2)).unwrap(),
            brute_force_check(&t, params(3, 2)).unwrap(),
        ] {
            let v = verdict.violation().expect("violation").clone();
            assert_eq!(
                (v.i, v.j, v.code_dist, v.cube_dist, v.required),
                (1, 4, 3, 1, 2)
            );
            assert_eq!(v.segment_labels.as_slice(), &[1, 2, 1]);
            assert_eq!(
                v.to_string(),
                "violation i=1 j=4 code_dist=3 cube_dist=1 required=2 segment=1,2,1"
            );
        }
    }

    #[test]
    fn repeated_vertex_reports_zero_distance() {
        // x_2 = x_4 = {1}, and x_5 is the origin again
        let t = seq(&[1, 2, 2, 1, 3, 4, 3, 4]);
        let v = check_spread(&t, params(4, 1)).unwrap();
        let v = v.violation().unwrap();
        assert_eq!(v.cube_dist, 0);
        assert_eq!((v.i, v.j), (1, 5));
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(
            check_spread(&seq(&[1, 2, 3]), params(3, 1)),
            Err(Error::TooShort { .. })
        ));
        assert!(matches!(
            check_spread(&seq(&[1, 1]), params(3, 1)),
            Err(Error::TooShort { len: 2 })
        ));
        assert!(matches!(
            check_spread(&seq(&[]), params(3, 1)),
            Err(Error::TooShort { len: 0 })
        ));
        assert!(matches!(
            check_spread(&seq(&[1, 2, 3, 1]), params(3, 1)),
            Err(Error::NotClosed)
        ));
        assert!(matches!(
            brute_force_check(&seq(&[1, 2, 3, 1]), params(3, 1)),
            Err(Error::NotClosed)
        ));
        assert!(matches!(
            check_spread(&seq(&[1, 4, 1, 4]), params(3, 1)),
            Err(Error::LabelOutOfRange { .. })
        ));
    }

    #[test]
    fn symmetry() {
        assert!(is_symmetric(&seq(&[1, 2, 1, 2])));
        assert!(!is_symmetric(&seq(&[1, 2, 2, 1])));
        assert!(is_symmetric(&seq(&[1, 2, 3, 1, 2, 3])));
        assert!(!is_symmetric(&seq(&[1, 2, 1])));
        assert!(is_symmetric(&seq(&[])));
    }

    #[test]
    fn bit_run_examples() {
        assert_eq!(bit_runs(&seq(&[1, 2, 1, 2])).longest, 2);
        let r = bit_runs(&seq(&[1, 2, 3, 1]));
        assert_eq!(r.longest, 3);
        assert_eq!(r.runs, vec![Segment::new(1, 3), Segment::new(2, 3)]);
        assert_eq!(r.longest_starts, vec![1, 2]);
        let r = bit_runs(&seq(&[1, 2, 3]));
        assert_eq!(r.runs, vec![Segment::new(1, 3)]);
        assert_eq!(bit_runs(&seq(&[])).longest, 0);
    }

    #[test]
    fn bit_runs_are_maximal() {
        let t = seq(&[1, 2, 3, 1, 4, 2, 3, 4, 1, 2]);
        let n = t.len();
        for run in bit_runs(&t).runs {
            let labels = t.segment_labels(run);
            assert!(all_distinct(labels.iter().copied()));
            let right = t.segment_labels(Segment::new(run.start, run.len + 1));
            let left = t.segment_labels(Segment::new((run.start + n - 2) % n + 1, run.len + 1));
            assert!(!all_distinct(right.into_iter()));
            assert!(!all_distinct(left.into_iter()));
        }
    }

    #[test]
    fn family_membership() {
        let t = seq(&[1, 2, 1, 2]);
        assert!(!in_family(&t, params(2, 1), 2).unwrap());
        assert!(in_family(&t, params(2, 1), 1).is_err());
        let bad = seq(&[1, 2, 1, 3, 1, 2, 1, 3]);
        assert!(matches!(
            in_family(&bad, params(3, 2), 2),
            Err(Error::NotACode(_))
        ));
        // antipodal 6-cycle has a run of length 3 = k + 2 at k = 1
        let t = seq(&[1, 2, 3, 1, 2, 3]);
        assert!(in_family(&t, params(3, 1), 2).unwrap());
        assert!(!in_family(&t, params(3, 1), 3).unwrap());
    }

    #[test]
    fn delta_audit_flags_short_repeat() {
        let t = seq(&[1, 2, 1, 3, 1, 2, 1, 3]);
        let findings = audit_delta_inequalities(&t, params(3, 2)).unwrap();
        let first = &findings[0];
        assert_eq!(first.labels.as_slice(), &[1, 2, 1]);
        assert_eq!(first.delta, 1);
        assert_eq!(first.rule, DeltaRule::ShortSegmentDistinct);
    }

    #[test]
    fn audits_require_long_codes() {
        let t = seq(&[1, 2, 1, 2]);
        assert!(matches!(
            audit_delta_inequalities(&t, params(2, 2)),
            Err(Error::Inapplicable(_))
        ));
        assert!(matches!(
            check_singleton_property(&t, params(2, 1)),
            Err(Error::Inapplicable(_))
        ));
        // 8-cycle in Q3 with k = 1: 8 > 4
        let gray = seq(&[1, 2, 1, 3, 1, 2, 1, 3]);
        assert!(check_singleton_property(&gray, params(3, 1)).is_ok());
    }

    #[test]
    fn singleton_property_detects_bad_window() {
        // windows alternate between (a,b,a,c) and (b,a,c,a)
        let gray = seq(&[1, 2, 1, 3, 1, 2, 1, 3]);
        let bad = check_singleton_property(&gray, params(3, 1)).unwrap();
        assert!(bad.is_empty());
        let t = seq(&[1, 2, 1, 2, 3, 4, 3, 4, 1, 2, 1, 2, 3, 4, 3, 4]);
        let bad = check_singleton_property(&t, params(4, 1)).unwrap();
        assert!(bad.contains(&Segment::new(1, 4)));
    }

    #[test]
    fn bitrun_form_rejects_wrong_shapes() {
        let p = params(8, 4);
        let short = seq(&[1, 2, 1, 2]);
        assert!(matches!(
            normalize_to_bitrun_form(&short, p),
            Err(Error::Inapplicable(_))
        ));
        let mut half: Vec<Label> = (1..=8).chain([1, 2, 3]).collect();
        let mut asym = half.clone();
        half.reverse();
        asym.extend(half);
        let asym = seq(&asym);
        assert_eq!(asym.len(), 22);
        assert!(matches!(
            normalize_to_bitrun_form(&asym, p),
            Err(Error::Inapplicable(_))
        ));
        assert!(matches!(
            normalize_to_bitrun_form(&seq(&[1, 2, 1, 2]), params(7, 4)),
            Err(Error::Inapplicable(_))
        ));
    }
}
