//! Published closed-form values, loaded from `data/known_values.toml`.

use serde::Deserialize;

use circuit_codes::SearchMode;

const TABLE: &str = include_str!("../data/known_values.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
    Any,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Entry {
    pub name: String,
    pub mode: SearchMode,
    pub k_parity: Parity,
    pub k_min: i64,
    #[serde(default)]
    pub l_min: Option<i64>,
    #[serde(default)]
    pub l_opposite_parity: bool,
    #[serde(default)]
    pub k_min_odd: Option<[i64; 2]>,
    #[serde(default)]
    pub k_min_even: Option<[i64; 2]>,
    pub d_k: i64,
    #[serde(default)]
    pub d_l: i64,
    pub d_c: i64,
    pub v_k: i64,
    #[serde(default)]
    pub v_l: i64,
    pub v_c: i64,
    #[serde(default)]
    pub unique: bool,
    #[serde(default)]
    pub unique_for_l: Vec<i64>,
}

#[derive(Debug, Deserialize)]
struct TableFile {
    entry: Vec<Entry>,
}

/// An entry whose range covers the queried parameters.
#[derive(Debug, Clone)]
pub struct Claim<'a> {
    pub entry: &'a Entry,
    pub value: usize,
    pub unique: bool,
}

#[derive(Debug, Clone)]
pub struct KnownValues {
    entries: Vec<Entry>,
}

impl KnownValues {
    pub fn load() -> Self {
        let file: TableFile = toml::from_str(TABLE).expect("bundled known-values table parses");
        Self {
            entries: file.entry,
        }
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// Entries whose stated preconditions cover `(d, k, mode, l)`.
    pub fn lookup(&self, d: usize, k: usize, mode: SearchMode, l: Option<usize>) -> Vec<Claim<'_>> {
        self.entries
            .iter()
            .filter_map(|e| e.claim(d as i64, k as i64, mode, l.map(|l| l as i64)))
            .collect()
    }
}

impl Entry {
    fn claim(&self, d: i64, k: i64, mode: SearchMode, l: Option<i64>) -> Option<Claim<'_>> {
        if self.mode != mode || k < self.k_min {
            return None;
        }
        let k_odd = k % 2 == 1;
        match self.k_parity {
            Parity::Odd if !k_odd => return None,
            Parity::Even if k_odd => return None,
            _ => {}
        }
        let l = if mode == SearchMode::Family {
            let l = l?;
            if l < self.l_min.unwrap_or(2) {
                return None;
            }
            if self.l_opposite_parity && (l % 2 == 1) == k_odd {
                return None;
            }
            let bound = if k_odd {
                self.k_min_odd
            } else {
                self.k_min_even
            };
            if let Some([a, b]) = bound {
                if k < a * l + b {
                    return None;
                }
            }
            l
        } else {
            0
        };
        if 2 * d != self.d_k * k + self.d_l * l + self.d_c {
            return None;
        }
        let value = self.v_k * k + self.v_l * l + self.v_c;
        Some(Claim {
            entry: self,
            value: value as usize,
            unique: self.unique || self.unique_for_l.contains(&l),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(d: usize, k: usize, mode: SearchMode, l: Option<usize>) -> Vec<usize> {
        KnownValues::load()
            .lookup(d, k, mode, l)
            .iter()
            .map(|c| c.value)
            .collect()
    }

    #[test]
    fn general_entries() {
        assert_eq!(values(3, 1, SearchMode::General, None), vec![8]);
        assert_eq!(values(5, 2, SearchMode::General, None), vec![14]);
        assert_eq!(values(6, 3, SearchMode::General, None), vec![16]);
        assert_eq!(values(9, 5, SearchMode::General, None), vec![24]);
        assert_eq!(values(16, 9, SearchMode::General, None), vec![44]);
        // (3k+5)/2 only from k = 9 on
        assert!(values(10, 5, SearchMode::General, None).is_empty());
        assert!(values(7, 3, SearchMode::General, None).is_empty());
    }

    #[test]
    fn symmetric_entries() {
        assert_eq!(values(8, 4, SearchMode::Symmetric, None), vec![22]);
        assert!(values(5, 2, SearchMode::Symmetric, None).is_empty());
        let table = KnownValues::load();
        assert!(table.lookup(8, 4, SearchMode::Symmetric, None)[0].unique);
    }

    #[test]
    fn family_side_conditions() {
        assert_eq!(values(8, 4, SearchMode::Family, Some(3)), vec![22]);
        assert_eq!(values(9, 5, SearchMode::Family, Some(2)), vec![24]);
        // same parity
        assert!(values(8, 4, SearchMode::Family, Some(2)).is_empty());
        // k = 5 odd needs k >= 2l + 1, fails for l = 4
        assert!(values(10, 5, SearchMode::Family, Some(4)).is_empty());
        // k = 4 even allows l = 3 (4 >= 4) but not l = 5 (4 < 8)
        assert!(values(9, 4, SearchMode::Family, Some(5)).is_empty());
        assert!(values(8, 4, SearchMode::Family, None).is_empty());
        let table = KnownValues::load();
        assert!(table.lookup(8, 4, SearchMode::Family, Some(3))[0].unique);
        assert!(!table.lookup(18, 10, SearchMode::Family, Some(5))[0].unique);
    }
}
