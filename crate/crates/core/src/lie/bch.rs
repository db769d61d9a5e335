//! Dynkin's form of the Baker–Campbell–Hausdorff series, tabulated as a
//! linear combination of right-nested brackets in two letters.

use std::collections::BTreeMap;

/// Letter `0` stands for the left factor `x`, letter `1` for `y`.
pub type Word = Vec<u8>;

/// The BCH series truncated at a fixed bracket depth.
#[derive(Debug, Clone, PartialEq)]
pub struct BchTable {
    order: usize,
    terms: Vec<(Word, f64)>,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl BchTable {
    /// All terms of total degree at most `order`.
    pub fn new(order: usize) -> Self {
        let mut acc: BTreeMap<Word, f64> = BTreeMap::new();
        for n in 1..=order {
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            let mut pairs = Vec::with_capacity(n);
            enumerate(n, order, &mut pairs, &mut |pairs| {
                let degree: usize = pairs.iter().map(|(r, s)| r + s).sum();
                let denom: f64 =
                    pairs.iter().map(|&(r, s)| factorial(r) * factorial(s)).product::<f64>() * degree as f64 * n as f64;
                let mut word = Word::with_capacity(degree);
                for &(r, s) in pairs {
                    word.extend(std::iter::repeat_n(0u8, r));
                    word.extend(std::iter::repeat_n(1u8, s));
                }
                let mut coef = sign / denom;
                let m = word.len();
                if m >= 2 {
                    if word[m - 1] == word[m - 2] {
                        return;
                    }
                    // innermost [y, x] = -[x, y]
                    if word[m - 2] == 1 {
                        word.swap(m - 1, m - 2);
                        coef = -coef;
                    }
                }
                *acc.entry(word).or_insert(0.0) += coef;
            });
        }
        let terms = acc.into_iter().filter(|(_, c)| c.abs() > 1e-15).collect();
        Self { order, terms }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> &[(Word, f64)] {
        &self.terms
    }
}

type Visitor<'a> = dyn FnMut(&[(usize, usize)]) + 'a;

/// Visits every sequence of `n` pairs `(r_i, s_i)` with `r_i + s_i > 0` and
/// total degree at most `max_degree`.
fn enumerate(n: usize, max_degree: usize, pairs: &mut Vec<(usize, usize)>, visit: &mut Visitor<'_>) {
    if pairs.len() == n {
        visit(pairs);
        return;
    }
    let used: usize = pairs.iter().map(|(r, s)| r + s).sum();
    let remaining_slots = n - pairs.len() - 1;
    let budget = max_degree.saturating_sub(used + remaining_slots);
    for total in 1..=budget {
        for r in 0..=total {
            pairs.push((r, total - r));
            enumerate(n, max_degree, pairs, visit);
            pairs.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coef(t: &BchTable, w: &[u8]) -> f64 {
        t.terms().iter().find(|(word, _)| word.as_slice() == w).map(|(_, c)| *c).unwrap_or(0.0)
    }

    #[test]
    fn degree_two_is_half_bracket() {
        let t = BchTable::new(2);
        assert_eq!(t.terms().len(), 3);
        assert!((coef(&t, &[0]) - 1.0).abs() < 1e-15);
        assert!((coef(&t, &[1]) - 1.0).abs() < 1e-15);
        assert!((coef(&t, &[0, 1]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn degree_three_matches_textbook() {
        // 1/12 [x,[x,y]] - 1/12 [y,[x,y]]
        let t = BchTable::new(3);
        assert!((coef(&t, &[0, 0, 1]) - 1.0 / 12.0).abs() < 1e-15);
        assert!((coef(&t, &[1, 0, 1]) + 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn degree_four_terms_present() {
        let t = BchTable::new(4);
        let deg4: f64 = t.terms().iter().filter(|(w, _)| w.len() == 4).map(|(_, c)| c.abs()).sum();
        assert!(deg4 > 0.0);
    }
}
