//! Two-level axiom tree behind strategy diversification.
//!
//! The first level holds the proof conditions proposed for a theorem; each
//! leaf is the synthesis of one k-element combination of them. Combinations
//! are consumed in lexicographic order (or a seeded shuffle of it), the
//! cursor never revisits a combination, and leaves are synthesized lazily —
//! the tree hands out combinations and stores the synthesized text, while the
//! model call between the two belongs to the caller. One tree is built per
//! theorem and shared by every diversified attempt on it.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

/// How the combination consumption order is arranged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    Lexicographic,
    Random { seed: u64 },
}

impl Default for Selection {
    fn default() -> Self {
        Selection::Lexicographic
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeParams {
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_m_min")]
    pub m_min: usize,
    #[serde(default = "default_m_max")]
    pub m_max: usize,
    #[serde(default)]
    pub selection: Selection,
}

fn default_k() -> usize {
    2
}
fn default_m_min() -> usize {
    3
}
fn default_m_max() -> usize {
    5
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            k: default_k(),
            m_min: default_m_min(),
            m_max: default_m_max(),
            selection: Selection::default(),
        }
    }
}

/// One synthesized second-level axiom and the first-level indices it came
/// from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leaf {
    pub combination: Vec<usize>,
    pub axiom: String,
}

/// What the caller should do next at a diversified attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeafRequest {
    /// An unvisited combination: synthesize its axiom, then record it with
    /// [`AxiomTree::record_leaf`].
    Fresh { combination: Vec<usize> },
    /// Every combination has been visited; reuse this earlier leaf.
    Reuse { leaf: Leaf },
}

#[derive(Debug)]
pub struct AxiomTree {
    first_level: Vec<String>,
    k: usize,
    order: Vec<Vec<usize>>,
    cursor: usize,
    reuse_cursor: usize,
    leaves: Vec<Leaf>,
    warnings: Vec<String>,
}

impl AxiomTree {
    /// Builds the tree from proposed first-level axioms. More than `m_max`
    /// axioms are truncated; fewer than `m_min` or `k > M` are tolerated
    /// with a recorded warning (`k` is clamped to `M`).
    pub fn new(mut axioms: Vec<String>, params: &TreeParams) -> AxiomTree {
        let mut warnings = Vec::new();
        if axioms.len() > params.m_max {
            warnings.push(format!(
                "model proposed {} first-level axioms; keeping the first {}",
                axioms.len(),
                params.m_max
            ));
            axioms.truncate(params.m_max);
        }
        if axioms.len() < params.m_min {
            warnings.push(format!(
                "only {} first-level axiom(s) proposed (wanted at least {})",
                axioms.len(),
                params.m_min
            ));
        }
        let mut k = params.k;
        if k > axioms.len() {
            warnings.push(format!(
                "combination size {} exceeds the {} available axiom(s); clamping",
                k,
                axioms.len()
            ));
            k = axioms.len();
        }
        // A degenerate tree (no axioms, or k clamped to zero) has no leaves;
        // the mathematical "one empty combination" is useless here.
        let mut order = if axioms.is_empty() || k == 0 {
            Vec::new()
        } else {
            combinations(axioms.len(), k)
        };
        if let Selection::Random { seed } = params.selection {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            order.shuffle(&mut rng);
        }
        AxiomTree {
            first_level: axioms,
            k,
            order,
            cursor: 0,
            reuse_cursor: 0,
            leaves: Vec::new(),
            warnings,
        }
    }

    pub fn first_level(&self) -> &[String] {
        &self.first_level
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn total_combinations(&self) -> usize {
        self.order.len()
    }

    pub fn leaves(&self) -> &[Leaf] {
        &self.leaves
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// The first-level axiom texts selected by `combination`.
    pub fn axioms_for(&self, combination: &[usize]) -> Vec<&str> {
        combination
            .iter()
            .map(|&i| self.first_level[i].as_str())
            .collect()
    }

    /// Advances to the next leaf. Fresh combinations come first, each exactly
    /// once; afterwards synthesized leaves are reused round-robin. `None`
    /// only when the tree is empty (no axioms survived parsing).
    pub fn next(&mut self) -> Option<LeafRequest> {
        if self.cursor < self.order.len() {
            let combination = self.order[self.cursor].clone();
            self.cursor += 1;
            return Some(LeafRequest::Fresh { combination });
        }
        if self.leaves.is_empty() {
            return None;
        }
        let leaf = self.leaves[self.reuse_cursor % self.leaves.len()].clone();
        self.reuse_cursor += 1;
        Some(LeafRequest::Reuse { leaf })
    }

    pub fn record_leaf(&mut self, combination: Vec<usize>, axiom: String) -> &Leaf {
        self.leaves.push(Leaf { combination, axiom });
        self.leaves.last().unwrap()
    }
}

/// All k-element subsets of `0..m` as sorted index vectors, in lexicographic
/// order.
pub fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    if k > m {
        return Vec::new();
    }
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(current.clone());
        // Rightmost index that can still move right.
        let mut i = k;
        while i > 0 {
            i -= 1;
            if current[i] != i + m - k {
                current[i] += 1;
                for j in i + 1..k {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                return out;
            }
        }
    }
}

pub fn binomial(m: u64, k: u64) -> u64 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    let mut result: u128 = 1;
    for i in 1..=k as u128 {
        result = result * (m as u128 - k as u128 + i) / i;
    }
    result as u64
}

/// Parses a model reply expected to be a numbered list of axioms. Accepts
/// `1.`, `1)`, and `-` item markers; when no marked item exists, every
/// non-empty line counts as one item.
pub fn parse_numbered_list(text: &str) -> Vec<String> {
    fn strip_marker(line: &str) -> Option<&str> {
        let line = line.trim_start();
        if let Some(rest) = line.strip_prefix('-') {
            return Some(rest.trim_start());
        }
        let digits = line.chars().take_while(|c| c.is_ascii_digit()).count();
        if digits == 0 {
            return None;
        }
        let rest = &line[digits..];
        rest.strip_prefix('.')
            .or_else(|| rest.strip_prefix(')'))
            .map(str::trim_start)
    }

    let marked: Vec<String> = text
        .lines()
        .filter_map(strip_marker)
        .filter(|item| !item.is_empty())
        .map(str::to_string)
        .collect();
    if !marked.is_empty() {
        return marked;
    }
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn named(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("axiom {i}")).collect()
    }

    #[test]
    fn combinations_of_four_choose_two_in_lexicographic_order() {
        assert_eq!(
            combinations(4, 2),
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
    }

    #[test]
    fn combination_edge_cases() {
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
        assert_eq!(combinations(1, 1), vec![vec![0]]);
    }

    #[test]
    fn binomial_matches_known_values() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(12, 6), 924);
        assert_eq!(binomial(3, 0), 1);
        assert_eq!(binomial(2, 5), 0);
        assert_eq!(binomial(60, 30), 118264581564861424);
    }

    #[test]
    fn surplus_axioms_are_truncated_with_a_warning() {
        let tree = AxiomTree::new(named(7), &TreeParams::default());
        assert_eq!(tree.first_level().len(), 5);
        assert_eq!(tree.first_level()[4], "axiom 4");
        assert_eq!(tree.total_combinations(), 10);
        assert!(tree.warnings()[0].contains("keeping the first 5"));
    }

    #[test]
    fn shortfall_keeps_axioms_but_warns() {
        let tree = AxiomTree::new(named(2), &TreeParams::default());
        assert_eq!(tree.first_level().len(), 2);
        assert_eq!(tree.total_combinations(), 1);
        assert!(tree.warnings()[0].contains("wanted at least 3"));
    }

    #[test]
    fn oversized_k_is_clamped() {
        let params = TreeParams {
            k: 4,
            ..TreeParams::default()
        };
        let tree = AxiomTree::new(named(3), &params);
        assert_eq!(tree.k(), 3);
        assert_eq!(tree.total_combinations(), 1);
        assert!(tree.warnings().iter().any(|w| w.contains("clamping")));
    }

    #[test]
    fn cursor_visits_every_combination_exactly_once_then_reuses() {
        let mut tree = AxiomTree::new(named(4), &TreeParams::default());
        let mut fresh = Vec::new();
        for i in 0..6 {
            match tree.next().unwrap() {
                LeafRequest::Fresh { combination } => {
                    tree.record_leaf(combination.clone(), format!("leaf {i}"));
                    fresh.push(combination);
                }
                LeafRequest::Reuse { .. } => panic!("reuse before exhaustion"),
            }
        }
        assert_eq!(fresh, combinations(4, 2));

        // Exhausted: reuse cycles through the synthesized leaves in order.
        for i in 0..12 {
            match tree.next().unwrap() {
                LeafRequest::Reuse { leaf } => assert_eq!(leaf.axiom, format!("leaf {}", i % 6)),
                LeafRequest::Fresh { .. } => panic!("fresh combination after exhaustion"),
            }
        }
    }

    #[test]
    fn empty_tree_yields_nothing() {
        let mut tree = AxiomTree::new(Vec::new(), &TreeParams::default());
        assert!(tree.next().is_none());
    }

    #[test]
    fn seeded_random_order_is_reproducible_and_complete() {
        let params = TreeParams {
            selection: Selection::Random { seed: 11 },
            ..TreeParams::default()
        };
        let drain = |params: &TreeParams| {
            let mut tree = AxiomTree::new(named(5), params);
            let mut seen = Vec::new();
            while let Some(LeafRequest::Fresh { combination }) = tree.next() {
                seen.push(combination);
            }
            seen
        };
        let a = drain(&params);
        let b = drain(&params);
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
        let mut sorted = a.clone();
        sorted.sort();
        assert_eq!(sorted, combinations(5, 2));
    }

    #[test]
    fn axioms_for_maps_indices_to_texts() {
        let tree = AxiomTree::new(named(4), &TreeParams::default());
        assert_eq!(tree.axioms_for(&[0, 3]), vec!["axiom 0", "axiom 3"]);
    }

    #[test]
    fn numbered_list_markers_are_stripped() {
        let text = "Here are the conditions:\n1. the set is finite\n2) the map is injective\n- equality is decidable\n\n";
        assert_eq!(
            parse_numbered_list(text),
            vec![
                "the set is finite",
                "the map is injective",
                "equality is decidable"
            ]
        );
    }

    #[test]
    fn unmarked_reply_falls_back_to_lines() {
        assert_eq!(
            parse_numbered_list("first condition\nsecond condition\n"),
            vec!["first condition", "second condition"]
        );
    }
}
