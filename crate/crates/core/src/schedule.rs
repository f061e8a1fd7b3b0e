//! Revision schedule: which mode each attempt runs in.
//!
//! Revisions are numbered from 1. The first is always a cold attempt;
//! configured revisions switch into diversification (a fresh strategy from
//! the axiom tree, deliberately not consuming the failure analysis); all
//! others refine the previous failures. Defaults give ten revisions with
//! diversification at 4 and 7.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Initial,
    Diversify,
    Refine,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Initial => "initial",
            Mode::Diversify => "diversify",
            Mode::Refine => "refine",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    #[serde(default = "default_max_revisions")]
    pub max_revisions: usize,
    #[serde(default = "default_diversify_at")]
    pub diversify_at: BTreeSet<usize>,
}

fn default_max_revisions() -> usize {
    10
}

fn default_diversify_at() -> BTreeSet<usize> {
    BTreeSet::from([4, 7])
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            max_revisions: default_max_revisions(),
            diversify_at: default_diversify_at(),
        }
    }
}

impl Schedule {
    /// Mode of the 1-based revision `r`. The first revision is always
    /// `Initial`, even if listed as a diversification point.
    ///
    /// # Panics
    /// When `r` is outside `1..=max_revisions`.
    pub fn mode_for(&self, r: usize) -> Mode {
        assert!(
            r >= 1 && r <= self.max_revisions,
            "revision {r} outside 1..={}",
            self.max_revisions
        );
        if r == 1 {
            Mode::Initial
        } else if self.diversify_at.contains(&r) {
            Mode::Diversify
        } else {
            Mode::Refine
        }
    }

    /// The full mode sequence for revisions `1..=max_revisions`.
    pub fn modes(&self) -> Vec<Mode> {
        (1..=self.max_revisions).map(|r| self.mode_for(r)).collect()
    }
}
