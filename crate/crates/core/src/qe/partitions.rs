//! Partitions of a term set and enumeration of the admissible ones.
//!
//! A partition of a subterm-closed set is admissible when it is a congruence
//! in the term sense: two applications of the same symbol whose arguments lie
//! in pairwise equal blocks must themselves share a block.  Enumeration walks
//! restricted growth strings depth-first and prunes a block choice the moment
//! it would violate that condition, which is exact because arguments always
//! precede their applications in term order.

use super::QeError;
use crate::syntax::Term;
use std::collections::BTreeMap;

/// A partition of `{0, ..., len-1}` in canonical restricted-growth form:
/// block ids are numbered by first occurrence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition {
    block_of: Vec<usize>,
    num_blocks: usize,
}

impl Partition {
    /// Builds from any block labelling, renumbering canonically.
    pub fn from_block_of(raw: &[usize]) -> Partition {
        let mut rename: BTreeMap<usize, usize> = BTreeMap::new();
        let mut block_of = Vec::with_capacity(raw.len());
        for &b in raw {
            let next = rename.len();
            let id = *rename.entry(b).or_insert(next);
            block_of.push(id);
        }
        let num_blocks = rename.len();
        Partition { block_of, num_blocks }
    }

    /// Builds from explicit classes; every index below `len` must appear
    /// exactly once.
    pub fn from_classes(len: usize, classes: &[Vec<usize>]) -> Result<Partition, QeError> {
        let mut raw = vec![usize::MAX; len];
        for (b, class) in classes.iter().enumerate() {
            for &i in class {
                if i >= len || raw[i] != usize::MAX {
                    return Err(QeError::BadPartition);
                }
                raw[i] = b;
            }
        }
        if raw.contains(&usize::MAX) {
            return Err(QeError::BadPartition);
        }
        Ok(Partition::from_block_of(&raw))
    }

    pub fn singletons(len: usize) -> Partition {
        Partition {
            block_of: (0..len).collect(),
            num_blocks: len,
        }
    }

    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    pub fn num_blocks(&self) -> usize {
        self.num_blocks
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.block_of[i]
    }

    pub fn same(&self, i: usize, j: usize) -> bool {
        self.block_of[i] == self.block_of[j]
    }

    /// Classes as index lists, ordered by block id (= first occurrence).
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_blocks];
        for (i, &b) in self.block_of.iter().enumerate() {
            out[b].push(i);
        }
        out
    }
}

/// Application structure of a term slice: for each index, the symbol and the
/// indices of its immediate arguments (only present when all arguments are
/// in the slice, which subterm closure guarantees).
pub(crate) fn app_structure(theta: &[Term]) -> Vec<Option<(String, Vec<usize>)>> {
    let index: BTreeMap<&Term, usize> = theta.iter().enumerate().map(|(i, t)| (t, i)).collect();
    theta
        .iter()
        .map(|t| match t {
            Term::Var(_) => None,
            Term::App(f, args) => {
                let arg_ids: Option<Vec<usize>> =
                    args.iter().map(|a| index.get(a).copied()).collect();
                arg_ids.map(|ids| (f.clone(), ids))
            }
        })
        .collect()
}

/// Least congruence refinement-upward of `p`: merges blocks until the
/// admissibility condition holds.  Deterministic and independent of merge
/// order (it is a closure).
pub fn close_congruence(theta: &[Term], p: &Partition) -> Partition {
    let apps = app_structure(theta);
    let mut block_of: Vec<usize> = (0..p.len()).map(|i| p.block_of(i)).collect();
    loop {
        let mut merged = false;
        for i in 0..theta.len() {
            let Some((fi, ai)) = &apps[i] else { continue };
            for j in i + 1..theta.len() {
                let Some((fj, aj)) = &apps[j] else { continue };
                if fi == fj
                    && ai.len() == aj.len()
                    && ai.iter().zip(aj).all(|(&a, &b)| block_of[a] == block_of[b])
                    && block_of[i] != block_of[j]
                {
                    let (from, to) = (block_of[i].max(block_of[j]), block_of[i].min(block_of[j]));
                    for b in block_of.iter_mut() {
                        if *b == from {
                            *b = to;
                        }
                    }
                    merged = true;
                }
            }
        }
        if !merged {
            return Partition::from_block_of(&block_of);
        }
    }
}

/// Is `p` admissible for `theta`?
pub fn is_admissible(theta: &[Term], p: &Partition) -> bool {
    close_congruence(theta, p) == *p
}

/// Depth-first enumerator of the admissible partitions of `theta` in
/// restricted-growth-string order.  Yields at most `cap` partitions and then
/// a single [`QeError::TooManyPartitions`] if more would follow.
pub struct CongruenceEnum {
    apps: Vec<Option<(String, Vec<usize>)>>,
    n: usize,
    cap: u64,
    emitted: u64,
    /// Current prefix of block choices; empty before the first partition.
    prefix: Vec<usize>,
    state: EnumState,
}

#[derive(PartialEq)]
enum EnumState {
    Fresh,
    Running,
    Done,
}

/// Admissible partitions of a subterm-closed slice, in deterministic order.
pub fn enumerate_congruences(theta: &[Term], cap: u64) -> CongruenceEnum {
    CongruenceEnum {
        apps: app_structure(theta),
        n: theta.len(),
        cap,
        emitted: 0,
        prefix: Vec::new(),
        state: EnumState::Fresh,
    }
}

impl CongruenceEnum {
    /// Would assigning block `b` to position `i` violate the congruence
    /// condition against the already assigned positions?
    fn choice_ok(&self, i: usize, b: usize) -> bool {
        let Some((fi, ai)) = &self.apps[i] else { return true };
        for j in 0..i {
            let Some((fj, aj)) = &self.apps[j] else { continue };
            if fi == fj
                && ai.len() == aj.len()
                && ai
                    .iter()
                    .zip(aj)
                    .all(|(&x, &y)| self.prefix[x] == self.prefix[y])
                && self.prefix[j] != b
            {
                return false;
            }
        }
        true
    }

    fn max_block(&self) -> usize {
        self.prefix.iter().copied().max().map_or(0, |m| m + 1)
    }

    /// Extends the prefix to a full assignment, starting position `i` at
    /// block `from`.  Returns false when the subtree is exhausted.
    fn descend(&mut self, mut from: usize) -> bool {
        while self.prefix.len() < self.n {
            let i = self.prefix.len();
            let limit = self.max_block();
            let mut chosen = None;
            for b in from..=limit {
                if self.choice_ok(i, b) {
                    chosen = Some(b);
                    break;
                }
            }
            match chosen {
                Some(b) => {
                    self.prefix.push(b);
                    from = 0;
                }
                None => {
                    if !self.backtrack_step(&mut from) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Pops one position and reports where its search should resume.
    fn backtrack_step(&mut self, from: &mut usize) -> bool {
        match self.prefix.pop() {
            Some(prev) => {
                *from = prev + 1;
                true
            }
            None => false,
        }
    }
}

impl Iterator for CongruenceEnum {
    type Item = Result<Partition, QeError>;

    fn next(&mut self) -> Option<Self::Item> {
        let found = match self.state {
            EnumState::Done => return None,
            EnumState::Fresh => {
                self.state = EnumState::Running;
                // A zero-length term set has exactly one partition.
                self.descend(0)
            }
            EnumState::Running => {
                if self.n == 0 {
                    false
                } else {
                    let mut from = 0;
                    self.backtrack_step(&mut from) && self.descend(from)
                }
            }
        };
        if !found {
            self.state = EnumState::Done;
            return None;
        }
        if self.emitted == self.cap {
            self.state = EnumState::Done;
            return Some(Err(QeError::TooManyPartitions { cap: self.cap }));
        }
        self.emitted += 1;
        Some(Ok(Partition::from_block_of(&self.prefix)))
    }
}
