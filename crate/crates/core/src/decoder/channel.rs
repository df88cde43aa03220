use std::fmt;

use crate::error::{ensure, Error, Result};
use crate::gf2::BitVec;

/// What the erasure channel delivered: a known/erased mask and the bit
/// values, which are ignored at erased positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelOutput {
    pub known: Vec<bool>,
    pub values: BitVec,
}

impl ChannelOutput {
    pub fn new(known: Vec<bool>, values: BitVec) -> Result<Self> {
        ensure!(
            known.len() == values.len(),
            Contract,
            "mask has {} entries for {} values",
            known.len(),
            values.len()
        );
        Ok(Self { known, values })
    }

    /// `c` with the positions flagged in `erased` removed.
    pub fn erase(c: &BitVec, erased: &[bool]) -> Result<Self> {
        ensure!(erased.len() == c.len(), Contract, "erasure mask length mismatch");
        let known: Vec<bool> = erased.iter().map(|e| !e).collect();
        let values = (0..c.len()).map(|i| known[i] && c.get(i)).collect();
        Self::new(known, values)
    }

    pub fn all_known(c: &BitVec) -> Self {
        Self {
            known: vec![true; c.len()],
            values: c.clone(),
        }
    }

    pub fn all_erased(len: usize) -> Self {
        Self {
            known: vec![false; len],
            values: BitVec::zeros(len),
        }
    }

    /// Parses a word over `{0, 1, ?}`; whitespace is ignored.
    pub fn parse(s: &str) -> Result<Self> {
        let mut known = Vec::new();
        let mut values = BitVec::zeros(0);
        for ch in s.chars().filter(|c| !c.is_whitespace()) {
            match ch {
                '0' | '1' => {
                    known.push(true);
                    values.push(ch == '1');
                }
                '?' => {
                    known.push(false);
                    values.push(false);
                }
                _ => return Err(Error::Parse(format!("unexpected symbol `{ch}` in received word"))),
            }
        }
        Self::new(known, values)
    }

    pub fn len(&self) -> usize {
        self.known.len()
    }

    pub fn is_empty(&self) -> bool {
        self.known.is_empty()
    }

    pub fn erasures(&self) -> usize {
        self.known.iter().filter(|k| !**k).count()
    }

    pub fn erased_positions(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.known[i]).collect()
    }
}

impl fmt::Display for ChannelOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            let ch = match (self.known[i], self.values.get(i)) {
                (false, _) => '?',
                (true, true) => '1',
                (true, false) => '0',
            };
            write!(f, "{ch}")?;
        }
        Ok(())
    }
}
