//! Exhaustive codeword enumeration: minimum distance, nearest codeword and
//! support sets. Everything here is exact and guarded by a hard budget.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use super::LinearCode;
use crate::algebra::Elem;
use crate::error::{Error, Result};

/// Largest number of codewords (`q^k`) any enumeration will visit.
pub const ENUMERATION_BUDGET: u128 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NearestCodeword {
    pub codeword: Vec<Elem>,
    pub message: Vec<Elem>,
    pub distance: usize,
    /// Another codeword, later in canonical order, is equally close.
    pub tie: bool,
    /// Number of codewords at the minimum distance.
    pub ties: usize,
}

impl LinearCode {
    pub(crate) fn check_budget(&self) -> Result<()> {
        let size = (self.field.order() as u128).checked_pow(self.dim() as u32);
        match size {
            Some(s) if s <= ENUMERATION_BUDGET => Ok(()),
            _ => Err(Error::EnumerationBudget {
                size: size.unwrap_or(u128::MAX),
                budget: ENUMERATION_BUDGET,
            }),
        }
    }

    /// Visits messages in canonical (lexicographic) order over digits
    /// `start..k`, beginning from the given message/codeword pair and
    /// updating the codeword incrementally.
    fn walk<F>(&self, start: usize, mut msg: Vec<Elem>, mut cw: Vec<Elem>, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[Elem], &[Elem]) -> ControlFlow<()>,
    {
        let f = &self.field;
        let q = f.order();
        let k = self.dim();
        let g = &self.generator;
        loop {
            visit(&msg, &cw)?;
            let mut pos = k;
            loop {
                if pos == start {
                    return ControlFlow::Continue(());
                }
                pos -= 1;
                let old = msg[pos];
                let new = if old + 1 == q { 0 } else { old + 1 };
                let delta = f.sub(new, old);
                for (c, &gv) in cw.iter_mut().zip(g.row(pos)) {
                    *c = f.mul_add(*c, delta, gv);
                }
                msg[pos] = new;
                if new != 0 {
                    break;
                }
            }
        }
    }

    /// All codewords in canonical message order.
    pub fn for_each_codeword<F>(&self, mut visit: F) -> Result<()>
    where
        F: FnMut(&[Elem], &[Elem]) -> ControlFlow<()>,
    {
        self.check_budget()?;
        let _ = self.walk(0, vec![0; self.dim()], vec![0; self.len()], &mut visit);
        Ok(())
    }

    /// One representative per nonzero projective class: messages whose first
    /// nonzero digit is 1. Hamming weights and supports are constant on a
    /// class, so this visits `(q^k - 1)/(q - 1)` words instead of `q^k`.
    pub fn for_each_projective<F>(&self, mut visit: F) -> Result<()>
    where
        F: FnMut(&[Elem], &[Elem]) -> ControlFlow<()>,
    {
        self.check_budget()?;
        let k = self.dim();
        for lead in 0..k {
            let mut msg = vec![0; k];
            msg[lead] = 1;
            let cw = self.generator.row(lead).to_vec();
            if self.walk(lead + 1, msg, cw, &mut visit).is_break() {
                break;
            }
        }
        Ok(())
    }

    /// Minimum weight over nonzero codewords, with the first codeword in
    /// canonical order attaining it.
    pub fn min_weight_codeword(&self) -> Result<(usize, Vec<Elem>)> {
        let mut best = (usize::MAX, Vec::new());
        self.for_each_projective(|_, cw| {
            let w = weight(cw);
            if w < best.0 {
                best = (w, cw.to_vec());
                if w == 1 {
                    return ControlFlow::Break(());
                }
            }
            ControlFlow::Continue(())
        })?;
        Ok(best)
    }

    /// Number of codewords of each weight `0..=n`.
    pub fn weight_distribution(&self) -> Result<Vec<u128>> {
        let mut dist = vec![0u128; self.len() + 1];
        self.for_each_codeword(|_, cw| {
            dist[weight(cw)] += 1;
            ControlFlow::Continue(())
        })?;
        Ok(dist)
    }

    /// Closest codeword to `word` in Hamming distance; ties go to the first
    /// codeword in canonical message order and are reported.
    pub fn nearest_codeword(&self, word: &[Elem]) -> Result<NearestCodeword> {
        if word.len() != self.len() {
            return Err(Error::Dimension(format!(
                "word of length {} for a code of length {}",
                word.len(),
                self.len()
            )));
        }
        let mut best: Option<NearestCodeword> = None;
        self.for_each_codeword(|msg, cw| {
            let dist = cw.iter().zip(word).filter(|(a, b)| a != b).count();
            match &mut best {
                Some(b) if dist > b.distance => {}
                Some(b) if dist == b.distance => {
                    b.tie = true;
                    b.ties += 1;
                }
                _ => {
                    best = Some(NearestCodeword {
                        codeword: cw.to_vec(),
                        message: msg.to_vec(),
                        distance: dist,
                        tie: false,
                        ties: 1,
                    })
                }
            }
            ControlFlow::Continue(())
        })?;
        Ok(best.expect("a code has at least one codeword"))
    }

    /// Distinct supports of nonzero codewords as bit masks (`n <= 128`).
    pub fn supports(&self) -> Result<BTreeSet<u128>> {
        if self.len() > 128 {
            return Err(Error::InvalidParameter("support masks need n <= 128".into()));
        }
        let mut out = BTreeSet::new();
        self.for_each_projective(|_, cw| {
            out.insert(support_mask(cw));
            ControlFlow::Continue(())
        })?;
        Ok(out)
    }
}

pub fn weight(word: &[Elem]) -> usize {
    word.iter().filter(|&&c| c != 0).count()
}

pub(crate) fn support_mask(word: &[Elem]) -> u128 {
    word.iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .fold(0u128, |m, (i, _)| m | (1 << i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{FMatrix, Field};

    fn code(p: u32, rows: &[Vec<Elem>]) -> LinearCode {
        let f = Field::prime(p).unwrap();
        LinearCode::from_generator(FMatrix::from_rows(&f, rows).unwrap()).unwrap()
    }

    #[test]
    fn enumeration_visits_every_codeword_once() {
        let c = code(3, &[vec![1, 1, 1, 0], vec![0, 1, 2, 1]]);
        let mut seen = BTreeSet::new();
        c.for_each_codeword(|msg, cw| {
            assert_eq!(c.encode_scalars(msg).unwrap(), cw);
            seen.insert(cw.to_vec());
            ControlFlow::Continue(())
        })
        .unwrap();
        assert_eq!(seen.len(), 9);
        assert_eq!(c.weight_distribution().unwrap().iter().sum::<u128>(), 9);
    }

    #[test]
    fn budget_is_enforced() {
        let f = Field::prime(17).unwrap();
        let g = FMatrix::identity(&f, 7);
        let c = LinearCode::from_generator(g).unwrap();
        assert!(matches!(c.min_distance(), Err(Error::EnumerationBudget { .. })));
    }

    #[test]
    fn nearest_of_codeword_is_itself() {
        let c = code(5, &[vec![1, 1, 1, 1], vec![0, 1, 2, 3]]);
        let cw = c.encode_scalars(&[2, 3]).unwrap();
        let near = c.nearest_codeword(&cw).unwrap();
        assert_eq!((near.codeword, near.distance, near.tie), (cw, 0, false));
    }
}
