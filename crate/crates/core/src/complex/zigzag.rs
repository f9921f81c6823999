use std::sync::Arc;

use super::{cohomology_sheaf, is_quasi_iso, ChainMap, Cohomology, SheafComplex};
use crate::error::{Error, Result};
use crate::poset::Poset;
use crate::sheaf::SheafMorphism;

/// One arrow of a zig-zag. A backward arrow points from the next complex to
/// the previous one.
#[derive(Debug, Clone)]
pub enum Arrow {
    Forward(ChainMap),
    Backward(ChainMap),
}

impl Arrow {
    pub fn map(&self) -> &ChainMap {
        match self {
            Arrow::Forward(f) | Arrow::Backward(f) => f,
        }
    }

    pub fn is_forward(&self) -> bool {
        matches!(self, Arrow::Forward(_))
    }
}

/// `C_0 - C_1 - ... - C_n` with arrows in either direction. When every arrow
/// is a quasi-isomorphism this is an isomorphism `C_0 ≅ C_n` in the derived
/// category.
#[derive(Debug, Clone)]
pub struct ZigZag {
    complexes: Vec<SheafComplex>,
    arrows: Vec<Arrow>,
}

impl ZigZag {
    pub fn new(start: &SheafComplex) -> Self {
        ZigZag {
            complexes: vec![start.clone()],
            arrows: Vec::new(),
        }
    }

    pub fn start(&self) -> &SheafComplex {
        &self.complexes[0]
    }

    pub fn end(&self) -> &SheafComplex {
        self.complexes.last().unwrap()
    }

    pub fn complexes(&self) -> &[SheafComplex] {
        &self.complexes
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    /// Appends `f: end -> C`.
    pub fn forward(mut self, f: &ChainMap) -> Result<Self> {
        if f.source() != self.end() {
            return Err(Error::Shape("forward arrow does not start at the end of the zig-zag".into()));
        }
        self.complexes.push(f.target().clone());
        self.arrows.push(Arrow::Forward(f.clone()));
        Ok(self)
    }

    /// Appends `f: C -> end`.
    pub fn backward(mut self, f: &ChainMap) -> Result<Self> {
        if f.target() != self.end() {
            return Err(Error::Shape("backward arrow does not end at the end of the zig-zag".into()));
        }
        self.complexes.push(f.source().clone());
        self.arrows.push(Arrow::Backward(f.clone()));
        Ok(self)
    }

    /// Appends the arrows of `other`, which must start where `self` ends.
    pub fn then(mut self, other: &ZigZag) -> Result<Self> {
        for a in &other.arrows {
            self = match a {
                Arrow::Forward(f) => self.forward(f)?,
                Arrow::Backward(f) => self.backward(f)?,
            };
        }
        Ok(self)
    }

    /// Index of the first arrow that is not a quasi-isomorphism.
    pub fn first_non_quasi_iso(&self) -> Result<Option<usize>> {
        for (i, a) in self.arrows.iter().enumerate() {
            if !is_quasi_iso(a.map())? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    pub fn all_quasi_iso(&self) -> Result<bool> {
        Ok(self.first_non_quasi_iso()?.is_none())
    }

    /// The map `H^k(C_0) -> H^k(C_n)`, inverting backward arrows.
    pub fn on_cohomology(&self, k: i64) -> Result<SheafMorphism> {
        let first = cohomology_sheaf(self.start(), k)?;
        let last = cohomology_sheaf(self.end(), k)?;
        self.transport(&first, &last)
    }

    /// Like [`ZigZag::on_cohomology`] with the end cohomologies supplied.
    pub fn transport(&self, first: &Cohomology, last: &Cohomology) -> Result<SheafMorphism> {
        let k = first.degree;
        let n = self.arrows.len();
        let mut coh = vec![first.clone()];
        for c in &self.complexes[1..n.max(1)] {
            coh.push(cohomology_sheaf(c, k)?);
        }
        if n > 0 {
            coh.push(last.clone());
        }
        let mut acc = SheafMorphism::identity(&first.sheaf);
        for (i, a) in self.arrows.iter().enumerate() {
            let step = match a {
                Arrow::Forward(f) => Cohomology::induced(f, &coh[i], &coh[i + 1])?,
                Arrow::Backward(f) => Cohomology::induced(f, &coh[i + 1], &coh[i])?
                    .inverse()
                    .ok_or_else(|| Error::Theorem(format!("backward arrow {i} is not invertible on H^{k}")))?,
            };
            acc = step.compose(&acc)?;
        }
        if n == 0 {
            return acc.with_ends(&first.sheaf, &last.sheaf);
        }
        Ok(acc)
    }

    pub fn restrict_to(&self, sub: &Arc<Poset>) -> Result<ZigZag> {
        let mut z = ZigZag::new(&self.start().restrict_to(sub)?);
        for a in &self.arrows {
            let f = a.map().restrict_to(sub)?;
            z = match a {
                Arrow::Forward(_) => z.forward(&f)?,
                Arrow::Backward(_) => z.backward(&f)?,
            };
        }
        Ok(z)
    }
}
