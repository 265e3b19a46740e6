//! Index-level group arithmetic for the hot loops.

use crate::error::Result;
use crate::group::{GElement, GroupSpec};

const MAX_CAYLEY_ORDER: usize = 2048;

pub(crate) struct Cayley {
    group: GroupSpec,
    n: usize,
    add: Option<Vec<u32>>,
    neg: Vec<u32>,
}

impl Cayley {
    pub(crate) fn new(group: &GroupSpec) -> Result<Self> {
        let elems = group.elements()?;
        let n = elems.len();
        let add = (n <= MAX_CAYLEY_ORDER).then(|| {
            let mut t = vec![0u32; n * n];
            for (i, a) in elems.iter().enumerate() {
                for (j, b) in elems.iter().enumerate() {
                    t[i * n + j] = group.index_of(&group.add(a, b)) as u32;
                }
            }
            t
        });
        let neg = elems
            .iter()
            .map(|g| group.index_of(&group.neg(g)) as u32)
            .collect();
        Ok(Cayley {
            group: group.clone(),
            n,
            add,
            neg,
        })
    }

    pub(crate) fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub(crate) fn add(&self, a: usize, b: usize) -> usize {
        match &self.add {
            Some(t) => t[a * self.n + b] as usize,
            None => {
                let g = &self.group;
                g.index_of(&g.add(&g.element_at(a), &g.element_at(b)))
            }
        }
    }

    #[inline]
    pub(crate) fn neg(&self, a: usize) -> usize {
        self.neg[a] as usize
    }

    pub(crate) fn index(&self, g: &GElement) -> usize {
        self.group.index_of(g)
    }
}

/// Fixed-size bitset over element indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Bits {
    words: Vec<u64>,
}

impl Bits {
    pub(crate) fn new(n: usize) -> Self {
        Bits {
            words: vec![0; n.div_ceil(64)],
        }
    }

    #[inline]
    pub(crate) fn get(&self, i: usize) -> bool {
        self.words[i >> 6] >> (i & 63) & 1 == 1
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize) {
        self.words[i >> 6] |= 1 << (i & 63);
    }

    pub(crate) fn copy_from(&mut self, other: &Bits) {
        self.words.copy_from_slice(&other.words);
    }

    pub(crate) fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut m = word;
            std::iter::from_fn(move || {
                if m == 0 {
                    return None;
                }
                let b = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(w * 64 + b)
            })
        })
    }
}
