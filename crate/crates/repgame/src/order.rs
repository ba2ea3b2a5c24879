//! Finite preorders stored as bit matrices.

use fixedbitset::FixedBitSet;

/// A reflexive relation on `0..len()`, read as "row weakly above column".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    rows: Vec<FixedBitSet>,
}

impl Relation {
    /// Reflexive pairs only.
    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                let mut row = FixedBitSet::with_capacity(n);
                row.insert(i);
                row
            })
            .collect();
        Relation { rows }
    }

    /// Smallest preorder containing `pairs`.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut rel = Relation::identity(n);
        for (a, b) in pairs {
            rel.rows[a].insert(b);
        }
        rel.close();
        rel
    }

    /// Preorder from a comparison predicate; the result is closed.
    pub fn from_fn(n: usize, weakly: impl Fn(usize, usize) -> bool) -> Self {
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|(a, b)| weakly(*a, *b)).collect();
        Relation::from_pairs(n, pairs)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn weakly(&self, a: usize, b: usize) -> bool {
        self.rows[a].contains(b)
    }

    pub fn strictly(&self, a: usize, b: usize) -> bool {
        self.weakly(a, b) && !self.weakly(b, a)
    }

    pub fn indifferent(&self, a: usize, b: usize) -> bool {
        self.weakly(a, b) && self.weakly(b, a)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.weakly(a, b) || self.weakly(b, a)
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        self.rows[a].insert(b);
    }

    /// Warshall's closure, one bit row at a time.
    pub fn close(&mut self) {
        let n = self.len();
        for k in 0..n {
            let row_k = self.rows[k].clone();
            for i in 0..n {
                if i != k && self.rows[i].contains(k) {
                    self.rows[i].union_with(&row_k);
                }
            }
        }
    }

    pub fn is_transitive(&self) -> bool {
        (0..self.len()).all(|a| self.rows[a].ones().all(|b| self.rows[b].is_subset(&self.rows[a])))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows.iter().enumerate().flat_map(|(a, row)| row.ones().map(move |b| (a, b)))
    }

    /// Indifference classes in order of their least member; also the class
    /// index of every element.
    pub fn classes(&self) -> (Vec<Vec<usize>>, Vec<usize>) {
        let n = self.len();
        let mut class_of = vec![usize::MAX; n];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for a in 0..n {
            if class_of[a] != usize::MAX {
                continue;
            }
            let members: Vec<usize> = (a..n).filter(|b| self.indifferent(a, *b)).collect();
            for m in &members {
                class_of[*m] = classes.len();
            }
            classes.push(members);
        }
        (classes, class_of)
    }

    /// Strict cover pairs `(above, below)` among the given representatives.
    pub fn covers(&self, reps: &[usize]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (x, &a) in reps.iter().enumerate() {
            for (y, &b) in reps.iter().enumerate() {
                if !self.strictly(a, b) {
                    continue;
                }
                let between = reps.iter().any(|&c| self.strictly(a, c) && self.strictly(c, b));
                if !between {
                    out.push((x, y));
                }
            }
        }
        out
    }
}
