/// Disjoint sets where each root carries an age key; merging keeps the older root.
#[derive(Debug, Clone)]
pub struct ElderUnionFind {
    parent: Vec<usize>,
    age: Vec<usize>,
}

impl ElderUnionFind {
    /// `age[i]` orders the singletons: smaller means older.
    pub fn new(age: Vec<usize>) -> Self {
        Self {
            parent: (0..age.len()).collect(),
            age,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    /// Merges the sets of `a` and `b`; returns `(survivor, absorbed)` roots, or `None` if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> Option<(usize, usize)> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        let (elder, younger) = if self.age[ra] <= self.age[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[younger] = elder;
        Some((elder, younger))
    }

    pub fn is_root(&self, x: usize) -> bool {
        self.parent[x] == x
    }
}
