use rand::seq::SliceRandom;
use rand::Rng;

use super::ChainError;
use crate::graph::{within_target, DualGraph};

/// Uniform random spanning tree of the subgraph induced on `subset` (Wilson's algorithm).
///
/// Edges are returned as global node index pairs `(child, parent)` toward a random root.
pub fn random_spanning_tree<R: Rng + ?Sized>(
    g: &DualGraph,
    subset: &[usize],
    rng: &mut R,
) -> Result<Vec<(usize, usize)>, ChainError> {
    if subset.is_empty() {
        return Err(ChainError::DisconnectedSubset);
    }
    if !g.induced_connected(subset) {
        return Err(ChainError::DisconnectedSubset);
    }
    let mut local = vec![usize::MAX; g.node_count()];
    for (i, &v) in subset.iter().enumerate() {
        local[v] = i;
    }
    let neighbors: Vec<Vec<usize>> = subset
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .iter()
                .filter(|&&u| local[u] != usize::MAX)
                .map(|&u| local[u])
                .collect()
        })
        .collect();

    let n = subset.len();
    let mut in_tree = vec![false; n];
    let mut next = vec![usize::MAX; n];
    in_tree[rng.gen_range(0..n)] = true;
    for start in 0..n {
        // loop-erased random walk: overwriting next[] erases loops implicitly
        let mut u = start;
        while !in_tree[u] {
            let nb = &neighbors[u];
            next[u] = nb[rng.gen_range(0..nb.len())];
            u = next[u];
        }
        let mut u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            u = next[u];
        }
    }
    Ok((0..n)
        .filter(|&i| next[i] != usize::MAX)
        .map(|i| (subset[i], subset[next[i]]))
        .collect())
}

/// A tree edge whose removal leaves both sides acceptable, with the side below it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct TreeCut {
    pub edge: (usize, usize),
    /// Nodes on the child side of `edge`.
    pub side: Vec<usize>,
    /// Nodes on the other side.
    pub rest: Vec<usize>,
}

/// Rooted view of a tree given by an edge list over global node ids.
pub(crate) struct RootedTree {
    nodes: Vec<usize>,
    parent: Vec<usize>,
    /// Local indices in DFS preorder (parents before children).
    order: Vec<usize>,
}

impl RootedTree {
    pub fn new(edges: &[(usize, usize)]) -> Option<Self> {
        let mut nodes: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
        nodes.sort_unstable();
        nodes.dedup();
        if nodes.is_empty() {
            return None;
        }
        let idx = |v: usize| nodes.binary_search(&v).expect("endpoint listed");
        let mut adj = vec![Vec::new(); nodes.len()];
        for &(a, b) in edges {
            let (a, b) = (idx(a), idx(b));
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut parent = vec![usize::MAX; nodes.len()];
        let mut order = Vec::with_capacity(nodes.len());
        let mut seen = vec![false; nodes.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            order.push(u);
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = u;
                    stack.push(v);
                }
            }
        }
        Some(Self { nodes, parent, order })
    }

    /// Child-side local indices of every tree edge whose two sides satisfy
    /// `accept(below, above)`, in preorder.
    pub fn candidates(&self, populations: &[u64], accept: impl Fn(u64, u64) -> bool) -> Vec<usize> {
        let mut subtree: Vec<u64> = self.nodes.iter().map(|&v| populations[v]).collect();
        for &u in self.order.iter().rev() {
            if self.parent[u] != usize::MAX {
                subtree[self.parent[u]] += subtree[u];
            }
        }
        let total = subtree[self.order[0]];
        self.order
            .iter()
            .copied()
            .filter(|&u| self.parent[u] != usize::MAX)
            .filter(|&u| accept(subtree[u], total - subtree[u]))
            .collect()
    }

    /// Splits the tree at the edge above local node `u`.
    pub fn cut_at(&self, u: usize) -> TreeCut {
        let n = self.nodes.len();
        let mut children = vec![Vec::new(); n];
        for x in 0..n {
            if self.parent[x] != usize::MAX {
                children[self.parent[x]].push(x);
            }
        }
        let mut below = vec![false; n];
        let mut stack = vec![u];
        while let Some(x) = stack.pop() {
            below[x] = true;
            stack.extend(&children[x]);
        }
        let (side, rest): (Vec<usize>, Vec<usize>) = (0..n).partition(|&x| below[x]);
        TreeCut {
            edge: (self.nodes[u], self.nodes[self.parent[u]]),
            side: side.into_iter().map(|x| self.nodes[x]).collect(),
            rest: rest.into_iter().map(|x| self.nodes[x]).collect(),
        }
    }
}

pub(crate) fn random_cut<R: Rng + ?Sized>(
    tree: &[(usize, usize)],
    populations: &[u64],
    accept: impl Fn(u64) -> bool,
    rng: &mut R,
) -> Option<TreeCut> {
    let rooted = RootedTree::new(tree)?;
    let candidates = rooted.candidates(populations, |a, b| accept(a) && accept(b));
    candidates.choose(rng).map(|&u| rooted.cut_at(u))
}

/// Tree edge whose removal leaves both parts within `[(1-ε)T, (1+ε)T]`, chosen
/// uniformly among all such edges; `None` when no edge qualifies.
pub fn balanced_cut<R: Rng + ?Sized>(
    tree: &[(usize, usize)],
    populations: &[u64],
    target: f64,
    epsilon: f64,
    rng: &mut R,
) -> Option<(usize, usize)> {
    random_cut(tree, populations, |p| within_target(p, target, epsilon), rng).map(|c| c.edge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn norm(e: (usize, usize)) -> (usize, usize) {
        (e.0.min(e.1), e.0.max(e.1))
    }

    #[test]
    fn unique_balanced_cut_on_a_path() {
        let tree = [(0, 1), (1, 2), (2, 3)];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let e = balanced_cut(&tree, &[1, 1, 1, 1], 2.0, 0.02, &mut rng).unwrap();
            assert_eq!(norm(e), (1, 2));
        }
    }

    #[test]
    fn three_path_has_no_balanced_cut() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(balanced_cut(&[(0, 1), (1, 2)], &[1, 1, 1], 1.5, 0.02, &mut rng), None);
    }

    #[test]
    fn star_cuts_isolate_one_leaf() {
        let tree = [(0, 1), (0, 2), (0, 3), (0, 4)];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(balanced_cut(&tree, &[1; 5], 2.5, 0.25, &mut rng), None);
    }

    #[test]
    fn cut_sides_partition_the_tree() {
        let tree = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)];
        let rooted = RootedTree::new(&tree).unwrap();
        let candidates = rooted.candidates(&[1; 6], |a, b| a == 3 && b == 3);
        assert_eq!(candidates.len(), 1);
        let cuts = [rooted.cut_at(candidates[0])];
        let mut all: Vec<usize> = cuts[0].side.iter().chain(&cuts[0].rest).copied().collect();
        all.sort_unstable();
        assert_eq!(all, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(norm(cuts[0].edge), (2, 3));
    }
}
