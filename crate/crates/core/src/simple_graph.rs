//! Simple undirected graphs on `1..=n`: the underlying graph `si(G)`, the
//! multiplicity graph, lift windows, and the finite minor checks.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::gain_graph::Vertex;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SimpleGraph {
    n: usize,
    /// Pairs `(u, v)` with `u < v`.
    edges: BTreeSet<(Vertex, Vertex)>,
}

impl SimpleGraph {
    pub fn new(n: usize) -> Self {
        SimpleGraph { n, edges: BTreeSet::new() }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Self {
        let mut g = SimpleGraph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        Self::from_edges(n, (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))))
    }

    /// Complete multipartite graph with the given part sizes.
    pub fn complete_multipartite(parts: &[usize]) -> Self {
        let n: usize = parts.iter().sum();
        let mut part = Vec::with_capacity(n);
        for (k, &s) in parts.iter().enumerate() {
            part.extend(std::iter::repeat_n(k, s));
        }
        Self::from_edges(
            n,
            (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).filter(|&(i, j)| part[i - 1] != part[j - 1]),
        )
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|i| (i, i + 1)))
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::path(n);
        if n >= 3 {
            g.add_edge(n, 1);
        }
        g
    }

    /// Ignores loops; panics on out-of-range vertices.
    pub fn add_edge(&mut self, u: Vertex, v: Vertex) {
        assert!(u >= 1 && u <= self.n && v >= 1 && v <= self.n, "vertex out of range");
        if u != v {
            self.edges.insert((u.min(v), u.max(v)));
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn adjacency(&self) -> Vec<Vec<Vertex>> {
        let mut adj = vec![Vec::new(); self.n + 1];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn min_degree(&self) -> usize {
        let adj = self.adjacency();
        adj[1..].iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.n * self.n.saturating_sub(1) / 2
    }

    /// Vertex sets of the connected components, each sorted, ordered by
    /// smallest vertex.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n + 1];
        let mut out = Vec::new();
        for root in 1..=self.n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut comp = vec![root];
            let mut queue = VecDeque::from([root]);
            while let Some(a) = queue.pop_front() {
                for &b in &adj[a] {
                    if !seen[b] {
                        seen[b] = true;
                        comp.push(b);
                        queue.push_back(b);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Connected on all of its vertices; one vertex counts, none does not.
    pub fn is_connected(&self) -> bool {
        self.n >= 1 && self.components().len() == 1
    }

    pub fn has_cycle(&self) -> bool {
        self.edges.len() + self.components().len() > self.n
    }

    pub fn is_forest(&self) -> bool {
        !self.has_cycle()
    }

    /// Shortest path from `from` to `to` avoiding `blocked`, as a vertex list.
    pub fn shortest_path(&self, from: Vertex, to: Vertex, blocked: &[Vertex]) -> Option<Vec<Vertex>> {
        let adj = self.adjacency();
        let mut prev = vec![0usize; self.n + 1];
        let mut seen = vec![false; self.n + 1];
        for &b in blocked {
            seen[b] = true;
        }
        if seen[from] || seen[to] {
            return None;
        }
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(a) = queue.pop_front() {
            if a == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &b in &adj[a] {
                if !seen[b] {
                    seen[b] = true;
                    prev[b] = a;
                    queue.push_back(b);
                }
            }
        }
        None
    }

    /// Vertex-disjoint paths, one ending at each of `targets`, each starting
    /// in `sources` and meeting `sources` only at its first vertex. Vertices
    /// in `blocked` are avoided. Augmenting paths on the vertex-split graph.
    pub fn disjoint_paths(
        &self,
        sources: &[Vertex],
        targets: &[Vertex],
        blocked: &[Vertex],
    ) -> Option<Vec<Vec<Vertex>>> {
        use std::collections::BTreeMap;
        let n = self.n;
        let ok = |v: Vertex| !blocked.contains(&v);
        if targets.iter().any(|&t| !ok(t) || t == 0 || t > n) {
            return None;
        }
        // v_in = 2v, v_out = 2v + 1, source 0, sink 1
        let (src, sink) = (0usize, 1usize);
        let mut cap: BTreeMap<(usize, usize), i32> = BTreeMap::new();
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); 2 * n + 2];
        let mut add = |a: usize, b: usize| {
            *cap.entry((a, b)).or_insert(0) += 1;
            adj[a].insert(b);
            adj[b].insert(a);
        };
        for v in (1..=n).filter(|&v| ok(v)) {
            add(2 * v, 2 * v + 1);
        }
        for &(u, v) in &self.edges {
            if ok(u) && ok(v) {
                add(2 * u + 1, 2 * v);
                add(2 * v + 1, 2 * u);
            }
        }
        for &s in sources.iter().filter(|&&s| ok(s)) {
            add(src, 2 * s);
        }
        for &t in targets {
            add(2 * t + 1, sink);
        }
        let mut flow: BTreeMap<(usize, usize), i32> = BTreeMap::new();
        let residual = |flow: &BTreeMap<(usize, usize), i32>, a: usize, b: usize| {
            cap.get(&(a, b)).copied().unwrap_or(0) - flow.get(&(a, b)).copied().unwrap_or(0)
                + flow.get(&(b, a)).copied().unwrap_or(0)
        };
        for _ in 0..targets.len() {
            let mut prev = vec![usize::MAX; 2 * n + 2];
            prev[src] = src;
            let mut queue = VecDeque::from([src]);
            while let Some(a) = queue.pop_front() {
                for &b in &adj[a] {
                    if prev[b] == usize::MAX && residual(&flow, a, b) > 0 {
                        prev[b] = a;
                        queue.push_back(b);
                    }
                }
            }
            if prev[sink] == usize::MAX {
                return None;
            }
            let mut b = sink;
            while b != src {
                let a = prev[b];
                let back = flow.entry((b, a)).or_insert(0);
                if *back > 0 {
                    *back -= 1;
                } else {
                    *flow.entry((a, b)).or_insert(0) += 1;
                }
                b = a;
            }
        }
        let mut paths = Vec::new();
        for &t in targets {
            let mut path = vec![t];
            let mut node = 2 * t;
            while flow.get(&(src, node)).copied().unwrap_or(0) == 0 {
                let pred = adj[node]
                    .iter()
                    .copied()
                    .find(|&a| a % 2 == 1 && a > 1 && flow.get(&(a, node)).copied().unwrap_or(0) > 0)?;
                path.push(pred / 2);
                node = pred - 1;
            }
            path.reverse();
            let start = path.iter().rposition(|v| sources.contains(v))?;
            paths.push(path[start..].to_vec());
        }
        Some(paths)
    }

    /// Biconnected components as sorted vertex sets (bridges give 2-vertex
    /// blocks, isolated vertices 1-vertex blocks), plus the cut vertices.
    pub fn blocks(&self) -> (Vec<Vec<Vertex>>, BTreeSet<Vertex>) {
        let adj = self.adjacency();
        let n = self.n;
        let mut disc = vec![0usize; n + 1];
        let mut low = vec![0usize; n + 1];
        let mut timer = 0usize;
        let mut blocks: Vec<Vec<Vertex>> = Vec::new();
        let mut cuts = BTreeSet::new();
        let mut edge_stack: Vec<(Vertex, Vertex)> = Vec::new();

        for root in 1..=n {
            if disc[root] != 0 {
                continue;
            }
            if adj[root].is_empty() {
                timer += 1;
                disc[root] = timer;
                blocks.push(vec![root]);
                continue;
            }
            timer += 1;
            disc[root] = timer;
            low[root] = timer;
            let mut root_children = 0;
            // (vertex, parent, next neighbour index)
            let mut stack: Vec<(Vertex, Vertex, usize)> = vec![(root, 0, 0)];
            while let Some(&mut (v, parent, ref mut next)) = stack.last_mut() {
                if *next < adj[v].len() {
                    let w = adj[v][*next];
                    *next += 1;
                    if disc[w] == 0 {
                        timer += 1;
                        disc[w] = timer;
                        low[w] = timer;
                        edge_stack.push((v, w));
                        if v == root {
                            root_children += 1;
                        }
                        stack.push((w, v, 0));
                    } else if w != parent && disc[w] < disc[v] {
                        low[v] = low[v].min(disc[w]);
                        edge_stack.push((v, w));
                    }
                } else {
                    stack.pop();
                    if let Some(&(u, _, _)) = stack.last() {
                        low[u] = low[u].min(low[v]);
                        if low[v] >= disc[u] {
                            if u != root {
                                cuts.insert(u);
                            }
                            let mut block = BTreeSet::new();
                            while let Some((a, b)) = edge_stack.pop() {
                                block.insert(a);
                                block.insert(b);
                                if (a, b) == (u, v) {
                                    break;
                                }
                            }
                            blocks.push(block.into_iter().collect());
                        }
                    }
                }
            }
            if root_children > 1 {
                cuts.insert(root);
            }
        }
        (blocks, cuts)
    }

    /// Keeps `keep` (any order) renumbered `1..` in increasing id order.
    pub fn induced(&self, keep: &[Vertex]) -> SimpleGraph {
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut index = vec![0usize; self.n + 1];
        for (k, &v) in sorted.iter().enumerate() {
            index[v] = k + 1;
        }
        SimpleGraph::from_edges(
            sorted.len(),
            self.edges
                .iter()
                .filter(|&&(u, v)| index[u] != 0 && index[v] != 0)
                .map(|&(u, v)| (index[u], index[v])),
        )
    }

    /// Repeatedly deletes vertices of degree at most one and suppresses
    /// vertices of degree two (merging parallel edges). Returns the remaining
    /// graph renumbered; minors of minimum degree three survive.
    pub fn reduce_low_degree(&self) -> SimpleGraph {
        let mut adj: Vec<BTreeSet<Vertex>> = vec![BTreeSet::new(); self.n + 1];
        for &(u, v) in &self.edges {
            adj[u].insert(v);
            adj[v].insert(u);
        }
        let mut alive = vec![true; self.n + 1];
        let mut queue: VecDeque<Vertex> = (1..=self.n).collect();
        while let Some(v) = queue.pop_front() {
            if !alive[v] || adj[v].len() > 2 {
                continue;
            }
            alive[v] = false;
            let nbrs: Vec<Vertex> = std::mem::take(&mut adj[v]).into_iter().collect();
            for &u in &nbrs {
                adj[u].remove(&v);
            }
            if let [x, y] = nbrs[..] {
                adj[x].insert(y);
                adj[y].insert(x);
            }
            queue.extend(nbrs);
        }
        let keep: Vec<Vertex> = (1..=self.n).filter(|&v| alive[v]).collect();
        let mut index = vec![0usize; self.n + 1];
        for (k, &v) in keep.iter().enumerate() {
            index[v] = k + 1;
        }
        let mut out = SimpleGraph::new(keep.len());
        for &v in &keep {
            for &u in &adj[v] {
                out.add_edge(index[v], index[u]);
            }
        }
        out
    }

    /// Treewidth at most two, i.e. no K4 minor.
    pub fn is_series_parallel(&self) -> bool {
        self.reduce_low_degree().edge_count() == 0
    }

    /// Whether `pattern` is a minor, by enumerating branch-set partitions of
    /// vertex subsets. Exponential; meant for at most ten vertices.
    pub fn has_minor_brute_force(&self, pattern: &SimpleGraph) -> bool {
        let h = pattern.vertex_count();
        if h == 0 {
            return true;
        }
        if h > self.n || pattern.edge_count() > self.edge_count() {
            return false;
        }
        let adj = self.adjacency();
        let mut assign = vec![usize::MAX; self.n + 1];
        let quotient_ok = |assign: &[usize]| -> bool {
            let mut q = SimpleGraph::new(h);
            for &(u, v) in &self.edges {
                let (a, b) = (assign[u], assign[v]);
                if a != usize::MAX && b != usize::MAX && a != b {
                    q.add_edge(a + 1, b + 1);
                }
            }
            contains_pattern(&q, pattern)
        };
        let connected = |assign: &[usize]| -> bool {
            (0..h).all(|set| {
                let members: Vec<Vertex> = (1..=self.n).filter(|&v| assign[v] == set).collect();
                let mut seen = BTreeSet::from([members[0]]);
                let mut queue = VecDeque::from([members[0]]);
                while let Some(a) = queue.pop_front() {
                    for &b in &adj[a] {
                        if assign[b] == set && seen.insert(b) {
                            queue.push_back(b);
                        }
                    }
                }
                seen.len() == members.len()
            })
        };
        fn rec(
            v: usize,
            n: usize,
            used: usize,
            h: usize,
            assign: &mut Vec<usize>,
            done: &mut dyn FnMut(&[usize]) -> bool,
        ) -> bool {
            if h - used > n + 1 - v {
                return false;
            }
            if v > n {
                return used == h && done(assign);
            }
            assign[v] = usize::MAX;
            if rec(v + 1, n, used, h, assign, done) {
                return true;
            }
            for set in 0..used.min(h) {
                assign[v] = set;
                if rec(v + 1, n, used, h, assign, done) {
                    return true;
                }
            }
            if used < h {
                assign[v] = used;
                if rec(v + 1, n, used + 1, h, assign, done) {
                    return true;
                }
            }
            assign[v] = usize::MAX;
            false
        }
        let mut done = |a: &[usize]| quotient_ok(a) && connected(a);
        rec(1, self.n, 0, h, &mut assign, &mut done)
    }
}

/// `q` contains `pattern` as a subgraph on the same vertex count, up to
/// relabelling. Only the patterns used here are fast-pathed.
fn contains_pattern(q: &SimpleGraph, pattern: &SimpleGraph) -> bool {
    let h = pattern.vertex_count();
    if pattern.is_complete() {
        return q.is_complete();
    }
    // Complement of the pattern is a matching (e.g. K_{2,2,2}): q works iff
    // its own complement is a matching that is no larger.
    let missing = |g: &SimpleGraph| -> Option<usize> {
        let mut deg = vec![0usize; h + 1];
        let mut count = 0;
        for u in 1..=h {
            for v in u + 1..=h {
                if !g.has_edge(u, v) {
                    deg[u] += 1;
                    deg[v] += 1;
                    count += 1;
                }
            }
        }
        deg.iter().all(|&d| d <= 1).then_some(count)
    };
    if let Some(m) = missing(pattern) {
        return missing(q).is_some_and(|k| k <= m);
    }
    let mut perm: Vec<Vertex> = (1..=h).collect();
    loop {
        if pattern.edges().all(|(u, v)| q.has_edge(perm[u - 1], perm[v - 1])) {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

fn next_permutation(p: &mut [Vertex]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else { return false };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn menger_paths() {
        // cycle 1-2-3-4, tail 4-5-6 and 2-7-6
        let g = SimpleGraph::from_edges(7, [(1, 2), (2, 3), (3, 4), (4, 1), (4, 5), (5, 6), (2, 7), (7, 6)]);
        let paths = g.disjoint_paths(&[1, 2, 3, 4], &[5, 7], &[6]).unwrap();
        assert_eq!(paths, vec![vec![4, 5], vec![2, 7]]);
        assert!(g.disjoint_paths(&[1, 2, 3, 4], &[5, 7], &[2]).is_none());
        let p = g.disjoint_paths(&[1], &[1, 3], &[]);
        assert!(p.is_none());
        let p = g.disjoint_paths(&[1, 2], &[1, 6], &[]).unwrap();
        assert_eq!(p[0], vec![1]);
        assert_eq!(p[1].first(), Some(&2));
    }

    #[test]
    fn components_and_cycles() {
        let g = SimpleGraph::from_edges(5, [(1, 2), (2, 3), (4, 5)]);
        assert_eq!(g.components(), vec![vec![1, 2, 3], vec![4, 5]]);
        assert!(!g.has_cycle());
        assert!(SimpleGraph::cycle(4).has_cycle());
        assert!(SimpleGraph::new(1).is_connected());
        assert!(!SimpleGraph::new(0).is_connected());
    }

    #[test]
    fn blocks_of_bowtie() {
        let g = SimpleGraph::from_edges(5, [(1, 2), (2, 3), (1, 3), (3, 4), (4, 5), (3, 5)]);
        let (mut blocks, cuts) = g.blocks();
        blocks.sort();
        assert_eq!(blocks, vec![vec![1, 2, 3], vec![3, 4, 5]]);
        assert_eq!(cuts, BTreeSet::from([3]));
    }

    #[test]
    fn blocks_with_bridges_and_isolated() {
        let g = SimpleGraph::from_edges(5, [(1, 2), (2, 3)]);
        let (mut blocks, cuts) = g.blocks();
        blocks.sort();
        assert_eq!(blocks, vec![vec![1, 2], vec![2, 3], vec![4], vec![5]]);
        assert_eq!(cuts, BTreeSet::from([2]));
    }

    #[test]
    fn series_parallel() {
        assert!(SimpleGraph::complete(3).is_series_parallel());
        assert!(!SimpleGraph::complete(4).is_series_parallel());
        assert!(SimpleGraph::complete_multipartite(&[2, 3]).is_series_parallel());
        assert!(!SimpleGraph::complete_multipartite(&[3, 3]).is_series_parallel());
        assert!(SimpleGraph::cycle(6).is_series_parallel());
        // K4 subdivided
        let g = SimpleGraph::from_edges(5, [(1, 2), (1, 3), (1, 5), (5, 4), (2, 3), (2, 4), (3, 4)]);
        assert!(!g.is_series_parallel());
    }

    #[test]
    fn brute_force_minors() {
        let k222 = SimpleGraph::complete_multipartite(&[2, 2, 2]);
        assert_eq!(k222.edge_count(), 12);
        assert!(!k222.has_minor_brute_force(&SimpleGraph::complete(5)));
        assert!(k222.has_minor_brute_force(&k222));
        assert!(k222.has_minor_brute_force(&SimpleGraph::complete(4)));
        assert!(SimpleGraph::complete(6).has_minor_brute_force(&k222));
        assert!(!SimpleGraph::cycle(5).has_minor_brute_force(&SimpleGraph::complete(4)));
        // Petersen has a K5 minor.
        let petersen = SimpleGraph::from_edges(
            10,
            [
                (1, 2), (2, 3), (3, 4), (4, 5), (5, 1),
                (1, 6), (2, 7), (3, 8), (4, 9), (5, 10),
                (6, 8), (8, 10), (10, 7), (7, 9), (9, 6),
            ],
        );
        assert!(petersen.has_minor_brute_force(&SimpleGraph::complete(5)));
    }

    #[test]
    fn brute_force_agrees_with_reduction_for_k4() {
        let k4 = SimpleGraph::complete(4);
        let graphs = [
            SimpleGraph::cycle(5),
            SimpleGraph::complete(5),
            SimpleGraph::complete_multipartite(&[2, 3]),
            SimpleGraph::complete_multipartite(&[1, 1, 3]),
            SimpleGraph::from_edges(6, [(1, 2), (2, 3), (3, 1), (3, 4), (4, 5), (5, 6), (6, 4)]),
        ];
        for g in graphs {
            assert_eq!(g.has_minor_brute_force(&k4), !g.is_series_parallel(), "{g:?}");
        }
    }

    #[test]
    fn shortest_path_avoids_blocked() {
        let g = SimpleGraph::cycle(5);
        assert_eq!(g.shortest_path(1, 3, &[2]), Some(vec![1, 5, 4, 3]));
        assert_eq!(g.shortest_path(1, 3, &[2, 4]), None);
    }
}
