//! Input graphs, DFS trees, the edge-splitting transform and the sorted views.

use std::collections::HashSet;
use std::fmt;

/// Vertex identifier. DFS trees number vertices `1..=n` in preorder.
pub type Vertex = u32;

/// Sentinel for an absent vertex in NIL-coded tables.
pub const NIL: Vertex = 0;

/// Decode a NIL-coded vertex.
#[inline]
pub fn opt(v: Vertex) -> Option<Vertex> {
    if v == NIL {
        None
    } else {
        Some(v)
    }
}

/// Encode an optional vertex as NIL-coded.
#[inline]
pub fn nil(v: Option<Vertex>) -> Vertex {
    v.unwrap_or(NIL)
}

/// Errors raised while loading a graph.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("empty graph: at least one vertex is required")]
    Empty,
    #[error("disconnected graph: vertices {a} and {b} are not connected")]
    Disconnected { a: Vertex, b: Vertex },
    #[error("vertex {v} is out of range 1..={n}")]
    OutOfRange { v: u64, n: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A connected simple undirected graph on vertices `1..=n`.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    adj: Vec<Vec<Vertex>>,
    self_loops: usize,
    duplicates: usize,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph {{ n: {}, edges: {:?} }}", self.n, self.edges)
    }
}

impl Graph {
    /// Load `n` vertices and an edge list, dropping self-loops and parallel edges.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Graph, GraphError> {
        let g = Graph::unchecked(n, edges)?;
        if let Some((a, b)) = g.unreachable_pair() {
            return Err(GraphError::Disconnected { a, b });
        }
        Ok(g)
    }

    /// Load an edge list, taking `n` as the largest vertex id.
    pub fn from_edge_list(edges: &[(Vertex, Vertex)]) -> Result<Graph, GraphError> {
        let n = edges.iter().map(|&(a, b)| a.max(b)).max().unwrap_or(0) as usize;
        Graph::new(n, edges.iter().copied())
    }

    /// Normalize without the connectivity check. Generators use this to test candidates.
    pub fn unchecked(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Graph, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        let mut adj = vec![Vec::new(); n + 1];
        let (mut self_loops, mut duplicates) = (0, 0);
        for (a, b) in edges {
            for v in [a, b] {
                if v == 0 || v as usize > n {
                    return Err(GraphError::OutOfRange { v: v as u64, n });
                }
            }
            if a == b {
                self_loops += 1;
                continue;
            }
            if !seen.insert((a.min(b), a.max(b))) {
                duplicates += 1;
                continue;
            }
            list.push((a, b));
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        Ok(Graph { n, edges: list, adj, self_loops, duplicates })
    }

    /// Parse the text format: a header `n m`, then `u v` or `e u v` per line.
    /// Blank lines and lines starting with `#`, `c` or `%` are ignored.
    pub fn parse(text: &str) -> Result<Graph, GraphError> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with(['#', 'c', '%']) {
                continue;
            }
            let err = |msg: String| GraphError::Parse { line: i + 1, msg };
            let mut toks: Vec<&str> = line.split_whitespace().collect();
            if header.is_none() {
                if toks[0] == "p" && toks.len() == 4 {
                    toks.drain(..2);
                }
                if toks.len() != 2 {
                    return Err(err(format!("expected header `n m`, found `{line}`")));
                }
                let n = toks[0].parse::<usize>().map_err(|e| err(format!("bad vertex count: {e}")))?;
                let m = toks[1].parse::<usize>().map_err(|e| err(format!("bad edge count: {e}")))?;
                header = Some((n, m));
                continue;
            }
            if toks[0] == "e" {
                toks.remove(0);
            }
            if toks.len() != 2 {
                return Err(err(format!("expected edge `u v`, found `{line}`")));
            }
            let mut ends = [0 as Vertex; 2];
            for (slot, tok) in ends.iter_mut().zip(&toks) {
                *slot = tok.parse::<Vertex>().map_err(|e| err(format!("bad vertex `{tok}`: {e}")))?;
            }
            edges.push((ends[0], ends[1]));
        }
        let (n, m) = header.ok_or(GraphError::Empty)?;
        if edges.len() != m {
            return Err(GraphError::Parse { line: 1, msg: format!("header declares {m} edges but {} were listed", edges.len()) });
        }
        Graph::new(n, edges)
    }

    /// Render in the text format accepted by [`Graph::parse`].
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for &(a, b) in &self.edges {
            s.push_str(&format!("{a} {b}\n"));
        }
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges after normalization, in input order.
    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    /// Neighbors of `v` in input order.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v as usize]
    }

    /// Number of self-loops dropped during normalization.
    pub fn dropped_self_loops(&self) -> usize {
        self.self_loops
    }

    /// Number of parallel edges dropped during normalization.
    pub fn dropped_duplicates(&self) -> usize {
        self.duplicates
    }

    /// Whether the graph is connected.
    pub fn is_connected(&self) -> bool {
        self.unreachable_pair().is_none()
    }

    fn unreachable_pair(&self) -> Option<(Vertex, Vertex)> {
        let mut seen = vec![false; self.n + 1];
        let mut stack = vec![1 as Vertex];
        seen[1] = true;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push(w);
                }
            }
        }
        (2..=self.n).find(|&v| !seen[v]).map(|v| (1, v as Vertex))
    }
}

/// A rooted DFS tree numbered in preorder, with its back-edges.
///
/// Vertex `v` has descendants `v..v + nd(v)`. The root is `1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DfsTree {
    parent: Vec<Vertex>,
    nd: Vec<u32>,
    depth: Vec<u32>,
    child_off: Vec<u32>,
    child: Vec<Vertex>,
    up_off: Vec<u32>,
    up: Vec<Vertex>,
    down_off: Vec<u32>,
    down: Vec<Vertex>,
}

fn csr(n: usize, pairs: &[(Vertex, Vertex)]) -> (Vec<u32>, Vec<Vertex>) {
    let mut off = vec![0u32; n + 2];
    for &(k, _) in pairs {
        off[k as usize + 1] += 1;
    }
    for i in 1..off.len() {
        off[i] += off[i - 1];
    }
    let mut fill = off.clone();
    let mut out = vec![NIL; pairs.len()];
    for &(k, v) in pairs {
        out[fill[k as usize] as usize] = v;
        fill[k as usize] += 1;
    }
    (off, out)
}

impl DfsTree {
    /// Number a rooted tree in preorder. `children[l]` lists the children of
    /// label `l` in visiting order; `back` lists non-tree edges as label pairs.
    /// Returns the tree and the map from label to number.
    pub fn from_rooted(root: usize, children: &[Vec<usize>], back: &[(usize, usize)]) -> (DfsTree, Vec<Vertex>) {
        let labels = children.len();
        let mut num = vec![NIL; labels];
        let mut order = Vec::with_capacity(labels);
        let mut stack = vec![root];
        while let Some(l) = stack.pop() {
            order.push(l);
            num[l] = order.len() as Vertex;
            for &c in children[l].iter().rev() {
                stack.push(c);
            }
        }
        let n = order.len();
        let mut parent = vec![NIL; n + 1];
        let mut depth = vec![0u32; n + 1];
        let mut pairs = Vec::with_capacity(n);
        for &l in &order {
            let v = num[l];
            for &c in &children[l] {
                parent[num[c] as usize] = v;
                pairs.push((v, num[c]));
            }
        }
        for v in 2..=n {
            depth[v] = depth[parent[v] as usize] + 1;
        }
        let mut nd = vec![1u32; n + 1];
        nd[0] = 0;
        for v in (2..=n).rev() {
            nd[parent[v] as usize] += nd[v];
        }
        let (child_off, child) = csr(n, &pairs);
        let mut ups: Vec<(Vertex, Vertex)> = back
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (num[a], num[b]);
                (x.max(y), x.min(y))
            })
            .collect();
        ups.sort_unstable();
        let (up_off, up) = csr(n, &ups);
        let mut downs: Vec<(Vertex, Vertex)> = ups.iter().map(|&(x, y)| (y, x)).collect();
        downs.sort_unstable();
        let (down_off, down) = csr(n, &downs);
        let tree = DfsTree { parent, nd, depth, child_off, child, up_off, up, down_off, down };
        (tree, num)
    }

    /// Depth-first search over `adj` (labels `0..adj.len()`) from `start`,
    /// visiting neighbors in list order. The graph must be connected and simple.
    pub fn search(adj: &[Vec<usize>], start: usize) -> (DfsTree, Vec<Vertex>) {
        let labels = adj.len();
        let mut parent = vec![usize::MAX; labels];
        let mut visited = vec![false; labels];
        let mut children = vec![Vec::new(); labels];
        let mut order = vec![0usize; labels];
        let mut stamp = 0;
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        visited[start] = true;
        order[start] = stamp;
        while let Some(top) = stack.last_mut() {
            let (v, i) = *top;
            if i < adj[v].len() {
                top.1 += 1;
                let w = adj[v][i];
                if !visited[w] {
                    visited[w] = true;
                    stamp += 1;
                    order[w] = stamp;
                    parent[w] = v;
                    children[v].push(w);
                    stack.push((w, 0));
                }
            } else {
                stack.pop();
            }
        }
        let mut back = Vec::new();
        for v in 0..labels {
            for &w in &adj[v] {
                if order[v] > order[w] && parent[v] != w {
                    back.push((v, w));
                }
            }
        }
        DfsTree::from_rooted(start, &children, &back)
    }

    /// Renumber with every children list stably sorted by `key` (ascending).
    /// Returns the permuted tree, the map old→new and the map new→old.
    pub fn permuted(&self, key: &[u32]) -> (DfsTree, Vec<Vertex>, Vec<Vertex>) {
        let n = self.n();
        let max_key = (1..=n).map(|v| key[v]).max().unwrap_or(0) as usize;
        // Counting sort of all non-root vertices by key, stable in base order.
        let mut count = vec![0usize; max_key + 2];
        for v in 2..=n {
            count[key[v] as usize + 1] += 1;
        }
        for i in 1..count.len() {
            count[i] += count[i - 1];
        }
        let mut sorted = vec![0usize; n.saturating_sub(1)];
        for v in 2..=n {
            let k = key[v] as usize;
            sorted[count[k]] = v;
            count[k] += 1;
        }
        let mut children = vec![Vec::new(); n];
        for &v in &sorted {
            children[self.parent[v] as usize - 1].push(v - 1);
        }
        let back: Vec<(usize, usize)> = self.back_edges().map(|(x, y)| (x as usize - 1, y as usize - 1)).collect();
        let (tree, num) = DfsTree::from_rooted(0, &children, &back);
        let mut to_new = vec![NIL; n + 1];
        let mut to_old = vec![NIL; n + 1];
        for old in 1..=n {
            to_new[old] = num[old - 1];
            to_old[num[old - 1] as usize] = old as Vertex;
        }
        (tree, to_new, to_old)
    }

    /// Number of vertices.
    #[inline]
    pub fn n(&self) -> usize {
        self.parent.len() - 1
    }

    /// Parent of `v`, or [`NIL`] for the root.
    #[inline]
    pub fn parent(&self, v: Vertex) -> Vertex {
        self.parent[v as usize]
    }

    /// Subtree size of `v`.
    #[inline]
    pub fn nd(&self, v: Vertex) -> u32 {
        self.nd[v as usize]
    }

    #[inline]
    pub fn depth(&self, v: Vertex) -> u32 {
        self.depth[v as usize]
    }

    /// Whether `a` is an ancestor of `b` (reflexive). False if either is NIL.
    #[inline]
    pub fn is_ancestor(&self, a: Vertex, b: Vertex) -> bool {
        a != NIL && b != NIL && a <= b && b < a + self.nd[a as usize]
    }

    /// Children of `v` in increasing order.
    #[inline]
    pub fn children(&self, v: Vertex) -> &[Vertex] {
        let (s, e) = (self.child_off[v as usize], self.child_off[v as usize + 1]);
        &self.child[s as usize..e as usize]
    }

    /// Lower endpoints of back-edges whose higher endpoint is `x`, ascending.
    #[inline]
    pub fn ups(&self, x: Vertex) -> &[Vertex] {
        let (s, e) = (self.up_off[x as usize], self.up_off[x as usize + 1]);
        &self.up[s as usize..e as usize]
    }

    /// Higher endpoints of back-edges whose lower endpoint is `y`, ascending.
    #[inline]
    pub fn downs(&self, y: Vertex) -> &[Vertex] {
        let (s, e) = (self.down_off[y as usize], self.down_off[y as usize + 1]);
        &self.down[s as usize..e as usize]
    }

    /// All back-edges `(x, y)` with `x` the higher endpoint, sorted by `x` then `y`.
    pub fn back_edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        (1..=self.n() as Vertex).flat_map(move |x| self.ups(x).iter().map(move |&y| (x, y)))
    }

    /// Number of back-edges.
    pub fn back_edge_count(&self) -> usize {
        self.up.len()
    }

    /// The child of `v` whose subtree contains `u`, for `v` a proper ancestor of `u`.
    pub fn child_toward(&self, v: Vertex, u: Vertex) -> Vertex {
        debug_assert!(v != u && self.is_ancestor(v, u), "{v} is not a proper ancestor of {u}");
        let ch = self.children(v);
        let i = ch.partition_point(|&c| c <= u);
        ch[i - 1]
    }

    /// Machine words held by this tree.
    pub fn words(&self) -> usize {
        self.parent.len()
            + self.nd.len()
            + self.depth.len()
            + self.child_off.len()
            + self.child.len()
            + self.up_off.len()
            + self.up.len()
            + self.down_off.len()
            + self.down.len()
    }
}

/// Provenance of a vertex of the transformed graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexKind {
    /// An input vertex, with its original id.
    Real(Vertex),
    /// The artificial root attached above the DFS start vertex.
    AuxRoot,
    /// Splits the tree edge between original vertices `parent` and `child`.
    AuxTreeSplit { parent: Vertex, child: Vertex },
    /// Splits the back-edge between original vertices `high` (deeper) and `low`.
    AuxBackSplit { high: Vertex, low: Vertex },
}

impl VertexKind {
    pub fn is_real(self) -> bool {
        matches!(self, VertexKind::Real(_))
    }
}

/// The graph after attaching an artificial root and splitting every edge
/// except the root edge. Vertices are labelled `0..len()`.
#[derive(Clone, Debug)]
pub struct TransformedGraph {
    adj: Vec<Vec<usize>>,
    kind: Vec<VertexKind>,
    real_label: Vec<usize>,
    root_label: usize,
    start: Vertex,
    tree_splits: usize,
    back_splits: usize,
}

/// Attach an artificial root above the lowest vertex and split every edge.
///
/// The split vertices are ordered in the adjacency lists so that a DFS from
/// the root visits tree-split children before back-split children, and no
/// back-split vertex is entered from its lower endpoint.
pub fn split_transform(g: &Graph) -> TransformedGraph {
    let n = g.n();
    let adj0: Vec<Vec<usize>> = (1..=n).map(|v| g.neighbors(v as Vertex).iter().map(|&w| w as usize - 1).collect()).collect();
    let (t0, num0) = DfsTree::search(&adj0, 0);
    let mut orig_of = vec![0usize; n + 1];
    for (label, &v) in num0.iter().enumerate() {
        orig_of[v as usize] = label;
    }
    let root_label = n;
    let mut kind: Vec<VertexKind> = (1..=n).map(|v| VertexKind::Real(v as Vertex)).collect();
    kind.push(VertexKind::AuxRoot);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    adj[root_label].push(0);
    // Tree-edge splitters, one per non-root vertex of the first DFS tree.
    let mut split_above = vec![usize::MAX; n];
    for v in 2..=n as Vertex {
        let (c, p) = (orig_of[v as usize], orig_of[t0.parent(v) as usize]);
        let z = kind.len();
        kind.push(VertexKind::AuxTreeSplit { parent: p as Vertex + 1, child: c as Vertex + 1 });
        adj.push(vec![p, c]);
        split_above[c] = z;
    }
    let tree_splits = kind.len() - n - 1;
    adj[0].push(root_label);
    for v in 2..=n {
        let c = orig_of[v];
        adj[c].push(split_above[c]);
    }
    for v in 1..=n as Vertex {
        let l = orig_of[v as usize];
        for &c in t0.children(v) {
            adj[l].push(split_above[orig_of[c as usize]]);
        }
    }
    let mut lower_side: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (x, y) in t0.back_edges() {
        let (hx, ly) = (orig_of[x as usize], orig_of[y as usize]);
        let b = kind.len();
        kind.push(VertexKind::AuxBackSplit { high: hx as Vertex + 1, low: ly as Vertex + 1 });
        adj.push(vec![hx, ly]);
        adj[hx].push(b);
        lower_side[ly].push(b);
    }
    for (l, list) in lower_side.into_iter().enumerate() {
        adj[l].extend(list);
    }
    let back_splits = kind.len() - n - 1 - tree_splits;
    TransformedGraph { adj, kind, real_label: (0..n).collect(), root_label, start: 1, tree_splits, back_splits }
}

impl TransformedGraph {
    /// Number of vertices including aux vertices.
    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adj
    }

    pub fn kind(&self, label: usize) -> VertexKind {
        self.kind[label]
    }

    /// Label of original vertex `v`.
    pub fn label_of(&self, v: Vertex) -> usize {
        self.real_label[v as usize - 1]
    }

    pub fn root_label(&self) -> usize {
        self.root_label
    }

    /// The original vertex the first DFS starts from.
    pub fn start(&self) -> Vertex {
        self.start
    }

    pub fn tree_splits(&self) -> usize {
        self.tree_splits
    }

    pub fn back_splits(&self) -> usize {
        self.back_splits
    }
}

/// The DFS tree of a transformed graph with per-number provenance.
#[derive(Clone, Debug)]
pub struct SplitTree {
    pub tree: DfsTree,
    /// Provenance per DFS number (index 0 unused).
    pub kind: Vec<VertexKind>,
    /// DFS number of each original vertex (index 0 unused).
    pub real_num: Vec<Vertex>,
}

/// Run the DFS of the transformed graph from its artificial root.
pub fn run_dfs(tg: &TransformedGraph) -> SplitTree {
    let (tree, num) = DfsTree::search(tg.adjacency(), tg.root_label());
    let mut kind = vec![VertexKind::AuxRoot; tree.n() + 1];
    let mut real_num = vec![NIL; tg.real_label.len() + 1];
    for label in 0..tg.len() {
        kind[num[label] as usize] = tg.kind(label);
        if let VertexKind::Real(v) = tg.kind(label) {
            real_num[v as usize] = num[label];
        }
    }
    SplitTree { tree, kind, real_num }
}

/// One renumbered permutation of the base tree.
#[derive(Clone, Debug)]
pub struct View {
    pub tree: DfsTree,
    /// Base number → view number.
    pub to_view: Vec<Vertex>,
    /// View number → base number.
    pub to_base: Vec<Vertex>,
}

impl View {
    /// View number of a NIL-coded base vertex.
    #[inline]
    pub fn v(&self, base: Vertex) -> Vertex {
        self.to_view[base as usize]
    }

    /// Base number of a NIL-coded view vertex.
    #[inline]
    pub fn b(&self, view: Vertex) -> Vertex {
        self.to_base[view as usize]
    }

    /// Translate a base-indexed NIL-coded vertex table into view numbering.
    pub fn import(&self, base_table: &[Vertex]) -> Vec<Vertex> {
        let mut out = vec![NIL; base_table.len()];
        for (bv, &val) in base_table.iter().enumerate().skip(1) {
            out[self.to_view[bv] as usize] = self.to_view[val as usize];
        }
        out
    }

    /// Translate a view-indexed NIL-coded vertex table into base numbering.
    pub fn export(&self, view_table: &[Vertex]) -> Vec<Vertex> {
        let mut out = vec![NIL; view_table.len()];
        for (vv, &val) in view_table.iter().enumerate().skip(1) {
            out[self.to_base[vv] as usize] = self.to_base[val as usize];
        }
        out
    }
}

/// Which permutation of the base tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViewKind {
    /// Children sorted by increasing `low`, absent last.
    LowInc,
    /// Children sorted by decreasing `high`, absent last.
    HighDec,
}

/// The base tree with its two sorted permutations.
#[derive(Clone, Debug)]
pub struct DfsForestViews {
    pub base: DfsTree,
    pub low_inc: View,
    pub high_dec: View,
}

impl DfsForestViews {
    pub fn view(&self, k: ViewKind) -> &View {
        match k {
            ViewKind::LowInc => &self.low_inc,
            ViewKind::HighDec => &self.high_dec,
        }
    }
}

/// Build the two sorted views from base-numbered `low1` and `high1` tables.
pub fn build_views(base: DfsTree, low1: &[Vertex], high1: &[Vertex]) -> DfsForestViews {
    let n = base.n() as u32;
    let low_key: Vec<u32> = low1.iter().map(|&l| if l == NIL { n + 1 } else { l }).collect();
    let high_key: Vec<u32> = high1.iter().map(|&h| if h == NIL { n + 1 } else { n - h }).collect();
    let make = |key: &[u32]| {
        let (tree, to_view, to_base) = base.permuted(key);
        View { tree, to_view, to_base }
    };
    let low_inc = make(&low_key);
    let high_dec = make(&high_key);
    DfsForestViews { base, low_inc, high_dec }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: u32) -> Graph {
        Graph::new(n as usize, (1..=n).map(|i| (i, i % n + 1))).unwrap()
    }

    #[test]
    fn load_normalizes() {
        let g = Graph::from_edge_list(&[(1, 2), (2, 3), (3, 1)]).unwrap();
        assert_eq!((g.n(), g.m()), (3, 3));
        let g = Graph::from_edge_list(&[(1, 2), (1, 2), (2, 2), (2, 3)]).unwrap();
        assert_eq!((g.n(), g.m()), (3, 2));
        assert_eq!((g.dropped_self_loops(), g.dropped_duplicates()), (1, 1));
        assert!(matches!(Graph::from_edge_list(&[(1, 2), (3, 4)]), Err(GraphError::Disconnected { .. })));
        assert_eq!(Graph::from_edge_list(&[]), Err(GraphError::Empty));
        assert!(Graph::new(1, []).is_ok());
    }

    #[test]
    fn parse_formats() {
        let g = Graph::parse("3 2\n1 2\ne 2 3\n").unwrap();
        assert_eq!(g.edges(), &[(1, 2), (2, 3)]);
        let g = Graph::parse("c comment\np edge 3 2\ne 1 2\ne 2 3\n").unwrap();
        assert_eq!(g.m(), 2);
        assert!(matches!(Graph::parse("3 2\n1 x\n"), Err(GraphError::Parse { line: 2, .. })));
        assert!(matches!(Graph::parse("3 3\n1 2\n2 3\n"), Err(GraphError::Parse { .. })));
        assert_eq!(Graph::parse(&cycle(5).to_text()).unwrap(), cycle(5));
    }

    #[test]
    fn dfs_on_path_and_cycle() {
        let adj = vec![vec![1], vec![0, 2], vec![1]];
        let (t, _) = DfsTree::search(&adj, 0);
        assert_eq!((t.parent(2), t.parent(3), t.nd(1)), (1, 2, 3));
        let adj = vec![vec![1, 3], vec![0, 2], vec![1, 3], vec![2, 0]];
        let (t, _) = DfsTree::search(&adj, 0);
        assert_eq!(t.back_edges().collect::<Vec<_>>(), vec![(4, 1)]);
        assert_eq!(t.children(3), &[4]);
    }

    #[test]
    fn child_toward_on_path() {
        let adj = vec![vec![1], vec![0, 2], vec![1, 3], vec![2]];
        let (t, _) = DfsTree::search(&adj, 0);
        assert_eq!(t.child_toward(1, 4), 2);
        assert_eq!(t.child_toward(3, 4), 4);
    }

    fn transform_counts(g: &Graph) -> (usize, usize, usize) {
        let tg = split_transform(g);
        (tg.len(), tg.tree_splits(), tg.back_splits())
    }

    #[test]
    fn transform_vertex_counts() {
        // n' = n + 1 + (tree edges not above the start vertex) + (back-edges).
        let tri = Graph::from_edge_list(&[(1, 2), (2, 3), (3, 1)]).unwrap();
        assert_eq!(transform_counts(&tri), (7, 2, 1));
        let star = Graph::from_edge_list(&[(1, 2), (1, 3), (1, 4)]).unwrap();
        assert_eq!(transform_counts(&star), (8, 3, 0));
        let edge = Graph::from_edge_list(&[(1, 2)]).unwrap();
        assert_eq!(transform_counts(&edge), (4, 1, 0));
    }

    #[test]
    fn transformed_tree_satisfies_assumptions() {
        let g = Graph::from_edge_list(&[(1, 2), (2, 3), (3, 1), (3, 4), (4, 1), (2, 4)]).unwrap();
        let tg = split_transform(&g);
        let st = run_dfs(&tg);
        let t = &st.tree;
        assert_eq!(st.kind[1], VertexKind::AuxRoot);
        assert_eq!(st.kind[2], VertexKind::Real(1));
        for v in 2..=t.n() as Vertex {
            let p = t.parent(v);
            assert!(!(st.kind[v as usize].is_real() && st.kind[p as usize].is_real() && p != 1));
        }
        for (x, y) in t.back_edges() {
            assert!(t.children(x).is_empty());
            assert!(matches!(st.kind[x as usize], VertexKind::AuxBackSplit { .. }));
            assert!(st.kind[y as usize].is_real());
            assert!(t.is_ancestor(y, x));
        }
        // Back-split children come after tree-split children.
        for v in 1..=t.n() as Vertex {
            let kinds: Vec<bool> = t.children(v).iter().map(|&c| matches!(st.kind[c as usize], VertexKind::AuxBackSplit { .. })).collect();
            assert!(kinds.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn views_sort_children() {
        // Root 1 with children 2, 3, 4.
        let children = vec![vec![1, 2, 3], vec![], vec![], vec![]];
        let (t, _) = DfsTree::from_rooted(0, &children, &[]);
        let low = vec![NIL, NIL, 3, NIL, 1];
        let high = vec![NIL, NIL, 2, NIL, 4];
        let views = build_views(t, &low, &high);
        let order = |v: &View| v.tree.children(1).iter().map(|&c| v.b(c)).collect::<Vec<_>>();
        assert_eq!(order(&views.low_inc), vec![4, 2, 3]);
        assert_eq!(order(&views.high_dec), vec![4, 2, 3]);
        let high = vec![NIL, NIL, 2, NIL, 1];
        let views = build_views(views.base, &low, &high);
        assert_eq!(order(&views.high_dec), vec![2, 4, 3]);
    }
}
