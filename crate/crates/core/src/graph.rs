//! Symmetric directed graphs, walks, spanning trees and tree bases of closed walks.

use std::collections::{HashMap, VecDeque};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

pub type VertexId = usize;

/// Default cap on the number of enumerated closed walks.
pub const DEFAULT_WALK_CAP: usize = 5_000_000;

/// Finite window of the square lattice. Vertex `(x, y)` has index `x * height + y`,
/// so index order is lexicographic order of coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Lattice {
    pub width: usize,
    pub height: usize,
}

/// Lattice directions: `Horizontal` is v1 = (1,0), `Vertical` is v2 = (0,1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Direction {
    Horizontal,
    Vertical,
}

impl Lattice {
    pub fn vertex(&self, x: usize, y: usize) -> VertexId {
        x * self.height + y
    }

    pub fn coords(&self, v: VertexId) -> (usize, usize) {
        (v / self.height, v % self.height)
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x < self.width && y < self.height
    }

    /// Lower-left corners of all faces in row-major order.
    pub fn faces(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity((self.width - 1) * (self.height - 1));
        for y in 0..self.height - 1 {
            for x in 0..self.width - 1 {
                out.push((x, y));
            }
        }
        out
    }

    /// Clockwise face f_x = (x → x+v2 → x+v1+v2 → x+v1 → x).
    pub fn face(&self, x: usize, y: usize) -> Walk {
        Walk::from_vertices(vec![
            self.vertex(x, y),
            self.vertex(x, y + 1),
            self.vertex(x + 1, y + 1),
            self.vertex(x + 1, y),
            self.vertex(x, y),
        ])
    }

    /// e_{x,i} = (x → x+v_i → x), if it fits in the window.
    pub fn two_cycle(&self, x: usize, y: usize, dir: Direction) -> Option<Walk> {
        let (nx, ny) = match dir {
            Direction::Horizontal => (x + 1, y),
            Direction::Vertical => (x, y + 1),
        };
        if !self.contains(x, y) || !self.contains(nx, ny) {
            return None;
        }
        let a = self.vertex(x, y);
        Some(Walk::from_vertices(vec![a, self.vertex(nx, ny), a]))
    }

    /// All 2-cycles e_{x,i} keyed by base point and direction.
    pub fn two_cycles(&self) -> Vec<((usize, usize), Direction)> {
        let mut out = Vec::new();
        for x in 0..self.width {
            for y in 0..self.height {
                if x + 1 < self.width {
                    out.push(((x, y), Direction::Horizontal));
                }
                if y + 1 < self.height {
                    out.push(((x, y), Direction::Vertical));
                }
            }
        }
        out
    }
}

/// Symmetric, connected, loop-free directed graph in compressed adjacency form.
#[derive(Debug, Clone)]
pub struct DirectedGraph {
    labels: Vec<String>,
    index: HashMap<String, VertexId>,
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    max_out_degree: usize,
    boundary: Option<Vec<bool>>,
    lattice: Option<Lattice>,
}

/// Validates and builds a graph from labeled arcs. Vertices are numbered in
/// order of first appearance.
pub fn build_graph<S: AsRef<str>>(arcs: &[(S, S)]) -> Result<DirectedGraph> {
    let mut labels = Vec::new();
    let mut index = HashMap::new();
    let mut pairs = Vec::with_capacity(arcs.len());
    for (a, b) in arcs {
        let ia = intern(&mut labels, &mut index, a.as_ref());
        let ib = intern(&mut labels, &mut index, b.as_ref());
        pairs.push((ia, ib));
    }
    DirectedGraph::from_parts(labels, index, pairs)
}

fn intern(labels: &mut Vec<String>, index: &mut HashMap<String, VertexId>, s: &str) -> VertexId {
    if let Some(&i) = index.get(s) {
        return i;
    }
    labels.push(s.to_string());
    index.insert(s.to_string(), labels.len() - 1);
    labels.len() - 1
}

/// Parses "src dst" lines. Blank lines and `#` comments are skipped.
pub fn parse_arc_list(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected \"src dst\", got {line:?}"),
            });
        }
        out.push((fields[0].to_string(), fields[1].to_string()));
    }
    Ok(out)
}

/// Square lattice window with both orientations of every nearest-neighbour arc.
/// Vertices on the outer ring are flagged as boundary.
pub fn lattice_window(width: usize, height: usize) -> Result<DirectedGraph> {
    if width < 2 || height < 2 {
        return Err(Error::DimensionTooSmall { width, height });
    }
    let lat = Lattice { width, height };
    let mut labels = Vec::with_capacity(width * height);
    let mut boundary = Vec::with_capacity(width * height);
    for x in 0..width {
        for y in 0..height {
            labels.push(format!("{x},{y}"));
            boundary.push(x == 0 || y == 0 || x + 1 == width || y + 1 == height);
        }
    }
    let mut pairs = Vec::new();
    for x in 0..width {
        for y in 0..height {
            let v = lat.vertex(x, y);
            if x + 1 < width {
                pairs.push((v, lat.vertex(x + 1, y)));
                pairs.push((lat.vertex(x + 1, y), v));
            }
            if y + 1 < height {
                pairs.push((v, lat.vertex(x, y + 1)));
                pairs.push((lat.vertex(x, y + 1), v));
            }
        }
    }
    let index = labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
    let mut g = DirectedGraph::from_parts(labels, index, pairs)?;
    g.boundary = Some(boundary);
    g.lattice = Some(lat);
    Ok(g)
}

/// Window `{lo, ..., hi}` of the integer line with both end points flagged as boundary.
pub fn line_window(lo: i64, hi: i64) -> Result<DirectedGraph> {
    if hi <= lo {
        return Err(Error::DomainError(format!("line window needs lo < hi, got {lo}..{hi}")));
    }
    let labels: Vec<String> = (lo..=hi).map(|i| i.to_string()).collect();
    let n = labels.len();
    let mut pairs = Vec::with_capacity(2 * n);
    for i in 0..n - 1 {
        pairs.push((i, i + 1));
        pairs.push((i + 1, i));
    }
    let index = labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
    let mut g = DirectedGraph::from_parts(labels, index, pairs)?;
    let mut boundary = vec![false; n];
    boundary[0] = true;
    boundary[n - 1] = true;
    g.boundary = Some(boundary);
    Ok(g)
}

/// Ball of the given radius around the root of the infinite `degree`-regular tree.
/// The root is vertex 0; leaves at distance `radius` are flagged as boundary.
pub fn regular_tree_ball(degree: usize, radius: usize) -> Result<DirectedGraph> {
    if degree < 2 || radius < 1 {
        return Err(Error::DomainError(format!(
            "regular tree ball needs degree >= 2 and radius >= 1, got {degree}, {radius}"
        )));
    }
    let mut depth = vec![0usize];
    let mut pairs = Vec::new();
    let mut frontier = vec![0usize];
    for r in 0..radius {
        let mut next = Vec::new();
        for &v in &frontier {
            let children = if r == 0 { degree } else { degree - 1 };
            for _ in 0..children {
                let c = depth.len();
                depth.push(r + 1);
                pairs.push((v, c));
                pairs.push((c, v));
                next.push(c);
            }
        }
        frontier = next;
    }
    let labels: Vec<String> = (0..depth.len()).map(|i| i.to_string()).collect();
    let index = labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
    let mut g = DirectedGraph::from_parts(labels, index, pairs)?;
    g.boundary = Some(depth.iter().map(|&d| d == radius).collect());
    Ok(g)
}

impl DirectedGraph {
    fn from_parts(
        labels: Vec<String>,
        index: HashMap<String, VertexId>,
        mut pairs: Vec<(VertexId, VertexId)>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        if let Some(&(a, _)) = pairs.iter().find(|(a, b)| a == b) {
            return Err(Error::LoopPresent(labels[a].clone()));
        }
        pairs.sort_unstable();
        pairs.dedup();
        let mut offsets = vec![0usize; n + 1];
        for &(a, _) in &pairs {
            offsets[a + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets: Vec<VertexId> = pairs.iter().map(|&(_, b)| b).collect();
        let max_out_degree = (0..n).map(|v| offsets[v + 1] - offsets[v]).max().unwrap_or(0);
        let g = DirectedGraph {
            labels,
            index,
            offsets,
            targets,
            max_out_degree,
            boundary: None,
            lattice: None,
        };
        for &(a, b) in &pairs {
            if !g.has_arc(b, a) {
                return Err(Error::SymmetryViolation {
                    src: g.labels[a].clone(),
                    dst: g.labels[b].clone(),
                });
            }
        }
        let dist = bfs(&g, 0);
        if let Some(v) = dist.iter().position(|d| d.is_none()) {
            return Err(Error::Disconnected {
                from: g.labels[0].clone(),
                to: g.labels[v].clone(),
            });
        }
        Ok(g)
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.targets.len()
    }

    /// Number of undirected edges, i.e. of length-two closed walks up to rooting.
    pub fn num_edges(&self) -> usize {
        self.targets.len() / 2
    }

    /// Δ, the largest out-degree.
    pub fn max_out_degree(&self) -> usize {
        self.max_out_degree
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Out-neighbours in increasing index order.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Dense id of arc `a → b` in `0..num_arcs()`.
    pub fn arc_id(&self, a: VertexId, b: VertexId) -> Option<usize> {
        if a >= self.num_vertices() {
            return None;
        }
        self.neighbors(a)
            .binary_search(&b)
            .ok()
            .map(|i| self.offsets[a] + i)
    }

    /// First arc id leaving `v`; arcs of `v` are `arc_start(v)..arc_start(v+1)`.
    pub fn arc_start(&self, v: VertexId) -> usize {
        self.offsets[v]
    }

    pub fn has_arc(&self, a: VertexId, b: VertexId) -> bool {
        self.arc_id(a, b).is_some()
    }

    /// All arcs in id order.
    pub fn arcs(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (0..self.num_vertices()).flat_map(move |a| self.neighbors(a).iter().map(move |&b| (a, b)))
    }

    /// Undirected edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        self.arcs().filter(|(a, b)| a < b).collect()
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex(&self, label: &str) -> Result<VertexId> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::VertexUnknown(label.to_string()))
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < self.num_vertices() {
            Ok(())
        } else {
            Err(Error::VertexUnknown(v.to_string()))
        }
    }

    pub fn lattice(&self) -> Option<Lattice> {
        self.lattice
    }

    /// Boundary flags when the graph is a window into an infinite graph.
    pub fn boundary(&self) -> Option<&[bool]> {
        self.boundary.as_deref()
    }

    pub fn is_boundary(&self, v: VertexId) -> bool {
        self.boundary.as_ref().is_some_and(|b| b[v])
    }

    /// Treats the window as the whole state space: boundary flags are dropped.
    pub fn into_finite(mut self) -> Self {
        self.boundary = None;
        self
    }
}

fn bfs(g: &DirectedGraph, src: VertexId) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.num_vertices()];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap_or(0);
        for &w in g.neighbors(v) {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Graph distances from `x` to every vertex.
pub fn distances_from(g: &DirectedGraph, x: VertexId) -> Result<Vec<usize>> {
    g.check_vertex(x)?;
    // connectivity is a graph invariant, so every entry is set
    Ok(bfs(g, x).into_iter().map(|d| d.unwrap_or(usize::MAX)).collect())
}

/// Length of the shortest walk from `x` to `y`.
pub fn graph_distance(g: &DirectedGraph, x: VertexId, y: VertexId) -> Result<usize> {
    g.check_vertex(y)?;
    Ok(distances_from(g, x)?[y])
}

/// A walk (x_0, ..., x_n); its length is the number of arcs n.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Walk {
    vertices: Vec<VertexId>,
}

impl Walk {
    /// Validates that every consecutive pair is an arc of `g`.
    pub fn new(g: &DirectedGraph, vertices: Vec<VertexId>) -> Result<Walk> {
        if vertices.is_empty() {
            return Err(Error::DomainError("a walk needs at least one vertex".into()));
        }
        for &v in &vertices {
            g.check_vertex(v)?;
        }
        for w in vertices.windows(2) {
            if !g.has_arc(w[0], w[1]) {
                return Err(Error::MissingRate {
                    src: g.label(w[0]).to_string(),
                    dst: g.label(w[1]).to_string(),
                });
            }
        }
        Ok(Walk { vertices })
    }

    pub(crate) fn from_vertices(vertices: Vec<VertexId>) -> Walk {
        Walk { vertices }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() <= 1
    }

    pub fn start(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn end(&self) -> VertexId {
        self.vertices[self.vertices.len() - 1]
    }

    pub fn is_closed(&self) -> bool {
        self.start() == self.end()
    }

    pub fn is_simple(&self) -> bool {
        let mut seen: Vec<VertexId> = self.vertices.clone();
        seen.sort_unstable();
        seen.dedup();
        if self.is_closed() {
            seen.len() == self.len()
        } else {
            seen.len() == self.len() + 1
        }
    }

    pub fn arcs(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    /// `self` followed by `other`, if `other` starts where `self` ends.
    pub fn concat(&self, other: &Walk) -> Option<Walk> {
        if self.end() != other.start() {
            return None;
        }
        let mut v = self.vertices.clone();
        v.extend_from_slice(&other.vertices[1..]);
        Some(Walk { vertices: v })
    }

    pub fn labels(&self, g: &DirectedGraph) -> Vec<String> {
        self.vertices.iter().map(|&v| g.label(v).to_string()).collect()
    }
}

/// The walk traversed backwards.
pub fn reverse_walk(w: &Walk) -> Walk {
    let mut v = w.vertices.clone();
    v.reverse();
    Walk { vertices: v }
}

/// Depth-first enumeration of simple closed walks rooted at `base`. The callback
/// receives vertices and arc ids; returning `false` aborts. Returns `false` if aborted.
pub(crate) fn closed_walks_from<F>(g: &DirectedGraph, base: VertexId, max_len: usize, f: &mut F) -> bool
where
    F: FnMut(&[VertexId], &[usize]) -> bool,
{
    let mut on_path = vec![false; g.num_vertices()];
    let mut path = vec![base];
    let mut arcs = Vec::new();
    on_path[base] = true;
    dfs(g, base, max_len, &mut on_path, &mut path, &mut arcs, f)
}

fn dfs<F>(
    g: &DirectedGraph,
    base: VertexId,
    max_len: usize,
    on_path: &mut [bool],
    path: &mut Vec<VertexId>,
    arcs: &mut Vec<usize>,
    f: &mut F,
) -> bool
where
    F: FnMut(&[VertexId], &[usize]) -> bool,
{
    let v = *path.last().unwrap_or(&base);
    let start = g.arc_start(v);
    for (i, &w) in g.neighbors(v).iter().enumerate() {
        if w == base {
            if path.len() >= 2 && path.len() <= max_len {
                path.push(w);
                arcs.push(start + i);
                let keep_going = f(path, arcs);
                path.pop();
                arcs.pop();
                if !keep_going {
                    return false;
                }
            }
        } else if !on_path[w] && path.len() < max_len {
            on_path[w] = true;
            path.push(w);
            arcs.push(start + i);
            let keep_going = dfs(g, base, max_len, on_path, path, arcs, f);
            path.pop();
            arcs.pop();
            on_path[w] = false;
            if !keep_going {
                return false;
            }
        }
    }
    true
}

/// Every simple closed walk of length at most `max_len`, once per base point and
/// orientation, in lexicographic order of vertex sequences.
pub fn enumerate_simple_closed_walks(g: &DirectedGraph, max_len: usize, cap: usize) -> Result<Vec<Walk>> {
    if max_len < 2 {
        return Ok(Vec::new());
    }
    let count = AtomicUsize::new(0);
    let over = AtomicBool::new(false);
    let per_base: Vec<Vec<Walk>> = (0..g.num_vertices())
        .into_par_iter()
        .map(|base| {
            let mut out = Vec::new();
            closed_walks_from(g, base, max_len, &mut |vs, _| {
                if over.load(Ordering::Relaxed) || count.fetch_add(1, Ordering::Relaxed) >= cap {
                    over.store(true, Ordering::Relaxed);
                    return false;
                }
                out.push(Walk::from_vertices(vs.to_vec()));
                true
            });
            out
        })
        .collect();
    if over.load(Ordering::Relaxed) {
        return Err(Error::BudgetExceeded { cap });
    }
    Ok(per_base.into_iter().flatten().collect())
}

/// Spanning tree stored as a parent map; its arc set is symmetric.
#[derive(Debug, Clone, Serialize)]
pub struct SpanningTree {
    root: VertexId,
    parent: Vec<Option<VertexId>>,
    depth: Vec<usize>,
}

/// Breadth-first spanning tree; neighbours are visited in index order.
pub fn spanning_tree(g: &DirectedGraph, root: VertexId) -> Result<SpanningTree> {
    g.check_vertex(root)?;
    let n = g.num_vertices();
    let mut parent = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    depth[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if depth[w] == usize::MAX {
                depth[w] = depth[v] + 1;
                parent[w] = Some(v);
                queue.push_back(w);
            }
        }
    }
    Ok(SpanningTree { root, parent, depth })
}

impl SpanningTree {
    /// Builds a tree from an explicit undirected edge list.
    pub fn from_edges(g: &DirectedGraph, root: VertexId, edges: &[(VertexId, VertexId)]) -> Result<SpanningTree> {
        g.check_vertex(root)?;
        let n = g.num_vertices();
        if edges.len() + 1 != n {
            return Err(Error::NotSpanning(format!(
                "{} edges for {} vertices",
                edges.len(),
                n
            )));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if !g.has_arc(a, b) {
                return Err(Error::NotSpanning(format!("edge {a}-{b} is not in the graph")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut parent = vec![None; n];
        let mut depth = vec![usize::MAX; n];
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if depth[w] == usize::MAX {
                    depth[w] = depth[v] + 1;
                    parent[w] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        if let Some(v) = depth.iter().position(|&d| d == usize::MAX) {
            return Err(Error::NotSpanning(format!("vertex {} not reached", g.label(v))));
        }
        Ok(SpanningTree { root, parent, depth })
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn num_vertices(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v]
    }

    pub fn contains_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.parent[a] == Some(b) || self.parent[b] == Some(a)
    }

    /// Tree edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut e: Vec<_> = self
            .parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (v.min(p), v.max(p))))
            .collect();
        e.sort_unstable();
        e
    }

    /// The unique simple tree walk from `a` to `b`.
    pub fn path(&self, a: VertexId, b: VertexId) -> Walk {
        let (mut u, mut w) = (a, b);
        let mut up = vec![u];
        let mut down = vec![w];
        while self.depth[u] > self.depth[w] {
            u = self.parent[u].unwrap_or(u);
            up.push(u);
        }
        while self.depth[w] > self.depth[u] {
            w = self.parent[w].unwrap_or(w);
            down.push(w);
        }
        while u != w {
            u = self.parent[u].unwrap_or(u);
            w = self.parent[w].unwrap_or(w);
            up.push(u);
            down.push(w);
        }
        down.pop();
        up.extend(down.into_iter().rev());
        Walk::from_vertices(up)
    }
}

/// Picks which of c_{a→b}, c_{b→a} (with `a < b`) enters the basis.
#[derive(Debug, Clone, Copy)]
pub enum OrientationRule {
    /// c_{a→b} with `(a, b)` the lexicographically smaller arc.
    LexSmaller,
    LexLarger,
    /// `true` selects c_{a→b}.
    Custom(fn(VertexId, VertexId) -> bool),
}

impl OrientationRule {
    fn pick(&self, a: VertexId, b: VertexId) -> (VertexId, VertexId) {
        let forward = match self {
            OrientationRule::LexSmaller => true,
            OrientationRule::LexLarger => false,
            OrientationRule::Custom(f) => f(a, b),
        };
        if forward {
            (a, b)
        } else {
            (b, a)
        }
    }
}

/// 𝒯-basis: all 2-cycles plus one tree cycle per off-tree edge.
#[derive(Debug, Clone, Serialize)]
pub struct ClosedWalkBasis {
    pub tree: SpanningTree,
    /// Every undirected edge `(a, b)`, `a < b`.
    pub two_cycles: Vec<(VertexId, VertexId)>,
    /// Edges sharing no arc with the tree.
    pub off_tree: Vec<(VertexId, VertexId)>,
    /// c_e for each entry of `off_tree`, starting with its defining arc.
    pub chosen: Vec<Walk>,
}

pub fn t_basis(g: &DirectedGraph, tree: &SpanningTree, rule: OrientationRule) -> Result<ClosedWalkBasis> {
    if tree.num_vertices() != g.num_vertices() {
        return Err(Error::NotSpanning(format!(
            "tree has {} vertices, graph has {}",
            tree.num_vertices(),
            g.num_vertices()
        )));
    }
    for (a, b) in tree.edges() {
        if !g.has_arc(a, b) {
            return Err(Error::NotSpanning(format!(
                "tree edge {}-{} is not in the graph",
                g.label(a),
                g.label(b)
            )));
        }
    }
    let two_cycles = g.edges();
    let off_tree: Vec<_> = two_cycles
        .iter()
        .copied()
        .filter(|&(a, b)| !tree.contains_edge(a, b))
        .collect();
    let chosen = off_tree
        .iter()
        .map(|&(a, b)| {
            let (x, y) = rule.pick(a, b);
            tree.path(y, x).prepend(x)
        })
        .collect();
    Ok(ClosedWalkBasis {
        tree: tree.clone(),
        two_cycles,
        off_tree,
        chosen,
    })
}

impl Walk {
    fn prepend(&self, v: VertexId) -> Walk {
        let mut out = Vec::with_capacity(self.vertices.len() + 1);
        out.push(v);
        out.extend_from_slice(&self.vertices);
        Walk { vertices: out }
    }
}

impl ClosedWalkBasis {
    /// Every basis cycle: the 2-cycles (rooted at the smaller vertex) then the chosen cycles.
    pub fn cycles(&self) -> Vec<Walk> {
        let mut out: Vec<Walk> = self
            .two_cycles
            .iter()
            .map(|&(a, b)| Walk::from_vertices(vec![a, b, a]))
            .collect();
        out.extend(self.chosen.iter().cloned());
        out
    }

    pub fn num_vertices(&self) -> usize {
        self.tree.num_vertices()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn figure_graph() -> DirectedGraph {
        let edges = [
            ("a", "b"),
            ("b", "c"),
            ("e", "d"),
            ("e", "f"),
            ("b", "e"),
            ("a", "c"),
            ("d", "f"),
            ("a", "d"),
            ("c", "f"),
        ];
        let arcs: Vec<(&str, &str)> = edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
        build_graph(&arcs).unwrap()
    }

    #[test]
    fn smallest_graph() {
        let g = build_graph(&[("a", "b"), ("b", "a")]).unwrap();
        assert_eq!(g.max_out_degree(), 1);
        assert_eq!(g.num_arcs(), 2);
    }

    #[test]
    fn invalid_graphs() {
        assert!(matches!(build_graph(&[("a", "b")]), Err(Error::SymmetryViolation { .. })));
        assert!(matches!(build_graph(&[("a", "a")]), Err(Error::LoopPresent(_))));
        let r = build_graph(&[("a", "b"), ("b", "a"), ("c", "d"), ("d", "c")]);
        assert!(matches!(r, Err(Error::Disconnected { .. })));
        let empty: [(&str, &str); 0] = [];
        assert!(matches!(build_graph(&empty), Err(Error::EmptyGraph)));
    }

    #[test]
    fn lattice_counts() {
        let g = lattice_window(2, 2).unwrap();
        assert_eq!((g.num_vertices(), g.num_arcs()), (4, 8));
        assert_eq!(g.lattice().unwrap().faces().len(), 1);
        let g = lattice_window(3, 3).unwrap();
        assert_eq!((g.num_vertices(), g.num_arcs()), (9, 24));
        assert_eq!(g.lattice().unwrap().faces().len(), 4);
        let g = lattice_window(5, 5).unwrap();
        assert_eq!(g.max_out_degree(), 4);
        assert_eq!(g.degree(g.vertex("2,2").unwrap()), 4);
        assert!(matches!(lattice_window(1, 5), Err(Error::DimensionTooSmall { .. })));
    }

    #[test]
    fn face_is_a_closed_walk() {
        let g = lattice_window(3, 3).unwrap();
        let lat = g.lattice().unwrap();
        let f = lat.face(1, 1);
        assert!(Walk::new(&g, f.vertices().to_vec()).is_ok());
        assert!(f.is_closed() && f.is_simple() && f.len() == 4);
        assert_eq!(f.labels(&g), ["1,1", "1,2", "2,2", "2,1", "1,1"]);
    }

    #[test]
    fn reversal() {
        let g = build_graph(&[("a", "b"), ("b", "a"), ("b", "c"), ("c", "b")]).unwrap();
        let w = Walk::new(&g, vec![0, 1, 2]).unwrap();
        let r = reverse_walk(&w);
        assert_eq!(r.labels(&g), ["c", "b", "a"]);
        assert_eq!(reverse_walk(&r), w);
        assert!(r.is_simple());
    }

    #[test]
    fn distances() {
        let g = lattice_window(4, 4).unwrap();
        let a = g.vertex("0,0").unwrap();
        let b = g.vertex("2,1").unwrap();
        assert_eq!(graph_distance(&g, a, b).unwrap(), 3);
        assert_eq!(graph_distance(&g, b, a).unwrap(), 3);
        assert_eq!(graph_distance(&g, a, a).unwrap(), 0);
        assert!(matches!(graph_distance(&g, a, 99), Err(Error::VertexUnknown(_))));
    }

    #[test]
    fn enumeration_small_cases() {
        let g = build_graph(&[("a", "b"), ("b", "a")]).unwrap();
        let w = enumerate_simple_closed_walks(&g, 2, DEFAULT_WALK_CAP).unwrap();
        assert_eq!(w.len(), 2);
        assert!(enumerate_simple_closed_walks(&g, 1, DEFAULT_WALK_CAP).unwrap().is_empty());

        let g = lattice_window(2, 2).unwrap();
        let w = enumerate_simple_closed_walks(&g, 4, DEFAULT_WALK_CAP).unwrap();
        // 8 rooted 2-cycles and 4 base points x 2 orientations of the face
        assert_eq!(w.iter().filter(|w| w.len() == 2).count(), 8);
        assert_eq!(w.iter().filter(|w| w.len() == 4).count(), 8);
        assert_eq!(w.len(), 16);
        let mut sorted = w.clone();
        sorted.sort();
        assert_eq!(sorted, w);
        assert!(matches!(
            enumerate_simple_closed_walks(&g, 4, 5),
            Err(Error::BudgetExceeded { cap: 5 })
        ));
    }

    #[test]
    fn trees() {
        let g = build_graph(&[("a", "b"), ("b", "a")]).unwrap();
        let t = spanning_tree(&g, 0).unwrap();
        assert_eq!(t.edges(), vec![(0, 1)]);
        let g = lattice_window(3, 3).unwrap();
        let t = spanning_tree(&g, 0).unwrap();
        assert_eq!(t.edges().len(), 8);
        let b = t_basis(&g, &t, OrientationRule::LexSmaller).unwrap();
        assert_eq!(b.off_tree.len(), 12 - 8);
        assert_eq!(b.two_cycles.len(), 12);
    }

    #[test]
    fn path_graph_is_its_own_tree() {
        let g = line_window(0, 5).unwrap();
        let t = spanning_tree(&g, 2).unwrap();
        assert_eq!(t.edges(), g.edges());
        let b = t_basis(&g, &t, OrientationRule::LexSmaller).unwrap();
        assert!(b.off_tree.is_empty());
        assert_eq!(b.cycles().len(), 5);
    }

    #[test]
    fn figure_cycle() {
        let g = figure_graph();
        let v = |s: &str| g.vertex(s).unwrap();
        let tree_edges = [(v("a"), v("b")), (v("b"), v("c")), (v("e"), v("d")), (v("e"), v("f")), (v("b"), v("e"))];
        let t = SpanningTree::from_edges(&g, v("b"), &tree_edges).unwrap();
        let d_first = |a: VertexId, b: VertexId| -> bool {
            // vertices are numbered a=0, b=1, c=2, e=3, d=4, f=5; pick the cycle starting at d
            a == 4 || b != 4
        };
        let b = t_basis(&g, &t, OrientationRule::Custom(d_first)).unwrap();
        let i = b.off_tree.iter().position(|&e| e == (v("a"), v("d"))).unwrap();
        assert_eq!(b.chosen[i].labels(&g), ["d", "a", "b", "e", "d"]);
        for (c, &(x, y)) in b.chosen.iter().zip(&b.off_tree) {
            let off: Vec<_> = c.arcs().filter(|&(p, q)| !t.contains_edge(p, q)).collect();
            assert_eq!(off.len(), 1);
            assert!(off[0] == (x, y) || off[0] == (y, x));
            assert_eq!(c.arcs().next(), Some(off[0]));
        }
    }

    #[test]
    fn tree_from_bad_edges() {
        let g = lattice_window(2, 2).unwrap();
        assert!(matches!(SpanningTree::from_edges(&g, 0, &[(0, 1)]), Err(Error::NotSpanning(_))));
        assert!(matches!(SpanningTree::from_edges(&g, 0, &[(0, 3), (0, 1), (1, 3)]), Err(Error::NotSpanning(_))));
    }

    #[test]
    fn tree_ball_shape() {
        let g = regular_tree_ball(3, 3).unwrap();
        assert_eq!(g.num_vertices(), 1 + 3 + 6 + 12);
        assert_eq!(g.max_out_degree(), 3);
        assert_eq!(g.boundary().unwrap().iter().filter(|&&b| b).count(), 12);
    }
}
