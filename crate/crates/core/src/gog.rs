//! Graphs of groups, decompositions, canonical presentations, and the
//! fundamental group as a concrete oracle.
//!
//! Arrow `2e` runs along edge `e` from its origin to its terminus and arrow
//! `2e+1` is its reverse. The monomorphism attached to an arrow `a` maps the
//! edge group into `G_{o(a)}`; the relation carried by `a` is
//! `m_a(h)·a = a·m_{-a}(h)`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::backends::{
    Capability, ConjugatorSet, Elem, GroupExt, GroupOracle, Monomorphism, Oracle, OuterOrder,
    SubKind, Subgroup, Witness,
};
use crate::error::{Error, Result};
use crate::words::{GeneratorId, Letter, Scope, Word};

pub fn rev(a: usize) -> usize {
    a ^ 1
}

pub fn edge_of(a: usize) -> usize {
    a / 2
}

pub fn is_positive(a: usize) -> bool {
    a.is_multiple_of(2)
}

/// Connected graph with numbered vertices; edge `e` joins `edges[e].0` to `edges[e].1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub n_vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Graph> {
        let mut bad = Vec::new();
        for (e, &(o, t)) in edges.iter().enumerate() {
            if o >= n_vertices || t >= n_vertices {
                bad.push(format!("edge {e} has an endpoint outside 0..{n_vertices}"));
            }
        }
        if n_vertices == 0 {
            bad.push("graph has no vertices".into());
        }
        if !bad.is_empty() {
            return Err(Error::Invalid(bad));
        }
        Ok(Graph { n_vertices, edges })
    }

    /// Builds a graph from arrows given by origin and involution.
    /// Orientation keeps the lower-numbered arrow of each pair.
    pub fn from_arrows(n_vertices: usize, origin: &[usize], involution: &[usize]) -> Result<Graph> {
        let mut bad = Vec::new();
        if origin.len() != involution.len() {
            bad.push("origin and involution have different lengths".into());
        }
        for (a, &j) in involution.iter().enumerate() {
            if j >= involution.len() {
                bad.push(format!("arrow {a} is sent outside the arrow set"));
            } else if j == a {
                bad.push(format!("involution fixes arrow {a}"));
            } else if involution[j] != a {
                bad.push(format!("involution is not an involution at arrow {a}"));
            }
        }
        if !bad.is_empty() {
            return Err(Error::Invalid(bad));
        }
        let edges = (0..involution.len())
            .filter(|&a| a < involution[a])
            .map(|a| (origin[a], origin[involution[a]]))
            .collect();
        Graph::new(n_vertices, edges)
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn origin(&self, a: usize) -> usize {
        let (o, t) = self.edges[edge_of(a)];
        if is_positive(a) { o } else { t }
    }

    pub fn terminus(&self, a: usize) -> usize {
        self.origin(rev(a))
    }

    /// Arrows leaving `v` within the edge set `edges`, by arrow id.
    pub fn arrows_from(&self, v: usize, edges: &BTreeSet<usize>) -> Vec<usize> {
        let mut out = Vec::new();
        for &e in edges {
            for a in [2 * e, 2 * e + 1] {
                if self.origin(a) == v {
                    out.push(a);
                }
            }
        }
        out
    }

    pub fn all_edges(&self) -> BTreeSet<usize> {
        (0..self.edges.len()).collect()
    }

    /// Vertices reachable from `start` through `edges`.
    pub fn component(&self, start: usize, edges: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for a in self.arrows_from(v, edges) {
                let w = self.terminus(a);
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        self.component(0, &self.all_edges()).len() == self.n_vertices
    }

    /// BFS spanning tree from vertex 0, scanning edges by id.
    pub fn spanning_tree(&self) -> Result<BTreeSet<usize>> {
        let all = self.all_edges();
        let mut seen = vec![false; self.n_vertices];
        seen[0] = true;
        let mut tree = BTreeSet::new();
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for a in self.arrows_from(v, &all) {
                let w = self.terminus(a);
                if !seen[w] {
                    seen[w] = true;
                    tree.insert(edge_of(a));
                    queue.push_back(w);
                }
            }
        }
        if seen.iter().all(|&s| s) {
            Ok(tree)
        } else {
            Err(Error::Disconnected)
        }
    }

    /// Tree path from `from` to every vertex of its tree component.
    pub fn tree_paths(&self, from: usize, tree: &BTreeSet<usize>) -> BTreeMap<usize, Vec<usize>> {
        let mut paths = BTreeMap::from([(from, Vec::new())]);
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            let here = paths[&v].clone();
            for a in self.arrows_from(v, tree) {
                let w = self.terminus(a);
                if let std::collections::btree_map::Entry::Vacant(e) = paths.entry(w) {
                    let mut p = here.clone();
                    p.push(a);
                    e.insert(p);
                    queue.push_back(w);
                }
            }
        }
        paths
    }
}

/// Spanning tree plus the decomposition order on edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub tree: BTreeSet<usize>,
    /// Edge ids, smallest first; non-tree edges precede tree edges.
    pub order: Vec<usize>,
}

impl Decomposition {
    /// Deterministic default: BFS tree, non-tree edges by id, then tree edges by id.
    pub fn default_for(graph: &Graph) -> Result<Decomposition> {
        let tree = graph.spanning_tree()?;
        Ok(Decomposition::with_tree(graph, tree))
    }

    pub fn with_tree(graph: &Graph, tree: BTreeSet<usize>) -> Decomposition {
        let mut order: Vec<usize> = (0..graph.n_edges()).filter(|e| !tree.contains(e)).collect();
        order.extend(tree.iter().copied());
        Decomposition { tree, order }
    }

    pub fn check(&self, graph: &Graph) -> Vec<String> {
        let mut bad = Vec::new();
        if self.tree.iter().any(|&e| e >= graph.n_edges()) {
            bad.push("tree names an unknown edge".into());
            return bad;
        }
        if self.tree.len() + 1 != graph.n_vertices
            || graph.component(0, &self.tree).len() != graph.n_vertices
        {
            bad.push("declared tree is not a spanning tree".into());
        }
        let mut sorted = self.order.clone();
        sorted.sort_unstable();
        if sorted != (0..graph.n_edges()).collect::<Vec<_>>() {
            bad.push("decomposition order must list every edge exactly once".into());
        }
        let first_tree = self.order.iter().position(|e| self.tree.contains(e));
        if let Some(p) = first_tree {
            if self.order[p..].iter().any(|e| !self.tree.contains(e)) {
                bad.push("a non-tree edge follows a tree edge in the decomposition order".into());
            }
        }
        bad
    }

    pub fn is_tree(&self, e: usize) -> bool {
        self.tree.contains(&e)
    }
}

/// Vertex group: an oracle, or a bare presentation for symbolic use.
#[derive(Debug, Clone)]
pub struct VertexGroup {
    pub name: String,
    pub oracle: Option<Oracle>,
    pub gen_names: Vec<String>,
    /// Relators; letters carry `Scope::Vertex(v)` of this vertex.
    pub relations: Vec<Word>,
}

impl VertexGroup {
    pub fn concrete(name: impl Into<String>, oracle: Oracle) -> VertexGroup {
        VertexGroup { name: name.into(), oracle: Some(oracle), gen_names: Vec::new(), relations: Vec::new() }
    }

    pub fn presented(name: impl Into<String>, gen_names: Vec<String>, relations: Vec<Word>) -> VertexGroup {
        VertexGroup { name: name.into(), oracle: None, gen_names, relations }
    }
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum EdgeMaps {
    Concrete { minus: Monomorphism, plus: Monomorphism },
    /// Images of the edge generators as words over the endpoint generators.
    Symbolic { minus: Vec<Word>, plus: Vec<Word> },
}

#[derive(Debug, Clone)]
pub struct EdgeGroup {
    pub name: String,
    pub group: Option<Oracle>,
    pub maps: EdgeMaps,
}

/// Edge as supplied to [`GraphOfGroups::new`].
#[derive(Debug, Clone)]
pub struct EdgeSpec {
    pub name: String,
    pub from: usize,
    pub to: usize,
    pub group: Option<Oracle>,
    /// Edge-group elements whose images are given.
    pub domain: Vec<Elem>,
    pub minus: EdgeImages,
    pub plus: EdgeImages,
}

#[derive(Debug, Clone)]
pub enum EdgeImages {
    Elems(Vec<Elem>),
    Words(Vec<Word>),
}

#[derive(Debug, Clone)]
pub struct GraphOfGroups {
    pub graph: Graph,
    pub vertices: Vec<VertexGroup>,
    pub edges: Vec<EdgeGroup>,
}

impl GraphOfGroups {
    pub fn new(vertices: Vec<VertexGroup>, edges: Vec<EdgeSpec>) -> Result<GraphOfGroups> {
        let graph = Graph::new(vertices.len(), edges.iter().map(|e| (e.from, e.to)).collect())?;
        let mut bad = Vec::new();
        if !graph.is_connected() {
            bad.push("graph is disconnected".to_string());
        }
        let mut vertices = vertices;
        for (v, vg) in vertices.iter_mut().enumerate() {
            if let Some(o) = &vg.oracle {
                let (names, rels) = oracle_presentation(o.as_ref(), v);
                vg.gen_names = names;
                vg.relations = rels;
            } else if vg.relations.iter().any(|w| w.uses_scope(|s| s != Scope::Vertex(v))) {
                bad.push(format!("relations of vertex {} use foreign letters", vg.name));
            }
        }
        let mut built = Vec::new();
        for spec in edges {
            match build_edge(&vertices, &spec) {
                Ok(e) => built.push(e),
                Err(msg) => {
                    bad.push(format!("edge {}: {msg}", spec.name));
                }
            }
        }
        if !bad.is_empty() {
            return Err(Error::Invalid(bad));
        }
        Ok(GraphOfGroups { graph, vertices, edges: built })
    }

    pub fn is_concrete(&self) -> bool {
        self.vertices.iter().all(|v| v.oracle.is_some())
            && self.edges.iter().all(|e| matches!(e.maps, EdgeMaps::Concrete { .. }))
    }

    pub fn vertex_oracle(&self, v: usize) -> Result<&Oracle> {
        self.vertices[v].oracle.as_ref().ok_or_else(|| {
            Error::Unsupported(format!("vertex {} is only given by a presentation", self.vertices[v].name))
        })
    }

    pub fn edge_oracle(&self, e: usize) -> Result<&Oracle> {
        self.edges[e]
            .group
            .as_ref()
            .ok_or_else(|| Error::Unsupported(format!("edge {} has no group oracle", self.edges[e].name)))
    }

    /// Monomorphism of arrow `a`: edge group into `G_{o(a)}`.
    pub fn arrow_mono(&self, a: usize) -> Result<&Monomorphism> {
        match &self.edges[edge_of(a)].maps {
            EdgeMaps::Concrete { minus, plus } => Ok(if is_positive(a) { minus } else { plus }),
            EdgeMaps::Symbolic { .. } => Err(Error::Unsupported(format!(
                "edge {} is only given symbolically",
                self.edges[edge_of(a)].name
            ))),
        }
    }

    /// Edge subgroup of arrow `a` inside `G_{o(a)}`.
    pub fn out_subgroup(&self, a: usize) -> Result<&Subgroup> {
        Ok(&self.arrow_mono(a)?.image)
    }

    /// Sends `x ∈ m_a(E) ⊆ G_{o(a)}` across `a` to `m_{-a}(same) ⊆ G_{e(a)}`.
    pub fn cross(&self, a: usize, x: &Elem) -> Result<Option<Elem>> {
        match self.arrow_mono(a)?.preimage(x)? {
            Some(h) => Ok(Some(self.arrow_mono(rev(a))?.apply(&h)?)),
            None => Ok(None),
        }
    }

    pub fn origin(&self, a: usize) -> usize {
        self.graph.origin(a)
    }

    pub fn terminus(&self, a: usize) -> usize {
        self.graph.terminus(a)
    }

    /// Number of edge-group generators named on edge `e`.
    pub fn edge_gen_count(&self, e: usize) -> usize {
        match &self.edges[e].maps {
            EdgeMaps::Concrete { minus, .. } => minus.domain_gens.len(),
            EdgeMaps::Symbolic { minus, .. } => minus.len(),
        }
    }

    /// Edge images as words: `(phi-, phi+)` per edge generator.
    pub fn edge_words(&self, e: usize) -> Result<Vec<(Word, Word)>> {
        let (o, t) = self.graph.edges[e];
        match &self.edges[e].maps {
            EdgeMaps::Concrete { minus, plus } => minus
                .images
                .iter()
                .zip(&plus.images)
                .map(|(x, y)| {
                    Ok((
                        minus.target.to_word(x, Scope::Vertex(o))?,
                        plus.target.to_word(y, Scope::Vertex(t))?,
                    ))
                })
                .collect(),
            EdgeMaps::Symbolic { minus, plus } => {
                Ok(minus.iter().cloned().zip(plus.iter().cloned()).collect())
            }
        }
    }

    /// Re-checks every invariant; an empty list means valid.
    pub fn validate(&self) -> Vec<String> {
        let mut bad = Vec::new();
        if !self.graph.is_connected() {
            bad.push("graph is disconnected".into());
        }
        for (e, eg) in self.edges.iter().enumerate() {
            let (o, t) = self.graph.edges[e];
            if let EdgeMaps::Concrete { minus, plus } = &eg.maps {
                for (m, v, side) in [(minus, o, "phi-"), (plus, t, "phi+")] {
                    match &self.vertices[v].oracle {
                        Some(vo) if Arc::ptr_eq(vo, &m.target) => {}
                        _ => bad.push(format!("edge {}: {side} does not land in vertex {}", eg.name, self.vertices[v].name)),
                    }
                    if let Err(err) =
                        Monomorphism::new(m.source.clone(), m.target.clone(), m.domain_gens.clone(), m.images.clone())
                    {
                        bad.push(format!("edge {}: {side}: {err}", eg.name));
                    }
                }
            }
        }
        bad
    }

    pub fn vertex_gen_name(&self, gen: &GeneratorId) -> String {
        match gen.scope {
            Scope::Vertex(v) => match self.vertices.get(v) {
                Some(vg) => {
                    let n = vg.gen_names.get(gen.index).cloned().unwrap_or_else(|| format!("g{}", gen.index));
                    format!("{}.{}", vg.name, n)
                }
                None => gen.to_string(),
            },
            Scope::Stable(e) => match self.edges.get(e) {
                Some(eg) => format!("t{}", eg.name),
                None => gen.to_string(),
            },
            Scope::Edge(_) => gen.to_string(),
        }
    }
}

fn build_edge(vertices: &[VertexGroup], spec: &EdgeSpec) -> std::result::Result<EdgeGroup, String> {
    if spec.from >= vertices.len() {
        return Err(format!("unknown origin vertex {}", spec.from));
    }
    if spec.to >= vertices.len() {
        return Err(format!("unknown terminal vertex {}", spec.to));
    }
    let concrete = vertices[spec.from].oracle.clone().zip(vertices[spec.to].oracle.clone());
    let count = |imgs: &EdgeImages| match imgs {
        EdgeImages::Elems(v) => v.len(),
        EdgeImages::Words(v) => v.len(),
    };
    if count(&spec.minus) != count(&spec.plus) {
        return Err("phi- and phi+ must give the same number of images".into());
    }
    match (concrete, &spec.group) {
        (Some((vo, vt)), Some(eg)) => {
            let eval = |target: &Oracle, v: usize, imgs: &EdgeImages| -> std::result::Result<Vec<Elem>, String> {
                match imgs {
                    EdgeImages::Elems(v) => Ok(v.clone()),
                    EdgeImages::Words(ws) => ws
                        .iter()
                        .map(|w| {
                            if w.uses_scope(|s| s != Scope::Vertex(v)) {
                                return Err(format!("image {w} is not a word in vertex {}", vertices[v].name));
                            }
                            target.eval_word(w).map_err(|e| e.to_string())
                        })
                        .collect(),
                }
            };
            let mi = eval(&vo, spec.from, &spec.minus)?;
            let pi = eval(&vt, spec.to, &spec.plus)?;
            let minus = Monomorphism::new(eg.clone(), vo, spec.domain.clone(), mi)
                .map_err(|e| format!("phi-: {e}"))?;
            let plus = Monomorphism::new(eg.clone(), vt, spec.domain.clone(), pi)
                .map_err(|e| format!("phi+: {e}"))?;
            Ok(EdgeGroup { name: spec.name.clone(), group: Some(eg.clone()), maps: EdgeMaps::Concrete { minus, plus } })
        }
        _ => {
            let words = |imgs: &EdgeImages, v: usize| -> std::result::Result<Vec<Word>, String> {
                match imgs {
                    EdgeImages::Words(ws) => {
                        if ws.iter().any(|w| w.uses_scope(|s| s != Scope::Vertex(v))) {
                            return Err(format!("an image is not a word in vertex {}", vertices[v].name));
                        }
                        Ok(ws.clone())
                    }
                    EdgeImages::Elems(_) => Err("element images need concrete groups".into()),
                }
            };
            Ok(EdgeGroup {
                name: spec.name.clone(),
                group: spec.group.clone(),
                maps: EdgeMaps::Symbolic { minus: words(&spec.minus, spec.from)?, plus: words(&spec.plus, spec.to)? },
            })
        }
    }
}

/// Presentation of a backend group over its letters `g<i>`.
fn oracle_presentation(o: &dyn GroupOracle, v: usize) -> (Vec<String>, Vec<Word>) {
    let letter = |i: usize, exp: i8| Letter::new(GeneratorId::vertex(v, i), exp);
    if let Some(all) = o.elements() {
        // Multiplication table: one letter per element.
        let idx = |e: &Elem| match e {
            Elem::Table(i) => *i,
            _ => usize::MAX,
        };
        let n = all.len();
        let id = idx(&o.identity());
        let mut rels = vec![Word::from_letters(vec![letter(id, 1)])];
        for a in &all {
            for b in &all {
                let (i, j) = (idx(a), idx(b));
                if i == id || j == id {
                    continue;
                }
                let k = idx(&o.mul(a, b).expect("table product"));
                rels.push(Word::from_letters(vec![letter(i, 1), letter(j, 1), letter(k, -1)]));
            }
        }
        return ((0..n).map(|i| format!("g{i}")).collect(), rels);
    }
    let n = o.generators().len();
    let mut rels = Vec::new();
    if o.is_abelian() {
        for i in 0..n {
            for j in i + 1..n {
                rels.push(Word::from_letters(vec![letter(i, 1), letter(j, 1), letter(i, -1), letter(j, -1)]));
            }
        }
    }
    ((0..n).map(|i| format!("g{i}")).collect(), rels)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<GeneratorId>,
    pub names: Vec<String>,
    pub relations: Vec<Word>,
}

impl Presentation {
    pub fn render(&self, gog: &GraphOfGroups) -> String {
        let name = |g: &GeneratorId| gog.vertex_gen_name(g);
        let gens: Vec<String> = self.generators.iter().map(name).collect();
        let rels: Vec<String> =
            self.relations.iter().map(|w| crate::words::format_word(w, &name)).collect();
        format!("< {} | {} >", gens.join(", "), rels.join(", "))
    }
}

/// Vertex generators, one stable letter per non-tree edge; vertex relations,
/// then one relation per edge generator per edge.
pub fn canonical_presentation(gog: &GraphOfGroups, dec: &Decomposition) -> Result<Presentation> {
    let bad = dec.check(&gog.graph);
    if !bad.is_empty() {
        return Err(Error::Invalid(bad));
    }
    let mut generators = Vec::new();
    let mut names = Vec::new();
    let mut relations = Vec::new();
    for (v, vg) in gog.vertices.iter().enumerate() {
        for i in 0..vg.gen_names.len() {
            let g = GeneratorId::vertex(v, i);
            names.push(gog.vertex_gen_name(&g));
            generators.push(g);
        }
        relations.extend(vg.relations.iter().cloned());
    }
    for e in 0..gog.graph.n_edges() {
        if !dec.is_tree(e) {
            let t = GeneratorId::stable(e);
            names.push(gog.vertex_gen_name(&t));
            generators.push(t);
        }
    }
    for e in 0..gog.graph.n_edges() {
        let t = Word::letter(GeneratorId::stable(e), 1);
        for (m, p) in gog.edge_words(e)? {
            let rel = if dec.is_tree(e) {
                m.concat(&p.invert())
            } else {
                m.concat(&t).concat(&p.invert()).concat(&t.invert())
            };
            relations.push(rel);
        }
    }
    Ok(Presentation { generators, names, relations })
}

/// Reduced path `g0 a1 g1 ... an gn` from `start`, in normal form: every
/// `g_i` before an arrow is the canonical representative of its left coset
/// modulo that arrow's edge subgroup, and no `a g -a` with `g` in the edge
/// subgroup of `-a` occurs.
#[derive(Debug, Clone, PartialEq, Eq)]
struct PathNf {
    start: usize,
    g0: Elem,
    steps: Vec<(usize, Elem)>,
}

/// Fundamental group of a connected subgraph, based at a vertex, with
/// elements kept as reduced paths in normal form.
#[derive(Clone)]
pub struct Pi1Oracle {
    gog: Arc<GraphOfGroups>,
    vertices: BTreeSet<usize>,
    edges: BTreeSet<usize>,
    tree: BTreeSet<usize>,
    base: usize,
    gamma: BTreeMap<usize, Vec<usize>>,
}

impl fmt::Debug for Pi1Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pi1Oracle({})", self.describe())
    }
}

impl Pi1Oracle {
    pub fn new(
        gog: Arc<GraphOfGroups>,
        vertices: BTreeSet<usize>,
        edges: BTreeSet<usize>,
        tree: BTreeSet<usize>,
        base: usize,
    ) -> Result<Pi1Oracle> {
        if !gog.is_concrete() {
            return Err(Error::Unsupported("fundamental group of a symbolic graph of groups".into()));
        }
        if !vertices.contains(&base) {
            return Err(Error::Invalid(vec![format!("base vertex {base} outside the subgraph")]));
        }
        for &e in &edges {
            let (o, t) = gog.graph.edges[e];
            if !vertices.contains(&o) || !vertices.contains(&t) {
                return Err(Error::Invalid(vec![format!("edge {e} leaves the subgraph")]));
            }
        }
        if !tree.is_subset(&edges) {
            return Err(Error::Invalid(vec!["tree edges outside the subgraph".into()]));
        }
        let gamma = gog.graph.tree_paths(base, &tree);
        if gamma.len() != vertices.len() || tree.len() + 1 != vertices.len() {
            return Err(Error::Invalid(vec!["tree does not span the subgraph".into()]));
        }
        Ok(Pi1Oracle { gog, vertices, edges, tree, base, gamma })
    }

    /// Whole graph, based at vertex 0.
    pub fn full(gog: Arc<GraphOfGroups>, dec: &Decomposition) -> Result<Pi1Oracle> {
        let bad = dec.check(&gog.graph);
        if !bad.is_empty() {
            return Err(Error::Invalid(bad));
        }
        let vertices = (0..gog.graph.n_vertices).collect();
        let edges = gog.graph.all_edges();
        Pi1Oracle::new(gog, vertices, edges, dec.tree.clone(), 0)
    }

    pub fn gog(&self) -> &Arc<GraphOfGroups> {
        &self.gog
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn vertex_set(&self) -> &BTreeSet<usize> {
        &self.vertices
    }

    pub fn edge_set(&self) -> &BTreeSet<usize> {
        &self.edges
    }

    pub fn tree(&self) -> &BTreeSet<usize> {
        &self.tree
    }

    pub fn is_single_vertex(&self) -> bool {
        self.edges.is_empty()
    }

    /// Tree path from the base to `v`.
    pub fn gamma(&self, v: usize) -> &[usize] {
        &self.gamma[&v]
    }

    fn vo(&self, v: usize) -> &Oracle {
        self.gog.vertices[v].oracle.as_ref().expect("concrete graph of groups")
    }

    fn end_vertex(&self, p: &PathNf) -> usize {
        p.steps.last().map_or(p.start, |(a, _)| self.gog.terminus(*a))
    }

    fn start(&self) -> PathNf {
        self.start_at(self.base)
    }

    fn start_at(&self, v: usize) -> PathNf {
        PathNf { start: v, g0: self.vo(v).identity(), steps: Vec::new() }
    }

    fn last_mut(p: &mut PathNf) -> &mut Elem {
        match p.steps.last_mut() {
            Some((_, g)) => g,
            None => &mut p.g0,
        }
    }

    fn push_elem(&self, p: &mut PathNf, x: &Elem) -> Result<()> {
        let v = self.end_vertex(p);
        let o = self.vo(v).clone();
        let last = Self::last_mut(p);
        *last = o.mul(last, x)?;
        Ok(())
    }

    fn push_arrow(&self, p: &mut PathNf, a: usize) -> Result<()> {
        let v = self.end_vertex(p);
        if self.gog.origin(a) != v || !self.edges.contains(&edge_of(a)) {
            return Err(Error::Foreign { elem: format!("arrow {a}"), group: self.describe() });
        }
        if let Some((b, x)) = p.steps.last() {
            if *b == rev(a) {
                // Pinch `b x -b` with `x` in the edge subgroup of `-b`.
                if let Some(y) = self.gog.cross(a, x)? {
                    p.steps.pop();
                    let u = self.end_vertex(p);
                    let o = self.vo(u).clone();
                    let last = Self::last_mut(p);
                    *last = o.mul(last, &y)?;
                    return Ok(());
                }
            }
        }
        let o = self.vo(v).clone();
        let last = Self::last_mut(p);
        let (r, c) = o.decompose(self.gog.out_subgroup(a)?, last)?;
        *last = r;
        let carried = self.gog.cross(a, &c)?.ok_or_else(|| {
            Error::Verification("coset decomposition left the edge subgroup".into())
        })?;
        p.steps.push((a, carried));
        Ok(())
    }

    fn append(&self, p: &mut PathNf, q: &PathNf) -> Result<()> {
        self.push_elem(p, &q.g0)?;
        for (a, g) in &q.steps {
            self.push_arrow(p, *a)?;
            self.push_elem(p, g)?;
        }
        Ok(())
    }

    fn unpack(&self, g: &Elem) -> Result<PathNf> {
        match g {
            Elem::Path(g0, steps) => Ok(PathNf { start: self.base, g0: (**g0).clone(), steps: steps.clone() }),
            _ => Err(Error::Foreign { elem: g.to_string(), group: self.describe() }),
        }
    }

    fn pack(p: PathNf) -> Elem {
        Elem::Path(Box::new(p.g0), p.steps)
    }

    /// `γ_v x γ_v⁻¹` for `x ∈ G_v`.
    pub fn embed(&self, v: usize, x: &Elem) -> Result<Elem> {
        if !self.vertices.contains(&v) {
            return Err(Error::Foreign { elem: format!("vertex {v}"), group: self.describe() });
        }
        self.vo(v).check_member(x)?;
        let mut p = self.start();
        for &a in self.gamma(v) {
            self.push_arrow(&mut p, a)?;
        }
        self.push_elem(&mut p, x)?;
        for &a in self.gamma(v).iter().rev() {
            self.push_arrow(&mut p, rev(a))?;
        }
        Ok(Self::pack(p))
    }

    /// `x` when `γ_v⁻¹ g γ_v` is the vertex element `x`.
    pub fn vertex_part(&self, v: usize, g: &Elem) -> Result<Option<Elem>> {
        if !self.vertices.contains(&v) {
            return Ok(None);
        }
        let mut y = self.start_at(v);
        for &a in self.gamma(v).iter().rev() {
            self.push_arrow(&mut y, rev(a))?;
        }
        self.append(&mut y, &self.unpack(g)?)?;
        for &a in self.gamma(v) {
            self.push_arrow(&mut y, a)?;
        }
        Ok(if y.steps.is_empty() { Some(y.g0) } else { None })
    }

    fn append_from(&self, p: &mut PathNf, g: &Elem) -> Result<()> {
        let q = self.unpack(g)?;
        self.append(p, &q)
    }

    /// Vertex `v` with `g ∈ γ_v G_v γ_v⁻¹`, preferring the base, then by id.
    pub fn elliptic_vertex(&self, g: &Elem) -> Result<Option<(usize, Elem)>> {
        let order = std::iter::once(self.base).chain(self.vertices.iter().copied().filter(|&v| v != self.base));
        for v in order {
            if let Some(x) = self.vertex_part(v, g)? {
                return Ok(Some((v, x)));
            }
        }
        Ok(None)
    }

    pub fn vertex_subgroup(&self, v: usize, inner_gens: &[Elem]) -> Result<Subgroup> {
        let inner = self.vo(v).subgroup(inner_gens)?;
        let gens = inner_gens.iter().map(|x| self.embed(v, x)).collect::<Result<_>>()?;
        Ok(Subgroup { gens, kind: SubKind::Vertex { vertex: v, inner: Box::new(inner) } })
    }

    /// Number of arrows in the reduced path.
    pub fn path_length(&self, g: &Elem) -> Result<usize> {
        Ok(self.unpack(g)?.steps.len())
    }

    /// `(g0, [(a_i, g_i)])` of the reduced path of `g`.
    pub fn parts(&self, g: &Elem) -> Result<(Elem, Vec<(usize, Elem)>)> {
        let p = self.unpack(g)?;
        Ok((p.g0, p.steps))
    }

    /// Evaluates a path `g0 a1 g1 ... an gn` from the base back to the base.
    pub fn from_parts(&self, g0: &Elem, steps: &[(usize, Elem)]) -> Result<Elem> {
        let mut p = self.start();
        self.push_elem(&mut p, g0)?;
        for (a, g) in steps {
            self.push_arrow(&mut p, *a)?;
            self.push_elem(&mut p, g)?;
        }
        if self.end_vertex(&p) != self.base {
            return Err(Error::Foreign { elem: "open path".into(), group: self.describe() });
        }
        Ok(Self::pack(p))
    }

    fn single(&self, g: &Elem) -> Result<Elem> {
        match g {
            Elem::Path(g0, steps) if steps.is_empty() => Ok((**g0).clone()),
            _ => Err(Error::Foreign { elem: g.to_string(), group: self.describe() }),
        }
    }

    fn wrap(x: Elem) -> Elem {
        Elem::Path(Box::new(x), Vec::new())
    }

    fn inner_of<'a>(&self, h: &'a Subgroup) -> Result<(usize, &'a Subgroup)> {
        match &h.kind {
            SubKind::Vertex { vertex, inner } if self.vertices.contains(vertex) => Ok((*vertex, inner)),
            _ => Err(Error::InvalidSubgroup(format!("not a vertex subgroup of {}", self.describe()))),
        }
    }

    fn single_oracle(&self, what: &str) -> Result<&Oracle> {
        if self.is_single_vertex() {
            Ok(self.vo(self.base))
        } else {
            Err(Error::capability(self.describe(), what))
        }
    }
}

impl GroupOracle for Pi1Oracle {
    fn describe(&self) -> String {
        let names: Vec<&str> = self.vertices.iter().map(|&v| self.gog.vertices[v].name.as_str()).collect();
        if self.is_single_vertex() {
            return format!("G_{}", names[0]);
        }
        let edges: Vec<&str> = self.edges.iter().map(|&e| self.gog.edges[e].name.as_str()).collect();
        format!("pi1({{{}}}; {{{}}})", names.join(","), edges.join(","))
    }

    fn capabilities(&self) -> Capability {
        if self.is_single_vertex() {
            self.vo(self.base).capabilities().normalized()
        } else {
            Capability::SUBGROUP_MEMBERSHIP | Capability::TRANSVERSAL
        }
    }

    fn identity(&self) -> Elem {
        Self::pack(self.start())
    }

    fn generators(&self) -> Vec<Elem> {
        let mut out = Vec::new();
        for &v in &self.vertices {
            for x in self.vo(v).generators() {
                out.push(self.embed(v, &x).expect("vertex generator"));
            }
        }
        for &e in &self.edges {
            if !self.tree.contains(&e) {
                out.push(self.letter(&GeneratorId::stable(e)).expect("stable letter"));
            }
        }
        out
    }

    fn is_member(&self, g: &Elem) -> bool {
        let Ok(p) = self.unpack(g) else { return false };
        let Ok(rebuilt) = self.from_parts(&p.g0, &p.steps) else { return false };
        let mut v = self.base;
        if !self.vo(v).is_member(&p.g0) {
            return false;
        }
        for (a, x) in &p.steps {
            if !self.edges.contains(&edge_of(*a)) || self.gog.origin(*a) != v {
                return false;
            }
            v = self.gog.terminus(*a);
            if !self.vo(v).is_member(x) {
                return false;
            }
        }
        rebuilt == *g
    }

    fn mul(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        let mut p = self.unpack(a)?;
        self.append_from(&mut p, b)?;
        Ok(Self::pack(p))
    }

    fn inv(&self, a: &Elem) -> Result<Elem> {
        let p = self.unpack(a)?;
        let mut out = self.start();
        let mut elems = vec![&p.g0];
        elems.extend(p.steps.iter().map(|(_, g)| g));
        let mut vs = vec![self.base];
        for (a, _) in &p.steps {
            vs.push(self.gog.terminus(*a));
        }
        for i in (0..elems.len()).rev() {
            self.push_elem(&mut out, &self.vo(vs[i]).inv(elems[i])?)?;
            if i > 0 {
                self.push_arrow(&mut out, rev(p.steps[i - 1].0))?;
            }
        }
        Ok(Self::pack(out))
    }

    fn is_abelian(&self) -> bool {
        self.is_single_vertex() && self.vo(self.base).is_abelian()
    }

    fn is_trivial_group(&self) -> bool {
        self.is_single_vertex() && self.vo(self.base).is_trivial_group()
    }

    fn letter(&self, gen: &GeneratorId) -> Result<Elem> {
        match gen.scope {
            Scope::Vertex(v) if self.vertices.contains(&v) => {
                let x = self.vo(v).letter(gen)?;
                self.embed(v, &x)
            }
            Scope::Stable(e) if self.edges.contains(&e) => {
                let a = 2 * e;
                let mut p = self.start();
                for &b in self.gamma(self.gog.origin(a)) {
                    self.push_arrow(&mut p, b)?;
                }
                self.push_arrow(&mut p, a)?;
                for &b in self.gamma(self.gog.terminus(a)).iter().rev() {
                    self.push_arrow(&mut p, rev(b))?;
                }
                Ok(Self::pack(p))
            }
            _ => Err(Error::Foreign { elem: gen.to_string(), group: self.describe() }),
        }
    }

    fn to_word(&self, g: &Elem, _scope: Scope) -> Result<Word> {
        let p = self.unpack(g)?;
        let mut w = self.vo(self.base).to_word(&p.g0, Scope::Vertex(self.base))?;
        for (a, x) in &p.steps {
            let e = edge_of(*a);
            if !self.tree.contains(&e) {
                let exp = if is_positive(*a) { 1 } else { -1 };
                w = w.concat(&Word::letter(GeneratorId::stable(e), exp));
            }
            let v = self.gog.terminus(*a);
            w = w.concat(&self.vo(v).to_word(x, Scope::Vertex(v))?);
        }
        Ok(w)
    }

    fn subgroup(&self, gens: &[Elem]) -> Result<Subgroup> {
        let mut candidates: Vec<usize> = vec![self.base];
        candidates.extend(self.vertices.iter().copied().filter(|&v| v != self.base));
        'v: for v in candidates {
            let mut inner = Vec::new();
            for g in gens {
                match self.vertex_part(v, g)? {
                    Some(x) => inner.push(x),
                    None => continue 'v,
                }
            }
            let sub = self.vo(v).subgroup(&inner)?;
            return Ok(Subgroup { gens: gens.to_vec(), kind: SubKind::Vertex { vertex: v, inner: Box::new(sub) } });
        }
        Err(Error::capability(self.describe(), "SUBGROUP_MEMBERSHIP outside vertex subgroups"))
    }

    fn subgroup_contains(&self, h: &Subgroup, g: &Elem) -> Result<Option<Witness>> {
        let (v, inner) = self.inner_of(h)?;
        match self.vertex_part(v, g)? {
            Some(x) => self.vo(v).subgroup_contains(inner, &x),
            None => Ok(None),
        }
    }

    fn decompose(&self, h: &Subgroup, g: &Elem) -> Result<(Elem, Elem)> {
        let (v, inner) = self.inner_of(h)?;
        let mut y = self.unpack(g)?;
        for &a in self.gamma(v) {
            self.push_arrow(&mut y, a)?;
        }
        let last = Self::last_mut(&mut y);
        let (r, k) = self.vo(v).decompose(inner, last)?;
        *last = r;
        for &a in self.gamma(v).iter().rev() {
            self.push_arrow(&mut y, rev(a))?;
        }
        Ok((Self::pack(y), self.embed(v, &k)?))
    }

    fn conjugators_into(&self, g: &Elem, h: &Subgroup) -> Result<ConjugatorSet> {
        let o = self.single_oracle("CONJUGATORS_INTO_SUBGROUP")?;
        let (_, inner) = self.inner_of(h)?;
        let set = o.conjugators_into(&self.single(g)?, inner)?;
        Ok(ConjugatorSet {
            pairs: set.pairs.into_iter().map(|(x, c)| (Self::wrap(x), Self::wrap(c))).collect(),
            centralizer: set.centralizer.into_iter().map(Self::wrap).collect(),
            complete: set.complete,
        })
    }

    fn conjugacy_search(&self, u: &Elem, v: &Elem) -> Result<Option<Elem>> {
        let o = self.single_oracle("CONJUGACY")?;
        Ok(o.conjugacy_search(&self.single(u)?, &self.single(v)?)?.map(Self::wrap))
    }

    fn centralizer_gens(&self, g: &Elem) -> Result<Vec<Elem>> {
        let o = self.single_oracle("CENTRALIZER_GENS")?;
        Ok(o.centralizer_gens(&self.single(g)?)?.into_iter().map(Self::wrap).collect())
    }

    fn center_gens(&self) -> Result<Vec<Elem>> {
        let o = self.single_oracle("CENTER_GENS")?;
        Ok(o.center_gens()?.into_iter().map(Self::wrap).collect())
    }

    fn elements(&self) -> Option<Vec<Elem>> {
        if !self.is_single_vertex() {
            return None;
        }
        Some(self.vo(self.base).elements()?.into_iter().map(Self::wrap).collect())
    }

    fn outer_order(&self, images: &[Elem], bound: usize) -> Result<OuterOrder> {
        let o = self.single_oracle("OUTER_ORDER")?;
        let inner: Vec<Elem> = images.iter().map(|g| self.single(g)).collect::<Result<_>>()?;
        Ok(match o.outer_order(&inner, bound)? {
            OuterOrder::Finite { n, a0 } => OuterOrder::Finite { n, a0: Self::wrap(a0) },
            other => other,
        })
    }

    fn intersect(&self, a: &Subgroup, b: &Subgroup) -> Result<Subgroup> {
        let o = self.single_oracle("SUBGROUP_INTERSECTION")?;
        let (_, ia) = self.inner_of(a)?;
        let (_, ib) = self.inner_of(b)?;
        let inner = o.intersect(ia, ib)?;
        let gens = inner.gens.iter().cloned().map(Self::wrap).collect();
        Ok(Subgroup { gens, kind: SubKind::Vertex { vertex: self.base, inner: Box::new(inner) } })
    }
}

/// Amalgam data produced by splitting along a tree edge.
#[derive(Debug, Clone)]
pub struct TreeSplit {
    pub edge: usize,
    pub a: Pi1Oracle,
    pub b: Pi1Oracle,
    /// Edge group into `a` (image `C_A`) and into `b` (image `C_B`).
    pub into_a: Monomorphism,
    pub into_b: Monomorphism,
}

/// HNN data produced by splitting along a non-tree edge.
#[derive(Debug, Clone)]
pub struct LoopSplit {
    pub edge: usize,
    pub base: Pi1Oracle,
    /// Edge group into the base with image `C_{-1}` (origin side) and `C_{+1}`.
    pub into_minus: Monomorphism,
    pub into_plus: Monomorphism,
}

#[derive(Debug, Clone)]
pub enum Split {
    Amalgam(TreeSplit),
    Hnn(LoopSplit),
}

impl Pi1Oracle {
    /// Splits this fundamental group along one of its edges.
    pub fn decompose_edge(&self, e: usize) -> Result<Split> {
        if !self.edges.contains(&e) {
            return Err(Error::Invalid(vec![format!("edge {e} is not in {}", self.describe())]));
        }
        let g = self.gog.clone();
        let (o, t) = g.graph.edges[e];
        let minus = g.arrow_mono(2 * e)?;
        let plus = g.arrow_mono(2 * e + 1)?;
        let mut rest = self.edges.clone();
        rest.remove(&e);
        if self.tree.contains(&e) {
            let mut tree = self.tree.clone();
            tree.remove(&e);
            let side = |v: usize| -> Result<Pi1Oracle> {
                let vs = g.graph.component(v, &tree);
                let es: BTreeSet<usize> = rest
                    .iter()
                    .copied()
                    .filter(|&f| vs.contains(&g.graph.edges[f].0))
                    .collect();
                let ts: BTreeSet<usize> = tree.iter().copied().filter(|f| es.contains(f)).collect();
                Pi1Oracle::new(g.clone(), vs, es, ts, v)
            };
            let a = side(o)?;
            let b = side(t)?;
            let ia = minus.images.iter().map(|x| a.embed(o, x)).collect::<Result<Vec<_>>>()?;
            let ib = plus.images.iter().map(|x| b.embed(t, x)).collect::<Result<Vec<_>>>()?;
            let a_or: Oracle = Arc::new(a.clone());
            let b_or: Oracle = Arc::new(b.clone());
            let into_a = Monomorphism::unchecked(minus.source.clone(), a_or, minus.domain_gens.clone(), ia)?;
            let into_b = Monomorphism::unchecked(plus.source.clone(), b_or, plus.domain_gens.clone(), ib)?;
            Ok(Split::Amalgam(TreeSplit { edge: e, a, b, into_a, into_b }))
        } else {
            let base = Pi1Oracle::new(g.clone(), self.vertices.clone(), rest, self.tree.clone(), self.base)?;
            let im = minus.images.iter().map(|x| base.embed(o, x)).collect::<Result<Vec<_>>>()?;
            let ip = plus.images.iter().map(|x| base.embed(t, x)).collect::<Result<Vec<_>>>()?;
            let b_or: Oracle = Arc::new(base.clone());
            let into_minus = Monomorphism::unchecked(minus.source.clone(), b_or.clone(), minus.domain_gens.clone(), im)?;
            let into_plus = Monomorphism::unchecked(plus.source.clone(), b_or, plus.domain_gens.clone(), ip)?;
            Ok(Split::Hnn(LoopSplit { edge: e, base, into_minus, into_plus }))
        }
    }
}

/// Result of collapsing redundant tree edges.
#[derive(Debug, Clone)]
pub struct Minimal {
    pub gog: GraphOfGroups,
    pub dec: Decomposition,
    /// Old vertex id to new vertex id.
    pub vertex_map: Vec<usize>,
    /// Old edge id to new edge id, `None` for collapsed edges.
    pub edge_map: Vec<Option<usize>>,
    /// Per old vertex, words for its generators in the surviving vertex group.
    letter_images: Vec<Vec<Word>>,
}

impl Minimal {
    /// Rewrites a word over the old generators into the new ones.
    pub fn translate(&self, w: &Word) -> Result<Word> {
        let mut out = Word::empty();
        for l in &w.letters {
            let piece = match l.gen.scope {
                Scope::Vertex(v) => self.letter_images[v]
                    .get(l.gen.index)
                    .cloned()
                    .ok_or_else(|| Error::Foreign { elem: l.gen.to_string(), group: "graph of groups".into() })?,
                Scope::Stable(e) => match self.edge_map.get(e).copied().flatten() {
                    Some(f) => Word::letter(GeneratorId::stable(f), 1),
                    None => Word::empty(),
                },
                Scope::Edge(_) => {
                    return Err(Error::Foreign { elem: l.gen.to_string(), group: "graph of groups".into() })
                }
            };
            out = out.concat(&if l.exp < 0 { piece.invert() } else { piece });
        }
        Ok(out)
    }
}

impl Minimal {
    /// Rewrites a word over the new generators into the old ones; each
    /// surviving vertex keeps the generators of one old vertex.
    pub fn untranslate(&self, w: &Word) -> Result<Word> {
        let mut keeper = BTreeMap::new();
        for (old, imgs) in self.letter_images.iter().enumerate() {
            let new = self.vertex_map[old];
            let same = imgs
                .iter()
                .enumerate()
                .all(|(i, img)| *img == Word::letter(GeneratorId::vertex(new, i), 1));
            if same && self.gog.vertices[new].gen_names.len() == imgs.len() {
                keeper.entry(new).or_insert(old);
            }
        }
        let foreign = |g: &GeneratorId| Error::Foreign { elem: g.to_string(), group: "minimal graph of groups".into() };
        let mut out = Vec::new();
        for l in &w.letters {
            let gen = match l.gen.scope {
                Scope::Vertex(v) => GeneratorId::vertex(*keeper.get(&v).ok_or_else(|| foreign(&l.gen))?, l.gen.index),
                Scope::Stable(f) => {
                    let e = self.edge_map.iter().position(|m| *m == Some(f)).ok_or_else(|| foreign(&l.gen))?;
                    GeneratorId::stable(e)
                }
                Scope::Edge(_) => return Err(foreign(&l.gen)),
            };
            out.push(Letter::new(gen, l.exp));
        }
        Ok(Word::from_letters(out))
    }
}

/// Collapses every tree edge whose group fills an endpoint vertex group.
/// The absorbed vertex group is identified with a subgroup of the other
/// endpoint, so no new oracle is needed.
pub fn make_minimal(gog: &GraphOfGroups, dec: &Decomposition) -> Result<Minimal> {
    if !gog.is_concrete() {
        return Err(Error::Unsupported("minimality of a symbolic graph of groups".into()));
    }
    let mut cur = gog.clone();
    let mut cur_dec = dec.clone();
    let mut vertex_map: Vec<usize> = (0..gog.graph.n_vertices).collect();
    let mut edge_map: Vec<Option<usize>> = (0..gog.graph.n_edges()).map(Some).collect();
    let mut letter_images: Vec<Vec<Word>> = gog
        .vertices
        .iter()
        .enumerate()
        .map(|(v, vg)| (0..vg.gen_names.len()).map(|i| Word::letter(GeneratorId::vertex(v, i), 1)).collect())
        .collect();
    loop {
        let mut found = None;
        for &e in &cur_dec.tree {
            for a in [2 * e, 2 * e + 1] {
                let v = cur.origin(a);
                let m = cur.arrow_mono(a)?;
                let mut full = true;
                for g in m.target.generators() {
                    if m.target.subgroup_contains(&m.image, &g)?.is_none() {
                        full = false;
                        break;
                    }
                }
                if full {
                    found = Some((e, a, v));
                    break;
                }
            }
            if found.is_some() {
                break;
            }
        }
        let Some((e, a, dead)) = found else { break };
        let keep = cur.terminus(a);
        // G_dead = m_a(E) is carried across `a` into G_keep.
        let absorb = |x: &Elem| -> Result<Elem> {
            cur.cross(a, x)?.ok_or_else(|| Error::Verification("collapsed vertex leaves the edge group".into()))
        };
        let keep_oracle = cur.vertex_oracle(keep)?.clone();
        let dead_oracle = cur.vertex_oracle(dead)?.clone();
        let mut dead_words = Vec::new();
        for i in 0..cur.vertices[dead].gen_names.len() {
            let x = dead_oracle.letter(&GeneratorId::vertex(dead, i))?;
            dead_words.push(keep_oracle.to_word(&absorb(&x)?, Scope::Vertex(keep))?);
        }
        let new_index = |v: usize| if v > dead { v - 1 } else { v };
        let mut specs = Vec::new();
        let mut new_edge_ids = Vec::new();
        for f in 0..cur.graph.n_edges() {
            if f == e {
                new_edge_ids.push(None);
                continue;
            }
            new_edge_ids.push(Some(specs.len()));
            let (o, t) = cur.graph.edges[f];
            let minus = cur.arrow_mono(2 * f)?;
            let plus = cur.arrow_mono(2 * f + 1)?;
            let moved = |v: usize, m: &Monomorphism| -> Result<Vec<Elem>> {
                if v == dead { m.images.iter().map(&absorb).collect() } else { Ok(m.images.clone()) }
            };
            let remap = |v: usize| new_index(if v == dead { keep } else { v });
            specs.push(EdgeSpec {
                name: cur.edges[f].name.clone(),
                from: remap(o),
                to: remap(t),
                group: cur.edges[f].group.clone(),
                domain: minus.domain_gens.clone(),
                minus: EdgeImages::Elems(moved(o, minus)?),
                plus: EdgeImages::Elems(moved(t, plus)?),
            });
        }
        let vertices: Vec<VertexGroup> = cur
            .vertices
            .iter()
            .enumerate()
            .filter(|&(v, _)| v != dead)
            .map(|(_, vg)| VertexGroup::concrete(vg.name.clone(), vg.oracle.clone().expect("concrete")))
            .collect();
        let next = GraphOfGroups::new(vertices, specs)?;
        let tree = cur_dec.tree.iter().filter_map(|&f| new_edge_ids[f]).collect();
        let order = cur_dec.order.iter().filter_map(|&f| new_edge_ids[f]).collect();
        // Rewrite earlier letter images: letters of `dead` become words in `keep`.
        for imgs in letter_images.iter_mut() {
            for w in imgs.iter_mut() {
                let mut out = Word::empty();
                for l in &w.letters {
                    let piece = match l.gen.scope {
                        Scope::Vertex(v) if v == dead => dead_words[l.gen.index].clone(),
                        Scope::Vertex(v) => Word::letter(GeneratorId::vertex(v, l.gen.index), 1),
                        _ => Word::from_letters(vec![Letter::new(l.gen, 1)]),
                    };
                    let piece = if l.exp < 0 { piece.invert() } else { piece };
                    out = out.concat(&piece);
                }
                *w = relabel(&out, &new_index);
            }
        }
        for v in vertex_map.iter_mut() {
            *v = new_index(if *v == dead { keep } else { *v });
        }
        for m in edge_map.iter_mut() {
            *m = m.and_then(|f| new_edge_ids[f]);
        }
        cur = next;
        cur_dec = Decomposition { tree, order };
    }
    Ok(Minimal { gog: cur, dec: cur_dec, vertex_map, edge_map, letter_images })
}

fn relabel(w: &Word, f: &dyn Fn(usize) -> usize) -> Word {
    Word::from_letters(
        w.letters
            .iter()
            .map(|l| match l.gen.scope {
                Scope::Vertex(v) => Letter::new(GeneratorId::vertex(f(v), l.gen.index), l.exp),
                _ => *l,
            })
            .collect(),
    )
}
