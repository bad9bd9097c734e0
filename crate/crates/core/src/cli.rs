//! The GOG text format and the command-line front end.
//!
//! ```text
//! # comment
//! vertex A finite order=4 table=0 1 2 3 1 2 3 0 2 3 0 1 3 0 1 2
//! vertex B abelian rank=1
//! vertex S presented gens=x,y rels=x^2 = y^3; [x,y]
//! edge c from=A to=B tree
//!   group finite order=2 table=0 1 1 0
//!   phi- g1 = g2
//!   phi+ g1 = g3
//! order c
//! ```
//!
//! Letters inside a vertex are its generator names (`g<i>` for backend
//! groups). Words on the command line qualify them as `<vertex>.<name>`;
//! `t<edge>` is the stable letter of a non-tree edge.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use crate::backends::{Elem, FiniteGroup, FreeAbelianGroup, FreeGroup, GroupOracle, Oracle};
use crate::decide::{self, CentralizerReport, CommuteReport};
use crate::error::{Error, Result, Verdict};
use crate::gog::{
    canonical_presentation, Decomposition, EdgeImages, EdgeSpec, GraphOfGroups, Pi1Oracle, VertexGroup,
};
use crate::trajets::{find_trajet, is_sans_circuit, SansCircuit};
use crate::words::{format_word, GeneratorId, Scope, Word};

/// A word as written: atoms with nonzero exponents.
pub type Atoms = Vec<(String, i64)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupDecl {
    Finite { order: usize, table: Vec<usize> },
    Abelian { rank: usize },
    Free { rank: usize },
    Presented { gens: Vec<String>, rels: Vec<Atoms> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexDecl {
    pub name: String,
    pub group: GroupDecl,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeDecl {
    pub name: String,
    pub from: String,
    pub to: String,
    pub tree: bool,
    pub group: GroupDecl,
    /// `(edge generator, image)` in declaration order.
    pub minus: Vec<(String, Atoms)>,
    pub plus: Vec<(String, Atoms)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GogDocument {
    pub vertices: Vec<VertexDecl>,
    pub edges: Vec<EdgeDecl>,
    pub order: Option<Vec<String>>,
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

/// Splits `x^k` into its name and exponent.
fn atom(text: &str) -> std::result::Result<(String, i64), String> {
    let (name, k) = match text.split_once('^') {
        Some((n, e)) => (n, e.parse::<i64>().map_err(|_| format!("bad exponent in `{text}`"))?),
        None => (text, 1),
    };
    if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '.') {
        return Err(format!("bad generator name `{name}`"));
    }
    Ok((name.to_string(), k))
}

fn atoms(text: &str) -> std::result::Result<Atoms, String> {
    let mut out = Vec::new();
    for a in text.split_whitespace() {
        if a == "eps" || a == "1" {
            continue;
        }
        let (n, k) = atom(a)?;
        if k != 0 {
            out.push((n, k));
        }
    }
    Ok(out)
}

fn invert(w: &Atoms) -> Atoms {
    w.iter().rev().map(|(n, k)| (n.clone(), -k)).collect()
}

/// A relator: a word, `lhs = rhs`, or a commutator `[u,v]`.
fn relator(text: &str) -> std::result::Result<Atoms, String> {
    let t = text.trim();
    if let Some(inner) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        let (u, v) = inner.split_once(',').ok_or("commutator needs two entries")?;
        let (u, v) = (atoms(u)?, atoms(v)?);
        return Ok([u.clone(), v.clone(), invert(&u), invert(&v)].concat());
    }
    if let Some((l, r)) = t.split_once('=') {
        return Ok([atoms(l)?, invert(&atoms(r)?)].concat());
    }
    atoms(t)
}

fn render_atoms(w: &Atoms) -> String {
    if w.is_empty() {
        return "eps".into();
    }
    let parts: Vec<String> =
        w.iter().map(|(n, k)| if *k == 1 { n.clone() } else { format!("{n}^{k}") }).collect();
    parts.join(" ")
}

/// `key=value` fields; the last recognised key may swallow the rest of the line.
fn fields<'a>(
    line: usize,
    rest: &'a str,
    offset: usize,
    tail_keys: &[&str],
) -> Result<Vec<(&'a str, &'a str, usize)>> {
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < rest.len() {
        let s = &rest[pos..];
        let skip = s.len() - s.trim_start().len();
        pos += skip;
        if pos >= rest.len() {
            break;
        }
        let s = &rest[pos..];
        let col = offset + pos + 1;
        let Some((key, after)) = s.split_once('=') else {
            let word = s.split_whitespace().next().unwrap_or("");
            out.push((word, "", col));
            pos += word.len();
            continue;
        };
        if key.contains(char::is_whitespace) {
            let word = s.split_whitespace().next().unwrap_or("");
            out.push((word, "", col));
            pos += word.len();
            continue;
        }
        if tail_keys.contains(&key) {
            let end = tail_keys
                .iter()
                .filter(|k| **k != key)
                .filter_map(|k| after.find(&format!(" {k}=")))
                .min()
                .unwrap_or(after.len());
            out.push((key, after[..end].trim(), col));
            pos += key.len() + 1 + end;
        } else {
            let v = after.split_whitespace().next().unwrap_or("");
            if v.is_empty() {
                return Err(perr(line, col, format!("empty value for `{key}`")));
            }
            out.push((key, v, col));
            pos += key.len() + 1 + v.len();
        }
    }
    Ok(out)
}

fn parse_group(line: usize, rest: &str, offset: usize) -> Result<GroupDecl> {
    let rest_t = rest.trim_start();
    let offset = offset + rest.len() - rest_t.len();
    let (kind, tail) = rest_t.split_once(char::is_whitespace).unwrap_or((rest_t, ""));
    let toff = offset + kind.len();
    let fs = fields(line, tail, toff, &["table", "gens", "rels"])?;
    let get = |k: &str| fs.iter().find(|f| f.0 == k).map(|f| (f.1, f.2));
    let num = |k: &str| -> Result<usize> {
        let (v, c) = get(k).ok_or_else(|| perr(line, offset + 1, format!("`{kind}` needs {k}=")))?;
        v.parse().map_err(|_| perr(line, c, format!("{k} must be a non-negative integer")))
    };
    for (k, _, c) in &fs {
        let allowed: &[&str] = match kind {
            "finite" => &["order", "table"],
            "abelian" | "free" => &["rank"],
            "presented" => &["gens", "rels"],
            _ => &[],
        };
        if !allowed.contains(k) {
            return Err(perr(line, *c, format!("unexpected field `{k}` for `{kind}`")));
        }
    }
    match kind {
        "finite" => {
            let order = num("order")?;
            let (t, c) = get("table").ok_or_else(|| perr(line, offset + 1, "finite group needs table="))?;
            let table = t
                .split(|ch: char| ch.is_whitespace() || ch == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| perr(line, c, "table entries must be non-negative integers"))?;
            if table.len() != order * order {
                return Err(perr(line, c, format!("table has {} entries, expected {}", table.len(), order * order)));
            }
            Ok(GroupDecl::Finite { order, table })
        }
        "abelian" => Ok(GroupDecl::Abelian { rank: num("rank")? }),
        "free" => Ok(GroupDecl::Free { rank: num("rank")? }),
        "presented" => {
            let gens: Vec<String> = match get("gens") {
                Some((g, _)) => g.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
                None => Vec::new(),
            };
            for g in &gens {
                atom(g).map_err(|m| perr(line, offset + 1, m))?;
            }
            let rels = match get("rels") {
                Some((r, c)) => r
                    .split(';')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| relator(s).map_err(|m| perr(line, c, m)))
                    .collect::<Result<Vec<_>>>()?,
                None => Vec::new(),
            };
            Ok(GroupDecl::Presented { gens, rels })
        }
        other => Err(perr(line, offset + 1, format!("unknown group kind `{other}`"))),
    }
}

fn render_group(g: &GroupDecl) -> String {
    match g {
        GroupDecl::Finite { order, table } => {
            let t: Vec<String> = table.iter().map(|x| x.to_string()).collect();
            format!("finite order={order} table={}", t.join(" "))
        }
        GroupDecl::Abelian { rank } => format!("abelian rank={rank}"),
        GroupDecl::Free { rank } => format!("free rank={rank}"),
        GroupDecl::Presented { gens, rels } => {
            let r: Vec<String> = rels.iter().map(render_atoms).collect();
            format!("presented gens={} rels={}", gens.join(","), r.join("; "))
        }
    }
}

impl GogDocument {
    pub fn parse(text: &str) -> Result<GogDocument> {
        let mut doc = GogDocument::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let indented = content.starts_with(char::is_whitespace);
            let body = content.trim_start();
            let offset = content.len() - body.len();
            let (kw, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
            let roff = offset + kw.len();
            match (indented, kw) {
                (false, "vertex") => {
                    let r = rest.trim_start();
                    let (name, g) = r.split_once(char::is_whitespace).unwrap_or((r, ""));
                    if name.is_empty() {
                        return Err(perr(line, roff + 1, "vertex needs a name"));
                    }
                    if doc.vertices.iter().any(|v| v.name == name) {
                        return Err(perr(line, roff + 2, format!("vertex `{name}` declared twice")));
                    }
                    let goff = roff + (rest.len() - r.len()) + name.len();
                    doc.vertices.push(VertexDecl { name: name.into(), group: parse_group(line, g, goff)? });
                }
                (false, "edge") => {
                    let r = rest.trim_start();
                    let (name, tail) = r.split_once(char::is_whitespace).unwrap_or((r, ""));
                    if name.is_empty() {
                        return Err(perr(line, roff + 1, "edge needs a name"));
                    }
                    if doc.edges.iter().any(|e| e.name == name) {
                        return Err(perr(line, roff + 2, format!("edge `{name}` declared twice")));
                    }
                    let toff = roff + (rest.len() - r.len()) + name.len();
                    let (mut from, mut to, mut tree) = (None, None, false);
                    for (k, v, c) in fields(line, tail, toff, &[])? {
                        match k {
                            "from" | "to" => {
                                if !doc.vertices.iter().any(|x| x.name == v) {
                                    return Err(perr(line, c, format!("undeclared vertex `{v}`")));
                                }
                                if k == "from" {
                                    from = Some(v.to_string());
                                } else {
                                    to = Some(v.to_string());
                                }
                            }
                            "tree" if v.is_empty() => tree = true,
                            _ => return Err(perr(line, c, format!("unexpected `{k}` in edge declaration"))),
                        }
                    }
                    let (Some(from), Some(to)) = (from, to) else {
                        return Err(perr(line, roff + 1, "edge needs from= and to="));
                    };
                    doc.edges.push(EdgeDecl {
                        name: name.into(),
                        from,
                        to,
                        tree,
                        group: GroupDecl::Free { rank: 0 },
                        minus: Vec::new(),
                        plus: Vec::new(),
                    });
                }
                (true, "group" | "phi-" | "phi+") => {
                    let Some(edge) = doc.edges.last_mut() else {
                        return Err(perr(line, offset + 1, format!("`{kw}` outside an edge block")));
                    };
                    if kw == "group" {
                        edge.group = parse_group(line, rest, roff)?;
                        continue;
                    }
                    let (gen, img) = rest
                        .split_once('=')
                        .ok_or_else(|| perr(line, roff + 1, format!("expected `{kw} <gen> = <word>`")))?;
                    let gen = gen.trim();
                    atom(gen).map_err(|m| perr(line, roff + 2, m))?;
                    let img = atoms(img).map_err(|m| perr(line, roff + 2 + gen.len(), m))?;
                    let list = if kw == "phi-" { &mut edge.minus } else { &mut edge.plus };
                    list.push((gen.into(), img));
                }
                (false, "order") => {
                    let ids: Vec<String> = rest.split_whitespace().map(String::from).collect();
                    for id in &ids {
                        if !doc.edges.iter().any(|e| &e.name == id) {
                            return Err(perr(line, roff + 2, format!("undeclared edge `{id}` in order")));
                        }
                    }
                    doc.order = Some(ids);
                }
                _ => return Err(perr(line, offset + 1, format!("unexpected `{kw}`"))),
            }
        }
        Ok(doc)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for v in &self.vertices {
            let _ = writeln!(s, "vertex {} {}", v.name, render_group(&v.group));
        }
        for e in &self.edges {
            let _ = writeln!(s, "edge {} from={} to={}{}", e.name, e.from, e.to, if e.tree { " tree" } else { "" });
            let _ = writeln!(s, "  group {}", render_group(&e.group));
            for (g, w) in &e.minus {
                let _ = writeln!(s, "  phi- {g} = {}", render_atoms(w));
            }
            for (g, w) in &e.plus {
                let _ = writeln!(s, "  phi+ {g} = {}", render_atoms(w));
            }
        }
        if let Some(o) = &self.order {
            let _ = writeln!(s, "order {}", o.join(" "));
        }
        s
    }

    fn vertex_index(&self, name: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::Invalid(vec![format!("undeclared vertex `{name}`")]))
    }

    /// Resolves names, constructs the backends and validates the graph.
    pub fn build(&self) -> Result<(Arc<GraphOfGroups>, Decomposition)> {
        let mut vertices = Vec::new();
        for v in &self.vertices {
            vertices.push(match &v.group {
                GroupDecl::Presented { gens, rels } => {
                    let idx = self.vertex_index(&v.name)?;
                    let words = rels
                        .iter()
                        .map(|r| local_word(r, idx, &v.name, gens))
                        .collect::<Result<Vec<_>>>()?;
                    VertexGroup::presented(v.name.clone(), gens.clone(), words)
                }
                g => VertexGroup::concrete(v.name.clone(), backend(g, &v.name)?),
            });
        }
        let local_names = |v: usize| -> Vec<String> {
            match &self.vertices[v].group {
                GroupDecl::Presented { gens, .. } => gens.clone(),
                g => (0..backend_gen_count(g)).map(|i| format!("g{i}")).collect(),
            }
        };
        let mut edges = Vec::new();
        for e in &self.edges {
            let (from, to) = (self.vertex_index(&e.from)?, self.vertex_index(&e.to)?);
            let eg = match &e.group {
                GroupDecl::Presented { .. } => None,
                g => Some(backend(g, &e.name)?),
            };
            let edge_names: Vec<String> = match &e.group {
                GroupDecl::Presented { gens, .. } => gens.clone(),
                g => (0..backend_gen_count(g)).map(|i| format!("g{i}")).collect(),
            };
            let keys: Vec<&String> = e.minus.iter().map(|(g, _)| g).collect();
            if keys != e.plus.iter().map(|(g, _)| g).collect::<Vec<_>>() {
                return Err(Error::Invalid(vec![format!("edge {}: phi- and phi+ must list the same generators", e.name)]));
            }
            let mut domain = Vec::new();
            for k in &keys {
                let i = edge_names
                    .iter()
                    .position(|n| n == *k)
                    .ok_or_else(|| Error::Invalid(vec![format!("edge {}: unknown edge generator `{k}`", e.name)]))?;
                let g = eg.as_ref().map(|o| o.letter(&GeneratorId::edge(0, i))).transpose()?;
                domain.push(g.unwrap_or(Elem::Table(i)));
            }
            let images = |list: &[(String, Atoms)], v: usize| -> Result<Vec<Word>> {
                list.iter().map(|(_, w)| local_word(w, v, &self.vertices[v].name, &local_names(v))).collect()
            };
            edges.push(EdgeSpec {
                name: e.name.clone(),
                from,
                to,
                group: eg,
                domain,
                minus: EdgeImages::Words(images(&e.minus, from)?),
                plus: EdgeImages::Words(images(&e.plus, to)?),
            });
        }
        let g = GraphOfGroups::new(vertices, edges)?;
        let tree: BTreeSet<usize> = self.edges.iter().enumerate().filter(|(_, e)| e.tree).map(|(i, _)| i).collect();
        let mut dec = if tree.is_empty() { Decomposition::default_for(&g.graph)? } else { Decomposition::with_tree(&g.graph, tree) };
        if let Some(order) = &self.order {
            dec.order = order.iter().map(|n| self.edges.iter().position(|e| &e.name == n).expect("checked")).collect();
        }
        let bad = dec.check(&g.graph);
        if !bad.is_empty() {
            return Err(Error::Invalid(bad));
        }
        Ok((Arc::new(g), dec))
    }
}

fn backend_gen_count(g: &GroupDecl) -> usize {
    match g {
        GroupDecl::Finite { order, .. } => *order,
        GroupDecl::Abelian { rank } | GroupDecl::Free { rank } => *rank,
        GroupDecl::Presented { gens, .. } => gens.len(),
    }
}

fn backend(g: &GroupDecl, name: &str) -> Result<Oracle> {
    Ok(match g {
        GroupDecl::Finite { order, table } => {
            Arc::new(FiniteGroup::from_table(name, table.chunks(*order).map(<[usize]>::to_vec).collect())?)
        }
        GroupDecl::Abelian { rank } => Arc::new(FreeAbelianGroup::new(*rank)?),
        GroupDecl::Free { rank } => Arc::new(FreeGroup::new(*rank)?),
        GroupDecl::Presented { .. } => unreachable!("presented groups have no backend"),
    })
}

/// Word over the generators of vertex `v`; atoms may be qualified by the vertex name.
fn local_word(w: &Atoms, v: usize, vname: &str, names: &[String]) -> Result<Word> {
    let mut out = Word::empty();
    for (a, k) in w {
        let bare = a.strip_prefix(vname).and_then(|r| r.strip_prefix('.')).unwrap_or(a);
        let i = names.iter().position(|n| n == bare).ok_or_else(|| Error::WordSyntax {
            text: render_atoms(w),
            reason: format!("`{a}` is not a generator of {vname}"),
        })?;
        out = out.concat(&Word::power_of(GeneratorId::vertex(v, i), *k));
    }
    Ok(out)
}

/// Parses a command-line word: `<vertex>.<gen>`, `t<edge>`, `eps`.
pub fn parse_word(gog: &GraphOfGroups, text: &str) -> Result<Word> {
    Word::parse_with(text, &mut |name| {
        if let Some((v, g)) = name.split_once('.') {
            let vi = gog.vertices.iter().position(|x| x.name == v)?;
            let i = gog.vertices[vi].gen_names.iter().position(|n| n == g)?;
            return Some(GeneratorId::vertex(vi, i));
        }
        let e = name.strip_prefix('t')?;
        gog.edges.iter().position(|x| x.name == e).map(GeneratorId::stable)
    })
}

pub fn show_word(gog: &GraphOfGroups, w: &Word) -> String {
    format_word(w, &|g| gog.vertex_gen_name(g))
}

#[derive(Parser, Debug)]
#[command(name = "bass-serre", version, about = "Decision procedures for fundamental groups of graphs of groups")]
pub struct Cli {
    /// GOG file describing the graph of groups.
    pub file: PathBuf,
    /// Bound on trajet length and conjugator search depth.
    #[arg(long, default_value_t = decide::DEFAULT_DEPTH)]
    pub depth: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Check the file and the graph of groups.
    Validate,
    /// Canonical presentation of the fundamental group.
    Present,
    /// Normal form of a word.
    Nf { word: String },
    /// Decide whether two words are conjugate.
    Conj { u: String, v: String },
    /// Classify a commuting pair.
    Commute { x: String, y: String },
    /// Generators of the center.
    Center,
    /// Centralizer of an element (graphs without circuits).
    Centralizer { word: String },
    /// Search a trajet between `<word>@<vertex>` endpoints.
    Trajet { from: String, to: String },
    /// Double of a vertex group along subgroups given as comma-separated words.
    Double { base: String, subgroups: Vec<String> },
    /// Decide whether the graph of groups has no nontrivial reduced circuit.
    SansCircuit,
    /// Print the file in canonical form.
    Print,
}

pub const EXIT_DECIDED: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub code: i32,
    pub text: String,
}

struct Out(Vec<String>);

impl Out {
    fn kv(&mut self, k: &str, v: impl std::fmt::Display) {
        self.0.push(format!("{k}: {v}"));
    }

    fn done(self, code: i32) -> Report {
        let mut text = self.0.join("\n");
        text.push('\n');
        Report { code, text }
    }
}

fn verdict_code<T>(v: &Verdict<T>) -> i32 {
    if v.is_unknown() {
        EXIT_UNKNOWN
    } else {
        EXIT_DECIDED
    }
}

/// Runs one subcommand on the text of a GOG file.
pub fn run(command: &Command, source: &str, depth: usize) -> Report {
    let mut out = Out(Vec::new());
    match run_inner(command, source, depth, &mut out) {
        Ok(code) => out.done(code),
        Err(e) => {
            out.kv("ERROR", e);
            out.done(EXIT_ERROR)
        }
    }
}

fn run_inner(command: &Command, source: &str, depth: usize, out: &mut Out) -> Result<i32> {
    let doc = GogDocument::parse(source)?;
    if let Command::Print = command {
        out.0.push(doc.render().trim_end().to_string());
        return Ok(EXIT_DECIDED);
    }
    if let Command::Validate = command {
        match doc.build() {
            Ok((g, dec)) => {
                out.kv("VALID", "yes");
                out.kv("VERTICES", g.graph.n_vertices);
                out.kv("EDGES", g.graph.n_edges());
                out.kv("CONCRETE", if g.is_concrete() { "yes" } else { "no" });
                let tree: Vec<&str> = dec.tree.iter().map(|&e| g.edges[e].name.as_str()).collect();
                out.kv("TREE", if tree.is_empty() { "none".to_string() } else { tree.join(" ") });
            }
            Err(Error::Invalid(bad)) => {
                out.kv("VALID", "no");
                for b in bad {
                    out.kv("VIOLATION", b);
                }
            }
            Err(e) => {
                out.kv("VALID", "no");
                out.kv("VIOLATION", e);
            }
        }
        return Ok(EXIT_DECIDED);
    }
    let (gog, dec) = doc.build()?;
    let show = |w: &Word| show_word(&gog, w);
    if let Command::Present = command {
        let p = canonical_presentation(&gog, &dec)?;
        out.kv("GENERATORS", p.generators.len());
        out.kv("RELATIONS", p.relations.len());
        out.kv("GENERATOR_NAMES", p.names.join(" "));
        for r in &p.relations {
            out.kv("RELATION", show(r));
        }
        return Ok(EXIT_DECIDED);
    }
    if !gog.is_concrete() {
        return Err(Error::Unsupported("this command needs backend groups at every vertex and edge".into()));
    }
    let full = Pi1Oracle::full(gog.clone(), &dec)?;
    let word = |t: &str| parse_word(&gog, t);
    match command {
        Command::Nf { word: w } => {
            let g = full.eval_word(&word(w)?)?;
            out.kv("NF", show(&full.to_word(&g, Scope::Vertex(0))?));
            out.kv("PATH_LENGTH", full.path_length(&g)?);
            out.kv("TRIVIAL", if g == full.identity() { "yes" } else { "no" });
            Ok(EXIT_DECIDED)
        }
        Command::Conj { u, v } => {
            let r = decide::is_conjugate_graph(&full, &dec, &word(u)?, &word(v)?, depth)?;
            match &r {
                Verdict::Yes(h) => {
                    out.kv("CONJUGATE", "YES");
                    out.kv("CONJUGATOR", show(h));
                }
                Verdict::No => out.kv("CONJUGATE", "NO"),
                Verdict::Unknown(why) => {
                    out.kv("CONJUGATE", "UNKNOWN");
                    out.kv("REASON", why);
                }
            }
            Ok(verdict_code(&r))
        }
        Command::Commute { x, y } => {
            let r = match decide::commute_classify_graph(&full, &dec, &word(x)?, &word(y)?) {
                Err(Error::NotCommuting) => {
                    out.kv("COMMUTE", "NO");
                    return Ok(EXIT_DECIDED);
                }
                r => r?,
            };
            out.kv("COMMUTE", "YES");
            match r {
                CommuteReport::VertexCoset { conj, vertex, swapped } => {
                    out.kv("CLASS", "VERTEX_COSET");
                    out.kv("VERTEX", &gog.vertices[vertex].name);
                    out.kv("CONJUGATOR", show(&conj));
                    out.kv("ELLIPTIC", if swapped { "y" } else { "x" });
                }
                CommuteReport::CircuitLabel { conj, trajet, swapped } => {
                    out.kv("CLASS", "CIRCUIT_LABEL");
                    out.kv("VERTEX", &gog.vertices[trajet.s_o].name);
                    out.kv("CONJUGATOR", show(&conj));
                    out.kv("ELLIPTIC", if swapped { "y" } else { "x" });
                    out.kv("CIRCUIT_LENGTH", trajet.len());
                    out.kv("LABEL", show(&trajet.label(&gog, full.tree())?));
                }
                CommuteReport::CyclicStructure { g, h, h_prime, w, j, k } => {
                    out.kv("CLASS", "CYCLIC");
                    out.kv("G", show(&g));
                    out.kv("H", show(&h));
                    out.kv("H_PRIME", show(&h_prime));
                    out.kv("W", show(&w));
                    out.kv("J", j);
                    out.kv("K", k);
                }
                CommuteReport::Unknown(why) => {
                    out.kv("CLASS", "UNKNOWN");
                    out.kv("REASON", why);
                    return Ok(EXIT_UNKNOWN);
                }
            }
            Ok(EXIT_DECIDED)
        }
        Command::Center => {
            let r = decide::center_graph(&gog, &dec)?;
            match &r {
                Verdict::Yes(gens) => {
                    let gens: Vec<String> = gens.iter().map(|w| show(&positive(w))).collect();
                    out.kv("CENTER", if gens.is_empty() { "trivial".to_string() } else { format!("⟨{}⟩", gens.join(", ")) });
                }
                Verdict::No => unreachable!("center search answers YES or UNKNOWN"),
                Verdict::Unknown(why) => {
                    out.kv("CENTER", "UNKNOWN");
                    out.kv("REASON", why);
                }
            }
            Ok(verdict_code(&r))
        }
        Command::Centralizer { word: w } => match decide::centralizer_structure(&full, &dec, &word(w)?) {
            Err(Error::NotSansCircuit) => {
                out.kv("CENTRALIZER", "UNKNOWN");
                out.kv("REASON", "the graph of groups has a circuit");
                Ok(EXIT_UNKNOWN)
            }
            Err(e) => Err(e),
            Ok(CentralizerReport::Vertex { conj, vertex, gens }) => {
                out.kv("CENTRALIZER", "VERTEX");
                out.kv("VERTEX", &gog.vertices[vertex].name);
                out.kv("CONJUGATOR", show(&conj));
                let gens: Vec<String> = gens.iter().map(show).collect();
                out.kv("GENERATORS", gens.join(", "));
                Ok(EXIT_DECIDED)
            }
            Ok(CentralizerReport::Cyclic { w, j }) => {
                out.kv("CENTRALIZER", "CYCLIC");
                out.kv("GENERATOR", show(&w));
                out.kv("EXPONENT", j);
                Ok(EXIT_DECIDED)
            }
            Ok(CentralizerReport::Unknown(why)) => {
                out.kv("CENTRALIZER", "UNKNOWN");
                out.kv("REASON", why);
                Ok(EXIT_UNKNOWN)
            }
        },
        Command::Trajet { from, to } => {
            let (x, s1) = endpoint(&gog, from)?;
            let (y, s2) = endpoint(&gog, to)?;
            let r = find_trajet(&full, &x, s1, &y, s2, depth)?;
            match &r {
                Verdict::Yes(t) => {
                    out.kv("TRAJET", "YES");
                    out.kv("LENGTH", t.len());
                    out.kv("LABEL", show(&t.label(&gog, full.tree())?));
                    for line in t.render(&gog, full.tree())?.lines() {
                        out.kv("STEP", line.trim());
                    }
                }
                Verdict::No => out.kv("TRAJET", "NO"),
                Verdict::Unknown(why) => {
                    out.kv("TRAJET", "UNKNOWN");
                    out.kv("REASON", why);
                }
            }
            Ok(verdict_code(&r))
        }
        Command::Double { base, subgroups } => {
            let v = doc.vertex_index(base)?;
            let o = gog.vertex_oracle(v)?.clone();
            let subs = subgroups
                .iter()
                .map(|s| {
                    s.split(',')
                        .map(|w| {
                            let atoms = atoms(w).map_err(|m| Error::WordSyntax { text: w.into(), reason: m })?;
                            o.eval_word(&local_word(&atoms, v, base, &gog.vertices[v].gen_names)?)
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let spec = decide::build_double(base, o.clone(), subs)?;
            let p = canonical_presentation(&spec.gog, &spec.dec)?;
            out.kv("DOUBLE_GENERATORS", p.generators.len());
            out.kv("DOUBLE_RELATIONS", p.relations.len());
            let Some(all) = o.elements() else {
                return Ok(EXIT_DECIDED);
            };
            let (mut pairs, mut agree, mut unknown) = (0, 0, 0);
            for u in &all {
                for w in &all {
                    let r = decide::conjugacy_via_double(&spec, u, w, depth)?;
                    pairs += 1;
                    agree += usize::from(r.agree);
                    unknown += usize::from(r.in_double.is_unknown());
                }
            }
            out.kv("PAIRS", pairs);
            out.kv("AGREE", agree);
            out.kv("UNKNOWN", unknown);
            Ok(if unknown > 0 {
                EXIT_UNKNOWN
            } else if agree == pairs {
                EXIT_DECIDED
            } else {
                EXIT_ERROR
            })
        }
        Command::SansCircuit => match is_sans_circuit(&full)? {
            SansCircuit::Yes => {
                out.kv("SANS_CIRCUIT", "YES");
                Ok(EXIT_DECIDED)
            }
            SansCircuit::No(t) => {
                out.kv("SANS_CIRCUIT", "NO");
                out.kv("CIRCUIT_VERTEX", &gog.vertices[t.s_o].name);
                out.kv("CIRCUIT_LENGTH", t.len());
                out.kv("LABEL", show(&t.label(&gog, full.tree())?));
                Ok(EXIT_DECIDED)
            }
            SansCircuit::Unknown(why) => {
                out.kv("SANS_CIRCUIT", "UNKNOWN");
                out.kv("REASON", why);
                Ok(EXIT_UNKNOWN)
            }
        },
        Command::Validate | Command::Present | Command::Print => unreachable!(),
    }
}

/// Flips a generator so that it starts with a positive letter.
fn positive(w: &Word) -> Word {
    match w.letters.first() {
        Some(l) if l.exp < 0 => w.invert(),
        _ => w.clone(),
    }
}

/// `<word>@<vertex>`, the word in that vertex's letters.
fn endpoint(gog: &GraphOfGroups, text: &str) -> Result<(Elem, usize)> {
    let (w, v) = text.rsplit_once('@').ok_or_else(|| Error::WordSyntax {
        text: text.into(),
        reason: "expected <word>@<vertex>".into(),
    })?;
    let vi = gog
        .vertices
        .iter()
        .position(|x| x.name == v)
        .ok_or_else(|| Error::Invalid(vec![format!("undeclared vertex `{v}`")]))?;
    let atoms = atoms(w).map_err(|m| Error::WordSyntax { text: w.into(), reason: m })?;
    let vg = &gog.vertices[vi];
    let word = local_word(&atoms, vi, &vg.name, &vg.gen_names)?;
    Ok((gog.vertex_oracle(vi)?.eval_word(&word)?, vi))
}
