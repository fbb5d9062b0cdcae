//! Combinatorics of symbolic languages.
//!
//! Subshifts of finite type are represented by a de Bruijn edge graph on
//! admissible memory words, pruned so every vertex lies on a bi-infinite
//! path. On the pruned graph, word-level questions (transitivity, dense
//! periodic orbits, finiteness, word counts) reduce to exact graph
//! computations, which is what makes the `exact` verdicts of the detector
//! layer possible.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::verdict::{Certificate, DetectorBudget, Method, Verdict, Witness};

/// Edge of the de Bruijn graph: reading `symbol` moves `from` to `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SftEdge {
    pub from: u32,
    pub to: u32,
    pub symbol: u8,
}

/// Pruned de Bruijn graph of a subshift of finite type.
///
/// Vertices are the admissible words of length `memory` that occur in some
/// bi-infinite admissible sequence; edges are the admissible words one
/// symbol longer. Pruning guarantees every vertex has an incoming and an
/// outgoing edge, so paths of any length extend to bi-infinite ones.
#[derive(Debug, Clone)]
pub struct SftGraph {
    pub alphabet: u8,
    pub memory: usize,
    pub vertices: Vec<Vec<u8>>,
    pub edges: Vec<SftEdge>,
    pub out: Vec<Vec<u32>>,
    pub inn: Vec<Vec<u32>>,
}

impl SftGraph {
    /// Builds the pruned graph for the shift over `alphabet` symbols that
    /// forbids the given words.
    pub fn build(alphabet: u8, forbidden: &[Vec<u8>]) -> Result<SftGraph> {
        if alphabet < 2 {
            return Err(Error::Config("subshift alphabet needs at least 2 symbols".into()));
        }
        for w in forbidden {
            if w.is_empty() {
                return Err(Error::Config("forbidden words must be nonempty".into()));
            }
            if w.iter().any(|&s| s >= alphabet) {
                return Err(Error::Config(format!(
                    "forbidden word {w:?} uses a symbol outside the alphabet"
                )));
            }
        }
        let q = alphabet as usize;
        let max_f = forbidden.iter().map(|w| w.len()).max().unwrap_or(0);
        let memory = max_f.max(2) - 1;
        let vertex_total = (q as u64).checked_pow(memory as u32).unwrap_or(u64::MAX);
        if vertex_total > 1 << 20 {
            return Err(Error::Budget(format!(
                "memory {memory} needs {vertex_total} candidate vertices, above the 2^20 cap"
            )));
        }

        let has_factor = |w: &[u8]| forbidden.iter().any(|f| contains_word(w, f));

        let mut vertices: Vec<Vec<u8>> = Vec::new();
        let mut index: HashMap<Vec<u8>, u32> = HashMap::new();
        let mut word = vec![0u8; memory];
        for code in 0..vertex_total {
            let mut rem = code;
            for i in (0..memory).rev() {
                word[i] = (rem % q as u64) as u8;
                rem /= q as u64;
            }
            if !has_factor(&word) {
                index.insert(word.clone(), vertices.len() as u32);
                vertices.push(word.clone());
            }
        }

        let mut edges: Vec<SftEdge> = Vec::new();
        let mut full = vec![0u8; memory + 1];
        for (vid, v) in vertices.iter().enumerate() {
            full[..memory].copy_from_slice(v);
            for s in 0..alphabet {
                full[memory] = s;
                if has_factor(&full) {
                    continue;
                }
                let target: Vec<u8> = full[1..].to_vec();
                if let Some(&tid) = index.get(&target) {
                    edges.push(SftEdge { from: vid as u32, to: tid, symbol: s });
                }
            }
        }

        // Prune until every remaining vertex is on a bi-infinite path.
        let mut alive_v = vec![true; vertices.len()];
        let mut alive_e = vec![true; edges.len()];
        loop {
            let mut out_deg = vec![0u32; vertices.len()];
            let mut in_deg = vec![0u32; vertices.len()];
            for (eid, e) in edges.iter().enumerate() {
                if alive_e[eid] {
                    out_deg[e.from as usize] += 1;
                    in_deg[e.to as usize] += 1;
                }
            }
            let mut changed = false;
            for v in 0..vertices.len() {
                if alive_v[v] && (out_deg[v] == 0 || in_deg[v] == 0) {
                    alive_v[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            for (eid, e) in edges.iter().enumerate() {
                if alive_e[eid] && (!alive_v[e.from as usize] || !alive_v[e.to as usize]) {
                    alive_e[eid] = false;
                }
            }
        }

        let mut remap = vec![u32::MAX; vertices.len()];
        let mut kept_vertices = Vec::new();
        for (v, word) in vertices.into_iter().enumerate() {
            if alive_v[v] {
                remap[v] = kept_vertices.len() as u32;
                kept_vertices.push(word);
            }
        }
        if kept_vertices.is_empty() {
            return Err(Error::Config(
                "forbidden words leave an empty subshift".into(),
            ));
        }
        let mut kept_edges = Vec::new();
        for (eid, e) in edges.into_iter().enumerate() {
            if alive_e[eid] {
                kept_edges.push(SftEdge {
                    from: remap[e.from as usize],
                    to: remap[e.to as usize],
                    symbol: e.symbol,
                });
            }
        }
        let mut out = vec![Vec::new(); kept_vertices.len()];
        let mut inn = vec![Vec::new(); kept_vertices.len()];
        for (eid, e) in kept_edges.iter().enumerate() {
            out[e.from as usize].push(eid as u32);
            inn[e.to as usize].push(eid as u32);
        }
        Ok(SftGraph {
            alphabet,
            memory,
            vertices: kept_vertices,
            edges: kept_edges,
            out,
            inn,
        })
    }

    /// Full shift over `alphabet` symbols.
    pub fn full_shift(alphabet: u8) -> Result<SftGraph> {
        SftGraph::build(alphabet, &[])
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Strongly connected component id per vertex, plus component count.
    /// Kosaraju's two-pass scheme with explicit stacks.
    pub fn scc(&self) -> (Vec<u32>, u32) {
        let n = self.vertex_count();
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            // Iterative post-order.
            let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
            seen[start] = true;
            while let Some(&mut (v, ref mut i)) = stack.last_mut() {
                if *i < self.out[v].len() {
                    let e = self.out[v][*i] as usize;
                    *i += 1;
                    let w = self.edges[e].to as usize;
                    if !seen[w] {
                        seen[w] = true;
                        stack.push((w, 0));
                    }
                } else {
                    order.push(v);
                    stack.pop();
                }
            }
        }
        let mut comp = vec![u32::MAX; n];
        let mut count = 0u32;
        for &root in order.iter().rev() {
            if comp[root] != u32::MAX {
                continue;
            }
            let mut stack = vec![root];
            comp[root] = count;
            while let Some(v) = stack.pop() {
                for &e in &self.inn[v] {
                    let w = self.edges[e as usize].from as usize;
                    if comp[w] == u32::MAX {
                        comp[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    /// True when the pruned graph is one strongly connected component,
    /// which for an essential graph is exactly topological transitivity.
    pub fn transitive(&self) -> bool {
        let (_, count) = self.scc();
        count == 1
    }

    /// True when every edge stays inside its strongly connected
    /// component; then every admissible word closes into a cycle, so
    /// periodic points are dense.
    pub fn dense_periodic(&self) -> bool {
        let (comp, _) = self.scc();
        self.edges.iter().all(|e| comp[e.from as usize] == comp[e.to as usize])
    }

    /// `Some(point_count)` when the subshift is finite, which happens
    /// exactly when the pruned graph is a disjoint union of cycles. Simple
    /// cycles of length `l` contribute `l` points each and partition the
    /// vertices, so the point count equals the vertex count.
    pub fn finite_space(&self) -> Option<u64> {
        let all_unit = (0..self.vertex_count())
            .all(|v| self.out[v].len() == 1 && self.inn[v].len() == 1);
        all_unit.then_some(self.vertex_count() as u64)
    }

    /// Periodic words of the finite case, one per cycle.
    ///
    /// Each returned word `w` stands for the periodic sequence repeating
    /// `w`; the cycle's points are the rotations of that sequence.
    pub fn finite_cycles(&self) -> Option<Vec<Vec<u8>>> {
        self.finite_space()?;
        let mut visited = vec![false; self.vertex_count()];
        let mut cycles = Vec::new();
        for start in 0..self.vertex_count() {
            if visited[start] {
                continue;
            }
            let mut word = Vec::new();
            let mut v = start;
            loop {
                visited[v] = true;
                let e = &self.edges[self.out[v][0] as usize];
                word.push(e.symbol);
                v = e.to as usize;
                if v == start {
                    break;
                }
            }
            cycles.push(word);
        }
        Some(cycles)
    }

    /// Word of the lexicographically first cycle through vertex 0,
    /// witnessing that a periodic point exists.
    pub fn some_cycle(&self) -> Vec<u8> {
        // Walk smallest edges from vertex 0 until a vertex repeats, then
        // cut out the loop.
        let mut path_edges: Vec<u32> = Vec::new();
        let mut at: Vec<usize> = vec![0];
        let mut pos: HashMap<usize, usize> = HashMap::new();
        pos.insert(0, 0);
        let mut v = 0usize;
        loop {
            let e = self.out[v][0];
            let edge = &self.edges[e as usize];
            path_edges.push(e);
            v = edge.to as usize;
            if let Some(&first) = pos.get(&v) {
                return path_edges[first..]
                    .iter()
                    .map(|&e| self.edges[e as usize].symbol)
                    .collect();
            }
            pos.insert(v, at.len());
            at.push(v);
        }
    }

    /// Per-component edge excess, the exact positive-entropy criterion: a
    /// strongly connected component with more edges than vertices holds
    /// two distinct cycles through a common vertex, so its word count
    /// grows exponentially; components with edge count at most vertex
    /// count are single cycles or isolated vertices and contribute zero.
    pub fn entropy_class(&self) -> (bool, String) {
        let (comp, count) = self.scc();
        let mut v_per = vec![0u64; count as usize];
        let mut e_per = vec![0u64; count as usize];
        for v in 0..self.vertex_count() {
            v_per[comp[v] as usize] += 1;
        }
        for e in &self.edges {
            if comp[e.from as usize] == comp[e.to as usize] {
                e_per[comp[e.from as usize] as usize] += 1;
            }
        }
        for c in 0..count as usize {
            if e_per[c] > v_per[c] {
                return (
                    true,
                    format!(
                        "component {c} has {} edges on {} vertices, hence two distinct cycles and exponential word growth",
                        e_per[c], v_per[c]
                    ),
                );
            }
        }
        (
            false,
            "every strongly connected component is a single cycle or an isolated vertex".into(),
        )
    }

    /// Whether the k-fold product system is transitive, decided exactly on
    /// the product graph.
    pub fn product_transitive(&self, k: usize) -> Result<bool> {
        if !(2..=3).contains(&k) {
            return Err(Error::Input(format!("product order must be 2 or 3, got {k}")));
        }
        let n = self.vertex_count();
        let total = (n as u64).checked_pow(k as u32).unwrap_or(u64::MAX);
        if total > 1 << 20 {
            return Err(Error::Budget(format!(
                "product graph needs {total} vertices, above the 2^20 cap"
            )));
        }
        let total = total as usize;
        // Symbols are irrelevant for transitivity; adjacency by vertex
        // pairs suffices. Multi-edges collapse.
        let mut adj: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
        let mut radj: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
        for e in &self.edges {
            adj[e.from as usize].insert(e.to);
            radj[e.to as usize].insert(e.from);
        }
        let decode = |mut code: usize| {
            let mut t = vec![0usize; k];
            for i in (0..k).rev() {
                t[i] = code % n;
                code /= n;
            }
            t
        };
        let encode = |t: &[usize]| t.iter().fold(0usize, |acc, &v| acc * n + v);

        // Forward reachability from product vertex 0.
        let reaches_all = |adjacency: &Vec<BTreeSet<u32>>| {
            let mut seen = vec![false; total];
            let mut stack = vec![0usize];
            seen[0] = true;
            let mut found = 1usize;
            while let Some(code) = stack.pop() {
                let tuple = decode(code);
                // Neighbor tuples are products of per-coordinate moves.
                let mut choices: Vec<Vec<u32>> =
                    tuple.iter().map(|&v| adjacency[v].iter().copied().collect()).collect();
                for c in &mut choices {
                    c.sort_unstable();
                }
                let mut idx = vec![0usize; k];
                'prod: loop {
                    let mut next = vec![0usize; k];
                    for i in 0..k {
                        if choices[i].is_empty() {
                            break 'prod;
                        }
                        next[i] = choices[i][idx[i]] as usize;
                    }
                    let code2 = encode(&next);
                    if !seen[code2] {
                        seen[code2] = true;
                        found += 1;
                        stack.push(code2);
                    }
                    let mut i = k;
                    loop {
                        if i == 0 {
                            break 'prod;
                        }
                        i -= 1;
                        idx[i] += 1;
                        if idx[i] < choices[i].len() {
                            break;
                        }
                        idx[i] = 0;
                    }
                }
            }
            found == total
        };
        // Strong connectivity: everything reachable from vertex 0 both
        // forwards and backwards.
        Ok(reaches_all(&adj) && reaches_all(&radj))
    }

    /// All admissible extendable words of the given length, sorted.
    pub fn enumerate_words(&self, len: usize, cap: usize) -> Result<Vec<Vec<u8>>> {
        if len == 0 {
            return Ok(vec![Vec::new()]);
        }
        let mut words = BTreeSet::new();
        // DFS over paths of `len` edges from every start vertex.
        for start in 0..self.vertex_count() {
            let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
            let mut word: Vec<u8> = Vec::with_capacity(len);
            while let Some(&mut (v, ref mut i)) = stack.last_mut() {
                if word.len() == len {
                    words.insert(word.clone());
                    if words.len() > cap {
                        return Err(Error::Budget(format!(
                            "word enumeration at length {len} exceeded the cap of {cap}"
                        )));
                    }
                    word.pop();
                    stack.pop();
                    continue;
                }
                if *i < self.out[v].len() {
                    let e = &self.edges[self.out[v][*i] as usize];
                    *i += 1;
                    word.push(e.symbol);
                    stack.push((e.to as usize, 0));
                } else {
                    if !word.is_empty() && stack.len() > 1 {
                        word.pop();
                    }
                    stack.pop();
                }
            }
        }
        Ok(words.into_iter().collect())
    }

    /// Vertex set reachable after reading `word` from an unconstrained
    /// left context; empty means the word is not admissible-extendable.
    pub fn read_word(&self, word: &[u8]) -> Vec<bool> {
        let mut state = vec![true; self.vertex_count()];
        for &s in word {
            let mut next = vec![false; self.vertex_count()];
            for (v, &ok) in state.iter().enumerate() {
                if !ok {
                    continue;
                }
                for &e in &self.out[v] {
                    let edge = &self.edges[e as usize];
                    if edge.symbol == s {
                        next[edge.to as usize] = true;
                    }
                }
            }
            state = next;
        }
        state
    }

    /// Vertex set from which `word` can be read to completion.
    pub fn co_read_word(&self, word: &[u8]) -> Vec<bool> {
        let mut state = vec![true; self.vertex_count()];
        for &s in word.iter().rev() {
            let mut prev = vec![false; self.vertex_count()];
            for (v, &ok) in state.iter().enumerate() {
                if !ok {
                    continue;
                }
                for &e in &self.inn[v] {
                    let edge = &self.edges[e as usize];
                    if edge.symbol == s {
                        prev[edge.from as usize] = true;
                    }
                }
            }
            state = prev;
        }
        state
    }

    /// True when `word` occurs in some bi-infinite admissible sequence.
    pub fn word_extendable(&self, word: &[u8]) -> bool {
        self.read_word(word).iter().any(|&b| b)
    }

    /// Uniform random admissible word read along a forward walk.
    pub fn sample_walk(&self, len: usize, rng: &mut SplitMix64) -> Vec<u8> {
        let mut v = rng.next_below(self.vertex_count() as u64) as usize;
        let mut word = Vec::with_capacity(len);
        for _ in 0..len {
            let es = &self.out[v];
            let e = &self.edges[es[rng.next_below(es.len() as u64) as usize] as usize];
            word.push(e.symbol);
            v = e.to as usize;
        }
        word
    }

    /// Uniform random admissible word read along a backward walk; the
    /// result is ordered left to right.
    pub fn sample_walk_back(&self, len: usize, rng: &mut SplitMix64) -> Vec<u8> {
        let mut v = rng.next_below(self.vertex_count() as u64) as usize;
        let mut word = Vec::with_capacity(len);
        for _ in 0..len {
            let es = &self.inn[v];
            let e = &self.edges[es[rng.next_below(es.len() as u64) as usize] as usize];
            word.push(e.symbol);
            v = e.from as usize;
        }
        word.reverse();
        word
    }
}

fn contains_word(haystack: &[u8], needle: &[u8]) -> bool {
    if needle.len() > haystack.len() {
        return false;
    }
    haystack.windows(needle.len()).any(|w| w == needle)
}

// ---------------------------------------------------------------------
// Factor complexity
// ---------------------------------------------------------------------

/// Counts of distinct factors by length; `counts[n]` is `p(n)`, with
/// `p(0) = 1` for the empty word.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ComplexityTable {
    pub counts: Vec<u128>,
    pub exact: bool,
}

/// Where factor counts come from: the full language of a graph, or one
/// long sample word (a lower bound on the language).
pub enum ComplexitySource<'a> {
    Graph(&'a SftGraph),
    Word(&'a [u8]),
}

/// Distinct factor counts up to `n_max`.
///
/// Graph counts are exact: short factors are enumerated inside edge
/// words, longer ones are path counts under 128-bit arithmetic. Word
/// counts come from a suffix automaton of the sample and are exact for
/// the sample, hence lower bounds for the system.
pub fn factor_complexity(source: ComplexitySource<'_>, n_max: usize) -> Result<ComplexityTable> {
    if n_max == 0 {
        return Err(Error::Input("complexity horizon must be at least 1".into()));
    }
    match source {
        ComplexitySource::Graph(g) => {
            let mut counts = vec![0u128; n_max + 1];
            counts[0] = 1;
            let m = g.memory;
            // Short factors: distinct subwords of the edge words.
            for n in 1..=n_max.min(m) {
                let mut set = BTreeSet::new();
                for e in &g.edges {
                    let mut word = g.vertices[e.from as usize].clone();
                    word.push(e.symbol);
                    for w in word.windows(n) {
                        set.insert(w.to_vec());
                    }
                }
                counts[n] = set.len() as u128;
            }
            // Long factors: a word of length m + e corresponds to a unique
            // path with e edges (start vertex word plus edge symbols), so
            // distinct words and distinct paths are in bijection.
            if n_max >= m {
                counts[m] = g.vertex_count() as u128;
                let mut ways = vec![1u128; g.vertex_count()];
                for n in m + 1..=n_max {
                    let mut next = vec![0u128; g.vertex_count()];
                    let mut total = 0u128;
                    for e in &g.edges {
                        let add = ways[e.from as usize];
                        next[e.to as usize] = next[e.to as usize]
                            .checked_add(add)
                            .ok_or_else(|| {
                                Error::Budget("path count exceeds 128-bit range".into())
                            })?;
                    }
                    for &w in &next {
                        total = total
                            .checked_add(w)
                            .ok_or_else(|| Error::Budget("path count exceeds 128-bit range".into()))?;
                    }
                    counts[n] = total;
                    ways = next;
                }
            }
            Ok(ComplexityTable { counts, exact: true })
        }
        ComplexitySource::Word(word) => {
            if word.len() < n_max + 1 {
                return Err(Error::Input(format!(
                    "sample of length {} is too short for complexity horizon {n_max}",
                    word.len()
                )));
            }
            let counts = suffix_automaton_counts(word, n_max);
            Ok(ComplexityTable { counts, exact: false })
        }
    }
}

/// Distinct-factor counts of one word via its suffix automaton. Each
/// automaton state recognizes the factors whose lengths form the interval
/// `(len(link), len]`, so a difference array over lengths yields `p(n)`.
fn suffix_automaton_counts(word: &[u8], n_max: usize) -> Vec<u128> {
    struct State {
        len: u32,
        link: i32,
        next: [i32; 8],
    }
    let mut st: Vec<State> = Vec::with_capacity(2 * word.len() + 2);
    st.push(State { len: 0, link: -1, next: [-1; 8] });
    let mut last = 0usize;
    for &c in word {
        let c = c as usize & 7;
        let cur = st.len();
        st.push(State { len: st[last].len + 1, link: -1, next: [-1; 8] });
        let mut p = last as i32;
        while p >= 0 && st[p as usize].next[c] < 0 {
            st[p as usize].next[c] = cur as i32;
            p = st[p as usize].link;
        }
        if p < 0 {
            st[cur].link = 0;
        } else {
            let q = st[p as usize].next[c] as usize;
            if st[p as usize].len + 1 == st[q].len {
                st[cur].link = q as i32;
            } else {
                let clone = st.len();
                st.push(State {
                    len: st[p as usize].len + 1,
                    link: st[q].link,
                    next: st[q].next,
                });
                while p >= 0 && st[p as usize].next[c] == q as i32 {
                    st[p as usize].next[c] = clone as i32;
                    p = st[p as usize].link;
                }
                st[q].link = clone as i32;
                st[cur].link = clone as i32;
            }
        }
        last = cur;
    }
    let mut diff = vec![0i128; n_max + 2];
    for (i, s) in st.iter().enumerate() {
        if i == 0 {
            continue;
        }
        let lo = (st[s.link as usize].len + 1) as usize;
        let hi = s.len as usize;
        if lo > n_max {
            continue;
        }
        diff[lo] += 1;
        diff[hi.min(n_max) + 1] -= 1;
    }
    let mut counts = vec![0u128; n_max + 1];
    counts[0] = 1;
    let mut acc = 0i128;
    for n in 1..=n_max {
        acc += diff[n];
        counts[n] = acc as u128;
    }
    counts
}

/// Growth summary of a complexity table.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EntropyEstimate {
    /// `ln p(n_max) / n_max`, the crude per-symbol rate.
    pub rate: f64,
    /// Least-squares slope of `ln p(n)` over the upper half of the table,
    /// the asymptotics-friendly estimate.
    pub slope: f64,
    /// Whether the slope over the last quarter agrees with the half-table
    /// slope to 0.02; estimates without this flag have not settled.
    pub stable: bool,
}

/// Entropy estimate from factor counts.
pub fn complexity_entropy(table: &ComplexityTable) -> Result<EntropyEstimate> {
    let n_max = table.counts.len() - 1;
    if n_max < 4 {
        return Err(Error::Input("complexity table too short to estimate growth".into()));
    }
    if table.counts[1..].iter().any(|&c| c == 0) {
        return Err(Error::Input("complexity table has empty levels".into()));
    }
    let rate = ln_u128(table.counts[n_max]) / n_max as f64;
    let slope = fit_slope(&table.counts, n_max / 2, n_max);
    let quarter = fit_slope(&table.counts, (3 * n_max) / 4, n_max);
    Ok(EntropyEstimate { rate, slope, stable: (slope - quarter).abs() <= 0.02 })
}

fn ln_u128(v: u128) -> f64 {
    // Split so that huge counts stay accurate.
    if v <= 1 << 52 {
        (v as f64).ln()
    } else {
        let bits = 127 - v.leading_zeros() as i32;
        let scaled = (v >> (bits - 52)) as f64;
        scaled.ln() + (bits - 52) as f64 * std::f64::consts::LN_2
    }
}

fn fit_slope(counts: &[u128], lo: usize, hi: usize) -> f64 {
    let lo = lo.max(1);
    let m = (hi - lo + 1) as f64;
    if hi < lo + 1 {
        return 0.0;
    }
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for n in lo..=hi {
        let x = n as f64;
        let y = ln_u128(counts[n]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = m * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return 0.0;
    }
    (m * sxy - sx * sy) / denom
}

// ---------------------------------------------------------------------
// Periodic factors
// ---------------------------------------------------------------------

/// A cyclic factor consistent with the sample: every window of length
/// `window` recurs in a single residue class mod `period`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PeriodicFactorHit {
    pub period: usize,
    /// Smallest window length at which the phases are consistent.
    pub window: usize,
}

/// Scans a sample word for cyclic factors of period 2 through `p_max`.
///
/// A factor onto a p-cycle realized by an n-block code forces every
/// length-n window to occur only at positions in one residue class mod
/// p; conversely such a phase assignment defines the factor. Per window
/// the scan keeps the gcd of gaps between occurrences, so period p is
/// consistent at length n exactly when p divides every window's gap
/// gcd. A hit is evidence, not proof: codes with windows longer than
/// `n_max` stay invisible, and an empty result only rules out short
/// codes on this sample.
pub fn periodic_factor_scan(
    word: &[u8],
    p_max: usize,
    n_max: usize,
) -> Result<Vec<PeriodicFactorHit>> {
    if p_max < 2 {
        return Err(Error::Input("largest period must be at least 2".into()));
    }
    if n_max == 0 || n_max > 16 {
        return Err(Error::Input(format!("window bound must be in 1..=16, got {n_max}")));
    }
    if word.len() < n_max * 4 {
        return Err(Error::Input(format!(
            "sample of {} symbols is too short for windows up to {n_max}",
            word.len()
        )));
    }
    let mut hits: BTreeMap<usize, usize> = BTreeMap::new();
    for n in 1..=n_max {
        // gap_gcd[w] = gcd of position differences between occurrences
        // of w; zero while w has occurred once. Windows pack into a
        // u128 because n <= 16 and symbols are bytes.
        let mut seen: HashMap<u128, (usize, usize)> = HashMap::new();
        let mask = if n == 16 { u128::MAX } else { (1u128 << (8 * n)) - 1 };
        let mut key = 0u128;
        for (i, &s) in word.iter().enumerate() {
            key = (key << 8 | s as u128) & mask;
            if i + 1 < n {
                continue;
            }
            let start = i + 1 - n;
            match seen.entry(key) {
                Entry::Occupied(mut e) => {
                    let (first, g) = *e.get();
                    e.insert((first, gcd(g, start - first)));
                }
                Entry::Vacant(e) => {
                    e.insert((start, 0));
                }
            }
        }
        let all_gaps = seen.values().fold(0usize, |acc, &(_, g)| gcd(acc, g));
        if all_gaps == 0 {
            // No window recurred, so the sample says nothing at this
            // length and a vacuous hit would be misleading.
            continue;
        }
        for p in 2..=p_max {
            if all_gaps % p == 0 {
                hits.entry(p).or_insert(n);
            }
        }
        if hits.len() == p_max - 1 {
            break;
        }
    }
    Ok(hits
        .into_iter()
        .map(|(period, window)| PeriodicFactorHit { period, window })
        .collect())
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

// ---------------------------------------------------------------------
// Covers
// ---------------------------------------------------------------------

/// Cylinder at a nonnegative anchor: the set of sequences showing `word`
/// starting at coordinate `anchor`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cylinder {
    pub word: Vec<u8>,
    pub anchor: usize,
}

/// Open set given as a finite union of cylinders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverElement {
    pub cylinders: Vec<Cylinder>,
}

/// Finite open cover of the subshift by cylinder unions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderCover {
    pub elements: Vec<CoverElement>,
}

impl CylinderCover {
    /// Rightmost coordinate any cylinder of the cover constrains.
    fn extent(&self) -> Result<usize> {
        let mut ext = 0usize;
        for el in &self.elements {
            if el.cylinders.is_empty() {
                return Err(Error::Input("cover element with no cylinders".into()));
            }
            for c in &el.cylinders {
                if c.word.is_empty() {
                    return Err(Error::Input("cover cylinder with empty word".into()));
                }
                ext = ext.max(c.anchor + c.word.len());
            }
        }
        Ok(ext)
    }
}

/// Checks that the cover elements jointly contain every point, by
/// enumerating all admissible extendable words over the constrained span.
pub fn verify_cover(g: &SftGraph, cover: &CylinderCover, span: usize) -> Result<()> {
    let ext = cover.extent()?;
    if span < ext || span < g.memory {
        return Err(Error::Input(format!(
            "verification span {span} is shorter than the cover extent {ext} or the graph memory"
        )));
    }
    let words = g.enumerate_words(span, 1 << 16)?;
    for w in &words {
        let covered = cover.elements.iter().any(|el| {
            el.cylinders.iter().any(|c| &w[c.anchor..c.anchor + c.word.len()] == c.word.as_slice())
        });
        if !covered {
            return Err(Error::Input(format!("cover misses the admissible word {w:?}")));
        }
    }
    Ok(())
}

/// Exact `ln N(join) / n` for the n-fold refinement of a cylinder cover.
///
/// Enumerates every choice of one element per time step as a set of
/// admissible span words, then finds a true minimum subcover by
/// branch-and-bound on the covering sets. All caps are reported as budget
/// errors rather than silently truncating.
pub fn cover_entropy(g: &SftGraph, cover: &CylinderCover, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Input("cover join depth must be at least 1".into()));
    }
    verify_cover(g, cover, cover.extent()?.max(g.memory))?;
    let e_count = cover.elements.len();
    let choices = (e_count as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
    if choices > 1 << 20 {
        return Err(Error::Budget(format!(
            "join of depth {n} over {e_count} elements needs {choices} candidate sets, above the 2^20 cap"
        )));
    }
    let span = n - 1 + cover.extent()?;
    let words = g.enumerate_words(span.max(g.memory), 1 << 16)?;
    let u = words.len();
    let blocks = u.div_ceil(64);

    // matched[e][t]: bitset of span words showing element e at offset t.
    let mut matched = vec![vec![vec![0u64; blocks]; n]; e_count];
    for (ei, el) in cover.elements.iter().enumerate() {
        for t in 0..n {
            for (wi, w) in words.iter().enumerate() {
                let hit = el.cylinders.iter().any(|c| {
                    let a = t + c.anchor;
                    a + c.word.len() <= w.len() && &w[a..a + c.word.len()] == c.word.as_slice()
                });
                if hit {
                    matched[ei][t][wi / 64] |= 1u64 << (wi % 64);
                }
            }
        }
    }

    // Generate all nonempty choice sets, deduplicated.
    let mut sets: Vec<Vec<u64>> = Vec::new();
    let mut seen: HashMap<Vec<u64>, ()> = HashMap::new();
    let mut idx = vec![0usize; n];
    loop {
        let mut acc = matched[idx[0]][0].clone();
        for (t, &e) in idx.iter().enumerate().skip(1) {
            for (b, slot) in acc.iter_mut().enumerate() {
                *slot &= matched[e][t][b];
            }
        }
        if acc.iter().any(|&b| b != 0) && seen.insert(acc.clone(), ()).is_none() {
            sets.push(acc);
        }
        let mut i = n;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < e_count {
                break;
            }
            idx[i] = 0;
        }
        if idx.iter().all(|&v| v == 0) {
            break;
        }
    }

    let best = minimum_set_cover(u, &sets)?;
    Ok((best as f64).ln() / n as f64)
}

/// Exact minimum set cover by branch and bound. Branches on the sets that
/// cover the first uncovered element; prunes with a popcount lower bound.
fn minimum_set_cover(universe: usize, sets: &[Vec<u64>]) -> Result<usize> {
    if universe == 0 {
        return Err(Error::Input("empty universe has no cover".into()));
    }
    let blocks = universe.div_ceil(64);
    let mut full = vec![0u64; blocks];
    for w in 0..universe {
        full[w / 64] |= 1u64 << (w % 64);
    }
    // Greedy upper bound.
    let mut covered = vec![0u64; blocks];
    let mut upper = 0usize;
    loop {
        let missing: u64 = full
            .iter()
            .zip(&covered)
            .map(|(f, c)| (f & !c).count_ones() as u64)
            .sum();
        if missing == 0 {
            break;
        }
        let mut best_gain = 0u64;
        let mut best_i = usize::MAX;
        for (i, s) in sets.iter().enumerate() {
            let gain: u64 = s
                .iter()
                .zip(&covered)
                .zip(&full)
                .map(|((s, c), f)| (s & f & !c).count_ones() as u64)
                .sum();
            if gain > best_gain {
                best_gain = gain;
                best_i = i;
            }
        }
        if best_i == usize::MAX {
            return Err(Error::Input("sets do not cover the universe".into()));
        }
        for (c, s) in covered.iter_mut().zip(&sets[best_i]) {
            *c |= s;
        }
        upper += 1;
    }

    let max_pop: usize = sets
        .iter()
        .map(|s| s.iter().map(|b| b.count_ones() as usize).sum())
        .max()
        .unwrap_or(1)
        .max(1);

    // Precompute, per element, which sets cover it.
    let mut coverers: Vec<Vec<u32>> = vec![Vec::new(); universe];
    for (i, s) in sets.iter().enumerate() {
        for w in 0..universe {
            if s[w / 64] & (1u64 << (w % 64)) != 0 {
                coverers[w].push(i as u32);
            }
        }
    }

    struct Search<'a> {
        sets: &'a [Vec<u64>],
        coverers: &'a [Vec<u32>],
        universe: usize,
        best: usize,
        nodes: u64,
    }
    impl Search<'_> {
        fn go(&mut self, covered: &mut Vec<u64>, chosen: usize, max_pop: usize) -> Result<()> {
            self.nodes += 1;
            if self.nodes > 10_000_000 {
                return Err(Error::Budget(
                    "minimum subcover search exceeded its node budget".into(),
                ));
            }
            let first_uncovered = (0..self.universe)
                .find(|&w| covered[w / 64] & (1u64 << (w % 64)) == 0);
            let w = match first_uncovered {
                None => {
                    self.best = self.best.min(chosen);
                    return Ok(());
                }
                Some(w) => w,
            };
            let missing: usize = covered
                .iter()
                .enumerate()
                .map(|(b, c)| {
                    let span = if (b + 1) * 64 <= self.universe {
                        u64::MAX
                    } else {
                        (1u64 << (self.universe - b * 64)) - 1
                    };
                    (span & !c).count_ones() as usize
                })
                .sum();
            if chosen + missing.div_ceil(max_pop) >= self.best {
                return Ok(());
            }
            for &si in &self.coverers[w] {
                let s = &self.sets[si as usize];
                let saved = covered.clone();
                for (c, v) in covered.iter_mut().zip(s) {
                    *c |= v;
                }
                self.go(covered, chosen + 1, max_pop)?;
                *covered = saved;
            }
            Ok(())
        }
    }
    let mut search = Search { sets, coverers: &coverers, universe, best: upper, nodes: 0 };
    let mut covered = vec![0u64; blocks];
    search.go(&mut covered, 0, max_pop)?;
    Ok(search.best)
}

// ---------------------------------------------------------------------
// Weakly mixing subset probe
// ---------------------------------------------------------------------

/// Hitting-time profile of one (source word, target word) pair: for which
/// m does some point carry the source at 0 and the target at m. The
/// profile is eventually periodic because the reachable vertex-set
/// sequence is.
struct Hitting {
    prefix: Vec<bool>,
    pattern: Vec<bool>,
}

impl Hitting {
    fn at(&self, m: usize) -> bool {
        if m < self.prefix.len() {
            self.prefix[m]
        } else {
            self.pattern[(m - self.prefix.len()) % self.pattern.len()]
        }
    }
}

fn hitting_profile(g: &SftGraph, source: &[u8], target: &[u8], checks: &mut u64) -> Result<Hitting> {
    let mut prefix = Vec::new();
    // Small offsets overlap the source; decide by explicit merged words.
    for m in 0..source.len() {
        let span = source.len().max(m + target.len());
        let mut merged: Vec<Option<u8>> = vec![None; span];
        for (i, &s) in source.iter().enumerate() {
            merged[i] = Some(s);
        }
        let mut ok = true;
        for (i, &s) in target.iter().enumerate() {
            match merged[m + i] {
                Some(have) if have != s => {
                    ok = false;
                    break;
                }
                _ => merged[m + i] = Some(s),
            }
        }
        *checks += 1;
        if !ok {
            prefix.push(false);
            continue;
        }
        // Gaps cannot appear: target starts inside the source.
        let word: Vec<u8> = merged.into_iter().map(|s| s.unwrap()).collect();
        prefix.push(g.word_extendable(&word));
    }
    // From offset source.len() on, propagate reachable vertex sets and
    // detect the cycle.
    let pre_target = g.co_read_word(target);
    let mut state = g.read_word(source);
    let mut seen: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut hits: Vec<bool> = Vec::new();
    let (mu, lambda) = loop {
        if let Some(&first) = seen.get(&state) {
            break (first, hits.len() - first);
        }
        if seen.len() > 4096 {
            return Err(Error::Budget(
                "hitting profile saw more than 4096 distinct vertex sets".into(),
            ));
        }
        seen.insert(state.clone(), hits.len());
        let hit = state.iter().zip(&pre_target).any(|(&a, &b)| a && b);
        hits.push(hit);
        *checks += 1;
        let mut next = vec![false; g.vertex_count()];
        for (v, &ok) in state.iter().enumerate() {
            if ok {
                for &e in &g.out[v] {
                    next[g.edges[e as usize].to as usize] = true;
                }
            }
        }
        state = next;
    };
    prefix.extend_from_slice(&hits[..mu]);
    Ok(Hitting { prefix, pattern: hits[mu..mu + lambda].to_vec() })
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(mut a: usize, mut b: usize) -> usize {
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    }
    a / gcd(a, b) * b
}

/// Probes whether the set given by `a_words` (anchor-0 cylinders; empty
/// slice means the whole space) behaves like a weakly mixing subset at
/// the given budgets: every choice of `k` pairs of candidate open sets
/// must admit one common time at which all `k` forward images meet their
/// targets.
///
/// Candidate sets are cylinders on admissible words of length at most
/// `max_word_len` meeting the probed set. The hitting profiles are exact
/// and eventually periodic, so a negative answer (some selection with
/// provably empty common times) is a certificate valid at every budget,
/// while a positive answer is evidence bounded by the word length.
pub fn weakly_mixing_set_probe(
    g: &SftGraph,
    a_words: &[Vec<u8>],
    k: usize,
    max_word_len: usize,
    m_bound: usize,
    budget: DetectorBudget,
) -> Result<Verdict> {
    if !(1..=3).contains(&k) {
        return Err(Error::Input(format!("selection size must be 1..=3, got {k}")));
    }
    if max_word_len == 0 || max_word_len > 6 {
        return Err(Error::Input(format!(
            "candidate word length must be 1..=6, got {max_word_len}"
        )));
    }
    if m_bound == 0 {
        return Err(Error::Input("time bound must be at least 1".into()));
    }
    for a in a_words {
        if !g.word_extendable(a) {
            return Err(Error::Input(format!("probed-set word {a:?} is not admissible")));
        }
    }
    let mut checks: u64 = 0;
    const CHECK_CAP: u64 = 10_000_000;

    // Candidate words: admissible, meeting the probed set. Meeting an
    // anchor-0 cylinder union means prefix-compatibility with one of its
    // words, with the merged word still admissible.
    let mut candidates: Vec<Vec<u8>> = Vec::new();
    for len in 1..=max_word_len {
        for w in g.enumerate_words(len, 1 << 14)? {
            if merged_with_set(g, &w, a_words).is_some() {
                candidates.push(w);
            }
        }
    }
    if candidates.is_empty() {
        return Err(Error::Input("no candidate cylinders meet the probed set".into()));
    }

    // Pair profiles: source is the merged (v and A) word, target is u.
    struct PairProfile {
        v: usize,
        u: usize,
        hit: Hitting,
        mask: Vec<u64>,
    }
    let blocks = (m_bound + 1).div_ceil(64);
    let mut pairs: Vec<PairProfile> = Vec::new();
    for (vi, v) in candidates.iter().enumerate() {
        let sources = merged_with_set(g, v, a_words).unwrap();
        for (ui, u) in candidates.iter().enumerate() {
            // Union the profiles over the compatible refinements of v.
            let mut combined: Option<Hitting> = None;
            for s in &sources {
                let h = hitting_profile(g, s, u, &mut checks)?;
                combined = Some(match combined {
                    None => h,
                    Some(prev) => union_profiles(&prev, &h),
                });
            }
            let hit = combined.unwrap();
            let mut mask = vec![0u64; blocks];
            for m in 0..=m_bound {
                if hit.at(m) {
                    mask[m / 64] |= 1u64 << (m % 64);
                }
            }
            pairs.push(PairProfile { v: vi, u: ui, hit, mask });
            if checks > CHECK_CAP {
                return Err(Error::Budget("probe exceeded its check cap".into()));
            }
        }
    }

    // Every k-selection (with repetition, order irrelevant) must share a
    // hitting time.
    let p = pairs.len();
    let mut selection = vec![0usize; k];
    let mut worst_m: usize = 0;
    let mut worst_sel: Vec<usize> = Vec::new();
    loop {
        let mut acc = pairs[selection[0]].mask.clone();
        for &s in &selection[1..] {
            for (a, b) in acc.iter_mut().zip(&pairs[s].mask) {
                *a &= b;
            }
        }
        checks += 1;
        let first = (0..=m_bound).find(|&m| acc[m / 64] & (1u64 << (m % 64)) != 0);
        match first {
            Some(m) => {
                if m > worst_m {
                    worst_m = m;
                    worst_sel = selection.clone();
                }
            }
            None => {
                // Nothing within the bound; decide the infinite tail from
                // the eventually periodic profiles.
                let mut pre = 0usize;
                let mut period = 1usize;
                for &s in &selection {
                    pre = pre.max(pairs[s].hit.prefix.len());
                    period = lcm(period, pairs[s].hit.pattern.len());
                    if period > 1_000_000 {
                        return Err(Error::Budget(
                            "combined hitting period exceeds the scan cap".into(),
                        ));
                    }
                }
                let horizon = pre + period;
                let mut found: Option<usize> = None;
                for m in 0..horizon {
                    checks += 1;
                    if selection.iter().all(|&s| pairs[s].hit.at(m)) {
                        found = Some(m);
                        break;
                    }
                }
                if checks > CHECK_CAP {
                    return Err(Error::Budget("probe exceeded its check cap".into()));
                }
                match found {
                    Some(m) => {
                        if m > worst_m {
                            worst_m = m;
                            worst_sel = selection.clone();
                        }
                    }
                    None => {
                        let detail = selection
                            .iter()
                            .map(|&s| {
                                format!(
                                    "[{:?} -> {:?}]",
                                    candidates[pairs[s].v], candidates[pairs[s].u]
                                )
                            })
                            .collect::<Vec<_>>()
                            .join(", ");
                        return Ok(Verdict::fails(
                            Method::Exact,
                            Certificate::ExactReachability {
                                detail: format!(
                                    "selection {detail} has eventually periodic hitting sets with empty intersection at every time"
                                ),
                            },
                            budget,
                        ));
                    }
                }
            }
        }
        if checks > CHECK_CAP {
            return Err(Error::Budget("probe exceeded its check cap".into()));
        }
        // Next nondecreasing selection.
        let mut i = k;
        loop {
            if i == 0 {
                let wit = Witness::new("common-hitting-times")
                    .with_times(vec![worst_m as u64])
                    .with_text(format!(
                        "worst selection {:?} first meets at time {worst_m}",
                        worst_sel
                            .iter()
                            .map(|&s| (pairs[s].v, pairs[s].u))
                            .collect::<Vec<_>>()
                    ));
                return Ok(Verdict::holds(Method::Empirical, wit, budget).with_note(
                    format!(
                        "verified exactly for all {k}-selections of cylinders up to length {max_word_len}; the full property quantifies over all open sets"
                    ),
                ));
            }
            i -= 1;
            selection[i] += 1;
            if selection[i] < p {
                for j in i + 1..k {
                    selection[j] = selection[i];
                }
                break;
            }
        }
    }
}

/// Pointwise union of two hitting profiles.
fn union_profiles(a: &Hitting, b: &Hitting) -> Hitting {
    let pre = a.prefix.len().max(b.prefix.len());
    let period = lcm(a.pattern.len(), b.pattern.len());
    let prefix = (0..pre).map(|m| a.at(m) || b.at(m)).collect();
    let pattern = (0..period).map(|i| a.at(pre + i) || b.at(pre + i)).collect();
    Hitting { prefix, pattern }
}

/// Merges `word` with each compatible set word; `None` when the cylinder
/// misses the set entirely. The empty set list denotes the whole space.
fn merged_with_set(g: &SftGraph, word: &[u8], a_words: &[Vec<u8>]) -> Option<Vec<Vec<u8>>> {
    if a_words.is_empty() {
        return Some(vec![word.to_vec()]);
    }
    let mut merged = Vec::new();
    for a in a_words {
        let long: &[u8];
        let short: &[u8];
        if a.len() >= word.len() {
            long = a;
            short = word;
        } else {
            long = word;
            short = a;
        }
        if &long[..short.len()] == short && g.word_extendable(long) {
            merged.push(long.to_vec());
        }
    }
    (!merged.is_empty()).then_some(merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verdict::Outcome;

    fn golden() -> SftGraph {
        SftGraph::build(2, &[vec![1, 1]]).unwrap()
    }

    fn period_two() -> SftGraph {
        SftGraph::build(2, &[vec![0, 0], vec![1, 1]]).unwrap()
    }

    fn forbid_10() -> SftGraph {
        SftGraph::build(2, &[vec![1, 0]]).unwrap()
    }

    #[test]
    fn full_shift_graph_shape() {
        let g = SftGraph::full_shift(2).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 4);
        assert!(g.transitive());
        assert!(g.dense_periodic());
        assert_eq!(g.finite_space(), None);
    }

    #[test]
    fn golden_graph_is_transitive_with_positive_entropy() {
        let g = golden();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 3);
        assert!(g.transitive());
        assert!(g.dense_periodic());
        let (positive, _) = g.entropy_class();
        assert!(positive);
        assert_eq!(g.finite_space(), None);
    }

    #[test]
    fn period_two_graph_is_a_single_cycle() {
        let g = period_two();
        assert!(g.transitive());
        assert!(g.dense_periodic());
        assert_eq!(g.finite_space(), Some(2));
        let cycles = g.finite_cycles().unwrap();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].len(), 2);
        let (positive, _) = g.entropy_class();
        assert!(!positive);
    }

    #[test]
    fn forbid_10_graph_is_not_transitive_and_has_zero_entropy() {
        let g = forbid_10();
        // Vertices 0 and 1 survive: constant tails exist on both sides.
        assert_eq!(g.vertex_count(), 2);
        assert!(!g.transitive());
        assert!(!g.dense_periodic());
        // Out-degree 2 at one vertex, yet no component has edge excess.
        let (positive, _) = g.entropy_class();
        assert!(!positive);
        assert_eq!(g.finite_space(), None);
    }

    #[test]
    fn empty_subshift_is_rejected() {
        let err = SftGraph::build(2, &[vec![0], vec![1]]).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn product_transitivity_detects_aperiodicity() {
        assert!(SftGraph::full_shift(2).unwrap().product_transitive(2).unwrap());
        assert!(SftGraph::full_shift(2).unwrap().product_transitive(3).unwrap());
        assert!(golden().product_transitive(2).unwrap());
        assert!(golden().product_transitive(3).unwrap());
        // The two-cycle is transitive but its square splits into phases.
        assert!(period_two().transitive());
        assert!(!period_two().product_transitive(2).unwrap());
    }

    #[test]
    fn golden_factor_counts_are_fibonacci() {
        let g = golden();
        let t = factor_complexity(ComplexitySource::Graph(&g), 12).unwrap();
        assert!(t.exact);
        // p(n) = F(n+2) with F(1) = F(2) = 1.
        assert_eq!(t.counts[1], 2);
        assert_eq!(t.counts[2], 3);
        assert_eq!(t.counts[3], 5);
        assert_eq!(t.counts[5], 13);
        assert_eq!(t.counts[12], 377);
    }

    #[test]
    fn full_shift_factor_counts_are_powers() {
        let g = SftGraph::full_shift(2).unwrap();
        let t = factor_complexity(ComplexitySource::Graph(&g), 12).unwrap();
        assert_eq!(t.counts[5], 32);
        assert_eq!(t.counts[12], 4096);
        let est = complexity_entropy(&t).unwrap();
        assert!((est.rate - std::f64::consts::LN_2).abs() < 1e-12);
        assert!((est.slope - std::f64::consts::LN_2).abs() < 1e-9);
        assert!(est.stable);
    }

    #[test]
    fn graph_counts_match_brute_force_enumeration() {
        for forbidden in [vec![vec![1u8, 1]], vec![vec![1, 0, 1]], vec![vec![0, 0], vec![1, 1]]] {
            let g = SftGraph::build(2, &forbidden).unwrap();
            let t = factor_complexity(ComplexitySource::Graph(&g), 8).unwrap();
            for n in 1..=8usize {
                let words = g.enumerate_words(n, 1 << 14).unwrap();
                assert_eq!(
                    t.counts[n],
                    words.len() as u128,
                    "mismatch at n={n} for {forbidden:?}"
                );
            }
        }
    }

    #[test]
    fn word_counts_come_from_the_sample() {
        // Periodic sample: complexity saturates at the period.
        let word: Vec<u8> = (0..1000).map(|i| (i % 3 == 0) as u8).collect();
        let t = factor_complexity(ComplexitySource::Word(&word), 10).unwrap();
        assert!(!t.exact);
        assert_eq!(t.counts[1], 2);
        for n in 3..=10usize {
            assert_eq!(t.counts[n], 3, "period-3 word has 3 factors at n={n}");
        }
    }

    #[test]
    fn suffix_automaton_agrees_with_naive_counting() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..20 {
            let len = 40 + rng.next_below(60) as usize;
            let word: Vec<u8> = (0..len).map(|_| rng.next_below(2) as u8).collect();
            let t = factor_complexity(ComplexitySource::Word(&word), 12).unwrap();
            for n in 1..=12usize {
                let mut set = BTreeSet::new();
                for w in word.windows(n) {
                    set.insert(w.to_vec());
                }
                assert_eq!(t.counts[n], set.len() as u128);
            }
        }
    }

    #[test]
    fn singleton_cover_verifies_and_two_element_cover_gives_log_two() {
        let g = SftGraph::full_shift(2).unwrap();
        let cover = CylinderCover {
            elements: vec![
                CoverElement { cylinders: vec![Cylinder { word: vec![0], anchor: 0 }] },
                CoverElement { cylinders: vec![Cylinder { word: vec![1], anchor: 0 }] },
            ],
        };
        verify_cover(&g, &cover, 4).unwrap();
        let h = cover_entropy(&g, &cover, 10).unwrap();
        assert!((h - std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn golden_cover_entropy_tracks_fibonacci_growth() {
        let g = golden();
        let cover = CylinderCover {
            elements: vec![
                CoverElement { cylinders: vec![Cylinder { word: vec![0], anchor: 0 }] },
                CoverElement { cylinders: vec![Cylinder { word: vec![1], anchor: 0 }] },
            ],
        };
        // The symbol partition refines to exactly the admissible words,
        // so the minimum subcover at depth 12 has 377 sets.
        let h = cover_entropy(&g, &cover, 12).unwrap();
        assert!((h - (377f64).ln() / 12.0).abs() < 1e-9);
    }

    #[test]
    fn incomplete_cover_is_rejected() {
        let g = SftGraph::full_shift(2).unwrap();
        let cover = CylinderCover {
            elements: vec![CoverElement {
                cylinders: vec![Cylinder { word: vec![0], anchor: 0 }],
            }],
        };
        assert!(verify_cover(&g, &cover, 4).is_err());
    }

    #[test]
    fn full_shift_probe_holds_for_pairs() {
        let g = SftGraph::full_shift(2).unwrap();
        let v =
            weakly_mixing_set_probe(&g, &[], 2, 3, 16, DetectorBudget::default()).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
    }

    #[test]
    fn golden_probe_holds_for_pairs() {
        let g = golden();
        let v =
            weakly_mixing_set_probe(&g, &[], 2, 3, 32, DetectorBudget::default()).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
    }

    #[test]
    fn period_two_probe_splits_on_phase() {
        let g = period_two();
        // Single constraints always meet: the orbit visits both phases.
        let v1 =
            weakly_mixing_set_probe(&g, &[], 1, 2, 16, DetectorBudget::default()).unwrap();
        assert_eq!(v1.outcome, Outcome::Holds);
        // Two constraints with opposite parity never meet simultaneously.
        let v2 =
            weakly_mixing_set_probe(&g, &[], 2, 2, 16, DetectorBudget::default()).unwrap();
        assert_eq!(v2.outcome, Outcome::Fails);
        assert!(matches!(v2.certificate, Some(Certificate::ExactReachability { .. })));
        assert_eq!(v2.method, Method::Exact);
    }

    #[test]
    fn probe_respects_the_candidate_set() {
        let g = SftGraph::full_shift(2).unwrap();
        // Probe the cylinder of 0: candidates must meet it.
        let v = weakly_mixing_set_probe(
            &g,
            &[vec![0]],
            2,
            2,
            16,
            DetectorBudget::default(),
        )
        .unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
    }

    #[test]
    fn read_word_and_co_read_word_track_admissibility() {
        let g = golden();
        assert!(g.word_extendable(&[0, 1, 0, 1]));
        assert!(!g.word_extendable(&[1, 1]));
        let pre = g.co_read_word(&[1]);
        // Only the vertex "0" can precede a 1.
        let zero_vertex = g.vertices.iter().position(|v| v == &vec![0]).unwrap();
        assert!(pre[zero_vertex]);
        let one_vertex = g.vertices.iter().position(|v| v == &vec![1]).unwrap();
        assert!(!pre[one_vertex]);
    }

    #[test]
    fn walks_stay_admissible() {
        let g = golden();
        let mut rng = SplitMix64::new(7);
        for _ in 0..50 {
            let w = g.sample_walk(40, &mut rng);
            assert!(!contains_word(&w, &[1, 1]));
            let b = g.sample_walk_back(40, &mut rng);
            assert!(!contains_word(&b, &[1, 1]));
        }
    }

    #[test]
    fn some_cycle_returns_an_admissible_loop() {
        for g in [golden(), period_two(), SftGraph::full_shift(2).unwrap()] {
            let c = g.some_cycle();
            assert!(!c.is_empty());
            // The doubled cycle word must still be admissible.
            let mut doubled = c.clone();
            doubled.extend_from_slice(&c);
            assert!(g.word_extendable(&doubled));
        }
    }

    #[test]
    fn periodic_word_shows_its_cycle_factor() {
        let word: Vec<u8> = (0..600).map(|i| (i % 2) as u8).collect();
        let hits = periodic_factor_scan(&word, 12, 8).unwrap();
        assert_eq!(hits, vec![PeriodicFactorHit { period: 2, window: 1 }]);

        let word3: Vec<u8> = (0..600).map(|i| (i % 3) as u8).collect();
        let hits3 = periodic_factor_scan(&word3, 12, 8).unwrap();
        assert_eq!(hits3, vec![PeriodicFactorHit { period: 3, window: 1 }]);
    }

    #[test]
    fn doubling_word_has_an_even_phase_but_no_odd_one() {
        let mut rules = std::collections::BTreeMap::new();
        rules.insert("0".into(), "01".into());
        rules.insert("1".into(), "10".into());
        let text = crate::systems::substitution_fixed_point(&rules, "0", 20_000).unwrap();
        let word: Vec<u8> = text.bytes().map(|b| b - b'0').collect();
        let hits = periodic_factor_scan(&word, 12, 16).unwrap();
        let periods: Vec<usize> = hits.iter().map(|h| h.period).collect();
        // Blocks of the doubling map pin phases for powers of two only.
        assert!(periods.contains(&2));
        for p in [3, 5, 6, 7, 9, 10, 11, 12] {
            assert!(!periods.contains(&p), "unexpected period {p} in {periods:?}");
        }
        // A single symbol cannot carry the phase.
        assert!(hits.iter().all(|h| h.window > 1));
    }

    #[test]
    fn scan_rejects_degenerate_bounds() {
        let word = vec![0u8; 100];
        assert!(periodic_factor_scan(&word, 1, 8).is_err());
        assert!(periodic_factor_scan(&word, 12, 0).is_err());
        assert!(periodic_factor_scan(&word, 12, 17).is_err());
        assert!(periodic_factor_scan(&word[..10], 12, 16).is_err());
    }
}
