use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::alphabet::{Alphabet, SymSet};

use super::AutomatonError;

pub const DEFAULT_STATE_CAP: usize = 100_000;

/// Sentinel for "no transition" inside the epsilon automata used by
/// concatenation and star.
const NONE: u32 = u32::MAX;

/// A complete deterministic automaton whose transitions are indexed by
/// alphabet blocks rather than single symbols.
///
/// Every constructor and operation returns the minimal automaton in a
/// canonical numbering: state 0 is the start state, states are numbered in
/// breadth-first order, and blocks are the coarsest symbol partition the
/// transitions allow, numbered by their first symbol. Two automata over the
/// same alphabet therefore compare equal exactly when their languages do.
#[derive(Clone)]
pub struct Dfa {
    alphabet: Arc<Alphabet>,
    block_of: Vec<u16>,
    num_blocks: usize,
    trans: Vec<u32>,
    accept: Vec<bool>,
    cap: usize,
}

impl PartialEq for Dfa {
    fn eq(&self, o: &Self) -> bool {
        same_alphabet(&self.alphabet, &o.alphabet)
            && self.block_of == o.block_of
            && self.trans == o.trans
            && self.accept == o.accept
    }
}

impl Eq for Dfa {}

impl Hash for Dfa {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.block_of.hash(h);
        self.trans.hash(h);
        self.accept.hash(h);
    }
}

impl std::fmt::Debug for Dfa {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dfa")
            .field("states", &self.num_states())
            .field("blocks", &self.num_blocks)
            .field("accepting", &self.accept.iter().filter(|a| **a).count())
            .finish()
    }
}

fn same_alphabet(a: &Arc<Alphabet>, b: &Arc<Alphabet>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Raw automaton before minimization. `trans` may contain `NONE` only when
/// `eps` is in use.
struct Raw {
    block_of: Vec<u16>,
    num_blocks: usize,
    trans: Vec<u32>,
    accept: Vec<bool>,
}

impl Dfa {
    fn from_raw(alphabet: Arc<Alphabet>, raw: Raw, cap: usize) -> Dfa {
        minimize(alphabet, raw, cap)
    }

    /// Strings of length one whose symbol lies in `set`.
    pub fn symbols(alphabet: &Arc<Alphabet>, set: SymSet) -> Dfa {
        let n = alphabet.len();
        let block_of = (0..n).map(|i| u16::from(!set.contains(i))).collect();
        // 0 start, 1 accept, 2 dead; block 0 = set, block 1 = rest
        let raw = Raw {
            block_of,
            num_blocks: 2,
            trans: vec![1, 2, 2, 2, 2, 2],
            accept: vec![false, true, false],
        };
        Dfa::from_raw(alphabet.clone(), raw, DEFAULT_STATE_CAP)
    }

    /// The single string `syms`.
    pub fn word(alphabet: &Arc<Alphabet>, syms: &[u8]) -> Dfa {
        let n = alphabet.len();
        let mut block_of = vec![0u16; n];
        let mut distinct: Vec<u8> = Vec::new();
        for &s in syms {
            if !distinct.contains(&s) {
                distinct.push(s);
                block_of[s as usize] = distinct.len() as u16;
            }
        }
        let nb = distinct.len() + 1;
        let len = syms.len();
        let dead = (len + 1) as u32;
        let mut trans = vec![dead; (len + 2) * nb];
        for (i, &s) in syms.iter().enumerate() {
            trans[i * nb + block_of[s as usize] as usize] = (i + 1) as u32;
        }
        let mut accept = vec![false; len + 2];
        accept[len] = true;
        let raw = Raw {
            block_of,
            num_blocks: nb,
            trans,
            accept,
        };
        Dfa::from_raw(alphabet.clone(), raw, DEFAULT_STATE_CAP)
    }

    pub fn empty(alphabet: &Arc<Alphabet>) -> Dfa {
        Dfa::single_state(alphabet, false)
    }

    /// Every string over the alphabet, including the empty one.
    pub fn universal(alphabet: &Arc<Alphabet>) -> Dfa {
        Dfa::single_state(alphabet, true)
    }

    pub fn epsilon(alphabet: &Arc<Alphabet>) -> Dfa {
        Dfa::word(alphabet, &[])
    }

    fn single_state(alphabet: &Arc<Alphabet>, accepting: bool) -> Dfa {
        let raw = Raw {
            block_of: vec![0; alphabet.len()],
            num_blocks: 1,
            trans: vec![0],
            accept: vec![accepting],
        };
        Dfa::from_raw(alphabet.clone(), raw, DEFAULT_STATE_CAP)
    }

    /// Same language, with a different state cap for later operations.
    pub fn with_cap(mut self, cap: usize) -> Dfa {
        self.cap = cap;
        self
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.accept.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.num_blocks
    }

    pub fn state_cap(&self) -> usize {
        self.cap
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accept[q]
    }

    pub fn block_of(&self, sym: usize) -> usize {
        self.block_of[sym] as usize
    }

    pub fn next(&self, q: usize, block: usize) -> usize {
        self.trans[q * self.num_blocks + block] as usize
    }

    /// Symbols of every block, in symbol order.
    pub fn block_symbols(&self) -> Vec<Vec<u8>> {
        let mut out = vec![Vec::new(); self.num_blocks];
        for (s, &b) in self.block_of.iter().enumerate() {
            out[b as usize].push(s as u8);
        }
        out
    }

    /// Non-accepting state whose transitions all loop back to itself.
    pub fn sink(&self) -> Option<usize> {
        (0..self.num_states())
            .find(|&q| !self.accept[q] && (0..self.num_blocks).all(|b| self.next(q, b) == q))
    }

    pub fn matches_symbols(&self, syms: &[u8]) -> bool {
        let mut q = 0;
        for &s in syms {
            q = self.next(q, self.block_of[s as usize] as usize);
        }
        self.accept[q]
    }

    /// Membership test. Characters outside the alphabet are rejected.
    pub fn matches(&self, s: &str) -> bool {
        match self.alphabet.encode(s) {
            Some(syms) => self.matches_symbols(&syms),
            None => false,
        }
    }

    pub fn is_empty(&self) -> bool {
        // minimal: an empty language has a single rejecting state
        !self.accept.iter().any(|a| *a)
    }

    pub fn is_universal(&self) -> bool {
        self.accept.iter().all(|a| *a)
    }

    pub fn complement(&self) -> Dfa {
        let mut out = self.clone();
        for a in &mut out.accept {
            *a = !*a;
        }
        out
    }

    fn check_alphabet(&self, o: &Dfa) -> Result<(), AutomatonError> {
        if same_alphabet(&self.alphabet, &o.alphabet) {
            Ok(())
        } else {
            Err(AutomatonError::AlphabetMismatch)
        }
    }

    /// Coarsest common refinement of the two block partitions. Returns the
    /// new partition and, per new block, the pair of old blocks.
    fn refine(&self, o: &Dfa) -> (Vec<u16>, Vec<(usize, usize)>) {
        let mut ids: HashMap<(u16, u16), u16> = HashMap::new();
        let mut reps = Vec::new();
        let block_of = self
            .block_of
            .iter()
            .zip(&o.block_of)
            .map(|(&a, &b)| {
                *ids.entry((a, b)).or_insert_with(|| {
                    reps.push((a as usize, b as usize));
                    (reps.len() - 1) as u16
                })
            })
            .collect();
        (block_of, reps)
    }

    fn product(&self, o: &Dfa, op: impl Fn(bool, bool) -> bool) -> Result<Dfa, AutomatonError> {
        self.check_alphabet(o)?;
        let cap = self.cap.min(o.cap);
        let (block_of, reps) = self.refine(o);
        let nb = reps.len();
        let mut index: HashMap<(u32, u32), u32> = HashMap::new();
        let mut states = vec![(0u32, 0u32)];
        index.insert((0, 0), 0);
        let mut trans = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let (p, q) = states[i];
            for &(b1, b2) in &reps {
                let t = (
                    self.trans[p as usize * self.num_blocks + b1],
                    o.trans[q as usize * o.num_blocks + b2],
                );
                let id = match index.get(&t) {
                    Some(&id) => id,
                    None => {
                        if states.len() >= cap {
                            return Err(AutomatonError::StateCapExceeded { cap });
                        }
                        let id = states.len() as u32;
                        index.insert(t, id);
                        states.push(t);
                        id
                    }
                };
                trans.push(id);
            }
            i += 1;
        }
        let accept = states
            .iter()
            .map(|&(p, q)| op(self.accept[p as usize], o.accept[q as usize]))
            .collect();
        let raw = Raw {
            block_of,
            num_blocks: nb,
            trans,
            accept,
        };
        Ok(Dfa::from_raw(self.alphabet.clone(), raw, cap))
    }

    pub fn intersect(&self, o: &Dfa) -> Result<Dfa, AutomatonError> {
        self.product(o, |a, b| a && b)
    }

    pub fn union(&self, o: &Dfa) -> Result<Dfa, AutomatonError> {
        self.product(o, |a, b| a || b)
    }

    /// `L(self) \ L(o)`.
    pub fn difference(&self, o: &Dfa) -> Result<Dfa, AutomatonError> {
        self.product(o, |a, b| a && !b)
    }

    /// Walks the reachable part of the product and reports whether some
    /// reachable pair satisfies `bad`, without building the product.
    fn product_reaches(
        &self,
        o: &Dfa,
        bad: impl Fn(bool, bool) -> bool,
    ) -> Result<bool, AutomatonError> {
        self.check_alphabet(o)?;
        let (_, reps) = self.refine(o);
        let mut seen = std::collections::HashSet::new();
        let mut queue = VecDeque::from([(0u32, 0u32)]);
        seen.insert((0u32, 0u32));
        while let Some((p, q)) = queue.pop_front() {
            if bad(self.accept[p as usize], o.accept[q as usize]) {
                return Ok(true);
            }
            for &(b1, b2) in &reps {
                let t = (
                    self.trans[p as usize * self.num_blocks + b1],
                    o.trans[q as usize * o.num_blocks + b2],
                );
                if seen.insert(t) {
                    queue.push_back(t);
                }
            }
        }
        Ok(false)
    }

    /// Language equality, decided as emptiness of the symmetric difference.
    pub fn equivalent(&self, o: &Dfa) -> Result<bool, AutomatonError> {
        self.product_reaches(o, |a, b| a != b).map(|diff| !diff)
    }

    /// `L(self) ⊆ L(o)`.
    pub fn is_subset(&self, o: &Dfa) -> Result<bool, AutomatonError> {
        self.product_reaches(o, |a, b| a && !b).map(|diff| !diff)
    }

    pub fn intersects(&self, o: &Dfa) -> Result<bool, AutomatonError> {
        self.product_reaches(o, |a, b| a && b)
    }

    /// Concatenation through an epsilon automaton and subset construction.
    pub fn concat(&self, o: &Dfa) -> Result<Dfa, AutomatonError> {
        self.check_alphabet(o)?;
        let cap = self.cap.min(o.cap);
        let (block_of, reps) = self.refine(o);
        let nb = reps.len();
        let n1 = self.num_states();
        let n = n1 + o.num_states();
        let mut trans = vec![NONE; n * nb];
        for (b, &(b1, b2)) in reps.iter().enumerate() {
            for q in 0..n1 {
                trans[q * nb + b] = self.trans[q * self.num_blocks + b1];
            }
            for q in 0..o.num_states() {
                trans[(n1 + q) * nb + b] = o.trans[q * o.num_blocks + b2] + n1 as u32;
            }
        }
        let mut eps = vec![Vec::new(); n];
        for (e, &acc) in eps.iter_mut().zip(&self.accept) {
            if acc {
                e.push(n1 as u32);
            }
        }
        let mut accept = vec![false; n];
        accept[n1..].copy_from_slice(&o.accept);
        let nfa = EpsNfa {
            num_blocks: nb,
            trans,
            eps,
            accept,
            start: 0,
        };
        let raw = nfa.determinize(block_of, cap)?;
        Ok(Dfa::from_raw(self.alphabet.clone(), raw, cap))
    }

    /// Kleene star.
    pub fn star(&self) -> Result<Dfa, AutomatonError> {
        let n = self.num_states();
        let nb = self.num_blocks;
        let mut trans = self.trans.clone();
        trans.extend(std::iter::repeat_n(NONE, nb));
        let mut eps = vec![Vec::new(); n + 1];
        for (e, &acc) in eps.iter_mut().zip(&self.accept) {
            if acc {
                e.push(0);
            }
        }
        eps[n].push(0);
        let mut accept = self.accept.clone();
        accept.push(true);
        let nfa = EpsNfa {
            num_blocks: nb,
            trans,
            eps,
            accept,
            start: n as u32,
        };
        let raw = nfa.determinize(self.block_of.clone(), self.cap)?;
        Ok(Dfa::from_raw(self.alphabet.clone(), raw, self.cap))
    }

    pub fn optional(&self) -> Result<Dfa, AutomatonError> {
        self.union(&Dfa::epsilon(&self.alphabet).with_cap(self.cap))
    }

    /// `L^k1 ∪ ... ∪ L^k2`, with `max = None` meaning unbounded.
    pub fn repeat(&self, min: u32, max: Option<u32>) -> Result<Dfa, AutomatonError> {
        let eps = Dfa::epsilon(&self.alphabet).with_cap(self.cap);
        let mut out = eps.clone();
        for _ in 0..min {
            out = out.concat(self)?;
        }
        match max {
            None => out.concat(&self.star()?),
            Some(max) if max < min => Ok(Dfa::empty(&self.alphabet).with_cap(self.cap)),
            Some(max) => {
                let opt = self.optional()?;
                for _ in min..max {
                    out = out.concat(&opt)?;
                }
                Ok(out)
            }
        }
    }

    /// Length of a shortest accepted string.
    pub fn shortest_len(&self) -> Option<usize> {
        let mut dist = vec![usize::MAX; self.num_states()];
        dist[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(q) = queue.pop_front() {
            if self.accept[q] {
                return Some(dist[q]);
            }
            for b in 0..self.num_blocks {
                let t = self.next(q, b);
                if dist[t] == usize::MAX {
                    dist[t] = dist[q] + 1;
                    queue.push_back(t);
                }
            }
        }
        None
    }

    /// Some shortest accepted string.
    pub fn shortest_example(&self) -> Option<String> {
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.num_states()];
        let mut seen = vec![false; self.num_states()];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        let blocks = self.block_symbols();
        while let Some(q) = queue.pop_front() {
            if self.accept[q] {
                let mut syms = Vec::new();
                let mut cur = q;
                while let Some((p, b)) = prev[cur] {
                    syms.push(blocks[b][0]);
                    cur = p;
                }
                syms.reverse();
                return Some(self.alphabet.decode(&syms));
            }
            for b in 0..self.num_blocks {
                let t = self.next(q, b);
                if !seen[t] {
                    seen[t] = true;
                    prev[t] = Some((q, b));
                    queue.push_back(t);
                }
            }
        }
        None
    }

    /// Graphviz rendering, one edge per (state, block) with the block's
    /// symbols as label.
    pub fn to_dot(&self) -> String {
        let blocks = self.block_symbols();
        let mut out =
            String::from("digraph dfa {\n  rankdir=LR;\n  start [shape=point];\n  start -> q0;\n");
        for q in 0..self.num_states() {
            let shape = if self.accept[q] {
                "doublecircle"
            } else {
                "circle"
            };
            let _ = writeln!(out, "  q{q} [shape={shape}];");
        }
        for q in 0..self.num_states() {
            let mut by_target: Vec<(usize, String)> = Vec::new();
            for (b, syms) in blocks.iter().enumerate() {
                let t = self.next(q, b);
                let label: String = self.alphabet.decode(syms);
                match by_target.iter_mut().find(|(tt, _)| *tt == t) {
                    Some((_, l)) => l.push_str(&label),
                    None => by_target.push((t, label)),
                }
            }
            for (t, label) in by_target {
                let label = label.replace('\\', "\\\\").replace('"', "\\\"");
                let _ = writeln!(out, "  q{q} -> q{t} [label=\"{label}\"];");
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Automaton with at most one symbol transition per (state, block) plus
/// epsilon edges, the shape produced by concatenating or starring DFAs.
struct EpsNfa {
    num_blocks: usize,
    trans: Vec<u32>,
    eps: Vec<Vec<u32>>,
    accept: Vec<bool>,
    start: u32,
}

impl EpsNfa {
    fn closure(&self, set: &mut Vec<u32>) {
        let mut stack = set.clone();
        while let Some(q) = stack.pop() {
            for &t in &self.eps[q as usize] {
                if !set.contains(&t) {
                    set.push(t);
                    stack.push(t);
                }
            }
        }
        set.sort_unstable();
        set.dedup();
    }

    fn determinize(&self, block_of: Vec<u16>, cap: usize) -> Result<Raw, AutomatonError> {
        let nb = self.num_blocks;
        let mut first = vec![self.start];
        self.closure(&mut first);
        let mut index: HashMap<Vec<u32>, u32> = HashMap::new();
        index.insert(first.clone(), 0);
        let mut subsets = vec![first];
        let mut trans = Vec::new();
        let mut i = 0;
        while i < subsets.len() {
            for b in 0..nb {
                let mut next: Vec<u32> = subsets[i]
                    .iter()
                    .map(|&q| self.trans[q as usize * nb + b])
                    .filter(|&t| t != NONE)
                    .collect();
                self.closure(&mut next);
                let id = match index.get(&next) {
                    Some(&id) => id,
                    None => {
                        if subsets.len() >= cap {
                            return Err(AutomatonError::StateCapExceeded { cap });
                        }
                        let id = subsets.len() as u32;
                        index.insert(next.clone(), id);
                        subsets.push(next);
                        id
                    }
                };
                trans.push(id);
            }
            i += 1;
        }
        let accept = subsets
            .iter()
            .map(|s| s.iter().any(|&q| self.accept[q as usize]))
            .collect();
        Ok(Raw {
            block_of,
            num_blocks: nb,
            trans,
            accept,
        })
    }
}

/// Removes blocks no symbol maps to; their columns would otherwise take part
/// in reachability and refinement.
fn drop_unused_blocks(raw: Raw) -> Raw {
    let mut used = vec![false; raw.num_blocks];
    for &b in &raw.block_of {
        used[b as usize] = true;
    }
    if used.iter().all(|u| *u) {
        return raw;
    }
    let kept: Vec<usize> = (0..raw.num_blocks).filter(|&b| used[b]).collect();
    let mut renum = vec![0u16; raw.num_blocks];
    for (i, &b) in kept.iter().enumerate() {
        renum[b] = i as u16;
    }
    let n = raw.accept.len();
    let mut trans = Vec::with_capacity(n * kept.len());
    for q in 0..n {
        for &b in &kept {
            trans.push(raw.trans[q * raw.num_blocks + b]);
        }
    }
    Raw {
        block_of: raw.block_of.iter().map(|&b| renum[b as usize]).collect(),
        num_blocks: kept.len(),
        trans,
        accept: raw.accept,
    }
}

/// Minimizes by partition refinement, then renumbers canonically.
fn minimize(alphabet: Arc<Alphabet>, raw: Raw, cap: usize) -> Dfa {
    let raw = drop_unused_blocks(raw);
    let nb = raw.num_blocks;
    // keep only states reachable from 0
    let n0 = raw.accept.len();
    let mut reach = vec![false; n0];
    reach[0] = true;
    let mut stack = vec![0usize];
    while let Some(q) = stack.pop() {
        for b in 0..nb {
            let t = raw.trans[q * nb + b] as usize;
            if !reach[t] {
                reach[t] = true;
                stack.push(t);
            }
        }
    }
    let live: Vec<usize> = (0..n0).filter(|&q| reach[q]).collect();
    let mut local = vec![usize::MAX; n0];
    for (i, &q) in live.iter().enumerate() {
        local[q] = i;
    }
    let n = live.len();
    let next = |q: usize, b: usize| local[raw.trans[live[q] * nb + b] as usize];

    // inverse transitions: inv[b][t] = sources
    let mut inv: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); n]; nb];
    for q in 0..n {
        for (b, row) in inv.iter_mut().enumerate() {
            row[next(q, b)].push(q);
        }
    }

    let mut class_of = vec![0usize; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let acc: Vec<usize> = (0..n).filter(|&q| raw.accept[live[q]]).collect();
    let rej: Vec<usize> = (0..n).filter(|&q| !raw.accept[live[q]]).collect();
    for part in [acc, rej] {
        if !part.is_empty() {
            for &q in &part {
                class_of[q] = classes.len();
            }
            classes.push(part);
        }
    }
    let mut work: Vec<usize> = (0..classes.len()).collect();
    let mut in_work = vec![true; classes.len()];
    let mut mark = vec![false; n];
    while let Some(splitter) = work.pop() {
        in_work[splitter] = false;
        let members = classes[splitter].clone();
        for row in &inv {
            let mut sources = Vec::new();
            for &t in &members {
                for &q in &row[t] {
                    if !mark[q] {
                        mark[q] = true;
                        sources.push(q);
                    }
                }
            }
            let mut touched: Vec<usize> = sources.iter().map(|&q| class_of[q]).collect();
            touched.sort_unstable();
            touched.dedup();
            for c in touched {
                let (inside, outside): (Vec<usize>, Vec<usize>) =
                    classes[c].iter().partition(|&&q| mark[q]);
                if outside.is_empty() {
                    continue;
                }
                let new_id = classes.len();
                let (keep, moved) = if inside.len() <= outside.len() {
                    (outside, inside)
                } else {
                    (inside, outside)
                };
                for &q in &moved {
                    class_of[q] = new_id;
                }
                classes[c] = keep;
                classes.push(moved);
                // if c is queued both halves end up queued; otherwise the
                // smaller half suffices
                in_work.push(true);
                work.push(new_id);
            }
            for q in sources {
                mark[q] = false;
            }
        }
    }

    // quotient automaton, indexed by class
    let m = classes.len();
    let mut qtrans = vec![0u32; m * nb];
    let mut qaccept = vec![false; m];
    for (c, members) in classes.iter().enumerate() {
        let q = members[0];
        qaccept[c] = raw.accept[live[q]];
        for b in 0..nb {
            qtrans[c * nb + b] = class_of[next(q, b)] as u32;
        }
    }
    let start = class_of[0];

    // coarsest symbol partition: symbols whose old blocks have identical columns
    let mut col_id: HashMap<Vec<u32>, u16> = HashMap::new();
    let mut old_to_new = vec![0u16; nb];
    let mut seen_old = vec![false; nb];
    let mut new_nb = 0usize;
    let mut new_block_of = Vec::with_capacity(raw.block_of.len());
    for &ob in &raw.block_of {
        let ob = ob as usize;
        if !seen_old[ob] {
            seen_old[ob] = true;
            let col: Vec<u32> = (0..m).map(|c| qtrans[c * nb + ob]).collect();
            let id = *col_id.entry(col).or_insert_with(|| {
                new_nb += 1;
                (new_nb - 1) as u16
            });
            old_to_new[ob] = id;
        }
        new_block_of.push(old_to_new[ob]);
    }
    let mut rep_old = vec![usize::MAX; new_nb];
    for (ob, &nbk) in old_to_new.iter().enumerate() {
        if seen_old[ob] && rep_old[nbk as usize] == usize::MAX {
            rep_old[nbk as usize] = ob;
        }
    }
    let new_nb = new_nb.max(1);
    if rep_old.is_empty() {
        rep_old.push(0);
    }

    // breadth-first renumbering from the start state
    let mut order = vec![usize::MAX; m];
    let mut seq = vec![start];
    order[start] = 0;
    let mut i = 0;
    while i < seq.len() {
        let c = seq[i];
        for &ob in &rep_old {
            let t = qtrans[c * nb + ob] as usize;
            if order[t] == usize::MAX {
                order[t] = seq.len();
                seq.push(t);
            }
        }
        i += 1;
    }
    let mut trans = Vec::with_capacity(seq.len() * new_nb);
    let mut accept = Vec::with_capacity(seq.len());
    for &c in &seq {
        accept.push(qaccept[c]);
        for &ob in &rep_old {
            trans.push(order[qtrans[c * nb + ob] as usize] as u32);
        }
    }
    Dfa {
        alphabet,
        block_of: new_block_of,
        num_blocks: new_nb,
        trans,
        accept,
        cap,
    }
}
