use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use super::db::WordnetDb;
use super::id::{PartOfSpeech, SynsetId};

/// A node of a part-of-speech taxonomy: a real synset or the virtual root
/// placed above the roots of a multi-root hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TaxonomyNode {
    VirtualRoot(PartOfSpeech),
    Synset(SynsetId),
}

impl TaxonomyNode {
    pub fn synset(self) -> Option<SynsetId> {
        match self {
            Self::Synset(id) => Some(id),
            Self::VirtualRoot(_) => None,
        }
    }
}

impl fmt::Display for TaxonomyNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::VirtualRoot(pos) => write!(f, "*root*-{}", pos.letter()),
            Self::Synset(id) => id.fmt(f),
        }
    }
}

impl Serialize for TaxonomyNode {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// The hypernym hierarchy of one part of speech, with depths and hyponym
/// counts precomputed.
///
/// Slots `0..n` are the synsets in id order; when the hierarchy has more than
/// one root (or a cycle with no way up) slot `n` is a virtual root whose
/// children are those roots. Depth counts edges from the root, root = 0.
#[derive(Debug)]
pub struct Taxonomy {
    pos: PartOfSpeech,
    ids: Vec<SynsetId>,
    slots: HashMap<SynsetId, usize>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    root: usize,
    virtual_root: bool,
    depth: Vec<u32>,
    hypo: Vec<u32>,
    max_depth: u32,
}

impl Taxonomy {
    pub(crate) fn build(db: &WordnetDb, pos: PartOfSpeech) -> Self {
        let ids: Vec<SynsetId> = db.synsets_of(pos).map(|s| s.id).collect();
        let slots: HashMap<SynsetId, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        let n = ids.len();

        let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, id) in ids.iter().enumerate() {
            let synset = db.get(*id).expect("id from db");
            for target in synset.hypernyms() {
                if let Some(&p) = slots.get(&target) {
                    if p != i && !parents[i].contains(&p) {
                        parents[i].push(p);
                    }
                }
            }
        }
        warn_cycles(&ids, &parents);

        let mut roots: Vec<usize> = (0..n).filter(|&i| parents[i].is_empty()).collect();

        // Nodes that cannot reach a root (hypernym cycles) are attached to the
        // root as extra top-level nodes, smallest offset first.
        let mut children = invert(&parents, n);
        let mut reached = vec![false; n];
        mark_reachable(&roots, &children, &mut reached);
        while let Some(orphan) = (0..n).find(|&i| !reached[i]) {
            log::warn!(
                "{} is cut off from every root by a hypernym cycle; attaching it to the root",
                ids[orphan]
            );
            roots.push(orphan);
            mark_reachable(&[orphan], &children, &mut reached);
        }

        let virtual_root = roots.len() != 1;
        let root = if virtual_root {
            let vr = n;
            parents.push(Vec::new());
            children.push(Vec::new());
            for &r in &roots {
                parents[r].push(vr);
                children[vr].push(r);
            }
            vr
        } else {
            roots[0]
        };
        let total = parents.len();

        let mut depth = vec![u32::MAX; total];
        let mut queue = VecDeque::from([root]);
        depth[root] = 0;
        while let Some(u) = queue.pop_front() {
            for &c in &children[u] {
                if depth[c] == u32::MAX {
                    depth[c] = depth[u] + 1;
                    queue.push_back(c);
                }
            }
        }
        let max_depth = depth.iter().copied().max().unwrap_or(0);

        let mut hypo = vec![0u32; total];
        let mut stamp = vec![usize::MAX; total];
        let mut stack = Vec::new();
        for start in 0..total {
            if start == root {
                hypo[start] = (total - 1) as u32;
                continue;
            }
            let mut count = 0u32;
            stamp[start] = start;
            stack.extend(children[start].iter().copied());
            while let Some(u) = stack.pop() {
                if stamp[u] == start {
                    continue;
                }
                stamp[u] = start;
                count += 1;
                stack.extend(children[u].iter().copied());
            }
            hypo[start] = count;
        }

        Self {
            pos,
            ids,
            slots,
            parents,
            children,
            root,
            virtual_root,
            depth,
            hypo,
            max_depth,
        }
    }

    pub fn pos(&self) -> PartOfSpeech {
        self.pos
    }

    /// Number of nodes, including the virtual root when present.
    pub fn node_count(&self) -> usize {
        self.parents.len()
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    pub fn has_virtual_root(&self) -> bool {
        self.virtual_root
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn slot(&self, id: SynsetId) -> Option<usize> {
        self.slots.get(&id).copied()
    }

    pub fn node(&self, slot: usize) -> TaxonomyNode {
        if self.virtual_root && slot == self.root {
            TaxonomyNode::VirtualRoot(self.pos)
        } else {
            TaxonomyNode::Synset(self.ids[slot])
        }
    }

    pub fn depth(&self, slot: usize) -> u32 {
        self.depth[slot]
    }

    pub fn hyponym_count(&self, slot: usize) -> usize {
        self.hypo[slot] as usize
    }

    pub fn parents(&self, slot: usize) -> &[usize] {
        &self.parents[slot]
    }

    pub fn children(&self, slot: usize) -> &[usize] {
        &self.children[slot]
    }

    /// `slot` and every node above it.
    pub fn ancestors(&self, slot: usize) -> Vec<usize> {
        let mut seen = vec![false; self.node_count()];
        let mut out = vec![slot];
        seen[slot] = true;
        let mut i = 0;
        while i < out.len() {
            for &p in &self.parents[out[i]] {
                if !seen[p] {
                    seen[p] = true;
                    out.push(p);
                }
            }
            i += 1;
        }
        out
    }
}

fn invert(parents: &[Vec<usize>], n: usize) -> Vec<Vec<usize>> {
    let mut children = vec![Vec::new(); n];
    for (c, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(c);
        }
    }
    children
}

fn mark_reachable(starts: &[usize], children: &[Vec<usize>], reached: &mut [bool]) {
    let mut stack: Vec<usize> = starts.to_vec();
    while let Some(u) = stack.pop() {
        if reached[u] {
            continue;
        }
        reached[u] = true;
        stack.extend(children[u].iter().copied().filter(|&c| !reached[c]));
    }
}

/// Logs each hypernym cycle once, naming its synsets.
fn warn_cycles(ids: &[SynsetId], parents: &[Vec<usize>]) {
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Grey,
        Black,
    }
    let mut color = vec![Color::White; parents.len()];
    for start in 0..parents.len() {
        if color[start] != Color::White {
            continue;
        }
        let mut path: Vec<(usize, usize)> = vec![(start, 0)];
        color[start] = Color::Grey;
        while let Some(&mut (u, ref mut next)) = path.last_mut() {
            if let Some(&p) = parents[u].get(*next) {
                *next += 1;
                match color[p] {
                    Color::White => {
                        color[p] = Color::Grey;
                        path.push((p, 0));
                    }
                    Color::Grey => {
                        let from = path.iter().position(|&(v, _)| v == p).unwrap_or(0);
                        let cycle: Vec<String> = path[from..].iter().map(|&(v, _)| ids[v].to_string()).collect();
                        log::warn!("hypernym cycle: {}", cycle.join(" -> "));
                    }
                    Color::Black => {}
                }
            } else {
                color[u] = Color::Black;
                path.pop();
            }
        }
    }
}
