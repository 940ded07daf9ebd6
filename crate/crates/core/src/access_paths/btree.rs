use super::{key_bytes, IndexKey};
use crate::storage::{CostModel, RowId};

#[derive(Debug, Clone)]
enum Node {
    Inner {
        /// `keys[i]` is the smallest key reachable through `children[i]`.
        keys: Vec<IndexKey>,
        children: Vec<usize>,
    },
    Leaf {
        keys: Vec<IndexKey>,
        rows: Vec<Vec<RowId>>,
        next: Option<usize>,
    },
}

/// Bulk-loaded B+Tree mapping each key to the ascending list of rows holding it.
///
/// Nodes are packed greedily by their accounted byte size: a leaf entry costs
/// its key plus one row reference per row, an inner entry its separator key
/// plus one child reference. With fixed-width keys the inner fanout is
/// `floor(page_bytes / (key_bytes + ref_bytes))`. A leaf entry larger than a
/// page gets a leaf of its own spanning `ceil(size / page_bytes)` pages.
#[derive(Debug, Clone)]
pub struct BPlusTree {
    nodes: Vec<Node>,
    root: usize,
    first_leaf: usize,
    height: usize,
    pages: u64,
}

impl BPlusTree {
    /// Builds from groups sorted by strictly ascending key.
    pub(crate) fn bulk_load(groups: Vec<(IndexKey, Vec<RowId>)>, cost: &CostModel) -> Self {
        debug_assert!(groups.windows(2).all(|w| w[0].0 < w[1].0));
        let pb = cost.page_bytes as u64;
        let ref_bytes = cost.field_bytes as u64;
        let mut nodes = Vec::new();
        let mut pages = 0u64;

        // Leaf level.
        let mut level: Vec<(IndexKey, usize)> = Vec::new();
        let mut keys = Vec::new();
        let mut rows = Vec::new();
        let mut used = 0u64;
        let mut flush = |keys: &mut Vec<IndexKey>,
                         rows: &mut Vec<Vec<RowId>>,
                         span: u64,
                         nodes: &mut Vec<Node>| {
            let id = nodes.len();
            level.push((keys[0].clone(), id));
            nodes.push(Node::Leaf {
                keys: std::mem::take(keys),
                rows: std::mem::take(rows),
                next: None,
            });
            pages += span;
        };
        for (key, list) in groups {
            let entry = key_bytes(&key, cost) + ref_bytes * list.len() as u64;
            if entry > pb {
                if !keys.is_empty() {
                    flush(&mut keys, &mut rows, 1, &mut nodes);
                    used = 0;
                }
                keys.push(key);
                rows.push(list);
                flush(&mut keys, &mut rows, entry.div_ceil(pb), &mut nodes);
                continue;
            }
            if used + entry > pb {
                flush(&mut keys, &mut rows, 1, &mut nodes);
                used = 0;
            }
            used += entry;
            keys.push(key);
            rows.push(list);
        }
        if !keys.is_empty() {
            flush(&mut keys, &mut rows, 1, &mut nodes);
        }
        if nodes.is_empty() {
            nodes.push(Node::Leaf {
                keys: Vec::new(),
                rows: Vec::new(),
                next: None,
            });
            return BPlusTree {
                nodes,
                root: 0,
                first_leaf: 0,
                height: 1,
                pages: 1,
            };
        }
        let leaf_count = nodes.len();
        for (i, node) in nodes
            .iter_mut()
            .take(leaf_count.saturating_sub(1))
            .enumerate()
        {
            if let Node::Leaf { next, .. } = node {
                *next = Some(i + 1);
            }
        }

        let mut height = 1;
        while level.len() > 1 {
            let mut upper = Vec::new();
            let mut keys: Vec<IndexKey> = Vec::new();
            let mut children = Vec::new();
            let mut used = 0u64;
            for (key, child) in level {
                let entry = key_bytes(&key, cost) + ref_bytes;
                if used + entry > pb && !keys.is_empty() {
                    upper.push((keys[0].clone(), nodes.len()));
                    nodes.push(Node::Inner {
                        keys: std::mem::take(&mut keys),
                        children: std::mem::take(&mut children),
                    });
                    pages += 1;
                    used = 0;
                }
                used += entry;
                keys.push(key);
                children.push(child);
            }
            upper.push((keys[0].clone(), nodes.len()));
            nodes.push(Node::Inner { keys, children });
            pages += 1;
            level = upper;
            height += 1;
        }
        BPlusTree {
            root: level[0].1,
            nodes,
            first_leaf: 0,
            height,
            pages,
        }
    }

    pub fn lookup(&self, key: &IndexKey) -> &[RowId] {
        let mut node = self.root;
        loop {
            match &self.nodes[node] {
                Node::Inner { keys, children } => {
                    let idx = keys.partition_point(|k| k <= key);
                    if idx == 0 {
                        return &[];
                    }
                    node = children[idx - 1];
                }
                Node::Leaf { keys, rows, .. } => {
                    return match keys.binary_search(key) {
                        Ok(i) => &rows[i],
                        Err(_) => &[],
                    };
                }
            }
        }
    }

    pub fn pages(&self) -> u64 {
        self.pages
    }

    /// Number of levels; every leaf sits at this depth.
    pub fn height(&self) -> usize {
        self.height
    }

    /// Walks the leaf chain left to right.
    pub fn iter(&self) -> impl Iterator<Item = (&IndexKey, &[RowId])> + '_ {
        let mut leaf = Some(self.first_leaf);
        let mut pos = 0;
        std::iter::from_fn(move || loop {
            let id = leaf?;
            let Node::Leaf { keys, rows, next } = &self.nodes[id] else {
                unreachable!("leaf chain reaches an inner node")
            };
            if pos < keys.len() {
                pos += 1;
                return Some((&keys[pos - 1], rows[pos - 1].as_slice()));
            }
            leaf = *next;
            pos = 0;
        })
    }

    /// Depth of every leaf, found by descending from the root.
    pub fn leaf_depths(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![(self.root, 1)];
        while let Some((id, depth)) = stack.pop() {
            match &self.nodes[id] {
                Node::Inner { children, .. } => {
                    stack.extend(children.iter().map(|&c| (c, depth + 1)))
                }
                Node::Leaf { .. } => out.push(depth),
            }
        }
        out
    }
}
