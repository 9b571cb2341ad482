//! A single random cut tree maintained under streaming insert/forget.
//!
//! Internal nodes hold an axis-aligned cut and the tight bounding box and
//! leaf count of their subtree; leaves hold points with a duplicate
//! multiplicity. Insertion draws the cut uniformly over the side lengths of
//! the bounding box extended by the new point, which keeps the tree
//! distributed as a random cut tree over its current leaf set.

use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
enum Node {
    Branch {
        cut_dim: usize,
        cut_val: f64,
        left: usize,
        right: usize,
        parent: Option<usize>,
        count: usize,
        bbox_min: Vec<f64>,
        bbox_max: Vec<f64>,
    },
    Leaf {
        point: Vec<f64>,
        count: usize,
        parent: Option<usize>,
    },
    Free,
}

#[derive(Debug, Clone)]
pub struct RcTree {
    dimension: usize,
    nodes: Vec<Node>,
    free: Vec<usize>,
    root: Option<usize>,
    // stream key -> leaf slot; exact duplicates share a leaf
    leaves: HashMap<u64, usize>,
}

impl RcTree {
    pub fn new(dimension: usize) -> Self {
        Self {
            dimension,
            nodes: Vec::new(),
            free: Vec::new(),
            root: None,
            leaves: HashMap::new(),
        }
    }

    pub fn num_points(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    pub fn contains(&self, key: u64) -> bool {
        self.leaves.contains_key(&key)
    }

    pub fn leaf_multiplicity(&self, key: u64) -> Option<usize> {
        let &slot = self.leaves.get(&key)?;
        match &self.nodes[slot] {
            Node::Leaf { count, .. } => Some(*count),
            _ => None,
        }
    }

    fn alloc(&mut self, node: Node) -> usize {
        if let Some(slot) = self.free.pop() {
            self.nodes[slot] = node;
            slot
        } else {
            self.nodes.push(node);
            self.nodes.len() - 1
        }
    }

    fn release(&mut self, slot: usize) {
        self.nodes[slot] = Node::Free;
        self.free.push(slot);
    }

    fn parent_of(&self, slot: usize) -> Option<usize> {
        match &self.nodes[slot] {
            Node::Branch { parent, .. } | Node::Leaf { parent, .. } => *parent,
            Node::Free => None,
        }
    }

    fn set_parent(&mut self, slot: usize, new_parent: Option<usize>) {
        match &mut self.nodes[slot] {
            Node::Branch { parent, .. } | Node::Leaf { parent, .. } => *parent = new_parent,
            Node::Free => {}
        }
    }

    fn count_of(&self, slot: usize) -> usize {
        match &self.nodes[slot] {
            Node::Branch { count, .. } | Node::Leaf { count, .. } => *count,
            Node::Free => 0,
        }
    }

    fn bbox_of(&self, slot: usize) -> (Vec<f64>, Vec<f64>) {
        match &self.nodes[slot] {
            Node::Branch {
                bbox_min, bbox_max, ..
            } => (bbox_min.clone(), bbox_max.clone()),
            Node::Leaf { point, .. } => (point.clone(), point.clone()),
            Node::Free => unreachable!("bbox of free slot"),
        }
    }

    /// Inserts `point` under `key`. An exact duplicate of an existing leaf
    /// increments that leaf's multiplicity.
    pub fn insert<R: Rng>(&mut self, key: u64, point: &[f64], rng: &mut R) -> Result<()> {
        if point.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                got: point.len(),
                expected: self.dimension,
            });
        }
        let Some(root) = self.root else {
            let leaf = self.alloc(Node::Leaf {
                point: point.to_vec(),
                count: 1,
                parent: None,
            });
            self.root = Some(leaf);
            self.leaves.insert(key, leaf);
            return Ok(());
        };

        let mut current = root;
        loop {
            let (bmin, bmax) = self.bbox_of(current);
            if let Some((cut_dim, cut_val, point_on_left)) =
                draw_separating_cut(&bmin, &bmax, point, rng)
            {
                self.splice(key, point, current, cut_dim, cut_val, point_on_left);
                return Ok(());
            }
            match &self.nodes[current] {
                Node::Branch {
                    cut_dim,
                    cut_val,
                    left,
                    right,
                    ..
                } => {
                    current = if point[*cut_dim] <= *cut_val {
                        *left
                    } else {
                        *right
                    };
                }
                Node::Leaf {
                    point: leaf_point, ..
                } => {
                    if leaf_point == point {
                        if let Node::Leaf { count, .. } = &mut self.nodes[current] {
                            *count += 1;
                        }
                        self.bump_counts_upward(self.parent_of(current), 1);
                        self.leaves.insert(key, current);
                        return Ok(());
                    }
                    // Distinct point at a leaf: the degenerate box makes a
                    // separating cut almost sure; loop draws again.
                }
                Node::Free => unreachable!("walked into a free slot"),
            }
        }
    }

    /// Replaces `at` with a new branch whose children are `at`'s subtree and
    /// a fresh leaf for `point`, then repairs ancestor counts and boxes.
    fn splice(
        &mut self,
        key: u64,
        point: &[f64],
        at: usize,
        cut_dim: usize,
        cut_val: f64,
        point_on_left: bool,
    ) {
        let old_parent = self.parent_of(at);
        let (mut bmin, mut bmax) = self.bbox_of(at);
        for d in 0..self.dimension {
            bmin[d] = bmin[d].min(point[d]);
            bmax[d] = bmax[d].max(point[d]);
        }
        let subtree_count = self.count_of(at);
        let leaf = self.alloc(Node::Leaf {
            point: point.to_vec(),
            count: 1,
            parent: None,
        });
        let (left, right) = if point_on_left { (leaf, at) } else { (at, leaf) };
        let branch = self.alloc(Node::Branch {
            cut_dim,
            cut_val,
            left,
            right,
            parent: old_parent,
            count: subtree_count + 1,
            bbox_min: bmin,
            bbox_max: bmax,
        });
        self.set_parent(leaf, Some(branch));
        self.set_parent(at, Some(branch));
        match old_parent {
            None => self.root = Some(branch),
            Some(p) => self.replace_child(p, at, branch),
        }
        self.leaves.insert(key, leaf);
        // Ancestors gain one leaf and their boxes may grow.
        let mut cursor = old_parent;
        while let Some(slot) = cursor {
            if let Node::Branch {
                count,
                bbox_min,
                bbox_max,
                parent,
                ..
            } = &mut self.nodes[slot]
            {
                *count += 1;
                for d in 0..point.len() {
                    bbox_min[d] = bbox_min[d].min(point[d]);
                    bbox_max[d] = bbox_max[d].max(point[d]);
                }
                cursor = *parent;
            } else {
                unreachable!("ancestor is not a branch");
            }
        }
    }

    fn replace_child(&mut self, parent: usize, old: usize, new: usize) {
        if let Node::Branch { left, right, .. } = &mut self.nodes[parent] {
            if *left == old {
                *left = new;
            } else {
                debug_assert_eq!(*right, old);
                *right = new;
            }
        }
    }

    fn bump_counts_upward(&mut self, start: Option<usize>, delta: isize) {
        let mut cursor = start;
        while let Some(slot) = cursor {
            if let Node::Branch { count, parent, .. } = &mut self.nodes[slot] {
                *count = (*count as isize + delta) as usize;
                cursor = *parent;
            } else {
                break;
            }
        }
    }

    /// Removes the point stored under `key` (decrements multiplicity first).
    pub fn forget(&mut self, key: u64) -> Result<()> {
        let leaf = *self.leaves.get(&key).ok_or(Error::PointAbsent)?;
        self.leaves.remove(&key);
        let multiplicity = match &mut self.nodes[leaf] {
            Node::Leaf { count, .. } => {
                *count -= 1;
                *count
            }
            _ => return Err(Error::PointAbsent),
        };
        if multiplicity > 0 {
            self.bump_counts_upward(self.parent_of(leaf), -1);
            return Ok(());
        }
        let Some(parent) = self.parent_of(leaf) else {
            self.release(leaf);
            self.root = None;
            return Ok(());
        };
        let sibling = match &self.nodes[parent] {
            Node::Branch { left, right, .. } => {
                if *left == leaf {
                    *right
                } else {
                    *left
                }
            }
            _ => unreachable!("leaf parent is not a branch"),
        };
        let grandparent = self.parent_of(parent);
        self.set_parent(sibling, grandparent);
        match grandparent {
            None => self.root = Some(sibling),
            Some(g) => self.replace_child(g, parent, sibling),
        }
        self.release(leaf);
        self.release(parent);
        // Counts shrink by one and boxes may tighten along the path up.
        let mut cursor = grandparent;
        while let Some(slot) = cursor {
            let (left, right) = match &self.nodes[slot] {
                Node::Branch { left, right, .. } => (*left, *right),
                _ => unreachable!(),
            };
            let (lmin, lmax) = self.bbox_of(left);
            let (rmin, rmax) = self.bbox_of(right);
            if let Node::Branch {
                count,
                bbox_min,
                bbox_max,
                parent,
                ..
            } = &mut self.nodes[slot]
            {
                *count -= 1;
                for d in 0..lmin.len() {
                    bbox_min[d] = lmin[d].min(rmin[d]);
                    bbox_max[d] = lmax[d].max(rmax[d]);
                }
                cursor = *parent;
            }
        }
        Ok(())
    }

    /// Collusive displacement of the point stored under `key`: the maximum
    /// over ancestors of sibling-subtree size divided by the size of the
    /// subtree on the point's path. A single-leaf tree scores 0.
    pub fn codisp(&self, key: u64) -> Result<f64> {
        let mut node = *self.leaves.get(&key).ok_or(Error::PointAbsent)?;
        let mut best = 0.0_f64;
        while let Some(parent) = self.parent_of(node) {
            let (left, right) = match &self.nodes[parent] {
                Node::Branch { left, right, .. } => (*left, *right),
                _ => unreachable!(),
            };
            let sibling = if left == node { right } else { left };
            let ratio = self.count_of(sibling) as f64 / self.count_of(node) as f64;
            best = best.max(ratio);
            node = parent;
        }
        Ok(best)
    }

    /// Structural validator: counts consistent, boxes tight, every leaf on
    /// the correct side of every ancestor cut, parent links coherent.
    pub fn check_invariants(&self) -> Result<()> {
        let Some(root) = self.root else {
            if self.leaves.is_empty() {
                return Ok(());
            }
            return Err(Error::StreamCorruption("keys mapped in empty tree".into()));
        };
        if self.parent_of(root).is_some() {
            return Err(Error::StreamCorruption("root has a parent".into()));
        }
        self.check_subtree(root)?;
        for (&key, &slot) in &self.leaves {
            match &self.nodes[slot] {
                Node::Leaf { .. } => {}
                _ => {
                    return Err(Error::StreamCorruption(format!(
                        "key {key} maps to non-leaf slot"
                    )))
                }
            }
        }
        Ok(())
    }

    fn check_subtree(&self, slot: usize) -> Result<(usize, Vec<f64>, Vec<f64>)> {
        match &self.nodes[slot] {
            Node::Leaf { point, count, .. } => {
                if *count == 0 {
                    return Err(Error::StreamCorruption("zero-multiplicity leaf".into()));
                }
                Ok((*count, point.clone(), point.clone()))
            }
            Node::Branch {
                cut_dim,
                cut_val,
                left,
                right,
                count,
                bbox_min,
                bbox_max,
                ..
            } => {
                if self.parent_of(*left) != Some(slot) || self.parent_of(*right) != Some(slot) {
                    return Err(Error::StreamCorruption("broken parent link".into()));
                }
                let (lc, lmin, lmax) = self.check_subtree(*left)?;
                let (rc, rmin, rmax) = self.check_subtree(*right)?;
                if lc + rc != *count {
                    return Err(Error::StreamCorruption(format!(
                        "count mismatch: {} != {} + {}",
                        count, lc, rc
                    )));
                }
                if lmax[*cut_dim] > *cut_val || rmin[*cut_dim] <= *cut_val {
                    return Err(Error::StreamCorruption(format!(
                        "cut-side violation at dim {cut_dim}"
                    )));
                }
                for d in 0..bbox_min.len() {
                    let want_min = lmin[d].min(rmin[d]);
                    let want_max = lmax[d].max(rmax[d]);
                    if bbox_min[d] != want_min || bbox_max[d] != want_max {
                        return Err(Error::StreamCorruption(format!(
                            "loose bounding box at dim {d}"
                        )));
                    }
                }
                Ok((*count, bbox_min.clone(), bbox_max.clone()))
            }
            Node::Free => Err(Error::StreamCorruption("reachable free slot".into())),
        }
    }
}

/// Draws one cut over the box extended by `point`. Returns the cut and which
/// side the new point falls on when the cut separates the point from the
/// existing box; `None` means the walk must descend.
fn draw_separating_cut<R: Rng>(
    bbox_min: &[f64],
    bbox_max: &[f64],
    point: &[f64],
    rng: &mut R,
) -> Option<(usize, f64, bool)> {
    let dim = point.len();
    let mut spans = Vec::with_capacity(dim);
    let mut total = 0.0;
    for d in 0..dim {
        let lo = bbox_min[d].min(point[d]);
        let hi = bbox_max[d].max(point[d]);
        total += hi - lo;
        spans.push((lo, hi - lo));
    }
    if total <= 0.0 {
        return None; // exact duplicate of a degenerate box
    }
    let r = rng.gen_range(0.0..total);
    let mut acc = 0.0;
    for (d, &(lo, span)) in spans.iter().enumerate() {
        if r < acc + span || d == dim - 1 {
            let cut = lo + (r - acc).clamp(0.0, span);
            if cut < bbox_min[d] && point[d] <= cut {
                return Some((d, cut, true)); // new point on the left
            }
            if cut >= bbox_max[d] && point[d] > cut {
                return Some((d, cut, false)); // new point on the right
            }
            return None;
        }
        acc += span;
    }
    None
}
