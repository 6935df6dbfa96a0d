//! Sorted multiset with order-statistic queries.
//!
//! Backed by an AVL tree stored in an arena. Each node holds one distinct
//! value with its multiplicity; nodes are augmented with the total
//! multiplicity of their subtree so that rank and select run in
//! `O(log n)`. The sum of all elements is cached and updated on insert.
//! Elements are never removed, which is all the mean-median map needs.

use std::cmp::Ordering;

use crate::error::{MmmError, Result};
use crate::scalar::Scalar;

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Node<S> {
    key: S,
    mult: usize,
    size: usize,
    height: u8,
    left: u32,
    right: u32,
}

#[derive(Debug, Clone)]
pub struct OrderedMultiset<S> {
    nodes: Vec<Node<S>>,
    root: u32,
    sum: S,
}

impl<S: Scalar> Default for OrderedMultiset<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> OrderedMultiset<S> {
    pub fn new() -> Self {
        OrderedMultiset {
            nodes: Vec::new(),
            root: NIL,
            sum: S::zero(),
        }
    }

    pub fn from_values<I: IntoIterator<Item = S>>(values: I) -> Self {
        let mut ms = Self::new();
        for v in values {
            ms.insert(v);
        }
        ms
    }

    /// Total multiplicity.
    pub fn len(&self) -> usize {
        self.size_of(self.root)
    }

    pub fn is_empty(&self) -> bool {
        self.root == NIL
    }

    /// Number of distinct values.
    pub fn distinct(&self) -> usize {
        self.nodes.len()
    }

    pub fn sum(&self) -> &S {
        &self.sum
    }

    pub fn insert(&mut self, x: S) {
        self.sum = self.sum.clone() + x.clone();
        self.root = self.insert_at(self.root, x);
    }

    pub fn multiplicity(&self, x: &S) -> usize {
        let mut cur = self.root;
        while cur != NIL {
            let node = &self.nodes[cur as usize];
            match x.cmp(&node.key) {
                Ordering::Less => cur = node.left,
                Ordering::Greater => cur = node.right,
                Ordering::Equal => return node.mult,
            }
        }
        0
    }

    /// Half-open rank interval `[low, high)` of `x`: `low` elements are
    /// strictly smaller than `x` and `high - low` equal it.
    pub fn rank(&self, x: &S) -> (usize, usize) {
        let mut less = 0;
        let mut cur = self.root;
        while cur != NIL {
            let node = &self.nodes[cur as usize];
            match x.cmp(&node.key) {
                Ordering::Less => cur = node.left,
                Ordering::Greater => {
                    less += self.size_of(node.left) + node.mult;
                    cur = node.right;
                }
                Ordering::Equal => {
                    less += self.size_of(node.left);
                    return (less, less + node.mult);
                }
            }
        }
        (less, less)
    }

    /// Number of elements strictly below `x`.
    pub fn count_below(&self, x: &S) -> usize {
        self.rank(x).0
    }

    /// Number of elements less than or equal to `x`.
    pub fn count_at_most(&self, x: &S) -> usize {
        self.rank(x).1
    }

    /// The element at zero-based position `i` of the sorted listing.
    pub fn select(&self, mut i: usize) -> Option<&S> {
        let mut cur = self.root;
        while cur != NIL {
            let node = &self.nodes[cur as usize];
            let left = self.size_of(node.left);
            if i < left {
                cur = node.left;
            } else if i < left + node.mult {
                return Some(&node.key);
            } else {
                i -= left + node.mult;
                cur = node.right;
            }
        }
        None
    }

    /// The two central elements. They coincide for odd sizes.
    pub fn central_pair(&self) -> Result<(&S, &S)> {
        let n = self.len();
        if n == 0 {
            return Err(MmmError::EmptyMultiset);
        }
        let hi = self.select(n / 2).expect("index in range");
        let lo = if n % 2 == 1 {
            hi
        } else {
            self.select(n / 2 - 1).expect("index in range")
        };
        Ok((lo, hi))
    }

    /// Central element for odd sizes, mean of the two central elements for
    /// even sizes.
    pub fn median(&self) -> Result<S> {
        let (lo, hi) = self.central_pair()?;
        if lo == hi {
            Ok(lo.clone())
        } else {
            Ok(S::midpoint(lo, hi))
        }
    }

    /// All elements in `[lo, hi]`, sorted, with multiplicity.
    pub fn window(&self, lo: &S, hi: &S) -> Result<Vec<S>> {
        if lo > hi {
            return Err(MmmError::ReversedWindow {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        let mut out = Vec::new();
        self.collect_range(self.root, lo, hi, &mut out);
        Ok(out)
    }

    /// Sorted listing with multiplicity.
    pub fn to_vec(&self) -> Vec<S> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = Vec::new();
        let mut cur = self.root;
        while cur != NIL || !stack.is_empty() {
            while cur != NIL {
                stack.push(cur);
                cur = self.nodes[cur as usize].left;
            }
            let idx = stack.pop().expect("non-empty stack");
            let node = &self.nodes[idx as usize];
            out.extend(std::iter::repeat_n(node.key.clone(), node.mult));
            cur = node.right;
        }
        out
    }

    pub fn min(&self) -> Option<&S> {
        self.select(0)
    }

    pub fn max(&self) -> Option<&S> {
        self.len().checked_sub(1).and_then(|i| self.select(i))
    }

    fn collect_range(&self, idx: u32, lo: &S, hi: &S, out: &mut Vec<S>) {
        if idx == NIL {
            return;
        }
        let node = &self.nodes[idx as usize];
        if &node.key > lo {
            self.collect_range(node.left, lo, hi, out);
        }
        if &node.key >= lo && &node.key <= hi {
            out.extend(std::iter::repeat_n(node.key.clone(), node.mult));
        }
        if &node.key < hi {
            self.collect_range(node.right, lo, hi, out);
        }
    }

    fn size_of(&self, idx: u32) -> usize {
        if idx == NIL {
            0
        } else {
            self.nodes[idx as usize].size
        }
    }

    fn height_of(&self, idx: u32) -> i32 {
        if idx == NIL {
            0
        } else {
            self.nodes[idx as usize].height as i32
        }
    }

    fn update(&mut self, idx: u32) {
        let (l, r) = {
            let n = &self.nodes[idx as usize];
            (n.left, n.right)
        };
        let size = self.size_of(l) + self.size_of(r) + self.nodes[idx as usize].mult;
        let height = 1 + self.height_of(l).max(self.height_of(r));
        let n = &mut self.nodes[idx as usize];
        n.size = size;
        n.height = height as u8;
    }

    fn rotate_right(&mut self, idx: u32) -> u32 {
        let l = self.nodes[idx as usize].left;
        self.nodes[idx as usize].left = self.nodes[l as usize].right;
        self.nodes[l as usize].right = idx;
        self.update(idx);
        self.update(l);
        l
    }

    fn rotate_left(&mut self, idx: u32) -> u32 {
        let r = self.nodes[idx as usize].right;
        self.nodes[idx as usize].right = self.nodes[r as usize].left;
        self.nodes[r as usize].left = idx;
        self.update(idx);
        self.update(r);
        r
    }

    fn rebalance(&mut self, idx: u32) -> u32 {
        self.update(idx);
        let (l, r) = {
            let n = &self.nodes[idx as usize];
            (n.left, n.right)
        };
        let balance = self.height_of(l) - self.height_of(r);
        if balance > 1 {
            let ll = self.nodes[l as usize].left;
            let lr = self.nodes[l as usize].right;
            if self.height_of(lr) > self.height_of(ll) {
                let nl = self.rotate_left(l);
                self.nodes[idx as usize].left = nl;
            }
            return self.rotate_right(idx);
        }
        if balance < -1 {
            let rl = self.nodes[r as usize].left;
            let rr = self.nodes[r as usize].right;
            if self.height_of(rl) > self.height_of(rr) {
                let nr = self.rotate_right(r);
                self.nodes[idx as usize].right = nr;
            }
            return self.rotate_left(idx);
        }
        idx
    }

    fn insert_at(&mut self, idx: u32, x: S) -> u32 {
        if idx == NIL {
            let id = u32::try_from(self.nodes.len()).expect("multiset exceeds u32 distinct values");
            assert!(id != NIL, "multiset exceeds u32 distinct values");
            self.nodes.push(Node {
                key: x,
                mult: 1,
                size: 1,
                height: 1,
                left: NIL,
                right: NIL,
            });
            return id;
        }
        match x.cmp(&self.nodes[idx as usize].key) {
            Ordering::Equal => {
                let n = &mut self.nodes[idx as usize];
                n.mult += 1;
                n.size += 1;
                idx
            }
            Ordering::Less => {
                let child = self.nodes[idx as usize].left;
                let nl = self.insert_at(child, x);
                self.nodes[idx as usize].left = nl;
                self.rebalance(idx)
            }
            Ordering::Greater => {
                let child = self.nodes[idx as usize].right;
                let nr = self.insert_at(child, x);
                self.nodes[idx as usize].right = nr;
                self.rebalance(idx)
            }
        }
    }

    #[cfg(test)]
    fn check_balanced(&self) -> bool {
        fn walk<S: Scalar>(ms: &OrderedMultiset<S>, idx: u32) -> Option<i32> {
            if idx == NIL {
                return Some(0);
            }
            let n = &ms.nodes[idx as usize];
            let hl = walk(ms, n.left)?;
            let hr = walk(ms, n.right)?;
            if (hl - hr).abs() > 1 {
                return None;
            }
            Some(1 + hl.max(hr))
        }
        walk(self, self.root).is_some()
    }
}
