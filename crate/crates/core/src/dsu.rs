//! Union-find with a parity bit on each element, relative to its root.

#[derive(Debug, Clone)]
pub(crate) struct Dsu {
    parent: Vec<usize>,
    parity: Vec<bool>,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
            parity: vec![false; n],
        }
    }

    /// Root of `x` and the parity of `x` relative to it.
    pub fn find(&mut self, x: usize) -> (usize, bool) {
        let mut path = Vec::new();
        let mut r = x;
        while self.parent[r] != r {
            path.push(r);
            r = self.parent[r];
        }
        // walk back from the node nearest the root, accumulating parity
        let mut acc = false;
        for &node in path.iter().rev() {
            acc ^= self.parity[node];
            self.parity[node] = acc;
            self.parent[node] = r;
        }
        (r, if path.is_empty() { false } else { self.parity[x] })
    }

    pub fn root(&mut self, x: usize) -> usize {
        self.find(x).0
    }

    /// Join `a` and `b` so that their relative parity is `p`. Returns false
    /// if they were already joined with the opposite parity.
    pub fn union(&mut self, a: usize, b: usize, p: bool) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return pa ^ pb == p;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        self.parity[hi] = pa ^ pb ^ p;
        true
    }
}
