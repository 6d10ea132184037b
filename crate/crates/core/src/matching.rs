//! Perfect matchings in small bipartite multigraphs.
//!
//! Vertices on both sides are `0..n`; `edges[e] = (left, right)`. A matching
//! is reported as the edge chosen for each left vertex.

/// Every perfect matching, sorted lexicographically by the chosen edge indices.
pub fn enumerate_perfect_matchings(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut search = Search::new(n, edges, None);
    search.run(0, &mut |m| {
        out.push(m.to_vec());
        true
    });
    out.sort();
    out
}

/// A perfect matching using edge `forced`, if one exists. The result is the
/// lexicographically smallest such matching.
pub fn matching_through(n: usize, edges: &[(usize, usize)], forced: usize) -> Option<Vec<usize>> {
    let mut best: Option<Vec<usize>> = None;
    let mut search = Search::new(n, edges, Some(forced));
    search.run(0, &mut |m| {
        if best.as_deref().is_none_or(|b| m < b) {
            best = Some(m.to_vec());
        }
        true
    });
    best
}

pub fn count_perfect_matchings(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut count = 0;
    Search::new(n, edges, None).run(0, &mut |_| {
        count += 1;
        true
    });
    count
}

struct Search {
    /// Left vertices, fewest candidate edges first.
    order: Vec<usize>,
    candidates: Vec<Vec<(usize, usize)>>,
    right_used: Vec<bool>,
    chosen: Vec<usize>,
}

impl Search {
    fn new(n: usize, edges: &[(usize, usize)], forced: Option<usize>) -> Self {
        let mut candidates = vec![Vec::new(); n];
        for (e, &(l, r)) in edges.iter().enumerate() {
            candidates[l].push((e, r));
        }
        if let Some(f) = forced {
            let (l, _) = edges[f];
            candidates[l].retain(|&(e, _)| e == f);
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&l| (candidates[l].len(), l));
        Self {
            order,
            candidates,
            right_used: vec![false; n],
            chosen: vec![usize::MAX; n],
        }
    }

    fn run(&mut self, depth: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if depth == self.order.len() {
            return visit(&self.chosen);
        }
        let l = self.order[depth];
        for k in 0..self.candidates[l].len() {
            let (e, r) = self.candidates[l][k];
            if self.right_used[r] {
                continue;
            }
            self.right_used[r] = true;
            self.chosen[l] = e;
            let go_on = self.run(depth + 1, visit);
            self.right_used[r] = false;
            if !go_on {
                return false;
            }
        }
        self.chosen[l] = usize::MAX;
        true
    }
}
