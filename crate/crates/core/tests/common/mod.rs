#![allow(dead_code)]

use tenfac::table::survey_fixed_colors;
use tenfac::{enumerate_matchings, ColoredGraph, Matching};

pub fn survey_graph(n: usize, e3: &Matching) -> ColoredGraph {
    let (e1, e2) = survey_fixed_colors(n);
    ColoredGraph::from_partners([e1, e2, e3.partners().to_vec()]).unwrap()
}

/// Every graph on `2n` labeled vertices: `((2n-1)!!)^3` of them.
pub fn all_graphs(n: usize) -> Vec<ColoredGraph> {
    let ms: Vec<Matching> = enumerate_matchings(n).collect();
    let mut out = Vec::new();
    for a in &ms {
        for b in &ms {
            for c in &ms {
                out.push(
                    ColoredGraph::from_partners([a.partners().to_vec(), b.partners().to_vec(), c.partners().to_vec()])
                        .unwrap(),
                );
            }
        }
    }
    out
}

/// Colors 1 fixed to `{0,1},{2,3},...`; colors 2 and 3 free.
pub fn graphs_with_fixed_e1(n: usize) -> Vec<ColoredGraph> {
    let ms: Vec<Matching> = enumerate_matchings(n).collect();
    let e1: Vec<u8> = (0..2 * n).map(|v| (v ^ 1) as u8).collect();
    let mut out = Vec::new();
    for b in &ms {
        for c in &ms {
            out.push(ColoredGraph::from_partners([e1.clone(), b.partners().to_vec(), c.partners().to_vec()]).unwrap());
        }
    }
    out
}

/// Cycles of the union of two involutions, by walking.
pub fn cycles(a: &[u8], b: &[u8]) -> usize {
    let mut seen = vec![false; a.len()];
    let mut count = 0;
    for s in 0..a.len() {
        if seen[s] {
            continue;
        }
        count += 1;
        let mut v = s;
        loop {
            seen[v] = true;
            let w = a[v] as usize;
            seen[w] = true;
            v = b[w] as usize;
            if v == s {
                break;
            }
        }
    }
    count
}

/// `F(M, G)` straight from the definition.
pub fn faces_by_definition(g: &ColoredGraph, m: &[u8]) -> usize {
    tenfac::Color::ALL.iter().map(|&c| cycles(m, g.partners(c))).sum()
}

/// Max over the explicit list of matchings.
pub fn brute_max(g: &ColoredGraph) -> (usize, u64) {
    let mut best = 0;
    let mut count = 0;
    for m in enumerate_matchings(g.n()) {
        let f = faces_by_definition(g, m.partners());
        if f > best {
            best = f;
            count = 1;
        } else if f == best {
            count += 1;
        }
    }
    (best, count)
}

/// `sum_M N^F(M,G)` by counting edge index assignments that agree across
/// every color-0 pair: the Wick contraction done literally.
pub fn wick_sum_by_contraction(g: &ColoredGraph, size: u64) -> u128 {
    let n = g.n();
    let mut slot = vec![[0usize; 3]; 2 * n];
    for c in tenfac::Color::ALL {
        for (e, (u, v)) in g.edges(c).into_iter().enumerate() {
            slot[u][c.index()] = c.index() * n + e;
            slot[v][c.index()] = c.index() * n + e;
        }
    }
    let total = size.pow(3 * n as u32);
    let mut sum = 0u128;
    for m in enumerate_matchings(n) {
        let pairs = m.edges();
        let mut idx = vec![0u64; 3 * n];
        for mut code in 0..total {
            for x in idx.iter_mut() {
                *x = code % size;
                code /= size;
            }
            if pairs.iter().all(|&(u, v)| (0..3).all(|c| idx[slot[u][c]] == idx[slot[v][c]])) {
                sum += 1;
            }
        }
    }
    sum
}
