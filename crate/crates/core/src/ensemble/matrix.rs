use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::degree::DegreeDistribution;
use crate::error::{Error, Result};
use crate::rng::{substream, SimRng};

/// Sparse parity-check matrix stored as a bipartite edge list.
///
/// Edges are numbered in variable-major order; `edge_check[e]` is the check
/// of edge `e`, and `var_ptr[v]..var_ptr[v + 1]` are the edges of variable
/// `v`. The check side keeps a second index of edge ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    n: usize,
    m: usize,
    var_ptr: Vec<u32>,
    edge_check: Vec<u32>,
    edge_var: Vec<u32>,
    chk_ptr: Vec<u32>,
    chk_edges: Vec<u32>,
}

impl ParityCheckMatrix {
    /// Build from `(variable, check)` pairs.
    pub fn new(n: usize, m: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut sorted = edges.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidMatrix(format!(
                    "duplicate edge between variable {} and check {}",
                    w[0].0, w[0].1
                )));
            }
        }
        let mut var_deg = alloc::vec![0u32; n];
        let mut chk_deg = alloc::vec![0u32; m];
        for &(v, c) in &sorted {
            if v as usize >= n || c as usize >= m {
                return Err(Error::InvalidMatrix(format!("edge ({v}, {c}) outside {n} x {m}")));
            }
            var_deg[v as usize] += 1;
            chk_deg[c as usize] += 1;
        }
        if let Some(v) = var_deg.iter().position(|&d| d < 2) {
            return Err(Error::InvalidMatrix(format!("variable {v} has degree {}", var_deg[v])));
        }
        let var_ptr = prefix(&var_deg);
        let chk_ptr = prefix(&chk_deg);
        let edge_check: Vec<u32> = sorted.iter().map(|&(_, c)| c).collect();
        let edge_var: Vec<u32> = sorted.iter().map(|&(v, _)| v).collect();
        let mut fill: Vec<u32> = chk_ptr[..m].to_vec();
        let mut chk_edges = alloc::vec![0u32; sorted.len()];
        for (e, &c) in edge_check.iter().enumerate() {
            chk_edges[fill[c as usize] as usize] = e as u32;
            fill[c as usize] += 1;
        }
        Ok(Self {
            n,
            m,
            var_ptr,
            edge_check,
            edge_var,
            chk_ptr,
            chk_edges,
        })
    }

    /// Code length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of checks.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn num_edges(&self) -> usize {
        self.edge_check.len()
    }

    /// `1 - m/n`.
    pub fn rate(&self) -> f64 {
        1.0 - self.m as f64 / self.n as f64
    }

    /// Edge ids of variable `v` (a contiguous range).
    pub fn variable_edges(&self, v: usize) -> core::ops::Range<usize> {
        self.var_ptr[v] as usize..self.var_ptr[v + 1] as usize
    }

    pub fn variable_neighbors(&self, v: usize) -> &[u32] {
        &self.edge_check[self.variable_edges(v)]
    }

    /// Edge ids of check `c`.
    pub fn check_edges(&self, c: usize) -> &[u32] {
        &self.chk_edges[self.chk_ptr[c] as usize..self.chk_ptr[c + 1] as usize]
    }

    pub fn check_neighbors(&self, c: usize) -> impl Iterator<Item = u32> + '_ {
        self.check_edges(c).iter().map(|&e| self.edge_var[e as usize])
    }

    pub fn edge_variable(&self, e: usize) -> usize {
        self.edge_var[e] as usize
    }

    pub fn edge_check(&self, e: usize) -> usize {
        self.edge_check[e] as usize
    }

    /// All `(variable, check)` pairs in variable-major order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edge_var.iter().copied().zip(self.edge_check.iter().copied())
    }

    pub fn variable_degrees(&self) -> Vec<usize> {
        self.var_ptr.windows(2).map(|w| (w[1] - w[0]) as usize).collect()
    }

    pub fn check_degrees(&self) -> Vec<usize> {
        self.chk_ptr.windows(2).map(|w| (w[1] - w[0]) as usize).collect()
    }

    /// Number of unsatisfied checks for hard decisions `bits` (0/1).
    pub fn syndrome_weight(&self, bits: &[u8]) -> usize {
        (0..self.m)
            .filter(|&c| self.check_neighbors(c).fold(0u8, |acc, v| acc ^ bits[v as usize]) & 1 == 1)
            .count()
    }

    pub fn is_codeword(&self, bits: &[u8]) -> bool {
        bits.len() == self.n && self.syndrome_weight(bits) == 0
    }

    /// Number of length-4 cycles.
    pub fn four_cycles(&self) -> usize {
        let mut count = 0usize;
        for c in 0..self.m {
            // Count variable pairs shared between c and every later check.
            let mut shared: Vec<(u32, u32)> = Vec::new();
            for v in self.check_neighbors(c) {
                for &c2 in self.variable_neighbors(v as usize) {
                    if c2 as usize > c {
                        shared.push((c2, v));
                    }
                }
            }
            shared.sort_unstable();
            let mut i = 0;
            while i < shared.len() {
                let mut j = i;
                while j < shared.len() && shared[j].0 == shared[i].0 {
                    j += 1;
                }
                let k = j - i;
                count += k * (k - 1) / 2;
                i = j;
            }
        }
        count
    }
}

fn prefix(deg: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(deg.len() + 1);
    let mut acc = 0;
    out.push(0);
    for &d in deg {
        acc += d;
        out.push(acc);
    }
    out
}

/// Largest-remainder apportionment of `total` items over `fractions`.
pub fn apportion(fractions: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = fractions.iter().sum();
    let quotas: Vec<f64> = fractions.iter().map(|&f| f / sum * total as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|&q| q as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..fractions.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - counts[a] as f64;
        let rb = quotas[b] - counts[b] as f64;
        rb.partial_cmp(&ra)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

const SHUFFLE_RETRIES: usize = 20;

/// Working copy of the socket graph during construction.
struct Graph {
    edge_var: Vec<u32>,
    edge_chk: Vec<u32>,
    var_ptr: Vec<u32>,
    chk_adj: Vec<Vec<u32>>,
}

impl Graph {
    fn var_edges(&self, v: u32) -> core::ops::Range<usize> {
        self.var_ptr[v as usize] as usize..self.var_ptr[v as usize + 1] as usize
    }

    fn is_duplicate(&self, e: usize) -> bool {
        let v = self.edge_var[e];
        let c = self.edge_chk[e];
        self.var_edges(v).any(|f| f != e && self.edge_chk[f] == c)
    }

    fn check_has_var(&self, c: u32, w: u32) -> bool {
        self.chk_adj[c as usize].iter().any(|&f| self.edge_var[f as usize] == w)
    }

    fn cycles_through(&self, e: usize) -> usize {
        let v = self.edge_var[e];
        let c = self.edge_chk[e];
        let mut count = 0;
        for f in self.var_edges(v) {
            let c2 = self.edge_chk[f];
            if f == e || c2 == c {
                continue;
            }
            for &g in &self.chk_adj[c as usize] {
                let w = self.edge_var[g as usize];
                if w != v && self.check_has_var(c2, w) {
                    count += 1;
                }
            }
        }
        count
    }

    fn swap(&mut self, e: usize, f: usize) {
        let ce = self.edge_chk[e];
        let cf = self.edge_chk[f];
        for slot in self.chk_adj[ce as usize].iter_mut() {
            if *slot == e as u32 {
                *slot = f as u32;
                break;
            }
        }
        for slot in self.chk_adj[cf as usize].iter_mut() {
            if *slot == f as u32 {
                *slot = e as u32;
                break;
            }
        }
        self.edge_chk.swap(e, f);
    }

    /// Swap partners with distinct variables and checks.
    fn swappable(&self, e: usize, f: usize) -> bool {
        e != f && self.edge_var[e] != self.edge_var[f] && self.edge_chk[e] != self.edge_chk[f]
    }
}

/// Draw a parity-check matrix of length `n` from the ensemble `d`.
///
/// Node counts per degree use largest-remainder apportionment; sockets are
/// matched uniformly, duplicate edges are repaired by socket swaps, and a
/// post-pass removes length-4 cycles with at most `100 n` swap attempts.
pub fn sample_code(d: &DegreeDistribution, n: usize, seed: u64) -> Result<ParityCheckMatrix> {
    let node = d.to_node();
    let var_fracs: Vec<f64> = node.variable.iter().map(|&(_, f)| f).collect();
    let var_counts = apportion(&var_fracs, n);
    let mut var_degrees: Vec<u32> = Vec::with_capacity(n);
    for (&(deg, _), &cnt) in node.variable.iter().zip(&var_counts) {
        var_degrees.extend(core::iter::repeat_n(deg, cnt));
    }
    let num_edges: usize = var_degrees.iter().map(|&x| x as usize).sum();

    let m = libm::round(num_edges as f64 * d.rho_inverse_sum()) as usize;
    if m == 0 {
        return Err(Error::InfeasibleConstruction { retries: 0 });
    }
    let chk_fracs: Vec<f64> = node.check.iter().map(|&(_, f)| f).collect();
    let chk_counts = apportion(&chk_fracs, m);
    let mut chk_degrees: Vec<u32> = Vec::with_capacity(m);
    for (&(deg, _), &cnt) in node.check.iter().zip(&chk_counts) {
        chk_degrees.extend(core::iter::repeat_n(deg, cnt));
    }
    // Balance socket totals by nudging check degrees one at a time.
    let mut diff = num_edges as i64 - chk_degrees.iter().map(|&x| x as i64).sum::<i64>();
    let mut k = 0usize;
    let mut stuck = 0usize;
    while diff != 0 {
        let c = k % m;
        if diff > 0 {
            chk_degrees[c] += 1;
            diff -= 1;
            stuck = 0;
        } else if chk_degrees[c] > 2 {
            chk_degrees[c] -= 1;
            diff += 1;
            stuck = 0;
        } else {
            stuck += 1;
            if stuck > m {
                return Err(Error::InfeasibleConstruction { retries: 0 });
            }
        }
        k += 1;
    }
    if var_degrees.iter().any(|&dv| dv as usize > m) {
        return Err(Error::InfeasibleConstruction { retries: 0 });
    }

    let mut rng = substream(seed, &[0x05a3_c0de]);
    let var_ptr = prefix(&var_degrees);
    let edge_var: Vec<u32> = var_degrees
        .iter()
        .enumerate()
        .flat_map(|(v, &dv)| core::iter::repeat_n(v as u32, dv as usize))
        .collect();
    let base_sockets: Vec<u32> = chk_degrees
        .iter()
        .enumerate()
        .flat_map(|(c, &dc)| core::iter::repeat_n(c as u32, dc as usize))
        .collect();

    for _ in 0..SHUFFLE_RETRIES {
        let mut sockets = base_sockets.clone();
        sockets.shuffle(&mut rng);
        let mut chk_adj: Vec<Vec<u32>> = chk_degrees.iter().map(|&dc| Vec::with_capacity(dc as usize)).collect();
        for (e, &c) in sockets.iter().enumerate() {
            chk_adj[c as usize].push(e as u32);
        }
        let mut g = Graph {
            edge_var: edge_var.clone(),
            edge_chk: sockets,
            var_ptr: var_ptr.clone(),
            chk_adj,
        };
        if !repair_duplicates(&mut g, &mut rng, 100 * n) {
            continue;
        }
        remove_four_cycles(&mut g, &mut rng, 100 * n);
        let edges: Vec<(u32, u32)> = g.edge_var.iter().copied().zip(g.edge_chk.iter().copied()).collect();
        return ParityCheckMatrix::new(n, m, &edges);
    }
    Err(Error::InfeasibleConstruction {
        retries: SHUFFLE_RETRIES,
    })
}

fn repair_duplicates(g: &mut Graph, rng: &mut SimRng, budget: usize) -> bool {
    let total = g.edge_chk.len();
    let mut attempts = 0;
    loop {
        let bad: Vec<usize> = (0..total).filter(|&e| g.is_duplicate(e)).collect();
        if bad.is_empty() {
            return true;
        }
        for e in bad {
            while g.is_duplicate(e) {
                if attempts >= budget {
                    return false;
                }
                attempts += 1;
                let f = rng.random_range(0..total);
                if !g.swappable(e, f) {
                    continue;
                }
                g.swap(e, f);
                if g.is_duplicate(e) || g.is_duplicate(f) {
                    g.swap(e, f);
                }
            }
        }
    }
}

fn remove_four_cycles(g: &mut Graph, rng: &mut SimRng, budget: usize) {
    let total = g.edge_chk.len();
    let mut attempts = 0;
    loop {
        let mut improved = false;
        for e in 0..total {
            let mut tries = 0;
            while tries < 32 && g.cycles_through(e) > 0 {
                if attempts >= budget {
                    return;
                }
                attempts += 1;
                tries += 1;
                let f = rng.random_range(0..total);
                if !g.swappable(e, f) {
                    continue;
                }
                let before = g.cycles_through(e) + g.cycles_through(f);
                g.swap(e, f);
                let after = g.cycles_through(e) + g.cycles_through(f);
                if g.is_duplicate(e) || g.is_duplicate(f) || after >= before {
                    g.swap(e, f);
                } else {
                    improved = true;
                }
            }
        }
        if !improved {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::degree::OPTIMIZER_DEGREES;

    #[test]
    fn apportion_largest_remainder() {
        assert_eq!(apportion(&[0.6, 0.4], 10), alloc::vec![6, 4]);
        assert_eq!(apportion(&[1.0, 1.0, 1.0], 10), alloc::vec![4, 3, 3]);
        let c = apportion(&[0.333, 0.333, 0.334], 7);
        assert_eq!(c.iter().sum::<usize>(), 7);
    }

    #[test]
    fn regular_three_six_code() {
        let d = DegreeDistribution::regular(3, 6).unwrap();
        let h = sample_code(&d, 1000, 7).unwrap();
        assert_eq!(h.m(), 500);
        assert!(h.variable_degrees().iter().all(|&x| x == 3));
        assert!(h.check_degrees().iter().all(|&x| x == 6));
        assert_eq!(h.four_cycles(), 0);
    }

    #[test]
    fn sampling_is_deterministic() {
        let d = DegreeDistribution::with_check_degree(
            OPTIMIZER_DEGREES
                .iter()
                .copied()
                .zip([0.3106, 0.1901, 0.1065, 0.1691, 0.0809, 0.0337, 0.0297, 0.0033, 0.0761])
                .collect(),
            5,
        )
        .unwrap();
        let a = sample_code(&d, 3000, 11).unwrap();
        let b = sample_code(&d, 3000, 11).unwrap();
        assert_eq!(a, b);
        let c = sample_code(&d, 3000, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn matrix_validation() {
        assert!(ParityCheckMatrix::new(2, 1, &[(0, 0), (1, 0)]).is_err());
        assert!(ParityCheckMatrix::new(2, 2, &[(0, 0), (0, 0), (1, 0), (1, 1)]).is_err());
        let h = ParityCheckMatrix::new(3, 2, &[(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1)]).unwrap();
        assert_eq!(h.syndrome_weight(&[1, 0, 0]), 2);
        assert!(h.is_codeword(&[1, 1, 0]));
        assert_eq!(h.four_cycles(), 3);
    }

    #[test]
    fn too_short_for_max_degree_is_rejected() {
        let d = DegreeDistribution::regular(50, 60).unwrap();
        let err = sample_code(&d, 40, 1).unwrap_err();
        assert!(matches!(err, Error::InfeasibleConstruction { .. }));
    }
}
