//! Max-flow (Dinic) and min-cost flow (successive shortest paths with
//! potentials) on small dense networks with real capacities.

use std::collections::VecDeque;

/// Residual capacities below this are treated as zero.
const CAP_EPS: f64 = 1e-15;

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: f64,
    cost: f64,
}

#[derive(Debug, Clone)]
pub struct Network {
    adj: Vec<Vec<usize>>,
    edges: Vec<Edge>,
}

impl Network {
    pub fn new(n: usize) -> Self {
        Network { adj: vec![Vec::new(); n], edges: Vec::new() }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: f64, cost: f64) {
        self.adj[from].push(self.edges.len());
        self.edges.push(Edge { to, cap, cost });
        self.adj[to].push(self.edges.len());
        self.edges.push(Edge { to: from, cap: 0.0, cost: -cost });
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let n = self.adj.len();
        let mut total = 0.0;
        loop {
            let mut level = vec![usize::MAX; n];
            level[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &e in &self.adj[u] {
                    let Edge { to, cap, .. } = self.edges[e];
                    if cap > CAP_EPS && level[to] == usize::MAX {
                        level[to] = level[u] + 1;
                        queue.push_back(to);
                    }
                }
            }
            if level[t] == usize::MAX {
                return total;
            }
            let mut next = vec![0usize; n];
            loop {
                let pushed = self.blocking_dfs(s, t, f64::INFINITY, &level, &mut next);
                if pushed <= CAP_EPS {
                    break;
                }
                total += pushed;
            }
        }
    }

    fn blocking_dfs(&mut self, u: usize, t: usize, limit: f64, level: &[usize], next: &mut [usize]) -> f64 {
        if u == t {
            return limit;
        }
        while next[u] < self.adj[u].len() {
            let e = self.adj[u][next[u]];
            let Edge { to, cap, .. } = self.edges[e];
            if cap > CAP_EPS && level[to] == level[u] + 1 {
                let got = self.blocking_dfs(to, t, limit.min(cap), level, next);
                if got > CAP_EPS {
                    self.edges[e].cap -= got;
                    self.edges[e ^ 1].cap += got;
                    return got;
                }
            }
            next[u] += 1;
        }
        0.0
    }

    /// Sends as much flow as possible from `s` to `t` at minimum cost, assuming
    /// all forward costs are nonnegative. Returns `(flow, cost)`.
    pub fn min_cost_max_flow(&mut self, s: usize, t: usize) -> (f64, f64) {
        let n = self.adj.len();
        let mut potential = vec![0.0f64; n];
        let (mut flow, mut cost) = (0.0, 0.0);
        loop {
            // Dense Dijkstra on reduced costs.
            let mut dist = vec![f64::INFINITY; n];
            let mut prev_edge = vec![usize::MAX; n];
            let mut done = vec![false; n];
            dist[s] = 0.0;
            loop {
                let mut u = usize::MAX;
                for v in 0..n {
                    if !done[v] && dist[v].is_finite() && (u == usize::MAX || dist[v] < dist[u]) {
                        u = v;
                    }
                }
                if u == usize::MAX {
                    break;
                }
                done[u] = true;
                for &e in &self.adj[u] {
                    let Edge { to, cap, cost: c } = self.edges[e];
                    if cap > CAP_EPS && !done[to] {
                        let reduced = (c + potential[u] - potential[to]).max(0.0);
                        if dist[u] + reduced < dist[to] {
                            dist[to] = dist[u] + reduced;
                            prev_edge[to] = e;
                        }
                    }
                }
            }
            if !dist[t].is_finite() {
                return (flow, cost);
            }
            for v in 0..n {
                if dist[v].is_finite() {
                    potential[v] += dist[v];
                }
            }
            let mut push = f64::INFINITY;
            let mut v = t;
            while v != s {
                let e = prev_edge[v];
                push = push.min(self.edges[e].cap);
                v = self.edges[e ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let e = prev_edge[v];
                self.edges[e].cap -= push;
                self.edges[e ^ 1].cap += push;
                cost += push * self.edges[e].cost;
                v = self.edges[e ^ 1].to;
            }
            flow += push;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_flow_diamond() {
        let mut g = Network::new(4);
        g.add_edge(0, 1, 3.0, 0.0);
        g.add_edge(0, 2, 2.0, 0.0);
        g.add_edge(1, 2, 1.0, 0.0);
        g.add_edge(1, 3, 2.0, 0.0);
        g.add_edge(2, 3, 3.0, 0.0);
        assert!((g.max_flow(0, 3) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn min_cost_prefers_cheap_path() {
        let mut g = Network::new(4);
        g.add_edge(0, 1, 1.0, 1.0);
        g.add_edge(0, 2, 1.0, 5.0);
        g.add_edge(1, 3, 1.0, 1.0);
        g.add_edge(2, 3, 1.0, 1.0);
        g.add_edge(1, 2, 1.0, 0.0);
        let (f, c) = g.min_cost_max_flow(0, 3);
        assert!((f - 2.0).abs() < 1e-12);
        assert!((c - 8.0).abs() < 1e-12);
    }
}
