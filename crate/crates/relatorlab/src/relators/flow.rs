//! Maximum flow for the subset condition `μ(U) ≤ ν(R(U))`.
//!
//! Weights are rescaled by the least common multiple of their denominators,
//! so the flow runs on integers and stays exact. `i128` is used whenever the
//! scaled total fits, `BigInt` otherwise.

use std::collections::VecDeque;
use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::rational::Q;

/// Decides `∀U ⊆ supp μ. μ(U) ≤ ν(R(U))` for weights `mu` and `nu`, where
/// `related(i, j)` says whether the `i`-th entry of `mu` is related to the
/// `j`-th entry of `nu`.
pub fn flow_check(mu: &[Q], nu: &[Q], related: impl Fn(usize, usize) -> bool) -> bool {
    let total: Q = mu.iter().fold(Q::zero(), |a, w| a + w);
    if total.is_zero() {
        return true;
    }
    let right_total: Q = nu.iter().fold(Q::zero(), |a, w| a + w);
    if total > right_total {
        return false;
    }
    let mut lcm = BigInt::one();
    for w in mu.iter().chain(nu) {
        lcm = lcm.lcm(w.denom());
    }
    let scale = |w: &Q| -> BigInt { (w * Q::from_integer(lcm.clone())).to_integer() };
    let mu_s: Vec<BigInt> = mu.iter().map(scale).collect();
    let nu_s: Vec<BigInt> = nu.iter().map(scale).collect();
    let total_s: BigInt = mu_s.iter().sum();
    let adj: Vec<Vec<usize>> = (0..mu.len())
        .map(|i| (0..nu.len()).filter(|&j| related(i, j)).collect())
        .collect();
    let fits = total_s.bits() < 120 && nu_s.iter().all(|w| w.bits() < 120);
    if fits {
        let small = |v: &[BigInt]| -> Vec<i128> {
            v.iter().map(|w| w.to_i128().expect("bounded")).collect()
        };
        let t = total_s.to_i128().expect("bounded");
        max_flow(&small(&mu_s), &small(&nu_s), &adj, t) == t
    } else {
        max_flow(&mu_s, &nu_s, &adj, total_s.clone()) == total_s
    }
}

/// Edmonds-Karp on the bipartite network source → left → right → sink.
/// Middle edges get capacity `inf`, which must bound every cut.
fn max_flow<T>(left: &[T], right: &[T], adj: &[Vec<usize>], inf: T) -> T
where
    T: Clone + Ord + Zero + Add<Output = T> + Sub<Output = T>,
{
    let n = left.len() + right.len() + 2;
    let (src, sink) = (0, n - 1);
    let lnode = |i: usize| 1 + i;
    let rnode = |j: usize| 1 + left.len() + j;
    let mut cap = vec![vec![T::zero(); n]; n];
    for (i, w) in left.iter().enumerate() {
        cap[src][lnode(i)] = w.clone();
        for &j in &adj[i] {
            cap[lnode(i)][rnode(j)] = inf.clone();
        }
    }
    for (j, w) in right.iter().enumerate() {
        cap[rnode(j)][sink] = w.clone();
    }
    let mut flow = T::zero();
    loop {
        let mut prev = vec![usize::MAX; n];
        prev[src] = src;
        let mut queue = VecDeque::from([src]);
        while let Some(a) = queue.pop_front() {
            if a == sink {
                break;
            }
            for b in 0..n {
                if prev[b] == usize::MAX && cap[a][b] > T::zero() {
                    prev[b] = a;
                    queue.push_back(b);
                }
            }
        }
        if prev[sink] == usize::MAX {
            return flow;
        }
        let mut bottleneck = inf.clone();
        let mut b = sink;
        while b != src {
            let a = prev[b];
            if cap[a][b] < bottleneck {
                bottleneck = cap[a][b].clone();
            }
            b = a;
        }
        let mut b = sink;
        while b != src {
            let a = prev[b];
            cap[a][b] = cap[a][b].clone() - bottleneck.clone();
            cap[b][a] = cap[b][a].clone() + bottleneck.clone();
            b = a;
        }
        flow = flow + bottleneck;
    }
}
