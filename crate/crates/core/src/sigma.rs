//! The nonincreasing rearrangement `sigma_n` of `{1 / omega(k) : k in Z^d}`.
//!
//! Lattice points are grouped into orbits under sign flips and coordinate
//! permutations. Orbits are visited best-first through a spanning tree on the
//! nonincreasing representatives in which every node has exactly one parent,
//! so the frontier never needs a visited set. Coordinatewise monotonicity of the
//! weight makes every child at least as heavy as its parent, hence the heap
//! pops orbits in nondecreasing weight order.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::summation::CompensatedSum;
use crate::weights::{Rep, WeightSpec, TIE_TOL};

/// Longest prefix we are willing to materialize (two `f64` arrays each).
pub const MAX_PREFIX: usize = 200_000_000;

/// Largest box `(2R+1)^d` the brute-force oracle will scan.
pub const MAX_BOX_POINTS: u128 = 4_000_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitEntry {
    pub rep: Rep,
    pub weight: f64,
    pub multiplicity: u128,
}

impl OrbitEntry {
    /// All lattice points of the orbit, in a fixed order: distinct
    /// permutations of the absolute values in lexicographic order, and for
    /// each one the sign patterns in binary counting order.
    pub fn members(&self) -> Vec<Vec<i64>> {
        let mut perm: Vec<u32> = self.rep.iter().rev().copied().collect();
        let mut out = Vec::with_capacity(self.multiplicity.min(1 << 20) as usize);
        loop {
            let nz: Vec<usize> = (0..perm.len()).filter(|&i| perm[i] != 0).collect();
            for mask in 0u64..(1u64 << nz.len()) {
                let mut k: Vec<i64> = perm.iter().map(|&x| x as i64).collect();
                for (bit, &i) in nz.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        k[i] = -k[i];
                    }
                }
                out.push(k);
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        out
    }
}

/// Number of `k in Z^d` whose sorted absolute values equal `rep`:
/// `2^{nnz} * d! / prod (value counts)!`.
pub fn orbit_size(rep: &[u32]) -> u128 {
    let mut size: u128 = 1;
    let mut run = 0u128;
    for (i, &v) in rep.iter().enumerate() {
        run = if i > 0 && rep[i - 1] == v { run + 1 } else { 1 };
        // multinomial built incrementally: multiply by (i+1)/run, always exact
        size = size * (i as u128 + 1) / run;
    }
    size << rep.iter().filter(|&&v| v != 0).count()
}

fn next_permutation(a: &mut [u32]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let Some(i) = (0..a.len() - 1).rev().find(|&i| a[i] < a[i + 1]) else {
        return false;
    };
    let j = (i + 1..a.len()).rev().find(|&j| a[j] > a[i]).unwrap();
    a.swap(i, j);
    a[i + 1..].reverse();
    true
}

#[derive(Debug, Clone, PartialEq)]
struct Node {
    weight: f64,
    rep: Rep,
}

impl Eq for Node {}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight.total_cmp(&other.weight).then_with(|| self.rep.cmp(&other.rep))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orbits in nondecreasing weight order; equal weights come out in
/// lexicographic order of their representatives.
pub struct OrbitStream {
    spec: WeightSpec,
    heap: BinaryHeap<Reverse<Node>>,
    ready: std::vec::IntoIter<Node>,
}

impl OrbitStream {
    pub fn new(spec: &WeightSpec) -> Self {
        let root = Rep::from_elem(0, spec.d());
        let mut heap = BinaryHeap::new();
        heap.push(Reverse(Node { weight: spec.weight_of(&root), rep: root }));
        Self { spec: *spec, heap, ready: Vec::new().into_iter() }
    }

    fn push_children(&mut self, rep: &Rep) {
        let d = rep.len();
        let t = rep.iter().rposition(|&v| v != 0);
        let mut push = |i: usize| {
            let mut child = rep.clone();
            child[i] += 1;
            let weight = self.spec.weight_of(&child);
            self.heap.push(Reverse(Node { weight, rep: child }));
        };
        match t {
            None => push(0),
            Some(t) => {
                if t == 0 || rep[t - 1] > rep[t] {
                    push(t);
                }
                if t + 1 < d {
                    push(t + 1);
                }
            }
        }
    }

    fn refill(&mut self) -> bool {
        let Some(Reverse(first)) = self.heap.pop() else {
            return false;
        };
        let w = first.weight;
        self.push_children(&first.rep);
        let mut group = vec![first];
        while self.heap.peek().is_some_and(|Reverse(n)| n.weight == w) {
            let Reverse(node) = self.heap.pop().unwrap();
            self.push_children(&node.rep);
            group.push(node);
        }
        group.sort_unstable_by(|a, b| a.rep.cmp(&b.rep));
        self.ready = group.into_iter();
        true
    }
}

impl Iterator for OrbitStream {
    type Item = OrbitEntry;

    fn next(&mut self) -> Option<OrbitEntry> {
        loop {
            if let Some(node) = self.ready.next() {
                let multiplicity = orbit_size(&node.rep);
                return Some(OrbitEntry { rep: node.rep, weight: node.weight, multiplicity });
            }
            if !self.refill() {
                return None;
            }
        }
    }
}

/// The first `n_max` terms of the rearrangement together with the running
/// sums `sum_{k<=n} sigma_k^{-2}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaPrefix {
    pub spec: WeightSpec,
    pub values: Vec<f64>,
    pub cum_inv_sq: Vec<f64>,
    pub n_max: usize,
}

impl SigmaPrefix {
    /// Builds a prefix from weights `omega` listed in nondecreasing order.
    pub fn from_weights(spec: WeightSpec, weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter("prefix must be nonempty".into()));
        }
        if weights.windows(2).any(|w| !(w[0] <= w[1])) || !(weights[0] > 0.0) {
            return Err(Error::InvalidParameter("weights must be positive and nondecreasing".into()));
        }
        let mut acc = CompensatedSum::new();
        let mut cum = Vec::with_capacity(weights.len());
        for &w in weights {
            acc.add(w * w);
            let total = acc.total();
            if !total.is_finite() {
                return Err(Error::CumsumOverflow);
            }
            cum.push(total);
        }
        Ok(Self { spec, values: weights.iter().map(|w| 1.0 / w).collect(), cum_inv_sq: cum, n_max: weights.len() })
    }

    /// `sigma_n`, 1-based.
    pub fn sigma(&self, n: usize) -> Result<f64> {
        self.check(n)?;
        Ok(self.values[n - 1])
    }

    /// `sum_{k<=n} sigma_k^{-2}`, 1-based.
    pub fn cum(&self, n: usize) -> Result<f64> {
        self.check(n)?;
        Ok(self.cum_inv_sq[n - 1])
    }

    fn check(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidParameter("width index n starts at 1".into()));
        }
        if n > self.n_max {
            return Err(Error::PrefixTooShort { needed: n, have: self.n_max });
        }
        Ok(())
    }
}

/// The first `n` terms of the nonincreasing rearrangement of `1/omega`.
pub fn sigma_prefix(spec: &WeightSpec, n: usize) -> Result<SigmaPrefix> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    if n > MAX_PREFIX {
        return Err(Error::ResourceCap(format!("N = {n} exceeds the prefix cap {MAX_PREFIX}")));
    }
    let mut weights = Vec::with_capacity(n);
    for orbit in OrbitStream::new(spec) {
        let take = orbit.multiplicity.min((n - weights.len()) as u128) as usize;
        weights.extend(std::iter::repeat_n(orbit.weight, take));
        if weights.len() == n {
            break;
        }
    }
    log::debug!("sigma_prefix: {spec}, N = {n}, last weight {}", weights[n - 1]);
    SigmaPrefix::from_weights(*spec, &weights)
}

/// Number of lattice points with `omega(k) <= t`, up to a relative slack of
/// `TIE_TOL` on `t` so that `count_leq(1/sigma_n) >= n` survives the
/// round trip through `1/omega`.
pub fn count_leq(spec: &WeightSpec, t: f64) -> u128 {
    if !(t >= 1.0 - TIE_TOL) {
        return 0;
    }
    let bound = t * (1.0 + TIE_TOL);
    let mut rep = Rep::from_elem(0, spec.d());
    count_dfs(spec, bound, &mut rep, 0)
}

fn count_dfs(spec: &WeightSpec, bound: f64, rep: &mut Rep, i: usize) -> u128 {
    if i == rep.len() {
        return orbit_size(rep);
    }
    let cap = if i == 0 { u32::MAX } else { rep[i - 1] };
    let mut total = 0;
    let mut v = 0u32;
    loop {
        rep[i] = v;
        if spec.weight_of(rep) > bound {
            break;
        }
        total += if v == 0 {
            // trailing zeros complete the representative
            orbit_size(rep)
        } else {
            count_dfs(spec, bound, rep, i + 1)
        };
        if v == cap {
            break;
        }
        v += 1;
    }
    rep[i] = 0;
    total
}

/// An optimal index set: `n - 1` lattice points, each at most as heavy as any
/// point left out. Ties are resolved in the same order as [`sigma_prefix`].
pub fn best_index_set(spec: &WeightSpec, n: usize) -> Vec<Vec<i64>> {
    let want = n.saturating_sub(1);
    let mut out = Vec::with_capacity(want);
    if want == 0 {
        return out;
    }
    for orbit in OrbitStream::new(spec) {
        for k in orbit.members() {
            out.push(k);
            if out.len() == want {
                return out;
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct MaxW(f64);

impl Eq for MaxW {}

impl Ord for MaxW {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl PartialOrd for MaxW {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Reference implementation: scans the whole box `|k|_inf <= box_radius`,
/// keeps the `n` lightest points, and checks that nothing outside the box
/// could be lighter.
pub fn sigma_bruteforce(spec: &WeightSpec, n: usize, box_radius: u32) -> Result<SigmaPrefix> {
    let d = spec.d();
    let side = 2 * box_radius as u128 + 1;
    let points = side.checked_pow(d as u32).unwrap_or(u128::MAX);
    if points > MAX_BOX_POINTS {
        return Err(Error::ResourceCap(format!("box of {points} points exceeds {MAX_BOX_POINTS}")));
    }
    if (n as u128) > points {
        return Err(Error::BoxTooSmall { radius: box_radius as u64, n });
    }
    let r = box_radius as i64;
    let mut k = vec![-r; d];
    let mut heap: BinaryHeap<MaxW> = BinaryHeap::with_capacity(n + 1);
    loop {
        let w = spec.evaluate(&k)?;
        if heap.len() < n {
            heap.push(MaxW(w));
        } else if w < heap.peek().unwrap().0 {
            heap.pop();
            heap.push(MaxW(w));
        }
        // odometer
        let mut i = 0;
        while i < d && k[i] == r {
            k[i] = -r;
            i += 1;
        }
        if i == d {
            break;
        }
        k[i] += 1;
    }
    let weights: Vec<f64> = heap.into_sorted_vec().into_iter().map(|m| m.0).collect();
    // Outside the box some |k_i| >= R+1, so by monotonicity omega(k) >= omega(R+1, 0, ..., 0).
    let outside = spec.axis_weight(box_radius + 1);
    if weights[n - 1] > outside {
        return Err(Error::BoxTooSmall { radius: box_radius as u64, n });
    }
    SigmaPrefix::from_weights(*spec, &weights)
}
