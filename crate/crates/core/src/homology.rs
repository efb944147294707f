//! Invariants of the independence complex: stable-set parity counts, face
//! counts, Euler characteristics, rational Betti numbers and
//! k-balancedness.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::budget::{Budget, Exhausted};
use crate::graph::{Graph, VertexSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("search budget of {limit} nodes exhausted")]
    Budget { limit: u64 },
}

impl From<Exhausted> for HomologyError {
    fn from(e: Exhausted) -> Self {
        HomologyError::Budget { limit: e.limit }
    }
}

/// Numbers of stable sets of even and odd cardinality; the empty set is
/// even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Parity {
    pub even: u128,
    pub odd: u128,
}

impl Parity {
    /// `S_even − S_odd`.
    pub fn alternating(&self) -> i128 {
        self.even as i128 - self.odd as i128
    }
}

/// Parity counts via `I(G) = I(G − v) + x·I(G − N[v])`, tracking the total
/// count and the value at `x = −1`, memoised on the remaining vertex set.
pub fn independence_parity(g: &Graph, budget: &mut Budget) -> Result<Parity, HomologyError> {
    let mut memo = HashMap::new();
    let (tot, alt) = parity_rec(g, g.vertices(), &mut memo, budget)?;
    let even = (tot as i128 + alt) / 2;
    Ok(Parity {
        even: even as u128,
        odd: tot - even as u128,
    })
}

fn parity_rec(
    g: &Graph,
    s: VertexSet,
    memo: &mut HashMap<VertexSet, (u128, i128)>,
    budget: &mut Budget,
) -> Result<(u128, i128), Exhausted> {
    let Some(v) = s.iter().max_by_key(|&v| (g.neighbors(v).intersection_len(&s), std::cmp::Reverse(v))) else {
        return Ok((1, 1));
    };
    if g.neighbors(v).is_disjoint(&s) {
        // s is stable: 2^|s| sets, alternating sum 0 unless empty
        return Ok((1u128 << s.len(), 0));
    }
    if let Some(&hit) = memo.get(&s) {
        return Ok(hit);
    }
    budget.tick()?;
    let mut without = s.clone();
    without.remove(v);
    let closed = s.difference(g.neighbors(v));
    let mut rest = closed;
    rest.remove(v);
    let (t1, a1) = parity_rec(g, without, memo, budget)?;
    let (t2, a2) = parity_rec(g, rest, memo, budget)?;
    let out = (t1 + t2, a1 - a2);
    memo.insert(s, out);
    Ok(out)
}

/// Coefficients of the independence polynomial: entry `i` is the number of
/// stable sets with `i` vertices.
pub fn independence_polynomial(g: &Graph, budget: &mut Budget) -> Result<Vec<u128>, HomologyError> {
    let mut memo = HashMap::new();
    Ok(poly_rec(g, g.vertices(), &mut memo, budget)?)
}

fn poly_rec(
    g: &Graph,
    s: VertexSet,
    memo: &mut HashMap<VertexSet, Vec<u128>>,
    budget: &mut Budget,
) -> Result<Vec<u128>, Exhausted> {
    let Some(v) = s.iter().max_by_key(|&v| (g.neighbors(v).intersection_len(&s), std::cmp::Reverse(v))) else {
        return Ok(vec![1]);
    };
    if g.neighbors(v).is_disjoint(&s) {
        return Ok(binomial_row(s.len()));
    }
    if let Some(hit) = memo.get(&s) {
        return Ok(hit.clone());
    }
    budget.tick()?;
    let mut without = s.clone();
    without.remove(v);
    let mut rest = s.difference(g.neighbors(v));
    rest.remove(v);
    let mut p = poly_rec(g, without, memo, budget)?;
    let q = poly_rec(g, rest, memo, budget)?;
    if p.len() < q.len() + 1 {
        p.resize(q.len() + 1, 0);
    }
    for (i, c) in q.into_iter().enumerate() {
        p[i + 1] += c;
    }
    memo.insert(s, p.clone());
    Ok(p)
}

fn binomial_row(n: usize) -> Vec<u128> {
    let mut row = vec![1u128];
    for k in 0..n {
        let next = row[k] * (n - k) as u128 / (k + 1) as u128;
        row.push(next);
    }
    row
}

/// Face counts and both Euler characteristics of the independence complex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EulerReport {
    /// `face_counts[n]` counts `n`-faces, i.e. stable sets of size `n + 1`.
    pub face_counts: Vec<u128>,
    pub euler_unreduced: i128,
    /// `euler_unreduced − 1`, which equals `S_odd − S_even`.
    pub euler_reduced: i128,
    pub parity: Parity,
}

pub fn euler_characteristic(g: &Graph, budget: &mut Budget) -> Result<EulerReport, HomologyError> {
    let poly = independence_polynomial(g, budget)?;
    let face_counts: Vec<u128> = poly[1..].to_vec();
    let euler_unreduced: i128 = face_counts
        .iter()
        .enumerate()
        .map(|(n, &c)| if n % 2 == 0 { c as i128 } else { -(c as i128) })
        .sum();
    let even: u128 = poly.iter().step_by(2).sum();
    let odd: u128 = poly.iter().skip(1).step_by(2).sum();
    Ok(EulerReport {
        face_counts,
        euler_unreduced,
        euler_reduced: euler_unreduced - 1,
        parity: Parity { even, odd },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BettiReport {
    #[serde(flatten)]
    pub euler: EulerReport,
    /// Unreduced rational Betti numbers `b_0, b_1, …`.
    pub betti: Vec<u64>,
    pub total_betti: u64,
}

/// Stable sets grouped by cardinality, lexicographic within each size.
/// `faces[n]` holds the `n`-faces.
pub fn faces(g: &Graph, budget: &mut Budget) -> Result<Vec<Vec<Vec<usize>>>, HomologyError> {
    let mut out: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut cur = Vec::new();
    face_rec(g, 0, &g.vertices(), &mut cur, &mut out, budget)?;
    Ok(out)
}

fn face_rec(
    g: &Graph,
    from: usize,
    allowed: &VertexSet,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<Vec<usize>>>,
    budget: &mut Budget,
) -> Result<(), Exhausted> {
    for v in allowed.iter().filter(|&v| v >= from) {
        budget.tick()?;
        cur.push(v);
        let dim = cur.len() - 1;
        if out.len() <= dim {
            out.resize(dim + 1, Vec::new());
        }
        out[dim].push(cur.clone());
        let next = allowed.difference(g.neighbors(v));
        face_rec(g, v + 1, &next, cur, out, budget)?;
        cur.pop();
    }
    Ok(())
}

/// Betti numbers over the rationals from the ranks of the simplicial
/// boundary maps: `b_n = c_n − rank ∂_n − rank ∂_{n+1}`.
pub fn betti_numbers(g: &Graph, budget: &mut Budget) -> Result<BettiReport, HomologyError> {
    let euler = euler_characteristic(g, budget)?;
    let fs = faces(g, budget)?;
    let top = fs.len();
    // ranks[n] = rank of ∂_n : C_n → C_{n−1}, with ∂_0 = 0
    let mut ranks = vec![0usize; top + 1];
    for n in 1..top {
        let index: HashMap<&[usize], usize> = fs[n - 1].iter().enumerate().map(|(i, f)| (f.as_slice(), i)).collect();
        // rows are n-faces, columns (n−1)-faces
        let mut rows: Vec<Vec<(usize, i64)>> = Vec::with_capacity(fs[n].len());
        for f in &fs[n] {
            let mut row = Vec::with_capacity(f.len());
            let mut sub = Vec::with_capacity(f.len() - 1);
            for skip in 0..f.len() {
                sub.clear();
                sub.extend(f.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v));
                let sign = if skip % 2 == 0 { 1 } else { -1 };
                row.push((index[sub.as_slice()], sign));
            }
            rows.push(row);
        }
        ranks[n] = exact_rank(&rows, fs[n - 1].len(), budget)?;
    }
    let betti: Vec<u64> = (0..top)
        .map(|n| (fs[n].len() - ranks[n] - ranks[n + 1]) as u64)
        .collect();
    let total_betti = betti.iter().sum();
    Ok(BettiReport {
        euler,
        betti,
        total_betti,
    })
}

/// Rank over the rationals of a sparse integer matrix, by fraction-free
/// (Bareiss) elimination in `i128`, redone with big integers if an
/// intermediate value would overflow.
pub fn exact_rank(rows: &[Vec<(usize, i64)>], cols: usize, budget: &mut Budget) -> Result<usize, HomologyError> {
    let dense = |z: fn(i64) -> _| -> Vec<Vec<_>> {
        rows.iter()
            .map(|r| {
                let mut d = vec![z(0); cols];
                for &(c, v) in r {
                    d[c] = z(v);
                }
                d
            })
            .collect()
    };
    let small: Vec<Vec<i128>> = dense(|v| v as i128);
    let mut probe = budget.clone();
    match bareiss_i128(small, &mut probe) {
        Ok(Some(r)) => {
            *budget = probe;
            Ok(r)
        }
        Ok(None) => {
            let big: Vec<Vec<BigInt>> = rows
                .iter()
                .map(|r| {
                    let mut d = vec![BigInt::zero(); cols];
                    for &(c, v) in r {
                        d[c] = BigInt::from(v);
                    }
                    d
                })
                .collect();
            Ok(bareiss_big(big, budget)?)
        }
        Err(e) => Err(e.into()),
    }
}

fn bareiss_i128(mut a: Vec<Vec<i128>>, budget: &mut Budget) -> Result<Option<usize>, Exhausted> {
    let m = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev: i128 = 1;
    let mut r = 0;
    for c in 0..cols {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, p);
        budget.charge(((m - r) * (cols - c)) as u64)?;
        let (top, below) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let piv = pivot_row[c];
        for row in below.iter_mut() {
            let f = row[c];
            for j in c + 1..cols {
                let x = piv.checked_mul(row[j]);
                let y = f.checked_mul(pivot_row[j]);
                let v = match (x, y) {
                    (Some(x), Some(y)) => match x.checked_sub(y) {
                        Some(v) => v,
                        None => return Ok(None),
                    },
                    _ => return Ok(None),
                };
                row[j] = v / prev;
            }
            row[c] = 0;
        }
        prev = piv;
        r += 1;
    }
    Ok(Some(r))
}

fn bareiss_big(mut a: Vec<Vec<BigInt>>, budget: &mut Budget) -> Result<usize, Exhausted> {
    let m = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        budget.charge(((m - r) * (cols - c)) as u64)?;
        let (top, below) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let piv = pivot_row[c].clone();
        for row in below.iter_mut() {
            let f = row[c].clone();
            for j in c + 1..cols {
                let v = &piv * &row[j] - &f * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = piv;
        r += 1;
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BalanceVerdict {
    pub k: u64,
    pub balanced: bool,
    /// Smallest violating vertex set found (fewest vertices, then lowest
    /// bitmask order), if any.
    pub witness: Option<VertexSet>,
    pub witness_parity: Option<Parity>,
    /// Whether every nonempty induced subgraph was examined.
    pub exhaustive: bool,
    pub subgraphs_checked: u64,
}

/// Largest vertex count handled by the exhaustive bitmask table.
pub const EXHAUSTIVE_MAX_VERTICES: usize = 26;

/// Whether every nonempty induced subgraph `H` has
/// `|S_even(H) − S_odd(H)| ≤ k`.
///
/// When `2^n ≤ subgraph_budget` every subset is examined with the table
/// `alt(S) = alt(S − v) − alt(S − N[v])`. Otherwise all subsets up to the
/// largest size that fits in half the budget are examined, and the rest of
/// the budget goes to random subsets drawn from `seed`; a `balanced` answer
/// is then only as strong as the sample.
pub fn is_k_balanced(g: &Graph, k: u64, subgraph_budget: u64, seed: u64) -> BalanceVerdict {
    let n = g.n();
    let fits = n <= EXHAUSTIVE_MAX_VERTICES && (1u64 << n) <= subgraph_budget;
    if fits {
        exhaustive_balance(g, k)
    } else {
        sampled_balance(g, k, subgraph_budget, seed)
    }
}

fn exhaustive_balance(g: &Graph, k: u64) -> BalanceVerdict {
    let n = g.n();
    let nbr: Vec<u64> = (0..n).map(|v| g.neighbors(v).to_mask().unwrap()).collect();
    let size = 1usize << n;
    let mut alt = vec![0i64; size];
    alt[0] = 1;
    let mut best: Option<(u32, usize)> = None;
    for s in 1..size {
        let v = s.trailing_zeros() as usize;
        let without = s & !(1 << v);
        let rest = without & !(nbr[v] as usize);
        alt[s] = alt[without] - alt[rest];
        if alt[s].unsigned_abs() > k {
            let key = (s.count_ones(), s);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
    }
    let witness = best.map(|(_, s)| VertexSet::from_mask(s as u64));
    finish(g, k, witness, true, size as u64 - 1)
}

fn sampled_balance(g: &Graph, k: u64, subgraph_budget: u64, seed: u64) -> BalanceVerdict {
    let n = g.n();
    let half = subgraph_budget / 2;
    let mut checked = 0u64;
    let mut best: Option<VertexSet> = None;
    let key = |s: &VertexSet| (s.len(), s.to_vec());
    let consider = |s: VertexSet, best: &mut Option<VertexSet>| {
        if violates(g, &s, k) && best.as_ref().is_none_or(|b| key(&s) < key(b)) {
            *best = Some(s);
        }
    };
    // every subset of size 1..=cap, where the running total fits in half
    let mut size = 1;
    let mut count = 0u64;
    while size <= n {
        let c = binom(n, size);
        if c.saturating_add(count) > half {
            break;
        }
        count += c;
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            consider(combo.iter().copied().collect(), &mut best);
            checked += 1;
            if !next_combination(&mut combo, n) {
                break;
            }
        }
        size += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws = subgraph_budget.saturating_sub(checked);
    if size <= n {
        for _ in 0..draws {
            let s_len = rng.gen_range(size..=n);
            let s: VertexSet = index::sample(&mut rng, n, s_len).into_iter().collect();
            consider(s, &mut best);
            checked += 1;
        }
    }
    let exhaustive = size > n;
    finish(g, k, best, exhaustive, checked)
}

fn violates(g: &Graph, s: &VertexSet, k: u64) -> bool {
    let h = g.induced_subgraph(s).expect("subset in range").graph;
    let p = independence_parity(&h, &mut Budget::unlimited()).expect("unlimited budget");
    p.alternating().unsigned_abs() > k as u128
}

fn finish(g: &Graph, k: u64, witness: Option<VertexSet>, exhaustive: bool, checked: u64) -> BalanceVerdict {
    let witness_parity = witness.as_ref().map(|s| {
        let h = g.induced_subgraph(s).expect("subset in range").graph;
        independence_parity(&h, &mut Budget::unlimited()).expect("unlimited budget")
    });
    BalanceVerdict {
        k,
        balanced: witness.is_none(),
        witness,
        witness_parity,
        exhaustive,
        subgraphs_checked: checked,
    }
}

fn binom(n: usize, k: usize) -> u64 {
    let mut r: u128 = 1;
    for i in 0..k.min(n - k) {
        r = r * (n - i) as u128 / (i + 1) as u128;
        if r > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    r as u64
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..k {
        c[j] = c[j - 1] + 1;
    }
    true
}
