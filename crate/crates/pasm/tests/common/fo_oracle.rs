//! Brute-force equality-free definability over tiny structures with one
//! unary relation `P` and one binary relation `E`.
//!
//! Formulas are represented by their denotations: the set of `k`-tuples
//! (as a bitmask over the lexicographic tuple index) where they hold.
//! Rank-`m` formulas in `k` free variables are the Boolean combinations of
//! the atoms `P(xi)`, `E(xi, xj)` and of `exists y phi` for rank-`m - 1`
//! formulas `phi` in `k + 1` variables. Every such `phi` is a union of
//! atoms of its Boolean algebra and `exists` distributes over unions, so
//! quantifying those atoms generates everything.

use std::collections::{BTreeMap, BTreeSet};

use pasm::synthesis::{RelStructure, Relation};

#[derive(Clone, Debug)]
pub struct Tiny {
    pub n: usize,
    pub p: Vec<bool>,
    pub e: Vec<Vec<bool>>,
}

impl Tiny {
    /// Every structure on `n` elements.
    pub fn all(n: usize) -> Vec<Tiny> {
        let mut out = Vec::new();
        for pm in 0..1u32 << n {
            for em in 0..1u32 << (n * n) {
                let p = (0..n).map(|i| pm >> i & 1 == 1).collect();
                let e = (0..n).map(|i| (0..n).map(|j| em >> (i * n + j) & 1 == 1).collect()).collect();
                out.push(Tiny { n, p, e });
            }
        }
        out
    }

    pub fn to_rel(&self) -> RelStructure {
        let p = (0..self.n).filter(|&i| self.p[i]).map(|i| vec![i]).collect();
        let mut e = BTreeSet::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if self.e[i][j] {
                    e.insert(vec![i, j]);
                }
            }
        }
        RelStructure {
            size: self.n,
            relations: vec![
                Relation { name: "P".into(), arity: 1, tuples: p },
                Relation { name: "E".into(), arity: 2, tuples: e },
            ],
        }
    }

    fn decode(&self, mut idx: usize, k: usize) -> Vec<usize> {
        let mut t = vec![0; k];
        for slot in t.iter_mut().rev() {
            *slot = idx % self.n;
            idx /= self.n;
        }
        t
    }

    fn count(&self, k: usize) -> usize {
        self.n.pow(k as u32)
    }

    fn atoms(&self, k: usize) -> Vec<u128> {
        let mut out = Vec::new();
        for i in 0..k {
            out.push(self.mask(k, |t| self.p[t[i]]));
            for j in 0..k {
                out.push(self.mask(k, |t| self.e[t[i]][t[j]]));
            }
        }
        out
    }

    fn mask(&self, k: usize, f: impl Fn(&[usize]) -> bool) -> u128 {
        (0..self.count(k)).filter(|&i| f(&self.decode(i, k))).fold(0, |m, i| m | 1 << i)
    }

    /// `exists x_k` of a set of `k + 1`-tuples.
    fn project(&self, set: u128, k: usize) -> u128 {
        self.mask(k, |t| {
            (0..self.n).any(|c| {
                let mut ext = t.to_vec();
                ext.push(c);
                let idx = ext.iter().fold(0, |a, &x| a * self.n + x);
                set >> idx & 1 == 1
            })
        })
    }

    /// Generators of the rank-`m` Boolean algebra on `k`-tuples.
    pub fn generators(&self, k: usize, m: usize) -> Vec<u128> {
        assert!(self.count(k + m) <= 128, "tuple space too large for the bitmask oracle");
        let mut gens = self.atoms(k);
        if m > 0 {
            for block in self.blocks(k + 1, m - 1) {
                gens.push(self.project(block, k));
            }
        }
        gens
    }

    /// Atoms of the Boolean algebra: tuples agreeing on every generator.
    pub fn blocks(&self, k: usize, m: usize) -> Vec<u128> {
        let gens = self.generators(k, m);
        let mut by_sig: BTreeMap<Vec<bool>, u128> = BTreeMap::new();
        for i in 0..self.count(k) {
            let sig = gens.iter().map(|g| g >> i & 1 == 1).collect();
            *by_sig.entry(sig).or_insert(0) |= 1 << i;
        }
        by_sig.into_values().collect()
    }

    /// Whether tuples `x` and `y` satisfy the same rank-`m` formulas.
    pub fn equivalent(&self, blocks: &[u128], x: usize, y: usize) -> bool {
        blocks.iter().any(|b| b >> x & 1 == 1 && b >> y & 1 == 1)
    }
}

/// Compares the refinement levels 0..=2 and the stabilised equality-free
/// type partition against the oracle for tuple lengths 1 and 2 on every
/// structure with 1 to `max_n` elements. Returns the number of structures.
pub fn check_partitions(max_n: usize) -> Result<usize, String> {
    let mut structures = 0;
    for n in 1..=max_n {
        for t in Tiny::all(n) {
            let a = t.to_rel();
            for k in 1..=2 {
                let mut blocks = Vec::new();
                for m in 0..=2 {
                    let b = t.blocks(k, m);
                    let p = pasm::synthesis::level_partition(&a, k, m).map_err(|e| e.to_string())?;
                    compare(&t, k, &b, |x, y| p.block[x] == p.block[y])
                        .map_err(|(x, y)| format!("{t:?}: level {m}, length {k}, tuples {x} and {y}"))?;
                    blocks.push(b);
                }
                let stable = pasm::synthesis::fo_woeq_partition(&a, k).map_err(|e| e.to_string())?;
                compare(&t, k, &blocks[2], |x, y| stable.block[x] == stable.block[y])
                    .map_err(|(x, y)| format!("{t:?}: type partition, length {k}, tuples {x} and {y}"))?;
            }
            structures += 1;
        }
    }
    Ok(structures)
}

fn compare(t: &Tiny, k: usize, blocks: &[u128], same: impl Fn(usize, usize) -> bool) -> Result<(), (usize, usize)> {
    let count = t.count(k);
    for x in 0..count {
        for y in x + 1..count {
            if t.equivalent(blocks, x, y) != same(x, y) {
                return Err((x, y));
            }
        }
    }
    Ok(())
}
