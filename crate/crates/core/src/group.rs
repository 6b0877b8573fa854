//! Finite groups given by multiplication tables, plus the small groups used
//! throughout the test suites.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite group with elements `0..order`, labelled by strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

/// JSON form: `{"elements": [...], "table": [[label, ...], ...]}` where
/// `table[i][j]` is the label of `elements[i] * elements[j]`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GroupSpec {
    pub elements: Vec<String>,
    pub table: Vec<Vec<String>>,
}

impl FiniteGroup {
    /// Builds a group from an index table, verifying the group axioms.
    pub fn from_table(labels: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::NotAGroup("empty element set".into()));
        }
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(Error::NotAGroup("table is not square".into()));
        }
        if table.iter().flatten().any(|&x| x >= n) {
            return Err(Error::NotAGroup("table entry out of range".into()));
        }
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != n {
            return Err(Error::NotAGroup("duplicate element labels".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::NotAGroup("no identity element".into()))?;
        let mut inverse = vec![usize::MAX; n];
        for x in 0..n {
            let y = (0..n)
                .find(|&y| table[x][y] == identity && table[y][x] == identity)
                .ok_or_else(|| Error::NotAGroup(format!("{} has no inverse", labels[x])))?;
            inverse[x] = y;
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a][b];
                for c in 0..n {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(Error::NotAGroup(format!(
                            "associativity fails on ({}, {}, {})",
                            labels[a], labels[b], labels[c]
                        )));
                    }
                }
            }
        }
        Ok(FiniteGroup {
            labels,
            table,
            identity,
            inverse,
        })
    }

    pub fn from_spec(spec: &GroupSpec) -> Result<Self> {
        let index: HashMap<&str, usize> = spec
            .elements
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let table = spec
            .table
            .iter()
            .map(|row| {
                row.iter()
                    .map(|l| {
                        index.get(l.as_str()).copied().ok_or_else(|| {
                            Error::NotAGroup(format!("unknown element {l:?} in table"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        FiniteGroup::from_table(spec.elements.clone(), table)
    }

    pub fn to_spec(&self) -> GroupSpec {
        GroupSpec {
            elements: self.labels.clone(),
            table: self
                .table
                .iter()
                .map(|r| r.iter().map(|&x| self.labels[x].clone()).collect())
                .collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// `h g h^{-1}`.
    pub fn conjugate(&self, h: usize, g: usize) -> usize {
        self.mul(self.mul(h, g), self.inv(h))
    }

    pub fn pow(&self, g: usize, k: usize) -> usize {
        (0..k).fold(self.identity, |acc, _| self.mul(acc, g))
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    /// Least common multiple of the element orders.
    pub fn exponent(&self) -> usize {
        (0..self.order()).fold(1, |acc, g| num_integer::lcm(acc, self.element_order(g)))
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    /// Subgroup generated by `gens`, as a sorted element list.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut set: BTreeSet<usize> = BTreeSet::new();
        set.insert(self.identity);
        let mut frontier: Vec<usize> = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        set.into_iter().collect()
    }

    /// The subgroup on the given elements as a group of its own, with the
    /// original labels. Elements must be closed under multiplication.
    pub fn subgroup(&self, elements: &[usize]) -> Result<FiniteGroup> {
        let pos: HashMap<usize, usize> =
            elements.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let table = elements
            .iter()
            .map(|&a| {
                elements
                    .iter()
                    .map(|&b| {
                        pos.get(&self.mul(a, b))
                            .copied()
                            .ok_or_else(|| Error::NotAGroup("subset not closed".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        FiniteGroup::from_table(
            elements.iter().map(|&g| self.labels[g].clone()).collect(),
            table,
        )
    }

    /// All subgroups, each as a sorted element list; deterministic order.
    pub fn subgroups(&self) -> Vec<Vec<usize>> {
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        let cyclic: Vec<Vec<usize>> = self.elements().map(|g| self.closure(&[g])).collect();
        found.extend(cyclic.iter().cloned());
        // Grow by adjoining generators until no new subgroups appear.
        loop {
            let current: Vec<Vec<usize>> = found.iter().cloned().collect();
            let mut added = false;
            for h in &current {
                for g in self.elements() {
                    if h.contains(&g) {
                        continue;
                    }
                    let mut gens = h.clone();
                    gens.push(g);
                    if found.insert(self.closure(&gens)) {
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        let mut out: Vec<Vec<usize>> = found.into_iter().collect();
        out.sort_by_key(|h| (h.len(), h.clone()));
        out
    }

    /// Isomorphism-invariant automorphism check: is `perm` an automorphism?
    pub fn is_automorphism(&self, perm: &[usize]) -> bool {
        perm.len() == self.order()
            && self.elements().all(|a| {
                self.elements()
                    .all(|b| perm[self.mul(a, b)] == self.mul(perm[a], perm[b]))
            })
    }
}

/// Standard small groups.
pub mod small {
    use super::*;

    fn build(labels: Vec<String>, mul: impl Fn(usize, usize) -> usize) -> FiniteGroup {
        let n = labels.len();
        let table = (0..n)
            .map(|a| (0..n).map(|b| mul(a, b)).collect())
            .collect();
        FiniteGroup::from_table(labels, table).expect("standard group")
    }

    pub fn trivial() -> FiniteGroup {
        cyclic(1)
    }

    /// `ℤ/n`, elements labelled `"0".."n-1"`.
    pub fn cyclic(n: usize) -> FiniteGroup {
        build((0..n).map(|k| k.to_string()).collect(), |a, b| (a + b) % n)
    }

    /// Direct product, elements labelled `"(a,b)"`.
    pub fn product(g: &FiniteGroup, h: &FiniteGroup) -> FiniteGroup {
        let m = h.order();
        let labels = g
            .elements()
            .flat_map(|a| h.elements().map(move |b| (a, b)))
            .map(|(a, b)| format!("({},{})", g.label(a), h.label(b)))
            .collect();
        build(labels, |x, y| g.mul(x / m, y / m) * m + h.mul(x % m, y % m))
    }

    pub fn klein() -> FiniteGroup {
        product(&cyclic(2), &cyclic(2))
    }

    /// Symmetric group on `n` letters; labels in one-line notation, e.g. `"[1,0,2]"`.
    /// Product `(a·b)(i) = a(b(i))`.
    pub fn symmetric(n: usize) -> FiniteGroup {
        let perms = permutations(n);
        let labels = perms
            .iter()
            .map(|p| {
                format!(
                    "[{}]",
                    p.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                )
            })
            .collect();
        let index: HashMap<Vec<usize>, usize> = perms
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        build(labels, |a, b| {
            let c: Vec<usize> = (0..n).map(|i| perms[a][perms[b][i]]).collect();
            index[&c]
        })
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        fn rec(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
            if prefix.len() == n {
                out.push(prefix.clone());
                return;
            }
            for x in 0..n {
                if !prefix.contains(&x) {
                    prefix.push(x);
                    rec(prefix, n, out);
                    prefix.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), n, &mut out);
        out
    }

    /// Dihedral group of order `2n`: `r^k` labelled `"rk"`, `s r^k` labelled `"srk"`.
    pub fn dihedral(n: usize) -> FiniteGroup {
        let labels = (0..n)
            .map(|k| format!("r{k}"))
            .chain((0..n).map(|k| format!("sr{k}")))
            .collect();
        // element (f, k) = s^f r^k; r^k s = s r^{-k}
        build(labels, |a, b| {
            let (fa, ka) = (a / n, a % n);
            let (fb, kb) = (b / n, b % n);
            let k = if fb == 1 {
                (n - ka % n + kb) % n
            } else {
                (ka + kb) % n
            };
            ((fa + fb) % 2) * n + k
        })
    }

    /// Quaternion group `{±1, ±i, ±j, ±k}`.
    pub fn quaternion() -> FiniteGroup {
        let names = ["1", "i", "j", "k"];
        let labels = names
            .iter()
            .map(|s| s.to_string())
            .chain(names.iter().map(|s| format!("-{s}")))
            .collect();
        // unit products (sign, unit) for the basis 1,i,j,k
        let unit = |a: usize, b: usize| -> (bool, usize) {
            match (a, b) {
                (0, x) | (x, 0) => (false, x),
                (x, y) if x == y => (true, 0),
                (1, 2) => (false, 3),
                (2, 1) => (true, 3),
                (2, 3) => (false, 1),
                (3, 2) => (true, 1),
                (3, 1) => (false, 2),
                (1, 3) => (true, 2),
                _ => unreachable!(),
            }
        };
        build(labels, move |a, b| {
            let (neg, u) = unit(a % 4, b % 4);
            let sign = (a / 4) ^ (b / 4) ^ usize::from(neg);
            sign * 4 + u
        })
    }
}

#[cfg(test)]
mod tests {
    use super::small::*;
    use super::*;

    #[test]
    fn standard_groups_are_groups() {
        assert_eq!(cyclic(4).order(), 4);
        assert_eq!(symmetric(3).order(), 6);
        assert!(!symmetric(3).is_abelian());
        assert_eq!(dihedral(4).order(), 8);
        assert!(!dihedral(4).is_abelian());
        assert!(!quaternion().is_abelian());
        assert!(klein().is_abelian());
        assert_eq!(klein().exponent(), 2);
        assert_eq!(quaternion().exponent(), 4);
    }

    #[test]
    fn rejects_non_group() {
        let labels = vec!["a".to_string(), "b".to_string()];
        let err = FiniteGroup::from_table(labels, vec![vec![0, 0], vec![0, 1]]).unwrap_err();
        assert!(matches!(err, Error::NotAGroup(_)));
    }

    #[test]
    fn subgroup_lattice_of_s3() {
        let s3 = symmetric(3);
        let sizes: Vec<usize> = s3.subgroups().iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![1, 2, 2, 2, 3, 6]);
    }

    #[test]
    fn spec_round_trip() {
        let q = quaternion();
        assert_eq!(FiniteGroup::from_spec(&q.to_spec()).unwrap(), q);
    }
}
