//! Finite groups given by Cayley tables, and homomorphisms between them.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    /// Validate a multiplication table. The identity is detected, not assumed to be 0.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::ZeroOrder);
        }
        for row in &table {
            if row.len() != n || row.iter().any(|&x| x >= n) {
                return Err(Error::NotLatinSquare);
            }
        }
        for i in 0..n {
            let mut seen_row = vec![false; n];
            let mut seen_col = vec![false; n];
            for j in 0..n {
                if std::mem::replace(&mut seen_row[table[i][j]], true) {
                    return Err(Error::NotLatinSquare);
                }
                if std::mem::replace(&mut seen_col[table[j][i]], true) {
                    return Err(Error::NotLatinSquare);
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or(Error::NoIdentity)?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::NotAssociative(a, b, c));
                    }
                }
            }
        }
        let inverses = (0..n).map(|g| (0..n).find(|&h| table[g][h] == identity).unwrap()).collect();
        Ok(FiniteGroup { table, identity, inverses })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroOrder);
        }
        Self::from_table((0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect())
    }

    pub fn trivial() -> Self {
        Self::cyclic(1).unwrap()
    }

    /// Symmetric group on k letters; elements are permutations in lexicographic order,
    /// product is composition (p*q)(i) = p(q(i)).
    pub fn symmetric(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroOrder);
        }
        let perms = permutations(k);
        let index = |p: &Vec<usize>| perms.iter().position(|q| q == p).unwrap();
        let table = perms
            .iter()
            .map(|p| perms.iter().map(|q| index(&q.iter().map(|&i| p[i]).collect())).collect())
            .collect();
        Self::from_table(table)
    }

    pub fn direct_product(&self, other: &FiniteGroup) -> Self {
        let m = other.order();
        let n = self.order() * m;
        let table = (0..n)
            .map(|x| (0..n).map(|y| self.mul(x / m, y / m) * m + other.mul(x % m, y % m)).collect())
            .collect();
        Self::from_table(table).expect("product of groups is a group")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    pub fn inv(&self, g: usize) -> usize {
        self.inverses[g]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    pub fn is_abelian(&self) -> bool {
        self.elements().all(|g| self.elements().all(|h| self.mul(g, h) == self.mul(h, g)))
    }

    /// Checks that a subset is a subgroup.
    pub fn is_subgroup(&self, elems: &[usize]) -> bool {
        elems.contains(&self.identity)
            && elems.iter().all(|&g| elems.contains(&self.inv(g)))
            && elems.iter().all(|&g| elems.iter().all(|&h| elems.contains(&self.mul(g, h))))
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return vec![vec![0]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..k {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupHom {
    pub source: FiniteGroup,
    pub target: FiniteGroup,
    pub map: Vec<usize>,
}

impl GroupHom {
    /// Builds a candidate homomorphism; only sizes are checked here.
    pub fn new(source: FiniteGroup, target: FiniteGroup, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.order() {
            return Err(Error::SizeMismatch(format!("map has {} entries, source order {}", map.len(), source.order())));
        }
        if map.iter().any(|&x| x >= target.order()) {
            return Err(Error::SizeMismatch("map value outside target".into()));
        }
        Ok(GroupHom { source, target, map })
    }

    /// Validated homomorphism.
    pub fn checked(source: FiniteGroup, target: FiniteGroup, map: Vec<usize>) -> Result<Self> {
        let h = Self::new(source, target, map)?;
        if !h.check_hom() {
            return Err(Error::InvariantViolation("map is not multiplicative".into()));
        }
        Ok(h)
    }

    pub fn identity(g: &FiniteGroup) -> Self {
        GroupHom { source: g.clone(), target: g.clone(), map: g.elements().collect() }
    }

    pub fn to_trivial(g: &FiniteGroup) -> Self {
        GroupHom { source: g.clone(), target: FiniteGroup::trivial(), map: vec![0; g.order()] }
    }

    pub fn apply(&self, g: usize) -> usize {
        self.map[g]
    }

    pub fn check_hom(&self) -> bool {
        let s = &self.source;
        let t = &self.target;
        self.map[s.identity()] == t.identity()
            && s.elements().all(|g| s.elements().all(|h| self.map[s.mul(g, h)] == t.mul(self.map[g], self.map[h])))
    }

    pub fn kernel(&self) -> Vec<usize> {
        let e = self.target.identity();
        self.source.elements().filter(|&g| self.map[g] == e).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.map.iter().enumerate().all(|(i, &x)| i == x)
    }
}
