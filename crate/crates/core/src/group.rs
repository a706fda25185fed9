//! Finite matrix groups enumerated by breadth-first closure.

use crate::error::{Error, Result};
use crate::matrix::RingMatrix;
use crate::ring::{Ring, RingKind};
use rayon::prelude::*;
use std::collections::HashMap;
use std::io::{Read, Write};

pub const DEFAULT_CAP: usize = 1_000_000;
const TABLE_LIMIT: usize = 4096;
const MAGIC: &[u8; 4] = b"FGRP";

/// A finite group of `dim × dim` matrices over `R`; element 0 is the identity.
#[derive(Debug, Clone)]
pub struct FinGroup {
    pub ring: Ring,
    pub dim: usize,
    elems: Vec<u16>,
    index: HashMap<Vec<u16>, u32>,
    table: Option<Vec<u32>>,
    inverse: Vec<u32>,
    pub generators: Vec<RingMatrix>,
    /// `(parent, generator)` with `element = parent · generator`; the identity has no parent.
    parent: Vec<(u32, u8)>,
}

fn key(m: &RingMatrix) -> Vec<u16> {
    m.data.iter().map(|&x| x as u16).collect()
}

fn mul_keys(a: &[u16], b: &[u16], d: usize, r: &Ring) -> Vec<u16> {
    let mut out = vec![0u16; d * d];
    let md = r.modulus;
    for i in 0..d {
        for j in 0..d {
            let mut s = 0u64;
            for k in 0..d {
                s += a[i * d + k] as u64 * b[k * d + j] as u64;
            }
            out[i * d + j] = (s % md) as u16;
        }
    }
    out
}

impl FinGroup {
    pub fn enumerate(gens: &[RingMatrix], r: &Ring, cap: usize) -> Result<FinGroup> {
        let dim = gens.first().map_or(0, |g| g.rows);
        assert!(gens.iter().all(|g| g.rows == dim && g.cols == dim));
        assert!(gens.len() < 256);
        let id = key(&RingMatrix::identity(dim));
        let gkeys: Vec<Vec<u16>> = gens.iter().map(key).collect();
        let mut elems = id.clone();
        let mut index = HashMap::new();
        index.insert(id, 0u32);
        let mut parent = vec![(u32::MAX, u8::MAX)];
        let mut frontier: Vec<u32> = vec![0];
        let d2 = dim * dim;
        while !frontier.is_empty() {
            let products: Vec<(u32, u8, Vec<u16>)> = frontier
                .par_iter()
                .flat_map_iter(|&x| {
                    let xs = elems[x as usize * d2..(x as usize + 1) * d2].to_vec();
                    gkeys
                        .iter()
                        .enumerate()
                        .map(move |(gi, g)| (x, gi as u8, mul_keys(&xs, g, dim, r)))
                        .collect::<Vec<_>>()
                })
                .collect();
            let mut next = Vec::new();
            for (x, gi, p) in products {
                if index.contains_key(&p) {
                    continue;
                }
                let id = parent.len() as u32;
                if id as usize >= cap {
                    return Err(Error::CapExceeded(cap));
                }
                elems.extend_from_slice(&p);
                index.insert(p, id);
                parent.push((x, gi));
                next.push(id);
            }
            frontier = next;
        }
        let mut g = FinGroup {
            ring: r.clone(),
            dim,
            elems,
            index,
            table: None,
            inverse: Vec::new(),
            generators: gens.to_vec(),
            parent,
        };
        g.finish();
        Ok(g)
    }

    fn finish(&mut self) {
        let n = self.order();
        let inverse: Vec<u32> = (0..n)
            .into_par_iter()
            .map(|i| {
                let inv = self.matrix(i as u32).inverse(&self.ring).expect("invertible element");
                self.index[&key(&inv)]
            })
            .collect();
        self.inverse = inverse;
        if n <= TABLE_LIMIT {
            let table: Vec<u32> = (0..n * n)
                .into_par_iter()
                .map(|ij| self.mul_slow((ij / n) as u32, (ij % n) as u32))
                .collect();
            self.table = Some(table);
        }
    }

    pub fn order(&self) -> usize {
        self.parent.len()
    }

    pub fn identity(&self) -> u32 {
        0
    }

    fn slice(&self, i: u32) -> &[u16] {
        let d2 = self.dim * self.dim;
        &self.elems[i as usize * d2..(i as usize + 1) * d2]
    }

    pub fn matrix(&self, i: u32) -> RingMatrix {
        RingMatrix { rows: self.dim, cols: self.dim, data: self.slice(i).iter().map(|&x| x as u64).collect() }
    }

    pub fn index_of(&self, m: &RingMatrix) -> Option<u32> {
        if m.rows != self.dim {
            return None;
        }
        self.index.get(&key(m)).copied()
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let p = mul_keys(self.slice(a), self.slice(b), self.dim, &self.ring);
        self.index[&p]
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.table {
            Some(t) => t[a as usize * self.order() + b as usize],
            None => self.mul_slow(a, b),
        }
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    /// Index of each generator.
    pub fn generator_indices(&self) -> Vec<u32> {
        self.generators.iter().map(|g| self.index_of(g).unwrap()).collect()
    }

    /// Word in the generators equal to element `i`.
    pub fn word(&self, mut i: u32) -> Vec<u8> {
        let mut w = Vec::new();
        while i != 0 {
            let (p, g) = self.parent[i as usize];
            w.push(g);
            i = p;
        }
        w.reverse();
        w
    }

    /// Images of all elements under a matrix map into `target`.
    pub fn map_into(&self, target: &FinGroup, f: impl Fn(&RingMatrix) -> RingMatrix + Sync) -> Result<Vec<u32>> {
        (0..self.order() as u32)
            .into_par_iter()
            .map(|i| {
                target
                    .index_of(&f(&self.matrix(i)))
                    .ok_or_else(|| Error::Shape("image outside the target group".into()))
            })
            .collect()
    }

    /// Elements satisfying a predicate.
    pub fn filter(&self, pred: impl Fn(&RingMatrix) -> bool + Sync) -> Vec<u32> {
        (0..self.order() as u32).into_par_iter().filter(|&i| pred(&self.matrix(i))).collect()
    }

    /// Binary table: header, element matrices and generator words.
    pub fn write_table<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        let kind = match self.ring.kind {
            RingKind::PrimeField => 0u8,
            RingKind::ZMod => 1u8,
        };
        w.write_all(&[kind])?;
        w.write_all(&self.ring.p.to_le_bytes())?;
        w.write_all(&self.ring.k.to_le_bytes())?;
        w.write_all(&(self.dim as u32).to_le_bytes())?;
        w.write_all(&(self.generators.len() as u32).to_le_bytes())?;
        for g in &self.generators {
            for &x in &key(g) {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        w.write_all(&(self.order() as u32).to_le_bytes())?;
        for &x in &self.elems {
            w.write_all(&x.to_le_bytes())?;
        }
        for &(p, g) in &self.parent {
            w.write_all(&p.to_le_bytes())?;
            w.write_all(&[g])?;
        }
        Ok(())
    }

    pub fn read_table<Rd: Read>(rd: &mut Rd) -> std::io::Result<FinGroup> {
        let bad = |m: &str| std::io::Error::new(std::io::ErrorKind::InvalidData, m.to_string());
        let mut magic = [0u8; 4];
        rd.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(bad("bad magic"));
        }
        let mut b1 = [0u8; 1];
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        let mut b2 = [0u8; 2];
        rd.read_exact(&mut b1)?;
        let kind = b1[0];
        rd.read_exact(&mut b8)?;
        let p = u64::from_le_bytes(b8);
        rd.read_exact(&mut b4)?;
        let k = u32::from_le_bytes(b4);
        let ring = if kind == 0 {
            Ring::prime_field(p)
        } else {
            crate::ring::make_local_ring(p, k)
        }
        .map_err(|e| bad(&e.to_string()))?;
        rd.read_exact(&mut b4)?;
        let dim = u32::from_le_bytes(b4) as usize;
        let mut read_u16s = |n: usize, rd: &mut Rd| -> std::io::Result<Vec<u16>> {
            (0..n)
                .map(|_| {
                    rd.read_exact(&mut b2)?;
                    Ok(u16::from_le_bytes(b2))
                })
                .collect()
        };
        rd.read_exact(&mut b4)?;
        let ngens = u32::from_le_bytes(b4) as usize;
        let mut generators = Vec::with_capacity(ngens);
        for _ in 0..ngens {
            let data = read_u16s(dim * dim, rd)?.into_iter().map(|x| x as u64).collect();
            generators.push(RingMatrix { rows: dim, cols: dim, data });
        }
        rd.read_exact(&mut b4)?;
        let n = u32::from_le_bytes(b4) as usize;
        let elems = read_u16s(n * dim * dim, rd)?;
        let mut parent = Vec::with_capacity(n);
        for _ in 0..n {
            rd.read_exact(&mut b4)?;
            rd.read_exact(&mut b1)?;
            parent.push((u32::from_le_bytes(b4), b1[0]));
        }
        let d2 = dim * dim;
        let index = (0..n).map(|i| (elems[i * d2..(i + 1) * d2].to_vec(), i as u32)).collect();
        let mut g = FinGroup { ring, dim, elems, index, table: None, inverse: Vec::new(), generators, parent };
        g.finish();
        Ok(g)
    }
}

/// A homomorphism between enumerated groups, by element images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupMap {
    pub images: Vec<u32>,
}

impl GroupMap {
    pub fn identity(g: &FinGroup) -> Self {
        GroupMap { images: (0..g.order() as u32).collect() }
    }

    pub fn is_homomorphism(&self, src: &FinGroup, dst: &FinGroup) -> bool {
        src.generator_indices().iter().all(|&g| {
            (0..src.order() as u32).all(|x| {
                self.images[src.mul(x, g) as usize] == dst.mul(self.images[x as usize], self.images[g as usize])
            })
        })
    }

    pub fn compose(&self, first: &GroupMap) -> GroupMap {
        GroupMap { images: first.images.iter().map(|&i| self.images[i as usize]).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{sp_generators, is_symplectic};

    #[test]
    fn small_groups() {
        let r = Ring::prime_field(3).unwrap();
        let sl2 = FinGroup::enumerate(&sp_generators(2, &r), &r, DEFAULT_CAP).unwrap();
        assert_eq!(sl2.order(), 24);
        let sp1 = FinGroup::enumerate(&sp_generators(1, &r), &r, DEFAULT_CAP).unwrap();
        assert_eq!(sp1.order(), 3);
        let sp0 = FinGroup::enumerate(&sp_generators(0, &r), &r, DEFAULT_CAP).unwrap();
        assert_eq!(sp0.order(), 1);
        for i in 0..24 {
            assert_eq!(sl2.mul(i, sl2.inv(i)), 0);
            assert!(is_symplectic(&sl2.matrix(i), &r).unwrap());
            let w = sl2.word(i);
            let prod = w.iter().fold(0u32, |acc, &g| sl2.mul(acc, sl2.index_of(&sl2.generators[g as usize]).unwrap()));
            assert_eq!(prod, i);
        }
        assert_eq!(
            FinGroup::enumerate(&sp_generators(2, &r), &r, 10).err(),
            Some(Error::CapExceeded(10))
        );
    }

    #[test]
    fn table_round_trip() {
        let r = Ring::prime_field(3).unwrap();
        let g = FinGroup::enumerate(&sp_generators(3, &r), &r, DEFAULT_CAP).unwrap();
        assert_eq!(g.order(), 648);
        let mut buf = Vec::new();
        g.write_table(&mut buf).unwrap();
        let h = FinGroup::read_table(&mut buf.as_slice()).unwrap();
        assert_eq!(h.order(), 648);
        for i in (0..648).step_by(37) {
            assert_eq!(h.matrix(i), g.matrix(i));
            assert_eq!(h.word(i), g.word(i));
        }
    }
}
