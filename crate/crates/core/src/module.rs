//! Finite `Z₀[R]`-modules given by action matrices, localization tests and
//! quasi-linearity probes.

use crate::abelian::{normalize, subgroup_order, Lattice};
use crate::error::{Error, Result};
use crate::intmatrix::{smith_normal_form, IntMatrix};
use crate::monoidring::{s_poly, PolyR, Z0RElem};
use crate::ring::Ring;
use crate::rng::trial_rng;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Integer matrix acting on coordinates; `cols[j]` is the image of `e_j`.
pub type ActionMatrix = Vec<Vec<i64>>;

/// A submodule of `⊕ Z/o_i` (all `o_i > 0`) with an action `⟨a⟩ ↦ T_a`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinZ0RModule {
    pub ring: Ring,
    pub orders: Vec<u64>,
    /// Generators of the underlying subgroup.
    pub gens: Vec<Vec<i64>>,
    /// `action[a]` for every ring element `a`.
    pub action: Vec<ActionMatrix>,
}

fn apply_cols(m: &ActionMatrix, v: &[i64], orders: &[u64]) -> Vec<i64> {
    let mut out = vec![0i128; orders.len()];
    for (j, &c) in v.iter().enumerate() {
        if c != 0 {
            for (o, &x) in out.iter_mut().zip(&m[j]) {
                *o += c as i128 * x as i128;
            }
        }
    }
    out.iter()
        .zip(orders)
        .map(|(&x, &o)| x.rem_euclid(o as i128) as i64)
        .collect()
}

impl FinZ0RModule {
    /// Whole group `⊕ Z/o_i` with the given action.
    pub fn new(ring: &Ring, orders: Vec<u64>, action: Vec<ActionMatrix>) -> Result<Self> {
        if orders.iter().any(|&o| o == 0) {
            return Err(Error::InfiniteModule);
        }
        if action.len() as u64 != ring.size() {
            return Err(Error::Shape("one action matrix per ring element".into()));
        }
        let n = orders.len();
        if action.iter().any(|m| m.len() != n || m.iter().any(|c| c.len() != n)) {
            return Err(Error::Shape("action matrix size".into()));
        }
        let gens = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
        Ok(FinZ0RModule { ring: ring.clone(), orders, gens, action })
    }

    /// Restricts to the subgroup generated by `gens`, which must be stable.
    pub fn with_generators(mut self, gens: Vec<Vec<i64>>) -> Self {
        self.gens = gens.into_iter().map(|g| self.normalized(g)).collect();
        self
    }

    /// `Z^n / im(rel)` with action `T_a` on `Z^n`; rejects a free part.
    pub fn from_relations(ring: &Ring, rel: &IntMatrix, action: &[ActionMatrix]) -> Result<Self> {
        let n = rel.rows;
        let s = smith_normal_form(rel);
        let diag = s.diagonal();
        let mut keep = Vec::new();
        let mut orders = Vec::new();
        for i in 0..n {
            let d = diag.get(i).cloned().unwrap_or_else(num_bigint::BigInt::zero);
            if d.is_zero() {
                return Err(Error::InfiniteModule);
            }
            if !d.is_one() {
                keep.push(i);
                orders.push(d.to_u64().expect("order exceeds u64"));
            }
        }
        // new coordinates y = U x; T ↦ U T U⁻¹
        let mut new_action = Vec::with_capacity(action.len());
        for t in action {
            let tm = IntMatrix::from_cols_i64(n, t);
            let conj = s.u.mul(&tm).mul(&s.u_inv);
            let cols: ActionMatrix = keep
                .iter()
                .map(|&j| {
                    keep.iter()
                        .zip(&orders)
                        .map(|(&i, &o)| {
                            let v = conj.get(i, j) % num_bigint::BigInt::from(o);
                            let v = v.to_i64().unwrap();
                            v.rem_euclid(o as i64)
                        })
                        .collect()
                })
                .collect();
            new_action.push(cols);
        }
        FinZ0RModule::new(ring, orders, new_action)
    }

    /// `R` as `Z/p^k` with `⟨a⟩` acting by `a^q`, i.e. the module `M(q)` for `M = R`.
    pub fn power_action(ring: &Ring, q: u32) -> Self {
        let action = ring.elements().map(|a| vec![vec![ring.pow(a, q as u64) as i64]]).collect();
        FinZ0RModule::new(ring, vec![ring.modulus], action).expect("valid module")
    }

    /// `⊕ Z/o_i` with units acting trivially and non-units acting by zero.
    pub fn unit_trivial(ring: &Ring, orders: Vec<u64>) -> Result<Self> {
        let n = orders.len();
        let action = ring
            .elements()
            .map(|a| {
                let s = ring.is_unit(a) as i64;
                (0..n).map(|j| (0..n).map(|i| if i == j { s } else { 0 }).collect()).collect()
            })
            .collect();
        FinZ0RModule::new(ring, orders, action)
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn normalized(&self, mut v: Vec<i64>) -> Vec<i64> {
        normalize(&self.orders, &mut v);
        v
    }

    /// Matrix of `x = Σ n_a ⟨a⟩`.
    pub fn action_of(&self, x: &Z0RElem) -> ActionMatrix {
        let n = self.rank();
        let mut m = vec![vec![0i64; n]; n];
        for (a, c) in x.terms() {
            let t = &self.action[a as usize];
            for j in 0..n {
                for i in 0..n {
                    m[j][i] = (m[j][i] + c * t[j][i]).rem_euclid(self.orders[i] as i64);
                }
            }
        }
        m
    }

    pub fn apply(&self, m: &ActionMatrix, v: &[i64]) -> Vec<i64> {
        apply_cols(m, v, &self.orders)
    }

    pub fn act(&self, x: &Z0RElem, v: &[i64]) -> Vec<i64> {
        self.apply(&self.action_of(x), v)
    }

    pub fn order(&self) -> u128 {
        subgroup_order(&self.orders, &self.gens)
    }

    pub fn is_zero(&self) -> bool {
        self.order() == 1
    }

    /// Checks `⟨1⟩ = id`, `⟨0⟩ = 0` and `⟨a⟩⟨b⟩ = ⟨ab⟩` on the generators for the given pairs.
    pub fn check_action(&self, pairs: &[(u64, u64)]) -> bool {
        let r = &self.ring;
        let ok_unit = self.gens.iter().all(|g| self.apply(&self.action[1 % r.modulus as usize], g) == *g);
        let ok_zero = self.gens.iter().all(|g| self.apply(&self.action[0], g).iter().all(|&x| x == 0));
        let ok_mul = pairs.iter().all(|&(a, b)| {
            let ab = r.mul(a, b) as usize;
            self.gens.iter().all(|g| {
                let lhs = self.apply(&self.action[a as usize], &self.apply(&self.action[b as usize], g));
                lhs == self.apply(&self.action[ab], g)
            })
        });
        ok_unit && ok_zero && ok_mul
    }

    /// Whether `σ⁻¹M = 0`, decided by the chain `M ⊇ σM ⊇ σ²M ⊇ …`.
    pub fn localization_vanishes(&self, sigma: &Z0RElem) -> bool {
        let m = self.action_of(sigma);
        let mut gens = self.gens.clone();
        let mut ord = subgroup_order(&self.orders, &gens);
        loop {
            if ord == 1 {
                return true;
            }
            gens = gens.iter().map(|g| self.apply(&m, g)).collect();
            let next = subgroup_order(&self.orders, &gens);
            if next == ord {
                return false;
            }
            ord = next;
        }
    }

    /// Whether `σ^k x = 0` for some `k`.
    pub fn radical_annihilator_member(&self, x: &[i64], sigma: &Z0RElem) -> bool {
        let m = self.action_of(sigma);
        let mut seen = std::collections::HashSet::new();
        let mut v = self.normalized(x.to_vec());
        loop {
            if v.iter().all(|&c| c == 0) {
                return true;
            }
            if !seen.insert(v.clone()) {
                return false;
            }
            v = self.apply(&m, &v);
        }
    }

    /// Quotient by the submodule generated by `rels`.
    pub fn quotient(&self, rels: &[Vec<i64>]) -> Result<FinZ0RModule> {
        let n = self.rank();
        let mut lat = Lattice::with_relations(&self.orders, &[]);
        let mut queue: Vec<Vec<i64>> = rels.iter().map(|v| self.normalized(v.clone())).collect();
        while let Some(v) = queue.pop() {
            if lat.contains(&v) {
                continue;
            }
            lat.insert(&v);
            for t in &self.action {
                queue.push(self.apply(t, &v));
            }
        }
        let basis: Vec<Vec<i64>> = lat
            .basis()
            .iter()
            .map(|row| row.iter().map(|x| x.to_i64().unwrap()).collect())
            .collect();
        let rel = IntMatrix::from_cols_i64(n, &basis);
        FinZ0RModule::from_relations(&self.ring, &rel, &self.action)
    }
}

/// Outcome of a randomized quasi-linearity probe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub trials: usize,
    pub passed: usize,
    pub resampled: usize,
    pub pass: bool,
}

/// Draws a length-`m` sequence whose partial sums all satisfy `accept`,
/// retrying up to 1000 times.
pub fn sample_sequence<G: rand::Rng>(
    r: &Ring,
    m: usize,
    rng: &mut G,
    accept: &dyn Fn(&[u64]) -> bool,
) -> Option<(Vec<u64>, usize)> {
    for attempt in 0..1000 {
        let a: Vec<u64> = (0..m).map(|_| rng.gen_range(0..r.modulus)).collect();
        if accept(&a) {
            return Some((a, attempt));
        }
    }
    None
}

/// For `trials` random `a` of length `m`, tests `(s_p(a) − ⟨p(0)⟩)⁻¹M = 0`.
pub fn quasilinear_probe(
    module: &FinZ0RModule,
    p: &PolyR,
    m: usize,
    trials: usize,
    seed: u64,
) -> ProbeReport {
    let r = &module.ring;
    let p0 = Z0RElem::basis(p.eval(0, r));
    let outcomes: Vec<(bool, usize)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            let (a, retries) = sample_sequence(r, m, &mut rng, &|_| true).expect("sequence");
            let sigma = s_poly(&a, p, r).sub(&p0);
            (module.localization_vanishes(&sigma), retries)
        })
        .collect();
    let passed = outcomes.iter().filter(|o| o.0).count();
    ProbeReport {
        trials,
        passed,
        resampled: outcomes.iter().map(|o| o.1).sum(),
        pass: passed == trials,
    }
}
