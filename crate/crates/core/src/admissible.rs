//! Admissible functions `t ↦ P(⟨P₁(t)/Q₁(t)⟩, …, ⟨P_n(t)/Q_n(t)⟩)` and their limits.

use crate::error::{Error, Result};
use crate::monoidring::{PolyR, Z0RElem};
use crate::ring::Ring;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Integer polynomial in `nvars` commuting variables, keyed by exponent vectors.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct IntPoly {
    pub nvars: usize,
    terms: BTreeMap<Vec<u32>, i64>,
}

impl IntPoly {
    pub fn zero(nvars: usize) -> Self {
        IntPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: i64) -> Self {
        IntPoly::from_terms(nvars, [(vec![0; nvars], c)])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        IntPoly::from_terms(nvars, [(e, 1)])
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<u32>, i64)>>(nvars: usize, terms: I) -> Self {
        let mut p = IntPoly::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: i64) {
        assert_eq!(e.len(), self.nvars);
        if c == 0 {
            return;
        }
        let v = self.terms.entry(e.clone()).or_insert(0);
        *v = v.checked_add(c).expect("coefficient overflow");
        if *v == 0 {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, i64)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &IntPoly) -> IntPoly {
        let mut p = self.clone();
        for (e, c) in o.terms() {
            p.add_term(e.clone(), c);
        }
        p
    }

    pub fn scale(&self, k: i64) -> IntPoly {
        IntPoly::from_terms(self.nvars, self.terms().map(|(e, c)| (e.clone(), c * k)))
    }

    pub fn mul(&self, o: &IntPoly) -> IntPoly {
        let mut p = IntPoly::zero(self.nvars);
        for (e, c) in self.terms() {
            for (f, d) in o.terms() {
                let g = e.iter().zip(f).map(|(a, b)| a + b).collect();
                p.add_term(g, c.checked_mul(d).expect("coefficient overflow"));
            }
        }
        p
    }

    /// Substitutes `⟨x_i⟩` for the variables: a monomial becomes `⟨Π x_i^{e_i}⟩`.
    pub fn eval_basis(&self, xs: &[u64], r: &Ring) -> Z0RElem {
        Z0RElem::from_terms(self.terms().map(|(e, c)| {
            let v = e.iter().zip(xs).fold(1u64, |acc, (&k, &x)| r.mul(acc, r.pow(x, k as u64)));
            (v, c)
        }))
    }

    /// Determinant by first-row cofactor expansion of a square matrix of polynomials.
    pub fn det(m: &[Vec<IntPoly>], nvars: usize) -> IntPoly {
        let n = m.len();
        if n == 0 {
            return IntPoly::constant(nvars, 1);
        }
        let cols: Vec<usize> = (0..n).collect();
        det_rec(m, 0, &cols, nvars)
    }
}

fn det_rec(m: &[Vec<IntPoly>], row: usize, cols: &[usize], nvars: usize) -> IntPoly {
    if cols.is_empty() {
        return IntPoly::constant(nvars, 1);
    }
    let mut acc = IntPoly::zero(nvars);
    for (k, &c) in cols.iter().enumerate() {
        if m[row][c].is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = det_rec(m, row + 1, &rest, nvars);
        let term = m[row][c].mul(&minor);
        acc = acc.add(&if k % 2 == 0 { term } else { term.scale(-1) });
    }
    acc
}

/// Point at which a limit is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitPoint {
    At(u64),
    Infinity,
}

/// An admissible function with its presentation `(P, (P_i, Q_i))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibleFn {
    pub p: IntPoly,
    pub pairs: Vec<(PolyR, PolyR)>,
    /// Residues `t̄` at which some `Q_i(t)` is not a unit.
    pub domain_excluded: Vec<u64>,
}

impl AdmissibleFn {
    pub fn new(p: IntPoly, pairs: Vec<(PolyR, PolyR)>, r: &Ring) -> Self {
        assert_eq!(p.nvars, pairs.len());
        let field = Ring::prime_field(r.p).expect("residue field");
        let domain_excluded = field
            .elements()
            .filter(|&t| pairs.iter().any(|(_, q)| !r.is_unit(q.eval(t, r))))
            .collect();
        AdmissibleFn { p, pairs, domain_excluded }
    }

    /// `⟨P₁/Q₁⟩`.
    pub fn single(p1: PolyR, q1: PolyR, r: &Ring) -> Self {
        AdmissibleFn::new(IntPoly::var(1, 0), vec![(p1, q1)], r)
    }

    pub fn is_defined_at(&self, t: u64, r: &Ring) -> bool {
        self.pairs.iter().all(|(_, q)| r.is_unit(q.eval(t, r)))
    }

    pub fn eval(&self, t: u64, r: &Ring) -> Result<Z0RElem> {
        let mut xs = Vec::with_capacity(self.pairs.len());
        for (i, (p, q)) in self.pairs.iter().enumerate() {
            let qv = q.eval(t, r);
            if !r.is_unit(qv) {
                return Err(Error::NotDefinedAt(i + 1));
            }
            xs.push(r.mul(p.eval(t, r), r.inv(qv)?));
        }
        Ok(self.p.eval_basis(&xs, r))
    }

    pub fn limit(&self, a: LimitPoint, r: &Ring) -> Result<Z0RElem> {
        match a {
            LimitPoint::At(t) => self.eval(t, r).map_err(|e| match e {
                Error::NotDefinedAt(i) => {
                    Error::LimitUndefined(format!("denominator {i} is not a unit at {t}"))
                }
                other => other,
            }),
            LimitPoint::Infinity => {
                let mut xs = Vec::with_capacity(self.pairs.len());
                for (i, (p, q)) in self.pairs.iter().enumerate() {
                    let d = q.degree();
                    if !p.is_zero() && p.degree() > d {
                        return Err(Error::LimitUndefined(format!(
                            "deg P_{} = {} exceeds deg Q_{} = {}",
                            i + 1,
                            p.degree(),
                            i + 1,
                            d
                        )));
                    }
                    if !r.is_unit(q.leading()) {
                        return Err(Error::LimitUndefined(format!(
                            "leading coefficient of Q_{} is not a unit",
                            i + 1
                        )));
                    }
                    let (pb, qb) = (p.reversed(d), q.reversed(d));
                    xs.push(r.mul(pb.eval(0, r), r.inv(qb.eval(0, r))?));
                }
                Ok(self.p.eval_basis(&xs, r))
            }
        }
    }
}

pub fn eval_admissible(f: &AdmissibleFn, t: u64, r: &Ring) -> Result<Z0RElem> {
    f.eval(t, r)
}

pub fn limit_admissible(f: &AdmissibleFn, a: LimitPoint, r: &Ring) -> Result<Z0RElem> {
    f.limit(a, r)
}

/// Side-by-side limits of two presentations; makes no claim about either.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationComparison {
    pub agree_on_common_domain: bool,
    pub limit_f: std::result::Result<Z0RElem, String>,
    pub limit_g: std::result::Result<Z0RElem, String>,
    pub limits_equal: bool,
}

pub fn compare_presentations(
    f: &AdmissibleFn,
    g: &AdmissibleFn,
    a: LimitPoint,
    r: &Ring,
) -> PresentationComparison {
    let agree = r
        .elements()
        .filter(|&t| f.is_defined_at(t, r) && g.is_defined_at(t, r))
        .all(|t| f.eval(t, r).ok() == g.eval(t, r).ok());
    let lf = f.limit(a, r).map_err(|e| e.to_string());
    let lg = g.limit(a, r).map_err(|e| e.to_string());
    let eq = matches!((&lf, &lg), (Ok(x), Ok(y)) if x == y);
    PresentationComparison { agree_on_common_domain: agree, limit_f: lf, limit_g: lg, limits_equal: eq }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Ring {
        Ring::prime_field(5).unwrap()
    }

    /// `1 − ⟨t⟩`.
    fn one_minus_t(r: &Ring) -> AdmissibleFn {
        let p = IntPoly::constant(1, 1).add(&IntPoly::var(1, 0).scale(-1));
        AdmissibleFn::new(p, vec![(PolyR::x(), PolyR::constant(1))], r)
    }

    #[test]
    fn evaluation() {
        let r = f5();
        let f = one_minus_t(&r);
        assert_eq!(f.eval(2, &r).unwrap(), Z0RElem::from_terms([(1, 1), (2, -1)]));
        let g = AdmissibleFn::single(PolyR::constant(1), PolyR::x(), &r);
        assert_eq!(g.eval(0, &r), Err(Error::NotDefinedAt(1)));
        assert_eq!(g.domain_excluded, vec![0]);
        let sq = AdmissibleFn::new(
            IntPoly::var(1, 0).mul(&IntPoly::var(1, 0)),
            vec![(PolyR::new(&r, &[1, 1]), PolyR::constant(1))],
            &r,
        );
        assert_eq!(sq.eval(1, &r).unwrap(), Z0RElem::basis(4));
    }

    #[test]
    fn limits() {
        let r = f5();
        assert_eq!(one_minus_t(&r).limit(LimitPoint::At(0), &r).unwrap(), Z0RElem::one());
        // (2t+1)/(3t+4) → 2·3⁻¹ = 4
        let f = AdmissibleFn::single(PolyR::new(&r, &[1, 2]), PolyR::new(&r, &[4, 3]), &r);
        assert_eq!(f.limit(LimitPoint::Infinity, &r).unwrap(), Z0RElem::basis(4));
        let t = AdmissibleFn::single(PolyR::x(), PolyR::constant(1), &r);
        assert!(matches!(t.limit(LimitPoint::Infinity, &r), Err(Error::LimitUndefined(_))));
        // t-dependent numerator over a higher-degree denominator tends to ⟨0⟩ = 0
        let g = AdmissibleFn::single(PolyR::constant(1), PolyR::x(), &r);
        assert!(g.limit(LimitPoint::Infinity, &r).unwrap().is_zero());
    }

    #[test]
    fn determinant() {
        let x = |i| IntPoly::var(4, i);
        let m = vec![vec![x(0), x(1)], vec![x(2), x(3)]];
        let d = IntPoly::det(&m, 4);
        let expect = x(0).mul(&x(3)).add(&x(1).mul(&x(2)).scale(-1));
        assert_eq!(d, expect);
    }
}
