//! Randomized and exhaustive verification suites shared by the acceptance run
//! and the command-line tool.

use crate::admissible::{AdmissibleFn, IntPoly, LimitPoint};
use crate::complexes::{build_skew_complex, build_u_complex, check_aux};
use crate::error::Result;
use crate::gamma::endgame_limit_check;
use crate::grouphomology::{bar_homology, GModule};
use crate::intmatrix::{smith_normal_form, IntMatrix};
use crate::matrix::{det, pfaffian, RingMatrix};
use crate::module::FinZ0RModule;
use crate::monoidring::{multlin_verify, phi_t, s_poly, PolyR, Z0RElem};
use crate::mwk::{milnor_k, milnor_surjection, milnor_witt_k, product_well_defined, TensorMode};
use crate::ring::Ring;
use crate::rng::trial_rng;
use crate::sphomology::{
    conjugation_trivial, d1_shapiro_square, relative_quasilinearity_check, sp_group, stable_surjection_check,
    vindep_check, RelativeDecomposition, ShapiroSetup,
};
use crate::unimodular::{
    enumerate_skew_plus, gram, is_nondeg_unimodular, is_normal_form, normal_form, orbit_count,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

/// One suite's outcome. `pass` is `None` for report-only suites.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub suite: String,
    pub params: Value,
    pub result: Value,
    pub pass: Option<bool>,
}

impl SuiteOutcome {
    fn new(suite: &str, params: Value, result: Value, pass: bool) -> Self {
        SuiteOutcome { suite: suite.into(), params, result, pass: Some(pass) }
    }

    fn report(suite: &str, params: Value, result: Value) -> Self {
        SuiteOutcome { suite: suite.into(), params, result, pass: None }
    }

    pub fn passed(&self) -> bool {
        self.pass != Some(false)
    }
}

/// Polynomial of exact degree `d` with uniform coefficients.
pub fn random_poly<G: Rng>(r: &Ring, d: usize, rng: &mut G) -> PolyR {
    let mut c: Vec<u64> = (0..=d).map(|_| rng.gen_range(0..r.modulus)).collect();
    c[d] = rng.gen_range(1..r.modulus);
    PolyR::from_canonical(c)
}

fn random_vec<G: Rng>(r: &Ring, m: usize, rng: &mut G) -> Vec<u64> {
    (0..m).map(|_| rng.gen_range(0..r.modulus)).collect()
}

fn random_unit<G: Rng>(r: &Ring, rng: &mut G) -> u64 {
    loop {
        let x = rng.gen_range(1..r.modulus);
        if r.is_unit(x) {
            return x;
        }
    }
}

fn count_failures(trials: usize, f: impl Fn(usize) -> Result<bool> + Sync) -> Result<usize> {
    let outcomes: Vec<Result<bool>> = (0..trials).into_par_iter().map(&f).collect();
    let mut failures = 0;
    for o in outcomes {
        if !o? {
            failures += 1;
        }
    }
    Ok(failures)
}

/// Alternating-sum identity for multilinear maps, `Σ deg pᵢ < m ≤ 7`.
pub fn multlin_suite(r: &Ring, trials: usize, seed: u64) -> Result<SuiteOutcome> {
    let failures = count_failures(trials, |i| {
        let mut rng = trial_rng(seed, i as u64);
        let m = rng.gen_range(1..=7usize);
        let t = rng.gen_range(1..=3usize);
        let degs: Vec<usize> = loop {
            let d: Vec<usize> = (0..t).map(|_| rng.gen_range(0..m)).collect();
            if d.iter().sum::<usize>() < m {
                break d;
            }
        };
        let polys: Vec<PolyR> = degs.iter().map(|&d| random_poly(r, d, &mut rng)).collect();
        let x = random_vec(r, m, &mut rng);
        multlin_verify(&x, &polys, r)
    })?;
    Ok(SuiteOutcome::new(
        "multlin",
        json!({"ring": r.to_string(), "trials": trials, "seed": seed}),
        json!({"failures": failures}),
        failures == 0,
    ))
}

/// `φ_t(s_p(a) − ⟨p(0)⟩) = 0` for `1 ≤ t·deg p < m ≤ 7`, `deg p ≤ 3`.
pub fn ffitpa_suite(r: &Ring, trials: usize, seed: u64) -> Result<SuiteOutcome> {
    let failures = count_failures(trials, |i| {
        let mut rng = trial_rng(seed, i as u64);
        let m = rng.gen_range(2..=7usize);
        let d = rng.gen_range(1..=3.min(m - 1));
        let t = rng.gen_range(1..=(m - 1) / d) as u32;
        let p = random_poly(r, d, &mut rng);
        let a = random_vec(r, m, &mut rng);
        let sigma = s_poly(&a, &p, r).sub(&Z0RElem::basis(p.eval(0, r)));
        Ok(phi_t(&sigma, t, r) == 0)
    })?;
    Ok(SuiteOutcome::new(
        "ffitpa",
        json!({"ring": r.to_string(), "trials": trials, "seed": seed}),
        json!({"failures": failures}),
        failures == 0,
    ))
}

/// Random skew matrix of size `k`.
pub fn random_skew<G: Rng>(r: &Ring, k: usize, rng: &mut G) -> RingMatrix {
    let mut a = RingMatrix::zeros(k, k);
    for i in 0..k {
        for j in i + 1..k {
            let x = rng.gen_range(0..r.modulus);
            a.set(i, j, x);
            a.set(j, i, r.neg(x));
        }
    }
    a
}

/// `Pf(A)² = det A` on random skew matrices of even size `≤ 8`.
pub fn pfaffian_suite(r: &Ring, trials: usize, seed: u64) -> Result<SuiteOutcome> {
    let failures = count_failures(trials, |i| {
        let mut rng = trial_rng(seed, i as u64);
        let k = 2 * rng.gen_range(0..=4usize);
        let a = random_skew(r, k, &mut rng);
        let pf = pfaffian(&a, r)?;
        Ok(r.mul(pf, pf) == det(&a, r)?)
    })?;
    Ok(SuiteOutcome::new(
        "pfaffian",
        json!({"ring": r.to_string(), "trials": trials, "seed": seed}),
        json!({"failures": failures}),
        failures == 0,
    ))
}

fn snf_ok(m: &IntMatrix) -> bool {
    let s = smith_normal_form(m);
    let (rows, cols) = (m.rows, m.cols);
    let recomposed = s.u.mul(m).mul(&s.v);
    let diagonal = (0..rows).all(|i| (0..cols).all(|j| i == j || s.d.get(i, j).is_zero()));
    let diag = s.diagonal();
    let nonneg = diag.iter().all(|x| *x >= BigInt::zero());
    let chain = diag.windows(2).all(|w| w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])));
    let unimodular = s.u.mul(&s.u_inv) == IntMatrix::identity(rows) && s.v.mul(&s.v_inv) == IntMatrix::identity(cols);
    let unit_det = s.u.det().abs().is_one() && s.v.det().abs().is_one();
    recomposed == s.d && diagonal && nonneg && chain && unimodular && unit_det
}

/// Smith normal form: `U·M·V = D`, divisibility chain, unimodular transforms.
pub fn snf_suite(trials: usize, seed: u64) -> Result<SuiteOutcome> {
    let failures = count_failures(trials, |i| {
        let mut rng = trial_rng(seed, i as u64);
        let rows = rng.gen_range(1..=6usize);
        let cols = rng.gen_range(1..=6usize);
        let data: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        Ok(snf_ok(&IntMatrix::from_rows_i64(&data)))
    })?;
    Ok(SuiteOutcome::new(
        "snf",
        json!({"trials": trials, "seed": seed}),
        json!({"failures": failures}),
        failures == 0,
    ))
}

/// Endgame limit `lim_{t→∞} det M(U(1),(1,t)) = ⟨(ac)⁻¹⟩²` for random unit triples.
pub fn endgame_suite(r: &Ring, trials: usize, seed: u64) -> Result<SuiteOutcome> {
    let failures = count_failures(trials, |i| {
        let mut rng = trial_rng(seed, i as u64);
        let (a, b, c) = (random_unit(r, &mut rng), random_unit(r, &mut rng), random_unit(r, &mut rng));
        let inv = Z0RElem::basis(r.inv(r.mul(a, c))?);
        Ok(endgame_limit_check(a, b, c, r)? == inv.mul(&inv, r))
    })?;
    Ok(SuiteOutcome::new(
        "endgame",
        json!({"ring": r.to_string(), "trials": trials, "seed": seed}),
        json!({"failures": failures}),
        failures == 0,
    ))
}

/// Limits of random admissible functions: `lim_∞ ⟨P/Q⟩ = ⟨p_d q_d⁻¹⟩` with
/// `d = deg Q`, multiplicativity of limits, and `lim_t = eval_t` where defined.
pub fn admissible_suite(r: &Ring, trials: usize, seed: u64) -> Result<SuiteOutcome> {
    let failures = count_failures(trials, |i| {
        let mut rng = trial_rng(seed, i as u64);
        let pair = |rng: &mut rand_chacha::ChaCha8Rng| {
            let dq = rng.gen_range(0..=3usize);
            let mut q = random_poly(r, dq, rng);
            let mut c = q.coeffs().to_vec();
            c[dq] = random_unit(r, rng);
            q = PolyR::from_canonical(c);
            let dp = rng.gen_range(0..=dq);
            (random_poly(r, dp, rng), q)
        };
        let (p1, q1) = pair(&mut rng);
        let (p2, q2) = pair(&mut rng);
        let f = AdmissibleFn::single(p1.clone(), q1.clone(), r);
        let g = AdmissibleFn::single(p2.clone(), q2.clone(), r);
        let lead = |p: &PolyR, q: &PolyR| -> Result<Z0RElem> {
            Ok(Z0RElem::basis(r.mul(p.coeff(q.degree()), r.inv(q.leading())?)))
        };
        let lf = f.limit(LimitPoint::Infinity, r)?;
        let lg = g.limit(LimitPoint::Infinity, r)?;
        let product = AdmissibleFn::new(
            IntPoly::var(2, 0).mul(&IntPoly::var(2, 1)),
            vec![(p1.clone(), q1.clone()), (p2.clone(), q2.clone())],
            r,
        );
        let mut ok = lf == lead(&p1, &q1)? && lg == lead(&p2, &q2)?;
        ok &= product.limit(LimitPoint::Infinity, r)? == lf.mul(&lg, r);
        for t in r.elements() {
            if f.is_defined_at(t, r) {
                ok &= f.limit(LimitPoint::At(t), r)? == f.eval(t, r)?;
            }
        }
        Ok(ok)
    })?;
    Ok(SuiteOutcome::new(
        "admissible_limits",
        json!({"ring": r.to_string(), "trials": trials, "seed": seed}),
        json!({"failures": failures}),
        failures == 0,
    ))
}

/// `Γ(normal_form(A)) = A` and the normal-form clauses for every `A ∈ Skew⁺_q`, `q ≤ q_max`.
pub fn normal_form_suite(r: &Ring, n: usize, q_max: usize) -> Result<SuiteOutcome> {
    let mut checked = Vec::new();
    let mut failures = 0;
    for q in 0..=q_max {
        let skews = enumerate_skew_plus(q, r, crate::group::DEFAULT_CAP)?;
        let bad: Vec<bool> = skews
            .par_iter()
            .map(|a| match normal_form(a, n, r) {
                Ok(u) => !(gram(&u, r) == *a && is_normal_form(&u, r) && is_nondeg_unimodular(&u, r)),
                Err(_) => true,
            })
            .collect();
        failures += bad.iter().filter(|&&b| b).count();
        checked.push(skews.len());
    }
    Ok(SuiteOutcome::new(
        "normal_form",
        json!({"ring": r.to_string(), "n": n, "q_max": q_max}),
        json!({"checked": checked, "failures": failures}),
        failures == 0,
    ))
}

/// Orbit counts of `Sp_{2n}(R)` on `U_q(R^{2n})` against `|Skew⁺_q(R)|`, one outcome per `q`.
pub fn orbit_suite(r: &Ring, n: usize, q_max: usize) -> Result<Vec<SuiteOutcome>> {
    (1..=q_max)
        .map(|q| {
            let (orbits, skew) = orbit_count(q, n, r)?;
            Ok(SuiteOutcome::new(
                "orbits",
                json!({"ring": r.to_string(), "n": n, "q": q}),
                json!({"orbits": orbits, "skew_plus": skew}),
                orbits == skew,
            ))
        })
        .collect()
}

/// `d∘d = 0` on `Z[U_{≤q}(R^{2n})]`.
pub fn u_complex_suite(r: &Ring, n: usize, q_max: usize, with_homology: bool) -> Result<Vec<SuiteOutcome>> {
    let c = build_u_complex(r, n, q_max)?;
    let params = json!({"ring": r.to_string(), "n": n, "q_max": q_max});
    let mut out = vec![SuiteOutcome::new(
        "u_complex_d_squared",
        params.clone(),
        json!({"dims": c.complex.dims}),
        c.check_d_squared().is_ok(),
    )];
    if with_homology {
        let h: Vec<String> = c.homology()?.iter().map(|g| g.to_string()).collect();
        out.push(SuiteOutcome::report("u_complex_homology", params, json!({"homology": h})));
    }
    Ok(out)
}

/// `d∘d = 0` on `Z[Skew⁺_{≤q}(R)]`.
pub fn skew_complex_suite(r: &Ring, q_max: usize, with_homology: bool) -> Result<Vec<SuiteOutcome>> {
    let c = build_skew_complex(r, q_max)?;
    let params = json!({"ring": r.to_string(), "q_max": q_max});
    let mut out = vec![SuiteOutcome::new(
        "skew_complex_d_squared",
        params.clone(),
        json!({"dims": c.complex.dims}),
        c.check_d_squared().is_ok(),
    )];
    if with_homology {
        let h: Vec<String> = c.homology()?.iter().map(|g| g.to_string()).collect();
        out.push(SuiteOutcome::report("skew_complex_homology", params, json!({"homology": h})));
    }
    Ok(out)
}

/// `C_*(R^{2n}; r)` and its chain map to `Z[U_*(R^{2n})]` for every `r ≤ n`.
pub fn aux_suite(ring: &Ring, n: usize) -> Result<SuiteOutcome> {
    let mut rows = Vec::new();
    let mut pass = true;
    for r in 0..=n {
        let c = check_aux(ring, n, r)?;
        pass &= c.pass();
        rows.push(serde_json::to_value(&c).expect("serializable"));
    }
    Ok(SuiteOutcome::new("aux_complex", json!({"ring": ring.to_string(), "n": n}), Value::Array(rows), pass))
}

/// `H_p(SL₂(F); Z[U₁(F²)])` against `H_p` of the stabilizer of `e₁`.
pub fn shapiro_suite(r: &Ring, p_max: usize) -> Result<SuiteOutcome> {
    let s = ShapiroSetup::new(r, 1, 1, p_max)?;
    let rep = crate::sphomology::e1_identification(&s)?;
    let show = |v: &[crate::abelian::FGAbelianGroup]| v.iter().map(|g| g.to_string()).collect::<Vec<_>>();
    Ok(SuiteOutcome::new(
        "shapiro",
        json!({"ring": r.to_string(), "n": 1, "q": 1, "p_max": p_max}),
        json!({
            "coefficients": show(&rep.coefficients),
            "stabilizer": show(&rep.stabilizers),
            "stabilizer_is_small_group": rep.stabilizer_is_small_group,
            "f_onto": rep.f_onto,
        }),
        rep.pass,
    ))
}

pub fn d1_suite(r: &Ring, p_max: usize) -> Result<SuiteOutcome> {
    let rep = d1_shapiro_square(r, p_max)?;
    Ok(SuiteOutcome::new(
        "d1_square",
        json!({"ring": r.to_string(), "n": 1, "p_max": p_max}),
        serde_json::to_value(&rep).expect("serializable"),
        rep.pass,
    ))
}

pub fn vindep_suite(r: &Ring, p_max: usize) -> Result<SuiteOutcome> {
    let s = ShapiroSetup::new(r, 1, 1, p_max)?;
    let rep = vindep_check(&s)?;
    Ok(SuiteOutcome::new(
        "vindep",
        json!({"ring": r.to_string(), "n": 1, "q": 1, "p_max": p_max}),
        serde_json::to_value(&rep).expect("serializable"),
        rep.pass,
    ))
}

/// `(c_a)_* = 1` on `H_p(Sp₂(R); Z)`.
pub fn conjugation_suite(r: &Ring, p_max: usize) -> Result<SuiteOutcome> {
    let g = sp_group(2, r)?;
    let h = bar_homology(&g, &GModule::trivial(&g), p_max)?;
    let ok = conjugation_trivial(&g, &h, r)?;
    Ok(SuiteOutcome::new("conjugation", json!({"ring": r.to_string(), "p_max": p_max}), json!({}), ok))
}

/// The decomposition of `H_p(Sp_{2n+1})`, monoid functoriality, random
/// quasi-linearity probes and the stable map to `H_p(Sp_{2n+2})`.
pub fn relative_suite(r: &Ring, n: usize, p: usize, m: usize, trials: usize, seed: u64) -> Result<Vec<SuiteOutcome>> {
    let d = RelativeDecomposition::new(r, n, p)?;
    let params = json!({"ring": r.to_string(), "n": n, "p": p});
    let mut out = Vec::new();
    let mut summaries = Vec::new();
    let mut idempotent = true;
    for q in 0..=p {
        let s = d.summary(q);
        idempotent &= s.idempotent && (q > 0 || s.tilde.is_trivial());
        summaries.push(json!({
            "p": q,
            "h_odd": s.h_odd.to_string(),
            "h_even": s.h_even.to_string(),
            "image": s.image.to_string(),
            "tilde": s.tilde.to_string(),
            "idempotent": s.idempotent,
        }));
    }
    out.push(SuiteOutcome::new("relative_decomposition", params.clone(), Value::Array(summaries), idempotent));
    let functorial = d.monoid_functorial(p)?;
    out.push(SuiteOutcome::new("monoid_functoriality", params.clone(), json!({}), functorial));
    let rep = relative_quasilinearity_check(&d, p, &PolyR::x(), m, trials, seed)?;
    let module: FinZ0RModule = d.tilde_module(p)?;
    out.push(SuiteOutcome::new(
        "relative_quasilinearity",
        json!({"ring": r.to_string(), "n": n, "p": p, "poly": "X", "m": m, "trials": trials, "seed": seed}),
        json!({
            "module_order": module.order().to_string(),
            "bound_holds": rep.bound_holds,
            "passed": rep.probe.passed,
            "trials": rep.probe.trials,
        }),
        rep.pass,
    ));
    let st = stable_surjection_check(&d, p)?;
    out.push(SuiteOutcome::new(
        "stable_surjection",
        params,
        json!({"target": st.target.to_string(), "composite_zero": st.composite_zero, "block_form": st.block_form}),
        st.pass(),
    ));
    Ok(out)
}

/// Milnor K-groups of the residue field up to degree `n_max`, the Milnor-Witt
/// groups in both modes (report only) and the structural checks on them.
pub fn mwk_suite(r: &Ring, n_max: usize) -> Result<Vec<SuiteOutcome>> {
    let params = json!({"ring": r.to_string(), "n_max": n_max});
    let milnor: Vec<String> = (0..=n_max).map(|n| milnor_k(r, n).map(|g| g.to_string())).collect::<Result<_>>()?;
    let mut out = vec![SuiteOutcome::report("milnor_k", params.clone(), json!({"groups": milnor}))];
    let (mut defined, mut onto, mut products) = (true, true, true);
    let mut modes = serde_json::Map::new();
    for mode in [TensorMode::Integers, TensorMode::GroupRing] {
        let groups: Vec<String> =
            (1..=n_max).map(|n| milnor_witt_k(r, n, mode).map(|g| g.to_string())).collect::<Result<_>>()?;
        modes.insert(format!("{mode:?}"), json!(groups));
        for n in 1..=n_max {
            let s = milnor_surjection(r, n, mode)?;
            defined &= s.well_defined;
            onto &= s.onto;
            if n < n_max {
                products &= product_well_defined(r, 1, n, mode)? && product_well_defined(r, n, 1, mode)?;
            }
        }
    }
    out.push(SuiteOutcome::report("milnor_witt_k", params.clone(), Value::Object(modes)));
    let result = json!({"surjection_well_defined": defined, "surjection_onto": onto, "products_well_defined": products});
    out.push(SuiteOutcome::new("mwk_structure", params, result, defined && onto && products));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_suites_small() {
        let r = Ring::parse("3^2").unwrap();
        for s in [
            multlin_suite(&r, 50, 1).unwrap(),
            ffitpa_suite(&r, 50, 1).unwrap(),
            pfaffian_suite(&r, 50, 1).unwrap(),
            snf_suite(50, 1).unwrap(),
            endgame_suite(&Ring::parse("5").unwrap(), 10, 1).unwrap(),
            admissible_suite(&r, 50, 1).unwrap(),
        ] {
            assert_eq!(s.pass, Some(true), "{}", s.suite);
        }
    }

    #[test]
    fn suites_are_deterministic() {
        let r = Ring::parse("7").unwrap();
        let a = serde_json::to_string(&ffitpa_suite(&r, 30, 9).unwrap()).unwrap();
        let b = serde_json::to_string(&ffitpa_suite(&r, 30, 9).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn small_structural_suites() {
        let r = Ring::prime_field(3).unwrap();
        assert!(normal_form_suite(&r, 1, 3).unwrap().passed());
        assert!(orbit_suite(&r, 1, 2).unwrap().iter().all(|s| s.passed()));
        assert!(aux_suite(&r, 1).unwrap().passed());
        assert!(mwk_suite(&r, 2).unwrap().iter().all(|s| s.passed()));
    }
}
