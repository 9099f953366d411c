//! Bases of the supersymmetric subalgebra SS_r: sums of idempotents over
//! equivalence classes, symmetrized special idempotents, and an independent
//! recomputation of SS_r as a nullspace over F_p.

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::canonical::counts::count_canonical_total;
use crate::canonical::{canonicalize, enumerate_classes, is_ordinary, is_partition, CanonicalLabel, EquivClass};
use crate::error::{Error, Result};
use crate::idempotents::{idempotent_h, to_idempotent_basis};
use crate::json::serialize_big;
use crate::linalg::{nullspace, rank, span_equal};
use crate::modp::binomial;
use crate::supersymmetry::{is_bad_label, is_supersymmetric, phi, symmetrize};
use crate::torus::{Basis, ExponentVector, TorusElement, TorusSpec, Var};

/// The sum of `h` over the class of a canonical label.
pub fn class_sum(canonical: &CanonicalLabel, spec: &TorusSpec) -> Result<TorusElement> {
    let class = crate::canonical::enumerate_equivalence_class(canonical, spec)?;
    Ok(class_element(&class, spec))
}

fn class_element(class: &EquivClass, spec: &TorusSpec) -> TorusElement {
    TorusElement::from_terms(spec, Basis::Idempotent, class.members.iter().map(|ev| (ev.clone(), 1)))
        .expect("class members are valid labels")
}

/// The symmetrized idempotent of a special label.
pub fn build_special(ev: &ExponentVector, spec: &TorusSpec) -> Result<TorusElement> {
    spec.validate(ev)?;
    if is_ordinary(ev, spec) {
        return Err(Error::Ordinary(ev.to_string()));
    }
    symmetrize(spec, ev)
}

/// The sum of all ordinary idempotents whose label total is `a` mod `q`.
pub fn ordinary_sum(spec: &TorusSpec, a: u32) -> Result<TorusElement> {
    if a >= spec.q() {
        return Err(Error::InvalidLabel(format!("residue {a} is not below q = {}", spec.q())));
    }
    let q = u64::from(spec.q());
    let terms: Vec<_> = (0..spec.dim())
        .into_par_iter()
        .map(|i| spec.label(i))
        .filter(|ev| ev.total() % q == u64::from(a) && is_ordinary(ev, spec))
        .map(|ev| (ev, 1))
        .collect();
    TorusElement::from_terms(spec, Basis::Idempotent, terms)
}

/// The class sums over all canonical labels, in canonical-label order.
pub fn class_sum_basis(spec: &TorusSpec) -> Result<Vec<TorusElement>> {
    Ok(enumerate_classes(spec)?.iter().map(|c| class_element(c, spec)).collect())
}

/// Which divisibility conditions the oracle imposes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMode {
    /// The first even and first odd variable only.
    FirstPair,
    /// Every pair `(i, j)`.
    AllPairs,
}

/// A basis of SS_r computed from scratch. The unknowns are the idempotent
/// coordinates; the constraints are invariance under adjacent transpositions
/// and the vanishing of `phi_ij(f)` at labels where `p | a_i + b_j`, with
/// `phi_ij(h_u)` computed through the binomial basis. The result is in
/// reduced echelon form in lexicographic label order.
pub fn ss_nullspace_oracle(spec: &TorusSpec, mode: OracleMode) -> Result<Vec<TorusElement>> {
    if spec.n() == 0 {
        return Err(Error::NoOddVariables);
    }
    let dim = spec.dim() as usize;
    let p = spec.p();
    let one = 1 % p.get();
    let mut rows: Vec<Vec<u32>> = Vec::new();

    let (m, n) = (spec.m(), spec.n());
    let swaps: Vec<usize> = (0..m.saturating_sub(1)).chain(m..m + n - 1).collect();
    let mut digits = vec![0u32; spec.vars()];
    for u in 0..spec.dim() {
        spec.decode_into(u, &mut digits);
        for &s in &swaps {
            if digits[s] < digits[s + 1] {
                digits.swap(s, s + 1);
                let v = spec.encode(&digits);
                digits.swap(s, s + 1);
                let mut row = vec![0u32; dim];
                row[u as usize] = one;
                row[v as usize] = p.neg(one);
                rows.push(row);
            }
        }
    }

    let pairs: Vec<(usize, usize)> = match mode {
        OracleMode::FirstPair => vec![(0, 0)],
        OracleMode::AllPairs => (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect(),
    };
    for (i, j) in pairs {
        let (sx, sy) = (spec.slot(Var::X(i))?, spec.slot(Var::Y(j))?);
        let columns: Vec<Vec<u32>> = spec
            .labels()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|ev| -> Result<Vec<u32>> {
                let h = idempotent_h(spec, ev)?;
                Ok(to_idempotent_basis(&phi(&h, i, j)?)?.to_dense())
            })
            .collect::<Result<_>>()?;
        for w in (0..spec.dim()).filter(|&w| is_bad_label(spec, w, sx, sy)) {
            let row: Vec<u32> = columns.iter().map(|col| col[w as usize]).collect();
            if row.iter().any(|&c| c != 0) {
                rows.push(row);
            }
        }
    }

    Ok(nullspace(&rows, dim, p)
        .into_iter()
        .map(|v| TorusElement::from_dense(spec, Basis::Idempotent, &v))
        .collect())
}

/// The generators of SS_r for GL(1|1): `h_{a|b}` with `a + b` prime to `p`,
/// then `sum_i h_{i | pl - i}` for `l = 0 .. q/p - 1`.
pub fn gl11_generators(spec: &TorusSpec) -> Result<Vec<TorusElement>> {
    if (spec.m(), spec.n()) != (1, 1) {
        return Err(Error::InvalidSpec(format!("GL(1|1) generators need m = n = 1, got {spec}")));
    }
    let (p, q) = (spec.p().get(), spec.q());
    let mut out = Vec::new();
    for a in 0..q {
        for b in 0..q {
            if (a + b) % p != 0 {
                out.push(TorusElement::basis_vector(spec, Basis::Idempotent, &ExponentVector::new(vec![a], vec![b]), 1)?);
            }
        }
    }
    for l in 0..q / p {
        let terms = (0..q).map(|i| (ExponentVector::new(vec![i], vec![(p * l + q - i) % q]), 1));
        out.push(TorusElement::from_terms(spec, Basis::Idempotent, terms)?);
    }
    Ok(out)
}

/// The dimension of SS_r from the closed form for the shape of `spec`.
pub fn dim_closed_form(spec: &TorusSpec) -> BigUint {
    let q = u64::from(spec.q());
    let pp = spec.p().as_u64();
    let r = spec.r();
    let block = q / pp;
    match (spec.m(), spec.n()) {
        (1, 1) => BigUint::from(q * (q - block) + block),
        (2, 1) | (1, 2) => {
            let big = |v: u64| BigUint::from(v);
            (big(pp).pow(3 * r - 2) * big((pp - 1) * (pp - 1)) + big(pp).pow(2 * r - 1) * big(pp - 1)) / 2u32
                + big(q)
        }
        (3, 1) | (1, 3) => BigUint::from(q) * binomial(q - block + 2, 3) + q + BigUint::from(block) * binomial(pp, 2),
        (k, 1) | (1, k) => {
            let k = k as u64;
            BigUint::from(q) * binomial(q - block + k - 1, k) + BigUint::from(block) * binomial(pp + k - 2, k - 1)
        }
        _ => count_canonical_total(spec),
    }
}

/// `(m, n, p, r)` as reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SpecSummary {
    pub m: usize,
    pub n: usize,
    pub p: u32,
    pub r: u32,
}

impl From<&TorusSpec> for SpecSummary {
    fn from(s: &TorusSpec) -> Self {
        SpecSummary { m: s.m(), n: s.n(), p: s.p().get(), r: s.r() }
    }
}

/// One named verification step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Closed-form, enumerated and oracle counts for one spec, with the outcome
/// of every basis check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub spec: SpecSummary,
    #[serde(serialize_with = "serialize_big")]
    pub closed_form: BigUint,
    pub enumerated: u64,
    pub oracle_dim: u64,
    pub h_basis_ok: bool,
    pub partition_ok: bool,
    pub gl11_span_ok: Option<bool>,
    #[serde(skip)]
    pub checks: Vec<Check>,
}

impl CountReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn dense_rows(elements: &[TorusElement]) -> Vec<Vec<u32>> {
    elements.iter().map(TorusElement::to_dense).collect()
}

/// Runs every basis check for one spec.
pub fn verify_basis(spec: &TorusSpec) -> Result<CountReport> {
    let p = spec.p();
    let mut checks = Vec::new();
    let mut check = |name: &'static str, passed: bool, detail: String| {
        checks.push(Check { name, passed, detail });
        passed
    };

    let classes = enumerate_classes(spec)?;
    let enumerated = classes.len() as u64;
    let partition_ok = check("partition", is_partition(&classes, spec), "classes must cover every label exactly once".into());
    let uniqueness = classes.iter().all(|c| {
        c.members
            .iter()
            .all(|ev| canonicalize(ev, spec).map(|k| k == c.canonical).unwrap_or(false))
    });
    check("canonicalize", uniqueness, "every class member must canonicalize to its class label".into());

    let closed_form = count_canonical_total(spec);
    check(
        "closed_form",
        closed_form == BigUint::from(enumerated),
        format!("closed form {closed_form} vs {enumerated} canonical labels"),
    );
    let shape_form = dim_closed_form(spec);
    check(
        "dimension_formula",
        shape_form == closed_form,
        format!("dimension formula {shape_form} vs canonical count {closed_form}"),
    );

    let basis: Vec<TorusElement> = classes.iter().map(|c| class_element(c, spec)).collect();
    let all_ss = basis
        .par_iter()
        .map(is_supersymmetric)
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .all(|b| b);
    let ss_ok = check("supersymmetric", all_ss, "every class sum must be supersymmetric".into());
    let rows = dense_rows(&basis);
    let h_rank = rank(&rows, p);
    let independent = check(
        "independent",
        h_rank == basis.len(),
        format!("rank {h_rank} of {} class sums", basis.len()),
    );

    let oracle = ss_nullspace_oracle(spec, OracleMode::FirstPair)?;
    let oracle_dim = oracle.len() as u64;
    let oracle_rows = dense_rows(&oracle);
    let dims_ok = check(
        "oracle_dim",
        oracle_dim == enumerated,
        format!("oracle dimension {oracle_dim} vs {enumerated} class sums"),
    );
    let span_ok = check("span", span_equal(&rows, &oracle_rows, p), "class sums must span the oracle space".into());

    let gl11_span_ok = if (spec.m(), spec.n()) == (1, 1) {
        let gens = gl11_generators(spec)?;
        let gen_rows = dense_rows(&gens);
        let ok = span_equal(&gen_rows, &oracle_rows, p) && rank(&gen_rows, p) == gens.len();
        Some(check("gl11_generators", ok, format!("{} generators against the oracle span", gens.len())))
    } else {
        None
    };

    Ok(CountReport {
        spec: spec.into(),
        closed_form,
        enumerated,
        oracle_dim,
        h_basis_ok: ss_ok && independent && dims_ok && span_ok,
        partition_ok,
        gl11_span_ok,
        checks,
    })
}

/// The canonical label of every class together with its size.
pub fn class_sizes(spec: &TorusSpec) -> Result<Vec<(CanonicalLabel, usize)>> {
    Ok(enumerate_classes(spec)?.into_iter().map(|c| (c.canonical, c.members.len())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::enumerate_canonical;
    use crate::supersymmetry::is_supersymmetric_all_pairs;

    fn ev(a: &[u32], b: &[u32]) -> ExponentVector {
        ExponentVector::new(a.to_vec(), b.to_vec())
    }

    fn idem(spec: &TorusSpec, terms: &[(&[u32], &[u32])]) -> TorusElement {
        TorusElement::from_terms(spec, Basis::Idempotent, terms.iter().map(|&(a, b)| (ev(a, b), 1))).unwrap()
    }

    fn spec(m: usize, n: usize, p: u64, r: u32) -> TorusSpec {
        TorusSpec::new(m, n, p, r).unwrap()
    }

    #[test]
    fn class_sum_examples() {
        let s = spec(1, 1, 2, 1);
        let c = canonicalize(&ev(&[0], &[0]), &s).unwrap();
        assert_eq!(class_sum(&c, &s).unwrap(), idem(&s, &[(&[0], &[0]), (&[1], &[1])]));
        let s = spec(2, 1, 3, 1);
        let c = canonicalize(&ev(&[0, 1], &[0]), &s).unwrap();
        assert_eq!(class_sum(&c, &s).unwrap().len(), 5);
        let c = canonicalize(&ev(&[2, 0], &[2]), &s).unwrap();
        assert_eq!(class_sum(&c, &s).unwrap(), symmetrize(&s, &c.ev).unwrap());
    }

    #[test]
    fn special_examples() {
        let s = spec(1, 1, 2, 1);
        assert_eq!(build_special(&ev(&[1], &[0]), &s).unwrap(), idem(&s, &[(&[1], &[0])]));
        assert!(matches!(build_special(&ev(&[0], &[0]), &s), Err(Error::Ordinary(_))));
        let s = spec(2, 1, 3, 1);
        let h = build_special(&ev(&[1, 1], &[1]), &s).unwrap();
        assert_eq!(h, idem(&s, &[(&[1, 1], &[1])]));
        assert!(is_supersymmetric(&h).unwrap());
    }

    #[test]
    fn ordinary_sum_examples() {
        let s = spec(1, 1, 2, 1);
        assert_eq!(ordinary_sum(&s, 0).unwrap(), idem(&s, &[(&[0], &[0]), (&[1], &[1])]));
        assert!(ordinary_sum(&s, 1).unwrap().is_zero());
        assert!(ordinary_sum(&s, 2).is_err());
    }

    #[test]
    fn ordinary_sums_decompose_into_class_sums() {
        for s in [spec(2, 1, 3, 1), spec(2, 1, 2, 2), spec(2, 2, 2, 1), spec(3, 1, 2, 1)] {
            let q = u64::from(s.q());
            let mut total = TorusElement::zero_in(&s, Basis::Idempotent);
            for a in 0..s.q() {
                let ha = ordinary_sum(&s, a).unwrap();
                assert!(is_supersymmetric(&ha).unwrap());
                let mut sum = TorusElement::zero_in(&s, Basis::Idempotent);
                for c in enumerate_canonical(&s).iter().filter(|c| c.defect >= 1 && c.ev.total() % q == u64::from(a)) {
                    sum = sum.add(&class_sum(c, &s).unwrap()).unwrap();
                }
                assert_eq!(ha, sum, "{s} a={a}");
                total = total.add(&ha).unwrap();
            }
            let all_ordinary = s.labels().filter(|ev| is_ordinary(ev, &s)).count();
            assert_eq!(total.len(), all_ordinary);
        }
    }

    #[test]
    fn oracle_dimensions() {
        assert_eq!(ss_nullspace_oracle(&spec(1, 1, 2, 1), OracleMode::FirstPair).unwrap().len(), 3);
        assert_eq!(ss_nullspace_oracle(&spec(1, 1, 3, 1), OracleMode::FirstPair).unwrap().len(), 7);
        assert_eq!(ss_nullspace_oracle(&spec(2, 1, 3, 1), OracleMode::FirstPair).unwrap().len(), 12);
    }

    #[test]
    fn oracle_modes_agree() {
        for s in [spec(2, 2, 2, 1), spec(2, 1, 3, 1), spec(1, 2, 2, 2)] {
            let first = dense_rows(&ss_nullspace_oracle(&s, OracleMode::FirstPair).unwrap());
            let all = dense_rows(&ss_nullspace_oracle(&s, OracleMode::AllPairs).unwrap());
            assert!(span_equal(&first, &all, s.p()));
        }
    }

    #[test]
    fn oracle_elements_are_supersymmetric() {
        let s = spec(2, 2, 2, 1);
        for f in ss_nullspace_oracle(&s, OracleMode::FirstPair).unwrap() {
            assert!(is_supersymmetric(&f).unwrap());
            assert!(is_supersymmetric_all_pairs(&f).unwrap());
        }
    }

    #[test]
    fn gl11_generator_examples() {
        let s = spec(1, 1, 2, 1);
        let gens = gl11_generators(&s).unwrap();
        assert_eq!(
            gens,
            vec![idem(&s, &[(&[0], &[1])]), idem(&s, &[(&[1], &[0])]), idem(&s, &[(&[0], &[0]), (&[1], &[1])])]
        );
        assert_eq!(gl11_generators(&spec(1, 1, 2, 2)).unwrap().len(), 10);
        assert!(gl11_generators(&spec(2, 1, 2, 1)).is_err());
    }

    #[test]
    fn dim_closed_form_examples() {
        assert_eq!(dim_closed_form(&spec(3, 1, 2, 1)), BigUint::from(5u32));
        assert_eq!(dim_closed_form(&spec(2, 1, 2, 2)), BigUint::from(16u32));
        for p in [2u64, 3] {
            for m in 1..=4 {
                for r in 1..=2 {
                    let s = TorusSpec::with_cap(m, 1, p, r, u64::MAX).unwrap();
                    assert_eq!(dim_closed_form(&s), count_canonical_total(&s), "{s}");
                    let s = TorusSpec::with_cap(1, m, p, r, u64::MAX).unwrap();
                    assert_eq!(dim_closed_form(&s), count_canonical_total(&s), "{s}");
                }
            }
        }
    }

    #[test]
    fn verify_small_specs() {
        for s in [spec(1, 1, 2, 1), spec(2, 1, 3, 1), spec(2, 2, 2, 1)] {
            let report = verify_basis(&s).unwrap();
            assert!(report.passed(), "{s}: {:?}", report.failures().collect::<Vec<_>>());
            assert!(report.h_basis_ok && report.partition_ok);
        }
        let report = verify_basis(&spec(1, 1, 2, 1)).unwrap();
        assert_eq!((report.oracle_dim, report.gl11_span_ok), (3, Some(true)));
        assert_eq!(verify_basis(&spec(2, 1, 3, 1)).unwrap().oracle_dim, 12);
    }
}
