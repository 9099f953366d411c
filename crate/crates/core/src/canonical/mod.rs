//! Defect, canonical labels and the equivalence relation `~` on labels,
//! generated by block permutations and, when `a_1 + b_1` is divisible by `p`,
//! by replacing `(a_1, b_1)` with any pair of the same sum mod `q`.

pub mod counts;

use std::collections::{HashSet, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::{ExponentVector, TorusSpec};

/// A canonical label with its defect and split indices `(e, f)`; the split
/// indices are zero for defect 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalLabel {
    pub ev: ExponentVector,
    pub defect: usize,
    pub e: usize,
    pub f: usize,
}

/// One equivalence class: its canonical label and all members in
/// lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivClass {
    pub canonical: CanonicalLabel,
    pub members: Vec<ExponentVector>,
}

/// A complete invariant of `~`: two labels are equivalent iff their
/// invariants are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassInvariant {
    /// Defect 0: the sorted blocks.
    Orbit { a: Vec<u32>, b: Vec<u32> },
    /// Positive defect: the sorted residues of unmatched entries and the
    /// total mod `q`.
    Linked { defect: usize, a_residues: Vec<u32>, b_residues: Vec<u32>, total: u64 },
}

struct Residues {
    defect: usize,
    unmatched_a: Vec<u32>,
    unmatched_b: Vec<u32>,
}

fn residue_split(ev: &ExponentVector, p: u32) -> Residues {
    let pu = p as usize;
    let mut ca = vec![0usize; pu];
    let mut cb = vec![0usize; pu];
    for &a in &ev.a {
        ca[(a % p) as usize] += 1;
    }
    for &b in &ev.b {
        cb[(b % p) as usize] += 1;
    }
    let partner = |r: usize| (pu - r) % pu;
    let mut defect = 0;
    let mut unmatched_a = Vec::new();
    let mut unmatched_b = Vec::new();
    for r in 0..pu {
        let matched = ca[r].min(cb[partner(r)]);
        defect += matched;
        unmatched_a.extend(std::iter::repeat(r as u32).take(ca[r] - matched));
        let matched_b = cb[r].min(ca[partner(r)]);
        unmatched_b.extend(std::iter::repeat(r as u32).take(cb[r] - matched_b));
    }
    Residues { defect, unmatched_a, unmatched_b }
}

/// The maximal number of disjoint pairs `(i, j)` with `a_i + b_j = 0 mod p`.
pub fn defect(ev: &ExponentVector, spec: &TorusSpec) -> usize {
    residue_split(ev, spec.p().get()).defect
}

/// True iff some `a_i + b_j` is divisible by `p`.
pub fn is_ordinary(ev: &ExponentVector, spec: &TorusSpec) -> bool {
    defect(ev, spec) > 0
}

fn is_sorted(v: &[u32]) -> bool {
    v.windows(2).all(|w| w[0] <= w[1])
}

/// The split indices `(e, f)` if `ev` has the canonical shape, `(0, 0)` for
/// defect 0.
pub fn canonical_shape(ev: &ExponentVector, spec: &TorusSpec) -> Option<(usize, usize)> {
    let p = spec.p().get();
    let d = defect(ev, spec);
    if d == 0 {
        return (is_sorted(&ev.a) && is_sorted(&ev.b)).then_some((0, 0));
    }
    let (m, n) = (ev.a.len(), ev.b.len());
    let unit_tail = |v: &[u32]| v.iter().all(|&x| 0 < x && x < p) && is_sorted(v);
    for e in d..=m {
        if ev.a[..e].iter().any(|&x| x != 0) || !unit_tail(&ev.a[e..]) {
            continue;
        }
        for f in d..=n {
            if e.min(f) != d {
                continue;
            }
            let b = &ev.b;
            if b[..f - 1].iter().any(|&x| x != 0) || b[f - 1] % p != 0 || !unit_tail(&b[f..]) {
                continue;
            }
            let clash = ev.a[e..].iter().any(|&x| b[f..].iter().any(|&y| (x + y) % p == 0));
            if !clash {
                return Some((e, f));
            }
        }
    }
    None
}

pub fn is_canonical(ev: &ExponentVector, spec: &TorusSpec) -> bool {
    canonical_shape(ev, spec).is_some()
}

/// The canonical representative of the class of `ev`.
pub fn canonicalize(ev: &ExponentVector, spec: &TorusSpec) -> Result<CanonicalLabel> {
    spec.validate(ev)?;
    let p = spec.p().get();
    let q = u64::from(spec.q());
    let res = residue_split(ev, p);
    let d = res.defect;
    if d == 0 {
        let mut a = ev.a.clone();
        let mut b = ev.b.clone();
        a.sort_unstable();
        b.sort_unstable();
        return Ok(CanonicalLabel { ev: ExponentVector::new(a, b), defect: 0, e: 0, f: 0 });
    }
    let zeros = |v: &[u32]| v.iter().filter(|&&x| x == 0).count();
    let e = d + zeros(&res.unmatched_a);
    let f = d + zeros(&res.unmatched_b);
    let residue_sum: u64 = res.unmatched_a.iter().chain(&res.unmatched_b).map(|&x| u64::from(x)).sum();
    let pivot = ((ev.total() % q + q - residue_sum % q) % q) as u32;
    let mut a = vec![0u32; e];
    a.extend(res.unmatched_a.iter().filter(|&&x| x != 0));
    let mut b = vec![0u32; f - 1];
    b.push(pivot);
    b.extend(res.unmatched_b.iter().filter(|&&x| x != 0));
    Ok(CanonicalLabel { ev: ExponentVector::new(a, b), defect: d, e, f })
}

/// The class invariant of `ev`.
pub fn class_invariant(ev: &ExponentVector, spec: &TorusSpec) -> ClassInvariant {
    let res = residue_split(ev, spec.p().get());
    if res.defect == 0 {
        let mut a = ev.a.clone();
        let mut b = ev.b.clone();
        a.sort_unstable();
        b.sort_unstable();
        ClassInvariant::Orbit { a, b }
    } else {
        ClassInvariant::Linked {
            defect: res.defect,
            a_residues: res.unmatched_a,
            b_residues: res.unmatched_b,
            total: ev.total() % u64::from(spec.q()),
        }
    }
}

/// Labels reachable from `ev` in one generating step of `~`.
pub fn neighbours(ev: &ExponentVector, spec: &TorusSpec) -> Vec<ExponentVector> {
    let mut out = Vec::new();
    for s in 0..ev.a.len().saturating_sub(1) {
        let mut next = ev.clone();
        next.a.swap(s, s + 1);
        out.push(next);
    }
    for s in 0..ev.b.len().saturating_sub(1) {
        let mut next = ev.clone();
        next.b.swap(s, s + 1);
        out.push(next);
    }
    if let (Some(&a1), Some(&b1)) = (ev.a.first(), ev.b.first()) {
        let p = spec.p().get();
        let q = spec.q();
        if (a1 + b1) % p == 0 {
            let sum = (a1 + b1) % q;
            for a in 0..q {
                let mut next = ev.clone();
                next.a[0] = a;
                next.b[0] = (sum + q - a) % q;
                out.push(next);
            }
        }
    }
    out
}

/// The class of a canonical label, by breadth-first closure under the
/// generating relations.
pub fn enumerate_equivalence_class(canonical: &CanonicalLabel, spec: &TorusSpec) -> Result<EquivClass> {
    let start = &canonical.ev;
    if !is_canonical(start, spec) {
        return Err(Error::NotCanonical(start.to_string()));
    }
    let mut seen: HashSet<u64> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(spec.index_of(start)?);
    queue.push_back(start.clone());
    while let Some(ev) = queue.pop_front() {
        for next in neighbours(&ev, spec) {
            if seen.insert(spec.index_of(&next)?) {
                queue.push_back(next);
            }
        }
    }
    let mut indices: Vec<u64> = seen.into_iter().collect();
    indices.sort_unstable();
    Ok(EquivClass { canonical: canonical.clone(), members: indices.into_iter().map(|i| spec.label(i)).collect() })
}

/// Class members found by scanning all labels with the class invariant.
pub fn class_members_by_invariant(canonical: &CanonicalLabel, spec: &TorusSpec) -> Vec<ExponentVector> {
    let key = class_invariant(&canonical.ev, spec);
    (0..spec.dim())
        .into_par_iter()
        .map(|i| spec.label(i))
        .filter(|ev| class_invariant(ev, spec) == key)
        .collect()
}

/// All canonical labels in lexicographic order.
pub fn enumerate_canonical(spec: &TorusSpec) -> Vec<CanonicalLabel> {
    (0..spec.dim())
        .into_par_iter()
        .filter_map(|i| {
            let ev = spec.label(i);
            canonical_shape(&ev, spec).map(|(e, f)| {
                let defect = e.min(f);
                CanonicalLabel { ev, defect, e, f }
            })
        })
        .collect()
}

/// All classes, in the order of their canonical labels.
pub fn enumerate_classes(spec: &TorusSpec) -> Result<Vec<EquivClass>> {
    enumerate_canonical(spec)
        .par_iter()
        .map(|c| enumerate_equivalence_class(c, spec))
        .collect()
}

/// True iff the classes are pairwise disjoint and cover every label.
pub fn is_partition(classes: &[EquivClass], spec: &TorusSpec) -> bool {
    let mut hits = vec![0u8; spec.dim() as usize];
    for class in classes {
        for ev in &class.members {
            match spec.index_of(ev) {
                Ok(i) if hits[i as usize] == 0 => hits[i as usize] = 1,
                _ => return false,
            }
        }
    }
    hits.iter().all(|&h| h == 1)
}
