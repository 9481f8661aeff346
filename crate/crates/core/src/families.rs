//! Parameter orbits and the dimension-four classification.

use std::collections::{BTreeSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::bases::{make_base, BaseKind, BaseVariety};
use crate::error::{Error, Result};
use crate::fano::{build_a, build_b, length_one_obstruction, report, FamilyRecord, Status};
use crate::Construction;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairOrbit {
    pub index: i64,
    pub representative: (i64, i64),
    pub orbit: BTreeSet<(i64, i64)>,
}

/// |a|, |b|, |a - b| <= i - 1.
pub fn in_range(index: i64, (a, b): (i64, i64)) -> bool {
    a.abs() <= index - 1 && b.abs() <= index - 1 && (a - b).abs() <= index - 1
}

/// b <= 0, 2|b| <= i - 1 and |b| <= a <= i - 1 - |b|.
pub fn is_normal_form(index: i64, (a, b): (i64, i64)) -> bool {
    b <= 0 && 2 * b.abs() <= index - 1 && b.abs() <= a && a <= index - 1 - b.abs()
}

/// The three moves relating twists that give the same X.
pub fn pair_moves((a, b): (i64, i64)) -> [(i64, i64); 3] {
    [(b, a), (-b, a - b), (-a, -b)]
}

pub fn canonical_pair(index: i64, a: i64, b: i64) -> Result<PairOrbit> {
    if index < 1 || !in_range(index, (a, b)) {
        return Err(Error::OutOfRange { index, a, b });
    }
    let mut orbit = BTreeSet::from([(a, b)]);
    let mut queue = VecDeque::from([(a, b)]);
    while let Some(p) = queue.pop_front() {
        for m in pair_moves(p) {
            if orbit.insert(m) {
                queue.push_back(m);
            }
        }
    }
    let normal: Vec<_> = orbit.iter().copied().filter(|&p| is_normal_form(index, p)).collect();
    match normal.as_slice() {
        [rep] => Ok(PairOrbit { index, representative: *rep, orbit }),
        _ => Err(Error::Model(format!("orbit of ({a}, {b}) has {} normal forms", normal.len()))),
    }
}

/// All normal-form pairs for index i.
pub fn normal_pairs(index: i64) -> Vec<(i64, i64)> {
    let r = index - 1;
    let mut out = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            if in_range(index, (a, b)) && is_normal_form(index, (a, b)) {
                out.push((a, b));
            }
        }
    }
    out
}

fn concrete_rho1_base(index: i64, dim: usize) -> Option<BaseKind> {
    match (index, dim) {
        (2, 3) => Some(BaseKind::P1),
        (3, 4) => Some(BaseKind::P2),
        _ => None,
    }
}

fn abstract_record(index: i64, dim: usize, construction: Construction, params: Vec<Vec<i64>>) -> FamilyRecord {
    let dim_t = dim as i64 - 2;
    FamilyRecord {
        rho: 5,
        dim,
        construction,
        base: format!("T(i={index})"),
        params,
        // A Fano manifold of index dim + 1 is projective space.
        toric: construction == Construction::A && index == dim_t + 1,
        invariants: None,
        divisors: Vec::new(),
        discriminant: None,
        label: None,
        status: Status::Validated,
    }
}

/// Families with rho_X = 5 over a base of Picard number one and index i.
/// The base is concrete for (i, dim) = (2, 3) and (3, 4); otherwise only
/// the parameters are listed.
pub fn enumerate_rho5(index: i64, dim: usize) -> Result<Vec<FamilyRecord>> {
    if index < 1 {
        return Err(Error::Usage(format!("index must be positive, got {index}")));
    }
    if dim < 3 {
        return Err(Error::Usage(format!("dimension must be at least 3, got {dim}")));
    }
    let a_params: Vec<Vec<Vec<i64>>> =
        normal_pairs(index).into_iter().map(|(a, b)| vec![vec![a], vec![0], vec![b]]).collect();
    let b_params: Vec<Vec<i64>> = (1..index).map(|a| vec![a]).collect();
    let mut out = match concrete_rho1_base(index, dim) {
        Some(kind) => {
            let t = make_base(kind)?;
            let mut jobs: Vec<Job> = a_params.into_iter().map(|d| Job::A(t.clone(), d)).collect();
            jobs.extend(b_params.into_iter().map(|n| Job::B(t.clone(), n)));
            run_jobs(jobs)?
        }
        None => a_params
            .into_iter()
            .map(|d| abstract_record(index, dim, Construction::A, d))
            .chain(b_params.into_iter().map(|n| abstract_record(index, dim, Construction::B, vec![n])))
            .collect(),
    };
    sort_records(&mut out);
    Ok(out)
}

fn apply(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn box_vectors(rho: usize, r: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..rho {
        out = out.into_iter().flat_map(|v| (-r..=r).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

const SEARCH_RADIUS: i64 = 4;

/// Differences d with -K_T + d and -K_T - d both ample.
pub fn allowed_differences(t: &BaseVariety) -> Result<Vec<Vec<i64>>> {
    let mk = t.anticanonical();
    let mut out = Vec::new();
    for v in box_vectors(t.rho, SEARCH_RADIUS) {
        let d = t.divisor(&v)?;
        if t.is_ample(&(&mk + &d)) && t.is_ample(&(&mk - &d)) {
            if v.iter().any(|x| x.abs() == SEARCH_RADIUS) {
                return Err(Error::Model(format!("search box too small for {}", t.kind)));
            }
            out.push(v);
        }
    }
    Ok(out)
}

/// Smallest member of the orbit of a normalized triple (D1, 0, D3) under slot
/// permutations, negation and lattice automorphisms of T.
pub fn canonical_triple(t: &BaseVariety, d: &[Vec<i64>]) -> Vec<Vec<i64>> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut best: Option<Vec<Vec<i64>>> = None;
    for aut in t.divisor_automorphisms() {
        for sign in [1, -1] {
            for p in PERMS {
                let moved: Vec<Vec<i64>> =
                    p.iter().map(|&i| apply(&aut, &d[i]).into_iter().map(|x| sign * x).collect()).collect();
                let mid = moved[1].clone();
                let cand: Vec<Vec<i64>> = moved.iter().map(|v| sub(v, &mid)).collect();
                if best.as_ref().is_none_or(|b| cand < *b) {
                    best = Some(cand);
                }
            }
        }
    }
    best.expect("at least the identity")
}

/// Orbit representatives of twist triples over a surface with rho_T = 2.
pub fn a_orbits(t: &BaseVariety) -> Result<Vec<Vec<Vec<i64>>>> {
    let allowed = allowed_differences(t)?;
    let allowed_set: BTreeSet<&Vec<i64>> = allowed.iter().collect();
    let zero = vec![0; t.rho];
    let mut reps = BTreeSet::new();
    for d1 in &allowed {
        for d3 in &allowed {
            if allowed_set.contains(&sub(d1, d3)) {
                reps.insert(canonical_triple(t, &[d1.clone(), zero.clone(), d3.clone()]));
            }
        }
    }
    Ok(reps.into_iter().collect())
}

/// Twists N != 0 with 2N effective and -K_T +- N ample, up to lattice
/// automorphisms of T.
pub fn b_parameters(t: &BaseVariety) -> Result<Vec<Vec<i64>>> {
    let mk = t.anticanonical();
    let mut reps = BTreeSet::new();
    for v in box_vectors(t.rho, SEARCH_RADIUS) {
        if v.iter().all(|&x| x == 0) {
            continue;
        }
        let n = t.divisor(&v)?;
        if !(t.is_ample(&(&mk + &n)) && t.is_ample(&(&mk - &n))) {
            continue;
        }
        if !t.is_effective_integral(&n.scale(&crate::linalg::q(2))) {
            continue;
        }
        if v.iter().any(|x| x.abs() == SEARCH_RADIUS) {
            return Err(Error::Model(format!("search box too small for {}", t.kind)));
        }
        let rep = t.divisor_automorphisms().iter().map(|m| apply(m, &v)).min().expect("identity");
        reps.insert(rep);
    }
    Ok(reps.into_iter().collect())
}

/// Pairs of records over the same base whose invariants coincide.
pub fn invariant_collisions(records: &[FamilyRecord]) -> Vec<(Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    let mut out = Vec::new();
    for (k, x) in records.iter().enumerate() {
        for y in &records[k + 1..] {
            if x.invariants.is_some() && x.base == y.base && x.invariants == y.invariants {
                out.push((x.params.clone(), y.params.clone()));
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
enum Job {
    A(BaseVariety, Vec<Vec<i64>>),
    B(BaseVariety, Vec<i64>),
}

fn run_jobs(jobs: Vec<Job>) -> Result<Vec<FamilyRecord>> {
    jobs.into_par_iter()
        .map(|job| match job {
            Job::A(t, d) => report(&build_a(&t, &d)?),
            Job::B(t, n) => report(&build_b(&t, &n)?),
        })
        .collect()
}

fn sort_records(records: &mut [FamilyRecord]) {
    records.sort_by(|x, y| {
        (x.rho, x.construction, &x.base, &x.params).cmp(&(y.rho, y.construction, &y.base, &y.params))
    });
}

fn rho6_jobs() -> Result<Vec<Job>> {
    let mut jobs = Vec::new();
    for kind in [BaseKind::F1, BaseKind::P1xP1] {
        let t = make_base(kind)?;
        jobs.extend(a_orbits(&t)?.into_iter().map(|d| Job::A(t.clone(), d)));
        jobs.extend(b_parameters(&t)?.into_iter().map(|n| Job::B(t.clone(), n)));
    }
    Ok(jobs)
}

pub fn enumerate_rho6() -> Result<Vec<FamilyRecord>> {
    let mut out = run_jobs(rho6_jobs()?)?;
    sort_records(&mut out);
    Ok(out)
}

/// Bases with rho_T >= 3 only admit F x T.
fn product_jobs() -> Result<Vec<Job>> {
    let mut jobs = Vec::new();
    for kind in [BaseKind::DelPezzo(7), BaseKind::DelPezzo(6)] {
        let t = make_base(kind)?;
        if !length_one_obstruction(&t).product_only {
            return Err(Error::Model(format!("{kind} admits non-product twists")));
        }
        jobs.push(Job::A(t.clone(), vec![vec![0; t.rho]; 3]));
    }
    Ok(jobs)
}

/// Every Fano 4-fold with Lefschetz defect 3, one record per family.
pub fn classify_dim4() -> Result<Vec<FamilyRecord>> {
    let p2 = make_base(BaseKind::P2)?;
    let mut jobs: Vec<Job> = normal_pairs(3).into_iter().map(|(a, b)| Job::A(p2.clone(), vec![vec![a], vec![0], vec![b]])).collect();
    jobs.extend((1..3).map(|a| Job::B(p2.clone(), vec![a])));
    jobs.extend(rho6_jobs()?);
    jobs.extend(product_jobs()?);
    let mut out = run_jobs(jobs)?;
    sort_records(&mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_examples() {
        let o = canonical_pair(3, 2, 1).unwrap();
        assert_eq!(o.representative, (1, -1));
        assert_eq!(o.orbit, BTreeSet::from([(2, 1), (1, 2), (-1, 1), (1, -1), (-2, -1), (-1, -2)]));
        assert_eq!(canonical_pair(7, 0, 0).unwrap().representative, (0, 0));
        assert_eq!(canonical_pair(3, 1, 0).unwrap().representative, (1, 0));
        assert_eq!(canonical_pair(3, 3, 0).unwrap_err(), Error::OutOfRange { index: 3, a: 3, b: 0 });
    }

    #[test]
    fn normal_pair_counts() {
        assert_eq!(normal_pairs(1), vec![(0, 0)]);
        assert_eq!(normal_pairs(2).len(), 2);
        assert_eq!(normal_pairs(3), vec![(0, 0), (1, -1), (1, 0), (2, 0)]);
    }

    #[test]
    fn rho6_parameter_counts() {
        let f1 = make_base(BaseKind::F1).unwrap();
        let q = make_base(BaseKind::P1xP1).unwrap();
        assert_eq!(a_orbits(&f1).unwrap().len(), 2);
        assert_eq!(a_orbits(&q).unwrap().len(), 6);
        assert_eq!(b_parameters(&f1).unwrap(), vec![vec![1, 0]]);
        assert_eq!(b_parameters(&q).unwrap(), vec![vec![0, 1], vec![1, 1]]);
        // The weaker filter (2N effective) keeps only twists with N effective.
        for t in [&f1, &q] {
            for n in b_parameters(t).unwrap() {
                assert!(t.is_effective_integral(&t.divisor(&n).unwrap()), "{n:?}");
            }
        }
    }

    #[test]
    fn no_b_twists_on_larger_del_pezzo() {
        for d in [7, 6] {
            assert!(b_parameters(&make_base(BaseKind::DelPezzo(d)).unwrap()).unwrap().is_empty());
        }
    }

    #[test]
    fn abstract_rho5() {
        let r = enumerate_rho5(1, 5).unwrap();
        assert_eq!(r.len(), 1);
        let r = enumerate_rho5(5, 6).unwrap();
        assert_eq!(r.iter().filter(|x| x.construction == Construction::B).count(), 4);
        assert!(r.iter().all(|x| x.invariants.is_none()));
    }
}
