//! Catalog of base varieties T: P1, P2, P1xP1, F1 and the del Pezzo surfaces
//! dP_d (P2 blown up at 9 - d points), with their intersection rings,
//! Mori cone generators and Hodge data.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::Signed;
use serde::{Serialize, Serializer};

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::iring::{GradedRing, RingElement};
use crate::linalg::{q, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseKind {
    P1,
    P2,
    P1xP1,
    F1,
    /// Blow-up of P2 at `9 - d` general points, `1 <= d <= 7`.
    DelPezzo(u8),
}

impl BaseKind {
    pub fn name(&self) -> String {
        match self {
            BaseKind::P1 => "P1".into(),
            BaseKind::P2 => "P2".into(),
            BaseKind::P1xP1 => "P1xP1".into(),
            BaseKind::F1 => "F1".into(),
            BaseKind::DelPezzo(d) => format!("dP{d}"),
        }
    }

    pub fn is_toric(&self) -> bool {
        match self {
            BaseKind::DelPezzo(d) => *d >= 6,
            _ => true,
        }
    }
}

impl fmt::Display for BaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl Serialize for BaseKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

impl FromStr for BaseKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "P1" => Ok(BaseKind::P1),
            "P2" => Ok(BaseKind::P2),
            "P1xP1" => Ok(BaseKind::P1xP1),
            "F1" | "dP8" => Ok(BaseKind::F1),
            _ => {
                let d = s
                    .strip_prefix("dP")
                    .and_then(|d| d.parse::<u8>().ok())
                    .ok_or_else(|| Error::Usage(format!("unknown base kind {s:?}")))?;
                if (1..=7).contains(&d) {
                    Ok(BaseKind::DelPezzo(d))
                } else {
                    Err(Error::Usage(format!("del Pezzo degree must be in 1..=7, got {d}")))
                }
            }
        }
    }
}

/// A smooth Fano base T together with the data the constructions need.
#[derive(Debug, Clone)]
pub struct BaseVariety {
    pub kind: BaseKind,
    pub ring: Arc<GradedRing>,
    /// Canonical class K_T (degree 1).
    pub canonical: RingElement,
    /// Fano index, recorded when the Picard number is 1.
    pub index: Option<i64>,
    pub rho: usize,
    /// Curve classes (degree `dim - 1`) generating NE(T).
    pub ne_generators: Vec<RingElement>,
    pub euler: i64,
    /// `hodge[p][q] = h^{p,q}`.
    pub hodge: Vec<Vec<i64>>,
    pub delta: usize,
}

impl BaseVariety {
    pub fn dim(&self) -> usize {
        self.ring.dim()
    }

    /// Divisor from coordinates in the named degree-1 basis.
    pub fn divisor(&self, coords: &[i64]) -> Result<RingElement> {
        RingElement::from_ints(&self.ring, 1, coords)
    }

    pub fn anticanonical(&self) -> RingElement {
        -&self.canonical
    }

    /// Integer coordinates of a degree-1 class.
    pub fn divisor_coords(&self, d: &RingElement) -> Vec<i64> {
        d.coords(1)
            .iter()
            .map(|c| {
                assert!(c.is_integer(), "divisor with non-integral coordinate");
                i64::try_from(c.to_integer()).expect("coordinate fits in i64")
            })
            .collect()
    }

    pub fn pairing(&self, divisor: &RingElement, curve: &RingElement) -> Q {
        divisor.dot(curve)
    }

    /// D . c > 0 for every generator of NE(T).
    pub fn is_ample(&self, d: &RingElement) -> bool {
        self.ne_generators.iter().all(|c| self.pairing(d, c).is_positive())
    }

    pub fn is_nef(&self, d: &RingElement) -> bool {
        self.ne_generators.iter().all(|c| !self.pairing(d, c).is_negative())
    }

    /// Generators of the effective cone of divisors. On the catalog surfaces
    /// it coincides with NE(T); on P1 it is the point class.
    pub fn effective_generators(&self) -> Vec<RingElement> {
        if self.dim() == 2 {
            self.ne_generators.clone()
        } else {
            vec![RingElement::point(&self.ring)]
        }
    }

    /// Membership of the class of `d` in the (real) effective cone.
    pub fn is_effective(&self, d: &RingElement) -> bool {
        let gens: Vec<Vec<i64>> = self.effective_generators().iter().map(|g| self.divisor_coords(g)).collect();
        let cone = Cone::from_generators(&gens).expect("effective cones of the catalog are pointed and full");
        cone.contains(&d.coords(1))
    }

    /// Whether `d` is a non-negative integer combination of the effective
    /// generators. Decided exactly when the generators are a lattice basis
    /// (every catalog base with rho <= 2); otherwise falls back to the real cone.
    pub fn is_effective_integral(&self, d: &RingElement) -> bool {
        let gens: Vec<Vec<i64>> = self.effective_generators().iter().map(|g| self.divisor_coords(g)).collect();
        if gens.len() == self.rho {
            let target = d.coords(1);
            match solve_square(&gens, &target) {
                Some(x) => x.iter().all(|v| v.is_integer() && !v.is_negative()),
                None => false,
            }
        } else {
            self.is_effective(d)
        }
    }

    /// Holomorphic tangent bundle Chern character, `rank + c1 + (c1^2 - 2 c2)/2`.
    pub fn tangent_chern_character(&self) -> RingElement {
        let r = &self.ring;
        let c1 = self.anticanonical();
        let mut ch = &RingElement::one(r).scale(&q(self.dim() as i64)) + &c1;
        if self.dim() >= 2 {
            let c2 = RingElement::point(r).scale(&q(self.euler));
            let half = Q::new(1.into(), 2.into());
            ch = &ch + &(&(&c1 * &c1) - &c2.scale(&q(2))).scale(&half);
        }
        ch
    }

    /// Lattice automorphisms of the degree-1 coordinates preserving the
    /// intersection form and K_T, as integer matrices acting on column vectors.
    /// For dP_d only the permutations of the exceptional classes are listed.
    pub fn divisor_automorphisms(&self) -> Vec<Vec<Vec<i64>>> {
        let n = self.rho;
        let identity: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        match self.kind {
            BaseKind::P1xP1 => vec![identity, vec![vec![0, 1], vec![1, 0]]],
            BaseKind::DelPezzo(_) => permutations(n - 1)
                .into_iter()
                .map(|p| {
                    let mut m = vec![vec![0; n]; n];
                    m[0][0] = 1;
                    for (i, &j) in p.iter().enumerate() {
                        m[i + 1][j + 1] = 1;
                    }
                    m
                })
                .collect(),
            _ => vec![identity],
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut v = p.clone();
            v.insert(pos, n - 1);
            out.push(v);
        }
    }
    out.sort();
    out
}

/// Solves `sum_i x_i * cols[i] = target` for a square, invertible system.
fn solve_square(cols: &[Vec<i64>], target: &[Q]) -> Option<Vec<Q>> {
    let n = cols.len();
    let mut m: Vec<Vec<Q>> = (0..n)
        .map(|r| {
            let mut row: Vec<Q> = cols.iter().map(|c| q(c[r])).collect();
            row.push(target[r].clone());
            row
        })
        .collect();
    let pivots = crate::linalg::rref(&mut m);
    if pivots.len() != n || pivots.iter().any(|&p| p >= n) {
        return None;
    }
    Some(m.iter().map(|row| row[n].clone()).collect())
}

fn diagonal_form(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i != j { 0 } else if i == 0 { 1 } else { -1 }).collect())
        .collect()
}

/// Builds the catalog entry for `kind`.
pub fn make_base(kind: BaseKind) -> Result<BaseVariety> {
    let (ring, k_coords, index, rho, euler): (Arc<GradedRing>, Vec<i64>, Option<i64>, usize, i64) = match kind {
        BaseKind::P1 => (GradedRing::curve("P1")?, vec![-2], Some(2), 1, 2),
        BaseKind::P2 => (GradedRing::surface("P2", &["L"], &[vec![1]])?, vec![-3], Some(3), 1, 3),
        BaseKind::P1xP1 => (
            GradedRing::surface("P1xP1", &["f1", "f2"], &[vec![0, 1], vec![1, 0]])?,
            vec![-2, -2],
            None,
            2,
            4,
        ),
        BaseKind::F1 => (GradedRing::surface("F1", &["h", "e"], &diagonal_form(2))?, vec![-3, 1], None, 2, 4),
        BaseKind::DelPezzo(d) => {
            if !(1..=7).contains(&d) {
                return Err(Error::Usage(format!("del Pezzo degree must be in 1..=7, got {d}")));
            }
            let n = 10 - d as usize;
            let names: Vec<String> =
                std::iter::once("h".to_string()).chain((1..n).map(|i| format!("e{i}"))).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let ring = GradedRing::surface(&kind.name(), &refs, &diagonal_form(n))?;
            let mut k = vec![1; n];
            k[0] = -3;
            (ring, k, None, n, 12 - d as i64)
        }
    };
    let canonical = RingElement::from_ints(&ring, 1, &k_coords)?;
    let dim = ring.dim();
    let mut base = BaseVariety {
        kind,
        ring: ring.clone(),
        canonical,
        index,
        rho,
        ne_generators: Vec::new(),
        euler,
        hodge: (0..=dim).map(|p| (0..=dim).map(|qq| if p != qq { 0 } else if p == 1 && dim == 2 { rho as i64 } else { 1 }).collect()).collect(),
        delta: if dim == 2 { rho - 1 } else { 0 },
    };
    base.ne_generators = match kind {
        BaseKind::P1 => vec![RingElement::one(&ring)],
        BaseKind::P2 => vec![base.divisor(&[1])?],
        BaseKind::P1xP1 => vec![base.divisor(&[1, 0])?, base.divisor(&[0, 1])?],
        BaseKind::F1 => vec![base.divisor(&[0, 1])?, base.divisor(&[1, -1])?],
        BaseKind::DelPezzo(_) => neg_classes(&base)?,
    };
    Ok(base)
}

/// All classes c with c.c = -1 and c.K = -1 (the (-1)-classes), by bounded
/// integer search. Sorted by coordinates.
pub fn neg_classes(t: &BaseVariety) -> Result<Vec<RingElement>> {
    if t.dim() != 2 || t.rho < 2 {
        return Err(Error::Usage(format!("(-1)-classes need a surface with rho >= 2, got {}", t.kind)));
    }
    let mut found: Vec<Vec<i64>> = Vec::new();
    match t.kind {
        BaseKind::P1xP1 => {
            // c = x f1 + y f2: c^2 = 2xy is even, never -1.
            for x in -3..=3 {
                for y in -3..=3 {
                    let c = t.divisor(&[x, y])?;
                    if c.dot(&c) == q(-1) && c.dot(&t.canonical) == q(-1) {
                        found.push(vec![x, y]);
                    }
                }
            }
        }
        _ => {
            // c = a h - sum b_i e_i with sum b_i = 3a - 1 and sum b_i^2 = a^2 + 1.
            let n = t.rho - 1;
            let bound: i64 = match t.kind {
                BaseKind::DelPezzo(d) if d < 5 => 6,
                _ => 3,
            };
            for a in 0..=bound {
                let mut b = Vec::with_capacity(n);
                search_exceptional(n, bound, 3 * a - 1, a * a + 1, &mut b, &mut |b| {
                    let mut v = vec![a];
                    v.extend(b.iter().map(|x| -x));
                    found.push(v);
                });
            }
        }
    }
    found.sort();
    found.iter().map(|v| t.divisor(v)).collect()
}

fn search_exceptional(
    remaining: usize,
    bound: i64,
    sum_left: i64,
    sq_left: i64,
    prefix: &mut Vec<i64>,
    emit: &mut impl FnMut(&[i64]),
) {
    if remaining == 0 {
        if sum_left == 0 && sq_left == 0 {
            emit(prefix);
        }
        return;
    }
    for b in -bound..=bound {
        let sq = b * b;
        if sq > sq_left {
            continue;
        }
        // Cauchy-Schwarz on the remaining coordinates.
        let rest_sum = sum_left - b;
        let rest_sq = sq_left - sq;
        let k = (remaining - 1) as i64;
        if rest_sum * rest_sum > k * rest_sq {
            continue;
        }
        prefix.push(b);
        search_exceptional(remaining - 1, bound, rest_sum, rest_sq, prefix, emit);
        prefix.pop();
    }
}

/// Invariants of the double cover S1 -> T branched along a smooth member of |2N|.
#[derive(Debug, Clone, Serialize)]
pub struct DoubleCoverData {
    pub base: BaseKind,
    #[serde(skip)]
    pub twist: RingElement,
    #[serde(skip)]
    pub branch_class: RingElement,
    /// K_{S1}^2.
    pub k_self_sq: i64,
    pub euler: i64,
    pub h11: i64,
    pub chi_o: i64,
    /// Isomorphism type when it is pinned down, otherwise `dP<degree>`.
    pub surface_type: String,
}

/// Topological Euler number of the double cover of T branched along a smooth
/// member of |2N|: `2 e(T) - e(branch)`.
pub fn double_cover_euler(t: &BaseVariety, n: &RingElement) -> i64 {
    let branch = n.scale(&q(2));
    let e_branch = match t.dim() {
        1 => branch.integrate(),
        _ => -(&branch * &(&branch + &t.canonical)).integrate(),
    };
    let e = q(2 * t.euler) - e_branch;
    i64::try_from(e.to_integer()).expect("euler number fits in i64")
}

pub fn double_cover_invariants(t: &BaseVariety, n: &RingElement) -> Result<DoubleCoverData> {
    if t.dim() != 2 {
        return Err(Error::Usage("double cover invariants are tabulated for surface bases".into()));
    }
    if n.is_zero() {
        return Err(Error::Model("twist divisor N must be non-zero".into()));
    }
    let s_anti = &t.anticanonical() - n;
    if !t.is_ample(&s_anti) {
        return Err(Error::Model(format!("-K_T - N is not ample on {}", t.kind)));
    }
    let kn = &t.canonical + n;
    let k_sq = (&kn * &kn).integrate() * q(2);
    let k_self_sq = i64::try_from(k_sq.to_integer()).expect("small");
    let euler = double_cover_euler(t, n);
    let chi = q(k_self_sq + euler) / q(12);
    if !chi.is_integer() {
        return Err(Error::Model("Noether's formula gives a non-integral chi(O)".into()));
    }
    let n_coords = t.divisor_coords(n);
    let is_quadric = k_self_sq == 8
        && match t.kind {
            // Branched along two fibres of one ruling: S1 = P1 x (double cover of P1).
            BaseKind::P1xP1 => n_coords.iter().filter(|&&c| c == 0).count() == 1,
            // Branched along a conic: the smooth quadric surface.
            BaseKind::P2 => n_coords == [1],
            _ => false,
        };
    Ok(DoubleCoverData {
        base: t.kind,
        twist: n.clone(),
        branch_class: n.scale(&q(2)),
        k_self_sq,
        euler,
        h11: euler - 2,
        chi_o: i64::try_from(chi.to_integer()).expect("small"),
        surface_type: if is_quadric { "P1xP1".to_string() } else { format!("dP{k_self_sq}") },
    })
}

/// Every kind in the catalog, in a fixed order.
pub fn catalog_kinds() -> Vec<BaseKind> {
    let mut v = vec![BaseKind::P1, BaseKind::P2, BaseKind::P1xP1, BaseKind::F1];
    v.extend((1..=7).rev().map(BaseKind::DelPezzo));
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(s: &str) -> BaseVariety {
        make_base(s.parse().unwrap()).unwrap()
    }

    #[test]
    fn f1_catalog_entry() {
        let t = base("F1");
        assert_eq!(t.canonical, t.divisor(&[-3, 1]).unwrap());
        assert_eq!(t.euler, 4);
        assert_eq!(t.hodge[1][1], 2);
        assert_eq!(t.delta, 1);
    }

    #[test]
    fn p1_catalog_entry() {
        let t = base("P1");
        assert_eq!(t.canonical, RingElement::point(&t.ring).scale(&q(-2)));
        assert_eq!(t.index, Some(2));
        assert_eq!(t.delta, 0);
    }

    #[test]
    fn dp6_has_six_generators() {
        let t = base("dP6");
        assert_eq!(t.ne_generators.len(), 6);
        let coords: Vec<Vec<i64>> = t.ne_generators.iter().map(|c| t.divisor_coords(c)).collect();
        for expected in [
            vec![0, 1, 0, 0],
            vec![0, 0, 1, 0],
            vec![0, 0, 0, 1],
            vec![1, -1, -1, 0],
            vec![1, -1, 0, -1],
            vec![1, 0, -1, -1],
        ] {
            assert!(coords.contains(&expected), "missing {expected:?}");
        }
    }

    #[test]
    fn classical_exceptional_counts() {
        for (d, n) in [(7, 3), (6, 6), (5, 10), (4, 16), (3, 27), (2, 56), (1, 240)] {
            assert_eq!(base(&format!("dP{d}")).ne_generators.len(), n, "dP{d}");
        }
    }

    #[test]
    fn f1_single_exceptional_class() {
        let t = base("F1");
        let c = neg_classes(&t).unwrap();
        assert_eq!(c, vec![t.divisor(&[0, 1]).unwrap()]);
        assert!(neg_classes(&base("P1xP1")).unwrap().is_empty());
        assert!(neg_classes(&base("P2")).is_err());
    }

    #[test]
    fn ampleness_examples() {
        let p2 = base("P2");
        assert!(p2.is_ample(&p2.divisor(&[2]).unwrap()));
        assert!(!p2.is_ample(&p2.divisor(&[0]).unwrap()));
        assert!(!p2.is_ample(&p2.divisor(&[-1]).unwrap()));
        let f1 = base("F1");
        assert!(f1.is_ample(&f1.divisor(&[3, -1]).unwrap()));
        let q = base("P1xP1");
        let f = q.divisor(&[1, 0]).unwrap();
        assert!(!q.is_ample(&f));
        assert!(q.is_nef(&f));
    }

    #[test]
    fn anticanonical_ample_everywhere() {
        for kind in catalog_kinds() {
            let t = make_base(kind).unwrap();
            assert!(t.is_ample(&t.anticanonical()), "{kind}");
            assert_eq!(t.ring.check_axioms(), Ok(()));
        }
    }

    #[test]
    fn double_cover_examples() {
        let q1 = base("P1xP1");
        let d = double_cover_invariants(&q1, &q1.divisor(&[1, 1]).unwrap()).unwrap();
        assert_eq!((d.k_self_sq, d.euler, d.h11, d.chi_o), (4, 8, 6, 1));
        let d = double_cover_invariants(&q1, &q1.divisor(&[0, 1]).unwrap()).unwrap();
        assert_eq!((d.k_self_sq, d.euler, d.h11), (8, 4, 2));
        assert_eq!(d.surface_type, "P1xP1");
        let f1 = base("F1");
        let d = double_cover_invariants(&f1, &f1.divisor(&[1, 0]).unwrap()).unwrap();
        assert_eq!((d.k_self_sq, d.euler, d.h11), (6, 6, 4));
        assert_eq!(d.surface_type, "dP6");
        assert_eq!(d.branch_class, f1.divisor(&[2, 0]).unwrap());
    }

    #[test]
    fn double_cover_preconditions() {
        let p2 = base("P2");
        assert!(matches!(double_cover_invariants(&p2, &p2.divisor(&[0]).unwrap()), Err(Error::Model(_))));
        assert!(matches!(double_cover_invariants(&p2, &p2.divisor(&[3]).unwrap()), Err(Error::Model(_))));
    }

    #[test]
    fn effectivity_on_rank_two_bases() {
        let f1 = base("F1");
        assert!(f1.is_effective(&f1.divisor(&[1, 0]).unwrap()));
        assert!(f1.is_effective(&f1.divisor(&[0, 1]).unwrap()));
        assert!(!f1.is_effective(&f1.divisor(&[-1, 0]).unwrap()));
        assert!(!f1.is_effective(&f1.divisor(&[1, -2]).unwrap()));
        let q1 = base("P1xP1");
        assert!(q1.is_effective_integral(&q1.divisor(&[2, 0]).unwrap()));
        assert!(!q1.is_effective_integral(&q1.divisor(&[1, -1]).unwrap()));
        let p1 = base("P1");
        assert!(p1.is_effective(&p1.divisor(&[1]).unwrap()));
    }

    #[test]
    fn parse_names() {
        assert_eq!("dP6".parse::<BaseKind>().unwrap(), BaseKind::DelPezzo(6));
        assert!("dP9".parse::<BaseKind>().is_err());
        assert!("P3".parse::<BaseKind>().is_err());
    }
}
