//! Finite graded commutative rings with integer structure constants.
//!
//! Every Chow ring in this crate is tiny (at most ten basis classes per
//! degree), so rings are given by an explicit multiplication table and
//! elements are sparse maps from `(degree, basis index)` to a rational.
//! Products landing above the top degree vanish silently.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{q, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedRing {
    name: String,
    dim: usize,
    basis: Vec<Vec<String>>,
    /// `table[d1][i1][d2][i2]` is the product of two basis classes written in
    /// the basis of degree `d1 + d2`; empty when `d1 + d2 > dim`.
    table: Vec<Vec<Vec<Vec<Vec<i64>>>>>,
    point: usize,
    /// Integral of the point class. 1 for an honest ring; 2 for the model of a
    /// double cover whose classes are all pullbacks.
    point_weight: Q,
}

/// A product of two positive-degree basis classes: `(d1, i1) * (d2, i2) = coeffs`.
pub type Product = ((usize, usize), (usize, usize), Vec<i64>);

impl GradedRing {
    /// Builds a ring from the products of positive-degree basis classes.
    /// Unlisted products are zero; the unit (degree 0) is added implicitly
    /// and must not appear in `basis`.
    pub fn new(
        name: &str,
        dim: usize,
        positive_basis: Vec<Vec<&str>>,
        products: &[Product],
        point: usize,
    ) -> Result<Arc<Self>> {
        if positive_basis.len() != dim {
            return Err(Error::Usage(format!(
                "ring {name}: expected {dim} positive degrees, got {}",
                positive_basis.len()
            )));
        }
        let mut basis = vec![vec!["1".to_string()]];
        basis.extend(
            positive_basis
                .into_iter()
                .map(|b| b.into_iter().map(str::to_string).collect::<Vec<_>>()),
        );
        if dim > 0 && point >= basis[dim].len() {
            return Err(Error::Usage(format!("ring {name}: point class index out of range")));
        }
        let mut table: Vec<Vec<Vec<Vec<Vec<i64>>>>> = (0..=dim)
            .map(|d1| {
                (0..basis[d1].len())
                    .map(|_| {
                        (0..=dim)
                            .map(|d2| {
                                (0..basis[d2].len())
                                    .map(|_| {
                                        if d1 + d2 <= dim {
                                            vec![0; basis[d1 + d2].len()]
                                        } else {
                                            Vec::new()
                                        }
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        for d in 0..=dim {
            for i in 0..basis[d].len() {
                table[0][0][d][i][i] = 1;
                table[d][i][0][0][i] = 1;
            }
        }
        for ((d1, i1), (d2, i2), coeffs) in products {
            let (d1, i1, d2, i2) = (*d1, *i1, *d2, *i2);
            if d1 == 0 || d2 == 0 || d1 + d2 > dim {
                return Err(Error::Usage(format!(
                    "ring {name}: product ({d1},{i1})*({d2},{i2}) is implicit or above top degree"
                )));
            }
            if i1 >= basis[d1].len() || i2 >= basis[d2].len() || coeffs.len() != basis[d1 + d2].len() {
                return Err(Error::Usage(format!("ring {name}: malformed product entry")));
            }
            table[d1][i1][d2][i2] = coeffs.clone();
            table[d2][i2][d1][i1] = coeffs.clone();
        }
        let ring = GradedRing {
            name: name.to_string(),
            dim,
            basis,
            table,
            point,
            point_weight: Q::one(),
        };
        ring.check_axioms()?;
        Ok(Arc::new(ring))
    }

    /// A surface ring `1; divisors; pt` with the given intersection form on divisors.
    pub fn surface(name: &str, divisors: &[&str], form: &[Vec<i64>]) -> Result<Arc<Self>> {
        let mut products = Vec::new();
        for (i, row) in form.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if j >= i && v != 0 {
                    products.push(((1, i), (1, j), vec![v]));
                }
            }
        }
        Self::new(name, 2, vec![divisors.to_vec(), vec!["pt"]], &products, 0)
    }

    /// The ring of a smooth projective curve: `1; pt`.
    pub fn curve(name: &str) -> Result<Arc<Self>> {
        Self::new(name, 1, vec![vec!["pt"]], &[], 0)
    }

    /// Same multiplication table, integration functional multiplied by `weight`.
    pub fn with_point_weight(&self, weight: i64) -> Arc<Self> {
        let mut r = self.clone();
        r.name = format!("{}[x{}]", self.name, weight);
        r.point_weight = q(weight);
        Arc::new(r)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self, degree: usize) -> usize {
        self.basis.get(degree).map_or(0, Vec::len)
    }

    pub fn basis_names(&self, degree: usize) -> &[String] {
        &self.basis[degree]
    }

    pub fn point_index(&self) -> usize {
        self.point
    }

    pub fn point_weight(&self) -> &Q {
        &self.point_weight
    }

    fn product(&self, d1: usize, i1: usize, d2: usize, i2: usize) -> &[i64] {
        &self.table[d1][i1][d2][i2]
    }

    /// Same basis shape and table; used to move elements into a re-weighted copy.
    pub fn same_shape(&self, other: &GradedRing) -> bool {
        self.dim == other.dim && self.basis == other.basis && self.table == other.table
    }

    /// Exhaustive commutativity and associativity check on basis pairs and triples.
    pub fn check_axioms(&self) -> Result<()> {
        let idx: Vec<(usize, usize)> = (0..=self.dim)
            .flat_map(|d| (0..self.basis[d].len()).map(move |i| (d, i)))
            .collect();
        for &(d1, i1) in &idx {
            for &(d2, i2) in &idx {
                if d1 + d2 > self.dim {
                    continue;
                }
                if self.product(d1, i1, d2, i2) != self.product(d2, i2, d1, i1) {
                    return Err(Error::Usage(format!("ring {}: not commutative", self.name)));
                }
                for &(d3, i3) in &idx {
                    if d1 + d2 + d3 > self.dim {
                        continue;
                    }
                    let d12 = d1 + d2;
                    let d23 = d2 + d3;
                    let mut left = vec![0i64; self.basis[d12 + d3].len()];
                    for (k, &c) in self.product(d1, i1, d2, i2).iter().enumerate() {
                        for (m, &e) in self.product(d12, k, d3, i3).iter().enumerate() {
                            left[m] += c * e;
                        }
                    }
                    let mut right = vec![0i64; self.basis[d1 + d23].len()];
                    for (k, &c) in self.product(d2, i2, d3, i3).iter().enumerate() {
                        for (m, &e) in self.product(d1, i1, d23, k).iter().enumerate() {
                            right[m] += c * e;
                        }
                    }
                    if left != right {
                        return Err(Error::Usage(format!("ring {}: not associative", self.name)));
                    }
                }
            }
        }
        Ok(())
    }
}

fn same_ring(a: &Arc<GradedRing>, b: &Arc<GradedRing>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A sparse element of a [`GradedRing`]. Zero coefficients are never stored.
#[derive(Clone)]
pub struct RingElement {
    ring: Arc<GradedRing>,
    coeffs: BTreeMap<(usize, usize), Q>,
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.coeffs == other.coeffs
    }
}

impl Eq for RingElement {}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((d, i), c) in &self.coeffs {
            let name = &self.ring.basis[*d][*i];
            if !first {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let a = c.abs();
            if *d == 0 {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{name}")?;
            } else {
                write!(f, "{a}*{name}")?;
            }
            first = false;
        }
        Ok(())
    }
}

impl RingElement {
    pub fn zero(ring: &Arc<GradedRing>) -> Self {
        RingElement { ring: ring.clone(), coeffs: BTreeMap::new() }
    }

    pub fn one(ring: &Arc<GradedRing>) -> Self {
        Self::zero(ring).with(0, 0, Q::one())
    }

    pub fn basis(ring: &Arc<GradedRing>, degree: usize, index: usize) -> Self {
        Self::zero(ring).with(degree, index, Q::one())
    }

    /// The point class (integrates to the ring's point weight).
    pub fn point(ring: &Arc<GradedRing>) -> Self {
        Self::basis(ring, ring.dim, ring.point)
    }

    /// Homogeneous element of degree `degree` from integer coordinates.
    pub fn from_ints(ring: &Arc<GradedRing>, degree: usize, coords: &[i64]) -> Result<Self> {
        if degree > ring.dim || coords.len() != ring.rank(degree) {
            return Err(Error::Usage(format!(
                "expected {} coordinates in degree {degree} of {}",
                ring.rank(degree),
                ring.name
            )));
        }
        let mut e = Self::zero(ring);
        for (i, &c) in coords.iter().enumerate() {
            e = e.with(degree, i, q(c));
        }
        Ok(e)
    }

    fn with(mut self, degree: usize, index: usize, c: Q) -> Self {
        if degree > self.ring.dim {
            return self;
        }
        let slot = self.coeffs.entry((degree, index)).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&(degree, index));
        }
        self
    }

    pub fn ring(&self) -> &Arc<GradedRing> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficient(&self, degree: usize, index: usize) -> Q {
        self.coeffs.get(&(degree, index)).cloned().unwrap_or_else(Q::zero)
    }

    /// Coordinates of the degree-`degree` part in the named basis.
    pub fn coords(&self, degree: usize) -> Vec<Q> {
        (0..self.ring.rank(degree)).map(|i| self.coefficient(degree, i)).collect()
    }

    pub fn graded_part(&self, degree: usize) -> Self {
        RingElement {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().filter(|((d, _), _)| *d == degree).map(|(k, v)| (*k, v.clone())).collect(),
        }
    }

    pub fn constant_term(&self) -> Q {
        self.coefficient(0, 0)
    }

    /// Lowest degree carrying a non-zero coefficient.
    pub fn min_degree(&self) -> Option<usize> {
        self.coeffs.keys().map(|(d, _)| *d).min()
    }

    pub fn scale(&self, s: &Q) -> Self {
        if s.is_zero() {
            return Self::zero(&self.ring);
        }
        RingElement {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, v * s)).collect(),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(mismatch(&self.ring, &other.ring));
        }
        let mut out = self.clone();
        for ((d, i), c) in &other.coeffs {
            out = out.with(*d, *i, c.clone());
        }
        Ok(out)
    }

    /// Graded product, truncated above the top degree.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(mismatch(&self.ring, &other.ring));
        }
        let ring = &self.ring;
        let mut out = Self::zero(ring);
        for ((d1, i1), c1) in &self.coeffs {
            for ((d2, i2), c2) in &other.coeffs {
                if d1 + d2 > ring.dim {
                    continue;
                }
                let c = c1 * c2;
                for (k, &s) in ring.product(*d1, *i1, *d2, *i2).iter().enumerate() {
                    if s != 0 {
                        out = out.with(d1 + d2, k, &c * q(s));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut out = Self::one(&self.ring);
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Coefficient of the point class, times the ring's point weight.
    pub fn integrate(&self) -> Q {
        self.coefficient(self.ring.dim, self.ring.point) * &self.ring.point_weight
    }

    /// Intersection pairing `integrate(self * other)`.
    pub fn dot(&self, other: &Self) -> Q {
        (self * other).integrate()
    }

    /// Moves this element into a ring with identical basis and table
    /// (typically a re-weighted copy).
    pub fn transport(&self, ring: &Arc<GradedRing>) -> Result<Self> {
        if !self.ring.same_shape(ring) {
            return Err(mismatch(&self.ring, ring));
        }
        Ok(RingElement { ring: ring.clone(), coeffs: self.coeffs.clone() })
    }

    /// `exp(self)` truncated at the top degree; `self` must have no constant term.
    pub fn exp_trunc(&self) -> Result<Self> {
        exp_series(&self.ring, self)
    }

    /// `(exp(self) - 1) / self` as a truncated series.
    pub fn todd_inverse_series(&self) -> Result<Self> {
        todd_inverse_series(&self.ring, self)
    }
}

fn mismatch(a: &GradedRing, b: &GradedRing) -> Error {
    Error::Usage(format!("elements belong to different rings ({} vs {})", a.name, b.name))
}

impl Add for &RingElement {
    type Output = RingElement;
    fn add(self, rhs: &RingElement) -> RingElement {
        self.checked_add(rhs).expect("ring mismatch in addition")
    }
}

impl Sub for &RingElement {
    type Output = RingElement;
    fn sub(self, rhs: &RingElement) -> RingElement {
        self.checked_add(&-rhs).expect("ring mismatch in subtraction")
    }
}

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        self.scale(&-Q::one())
    }
}

impl std::ops::Mul for &RingElement {
    type Output = RingElement;
    fn mul(self, rhs: &RingElement) -> RingElement {
        RingElement::mul(self, rhs).expect("ring mismatch in product")
    }
}

/// A commutative algebra whose positive-degree part is nilpotent, so that
/// power series truncate after `top_degree` terms.
pub trait TruncatedAlgebra {
    type Elem: Clone;
    fn one(&self) -> Self::Elem;
    fn zero(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn scale(&self, a: &Self::Elem, s: &Q) -> Self::Elem;
    fn top_degree(&self) -> usize;
    fn constant_term(&self, a: &Self::Elem) -> Q;
}

impl TruncatedAlgebra for Arc<GradedRing> {
    type Elem = RingElement;
    fn one(&self) -> RingElement {
        RingElement::one(self)
    }
    fn zero(&self) -> RingElement {
        RingElement::zero(self)
    }
    fn add(&self, a: &RingElement, b: &RingElement) -> RingElement {
        a + b
    }
    fn mul(&self, a: &RingElement, b: &RingElement) -> RingElement {
        a * b
    }
    fn scale(&self, a: &RingElement, s: &Q) -> RingElement {
        a.scale(s)
    }
    fn top_degree(&self) -> usize {
        self.dim
    }
    fn constant_term(&self, a: &RingElement) -> Q {
        a.constant_term()
    }
}

/// `sum_k coeff(k) x^k` for `k = 0..=top_degree`; `x` must be nilpotent.
pub fn power_series<A: TruncatedAlgebra>(
    alg: &A,
    x: &A::Elem,
    coeff: impl Fn(usize) -> Q,
) -> Result<A::Elem> {
    if !alg.constant_term(x).is_zero() {
        return Err(Error::Usage("power series argument has a non-zero degree-0 part".into()));
    }
    let mut out = alg.zero();
    let mut term = alg.one();
    for k in 0..=alg.top_degree() {
        let c = coeff(k);
        if !c.is_zero() {
            out = alg.add(&out, &alg.scale(&term, &c));
        }
        term = alg.mul(&term, x);
    }
    Ok(out)
}

pub fn factorial(n: usize) -> Q {
    (1..=n).fold(Q::one(), |acc, k| acc * q(k as i64))
}

pub fn exp_series<A: TruncatedAlgebra>(alg: &A, x: &A::Elem) -> Result<A::Elem> {
    power_series(alg, x, |k| factorial(k).recip())
}

/// `(e^x - 1)/x = sum_k x^k / (k+1)!`.
pub fn todd_inverse_series<A: TruncatedAlgebra>(alg: &A, x: &A::Elem) -> Result<A::Elem> {
    power_series(alg, x, |k| factorial(k + 1).recip())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f1() -> Arc<GradedRing> {
        GradedRing::surface("F1", &["h", "e"], &[vec![1, 0], vec![0, -1]]).unwrap()
    }

    fn p1xp1() -> Arc<GradedRing> {
        GradedRing::surface("P1xP1", &["f1", "f2"], &[vec![0, 1], vec![1, 0]]).unwrap()
    }

    fn p2() -> Arc<GradedRing> {
        GradedRing::surface("P2", &["L"], &[vec![1]]).unwrap()
    }

    #[test]
    fn difference_of_squares_on_f1() {
        let r = f1();
        let h = RingElement::from_ints(&r, 1, &[1, 0]).unwrap();
        let e = RingElement::from_ints(&r, 1, &[0, 1]).unwrap();
        let prod = (&h + &e).mul(&(&h - &e)).unwrap();
        assert_eq!(prod, RingElement::point(&r).scale(&q(2)));
    }

    #[test]
    fn unit_is_identity() {
        let r = f1();
        let x = RingElement::from_ints(&r, 1, &[3, -1]).unwrap();
        assert_eq!(&RingElement::one(&r) * &x, x);
    }

    #[test]
    fn ruling_sum_squared() {
        let r = p1xp1();
        let s = RingElement::from_ints(&r, 1, &[1, 1]).unwrap();
        assert_eq!(&s * &s, RingElement::point(&r).scale(&q(2)));
    }

    #[test]
    fn integrate_picks_top_degree_only() {
        let r = p2();
        assert_eq!(RingElement::point(&r).integrate(), q(1));
        assert_eq!(RingElement::from_ints(&r, 1, &[1]).unwrap().integrate(), q(0));
        let k = RingElement::from_ints(&f1(), 1, &[3, -1]).unwrap();
        assert_eq!(k.pow(2).integrate(), q(8));
    }

    #[test]
    fn exp_examples() {
        let r = p2();
        assert_eq!(RingElement::zero(&r).exp_trunc().unwrap(), RingElement::one(&r));
        let l = RingElement::from_ints(&r, 1, &[1]).unwrap();
        let expected = &(&RingElement::one(&r) + &l) + &RingElement::point(&r).scale(&Q::new(1.into(), 2.into()));
        assert_eq!(l.exp_trunc().unwrap(), expected);

        let s = p1xp1();
        let f = RingElement::from_ints(&s, 1, &[1, 0]).unwrap();
        assert_eq!(f.exp_trunc().unwrap(), &RingElement::one(&s) + &f);
    }

    #[test]
    fn exp_rejects_constant_term() {
        let r = p2();
        assert!(RingElement::one(&r).exp_trunc().is_err());
    }

    #[test]
    fn todd_inverse_of_point_class() {
        let r = p2();
        let l = RingElement::from_ints(&r, 1, &[2]).unwrap();
        // 1 + x/2 + x^2/6 with x^2 = 4 pt
        let got = l.todd_inverse_series().unwrap();
        assert_eq!(got.coefficient(1, 0), q(1));
        assert_eq!(got.coefficient(2, 0), Q::new(2.into(), 3.into()));
    }

    #[test]
    fn mismatched_rings_are_rejected() {
        let a = RingElement::one(&p2());
        let b = RingElement::one(&f1());
        assert!(matches!(a.mul(&b), Err(Error::Usage(_))));
        assert!(a.checked_add(&b).is_err());
    }

    #[test]
    fn broken_table_fails_axiom_check() {
        // (u*u)*v = w*v = pt but u*(u*v) = 0
        let bad = GradedRing::new(
            "bad",
            3,
            vec![vec!["u", "v"], vec!["w"], vec!["pt"]],
            &[((1, 0), (1, 0), vec![1]), ((1, 1), (2, 0), vec![1])],
            0,
        );
        assert!(bad.is_err());
    }

    #[test]
    fn weighted_copy_doubles_integrals() {
        let r = p2();
        let r2 = r.with_point_weight(2);
        let pt = RingElement::point(&r).transport(&r2).unwrap();
        assert_eq!(pt.integrate(), q(2));
        assert_ne!(RingElement::point(&r), pt);
    }
}
