//! Chow ring of a split P2-bundle Z = P_T(O(D1) + O(D2) + O(D3)) over T.
//!
//! Classes are kept in the normal form `c0 + c1 H + c2 H^2` with `c_k`
//! pulled back from T, using the relation `(H - D1)(H - D2)(H - D3) = 0`.

use std::fmt;
use std::sync::Arc;

use crate::bases::BaseVariety;
use crate::error::{Error, Result};
use crate::iring::{GradedRing, RingElement, TruncatedAlgebra};
use crate::linalg::{q, Q};

#[derive(Clone, PartialEq, Eq)]
pub struct ZClass {
    /// `c[k]` is the coefficient of H^k.
    pub c: [RingElement; 3],
}

impl fmt::Debug for ZClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({}) H + ({}) H^2", self.c[0], self.c[1], self.c[2])
    }
}

impl ZClass {
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(RingElement::is_zero)
    }

    pub fn scale(&self, s: &Q) -> ZClass {
        ZClass { c: [self.c[0].scale(s), self.c[1].scale(s), self.c[2].scale(s)] }
    }

    /// Homogeneous part of degree `d`.
    pub fn graded_part(&self, d: usize) -> ZClass {
        let part = |k: usize| {
            if d >= k {
                self.c[k].graded_part(d - k)
            } else {
                RingElement::zero(self.c[k].ring())
            }
        };
        ZClass { c: [part(0), part(1), part(2)] }
    }

    pub fn constant_term(&self) -> Q {
        self.c[0].constant_term()
    }
}

impl std::ops::Add for &ZClass {
    type Output = ZClass;
    fn add(self, o: &ZClass) -> ZClass {
        ZClass { c: [&self.c[0] + &o.c[0], &self.c[1] + &o.c[1], &self.c[2] + &o.c[2]] }
    }
}

impl std::ops::Sub for &ZClass {
    type Output = ZClass;
    fn sub(self, o: &ZClass) -> ZClass {
        ZClass { c: [&self.c[0] - &o.c[0], &self.c[1] - &o.c[1], &self.c[2] - &o.c[2]] }
    }
}

impl std::ops::Neg for &ZClass {
    type Output = ZClass;
    fn neg(self) -> ZClass {
        ZClass { c: [-&self.c[0], -&self.c[1], -&self.c[2]] }
    }
}

#[derive(Debug, Clone)]
pub struct PBundleModel {
    pub base: BaseVariety,
    pub d: [RingElement; 3],
    /// Elementary symmetric functions sigma_1..sigma_3 of the D_i.
    sigma: [RingElement; 3],
}

/// A codimension-2 center in Z with everything the blow-up formulas need.
#[derive(Debug, Clone)]
pub struct SectionData {
    /// 1..=3 for the split sections, 1 also for the double cover in Construction B.
    pub index: usize,
    pub double_cover: bool,
    /// Chow ring of the center: T's ring, with doubled integration for a double cover.
    pub ring: Arc<GradedRing>,
    /// H restricted to the center, as a pullback from T.
    pub h_restriction: RingElement,
    /// Chern roots of the conormal bundle, as classes on T.
    pub conormal: (RingElement, RingElement),
    pub class: ZClass,
    pub degree_over_base: u32,
}

impl SectionData {
    /// Restriction of a class on Z to the center, in the center's ring.
    pub fn restrict(&self, x: &ZClass) -> RingElement {
        let h = &self.h_restriction;
        let on_t = &(&x.c[0] + &(&x.c[1] * h)) + &(&x.c[2] * &(h * h));
        on_t.transport(&self.ring).expect("center ring has the shape of T")
    }

    /// A class on T viewed on the center.
    pub fn from_base(&self, x: &RingElement) -> RingElement {
        x.transport(&self.ring).expect("center ring has the shape of T")
    }
}

impl PBundleModel {
    pub fn new(base: BaseVariety, d: [RingElement; 3]) -> Result<Self> {
        for di in &d {
            if !Arc::ptr_eq(di.ring(), &base.ring) && **di.ring() != *base.ring {
                return Err(Error::Usage("twist divisors must live on the base ring".into()));
            }
            if di.graded_part(1) != *di {
                return Err(Error::Usage("twists must be divisor classes".into()));
            }
        }
        let s1 = &(&d[0] + &d[1]) + &d[2];
        let s2 = &(&(&d[0] * &d[1]) + &(&d[0] * &d[2])) + &(&d[1] * &d[2]);
        let s3 = &(&d[0] * &d[1]) * &d[2];
        Ok(PBundleModel { base, d, sigma: [s1, s2, s3] })
    }

    pub fn ring(&self) -> &Arc<GradedRing> {
        &self.base.ring
    }

    pub fn dim(&self) -> usize {
        self.base.dim() + 2
    }

    pub fn zero(&self) -> ZClass {
        let z = RingElement::zero(self.ring());
        ZClass { c: [z.clone(), z.clone(), z] }
    }

    pub fn one(&self) -> ZClass {
        self.pullback(&RingElement::one(self.ring()))
    }

    pub fn pullback(&self, a: &RingElement) -> ZClass {
        let z = RingElement::zero(self.ring());
        ZClass { c: [a.clone(), z.clone(), z] }
    }

    /// The tautological class H = c_1(O(1)).
    pub fn h(&self) -> ZClass {
        let z = RingElement::zero(self.ring());
        ZClass { c: [z.clone(), RingElement::one(self.ring()), z] }
    }

    /// F_i = H - D_i, i in 1..=3.
    pub fn f(&self, i: usize) -> ZClass {
        &self.h() - &self.pullback(&self.d[i - 1])
    }

    /// Reduces `sum_k a_k H^k` (any length) to normal form.
    pub fn reduce(&self, mut a: Vec<RingElement>) -> ZClass {
        while a.len() < 3 {
            a.push(RingElement::zero(self.ring()));
        }
        for k in (3..a.len()).rev() {
            let c = a[k].clone();
            if c.is_zero() {
                continue;
            }
            a[k - 1] = &a[k - 1] + &(&c * &self.sigma[0]);
            a[k - 2] = &a[k - 2] - &(&c * &self.sigma[1]);
            a[k - 3] = &a[k - 3] + &(&c * &self.sigma[2]);
        }
        ZClass { c: [a[0].clone(), a[1].clone(), a[2].clone()] }
    }

    /// Polynomial in H with T coefficients, before reduction.
    pub fn expand_mul(&self, x: &[RingElement], y: &[RingElement]) -> Vec<RingElement> {
        let mut out = vec![RingElement::zero(self.ring()); x.len() + y.len() - 1];
        for (i, a) in x.iter().enumerate() {
            for (j, b) in y.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        out
    }

    pub fn mul(&self, x: &ZClass, y: &ZClass) -> ZClass {
        self.reduce(self.expand_mul(&x.c, &y.c))
    }

    pub fn pow(&self, x: &ZClass, n: usize) -> ZClass {
        (0..n).fold(self.one(), |acc, _| self.mul(&acc, x))
    }

    /// Degree of a normal-form class: the H^2 coefficient integrated on T.
    pub fn integrate(&self, x: &ZClass) -> Q {
        x.c[2].integrate()
    }

    /// Complete homogeneous symmetric polynomial h_j(D1, D2, D3), by monomials.
    pub fn complete_symmetric(&self, j: usize) -> RingElement {
        let mut out = RingElement::zero(self.ring());
        for a in 0..=j {
            for b in 0..=(j - a) {
                let c = j - a - b;
                out = &out + &(&(&self.d[0].pow(a) * &self.d[1].pow(b)) * &self.d[2].pow(c));
            }
        }
        out
    }

    /// Integral of an unreduced polynomial via `phi_* H^(2+j) = h_j(D)`.
    pub fn pushforward_integrate(&self, a: &[RingElement]) -> Q {
        a.iter()
            .enumerate()
            .skip(2)
            .map(|(k, c)| (c * &self.complete_symmetric(k - 2)).integrate())
            .sum()
    }

    /// Anticanonical class -K_Z = 3H + (-K_T - D1 - D2 - D3).
    pub fn anticanonical(&self) -> ZClass {
        let base = &self.base.anticanonical() - &self.sigma[0];
        &self.h().scale(&q(3)) + &self.pullback(&base)
    }

    /// Section S_i cut out by the two complementary summands.
    pub fn section(&self, i: usize) -> Result<SectionData> {
        if !(1..=3).contains(&i) {
            return Err(Error::Usage(format!("section index must be 1, 2 or 3, got {i}")));
        }
        let (j, k) = match i {
            1 => (2, 3),
            2 => (1, 3),
            _ => (1, 2),
        };
        let di = &self.d[i - 1];
        Ok(SectionData {
            index: i,
            double_cover: false,
            ring: self.ring().clone(),
            h_restriction: di.clone(),
            conormal: (&self.d[j - 1] - di, &self.d[k - 1] - di),
            class: self.mul(&self.f(j), &self.f(k)),
            degree_over_base: 1,
        })
    }

    /// Center S1 of Construction B: a complete intersection of |H| and |2H|,
    /// a double cover of T branched along a member of |2N|.
    pub fn ci_center(&self) -> Result<SectionData> {
        if !self.d[1].is_zero() || !self.d[2].is_zero() {
            return Err(Error::Usage("the complete-intersection center needs D = (N, 0, 0)".into()));
        }
        let n = &self.d[0];
        if n.is_zero() {
            return Err(Error::ZeroTwist);
        }
        let h = self.h();
        Ok(SectionData {
            index: 1,
            double_cover: true,
            ring: self.ring().with_point_weight(2),
            h_restriction: n.clone(),
            conormal: (-n, &(-n) + &(-n)),
            class: self.mul(&h, &h.scale(&q(2))),
            degree_over_base: 2,
        })
    }
}

impl TruncatedAlgebra for PBundleModel {
    type Elem = ZClass;
    fn one(&self) -> ZClass {
        PBundleModel::one(self)
    }
    fn zero(&self) -> ZClass {
        PBundleModel::zero(self)
    }
    fn add(&self, a: &ZClass, b: &ZClass) -> ZClass {
        a + b
    }
    fn mul(&self, a: &ZClass, b: &ZClass) -> ZClass {
        PBundleModel::mul(self, a, b)
    }
    fn scale(&self, a: &ZClass, s: &Q) -> ZClass {
        a.scale(s)
    }
    fn top_degree(&self) -> usize {
        self.dim()
    }
    fn constant_term(&self, a: &ZClass) -> Q {
        a.constant_term()
    }
}

pub fn z_mul(m: &PBundleModel, x: &ZClass, y: &ZClass) -> ZClass {
    m.mul(x, y)
}

pub fn z_integrate(m: &PBundleModel, x: &ZClass) -> Q {
    m.integrate(x)
}

pub fn canonical_class(m: &PBundleModel) -> ZClass {
    -&m.anticanonical()
}

/// `(-K_Z)^dim Z` by expanding `(3H + beta)^n` without reduction and pushing forward.
pub fn anticanonical_degree_by_pushforward(m: &PBundleModel) -> Q {
    let a = m.anticanonical();
    let poly = vec![a.c[0].clone(), a.c[1].clone()];
    let mut acc = vec![RingElement::one(m.ring())];
    for _ in 0..m.dim() {
        acc = m.expand_mul(&acc, &poly);
    }
    m.pushforward_integrate(&acc)
}
