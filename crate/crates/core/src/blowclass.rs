//! Classes on the blow-up h: X -> Z along disjoint codimension-2 centers.
//!
//! A class is `h^* z + sum_i j_i*(g0 + g1 zeta_i)` where `j_i: E_i -> X` is the
//! exceptional divisor over S_i and `zeta_i = -E_i|E_i` satisfies
//! `zeta^2 = (A + B) zeta - A B` for conormal roots A, B of S_i.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::iring::{exp_series, factorial, todd_inverse_series, GradedRing, RingElement, TruncatedAlgebra};
use crate::linalg::{q, Q};
use crate::pbundle::{PBundleModel, SectionData, ZClass};

#[derive(Debug, Clone)]
pub struct CenterModel {
    pub label: String,
    pub data: SectionData,
    /// A + B on S.
    sum: RingElement,
    /// A B on S.
    prod: RingElement,
}

impl CenterModel {
    pub fn new(label: &str, data: SectionData) -> Self {
        let a = data.from_base(&data.conormal.0);
        let b = data.from_base(&data.conormal.1);
        CenterModel { label: label.to_string(), sum: &a + &b, prod: &a * &b, data }
    }

    pub fn ring(&self) -> &Arc<GradedRing> {
        &self.data.ring
    }

    pub fn restrict(&self, x: &ZClass) -> RingElement {
        self.data.restrict(x)
    }

    /// First Chern class of the normal bundle, -(A + B).
    pub fn normal_c1(&self) -> RingElement {
        -&self.sum
    }

    /// The algebra of classes `g0 + g1 zeta` on the exceptional divisor.
    pub fn exceptional_algebra(&self) -> ExceptionalAlgebra<'_> {
        ExceptionalAlgebra { center: self }
    }

    /// Checks that restriction is multiplicative on H and the base divisors.
    pub fn check_restriction(&self, z: &PBundleModel) -> Result<()> {
        let mut gens = vec![z.h()];
        for i in 0..z.ring().rank(1) {
            gens.push(z.pullback(&RingElement::basis(z.ring(), 1, i)));
        }
        for x in &gens {
            for y in &gens {
                let lhs = self.restrict(&z.mul(x, y));
                let rhs = &self.restrict(x) * &self.restrict(y);
                if lhs != rhs {
                    return Err(Error::Model(format!("restriction to {} is not multiplicative", self.label)));
                }
            }
        }
        Ok(())
    }
}

/// `A(S)[zeta] / (zeta^2 - (A+B) zeta + AB)`, the Chow ring of E = P(N).
pub struct ExceptionalAlgebra<'a> {
    center: &'a CenterModel,
}

pub type EClass = (RingElement, RingElement);

impl TruncatedAlgebra for ExceptionalAlgebra<'_> {
    type Elem = EClass;
    fn one(&self) -> EClass {
        (RingElement::one(self.center.ring()), RingElement::zero(self.center.ring()))
    }
    fn zero(&self) -> EClass {
        (RingElement::zero(self.center.ring()), RingElement::zero(self.center.ring()))
    }
    fn add(&self, a: &EClass, b: &EClass) -> EClass {
        (&a.0 + &b.0, &a.1 + &b.1)
    }
    fn mul(&self, a: &EClass, b: &EClass) -> EClass {
        let top = &a.1 * &b.1;
        (
            &(&a.0 * &b.0) - &(&top * &self.center.prod),
            &(&(&a.0 * &b.1) + &(&a.1 * &b.0)) + &(&top * &self.center.sum),
        )
    }
    fn scale(&self, a: &EClass, s: &Q) -> EClass {
        (a.0.scale(s), a.1.scale(s))
    }
    fn top_degree(&self) -> usize {
        self.center.ring().dim() + 1
    }
    fn constant_term(&self, a: &EClass) -> Q {
        a.0.constant_term()
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct MixedClass {
    pub z: ZClass,
    /// Per center, `(g0, g1)` standing for `j_*(g0 + g1 zeta)`.
    pub e: Vec<EClass>,
}

impl fmt::Debug for MixedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h*[{:?}]", self.z)?;
        for (i, (a, b)) in self.e.iter().enumerate() {
            if !a.is_zero() || !b.is_zero() {
                write!(f, " + j{}*[({}) + ({}) z]", i + 1, a, b)?;
            }
        }
        Ok(())
    }
}

impl MixedClass {
    pub fn scale(&self, s: &Q) -> MixedClass {
        MixedClass { z: self.z.scale(s), e: self.e.iter().map(|(a, b)| (a.scale(s), b.scale(s))).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.z.is_zero() && self.e.iter().all(|(a, b)| a.is_zero() && b.is_zero())
    }

    /// Homogeneous part of codimension `d` in X.
    pub fn graded_part(&self, d: usize) -> MixedClass {
        let part = |x: &RingElement, shift: usize| {
            if d >= shift {
                x.graded_part(d - shift)
            } else {
                RingElement::zero(x.ring())
            }
        };
        MixedClass {
            z: self.z.graded_part(d),
            e: self.e.iter().map(|(a, b)| (part(a, 1), part(b, 2))).collect(),
        }
    }
}

impl std::ops::Add for &MixedClass {
    type Output = MixedClass;
    fn add(self, o: &MixedClass) -> MixedClass {
        MixedClass {
            z: &self.z + &o.z,
            e: self.e.iter().zip(&o.e).map(|(a, b)| (&a.0 + &b.0, &a.1 + &b.1)).collect(),
        }
    }
}

impl std::ops::Sub for &MixedClass {
    type Output = MixedClass;
    fn sub(self, o: &MixedClass) -> MixedClass {
        self + &o.scale(&q(-1))
    }
}

impl std::ops::Neg for &MixedClass {
    type Output = MixedClass;
    fn neg(self) -> MixedClass {
        self.scale(&q(-1))
    }
}

#[derive(Debug, Clone)]
pub struct BlowupModel {
    pub z: PBundleModel,
    pub centers: Vec<CenterModel>,
}

impl BlowupModel {
    pub fn new(z: PBundleModel, centers: Vec<CenterModel>) -> Result<Self> {
        if centers.len() > 3 {
            return Err(Error::Usage("at most three centers".into()));
        }
        for c in &centers {
            c.check_restriction(&z)?;
        }
        Ok(BlowupModel { z, centers })
    }

    pub fn dim(&self) -> usize {
        self.z.dim()
    }

    fn zero_e(&self) -> Vec<EClass> {
        self.centers.iter().map(|c| (RingElement::zero(c.ring()), RingElement::zero(c.ring()))).collect()
    }

    pub fn zero(&self) -> MixedClass {
        MixedClass { z: self.z.zero(), e: self.zero_e() }
    }

    pub fn one(&self) -> MixedClass {
        self.pullback(&self.z.one())
    }

    pub fn pullback(&self, z: &ZClass) -> MixedClass {
        MixedClass { z: z.clone(), e: self.zero_e() }
    }

    /// Pullback of a class from T.
    pub fn from_base(&self, a: &RingElement) -> MixedClass {
        self.pullback(&self.z.pullback(a))
    }

    /// `j_i*(g0 + g1 zeta)` for center index `i` (0-based).
    pub fn pushforward(&self, i: usize, g0: &RingElement, g1: &RingElement) -> MixedClass {
        let mut x = self.zero();
        x.e[i] = (g0.clone(), g1.clone());
        x
    }

    /// Exceptional divisor E over center `i` (0-based).
    pub fn exceptional(&self, i: usize) -> MixedClass {
        let r = self.centers[i].ring();
        self.pushforward(i, &RingElement::one(r), &RingElement::zero(r))
    }

    /// Fiber of E_i over a point of S_i.
    pub fn exceptional_fiber(&self, i: usize) -> MixedClass {
        let c = &self.centers[i];
        let pt = RingElement::point(c.ring()).scale(&c.ring().point_weight().recip());
        self.pushforward(i, &pt, &RingElement::zero(c.ring()))
    }

    pub fn mul(&self, x: &MixedClass, y: &MixedClass) -> MixedClass {
        let mut out = self.pullback(&self.z.mul(&x.z, &y.z));
        for (i, c) in self.centers.iter().enumerate() {
            let alg = c.exceptional_algebra();
            let rx = c.restrict(&x.z);
            let ry = c.restrict(&y.z);
            // h^*x . j_*g = j_*(x|S g), and j_*g . j_*g' = j_*(-zeta g g').
            let mut acc = alg.add(
                &(&rx * &y.e[i].0, &rx * &y.e[i].1),
                &(&ry * &x.e[i].0, &ry * &x.e[i].1),
            );
            let gg = alg.mul(&x.e[i], &y.e[i]);
            let zeta = (RingElement::zero(c.ring()), RingElement::one(c.ring()));
            let minus_zeta_gg = alg.scale(&alg.mul(&zeta, &gg), &q(-1));
            acc = alg.add(&acc, &minus_zeta_gg);
            out.e[i] = acc;
        }
        out
    }

    pub fn pow(&self, x: &MixedClass, n: usize) -> MixedClass {
        (0..n).fold(self.one(), |acc, _| self.mul(&acc, x))
    }

    pub fn integrate(&self, x: &MixedClass) -> Q {
        let mut total = self.z.integrate(&x.z);
        for (_, g1) in &x.e {
            total += g1.integrate();
        }
        total
    }

    /// -K_X = h^*(-K_Z) - sum E_i.
    pub fn anticanonical(&self) -> MixedClass {
        let mut x = self.pullback(&self.z.anticanonical());
        for i in 0..self.centers.len() {
            x = &x - &self.exceptional(i);
        }
        x
    }

    /// Chern character of T_X.
    pub fn chern_character(&self) -> MixedClass {
        let z = &self.z;
        let t = &z.base;
        let mut ch_z = z.pullback(&t.tangent_chern_character());
        for k in 1..=3 {
            let e = exp_series(z, &z.f(k)).expect("F_k has no constant term");
            ch_z = &ch_z + &e;
        }
        ch_z = &ch_z - &z.one();
        let mut ch = self.pullback(&ch_z);
        for (i, c) in self.centers.iter().enumerate() {
            let alg = c.exceptional_algebra();
            let zeta = (RingElement::zero(c.ring()), RingElement::one(c.ring()));
            let q_c1 = (c.normal_c1(), RingElement::one(c.ring()));
            let ch_q = exp_series(&alg, &q_c1).expect("nilpotent");
            let td_inv = todd_inverse_series(&alg, &zeta).expect("nilpotent");
            let corr = alg.mul(&ch_q, &td_inv);
            ch = &ch - &self.pushforward(i, &corr.0, &corr.1);
        }
        ch
    }

    /// Total Chern class pieces c_0..c_dim from the Chern character.
    pub fn chern_classes(&self) -> Vec<MixedClass> {
        let n = self.dim();
        let ch = self.chern_character();
        let p: Vec<MixedClass> = (0..=n).map(|i| ch.graded_part(i).scale(&factorial(i))).collect();
        let mut c = vec![self.one()];
        for k in 1..=n {
            let mut acc = self.zero();
            for i in 1..=k {
                let term = self.mul(&c[k - i], &p[i]);
                acc = if i % 2 == 1 { &acc + &term } else { &acc - &term };
            }
            c.push(acc.scale(&q(k as i64).recip()));
        }
        c
    }

    /// Todd class through degree 4.
    pub fn todd(&self, c: &[MixedClass]) -> MixedClass {
        let get = |k: usize| if k < c.len() { c[k].clone() } else { self.zero() };
        let (c1, c2, c3, c4) = (get(1), get(2), get(3), get(4));
        let m = |a: &MixedClass, b: &MixedClass| self.mul(a, b);
        let c1sq = m(&c1, &c1);
        let c1c2 = m(&c1, &c2);
        let mut td = &self.one() + &c1.scale(&Q::new(1.into(), 2.into()));
        td = &td + &(&c1sq + &c2).scale(&Q::new(1.into(), 12.into()));
        td = &td + &c1c2.scale(&Q::new(1.into(), 24.into()));
        let deg4 = &(&(&(&(-&m(&c1sq, &c1sq)) + &m(&c1sq, &c2).scale(&q(4))) + &m(&c1, &c3)) + &m(&c2, &c2).scale(&q(3)))
            - &c4;
        &td + &deg4.scale(&Q::new(1.into(), 720.into()))
    }

    pub fn characteristic_numbers(&self) -> Result<CharacteristicNumbers> {
        let n = self.dim();
        if !(3..=4).contains(&n) {
            return Err(Error::Unsupported(format!("characteristic numbers in dimension {n}")));
        }
        let c = self.chern_classes();
        let td = self.todd(&c);
        let mk = self.anticanonical();
        let to_i = |x: Q| -> Result<i64> {
            if x.is_integer() {
                Ok(i64::try_from(x.to_integer()).expect("small"))
            } else {
                Err(Error::Model(format!("characteristic number {x} is not an integer")))
            }
        };
        let k_top = to_i(self.integrate(&self.pow(&mk, n)))?;
        let k2c2 = if n == 4 { Some(to_i(self.integrate(&self.mul(&self.pow(&mk, 2), &c[2])))?) } else { None };
        let exp_mk = exp_series(self, &mk).expect("nilpotent");
        let chi_minus_k = to_i(self.integrate(&self.mul(&exp_mk, &td)))?;
        let chi_t = to_i(self.integrate(&self.mul(&self.chern_character(), &td)))?;
        let euler = to_i(self.integrate(&c[n]))?;
        let chi_o = to_i(self.integrate(&td))?;
        Ok(CharacteristicNumbers { dim: n, k_top, k2c2, chi_minus_k, chi_t, euler, chi_o })
    }
}

impl TruncatedAlgebra for BlowupModel {
    type Elem = MixedClass;
    fn one(&self) -> MixedClass {
        BlowupModel::one(self)
    }
    fn zero(&self) -> MixedClass {
        BlowupModel::zero(self)
    }
    fn add(&self, a: &MixedClass, b: &MixedClass) -> MixedClass {
        a + b
    }
    fn mul(&self, a: &MixedClass, b: &MixedClass) -> MixedClass {
        BlowupModel::mul(self, a, b)
    }
    fn scale(&self, a: &MixedClass, s: &Q) -> MixedClass {
        a.scale(s)
    }
    fn top_degree(&self) -> usize {
        self.dim()
    }
    fn constant_term(&self, a: &MixedClass) -> Q {
        a.z.constant_term()
    }
}

/// `(-K)^n`, `K^2 c_2` (dim 4), `chi(-K)`, `chi(T_X)`, Euler number and `chi(O)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharacteristicNumbers {
    pub dim: usize,
    pub k_top: i64,
    pub k2c2: Option<i64>,
    pub chi_minus_k: i64,
    pub chi_t: i64,
    pub euler: i64,
    pub chi_o: i64,
}

pub fn x_mul(m: &BlowupModel, x: &MixedClass, y: &MixedClass) -> MixedClass {
    m.mul(x, y)
}

pub fn x_integrate(m: &BlowupModel, x: &MixedClass) -> Q {
    m.integrate(x)
}

/// `int_X h^*beta . E^k` by the closed formula `(-1)^(k-1) int_S beta|S h_{k-2}(A, B)`.
pub fn exceptional_power_integral(m: &BlowupModel, i: usize, beta: &ZClass, k: usize) -> Q {
    if k == 0 {
        return m.z.integrate(beta);
    }
    if k == 1 {
        return Q::zero();
    }
    let c = &m.centers[i];
    let a = c.data.from_base(&c.data.conormal.0);
    let b = c.data.from_base(&c.data.conormal.1);
    let j = k - 2;
    let mut h = RingElement::zero(c.ring());
    for p in 0..=j {
        h = &h + &(&a.pow(p) * &b.pow(j - p));
    }
    let sign = if (k - 1) % 2 == 0 { Q::one() } else { -Q::one() };
    sign * (&c.restrict(beta) * &h).integrate()
}
