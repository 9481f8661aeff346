//! Building X from (T, D) or (T, N), the Fano criteria, the divisor catalog,
//! curve classes, Hodge numbers and the invariant report.

use num_traits::Signed;
use serde::Serialize;

use crate::bases::{double_cover_euler, double_cover_invariants, BaseKind, BaseVariety};
use crate::blowclass::{BlowupModel, CenterModel, CharacteristicNumbers, MixedClass};
use crate::cone::{ne_model, NEModel};
use crate::error::{Error, Result};
use crate::iring::RingElement;
use crate::linalg::{kernel, primitive_i64, q, rank, Q};
use crate::pbundle::PBundleModel;
use crate::Construction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Validated,
    /// B-model whose twist is not nef: a smooth center is not guaranteed.
    ExistenceUnverified,
}

/// An exceptional divisor of sigma: a P1-bundle P(O(a) + O(b)) over T or S1,
/// with -K_X restricting to the tautological class.
#[derive(Debug, Clone, Serialize)]
pub struct DivisorInfo {
    pub label: String,
    pub fibered_over: String,
    /// Coordinates of a and b on T (pulled back when fibered over S1).
    pub bundle: [Vec<i64>; 2],
    #[serde(skip)]
    pub class: MixedClass,
}

#[derive(Debug, Clone)]
pub struct FanoModel {
    pub construction: Construction,
    pub base: BaseVariety,
    /// Twist coordinates: (D1, D2, D3) for A, (N) for B.
    pub params: Vec<Vec<i64>>,
    pub blowup: BlowupModel,
    pub dim: usize,
    pub rho: usize,
    pub delta: usize,
    pub toric: bool,
    pub divisors: Vec<DivisorInfo>,
    pub fiber_info: String,
    pub status: Status,
}

fn sub_digit(i: usize) -> char {
    char::from_u32(0x2080 + i as u32).expect("subscript digit")
}

fn coords_add(a: &[i64], b: &[i64], s: i64) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

/// Construction A over T with twists D1, D2, D3 (coordinates on T).
pub fn build_a(t: &BaseVariety, d: &[Vec<i64>]) -> Result<FanoModel> {
    if d.len() != 3 {
        return Err(Error::Usage(format!("construction A takes three twists, got {}", d.len())));
    }
    let dr: Vec<RingElement> = d.iter().map(|c| t.divisor(c)).collect::<Result<_>>()?;
    let mk = t.anticanonical();
    for i in 0..3 {
        for j in 0..3 {
            let test = &(&mk + &dr[i]) - &dr[j];
            if !t.is_ample(&test) {
                return Err(Error::NotFano {
                    condition: format!("−K_T + D{} − D{}", sub_digit(i + 1), sub_digit(j + 1)),
                    pair: Some((i + 1, j + 1)),
                });
            }
        }
    }
    let z = PBundleModel::new(t.clone(), [dr[0].clone(), dr[1].clone(), dr[2].clone()])?;
    let centers = (1..=3).map(|i| Ok(CenterModel::new(&format!("S{i}"), z.section(i)?))).collect::<Result<Vec<_>>>()?;
    let blowup = BlowupModel::new(z, centers)?;

    let k = t.divisor_coords(&t.anticanonical());
    let mut divisors = Vec::new();
    let ex: Vec<MixedClass> = (0..3).map(|i| blowup.exceptional(i)).collect();
    for i in 0..3 {
        let (j, l) = ((i + 1) % 3, (i + 2) % 3);
        let (j, l) = (j.min(l), j.max(l));
        divisors.push(DivisorInfo {
            label: format!("E{}", i + 1),
            fibered_over: "T".into(),
            bundle: [coords_add(&coords_add(&k, &d[i], 1), &d[j], -1), coords_add(&coords_add(&k, &d[i], 1), &d[l], -1)],
            class: ex[i].clone(),
        });
    }
    for i in 0..3 {
        let (j, l) = ((i + 1) % 3, (i + 2) % 3);
        let (j, l) = (j.min(l), j.max(l));
        let class = &(&blowup.pullback(&blowup.z.f(i + 1)) - &ex[j]) - &ex[l];
        divisors.push(DivisorInfo {
            label: format!("E{}'", i + 1),
            fibered_over: "T".into(),
            bundle: [coords_add(&coords_add(&k, &d[j], 1), &d[i], -1), coords_add(&coords_add(&k, &d[l], 1), &d[i], -1)],
            class,
        });
    }
    Ok(FanoModel {
        construction: Construction::A,
        rho: t.rho + 4,
        dim: t.dim() + 2,
        delta: 3,
        toric: t.kind.is_toric(),
        base: t.clone(),
        params: d.to_vec(),
        blowup,
        divisors,
        fiber_info: "every fiber is P2 blown up at three non-collinear points".into(),
        status: Status::Validated,
    })
}

/// Construction B over T with twist N (coordinates on T).
pub fn build_b(t: &BaseVariety, n: &[i64]) -> Result<FanoModel> {
    let nr = t.divisor(n)?;
    if nr.is_zero() {
        return Err(Error::ZeroTwist);
    }
    let mk = t.anticanonical();
    for (sign, text) in [(1, "−K_T + N"), (-1, "−K_T − N")] {
        let test = &mk + &nr.scale(&q(sign));
        if !t.is_ample(&test) {
            return Err(Error::NotFano { condition: text.into(), pair: None });
        }
    }
    let zero = RingElement::zero(&t.ring);
    let z = PBundleModel::new(t.clone(), [nr.clone(), zero.clone(), zero])?;
    let centers = vec![
        CenterModel::new("S1", z.ci_center()?),
        CenterModel::new("S2", z.section(2)?),
        CenterModel::new("S3", z.section(3)?),
    ];
    let blowup = BlowupModel::new(z, centers)?;
    let x = &blowup;
    let e: Vec<MixedClass> = (0..3).map(|i| x.exceptional(i)).collect();
    let h = x.pullback(&x.z.h());
    let k = t.divisor_coords(&mk);
    let kmn = coords_add(&k, n, -1);
    let kpn = coords_add(&k, n, 1);
    let entry = |label: &str, over: &str, a: &[i64], b: &[i64], class: MixedClass| DivisorInfo {
        label: label.into(),
        fibered_over: over.into(),
        bundle: [a.to_vec(), b.to_vec()],
        class,
    };
    let two_h = h.scale(&q(2));
    let divisors = vec![
        entry("E1", "S1", &kpn, &k, e[0].clone()),
        entry("E2", "T", &kmn, &k, e[1].clone()),
        entry("E3", "T", &kmn, &k, e[2].clone()),
        entry("H0~", "T", &k, &kmn, &h - &e[0]),
        entry("D~", "T", &kmn, &kmn, &(&x.pullback(&x.z.f(1)) - &e[1]) - &e[2]),
        entry("G2", "S1", &kpn, &k, &(&two_h - &e[0]) - &e[1].scale(&q(2))),
        entry("G3", "S1", &kpn, &k, &(&two_h - &e[0]) - &e[2].scale(&q(2))),
    ];
    let status = if t.is_nef(&nr) { Status::Validated } else { Status::ExistenceUnverified };
    Ok(FanoModel {
        construction: Construction::B,
        rho: t.rho + 4,
        dim: t.dim() + 2,
        delta: 3,
        toric: false,
        base: t.clone(),
        params: vec![n.to_vec()],
        blowup,
        divisors,
        fiber_info: "general fiber is P2 blown up at four points; fibers over the branch locus have one A1 point"
            .into(),
        status,
    })
}

impl FanoModel {
    pub fn anticanonical(&self) -> MixedClass {
        self.blowup.anticanonical()
    }

    /// Catalog divisor by label; also accepts "-K" and "H".
    pub fn divisor(&self, label: &str) -> Option<MixedClass> {
        match label {
            "-K" => Some(self.anticanonical()),
            "H" => Some(self.blowup.pullback(&self.blowup.z.h())),
            _ => self.divisors.iter().find(|d| d.label == label).map(|d| d.class.clone()),
        }
    }

    pub fn pairing(&self, divisor: &MixedClass, curve: &MixedClass) -> Q {
        self.blowup.integrate(&self.blowup.mul(divisor, curve))
    }

    /// Curve in a fiber X_t from its fiber-lattice coordinates (see `cone::NEModel`).
    pub fn fiber_curve(&self, lattice: &[i64]) -> MixedClass {
        let x = &self.blowup;
        let z = &x.z;
        let line = z.mul(&z.pullback(&RingElement::point(z.ring())), &z.h());
        let center_of: &[usize] = match self.construction {
            Construction::A => &[0, 1, 2],
            Construction::B => &[0, 0, 1, 2],
        };
        let mut c = x.pullback(&line).scale(&q(lattice[0]));
        for (k, &m) in lattice[1..].iter().enumerate() {
            c = &c + &x.exceptional_fiber(center_of[k]).scale(&q(m));
        }
        c
    }

    /// The curve {pt} x Gamma0 inside the transform of F1, for a curve Gamma0 on T.
    pub fn gamma(&self, gamma0: &RingElement) -> MixedClass {
        let z = &self.blowup.z;
        let c = z.mul(&z.mul(&z.f(1), &z.h()), &z.pullback(gamma0));
        self.blowup.pullback(&c)
    }

    pub fn ne_model(&self) -> Result<NEModel> {
        ne_model(self.construction)
    }

    pub fn characteristic_numbers(&self) -> Result<CharacteristicNumbers> {
        self.blowup.characteristic_numbers()
    }

    /// Euler number by strata: three times e(T) for the P2-bundle plus e(S_i)
    /// for each P1-bundle replacing a center.
    pub fn euler_by_strata(&self) -> i64 {
        let t = &self.base;
        let mut e = 3 * t.euler;
        for c in &self.blowup.centers {
            e += if c.data.double_cover { double_cover_euler(t, &self.blowup.z.d[0]) } else { t.euler };
        }
        e
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HodgeData {
    /// `table[p][q] = h^{p,q}(X)`.
    pub table: Vec<Vec<i64>>,
    pub b3: i64,
    pub h22: i64,
    pub h13: i64,
    pub euler: i64,
}

fn center_hodge(m: &FanoModel, double_cover: bool) -> Result<Vec<Vec<i64>>> {
    let t = &m.base;
    if !double_cover {
        return Ok(t.hodge.clone());
    }
    let n = &m.blowup.z.d[0];
    match t.dim() {
        1 => {
            let g = i64::try_from(n.integrate().to_integer()).expect("small") - 1;
            Ok(vec![vec![1, g], vec![g, 1]])
        }
        2 => {
            let dc = double_cover_invariants(t, n)?;
            Ok(vec![vec![1, 0, 0], vec![0, dc.h11, 0], vec![0, 0, 1]])
        }
        d => Err(Error::Unsupported(format!("Hodge numbers of a double cover of dimension {d}"))),
    }
}

/// Hodge numbers of X from those of T and the centers.
pub fn hodge_numbers(m: &FanoModel) -> Result<HodgeData> {
    let n = m.dim;
    let t = &m.base.hodge;
    let get = |h: &Vec<Vec<i64>>, p: isize, qq: isize| -> i64 {
        if p < 0 || qq < 0 {
            return 0;
        }
        h.get(p as usize).and_then(|r| r.get(qq as usize)).copied().unwrap_or(0)
    };
    let centers: Vec<Vec<Vec<i64>>> =
        m.blowup.centers.iter().map(|c| center_hodge(m, c.data.double_cover)).collect::<Result<_>>()?;
    let mut table = vec![vec![0; n + 1]; n + 1];
    for p in 0..=n as isize {
        for qq in 0..=n as isize {
            let mut v: i64 = (0..=2).map(|i| get(t, p - i, qq - i)).sum();
            for s in &centers {
                v += get(s, p - 1, qq - 1);
            }
            table[p as usize][qq as usize] = v;
        }
    }
    let at = |p: usize, qq: usize| if p <= n && qq <= n { table[p][qq] } else { 0 };
    let b3 = (0..=3).map(|p| at(p, 3 - p)).sum();
    let mut euler = 0;
    for (p, row) in table.iter().enumerate() {
        for (qq, v) in row.iter().enumerate() {
            euler += if (p + qq) % 2 == 0 { *v } else { -*v };
        }
    }
    Ok(HodgeData { b3, h22: at(2, 2), h13: at(1, 3), euler, table })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LengthOneObstruction {
    /// -K_T . c for each generator of NE(T).
    pub lengths: Vec<i64>,
    /// No hyperplane contains all length-1 generators, so only products survive.
    pub product_only: bool,
    /// A divisor vanishing on every length-1 generator, when one exists.
    pub witness: Option<Vec<i64>>,
}

/// Whether the length-1 extremal curves of T span N_1(T).
pub fn length_one_obstruction(t: &BaseVariety) -> LengthOneObstruction {
    let mk = t.anticanonical();
    let lengths: Vec<i64> = t
        .ne_generators
        .iter()
        .map(|c| i64::try_from(mk.dot(c).to_integer()).expect("small"))
        .collect();
    // Row per length-1 curve: its pairing with each divisor basis class.
    let rows: Vec<Vec<Q>> = t
        .ne_generators
        .iter()
        .zip(&lengths)
        .filter(|(_, &l)| l == 1)
        .map(|(c, _)| (0..t.rho).map(|j| RingElement::basis(&t.ring, 1, j).dot(c)).collect())
        .collect();
    let r = rank(&rows);
    let product_only = r == t.rho;
    let witness = if product_only {
        None
    } else {
        let ker = if rows.is_empty() {
            (0..t.rho).map(|j| (0..t.rho).map(|i| q(i64::from(i == j))).collect()).collect()
        } else {
            kernel(&rows, t.rho)
        };
        ker.first().map(|v| primitive_i64(v))
    };
    LengthOneObstruction { lengths, product_only, witness }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum TauVerdict {
    /// a = 0: X is F x T, with no divisor-to-curve contraction.
    NoSuchContraction,
    Contraction {
        a: i64,
        c: i64,
        index: i64,
        /// E'1.e'1, -K.e'1, E'1.Gamma, -K.Gamma.
        pairings: [i64; 4],
        /// "H" when 2a > i_T, else "H'".
        candidate: String,
        /// Candidate degree on each NE(sigma) ray and on Gamma.
        values: Vec<(String, i64)>,
        /// Degree of the twist along T in the normal bundle of Exc(tau).
        normal_twist: i64,
        /// Pairings match and the candidate vanishes exactly on Gamma.
        holds: bool,
    },
}

fn to_i(x: Q) -> i64 {
    assert!(x.is_integer(), "non-integral intersection number {x}");
    i64::try_from(x.to_integer()).expect("small")
}

/// The divisor-to-curve contraction of the transform of F1, for rho_T = 1
/// and Z = P_T(O(a) + O + O).
pub fn tau_check(m: &FanoModel) -> Result<TauVerdict> {
    let t = &m.base;
    let index = t.index.ok_or_else(|| Error::Usage("the contraction check needs rho_T = 1".into()))?;
    let twist = &m.params[0];
    if m.construction == Construction::A && (m.params[1].iter().any(|&x| x != 0) || m.params[2].iter().any(|&x| x != 0))
    {
        return Err(Error::Usage("the contraction check needs D = (a, 0, 0)".into()));
    }
    let a = twist[0];
    if a == 0 {
        return Ok(TauVerdict::NoSuchContraction);
    }
    let nm = m.ne_model()?;
    let (e1p_label, e1p_curve) = match m.construction {
        Construction::A => ("E1'", "e1'"),
        Construction::B => ("D~", "l23"),
    };
    let e1p = m.divisor(e1p_label).expect("catalog divisor");
    let e2 = m.divisor("E2").expect("catalog divisor");
    let mk = m.anticanonical();
    let curve = |label: &str| m.fiber_curve(nm.lattice_class(label).expect("fiber curve"));
    let e1p_c = curve(e1p_curve);
    // Gamma0: the generator of NE(T); c = O_T(1) . Gamma0.
    let gamma0 = t.ne_generators[0].clone();
    let o1 = match t.dim() {
        1 => RingElement::point(&t.ring),
        _ => t.divisor(&vec![1; t.rho])?,
    };
    let c = to_i(o1.dot(&gamma0));
    let gamma = m.gamma(&gamma0);
    let pairings = [
        to_i(m.pairing(&e1p, &e1p_c)),
        to_i(m.pairing(&mk, &e1p_c)),
        to_i(m.pairing(&e1p, &gamma)),
        to_i(m.pairing(&mk, &gamma)),
    ];
    let x = &m.blowup;
    let mut cand = &mk.scale(&q(a)) + &e1p.scale(&q(index - a));
    let candidate = if 2 * a > index {
        "H".to_string()
    } else {
        cand = &cand + &e2.scale(&q(index - 2 * a + 1));
        "H'".to_string()
    };
    let mut values: Vec<(String, i64)> = nm
        .rays
        .iter()
        .map(|r| (r.label.clone(), to_i(x.integrate(&x.mul(&cand, &curve(&r.label))))))
        .collect();
    values.push(("Gamma".into(), to_i(m.pairing(&cand, &gamma))));
    let expected = [-1, 1, -a * c, c * (index - a)];
    let vanishing_ok = values.iter().all(|(l, v)| if l == "Gamma" { *v == 0 } else { *v > 0 });
    Ok(TauVerdict::Contraction {
        a,
        c,
        index,
        pairings,
        candidate,
        values,
        normal_twist: -a,
        holds: pairings == expected && vanishing_ok,
    })
}

/// Numbers reported for a family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Invariants {
    Dim4 {
        #[serde(rename = "K4")]
        k4: i64,
        #[serde(rename = "K2c2")]
        k2c2: i64,
        #[serde(rename = "h0_mK")]
        h0_mk: i64,
        #[serde(rename = "chiT")]
        chi_t: i64,
        b3: i64,
        h22: i64,
        h13: i64,
        euler: i64,
    },
    Dim3 {
        #[serde(rename = "K3")]
        k3: i64,
        #[serde(rename = "h0_mK")]
        h0_mk: i64,
        #[serde(rename = "chiT")]
        chi_t: i64,
        b3: i64,
        euler: i64,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyRecord {
    pub rho: usize,
    pub dim: usize,
    pub construction: Construction,
    pub base: String,
    pub params: Vec<Vec<i64>>,
    pub toric: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariants: Option<Invariants>,
    pub divisors: Vec<DivisorInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discriminant: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "is_validated")]
    pub status: Status,
}

fn is_validated(s: &Status) -> bool {
    *s == Status::Validated
}

/// Names fixed by the literature for a few families; `None` elsewhere.
pub fn known_label(m: &FanoModel) -> Option<String> {
    let kind = m.base.kind;
    match m.construction {
        Construction::A => {
            let product = m.params.iter().all(|d| *d == m.params[0]);
            match (kind, product) {
                (BaseKind::F1, true) => Some("U4".into()),
                (BaseKind::F1, false) => Some("U2".into()),
                (BaseKind::P1xP1, true) => Some("U5".into()),
                _ => None,
            }
        }
        Construction::B => {
            let n = &m.params[0];
            match (kind, n.as_slice()) {
                (BaseKind::P1xP1, [0, 1] | [1, 0]) => Some("X_B0".into()),
                (BaseKind::P1xP1, [1, 1]) => Some("X_B1".into()),
                (BaseKind::F1, [1, 0]) => Some("X_B2".into()),
                _ => None,
            }
        }
    }
}

/// Component types of the conic-bundle discriminant: T and the center S1.
pub fn discriminant(m: &FanoModel) -> Result<Option<Vec<String>>> {
    if m.construction != Construction::B || m.base.dim() != 2 {
        return Ok(None);
    }
    let dc = double_cover_invariants(&m.base, &m.blowup.z.d[0])?;
    Ok(Some(vec![m.base.kind.name(), dc.surface_type]))
}

pub fn report(m: &FanoModel) -> Result<FamilyRecord> {
    let invariants = match m.dim {
        3 | 4 => {
            let cn = m.characteristic_numbers()?;
            let hd = hodge_numbers(m)?;
            if hd.euler != cn.euler {
                return Err(Error::Model(format!("Euler number {} from c_n, {} from Hodge numbers", cn.euler, hd.euler)));
            }
            Some(if m.dim == 4 {
                Invariants::Dim4 {
                    k4: cn.k_top,
                    k2c2: cn.k2c2.expect("dimension 4"),
                    h0_mk: cn.chi_minus_k,
                    chi_t: cn.chi_t,
                    b3: hd.b3,
                    h22: hd.h22,
                    h13: hd.h13,
                    euler: cn.euler,
                }
            } else {
                Invariants::Dim3 { k3: cn.k_top, h0_mk: cn.chi_minus_k, chi_t: cn.chi_t, b3: hd.b3, euler: cn.euler }
            })
        }
        _ => None,
    };
    Ok(FamilyRecord {
        rho: m.rho,
        dim: m.dim,
        construction: m.construction,
        base: m.base.kind.name(),
        params: m.params.clone(),
        toric: m.toric,
        invariants,
        divisors: m.divisors.clone(),
        discriminant: discriminant(m)?,
        label: known_label(m),
        status: m.status,
    })
}

/// Exhaustive comparison of divisor-curve pairings in X against the fiber
/// lattice model: returns the mismatches as (divisor, curve, X value, lattice value).
pub fn ray_pairing_mismatches(m: &FanoModel) -> Result<Vec<(String, String, Q, i64)>> {
    let nm = m.ne_model()?;
    let mut bad = Vec::new();
    for (dname, _) in &nm.divisor_restrictions {
        let d = m.divisor(dname).ok_or_else(|| Error::Model(format!("divisor {dname} missing from the model")))?;
        for (cname, lattice) in &nm.fiber_curves {
            let x_val = m.pairing(&d, &m.fiber_curve(lattice));
            let l_val = nm.pairing(dname, cname).expect("present");
            if x_val != q(l_val) {
                bad.push((dname.clone(), cname.clone(), x_val, l_val));
            }
        }
    }
    Ok(bad)
}

/// `int (-K_X)^(n-1) . E` against the Segre-class value `int h_{n-2}(a, b)`
/// on the base of the P1-bundle E = P(O(a) + O(b)).
pub fn bundle_degree_mismatches(m: &FanoModel) -> Vec<String> {
    let x = &m.blowup;
    let t = &m.base;
    let n = m.dim;
    let mk_pow = x.pow(&m.anticanonical(), n - 1);
    let mut bad = Vec::new();
    for d in &m.divisors {
        let a = t.divisor(&d.bundle[0]).expect("coords");
        let b = t.divisor(&d.bundle[1]).expect("coords");
        let j = n - 2;
        let mut hj = RingElement::zero(&t.ring);
        for p in 0..=j {
            hj = &hj + &(&a.pow(p) * &b.pow(j - p));
        }
        let weight = if d.fibered_over == "S1" { q(2) } else { q(1) };
        let expected = hj.integrate() * weight;
        let got = x.integrate(&x.mul(&mk_pow, &d.class));
        if got != expected {
            bad.push(format!("{}: {} != {}", d.label, got, expected));
        }
    }
    bad
}

/// A divisor class is negative on some fiber curve only if that curve lies in it.
pub fn is_positive_on_fibers(m: &FanoModel, d: &MixedClass) -> Result<bool> {
    let nm = m.ne_model()?;
    Ok(nm.fiber_curves.iter().all(|(_, l)| m.pairing(d, &m.fiber_curve(l)).is_positive()))
}
