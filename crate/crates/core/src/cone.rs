//! Exact polyhedral cones by double description, and the relative Mori cones
//! NE(sigma) of the two constructions with their contraction catalog.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{primitive_i64, q, rank, rref, to_q_rows, Q};
use crate::Construction;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Facet {
    /// Primitive inner normal: nonnegative on the cone.
    pub normal: Vec<i64>,
    /// Indices into `Cone::rays` of the rays on this facet.
    pub rays: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cone {
    pub dim: usize,
    pub generators: Vec<Vec<i64>>,
    /// Primitive extreme rays, sorted lexicographically.
    pub rays: Vec<Vec<i64>>,
    pub facets: Vec<Facet>,
}

struct DdRay {
    v: Vec<Q>,
    tight: BTreeSet<usize>,
}

fn normalize(v: &[Q]) -> Vec<Q> {
    primitive_i64(v).into_iter().map(q).collect()
}

fn dot_iq(a: &[i64], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(&x, y)| q(x) * y).sum()
}

fn dot_ii(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Extreme rays of `{y : a . y >= 0 for every row a}`, assuming the rows
/// have full column rank (so the cone is pointed).
fn dual_rays(rows: &[Vec<i64>], d: usize) -> Vec<Vec<Q>> {
    // Start from d independent rows: the cone {B y >= 0} has rays B^{-1} e_k.
    let mut chosen: Vec<usize> = Vec::new();
    for (i, _) in rows.iter().enumerate() {
        let mut trial: Vec<Vec<i64>> = chosen.iter().map(|&j| rows[j].clone()).collect();
        trial.push(rows[i].clone());
        if crate::linalg::rank_i64(&trial) == trial.len() {
            chosen.push(i);
            if chosen.len() == d {
                break;
            }
        }
    }
    let mut aug: Vec<Vec<Q>> = chosen
        .iter()
        .enumerate()
        .map(|(r, &i)| {
            let mut row: Vec<Q> = rows[i].iter().map(|&x| q(x)).collect();
            row.extend((0..d).map(|c| q(i64::from(c == r))));
            row
        })
        .collect();
    rref(&mut aug);
    let mut rays: Vec<DdRay> = (0..d)
        .map(|k| {
            let col: Vec<Q> = (0..d).map(|r| aug[r][d + k].clone()).collect();
            let tight = chosen.iter().enumerate().filter(|&(r, _)| r != k).map(|(_, &i)| i).collect();
            DdRay { v: normalize(&col), tight }
        })
        .collect();

    for (i, a) in rows.iter().enumerate() {
        if chosen.contains(&i) {
            continue;
        }
        let s: Vec<Q> = rays.iter().map(|r| dot_iq(a, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| s[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| s[k].is_negative()).collect();
        let mut next: Vec<DdRay> = Vec::new();
        for p in &pos {
            for n in &neg {
                let common: BTreeSet<usize> = rays[*p].tight.intersection(&rays[*n].tight).copied().collect();
                if common.len() + 2 < d {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .filter(|&k| k != *p && k != *n)
                    .all(|k| !common.is_subset(&rays[k].tight));
                if !adjacent {
                    continue;
                }
                let v: Vec<Q> = rays[*n]
                    .v
                    .iter()
                    .zip(&rays[*p].v)
                    .map(|(x, y)| &s[*p] * x - &s[*n] * y)
                    .collect();
                let mut tight = common;
                tight.insert(i);
                next.push(DdRay { v: normalize(&v), tight });
            }
        }
        for (k, r) in rays.into_iter().enumerate() {
            if s[k].is_zero() {
                let mut tight = r.tight;
                tight.insert(i);
                next.push(DdRay { v: r.v, tight });
            } else if s[k].is_positive() {
                next.push(r);
            }
        }
        rays = next;
    }
    rays.into_iter().map(|r| r.v).collect()
}

impl Cone {
    /// Cone spanned by integer generators: extreme rays and facets.
    pub fn from_generators(generators: &[Vec<i64>]) -> Result<Cone> {
        let d = generators
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::Usage("cone needs at least one generator".into()))?;
        if generators.iter().any(|g| g.len() != d) {
            return Err(Error::Usage("generators of different lengths".into()));
        }
        let r = crate::linalg::rank_i64(generators);
        if r < d {
            return Err(Error::NotFullDimensional { rank: r, dim: d });
        }
        let mut normals: Vec<Vec<i64>> =
            dual_rays(generators, d).iter().map(|v| primitive_i64(v)).collect();
        normals.sort();
        normals.dedup();
        if crate::linalg::rank_i64(&normals) < d {
            return Err(Error::NotPointed);
        }

        let mut rays: Vec<Vec<i64>> = Vec::new();
        for g in generators {
            if g.iter().all(|&x| x == 0) {
                continue;
            }
            let p = primitive_i64(&g.iter().map(|&x| q(x)).collect::<Vec<_>>());
            let incident: Vec<Vec<i64>> = normals.iter().filter(|n| dot_ii(n, &p) == 0).cloned().collect();
            if rank(&to_q_rows(&incident)) + 1 == d && !rays.contains(&p) {
                rays.push(p);
            }
        }
        rays.sort();

        let mut facets: Vec<Facet> = normals
            .into_iter()
            .map(|n| {
                let inc = (0..rays.len()).filter(|&k| dot_ii(&n, &rays[k]) == 0).collect();
                Facet { normal: n, rays: inc }
            })
            .collect();
        facets.sort_by(|a, b| a.rays.cmp(&b.rays).then_with(|| a.normal.cmp(&b.normal)));
        Ok(Cone { dim: d, generators: generators.to_vec(), rays, facets })
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.facets.iter().all(|f| !dot_iq(&f.normal, v).is_negative())
    }

    pub fn contains_i64(&self, v: &[i64]) -> bool {
        self.facets.iter().all(|f| dot_ii(&f.normal, v) >= 0)
    }

    pub fn is_simplicial_facet(&self, f: &Facet) -> bool {
        f.rays.len() + 1 == self.dim
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContractionType {
    Blowdown,
    ConicBundle,
    QuadricBundle,
}

#[derive(Debug, Clone, Serialize)]
pub struct LabeledRay {
    pub label: String,
    /// Other fiber curves with the same class in N_1(X).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub aliases: Vec<String>,
    pub vector: Vec<i64>,
    /// Exceptional divisor of the associated elementary contraction.
    #[serde(skip)]
    pub exceptional: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct LabeledFacet {
    pub labels: Vec<String>,
    #[serde(rename = "type")]
    pub kind: ContractionType,
    pub simplicial: bool,
    #[serde(skip)]
    pub contraction: String,
    #[serde(skip)]
    pub exceptional: Vec<String>,
    #[serde(skip)]
    pub normal: Vec<i64>,
}

/// NE(sigma) as the image of the Mori cone of a smooth fiber X_t.
///
/// Fiber classes are written `c_h h + sum c_i e_i` in the blow-up lattice of
/// P2 at the fiber points, with form diag(1, -1, ..., -1).
#[derive(Debug, Clone, Serialize)]
pub struct NEModel {
    pub construction: Construction,
    #[serde(skip)]
    pub lattice_basis: Vec<String>,
    /// Integer map from fiber classes to N_1(X) coordinates of the rays.
    #[serde(skip)]
    pub quotient: Vec<Vec<i64>>,
    /// The (-1)-curves of X_t with their lattice coordinates.
    #[serde(skip)]
    pub fiber_curves: Vec<(String, Vec<i64>)>,
    /// Restrictions of the divisor catalog to X_t, in lattice coordinates.
    #[serde(skip)]
    pub divisor_restrictions: Vec<(String, Vec<i64>)>,
    pub rays: Vec<LabeledRay>,
    pub facets: Vec<LabeledFacet>,
    #[serde(skip)]
    pub cone: Cone,
}

fn lattice_pairing(divisor: &[i64], curve: &[i64]) -> i64 {
    divisor[0] * curve[0] - divisor[1..].iter().zip(&curve[1..]).map(|(a, b)| a * b).sum::<i64>()
}

fn matvec(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter().map(|row| dot_ii(row, v)).collect()
}

struct CatalogEntry {
    rays: &'static [&'static str],
    contraction: &'static str,
    kind: ContractionType,
    exceptional: &'static [&'static str],
}

impl NEModel {
    pub fn lattice_class(&self, label: &str) -> Option<&[i64]> {
        self.fiber_curves.iter().find(|(l, _)| l == label).map(|(_, v)| v.as_slice())
    }

    pub fn restriction(&self, divisor: &str) -> Option<&[i64]> {
        self.divisor_restrictions.iter().find(|(l, _)| l == divisor).map(|(_, v)| v.as_slice())
    }

    /// Intersection number of a catalog divisor with a fiber curve, computed
    /// in the fiber lattice.
    pub fn pairing(&self, divisor: &str, curve: &str) -> Option<i64> {
        Some(lattice_pairing(self.restriction(divisor)?, self.lattice_class(curve)?))
    }

    pub fn ray(&self, label: &str) -> Option<&LabeledRay> {
        self.rays.iter().find(|r| r.label == label || r.aliases.iter().any(|a| a == label))
    }

    /// Primitive generators of the kernel of the quotient map.
    pub fn quotient_kernel(&self) -> Vec<Vec<i64>> {
        let n = self.lattice_basis.len();
        crate::linalg::kernel(&to_q_rows(&self.quotient), n).iter().map(|v| primitive_i64(v)).collect()
    }

    pub fn facet(&self, contraction: &str) -> Option<&LabeledFacet> {
        self.facets.iter().find(|f| f.contraction == contraction)
    }
}

/// Labeled NE(sigma) model for the given construction.
pub fn ne_model(construction: Construction) -> Result<NEModel> {
    let (basis, quotient, curves, divisors, catalog): (
        Vec<&str>,
        Vec<Vec<i64>>,
        Vec<(&str, Vec<i64>)>,
        Vec<(&str, Vec<i64>)>,
        Vec<CatalogEntry>,
    ) = match construction {
        Construction::A => (
            vec!["h", "e1", "e2", "e3"],
            (0..4).map(|i| (0..4).map(|j| i64::from(i == j)).collect()).collect(),
            vec![
                ("e1", vec![0, 1, 0, 0]),
                ("e2", vec![0, 0, 1, 0]),
                ("e3", vec![0, 0, 0, 1]),
                ("e1'", vec![1, 0, -1, -1]),
                ("e2'", vec![1, -1, 0, -1]),
                ("e3'", vec![1, -1, -1, 0]),
            ],
            vec![
                ("E1", vec![0, 1, 0, 0]),
                ("E2", vec![0, 0, 1, 0]),
                ("E3", vec![0, 0, 0, 1]),
                ("E1'", vec![1, 0, -1, -1]),
                ("E2'", vec![1, -1, 0, -1]),
                ("E3'", vec![1, -1, -1, 0]),
                ("H", vec![1, 0, 0, 0]),
                ("-K", vec![3, -1, -1, -1]),
            ],
            vec![
                CatalogEntry {
                    rays: &["e1", "e2", "e3"],
                    contraction: "h",
                    kind: ContractionType::Blowdown,
                    exceptional: &["E1", "E2", "E3"],
                },
                CatalogEntry {
                    rays: &["e1'", "e2'", "e3'"],
                    contraction: "h_hat",
                    kind: ContractionType::Blowdown,
                    exceptional: &["E1'", "E2'", "E3'"],
                },
            ],
        ),
        Construction::B => (
            vec!["h", "e1", "e1'", "e2", "e3"],
            vec![
                vec![1, 0, 0, 0, 0],
                vec![0, 1, 1, 0, 0],
                vec![0, 0, 0, 1, 0],
                vec![0, 0, 0, 0, 1],
            ],
            vec![
                ("e1", vec![0, 1, 0, 0, 0]),
                ("e1'", vec![0, 0, 1, 0, 0]),
                ("e2", vec![0, 0, 0, 1, 0]),
                ("e3", vec![0, 0, 0, 0, 1]),
                ("l11'", vec![1, -1, -1, 0, 0]),
                ("l12", vec![1, -1, 0, -1, 0]),
                ("l13", vec![1, -1, 0, 0, -1]),
                ("l1'2", vec![1, 0, -1, -1, 0]),
                ("l1'3", vec![1, 0, -1, 0, -1]),
                ("l23", vec![1, 0, 0, -1, -1]),
            ],
            vec![
                ("E1", vec![0, 1, 1, 0, 0]),
                ("E2", vec![0, 0, 0, 1, 0]),
                ("E3", vec![0, 0, 0, 0, 1]),
                ("H0~", vec![1, -1, -1, 0, 0]),
                ("D~", vec![1, 0, 0, -1, -1]),
                ("G2", vec![2, -1, -1, -2, 0]),
                ("G3", vec![2, -1, -1, 0, -2]),
                ("H", vec![1, 0, 0, 0, 0]),
                ("-K", vec![3, -1, -1, -1, -1]),
            ],
            vec![
                CatalogEntry {
                    rays: &["e1", "e2", "e3"],
                    contraction: "h",
                    kind: ContractionType::Blowdown,
                    exceptional: &["E1", "E2", "E3"],
                },
                CatalogEntry {
                    rays: &["l12", "l11'", "e3"],
                    contraction: "h_hat_2",
                    kind: ContractionType::Blowdown,
                    exceptional: &["G2", "H0~", "E3"],
                },
                CatalogEntry {
                    rays: &["l13", "l11'", "e2"],
                    contraction: "h_hat_3",
                    kind: ContractionType::Blowdown,
                    exceptional: &["G3", "H0~", "E2"],
                },
                CatalogEntry {
                    rays: &["e2", "e3", "l11'"],
                    contraction: "h_prime",
                    kind: ContractionType::QuadricBundle,
                    exceptional: &["E2", "E3", "H0~"],
                },
            ],
        ),
    };

    // Group fiber curves by their image; the first one met names the ray.
    let mut images: BTreeMap<Vec<i64>, Vec<String>> = BTreeMap::new();
    for (label, v) in &curves {
        images.entry(matvec(&quotient, v)).or_default().push(label.to_string());
    }
    let generators: Vec<Vec<i64>> = images.keys().cloned().collect();
    let cone = Cone::from_generators(&generators)?;

    let mut rays = Vec::new();
    for v in &cone.rays {
        let names = images
            .get(v)
            .ok_or_else(|| Error::Model(format!("extreme ray {v:?} is not the image of a (-1)-curve")))?;
        let label = names[0].clone();
        let lattice = &curves.iter().find(|(l, _)| *l == label).expect("present").1;
        // The exceptional divisor of the ray is the catalog divisor that is -1 on it.
        let negatives: Vec<&str> = divisors
            .iter()
            .filter(|(name, d)| *name != "-K" && lattice_pairing(d, lattice) == -1)
            .map(|(name, _)| *name)
            .collect();
        if negatives.len() != 1 {
            return Err(Error::Model(format!("ray {label} has exceptional candidates {negatives:?}")));
        }
        rays.push(LabeledRay {
            label,
            aliases: names[1..].to_vec(),
            vector: v.clone(),
            exceptional: negatives[0].to_string(),
        });
    }

    let mut facets = Vec::new();
    let mut matched = vec![false; catalog.len()];
    for f in &cone.facets {
        let labels: Vec<String> = f.rays.iter().map(|&k| rays[k].label.clone()).collect();
        let set: BTreeSet<&str> = labels.iter().map(String::as_str).collect();
        let simplicial = cone.is_simplicial_facet(f);
        let entry = catalog.iter().position(|c| c.rays.iter().copied().collect::<BTreeSet<_>>() == set);
        let (contraction, kind, exceptional) = match entry {
            Some(k) => {
                matched[k] = true;
                let c = &catalog[k];
                (c.contraction.to_string(), c.kind, c.exceptional.iter().map(|s| s.to_string()).collect())
            }
            None if !simplicial => ("conic".to_string(), ContractionType::ConicBundle, Vec::new()),
            None => return Err(Error::Model(format!("simplicial facet {labels:?} missing from the catalog"))),
        };
        facets.push(LabeledFacet { labels, kind, simplicial, contraction, exceptional, normal: f.normal.clone() });
    }
    if let Some(k) = matched.iter().position(|m| !m) {
        return Err(Error::Model(format!("catalog facet {:?} not found on the cone", catalog[k].rays)));
    }

    Ok(NEModel {
        construction,
        lattice_basis: basis.iter().map(|s| s.to_string()).collect(),
        quotient,
        fiber_curves: curves.into_iter().map(|(l, v)| (l.to_string(), v)).collect(),
        divisor_restrictions: divisors.into_iter().map(|(l, v)| (l.to_string(), v)).collect(),
        rays,
        facets,
        cone,
    })
}

/// The labeled facets of the model.
pub fn facet_catalog(nm: &NEModel) -> &[LabeledFacet] {
    &nm.facets
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_cone() {
        let c = Cone::from_generators(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(c.rays.len(), 3);
        assert_eq!(c.facets.len(), 3);
    }

    #[test]
    fn redundant_and_repeated_generators_dropped() {
        let c = Cone::from_generators(&[vec![1, 0], vec![0, 1], vec![1, 1], vec![2, 0]]).unwrap();
        assert_eq!(c.rays, vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(c.facets.len(), 2);
    }

    #[test]
    fn square_pyramid() {
        let gens = vec![vec![1, 1, 1], vec![1, -1, 1], vec![-1, 1, 1], vec![-1, -1, 1], vec![0, 0, 1]];
        let c = Cone::from_generators(&gens).unwrap();
        assert_eq!(c.rays.len(), 4);
        assert_eq!(c.facets.len(), 4);
        assert!(c.facets.iter().all(|f| f.rays.len() == 2));
    }

    #[test]
    fn degenerate_cones_rejected() {
        assert_eq!(Cone::from_generators(&[vec![1, 0], vec![-1, 0], vec![0, 1]]), Err(Error::NotPointed));
        assert_eq!(
            Cone::from_generators(&[vec![1, 0, 0], vec![0, 1, 0]]),
            Err(Error::NotFullDimensional { rank: 2, dim: 3 })
        );
    }

    #[test]
    fn one_dimensional_cone() {
        let c = Cone::from_generators(&[vec![3]]).unwrap();
        assert_eq!(c.rays, vec![vec![1]]);
        assert!(c.contains_i64(&[5]));
        assert!(!c.contains_i64(&[-1]));
    }

    #[test]
    fn model_a_shape() {
        let m = ne_model(Construction::A).unwrap();
        assert_eq!(m.rays.len(), 6);
        assert_eq!(m.facets.len(), 5);
        assert_eq!(m.facets.iter().filter(|f| f.simplicial).count(), 2);
        assert_eq!(m.facets.iter().filter(|f| f.labels.len() == 4).count(), 3);
        assert_eq!(m.facet("h").unwrap().labels.len(), 3);
        assert!(m.facet("h").unwrap().labels.iter().all(|l| !l.ends_with('\'')));
    }

    #[test]
    fn model_b_shape() {
        let m = ne_model(Construction::B).unwrap();
        assert_eq!(m.rays.len(), 7);
        assert_eq!(m.facets.len(), 7);
        assert_eq!(m.facets.iter().filter(|f| f.simplicial).count(), 4);
        assert_eq!(m.quotient_kernel(), vec![vec![0, -1, 1, 0, 0]]);
        assert_eq!(m.ray("e1").unwrap().vector, m.ray("e1'").unwrap().vector);
        assert_eq!(m.ray("l12").unwrap().vector, m.ray("l1'2").unwrap().vector);
        assert_eq!(m.ray("e2").unwrap().vector, vec![0, 0, 1, 0]);
        assert_eq!(m.ray("e3").unwrap().vector, vec![0, 0, 0, 1]);
    }

    #[test]
    fn b_exceptional_assignment() {
        let m = ne_model(Construction::B).unwrap();
        for (ray, div) in [("e2", "E2"), ("e3", "E3"), ("l11'", "H0~"), ("l23", "D~"), ("l12", "G2"), ("l13", "G3")] {
            assert_eq!(m.ray(ray).unwrap().exceptional, div);
        }
        let ex = &m.facet("h_hat_2").unwrap().exceptional;
        assert_eq!(ex, &["G2", "H0~", "E3"]);
        assert_eq!(m.facet("h_prime").unwrap().kind, ContractionType::QuadricBundle);
    }

    #[test]
    fn anticanonical_degree_one_on_rays() {
        for c in [Construction::A, Construction::B] {
            let m = ne_model(c).unwrap();
            for (label, _) in &m.fiber_curves {
                assert_eq!(m.pairing("-K", label), Some(1), "{label}");
            }
        }
    }
}
