//! Finite-dimensional bigraded rings with Poincaré duality.
//!
//! A [`GradedRing`] stores sparse structure constants over a basis of
//! homogeneous elements. The constructors (point, projective space, torus,
//! Künneth product, projective bundle) produce small-integer constants, so
//! ring-axiom residuals on them are exact zeros.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{self, wedge_sign, ExteriorContext, Form, PositiveForm};
use crate::hodge::{BigradedAlgebra, Certificate, HodgeRiemannPair, Homog};
use crate::numkernel::{self, CMatrix, TolPolicy, C64, ONE, ZERO};

/// Residual admitted by the ring-axiom checks, relative to the largest structure constant.
pub const RING_TOL: f64 = 1e-10;

/// Smallest admitted `σ_min / σ_max` of a Poincaré pairing block.
pub const POINCARE_TOL: f64 = 1e-10;

/// Largest principal angle accepted as containment of kernels.
pub const CONTAINMENT_TOL: f64 = 1e-8;

/// Residual bound of the bundle identities.
pub const IDENTITY_TOL: f64 = 1e-10;

/// Relative tolerance for reality of classes.
const REALITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElement {
    pub name: String,
    pub p: usize,
    pub q: usize,
}

/// How a ring was built. Rings rebuilt from the same provenance are identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    #[default]
    Loaded,
    Point,
    ProjectiveSpace {
        m: usize,
    },
    /// Hermitian coefficient matrix of the normalizing form, row-major rows.
    Torus {
        h: Vec<Vec<C64>>,
    },
    Kunneth {
        left: Box<Provenance>,
        right: Box<Provenance>,
    },
    /// Chern classes `c_1..c_e` by their component coordinates on the base.
    ProjectiveBundle {
        base: Box<Provenance>,
        rank: usize,
        chern: Vec<Vec<C64>>,
    },
}

/// A ring homomorphism sending source basis elements to target basis elements.
#[derive(Debug, Clone)]
pub struct Embedding {
    source: Arc<GradedRing>,
    images: Vec<usize>,
}

impl Embedding {
    pub fn source(&self) -> &Arc<GradedRing> {
        &self.source
    }

    /// Image of a homogeneous source element in `target`.
    pub fn apply(&self, target: &GradedRing, x: &Homog) -> Result<Homog> {
        self.source.check_homog(x)?;
        let mut out = Homog::zero(target, x.p, x.q);
        for (u, &c) in x.coords.iter().enumerate() {
            let a = self.source.component(x.p, x.q)[u];
            out.coords[target.position[self.images[a]]] += c;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct GradedRing {
    n: usize,
    basis: Vec<BasisElement>,
    /// `mult[i * dim + j]` lists `(k, c)` with `e_i e_j = Σ c e_k`.
    mult: Vec<Vec<(usize, C64)>>,
    /// `conj[i]` lists `(k, c)` with `conj(e_i) = Σ c e_k`.
    conj: Vec<Vec<(usize, C64)>>,
    integral: Vec<C64>,
    unit: usize,
    provenance: Provenance,
    embeddings: Vec<Embedding>,
    components: Vec<Vec<usize>>,
    position: Vec<usize>,
}

type Entry3 = (usize, usize, usize, C64);

impl GradedRing {
    /// Builds a ring from sparse tables. Entries with a wrong target bidegree are rejected.
    pub fn from_parts(
        n: usize,
        basis: Vec<BasisElement>,
        mult: &[Entry3],
        conj: &[(usize, usize, C64)],
        integral: &[(usize, C64)],
        unit: usize,
        provenance: Provenance,
    ) -> Result<GradedRing> {
        let dim = basis.len();
        if let Some(b) = basis.iter().find(|b| b.p > n || b.q > n) {
            return Err(Error::Bidegree(format!(
                "basis element {} has bidegree ({},{}) beyond n = {n}",
                b.name, b.p, b.q
            )));
        }
        if unit >= dim {
            return Err(Error::InvalidInput(format!(
                "unit index {unit} out of range for dimension {dim}"
            )));
        }
        if (basis[unit].p, basis[unit].q) != (0, 0) {
            return Err(Error::Bidegree("the unit must have bidegree (0,0)".into()));
        }
        let check = |i: usize| -> Result<()> {
            if i >= dim {
                Err(Error::InvalidInput(format!(
                    "basis index {i} out of range for dimension {dim}"
                )))
            } else {
                Ok(())
            }
        };
        let finite = |c: C64| -> Result<()> {
            if c.re.is_finite() && c.im.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidInput("non-finite structure constant".into()))
            }
        };
        let mut mtab: Vec<Vec<(usize, C64)>> = vec![Vec::new(); dim * dim];
        for &(i, j, k, c) in mult {
            check(i)?;
            check(j)?;
            check(k)?;
            finite(c)?;
            let (bi, bj, bk) = (&basis[i], &basis[j], &basis[k]);
            if (bi.p + bj.p, bi.q + bj.q) != (bk.p, bk.q) {
                return Err(Error::Bidegree(format!(
                    "{} · {} cannot contain {} (bidegree ({},{}))",
                    bi.name, bj.name, bk.name, bk.p, bk.q
                )));
            }
            push_sparse(&mut mtab[i * dim + j], k, c);
        }
        let mut ctab: Vec<Vec<(usize, C64)>> = vec![Vec::new(); dim];
        for &(i, k, c) in conj {
            check(i)?;
            check(k)?;
            finite(c)?;
            if (basis[i].q, basis[i].p) != (basis[k].p, basis[k].q) {
                return Err(Error::Bidegree(format!(
                    "conj({}) cannot contain {}",
                    basis[i].name, basis[k].name
                )));
            }
            push_sparse(&mut ctab[i], k, c);
        }
        let mut itab = vec![ZERO; dim];
        for &(k, c) in integral {
            check(k)?;
            finite(c)?;
            if (basis[k].p, basis[k].q) != (n, n) {
                return Err(Error::Bidegree(format!(
                    "the integral is supported on ({n},{n}), got {}",
                    basis[k].name
                )));
            }
            itab[k] += c;
        }
        for list in mtab.iter_mut().chain(ctab.iter_mut()) {
            list.retain(|(_, c)| *c != ZERO);
            list.sort_by_key(|(k, _)| *k);
        }
        let mut components = vec![Vec::new(); (n + 1) * (n + 1)];
        let mut position = vec![0; dim];
        for (i, b) in basis.iter().enumerate() {
            let comp = &mut components[b.p * (n + 1) + b.q];
            position[i] = comp.len();
            comp.push(i);
        }
        Ok(GradedRing {
            n,
            basis,
            mult: mtab,
            conj: ctab,
            integral: itab,
            unit,
            provenance,
            embeddings: Vec::new(),
            components,
            position,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn unit_index(&self) -> usize {
        self.unit
    }

    /// Basis indices of the `(p, q)` component, in basis order.
    pub fn component(&self, p: usize, q: usize) -> &[usize] {
        if p > self.n || q > self.n {
            return &[];
        }
        &self.components[p * (self.n + 1) + q]
    }

    /// Position of basis element `i` inside its component.
    pub fn position(&self, i: usize) -> usize {
        self.position[i]
    }

    pub fn mul_basis(&self, i: usize, j: usize) -> &[(usize, C64)] {
        &self.mult[i * self.len() + j]
    }

    pub fn conj_basis(&self, i: usize) -> &[(usize, C64)] {
        &self.conj[i]
    }

    pub fn integral_of_basis(&self, i: usize) -> C64 {
        self.integral[i]
    }

    /// Embeddings of factor rings: `[left, right]` for a Künneth product, `[base]` for a bundle.
    pub fn embeddings(&self) -> &[Embedding] {
        &self.embeddings
    }

    /// The embedding `π*` of the ring this one is a free module over, if known.
    pub fn base_embedding(&self) -> Option<&Embedding> {
        self.embeddings.first()
    }

    /// The basis element `i` as a homogeneous element.
    pub fn basis_homog(&self, i: usize) -> Homog {
        let b = &self.basis[i];
        let mut h = Homog::zero(self, b.p, b.q);
        h.coords[self.position[i]] = ONE;
        h
    }

    fn check_homog(&self, x: &Homog) -> Result<()> {
        if x.coords.len() != self.dim(x.p, x.q) {
            return Err(Error::DimensionMismatch(format!(
                "({},{}) component has dimension {}, got {} coordinates",
                x.p,
                x.q,
                self.dim(x.p, x.q),
                x.coords.len()
            )));
        }
        Ok(())
    }

    /// Product of dense full-basis vectors.
    fn dense_mul(&self, x: &[C64], y: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; self.len()];
        for (i, &a) in x.iter().enumerate().filter(|(_, a)| **a != ZERO) {
            for (j, &b) in y.iter().enumerate().filter(|(_, b)| **b != ZERO) {
                for &(k, c) in self.mul_basis(i, j) {
                    out[k] += a * b * c;
                }
            }
        }
        out
    }

    fn to_dense(&self, x: &Homog) -> Vec<C64> {
        let mut out = vec![ZERO; self.len()];
        for (u, &c) in x.coords.iter().enumerate() {
            out[self.component(x.p, x.q)[u]] = c;
        }
        out
    }

    /// Whether `conj(x) = x` to relative tolerance.
    pub fn is_real(&self, x: &Homog) -> Result<bool> {
        self.check_homog(x)?;
        if x.p != x.q {
            return Ok(x.norm() == 0.0);
        }
        let d = self.conj(x).sub(x).norm();
        Ok(d <= REALITY_TOL * x.norm().max(f64::MIN_POSITIVE))
    }

    pub fn to_json(&self) -> RingJson {
        let dim = self.len();
        let mut mult = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                for &(k, c) in self.mul_basis(i, j) {
                    mult.push(MultJson {
                        i,
                        j,
                        k,
                        re: c.re,
                        im: c.im,
                    });
                }
            }
        }
        let conj = (0..dim)
            .flat_map(|i| {
                self.conj[i].iter().map(move |&(k, c)| ConjJson {
                    i,
                    k,
                    re: c.re,
                    im: c.im,
                })
            })
            .collect();
        let integral = self
            .integral
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(|(k, c)| IntegralJson { k, re: c.re, im: c.im })
            .collect();
        RingJson {
            n: self.n,
            basis: self.basis.clone(),
            mult,
            conj,
            integral,
            unit: self.unit,
            provenance: Some(self.provenance.clone()),
            manifest: None,
        }
    }

    pub fn from_json(json: &RingJson) -> Result<GradedRing> {
        let mult: Vec<Entry3> = json
            .mult
            .iter()
            .map(|m| (m.i, m.j, m.k, C64::new(m.re, m.im)))
            .collect();
        let conj: Vec<(usize, usize, C64)> = json.conj.iter().map(|c| (c.i, c.k, C64::new(c.re, c.im))).collect();
        let integral: Vec<(usize, C64)> = json.integral.iter().map(|c| (c.k, C64::new(c.re, c.im))).collect();
        GradedRing::from_parts(
            json.n,
            json.basis.clone(),
            &mult,
            &conj,
            &integral,
            json.unit,
            json.provenance.clone().unwrap_or_default(),
        )
    }

    /// Largest absolute difference between the tables of two rings whose bases
    /// agree up to names; `None` when the bidegrees differ.
    pub fn table_distance(&self, other: &GradedRing) -> Option<f64> {
        let same_shape = self.len() == other.len()
            && self
                .basis
                .iter()
                .zip(&other.basis)
                .all(|(a, b)| (a.p, a.q) == (b.p, b.q));
        if self.n != other.n || !same_shape || self.unit != other.unit {
            return None;
        }
        let dim = self.len();
        let sparse_dist = |a: &[(usize, C64)], b: &[(usize, C64)]| {
            let mut x = vec![ZERO; dim];
            a.iter().for_each(|&(k, c)| x[k] += c);
            b.iter().for_each(|&(k, c)| x[k] -= c);
            x.iter().map(|c| c.norm()).fold(0.0, f64::max)
        };
        let m = self
            .mult
            .iter()
            .zip(&other.mult)
            .map(|(a, b)| sparse_dist(a, b))
            .fold(0.0, f64::max);
        let c = self
            .conj
            .iter()
            .zip(&other.conj)
            .map(|(a, b)| sparse_dist(a, b))
            .fold(0.0, f64::max);
        let i = self
            .integral
            .iter()
            .zip(&other.integral)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        Some(m.max(c).max(i))
    }
}

fn push_sparse(list: &mut Vec<(usize, C64)>, k: usize, c: C64) {
    match list.iter_mut().find(|(kk, _)| *kk == k) {
        Some((_, v)) => *v += c,
        None => list.push((k, c)),
    }
}

impl BigradedAlgebra for GradedRing {
    fn top(&self) -> usize {
        self.n
    }

    fn dim(&self, p: usize, q: usize) -> usize {
        self.component(p, q).len()
    }

    fn mul_matrix(&self, g: &Homog, p: usize, q: usize) -> CMatrix {
        let (tp, tq) = (p + g.p, q + g.q);
        let src = self.component(p, q);
        let mut m = CMatrix::zeros(self.dim(tp, tq), src.len());
        if m.rows() == 0 || g.coords.is_empty() {
            return m;
        }
        let gcomp = self.component(g.p, g.q);
        for (u, &a) in src.iter().enumerate() {
            for (v, &gc) in g.coords.iter().enumerate().filter(|(_, c)| **c != ZERO) {
                for &(k, c) in self.mul_basis(a, gcomp[v]) {
                    m[(self.position[k], u)] += gc * c;
                }
            }
        }
        m
    }

    fn conj_matrix(&self, p: usize, q: usize) -> CMatrix {
        let src = self.component(p, q);
        let mut m = CMatrix::zeros(self.dim(q, p), src.len());
        for (u, &a) in src.iter().enumerate() {
            for &(k, c) in &self.conj[a] {
                m[(self.position[k], u)] += c;
            }
        }
        m
    }

    fn integral(&self, top: &[C64]) -> C64 {
        self.component(self.n, self.n)
            .iter()
            .zip(top)
            .map(|(&k, &c)| self.integral[k] * c)
            .sum()
    }

    fn unit(&self) -> Homog {
        self.basis_homog(self.unit)
    }

    fn pairing_matrix(&self, p: usize, q: usize) -> CMatrix {
        let n = self.n;
        let (src, dual) = (self.component(p, q), self.component(n - p, n - q));
        let mut m = CMatrix::zeros(src.len(), dual.len());
        for (u, &a) in src.iter().enumerate() {
            for (v, &b) in dual.iter().enumerate() {
                m[(u, v)] = self.mul_basis(a, b).iter().map(|&(k, c)| c * self.integral[k]).sum();
            }
        }
        m
    }
}

/// An element of a ring, possibly of mixed bidegree.
#[derive(Debug, Clone)]
pub struct RingElement {
    ring: Arc<GradedRing>,
    coeffs: Vec<C64>,
}

impl RingElement {
    pub fn new(ring: &Arc<GradedRing>, coeffs: Vec<C64>) -> Result<RingElement> {
        if coeffs.len() != ring.len() {
            return Err(Error::DimensionMismatch(format!(
                "ring has dimension {}, got {} coefficients",
                ring.len(),
                coeffs.len()
            )));
        }
        Ok(RingElement {
            ring: ring.clone(),
            coeffs,
        })
    }

    pub fn from_homog(ring: &Arc<GradedRing>, x: &Homog) -> Result<RingElement> {
        ring.check_homog(x)?;
        Ok(RingElement {
            ring: ring.clone(),
            coeffs: ring.to_dense(x),
        })
    }

    pub fn ring(&self) -> &Arc<GradedRing> {
        &self.ring
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// The `(p, q)` component.
    pub fn component(&self, p: usize, q: usize) -> Homog {
        let coords = self.ring.component(p, q).iter().map(|&i| self.coeffs[i]).collect();
        Homog::new(p, q, coords)
    }

    /// The bidegree if the element is homogeneous and nonzero.
    pub fn bidegree(&self) -> Option<(usize, usize)> {
        let mut found = None;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c != ZERO {
                let b = (self.ring.basis[i].p, self.ring.basis[i].q);
                match found {
                    None => found = Some(b),
                    Some(f) if f != b => return None,
                    _ => {}
                }
            }
        }
        found
    }

    pub fn mul(&self, other: &RingElement) -> RingElement {
        RingElement {
            ring: self.ring.clone(),
            coeffs: self.ring.dense_mul(&self.coeffs, &other.coeffs),
        }
    }

    pub fn add(&self, other: &RingElement) -> RingElement {
        RingElement {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> RingElement {
        RingElement {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn conj(&self) -> RingElement {
        let mut out = vec![ZERO; self.ring.len()];
        for (i, a) in self.coeffs.iter().enumerate() {
            for &(k, c) in &self.ring.conj[i] {
                out[k] += a.conj() * c;
            }
        }
        RingElement {
            ring: self.ring.clone(),
            coeffs: out,
        }
    }

    pub fn integrate(&self) -> C64 {
        self.coeffs.iter().zip(&self.ring.integral).map(|(a, b)| a * b).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultJson {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjJson {
    pub i: usize,
    pub k: usize,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralJson {
    pub k: usize,
    pub re: f64,
    pub im: f64,
}

/// On-disk ring format. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingJson {
    pub n: usize,
    pub basis: Vec<BasisElement>,
    pub mult: Vec<MultJson>,
    pub conj: Vec<ConjJson>,
    pub integral: Vec<IntegralJson>,
    pub unit: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<serde_json::Value>,
}

/// The ring of a point: `ℂ` with `∫1 = 1`.
pub fn point_ring() -> GradedRing {
    let basis = vec![BasisElement {
        name: "1".into(),
        p: 0,
        q: 0,
    }];
    GradedRing::from_parts(
        0,
        basis,
        &[(0, 0, 0, ONE)],
        &[(0, 0, ONE)],
        &[(0, ONE)],
        0,
        Provenance::Point,
    )
    .expect("point ring is well formed")
}

/// `ℂ[h]/h^{m+1}` with `h` of bidegree (1,1) and `∫h^m = 1`.
pub fn projective_space_ring(m: usize) -> GradedRing {
    let basis = (0..=m)
        .map(|j| BasisElement {
            name: match j {
                0 => "1".into(),
                1 => "h".into(),
                _ => format!("h^{j}"),
            },
            p: j,
            q: j,
        })
        .collect();
    let mult: Vec<Entry3> = (0..=m)
        .flat_map(|a| (0..=m - a).map(move |b| (a, b, a + b, ONE)))
        .collect();
    let conj: Vec<(usize, usize, C64)> = (0..=m).map(|j| (j, j, ONE)).collect();
    GradedRing::from_parts(
        m,
        basis,
        &mult,
        &conj,
        &[(m, ONE)],
        0,
        Provenance::ProjectiveSpace { m },
    )
    .expect("projective space ring is well formed")
}

fn multi_index_name(prefix: &str, mask: u32) -> String {
    exterior::mask_indices(mask)
        .iter()
        .map(|i| format!("{prefix}{}", i + 1))
        .collect()
}

/// Cohomology ring of a complex torus, identified with `Λ^{*,*}` of one
/// cotangent fiber. The integral is normalized so that `∫ ω₀^n/n! = 1`.
///
/// Within each component the basis follows the exterior-module order, so
/// component coordinates and form coefficients coincide.
pub fn torus_ring(omega0: &PositiveForm) -> Result<GradedRing> {
    if !omega0.is_strict() {
        return Err(Error::NotStrictlyPositive {
            lambda_min: omega0.lambda_min(),
        });
    }
    let ctx = omega0.ctx();
    let n = ctx.n();
    let mut basis = Vec::new();
    let mut masks = Vec::new();
    for p in 0..=n {
        for q in 0..=n {
            for pos in 0..ctx.dim(p, q) {
                let (i, j) = ctx.pair_at(p, q, pos);
                let name = format!("{}{}", multi_index_name("dz", i), multi_index_name("dzb", j));
                basis.push(BasisElement {
                    name: if name.is_empty() { "1".into() } else { name },
                    p,
                    q,
                });
                masks.push((i, j));
            }
        }
    }
    let index_of = |i: u32, j: u32| masks.iter().position(|&m| m == (i, j)).expect("mask present");
    let mut mult = Vec::new();
    for (a, &(i1, j1)) in masks.iter().enumerate() {
        for (b, &(i2, j2)) in masks.iter().enumerate() {
            if let Some(s) = wedge_sign(i1, j1, i2, j2) {
                mult.push((a, b, index_of(i1 | i2, j1 | j2), C64::new(s, 0.0)));
            }
        }
    }
    let conj: Vec<(usize, usize, C64)> = masks
        .iter()
        .enumerate()
        .map(|(a, &(i, j))| {
            let s = if (i.count_ones() * j.count_ones()) % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            (a, index_of(j, i), C64::new(s, 0.0))
        })
        .collect();
    let full = ((1u64 << n) - 1) as u32;
    let volume = exterior::volume_coefficient(omega0);
    let integral = [(index_of(full, full), ONE / volume)];
    let h = omega0.h();
    let provenance = Provenance::Torus {
        h: (0..n).map(|r| (0..n).map(|c| h[(r, c)]).collect()).collect(),
    };
    GradedRing::from_parts(n, basis, &mult, &conj, &integral, index_of(0, 0), provenance)
}

/// Class of a form on the torus ring built from the same dimension.
pub fn form_to_class(ring: &GradedRing, form: &Form) -> Result<Homog> {
    if !matches!(ring.provenance, Provenance::Torus { .. }) || ring.n != form.n() {
        return Err(Error::InvalidInput(
            "form_to_class needs a torus ring of the form's dimension".into(),
        ));
    }
    Ok(Homog::new(form.p(), form.q(), form.coeffs().to_vec()))
}

/// Constant form representing a class on a torus ring.
pub fn class_to_form(ring: &GradedRing, ctx: &Arc<ExteriorContext>, x: &Homog) -> Result<Form> {
    if !matches!(ring.provenance, Provenance::Torus { .. }) || ring.n != ctx.n() {
        return Err(Error::InvalidInput(
            "class_to_form needs a torus ring of the context's dimension".into(),
        ));
    }
    Form::from_coeffs(ctx, x.p, x.q, x.coords.clone())
}

fn total_degree(b: &BasisElement) -> usize {
    b.p + b.q
}

/// `R₁ ⊗ R₂` with `(a⊗b)(c⊗d) = (-1)^{|b||c|} ac ⊗ bd` and `∫ a⊗b = ∫a · ∫b`.
///
/// The first embedding is `a ↦ a⊗1`, the second `b ↦ 1⊗b`.
pub fn kunneth_product(left: &Arc<GradedRing>, right: &Arc<GradedRing>) -> Result<GradedRing> {
    let (d1, d2) = (left.len(), right.len());
    let idx = |a: usize, b: usize| a * d2 + b;
    let mut basis = Vec::with_capacity(d1 * d2);
    for a in &left.basis {
        for b in &right.basis {
            basis.push(BasisElement {
                name: format!("{}⊗{}", a.name, b.name),
                p: a.p + b.p,
                q: a.q + b.q,
            });
        }
    }
    let mut mult = Vec::new();
    for a in 0..d1 {
        for c in 0..d1 {
            let ac = left.mul_basis(a, c);
            if ac.is_empty() {
                continue;
            }
            let deg_c = total_degree(&left.basis[c]);
            for b in 0..d2 {
                let sign = if (total_degree(&right.basis[b]) * deg_c).is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                };
                for d in 0..d2 {
                    for &(k1, c1) in ac {
                        for &(k2, c2) in right.mul_basis(b, d) {
                            mult.push((idx(a, b), idx(c, d), idx(k1, k2), c1 * c2 * sign));
                        }
                    }
                }
            }
        }
    }
    let mut conj = Vec::new();
    for a in 0..d1 {
        for b in 0..d2 {
            for &(k1, c1) in left.conj_basis(a) {
                for &(k2, c2) in right.conj_basis(b) {
                    conj.push((idx(a, b), idx(k1, k2), c1 * c2));
                }
            }
        }
    }
    let mut integral = Vec::new();
    for a in 0..d1 {
        for b in 0..d2 {
            let v = left.integral[a] * right.integral[b];
            if v != ZERO {
                integral.push((idx(a, b), v));
            }
        }
    }
    let provenance = Provenance::Kunneth {
        left: Box::new(left.provenance.clone()),
        right: Box::new(right.provenance.clone()),
    };
    let mut ring = GradedRing::from_parts(
        left.n + right.n,
        basis,
        &mult,
        &conj,
        &integral,
        idx(left.unit, right.unit),
        provenance,
    )?;
    ring.embeddings = vec![
        Embedding {
            source: left.clone(),
            images: (0..d1).map(|a| idx(a, right.unit)).collect(),
        },
        Embedding {
            source: right.clone(),
            images: (0..d2).map(|b| idx(left.unit, b)).collect(),
        },
    ];
    Ok(ring)
}

/// A projective-bundle ring together with its tautological class `w`.
#[derive(Debug, Clone)]
pub struct BundleRing {
    pub ring: Arc<GradedRing>,
    pub w: Homog,
    pub rank: usize,
}

fn check_chern(base: &GradedRing, chern: &[Homog], rank: usize) -> Result<()> {
    if rank == 0 {
        return Err(Error::InvalidInput("bundle rank must be positive".into()));
    }
    if chern.len() != rank {
        return Err(Error::DegreeOutOfRange(format!(
            "expected {rank} Chern classes, got {}",
            chern.len()
        )));
    }
    for (l, c) in chern.iter().enumerate() {
        let l = l + 1;
        if (c.p, c.q) != (l, l) && !(c.coords.is_empty() && base.dim(l, l) == 0) {
            return Err(Error::DegreeOutOfRange(format!(
                "c_{l} must have bidegree ({l},{l}), got ({},{})",
                c.p, c.q
            )));
        }
        if l <= base.n {
            base.check_homog(&Homog::new(l, l, c.coords.clone()))?;
            if !base.is_real(&Homog::new(l, l, c.coords.clone()))? {
                return Err(Error::InvalidInput(format!("c_{l} must be a real class")));
            }
        } else if c.coords.iter().any(|x| *x != ZERO) {
            return Err(Error::DegreeOutOfRange(format!("c_{l} lies beyond the top degree")));
        }
    }
    Ok(())
}

/// `H*(P(E))` as the free `R`-module with basis `1, w, …, w^{e-1}` modulo
/// `w^e - c_1 w^{e-1} + ⋯ + (-1)^e c_e = 0`, with `∫ π*(a) w^{e-1} = ∫ a`.
///
/// Basis element `b_a w^j` sits at index `j · dim R + a`.
pub fn projective_bundle_ring(base: &Arc<GradedRing>, chern: &[Homog], rank: usize) -> Result<BundleRing> {
    check_chern(base, chern, rank)?;
    let e = rank;
    let d = base.len();
    let n = base.n + e - 1;
    let idx = |j: usize, a: usize| j * d + a;
    let c_dense: Vec<Vec<C64>> = chern
        .iter()
        .enumerate()
        .map(|(l, c)| if l < base.n { base.to_dense(c) } else { vec![ZERO; d] })
        .collect();
    // reduced powers: w^m = Σ_l pow[m][l] w^l, l < e
    let unit_dense = base.to_dense(&base.unit());
    let mut pow: Vec<Vec<Vec<C64>>> = Vec::new();
    for m in 0..=2 * (e - 1) {
        let next = if m < e {
            (0..e)
                .map(|l| if l == m { unit_dense.clone() } else { vec![ZERO; d] })
                .collect()
        } else {
            let prev: &Vec<Vec<C64>> = &pow[m - 1];
            let mut next: Vec<Vec<C64>> = vec![vec![ZERO; d]; e];
            next[1..e].clone_from_slice(&prev[..e - 1]);
            let top = &prev[e - 1];
            for l in 1..=e {
                let sign = if (l - 1) % 2 == 0 { 1.0 } else { -1.0 };
                let term = base.dense_mul(top, &c_dense[l - 1]);
                for (x, t) in next[e - l].iter_mut().zip(term) {
                    *x += t * sign;
                }
            }
            next
        };
        pow.push(next);
    }
    let mut basis = Vec::with_capacity(e * d);
    for j in 0..e {
        for b in &base.basis {
            basis.push(BasisElement {
                name: match j {
                    0 => b.name.clone(),
                    1 => format!("{}·w", b.name),
                    _ => format!("{}·w^{j}", b.name),
                },
                p: b.p + j,
                q: b.q + j,
            });
        }
    }
    let mut mult = Vec::new();
    for i in 0..e {
        for j in 0..e {
            let w_pow = &pow[i + j];
            for a in 0..d {
                for c in 0..d {
                    let ac = base.mul_basis(a, c);
                    if ac.is_empty() {
                        continue;
                    }
                    let mut ac_dense = vec![ZERO; d];
                    ac.iter().for_each(|&(k, v)| ac_dense[k] += v);
                    for (l, coef) in w_pow.iter().enumerate() {
                        if coef.iter().all(|x| *x == ZERO) {
                            continue;
                        }
                        for (k, v) in base.dense_mul(&ac_dense, coef).into_iter().enumerate() {
                            if v != ZERO {
                                mult.push((idx(i, a), idx(j, c), idx(l, k), v));
                            }
                        }
                    }
                }
            }
        }
    }
    let mut conj = Vec::new();
    for j in 0..e {
        for a in 0..d {
            for &(k, c) in base.conj_basis(a) {
                conj.push((idx(j, a), idx(j, k), c));
            }
        }
    }
    let integral: Vec<(usize, C64)> = (0..d)
        .filter(|&a| base.integral[a] != ZERO)
        .map(|a| (idx(e - 1, a), base.integral[a]))
        .collect();
    let provenance = Provenance::ProjectiveBundle {
        base: Box::new(base.provenance.clone()),
        rank,
        chern: chern.iter().map(|c| c.coords.clone()).collect(),
    };
    let mut ring = GradedRing::from_parts(n, basis, &mult, &conj, &integral, idx(0, base.unit), provenance)?;
    ring.embeddings = vec![Embedding {
        source: base.clone(),
        images: (0..d).map(|a| idx(0, a)).collect(),
    }];
    let w = if e >= 2 {
        ring.basis_homog(idx(1, base.unit))
    } else {
        ring.embeddings[0].apply(&ring, &chern[0])?
    };
    Ok(BundleRing {
        ring: Arc::new(ring),
        w,
        rank,
    })
}

/// `Σ_{l=0}^{e} (-1)^l π*c_l · w^{e-l}` computed with the bundle ring's own product.
pub fn grothendieck_residual(bundle: &BundleRing, chern: &[Homog]) -> Result<f64> {
    let ring = &bundle.ring;
    let pi = ring.base_embedding().expect("bundle rings carry their base embedding");
    let e = bundle.rank;
    let mut acc = ring.power(&bundle.w, e);
    for (l, c) in chern.iter().enumerate() {
        let l = l + 1;
        if l > pi.source().n() {
            continue;
        }
        let term = ring.mul(&pi.apply(ring, c)?, &ring.power(&bundle.w, e - l));
        let sign = if l % 2 == 0 { ONE } else { -ONE };
        acc = acc.add(&term.scale(sign));
    }
    Ok(acc.norm())
}

/// Segre classes `s_0..s_{max}` of the relation: `s_m = Σ_l (-1)^{l-1} c_l s_{m-l}`.
pub fn segre_classes(base: &GradedRing, chern: &[Homog], max: usize) -> Vec<Homog> {
    let mut s = vec![base.unit()];
    for m in 1..=max {
        let mut acc = Homog::zero(base, m, m);
        for l in 1..=m.min(chern.len()) {
            if l > base.n {
                continue;
            }
            let sign = if (l - 1) % 2 == 0 { ONE } else { -ONE };
            acc = acc.add(&base.mul(&chern[l - 1], &s[m - l]).scale(sign));
        }
        s.push(acc);
    }
    s
}

/// Largest deviation of `∫_P π*(a) w^{e-1+m}` from `∫ a · s_m` over basis elements `a`.
pub fn bundle_integral_residual(bundle: &BundleRing, chern: &[Homog]) -> Result<f64> {
    let ring = &bundle.ring;
    let pi = ring.base_embedding().expect("bundle rings carry their base embedding");
    let base = pi.source();
    let nb = base.n();
    let segre = segre_classes(base, chern, nb);
    let mut worst: f64 = 0.0;
    for (m, s_m) in segre.iter().enumerate() {
        let w_pow = ring.power(&bundle.w, bundle.rank - 1 + m);
        for &a in base.component(nb - m, nb - m) {
            let a_h = base.basis_homog(a);
            let lhs = ring.integrate(&ring.mul(&pi.apply(ring, &a_h)?, &w_pow));
            let rhs = base.integrate(&base.mul(&a_h, s_m));
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}

/// Per-check residuals of the ring axioms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingDiagnostics {
    pub n: usize,
    pub dim: usize,
    pub unit_residual: f64,
    pub commutativity_residual: f64,
    pub associativity_residual: f64,
    pub conj_involution_residual: f64,
    pub conj_multiplicative_residual: f64,
    pub poincare: Vec<PoincareCheck>,
    pub pass: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareCheck {
    pub p: usize,
    pub q: usize,
    pub dim: usize,
    pub dual_dim: usize,
    /// `σ_min / σ_max` of the pairing block (0 when the dimensions differ).
    pub margin: f64,
    pub condition: f64,
    pub pass: bool,
}

fn sparse_diff(dim: usize, a: &[(usize, C64)], b: &[(usize, C64)], sb: f64) -> f64 {
    let mut x = vec![ZERO; dim];
    a.iter().for_each(|&(k, c)| x[k] += c);
    b.iter().for_each(|&(k, c)| x[k] -= c * sb);
    x.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Checks unit, graded commutativity, associativity, conjugation and Poincaré duality.
pub fn ring_validate(ring: &GradedRing) -> RingDiagnostics {
    let dim = ring.len();
    let scale = ring.mult.iter().flatten().map(|(_, c)| c.norm()).fold(1.0, f64::max);
    let mut failures = Vec::new();

    let mut unit_res: f64 = 0.0;
    for i in 0..dim {
        let e = [(i, ONE)];
        unit_res = unit_res
            .max(sparse_diff(dim, ring.mul_basis(ring.unit, i), &e, 1.0))
            .max(sparse_diff(dim, ring.mul_basis(i, ring.unit), &e, 1.0));
    }

    let mut comm: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let s = if (total_degree(&ring.basis[i]) * total_degree(&ring.basis[j])).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            comm = comm.max(sparse_diff(dim, ring.mul_basis(i, j), ring.mul_basis(j, i), s));
        }
    }

    let mut assoc: f64 = 0.0;
    let mut left = vec![ZERO; dim];
    let mut right = vec![ZERO; dim];
    for i in 0..dim {
        for j in 0..dim {
            let ij = ring.mul_basis(i, j);
            for k in 0..dim {
                left.iter_mut().for_each(|x| *x = ZERO);
                right.iter_mut().for_each(|x| *x = ZERO);
                for &(a, c) in ij {
                    for &(b, c2) in ring.mul_basis(a, k) {
                        left[b] += c * c2;
                    }
                }
                for &(a, c) in ring.mul_basis(j, k) {
                    for &(b, c2) in ring.mul_basis(i, a) {
                        right[b] += c * c2;
                    }
                }
                let d = left.iter().zip(&right).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
                assoc = assoc.max(d);
            }
        }
    }

    // conj(conj(e_i)) = e_i, with conj antilinear
    let conj_vec = |x: &[C64]| -> Vec<C64> {
        let mut out = vec![ZERO; dim];
        for (i, a) in x.iter().enumerate().filter(|(_, a)| **a != ZERO) {
            for &(k, c) in &ring.conj[i] {
                out[k] += a.conj() * c;
            }
        }
        out
    };
    let basis_vec = |i: usize| {
        let mut v = vec![ZERO; dim];
        v[i] = ONE;
        v
    };
    let sparse_to_dense = |s: &[(usize, C64)]| {
        let mut v = vec![ZERO; dim];
        s.iter().for_each(|&(k, c)| v[k] += c);
        v
    };
    let max_diff = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let mut inv: f64 = 0.0;
    for i in 0..dim {
        let cc = conj_vec(&conj_vec(&basis_vec(i)));
        inv = inv.max(max_diff(&cc, &basis_vec(i)));
    }
    let mut cmul: f64 = 0.0;
    let conj_basis: Vec<Vec<C64>> = (0..dim).map(|i| conj_vec(&basis_vec(i))).collect();
    for i in 0..dim {
        for j in 0..dim {
            let lhs = conj_vec(&sparse_to_dense(ring.mul_basis(i, j)));
            let rhs = ring.dense_mul(&conj_basis[i], &conj_basis[j]);
            cmul = cmul.max(max_diff(&lhs, &rhs));
        }
    }

    let n = ring.n;
    let mut poincare = Vec::new();
    for p in 0..=n {
        for q in 0..=n {
            let (d, dd) = (ring.dim(p, q), ring.dim(n - p, n - q));
            let (margin, condition) = if d != dd {
                (0.0, f64::INFINITY)
            } else if d == 0 {
                (1.0, 1.0)
            } else {
                let sv = numkernel::singular_values(&ring.pairing_matrix(p, q));
                let (hi, lo) = (sv[0], *sv.last().expect("nonempty"));
                if hi == 0.0 {
                    (0.0, f64::INFINITY)
                } else {
                    (lo / hi, if lo > 0.0 { hi / lo } else { f64::INFINITY })
                }
            };
            let pass = margin > POINCARE_TOL;
            if !pass {
                failures.push(format!("Poincaré pairing degenerate at ({p},{q}): margin {margin:.3e}"));
            }
            poincare.push(PoincareCheck {
                p,
                q,
                dim: d,
                dual_dim: dd,
                margin,
                condition,
                pass,
            });
        }
    }
    let tol = RING_TOL * scale;
    for (name, v) in [
        ("unit", unit_res),
        ("graded commutativity", comm),
        ("associativity", assoc),
        ("conjugation involution", inv),
        ("conjugation multiplicativity", cmul),
    ] {
        if v.is_nan() || v > tol {
            failures.push(format!("{name} residual {v:.3e}"));
        }
    }
    RingDiagnostics {
        n,
        dim,
        unit_residual: unit_res,
        commutativity_residual: comm,
        associativity_residual: assoc,
        conj_involution_residual: inv,
        conj_multiplicative_residual: cmul,
        poincare,
        pass: failures.is_empty(),
        failures,
    }
}

/// Rebuilds a ring from its provenance.
pub fn rebuild(provenance: &Provenance) -> Result<GradedRing> {
    match provenance {
        Provenance::Loaded => Err(Error::Refused(
            "a loaded ring has no constructor to rebuild it from".into(),
        )),
        Provenance::Point => Ok(point_ring()),
        Provenance::ProjectiveSpace { m } => Ok(projective_space_ring(*m)),
        Provenance::Torus { h } => {
            let n = h.len();
            let ctx = ExteriorContext::new(n)?;
            let flat: Vec<C64> = h.iter().flatten().copied().collect();
            let m = CMatrix::from_row_major(n, n, flat)?;
            torus_ring(&PositiveForm::new(&ctx, m)?)
        }
        Provenance::Kunneth { left, right } => kunneth_product(&Arc::new(rebuild(left)?), &Arc::new(rebuild(right)?)),
        Provenance::ProjectiveBundle { base, rank, chern } => {
            let base = Arc::new(rebuild(base)?);
            let classes: Vec<Homog> = chern
                .iter()
                .enumerate()
                .map(|(l, c)| Homog::new(l + 1, l + 1, c.clone()))
                .collect();
            let b = projective_bundle_ring(&base, &classes, *rank)?;
            Ok(Arc::try_unwrap(b.ring).unwrap_or_else(|r| (*r).clone()))
        }
    }
}

/// The ring with a certified base embedding: either `ring` itself or its rebuild
/// from provenance when the tables agree. Rings of unknown origin are refused.
pub fn free_base(ring: &Arc<GradedRing>) -> Result<Arc<GradedRing>> {
    if ring.base_embedding().is_some() {
        return Ok(ring.clone());
    }
    if !matches!(
        ring.provenance,
        Provenance::Kunneth { .. } | Provenance::ProjectiveBundle { .. }
    ) {
        return Err(Error::Refused(
            "freeness over a base ring is only certified for Künneth products and projective bundles".into(),
        ));
    }
    let rebuilt = rebuild(&ring.provenance)?;
    match rebuilt.table_distance(ring) {
        Some(d) if d <= RING_TOL => Ok(Arc::new(rebuilt)),
        _ => Err(Error::Refused(
            "ring tables do not match the recorded provenance, so freeness cannot be certified".into(),
        )),
    }
}

/// A Hodge-Riemann pair `(v, w)` of ring classes.
#[derive(Debug, Clone)]
pub struct HRPairGlobal {
    engine: HodgeRiemannPair<Arc<GradedRing>>,
}

/// Verifies `(v, w)` for a real `(r, r)` class `v` and real `(1, 1)` class `w`.
pub fn verify_hr_pair_global(ring: &Arc<GradedRing>, v: &Homog, w: &Homog) -> Result<HRPairGlobal> {
    ring.check_homog(v)?;
    ring.check_homog(w)?;
    if v.p != v.q {
        return Err(Error::Bidegree(format!(
            "v must have bidegree (r,r), got ({},{})",
            v.p, v.q
        )));
    }
    if (w.p, w.q) != (1, 1) {
        return Err(Error::Bidegree(format!(
            "w must have bidegree (1,1), got ({},{})",
            w.p, w.q
        )));
    }
    if !ring.is_real(v)? || !ring.is_real(w)? {
        return Err(Error::InvalidInput("v and w must be real classes".into()));
    }
    Ok(HRPairGlobal {
        engine: HodgeRiemannPair::verify(ring.clone(), v.clone(), w.clone())?,
    })
}

impl HRPairGlobal {
    pub fn certificate(&self) -> &Certificate {
        self.engine.certificate()
    }

    pub fn is_verified(&self) -> bool {
        self.engine.is_verified()
    }

    pub fn engine(&self) -> &HodgeRiemannPair<Arc<GradedRing>> {
        &self.engine
    }

    pub fn ring(&self) -> &Arc<GradedRing> {
        self.engine.algebra()
    }
}

/// `‖a‖_{(v,w)}` for `p + q ≤ n - r` or `p + q ≥ n + r`.
pub fn global_metric(a: &Homog, pair: &HRPairGlobal) -> Result<f64> {
    pair.engine.metric(a)
}

/// `‖a‖_w`, the metric of the pair `(1, w)`, defined in every degree.
pub fn classical_metric(ring: &Arc<GradedRing>, a: &Homog, w: &Homog) -> Result<f64> {
    let pair = verify_hr_pair_global(ring, &ring.unit(), w)?;
    global_metric(a, &pair)
}

fn product_class(ring: &GradedRing, classes: &[Homog]) -> Homog {
    classes.iter().fold(ring.unit(), |acc, c| ring.mul(&acc, c))
}

fn orthonormal_kernel(m: &CMatrix) -> Result<CMatrix> {
    Ok(numkernel::nullspace(m, TolPolicy::Default)?)
}

/// Largest principal angle between the column span of `a` and its projection
/// into the column span of `b` (both orthonormal).
pub fn containment_angle(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.cols() == 0 {
        return 0.0;
    }
    if b.cols() == 0 {
        return std::f64::consts::FRAC_PI_2;
    }
    let proj = b.matmul(&b.adjoint().matmul(a));
    a.sub(&proj).spectral_norm().min(1.0).asin()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Report {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub s: usize,
    pub r: usize,
    pub component_dim: usize,
    pub kernel_u_dim: usize,
    pub kernel_v_dim: usize,
    pub angle: f64,
    pub contained: bool,
}

/// Checks `ker(-∧u) ⊂ ker(-∧v)` on `H^{p,q}(Y)` for `v = π*w_1 ⋯ π*w_s`
/// and `u = v · w_{s+1} ⋯ w_r`, `p + q + r = dim Y`.
///
/// `pulled` are classes on the base, `own` classes on `Y`.
pub fn theorem2_check(
    y: &Arc<GradedRing>,
    pulled: &[Homog],
    own: &[Homog],
    p: usize,
    q: usize,
) -> Result<Theorem2Report> {
    let y = free_base(y)?;
    let pi = y.base_embedding().expect("free_base returns a ring with its base");
    let (s, r) = (pulled.len(), pulled.len() + own.len());
    let n = y.n();
    if p + q + r != n {
        return Err(Error::DegreeOutOfRange(format!(
            "need p + q + r = n, got {p} + {q} + {r} != {n}"
        )));
    }
    for c in pulled.iter().chain(own) {
        if (c.p, c.q) != (1, 1) {
            return Err(Error::DegreeOutOfRange(format!(
                "classes must have bidegree (1,1), got ({},{})",
                c.p, c.q
            )));
        }
    }
    let pulled_y: Vec<Homog> = pulled.iter().map(|c| pi.apply(&y, c)).collect::<Result<_>>()?;
    for c in own {
        y.check_homog(c)?;
    }
    let v = product_class(&y, &pulled_y);
    let u = own.iter().fold(v.clone(), |acc, c| y.mul(&acc, c));
    let ku = orthonormal_kernel(&y.mul_matrix(&u, p, q))?;
    let kv = orthonormal_kernel(&y.mul_matrix(&v, p, q))?;
    let angle = containment_angle(&ku, &kv);
    Ok(Theorem2Report {
        n,
        p,
        q,
        s,
        r,
        component_dim: y.dim(p, q),
        kernel_u_dim: ku.cols(),
        kernel_v_dim: kv.cols(),
        angle,
        contained: angle <= CONTAINMENT_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem3Report {
    pub n: usize,
    pub e: usize,
    pub k: usize,
    pub p: usize,
    pub q: usize,
    pub samples: usize,
    /// Largest `‖(π*a·γ)·w·π*(w_1⋯w_k) - π*(a·c_e·w_1⋯w_k)‖ / max(1, ‖rhs‖)`.
    pub identity_residual: f64,
    pub relation_residual: f64,
    pub integral_residual: f64,
    /// Rank of `-∧c_e w_1⋯w_k : H^{p,q} → H^{n-q,n-p}`.
    pub rank: usize,
    pub component_dim: usize,
    pub full_rank: bool,
    pub pass: bool,
}

/// `γ = Σ_{j<e} (-1)^{e-1-j} π*c_j · w^{e-1-j}` (`c_0 = 1`), which satisfies `γ w = π*c_e`.
pub fn gamma_class(bundle: &BundleRing, chern: &[Homog]) -> Result<Homog> {
    let ring = &bundle.ring;
    let pi = ring.base_embedding().expect("bundle rings carry their base embedding");
    let base = pi.source();
    let e = bundle.rank;
    let mut acc = Homog::zero(&**ring, e - 1, e - 1);
    for j in 0..e {
        let cj = if j == 0 {
            ring.unit()
        } else if j <= base.n() {
            pi.apply(ring, &chern[j - 1])?
        } else {
            continue;
        };
        let sign = if (e - 1 - j).is_multiple_of(2) { ONE } else { -ONE };
        acc = acc.add(&ring.mul(&cj, &ring.power(&bundle.w, e - 1 - j)).scale(sign));
    }
    Ok(acc)
}

/// `‖(π*a·γ)·w·π*(w_1⋯w_k) - π*(a·c_e·w_1⋯w_k)‖ / max(1, ‖rhs‖)` in the bundle ring.
pub fn bundle_identity_residual(bundle: &BundleRing, chern: &[Homog], classes: &[Homog], a: &Homog) -> Result<f64> {
    let ring = &bundle.ring;
    let pi = ring.base_embedding().expect("bundle rings carry their base embedding");
    let x = pi.source();
    let e = bundle.rank;
    let gamma = gamma_class(bundle, chern)?;
    let w_prod = product_class(x, classes);
    let ce = if e <= x.n() {
        chern[e - 1].clone()
    } else {
        Homog::zero(&**x, e, e)
    };
    let lhs = ring.mul(
        &ring.mul(&ring.mul(&pi.apply(ring, a)?, &gamma), &bundle.w),
        &pi.apply(ring, &w_prod)?,
    );
    let rhs = pi.apply(ring, &x.mul(&x.mul(a, &ce), &w_prod))?;
    if (lhs.p, lhs.q) != (rhs.p, rhs.q) {
        return Err(Error::CertificateInconsistency(
            "identity sides have different bidegrees".into(),
        ));
    }
    Ok(lhs.sub(&rhs).norm() / rhs.norm().max(1.0))
}

/// Bundle-side identity behind the rank statement for `-∧c_e(E) w_1⋯w_k`,
/// checked on `samples` seeded random classes `a ∈ H^{p,q}(X)`.
pub fn theorem3_check(
    x: &Arc<GradedRing>,
    chern: &[Homog],
    classes: &[Homog],
    p: usize,
    q: usize,
    seed: u64,
    samples: usize,
) -> Result<Theorem3Report> {
    let e = chern.len();
    let k = classes.len();
    let n = x.n();
    if p + q + e + k != n {
        return Err(Error::DegreeOutOfRange(format!(
            "need p + q + e + k = n, got {p} + {q} + {e} + {k} != {n}"
        )));
    }
    for c in classes {
        if (c.p, c.q) != (1, 1) {
            return Err(Error::DegreeOutOfRange(format!(
                "classes must have bidegree (1,1), got ({},{})",
                c.p, c.q
            )));
        }
        x.check_homog(c)?;
    }
    let bundle = projective_bundle_ring(x, chern, e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let a = random_homog(x, p, q, &mut rng);
        worst = worst.max(bundle_identity_residual(&bundle, chern, classes, &a)?);
    }
    let w_prod = product_class(x, classes);
    let ce_w = x.mul(&chern[e - 1], &w_prod);
    let relation = grothendieck_residual(&bundle, chern)?;
    let integral = bundle_integral_residual(&bundle, chern)?;
    let map = x.mul_matrix(&ce_w, p, q);
    let dim = x.dim(p, q);
    let rank = numkernel::numerical_rank(&map, TolPolicy::Default);
    Ok(Theorem3Report {
        n,
        e,
        k,
        p,
        q,
        samples,
        identity_residual: worst,
        relation_residual: relation,
        integral_residual: integral,
        rank,
        component_dim: dim,
        full_rank: rank == dim && map.rows() == dim,
        pass: worst <= IDENTITY_TOL && relation <= IDENTITY_TOL && integral <= IDENTITY_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PointwiseVerdict {
    /// `a · ω_1⋯ω_r = 0`, so the constant representative of `a` is the required form.
    Holds {
        residual: f64,
    },
    NotApplicable {
        residual: f64,
    },
}

/// On a torus ring classes are their constant representatives, so a class
/// killed by `ω_1⋯ω_r` is represented by a form killed pointwise.
pub fn pointwise_zero_check(ring: &GradedRing, a: &Homog, classes: &[Homog]) -> Result<PointwiseVerdict> {
    if !matches!(ring.provenance, Provenance::Torus { .. }) {
        return Err(Error::InvalidInput("pointwise_zero_check needs a torus ring".into()));
    }
    ring.check_homog(a)?;
    let nu = product_class(ring, classes);
    let prod = ring.mul(a, &nu);
    let scale = a.norm() * nu.norm();
    let residual = if scale > 0.0 { prod.norm() / scale } else { 0.0 };
    Ok(if residual <= IDENTITY_TOL {
        PointwiseVerdict::Holds { residual }
    } else {
        PointwiseVerdict::NotApplicable { residual }
    })
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Gaussian coordinates on the `(p, q)` component.
pub fn random_homog<R: Rng + ?Sized>(ring: &GradedRing, p: usize, q: usize, rng: &mut R) -> Homog {
    Homog::new(p, q, (0..ring.dim(p, q)).map(|_| gaussian(rng)).collect())
}

/// `(x + conj x) / 2` for a random `x` of bidegree `(p, p)`.
pub fn random_real_class<R: Rng + ?Sized>(ring: &GradedRing, p: usize, rng: &mut R) -> Homog {
    let x = random_homog(ring, p, p, rng);
    x.add(&ring.conj(&x)).scale(C64::new(0.5, 0.0))
}

/// A Kähler class built from the ring's provenance; refused for rings whose
/// Kähler cone is not known by construction.
pub fn random_kahler_class(ring: &GradedRing, seed: u64, conditioning: f64) -> Result<Homog> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match &ring.provenance {
        Provenance::ProjectiveSpace { m } if *m >= 1 => {
            let t = (-rng.random::<f64>() * conditioning.ln()).exp();
            Ok(ring.basis_homog(1).scale(C64::new(t, 0.0)))
        }
        Provenance::Torus { .. } => {
            let ctx = ExteriorContext::new(ring.n)?;
            let f = crate::ineqlab::gen_positive_form(rng.random(), &ctx, conditioning)?;
            form_to_class(ring, &f.to_form())
        }
        Provenance::Kunneth { .. } => {
            let [left, right] = ring.embeddings() else {
                return Err(Error::Refused("Künneth ring without its factor embeddings".into()));
            };
            let mut acc = Homog::zero(ring, 1, 1);
            for emb in [left, right] {
                if emb.source().n() == 0 {
                    continue;
                }
                let k = random_kahler_class(emb.source(), rng.random(), conditioning)?;
                acc = acc.add(&emb.apply(ring, &k)?);
            }
            Ok(acc)
        }
        _ => Err(Error::Refused(
            "no Kähler class is known by construction for this ring".into(),
        )),
    }
}
