//! Buchberger's algorithm for ideals of `Q[x_1..x_m]` and for submodules of
//! free modules `Q[x]^r`, with membership tests and coefficient witnesses.
//!
//! An ideal is handled as a rank-one submodule; both share one engine.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::One;

use crate::error::{Error, Result};
use crate::polyalg::{
    exp_coprime, exp_divides, exp_lcm, exp_sub, ChartRef, Exponent, MonomialOrder, Poly, Rational,
};

/// How module terms `x^a e_i` are compared.
///
/// Positions with a smaller index are larger, so under position-over-term the
/// first components are eliminated first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ModuleOrder {
    #[default]
    PositionOverTerm,
    TermOverPosition,
}

type Vector = Vec<Poly>;

#[derive(Debug, Clone)]
struct Lead {
    pos: usize,
    exp: Exponent,
    coeff: Rational,
}

fn cmp_module_terms(
    order: MonomialOrder,
    module_order: ModuleOrder,
    a: (usize, &[u32]),
    b: (usize, &[u32]),
) -> Ordering {
    let by_pos = b.0.cmp(&a.0);
    match module_order {
        ModuleOrder::PositionOverTerm => by_pos.then_with(|| order.cmp(a.1, b.1)),
        ModuleOrder::TermOverPosition => order.cmp(a.1, b.1).then(by_pos),
    }
}

fn lead_of(v: &[Poly], order: MonomialOrder, module_order: ModuleOrder) -> Option<Lead> {
    let mut best: Option<Lead> = None;
    for (pos, p) in v.iter().enumerate() {
        if let Some((exp, coeff)) = p.leading_term(order) {
            let better = match &best {
                None => true,
                Some(b) => {
                    cmp_module_terms(order, module_order, (pos, exp), (b.pos, &b.exp))
                        == Ordering::Greater
                }
            };
            if better {
                best = Some(Lead {
                    pos,
                    exp: exp.clone(),
                    coeff: coeff.clone(),
                });
            }
            if module_order == ModuleOrder::PositionOverTerm {
                break;
            }
        }
    }
    best
}

fn axpy_shifted(target: &mut Poly, source: &Poly, shift: &[u32], factor: &Rational) {
    for (e, c) in source.terms() {
        let e2: Exponent = e.iter().zip(shift).map(|(a, b)| a + b).collect();
        target.add_term(e2, -(c * factor));
    }
}

fn scale_vec(v: &[Poly], c: &Rational) -> Vector {
    v.iter().map(|p| p.scale(c)).collect()
}

#[derive(Debug, Clone)]
struct Element {
    vec: Vector,
    lead: Lead,
    /// Coefficients over the original generators, when tracked.
    track: Option<Vector>,
}

/// A completed, reduced Gröbner basis of a submodule (or ideal when rank is 1).
#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    chart: ChartRef,
    rank: usize,
    order: MonomialOrder,
    module_order: ModuleOrder,
    elements: Vec<Element>,
}

/// Result of dividing a vector by a basis.
#[derive(Debug, Clone)]
pub struct Division {
    pub remainder: Vector,
    /// `input - remainder = sum_j cofactors[j] * generator_j`, present when tracked.
    pub cofactors: Option<Vector>,
}

impl GroebnerBasis {
    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn module_order(&self) -> ModuleOrder {
        self.module_order
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn vectors(&self) -> impl Iterator<Item = &Vector> {
        self.elements.iter().map(|e| &e.vec)
    }

    /// Basis polynomials of a rank-one basis.
    pub fn polys(&self) -> Vec<Poly> {
        self.elements.iter().map(|e| e.vec[0].clone()).collect()
    }

    /// Leading position and exponent of every element.
    pub fn leading_terms(&self) -> Vec<(usize, Exponent)> {
        self.elements
            .iter()
            .map(|e| (e.lead.pos, e.lead.exp.clone()))
            .collect()
    }

    /// Whether the basis contains a unit (the whole free module component).
    pub fn is_unit(&self) -> bool {
        self.elements
            .iter()
            .any(|e| e.lead.exp.iter().all(|&k| k == 0))
    }

    pub fn divide(&self, v: &[Poly]) -> Division {
        let ngens = self
            .elements
            .first()
            .and_then(|e| e.track.as_ref().map(|t| t.len()));
        let (remainder, cofactors) = reduce(
            &self.chart,
            v.to_vec(),
            ngens.map(|n| vec![Poly::zero(&self.chart); n]),
            &self.elements,
            self.order,
            self.module_order,
            None,
        );
        // reduce() subtracted the quotient from a zero track
        let cofactors = cofactors.map(|t| t.iter().map(|p| -p).collect());
        Division {
            remainder,
            cofactors,
        }
    }

    pub fn normal_form(&self, v: &[Poly]) -> Vector {
        self.divide(v).remainder
    }

    pub fn reduces_to_zero(&self, v: &[Poly]) -> bool {
        self.normal_form(v).iter().all(Poly::is_zero)
    }
}

/// Reduces `p` fully modulo `basis`, skipping the element at index `skip`.
///
/// Every subtraction of a basis multiple is mirrored on `track`, so if the
/// input satisfied `p = sum_j track_j g_j` the remainder does too.
fn reduce(
    chart: &ChartRef,
    mut p: Vector,
    mut track: Option<Vector>,
    basis: &[Element],
    order: MonomialOrder,
    module_order: ModuleOrder,
    skip: Option<usize>,
) -> (Vector, Option<Vector>) {
    let mut rem: Vector = vec![Poly::zero(chart); p.len()];
    while let Some(lead) = lead_of(&p, order, module_order) {
        let divisor = basis.iter().enumerate().find(|(k, b)| {
            Some(*k) != skip && b.lead.pos == lead.pos && exp_divides(&b.lead.exp, &lead.exp)
        });
        match divisor {
            Some((_, b)) => {
                let shift = exp_sub(&lead.exp, &b.lead.exp);
                let factor = &lead.coeff / &b.lead.coeff;
                for (target, source) in p.iter_mut().zip(&b.vec) {
                    axpy_shifted(target, source, &shift, &factor);
                }
                if let (Some(t), Some(bt)) = (track.as_mut(), b.track.as_ref()) {
                    for (target, source) in t.iter_mut().zip(bt) {
                        axpy_shifted(target, source, &shift, &factor);
                    }
                }
            }
            None => {
                p[lead.pos].remove_term(&lead.exp);
                rem[lead.pos].add_term(lead.exp, lead.coeff);
            }
        }
    }
    (rem, track)
}

fn make_element(
    vec: Vector,
    track: Option<Vector>,
    order: MonomialOrder,
    module_order: ModuleOrder,
) -> Option<Element> {
    let lead = lead_of(&vec, order, module_order)?;
    let inv = lead.coeff.recip();
    let vec = scale_vec(&vec, &inv);
    let track = track.map(|t| scale_vec(&t, &inv));
    Some(Element {
        vec,
        lead: Lead {
            coeff: Rational::one(),
            ..lead
        },
        track,
    })
}

/// Buchberger's algorithm with the product criterion (rank one only) and the
/// chain criterion, followed by minimization and interreduction.
pub fn compute_basis(
    chart: &ChartRef,
    rank: usize,
    generators: &[Vector],
    order: MonomialOrder,
    module_order: ModuleOrder,
    tracked: bool,
) -> GroebnerBasis {
    let ngens = generators.len();
    let mut elems: Vec<Element> = Vec::new();
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();

    let push = |elems: &mut Vec<Element>, pairs: &mut BTreeSet<(usize, usize)>, e: Element| {
        let new = elems.len();
        for (i, other) in elems.iter().enumerate() {
            if other.lead.pos == e.lead.pos {
                pairs.insert((i, new));
            }
        }
        elems.push(e);
    };

    for (j, g) in generators.iter().enumerate() {
        let track = tracked.then(|| {
            let mut t = vec![Poly::zero(chart); ngens];
            t[j] = Poly::one(chart);
            t
        });
        let (r, t) = reduce(chart, g.clone(), track, &elems, order, module_order, None);
        if let Some(e) = make_element(r, t, order, module_order) {
            push(&mut elems, &mut pairs, e);
        }
    }

    while let Some(&(i, j)) = pairs.iter().min_by(|a, b| {
        let la = exp_lcm(&elems[a.0].lead.exp, &elems[a.1].lead.exp);
        let lb = exp_lcm(&elems[b.0].lead.exp, &elems[b.1].lead.exp);
        cmp_module_terms(
            order,
            module_order,
            (elems[a.0].lead.pos, &la),
            (elems[b.0].lead.pos, &lb),
        )
        .then_with(|| a.cmp(b))
    }) {
        pairs.remove(&(i, j));
        let (fi, fj) = (&elems[i], &elems[j]);
        if rank == 1 && exp_coprime(&fi.lead.exp, &fj.lead.exp) {
            continue;
        }
        let lcm = exp_lcm(&fi.lead.exp, &fj.lead.exp);
        let chain = (0..elems.len()).any(|k| {
            k != i
                && k != j
                && elems[k].lead.pos == fi.lead.pos
                && exp_divides(&elems[k].lead.exp, &lcm)
                && !pairs.contains(&(i.min(k), i.max(k)))
                && !pairs.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }
        let si = exp_sub(&lcm, &fi.lead.exp);
        let sj = exp_sub(&lcm, &fj.lead.exp);
        let one = Rational::one();
        let minus_one = -Rational::one();
        let mut s: Vector = vec![Poly::zero(chart); rank];
        for (k, target) in s.iter_mut().enumerate() {
            axpy_shifted(target, &fi.vec[k], &si, &minus_one);
            axpy_shifted(target, &fj.vec[k], &sj, &one);
        }
        let track = match (&fi.track, &fj.track) {
            (Some(ti), Some(tj)) => {
                let mut t = vec![Poly::zero(chart); ngens];
                for (k, target) in t.iter_mut().enumerate() {
                    axpy_shifted(target, &ti[k], &si, &minus_one);
                    axpy_shifted(target, &tj[k], &sj, &one);
                }
                Some(t)
            }
            _ => None,
        };
        let (r, t) = reduce(chart, s, track, &elems, order, module_order, None);
        if let Some(e) = make_element(r, t, order, module_order) {
            push(&mut elems, &mut pairs, e);
        }
    }

    // Minimize: drop elements whose leading term is divisible by another's.
    let mut keep: Vec<Element> = Vec::new();
    for (i, e) in elems.iter().enumerate() {
        let redundant = elems.iter().enumerate().any(|(k, other)| {
            k != i
                && other.lead.pos == e.lead.pos
                && exp_divides(&other.lead.exp, &e.lead.exp)
                && (other.lead.exp != e.lead.exp || k < i)
        });
        if !redundant {
            keep.push(e.clone());
        }
    }
    // Interreduce tails.
    for idx in 0..keep.len() {
        let e = keep[idx].clone();
        let (r, t) = reduce_tail(chart, &e, &keep, idx, order, module_order);
        keep[idx] = make_element(r, t, order, module_order)
            .expect("interreduction preserves the leading term");
    }
    keep.sort_by(|a, b| {
        cmp_module_terms(
            order,
            module_order,
            (b.lead.pos, &b.lead.exp),
            (a.lead.pos, &a.lead.exp),
        )
    });
    GroebnerBasis {
        chart: chart.clone(),
        rank,
        order,
        module_order,
        elements: keep,
    }
}

fn reduce_tail(
    chart: &ChartRef,
    e: &Element,
    basis: &[Element],
    idx: usize,
    order: MonomialOrder,
    module_order: ModuleOrder,
) -> (Vector, Option<Vector>) {
    let mut head: Vector = vec![Poly::zero(chart); e.vec.len()];
    head[e.lead.pos] = Poly::monomial(chart, e.lead.exp.clone(), e.lead.coeff.clone());
    let mut tail = e.vec.clone();
    tail[e.lead.pos].remove_term(&e.lead.exp);
    let (r, t) = reduce(
        chart,
        tail,
        e.track.clone(),
        basis,
        order,
        module_order,
        Some(idx),
    );
    let out = head.iter().zip(&r).map(|(a, b)| a + b).collect();
    (out, t)
}

type CacheKey = (MonomialOrder, ModuleOrder, bool);

#[derive(Debug, Default)]
struct BasisCache(Mutex<HashMap<CacheKey, Arc<GroebnerBasis>>>);

impl Clone for BasisCache {
    fn clone(&self) -> Self {
        BasisCache(Mutex::new(self.0.lock().expect("cache poisoned").clone()))
    }
}

impl BasisCache {
    fn get_or_compute(
        &self,
        key: CacheKey,
        compute: impl FnOnce() -> GroebnerBasis,
    ) -> Arc<GroebnerBasis> {
        if let Some(b) = self.0.lock().expect("cache poisoned").get(&key) {
            return b.clone();
        }
        let computed = Arc::new(compute());
        self.0
            .lock()
            .expect("cache poisoned")
            .entry(key)
            .or_insert(computed)
            .clone()
    }
}

/// A polynomial ideal given by generators, with cached Gröbner bases.
///
/// An empty generator list denotes the zero ideal (the constraint set is the
/// whole chart).
#[derive(Debug, Clone)]
pub struct Ideal {
    chart: ChartRef,
    generators: Vec<Poly>,
    order: MonomialOrder,
    cache: BasisCache,
}

impl Ideal {
    /// Zero generators are dropped.
    pub fn new(chart: &ChartRef, generators: Vec<Poly>) -> Result<Ideal> {
        for g in &generators {
            if g.chart() != chart {
                return Err(Error::IncompatibleCharts);
            }
        }
        Ok(Ideal {
            chart: chart.clone(),
            generators: generators.into_iter().filter(|g| !g.is_zero()).collect(),
            order: MonomialOrder::default(),
            cache: BasisCache::default(),
        })
    }

    pub fn zero(chart: &ChartRef) -> Ideal {
        Ideal {
            chart: chart.clone(),
            generators: Vec::new(),
            order: MonomialOrder::default(),
            cache: BasisCache::default(),
        }
    }

    /// The monomial order used by [`Ideal::contains`].
    pub fn with_order(mut self, order: MonomialOrder) -> Ideal {
        self.order = order;
        self
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.generators.is_empty()
    }

    fn gen_vectors(&self) -> Vec<Vector> {
        self.generators.iter().map(|g| vec![g.clone()]).collect()
    }

    pub fn groebner_basis(&self, order: MonomialOrder) -> Arc<GroebnerBasis> {
        self.basis_with(order, false)
    }

    fn basis_with(&self, order: MonomialOrder, tracked: bool) -> Arc<GroebnerBasis> {
        self.cache
            .get_or_compute((order, ModuleOrder::PositionOverTerm, tracked), || {
                compute_basis(
                    &self.chart,
                    1,
                    &self.gen_vectors(),
                    order,
                    ModuleOrder::PositionOverTerm,
                    tracked,
                )
            })
    }

    pub fn normal_form(&self, p: &Poly) -> Result<Poly> {
        p.same_chart(&Poly::zero(&self.chart))?;
        let b = self.groebner_basis(self.order);
        Ok(b.normal_form(std::slice::from_ref(p)).remove(0))
    }

    pub fn contains(&self, p: &Poly) -> Result<bool> {
        Ok(self.normal_form(p)?.is_zero())
    }

    pub fn contains_in_order(&self, p: &Poly, order: MonomialOrder) -> Result<bool> {
        p.same_chart(&Poly::zero(&self.chart))?;
        Ok(self
            .groebner_basis(order)
            .reduces_to_zero(std::slice::from_ref(p)))
    }

    /// Cofactors `h` with `p = sum_j h_j g_j`, or `None` when `p` is not a member.
    pub fn membership_witness(&self, p: &Poly) -> Result<Option<Vec<Poly>>> {
        p.same_chart(&Poly::zero(&self.chart))?;
        let b = self.basis_with(self.order, true);
        let div = b.divide(std::slice::from_ref(p));
        if !div.remainder[0].is_zero() {
            return Ok(None);
        }
        Ok(Some(div.cofactors.unwrap_or_else(|| {
            vec![Poly::zero(&self.chart); self.generators.len()]
        })))
    }

    /// Whether every generator of `other` lies in this ideal.
    pub fn contains_ideal(&self, other: &Ideal) -> Result<bool> {
        for g in other.generators() {
            if !self.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn same_ideal(&self, other: &Ideal) -> Result<bool> {
        Ok(self.contains_ideal(other)? && other.contains_ideal(self)?)
    }
}

pub fn groebner_basis(ideal: &Ideal, order: MonomialOrder) -> Arc<GroebnerBasis> {
    ideal.groebner_basis(order)
}

pub fn ideal_contains(ideal: &Ideal, p: &Poly) -> Result<bool> {
    ideal.contains(p)
}

/// A submodule of the free module `Q[x]^rank` given by generators.
#[derive(Debug, Clone)]
pub struct SubmoduleBasis {
    chart: ChartRef,
    rank: usize,
    generators: Vec<Vector>,
    order: MonomialOrder,
    module_order: ModuleOrder,
    cache: BasisCache,
}

impl SubmoduleBasis {
    pub fn new(chart: &ChartRef, rank: usize, generators: Vec<Vector>) -> Result<SubmoduleBasis> {
        if rank == 0 {
            return Err(Error::Unsupported("module rank must be positive".into()));
        }
        for g in &generators {
            if g.len() != rank {
                return Err(Error::LengthMismatch {
                    expected: rank,
                    found: g.len(),
                });
            }
            for p in g {
                if p.chart() != chart {
                    return Err(Error::IncompatibleCharts);
                }
            }
        }
        Ok(SubmoduleBasis {
            chart: chart.clone(),
            rank,
            generators: generators
                .into_iter()
                .filter(|g| g.iter().any(|p| !p.is_zero()))
                .collect(),
            order: MonomialOrder::default(),
            module_order: ModuleOrder::default(),
            cache: BasisCache::default(),
        })
    }

    /// The free module with the standard unit vectors as generators.
    pub fn free(chart: &ChartRef, rank: usize) -> SubmoduleBasis {
        let gens = (0..rank)
            .map(|i| {
                (0..rank)
                    .map(|k| {
                        if k == i {
                            Poly::one(chart)
                        } else {
                            Poly::zero(chart)
                        }
                    })
                    .collect()
            })
            .collect();
        SubmoduleBasis::new(chart, rank, gens).expect("unit vectors are well formed")
    }

    pub fn with_order(mut self, order: MonomialOrder, module_order: ModuleOrder) -> Self {
        self.order = order;
        self.module_order = module_order;
        self
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[Vector] {
        &self.generators
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn module_basis(
        &self,
        order: MonomialOrder,
        module_order: ModuleOrder,
    ) -> Arc<GroebnerBasis> {
        self.basis_with(order, module_order, false)
    }

    fn basis_with(
        &self,
        order: MonomialOrder,
        module_order: ModuleOrder,
        tracked: bool,
    ) -> Arc<GroebnerBasis> {
        self.cache
            .get_or_compute((order, module_order, tracked), || {
                compute_basis(
                    &self.chart,
                    self.rank,
                    &self.generators,
                    order,
                    module_order,
                    tracked,
                )
            })
    }

    fn check_vector(&self, v: &[Poly]) -> Result<()> {
        if v.len() != self.rank {
            return Err(Error::LengthMismatch {
                expected: self.rank,
                found: v.len(),
            });
        }
        for p in v {
            if p.chart() != &self.chart {
                return Err(Error::IncompatibleCharts);
            }
        }
        Ok(())
    }

    pub fn normal_form(&self, v: &[Poly]) -> Result<Vector> {
        self.check_vector(v)?;
        Ok(self
            .module_basis(self.order, self.module_order)
            .normal_form(v))
    }

    pub fn contains(&self, v: &[Poly]) -> Result<bool> {
        Ok(self.normal_form(v)?.iter().all(Poly::is_zero))
    }

    /// Ring coefficients `h` with `v = sum_j h_j generator_j`, or `None`.
    pub fn membership_witness(&self, v: &[Poly]) -> Result<Option<Vec<Poly>>> {
        self.check_vector(v)?;
        let b = self.basis_with(self.order, self.module_order, true);
        let div = b.divide(v);
        if div.remainder.iter().any(|p| !p.is_zero()) {
            return Ok(None);
        }
        Ok(Some(div.cofactors.unwrap_or_else(|| {
            vec![Poly::zero(&self.chart); self.generators.len()]
        })))
    }

    /// Whether every generator of `other` lies in this submodule.
    pub fn contains_module(&self, other: &SubmoduleBasis) -> Result<bool> {
        for g in other.generators() {
            if !self.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn same_module(&self, other: &SubmoduleBasis) -> Result<bool> {
        Ok(self.contains_module(other)? && other.contains_module(self)?)
    }
}

pub fn module_basis(
    m: &SubmoduleBasis,
    order: MonomialOrder,
    module_order: ModuleOrder,
) -> Arc<GroebnerBasis> {
    m.module_basis(order, module_order)
}

pub fn module_contains(m: &SubmoduleBasis, v: &[Poly]) -> Result<bool> {
    m.contains(v)
}

/// Recombines cofactors against generators: `sum_j h_j g_j`.
pub fn recombine(
    chart: &ChartRef,
    rank: usize,
    generators: &[Vector],
    cofactors: &[Poly],
) -> Vector {
    let mut out = vec![Poly::zero(chart); rank];
    for (g, h) in generators.iter().zip(cofactors) {
        if h.is_zero() {
            continue;
        }
        for (o, p) in out.iter_mut().zip(g) {
            *o = &*o + &(h * p);
        }
    }
    out
}
