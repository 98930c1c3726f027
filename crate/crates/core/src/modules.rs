use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{tensor, Algebra, Monomial, Poly, Rewrite, Variable};
use crate::error::{Error, Result};
use crate::hopf::{
    perfect_kernel_hopf, perfect_line_hopf, witt_kernel_hopf, HopfData, WittGrading,
};
use crate::maps::AlgebraMap;
use crate::rat::Rat;
use crate::scalars::{Fp, WeightScalar};
use crate::witt::witt_polys;

/// Truncation parameters shared by every construction in a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Params {
    pub p: u32,
    /// Witt length.
    pub n: u32,
    /// Perfection depth: towers carry roots down to `1/p^depth`.
    pub depth: u32,
    /// Degree bound for every graded piece.
    pub bound: Rat,
}

impl Params {
    pub fn new(p: u32, n: u32, depth: u32, bound: Rat) -> Result<Params> {
        crate::scalars::Prime::new(p)?;
        if n == 0 || n > 4 {
            return Err(Error::Usage(format!("witt length {} outside 1..=4", n)));
        }
        if depth > 4 {
            return Err(Error::Usage(format!("perfection depth {} outside 0..=4", depth)));
        }
        if bound <= Rat::ZERO || bound > Rat::from_int(16) {
            return Err(Error::Usage(format!("degree bound {} outside (0, 16]", bound)));
        }
        Ok(Params { p, n, depth, bound })
    }
}

/// The coordinate ring of the truncated perfected affine line, the common
/// target of all augmentations. Its single tower is named `x`, `deg x = 1`.
pub fn base_line(params: &Params) -> Result<Arc<Algebra>> {
    Algebra::new(
        params.p,
        params.depth,
        params.bound,
        vec![Variable::tower("x", Rat::ONE)],
        BTreeMap::new(),
    )
}

/// A module over the perfected additive group presented as Hopf data plus a
/// graded augmentation from the base line. The scaling coaction is diagonal
/// in every catalog presentation: a generator of degree `d` scales by the
/// d-th power of the group coordinate, so the grading itself carries it.
#[derive(Debug, Clone)]
pub struct AugmentedModule {
    pub label: String,
    pub params: Params,
    pub hopf: HopfData,
    pub base: Arc<Algebra>,
    pub aug: AlgebraMap,
    /// How many Frobenius pushforwards produced this module.
    pub twist: u32,
}

impl AugmentedModule {
    fn validate(self) -> Result<AugmentedModule> {
        if self.aug.source.as_ref() != self.base.as_ref()
            || self.aug.target.as_ref() != self.hopf.alg.as_ref()
        {
            return Err(Error::Internal("augmentation endpoints mismatch".into()));
        }
        self.check_augmentation_additive()?;
        Ok(self)
    }

    /// The augmentation must be a map of group schemes: its generator images
    /// are primitive for the comultiplication.
    fn check_augmentation_additive(&self) -> Result<()> {
        let sq = &self.hopf.square;
        let img = self.aug.image(0);
        let left = img.reindex(&sq.left);
        let right = img.reindex(&sq.right);
        let want = sq.alg.nf(&left.add(&right))?;
        let got = self.hopf.comult.apply(img)?;
        if sq.alg.nf(&got.poly.sub(&want.poly))?.poly.is_zero() {
            Ok(())
        } else {
            Err(Error::Internal(format!(
                "augmentation of {} is not additive",
                self.label
            )))
        }
    }

    /// Image of the bottom coordinate of the base line: the element whose
    /// nilpotency the predicates decide.
    pub fn aug_of_bottom(&self) -> Result<Poly<Fp>> {
        let p = self.params.p as u64;
        let k = p.pow(self.params.depth);
        Ok(self.hopf.alg.pow_nf(self.aug.image(0), k)?.poly)
    }

    /// Indices of the order-p nilpotent coordinates, ascending by degree.
    pub fn witt_vars(&self) -> Vec<usize> {
        let alg = &self.hopf.alg;
        let mut vs: Vec<usize> = (0..alg.vars().len())
            .filter(|v| alg.vars()[*v].kind == crate::algebra::VarKind::NilpotentOrderP)
            .collect();
        vs.sort_by_key(|v| alg.vars()[*v].degree);
        vs
    }

    /// Structural comparison after renaming has been undone; `None` means
    /// equal presentations and equal structure maps.
    pub fn first_difference(&self, other: &AugmentedModule) -> Result<Option<String>> {
        if self.hopf.alg.as_ref() != other.hopf.alg.as_ref() {
            return Ok(Some("underlying algebra presentations differ".into()));
        }
        if let Some(v) = self.hopf.comult.first_difference(&other.hopf.comult)? {
            return Ok(Some(format!(
                "comultiplication differs on {}",
                self.hopf.alg.vars()[v].name
            )));
        }
        if let Some(v) = self.hopf.antipode.first_difference(&other.hopf.antipode)? {
            return Ok(Some(format!("antipode differs on {}", self.hopf.alg.vars()[v].name)));
        }
        if let Some(v) = self.aug.first_difference(&other.aug)? {
            return Ok(Some(format!(
                "augmentation differs on {}",
                self.base.vars()[v].name
            )));
        }
        Ok(None)
    }
}

/// An augmented module over the plain additive group: the input shape for
/// the pullback along the perfection cover. The base is `F_p[t]`.
pub struct GaAugmented {
    pub hopf: HopfData,
    pub base: Arc<Algebra>,
    pub aug: AlgebraMap,
}

fn ga_base(params: &Params) -> Result<Arc<Algebra>> {
    Algebra::new(
        params.p,
        params.depth,
        params.bound,
        vec![Variable::plain("t", Rat::ONE, 0)],
        BTreeMap::new(),
    )
}

/// Frobenius kernel on Witt vectors augmented by the first component.
pub fn ga_witt_kernel(params: &Params) -> Result<GaAugmented> {
    let w = witt_polys(params.p, params.n)?;
    let hopf = witt_kernel_hopf(&w, WittGrading::Standard, params.depth, params.bound)?;
    let base = ga_base(params)?;
    let img = Poly::monomial(params.p, Monomial::var(0, Rat::ONE)); // t -> x0
    let aug = AlgebraMap::new(base.clone(), hopf.alg.clone(), vec![img])?;
    Ok(GaAugmented { hopf, base, aug })
}

/// Frobenius-twisted kernel augmented by zero.
pub fn ga_witt_kernel_twisted(params: &Params) -> Result<GaAugmented> {
    let w = witt_polys(params.p, params.n)?;
    let hopf = witt_kernel_hopf(&w, WittGrading::Twisted, params.depth, params.bound)?;
    let base = ga_base(params)?;
    let aug = AlgebraMap::new(base.clone(), hopf.alg.clone(), vec![Poly::zero()])?;
    Ok(GaAugmented { hopf, base, aug })
}

/// Kernel of Frobenius on the additive group, augmented by inclusion.
pub fn ga_additive_p_kernel(params: &Params) -> Result<GaAugmented> {
    let hopf = crate::hopf::additive_p_kernel_hopf(params.p, params.depth, params.bound)?;
    let base = ga_base(params)?;
    let img = Poly::monomial(params.p, Monomial::var(0, Rat::ONE));
    let aug = AlgebraMap::new(base.clone(), hopf.alg.clone(), vec![img])?;
    Ok(GaAugmented { hopf, base, aug })
}

/// Pullback along the perfection cover of the additive group: adjoin a root
/// tower `x` to the coordinate ring, rewriting its bottom to the old
/// augmentation image, and re-augment by the tower itself.
pub fn pullback_u(label: &str, m0: &GaAugmented, params: &Params) -> Result<AugmentedModule> {
    let p = params.p;
    let old = &m0.hopf.alg;
    let nold = old.vars().len();
    let mut vars = old.vars().to_vec();
    let tower = vars.len();
    vars.push(Variable::tower("x", Rat::ONE));
    let mut rewrites = old.rewrites().clone();
    let t_image = m0.aug.image(0).clone(); // poly in old vars; indices unchanged
    rewrites.insert(tower, Rewrite::Bottom(t_image));
    let alg = Algebra::new(p, params.depth, params.bound, vars, rewrites)?;

    let square = tensor(&alg, &alg)?;
    // old square variable -> new square variable
    let mut sq_map = vec![0usize; m0.hopf.square.alg.vars().len()];
    for i in 0..nold {
        sq_map[m0.hopf.square.left[i]] = square.left[i];
        sq_map[m0.hopf.square.right[i]] = square.right[i];
    }
    let mut comult_images: Vec<Poly<Fp>> = Vec::with_capacity(nold + 1);
    for i in 0..nold {
        comult_images.push(m0.hopf.comult.image(i).reindex(&sq_map));
    }
    let l = Poly::monomial(p, alg.deepest(tower).reindex(&square.left));
    let r = Poly::monomial(p, alg.deepest(tower).reindex(&square.right));
    comult_images.push(l.add(&r));

    let old_to_new: Vec<usize> = (0..nold).collect();
    let mut antipode_images: Vec<Poly<Fp>> = (0..nold)
        .map(|i| m0.hopf.antipode.image(i).reindex(&old_to_new))
        .collect();
    antipode_images.push(Poly::monomial(p, alg.deepest(tower)).neg());

    let hopf = HopfData::new(alg.clone(), comult_images, antipode_images)?;
    let base = base_line(params)?;
    let aug = AlgebraMap::new(base.clone(), alg, vec![Poly::monomial(p, hopf.alg.deepest(tower))])?;
    AugmentedModule { label: label.into(), params: *params, hopf, base, aug, twist: 0 }.validate()
}

/// Frobenius pushforward: same Hopf presentation with every degree divided
/// by p, augmentation recomposed with the root-tower shift of the base.
/// The degree bound divides along with the grading, so no truncation state
/// changes; callers wanting the pushforward at bound D construct the input
/// at bound p*D.
pub fn frob_pushforward(label: &str, m: &AugmentedModule) -> Result<AugmentedModule> {
    if m.twist >= 2 {
        return Err(Error::PrecisionExceeded(
            "more than two Frobenius pushforwards exceed the degree lattice cap".into(),
        ));
    }
    let p = m.params.p;
    let old = &m.hopf.alg;
    let vars: Vec<Variable> = old
        .vars()
        .iter()
        .map(|v| Variable { degree: v.degree.div_int(p as i64), ..v.clone() })
        .collect();
    let new_bound = old.degree_bound().div_int(p as i64);
    let alg = Algebra::new(p, old.depth(), new_bound, vars, old.rewrites().clone())?;
    // the regraded tensor square has the same variable positions, so the
    // structure polynomials carry over verbatim
    let n = old.vars().len();
    let comult_images = (0..n).map(|v| m.hopf.comult.image(v).clone()).collect();
    let antipode_images = (0..n).map(|v| m.hopf.antipode.image(v).clone()).collect();
    let hopf = HopfData::new(alg.clone(), comult_images, antipode_images)?;

    // new augmentation: the old one after x^(1/p^i) -> x^(1/p^(i-1))
    let shifted = alg.pow_nf(m.aug.image(0), p as u64)?;
    if shifted.truncated {
        return Err(Error::PrecisionExceeded("augmentation shift truncated".into()));
    }
    let params = Params { bound: new_bound, ..m.params };
    let base = base_line(&params)?;
    let aug = AlgebraMap::new(base.clone(), alg, vec![shifted.poly])?;
    AugmentedModule {
        label: label.into(),
        params,
        hopf,
        base,
        aug,
        twist: m.twist + 1,
    }
    .validate()
}

/// The unique augmented-module map into the perfection kernel that the
/// augmentation factors through; defined exactly when the augmentation
/// kills the bottom coordinate.
pub fn factor_through_kernel(c: &AugmentedModule, m: &AugmentedModule) -> Result<AlgebraMap> {
    let images: Vec<Poly<Fp>> =
        (0..c.hopf.alg.vars().len()).map(|_| m.aug.image(0).clone()).collect();
    if images.len() != 1 {
        return Err(Error::UnsupportedPresentation(
            "factoring target must be a single tower".into(),
        ));
    }
    AlgebraMap::new(c.hopf.alg.clone(), m.hopf.alg.clone(), images)
}

/// Scheme-theoretic fiber product of augmented modules, presented by the
/// disjoint union of the two coordinate rings with the leg equations turned
/// into oriented rewrites. Tower-against-tower identifications extend level
/// by level to the full truncation depth.
pub fn fiber_product(
    label: &str,
    a: &AugmentedModule,
    b: &AugmentedModule,
    c: &AugmentedModule,
    fa: &AlgebraMap,
    fb: &AlgebraMap,
) -> Result<AugmentedModule> {
    let p = a.params.p;
    let depth = a.hopf.alg.depth();
    for (name, leg, m) in [("first", fa, a), ("second", fb, b)] {
        if leg.source.as_ref() != c.hopf.alg.as_ref() || leg.target.as_ref() != m.hopf.alg.as_ref()
        {
            return Err(Error::Usage(format!("{} leg has wrong endpoints", name)));
        }
        // leg is a map of augmented modules: leg* . aug_c* = aug_m*
        let via = leg.apply(c.aug.image(0))?;
        let diff = m.hopf.alg.nf(&via.poly.sub(m.aug.image(0)))?;
        if !diff.poly.is_zero() {
            return Err(Error::Usage(format!("{} leg does not respect augmentations", name)));
        }
    }

    // disjoint union of presentations
    let na = a.hopf.alg.vars().len();
    let union0 = tensor(&a.hopf.alg, &b.hopf.alg)?;
    let a_in: Vec<usize> = union0.left.clone();
    let b_in: Vec<usize> = union0.right.clone();
    let vars = union0.alg.vars().to_vec();
    let mut rewrites = union0.alg.rewrites().clone();

    // leg equations, oriented by saturation
    let mut pending: Vec<(Poly<Fp>, Poly<Fp>)> = Vec::new();
    for g in 0..c.hopf.alg.vars().len() {
        pending.push((fa.image(g).reindex(&a_in), fb.image(g).reindex(&b_in)));
    }

    let mut fuel = 4 * vars.len() + 8;
    while let Some((u, v)) = pending.pop() {
        if fuel == 0 {
            return Err(Error::Internal("fiber product saturation does not settle".into()));
        }
        fuel -= 1;
        let alg = Algebra::new(p, depth, a.params.bound, vars.clone(), rewrites.clone())?;
        let u = alg.nf(&u)?.poly;
        let v = alg.nf(&v)?.poly;
        if u == v {
            continue;
        }
        let pick = |poly: &Poly<Fp>| -> Option<(usize, Rat, Fp)> {
            if poly.num_terms() != 1 {
                return None;
            }
            let (m, c) = poly.terms().next().unwrap();
            if m.exponents().len() != 1 {
                return None;
            }
            let (var, e) = m.exponents()[0];
            Some((var, e, *c))
        };
        // prefer eliminating a pure single-generator side
        let (gen, other) = match (pick(&u), pick(&v)) {
            (Some((gv, ge, gc)), Some((hv, he, hc))) => {
                // tower level vs tower level: eliminate the later variable
                if vars[gv].kind == crate::algebra::VarKind::PerfectTower
                    && vars[hv].kind == crate::algebra::VarKind::PerfectTower
                    && hv > gv
                {
                    ((hv, he), u.scale(&hc.inv()))
                } else {
                    ((gv, ge), v.scale(&gc.inv()))
                }
            }
            (Some((gv, ge, gc)), None) => ((gv, ge), v.scale(&gc.inv())),
            (None, Some((hv, he, hc))) => ((hv, he), u.scale(&hc.inv())),
            (None, None) => {
                return Err(Error::UnsupportedPresentation(format!(
                    "identification {} = {} has no single-generator side",
                    alg.poly_string(&u),
                    alg.poly_string(&v)
                )));
            }
        };
        let (gv, ge) = gen;
        let displaced = rewrites.remove(&gv);
        let new_rule = if vars[gv].kind == crate::algebra::VarKind::PerfectTower && ge < Rat::ONE {
            // level identification; extend to the deepest level when the
            // other side is a pure tower level, otherwise keep the lattice
            match pick(&other) {
                Some((ov, oe, oc))
                    if vars[ov].kind == crate::algebra::VarKind::PerfectTower
                        && oc == Fp::one(p) =>
                {
                    // gv^(ge) = ov^(oe): deepest level of gv maps to
                    // ov^(oe/ge / p^depth)
                    let unit = Rat::new(1, (p as i64).pow(depth));
                    let target_exp = oe.mul(&unit).mul(&Rat::new(ge.den(), ge.num()));
                    let level = exp_as_level(p, depth, target_exp).ok_or_else(|| {
                        Error::UnsupportedPresentation(
                            "tower identification at incompatible levels".into(),
                        )
                    })?;
                    Rewrite::Whole { target: ov, level }
                }
                _ => {
                    return Err(Error::UnsupportedPresentation(
                        "tower level identified with a non-tower expression".into(),
                    ))
                }
            }
        } else if ge == Rat::ONE {
            Rewrite::Bottom(other)
        } else {
            return Err(Error::UnsupportedPresentation(format!(
                "identification pins {}^{}, not a generator",
                vars[gv].name, ge
            )));
        };
        rewrites.insert(gv, new_rule);
        match displaced {
            None => {}
            Some(Rewrite::Bottom(old_rule)) => {
                // the displaced relation still has to hold; re-derive it
                pending.push((Poly::monomial(p, Monomial::var(gv, Rat::ONE)), old_rule));
            }
            Some(Rewrite::Whole { .. }) => {
                // eliminated generators never reappear in normal forms
                return Err(Error::Internal(
                    "saturation revisited an eliminated tower".into(),
                ));
            }
        }
    }

    let alg = Algebra::new(p, depth, a.params.bound, vars, rewrites)?;
    let square = tensor(&alg, &alg)?;
    let mut sq_map_a = vec![0usize; a.hopf.square.alg.vars().len()];
    for i in 0..na {
        sq_map_a[a.hopf.square.left[i]] = square.left[a_in[i]];
        sq_map_a[a.hopf.square.right[i]] = square.right[a_in[i]];
    }
    let nb = b.hopf.alg.vars().len();
    let mut sq_map_b = vec![0usize; b.hopf.square.alg.vars().len()];
    for i in 0..nb {
        sq_map_b[b.hopf.square.left[i]] = square.left[b_in[i]];
        sq_map_b[b.hopf.square.right[i]] = square.right[b_in[i]];
    }
    let mut comult_images = vec![Poly::zero(); alg.vars().len()];
    let mut antipode_images = vec![Poly::zero(); alg.vars().len()];
    for i in 0..na {
        comult_images[a_in[i]] = a.hopf.comult.image(i).reindex(&sq_map_a);
        antipode_images[a_in[i]] = a.hopf.antipode.image(i).reindex(&a_in);
    }
    for i in 0..nb {
        comult_images[b_in[i]] = b.hopf.comult.image(i).reindex(&sq_map_b);
        antipode_images[b_in[i]] = b.hopf.antipode.image(i).reindex(&b_in);
    }
    let hopf = HopfData::new(alg.clone(), comult_images, antipode_images)?;

    let base = a.base.clone();
    let aug_a = alg.nf(&a.aug.image(0).reindex(&a_in))?.poly;
    let aug_b = alg.nf(&b.aug.image(0).reindex(&b_in))?.poly;
    if alg.nf(&aug_a.sub(&aug_b))?.poly != Poly::zero() {
        return Err(Error::Internal("fiber product legs induce different augmentations".into()));
    }
    let aug = AlgebraMap::new(base.clone(), alg, vec![aug_a])?;
    AugmentedModule {
        label: label.into(),
        params: a.params,
        hopf,
        base,
        aug,
        twist: a.twist,
    }
    .validate()
}

/// Interpret an exponent `1/p^level` if it is one.
fn exp_as_level(p: u32, depth: u32, e: Rat) -> Option<u32> {
    for level in 0..=depth {
        if e == Rat::new(1, (p as i64).pow(level)) {
            return Some(level);
        }
    }
    None
}

/// Quasi-ideal verdict with the first violating generator as certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiIdealCheck {
    pub holds: bool,
    pub certificate: Option<String>,
}

/// The two point-level products `scale-by-d(y) applied to x` and
/// `scale-by-d(x) applied to y` agree iff for each generator `g` the tensors
/// `d*(coord^deg g) (x) g` and `g (x) d*(coord^deg g)` coincide. The scaling
/// coaction is diagonal by degree for every catalog presentation, so the
/// check substitutes augmentation images for the scaling coordinate in both
/// slot orders and compares.
pub fn is_quasi_ideal(m: &AugmentedModule) -> Result<QuasiIdealCheck> {
    let alg = &m.hopf.alg;
    let sq = &m.hopf.square;
    let p = m.params.p;
    for v in 0..alg.vars().len() {
        let mut incarnations: Vec<Monomial> = Vec::new();
        match alg.vars()[v].kind {
            crate::algebra::VarKind::PerfectTower => {
                for lvl in 0..=alg.depth() {
                    incarnations.push(alg.tower_level(v, lvl));
                }
            }
            _ => incarnations.push(Monomial::var(v, Rat::ONE)),
        }
        for inc in incarnations {
            let kappa = alg.monomial_degree(&inc);
            // substitute the scaling coordinate at exponent kappa by the
            // augmentation, when the base can express it
            let Some(k) = kappa.scaled_int(p as i64, m.base.depth()) else {
                continue;
            };
            if k < 0 {
                continue;
            }
            let scaled = m.hopf.alg.pow_nf(m.aug.image(0), k as u64)?;
            if scaled.truncated {
                continue;
            }
            let a_poly = scaled.poly;
            let g_poly = Poly::monomial(p, inc.clone());
            let lhs = sq
                .alg
                .nf(&a_poly.reindex(&sq.left).mul(&g_poly.reindex(&sq.right)))?;
            let rhs = sq
                .alg
                .nf(&g_poly.reindex(&sq.left).mul(&a_poly.reindex(&sq.right)))?;
            if lhs.poly != rhs.poly && !(lhs.truncated || rhs.truncated) {
                return Ok(QuasiIdealCheck {
                    holds: false,
                    certificate: Some(alg.monomial_string(&inc)),
                });
            }
        }
    }
    Ok(QuasiIdealCheck { holds: true, certificate: None })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NilpotencyCheck {
    pub nilpotent: bool,
    /// Least exponent with `d*(x)^k = 0`, when nilpotent.
    pub exponent: Option<u32>,
}

/// Nilpotency of the augmentation of the bottom coordinate, decided by two
/// independent routes that must agree: explicit powering within the search
/// bound, and the structural criterion that every monomial carries a
/// coordinate which some relation eventually kills.
pub fn is_nilpotent_quasi_ideal(m: &AugmentedModule) -> Result<NilpotencyCheck> {
    let qi = is_quasi_ideal(m)?;
    if !qi.holds {
        return Err(Error::Usage(format!(
            "nilpotency asked for a non-quasi-ideal (violating generator {})",
            qi.certificate.unwrap_or_default()
        )));
    }
    let alg = &m.hopf.alg;
    let d_of_x = alg.nf(&m.aug_of_bottom()?)?.poly;

    // route 1: explicit powers up to p * n
    let bound = m.params.p * m.params.n;
    let mut exponent = None;
    let mut acc = Poly::constant(m.params.p, 1);
    let mut truncated = false;
    for k in 1..=bound {
        let r = alg.mul_nf(&acc, &d_of_x)?;
        truncated |= r.truncated;
        acc = r.poly;
        if acc.is_zero() && !truncated {
            exponent = Some(k);
            break;
        }
        if acc.is_zero() {
            break; // zero only after truncation: inconclusive
        }
    }

    // route 2: structural
    let structural = d_of_x.terms().all(|(mono, _)| {
        mono.exponents().iter().any(|(v, e)| match alg.vars()[*v].kind {
            crate::algebra::VarKind::NilpotentOrderP => true,
            crate::algebra::VarKind::PerfectTower => {
                // positive powers of a bottom-rewritten tower eventually walk
                // into the rewrite, which in catalog presentations is zero or
                // nilpotent
                *e > Rat::ZERO && alg.rewrites().contains_key(v)
            }
            crate::algebra::VarKind::Plain => alg.rewrites().contains_key(v),
        })
    });

    let route1 = exponent.is_some();
    if route1 != structural {
        return Err(Error::Internal(format!(
            "nilpotency routes disagree for {}: powering says {}, structure says {}",
            m.label, route1, structural
        )));
    }
    Ok(NilpotencyCheck { nilpotent: route1, exponent })
}

/// Solve for the one-parameter scaling family of the twisted module: the
/// degree-preserving endomorphism over the Laurent ring fixing the tower,
/// sending the degree-one coordinate to `b` times itself, and commuting
/// with the comultiplication. Images of the higher coordinates are derived
/// by the solver, not assumed.
pub fn scaling_family(m: &AugmentedModule) -> Result<AlgebraMap<WeightScalar>> {
    let p = m.params.p;
    let alg = m.hopf.alg.clone();
    let sq = &m.hopf.square;
    let witt = m.witt_vars();
    if witt.is_empty() {
        return Err(Error::Usage("scaling family needs nilpotent coordinates".into()));
    }
    let mut images: Vec<Option<Poly<WeightScalar>>> = (0..alg.vars().len())
        .map(|v| match alg.vars()[v].kind {
            crate::algebra::VarKind::PerfectTower => {
                Some(Poly::monomial(p, alg.deepest(v)).lift_ws())
            }
            _ => None,
        })
        .collect();
    // the lowest coordinate scales by b itself
    let x0 = witt[0];
    if alg.vars()[x0].degree != Rat::ONE {
        return Err(Error::Usage("lowest nilpotent coordinate must sit in degree 1".into()));
    }
    images[x0] = Some(
        Poly::term(Monomial::var(x0, Rat::ONE), WeightScalar::monomial(p, 1, 1)),
    );

    let comult_ws = m.hopf.comult.lift_ws();
    for &xi in witt.iter().skip(1) {
        // known part: (sigma tensor sigma) of the reduced comultiplication
        let prim_l = Poly::<Fp>::monomial(p, alg.deepest(xi).reindex(&sq.left));
        let prim_r = Poly::<Fp>::monomial(p, alg.deepest(xi).reindex(&sq.right));
        let cross = m.hopf.comult.image(xi).sub(&prim_l).sub(&prim_r);
        let mut rhs: Poly<WeightScalar> = Poly::zero();
        for (mono, c) in cross.terms() {
            // apply the partial family to both tensor slots
            let mut term: Poly<WeightScalar> = Poly::constant(p, 1);
            for (sqv, e) in mono.exponents() {
                let (side, orig) = side_of(sq, *sqv);
                let img = images[orig].as_ref().ok_or_else(|| {
                    Error::Internal("comultiplication is not triangular".into())
                })?;
                let embedded = img.reindex(if side == 0 { &sq.left } else { &sq.right });
                let k = exponent_steps(&alg, orig, *e);
                let powered = sq.alg.pow_nf(&embedded, k)?.poly;
                term = sq.alg.mul_nf(&term, &powered)?.poly;
            }
            rhs = rhs.add(&term.scale(&WeightScalar::from_fp(*c)));
        }
        let rhs = sq.alg.nf(&rhs)?.poly;

        // unknowns: coefficients over the graded piece at deg x_i
        let piece = alg.graded_piece(alg.vars()[xi].degree)?;
        let mut columns: Vec<Poly<Fp>> = Vec::new();
        for mono in &piece {
            let d = comult_ws.source.nf(&Poly::<Fp>::monomial(p, mono.clone()))?.poly;
            let full = m.hopf.comult.apply(&d)?.poly;
            let l = d.reindex(&sq.left);
            let r = d.reindex(&sq.right);
            let reduced = sq.alg.nf(&full.sub(&l).sub(&r))?.poly;
            columns.push(reduced);
        }
        let solution = solve_ws_linear(&sq.alg, &columns, &rhs)?;
        let mut img: Poly<WeightScalar> = Poly::zero();
        for (mono, c) in piece.iter().zip(solution) {
            img = img.add(&Poly::term(mono.clone(), c));
        }
        images[xi] = Some(img);
    }
    let images: Vec<Poly<WeightScalar>> = images
        .into_iter()
        .map(|i| i.ok_or_else(|| Error::Internal("unresolved generator image".into())))
        .collect::<Result<_>>()?;
    let sigma = AlgebraMap::with_scale(alg.clone(), alg.clone(), images, Rat::ONE)?;
    // commutation with the comultiplication, now on every generator
    let ss = tensor_map_ws(sq, sq, &sigma, &sigma)?;
    let lhs = ss.compose(&comult_ws)?;
    let rhs = comult_ws.compose(&sigma)?;
    if !lhs.equal_on_generators(&rhs)? {
        return Err(Error::Internal("scaling family fails comultiplication compatibility".into()));
    }
    Ok(sigma)
}

fn side_of(sq: &crate::algebra::TensorPair, sqv: usize) -> (u8, usize) {
    if let Some(i) = sq.left.iter().position(|x| *x == sqv) {
        (0, i)
    } else {
        (1, sq.right.iter().position(|x| *x == sqv).unwrap())
    }
}

fn exponent_steps(alg: &Algebra, v: usize, e: Rat) -> u64 {
    match alg.vars()[v].kind {
        crate::algebra::VarKind::PerfectTower => {
            e.scaled_int(alg.prime() as i64, alg.depth()).unwrap() as u64
        }
        _ => e.as_integer().unwrap() as u64,
    }
}

/// Solve `sum_j c_j columns_j = rhs` for Laurent-scalar unknowns; the
/// columns have prime-field coefficients. Unique solution required.
fn solve_ws_linear(
    alg: &Algebra,
    columns: &[Poly<Fp>],
    rhs: &Poly<WeightScalar>,
) -> Result<Vec<WeightScalar>> {
    let p = alg.prime();
    let mut rows: BTreeMap<Monomial, (Vec<Fp>, WeightScalar)> = BTreeMap::new();
    let touch = |rows: &mut BTreeMap<Monomial, (Vec<Fp>, WeightScalar)>, m: &Monomial| {
        rows.entry(m.clone())
            .or_insert_with(|| (vec![Fp::zero(p); columns.len()], WeightScalar::zero(p)));
    };
    for (j, col) in columns.iter().enumerate() {
        for (m, c) in col.terms() {
            touch(&mut rows, m);
            rows.get_mut(m).unwrap().0[j] = *c;
        }
    }
    for (m, c) in rhs.terms() {
        touch(&mut rows, m);
        rows.get_mut(m).unwrap().1 = c.clone();
    }
    let mut system: Vec<(Vec<Fp>, WeightScalar)> = rows.into_values().collect();
    let ncols = columns.len();
    let mut solution = vec![WeightScalar::zero(p); ncols];
    let mut pivot_rows: Vec<Option<usize>> = vec![None; ncols];
    let mut used = vec![false; system.len()];
    for j in 0..ncols {
        let Some(r) = (0..system.len()).find(|r| !used[*r] & !system[*r].0[j].is_zero()) else {
            return Err(Error::Internal(
                "scaling family underdetermined at this truncation".into(),
            ));
        };
        used[r] = true;
        pivot_rows[j] = Some(r);
        let inv = system[r].0[j].inv();
        for v in system[r].0.iter_mut() {
            *v = v.mul(&inv);
        }
        system[r].1 = system[r].1.scale(inv);
        let pivot = system[r].clone();
        for (rr, row) in system.iter_mut().enumerate() {
            if rr == r || row.0[j].is_zero() {
                continue;
            }
            let f = row.0[j];
            for (v, pv) in row.0.iter_mut().zip(&pivot.0) {
                *v = v.sub(&f.mul(pv));
            }
            row.1 = row.1.sub(&pivot.1.scale(f));
        }
    }
    for (rr, row) in system.iter().enumerate() {
        if !used[rr] && row.0.iter().all(|v| v.is_zero()) && !row.1.is_zero() {
            return Err(Error::Internal("scaling family constraints are inconsistent".into()));
        }
    }
    for j in 0..ncols {
        solution[j] = system[pivot_rows[j].unwrap()].1.clone();
    }
    Ok(solution)
}

/// Laurent-coefficient tensor of two endomorphism families.
fn tensor_map_ws(
    src: &crate::algebra::TensorPair,
    dst: &crate::algebra::TensorPair,
    f: &AlgebraMap<WeightScalar>,
    g: &AlgebraMap<WeightScalar>,
) -> Result<AlgebraMap<WeightScalar>> {
    let nsrc = src.alg.vars().len();
    let mut images: Vec<Poly<WeightScalar>> = vec![Poly::zero(); nsrc];
    for (a_var, src_var) in src.left.iter().enumerate() {
        images[*src_var] = f.image(a_var).reindex(&dst.left);
    }
    for (b_var, src_var) in src.right.iter().enumerate() {
        images[*src_var] = g.image(b_var).reindex(&dst.right);
    }
    AlgebraMap::with_scale(src.alg.clone(), dst.alg.clone(), images, Rat::ONE)
}

/// Specialize a Laurent-coefficient endomorphism at a field point.
pub fn specialize(map: &AlgebraMap<WeightScalar>, b: Fp) -> Result<AlgebraMap<Fp>> {
    let images = (0..map.source.vars().len())
        .map(|v| map.image(v).map_coeffs(|c| c.eval_at(b)))
        .collect();
    AlgebraMap::with_scale(map.source.clone(), map.target.clone(), images, map.scale())
}

/// Symbolic module descriptions accepted by the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModuleSpec {
    AlphaFlat,
    AlphaPPullback,
    UWF,
    UWFOverP,
    Twisted,
    Identity,
    FrobPush(Box<ModuleSpec>),
    Fiber(Box<ModuleSpec>, Box<ModuleSpec>, Box<ModuleSpec>),
}

impl ModuleSpec {
    pub fn parse(s: &str) -> Result<ModuleSpec> {
        let s = s.trim();
        if let Some(inner) = s.strip_suffix("^(1/p)") {
            return Ok(ModuleSpec::FrobPush(Box::new(ModuleSpec::parse(inner)?)));
        }
        match s {
            "alpha_flat" => Ok(ModuleSpec::AlphaFlat),
            "alpha_p_pullback" => Ok(ModuleSpec::AlphaPPullback),
            "uWF" => Ok(ModuleSpec::UWF),
            "uWF_over_p" => Ok(ModuleSpec::UWFOverP),
            "twisted" => Ok(ModuleSpec::Twisted),
            "identity" => Ok(ModuleSpec::Identity),
            _ => {
                if let Some(rest) = s.strip_prefix("fiber(") {
                    let rest = rest.strip_suffix(')').ok_or_else(|| {
                        Error::Usage(format!("unbalanced parentheses in {}", s))
                    })?;
                    let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
                    if parts.len() != 3 {
                        return Err(Error::Usage(
                            "fiber takes fiber(A, B, over C)".into(),
                        ));
                    }
                    let c = parts[2].strip_prefix("over ").unwrap_or(parts[2]);
                    Ok(ModuleSpec::Fiber(
                        Box::new(ModuleSpec::parse(parts[0])?),
                        Box::new(ModuleSpec::parse(parts[1])?),
                        Box::new(ModuleSpec::parse(c)?),
                    ))
                } else {
                    Err(Error::Usage(format!("unknown module spec {}", s)))
                }
            }
        }
    }

    pub fn canonical(&self) -> String {
        match self {
            ModuleSpec::AlphaFlat => "alpha_flat".into(),
            ModuleSpec::AlphaPPullback => "alpha_p_pullback".into(),
            ModuleSpec::UWF => "uWF".into(),
            ModuleSpec::UWFOverP => "uWF_over_p".into(),
            ModuleSpec::Twisted => "twisted".into(),
            ModuleSpec::Identity => "identity".into(),
            ModuleSpec::FrobPush(inner) => format!("{}^(1/p)", inner.canonical()),
            ModuleSpec::Fiber(a, b, c) => format!(
                "fiber({}, {}, over {})",
                a.canonical(),
                b.canonical(),
                c.canonical()
            ),
        }
    }
}

/// Elaborate a catalog entry at the given truncation.
pub fn build_module(spec: &ModuleSpec, params: &Params) -> Result<AugmentedModule> {
    match spec {
        ModuleSpec::AlphaFlat => {
            let hopf = perfect_kernel_hopf(params.p, params.depth, params.bound)?;
            let base = base_line(params)?;
            let img = Poly::monomial(params.p, hopf.alg.deepest(0));
            let aug = AlgebraMap::new(base.clone(), hopf.alg.clone(), vec![img])?;
            AugmentedModule {
                label: "alpha_flat".into(),
                params: *params,
                hopf,
                base,
                aug,
                twist: 0,
            }
            .validate()
        }
        ModuleSpec::Identity => {
            let hopf = perfect_line_hopf(params.p, params.depth, params.bound)?;
            let base = base_line(params)?;
            let img = Poly::monomial(params.p, hopf.alg.deepest(0));
            let aug = AlgebraMap::new(base.clone(), hopf.alg.clone(), vec![img])?;
            AugmentedModule {
                label: "identity".into(),
                params: *params,
                hopf,
                base,
                aug,
                twist: 0,
            }
            .validate()
        }
        ModuleSpec::AlphaPPullback => {
            pullback_u("alpha_p_pullback", &ga_additive_p_kernel(params)?, params)
        }
        ModuleSpec::UWF => pullback_u("uWF", &ga_witt_kernel(params)?, params),
        ModuleSpec::UWFOverP => {
            let wide = Params { bound: params.bound.mul_int(params.p as i64), ..*params };
            let u = pullback_u("uWF", &ga_witt_kernel(&wide)?, &wide)?;
            frob_pushforward("uWF_over_p", &u)
        }
        ModuleSpec::Twisted => {
            let wide = Params { bound: params.bound.mul_int(params.p as i64), ..*params };
            let u = pullback_u("uWF_twisted", &ga_witt_kernel_twisted(&wide)?, &wide)?;
            frob_pushforward("twisted", &u)
        }
        ModuleSpec::FrobPush(inner) => {
            let wide = Params { bound: params.bound.mul_int(params.p as i64), ..*params };
            let m = build_module(inner, &wide)?;
            frob_pushforward(&format!("{}^(1/p)", m.label), &m)
        }
        ModuleSpec::Fiber(a, b, c) => {
            // legs carry one more Witt coordinate so that the fiber matches
            // the catalog modules degree-for-degree below the bound
            let leg_params = Params { n: params.n + 1, ..*params };
            Params::new(leg_params.p, leg_params.n, leg_params.depth, leg_params.bound).map_err(
                |_| {
                    Error::Usage(format!(
                        "fiber legs carry witt length n+1 = {}, beyond the envelope; use witt <= 3",
                        leg_params.n
                    ))
                },
            )?;
            let ma = build_module(a, &leg_params)?;
            let mb = build_module(b, &leg_params)?;
            let mc = build_module(c, params)?;
            let fa = factor_through_kernel(&mc, &ma)?;
            let fb = factor_through_kernel(&mc, &mb)?;
            fiber_product(
                &format!("fiber({}, {}, over {})", ma.label, mb.label, mc.label),
                &ma,
                &mb,
                &mc,
                &fa,
                &fb,
            )
        }
    }
}

/// Outcome of identifying the canonical fiber product with the twisted
/// module: per-degree dimension tables plus an explicit generator-matching
/// map checked to be an isomorphism of the full structure.
#[derive(Debug, Clone)]
pub struct FiberIdentification {
    pub fiber: AugmentedModule,
    pub twisted: AugmentedModule,
    /// (degree, fiber dim, twisted dim) over the common degree lattice
    pub dims: Vec<(Rat, usize, usize)>,
    pub dims_equal: bool,
    pub hopf_compatible: bool,
    pub antipode_compatible: bool,
    pub augmentation_compatible: bool,
    pub basis_bijection: bool,
}

impl FiberIdentification {
    pub fn certified(&self) -> bool {
        self.dims_equal
            && self.hopf_compatible
            && self.antipode_compatible
            && self.augmentation_compatible
            && self.basis_bijection
    }
}

/// Build the fiber of the pushed-forward Witt pullback against the
/// pushed-forward perfection kernel over the kernel itself, and match it
/// generator-for-generator with the twisted module. The matching sends the
/// surviving tower to the tower and shifts the coordinates down by one;
/// the legs carry one extra Witt coordinate so that the match is exact
/// degree-for-degree below the bound.
pub fn twisted_fiber_identification(params: &Params) -> Result<FiberIdentification> {
    let spec = ModuleSpec::Fiber(
        Box::new(ModuleSpec::UWFOverP),
        Box::new(ModuleSpec::FrobPush(Box::new(ModuleSpec::AlphaFlat))),
        Box::new(ModuleSpec::AlphaFlat),
    );
    let fiber = build_module(&spec, params)?;
    let twisted = build_module(&ModuleSpec::Twisted, params)?;

    // dimension tables over the lattice of both modules' degree denominators
    let p = params.p as i64;
    let den = p.pow(params.depth + 1);
    let steps = params.bound.mul_int(den).as_integer().unwrap_or(0);
    let mut dims = Vec::new();
    let mut dims_equal = true;
    for k in 0..=steps {
        let d = Rat::new(k, den);
        let df = fiber.hopf.alg.graded_piece(d)?.len();
        let dt = twisted.hopf.alg.graded_piece(d)?.len();
        if df != dt {
            dims_equal = false;
        }
        if df > 0 || dt > 0 {
            dims.push((d, df, dt));
        }
    }

    // the generator matching: tower -> tower, coordinate i -> coordinate i+1
    let falg = &fiber.hopf.alg;
    let talg = &twisted.hopf.alg;
    let t_tower = talg
        .var_index("x")
        .ok_or_else(|| Error::Internal("twisted module lost its tower".into()))?;
    let f_tower = falg
        .var_index("x")
        .ok_or_else(|| Error::Internal("fiber lost the surviving tower".into()))?;
    let mut images: Vec<Poly<Fp>> = vec![Poly::zero(); talg.vars().len()];
    images[t_tower] = Poly::monomial(params.p, falg.deepest(f_tower));
    for i in 0..params.n {
        let src = talg
            .var_index(&format!("x{}", i))
            .ok_or_else(|| Error::Internal("missing twisted coordinate".into()))?;
        let dst = falg
            .var_index(&format!("x{}", i + 1))
            .ok_or_else(|| Error::Internal("missing fiber coordinate".into()))?;
        images[src] = Poly::monomial(params.p, Monomial::var(dst, Rat::ONE));
    }
    let psi = AlgebraMap::new(talg.clone(), falg.clone(), images)?;

    // Hopf compatibility: (psi tensor psi) . comult = comult . psi
    let pp = crate::maps::tensor_map(&twisted.hopf.square, &fiber.hopf.square, &psi, &psi)?;
    let lhs = pp.compose(&twisted.hopf.comult)?;
    let rhs = fiber.hopf.comult.compose(&psi)?;
    let hopf_compatible = lhs.equal_on_generators(&rhs)?;

    let anti_lhs = psi.compose(&twisted.hopf.antipode)?;
    let anti_rhs = fiber.hopf.antipode.compose(&psi)?;
    let antipode_compatible = anti_lhs.equal_on_generators(&anti_rhs)?;

    let aug_lhs = psi.compose(&twisted.aug)?;
    let augmentation_compatible = aug_lhs.equal_on_generators(&fiber.aug)?;

    // bijection on monomial bases, degree by degree
    let mut basis_bijection = true;
    'outer: for k in 0..=steps {
        let d = Rat::new(k, den);
        let src = talg.graded_piece(d)?;
        let dst = falg.graded_piece(d)?;
        let mut seen = std::collections::BTreeSet::new();
        for mono in &src {
            let img = psi.apply(&Poly::monomial(params.p, mono.clone()))?;
            if img.poly.num_terms() != 1 {
                basis_bijection = false;
                break 'outer;
            }
            let (im, c) = img.poly.terms().next().unwrap();
            if *c != Fp::one(params.p) || !dst.contains(im) || !seen.insert(im.clone()) {
                basis_bijection = false;
                break 'outer;
            }
        }
        if seen.len() != dst.len() {
            basis_bijection = false;
            break;
        }
    }

    Ok(FiberIdentification {
        fiber,
        twisted,
        dims,
        dims_equal,
        hopf_compatible,
        antipode_compatible,
        augmentation_compatible,
        basis_bijection,
    })
}

/// α^♭ with its augmentation deliberately knocked off the grading: sends the
/// bottom to zero but a deeper level across two levels. Used to exercise the
/// quasi-ideal certificate; not a catalog entry.
pub fn skewed_kernel_example(params: &Params) -> Result<AugmentedModule> {
    if params.depth < 2 {
        return Err(Error::Usage("skewed example needs depth >= 2".into()));
    }
    let hopf = perfect_kernel_hopf(params.p, params.depth, params.bound)?;
    let base = base_line(params)?;
    // deepest base level -> tower level depth-1: degree-shifted on purpose
    let img = Poly::monomial(params.p, hopf.alg.tower_level(0, params.depth - 1));
    let aug = AlgebraMap::unchecked(base.clone(), hopf.alg.clone(), vec![img]);
    Ok(AugmentedModule {
        label: "alpha_flat_skewed".into(),
        params: *params,
        hopf,
        base,
        aug,
        twist: 0,
    })
}
