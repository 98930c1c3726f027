use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{tensor, unit_algebra, Algebra, Monomial, Poly, Rewrite, TensorPair, Variable};
use crate::error::{Error, Result};
use crate::maps::{mult_map, swap_map, tensor_map, AlgebraMap};
use crate::rat::Rat;
use crate::scalars::Fp;
use crate::witt::WittPolys;

/// A graded bicommutative Hopf algebra presented by a quotient algebra plus
/// comultiplication, counit and antipode recorded on generators.
#[derive(Debug, Clone)]
pub struct HopfData {
    pub alg: Arc<Algebra>,
    pub square: TensorPair,
    pub comult: AlgebraMap,
    pub counit: AlgebraMap,
    pub antipode: AlgebraMap,
}

impl HopfData {
    pub fn new(
        alg: Arc<Algebra>,
        comult_images: Vec<Poly<Fp>>,
        antipode_images: Vec<Poly<Fp>>,
    ) -> Result<HopfData> {
        let square = tensor(&alg, &alg)?;
        let comult = AlgebraMap::new(alg.clone(), square.alg.clone(), comult_images)?;
        let unit = unit_algebra(alg.prime(), alg.depth(), alg.degree_bound());
        let counit_images = vec![Poly::zero(); alg.vars().len()];
        let counit = AlgebraMap::new(alg.clone(), unit, counit_images)?;
        let antipode = AlgebraMap::new(alg.clone(), alg.clone(), antipode_images)?;
        let hopf = HopfData { alg, square, comult, counit, antipode };
        hopf.check_axioms()?;
        Ok(hopf)
    }

    /// Generators whose deepest incarnation is visible below the degree
    /// bound; axiom statements are only made about those.
    fn checkable_generators(&self) -> Vec<usize> {
        (0..self.alg.vars().len())
            .filter(|v| {
                self.alg.monomial_degree(&self.alg.deepest(*v)) <= self.alg.degree_bound()
                    && self.alg.vars()[*v].degree <= self.alg.degree_bound()
            })
            .collect()
    }

    /// Coassociativity, counit law, cocommutativity and the antipode law,
    /// verified on generators. Failures are internal errors by contract.
    pub fn check_axioms(&self) -> Result<()> {
        let alg = &self.alg;
        let id = AlgebraMap::identity(alg.clone())?;
        let gens = self.checkable_generators();

        // coassociativity
        let cube_l = tensor(&self.square.alg, alg)?;
        let cube_r = tensor(alg, &self.square.alg)?;
        if cube_l.alg.as_ref() != cube_r.alg.as_ref() {
            return Err(Error::Internal("tensor cube presentations disagree".into()));
        }
        let dl = tensor_map(&self.square, &cube_l, &self.comult, &id)?.compose(&self.comult)?;
        let dr = tensor_map(&self.square, &cube_r, &id, &self.comult)?.compose(&self.comult)?;
        for v in &gens {
            let diff = cube_l.alg.nf(&dl.image(*v).sub(dr.image(*v)))?;
            if !diff.poly.is_zero() {
                return Err(Error::Internal(format!(
                    "coassociativity fails on {}",
                    alg.vars()[*v].name
                )));
            }
        }

        // counit law: (eps tensor id) . comult = id
        let mut eps_left_images = vec![Poly::zero(); self.square.alg.vars().len()];
        for (a_var, sq_var) in self.square.left.iter().enumerate() {
            // counit images are constants of the unit algebra
            eps_left_images[*sq_var] = self.counit.image(a_var).clone();
        }
        for (a_var, sq_var) in self.square.right.iter().enumerate() {
            eps_left_images[*sq_var] = Poly::monomial(alg.prime(), alg.deepest(a_var));
        }
        let eps_left = AlgebraMap::new(self.square.alg.clone(), alg.clone(), eps_left_images)?;
        let counit_side = eps_left.compose(&self.comult)?;
        for v in &gens {
            let diff = alg.nf(&counit_side.image(*v).sub(id.image(*v)))?;
            if !diff.poly.is_zero() {
                return Err(Error::Internal(format!(
                    "counit law fails on {}",
                    alg.vars()[*v].name
                )));
            }
        }

        // cocommutativity
        let swapped = swap_map(&self.square)?.compose(&self.comult)?;
        for v in &gens {
            let diff = self.square.alg.nf(&swapped.image(*v).sub(self.comult.image(*v)))?;
            if !diff.poly.is_zero() {
                return Err(Error::Internal(format!(
                    "cocommutativity fails on {}",
                    alg.vars()[*v].name
                )));
            }
        }

        // antipode law: mult . (antipode tensor id) . comult = unit . counit,
        // which on generators of positive degree means zero
        let s_side = tensor_map(&self.square, &self.square, &self.antipode, &id)?;
        let mu = mult_map(&self.square, alg.clone())?;
        let antipode_side = mu.compose(&s_side)?.compose(&self.comult)?;
        for v in &gens {
            if !antipode_side.image(*v).is_zero() {
                return Err(Error::Internal(format!(
                    "antipode law fails on {}",
                    alg.vars()[*v].name
                )));
            }
        }
        Ok(())
    }
}

/// Additive (primitive) comultiplication image for a generator.
fn primitive_image(alg: &Algebra, square: &TensorPair, v: usize) -> Poly<Fp> {
    let p = alg.prime();
    let l = Poly::monomial(p, alg.deepest(v).reindex(&square.left));
    let r = Poly::monomial(p, alg.deepest(v).reindex(&square.right));
    l.add(&r)
}

/// Builds Hopf data where every listed generator is primitive and the
/// antipode is negation.
pub fn additive_hopf(alg: Arc<Algebra>) -> Result<HopfData> {
    let square = tensor(&alg, &alg)?;
    let comult_images =
        (0..alg.vars().len()).map(|v| primitive_image(&alg, &square, v)).collect();
    let antipode_images = (0..alg.vars().len())
        .map(|v| Poly::monomial(alg.prime(), alg.deepest(v)).neg())
        .collect();
    HopfData::new(alg, comult_images, antipode_images)
}

/// Which grading the Witt coordinates carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WittGrading {
    /// `deg x_i = p^i`: the Frobenius-kernel coordinate ring itself.
    Standard,
    /// `deg x_i = p^(i+1)`: the same coordinates after restriction of
    /// scalars along Frobenius.
    Twisted,
}

/// `F_p[x_0..x_{n-1}]/(x_i^p)` with Witt-sum comultiplication: the
/// coordinate ring of the kernel of Frobenius on length-n Witt vectors.
pub fn witt_kernel_hopf(
    witt: &WittPolys,
    grading: WittGrading,
    depth: u32,
    bound: Rat,
) -> Result<HopfData> {
    let shift = match grading {
        WittGrading::Standard => 0,
        WittGrading::Twisted => 1,
    };
    witt_kernel_hopf_shifted(witt, shift, depth, bound)
}

/// Same coordinates with the grading scaled by `p^shift`: restriction of
/// scalars along iterated Frobenius.
pub fn witt_kernel_hopf_shifted(
    witt: &WittPolys,
    shift: u32,
    depth: u32,
    bound: Rat,
) -> Result<HopfData> {
    let p = witt.p;
    let n = witt.n as usize;
    let vars: Vec<Variable> = (0..n)
        .map(|i| {
            Variable::nilpotent(
                &format!("x{}", i),
                Rat::from_int((p as i64).pow(i as u32 + shift)),
                0,
            )
        })
        .collect();
    let alg = Algebra::new(p, depth, bound, vars, BTreeMap::new())?;
    let square = tensor(&alg, &alg)?;
    let left: Vec<Monomial> =
        (0..n).map(|i| Monomial::var(square.left[i], Rat::ONE)).collect();
    let right: Vec<Monomial> =
        (0..n).map(|i| Monomial::var(square.right[i], Rat::ONE)).collect();
    let selfm: Vec<Monomial> = (0..n).map(|i| Monomial::var(i, Rat::ONE)).collect();
    let comult_images = (0..n).map(|i| witt.sum_mod_p(i, &left, &right)).collect();
    let antipode_images = (0..n).map(|i| witt.negation_mod_p(i, &selfm)).collect();
    HopfData::new(alg, comult_images, antipode_images)
}

/// `F_p[x0]/(x0^p)` with additive comultiplication: the coordinate ring of
/// the kernel of Frobenius on the additive group.
pub fn additive_p_kernel_hopf(p: u32, depth: u32, bound: Rat) -> Result<HopfData> {
    let vars = vec![Variable::nilpotent("x0", Rat::ONE, 0)];
    let alg = Algebra::new(p, depth, bound, vars, BTreeMap::new())?;
    additive_hopf(alg)
}

/// `F_p[x^(1/p^inf)]/(x)` truncated at the given depth, with additive
/// comultiplication on every tower level: the kernel of the projection from
/// the perfected additive group.
pub fn perfect_kernel_hopf(p: u32, depth: u32, bound: Rat) -> Result<HopfData> {
    let vars = vec![Variable::tower("x", Rat::ONE)];
    let rewrites = [(0usize, Rewrite::Bottom(Poly::zero()))].into_iter().collect();
    let alg = Algebra::new(p, depth, bound, vars, rewrites)?;
    additive_hopf(alg)
}

/// The free truncated perfection `F_p[x^(1/p^inf)]`, additive.
pub fn perfect_line_hopf(p: u32, depth: u32, bound: Rat) -> Result<HopfData> {
    let vars = vec![Variable::tower("x", Rat::ONE)];
    let alg = Algebra::new(p, depth, bound, vars, BTreeMap::new())?;
    additive_hopf(alg)
}

/// The Verschiebung shift on coordinate rings, `x_0 -> 0`, `x_i -> x_{i-1}`,
/// from the length-n kernel to the twisted length-(n-1) kernel, plus both
/// exactness witnesses:
/// the composite with the inclusion of the length-1 kernel vanishes, and the
/// quotient of the source by the shifted coordinates is that length-1 kernel.
pub struct VerschiebungData {
    pub source: HopfData,
    pub target: HopfData,
    pub map: AlgebraMap,
}

pub fn verschiebung(witt: &WittPolys, depth: u32, bound: Rat) -> Result<VerschiebungData> {
    let n = witt.n as usize;
    if n < 2 {
        return Err(Error::Usage("verschiebung needs witt length >= 2".into()));
    }
    let p = witt.p;
    let source = witt_kernel_hopf(witt, WittGrading::Standard, depth, bound)?;
    let shorter = crate::witt::witt_polys(p, (n - 1) as u32)?;
    let target = witt_kernel_hopf(&shorter, WittGrading::Twisted, depth, bound)?;
    let mut images = vec![Poly::zero(); n];
    for i in 1..n {
        images[i] = Poly::monomial(p, Monomial::var(i - 1, Rat::ONE));
    }
    let map = AlgebraMap::new(source.alg.clone(), target.alg.clone(), images)?;

    // Hopf compatibility: (V* tensor V*) . comult = comult' . V*
    let vv = tensor_map(&source.square, &target.square, &map, &map)?;
    let lhs = vv.compose(&source.comult)?;
    let rhs = target.comult.compose(&map)?;
    if !lhs.equal_on_generators(&rhs)? {
        return Err(Error::Internal("verschiebung is not a Hopf map".into()));
    }
    Ok(VerschiebungData { source, target, map })
}

/// The two exactness witnesses for the shift: the composite with the
/// length-one kernel's inclusion vanishes on the augmentation ideal, and
/// dividing the source by the shifted coordinates leaves exactly the
/// length-one kernel, degree for degree.
#[derive(Debug, Clone)]
pub struct ExactnessWitness {
    pub composite_vanishes: bool,
    /// (degree, quotient dimension, length-one kernel dimension)
    pub quotient_dims: Vec<(Rat, usize, usize)>,
    pub quotient_matches: bool,
}

pub fn verschiebung_exactness(v: &VerschiebungData) -> Result<ExactnessWitness> {
    let p = v.source.alg.prime();
    let bound = v.source.alg.degree_bound();
    let depth = v.source.alg.depth();

    // inclusion of the length-one kernel as the first coordinate
    let alpha = additive_p_kernel_hopf(p, depth, bound)?;
    let incl = AlgebraMap::new(
        alpha.alg.clone(),
        v.source.alg.clone(),
        vec![Poly::monomial(p, Monomial::var(0, Rat::ONE))],
    )?;
    let composite = v.map.compose(&incl)?;
    let composite_vanishes = composite.image(0).is_zero();

    // quotient of the source by the shifted coordinates x_1, ..
    let n = v.source.alg.vars().len();
    let mut rewrites = v.source.alg.rewrites().clone();
    for i in 1..n {
        rewrites.insert(i, crate::algebra::Rewrite::Bottom(Poly::zero()));
    }
    let quotient = Algebra::new(p, depth, bound, v.source.alg.vars().to_vec(), rewrites)?;
    let steps = bound.mul_int((p as i64).pow(depth)).as_integer().unwrap_or(0);
    let mut quotient_dims = Vec::new();
    let mut quotient_matches = true;
    for k in 0..=steps {
        let d = Rat::new(k, (p as i64).pow(depth));
        let dq = quotient.graded_piece(d)?.len();
        let da = alpha.alg.graded_piece(d)?.len();
        if dq != da {
            quotient_matches = false;
        }
        if dq > 0 || da > 0 {
            quotient_dims.push((d, dq, da));
        }
    }
    Ok(ExactnessWitness { composite_vanishes, quotient_dims, quotient_matches })
}
