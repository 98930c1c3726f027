use std::sync::Arc;

use crate::algebra::{Algebra, Coeff, Homogeneity, Monomial, Poly, Reduced, Rewrite, TensorPair, VarKind};
use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::scalars::{Fp, WeightScalar};

/// A graded algebra map, recorded on the deepest incarnation of each
/// generator: `v^(1/p^depth)` for towers, `v` otherwise.
///
/// Storing only the deepest image makes tower compatibility
/// `image(v^(1/p^m)) = image(v^(1/p^(m+1)))^p` hold by construction; the
/// relation and grading checks below are what remains of well-definedness.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraMap<C: Coeff = Fp> {
    pub source: Arc<Algebra>,
    pub target: Arc<Algebra>,
    images: Vec<Poly<C>>,
    /// Degrees multiply by this factor (1 for graded maps, p for Frobenius).
    scale: Rat,
}

impl<C: Coeff> AlgebraMap<C> {
    pub fn new(
        source: Arc<Algebra>,
        target: Arc<Algebra>,
        images: Vec<Poly<C>>,
    ) -> Result<AlgebraMap<C>> {
        AlgebraMap::with_scale(source, target, images, Rat::ONE)
    }

    pub fn with_scale(
        source: Arc<Algebra>,
        target: Arc<Algebra>,
        images: Vec<Poly<C>>,
        scale: Rat,
    ) -> Result<AlgebraMap<C>> {
        if images.len() != source.vars().len() {
            return Err(Error::Usage("one image per source generator required".into()));
        }
        if source.prime() != target.prime() {
            return Err(Error::Usage("source and target characteristic differ".into()));
        }
        let mut images_nf = Vec::with_capacity(images.len());
        for img in &images {
            images_nf.push(target.nf(img)?.poly);
        }
        let map = AlgebraMap { source, target, images: images_nf, scale };
        map.check()?;
        Ok(map)
    }

    fn check(&self) -> Result<()> {
        let p = self.source.prime() as u64;
        for (v, var) in self.source.vars().iter().enumerate() {
            let img = &self.images[v];
            // grading
            let expected = self.scale.mul(&self.source.monomial_degree(&self.source.deepest(v)));
            match self.target.homogeneity(img) {
                Homogeneity::Zero => {}
                Homogeneity::Degree(d) if d == expected => {}
                Homogeneity::Degree(d) => {
                    return Err(Error::MapNotWellDefined(format!(
                        "image of {} has degree {}, expected {}",
                        var.name, d, expected
                    )));
                }
                Homogeneity::Mixed => {
                    return Err(Error::MapNotWellDefined(format!(
                        "image of {} is not homogeneous",
                        var.name
                    )));
                }
            }
            // relations on the generator itself
            match (var.kind, self.source.rewrites().get(&v)) {
                (VarKind::NilpotentOrderP, None) => {
                    let img_p = self.target.pow_nf(img, p)?;
                    if !img_p.poly.is_zero() && !img_p.truncated {
                        return Err(Error::MapNotWellDefined(format!(
                            "image of {} is not p-nilpotent",
                            var.name
                        )));
                    }
                }
                (_, Some(Rewrite::Bottom(rule))) => {
                    // image of v-bottom must equal image of the rule
                    let bottom = self.image_of_monomial(&Monomial::var(v, Rat::ONE))?;
                    let rule_c: Poly<C> = rule.map_coeffs(|x| C::c_from_fp(*x));
                    let rule_img = self.apply_raw(&rule_c)?;
                    let diff = self.target.nf(&bottom.poly.sub(&rule_img.poly))?;
                    if !diff.poly.is_zero() && !(bottom.truncated || rule_img.truncated) {
                        return Err(Error::MapNotWellDefined(format!(
                            "image of {} violates its rewrite rule",
                            var.name
                        )));
                    }
                    if var.kind == VarKind::NilpotentOrderP {
                        let img_p = self.target.pow_nf(img, p)?;
                        if !img_p.poly.is_zero() && !img_p.truncated {
                            return Err(Error::MapNotWellDefined(format!(
                                "image of {} is not p-nilpotent",
                                var.name
                            )));
                        }
                    }
                }
                (_, Some(Rewrite::Whole { target: t, level })) => {
                    // v-deepest is identified with t^(1/p^level)
                    let ident = Monomial::var(*t, Rat::new(1, (p as i64).pow(*level)));
                    let rhs = self.image_of_monomial(&ident)?;
                    let diff = self.target.nf(&self.images[v].sub(&rhs.poly))?;
                    if !diff.poly.is_zero() {
                        return Err(Error::MapNotWellDefined(format!(
                            "image of {} violates its tower identification",
                            var.name
                        )));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Image of the deepest incarnation of generator `v`.
    pub fn image(&self, v: usize) -> &Poly<C> {
        &self.images[v]
    }

    pub fn scale(&self) -> Rat {
        self.scale
    }

    fn image_of_monomial(&self, m: &Monomial) -> Result<Reduced<C>> {
        let p = self.source.prime();
        let mut acc = Reduced { poly: Poly::constant(p, 1), truncated: false };
        for (v, e) in m.exponents() {
            let k: u64 = match self.source.vars()[*v].kind {
                VarKind::PerfectTower => e
                    .scaled_int(p as i64, self.source.depth())
                    .ok_or_else(|| {
                        Error::PrecisionExceeded(format!(
                            "exponent {} beyond depth {}",
                            e,
                            self.source.depth()
                        ))
                    })? as u64,
                _ => e.as_integer().unwrap() as u64,
            };
            let pw = self.target.pow_nf(&self.images[*v], k)?;
            let t = acc.truncated || pw.truncated;
            let prod = self.target.mul_nf(&acc.poly, &pw.poly)?;
            acc = Reduced { poly: prod.poly, truncated: prod.truncated || t };
        }
        Ok(acc)
    }

    fn apply_raw(&self, poly: &Poly<C>) -> Result<Reduced<C>> {
        let mut out = Poly::zero();
        let mut truncated = false;
        for (m, c) in poly.terms() {
            let img = self.image_of_monomial(m)?;
            truncated |= img.truncated;
            out = out.add(&img.poly.scale(c));
        }
        let r = self.target.nf(&out)?;
        Ok(Reduced { poly: r.poly, truncated: truncated || r.truncated })
    }

    /// Apply to an element of the source (given as a raw polynomial).
    pub fn apply(&self, poly: &Poly<C>) -> Result<Reduced<C>> {
        self.apply_raw(poly)
    }

    /// `self . g` (apply `g` first). Relation checks re-run on the composite.
    pub fn compose(&self, g: &AlgebraMap<C>) -> Result<AlgebraMap<C>> {
        if g.target.as_ref() != self.source.as_ref() {
            return Err(Error::Usage("composition mismatch: target(g) != source(f)".into()));
        }
        let mut images = Vec::with_capacity(g.images.len());
        for img in &g.images {
            images.push(self.apply_raw(img)?.poly);
        }
        AlgebraMap::with_scale(
            g.source.clone(),
            self.target.clone(),
            images,
            self.scale.mul(&g.scale),
        )
    }

    /// Equality as maps, checked on the deepest generators.
    pub fn equal_on_generators(&self, other: &AlgebraMap<C>) -> Result<bool> {
        if self.source.as_ref() != other.source.as_ref()
            || self.target.as_ref() != other.target.as_ref()
        {
            return Ok(false);
        }
        for v in 0..self.images.len() {
            let d = self.target.nf(&self.images[v].sub(&other.images[v]))?;
            if !d.poly.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// First generator (by index) on which the two maps differ.
    pub fn first_difference(&self, other: &AlgebraMap<C>) -> Result<Option<usize>> {
        for v in 0..self.images.len() {
            let d = self.target.nf(&self.images[v].sub(&other.images[v]))?;
            if !d.poly.is_zero() {
                return Ok(Some(v));
            }
        }
        Ok(None)
    }
}

impl AlgebraMap<Fp> {
    /// Constructor bypassing the well-definedness checks; the only intended
    /// use is building deliberate counterexamples for the predicate tests.
    pub fn unchecked(
        source: Arc<Algebra>,
        target: Arc<Algebra>,
        images: Vec<Poly<Fp>>,
    ) -> AlgebraMap<Fp> {
        AlgebraMap { source, target, images, scale: Rat::ONE }
    }

    pub fn identity(alg: Arc<Algebra>) -> Result<AlgebraMap<Fp>> {
        let images = (0..alg.vars().len())
            .map(|v| Poly::monomial(alg.prime(), alg.deepest(v)))
            .collect();
        AlgebraMap::new(alg.clone(), alg, images)
    }

    /// Inclusion of a tensor factor.
    pub fn include(side: &[usize], from: Arc<Algebra>, pair: &TensorPair) -> Result<AlgebraMap<Fp>> {
        let images = (0..from.vars().len())
            .map(|v| Poly::monomial(from.prime(), from.deepest(v).reindex_via(side)))
            .collect();
        AlgebraMap::new(from, pair.alg.clone(), images)
    }

    pub fn lift_ws(&self) -> AlgebraMap<WeightScalar> {
        AlgebraMap {
            source: self.source.clone(),
            target: self.target.clone(),
            images: self.images.iter().map(|p| p.lift_ws()).collect(),
            scale: self.scale,
        }
    }
}

trait ReindexVia {
    fn reindex_via(&self, map: &[usize]) -> Monomial;
}

impl ReindexVia for Monomial {
    fn reindex_via(&self, map: &[usize]) -> Monomial {
        self.reindex(map)
    }
}

/// `f tensor g : A tensor B -> C tensor D`, where `src = A tensor B` and
/// `dst = C tensor D` were built by `tensor`.
pub fn tensor_map(
    src: &TensorPair,
    dst: &TensorPair,
    f: &AlgebraMap<Fp>,
    g: &AlgebraMap<Fp>,
) -> Result<AlgebraMap<Fp>> {
    let nsrc = src.alg.vars().len();
    let mut images: Vec<Poly<Fp>> = vec![Poly::zero(); nsrc];
    for (a_var, src_var) in src.left.iter().enumerate() {
        images[*src_var] = f.image(a_var).reindex(&dst.left);
    }
    for (b_var, src_var) in src.right.iter().enumerate() {
        images[*src_var] = g.image(b_var).reindex(&dst.right);
    }
    AlgebraMap::new(src.alg.clone(), dst.alg.clone(), images)
}

/// The multiplication map `A tensor A -> A`.
pub fn mult_map(pair: &TensorPair, alg: Arc<Algebra>) -> Result<AlgebraMap<Fp>> {
    let n = pair.alg.vars().len();
    let mut images = vec![Poly::zero(); n];
    for (a_var, src_var) in pair.left.iter().enumerate() {
        images[*src_var] = Poly::monomial(alg.prime(), alg.deepest(a_var));
    }
    for (a_var, src_var) in pair.right.iter().enumerate() {
        images[*src_var] = Poly::monomial(alg.prime(), alg.deepest(a_var));
    }
    AlgebraMap::new(pair.alg.clone(), alg, images)
}

/// The flip `A tensor A -> A tensor A`.
pub fn swap_map(pair: &TensorPair) -> Result<AlgebraMap<Fp>> {
    let n = pair.alg.vars().len();
    let p = pair.alg.prime();
    let mut images = vec![Poly::zero(); n];
    for (a_var, src_var) in pair.left.iter().enumerate() {
        images[*src_var] = Poly::monomial(p, pair.alg.deepest(pair.right[a_var]));
    }
    for (a_var, src_var) in pair.right.iter().enumerate() {
        images[*src_var] = Poly::monomial(p, pair.alg.deepest(pair.left[a_var]));
    }
    AlgebraMap::new(pair.alg.clone(), pair.alg.clone(), images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Variable;
    use std::collections::BTreeMap;

    fn free_tower(p: u32, depth: u32, bound: i64) -> Arc<Algebra> {
        Algebra::new(
            p,
            depth,
            Rat::from_int(bound),
            vec![Variable::tower("x", Rat::ONE)],
            BTreeMap::new(),
        )
        .unwrap()
    }

    #[test]
    fn identity_composes() {
        let a = free_tower(2, 2, 4);
        let id = AlgebraMap::identity(a.clone()).unwrap();
        let f = id.compose(&id).unwrap();
        assert!(f.equal_on_generators(&id).unwrap());
    }

    #[test]
    fn frobenius_shift_squares_to_double_shift() {
        // x^(1/p^m) -> x^(1/p^(m-1)) composed with itself
        let a = free_tower(2, 2, 4);
        let shift: AlgebraMap<Fp> = AlgebraMap::with_scale(
            a.clone(),
            a.clone(),
            vec![Poly::monomial(2, a.tower_level(0, 1))],
            Rat::from_int(2),
        )
        .unwrap();
        let double = shift.compose(&shift).unwrap();
        // deepest x^(1/4) -> x under the double shift
        let expect: AlgebraMap<Fp> = AlgebraMap::with_scale(
            a.clone(),
            a.clone(),
            vec![Poly::monomial(2, Monomial::var(0, Rat::ONE))],
            Rat::from_int(4),
        )
        .unwrap();
        assert!(double.equal_on_generators(&expect).unwrap());
    }

    #[test]
    fn degree_violation_is_rejected() {
        let a = free_tower(2, 2, 4);
        // sending x^(1/4) to x (degree 1 instead of 1/4) must fail at scale 1
        let bad: Result<AlgebraMap<Fp>> = AlgebraMap::new(
            a.clone(),
            a.clone(),
            vec![Poly::monomial(2, Monomial::var(0, Rat::ONE))],
        );
        assert!(matches!(bad, Err(Error::MapNotWellDefined(_))));
    }

    #[test]
    fn relation_violation_is_rejected() {
        // target x nilpotent-free, source has x -> 0: identity-like map fails
        let src = Algebra::new(
            2,
            2,
            Rat::from_int(4),
            vec![Variable::tower("x", Rat::ONE)],
            [(0usize, Rewrite::Bottom(Poly::zero()))].into_iter().collect(),
        )
        .unwrap();
        let dst = free_tower(2, 2, 4);
        let bad: Result<AlgebraMap<Fp>> = AlgebraMap::new(
            src,
            dst.clone(),
            vec![Poly::monomial(2, dst.tower_level(0, 2))],
        );
        assert!(matches!(bad, Err(Error::MapNotWellDefined(_))));
    }
}
