use crate::algebra::{Monomial, Poly};
use crate::error::{Error, Result};
use crate::maps::AlgebraMap;
use crate::modules::{scaling_family, specialize, AugmentedModule};
use crate::rat::Rat;
use crate::scalars::Fp;

/// The solved endomorphism monoid of a module at the enumeration envelope:
/// every degree-preserving coefficient assignment over the prime field that
/// passes the algebra-map, comultiplication and augmentation constraints,
/// with its composition table.
#[derive(Debug, Clone)]
pub struct EndoTable {
    pub module: String,
    pub p: u32,
    pub endos: Vec<AlgebraMap>,
    /// Coefficient of the degree-one coordinate in each endomorphism.
    pub scalars: Vec<Fp>,
    /// `composition[i][j]` is the index of `endos[i] . endos[j]`.
    pub composition: Vec<Vec<usize>>,
    pub identity: usize,
    pub invertible: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndoMode {
    Enumerate,
    Symbolic,
}

fn check_envelope(m: &AugmentedModule) -> Result<()> {
    let pr = &m.params;
    let psq = Rat::from_int((pr.p * pr.p) as i64);
    if m.label != "twisted" || pr.p > 3 || pr.n > 2 || pr.depth > 2 || pr.bound > psq {
        return Err(Error::Usage(format!(
            "endomorphism search runs on the twisted module at p <= 3, n <= 2, depth <= 2, bound <= p^2 (got {} at p={}, n={}, depth={}, bound={})",
            m.label, pr.p, pr.n, pr.depth, pr.bound
        )));
    }
    Ok(())
}

/// All degree-preserving endomorphism candidates: towers fixed, each
/// order-p coordinate sent to an arbitrary combination of its graded piece.
fn enumerate_candidates(m: &AugmentedModule) -> Result<Vec<Vec<Poly<Fp>>>> {
    let alg = &m.hopf.alg;
    let p = m.params.p;
    let witt = m.witt_vars();
    let mut pieces: Vec<Vec<Monomial>> = Vec::new();
    for &v in &witt {
        pieces.push(alg.graded_piece(alg.vars()[v].degree)?);
    }
    let mut assignments: Vec<Vec<Poly<Fp>>> = vec![Vec::new()];
    for (slot, piece) in pieces.iter().enumerate() {
        let mut next = Vec::new();
        let combos = coefficient_tuples(p, piece.len());
        for base in &assignments {
            for combo in &combos {
                let mut img: Poly<Fp> = Poly::zero();
                for (c, mono) in combo.iter().zip(piece) {
                    img.add_term(mono.clone(), *c);
                }
                let mut a = base.clone();
                a.push(img);
                next.push(a);
            }
        }
        assignments = next;
        let _ = slot;
    }
    // assemble full image vectors: towers identical, coordinates from slots
    let mut out = Vec::new();
    for a in assignments {
        let mut images: Vec<Poly<Fp>> = (0..alg.vars().len())
            .map(|v| Poly::monomial(p, alg.deepest(v)))
            .collect();
        for (slot, &v) in witt.iter().enumerate() {
            images[v] = a[slot].clone();
        }
        out.push(images);
    }
    Ok(out)
}

fn coefficient_tuples(p: u32, len: usize) -> Vec<Vec<Fp>> {
    let mut out: Vec<Vec<Fp>> = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for base in &out {
            for c in 0..p {
                let mut b = base.clone();
                b.push(Fp::new(c as i64, p));
                next.push(b);
            }
        }
        out = next;
    }
    out
}

/// Does the candidate commute with the comultiplication and fix the
/// augmentation?
fn passes_constraints(m: &AugmentedModule, sigma: &AlgebraMap) -> Result<bool> {
    let sq = &m.hopf.square;
    let ss = crate::maps::tensor_map(sq, sq, sigma, sigma)?;
    let lhs = ss.compose(&m.hopf.comult)?;
    let rhs = m.hopf.comult.compose(sigma)?;
    if !lhs.equal_on_generators(&rhs)? {
        return Ok(false);
    }
    let aug_after = sigma.compose(&m.aug)?;
    aug_after.equal_on_generators(&m.aug)
}

/// Exhaustive solution of the endomorphism constraints over the prime field.
pub fn solve_endos(m: &AugmentedModule) -> Result<EndoTable> {
    check_envelope(m)?;
    let alg = &m.hopf.alg;
    let p = m.params.p;
    let witt = m.witt_vars();
    let x0 = witt[0];
    let mut endos: Vec<AlgebraMap> = Vec::new();
    let mut scalars: Vec<Fp> = Vec::new();
    for images in enumerate_candidates(m)? {
        // candidates failing the algebra-map laws are simply not solutions
        let Ok(sigma) = AlgebraMap::new(alg.clone(), alg.clone(), images) else {
            continue;
        };
        if !passes_constraints(m, &sigma)? {
            continue;
        }
        let c = sigma
            .image(x0)
            .coefficient(&Monomial::var(x0, Rat::ONE))
            .copied()
            .unwrap_or(Fp::zero(p));
        endos.push(sigma);
        scalars.push(c);
    }

    // composition table and units
    let mut composition = vec![vec![usize::MAX; endos.len()]; endos.len()];
    for i in 0..endos.len() {
        for j in 0..endos.len() {
            let comp = endos[i].compose(&endos[j])?;
            let Some(k) = locate(&endos, &comp)? else {
                return Err(Error::Internal("endomorphisms are not closed under composition".into()));
            };
            composition[i][j] = k;
        }
    }
    let id_map = AlgebraMap::identity(alg.clone())?;
    let identity = locate(&endos, &id_map)?
        .ok_or_else(|| Error::Internal("identity endomorphism missing".into()))?;
    let invertible: Vec<bool> = (0..endos.len())
        .map(|i| {
            (0..endos.len()).any(|j| composition[i][j] == identity && composition[j][i] == identity)
        })
        .collect();
    Ok(EndoTable {
        module: m.label.clone(),
        p,
        endos,
        scalars,
        composition,
        identity,
        invertible,
    })
}

fn locate(endos: &[AlgebraMap], target: &AlgebraMap) -> Result<Option<usize>> {
    for (i, e) in endos.iter().enumerate() {
        if e.equal_on_generators(target)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

impl EndoTable {
    /// The composition table transported along the scalar labels must be
    /// plain multiplication in the prime field.
    pub fn is_multiplication_table(&self) -> bool {
        for i in 0..self.endos.len() {
            for j in 0..self.endos.len() {
                let prod = self.scalars[i].mul(&self.scalars[j]);
                let k = self.composition[i][j];
                if self.scalars[k] != prod {
                    return false;
                }
            }
        }
        // scalar labels must be pairwise distinct for the table to be a
        // faithful copy of the field's multiplication
        let mut sorted: Vec<u32> = self.scalars.iter().map(|c| c.value()).collect();
        sorted.sort();
        sorted.dedup();
        sorted.len() == self.scalars.len()
    }

    pub fn automorphism_count(&self) -> usize {
        self.invertible.iter().filter(|b| **b).count()
    }
}

/// The symbolic one-parameter family together with its per-coordinate
/// exponents of the formal unit.
#[derive(Debug, Clone)]
pub struct SymbolicFamily {
    pub family: AlgebraMap<crate::scalars::WeightScalar>,
    /// `(coordinate name, exponent)`: the coordinate scales by `b^exponent`.
    pub exponents: Vec<(String, i64)>,
}

pub fn symbolic_endos(m: &AugmentedModule) -> Result<SymbolicFamily> {
    check_envelope(m)?;
    let family = scaling_family(m)?;
    let alg = &m.hopf.alg;
    let mut exponents = Vec::new();
    for &v in &m.witt_vars() {
        let img = family.image(v);
        if img.num_terms() != 1 {
            return Err(Error::Internal(format!(
                "family image of {} is not a scaled coordinate",
                alg.vars()[v].name
            )));
        }
        let (mono, c) = img.terms().next().unwrap();
        if *mono != Monomial::var(v, Rat::ONE) {
            return Err(Error::Internal(format!(
                "family image of {} moves off its coordinate",
                alg.vars()[v].name
            )));
        }
        let (w, unit) = c
            .single_weight()
            .ok_or_else(|| Error::Internal("family coefficient is not a single power".into()))?;
        if unit != Fp::one(m.params.p) {
            return Err(Error::Internal("family coefficient is not monic".into()));
        }
        exponents.push((alg.vars()[v].name.clone(), w));
    }
    Ok(SymbolicFamily { family, exponents })
}

/// Every enumerated endomorphism is a specialization of the family, and
/// every specialization occurs in the table.
pub fn verify_scaling_family(m: &AugmentedModule, table: &EndoTable) -> Result<bool> {
    let sym = symbolic_endos(m)?;
    let p = m.params.p;
    let mut matched = vec![false; table.endos.len()];
    for c in 0..p {
        let spec = specialize(&sym.family, Fp::new(c as i64, p))?;
        let Some(i) = locate(&table.endos, &spec)? else {
            return Ok(false);
        };
        matched[i] = true;
    }
    Ok(matched.iter().all(|b| *b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modules::{build_module, ModuleSpec, Params};

    fn table(p: u32) -> EndoTable {
        let bound = Rat::from_int((p * p) as i64);
        let params = Params::new(p, 2, 2, bound).unwrap();
        let m = build_module(&ModuleSpec::Twisted, &params).unwrap();
        solve_endos(&m).unwrap()
    }

    #[test]
    fn two_endomorphisms_one_automorphism_at_p2() {
        let t = table(2);
        assert_eq!(t.endos.len(), 2);
        assert_eq!(t.automorphism_count(), 1);
        assert!(t.is_multiplication_table());
        // the identity candidate passes
        assert!(t.invertible[t.identity]);
    }

    #[test]
    fn three_endomorphisms_two_automorphisms_at_p3() {
        let t = table(3);
        assert_eq!(t.endos.len(), 3);
        assert_eq!(t.automorphism_count(), 2);
        assert!(t.is_multiplication_table());
    }

    #[test]
    fn units_are_exactly_nonzero_scalars() {
        for p in [2u32, 3] {
            let t = table(p);
            for (inv, c) in t.invertible.iter().zip(&t.scalars) {
                assert_eq!(*inv, !c.is_zero());
            }
        }
    }

    #[test]
    fn symbolic_family_matches_enumeration() {
        for p in [2u32, 3] {
            let bound = Rat::from_int((p * p) as i64);
            let params = Params::new(p, 2, 2, bound).unwrap();
            let m = build_module(&ModuleSpec::Twisted, &params).unwrap();
            let t = solve_endos(&m).unwrap();
            assert!(verify_scaling_family(&m, &t).unwrap());
            let sym = symbolic_endos(&m).unwrap();
            let expect: Vec<i64> = (0..2).map(|i| (p as i64).pow(i)).collect();
            let got: Vec<i64> = sym.exponents.iter().map(|(_, w)| *w).collect();
            assert_eq!(got, expect);
        }
    }

    #[test]
    fn envelope_is_enforced() {
        let params = Params::new(5, 2, 2, Rat::from_int(4)).unwrap();
        let m = build_module(&ModuleSpec::Twisted, &params).unwrap();
        assert!(matches!(solve_endos(&m), Err(Error::Usage(_))));
        let params2 = Params::new(2, 2, 2, Rat::from_int(4)).unwrap();
        let other = build_module(&ModuleSpec::UWF, &params2).unwrap();
        assert!(matches!(solve_endos(&other), Err(Error::Usage(_))));
    }
}
