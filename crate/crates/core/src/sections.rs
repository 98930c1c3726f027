use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::algebra::{Algebra, Monomial, Poly, Rewrite, VarKind, Variable};
use crate::error::{Error, Result};
use crate::maps::AlgebraMap;
use crate::modules::{build_module, AugmentedModule, ModuleSpec, Params};
use crate::rat::Rat;
use crate::scalars::Fp;

/// A presentation of a perfect ring with a chosen ideal: named root towers,
/// a subset of which generate the ideal (each by its top element).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pair {
    pub towers: Vec<String>,
    pub killed: BTreeSet<String>,
}

impl Pair {
    /// `perf(x,y) kill(y)` denotes the pair (k[x^(1/p^inf), y^(1/p^inf)], (y)).
    pub fn parse(s: &str) -> Result<Pair> {
        let s = s.trim();
        let open = s.find("perf(").ok_or_else(|| Error::Usage("pair needs perf(..)".into()))?;
        let rest = &s[open + 5..];
        let close = rest.find(')').ok_or_else(|| Error::Usage("unclosed perf(".into()))?;
        let towers: Vec<String> = rest[..close]
            .split(',')
            .map(|t| t.trim().to_string())
            .filter(|t| !t.is_empty())
            .collect();
        let mut killed = BTreeSet::new();
        if let Some(kopen) = s.find("kill(") {
            let krest = &s[kopen + 5..];
            let kclose = krest.find(')').ok_or_else(|| Error::Usage("unclosed kill(".into()))?;
            for t in krest[..kclose].split(',') {
                let t = t.trim();
                if !t.is_empty() {
                    killed.insert(t.to_string());
                }
            }
        }
        let pair = Pair { towers, killed };
        pair.validate()?;
        Ok(pair)
    }

    pub fn generator(name: &str) -> Pair {
        Pair { towers: vec![name.into()], killed: [name.to_string()].into_iter().collect() }
    }

    fn validate(&self) -> Result<()> {
        let names: BTreeSet<&String> = self.towers.iter().collect();
        if names.len() != self.towers.len() {
            return Err(Error::Usage("duplicate tower names in pair".into()));
        }
        for k in &self.killed {
            if !names.contains(k) {
                return Err(Error::UnsupportedPresentation(format!(
                    "ideal generator {} is not one of the towers",
                    k
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    /// A tower of the pair outside the ideal: contributes itself.
    FreeTower,
    /// An ideal generator: contributes a copy of the module's coordinate
    /// ring, its tower renamed to the generator.
    ModuleCopy,
}

#[derive(Debug, Clone)]
pub struct Block {
    pub generator: String,
    pub kind: BlockKind,
    /// Indices of this block's variables in the value algebra.
    pub vars: Vec<usize>,
    /// A standalone copy of the block algebra, for dimension bookkeeping.
    pub piece_source: Arc<Algebra>,
}

/// The value of the section functor of an augmented module on a pair: a
/// tensor product of free towers and module copies, together with the
/// structure map from the pair's perfect ring (killed towers land through
/// the augmentation).
#[derive(Debug, Clone)]
pub struct SectionsValue {
    pub module_label: String,
    pub alg: Arc<Algebra>,
    pub blocks: Vec<Block>,
    pub pair_ring: Arc<Algebra>,
    pub structure: AlgebraMap,
}

/// Rename a module variable into a block namespace: the tower takes the
/// generator's name, coordinates get the generator as prefix.
fn block_var_name(generator: &str, module_var: &Variable) -> String {
    match module_var.kind {
        VarKind::PerfectTower => generator.to_string(),
        _ => {
            let suffix = module_var.name.strip_prefix('x').unwrap_or(&module_var.name);
            format!("{}{}", generator, suffix)
        }
    }
}

pub fn evaluate(m: &AugmentedModule, pair: &Pair) -> Result<SectionsValue> {
    pair.validate()?;
    let p = m.params.p;
    let depth = m.hopf.alg.depth();
    let bound = m.params.bound;
    if m.label != "identity" {
        let nil = crate::modules::is_nilpotent_quasi_ideal(m)?;
        if !nil.nilpotent {
            return Err(Error::Usage(format!(
                "section values need a nilpotent quasi-ideal; {} is not one",
                m.label
            )));
        }
    }

    let mut vars: Vec<Variable> = Vec::new();
    let mut rewrites: BTreeMap<usize, Rewrite> = BTreeMap::new();
    let mut blocks: Vec<Block> = Vec::new();
    for tname in &pair.towers {
        if pair.killed.contains(tname) {
            // a copy of the module's coordinate ring
            let malg = &m.hopf.alg;
            let offset = vars.len();
            let var_map: Vec<usize> = (0..malg.vars().len()).map(|i| offset + i).collect();
            for v in malg.vars() {
                vars.push(Variable {
                    name: block_var_name(tname, v),
                    ..v.clone()
                });
            }
            for (v, rule) in malg.rewrites() {
                let rule = match rule {
                    Rewrite::Bottom(poly) => Rewrite::Bottom(poly.reindex(&var_map)),
                    Rewrite::Whole { target, level } => {
                        Rewrite::Whole { target: var_map[*target], level: *level }
                    }
                };
                rewrites.insert(var_map[*v], rule);
            }
            blocks.push(Block {
                generator: tname.clone(),
                kind: BlockKind::ModuleCopy,
                vars: var_map,
                piece_source: malg.clone(),
            });
        } else {
            let idx = vars.len();
            vars.push(Variable::tower(tname, Rat::ONE));
            blocks.push(Block {
                generator: tname.clone(),
                kind: BlockKind::FreeTower,
                vars: vec![idx],
                piece_source: Algebra::new(
                    p,
                    depth,
                    bound,
                    vec![Variable::tower(tname, Rat::ONE)],
                    BTreeMap::new(),
                )?,
            });
        }
    }
    let alg = Algebra::new(p, depth, bound, vars, rewrites)?;

    // the pair's perfect ring and the structure map into the value
    let pair_vars: Vec<Variable> =
        pair.towers.iter().map(|t| Variable::tower(t, Rat::ONE)).collect();
    let pair_ring = Algebra::new(p, depth, bound, pair_vars, BTreeMap::new())?;
    let mut structure_images: Vec<Poly<Fp>> = Vec::new();
    for (i, tname) in pair.towers.iter().enumerate() {
        let block = &blocks[i];
        match block.kind {
            BlockKind::FreeTower => {
                structure_images.push(Poly::monomial(p, alg.deepest(block.vars[0])));
            }
            BlockKind::ModuleCopy => {
                structure_images.push(m.aug.image(0).reindex(&block.vars));
            }
        }
        debug_assert_eq!(pair.towers[i], *tname);
    }
    let structure = AlgebraMap::new(pair_ring.clone(), alg.clone(), structure_images)?;
    Ok(SectionsValue { module_label: m.label.clone(), alg, blocks, pair_ring, structure })
}

/// Dimension of a graded piece as predicted by the product-of-blocks rule:
/// the convolution of per-block dimensions must match the value algebra.
pub fn kunneth_dimension(value: &SectionsValue, d: Rat) -> Result<usize> {
    let p = value.alg.prime() as i64;
    let depth = value.alg.depth();
    // lattice of degrees with denominator dividing p^depth, up to d
    let unit = Rat::new(1, p.pow(depth));
    let max_k = d.mul(&Rat::new(p.pow(depth), 1)).as_integer().ok_or_else(|| {
        Error::Usage(format!("degree {} is off the p-power lattice", d))
    })?;
    let mut table: Vec<usize> = vec![0; max_k as usize + 1];
    table[0] = 1;
    for block in &value.blocks {
        let mut next = vec![0usize; table.len()];
        for k in 0..table.len() {
            if table[k] == 0 {
                continue;
            }
            for j in 0..table.len() - k {
                let dim = block.piece_source.graded_piece(unit.mul_int(j as i64))?.len();
                if dim > 0 {
                    next[k + j] += table[k] * dim;
                }
            }
        }
        table = next;
    }
    Ok(table[max_k as usize])
}

/// Check the product rule at every lattice degree up to the bound.
pub fn kunneth_check(value: &SectionsValue) -> Result<()> {
    let p = value.alg.prime() as i64;
    let depth = value.alg.depth();
    let steps = value
        .alg
        .degree_bound()
        .mul(&Rat::new(p.pow(depth), 1))
        .as_integer()
        .unwrap_or(0);
    for k in 0..=steps {
        let d = Rat::new(k, p.pow(depth));
        let direct = value.alg.graded_piece(d)?.len();
        let predicted = kunneth_dimension(value, d)?;
        if direct != predicted {
            return Err(Error::Internal(format!(
                "product rule fails at degree {}: {} vs {}",
                d, direct, predicted
            )));
        }
    }
    Ok(())
}

/// Rebuild an augmented module from the value on its generator pair and
/// compare with the original; `Ok(())` is the unit identity for this entry.
pub fn restrict_check(m: &AugmentedModule, value: &SectionsValue) -> Result<()> {
    if value.blocks.len() != 1 || value.blocks[0].kind != BlockKind::ModuleCopy {
        return Err(Error::Usage("restriction expects the one-generator pair value".into()));
    }
    let block = &value.blocks[0];
    // rename back: block var i corresponds to module var i by construction
    let malg = &m.hopf.alg;
    if block.vars.len() != malg.vars().len() {
        return Err(Error::Internal("value block lost generators".into()));
    }
    // rebuilt algebra: value presentation with module names restored
    let vars: Vec<Variable> = block
        .vars
        .iter()
        .zip(malg.vars())
        .map(|(bv, mv)| Variable { name: mv.name.clone(), ..value.alg.vars()[*bv].clone() })
        .collect();
    let back: Vec<usize> = (0..block.vars.len()).collect();
    let mut rewrites = BTreeMap::new();
    for (v, rule) in value.alg.rewrites() {
        let local = block.vars.iter().position(|bv| bv == v).ok_or_else(|| {
            Error::Internal("rewrite outside the block".into())
        })?;
        let rule = match rule {
            Rewrite::Bottom(poly) => {
                let mut remap = vec![usize::MAX; value.alg.vars().len()];
                for (i, bv) in block.vars.iter().enumerate() {
                    remap[*bv] = back[i];
                }
                Rewrite::Bottom(poly.reindex(&remap))
            }
            Rewrite::Whole { target, level } => Rewrite::Whole {
                target: block.vars.iter().position(|bv| bv == target).unwrap(),
                level: *level,
            },
        };
        rewrites.insert(local, rule);
    }
    let rebuilt = Algebra::new(
        value.alg.prime(),
        value.alg.depth(),
        value.alg.degree_bound(),
        vars,
        rewrites,
    )?;
    if rebuilt.as_ref() != malg.as_ref() {
        return Err(Error::Internal(format!(
            "restriction of {} does not reproduce its presentation",
            m.label
        )));
    }
    // the structure map must come back as the augmentation
    let mut remap = vec![usize::MAX; value.alg.vars().len()];
    for (i, bv) in block.vars.iter().enumerate() {
        remap[*bv] = i;
    }
    let structural_aug = value.structure.image(0).reindex(&remap);
    let diff = malg.nf(&structural_aug.sub(m.aug.image(0)))?;
    if !diff.poly.is_zero() {
        return Err(Error::Internal(format!(
            "restriction of {} disagrees with the augmentation on the ideal generator",
            m.label
        )));
    }
    Ok(())
}

/// The unit identity `restrict . evaluate = id` across the whole catalog.
pub fn unit_identity_catalog(params: &Params) -> Result<Vec<String>> {
    let mut checked = Vec::new();
    for spec in [
        ModuleSpec::AlphaFlat,
        ModuleSpec::AlphaPPullback,
        ModuleSpec::UWF,
        ModuleSpec::UWFOverP,
        ModuleSpec::Twisted,
        ModuleSpec::Identity,
    ] {
        let m = build_module(&spec, params)?;
        let value = evaluate(&m, &Pair::generator("y"))?;
        restrict_check(&m, &value)?;
        checked.push(m.label.clone());
    }
    Ok(checked)
}

/// The endomorphism of a pair value induced by the p-th power map of the
/// pair, together with the commuting-square assertion against the structure
/// map. Returns the induced endomorphism of the value.
pub fn frobenius_square(m: &AugmentedModule, pair: &Pair) -> Result<AlgebraMap> {
    let value = evaluate(m, pair)?;
    let p = value.alg.prime();
    let alg = &value.alg;
    // on every root tower the shift one level up; on coordinates the p-th power
    let images: Vec<Poly<Fp>> = (0..alg.vars().len())
        .map(|v| match alg.vars()[v].kind {
            VarKind::PerfectTower => Poly::monomial(p, alg.tower_level(v, alg.depth() - 1)),
            _ => Poly::monomial(p, Monomial::var(v, Rat::from_int(p as i64))),
        })
        .collect();
    let frob_value = AlgebraMap::with_scale(
        alg.clone(),
        alg.clone(),
        images,
        Rat::from_int(p as i64),
    )?;

    let pr = &value.pair_ring;
    let pair_images: Vec<Poly<Fp>> = (0..pr.vars().len())
        .map(|v| Poly::monomial(p, pr.tower_level(v, pr.depth() - 1)))
        .collect();
    let frob_pair = AlgebraMap::with_scale(
        pr.clone(),
        pr.clone(),
        pair_images,
        Rat::from_int(p as i64),
    )?;

    let via_pair = value.structure.compose(&frob_pair)?;
    let via_value = frob_value.compose(&value.structure)?;
    if !via_pair.equal_on_generators(&via_value)? {
        return Err(Error::Internal(format!(
            "p-th power square does not commute for {}",
            m.label
        )));
    }
    Ok(frob_value)
}
