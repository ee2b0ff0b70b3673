use super::model::{DomainModel, FluentKind, GroundAtom, ObjectDecl, Param};

/// All type-respecting instantiations of the domain's fluents.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundAtoms {
    pub boolean: Vec<GroundAtom>,
    pub numeric: Vec<GroundAtom>,
}

/// Enumerate ground atoms, ordered by fluent name then argument names.
pub fn ground_atoms(domain: &DomainModel, objects: &[ObjectDecl]) -> GroundAtoms {
    let mut out = GroundAtoms::default();
    let mut fluents: Vec<_> = domain.fluents.iter().collect();
    fluents.sort_by(|a, b| a.name.cmp(&b.name));
    for f in fluents {
        let target = match f.kind {
            FluentKind::Boolean => &mut out.boolean,
            FluentKind::Numeric => &mut out.numeric,
        };
        for args in instantiations(domain, objects, &f.parameters) {
            target.push(GroundAtom {
                fluent: f.name.clone(),
                args,
            });
        }
    }
    out
}

/// Objects usable for a parameter of the given type, sorted by name.
pub fn candidates<'a>(domain: &DomainModel, objects: &'a [ObjectDecl], ty: &str) -> Vec<&'a str> {
    let mut c: Vec<&str> = objects
        .iter()
        .filter(|o| domain.is_subtype(&o.ty, ty))
        .map(|o| o.name.as_str())
        .collect();
    c.sort_unstable();
    c.dedup();
    c
}

/// Cartesian product of parameter candidates in lexicographic order.
pub fn instantiations(
    domain: &DomainModel,
    objects: &[ObjectDecl],
    params: &[Param],
) -> Vec<Vec<String>> {
    let pools: Vec<Vec<&str>> = params
        .iter()
        .map(|p| candidates(domain, objects, &p.ty))
        .collect();
    if pools.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; pools.len()];
    loop {
        out.push(
            idx.iter()
                .zip(&pools)
                .map(|(&i, pool)| pool[i].to_string())
                .collect(),
        );
        // odometer increment, last position fastest
        let mut pos = pools.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < pools[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}
