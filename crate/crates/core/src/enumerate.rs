//! Finite preorders, their up-sets, and the enumeration of constant-domain
//! Kripke models used by the bounded searches and exhaustive suites.
//!
//! A preorder on `k` worlds is stored as `up[w]`, the bitmask of worlds `v`
//! with `w ⪯ v`. Its canonical code is the row-major adjacency matrix read
//! as a binary number (bit `w * k + v`).

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::kripke::KripkeModel;
use crate::model::all_tuples;

/// Reflexive-transitive closure of a relation given as successor masks.
pub fn closure(mut up: Vec<u64>) -> Vec<u64> {
    let k = up.len();
    for (w, m) in up.iter_mut().enumerate() {
        *m |= 1 << w;
    }
    // Warshall
    for mid in 0..k {
        let via = up[mid];
        for m in up.iter_mut() {
            if *m & (1 << mid) != 0 {
                *m |= via;
            }
        }
    }
    up
}

pub fn preorder_code(up: &[u64]) -> u64 {
    let k = up.len();
    let mut code = 0u64;
    for (w, &m) in up.iter().enumerate() {
        for v in 0..k {
            if m & (1 << v) != 0 {
                code |= 1 << (w * k + v);
            }
        }
    }
    code
}

/// All preorders on `k` labelled worlds, generated as reachability closures
/// of every digraph on `k` nodes and deduplicated by canonical code, in
/// ascending code order.
pub fn preorders(k: usize) -> Vec<Vec<u64>> {
    assert!(
        (1..=5).contains(&k),
        "preorder enumeration supports 1..=5 worlds"
    );
    let edges: Vec<(usize, usize)> = (0..k)
        .flat_map(|w| (0..k).filter(move |&v| v != w).map(move |v| (w, v)))
        .collect();
    let mut seen = BTreeMap::new();
    for bits in 0u64..1 << edges.len() {
        let mut up = vec![0u64; k];
        for (i, &(w, v)) in edges.iter().enumerate() {
            if bits & (1 << i) != 0 {
                up[w] |= 1 << v;
            }
        }
        let up = closure(up);
        seen.entry(preorder_code(&up)).or_insert(up);
    }
    seen.into_values().collect()
}

/// Up-closed subsets of the worlds, ascending as bitmasks.
pub fn upsets(up: &[u64]) -> Vec<u64> {
    let k = up.len();
    (0u64..1 << k)
        .filter(|&s| (0..k).all(|w| s & (1 << w) == 0 || up[w] & !s == 0))
        .collect()
}

/// Atom instances over a domain of size `n`: predicates in the given order,
/// tuples lexicographic.
pub fn atom_instances(preds: &[(String, usize)], n: usize) -> Vec<(String, Vec<usize>)> {
    preds
        .iter()
        .flat_map(|(p, arity)| {
            all_tuples(n, *arity)
                .into_iter()
                .map(move |t| (p.clone(), t))
        })
        .collect()
}

/// How many constant-domain models `for_each_cd_model` visits.
pub fn cd_model_count(preds: &[(String, usize)], max_worlds: usize, max_domain: usize) -> u128 {
    let mut total: u128 = 0;
    for k in 1..=max_worlds {
        let per_order: Vec<u128> = preorders(k)
            .iter()
            .map(|up| upsets(up).len() as u128)
            .collect();
        for n in 1..=max_domain {
            let instances = atom_instances(preds, n).len() as u32;
            for &u in &per_order {
                total = total.saturating_add(u.saturating_pow(instances));
            }
        }
    }
    total
}

/// Visit every constant-domain model with at most `max_worlds` worlds and
/// domain size at most `max_domain` interpreting `preds` hereditarily.
///
/// Order: world count ascending, then domain size ascending, then preorders
/// by canonical code, then interpretations as a mixed-radix counter over the
/// atom instances (first instance most significant) whose digits index the
/// ascending list of up-sets.
pub fn for_each_cd_model<T>(
    preds: &[(String, usize)],
    max_worlds: usize,
    max_domain: usize,
    ceiling: u128,
    mut visit: impl FnMut(&KripkeModel) -> ControlFlow<T>,
) -> Result<Option<T>> {
    if max_worlds == 0 || max_domain == 0 {
        return Err(Error::InvalidBound);
    }
    if max_worlds > 5 {
        return Err(Error::BoundInfeasible {
            required: u128::MAX,
            ceiling,
        });
    }
    let required = cd_model_count(preds, max_worlds, max_domain);
    if required > ceiling {
        return Err(Error::BoundInfeasible { required, ceiling });
    }
    for k in 1..=max_worlds {
        let orders = preorders(k);
        for n in 1..=max_domain {
            let instances = atom_instances(preds, n);
            for up in &orders {
                let ups = upsets(up);
                let mut digits = vec![0usize; instances.len()];
                loop {
                    let masks: Vec<u64> = digits.iter().map(|&d| ups[d]).collect();
                    let model = KripkeModel::from_instance_masks(up, n, preds, &instances, &masks);
                    if let ControlFlow::Break(t) = visit(&model) {
                        return Ok(Some(t));
                    }
                    if !advance(&mut digits, ups.len()) {
                        break;
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Mixed-radix increment with the last digit fastest; false on wrap-around.
fn advance(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}
