//! Built-in example algebras and the enumerated corpus.
//!
//! All built-ins share the signature `[p/3, m/2]` so they can be compared,
//! multiplied and connected by bridges:
//!
//! | algebra  | `p(x,y,z)`     | `m(x,y)`   |
//! |----------|----------------|------------|
//! | Zn-affine| `x - y + z`    | `2x - y`   |
//! | S2       | `x ∧ y ∧ z`    | `x ∧ y`    |
//! | L2       | `x ∨ (y ∧ z)`  | `x ∧ y`    |

use crate::algebra::{FiniteAlgebra, Operation};

fn named(name: &str, size: usize, p: impl Fn(usize, usize, usize) -> usize, m: impl Fn(usize, usize) -> usize) -> FiniteAlgebra {
    let ops = vec![
        FiniteAlgebra::op_from_fn("p", size, 3, |a| p(a[0], a[1], a[2])),
        FiniteAlgebra::op_from_fn("m", size, 2, |a| m(a[0], a[1])),
    ];
    FiniteAlgebra::new(name, size, ops).expect("builtin tables are valid")
}

/// The affine algebra of `Z_n` in the common signature.
pub fn affine(n: usize) -> FiniteAlgebra {
    named(&format!("Z{n}aff"), n, |x, y, z| (x + n - y + z) % n, |x, y| (2 * x + n - y) % n)
}

pub fn z2aff() -> FiniteAlgebra {
    affine(2)
}

pub fn z3aff() -> FiniteAlgebra {
    affine(3)
}

pub fn z4aff() -> FiniteAlgebra {
    affine(4)
}

/// The two-element meet semilattice.
pub fn s2() -> FiniteAlgebra {
    named("S2", 2, |x, y, z| x & y & z, |x, y| x & y)
}

/// The two-element lattice.
pub fn l2() -> FiniteAlgebra {
    named("L2", 2, |x, y, z| x | (y & z), |x, y| x & y)
}

/// One-element algebra in the common signature.
pub fn trivial() -> FiniteAlgebra {
    named("T1", 1, |_, _, _| 0, |_, _| 0)
}

pub fn z2aff_sq() -> FiniteAlgebra {
    FiniteAlgebra::product(&[&z2aff(), &z2aff()]).expect("same signature")
}

pub fn z2aff_x_s2() -> FiniteAlgebra {
    FiniteAlgebra::product(&[&z2aff(), &s2()]).expect("same signature")
}

/// The seven built-in corpus algebras.
pub fn all() -> Vec<FiniteAlgebra> {
    vec![z2aff(), z3aff(), z4aff(), s2(), l2(), z2aff_sq(), z2aff_x_s2()]
}

pub fn by_name(name: &str) -> Option<FiniteAlgebra> {
    let lower = name.to_ascii_lowercase();
    match lower.as_str() {
        "t1" | "trivial" => Some(trivial()),
        "z2aff" => Some(z2aff()),
        "z3aff" => Some(z3aff()),
        "z4aff" => Some(z4aff()),
        "s2" => Some(s2()),
        "l2" => Some(l2()),
        "z2affxz2aff" | "z2aff2" => Some(z2aff_sq()),
        "z2affxs2" => Some(z2aff_x_s2()),
        _ => None,
    }
}

/// Semilattice `max` groupoid on `n` elements, signature `[m/2]`.
pub fn semilattice_groupoid(n: usize) -> FiniteAlgebra {
    let op = FiniteAlgebra::op_from_fn("m", n, 2, |a| a[0].max(a[1]));
    FiniteAlgebra::new(format!("SL{n}"), n, vec![op]).expect("valid table")
}

/// All commutative idempotent binary operations on at most `max_size`
/// elements, one per isomorphism class, in signature `[m/2]`.
pub fn commutative_idempotent_groupoids(max_size: usize) -> Vec<FiniteAlgebra> {
    let mut out = Vec::new();
    for n in 1..=max_size {
        let free: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let count = n.pow(free.len() as u32);
        let mut classes: Vec<FiniteAlgebra> = Vec::new();
        for code in 0..count {
            let mut table = vec![0; n * n];
            for a in 0..n {
                table[a * n + a] = a;
            }
            let mut rest = code;
            for &(a, b) in &free {
                let v = rest % n;
                rest /= n;
                table[a * n + b] = v;
                table[b * n + a] = v;
            }
            let op = Operation { name: "m".into(), arity: 2, table };
            let alg = FiniteAlgebra::new(format!("CI{n}_{}", classes.len()), n, vec![op]).expect("valid table");
            let new_class = classes
                .iter()
                .all(|c| c.find_isomorphism(&alg).expect("same signature").is_none());
            if new_class {
                classes.push(alg);
            }
        }
        out.extend(classes);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_share_a_signature() {
        let algs = all();
        assert_eq!(algs.len(), 7);
        for a in &algs {
            assert!(a.same_signature(&algs[0]));
            assert_eq!(by_name(a.name()).as_ref(), Some(a));
        }
    }

    #[test]
    fn enumeration_counts() {
        // Size 1: trivial. Size 2: both commutative idempotent tables are semilattices.
        assert_eq!(commutative_idempotent_groupoids(2).len(), 2);
        // Oracle for size 3: dedupe the 27 tables by applying all 6 permutations directly.
        let perms: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut canon = std::collections::BTreeSet::new();
        for code in 0..27usize {
            let mut t = [[0usize; 3]; 3];
            for (a, row) in t.iter_mut().enumerate() {
                row[a] = a;
            }
            let vals = [code % 3, code / 3 % 3, code / 9];
            for (i, (a, b)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
                t[a][b] = vals[i];
                t[b][a] = vals[i];
            }
            let best = perms
                .iter()
                .map(|p| {
                    let mut u = [[0usize; 3]; 3];
                    for a in 0..3 {
                        for b in 0..3 {
                            u[p[a]][p[b]] = p[t[a][b]];
                        }
                    }
                    u
                })
                .min()
                .unwrap();
            canon.insert(best);
        }
        let size3 = commutative_idempotent_groupoids(3).into_iter().filter(|a| a.size() == 3).count();
        assert_eq!(size3, canon.len());
    }
}
