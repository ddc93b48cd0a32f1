//! Fourier-Motzkin refutation of conjunctions of linear atoms.
//!
//! Works over the rationals. The only integer reasoning is the strict
//! inequality tightening already performed when atoms are built, so `Unsat`
//! is sound over the integers while `MaybeSat` may be a rational-only model.

use std::collections::{BTreeMap, BTreeSet};

use super::linear::{LinearAtom, Rel};

/// Maximum number of `≠` literals split into two branches each.
pub const MAX_DISEQ_SPLITS: usize = 12;
const MAX_CONSTRAINTS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Refutation {
    Unsat,
    MaybeSat,
}

/// `Σ coeffs·v + constant ≤ 0` over variable indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Ineq {
    coeffs: BTreeMap<usize, i128>,
    constant: i128,
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Ineq {
    fn normalized(mut self) -> Self {
        let g = self.coeffs.values().fold(self.constant, |acc, c| gcd(acc, *c));
        if g > 1 {
            for c in self.coeffs.values_mut() {
                *c /= g;
            }
            self.constant /= g;
        }
        self
    }

    fn negated_plus_one(&self) -> Ineq {
        Ineq { coeffs: self.coeffs.iter().map(|(v, c)| (*v, -c)).collect(), constant: -self.constant + 1 }
    }
}

struct Indexer<'a> {
    ids: BTreeMap<&'a str, usize>,
}

impl<'a> Indexer<'a> {
    fn ineq(&mut self, atom: &'a LinearAtom) -> Ineq {
        let mut coeffs = BTreeMap::new();
        for (v, c) in atom.expr().terms() {
            let n = self.ids.len();
            let id = *self.ids.entry(v).or_insert(n);
            coeffs.insert(id, c as i128);
        }
        Ineq { coeffs, constant: atom.expr().get_constant() as i128 }
    }
}

/// Decides whether the conjunction of `atoms` is unsatisfiable.
pub fn refute_atoms<'a>(atoms: impl IntoIterator<Item = &'a LinearAtom>) -> Refutation {
    let mut idx = Indexer { ids: BTreeMap::new() };
    let mut base = Vec::new();
    let mut diseqs = Vec::new();
    for atom in atoms {
        let q = idx.ineq(atom);
        match atom.rel() {
            Rel::Le => base.push(q),
            Rel::Eq => {
                base.push(q.clone());
                base.push(Ineq { coeffs: q.coeffs.iter().map(|(v, c)| (*v, -c)).collect(), constant: -q.constant });
            }
            Rel::Ne => diseqs.push(q),
        }
    }
    if fourier_motzkin(base.clone()) == Refutation::Unsat {
        return Refutation::Unsat;
    }
    if diseqs.is_empty() {
        return Refutation::MaybeSat;
    }
    if diseqs.len() > MAX_DISEQ_SPLITS {
        return Refutation::MaybeSat;
    }
    split(&mut base, &diseqs)
}

// e ≠ 0  ⇔  e + 1 ≤ 0  ∨  -e + 1 ≤ 0
fn split(base: &mut Vec<Ineq>, diseqs: &[Ineq]) -> Refutation {
    let Some((first, rest)) = diseqs.split_first() else {
        return fourier_motzkin(base.clone());
    };
    let below = Ineq { coeffs: first.coeffs.clone(), constant: first.constant + 1 };
    let above = first.negated_plus_one();
    for branch in [below, above] {
        base.push(branch);
        let r = split(base, rest);
        base.pop();
        if r == Refutation::MaybeSat {
            return Refutation::MaybeSat;
        }
    }
    Refutation::Unsat
}

fn fourier_motzkin(initial: Vec<Ineq>) -> Refutation {
    let mut set: BTreeSet<Ineq> = BTreeSet::new();
    for q in initial {
        match classify(q) {
            Some(Ok(q)) => {
                set.insert(q);
            }
            Some(Err(())) => return Refutation::Unsat,
            None => {}
        }
    }
    loop {
        let mut counts: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        for q in &set {
            for (v, c) in &q.coeffs {
                let e = counts.entry(*v).or_default();
                if *c > 0 {
                    e.0 += 1;
                } else {
                    e.1 += 1;
                }
            }
        }
        let Some((&var, _)) = counts.iter().min_by_key(|(_, (p, n))| (p * n) as i64 - (*p as i64) - (*n as i64)) else {
            return Refutation::MaybeSat;
        };
        let (pos, rest): (Vec<Ineq>, Vec<Ineq>) =
            set.into_iter().partition(|q| q.coeffs.get(&var).is_some_and(|c| *c > 0));
        let (neg, mut keep): (Vec<Ineq>, Vec<Ineq>) = rest.into_iter().partition(|q| q.coeffs.contains_key(&var));
        for p in &pos {
            for n in &neg {
                let a = p.coeffs[&var];
                let b = -n.coeffs[&var];
                let Some(combined) = combine(p, b, n, a) else {
                    return Refutation::MaybeSat;
                };
                match classify(combined) {
                    Some(Ok(q)) => keep.push(q),
                    Some(Err(())) => return Refutation::Unsat,
                    None => {}
                }
            }
        }
        set = keep.into_iter().collect();
        if set.len() > MAX_CONSTRAINTS {
            return Refutation::MaybeSat;
        }
    }
}

// k1·p + k2·n, checked.
fn combine(p: &Ineq, k1: i128, n: &Ineq, k2: i128) -> Option<Ineq> {
    let mut coeffs = BTreeMap::new();
    for (v, c) in &p.coeffs {
        coeffs.insert(*v, c.checked_mul(k1)?);
    }
    for (v, c) in &n.coeffs {
        let add = c.checked_mul(k2)?;
        let e = coeffs.entry(*v).or_insert(0i128);
        *e = e.checked_add(add)?;
    }
    coeffs.retain(|_, c| *c != 0);
    let constant = p.constant.checked_mul(k1)?.checked_add(n.constant.checked_mul(k2)?)?;
    Some(Ineq { coeffs, constant })
}

// None: trivially true; Err: trivially false.
fn classify(q: Ineq) -> Option<Result<Ineq, ()>> {
    if q.coeffs.is_empty() {
        if q.constant > 0 {
            Some(Err(()))
        } else {
            None
        }
    } else {
        Some(Ok(q.normalized()))
    }
}
