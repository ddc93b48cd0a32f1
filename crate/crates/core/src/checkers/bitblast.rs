//! Tseitin encoding of an adherence checker: the adder netlist, one
//! two's-complement circuit per constraint atom, and the error net.

use std::collections::BTreeMap;

use super::cnf::CnfFormula;
use super::{CheckError, SideRange};
use crate::adders::{AdderModel, Gate};
use crate::logic::{Conjunction, LinearAtom, Rel};
use crate::tolerance::{MappedConstraint, X, Y, Z};

/// Widest word used for atom arithmetic.
pub const MAX_ATOM_WIDTH: u32 = 120;

pub(crate) struct Circuit {
    pub cnf: CnfFormula,
    tru: i32,
}

type Word = Vec<i32>;

impl Circuit {
    pub fn new() -> Circuit {
        let mut cnf = CnfFormula::default();
        let tru = cnf.new_var();
        cnf.add_clause(vec![tru]);
        Circuit { cnf, tru }
    }

    pub fn constant(&self, b: bool) -> i32 {
        if b {
            self.tru
        } else {
            -self.tru
        }
    }

    pub fn fresh(&mut self) -> i32 {
        self.cnf.new_var()
    }

    pub fn and(&mut self, a: i32, b: i32) -> i32 {
        let (t, f) = (self.tru, -self.tru);
        if a == f || b == f || a == -b {
            return f;
        }
        if a == t || a == b {
            return b;
        }
        if b == t {
            return a;
        }
        let v = self.fresh();
        self.cnf.add_clause(vec![-v, a]);
        self.cnf.add_clause(vec![-v, b]);
        self.cnf.add_clause(vec![v, -a, -b]);
        v
    }

    pub fn or(&mut self, a: i32, b: i32) -> i32 {
        -self.and(-a, -b)
    }

    pub fn xor(&mut self, a: i32, b: i32) -> i32 {
        let t = self.tru;
        if a == t || a == -t {
            return if a == t { -b } else { b };
        }
        if b == t || b == -t {
            return if b == t { -a } else { a };
        }
        if a == b {
            return -t;
        }
        if a == -b {
            return t;
        }
        let v = self.fresh();
        self.cnf.add_clause(vec![-v, a, b]);
        self.cnf.add_clause(vec![-v, -a, -b]);
        self.cnf.add_clause(vec![v, -a, b]);
        self.cnf.add_clause(vec![v, a, -b]);
        v
    }

    pub fn and_all(&mut self, xs: impl IntoIterator<Item = i32>) -> i32 {
        let mut acc = self.tru;
        for x in xs {
            acc = self.and(acc, x);
        }
        acc
    }

    pub fn or_all(&mut self, xs: impl IntoIterator<Item = i32>) -> i32 {
        let mut acc = -self.tru;
        for x in xs {
            acc = self.or(acc, x);
        }
        acc
    }

    fn const_word(&self, c: i128, w: u32) -> Word {
        (0..w).map(|i| self.constant((c >> i.min(127)) & 1 == 1)).collect()
    }

    fn add(&mut self, a: &[i32], b: &[i32]) -> Word {
        let mut carry = self.constant(false);
        let mut out = Vec::with_capacity(a.len());
        for (&p, &q) in a.iter().zip(b) {
            let pq = self.xor(p, q);
            out.push(self.xor(pq, carry));
            let g = self.and(p, q);
            let c = self.and(carry, pq);
            carry = self.or(g, c);
        }
        out
    }

    fn negate(&mut self, a: &[i32]) -> Word {
        let inv: Word = a.iter().map(|l| -l).collect();
        let one = self.const_word(1, a.len() as u32);
        self.add(&inv, &one)
    }

    fn scale(&mut self, a: &[i32], c: i64) -> Word {
        let w = a.len();
        let mut acc = self.const_word(0, w as u32);
        let k = c.unsigned_abs();
        for bit in 0..64 {
            if (k >> bit) & 1 == 1 && bit < w {
                let shifted: Word = (0..w).map(|i| if i < bit { self.constant(false) } else { a[i - bit] }).collect();
                acc = self.add(&acc, &shifted);
            }
        }
        if c < 0 {
            self.negate(&acc)
        } else {
            acc
        }
    }

    fn extend(&self, a: &[i32], w: u32, signed: bool) -> Word {
        let fill = if signed { *a.last().expect("nonempty word") } else { self.constant(false) };
        (0..w as usize).map(|i| if i < a.len() { a[i] } else { fill }).collect()
    }

    /// Nets for named inputs, each with its signedness.
    fn atom(
        &mut self,
        a: &LinearAtom,
        vars: &BTreeMap<String, (Word, bool)>,
        ranges: &BTreeMap<String, SideRange>,
    ) -> Result<i32, CheckError> {
        let e = a.expr();
        let mut bound: u128 = e.get_constant().unsigned_abs() as u128;
        for (v, c) in e.terms() {
            let r = ranges.get(v).ok_or_else(|| CheckError::UnboundVariable(v.to_string()))?;
            let m = r.lo.unsigned_abs().max(r.hi.unsigned_abs());
            bound = bound.saturating_add((c.unsigned_abs() as u128).saturating_mul(m));
        }
        let w = 129 - (bound.saturating_add(1)).leading_zeros();
        if w > MAX_ATOM_WIDTH {
            return Err(CheckError::TooWide(a.to_string()));
        }
        let mut acc = self.const_word(e.get_constant() as i128, w);
        for (v, c) in e.terms() {
            let (bits, signed) = &vars[v];
            let ext = self.extend(bits, w, *signed);
            let t = self.scale(&ext, c);
            acc = self.add(&acc, &t);
        }
        Ok(match a.rel() {
            Rel::Le => {
                // e <= 0  iff  e - 1 < 0
                let m1 = self.const_word(-1, w);
                let d = self.add(&acc, &m1);
                *d.last().expect("nonempty word")
            }
            Rel::Eq => {
                let any = self.or_all(acc);
                -any
            }
            Rel::Ne => self.or_all(acc),
        })
    }

    fn conjunction(
        &mut self,
        c: &Conjunction,
        vars: &BTreeMap<String, (Word, bool)>,
        ranges: &BTreeMap<String, SideRange>,
    ) -> Result<i32, CheckError> {
        match c {
            Conjunction::Bottom => Ok(self.constant(false)),
            Conjunction::And(_) => {
                let mut nets = Vec::new();
                for l in c.literals() {
                    nets.push(self.atom(l, vars, ranges)?);
                }
                Ok(self.and_all(nets))
            }
        }
    }

    fn netlist(&mut self, m: &AdderModel, x: &[i32], y: &[i32]) -> Word {
        let nl = m.to_netlist();
        let mut net = Vec::with_capacity(nl.gates.len());
        for g in &nl.gates {
            let v = match *g {
                Gate::Input { which: 0, bit } => x[bit as usize],
                Gate::Input { bit, .. } => y[bit as usize],
                Gate::Const(c) => self.constant(c),
                Gate::And(a, b) => self.and(net[a], net[b]),
                Gate::Or(a, b) => self.or(net[a], net[b]),
                Gate::Xor(a, b) => self.xor(net[a], net[b]),
                Gate::Not(a) => -net[a],
            };
            net.push(v);
        }
        nl.outputs.iter().map(|&o| net[o]).collect()
    }
}

/// Number of two's-complement bits holding every value of `r`.
pub fn signed_bits(r: SideRange) -> u32 {
    let need = |v: i128| if v < 0 { 129 - (!v).leading_zeros() } else { 129 - v.leading_zeros() };
    need(r.lo).max(need(r.hi)).max(1)
}

/// CNF that is satisfiable iff some inputs and side values make the error
/// net true. Nets `x`, `y`, `z`, `error` and `side:<name>` are annotated.
pub fn bitblast_with(
    m: &AdderModel,
    mc: &MappedConstraint,
    sides: &BTreeMap<String, SideRange>,
) -> Result<CnfFormula, CheckError> {
    let n = m.width;
    let mut c = Circuit::new();
    let x: Word = (0..n).map(|_| c.fresh()).collect();
    let y: Word = (0..n).map(|_| c.fresh()).collect();
    let z = c.netlist(m, &x, &y);
    let mut vars: BTreeMap<String, (Word, bool)> = BTreeMap::new();
    let mut ranges: BTreeMap<String, SideRange> = BTreeMap::new();
    let top = |bits: u32| (1i128 << bits) - 1;
    vars.insert(X.into(), (x.clone(), false));
    vars.insert(Y.into(), (y.clone(), false));
    vars.insert(Z.into(), (z.clone(), false));
    ranges.insert(X.into(), SideRange { lo: 0, hi: top(n) });
    ranges.insert(Y.into(), SideRange { lo: 0, hi: top(n) });
    ranges.insert(Z.into(), SideRange { lo: 0, hi: top(n + 1) });
    for name in mc.side_vars() {
        let r = sides.get(name).copied().unwrap_or_else(|| SideRange::machine(n));
        let bits: Word = (0..signed_bits(r)).map(|_| c.fresh()).collect();
        c.cnf.nets.insert(format!("side:{}", name), bits.clone());
        vars.insert(name.clone(), (bits, true));
        ranges.insert(name.clone(), SideRange::hull_of_bits(signed_bits(r)));
    }
    let mut bad = Vec::new();
    for p in &mc.pairs {
        let pre = c.conjunction(&p.pre, &vars, &ranges)?;
        let post = c.conjunction(&p.post, &vars, &ranges)?;
        bad.push(c.and(pre, -post));
    }
    let error = c.or_all(bad);
    c.cnf.add_clause(vec![error]);
    c.cnf.nets.insert(X.into(), x);
    c.cnf.nets.insert(Y.into(), y);
    c.cnf.nets.insert(Z.into(), z);
    c.cnf.nets.insert("error".into(), vec![error]);
    Ok(c.cnf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checkers::sat::sat_solve;

    #[test]
    fn signed_widths() {
        assert_eq!(signed_bits(SideRange { lo: 0, hi: 0 }), 1);
        assert_eq!(signed_bits(SideRange { lo: -1, hi: 0 }), 1);
        assert_eq!(signed_bits(SideRange { lo: 0, hi: 1 }), 2);
        assert_eq!(signed_bits(SideRange { lo: -128, hi: 127 }), 8);
        assert_eq!(signed_bits(SideRange { lo: -129, hi: 0 }), 9);
    }

    #[test]
    fn word_arithmetic_matches_integers() {
        for a in -8i128..8 {
            for k in [-3i64, -1, 1, 2, 5] {
                let mut c = Circuit::new();
                let w = c.const_word(a, 4);
                let ext = c.extend(&w, 10, true);
                let s = c.scale(&ext, k);
                let model = vec![true; c.cnf.num_vars as usize + 1];
                let mut val = 0i128;
                for (i, &l) in s.iter().enumerate() {
                    let bit = model[l.unsigned_abs() as usize] == (l > 0);
                    val |= (bit as i128) << i;
                }
                if val >= 1 << 9 {
                    val -= 1 << 10;
                }
                assert_eq!(val, a * k as i128);
                assert!(sat_solve(&c.cnf).is_sat());
            }
        }
    }
}
