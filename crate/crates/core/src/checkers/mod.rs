//! Adherence of an adder to mapped tolerance constraints, decided by
//! enumeration over the pre-narrowed input domain or by bit-blasting into
//! CNF for the built-in SAT solver.

mod bitblast;
mod cnf;
mod hdl;
mod sat;

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::adders::{AdderError, AdderModel};
use crate::logic::{refute, CmpOp, Conjunction, LinExpr, LinearAtom, Refutation, Rel};
use crate::tolerance::{MappedConstraint, MappedPair, X, Y, Z};

pub use bitblast::{bitblast_with, signed_bits, MAX_ATOM_WIDTH};
pub use cnf::{export_dimacs, import_dimacs, CnfFormula};
pub use hdl::{checker_hdl, emit_checker_hdl};
pub use sat::{sat_solve, SatResult};

pub const DEFAULT_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CheckError {
    #[error("no constraints to check")]
    NoConstraints,
    #[error(transparent)]
    Adder(#[from] AdderError),
    #[error("witness does not violate the constraint: {0}")]
    InvalidWitness(String),
    #[error("variable `{0}` has no range")]
    UnboundVariable(String),
    #[error("atom `{0}` needs more than the supported word width")]
    TooWide(String),
    #[error("DIMACS line {line}: {msg}")]
    Dimacs { line: usize, msg: String },
}

/// Closed integer interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SideRange {
    pub lo: i128,
    pub hi: i128,
}

impl SideRange {
    /// Default for side variables the precondition leaves unbounded:
    /// `width + 2` bits, two's complement.
    pub fn machine(width: u32) -> SideRange {
        Self::hull_of_bits(width + 2)
    }

    pub fn hull_of_bits(bits: u32) -> SideRange {
        SideRange { lo: -(1i128 << (bits - 1)), hi: (1i128 << (bits - 1)) - 1 }
    }

    fn size(&self) -> u128 {
        (self.hi - self.lo) as u128 + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Engine {
    #[default]
    Auto,
    Exhaustive,
    Sat,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Auto => "auto",
            Engine::Exhaustive => "exhaustive",
            Engine::Sat => "sat",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOptions {
    /// Largest candidate domain the enumeration engine accepts.
    pub budget: u64,
    /// Explicit ranges for side variables, added to every precondition.
    pub side_ranges: BTreeMap<String, SideRange>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { budget: DEFAULT_BUDGET, side_ranges: BTreeMap::new() }
    }
}

/// Inputs on which an adder breaks a constraint. Only built through
/// [`Witness::new`], which re-evaluates the adder and the constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    x: u64,
    y: u64,
    z: u64,
    side: BTreeMap<String, i128>,
    pair: usize,
}

impl Witness {
    pub fn new(
        m: &AdderModel,
        mc: &MappedConstraint,
        x: u64,
        y: u64,
        side: BTreeMap<String, i128>,
    ) -> Result<Witness, CheckError> {
        let z = m.evaluate(x, y)?;
        let env = |v: &str| match v {
            _ if v == X => Some(x as i128),
            _ if v == Y => Some(y as i128),
            _ if v == Z => Some(z as i128),
            _ => side.get(v).copied(),
        };
        let pair = mc
            .pairs
            .iter()
            .position(|p| p.pre.holds(env) == Some(true) && p.post.holds(env) == Some(false))
            .ok_or_else(|| CheckError::InvalidWitness(format!("x={} y={} z={} side={:?}", x, y, z, side)))?;
        Ok(Witness { x, y, z, side, pair })
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn y(&self) -> u64 {
        self.y
    }

    /// The adder's output on `(x, y)`.
    pub fn z(&self) -> u64 {
        self.z
    }

    pub fn side(&self) -> &BTreeMap<String, i128> {
        &self.side
    }

    /// Index of the first pair whose pre holds and post fails.
    pub fn pair(&self) -> usize {
        self.pair
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "x": self.x, "y": self.y, "z": self.z, "side": self.side, "pair": self.pair })
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x={} y={} z={}", self.x, self.y, self.z)?;
        for (k, v) in &self.side {
            write!(f, " {}={}", k, v)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated { witness: Witness },
    Unknown { reason: String },
}

impl Verdict {
    fn unknown(reason: &str) -> Verdict {
        Verdict::Unknown { reason: reason.to_string() }
    }

    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn is_violated(&self) -> bool {
        matches!(self, Verdict::Violated { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated { .. } => "violated",
            Verdict::Unknown { .. } => "unknown",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => write!(f, "holds"),
            Verdict::Violated { witness } => write!(f, "violated ({})", witness),
            Verdict::Unknown { reason } => write!(f, "unknown ({})", reason),
        }
    }
}

type Bounds = BTreeMap<String, (Option<i128>, Option<i128>)>;

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    -div_floor(-a, b)
}

/// Tightens `bounds` with `e <= 0`. Returns whether anything changed.
fn tighten_le(e: &LinExpr, bounds: &mut Bounds) -> bool {
    let mut changed = false;
    let terms: Vec<(String, i128)> = e.terms().map(|(v, c)| (v.to_string(), c as i128)).collect();
    for (j, (vj, cj)) in terms.iter().enumerate() {
        // cj * vj <= -k - sum_{i != j} min(ci * vi)
        let mut rest = Some(-(e.get_constant() as i128));
        for (i, (vi, ci)) in terms.iter().enumerate() {
            if i == j {
                continue;
            }
            let (lo, hi) = bounds.get(vi).copied().unwrap_or((None, None));
            let min = if *ci > 0 { lo.and_then(|l| l.checked_mul(*ci)) } else { hi.and_then(|h| h.checked_mul(*ci)) };
            rest = match (rest, min) {
                (Some(r), Some(m)) => r.checked_sub(m),
                _ => None,
            };
        }
        let Some(rhs) = rest else { continue };
        let entry = bounds.entry(vj.clone()).or_insert((None, None));
        if *cj > 0 {
            let ub = div_floor(rhs, *cj);
            if entry.1.is_none_or(|h| ub < h) {
                entry.1 = Some(ub);
                changed = true;
            }
        } else {
            let lb = div_ceil(rhs, *cj);
            if entry.0.is_none_or(|l| lb > l) {
                entry.0 = Some(lb);
                changed = true;
            }
        }
    }
    changed
}

/// Interval propagation over the literals of `pre`, starting from the
/// operand ranges. `None` when some interval becomes empty.
fn narrow(pre: &Conjunction, width: u32) -> Option<Bounds> {
    let max = (1i128 << width) - 1;
    let mut b: Bounds = BTreeMap::new();
    b.insert(X.into(), (Some(0), Some(max)));
    b.insert(Y.into(), (Some(0), Some(max)));
    for _ in 0..64 {
        let mut changed = false;
        for l in pre.literals() {
            match l.rel() {
                Rel::Le => changed |= tighten_le(l.expr(), &mut b),
                Rel::Eq => {
                    changed |= tighten_le(l.expr(), &mut b);
                    changed |= tighten_le(&l.expr().scale(-1), &mut b);
                }
                Rel::Ne => {}
            }
        }
        if b.values().any(|(lo, hi)| matches!((lo, hi), (Some(l), Some(h)) if l > h)) {
            return None;
        }
        if !changed {
            break;
        }
    }
    Some(b)
}

fn range_literals(name: &str, r: SideRange) -> [LinearAtom; 2] {
    let v = LinExpr::var(name);
    [
        LinearAtom::new(&v, CmpOp::Ge, &LinExpr::constant(r.lo as i64)),
        LinearAtom::new(&v, CmpOp::Le, &LinExpr::constant(r.hi as i64)),
    ]
}

/// The constraint with explicit side ranges conjoined to each precondition.
fn with_side_ranges(mc: &MappedConstraint, opts: &CheckOptions) -> MappedConstraint {
    let mut out = mc.clone();
    for p in &mut out.pairs {
        for v in mc.side_vars() {
            if let Some(r) = opts.side_ranges.get(v) {
                if p.pre.mentions(v) || p.post.mentions(v) {
                    for l in range_literals(v, *r) {
                        p.pre = p.pre.with(l);
                    }
                }
            }
        }
    }
    out
}

fn pair_vars(p: &MappedPair) -> Vec<String> {
    let mut vs: Vec<String> =
        p.pre.vars().into_iter().chain(p.post.vars()).filter(|v| v != X && v != Y && v != Z).collect();
    vs.sort();
    vs.dedup();
    vs
}

// Coefficients by slot, constant, relation.
type Row = (Vec<(usize, i128)>, i128, Rel);

struct Compiled(Vec<Row>);

impl Compiled {
    fn new(c: &Conjunction, slot: &BTreeMap<String, usize>) -> Compiled {
        Compiled(
            c.literals()
                .map(|l| {
                    let e = l.expr();
                    (e.terms().map(|(v, k)| (slot[v], k as i128)).collect(), e.get_constant() as i128, l.rel())
                })
                .collect(),
        )
    }

    fn holds(&self, env: &[i128]) -> bool {
        self.0.iter().all(|(terms, k, rel)| {
            let v = terms.iter().fold(*k, |acc, (i, c)| acc + c * env[*i]);
            match rel {
                Rel::Le => v <= 0,
                Rel::Eq => v == 0,
                Rel::Ne => v != 0,
            }
        })
    }
}

/// Enumerates every assignment satisfying each pair's precondition, after
/// interval narrowing, and evaluates the adder on it.
pub fn check_exhaustive(m: &AdderModel, mc: &MappedConstraint, opts: &CheckOptions) -> Result<Verdict, CheckError> {
    let mc_r = with_side_ranges(mc, opts);
    for p in &mc_r.pairs {
        if p.pre.is_bottom() || refute(&p.pre) == Refutation::Unsat {
            continue;
        }
        let Some(bounds) = narrow(&p.pre, m.width) else { continue };
        let sides = pair_vars(p);
        let mut ranges = Vec::new();
        for v in [X, Y].iter().map(|s| s.to_string()).chain(sides.iter().cloned()) {
            match bounds.get(&v).copied().unwrap_or((None, None)) {
                (Some(lo), Some(hi)) => ranges.push(SideRange { lo, hi }),
                _ => return Ok(Verdict::unknown("unbounded")),
            }
        }
        let total = ranges.iter().try_fold(1u128, |acc, r| acc.checked_mul(r.size()));
        if total.is_none_or(|t| t > opts.budget as u128) {
            return Ok(Verdict::unknown("budget"));
        }
        let mut slot: BTreeMap<String, usize> = BTreeMap::new();
        slot.insert(X.into(), 0);
        slot.insert(Y.into(), 1);
        slot.insert(Z.into(), 2);
        for (i, v) in sides.iter().enumerate() {
            slot.insert(v.clone(), 3 + i);
        }
        let pre = Compiled::new(&p.pre, &slot);
        let post = Compiled::new(&p.post, &slot);
        let (rx, ry, rs) = (ranges[0], ranges[1], &ranges[2..]);
        let found = (rx.lo as i64..=rx.hi as i64).into_par_iter().find_map_first(|x| {
            let mut env = vec![0i128; 3 + rs.len()];
            env[0] = x as i128;
            for y in ry.lo..=ry.hi {
                env[1] = y;
                for (i, r) in rs.iter().enumerate() {
                    env[3 + i] = r.lo;
                }
                loop {
                    if pre.holds(&env) {
                        env[2] = m.evaluate(x as u64, y as u64).expect("operands in range") as i128;
                        if !post.holds(&env) {
                            return Some(env.clone());
                        }
                    }
                    // Odometer over the side variables.
                    let mut i = 0;
                    while i < rs.len() {
                        if env[3 + i] < rs[i].hi {
                            env[3 + i] += 1;
                            break;
                        }
                        env[3 + i] = rs[i].lo;
                        i += 1;
                    }
                    if i == rs.len() {
                        break;
                    }
                }
            }
            None
        });
        if let Some(env) = found {
            let side = sides.iter().enumerate().map(|(i, v)| (v.clone(), env[3 + i])).collect();
            let witness = Witness::new(m, mc, env[0] as u64, env[1] as u64, side)?;
            return Ok(Verdict::Violated { witness });
        }
    }
    Ok(Verdict::Holds)
}

/// Ranges used to size side-variable words: the hull of the intervals the
/// preconditions imply, or the machine default where one is unbounded.
pub fn side_ranges(mc: &MappedConstraint, width: u32, opts: &CheckOptions) -> BTreeMap<String, SideRange> {
    let mc = with_side_ranges(mc, opts);
    let mut out = BTreeMap::new();
    for v in mc.side_vars() {
        let mut hull: Option<SideRange> = None;
        let mut bounded = true;
        for p in mc.pairs.iter().filter(|p| p.pre.mentions(v) || p.post.mentions(v)) {
            let Some(b) = narrow(&p.pre, width) else { continue };
            match b.get(v).copied().unwrap_or((None, None)) {
                (Some(lo), Some(hi)) => {
                    hull = Some(match hull {
                        Some(h) => SideRange { lo: h.lo.min(lo), hi: h.hi.max(hi) },
                        None => SideRange { lo, hi },
                    })
                }
                _ => bounded = false,
            }
        }
        let r = match hull {
            Some(h) if bounded => h,
            _ => SideRange::machine(width),
        };
        out.insert(v.clone(), r);
    }
    out
}

pub fn bitblast(m: &AdderModel, mc: &MappedConstraint, opts: &CheckOptions) -> Result<CnfFormula, CheckError> {
    let sides = side_ranges(mc, m.width, opts);
    bitblast_with(m, &with_side_ranges(mc, opts), &sides)
}

fn signed_value(raw: u128, bits: u32) -> i128 {
    if bits < 128 && raw >> (bits - 1) & 1 == 1 {
        raw as i128 - (1i128 << bits)
    } else {
        raw as i128
    }
}

/// Bit-blasts and solves; a model becomes a validated witness.
pub fn check_sat(m: &AdderModel, mc: &MappedConstraint, opts: &CheckOptions) -> Result<Verdict, CheckError> {
    let f = bitblast(m, mc, opts)?;
    match sat_solve(&f) {
        SatResult::Unsat => Ok(Verdict::Holds),
        SatResult::Sat(model) => {
            let get = |net: &str| f.decode(net, &model).expect("annotated net");
            let side = mc
                .side_vars()
                .iter()
                .map(|v| {
                    let net = format!("side:{}", v);
                    let bits = f.nets[&net].len() as u32;
                    (v.clone(), signed_value(get(&net), bits))
                })
                .collect();
            let witness = Witness::new(m, mc, get(X) as u64, get(Y) as u64, side)?;
            Ok(Verdict::Violated { witness })
        }
    }
}

/// One constraint with one engine; `Auto` falls back to SAT when
/// enumeration cannot decide.
pub fn check_constraint(
    m: &AdderModel,
    mc: &MappedConstraint,
    engine: Engine,
    opts: &CheckOptions,
) -> Result<Verdict, CheckError> {
    match engine {
        Engine::Exhaustive => check_exhaustive(m, mc, opts),
        Engine::Sat => check_sat(m, mc, opts),
        Engine::Auto => match check_exhaustive(m, mc, opts)? {
            Verdict::Unknown { reason } => {
                log::debug!("enumeration gave up ({}), using SAT", reason);
                check_sat(m, mc, opts)
            }
            v => Ok(v),
        },
    }
}

/// Whether the adder, at `width` bits, adheres to every constraint. The
/// first violation is returned; otherwise any Unknown wins over Holds.
pub fn check_adherence(
    m: &AdderModel,
    constraints: &[MappedConstraint],
    engine: Engine,
    width: u32,
    opts: &CheckOptions,
) -> Result<Verdict, CheckError> {
    if constraints.is_empty() {
        return Err(CheckError::NoConstraints);
    }
    let m = m.with_width(width)?;
    let mut unknown = None;
    for mc in constraints {
        match check_constraint(&m, mc, engine, opts)? {
            Verdict::Holds => {}
            v @ Verdict::Violated { .. } => return Ok(v),
            v @ Verdict::Unknown { .. } => {
                unknown.get_or_insert(v);
            }
        }
    }
    Ok(unknown.unwrap_or(Verdict::Holds))
}

/// A JSON-lines report record.
pub fn report_line(constraint: &str, adder: &str, engine: Engine, v: &Verdict) -> String {
    let mut obj = json!({
        "constraint": constraint,
        "adder": adder,
        "engine": engine.name(),
        "verdict": v.label(),
    });
    match v {
        Verdict::Violated { witness } => obj["witness"] = witness.to_json(),
        Verdict::Unknown { reason } => obj["reason"] = json!(reason),
        Verdict::Holds => {}
    }
    obj.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adders::{preset, presets};
    use crate::frontend::BinOp;
    use crate::logic::{Literal, Operand};
    use crate::tolerance::Signature;

    fn v(n: &str) -> LinExpr {
        LinExpr::var(n)
    }
    fn k(c: i64) -> LinExpr {
        LinExpr::constant(c)
    }
    fn lit(l: LinExpr, op: CmpOp, r: LinExpr) -> Literal {
        LinearAtom::new(&l, op, &r)
    }

    fn constraint(rhs: Operand, pre: Vec<Literal>, post: Vec<Literal>, side: &[&str]) -> MappedConstraint {
        MappedConstraint {
            signature: Signature {
                statement: format!("t := a + {}", rhs),
                op: BinOp::Add,
                target: "t".into(),
                lhs: Operand::Var("a".into()),
                rhs,
                side: side.iter().map(|s| s.to_string()).collect(),
            },
            pairs: vec![MappedPair { pre: Conjunction::from_literals(pre), post: Conjunction::from_literals(post) }],
        }
    }

    fn array() -> MappedConstraint {
        constraint(
            Operand::Const(10),
            vec![lit(k(0), CmpOp::Le, v(X)), lit(v(X), CmpOp::Le, k(989)), lit(v(Y), CmpOp::Eq, k(10))],
            vec![lit(k(0), CmpOp::Le, v(Z)), lit(v(Z), CmpOp::Le, k(999))],
            &[],
        )
    }

    fn add_one() -> MappedConstraint {
        constraint(
            Operand::Const(1),
            vec![lit(k(1), CmpOp::Le, v(X)), lit(v(Y), CmpOp::Eq, k(1))],
            vec![lit(v(Z), CmpOp::Ne, k(0))],
            &[],
        )
    }

    #[test]
    fn narrowing_array_domain() {
        let b = narrow(&array().pairs[0].pre, 16).unwrap();
        assert_eq!(b[X], (Some(0), Some(989)));
        assert_eq!(b[Y], (Some(10), Some(10)));
        let empty = Conjunction::from_literals([lit(v(X), CmpOp::Ge, k(1)), lit(v(X), CmpOp::Le, k(0))]);
        assert!(narrow(&empty, 8).is_none() || refute(&empty) == Refutation::Unsat);
    }

    #[test]
    fn rounding_helpers() {
        assert_eq!(div_floor(-7, 2), -4);
        assert_eq!(div_floor(7, 2), 3);
        assert_eq!(div_ceil(-7, 2), -3);
        assert_eq!(div_ceil(7, -2), -3);
    }

    #[test]
    fn array_holds_on_every_preset_both_engines() {
        let o = CheckOptions::default();
        for m in presets() {
            for e in [Engine::Exhaustive, Engine::Sat] {
                assert_eq!(check_adherence(&m, &[array()], e, 16, &o).unwrap(), Verdict::Holds, "{} {:?}", m.name, e);
            }
        }
    }

    #[test]
    fn add_one_violated_by_approximations() {
        let o = CheckOptions::default();
        let small = AdderModel::slice_sum(8, 2, 2).unwrap();
        let Verdict::Violated { witness } = check_exhaustive(&small, &add_one(), &o).unwrap() else { panic!() };
        assert_eq!((witness.x(), witness.z()), (15, 0));
        assert!(check_exhaustive(&AdderModel::exact(8).unwrap(), &add_one(), &o).unwrap().holds());
        for m in presets() {
            let v = check_adherence(&m, &[add_one()], Engine::Sat, 16, &o).unwrap();
            assert_eq!(v.holds(), m.is_exact(), "{}", m.name);
            if let Verdict::Violated { witness } = v {
                assert_eq!(m.evaluate(witness.x(), witness.y()).unwrap(), 0);
            }
        }
    }

    #[test]
    fn vacuous_precondition() {
        let mc = constraint(
            Operand::Var("b".into()),
            vec![lit(v(X), CmpOp::Ge, k(1)), lit(v(X), CmpOp::Le, k(0))],
            vec![lit(v(Z), CmpOp::Eq, k(12345))],
            &[],
        );
        let m = preset("aca_ii_16_4").unwrap();
        for e in [Engine::Exhaustive, Engine::Sat, Engine::Auto] {
            assert!(check_constraint(&m, &mc, e, &CheckOptions::default()).unwrap().holds());
        }
    }

    #[test]
    fn unbounded_side_variable() {
        // n - x >= 1 bounds n only from below.
        let mc = constraint(
            Operand::Const(1),
            vec![lit(v("n").sub(&v(X)), CmpOp::Ge, k(1)), lit(v(Y), CmpOp::Eq, k(1))],
            vec![lit(v(Z), CmpOp::Le, v("n"))],
            &["n"],
        );
        let m = AdderModel::exact(6).unwrap();
        let o = CheckOptions::default();
        assert_eq!(check_exhaustive(&m, &mc, &o).unwrap(), Verdict::unknown("unbounded"));
        assert!(check_constraint(&m, &mc, Engine::Auto, &o).unwrap().holds());
        let approx = AdderModel::generate_only(6, 2).unwrap();
        let v = check_constraint(&approx, &mc, Engine::Auto, &o).unwrap();
        assert!(v.holds(), "{}", v);
        let mut ranged = o.clone();
        ranged.side_ranges.insert("n".into(), SideRange { lo: -100, hi: 100 });
        assert!(check_exhaustive(&m, &mc, &ranged).unwrap().holds());
    }

    #[test]
    fn budget_exceeded() {
        let o = CheckOptions { budget: 100, ..Default::default() };
        assert_eq!(check_exhaustive(&preset("rca_16").unwrap(), &add_one(), &o).unwrap(), Verdict::unknown("budget"));
    }

    #[test]
    fn witness_is_validated() {
        let m = preset("rca_16").unwrap();
        assert!(Witness::new(&m, &add_one(), 5, 1, BTreeMap::new()).is_err());
        let a = preset("aca_ii_16_4").unwrap();
        let w = Witness::new(&a, &add_one(), 15, 1, BTreeMap::new()).unwrap();
        assert_eq!(w.z(), 0);
        let line = report_line("add_one#1", "aca_ii_16_4", Engine::Sat, &Verdict::Violated { witness: w });
        let parsed: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(parsed["witness"]["x"], 15);
        assert_eq!(parsed["verdict"], "violated");
    }

    #[test]
    fn empty_constraint_list() {
        let m = preset("rca_16").unwrap();
        assert_eq!(
            check_adherence(&m, &[], Engine::Auto, 16, &CheckOptions::default()),
            Err(CheckError::NoConstraints)
        );
    }
}
