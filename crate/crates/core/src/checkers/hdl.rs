//! Verilog text for the tolerance-constraint checker and the top module
//! wiring it to an adder design. Only written out for external tools.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::bitblast::signed_bits;
use super::SideRange;
use crate::adders::AdderModel;
use crate::logic::{CmpOp, Conjunction, LinExpr, LinearAtom, Literal, Operand};
use crate::tolerance::{MappedConstraint, X, Y, Z};

fn gen_literals(mc: &MappedConstraint) -> Vec<Literal> {
    let s = &mc.signature;
    let mut out = Vec::new();
    if let Operand::Const(c) = s.lhs {
        out.push(LinearAtom::new(&LinExpr::var(X), CmpOp::Eq, &LinExpr::constant(c)));
    }
    if let Operand::Const(c) = s.rhs {
        out.push(LinearAtom::new(&LinExpr::var(Y), CmpOp::Eq, &LinExpr::constant(c)));
    }
    if s.lhs.as_var().is_some() && s.lhs == s.rhs {
        out.push(LinearAtom::new(&LinExpr::var(Y), CmpOp::Eq, &LinExpr::var(X)));
    }
    out
}

fn ident(name: &str) -> String {
    let mut s: String = name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' }).collect();
    if s.chars().next().is_none_or(|c| c.is_ascii_digit()) {
        s.insert(0, 'm');
    }
    s
}

struct Renderer {
    width: u32,
    signed_vars: Vec<String>,
}

impl Renderer {
    fn simple(e: &LinExpr) -> Option<String> {
        let terms: Vec<(&str, i64)> = e.terms().collect();
        match terms.as_slice() {
            [] => Some(e.get_constant().to_string()),
            [(v, 1)] if e.get_constant() == 0 && [X, Y, Z].contains(v) => Some(v.to_string()),
            _ => None,
        }
    }

    fn side(&mut self, e: &LinExpr) -> String {
        let mut parts = Vec::new();
        for (v, c) in e.terms() {
            let name = format!("{}__s", v);
            if !self.signed_vars.iter().any(|s| s == v) {
                self.signed_vars.push(v.to_string());
            }
            parts.push(if c == 1 { name } else { format!("{}*{}", c, name) });
        }
        if e.get_constant() != 0 || parts.is_empty() {
            parts.push(format!("{}'sd{}", self.width, e.get_constant()));
        }
        parts.join(" + ")
    }

    fn literal(&mut self, l: &Literal) -> String {
        let (lhs, op, rhs) = l.sides();
        match (Self::simple(&lhs), Self::simple(&rhs)) {
            (Some(a), Some(b)) => format!("({} {} {})", a, op, b),
            _ => {
                let a = self.side(&lhs);
                let b = self.side(&rhs);
                format!("({} {} {})", a, op, b)
            }
        }
    }
}

/// Verilog for the adder, `TCChecker` and `AdherenceChecker`.
pub fn checker_hdl(m: &AdderModel, mc: &MappedConstraint, sides: &BTreeMap<String, SideRange>) -> String {
    let n = m.width;
    let side_bits: Vec<(String, u32)> = mc
        .side_vars()
        .iter()
        .map(|v| (v.clone(), signed_bits(sides.get(v).copied().unwrap_or_else(|| SideRange::machine(n)))))
        .collect();
    let gens = gen_literals(mc);
    let widest = side_bits.iter().map(|(_, b)| *b).max().unwrap_or(0).max(n + 2);
    let mut r = Renderer { width: widest + 8, signed_vars: Vec::new() };

    let mut terms: Vec<String> = Vec::new();
    let mut qs: Vec<String> = Vec::new();
    let mut gen_nets: Vec<String> = Vec::new();
    let mut clauses: Vec<String> = Vec::new();
    let conj = |c: &Conjunction, skip: &[Literal], terms: &mut Vec<String>, r: &mut Renderer| -> Option<String> {
        match c {
            Conjunction::Bottom => Some("1'b0".to_string()),
            _ => {
                let mut names = Vec::new();
                for l in c.literals().filter(|l| !skip.contains(l)) {
                    terms.push(r.literal(l));
                    names.push(format!("term__{}", terms.len()));
                }
                (!names.is_empty()).then(|| format!("({})", names.join(" && ")))
            }
        }
    };
    for (i, p) in mc.pairs.iter().enumerate() {
        let (q1, q2) = (2 * i + 1, 2 * i + 2);
        let mut pre_parts = Vec::new();
        let pre = conj(&p.pre, &gens, &mut terms, &mut r);
        qs.push(format!("  assign Q__{} = {};", q1, pre.clone().unwrap_or_else(|| "1'b1".into())));
        if pre.is_some() {
            pre_parts.push(format!("Q__{}", q1));
        }
        for g in gens.iter().filter(|g| p.pre.contains(g)) {
            let net = format!("pre__gen_{}", gen_nets.len());
            gen_nets.push(format!("  assign {} = {};", net, r.literal(g)));
            pre_parts.push(net);
        }
        let post = conj(&p.post, &[], &mut terms, &mut r);
        qs.push(format!("  assign Q__{} = {};", q2, post.unwrap_or_else(|| "1'b1".into())));
        clauses.push(if pre_parts.is_empty() {
            format!("Q__{}", q2)
        } else {
            format!("( !({}) || Q__{})", pre_parts.join(" && "), q2)
        });
    }

    let mut s = m.to_netlist().to_verilog(&ident(&m.name));
    s.push('\n');
    let side_ports: String = side_bits.iter().map(|(v, _)| format!("{}, ", v)).collect();
    let _ = writeln!(s, "module TCChecker(x, y, z, {}error);", side_ports);
    let _ = writeln!(s, "  parameter Nin = {};", n);
    let _ = writeln!(s, "  parameter Nout = {};\n", n + 1);
    let _ = writeln!(s, "  input [Nin-1:0] x;");
    let _ = writeln!(s, "  input [Nin-1:0] y;");
    let _ = writeln!(s, "  input [Nout-1:0] z;");
    for (v, b) in &side_bits {
        let _ = writeln!(s, "  input signed [{}:0] {};", b - 1, v);
    }
    let _ = writeln!(s, "  output error;\n");
    for i in 1..=terms.len() {
        let _ = writeln!(s, "  wire term__{};", i);
    }
    for i in 1..=qs.len() {
        let _ = writeln!(s, "  wire Q__{};", i);
    }
    for i in 0..gen_nets.len() {
        let _ = writeln!(s, "  wire pre__gen_{};", i);
    }
    let w = r.width;
    for v in &r.signed_vars {
        let _ = writeln!(s, "  wire signed [{}:0] {}__s;", w - 1, v);
    }
    s.push('\n');
    for v in &r.signed_vars {
        let rhs = match v.as_str() {
            "x" | "y" => format!("$signed({{{{{}{{1'b0}}}}, {}}})", w - n, v),
            "z" => format!("$signed({{{{{}{{1'b0}}}}, z}})", w - n - 1),
            _ => {
                let b = side_bits.iter().find(|(s, _)| s == v).map_or(n + 2, |(_, b)| *b);
                format!("{{{{{}{{{}[{}]}}}}, {}}}", w - b, v, b - 1, v)
            }
        };
        let _ = writeln!(s, "  assign {}__s = {};", v, rhs);
    }
    for (i, t) in terms.iter().enumerate() {
        let _ = writeln!(s, "  assign term__{} = {};", i + 1, t);
    }
    for q in &qs {
        let _ = writeln!(s, "{}", q);
    }
    for g in &gen_nets {
        let _ = writeln!(s, "{}", g);
    }
    let _ = writeln!(s, "\n  assign error = !({});", clauses.join(" && "));
    s.push_str("endmodule\n\n");

    let _ = writeln!(s, "module AdherenceChecker(");
    let _ = writeln!(s, "  input [{}:0] inp1,", n - 1);
    let _ = writeln!(s, "  input [{}:0] inp2,", n - 1);
    for (v, b) in &side_bits {
        let _ = writeln!(s, "  input signed [{}:0] {},", b - 1, v);
    }
    let _ = writeln!(s, "  output errorBit);\n");
    let _ = writeln!(s, "  wire [{}:0] outp;\n", n);
    let _ = writeln!(s, "  {} add(\n    .x(inp1),\n    .y(inp2),\n    .z(outp)\n  );\n", ident(&m.name));
    let _ = writeln!(s, "  TCChecker #(.Nin({}), .Nout({})) check(", n, n + 1);
    let _ = writeln!(s, "    .x(inp1),\n    .y(inp2),\n    .z(outp),");
    for (v, _) in &side_bits {
        let _ = writeln!(s, "    .{}({}),", v, v);
    }
    let _ = writeln!(s, "    .error(errorBit)\n  );");
    s.push_str("endmodule\n");
    s
}

pub fn emit_checker_hdl(
    m: &AdderModel,
    mc: &MappedConstraint,
    sides: &BTreeMap<String, SideRange>,
    path: &Path,
) -> std::io::Result<()> {
    std::fs::write(path, checker_hdl(m, mc, sides))
}
