use std::fmt::Write as _;

use super::{AdderKind, AdderModel, SegmentMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    /// Bit `bit` of operand `x` (`which = 0`) or `y` (`which = 1`).
    Input {
        which: u8,
        bit: u32,
    },
    Const(bool),
    And(usize, usize),
    Or(usize, usize),
    Xor(usize, usize),
    Not(usize),
}

/// Combinational gate list in topological order; gate `i` only reads
/// gates with smaller indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Netlist {
    pub width: u32,
    pub gates: Vec<Gate>,
    /// `width + 1` result bits, least significant first.
    pub outputs: Vec<usize>,
}

struct Builder {
    gates: Vec<Gate>,
    zero: usize,
}

impl Builder {
    fn push(&mut self, g: Gate) -> usize {
        self.gates.push(g);
        self.gates.len() - 1
    }

    // sum = a ^ b ^ c, carry = a&b | c&(a^b)
    fn full_adder(&mut self, a: usize, b: usize, c: usize) -> (usize, usize) {
        let ab = self.push(Gate::Xor(a, b));
        let s = self.push(Gate::Xor(ab, c));
        let g = self.push(Gate::And(a, b));
        let pc = self.push(Gate::And(c, ab));
        let co = self.push(Gate::Or(g, pc));
        (s, co)
    }

    /// Ripple over bits `lo..hi` of both operands; returns sum bits and carry-out.
    fn ripple(&mut self, lo: u32, hi: u32, cin: usize, n: u32) -> (Vec<usize>, usize) {
        let mut carry = cin;
        let mut sums = Vec::new();
        for j in lo..hi {
            let (s, c) = self.full_adder(j as usize, (n + j) as usize, carry);
            sums.push(s);
            carry = c;
        }
        (sums, carry)
    }
}

impl Netlist {
    pub fn from_model(m: &AdderModel) -> Netlist {
        let n = m.width;
        let mut gates = Vec::new();
        for which in 0..2u8 {
            for bit in 0..n {
                gates.push(Gate::Input { which, bit });
            }
        }
        gates.push(Gate::Const(false));
        let zero = gates.len() - 1;
        let mut b = Builder { gates, zero };
        let mut outputs = Vec::with_capacity(n as usize + 1);
        match m.kind {
            AdderKind::ExactRipple => {
                let (sums, carry) = b.ripple(0, n, b.zero, n);
                outputs.extend(sums);
                outputs.push(carry);
            }
            AdderKind::Segmented { r, p, mode } => {
                let blocks = n / r;
                for k in 0..blocks {
                    let base = k * r;
                    let (lo, cin) = match mode {
                        SegmentMode::SliceSum => (base.saturating_sub(p), b.zero),
                        SegmentMode::GenerateOnly if k == 0 => (base, b.zero),
                        SegmentMode::GenerateOnly => {
                            let g = b.push(Gate::And((base - 1) as usize, (n + base - 1) as usize));
                            (base, g)
                        }
                    };
                    let (sums, carry) = b.ripple(lo, base + r, cin, n);
                    outputs.extend_from_slice(&sums[(base - lo) as usize..]);
                    if k + 1 == blocks {
                        outputs.push(carry);
                    }
                }
            }
        }
        Netlist { width: n, gates: b.gates, outputs }
    }

    pub fn evaluate(&self, x: u64, y: u64) -> u64 {
        let mut v = vec![false; self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            v[i] = match *g {
                Gate::Input { which: 0, bit } => (x >> bit) & 1 == 1,
                Gate::Input { bit, .. } => (y >> bit) & 1 == 1,
                Gate::Const(c) => c,
                Gate::And(a, b) => v[a] && v[b],
                Gate::Or(a, b) => v[a] || v[b],
                Gate::Xor(a, b) => v[a] ^ v[b],
                Gate::Not(a) => !v[a],
            };
        }
        self.outputs.iter().enumerate().fold(0, |acc, (i, &o)| acc | ((v[o] as u64) << i))
    }

    /// Logic gates, excluding inputs and constants.
    pub fn logic_gate_count(&self) -> usize {
        self.gates.iter().filter(|g| !matches!(g, Gate::Input { .. } | Gate::Const(_))).count()
    }

    pub fn is_topological(&self) -> bool {
        self.gates.iter().enumerate().all(|(i, g)| match *g {
            Gate::And(a, b) | Gate::Or(a, b) | Gate::Xor(a, b) => a < i && b < i,
            Gate::Not(a) => a < i,
            _ => true,
        }) && self.outputs.iter().all(|&o| o < self.gates.len())
    }

    /// Verilog-2005 module `name(x, y, z)` with `x`, `y` of `width` bits and
    /// `z` of `width + 1` bits.
    pub fn to_verilog(&self, name: &str) -> String {
        let n = self.width;
        let mut s = String::new();
        let _ = writeln!(s, "module {}(x, y, z);", name);
        let _ = writeln!(s, "  input [{}:0] x;", n - 1);
        let _ = writeln!(s, "  input [{}:0] y;", n - 1);
        let _ = writeln!(s, "  output [{}:0] z;", n);
        let net = |i: usize| match self.gates[i] {
            Gate::Input { which, bit } => format!("{}[{}]", if which == 0 { "x" } else { "y" }, bit),
            Gate::Const(c) => format!("1'b{}", c as u8),
            _ => format!("n{}", i),
        };
        for (i, g) in self.gates.iter().enumerate() {
            let rhs = match *g {
                Gate::And(a, b) => format!("{} & {}", net(a), net(b)),
                Gate::Or(a, b) => format!("{} | {}", net(a), net(b)),
                Gate::Xor(a, b) => format!("{} ^ {}", net(a), net(b)),
                Gate::Not(a) => format!("~{}", net(a)),
                _ => continue,
            };
            let _ = writeln!(s, "  wire n{};", i);
            let _ = writeln!(s, "  assign n{} = {};", i, rhs);
        }
        for (bit, &o) in self.outputs.iter().enumerate() {
            let _ = writeln!(s, "  assign z[{}] = {};", bit, net(o));
        }
        s.push_str("endmodule\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adders::presets;

    #[test]
    fn exact_four_bit_is_four_cells() {
        let m = AdderModel::exact(4).unwrap();
        let nl = m.to_netlist();
        assert_eq!(nl.logic_gate_count(), 20);
        for x in 0..16 {
            for y in 0..16 {
                assert_eq!(nl.evaluate(x, y), x + y);
            }
        }
    }

    #[test]
    fn presets_match_behaviour_on_samples() {
        for m in presets() {
            let nl = m.to_netlist();
            assert!(nl.is_topological());
            assert_eq!(nl.outputs.len(), 17);
            for (x, y) in [(30, 50), (65535, 1), (12345, 54321), (0, 0), (65535, 65535)] {
                assert_eq!(nl.evaluate(x, y), m.evaluate(x, y).unwrap(), "{} {} {}", m.name, x, y);
            }
        }
    }

    #[test]
    fn verilog_shape() {
        let v = AdderModel::exact(2).unwrap().to_netlist().to_verilog("rca_2");
        assert!(v.starts_with("module rca_2(x, y, z);"));
        assert!(v.contains("output [2:0] z;"));
        assert!(v.contains("assign z[2] = "));
        assert!(v.trim_end().ends_with("endmodule"));
    }
}
