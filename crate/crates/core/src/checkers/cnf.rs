use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::CheckError;

/// A CNF formula with DIMACS-style signed literals. `nets` records which
/// variables carry named circuit signals (bits least significant first).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: u32,
    pub clauses: Vec<Vec<i32>>,
    pub nets: BTreeMap<String, Vec<i32>>,
}

impl CnfFormula {
    pub fn new_var(&mut self) -> i32 {
        self.num_vars += 1;
        self.num_vars as i32
    }

    pub fn add_clause(&mut self, clause: Vec<i32>) {
        debug_assert!(!clause.is_empty());
        debug_assert!(clause.iter().all(|&l| l != 0 && l.unsigned_abs() <= self.num_vars));
        self.clauses.push(clause);
    }

    pub fn is_well_formed(&self) -> bool {
        self.clauses.iter().all(|c| !c.is_empty() && c.iter().all(|&l| l != 0 && l.unsigned_abs() <= self.num_vars))
    }

    /// Whether the assignment (indexed by variable, slot 0 unused) satisfies
    /// every clause.
    pub fn satisfied_by(&self, model: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&l| model[l.unsigned_abs() as usize] == (l > 0)))
    }

    /// Value of a named net under a model, as an unsigned bit vector.
    pub fn decode(&self, net: &str, model: &[bool]) -> Option<u128> {
        let bits = self.nets.get(net)?;
        Some(bits.iter().enumerate().fold(0u128, |acc, (i, &l)| {
            let v = model[l.unsigned_abs() as usize] == (l > 0);
            acc | ((v as u128) << i)
        }))
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = String::new();
        for (name, bits) in &self.nets {
            let lits: Vec<String> = bits.iter().map(i32::to_string).collect();
            let _ = writeln!(s, "c net {} {}", name, lits.join(" "));
        }
        let _ = writeln!(s, "p cnf {} {}", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let _ = write!(s, "{} ", l);
            }
            s.push_str("0\n");
        }
        s
    }

    pub fn from_dimacs(text: &str) -> Result<CnfFormula, CheckError> {
        let bad = |line: usize, msg: &str| CheckError::Dimacs { line, msg: msg.to_string() };
        let mut f = CnfFormula::default();
        let mut declared: Option<(u32, usize)> = None;
        let mut current = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let t = raw.trim();
            if let Some(rest) = t.strip_prefix('c') {
                let mut words = rest.split_whitespace();
                if words.next() == Some("net") {
                    let name = words.next().ok_or_else(|| bad(line, "net without a name"))?;
                    let bits =
                        words
                            .map(|w| w.parse::<i32>().map_err(|_| bad(line, "bad literal")))
                            .collect::<Result<Vec<_>, _>>()?;
                    f.nets.insert(name.to_string(), bits);
                }
                continue;
            }
            if t.is_empty() {
                continue;
            }
            if let Some(rest) = t.strip_prefix("p cnf") {
                let nums: Vec<&str> = rest.split_whitespace().collect();
                let [v, c] = nums.as_slice() else { return Err(bad(line, "malformed header")) };
                let v = v.parse().map_err(|_| bad(line, "bad variable count"))?;
                let c = c.parse().map_err(|_| bad(line, "bad clause count"))?;
                declared = Some((v, c));
                f.num_vars = v;
                continue;
            }
            let Some((nv, _)) = declared else { return Err(bad(line, "clause before header")) };
            for w in t.split_whitespace() {
                let l: i32 = w.parse().map_err(|_| bad(line, "bad literal"))?;
                if l == 0 {
                    if current.is_empty() {
                        return Err(bad(line, "empty clause"));
                    }
                    f.clauses.push(std::mem::take(&mut current));
                } else if l.unsigned_abs() > nv {
                    return Err(bad(line, "literal exceeds variable count"));
                } else {
                    current.push(l);
                }
            }
        }
        let Some((_, nc)) = declared else { return Err(bad(0, "missing `p cnf` header")) };
        if !current.is_empty() {
            return Err(bad(0, "last clause not terminated by 0"));
        }
        if f.clauses.len() != nc {
            return Err(bad(0, "clause count differs from header"));
        }
        Ok(f)
    }
}

pub fn export_dimacs(f: &CnfFormula, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, f.to_dimacs())
}

pub fn import_dimacs(path: &Path) -> Result<CnfFormula, CheckError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CheckError::Dimacs { line: 0, msg: format!("{}: {}", path.display(), e) })?;
    CnfFormula::from_dimacs(&text)
}
