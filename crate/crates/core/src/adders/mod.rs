//! Exact and approximate adder models: a behavioural truth table and a
//! gate-level netlist for each, plus the named presets.

mod netlist;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use netlist::{Gate, Netlist};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AdderError {
    #[error("operands ({x}, {y}) do not fit in {width} bits")]
    OutOfRange { x: u64, y: u64, width: u32 },
    #[error("invalid adder parameters: {0}")]
    InvalidParams(String),
    #[error("unknown adder preset `{0}`")]
    UnknownPreset(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SegmentMode {
    /// Each sub-adder sums a window reaching `P` bits below its result bits.
    SliceSum,
    /// Each block takes as carry-in the generate bit just below it.
    GenerateOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AdderKind {
    ExactRipple,
    Segmented { r: u32, p: u32, mode: SegmentMode },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AdderModel {
    pub name: String,
    pub width: u32,
    pub kind: AdderKind,
    /// Set for models whose parameters are a stand-in for an unspecified design.
    #[serde(default)]
    pub best_effort: bool,
}

pub const MAX_WIDTH: u32 = 32;

impl AdderModel {
    pub fn exact(width: u32) -> Result<AdderModel, AdderError> {
        Self::build(format!("rca_{}", width), width, AdderKind::ExactRipple)
    }

    pub fn slice_sum(width: u32, r: u32, p: u32) -> Result<AdderModel, AdderError> {
        Self::build(
            format!("slice_{}_{}_{}", width, r, p),
            width,
            AdderKind::Segmented { r, p, mode: SegmentMode::SliceSum },
        )
    }

    pub fn generate_only(width: u32, r: u32) -> Result<AdderModel, AdderError> {
        Self::build(
            format!("gen_{}_{}", width, r),
            width,
            AdderKind::Segmented { r, p: 1, mode: SegmentMode::GenerateOnly },
        )
    }

    fn build(name: String, width: u32, kind: AdderKind) -> Result<AdderModel, AdderError> {
        let m = AdderModel { name, width, kind, best_effort: false };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), AdderError> {
        let bad = |s: String| Err(AdderError::InvalidParams(s));
        if self.width == 0 || self.width > MAX_WIDTH {
            return bad(format!("width {} outside 1..={}", self.width, MAX_WIDTH));
        }
        if let AdderKind::Segmented { r, p, mode } = self.kind {
            if r == 0 || r > self.width {
                return bad(format!("block size {} outside 1..={}", r, self.width));
            }
            if !self.width.is_multiple_of(r) {
                return bad(format!("block size {} does not divide width {}", r, self.width));
            }
            if p > self.width {
                return bad(format!("prediction bits {} exceed width {}", p, self.width));
            }
            if mode == SegmentMode::GenerateOnly && p != 1 {
                return bad("generate-only blocks use exactly one prediction bit".into());
            }
        }
        Ok(())
    }

    /// Same design at another operand width.
    pub fn with_width(&self, width: u32) -> Result<AdderModel, AdderError> {
        let m = AdderModel { width, ..self.clone() };
        m.validate()?;
        Ok(m)
    }

    pub fn is_exact(&self) -> bool {
        self.kind == AdderKind::ExactRipple
    }

    pub fn max_operand(&self) -> u64 {
        (1u64 << self.width) - 1
    }

    pub fn evaluate(&self, x: u64, y: u64) -> Result<u64, AdderError> {
        if x > self.max_operand() || y > self.max_operand() {
            return Err(AdderError::OutOfRange { x, y, width: self.width });
        }
        Ok(self.eval_unchecked(x, y))
    }

    fn eval_unchecked(&self, x: u64, y: u64) -> u64 {
        let n = self.width;
        match self.kind {
            AdderKind::ExactRipple => x + y,
            AdderKind::Segmented { r, p, mode } => {
                let mut z = 0u64;
                let blocks = n / r;
                for k in 0..blocks {
                    let base = k * r;
                    let (lo, cin) = match mode {
                        SegmentMode::SliceSum => (base.saturating_sub(p), 0),
                        SegmentMode::GenerateOnly => {
                            let c = if k == 0 { 0 } else { (x >> (base - 1)) & (y >> (base - 1)) & 1 };
                            (base, c)
                        }
                    };
                    let len = base + r - lo;
                    let mask = (1u64 << len) - 1;
                    let s = ((x >> lo) & mask) + ((y >> lo) & mask) + cin;
                    let shift = base - lo;
                    z |= ((s >> shift) & ((1u64 << r) - 1)) << base;
                    if k + 1 == blocks {
                        z |= ((s >> len) & 1) << n;
                    }
                }
                z
            }
        }
    }

    pub fn to_netlist(&self) -> Netlist {
        Netlist::from_model(self)
    }

    /// One-line JSON description: name, width, block size, prediction bits, mode.
    pub fn describe_json(&self) -> serde_json::Value {
        let (r, p, mode) = match self.kind {
            AdderKind::ExactRipple => (self.width, 0, "exact"),
            AdderKind::Segmented { r, p, mode: SegmentMode::SliceSum } => (r, p, "slice_sum"),
            AdderKind::Segmented { r, p, mode: SegmentMode::GenerateOnly } => (r, p, "generate_only"),
        };
        serde_json::json!({
            "name": self.name,
            "n": self.width,
            "r": r,
            "p": p,
            "mode": mode,
            "best_effort": self.best_effort,
        })
    }
}

/// The named adder configurations at width 16.
pub fn presets() -> Vec<AdderModel> {
    let seg = |name: &str, r, p, mode| AdderModel {
        name: name.to_string(),
        width: 16,
        kind: AdderKind::Segmented { r, p, mode },
        best_effort: false,
    };
    vec![
        AdderModel { name: "rca_16".into(), width: 16, kind: AdderKind::ExactRipple, best_effort: false },
        seg("aca_i_16_4", 1, 4, SegmentMode::SliceSum),
        seg("aca_ii_16_4", 4, 1, SegmentMode::GenerateOnly),
        seg("etaii_16_4", 4, 4, SegmentMode::SliceSum),
        AdderModel { best_effort: true, ..seg("gda_16", 4, 4, SegmentMode::SliceSum) },
        seg("gear_16_2_4", 2, 4, SegmentMode::SliceSum),
    ]
}

pub fn preset(name: &str) -> Result<AdderModel, AdderError> {
    presets().into_iter().find(|m| m.name == name).ok_or_else(|| AdderError::UnknownPreset(name.to_string()))
}
