//! Safety verification by predicate abstraction, extraction of tolerance
//! constraints for arithmetic operators, and checking of approximate adder
//! designs against those constraints.

pub mod abstraction;
pub mod adders;
pub mod checkers;
pub mod concrete;
pub mod frontend;
pub mod logic;
pub mod pipeline;
pub mod tolerance;
