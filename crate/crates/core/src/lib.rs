//! Verification toolkit for the 2-part of the Birch and Swinnerton-Dyer
//! conjecture over quadratic twist families.

pub mod arith;
pub mod linalg;
pub mod curve;
pub mod lvalue;
pub mod modsym;
pub mod descent;
pub mod family;
pub mod config;
pub mod report;
