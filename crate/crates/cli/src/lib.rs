//! Command-line front end: mesh generation, coefficient checks and the
//! verification suite.

pub mod app;
pub mod check;
pub mod coeffs;
pub mod gen;
pub mod mesh;
pub mod report;
pub mod verify;
