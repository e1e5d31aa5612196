pub mod cli;
pub mod geometry;
pub mod grid;
pub mod homotopy;
pub mod groebner;
pub mod linalg;
pub mod numeric;
pub mod ring;
pub mod semitrans;
pub mod solver;
