pub mod clifford_oracle;
pub mod exactpoly;
pub mod intmatrix;
pub mod numberfield;
pub mod obstruction;
pub mod recipes;
