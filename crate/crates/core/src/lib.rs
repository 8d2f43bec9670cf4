pub mod algebra;
pub mod groth;
pub mod ideal;
pub mod lattice;
pub mod mukai;
pub mod verra;
