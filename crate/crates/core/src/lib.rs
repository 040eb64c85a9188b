pub mod helium;
pub mod parser;
pub mod pointmass;
pub mod susy;
pub mod symbolic;
pub mod weyl;
pub mod ordering;
pub mod spectral;
pub mod cli;
