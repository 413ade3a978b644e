//! Continuous-time quantum walks on Hermitian adjacency matrices: spectral
//! decompositions, exact state-transfer certification, graph
//! constructions and the universal-PST search tools.

pub mod linalg;
pub mod number;
pub mod transfer;
pub mod constructions;
pub mod upst;
pub mod star;
pub mod family;
pub mod verify;
