//! Convexity falsification for a compressible neo-Hookean stored energy
//! and a Schwarz alternating solver benchmark exhibiting missed buckling
//! nonuniqueness on a long compressed rod.

pub mod bar;
pub mod buckling;
pub mod convexity;
pub mod elastica;
pub mod energy;
pub mod report;
pub mod schwarz;
pub mod solver;
pub mod tensor;
