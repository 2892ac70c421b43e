//! Exact arithmetic for formal elementary connections and their local
//! Fourier transforms.

pub mod exactfield;
pub mod series;
pub mod connection;
pub mod structure;
pub mod fourier;
pub mod rigidity;
pub mod oracle;
pub mod cli;
