pub mod circulant;
pub mod cli;
pub mod functions;
pub mod hypothesis;
pub mod inequality;
pub mod io;
pub mod numerics;
pub mod stochastic;
