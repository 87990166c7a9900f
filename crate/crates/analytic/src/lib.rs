pub mod cone;
pub mod demos;
pub mod lp;
pub mod phi;
pub mod psh;
pub mod report;
pub mod rho;
pub mod theta;
pub mod weights;
