pub mod analytic;
pub mod contour;
pub mod func;
pub mod net;
pub mod parse;
pub mod scalar;
pub mod scenario;
pub mod sets;
