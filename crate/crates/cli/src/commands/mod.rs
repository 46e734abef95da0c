pub mod cir;
pub mod estimate;
pub mod min_s;
pub mod mse;
pub mod overlay;
