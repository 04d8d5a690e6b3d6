//! Poisson/TV deblurring problem components: blur operators, discrete
//! gradients, the Kullback-Leibler data term, data simulation, phantoms
//! and image I/O.

pub mod blur;
pub mod grid;
pub mod io;
pub mod ops;
pub mod sim;

pub use blur::BlurOperator;
pub use grid::{synth_phantom, ImageGrid, PhantomKind};
pub use ops::{div_op, grad_op, kl_grad, kl_grad_parts, kl_value, tv_value};
pub use sim::{simulate_data, SimulatedData};
