//! Shape optimization of linear-elastic parts on simplex meshes: finite
//! element statics, exact discrete shape sensitivities, traction-method
//! smoothing, and STL export for rapid prototyping.

mod dd;
pub mod export;
pub mod fem;
pub mod geometry;
pub mod mesh;
pub mod pipeline;
pub mod shape;
