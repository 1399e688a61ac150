//! Annealer hardware constraints: coefficient ranges and precision, the
//! Chimera coupler graph, and chain embeddings of dense logical models.

mod chimera;
mod embedding;
mod scaling;

pub use chimera::{chimera, HardwareGraph, Side};
pub use embedding::{cell_clique_embedding, embed, unembed, ChainStrength, EmbeddingMap};
pub use scaling::{normalize, quantize, COUPLING_RANGE, DEFAULT_BITS, FIELD_RANGE};
