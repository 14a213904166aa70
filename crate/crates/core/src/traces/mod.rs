//! Twisted traces `t_f(chi; m)` for positive, negative-square and zero index.

pub mod geodesic;
pub mod positive;
pub mod series;
pub mod table;

pub use geodesic::{geodesic_orbits, pairing, trace_negative_square, vanishing_bound, GeodesicOrbit, TraceValue};
pub use positive::{index_supported, trace_positive, trace_positive_lattice, trace_trivial, PositiveTrace, TraceConfig};
pub use series::{generating_series, GeneratingSeries, TraceContext, TraceResult};
pub use table::{cache_dir, TableEntry, TraceTable};
