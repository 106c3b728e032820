//! The gauge function `f(r) + g t` between the potentials of a static source
//! and the multipolar potentials of its fields.

mod bridge;
pub mod closed_form;

pub use bridge::{
    f_closed_form, f_quadrature, generic_points, offset_g, verify_gauge_relation, FMethod, Flagged, GaugeBridge,
    GaugeRelationReport, GUARD_CELLS,
};
