//! Classical gates encoded as quantum states.

mod general;
mod otp;
mod states;
mod table;

pub use general::{encode_general, ideal_line_success, ObservableAssignment};
pub use otp::{
    encode_elliptical_g2, encode_linear_g2, evaluate_otp, measure_registers, measurement_plan,
    mixture_density, representatives, success_probability, success_probability_with_fidelity,
    GateOtp, MeasurementPlan, MeasurementRecord, Scheme, GENERAL_DIM_CAP,
};
pub(crate) use otp::check_fidelity;
pub use states::{
    elliptical_rows, elliptical_state, g1_state, linear_rows, product_state, G1Gate, PureState,
    ELLIPTICAL_TABLE, LINEAR_TABLE,
};
pub use table::{bits_of, GateTable, MAX_INPUT_BITS};
