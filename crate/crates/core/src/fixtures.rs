//! Shared parameter sets for unit tests. Values mirror the `umaine-iea15`
//! and `nmpz-demo` parameter files and the kN-unit operating-point sets.

use crate::{AeroSensitivities, StructuralParams};

pub(crate) fn umaine() -> StructuralParams {
    StructuralParams {
        gearbox_ratio: 1.0,
        rotor_inertia: 3.18628138e8,
        pitch_inertia: 2.94e11,
        pitch_damping: 0.0,
        pitch_stiffness: 1.404e10,
        hub_height: 150.0,
    }
}

pub(crate) fn nmpz_demo() -> StructuralParams {
    StructuralParams {
        pitch_inertia: 1.0e9,
        pitch_stiffness: 4.776e7,
        ..umaine()
    }
}

pub(crate) fn phi_minphase() -> AeroSensitivities {
    AeroSensitivities::from_kilonewton(2980.9, 354.8, -58597.1, -5658.0, -152347.8, -16052.2, 0.0)
}

pub(crate) fn phi_nmpz() -> AeroSensitivities {
    AeroSensitivities::from_kilonewton(3079.0, 355.6, -55499.5, -5820.4, -160140.5, -15260.0, 0.0)
}

pub(crate) fn omega_nmpz() -> AeroSensitivities {
    AeroSensitivities::from_kilonewton(2838.0, 303.0, -59428.7, -6282.9, -133058.7, -18247.0, 0.0)
}

pub(crate) fn both_nmpz() -> AeroSensitivities {
    AeroSensitivities::from_kilonewton(3105.0, 293.0, -51356.5, -7150.0, -148063.0, -16543.6, 0.0)
}

pub(crate) fn omega_minphase() -> AeroSensitivities {
    phi_minphase()
}
