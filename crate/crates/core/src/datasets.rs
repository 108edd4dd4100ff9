//! Bundled data.

use crate::experiment::ObservedExperiment;

/// Reaction times (ms) of the 32 drivers using a cell phone.
pub const CELL_PHONE: [f64; 32] = [
    636.0, 623.0, 615.0, 672.0, 601.0, 600.0, 542.0, 554.0, 543.0, 520.0, 609.0, 559.0, 595.0,
    565.0, 573.0, 554.0, 626.0, 501.0, 574.0, 468.0, 578.0, 560.0, 525.0, 647.0, 456.0, 688.0,
    679.0, 960.0, 558.0, 482.0, 527.0, 536.0,
];

/// Reaction times (ms) of the 32 control drivers.
pub const CONTROL: [f64; 32] = [
    557.0, 572.0, 457.0, 489.0, 532.0, 506.0, 648.0, 485.0, 610.0, 444.0, 626.0, 626.0, 426.0,
    585.0, 487.0, 436.0, 642.0, 476.0, 586.0, 565.0, 617.0, 528.0, 578.0, 472.0, 485.0, 539.0,
    523.0, 479.0, 535.0, 603.0, 512.0, 449.0,
];

/// The cell-phone reaction-time experiment: treatment 1 is phone use,
/// units 1..=32 are the phone arm and 33..=64 the control arm.
pub fn cell_phone_experiment() -> ObservedExperiment {
    ObservedExperiment::from_arms(&CELL_PHONE, &CONTROL).expect("bundled data are valid")
}
