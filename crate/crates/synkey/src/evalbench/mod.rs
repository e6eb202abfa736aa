//! Exact secrecy and uniformity audits at small block length, Monte
//! Carlo key bit error rate estimation at LDPC scale, decoding-error
//! monotonicity checks, and CSV report emission.

mod audit;
mod kber;
mod report;

pub use audit::{exact_secrecy_audit, monotonicity_check, AuditReport, SchemeParams};
pub use kber::{estimate_kber, KberConfig, KberResult};
pub use report::{
    audit_csv_row, kber_csv_row, write_audit_csv, write_kber_csv, AUDIT_CSV_HEADER,
    KBER_CSV_HEADER,
};
