//! Congruence modules, congruence numbers, modular degrees and the checks
//! relating them.

pub mod congruence;
pub mod report;

pub use congruence::{
    attach_ideal_parts, congruence_module, congruence_module_fast, congruence_order, Carrier, CongModuleReport,
    IdealPart, PrimePart,
};
pub use report::{
    anomalies_of, anomaly_scan, cong_number, deg_cong_report, deg_divides_cong, divisibility_check, local_violations,
    manin_certify, modular_degree, Anomaly, AnomalyReport, DegCongReport, Divisibility, IdealReport, LevelData,
    LevelReport, ManinCertificate, ManinCheck, PrimeOrds, ReportOptions,
};
