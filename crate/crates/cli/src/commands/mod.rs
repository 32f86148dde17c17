pub mod ingest;
pub mod policy;
pub mod rank;
pub mod report;
pub mod serve;
pub mod theory;
