pub mod decompose;
pub mod diagnose;
pub mod evaluate;
pub mod ingest;
pub mod simulate;
