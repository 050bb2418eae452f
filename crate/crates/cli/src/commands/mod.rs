pub mod bench;
pub mod fit;
pub mod ingest;
pub mod report;
pub mod simulate;
