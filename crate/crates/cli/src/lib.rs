//! Library half of the command-line tool: sequence file parsing and
//! writing, table rendering, the stats/answer JSON documents, and the
//! command implementations wired together by the binary.

pub mod commands;
pub mod render;
pub mod seqfile;
pub mod stats;
