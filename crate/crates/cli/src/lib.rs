//! Command-line front end and HTTP service for toponym extraction.

pub mod output;
pub mod service;
