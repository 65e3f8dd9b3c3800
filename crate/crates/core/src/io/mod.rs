//! Configuration, file formats, and the command implementations.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod records;
pub mod svg;
