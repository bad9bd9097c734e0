pub mod backends;
pub mod error;
pub mod words;
pub mod gog;
pub mod amalgam;
pub mod hnn;
pub mod trajets;
pub mod fixtures;
pub mod decide;
pub mod cli;
