pub mod acs;
pub mod charfn;
pub mod classify;
pub mod delays;
pub mod error;
pub mod poly;
pub mod spectrum;
pub mod stuart_landau;
pub mod system;
pub mod verify;
