//! Open Sound Control transport: wire codec plus the UDP service and
//! client that exchange circuits for counts.

pub mod service;
pub mod wire;

pub use service::{client_request, serve, Service, ServiceConfig};
pub use wire::{decode_osc, encode_osc, OscArg, OscMessage};
