pub mod connection;
pub mod curves;
pub mod error;
pub mod exec;
pub mod exprdsl;
pub mod fit;
pub mod gauss_bonnet;
pub mod groups;
pub mod laurent;
pub mod measures;
pub mod oracle;
pub mod quadrature;
pub mod report;
pub mod scenario;
pub mod surfaces;

pub use error::{Error, Result};
