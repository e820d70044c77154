//! Decision procedures for the existence of linear perfect Lee codes of
//! radius 2 and 3, with exact arithmetic and auditable certificates.

pub mod caps;
pub mod criteria;
pub mod integer;
pub mod field;
pub mod groupring;
pub mod lee;
pub mod oracle;
pub mod selftest;
pub mod survey;
