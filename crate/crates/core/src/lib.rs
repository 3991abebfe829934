//! List decoding of one-point algebraic-geometry codes with multiplicity
//! interpolation and a `p^e`-th power twist on the message.

pub mod codec;
pub mod curve;
pub mod experiment;
pub mod gf;
pub mod interp;
pub mod linalg;
pub mod modform;
pub mod oracle;
pub mod poly;
pub mod radius;
pub mod roots;
