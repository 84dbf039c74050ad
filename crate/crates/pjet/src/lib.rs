pub mod algebroid;
pub mod catalog;
pub mod coupling;
pub mod docs;
pub mod expr;
pub mod geom;
pub mod groupoid;
pub mod homotopy;
pub mod jets;
pub mod localmodel;
pub mod par;
pub mod pipeline;
pub mod random;
pub mod report;
