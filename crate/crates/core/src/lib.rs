#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dense;
pub mod error;
pub mod operators;
pub mod zolotarev;
pub mod rational_arnoldi;
pub mod lanczos;
pub mod solvers;
pub mod cli;
