#![allow(dead_code)]

pub mod dbm_enum;
pub mod mutants;
