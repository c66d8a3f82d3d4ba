pub mod bisim;
pub mod corpus;
pub mod dbm;
pub mod history;
pub mod model;
pub mod oracle;
pub mod zhg;
