pub mod algebra;
pub mod certify;
pub mod cli;
pub mod enclose;
pub mod formula;
pub mod reduce;
pub mod search;
