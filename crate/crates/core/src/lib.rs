pub mod cli;
pub mod critical;
pub mod driver;
pub mod injury;
pub mod lang;
pub mod subst;
pub mod trees;
