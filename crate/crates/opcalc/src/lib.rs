pub mod acceptance;
pub mod bar;
pub mod calculus_examples;
pub mod chaincore;
pub mod genfun;
pub mod koszul;
pub mod operad;
pub mod oracles;
pub mod random;
pub mod symseq;
