//! Dependency parsing with pattern frames, lexical valency and trace binding.

pub mod binder;
pub mod engine;
pub mod error;
pub mod grammar;
pub mod lexicon;
pub mod output;
pub mod semnet;
pub mod tagger;
