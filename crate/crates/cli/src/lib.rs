//! Library surface of the CLI: the deterministic serializers and the SVG
//! renderer, exposed so integration tests exercise the exact writers the
//! binary uses.

pub mod output;
pub mod svg;
