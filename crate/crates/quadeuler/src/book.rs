//! Doc-test hooks for the book chapters.
//!
//! Each chapter of the guide in `book/src` is included here as a doc
//! comment, so `cargo test --doc` compiles and runs every fenced Rust
//! snippet in the book.  This keeps the prose and the library from
//! drifting apart.

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

#[cfg(doctest)]
mod chapters {
    #[doc = include_str!("../book/src/introduction.md")]
    mod introduction {}

    #[doc = include_str!("../book/src/gw-forms.md")]
    mod gw_forms {}

    #[doc = include_str!("../book/src/polynomials.md")]
    mod polynomials {}

    #[doc = include_str!("../book/src/jacobian-rings.md")]
    mod jacobian_rings {}

    #[doc = include_str!("../book/src/trace-pairing.md")]
    mod trace_pairing {}

    #[doc = include_str!("../book/src/fermat-oracles.md")]
    mod fermat_oracles {}

    #[doc = include_str!("../book/src/cli.md")]
    mod cli {}
}
