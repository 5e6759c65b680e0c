// mdbook cannot run listings that depend on a crate, so the chapters are
// pulled in here as doc comments and `cargo test --doc -p ncjulia-book`
// runs them. One module per chapter keeps failures traceable.

#[doc = include_str!("src/intro.md")]
pub mod intro {}
#[doc = include_str!("src/free-polynomials.md")]
pub mod free_polynomials {}
#[doc = include_str!("src/polyhedra.md")]
pub mod polyhedra {}
#[doc = include_str!("src/realizations.md")]
pub mod realizations {}
#[doc = include_str!("src/boundary.md")]
pub mod boundary {}
#[doc = include_str!("src/derivatives.md")]
pub mod derivatives {}
#[doc = include_str!("src/worked-example.md")]
pub mod worked_example {}
#[doc = include_str!("src/cli.md")]
pub mod cli {}
