//! Exact construction of wildly ramified Galois p-extensions of local
//! function fields.
//!
//! Starting from a finite p-group with a chosen composition series of
//! normal subgroups, this crate builds the generic Artin-Schreier tower
//! attached to the filtration, decides which filtration levels split,
//! checks whether a prescribed sequence of upper ramification breaks is
//! realizable, and computes the Galois-scaffold data of the resulting
//! extension over K = F_p((pi)): cofactor ratios, scaffold precision,
//! truncated-exponential group-algebra generators, and freeness /
//! Hopf-order certificates for the associated order.
//!
//! All arithmetic is exact; there is no floating point anywhere.
//!
//! The guide in `book/` walks through each layer with runnable
//! examples; those snippets are compiled as doc-tests below, so the
//! book cannot drift from the API.
//!
//! ```
//! use scaffold_forge::pgroup::{PFilteredGroup, PresetFamily};
//!
//! let g = PFilteredGroup::preset(PresetFamily::Dihedral2, 2, 4).unwrap();
//! assert_eq!(g.sigma_set(), [1, 2].into_iter().collect());
//! ```

pub mod algebra;
pub mod generic;
pub mod pgroup;
pub mod ramification;
pub mod scaffold;

// Compile the book's code blocks as doc-tests so the narrative guide
// and the crate cannot drift apart.
#[cfg(any())] // book chapters not written yet
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(intro, "../../../book/src/introduction.md");
    chapter!(exact_arithmetic, "../../../book/src/exact-arithmetic.md");
    chapter!(p_filtered_groups, "../../../book/src/p-filtered-groups.md");
    chapter!(generic_towers, "../../../book/src/generic-towers.md");
    chapter!(ramification_breaks, "../../../book/src/ramification-breaks.md");
    chapter!(scaffolds, "../../../book/src/scaffolds.md");
    chapter!(cli, "../../../book/src/cli.md");
}
