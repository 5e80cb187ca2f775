//! Named identity systems on two ternary symbols `p` and `q`.

use crate::identities::{canonicalize, parse_system, IdentitySystem};

/// Both terms Pixley-like: every one-off pattern collapses to `x`.
pub const PM_FULL: &str = "p/3; q/3; x=p(x,x,y)=p(x,y,y)=p(x,y,x)=q(x,x,y)=q(x,y,x)=q(y,x,x)";

/// [`PM_FULL`] without the absorption into `x`.
pub const PM_CHAIN: &str = "p/3; q/3; p(x,x,y)=p(x,y,y)=p(x,y,x)=q(x,x,y)=q(x,y,x)=q(y,x,x)";

/// The one system that survives every filter.
pub const CANDIDATE: &str = "p/3; q/3; p(x,x,y)=p(x,y,y); p(x,y,x)=q(x,x,y)=q(x,y,x)=q(y,x,x)";

pub const NEW: &str = "p/3; q/3; x=q(x,y,x); p(x,y,y)=p(x,y,x); p(x,x,y)=q(x,x,y)=q(y,x,x)";

/// Both terms majority operations.
pub const MM_FULL: &str = "p/3; q/3; x=p(x,x,y)=p(x,y,x)=p(y,x,x)=q(y,x,x)=q(x,y,x)=q(x,x,y)";

pub const MAJ: &str = "p/3; q/3; x=p(x,x,y); p(x,y,x)=p(y,x,x)=q(y,x,x)=q(x,y,x)=q(x,x,y)";

/// [`CANDIDATE`] with its last chain split; holds with `p = x`,
/// `q = 3x + 3y` over `Z_5`.
pub const SUBSET3: &str = "p/3; q/3; p(x,x,y)=p(x,y,y); p(x,y,x)=q(x,x,y); q(x,y,x)=q(y,x,x)";

/// Holds under the first projection.
pub const TRIVIAL_PROJECTION: &str = "p/3; p(x,y,y)=p(x,y,x)";

/// Every named system with its short name.
pub const GOLDEN: [(&str, &str); 8] = [
    ("pm-full", PM_FULL),
    ("pm-chain", PM_CHAIN),
    ("candidate", CANDIDATE),
    ("new", NEW),
    ("mm-full", MM_FULL),
    ("maj", MAJ),
    ("subset3", SUBSET3),
    ("trivial-projection", TRIVIAL_PROJECTION),
];

/// Parses a named system. Panics on an unknown name.
pub fn golden(name: &str) -> IdentitySystem {
    let (_, text) = GOLDEN
        .iter()
        .find(|(n, _)| *n == name)
        .unwrap_or_else(|| panic!("no golden system named {name:?}"));
    parse_system(text).expect("golden systems parse")
}

/// Short name of the golden system equivalent to `sys` up to variable
/// permutations and symbol renamings, if any.
pub fn known_name(sys: &IdentitySystem) -> Option<&'static str> {
    let canon = canonicalize(sys);
    GOLDEN.iter().find_map(|&(name, text)| {
        let g = parse_system(text).expect("golden systems parse");
        (g.signature() == sys.signature() && canonicalize(&g) == canon).then_some(name)
    })
}
