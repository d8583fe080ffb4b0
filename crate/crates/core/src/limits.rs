/// Resource caps. Exceeding any of them is a hard error, never a silent
/// truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest universe accepted for user-supplied algebras.
    pub max_input_size: usize,
    /// Largest operation table materialized for derived algebras
    /// (products, subalgebras of powers, quotients).
    pub max_table_entries: usize,
    /// Largest product space a closure may range over.
    pub max_power_space: usize,
    /// Largest number of unary polynomials `pol1` may produce.
    pub pol1_cap: usize,
    /// Largest congruence lattice `con_lattice` may produce.
    pub lattice_cap: usize,
    /// Largest number of distinct term operations kept per search.
    pub term_cap: usize,
    /// Depth used when an operation must exhibit a Maltsev term.
    pub maltsev_search_depth: usize,
    /// Run the second centrality implementation and compare.
    pub cross_check_centrality: bool,
    /// Largest number of closed relations a bridge search may visit.
    pub bridge_search_cap: usize,
}

impl Limits {
    pub const DEFAULT: Limits = Limits {
        max_input_size: 6,
        max_table_entries: 1 << 24,
        max_power_space: 1 << 26,
        pol1_cap: 1_000_000,
        lattice_cap: 10_000,
        term_cap: 200_000,
        maltsev_search_depth: 3,
        cross_check_centrality: true,
        bridge_search_cap: 200_000,
    };
}

impl Default for Limits {
    fn default() -> Self {
        Limits::DEFAULT
    }
}
