use num_integer::Integer;

use super::KPair;
use crate::abelian::FgAbGroup;

/// `K(O_m ⊗ O_n)` from the Künneth formula: `Z_{m-1} ⊗ Z_{n-1}` in degree 0
/// and `Tor(Z_{m-1}, Z_{n-1})` in degree 1, both `Z_gcd(m-1, n-1)`.
/// Shares no code with the Pimsner pipeline; it only serves as a check.
pub fn kunneth_flip_oracle(m: u64, n: u64) -> KPair {
    assert!(m >= 2 && n >= 2, "oracle needs m, n >= 2");
    let g = (m - 1).gcd(&(n - 1));
    KPair::known(FgAbGroup::cyclic(g), FgAbGroup::cyclic(g))
}
