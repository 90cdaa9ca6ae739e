//! The robust-net condition for the default parameter bundle, with the net
//! radius `(1/N^hom)^r`, over the toy range `n, s, r ≤ 3`.

use hitset_core::params::{compute_params, ParamOverrides};
use hitset_core::robust::check_robust_net_condition;

#[test]
fn robust_net_condition_holds_over_toy_range() {
    let mut failing = Vec::new();
    for n in 1..=3 {
        for s in 1..=3 {
            for r in 1..=3u32 {
                let p = compute_params(n, s, r, &ParamOverrides::default()).unwrap();
                let c = check_robust_net_condition(&p.net_epsilon(), &p.eta, n, r);
                if !c.holds {
                    failing.push(format!(
                        "(n={n}, s={s}, r={r}): left {} < {} is {}, right {} < {} is {}",
                        c.left.lhs, c.left.rhs, c.left.holds, c.right.lhs, c.right.rhs, c.right.holds
                    ));
                }
            }
        }
    }
    assert!(failing.is_empty(), "net condition fails at:\n{}", failing.join("\n"));
}
