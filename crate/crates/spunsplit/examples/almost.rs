//! The swap sweep that leaves at most two fractional commodities per
//! component, shown on a random instance.

use spunsplit::almost::make_almost_unsplittable;
use spunsplit::instance::{fractional_set, share_table};
use spunsplit::random::{random_instance, rng, RandomConfig};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(13);
    let cfg = RandomConfig { max_arcs: 12, max_commodities: 5, ..RandomConfig::default() };
    let (inst, x) = random_instance(&mut rng(seed), &cfg);
    println!("{}", inst.tree.to_expr().display(&inst.graph));
    let before = share_table(&inst, &x);
    let out = make_almost_unsplittable(&inst, &x).expect("conserving flow");
    for w in inst.tree.preorder() {
        println!("ω{w:<3} I before {:?}  after {:?}", fractional_set(&before[w]), out.fractional[w]);
    }
    println!("{} swap iteration(s)", out.iterations);
}
