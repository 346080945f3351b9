use spunsplit::almost::{certify_almost_unsplittable, make_almost_unsplittable};
use spunsplit::decompose::{decompose_unsplittable, verify_decomposition, Bound};
use spunsplit::instance::total_flow;
use spunsplit::random::{random_instance, rng, RandomConfig};

#[test]
fn random_instances_decompose_within_dmax() {
    let mut r = rng(2024);
    for n in 0..200 {
        let (inst, x) = random_instance(&mut r, &RandomConfig::default());
        let out = decompose_unsplittable(&inst, &x, Bound::DMax).unwrap_or_else(|e| panic!("instance {n}: {e}"));
        let rep = verify_decomposition(&inst, &x, &out.decomposition, Bound::DMax, Some(&out.almost));
        assert!(rep.ok(), "instance {n}: {:?}", rep.failures);
    }
}

#[test]
fn random_instances_become_almost_unsplittable() {
    let mut r = rng(99);
    for _ in 0..200 {
        let (inst, x) = random_instance(&mut r, &RandomConfig::default());
        let a = make_almost_unsplittable(&inst, &x).unwrap();
        assert!(certify_almost_unsplittable(&inst, &a.flow).is_ok());
        assert_eq!(total_flow(inst.graph.arc_count(), &a.flow), total_flow(inst.graph.arc_count(), &x));
        assert_eq!(make_almost_unsplittable(&inst, &a.flow).unwrap().flow, a.flow);
    }
}
