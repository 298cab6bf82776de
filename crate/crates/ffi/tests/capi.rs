use std::ffi::CStr;
use std::ptr;
use stratnet_ffi::*;

fn network(n: usize, edges: &[(u32, u32)], groups: Option<&[u32]>, k: usize) -> *mut StnNetwork {
    let (s, t): (Vec<u32>, Vec<u32>) = edges.iter().copied().unzip();
    let mut out = ptr::null_mut();
    let g = groups.map_or(ptr::null(), |g| g.as_ptr());
    let st = unsafe { stn_network_new(n, s.as_ptr(), t.as_ptr(), s.len(), g, k, &mut out) };
    assert_eq!(st, StnStatus::Ok);
    out
}

fn last_error() -> String {
    let p = stn_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn round_trip_edges_and_degrees() {
    let net = network(4, &[(0, 1), (1, 2), (2, 0), (3, 0)], None, 1);
    unsafe {
        assert_eq!(stn_network_n_nodes(net), 4);
        assert_eq!(stn_network_arc_count(net), 4);
        let (mut s, mut t, mut n) = ([0u32; 8], [0u32; 8], 0usize);
        assert_eq!(stn_network_edges(net, s.as_mut_ptr(), t.as_mut_ptr(), 8, &mut n), StnStatus::Ok);
        assert_eq!(n, 4);
        assert_eq!((&s[..4], &t[..4]), (&[0, 1, 2, 3][..], &[1, 2, 0, 0][..]));
        let (mut o, mut i) = ([0u32; 4], [0u32; 4]);
        assert_eq!(stn_network_degrees(net, o.as_mut_ptr(), i.as_mut_ptr()), StnStatus::Ok);
        assert_eq!(o, [1, 1, 1, 1]);
        assert_eq!(i, [2, 1, 1, 0]);
        stn_network_free(net);
    }
}

#[test]
fn invalid_input_sets_status_and_message() {
    let (s, t) = ([1u32], [1u32]);
    let mut out = ptr::null_mut();
    let st = unsafe { stn_network_new(3, s.as_ptr(), t.as_ptr(), 1, ptr::null(), 1, &mut out) };
    assert_eq!(st, StnStatus::InvalidInput);
    assert!(out.is_null());
    assert!(last_error().contains("self-loop"), "{}", last_error());
    let st = unsafe { stn_network_new(3, ptr::null(), t.as_ptr(), 1, ptr::null(), 1, &mut out) };
    assert_eq!(st, StnStatus::NullPointer);
    let st = unsafe { stn_network_new(3, s.as_ptr(), t.as_ptr(), 0, ptr::null(), 1, ptr::null_mut()) };
    assert_eq!(st, StnStatus::NullPointer);
}

#[test]
fn indices() {
    let net = network(3, &[(0, 1), (1, 0), (1, 2)], None, 1);
    let mut v = 0.0;
    unsafe {
        assert_eq!(stn_network_index(net, StnStatistic::ReciprocityIndex, &mut v), StnStatus::Ok);
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(stn_network_index(net, StnStatistic::TransitivityIndex, &mut v), StnStatus::Ok);
        assert_eq!(v, 0.0);
        assert_eq!(stn_network_index(net, StnStatistic::LocallyBest, &mut v), StnStatus::InvalidInput);
        stn_network_free(net);
    }
}

#[test]
fn separation_is_reported() {
    // Node 0 sends to everyone.
    let net = network(4, &[(0, 1), (0, 2), (0, 3), (1, 2)], None, 1);
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(stn_fit_null(net, &mut p), StnStatus::Separation);
        assert!(last_error().contains("node 0"));
        stn_network_free(net);
    }
}

#[test]
fn params_and_statistic() {
    let net = network(3, &[(0, 1), (1, 0)], None, 1);
    let (lambda, a, b) = ([0.0], [0.0; 3], [0.0; 3]);
    let mut p = ptr::null_mut();
    let mut v = f64::NAN;
    unsafe {
        assert_eq!(stn_params_new(3, 1, lambda.as_ptr(), a.as_ptr(), b.as_ptr(), &mut p), StnStatus::Ok);
        assert_eq!(stn_locally_best(net, p, StnSpec::Reciprocity, &mut v), StnStatus::Ok);
        // Two reciprocated arcs, each contributing (1 - 1/2) * 1.
        assert!((v - 1.0).abs() < 1e-15);
        let mut back = [9.0; 3];
        assert_eq!(stn_params_get(p, ptr::null_mut(), back.as_mut_ptr(), ptr::null_mut()), StnStatus::Ok);
        assert_eq!(back, [0.0; 3]);
        stn_params_free(p);
        stn_network_free(net);
    }
}

#[test]
fn sampling_preserves_degrees_and_is_seeded() {
    let groups = [0u32, 0, 1, 1, 0, 1];
    let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3), (2, 5), (1, 4)];
    let net = network(6, &edges, Some(&groups), 2);
    let draw = |seed| unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(stn_sample(net, StnReference::DegreeAndCrosslink, 200, 0.5, seed, &mut out), StnStatus::Ok);
        let (mut o, mut i) = ([0u32; 6], [0u32; 6]);
        stn_network_degrees(out, o.as_mut_ptr(), i.as_mut_ptr());
        let (mut s, mut t, mut n) = ([0u32; 30], [0u32; 30], 0);
        stn_network_edges(out, s.as_mut_ptr(), t.as_mut_ptr(), 30, &mut n);
        stn_network_free(out);
        (o, i, s[..n].to_vec(), t[..n].to_vec())
    };
    let (o, i, s, t) = draw(7);
    assert_eq!(o, [2, 2, 2, 1, 1, 1]);
    assert_eq!(i, [1, 1, 1, 2, 2, 2]);
    assert_eq!(draw(7), (o, i, s, t));
    unsafe { stn_network_free(net) };
}

#[test]
fn simulate_and_test() {
    let n = 8;
    let (lambda, a, b) = ([0.0], [0.3; 8], [-0.3; 8]);
    let mut p = ptr::null_mut();
    let like = network(n, &[], None, 1);
    unsafe {
        assert_eq!(stn_params_new(n, 1, lambda.as_ptr(), a.as_ptr(), b.as_ptr(), &mut p), StnStatus::Ok);
        let mut sim = ptr::null_mut();
        assert_eq!(stn_simulate(p, like, 0.2, StnSpec::Transitivity, 3, &mut sim), StnStatus::Ok);
        let (mut obs, mut pv) = (0.0, 0.0);
        let st = stn_test(sim, StnStatistic::TransitivityIndex, StnSpec::Transitivity, ptr::null(),
            StnReference::DegreeOnly, 50, 100, 0.5, 1, &mut obs, &mut pv);
        assert_eq!(st, StnStatus::Ok, "{}", last_error());
        assert!(pv > 0.0 && pv <= 1.0);
        let st = stn_test(sim, StnStatistic::LocallyBest, StnSpec::Transitivity, p,
            StnReference::DensityOnly, 50, 0, 0.5, 1, &mut obs, &mut pv);
        assert_eq!(st, StnStatus::Ok, "{}", last_error());
        stn_network_free(sim);
        stn_network_free(like);
        stn_params_free(p);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(stn_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
