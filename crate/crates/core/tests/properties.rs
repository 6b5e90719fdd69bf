use std::sync::OnceLock;

use agdistill::csscode::{
    certify_dual_distance, is_stabilizer_equiv, logical_z_ops, quantum_params, syndrome,
    DEFAULT_SUBSET_CAP,
};
use agdistill::curves::Curve;
use agdistill::decoder::{build_decoder, DecoderConfig, DegA1Choice};
use agdistill::gf2e::Fe;
use agdistill::triortho::{
    construct, is_triorthogonal, transversal_identity, TriorthogonalMatrix, VerifyMode,
};
use proptest::prelude::*;

fn small() -> &'static TriorthogonalMatrix {
    static T: OnceLock<TriorthogonalMatrix> = OnceLock::new();
    T.get_or_init(|| construct(&Curve::parse("rational:s=5").unwrap(), 4, 1, 0).unwrap())
}

/// Rational curve over F_256, a = 36, k = 10: n = 245, d = 28, t = 13.
fn f256() -> &'static (TriorthogonalMatrix, DecoderConfig) {
    static T: OnceLock<(TriorthogonalMatrix, DecoderConfig)> = OnceLock::new();
    T.get_or_init(|| {
        let t = construct(&Curve::parse("rational:s=8").unwrap(), 36, 10, 0).unwrap();
        let p = quantum_params(&t).unwrap();
        let d = build_decoder(&t, p.t, DegA1Choice::Scan).unwrap();
        (t, d)
    })
}

#[test]
fn f256_rational_parameters() {
    let (t, d) = f256();
    let p = quantum_params(t).unwrap();
    assert_eq!((p.n, p.k, p.m, p.d_lower, p.t), (245, 10, 37, 28, 13));
    assert_eq!(d.t, 13);
    assert!(is_triorthogonal(t, VerifyMode::Exhaustive).pass);
}

/// Harmful X errors lie in span(G) \ span(G_0). With k = 1 every such vector is a
/// multiple of g^1 + span(G_0), and scaling keeps the weight, so fixing the G_1
/// coefficient to 1 enumerates all of them up to scale.
#[test]
fn x_distance_at_least_z_distance() {
    let t = small();
    let f = &t.field;
    assert_eq!(t.k, 1);
    let d_z = 5;
    assert!(certify_dual_distance(f, &t.g0(), d_z, DEFAULT_SUBSET_CAP).unwrap());
    let q = f.q();
    let r = t.m - t.k;
    let mut min_w = usize::MAX;
    let mut word = vec![Fe::ZERO; t.n];
    for idx in 0..q.pow(r as u32) {
        word.copy_from_slice(t.rows.row(0));
        let mut x = idx;
        for j in 0..r {
            let c = Fe((x % q) as u16);
            x /= q;
            f.axpy(c, t.rows.row(t.k + j), &mut word);
        }
        min_w = min_w.min(word.iter().filter(|v| !v.is_zero()).count());
    }
    assert!(min_w >= d_z, "min weight {min_w}");
}

#[test]
fn residue_seeds_all_give_triorthogonal_matrices() {
    let curve = Curve::parse("rational:s=5").unwrap();
    for seed in 0..16 {
        let t = construct(&curve, 4, 1, seed).unwrap();
        assert!(is_triorthogonal(&t, VerifyMode::Exhaustive).pass, "seed {seed}");
    }
}

fn fe_vec(n: usize, q: u16) -> impl Strategy<Value = Vec<Fe>> {
    prop::collection::vec((0..q).prop_map(Fe), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transversal_phase_identity(u in fe_vec(5, 32)) {
        prop_assert!(transversal_identity(small(), &u));
    }

    #[test]
    fn transversal_phase_identity_f256(u in fe_vec(37, 256)) {
        prop_assert!(transversal_identity(&f256().0, &u));
    }

    #[test]
    fn decoder_exact_within_radius(
        support in prop::collection::btree_set(0usize..245, 0..=13),
        vals in prop::collection::vec(1u16..256, 13),
    ) {
        let (t, d) = f256();
        let mut e = vec![Fe::ZERO; t.n];
        for (&i, &v) in support.iter().zip(&vals) {
            e[i] = Fe(v);
        }
        let r = d.decode(&syndrome(t, &e).unwrap());
        prop_assert!(r.matched);
        prop_assert_eq!(r.e_hat, e);
    }

    #[test]
    fn syndrome_zero_on_g_perp_shifts(e in fe_vec(30, 32)) {
        let t = small();
        let f = &t.field;
        let s = syndrome(t, &e).unwrap();
        for r in t.rows.kernel(f).iter().take(3) {
            let shifted: Vec<Fe> = e.iter().zip(r).map(|(&a, &b)| a + b).collect();
            prop_assert_eq!(&syndrome(t, &shifted).unwrap(), &s);
            prop_assert!(is_stabilizer_equiv(t, r));
        }
    }
}

#[test]
fn logical_ops_duality_f256() {
    let (t, _) = f256();
    let f = &t.field;
    let l = logical_z_ops(t);
    for c in 0..t.m {
        for a in 0..t.k {
            let want = if a == c { Fe::ONE } else { Fe::ZERO };
            assert_eq!(f.dot(t.rows.row(c), l.rows.row(a)), want);
        }
    }
}
