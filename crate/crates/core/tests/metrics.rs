use hinclust_core::metrics::{accuracy, macro_f1, micro_f1, nmi, read_labels, LabeledPartition};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn part(p: &[usize], t: &[usize]) -> LabeledPartition {
    LabeledPartition::new(p.to_vec(), t.to_vec()).unwrap()
}

fn relabel(xs: &[usize], perm: &[usize]) -> Vec<usize> {
    xs.iter().map(|&x| perm[x]).collect()
}

fn labels_and_perms() -> impl Strategy<Value = (Vec<usize>, Vec<usize>, Vec<usize>, Vec<usize>)> {
    (2usize..6, 1usize..60).prop_flat_map(|(k, n)| {
        (
            proptest::collection::vec(0..k, n),
            proptest::collection::vec(0..k, n),
            Just((0..k).collect::<Vec<_>>()).prop_shuffle(),
            Just((0..k).collect::<Vec<_>>()).prop_shuffle(),
        )
    })
}

#[test]
fn hand_cases() {
    let p = part(&[0, 0, 1, 1], &[0, 1, 1, 1]);
    assert_eq!(accuracy(&p), 0.75);
    assert_eq!(macro_f1(&p), 11.0 / 15.0);
    assert_eq!(nmi(&part(&[0, 0, 1, 1], &[0, 1, 0, 1])), 0.0);
    assert_eq!(macro_f1(&part(&[0, 0, 0, 0], &[0, 0, 1, 1])), 1.0 / 3.0);
    assert_eq!(accuracy(&part(&[1, 0, 1, 0], &[0, 1, 0, 1])), 0.0);
}

#[test]
fn coin_flip_predictions_carry_no_information() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let n = 10_000;
    let truth: Vec<usize> = (0..n).map(|_| rng.random_range(0..2)).collect();
    let pred: Vec<usize> = (0..n).map(|_| rng.random_range(0..2)).collect();
    assert!(nmi(&LabeledPartition::new(pred, truth).unwrap()) < 0.05);
}

#[test]
fn labels_file_parsing() {
    let text = "# comment\nx\t1\ny\t0\n\n";
    let l = read_labels(text.as_bytes(), "labels").unwrap();
    assert_eq!(l, vec![("x".to_string(), 1), ("y".to_string(), 0)]);
    let err = read_labels("x\t1\ny 0\n".as_bytes(), "labels").unwrap_err();
    assert!(err.to_string().starts_with("labels:2:"), "{err}");
}

proptest! {
    #[test]
    fn nmi_is_symmetric_and_relabel_invariant((p, t, perm_a, perm_b) in labels_and_perms()) {
        let x = part(&p, &t);
        prop_assert_eq!(nmi(&x), nmi(&x.swapped()));
        let one_side = nmi(&part(&relabel(&p, &perm_a), &t));
        prop_assert!((one_side - nmi(&x)).abs() < 1e-12);
        let both = nmi(&part(&relabel(&p, &perm_b), &relabel(&t, &perm_a)));
        prop_assert!((both - nmi(&x)).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&nmi(&x)));
    }

    #[test]
    fn f1_scores_follow_common_relabeling((p, t, perm, _) in labels_and_perms()) {
        let x = part(&p, &t);
        let y = part(&relabel(&p, &perm), &relabel(&t, &perm));
        prop_assert_eq!(accuracy(&x), accuracy(&y));
        prop_assert!((macro_f1(&x) - macro_f1(&y)).abs() < 1e-12);
        prop_assert!((accuracy(&x) - micro_f1(&x)).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&macro_f1(&x)));
    }
}
