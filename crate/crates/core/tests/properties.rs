use census_core::protocols::card_game::Card;
use census_core::protocols::cli::party_rng;
use census_core::protocols::kvs::{Request, Response};
use census_core::protocols::lottery::{fp_shares, Fp};
use census_core::protocols::sharing::gen_shares;
use census_core::{decode, encode, LocationId};
use proptest::prelude::*;

fn names(n: usize) -> Vec<LocationId> {
    (0..n).map(|i| LocationId::new(format!("n{i}")).unwrap()).collect()
}

fn request() -> impl Strategy<Value = Request> {
    prop_oneof![
        (".*", ".*").prop_map(|(k, v)| Request::Put(k, v)),
        ".*".prop_map(Request::Get),
        Just(Request::Stop),
    ]
}

fn response() -> impl Strategy<Value = Response> {
    let leaf = prop_oneof![
        ".*".prop_map(Response::Found),
        Just(Response::NotFound),
        Just(Response::Stopped),
    ];
    leaf.prop_recursive(2, 8, 4, |inner| {
        prop::collection::vec(inner, 0..4).prop_map(Response::Desynchronization)
    })
}

proptest! {
    #[test]
    fn hands_stay_below_21(cards in prop::collection::vec(any::<i64>(), 0..10)) {
        let hand: Card = cards.iter().map(|c| Card::new(*c)).sum();
        prop_assert!(hand.value() < 21);
        let oracle = cards.iter().map(|c| i128::from(*c)).sum::<i128>().rem_euclid(21);
        prop_assert_eq!(i128::from(hand.value()), oracle);
    }

    #[test]
    fn fp_ring_laws(a in any::<i64>(), b in any::<i64>(), c in any::<i64>()) {
        let (a, b, c) = (Fp::new(a), Fp::new(b), Fp::new(c));
        prop_assert_eq!((a + b) + c, a + (b + c));
        prop_assert_eq!(a + b, b + a);
        prop_assert_eq!(a * (b + c), a * b + a * c);
        prop_assert_eq!(a - b + b, a);
        if let Some(inv) = a.inverse() {
            prop_assert_eq!(a * inv, Fp::new(1));
        }
    }

    #[test]
    fn bool_shares_xor_to_secret(n in 1usize..9, x: bool, seed: u64) {
        let shares = gen_shares(&names(n), x, &mut party_rng(seed, "dealer"));
        prop_assert_eq!(shares.len(), n);
        prop_assert_eq!(shares.iter().fold(false, |acc, (_, s)| acc ^ s), x);
    }

    #[test]
    fn fp_shares_sum_to_secret(n in 1usize..9, x: i64, seed: u64) {
        let shares = fp_shares(&names(n), Fp::new(x), &mut party_rng(seed, "client"));
        let total: Fp = shares.iter().map(|(_, s)| *s).sum();
        prop_assert_eq!(total, Fp::new(x));
    }

    #[test]
    fn codec_round_trips(r in request(), s in response(), f: i64, b: bool, pair: (bool, bool)) {
        prop_assert_eq!(decode::<Request>(&encode(&r)).unwrap(), r);
        prop_assert_eq!(decode::<Response>(&encode(&s)).unwrap(), s);
        prop_assert_eq!(decode::<Fp>(&encode(&Fp::new(f))).unwrap(), Fp::new(f));
        prop_assert_eq!(decode::<Card>(&encode(&Card::new(f))).unwrap(), Card::new(f));
        prop_assert_eq!(decode::<bool>(&encode(&b)).unwrap(), b);
        prop_assert_eq!(decode::<(bool, bool)>(&encode(&pair)).unwrap(), pair);
    }
}
