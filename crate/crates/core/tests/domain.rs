use fogfed::domain::*;
use fogfed::fixtures::{random_instance, InstanceShape};
use proptest::prelude::*;

fn econ(oc_unit: f64, tc_unit: f64) -> EconomicModel<f64> {
    EconomicModel { oc_unit, tc_unit, sigma_floor: 0.0, rt_sla: 1.0, tp_sla: 1.0 }
}

fn server(id: usize, provider_id: usize, capacity: u32) -> Server {
    Server { id, provider_id, location: Location::new(0.0, 0.0), capacity }
}

fn user(id: usize, apps: &[usize]) -> User {
    User { id, location: Location::new(0.0, 0.0), requested_app_ids: apps.to_vec() }
}

fn app(id: usize, provider: usize, payment: f64) -> Application<f64> {
    Application { id, contracted_provider_id: provider, payment, user_ids: vec![] }
}

fn good(_: &User, _: &Server) -> Qos<f64> {
    Qos::new(0.1, 10.0)
}

#[test]
fn routes_to_lowest_response_time() {
    let s = Scenario::new(
        vec![server(1, 0, 5), server(2, 0, 5)],
        vec![Provider { id: 0, server_ids: vec![1, 2] }],
        vec![app(0, 0, 1.0)],
        vec![user(0, &[0])],
        1,
        econ(0.0, 0.0),
    )
    .unwrap();
    let oracle = |_: &User, sv: &Server| Qos::new(if sv.id == 1 { 0.3 } else { 0.1 }, 5.0);
    let plan = route_requests(&StrategyProfile::uniform(2, 1, 1), &s, &oracle);
    assert_eq!(plan.routes[0].server_id, Some(2));
}

#[test]
fn capacity_exhaustion_leaves_request_unserved() {
    let s = Scenario::new(
        vec![server(1, 0, 1)],
        vec![Provider { id: 0, server_ids: vec![1] }],
        vec![app(0, 0, 1.0)],
        vec![user(0, &[0]), user(1, &[0])],
        1,
        econ(0.0, 0.0),
    )
    .unwrap();
    let plan = route_requests(&StrategyProfile::uniform(1, 1, 1), &s, &good);
    assert!(plan.routes[0].is_served());
    assert!(!plan.routes[1].is_served());
    assert_eq!(plan.load, vec![1]);
}

/// Lexicographically smallest (rt, server id) sequence over every capacity-feasible
/// assignment of requests to servers or "unserved". Equals greedy in request order.
fn brute_force_routing(rt: &[[f64; 2]], caps: [u32; 2]) -> Vec<Option<usize>> {
    let n = rt.len();
    let mut best: Option<(Vec<(f64, usize)>, Vec<Option<usize>>)> = None;
    for code in 0..3usize.pow(n as u32) {
        let mut c = code;
        let mut choice = Vec::with_capacity(n);
        let mut load = [0u32; 2];
        let mut feasible = true;
        for _ in 0..n {
            let d = c % 3;
            c /= 3;
            if d < 2 {
                load[d] += 1;
                if load[d] > caps[d] {
                    feasible = false;
                }
                choice.push(Some(d));
            } else {
                choice.push(None);
            }
        }
        if !feasible {
            continue;
        }
        let key: Vec<(f64, usize)> = choice
            .iter()
            .enumerate()
            .map(|(i, ch)| ch.map_or((f64::INFINITY, usize::MAX), |s| (rt[i][s], s)))
            .collect();
        let better = match &best {
            None => true,
            Some((bk, _)) => key.partial_cmp(bk) == Some(std::cmp::Ordering::Less),
        };
        if better {
            best = Some((key, choice));
        }
    }
    best.unwrap().1
}

proptest! {
    #[test]
    fn routing_matches_exhaustive_enumeration(
        rts in prop::collection::vec((1u32..5, 1u32..5), 3),
        caps in (1u32..3, 1u32..3),
    ) {
        let rt: Vec<[f64; 2]> = rts.iter().map(|&(a, b)| [f64::from(a) / 10.0, f64::from(b) / 10.0]).collect();
        let s = Scenario::new(
            vec![server(1, 0, caps.0), server(2, 0, caps.1)],
            vec![Provider { id: 0, server_ids: vec![1, 2] }],
            vec![app(0, 0, 1.0)],
            (0..3).map(|u| user(u, &[0])).collect(),
            1,
            econ(0.0, 0.0),
        ).unwrap();
        let table = QosTable::from_fn(&s, |u, sv| Qos::new(rt[u.id][sv.id - 1], 1.0));
        let plan = route_requests(&StrategyProfile::uniform(2, 1, 1), &s, &table);
        let got: Vec<Option<usize>> = plan.routes.iter().map(|r| r.server_pos).collect();
        prop_assert_eq!(got, brute_force_routing(&rt, [caps.0, caps.1]));
    }
}

#[test]
fn plurality_allocation_and_tie_break() {
    // provider 0: servers 1,2,3 ; provider 1: servers 4,5 ; provider 2: servers 6
    let servers = vec![
        server(1, 0, 1), server(2, 0, 1), server(3, 0, 1),
        server(4, 1, 1), server(5, 1, 1), server(6, 2, 1),
    ];
    let s = Scenario::new(
        servers,
        vec![
            Provider { id: 0, server_ids: vec![1, 2, 3] },
            Provider { id: 1, server_ids: vec![4, 5] },
            Provider { id: 2, server_ids: vec![6] },
        ],
        vec![app(0, 0, 1.0), app(1, 0, 1.0), app(2, 1, 1.0), app(3, 2, 1.0), app(4, 1, 1.0)],
        vec![],
        3,
        econ(0.0, 0.0),
    )
    .unwrap();
    // provider 0 in {1,1,2} -> 1; provider 1 in {3,2} -> tie -> 2; provider 2 in {3} -> 3
    let profile = StrategyProfile::new(3, vec![1, 1, 2, 3, 2, 3]);
    assert_eq!(allocate_apps(&profile, &s), vec![1, 1, 2, 3, 2]);
    // provider 0 in {1,2,2} -> 2
    let profile = StrategyProfile::new(3, vec![1, 2, 2, 1, 2, 1]);
    assert_eq!(allocate_apps(&profile, &s), vec![2, 2, 1, 1, 1]);
}

#[test]
fn sigma_counts_satisfied_fraction() {
    let s = Scenario::new(
        vec![server(1, 0, 10)],
        vec![Provider { id: 0, server_ids: vec![1] }],
        vec![app(0, 0, 1.0)],
        (0..4).map(|u| user(u, &[0])).collect(),
        1,
        econ(0.0, 0.0),
    )
    .unwrap();
    let p = StrategyProfile::uniform(1, 1, 1);
    let all = route_requests(&p, &s, &good);
    assert_eq!(sigma(0, &all, s.econ()), 1.0);

    let none = route_requests(&p, &s, &|_: &User, _: &Server| Qos::new(2.0, 10.0));
    assert_eq!(sigma(0, &none, s.econ()), 0.0);

    // user 2 misses the throughput SLA
    let three = route_requests(&p, &s, &|u: &User, _: &Server| Qos::new(0.5, if u.id == 2 { 0.5 } else { 2.0 }));
    assert_eq!(sigma(0, &three, s.econ()), 0.75);

    let floored = s.clone().with_econ(EconomicModel { sigma_floor: 0.3, ..*s.econ() }).unwrap();
    assert_eq!(sigma(0, &none, floored.econ()), 0.3);
    assert_eq!(sigma(99, &none, s.econ()), 1.0);
}

/// Two apps paying 10; app 1 has two requests but only one server slot is left.
fn two_app_fixture() -> Scenario<f64> {
    Scenario::new(
        vec![server(1, 0, 1), server(2, 0, 1)],
        vec![Provider { id: 0, server_ids: vec![1, 2] }],
        vec![app(0, 0, 10.0), app(1, 0, 10.0)],
        vec![user(0, &[0]), user(1, &[1]), user(2, &[1])],
        1,
        econ(3.0, 1.0),
    )
    .unwrap()
}

#[test]
fn federation_utility_hand_value() {
    let s = two_app_fixture();
    let p = StrategyProfile::uniform(2, 1, 1);
    let eval = evaluate_profile(&p, &s, &good);
    assert_eq!(eval.sigmas, vec![1.0, 0.5]);
    // 10*1 + 10*0.5 - (3 + 1) - (3 + 1)
    assert_eq!(federation_utility(1, &p, &s, &good), 7.0);
    assert_eq!(welfare(&p, &s, &good), 7.0);
}

#[test]
fn empty_and_cost_only_federations() {
    let s = two_app_fixture().with_federations(3).unwrap();
    // both servers in federation 1; federation 3 is empty
    let p = StrategyProfile::new(3, vec![1, 1]);
    assert_eq!(federation_utility(3, &p, &s, &good), 0.0);
    // server 2 alone in federation 2 holds no apps: pure cost
    let p = StrategyProfile::new(3, vec![1, 2]);
    let u2 = federation_utility(2, &p, &s, &good);
    assert_eq!(u2, -3.0);
}

#[test]
fn empty_scenario_has_zero_welfare() {
    let s: Scenario<f64> = Scenario::new(vec![], vec![], vec![], vec![], 2, econ(1.0, 1.0)).unwrap();
    assert_eq!(welfare(&StrategyProfile::new(2, vec![]), &s, &good), 0.0);
}

#[test]
fn provider_shares_hand_values() {
    // one federation worth 10 split between a 1-server and a 1-server provider
    let s = Scenario::new(
        vec![server(1, 0, 1), server(2, 1, 1)],
        vec![Provider { id: 0, server_ids: vec![1] }, Provider { id: 1, server_ids: vec![2] }],
        vec![app(0, 0, 10.0)],
        vec![user(0, &[0])],
        1,
        econ(0.0, 0.0),
    )
    .unwrap();
    let p = StrategyProfile::uniform(2, 1, 1);
    assert_eq!(provider_utility(0, &p, &s, &good), 5.0);

    // u(f) = 7 split 2:1
    let s = Scenario::new(
        vec![server(1, 0, 1), server(2, 0, 1), server(3, 1, 1)],
        vec![Provider { id: 0, server_ids: vec![1, 2] }, Provider { id: 1, server_ids: vec![3] }],
        vec![app(0, 1, 7.0)],
        vec![user(0, &[0])],
        1,
        econ(0.0, 0.0),
    )
    .unwrap();
    let p = StrategyProfile::uniform(3, 1, 1);
    let a = provider_utility(0, &p, &s, &good);
    let b = provider_utility(1, &p, &s, &good);
    assert!((a - 14.0 / 3.0).abs() < 1e-12);
    assert!((b - 7.0 / 3.0).abs() < 1e-12);
    assert!((a + b - 7.0).abs() < 1e-12);

    // sole owner of its only federation gets the whole utility
    let s = two_app_fixture();
    assert_eq!(provider_utility(0, &StrategyProfile::uniform(2, 1, 1), &s, &good), 7.0);
}

fn random_profile(seed: u64, n: usize, m: usize) -> StrategyProfile {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    StrategyProfile::new(m, (0..n).map(|_| rng.gen_range(1..=m)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shares_conserve_welfare_and_routing_respects_capacity(seed in 0u64..10_000, m in 1usize..5) {
        let shape = InstanceShape { providers: 3, servers: 8, users: 12, apps: 4, federations: m };
        let (s, table) = random_instance::<f64>(seed, shape);
        let p = random_profile(seed ^ 0xabc, s.server_count(), m);
        prop_assert!(validate_profile(&p, &s).is_ok());

        let members = p.members();
        let mut seen: Vec<usize> = members.iter().flatten().copied().collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..s.server_count()).collect::<Vec<_>>());

        let eval = evaluate_profile(&p, &s, &table);
        let w = eval.welfare();
        let shares: f64 = eval.provider_utilities(&p, &s).iter().sum();
        prop_assert!((shares - w).abs() <= 1e-9 * w.abs().max(1.0));

        for (pos, srv) in s.servers().iter().enumerate() {
            prop_assert!(eval.plan.load[pos] <= srv.capacity);
        }
        for r in &eval.plan.routes {
            if let Some(pos) = r.server_pos {
                prop_assert_eq!(p.federation_at(pos), r.federation);
            }
        }

        let again = evaluate_profile(&p, &s, &table);
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&eval.federation_utilities), bits(&again.federation_utilities));
    }

    #[test]
    fn sigma_is_monotone_in_satisfied_requests(sat in 0usize..6, unsat in 0usize..6) {
        let mk = |sat: usize, unsat: usize| -> f64 {
            let users: Vec<User> = (0..sat + unsat).map(|u| user(u, &[0])).collect();
            let s = Scenario::new(
                vec![server(1, 0, 100)],
                vec![Provider { id: 0, server_ids: vec![1] }],
                vec![app(0, 0, 1.0)],
                users,
                1,
                econ(0.0, 0.0),
            ).unwrap();
            let oracle = move |u: &User, _: &Server| Qos::new(if u.id < sat { 0.5 } else { 5.0 }, 2.0);
            let plan = route_requests(&StrategyProfile::uniform(1, 1, 1), &s, &oracle);
            sigma(0, &plan, s.econ())
        };
        let base = mk(sat, unsat);
        prop_assert!(mk(sat + 1, unsat) >= base);
        prop_assert!(mk(sat, unsat + 1) <= base);
    }
}
