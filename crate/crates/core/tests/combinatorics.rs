use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weylhyp::coxeter::*;
use weylhyp::exactalg::*;

fn label_of_word_m(w: &[Gen]) -> MLabel {
    w.iter().fold(MLabel::pos(0, 7), |t, &g| act_m(g, t))
}

fn label_of_word_j(w: &[Gen]) -> JLabel {
    w.iter().fold("p0".parse().unwrap(), |t, &g| act_j(g, t))
}

fn words(gens: &[Gen], max_len: usize) -> Vec<Vec<Gen>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &g in gens {
                let mut u: Vec<Gen> = w.clone();
                u.push(g);
                next.push(u);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[test]
fn labels_match_matrices_exhaustively_to_length_3() {
    let id_w = SymVec::identity(Side::W);
    for w in words(&W_GENS, 3) {
        let m = word_to_matrix(&GenWord(w.clone()), Side::W).unwrap();
        assert_eq!(coset_classify_m(&m.apply(&id_w).unwrap()).unwrap(), label_of_word_m(&w), "{w:?}");
    }
    let id_v = SymVec::identity(Side::V);
    for w in words(&V_GENS, 3) {
        let m = word_to_matrix(&GenWord(w.clone()), Side::V).unwrap();
        assert_eq!(coset_classify_j(&m.apply(&id_v).unwrap()).unwrap(), label_of_word_j(&w), "{w:?}");
    }
}

#[test]
fn labels_match_matrices_on_random_long_words() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let id_w = SymVec::identity(Side::W);
    let id_v = SymVec::identity(Side::V);
    for _ in 0..300 {
        let len = rng.gen_range(4..25);
        let w: Vec<Gen> = (0..len).map(|_| W_GENS[rng.gen_range(0..7)]).collect();
        let m = word_to_matrix(&GenWord(w.clone()), Side::W).unwrap();
        assert_eq!(coset_classify_m(&m.apply(&id_w).unwrap()).unwrap(), label_of_word_m(&w));
        let w: Vec<Gen> = (0..len).map(|_| V_GENS[rng.gen_range(0..6)]).collect();
        let m = word_to_matrix(&GenWord(w.clone()), Side::V).unwrap();
        assert_eq!(coset_classify_j(&m.apply(&id_v).unwrap()).unwrap(), label_of_word_j(&w));
    }
}

fn coxeter_m(side_gens: &[Gen], edge: impl Fn(Gen, Gen) -> bool) {
    for &a in side_gens {
        for &b in side_gens {
            let m = if a == b {
                1
            } else if edge(a, b) {
                3
            } else {
                2
            };
            let p = a.matrix().mul(&b.matrix());
            assert!(p.pow(m).is_identity(), "({a} {b})^{m}");
            if m > 1 {
                assert!(!p.pow(m - 1).is_identity(), "({a} {b}) has order below {m}");
            }
        }
    }
}

#[test]
fn coxeter_presentations() {
    // E7: chain 1-2-3-4-5-6 with 3' attached to 4
    let e7_node = |g: Gen| match g {
        Gen::S1 => 1,
        Gen::S2 => 2,
        Gen::S3 => 3,
        Gen::S4 => 4,
        Gen::S5 => 5,
        Gen::S6 => 6,
        _ => 0,
    };
    coxeter_m(&W_GENS, |a, b| match (a, b) {
        (Gen::S3p, x) | (x, Gen::S3p) => x == Gen::S4,
        _ => (e7_node(a) - e7_node(b) as i32).abs() == 1,
    });
    // D6: chain 1-2-3-4-5 with 1' attached to 2
    let d6_node = |g: Gen| match g {
        Gen::A1 => 1,
        Gen::A2 => 2,
        Gen::A3 => 3,
        Gen::A4 => 4,
        Gen::A5 => 5,
        _ => 0,
    };
    coxeter_m(&V_GENS, |a, b| match (a, b) {
        (Gen::A1p, x) | (x, Gen::A1p) => x == Gen::A2,
        _ => (d6_node(a) - d6_node(b) as i32).abs() == 1,
    });
}

#[test]
fn central_involutions_commute() {
    let z = mat_z();
    for g in W_GENS {
        assert_eq!(z.mul(&g.matrix()), g.matrix().mul(&z), "{g}");
    }
    let z1 = mat_z1();
    for g in V_GENS {
        assert_eq!(z1.mul(&g.matrix()), g.matrix().mul(&z1), "{g}");
    }
    assert!(z.mul(&z).is_identity());
    assert!(z1.mul(&z1).is_identity());
}

#[test]
fn central_involution_lies_in_h() {
    // Z maps v(0,7) to -v(0,7), so Z = g * alpha with alpha any word for
    // -v(0,7) and g in G. Generators are involutions, so alpha^-1 is the
    // reversed word.
    let reps = representative_words(MLabel::pos(0, 7), &W_GENS, act_m);
    let mut w = reps[&MLabel::neg(0, 7)].clone();
    w.reverse();
    let alpha_inv = word_to_matrix(&GenWord(w), Side::W).unwrap();
    let g = mat_z().mul(&alpha_inv);
    assert!(closure_contains(&NamedGroup::G.generators(), &g));
    let z1 = mat_z1();
    assert!(closure_contains(&NamedGroup::H1.generators(), &z1));
    assert!(!closure_contains(&NamedGroup::GJ.generators(), &z1));
}

#[test]
fn group_orders() {
    let t = std::time::Instant::now();
    assert_eq!(group_order(NamedGroup::GJ, false).unwrap(), 720);
    assert_eq!(group_order(NamedGroup::GL, false).unwrap(), 1920);
    assert_eq!(group_order(NamedGroup::H1, false).unwrap(), 23040);
    assert_eq!(group_order(NamedGroup::Q, false).unwrap(), 23040);
    assert_eq!(group_order(NamedGroup::G, false).unwrap(), 51840);
    assert!(t.elapsed().as_secs() < 120);
}

#[test]
fn coset_census_is_56() {
    assert_eq!(m_coset_census(), 56);
}

#[test]
fn q_orbits_match_listed_sets() {
    let [blue, red, j] = orbits_q();
    let mut want_blue = BTreeSet::new();
    let mut want_red = BTreeSet::new();
    for k in 2..=7 {
        want_blue.insert(MLabel::pos(0, k));
        want_blue.insert(MLabel::neg(1, k));
        want_red.insert(MLabel::pos(1, k));
        want_red.insert(MLabel::neg(0, k));
    }
    let mut want_j = BTreeSet::from([MLabel::pos(0, 1), MLabel::neg(0, 1)]);
    for i in 2..=7 {
        for k in i + 1..=7 {
            want_j.insert(MLabel::pos(i, k));
            want_j.insert(MLabel::neg(i, k));
        }
    }
    assert_eq!(blue.into_iter().collect::<BTreeSet<_>>(), want_blue);
    assert_eq!(red.into_iter().collect::<BTreeSet<_>>(), want_red);
    assert_eq!(j.into_iter().collect::<BTreeSet<_>>(), want_j);
}

#[test]
fn gamma1_is_equivariant() {
    for g in Q_GENS {
        let h = m_iso(g).unwrap();
        for t in MLabel::all() {
            let (c0, lhs) = gamma1(act_m(g, t));
            let (c1, x) = gamma1(t);
            assert_eq!(c0, c1, "{g} moves {t} across orbits");
            assert_eq!(lhs, act_t(h, x), "{g} on {t}");
        }
    }
}

#[test]
fn gamma1_is_bijective_per_orbit() {
    let [blue, red, j] = orbits_q();
    let ls: BTreeSet<TLabel> = LLabel::all().into_iter().map(TLabel::L).collect();
    let js: BTreeSet<TLabel> = JLabel::all().into_iter().map(TLabel::J).collect();
    for (orbit, target) in [(blue, &ls), (red, &ls), (j, &js)] {
        let image: BTreeSet<TLabel> = orbit.iter().map(|t| gamma1(*t).1).collect();
        assert_eq!(image.len(), orbit.len());
        assert_eq!(&image, target);
    }
}

#[test]
fn metric_suite() {
    let all = MLabel::all();
    for &u in &all {
        for &v in &all {
            let d = dd(u, v);
            assert!([0, 2, 4, 6].contains(&d));
            assert_eq!(d, dd(v, u));
            assert_eq!(d + dd(u, central_m(v)), 6);
            assert_eq!(d, dd(u.negate(), v.negate()));
            assert_eq!(d, dd_by_cases(u, v), "{u} {v}");
            for g in W_GENS {
                assert_eq!(d, dd(act_m(g, u), act_m(g, v)), "{g} on {u},{v}");
            }
        }
    }
}

#[test]
fn compression() {
    let all = MLabel::all();
    for &u in &all {
        for &v in &all {
            let (cu, su) = gamma1(u);
            let (cv, sv) = gamma1(v);
            let opposite_colors = matches!(
                (cu, cv),
                (OrbitColor::BlueL, OrbitColor::RedL) | (OrbitColor::RedL, OrbitColor::BlueL)
            );
            let want = if opposite_colors { dd(u, v) - 2 } else { dd(u, v) };
            assert_eq!(t_distance(su, sv), want, "{u} {v}");
            assert_eq!(t_distance_by_cases(su, sv), want, "{u} {v}");
            if opposite_colors && su == sv {
                assert_eq!(dd(u, v), 2);
            }
        }
    }
}

#[test]
fn hamming_on_j_pairs() {
    for a in JLabel::all() {
        for b in JLabel::all() {
            assert_eq!(t_distance(TLabel::J(a), TLabel::J(b)), a.hamming(b));
        }
    }
}

#[test]
fn vector_sign_pattern_by_color() {
    for t in MLabel::all() {
        let v = vij_vector(t);
        match color_of(t) {
            OrbitColor::BlueL => assert!(v[0] > v[1], "{t}"),
            OrbitColor::RedL => assert!(v[0] < v[1], "{t}"),
            OrbitColor::J => assert_eq!(v[0], v[1], "{t}"),
        }
    }
}

fn tags(c: &TripleCensus) -> BTreeMap<String, usize> {
    c.orbits.iter().map(|o| (o.tag.clone(), o.size)).collect()
}

#[test]
fn triple_censuses() {
    let t = std::time::Instant::now();
    let m = triple_census(Space::M);
    assert_eq!(m.total, 27720);
    assert_eq!(m.orbits.len(), 5);
    assert!(m.orbits.iter().all(|o| o.tag_constant));
    assert_eq!(
        tags(&m).keys().cloned().collect::<Vec<_>>(),
        ["222", "224", "244", "246", "444"]
    );

    let j = triple_census(Space::J);
    assert_eq!(j.total, 4960);
    assert_eq!(j.orbits.len(), 5);
    assert!(j.orbits.iter().all(|o| o.tag_constant));
    assert_eq!(tags(&j).len(), 5);

    let l = triple_census(Space::L);
    assert_eq!(l.total, 220);
    assert_eq!(tags(&l), BTreeMap::from([("coherent".into(), 160), ("incoherent".into(), 60)]));

    let tt = triple_census(Space::T);
    assert_eq!(tt.total, 13244);
    assert_eq!(tt.orbits.len(), 18);
    assert!(tt.orbits.iter().all(|o| o.tag_constant));
    assert_eq!(tags(&tt).len(), 15, "sorted distances merge three orbit pairs");
    let refined: BTreeSet<&str> = tt.orbits.iter().map(|o| o.refined_tag.as_str()).collect();
    assert_eq!(refined.len(), 18);
    let count = |p: &str| tt.orbits.iter().filter(|o| o.tag.starts_with(p)).count();
    assert_eq!((count("LLL"), count("LLJ"), count("LJJ"), count("JJJ")), (2, 4, 7, 5));
    assert!(t.elapsed().as_secs() < 60);
}

#[test]
fn dd_case_table_examples() {
    // same sign, one shared index
    assert_eq!(dd(MLabel::pos(0, 7), MLabel::pos(0, 6)), 2);
    // opposite sign, disjoint
    assert_eq!(dd(MLabel::pos(0, 1), MLabel::neg(2, 3)), 2);
    // same sign, disjoint
    assert_eq!(dd(MLabel::pos(0, 1), MLabel::pos(2, 3)), 4);
    // opposite sign, one shared
    assert_eq!(dd(MLabel::pos(0, 1), MLabel::neg(1, 3)), 4);
}
