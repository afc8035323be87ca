//! Algebraic laws of profunctor composition, each checked on one sampled
//! configuration. Every function returns `Err` with a description on failure.

use profnet::grpd::conjugate_subgroup;
use profnet::prof::Profunctor;
use profnet::Groupoid;

use super::{catalog, oracle_compose, out_of, random_prof, ActionSet};

type LawResult = Result<(), String>;

fn iso(lhs: &Profunctor, rhs: &Profunctor, what: &str) -> LawResult {
    match lhs.is_isomorphic(rhs) {
        Some(_) => Ok(()),
        None => Err(format!("{what}: sides not isomorphic ({} vs {} elements)", lhs.num_elements(), rhs.num_elements())),
    }
}

fn pick(ix: usize) -> Groupoid {
    let cat = catalog();
    cat[ix % cat.len()].clone()
}

fn err(e: profnet::Error) -> String {
    e.to_string()
}

pub fn associativity(ixs: [usize; 4], seed: u64) -> LawResult {
    let [a, b, c, d] = ixs.map(pick);
    let p = random_prof(&a, &b, seed, 2);
    let q = random_prof(&b, &c, seed ^ 0x5151, 2);
    let r = random_prof(&c, &d, seed ^ 0xa3a3, 2);
    let left = p.compose(&q).and_then(|pq| pq.compose(&r)).map_err(err)?;
    let right = q.compose(&r).and_then(|qr| p.compose(&qr)).map_err(err)?;
    iso(&left, &right, "associativity")
}

pub fn unit(ixs: [usize; 2], seed: u64) -> LawResult {
    let [a, b] = ixs.map(pick);
    let p = random_prof(&a, &b, seed, 3);
    let left = Profunctor::identity(&a).compose(&p).map_err(err)?;
    let right = p.compose(&Profunctor::identity(&b)).map_err(err)?;
    iso(&left, &p, "left unit")?;
    iso(&right, &p, "right unit")
}

pub fn sum_distributes(ixs: [usize; 3], seed: u64) -> LawResult {
    let [a, b, c] = ixs.map(pick);
    let p1 = random_prof(&a, &b, seed, 2);
    let p2 = random_prof(&a, &b, seed ^ 0x77, 2);
    let q1 = random_prof(&b, &c, seed ^ 0x1234, 2);
    let q2 = random_prof(&b, &c, seed ^ 0x4321, 2);

    let summed = Profunctor::sum(&a, &b, &[p1.clone(), p2.clone()]).map_err(err)?;
    let left = summed.compose(&q1).map_err(err)?;
    let parts = [p1.compose(&q1).map_err(err)?, p2.compose(&q1).map_err(err)?];
    iso(&left, &Profunctor::sum(&a, &c, &parts).map_err(err)?, "right distributivity")?;

    let summed = Profunctor::sum(&b, &c, &[q1.clone(), q2.clone()]).map_err(err)?;
    let left = p1.compose(&summed).map_err(err)?;
    let parts = [p1.compose(&q1).map_err(err)?, p1.compose(&q2).map_err(err)?];
    iso(&left, &Profunctor::sum(&a, &c, &parts).map_err(err)?, "left distributivity")
}

pub fn stabilizer_conjugation(ixs: [usize; 2], seed: u64) -> LawResult {
    let [a, b] = ixs.map(pick);
    let p = random_prof(&a, &b, seed, 3);
    for x in p.elements() {
        for m in out_of(p.cat(), p.elem_obj(x)) {
            let expected = conjugate_subgroup(p.cat(), &p.stabilizer(x), m).map_err(err)?;
            if p.stabilizer(p.act_cat(x, m)) != expected {
                return Err(format!("stabilizer of {x:?} moved by {m} is not the conjugate"));
            }
        }
    }
    Ok(())
}

pub fn composition_matches_naive_coend(ixs: [usize; 3], seed: u64) -> LawResult {
    let [a, b, c] = ixs.map(pick);
    let p = random_prof(&a, &b, seed, 2);
    let q = random_prof(&b, &c, seed ^ 0xbeef, 2);
    let composed = p.compose(&q).map_err(err)?;
    if ActionSet::of(&composed).marks() != oracle_compose(&p, &q).marks() {
        return Err("orbit marks differ from the naive coend".into());
    }
    if composed.truncate() != p.truncate().then(&q.truncate()) {
        return Err("truncation does not commute with composition".into());
    }
    Ok(())
}

/// Runs every law over a deterministic sweep of `cases` configurations and
/// returns the number of failures together with the first message.
pub fn sweep(cases: u64) -> (usize, Option<String>) {
    let mut failures = 0;
    let mut first = None;
    for seed in 0..cases {
        let i = seed as usize;
        let ixs = [i, i / 3 + 1, i / 7 + 2, i / 11 + 3];
        let results = [
            associativity(ixs, seed),
            unit([ixs[0], ixs[1]], seed),
            sum_distributes([ixs[0], ixs[1], ixs[2]], seed),
            stabilizer_conjugation([ixs[1], ixs[2]], seed),
            composition_matches_naive_coend([ixs[0], ixs[2], ixs[3]], seed),
        ];
        for r in results {
            if let Err(msg) = r {
                failures += 1;
                first.get_or_insert(format!("seed {seed}: {msg}"));
            }
        }
    }
    (failures, first)
}
