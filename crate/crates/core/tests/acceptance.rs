//! Acceptance checks. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any failed.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ibn_core::exec::Execution;
use ibn_core::io::{
    deserialize_matrix, deserialize_ring_matrix, deserialize_witness, serialize_matrix, serialize_ring_matrix,
    serialize_witness,
};
use ibn_core::leavitt::{leavitt_generators, normal_form_with, RewriteBudget, Strategy};
use ibn_core::witness::{certify_grid, selection_matrix, split_apply, Verdict};
use ibn_core::{
    certify, normal_form, trace_ring_matrix, trace_structured, verify_witness, witness_pair, Block, Certificate,
    Generator, NcPoly, RingMatrix, StructuredMatrix, Word,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x1b4e_5eed ^ stream)
}

fn witness_grid() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for k in 1..=5u64 {
        for m in 1..=8usize {
            for n in 1..=8usize {
                if m.abs_diff(n) % k as usize != 0 {
                    continue;
                }
                let w = witness_pair(k, m, n).map_err(|e| format!("witness_pair({k},{m},{n}): {e}"))?;
                let xy = w.x().mul(w.y()).map_err(|e| e.to_string())?;
                let yx = w.y().mul(w.x()).map_err(|e| e.to_string())?;
                let id_m = RingMatrix::identity(k, m).unwrap();
                let id_n = RingMatrix::identity(k, n).unwrap();
                if !xy.equals(&id_m).unwrap() || !yx.equals(&id_n).unwrap() {
                    return Err(format!("({k},{m},{n}) products are not identities"));
                }
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(60) {
        return Err(format!("{checked} witnesses verified but took {elapsed:.2?}"));
    }
    Ok(format!("{checked} witnesses verified in {elapsed:.2?}"))
}

fn trace_table() -> Outcome {
    for k in 1..=7u64 {
        let t = trace_structured(&StructuredMatrix::identity(k).unwrap()).unwrap();
        if t.value() != 1 % k {
            return Err(format!("T_{k}(I) = {t}"));
        }
        for m in 1..=10usize {
            let t = trace_ring_matrix(&RingMatrix::identity(k, m).unwrap()).unwrap();
            if t.value() != m as u64 % k {
                return Err(format!("k={k} m={m}: trace {t}"));
            }
        }
    }
    Ok("70 identity traces equal m mod k, T_k(I) = 1 for k <= 7".into())
}

fn obstruction_dichotomy() -> Outcome {
    let mut impossible = 0;
    for cell in certify_grid(&[1, 2, 3, 4, 5], 1..=8, Execution::default()) {
        let (k, m, n) = (cell.k, cell.m, cell.n);
        let verdict = cell.outcome.map_err(|e| format!("({k},{m},{n}): {e}"))?;
        let congruent = m.abs_diff(n) % k as usize == 0;
        match verdict {
            Verdict::Isomorphic { .. } if congruent => {}
            Verdict::Impossible(o) if !congruent => {
                if o.trace_m.value() != (m as u64) % k || o.trace_n.value() != (n as u64) % k {
                    return Err(format!("({k},{m},{n}): residues {} and {}", o.trace_m, o.trace_n));
                }
                impossible += 1;
            }
            other => return Err(format!("({k},{m},{n}): wrong verdict {other:?}")),
        }
    }
    match certify(2, 1, 2).map_err(|e| e.to_string())? {
        Certificate::Impossible(o) if o.to_string() == "𝔗_2(I_1)=1 ≠ 0=𝔗_2(I_2) mod 2" => {}
        other => return Err(format!("certify(2,1,2) gave {other:?}")),
    }
    Ok(format!("{impossible} incongruent cells obstructed, all congruent cells isomorphic"))
}

fn display_example() -> Outcome {
    let entries = (1..=7u64).flat_map(|i| (1..=7u64).map(move |j| (i, j, (i * j) as i64)));
    let a = StructuredMatrix::from_entries(2, entries).unwrap();
    let expected = [
        ((1, 1), vec![vec![1i64]]),
        ((1, 3), vec![vec![4, 5]]),
        ((2, 1), vec![vec![2], vec![3]]),
        ((3, 4), vec![vec![24, 28], vec![30, 35]]),
    ];
    for ((m, n), rows) in expected {
        let got = a.block_at(m, n).unwrap();
        if got != Block::from_rows(rows.clone()).unwrap() {
            return Err(format!("block ({m},{n}) is {got}, expected {rows:?}"));
        }
    }
    Ok("blocks (1,1), (1,3), (2,1), (3,4) match".into())
}

const N: u64 = 60;

fn master_oracle() -> Outcome {
    let mut r = rng(5);
    let check = |what: &str, idx: usize, a: &StructuredMatrix, model: &Sparse| -> Result<(), String> {
        match first_disagreement(a, model, N) {
            None => Ok(()),
            Some((i, j, got, want)) => Err(format!("{what} #{idx}: entry ({i},{j}) is {got}, expected {want}")),
        }
    };
    let mut nonzero_products = 0;
    for idx in 0..500 {
        let k = r.gen_range(1..=3);
        let a = random_matrix(&mut r, k);
        let b = random_matrix(&mut r, k);
        let (wa, wb) = (window(&a, N), window(&b, N));
        let prod = product_window(&a, &b, N);
        nonzero_products += usize::from(!prod.is_empty());
        check("operand", idx, &a, &wa)?;

        check("add", idx, &a.add(&b).unwrap(), &sparse_add(&wa, &wb))?;
        check("mul", idx, &a.mul(&b).unwrap(), &prod)?;
        check("transpose", idx, &a.transpose(), &transpose_window(&wa))?;
        let sum = a.add(&b).unwrap();
        check("canonicalize", idx, &sum.canonicalize().unwrap(), &sparse_add(&wa, &wb))?;

        let parts = split_apply(&a).unwrap();
        for (l, part) in (1..).zip(&parts) {
            check("splitApply", idx, part, &split_window(&a, l, N))?;
            let via_mul = a.mul(&selection_matrix(k, l).unwrap()).unwrap();
            if !via_mul.equals(part).unwrap() {
                return Err(format!("splitApply #{idx}: part {l} differs from A X_{l}"));
            }
        }
    }
    Ok(format!("500 pairs x 5 operations agree on all i, j <= {N} ({nonzero_products} nonzero products)"))
}

fn cyclic_traces() -> Outcome {
    let mut r = rng(6);
    let mut nonzero = 0;
    // every trace vanishes mod 1, so sample k >= 2
    for idx in 0..500 {
        let k = r.gen_range(2..=4);
        let a = random_matrix(&mut r, k);
        let b = random_matrix(&mut r, k);
        let ab = trace_structured(&a.mul(&b).unwrap()).unwrap();
        let ba = trace_structured(&b.mul(&a).unwrap()).unwrap();
        if ab != ba {
            return Err(format!("structured #{idx} (k={k}): {ab} vs {ba}"));
        }
        nonzero += usize::from(ab.value() != 0);
    }
    for idx in 0..200 {
        let k = r.gen_range(2..=3);
        let (m, n) = (r.gen_range(1..=5), r.gen_range(1..=5));
        let x = random_ring_matrix(&mut r, k, m, n);
        let y = random_ring_matrix(&mut r, k, n, m);
        let xy = trace_ring_matrix(&x.mul(&y).unwrap()).unwrap();
        let yx = trace_ring_matrix(&y.mul(&x).unwrap()).unwrap();
        if xy != yx {
            return Err(format!("ring #{idx} (k={k}, {m}x{n}): {xy} vs {yx}"));
        }
        nonzero += usize::from(xy.value() != 0);
    }
    Ok(format!("500 structured and 200 ring-matrix pairs ({nonzero} nonzero traces)"))
}

fn leavitt_relations() -> Outcome {
    for p in 2..=4u32 {
        let f = leavitt_generators(p).map_err(|e| format!("p={p}: {e}"))?;
        let k = f.k();
        let id = StructuredMatrix::identity(k).unwrap();
        let mut sum = StructuredMatrix::zero(k).unwrap();
        for i in 1..=p {
            sum = sum.add(&f.image(Generator::x(i)).unwrap().mul(f.image(Generator::y(i)).unwrap()).unwrap()).unwrap();
            for j in 1..=p {
                let prod = f.image(Generator::y(i)).unwrap().mul(f.image(Generator::x(j)).unwrap()).unwrap();
                let want = if i == j { id.clone() } else { StructuredMatrix::zero(k).unwrap() };
                if !prod.equals(&want).unwrap() {
                    return Err(format!("p={p}: f(y{i}) f(x{j}) is wrong"));
                }
            }
        }
        if !sum.equals(&id).unwrap() {
            return Err(format!("p={p}: sum f(x_i) f(y_i) is not the identity"));
        }
    }

    let mut r = rng(7);
    let homs: Vec<_> = (2..=4).map(|p| leavitt_generators(p).unwrap()).collect();
    let mut rewritten = 0;
    for idx in 0..500 {
        let p = r.gen_range(2..=4u32);
        let u = random_poly(&mut r, p, 8);
        let left = normal_form_with(&u, Strategy::Leftmost, RewriteBudget::default()).map_err(|e| e.to_string())?;
        let right = normal_form_with(&u, Strategy::Rightmost, RewriteBudget::default()).map_err(|e| e.to_string())?;
        if left != right {
            return Err(format!("#{idx}: strategies disagree on {u}"));
        }
        rewritten += usize::from(left != u);
        let f = &homs[(p - 2) as usize];
        if !f.eval(&left).unwrap().equals(&f.eval(&u).unwrap()).unwrap() {
            return Err(format!("#{idx}: f(nf(u)) != f(u) for u = {u}"));
        }
    }

    let xy = NcPoly::monomial(1, Word(vec![Generator::x(1), Generator::y(1)]), 1).unwrap();
    let yx = NcPoly::monomial(1, Word(vec![Generator::y(1), Generator::x(1)]), 1).unwrap();
    let one = NcPoly::one(1).unwrap();
    if normal_form(&xy).unwrap() != one || normal_form(&yx).unwrap() != one {
        return Err("p=1: x y or y x does not reduce to 1".into());
    }
    Ok(format!("relations for p = 2, 3, 4; 500 samples ({rewritten} changed by rewriting); p = 1"))
}

fn round_trips() -> Outcome {
    let mut r = rng(8);
    for idx in 0..200 {
        let k = r.gen_range(1..=3);
        match idx % 4 {
            0 | 1 => {
                let a = random_matrix(&mut r, k).canonicalize().unwrap();
                let text = serialize_matrix(&a).unwrap();
                let back = deserialize_matrix(&text).map_err(|e| format!("#{idx}: {e}"))?;
                if back != a || serialize_matrix(&back).unwrap() != text {
                    return Err(format!("#{idx}: matrix changed in round trip"));
                }
                let again = serialize_matrix(&random_copy(&a).canonicalize().unwrap()).unwrap();
                if again != text {
                    return Err(format!("#{idx}: canonical serialization is not stable"));
                }
            }
            2 => {
                let (m, n) = (r.gen_range(1..=3), r.gen_range(1..=3));
                let w = random_ring_matrix(&mut r, k, m, n).canonicalize().unwrap();
                let text = serialize_ring_matrix(&w).unwrap();
                let back = deserialize_ring_matrix(&text).map_err(|e| format!("#{idx}: {e}"))?;
                if back != w || serialize_ring_matrix(&back).unwrap() != text {
                    return Err(format!("#{idx}: ring matrix changed in round trip"));
                }
            }
            _ => {
                let m = r.gen_range(1..=4);
                let n = m + k as usize * r.gen_range(0..=1);
                let w = witness_pair(k, m, n).unwrap();
                let text = serialize_witness(&w).unwrap();
                let back = deserialize_witness(&text).map_err(|e| format!("#{idx}: {e}"))?;
                if back != w || !verify_witness(&back).unwrap().passed {
                    return Err(format!("#{idx}: witness changed in round trip"));
                }
                if serialize_witness(&witness_pair(k, m, n).unwrap()).unwrap() != text {
                    return Err(format!("#{idx}: witness serialization is not stable"));
                }
            }
        }
    }
    Ok("200 values round-trip, serialization byte-stable".into())
}

/// Same matrix rebuilt from its parts in reverse order.
fn random_copy(a: &StructuredMatrix) -> StructuredMatrix {
    let mut blocks: Vec<_> = a.blocks().map(|(i, b)| (*i, b.clone())).collect();
    blocks.reverse();
    let terms = a.patterns().iter().rev().copied().collect();
    StructuredMatrix::from_parts(a.k(), blocks, terms).unwrap()
}

fn main() -> ExitCode {
    let criteria: [Check; 8] = [
        ("witness grid", witness_grid),
        ("trace table", trace_table),
        ("obstruction dichotomy", obstruction_dichotomy),
        ("display example", display_example),
        ("master oracle", master_oracle),
        ("cyclic traces", cyclic_traces),
        ("leavitt relations", leavitt_relations),
        ("round-trip determinism", round_trips),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
