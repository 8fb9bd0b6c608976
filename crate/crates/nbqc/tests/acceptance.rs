//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod oracle;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use nbqc::simulator::priors_from_samples;
use nbqc_core::codec::{QspaDecoder, SparseGfMatrix};
use nbqc_core::gf2m::{gcd, min_lambda, FieldDesc, GfElem};
use nbqc_core::protograph::Protograph;
use nbqc_core::qclift::{frc_lifted, lift_cycle, spectra_from_walks, AceSpectrum, QcCode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

type Outcome = Result<String, String>;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_nbqc")
}

fn protograph_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("protographs").join(name)
}

fn nbqc(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut c = Command::new(bin());
    c.args(args).env_remove("NBQC_THREADS");
    for (k, v) in envs {
        c.env(k, v);
    }
    c.output().expect("nbqc runs")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1. Closed-form full-rank condition against elimination of the expansion.
fn full_rank_condition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let (mut full, mut deficient) = (0, 0);
    for inst in 0..1200 {
        let field = oracle::random_field(&mut rng, &[4, 8, 16, 64]);
        let len = [4, 6, 8][rng.random_range(0..3)];
        let h = len / 2;
        let rows: Vec<Vec<u32>> = (0..h).map(|i| (0..h).map(|j| u32::from(j == i || j == (i + 1) % h)).collect()).collect();
        let proto = Protograph::from_base_matrix(&rows).unwrap();
        let z = rng.random_range(1..=16);
        let step = min_lambda(field.q(), z);
        let lambda = step * rng.random_range(1..=field.order() / step);
        let shifts = (0..proto.n_edges()).map(|_| rng.random_range(0..z)).collect();
        let labels = (0..proto.n_edges()).map(|_| rng.random_range(0..field.order())).collect();
        let code = QcCode::new(proto, z, shifts, Some(labels), lambda, field.clone()).map_err(|e| format!("instance {inst}: {e}"))?;
        let walks = code.proto().enumerate_closed_walks(len, 1000).unwrap();
        let walk = walks.iter().find(|w| w.len() == len).ok_or(format!("instance {inst}: no cycle"))?;
        let predicted = frc_lifted(walk, &code).map_err(|e| e.to_string())?;
        let dense = oracle::mcpm_dense(&code);
        ensure(code.expand().unwrap().to_dense() == dense, || format!("instance {inst}: expansion differs from MCPM definition"))?;
        let actual = oracle::rank(dense, &field) == code.m();
        ensure(predicted == actual, || format!("instance {inst}: q={} Z={z} l={len}: predicted {predicted}, rank says {actual}", field.q()))?;
        if actual {
            full += 1;
        } else {
            deficient += 1;
        }
    }
    ensure(deficient > 0 && full > 0, || "instances did not exercise both outcomes".into())?;
    Ok(format!("{} instances agree ({full} full rank, {deficient} deficient)", full + deficient))
}

// 2. A base cycle lifts to gcd(Z, d) cycles of length l*O and ACE tau*O.
fn lift_structure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let (mut simple, mut total, mut codes) = (0, 0, 0);
    while simple < 600 {
        let m = rng.random_range(2..=4);
        let n = rng.random_range(3..=6);
        let proto = oracle::random_protograph(&mut rng, m, n, 1, 0.6);
        let z = rng.random_range(1..=12);
        let shifts: Vec<u32> = (0..proto.n_edges()).map(|_| rng.random_range(0..z)).collect();
        let code = QcCode::new(proto.clone(), z, shifts.clone(), None, 1, FieldDesc::with_size(2).unwrap()).unwrap();
        codes += 1;
        for walk in proto.enumerate_closed_walks(8, 100_000).unwrap() {
            let d = walk.edges.iter().enumerate().fold(0i64, |acc, (k, &e)| {
                acc + if k % 2 == 0 { shifts[e] as i64 } else { -(shifts[e] as i64) }
            });
            let g = gcd(z as u64, d.rem_euclid(z as i64) as u64) as usize;
            let order = z as usize / g;
            let tau: u64 = walk.vars.iter().map(|&v| proto.var_degree(v) as u64 - 2).sum();
            let t = oracle::traverse_lift(&code, &walk);
            let ctx = || format!("walk {:?} Z={z} d={d}: traversal {t:?}", walk.edges);
            ensure(t.cycles == g, ctx)?;
            ensure(t.lengths.iter().all(|&l| l == walk.len() * order), ctx)?;
            ensure(t.aces.iter().all(|&a| a == tau * order as u64), ctx)?;
            let class = lift_cycle(&walk, &code);
            ensure(class.count as usize == g && class.lifted_len == walk.len() * order && class.lifted_ace == tau * order as u64, ctx)?;
            ensure(class.simple == t.all_simple, ctx)?;
            let mut nodes: Vec<(bool, usize)> = walk.checks.iter().map(|&c| (false, c)).chain(walk.vars.iter().map(|&v| (true, v))).collect();
            nodes.sort_unstable();
            nodes.dedup();
            if nodes.len() == walk.len() {
                simple += 1;
            }
            total += 1;
        }
    }
    Ok(format!("{simple} simple base cycles ({total} walks, {codes} lifts) agree"))
}

// 3. Walk-projected spectra against cycle enumeration on the lifted graph.
fn spectrum_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut done = 0;
    let mut finite_nb_diff = 0;
    while done < 200 {
        let m = rng.random_range(2..=4);
        let n = rng.random_range(3..=8);
        let proto = oracle::random_protograph(&mut rng, m, n, 2, 0.55);
        let z = rng.random_range(2..=(200 / n as u32).min(13));
        let Some(shifts) = oracle::random_shifts(&mut rng, &proto, z) else { continue };
        let field = oracle::random_field(&mut rng, &[4, 8, 16]);
        let step = min_lambda(field.q(), z);
        let lambda = step * rng.random_range(1..=field.order() / step);
        let labels = (0..proto.n_edges()).map(|_| rng.random_range(0..field.order())).collect();
        let code = QcCode::new(proto, z, shifts, Some(labels), lambda, field).unwrap();
        let depth = [4, 6, 8][rng.random_range(0..3)];
        let walks = code.proto().enumerate_closed_walks(depth, 1_000_000).unwrap();
        let fast = spectra_from_walks(&code, &walks, depth);
        let (binary, nb) = oracle::brute_spectra(&code.expand().unwrap(), depth);
        let fast_nb = fast.nb.unwrap();
        ensure(fast.binary == binary, || format!("code {done} depth {depth}: binary {} vs brute {binary}", fast.binary))?;
        ensure(fast_nb == nb, || format!("code {done} depth {depth}: nb {fast_nb} vs brute {nb}"))?;
        if fast_nb != fast.binary {
            finite_nb_diff += 1;
        }
        done += 1;
    }
    Ok(format!("{done} codes agree ({finite_nb_diff} with NB != binary)"))
}

// 4. Feasibility of the two ensemble targets through the CLI.
fn construct_ensemble(dir: &Path, file: &str, z: &str, q: &str, b: &str, nb: &str, out: &str) -> Result<(QcCode, Duration), String> {
    let start = Instant::now();
    let out_path = dir.join(out);
    let proto = protograph_path(file);
    let o = nbqc(
        &["construct", "--proto", proto.to_str().unwrap(), "--Z", z, "--q", q, "--ace-b", b, "--ace-nb", nb, "--seed", "1", "--out", out_path.to_str().unwrap()],
        &[],
    );
    let elapsed = start.elapsed();
    ensure(o.status.code() == Some(0), || format!("{file}: exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr)))?;
    let (_, code) = nbqc::descriptor::load(&out_path).map_err(|e| e.to_string())?;
    ensure((code.proto().design_rate() - 0.5).abs() < 1e-12, || format!("{file}: rate {}", code.proto().design_rate()))?;
    let tb: AceSpectrum = b.parse().unwrap();
    let tnb: AceSpectrum = nb.parse().unwrap();
    // Independent check on the lifted graph.
    let (binary, _) = oracle::brute_spectra(&code.expand_binary().unwrap(), tb.depth());
    let (_, nb_brute) = oracle::brute_spectra(&code.expand().unwrap(), tnb.depth());
    ensure(binary.achieves(&tb), || format!("{file}: binary {binary} misses {tb}"))?;
    ensure(nb_brute.achieves(&tnb), || format!("{file}: nb {nb_brute} misses {tnb}"))?;
    ensure(elapsed < Duration::from_secs(600), || format!("{file}: {elapsed:?}"))?;
    Ok((code, elapsed))
}

fn ensemble_feasibility(dir: &Path) -> Outcome {
    let (_, t1) = construct_ensemble(dir, "ensemble1.txt", "9", "16", "inf,inf,inf,4", "inf,inf,inf,inf,inf,4", "acenb1.json")?;
    let (_, t2) = construct_ensemble(dir, "ensemble2.txt", "21", "8", "inf,inf,inf,6,2", "inf,inf,inf,inf,6,2", "acenb2.json")?;
    Ok(format!("ensemble 1 in {:.2}s, ensemble 2 in {:.2}s", t1.as_secs_f64(), t2.as_secs_f64()))
}

// 5. QSPA against exhaustive block MAP on a small tree code over GF(4).
fn map_agreement() -> Outcome {
    let field = FieldDesc::with_size(4).unwrap();
    let e = |v: u32| field.elem(v).unwrap();
    let dense: Vec<Vec<GfElem>> = [[1, 2, 3, 0, 0], [0, 0, 1, 2, 3]].iter().map(|r| r.iter().map(|&v| e(v)).collect()).collect();
    let h = SparseGfMatrix::from_dense(&dense, field.clone()).unwrap();
    let n = 5;
    let codebook: Vec<Vec<GfElem>> = (0..4u32.pow(n as u32))
        .map(|x| (0..n).map(|i| e((x >> (2 * i)) & 3)).collect::<Vec<_>>())
        .filter(|c: &Vec<GfElem>| {
            dense.iter().all(|row| row.iter().zip(c).fold(GfElem::ZERO, |acc, (&a, &b)| field.add(acc, field.mul(a, b))).is_zero())
        })
        .collect();
    ensure(codebook.len() == 64, || format!("codebook has {} words", codebook.len()))?;
    let decoder = QspaDecoder::new(&h);

    // (map block error, qspa == map)
    let frame = |sigma: f64, rng: &mut ChaCha8Rng| -> (bool, bool) {
        let sent = &codebook[rng.random_range(0..codebook.len())];
        let noise = Normal::new(0.0, sigma).unwrap();
        let samples: Vec<f64> = sent
            .iter()
            .flat_map(|s| (0..2).map(move |j| if (s.value() >> j) & 1 == 0 { 1.0 } else { -1.0 }))
            .map(|x| x + noise.sample(rng))
            .collect();
        let priors = priors_from_samples(&samples, sigma, &field);
        let score = |c: &Vec<GfElem>| -> f64 { c.iter().enumerate().map(|(i, s)| priors[i * 4 + s.value() as usize].ln()).sum() };
        let map = codebook.iter().max_by(|a, b| score(a).total_cmp(&score(b))).unwrap();
        let qspa = decoder.decode(&priors, 80).unwrap().hard_decision;
        (map != sent, &qspa == map)
    };
    let map_bler = |sigma: f64, seed: u64, frames: usize| -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..frames).filter(|_| frame(sigma, &mut rng).0).count() as f64 / frames as f64
    };
    let (mut lo, mut hi) = (0.2, 3.0);
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if map_bler(mid, 77, 4000) < 0.10 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let sigma = 0.5 * (lo + hi);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let (mut errors, mut agree) = (0, 0);
    for _ in 0..1000 {
        let (err, same) = frame(sigma, &mut rng);
        errors += usize::from(err);
        agree += usize::from(same);
    }
    let bler = errors as f64 / 1000.0;
    ensure((0.05..=0.20).contains(&bler), || format!("MAP BLER {bler} at sigma {sigma:.4} outside [0.05, 0.20]"))?;
    ensure(agree >= 950, || format!("{agree}/1000 agree at sigma {sigma:.4}"))?;
    Ok(format!("{agree}/1000 frames agree at sigma {sigma:.4} (MAP BLER {bler:.3})"))
}

// 6. ACENB code against a random-label code on the same mother.
fn simulate_point(dir: &Path, code: &Path, snr: &str, tag: &str) -> Result<(u64, u64), String> {
    let csv = dir.join(format!("{tag}.csv"));
    let o = nbqc(
        &["simulate", code.to_str().unwrap(), "--snr", snr, "--min-errors", "100", "--max-frames", "1000000", "--seed", "2024", "--out", csv.to_str().unwrap()],
        &[],
    );
    ensure(o.status.success(), || format!("simulate {tag}: {}", String::from_utf8_lossy(&o.stderr)))?;
    let text = std::fs::read_to_string(&csv).map_err(|e| e.to_string())?;
    let row: Vec<&str> = text.lines().nth(1).ok_or("empty csv")?.split(',').collect();
    Ok((row[1].parse().unwrap(), row[2].parse().unwrap()))
}

fn bler_ordering(dir: &Path) -> Outcome {
    let acenb = dir.join("acenb1.json");
    let random = dir.join("random1.json");
    let o = nbqc(&["relabel", acenb.to_str().unwrap(), "--seed", "5", "--out", random.to_str().unwrap()], &[]);
    ensure(o.status.success(), || format!("relabel: {}", String::from_utf8_lossy(&o.stderr)))?;
    let snr = "2.0";
    let (fa, ea) = simulate_point(dir, &acenb, snr, "acenb")?;
    let (fr, er) = simulate_point(dir, &random, snr, "random")?;
    ensure(ea >= 100 && er >= 100, || format!("too few errors: {ea}, {er}"))?;
    let (pa, pr) = (ea as f64 / fa as f64, er as f64 / fr as f64);
    let (ia, ir) = (oracle::wilson(ea, fa), oracle::wilson(er, fr));
    let overlap = ia.0 <= ir.1 && ir.0 <= ia.1;
    let detail = format!(
        "{snr} dB: ACENB {ea}/{fa} = {pa:.3e} [{:.3e}, {:.3e}], random {er}/{fr} = {pr:.3e} [{:.3e}, {:.3e}]",
        ia.0, ia.1, ir.0, ir.1
    );
    ensure(pa <= pr || overlap, || detail.clone())?;
    Ok(detail)
}

// 7. Repeated commands with the same seed give identical bytes.
fn determinism(dir: &Path) -> Outcome {
    let toy = dir.join("toy.txt");
    std::fs::write(&toy, "1 1 1 1\n1 1 1 1\n").unwrap();
    let e1 = protograph_path("ensemble1.txt");
    let runs: Vec<(&str, Vec<String>)> = vec![
        ("construct", vec!["construct", "--proto", e1.to_str().unwrap(), "--Z", "9", "--q", "16", "--ace-b", "inf,inf,inf,4", "--ace-nb", "inf,inf,inf,inf,inf,4", "--seed", "3"].into_iter().map(String::from).collect()),
        ("auto", vec!["construct", "--proto", toy.to_str().unwrap(), "--Z", "5", "--q", "4", "--ace-b", "auto", "--ace-nb", "auto", "--depth", "8", "--seed", "9"].into_iter().map(String::from).collect()),
    ];
    let mut compared = 0;
    for (tag, args) in &runs {
        let mut outputs = Vec::new();
        for k in 0..2 {
            let path = dir.join(format!("det-{tag}-{k}.json"));
            let mut a: Vec<&str> = args.iter().map(String::as_str).collect();
            a.extend(["--out", path.to_str().unwrap()]);
            let o = nbqc(&a, &[]);
            ensure(o.status.success(), || format!("{tag}: {}", String::from_utf8_lossy(&o.stderr)))?;
            outputs.push((o.stdout, std::fs::read(&path).unwrap()));
        }
        ensure(outputs[0] == outputs[1], || format!("{tag}: outputs differ"))?;
        compared += 1;
    }
    let code = dir.join("det-construct-0.json");
    let mut sims = Vec::new();
    for (k, (flag, env)) in [(None, Some("1")), (Some("4"), None), (Some("2"), Some("3"))].iter().enumerate() {
        let csv = dir.join(format!("det-sim-{k}.csv"));
        let mut a = vec!["simulate", code.to_str().unwrap(), "--snr", "1.0,1.5,2.0", "--min-errors", "20", "--max-frames", "3000", "--seed", "42", "--mode", "random-message", "--out", csv.to_str().unwrap()];
        if let Some(t) = flag {
            a.extend(["--threads", t]);
        }
        let envs: Vec<(&str, &str)> = env.iter().map(|v| ("NBQC_THREADS", *v)).collect();
        let o = nbqc(&a, &envs);
        ensure(o.status.success(), || format!("simulate: {}", String::from_utf8_lossy(&o.stderr)))?;
        let mut sidecar = csv.clone().into_os_string();
        sidecar.push(".json");
        sims.push((o.stdout, std::fs::read(&csv).unwrap(), std::fs::read(&sidecar).unwrap()));
    }
    ensure(sims.windows(2).all(|w| w[0] == w[1]), || "simulate outputs differ across thread counts".into())?;
    compared += 1;
    Ok(format!("{compared} command families byte-identical (simulate at 1, 4 and 2 threads)"))
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("full-rank condition matches elimination of the expanded matrix", Box::new(full_rank_condition)),
        ("lifted cycle structure matches explicit traversal", Box::new(lift_structure)),
        ("projected ACE spectra match lifted-graph enumeration", Box::new(spectrum_oracle)),
        ("ensemble targets constructed via CLI", Box::new(|| ensemble_feasibility(dir.path()))),
        ("QSPA agrees with block MAP on a GF(4) tree code", Box::new(map_agreement)),
        ("ACENB BLER not worse than random labels", Box::new(|| bler_ordering(dir.path()))),
        ("identical seeds give byte-identical outputs", Box::new(|| determinism(dir.path()))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = std::panic::catch_unwind(std::panic::AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or("panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("[PASS] {} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {} {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
