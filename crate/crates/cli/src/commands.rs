use std::time::Instant;

use curvepull_core::curves::{orbit, parse_curve, Classification, Curve};
use curvepull_core::mapdef::resolve;
use curvepull_core::spectra::RationalMatrix;
use curvepull_core::verify::{identify, run_suite, run_sweep, Known, Suite, SuiteOptions, SuiteReport};
use curvepull_core::{LoadedMap, Letter};
use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::report::{
    curve_name, matrix_rows, ratio, ratio_text, sig12, sig12_text, OrbitReport, RunReport,
};
use crate::{Cli, Command, Failure, Format, OrbitArgs, SpectraArgs, SweepArgs, VerifyArgs};

pub const MAP_PATH_VAR: &str = "CURVEPULL_MAP_PATH";

pub fn run(cli: &Cli) -> Result<(), Failure> {
    let start = Instant::now();
    let mut ctx = Ctx { cli, start };
    match &cli.command {
        Command::Orbit(a) => cmd_orbit(&mut ctx, a),
        Command::Verify(a) => cmd_verify(&mut ctx, a),
        Command::Sweep(a) => cmd_sweep(&mut ctx, a),
        Command::Spectra(a) => cmd_spectra(&mut ctx, a),
        Command::Mapinfo => cmd_mapinfo(&mut ctx),
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    start: Instant,
}

impl Ctx<'_> {
    fn map(&self) -> Result<LoadedMap, Failure> {
        let spec = self
            .cli
            .map
            .as_deref()
            .ok_or_else(|| Failure::Usage("--map is required for this command".into()))?;
        let dirs: Vec<_> = std::env::var_os(MAP_PATH_VAR)
            .map(|v| std::env::split_paths(&v).collect())
            .unwrap_or_default();
        resolve(spec, &dirs).map_err(|e| Failure::Usage(e.to_string()))
    }

    fn curve(&self, map: &LoadedMap, text: &str) -> Result<Curve, Failure> {
        parse_curve(&map.axes, &map.alphabet, text)
            .map_err(|e| Failure::Usage(format!("curve `{text}`: {e}")))
    }

    fn emit<I: Serialize, R: Serialize>(
        &self,
        command: &'static str,
        map: Option<&LoadedMap>,
        inputs: I,
        results: R,
        text: impl FnOnce() -> String,
    ) {
        match self.cli.format {
            Format::Text => print!("{}", text()),
            Format::Json => {
                let doc = RunReport {
                    command,
                    argv: std::env::args().collect(),
                    map: map.map(|m| m.name().to_string()),
                    inputs,
                    results,
                    elapsed_ms: self.start.elapsed().as_secs_f64() * 1e3,
                };
                println!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
            }
        }
    }
}

#[derive(Serialize)]
struct OrbitInputs<'a> {
    curve: &'a str,
    max_steps: usize,
}

fn cmd_orbit(ctx: &mut Ctx, a: &OrbitArgs) -> Result<(), Failure> {
    if a.max_steps == 0 {
        return Err(Failure::Usage("--max-steps must be at least 1".into()));
    }
    let map = ctx.map()?;
    let c = ctx.curve(&map, &a.curve)?;
    let res = orbit(&map.endo, &map.axes, &c, a.max_steps).map_err(|e| Failure::Usage(e.to_string()))?;
    let rep = OrbitReport::new(&map, &res);
    let text = rep.text(&res);
    ctx.emit(
        "orbit",
        Some(&map),
        OrbitInputs {
            curve: &a.curve,
            max_steps: a.max_steps,
        },
        &rep,
        || format!("map {}\n{text}", map.name()),
    );
    Ok(())
}

#[derive(Serialize)]
struct VerifyInputs<'a> {
    suite: &'a str,
    n: usize,
    samples: usize,
    seed: u64,
}

#[derive(Serialize)]
struct ItemOut<'a> {
    label: &'a str,
    pass: bool,
    detail: &'a str,
}

#[derive(Serialize)]
struct SuiteOut<'a> {
    suite: &'static str,
    passed: usize,
    total: usize,
    all_pass: bool,
    items: Vec<ItemOut<'a>>,
}

#[derive(Serialize)]
struct VerifyOut<'a> {
    all_pass: bool,
    suites: Vec<SuiteOut<'a>>,
}

fn cmd_verify(ctx: &mut Ctx, a: &VerifyArgs) -> Result<(), Failure> {
    if a.n == 0 || a.samples == 0 {
        return Err(Failure::Usage("--n and --samples must be at least 1".into()));
    }
    let map = ctx.map()?;
    let mut opts = SuiteOptions {
        depth: a.n,
        samples: a.samples,
        ..SuiteOptions::default()
    };
    if let Some(seed) = a.seed {
        opts.seed = seed;
    }
    let suites: Vec<Suite> = if a.suite == "all" {
        let known = identify(&map);
        let s: Vec<Suite> = Suite::ALL.into_iter().filter(|s| s.applies_to(known)).collect();
        if s.is_empty() {
            return Err(Failure::Usage(format!("no verification suite applies to map `{}`", map.name())));
        }
        s
    } else {
        vec![Suite::from_name(&a.suite).map_err(|e| Failure::Usage(e.to_string()))?]
    };
    let reports: Vec<SuiteReport> = suites
        .iter()
        .map(|&s| run_suite(&map, s, &opts))
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let all_pass = reports.iter().all(SuiteReport::all_pass);
    let out = VerifyOut {
        all_pass,
        suites: reports
            .iter()
            .map(|r| SuiteOut {
                suite: r.suite.name(),
                passed: r.passed(),
                total: r.items.len(),
                all_pass: r.all_pass(),
                items: r
                    .items
                    .iter()
                    .map(|i| ItemOut {
                        label: &i.label,
                        pass: i.pass,
                        detail: &i.detail,
                    })
                    .collect(),
            })
            .collect(),
    };
    let inputs = VerifyInputs {
        suite: &a.suite,
        n: opts.depth,
        samples: opts.samples,
        seed: opts.seed,
    };
    ctx.emit("verify", Some(&map), inputs, &out, || {
        let mut s = format!("map {}\n", map.name());
        for r in &reports {
            s.push_str(&format!("suite {}\n", r.suite));
            for i in &r.items {
                let tag = if i.pass { "PASS" } else { "FAIL" };
                s.push_str(&format!("{tag} {}: {}\n", i.label, i.detail));
            }
            s.push_str(&format!("{}: {}/{} passed\n", r.suite, r.passed(), r.items.len()));
        }
        s.push_str(if all_pass { "result: all pass\n" } else { "result: FAILED\n" });
        s
    });
    if all_pass {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

#[derive(Serialize)]
struct SweepInputs {
    max_len: usize,
    max_steps: usize,
}

#[derive(Serialize)]
struct Bucket<'a> {
    classification: &'a str,
    steps: usize,
    count: usize,
}

#[derive(Serialize)]
struct Counterexample {
    curve: String,
    reason: String,
}

#[derive(Serialize)]
struct SweepOut<'a> {
    curves: usize,
    trivial: usize,
    cycle: usize,
    unresolved: usize,
    cycles: Vec<Vec<String>>,
    step_bound_checked: bool,
    histogram: Vec<Bucket<'a>>,
    counterexamples: Vec<Counterexample>,
}

fn cmd_sweep(ctx: &mut Ctx, a: &SweepArgs) -> Result<(), Failure> {
    if a.max_steps == 0 {
        return Err(Failure::Usage("--max-steps must be at least 1".into()));
    }
    let map = ctx.map()?;
    let rep = run_sweep(&map, a.max_len, a.max_steps).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut cycles: Vec<Vec<String>> = Vec::new();
    for r in &rep.results {
        if let Classification::EntersCycle { cycle, .. } = &r.classification {
            let mut names: Vec<String> = cycle.iter().map(|c| curve_name(&map, c)).collect();
            let lead = (0..names.len()).min_by_key(|&i| &names[i]).unwrap_or(0);
            names.rotate_left(lead);
            if !cycles.contains(&names) {
                cycles.push(names);
            }
        }
    }
    cycles.sort();
    let out = SweepOut {
        curves: rep.results.len(),
        trivial: rep.count("trivial"),
        cycle: rep.count("cycle"),
        unresolved: rep.count("unresolved"),
        cycles,
        step_bound_checked: identify(&map) == Known::Dendrite,
        histogram: rep
            .histogram
            .iter()
            .map(|((l, s), c)| Bucket {
                classification: l,
                steps: *s,
                count: *c,
            })
            .collect(),
        counterexamples: rep
            .counterexamples
            .iter()
            .map(|(c, why)| Counterexample {
                curve: curve_name(&map, c),
                reason: why.clone(),
            })
            .collect(),
    };
    let ok = out.counterexamples.is_empty();
    ctx.emit(
        "sweep",
        Some(&map),
        SweepInputs {
            max_len: a.max_len,
            max_steps: a.max_steps,
        },
        &out,
        || {
            let mut s = format!(
                "map {}\nmax-len {} max-steps {}\ncurves {}\n",
                map.name(),
                a.max_len,
                a.max_steps,
                out.curves
            );
            s.push_str("histogram (classification, steps, count):\n");
            for b in &out.histogram {
                s.push_str(&format!("  {} {} {}\n", b.classification, b.steps, b.count));
            }
            s.push_str(&format!(
                "totals: trivial {}, cycle {}, unresolved {}\n",
                out.trivial, out.cycle, out.unresolved
            ));
            for c in &out.cycles {
                s.push_str(&format!("cycle: {} -> {}\n", c.join(" -> "), c[0]));
            }
            if out.step_bound_checked {
                s.push_str("step bound 4|w|+3 checked\n");
            }
            s.push_str(&format!("counterexamples: {}\n", out.counterexamples.len()));
            for c in &out.counterexamples {
                s.push_str(&format!("COUNTEREXAMPLE {}: {}\n", c.curve, c.reason));
            }
            s
        },
    );
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

#[derive(Serialize)]
struct SpectraInputs<'a> {
    matrix: Option<String>,
    cycle_of: Option<&'a str>,
    tol: f64,
}

#[derive(Serialize)]
struct Certificate {
    cycle: Vec<String>,
    weights: Vec<String>,
    product: String,
    product_root: f64,
}

#[derive(Serialize)]
struct SpectraOut {
    dimension: usize,
    matrix: Vec<Vec<String>>,
    lambda: f64,
    contracting: bool,
    certificate: Option<Certificate>,
}

fn cmd_spectra(ctx: &mut Ctx, a: &SpectraArgs) -> Result<(), Failure> {
    if a.tol.is_nan() || a.tol <= 0.0 {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    let (matrix, map, cert) = match (&a.matrix, a.cycle_of) {
        (Some(path), false) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let m = RationalMatrix::parse(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            (m, None, None)
        }
        (None, true) => {
            let map = ctx.map()?;
            let text = a.curve.as_deref().expect("clap enforces --curve");
            let c = ctx.curve(&map, text)?;
            let res = orbit(&map.endo, &map.axes, &c, a.max_steps).map_err(|e| Failure::Usage(e.to_string()))?;
            let Classification::EntersCycle { cycle, weights, product, .. } = res.classification else {
                return Err(Failure::Usage(format!(
                    "orbit of `{text}` is not cyclic ({})",
                    res.classification.label()
                )));
            };
            let m = cycle_matrix(&weights);
            let root = product.to_f64().expect("finite").powf(1.0 / cycle.len() as f64);
            let cert = Certificate {
                cycle: cycle.iter().map(|c| curve_name(&map, c)).collect(),
                weights: weights.iter().map(ratio).collect(),
                product: ratio(&product),
                product_root: root,
            };
            (m, Some(map), Some((cert, weights, product)))
        }
        _ => return Err(Failure::Usage("give exactly one of --matrix FILE or --cycle-of --curve EXPR".into())),
    };
    let lambda = matrix.leading_eigenvalue(a.tol).map_err(|e| Failure::Usage(e.to_string()))?;
    let contracting = matrix.is_contracting();
    let out = SpectraOut {
        dimension: matrix.dim(),
        matrix: matrix_rows(&matrix),
        lambda: sig12(lambda),
        contracting,
        certificate: cert.as_ref().map(|(c, _, _)| Certificate {
            cycle: c.cycle.clone(),
            weights: c.weights.clone(),
            product: c.product.clone(),
            product_root: sig12(c.product_root),
        }),
    };
    let inputs = SpectraInputs {
        matrix: a.matrix.as_ref().map(|p| p.display().to_string()),
        cycle_of: a.curve.as_deref().filter(|_| a.cycle_of),
        tol: a.tol,
    };
    ctx.emit("spectra", map.as_ref(), inputs, &out, || {
        let mut s = String::new();
        if let Some(m) = &map {
            s.push_str(&format!("map {}\n", m.name()));
        }
        if let Some((c, w, p)) = &cert {
            s.push_str(&format!("cycle: {} -> {}\n", c.cycle.join(" -> "), c.cycle[0]));
            let ws: Vec<String> = w.iter().map(ratio_text).collect();
            s.push_str(&format!("weights: {}\n", ws.join(", ")));
            s.push_str(&format!("product: {}\n", ratio_text(p)));
            s.push_str(&format!(
                "product^(1/{}): {}\n",
                c.cycle.len(),
                sig12_text(c.product_root)
            ));
        }
        s.push_str("matrix:\n");
        for row in 0..matrix.dim() {
            let r: Vec<String> = (0..matrix.dim()).map(|j| matrix.get(row, j).to_string()).collect();
            s.push_str(&format!("  {}\n", r.join(" ")));
        }
        s.push_str(&format!("lambda: {}\n", sig12_text(lambda)));
        s.push_str(&format!("contracting: {contracting}\n"));
        s
    });
    Ok(())
}

/// Transition matrix of a cycle `C₀ → C₁ → … → C₀`: entry `[i+1][i]` is the
/// weight of the step out of `Cᵢ`.
fn cycle_matrix(weights: &[Rational64]) -> RationalMatrix {
    let k = weights.len();
    let mut entries = vec![(0i64, 1i64); k * k];
    for (i, w) in weights.iter().enumerate() {
        entries[((i + 1) % k) * k + i] = (*w.numer(), *w.denom());
    }
    RationalMatrix::from_ratios(k, &entries).expect("weights are nonnegative")
}

#[derive(Serialize)]
struct Generator<'a> {
    name: &'a str,
    parity: u8,
}

#[derive(Serialize)]
struct AxisOut<'a> {
    name: &'a str,
    word: String,
}

#[derive(Serialize)]
struct Image {
    generator: String,
    image: String,
}

#[derive(Serialize)]
struct Transition {
    letter: String,
    state: u8,
    emit: String,
    next: u8,
}

#[derive(Serialize)]
struct MapInfo<'a> {
    name: &'a str,
    builtin: Option<&'static str>,
    generators: Vec<Generator<'a>>,
    axes: Vec<AxisOut<'a>>,
    transversal: String,
    schreier: Vec<Image>,
    transducer: Vec<Transition>,
    definition: String,
}

fn cmd_mapinfo(ctx: &mut Ctx) -> Result<(), Failure> {
    let map = ctx.map()?;
    let def = &map.definition;
    let fmt = |w: &curvepull_core::Word| map.format_word(w);
    let mut transducer = Vec::new();
    for g in 0..2 {
        for letter in [Letter::pos(g), Letter::neg(g)] {
            for state in 0..2u8 {
                let (emit, next) = map.endo.step(letter, state);
                let name = &def.generators[g];
                transducer.push(Transition {
                    letter: if letter.is_inverse() { format!("{name}^-1") } else { name.clone() },
                    state,
                    emit: fmt(&emit),
                    next,
                });
            }
        }
    }
    let info = MapInfo {
        name: map.name(),
        builtin: match identify(&map) {
            Known::Rabbit => Some("rabbit"),
            Known::Dendrite => Some("dendrite"),
            Known::Other => None,
        },
        generators: (0..2)
            .map(|g| Generator {
                name: &def.generators[g],
                parity: def.parity[g],
            })
            .collect(),
        axes: (0..3)
            .map(|i| AxisOut {
                name: map.axes.name(i),
                word: fmt(map.axes.word(i)),
            })
            .collect(),
        transversal: fmt(&map.endo.parity().transversal_word()),
        schreier: map
            .endo
            .images()
            .iter()
            .map(|(g, h)| Image {
                generator: fmt(g),
                image: fmt(h),
            })
            .collect(),
        transducer,
        definition: def.serialize(),
    };
    ctx.emit("mapinfo", Some(&map), (), &info, || {
        let mut s = format!("map {}\n", info.name);
        if let Some(b) = info.builtin {
            s.push_str(&format!("built-in: {b}\n"));
        }
        for g in &info.generators {
            s.push_str(&format!("generator {} parity {}\n", g.name, g.parity));
        }
        for ax in &info.axes {
            s.push_str(&format!("axis {} = {}\n", ax.name, ax.word));
        }
        s.push_str(&format!("transversal {}\n", info.transversal));
        for im in &info.schreier {
            s.push_str(&format!("psi({}) = {}\n", im.generator, im.image));
        }
        s.push_str("transducer (letter, state -> output, next state):\n");
        for t in &info.transducer {
            s.push_str(&format!("  {}, {} -> {}, {}\n", t.letter, t.state, t.emit, t.next));
        }
        s
    });
    Ok(())
}
