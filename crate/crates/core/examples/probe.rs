use coordsynth_core::pipeline::{prepare, Mode, PipelineConfig, RunOutcome};
use coordsynth_core::specauto::SpecContext;
use coordsynth_core::synth::{encode, solve, SolverChoice, SynthConfig};
use coordsynth_core::sat::SolveResult;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(|s| s.as_str()).unwrap_or("thermo1");
    let model = match which {
        "thermo1" => coordsynth_core::benchgen::thermostat(1).unwrap(),
        "thermo2" => coordsynth_core::benchgen::thermostat(2).unwrap(),
        "thermo3" => coordsynth_core::benchgen::thermostat(3).unwrap(),
        "arb2" => coordsynth_core::benchgen::arbiter(2).unwrap(),
        "arb3" => coordsynth_core::benchgen::arbiter(3).unwrap(),
        "prs" => coordsynth_core::benchgen::pr_sync().unwrap(),
        "pra" => coordsynth_core::benchgen::pr_async().unwrap(),
        other => panic!("unknown {other}"),
    };
    let bounds: Vec<usize> = args
        .get(2)
        .map(|s| s.split(',').map(|x| x.parse().unwrap()).collect())
        .unwrap_or_else(|| vec![1, 2, 3, 4]);
    let t0 = Instant::now();
    let (env, al) = prepare(&model).unwrap();
    let ctx = SpecContext::new(&al, &model.spec.safety_complement, &env, model.table.len());
    let auto = coordsynth_core::pipeline::build_for_mode(&ctx, Mode::Symbolic).unwrap();
    let ucw = auto.to_ucw();
    println!(
        "env={} al={} ucw={} edges={}  [{:?}]",
        env.num_states(), al.num_states, ucw.num_states, ucw.edges.len(), t0.elapsed()
    );
    for &n in &bounds {
        let t1 = Instant::now();
        let inst = encode(&ucw, n).unwrap();
        let te = t1.elapsed();
        let t2 = Instant::now();
        let r = solve(&inst, &SolverChoice::default(), None, None).unwrap();
        println!(
            "N={n}: vars={} clauses={} encode={te:?} solve={:?} -> {}",
            inst.num_vars,
            inst.clauses.len(),
            t2.elapsed(),
            match &r {
                SolveResult::Sat(_) => "SAT",
                SolveResult::Unsat => "UNSAT",
                SolveResult::Cancelled => "CANCELLED",
            }
        );
        if let SolveResult::Sat(m) = r {
            let machine = coordsynth_core::synth::extract_moore(&inst, &m).unwrap();
            let greens = coordsynth_core::synth::certify_run_graph(&ucw, &machine).unwrap();
            let mut coord = coordsynth_core::coordinator::moore_to_csp(&machine, &model.table);
            coord.public = env.public.clone();
            let v = coordsynth_core::verify::check(&env, &coord, &model.spec, model.table.len()).unwrap();
            println!("greens={greens} verdict={}", v.render(&model.table));
            print!("{}", coord.to_equations(&model.table, "M"));
            break;
        }
    }
    let _ = PipelineConfig { mode: Mode::Symbolic, synth: SynthConfig::default() };
    let _ = RunOutcome::BoundedUnrealizable { max_bound: 0 };
    println!("total: {:?}", t0.elapsed());
}
