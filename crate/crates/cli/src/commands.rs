use std::collections::BTreeSet;
use std::fs;

use anyhow::{Context, Result};
use edgelink::certify::{
    verify, Certificate, ConnectivityCertificate, Document, FanDocument, InfeasibleCertificate, LinkageCertificate,
    OrientationCertificate, SplittingCertificate, Verification,
};
use edgelink::connectivity::edge_connectivity;
use edgelink::decomposition::DepthPolicy;
use edgelink::fan::{linking_fan_family, random_grid_fan_request, FamilyFanRequest};
use edgelink::flow::min_set_cut;
use edgelink::immersion::immerse;
use edgelink::infinite::{solve_infinite, InfiniteConfig};
use edgelink::io::{to_document, IdentifiedGraph};
use edgelink::lifting::{admissible_splitting, lift_report};
use edgelink::linkage::{counterexample_family, SolverConfig, Verdict};
use edgelink::orient::{extend_orientation, orient_eulerian_consistent, verify_k_arc_connected, ExtendConfig};
use edgelink::rounds::{orient_infinite, RoundsConfig};
use edgelink::routing::solve_via_blocks;
use edgelink::{MultiGraph, VertexId};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::input::{self, usage, InstanceDocument, UsageError};
use crate::{experiment, status, Cli, Command, LinkageCommand, OrientCommand, RunConfig};

pub fn exit_status(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<UsageError>().is_some() {
        return status::USAGE;
    }
    match e.downcast_ref::<edgelink::Error>() {
        Some(err) if err.is_non_authoritative() => status::NOT_VERIFIED,
        Some(edgelink::Error::Parse(_)) => status::USAGE,
        _ => status::FAILED,
    }
}

impl RunConfig {
    pub fn policy(&self) -> Result<DepthPolicy> {
        if self.depth == 0 || self.depth > self.depth_cap {
            return Err(usage("need 0 < --depth <= --depth-cap"));
        }
        Ok(DepthPolicy { d0: self.depth, cap: self.depth_cap })
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig { node_budget: self.budget_nodes }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Writes `<stem>.json` and `<stem>.txt` under `--out`, or prints the
/// document to stdout and the transcript to stderr.
pub fn emit<T: Serialize>(run: &RunConfig, stem: &str, doc: &T, transcript: &str) -> Result<()> {
    let text = serde_json::to_string_pretty(doc)?;
    match &run.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            fs::write(dir.join(format!("{stem}.json")), text + "\n")?;
            fs::write(dir.join(format!("{stem}.txt")), transcript)?;
        }
        None => {
            println!("{text}");
            eprint!("{transcript}");
        }
    }
    Ok(())
}

fn emit_extra(run: &RunConfig, name: &str, contents: &str) -> Result<()> {
    if let Some(dir) = &run.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(name), contents)?;
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<u8> {
    let run = &cli.run;
    match &cli.command {
        Command::Connectivity => connectivity(run),
        Command::Liftgraph { s, k } => {
            let g = input::graph(run)?;
            let report = lift_report(&g, input::vertex(&g, *s)?, *k)?;
            println!("{}", serde_json::to_string(&report)?);
            Ok(status::OK)
        }
        Command::Split { s, k } => split(run, *s, *k),
        Command::Fan { request, m } => {
            let (f, roots) = input::family(run)?;
            let req: FamilyFanRequest = match request {
                Some(p) => serde_json::from_str(&input::read(p)?).context("parsing fan request")?,
                None => random_grid_fan_request(&mut run.rng(), *m, 4),
            };
            let fan = linking_fan_family(&f, &roots, &req, run.policy()?)?;
            let transcript = format!(
                "hub {} at depth {}, {} paths, segment length {}\n",
                fan.result.hub,
                fan.truncation.depth,
                fan.result.paths.len(),
                fan.result.min_len
            );
            let doc = Document::new(Certificate::Fan(FanDocument {
                family: f.descriptor(&roots),
                depth: fan.truncation.depth,
                request: fan.request,
                result: fan.result,
            }));
            emit(run, "fan", &doc, &transcript)?;
            Ok(status::OK)
        }
        Command::Linkage(LinkageCommand::Solve { instance, pairs }) => linkage_solve(run, instance.as_deref(), pairs),
        Command::Linkage(LinkageCommand::Verify { certificate }) | Command::Verify { certificate } => {
            verify_file(certificate)
        }
        Command::Linkage(LinkageCommand::Counterexample { k }) => counterexample(run, *k),
        Command::Immerse { k, vertices } => {
            let (f, _) = input::family(run)?;
            let a0 = vertices.iter().map(|v| input::vertex_key(v)).collect::<Result<BTreeSet<_>>>()?;
            let out = immerse(&f, &a0, *k, run.policy()?)?;
            let c = &out.certificate;
            let transcript = format!(
                "depth {}: |A| = {}, H has {} vertices and {} edges, {} fans, {} closed walks\n",
                c.depth,
                c.a.len(),
                out.h.vertex_count(),
                out.h.edge_count(),
                c.fans.len(),
                c.loops.len()
            );
            emit(run, "immersion", &Document::new(Certificate::Immersion(out.certificate)), &transcript)?;
            Ok(status::OK)
        }
        Command::Orient(OrientCommand::Finite { k }) => orient_finite(run, *k),
        Command::Orient(OrientCommand::Infinite { k, rounds }) => {
            let (f, _) = input::family(run)?;
            let cfg = RoundsConfig {
                policy: run.policy()?,
                extend: ExtendConfig { node_budget: run.budget_nodes, ..ExtendConfig::default() },
            };
            let out = orient_infinite(&f, *k, *rounds, cfg)?;
            let mut transcript = String::new();
            for r in &out.rounds {
                transcript += &format!(
                    "round {}: target {}, {} arcs, {} branch vertices, {:?}, min flow {}\n",
                    r.round,
                    r.target,
                    r.orientation.len(),
                    r.branch_vertices.len(),
                    r.strategy,
                    r.verification.min_flow
                );
            }
            if let Some(last) = out.rounds.last() {
                emit_extra(run, "orientation.dot", &last.orientation.to_dot("rounds"))?;
            }
            emit(run, "orient-run", &Document::new(Certificate::OrientRun(out)), &transcript)?;
            Ok(status::OK)
        }
        Command::Experiment(e) => experiment::run(run, e),
    }
}

fn connectivity(run: &RunConfig) -> Result<u8> {
    let g = input::graph(run)?;
    let lambda = edge_connectivity(&g);
    let mut best: Option<BTreeSet<VertexId>> = None;
    if let Some(r) = g.vertices().next() {
        for v in g.vertices().skip(1) {
            let cut = min_set_cut(&g, &BTreeSet::from([r]), &BTreeSet::from([v]))?;
            if Some(cut.boundary.len()) == lambda {
                best = Some(cut.side);
                break;
            }
        }
    }
    let transcript = match lambda {
        Some(l) => format!("edge-connectivity {l}\n"),
        None => "fewer than two vertices\n".to_string(),
    };
    let doc = Document::new(Certificate::Connectivity(ConnectivityCertificate {
        graph: IdentifiedGraph::from_graph(&g),
        edge_connectivity: lambda,
        min_cut: best.map(|s| s.into_iter().collect()),
    }));
    emit(run, "connectivity", &doc, &transcript)?;
    Ok(status::OK)
}

fn split(run: &RunConfig, s: u32, k: usize) -> Result<u8> {
    let g = input::graph(run)?;
    let s = input::vertex(&g, s)?;
    let out = admissible_splitting(&g, s, k)?;
    let transcript = format!("{} lifts at {s}, final degree {}\n", out.steps.len(), out.graph.degree(s));
    let doc = Document::new(Certificate::Splitting(SplittingCertificate {
        graph: IdentifiedGraph::from_graph(&g),
        s,
        k,
        steps: out.steps,
        result: IdentifiedGraph::from_graph(&out.graph),
    }));
    emit(run, "split", &doc, &transcript)?;
    Ok(status::OK)
}

fn finite_verdict(run: &RunConfig, g: &MultiGraph, pairs: Vec<(VertexId, VertexId)>) -> Result<u8> {
    let graph = IdentifiedGraph::from_graph(g);
    match solve_via_blocks(g, &pairs, run.solver())? {
        Verdict::Linked(linkage) => {
            let transcript = format!("linked {} pairs, total length {}\n", pairs.len(), linkage.paths.iter().map(|p| p.len()).sum::<usize>());
            emit(run, "linkage", &Document::new(Certificate::Linkage(LinkageCertificate { graph, pairs, linkage })), &transcript)?;
            Ok(status::OK)
        }
        Verdict::Infeasible(why) => {
            let transcript = match &why.cut {
                Some(side) => format!("infeasible: cut side {side:?} is too small\n"),
                None => format!("infeasible: search exhausted after {} nodes\n", why.explored),
            };
            emit(run, "infeasible", &Document::new(Certificate::Infeasible(InfeasibleCertificate { graph, pairs, cut: why.cut })), &transcript)?;
            Ok(status::FAILED)
        }
    }
}

fn linkage_solve(run: &RunConfig, instance: Option<&std::path::Path>, pairs: &[String]) -> Result<u8> {
    let doc: InstanceDocument = match instance {
        Some(p) => serde_json::from_str(&input::read(p)?).with_context(|| format!("parsing {}", p.display()))?,
        None => {
            let pairs = pairs.iter().map(|p| input::pair(p)).collect::<Result<_>>()?;
            InstanceDocument { graph: None, family: None, k: None, pairs, terminals: Vec::new() }
        }
    };
    if let Some(d) = &doc.family {
        let (f, _) = edgelink::family::LazyFamily::from_descriptor(d)?;
        let k = doc.k.unwrap_or(doc.terminals.len());
        let cfg = InfiniteConfig { policy: run.policy()?, solver: run.solver() };
        let out = solve_infinite(&f, &doc.terminals, k, cfg)?;
        let transcript = format!(
            "depth {}: |A| = {}, {} sets, E sizes {:?}, {} fans\n",
            out.depth,
            out.transcript.a.len(),
            out.transcript.sets.len(),
            out.e_sizes(),
            out.transcript.fans.len()
        );
        emit(run, "linkage", &Document::new(Certificate::InfiniteLinkage(out)), &transcript)?;
        return Ok(status::OK);
    }
    let g = match &doc.graph {
        Some(gd) => edgelink::io::from_document(gd)?,
        None => input::graph(run)?,
    };
    let pairs = doc.pairs.iter().map(|&(s, t)| Ok((input::vertex(&g, s)?, input::vertex(&g, t)?))).collect::<Result<Vec<_>>>()?;
    if pairs.is_empty() {
        return Err(usage("no terminal pairs given"));
    }
    finite_verdict(run, &g, pairs)
}

fn counterexample(run: &RunConfig, k: usize) -> Result<u8> {
    let inst = counterexample_family(k)?;
    let doc = InstanceDocument {
        graph: Some(to_document(&inst.graph)),
        family: None,
        k: Some(k),
        pairs: inst.pairs.iter().map(|&(s, t)| (s.0, t.0)).collect(),
        terminals: Vec::new(),
    };
    match &run.out {
        Some(_) => emit_extra(run, "instance.json", &(serde_json::to_string_pretty(&doc)? + "\n"))?,
        None => eprintln!("{}", serde_json::to_string(&doc)?),
    }
    let code = finite_verdict(run, &inst.graph, inst.pairs.clone())?;
    // the instance is built to have no linkage
    Ok(if code == status::FAILED { status::OK } else { status::FAILED })
}

fn orient_finite(run: &RunConfig, k: usize) -> Result<u8> {
    let g = input::graph(run)?;
    let eulerian = orient_eulerian_consistent(&g).ok().filter(|o| verify_k_arc_connected(&g, o, k));
    let (orientation, how) = match eulerian {
        Some(o) => (o, "Euler tour".to_string()),
        None => {
            let cfg = ExtendConfig { node_budget: run.budget_nodes, ..ExtendConfig::default() };
            let (o, strategy) = extend_orientation(&g, k, &Default::default(), cfg)?;
            (o, format!("{strategy:?}"))
        }
    };
    emit_extra(run, "orientation.dot", &orientation.to_dot("orientation"))?;
    let transcript = format!("{} arcs by {how}\n", orientation.len());
    let doc = Document::new(Certificate::Orientation(OrientationCertificate { graph: IdentifiedGraph::from_graph(&g), k, orientation }));
    emit(run, "orientation", &doc, &transcript)?;
    Ok(status::OK)
}

fn verify_file(path: &std::path::Path) -> Result<u8> {
    let doc: Document = serde_json::from_str(&input::read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let outcome = verify(&doc);
    let code = match &outcome {
        Verification::Verified => status::OK,
        Verification::Rejected(why) => {
            for w in why {
                eprintln!("rejected: {w}");
            }
            status::FAILED
        }
        Verification::Inconclusive(why) => {
            eprintln!("inconclusive: {why}");
            status::NOT_VERIFIED
        }
    };
    println!("{}", serde_json::to_string(&outcome)?);
    Ok(code)
}
