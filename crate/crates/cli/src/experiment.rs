use std::collections::BTreeMap;

use anyhow::Result;
use edgelink::certify::linkage_problems;
use edgelink::gen::{random_k_edge_connected, random_pairs, random_sk_instance};
use edgelink::lifting::{lift_report, StructureTag};
use edgelink::linkage::Verdict;
use edgelink::routing::solve_via_blocks;
use rand::Rng;
use serde::Serialize;

use crate::commands::emit;
use crate::input::usage;
use crate::{status, ExperimentCommand, RunConfig};

#[derive(Debug, Serialize)]
struct Summary {
    experiment: &'static str,
    seed: u64,
    instances: usize,
    k: usize,
    counts: BTreeMap<String, usize>,
}

pub fn run(run: &RunConfig, cmd: &ExperimentCommand) -> Result<u8> {
    match *cmd {
        ExperimentCommand::Liftgraph { n, k } => {
            if k % 2 == 1 {
                return Err(usage("liftgraph experiment needs even k; use odd-k for odd k"));
            }
            let (summary, lines) = lifting(run, n, k, "liftgraph")?;
            let others = summary.counts.get(&format!("{:?}", StructureTag::Other)).copied().unwrap_or(0);
            finish(run, &summary, lines)?;
            Ok(if others == 0 { status::OK } else { status::FAILED })
        }
        ExperimentCommand::OddK { n, k } => {
            if k % 2 == 0 {
                return Err(usage("odd-k experiment needs odd k"));
            }
            let (summary, lines) = lifting(run, n, k, "odd-k")?;
            finish(run, &summary, lines)?;
            Ok(status::OK)
        }
        ExperimentCommand::Linkage { n, k } => linkage(run, n, k),
    }
}

fn finish(run: &RunConfig, summary: &Summary, lines: String) -> Result<()> {
    let transcript = summary.counts.iter().map(|(c, n)| format!("{c}: {n}\n")).collect::<String>();
    match &run.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(format!("{}.jsonl", summary.experiment)), lines)?;
        }
        None => print!("{lines}"),
    }
    emit(run, &format!("{}-summary", summary.experiment), summary, &transcript)
}

fn lifting(run: &RunConfig, n: usize, k: usize, name: &'static str) -> Result<(Summary, String)> {
    let mut rng = run.rng();
    let mut counts = BTreeMap::new();
    let mut lines = String::new();
    for _ in 0..n {
        let deg = rng.gen_range(4..=9usize);
        let others = rng.gen_range(3..=6u32);
        let (g, s) = random_sk_instance(&mut rng, others, deg, k);
        let report = lift_report(&g, s, k)?;
        *counts.entry(format!("{:?}", report.class_tag)).or_insert(0) += 1;
        lines += &serde_json::to_string(&report)?;
        lines.push('\n');
    }
    Ok((Summary { experiment: name, seed: run.seed, instances: n, k, counts }, lines))
}

#[derive(Debug, Serialize)]
struct LinkageRecord {
    vertices: usize,
    edges: usize,
    outcome: String,
}

fn linkage(run: &RunConfig, n: usize, k: usize) -> Result<u8> {
    let mut rng = run.rng();
    let mut counts = BTreeMap::new();
    let mut lines = String::new();
    for _ in 0..n {
        let verts = rng.gen_range(4..=8u32);
        let g = random_k_edge_connected(&mut rng, verts, k + 1, 0.5);
        let pairs = random_pairs(&mut rng, verts, k);
        let outcome = match solve_via_blocks(&g, &pairs, run.solver()) {
            Ok(Verdict::Linked(l)) if linkage_problems(&g, &pairs, &l).is_empty() => "linked",
            Ok(Verdict::Linked(_)) => "rejected",
            Ok(Verdict::Infeasible(_)) => "infeasible",
            Err(e) if e.is_non_authoritative() => "budget",
            Err(e) => return Err(e.into()),
        };
        *counts.entry(outcome.to_string()).or_insert(0) += 1;
        let rec = LinkageRecord { vertices: g.vertex_count(), edges: g.edge_count(), outcome: outcome.into() };
        lines += &serde_json::to_string(&rec)?;
        lines.push('\n');
    }
    let bad = counts.get("infeasible").copied().unwrap_or(0) + counts.get("rejected").copied().unwrap_or(0);
    finish(run, &Summary { experiment: "linkage", seed: run.seed, instances: n, k, counts }, lines)?;
    Ok(if bad == 0 { status::OK } else { status::FAILED })
}
