//! Command dispatch for the `cotree` binary. Inputs are poset files in the
//! text format or `@`-literals (`@comb:n`, `@hcomb:n`, `@chain:n`,
//! `@tau:m,k`); every verb writes deterministic output, with `--json`
//! switching to the machine-readable form.
//!
//! Exit codes: 0 on success, 1 when a `verify` check fails, 2 on usage or
//! input errors.

use std::fmt::Write as _;
use std::io::Write;

use clap::{Parser, Subcommand};
use serde_json::json;

use cotree_core::analysis::{max_antichain, run_check, CheckReport, LeqPTable, ALL_CHECKS};
use cotree_core::duality::{dual_algebra, is_valid, parse_formula, prime_filter_poset, subframe_refuted, FiniteBHA, Formula};
use cotree_core::morphism::leq_p;
use cotree_core::multiset::Multiset;
use cotree_core::poset::Poset;
use cotree_core::{enumerate_cotrees, CoTree, Error};

#[derive(Parser)]
#[command(name = "cotree", version, about = "Finite co-tree and bi-Heyting algebra toolkit", disable_help_subcommand = true)]
struct Cli {
    /// Emit machine-readable JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List co-tree isomorphism classes up to a node bound
    Enumerate {
        #[arg(long)]
        nodes: usize,
        /// Keep only members of T_n (comb number below n)
        #[arg(long = "in-t")]
        in_t: Option<usize>,
        /// Print only the per-size class counts
        #[arg(long)]
        count_only: bool,
    },
    /// Comb number of a co-tree
    Comb { input: String },
    /// Structure-lemma decomposition of a co-tree
    Decompose { input: String },
    /// Decide TARGET <=p SOURCE (is TARGET a bi-p-morphic image of SOURCE?)
    Leq { target: String, source: String },
    /// Search for an order embedding of SRC into TGT
    Embed { src: String, tgt: String },
    /// Dual algebra of a poset, in the dump format
    Dual { input: String },
    /// Prime-filter poset of an algebra dump, in the poset text format
    DualizeBack { input: String },
    /// Decide frame validity of a formula
    Valid {
        input: String,
        #[arg(long, conflicts_with = "axiom")]
        formula: Option<String>,
        /// One of: prelinearity, bilc
        #[arg(long)]
        axiom: Option<String>,
    },
    /// Semantic subframe criterion: does the dual of the input refute the
    /// subframe formula of the omitted co-tree?
    Subframe {
        input: String,
        #[arg(long)]
        omit: String,
    },
    /// Maximum <=p-antichain among T_n co-trees with exactly the given size
    Antichain {
        #[arg(long = "in-t")]
        in_t: usize,
        #[arg(long)]
        nodes: usize,
    },
    /// Run named checks (or all of them)
    Verify {
        #[arg(long = "check")]
        checks: Vec<String>,
        #[arg(long)]
        all: bool,
        /// Include wall-clock times in the output (non-deterministic)
        #[arg(long)]
        timings: bool,
    },
}

/// Parses and runs a command line (without the program name). Output goes to
/// `out`, errors to `err`; the return value is the process exit code.
pub fn run(args: &[String], out: &mut impl Write, err: &mut impl Write) -> i32 {
    let mut argv = vec!["cotree".to_string()];
    argv.extend(args.iter().cloned());
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes, not usage errors.
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 2;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match dispatch(&cli) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(String, i32), Error> {
    match &cli.command {
        Command::Enumerate { nodes, in_t, count_only } => {
            cmd_enumerate(*nodes, *in_t, *count_only, cli.json)
        }
        Command::Comb { input } => cmd_comb(input, cli.json),
        Command::Decompose { input } => cmd_decompose(input, cli.json),
        Command::Leq { target, source } => cmd_leq(target, source, cli.json),
        Command::Embed { src, tgt } => cmd_embed(src, tgt, cli.json),
        Command::Dual { input } => cmd_dual(input, cli.json),
        Command::DualizeBack { input } => cmd_dualize_back(input, cli.json),
        Command::Valid { input, formula, axiom } => {
            cmd_valid(input, formula.as_deref(), axiom.as_deref(), cli.json)
        }
        Command::Subframe { input, omit } => cmd_subframe(input, omit, cli.json),
        Command::Antichain { in_t, nodes } => cmd_antichain(*in_t, *nodes, cli.json),
        Command::Verify { checks, all, timings } => cmd_verify(checks, *all, *timings, cli.json),
    }
}

/// Builds a co-tree from an `@`-literal, or `None` when the string is not
/// one.
pub fn parse_cotree_literal(s: &str) -> Result<Option<CoTree>, Error> {
    let Some(body) = s.strip_prefix('@') else {
        return Ok(None);
    };
    let (family, params) = body
        .split_once(':')
        .ok_or_else(|| Error::Usage(format!("malformed literal {s:?}")))?;
    let parse_num = |t: &str| {
        t.parse::<usize>()
            .map_err(|_| Error::Usage(format!("bad number {t:?} in literal {s:?}")))
    };
    let tree = match family {
        "comb" => CoTree::comb(parse_num(params)?)?,
        "hcomb" => CoTree::hcomb(parse_num(params)?)?,
        "chain" => CoTree::chain(parse_num(params)?)?,
        "tau" => {
            let (m, k) = params
                .split_once(',')
                .ok_or_else(|| Error::Usage(format!("tau literal needs m,k in {s:?}")))?;
            CoTree::tau(parse_num(m)?, parse_num(k)?)?
        }
        other => return Err(Error::Usage(format!("unknown literal family {other:?}"))),
    };
    Ok(Some(tree))
}

fn read_file(path: &str) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read {path:?}: {e}")))
}

/// Resolves a path or `@`-literal to a poset.
pub fn load_poset(input: &str) -> Result<Poset, Error> {
    if let Some(tree) = parse_cotree_literal(input)? {
        return Ok(tree.poset().clone());
    }
    Poset::from_text(&read_file(input)?)
}

/// Resolves a path or `@`-literal to a validated co-tree.
pub fn load_cotree(input: &str) -> Result<CoTree, Error> {
    if let Some(tree) = parse_cotree_literal(input)? {
        return Ok(tree);
    }
    CoTree::new(Poset::from_text(&read_file(input)?)?)
}

/// One item of a multiset literal: either a natural number or a co-tree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum MsetItem {
    Nat(u64),
    Tree(CoTree),
}

/// A parsed multiset literal over a single carrier.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum MsetLiteral {
    Nats(Multiset<u64>),
    Trees(Multiset<CoTree>),
}

/// Parses the multiset literal syntax `[a,b,c]` where each item is either a
/// natural number or a co-tree `@`-literal. Mixing the two carriers is a
/// `CarrierMismatch`.
pub fn parse_multiset_literal(s: &str) -> Result<MsetLiteral, Error> {
    let trimmed = s.trim();
    let inner = trimmed
        .strip_prefix('[')
        .and_then(|rest| rest.strip_suffix(']'))
        .ok_or_else(|| Error::Usage(format!("multiset literal must look like [a,b,c]: {s:?}")))?;
    let mut items: Vec<MsetItem> = Vec::new();
    for piece in inner.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        if let Some(tree) = parse_cotree_literal(piece)? {
            items.push(MsetItem::Tree(tree));
        } else {
            let n = piece
                .parse::<u64>()
                .map_err(|_| Error::Usage(format!("bad multiset item {piece:?}")))?;
            items.push(MsetItem::Nat(n));
        }
    }
    let nats = items.iter().filter(|i| matches!(i, MsetItem::Nat(_))).count();
    if nats != 0 && nats != items.len() {
        return Err(Error::CarrierMismatch);
    }
    if nats == items.len() {
        Ok(MsetLiteral::Nats(Multiset::from_items(items.into_iter().map(|i| match i {
            MsetItem::Nat(n) => n,
            MsetItem::Tree(_) => unreachable!(),
        }))))
    } else {
        Ok(MsetLiteral::Trees(Multiset::from_items(items.into_iter().map(|i| match i {
            MsetItem::Tree(t) => t,
            MsetItem::Nat(_) => unreachable!(),
        }))))
    }
}

/// Class counts roughly triple per node; past this bound a listing stops
/// being useful and starts being a hang.
const MAX_ENUMERATION_NODES: usize = 14;

fn check_node_bound(nodes: usize) -> Result<(), Error> {
    if nodes == 0 {
        return Err(Error::Usage("--nodes must be at least 1".into()));
    }
    if nodes > MAX_ENUMERATION_NODES {
        return Err(Error::Size(format!(
            "enumeration supports at most {MAX_ENUMERATION_NODES} nodes, got {nodes}"
        )));
    }
    Ok(())
}

fn cmd_enumerate(
    nodes: usize,
    in_t: Option<usize>,
    count_only: bool,
    as_json: bool,
) -> Result<(String, i32), Error> {
    check_node_bound(nodes)?;
    if let Some(0) = in_t {
        return Err(Error::Param("T_n is defined for n >= 1".into()));
    }
    let trees: Vec<CoTree> = enumerate_cotrees(nodes)
        .filter(|t| match in_t {
            Some(n) => t.in_t(n).unwrap(),
            None => true,
        })
        .collect();
    let mut text = String::new();
    if count_only {
        let counts: Vec<usize> =
            (1..=nodes).map(|n| trees.iter().filter(|t| t.len() == n).count()).collect();
        if as_json {
            text = serde_json::to_string(&json!({ "counts": counts })).unwrap();
            text.push('\n');
        } else {
            let rendered: Vec<String> = counts.iter().map(usize::to_string).collect();
            writeln!(text, "{}", rendered.join(" ")).unwrap();
        }
    } else if as_json {
        let items: Vec<_> = trees
            .iter()
            .map(|t| json!({ "nodes": t.len(), "code": t.code().as_str() }))
            .collect();
        text = serde_json::to_string(&json!({ "cotrees": items })).unwrap();
        text.push('\n');
    } else {
        for t in &trees {
            writeln!(text, "{} {}", t.len(), t.code()).unwrap();
        }
    }
    Ok((text, 0))
}

fn cmd_comb(input: &str, as_json: bool) -> Result<(String, i32), Error> {
    let tree = load_cotree(input)?;
    let k = tree.comb_number();
    let text = if as_json {
        format!("{}\n", serde_json::to_string(&json!({ "comb_number": k })).unwrap())
    } else {
        format!("{k}\n")
    };
    Ok((text, 0))
}

fn cmd_decompose(input: &str, as_json: bool) -> Result<(String, i32), Error> {
    let tree = load_cotree(input)?;
    let dec = tree.decompose()?;
    let codes: Vec<&str> = dec.parts.iter().map(|p| p.code().as_str()).collect();
    let text = if as_json {
        format!(
            "{}\n",
            serde_json::to_string(&json!({ "m": dec.m, "k": dec.k(), "parts": codes })).unwrap()
        )
    } else {
        let mut s = format!("m {}\nk {}\n", dec.m, dec.k());
        for code in codes {
            writeln!(s, "part {code}").unwrap();
        }
        s
    };
    Ok((text, 0))
}

fn cmd_leq(target: &str, source: &str, as_json: bool) -> Result<(String, i32), Error> {
    let target_tree = load_cotree(target)?;
    let source_tree = load_cotree(source)?;
    let witness = leq_p(&target_tree, &source_tree);
    let text = if as_json {
        let w = witness.as_ref().map(|f| f.map.clone());
        format!(
            "{}\n",
            serde_json::to_string(&json!({ "related": witness.is_some(), "witness": w })).unwrap()
        )
    } else {
        match &witness {
            Some(f) => f.render(source_tree.code().as_str(), target_tree.code().as_str()),
            None => "none\n".to_string(),
        }
    };
    Ok((text, 0))
}

fn cmd_embed(src: &str, tgt: &str, as_json: bool) -> Result<(String, i32), Error> {
    let src_poset = load_poset(src)?;
    let tgt_poset = load_poset(tgt)?;
    let witness = src_poset.order_embedding(&tgt_poset);
    let text = if as_json {
        let w = witness.as_ref().map(|w| w.map.clone());
        format!(
            "{}\n",
            serde_json::to_string(&json!({ "embeds": witness.is_some(), "witness": w })).unwrap()
        )
    } else {
        match &witness {
            Some(w) => {
                let mut s = String::from("# order embedding\n");
                for (i, &j) in w.map.iter().enumerate() {
                    writeln!(s, "{i} -> {j}").unwrap();
                }
                s
            }
            None => "none\n".to_string(),
        }
    };
    Ok((text, 0))
}

fn cmd_dual(input: &str, as_json: bool) -> Result<(String, i32), Error> {
    let poset = load_poset(input)?;
    let algebra = dual_algebra(&poset)?;
    let text = if as_json {
        let upsets: Vec<Vec<usize>> =
            algebra.universe().iter().map(|s| s.iter().collect()).collect();
        let u = algebra.len();
        let imp: Vec<Vec<usize>> =
            (0..u).map(|a| (0..u).map(|b| algebra.imp(a, b)).collect()).collect();
        let coimp: Vec<Vec<usize>> =
            (0..u).map(|a| (0..u).map(|b| algebra.coimp(a, b)).collect()).collect();
        format!(
            "{}\n",
            serde_json::to_string(
                &json!({ "size": u, "upsets": upsets, "imp": imp, "coimp": coimp })
            )
            .unwrap()
        )
    } else {
        algebra.to_text()
    };
    Ok((text, 0))
}

fn cmd_dualize_back(input: &str, as_json: bool) -> Result<(String, i32), Error> {
    let algebra = FiniteBHA::from_text(&read_file(input)?)?;
    let poset = prime_filter_poset(&algebra);
    let text = if as_json {
        format!(
            "{}\n",
            serde_json::to_string(&json!({ "n": poset.len(), "covers": poset.covers() })).unwrap()
        )
    } else {
        poset.to_text()
    };
    Ok((text, 0))
}

fn cmd_valid(
    input: &str,
    formula: Option<&str>,
    axiom: Option<&str>,
    as_json: bool,
) -> Result<(String, i32), Error> {
    let poset = load_poset(input)?;
    let phi = match (formula, axiom) {
        (Some(text), None) => parse_formula(text)?,
        (None, Some("prelinearity")) => Formula::prelinearity(),
        (None, Some("bilc")) => Formula::bilc(),
        (None, Some(other)) => {
            return Err(Error::Usage(format!(
                "unknown axiom {other:?} (expected prelinearity or bilc)"
            )))
        }
        _ => return Err(Error::Usage("give exactly one of --formula or --axiom".into())),
    };
    let (valid, refutation) = is_valid(&poset, &phi)?;
    let text = if as_json {
        let refutation = refutation.as_ref().map(|r| {
            json!({
                "valuation": r
                    .valuation
                    .iter()
                    .map(|(v, s)| (v.clone(), s.iter().collect::<Vec<usize>>()))
                    .collect::<Vec<_>>(),
                "point": r.point,
            })
        });
        format!(
            "{}\n",
            serde_json::to_string(&json!({ "valid": valid, "refutation": refutation })).unwrap()
        )
    } else {
        match &refutation {
            None => "valid\n".to_string(),
            Some(r) => {
                let mut s = String::from("invalid\n");
                for (var, set) in &r.valuation {
                    writeln!(s, "{var} = {{{set}}}").unwrap();
                }
                writeln!(s, "refuted at {}", r.point).unwrap();
                s
            }
        }
    };
    Ok((text, 0))
}

fn cmd_subframe(input: &str, omit: &str, as_json: bool) -> Result<(String, i32), Error> {
    let poset = load_poset(input)?;
    let omitted = load_cotree(omit)?;
    let refuted = subframe_refuted(&poset, &omitted)?;
    let text = if as_json {
        format!("{}\n", serde_json::to_string(&json!({ "refuted": refuted })).unwrap())
    } else if refuted {
        "refuted\n".to_string()
    } else {
        "validated\n".to_string()
    };
    Ok((text, 0))
}

fn cmd_antichain(in_t: usize, nodes: usize, as_json: bool) -> Result<(String, i32), Error> {
    if in_t == 0 {
        return Err(Error::Param("T_n is defined for n >= 1".into()));
    }
    check_node_bound(nodes)?;
    let items: Vec<CoTree> = enumerate_cotrees(nodes)
        .filter(|t| t.len() == nodes && t.in_t(in_t).unwrap())
        .collect();
    let table = LeqPTable::build(&items);
    let lt = |i: usize, j: usize| i != j && table.leq(items[i].code(), items[j].code());
    let antichain = max_antichain(items.len(), lt);
    let codes: Vec<&str> = antichain.iter().map(|&i| items[i].code().as_str()).collect();
    let text = if as_json {
        format!(
            "{}\n",
            serde_json::to_string(&json!({ "size": codes.len(), "members": codes })).unwrap()
        )
    } else {
        let mut s = format!("size {}\n", codes.len());
        for code in codes {
            writeln!(s, "{code}").unwrap();
        }
        s
    };
    Ok((text, 0))
}

fn cmd_verify(
    checks: &[String],
    all: bool,
    timings: bool,
    as_json: bool,
) -> Result<(String, i32), Error> {
    let names: Vec<&str> = if all || checks.is_empty() {
        ALL_CHECKS.to_vec()
    } else {
        let mut names = Vec::new();
        for c in checks {
            if !ALL_CHECKS.contains(&c.as_str()) {
                return Err(Error::UnknownCheck(c.clone()));
            }
            names.push(c.as_str());
        }
        names
    };
    let reports: Vec<CheckReport> =
        names.iter().map(|n| run_check(n)).collect::<Result<_, _>>()?;
    let all_pass = reports.iter().all(|r| r.pass);
    let text = if as_json {
        let items: Vec<_> = reports
            .iter()
            .map(|r| {
                let mut obj = json!({
                    "name": r.name,
                    "params": r.params,
                    "pass": r.pass,
                    "instances": r.instances,
                    "counterexamples": r.counterexamples,
                });
                if timings {
                    obj["wall_ms"] = json!(r.wall_ms);
                }
                obj
            })
            .collect();
        format!(
            "{}\n",
            serde_json::to_string(&json!({ "pass": all_pass, "checks": items })).unwrap()
        )
    } else {
        let mut s = String::new();
        for r in &reports {
            let status = if r.pass { "PASS" } else { "FAIL" };
            if timings {
                writeln!(s, "[{status}] {} ({} instances, {} ms)", r.name, r.instances, r.wall_ms)
                    .unwrap();
            } else {
                writeln!(s, "[{status}] {} ({} instances)", r.name, r.instances).unwrap();
            }
            for cx in &r.counterexamples {
                for line in cx.lines() {
                    writeln!(s, "    {line}").unwrap();
                }
            }
        }
        s
    };
    Ok((text, if all_pass { 0 } else { 1 }))
}
