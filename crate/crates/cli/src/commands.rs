use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_bigint::BigUint;
use rackforge::classify::{
    classify_class, fw_identify, lemma_square_check, regular_product_check, subrack_census,
    witness_search_cached, FwMatch, SearchConfig, SearchOutcome, Strategy, Verdict, VerdictReason,
    WitnessCache,
};
use rackforge::constructions::{affine_frobenius_group, order_p_classes, psl_permutation_group};
use rackforge::groups::alternating_generators;
use rackforge::homology::{second_cohomology_structure, MAX_CUBE};
use rackforge::numth::{cyclotomic_decompositions, cyclotomic_primes_below, is_prime};
use rackforge::rack::FiniteRack;
use rackforge::{Error, PermGroup, Permutation, Result};
use serde_json::{json, Value};

use crate::verify;
use crate::{EXIT_BUDGET, EXIT_DOMAIN, EXIT_OK};

#[derive(Debug, Parser)]
#[command(
    name = "rackforge",
    version,
    about = "Type-D classification and rack homology for classes of p-cycles"
)]
pub struct Cli {
    /// Print the JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form verdict for the class of (1 2 … p) in A_m.
    Classify {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: usize,
    },
    /// Search for a type-D pair (σ, τ) with σ = (1 2 … p).
    Witness {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: usize,
        /// exhaustive, random or subgroup.
        #[arg(long, default_value = "subgroup")]
        strategy: Strategy,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Maximum number of candidate τ examined.
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        /// Allow exhaustive enumeration of large classes.
        #[arg(long)]
        deep: bool,
        /// Witness cache file, read and updated.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Histogram of subracks generated by σ and each τ in its class.
    Census {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Pairs with (στ)² = (τσ)²: commuting-or-involution dichotomy and the p² bound.
    Lemma {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Identify ⟨σ, τ⟩ for two p-cycles given in cycle notation.
    FwIdentify {
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        tau: String,
        /// Degree of both permutations (default: largest point mentioned).
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Structure of H²(X, k^×) for a rack.
    Cohomology {
        /// Rack table as JSON.
        #[arg(long, required_unless_present = "class", conflicts_with = "class")]
        rack: Option<PathBuf>,
        /// Use the alternating-group class of this permutation instead.
        #[arg(long)]
        class: Option<String>,
        #[arg(long, requires = "class")]
        degree: Option<usize>,
        /// Also write the rack built from --class to this file.
        #[arg(long, requires = "class")]
        export: Option<PathBuf>,
    },
    /// Build a permutation group and list its order-p classes.
    Construct {
        #[command(subcommand)]
        which: ConstructCommand,
    },
    /// Primes (r^k − 1)/(r − 1) below a bound, with all decompositions.
    Primes {
        #[arg(long, default_value_t = 1000)]
        below: u64,
    },
    /// For pairs of order-p classes in L_k(r), find σ, τ with |στ| ∉ {1, 2, p}.
    Products {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: u64,
    },
    /// Run the acceptance checks.
    VerifyAll {
        /// Full desk-scale suite, including the property-based checks.
        #[arg(long)]
        desk: bool,
        /// Run only these checks (comma-separated ids).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ConstructCommand {
    /// L_k(r) acting on projective points.
    Psl {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: u64,
    },
    /// F_q ⋊ F_q^× for q = 2^h, acting on F_q.
    Frobenius {
        #[arg(long)]
        h: u32,
    },
}

pub(crate) struct Done {
    pub command: &'static str,
    pub code: i32,
    pub config: Value,
    pub result: Value,
    pub provenance: Vec<String>,
    pub human: String,
}

impl Done {
    fn new(command: &'static str, config: Value, result: Value, human: String) -> Self {
        Done {
            command,
            code: EXIT_OK,
            config,
            result,
            provenance: Vec::new(),
            human,
        }
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn decompositions_text(pairs: &[[u64; 2]], p: u64) -> String {
    pairs
        .iter()
        .map(|[r, k]| format!("{p} = ({r}^{k} - 1)/({r} - 1)"))
        .collect::<Vec<_>>()
        .join(", ")
}

pub(crate) fn execute(cli: &Cli) -> Result<Done> {
    match &cli.command {
        Command::Classify { p, m } => {
            let v = classify_class(*p, *m)?;
            let why = match &v.reason {
                VerdictReason::Cyclotomic(pairs) => decompositions_text(pairs, *p),
                VerdictReason::BelowThreshold {
                    threshold,
                    cyclotomic,
                } => format!(
                    "{}, but p < {threshold}",
                    decompositions_text(cyclotomic, *p)
                ),
                VerdictReason::NotCyclotomic => format!("{p} is not (r^k - 1)/(r - 1)"),
            };
            let verdict = match v.verdict {
                Verdict::TypeD => "type D",
                Verdict::NotTypeD => "not type D",
            };
            let human = format!("(1 2 ... {p}) in A_{m}: {verdict} ({why})\n");
            let mut done = Done::new("classify", json!({ "p": p, "m": m }), to_value(&v), human);
            done.provenance.push(
                "closed form: type D iff p = (r^k-1)/(r-1) and p >= 13 (m = p) or p >= 7 (m = p+1)"
                    .into(),
            );
            Ok(done)
        }
        Command::Witness {
            p,
            m,
            strategy,
            seed,
            budget,
            deep,
            cache,
        } => {
            let config = SearchConfig {
                strategy: *strategy,
                budget: *budget,
                seed: *seed,
                deep: *deep,
            };
            let mut store = match cache {
                Some(path) => WitnessCache::load(path)?,
                None => WitnessCache::default(),
            };
            let report = witness_search_cached(*p, *m, &config, &mut store)?;
            if let Some(path) = cache {
                store.save(path)?;
            }
            let code = match report.outcome {
                SearchOutcome::Found { .. } | SearchOutcome::ProvenAbsent => EXIT_OK,
                SearchOutcome::BudgetExhausted | SearchOutcome::Inconclusive => EXIT_BUDGET,
            };
            let mut human = String::new();
            match &report.outcome {
                SearchOutcome::Found { witness, subgroup } => {
                    let _ = writeln!(human, "type-D pair in A_{m}:");
                    let _ = writeln!(human, "  sigma = {}", witness.sigma);
                    let _ = writeln!(human, "  tau   = {}", witness.tau);
                    let _ = writeln!(human, "  |<sigma, tau>| = {}", witness.evidence.group_order);
                    if let Some(s) = subgroup {
                        let _ = writeln!(human, "  found inside {s}");
                    }
                    if report.cached {
                        let _ = writeln!(human, "  (from cache, re-verified)");
                    }
                }
                SearchOutcome::ProvenAbsent => {
                    let _ = writeln!(
                        human,
                        "no type-D pair: all {} elements of the class examined",
                        report.pairs_examined
                    );
                }
                SearchOutcome::BudgetExhausted => {
                    let _ = writeln!(
                        human,
                        "no witness within budget ({} pairs examined)",
                        report.pairs_examined
                    );
                }
                SearchOutcome::Inconclusive => {
                    let _ = writeln!(
                        human,
                        "no witness among {} subgroup candidates; inconclusive",
                        report.pairs_examined
                    );
                }
            }
            for e in &report.tally {
                let _ = writeln!(
                    human,
                    "  {:?} with |<sigma, tau>| = {}: {}",
                    e.verdict, e.group_order, e.count
                );
            }
            let cfg = json!({
                "p": p, "m": m, "strategy": strategy, "seed": seed, "budget": budget,
                "deep": deep, "cache": cache.as_ref().map(|c| c.display().to_string()),
            });
            let mut done = Done::new("witness", cfg, to_value(&report), human);
            done.code = code;
            Ok(done)
        }
        Command::Census { p, m, budget, seed } => {
            let c = subrack_census(*p, *m, *budget, *seed)?;
            let mut human = format!(
                "{} pairs ({}) over a class of {}\n",
                c.pairs_examined,
                if c.complete { "exhaustive" } else { "sampled" },
                c.class_size
            );
            for e in &c.entries {
                let case = e.case.map_or("?".to_string(), |t| t.to_string());
                let kind = if e.abelian { "abelian" } else { "non-abelian" };
                let _ = writeln!(
                    human,
                    "  closure {:>10} {kind:<12} case {case:<7} x{}",
                    e.closure_size, e.count
                );
            }
            let _ = writeln!(
                human,
                "non-abelian proper sizes: {:?}",
                c.non_abelian_proper_sizes
            );
            let cfg = json!({ "p": p, "m": m, "budget": budget, "seed": seed });
            let mut done = Done::new("census", cfg, to_value(&c), human);
            if !c.complete {
                done.code = EXIT_BUDGET;
            }
            Ok(done)
        }
        Command::Lemma { p, m, budget, seed } => {
            let r = lemma_square_check(*p, *m, *budget, *seed)?;
            let mut human = format!(
                "{} pairs, {} with (st)^2 = (ts)^2\n  dichotomy: {}\n  |<s,t>| <= p^2: {}\n",
                r.pairs_examined,
                r.squares_commute,
                if r.dichotomy_holds() {
                    "holds"
                } else {
                    "violated"
                },
                if r.bound_holds() { "holds" } else { "violated" },
            );
            for v in r.bound_violations.iter().take(5) {
                let _ = writeln!(
                    human,
                    "    tau = {} generates a group of order {}",
                    v.tau, v.group_order
                );
            }
            let cfg = json!({ "p": p, "m": m, "budget": budget, "seed": seed });
            let mut done = Done::new("lemma", cfg, to_value(&r), human);
            if !r.complete {
                done.code = EXIT_BUDGET;
            }
            Ok(done)
        }
        Command::FwIdentify { sigma, tau, degree } => {
            let degree = match degree {
                Some(d) => *d,
                None => {
                    let a: Permutation = sigma.parse()?;
                    let b: Permutation = tau.parse()?;
                    a.degree().max(b.degree())
                }
            };
            let s = Permutation::parse_cycles(sigma, degree)?;
            let t = Permutation::parse_cycles(tau, degree)?;
            let case = fw_identify(&s, &t)?;
            let what = match &case.result {
                FwMatch::Case { tag, group, .. } => format!("case {tag}, {group}"),
                FwMatch::Ambiguous { candidates } => format!("ambiguous between {candidates:?}"),
                FwMatch::Unknown => "no listed case".to_string(),
            };
            let human = format!(
                "<sigma, tau> has order {} on {} points: {what}\n",
                case.order, case.m
            );
            let cfg = json!({ "sigma": s.to_string(), "tau": t.to_string(), "degree": degree });
            let mut done = Done::new("fw-identify", cfg, to_value(&case), human);
            if case.tag().is_none() {
                done.code = EXIT_DOMAIN;
            }
            Ok(done)
        }
        Command::Cohomology {
            rack,
            class,
            degree,
            export,
        } => {
            let (r, source) = match (rack, class) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                    (
                        FiniteRack::from_json(&text)?,
                        json!({ "rack": path.display().to_string() }),
                    )
                }
                (None, Some(cycles)) => {
                    let x = match degree {
                        Some(d) => Permutation::parse_cycles(cycles, *d)?,
                        None => cycles.parse()?,
                    };
                    let r = class_rack(&x)?;
                    if let Some(path) = export {
                        std::fs::write(path, r.to_json() + "\n")
                            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                    }
                    (r, json!({ "class": x.to_string(), "degree": x.degree() }))
                }
                (None, None) => {
                    return Err(Error::InvalidArgument("need --rack or --class".into()))
                }
            };
            r.validate()
                .map_err(|v| Error::InvalidArgument(format!("not a rack: {v:?}")))?;
            let h = second_cohomology_structure(&r)?;
            let human = format!("|X| = {}: H^2(X, k^x) = {}\n", r.size(), h.pretty);
            let mut result = to_value(&h);
            result["size"] = json!(r.size());
            Ok(Done::new("cohomology", source, result, human))
        }
        Command::Construct { which } => {
            let (name, group) = match which {
                ConstructCommand::Psl { k, r } => {
                    (format!("L_{k}({r})"), psl_permutation_group(*k, *r)?)
                }
                ConstructCommand::Frobenius { h } => {
                    let q = 1u64 << h;
                    (format!("F_{q} x F_{q}^*"), affine_frobenius_group(*h)?)
                }
            };
            construct_report(name, &group, which)
        }
        Command::Primes { below } => {
            let primes = cyclotomic_primes_below(*below);
            let mut decompositions = Vec::new();
            let mut human = String::new();
            for &p in &primes {
                let pairs = cyclotomic_decompositions(p)?.as_tuples();
                let _ = writeln!(human, "{}", decompositions_text(&pairs, p));
                decompositions.push(json!({ "p": p, "pairs": pairs }));
            }
            let result = json!({ "primes": primes, "decompositions": decompositions });
            Ok(Done::new(
                "primes",
                json!({ "below": below }),
                result,
                human,
            ))
        }
        Command::Products { k, r } => {
            let rep = regular_product_check(*k, *r)?;
            let mut human = format!(
                "L_{k}({r}), order {}, {} classes of order {}\n",
                rep.group_order,
                rep.class_exponents.len(),
                rep.p
            );
            for pr in &rep.pairs {
                let found = match (&pr.tau, pr.product_order) {
                    (Some(t), Some(o)) => format!("tau = {t}, |sigma tau| = {o}"),
                    _ => "none".to_string(),
                };
                let _ = writeln!(
                    human,
                    "  C{} -> C{}: {found} ({} tried)",
                    pr.from_class, pr.to_class, pr.searched
                );
            }
            let mut done = Done::new("products", json!({ "k": k, "r": r }), to_value(&rep), human);
            if !rep.all_found() {
                done.code = EXIT_DOMAIN;
            }
            Ok(done)
        }
        Command::VerifyAll { desk, only } => {
            let ids: Vec<u8> = if !only.is_empty() {
                only.clone()
            } else if *desk {
                verify::ALL_IDS.to_vec()
            } else {
                verify::ALL_IDS
                    .iter()
                    .copied()
                    .filter(|&i| i != verify::PROPERTY_SUITE_ID)
                    .collect()
            };
            if let Some(bad) = ids.iter().find(|i| !verify::ALL_IDS.contains(i)) {
                return Err(Error::InvalidArgument(format!("no check with id {bad}")));
            }
            let results = verify::run_selected(&ids);
            let mut human = String::new();
            for r in &results {
                let _ = writeln!(human, "{}", r.line());
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            let _ = writeln!(human, "{} passed, {failed} failed", results.len() - failed);
            let result =
                json!({ "criteria": results, "passed": results.len() - failed, "failed": failed });
            let mut done = Done::new(
                "verify-all",
                json!({ "desk": desk, "only": ids }),
                result,
                human,
            );
            done.provenance = verify::PROVENANCE.iter().map(|s| s.to_string()).collect();
            done.code = if failed == 0 { EXIT_OK } else { EXIT_DOMAIN };
            Ok(done)
        }
    }
}

/// Conjugation rack on the `A_n`-class of `x`.
fn class_rack(x: &Permutation) -> Result<FiniteRack> {
    if x.degree() < 3 {
        return Err(Error::InvalidArgument("degree must be at least 3".into()));
    }
    let group = PermGroup::new(&alternating_generators(x.degree()))?;
    if !x.is_even() {
        return Err(Error::InvalidArgument(format!("{x} is odd")));
    }
    let size = group.class_size(x, rackforge::groups::DEFAULT_ORBIT_CAP)?;
    if size.pow(3) > BigUint::from(MAX_CUBE) {
        return Err(Error::SizeGuard(format!(
            "n³ for a class of {size} elements exceeds {MAX_CUBE}"
        )));
    }
    let mut elems = group.conjugacy_orbit(x, MAX_CUBE)?;
    elems.sort();
    FiniteRack::conjugation(&elems)
}

fn construct_report(name: String, group: &PermGroup, which: &ConstructCommand) -> Result<Done> {
    let degree = group.degree();
    let gens: Vec<String> = group.generators().iter().map(|g| g.to_string()).collect();
    // The order-p classes of interest have p = degree (projective case) or
    // p = degree − 1 (affine case).
    let p = match which {
        ConstructCommand::Psl { .. } => degree as u64,
        ConstructCommand::Frobenius { .. } => degree as u64 - 1,
    };
    let classes = if is_prime(p) {
        Some(order_p_classes(group, p, 0)?.exponent_classes)
    } else {
        None
    };
    let mut human = format!("{name}: degree {degree}, order {}\n", group.order());
    if let Some(cs) = &classes {
        let _ = writeln!(
            human,
            "{} classes of elements of order {p}: exponents {cs:?}",
            cs.len()
        );
    }
    let result = json!({
        "group": name,
        "degree": degree,
        "order": group.order().to_string(),
        "generators": gens,
        "p": p,
        "order_p_classes": classes,
    });
    let config = match which {
        ConstructCommand::Psl { k, r } => json!({ "kind": "psl", "k": k, "r": r }),
        ConstructCommand::Frobenius { h } => json!({ "kind": "frobenius", "h": h }),
    };
    Ok(Done::new("construct", config, result, human))
}
