use trf_core::{
    catalog_specs, census_expand, convergence_report, direct_expand, enumerate_terms_with, eval_partial,
    eval_subseries_split, evaluate_terms, format_rational, lookup, parse_inline_rules, subseries_by_recursion,
    subseries_infinite_with, subseries_polynomial_with, subseries_tables, count_terms, verify_termination,
    CatalogSpec, CensusOptions, ClosedFormOptions, EvalRequest, Rational, RecurrenceSpec, Scalar,
    ScalarMode, SeedRule, SubSeriesTable, TerminationProfile,
};

use crate::report::{ErrorRecord, Report, Row, RuleSummary, SeedSummary, SpecSummary};
use crate::{Command, RunConfig, SeedChoice, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_ERROR, EXIT_OK};

enum Failure {
    Config(ErrorRecord),
    Module(ErrorRecord),
}

type Outcome<T> = Result<T, Failure>;

fn config<T>(message: impl Into<String>) -> Outcome<T> {
    Err(Failure::Config(ErrorRecord::config(message)))
}

trait Tag<T> {
    fn at(self, module: &str, operation: &str) -> Outcome<T>;
}

impl<T> Tag<T> for trf_core::Result<T> {
    fn at(self, module: &str, operation: &str) -> Outcome<T> {
        self.map_err(|e| Failure::Module(ErrorRecord::from_core(&e, module, operation)))
    }
}

fn require<T: Copy>(value: Option<T>, flag: &str, command: Command) -> Outcome<T> {
    match value {
        Some(v) => Ok(v),
        None => config(format!("`{}` needs {flag}", command.as_str())),
    }
}

/// Catalog name or inline rules, with the seed, `c0` and `lambda` overrides applied.
fn resolve_spec(cfg: &RunConfig) -> Outcome<RecurrenceSpec> {
    let Some(equation) = cfg.equation.as_deref() else {
        return config(format!("`{}` needs --equation", cfg.command.as_str()));
    };
    let mut spec = if equation.contains('=') {
        let rules = parse_inline_rules(equation, &cfg.params).map_err(|e| {
            Failure::Config(ErrorRecord {
                kind: "ConfigError".into(),
                module: "cli".into(),
                operation: "parse_inline_rules".into(),
                index: None,
                message: e.to_string(),
            })
        })?;
        RecurrenceSpec::canonical(rules).at("recurrence_core", "new")?.with_name("inline")
    } else {
        lookup(equation.trim(), &cfg.params, cfg.lambda.clone()).at("equation_catalog", "lookup")?
    };
    let name = spec.name().to_string();
    let lambda = cfg.lambda.clone().unwrap_or_else(|| spec.lambda().clone());
    match &cfg.seed {
        None => {}
        Some(SeedChoice::Canonical) => {
            let c0 = cfg.c0.clone().unwrap_or_else(|| Rational::from_integer(1.into()));
            spec = RecurrenceSpec::new(spec.rules().to_vec(), SeedRule::Canonical, c0).at("recurrence_core", "new")?;
        }
        Some(SeedChoice::Explicit(values)) => {
            if cfg.c0.is_some() {
                return config("--c0 conflicts with an explicit seed (its first value is c0)");
            }
            let (c0, rest) = values.split_first().expect("seed list is nonempty");
            spec = RecurrenceSpec::new(spec.rules().to_vec(), SeedRule::Explicit(rest.to_vec()), c0.clone())
                .at("recurrence_core", "new")?;
        }
    }
    if let (Some(c0), None) = (&cfg.c0, &cfg.seed) {
        spec = spec.with_c0(c0.clone()).at("recurrence_core", "new")?;
    }
    Ok(spec.with_name(name).with_lambda(lambda).with_mode(cfg.mode))
}

fn summarize(spec: &RecurrenceSpec) -> SpecSummary {
    SpecSummary {
        name: spec.name().to_string(),
        arity: spec.arity(),
        rules: spec
            .rule_descriptions()
            .into_iter()
            .map(|(label, rule)| RuleSummary {
                label: label.to_string(),
                rule,
            })
            .collect(),
        seed: match spec.seed() {
            SeedRule::Canonical => SeedSummary::Canonical,
            SeedRule::Explicit(v) => SeedSummary::Explicit(v.iter().map(format_rational).collect()),
        },
        lambda: format_rational(spec.lambda()),
        c0: format_rational(spec.c0()),
        mode: spec.mode(),
    }
}

struct Context<'a> {
    cfg: &'a RunConfig,
    spec: Option<RecurrenceSpec>,
    rows: Vec<Row>,
    check_failed: bool,
}

impl Context<'_> {
    fn spec(&self) -> &RecurrenceSpec {
        self.spec.as_ref().expect("spec resolved")
    }

    fn closed_form_options(&self) -> ClosedFormOptions {
        ClosedFormOptions {
            execution: self.cfg.execution,
            ..Default::default()
        }
    }

    fn census_options(&self) -> CensusOptions {
        CensusOptions {
            cap: self.cfg.census_cap,
            execution: self.cfg.execution,
        }
    }
}

/// Runs the configured command. Never panics on bad input.
pub(crate) fn execute(cfg: &RunConfig) -> (Report, i32) {
    let mut ctx = Context {
        cfg,
        spec: None,
        rows: Vec::new(),
        check_failed: false,
    };
    let outcome = dispatch(&mut ctx);
    let (errors, code) = match outcome {
        Ok(()) if ctx.check_failed => (Vec::new(), EXIT_CHECK_FAILED),
        Ok(()) => (Vec::new(), EXIT_OK),
        Err(Failure::Config(e)) => (vec![e], EXIT_CONFIG),
        Err(Failure::Module(e)) => (vec![e], EXIT_ERROR),
    };
    let report = Report {
        command: cfg.command.as_str().into(),
        spec: ctx.spec.as_ref().map(summarize),
        results: ctx.rows,
        errors,
    };
    (report, code)
}

fn dispatch(ctx: &mut Context) -> Outcome<()> {
    let needs_spec = !matches!(ctx.cfg.command, Command::Catalog)
        && !(ctx.cfg.command == Command::Census && ctx.cfg.equation.is_none());
    if needs_spec {
        ctx.spec = Some(resolve_spec(ctx.cfg)?);
    }
    match ctx.cfg.mode {
        ScalarMode::Exact => dispatch_with::<Rational>(ctx),
        ScalarMode::Approx => dispatch_with::<f64>(ctx),
    }
}

fn dispatch_with<S: Scalar>(ctx: &mut Context) -> Outcome<()> {
    match ctx.cfg.command {
        Command::Expand => expand::<S>(ctx),
        Command::Census => census::<S>(ctx),
        Command::Trf => trf::<S>(ctx),
        Command::Compare => compare::<S>(ctx),
        Command::Terminate => terminate(ctx),
        Command::Eval => eval::<S>(ctx),
        Command::Catalog => {
            catalog(ctx);
            Ok(())
        }
    }
}

fn expand<S: Scalar>(ctx: &mut Context) -> Outcome<()> {
    let n_max = require(ctx.cfg.n_max, "--n-max", ctx.cfg.command)?;
    let seq = direct_expand::<S>(ctx.spec(), n_max).at("recurrence_core", "direct_expand")?;
    ctx.rows = seq
        .values
        .iter()
        .enumerate()
        .map(|(n, v)| Row::Coefficient { n, value: v.render() })
        .collect();
    Ok(())
}

fn census<S: Scalar>(ctx: &mut Context) -> Outcome<()> {
    let n_max = require(ctx.cfg.n_max, "--n-max", ctx.cfg.command)?;
    let arity = match (&ctx.spec, ctx.cfg.arity) {
        (Some(spec), Some(a)) if a != spec.arity() => {
            return config(format!("--arity {a} disagrees with the equation's arity {}", spec.arity()))
        }
        (Some(spec), _) => spec.arity(),
        (None, Some(a)) => a,
        (None, None) => return config("`census` needs --arity or --equation"),
    };
    let options = ctx.census_options();
    for n in 0..=n_max {
        let list = enumerate_terms_with(n, arity, &options).at("term_census", "enumerate_terms")?;
        let value = match &ctx.spec {
            Some(spec) => Some(evaluate_terms::<S>(&list, spec).at("term_census", "evaluate_terms")?.render()),
            None => None,
        };
        let terms = ctx
            .cfg
            .terms
            .then(|| list.terms.iter().map(|t| t.canonical()).collect());
        ctx.rows.push(Row::Census {
            n,
            arity,
            count: count_terms(n, arity).to_string(),
            value,
            terms,
        });
    }
    Ok(())
}

fn push_table<S: Scalar>(rows: &mut Vec<Row>, table: &SubSeriesTable<S>) {
    for (&power, value) in &table.entries {
        rows.push(Row::Subseries {
            order: table.order,
            power,
            kind: table.kind,
            value: value.render(),
        });
    }
}

fn trf<S: Scalar>(ctx: &mut Context) -> Outcome<()> {
    let order_max = require(ctx.cfg.order_max, "--N-max", ctx.cfg.command)?;
    let options = ctx.closed_form_options();
    if ctx.cfg.betas.is_empty() {
        let n_max = require(ctx.cfg.n_max, "--n-max", ctx.cfg.command)?;
        for order in 0..=order_max {
            let table = subseries_infinite_with::<S>(ctx.spec(), order, n_max, &options)
                .at("trf_closed_form", "subseries_infinite")?;
            push_table(&mut ctx.rows, &table);
        }
    } else {
        let profile = TerminationProfile::new(ctx.cfg.betas.clone());
        for order in 0..=order_max {
            let table = subseries_polynomial_with::<S>(ctx.spec(), order, &profile, &options)
                .at("trf_closed_form", "subseries_polynomial")?;
            push_table(&mut ctx.rows, &table);
        }
    }
    Ok(())
}

fn difference<S: Scalar>(a: &S, b: &S) -> (String, bool) {
    let d = a.clone() - b.clone();
    let zero = d.is_zero();
    (d.render(), zero)
}

fn compare<S: Scalar>(ctx: &mut Context) -> Outcome<()> {
    let k_max = require(ctx.cfg.k_max, "--k-max", ctx.cfg.command)?;
    let spec = ctx.spec().clone();
    let direct = direct_expand::<S>(&spec, k_max).at("recurrence_core", "direct_expand")?;
    let canonical = spec.seed().is_canonical();
    let census = if canonical {
        let reach = k_max.min(ctx.cfg.census_cap);
        Some(census_expand::<S>(&spec, reach, &ctx.census_options()).at("term_census", "census_expand")?)
    } else {
        None
    };
    let trf = if canonical && spec.arity() == 3 {
        let tables = subseries_tables::<S>(&spec, k_max, &ctx.closed_form_options())
            .at("trf_closed_form", "subseries_tables")?;
        Some(trf_core::assemble_coefficients(&tables, k_max).at("trf_closed_form", "assemble_coefficients")?)
    } else {
        None
    };
    let exact = ctx.cfg.mode == ScalarMode::Exact;
    for (k, d) in direct.values.iter().enumerate() {
        let census_value = census.as_ref().and_then(|c| c.get(k));
        let trf_value = trf.as_ref().and_then(|t| t.get(k));
        let delta_census = census_value.map(|c| difference(d, c));
        let delta_trf = trf_value.map(|t| difference(d, t));
        for (_, zero) in delta_census.iter().chain(&delta_trf) {
            if exact && !zero {
                ctx.check_failed = true;
            }
        }
        ctx.rows.push(Row::Compare {
            k,
            direct: d.render(),
            census: census_value.map(Scalar::render),
            trf: trf_value.map(Scalar::render),
            delta_census: delta_census.map(|(s, _)| s),
            delta_trf: delta_trf.map(|(s, _)| s),
        });
    }
    Ok(())
}

fn terminate(ctx: &mut Context) -> Outcome<()> {
    if ctx.cfg.betas.is_empty() {
        return config("`terminate` needs at least one --beta");
    }
    let profile = TerminationProfile::new(ctx.cfg.betas.clone());
    let report = verify_termination(ctx.spec(), &profile).at("trf_closed_form", "verify_termination")?;
    for c in &report.checks {
        ctx.rows.push(Row::Termination {
            i: c.i,
            beta: c.beta,
            index: c.index,
            value: c.value.clone(),
            vanishes: c.vanishes,
        });
    }
    ctx.rows.push(Row::TerminationSummary {
        monotone: report.monotone,
        passed: report.passed,
    });
    ctx.check_failed = !report.passed;
    Ok(())
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn eval<S: Scalar>(ctx: &mut Context) -> Outcome<()> {
    let k_max = require(ctx.cfg.k_max, "--k-max", ctx.cfg.command)?;
    let x = require(ctx.cfg.x, "--x", ctx.cfg.command)?;
    let spec = ctx.spec().clone();
    let lambda = Scalar::to_f64(spec.lambda());
    let req = EvalRequest::new(x, k_max).with_lambda(lambda);
    let seq = direct_expand::<S>(&spec, k_max).at("recurrence_core", "direct_expand")?;
    let value = eval_partial(&seq, &req).at("series_eval", "eval_partial")?;
    ctx.rows.push(Row::PartialSum {
        x,
        lambda,
        k_max,
        value,
    });
    if spec.arity() != 3 {
        return Ok(());
    }
    if spec.seed().is_canonical() {
        let tables = subseries_by_recursion::<S>(&spec, k_max).at("trf_closed_form", "subseries_by_recursion")?;
        let split = eval_subseries_split(&tables, &req).at("series_eval", "eval_subseries_split")?;
        for part in split.parts {
            ctx.rows.push(Row::SubseriesSum {
                order: part.order,
                value: part.value,
            });
        }
        ctx.rows.push(Row::SubseriesTotal { value: split.total });
    }
    let report = convergence_report(&seq, &spec, x).at("series_eval", "convergence_report")?;
    for r in &report.ratios {
        ctx.rows.push(Row::ScaledRatio {
            n: r.index,
            value: r.scaled_ratio.and_then(finite),
        });
    }
    ctx.rows.push(Row::Convergence {
        verdict: report.verdict,
        last_term: finite(report.last_term),
        tail_decreasing: report.tail_decreasing,
        undefined_ratios: report.undefined_ratios,
    });
    Ok(())
}

fn catalog(ctx: &mut Context) {
    for entry in catalog_specs() {
        let (arity, required) = match &entry.spec {
            CatalogSpec::Fixed(spec) => (Some(spec.arity()), Vec::new()),
            CatalogSpec::Parameterized { required } => {
                let mut names: Vec<String> = required.iter().map(|s| s.to_string()).collect();
                names.push("lambda".into());
                (Some(3), names)
            }
        };
        ctx.rows.push(Row::CatalogEntry {
            name: entry.name.into(),
            summary: entry.summary.into(),
            arity,
            required,
        });
    }
}
