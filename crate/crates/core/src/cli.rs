//! The `coopsync` command line. Exit status: 0 on success, 1 when an input
//! fails to parse or validate, 2 on a usage error.

use std::fmt::Display;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::context::{load_project, ContextGraph};
use crate::metamodel::{parse_domain_model, DomainModel};
use crate::sync::{render_document, CorrelationConfig, Workspace};
use crate::syntax::Position;
use crate::transform::{check_rules, declared_roles, parse_rules, GenerateError, RoleFilter, RuleSet};
use crate::views::{builtin_views, emit_schema, parse_view_models, ViewConceptModel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "coopsync", version, about = "Multi-view cooperation context for construction sites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Serve the HTTP API and the /ws message channel.
    Serve(ServeArgs),
    /// Check a project file against a domain model.
    Validate(ProjectArgs),
    /// Print the schema of a view.
    Schema(SchemaArgs),
    /// Generate the content of one view for one role.
    Transform(TransformArgs),
    /// Check a rule file against a domain model and the views.
    LintRules(LintArgs),
}

#[derive(Debug, Args)]
struct ProjectArgs {
    #[arg(long)]
    project: PathBuf,
    #[arg(long)]
    model: PathBuf,
}

#[derive(Debug, Args)]
struct ViewArgs {
    /// Extra view concept models (`.cvm`) besides the built-in views.
    #[arg(long = "views", value_name = "CVM")]
    views: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[command(flatten)]
    project: ProjectArgs,
    #[arg(long)]
    rules: PathBuf,
    #[command(flatten)]
    views: ViewArgs,
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: std::net::IpAddr,
    /// Correlation depth; defaults to 2.
    #[arg(long)]
    max_hops: Option<u32>,
}

#[derive(Debug, Args)]
struct SchemaArgs {
    #[arg(long)]
    view: String,
    #[command(flatten)]
    views: ViewArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TransformArgs {
    #[command(flatten)]
    project: ProjectArgs,
    #[arg(long)]
    rules: PathBuf,
    #[arg(long)]
    view: String,
    #[arg(long, default_value = "coordinator")]
    role: String,
    #[command(flatten)]
    views: ViewArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LintArgs {
    #[arg(long)]
    rules: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    views: ViewArgs,
}

/// Early exit carrying the status and what to print on stderr.
struct Fail {
    code: i32,
    lines: Vec<String>,
}

impl Fail {
    fn usage(msg: impl Display) -> Self {
        Fail { code: EXIT_USAGE, lines: vec![format!("error: {msg}")] }
    }

    fn invalid(lines: Vec<String>) -> Self {
        Fail { code: EXIT_INVALID, lines }
    }
}

type Outcome = Result<Vec<u8>, Fail>;

fn at(file: &Path, pos: Position, msg: impl Display) -> String {
    format!("{}:{}:{}: {msg}", file.display(), pos.line, pos.column)
}

fn read(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail::usage(format!("cannot read {}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<DomainModel, Fail> {
    parse_domain_model(&read(path)?).map_err(|e| Fail::invalid(vec![at(path, e.position(), &e.message)]))
}

fn load_graph(dm: &DomainModel, path: &Path) -> Result<ContextGraph, Fail> {
    load_project(dm, &read(path)?)
        .map_err(|e| Fail::invalid(e.diagnostics().into_iter().map(|d| at(path, d.pos, &d.message)).collect()))
}

fn load_rules(path: &Path) -> Result<RuleSet, Fail> {
    parse_rules(&read(path)?).map_err(|e| Fail::invalid(vec![at(path, e.position(), &e.message)]))
}

fn load_views(args: &ViewArgs) -> Result<Vec<ViewConceptModel>, Fail> {
    let mut views = builtin_views();
    for path in &args.views {
        let extra =
            parse_view_models(&read(path)?).map_err(|e| Fail::invalid(vec![at(path, e.position(), &e.message)]))?;
        for v in extra {
            if views.iter().any(|b| b.view_id == v.view_id) {
                return Err(Fail::invalid(vec![format!(
                    "{}: view `{}` is already defined",
                    path.display(),
                    v.view_id
                )]));
            }
            views.push(v);
        }
    }
    Ok(views)
}

fn find_view(views: Vec<ViewConceptModel>, id: &str) -> Result<ViewConceptModel, Fail> {
    let known: Vec<String> = views.iter().map(|v| v.view_id.clone()).collect();
    views
        .into_iter()
        .find(|v| v.view_id == id)
        .ok_or_else(|| Fail::usage(format!("unknown view `{id}` (known: {})", known.join(", "))))
}

fn checked_rules(path: &Path, dm: &DomainModel, views: &[ViewConceptModel]) -> Result<RuleSet, Fail> {
    let rs = load_rules(path)?;
    let issues = check_rules(&rs, dm, views);
    if issues.is_empty() {
        Ok(rs)
    } else {
        Err(Fail::invalid(issues.iter().map(|i| at(path, i.pos, format!("{} [{}]", i.message, i.code))).collect()))
    }
}

fn write_output(output: &Option<PathBuf>, bytes: Vec<u8>) -> Outcome {
    match output {
        Some(p) => {
            std::fs::write(p, &bytes).map_err(|e| Fail::usage(format!("cannot write {}: {e}", p.display())))?;
            Ok(Vec::new())
        }
        None => Ok(bytes),
    }
}

fn validate(a: &ProjectArgs) -> Outcome {
    let dm = load_model(&a.model)?;
    let g = load_graph(&dm, &a.project)?;
    Ok(format!("{}: ok ({} nodes, {} edges)\n", a.project.display(), g.node_count(), g.edge_count()).into_bytes())
}

fn schema(a: &SchemaArgs) -> Outcome {
    let v = find_view(load_views(&a.views)?, &a.view)?;
    write_output(&a.output, emit_schema(&v).document.into_bytes())
}

fn transform(a: &TransformArgs) -> Outcome {
    let views = load_views(&a.views)?;
    let dm = load_model(&a.project.model)?;
    let rs = checked_rules(&a.rules, &dm, &views)?;
    let view = find_view(views, &a.view)?;
    if !declared_roles(&dm).contains(&a.role) {
        return Err(Fail::usage(format!("unknown role `{}`", a.role)));
    }
    let g = load_graph(&dm, &a.project.project)?;
    let doc = render_document(&rs, &g, &view, &RoleFilter::new(a.role.as_str())).map_err(|e| {
        let line = match &e {
            GenerateError::Eval { rule, .. } => match rs.rule(rule) {
                Some(r) => at(&a.rules, r.loc.0, &e),
                None => format!("{}: {e}", a.rules.display()),
            },
            _ => format!("{}: {e}", a.rules.display()),
        };
        Fail::invalid(vec![line])
    })?;
    write_output(&a.output, doc.into_bytes())
}

fn lint(a: &LintArgs) -> Outcome {
    let views = load_views(&a.views)?;
    let dm = load_model(&a.model)?;
    let rs = checked_rules(&a.rules, &dm, &views)?;
    Ok(format!("{}: ok ({} rules, {} visibility paths)\n", a.rules.display(), rs.rules.len(), rs.visibility.len())
        .into_bytes())
}

fn serve(a: &ServeArgs) -> Outcome {
    let views = load_views(&a.views)?;
    let dm = load_model(&a.project.model)?;
    let rs = checked_rules(&a.rules, &dm, &views)?;
    let g = load_graph(&dm, &a.project.project)?;
    let mut correlation = CorrelationConfig::defaults_for(&dm);
    if let Some(h) = a.max_hops {
        correlation.max_hops = h;
    }
    let ws = Workspace::new(dm, g, rs, views, correlation).map_err(|e| Fail::invalid(vec![e.to_string()]))?;

    let _ = tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .try_init();

    let rt = tokio::runtime::Runtime::new().map_err(|e| Fail::usage(format!("cannot start runtime: {e}")))?;
    rt.block_on(async {
        let addr = SocketAddr::new(a.host, a.port);
        let listener =
            tokio::net::TcpListener::bind(addr).await.map_err(|e| Fail::usage(format!("cannot bind {addr}: {e}")))?;
        let local = listener.local_addr().map_err(Fail::usage)?;
        tracing::info!("listening on http://{local}");
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
            tracing::info!("shutting down");
        };
        crate::server::serve(listener, Arc::new(ws), shutdown)
            .await
            .map_err(|e| Fail::usage(format!("server error: {e}")))
    })?;
    Ok(Vec::new())
}

/// Runs the command line and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Serve(a) => serve(a),
        Command::Validate(a) => validate(a),
        Command::Schema(a) => schema(a),
        Command::Transform(a) => transform(a),
        Command::LintRules(a) => lint(a),
    };
    match outcome {
        Ok(bytes) => {
            let _ = out.write_all(&bytes);
            EXIT_OK
        }
        Err(f) => {
            for l in f.lines {
                let _ = writeln!(err, "{l}");
            }
            f.code
        }
    }
}
