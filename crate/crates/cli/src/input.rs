//! Input files: instances in either format, and the CLI-only `directed`
//! and `ctilde` formats.

use std::fs;
use std::path::Path;

use ringforge::directed::{DirectedLink, DirectedSolution};
use ringforge::model::{load_instance, Instance, LinkId};
use ringforge::reduction::{load_cactus, map_solution_back, unfold_cactus, CactusInstance, UnfoldMap};
use ringforge::{Error, Vertex};

use crate::CliError;

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// A ring instance, or a cactus together with its unfolded ring.
pub enum Problem {
    Ring(Instance),
    Cactus { cactus: CactusInstance, ring: Instance, map: UnfoldMap },
}

impl Problem {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = read(path)?;
        let header =
            text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).find(|l| !l.is_empty()).unwrap_or("");
        if header.starts_with("cactus") {
            let cactus = load_cactus(&text)?;
            let (ring, map) = unfold_cactus(&cactus)?;
            Ok(Problem::Cactus { cactus, ring, map })
        } else {
            Ok(Problem::Ring(load_instance(&text)?))
        }
    }

    pub fn ring(&self) -> &Instance {
        match self {
            Problem::Ring(inst) => inst,
            Problem::Cactus { ring, .. } => ring,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Problem::Ring(_) => "wrap",
            Problem::Cactus { .. } => "cactus",
        }
    }

    pub fn cost_scale(&self) -> i64 {
        self.ring().cost_scale()
    }

    /// Translates a ring solution into ids of the input file.
    pub fn to_input_ids(&self, ring_solution: &[LinkId]) -> Result<Vec<LinkId>, CliError> {
        match self {
            Problem::Ring(_) => Ok(ring_solution.to_vec()),
            Problem::Cactus { ring, map, .. } => Ok(map_solution_back(ring, map, ring_solution)?),
        }
    }

    pub fn is_solution(&self, ids: &[LinkId]) -> bool {
        match self {
            Problem::Ring(inst) => ringforge::model::is_wrap_solution(inst, ids),
            Problem::Cactus { cactus, .. } => ringforge::reduction::is_cactus_solution(cactus, ids),
        }
    }

    pub fn cost_of(&self, ids: &[LinkId]) -> i64 {
        match self {
            Problem::Ring(inst) => inst.cost_of(ids),
            Problem::Cactus { cactus, .. } => cactus.cost_of(ids),
        }
    }

    pub fn link_count(&self) -> usize {
        match self {
            Problem::Ring(inst) => inst.links().len(),
            Problem::Cactus { cactus, .. } => cactus.links().len(),
        }
    }

    /// The instance itself, or an error naming the command for cactus input.
    pub fn require_ring(&self, command: &str) -> Result<&Instance, CliError> {
        match self {
            Problem::Ring(inst) => Ok(inst),
            Problem::Cactus { .. } => Err(CliError::Usage(format!("`{command}` expects a wrap instance"))),
        }
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> CliError {
    CliError::Lib(Error::Parse { line, message: message.into() })
}

/// Tokens of each non-comment line with its 1-based line number, after
/// checking the one-word header.
fn body_lines<'a>(text: &'a str, header: &str) -> Result<Vec<(usize, Vec<&'a str>)>, CliError> {
    let mut lines = text.lines().enumerate().filter_map(|(i, raw)| {
        let toks: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    });
    match lines.next() {
        Some((_, toks)) if toks == [header] => Ok(lines.collect()),
        Some((line, _)) => Err(parse_error(line, format!("expected `{header}` header"))),
        None => Err(parse_error(1, "empty input")),
    }
}

fn number<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, CliError> {
    tok.parse().map_err(|_| parse_error(line, format!("bad {what} `{tok}`")))
}

/// `directed` header, then `arc <tail> <head> <link-id>` lines; every arc
/// must run between the endpoints of its link.
pub fn load_directed(inst: &Instance, text: &str) -> Result<DirectedSolution, CliError> {
    let lines = body_lines(text, "directed")?;
    let mut arcs = Vec::new();
    for (line, toks) in lines {
        let [kind, tail, head, id] = toks.as_slice() else {
            return Err(parse_error(line, "expected `arc <tail> <head> <link-id>`"));
        };
        if *kind != "arc" {
            return Err(parse_error(line, "expected `arc <tail> <head> <link-id>`"));
        }
        let tail: Vertex = number(tail, line, "tail")?;
        let head: Vertex = number(head, line, "head")?;
        let id: LinkId = number(id, line, "link id")?;
        if id >= inst.links().len() {
            return Err(CliError::Lib(Error::UnknownLink(id)));
        }
        let link = inst.link(id);
        if !(link.has_endpoint(tail) && link.has_endpoint(head) && tail != head) {
            return Err(parse_error(line, format!("arc {tail}->{head} does not join the endpoints of link {id}")));
        }
        arcs.push(DirectedLink::new(tail, head, link));
    }
    Ok(DirectedSolution::new(arcs))
}

pub fn save_directed(solution: &DirectedSolution) -> String {
    let mut out = String::from("directed\n");
    for d in &solution.links {
        out.push_str(&format!("arc {} {} {}\n", d.tail, d.head, d.origin));
    }
    out
}

/// `ctilde` header, then `head <v> <weight>` lines; unlisted heads weigh 0.
pub fn load_head_weights(n: usize, text: &str) -> Result<Vec<i128>, CliError> {
    let lines = body_lines(text, "ctilde")?;
    let mut weights = vec![0i128; n];
    for (line, toks) in lines {
        let [kind, head, weight] = toks.as_slice() else {
            return Err(parse_error(line, "expected `head <v> <weight>`"));
        };
        if *kind != "head" {
            return Err(parse_error(line, "expected `head <v> <weight>`"));
        }
        let head: Vertex = number(head, line, "head")?;
        if head == 0 || head >= n {
            return Err(parse_error(line, format!("head {head} must lie in 1..{n}")));
        }
        weights[head] = number(weight, line, "weight")?;
    }
    Ok(weights)
}
