//! Line-oriented instance files.
//!
//! ```text
//! # Example: c needs a or b
//! formulas
//! alphabet a b c
//! a: 1
//! b: 1
//! c: (a | b)
//! ```
//!
//! The first line names the kind, the second declares the alphabet in id
//! order. `#` starts a comment. Body lines by kind:
//!
//! * `formulas`: `x: F`, elements without a line get `1`
//! * `ercs`: `a b | c d`
//! * `digraph`, `graph`: `root r` and `u v`
//! * `chordal` (or `graph chordal`): `u v`
//! * `weighted-digraph`: `root r` and `u v w` with `w > 0`

use std::fmt::Write as _;

use crate::chordal::{ChordalGraph, SimplicialCds};
use crate::dijkstra::WeightedDigraph;
use crate::element::{Alphabet, Elem};
use crate::error::{Error, Result};
use crate::mps::ExplicitMps;
use crate::repr::{Erc, ErcSet, Formula, FormulaSystem, RootedGraph};
use crate::sorter::CandidateStructure;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Formulas,
    Ercs,
    Digraph,
    Graph,
    Chordal,
    WeightedDigraph,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Formulas => "formulas",
            Kind::Ercs => "ercs",
            Kind::Digraph => "digraph",
            Kind::Graph => "graph",
            Kind::Chordal => "chordal",
            Kind::WeightedDigraph => "weighted-digraph",
        }
    }

    fn from_header(words: &[&str]) -> Option<Kind> {
        Some(match words {
            ["formulas"] => Kind::Formulas,
            ["ercs"] => Kind::Ercs,
            ["digraph"] => Kind::Digraph,
            ["graph"] => Kind::Graph,
            ["chordal"] | ["graph", "chordal"] => Kind::Chordal,
            ["weighted-digraph"] => Kind::WeightedDigraph,
            _ => return None,
        })
    }

    fn rooted(self) -> bool {
        matches!(self, Kind::Digraph | Kind::Graph | Kind::WeightedDigraph)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Formulas(FormulaSystem),
    Ercs(ErcSet),
    Digraph(RootedGraph),
    Graph(RootedGraph),
    Chordal(ChordalGraph),
    WeightedDigraph(WeightedDigraph),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFile {
    pub alphabet: Alphabet,
    pub instance: Instance,
    /// Non-fatal notes, such as dropped vacuous ERCs.
    pub warnings: Vec<String>,
}

/// A non-comment line split into tokens with 1-based character columns.
struct Line<'a> {
    number: usize,
    text: &'a str,
    tokens: Vec<(usize, &'a str)>,
}

fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let text = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (col, (byte, c)) in text.char_indices().enumerate() {
            match (c.is_whitespace(), start) {
                (false, None) => start = Some((col + 1, byte)),
                (true, Some((scol, sbyte))) => {
                    tokens.push((scol, &text[sbyte..byte]));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some((scol, sbyte)) = start {
            tokens.push((scol, &text[sbyte..]));
        }
        (!tokens.is_empty()).then_some(Line { number: i + 1, text, tokens })
    })
}

fn element(alphabet: &Alphabet, line: &Line, (col, name): (usize, &str)) -> Result<Elem> {
    alphabet.id(name).ok_or_else(|| Error::parse(line.number, col, format!("unknown element {name:?}")))
}

/// Attaches a location to semantic errors raised by the backends.
fn locate(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Parse { .. } => e,
        e => Error::parse(line, 1, e.to_string()),
    }
}

impl InstanceFile {
    pub fn kind(&self) -> Kind {
        match self.instance {
            Instance::Formulas(_) => Kind::Formulas,
            Instance::Ercs(_) => Kind::Ercs,
            Instance::Digraph(_) => Kind::Digraph,
            Instance::Graph(_) => Kind::Graph,
            Instance::Chordal(_) => Kind::Chordal,
            Instance::WeightedDigraph(_) => Kind::WeightedDigraph,
        }
    }

    pub fn n(&self) -> usize {
        self.alphabet.len()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut it = lines(text);
        let header = it.next().ok_or_else(|| Error::parse(1, 1, "missing kind header"))?;
        let words: Vec<&str> = header.tokens.iter().map(|t| t.1).collect();
        let kind = Kind::from_header(&words)
            .ok_or_else(|| Error::parse(header.number, header.tokens[0].0, format!("unknown kind {:?}", words.join(" "))))?;
        let decl = it.next().ok_or_else(|| Error::parse(header.number + 1, 1, "missing alphabet line"))?;
        if decl.tokens[0].1 != "alphabet" {
            return Err(Error::parse(decl.number, decl.tokens[0].0, "expected `alphabet`"));
        }
        let alphabet = Alphabet::new(decl.tokens[1..].iter().map(|t| t.1)).map_err(locate(decl.number))?;
        let n = alphabet.len();
        let body: Vec<Line> = it.collect();
        let at_end = body.last().map_or(decl.number, |l| l.number);

        let mut root: Option<(Elem, usize)> = None;
        let mut rest = Vec::new();
        for line in body {
            if line.tokens[0].1 == "root" {
                if !kind.rooted() {
                    return Err(Error::parse(line.number, line.tokens[0].0, format!("{} files take no root", kind.name())));
                }
                if root.is_some() {
                    return Err(Error::parse(line.number, line.tokens[0].0, "root declared twice"));
                }
                if line.tokens.len() != 2 {
                    return Err(Error::parse(line.number, line.tokens[0].0, "expected `root r`"));
                }
                root = Some((element(&alphabet, &line, line.tokens[1])?, line.number));
            } else {
                rest.push(line);
            }
        }
        let root = if kind.rooted() {
            Some(root.ok_or_else(|| Error::parse(at_end, 1, "missing `root r` line"))?)
        } else {
            None
        };

        let mut warnings = Vec::new();
        let instance = match kind {
            Kind::Formulas => {
                let mut formulas: Vec<Option<Formula>> = vec![None; n];
                for line in &rest {
                    let Some(colon) = line.text.find(':') else {
                        return Err(Error::parse(line.number, line.tokens[0].0, "expected `x: formula`"));
                    };
                    let name = line.text[..colon].trim();
                    let col = line.tokens[0].0;
                    let x = element(&alphabet, line, (col, name))?;
                    if formulas[x.index()].is_some() {
                        return Err(Error::parse(line.number, col, format!("second formula for {name}")));
                    }
                    let offset = line.text[..=colon].chars().count();
                    let f = Formula::parse_at(x, &line.text[colon + 1..], &alphabet, line.number, offset)?;
                    formulas[x.index()] = Some(f);
                }
                let formulas =
                    formulas.into_iter().enumerate().map(|(i, f)| f.unwrap_or_else(|| Formula::constant(Elem::new(i), true))).collect();
                Instance::Formulas(FormulaSystem::new(formulas).map_err(locate(at_end))?)
            }
            Kind::Ercs => {
                let mut ercs = Vec::new();
                for line in &rest {
                    let bar: Vec<usize> = (0..line.tokens.len()).filter(|&i| line.tokens[i].1 == "|").collect();
                    let &[split] = bar.as_slice() else {
                        let col = bar.get(1).map_or(line.tokens[0].0, |&i| line.tokens[i].0);
                        return Err(Error::parse(line.number, col, "expected `A | B` with exactly one bar"));
                    };
                    let a = line.tokens[..split].iter().map(|&t| element(&alphabet, line, t)).collect::<Result<Vec<_>>>()?;
                    let b = line.tokens[split + 1..].iter().map(|&t| element(&alphabet, line, t)).collect::<Result<Vec<_>>>()?;
                    if a.is_empty() {
                        return Err(Error::parse(line.number, line.tokens[0].0, "ERC with empty A"));
                    }
                    if let Some(&(col, name)) = line.tokens[split + 1..].iter().find(|t| a.contains(&alphabet.id(t.1).unwrap())) {
                        return Err(Error::parse(line.number, col, format!("{name} on both sides")));
                    }
                    ercs.push(Erc::new(a, b));
                }
                let (set, notes) = ErcSet::new(n, ercs).map_err(locate(at_end))?;
                warnings = notes;
                Instance::Ercs(set)
            }
            Kind::Digraph | Kind::Graph | Kind::Chordal => {
                let mut edges = Vec::new();
                for line in &rest {
                    if line.tokens.len() != 2 {
                        return Err(Error::parse(line.number, line.tokens[0].0, "expected `u v`"));
                    }
                    edges.push((element(&alphabet, line, line.tokens[0])?, element(&alphabet, line, line.tokens[1])?));
                }
                match (kind, root) {
                    (Kind::Chordal, _) => Instance::Chordal(ChordalGraph::new(n, &edges).map_err(locate(at_end))?),
                    (Kind::Digraph, Some((r, l))) => Instance::Digraph(RootedGraph::new(n, &edges, r, true).map_err(locate(l))?),
                    (_, Some((r, l))) => Instance::Graph(RootedGraph::new(n, &edges, r, false).map_err(locate(l))?),
                    _ => unreachable!("rooted kinds have a root"),
                }
            }
            Kind::WeightedDigraph => {
                let mut arcs = Vec::new();
                for line in &rest {
                    if line.tokens.len() != 3 {
                        return Err(Error::parse(line.number, line.tokens[0].0, "expected `u v w`"));
                    }
                    let (col, text) = line.tokens[2];
                    let w: f64 = text.parse().map_err(|_| Error::parse(line.number, col, format!("bad weight {text:?}")))?;
                    if !(w.is_finite() && w > 0.0) {
                        return Err(Error::parse(line.number, col, format!("weight {text} is not positive")));
                    }
                    arcs.push((element(&alphabet, line, line.tokens[0])?, element(&alphabet, line, line.tokens[1])?, w));
                }
                let (r, l) = root.expect("rooted kinds have a root");
                Instance::WeightedDigraph(WeightedDigraph::new(n, &arcs, r).map_err(locate(l))?)
            }
        };
        Ok(InstanceFile { alphabet, instance, warnings })
    }

    /// Canonical text: parsing it gives back an equal instance.
    pub fn print(&self) -> String {
        let a = &self.alphabet;
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.kind().name());
        let _ = writeln!(s, "alphabet{}", a.names().iter().map(|x| format!(" {x}")).collect::<String>());
        match &self.instance {
            Instance::Formulas(sys) => {
                for f in sys.formulas() {
                    let _ = writeln!(s, "{}: {}", a.name(f.owner), f.display(a));
                }
            }
            Instance::Ercs(set) => {
                for e in set.ercs() {
                    let side = |xs: &[Elem]| xs.iter().map(|&x| a.name(x)).collect::<Vec<_>>().join(" ");
                    let _ = writeln!(s, "{} | {}", side(&e.a), side(&e.b));
                }
            }
            Instance::Digraph(g) | Instance::Graph(g) => {
                let _ = writeln!(s, "root {}", a.name(g.root()));
                for (u, v) in g.edges() {
                    let _ = writeln!(s, "{} {}", a.name(u), a.name(v));
                }
            }
            Instance::Chordal(g) => {
                for (u, v) in g.edges() {
                    let _ = writeln!(s, "{} {}", a.name(u), a.name(v));
                }
            }
            Instance::WeightedDigraph(g) => {
                let _ = writeln!(s, "root {}", a.name(g.root()));
                for (u, v, w) in g.arcs() {
                    let _ = writeln!(s, "{} {} {}", a.name(u), a.name(v), w);
                }
            }
        }
        s
    }

    /// The explicit precedence system, for brute-force checks.
    pub fn to_mps(&self) -> Result<ExplicitMps> {
        match &self.instance {
            Instance::Formulas(sys) => sys.to_mps(),
            Instance::Ercs(set) => set.to_mps(),
            Instance::Digraph(g) | Instance::Graph(g) => g.to_mps(),
            Instance::Chordal(g) => g.to_mps(),
            Instance::WeightedDigraph(g) => g.graph().to_mps(),
        }
    }

    /// The backend structure for this kind.
    pub fn cds(&self) -> Box<dyn CandidateStructure + '_> {
        match &self.instance {
            Instance::Formulas(sys) => Box::new(sys.cds()),
            Instance::Ercs(set) => Box::new(set.cds()),
            Instance::Digraph(g) | Instance::Graph(g) => Box::new(g.cds()),
            Instance::Chordal(g) => Box::new(SimplicialCds::new(g)),
            Instance::WeightedDigraph(g) => Box::new(g.graph().cds()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sorter::cds_permutations;

    const EXAMPLE: &str = "# c needs a or b\nformulas\nalphabet a b c\na: 1\nb: 1\nc: (a | b)\n";

    fn round_trip(text: &str) -> InstanceFile {
        let file = InstanceFile::parse(text).unwrap();
        let printed = file.print();
        let again = InstanceFile::parse(&printed).unwrap();
        assert_eq!(again, file, "{printed}");
        assert_eq!(again.print(), printed);
        file
    }

    fn perms(file: &InstanceFile) -> Vec<String> {
        let mut p: Vec<String> =
            cds_permutations(&mut file.cds(), 10).unwrap().iter().map(|w| file.alphabet.format_word(w)).collect();
        p.sort();
        p
    }

    #[test]
    fn example_formulas() {
        let file = round_trip(EXAMPLE);
        assert_eq!(file.kind(), Kind::Formulas);
        assert_eq!(perms(&file), ["abc", "acb", "bac", "bca"]);
        // omitted lines default to 1
        let short = InstanceFile::parse("formulas\nalphabet a b c\nc: (a | b)").unwrap();
        assert_eq!(short, file);
    }

    #[test]
    fn every_kind_round_trips() {
        round_trip("ercs\nalphabet a b c\na b | c\n");
        round_trip("digraph\nalphabet s a b\nroot s\ns a\na b\nb a\n");
        round_trip("graph\nalphabet s a b\nroot a\ns a\na b\n");
        round_trip("graph chordal\nalphabet a b c d\na b\nb c\na c\nc d\n");
        round_trip("weighted-digraph\nalphabet s a b t\nroot s\ns a 1\ns b 2.5\na t 5\nb t 0.125\n");
        let empty = round_trip("formulas\nalphabet\n");
        assert_eq!(cds_permutations(&mut empty.cds(), 10).unwrap(), vec![Vec::<Elem>::new()]);
    }

    #[test]
    fn ercs_match_example() {
        let file = InstanceFile::parse("ercs\nalphabet a b c\na b | c\n").unwrap();
        assert_eq!(perms(&file), ["abc", "acb", "bac", "bca"]);
        let file = InstanceFile::parse("ercs\nalphabet a b\na |\n").unwrap();
        assert_eq!(file.warnings.len(), 1);
    }

    fn error_at(text: &str) -> (usize, usize) {
        match InstanceFile::parse(text) {
            Err(Error::Parse { line, column, .. }) => (line, column),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn errors_carry_locations() {
        assert_eq!(error_at("trees\nalphabet a\n"), (1, 1));
        assert_eq!(error_at("formulas\nletters a\n"), (2, 1));
        assert_eq!(error_at("formulas\nalphabet a b\nb: (a & !a)\n"), (3, 9));
        assert_eq!(error_at("formulas\nalphabet a b\nq: 1\n"), (3, 1));
        assert_eq!(error_at("ercs\nalphabet a b c\na | b | c\n"), (3, 7));
        assert_eq!(error_at("ercs\nalphabet a b c\n\na b | c\n a | a\n"), (5, 6));
        assert_eq!(error_at("ercs\nalphabet a b\n| a\n"), (3, 1));
        assert_eq!(error_at("weighted-digraph\nalphabet s a\nroot s\ns a -1\n"), (4, 5));
        assert_eq!(error_at("digraph\nalphabet s a\nroot s\na s\n"), (3, 1));
        assert_eq!(error_at("digraph\nalphabet s a\ns a\n"), (3, 1));
        assert_eq!(error_at("chordal\nalphabet a b c d\na b\nb c\nc d\nd a\n").0, 6);
    }
}
