//! Monotone precedence formulas.
//!
//! Each element `x` is guarded by a monotone formula `F_x` over the other
//! elements. Choosing `y` substitutes 1 for every occurrence of `y`; `x`
//! becomes available once `F_x` collapses to 1. The CDS keeps every formula
//! as a parse tree with parent pointers and propagates a substituted 1
//! upwards, so each node is touched a bounded number of times per epoch.

use std::fmt;

use crate::element::{Alphabet, Elem, ElemSet};
use crate::error::{Error, Result};
use crate::mps::{ExplicitMps, PrecedenceTable, MAX_TABLE_N};
use crate::sorter::CandidateStructure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Token {
    Var(Elem),
    And,
    Or,
    Zero,
    One,
    LParen,
    RParen,
}

/// Splits formula text into tokens. `line` is only used for diagnostics.
pub fn tokenize(text: &str, alphabet: &Alphabet, line: usize) -> Result<Vec<Token>> {
    Ok(tokenize_spanned(text, alphabet, line)?.0)
}

/// Tokens with their 1-based character columns.
pub(crate) fn tokenize_spanned(text: &str, alphabet: &Alphabet, line: usize) -> Result<(Vec<Token>, Vec<usize>)> {
    let mut tokens = Vec::new();
    let mut cols = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let single = match c {
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            '&' => Some(Token::And),
            '|' => Some(Token::Or),
            _ => None,
        };
        if let Some(t) = single {
            tokens.push(t);
            cols.push(i + 1);
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if matches!(c, '!' | '~' | '¬') {
            return Err(Error::parse(line, i + 1, "negation is not allowed in monotone formulas"));
        }
        let start = i;
        while i < chars.len() && !chars[i].is_whitespace() && !"()&|".contains(chars[i]) {
            i += 1;
        }
        let word: String = chars[start..i].iter().collect();
        let token = match word.as_str() {
            "0" => Token::Zero,
            "1" => Token::One,
            name => match alphabet.id(name) {
                Some(x) => Token::Var(x),
                None => return Err(Error::parse(line, start + 1, format!("unknown element `{name}`"))),
            },
        };
        tokens.push(token);
        cols.push(start + 1);
    }
    Ok((tokens, cols))
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Expr {
    Const(bool),
    Var(Elem),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    fn eval(&self, set: ElemSet) -> bool {
        match self {
            Expr::Const(b) => *b,
            Expr::Var(x) => set.contains(*x),
            Expr::And(l, r) => l.eval(set) && r.eval(set),
            Expr::Or(l, r) => l.eval(set) || r.eval(set),
        }
    }

    fn simplify(self) -> Expr {
        match self {
            Expr::And(l, r) => match (l.simplify(), r.simplify()) {
                (Expr::Const(false), _) | (_, Expr::Const(false)) => Expr::Const(false),
                (Expr::Const(true), e) | (e, Expr::Const(true)) => e,
                (a, b) => Expr::And(Box::new(a), Box::new(b)),
            },
            Expr::Or(l, r) => match (l.simplify(), r.simplify()) {
                (Expr::Const(true), _) | (_, Expr::Const(true)) => Expr::Const(true),
                (Expr::Const(false), e) | (e, Expr::Const(false)) => e,
                (a, b) => Expr::Or(Box::new(a), Box::new(b)),
            },
            e => e,
        }
    }

    fn emit(&self, out: &mut Vec<Token>) {
        match self {
            Expr::Const(false) => out.push(Token::Zero),
            Expr::Const(true) => out.push(Token::One),
            Expr::Var(x) => out.push(Token::Var(*x)),
            Expr::And(l, r) | Expr::Or(l, r) => {
                out.push(Token::LParen);
                l.emit(out);
                out.push(if matches!(self, Expr::And(..)) { Token::And } else { Token::Or });
                r.emit(out);
                out.push(Token::RParen);
            }
        }
    }
}

struct Parser<'a> {
    tokens: &'a [Token],
    cols: Option<&'a [usize]>,
    pos: usize,
    line: usize,
}

impl Parser<'_> {
    fn column(&self, pos: usize) -> usize {
        match self.cols {
            Some(cols) => cols.get(pos).copied().unwrap_or_else(|| cols.last().map_or(1, |c| c + 1)),
            None => pos + 1,
        }
    }

    fn fail(&self, message: impl Into<String>) -> Error {
        Error::parse(self.line, self.column(self.pos), message)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).copied();
        self.pos += 1;
        t
    }

    // expr := 0 | 1 | var | '(' expr ')' | '(' expr op expr ')'
    fn expr(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Token::Zero) => Ok(Expr::Const(false)),
            Some(Token::One) => Ok(Expr::Const(true)),
            Some(Token::Var(x)) => Ok(Expr::Var(x)),
            Some(Token::LParen) => {
                let left = self.expr()?;
                match self.next() {
                    Some(Token::RParen) => Ok(left),
                    Some(op @ (Token::And | Token::Or)) => {
                        let right = self.expr()?;
                        match self.next() {
                            Some(Token::RParen) => {}
                            Some(Token::And | Token::Or) => {
                                self.pos -= 1;
                                return Err(self.fail("ambiguous operator chain; parenthesize every binary operation"));
                            }
                            _ => {
                                self.pos -= 1;
                                return Err(self.fail("expected `)`"));
                            }
                        }
                        let (l, r) = (Box::new(left), Box::new(right));
                        Ok(if op == Token::And { Expr::And(l, r) } else { Expr::Or(l, r) })
                    }
                    _ => {
                        self.pos -= 1;
                        Err(self.fail("expected operator or `)`"))
                    }
                }
            }
            Some(_) => {
                self.pos -= 1;
                Err(self.fail("expected operand"))
            }
            None => Err(self.fail("unexpected end of formula")),
        }
    }
}

fn parse_expr(tokens: &[Token], cols: Option<&[usize]>, line: usize) -> Result<Expr> {
    let mut p = Parser { tokens, cols, pos: 0, line };
    let e = p.expr()?;
    if p.pos < tokens.len() {
        return Err(p.fail("trailing tokens; parenthesize every binary operation"));
    }
    Ok(e)
}

/// A formula `F_x` guarding its owner `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    pub owner: Elem,
    pub tokens: Vec<Token>,
}

impl Formula {
    /// Validates the token stream: well parenthesized, every binary
    /// operation wrapped, no occurrence of the owner.
    pub fn new(owner: Elem, tokens: Vec<Token>) -> Result<Self> {
        Formula::checked(owner, tokens, None, 0)
    }

    fn checked(owner: Elem, tokens: Vec<Token>, cols: Option<&[usize]>, line: usize) -> Result<Self> {
        parse_expr(&tokens, cols, line)?;
        if let Some(pos) = tokens.iter().position(|&t| t == Token::Var(owner)) {
            let col = cols.map_or(pos + 1, |c| c[pos]);
            return Err(Error::parse(line, col, format!("formula of {owner} mentions {owner} itself")));
        }
        Ok(Formula { owner, tokens })
    }

    pub fn parse(owner: Elem, text: &str, alphabet: &Alphabet) -> Result<Self> {
        Formula::parse_at(owner, text, alphabet, 0, 0)
    }

    /// Parses `text` found at `line`, starting at character column `offset`.
    pub(crate) fn parse_at(owner: Elem, text: &str, alphabet: &Alphabet, line: usize, offset: usize) -> Result<Self> {
        let shift = |e: Error| match e {
            Error::Parse { line, column, message } => Error::Parse { line, column: column + offset, message },
            e => e,
        };
        let (tokens, cols) = tokenize_spanned(text, alphabet, line).map_err(shift)?;
        Formula::checked(owner, tokens, Some(&cols), line).map_err(shift)
    }

    pub fn constant(owner: Elem, value: bool) -> Self {
        Formula { owner, tokens: vec![if value { Token::One } else { Token::Zero }] }
    }

    fn expr(&self) -> Expr {
        parse_expr(&self.tokens, None, 0).expect("validated at construction")
    }

    pub fn evaluate(&self, chosen: ElemSet) -> bool {
        self.expr().eval(chosen)
    }

    pub fn variables(&self) -> impl Iterator<Item = Elem> + '_ {
        self.tokens.iter().filter_map(|t| match t {
            Token::Var(x) => Some(*x),
            _ => None,
        })
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> FormulaDisplay<'a> {
        FormulaDisplay { tokens: &self.tokens, alphabet }
    }
}

pub struct FormulaDisplay<'a> {
    tokens: &'a [Token],
    alphabet: &'a Alphabet,
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.tokens.iter().enumerate() {
            let spaced = matches!(t, Token::And | Token::Or);
            if spaced && i > 0 {
                f.write_str(" ")?;
            }
            match t {
                Token::Var(x) => f.write_str(self.alphabet.name(*x))?,
                Token::And => f.write_str("&")?,
                Token::Or => f.write_str("|")?,
                Token::Zero => f.write_str("0")?,
                Token::One => f.write_str("1")?,
                Token::LParen => f.write_str("(")?,
                Token::RParen => f.write_str(")")?,
            }
            if spaced {
                f.write_str(" ")?;
            }
        }
        Ok(())
    }
}

/// Rewrites constants away: the result is `1`, `0`, or constant-free, with
/// redundant parentheses around atoms removed. The boolean function is
/// unchanged.
pub fn simplify_formula(formula: &Formula) -> Formula {
    let mut tokens = Vec::with_capacity(formula.tokens.len());
    formula.expr().simplify().emit(&mut tokens);
    Formula { owner: formula.owner, tokens }
}

/// One formula per element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaSystem {
    formulas: Vec<Formula>,
}

impl FormulaSystem {
    /// `formulas[x]` must be owned by `x`.
    pub fn new(formulas: Vec<Formula>) -> Result<Self> {
        let n = formulas.len();
        for (i, f) in formulas.iter().enumerate() {
            if f.owner.index() != i {
                return Err(Error::Input(format!("formula {i} is owned by {}", f.owner)));
            }
            if let Some(x) = f.variables().find(|x| x.index() >= n) {
                return Err(Error::Input(format!("formula of {} mentions {x} outside the alphabet", f.owner)));
            }
        }
        Ok(FormulaSystem { formulas })
    }

    /// One DNF formula per element: an OR of the minimal true sets of `p_x`.
    pub fn from_mps(mps: &ExplicitMps) -> Self {
        let formulas = (0..mps.n())
            .map(|i| {
                let x = Elem::new(i);
                let terms = mps.minimal_true_sets(x);
                let expr = terms
                    .iter()
                    .map(|t| {
                        t.iter()
                            .map(Expr::Var)
                            .reduce(|a, b| Expr::And(Box::new(a), Box::new(b)))
                            .unwrap_or(Expr::Const(true))
                    })
                    .reduce(|a, b| Expr::Or(Box::new(a), Box::new(b)))
                    .unwrap_or(Expr::Const(false));
                let mut tokens = Vec::new();
                expr.emit(&mut tokens);
                Formula { owner: x, tokens }
            })
            .collect();
        FormulaSystem { formulas }
    }

    pub fn n(&self) -> usize {
        self.formulas.len()
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }

    pub fn formula(&self, x: Elem) -> &Formula {
        &self.formulas[x.index()]
    }

    /// Total number of tokens, the input size of the system.
    pub fn size(&self) -> usize {
        self.formulas.iter().map(|f| f.tokens.len()).sum()
    }

    /// Tabulates every formula (small alphabets only).
    pub fn to_mps(&self) -> Result<ExplicitMps> {
        let n = self.n();
        if n > MAX_TABLE_N {
            return Err(Error::SizeLimit { n, limit: MAX_TABLE_N });
        }
        let exprs: Vec<Expr> = self.formulas.iter().map(Formula::expr).collect();
        ExplicitMps::new(PrecedenceTable::from_fn(n, |x, set| exprs[x.index()].eval(set))?)
    }

    pub fn cds(&self) -> FormulaCds {
        FormulaCds::new(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Leaf,
    One,
    Zero,
    And,
    Or,
}

const NONE: u32 = u32::MAX;

/// The formula CDS: all parse trees in one arena.
#[derive(Debug, Clone)]
pub struct FormulaCds {
    n: usize,
    kind: Vec<Kind>,
    parent: Vec<u32>,
    /// Owner of a root node, `NONE` for inner nodes.
    owner: Vec<u32>,
    /// Leaf nodes holding each variable.
    occurrences: Vec<Vec<u32>>,
    /// Pristine per-node state after constant propagation.
    pristine_true: Vec<bool>,
    pristine_count: Vec<u8>,
    pristine_roots: Vec<Elem>,
    is_true: Vec<bool>,
    count: Vec<u8>,
    work: u64,
}

impl FormulaCds {
    pub fn new(system: &FormulaSystem) -> Self {
        let n = system.n();
        let mut cds = FormulaCds {
            n,
            kind: Vec::new(),
            parent: Vec::new(),
            owner: Vec::new(),
            occurrences: vec![Vec::new(); n],
            pristine_true: Vec::new(),
            pristine_count: Vec::new(),
            pristine_roots: Vec::new(),
            is_true: Vec::new(),
            count: Vec::new(),
            work: 0,
        };
        for f in &system.formulas {
            let root = cds.build(&simplify_formula(f).expr(), NONE);
            cds.owner[root as usize] = f.owner.0;
        }
        // constant propagation, once, on the pristine copy
        let size = cds.kind.len();
        cds.is_true = vec![false; size];
        cds.count = vec![0; size];
        let ones: Vec<u32> = (0..size as u32).filter(|&v| cds.kind[v as usize] == Kind::One).collect();
        let mut roots = Vec::new();
        for v in ones {
            cds.raise(v, &mut roots);
        }
        cds.pristine_true = cds.is_true.clone();
        cds.pristine_count = cds.count.clone();
        roots.sort();
        cds.pristine_roots = roots;
        cds
    }

    fn build(&mut self, e: &Expr, parent: u32) -> u32 {
        let id = self.kind.len() as u32;
        let kind = match e {
            Expr::Const(true) => Kind::One,
            Expr::Const(false) => Kind::Zero,
            Expr::Var(_) => Kind::Leaf,
            Expr::And(..) => Kind::And,
            Expr::Or(..) => Kind::Or,
        };
        self.kind.push(kind);
        self.parent.push(parent);
        self.owner.push(NONE);
        match e {
            Expr::Var(x) => self.occurrences[x.index()].push(id),
            Expr::And(l, r) | Expr::Or(l, r) => {
                self.build(l, id);
                self.build(r, id);
            }
            Expr::Const(_) => {}
        }
        id
    }

    /// Marks `v` true and walks upwards while nodes flip to true.
    fn raise(&mut self, mut v: u32, reported: &mut Vec<Elem>) {
        loop {
            self.work += 1;
            let i = v as usize;
            if self.is_true[i] {
                return;
            }
            self.is_true[i] = true;
            if self.owner[i] != NONE {
                reported.push(Elem(self.owner[i]));
            }
            let p = self.parent[i];
            if p == NONE {
                return;
            }
            let pi = p as usize;
            if self.kind[pi] == Kind::And {
                self.count[pi] += 1;
                if self.count[pi] < 2 {
                    return;
                }
            }
            v = p;
        }
    }

    /// Number of parse-tree nodes, which bounds the work of one epoch.
    pub fn nodes(&self) -> usize {
        self.kind.len()
    }
}

impl CandidateStructure for FormulaCds {
    fn size(&self) -> usize {
        self.n
    }

    fn init(&mut self, out: &mut Vec<Elem>) -> Result<()> {
        self.is_true.copy_from_slice(&self.pristine_true);
        self.count.copy_from_slice(&self.pristine_count);
        self.work = 0;
        out.extend_from_slice(&self.pristine_roots);
        Ok(())
    }

    fn step(&mut self, x: Elem, out: &mut Vec<Elem>) -> Result<()> {
        if x.index() >= self.n {
            return Err(Error::Contract(format!("step on element {x} outside alphabet")));
        }
        for k in 0..self.occurrences[x.index()].len() {
            let leaf = self.occurrences[x.index()][k];
            self.raise(leaf, out);
        }
        Ok(())
    }

    fn work(&self) -> u64 {
        self.work
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sorter::{validate_cds, Validated};

    fn abc() -> Alphabet {
        Alphabet::letters(3)
    }

    fn show(f: &Formula) -> String {
        f.display(&abc()).to_string()
    }

    #[test]
    fn simplify_examples() {
        let al = abc();
        let cases = [("(1 & a)", "a"), ("1", "1"), ("((a | 1) & b)", "b"), ("(a & 0)", "0"), ("((a))", "a")];
        for (input, expect) in cases {
            let f = Formula::parse(Elem(2), input, &al).unwrap();
            assert_eq!(show(&simplify_formula(&f)), expect, "{input}");
        }
    }

    #[test]
    fn display_round_trip() {
        let al = abc();
        let f = Formula::parse(Elem(2), "((a | b) & (a | 0))", &al).unwrap();
        assert_eq!(show(&f), "((a | b) & (a | 0))");
        assert_eq!(Formula::parse(Elem(2), &show(&f), &al).unwrap(), f);
    }

    #[test]
    fn parse_errors() {
        let al = abc();
        for bad in ["(a | b", "a | b", "(a | b | a)", "()", "(a b)", "", "!a", "(a | d)"] {
            assert!(Formula::parse(Elem(2), bad, &al).is_err(), "{bad}");
        }
        // the owner may not guard itself
        assert!(Formula::parse(Elem(0), "(a | b)", &al).is_err());
    }

    #[test]
    fn parse_error_column() {
        match Formula::parse(Elem(2), "(a | b | a)", &abc()) {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 8),
            other => panic!("{other:?}"),
        }
    }

    fn one_of_two() -> FormulaSystem {
        let al = abc();
        FormulaSystem::new(vec![
            Formula::parse(Elem(0), "1", &al).unwrap(),
            Formula::parse(Elem(1), "1", &al).unwrap(),
            Formula::parse(Elem(2), "(a | b)", &al).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn one_of_two_steps() {
        let mut cds = one_of_two().cds();
        let mut out = Vec::new();
        cds.init(&mut out).unwrap();
        assert_eq!(out, vec![Elem(0), Elem(1)]);
        out.clear();
        cds.step(Elem(0), &mut out).unwrap();
        assert_eq!(out, vec![Elem(2)]);
        out.clear();
        cds.step(Elem(1), &mut out).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn one_of_two_validates() {
        let sys = one_of_two();
        assert_eq!(sys.to_mps().unwrap(), ExplicitMps::one_of_two());
        let mut cds = Validated::new(sys.cds());
        assert_eq!(validate_cds(&mut cds, &ExplicitMps::one_of_two(), 10).unwrap(), Ok(()));
    }

    #[test]
    fn dnf_translation_round_trips() {
        let mps = ExplicitMps::one_of_two();
        let sys = FormulaSystem::from_mps(&mps);
        assert_eq!(sys.to_mps().unwrap(), mps);
        assert_eq!(validate_cds(&mut sys.cds(), &mps, 10).unwrap(), Ok(()));
    }

    #[test]
    fn zero_formula_never_reported() {
        let sys = FormulaSystem::new(vec![Formula::constant(Elem(0), true), Formula::constant(Elem(1), false)]).unwrap();
        let mut cds = sys.cds();
        let mut out = Vec::new();
        cds.init(&mut out).unwrap();
        cds.step(Elem(0), &mut out).unwrap();
        assert_eq!(out, vec![Elem(0)]);
    }

    #[test]
    fn work_linear_and_reset_by_init() {
        let sys = one_of_two();
        let mut cds = sys.cds();
        let mut out = Vec::new();
        for _ in 0..2 {
            cds.init(&mut out).unwrap();
            for x in [0, 2, 1] {
                cds.step(Elem(x), &mut out).unwrap();
            }
            // each node flips once; an OR node may be revisited by its second child
            assert!(cds.work() <= 2 * cds.nodes() as u64);
        }
    }
}
