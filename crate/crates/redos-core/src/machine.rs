//! Execution machinery over compiled patterns: the nondeterministic
//! configuration relation, a budgeted backtracking matcher with exact step
//! counts, and guarded path enumeration.
//!
//! The matcher tries to match a prefix of the input starting at offset 0 and
//! reports how many bytes the match consumed. Path enumeration walks the same
//! transition relation but treats anchors as unconditional epsilon moves, so
//! it can serve offset-free reachability questions from the analysis layer.

use crate::arena::{Code, ExprArena, NodeId, NodeKind};

/// A machine configuration: a program point plus an input offset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PwConfig {
    pub code: Code,
    pub offset: usize,
}

impl PwConfig {
    pub fn new(code: Code, offset: usize) -> PwConfig {
        PwConfig { code, offset }
    }
}

/// Status of a bounded backtracking run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchStatus {
    /// A prefix of the input matched; the payload is its length in bytes.
    Matched(usize),
    /// Every search path failed.
    NoMatch,
    /// The step budget ran out before the search finished.
    BudgetExceeded,
}

/// Outcome of a bounded backtracking run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatchOutcome {
    pub status: MatchStatus,
    pub steps: u64,
}

/// Successor configurations of `config` over `input`, in the order a
/// backtracking matcher explores them. Terminal and stuck configurations
/// have no successors.
pub fn successors(arena: &ExprArena, config: PwConfig, input: &[u8]) -> Vec<PwConfig> {
    let PwConfig { code, offset } = config;
    let Code::Node(id) = code else {
        return Vec::new();
    };
    let kont = arena.kont(id);
    match arena.kind(id) {
        NodeKind::Epsilon => vec![PwConfig::new(kont, offset)],
        NodeKind::AnchorStart => {
            if offset == 0 {
                vec![PwConfig::new(kont, offset)]
            } else {
                Vec::new()
            }
        }
        NodeKind::AnchorEnd => {
            if offset == input.len() {
                vec![PwConfig::new(kont, offset)]
            } else {
                Vec::new()
            }
        }
        NodeKind::Constant(cs) => {
            if input.get(offset).is_some_and(|b| cs.contains(*b)) {
                vec![PwConfig::new(kont, offset + 1)]
            } else {
                Vec::new()
            }
        }
        NodeKind::Concat(left, _) => vec![PwConfig::new(Code::Node(*left), offset)],
        NodeKind::Alt(left, right) => vec![
            PwConfig::new(Code::Node(*left), offset),
            PwConfig::new(Code::Node(*right), offset),
        ],
        NodeKind::Star { body, greedy } => {
            let enter = PwConfig::new(Code::Node(*body), offset);
            let skip = PwConfig::new(kont, offset);
            if *greedy {
                vec![enter, skip]
            } else {
                vec![skip, enter]
            }
        }
    }
}

struct Frame {
    code: Code,
    offset: usize,
    /// Stars whose bodies this search path has entered since it last
    /// consumed a byte. Re-entering any of them without consuming would
    /// repeat an empty loop iteration, so such branches are pruned.
    entered: Vec<NodeId>,
}

/// Runs the backtracking matcher with exact step accounting. Each rule
/// application (including popping a stuck frame) costs one step; the run
/// stops at the first frame that reaches the end of the pattern.
pub fn pwf_run(arena: &ExprArena, input: &[u8], budget: u64) -> MatchOutcome {
    let mut steps: u64 = 0;
    let mut stack = vec![Frame {
        code: Code::Node(arena.root()),
        offset: 0,
        entered: Vec::new(),
    }];
    loop {
        match stack.last() {
            None => {
                return MatchOutcome {
                    status: MatchStatus::NoMatch,
                    steps,
                }
            }
            Some(top) if top.code == Code::Terminal => {
                return MatchOutcome {
                    status: MatchStatus::Matched(top.offset),
                    steps,
                };
            }
            Some(_) => {}
        }
        if steps == budget {
            return MatchOutcome {
                status: MatchStatus::BudgetExceeded,
                steps,
            };
        }
        let top = stack.pop().expect("stack checked non-empty");
        expand_frame(arena, top, input, &mut stack);
        steps += 1;
    }
}

fn expand_frame(arena: &ExprArena, frame: Frame, input: &[u8], stack: &mut Vec<Frame>) {
    let Code::Node(id) = frame.code else {
        unreachable!("terminal frames are returns, not expansions");
    };
    let kont = arena.kont(id);
    match arena.kind(id) {
        NodeKind::Epsilon => stack.push(Frame {
            code: kont,
            offset: frame.offset,
            entered: frame.entered,
        }),
        NodeKind::AnchorStart => {
            if frame.offset == 0 {
                stack.push(Frame {
                    code: kont,
                    offset: frame.offset,
                    entered: frame.entered,
                });
            }
        }
        NodeKind::AnchorEnd => {
            if frame.offset == input.len() {
                stack.push(Frame {
                    code: kont,
                    offset: frame.offset,
                    entered: frame.entered,
                });
            }
        }
        NodeKind::Constant(cs) => {
            if input.get(frame.offset).is_some_and(|b| cs.contains(*b)) {
                stack.push(Frame {
                    code: kont,
                    offset: frame.offset + 1,
                    entered: Vec::new(),
                });
            }
        }
        NodeKind::Concat(left, _) => stack.push(Frame {
            code: Code::Node(*left),
            offset: frame.offset,
            entered: frame.entered,
        }),
        NodeKind::Alt(left, right) => {
            stack.push(Frame {
                code: Code::Node(*right),
                offset: frame.offset,
                entered: frame.entered.clone(),
            });
            stack.push(Frame {
                code: Code::Node(*left),
                offset: frame.offset,
                entered: frame.entered,
            });
        }
        NodeKind::Star { body, greedy } => {
            let blocked = frame.entered.contains(&id);
            let enter = || {
                let mut entered = frame.entered.clone();
                entered.push(id);
                Frame {
                    code: Code::Node(*body),
                    offset: frame.offset,
                    entered,
                }
            };
            let skip = || Frame {
                code: kont,
                offset: frame.offset,
                entered: frame.entered.clone(),
            };
            if *greedy {
                stack.push(skip());
                if !blocked {
                    stack.push(enter());
                }
            } else {
                if !blocked {
                    stack.push(enter());
                }
                stack.push(skip());
            }
        }
    }
}

/// One way a pattern fragment can consume a string: the sequence of program
/// points touched, plus the bytes consumed along the way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub nodes: Vec<Code>,
    pub consumed: Vec<u8>,
}

/// Result of path enumeration. `LimitExceeded` carries the paths found
/// before truncation; it signals only that more may exist.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathEnumeration {
    Complete(Vec<Path>),
    LimitExceeded(Vec<Path>),
}

impl PathEnumeration {
    pub fn paths(&self) -> &[Path] {
        match self {
            PathEnumeration::Complete(p) | PathEnumeration::LimitExceeded(p) => p,
        }
    }

    pub fn into_paths(self) -> Vec<Path> {
        match self {
            PathEnumeration::Complete(p) | PathEnumeration::LimitExceeded(p) => p,
        }
    }

    pub fn is_complete(&self) -> bool {
        matches!(self, PathEnumeration::Complete(_))
    }
}

/// Bound on arrivals processed per epsilon walk, guarding against patterns
/// whose epsilon structure branches pathologically.
const WALK_VISIT_CAP: usize = 200_000;

/// All distinct paths from `from` that consume exactly `w`, ending at the
/// continuation point of the final consuming step (no trailing epsilon
/// moves). For empty `w` the single identity path is returned. Collection
/// stops after `limit` paths.
pub fn enumerate_paths(
    arena: &ExprArena,
    from: NodeId,
    w: &[u8],
    limit: usize,
) -> PathEnumeration {
    PathWalk::run(arena, from, w, None, limit)
}

/// Like [`enumerate_paths`], but each path is extended by a final epsilon
/// walk and kept only if that walk touches `to`; the path ends at the first
/// touch. A path already ending at `to` is kept as-is.
pub fn enumerate_paths_to(
    arena: &ExprArena,
    from: NodeId,
    w: &[u8],
    to: NodeId,
    limit: usize,
) -> PathEnumeration {
    PathWalk::run(arena, from, w, Some(to), limit)
}

/// Shared guard state for one epsilon segment of a walk. A segment starts
/// fresh at each consuming step; within it, a path may not revisit an
/// interior node, except that the segment's own start is granted a single
/// revisit when it is a star (the loop back around a Kleene node is exactly
/// the ambiguity the analysis looks for).
struct SegmentGuard {
    start: Code,
    visited: Vec<bool>,
    revisited_start: bool,
}

impl SegmentGuard {
    fn new(arena: &ExprArena, start: Code) -> SegmentGuard {
        SegmentGuard {
            start,
            visited: vec![false; arena.len()],
            revisited_start: false,
        }
    }
}

enum Admit {
    /// Proceed; remembers what to undo on backtrack.
    Enter(Undo),
    Prune,
}

enum Undo {
    Visited(NodeId),
    Revisit,
    Nothing,
}

fn admit(arena: &ExprArena, guard: &mut SegmentGuard, code: Code) -> Admit {
    let Code::Node(id) = code else {
        return Admit::Enter(Undo::Nothing);
    };
    if matches!(arena.kind(id), NodeKind::Constant(_)) {
        return Admit::Enter(Undo::Nothing);
    }
    if code == guard.start {
        let is_star = matches!(arena.kind(id), NodeKind::Star { .. });
        if is_star && !guard.revisited_start {
            guard.revisited_start = true;
            return Admit::Enter(Undo::Revisit);
        }
        return Admit::Prune;
    }
    if guard.visited[id.index()] {
        return Admit::Prune;
    }
    guard.visited[id.index()] = true;
    Admit::Enter(Undo::Visited(id))
}

fn unwind(guard: &mut SegmentGuard, undo: Undo) {
    match undo {
        Undo::Visited(id) => guard.visited[id.index()] = false,
        Undo::Revisit => guard.revisited_start = false,
        Undo::Nothing => {}
    }
}

/// Epsilon successors used by walks: anchors pass through unconditionally,
/// constants and Terminal are leaves.
fn eps_successors(arena: &ExprArena, id: NodeId) -> Vec<Code> {
    match arena.kind(id) {
        NodeKind::Epsilon | NodeKind::AnchorStart | NodeKind::AnchorEnd => {
            vec![arena.kont(id)]
        }
        NodeKind::Concat(left, _) => vec![Code::Node(*left)],
        NodeKind::Alt(left, right) => vec![Code::Node(*left), Code::Node(*right)],
        NodeKind::Star { body, greedy } => {
            let enter = Code::Node(*body);
            let skip = arena.kont(id);
            if *greedy {
                vec![enter, skip]
            } else {
                vec![skip, enter]
            }
        }
        NodeKind::Constant(_) => Vec::new(),
    }
}

struct PathWalk<'a> {
    arena: &'a ExprArena,
    w: &'a [u8],
    to: Option<NodeId>,
    limit: usize,
    nodes: Vec<Code>,
    results: Vec<Path>,
    truncated: bool,
    visits: usize,
}

impl<'a> PathWalk<'a> {
    fn run(
        arena: &ExprArena,
        from: NodeId,
        w: &[u8],
        to: Option<NodeId>,
        limit: usize,
    ) -> PathEnumeration {
        let mut walk = PathWalk {
            arena,
            w,
            to,
            limit,
            nodes: Vec::new(),
            results: Vec::new(),
            truncated: false,
            visits: 0,
        };
        walk.segment(Code::Node(from), 0);
        if walk.truncated {
            PathEnumeration::LimitExceeded(walk.results)
        } else {
            PathEnumeration::Complete(walk.results)
        }
    }

    fn emit(&mut self) {
        if self.results.len() == self.limit {
            self.truncated = true;
            return;
        }
        self.results.push(Path {
            nodes: self.nodes.clone(),
            consumed: self.w.to_vec(),
        });
    }

    fn spend_visit(&mut self) -> bool {
        self.visits += 1;
        if self.visits > WALK_VISIT_CAP {
            self.truncated = true;
        }
        self.truncated
    }

    /// Enters a fresh epsilon segment at `code` with `i` bytes consumed.
    fn segment(&mut self, code: Code, i: usize) {
        if i == self.w.len() {
            match self.to {
                None => {
                    self.nodes.push(code);
                    self.emit();
                    self.nodes.pop();
                }
                Some(_) => {
                    let mut guard = SegmentGuard::new(self.arena, code);
                    self.closing_step(&mut guard, code);
                }
            }
            return;
        }
        let mut guard = SegmentGuard::new(self.arena, code);
        self.step(&mut guard, code, i);
    }

    /// Processes `code` inside a consuming segment, guard already holding
    /// any mark for it.
    fn step(&mut self, guard: &mut SegmentGuard, code: Code, i: usize) {
        if self.spend_visit() {
            return;
        }
        self.nodes.push(code);
        match code {
            Code::Terminal => {}
            Code::Node(id) => {
                if let NodeKind::Constant(cs) = self.arena.kind(id) {
                    if cs.contains(self.w[i]) {
                        self.segment(self.arena.kont(id), i + 1);
                    }
                } else {
                    for succ in eps_successors(self.arena, id) {
                        if self.truncated {
                            break;
                        }
                        match admit(self.arena, guard, succ) {
                            Admit::Enter(undo) => {
                                self.step(guard, succ, i);
                                unwind(guard, undo);
                            }
                            Admit::Prune => {}
                        }
                    }
                }
            }
        }
        self.nodes.pop();
    }

    /// Processes `code` inside the final epsilon walk toward `to`.
    fn closing_step(&mut self, guard: &mut SegmentGuard, code: Code) {
        if self.spend_visit() {
            return;
        }
        self.nodes.push(code);
        let target = self.to.expect("closing walk only runs in targeted mode");
        if code == Code::Node(target) {
            self.emit();
            self.nodes.pop();
            return;
        }
        if let Code::Node(id) = code {
            if !matches!(self.arena.kind(id), NodeKind::Constant(_)) {
                for succ in eps_successors(self.arena, id) {
                    if self.truncated {
                        break;
                    }
                    match admit(self.arena, guard, succ) {
                        Admit::Enter(undo) => {
                            self.closing_step(guard, succ);
                            unwind(guard, undo);
                        }
                        Admit::Prune => {}
                    }
                }
            }
        }
        self.nodes.pop();
    }
}

/// Constant nodes reachable from `start` by guarded epsilon paths, in
/// depth-first order, one entry per distinct path. Emission of any single
/// constant is capped at two occurrences; that is the multiplicity the
/// analysis layer distinguishes.
pub(crate) fn eps_constant_arrivals(arena: &ExprArena, start: Code) -> Vec<NodeId> {
    let mut walk = ArrivalWalk {
        arena,
        emitted: vec![0u8; arena.len()],
        out: Vec::new(),
        visits: 0,
    };
    let mut guard = SegmentGuard::new(arena, start);
    walk.step(&mut guard, start);
    walk.out
}

const ARRIVAL_EMIT_CAP: u8 = 2;

struct ArrivalWalk<'a> {
    arena: &'a ExprArena,
    emitted: Vec<u8>,
    out: Vec<NodeId>,
    visits: usize,
}

impl<'a> ArrivalWalk<'a> {
    fn step(&mut self, guard: &mut SegmentGuard, code: Code) {
        self.visits += 1;
        if self.visits > WALK_VISIT_CAP {
            return;
        }
        let Code::Node(id) = code else {
            return;
        };
        if matches!(self.arena.kind(id), NodeKind::Constant(_)) {
            let slot = &mut self.emitted[id.index()];
            if *slot < ARRIVAL_EMIT_CAP {
                *slot += 1;
                self.out.push(id);
            }
            return;
        }
        for succ in eps_successors(self.arena, id) {
            match admit(self.arena, guard, succ) {
                Admit::Enter(undo) => {
                    self.step(guard, succ);
                    unwind(guard, undo);
                }
                Admit::Prune => {}
            }
        }
    }
}

/// True when `target` is reachable from `start` by epsilon moves alone
/// (trivially so when `start` is the target).
pub(crate) fn eps_reaches(arena: &ExprArena, start: Code, target: NodeId) -> bool {
    if start == Code::Node(target) {
        return true;
    }
    let mut seen = vec![false; arena.len()];
    let mut work = vec![start];
    while let Some(code) = work.pop() {
        let Code::Node(id) = code else { continue };
        for succ in eps_successors(arena, id) {
            if succ == Code::Node(target) {
                return true;
            }
            if let Code::Node(s) = succ {
                if !seen[s.index()] {
                    seen[s.index()] = true;
                    work.push(succ);
                }
            }
        }
    }
    false
}
