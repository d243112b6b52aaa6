//! The bounded reference machine `U_B`.
//!
//! A program is `encode_nat(L + 1)` followed by an `L`-bit body, so the set of
//! programs is prefix-free. The body is a sequence of instructions drawn from
//! a complete prefix-free opcode table:
//!
//! | opcode | mnemonic | effect                                               | steps        |
//! |--------|----------|------------------------------------------------------|--------------|
//! | `00`   | `LIT`    | append the rest of the body to the output, halt      | 1 + bits     |
//! | `01`   | `DUP`    | append a copy of the current output to itself        | max(1, out)  |
//! | `100`  | `OUT`    | append the current cell to the output                | 1            |
//! | `101`  | `FLIP`   | toggle the current cell                              | 1            |
//! | `1100` | `RIGHT`  | move the head right                                  | 1            |
//! | `1101` | `LEFT`   | move the head left                                   | 1            |
//! | `1110` | `LOOP`   | if the cell is 0, jump past the matching `END`       | 1            |
//! | `1111` | `END`    | if the cell is 1, jump back past the matching `LOOP` | 1            |
//!
//! An unmatched `LOOP` jumps to the end of the program; an unmatched `END`
//! jumps to the first instruction. A trailing partial opcode is ignored.
//! Running off the end of the body halts. Every emitted output bit costs a
//! step, so output length never exceeds the step count.
//!
//! Bit strings that are not well-framed programs halt immediately with empty
//! output. The full description lives in `docs/machine.md`.

use serde::{Deserialize, Serialize};

use crate::bitcode::{decode_nat, encode_nat, gamma_len, BitString};
use crate::error::{Error, Result};

/// Bumped whenever the instruction set or its cost model changes.
pub const MACHINE_VERSION: &str = "ub-8op-v1";

/// Default step budget for machine runs, `2^16`.
pub const DEFAULT_STEP_BUDGET: u64 = 1 << 16;

/// Steps used by the empty program.
pub const EMPTY_PROGRAM_STEPS: u64 = 0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Halted,
    Timeout,
}

/// Result of a budgeted run.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RunOutcome {
    pub status: RunStatus,
    /// Present iff the run halted.
    pub output: Option<BitString>,
    /// Steps consumed; equals the budget on timeout.
    pub steps: u64,
}

impl RunOutcome {
    pub fn halted(output: BitString, steps: u64) -> Self {
        Self { status: RunStatus::Halted, output: Some(output), steps }
    }

    pub fn timeout(budget: u64) -> Self {
        Self { status: RunStatus::Timeout, output: None, steps: budget }
    }

    pub fn is_halted(&self) -> bool {
        self.status == RunStatus::Halted
    }
}

/// One decoded instruction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Op {
    Lit(BitString),
    Dup,
    Out,
    Flip,
    Right,
    Left,
    Loop,
    End,
}

impl Op {
    pub fn opcode(&self) -> BitString {
        BitString::from(match self {
            Op::Lit(_) => "00",
            Op::Dup => "01",
            Op::Out => "100",
            Op::Flip => "101",
            Op::Right => "1100",
            Op::Left => "1101",
            Op::Loop => "1110",
            Op::End => "1111",
        })
    }

    pub fn mnemonic(&self) -> &'static str {
        match self {
            Op::Lit(_) => "LIT",
            Op::Dup => "DUP",
            Op::Out => "OUT",
            Op::Flip => "FLIP",
            Op::Right => "RIGHT",
            Op::Left => "LEFT",
            Op::Loop => "LOOP",
            Op::End => "END",
        }
    }
}

/// Encode a sequence of instructions into a body. A `LIT` must come last.
pub fn assemble(ops: &[Op]) -> Result<BitString> {
    let mut body = BitString::new();
    for (i, op) in ops.iter().enumerate() {
        body.extend_from(&op.opcode());
        if let Op::Lit(payload) = op {
            if i + 1 != ops.len() {
                return Err(Error::invalid("LIT consumes the rest of the body and must be last"));
            }
            body.extend_from(payload);
        }
    }
    Ok(body)
}

/// Parse a whitespace-separated mnemonic listing such as `"FLIP LOOP OUT END"`.
/// `LIT` takes its payload as the next token (`LIT 0110`, or bare `LIT` for none).
pub fn assemble_text(src: &str) -> Result<BitString> {
    let mut ops = Vec::new();
    let mut tokens = src.split_whitespace().peekable();
    while let Some(tok) = tokens.next() {
        let op = match tok.to_ascii_uppercase().as_str() {
            "LIT" => {
                let payload = match tokens.peek() {
                    Some(t) if t.chars().all(|c| c == '0' || c == '1') => {
                        let p = t.parse()?;
                        tokens.next();
                        p
                    }
                    _ => BitString::new(),
                };
                Op::Lit(payload)
            }
            "DUP" => Op::Dup,
            "OUT" => Op::Out,
            "FLIP" => Op::Flip,
            "RIGHT" => Op::Right,
            "LEFT" => Op::Left,
            "LOOP" => Op::Loop,
            "END" => Op::End,
            other => return Err(Error::Parse(format!("unknown mnemonic {other}"))),
        };
        ops.push(op);
    }
    assemble(&ops)
}

/// Decode a body into instructions. Never fails: a trailing partial opcode is dropped.
pub fn disassemble(body: &BitString) -> Vec<Op> {
    let bits = body.bits();
    let mut ops = Vec::new();
    let mut i = 0;
    let bit = |k: usize| bits.get(k).copied();
    while i < bits.len() {
        let op = match (bit(i), bit(i + 1)) {
            (Some(false), Some(false)) => {
                ops.push(Op::Lit(body.slice(i + 2, bits.len())));
                break;
            }
            (Some(false), Some(true)) => (Op::Dup, 2),
            (Some(true), Some(false)) => match bit(i + 2) {
                Some(false) => (Op::Out, 3),
                Some(true) => (Op::Flip, 3),
                None => break,
            },
            (Some(true), Some(true)) => match (bit(i + 2), bit(i + 3)) {
                (Some(false), Some(false)) => (Op::Right, 4),
                (Some(false), Some(true)) => (Op::Left, 4),
                (Some(true), Some(false)) => (Op::Loop, 4),
                (Some(true), Some(true)) => (Op::End, 4),
                _ => break,
            },
            _ => break,
        };
        ops.push(op.0);
        i += op.1;
    }
    ops
}

/// Frame a body as a self-delimiting program.
pub fn frame_program(body: &BitString) -> BitString {
    encode_nat(body.len() as u64 + 1).expect("len + 1 >= 1").concat(body)
}

/// Total program length for a body of `body_len` bits.
pub fn framed_len(body_len: usize) -> usize {
    gamma_len(body_len as u64 + 1) + body_len
}

/// Recover the body of a well-framed program; `None` for truncated framing or
/// trailing bits.
pub fn program_body(p: &BitString) -> Option<BitString> {
    let (n, used) = decode_nat(p.bits())?;
    let body_len = usize::try_from(n - 1).ok()?;
    if p.len().checked_sub(used)? != body_len {
        return None;
    }
    Some(p.slice(used, p.len()))
}

/// Largest body length whose framed program fits in `cap` bits.
pub fn max_body_len(cap: usize) -> Option<usize> {
    (0..=cap).take_while(|&l| framed_len(l) <= cap).last()
}

/// All well-framed programs of total length at most `cap`, in length-lex order.
pub fn programs_up_to(cap: usize) -> impl Iterator<Item = BitString> {
    let bodies = max_body_len(cap).map_or(0, |m| m + 1);
    (0..bodies).flat_map(|l| BitString::all_of_length(l).map(|b| frame_program(&b)))
}

/// The `n`-th program (1-based) in length-lex order of the program set.
pub fn nth_program(n: u64) -> Result<BitString> {
    if n == 0 {
        return Err(Error::invalid("program enumeration starts at 1"));
    }
    let mut rest = n - 1;
    for body_len in 0..63usize {
        let count = 1u64 << body_len;
        if rest < count {
            return Ok(frame_program(&BitString::from_u64(rest, body_len)));
        }
        rest -= count;
    }
    Err(Error::invalid("program index out of range"))
}

struct Compiled {
    ops: Vec<Op>,
    // jump target for LOOP/END at the same index
    jumps: Vec<usize>,
}

fn compile(body: &BitString) -> Compiled {
    let ops = disassemble(body);
    let n = ops.len();
    let mut jumps = vec![0; n];
    let mut stack = Vec::new();
    for (i, op) in ops.iter().enumerate() {
        match op {
            Op::Loop => stack.push(i),
            Op::End => match stack.pop() {
                Some(open) => {
                    jumps[open] = i + 1;
                    jumps[i] = open + 1;
                }
                None => jumps[i] = 0,
            },
            _ => {}
        }
    }
    for open in stack {
        jumps[open] = n;
    }
    Compiled { ops, jumps }
}

/// Two-sided tape of bits, zero initialised.
#[derive(Default)]
struct Tape {
    right: Vec<bool>,
    left: Vec<bool>,
}

impl Tape {
    fn with_contents(aux: &BitString) -> Self {
        Tape { right: aux.bits().to_vec(), left: Vec::new() }
    }

    fn cell(&mut self, pos: i64) -> &mut bool {
        let (side, idx) = if pos >= 0 {
            (&mut self.right, pos as usize)
        } else {
            (&mut self.left, (-pos - 1) as usize)
        };
        if idx >= side.len() {
            side.resize(idx + 1, false);
        }
        &mut side[idx]
    }
}

/// Run program `p` for at most `budget` steps on a blank tape.
pub fn run_machine(p: &BitString, budget: u64) -> RunOutcome {
    run_with_tape(p, Tape::default(), budget)
}

/// Conditional run: the work tape starts with `aux` written from cell 0
/// rightwards and the head on cell 0.
pub fn run_machine_with_aux(p: &BitString, aux: &BitString, budget: u64) -> RunOutcome {
    run_with_tape(p, Tape::with_contents(aux), budget)
}

/// Run an unframed body directly.
pub fn run_body(body: &BitString, aux: Option<&BitString>, budget: u64) -> RunOutcome {
    let tape = aux.map_or_else(Tape::default, Tape::with_contents);
    execute(&compile(body), tape, budget)
}

fn run_with_tape(p: &BitString, tape: Tape, budget: u64) -> RunOutcome {
    match program_body(p) {
        Some(body) => execute(&compile(&body), tape, budget),
        None => RunOutcome::halted(BitString::new(), 0),
    }
}

fn execute(prog: &Compiled, mut tape: Tape, budget: u64) -> RunOutcome {
    let mut out: Vec<bool> = Vec::new();
    let mut head: i64 = 0;
    let mut pc = 0usize;
    let mut steps: u64 = 0;
    while pc < prog.ops.len() {
        let cost = match &prog.ops[pc] {
            Op::Lit(payload) => 1 + payload.len() as u64,
            Op::Dup => (out.len() as u64).max(1),
            _ => 1,
        };
        if steps + cost > budget {
            return RunOutcome::timeout(budget);
        }
        steps += cost;
        match &prog.ops[pc] {
            Op::Lit(payload) => {
                out.extend_from_slice(payload.bits());
                pc = prog.ops.len();
            }
            Op::Dup => {
                out.extend_from_within(..);
                pc += 1;
            }
            Op::Out => {
                out.push(*tape.cell(head));
                pc += 1;
            }
            Op::Flip => {
                let c = tape.cell(head);
                *c = !*c;
                pc += 1;
            }
            Op::Right => {
                head += 1;
                pc += 1;
            }
            Op::Left => {
                head -= 1;
                pc += 1;
            }
            Op::Loop => {
                pc = if *tape.cell(head) { pc + 1 } else { prog.jumps[pc] };
            }
            Op::End => {
                pc = if *tape.cell(head) { prog.jumps[pc] } else { pc + 1 };
            }
        }
    }
    RunOutcome::halted(BitString::from_bits(out), steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prog(src: &str) -> BitString {
        frame_program(&assemble_text(src).unwrap())
    }

    #[test]
    fn opcode_table_is_complete_prefix_code() {
        use crate::bitcode::PrefixCodeSet;
        let ops = [Op::Lit(BitString::new()), Op::Dup, Op::Out, Op::Flip, Op::Right, Op::Left, Op::Loop, Op::End];
        let (pf, kraft) = PrefixCodeSet::new(ops.iter().map(Op::opcode)).check();
        assert!(pf);
        assert_eq!(kraft, num_rational::BigRational::from_integer(1.into()));
    }

    #[test]
    fn empty_program() {
        let p = frame_program(&BitString::new());
        assert_eq!(p, BitString::from("1"));
        let out = run_machine(&p, 1);
        assert_eq!(out, RunOutcome::halted(BitString::new(), EMPTY_PROGRAM_STEPS));
    }

    #[test]
    fn literal_and_dup() {
        let out = run_machine(&prog("LIT 101"), 100);
        assert_eq!(out, RunOutcome::halted("101".into(), 4));
        let out = run_machine(&prog("OUT DUP DUP DUP"), 100);
        assert_eq!(out.output, Some(BitString::repeat(false, 8)));
        assert_eq!(out.steps, 1 + 1 + 2 + 4);
    }

    #[test]
    fn looping_program_times_out() {
        let p = prog("FLIP LOOP END");
        assert_eq!(run_machine(&p, 100), RunOutcome::timeout(100));
    }

    #[test]
    fn bounded_loop_halts() {
        // print the cell, clear it, leave the loop
        let p = prog("FLIP LOOP OUT FLIP END OUT");
        let out = run_machine(&p, 100);
        assert_eq!(out.output, Some("10".into()));
    }

    #[test]
    fn unmatched_end_restarts() {
        // RIGHT FLIP END walks right forever
        assert!(!run_machine(&prog("RIGHT FLIP END"), 1000).is_halted());
        // a clear cell falls through an unmatched END
        assert!(run_machine(&prog("END OUT"), 10).is_halted());
    }

    #[test]
    fn malformed_programs_halt_empty() {
        for p in ["", "0", "00", "0101", "11", "0100"] {
            let out = run_machine(&BitString::from(p), 10);
            // "0100" frames a 1-bit body "0": a partial opcode, so still empty
            assert_eq!(out.output, Some(BitString::new()), "{p}");
        }
    }

    #[test]
    fn aux_tape() {
        let p = prog("OUT RIGHT OUT");
        let out = run_machine_with_aux(&p, &"10".into(), 10);
        assert_eq!(out.output, Some("10".into()));
    }

    #[test]
    fn budget_monotone_exhaustive_to_10_bits() {
        for p in BitString::all_up_to(10) {
            for b in [1u64, 3, 7, 20, 64] {
                let small = run_machine(&p, b);
                if small.is_halted() {
                    assert_eq!(run_machine(&p, 2 * b), small, "{p} at {b}");
                }
            }
        }
    }

    #[test]
    fn program_enumeration_counts() {
        assert_eq!(max_body_len(20), Some(13));
        assert_eq!(max_body_len(16), Some(9));
        assert_eq!(programs_up_to(20).count(), (1 << 14) - 1);
        let v: Vec<BitString> = programs_up_to(8).collect();
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        assert!(crate::bitcode::PrefixCodeSet::new(v).is_prefix_free());
    }

    #[test]
    fn nth_program_matches_enumeration() {
        for (i, p) in programs_up_to(12).enumerate() {
            assert_eq!(nth_program(i as u64 + 1).unwrap(), p);
        }
        assert!(nth_program(0).is_err());
    }

    #[test]
    fn disassemble_round_trip() {
        for body in BitString::all_up_to(12) {
            let ops = disassemble(&body);
            let re = assemble(&ops).unwrap();
            assert!(body.starts_with(&re));
            assert!(body.len() - re.len() < 4);
        }
    }
}
