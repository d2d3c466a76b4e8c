//! Vertex and clique codes.
//!
//! A code is a word over `{1, ..., d+1}`. The vertex born in the clique
//! labelled `u` receives the code `u`, and the `d+1` cliques it creates
//! are labelled `u1, ..., u(d+1)`. The empty code is the root `O`, the
//! interior vertex of the initial simplex.
//!
//! For a symbol `i` present in `u`, `T_i u` is the prefix strictly before
//! the last occurrence of `i` and `P_i u` the remaining suffix. The first
//! `d+1` neighbours of a vertex `u` are exactly the vertices `T_i u`; when
//! `i` does not occur in `u` the neighbour is the corner vertex `i` of the
//! initial simplex.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};

/// A letter of the alphabet `{1, ..., d+1}`.
pub type Symbol = u8;

/// Largest supported dimension; symbols must fit in a `u8`.
pub const MAX_DIM: u8 = 254;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Code {
    dim: u8,
    symbols: Vec<Symbol>,
}

impl Code {
    pub fn new(dim: u8, symbols: Vec<Symbol>) -> Result<Self> {
        check_dim(dim)?;
        if let Some(&bad) = symbols.iter().find(|&&s| s == 0 || s > dim + 1) {
            return Err(Error::invalid(format!(
                "symbol {bad} outside the alphabet 1..={} of dimension {dim}",
                dim + 1
            )));
        }
        Ok(Code { dim, symbols })
    }

    /// Builds a code without validating symbols. Callers guarantee the
    /// alphabet invariant.
    pub(crate) fn from_raw(dim: u8, symbols: Vec<Symbol>) -> Self {
        debug_assert!(symbols.iter().all(|&s| s >= 1 && s <= dim + 1));
        Code { dim, symbols }
    }

    pub fn root(dim: u8) -> Self {
        Code {
            dim,
            symbols: Vec::new(),
        }
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    /// Number of symbols `d+1`.
    pub fn alphabet_size(&self) -> usize {
        self.dim as usize + 1
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// Generation of the coded vertex.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn child(&self, symbol: Symbol) -> Result<Code> {
        check_symbol(self.dim, symbol)?;
        let mut symbols = Vec::with_capacity(self.symbols.len() + 1);
        symbols.extend_from_slice(&self.symbols);
        symbols.push(symbol);
        Ok(Code {
            dim: self.dim,
            symbols,
        })
    }

    pub fn prefix(&self, len: usize) -> Code {
        Code {
            dim: self.dim,
            symbols: self.symbols[..len].to_vec(),
        }
    }

    pub fn suffix(&self, start: usize) -> Code {
        Code {
            dim: self.dim,
            symbols: self.symbols[start..].to_vec(),
        }
    }

    pub fn concat(&self, other: &Code) -> Code {
        assert_eq!(self.dim, other.dim, "codes of different dimensions");
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        Code {
            dim: self.dim,
            symbols,
        }
    }

    /// Parses the textual form: one digit per symbol when `d+1 <= 9`,
    /// comma-separated integers otherwise. The empty string is the root.
    pub fn parse(dim: u8, text: &str) -> Result<Code> {
        check_dim(dim)?;
        let text = text.trim();
        if text.is_empty() {
            return Ok(Code::root(dim));
        }
        let symbols = if dim < 9 {
            text.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|v| v as Symbol)
                        .ok_or_else(|| Error::invalid(format!("bad symbol {c:?} in code {text:?}")))
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            text.split(',')
                .map(|part| {
                    part.trim()
                        .parse::<Symbol>()
                        .map_err(|_| Error::invalid(format!("bad symbol {part:?} in code {text:?}")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Code::new(dim, symbols)
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim < 9 {
            for s in &self.symbols {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            for (k, s) in self.symbols.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{s}")?;
            }
            Ok(())
        }
    }
}

impl fmt::Debug for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Code(d={}, \"{}\")", self.dim, self)
    }
}

fn check_dim(dim: u8) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::invalid(format!(
            "dimension must lie in 1..={MAX_DIM}, got {dim}"
        )));
    }
    Ok(())
}

fn check_symbol(dim: u8, symbol: Symbol) -> Result<()> {
    if symbol == 0 || symbol > dim + 1 {
        return Err(Error::invalid(format!(
            "symbol {symbol} outside the alphabet 1..={}",
            dim + 1
        )));
    }
    Ok(())
}

/// 1-based position of the last occurrence of `symbol`, if any.
pub fn last_occurrence(code: &Code, symbol: Symbol) -> Result<Option<usize>> {
    check_symbol(code.dim, symbol)?;
    Ok(code.symbols.iter().rposition(|&s| s == symbol).map(|p| p + 1))
}

fn absent(code: &Code, symbol: Symbol) -> Error {
    Error::AbsentSymbol {
        symbol,
        code: code.to_string(),
    }
}

/// `T_i u`: the prefix strictly before the last occurrence of `symbol`.
pub fn cut_t(code: &Code, symbol: Symbol) -> Result<Code> {
    match last_occurrence(code, symbol)? {
        Some(p) => Ok(code.prefix(p - 1)),
        None => Err(absent(code, symbol)),
    }
}

/// `P_i u`: the suffix starting at the last occurrence of `symbol`.
pub fn postfix_p(code: &Code, symbol: Symbol) -> Result<Code> {
    match last_occurrence(code, symbol)? {
        Some(p) => Ok(code.suffix(p - 1)),
        None => Err(absent(code, symbol)),
    }
}

/// Length of the longest shortcut hop out of `symbols`: the largest
/// `|P_i u|`, or `|u|` when some symbol is missing (the hop then leaves
/// the code entirely).
fn max_hop_raw(symbols: &[Symbol], alphabet: usize, seen: &mut [u32], stamp: u32) -> usize {
    let mut distinct = 0;
    for (back, &s) in symbols.iter().rev().enumerate() {
        let slot = &mut seen[s as usize];
        if *slot != stamp {
            *slot = stamp;
            distinct += 1;
            if distinct == alphabet {
                return back + 1;
            }
        }
    }
    symbols.len()
}

/// `Y(u) = |u| - |T_min u|`, truncated at `|u|` when a symbol is missing.
pub fn max_hop(code: &Code) -> Result<usize> {
    if code.is_empty() {
        return Err(Error::invalid("max_hop of the empty code"));
    }
    let mut seen = vec![0u32; code.alphabet_size() + 1];
    Ok(max_hop_raw(&code.symbols, code.alphabet_size(), &mut seen, 1))
}

/// Block lengths of the greedy `T_min` decomposition, right to left.
fn greedy_block_lengths(symbols: &[Symbol], dim: u8) -> Vec<usize> {
    let alphabet = dim as usize + 1;
    let mut seen = vec![0u32; alphabet + 1];
    let mut end = symbols.len();
    let mut lengths = Vec::new();
    let mut stamp = 0u32;
    while end > 0 {
        stamp += 1;
        let hop = max_hop_raw(&symbols[..end], alphabet, &mut seen, stamp);
        lengths.push(hop);
        end -= hop;
    }
    lengths
}

/// Number of blocks in the greedy decomposition of a raw symbol slice.
pub fn block_count_raw(symbols: &[Symbol], dim: u8) -> usize {
    let alphabet = dim as usize + 1;
    let mut seen = vec![0u32; alphabet + 1];
    let mut stamp = 1u32;
    let mut distinct = 0usize;
    let mut blocks = 0usize;
    for &s in symbols.iter().rev() {
        let slot = &mut seen[s as usize];
        if *slot != stamp {
            *slot = stamp;
            distinct += 1;
            if distinct == alphabet {
                blocks += 1;
                stamp += 1;
                distinct = 0;
            }
        }
    }
    // A started but unfinished block is the truncated leftmost one.
    if distinct > 0 {
        blocks += 1;
    }
    blocks
}

/// `N(u)`: the number of `T_min` applications that empty the code.
pub fn block_count(code: &Code) -> usize {
    block_count_raw(&code.symbols, code.dim)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDecomposition {
    /// Blocks from left to right.
    pub blocks: Vec<Code>,
    pub count: usize,
}

impl BlockDecomposition {
    /// Whether the leftmost block is a full block (contains all symbols).
    pub fn leftmost_is_full(&self) -> bool {
        match self.blocks.first() {
            None => true,
            Some(b) => {
                let mut present = vec![false; b.alphabet_size() + 1];
                for &s in b.symbols() {
                    present[s as usize] = true;
                }
                present[1..].iter().all(|&p| p)
            }
        }
    }
}

impl fmt::Display for BlockDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                f.write_str("|")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

pub fn block_decomposition(code: &Code) -> BlockDecomposition {
    let lengths = greedy_block_lengths(&code.symbols, code.dim);
    let mut blocks = Vec::with_capacity(lengths.len());
    let mut start = 0;
    for len in lengths.iter().rev() {
        blocks.push(Code::from_raw(
            code.dim,
            code.symbols[start..start + len].to_vec(),
        ));
        start += len;
    }
    BlockDecomposition {
        count: blocks.len(),
        blocks,
    }
}

/// Exact minimum number of blocks, by dynamic programming over prefixes,
/// in a decomposition where every block's leading symbol does not recur
/// inside the block.
///
/// With `leftmost_unrestricted` the leftmost block may instead be any
/// segment missing some symbol: the truncated hop that lands on a corner
/// or on the root.
pub fn min_blocks_oracle(code: &Code, leftmost_unrestricted: bool) -> usize {
    let s = &code.symbols;
    let n = s.len();
    let alphabet = code.alphabet_size();
    const INF: usize = usize::MAX / 2;
    // best[j]: fewest blocks covering s[..j].
    let mut best = vec![INF; n + 1];
    best[0] = 0;
    let mut seen = vec![false; alphabet + 1];
    for j in 1..=n {
        seen.iter_mut().for_each(|x| *x = false);
        let mut distinct = 0;
        // Extend the candidate block s[i..j] leftwards; `seen` holds s[i+1..j].
        for i in (0..j).rev() {
            let lead = s[i] as usize;
            let repeated = seen[lead];
            if !repeated {
                seen[lead] = true;
                distinct += 1;
            }
            let truncated = i == 0 && leftmost_unrestricted && distinct < alphabet;
            if (!repeated || truncated) && best[i] < INF {
                best[j] = best[j].min(best[i] + 1);
            }
        }
    }
    best[n]
}

/// Longest common prefix of `a` and `b` together with both remainders.
pub fn common_ancestor(a: &Code, b: &Code) -> (Code, Code, Code) {
    let l = common_prefix_len(a, b);
    (a.prefix(l), a.suffix(l), b.suffix(l))
}

pub fn common_prefix_len(a: &Code, b: &Code) -> usize {
    assert_eq!(a.dim, b.dim, "codes of different dimensions");
    a.symbols
        .iter()
        .zip(&b.symbols)
        .take_while(|(x, y)| x == y)
        .count()
}

/// Hop count predicted by the block formula `N(a~) + N(b~)`, where `a~`
/// and `b~` are the parts of the codes below their deepest common
/// ancestor.
///
/// This undercounts the graph distance whenever a remainder's truncated
/// leftmost block cannot be climbed in one hop to the common ancestor
/// (for instance `1` and `122` are at distance 2, the formula gives 1).
/// [`chain_distance`] is exact.
pub fn code_distance(a: &Code, b: &Code) -> usize {
    let l = common_prefix_len(a, b);
    block_count_raw(&a.symbols[l..], a.dim) + block_count_raw(&b.symbols[l..], b.dim)
}

/// Exact graph distance between the vertices coded `a` and `b`, computed
/// from the codes alone.
///
/// Shortest paths between two vertices never leave the union of their
/// ancestor chains together with the root and the corners, and every
/// edge of that union is determined by the cut operators. A BFS over
/// this subgraph of at most `|a| + |b| + d + 2` vertices gives the
/// distance in `O((|a| + |b|) d)` time.
pub fn chain_distance(a: &Code, b: &Code) -> usize {
    let d = a.dim as usize;
    let l = common_prefix_len(a, b);
    let (la, lb) = (a.len(), b.len());
    // Node layout: 0 root, 1..=d+1 corners, then the prefixes.
    let corners = d + 1;
    let node_a = |k: usize| if k == 0 { 0 } else { corners + k };
    let node_b = |k: usize| {
        if k == 0 {
            0
        } else if k <= l {
            corners + k
        } else {
            corners + la + (k - l)
        }
    };
    let total = corners + 1 + la + lb - l;
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); total];
    let mut link = |x: usize, y: usize| {
        adj[x].push(y as u32);
        adj[y].push(x as u32);
    };
    for x in 0..=corners {
        for y in x + 1..=corners {
            link(x, y);
        }
    }
    let mut last = vec![0usize; d + 2];
    for (code, len, first_new, node) in [
        (&a.symbols, la, 1, &node_a as &dyn Fn(usize) -> usize),
        (&b.symbols, lb, l + 1, &node_b as &dyn Fn(usize) -> usize),
    ] {
        last.iter_mut().for_each(|x| *x = 0);
        for k in 1..=len {
            last[code[k - 1] as usize] = k;
            if k < first_new {
                continue;
            }
            for (i, &l) in last.iter().enumerate().skip(1) {
                let target = if l == 0 { i } else { node(l - 1) };
                link(node(k), target);
            }
        }
    }
    let (src, dst) = (node_a(la), node_b(lb));
    if src == dst {
        return 0;
    }
    let mut dist = vec![u32::MAX; total];
    dist[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            let y = y as usize;
            if dist[y] == u32::MAX {
                dist[y] = dist[x] + 1;
                if y == dst {
                    return dist[y] as usize;
                }
                queue.push_back(y);
            }
        }
    }
    unreachable!("the root connects every prefix chain")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(d: u8, s: &str) -> Code {
        Code::parse(d, s).unwrap()
    }

    const PAPER_CODE: &str = "113213323122221131";

    #[test]
    fn last_occurrence_examples() {
        assert_eq!(last_occurrence(&c(3, "3312"), 3).unwrap(), Some(2));
        assert_eq!(last_occurrence(&c(3, "3312"), 4).unwrap(), None);
        assert_eq!(last_occurrence(&c(2, PAPER_CODE), 2).unwrap(), Some(14));
        assert!(last_occurrence(&c(2, "12"), 4).is_err());
        assert!(last_occurrence(&c(2, "12"), 0).is_err());
    }

    #[test]
    fn cut_and_postfix_examples() {
        assert_eq!(cut_t(&c(2, "3312"), 1).unwrap(), c(2, "33"));
        assert_eq!(cut_t(&c(2, "132"), 1).unwrap(), Code::root(2));
        assert_eq!(cut_t(&c(2, "211"), 1).unwrap(), c(2, "21"));
        assert_eq!(postfix_p(&c(2, "3312"), 2).unwrap(), c(2, "2"));
        assert_eq!(postfix_p(&c(2, "123123"), 1).unwrap(), c(2, "123"));
        assert_eq!(postfix_p(&c(2, "11"), 1).unwrap(), c(2, "1"));
        assert!(matches!(
            cut_t(&c(2, "11"), 2),
            Err(Error::AbsentSymbol { symbol: 2, .. })
        ));
        assert!(postfix_p(&c(2, "11"), 3).is_err());
    }

    #[test]
    fn max_hop_examples() {
        assert_eq!(max_hop(&c(2, "123123")).unwrap(), 3);
        assert_eq!(max_hop(&c(2, "11")).unwrap(), 2);
        assert_eq!(max_hop(&c(2, PAPER_CODE)).unwrap(), 5);
        assert!(max_hop(&Code::root(2)).is_err());
    }

    #[test]
    fn block_examples() {
        let u = c(2, PAPER_CODE);
        assert_eq!(block_count(&u), 5);
        assert_eq!(block_decomposition(&u).to_string(), "1|132|1332|31222|21131");
        assert_eq!(block_count(&Code::root(2)), 0);
        assert_eq!(block_count(&c(2, "123123")), 2);
        assert_eq!(block_decomposition(&c(2, "123123")).to_string(), "123|123");
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(min_blocks_oracle(&c(2, PAPER_CODE), false), 5);
        assert_eq!(min_blocks_oracle(&c(2, "11"), false), 2);
        assert_eq!(min_blocks_oracle(&c(2, "11"), true), 1);
        assert_eq!(min_blocks_oracle(&c(2, "1"), false), 1);
        assert_eq!(min_blocks_oracle(&c(2, "1"), true), 1);
        assert_eq!(min_blocks_oracle(&Code::root(2), true), 0);
        // The whole code is not a truncated block: it holds every symbol.
        assert_eq!(min_blocks_oracle(&c(2, "1321"), true), 2);
        assert_eq!(block_count(&c(2, "1321")), 2);
    }

    #[test]
    fn common_ancestor_examples() {
        let (p, x, y) = common_ancestor(&c(2, "132"), &c(2, "3312"));
        assert_eq!((p, x, y), (Code::root(2), c(2, "132"), c(2, "3312")));
        let (p, x, y) = common_ancestor(&c(2, "1332"), &c(2, "1331"));
        assert_eq!((p, x, y), (c(2, "133"), c(2, "2"), c(2, "1")));
        let (p, x, y) = common_ancestor(&c(2, "13"), &c(2, "13"));
        assert_eq!((p, x, y), (c(2, "13"), Code::root(2), Code::root(2)));
    }

    #[test]
    fn code_distance_examples() {
        assert_eq!(code_distance(&c(2, "132"), &c(2, "3312")), 3);
        assert_eq!(code_distance(&c(2, "13"), &c(2, "13")), 0);
        assert_eq!(code_distance(&c(2, "1331"), &c(2, "13")), 1);
    }

    #[test]
    fn formula_undercounts_on_truncated_remainders() {
        // "122" reaches "1" via "12" or via the root, never directly.
        assert_eq!(code_distance(&c(2, "1"), &c(2, "122")), 1);
        assert_eq!(chain_distance(&c(2, "1"), &c(2, "122")), 2);
        // Both climbs overshoot "1" to different neighbours of it.
        assert_eq!(code_distance(&c(2, "1131"), &c(2, "1232")), 2);
        assert_eq!(chain_distance(&c(2, "1131"), &c(2, "1232")), 3);
    }

    #[test]
    fn chain_distance_examples() {
        assert_eq!(chain_distance(&c(2, "132"), &c(2, "3312")), 3);
        assert_eq!(chain_distance(&c(2, "13"), &c(2, "13")), 0);
        assert_eq!(chain_distance(&c(2, "1331"), &c(2, "13")), 1);
        assert_eq!(chain_distance(&Code::root(2), &c(2, "1")), 1);
        assert_eq!(chain_distance(&c(2, "1"), &c(2, "2")), 2);
    }

    #[test]
    fn text_round_trip() {
        assert_eq!(c(2, "3312").to_string(), "3312");
        let wide = Code::parse(11, "1,12,4").unwrap();
        assert_eq!(wide.symbols(), &[1, 12, 4]);
        assert_eq!(wide.to_string(), "1,12,4");
        assert_eq!(Code::parse(2, "").unwrap(), Code::root(2));
        assert!(Code::parse(2, "14").is_err());
        assert!(Code::parse(2, "1a").is_err());
        assert!(Code::new(0, vec![]).is_err());
    }
}
