//! Text formats: `GRPD v1`, `GROUP v1`, `ACT v1`, `COVER v1`, `DESC v1`.
//!
//! Files are UTF-8; `#` starts a comment; tokens are whitespace-separated.
//! Section headers are single tokens ending in `:`; entries follow one per
//! line until the next header. Ids are arbitrary tokens, mapped to dense
//! indices in declaration order; parsers reject duplicates and report line
//! numbers. Writers emit canonical names (`x0`, `a0`, `e0`, `p0`, `m0`), so
//! byte-identical inputs produce byte-identical outputs.
//!
//! A `GRPD v1` file may contain several groupoid blocks; a trailing
//! `bibundle:` section reads the last two blocks as its left and right legs.
//! Chart effects are written in image notation: `effect: a p1 .. pn` sends
//! the k-th chart element of the source to position `pk` (1-based) of the
//! target chart.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::action::{SetAction, Side};
use crate::bibundle::Bibundle;
use crate::charted::ChartedGroupoid;
use crate::descent::{Cover, DescentDatum};
use crate::group::FiniteGroup;
use crate::groupoid::{Arr, FiniteGroupoid, Obj};
use crate::perm::Perm;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

/// A tokenized line: original line number plus its tokens.
type Line = (usize, Vec<String>);

fn tokenize(text: &str) -> Vec<Line> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let stripped = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let tokens: Vec<String> = stripped.split_whitespace().map(String::from).collect();
        if !tokens.is_empty() {
            out.push((i + 1, tokens));
        }
    }
    out
}

fn is_header(token: &str) -> bool {
    token.ends_with(':')
}

fn is_block_start(tokens: &[String]) -> bool {
    tokens.len() == 2
        && tokens[1] == "v1"
        && matches!(tokens[0].as_str(), "GRPD" | "GROUP" | "ACT" | "COVER" | "DESC" | "CERT")
}

/// Name table mapping declared ids to dense indices.
pub(crate) struct Names {
    kind: &'static str,
    index: BTreeMap<String, u32>,
}

impl Names {
    fn new(kind: &'static str) -> Names {
        Names {
            kind,
            index: BTreeMap::new(),
        }
    }

    fn declare(&mut self, line: usize, token: &str) -> Result<u32, ParseError> {
        if self.index.contains_key(token) {
            return err(line, format!("duplicate {} id `{token}`", self.kind));
        }
        let id = self.index.len() as u32;
        self.index.insert(token.to_string(), id);
        Ok(id)
    }

    fn resolve(&self, line: usize, token: &str) -> Result<u32, ParseError> {
        match self.index.get(token) {
            Some(&id) => Ok(id),
            None => err(line, format!("unknown {} id `{token}`", self.kind)),
        }
    }

    fn len(&self) -> usize {
        self.index.len()
    }
}

/// Cursor over tokenized lines.
pub(crate) struct Cursor {
    lines: Vec<Line>,
    pos: usize,
}

impl Cursor {
    pub(crate) fn new(text: &str) -> Cursor {
        Cursor {
            lines: tokenize(text),
            pos: 0,
        }
    }

    pub(crate) fn peek(&self) -> Option<&Line> {
        self.lines.get(self.pos)
    }

    pub(crate) fn next(&mut self) -> Option<Line> {
        let line = self.lines.get(self.pos).cloned();
        if line.is_some() {
            self.pos += 1;
        }
        line
    }

    fn last_line(&self) -> usize {
        self.lines.last().map(|(n, _)| *n).unwrap_or(0)
    }

    /// Consumes a `NAME v1` header line.
    pub(crate) fn expect_block(&mut self, name: &str) -> Result<usize, ParseError> {
        match self.next() {
            Some((n, tokens)) if tokens.len() == 2 && tokens[0] == name && tokens[1] == "v1" => {
                Ok(n)
            }
            Some((n, tokens)) => err(n, format!("expected `{name} v1`, found `{}`", tokens.join(" "))),
            None => err(self.last_line(), format!("expected `{name} v1`")),
        }
    }

    /// Reads entry lines until the next header or block start.
    pub(crate) fn entries(&mut self) -> Vec<Line> {
        let mut out = Vec::new();
        while let Some((_, tokens)) = self.peek() {
            if is_header(&tokens[0]) || is_block_start(tokens) {
                break;
            }
            out.push(self.next().unwrap());
        }
        out
    }
}

/// A parsed groupoid block: the groupoid, optional charts, and the declared
/// names (used by enclosing formats).
pub struct GroupoidBlock {
    pub groupoid: FiniteGroupoid,
    pub charted: Option<ChartedGroupoid>,
    object_names: Names,
    arrow_names: Names,
}

pub(crate) fn parse_groupoid_block(cursor: &mut Cursor) -> Result<GroupoidBlock, ParseError> {
    let header_line = cursor.expect_block("GRPD")?;
    let mut objects = Names::new("object");
    let mut arrows = Names::new("arrow");
    let mut arrow_ends: Vec<(usize, String, String)> = Vec::new();
    let mut unit_lines: Vec<Line> = Vec::new();
    let mut inv_lines: Vec<Line> = Vec::new();
    let mut comp_lines: Vec<Line> = Vec::new();
    let mut chart_lines: Vec<Line> = Vec::new();
    let mut effect_lines: Vec<Line> = Vec::new();
    let mut seen_section = false;
    while let Some((n, tokens)) = cursor.peek().cloned() {
        if !is_header(&tokens[0]) {
            if !seen_section {
                return err(n, "expected a section header");
            }
            break;
        }
        match tokens[0].as_str() {
            "objects:" => {
                cursor.next();
                for t in &tokens[1..] {
                    objects.declare(n, t)?;
                }
                for (m, entry) in cursor.entries() {
                    for t in &entry {
                        objects.declare(m, t)?;
                    }
                }
            }
            "arrows:" => {
                cursor.next();
                if tokens.len() > 1 {
                    return err(n, "arrow entries start on the following lines");
                }
                for (m, entry) in cursor.entries() {
                    if entry.len() != 3 {
                        return err(m, "arrow entry must be `id src tgt`");
                    }
                    arrows.declare(m, &entry[0])?;
                    arrow_ends.push((m, entry[1].clone(), entry[2].clone()));
                }
            }
            "unit:" => {
                cursor.next();
                unit_lines = cursor.entries();
            }
            "inv:" => {
                cursor.next();
                inv_lines = cursor.entries();
            }
            "comp:" => {
                cursor.next();
                comp_lines = cursor.entries();
            }
            "charts:" => {
                cursor.next();
                chart_lines = cursor.entries();
            }
            "effect:" => {
                cursor.next();
                effect_lines = cursor.entries();
            }
            // A header owned by an enclosing format ends the block.
            _ => break,
        }
        seen_section = true;
    }
    let n_objects = objects.len() as u32;
    let mut src = Vec::with_capacity(arrow_ends.len());
    let mut tgt = Vec::with_capacity(arrow_ends.len());
    for (m, s, t) in &arrow_ends {
        src.push(Obj(objects.resolve(*m, s)?));
        tgt.push(Obj(objects.resolve(*m, t)?));
    }
    let mut unit = vec![Arr(u32::MAX); n_objects as usize];
    for (m, entry) in &unit_lines {
        if entry.len() != 2 {
            return err(*m, "unit entry must be `object arrow`");
        }
        let x = objects.resolve(*m, &entry[0])?;
        if unit[x as usize] != Arr(u32::MAX) {
            return err(*m, format!("duplicate unit entry for `{}`", entry[0]));
        }
        unit[x as usize] = Arr(arrows.resolve(*m, &entry[1])?);
    }
    if let Some(x) = unit.iter().position(|&a| a == Arr(u32::MAX)) {
        return err(header_line, format!("missing unit entry for object {x}"));
    }
    let mut inv = vec![Arr(u32::MAX); arrow_ends.len()];
    for (m, entry) in &inv_lines {
        if entry.len() != 2 {
            return err(*m, "inv entry must be `arrow arrow`");
        }
        let g = arrows.resolve(*m, &entry[0])?;
        if inv[g as usize] != Arr(u32::MAX) {
            return err(*m, format!("duplicate inv entry for `{}`", entry[0]));
        }
        inv[g as usize] = Arr(arrows.resolve(*m, &entry[1])?);
    }
    if let Some(g) = inv.iter().position(|&a| a == Arr(u32::MAX)) {
        return err(header_line, format!("missing inv entry for arrow {g}"));
    }
    let mut comp = BTreeMap::new();
    for (m, entry) in &comp_lines {
        if entry.len() != 3 {
            return err(*m, "comp entry must be `g h gh`");
        }
        let g = Arr(arrows.resolve(*m, &entry[0])?);
        let h = Arr(arrows.resolve(*m, &entry[1])?);
        let gh = Arr(arrows.resolve(*m, &entry[2])?);
        if comp.insert((g, h), gh).is_some() {
            return err(*m, format!("duplicate comp entry for `{} {}`", entry[0], entry[1]));
        }
    }
    let groupoid = FiniteGroupoid::from_tables(n_objects, src, tgt, unit, inv, comp);
    let charted = if chart_lines.is_empty() && effect_lines.is_empty() {
        None
    } else {
        let mut chart_size: Option<usize> = None;
        let mut seen_chart = vec![false; n_objects as usize];
        for (m, entry) in &chart_lines {
            if entry.len() < 2 {
                return err(*m, "chart entry must be `object label...`");
            }
            let x = objects.resolve(*m, &entry[0])?;
            if seen_chart[x as usize] {
                return err(*m, format!("duplicate chart entry for `{}`", entry[0]));
            }
            seen_chart[x as usize] = true;
            let n = entry.len() - 1;
            match chart_size {
                None => chart_size = Some(n),
                Some(existing) if existing != n => {
                    return err(*m, format!("chart size {n} differs from {existing}; charts must be uniform"))
                }
                _ => {}
            }
        }
        if let Some(x) = seen_chart.iter().position(|&b| !b) {
            return err(header_line, format!("missing chart entry for object {x}"));
        }
        let n = chart_size.ok_or(ParseError {
            line: header_line,
            message: "effect section without charts".into(),
        })?;
        let mut effects = vec![None; arrow_ends.len()];
        for (m, entry) in &effect_lines {
            if entry.len() != n + 1 {
                return err(*m, format!("effect entry must be `arrow` plus {n} positions"));
            }
            let g = arrows.resolve(*m, &entry[0])?;
            if effects[g as usize].is_some() {
                return err(*m, format!("duplicate effect entry for `{}`", entry[0]));
            }
            let mut images = Vec::with_capacity(n);
            for t in &entry[1..] {
                let v: usize = t
                    .parse()
                    .map_err(|_| ParseError {
                        line: *m,
                        message: format!("effect position `{t}` is not a number"),
                    })?;
                if v < 1 || v > n {
                    return err(*m, format!("effect position {v} out of range 1..{n}"));
                }
                images.push(v as u32 - 1);
            }
            match Perm::from_images(images) {
                Some(p) => effects[g as usize] = Some(p),
                None => return err(*m, "effect is not a bijection"),
            }
        }
        if let Some(g) = effects.iter().position(|e| e.is_none()) {
            return err(header_line, format!("missing effect entry for arrow {g}"));
        }
        Some(ChartedGroupoid::new(
            groupoid.clone(),
            n,
            effects.into_iter().map(|e| e.unwrap()).collect(),
        ))
    };
    Ok(GroupoidBlock {
        groupoid,
        charted,
        object_names: objects,
        arrow_names: arrows,
    })
}

pub(crate) fn parse_group_block(cursor: &mut Cursor) -> Result<(FiniteGroup, Names), ParseError> {
    let header_line = cursor.expect_block("GROUP")?;
    let mut elements = Names::new("element");
    let mut mul_lines: Vec<Line> = Vec::new();
    while let Some((n, tokens)) = cursor.peek().cloned() {
        if !is_header(&tokens[0]) {
            break;
        }
        match tokens[0].as_str() {
            "elements:" => {
                cursor.next();
                for t in &tokens[1..] {
                    elements.declare(n, t)?;
                }
                for (m, entry) in cursor.entries() {
                    for t in &entry {
                        elements.declare(m, t)?;
                    }
                }
            }
            "mul:" => {
                cursor.next();
                mul_lines = cursor.entries();
            }
            _ => break,
        }
    }
    let order = elements.len();
    let mut table = vec![vec![u32::MAX; order]; order];
    for (m, entry) in &mul_lines {
        if entry.len() != 3 {
            return err(*m, "mul entry must be `a b ab`");
        }
        let a = elements.resolve(*m, &entry[0])? as usize;
        let b = elements.resolve(*m, &entry[1])? as usize;
        let ab = elements.resolve(*m, &entry[2])?;
        if table[a][b] != u32::MAX {
            return err(*m, format!("duplicate mul entry for `{} {}`", entry[0], entry[1]));
        }
        table[a][b] = ab;
    }
    for (a, row) in table.iter().enumerate() {
        if let Some(b) = row.iter().position(|&v| v == u32::MAX) {
            return err(header_line, format!("missing mul entry for elements {a}, {b}"));
        }
    }
    let group = FiniteGroup::from_mul_table(&table).map_err(|e| ParseError {
        line: header_line,
        message: format!("group axioms fail: {e}"),
    })?;
    Ok((group, elements))
}

fn parse_action_file(cursor: &mut Cursor) -> Result<SetAction, ParseError> {
    let header_line = cursor.expect_block("ACT")?;
    let mut side: Option<Side> = None;
    let mut elements: Option<Names> = None;
    let mut mul_lines: Vec<Line> = Vec::new();
    let mut carrier = Names::new("point");
    let mut act_lines: Vec<Line> = Vec::new();
    while let Some((n, tokens)) = cursor.peek().cloned() {
        if !is_header(&tokens[0]) {
            return err(n, "expected a section header");
        }
        match tokens[0].as_str() {
            "side:" => {
                cursor.next();
                if tokens.len() != 2 {
                    return err(n, "side entry must be `left` or `right`");
                }
                side = Some(match tokens[1].as_str() {
                    "left" => Side::Left,
                    "right" => Side::Right,
                    other => return err(n, format!("unknown side `{other}`")),
                });
            }
            "elements:" => {
                cursor.next();
                let mut names = Names::new("element");
                for t in &tokens[1..] {
                    names.declare(n, t)?;
                }
                for (m, entry) in cursor.entries() {
                    for t in &entry {
                        names.declare(m, t)?;
                    }
                }
                elements = Some(names);
            }
            "mul:" => {
                cursor.next();
                mul_lines = cursor.entries();
            }
            "carrier:" => {
                cursor.next();
                for t in &tokens[1..] {
                    carrier.declare(n, t)?;
                }
                for (m, entry) in cursor.entries() {
                    for t in &entry {
                        carrier.declare(m, t)?;
                    }
                }
            }
            "act:" => {
                cursor.next();
                act_lines = cursor.entries();
            }
            other => return err(n, format!("unknown section `{other}` in ACT block")),
        }
    }
    let elements = elements.ok_or(ParseError {
        line: header_line,
        message: "missing elements section".into(),
    })?;
    let order = elements.len();
    let mut table = vec![vec![u32::MAX; order]; order];
    for (m, entry) in &mul_lines {
        if entry.len() != 3 {
            return err(*m, "mul entry must be `a b ab`");
        }
        let a = elements.resolve(*m, &entry[0])? as usize;
        let b = elements.resolve(*m, &entry[1])? as usize;
        table[a][b] = elements.resolve(*m, &entry[2])?;
    }
    let group = FiniteGroup::from_mul_table(&table).map_err(|e| ParseError {
        line: header_line,
        message: format!("group axioms fail: {e}"),
    })?;
    let side = side.ok_or(ParseError {
        line: header_line,
        message: "missing side section".into(),
    })?;
    let m_size = carrier.len() as u32;
    let mut act = vec![u32::MAX; (m_size as usize) * order];
    for (m, entry) in &act_lines {
        if entry.len() != 3 {
            return err(*m, "act entry must be `point element point`");
        }
        let x = carrier.resolve(*m, &entry[0])?;
        let k = elements.resolve(*m, &entry[1])?;
        let y = carrier.resolve(*m, &entry[2])?;
        let slot = (x * order as u32 + k) as usize;
        if act[slot] != u32::MAX {
            return err(*m, format!("duplicate act entry for `{} {}`", entry[0], entry[1]));
        }
        act[slot] = y;
    }
    if act.contains(&u32::MAX) {
        return err(header_line, "act table incomplete");
    }
    Ok(SetAction::from_table(group, m_size, side, act))
}

fn parse_cover_sections(
    cursor: &mut Cursor,
) -> Result<(Cover, Names), ParseError> {
    let mut base = Names::new("point");
    let mut parts: Vec<Vec<u32>> = Vec::new();
    while let Some((n, tokens)) = cursor.peek().cloned() {
        if !is_header(&tokens[0]) {
            break;
        }
        match tokens[0].as_str() {
            "base:" => {
                cursor.next();
                for t in &tokens[1..] {
                    base.declare(n, t)?;
                }
                for (m, entry) in cursor.entries() {
                    for t in &entry {
                        base.declare(m, t)?;
                    }
                }
            }
            "part:" => {
                cursor.next();
                let mut part = Vec::new();
                for t in &tokens[1..] {
                    part.push(base.resolve(n, t)?);
                }
                parts.push(part);
            }
            _ => break,
        }
    }
    Ok((Cover::new(base.len() as u32, parts), base))
}

fn parse_cover_file(cursor: &mut Cursor) -> Result<Cover, ParseError> {
    cursor.expect_block("COVER")?;
    let (cover, _) = parse_cover_sections(cursor)?;
    Ok(cover)
}

/// Reads the `bibundle:` sections that follow a pair of groupoid blocks.
fn parse_bibundle_sections(
    cursor: &mut Cursor,
    left: &GroupoidBlock,
    right: &GroupoidBlock,
) -> Result<Bibundle, ParseError> {
    let mut total = Names::new("total point");
    let mut sp_lines: Vec<Line> = Vec::new();
    let mut tp_lines: Vec<Line> = Vec::new();
    let mut lact_lines: Vec<Line> = Vec::new();
    let mut ract_lines: Vec<Line> = Vec::new();
    let start = cursor.peek().map(|(n, _)| *n).unwrap_or(0);
    while let Some((n, tokens)) = cursor.peek().cloned() {
        if !is_header(&tokens[0]) {
            return err(n, "expected a section header");
        }
        match tokens[0].as_str() {
            "bibundle:" => {
                cursor.next();
            }
            "total:" => {
                cursor.next();
                for t in &tokens[1..] {
                    total.declare(n, t)?;
                }
                for (m, entry) in cursor.entries() {
                    for t in &entry {
                        total.declare(m, t)?;
                    }
                }
            }
            "sp:" => {
                cursor.next();
                sp_lines = cursor.entries();
            }
            "tp:" => {
                cursor.next();
                tp_lines = cursor.entries();
            }
            "lact:" => {
                cursor.next();
                lact_lines = cursor.entries();
            }
            "ract:" => {
                cursor.next();
                ract_lines = cursor.entries();
            }
            other => return err(n, format!("unknown section `{other}` in bibundle block")),
        }
    }
    let size = total.len();
    let mut src = vec![Obj(u32::MAX); size];
    for (m, entry) in &sp_lines {
        if entry.len() != 2 {
            return err(*m, "sp entry must be `point object`");
        }
        let p = total.resolve(*m, &entry[0])?;
        src[p as usize] = Obj(left.object_names.resolve(*m, &entry[1])?);
    }
    let mut tgt = vec![Obj(u32::MAX); size];
    for (m, entry) in &tp_lines {
        if entry.len() != 2 {
            return err(*m, "tp entry must be `point object`");
        }
        let p = total.resolve(*m, &entry[0])?;
        tgt[p as usize] = Obj(right.object_names.resolve(*m, &entry[1])?);
    }
    if let Some(p) = src.iter().position(|&x| x == Obj(u32::MAX)) {
        return err(start, format!("missing sp entry for point {p}"));
    }
    if let Some(p) = tgt.iter().position(|&x| x == Obj(u32::MAX)) {
        return err(start, format!("missing tp entry for point {p}"));
    }
    let mut left_act = BTreeMap::new();
    for (m, entry) in &lact_lines {
        if entry.len() != 3 {
            return err(*m, "lact entry must be `arrow point point`");
        }
        let g = Arr(left.arrow_names.resolve(*m, &entry[0])?);
        let p = total.resolve(*m, &entry[1])?;
        let q = total.resolve(*m, &entry[2])?;
        if left_act.insert((g, p), q).is_some() {
            return err(*m, "duplicate lact entry");
        }
    }
    let mut right_act = BTreeMap::new();
    for (m, entry) in &ract_lines {
        if entry.len() != 3 {
            return err(*m, "ract entry must be `point arrow point`");
        }
        let p = total.resolve(*m, &entry[0])?;
        let h = Arr(right.arrow_names.resolve(*m, &entry[1])?);
        let q = total.resolve(*m, &entry[2])?;
        if right_act.insert((p, h), q).is_some() {
            return err(*m, "duplicate ract entry");
        }
    }
    Ok(Bibundle::from_tables(
        left.groupoid.clone(),
        right.groupoid.clone(),
        src,
        tgt,
        left_act,
        right_act,
    ))
}

/// A parsed `DESC v1` file.
pub struct DescentFile {
    pub datum: DescentDatum,
}

fn parse_descent_file(cursor: &mut Cursor) -> Result<DescentFile, ParseError> {
    let header_line = cursor.expect_block("DESC")?;
    // cover: then base/part sections.
    match cursor.next() {
        Some((_, tokens)) if tokens.len() == 1 && tokens[0] == "cover:" => {}
        Some((n, _)) => return err(n, "expected `cover:`"),
        None => return err(header_line, "expected `cover:`"),
    }
    let (cover, base_names) = parse_cover_sections(cursor)?;
    match cursor.next() {
        Some((_, tokens)) if tokens.len() == 1 && tokens[0] == "target:" => {}
        Some((n, _)) => return err(n, "expected `target:`"),
        None => return err(header_line, "expected `target:`"),
    }
    let target = parse_groupoid_block(cursor)?;
    let mut local: Vec<Option<Bibundle>> = vec![None; cover.parts.len()];
    let mut local_names: Vec<Option<Names>> = (0..cover.parts.len()).map(|_| None).collect();
    let mut transitions: BTreeMap<(usize, usize), BTreeMap<u32, u32>> = BTreeMap::new();
    while let Some((n, tokens)) = cursor.next() {
        match tokens[0].as_str() {
            "local:" => {
                if tokens.len() != 2 {
                    return err(n, "local header must be `local: <part>`");
                }
                let part: usize = tokens[1].parse().map_err(|_| ParseError {
                    line: n,
                    message: format!("part index `{}` is not a number", tokens[1]),
                })?;
                if part >= cover.parts.len() {
                    return err(n, format!("part index {part} out of range"));
                }
                let (bundle, names) =
                    parse_local_bundle(cursor, &cover, part, &target, &base_names)?;
                if local[part].is_some() {
                    return err(n, format!("duplicate local block for part {part}"));
                }
                local[part] = Some(bundle);
                local_names[part] = Some(names);
            }
            "transition:" => {
                if tokens.len() != 3 {
                    return err(n, "transition header must be `transition: <a> <b>`");
                }
                let a: usize = tokens[1].parse().map_err(|_| ParseError {
                    line: n,
                    message: "part index is not a number".into(),
                })?;
                let b: usize = tokens[2].parse().map_err(|_| ParseError {
                    line: n,
                    message: "part index is not a number".into(),
                })?;
                if a >= cover.parts.len() || b >= cover.parts.len() {
                    return err(n, "part index out of range");
                }
                let mut map = BTreeMap::new();
                for (m, entry) in cursor.entries() {
                    if entry.len() != 2 {
                        return err(m, "transition entry must be `point point`");
                    }
                    let na = local_names[a].as_ref().ok_or(ParseError {
                        line: m,
                        message: format!("local block {a} must precede its transitions"),
                    })?;
                    let nb = local_names[b].as_ref().ok_or(ParseError {
                        line: m,
                        message: format!("local block {b} must precede its transitions"),
                    })?;
                    let p = na.resolve(m, &entry[0])?;
                    let q = nb.resolve(m, &entry[1])?;
                    if map.insert(p, q).is_some() {
                        return err(m, "duplicate transition entry");
                    }
                }
                if transitions.insert((a, b), map).is_some() {
                    return err(n, format!("duplicate transition block ({a}, {b})"));
                }
            }
            other => return err(n, format!("unknown section `{other}` in DESC file")),
        }
    }
    let local: Vec<Bibundle> = local
        .into_iter()
        .enumerate()
        .map(|(i, b)| {
            b.ok_or(ParseError {
                line: header_line,
                message: format!("missing local block for part {i}"),
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(DescentFile {
        datum: DescentDatum {
            cover,
            target: target.groupoid,
            local,
            transitions,
        },
    })
}

/// One `local:` block: `total:`, `sp:` (global point names), `tp:`, `ract:`.
/// The left leg is the trivial groupoid on the part; only units act there.
fn parse_local_bundle(
    cursor: &mut Cursor,
    cover: &Cover,
    part: usize,
    target: &GroupoidBlock,
    base_names: &Names,
) -> Result<(Bibundle, Names), ParseError> {
    let mut total = Names::new("total point");
    let mut sp_lines: Vec<Line> = Vec::new();
    let mut tp_lines: Vec<Line> = Vec::new();
    let mut ract_lines: Vec<Line> = Vec::new();
    while let Some((n, tokens)) = cursor.peek().cloned() {
        if !is_header(&tokens[0]) {
            return err(n, "expected a section header");
        }
        match tokens[0].as_str() {
            "total:" => {
                cursor.next();
                for t in &tokens[1..] {
                    total.declare(n, t)?;
                }
                for (m, entry) in cursor.entries() {
                    for t in &entry {
                        total.declare(m, t)?;
                    }
                }
            }
            "sp:" => {
                cursor.next();
                sp_lines = cursor.entries();
            }
            "tp:" => {
                cursor.next();
                tp_lines = cursor.entries();
            }
            "ract:" => {
                cursor.next();
                ract_lines = cursor.entries();
            }
            _ => break,
        }
    }
    let size = total.len();
    let left = FiniteGroupoid::trivial(cover.parts[part].len() as u32);
    let mut src = vec![Obj(u32::MAX); size];
    for (m, entry) in &sp_lines {
        if entry.len() != 2 {
            return err(*m, "sp entry must be `point basepoint`");
        }
        let p = total.resolve(*m, &entry[0])?;
        let global = base_names.resolve(*m, &entry[1])?;
        let li = cover.local_index(part, global).ok_or(ParseError {
            line: *m,
            message: format!("base point `{}` is not in part {part}", entry[1]),
        })?;
        src[p as usize] = Obj(li);
    }
    let mut tgt = vec![Obj(u32::MAX); size];
    for (m, entry) in &tp_lines {
        if entry.len() != 2 {
            return err(*m, "tp entry must be `point object`");
        }
        let p = total.resolve(*m, &entry[0])?;
        tgt[p as usize] = Obj(target.object_names.resolve(*m, &entry[1])?);
    }
    if src.contains(&Obj(u32::MAX)) || tgt.contains(&Obj(u32::MAX)) {
        return err(0, format!("incomplete sp/tp tables in local block {part}"));
    }
    let mut left_act = BTreeMap::new();
    for (p, &x) in src.iter().enumerate() {
        left_act.insert((left.unit(x), p as u32), p as u32);
    }
    let mut right_act = BTreeMap::new();
    for (m, entry) in &ract_lines {
        if entry.len() != 3 {
            return err(*m, "ract entry must be `point arrow point`");
        }
        let p = total.resolve(*m, &entry[0])?;
        let h = Arr(target.arrow_names.resolve(*m, &entry[1])?);
        let q = total.resolve(*m, &entry[2])?;
        if right_act.insert((p, h), q).is_some() {
            return err(*m, "duplicate ract entry");
        }
    }
    Ok((
        Bibundle::from_tables(left, target.groupoid.clone(), src, tgt, left_act, right_act),
        total,
    ))
}

/// A parsed file of any supported kind.
#[allow(clippy::large_enum_variant)]
pub enum ParsedFile {
    /// One or more groupoid blocks without a bibundle section.
    Groupoids(Vec<GroupoidBlock>),
    /// Groupoid blocks with a trailing bibundle over the last two.
    Bibundle {
        blocks: Vec<GroupoidBlock>,
        bibundle: Bibundle,
    },
    Group(FiniteGroup),
    Action(SetAction),
    Cover(Cover),
    Descent(DescentFile),
}

impl std::fmt::Debug for ParsedFile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self {
            ParsedFile::Groupoids(_) => "Groupoids",
            ParsedFile::Bibundle { .. } => "Bibundle",
            ParsedFile::Group(_) => "Group",
            ParsedFile::Action(_) => "Action",
            ParsedFile::Cover(_) => "Cover",
            ParsedFile::Descent(_) => "Descent",
        };
        write!(f, "ParsedFile::{kind}")
    }
}

/// Parses a file, dispatching on its first header.
pub fn parse(text: &str) -> Result<ParsedFile, ParseError> {
    let mut cursor = Cursor::new(text);
    let (first_line, first) = match cursor.peek() {
        Some((n, tokens)) => (*n, tokens[0].clone()),
        None => return err(0, "empty file"),
    };
    match first.as_str() {
        "GRPD" => {
            let mut blocks = Vec::new();
            let mut bibundle = None;
            loop {
                match cursor.peek() {
                    Some((_, tokens)) if tokens[0] == "GRPD" => {
                        blocks.push(parse_groupoid_block(&mut cursor)?);
                    }
                    Some((n, tokens)) if tokens[0] == "bibundle:" => {
                        if blocks.len() < 2 {
                            return err(*n, "bibundle section requires two groupoid blocks");
                        }
                        let (right, left) =
                            (blocks.len() - 1, blocks.len() - 2);
                        bibundle = Some(parse_bibundle_sections(
                            &mut cursor,
                            &blocks[left],
                            &blocks[right],
                        )?);
                        break;
                    }
                    Some((n, tokens)) => {
                        return err(*n, format!("unexpected `{}`", tokens[0]))
                    }
                    None => break,
                }
            }
            match bibundle {
                Some(b) => Ok(ParsedFile::Bibundle {
                    blocks,
                    bibundle: b,
                }),
                None => Ok(ParsedFile::Groupoids(blocks)),
            }
        }
        "GROUP" => {
            let (group, _) = parse_group_block(&mut cursor)?;
            Ok(ParsedFile::Group(group))
        }
        "ACT" => Ok(ParsedFile::Action(parse_action_file(&mut cursor)?)),
        "COVER" => Ok(ParsedFile::Cover(parse_cover_file(&mut cursor)?)),
        "DESC" => Ok(ParsedFile::Descent(parse_descent_file(&mut cursor)?)),
        other => err(first_line, format!("unknown file header `{other}`")),
    }
}

// Writers. Canonical names: objects `x<i>`, arrows `a<i>`, group elements
// `e<i>`, total points `p<i>`, base points `m<i>`.

pub fn write_groupoid(g: &FiniteGroupoid) -> String {
    let mut out = String::new();
    out.push_str("GRPD v1\n");
    out.push_str("objects:");
    for x in g.objects() {
        let _ = write!(out, " x{}", x.0);
    }
    out.push('\n');
    out.push_str("arrows:\n");
    for a in g.arrows() {
        let _ = writeln!(out, "a{} x{} x{}", a.0, g.src(a).0, g.tgt(a).0);
    }
    out.push_str("unit:\n");
    for x in g.objects() {
        let _ = writeln!(out, "x{} a{}", x.0, g.unit(x).0);
    }
    out.push_str("inv:\n");
    for a in g.arrows() {
        let _ = writeln!(out, "a{} a{}", a.0, g.inv(a).0);
    }
    out.push_str("comp:\n");
    for g1 in g.arrows() {
        for g2 in g.arrows_into(g.src(g1)) {
            if let Some(c) = g.compose(g1, g2) {
                let _ = writeln!(out, "a{} a{} a{}", g1.0, g2.0, c.0);
            }
        }
    }
    out
}

pub fn write_charted(c: &ChartedGroupoid) -> String {
    let mut out = write_groupoid(&c.base);
    out.push_str("charts:\n");
    for x in c.base.objects() {
        let _ = write!(out, "x{}", x.0);
        for i in 1..=c.chart_size() {
            let _ = write!(out, " {i}");
        }
        out.push('\n');
    }
    out.push_str("effect:\n");
    for a in c.base.arrows() {
        let _ = write!(out, "a{}", a.0);
        for i in 0..c.chart_size() {
            let _ = write!(out, " {}", c.effect(a).apply(i as u32) + 1);
        }
        out.push('\n');
    }
    out
}

pub fn write_group(k: &FiniteGroup) -> String {
    let mut out = String::new();
    out.push_str("GROUP v1\n");
    out.push_str("elements:");
    for e in k.elements() {
        let _ = write!(out, " e{e}");
    }
    out.push('\n');
    out.push_str("mul:\n");
    for a in k.elements() {
        for b in k.elements() {
            let _ = writeln!(out, "e{a} e{b} e{}", k.mul(a, b));
        }
    }
    out
}

/// Writes a set action: the group inline, then the carrier and act table.
pub fn write_action(a: &SetAction) -> String {
    let mut out = String::new();
    out.push_str("ACT v1\n");
    let _ = writeln!(
        out,
        "side: {}",
        match a.side {
            Side::Left => "left",
            Side::Right => "right",
        }
    );
    out.push_str("elements:");
    for e in a.group.elements() {
        let _ = write!(out, " e{e}");
    }
    out.push('\n');
    out.push_str("mul:\n");
    for x in a.group.elements() {
        for y in a.group.elements() {
            let _ = writeln!(out, "e{x} e{y} e{}", a.group.mul(x, y));
        }
    }
    out.push_str("carrier:");
    for x in 0..a.carrier {
        let _ = write!(out, " p{x}");
    }
    out.push('\n');
    out.push_str("act:\n");
    for x in 0..a.carrier {
        for k in a.group.elements() {
            let _ = writeln!(out, "p{x} e{k} p{}", a.apply(x, k));
        }
    }
    out
}

/// Writes a bibundle file: both groupoid blocks followed by the tables.
pub fn write_bibundle_file(b: &Bibundle) -> String {
    let mut out = write_groupoid(&b.left);
    out.push_str(&write_groupoid(&b.right));
    out.push_str("bibundle:\n");
    out.push_str("total:");
    for p in b.points() {
        let _ = write!(out, " p{p}");
    }
    out.push('\n');
    out.push_str("sp:\n");
    for p in b.points() {
        let _ = writeln!(out, "p{p} x{}", b.s_p(p).0);
    }
    out.push_str("tp:\n");
    for p in b.points() {
        let _ = writeln!(out, "p{p} x{}", b.t_p(p).0);
    }
    out.push_str("lact:\n");
    for (g, p, q) in b.left_action_entries() {
        let _ = writeln!(out, "a{} p{p} p{q}", g.0);
    }
    out.push_str("ract:\n");
    for (p, h, q) in b.right_action_entries() {
        let _ = writeln!(out, "p{p} a{} p{q}", h.0);
    }
    out
}

pub fn write_cover(c: &Cover) -> String {
    let mut out = String::new();
    out.push_str("COVER v1\n");
    out.push_str("base:");
    for m in 0..c.base_size {
        let _ = write!(out, " m{m}");
    }
    out.push('\n');
    for part in &c.parts {
        out.push_str("part:");
        for &m in part {
            let _ = write!(out, " m{m}");
        }
        out.push('\n');
    }
    out
}

/// Writes a descent datum: cover, target block, local blocks, transitions.
pub fn write_descent(d: &DescentDatum) -> String {
    let mut out = String::new();
    out.push_str("DESC v1\n");
    out.push_str("cover:\n");
    out.push_str("base:");
    for m in 0..d.cover.base_size {
        let _ = write!(out, " m{m}");
    }
    out.push('\n');
    for part in &d.cover.parts {
        out.push_str("part:");
        for &m in part {
            let _ = write!(out, " m{m}");
        }
        out.push('\n');
    }
    out.push_str("target:\n");
    out.push_str(&write_groupoid(&d.target));
    for (i, psi) in d.local.iter().enumerate() {
        let _ = writeln!(out, "local: {i}");
        out.push_str("total:");
        for p in psi.points() {
            let _ = write!(out, " p{p}");
        }
        out.push('\n');
        out.push_str("sp:\n");
        for p in psi.points() {
            let global = d.cover.parts[i][psi.s_p(p).idx()];
            let _ = writeln!(out, "p{p} m{global}");
        }
        out.push_str("tp:\n");
        for p in psi.points() {
            let _ = writeln!(out, "p{p} x{}", psi.t_p(p).0);
        }
        out.push_str("ract:\n");
        for (p, h, q) in psi.right_action_entries() {
            let _ = writeln!(out, "p{p} a{} p{q}", h.0);
        }
    }
    for (&(a, b), map) in &d.transitions {
        let _ = writeln!(out, "transition: {a} {b}");
        for (&p, &q) in map {
            let _ = writeln!(out, "p{p} p{q}");
        }
    }
    out
}


pub(crate) mod parsing {
    pub(crate) use super::{parse_group_block, parse_groupoid_block, Cursor, GroupoidBlock};
}
