//! `CERT v1`: machine-checkable presentation certificates.
//!
//! A certificate stores raw tables only: the source and result charted
//! groupoids, the acting group with its action on the result, and the
//! bibundle between the rebuilt semidirect product and the source. The
//! verifier trusts nothing beyond those tables — it revalidates both
//! groupoids, the action, the claims, rebuilds the product, and re-runs the
//! bibundle and equivalence checks from scratch.

use std::fmt::Write as _;

use crate::action::{semidirect_group, AutAction};
use crate::bibundle::{
    induced_coarse_map, induced_stabilizer_hom, is_equivalence, validate_bibundle, Bibundle,
};
use crate::charted::{is_purely_ineffective, ChartedGroupoid};
use crate::format::{write_charted, write_group, ParseError};
use crate::group::{are_isomorphic, FiniteGroup};
use crate::groupoid::{Arr, Obj};
use crate::presentation::{
    BandTrivialization, FrameConstruction, PresentationCertificate, SetPresentation,
};

/// Verifiable claims carried by a certificate.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CertClaims {
    /// The result groupoid is purely ineffective.
    pub purely_ineffective: bool,
    /// Every stabilizer group of the result has this order.
    pub stabilizer_order: Option<u32>,
    /// Every stabilizer group of the result is abelian.
    pub abelian_stabilizers: Option<bool>,
}

/// A stage certificate: `result ⋊ group ≃ source`, from raw tables.
#[derive(Clone, Debug)]
pub struct CertFile {
    pub stage: String,
    pub source: ChartedGroupoid,
    pub result: ChartedGroupoid,
    pub group: FiniteGroup,
    /// Action tables of the group on the result (object- and arrow-indexed).
    pub obj_act: Vec<u32>,
    pub arr_act: Vec<u32>,
    /// Bibundle tables between the rebuilt `result ⋊ group` and the source:
    /// leg maps and both action tables, all by dense index.
    pub sp: Vec<u32>,
    pub tp: Vec<u32>,
    pub lact: Vec<(u32, u32, u32)>,
    pub ract: Vec<(u32, u32, u32)>,
    pub claims: CertClaims,
}

type ActionTriples = Vec<(u32, u32, u32)>;

fn bibundle_tables(b: &Bibundle) -> (Vec<u32>, Vec<u32>, ActionTriples, ActionTriples) {
    let sp = b.points().map(|p| b.s_p(p).0).collect();
    let tp = b.points().map(|p| b.t_p(p).0).collect();
    let lact = b.left_action_entries().map(|(g, p, q)| (g.0, p, q)).collect();
    let ract = b.right_action_entries().map(|(p, h, q)| (p, h.0, q)).collect();
    (sp, tp, lact, ract)
}

fn assemble(
    stage: &str,
    source: &ChartedGroupoid,
    result: &ChartedGroupoid,
    action: &AutAction,
    bibundle: &Bibundle,
    claims: CertClaims,
) -> CertFile {
    let (sp, tp, lact, ract) = bibundle_tables(bibundle);
    CertFile {
        stage: stage.to_string(),
        source: source.clone(),
        result: result.clone(),
        group: action.group.clone(),
        obj_act: action.obj_table().to_vec(),
        arr_act: action.arr_table().to_vec(),
        sp,
        tp,
        lact,
        ract,
        claims,
    }
}

/// Certificate of a frame construction: `(G ⋉ F) ⋊ Sym(n) ≃ G`.
pub fn cert_from_frames(source: &ChartedGroupoid, fc: &FrameConstruction) -> CertFile {
    assemble(
        "frames",
        source,
        &fc.charted,
        &fc.sym_action,
        &fc.quotient.bibundle,
        CertClaims {
            purely_ineffective: true,
            stabilizer_order: None,
            abelian_stabilizers: None,
        },
    )
}

/// Certificate of a band trivialization: `G' ⋊ Aut(T) ≃ G`.
pub fn cert_from_band(source: &ChartedGroupoid, band: &BandTrivialization) -> CertFile {
    assemble(
        "band",
        source,
        &band.charted,
        &band.aut_action,
        &band.quotient.bibundle,
        CertClaims {
            purely_ineffective: true,
            stabilizer_order: Some(band.center_group.order()),
            abelian_stabilizers: Some(true),
        },
    )
}

/// Certificate of the full pipeline: `H ⋊ (Aut(T) × Sym(n)) ≃ G`.
pub fn cert_from_presentation(cert: &PresentationCertificate) -> CertFile {
    assemble(
        "present",
        &cert.source,
        &cert.result,
        &cert.action,
        &cert.bibundle,
        CertClaims {
            purely_ineffective: true,
            stabilizer_order: Some(cert.center_group.order()),
            abelian_stabilizers: Some(true),
        },
    )
}

/// Certificate of the trivial-center set presentation: `P ⋊ K ≃ G`.
pub fn cert_from_set_presentation(set: &SetPresentation) -> CertFile {
    let result = ChartedGroupoid::with_trivial_charts(
        crate::groupoid::FiniteGroupoid::trivial(set.points),
    );
    let k = &set.action.group;
    let obj_act: Vec<u32> = (0..set.points)
        .flat_map(|p| (0..k.order()).map(move |a| (p, a)))
        .map(|(p, a)| set.action.apply(p, a))
        .collect();
    let action = AutAction::from_tables(
        k.clone(),
        result.base.clone(),
        obj_act.clone(),
        obj_act,
    );
    assemble(
        "present-set",
        &set.certificate.source,
        &result,
        &action,
        &set.bibundle,
        CertClaims {
            purely_ineffective: true,
            stabilizer_order: Some(1),
            abelian_stabilizers: Some(true),
        },
    )
}

/// Serializes a certificate; output is deterministic.
pub fn write_cert(cert: &CertFile) -> String {
    let mut out = String::new();
    out.push_str("CERT v1\n");
    let _ = writeln!(out, "stage: {}", cert.stage);
    out.push_str("claims:\n");
    let _ = writeln!(out, "pi {}", cert.claims.purely_ineffective);
    if let Some(order) = cert.claims.stabilizer_order {
        let _ = writeln!(out, "stabilizer-order {order}");
    }
    if let Some(ab) = cert.claims.abelian_stabilizers {
        let _ = writeln!(out, "abelian {ab}");
    }
    out.push_str("source:\n");
    out.push_str(&write_charted(&cert.source));
    out.push_str("result:\n");
    out.push_str(&write_charted(&cert.result));
    out.push_str("group:\n");
    out.push_str(&write_group(&cert.group));
    out.push_str("action:\n");
    out.push_str("objact:");
    for v in &cert.obj_act {
        let _ = write!(out, " {v}");
    }
    out.push('\n');
    out.push_str("arract:");
    for v in &cert.arr_act {
        let _ = write!(out, " {v}");
    }
    out.push('\n');
    out.push_str("bibundle:\n");
    let _ = writeln!(out, "total: {}", cert.sp.len());
    out.push_str("sp:");
    for v in &cert.sp {
        let _ = write!(out, " {v}");
    }
    out.push('\n');
    out.push_str("tp:");
    for v in &cert.tp {
        let _ = write!(out, " {v}");
    }
    out.push('\n');
    out.push_str("lact:\n");
    for (g, p, q) in &cert.lact {
        let _ = writeln!(out, "{g} {p} {q}");
    }
    out.push_str("ract:\n");
    for (p, h, q) in &cert.ract {
        let _ = writeln!(out, "{p} {h} {q}");
    }
    out
}

fn parse_failure(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

/// Parses a `CERT v1` file.
pub fn parse_cert(text: &str) -> Result<CertFile, ParseError> {
    use crate::format::parsing::{Cursor, GroupoidBlock};
    let mut cursor = Cursor::new(text);
    cursor.expect_block("CERT")?;
    let mut stage = None;
    let mut claims = CertClaims::default();
    let mut source: Option<GroupoidBlock> = None;
    let mut result: Option<GroupoidBlock> = None;
    let mut group: Option<FiniteGroup> = None;
    let mut obj_act: Option<Vec<u32>> = None;
    let mut arr_act: Option<Vec<u32>> = None;
    let mut total: Option<u32> = None;
    let mut sp: Option<Vec<u32>> = None;
    let mut tp: Option<Vec<u32>> = None;
    let mut lact: Vec<(u32, u32, u32)> = Vec::new();
    let mut ract: Vec<(u32, u32, u32)> = Vec::new();
    let numbers = |line: usize, tokens: &[String]| -> Result<Vec<u32>, ParseError> {
        tokens
            .iter()
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|_| parse_failure(line, format!("`{t}` is not a number")))
            })
            .collect()
    };
    while let Some((n, tokens)) = cursor.next() {
        match tokens[0].as_str() {
            "stage:" => {
                if tokens.len() != 2 {
                    return Err(parse_failure(n, "stage entry must be a single token"));
                }
                stage = Some(tokens[1].clone());
            }
            "claims:" => {
                for (m, entry) in cursor.entries() {
                    match (entry[0].as_str(), entry.len()) {
                        ("pi", 2) => {
                            claims.purely_ineffective = entry[1] == "true";
                        }
                        ("stabilizer-order", 2) => {
                            claims.stabilizer_order = Some(entry[1].parse().map_err(|_| {
                                parse_failure(m, "stabilizer-order is not a number")
                            })?);
                        }
                        ("abelian", 2) => {
                            claims.abelian_stabilizers = Some(entry[1] == "true");
                        }
                        _ => return Err(parse_failure(m, "unknown claim")),
                    }
                }
            }
            "source:" => {
                source = Some(crate::format::parsing::parse_groupoid_block(&mut cursor)?);
            }
            "result:" => {
                result = Some(crate::format::parsing::parse_groupoid_block(&mut cursor)?);
            }
            "group:" => {
                group = Some(crate::format::parsing::parse_group_block(&mut cursor)?.0);
            }
            "action:" => {}
            "objact:" => {
                obj_act = Some(numbers(n, &tokens[1..])?);
            }
            "arract:" => {
                arr_act = Some(numbers(n, &tokens[1..])?);
            }
            "bibundle:" => {}
            "total:" => {
                if tokens.len() != 2 {
                    return Err(parse_failure(n, "total entry must be a count"));
                }
                total = Some(
                    tokens[1]
                        .parse()
                        .map_err(|_| parse_failure(n, "total is not a number"))?,
                );
            }
            "sp:" => {
                sp = Some(numbers(n, &tokens[1..])?);
            }
            "tp:" => {
                tp = Some(numbers(n, &tokens[1..])?);
            }
            "lact:" => {
                for (m, entry) in cursor.entries() {
                    let v = numbers(m, &entry)?;
                    if v.len() != 3 {
                        return Err(parse_failure(m, "lact entry must be three numbers"));
                    }
                    lact.push((v[0], v[1], v[2]));
                }
            }
            "ract:" => {
                for (m, entry) in cursor.entries() {
                    let v = numbers(m, &entry)?;
                    if v.len() != 3 {
                        return Err(parse_failure(m, "ract entry must be three numbers"));
                    }
                    ract.push((v[0], v[1], v[2]));
                }
            }
            other => return Err(parse_failure(n, format!("unknown section `{other}`"))),
        }
    }
    let missing = |what: &str| parse_failure(0, format!("missing {what} section"));
    let source = source.ok_or_else(|| missing("source"))?;
    let result = result.ok_or_else(|| missing("result"))?;
    let source = source
        .charted
        .ok_or_else(|| parse_failure(0, "source block has no charts"))?;
    let result = result
        .charted
        .ok_or_else(|| parse_failure(0, "result block has no charts"))?;
    let sp = sp.ok_or_else(|| missing("sp"))?;
    let tp = tp.ok_or_else(|| missing("tp"))?;
    let total = total.ok_or_else(|| missing("total"))?;
    if sp.len() != total as usize || tp.len() != total as usize {
        return Err(parse_failure(0, "sp/tp lengths differ from total"));
    }
    Ok(CertFile {
        stage: stage.ok_or_else(|| missing("stage"))?,
        source,
        result,
        group: group.ok_or_else(|| missing("group"))?,
        obj_act: obj_act.ok_or_else(|| missing("objact"))?,
        arr_act: arr_act.ok_or_else(|| missing("arract"))?,
        sp,
        tp,
        lact,
        ract,
        claims,
    })
}

/// One named verification step.
#[derive(Clone, Debug)]
pub struct VerifyCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: Option<String>,
}

/// Outcome of re-running every check of a certificate from its raw tables.
#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub checks: Vec<VerifyCheck>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &'static str, passed: bool, detail: Option<String>) {
        self.checks.push(VerifyCheck { name, passed, detail });
    }
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            match (&c.detail, c.passed) {
                (Some(d), false) => writeln!(f, "{}: fail ({d})", c.name)?,
                (_, false) => writeln!(f, "{}: fail", c.name)?,
                _ => writeln!(f, "{}: pass", c.name)?,
            }
        }
        write!(f, "verdict: {}", if self.passed() { "pass" } else { "fail" })
    }
}

/// Re-runs every stored check: validity of both charted groupoids, the
/// action axioms, the claims, and — over the rebuilt semidirect product —
/// the bibundle conditions, two-sided principality, and the induced
/// coarse/stabilizer invariants.
pub fn verify_cert(cert: &CertFile) -> VerifyReport {
    let mut report = VerifyReport::default();
    let source_report = cert.source.validate();
    report.push(
        "source-valid",
        source_report.is_valid(),
        (!source_report.is_valid()).then(|| format!("{source_report:?}")),
    );
    let result_report = cert.result.validate();
    report.push(
        "result-valid",
        result_report.is_valid(),
        (!result_report.is_valid()).then(|| format!("{result_report:?}")),
    );
    if !report.passed() {
        return report;
    }
    let h = &cert.result.base;
    let expected_obj = (h.object_count() * cert.group.order()) as usize;
    let expected_arr = (h.arrow_count() * cert.group.order()) as usize;
    if cert.obj_act.len() != expected_obj || cert.arr_act.len() != expected_arr {
        report.push("action-valid", false, Some("action table lengths are wrong".into()));
        return report;
    }
    if cert.obj_act.iter().any(|&v| v >= h.object_count())
        || cert.arr_act.iter().any(|&v| v >= h.arrow_count())
    {
        report.push("action-valid", false, Some("action table out of range".into()));
        return report;
    }
    let action = AutAction::from_tables(
        cert.group.clone(),
        h.clone(),
        cert.obj_act.clone(),
        cert.arr_act.clone(),
    );
    match action.validate() {
        Ok(()) => report.push("action-valid", true, None),
        Err(e) => {
            report.push("action-valid", false, Some(e.to_string()));
            return report;
        }
    }
    if cert.claims.purely_ineffective {
        let pi = is_purely_ineffective(&cert.result);
        report.push("purely-ineffective", pi, None);
    }
    if let Some(order) = cert.claims.stabilizer_order {
        let mut ok = true;
        let mut detail = None;
        let mut reference = None;
        for x in h.objects() {
            let stab = h.stabilizer(x);
            if stab.group.order() != order {
                ok = false;
                detail = Some(format!(
                    "stabilizer at object {} has order {}",
                    x.0,
                    stab.group.order()
                ));
                break;
            }
            if let Some(abelian) = cert.claims.abelian_stabilizers {
                if stab.group.is_abelian() != abelian {
                    ok = false;
                    detail = Some(format!("stabilizer at object {} abelian mismatch", x.0));
                    break;
                }
            }
            match &reference {
                None => reference = Some(stab.group),
                Some(r) => {
                    if !are_isomorphic(r, &stab.group) {
                        ok = false;
                        detail = Some(format!(
                            "stabilizer at object {} has a different type",
                            x.0
                        ));
                        break;
                    }
                }
            }
        }
        report.push("stabilizers", ok, detail);
    }
    let product = match semidirect_group(&action) {
        Ok(p) => p,
        Err(e) => {
            report.push("product-rebuilt", false, Some(e.to_string()));
            return report;
        }
    };
    report.push("product-rebuilt", true, None);
    // Bounds before building the bibundle.
    let total = cert.sp.len() as u32;
    let product_arrows = product.groupoid.arrow_count();
    let source_arrows = cert.source.base.arrow_count();
    let in_bounds = cert.sp.iter().all(|&x| x < h.object_count())
        && cert
            .tp
            .iter()
            .all(|&y| y < cert.source.base.object_count())
        && cert
            .lact
            .iter()
            .all(|&(g, p, q)| g < product_arrows && p < total && q < total)
        && cert
            .ract
            .iter()
            .all(|&(p, hh, q)| hh < source_arrows && p < total && q < total);
    if !in_bounds {
        report.push("bibundle-valid", false, Some("bibundle table out of range".into()));
        return report;
    }
    let bibundle = Bibundle::from_tables(
        product.groupoid.clone(),
        cert.source.base.clone(),
        cert.sp.iter().map(|&x| Obj(x)).collect(),
        cert.tp.iter().map(|&y| Obj(y)).collect(),
        cert.lact.iter().map(|&(g, p, q)| ((Arr(g), p), q)).collect(),
        cert.ract.iter().map(|&(p, h2, q)| ((p, Arr(h2)), q)).collect(),
    );
    let bib_report = validate_bibundle(&bibundle);
    report.push(
        "bibundle-valid",
        bib_report.is_valid(),
        (!bib_report.is_valid()).then(|| {
            bib_report
                .violations
                .first()
                .map(|v| v.to_string())
                .or_else(|| bib_report.structural.first().cloned())
                .unwrap_or_default()
        }),
    );
    if !bib_report.is_valid() {
        return report;
    }
    let eq = is_equivalence(&bibundle);
    report.push("equivalence", eq.is_equivalence(), eq.witness.clone());
    let coarse = induced_coarse_map(&bibundle);
    report.push(
        "coarse-bijective",
        coarse.consistent && coarse.bijective,
        None,
    );
    let dom_q = bibundle.left.coarse_quotient();
    let cod_q = bibundle.right.coarse_quotient();
    let mut stab_ok = coarse.consistent && coarse.bijective;
    if stab_ok {
        for (c, class) in dom_q.classes.iter().enumerate() {
            let y = cod_q.representative(coarse.map[c]);
            match induced_stabilizer_hom(&bibundle, class[0], y) {
                Ok(psi) => {
                    if !psi.is_isomorphism {
                        stab_ok = false;
                    }
                }
                Err(_) => stab_ok = false,
            }
        }
    }
    report.push("stabilizers-preserved", stab_ok, None);
    report
}
