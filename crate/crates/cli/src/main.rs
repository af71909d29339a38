//! `grpd`: batch front end for the finite groupoid calculus.
//!
//! One job per invocation. Exit codes separate mathematics from plumbing:
//! 0 means success or a positive verdict, 1 a mathematically negative
//! verdict (invalid axioms, inequivalence, a failed precondition, a failed
//! certificate), and 2 an input or size error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use grpd_core::bibundle::{compose, is_equivalence, validate_bibundle};
use grpd_core::cert::{
    cert_from_band, cert_from_frames, cert_from_presentation, cert_from_set_presentation,
    parse_cert, verify_cert, write_cert,
};
use grpd_core::charted::{
    effectivization, ineffective_stabilizers, is_effective, is_purely_ineffective,
    ChartedGroupoid,
};
use grpd_core::descent::{check_stack_property, glue, validate_descent, DescentError};
use grpd_core::format::{
    parse, write_bibundle_file, write_charted, GroupoidBlock, ParsedFile,
};
use grpd_core::group::automorphism_group;
use grpd_core::groupoid::FiniteGroupoid;
use grpd_core::presentation::{
    band_trivialization, frame_construction, present, present_trivial_center, PresentError,
};

#[derive(Parser)]
#[command(name = "grpd", version, about = "finite groupoid calculus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the certificate or result file here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the stack-property sampler.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Reject jobs whose derived constructions would exceed this many
    /// elements.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_size: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Check every axiom of a GRPD, GROUP, ACT, COVER, or DESC file.
    Validate { input: PathBuf },
    /// Quotient a charted groupoid by its ineffective stabilizers.
    Effectivize { input: PathBuf },
    /// Frame construction: desingularize a charted groupoid.
    Frames { input: PathBuf },
    /// Band trivialization of a purely ineffective charted groupoid.
    Band { input: PathBuf },
    /// Full presentation pipeline with an end-to-end certificate.
    Present {
        input: PathBuf,
        /// Also reduce to a set presentation (requires a trivial band center).
        #[arg(long)]
        set: bool,
    },
    /// Decide Morita equivalence of two groupoids.
    Equiv { left: PathBuf, right: PathBuf },
    /// Compose two bibundle files sharing their middle groupoid.
    Compose { first: PathBuf, second: PathBuf },
    /// Glue a descent datum into a bibundle.
    Glue { input: PathBuf },
    /// Check the stack property over a cover.
    Stackcheck {
        cover: PathBuf,
        target: PathBuf,
        /// Sample size outside the exhaustive bounds.
        #[arg(long, default_value_t = 32)]
        samples: usize,
    },
    /// Re-run all checks stored in a CERT v1 file.
    Verify { input: PathBuf },
}

enum Failure {
    /// Exit 2: could not compute.
    Input(String),
    /// Exit 1: computed, and the answer is no.
    Negative(String),
}

type JobOutcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{report}");
            ExitCode::from(0)
        }
        Err(Failure::Negative(report)) => {
            print!("{report}");
            ExitCode::from(1)
        }
        Err(Failure::Input(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn read_input(path: &Path) -> Result<ParsedFile, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_output(cli: &Cli, contents: &str) -> Result<String, Failure> {
    match &cli.out {
        None => Ok(String::new()),
        Some(path) => {
            fs::write(path, contents)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            Ok(format!("wrote {}\n", path.display()))
        }
    }
}

fn charted_input(path: &Path) -> Result<ChartedGroupoid, Failure> {
    match read_input(path)? {
        ParsedFile::Groupoids(blocks) if blocks.len() == 1 => match &blocks[0].charted {
            Some(c) => Ok(c.clone()),
            None => Err(Failure::Input(format!(
                "{}: charted groupoid required (charts:/effect: sections)",
                path.display()
            ))),
        },
        _ => Err(Failure::Input(format!(
            "{}: a single charted GRPD block is required",
            path.display()
        ))),
    }
}

fn groupoid_input(path: &Path) -> Result<FiniteGroupoid, Failure> {
    match read_input(path)? {
        ParsedFile::Groupoids(blocks) if blocks.len() == 1 => Ok(blocks[0].groupoid.clone()),
        _ => Err(Failure::Input(format!(
            "{}: a single GRPD block is required",
            path.display()
        ))),
    }
}

fn validated_charted(path: &Path) -> Result<ChartedGroupoid, Failure> {
    let charted = charted_input(path)?;
    let report = charted.validate();
    if !report.is_valid() {
        return Err(Failure::Negative(format!(
            "{}: invalid charted groupoid\n{:?}\n",
            path.display(),
            report
        )));
    }
    Ok(charted)
}

fn factorial(n: u64) -> u128 {
    (1..=n as u128).product::<u128>().max(1)
}

fn guard(cli: &Cli, what: &str, estimate: u128) -> Result<(), Failure> {
    if estimate > cli.max_size as u128 {
        return Err(Failure::Input(format!(
            "{what} would construct about {estimate} elements, above --max-size {}",
            cli.max_size
        )));
    }
    Ok(())
}

fn map_present_error(e: PresentError) -> Failure {
    match e {
        PresentError::InvalidInput(m) => Failure::Input(m),
        PresentError::Action(a) => Failure::Input(a.to_string()),
        PresentError::Bibundle(b) => Failure::Input(b.to_string()),
        // Unsatisfied mathematical hypotheses are negative verdicts.
        other => Failure::Negative(format!("{other}\n")),
    }
}

/// Orders of the largest stabilizer and of Aut(T), for the size guard.
fn band_size_bounds(g: &ChartedGroupoid) -> Result<(u64, u64), Failure> {
    let system = ineffective_stabilizers(g);
    let mut largest = 1u64;
    for x in g.base.objects() {
        largest = largest.max(system.fiber(x).group.order() as u64);
    }
    if largest > 64 {
        return Err(Failure::Input(format!(
            "stabilizer order {largest} exceeds the supported bound of 64"
        )));
    }
    let reference = g
        .base
        .objects()
        .next()
        .map(|x| system.fiber(x).group.clone());
    let aut = match reference {
        Some(t) => automorphism_group(&t).0.order() as u64,
        None => 1,
    };
    Ok((largest, aut))
}

fn run(cli: &Cli) -> JobOutcome {
    match &cli.command {
        Command::Validate { input } => run_validate(input),
        Command::Effectivize { input } => run_effectivize(cli, input),
        Command::Frames { input } => run_frames(cli, input),
        Command::Band { input } => run_band(cli, input),
        Command::Present { input, set } => run_present(cli, input, *set),
        Command::Equiv { left, right } => run_equiv(left, right),
        Command::Compose { first, second } => run_compose(cli, first, second),
        Command::Glue { input } => run_glue(cli, input),
        Command::Stackcheck {
            cover,
            target,
            samples,
        } => run_stackcheck(cli, cover, target, *samples),
        Command::Verify { input } => run_verify(input),
    }
}

fn validate_blocks(blocks: &[GroupoidBlock]) -> (String, bool) {
    let mut out = String::new();
    let mut ok = true;
    for (i, block) in blocks.iter().enumerate() {
        match &block.charted {
            Some(c) => {
                let report = c.validate();
                out.push_str(&format!(
                    "groupoid {i}: {} objects, {} arrows, chart size {}\n",
                    c.base.object_count(),
                    c.base.arrow_count(),
                    c.chart_size()
                ));
                if report.is_valid() {
                    out.push_str("all groupoid and chart axioms hold\n");
                } else {
                    ok = false;
                    out.push_str(&format!("{}", report.base));
                    for v in &report.charts {
                        out.push_str(&format!("chart axiom: {v}\n"));
                    }
                }
            }
            None => {
                let g = &block.groupoid;
                let report = g.validate();
                out.push_str(&format!(
                    "groupoid {i}: {} objects, {} arrows\n",
                    g.object_count(),
                    g.arrow_count()
                ));
                out.push_str(&format!("{report}"));
                ok = ok && report.is_valid();
            }
        }
    }
    (out, ok)
}

fn run_validate(input: &Path) -> JobOutcome {
    match read_input(input)? {
        ParsedFile::Groupoids(blocks) => {
            let (out, ok) = validate_blocks(&blocks);
            if ok {
                Ok(out)
            } else {
                Err(Failure::Negative(out))
            }
        }
        ParsedFile::Bibundle { blocks, bibundle } => {
            let (mut out, mut ok) = validate_blocks(&blocks);
            let report = validate_bibundle(&bibundle);
            out.push_str(&format!("bibundle: {} total points\n", bibundle.size()));
            out.push_str(&format!("{report}"));
            ok = ok && report.is_valid();
            if ok {
                Ok(out)
            } else {
                Err(Failure::Negative(out))
            }
        }
        ParsedFile::Group(k) => Ok(format!(
            "group of order {}: all group axioms hold\n",
            k.order()
        )),
        ParsedFile::Action(a) => {
            let mut out = format!(
                "action of a group of order {} on {} points ({:?})\n",
                a.group.order(),
                a.carrier,
                a.side
            );
            match a.validate() {
                Ok(()) => {
                    out.push_str("all action axioms hold\n");
                    Ok(out)
                }
                Err(e) => {
                    out.push_str(&format!("axiom: {e}\n"));
                    Err(Failure::Negative(out))
                }
            }
        }
        ParsedFile::Cover(c) => match c.validate() {
            Ok(()) => Ok(format!(
                "cover of {} points by {} parts: covering\n",
                c.base_size,
                c.parts.len()
            )),
            Err(e) => Err(Failure::Negative(format!("{e}\n"))),
        },
        ParsedFile::Descent(file) => {
            let report = validate_descent(&file.datum);
            let mut out = format!(
                "descent datum: {} parts over {} points\n",
                file.datum.cover.parts.len(),
                file.datum.cover.base_size
            );
            out.push_str(&format!("{report}"));
            if report.is_valid() {
                Ok(out)
            } else {
                Err(Failure::Negative(out))
            }
        }
    }
}

fn run_effectivize(cli: &Cli, input: &Path) -> JobOutcome {
    let charted = validated_charted(input)?;
    let (eff, p) = effectivization(&charted);
    let mut out = format!(
        "effectivization: {} arrows -> {} classes\n",
        charted.base.arrow_count(),
        eff.base.arrow_count()
    );
    out.push_str(&format!(
        "class map bijective: {}\npurely ineffective: {}\neffective: {}\n",
        p.is_bijective(),
        is_purely_ineffective(&charted),
        is_effective(&charted)
    ));
    out.push_str(&write_output(cli, &write_charted(&eff))?);
    Ok(out)
}

fn run_frames(cli: &Cli, input: &Path) -> JobOutcome {
    let charted = validated_charted(input)?;
    let n = charted.chart_size() as u64;
    let nf = factorial(n);
    guard(
        cli,
        "frame construction",
        (charted.base.arrow_count() as u128) * nf * nf
            + (charted.base.object_count() as u128) * nf,
    )?;
    let fc = frame_construction(&charted).map_err(map_present_error)?;
    let mut out = format!(
        "frames: {} frames, {} arrows upstairs\n",
        fc.frames.len(),
        fc.charted.base.arrow_count()
    );
    out.push_str(&format!(
        "purely ineffective: {}\npullback isomorphism: {}\nquotient equivalence: {}\n",
        fc.purely_ineffective,
        fc.pullback_iso,
        fc.quotient.equivalence.is_equivalence()
    ));
    let ok =
        fc.purely_ineffective && fc.pullback_iso && fc.quotient.equivalence.is_equivalence();
    let cert = cert_from_frames(&charted, &fc);
    out.push_str(&write_output(cli, &write_cert(&cert))?);
    if ok {
        Ok(out)
    } else {
        Err(Failure::Negative(out))
    }
}

fn run_band(cli: &Cli, input: &Path) -> JobOutcome {
    let charted = validated_charted(input)?;
    let (_, aut) = band_size_bounds(&charted)?;
    guard(
        cli,
        "band trivialization",
        (charted.base.arrow_count() as u128) * (aut as u128) * (aut as u128)
            + (charted.base.object_count() as u128) * (aut as u128),
    )?;
    let band = band_trivialization(&charted, None).map_err(map_present_error)?;
    let mut out = format!(
        "band: T of order {}, Z(T) of order {}, Aut(T) of order {}\n",
        band.band_group.order(),
        band.center_group.order(),
        band.aut_group.order()
    );
    out.push_str(&format!(
        "torsor points: {}\nstabilizers equal centers: {}\ntrivialization laws: {}\nquotient equivalence: {}\n",
        band.iso_points.len(),
        band.stabilizers_equal_center,
        band.checks.all_hold(),
        band.quotient.equivalence.is_equivalence()
    ));
    let ok = band.stabilizers_equal_center
        && band.checks.all_hold()
        && band.quotient.equivalence.is_equivalence();
    let cert = cert_from_band(&charted, &band);
    out.push_str(&write_output(cli, &write_cert(&cert))?);
    if ok {
        Ok(out)
    } else {
        Err(Failure::Negative(out))
    }
}

fn run_present(cli: &Cli, input: &Path, set: bool) -> JobOutcome {
    let charted = validated_charted(input)?;
    let n = charted.chart_size() as u64;
    let (_, aut) = band_size_bounds(&charted)?;
    let nf = factorial(n);
    let k_bound = nf * aut as u128;
    guard(
        cli,
        "presentation",
        (charted.base.arrow_count() as u128) * k_bound * k_bound,
    )?;
    if set {
        let sp = present_trivial_center(&charted).map_err(map_present_error)?;
        let mut out = String::new();
        for line in &sp.certificate.transcript {
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&format!(
            "set presentation: {} points, acting group of order {}\n",
            sp.points,
            sp.action.group.order()
        ));
        out.push_str(&format!(
            "translation equivalence: {}\n",
            sp.equivalence.is_equivalence()
        ));
        let ok = sp.equivalence.is_equivalence();
        let cert = cert_from_set_presentation(&sp);
        out.push_str(&write_output(cli, &write_cert(&cert))?);
        return if ok { Ok(out) } else { Err(Failure::Negative(out)) };
    }
    let cert = present(&charted).map_err(map_present_error)?;
    let mut out = String::new();
    for line in &cert.transcript {
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(&format!(
        "verdict: equivalence = {}, purely ineffective = {}, coarse bijective = {}, stabilizers preserved = {}\n",
        cert.equivalence.is_equivalence(),
        cert.purely_ineffective,
        cert.coarse_bijective,
        cert.stabilizers_preserved
    ));
    let ok = cert.equivalence.is_equivalence()
        && cert.purely_ineffective
        && cert.coarse_bijective
        && cert.stabilizers_preserved;
    let file = cert_from_presentation(&cert);
    out.push_str(&write_output(cli, &write_cert(&file))?);
    if ok {
        Ok(out)
    } else {
        Err(Failure::Negative(out))
    }
}

fn run_equiv(left: &Path, right: &Path) -> JobOutcome {
    let g = groupoid_input(left)?;
    let h = groupoid_input(right)?;
    for (path, k) in [(left, &g), (right, &h)] {
        let report = k.validate();
        if !report.is_valid() {
            return Err(Failure::Negative(format!(
                "{}: invalid groupoid\n{report}",
                path.display()
            )));
        }
    }
    let w = grpd_core::bibundle::decide_weak_equivalence(&g, &h);
    let mut out = format!("coarse classes: {} vs {}\n", w.g_classes, w.h_classes);
    if w.equivalent {
        out.push_str("equivalent: yes\n");
        if let Some(b) = &w.bibundle {
            out.push_str(&format!(
                "witness bibundle: {} total points, two-sided principal: {}\n",
                b.size(),
                is_equivalence(b).is_equivalence()
            ));
        }
        Ok(out)
    } else {
        out.push_str(&format!("equivalent: no ({})\n", w.reason.unwrap_or_default()));
        Err(Failure::Negative(out))
    }
}

fn run_compose(cli: &Cli, first: &Path, second: &Path) -> JobOutcome {
    let p = match read_input(first)? {
        ParsedFile::Bibundle { bibundle, .. } => bibundle,
        _ => {
            return Err(Failure::Input(format!(
                "{}: a bibundle file is required",
                first.display()
            )))
        }
    };
    let q = match read_input(second)? {
        ParsedFile::Bibundle { bibundle, .. } => bibundle,
        _ => {
            return Err(Failure::Input(format!(
                "{}: a bibundle file is required",
                second.display()
            )))
        }
    };
    for (path, b) in [(first, &p), (second, &q)] {
        let report = validate_bibundle(b);
        if !report.is_valid() {
            return Err(Failure::Negative(format!(
                "{}: invalid bibundle\n{report}",
                path.display()
            )));
        }
    }
    guard(cli, "composition", p.size() as u128 * q.size() as u128)?;
    let composite =
        compose(&p, &q).map_err(|e| Failure::Input(format!("cannot compose: {e}")))?;
    let report = validate_bibundle(&composite);
    let mut out = format!(
        "composite: {} total points ({} x {} before quotient)\n",
        composite.size(),
        p.size(),
        q.size()
    );
    out.push_str(&format!("valid: {}\n", report.is_valid()));
    out.push_str(&write_output(cli, &write_bibundle_file(&composite))?);
    if report.is_valid() {
        Ok(out)
    } else {
        Err(Failure::Negative(out))
    }
}

fn run_glue(cli: &Cli, input: &Path) -> JobOutcome {
    let file = match read_input(input)? {
        ParsedFile::Descent(d) => d,
        _ => {
            return Err(Failure::Input(format!(
                "{}: a DESC v1 file is required",
                input.display()
            )))
        }
    };
    let total: u128 = file.datum.local.iter().map(|b| b.size() as u128).sum();
    guard(cli, "gluing", total)?;
    match glue(&file.datum) {
        Ok(bundle) => {
            let mut out = format!(
                "glued bundle: {} total points over {} base points\n",
                bundle.size(),
                file.datum.cover.base_size
            );
            out.push_str(&write_output(cli, &write_bibundle_file(&bundle))?);
            Ok(out)
        }
        Err(DescentError::CocycleViolation {
            alpha,
            beta,
            gamma,
            point,
        }) => Err(Failure::Negative(format!(
            "refused: cocycle violated on triple ({alpha}, {beta}, {gamma}) at point {point}\n"
        ))),
        Err(e) => Err(Failure::Negative(format!("refused: {e}\n"))),
    }
}

fn run_stackcheck(cli: &Cli, cover: &Path, target: &Path, samples: usize) -> JobOutcome {
    let cover = match read_input(cover)? {
        ParsedFile::Cover(c) => c,
        _ => {
            return Err(Failure::Input(format!(
                "{}: a COVER v1 file is required",
                cover.display()
            )))
        }
    };
    let g = groupoid_input(target)?;
    let report = g.validate();
    if !report.is_valid() {
        return Err(Failure::Negative(format!(
            "invalid target groupoid\n{report}"
        )));
    }
    // Data-count estimate: per point, at most |G₀| · out-degree^(parts-1).
    let mut estimate: u128 = 1;
    let out_degree = g
        .objects()
        .map(|o| g.arrows_from(o).count())
        .max()
        .unwrap_or(1) as u128;
    for x in 0..cover.base_size {
        let parts = cover.parts_containing(x).len() as u32;
        let per_point =
            (g.object_count() as u128) * out_degree.pow(parts.saturating_sub(1));
        estimate = estimate.saturating_mul(per_point.max(1));
    }
    guard(cli, "stack check", estimate)?;
    let stack = check_stack_property(&cover, &g, cli.seed, samples)
        .map_err(|e| Failure::Input(e.to_string()))?;
    let out = format!("{stack}\n");
    if stack.passed() {
        Ok(out)
    } else {
        Err(Failure::Negative(out))
    }
}

fn run_verify(input: &Path) -> JobOutcome {
    let text = fs::read_to_string(input)
        .map_err(|e| Failure::Input(format!("{}: {e}", input.display())))?;
    let cert = parse_cert(&text)
        .map_err(|e| Failure::Input(format!("{}: {e}", input.display())))?;
    let report = verify_cert(&cert);
    let out = format!("stage: {}\n{report}\n", cert.stage);
    if report.passed() {
        Ok(out)
    } else {
        Err(Failure::Negative(out))
    }
}
