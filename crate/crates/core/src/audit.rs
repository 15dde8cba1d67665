//! The full battery of checks, as a deterministic report.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};
use thiserror::Error;

use crate::angle::PiFraction;
use crate::complex::{self, induced_link_map, relabel_check, relabeling_order, x1bar, x1bar_link, y_relabeling, ybar};
use crate::coset::{enumerate_with, permutation_image, verify_table, CosetTable, Presentation, Strategy};
use crate::embed::{self, check_partial, find_embeddings, search, search_trace, Mode, Outcome, SearchOptions};
use crate::garside::{
    self, conjugation_orbit, equals_mod_center, normal_form, verify_six_generator_presentation, Convention, GarsideNF,
    SixGeneratorFixture,
};
use crate::graph::{self, brady_link, girth, girth_exhaustive, is_automorphism, smooth, MetricGraph};
use crate::perm::{cycle_type, Perm4};
use crate::reps::{self, braid_perm, eval_matrix, pi_assignment, subgroup_closure, summarize, Matrix2};
use crate::words::{dictionary, parse_word, Alphabet, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AuditStatus {
    Pass,
    Fail,
    Inconclusive,
    /// An erratum settled by computation; carries the verdict.
    Resolved(String),
}

impl fmt::Display for AuditStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuditStatus::Pass => f.write_str("pass"),
            AuditStatus::Fail => f.write_str("fail"),
            AuditStatus::Inconclusive => f.write_str("inconclusive"),
            AuditStatus::Resolved(v) => write!(f, "resolved:{v}"),
        }
    }
}

impl FromStr for AuditStatus {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pass" => Ok(AuditStatus::Pass),
            "fail" => Ok(AuditStatus::Fail),
            "inconclusive" => Ok(AuditStatus::Inconclusive),
            _ => s
                .strip_prefix("resolved:")
                .map(|v| AuditStatus::Resolved(v.to_string()))
                .ok_or_else(|| format!("unknown status '{s}'")),
        }
    }
}

impl Serialize for AuditStatus {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AuditStatus {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn pass_if(ok: bool) -> AuditStatus {
    if ok {
        AuditStatus::Pass
    } else {
        AuditStatus::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub id: String,
    pub claim: String,
    pub status: AuditStatus,
    pub payload: Value,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub convention: Convention,
    pub cap: usize,
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    /// 0 if nothing failed or was inconclusive, 1 on any failure, else 2.
    pub fn exit_code(&self) -> i32 {
        if self.entries.iter().any(|e| e.status == AuditStatus::Fail) {
            1
        } else if self.entries.iter().any(|e| e.status == AuditStatus::Inconclusive) {
            2
        } else {
            0
        }
    }

    pub fn entry(&self, id: &str) -> Option<&AuditEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    /// JSON with every timing field zeroed, for byte comparison.
    pub fn to_json_without_timing(&self) -> String {
        let mut copy = self.clone();
        for e in &mut copy.entries {
            e.wall_time_ms = 0.0;
        }
        serde_json::to_string_pretty(&copy).unwrap()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("convention: {}\ncoset cap: {}\n", self.convention, self.cap);
        for e in &self.entries {
            out.push_str(&format!(
                "{:<34} {:<40} {:>9.2} ms  {}\n",
                e.id,
                e.status.to_string(),
                e.wall_time_ms,
                e.claim
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AuditConfig {
    pub convention: Convention,
    pub cap: usize,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig { convention: Convention::Left, cap: crate::coset::DEFAULT_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuditError {
    #[error("unknown check id '{0}'")]
    UnknownCheck(String),
}

type CheckFn = fn(&AuditConfig) -> (AuditStatus, Value);

const CHECKS: &[(&str, &str, CheckFn)] = &[
    ("b4-b-conj", "b = e^-1 a e with e = a b a^-1", check_b_conj),
    ("b4-center-x4-y3", "x^4 = y^3 = Delta^2 generates the center", check_center),
    ("b4-generator-identities", "a = x y x^-2 and b = x a^-1 c^-1 in B4/Z", check_generator_identities),
    (
        "b4-six-generator-presentation",
        "the ten relations of the six-generator presentation hold for e = aba^-1, f = cbc^-1, d = (ac)^-1 bac",
        check_six_generator,
    ),
    ("b4-x-orbit", "conjugation by x: a -> e -> c -> f -> a, b <-> d", check_x_orbit),
    ("b4-y-orbit", "conjugation by y: c -> f -> d -> c, a -> e -> b^ -> a", check_y_orbit),
    (
        "brady-link-girth",
        "the Brady link is an 8-cycle of length 8pi/3 with chords 2pi/3 and girth 2pi",
        check_brady_link,
    ),
    ("erratum-bhat", "which reading of b^ closes the y-orbit of a", check_erratum_bhat),
    ("erratum-c-xy", "c = x y^-1 versus c = x^-1 y", check_erratum_c),
    ("erratum-ef-definitions", "definitions of e and f making the six-generator presentation hold", check_erratum_ef),
    ("index-g0-ax", "G0 = <a, x>, i.e. [G0 : <xyx^-2, x>] = 1", check_index_g0_ax),
    ("index-g0-xy", "[G0 : <x, y>] = 1", check_index_g0_xy),
    ("index-g1", "G1 = <xyx^-2, y> has index 4 in G0", check_index_g1),
    ("index-sl2-pi-g1", "<S^2 T, S^3 T> has index 4 in SL2(Z)", check_index_sl2),
    (
        "link-non-embedding",
        "the Brady link admits no topological locally isometric embedding into the link of X1",
        check_non_embedding,
    ),
    (
        "perm-coset-cycle-types",
        "x and y act on the cosets of G1 as a 4-cycle and a 3-cycle, as in S4",
        check_perm_cycle_types,
    ),
    ("perm-stabilizer", "the image of G1 in S4 is the stabilizer of a point", check_perm_stabilizer),
    ("pi-g1-images", "xyx^-2 -> -T and y -> -ST", check_pi_g1_images),
    ("pi-homomorphism", "x -> S, y -> -ST kills every relator of G0", check_pi_homomorphism),
    ("pi-sl2-relations", "S^4 = 1, (ST)^3 = S^2 and -ST = S^-1 T", check_pi_sl2_relations),
    ("x1bar-link-condition", "the link of X1-bar has girth 2pi", check_x1bar_link_condition),
    (
        "x1bar-link-structure",
        "the link of X1-bar: 18 nodes, 27 arcs of pi/3, degrees 4,3,2 (six each), bipartite",
        check_x1bar_link_structure,
    ),
    (
        "y-symmetry",
        "y permutes the three wings of X1-bar, inducing an order-3 link automorphism without fixed nodes",
        check_y_symmetry,
    ),
    ("ybar1-link-condition", "the link of Y1-bar has girth 2pi", check_ybar1_link_condition),
];

pub fn check_ids() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

/// Runs the selected checks (all when `None`) concurrently; entries are
/// ordered by id.
pub fn run_audit(selection: Option<&[String]>, config: &AuditConfig) -> Result<AuditReport, AuditError> {
    let chosen: Vec<&(&str, &str, CheckFn)> = match selection {
        None => CHECKS.iter().collect(),
        Some(ids) => ids
            .iter()
            .map(|id| CHECKS.iter().find(|c| c.0 == id).ok_or_else(|| AuditError::UnknownCheck(id.clone())))
            .collect::<Result<_, _>>()?,
    };
    let mut entries: Vec<AuditEntry> = chosen
        .par_iter()
        .map(|(id, claim, check)| {
            let t = Instant::now();
            let (status, payload) = check(config);
            AuditEntry {
                id: id.to_string(),
                claim: claim.to_string(),
                status,
                payload,
                wall_time_ms: t.elapsed().as_secs_f64() * 1000.0,
            }
        })
        .collect();
    entries.sort_by(|a, b| a.id.cmp(&b.id));
    entries.dedup_by(|a, b| a.id == b.id);
    Ok(AuditReport { convention: config.convention, cap: config.cap, entries })
}

fn artin(s: &str) -> Word {
    dictionary::artin(s)
}

fn xy(s: &str) -> Word {
    dictionary::xy(s)
}

fn to_artin(w: &Word) -> Word {
    w.substitute(&dictionary::braid_names()).unwrap()
}

fn nf(w: &Word) -> GarsideNF {
    normal_form(w).unwrap()
}

fn corrected_fixture() -> SixGeneratorFixture {
    SixGeneratorFixture { d: artin(dictionary::D), e: artin("Aba"), f: artin("Cbc") }
}

fn check_six_generator(_: &AuditConfig) -> (AuditStatus, Value) {
    let entries = verify_six_generator_presentation(&SixGeneratorFixture::printed());
    let ok = entries.iter().all(|e| e.passed());
    (pass_if(ok), json!({ "entries": entries }))
}

fn check_erratum_ef(_: &AuditConfig) -> (AuditStatus, Value) {
    let printed = verify_six_generator_presentation(&SixGeneratorFixture::printed());
    let corrected = verify_six_generator_presentation(&corrected_fixture());
    let count = |v: &[garside::ClaimEntry]| v.iter().filter(|e| e.passed()).count();
    let verdict = match (count(&printed) == 10, count(&corrected) == 10) {
        (true, _) => AuditStatus::Resolved("printed definitions hold".into()),
        (false, true) => AuditStatus::Resolved("e = a^-1 b a, f = c^-1 b c".into()),
        (false, false) => AuditStatus::Fail,
    };
    let payload = json!({
        "printed": { "e": "a b a^-1", "f": "c b c^-1", "relations_holding": count(&printed) },
        "corrected": { "e": "a^-1 b a", "f": "c^-1 b c", "relations_holding": count(&corrected), "entries": corrected },
    });
    (verdict, payload)
}

fn check_b_conj(_: &AuditConfig) -> (AuditStatus, Value) {
    let a = artin("a");
    let b = artin("b");
    let holds = |e: &Word| nf(&e.inverse().concat(&a).concat(e)) == nf(&b);
    let printed = holds(&artin(dictionary::E));
    let corrected = holds(&artin("Aba"));
    (pass_if(printed), json!({ "with_e_printed": printed, "with_e_corrected": corrected }))
}

fn check_center(_: &AuditConfig) -> (AuditStatus, Value) {
    let x4 = to_artin(&xy("x^4"));
    let y3 = to_artin(&xy("y^3"));
    let (nx, ny) = (nf(&x4), nf(&y3));
    let delta2 = GarsideNF::delta_power(2);
    let central = garside::is_central(&x4).unwrap();
    let ok = nx == delta2 && ny == delta2 && central;
    (pass_if(ok), json!({ "nf_x4": nx.to_string(), "nf_y3": ny.to_string(), "central": central }))
}

/// Orbit tables, with the names e, f, d, b^ bound to candidate words.
struct OrbitSpec {
    conj_by: &'static str,
    seed: &'static str,
    cycle: &'static [&'static str],
}

const X_ORBITS: &[OrbitSpec] = &[
    OrbitSpec { conj_by: "x", seed: "a", cycle: &["a", "e", "c", "f"] },
    OrbitSpec { conj_by: "x", seed: "b", cycle: &["b", "d"] },
];
const Y_ORBITS: &[OrbitSpec] = &[
    OrbitSpec { conj_by: "y", seed: "c", cycle: &["c", "f", "d"] },
    OrbitSpec { conj_by: "y", seed: "a", cycle: &["a", "e", "b^"] },
];

fn reading(name: &str, corrected: bool) -> Word {
    match (name, corrected) {
        ("e", false) => artin(dictionary::E),
        ("f", false) => artin(dictionary::F),
        ("e", true) => artin("Aba"),
        ("f", true) => artin("Cbc"),
        ("d", _) => artin(dictionary::D),
        ("b^", _) => artin(dictionary::BHAT_LONG),
        ("x", _) => artin(dictionary::X),
        ("y", _) => artin(dictionary::Y),
        (other, _) => artin(other),
    }
}

fn orbit_realized(spec: &OrbitSpec, conv: Convention, corrected: bool) -> bool {
    let g = reading(spec.conj_by, corrected);
    let seed = reading(spec.seed, corrected);
    let n = spec.cycle.len();
    let Ok(orbit) = conjugation_orbit(&g, &seed, n, conv) else { return false };
    let expected: Vec<GarsideNF> =
        spec.cycle.iter().chain(std::iter::once(&spec.seed)).map(|s| nf(&reading(s, corrected))).collect();
    let period = orbit.iter().skip(1).position(|w| *w == orbit[0]).map(|k| k + 1);
    orbit == expected && period == Some(n)
}

fn check_orbits(specs: &[OrbitSpec], config: &AuditConfig) -> (AuditStatus, Value) {
    let mut realized_by = Vec::new();
    for conv in [Convention::Left, Convention::Right] {
        for corrected in [false, true] {
            if specs.iter().all(|s| orbit_realized(s, conv, corrected)) {
                realized_by.push(json!({
                    "convention": conv,
                    "e_f_reading": if corrected { "a^-1 b a, c^-1 b c" } else { "a b a^-1, c b c^-1" },
                }));
            }
        }
    }
    let periods: Vec<usize> = specs.iter().map(|s| s.cycle.len()).collect();
    let configured = realized_by.iter().any(|r| r["convention"] == json!(config.convention));
    let payload = json!({
        "periods": periods,
        "realized_by": realized_by,
        "configured_convention_realizes": configured,
        "b^": dictionary::BHAT_LONG,
    });
    (pass_if(!realized_by.is_empty()), payload)
}

fn check_x_orbit(config: &AuditConfig) -> (AuditStatus, Value) {
    check_orbits(X_ORBITS, config)
}

fn check_y_orbit(config: &AuditConfig) -> (AuditStatus, Value) {
    check_orbits(Y_ORBITS, config)
}

fn check_erratum_bhat(config: &AuditConfig) -> (AuditStatus, Value) {
    let y = artin(dictionary::Y);
    let a = artin("a");
    let orbit = conjugation_orbit(&y, &a, 3, config.convention).unwrap();
    let closes = orbit[3] == orbit[0];
    let candidates = [dictionary::BHAT_SHORT, dictionary::BHAT_LONG];
    let matches: Vec<&str> = candidates.iter().copied().filter(|c| nf(&artin(c)) == orbit[2]).collect();
    let payload = json!({
        "convention": config.convention,
        "orbit_closes": closes,
        "second_image_nf": orbit[2].to_string(),
        "candidates": candidates.iter().map(|c| json!({
            "word": c, "nf": nf(&artin(c)).to_string(), "exponent_sum": artin(c).exponent_sum(),
        })).collect::<Vec<_>>(),
    });
    match (closes, matches.as_slice()) {
        (true, [one]) => (AuditStatus::Resolved(one.to_string()), payload),
        _ => (AuditStatus::Inconclusive, payload),
    }
}

fn check_erratum_c(_: &AuditConfig) -> (AuditStatus, Value) {
    let c = artin("c");
    let printed = equals_mod_center(&c, &to_artin(&xy("xY"))).unwrap();
    let alternative = equals_mod_center(&c, &to_artin(&xy("Xy"))).unwrap();
    let payload = json!({ "c = x y^-1": printed, "c = x^-1 y": alternative });
    let status = match (printed, alternative) {
        (true, _) => AuditStatus::Resolved("c = x y^-1".into()),
        (false, true) => AuditStatus::Resolved("c = x^-1 y".into()),
        (false, false) => AuditStatus::Fail,
    };
    (status, payload)
}

fn check_generator_identities(_: &AuditConfig) -> (AuditStatus, Value) {
    let a_ok = equals_mod_center(&artin("a"), &to_artin(&xy("xyx^-2"))).unwrap();
    // b = x a^-1 c^-1 with every name read as an Artin word
    let b_ok = equals_mod_center(&artin("b"), &artin(dictionary::X).concat(&artin("AC"))).unwrap();
    (pass_if(a_ok && b_ok), json!({ "a = x y x^-2": a_ok, "b = x a^-1 c^-1": b_ok }))
}

fn index_check(group: Presentation, gens: &[&str], expected: usize, config: &AuditConfig) -> (AuditStatus, Value) {
    let alphabet: Alphabet = group.alphabet().clone();
    let subgens: Vec<Word> = gens.iter().map(|g| parse_word(g, &alphabet).unwrap()).collect();
    let run = |s: Strategy| enumerate_with(&group, &subgens, config.cap, s);
    match (run(Strategy::Hlt), run(Strategy::Felsch)) {
        (Ok(h), Ok(f)) => {
            let agree = h == f || (h.count() == f.count() && h.to_json() == f.to_json());
            let valid = verify_table(&group, &subgens, &h);
            let payload = json!({
                "subgroup": gens,
                "expected": expected,
                "count": h.count(),
                "hlt_defined": h.total_defined(),
                "felsch_defined": f.total_defined(),
                "strategies_agree": agree,
                "table": h.to_json(),
            });
            (pass_if(h.count() == expected && agree && valid), payload)
        }
        (h, f) => {
            let err = |r: &Result<CosetTable, _>| r.as_ref().err().map(|e: &crate::coset::CosetError| e.to_string());
            (
                AuditStatus::Inconclusive,
                json!({ "subgroup": gens, "expected": expected, "hlt_error": err(&h), "felsch_error": err(&f) }),
            )
        }
    }
}

fn check_index_g1(config: &AuditConfig) -> (AuditStatus, Value) {
    index_check(Presentation::g0(), &["xyx^-2", "y"], 4, config)
}

fn check_index_g0_xy(config: &AuditConfig) -> (AuditStatus, Value) {
    index_check(Presentation::g0(), &["x", "y"], 1, config)
}

fn check_index_g0_ax(config: &AuditConfig) -> (AuditStatus, Value) {
    index_check(Presentation::g0(), &["xyx^-2", "x"], 1, config)
}

fn check_index_sl2(config: &AuditConfig) -> (AuditStatus, Value) {
    index_check(Presentation::sl2z(), &["sst", "ssst"], 4, config)
}

fn check_pi_homomorphism(_: &AuditConfig) -> (AuditStatus, Value) {
    let report = reps::verify_matrix_homomorphism(&Presentation::g0(), &pi_assignment());
    let ok = report.iter().all(|r| r.status == garside::ClaimStatus::Pass);
    (pass_if(ok), json!({ "relators": report }))
}

fn check_pi_sl2_relations(_: &AuditConfig) -> (AuditStatus, Value) {
    let (s, t) = (Matrix2::S, Matrix2::T);
    let s4 = s.pow(4).unwrap();
    let st3 = s.mul(&t).unwrap().pow(3).unwrap();
    let s2 = s.pow(2).unwrap();
    let minus_st = s.mul(&t).unwrap().neg().unwrap();
    let sinv_t = s.inverse().unwrap().mul(&t).unwrap();
    let ok = s4 == Matrix2::IDENTITY && st3 == s2 && minus_st == sinv_t;
    let payload = json!({
        "S^4": s4, "(ST)^3": st3, "S^2": s2, "-ST": minus_st, "S^-1 T": sinv_t,
    });
    (pass_if(ok), payload)
}

fn check_pi_g1_images(_: &AuditConfig) -> (AuditStatus, Value) {
    let assign = pi_assignment();
    let g = eval_matrix(&xy("xyx^-2"), &assign).unwrap();
    let y = eval_matrix(&xy("y"), &assign).unwrap();
    let minus_t = Matrix2::T.neg().unwrap();
    let minus_st = Matrix2::S.mul(&Matrix2::T).unwrap().neg().unwrap();
    (pass_if(g == minus_t && y == minus_st), json!({ "xyx^-2": g, "y": y, "-T": minus_t, "-ST": minus_st }))
}

fn check_perm_stabilizer(config: &AuditConfig) -> (AuditStatus, Value) {
    let a = braid_perm(&parse_word("a", &Alphabet::new("abcdefxy").unwrap()).unwrap(), config.convention).unwrap();
    let y = braid_perm(&parse_word("y", &Alphabet::new("abcdefxy").unwrap()).unwrap(), config.convention).unwrap();
    let group = subgroup_closure(&[a, y]);
    let summary = summarize(&group);
    let ok = summary.order == 6 && summary.is_point_stabilizer;
    (pass_if(ok), json!({ "a": a.to_string(), "y": y.to_string(), "summary": summary }))
}

fn check_perm_cycle_types(config: &AuditConfig) -> (AuditStatus, Value) {
    let names = Alphabet::new("abcdefxy").unwrap();
    let perm_of = |s: &str| braid_perm(&parse_word(s, &names).unwrap(), config.convention).unwrap();
    let (px, py): (Perm4, Perm4) = (perm_of("x"), perm_of("y"));
    let g0 = Presentation::g0();
    let subgens = vec![xy("xyx^-2"), xy("y")];
    let table = match enumerate_with(&g0, &subgens, config.cap, Strategy::Hlt) {
        Ok(t) => t,
        Err(e) => return (AuditStatus::Inconclusive, json!({ "error": e.to_string() })),
    };
    let action = permutation_image(&table);
    let gens: Vec<char> = table.generators().iter().map(|g| g.symbol()).collect();
    let coset_type = |c: char| cycle_type(&action[gens.iter().position(|&g| g == c).unwrap()]);
    let s4_x = px.cycle_type();
    let s4_y = py.cycle_type();
    let (cx, cy) = (coset_type('x'), coset_type('y'));
    let ok = s4_x == cx && s4_y == cy && cx == vec![4] && cy == vec![3, 1];
    let payload = json!({
        "s4": { "x": px.cycles_string(), "y": py.cycles_string(), "x_type": s4_x, "y_type": s4_y },
        "cosets": { "x_type": cx, "y_type": cy },
    });
    (pass_if(ok), payload)
}

fn girth_pair(g: &MetricGraph) -> (Option<PiFraction>, Option<PiFraction>) {
    (girth(g), girth_exhaustive(g))
}

fn link_condition_check(c: &complex::TriComplex) -> (AuditStatus, Value) {
    let report = complex::check_link_condition(c);
    let exact = report.vertices.iter().all(|v| v.girth == Some(PiFraction::TWO_PI) && v.girth_exhaustive == v.girth);
    (pass_if(report.pass && exact), serde_json::to_value(&report).unwrap())
}

fn check_x1bar_link_condition(_: &AuditConfig) -> (AuditStatus, Value) {
    link_condition_check(&x1bar())
}

fn check_ybar1_link_condition(_: &AuditConfig) -> (AuditStatus, Value) {
    link_condition_check(&ybar(1))
}

/// Two-colouring by BFS from the first node; `None` if not bipartite.
fn bipartition(g: &MetricGraph) -> Option<(Vec<String>, Vec<String>)> {
    if !g.is_bipartite() {
        return None;
    }
    let mut colour: Vec<Option<bool>> = vec![None; g.node_count()];
    for s in 0..g.node_count() {
        if colour[s].is_some() {
            continue;
        }
        colour[s] = Some(false);
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &inc in g.incidences(u) {
                let w = g.across(inc);
                if colour[w].is_none() {
                    colour[w] = Some(!colour[u].unwrap());
                    queue.push_back(w);
                }
            }
        }
    }
    let part = |c: bool| (0..g.node_count()).filter(|&i| colour[i] == Some(c)).map(|i| g.name(i).to_string()).collect();
    Some((part(false), part(true)))
}

fn check_x1bar_link_structure(_: &AuditConfig) -> (AuditStatus, Value) {
    let link = x1bar_link();
    let degrees: BTreeMap<String, usize> =
        (0..link.node_count()).map(|i| (link.name(i).to_string(), link.degree(i))).collect();
    let mut census: BTreeMap<usize, usize> = BTreeMap::new();
    for d in degrees.values() {
        *census.entry(*d).or_default() += 1;
    }
    let all_third = link.arcs().iter().all(|a| a.len == PiFraction::THIRD);
    let expected_degree = |name: &str| match name.trim_end_matches(['+', '-']) {
        "a" | "e" | "B^" => 4,
        "t1" | "t2" | "t3" => 3,
        _ => 2,
    };
    let pattern = degrees.iter().all(|(n, &d)| d == expected_degree(n));
    let parts = bipartition(&link);
    let sign_split = parts.as_ref().is_some_and(|(p, q)| {
        let same = |v: &[String]| v.iter().all(|n| n.ends_with('+')) || v.iter().all(|n| n.ends_with('-'));
        same(p) && same(q)
    });
    let ok = link.node_count() == 18
        && link.arc_count() == 27
        && all_third
        && pattern
        && census == BTreeMap::from([(2, 6), (3, 6), (4, 6)])
        && parts.is_some();
    let payload = json!({
        "nodes": link.node_count(),
        "arcs": link.arc_count(),
        "all_arcs_pi_over_3": all_third,
        "degree_census": census,
        "degrees": degrees,
        "bipartite": parts.is_some(),
        "bipartition": parts,
        "parts_are_plus_versus_minus": sign_split,
    });
    (pass_if(ok), payload)
}

fn check_brady_link(_: &AuditConfig) -> (AuditStatus, Value) {
    let g = brady_link();
    let (g1, g2) = girth_pair(&g);
    let cycle: PiFraction = g.arcs().iter().filter(|a| a.len == PiFraction::THIRD).map(|a| a.len).sum();
    let degrees_three = g.degree_sequence().iter().all(|&d| d == 3);
    let ok = g1 == Some(PiFraction::TWO_PI)
        && g1 == g2
        && cycle == PiFraction::new(8, 3)
        && degrees_three
        && g.node_count() == 8;
    let payload = json!({
        "nodes": g.node_count(),
        "arcs": g.arc_count(),
        "hamiltonian_cycle_length": cycle,
        "girth_edge_deletion": g1,
        "girth_exhaustive": g2,
    });
    (pass_if(ok), payload)
}

fn check_y_symmetry(_: &AuditConfig) -> (AuditStatus, Value) {
    let x = x1bar();
    let sigma = y_relabeling();
    let complex_ok = relabel_check(&x, &sigma);
    let order = relabeling_order(&sigma);
    let link = x1bar_link();
    let map = induced_link_map(&link, &sigma).unwrap();
    let link_ok = is_automorphism(&link, &map);
    let fixed: Vec<&str> = (0..link.node_count()).filter(|&i| map[i] == i).map(|i| link.name(i)).collect();
    let mut power = map.clone();
    let mut link_order = 1;
    while power.iter().enumerate().any(|(i, &p)| i != p) {
        power = power.iter().map(|&p| map[p]).collect();
        link_order += 1;
    }
    let ok = complex_ok && order == 3 && link_ok && link_order == 3 && fixed.is_empty();
    let payload = json!({
        "relabeling": sigma,
        "complex_symmetry": complex_ok,
        "order": order,
        "link_automorphism": link_ok,
        "link_order": link_order,
        "fixed_link_nodes": fixed,
    });
    (pass_if(ok), payload)
}

fn check_non_embedding(_: &AuditConfig) -> (AuditStatus, Value) {
    let src = brady_link();
    let dst = smooth(&x1bar_link());
    let certs = find_embeddings(&src, &dst, Mode::All).unwrap();
    let y = induced_link_map(&dst, &y_relabeling()).unwrap();
    let trace = search_trace(&src, &dst, &[y]).unwrap();
    let leaves = trace.tree.leaves();
    let mut reasons: BTreeMap<String, usize> = BTreeMap::new();
    let mut successes = 0;
    let mut obstruction = None;
    for leaf in &leaves {
        match &leaf.outcome {
            Outcome::Pruned(p) => {
                *reasons.entry(p.reason.to_string()).or_default() += 1;
                let step = p.reason == embed::PruneReason::DistanceObstruction
                    && p.length == Some(PiFraction::THIRD)
                    && p.distance.is_none_or(|d| d >= PiFraction::new(2, 3));
                if step && obstruction.is_none() {
                    obstruction = Some(json!({ "assignment": leaf.assignment, "prune": p }));
                }
            }
            Outcome::Success(_) => successes += 1,
            Outcome::Children(_) => {}
        }
    }
    let node = |g: &MetricGraph, n: &str| g.node(n).unwrap();
    let pinned_case = SearchOptions {
        pinned: vec![(node(&src, "1"), node(&dst, "t1+")), (node(&src, "4"), node(&dst, "a-"))],
        ..Default::default()
    };
    let case_count = search(&src, &dst, &pinned_case).unwrap().certificates.len();
    let partial =
        check_partial(&src, &dst, &[("1", "t1+"), ("2", "e+"), ("3", "t2+"), ("5", "t1-"), ("6", "e-"), ("8", "t2-")])
            .unwrap();
    let payload = json!({
        "certificates": certs.len(),
        "example": certs.first().map(|c| c.to_json(&src, &dst)),
        "image_sets": image_sets(&certs, &dst),
        "trace": {
            "root_cases": trace.root_cases,
            "source_order": trace.source_order,
            "tree_nodes": trace.tree.size(),
            "leaves": leaves.len(),
            "success_leaves": successes,
            "pruned_by_reason": reasons,
            "obstruction_step": obstruction,
        },
        "case_1_to_t1+_4_to_a-": {
            "completions": case_count,
            "distance_t1+_a-": graph::distance(&dst, "t1+", "a-").unwrap(),
        },
        "partial_assignment_obstructions": partial,
    });
    (pass_if(certs.is_empty()), payload)
}

fn image_sets(certs: &[embed::EmbeddingCertificate], dst: &MetricGraph) -> Vec<Vec<String>> {
    let mut sets: Vec<Vec<String>> = certs
        .iter()
        .map(|c| {
            let mut v: Vec<String> = c.nodes.iter().map(|&n| dst.name(n).to_string()).collect();
            v.sort();
            v
        })
        .collect();
    sets.sort();
    sets.dedup();
    sets
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_sorted_and_unique() {
        let ids = check_ids();
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn status_round_trip() {
        for s in ["pass", "fail", "inconclusive", "resolved:c = x^-1 y"] {
            let st: AuditStatus = s.parse().unwrap();
            assert_eq!(st.to_string(), s);
        }
        assert!("maybe".parse::<AuditStatus>().is_err());
    }

    #[test]
    fn empty_selection() {
        let r = run_audit(Some(&[]), &AuditConfig::default()).unwrap();
        assert!(r.entries.is_empty());
        assert_eq!(r.exit_code(), 0);
        assert!(matches!(run_audit(Some(&["nope".into()]), &AuditConfig::default()), Err(AuditError::UnknownCheck(_))));
    }

    #[test]
    fn index_g1_alone() {
        let r = run_audit(Some(&["index-g1".into()]), &AuditConfig::default()).unwrap();
        assert_eq!(r.entries.len(), 1);
        assert_eq!(r.entries[0].status, AuditStatus::Pass);
        assert_eq!(r.entries[0].payload["count"], 4);
    }

    #[test]
    fn small_cap_is_inconclusive() {
        let config = AuditConfig { cap: 2, ..Default::default() };
        let r = run_audit(Some(&["index-g1".into()]), &config).unwrap();
        assert_eq!(r.entries[0].status, AuditStatus::Inconclusive);
        assert_eq!(r.exit_code(), 2);
    }
}
