//! Acceptance gate for the extraction pipeline.
//!
//! One test per release criterion. Each prints a single `[PASS] criterion N`
//! line on success so the gate can be read off the test output; a failure
//! carries enough context to see which guarantee broke and where.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use apkdeps_core::finalize::{dedup_entries, resolve_conflicts};
use apkdeps_core::keywords::{DependencyClass, KeywordTable};
use apkdeps_core::metrics::{self, EvaluationPair};
use apkdeps_core::model::{
    classify_version, compare_versions, Coordinate, ModuleId, SourceLocation,
};
use apkdeps_core::resolve::{ExcludedItem, LabelEntry, SourceKind};
use apkdeps_core::{extract_project, ExtractOptions, ExtractionReport};

use common::{EQUAL_VERSION_PAIRS, ORDERED_VERSIONS};

// ─── Fixture plumbing ───────────────────────────────────────────────────────

fn fixture_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// Sorted `(name, dir)` list for one fixture family.
fn fixture_dirs(family: &str) -> Vec<(String, PathBuf)> {
    let base = fixture_root().join(family);
    let mut out: Vec<(String, PathBuf)> = fs::read_dir(&base)
        .unwrap_or_else(|e| panic!("missing fixture family {}: {e}", base.display()))
        .map(|entry| entry.unwrap().path())
        .filter(|p| p.is_dir())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), p))
        .collect();
    out.sort();
    out
}

fn extract_fixture(dir: &Path) -> ExtractionReport {
    extract_project(&dir.join("project"), &ExtractOptions::default())
        .unwrap_or_else(|e| panic!("extraction failed for {}: {e}", dir.display()))
}

fn golden_set(dir: &Path) -> BTreeSet<String> {
    let path = dir.join("golden.txt");
    let text = fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("missing golden {}: {e}", path.display()));
    metrics::parse_golden(&text)
}

/// Runs one fixture family and returns (fixture count, total label count),
/// panicking with a diff on the first mismatching label set.
fn check_fixture_family(family: &str) -> (usize, usize) {
    let dirs = fixture_dirs(family);
    assert!(!dirs.is_empty(), "no fixtures found under {family}/");
    let mut total_labels = 0;
    for (name, dir) in &dirs {
        let report = extract_fixture(dir);
        let predicted = report.label_set();
        let golden = golden_set(dir);
        if predicted != golden {
            let missing: Vec<_> = golden.difference(&predicted).cloned().collect();
            let extra: Vec<_> = predicted.difference(&golden).cloned().collect();
            panic!(
                "{family}/{name}: label set mismatch\n  missing from output: {missing:?}\n  \
                 unexpected in output: {extra:?}\n  full output: {:?}",
                report.lines()
            );
        }
        total_labels += golden.len();
    }
    (dirs.len(), total_labels)
}

// ─── Criterion 1: declaration-pattern coverage ──────────────────────────────

#[test]
fn criterion_1_declaration_patterns() {
    let started = Instant::now();
    let (fixtures, labels) = check_fixture_family("patterns");
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(5),
        "pattern corpus took {elapsed:?}, budget is 5s"
    );
    println!(
        "[PASS] criterion 1: declaration patterns — {fixtures}/{fixtures} fixture label sets \
         exact ({labels} labels) in {:.2}s",
        elapsed.as_secs_f64()
    );
}

// ─── Criterion 2: keyword taxonomy ──────────────────────────────────────────

/// Configuration keywords that pull a dependency into the shipped APK.
/// Restated independently here; the gate fails if the table drifts.
const EXPECTED_INCLUDE: [&str; 9] = [
    "withAnalyticsImplementation",
    "natives",
    "api",
    "compile",
    "androidImplementation",
    "implementation",
    "releaseImplementation",
    "releaseCompile",
    "coreLibraryDesugaring",
];

/// Keywords whose dependencies never reach the APK (test, tooling,
/// annotation-processing and lint configurations).
const EXPECTED_EXCLUDE: [&str; 21] = [
    "testImplementation",
    "androidTestImplementation",
    "Kapt",
    "compileOnly",
    "debugImplementation",
    "androidTestApt",
    "annotationProcessor",
    "testApi",
    "apt",
    "jnaForTest",
    "retrolambdaConfig",
    "detektPlugins",
    "debugcompile",
    "androidTestApi",
    "androidTestUtil",
    "errorprone",
    "ksp",
    "kaptAndroidTest",
    "testAnnotationProcessor",
    "ktlint",
    "androidTestAnnotationProcessor",
];

/// Flavor-conditional keywords and the build-variant prefix each one names.
const EXPECTED_VARIANT: [(&str, &str); 15] = [
    ("PlayStoreImplementation", "PlayStore"),
    ("nightlyImplementation", "nightly"),
    ("gplayImplementation", "gplay"),
    ("playImplementation", "play"),
    ("largeImplementation", "large"),
    ("playstoreImplementation", "playstore"),
    ("amazonImplementation", "amazon"),
    ("githubImplementation", "github"),
    ("pureImplementation", "pure"),
    ("prodImplementation", "prod"),
    ("betaImplementation", "beta"),
    ("alphaImplementation", "alpha"),
    ("devImplementation", "dev"),
    ("customImplementation", "custom"),
    ("appengineSdk", "appengine"),
];

#[test]
fn criterion_2_keyword_taxonomy() {
    let table = KeywordTable::default();
    let no_variants = BTreeSet::new();

    for kw in EXPECTED_INCLUDE {
        let class = table.classify(kw, &no_variants);
        assert_eq!(class.class, DependencyClass::Include, "{kw} must be INCLUDE");
        assert!(class.known, "{kw} must be a known keyword");
    }
    for kw in EXPECTED_EXCLUDE {
        let class = table.classify(kw, &no_variants);
        assert_eq!(class.class, DependencyClass::Exclude, "{kw} must be EXCLUDE");
        assert!(class.known, "{kw} must be a known keyword");
    }
    for (kw, prefix) in EXPECTED_VARIANT {
        let class = table.classify(kw, &no_variants);
        assert_eq!(class.class, DependencyClass::Variant, "{kw} must be VARIANT");
        assert_eq!(
            class.variant_prefix.as_deref(),
            Some(prefix),
            "{kw} must carry prefix {prefix}"
        );
        assert!(class.known, "{kw} must be a known keyword");
    }

    // classpath feeds the build process, never the APK.
    let classpath = table.classify("classpath", &no_variants);
    assert_eq!(classpath.class, DependencyClass::Exclude);
    assert!(classpath.known);

    // Decomposition law: `<flavor><Implementation|Api|Compile>` classifies as
    // a variant exactly when the flavor is declared (or when no flavor
    // information exists and the prefix is lowercase-led).
    let table_keys: BTreeSet<&str> = EXPECTED_INCLUDE
        .iter()
        .copied()
        .chain(EXPECTED_EXCLUDE)
        .chain(EXPECTED_VARIANT.iter().map(|(k, _)| *k))
        .collect();
    let mut rng = StdRng::seed_from_u64(0x5EED_2);
    let syllables = ["zor", "qua", "vex", "mi", "lund", "tev", "oss", "kra"];
    let mut checked = 0;
    while checked < 300 {
        let mut flavor = String::new();
        for _ in 0..rng.gen_range(2..4usize) {
            flavor.push_str(syllables[rng.gen_range(0..syllables.len())]);
        }
        let base = ["Implementation", "Api", "Compile"][rng.gen_range(0..3usize)];
        let keyword = format!("{flavor}{base}");
        if table_keys.contains(keyword.as_str()) {
            continue;
        }

        let declared: BTreeSet<String> = [flavor.clone()].into_iter().collect();
        let hit = table.classify(&keyword, &declared);
        assert_eq!(hit.class, DependencyClass::Variant, "{keyword} with declared flavor");
        assert_eq!(hit.variant_prefix.as_deref(), Some(flavor.as_str()));
        assert!(hit.known);

        let other: BTreeSet<String> = ["somethingelse".to_string()].into_iter().collect();
        let miss = table.classify(&keyword, &other);
        assert_eq!(miss.class, DependencyClass::Exclude, "{keyword} with foreign flavor set");
        assert!(!miss.known, "{keyword} must surface as unknown");

        let open = table.classify(&keyword, &no_variants);
        assert_eq!(open.class, DependencyClass::Variant, "{keyword} with no flavor info");
        assert!(open.known);

        // Uppercase-led prefixes are only trusted when declared.
        let upper = format!("Zumba{base}");
        let upper_open = table.classify(&upper, &no_variants);
        assert_eq!(upper_open.class, DependencyClass::Exclude);
        assert!(!upper_open.known);

        checked += 1;
    }

    println!(
        "[PASS] criterion 2: keyword taxonomy — 9 include + 21 exclude + 15 variant entries \
         verified, decomposition law over {checked} generated flavors"
    );
}

// ─── Criterion 3: version comparator and conflict algebra ───────────────────

fn random_version(rng: &mut StdRng) -> String {
    let words = [
        "alpha", "beta", "rc", "dev", "snapshot", "SNAPSHOT", "release", "ga", "final", "RC",
        "preview", "m1", "Beta",
    ];
    let seps = ['.', '-', '_', '+'];
    let parts = rng.gen_range(1..=5usize);
    let mut out = String::new();
    for i in 0..parts {
        if i > 0 {
            out.push(seps[rng.gen_range(0..seps.len())]);
        }
        if i == 0 || rng.gen_bool(0.7) {
            let n: u32 = rng.gen_range(0..30);
            if rng.gen_bool(0.1) {
                out.push_str(&format!("{n:03}"));
            } else {
                out.push_str(&n.to_string());
            }
        } else {
            out.push_str(words[rng.gen_range(0..words.len())]);
        }
    }
    out
}

#[test]
fn criterion_3_version_comparator_laws() {
    use std::cmp::Ordering;

    // Frozen hand-built reference chain: every earlier entry is strictly
    // smaller, and the listed synonym pairs compare equal.
    for i in 0..ORDERED_VERSIONS.len() {
        for j in (i + 1)..ORDERED_VERSIONS.len() {
            let (a, b) = (ORDERED_VERSIONS[i], ORDERED_VERSIONS[j]);
            assert_eq!(compare_versions(a, b), Ordering::Less, "{a} must sort below {b}");
            assert_eq!(compare_versions(b, a), Ordering::Greater, "{b} must sort above {a}");
        }
    }
    for (a, b) in EQUAL_VERSION_PAIRS {
        assert_eq!(compare_versions(a, b), Ordering::Equal, "{a} must equal {b}");
    }

    // Order laws over generated strings.
    let mut rng = StdRng::seed_from_u64(0x5EED_3);
    let pool: Vec<String> = (0..10_000).map(|_| random_version(&mut rng)).collect();
    for v in &pool {
        assert_eq!(compare_versions(v, v), Ordering::Equal, "reflexivity on {v}");
    }
    for _ in 0..20_000 {
        let a = &pool[rng.gen_range(0..pool.len())];
        let b = &pool[rng.gen_range(0..pool.len())];
        assert_eq!(
            compare_versions(a, b),
            compare_versions(b, a).reverse(),
            "antisymmetry on {a} / {b}"
        );
    }
    for _ in 0..10_000 {
        let mut triple = [
            pool[rng.gen_range(0..pool.len())].as_str(),
            pool[rng.gen_range(0..pool.len())].as_str(),
            pool[rng.gen_range(0..pool.len())].as_str(),
        ];
        // Transitivity: after sorting with the comparator the extremes must
        // agree with it, in every rotation of the triple.
        for _ in 0..3 {
            triple.rotate_left(1);
            let (a, b, c) = (triple[0], triple[1], triple[2]);
            if compare_versions(a, b) != Ordering::Greater
                && compare_versions(b, c) != Ordering::Greater
            {
                assert_ne!(
                    compare_versions(a, c),
                    Ordering::Greater,
                    "transitivity broken on {a} <= {b} <= {c}"
                );
            }
        }
    }

    // Conflict algebra over generated entry lists.
    let groups = ["com.one", "org.two"];
    let artifacts = ["alpha-lib", "beta-lib", "gamma"];
    let versions = [
        Some("1.0"),
        Some("1.1"),
        Some("2.0-SNAPSHOT"),
        Some("2.0"),
        Some("1.+"),
        Some("0.9"),
        Some("${missing}"),
        None,
    ];
    let mut algebra_cases = 0;
    for case in 0..1_000u64 {
        let mut case_rng = StdRng::seed_from_u64(0xA15E_B000 + case);
        let len = case_rng.gen_range(0..12usize);
        let input: Vec<LabelEntry> = (0..len)
            .map(|i| {
                let version = versions[case_rng.gen_range(0..versions.len())];
                LabelEntry {
                    coordinate: Coordinate {
                        group: groups[case_rng.gen_range(0..groups.len())].to_string(),
                        artifact: artifacts[case_rng.gen_range(0..artifacts.len())].to_string(),
                        version: version.map(str::to_string),
                        status: classify_version(version),
                        classifier: None,
                    },
                    keyword: "implementation".to_string(),
                    origin_module: ModuleId::new(if i % 2 == 0 { ":app" } else { ":lib" }),
                    source: SourceKind::Remote,
                    location: SourceLocation::new("app/build.gradle", i + 1),
                    other_origins: Vec::new(),
                }
            })
            .collect();

        // Deduplication: idempotent, identity-preserving, key-unique.
        let once = dedup_entries(input.clone());
        let twice = dedup_entries(once.clone());
        assert_eq!(once, twice, "dedup must be idempotent (case {case})");
        let input_ids: BTreeSet<_> = input
            .iter()
            .map(|e| (e.coordinate.group.clone(), e.coordinate.artifact.clone(), e.coordinate.version.clone()))
            .collect();
        let out_ids: Vec<_> = once
            .iter()
            .map(|e| (e.coordinate.group.clone(), e.coordinate.artifact.clone(), e.coordinate.version.clone()))
            .collect();
        assert_eq!(out_ids.len(), input_ids.len(), "dedup key coverage (case {case})");
        assert!(out_ids.iter().all(|k| input_ids.contains(k)));

        // Conflict resolution: one entry per (group, artifact); the survivor
        // carries the highest concrete version present in its bucket.
        let mut entries = once.clone();
        let mut excluded: Vec<ExcludedItem> = Vec::new();
        resolve_conflicts(&mut entries, &mut excluded);

        let mut pairs = BTreeSet::new();
        for e in &entries {
            assert!(
                pairs.insert((e.coordinate.group.clone(), e.coordinate.artifact.clone())),
                "duplicate pair survived conflict resolution (case {case})"
            );
        }

        let mut buckets: BTreeMap<(String, String), Vec<&LabelEntry>> = BTreeMap::new();
        for e in &once {
            buckets
                .entry((e.coordinate.group.clone(), e.coordinate.artifact.clone()))
                .or_default()
                .push(e);
        }
        assert_eq!(entries.len(), buckets.len(), "one survivor per pair (case {case})");
        let dropped: usize = buckets.values().map(|b| b.len() - 1).sum();
        assert_eq!(
            excluded.iter().filter(|x| x.reason == "version-conflict").count(),
            dropped,
            "every loser must be recorded (case {case})"
        );

        for winner in &entries {
            let key = (winner.coordinate.group.clone(), winner.coordinate.artifact.clone());
            let bucket = &buckets[&key];
            assert!(
                bucket.iter().any(|e| e.coordinate == winner.coordinate),
                "winner must come from the input (case {case})"
            );
            let concrete: Vec<&str> = bucket
                .iter()
                .filter(|e| e.coordinate.version.is_some() && e.coordinate.status.is_concrete())
                .map(|e| e.coordinate.version.as_deref().unwrap())
                .collect();
            if !concrete.is_empty() {
                let best = concrete
                    .iter()
                    .copied()
                    .max_by(|a, b| compare_versions(a, b))
                    .unwrap();
                let got = winner.coordinate.version.as_deref().unwrap_or("<none>");
                assert!(
                    winner.coordinate.status.is_concrete()
                        && compare_versions(got, best) == Ordering::Equal,
                    "winner {got} must match highest concrete version {best} (case {case})"
                );
            } else if bucket.iter().any(|e| e.coordinate.version.is_some()) {
                assert!(
                    winner.coordinate.version.is_some(),
                    "versioned candidates must beat versionless ones (case {case})"
                );
            }
        }
        algebra_cases += 1;
    }

    println!(
        "[PASS] criterion 3: version ordering — laws over 10000 generated strings, 30-entry \
         reference chain intact, conflict algebra over {algebra_cases} entry sets"
    );
}

// ─── Criterion 4: module graph and structural behavior ──────────────────────

#[test]
fn criterion_4_structural_fixtures() {
    let (fixtures, labels) = check_fixture_family("structural");

    // The label sets above prove inclusion; these spot checks prove the
    // *reasons* on the other side of the fence.
    let base = fixture_root().join("structural");

    let wear = extract_fixture(&base.join("wear-exclusion"));
    assert!(
        wear.excluded
            .iter()
            .any(|x| x.reason == "wearApp" && x.text.contains("wearable")),
        "wear module payload must be excluded via the wearApp edge: {:?}",
        wear.excluded
    );

    let pruned = extract_fixture(&base.join("reachability-pruning"));
    assert!(
        pruned
            .excluded
            .iter()
            .any(|x| x.reason == "unreachable" && x.text.contains("commons-io")),
        "orphan module payload must be excluded as unreachable: {:?}",
        pruned.excluded
    );

    let conflict = extract_fixture(&base.join("version-conflict"));
    assert!(
        conflict
            .excluded
            .iter()
            .any(|x| x.reason == "version-conflict" && x.text == "com.google.code.gson:gson:2.8.1"),
        "losing gson version must be recorded as a conflict: {:?}",
        conflict.excluded
    );

    println!(
        "[PASS] criterion 4: module graph — {fixtures}/{fixtures} structural fixtures exact \
         ({labels} labels), exclusion reasons verified"
    );
}

// ─── Criterion 5: metrics against hand-computed values ──────────────────────

#[test]
fn criterion_5_metrics_hand_values() {
    // Perfectly correlated counts.
    let r = metrics::pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap().unwrap();
    assert!((r - 1.0).abs() < 1e-12, "identical series must give r = 1, got {r}");

    // Perfectly anti-correlated counts.
    let r = metrics::pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap().unwrap();
    assert!((r + 1.0).abs() < 1e-12, "reversed series must give r = -1, got {r}");

    // Hand-worked example: x=(5,7,9), y=(4,8,9) → cov=5, sx=2, sy≈2.160247,
    // r = 5 / (2·(2.160247)·... ) computed by hand as ≈0.9449111825230680.
    let r = metrics::pearson(&[5.0, 7.0, 9.0], &[4.0, 8.0, 9.0]).unwrap().unwrap();
    assert!((r - 0.944_911_182_523_068).abs() < 1e-9, "hand value mismatch: {r}");

    // Zero variance on one side: undefined, reported as None rather than NaN.
    assert_eq!(metrics::pearson(&[2.0, 2.0, 2.0], &[1.0, 5.0, 9.0]).unwrap(), None);

    // |3-3| + |5-4| + |7-9| over 3 projects = 1.0.
    let mae = metrics::mean_absolute_error(&[3.0, 5.0, 7.0], &[3.0, 4.0, 9.0]).unwrap();
    assert!((mae - 1.0).abs() < 1e-12, "hand MAE mismatch: {mae}");

    // One exact set match out of two.
    let pairs = vec![
        EvaluationPair {
            project_id: "a".to_string(),
            predicted: ["g:a:1".to_string()].into_iter().collect(),
            golden: ["g:a:1".to_string()].into_iter().collect(),
        },
        EvaluationPair {
            project_id: "b".to_string(),
            predicted: ["g:a:1".to_string(), "g:c:3".to_string()].into_iter().collect(),
            golden: ["g:b:2".to_string()].into_iter().collect(),
        },
    ];
    let rate = metrics::match_rate(&pairs);
    assert!((rate - 0.5).abs() < 1e-12, "1 of 2 exact matches must rate 0.5, got {rate}");

    let summary = metrics::evaluate(&pairs).unwrap();
    assert_eq!(summary.n, 2);
    // Label counts are (1,1) and (2,1): errors 0 and 1, mean 0.5.
    assert!((summary.mae - 0.5).abs() < 1e-12, "hand MAE mismatch: {}", summary.mae);

    assert!(metrics::evaluate(&pairs[..1]).is_err(), "a single project is not a corpus");
    assert!(metrics::pearson(&[1.0], &[1.0]).is_err(), "one data point cannot correlate");
    assert!(metrics::mean_absolute_error(&[1.0, 2.0], &[1.0]).is_err(), "length mismatch");

    println!(
        "[PASS] criterion 5: metrics — hand-computed correlation, error and match-rate values \
         reproduced"
    );
}

// ─── Criterion 6: whole-corpus self-consistency ─────────────────────────────

#[test]
fn criterion_6_corpus_self_consistency() {
    let mut pairs = Vec::new();
    for family in ["patterns", "structural"] {
        for (name, dir) in fixture_dirs(family) {
            let report = extract_fixture(&dir);
            pairs.push(EvaluationPair {
                project_id: format!("{family}/{name}"),
                predicted: report.label_set(),
                golden: golden_set(&dir),
            });
        }
    }
    assert!(pairs.len() >= 19, "expected the full fixture corpus, got {}", pairs.len());

    let summary = metrics::evaluate(&pairs).unwrap();
    assert_eq!(summary.n, pairs.len());
    assert!(summary.mae.abs() < 1e-12, "self-consistency MAE must be 0, got {}", summary.mae);
    assert!(
        (summary.match_rate - 1.0).abs() < 1e-12,
        "every project must match its golden exactly, got {}",
        summary.match_rate
    );
    match summary.pearson {
        Some(r) => assert!((r - 1.0).abs() < 1e-9, "identical count series must give r = 1: {r}"),
        None => {} // all projects the same size: correlation undefined, not wrong
    }

    println!(
        "[PASS] criterion 6: corpus scoring — {} projects, MAE 0.0, match rate 1.00, \
         correlation {}",
        summary.n,
        summary.pearson.map_or("n/a".to_string(), |r| format!("{r:.3}"))
    );
}

// ─── Criterion 7: robustness on malformed input ─────────────────────────────

const BASE_SETTINGS: &str = "include ':app'\nrootProject.name = 'fuzzed'\n";
const BASE_ROOT_BUILD: &str = concat!(
    "buildscript {\n",
    "    ext.kotlin_version = '1.9.0'\n",
    "    dependencies { classpath 'com.android.tools.build:gradle:8.1.0' }\n",
    "}\n",
    "ext {\n",
    "    okhttpVersion = '4.11.0'\n",
    "    versions = [core: '1.12.0']\n",
    "}\n",
);
const BASE_APP_BUILD: &str = concat!(
    "apply plugin: 'com.android.application'\n",
    "android { productFlavors { full {}; lite {} } }\n",
    "dependencies {\n",
    "    implementation \"com.squareup.okhttp3:okhttp:$okhttpVersion\"\n",
    "    implementation \"androidx.core:core-ktx:${versions.core}\"\n",
    "    fullImplementation 'com.google.code.gson:gson:2.10.1'\n",
    "    testImplementation 'junit:junit:4.13.2'\n",
    "    implementation group: 'io.reactivex.rxjava2', name: 'rxjava', version: '2.2.21'\n",
    "    api fileTree(dir: 'libs', include: ['*.jar'])\n",
    "}\n",
);

/// Applies one random text mutation: truncation, garbage insertion, line
/// duplication, line swap, or byte-range deletion. Input stays ASCII so byte
/// offsets are always valid boundaries.
fn mutate(text: &str, rng: &mut StdRng) -> String {
    let mut bytes = text.as_bytes().to_vec();
    match rng.gen_range(0..5u8) {
        0 => {
            let at = rng.gen_range(0..=bytes.len());
            bytes.truncate(at);
        }
        1 => {
            let garbage_pool = b"{}()[]'\":$=,.\\ \tabcXYZ09\n";
            let at = rng.gen_range(0..=bytes.len());
            let chunk: Vec<u8> = (0..rng.gen_range(1..16usize))
                .map(|_| garbage_pool[rng.gen_range(0..garbage_pool.len())])
                .collect();
            bytes.splice(at..at, chunk);
        }
        2 => {
            let mut lines: Vec<&str> = text.lines().collect();
            if !lines.is_empty() {
                let at = rng.gen_range(0..lines.len());
                lines.insert(at, lines[at]);
            }
            return lines.join("\n");
        }
        3 => {
            let mut lines: Vec<&str> = text.lines().collect();
            if lines.len() >= 2 {
                let a = rng.gen_range(0..lines.len());
                let b = rng.gen_range(0..lines.len());
                lines.swap(a, b);
            }
            return lines.join("\n");
        }
        _ => {
            if !bytes.is_empty() {
                let start = rng.gen_range(0..bytes.len());
                let end = (start + rng.gen_range(1..20usize)).min(bytes.len());
                bytes.drain(start..end);
            }
        }
    }
    String::from_utf8_lossy(&bytes).into_owned()
}

#[test]
fn criterion_7_robustness_on_malformed_input() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = 1_000u64;
    let mut timings = Vec::with_capacity(cases as usize);

    for case in 0..cases {
        let mut rng = StdRng::seed_from_u64(0xF022_0000 + case);
        let mut settings = BASE_SETTINGS.to_string();
        let mut root_build = BASE_ROOT_BUILD.to_string();
        let mut app_build = BASE_APP_BUILD.to_string();
        for _ in 0..rng.gen_range(1..=4usize) {
            match rng.gen_range(0..3u8) {
                0 => settings = mutate(&settings, &mut rng),
                1 => root_build = mutate(&root_build, &mut rng),
                _ => app_build = mutate(&app_build, &mut rng),
            }
        }

        let dir = tmp.path().join(format!("case{case}"));
        fs::create_dir_all(dir.join("app")).unwrap();
        fs::write(dir.join("settings.gradle"), &settings).unwrap();
        fs::write(dir.join("build.gradle"), &root_build).unwrap();
        fs::write(dir.join("app/build.gradle"), &app_build).unwrap();

        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| {
            extract_project(&dir, &ExtractOptions::default())
        }));
        timings.push(started.elapsed());
        match outcome {
            Ok(_) => {} // clean result or structured error — both acceptable
            Err(_) => panic!("extraction panicked on mutated case {case}"),
        }
    }

    timings.sort();
    let p95 = timings[(cases as usize * 95) / 100 - 1];
    assert!(p95 < Duration::from_secs(1), "p95 latency {p95:?} exceeds 1s budget");

    println!(
        "[PASS] criterion 7: robustness — {cases} mutated projects, zero panics, p95 latency \
         {:.1}ms",
        p95.as_secs_f64() * 1000.0
    );
}
