//! One function per subcommand; each builds its full output text and hands
//! it to [`output::emit`], so stdout and `--out` file contents are identical
//! bytes.

use std::collections::BTreeMap;

use serde::Serialize;

use qsamp_core::boson::{
    self, BosonInstance, OccupationEvent,
};
use qsamp_core::iqp::{
    self, BitString, CircuitFamily, IqpCircuit,
};
use qsamp_core::matrix::{perturb_unitary, ComplexMatrix, UnitaryMatrix};
use qsamp_core::permanent;
use qsamp_core::rng::derive_seed;
use qsamp_core::stats;
use qsamp_core::SampleSet;

use crate::output::{emit, fmt_f64, parse_json, read_file, CliError, Meta, TOOL_VERSION};

/// Log-likelihood ratios may be ±∞, which JSON numbers cannot carry; encode
/// those as strings.
#[derive(Serialize)]
#[serde(untagged)]
enum JsonReal {
    Number(f64),
    Symbol(&'static str),
}

impl From<f64> for JsonReal {
    fn from(value: f64) -> Self {
        if value.is_finite() {
            JsonReal::Number(value)
        } else if value.is_nan() {
            JsonReal::Symbol("nan")
        } else if value > 0.0 {
            JsonReal::Symbol("inf")
        } else {
            JsonReal::Symbol("-inf")
        }
    }
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut line = serde_json::to_string(value).expect("output serializes");
    line.push('\n');
    line
}

pub fn perm_compute(matrix_path: &str, naive: bool, out: Option<&str>) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct PermOut {
        re: f64,
        im: f64,
        meta: Meta,
    }
    let contents = read_file(matrix_path)?;
    let matrix: ComplexMatrix = parse_json(matrix_path, &contents)?;
    let value =
        if naive { permanent::permanent_naive(&matrix)? } else { permanent::permanent_fast(&matrix)? };
    let meta = Meta::new(None).with_input("matrix", &contents);
    emit(out, &json_line(&PermOut { re: value.re, im: value.im, meta }))
}

#[derive(Serialize)]
struct InstanceOut<'a> {
    #[serde(flatten)]
    instance: &'a BosonInstance,
    meta: &'a Meta,
}

pub fn boson_instance(
    m: usize,
    n: usize,
    haar_seed: Option<u64>,
    network_path: Option<&str>,
    scattershot: bool,
    out: Option<&str>,
) -> Result<(), CliError> {
    let mut meta = Meta::new(haar_seed);
    let instance = if scattershot {
        let seed = haar_seed.ok_or(CliError::Data {
            message: "scattershot instances need --haar-seed".into(),
        })?;
        boson::scattershot_instance(m, n, seed)?
    } else {
        let network = match (haar_seed, network_path) {
            (Some(seed), None) => qsamp_core::matrix::haar_unitary(m, seed)?,
            (None, Some(path)) => {
                let contents = read_file(path)?;
                meta = meta.with_input("network", &contents);
                parse_json::<UnitaryMatrix>(path, &contents)?
            }
            _ => {
                return Err(CliError::Data {
                    message: "provide exactly one of --haar-seed or --network".into(),
                })
            }
        };
        if network.dim() != m {
            return Err(CliError::Data {
                message: format!("network is {}x{0} but --m is {m}", network.dim()),
            });
        }
        BosonInstance::fiducial(m, n, network)?
    };
    emit(out, &json_line(&InstanceOut { instance: &instance, meta: &meta }))
}

fn load_instance(path: &str) -> Result<(BosonInstance, String), CliError> {
    let contents = read_file(path)?;
    let instance = parse_json::<BosonInstance>(path, &contents)?;
    Ok((instance, contents))
}

pub fn boson_dist(
    instance_path: &str,
    distinguishable: bool,
    out: Option<&str>,
) -> Result<(), CliError> {
    let (instance, contents) = load_instance(instance_path)?;
    let dist = if distinguishable {
        boson::distinguishable_distribution(&instance)?
    } else {
        boson::exact_distribution(&instance)?
    };
    let meta = Meta::new(None).with_input("instance", &contents);
    let mut text = format!("# {}\nevent,probability\n", meta.to_json());
    for (event, p) in dist.iter() {
        text.push_str(&format!("{event},{}\n", fmt_f64(p)));
    }
    emit(out, &text)
}

#[derive(Serialize)]
struct SamplesHeader {
    tool_version: &'static str,
    seed: u64,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    inputs: BTreeMap<String, String>,
    count: usize,
    returned: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    acceptance_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    depolarize: Option<f64>,
}

pub fn boson_sample(
    instance_path: &str,
    count: usize,
    seed: u64,
    loss: Option<f64>,
    out: Option<&str>,
) -> Result<(), CliError> {
    let (instance, contents) = load_instance(instance_path)?;
    let (draws, acceptance_rate) = match loss {
        None => (boson::sample(&instance, count, seed)?.draws, None),
        Some(eta) => {
            let lossy = boson::lossy_sample(&instance, eta, count, seed)?;
            (lossy.samples.draws, Some(lossy.acceptance_rate))
        }
    };
    let header = SamplesHeader {
        tool_version: TOOL_VERSION,
        seed,
        inputs: Meta::new(None).with_input("instance", &contents).inputs,
        count,
        returned: draws.len(),
        acceptance_rate,
        depolarize: None,
    };
    let mut text = json_line(&header);
    for draw in &draws {
        text.push_str(&json_line(draw));
    }
    emit(out, &text)
}

/// Parses a samples JSON-lines file: one header object followed by one JSON
/// array (occupation event) per line.
fn load_boson_samples(path: &str) -> Result<(SampleSet<OccupationEvent>, String), CliError> {
    let contents = read_file(path)?;
    let mut seed = 0u64;
    let mut draws = Vec::new();
    for (lineno, line) in contents.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(line).map_err(|e| CliError::Io {
                path: path.to_string(),
                message: format!("line {}: {e}", lineno + 1),
            })?;
        match value {
            serde_json::Value::Object(map) => {
                if let Some(s) = map.get("seed").and_then(|v| v.as_u64()) {
                    seed = s;
                }
            }
            serde_json::Value::Array(_) => {
                let event: Vec<u8> = serde_json::from_value(value).map_err(|e| CliError::Io {
                    path: path.to_string(),
                    message: format!("line {}: {e}", lineno + 1),
                })?;
                draws.push(OccupationEvent::new(event));
            }
            _ => {
                return Err(CliError::Data {
                    message: format!("{path}: line {} is neither header nor event", lineno + 1),
                })
            }
        }
    }
    Ok((SampleSet { seed, draws }, contents))
}

pub fn boson_validate(
    instance_path: &str,
    samples_path: &str,
    test: &str,
    out: Option<&str>,
) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct VerdictOut {
        test: String,
        llr: JsonReal,
        verdict: String,
        samples: usize,
        seed: u64,
        meta: Meta,
    }
    let (instance, instance_contents) = load_instance(instance_path)?;
    let (samples, samples_contents) = load_boson_samples(samples_path)?;
    let (llr, verdict, samples_used) = match test {
        "uniform" => {
            let result = stats::uniform_discriminator(&samples, &instance)?;
            let verdict = match result.verdict {
                stats::UniformVerdict::Boson => "boson",
                stats::UniformVerdict::Uniform => "uniform",
            };
            (result.log_likelihood_ratio, verdict, result.samples)
        }
        "distinguishable" => {
            let result = stats::distinguishable_discriminator(&samples, &instance)?;
            let verdict = match result.verdict {
                stats::ModelVerdict::Indistinguishable => "indistinguishable",
                stats::ModelVerdict::Distinguishable => "distinguishable",
            };
            (result.log_likelihood_ratio, verdict, result.samples)
        }
        other => {
            return Err(CliError::Data { message: format!("unknown test {other:?}") });
        }
    };
    let meta = Meta::new(None)
        .with_input("instance", &instance_contents)
        .with_input("samples", &samples_contents);
    emit(
        out,
        &json_line(&VerdictOut {
            test: test.to_string(),
            llr: llr.into(),
            verdict: verdict.to_string(),
            samples: samples_used,
            seed: samples.seed,
            meta,
        }),
    )
}

pub fn boson_birthday(
    n: usize,
    modes: &[usize],
    count: usize,
    seed: u64,
    out: Option<&str>,
) -> Result<(), CliError> {
    if modes.is_empty() {
        return Err(CliError::Data { message: "need at least one mode count in --modes".into() });
    }
    let meta = Meta::new(Some(seed));
    let mut text = format!("# {}\nmodes,collision_fraction\n", meta.to_json());
    for (index, &m) in modes.iter().enumerate() {
        // Stream 2i seeds the network, 2i+1 the sampler.
        let instance = BosonInstance::fiducial_haar(m, n, derive_seed(seed, 2 * index as u64))?;
        let samples = boson::sample(&instance, count, derive_seed(seed, 2 * index as u64 + 1))?;
        let fraction = boson::collision_statistics(&samples)?;
        text.push_str(&format!("{m},{}\n", fmt_f64(fraction)));
    }
    emit(out, &text)
}

pub fn boson_perturb_sweep(
    instance_path: &str,
    sigmas: &[f64],
    seed: u64,
    out: Option<&str>,
) -> Result<(), CliError> {
    if sigmas.is_empty() {
        return Err(CliError::Data { message: "need at least one value in --sigmas".into() });
    }
    let (instance, contents) = load_instance(instance_path)?;
    let reference = boson::exact_distribution(&instance)?;
    let meta = Meta::new(Some(seed)).with_input("instance", &contents);
    let mut text = format!("# {}\nsigma,tvd_half,tvd_sum\n", meta.to_json());
    for &sigma in sigmas {
        let perturbed = perturb_unitary(instance.network(), sigma, seed)?;
        let noisy_instance = BosonInstance::new(instance.input().clone(), perturbed)?;
        let noisy = boson::exact_distribution(&noisy_instance)?;
        let tv = stats::tv_distance(&reference, &noisy)?;
        text.push_str(&format!(
            "{},{},{}\n",
            fmt_f64(sigma),
            fmt_f64(tv.half_sum),
            fmt_f64(tv.abs_sum)
        ));
    }
    emit(out, &text)
}

fn parse_family(family: &str, budget: Option<usize>) -> Result<CircuitFamily, CliError> {
    match family {
        "1" => {
            if budget.is_some() {
                return Err(CliError::Data {
                    message: "--budget applies only to the sparse family".into(),
                });
            }
            Ok(CircuitFamily::Family1)
        }
        "2" => {
            if budget.is_some() {
                return Err(CliError::Data {
                    message: "--budget applies only to the sparse family".into(),
                });
            }
            Ok(CircuitFamily::Family2)
        }
        "sparse" => Ok(CircuitFamily::Sparse { budget }),
        other => Err(CliError::Data { message: format!("unknown family {other:?}") }),
    }
}

#[derive(Serialize)]
struct CircuitOut<'a> {
    #[serde(flatten)]
    circuit: &'a IqpCircuit,
    meta: &'a Meta,
}

pub fn iqp_random(
    family: &str,
    n: usize,
    seed: u64,
    budget: Option<usize>,
    out: Option<&str>,
) -> Result<(), CliError> {
    let circuit = parse_family(family, budget)?.generate(n, seed)?;
    let meta = Meta::new(Some(seed));
    emit(out, &json_line(&CircuitOut { circuit: &circuit, meta: &meta }))
}

fn load_circuit(path: &str) -> Result<(IqpCircuit, String), CliError> {
    let contents = read_file(path)?;
    let circuit = parse_json::<IqpCircuit>(path, &contents)?;
    Ok((circuit, contents))
}

pub fn iqp_dist(circuit_path: &str, out: Option<&str>) -> Result<(), CliError> {
    let (circuit, contents) = load_circuit(circuit_path)?;
    let dist = iqp::full_distribution(&circuit)?;
    let meta = Meta::new(None).with_input("circuit", &contents);
    let mut text = format!("# {}\nbitstring,probability\n", meta.to_json());
    for (event, p) in dist.iter() {
        text.push_str(&format!("{event},{}\n", fmt_f64(p)));
    }
    emit(out, &text)
}

pub fn iqp_prob(circuit_path: &str, x: &str, out: Option<&str>) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct ProbOut {
        x: String,
        probability: f64,
        meta: Meta,
    }
    let (circuit, contents) = load_circuit(circuit_path)?;
    let bits: BitString = x.parse::<BitString>()?;
    let probability = iqp::output_probability(&circuit, &bits)?;
    let meta = Meta::new(None).with_input("circuit", &contents);
    emit(out, &json_line(&ProbOut { x: bits.to_string(), probability, meta }))
}

pub fn iqp_sample(
    circuit_path: &str,
    count: usize,
    seed: u64,
    depolarize: Option<f64>,
    out: Option<&str>,
) -> Result<(), CliError> {
    let (circuit, contents) = load_circuit(circuit_path)?;
    let draws = match depolarize {
        None => iqp::sample_iqp(&circuit, count, seed)?.draws,
        Some(rate) => iqp::depolarize_samples(&circuit, rate, count, seed)?.draws,
    };
    let header = SamplesHeader {
        tool_version: TOOL_VERSION,
        seed,
        inputs: Meta::new(None).with_input("circuit", &contents).inputs,
        count,
        returned: draws.len(),
        acceptance_rate: None,
        depolarize,
    };
    let mut text = json_line(&header);
    for draw in &draws {
        text.push_str(&json_line(draw));
    }
    emit(out, &text)
}

pub fn iqp_anticonc(
    family: &str,
    n: usize,
    trials: usize,
    alpha: f64,
    seed: u64,
    budget: Option<usize>,
    out: Option<&str>,
) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct AnticoncOut {
        family: String,
        n: usize,
        trials: usize,
        alpha: f64,
        fraction: f64,
        zero_string_fraction: f64,
        porter_thomas_ks: f64,
        meta: Meta,
    }
    let report =
        iqp::anticoncentration_stats(&parse_family(family, budget)?, n, trials, alpha, seed)?;
    // The report's values are already rescaled by 2ⁿ, so fit with n = 0.
    let ks = stats::porter_thomas_fit(&report.scaled_probabilities, 0)?;
    emit(
        out,
        &json_line(&AnticoncOut {
            family: family.to_string(),
            n,
            trials,
            alpha,
            fraction: report.fraction,
            zero_string_fraction: report.zero_fraction,
            porter_thomas_ks: ks,
            meta: Meta::new(Some(seed)),
        }),
    )
}

pub fn iqp_gadget_check(
    n: usize,
    gadgets: usize,
    seed: u64,
    out: Option<&str>,
) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct GadgetOut {
        n: usize,
        gadgets: usize,
        fidelity: f64,
        postselection_probability: f64,
        meta: Meta,
    }
    let report = iqp::verify_hadamard_gadget(n, gadgets, seed)?;
    emit(
        out,
        &json_line(&GadgetOut {
            n,
            gadgets: report.gadget_count,
            fidelity: report.fidelity,
            postselection_probability: report.postselection_probability,
            meta: Meta::new(Some(seed)),
        }),
    )
}
