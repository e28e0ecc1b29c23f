//! `kunie`: encrypt images and reproduce the cipher's analyses.
//!
//! Exit codes: 0 success, 2 usage, 3 I/O, 4 format, 5 numeric failure.

mod error;
mod imageio;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kunie_core::analysis::{bifurcation_csv, bifurcation_scan, lyapunov_grid, BifurcationConfig, SweepParam};
use kunie_core::bench::{bench_encryption, bench_table, BENCH_SIZES};
use kunie_core::chaos::{generate_orbit, partition_keystream, quantize_bytes, KeyComponent};
use kunie_core::gru::{generate, prepare_training_data, read_checkpoint, train, write_checkpoint, GruConfig};
use kunie_core::metrics::{analyze, key_sensitivity_report};
use kunie_core::nist::{run_suite, streams_from_keys, TestParams};
use kunie_core::scan::{comparison_csv, comparison_table, ScanMethod};
use kunie_core::{decrypt, encrypt, CipherText, KeyBundle, MapId};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use error::{Failure, Outcome};

#[derive(Parser)]
#[command(name = "kunie", version, about = "Chaotic image cipher and its analysis tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random key file.
    Keygen {
        #[arg(short, long)]
        output: PathBuf,
        /// Derive the key from a seed instead of the OS generator.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Encrypt a PGM/PPM (or PNG) image into a ciphertext container.
    Encrypt {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        key: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Also print a metrics report for the plaintext/ciphertext pair.
        #[arg(long)]
        report: bool,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Decrypt a ciphertext container back into an image.
    Decrypt {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        key: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Entropy, correlations, NPCR/UACI and key sensitivity.
    Analyze {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        key: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        out: Output,
    },
    /// Run the randomness tests on the keyed x- and y-streams.
    Nist {
        #[arg(short, long)]
        key: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        bits: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Compare the Kun scan with nine classical scan patterns.
    ScanBench {
        #[arg(short, long)]
        input: PathBuf,
        /// Key whose control values drive the Kun scan.
        #[arg(short, long)]
        key: PathBuf,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Lyapunov exponents over a parameter grid, as CSV.
    Lyapunov {
        #[arg(long, default_value = "scphm")]
        map: MapId,
        #[arg(long, default_value = "0:25", value_parser = parse_range)]
        a_range: (f64, f64),
        #[arg(long, default_value = "0:25", value_parser = parse_range)]
        b_range: (f64, f64),
        /// Cells per axis.
        #[arg(long, default_value_t = 50)]
        resolution: usize,
        #[arg(long, default_value_t = 5000)]
        iterations: usize,
        #[arg(long, default_value_t = 1000)]
        transient: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Bifurcation samples over one parameter, as CSV.
    Bifurcation {
        #[arg(long, default_value = "scphm")]
        map: MapId,
        #[arg(long, value_enum, default_value_t = Sweep::A)]
        sweep: Sweep,
        /// Value of the parameter held fixed.
        #[arg(long, default_value_t = 25.0)]
        fixed: f64,
        #[arg(long, default_value = "0:25", value_parser = parse_range)]
        range: (f64, f64),
        #[arg(long, default_value_t = 500)]
        steps: usize,
        #[arg(long, default_value_t = 1000)]
        transient: usize,
        #[arg(long, default_value_t = 200)]
        keep: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Encryption timings at 128, 256, 512 and 1024 squared, three channels.
    Bench {
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Train or sample the recurrent sequence model.
    #[command(subcommand)]
    Gru(GruCommand),
}

#[derive(Subcommand)]
enum GruCommand {
    /// Train on the key's orbit and write a checkpoint.
    Train {
        #[arg(short, long)]
        key: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 32)]
        hidden: usize,
        #[arg(long, default_value_t = 20)]
        sequence_length: usize,
        #[arg(long, default_value_t = 1e-2)]
        learning_rate: f64,
        #[arg(long, default_value_t = 200)]
        epochs: usize,
        #[arg(long, default_value_t = 24_000)]
        train_points: usize,
        #[arg(long, default_value_t = 1)]
        batch_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Per-epoch losses as CSV.
        #[arg(long)]
        losses: Option<PathBuf>,
    },
    /// Generate a sequence in closed loop, seeded by the key's training data.
    Generate {
        #[arg(short, long)]
        model: PathBuf,
        #[arg(short, long)]
        key: PathBuf,
        #[arg(short, long)]
        count: usize,
        /// Emit quantised keystream bytes instead of one value per line.
        #[arg(long)]
        bytes: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct Sampling {
    /// Single-pixel-change trials for NPCR/UACI.
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sweep {
    A,
    B,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    if lo.is_finite() && hi.is_finite() && lo <= hi {
        Ok((lo, hi))
    } else {
        Err(format!("bad range {s}"))
    }
}

fn read_keys(path: &Path) -> Outcome<KeyBundle> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    Ok(KeyBundle::parse_key_file(&text)?)
}

fn write_file(path: &Path, data: impl AsRef<[u8]>) -> Outcome<()> {
    fs::write(path, data).map_err(|e| Failure::io(path, e))
}

impl Output {
    fn emit(&self, text: &str, json: impl FnOnce() -> serde_json::Value, csv: Option<&str>) -> Outcome<()> {
        let body = match self.format {
            Format::Text => text.to_string(),
            Format::Json => serde_json::to_string_pretty(&json()).expect("plain data") + "\n",
            Format::Csv => csv
                .ok_or_else(|| Failure::usage("this command has no CSV output"))?
                .to_string(),
        };
        match &self.out {
            Some(p) => write_file(p, body),
            None => {
                print!("{body}");
                Ok(())
            }
        }
    }
}

fn run(cli: Cli) -> Outcome<()> {
    match cli.command {
        Command::Keygen { output, seed } => {
            let keys = match seed {
                Some(s) => KeyBundle::random(&mut ChaCha8Rng::seed_from_u64(s)),
                None => KeyBundle::random(&mut rand::thread_rng()),
            };
            write_file(&output, keys.to_key_file())
        }
        Command::Encrypt {
            input,
            key,
            output,
            report,
            sampling,
        } => {
            let keys = read_keys(&key)?;
            let img = imageio::load(&input)?;
            let start = std::time::Instant::now();
            let ct = encrypt(&img, &keys)?;
            eprintln!("elapsed_seconds: {:.4}", start.elapsed().as_secs_f64());
            write_file(&output, ct.to_bytes())?;
            if report {
                let r = analyze(&img, &keys, sampling.trials, sampling.seed)?;
                println!("{}", serde_json::to_string_pretty(&r).expect("plain data"));
            }
            Ok(())
        }
        Command::Decrypt { input, key, output } => {
            let keys = read_keys(&key)?;
            let data = fs::read(&input).map_err(|e| Failure::io(&input, e))?;
            let ct = CipherText::from_bytes(&data)?;
            imageio::save(&output, &decrypt(&ct, &keys)?)
        }
        Command::Analyze { input, key, sampling, out } => {
            let keys = read_keys(&key)?;
            let img = imageio::load(&input)?;
            let report = analyze(&img, &keys, sampling.trials, sampling.seed)?;
            let sens = KeyComponent::ALL
                .into_iter()
                .map(|c| key_sensitivity_report(&img, &keys, Some(c)))
                .collect::<Result<Vec<_>, _>>()?;
            let mut text = format!(
                "entropy      {:.6}\ncorrelation  h {:.6}  v {:.6}  d {:.6}  ad {:.6}\nNPCR         {:.4}%\nUACI         {:.4}%\n",
                report.entropy, report.corr_h, report.corr_v, report.corr_d, report.corr_ad, report.npcr, report.uaci
            );
            for s in &sens {
                let c = s.component.expect("flipped component");
                text.push_str(&format!("key {c:<3} LSB flip  NPCR {:.4}%  UACI {:.4}%\n", s.npcr, s.uaci));
            }
            text.push_str(&format!("elapsed_seconds {:.4}\n", report.elapsed));
            out.emit(&text, || serde_json::json!({ "metrics": report, "key_sensitivity": sens }), None)
        }
        Command::Nist { key, bits, out } => {
            let keys = read_keys(&key)?;
            let (x, y) = streams_from_keys(&keys, bits)?;
            let report = run_suite(&x, &y, &TestParams::default())?;
            let mut csv = String::from("stream,test,p_value,pass\n");
            for e in &report.entries {
                csv.push_str(&format!("{:?},{},{},{}\n", e.stream, e.result.test.name(), e.result.p_value, e.result.pass));
            }
            out.emit(&report.to_table(), || serde_json::json!(report), Some(&csv))
        }
        Command::ScanBench { input, key, repeats, out } => {
            let keys = read_keys(&key)?;
            let img = imageio::load(&input)?;
            let values = img.rows() * img.cols();
            let ctrl = partition_keystream(&generate_orbit(&keys, img.dims())?, values)?.y_ctrl;
            let rows = comparison_table(&img, &ScanMethod::comparison_set(ctrl), repeats)?;
            let csv = comparison_csv(&rows);
            let json = || {
                serde_json::Value::Array(
                    rows.iter()
                        .map(|(m, c)| serde_json::json!({ "method": m, "correlations": c }))
                        .collect(),
                )
            };
            let text = csv.replace(',', "\t");
            out.emit(&text, json, Some(&csv))
        }
        Command::Lyapunov {
            map,
            a_range,
            b_range,
            resolution,
            iterations,
            transient,
            out,
        } => {
            let g = lyapunov_grid(map, a_range, b_range, (resolution, resolution), iterations, transient)?;
            let csv = g.to_csv();
            let text = match g.mean() {
                Some(m) => format!(
                    "{map}: mean LE1 {:.4}, mean LE2 {:.4} over {} cells ({} missing)\n",
                    m.le1,
                    m.le2,
                    g.cells.len() - g.missing(),
                    g.missing()
                ),
                None => format!("{map}: every cell failed\n"),
            };
            out.emit(&text, || serde_json::json!(g), Some(&csv))
        }
        Command::Bifurcation {
            map,
            sweep,
            fixed,
            range,
            steps,
            transient,
            keep,
            out,
        } => {
            let cfg = BifurcationConfig {
                map,
                sweep: match sweep {
                    Sweep::A => SweepParam::A,
                    Sweep::B => SweepParam::B,
                },
                fixed,
                lo: range.0,
                hi: range.1,
                steps,
                transient,
                keep,
            };
            let samples = bifurcation_scan(&cfg)?;
            let csv = bifurcation_csv(&samples);
            out.emit(&csv, || serde_json::json!(samples), Some(&csv))
        }
        Command::Bench { repeats, out } => {
            let keys = KeyBundle::random(&mut ChaCha8Rng::seed_from_u64(0));
            let rows = bench_encryption(&BENCH_SIZES, &keys, repeats)?;
            let mut csv = String::from("size,channels,seconds\n");
            for r in &rows {
                csv.push_str(&format!("{},{},{:.6}\n", r.size, r.channels, r.seconds));
            }
            out.emit(&bench_table(&rows), || serde_json::json!(rows), Some(&csv))
        }
        Command::Gru(GruCommand::Train {
            key,
            output,
            hidden,
            sequence_length,
            learning_rate,
            epochs,
            train_points,
            batch_size,
            seed,
            losses,
        }) => {
            let keys = read_keys(&key)?;
            let data = prepare_training_data(&keys)?;
            let cfg = GruConfig {
                hidden_units: hidden,
                sequence_length,
                learning_rate,
                epochs,
                train_points,
                batch_size,
                seed,
            };
            let run = train(&data, &cfg)?;
            let mut buf = Vec::new();
            write_checkpoint(&run.model, &mut buf)?;
            write_file(&output, buf)?;
            if let Some(p) = losses {
                let mut csv = String::from("epoch,loss\n");
                for (i, l) in run.losses.iter().enumerate() {
                    csv.push_str(&format!("{},{l}\n", i + 1));
                }
                write_file(&p, csv)?;
            }
            if let (Some(first), Some(last)) = (run.losses.first(), run.losses.last()) {
                eprintln!("loss: epoch 1 {first:.6}, epoch {} {last:.6}", run.losses.len());
            }
            Ok(())
        }
        Command::Gru(GruCommand::Generate {
            model,
            key,
            count,
            bytes,
            output,
        }) => {
            let data = fs::read(&model).map_err(|e| Failure::io(&model, e))?;
            let model = read_checkpoint(data.as_slice())?;
            let keys = read_keys(&key)?;
            let train = prepare_training_data(&keys)?;
            let l = model.sequence_length();
            if train.len() < l {
                return Err(Failure::usage("sequence length exceeds the training data"));
            }
            let seq = generate(&model, &train[train.len() - l..], count)?;
            if bytes {
                write_file(&output, quantize_bytes(&seq)?)
            } else {
                let text: String = seq.iter().map(|v| format!("{v}\n")).collect();
                write_file(&output, text)
            }
        }
    }
}

fn configure_threads() -> Outcome<()> {
    let Ok(v) = std::env::var("KUNIE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::usage(format!("KUNIE_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { error::USAGE } else { 0 });
        }
    };
    match configure_threads().and_then(|_| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("kunie: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
