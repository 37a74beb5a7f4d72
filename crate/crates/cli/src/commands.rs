use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context as _, Result};
use serde_json::json;
use zhwn_core::config::Config;
use zhwn_core::corrections::{apply_edits, flag_hard_translation, verify_log, ReviewQueue, ReviewReason};
use zhwn_core::embedding::{load_embeddings, EmbeddingTable};
use zhwn_core::eval::semeval;
use zhwn_core::eval::{
    baseline, evaluate_pairs, evaluate_relatedness, score, GlossStandard, IcParams, SenseInventory, WordPairSet, WsdContext, WsdInstance,
};
use zhwn_core::lexicon::{merge, parse_dictionary, translate_synsets, write_miss_report, BilingualLexicon};
use zhwn_core::screening::screen_all;
use zhwn_core::text::{LongestMatchTokenizer, Stoplist};
use zhwn_core::wordnet::{coverage_report, load_db, WordnetDb};
use zhwn_service::store::write_atomic;

use crate::manifest::ManifestBuilder;
use crate::{Cli, Command, Common, Format, UsageError};

fn require<'a>(value: &'a Option<PathBuf>, flag: &str, command: &str) -> Result<&'a Path> {
    value.as_deref().ok_or_else(|| UsageError(format!("{command} needs {flag}")).into())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, contents: &[u8]) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Everything a command may need, loaded on demand and recorded in the
/// manifest.
struct Run<'a> {
    common: &'a Common,
    name: &'static str,
    config: Config,
    manifest: ManifestBuilder,
}

impl<'a> Run<'a> {
    fn new(common: &'a Common, name: &'static str) -> Result<Self> {
        let mut manifest = ManifestBuilder::new(name);
        let config = match &common.config {
            Some(p) => {
                manifest.input("config", p).with_context(|| format!("reading {}", p.display()))?;
                Config::parse(&read(p)?).with_context(|| p.display().to_string())?
            }
            None => Config::default(),
        };
        Ok(Self {
            common,
            name,
            config,
            manifest,
        })
    }

    fn input(&mut self, role: &str, path: &Path) -> Result<()> {
        self.manifest
            .input(role, path)
            .with_context(|| format!("reading {}", path.display()))
    }

    fn read_input(&mut self, role: &str, path: &Path) -> Result<String> {
        self.input(role, path)?;
        read(path)
    }

    fn wordnet(&mut self) -> Result<WordnetDb> {
        let dir = require(&self.common.wordnet, "--wordnet", self.name)?;
        self.input("wordnet", dir)?;
        load_db(dir, self.config.wordnet_version.clone()).with_context(|| format!("loading wordnet from {}", dir.display()))
    }

    fn lexicon_from(&mut self, role: &str, path: &Path) -> Result<BilingualLexicon> {
        let text = self.read_input(role, path)?;
        BilingualLexicon::from_jsonl(&text, &self.config.wordnet_version).with_context(|| path.display().to_string())
    }

    fn lexicon(&mut self) -> Result<BilingualLexicon> {
        let path = require(&self.common.lexicon, "--lexicon", self.name)?;
        self.lexicon_from("lexicon", path)
    }

    fn embeddings(&mut self) -> Result<EmbeddingTable> {
        let path = require(&self.common.embeddings, "--embeddings", self.name)?;
        self.input("embeddings", path)?;
        load_embeddings(path).with_context(|| path.display().to_string())
    }

    fn stoplist(&mut self, path: Option<&Path>) -> Result<Stoplist> {
        match path {
            Some(p) => Ok(Stoplist::parse(&self.read_input("stoplist", p)?)),
            None => Ok(Stoplist::default()),
        }
    }

    /// Writes a secondary output file.
    fn side_output(&mut self, role: &str, path: &Path, contents: &str) -> Result<()> {
        write(path, contents.as_bytes())?;
        self.manifest.output(role, &path.display().to_string(), contents.as_bytes());
        Ok(())
    }

    /// Writes the primary output, then the manifest.
    fn finish(mut self, contents: &str) -> Result<()> {
        match &self.common.out {
            Some(p) => {
                write(p, contents.as_bytes())?;
                self.manifest.output("out", &p.display().to_string(), contents.as_bytes());
            }
            None => {
                std::io::stdout().write_all(contents.as_bytes()).context("writing stdout")?;
                self.manifest.output("out", "-", contents.as_bytes());
            }
        }
        let manifest_path = self.common.manifest.clone().or_else(|| {
            self.common.out.as_ref().map(|p| {
                let mut s = p.clone().into_os_string();
                s.push(".manifest.json");
                PathBuf::from(s)
            })
        });
        let manifest = self.manifest.finish(&self.config);
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        match manifest_path {
            Some(p) => write(&p, text.as_bytes()),
            None => {
                eprint!("{text}");
                Ok(())
            }
        }
    }
}

fn tokenizer(lex: &BilingualLexicon, table: &EmbeddingTable) -> LongestMatchTokenizer {
    let index = lex.lemma_index();
    LongestMatchTokenizer::new(index.lemmas().map(str::to_string).chain(table.tokens().map(str::to_string)))
}

fn render<T: serde::Serialize>(format: Format, value: &T, table: impl FnOnce() -> String) -> String {
    match format {
        Format::Table => table(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("report serializes");
            s.push('\n');
            s
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let common = &cli.common;
    match &cli.command {
        Command::Build { dicts, base, misses } => {
            let mut run = Run::new(common, "build")?;
            let db = run.wordnet()?;
            let mut entries = Vec::new();
            for (i, p) in dicts.iter().enumerate() {
                let text = run.read_input(&format!("dict.{i}"), p)?;
                entries.extend(parse_dictionary(&text).with_context(|| p.display().to_string())?);
            }
            let translation = translate_synsets(&db, &entries);
            let mut lexicon = translation.lexicon;
            if let Some(b) = base {
                let base = run.lexicon_from("base", b)?;
                let merged = merge(&base, &lexicon)?;
                log::info!(
                    "merged {} concepts and {} lemmas into {}",
                    merged.concept_count,
                    merged.lemma_count,
                    b.display()
                );
                lexicon = merged.lexicon;
            }
            log::info!(
                "{} synsets with {} candidates; {} English lemmas without an entry",
                lexicon.synset_count(),
                lexicon.candidate_count(),
                translation.misses.len()
            );
            if let Some(p) = misses {
                run.side_output("misses", p, &write_miss_report(&translation.misses))?;
            }
            run.finish(&lexicon.to_jsonl())
        }
        Command::Screen {
            report,
            queue,
            no_hard_patterns,
        } => {
            let mut run = Run::new(common, "screen")?;
            let lexicon = run.lexicon()?;
            let table = run.embeddings()?;
            let screened = screen_all(&lexicon, &table, &run.config.screening)?;
            eprint!("{}", screened.summary.to_tsv());
            if let Some(p) = report {
                run.side_output("report", p, &screened.report_jsonl())?;
            }
            if let Some(p) = queue {
                let mut q = if p.exists() {
                    let text = run.read_input("queue", p)?;
                    ReviewQueue::from_jsonl(&text).with_context(|| p.display().to_string())?
                } else {
                    ReviewQueue::new()
                };
                let before = q.len();
                q.add_deferred(&screened.outcomes);
                if !no_hard_patterns {
                    for o in &screened.outcomes {
                        for c in screened.lexicon.candidates(o.synset) {
                            if !c.is_live() || c.status.is_human() {
                                continue;
                            }
                            if let Some(name) = flag_hard_translation(&c.text, &run.config.hard_patterns) {
                                q.push(
                                    c.synset,
                                    &c.text,
                                    ReviewReason::RuleFlagged,
                                    o.magnitudes.get(&c.text).copied(),
                                    Some(name.to_string()),
                                );
                            }
                        }
                    }
                }
                log::info!("{} new review items in {}", q.len() - before, p.display());
                let text = q.to_jsonl();
                write_atomic(p, &text)?;
                run.manifest.output("queue", &p.display().to_string(), text.as_bytes());
            }
            run.finish(&screened.lexicon.to_jsonl())
        }
        Command::ApplyEdits { edits } => {
            let mut run = Run::new(common, "apply-edits")?;
            let lexicon = run.lexicon()?;
            run.input("edits", edits)?;
            let bytes = std::fs::read(edits).with_context(|| format!("reading {}", edits.display()))?;
            let records = verify_log(&bytes).with_context(|| edits.display().to_string())?;
            let list: Vec<_> = records.into_iter().map(|r| r.edit).collect();
            let fixed = apply_edits(&lexicon, &list)?;
            log::info!("applied {} edits", list.len());
            run.finish(&fixed.to_jsonl())
        }
        Command::EvalRelatedness {
            standard,
            stoplist,
            format,
        } => {
            let mut run = Run::new(common, "eval-relatedness")?;
            let lexicon = run.lexicon()?;
            let table = run.embeddings()?;
            let stop = run.stoplist(stoplist.as_deref())?;
            let label = standard.file_stem().map_or("standard".into(), |s| s.to_string_lossy().into_owned());
            let std =
                GlossStandard::parse(label, &run.read_input("standard", standard)?).with_context(|| standard.display().to_string())?;
            let report = evaluate_relatedness(&lexicon, &std, &table, &tokenizer(&lexicon, &table), &stop)?;
            let text = render(*format, &report, || report.to_table());
            run.finish(&text)
        }
        Command::EvalSimilarity { pairs, scale, format } => {
            let mut run = Run::new(common, "eval-similarity")?;
            let db = run.wordnet()?;
            let lexicon = run.lexicon()?;
            let label = pairs.file_stem().map_or("pairs".into(), |s| s.to_string_lossy().into_owned());
            let set = WordPairSet::parse(label, &run.read_input("pairs", pairs)?).with_context(|| pairs.display().to_string())?;
            if let Some([lo, hi]) = scale.as_deref() {
                set.check_scale(*lo, *hi)?;
            }
            let params = IcParams::for_taxonomy(&db, run.config.similarity_pos, run.config.similarity_k)?;
            let report = evaluate_pairs(&db, &lexicon.lemma_index(), &set, &params)?;
            let text = render(*format, &report, || report.to_table());
            run.finish(&text)
        }
        Command::EvalWsd {
            instances,
            semeval_xml,
            semeval_key,
            inventory,
            stoplist,
            baseline: with_baseline,
            format,
        } => {
            let mut run = Run::new(common, "eval-wsd")?;
            let db = run.wordnet()?;
            let lexicon = run.lexicon()?;
            let table = run.embeddings()?;
            let stop = run.stoplist(stoplist.as_deref())?;
            let instances = match (instances, semeval_xml, semeval_key) {
                (Some(p), _, _) => WsdInstance::parse_jsonl(&run.read_input("instances", p)?).with_context(|| p.display().to_string())?,
                (None, Some(xml), Some(key)) => {
                    let imported = semeval::import(&run.read_input("semeval_xml", xml)?, &run.read_input("semeval_key", key)?)
                        .with_context(|| xml.display().to_string())?;
                    if !imported.unkeyed.is_empty() {
                        log::warn!("{} instances without a key entry were skipped", imported.unkeyed.len());
                    }
                    imported.instances
                }
                _ => return Err(UsageError("eval-wsd needs --instances or --semeval-xml with --semeval-key".into()).into()),
            };
            let inventory_text = run.read_input("inventory", inventory)?;
            let inventory = SenseInventory::parse(&inventory_text).with_context(|| inventory.display().to_string())?;
            let tok = tokenizer(&lexicon, &table);
            let mut ctx = WsdContext::new(&db, &lexicon, &table, &tok, &stop);
            ctx.window = run.config.wsd_window;
            ctx.sense_repr = run.config.wsd_sense_repr;
            let outcomes = zhwn_core::eval::wsd::run(&instances, &inventory, &ctx)?;
            let result = score(&outcomes)?;
            let base = if *with_baseline {
                Some(score(&baseline(&instances, &inventory)?)?)
            } else {
                None
            };
            let value = json!({ "result": result, "baseline": base, "outcomes": outcomes });
            let text = render(*format, &value, || {
                let mut s = format!("# system\n{}", result.to_table());
                if let Some(b) = &base {
                    s.push_str(&format!("# first-sense baseline\n{}", b.to_table()));
                }
                s
            });
            run.finish(&text)
        }
        Command::Stats { edits } => {
            let mut run = Run::new(common, "stats")?;
            let db = run.wordnet()?;
            let mut lexicon = match &common.lexicon {
                Some(_) => run.lexicon()?,
                None => BilingualLexicon::new(db.version()),
            };
            if let Some(p) = edits {
                run.input("edits", p)?;
                let bytes = std::fs::read(p).with_context(|| format!("reading {}", p.display()))?;
                let list: Vec<_> = verify_log(&bytes)
                    .with_context(|| p.display().to_string())?
                    .into_iter()
                    .map(|r| r.edit)
                    .collect();
                lexicon = apply_edits(&lexicon, &list)?;
            }
            run.finish(&coverage_report(&db, &lexicon).to_table())
        }
        Command::Serve { data, static_dir } => {
            let mut run = Run::new(common, "serve")?;
            let db = match &common.wordnet {
                Some(_) => Some(run.wordnet()?),
                None => None,
            };
            if !data.is_dir() {
                anyhow::bail!("{} is not a directory", data.display());
            }
            let (store, recovery) = zhwn_service::Store::open(data, db)?;
            if recovery.truncated_bytes > 0 {
                log::warn!("edit log: dropped {} bytes of an incomplete record", recovery.truncated_bytes);
            }
            log::info!("{} edits, {} review items", store.log().len(), store.queue().len());
            let addr = zhwn_service::listen_addr().map_err(|e| UsageError(format!("{}: {e}", zhwn_service::LISTEN_ENV)))?;
            let app = zhwn_service::router(zhwn_service::AppState::new(store), static_dir.clone());
            run.finish("")?;
            let rt = tokio::runtime::Runtime::new().context("starting runtime")?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind(addr)
                    .await
                    .with_context(|| format!("binding {addr}"))?;
                log::info!("listening on http://{addr}");
                zhwn_service::serve(listener, app).await.context("serving")
            })
        }
    }
}
