use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use serde_json::{Map, Value};

use crate::config::Settings;
use crate::error::{CliError, CliResult};

pub const MANIFEST: &str = "manifest.json";

const SCALE_NOTE: &str = "desk scale: default n = 2048, M = 500, seed = 42; \
    grids of 1e5 points are not reproduced, only their statistics";

/// Output directory of one command run plus the manifest being assembled.
pub struct Run {
    dir: PathBuf,
    command: &'static str,
    settings: Settings,
    started: Instant,
    outputs: Vec<String>,
    extra: Map<String, Value>,
}

impl Run {
    pub fn start(command: &'static str, settings: Settings) -> CliResult<Self> {
        let dir = PathBuf::from(settings.str("output_dir")?);
        std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        Ok(Self {
            dir,
            command,
            settings,
            started: Instant::now(),
            outputs: Vec::new(),
            extra: Map::new(),
        })
    }

    /// Create `name` in the output directory and fill it with `fill`.
    pub fn write(&mut self, name: &str, fill: impl FnOnce(&mut dyn Write) -> lamperti_core::Result<()>) -> CliResult<PathBuf> {
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = BufWriter::new(file);
        fill(&mut w).map_err(|e| match e {
            lamperti_core::Error::Io(io) => CliError::io(&path, io),
            other => CliError::Core(other),
        })?;
        w.flush().map_err(|e| CliError::io(&path, e))?;
        self.outputs.push(name.to_string());
        Ok(path)
    }

    pub fn write_json(&mut self, name: &str, value: &impl serde::Serialize) -> CliResult<PathBuf> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)?;
            Ok(())
        })
    }

    /// Extra top-level manifest entry.
    pub fn record(&mut self, key: &str, value: impl serde::Serialize) {
        let v = serde_json::to_value(value).expect("manifest values serialize");
        self.extra.insert(key.to_string(), v);
    }

    /// Write `manifest.json`. Everything except `wall_time_s` is a function
    /// of the configuration.
    pub fn finish(mut self) -> CliResult<PathBuf> {
        let mut m = Map::new();
        m.insert("command".into(), Value::from(self.command));
        m.insert("version".into(), Value::from(lamperti_core::VERSION));
        m.insert("seed".into(), Value::from(self.settings.u64("seed")?));
        m.insert("config".into(), Value::Object(self.settings.as_map().clone().into_iter().collect()));
        m.insert("outputs".into(), Value::from(self.outputs.clone()));
        m.insert("scale".into(), Value::from(SCALE_NOTE));
        m.append(&mut self.extra);
        m.insert("wall_time_s".into(), Value::from(self.started.elapsed().as_secs_f64()));
        let path = self.dir.join(MANIFEST);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut w, &Value::Object(m))
            .map_err(|e| CliError::io(&path, std::io::Error::other(e)))?;
        writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}
