//! Adapters for models that run as separate processes.

use super::{write_conformations, IoError};
use crate::generative::{GenerationError, RotationDenoiser, RotationQuery, TorsionDenoiser, TorsionQuery};
use crate::metrics::{EnergyOracle, MetricsError};
use crate::polymer::{PolymerConformation, PolymerGraph};
use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

fn shell(command: &str) -> Command {
    let mut c = Command::new("sh");
    c.arg("-c").arg(command);
    c
}

/// Energy from an external program. The command runs once per conformation
/// with the path of a one-conformation file appended as its last argument
/// and must print exactly one real number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalEnergy {
    command: String,
}

impl ExternalEnergy {
    pub fn new(command: impl Into<String>) -> Self {
        ExternalEnergy {
            command: command.into(),
        }
    }

    fn fail(&self, message: impl Into<String>) -> IoError {
        IoError::External {
            command: self.command.clone(),
            message: message.into(),
        }
    }

    pub fn run(&self, conf: &PolymerConformation, graph: &PolymerGraph) -> Result<f64, IoError> {
        let dir = tempfile::tempdir().map_err(|e| self.fail(e.to_string()))?;
        let path = dir.path().join("conformation.conf");
        write_conformations(&path, graph, std::slice::from_ref(conf))?;
        let out = shell(&format!("{} \"$1\"", self.command))
            .arg("polyframe-energy")
            .arg(&path)
            .stdin(Stdio::null())
            .output()
            .map_err(|e| self.fail(e.to_string()))?;
        if !out.status.success() {
            return Err(self.fail(format!(
                "exited with {}: {}",
                out.status,
                String::from_utf8_lossy(&out.stderr).trim()
            )));
        }
        let stdout = String::from_utf8_lossy(&out.stdout);
        let tokens: Vec<&str> = stdout.split_whitespace().collect();
        match tokens.as_slice() {
            [one] => one
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| self.fail(format!("printed {one:?}, not a real number"))),
            _ => Err(self.fail(format!("must print exactly one number, printed {} tokens", tokens.len()))),
        }
    }
}

impl EnergyOracle for ExternalEnergy {
    fn energy(&self, conf: &PolymerConformation, graph: &PolymerGraph) -> Result<f64, MetricsError> {
        self.run(conf, graph).map_err(|e| MetricsError::OracleFailure(e.to_string()))
    }

    fn id(&self) -> String {
        format!("external:{}", self.command)
    }
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Request<'a> {
    Torsion {
        unit: usize,
        t: usize,
        sigma: f64,
        torsions: &'a [f64],
        condition: &'a [f64],
    },
    Rotation {
        t: usize,
        sigma: f64,
        frames: Vec<FrameJson>,
        condition: Vec<Vec<f64>>,
    },
}

#[derive(Serialize)]
struct FrameJson {
    rotation: [[f64; 3]; 3],
    translation: [f64; 3],
}

#[derive(Deserialize)]
struct NoiseResponse {
    noise: Vec<f64>,
}

#[derive(Deserialize)]
struct RotationResponse {
    rotations: Vec<[[f64; 3]; 3]>,
}

struct Process {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

/// Denoiser served by a long-running process speaking JSON lines: one
/// request object per line on its stdin, one response object per line on
/// its stdout.
///
/// Torsion requests look like
/// `{"kind":"torsion","unit":0,"t":17,"sigma":0.3,"torsions":[..],"condition":[..]}`
/// and expect `{"noise":[..]}`. Rotation requests carry `t`, `sigma`,
/// `frames` (row-major `rotation` plus `translation` per unit) and the
/// `condition` matrix, and expect `{"rotations":[[[..],[..],[..]], ..]}`.
/// Calls are serialized through a lock.
pub struct ExternalDenoiser {
    command: String,
    process: Mutex<Process>,
}

impl ExternalDenoiser {
    pub fn spawn(command: impl Into<String>) -> Result<Self, IoError> {
        let command = command.into();
        let mut child = shell(&command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| IoError::External {
                command: command.clone(),
                message: e.to_string(),
            })?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(ExternalDenoiser {
            command,
            process: Mutex::new(Process { child, stdin, stdout }),
        })
    }

    fn call<T: for<'de> Deserialize<'de>>(&self, request: &Request) -> Result<T, GenerationError> {
        let fail = |m: String| GenerationError::Oracle(format!("`{}`: {m}", self.command));
        let mut p = self.process.lock().map_err(|_| fail("lock poisoned".into()))?;
        let mut line = serde_json::to_string(request).expect("request serializes");
        line.push('\n');
        p.stdin.write_all(line.as_bytes()).map_err(|e| fail(e.to_string()))?;
        p.stdin.flush().map_err(|e| fail(e.to_string()))?;
        let mut response = String::new();
        let n = p.stdout.read_line(&mut response).map_err(|e| fail(e.to_string()))?;
        if n == 0 {
            return Err(fail("process closed its output".into()));
        }
        serde_json::from_str(&response).map_err(|e| fail(format!("bad response: {e}")))
    }
}

impl Drop for ExternalDenoiser {
    fn drop(&mut self) {
        if let Ok(p) = self.process.get_mut() {
            let _ = p.child.kill();
            let _ = p.child.wait();
        }
    }
}

impl TorsionDenoiser for ExternalDenoiser {
    fn predict_noise(&self, q: &TorsionQuery) -> Result<Vec<f64>, GenerationError> {
        let r: NoiseResponse = self.call(&Request::Torsion {
            unit: q.unit,
            t: q.t,
            sigma: q.sigma,
            torsions: q.torsions,
            condition: q.condition,
        })?;
        Ok(r.noise)
    }
}

impl RotationDenoiser for ExternalDenoiser {
    fn predict_rotations(&self, q: &RotationQuery) -> Result<Vec<Matrix3<f64>>, GenerationError> {
        let frames = q
            .frames
            .iter()
            .map(|f| {
                let m = f.rotation.matrix();
                FrameJson {
                    rotation: [
                        [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
                        [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
                        [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
                    ],
                    translation: [f.translation.x, f.translation.y, f.translation.z],
                }
            })
            .collect();
        let r: RotationResponse = self.call(&Request::Rotation {
            t: q.t,
            sigma: q.sigma,
            frames,
            condition: q.condition.to_rows(),
        })?;
        Ok(r.rotations
            .iter()
            .map(|m| Matrix3::new(m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2], m[2][0], m[2][1], m[2][2]))
            .collect())
    }
}
