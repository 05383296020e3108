//! JSON, CSV, DOT and JSONL formats.

use std::io::Write;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use snapmem_core::dba::CycleRecord;
use snapmem_core::{Cubing, Degree, DirMatrix, LitSet, Literal, Sensorium, Snapshot, WeakPocSet, Weights};

/// A poc set as sensor names plus relations written `"a"` / `"a*"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PocSetFile {
    pub sensors: Vec<String>,
    #[serde(default)]
    pub relations: Vec<[String; 2]>,
}

impl PocSetFile {
    pub fn to_pocset(&self) -> Result<WeakPocSet> {
        let sens = Sensorium::named(self.sensors.iter().cloned());
        let rels =
            self.relations.iter().map(|[a, b]| Ok((sens.parse(a)?, sens.parse(b)?))).collect::<Result<Vec<_>>>()?;
        Ok(WeakPocSet::from_generators(sens, &rels)?)
    }

    pub fn from_pocset(p: &WeakPocSet) -> Self {
        let s = p.sensorium();
        PocSetFile {
            sensors: s.names().to_vec(),
            relations: p.generators().iter().map(|&(a, b)| [s.label(a), s.label(b)]).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensorEntry {
    pub name: String,
    /// 0 for state sensors, 1 for transition sensors.
    pub degree: u8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightsFile {
    Empirical { quad: Vec<[u64; 4]>, marg: Vec<u64> },
    Probabilistic { quad: Vec<[f64; 4]>, marg: Vec<f64> },
}

/// Snapshot checkpoint. Pair weights are listed for sensor pairs `i < j`
/// in the order `j*(j-1)/2 + i`, quadrants `[ab, ab*, a*b, a*b*]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotFile {
    pub sensors: Vec<SensorEntry>,
    pub weights: WeightsFile,
    pub thresholds: Vec<f64>,
    pub state: Vec<String>,
    pub clock: u64,
    pub equivalences: bool,
}

pub fn sensorium_entries(s: &Sensorium) -> Vec<SensorEntry> {
    (0..s.len())
        .map(|i| SensorEntry {
            name: s.sensor_name(i).to_string(),
            degree: match s.degree(i) {
                Degree::State => 0,
                Degree::Transition => 1,
            },
        })
        .collect()
}

pub fn sensorium_from_entries(e: &[SensorEntry]) -> Result<Sensorium> {
    let mut s = Sensorium::new();
    for x in e {
        let d = match x.degree {
            0 => Degree::State,
            1 => Degree::Transition,
            d => bail!("sensor {} has degree {d}; expected 0 or 1", x.name),
        };
        s.add(x.name.clone(), d);
    }
    Ok(s)
}

pub fn labels(s: &Sensorium, set: &LitSet) -> Vec<String> {
    set.iter().map(|l| s.label(l)).collect()
}

pub fn parse_set(s: &Sensorium, names: &[String]) -> Result<LitSet> {
    let mut out = LitSet::new(s.universe());
    for n in names {
        out.insert(s.parse(n)?);
    }
    Ok(out)
}

impl SnapshotFile {
    pub fn from_snapshot(s: &Snapshot) -> Self {
        let weights = match s.weights() {
            Weights::Counts { quad, marg } => WeightsFile::Empirical { quad: quad.clone(), marg: marg.clone() },
            Weights::Mass { quad, marg } => WeightsFile::Probabilistic { quad: quad.clone(), marg: marg.clone() },
        };
        SnapshotFile {
            sensors: sensorium_entries(s.sensorium()),
            weights,
            thresholds: s.thresholds().to_vec(),
            state: labels(s.sensorium(), s.state()),
            clock: s.clock(),
            equivalences: s.equivalences(),
        }
    }

    pub fn to_snapshot(&self) -> Result<Snapshot> {
        let sens = sensorium_from_entries(&self.sensors)?;
        let state = parse_set(&sens, &self.state)?;
        let weights = match &self.weights {
            WeightsFile::Empirical { quad, marg } => Weights::Counts { quad: quad.clone(), marg: marg.clone() },
            WeightsFile::Probabilistic { quad, marg } => Weights::Mass { quad: quad.clone(), marg: marg.clone() },
        };
        Ok(Snapshot::from_parts(sens, weights, self.thresholds.clone(), state, self.clock, self.equivalences)?)
    }
}

/// Dual graph with vertices labelled by their literals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualFile {
    pub vertices: Vec<Vec<String>>,
    pub edges: Vec<[usize; 2]>,
}

impl DualFile {
    pub fn from_cubing(c: &Cubing) -> Self {
        let s = c.pocset().sensorium();
        DualFile {
            vertices: c.vertices().map(|u| labels(s, &c.vertex(u))).collect(),
            edges: c.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }
}

pub fn dual_dot(c: &Cubing) -> String {
    let s = c.pocset().sensorium();
    let mut out = String::from("graph dual {\n");
    for u in c.vertices() {
        let pos: Vec<String> = c.vertex(u).iter().filter(|l| !l.is_starred()).map(|l| s.label(l)).collect();
        out.push_str(&format!("  v{u} [label=\"{{{}}}\"];\n", pos.join(",")));
    }
    for (u, v) in c.edges() {
        out.push_str(&format!("  v{u} -- v{v};\n"));
    }
    out.push_str("}\n");
    out
}

/// Rows `a,b,value` over ordered pairs of proper literals of distinct sensors.
pub fn write_ground_truth<W: Write>(w: W, s: &Sensorium, d: &DirMatrix) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["a", "b", "value"])?;
    let n = d.n_sensors();
    for a in 0..2 * n as u32 {
        for b in 0..2 * n as u32 {
            let (a, b) = (Literal(a), Literal(b));
            if a.sensor() == b.sensor() {
                continue;
            }
            let v = if d.get(a, b) { "1" } else { "0" };
            wr.write_record([s.label(a), s.label(b), v.to_string()])?;
        }
    }
    wr.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceLine {
    pub run_id: usize,
    pub t: u64,
    pub position: usize,
    pub distance: usize,
    pub action: String,
    pub observation: Vec<String>,
    pub state: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scores: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fallback: Option<bool>,
    pub clock: u64,
}

impl TraceLine {
    pub fn new(run_id: usize, s: &Sensorium, actions: &[String], r: &CycleRecord) -> Self {
        TraceLine {
            run_id,
            t: r.t,
            position: r.position,
            distance: r.distance,
            action: actions[r.action].clone(),
            observation: labels(s, &r.observation),
            state: labels(s, &r.state),
            scores: r.decision.as_ref().map(|d| d.scores.clone()),
            fallback: r.decision.as_ref().map(|d| d.fallback),
            clock: r.clock,
        }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}
