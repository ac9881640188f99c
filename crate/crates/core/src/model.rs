//! Scheduling domain: gantry statuses, slot cells, chromosomes, and the
//! run/episode parsers that the fitness function and repair planner share.
//!
//! One slot is one minute of a gantry's day. A chromosome holds `n_g` tracks
//! of `n_t` cells each, stored track-major in a single flat vector so that
//! crossover can treat the whole schedule as one array.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Length of the working cycle `G_R ..= G_PD` in minutes.
pub const CYCLE_LEN: usize = 26;

/// Number of gantry statuses.
pub const N_STATUS: usize = 8;

/// Problem dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub n_g: usize,
    pub n_p: usize,
    pub n_t: usize,
}

impl ProblemSpec {
    pub fn new(n_g: usize, n_p: usize, n_t: usize) -> Result<Self, Error> {
        let spec = Self { n_g, n_p, n_t };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), Error> {
        for (name, v) in [("n_g", self.n_g), ("n_p", self.n_p), ("n_t", self.n_t)] {
            if v == 0 {
                return Err(Error::invalid(name, "must be at least 1"));
            }
        }
        if self.n_p > u32::MAX as usize {
            return Err(Error::invalid("n_p", "exceeds the patient id range"));
        }
        Ok(())
    }

    /// Whether a complete treatment episode can fit on a track at all.
    pub fn is_feasible(&self) -> bool {
        self.n_t >= CYCLE_LEN
    }

    pub fn cells(&self) -> usize {
        self.n_g * self.n_t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum GantryStatus {
    #[serde(rename = "G_IDL")]
    Idle = 0,
    #[serde(rename = "G_R")]
    Ready = 1,
    #[serde(rename = "G_WP")]
    WaitPatient = 2,
    #[serde(rename = "G_AT")]
    AdjustTarget = 3,
    #[serde(rename = "G_WC")]
    WaitControl = 4,
    #[serde(rename = "G_WA")]
    WaitAccelerator = 5,
    #[serde(rename = "G_IR")]
    Irradiation = 6,
    #[serde(rename = "G_PD")]
    DisposePrep = 7,
}

impl GantryStatus {
    pub const ALL: [GantryStatus; N_STATUS] = [
        GantryStatus::Idle,
        GantryStatus::Ready,
        GantryStatus::WaitPatient,
        GantryStatus::AdjustTarget,
        GantryStatus::WaitControl,
        GantryStatus::WaitAccelerator,
        GantryStatus::Irradiation,
        GantryStatus::DisposePrep,
    ];

    /// The working statuses in cycle order.
    pub const CYCLE: [GantryStatus; 7] = [
        GantryStatus::Ready,
        GantryStatus::WaitPatient,
        GantryStatus::AdjustTarget,
        GantryStatus::WaitControl,
        GantryStatus::WaitAccelerator,
        GantryStatus::Irradiation,
        GantryStatus::DisposePrep,
    ];

    /// Nominal duration in minutes.
    pub const fn duration(self) -> usize {
        match self {
            GantryStatus::Idle => 1,
            GantryStatus::Ready => 1,
            GantryStatus::WaitPatient => 3,
            GantryStatus::AdjustTarget => 15,
            GantryStatus::WaitControl => 1,
            GantryStatus::WaitAccelerator => 1,
            GantryStatus::Irradiation => 1,
            GantryStatus::DisposePrep => 4,
        }
    }

    /// Successor in the closed treatment cycle.
    pub const fn expected_next(self) -> GantryStatus {
        match self {
            GantryStatus::Idle => GantryStatus::Ready,
            GantryStatus::Ready => GantryStatus::WaitPatient,
            GantryStatus::WaitPatient => GantryStatus::AdjustTarget,
            GantryStatus::AdjustTarget => GantryStatus::WaitControl,
            GantryStatus::WaitControl => GantryStatus::WaitAccelerator,
            GantryStatus::WaitAccelerator => GantryStatus::Irradiation,
            GantryStatus::Irradiation => GantryStatus::DisposePrep,
            GantryStatus::DisposePrep => GantryStatus::Idle,
        }
    }

    pub const fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<GantryStatus> {
        Self::ALL.get(i).copied()
    }

    pub const fn is_working(self) -> bool {
        !matches!(self, GantryStatus::Idle)
    }

    pub const fn symbol(self) -> &'static str {
        match self {
            GantryStatus::Idle => "G_IDL",
            GantryStatus::Ready => "G_R",
            GantryStatus::WaitPatient => "G_WP",
            GantryStatus::AdjustTarget => "G_AT",
            GantryStatus::WaitControl => "G_WC",
            GantryStatus::WaitAccelerator => "G_WA",
            GantryStatus::Irradiation => "G_IR",
            GantryStatus::DisposePrep => "G_PD",
        }
    }
}

impl fmt::Display for GantryStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for GantryStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|st| st.symbol() == s)
            .ok_or_else(|| Error::invalid("status", format!("unknown status symbol `{s}`")))
    }
}

pub fn status_duration(s: GantryStatus) -> usize {
    s.duration()
}

pub fn expected_next(s: GantryStatus) -> GantryStatus {
    s.expected_next()
}

/// Patient index in `[0, n_p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PatientId(pub u32);

impl PatientId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for PatientId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

/// One minute of one gantry. Idle cells never carry a patient; working
/// cells always do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SlotCell {
    status: GantryStatus,
    patient: Option<PatientId>,
}

impl SlotCell {
    pub const IDLE: SlotCell = SlotCell {
        status: GantryStatus::Idle,
        patient: None,
    };

    /// Builds a working cell. Passing [`GantryStatus::Idle`] yields an idle
    /// cell and the patient is dropped.
    pub fn new(status: GantryStatus, patient: PatientId) -> Self {
        if status.is_working() {
            Self {
                status,
                patient: Some(patient),
            }
        } else {
            Self::IDLE
        }
    }

    /// Checked constructor for deserialized data.
    pub fn try_new(status: GantryStatus, patient: Option<PatientId>) -> Result<Self, Error> {
        match (status.is_working(), patient) {
            (false, None) => Ok(Self::IDLE),
            (true, Some(p)) => Ok(Self::new(status, p)),
            (false, Some(_)) => Err(Error::invalid("cell", "idle cell carries a patient id")),
            (true, None) => Err(Error::invalid(
                "cell",
                format!("{status} cell has no patient id"),
            )),
        }
    }

    pub fn status(&self) -> GantryStatus {
        self.status
    }

    pub fn patient(&self) -> Option<PatientId> {
        self.patient
    }

    pub fn is_idle(&self) -> bool {
        !self.status.is_working()
    }

    /// Patient equality where vacant never matches anything, itself included.
    pub fn same_patient(&self, other: &SlotCell) -> bool {
        matches!((self.patient, other.patient), (Some(a), Some(b)) if a == b)
    }
}

impl Default for SlotCell {
    fn default() -> Self {
        Self::IDLE
    }
}

/// A full daily schedule: `n_g` tracks of `n_t` cells, stored track-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chromosome {
    n_g: usize,
    n_t: usize,
    cells: Vec<SlotCell>,
}

impl Chromosome {
    pub fn idle(n_g: usize, n_t: usize) -> Self {
        Self {
            n_g,
            n_t,
            cells: vec![SlotCell::IDLE; n_g * n_t],
        }
    }

    pub fn from_tracks(tracks: Vec<Vec<SlotCell>>) -> Result<Self, Error> {
        let n_g = tracks.len();
        if n_g == 0 {
            return Err(Error::invalid("tracks", "at least one track is required"));
        }
        let n_t = tracks[0].len();
        if n_t == 0 || tracks.iter().any(|t| t.len() != n_t) {
            return Err(Error::invalid(
                "tracks",
                "all tracks must have the same non-zero length",
            ));
        }
        Ok(Self {
            n_g,
            n_t,
            cells: tracks.into_iter().flatten().collect(),
        })
    }

    pub(crate) fn from_cells(n_g: usize, n_t: usize, cells: Vec<SlotCell>) -> Self {
        debug_assert_eq!(cells.len(), n_g * n_t);
        Self { n_g, n_t, cells }
    }

    pub fn n_g(&self) -> usize {
        self.n_g
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn track(&self, g: usize) -> &[SlotCell] {
        &self.cells[g * self.n_t..(g + 1) * self.n_t]
    }

    pub fn track_mut(&mut self, g: usize) -> &mut [SlotCell] {
        &mut self.cells[g * self.n_t..(g + 1) * self.n_t]
    }

    pub fn tracks(&self) -> impl ExactSizeIterator<Item = &[SlotCell]> + '_ {
        self.cells.chunks_exact(self.n_t)
    }

    pub fn cell(&self, g: usize, t: usize) -> SlotCell {
        self.cells[g * self.n_t + t]
    }

    pub fn set(&mut self, g: usize, t: usize, cell: SlotCell) {
        self.cells[g * self.n_t + t] = cell;
    }

    /// Track-major flattened view.
    pub fn cells(&self) -> &[SlotCell] {
        &self.cells
    }

    /// Checks that every working cell names a patient below `n_p` and the
    /// shape matches `spec`.
    pub fn validate(&self, spec: &ProblemSpec) -> Result<(), Error> {
        if self.n_g != spec.n_g || self.n_t != spec.n_t {
            return Err(Error::invalid(
                "chromosome",
                format!(
                    "shape {}x{} does not match problem {}x{}",
                    self.n_g, self.n_t, spec.n_g, spec.n_t
                ),
            ));
        }
        if let Some(c) = self
            .cells
            .iter()
            .find(|c| c.patient.is_some_and(|p| p.index() >= spec.n_p))
        {
            return Err(Error::invalid(
                "chromosome",
                format!("patient {} out of range", c.patient.unwrap()),
            ));
        }
        Ok(())
    }
}

/// A maximal block of consecutive cells with equal status and patient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Run {
    pub status: GantryStatus,
    pub patient: Option<PatientId>,
    pub start: usize,
    pub len: usize,
}

impl Run {
    pub fn end(&self) -> usize {
        self.start + self.len - 1
    }

    pub fn has_exact_duration(&self) -> bool {
        self.len == self.status.duration()
    }
}

pub fn parse_runs(track: &[SlotCell]) -> Vec<Run> {
    let mut runs: Vec<Run> = Vec::new();
    for (t, cell) in track.iter().enumerate() {
        match runs.last_mut() {
            Some(r) if r.status == cell.status && r.patient == cell.patient => r.len += 1,
            _ => runs.push(Run {
                status: cell.status,
                patient: cell.patient,
                start: t,
                len: 1,
            }),
        }
    }
    runs
}

/// Inverse of [`parse_runs`].
pub fn expand_runs(runs: &[Run]) -> Vec<SlotCell> {
    runs.iter()
        .flat_map(|r| {
            let cell = SlotCell {
                status: r.status,
                patient: r.patient,
            };
            std::iter::repeat_n(cell, r.len)
        })
        .collect()
}

/// One patient's contiguous treatment attempt on one gantry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Episode {
    pub patient: PatientId,
    pub gantry: usize,
    pub start: usize,
    pub end: usize,
    pub complete: bool,
}

/// Splits a track into maximal same-patient working segments. A segment is
/// complete when it is exactly the canonical cycle at nominal durations.
pub fn parse_episodes(track: &[SlotCell], gantry: usize) -> Vec<Episode> {
    episodes_from_runs(&parse_runs(track), gantry)
}

pub(crate) fn episodes_from_runs(runs: &[Run], gantry: usize) -> Vec<Episode> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < runs.len() {
        let Some(patient) = runs[i].patient else {
            i += 1;
            continue;
        };
        let mut j = i + 1;
        while j < runs.len() && runs[j].patient == Some(patient) {
            j += 1;
        }
        let segment = &runs[i..j];
        let complete = segment.len() == GantryStatus::CYCLE.len()
            && segment
                .iter()
                .zip(GantryStatus::CYCLE)
                .all(|(r, s)| r.status == s && r.has_exact_duration());
        out.push(Episode {
            patient,
            gantry,
            start: segment[0].start,
            end: segment[segment.len() - 1].end(),
            complete,
        });
        i = j;
    }
    out
}

/// Uniform random schedule: every cell gets a uniform status and, when
/// working, a uniform patient.
pub fn random_chromosome<R: Rng + ?Sized>(spec: &ProblemSpec, rng: &mut R) -> Chromosome {
    let cells = (0..spec.cells())
        .map(|_| {
            let status = GantryStatus::ALL[rng.random_range(0..N_STATUS)];
            let patient = PatientId(rng.random_range(0..spec.n_p) as u32);
            SlotCell::new(status, patient)
        })
        .collect();
    Chromosome::from_cells(spec.n_g, spec.n_t, cells)
}

/// Cells of one canonical episode for `patient`, in order.
pub fn canonical_cycle(patient: PatientId) -> impl Iterator<Item = SlotCell> {
    GantryStatus::CYCLE
        .into_iter()
        .flat_map(move |s| std::iter::repeat_n(SlotCell::new(s, patient), s.duration()))
}
