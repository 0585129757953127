//! Special-fiber data, validation and the metrized dual graph.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::hash::{Hash, Hasher};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::RatMatrix;
use crate::rational::{fmt_rat, int, Rat};

/// An irreducible component `Γ_i` of the special fiber.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Component {
    pub id: String,
    /// Multiplicity `b_i` of the component in the fiber divisor.
    pub multiplicity: u32,
    pub arithmetic_genus: u32,
    pub self_intersection: Rat,
}

impl Component {
    pub fn new(id: impl Into<String>, multiplicity: u32, arithmetic_genus: u32, self_intersection: Rat) -> Self {
        Self {
            id: id.into(),
            multiplicity,
            arithmetic_genus,
            self_intersection,
        }
    }

    /// `a_i = (K·Γ_i) = -Γ_i² + 2p_a - 2` (adjunction).
    pub fn canonical_degree(&self) -> Rat {
        -self.self_intersection.clone() + int(2 * self.arithmetic_genus as i64 - 2)
    }
}

/// Identity of a fiber, used to reject mixing divisors of different fibers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FiberKey(u64);

/// The special fiber `X_s = Σ b_i Γ_i` at one non-archimedean place.
///
/// Off-diagonal intersection numbers are stored sparsely as adjacency
/// lists; zero entries are never stored. Self-intersections live on the
/// components and are *not* derived from the fiber relation, so that
/// [`validate`] can catch transcription errors.
#[derive(Debug, Clone)]
pub struct SpecialFiber {
    name: String,
    genus: i64,
    components: Vec<Component>,
    adjacency: Vec<Vec<(usize, Rat)>>,
    index: HashMap<String, usize>,
    key: FiberKey,
}

impl PartialEq for SpecialFiber {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.genus == other.genus
            && self.components == other.components
            && self.adjacency == other.adjacency
    }
}

impl Eq for SpecialFiber {}

impl SpecialFiber {
    /// Build a fiber from component records and `(id, id, value)`
    /// intersection entries.
    ///
    /// Entries may be listed in either orientation; a pair listed twice
    /// must carry the same value. Zero values are dropped.
    pub fn new<I, S>(name: impl Into<String>, genus: i64, components: Vec<Component>, intersections: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S, Rat)>,
        S: AsRef<str>,
    {
        let index = Self::build_index(&components)?;
        let mut entries = Vec::new();
        for (a, b, value) in intersections {
            let lookup = |id: &str| {
                index
                    .get(id)
                    .copied()
                    .ok_or_else(|| Error::MalformedInput(format!("unknown component id `{id}`")))
            };
            entries.push(((lookup(a.as_ref())?, lookup(b.as_ref())?), value));
        }
        Self::assemble(name.into(), genus, components, index, entries)
    }

    /// Same as [`SpecialFiber::new`] with component indices instead of ids.
    pub fn from_indexed(
        name: impl Into<String>,
        genus: i64,
        components: Vec<Component>,
        intersections: impl IntoIterator<Item = ((usize, usize), Rat)>,
    ) -> Result<Self> {
        let index = Self::build_index(&components)?;
        let r = components.len();
        let entries: Vec<_> = intersections.into_iter().collect();
        for ((i, j), _) in &entries {
            for k in [*i, *j] {
                if k >= r {
                    return Err(Error::IndexOutOfRange { index: k, len: r });
                }
            }
        }
        Self::assemble(name.into(), genus, components, index, entries)
    }

    fn build_index(components: &[Component]) -> Result<HashMap<String, usize>> {
        if components.is_empty() {
            return Err(Error::MalformedInput("fiber has no components".into()));
        }
        let mut index = HashMap::with_capacity(components.len());
        for (i, c) in components.iter().enumerate() {
            if c.multiplicity == 0 {
                return Err(Error::MalformedInput(format!("component `{}` has multiplicity 0", c.id)));
            }
            if index.insert(c.id.clone(), i).is_some() {
                return Err(Error::MalformedInput(format!("duplicate component id `{}`", c.id)));
            }
        }
        Ok(index)
    }

    fn assemble(
        name: String,
        genus: i64,
        components: Vec<Component>,
        index: HashMap<String, usize>,
        entries: Vec<((usize, usize), Rat)>,
    ) -> Result<Self> {
        let mut pairs: BTreeMap<(usize, usize), Rat> = BTreeMap::new();
        for ((i, j), value) in entries {
            if i == j {
                return Err(Error::MalformedInput(format!(
                    "intersection entry pairs `{}` with itself; use self_intersection",
                    components[i].id
                )));
            }
            if value.is_negative() {
                return Err(Error::MalformedInput(format!(
                    "negative intersection {} between distinct components `{}` and `{}`",
                    fmt_rat(&value),
                    components[i].id,
                    components[j].id
                )));
            }
            let key = (i.min(j), i.max(j));
            match pairs.get(&key) {
                Some(existing) if *existing != value => {
                    return Err(Error::MalformedInput(format!(
                        "asymmetric intersection data for `{}`/`{}`: {} vs {}",
                        components[key.0].id,
                        components[key.1].id,
                        fmt_rat(existing),
                        fmt_rat(&value)
                    )));
                }
                Some(_) => {}
                None => {
                    pairs.insert(key, value);
                }
            }
        }
        let mut adjacency = vec![Vec::new(); components.len()];
        for ((i, j), value) in pairs {
            if value.is_zero() {
                continue;
            }
            adjacency[i].push((j, value.clone()));
            adjacency[j].push((i, value));
        }
        for row in &mut adjacency {
            row.sort_by_key(|(j, _)| *j);
        }
        let key = Self::compute_key(&name, genus, &components, &adjacency);
        Ok(Self {
            name,
            genus,
            components,
            adjacency,
            index,
            key,
        })
    }

    fn compute_key(name: &str, genus: i64, components: &[Component], adjacency: &[Vec<(usize, Rat)>]) -> FiberKey {
        let mut hasher = DefaultHasher::new();
        name.hash(&mut hasher);
        genus.hash(&mut hasher);
        components.hash(&mut hasher);
        adjacency.hash(&mut hasher);
        FiberKey(hasher.finish())
    }

    /// Changes the name (and hence the key; divisors built for the old
    /// name no longer match).
    pub fn rename(&mut self, name: impl Into<String>) {
        self.name = name.into();
        self.key = Self::compute_key(&self.name, self.genus, &self.components, &self.adjacency);
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn genus(&self) -> i64 {
        self.genus
    }

    pub fn key(&self) -> FiberKey {
        self.key
    }

    /// Number of components `r`.
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Component {
        &self.components[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Components meeting `Γ_i` (excluding `i`) with their intersection numbers.
    pub fn neighbors(&self, i: usize) -> &[(usize, Rat)] {
        &self.adjacency[i]
    }

    /// `(Γ_i·Γ_j)`; the self-intersection when `i == j`.
    pub fn intersection(&self, i: usize, j: usize) -> Rat {
        if i == j {
            return self.components[i].self_intersection.clone();
        }
        self.adjacency[i]
            .binary_search_by_key(&j, |(k, _)| *k)
            .map(|pos| self.adjacency[i][pos].1.clone())
            .unwrap_or_else(|_| Rat::zero())
    }

    /// Nonzero off-diagonal entries `(i, j, (Γ_i·Γ_j))` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &Rat)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().filter(move |(j, _)| *j > i).map(move |(j, v)| (i, *j, v)))
    }

    pub fn multiplicities(&self) -> Vec<u32> {
        self.components.iter().map(|c| c.multiplicity).collect()
    }

    pub fn is_reduced(&self) -> bool {
        self.components.iter().all(|c| c.multiplicity == 1)
    }

    /// `a_i` for every component.
    pub fn canonical_degrees(&self) -> Vec<Rat> {
        self.components.iter().map(Component::canonical_degree).collect()
    }

    /// `(Γ_i · Σ_j y_j Γ_j)` for every `i`, computed sparsely.
    pub fn intersect_with_all(&self, coeffs: &[Rat]) -> Vec<Rat> {
        (0..self.len())
            .map(|i| {
                let mut acc = &self.components[i].self_intersection * &coeffs[i];
                for (j, v) in &self.adjacency[i] {
                    if !coeffs[*j].is_zero() {
                        acc += v * &coeffs[*j];
                    }
                }
                acc
            })
            .collect()
    }

    /// Number of connected components of the graph with edges where `(Γ_i·Γ_j) > 0`.
    pub fn connected_components(&self) -> usize {
        let r = self.len();
        let mut seen = vec![false; r];
        let mut count = 0;
        for start in 0..r {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                for (j, _) in &self.adjacency[i] {
                    if !seen[*j] {
                        seen[*j] = true;
                        queue.push_back(*j);
                    }
                }
            }
        }
        count
    }
}

/// Outcome of one validation check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub fiber: String,
    pub checks: Vec<Check>,
    /// All multiplicities equal 1.
    pub reduced: bool,
    /// Heuristic: no component of genus 0, multiplicity 1 and self-intersection -1.
    pub minimal: bool,
    /// `(id, a_i)` per component.
    pub canonical_degrees: Vec<(String, Rat)>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "fiber {}: {} ({} checks, reduced={}, minimal={})\n",
            self.fiber,
            if self.is_valid() { "valid" } else { "INVALID" },
            self.checks.len(),
            self.reduced,
            self.minimal
        );
        for c in &self.checks {
            out.push_str(&format!(
                "{}\t{}\t{}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.witness
            ));
        }
        for (id, a) in &self.canonical_degrees {
            out.push_str(&format!("a[{id}] = {}\n", fmt_rat(a)));
        }
        out
    }
}

/// Check the standing hypotheses on a fiber.
///
/// Mathematical inconsistencies produce failed checks with witnesses; they
/// are never errors.
pub fn validate(fiber: &SpecialFiber) -> ValidationReport {
    let mut checks = Vec::new();
    for (i, c) in fiber.components().iter().enumerate() {
        let b = |k: usize| int(fiber.component(k).multiplicity as i64);
        let own = b(i) * &c.self_intersection;
        let mut total = own.clone();
        let mut terms = vec![fmt_rat(&own)];
        for (j, v) in fiber.neighbors(i) {
            let t = b(*j) * v;
            terms.push(fmt_rat(&t));
            total += t;
        }
        let passed = total.is_zero();
        checks.push(Check {
            name: format!("fiber_relation[{}]", c.id),
            passed,
            witness: if passed {
                format!("{} = 0", terms.join(" + "))
            } else {
                format!("{} = {} != 0", terms.join(" + "), fmt_rat(&total))
            },
        });
    }

    let weighted: Rat = fiber
        .components()
        .iter()
        .map(|c| int(c.multiplicity as i64) * c.canonical_degree())
        .sum();
    let target = int(2 * fiber.genus() - 2);
    checks.push(Check {
        name: "genus_consistency".into(),
        passed: weighted == target,
        witness: format!("sum b_i a_i = {}, 2g-2 = {}", fmt_rat(&weighted), fmt_rat(&target)),
    });

    let pieces = fiber.connected_components();
    checks.push(Check {
        name: "connected".into(),
        passed: pieces == 1,
        witness: format!("{pieces} connected component(s)"),
    });

    checks.push(Check {
        name: "genus_gt_1".into(),
        passed: fiber.genus() > 1,
        witness: format!("g = {}", fiber.genus()),
    });

    let minus_one = -Rat::one();
    let minimal = !fiber
        .components()
        .iter()
        .any(|c| c.arithmetic_genus == 0 && c.multiplicity == 1 && c.self_intersection == minus_one);

    ValidationReport {
        fiber: fiber.name().to_string(),
        checks,
        reduced: fiber.is_reduced(),
        minimal,
        canonical_degrees: fiber
            .components()
            .iter()
            .map(|c| (c.id.clone(), c.canonical_degree()))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualEdge {
    pub a: usize,
    pub b: usize,
    /// `-1/m_ab`.
    pub length: Rat,
}

/// Metrized graph on the components: an edge of length `-1/m_ij` wherever
/// `m_ij != 0`. No loops, no multiple edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<DualEdge>,
}

impl DualGraph {
    pub fn edge_length(&self, i: usize, j: usize) -> Option<&Rat> {
        let (a, b) = (i.min(j), i.max(j));
        self.edges.iter().find(|e| e.a == a && e.b == b).map(|e| &e.length)
    }
}

pub fn dual_graph(fiber: &SpecialFiber, m: &RatMatrix) -> Result<DualGraph> {
    let r = fiber.len();
    if m.rows() != r || m.cols() != r {
        return Err(Error::DimensionMismatch(format!(
            "fiber has {r} components, matrix is {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let mut edges = Vec::new();
    for i in 0..r {
        for j in i + 1..r {
            let mij = m.get(i, j);
            if !mij.is_zero() {
                edges.push(DualEdge {
                    a: i,
                    b: j,
                    length: -mij.recip(),
                });
            }
        }
    }
    Ok(DualGraph {
        vertices: fiber.components().iter().map(|c| c.id.clone()).collect(),
        edges,
    })
}

/// A horizontal `Q`-divisor of degree `d`, seen only through the incidence
/// numbers `v_i = (b_i Γ_i · D_X)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HorizontalIncidence {
    pub id: String,
    pub degree: Rat,
    pub incidence: Vec<Rat>,
    fiber: FiberKey,
}

impl HorizontalIncidence {
    /// From `(component id, v_i)` entries; unlisted components get 0.
    pub fn new<S: AsRef<str>>(
        fiber: &SpecialFiber,
        id: impl Into<String>,
        degree: Rat,
        entries: impl IntoIterator<Item = (S, Rat)>,
    ) -> Result<Self> {
        let id = id.into();
        let mut incidence = vec![Rat::zero(); fiber.len()];
        let mut seen = vec![false; fiber.len()];
        for (cid, v) in entries {
            let i = fiber.index_of(cid.as_ref()).ok_or_else(|| {
                Error::MalformedInput(format!("divisor `{id}` references unknown component `{}`", cid.as_ref()))
            })?;
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::MalformedInput(format!(
                    "divisor `{id}` lists component `{}` twice",
                    cid.as_ref()
                )));
            }
            incidence[i] = v;
        }
        Ok(Self {
            id,
            degree,
            incidence,
            fiber: fiber.key(),
        })
    }

    pub fn from_vec(fiber: &SpecialFiber, id: impl Into<String>, degree: Rat, incidence: Vec<Rat>) -> Result<Self> {
        if incidence.len() != fiber.len() {
            return Err(Error::DimensionMismatch(format!(
                "incidence has {} entries, fiber has {} components",
                incidence.len(),
                fiber.len()
            )));
        }
        Ok(Self {
            id: id.into(),
            degree,
            incidence,
            fiber: fiber.key(),
        })
    }

    /// Degree-1 divisor meeting only `Γ_l`, with `v_l = 1`.
    pub fn unit(fiber: &SpecialFiber, l: usize) -> Self {
        let mut incidence = vec![Rat::zero(); fiber.len()];
        incidence[l] = Rat::one();
        Self {
            id: format!("unit[{}]", fiber.component(l).id),
            degree: Rat::one(),
            incidence,
            fiber: fiber.key(),
        }
    }

    /// The degree-0 zero divisor.
    pub fn zero(fiber: &SpecialFiber) -> Self {
        Self {
            id: "0".into(),
            degree: Rat::zero(),
            incidence: vec![Rat::zero(); fiber.len()],
            fiber: fiber.key(),
        }
    }

    pub fn fiber_key(&self) -> FiberKey {
        self.fiber
    }

    pub fn incidence_sum(&self) -> Rat {
        self.incidence.iter().sum()
    }

    pub fn scaled(&self, q: &Rat) -> Self {
        Self {
            id: format!("{}*({})", fmt_rat(q), self.id),
            degree: &self.degree * q,
            incidence: self.incidence.iter().map(|v| v * q).collect(),
            fiber: self.fiber,
        }
    }

    /// `self + q·other`.
    pub fn plus_scaled(&self, q: &Rat, other: &Self) -> Result<Self> {
        if self.fiber != other.fiber {
            return Err(Error::FiberMismatch);
        }
        Ok(Self {
            id: format!("{}+{}*({})", self.id, fmt_rat(q), other.id),
            degree: &self.degree + q * &other.degree,
            incidence: self
                .incidence
                .iter()
                .zip(&other.incidence)
                .map(|(a, b)| a + q * b)
                .collect(),
            fiber: self.fiber,
        })
    }
}
