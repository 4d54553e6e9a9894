//! Dynamic assignment of logical qubits to cores.

use crate::circuit::Gate;
use crate::config::{ArchitectureConfig, DstSelectionMode};
use crate::error::{Error, Result};

/// Where each logical qubit currently lives.
///
/// Every core has `capacity` local slots; a mapped qubit owns exactly one
/// slot on exactly one core. Slots are fungible for timing purposes but are
/// tracked so instructions can carry concrete local addresses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    location: Vec<Option<(usize, usize)>>,
    slots: Vec<Vec<Option<usize>>>,
    occupancy: Vec<usize>,
    capacity: usize,
}

impl Placement {
    pub fn empty(num_logical: usize, num_cores: usize, capacity: usize) -> Self {
        Placement {
            location: vec![None; num_logical],
            slots: vec![vec![None; capacity]; num_cores],
            occupancy: vec![0; num_cores],
            capacity,
        }
    }

    pub fn num_cores(&self) -> usize {
        self.occupancy.len()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn num_logical(&self) -> usize {
        self.location.len()
    }

    pub fn core_of(&self, qubit: usize) -> Option<usize> {
        self.location.get(qubit).copied().flatten().map(|(c, _)| c)
    }

    /// Local (relative) address of a qubit inside its core.
    pub fn slot_of(&self, qubit: usize) -> Option<usize> {
        self.location.get(qubit).copied().flatten().map(|(_, s)| s)
    }

    pub fn occupancy(&self) -> &[usize] {
        &self.occupancy
    }

    pub fn free_slots(&self, core: usize) -> usize {
        self.capacity - self.occupancy[core]
    }

    pub fn mapped_count(&self) -> usize {
        self.location.iter().filter(|l| l.is_some()).count()
    }

    /// Lowest free slot of `core`, if any.
    pub fn first_free_slot(&self, core: usize) -> Option<usize> {
        self.slots[core].iter().position(Option::is_none)
    }

    /// Places an unmapped qubit on `core`.
    pub fn assign(&mut self, qubit: usize, core: usize) -> Result<()> {
        if core >= self.num_cores() {
            return Err(Error::Mapping(format!(
                "core {core} out of range (system has {} cores)",
                self.num_cores()
            )));
        }
        if qubit >= self.location.len() {
            self.location.resize(qubit + 1, None);
        }
        if self.location[qubit].is_some() {
            return Err(Error::Mapping(format!("qubit {qubit} mapped twice")));
        }
        let slot = self.first_free_slot(core).ok_or_else(|| {
            Error::Capacity(format!("core {core} already holds {} qubits", self.capacity))
        })?;
        self.slots[core][slot] = Some(qubit);
        self.location[qubit] = Some((core, slot));
        self.occupancy[core] += 1;
        Ok(())
    }

    /// Unmaps a qubit, returning the `(core, slot)` it held.
    pub fn detach(&mut self, qubit: usize) -> Result<(usize, usize)> {
        let (core, slot) = self
            .location
            .get_mut(qubit)
            .and_then(Option::take)
            .ok_or_else(|| Error::Mapping(format!("qubit {qubit} is not mapped")))?;
        self.slots[core][slot] = None;
        self.occupancy[core] -= 1;
        Ok((core, slot))
    }

    /// Moves `qubit` to `dst_core`, freeing its old slot.
    pub fn apply_teleport(&mut self, qubit: usize, dst_core: usize) -> Result<()> {
        let (src, slot) = self
            .location
            .get(qubit)
            .copied()
            .flatten()
            .ok_or_else(|| Error::Mapping(format!("qubit {qubit} is not mapped")))?;
        if dst_core >= self.num_cores() {
            return Err(Error::Mapping(format!("core {dst_core} out of range")));
        }
        if src == dst_core {
            return Ok(());
        }
        let dst_slot = self.first_free_slot(dst_core).ok_or_else(|| {
            Error::Capacity(format!("cannot teleport qubit {qubit} into full core {dst_core}"))
        })?;
        self.slots[src][slot] = None;
        self.occupancy[src] -= 1;
        self.slots[dst_core][dst_slot] = Some(qubit);
        self.occupancy[dst_core] += 1;
        self.location[qubit] = Some((dst_core, dst_slot));
        Ok(())
    }

    /// Current min and max occupancy across cores.
    pub fn occupancy_range(&self) -> (usize, usize) {
        let min = self.occupancy.iter().copied().min().unwrap_or(0);
        let max = self.occupancy.iter().copied().max().unwrap_or(0);
        (min, max)
    }
}

/// Logical qubit `i` goes to core `i mod M`.
pub fn vanilla_map(num_logical: usize, arch: &ArchitectureConfig) -> Result<Placement> {
    let m = arch.num_cores();
    let q = arch.qubits_per_core;
    let needed = num_logical.div_ceil(m);
    if needed > q {
        return Err(Error::Capacity(format!(
            "{num_logical} qubits over {m} cores needs {needed} per core, cores hold {q}"
        )));
    }
    let mut p = Placement::empty(num_logical, m, q);
    for i in 0..num_logical {
        p.assign(i, i % m)?;
    }
    Ok(p)
}

/// Reads a `logical_qubit core_index` mapping file.
pub fn load_mapping(text: &str, arch: &ArchitectureConfig) -> Result<Placement> {
    let mut p = Placement::empty(0, arch.num_cores(), arch.qubits_per_core);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let parse = |s: Option<&str>| -> Result<usize> {
            s.and_then(|s| s.parse().ok()).ok_or_else(|| {
                Error::Mapping(format!("line {}: expected `qubit core`", i + 1))
            })
        };
        let qubit = parse(it.next())?;
        let core = parse(it.next())?;
        if it.next().is_some() {
            return Err(Error::Mapping(format!("line {}: trailing tokens", i + 1)));
        }
        p.assign(qubit, core).map_err(|e| match e {
            Error::Mapping(m) => Error::Mapping(format!("line {}: {m}", i + 1)),
            Error::Capacity(m) => Error::Capacity(format!("line {}: {m}", i + 1)),
            other => other,
        })?;
    }
    Ok(p)
}

/// Picks the core that a two-qubit gate spanning two cores will execute on.
///
/// `first` and `second` are the gate's operands. The returned core must have a
/// free slot for the incoming qubit; if the policy's choice is full, the other
/// core is used.
pub fn select_destination(
    first: usize,
    second: usize,
    p: &Placement,
    mode: DstSelectionMode,
) -> Result<usize> {
    let core_a = p
        .core_of(first)
        .ok_or_else(|| Error::Mapping(format!("qubit {first} is not mapped")))?;
    let core_b = p
        .core_of(second)
        .ok_or_else(|| Error::Mapping(format!("qubit {second} is not mapped")))?;
    choose_between(core_a, core_b, 1, 1, p, mode)
}

/// Destination core for a gate whose qubits span more than one core.
///
/// Two-qubit gates use [`select_destination`]. Wider gates apply the same
/// pairwise policy between the first operand living off the last operand's
/// core and the last operand; every operand not already there is moved.
pub fn select_gate_destination(gate: &Gate, p: &Placement, mode: DstSelectionMode) -> Result<usize> {
    let qs = gate.qubits();
    let cores: Vec<usize> = qs
        .iter()
        .map(|&q| {
            p.core_of(q)
                .ok_or_else(|| Error::Mapping(format!("qubit {q} is not mapped")))
        })
        .collect::<Result<_>>()?;
    let last_core = *cores.last().expect("gate has qubits");
    let Some(pivot) = cores.iter().position(|&c| c != last_core) else {
        return Ok(last_core);
    };
    let pivot_core = cores[pivot];
    let incoming_to = |target: usize| cores.iter().filter(|&&c| c != target).count();
    choose_between(
        pivot_core,
        last_core,
        incoming_to(pivot_core),
        incoming_to(last_core),
        p,
        mode,
    )
}

fn choose_between(
    core_a: usize,
    core_b: usize,
    need_a: usize,
    need_b: usize,
    p: &Placement,
    mode: DstSelectionMode,
) -> Result<usize> {
    let (free_a, free_b) = (p.free_slots(core_a), p.free_slots(core_b));
    let preferred = match mode {
        DstSelectionMode::LoadIndependent => core_b,
        DstSelectionMode::LoadAware if free_a > free_b => core_a,
        DstSelectionMode::LoadAware => core_b,
    };
    let fits = |c: usize| {
        if c == core_a {
            free_a >= need_a
        } else {
            free_b >= need_b
        }
    };
    if fits(preferred) {
        return Ok(preferred);
    }
    let other = if preferred == core_a { core_b } else { core_a };
    if fits(other) {
        return Ok(other);
    }
    Err(Error::Capacity(format!(
        "teleport impossible: cores {core_a} and {core_b} are both full"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arch(m: usize, q: usize) -> ArchitectureConfig {
        ArchitectureConfig {
            mesh_x: m,
            mesh_y: 1,
            qubits_per_core: q,
            ..Default::default()
        }
    }

    fn recount(p: &Placement) -> Vec<usize> {
        let mut occ = vec![0; p.num_cores()];
        for q in 0..p.num_logical() {
            if let Some(c) = p.core_of(q) {
                occ[c] += 1;
            }
        }
        occ
    }

    #[test]
    fn vanilla_mod_m() {
        let p = vanilla_map(5, &arch(4, 2)).unwrap();
        assert_eq!(p.core_of(3), Some(3));
        assert_eq!(p.core_of(4), Some(0));
        assert_eq!(p.core_of(5), None);
    }

    #[test]
    fn vanilla_hundred_on_sixteen() {
        let a = ArchitectureConfig {
            mesh_x: 4,
            mesh_y: 4,
            qubits_per_core: 10,
            ..Default::default()
        };
        let p = vanilla_map(100, &a).unwrap();
        assert_eq!(p.occupancy_range(), (6, 7));
        assert!((0..4).all(|c| p.occupancy()[c] == 7));
        assert!(matches!(vanilla_map(161, &a), Err(Error::Capacity(_))));
        assert!(vanilla_map(160, &a).is_ok());
    }

    #[test]
    fn mapping_file() {
        let p = load_mapping("0 1\n1 1", &arch(2, 2)).unwrap();
        assert_eq!(p.core_of(0), Some(1));
        assert_eq!(p.core_of(1), Some(1));
        assert!(matches!(load_mapping("0 1\n0 2", &arch(3, 2)), Err(Error::Mapping(_))));
        assert!(matches!(load_mapping("0 5", &arch(3, 2)), Err(Error::Mapping(_))));
        assert!(matches!(load_mapping("0 0\n1 0\n2 0", &arch(3, 2)), Err(Error::Capacity(_))));
        assert!(load_mapping("# c\n\n3 0 # x\n", &arch(1, 1)).is_ok());
    }

    fn two_core(free0: usize, free1: usize) -> Placement {
        // qubit 0 on core 0, qubit 1 on core 1, rest padding
        let cap = 8;
        let mut p = Placement::empty(0, 2, cap);
        p.assign(0, 0).unwrap();
        p.assign(1, 1).unwrap();
        let mut next = 2;
        for _ in 0..(cap - 1 - free0) {
            p.assign(next, 0).unwrap();
            next += 1;
        }
        for _ in 0..(cap - 1 - free1) {
            p.assign(next, 1).unwrap();
            next += 1;
        }
        p
    }

    #[test]
    fn destination_policies() {
        let p = two_core(5, 2);
        assert_eq!(select_destination(0, 1, &p, DstSelectionMode::LoadAware).unwrap(), 0);
        assert_eq!(select_destination(0, 1, &p, DstSelectionMode::LoadIndependent).unwrap(), 1);
        let tie = two_core(3, 3);
        assert_eq!(select_destination(0, 1, &tie, DstSelectionMode::LoadAware).unwrap(), 1);
    }

    #[test]
    fn destination_falls_back_when_full() {
        let p = two_core(3, 0);
        assert_eq!(select_destination(0, 1, &p, DstSelectionMode::LoadIndependent).unwrap(), 0);
        let full = two_core(0, 0);
        assert!(matches!(
            select_destination(0, 1, &full, DstSelectionMode::LoadAware),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn teleport_round_trip_and_conservation() {
        let mut p = vanilla_map(4, &arch(2, 3)).unwrap();
        let before = p.clone();
        p.apply_teleport(0, 1).unwrap();
        assert_eq!(p.core_of(0), Some(1));
        assert_eq!(p.occupancy(), &[1, 3]);
        assert_eq!(recount(&p), p.occupancy());
        assert!(matches!(p.apply_teleport(2, 1), Err(Error::Capacity(_))));
        p.apply_teleport(0, 0).unwrap();
        assert_eq!(p, before);
    }

    #[test]
    fn wide_gate_destination() {
        // q0,q1 on core 0, q2 on core 1 (last operand)
        let p = load_mapping("0 0\n1 0\n2 1", &arch(2, 4)).unwrap();
        let g = Gate::unnamed(vec![0, 1, 2]).unwrap();
        // core 0 free 2, core 1 free 3 -> last operand's core wins
        assert_eq!(select_gate_destination(&g, &p, DstSelectionMode::LoadAware).unwrap(), 1);
        let local = Gate::unnamed(vec![0, 1]).unwrap();
        assert_eq!(select_gate_destination(&local, &p, DstSelectionMode::LoadAware).unwrap(), 0);
    }
}
