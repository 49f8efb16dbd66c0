use super::positions::{distance, AtomPositions};
use crate::error::{Error, Result};

/// Product state of M two-level atoms: bit `i` set means atom `i` is in |e⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisState(pub u32);

impl BasisState {
    pub fn excitations(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_excited(self, atom: usize) -> bool {
        self.0 >> atom & 1 == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisKind {
    /// All 2^M product states.
    Full,
    /// Product states with no two excited atoms closer than `radius`.
    Restricted { radius: f64 },
}

/// Upper limits on the atom count per basis kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisCaps {
    pub full: usize,
    pub restricted: usize,
}

impl Default for BasisCaps {
    fn default() -> Self {
        BasisCaps {
            full: 14,
            restricted: 24,
        }
    }
}

/// An ordered set of product states (ascending bitmask).
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    n_atoms: usize,
    kind: BasisKind,
    /// Empty for the full basis, where index == bitmask.
    states: Vec<u32>,
    /// Per atom, the mask of atoms it may not be co-excited with.
    blockade: Vec<u32>,
}

impl Basis {
    pub fn new(positions: &AtomPositions, kind: BasisKind, caps: BasisCaps) -> Result<Self> {
        let m = positions.len();
        let (limit, label) = match kind {
            BasisKind::Full => (caps.full, "atom count for the full basis"),
            BasisKind::Restricted { .. } => (caps.restricted, "atom count for the restricted basis"),
        };
        if m > limit || m > 31 {
            return Err(Error::Size {
                what: label.into(),
                requested: m,
                limit: limit.min(31),
            });
        }
        if m == 0 {
            return Err(Error::InvalidGeometry("no atoms".into()));
        }
        match kind {
            BasisKind::Full => Ok(Basis {
                n_atoms: m,
                kind,
                states: Vec::new(),
                blockade: vec![0; m],
            }),
            BasisKind::Restricted { radius } => {
                if !(radius.is_finite() && radius > 0.0) {
                    return Err(Error::invalid("restriction_radius", "must be finite and > 0"));
                }
                let blockade = blockade_masks(positions, radius);
                let states = independent_sets(&blockade).into_iter().map(|s| s.0).collect();
                Ok(Basis {
                    n_atoms: m,
                    kind,
                    states,
                    blockade,
                })
            }
        }
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            BasisKind::Full => 1usize << self.n_atoms,
            BasisKind::Restricted { .. } => self.states.len(),
        }
    }

    pub fn state(&self, index: usize) -> BasisState {
        match self.kind {
            BasisKind::Full => BasisState(index as u32),
            BasisKind::Restricted { .. } => BasisState(self.states[index]),
        }
    }

    pub fn index_of(&self, state: BasisState) -> Option<usize> {
        match self.kind {
            BasisKind::Full => {
                let idx = state.0 as usize;
                (idx < self.dim()).then_some(idx)
            }
            BasisKind::Restricted { .. } => self.states.binary_search(&state.0).ok(),
        }
    }

    /// Whether exciting `atom` on top of `state` stays inside the basis.
    pub(crate) fn can_excite(&self, state: BasisState, atom: usize) -> bool {
        !state.is_excited(atom) && state.0 & self.blockade[atom] == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = BasisState> + '_ {
        (0..self.dim()).map(|i| self.state(i))
    }
}

fn blockade_masks(positions: &AtomPositions, radius: f64) -> Vec<u32> {
    let p = positions.as_slice();
    let mut masks = vec![0u32; p.len()];
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if distance(&p[i], &p[j]) < radius {
                masks[i] |= 1 << j;
                masks[j] |= 1 << i;
            }
        }
    }
    masks
}

fn independent_sets(blockade: &[u32]) -> Vec<BasisState> {
    fn grow(atom: usize, mask: u32, forbidden: u32, blockade: &[u32], out: &mut Vec<BasisState>) {
        if atom == blockade.len() {
            out.push(BasisState(mask));
            return;
        }
        grow(atom + 1, mask, forbidden, blockade, out);
        if forbidden >> atom & 1 == 0 {
            grow(atom + 1, mask | 1 << atom, forbidden | blockade[atom], blockade, out);
        }
    }
    let mut out = Vec::new();
    grow(0, 0, 0, blockade, &mut out);
    out.sort_unstable();
    out
}

/// Product states with no two excited atoms closer than `radius`: the
/// independent sets of the blockade graph, vacuum included, in ascending
/// bitmask order.
pub fn enumerate_restricted_basis(positions: &AtomPositions, radius: f64) -> Vec<BasisState> {
    independent_sets(&blockade_masks(positions, radius))
}
