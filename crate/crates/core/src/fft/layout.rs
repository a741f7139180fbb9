//! Maps between sequence positions and crossbar locations.
//!
//! A location is a `(row, unit, slot)` triple: each row of a column unit holds
//! one element per slot. A [`BitLayout`] assigns every bit of a position index
//! to one coordinate bit, optionally followed by the serpentine ("snake")
//! twist used for input and output: within odd rows, the in-row index
//! `unit * slots + slot` runs right to left.

use serde::Serialize;

use crate::oracle::bit_reverse;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Loc {
    pub row: usize,
    pub unit: usize,
    pub slot: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Coord {
    Slot,
    Unit(u32),
    Row(u32),
}

/// Element grid of one sequence: `rows × units × slots` locations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Geometry {
    pub rows: usize,
    pub units: usize,
    pub slots: usize,
}

impl Geometry {
    pub fn len(&self) -> usize {
        self.rows * self.units * self.slots
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, l: Loc) -> usize {
        (l.row * self.units + l.unit) * self.slots + l.slot
    }

    pub fn loc(&self, index: usize) -> Loc {
        Loc {
            slot: index % self.slots,
            unit: (index / self.slots) % self.units,
            row: index / (self.slots * self.units),
        }
    }

    fn in_row_bits(&self) -> u32 {
        (self.units * self.slots).trailing_zeros()
    }

    /// Coordinates other than the slot, unit bits first.
    fn free_coords(&self) -> Vec<Coord> {
        let ub = self.units.trailing_zeros();
        let rb = self.rows.trailing_zeros();
        (0..ub).map(Coord::Unit).chain((0..rb).map(Coord::Row)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BitLayout {
    /// Coordinate of each position bit, least significant first.
    pub coords: Vec<Coord>,
    pub snake: bool,
    /// Positions are bit-reversed before placement.
    pub reversed: bool,
}

impl BitLayout {
    /// Row-major order with the serpentine twist.
    pub fn natural(g: &Geometry) -> Self {
        let mut coords = Vec::new();
        if g.slots == 2 {
            coords.push(Coord::Slot);
        }
        coords.extend(g.free_coords());
        BitLayout {
            coords,
            snake: true,
            reversed: false,
        }
    }

    /// Layout for butterfly stage `s` (1-based) of a two-slot geometry: the
    /// pairing bit `s - 1` sits on the slot, lower bits are shifted up by one
    /// coordinate. Consecutive stage layouts differ by one transposition.
    pub fn stage(g: &Geometry, s: u32) -> Self {
        assert_eq!(g.slots, 2);
        let free = g.free_coords();
        let t = (s - 1) as usize;
        let coords = (0..=free.len())
            .map(|i| match i.cmp(&t) {
                std::cmp::Ordering::Equal => Coord::Slot,
                std::cmp::Ordering::Less => free[i],
                std::cmp::Ordering::Greater => free[i - 1],
            })
            .collect();
        BitLayout {
            coords,
            snake: false,
            reversed: false,
        }
    }

    pub fn bit_reversed(&self) -> Self {
        BitLayout {
            reversed: !self.reversed,
            ..self.clone()
        }
    }

    pub fn locate(&self, g: &Geometry, q: usize) -> Loc {
        let bits = self.coords.len() as u32;
        let q = if self.reversed { bit_reverse(q, bits) } else { q };
        let (mut row, mut unit, mut slot) = (0, 0, 0);
        for (i, c) in self.coords.iter().enumerate() {
            let b = (q >> i) & 1;
            match *c {
                Coord::Slot => slot |= b,
                Coord::Unit(k) => unit |= b << k,
                Coord::Row(k) => row |= b << k,
            }
        }
        if self.snake && row & 1 == 1 {
            let mask = (1usize << g.in_row_bits()) - 1;
            let inrow = (unit * g.slots + slot) ^ mask;
            unit = inrow / g.slots;
            slot = inrow % g.slots;
        }
        Loc { row, unit, slot }
    }

    /// Location of every position.
    pub fn table(&self, g: &Geometry) -> Vec<Loc> {
        (0..g.len()).map(|q| self.locate(g, q)).collect()
    }
}

/// Natural (snake) location of sequence element `j`.
pub fn snake_index(g: &Geometry, j: usize) -> Loc {
    BitLayout::natural(g).locate(g, j)
}
