//! Exact characters of `F^x`.
//!
//! A character `phi` decomposes uniquely as `nu^{e(phi)} * phi_u` with `e(phi)`
//! rational and `phi_u` unitary. The unitary part lives in a finitely generated
//! abelian group declared up front in a [`SymbolTable`]; the quadratic symbol
//! `eta` (the restriction of `x -> (x,-1)_F` to `GL(1)`) is always present as a
//! built-in generator of order 1 or 2, depending on whether `-1` is a square in
//! the field.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::Rational64;
use num_traits::Zero;
use thiserror::Error;

/// Name of the built-in quadratic symbol.
pub const ETA: &str = "eta";

/// Names that cannot be used for user-declared symbols.
pub const RESERVED_NAMES: [&str; 6] = ["nu", "x", "omega0", "so1", "1", ETA];

/// Order of a unitary symbol generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    One,
    Two,
    Infinite,
}

impl Order {
    /// Reduce an exponent into the canonical range for this order.
    fn reduce(self, k: i64) -> i64 {
        match self {
            Order::One => 0,
            Order::Two => k.rem_euclid(2),
            Order::Infinite => k,
        }
    }

    /// Whether `2k = 0` modulo this order, i.e. the power is its own inverse.
    fn doubles_to_zero(self, k: i64) -> bool {
        self.reduce(2 * k) == 0
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::One => write!(f, "1"),
            Order::Two => write!(f, "2"),
            Order::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Order {
    type Err = CharError;

    fn from_str(s: &str) -> Result<Self, CharError> {
        match s {
            "1" => Ok(Order::One),
            "2" => Ok(Order::Two),
            "inf" => Ok(Order::Infinite),
            other => Err(CharError::BadOrder(other.to_string())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharError {
    #[error("characters belong to different symbol tables")]
    TableMismatch,
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("`{0}` is a reserved name")]
    ReservedName(String),
    #[error("invalid symbol identifier `{0}`")]
    BadIdentifier(String),
    #[error("invalid order `{0}` (expected 1, 2 or inf)")]
    BadOrder(String),
    #[error("eta must have order 1 or 2")]
    BadEtaOrder,
    #[error("characters of a principal series must share one symbol table")]
    MixedTables,
}

/// The declared group of unitary symbols. Index 0 is always `eta`.
#[derive(Debug, PartialEq, Eq)]
pub struct SymbolTable {
    gens: Vec<(String, Order)>,
}

impl SymbolTable {
    /// Build a table from the order of `eta` and the user-declared generators.
    pub fn new(
        eta_order: Order,
        generators: &[(&str, Order)],
    ) -> Result<Arc<Self>, CharError> {
        if eta_order == Order::Infinite {
            return Err(CharError::BadEtaOrder);
        }
        let mut gens = vec![(ETA.to_string(), eta_order)];
        for &(name, order) in generators {
            if RESERVED_NAMES.contains(&name) {
                return Err(CharError::ReservedName(name.to_string()));
            }
            if !is_identifier(name) {
                return Err(CharError::BadIdentifier(name.to_string()));
            }
            if gens.iter().any(|(n, _)| n == name) {
                return Err(CharError::DuplicateSymbol(name.to_string()));
            }
            gens.push((name.to_string(), order));
        }
        Ok(Arc::new(SymbolTable { gens }))
    }

    pub fn eta_order(&self) -> Order {
        self.gens[0].1
    }

    pub fn order_of(&self, index: usize) -> Order {
        self.gens[index].1
    }

    pub fn name_of(&self, index: usize) -> &str {
        &self.gens[index].0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|(n, _)| n == name)
    }

    /// Declared generators, `eta` first.
    pub fn generators(&self) -> impl Iterator<Item = (&str, Order)> {
        self.gens.iter().map(|(n, o)| (n.as_str(), *o))
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        false // eta is always present
    }
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A character of `F^x`: `nu^{exponent}` times a product of unitary symbols.
///
/// Exponents of finite-order generators are kept reduced into `[0, order)` and
/// zero powers are never stored, so structural equality is semantic equality.
#[derive(Clone)]
pub struct Character {
    table: Arc<SymbolTable>,
    exponent: Rational64,
    unitary: BTreeMap<usize, i64>,
}

impl Character {
    pub fn trivial(table: &Arc<SymbolTable>) -> Character {
        Character {
            table: Arc::clone(table),
            exponent: Rational64::zero(),
            unitary: BTreeMap::new(),
        }
    }

    /// `nu^e`.
    pub fn nu(table: &Arc<SymbolTable>, e: Rational64) -> Character {
        Character {
            table: Arc::clone(table),
            exponent: e,
            unitary: BTreeMap::new(),
        }
    }

    /// The built-in quadratic symbol `eta` (trivial when its order is 1).
    pub fn eta(table: &Arc<SymbolTable>) -> Character {
        Character::trivial(table).eta_twist()
    }

    /// A declared unitary symbol by name.
    pub fn symbol(table: &Arc<SymbolTable>, name: &str) -> Result<Character, CharError> {
        let index = table
            .index_of(name)
            .ok_or_else(|| CharError::UnknownSymbol(name.to_string()))?;
        let mut unitary = BTreeMap::new();
        let reduced = table.order_of(index).reduce(1);
        if reduced != 0 {
            unitary.insert(index, reduced);
        }
        Ok(Character {
            table: Arc::clone(table),
            exponent: Rational64::zero(),
            unitary,
        })
    }

    /// `nu^e` times the given symbol powers.
    pub fn build(
        table: &Arc<SymbolTable>,
        e: Rational64,
        symbols: &[(&str, i64)],
    ) -> Result<Character, CharError> {
        let mut out = Character::nu(table, e);
        for &(name, power) in symbols {
            let sym = Character::symbol(table, name)?.pow(power);
            out = out.mul(&sym)?;
        }
        Ok(out)
    }

    pub fn table(&self) -> &Arc<SymbolTable> {
        &self.table
    }

    pub fn exponent(&self) -> Rational64 {
        self.exponent
    }

    /// The unitary part `nu^{-e(phi)} * phi`.
    pub fn unitary_part(&self) -> Character {
        Character {
            table: Arc::clone(&self.table),
            exponent: Rational64::zero(),
            unitary: self.unitary.clone(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.exponent.is_zero() && self.unitary.is_empty()
    }

    fn check_same_table(&self, other: &Character) -> Result<(), CharError> {
        if Arc::ptr_eq(&self.table, &other.table) || *self.table == *other.table {
            Ok(())
        } else {
            Err(CharError::TableMismatch)
        }
    }

    /// Group law: exponents add, symbol powers add with modular reduction.
    pub fn mul(&self, other: &Character) -> Result<Character, CharError> {
        self.check_same_table(other)?;
        let mut unitary = BTreeMap::new();
        let keys = self.unitary.keys().chain(other.unitary.keys());
        for &g in keys {
            if unitary.contains_key(&g) {
                continue;
            }
            let sum = self.unitary.get(&g).copied().unwrap_or(0)
                + other.unitary.get(&g).copied().unwrap_or(0);
            let reduced = self.table.order_of(g).reduce(sum);
            if reduced != 0 {
                unitary.insert(g, reduced);
            }
        }
        Ok(Character {
            table: Arc::clone(&self.table),
            exponent: self.exponent + other.exponent,
            unitary,
        })
    }

    /// The contragredient; for a `GL(1)` character this is the inverse.
    pub fn inverse(&self) -> Character {
        self.pow(-1)
    }

    pub fn pow(&self, k: i64) -> Character {
        let mut unitary = BTreeMap::new();
        for (&g, &e) in &self.unitary {
            let reduced = self.table.order_of(g).reduce(e * k);
            if reduced != 0 {
                unitary.insert(g, reduced);
            }
        }
        Character {
            table: Arc::clone(&self.table),
            exponent: self.exponent * Rational64::from_integer(k),
            unitary,
        }
    }

    /// Multiply by the built-in `eta` (a no-op when `eta` has order 1).
    pub fn eta_twist(&self) -> Character {
        let mut unitary = self.unitary.clone();
        let sum = unitary.get(&0).copied().unwrap_or(0) + 1;
        let reduced = self.table.eta_order().reduce(sum);
        if reduced == 0 {
            unitary.remove(&0);
        } else {
            unitary.insert(0, reduced);
        }
        Character {
            table: Arc::clone(&self.table),
            exponent: self.exponent,
            unitary,
        }
    }

    /// Whether `phi = phi^{-1}`, i.e. the character has order 1 or 2.
    pub fn is_self_dual(&self) -> bool {
        self.exponent.is_zero()
            && self
                .unitary
                .iter()
                .all(|(&g, &e)| self.table.order_of(g).doubles_to_zero(e))
    }

    /// Iterate over the stored `(generator index, power)` pairs.
    pub fn symbol_powers(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.unitary.iter().map(|(&g, &e)| (g, e))
    }
}

// The symbol table is context, not data: comparisons and ordering look only at
// the exponent and the reduced symbol powers.
impl PartialEq for Character {
    fn eq(&self, other: &Self) -> bool {
        self.exponent == other.exponent && self.unitary == other.unitary
    }
}

impl Eq for Character {}

impl PartialOrd for Character {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Character {
    fn cmp(&self, other: &Self) -> Ordering {
        self.exponent
            .cmp(&other.exponent)
            .then_with(|| self.unitary.iter().cmp(other.unitary.iter()))
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        if !self.exponent.is_zero() {
            parts.push(render_nu(self.exponent));
        }
        for (&g, &e) in &self.unitary {
            let name = self.table.name_of(g);
            if e == 1 {
                parts.push(name.to_string());
            } else {
                parts.push(format!("{name}^{e}"));
            }
        }
        write!(f, "{}", parts.join("*"))
    }
}

impl fmt::Debug for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Character({self})")
    }
}

fn render_nu(e: Rational64) -> String {
    if e == Rational64::from_integer(1) {
        "nu".to_string()
    } else if e.is_integer() {
        format!("nu^{}", e.numer())
    } else {
        format!("nu^{{{}/{}}}", e.numer(), e.denom())
    }
}
