use std::fmt;

use super::PolyError;

const KIND_BIT: u128 = 1 << 127;
const FUNC_SHIFT: u32 = 112;
const ORDER_SHIFT: u32 = 104;
/// Number of derivative slots a packed jet symbol can hold.
pub const MAX_JET_ORDER: usize = 13;

/// A ring generator: either a coordinate or a jet symbol `(function, multi-index)`.
///
/// Packed into a `u128` whose natural order is the variable order:
/// coordinates first (in declaration order), then jets by function,
/// derivative order and multi-index. Smaller key means larger variable.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(u128);

impl Symbol {
    pub fn coord(index: usize) -> Symbol {
        Symbol(index as u128)
    }

    /// `deriv` must be sorted ascending and hold coordinate indices.
    pub fn jet(func: usize, deriv: &[usize]) -> Symbol {
        debug_assert!(deriv.len() <= MAX_JET_ORDER);
        debug_assert!(deriv.windows(2).all(|w| w[0] <= w[1]));
        let mut key = KIND_BIT | ((func as u128) << FUNC_SHIFT) | ((deriv.len() as u128) << ORDER_SHIFT);
        for (slot, &c) in deriv.iter().enumerate() {
            let shift = 8 * (MAX_JET_ORDER - 1 - slot) as u32;
            key |= ((c as u128) + 1) << shift;
        }
        Symbol(key)
    }

    pub fn is_coord(self) -> bool {
        self.0 & KIND_BIT == 0
    }

    pub fn coord_index(self) -> Option<usize> {
        self.is_coord().then_some(self.0 as usize)
    }

    pub fn jet_func(self) -> Option<usize> {
        (!self.is_coord()).then_some(((self.0 >> FUNC_SHIFT) & 0x7fff) as usize)
    }

    pub fn jet_order(self) -> usize {
        if self.is_coord() {
            0
        } else {
            ((self.0 >> ORDER_SHIFT) & 0xff) as usize
        }
    }

    pub fn jet_deriv(self) -> Vec<usize> {
        (0..self.jet_order())
            .map(|slot| {
                let shift = 8 * (MAX_JET_ORDER - 1 - slot) as u32;
                (((self.0 >> shift) & 0xff) as usize) - 1
            })
            .collect()
    }

    /// The jet obtained by one more derivative in coordinate `c`.
    pub fn jet_extend(self, c: usize) -> Option<Symbol> {
        let func = self.jet_func()?;
        let mut d = self.jet_deriv();
        if d.len() >= MAX_JET_ORDER {
            return None;
        }
        let pos = d.partition_point(|&x| x <= c);
        d.insert(pos, c);
        Some(Symbol::jet(func, &d))
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.coord_index() {
            Some(i) => write!(f, "x{i}"),
            None => write!(f, "j{}{:?}", self.jet_func().unwrap(), self.jet_deriv()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetDecl {
    pub name: String,
    /// Coordinate indices, ascending.
    pub deps: Vec<usize>,
    pub max_order: usize,
}

/// Coordinates and formal jet functions of a polynomial ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarTable {
    coords: Vec<String>,
    jets: Vec<JetDecl>,
    tags: Vec<String>,
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric())
}

impl VarTable {
    pub fn new(coords: &[&str]) -> Result<VarTable, PolyError> {
        VarTable::with_jets(coords, &[])
    }

    /// `jets` lists `(name, dependency coordinates, max order)`.
    pub fn with_jets(coords: &[&str], jets: &[(&str, &[&str], usize)]) -> Result<VarTable, PolyError> {
        let coords: Vec<String> = coords.iter().map(|s| s.to_string()).collect();
        for (i, c) in coords.iter().enumerate() {
            if !valid_name(c) {
                return Err(PolyError::BadName(c.clone()));
            }
            if coords[..i].contains(c) {
                return Err(PolyError::DuplicateName(c.clone()));
            }
        }
        let mut decls = Vec::new();
        for (name, deps, max_order) in jets {
            if !valid_name(name) {
                return Err(PolyError::BadName(name.to_string()));
            }
            if coords.iter().any(|c| c == name) || decls.iter().any(|d: &JetDecl| d.name == *name) {
                return Err(PolyError::DuplicateName(name.to_string()));
            }
            let mut idx = Vec::new();
            for d in deps.iter() {
                let i = coords
                    .iter()
                    .position(|c| c == d)
                    .ok_or_else(|| PolyError::UnknownSymbol(d.to_string()))?;
                idx.push(i);
            }
            idx.sort_unstable();
            idx.dedup();
            decls.push(JetDecl { name: name.to_string(), deps: idx, max_order: *max_order });
        }
        let tags = coordinate_tags(&coords)?;
        Ok(VarTable { coords, jets: decls, tags })
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn jets(&self) -> &[JetDecl] {
        &self.jets
    }

    pub fn n_coords(&self) -> usize {
        self.coords.len()
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }

    pub fn jet_index(&self, name: &str) -> Option<usize> {
        self.jets.iter().position(|j| j.name == name)
    }

    /// Partial derivative of a single symbol with respect to coordinate `c`.
    /// `None` means the derivative is zero; `Some(None)` means it is 1.
    pub fn symbol_derivative(&self, s: Symbol, c: usize) -> Option<Option<Symbol>> {
        match s.coord_index() {
            Some(i) => (i == c).then_some(None),
            None => {
                let decl = &self.jets[s.jet_func()?];
                if decl.deps.binary_search(&c).is_ok() {
                    s.jet_extend(c).map(Some)
                } else {
                    None
                }
            }
        }
    }

    pub fn symbol_name(&self, s: Symbol) -> String {
        match s.coord_index() {
            Some(i) => self.coords[i].clone(),
            None => {
                let decl = &self.jets[s.jet_func().unwrap()];
                let d = s.jet_deriv();
                if d.is_empty() {
                    decl.name.clone()
                } else {
                    let mut out = format!("{}_", decl.name);
                    for c in d {
                        out.push_str(&self.tags[c]);
                    }
                    out
                }
            }
        }
    }

    pub fn resolve(&self, name: &str) -> Result<Symbol, PolyError> {
        if let Some(i) = self.coord_index(name) {
            return Ok(Symbol::coord(i));
        }
        if let Some(f) = self.jet_index(name) {
            return Ok(Symbol::jet(f, &[]));
        }
        let unknown = || PolyError::UnknownSymbol(name.to_string());
        let (func, suffix) = name.split_once('_').ok_or_else(unknown)?;
        let f = self.jet_index(func).ok_or_else(unknown)?;
        let mut rest = suffix;
        let mut deriv = Vec::new();
        while !rest.is_empty() {
            let (c, tag) = self
                .tags
                .iter()
                .enumerate()
                .find(|(_, t)| rest.starts_with(t.as_str()))
                .ok_or_else(unknown)?;
            if self.jets[f].deps.binary_search(&c).is_err() {
                return Err(PolyError::JetDependency { jet: name.to_string(), coord: self.coords[c].clone() });
            }
            deriv.push(c);
            rest = &rest[tag.len()..];
        }
        if deriv.is_empty() || deriv.len() > MAX_JET_ORDER {
            return Err(unknown());
        }
        deriv.sort_unstable();
        Ok(Symbol::jet(f, &deriv))
    }

    /// Rejects jets above their declared max order (input validation only).
    pub fn check_order(&self, s: Symbol) -> Result<(), PolyError> {
        if let Some(f) = s.jet_func() {
            let decl = &self.jets[f];
            if s.jet_order() > decl.max_order {
                return Err(PolyError::JetOrder { jet: self.symbol_name(s), max: decl.max_order });
            }
        }
        Ok(())
    }

    /// A copy of the table with an extra coordinate appended (no jet depends on it).
    pub fn with_extra_coord(&self, name: &str) -> Result<VarTable, PolyError> {
        if !valid_name(name) {
            return Err(PolyError::BadName(name.to_string()));
        }
        if self.coord_index(name).is_some() || self.jet_index(name).is_some() {
            return Err(PolyError::DuplicateName(name.to_string()));
        }
        let mut coords = self.coords.clone();
        coords.push(name.to_string());
        let tags = coordinate_tags(&coords)?;
        Ok(VarTable { coords, jets: self.jets.clone(), tags })
    }
}

/// Jet suffix tags: trailing digits when all coordinates share an alphabetic
/// stem (`u1,u2,u3` give `f_23`), otherwise the full coordinate names.
fn coordinate_tags(coords: &[String]) -> Result<Vec<String>, PolyError> {
    let split = |c: &String| {
        let cut = c.find(|ch: char| ch.is_ascii_digit())?;
        let (stem, digits) = c.split_at(cut);
        digits.chars().all(|ch| ch.is_ascii_digit()).then(|| (stem.to_string(), digits.to_string()))
    };
    let parts: Option<Vec<_>> = coords.iter().map(split).collect();
    let tags: Vec<String> = match parts {
        Some(p) if !p.is_empty() && p.iter().all(|(s, _)| *s == p[0].0) => p.into_iter().map(|(_, d)| d).collect(),
        _ => coords.to_vec(),
    };
    for (i, t) in tags.iter().enumerate() {
        for (j, u) in tags.iter().enumerate() {
            if i != j && u.starts_with(t.as_str()) {
                return Err(PolyError::AmbiguousTags(t.clone(), u.clone()));
            }
        }
    }
    Ok(tags)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_names_round_trip() {
        let vt = VarTable::with_jets(&["u2", "u3"], &[("f", &["u2", "u3"], 2)]).unwrap();
        let s = vt.resolve("f_32").unwrap();
        assert_eq!(vt.symbol_name(s), "f_23");
        assert_eq!(s.jet_deriv(), vec![0, 1]);
        let vt = VarTable::with_jets(&["q", "p"], &[("alpha", &["q", "p"], 2)]).unwrap();
        assert_eq!(vt.symbol_name(vt.resolve("alpha_pq").unwrap()), "alpha_qp");
    }

    #[test]
    fn symbol_order_puts_coords_first() {
        let c = Symbol::coord(5);
        let j = Symbol::jet(0, &[]);
        let j1 = Symbol::jet(0, &[0]);
        assert!(c < j && j < j1);
        assert!(Symbol::jet(0, &[0, 1]) < Symbol::jet(0, &[1, 1]));
    }

    #[test]
    fn dependency_is_enforced() {
        let vt = VarTable::with_jets(&["x", "y"], &[("f", &["x"], 2)]).unwrap();
        assert!(matches!(vt.resolve("f_y"), Err(PolyError::JetDependency { .. })));
        let f = vt.resolve("f").unwrap();
        assert_eq!(vt.symbol_derivative(f, 1), None);
        assert_eq!(vt.symbol_derivative(f, 0), Some(Some(vt.resolve("f_x").unwrap())));
    }
}
