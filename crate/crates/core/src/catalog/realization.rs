use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fiber::{Component, SpecialFiber};
use crate::rational::{int, Rat};

/// Building blocks of a polarized metrized graph with integer edge lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Primitive {
    /// One transversal intersection point between two vertices.
    Edge(usize, usize),
    /// A chain of `L - 1` rational components between two vertices.
    Path(usize, usize, u32),
    /// `L = 1`: one more node on the vertex (`p_a + 1`); `L >= 2`: a cycle
    /// of `L - 1` rational components through the vertex.
    Loop(usize, u32),
}

/// Vertices `(id, genus)` and primitives; realized as a reduced fiber whose
/// self-intersections come from the fiber relation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GraphRealization {
    pub vertices: Vec<(String, u32)>,
    pub primitives: Vec<Primitive>,
}

impl GraphRealization {
    pub fn vertex(&mut self, id: &str, genus: u32) -> usize {
        self.vertices.push((id.to_string(), genus));
        self.vertices.len() - 1
    }

    pub fn push(&mut self, p: Primitive) -> &mut Self {
        self.primitives.push(p);
        self
    }

    pub fn realize(&self, name: &str) -> Result<SpecialFiber> {
        let mut ids: Vec<String> = Vec::new();
        let mut genera: Vec<u32> = Vec::new();
        for (id, g) in &self.vertices {
            ids.push(id.clone());
            genera.push(*g);
        }
        let mut meet: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        let mut bump = |a: usize, b: usize| {
            *meet.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        };
        let n = ids.len();
        for (k, prim) in self.primitives.iter().enumerate() {
            let check = |v: usize| {
                if v >= n {
                    Err(Error::InvalidParams(format!("primitive {k} references vertex {v}")))
                } else {
                    Ok(())
                }
            };
            match *prim {
                Primitive::Edge(u, v) => {
                    check(u)?;
                    check(v)?;
                    if u == v {
                        return Err(Error::InvalidParams("edge from a vertex to itself; use a loop".into()));
                    }
                    bump(u, v);
                }
                Primitive::Path(u, v, len) => {
                    check(u)?;
                    check(v)?;
                    if len == 0 || u == v {
                        return Err(Error::InvalidParams(format!("path {k} must join distinct vertices with length >= 1")));
                    }
                    let mut prev = u;
                    for step in 1..len {
                        ids.push(format!("{}-{}#{}.{}", self.vertices[u].0, self.vertices[v].0, k, step));
                        genera.push(0);
                        let cur = ids.len() - 1;
                        bump(prev, cur);
                        prev = cur;
                    }
                    bump(prev, v);
                }
                Primitive::Loop(v, len) => {
                    check(v)?;
                    match len {
                        0 => return Err(Error::InvalidParams(format!("loop {k} has length 0"))),
                        1 => genera[v] += 1,
                        _ => {
                            let mut prev = v;
                            for step in 1..len {
                                ids.push(format!("{}@{}.{}", self.vertices[v].0, k, step));
                                genera.push(0);
                                let cur = ids.len() - 1;
                                bump(prev, cur);
                                prev = cur;
                            }
                            bump(prev, v);
                        }
                    }
                }
            }
        }

        let total = ids.len();
        let mut self_int = vec![0i64; total];
        for (&(a, b), &c) in &meet {
            self_int[a] -= c;
            self_int[b] -= c;
        }
        let edges: i64 = meet.values().sum();
        let genus = genera.iter().map(|&g| g as i64).sum::<i64>() + edges - total as i64 + 1;
        let components = ids
            .into_iter()
            .zip(genera)
            .zip(&self_int)
            .map(|((id, g), s)| Component::new(id, 1, g, int(*s)))
            .collect();
        let entries: Vec<((usize, usize), Rat)> = meet
            .into_iter()
            .map(|(k, c)| (k, int(c)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        SpecialFiber::from_indexed(name, genus, components, entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber::validate;

    #[test]
    fn cycle_through_vertex() {
        let mut g = GraphRealization::default();
        let v = g.vertex("v", 1);
        g.push(Primitive::Loop(v, 3));
        let f = g.realize("c").unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.genus(), 2);
        assert!(validate(&f).is_valid());
    }

    #[test]
    fn loop_of_length_one_raises_genus() {
        let mut g = GraphRealization::default();
        let v = g.vertex("v", 0);
        g.push(Primitive::Loop(v, 1)).push(Primitive::Loop(v, 1));
        let f = g.realize("v").unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.component(0).arithmetic_genus, 2);
        assert_eq!(f.genus(), 2);
    }

    #[test]
    fn path_chain() {
        let mut g = GraphRealization::default();
        let u = g.vertex("u", 1);
        let v = g.vertex("v", 1);
        g.push(Primitive::Path(u, v, 3));
        let f = g.realize("p").unwrap();
        assert_eq!(f.len(), 4);
        assert_eq!(f.component(2).self_intersection, int(-2));
        assert_eq!(f.component(0).self_intersection, int(-1));
        assert!(validate(&f).is_valid());
    }

    #[test]
    fn bad_primitives() {
        let mut g = GraphRealization::default();
        let u = g.vertex("u", 1);
        g.push(Primitive::Edge(u, 4));
        assert!(matches!(g.realize("x"), Err(Error::InvalidParams(_))));
    }
}
