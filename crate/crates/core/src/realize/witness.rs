use super::{decide, forbidden};
use crate::gain_graph::GainGraph;
use crate::minor::{MinorWitness, WitnessBuilder};

/// Shrinks `g` to a minor-minimal graph that is still not `d`-realizable,
/// consulting the decider before every step. Realizability is minor-closed,
/// so a step rejected once stays rejected and one sweep reaches a graph
/// whose every one-step minor is realizable: a forbidden pattern.
pub(super) fn minimal_witness(g: &GainGraph, d: u8) -> Option<MinorWitness> {
    if decide(g, d) {
        return None;
    }
    let mut b = WitnessBuilder::new(g);
    let ids: Vec<_> = g.edges().iter().map(|e| e.id).collect();
    for &id in &ids {
        if g.edge(id).is_some_and(|e| e.is_loop()) {
            b.delete_edge(id).ok()?;
        }
    }
    for v in g.vertices() {
        let Some(local) = b.local(v) else { continue };
        if b.graph().delete_vertex(local).is_ok_and(|h| !decide(&h, d)) {
            b.delete_vertex(v).ok()?;
        }
    }
    for &id in &ids {
        if b.graph().edge(id).is_some() && b.graph().delete_edge(id).is_ok_and(|h| !decide(&h, d)) {
            b.delete_edge(id).ok()?;
        }
    }
    for &id in &ids {
        let contractible = b.graph().edge(id).is_some_and(|e| !e.is_loop());
        if contractible && b.graph().contract_edge(id).is_ok_and(|h| !decide(&h, d)) {
            b.contract(id).ok()?;
        }
    }
    for v in g.vertices() {
        let Some(local) = b.local(v) else { continue };
        if b.graph().incident(local).next().is_none() && b.graph().loops().all(|e| e.tail != local) {
            b.delete_vertex(v).ok()?;
        }
    }
    let pattern = forbidden(d)?.into_iter().find(|p| p.matches(b.graph()))?;
    Some(b.finish(pattern))
}
