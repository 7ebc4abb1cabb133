use crate::gain_graph::{EdgeId, GainGraph, GraphError, Vertex, VertexMap};

use super::{MinorOp, MinorPattern, MinorWitness};

/// Records a minor sequence given in terms of the host's vertex ids,
/// translating each step to the numbering current at that step.
#[derive(Clone, Debug)]
pub struct WitnessBuilder {
    graph: GainGraph,
    /// `current[v - 1]`: where host vertex `v` lives now.
    current: Vec<Option<Vertex>>,
    ops: Vec<MinorOp>,
}

impl WitnessBuilder {
    pub fn new(host: &GainGraph) -> Self {
        WitnessBuilder { graph: host.clone(), current: host.vertices().map(Some).collect(), ops: Vec::new() }
    }

    pub fn graph(&self) -> &GainGraph {
        &self.graph
    }

    pub fn ops(&self) -> &[MinorOp] {
        &self.ops
    }

    pub fn local(&self, host_vertex: Vertex) -> Option<Vertex> {
        self.current.get(host_vertex.wrapping_sub(1)).copied().flatten()
    }

    fn remap(&mut self, map: &VertexMap) {
        for slot in &mut self.current {
            *slot = slot.and_then(|v| map.get(v));
        }
    }

    pub fn delete_vertex(&mut self, host_vertex: Vertex) -> Result<(), GraphError> {
        let v = self.local(host_vertex).ok_or(GraphError::UnknownVertex(host_vertex))?;
        let (g, map) = self.graph.delete_vertex_with_map(v)?;
        self.ops.push(MinorOp::DeleteVertex(v));
        self.graph = g;
        self.remap(&map);
        Ok(())
    }

    pub fn delete_edge(&mut self, id: EdgeId) -> Result<(), GraphError> {
        self.graph = self.graph.delete_edge(id)?;
        self.ops.push(MinorOp::DeleteEdge(id));
        Ok(())
    }

    pub fn contract(&mut self, id: EdgeId) -> Result<(), GraphError> {
        let (g, map) = self.graph.contract_edge_with_map(id)?;
        self.ops.push(MinorOp::Contract(id));
        self.graph = g;
        self.remap(&map);
        Ok(())
    }

    /// Deletes every host vertex outside `vertices` and every edge outside
    /// `edges`.
    pub fn keep_only(&mut self, vertices: &[Vertex], edges: &[EdgeId]) -> Result<(), GraphError> {
        let doomed: Vec<Vertex> = (1..=self.current.len())
            .filter(|v| !vertices.contains(v) && self.local(*v).is_some())
            .collect();
        for v in doomed {
            self.delete_vertex(v)?;
        }
        let extra: Vec<EdgeId> =
            self.graph.edges().iter().map(|e| e.id).filter(|id| !edges.contains(id)).collect();
        for id in extra {
            self.delete_edge(id)?;
        }
        Ok(())
    }

    pub fn finish(self, pattern: MinorPattern) -> MinorWitness {
        MinorWitness { pattern, ops: self.ops }
    }
}
