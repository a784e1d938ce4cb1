//! Browser demo: paste a graph, fail up to three vertices, and ask whether two
//! vertices are still connected, how many components remain, or whether the
//! failures form a cut.

use ftconn::{Graph, Oracle, Vertex};
use wasm_bindgen::prelude::*;

/// A graph and its preprocessed oracle.
#[wasm_bindgen]
pub struct Demo {
    graph: Graph,
    oracle: Oracle,
}

/// Parse a comma or space separated list of failed vertices.
pub fn parse_failed(text: &str) -> Result<Vec<Vertex>, String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Vertex>().map_err(|e| format!("bad vertex `{s}`: {e}")))
        .collect()
}

impl Demo {
    pub fn load(text: &str) -> Result<Demo, String> {
        let graph = Graph::parse(text).map_err(|e| e.to_string())?;
        let oracle = Oracle::new(&graph);
        Ok(Demo { graph, oracle })
    }

    pub fn query(&self, failed: &str, s: Vertex, t: Vertex) -> Result<bool, String> {
        self.oracle.connected(&parse_failed(failed)?, s, t).map_err(|e| e.to_string())
    }

    pub fn components(&self, failed: &str) -> Result<u32, String> {
        self.oracle.count_components(&parse_failed(failed)?).map_err(|e| e.to_string())
    }

    pub fn cut(&self, failed: &str) -> Result<bool, String> {
        self.oracle.is_cut(&parse_failed(failed)?).map_err(|e| e.to_string())
    }

    pub fn summary(&self) -> String {
        let s = self.oracle.stats();
        format!("{} vertices, {} edges, {} words", self.graph.n(), self.graph.m(), s.words)
    }
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(text: &str) -> Result<Demo, JsError> {
        Demo::load(text).map_err(|e| JsError::new(&e))
    }

    /// Whether `s` and `t` are connected after `failed` fail.
    pub fn connected(&self, failed: &str, s: Vertex, t: Vertex) -> Result<bool, JsError> {
        self.query(failed, s, t).map_err(|e| JsError::new(&e))
    }

    /// Number of components after `failed` fail.
    pub fn count(&self, failed: &str) -> Result<u32, JsError> {
        self.components(failed).map_err(|e| JsError::new(&e))
    }

    /// Whether `failed` disconnects the graph.
    #[wasm_bindgen(js_name = isCut)]
    pub fn is_cut(&self, failed: &str) -> Result<bool, JsError> {
        self.cut(failed).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen(getter)]
    pub fn stats(&self) -> String {
        self.summary()
    }
}
