#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace reconlab {

struct Edge {
    std::uint32_t u = 0;
    std::uint32_t v = 0;
    std::uint32_t weight_id = 0;
};

inline bool operator==(const Edge& a, const Edge& b) {
    return a.u == b.u && a.v == b.v && a.weight_id == b.weight_id;
}

/** Multigraph on vertices [0, n). Parallel edges and self-loops are allowed;
 *  every edge references a weight table by id. After generation the edge list
 *  is canonicalized (u <= v per edge, then sorted lexicographically) so that
 *  serialization is deterministic. */
struct Multigraph {
    std::uint32_t n = 0;
    std::vector<Edge> edges;
};

/// Normalize endpoint order and sort the edge list; the distribution of the
/// sampled graph is unchanged.
void canonicalize(Multigraph& g);

/// Throws std::invalid_argument if an edge references a vertex >= n.
void validate(const Multigraph& g);

struct Incidence {
    std::uint32_t other;    // the opposite endpoint (== the vertex itself for loops)
    std::uint32_t edge_id;  // index into Multigraph::edges
};

/** Per-vertex incidence lists. A non-loop edge appears once in each endpoint's
 *  list; a self-loop appears exactly once in its vertex's list, so iterating a
 *  vertex's incidences visits each incident edge factor exactly once. */
std::vector<std::vector<Incidence>> adjacency(const Multigraph& g);

/// BFS distances from r; loops and edge multiplicity do not affect distances.
/// Unreachable vertices get UINT32_MAX.
std::vector<std::uint32_t> bfs_distances(const Multigraph& g, std::uint32_t r);

/** Ball/boundary/residual split of a rooted multigraph at radius t.
 *  Vertex sets: ball = {dist <= t}, boundary = {dist == t},
 *  residual = {dist >= t} (unreachable vertices included).
 *  Edge split: an edge is residual iff both endpoints are at distance >= t
 *  (in particular edges joining two boundary vertices are residual); every
 *  other edge is a ball edge. The two edge sets partition the edge list. */
struct BallDecomposition {
    std::uint32_t root = 0;
    std::uint32_t radius = 0;
    std::vector<std::uint32_t> ball_vertices;      // sorted
    std::vector<std::uint32_t> boundary;           // sorted, subset of both sets below
    std::vector<std::uint32_t> residual_vertices;  // sorted
    std::vector<std::uint32_t> ball_edges;         // indices into edges, sorted
    std::vector<std::uint32_t> residual_edges;     // indices into edges, sorted
    std::vector<std::uint32_t> distance;           // BFS distance per vertex (UINT32_MAX if unreachable)
};

BallDecomposition ball_decompose(const Multigraph& g, std::uint32_t r, std::uint32_t t);

/// True iff the ball edges form a tree on the ball vertices: exactly
/// |ball|-1 edges, connected, which also rules out loops and parallel edges.
bool local_tree_check(const Multigraph& g, std::uint32_t r, std::uint32_t t);

struct TreeNode {
    std::int32_t parent = -1;      // -1 marks the root
    std::uint32_t depth = 0;
    std::uint32_t weight_id = 0;   // table id of the edge to the parent (unused at the root)
};

/** Rooted tree stored as a parent-pointer array. Nodes are in breadth-first
 *  order, so parents precede children and depths are nondecreasing. */
struct Tree {
    std::vector<TreeNode> nodes;
    std::uint32_t root = 0;

    std::uint32_t size() const { return static_cast<std::uint32_t>(nodes.size()); }
    std::uint32_t depth() const;
};

void validate(const Tree& t);

/// Children lists indexed by node id, preserving node-id order.
std::vector<std::vector<std::uint32_t>> children_of(const Tree& t);

/// Node ids at exactly the given depth.
std::vector<std::uint32_t> nodes_at_depth(const Tree& t, std::uint32_t depth);

/// View a tree as a multigraph (one edge per non-root node, keeping weight ids).
Multigraph tree_to_multigraph(const Tree& t);

// --- text serialization ----------------------------------------------------
// Graph file: optional '#' comment lines, then "N M", then M lines
// "u v weight_id" (0-based, canonically sorted).
// Tree file: optional '#' comment lines, then one line per node
// "node parent depth weight_id" with parent == -1 for the root.

void write_graph(std::ostream& os, const Multigraph& g);
Multigraph read_graph(std::istream& is);
void write_graph_file(const std::string& path, const Multigraph& g);
Multigraph read_graph_file(const std::string& path);

void write_tree(std::ostream& os, const Tree& t);
Tree read_tree(std::istream& is);
void write_tree_file(const std::string& path, const Tree& t);
Tree read_tree_file(const std::string& path);

}  // namespace reconlab
