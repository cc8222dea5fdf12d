#include "reconlab/graph.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace reconlab {

void canonicalize(Multigraph& g) {
    for (auto& e : g.edges) {
        if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(g.edges.begin(), g.edges.end(), [](const Edge& a, const Edge& b) {
        if (a.u != b.u) return a.u < b.u;
        if (a.v != b.v) return a.v < b.v;
        return a.weight_id < b.weight_id;
    });
}

void validate(const Multigraph& g) {
    for (const auto& e : g.edges) {
        if (e.u >= g.n || e.v >= g.n)
            throw std::invalid_argument("multigraph: edge endpoint out of range");
    }
}

std::vector<std::vector<Incidence>> adjacency(const Multigraph& g) {
    std::vector<std::vector<Incidence>> adj(g.n);
    for (std::uint32_t id = 0; id < g.edges.size(); ++id) {
        const Edge& e = g.edges[id];
        adj[e.u].push_back({e.v, id});
        if (e.u != e.v) adj[e.v].push_back({e.u, id});
    }
    return adj;
}

std::vector<std::uint32_t> bfs_distances(const Multigraph& g, std::uint32_t r) {
    if (r >= g.n) throw std::invalid_argument("bfs_distances: root out of range");
    constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max();
    auto adj = adjacency(g);
    std::vector<std::uint32_t> dist(g.n, kInf);
    std::deque<std::uint32_t> queue;
    dist[r] = 0;
    queue.push_back(r);
    while (!queue.empty()) {
        std::uint32_t u = queue.front();
        queue.pop_front();
        for (const auto& inc : adj[u]) {
            if (dist[inc.other] == kInf) {
                dist[inc.other] = dist[u] + 1;
                queue.push_back(inc.other);
            }
        }
    }
    return dist;
}

BallDecomposition ball_decompose(const Multigraph& g, std::uint32_t r, std::uint32_t t) {
    BallDecomposition d;
    d.root = r;
    d.radius = t;
    d.distance = bfs_distances(g, r);
    for (std::uint32_t v = 0; v < g.n; ++v) {
        // unreachable vertices (dist == UINT32_MAX) always count as >= t
        if (d.distance[v] <= t) d.ball_vertices.push_back(v);
        if (d.distance[v] == t) d.boundary.push_back(v);
        if (d.distance[v] >= t) d.residual_vertices.push_back(v);
    }
    for (std::uint32_t id = 0; id < g.edges.size(); ++id) {
        const Edge& e = g.edges[id];
        bool residual = d.distance[e.u] >= t && d.distance[e.v] >= t;
        if (residual)
            d.residual_edges.push_back(id);
        else
            d.ball_edges.push_back(id);
    }
    return d;
}

namespace {

// Union-find over the ball vertex ids, used for the tree check.
struct DisjointSet {
    std::vector<std::uint32_t> parent;
    explicit DisjointSet(std::uint32_t n) : parent(n) {
        for (std::uint32_t i = 0; i < n; ++i) parent[i] = i;
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    bool unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

}  // namespace

bool local_tree_check(const Multigraph& g, std::uint32_t r, std::uint32_t t) {
    BallDecomposition d = ball_decompose(g, r, t);
    if (d.ball_edges.size() + 1 != d.ball_vertices.size()) return false;
    // compress ball vertex ids
    std::vector<std::uint32_t> index(g.n, 0);
    for (std::uint32_t i = 0; i < d.ball_vertices.size(); ++i) index[d.ball_vertices[i]] = i;
    DisjointSet ds(static_cast<std::uint32_t>(d.ball_vertices.size()));
    for (std::uint32_t id : d.ball_edges) {
        const Edge& e = g.edges[id];
        if (!ds.unite(index[e.u], index[e.v])) return false;  // cycle, loop, or parallel edge
    }
    return true;  // |V|-1 successful unions => connected and acyclic
}

std::uint32_t Tree::depth() const {
    std::uint32_t d = 0;
    for (const auto& n : nodes) d = std::max(d, n.depth);
    return d;
}

void validate(const Tree& t) {
    if (t.nodes.empty()) throw std::invalid_argument("tree: empty node list");
    if (t.root >= t.nodes.size()) throw std::invalid_argument("tree: root out of range");
    std::uint32_t roots = 0;
    for (std::uint32_t i = 0; i < t.nodes.size(); ++i) {
        const TreeNode& n = t.nodes[i];
        if (n.parent < 0) {
            ++roots;
            if (i != t.root) throw std::invalid_argument("tree: node without parent is not the root");
            if (n.depth != 0) throw std::invalid_argument("tree: root depth must be 0");
        } else {
            if (static_cast<std::uint32_t>(n.parent) >= t.nodes.size())
                throw std::invalid_argument("tree: parent out of range");
            const TreeNode& p = t.nodes[static_cast<std::uint32_t>(n.parent)];
            if (n.depth != p.depth + 1)
                throw std::invalid_argument("tree: depth(child) must be depth(parent)+1");
        }
    }
    if (roots != 1) throw std::invalid_argument("tree: exactly one root required");
}

std::vector<std::vector<std::uint32_t>> children_of(const Tree& t) {
    std::vector<std::vector<std::uint32_t>> ch(t.nodes.size());
    for (std::uint32_t i = 0; i < t.nodes.size(); ++i) {
        if (t.nodes[i].parent >= 0) ch[static_cast<std::uint32_t>(t.nodes[i].parent)].push_back(i);
    }
    return ch;
}

std::vector<std::uint32_t> nodes_at_depth(const Tree& t, std::uint32_t depth) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < t.nodes.size(); ++i) {
        if (t.nodes[i].depth == depth) out.push_back(i);
    }
    return out;
}

Multigraph tree_to_multigraph(const Tree& t) {
    Multigraph g;
    g.n = t.size();
    for (std::uint32_t i = 0; i < t.nodes.size(); ++i) {
        if (t.nodes[i].parent >= 0) {
            g.edges.push_back({static_cast<std::uint32_t>(t.nodes[i].parent), i, t.nodes[i].weight_id});
        }
    }
    canonicalize(g);
    return g;
}

// --- serialization ----------------------------------------------------------

namespace {

// Strips '#' comments and blank lines; returns false at end of stream.
bool next_content_line(std::istream& is, std::string& line) {
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        bool blank = true;
        for (char c : line) {
            if (!std::isspace(static_cast<unsigned char>(c))) {
                blank = false;
                break;
            }
        }
        if (!blank) return true;
    }
    return false;
}

}  // namespace

void write_graph(std::ostream& os, const Multigraph& g) {
    os << g.n << ' ' << g.edges.size() << '\n';
    for (const auto& e : g.edges) os << e.u << ' ' << e.v << ' ' << e.weight_id << '\n';
}

Multigraph read_graph(std::istream& is) {
    std::string line;
    if (!next_content_line(is, line)) throw std::runtime_error("graph file: missing header");
    std::istringstream header(line);
    Multigraph g;
    std::size_t m = 0;
    if (!(header >> g.n >> m)) throw std::runtime_error("graph file: malformed header");
    g.edges.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (!next_content_line(is, line)) throw std::runtime_error("graph file: truncated edge list");
        std::istringstream row(line);
        Edge e;
        if (!(row >> e.u >> e.v >> e.weight_id)) throw std::runtime_error("graph file: malformed edge line");
        g.edges.push_back(e);
    }
    validate(g);
    return g;
}

void write_graph_file(const std::string& path, const Multigraph& g) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_graph(os, g);
}

Multigraph read_graph_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    return read_graph(is);
}

void write_tree(std::ostream& os, const Tree& t) {
    for (std::uint32_t i = 0; i < t.nodes.size(); ++i) {
        const TreeNode& n = t.nodes[i];
        os << i << ' ' << n.parent << ' ' << n.depth << ' ' << n.weight_id << '\n';
    }
}

Tree read_tree(std::istream& is) {
    Tree t;
    std::string line;
    while (next_content_line(is, line)) {
        std::istringstream row(line);
        std::uint32_t id;
        TreeNode n;
        if (!(row >> id >> n.parent >> n.depth >> n.weight_id))
            throw std::runtime_error("tree file: malformed node line");
        if (id != t.nodes.size()) throw std::runtime_error("tree file: node ids must be consecutive from 0");
        if (n.parent < 0) t.root = id;
        t.nodes.push_back(n);
    }
    validate(t);
    return t;
}

void write_tree_file(const std::string& path, const Tree& t) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_tree(os, t);
}

Tree read_tree_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    return read_tree(is);
}

}  // namespace reconlab
