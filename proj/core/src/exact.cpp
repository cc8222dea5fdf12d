#include "reconlab/exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <deque>
#include <limits>
#include <stdexcept>

namespace reconlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Streaming log-sum-exp with a running max shift.
struct LogSum {
    double max_lw = kNegInf;
    double acc = 0.0;

    void add(double lw) {
        if (lw == kNegInf) return;
        if (lw <= max_lw) {
            acc += std::exp(lw - max_lw);
        } else {
            acc = (max_lw == kNegInf) ? 1.0 : acc * std::exp(max_lw - lw) + 1.0;
            max_lw = lw;
        }
    }
    double value() const { return acc == 0.0 ? kNegInf : max_lw + std::log(acc); }
};

std::uint64_t checked_state_count(std::uint32_t q, std::uint32_t n, std::uint64_t budget) {
    std::uint64_t count = 1;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (count > budget / std::max<std::uint64_t>(q, 1))
            throw std::length_error("enumeration budget exceeded");
        count *= q;
    }
    if (count > budget) throw std::length_error("enumeration budget exceeded");
    return count;
}

/// Odometer step over configurations; returns false after the last state.
bool advance_state(Configuration& x, std::uint32_t q) {
    for (auto& digit : x) {
        if (++digit < q) return true;
        digit = 0;
    }
    return false;
}

}  // namespace

void validate(const Distribution& d) {
    double sum = 0.0;
    for (double v : d.p) {
        if (v < 0) throw std::invalid_argument("distribution: negative probability");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("distribution: probabilities must sum to 1");
}

double tv_distance(const Distribution& a, const Distribution& b) {
    if (a.size() != b.size()) throw std::invalid_argument("tv_distance: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a.p[i] - b.p[i]);
    return 0.5 * s;
}

Distribution uniform_distribution(std::size_t n) {
    Distribution d;
    d.p.assign(n, 1.0 / static_cast<double>(n));
    return d;
}

double exact_log_partition(const GraphicalModel& gm, std::uint64_t budget) {
    checked_state_count(gm.alphabet_size, gm.graph.n, budget);
    LogSum z;
    Configuration x(gm.graph.n, 0);
    do {
        z.add(log_weight(gm, x));
    } while (advance_state(x, gm.alphabet_size));
    return z.value();
}

Distribution exact_marginal(const GraphicalModel& gm, const std::vector<std::uint32_t>& U,
                            std::uint64_t budget) {
    for (std::uint32_t u : U) {
        if (u >= gm.graph.n) throw std::invalid_argument("exact_marginal: vertex out of range");
    }
    checked_state_count(gm.alphabet_size, gm.graph.n, budget);
    std::uint64_t cells = checked_state_count(gm.alphabet_size, static_cast<std::uint32_t>(U.size()), budget);

    // two passes: global max shift, then linear-domain accumulation
    double max_lw = kNegInf;
    Configuration x(gm.graph.n, 0);
    do {
        max_lw = std::max(max_lw, log_weight(gm, x));
    } while (advance_state(x, gm.alphabet_size));
    if (max_lw == kNegInf)
        throw std::domain_error("exact_marginal: no positive-weight configuration");

    std::vector<double> acc(cells, 0.0);
    double total = 0.0;
    std::fill(x.begin(), x.end(), 0);
    do {
        double lw = log_weight(gm, x);
        if (lw == kNegInf) continue;
        double w = std::exp(lw - max_lw);
        std::uint64_t idx = 0;
        for (std::size_t j = U.size(); j-- > 0;) idx = idx * gm.alphabet_size + x[U[j]];
        acc[idx] += w;
        total += w;
    } while (advance_state(x, gm.alphabet_size));

    Distribution d;
    d.p.resize(cells);
    for (std::uint64_t i = 0; i < cells; ++i) d.p[i] = acc[i] / total;
    return d;
}

Distribution exact_conditional_root(const GraphicalModel& gm, std::uint32_t r,
                                    const std::vector<std::pair<std::uint32_t, std::uint8_t>>& frozen,
                                    std::uint64_t budget) {
    const std::uint32_t q = gm.alphabet_size;
    if (r >= gm.graph.n) throw std::invalid_argument("exact_conditional_root: root out of range");
    std::vector<int> frozen_value(gm.graph.n, -1);
    for (const auto& [v, s] : frozen) {
        if (v >= gm.graph.n) throw std::invalid_argument("exact_conditional_root: frozen vertex out of range");
        if (s >= q) throw std::invalid_argument("exact_conditional_root: frozen state out of range");
        frozen_value[v] = s;
    }

    if (frozen_value[r] >= 0) {
        Distribution d;
        d.p.assign(q, 0.0);
        d.p[static_cast<std::uint32_t>(frozen_value[r])] = 1.0;
        return d;
    }

    // BFS from r that never expands through frozen vertices: the reachable
    // unfrozen vertices are the only ones the conditional depends on.
    auto adj = adjacency(gm.graph);
    std::vector<char> reached(gm.graph.n, 0);
    std::vector<std::uint32_t> free_vertices;
    std::deque<std::uint32_t> queue;
    reached[r] = 1;
    queue.push_back(r);
    while (!queue.empty()) {
        std::uint32_t u = queue.front();
        queue.pop_front();
        free_vertices.push_back(u);
        for (const auto& inc : adj[u]) {
            if (!reached[inc.other] && frozen_value[inc.other] < 0) {
                reached[inc.other] = 1;
                queue.push_back(inc.other);
            }
        }
    }
    std::sort(free_vertices.begin(), free_vertices.end());
    std::vector<std::uint32_t> free_index(gm.graph.n, 0);
    for (std::uint32_t i = 0; i < free_vertices.size(); ++i) free_index[free_vertices[i]] = i;

    // factors touching at least one free vertex; everything else is constant,
    // except that a vanishing frozen-frozen factor makes the evidence itself
    // impossible
    std::vector<std::uint32_t> active_edges;
    for (std::uint32_t id = 0; id < gm.graph.edges.size(); ++id) {
        const Edge& e = gm.graph.edges[id];
        bool u_free = reached[e.u] && frozen_value[e.u] < 0;
        bool v_free = reached[e.v] && frozen_value[e.v] < 0;
        if (u_free || v_free) {
            active_edges.push_back(id);
        } else if (frozen_value[e.u] >= 0 && frozen_value[e.v] >= 0) {
            if (gm.tables[e.weight_id].at(static_cast<std::uint32_t>(frozen_value[e.u]),
                                          static_cast<std::uint32_t>(frozen_value[e.v])) == 0)
                throw std::runtime_error("exact_conditional_root: conditioning on impossible evidence");
        }
    }

    checked_state_count(q, static_cast<std::uint32_t>(free_vertices.size()), budget);
    std::vector<LogSum> per_root(q);
    Configuration xf(free_vertices.size(), 0);
    do {
        double lw = 0.0;
        for (std::uint32_t id : active_edges) {
            const Edge& e = gm.graph.edges[id];
            std::uint32_t xu = frozen_value[e.u] >= 0 ? static_cast<std::uint32_t>(frozen_value[e.u])
                                                      : xf[free_index[e.u]];
            std::uint32_t xv = frozen_value[e.v] >= 0 ? static_cast<std::uint32_t>(frozen_value[e.v])
                                                      : xf[free_index[e.v]];
            double w = gm.tables[e.weight_id].at(xu, xv);
            if (w == 0) {
                lw = kNegInf;
                break;
            }
            lw += std::log(w);
        }
        if (lw != kNegInf && !gm.vertex_bias.empty()) {
            for (std::uint32_t i = 0; i < free_vertices.size(); ++i)
                lw += std::log(gm.vertex_bias[xf[i]]);
        }
        if (lw != kNegInf) per_root[xf[free_index[r]]].add(lw);
    } while (advance_state(xf, q));

    double max_lw = kNegInf;
    for (const auto& ls : per_root) max_lw = std::max(max_lw, ls.value());
    if (max_lw == kNegInf)
        throw std::runtime_error("exact_conditional_root: conditioning on impossible evidence");

    Distribution d;
    d.p.resize(q);
    double total = 0.0;
    for (std::uint32_t s = 0; s < q; ++s) {
        double lv = per_root[s].value();
        d.p[s] = lv == kNegInf ? 0.0 : std::exp(lv - max_lw);
        total += d.p[s];
    }
    for (auto& v : d.p) v /= total;
    return d;
}

double exact_joint_product_tv(const GraphicalModel& gm, std::uint32_t r, std::uint32_t t,
                              std::uint64_t budget) {
    const std::uint32_t q = gm.alphabet_size;
    std::uint64_t states = checked_state_count(q, gm.graph.n, budget);
    BallDecomposition dec = ball_decompose(gm.graph, r, t);
    const auto& res = dec.residual_vertices;
    std::uint64_t res_cells = checked_state_count(q, static_cast<std::uint32_t>(res.size()), budget);
    std::vector<std::uint32_t> res_pos(gm.graph.n, 0);
    for (std::uint32_t i = 0; i < res.size(); ++i) res_pos[res[i]] = i;

    // direct route: joint law of (X_r, X_residual) against the product law
    double max_lw = kNegInf;
    Configuration x(gm.graph.n, 0);
    do {
        max_lw = std::max(max_lw, log_weight(gm, x));
    } while (advance_state(x, q));
    if (max_lw == kNegInf)
        throw std::domain_error("exact_joint_product_tv: no positive-weight configuration");

    std::vector<double> joint(static_cast<std::size_t>(res_cells) * q, 0.0);
    std::vector<double> root_marg(q, 0.0);
    std::vector<double> res_marg(res_cells, 0.0);
    double total = 0.0;
    std::fill(x.begin(), x.end(), 0);
    do {
        double lw = log_weight(gm, x);
        if (lw == kNegInf) continue;
        double w = std::exp(lw - max_lw);
        std::uint64_t idx = 0;
        for (std::size_t j = res.size(); j-- > 0;) idx = idx * q + x[res[j]];
        joint[idx * q + x[r]] += w;
        root_marg[x[r]] += w;
        res_marg[idx] += w;
        total += w;
    } while (advance_state(x, q));

    (void)states;
    double direct = 0.0;
    for (std::uint64_t i = 0; i < res_cells; ++i) {
        for (std::uint32_t s = 0; s < q; ++s) {
            direct += std::abs(joint[i * q + s] / total -
                               (root_marg[s] / total) * (res_marg[i] / total));
        }
    }
    direct *= 0.5;

    // boundary-expectation route: D(r,t) is a sufficient statistic for X_r
    Distribution p_r;
    p_r.p.resize(q);
    for (std::uint32_t s = 0; s < q; ++s) p_r.p[s] = root_marg[s] / total;
    Distribution p_boundary = exact_marginal(gm, dec.boundary, budget);
    double expectation = 0.0;
    for (std::uint64_t bidx = 0; bidx < p_boundary.size(); ++bidx) {
        if (p_boundary[bidx] == 0.0) continue;
        std::vector<std::pair<std::uint32_t, std::uint8_t>> frozen;
        std::uint64_t rest = bidx;
        for (std::uint32_t j = 0; j < dec.boundary.size(); ++j) {
            frozen.emplace_back(dec.boundary[j], static_cast<std::uint8_t>(rest % q));
            rest /= q;
        }
        Distribution eta = exact_conditional_root(gm, r, frozen, budget);
        expectation += p_boundary[bidx] * tv_distance(eta, p_r);
    }

    if (std::abs(direct - expectation) > 1e-10)
        throw std::logic_error("exact_joint_product_tv: boundary-expectation identity violated");
    return expectation;
}

double constrained_log_partition(const GraphicalModel& gm, double M, std::uint64_t budget) {
    if (gm.alphabet_size != 2)
        throw std::invalid_argument("constrained_log_partition: binary models only");
    if (!gm.vertex_bias.empty())
        throw std::invalid_argument("constrained_log_partition: bias-free models only");
    const double n = static_cast<double>(gm.graph.n);
    double level_real = n * M;
    double level_rounded = std::round(level_real);
    if (std::abs(level_real - level_rounded) > 1e-9)
        throw std::invalid_argument("constrained_log_partition: N*M must be an integer");
    auto level = static_cast<std::int64_t>(level_rounded);
    if ((level - static_cast<std::int64_t>(gm.graph.n)) % 2 != 0)
        throw std::invalid_argument("constrained_log_partition: N*M must have the parity of N");
    if (std::llabs(level) > gm.graph.n) return kNegInf;  // empty level set

    checked_state_count(2, gm.graph.n, budget);
    LogSum z;
    Configuration x(gm.graph.n, 0);
    do {
        std::int64_t minus = 0;
        for (auto v : x) minus += v;
        std::int64_t mag = static_cast<std::int64_t>(gm.graph.n) - 2 * minus;  // state 0 is spin +1
        if (mag == level) z.add(log_weight(gm, x));
    } while (advance_state(x, 2));
    return z.value();
}

Distribution tilt_distribution(const Distribution& p, const Distribution& q) {
    if (p.size() != q.size()) throw std::invalid_argument("tilt_distribution: size mismatch");
    Distribution out;
    out.p.resize(p.size());
    double z = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        out.p[i] = p.p[i] * q.p[i];
        z += out.p[i];
    }
    if (z <= 0.0) throw std::domain_error("tilt_distribution: p and q have disjoint supports");
    for (auto& v : out.p) v /= z;
    return out;
}

ExactSampler::ExactSampler(const GraphicalModel& gm, std::uint64_t budget)
    : n_(gm.graph.n), q_(gm.alphabet_size) {
    std::uint64_t states = checked_state_count(q_, n_, budget);
    double max_lw = kNegInf;
    Configuration x(n_, 0);
    do {
        max_lw = std::max(max_lw, log_weight(gm, x));
    } while (advance_state(x, q_));
    if (max_lw == kNegInf) throw std::domain_error("ExactSampler: no positive-weight configuration");

    cdf_.resize(states);
    double cum = 0.0;
    std::fill(x.begin(), x.end(), 0);
    std::uint64_t s = 0;
    do {
        double lw = log_weight(gm, x);
        if (lw != kNegInf) cum += std::exp(lw - max_lw);
        cdf_[s++] = cum;
    } while (advance_state(x, q_));
    for (auto& c : cdf_) c /= cum;
    cdf_.back() = 1.0;
}

Configuration ExactSampler::draw(Rng& rng) const {
    double u = uniform_real(rng);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    std::uint64_t s = static_cast<std::uint64_t>(it - cdf_.begin());
    Configuration x(n_);
    for (std::uint32_t i = 0; i < n_; ++i) {
        x[i] = static_cast<std::uint8_t>(s % q_);
        s /= q_;
    }
    return x;
}

Distribution ExactSampler::marginal(std::uint32_t i) const {
    if (i >= n_) throw std::invalid_argument("ExactSampler::marginal: vertex out of range");
    Distribution d;
    d.p.assign(q_, 0.0);
    std::uint64_t stride = 1;
    for (std::uint32_t j = 0; j < i; ++j) stride *= q_;
    double prev = 0.0;
    for (std::uint64_t s = 0; s < cdf_.size(); ++s) {
        double mass = cdf_[s] - prev;
        prev = cdf_[s];
        d.p[(s / stride) % q_] += mass;
    }
    return d;
}

}  // namespace reconlab
