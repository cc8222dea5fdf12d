#include "reconlab/replica.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "reconlab/csv.hpp"
#include "reconlab/exact.hpp"
#include "reconlab/mcmc.hpp"
#include "reconlab/parallel.hpp"
#include "reconlab/stats.hpp"

namespace reconlab {

double ReplicaType::row_sum(std::uint32_t x) const {
    double s = 0.0;
    for (std::uint32_t y = 0; y < q; ++y) s += at(x, y);
    return s;
}

double ReplicaType::col_sum(std::uint32_t y) const {
    double s = 0.0;
    for (std::uint32_t x = 0; x < q; ++x) s += at(x, y);
    return s;
}

void validate(const ReplicaType& t) {
    if (t.q < 2) throw std::invalid_argument("ReplicaType: alphabet must have >= 2 states");
    if (t.nu.size() != static_cast<std::size_t>(t.q) * t.q)
        throw std::invalid_argument("ReplicaType: entry count != q*q");
    double sum = 0.0;
    for (double v : t.nu) {
        if (!(v >= 0.0)) throw std::invalid_argument("ReplicaType: negative or NaN entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("ReplicaType: entries must sum to 1");
    if (t.n > 0) {
        for (double v : t.nu) {
            double scaled = v * t.n;
            if (std::abs(scaled - std::round(scaled)) > 1e-9)
                throw std::invalid_argument("ReplicaType: n*nu(x,y) must be integral");
        }
    }
}

ReplicaType uniform_type(std::uint32_t q) {
    if (q < 2) throw std::invalid_argument("uniform_type: alphabet must have >= 2 states");
    ReplicaType t;
    t.q = q;
    t.n = 0;
    t.nu.assign(static_cast<std::size_t>(q) * q, 1.0 / (static_cast<double>(q) * q));
    return t;
}

ReplicaType two_replica_type(const Configuration& x1, const Configuration& x2, std::uint32_t q) {
    if (x1.size() != x2.size()) throw std::invalid_argument("two_replica_type: length mismatch");
    if (x1.empty()) throw std::invalid_argument("two_replica_type: empty configurations");
    if (q < 2) throw std::invalid_argument("two_replica_type: alphabet must have >= 2 states");
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(q) * q, 0);
    for (std::size_t i = 0; i < x1.size(); ++i) {
        if (x1[i] >= q || x2[i] >= q)
            throw std::invalid_argument("two_replica_type: state out of alphabet");
        ++counts[static_cast<std::size_t>(x1[i]) * q + x2[i]];
    }
    ReplicaType t;
    t.q = q;
    t.n = static_cast<std::uint32_t>(x1.size());
    t.nu.resize(counts.size());
    for (std::size_t c = 0; c < counts.size(); ++c)
        t.nu[c] = static_cast<double>(counts[c]) / static_cast<double>(t.n);
    return t;
}

double overlap(const Configuration& x1, const Configuration& x2) {
    if (x1.size() != x2.size()) throw std::invalid_argument("overlap: length mismatch");
    if (x1.empty()) throw std::invalid_argument("overlap: empty configurations");
    std::int64_t dot = 0;
    for (std::size_t i = 0; i < x1.size(); ++i) {
        if (x1[i] > 1 || x2[i] > 1) throw std::invalid_argument("overlap: alphabet must be binary");
        dot += (x1[i] == x2[i]) ? 1 : -1;
    }
    return static_cast<double>(dot) / static_cast<double>(x1.size());
}

double q_statistic(const ReplicaType& t, std::uint32_t xi) {
    if (xi >= t.q) throw std::invalid_argument("q_statistic: state out of alphabet");
    const double ubar = 1.0 / (static_cast<double>(t.q) * t.q);
    double diag = t.at(xi, xi) - ubar;
    double row = t.row_sum(xi) - 1.0 / t.q;
    double col = t.col_sum(xi) - 1.0 / t.q;
    return diag - (row + col) / t.q;
}

std::string SphericityRow::csv_header() {
    return "model,N,param1,param2,xi,EQ2_mean,EQ2_stderr,trials,seed";
}

std::string SphericityRow::csv() const {
    std::string s = model;
    s += ',' + std::to_string(n);
    s += ',' + csv_double(param1);
    s += ',' + csv_double(param2);
    s += ',' + std::to_string(xi);
    s += ',' + csv_double(eq2_mean);
    s += ',' + csv_double(eq2_stderr);
    s += ',' + std::to_string(trials);
    s += ',' + std::to_string(seed);
    return s;
}

namespace {

bool state_space_fits(std::uint32_t q, std::uint32_t n, std::uint64_t budget) {
    std::uint64_t total = 1;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (total > budget / q) return false;
        total *= q;
    }
    return total <= budget;
}

}  // namespace

std::vector<SphericityRow> sphericity_estimate(const ExperimentModel& em,
                                               const std::vector<std::uint32_t>& n_grid,
                                               std::uint64_t trials, std::uint64_t seed,
                                               const SphericityOptions& opts) {
    if (n_grid.empty()) throw std::invalid_argument("sphericity_estimate: empty n grid");
    if (trials < 2) throw std::invalid_argument("sphericity_estimate: need >= 2 trials");
    const std::uint32_t q = em.alphabet();
    std::vector<SphericityRow> rows;
    if (opts.dump != nullptr) opts.dump->clear();

    for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
        const std::uint32_t n = n_grid[ni];
        const std::uint64_t n_seed = seed_for(seed, ni);
        const bool exact = state_space_fits(q, n, opts.enumeration_budget);

        std::vector<double> q_squares(trials * q);
        std::vector<Configuration> dumped;
        if (opts.dump != nullptr) dumped.resize(2 * trials);

        parallel_for(trials, opts.jobs, [&](std::uint64_t trial) {
            const std::uint64_t trial_seed = seed_for(n_seed, trial);
            Rng rng = make_rng(seed_for(trial_seed, 0));
            GraphicalModel gm = em.realize(n, rng);
            Configuration x1, x2;
            if (exact) {
                ExactSampler sampler(gm, opts.enumeration_budget);
                x1 = sampler.draw(rng);
                x2 = sampler.draw(rng);
            } else {
                auto pair = sample_replicas(gm, 2, opts.burn_in, 0, seed_for(trial_seed, 1));
                x1 = std::move(pair[0]);
                x2 = std::move(pair[1]);
            }
            ReplicaType type = two_replica_type(x1, x2, q);
            for (std::uint32_t xi = 0; xi < q; ++xi) {
                double v = q_statistic(type, xi);
                q_squares[trial * q + xi] = v * v;
            }
            if (opts.dump != nullptr) {
                dumped[2 * trial] = std::move(x1);
                dumped[2 * trial + 1] = std::move(x2);
            }
        });

        std::vector<double> per_trial(trials);
        for (std::uint32_t xi = 0; xi < q; ++xi) {
            for (std::uint64_t trial = 0; trial < trials; ++trial)
                per_trial[trial] = q_squares[trial * q + xi];
            MeanStderr ms = mean_stderr(per_trial);
            SphericityRow row;
            row.model = em.model_name();
            row.n = n;
            row.param1 = em.density_param();
            row.param2 = em.strength_param();
            row.xi = xi;
            row.eq2_mean = ms.mean;
            row.eq2_stderr = ms.stderr_;
            row.trials = trials;
            row.seed = seed;
            rows.push_back(std::move(row));
        }
        if (opts.dump != nullptr)
            for (auto& c : dumped) opts.dump->push_back(std::move(c));
    }
    return rows;
}

double coloring_F(const ReplicaType& t) {
    double f = 0.0;
    for (std::uint32_t x = 0; x < t.q; ++x) {
        double r = t.row_sum(x);
        f += r * r;
    }
    return 2.0 * f;
}

double coloring_phi(const ReplicaType& t, double gamma_bar, double eps) {
    if (gamma_bar < 0) throw std::invalid_argument("coloring_phi: negative edge density");
    if (eps < 0 || eps > 1) throw std::invalid_argument("coloring_phi: eps outside [0,1]");
    double entropy = 0.0;
    double sumsq = 0.0;
    for (double v : t.nu) {
        if (v > 0) entropy -= v * std::log(v);
        sumsq += v * v;
    }
    const double eb = 1.0 - eps;
    const double arg = 1.0 - eb * coloring_F(t) + eb * eb * sumsq;
    if (arg <= 0) throw std::domain_error("coloring_phi: nonpositive log argument");
    return entropy + gamma_bar * std::log(arg);
}

std::string PhiGapResult::csv_header() { return "q,gamma,eps,delta,deltap,gap,argmin_nu"; }

std::string PhiGapResult::csv() const {
    std::string s = std::to_string(q);
    s += ',' + csv_double(gamma_bar);
    s += ',' + csv_double(eps);
    s += ',' + csv_double(delta);
    s += ',' + csv_double(delta_prime);
    s += ',' + csv_double(gap);
    s += ',';
    for (std::size_t c = 0; c < argmin.nu.size(); ++c) {
        if (c > 0) s += '|';
        s += csv_double(argmin.nu[c]);
    }
    return s;
}

namespace {

/// All ways to write `total` as an ordered sum of `parts` nonnegative integers.
std::vector<std::vector<std::uint32_t>> compositions(std::uint32_t total, std::uint32_t parts) {
    std::vector<std::vector<std::uint32_t>> out;
    std::vector<std::uint32_t> cur(parts, 0);
    // odometer over the first parts-1 cells; the last absorbs the remainder
    std::uint64_t idx = 0;
    (void)idx;
    std::vector<std::uint32_t> head(parts > 0 ? parts - 1 : 0, 0);
    while (true) {
        std::uint32_t used = 0;
        for (std::uint32_t v : head) used += v;
        if (used <= total) {
            for (std::uint32_t i = 0; i + 1 < parts; ++i) cur[i] = head[i];
            cur[parts - 1] = total - used;
            out.push_back(cur);
        }
        std::uint32_t pos = 0;
        while (pos < head.size()) {
            if (++head[pos] <= total) break;
            head[pos] = 0;
            ++pos;
        }
        if (pos == head.size()) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct RowStats {
    double entropy;  // -sum (c/R) log(c/R)
    double sumsq;    // sum (c/R)^2
    double maxdev;   // max |c/R - 1/q^2|
};

}  // namespace

PhiGapResult phi_gap_scan(std::uint32_t q, double gamma_bar, double eps, double delta,
                          double delta_prime, std::uint32_t resolution, std::uint32_t jobs) {
    if (q < 2) throw std::invalid_argument("phi_gap_scan: alphabet must have >= 2 states");
    if (resolution == 0 || resolution % q != 0)
        throw std::invalid_argument("phi_gap_scan: resolution must be a positive multiple of q");
    if (delta < 0) throw std::invalid_argument("phi_gap_scan: negative delta");
    if (gamma_bar < 0) throw std::invalid_argument("phi_gap_scan: negative edge density");
    if (eps < 0 || eps > 1) throw std::invalid_argument("phi_gap_scan: eps outside [0,1]");
    // the gap hypothesis only concerns densities below (q-1)log(q-1)
    const double gamma_q = (q - 1) * std::log(static_cast<double>(q - 1));
    if (!(gamma_bar < gamma_q))
        throw std::invalid_argument("phi_gap_scan: edge density must be below (q-1)*log(q-1)");

    PhiGapResult res;
    res.q = q;
    res.gamma_bar = gamma_bar;
    res.eps = eps;
    res.delta = delta;
    res.delta_prime = delta_prime;
    res.gap = std::numeric_limits<double>::infinity();
    res.argmin = uniform_type(q);

    const double phi_uniform = coloring_phi(uniform_type(q), gamma_bar, eps);
    // row sums are pinned to 1/q on this slice, so F(nu) = 2/q exactly and the
    // F constraint degenerates to delta_prime >= 0
    if (delta_prime < 0) return res;

    const std::uint32_t row_total = resolution / q;
    const auto comps = compositions(row_total, q);
    const double inv_r = 1.0 / resolution;
    const double ubar = 1.0 / (static_cast<double>(q) * q);
    std::vector<RowStats> stats(comps.size());
    for (std::size_t c = 0; c < comps.size(); ++c) {
        RowStats rs{0.0, 0.0, 0.0};
        for (std::uint32_t v : comps[c]) {
            const double p = v * inv_r;
            if (p > 0) rs.entropy -= p * std::log(p);
            rs.sumsq += p * p;
            rs.maxdev = std::max(rs.maxdev, std::abs(p - ubar));
        }
        stats[c] = rs;
    }

    const double eb = 1.0 - eps;
    const double f_slice = 2.0 / q;
    const std::uint64_t n_comp = comps.size();

    struct Best {
        double gap = std::numeric_limits<double>::infinity();
        std::uint64_t index = std::numeric_limits<std::uint64_t>::max();
        std::vector<std::uint32_t> rows;
        std::uint64_t scanned = 0;
    };
    const std::uint32_t workers = std::max<std::uint32_t>(1, jobs);
    std::vector<Best> best(workers);

    parallel_for(n_comp, workers, [&](std::uint64_t first_row) {
        Best& b = best[first_row % workers];
        std::vector<std::uint32_t> rows(q);
        rows[0] = static_cast<std::uint32_t>(first_row);
        // walk the remaining q-1 rows depth-first, folding in per-row stats
        std::vector<double> ent(q + 1, 0.0), sq(q + 1, 0.0), dev(q + 1, 0.0);
        ent[1] = stats[first_row].entropy;
        sq[1] = stats[first_row].sumsq;
        dev[1] = stats[first_row].maxdev;
        auto walk = [&](auto&& self, std::uint32_t depth) -> void {
            if (depth == q) {
                if (dev[q] <= delta) return;
                ++b.scanned;
                const double arg = 1.0 - eb * f_slice + eb * eb * sq[q];
                const double gap = phi_uniform - (ent[q] + gamma_bar * std::log(arg));
                std::uint64_t index = 0;
                for (std::uint32_t d = 0; d < q; ++d) index = index * n_comp + rows[d];
                if (gap < b.gap || (gap == b.gap && index < b.index)) {
                    b.gap = gap;
                    b.index = index;
                    b.rows = rows;
                }
                return;
            }
            for (std::uint64_t c = 0; c < n_comp; ++c) {
                rows[depth] = static_cast<std::uint32_t>(c);
                ent[depth + 1] = ent[depth] + stats[c].entropy;
                sq[depth + 1] = sq[depth] + stats[c].sumsq;
                dev[depth + 1] = std::max(dev[depth], stats[c].maxdev);
                self(self, depth + 1);
            }
        };
        walk(walk, 1);
    });

    Best overall;
    overall.scanned = 0;
    for (const Best& b : best) {
        overall.scanned += b.scanned;
        if (b.gap < overall.gap || (b.gap == overall.gap && b.index < overall.index)) {
            overall.gap = b.gap;
            overall.index = b.index;
            overall.rows = b.rows;
        }
    }
    res.scanned = overall.scanned;
    if (overall.scanned > 0) {
        res.gap = overall.gap;
        ReplicaType arg;
        arg.q = q;
        arg.n = 0;
        arg.nu.resize(static_cast<std::size_t>(q) * q);
        for (std::uint32_t x = 0; x < q; ++x)
            for (std::uint32_t y = 0; y < q; ++y)
                arg.at(x, y) = comps[overall.rows[x]][y] * inv_r;
        res.argmin = std::move(arg);
    }
    return res;
}

}  // namespace reconlab
