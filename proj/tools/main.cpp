// reconlab: reproducible experiments for reconstruction on sparse random
// graphs. Every subcommand is deterministic given --seed (or the
// RECONLAB_SEED override) and independent of --jobs; CSV bodies are
// byte-identical across reruns, timestamps live only in the manifest.
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "reconlab/csv.hpp"
#include "reconlab/ensembles.hpp"
#include "reconlab/exact.hpp"
#include "reconlab/experiment.hpp"
#include "reconlab/graph.hpp"
#include "reconlab/model.hpp"
#include "reconlab/parallel.hpp"
#include "reconlab/recon.hpp"
#include "reconlab/replica.hpp"
#include "reconlab/treecalc.hpp"
#include "reconlab/version.hpp"

namespace {

using nlohmann::json;
using namespace reconlab;

std::vector<std::string> g_argv;

std::uint64_t effective_seed(std::uint64_t cli_seed) {
    const char* env = std::getenv("RECONLAB_SEED");
    if (env == nullptr || *env == '\0') return cli_seed;
    std::string s(env);
    std::size_t pos = 0;
    std::uint64_t v = 0;
    try {
        v = std::stoull(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("RECONLAB_SEED must be an unsigned integer, got: " + s);
    }
    if (pos != s.size())
        throw std::invalid_argument("RECONLAB_SEED must be an unsigned integer, got: " + s);
    return v;
}

double parse_number(const std::string& s) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad number in grid: " + s);
    }
    if (pos != s.size()) throw std::invalid_argument("bad number in grid: " + s);
    return v;
}

/// Grid syntax: "a,b,c" or "lo..hi" (step 1) or "lo..hi:step".
std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> out;
    const auto dots = spec.find("..");
    if (dots == std::string::npos) {
        std::size_t start = 0;
        while (start <= spec.size()) {
            const auto comma = spec.find(',', start);
            const std::string item =
                spec.substr(start, comma == std::string::npos ? comma : comma - start);
            out.push_back(parse_number(item));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    } else {
        const double lo = parse_number(spec.substr(0, dots));
        std::string rest = spec.substr(dots + 2);
        double step = 1.0;
        const auto colon = rest.find(':');
        if (colon != std::string::npos) {
            step = parse_number(rest.substr(colon + 1));
            rest = rest.substr(0, colon);
        }
        const double hi = parse_number(rest);
        if (step <= 0) throw std::invalid_argument("grid step must be positive: " + spec);
        if (hi < lo) throw std::invalid_argument("grid upper end below lower end: " + spec);
        const auto count = static_cast<std::uint64_t>((hi - lo) / step + 1e-9) + 1;
        for (std::uint64_t i = 0; i < count; ++i) out.push_back(lo + static_cast<double>(i) * step);
    }
    if (out.empty()) throw std::invalid_argument("empty grid: " + spec);
    return out;
}

std::vector<std::uint32_t> parse_grid_u32(const std::string& spec) {
    std::vector<std::uint32_t> out;
    for (double v : parse_grid(spec)) {
        if (v < 0 || v != static_cast<double>(static_cast<std::uint32_t>(v)))
            throw std::invalid_argument("grid must contain nonnegative integers: " + spec);
        out.push_back(static_cast<std::uint32_t>(v));
    }
    return out;
}

std::string iso_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct RunTimer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    os << body;
    if (!os) throw std::runtime_error("write failed: " + path);
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows) {
    std::string body = header;
    body += '\n';
    for (const auto& r : rows) {
        body += r;
        body += '\n';
    }
    write_text_file(path, body);
}

/// The manifest carries everything volatile (timestamps, wall time) so the
/// data files themselves stay byte-stable.
void write_manifest(const std::string& anchor_output, const std::string& subcommand,
                    const json& params, const std::vector<std::string>& outputs,
                    std::uint64_t seed, unsigned jobs, double wall_seconds) {
    json m;
    m["tool"] = "reconlab";
    m["version"] = kVersion;
    m["subcommand"] = subcommand;
    m["argv"] = g_argv;
    m["parameters"] = params;
    m["seed"] = seed;
    m["jobs"] = jobs;
    m["outputs"] = outputs;
    m["wall_time_seconds"] = wall_seconds;
    m["written_at_utc"] = iso_utc_now();
    write_text_file(anchor_output + ".manifest.json", m.dump(2) + "\n");
}

/// One configuration per line: concatenated digits for alphabets up to 10,
/// comma-separated indices beyond that.
void write_configurations(const std::string& path, const std::vector<Configuration>& configs) {
    bool wide = false;
    for (const auto& c : configs)
        for (std::uint8_t v : c)
            if (v > 9) wide = true;
    std::string body;
    for (const auto& c : configs) {
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (wide && i > 0) body += ',';
            body += std::to_string(static_cast<unsigned>(c[i]));
        }
        body += '\n';
    }
    write_text_file(path, body);
}

// ---------------------------------------------------------------- gen -----

struct GenGraphOpts {
    std::uint32_t n = 0;
    std::uint32_t k = 2;
    double gamma = 1.0;
    std::uint64_t seed = 1;
    std::string out;
};

void run_gen_poisson(const GenGraphOpts& o) {
    RunTimer timer;
    const std::uint64_t seed = effective_seed(o.seed);
    Rng rng = make_rng(seed);
    const Multigraph g = sample_poisson_multigraph(o.n, o.gamma, rng);
    write_graph_file(o.out, g);
    write_manifest(o.out, "gen poisson",
                   json{{"n", o.n}, {"gamma", o.gamma}, {"edges", g.edges.size()}}, {o.out}, seed,
                   1, timer.seconds());
}

void run_gen_regular(const GenGraphOpts& o) {
    RunTimer timer;
    const std::uint64_t seed = effective_seed(o.seed);
    Rng rng = make_rng(seed);
    const Multigraph g = sample_regular_multigraph(o.n, o.k, rng);
    write_graph_file(o.out, g);
    write_manifest(o.out, "gen regular",
                   json{{"n", o.n}, {"k", o.k}, {"edges", g.edges.size()}}, {o.out}, seed, 1,
                   timer.seconds());
}

struct GenTreeOpts {
    std::uint32_t k = 2;
    double gamma = 1.0;
    std::uint32_t depth = 3;
    std::uint64_t seed = 1;
    std::string out;
};

void run_gen_gw(const GenTreeOpts& o) {
    RunTimer timer;
    const std::uint64_t seed = effective_seed(o.seed);
    Rng rng = make_rng(seed);
    const Tree t = sample_galton_watson_tree(o.gamma, o.depth, rng);
    write_tree_file(o.out, t);
    write_manifest(o.out, "gen gw",
                   json{{"gamma", o.gamma}, {"depth", o.depth}, {"nodes", t.size()}}, {o.out},
                   seed, 1, timer.seconds());
}

void run_gen_regular_tree(const GenTreeOpts& o) {
    RunTimer timer;
    const Tree t = regular_tree(o.k, o.depth);
    write_tree_file(o.out, t);
    write_manifest(o.out, "gen regular-tree",
                   json{{"k", o.k}, {"depth", o.depth}, {"nodes", t.size()}}, {o.out}, 0, 1,
                   timer.seconds());
}

// -------------------------------------------------------------- exact -----

struct ExactOpts {
    std::string graph;
    std::string model = "ising";
    double theta = 0.5;
    double lambda = 0.0;
    double eps = 0.35;
    std::uint32_t q = 3;
    std::uint32_t root = 0;
    std::uint32_t t = 0;
    bool marginal = false;
    std::uint64_t budget = kDefaultEnumerationBudget;
    std::string out;
    bool t_given = false;
};

GraphicalModel model_on_graph(const Multigraph& g, const std::string& model, double theta,
                              double lambda, double eps, std::uint32_t q) {
    if (model == "ising") return ising_model(g, theta, lambda);
    if (model == "spinglass") return spin_glass_model_from_ids(g, eps);
    if (model == "coloring") return coloring_model(g, q, eps);
    throw std::invalid_argument("unknown model: " + model);
}

void run_exact(const ExactOpts& o) {
    RunTimer timer;
    const Multigraph g = read_graph_file(o.graph);
    const GraphicalModel gm = model_on_graph(g, o.model, o.theta, o.lambda, o.eps, o.q);
    std::vector<std::string> rows;
    rows.push_back("log_partition," + csv_double(exact_log_partition(gm, o.budget)));
    if (o.marginal) {
        const Distribution m = exact_marginal(gm, {o.root}, o.budget);
        for (std::size_t x = 0; x < m.size(); ++x)
            rows.push_back("marginal_" + std::to_string(o.root) + "_" + std::to_string(x) + "," +
                           csv_double(m[x]));
    }
    if (o.t_given) {
        const double tv = exact_joint_product_tv(gm, o.root, o.t, o.budget);
        rows.push_back("tv_" + std::to_string(o.root) + "_" + std::to_string(o.t) + "," +
                       csv_double(tv));
    }
    const std::string header = "quantity,value";
    if (o.out.empty()) {
        std::cout << header << '\n';
        for (const auto& r : rows) std::cout << r << '\n';
    } else {
        write_csv(o.out, header, rows);
        write_manifest(o.out, "exact",
                       json{{"graph", o.graph},
                            {"model", o.model},
                            {"theta", o.theta},
                            {"lambda", o.lambda},
                            {"eps", o.eps},
                            {"q", o.q},
                            {"root", o.root},
                            {"marginal", o.marginal},
                            {"t", o.t_given ? json(o.t) : json(nullptr)}},
                       {o.out}, 0, 1, timer.seconds());
    }
}

// ----------------------------------------------------------- tree-scan ----

struct TreeScanOpts {
    std::uint32_t k = 0;
    double gamma = 0.0;
    bool k_given = false;
    bool gamma_given = false;
    std::string theta_grid;  // ising
    double lambda = 0.0;
    std::string eps_grid;  // spin glass
    std::string t_grid;
    std::uint64_t trials = 2000;
    std::uint64_t seed = 1;
    unsigned jobs = default_jobs();
    std::string out;
};

TreeEnsemble tree_ensemble_from(const TreeScanOpts& o) {
    if (o.k_given == o.gamma_given)
        throw std::invalid_argument("choose exactly one tree ensemble: --k or --gamma");
    return o.k_given ? TreeEnsemble::regular(o.k) : TreeEnsemble::galton_watson(o.gamma);
}

void run_tree_scan(const TreeScanOpts& o, bool spin_glass) {
    RunTimer timer;
    const std::uint64_t seed = effective_seed(o.seed);
    const TreeEnsemble ens = tree_ensemble_from(o);
    const std::vector<double> strengths = parse_grid(spin_glass ? o.eps_grid : o.theta_grid);
    const std::vector<std::uint32_t> ts = parse_grid_u32(o.t_grid);
    std::vector<std::string> rows;
    for (std::size_t si = 0; si < strengths.size(); ++si) {
        for (std::size_t ti = 0; ti < ts.size(); ++ti) {
            const std::uint64_t cell = si * ts.size() + ti;
            const TreeModelSpec spec = spin_glass
                                           ? TreeModelSpec::spin_glass(strengths[si])
                                           : TreeModelSpec::ising(strengths[si], o.lambda);
            const BiasEstimate est = tree_reconstruction_bias(ens, spec, ts[ti], o.trials,
                                                              seed_for(seed, cell), o.jobs);
            TreeScanRow row;
            row.ensemble = o.k_given ? "regular" : "gw";
            row.k_or_gamma = o.k_given ? static_cast<double>(o.k) : o.gamma;
            // spin-glass rows record the coupling magnitude 1-2*eps here
            row.theta = spin_glass ? 1.0 - 2.0 * strengths[si] : strengths[si];
            row.lambda = spin_glass ? 0.0 : o.lambda;
            row.t = ts[ti];
            row.trials = est.trials;
            row.bias_mean = est.mean;
            row.bias_stderr = est.stderr_;
            row.seed = seed;
            rows.push_back(row.csv());
        }
    }
    write_csv(o.out, TreeScanRow::csv_header(), rows);
    write_manifest(o.out, spin_glass ? "tree-scan spinglass" : "tree-scan ising",
                   json{{"ensemble", o.k_given ? "regular" : "gw"},
                        {"k_or_gamma", o.k_given ? static_cast<double>(o.k) : o.gamma},
                        {"strength_grid", strengths},
                        {"lambda", o.lambda},
                        {"t_grid", ts},
                        {"trials", o.trials}},
                   {o.out}, seed, o.jobs, timer.seconds());
}

// ---------------------------------------------------------- graph-scan ----

struct GraphScanOpts {
    std::uint32_t k = 2;
    std::string theta_grid;
    std::uint32_t n = 0;
    std::string t_grid;
    std::uint64_t trials = 200;
    std::uint64_t sweeps = 1000;
    std::uint32_t max_ball = 25;
    std::uint64_t seed = 1;
    unsigned jobs = default_jobs();
    std::string out;
    bool proxy = false;
    std::uint64_t proxy_runs = 50;
    std::uint64_t proxy_sweeps = 200;
    double proxy_threshold = 0.2;
};

void run_graph_scan(const GraphScanOpts& o) {
    RunTimer timer;
    const std::uint64_t seed = effective_seed(o.seed);
    const std::vector<double> thetas = parse_grid(o.theta_grid);
    const std::vector<std::uint32_t> ts = parse_grid_u32(o.t_grid);
    ReconOptions opts;
    opts.glauber_sweeps = o.sweeps;
    opts.max_ball_vertices = o.max_ball;
    opts.jobs = o.jobs;
    const std::vector<ScanRow> rows =
        ferro_threshold_scan(o.k, thetas, o.n, ts, o.trials, seed, opts);
    std::vector<std::string> lines;
    lines.reserve(rows.size());
    for (const auto& r : rows) lines.push_back(r.csv());
    write_csv(o.out, ScanRow::csv_header(), lines);
    std::vector<std::string> outputs{o.out};

    if (o.proxy) {
        std::vector<std::string> proxy_lines;
        for (std::size_t ti = 0; ti < thetas.size(); ++ti) {
            const MagnetizationProxyRow row =
                magnetization_proxy(o.k, thetas[ti], o.n, o.proxy_runs, o.proxy_sweeps,
                                    seed_for(seed, (1ULL << 40) + ti), o.proxy_threshold, o.jobs);
            proxy_lines.push_back(row.csv());
        }
        const std::string proxy_path = o.out + ".proxy.csv";
        write_csv(proxy_path, MagnetizationProxyRow::csv_header(), proxy_lines);
        outputs.push_back(proxy_path);
    }
    write_manifest(o.out, "graph-scan",
                   json{{"k", o.k},
                        {"theta_grid", thetas},
                        {"n", o.n},
                        {"t_grid", ts},
                        {"trials", o.trials},
                        {"sweeps", o.sweeps},
                        {"proxy", o.proxy},
                        {"proxy_threshold", o.proxy_threshold}},
                   outputs, seed, o.jobs, timer.seconds());
}

// ------------------------------------------------------------- replica ----

struct SphericityCliOpts {
    std::string model;
    std::uint32_t k = 2;
    double theta = 0.5;
    double lambda = 0.0;
    double gamma = 1.0;
    double eps = 0.35;
    std::uint32_t q = 3;
    std::string n_grid;
    std::uint64_t trials = 200;
    std::uint64_t burn_in = 1000;
    std::uint64_t budget = 1u << 16;
    std::uint64_t seed = 1;
    unsigned jobs = default_jobs();
    std::string out;
    std::string dump;
};

void run_sphericity(const SphericityCliOpts& o) {
    RunTimer timer;
    const std::uint64_t seed = effective_seed(o.seed);
    ExperimentModel em;
    if (o.model == "ising") {
        em = ExperimentModel::ising_regular(o.k, o.theta, o.lambda);
    } else if (o.model == "spinglass") {
        em = ExperimentModel::spin_glass_poisson(o.gamma, o.eps);
    } else if (o.model == "coloring") {
        em = ExperimentModel::coloring_poisson(o.q, o.gamma, o.eps);
    } else {
        throw std::invalid_argument("unknown model: " + o.model);
    }
    const std::vector<std::uint32_t> ns = parse_grid_u32(o.n_grid);
    SphericityOptions opts;
    opts.burn_in = o.burn_in;
    opts.enumeration_budget = o.budget;
    opts.jobs = o.jobs;
    std::vector<Configuration> dump;
    if (!o.dump.empty()) opts.dump = &dump;
    const std::vector<SphericityRow> rows = sphericity_estimate(em, ns, o.trials, seed, opts);
    std::vector<std::string> lines;
    lines.reserve(rows.size());
    for (const auto& r : rows) lines.push_back(r.csv());
    write_csv(o.out, SphericityRow::csv_header(), lines);
    std::vector<std::string> outputs{o.out};
    if (!o.dump.empty()) {
        write_configurations(o.dump, dump);
        outputs.push_back(o.dump);
    }
    write_manifest(o.out, "replica sphericity",
                   json{{"model", o.model},
                        {"k", o.k},
                        {"theta", o.theta},
                        {"lambda", o.lambda},
                        {"gamma", o.gamma},
                        {"eps", o.eps},
                        {"q", o.q},
                        {"n_grid", ns},
                        {"trials", o.trials},
                        {"burn_in", o.burn_in}},
                   outputs, seed, o.jobs, timer.seconds());
}

struct PhiGapCliOpts {
    std::uint32_t q = 3;
    std::string gamma_grid = "1.0";
    double eps = 0.5;
    double delta = 0.05;
    double deltap = 0.01;
    std::uint32_t resolution = 60;
    unsigned jobs = default_jobs();
    std::string out;
};

void run_phi_gap(const PhiGapCliOpts& o) {
    RunTimer timer;
    const std::vector<double> gammas = parse_grid(o.gamma_grid);
    std::vector<std::string> lines;
    for (double gamma : gammas) {
        const PhiGapResult res =
            phi_gap_scan(o.q, gamma, o.eps, o.delta, o.deltap, o.resolution, o.jobs);
        lines.push_back(res.csv());
    }
    write_csv(o.out, PhiGapResult::csv_header(), lines);
    write_manifest(o.out, "replica phi-gap",
                   json{{"q", o.q},
                        {"gamma_grid", gammas},
                        {"eps", o.eps},
                        {"delta", o.delta},
                        {"deltap", o.deltap},
                        {"resolution", o.resolution}},
                   {o.out}, 0, o.jobs, timer.seconds());
}

// -------------------------------------------------------------- sg-scan ---

struct SgScanOpts {
    std::string gamma_grid;
    double eps = 0.35;
    std::string n_grid;
    std::uint32_t t = 2;
    std::uint64_t trials = 200;
    std::uint64_t sweeps = 1000;
    std::uint64_t seed = 1;
    unsigned jobs = default_jobs();
    std::string out;
};

void run_sg_scan(const SgScanOpts& o) {
    RunTimer timer;
    const std::uint64_t seed = effective_seed(o.seed);
    const std::vector<double> gammas = parse_grid(o.gamma_grid);
    const std::vector<std::uint32_t> ns = parse_grid_u32(o.n_grid);
    ReconOptions opts;
    opts.glauber_sweeps = o.sweeps;
    opts.jobs = o.jobs;
    const SpinGlassScanResult res =
        spin_glass_threshold_scan(gammas, o.eps, ns, o.trials, seed, o.t, opts);

    std::vector<std::string> recon_lines, sph_lines, flag_lines;
    for (const auto& r : res.recon) recon_lines.push_back(r.csv());
    for (const auto& r : res.sphericity) sph_lines.push_back(r.csv());
    for (const auto& r : res.flags) flag_lines.push_back(r.csv());
    const std::string sph_path = o.out + ".sphericity.csv";
    const std::string flag_path = o.out + ".flags.csv";
    write_csv(o.out, ScanRow::csv_header(), recon_lines);
    write_csv(sph_path, SphericityRow::csv_header(), sph_lines);
    write_csv(flag_path, GammaFlagRow::csv_header(), flag_lines);
    write_manifest(o.out, "sg-scan",
                   json{{"gamma_grid", gammas},
                        {"eps", o.eps},
                        {"n_grid", ns},
                        {"t", o.t},
                        {"trials", o.trials},
                        {"sweeps", o.sweeps}},
                   {o.out, sph_path, flag_path}, seed, o.jobs, timer.seconds());
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 0; i < argc; ++i) g_argv.emplace_back(argv[i]);
    CLI::App app{"Sampling, exact enumeration, and threshold scans for reconstruction problems "
                 "on sparse random graphs"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Sample a graph or tree and write it to a file");
    gen->require_subcommand(1);
    GenGraphOpts gen_poisson_opts, gen_regular_opts;
    GenTreeOpts gen_gw_opts, gen_rt_opts;
    {
        auto* sc = gen->add_subcommand("poisson", "Poisson multigraph on n vertices");
        sc->add_option("--n", gen_poisson_opts.n, "vertex count")->required();
        sc->add_option("--gamma", gen_poisson_opts.gamma, "edge density")
            ->required()
            ->check(CLI::NonNegativeNumber);
        sc->add_option("--seed", gen_poisson_opts.seed, "master seed");
        sc->add_option("--out", gen_poisson_opts.out, "output graph file")->required();
        sc->callback([&] { run_gen_poisson(gen_poisson_opts); });
    }
    {
        auto* sc = gen->add_subcommand("regular", "uniform (k+1)-regular multigraph");
        sc->add_option("--n", gen_regular_opts.n, "vertex count")->required();
        sc->add_option("--k", gen_regular_opts.k, "degree minus one")->required();
        sc->add_option("--seed", gen_regular_opts.seed, "master seed");
        sc->add_option("--out", gen_regular_opts.out, "output graph file")->required();
        sc->callback([&] { run_gen_regular(gen_regular_opts); });
    }
    {
        auto* sc = gen->add_subcommand("gw", "Galton-Watson tree, Poisson(2*gamma) offspring");
        sc->add_option("--gamma", gen_gw_opts.gamma, "half the offspring mean")
            ->required()
            ->check(CLI::NonNegativeNumber);
        sc->add_option("--depth", gen_gw_opts.depth, "truncation depth")->required();
        sc->add_option("--seed", gen_gw_opts.seed, "master seed");
        sc->add_option("--out", gen_gw_opts.out, "output tree file")->required();
        sc->callback([&] { run_gen_gw(gen_gw_opts); });
    }
    {
        auto* sc = gen->add_subcommand(
            "regular-tree", "deterministic tree: root degree k+1, internal branching k");
        sc->add_option("--k", gen_rt_opts.k, "branching factor")->required();
        sc->add_option("--depth", gen_rt_opts.depth, "truncation depth")->required();
        sc->add_option("--out", gen_rt_opts.out, "output tree file")->required();
        sc->callback([&] { run_gen_regular_tree(gen_rt_opts); });
    }

    // exact
    ExactOpts exact_opts;
    {
        auto* sc = app.add_subcommand(
            "exact", "Exact partition function, marginals, and the root-vs-shell TV statistic "
                     "on a graph file (enumeration, small instances only)");
        sc->add_option("--graph", exact_opts.graph, "input graph file")->required();
        sc->add_option("--model", exact_opts.model, "model family")
            ->check(CLI::IsMember({"ising", "spinglass", "coloring"}));
        sc->add_option("--theta", exact_opts.theta, "ising interaction strength in [0,1)");
        sc->add_option("--lambda", exact_opts.lambda, "ising external field in [0,1)");
        sc->add_option("--eps", exact_opts.eps, "spin-glass flip / coloring violation weight");
        sc->add_option("--q", exact_opts.q, "coloring palette size");
        sc->add_option("--root", exact_opts.root, "root vertex");
        auto* topt = sc->add_option("--t", exact_opts.t, "shell radius for the TV statistic");
        sc->add_flag("--marginal", exact_opts.marginal, "also print the root marginal");
        sc->add_option("--budget", exact_opts.budget, "enumeration budget (state count)");
        sc->add_option("--out", exact_opts.out, "output CSV (default: stdout)");
        sc->callback([&, topt] {
            exact_opts.t_given = topt->count() > 0;
            run_exact(exact_opts);
        });
    }

    // tree-scan
    auto* tree_scan = app.add_subcommand(
        "tree-scan", "Tree-side reconstruction bias over a parameter grid (Monte Carlo)");
    tree_scan->require_subcommand(1);
    TreeScanOpts ts_ising, ts_sg;
    {
        auto* sc = tree_scan->add_subcommand("ising", "ferromagnet with optional external field");
        auto* kopt = sc->add_option("--k", ts_ising.k, "regular tree branching");
        auto* gopt = sc->add_option("--gamma", ts_ising.gamma, "Galton-Watson offspring mean / 2");
        sc->add_option("--theta", ts_ising.theta_grid, "interaction grid")->required();
        sc->add_option("--lambda", ts_ising.lambda, "external field");
        sc->add_option("--t", ts_ising.t_grid, "depth grid")->required();
        sc->add_option("--trials", ts_ising.trials, "Monte Carlo trials per cell");
        sc->add_option("--seed", ts_ising.seed, "master seed");
        sc->add_option("--jobs", ts_ising.jobs, "worker threads");
        sc->add_option("--out", ts_ising.out, "output CSV")->required();
        sc->callback([&, kopt, gopt] {
            ts_ising.k_given = kopt->count() > 0;
            ts_ising.gamma_given = gopt->count() > 0;
            run_tree_scan(ts_ising, false);
        });
    }
    {
        auto* sc = tree_scan->add_subcommand(
            "spinglass", "fair-coin couplings; the theta column records 1-2*eps");
        auto* kopt = sc->add_option("--k", ts_sg.k, "regular tree branching");
        auto* gopt = sc->add_option("--gamma", ts_sg.gamma, "Galton-Watson offspring mean / 2");
        sc->add_option("--eps", ts_sg.eps_grid, "flip probability grid")->required();
        sc->add_option("--t", ts_sg.t_grid, "depth grid")->required();
        sc->add_option("--trials", ts_sg.trials, "Monte Carlo trials per cell");
        sc->add_option("--seed", ts_sg.seed, "master seed");
        sc->add_option("--jobs", ts_sg.jobs, "worker threads");
        sc->add_option("--out", ts_sg.out, "output CSV")->required();
        sc->callback([&, kopt, gopt] {
            ts_sg.k_given = kopt->count() > 0;
            ts_sg.gamma_given = gopt->count() > 0;
            run_tree_scan(ts_sg, true);
        });
    }

    // graph-scan
    GraphScanOpts gs_opts;
    {
        auto* sc = app.add_subcommand(
            "graph-scan", "Ferromagnet reconstruction bias on (k+1)-regular instances with "
                          "companion tree rows; optional magnetization proxy side file");
        sc->add_option("--k", gs_opts.k, "degree minus one");
        sc->add_option("--theta", gs_opts.theta_grid, "interaction grid")->required();
        sc->add_option("--n", gs_opts.n, "vertex count")->required();
        sc->add_option("--t", gs_opts.t_grid, "radius grid")->required();
        sc->add_option("--trials", gs_opts.trials, "trials per cell");
        sc->add_option("--sweeps", gs_opts.sweeps, "heat-bath sweeps per trial");
        sc->add_option("--max-ball", gs_opts.max_ball, "abort trials with larger ball interiors");
        sc->add_option("--seed", gs_opts.seed, "master seed");
        sc->add_option("--jobs", gs_opts.jobs, "worker threads");
        sc->add_option("--out", gs_opts.out, "output CSV")->required();
        sc->add_flag("--proxy", gs_opts.proxy, "also write <out>.proxy.csv with |magnetization|");
        sc->add_option("--proxy-runs", gs_opts.proxy_runs, "runs per theta for the proxy");
        sc->add_option("--proxy-sweeps", gs_opts.proxy_sweeps, "sweeps per half-run");
        sc->add_option("--proxy-threshold", gs_opts.proxy_threshold, "exceedance threshold");
        sc->callback([&] { run_graph_scan(gs_opts); });
    }

    // replica
    auto* replica = app.add_subcommand("replica", "Two-replica statistics");
    replica->require_subcommand(1);
    SphericityCliOpts sph_opts;
    {
        auto* sc = replica->add_subcommand(
            "sphericity", "E[Q(xi)^2] along an N grid from paired replicas per sampled instance");
        sc->add_option("--model", sph_opts.model, "model family")
            ->required()
            ->check(CLI::IsMember({"ising", "spinglass", "coloring"}));
        sc->add_option("--k", sph_opts.k, "regular ensemble degree minus one");
        sc->add_option("--theta", sph_opts.theta, "ising interaction strength");
        sc->add_option("--lambda", sph_opts.lambda, "ising external field");
        sc->add_option("--gamma", sph_opts.gamma, "Poisson edge density");
        sc->add_option("--eps", sph_opts.eps, "spin-glass flip / coloring violation weight");
        sc->add_option("--q", sph_opts.q, "coloring palette size");
        sc->add_option("--n", sph_opts.n_grid, "vertex count grid")->required();
        sc->add_option("--trials", sph_opts.trials, "instances per N");
        sc->add_option("--burn-in", sph_opts.burn_in, "sweeps per chain");
        sc->add_option("--budget", sph_opts.budget, "exact-pair state budget");
        sc->add_option("--seed", sph_opts.seed, "master seed");
        sc->add_option("--jobs", sph_opts.jobs, "worker threads");
        sc->add_option("--out", sph_opts.out, "output CSV")->required();
        sc->add_option("--dump", sph_opts.dump, "also dump raw replicas, one per line");
        sc->callback([&] { run_sphericity(sph_opts); });
    }
    PhiGapCliOpts pg_opts;
    {
        auto* sc = replica->add_subcommand(
            "phi-gap", "grid audit of the pair-type rate-function gap on the row-balanced slice");
        sc->add_option("--q", pg_opts.q, "palette size");
        sc->add_option("--gamma", pg_opts.gamma_grid, "edge density grid");
        sc->add_option("--eps", pg_opts.eps, "violation weight");
        sc->add_option("--delta", pg_opts.delta, "sup-norm deviation defining the scanned set");
        sc->add_option("--deltap", pg_opts.deltap, "row-mass slack (must be >= 0 on the slice)");
        sc->add_option("--resolution", pg_opts.resolution, "lattice steps per unit");
        sc->add_option("--jobs", pg_opts.jobs, "worker threads");
        sc->add_option("--out", pg_opts.out, "output CSV")->required();
        sc->callback([&] { run_phi_gap(pg_opts); });
    }

    // sg-scan
    SgScanOpts sg_opts;
    {
        auto* sc = app.add_subcommand(
            "sg-scan", "Spin-glass threshold scan: criticality flags, E[Q^2] trend, and "
                       "reconstruction bias along gamma and N grids");
        sc->add_option("--gamma", sg_opts.gamma_grid, "edge density grid")->required();
        sc->add_option("--eps", sg_opts.eps, "flip probability");
        sc->add_option("--n", sg_opts.n_grid, "vertex count grid")->required();
        sc->add_option("--t", sg_opts.t, "reconstruction radius");
        sc->add_option("--trials", sg_opts.trials, "trials per cell");
        sc->add_option("--sweeps", sg_opts.sweeps, "heat-bath sweeps per trial");
        sc->add_option("--seed", sg_opts.seed, "master seed");
        sc->add_option("--jobs", sg_opts.jobs, "worker threads");
        sc->add_option("--out", sg_opts.out, "output CSV")->required();
        sc->callback([&] { run_sg_scan(sg_opts); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);  // --help / --version
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "argument error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
