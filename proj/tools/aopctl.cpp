#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "aopsim/clustering.hpp"
#include "aopsim/common.hpp"
#include "aopsim/config.hpp"
#include "aopsim/optimizer.hpp"
#include "aopsim/sim.hpp"
#include "aopsim/topology.hpp"

namespace fs = std::filesystem;
using namespace aopsim;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InternalError("cannot write " + path.string());
    f << text;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Record of everything a run consumed. Lands on disk before any result file,
// so a directory holding results always names the inputs that produced them
// and an interrupted run is visibly incomplete.
struct Manifest {
    std::string subcommand;
    std::string config_path = "<defaults>";
    std::uint64_t seed = 0;
    std::string out_dir;
    std::uint64_t hash = kFnvOffset;

    void fold(std::string_view bytes) { hash = fnv1a64(bytes, hash); }

    void emit() const {
        fs::create_directories(out_dir);
        std::ostringstream ss;
        ss << "subcommand = " << subcommand << "\n"
           << "config = " << config_path << "\n"
           << "seed = " << seed << "\n"
           << "inputs_fnv1a = " << hex64(hash) << "\n"
           << "out = " << out_dir << "\n";
        write_file(fs::path(out_dir) / "manifest.txt", ss.str());
    }
};

// Shared command-line state. Flags fold into the Config before the snapshot
// is written, so re-running `--config <out>/config.txt` with no flags
// reproduces the run bit for bit.
struct Cli {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int replications = 0;
    bool replications_set = false;

    Config load(const std::string& subcommand) const {
        Config cfg = config_path.empty() ? Config{} : load_config_file(config_path);
        if (replications_set) cfg.sim.replications = replications;
        if (seed_set) {
            // one root per subcommand: clustering is re-seeded independently
            // of the fleet so a seed sweep changes only what it studies
            if (subcommand == "cluster")
                cfg.clustering.seed = seed;
            else
                cfg.sim.seed = seed;
        }
        return cfg;
    }
};

Manifest start_run(const Cli& cli, const std::string& subcommand, const Config& cfg,
                   std::uint64_t seed, const std::string& default_out,
                   const std::string& extra = "") {
    Manifest m;
    m.subcommand = subcommand;
    if (!cli.config_path.empty()) m.config_path = cli.config_path;
    m.seed = seed;
    m.out_dir = cli.out_dir.empty() ? default_out : cli.out_dir;
    const std::string snapshot = emit_config(cfg);
    m.fold(subcommand);
    m.fold(snapshot);
    m.fold(read_file(cfg.topology.dataset));
    if (!extra.empty()) m.fold(extra);
    m.emit();
    write_file(fs::path(m.out_dir) / "config.txt", snapshot);
    return m;
}

std::vector<Point> site_points(const Topology& topo) {
    std::vector<Point> pts;
    pts.reserve(topo.sites().size());
    for (const Site& s : topo.sites()) pts.push_back(s.xy);
    return pts;
}

// ---------------------------------------------------------------------------
// cluster: group edge-cloud sites into collaboration spaces.

int run_cluster(const Cli& cli, const std::string& method) {
    Config cfg = cli.load("cluster");
    validate_config(cfg);
    Topology topo = Topology::build(cfg);
    std::vector<Point> pts = site_points(topo);

    Manifest m = start_run(cli, "cluster", cfg, cfg.clustering.seed, "runs/cluster", method);

    std::vector<int> labels;
    std::ostringstream sum;
    sum << "method = " << method << "\n"
        << "sites = " << pts.size() << "\n";

    if (method == "apacs") {
        ApacsResult res = cluster_sites(pts, cfg);
        labels = res.labels;
        double pref;
        if (cfg.clustering.preference == "median")
            pref = median_offdiag(similarity_matrix(pts, 0.0));
        else
            pref = std::stod(cfg.clustering.preference);
        Matrix s = similarity_matrix(pts, pref);
        sum << "spaces = " << res.exemplars.size() << "\n"
            << "converged = " << (res.converged ? "yes" : "no") << "\n"
            << "iters = " << res.iters << "\n"
            << "preference = " << fmt_double(pref) << "\n"
            << "net_similarity = " << fmt_double(net_similarity(s, res.exemplars)) << "\n";
        std::ostringstream csv;
        csv << "site,x_m,y_m,space,exemplar_site\n";
        for (size_t i = 0; i < pts.size(); ++i)
            csv << i << ',' << fmt_double(pts[i].x) << ',' << fmt_double(pts[i].y) << ','
                << res.labels[i] << ',' << res.assignment[i] << '\n';
        write_file(fs::path(m.out_dir) / "cs_labels.csv", csv.str());
    } else {  // kmeans with elbow selection
        Rng rng(cfg.clustering.seed);
        ElbowResult elbow = elbow_kmeans(pts, cfg.clustering.kmax, cfg.clustering.kmeans_restarts,
                                         cfg.clustering.kmeans_iters, rng);
        KmeansResult km = kmeans(pts, elbow.k, cfg.clustering.kmeans_restarts,
                                 cfg.clustering.kmeans_iters, rng);
        labels = km.labels;
        sum << "spaces = " << elbow.k << "\n"
            << "wcss = " << fmt_double(km.wcss) << "\n";
        std::ostringstream csv;
        csv << "site,x_m,y_m,space\n";
        for (size_t i = 0; i < pts.size(); ++i)
            csv << i << ',' << fmt_double(pts[i].x) << ',' << fmt_double(pts[i].y) << ','
                << km.labels[i] << '\n';
        write_file(fs::path(m.out_dir) / "cs_labels.csv", csv.str());
        std::ostringstream ew;
        ew << "k,wcss\n";
        for (size_t i = 0; i < elbow.wcss.size(); ++i)
            ew << (i + 1) << ',' << fmt_double(elbow.wcss[i]) << '\n';
        write_file(fs::path(m.out_dir) / "elbow_wcss.csv", ew.str());
    }

    int k = 1 + *std::max_element(labels.begin(), labels.end());
    std::vector<int> sizes(static_cast<size_t>(k), 0);
    for (int lab : labels) sizes[static_cast<size_t>(lab)]++;
    sum << "sizes =";
    for (int s : sizes) sum << ' ' << s;
    sum << "\n";
    write_file(fs::path(m.out_dir) / "cluster_summary.txt", sum.str());

    std::cout << "cluster: " << k << " collaboration spaces over " << pts.size()
              << " sites (" << method << ") -> " << m.out_dir << "\n";
    return 0;
}

std::string topo_note(const Scenario& sc) {
    std::ostringstream ss;
    ss << sc.topo.summary();
    int k = 0;
    for (int lab : sc.cs_labels) k = std::max(k, lab + 1);
    ss << "collaboration spaces: " << k << "\n";
    return ss.str();
}

// ---------------------------------------------------------------------------
// plan: per-vehicle station admission and rate plan from the t=0 snapshot.

int run_plan(const Cli& cli) {
    Config cfg = cli.load("plan");
    validate_config(cfg);
    Scenario sc = generate_scenario(cfg);
    Instance inst = planning_instance(sc);

    Manifest m = start_run(cli, "plan", cfg, cfg.sim.seed, "runs/plan");

    std::ostringstream csv;
    csv << "vehicle,local_feasible,admitted,rat,serving_ec,neighbor_ec,"
           "access_bps_solo,fronthaul_bps\n";
    int admitted = 0;
    for (size_t v = 0; v < inst.vehicles.size(); ++v) {
        const VehicleSpec& spec = inst.vehicles[v];
        const bool adm = spec.rat >= 0;
        admitted += adm;
        csv << v << ',' << (spec.local_feasible ? 1 : 0) << ',' << (adm ? 1 : 0) << ','
            << spec.rat << ',' << spec.serving_ec << ',' << spec.neighbor_ec << ','
            << fmt_double(adm ? spec.access_bps_by_n[0] : 0.0) << ','
            << fmt_double(spec.fronthaul_bps) << '\n';
    }
    write_file(fs::path(m.out_dir) / "offload_plan.csv", csv.str());

    std::ostringstream sum;
    sum << "vehicles = " << inst.vehicles.size() << "\n"
        << "admitted = " << admitted << "\n"
        << topo_note(sc);
    write_file(fs::path(m.out_dir) / "plan_summary.txt", sum.str());

    std::cout << "plan: " << admitted << "/" << inst.vehicles.size()
              << " vehicles admitted -> " << m.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// solve: joint offloading decision for the planning snapshot.

int run_solve(const Cli& cli, const std::string& objective, bool oracle_check) {
    Config cfg = cli.load("solve");
    validate_config(cfg);
    Scenario sc = generate_scenario(cfg);
    Instance inst = planning_instance(sc);

    Manifest m = start_run(cli, "solve", cfg, cfg.sim.seed, "runs/solve", objective);

    SolveOptions so;
    so.objective = objective == "total_delay" ? Objective::total_delay : Objective::aop;
    so.epsilon = cfg.optimizer.epsilon;
    so.max_outer = cfg.optimizer.max_outer;
    so.eta0 = cfg.optimizer.eta0;
    so.restarts = cfg.optimizer.restarts;
    so.state_bins = cfg.optimizer.state_bins;
    so.seed = cfg.sim.seed;
    SolveReport rep = solve(inst, so);
    if (!rep.eval.rc_admissible)
        throw InfeasibleError("no admissible policy found for the planning snapshot");

    std::ostringstream acsv;
    acsv << "vehicle,action,delay_s,access_frac,alloc_hz\n";
    for (size_t v = 0; v < rep.actions.size(); ++v)
        acsv << v << ',' << action_kind_name(rep.actions[v]) << ','
             << fmt_double(rep.eval.delay_s[v]) << ',' << fmt_double(rep.eval.frac_a[v]) << ','
             << fmt_double(rep.eval.alloc_hz[v]) << '\n';
    write_file(fs::path(m.out_dir) / "actions.csv", acsv.str());

    std::ostringstream rcsv;
    rcsv << "iteration,residual\n";
    for (size_t i = 0; i < rep.residual_history.size(); ++i)
        rcsv << i << ',' << fmt_double(rep.residual_history[i]) << '\n';
    write_file(fs::path(m.out_dir) / "residuals.csv", rcsv.str());

    std::ostringstream sum;
    sum << "objective_kind = " << objective << "\n"
        << "objective = " << fmt_double(rep.objective) << "\n"
        << "dual_bound = "
        << (rep.dual.finite ? fmt_double(rep.dual.value) : std::string("-inf")) << "\n"
        << "iterations = " << rep.iterations << "\n"
        << "converged = " << (rep.converged ? "yes" : "no") << "\n"
        << "final_residual = "
        << (rep.residual_history.empty() ? std::string("n/a")
                                         : fmt_double(rep.residual_history.back()))
        << "\n";
    if (oracle_check) {
        EnumerationResult best = enumerate_policies(inst, so.objective);
        const double gap =
            best.objective > 0.0 ? (rep.objective - best.objective) / best.objective : 0.0;
        sum << "enumeration_optimum = " << fmt_double(best.objective) << "\n"
            << "optimality_gap_pct = " << fmt_fixed(100.0 * gap, 4) << "\n";
    }
    write_file(fs::path(m.out_dir) / "solve_report.txt", sum.str());

    std::cout << "solve: " << objective << " objective " << fmt_double(rep.objective)
              << (rep.converged ? " (converged)" : " (iteration cap)") << " -> " << m.out_dir
              << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// simulate: replicated runs plus plot-ready extracts.

int run_simulate(const Cli& cli, bool sweep, bool acked, bool sampling_sweep) {
    Config cfg = cli.load("simulate");
    validate_config(cfg);
    Scenario sc = generate_scenario(cfg);

    Manifest m = start_run(cli, "simulate", cfg, cfg.sim.seed, "runs/simulate");

    RunOptions ro;
    ro.source = decision_source_from_name(cfg.sim.decision);
    ro.sampling.kind = sampling_kind_from_name(cfg.aop.sampling);
    ro.sampling.beta_a = cfg.aop.beta_a;
    ro.sampling.beta_b = cfg.aop.beta_b;
    ro.cycles = cfg.sim.cycles;
    ro.solver.epsilon = cfg.optimizer.epsilon;
    ro.solver.max_outer = cfg.optimizer.max_outer;
    ro.solver.eta0 = cfg.optimizer.eta0;
    ro.solver.restarts = cfg.optimizer.restarts;
    ro.solver.state_bins = cfg.optimizer.state_bins;
    ro.solver.seed = cfg.sim.seed;

    const int reps = cfg.sim.replications;
    auto one = [&](int r) {
        RunOptions o = ro;
        o.replication = r;
        return acked ? acked_baseline(sc, o) : run_scenario(sc, o);
    };

    std::vector<RunResult> results(static_cast<size_t>(reps));
    if (sweep) {
        // fan out, then join in index order so emission stays deterministic
        std::vector<std::future<RunResult>> futs;
        futs.reserve(static_cast<size_t>(reps));
        for (int r = 0; r < reps; ++r)
            futs.push_back(std::async(std::launch::async, one, r));
        for (int r = 0; r < reps; ++r) results[static_cast<size_t>(r)] = futs[static_cast<size_t>(r)].get();
    } else {
        for (int r = 0; r < reps; ++r) results[static_cast<size_t>(r)] = one(r);
    }

    std::ostringstream csv, hist, scatter;
    csv << metrics_csv_header() << '\n';
    hist << "replication,frac_local,frac_serving,frac_neighbor,frac_rc\n";
    scatter << "replication,mean_total_delay_s,fleet_aop\n";
    double mean_aop = 0.0;
    int violations = 0;
    for (const RunResult& r : results) {
        csv << metrics_csv_row(r) << '\n';
        hist << r.replication << ',' << fmt_double(r.metrics.frac_local) << ','
             << fmt_double(r.metrics.frac_serving) << ',' << fmt_double(r.metrics.frac_neighbor)
             << ',' << fmt_double(r.metrics.frac_rc) << '\n';
        scatter << r.replication << ',' << fmt_double(r.metrics.mean_total_delay_s) << ','
                << fmt_double(r.metrics.fleet_aop) << '\n';
        mean_aop += r.metrics.fleet_aop / reps;
        violations += r.metrics.audit.total();
    }
    write_file(fs::path(m.out_dir) / "metrics.csv", csv.str());
    write_file(fs::path(m.out_dir) / "compute_hist.csv", hist.str());
    write_file(fs::path(m.out_dir) / "delay_vs_aop.csv", scatter.str());

    if (sampling_sweep) {
        // same fleet and policy under each idle-time sampler
        std::ostringstream ss;
        ss << "sampling,mean_fleet_aop\n";
        for (SamplingKind kind : {SamplingKind::zero_wait, SamplingKind::random,
                                  SamplingKind::uniform, SamplingKind::beta}) {
            RunOptions o = ro;
            o.sampling.kind = kind;
            double mean = 0.0;
            for (int r = 0; r < reps; ++r) {
                o.replication = r;
                mean += (acked ? acked_baseline(sc, o) : run_scenario(sc, o)).metrics.fleet_aop /
                        reps;
            }
            ss << sampling_kind_name(kind) << ',' << fmt_double(mean) << '\n';
        }
        write_file(fs::path(m.out_dir) / "aop_by_sampling.csv", ss.str());
    }

    std::cout << "simulate: " << reps << "x" << cfg.sim.vehicles << " vehicles ("
              << cfg.sim.decision << (acked ? ", acked" : "") << "), mean fleet age "
              << fmt_double(mean_aop) << ", audit violations " << violations << " -> "
              << m.out_dir << "\n";
    if (violations > 0) {
        // the per-round repair is supposed to make violations impossible
        std::cerr << "internal error: " << violations << " post-repair constraint violations\n";
        return 4;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// compare: per-metric deltas between two metrics.csv files.

struct MetricsTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

MetricsTable read_metrics(const std::string& path) {
    const std::string text = read_file(path);
    MetricsTable t;
    for (const std::string& line : split(text, '\n')) {
        if (trim(line).empty()) continue;
        std::vector<std::string> cells = split(line, ',');
        if (t.columns.empty()) {
            t.columns = cells;
        } else {
            if (cells.size() != t.columns.size())
                throw ParseError(path + ": row with " + std::to_string(cells.size()) +
                                 " cells against " + std::to_string(t.columns.size()) +
                                 " columns");
            t.rows.push_back(cells);
        }
    }
    if (t.columns.empty()) throw ParseError(path + ": empty metrics file");
    return t;
}

bool numeric_mean(const MetricsTable& t, size_t col, double* out) {
    double sum = 0.0;
    for (const auto& row : t.rows) {
        char* end = nullptr;
        const std::string& cell = row[col];
        double v = std::strtod(cell.c_str(), &end);
        if (end != cell.c_str() + cell.size() || cell.empty()) return false;
        sum += v;
    }
    *out = t.rows.empty() ? 0.0 : sum / static_cast<double>(t.rows.size());
    return true;
}

int run_compare(const Cli& cli, const std::string& path_a, const std::string& path_b) {
    MetricsTable a = read_metrics(path_a);
    MetricsTable b = read_metrics(path_b);
    if (a.columns != b.columns) {
        std::string msg = "metrics schema mismatch:";
        for (size_t i = 0; i < std::max(a.columns.size(), b.columns.size()); ++i) {
            const std::string left = i < a.columns.size() ? a.columns[i] : "<none>";
            const std::string right = i < b.columns.size() ? b.columns[i] : "<none>";
            if (left != right) msg += " column " + std::to_string(i) + " is '" + left +
                                      "' vs '" + right + "';";
        }
        throw ConfigError(msg);
    }

    std::ostringstream table;
    table << "metric,mean_a,mean_b,delta,improvement_pct\n";
    std::printf("%-26s %14s %14s %14s %12s\n", "metric", "mean_a", "mean_b", "delta",
                "improve_%");
    for (size_t c = 0; c < a.columns.size(); ++c) {
        double ma, mb;
        if (!numeric_mean(a, c, &ma) || !numeric_mean(b, c, &mb)) continue;
        const double delta = ma - mb;
        // improvement of run A over run B for a lower-is-better metric
        const double imp = mb != 0.0 ? 100.0 * (mb - ma) / std::fabs(mb) : 0.0;
        table << a.columns[c] << ',' << fmt_double(ma) << ',' << fmt_double(mb) << ','
              << fmt_double(delta) << ',' << fmt_double(imp) << '\n';
        std::printf("%-26s %14.6g %14.6g %14.6g %12.2f\n", a.columns[c].c_str(), ma, mb, delta,
                    imp);
    }

    if (!cli.out_dir.empty()) {
        Manifest m;
        m.subcommand = "compare";
        m.seed = cli.seed_set ? cli.seed : 0;
        m.out_dir = cli.out_dir;
        m.fold("compare");
        m.fold(read_file(path_a));
        m.fold(read_file(path_b));
        m.emit();
        write_file(fs::path(m.out_dir) / "comparison.csv", table.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"age-of-processing task-offloading toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    Cli cli;
    auto* opt_config = app.add_option("--config", cli.config_path, "config file (defaults apply when omitted)");
    auto* opt_seed = app.add_option("--seed", cli.seed, "override the subcommand's root seed");
    auto* opt_out = app.add_option("--out", cli.out_dir, "output directory (default runs/<subcommand>)");
    auto* opt_reps = app.add_option("--replications", cli.replications, "replication count")
                         ->check(CLI::PositiveNumber);

    auto* cluster = app.add_subcommand("cluster", "group edge clouds into collaboration spaces");
    std::string method = "apacs";
    cluster->add_option("--method", method, "apacs | kmeans")
        ->check(CLI::IsMember({"apacs", "kmeans"}));

    auto* plan = app.add_subcommand("plan", "per-vehicle admission and rate plan");

    auto* solve_cmd = app.add_subcommand("solve", "joint offloading decision for the fleet");
    std::string objective = "aop";
    solve_cmd->add_option("--objective", objective, "aop | total_delay")
        ->check(CLI::IsMember({"aop", "total_delay"}));
    bool oracle_check = false;
    solve_cmd->add_flag("--oracle-check", oracle_check,
                        "cross-check against exhaustive enumeration (small fleets only)");

    auto* simulate = app.add_subcommand("simulate", "replicated fleet simulation");
    bool sweep = false, acked = false, sampling_sweep = false;
    simulate->add_flag("--sweep", sweep, "run replications concurrently");
    simulate->add_flag("--acked", acked, "await a result acknowledgment before each next sample");
    simulate->add_flag("--sampling-sweep", sampling_sweep,
                       "also emit mean fleet age under every idle-time sampler");

    auto* compare = app.add_subcommand("compare", "per-metric deltas between two metrics files");
    std::string path_a, path_b;
    compare->add_option("a", path_a, "metrics.csv of the run under test")->required();
    compare->add_option("b", path_b, "metrics.csv of the baseline run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // help exits clean, every real parse error is a config error
    }
    cli.seed_set = opt_seed->count() > 0;
    cli.replications_set = opt_reps->count() > 0;
    (void)opt_config;
    (void)opt_out;

    try {
        if (*cluster) return run_cluster(cli, method);
        if (*plan) return run_plan(cli);
        if (*solve_cmd) return run_solve(cli, objective, oracle_check);
        if (*simulate) return run_simulate(cli, sweep, acked, sampling_sweep);
        if (*compare) return run_compare(cli, path_a, path_b);
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
    return 4;  // unreachable: require_subcommand guarantees a dispatch
}
