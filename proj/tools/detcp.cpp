// detcp — deterministic parallel constraint search, command-line front end.
//
//   detcp solve <file.dfzn> [--mode first|all|opt] [--strategy seq|spd|spda]
//               [--workers N] [--threshold S0] [--stats-csv P] [--report-json P]
//   detcp synth --shape best|worst|balanced --depth D [--solutions K] [...]
//   detcp bench --manifest FILE
//
// Exit codes: 0 solved or proven unsatisfiable, 2 usage error, 3 parse error,
// 4 determinism violation detected by bench.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "detcp/detcp.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

std::uint64_t elapsed_ns(Clock::time_point t0) {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count());
}

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << content;
    return out.good();
}

std::optional<detcp::SolveMode> mode_from(const std::string& s) {
    if (s == "first") return detcp::SolveMode::First;
    if (s == "all") return detcp::SolveMode::All;
    if (s == "opt") return detcp::SolveMode::Optimize;
    return std::nullopt;
}

std::optional<detcp::Strategy> strategy_from(const std::string& s) {
    if (s == "seq") return detcp::Strategy::Seq;
    if (s == "spd") return detcp::Strategy::Spd;
    if (s == "spda") return detcp::Strategy::Spda;
    return std::nullopt;
}

std::uint32_t imbalance_window_ms(std::uint32_t flag_value) {
    if (const char* env = std::getenv("DETCP_IMBALANCE_MS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v >= 0) return static_cast<std::uint32_t>(v);
        std::cerr << "detcp: ignoring malformed DETCP_IMBALANCE_MS='" << env << "'\n";
    }
    return flag_value;
}

detcp::WorkerStats seq_stats_row(const detcp::SearchStats& stats, std::uint64_t wall_ns) {
    detcp::WorkerStats ws;
    ws.worker = 0;
    ws.nodes_expanded = stats.nodes_expanded;
    ws.solutions_found = stats.solutions_found;
    ws.failures = stats.failures;
    ws.max_depth = stats.max_depth;
    ws.work_ns = wall_ns;
    return ws;
}

struct RunOutcome {
    std::optional<detcp::SolutionRecord> solution;  // leftmost for All mode
    std::size_t solution_count = 0;
    std::vector<detcp::WorkerStats> worker_stats;
    std::uint64_t wall_ns = 0;
};

template <typename Problem>
RunOutcome run_engine(const Problem& prob, detcp::ObjectiveKind sense,
                      const detcp::EngineConfig& cfg) {
    RunOutcome out;
    const auto t0 = Clock::now();
    if (cfg.strategy == detcp::Strategy::Seq) {
        const auto res = detcp::solve_seq(prob, cfg.mode, sense);
        out.wall_ns = elapsed_ns(t0);
        out.solution_count = res.solutions.size();
        if (!res.solutions.empty()) out.solution = res.solutions.front();
        out.worker_stats.push_back(seq_stats_row(res.stats, out.wall_ns));
    } else {
        const auto res = detcp::solve_par(prob, cfg, sense);
        out.wall_ns = elapsed_ns(t0);
        out.solution_count = res.solutions.size();
        if (!res.solutions.empty()) out.solution = res.solutions.front();
        out.worker_stats = res.worker_stats;
    }
    return out;
}

json report_json(const std::string& model_id, const detcp::EngineConfig& cfg,
                 const std::string& stats_csv_path, const std::string& line,
                 const RunOutcome& out) {
    json j;
    j["manifest"] = {{"model_path", model_id},
                     {"strategy", detcp::strategy_name(cfg.strategy)},
                     {"mode", detcp::mode_name(cfg.mode)},
                     {"workers", cfg.workers},
                     {"threshold_S0", cfg.threshold_s0},
                     {"imbalance_window_ms", cfg.imbalance_window_ms},
                     {"stats_csv_path", stats_csv_path}};
    j["solution"] = line;
    j["solutions_found"] = out.solution_count;
    j["wall_ns"] = out.wall_ns;
    j["speedup_vs_seq"] = nullptr;
    json rows = json::array();
    for (const auto& ws : out.worker_stats) {
        rows.push_back({{"worker", ws.worker},
                        {"nodes_expanded", ws.nodes_expanded},
                        {"nodes_replayed", ws.nodes_replayed},
                        {"splits_produced", ws.splits_produced},
                        {"bobnodes_consumed", ws.bobnodes_consumed},
                        {"solutions_found", ws.solutions_found},
                        {"work_ns", ws.work_ns},
                        {"wait_ns", ws.wait_ns}});
    }
    j["worker_stats"] = rows;
    return j;
}

int emit_outputs(const std::string& model_id, const detcp::EngineConfig& cfg,
                 const std::vector<std::string>& names, const RunOutcome& out,
                 const std::string& stats_csv_path, const std::string& report_json_path) {
    const std::string line = detcp::solution_line(names, out.solution);
    std::cout << line << "\n";
    if (!stats_csv_path.empty() && !write_file(stats_csv_path, detcp::stats_csv(out.worker_stats))) {
        std::cerr << "detcp: cannot write " << stats_csv_path << "\n";
        return 2;
    }
    if (!report_json_path.empty()) {
        const json j = report_json(model_id, cfg, stats_csv_path, line, out);
        if (!write_file(report_json_path, j.dump(2) + "\n")) {
            std::cerr << "detcp: cannot write " << report_json_path << "\n";
            return 2;
        }
    }
    return 0;
}

int cmd_solve(const std::string& file, const std::string& mode_s, const std::string& strategy_s,
              unsigned workers, std::uint32_t threshold, std::uint32_t window_ms,
              const std::string& stats_csv_path, const std::string& report_json_path) {
    const auto mode = mode_from(mode_s);
    const auto strategy = strategy_from(strategy_s);
    if (!mode || !strategy || workers < 1) {
        std::cerr << "detcp: invalid --mode/--strategy/--workers\n";
        return 2;
    }
    const auto text = read_file(file);
    if (!text) {
        std::cerr << "detcp: cannot read '" << file << "'\n";
        return 3;
    }
    const auto parsed = detcp::parse(detcp::ModelSource{*text, file});
    if (const auto* err = std::get_if<detcp::ParseError>(&parsed)) {
        std::cerr << err->formatted() << "\n";
        return 3;
    }
    const auto& model = std::get<detcp::Model>(parsed);
    if (*mode == detcp::SolveMode::Optimize &&
        model.objective.kind == detcp::ObjectiveKind::Satisfy) {
        std::cerr << "detcp: --mode opt requires a minimize/maximize model\n";
        return 2;
    }

    detcp::EngineConfig cfg;
    cfg.workers = workers;
    cfg.strategy = *strategy;
    cfg.mode = *mode;
    cfg.threshold_s0 = threshold;
    cfg.imbalance_window_ms = imbalance_window_ms(window_ms);

    detcp::CpProblem prob(model);
    const RunOutcome out = run_engine(prob, model.objective.kind, cfg);
    return emit_outputs(file, cfg, detcp::variable_names(model), out, stats_csv_path,
                        report_json_path);
}

int cmd_synth(const std::string& shape_s, unsigned depth, std::uint64_t solutions,
              std::uint32_t node_work, const std::string& mode_s, const std::string& strategy_s,
              unsigned workers, std::uint32_t threshold, std::uint32_t window_ms,
              const std::string& stats_csv_path, const std::string& report_json_path) {
    const auto mode = mode_from(mode_s);
    const auto strategy = strategy_from(strategy_s);
    if (!mode || !strategy || workers < 1 || *mode == detcp::SolveMode::Optimize) {
        std::cerr << "detcp: synth supports --mode first|all\n";
        return 2;
    }
    detcp::SyntheticSpec spec;
    if (shape_s == "best")
        spec.shape = detcp::TreeShape::BestCase;
    else if (shape_s == "worst")
        spec.shape = detcp::TreeShape::WorstCase;
    else if (shape_s == "balanced")
        spec.shape = detcp::TreeShape::Balanced;
    else {
        std::cerr << "detcp: unknown --shape '" << shape_s << "'\n";
        return 2;
    }
    spec.depth = depth;
    spec.solution_count = solutions;
    spec.node_work = node_work;

    detcp::EngineConfig cfg;
    cfg.workers = workers;
    cfg.strategy = *strategy;
    cfg.mode = *mode;
    cfg.threshold_s0 = threshold;
    cfg.imbalance_window_ms = imbalance_window_ms(window_ms);

    try {
        const detcp::SyntheticProblem prob = detcp::gen_synthetic(spec);
        const RunOutcome out = run_engine(prob, detcp::ObjectiveKind::Satisfy, cfg);
        std::vector<std::string> names;
        for (unsigned i = 0; i < depth; ++i) names.push_back("b" + std::to_string(i));
        const std::string id = "synth:" + shape_s + ":" + std::to_string(depth);
        return emit_outputs(id, cfg, names, out, stats_csv_path, report_json_path);
    } catch (const std::out_of_range& e) {
        std::cerr << "detcp: " << e.what() << "\n";
        return 2;
    }
}

struct BenchCell {
    std::string model;
    detcp::SolveMode mode;
    detcp::Strategy strategy;
    unsigned workers;
};

int cmd_bench(const std::string& manifest_path) {
    const auto text = read_file(manifest_path);
    if (!text) {
        std::cerr << "detcp: cannot read manifest '" << manifest_path << "'\n";
        return 3;
    }
    json manifest;
    try {
        manifest = json::parse(*text);
    } catch (const json::parse_error& e) {
        std::cerr << "detcp: manifest parse error: " << e.what() << "\n";
        return 3;
    }

    const auto models = manifest.value("models", std::vector<std::string>{});
    const auto workers_list = manifest.value("workers", std::vector<unsigned>{1});
    const auto strategy_names = manifest.value("strategies", std::vector<std::string>{"spd"});
    const auto mode_names = manifest.value("modes", std::vector<std::string>{"first"});
    const unsigned reps = manifest.value("reps", 1u);
    const std::uint32_t threshold = manifest.value("threshold_S0", 4u);
    const std::uint32_t window = manifest.value("imbalance_window_ms", 10u);
    const std::string csv_path = manifest.value("csv", std::string{});
    if (reps < 1) {
        std::cerr << "detcp: reps must be >= 1\n";
        return 2;
    }

    std::string csv =
        "model,mode,strategy,workers,reps,wall_ns_mean,wall_ns_min,wall_ns_max,speedup_vs_seq,"
        "solution\n";

    for (const auto& model_path : models) {
        const auto model_text = read_file(model_path);
        if (!model_text) {
            std::cerr << "detcp: cannot read '" << model_path << "'\n";
            return 3;
        }
        const auto parsed = detcp::parse(detcp::ModelSource{*model_text, model_path});
        if (const auto* err = std::get_if<detcp::ParseError>(&parsed)) {
            std::cerr << err->formatted() << "\n";
            return 3;
        }
        const auto& model = std::get<detcp::Model>(parsed);
        const auto names = detcp::variable_names(model);
        detcp::CpProblem prob(model);

        for (const auto& mode_name : mode_names) {
            const auto mode = mode_from(mode_name);
            if (!mode) {
                std::cerr << "detcp: unknown mode '" << mode_name << "' in manifest\n";
                return 2;
            }
            if (*mode == detcp::SolveMode::Optimize &&
                model.objective.kind == detcp::ObjectiveKind::Satisfy) {
                std::cerr << "detcp: skipping " << model_path << " mode=opt (no objective)\n";
                continue;
            }

            // sequential baseline for the speedup column
            detcp::EngineConfig seq_cfg;
            seq_cfg.strategy = detcp::Strategy::Seq;
            seq_cfg.mode = *mode;
            const RunOutcome seq_base = run_engine(prob, model.objective.kind, seq_cfg);
            const std::string seq_line = detcp::solution_line(names, seq_base.solution);

            for (const auto& strat_name : strategy_names) {
                const auto strategy = strategy_from(strat_name);
                if (!strategy) {
                    std::cerr << "detcp: unknown strategy '" << strat_name << "' in manifest\n";
                    return 2;
                }
                for (unsigned w : workers_list) {
                    std::uint64_t sum = 0, lo = 0, hi = 0;
                    std::string line;
                    for (unsigned rep = 0; rep < reps; ++rep) {
                        detcp::EngineConfig cfg;
                        cfg.workers = w;
                        cfg.strategy = *strategy;
                        cfg.mode = *mode;
                        cfg.threshold_s0 = threshold;
                        cfg.imbalance_window_ms = imbalance_window_ms(window);
                        const RunOutcome out = run_engine(prob, model.objective.kind, cfg);
                        const std::string this_line = detcp::solution_line(names, out.solution);
                        sum += out.wall_ns;
                        lo = rep == 0 ? out.wall_ns : std::min(lo, out.wall_ns);
                        hi = rep == 0 ? out.wall_ns : std::max(hi, out.wall_ns);
                        if (rep == 0) line = this_line;
                        // the deterministic strategy must reproduce the
                        // sequential answer on every repetition
                        if (*strategy == detcp::Strategy::Spd || *strategy == detcp::Strategy::Seq) {
                            if (this_line != seq_line) {
                                std::cerr << "detcp: DETERMINISM VIOLATION on " << model_path
                                          << " mode=" << mode_name << " workers=" << w
                                          << " rep=" << rep << "\n  sequential: " << seq_line
                                          << "\n  this run:   " << this_line << "\n";
                                return 4;
                            }
                        }
                    }
                    const double speedup =
                        sum == 0 ? 0.0
                                 : static_cast<double>(seq_base.wall_ns) /
                                       (static_cast<double>(sum) / static_cast<double>(reps));
                    csv += model_path + ',' + mode_name + ',' + strat_name + ',' +
                           std::to_string(w) + ',' + std::to_string(reps) + ',' +
                           std::to_string(sum / reps) + ',' + std::to_string(lo) + ',' +
                           std::to_string(hi) + ',' + std::to_string(speedup) + ",\"" + line +
                           "\"\n";
                }
            }
        }
    }

    if (!csv_path.empty()) {
        if (!write_file(csv_path, csv)) {
            std::cerr << "detcp: cannot write " << csv_path << "\n";
            return 2;
        }
    } else {
        std::cout << csv;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic parallel constraint search"};
    app.require_subcommand(1);

    std::string file, mode = "first", strategy = "spd", stats_csv, report_json_path;
    unsigned workers = 1, depth = 4;
    std::uint32_t threshold = 4, window = 10;
    std::uint64_t solutions = 1;
    std::uint32_t node_work = 0;
    std::string shape = "balanced", manifest;

    auto* solve = app.add_subcommand("solve", "solve a .dfzn model");
    solve->add_option("file", file, "model file")->required();
    solve->add_option("--mode", mode, "first|all|opt");
    solve->add_option("--strategy", strategy, "seq|spd|spda");
    solve->add_option("--workers", workers, "worker threads");
    solve->add_option("--threshold", threshold, "initial partitioning threshold S0");
    solve->add_option("--stats-csv", stats_csv, "write per-worker stats CSV here");
    solve->add_option("--report-json", report_json_path, "write run report JSON here");

    auto* synth = app.add_subcommand("synth", "run on a synthetic tree");
    synth->add_option("--shape", shape, "best|worst|balanced")->required();
    synth->add_option("--depth", depth, "tree depth (1..30)")->required();
    synth->add_option("--solutions", solutions, "solution count for balanced shape");
    synth->add_option("--node-work", node_work, "spin iterations per node visit");
    synth->add_option("--mode", mode, "first|all");
    synth->add_option("--strategy", strategy, "seq|spd|spda");
    synth->add_option("--workers", workers, "worker threads");
    synth->add_option("--threshold", threshold, "initial partitioning threshold S0");
    synth->add_option("--stats-csv", stats_csv, "write per-worker stats CSV here");
    synth->add_option("--report-json", report_json_path, "write run report JSON here");

    auto* bench = app.add_subcommand("bench", "run a benchmark matrix");
    bench->add_option("--manifest", manifest, "bench manifest JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (solve->parsed())
        return cmd_solve(file, mode, strategy, workers, threshold, window, stats_csv,
                         report_json_path);
    if (synth->parsed())
        return cmd_synth(shape, depth, solutions, node_work, mode, strategy, workers, threshold, window,
                         stats_csv, report_json_path);
    if (bench->parsed()) return cmd_bench(manifest);
    return 2;
}
