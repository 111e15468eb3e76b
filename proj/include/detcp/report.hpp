#ifndef DETCP_REPORT_HPP
#define DETCP_REPORT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "detcp/model.hpp"
#include "detcp/parallel.hpp"

namespace detcp {

inline constexpr const char* kStatsCsvHeader =
    "worker,nodes_expanded,nodes_replayed,splits_produced,bobnodes_consumed,solutions_found,"
    "work_ns,wait_ns";

inline std::string stats_csv(const std::vector<WorkerStats>& stats) {
    std::string out = kStatsCsvHeader;
    out += '\n';
    for (const auto& ws : stats) {
        out += std::to_string(ws.worker) + ',' + std::to_string(ws.nodes_expanded) + ',' +
               std::to_string(ws.nodes_replayed) + ',' + std::to_string(ws.splits_produced) +
               ',' + std::to_string(ws.bobnodes_consumed) + ',' +
               std::to_string(ws.solutions_found) + ',' + std::to_string(ws.work_ns) + ',' +
               std::to_string(ws.wait_ns) + '\n';
    }
    return out;
}

inline std::string mode_name(SolveMode mode) {
    switch (mode) {
        case SolveMode::First: return "first";
        case SolveMode::All: return "all";
        case SolveMode::Optimize: return "opt";
    }
    return "?";
}

inline std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Seq: return "seq";
        case Strategy::Spd: return "spd";
        case Strategy::Spda: return "spda";
    }
    return "?";
}

/// Stable one-line result format: `status;objective;var=val,...;path`.
/// Unsatisfiable runs print `UNSAT;;;`.
inline std::string solution_line(const std::vector<std::string>& var_names,
                                 const std::optional<SolutionRecord>& rec) {
    if (!rec) return "UNSAT;;;";
    std::string out = "SAT;";
    if (rec->objective) out += std::to_string(*rec->objective);
    out += ';';
    for (std::size_t i = 0; i < rec->assignment.values.size(); ++i) {
        if (i) out += ',';
        const std::string name = i < var_names.size() ? var_names[i] : "v" + std::to_string(i);
        out += name + "=" + std::to_string(rec->assignment.values[i]);
    }
    out += ';';
    out += rec->path.to_string();
    return out;
}

inline std::vector<std::string> variable_names(const Model& m) {
    std::vector<std::string> names;
    names.reserve(m.vars.size());
    for (const auto& v : m.vars) names.push_back(v.name);
    return names;
}

/// One benchmark/run summary row.
struct RunReport {
    std::string model_id;
    SolveMode mode = SolveMode::First;
    Strategy strategy = Strategy::Spd;
    unsigned workers = 1;
    std::string solution;  // solution_line formatting
    std::uint64_t wall_ns = 0;
    std::vector<WorkerStats> worker_stats;
    std::optional<double> speedup_vs_seq;
};

}  // namespace detcp

#endif  // DETCP_REPORT_HPP
