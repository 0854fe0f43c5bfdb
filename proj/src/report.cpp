#include "odslice/report.hpp"

namespace odslice {

namespace {

double ms(std::chrono::nanoseconds d) { return std::chrono::duration<double, std::milli>(d).count(); }

nlohmann::json pairs(const Program& program, const PairSet& ps) {
    auto out = nlohmann::json::array();
    for (auto [w, r] : ps) out.push_back({program.node_label(w), program.node_label(r)});
    return out;
}

nlohmann::json context(const Program& program, const Context& ctx) {
    auto out = nlohmann::json::array();
    for (NodeId c : ctx) out.push_back(program.node_label(c));
    return out;
}

}  // namespace

std::vector<std::string> labels(const Program& program, const NodeSet& nodes) {
    std::vector<std::string> out;
    out.reserve(nodes.size());
    for (NodeId n : nodes) out.push_back(program.node_label(n));
    return out;
}

nlohmann::json to_json(const Program& program, const SliceResult& result) {
    nlohmann::json j;
    j["mode"] = result.mode;
    j["slice"] = labels(program, result.slice);
    j["executions"] = result.executions;
    auto its = nlohmann::json::array();
    for (const auto& it : result.iterations) {
        its.push_back({
            {"iteration", it.iteration},
            {"frontiers2check", pairs(program, it.frontiers2check)},
            {"obs_defs", labels(program, it.obs_defs)},
            {"obs_ctxs", labels(program, it.obs_ctxs)},
            {"delta_control", labels(program, it.delta_control)},
            {"kept_frontiers", pairs(program, it.kept_frontiers)},
            {"ran", it.ran},
            {"run_steps", it.run_steps},
            {"wall_ms", ms(it.wall)},
        });
    }
    j["iterations"] = std::move(its);
    j["total_ms"] = ms(result.total);
    return j;
}

nlohmann::json to_json(const Program& program, const CorroborationReport& report) {
    nlohmann::json j;
    j["mode"] = report.mode;
    j["targeted"] = report.targeted.size();
    auto ex = nlohmann::json::array();
    for (const auto& cf : report.exercised) {
        ex.push_back({{"writer", program.node_label(cf.writer)},
                      {"writer_ctx", context(program, cf.writer_ctx)},
                      {"reader", program.node_label(cf.reader)},
                      {"reader_ctx", context(program, cf.reader_ctx)}});
    }
    j["exercised"] = std::move(ex);
    j["run_steps"] = report.run_steps;
    j["total_ms"] = ms(report.wall);
    return j;
}

nlohmann::json strip_timing(nlohmann::json j) {
    if (j.is_object()) {
        j.erase("total_ms");
        j.erase("wall_ms");
    }
    if (j.is_structured())
        for (auto& v : j) v = strip_timing(std::move(v));
    return j;
}

}  // namespace odslice
